//! Run configuration: a TOML file of `key = value` pairs, optionally split
//! into per-suite sections, plus flag overrides. Precedence is defaults,
//! then top-level keys, then the suite's section, then flags.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::Serialize;

use crate::distops::TruncationWindow;
use crate::error::{Error, Result};
use crate::rootsys::CartanType;
use crate::scalar::{CycScalar, Q};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Toroidal,
    Zalg,
    Homogeneous,
    Principal,
    Iso,
    Roundtrip,
    SolveConstants,
    Gen,
}

impl Suite {
    pub const VERIFY: [Suite; 6] = [Suite::Toroidal, Suite::Zalg, Suite::Homogeneous, Suite::Principal, Suite::Iso, Suite::Roundtrip];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Toroidal => "toroidal",
            Suite::Zalg => "zalg",
            Suite::Homogeneous => "homogeneous",
            Suite::Principal => "principal",
            Suite::Iso => "iso",
            Suite::Roundtrip => "roundtrip",
            Suite::SolveConstants => "solve-constants",
            Suite::Gen => "gen",
        }
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        [Suite::Toroidal, Suite::Zalg, Suite::Homogeneous, Suite::Principal, Suite::Iso, Suite::Roundtrip, Suite::SolveConstants, Suite::Gen]
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| cfg_err("suite", format!("unknown suite '{s}'")))
    }
}

/// Which automorphism the suite runs with.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ThetaSpec {
    Identity,
    /// Diagram automorphism given by a node permutation.
    Diagram(Vec<usize>),
    /// Coxeter-type principal automorphism.
    Coxeter,
}

impl fmt::Display for ThetaSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ThetaSpec::Identity => write!(f, "identity"),
            ThetaSpec::Coxeter => write!(f, "coxeter"),
            ThetaSpec::Diagram(p) => {
                let s: Vec<String> = p.iter().map(|x| x.to_string()).collect();
                write!(f, "diagram:{}", s.join(","))
            }
        }
    }
}

impl FromStr for ThetaSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "identity" | "id" => Ok(ThetaSpec::Identity),
            "coxeter" | "principal" => Ok(ThetaSpec::Coxeter),
            _ => {
                let body = s
                    .strip_prefix("diagram:")
                    .ok_or_else(|| cfg_err("theta", format!("expected identity, coxeter or diagram:p0,p1,.. got '{s}'")))?;
                let perm = body
                    .split(',')
                    .map(|x| x.trim().parse::<usize>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|_| cfg_err("theta", format!("bad permutation '{body}'")))?;
                Ok(ThetaSpec::Diagram(perm))
            }
        }
    }
}

impl Serialize for ThetaSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Fully resolved configuration. The output path is not part of the echo
/// so that reports do not depend on where they are written.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub suite: Suite,
    #[serde(serialize_with = "ser_display")]
    pub algebra: CartanType,
    pub n: usize,
    pub theta: ThetaSpec,
    #[serde(serialize_with = "ser_display")]
    pub level: Q,
    #[serde(serialize_with = "ser_display")]
    pub window: TruncationWindow,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub constants: Option<Vec<CycScalar>>,
    pub solve_constants: bool,
    pub samples: usize,
    pub seed: u64,
    #[serde(skip)]
    pub output: Option<PathBuf>,
}

fn ser_display<T: fmt::Display, S: serde::Serializer>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn cfg_err(key: &str, msg: impl Into<String>) -> Error {
    Error::Config { key: key.to_string(), msg: msg.into() }
}

pub const KEYS: [&str; 10] = ["algebra", "n", "theta", "level", "window", "constants", "solve-constants", "samples", "seed", "output"];

/// Raw string-valued settings, keyed by the names in [`KEYS`].
pub type Settings = BTreeMap<String, String>;

impl RunConfig {
    pub fn defaults(suite: Suite) -> Settings {
        let (alg, n, theta, win, samples) = match suite {
            Suite::Toroidal => ("A1", 2, "identity", "4,0,0", 500),
            Suite::Zalg => ("A1", 1, "identity", "2,2,1", 0),
            Suite::Homogeneous => ("A2", 1, "identity", "2,2,1", 0),
            Suite::Principal | Suite::SolveConstants => ("A1", 1, "coxeter", "6,4,2", 0),
            Suite::Iso => ("A1", 1, "identity", "0,0,0", 1000),
            Suite::Roundtrip => ("A1", 1, "identity", "2,2,1", 0),
            Suite::Gen => ("A2", 1, "identity", "0,0,0", 0),
        };
        let mut s = Settings::new();
        s.insert("algebra".into(), alg.into());
        s.insert("n".into(), n.to_string());
        s.insert("theta".into(), theta.into());
        s.insert("level".into(), "1".into());
        s.insert("window".into(), win.into());
        s.insert("solve-constants".into(), "false".into());
        s.insert("samples".into(), samples.to_string());
        s.insert("seed".into(), "1".into());
        s
    }

    /// Reads the settings that apply to `suite` from a config file body.
    pub fn parse_file(text: &str, suite: Suite) -> Result<Settings> {
        let table: toml::Table = text.parse().map_err(|e: toml::de::Error| cfg_err("config", e.message().to_string()))?;
        let mut top = Settings::new();
        let mut section = Settings::new();
        for (k, v) in &table {
            match v {
                toml::Value::Table(t) => {
                    let sec: Suite = k.parse().map_err(|_| cfg_err(k, "unknown section"))?;
                    for (kk, vv) in t {
                        let key = format!("{k}.{kk}");
                        let val = scalar_string(&key, vv)?;
                        check_key(kk, &key)?;
                        if sec == suite {
                            section.insert(kk.clone(), val);
                        }
                    }
                }
                _ => {
                    check_key(k, k)?;
                    top.insert(k.clone(), scalar_string(k, v)?);
                }
            }
        }
        top.extend(section);
        Ok(top)
    }

    /// Layers defaults, file settings and flags (flags win), then validates.
    pub fn resolve(suite: Suite, file: Option<&str>, flags: &Settings) -> Result<Self> {
        let mut s = Self::defaults(suite);
        if let Some(text) = file {
            s.extend(Self::parse_file(text, suite)?);
        }
        for k in flags.keys() {
            check_key(k, k)?;
        }
        s.extend(flags.clone());
        Self::from_settings(suite, &s)
    }

    pub fn from_settings(suite: Suite, s: &Settings) -> Result<Self> {
        let get = |k: &str| s.get(k).map(String::as_str);
        let algebra: CartanType = get("algebra").unwrap_or_default().parse().map_err(|e: Error| cfg_err("algebra", e.to_string()))?;
        let n: usize = parse_num("n", get("n"))?;
        if n == 0 {
            return Err(cfg_err("n", "at least one extra loop variable is required"));
        }
        let theta: ThetaSpec = get("theta").unwrap_or_default().parse()?;
        let level: Q = {
            let v = get("level").unwrap_or_default();
            let c: CycScalar = v.parse().map_err(|_| cfg_err("level", format!("bad rational '{v}'")))?;
            c.as_rational().ok_or_else(|| cfg_err("level", "level must be rational"))?
        };
        let window: TruncationWindow = get("window").unwrap_or_default().parse()?;
        let constants = match get("constants") {
            None | Some("") => None,
            Some(v) => Some(
                v.split(',')
                    .map(|c| c.parse::<CycScalar>().map_err(|_| cfg_err("constants", format!("bad scalar '{c}'"))))
                    .collect::<Result<Vec<_>>>()?,
            ),
        };
        let solve_constants = match get("solve-constants").unwrap_or("false") {
            "true" => true,
            "false" => false,
            v => return Err(cfg_err("solve-constants", format!("expected true or false, got '{v}'"))),
        };
        let samples: usize = parse_num("samples", get("samples"))?;
        let seed: u64 = parse_num("seed", get("seed"))?;
        let output = get("output").map(PathBuf::from);
        let cfg = RunConfig { suite, algebra, n, theta, level, window, constants, solve_constants, samples, seed, output };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        use Suite::*;
        if self.level == Q::from(0) {
            return Err(cfg_err("level", "level k must be nonzero"));
        }
        let fock = matches!(self.suite, Zalg | Homogeneous | Principal | Roundtrip | SolveConstants);
        if fock && self.level != Q::from(1) {
            return Err(cfg_err("level", "the Fock realizations have level 1"));
        }
        let theta_ok = match self.suite {
            Toroidal => !matches!(self.theta, ThetaSpec::Coxeter),
            Gen => self.theta == ThetaSpec::Identity,
            Zalg => !matches!(self.theta, ThetaSpec::Diagram(_)),
            Homogeneous | Roundtrip => self.theta == ThetaSpec::Identity,
            Principal | SolveConstants => self.theta == ThetaSpec::Coxeter,
            Iso => !matches!(self.theta, ThetaSpec::Coxeter),
        };
        if !theta_ok {
            return Err(cfg_err("theta", format!("'{}' is not supported by the {} suite", self.theta, self.suite.name())));
        }
        if self.constants.is_some() && self.solve_constants {
            return Err(cfg_err("constants", "give constants or solve-constants, not both"));
        }
        if matches!(self.suite, Toroidal | Iso) && self.samples == 0 {
            return Err(cfg_err("samples", "must be positive"));
        }
        Ok(())
    }
}

fn check_key(k: &str, full: &str) -> Result<()> {
    if KEYS.contains(&k) {
        Ok(())
    } else {
        Err(cfg_err(full, "unknown key"))
    }
}

fn scalar_string(key: &str, v: &toml::Value) -> Result<String> {
    Ok(match v {
        toml::Value::String(s) => s.clone(),
        toml::Value::Integer(i) => i.to_string(),
        toml::Value::Boolean(b) => b.to_string(),
        toml::Value::Array(a) => a.iter().map(|x| scalar_string(key, x)).collect::<Result<Vec<_>>>()?.join(","),
        _ => return Err(cfg_err(key, "expected a string, integer, boolean or array")),
    })
}

fn parse_num<T: FromStr>(key: &str, v: Option<&str>) -> Result<T> {
    let v = v.unwrap_or_default();
    v.trim().parse().map_err(|_| cfg_err(key, format!("expected a nonnegative integer, got '{v}'")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_sections_override_top() {
        let file = "algebra = \"A2\"\nseed = 5\n[toroidal]\nseed = 9\nwindow = [3, 0, 0]\n[iso]\nseed = 11\n";
        let mut flags = Settings::new();
        flags.insert("n".into(), "1".into());
        let c = RunConfig::resolve(Suite::Toroidal, Some(file), &flags).unwrap();
        assert_eq!(c.algebra.to_string(), "A2");
        assert_eq!((c.seed, c.n, c.window.w), (9, 1, 3));
        flags.insert("seed".into(), "2".into());
        assert_eq!(RunConfig::resolve(Suite::Toroidal, Some(file), &flags).unwrap().seed, 2);
    }

    #[test]
    fn errors_name_the_key() {
        let key_of = |r: Result<RunConfig>| match r {
            Err(Error::Config { key, .. }) => key,
            other => panic!("{other:?}"),
        };
        assert_eq!(key_of(RunConfig::resolve(Suite::Toroidal, Some("[toroidal]\ncolour = 1\n"), &Settings::new())), "toroidal.colour");
        let mut f = Settings::new();
        f.insert("window".into(), "3,3".into());
        assert_eq!(key_of(RunConfig::resolve(Suite::Homogeneous, None, &f)), "window");
        let mut f = Settings::new();
        f.insert("theta".into(), "coxeter".into());
        assert_eq!(key_of(RunConfig::resolve(Suite::Homogeneous, None, &f)), "theta");
        let mut f = Settings::new();
        f.insert("level".into(), "0".into());
        assert_eq!(key_of(RunConfig::resolve(Suite::Iso, None, &f)), "level");
    }

    #[test]
    fn theta_round_trips() {
        for s in ["identity", "coxeter", "diagram:2,1,0"] {
            assert_eq!(s.parse::<ThetaSpec>().unwrap().to_string(), s);
        }
    }

    #[test]
    fn echo_omits_output() {
        let mut f = Settings::new();
        f.insert("output".into(), "/tmp/x.json".into());
        let c = RunConfig::resolve(Suite::Iso, None, &f).unwrap();
        let v = serde_json::to_value(&c).unwrap();
        assert!(v.get("output").is_none());
        assert_eq!(v["window"], "0,0,0");
    }
}
