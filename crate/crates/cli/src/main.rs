use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use torlab_core::config::{RunConfig, Settings, Suite};
use torlab_core::{suites, Error};

/// Exact verification suites for twisted toroidal Lie algebras and their
/// Fock-space realizations.
#[derive(Parser, Debug)]
#[command(name = "torlab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Dump the Chevalley structure constants of G as JSON.
    Gen(Common),
    /// Run a verification suite and write its report.
    Verify {
        suite: VerifySuite,
        #[command(flatten)]
        common: Common,
    },
    /// Solve for the principal-picture constants.
    SolveConstants(Common),
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum VerifySuite {
    Toroidal,
    Zalg,
    Homogeneous,
    Principal,
    Iso,
    Roundtrip,
}

impl From<VerifySuite> for Suite {
    fn from(s: VerifySuite) -> Suite {
        match s {
            VerifySuite::Toroidal => Suite::Toroidal,
            VerifySuite::Zalg => Suite::Zalg,
            VerifySuite::Homogeneous => Suite::Homogeneous,
            VerifySuite::Principal => Suite::Principal,
            VerifySuite::Iso => Suite::Iso,
            VerifySuite::Roundtrip => Suite::Roundtrip,
        }
    }
}

/// Every flag overrides the key of the same name in the config file.
#[derive(Args, Debug, Default)]
struct Common {
    /// Config file (TOML, key = value with optional per-suite sections).
    #[arg(long)]
    config: Option<PathBuf>,
    /// ADE type, e.g. A2 or D4.
    #[arg(long)]
    algebra: Option<String>,
    /// Number of extra loop variables N.
    #[arg(long)]
    n: Option<String>,
    /// identity, coxeter, or diagram:p0,p1,...
    #[arg(long)]
    theta: Option<String>,
    /// Level k.
    #[arg(long)]
    level: Option<String>,
    /// Truncation window W,D,B.
    #[arg(long)]
    window: Option<String>,
    /// Comma-separated constants, one per orbit, e.g. 1/4*z4^1.
    #[arg(long)]
    constants: Option<String>,
    /// Solve for the constants instead of taking them from the config.
    #[arg(long)]
    solve_constants: bool,
    #[arg(long)]
    samples: Option<String>,
    /// Seed for the ChaCha8 sampler.
    #[arg(long)]
    seed: Option<String>,
    /// Where to write the JSON output; stdout when absent.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

impl Common {
    fn flags(&self) -> Settings {
        let mut s = Settings::new();
        let pairs = [
            ("algebra", &self.algebra),
            ("n", &self.n),
            ("theta", &self.theta),
            ("level", &self.level),
            ("window", &self.window),
            ("constants", &self.constants),
            ("samples", &self.samples),
            ("seed", &self.seed),
        ];
        for (k, v) in pairs {
            if let Some(v) = v {
                s.insert(k.to_string(), v.clone());
            }
        }
        if self.solve_constants {
            s.insert("solve-constants".into(), "true".into());
        }
        if let Some(p) = &self.output {
            s.insert("output".into(), p.display().to_string());
        }
        s
    }

    fn resolve(&self, suite: Suite) -> Result<RunConfig, Error> {
        let text = match &self.config {
            Some(p) => Some(fs::read_to_string(p).map_err(|e| Error::Config { key: "config".into(), msg: format!("{}: {e}", p.display()) })?),
            None => None,
        };
        RunConfig::resolve(suite, text.as_deref(), &self.flags())
    }
}

fn write_out(cfg: &RunConfig, body: &str) -> Result<(), Error> {
    match &cfg.output {
        Some(p) => fs::write(p, format!("{body}\n")).map_err(|e| Error::Config { key: "output".into(), msg: format!("{}: {e}", p.display()) }),
        None => {
            // A closed pipe (e.g. `| head`) is not an error worth reporting.
            let _ = writeln!(std::io::stdout().lock(), "{body}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<bool, Error> {
    let (suite, common) = match &cli.command {
        Command::Gen(c) => (Suite::Gen, c),
        Command::Verify { suite, common } => ((*suite).into(), common),
        Command::SolveConstants(c) => (Suite::SolveConstants, c),
    };
    let cfg = common.resolve(suite)?;
    if suite == Suite::Gen {
        let dump = suites::structure_constants(cfg.algebra);
        write_out(&cfg, &serde_json::to_string_pretty(&dump).expect("dump serializes"))?;
        return Ok(true);
    }
    let rep = suites::run(&cfg)?;
    write_out(&cfg, &rep.to_json())?;
    let s = &rep.summary;
    eprintln!("{}: {} pass, {} fail, {} window-clipped", rep.suite, s.pass, s.fail, s.window_clipped);
    for e in rep.failures().take(10) {
        eprintln!("  {} [{}] {:?}: {}", e.relation_id, e.params, e.status, e.witness.as_deref().unwrap_or(""));
    }
    Ok(rep.all_pass())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
