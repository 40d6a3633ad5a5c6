//! Deterministic verification suites driven by a [`RunConfig`]. All random
//! sampling uses ChaCha8 seeded from the configured seed.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::autom::Automorphism;
use crate::config::{RunConfig, Suite, ThetaSpec};
use crate::error::{Error, Result};
use crate::fockhom::{run_homogeneous, unit_multis, HomModule};
use crate::fockprin::{constant_entries, run_principal, PrinConfig, PrinModule};
use crate::princiso::run_iso;
use crate::report::{Entry, Report};
use crate::rootsys::{gadd, gis_zero, gscale, vadd, vneg, vsub, CartanType, Chevalley, GVec, Lattice};
use crate::scalar::CycScalar;
use crate::toroidal::{verify_generating_relations, RelationWindow, TElem, Toroidal};
use crate::zbridge::{
    check_ck, compare_modules, from_zmodule, omega_entries, to_zmodule, verify_dress_x, verify_dressing, verify_exchange, verify_pairing,
    verify_verma, verify_zk_relations, CkSampling, HomZ, PrinZModule,
};

/// Runs the suite named in `cfg` and echoes the resolved config.
pub fn run(cfg: &RunConfig) -> Result<Report> {
    let rep = match cfg.suite {
        Suite::Toroidal => toroidal_suite(cfg)?,
        Suite::Zalg => zalg_suite(cfg)?,
        Suite::Homogeneous => run_homogeneous(cfg.algebra, cfg.n, &cfg.window)?,
        Suite::Principal => run_principal(cfg.algebra, cfg.n, &cfg.window, cfg.constants.clone())?,
        Suite::Iso => run_iso(cfg.algebra, &iso_perm(cfg), cfg.n, cfg.samples, cfg.seed)?,
        Suite::Roundtrip => roundtrip_suite(cfg)?,
        Suite::SolveConstants => solve_constants_suite(cfg)?,
        Suite::Gen => return Err(Error::Config { key: "suite".into(), msg: "gen writes a structure-constant dump, not a report".into() }),
    };
    Ok(echo(rep, cfg))
}

fn echo(mut rep: Report, cfg: &RunConfig) -> Report {
    let details = std::mem::take(&mut rep.config);
    rep.config = json!({ "resolved": cfg, "details": details });
    rep
}

fn chevalley(ctype: CartanType) -> Arc<Chevalley> {
    Arc::new(Chevalley::from_type(ctype))
}

fn theta_of(g: &Chevalley, spec: &ThetaSpec) -> Result<Automorphism> {
    match spec {
        ThetaSpec::Identity => Ok(Automorphism::identity(g)),
        ThetaSpec::Diagram(p) => Automorphism::diagram(g, p).map_err(|e| Error::Config { key: "theta".into(), msg: e.to_string() }),
        ThetaSpec::Coxeter => Err(Error::Config { key: "theta".into(), msg: "coxeter is only available to the Fock suites".into() }),
    }
}

fn iso_perm(cfg: &RunConfig) -> Vec<usize> {
    match &cfg.theta {
        ThetaSpec::Diagram(p) => p.clone(),
        _ => (0..cfg.algebra.rank).collect(),
    }
}

fn fmt_v(v: &[i64]) -> String {
    format!("{v:?}").replace(' ', "")
}

/// Basis vectors e_i and the two-term combinations e_i ± e_j of Γ.
fn cocycle_vectors(dim: usize) -> Vec<Vec<i64>> {
    let unit = |i: usize| {
        let mut v = vec![0; dim];
        v[i] = 1;
        v
    };
    let mut out: Vec<Vec<i64>> = (0..dim).map(unit).collect();
    for i in 0..dim {
        for j in i + 1..dim {
            out.push(vadd(&unit(i), &unit(j)));
            out.push(vsub(&unit(i), &unit(j)));
        }
    }
    out
}

/// The four cocycle identities on Γ = Q̊ ⊕ ⟨δ_i⟩ ⊕ ⟨d_i⟩, over basis vectors
/// and their two-term combinations.
pub fn cocycle_entries(ctype: CartanType, n: usize) -> Vec<Entry> {
    let lat = Lattice::extended(&ctype.cartan_matrix(), n);
    cocycle_check(&lat, &format!("{ctype} N={n}"))
}

fn cocycle_check(lat: &Lattice, label: &str) -> Vec<Entry> {
    let vs = cocycle_vectors(lat.dim());
    let params = format!("{label} vectors={}", vs.len());
    let sign = |x: i64| if x.rem_euclid(2) == 0 { 1 } else { -1 };
    let mut square = Entry::new("cocycle-square", &params);
    let mut swap = Entry::new("cocycle-swap", &params);
    let mut left = Entry::new("cocycle-additive-left", &params);
    let mut right = Entry::new("cocycle-additive-right", &params);
    for a in &vs {
        square.record(lat.eps(a, a) == sign(lat.form(a, a) / 2), || format!("a={}", fmt_v(a)));
        for b in &vs {
            swap.record(lat.eps(a, b) * lat.eps(b, a) == sign(lat.form(a, b)), || format!("a={} b={}", fmt_v(a), fmt_v(b)));
            for c in &vs {
                let w = || format!("a={} b={} c={}", fmt_v(a), fmt_v(b), fmt_v(c));
                left.record(lat.eps(&vadd(a, b), c) == lat.eps(a, c) * lat.eps(b, c), w);
                right.record(lat.eps(a, &vadd(b, c)) == lat.eps(a, b) * lat.eps(a, c), w);
            }
        }
        // Negatives are not in the sample set; cover ε(a, −a) separately.
        square.record(lat.eps(a, &vneg(a)) == lat.eps(a, a), || format!("a={} against -a", fmt_v(a)));
    }
    vec![square, swap, left, right]
}

fn random_g<R: Rng>(g: &Chevalley, rng: &mut R) -> GVec {
    let mut x = g.zero();
    for _ in 0..rng.gen_range(1..=3) {
        let c = rng.gen_range(1..=3) * if rng.gen_bool(0.5) { 1 } else { -1 };
        x = gadd(&x, &gscale(&CycScalar::int(c), &g.unit(rng.gen_range(0..g.dim()))));
    }
    x
}

/// Antisymmetry and Jacobi for the Chevalley bracket: exhaustive over basis
/// triples when dim G ≤ `exhaustive_dim`, otherwise `samples` random triples.
pub fn chevalley_entries(g: &Chevalley, samples: usize, seed: u64, exhaustive_dim: usize) -> Vec<Entry> {
    let dim = g.dim();
    let triples: Vec<(GVec, GVec, GVec)> = if dim <= exhaustive_dim {
        let mut t = Vec::with_capacity(dim * dim * dim);
        for a in 0..dim {
            for b in 0..dim {
                for c in 0..dim {
                    t.push((g.unit(a), g.unit(b), g.unit(c)));
                }
            }
        }
        t
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..samples).map(|_| (random_g(g, &mut rng), random_g(g, &mut rng), random_g(g, &mut rng))).collect()
    };
    let params = if dim <= exhaustive_dim {
        format!("{} basis triples={}", g.rs.ctype, triples.len())
    } else {
        format!("{} random triples={} seed={seed}", g.rs.ctype, triples.len())
    };
    let mut anti = Entry::new("chevalley-antisymmetry", &params);
    let mut jac = Entry::new("chevalley-jacobi", &params);
    for (i, (x, y, z)) in triples.iter().enumerate() {
        let s = gadd(&g.bracket(x, y), &g.bracket(y, x));
        anti.record(gis_zero(&s), || format!("triple {i}"));
        let j = gadd(&gadd(&g.bracket(x, &g.bracket(y, z)), &g.bracket(y, &g.bracket(z, x))), &g.bracket(z, &g.bracket(x, y)));
        jac.record(gis_zero(&j), || format!("triple {i}"));
    }
    vec![anti, jac]
}

/// Antisymmetry and Jacobi for the toroidal bracket on random θ-fixed
/// triples (|r0| ≤ 3, |r_i| ≤ 2), and vanishing of the normalized relation
/// elements over the same degree box.
pub fn toroidal_bracket_entries(t: &Toroidal, samples: usize, seed: u64) -> Vec<Entry> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let params = format!("{} N={} m={} triples={samples} seed={seed}", t.g.rs.ctype, t.n, t.m());
    let mut anti = Entry::new("toroidal-antisymmetry", &params);
    let mut jac = Entry::new("toroidal-jacobi", &params);
    let mut fixed = Entry::new("toroidal-closed", &params);
    for i in 0..samples {
        let x = t.random_fixed(&mut rng, 3, 2);
        let y = t.random_fixed(&mut rng, 3, 2);
        let z = t.random_fixed(&mut rng, 3, 2);
        let xy = t.bracket(&x, &y);
        anti.record(xy.add(&t.bracket(&y, &x)).is_zero(), || format!("triple {i}: [x,y]={xy:?}"));
        let j = t.bracket(&x, &t.bracket(&y, &z)).add(&t.bracket(&y, &t.bracket(&z, &x))).add(&t.bracket(&z, &xy));
        jac.record(t.normalize(&j).is_zero(), || format!("triple {i}: {j:?}"));
        fixed.record(t.is_fixed(&xy), || format!("triple {i}: [x,y] not fixed"));
    }
    let mut rel = Entry::new("toroidal-relation-element", format!("{} N={} m={} |r0|<=3 |ri|<=2", t.g.rs.ctype, t.n, t.m()));
    for r0 in -3..=3 {
        for r in degree_box(t.n, 2) {
            let e: TElem = t.relation_element(r0, &r);
            rel.record(t.normalize(&e).is_zero(), || format!("r0={r0} r={}", fmt_v(&r)));
        }
    }
    vec![anti, jac, fixed, rel]
}

fn degree_box(n: usize, b: i64) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out.into_iter().flat_map(|v| (-b..=b).map(move |x| [v.clone(), vec![x]].concat())).collect();
    }
    out
}

fn toroidal_suite(cfg: &RunConfig) -> Result<Report> {
    let g = chevalley(cfg.algebra);
    let theta = theta_of(&g, &cfg.theta)?;
    let t = Toroidal::new(g.clone(), cfg.n, theta);
    let mut rep = Report::new("toroidal", json!({ "m": t.m() }));
    rep.extend(cocycle_entries(cfg.algebra, cfg.n));
    rep.extend(chevalley_entries(&g, cfg.samples, cfg.seed, 8));
    rep.extend(toroidal_bracket_entries(&t, cfg.samples, cfg.seed));
    rep.extend(verify_generating_relations(&t, &RelationWindow::standard(cfg.n, cfg.window.w)));
    Ok(rep.finish())
}

fn principal_constants(cfg: &RunConfig, pc: &PrinConfig) -> Result<(Vec<CycScalar>, Vec<Entry>)> {
    match &cfg.constants {
        Some(c) => Ok((c.clone(), Vec::new())),
        None => {
            let (sols, es) = constant_entries(pc, cfg.window.w)?;
            Ok((vec![sols[0].clone()], es))
        }
    }
}

fn zalg_suite(cfg: &RunConfig) -> Result<Report> {
    let multi = unit_multis(cfg.n);
    let win = &cfg.window;
    if cfg.theta == ThetaSpec::Coxeter {
        let pc = PrinConfig::coxeter(cfg.algebra).map_err(|e| Error::Config { key: "algebra".into(), msg: e.to_string() })?;
        let (cs, solved) = principal_constants(cfg, &pc)?;
        let pm = PrinModule::new(pc.with_constants(cs.clone())?, cfg.n);
        let mut rep = Report::new("zalg", json!({ "module": "principal", "m": pm.m(), "constants": cs }));
        rep.extend(solved);
        rep.extend(verify_zk_relations(&PrinZModule::new(&pm), win, &multi, None)?);
        return Ok(rep.finish());
    }
    let hm = HomModule::new(cfg.algebra, cfg.n);
    let mut rep = Report::new("zalg", json!({ "module": "homogeneous" }));
    rep.extend(tag("direct", verify_zk_relations(&HomZ::new(&hm), win, &multi, None)?));
    let zm = to_zmodule(&hm, win)?;
    rep.extend(omega_entries(&zm));
    rep.extend(tag("vacuum-space", verify_zk_relations(&zm, win, &multi, None)?));
    rep.extend(verify_dressing(&zm, win, &multi)?);
    rep.extend(verify_exchange(&hm, win)?);
    rep.extend(verify_dress_x(&hm, win, &multi)?);
    Ok(rep.finish())
}

/// Prefixes params so that entries from different modules stay distinct.
fn tag(label: &str, es: Vec<Entry>) -> Vec<Entry> {
    es.into_iter()
        .map(|mut e| {
            e.params = format!("{label} {}", e.params);
            e
        })
        .collect()
}

fn roundtrip_suite(cfg: &RunConfig) -> Result<Report> {
    let hm = HomModule::new(cfg.algebra, cfg.n);
    let win = &cfg.window;
    let multi = unit_multis(cfg.n);
    let sampling = CkSampling { pairs: if cfg.samples == 0 { CkSampling::default().pairs } else { cfg.samples }, seed: cfg.seed };
    let zm = to_zmodule(&hm, win)?;
    let rec = from_zmodule(&zm, hm.g.clone())?;
    let mut rep = Report::new("roundtrip", json!({ "ck_pairs": sampling.pairs }));
    rep.extend(omega_entries(&zm));
    rep.push(verify_verma(&rec, win));
    rep.push(verify_pairing(&hm, &rec, win));
    rep.extend(compare_modules(&hm, &rec, win, &multi));
    rep.extend(tag("original", check_ck(&hm, win, &multi, sampling)?));
    rep.extend(tag("reconstructed", check_ck(&rec, win, &multi, sampling)?));
    Ok(rep.finish())
}

fn solve_constants_suite(cfg: &RunConfig) -> Result<Report> {
    let pc = PrinConfig::coxeter(cfg.algebra).map_err(|e| Error::Config { key: "algebra".into(), msg: e.to_string() })?;
    let (sols, es) = constant_entries(&pc, cfg.window.w)?;
    let mut rep = Report::new("solve-constants", json!({ "m": pc.m, "solutions": sols }));
    rep.notes.push(format!("solutions: {}", sols.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(", ")));
    rep.extend(es);
    Ok(rep.finish())
}

/// Structure constants of G on its Chevalley basis, nonzero brackets with a < b.
pub fn structure_constants(ctype: CartanType) -> serde_json::Value {
    let g = Chevalley::from_type(ctype);
    let basis: Vec<String> = (0..g.dim()).map(|a| g.symbol(a)).collect();
    let mut brackets = Vec::new();
    for a in 0..g.dim() {
        for b in a + 1..g.dim() {
            let terms: Vec<_> = g
                .basis_bracket_terms(a, b)
                .iter()
                .map(|&(k, c)| json!({ "sym": basis[k], "coeff": CycScalar::int(c) }))
                .collect();
            if !terms.is_empty() {
                brackets.push(json!({ "a": a, "b": b, "terms": terms }));
            }
        }
    }
    json!({ "algebra": ctype.to_string(), "basis": basis, "brackets": brackets })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cocycle_vector_count() {
        assert_eq!(cocycle_vectors(6).len(), 6 + 30);
    }

    #[test]
    fn degree_box_size() {
        assert_eq!(degree_box(2, 2).len(), 25);
        assert_eq!(degree_box(1, 1), vec![vec![-1], vec![0], vec![1]]);
    }

    #[test]
    fn broken_cocycle_is_caught() {
        let ctype: CartanType = "A2".parse().unwrap();
        assert!(cocycle_entries(ctype, 1).iter().all(Entry::passed));
        // Symmetric E off the diagonal breaks the square and swap identities.
        let mut lat = Lattice::extended(&ctype.cartan_matrix(), 1);
        lat.cocycle.base_matrix[0][1] = 1;
        let es = cocycle_check(&lat, "broken");
        let failed: Vec<&str> = es.iter().filter(|e| !e.passed()).map(|e| e.relation_id.as_str()).collect();
        assert_eq!(failed, vec!["cocycle-square", "cocycle-swap"]);
    }

    #[test]
    fn structure_dump_is_antisymmetric_data() {
        let v = structure_constants("A1".parse().unwrap());
        assert_eq!(v["basis"].as_array().unwrap().len(), 3);
        assert_eq!(v["brackets"].as_array().unwrap().len(), 3);
    }
}
