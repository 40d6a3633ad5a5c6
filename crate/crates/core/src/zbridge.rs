//! Z-algebras and the bridge between the categories C_k and D_k.
//!
//! A [`CkModule`] carries the fields x_β(r̲, ζ), h(r̲, ζ), k_i(r̲, ζ^m) of the
//! toroidal algebra; a [`DkModule`] carries Z(β, r̲, ζ) and k_i(r̲, ζ^m).
//! `to_zmodule` dresses x_β by E^±(β) and restricts to the vacuum space Ω_V;
//! `from_zmodule` rebuilds M(k) ⊗ W. Both directions are implemented for the
//! untwisted case m = 1.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::rc::Rc;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::distops::{binomial_coeffs, field_product, Dressing, OpGrid, Sign, TruncationWindow};
use crate::fock::{
    fv_add, fv_axpy, fv_render, fv_single, fv_sub, labels_in_ball, mono_level, mono_mul, monomials,
    series_add, ConstField, FieldOp, FockSpace, FockState, FockVec, Mono, Series, Vertex,
};
use crate::fockhom::{fmt_v, HomModule};
use crate::fockprin::PrinModule;
use crate::linalg;
use crate::report::Entry;
use crate::rootsys::{vadd, Chevalley, Lattice, RootSystem};
use crate::toroidal::{Sym, TElem, Toroidal};
use crate::{CycScalar, Error, Result, Q};

// ---------------------------------------------------------------------------
// Module interfaces

/// A module for the toroidal algebra given by its generating fields.
pub trait CkModule {
    fn algebra(&self) -> &Toroidal;
    fn level(&self) -> Q;
    fn space(&self) -> &FockSpace;
    /// Oscillator coordinates of β ∈ Q̊ (simple-root coordinates) in `space`.
    fn root_osc(&self, beta: &[i64]) -> Vec<Q>;
    fn x_field(&self, b: usize, r: &[i64]) -> Box<dyn FieldOp + '_>;
    /// h(r̲, ζ) for h in simple-root coordinates.
    fn cartan_field(&self, h: &[i64], r: &[i64]) -> Box<dyn FieldOp + '_>;
    fn k_field(&self, i: usize, r: &[i64]) -> Box<dyn FieldOp + '_>;
    /// Label shift of k_0(r̲, ζ^m).
    fn k0_shift(&self, r: &[i64]) -> Vec<i64>;
    fn d_eigen(&self, i: usize, v: &FockState) -> Q;
    fn states(&self, win: &TruncationWindow) -> Vec<FockState>;
}

/// Which part of the Cartan subalgebra is θ-fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum H0 {
    Full,
    Zero,
}

/// The data entering the Z-algebra relations.
#[derive(Debug, Clone)]
pub struct ZData {
    pub m: u32,
    pub k: Q,
    pub rs: RootSystem,
    /// θβ as a root index.
    pub theta: Vec<usize>,
    /// η(p, β), indexed [p][β].
    pub eta: Vec<Vec<Q>>,
    pub h0: H0,
}

impl ZData {
    pub fn untwisted(rs: RootSystem, k: Q) -> Self {
        let n = rs.num_roots();
        ZData { m: 1, k, rs, theta: (0..n).collect(), eta: vec![vec![Q::one(); n]], h0: H0::Full }
    }

    pub fn theta_pow(&self, p: i64, b: usize) -> usize {
        let p = p.rem_euclid(self.m as i64);
        (0..p).fold(b, |c, _| self.theta[c])
    }

    fn w(&self, p: i64) -> CycScalar {
        CycScalar::root_of_unity(self.m, p)
    }

    fn w_rational(&self, p: i64) -> Result<Q> {
        self.w(p).as_rational().ok_or_else(|| Error::Config {
            key: "m".into(),
            msg: format!("binomial factors need w = ±1, m = {}", self.m),
        })
    }

    pub fn factors(&self, b1: usize, b2: usize) -> Result<Vec<(Q, Q)>> {
        (0..self.m as i64)
            .map(|p| {
                let t = &self.rs.roots[self.theta_pow(p, b1)];
                Ok((Q::from(self.rs.form(t, &self.rs.roots[b2]) as i128), self.w_rational(-p)?))
            })
            .collect()
    }

    /// ⟨x_β, x_{−β}⟩ = −2/⟨β, β⟩.
    pub fn x_pairing(&self, b: usize) -> Q {
        let r = &self.rs.roots[b];
        Q::new(-2, self.rs.form(r, r) as i128)
    }

    pub fn h0_basis(&self) -> Vec<Vec<i64>> {
        match self.h0 {
            H0::Zero => Vec::new(),
            H0::Full => (0..self.rs.rank())
                .map(|i| {
                    let mut e = vec![0; self.rs.rank()];
                    e[i] = 1;
                    e
                })
                .collect(),
        }
    }
}

/// A module for the Z-algebra.
pub trait DkModule {
    fn zdata(&self) -> &ZData;
    fn n(&self) -> usize;
    /// Z(β, r̲, ζ) = c · F(ζ).
    fn z_field(&self, b: usize, r: &[i64]) -> Result<(CycScalar, Box<dyn FieldOp + '_>)>;
    fn k_field(&self, i: usize, r: &[i64]) -> Box<dyn FieldOp + '_>;
    fn k0_shift(&self, r: &[i64]) -> Vec<i64>;
    /// Eigenvalue of h ∈ h_0 (simple-root coordinates).
    fn h0_eigen(&self, h: &[i64], v: &FockState) -> Q;
    fn d_eigen(&self, i: usize, v: &FockState) -> Q;
    fn states(&self, win: &TruncationWindow) -> Vec<FockState>;
}

// ---------------------------------------------------------------------------
// Scalar-extended vectors

pub type CVec = BTreeMap<FockState, CycScalar>;

fn cv_axpy(acc: &mut CVec, c: &CycScalar, v: &FockVec) {
    if c.is_zero() {
        return;
    }
    for (s, x) in v {
        let slot = acc.entry(s.clone()).or_insert_with(CycScalar::zero);
        *slot += &c.scale(x);
        if slot.is_zero() {
            acc.remove(s);
        }
    }
}

fn cv_render(v: &CVec) -> String {
    if v.is_empty() {
        return "0".into();
    }
    v.iter().map(|(s, c)| format!("({c})·{:?}|{:?}", s.osc, s.label)).collect::<Vec<_>>().join(" + ")
}

fn scaled(c: &CycScalar, v: &FockVec) -> CVec {
    let mut out = CVec::new();
    cv_axpy(&mut out, c, v);
    out
}

fn apply_mode(f: &dyn FieldOp, n: i64, v: &FockVec) -> FockVec {
    let mut out = FockVec::new();
    for (s, c) in v {
        fv_axpy(&mut out, c, &f.mode(n, s));
    }
    out
}

fn grid_at(g: &OpGrid, a: i64, b: i64) -> FockVec {
    g.get(&(a, b)).cloned().unwrap_or_default()
}

fn in_window(s: &Series, w: i64, n: i64) -> FockVec {
    if n.abs() > w {
        return FockVec::new();
    }
    s.get(&n).cloned().unwrap_or_default()
}

fn params_rs(r: &[i64], s: &[i64]) -> String {
    format!("r={} s={}", fmt_v(r), fmt_v(s))
}

/// F(ζ)G(ζ)/k against H(ζ) for each pair (F, H), on every state and mode of the
/// window. The expansion of G is shared between the pairs.
fn check_factorization(
    e: &mut Entry,
    pairs: &[(&dyn FieldOp, &dyn FieldOp)],
    g: &dyn FieldOp,
    g_shift: &[i64],
    k: &Q,
    states: &[FockState],
    w: i64,
) {
    let inv = Q::one() / k;
    for v in states {
        let probe = FockState { osc: v.osc.clone(), label: vadd(&v.label, g_shift) };
        let tf = pairs.iter().map(|(f, _)| f.top(&probe)).max().unwrap_or(0);
        let inner = g.expand(v, -w - tf);
        for (f, h) in pairs {
            let mut lhs = Series::new();
            for (p, vec) in &inner {
                for (t, c) in vec {
                    for (p2, v2) in f.expand(t, -w - p) {
                        if p + p2 >= -w {
                            series_add(&mut lhs, p + p2, c, &v2);
                        }
                    }
                }
            }
            let rhs = h.expand(v, -w);
            for n in -w..=w {
                let mut a = FockVec::new();
                fv_axpy(&mut a, &inv, &in_window(&lhs, w, n));
                let b = in_window(&rhs, w, n);
                e.record(a == b, || format!("mode {n} on {v:?}: {} vs {}", fv_render(&a), fv_render(&b)));
            }
        }
    }
}

/// [D, F_n] v = λ(n) F_n v for an eigen-operator D.
fn check_grading(
    e: &mut Entry,
    eig: &dyn Fn(&FockState) -> Q,
    f: &dyn FieldOp,
    states: &[FockState],
    w: i64,
    want: &dyn Fn(i64) -> Q,
) {
    for v in states {
        let dv = eig(v);
        for n in -w..=w {
            let target = want(n);
            for t in f.mode(n, v).keys() {
                let got = eig(t) - &dv;
                e.record(got == target, || format!("mode {n} on {v:?} → {t:?}: shift {got}, want {target}"));
            }
        }
    }
}

// ---------------------------------------------------------------------------
// The Z-algebra relation checker

/// The Z commutator relation at one root pair and r̲, s̲.
fn check_z_commutator(dk: &dyn DkModule, b1: usize, b2: usize, r: &[i64], s: &[i64], states: &[FockState], w: i64) -> Result<Entry> {
    let zd = dk.zdata();
    let rs = &zd.rs;
    let m = zd.m as i64;
    let mq = Q::from(m as i128);
    let mut e = Entry::new(
        "zalg-z-commutator",
        format!("b1={} b2={} {}", fmt_v(&rs.roots[b1]), fmt_v(&rs.roots[b2]), params_rs(r, s)),
    );
    let (c1, z1) = dk.z_field(b1, r)?;
    let (c2, z2) = dk.z_field(b2, s)?;
    let c12 = &c1 * &c2;
    let facs = zd.factors(b1, b2)?;
    let rsum = vadd(r, s);
    let k0 = dk.k_field(0, &rsum);
    let ks: Vec<_> = (1..=dk.n()).map(|i| dk.k_field(i, &rsum)).collect();

    // Root-sum terms: (p, coefficient, field).
    let mut root_terms: Vec<(i64, CycScalar, Box<dyn FieldOp + '_>)> = Vec::new();
    let mut zero_ps = Vec::new();
    for p in 0..m {
        let t = zd.theta_pow(p, b1);
        let sum = vadd(&rs.roots[t], &rs.roots[b2]);
        if let Some(gi) = rs.root_index(&sum) {
            let (cg, zg) = dk.z_field(gi, &rsum)?;
            let eps = rs.eps(&rs.roots[t], &rs.roots[b2]);
            let c = (&cg).scale(&(zd.eta[p as usize][b1] * Q::from(eps as i128) / mq));
            root_terms.push((p, c, zg));
        } else if sum.iter().all(|&x| x == 0) {
            zero_ps.push(p);
        }
    }
    let b2_0: Option<&Vec<i64>> = match zd.h0 {
        H0::Full => Some(&rs.roots[b2]),
        H0::Zero => None,
    };
    for v in states {
        let first = field_product(z1.as_ref(), z2.as_ref(), &facs, true, v, w);
        let second = field_product(z2.as_ref(), z1.as_ref(), &facs, false, v, w);
        for a in -w..=w {
            for b in -w..=w {
                let mut lq = grid_at(&first, a, b);
                fv_axpy(&mut lq, &-Q::one(), &grid_at(&second, a, b));
                let lhs = scaled(&c12, &lq);
                let n = a + b;
                let mut rhs = CVec::new();
                for (p, c, zg) in &root_terms {
                    cv_axpy(&mut rhs, &(&zd.w(-p * a) * c), &zg.mode(n, v));
                }
                if !zero_ps.is_empty() {
                    let k0n = k0.mode(n, v);
                    let kin: Vec<FockVec> = ks.iter().map(|k| k.mode(n, v)).collect();
                    for &p in &zero_ps {
                        let amp = zd.x_pairing(b2) * zd.eta[p as usize][b1] / mq;
                        let wp = zd.w(-p * a);
                        if let Some(h) = b2_0 {
                            let mut hv = FockVec::new();
                            for (t, x) in &k0n {
                                fv_add(&mut hv, t.clone(), *x * dk.h0_eigen(h, t));
                            }
                            cv_axpy(&mut rhs, &wp.scale(&(-amp / zd.k)), &hv);
                        }
                        for (i, kv) in kin.iter().enumerate() {
                            cv_axpy(&mut rhs, &wp.scale(&(amp * Q::from(r[i] as i128))), kv);
                        }
                        cv_axpy(&mut rhs, &wp.scale(&(amp * Q::from(a as i128) / (mq * zd.k))), &k0n);
                    }
                }
                let mut diff = lhs.clone();
                for (t, x) in &rhs {
                    let slot = diff.entry(t.clone()).or_insert_with(CycScalar::zero);
                    *slot -= x;
                    if slot.is_zero() {
                        diff.remove(t);
                    }
                }
                e.record(diff.is_empty(), || {
                    format!("({a},{b}) on {v:?}: lhs {} rhs {}", cv_render(&lhs), cv_render(&rhs))
                });
            }
        }
    }
    Ok(e)
}

/// The ten relations of the Z-algebra on window states, for r̲, s̲ in `multi`.
/// `pairs` restricts the commutator relation to the given root pairs (all when `None`).
pub fn verify_zk_relations(
    dk: &dyn DkModule,
    win: &TruncationWindow,
    multi: &[Vec<i64>],
    pairs: Option<&[(usize, usize)]>,
) -> Result<Vec<Entry>> {
    let zd = dk.zdata();
    let nr = zd.rs.num_roots();
    let n = dk.n();
    let m = zd.m as i64;
    let w = win.w;
    let states = dk.states(win);
    let k = zd.k;
    if k.is_zero() {
        return Err(Error::ZeroLevel);
    }
    let mut out = Vec::new();
    let root = |b: usize| fmt_v(&zd.rs.roots[b]);

    for b in 0..nr {
        for r in multi {
            for s in multi {
                let mut e = Entry::new("zalg-z-factorization", format!("b={} {}", root(b), params_rs(r, s)));
                let (c, z) = dk.z_field(b, r)?;
                let (c2, z2) = dk.z_field(b, &vadd(r, s))?;
                e.record(c == c2, || format!("constants differ: {c} vs {c2}"));
                let k0 = dk.k_field(0, s);
                check_factorization(&mut e, &[(z.as_ref(), z2.as_ref())], k0.as_ref(), &dk.k0_shift(s), &k, &states, w);
                out.push(e);
            }
        }
    }

    for i in 0..=n {
        for r in multi {
            for s in multi {
                let mut e = Entry::new("zalg-k-factorization", format!("i={i} {}", params_rs(r, s)));
                let k0 = dk.k_field(0, r);
                let ki = dk.k_field(i, s);
                let want = dk.k_field(i, &vadd(r, s));
                check_factorization(&mut e, &[(k0.as_ref(), want.as_ref())], ki.as_ref(), &dk.k0_shift(s), &k, &states, w);
                out.push(e);
            }
        }
    }

    for r in multi {
        let mut e = Entry::new("zalg-k-linear-relation", format!("r={}", fmt_v(r)));
        let k0 = dk.k_field(0, r);
        let ks: Vec<_> = (1..=n).map(|i| dk.k_field(i, r)).collect();
        for v in &states {
            for p in -w..=w {
                let mut acc = FockVec::new();
                fv_axpy(&mut acc, &Q::new(p as i128, m as i128), &k0.mode(p, v));
                for (i, kf) in ks.iter().enumerate() {
                    fv_axpy(&mut acc, &Q::from(r[i] as i128), &kf.mode(p, v));
                }
                e.record(acc.is_empty(), || format!("mode {p} on {v:?}: {}", fv_render(&acc)));
            }
        }
        out.push(e);
    }

    let d0 = |v: &FockState| dk.d_eigen(0, v);
    for b in 0..nr {
        for r in multi {
            let mut e = Entry::new("zalg-z-energy", format!("b={} r={}", root(b), fmt_v(r)));
            let (c, z) = dk.z_field(b, r)?;
            if !c.is_zero() {
                check_grading(&mut e, &d0, z.as_ref(), &states, w, &|p| Q::from(p as i128));
            }
            out.push(e);
        }
    }

    for r in multi {
        for j in 0..=n {
            let kj = dk.k_field(j, r);
            let mut e = Entry::new("zalg-k-energy", format!("i={j} r={}", fmt_v(r)));
            check_grading(&mut e, &d0, kj.as_ref(), &states, w, &|p| Q::from(p as i128));
            out.push(e);
            for i in 1..=n {
                let mut e = Entry::new("zalg-k-degree", format!("i={i} j={j} r={}", fmt_v(r)));
                let ri = Q::from(r[i - 1] as i128);
                let di = |v: &FockState| dk.d_eigen(i, v);
                check_grading(&mut e, &di, kj.as_ref(), &states, w, &|_| ri);
                out.push(e);
            }
        }
    }

    let pair_list: Vec<(usize, usize)> = match pairs {
        Some(p) => p.to_vec(),
        None => (0..nr).flat_map(|a| (0..nr).map(move |b| (a, b))).collect(),
    };
    for &(b1, b2) in &pair_list {
        for r in multi {
            for s in multi {
                out.push(check_z_commutator(dk, b1, b2, r, s, &states, w)?);
            }
        }
    }

    let h0 = zd.h0_basis();
    if h0.is_empty() {
        let mut e = Entry::new("zalg-z-h0-weight", "h0=0");
        e.record(true, String::new);
        out.push(e);
    }
    for h in &h0 {
        for b in 0..nr {
            for r in multi {
                let mut e = Entry::new("zalg-z-h0-weight", format!("a={} b={} r={}", fmt_v(h), root(b), fmt_v(r)));
                let (_, z) = dk.z_field(b, r)?;
                let want = Q::from(zd.rs.form(h, &zd.rs.roots[b]) as i128);
                let eig = |v: &FockState| dk.h0_eigen(h, v);
                check_grading(&mut e, &eig, z.as_ref(), &states, w, &|_| want);
                out.push(e);
            }
        }
    }

    // Twist relation read as Z(β, r̲, w^p ζ) = η(p, β) Z(θ^p β, r̲, ζ).
    for b in 0..nr {
        for p in 0..m {
            for r in multi {
                let mut e = Entry::new("zalg-z-twist", format!("b={} p={p} r={}", root(b), fmt_v(r)));
                let (c, z) = dk.z_field(b, r)?;
                let (ct, zt) = dk.z_field(zd.theta_pow(p, b), r)?;
                let eta = CycScalar::rational(zd.eta[p as usize][b]);
                for v in &states {
                    let full = z.expand(v, -w);
                    for q in -w..=w {
                        let lhs = scaled(&(&zd.w(p * q) * &c), &in_window(&full, w, q));
                        let rhs = scaled(&(&eta * &ct), &zt.mode(q, v));
                        e.record(lhs == rhs, || format!("mode {q} on {v:?}: {} vs {}", cv_render(&lhs), cv_render(&rhs)));
                    }
                }
                out.push(e);
            }
        }
    }

    for i in 0..=n {
        for r in multi {
            let ki = dk.k_field(i, r);
            for s in multi {
                let mut e = Entry::new("zalg-k-central", format!("i={i} {}", params_rs(r, s)));
                let mut others: Vec<(CycScalar, Box<dyn FieldOp + '_>)> = Vec::new();
                for b in 0..nr {
                    others.push(dk.z_field(b, s)?);
                }
                for j in 0..=n {
                    others.push((CycScalar::one(), dk.k_field(j, s)));
                }
                check_central(&mut e, ki.as_ref(), &others, &states, w, m);
                out.push(e);
            }
        }
    }
    Ok(out)
}

fn check_central(e: &mut Entry, kf: &dyn FieldOp, others: &[(CycScalar, Box<dyn FieldOp + '_>)], states: &[FockState], w: i64, m: i64) {
    for v in states {
        let one = fv_single(v.clone());
        for a in (-w..=w).filter(|a| a % m == 0) {
            let kv = kf.mode(a, v);
            for (c, f) in others {
                if c.is_zero() {
                    continue;
                }
                for b in -w..=w {
                    let lhs = apply_mode(kf, a, &f.mode(b, v));
                    let rhs = apply_mode(f.as_ref(), b, &kv);
                    let diff = fv_sub(&lhs, &rhs);
                    e.record(diff.is_empty(), || format!("modes ({a},{b}) on {v:?}: {}", fv_render(&diff)));
                }
            }
        }
        let _ = &one;
    }
}

// ---------------------------------------------------------------------------
// Implementations for the Fock modules

impl CkModule for HomModule {
    fn algebra(&self) -> &Toroidal {
        &self.alg
    }

    fn level(&self) -> Q {
        Q::one()
    }

    fn space(&self) -> &FockSpace {
        &self.space
    }

    fn root_osc(&self, beta: &[i64]) -> Vec<Q> {
        self.space.to_osc(&self.embed(beta)).expect("Q̊ carries oscillators")
    }

    fn x_field(&self, b: usize, r: &[i64]) -> Box<dyn FieldOp + '_> {
        Box::new(HomModule::x_field(self, b, r))
    }

    fn cartan_field(&self, h: &[i64], r: &[i64]) -> Box<dyn FieldOp + '_> {
        Box::new(HomModule::cartan_field(self, h, r))
    }

    fn k_field(&self, i: usize, r: &[i64]) -> Box<dyn FieldOp + '_> {
        HomModule::k_field(self, i, r)
    }

    fn k0_shift(&self, r: &[i64]) -> Vec<i64> {
        self.delta(r)
    }

    fn d_eigen(&self, i: usize, v: &FockState) -> Q {
        HomModule::d_eigen(self, i, v)
    }

    fn states(&self, win: &TruncationWindow) -> Vec<FockState> {
        self.window_states(win)
    }
}

/// V(Γ) read directly as a Z-module through its own Z-operators.
pub struct HomZ<'a> {
    pub hm: &'a HomModule,
    pub zd: ZData,
}

impl<'a> HomZ<'a> {
    pub fn new(hm: &'a HomModule) -> Self {
        HomZ { hm, zd: ZData::untwisted(hm.g.rs.clone(), Q::one()) }
    }
}

impl DkModule for HomZ<'_> {
    fn zdata(&self) -> &ZData {
        &self.zd
    }

    fn n(&self) -> usize {
        self.hm.n
    }

    fn z_field(&self, b: usize, r: &[i64]) -> Result<(CycScalar, Box<dyn FieldOp + '_>)> {
        Ok((CycScalar::one(), Box::new(self.hm.z_field(b, r))))
    }

    fn k_field(&self, i: usize, r: &[i64]) -> Box<dyn FieldOp + '_> {
        self.hm.k_field(i, r)
    }

    fn k0_shift(&self, r: &[i64]) -> Vec<i64> {
        self.hm.delta(r)
    }

    fn h0_eigen(&self, h: &[i64], v: &FockState) -> Q {
        Q::from(self.hm.lattice().form(&self.hm.embed(h), &v.label) as i128)
    }

    fn d_eigen(&self, i: usize, v: &FockState) -> Q {
        self.hm.d_eigen(i, v)
    }

    fn states(&self, win: &TruncationWindow) -> Vec<FockState> {
        self.hm.window_states(win)
    }
}

/// The principal module as a Z-module (θ a Coxeter element, h_0 = 0, k = 1).
pub struct PrinZModule<'a> {
    pub pm: &'a PrinModule,
    pub zd: ZData,
}

impl<'a> PrinZModule<'a> {
    pub fn new(pm: &'a PrinModule) -> Self {
        let cfg = &pm.cfg;
        let zd = ZData {
            m: cfg.m,
            k: Q::one(),
            rs: cfg.rs.clone(),
            theta: cfg.theta.clone(),
            eta: vec![vec![Q::one(); cfg.rs.num_roots()]; cfg.m as usize],
            h0: H0::Zero,
        };
        PrinZModule { pm, zd }
    }
}

impl DkModule for PrinZModule<'_> {
    fn zdata(&self) -> &ZData {
        &self.zd
    }

    fn n(&self) -> usize {
        self.pm.n
    }

    fn z_field(&self, b: usize, r: &[i64]) -> Result<(CycScalar, Box<dyn FieldOp + '_>)> {
        let z = self.pm.z_operator(b, r)?;
        Ok((z.c, Box::new(z.field)))
    }

    fn k_field(&self, i: usize, r: &[i64]) -> Box<dyn FieldOp + '_> {
        self.pm.k_field(i, r)
    }

    fn k0_shift(&self, r: &[i64]) -> Vec<i64> {
        self.pm.delta(r)
    }

    fn h0_eigen(&self, _h: &[i64], _v: &FockState) -> Q {
        Q::zero()
    }

    fn d_eigen(&self, i: usize, v: &FockState) -> Q {
        self.pm.d_eigen(i, v)
    }

    fn states(&self, win: &TruncationWindow) -> Vec<FockState> {
        self.pm.window_states(win)
    }
}

/// V(Γ) with k_0(r̲) replaced by c·Id for every r̲ and the level declared c:
/// the level condition holds, factorization fails for s̲ ≠ 0̲.
pub struct ScaledCenter<'a> {
    pub base: &'a HomModule,
    pub c: Q,
}

impl CkModule for ScaledCenter<'_> {
    fn algebra(&self) -> &Toroidal {
        &self.base.alg
    }

    fn level(&self) -> Q {
        self.c
    }

    fn space(&self) -> &FockSpace {
        &self.base.space
    }

    fn root_osc(&self, beta: &[i64]) -> Vec<Q> {
        self.base.root_osc(beta)
    }

    fn x_field(&self, b: usize, r: &[i64]) -> Box<dyn FieldOp + '_> {
        CkModule::x_field(self.base, b, r)
    }

    fn cartan_field(&self, h: &[i64], r: &[i64]) -> Box<dyn FieldOp + '_> {
        CkModule::cartan_field(self.base, h, r)
    }

    fn k_field(&self, i: usize, r: &[i64]) -> Box<dyn FieldOp + '_> {
        if i == 0 {
            Box::new(ConstField(self.c))
        } else {
            CkModule::k_field(self.base, i, r)
        }
    }

    fn k0_shift(&self, r: &[i64]) -> Vec<i64> {
        vec![0; self.base.delta(r).len()]
    }

    fn d_eigen(&self, i: usize, v: &FockState) -> Q {
        self.base.d_eigen(i, v)
    }

    fn states(&self, win: &TruncationWindow) -> Vec<FockState> {
        self.base.window_states(win)
    }
}

// ---------------------------------------------------------------------------
// The C_k conditions

fn loop_field<'a>(ck: &'a dyn CkModule, g: usize, r: &[i64]) -> Box<dyn FieldOp + 'a> {
    let ch = &ck.algebra().g;
    let nr = ch.num_roots();
    if g < nr {
        ck.x_field(g, r)
    } else {
        let mut h = vec![0; ch.rank()];
        h[g - nr] = 1;
        ck.cartan_field(&h, r)
    }
}

/// ρ(a) v for a toroidal element a.
fn rho(ck: &dyn CkModule, a: &TElem, v: &FockVec) -> CVec {
    let mut out = CVec::new();
    for (s, c) in &a.terms {
        let img = match s {
            Sym::Loop { g, r0, r } => apply_mode(loop_field(ck, *g, r).as_ref(), *r0, v),
            Sym::Central { i, r0, r } => apply_mode(ck.k_field(*i, r).as_ref(), *r0, v),
            Sym::Deriv { i } => {
                let mut acc = FockVec::new();
                for (t, x) in v {
                    fv_add(&mut acc, t.clone(), *x * ck.d_eigen(*i, t));
                }
                acc
            }
        };
        cv_axpy(&mut out, c, &img);
    }
    out
}

fn cv_sub(a: &CVec, b: &CVec) -> CVec {
    let mut out = a.clone();
    for (s, x) in b {
        let slot = out.entry(s.clone()).or_insert_with(CycScalar::zero);
        *slot -= x;
        if slot.is_zero() {
            out.remove(s);
        }
    }
    out
}

/// ρ(a)ρ(b)v − ρ(b)ρ(a)v against ρ([a, b])v. The vectors are rational, so
/// the intermediate images are taken over Q.
fn hom_check(ck: &dyn CkModule, e: &mut Entry, a: &TElem, b: &TElem, states: &[FockState]) {
    let alg = ck.algebra();
    let br = alg.bracket(a, b);
    let to_q = |c: &CVec| -> FockVec {
        c.iter().map(|(s, x)| (s.clone(), x.as_rational().expect("rational module"))).collect()
    };
    for v in states {
        let one = fv_single(v.clone());
        let ab = rho(ck, a, &to_q(&rho(ck, b, &one)));
        let ba = rho(ck, b, &to_q(&rho(ck, a, &one)));
        let lhs = cv_sub(&ab, &ba);
        let rhs = rho(ck, &br, &one);
        let diff = cv_sub(&lhs, &rhs);
        e.record(diff.is_empty(), || format!("[{a:?}, {b:?}] on {v:?}: {}", cv_render(&diff)));
    }
}

/// Sampling sizes for the relation sweep.
#[derive(Debug, Clone, Copy)]
pub struct CkSampling {
    pub pairs: usize,
    pub seed: u64,
}

impl Default for CkSampling {
    fn default() -> Self {
        CkSampling { pairs: 12, seed: 7 }
    }
}

fn random_multi<R: Rng>(rng: &mut R, multi: &[Vec<i64>]) -> Vec<i64> {
    multi[rng.gen_range(0..multi.len())].clone()
}

/// The level, energy-bound and factorization conditions and the generating
/// relations, the latter as the
/// statement that ρ is a representation: the loop fields, central fields and
/// derivations satisfy the toroidal bracket on the window. Mode pairs for the
/// bracket and centrality families are drawn with a seeded ChaCha8 generator.
pub fn check_ck(ck: &dyn CkModule, win: &TruncationWindow, multi: &[Vec<i64>], sampling: CkSampling) -> Result<Vec<Entry>> {
    let k = ck.level();
    if k.is_zero() {
        return Err(Error::ZeroLevel);
    }
    let alg = ck.algebra();
    let g = alg.g.clone();
    let n = alg.n;
    let nr = g.num_roots();
    let w = win.w;
    let states = ck.states(win);
    let mut out = Vec::new();

    // k_0 acts as k.
    let mut e = Entry::new("ck-level", "k0");
    let k0 = ck.k_field(0, &vec![0; n]);
    for v in &states {
        for p in -w..=w {
            let img = k0.mode(p, v);
            let mut want = FockVec::new();
            if p == 0 {
                want.insert(v.clone(), k);
            }
            e.record(img == want, || format!("mode {p} on {v:?}: {}", fv_render(&img)));
        }
    }
    out.push(e);

    // Energy bound on the window: within each label, d_0 is bounded above by its
    // value on the label's vacuum.
    let mut e = Entry::new("ck-energy-bound", "per-label bound");
    for v in &states {
        let top = ck.d_eigen(0, &FockState::vacuum(v.label.clone()));
        let d = ck.d_eigen(0, v);
        e.record(d <= top, || format!("{v:?}: d0 = {d} above {top}"));
    }
    out.push(e);

    // Factorization.
    for r in multi {
        for s in multi {
            let shift = ck.k0_shift(s);
            let k0s = ck.k_field(0, s);
            let rs = vadd(r, s);
            let mut e = Entry::new("ck-factorization", params_rs(r, s));
            let mut fields: Vec<(Box<dyn FieldOp + '_>, Box<dyn FieldOp + '_>)> =
                (0..g.dim()).map(|gi| (loop_field(ck, gi, r), loop_field(ck, gi, &rs))).collect();
            fields.extend((1..=n).map(|i| (ck.k_field(i, r), ck.k_field(i, &rs))));
            let pairs: Vec<(&dyn FieldOp, &dyn FieldOp)> = fields.iter().map(|(f, h)| (f.as_ref(), h.as_ref())).collect();
            check_factorization(&mut e, &pairs, k0s.as_ref(), &shift, &k, &states, w);
            out.push(e);
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(sampling.seed);
    let loop_elem = |gi: usize, r0: i64, r: &[i64]| TElem::single(Sym::Loop { g: gi, r0, r: r.to_vec() }, CycScalar::one());
    let families: [(&str, Box<dyn Fn(&mut ChaCha8Rng) -> (TElem, TElem)>); 4] = [
        (
            "root-root",
            Box::new(|rng: &mut ChaCha8Rng| {
                let a = loop_elem(rng.gen_range(0..nr), rng.gen_range(-w..=w), &random_multi(rng, multi));
                let b = loop_elem(rng.gen_range(0..nr), rng.gen_range(-w..=w), &random_multi(rng, multi));
                (a, b)
            }),
        ),
        (
            "cartan-cartan",
            Box::new(|rng: &mut ChaCha8Rng| {
                let a = loop_elem(nr + rng.gen_range(0..g.rank()), rng.gen_range(-w..=w), &random_multi(rng, multi));
                let b = loop_elem(nr + rng.gen_range(0..g.rank()), rng.gen_range(-w..=w), &random_multi(rng, multi));
                (a, b)
            }),
        ),
        (
            "cartan-root",
            Box::new(|rng: &mut ChaCha8Rng| {
                let a = loop_elem(nr + rng.gen_range(0..g.rank()), rng.gen_range(-w..=w), &random_multi(rng, multi));
                let b = loop_elem(rng.gen_range(0..nr), rng.gen_range(-w..=w), &random_multi(rng, multi));
                (a, b)
            }),
        ),
        (
            "centrality",
            Box::new(|rng: &mut ChaCha8Rng| {
                let i = rng.gen_range(0..=n);
                let a = TElem::single(
                    Sym::Central { i, r0: rng.gen_range(-w..=w), r: random_multi(rng, multi) },
                    CycScalar::one(),
                );
                let b = if rng.gen_bool(0.5) {
                    loop_elem(rng.gen_range(0..g.dim()), rng.gen_range(-w..=w), &random_multi(rng, multi))
                } else {
                    TElem::single(
                        Sym::Central { i: rng.gen_range(0..=n), r0: rng.gen_range(-w..=w), r: random_multi(rng, multi) },
                        CycScalar::one(),
                    )
                };
                (a, b)
            }),
        ),
    ];
    for (id, draw) in &families {
        let mut e = Entry::new(format!("ck-rep-{id}"), format!("pairs={} seed={}", sampling.pairs, sampling.seed));
        for _ in 0..sampling.pairs {
            let (a, b) = draw(&mut rng);
            hom_check(ck, &mut e, &a, &b, &states);
        }
        out.push(e);
    }

    // The d_A relation element acts as zero.
    let mut e = Entry::new("ck-rep-central-relation", "all modes");
    for r in multi {
        for r0 in -w..=w {
            let rel = alg.relation_element(r0, r);
            for v in &states {
                let img = rho(ck, &rel, &fv_single(v.clone()));
                e.record(img.is_empty(), || format!("r0={r0} r={} on {v:?}: {}", fmt_v(r), cv_render(&img)));
            }
        }
    }
    out.push(e);

    // Derivations against central modes.
    for (id, range) in [("di-central", 1..=n), ("d0-central", 0..=0)] {
        let mut e = Entry::new(format!("ck-rep-{id}"), "all modes");
        for i in range {
            for j in 0..=n {
                for r in multi {
                    for r0 in -w..=w {
                        let a = TElem::deriv(i);
                        let b = TElem::single(Sym::Central { i: j, r0, r: r.clone() }, CycScalar::one());
                        hom_check(ck, &mut e, &a, &b, &states);
                    }
                }
            }
        }
        out.push(e);
    }

    // x_β(r̲, w^p ζ) = η(p, β) x_{θ^p β}(r̲, ζ), coefficient-wise.
    let mut e = Entry::new("ck-rep-twist", "all roots");
    let m = alg.m() as i64;
    for b in 0..nr {
        // p = 0 is the identity once θ⁰ = id and η(0, β) = 1.
        e.record(alg.theta.root_pow(0, b) == b && alg.theta.eta(0, b)?.is_one(), || format!("b={b}: p = 0 not trivial"));
        for p in 1..m {
            let tb = alg.theta.root_pow(p, b);
            let eta = alg.theta.eta(p, b)?;
            for r in multi {
                let f = ck.x_field(b, r);
                let ft = ck.x_field(tb, r);
                for v in &states {
                    for q in -w..=w {
                        let lhs = scaled(&CycScalar::root_of_unity(m as u32, p * q), &f.mode(q, v));
                        let rhs = scaled(&eta, &ft.mode(q, v));
                        e.record(lhs == rhs, || format!("b={b} p={p} mode {q} on {v:?}"));
                    }
                }
            }
        }
    }
    out.push(e);
    Ok(out)
}

// ---------------------------------------------------------------------------
// C_k → D_k

/// Z(β, r̲, ζ) = E^−(β, ζ) x_β(r̲, ζ) E^+(β, ζ) on the Fock space of a C_k module.
pub struct DressedZ<'a> {
    pub ck: &'a dyn CkModule,
    pub x: Box<dyn FieldOp + 'a>,
    pub minus: Dressing,
    pub plus: Dressing,
}

impl<'a> DressedZ<'a> {
    pub fn new(ck: &'a dyn CkModule, b: usize, r: &[i64]) -> Result<Self> {
        let alg = ck.algebra();
        let beta = ck.root_osc(&alg.g.rs.roots[b]);
        let k = ck.level();
        Ok(DressedZ {
            ck,
            x: ck.x_field(b, r),
            minus: Dressing::new(Sign::Minus, beta.clone(), alg.m(), k)?,
            plus: Dressing::new(Sign::Plus, beta, alg.m(), k)?,
        })
    }
}

impl FieldOp for DressedZ<'_> {
    fn expand(&self, v: &FockState, lo: i64) -> Series {
        let sp = self.ck.space();
        let mut out = Series::new();
        for (p1, vec1) in self.plus.apply(sp, v, i64::MIN / 4) {
            for (t1, c1) in &vec1 {
                for (p2, vec2) in self.x.expand(t1, lo - p1) {
                    for (t2, c2) in &vec2 {
                        for (p3, vec3) in self.minus.apply(sp, t2, lo - p1 - p2) {
                            series_add(&mut out, p1 + p2 + p3, &(*c1 * c2), &vec3);
                        }
                    }
                }
            }
        }
        out.retain(|_, v| !v.is_empty());
        out
    }

    fn top(&self, v: &FockState) -> i64 {
        let sp = self.ck.space();
        let mut top = i64::MIN / 4;
        for (p1, vec1) in self.plus.apply(sp, v, i64::MIN / 4) {
            for t in vec1.keys() {
                top = top.max(p1 + self.x.top(t));
            }
        }
        top
    }
}

/// Ω_V with its Z-operators, obtained from a C_k module.
pub struct ZFromCk<'a> {
    pub ck: &'a dyn CkModule,
    pub zd: ZData,
    /// Basis of Ω_V on the window used to build it.
    pub omega: Vec<FockState>,
    /// Per-slice kernel dimensions, (label, level, dim ker, #states without Q̊ oscillators).
    pub slices: Vec<(Vec<i64>, u32, usize, usize)>,
}

fn has_root_osc(s: &FockState, l: usize) -> bool {
    s.osc.iter().any(|&(i, _)| (i as usize) < l)
}

/// Builds the Z-module of a C_k module. Ω_V is the joint kernel of the
/// positive Q̊ Heisenberg modes on each (label, level) slice of the window,
/// solved exactly; it must be spanned by basis states for the field
/// machinery, which is checked.
pub fn to_zmodule<'a>(ck: &'a dyn CkModule, win: &TruncationWindow) -> Result<ZFromCk<'a>> {
    let k = ck.level();
    if k.is_zero() {
        return Err(Error::ZeroLevel);
    }
    let alg = ck.algebra();
    if alg.m() != 1 {
        return Err(Error::Config { key: "theta".into(), msg: "the C_k → D_k bridge is implemented for m = 1".into() });
    }
    let l = alg.g.rank();
    let zero_r = vec![0; alg.n];
    let mut slices: BTreeMap<(Vec<i64>, u32), Vec<FockState>> = BTreeMap::new();
    for s in ck.states(win) {
        slices.entry((s.label.clone(), s.level())).or_default().push(s);
    }
    let hs: Vec<Box<dyn FieldOp + '_>> = (0..l)
        .map(|i| {
            let mut h = vec![0; l];
            h[i] = 1;
            ck.cartan_field(&h, &zero_r)
        })
        .collect();
    let mut omega = Vec::new();
    let mut info = Vec::new();
    for ((label, level), basis) in &slices {
        // Rows: coefficients of h_i(n) v, n = 1..level, on every output state.
        let mut rows: BTreeMap<(usize, u32, FockState), Vec<CycScalar>> = BTreeMap::new();
        for (j, v) in basis.iter().enumerate() {
            for (i, h) in hs.iter().enumerate() {
                for nn in 1..=*level {
                    for (t, c) in h.mode(nn as i64, v) {
                        let row = rows.entry((i, nn, t)).or_insert_with(|| vec![CycScalar::zero(); basis.len()]);
                        row[j] = CycScalar::rational(c);
                    }
                }
            }
        }
        let matrix: linalg::Matrix = rows.into_values().collect();
        let kernel = if matrix.is_empty() {
            (0..basis.len())
                .map(|j| (0..basis.len()).map(|i| if i == j { CycScalar::one() } else { CycScalar::zero() }).collect())
                .collect()
        } else {
            linalg::nullspace(&matrix, basis.len())
        };
        let pure: Vec<&FockState> = basis.iter().filter(|s| !has_root_osc(s, l)).collect();
        // Each pure state must lie in the kernel, and they must exhaust it.
        for s in &pure {
            for h in &hs {
                for nn in 1..=*level {
                    if !h.mode(nn as i64, s).is_empty() {
                        return Err(Error::Inconsistent(format!("{s:?} is not a vacuum vector")));
                    }
                }
            }
        }
        if kernel.len() != pure.len() {
            return Err(Error::Inconsistent(format!(
                "vacuum space at label {label:?}, level {level} has dimension {} but {} oscillator-free states",
                kernel.len(),
                pure.len()
            )));
        }
        info.push((label.clone(), *level, kernel.len(), pure.len()));
        omega.extend(pure.into_iter().cloned());
    }
    omega.sort();
    let zd = ZData::untwisted(alg.g.rs.clone(), k);
    Ok(ZFromCk { ck, zd, omega, slices: info })
}

impl DkModule for ZFromCk<'_> {
    fn zdata(&self) -> &ZData {
        &self.zd
    }

    fn n(&self) -> usize {
        self.ck.algebra().n
    }

    fn z_field(&self, b: usize, r: &[i64]) -> Result<(CycScalar, Box<dyn FieldOp + '_>)> {
        Ok((CycScalar::one(), Box::new(DressedZ::new(self.ck, b, r)?)))
    }

    fn k_field(&self, i: usize, r: &[i64]) -> Box<dyn FieldOp + '_> {
        self.ck.k_field(i, r)
    }

    fn k0_shift(&self, r: &[i64]) -> Vec<i64> {
        self.ck.k0_shift(r)
    }

    fn h0_eigen(&self, h: &[i64], v: &FockState) -> Q {
        let zero_r = vec![0; self.n()];
        let img = self.ck.cartan_field(h, &zero_r).mode(0, v);
        img.get(v).copied().unwrap_or_else(Q::zero)
    }

    fn d_eigen(&self, i: usize, v: &FockState) -> Q {
        self.ck.d_eigen(i, v)
    }

    fn states(&self, win: &TruncationWindow) -> Vec<FockState> {
        let l = self.ck.algebra().g.rank();
        self.ck.states(win).into_iter().filter(|s| !has_root_osc(s, l)).collect()
    }
}

/// On the window, the dressed Z commutes with h(n), n ≠ 0, and
/// [a(0), Z(α, r̲, ζ)] = ⟨a, α⟩ Z(α, r̲, ζ).
pub fn verify_dressing(zm: &ZFromCk, win: &TruncationWindow, multi: &[Vec<i64>]) -> Result<Vec<Entry>> {
    let ck = zm.ck;
    let g = &ck.algebra().g;
    let l = g.rank();
    let w = win.w;
    let states = ck.states(win);
    let zero_r = vec![0; ck.algebra().n];
    let mut out = Vec::new();
    for b in 0..g.num_roots() {
        for r in multi {
            let z = DressedZ::new(ck, b, r)?;
            let mut e1 = Entry::new("dress-heisenberg-commute", format!("b={} r={}", fmt_v(&g.rs.roots[b]), fmt_v(r)));
            let mut e2 = Entry::new("dress-z-commutator", format!("b={} r={}", fmt_v(&g.rs.roots[b]), fmt_v(r)));
            for i in 0..l {
                let mut h = vec![0; l];
                h[i] = 1;
                let hf = ck.cartan_field(&h, &zero_r);
                let want = Q::from(g.rs.form(&h, &g.rs.roots[b]) as i128);
                for v in &states {
                    for nn in (-w..=w).filter(|&x| x != 0) {
                        let hv = hf.mode(nn, v);
                        for p in -w..=w {
                            let lhs = apply_mode(hf.as_ref(), nn, &z.mode(p, v));
                            let rhs = apply_mode(&z, p, &hv);
                            let diff = fv_sub(&lhs, &rhs);
                            e1.record(diff.is_empty(), || format!("h{i}({nn}), Z mode {p} on {v:?}: {}", fv_render(&diff)));
                        }
                    }
                    let h0v = zm.h0_eigen(&h, v);
                    for p in -w..=w {
                        for t in z.mode(p, v).keys() {
                            let got = zm.h0_eigen(&h, t) - h0v;
                            e2.record(got == want, || format!("h{i}(0), Z mode {p} on {v:?}: shift {got}"));
                        }
                    }
                }
            }
            out.push(e1);
            out.push(e2);
        }
    }
    Ok(out)
}

/// E^+(β, ζ₁) E^−(γ, ζ₂) = (1 − ζ₁/ζ₂)^{c} E^−(γ, ζ₂) E^+(β, ζ₁) with
/// c = m²κ⟨β, γ⟩/k², κ the Heisenberg normalization; for V(Γ) at m = k = 1 this is ⟨β, γ⟩.
pub fn verify_exchange(ck: &dyn CkModule, win: &TruncationWindow) -> Result<Vec<Entry>> {
    let alg = ck.algebra();
    let g = &alg.g;
    let sp = ck.space();
    let k = ck.level();
    let m = alg.m();
    let w = win.w;
    let states = ck.states(win);
    let mut out = Vec::new();
    for b1 in 0..g.num_roots() {
        for b2 in 0..g.num_roots() {
            let (r1, r2) = (&g.rs.roots[b1], &g.rs.roots[b2]);
            let ep = Dressing::new(Sign::Plus, ck.root_osc(r1), m, k)?;
            let em = Dressing::new(Sign::Minus, ck.root_osc(r2), m, k)?;
            // κ⟨β, γ⟩ from the oscillator Gram matrix.
            let (o1, o2) = (ck.root_osc(r1), ck.root_osc(r2));
            let mut pair = Q::zero();
            for (i, x) in o1.iter().enumerate() {
                for (j, y) in o2.iter().enumerate() {
                    pair += *x * *y * sp.gram[i][j];
                }
            }
            let mk = Q::from(m as i128) / k;
            let c = mk * mk * pair;
            let coeffs = binomial_coeffs(&c, (2 * w + 1) as usize);
            let mut e = Entry::new("exchange-e-plus-e-minus", format!("b1={} b2={}", fmt_v(r1), fmt_v(r2)));
            for v in &states {
                let mut lhs: OpGrid = OpGrid::new();
                for (q, vec) in em.apply(sp, v, -w) {
                    for (t, x) in &vec {
                        for (p, v2) in ep.apply(sp, t, 0) {
                            if p <= w {
                                fv_axpy(lhs.entry((p, q)).or_default(), x, &v2);
                            }
                        }
                    }
                }
                let mut rhs: OpGrid = OpGrid::new();
                for (p, vec) in ep.apply(sp, v, 0) {
                    for (t, x) in &vec {
                        for (q, v2) in em.apply(sp, t, -3 * w) {
                            for (j, cj) in coeffs.iter().enumerate() {
                                let (a, bb) = (p + j as i64, q - j as i64);
                                if a <= w && bb >= -w && !cj.is_zero() {
                                    fv_axpy(rhs.entry((a, bb)).or_default(), &(*x * cj), &v2);
                                }
                            }
                        }
                    }
                }
                lhs.retain(|_, v| !v.is_empty());
                rhs.retain(|_, v| !v.is_empty());
                for a in 0..=w {
                    for bb in -w..=0 {
                        let (x, y) = (grid_at(&lhs, a, bb), grid_at(&rhs, a, bb));
                        e.record(x == y, || format!("({a},{bb}) on {v:?}: {} vs {}", fv_render(&x), fv_render(&y)));
                    }
                }
            }
            out.push(e);
        }
    }
    Ok(out)
}

/// The dressing operators past x_α, both following from [h(j), x_α(ζ)] = ⟨h, α⟩ζ^j x_α(ζ):
/// E^+(β, ζ₁) x_α(r̲, ζ₂) = (1 − ζ₁/ζ₂)^{c} x_α(r̲, ζ₂) E^+(β, ζ₁) and
/// x_α(r̲, ζ₁) E^−(β, ζ₂) = (1 − ζ₁/ζ₂)^{c} E^−(β, ζ₂) x_α(r̲, ζ₁), with c = −mκ⟨β, α⟩/k.
pub fn verify_dress_x(ck: &dyn CkModule, win: &TruncationWindow, multi: &[Vec<i64>]) -> Result<Vec<Entry>> {
    let alg = ck.algebra();
    let g = &alg.g;
    let sp = ck.space();
    let k = ck.level();
    let m = alg.m();
    let w = win.w;
    let states = ck.states(win);
    let mut out = Vec::new();
    let push = |grid: &mut OpGrid, a: i64, b: i64, c: &Q, v: &FockVec| {
        if a.abs() <= w && b.abs() <= w {
            fv_axpy(grid.entry((a, b)).or_default(), c, v);
        }
    };
    for b1 in 0..g.num_roots() {
        for b2 in 0..g.num_roots() {
            let (beta, alpha) = (&g.rs.roots[b1], &g.rs.roots[b2]);
            let (ob, oa) = (ck.root_osc(beta), ck.root_osc(alpha));
            let mut pair = Q::zero();
            for (i, x) in ob.iter().enumerate() {
                for (j, y) in oa.iter().enumerate() {
                    pair += *x * *y * sp.gram[i][j];
                }
            }
            let c = -Q::from(m as i128) * pair / k;
            let coeffs = binomial_coeffs(&c, (2 * w + 1) as usize);
            let ep = Dressing::new(Sign::Plus, ob.clone(), m, k)?;
            let em = Dressing::new(Sign::Minus, ob, m, k)?;
            for r in multi {
                let x = ck.x_field(b2, r);
                let params = format!("b={} a={} r={}", fmt_v(beta), fmt_v(alpha), fmt_v(r));
                let mut eplus = Entry::new("exchange-e-plus-x", params.clone());
                let mut eminus = Entry::new("exchange-x-e-minus", params);
                for v in &states {
                    let (mut l1, mut r1, mut l2, mut r2) = (OpGrid::new(), OpGrid::new(), OpGrid::new(), OpGrid::new());
                    for (q, xv) in x.expand(v, -w) {
                        for (t, cx) in &xv {
                            for (p, ev) in ep.apply(sp, t, 0) {
                                push(&mut l1, p, q, cx, &ev);
                            }
                        }
                    }
                    for (p, ev) in ep.apply(sp, v, 0) {
                        for (t, ce) in &ev {
                            for (q, xv) in x.expand(t, -w) {
                                for (j, cj) in coeffs.iter().enumerate() {
                                    push(&mut r1, p + j as i64, q - j as i64, &(*ce * cj), &xv);
                                }
                            }
                        }
                    }
                    for (q, ev) in em.apply(sp, v, -w) {
                        for (t, ce) in &ev {
                            for (p, xv) in x.expand(t, -w) {
                                push(&mut l2, p, q, ce, &xv);
                            }
                        }
                    }
                    for (p, xv) in x.expand(v, -2 * w) {
                        for (t, cx) in &xv {
                            for (q, ev) in em.apply(sp, t, -w) {
                                for (j, cj) in coeffs.iter().enumerate() {
                                    push(&mut r2, p + j as i64, q - j as i64, &(*cx * cj), &ev);
                                }
                            }
                        }
                    }
                    for a in -w..=w {
                        for bb in -w..=w {
                            let (x1, y1) = (grid_at(&l1, a, bb), grid_at(&r1, a, bb));
                            if a >= 0 {
                                eplus.record(x1 == y1, || format!("({a},{bb}) on {v:?}: {} vs {}", fv_render(&x1), fv_render(&y1)));
                            }
                            let (x2, y2) = (grid_at(&l2, a, bb), grid_at(&r2, a, bb));
                            if bb <= 0 {
                                eminus.record(x2 == y2, || format!("({a},{bb}) on {v:?}: {} vs {}", fv_render(&x2), fv_render(&y2)));
                            }
                        }
                    }
                }
                out.push(eplus);
                out.push(eminus);
            }
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// D_k → C_k

/// M(k) ⊗ W for a Z-module W whose states carry no Q̊ oscillators.
pub struct Reconstructed<'a> {
    pub dk: &'a dyn DkModule,
    pub alg: Toroidal,
    /// Fock space of M(k): Q̊ oscillators at Heisenberg normalization k.
    pub mspace: FockSpace,
    /// The full space, used to read oscillator coordinates for dressing.
    pub space: FockSpace,
    l: usize,
    cache: RefCell<HashMap<(u8, usize, Vec<i64>), Rc<Cached<'a>>>>,
}

/// A field whose expansions are remembered per state, at the deepest order
/// requested so far. W-states recur under every M(k) monomial.
struct Cached<'a> {
    f: Box<dyn FieldOp + 'a>,
    c: Q,
    memo: RefCell<HashMap<FockState, (i64, Series)>>,
}

struct Shared<'a>(Rc<Cached<'a>>);

impl FieldOp for Shared<'_> {
    fn expand(&self, v: &FockState, lo: i64) -> Series {
        if let Some((at, s)) = self.0.memo.borrow().get(v) {
            if *at <= lo {
                return s.range(lo..).map(|(p, x)| (*p, x.clone())).collect();
            }
        }
        let s = self.0.f.expand(v, lo);
        let out = s.clone();
        self.0.memo.borrow_mut().insert(v.clone(), (lo, s));
        out
    }

    fn top(&self, v: &FockState) -> i64 {
        self.0.f.top(v)
    }
}

impl<'a> Reconstructed<'a> {
    fn shared(&self, key: (u8, usize, Vec<i64>), make: impl FnOnce() -> (Q, Box<dyn FieldOp + 'a>)) -> Rc<Cached<'a>> {
        self.cache
            .borrow_mut()
            .entry(key)
            .or_insert_with(|| {
                let (c, f) = make();
                Rc::new(Cached { f, c, memo: RefCell::new(HashMap::new()) })
            })
            .clone()
    }

    fn z_on_w(&self, b: usize, r: &[i64]) -> Rc<Cached<'a>> {
        let dk = self.dk;
        self.shared((0, b, r.to_vec()), || {
            let (c, z) = dk.z_field(b, r).expect("Z-operator of a root");
            (c.as_rational().expect("rational Z-constant"), z)
        })
    }

    fn k_on_w(&self, i: usize, r: &[i64]) -> Rc<Cached<'a>> {
        let dk = self.dk;
        self.shared((1, i, r.to_vec()), || (Q::one(), dk.k_field(i, r)))
    }
}

fn split(s: &FockState, l: usize) -> (Mono, FockState) {
    let (m, w): (Vec<_>, Vec<_>) = s.osc.iter().partition(|&&(i, _)| (i as usize) < l);
    (m, FockState { osc: w, label: s.label.clone() })
}

fn merge(u: &Mono, w: &FockState) -> FockState {
    FockState { osc: mono_mul(u, &w.osc), label: w.label.clone() }
}

/// V = M(k) ⊗ W with X_α(r̲, ζ) = E^−(−α, ζ)E^+(−α, ζ) ⊗ Z(α, r̲, ζ),
/// β(r̲, ζ) = (1/k) β(ζ) k_0(r̲, ζ^m) and k_i acting on W.
pub fn from_zmodule<'a>(dk: &'a dyn DkModule, g: std::sync::Arc<Chevalley>) -> Result<Reconstructed<'a>> {
    let zd = dk.zdata();
    if zd.k.is_zero() {
        return Err(Error::ZeroLevel);
    }
    if zd.m != 1 {
        return Err(Error::Config { key: "theta".into(), msg: "the D_k → C_k bridge is implemented for m = 1".into() });
    }
    let l = g.rank();
    let n = dk.n();
    let mspace = FockSpace::new(Lattice::new(g.rs.cartan.clone()), (0..l).collect(), zd.k, 1);
    let space = FockSpace::new(Lattice::extended(&g.rs.cartan, n), (0..l + n).collect(), zd.k, 1);
    let alg = Toroidal::untwisted(g, n);
    Ok(Reconstructed { dk, alg, mspace, space, l, cache: RefCell::new(HashMap::new()) })
}

/// E^−(−α, ζ)E^+(−α, ζ) ⊗ c·Z(ζ).
struct TensorX<'a> {
    mspace: &'a FockSpace,
    dress: Vertex<'a>,
    c: Q,
    z: Box<dyn FieldOp + 'a>,
    l: usize,
}

impl FieldOp for TensorX<'_> {
    fn expand(&self, v: &FockState, lo: i64) -> Series {
        let (u, w) = split(v, self.l);
        let uvac = FockState { osc: u, label: vec![0; self.mspace.lattice.dim()] };
        let tz = self.z.top(&w);
        let tm = self.dress.top(&uvac);
        let ms = self.dress.expand(&uvac, lo - tz);
        let zs = self.z.expand(&w, lo - tm);
        let mut out = Series::new();
        for (p, mv) in &ms {
            for (q, zv) in &zs {
                if p + q < lo {
                    continue;
                }
                let mut acc = FockVec::new();
                for (a, x) in mv {
                    for (b, y) in zv {
                        fv_add(&mut acc, merge(&a.osc, b), *x * y * self.c);
                    }
                }
                series_add(&mut out, p + q, &Q::one(), &acc);
            }
        }
        out.retain(|_, v| !v.is_empty());
        out
    }

    fn top(&self, v: &FockState) -> i64 {
        let (u, w) = split(v, self.l);
        let uvac = FockState { osc: u, label: vec![0; self.mspace.lattice.dim()] };
        self.dress.top(&uvac) + self.z.top(&w)
    }
}

/// (1/k)[β_M(ζ) ⊗ k_0^W(r̲, ζ) + 1 ⊗ β(0) k_0^W(r̲, ζ)] with β_M the nonzero modes.
struct TensorCartan<'r, 'a> {
    rec: &'r Reconstructed<'a>,
    h: Vec<i64>,
    k0: Box<dyn FieldOp + 'r>,
}

impl FieldOp for TensorCartan<'_, '_> {
    fn expand(&self, v: &FockState, lo: i64) -> Series {
        let rec = self.rec;
        let inv_k = Q::one() / rec.dk.zdata().k;
        let (u, w) = split(v, rec.l);
        let ho = rec.mspace.to_osc(&self.h).expect("Q̊ vector");
        let tz = self.k0.top(&w);
        let zs = self.k0.expand(&w, lo - mono_level(&u) as i64);
        let mut out = Series::new();
        for (q, zv) in &zs {
            // zero mode, read on W after k_0 acts
            let mut acc = FockVec::new();
            for (b, y) in zv {
                fv_add(&mut acc, merge(&u, b), *y * rec.dk.h0_eigen(&self.h, b) * inv_k);
            }
            if *q >= lo {
                series_add(&mut out, *q, &Q::one(), &acc);
            }
            // annihilation: β(n) u at ζ^n
            for nn in 1..=mono_level(&u) {
                if q + nn as i64 >= lo {
                    let poly = rec.mspace.annihilate(&ho, nn, &u);
                    let mut acc = FockVec::new();
                    for (mono, c) in &poly {
                        for (b, y) in zv {
                            fv_add(&mut acc, merge(mono, b), *c * y * inv_k);
                        }
                    }
                    series_add(&mut out, q + nn as i64, &Q::one(), &acc);
                }
            }
            // creation: β(−n) u at ζ^{−n}
            let mut nn = 1i64;
            while q - nn >= lo {
                let poly = rec.mspace.create(&ho, nn as u32, &u);
                let mut acc = FockVec::new();
                for (mono, c) in &poly {
                    for (b, y) in zv {
                        fv_add(&mut acc, merge(mono, b), *c * y * inv_k);
                    }
                }
                series_add(&mut out, q - nn, &Q::one(), &acc);
                nn += 1;
            }
        }
        let _ = tz;
        out.retain(|_, v| !v.is_empty());
        out
    }

    fn top(&self, v: &FockState) -> i64 {
        let (u, w) = split(v, self.rec.l);
        self.k0.top(&w) + mono_level(&u) as i64
    }
}

/// 1 ⊗ F for a field acting on W.
struct OnW<'a> {
    f: Box<dyn FieldOp + 'a>,
    l: usize,
}

impl FieldOp for OnW<'_> {
    fn expand(&self, v: &FockState, lo: i64) -> Series {
        let (u, w) = split(v, self.l);
        let mut out = Series::new();
        for (p, vec) in self.f.expand(&w, lo) {
            let moved: FockVec = vec.into_iter().map(|(s, c)| (merge(&u, &s), c)).collect();
            out.insert(p, moved);
        }
        out
    }

    fn top(&self, v: &FockState) -> i64 {
        self.f.top(&split(v, self.l).1)
    }
}

impl CkModule for Reconstructed<'_> {
    fn algebra(&self) -> &Toroidal {
        &self.alg
    }

    fn level(&self) -> Q {
        self.dk.zdata().k
    }

    fn space(&self) -> &FockSpace {
        &self.space
    }

    fn root_osc(&self, beta: &[i64]) -> Vec<Q> {
        let mut v = beta.to_vec();
        v.resize(self.space.lattice.dim(), 0);
        self.space.to_osc(&v).expect("Q̊ carries oscillators")
    }

    fn x_field(&self, b: usize, r: &[i64]) -> Box<dyn FieldOp + '_> {
        let zd = self.dk.zdata();
        let alpha = &zd.rs.roots[b];
        let mk = Q::from(zd.m as i128) / zd.k;
        let e = self.mspace.to_osc(alpha).expect("Q̊ vector");
        let dress = Vertex { space: &self.mspace, e, cm: mk, cp: -mk, lambda: vec![0; self.l] };
        let z = self.z_on_w(b, r);
        Box::new(TensorX { mspace: &self.mspace, dress, c: z.c, z: Box::new(Shared(z)), l: self.l })
    }

    fn cartan_field(&self, h: &[i64], r: &[i64]) -> Box<dyn FieldOp + '_> {
        Box::new(TensorCartan { rec: self, h: h.to_vec(), k0: Box::new(Shared(self.k_on_w(0, r))) })
    }

    fn k_field(&self, i: usize, r: &[i64]) -> Box<dyn FieldOp + '_> {
        Box::new(OnW { f: Box::new(Shared(self.k_on_w(i, r))), l: self.l })
    }

    fn k0_shift(&self, r: &[i64]) -> Vec<i64> {
        self.dk.k0_shift(r)
    }

    fn d_eigen(&self, i: usize, v: &FockState) -> Q {
        let (u, w) = split(v, self.l);
        let dw = self.dk.d_eigen(i, &w);
        if i == 0 {
            dw - Q::from(mono_level(&u) as i128)
        } else {
            dw
        }
    }

    /// u ⊗ w with w a window state of W and u of level ≤ D − level(w).
    fn states(&self, win: &TruncationWindow) -> Vec<FockState> {
        let mut out = Vec::new();
        for w in self.dk.states(win) {
            let room = win.d.saturating_sub(w.level());
            for u in monomials(self.l, room) {
                out.push(merge(&u, &w));
            }
        }
        out.sort();
        out
    }
}

/// The Heisenberg relation of M(k): [h_i(p), h_j(q)] = p k ⟨h_i, h_j⟩ δ_{p+q,0}.
pub fn verify_verma(rec: &Reconstructed, win: &TruncationWindow) -> Entry {
    let l = rec.l;
    let k = rec.dk.zdata().k;
    let sp = &rec.mspace;
    let mut e = Entry::new("verma-generation", format!("k={k}"));
    let label = vec![0; l];
    let op = |h: &[i64], p: i64, v: &FockVec| -> FockVec {
        let mut out = FockVec::new();
        for (s, c) in v {
            fv_axpy(&mut out, c, &sp.heis(h, p, s));
        }
        out
    };
    for u in monomials(l, win.d) {
        let v = fv_single(FockState { osc: u, label: label.clone() });
        for i in 0..l {
            for j in 0..l {
                let mut hi = vec![0; l];
                hi[i] = 1;
                let mut hj = vec![0; l];
                hj[j] = 1;
                for p in -win.w..=win.w {
                    for q in -win.w..=win.w {
                        let lhs = fv_sub(&op(&hi, p, &op(&hj, q, &v)), &op(&hj, q, &op(&hi, p, &v)));
                        let mut rhs = FockVec::new();
                        if p + q == 0 {
                            let c = Q::from((p * sp.lattice.gram[i][j]) as i128) * k;
                            fv_axpy(&mut rhs, &c, &v);
                        }
                        e.record(lhs == rhs, || format!("[h{i}({p}), h{j}({q})] on {v:?}"));
                    }
                }
            }
        }
    }
    e
}

/// The pairing M(k) ⊗ Ω_V → V, u ⊗ w ↦ u(h(−n)) w, evaluated through the
/// Cartan fields of V; it must send u ⊗ w to the basis state with the same
/// oscillators (so that matrix elements can be compared directly) and be
/// injective on the window.
pub fn verify_pairing(ck: &dyn CkModule, rec: &Reconstructed, win: &TruncationWindow) -> Entry {
    let l = rec.l;
    let k = ck.level();
    let zero_r = vec![0; ck.algebra().n];
    let mut e = Entry::new("roundtrip-pairing", format!("window={win}"));
    let mut seen = std::collections::BTreeSet::new();
    for s in rec.states(win) {
        let (u, w) = split(&s, l);
        let mut v = fv_single(w);
        // Apply creation operators from the right end of the monomial.
        for &(i, nn) in u.iter().rev() {
            let mut h = vec![0; l];
            h[i as usize] = 1;
            let f = ck.cartan_field(&h, &zero_r);
            v = apply_mode(f.as_ref(), -(nn as i64), &v);
        }
        // M(k) normalizes h(−n) with k; V's fields carry the same level.
        let _ = k;
        let want = fv_single(s.clone());
        e.record(v == want, || format!("{s:?} ↦ {}", fv_render(&v)));
        e.record(seen.insert(s.clone()), || format!("{s:?} repeated"));
    }
    e
}

/// Matrix elements of the reconstructed fields against the original module on
/// the window: x_β(r̲), the simple Cartan fields and k_i(r̲).
pub fn compare_modules(a: &dyn CkModule, b: &dyn CkModule, win: &TruncationWindow, multi: &[Vec<i64>]) -> Vec<Entry> {
    let g = &a.algebra().g;
    let l = g.rank();
    let n = a.algebra().n;
    let states = a.states(win);
    let mut out = Vec::new();
    let w = win.w;
    let cmp = |e: &mut Entry, f1: &dyn FieldOp, f2: &dyn FieldOp| {
        for v in &states {
            let s1 = f1.expand(v, -w);
            let s2 = f2.expand(v, -w);
            for p in -w..=w {
                let (x, y) = (in_window(&s1, w, p), in_window(&s2, w, p));
                e.record(x == y, || format!("mode {p} on {v:?}: {} vs {}", fv_render(&x), fv_render(&y)));
            }
        }
    };
    for r in multi {
        for bi in 0..g.num_roots() {
            let mut e = Entry::new("roundtrip-x", format!("b={} r={}", fmt_v(&g.rs.roots[bi]), fmt_v(r)));
            cmp(&mut e, a.x_field(bi, r).as_ref(), b.x_field(bi, r).as_ref());
            out.push(e);
        }
        for i in 0..l {
            let mut h = vec![0; l];
            h[i] = 1;
            let mut e = Entry::new("roundtrip-h", format!("h={} r={}", fmt_v(&h), fmt_v(r)));
            cmp(&mut e, a.cartan_field(&h, r).as_ref(), b.cartan_field(&h, r).as_ref());
            out.push(e);
        }
        for i in 0..=n {
            let mut e = Entry::new("roundtrip-k", format!("i={i} r={}", fmt_v(r)));
            cmp(&mut e, a.k_field(i, r).as_ref(), b.k_field(i, r).as_ref());
            out.push(e);
        }
    }
    let mut e = Entry::new("roundtrip-states", format!("window={win}"));
    let mut sa = states.clone();
    sa.sort();
    let mut sb = b.states(win);
    sb.sort();
    e.record(sa == sb, || format!("{} vs {} states", states.len(), sb.len()));
    out.push(e);
    let mut e = Entry::new("roundtrip-d", format!("window={win}"));
    for v in &states {
        for i in 0..=n {
            let (x, y) = (a.d_eigen(i, v), b.d_eigen(i, v));
            e.record(x == y, || format!("d{i} on {v:?}: {x} vs {y}"));
        }
    }
    out.push(e);
    out
}

/// The kernel dimensions computed by `to_zmodule`, one entry per slice.
pub fn omega_entries(zm: &ZFromCk) -> Vec<Entry> {
    let mut e = Entry::new("omega-kernel", format!("slices={}", zm.slices.len()));
    for (label, level, dim, pure) in &zm.slices {
        e.record(dim == pure, || format!("label {label:?} level {level}: kernel {dim}, oscillator-free {pure}"));
    }
    vec![e]
}

/// Labels in the ball used for a window, for callers building their own states.
pub fn window_labels(dim: usize, win: &TruncationWindow) -> Vec<Vec<i64>> {
    labels_in_ball(dim, win.b)
}
