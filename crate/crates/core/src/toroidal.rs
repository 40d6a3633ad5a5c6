//! The toroidal algebra G ⊗ A ⊕ Ω_A/d_A with derivations, its twisted
//! fixed-point subalgebra, and the generating-function relations among the
//! fields x(r̲, ζ) and k_i(r̲, ζ^m).

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::Serialize;

use crate::autom::Automorphism;
use crate::report::Entry;
use crate::rootsys::{gscale, vadd, Chevalley, GVec};
use crate::scalar::{q, qi, CycScalar, Q};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Sym {
    /// x ⊗ t^{r0} t^{r̲} for the Chevalley basis vector with index `g`.
    Loop { g: usize, r0: i64, r: Vec<i64> },
    /// t^{r0} t^{r̲} k_i.
    Central { i: usize, r0: i64, r: Vec<i64> },
    Deriv { i: usize },
}

impl Sym {
    /// Eigenvalue of d_i (d_0 reads r0).
    pub fn degree(&self, i: usize) -> i64 {
        match self {
            Sym::Loop { r0, r, .. } | Sym::Central { r0, r, .. } => {
                if i == 0 {
                    *r0
                } else {
                    r[i - 1]
                }
            }
            Sym::Deriv { .. } => 0,
        }
    }
}

/// Finite combination of basis symbols.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct TElem {
    pub terms: BTreeMap<Sym, CycScalar>,
}

impl TElem {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn single(s: Sym, c: CycScalar) -> Self {
        let mut e = Self::zero();
        e.add_term(s, c);
        e
    }

    pub fn loop_vec(x: &GVec, r0: i64, r: &[i64]) -> Self {
        let mut e = Self::zero();
        for (g, c) in x.iter().enumerate() {
            if !c.is_zero() {
                e.add_term(Sym::Loop { g, r0, r: r.to_vec() }, c.clone());
            }
        }
        e
    }

    pub fn central(i: usize, r0: i64, r: &[i64]) -> Self {
        Self::single(Sym::Central { i, r0, r: r.to_vec() }, CycScalar::one())
    }

    pub fn deriv(i: usize) -> Self {
        Self::single(Sym::Deriv { i }, CycScalar::one())
    }

    pub fn add_term(&mut self, s: Sym, c: CycScalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&s) {
            Some(v) => {
                *v += &c;
                if v.is_zero() {
                    self.terms.remove(&s);
                }
            }
            None => {
                self.terms.insert(s, c);
            }
        }
    }

    pub fn add(&self, o: &TElem) -> TElem {
        let mut e = self.clone();
        for (s, c) in &o.terms {
            e.add_term(s.clone(), c.clone());
        }
        e
    }

    pub fn sub(&self, o: &TElem) -> TElem {
        self.add(&o.scale(&CycScalar::int(-1)))
    }

    pub fn scale(&self, c: &CycScalar) -> TElem {
        if c.is_zero() {
            return TElem::zero();
        }
        TElem { terms: self.terms.iter().map(|(s, v)| (s.clone(), v * c)).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

impl fmt::Debug for TElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(s, c)| format!("({c})·{s:?}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// The twisted toroidal algebra L̃(G, θ); θ = identity with m = 1 gives τ̃.
#[derive(Debug, Clone)]
pub struct Toroidal {
    pub g: Arc<Chevalley>,
    pub n: usize,
    pub theta: Automorphism,
}

impl Toroidal {
    pub fn new(g: Arc<Chevalley>, n: usize, theta: Automorphism) -> Self {
        Toroidal { g, n, theta }
    }

    pub fn untwisted(g: Arc<Chevalley>, n: usize) -> Self {
        let theta = Automorphism::identity(&g);
        Self::new(g, n, theta)
    }

    pub fn m(&self) -> u32 {
        self.theta.order
    }

    fn inv_m(&self) -> Q {
        q(1, self.m() as i128)
    }

    /// Relation vector (1/m) r0, r_1, .., r_N of the d_A generator at (r0, r̲).
    fn relation(&self, r0: i64, r: &[i64]) -> Vec<Q> {
        let mut v = vec![qi(r0) * self.inv_m()];
        v.extend(r.iter().map(|&x| qi(x)));
        v
    }

    /// Rewrites central terms modulo d_A: for (r0, r̲) ≠ 0 eliminate k_0 when
    /// r0 ≠ 0, otherwise k_j for the smallest j with r_j ≠ 0.
    pub fn normalize(&self, e: &TElem) -> TElem {
        let mut out = TElem::zero();
        for (s, c) in &e.terms {
            match s {
                Sym::Central { i, r0, r } => {
                    let elim = if *r0 != 0 {
                        Some(0)
                    } else {
                        r.iter().position(|&x| x != 0).map(|j| j + 1)
                    };
                    match elim {
                        Some(el) if el == *i => {
                            let rel = self.relation(*r0, r);
                            for (k, rk) in rel.iter().enumerate() {
                                if k != el && *rk != qi(0) {
                                    let f = -(rk / rel[el]);
                                    out.add_term(Sym::Central { i: k, r0: *r0, r: r.clone() }, c.scale(&f));
                                }
                            }
                        }
                        _ => out.add_term(s.clone(), c.clone()),
                    }
                }
                _ => out.add_term(s.clone(), c.clone()),
            }
        }
        out
    }

    fn bracket_sym(&self, a: &Sym, b: &Sym, out: &mut TElem) {
        match (a, b) {
            (Sym::Loop { g: ga, r0, r }, Sym::Loop { g: gb, r0: s0, r: s }) => {
                let t0 = r0 + s0;
                let t = vadd(r, s);
                for &(k, c) in self.g.basis_bracket_terms(*ga, *gb) {
                    out.add_term(Sym::Loop { g: k, r0: t0, r: t.clone() }, CycScalar::int(c));
                }
                let f = self.g.basis_form(*ga, *gb);
                if f != 0 {
                    let rel = self.relation(*r0, r);
                    for (i, ri) in rel.iter().enumerate() {
                        if *ri != qi(0) {
                            out.add_term(Sym::Central { i, r0: t0, r: t.clone() }, CycScalar::rational(ri * qi(f)));
                        }
                    }
                }
            }
            (Sym::Deriv { i }, other @ (Sym::Loop { .. } | Sym::Central { .. })) => {
                let d = other.degree(*i);
                if d != 0 {
                    out.add_term(other.clone(), CycScalar::int(d));
                }
            }
            (other @ (Sym::Loop { .. } | Sym::Central { .. }), Sym::Deriv { i }) => {
                let d = other.degree(*i);
                if d != 0 {
                    out.add_term(other.clone(), CycScalar::int(-d));
                }
            }
            _ => {}
        }
    }

    pub fn bracket(&self, a: &TElem, b: &TElem) -> TElem {
        let mut out = TElem::zero();
        for (sa, ca) in &a.terms {
            for (sb, cb) in &b.terms {
                let mut part = TElem::zero();
                self.bracket_sym(sa, sb, &mut part);
                if part.is_zero() {
                    continue;
                }
                let c = ca * cb;
                for (s, v) in part.terms {
                    out.add_term(s, &v * &c);
                }
            }
        }
        self.normalize(&out)
    }

    /// Loop-level action: x(r0, r̲) ↦ w^{-r0} θ(x)(r0, r̲), central terms scaled
    /// by w^{-r0}, derivations fixed.
    pub fn theta_ext(&self, e: &TElem) -> TElem {
        let m = self.m();
        let mut out = TElem::zero();
        for (s, c) in &e.terms {
            match s {
                Sym::Loop { g, r0, r } => {
                    let w = CycScalar::root_of_unity(m, -r0);
                    for (k, v) in self.theta.images[*g].iter().enumerate() {
                        if !v.is_zero() {
                            out.add_term(Sym::Loop { g: k, r0: *r0, r: r.clone() }, &(c * v) * &w);
                        }
                    }
                }
                Sym::Central { r0, .. } => out.add_term(s.clone(), c * &CycScalar::root_of_unity(m, -r0)),
                Sym::Deriv { .. } => out.add_term(s.clone(), c.clone()),
            }
        }
        self.normalize(&out)
    }

    pub fn is_fixed(&self, e: &TElem) -> bool {
        self.theta_ext(e) == self.normalize(e)
    }

    /// (1/m) Σ_p θ^p e, the projection onto L̃(G, θ).
    pub fn fixed_part(&self, e: &TElem) -> TElem {
        let mut acc = TElem::zero();
        let mut cur = self.normalize(e);
        for _ in 0..self.m() {
            acc = acc.add(&cur);
            cur = self.theta_ext(&cur);
        }
        acc.scale(&CycScalar::rational(self.inv_m()))
    }

    /// i-th eigencomponent of x ∈ G.
    pub fn component(&self, x: &GVec, i: i64) -> GVec {
        if self.m() == 1 {
            return x.clone();
        }
        self.theta.projector(i, x)
    }

    /// Random θ-fixed element with a few terms, degrees |r0| ≤ d0, |r_i| ≤ dr.
    pub fn random_fixed<R: Rng>(&self, rng: &mut R, d0: i64, dr: i64) -> TElem {
        loop {
            let nterms = rng.gen_range(1..=3);
            let mut e = TElem::zero();
            for _ in 0..nterms {
                let r0 = rng.gen_range(-d0..=d0);
                let r: Vec<i64> = (0..self.n).map(|_| rng.gen_range(-dr..=dr)).collect();
                let c = CycScalar::int(rng.gen_range(-3..=3));
                let s = match rng.gen_range(0..10) {
                    0 => Sym::Central { i: rng.gen_range(0..=self.n), r0, r },
                    1 => Sym::Deriv { i: rng.gen_range(0..=self.n) },
                    _ => Sym::Loop { g: rng.gen_range(0..self.g.dim()), r0, r },
                };
                e.add_term(s, c);
            }
            let f = self.fixed_part(&e);
            if !f.is_zero() {
                return f;
            }
        }
    }

    /// The d_A relation element at (r0, r̲).
    pub fn relation_element(&self, r0: i64, r: &[i64]) -> TElem {
        let mut e = TElem::zero();
        for (i, c) in self.relation(r0, r).into_iter().enumerate() {
            e.add_term(Sym::Central { i, r0, r: r.to_vec() }, CycScalar::rational(c));
        }
        e
    }

    // Generating-function coefficients.

    /// Coefficient of ζ^n in x(r̲, ζ): x_n ⊗ t^n t^{r̲}.
    pub fn x_coeff(&self, x: &GVec, n: i64, r: &[i64]) -> TElem {
        TElem::loop_vec(&self.component(x, n), n, r)
    }

    /// Coefficient of ζ^n in k_i(r̲, ζ^m).
    pub fn k_coeff(&self, i: usize, n: i64, r: &[i64]) -> TElem {
        if n.rem_euclid(self.m() as i64) != 0 {
            return TElem::zero();
        }
        self.normalize(&TElem::central(i, n, r))
    }

    /// Coefficient of ζ1^a ζ2^b in δ(w^{-p}ζ1/ζ2) X(ζ2), given the modes of X.
    fn delta_times(&self, p: i64, a: i64, b: i64, modes: impl Fn(i64) -> TElem) -> TElem {
        modes(a + b).scale(&CycScalar::root_of_unity(self.m(), -p * a))
    }

    fn ddelta_times(&self, p: i64, a: i64, b: i64, modes: impl Fn(i64) -> TElem) -> TElem {
        modes(a + b).scale(&CycScalar::root_of_unity(self.m(), -p * a).scale(&qi(a)))
    }

    /// Σ_i r_i k_i(r̲, ζ^m) δ(w^{-p}ζ1/ζ2) + (k_0(r̲, ζ^m)/m) Dδ(w^{-p}ζ1/ζ2) at (a, b).
    fn central_kernel(&self, p: i64, a: i64, b: i64, rvec: &[i64], rs: &[i64]) -> TElem {
        let mut acc = TElem::zero();
        for (i, &ri) in rvec.iter().enumerate() {
            if ri != 0 {
                let t = self.delta_times(p, a, b, |n| self.k_coeff(i + 1, n, rs)).scale(&CycScalar::int(ri));
                acc = acc.add(&t);
            }
        }
        let t = self.ddelta_times(p, a, b, |n| self.k_coeff(0, n, rs)).scale(&CycScalar::rational(self.inv_m()));
        acc.add(&t)
    }

    /// Right side of the root–root relation at (a, b).
    pub fn rel1_rhs(&self, b1: usize, b2: usize, r: &[i64], s: &[i64], a: i64, b: i64) -> TElem {
        let g = &self.g;
        let rs = vadd(r, s);
        let m = self.m() as i64;
        let inv_m = CycScalar::rational(self.inv_m());
        let x_neg_form = CycScalar::int(g.basis_form(b2, g.rs.neg_index(b2)));
        let mut acc = TElem::zero();
        for p in 0..m {
            let tb = self.theta.root_pow(p, b1);
            let eta = self.theta.eta(p, b1).expect("root index");
            let sum = vadd(&g.rs.roots[tb], &g.rs.roots[b2]);
            if let Some(gi) = g.rs.root_index(&sum) {
                let e = CycScalar::int(g.rs.eps(&g.rs.roots[tb], &g.rs.roots[b2]));
                let c = &(&eta * &e) * &inv_m;
                let t = self.delta_times(p, a, b, |n| self.x_coeff(&g.unit(gi), n, &rs));
                acc = acc.add(&t.scale(&c));
            } else if sum.iter().all(|&x| x == 0) {
                let hb = g.coroot(&g.rs.roots[b2]);
                let c = &(&eta * &x_neg_form) * &inv_m;
                let t = self.delta_times(p, a, b, |n| self.x_coeff(&hb, n, &rs));
                acc = acc.sub(&t.scale(&c));
                acc = acc.add(&self.central_kernel(p, a, b, r, &rs).scale(&c));
            }
        }
        self.normalize(&acc)
    }

    /// Right side of the Cartan–Cartan relation at (a, b) for Cartan elements h1, h2.
    pub fn rel2_rhs(&self, h1: &GVec, h2: &GVec, r: &[i64], s: &[i64], a: i64, b: i64) -> TElem {
        let rs = vadd(r, s);
        let inv_m = CycScalar::rational(self.inv_m());
        let mut acc = TElem::zero();
        for p in 0..self.m() as i64 {
            let f = self.g.form(&self.theta.apply_pow(p, h1), h2);
            if f.is_zero() {
                continue;
            }
            acc = acc.add(&self.central_kernel(p, a, b, r, &rs).scale(&(&f * &inv_m)));
        }
        self.normalize(&acc)
    }

    /// Right side of the Cartan–root relation at (a, b).
    pub fn rel3_rhs(&self, h1: &GVec, b2: usize, r: &[i64], s: &[i64], a: i64, b: i64) -> TElem {
        let g = &self.g;
        let rs = vadd(r, s);
        let inv_m = CycScalar::rational(self.inv_m());
        let h2 = g.coroot(&g.rs.roots[b2]);
        let mut acc = TElem::zero();
        for p in 0..self.m() as i64 {
            let f = g.form(&self.theta.apply_pow(p, h1), &h2);
            if f.is_zero() {
                continue;
            }
            let t = self.delta_times(p, a, b, |n| self.x_coeff(&g.unit(b2), n, &rs));
            acc = acc.add(&t.scale(&(&f * &inv_m)));
        }
        self.normalize(&acc)
    }
}

/// Window for the generating-function relations.
#[derive(Debug, Clone)]
pub struct RelationWindow {
    pub w: i64,
    /// Multi-indices r̲, s̲ to sweep.
    pub multi: Vec<Vec<i64>>,
}

impl RelationWindow {
    pub fn standard(n: usize, w: i64) -> Self {
        let mut multi = vec![vec![0; n]];
        for i in 0..n {
            let mut e = vec![0; n];
            e[i] = 1;
            multi.push(e.clone());
            e[i] = -1;
            multi.push(e);
        }
        RelationWindow { w, multi }
    }
}

fn fmt_v(v: &[i64]) -> String {
    format!("{v:?}").replace(' ', "")
}

/// Checks the generating-function relations coefficient by coefficient against the
/// direct bracket for all modes |a|, |b| ≤ W.
pub fn verify_generating_relations(t: &Toroidal, win: &RelationWindow) -> Vec<Entry> {
    let g = t.g.clone();
    let nr = g.num_roots();
    let w = win.w;
    let m = t.m() as i64;
    let mut entries = Vec::new();
    let cartan: Vec<usize> = (0..g.rank()).collect();

    // Root–root.
    for b1 in 0..nr {
        for b2 in 0..nr {
            for r in &win.multi {
                for s in &win.multi {
                    let mut e = Entry::new(
                        "genrel-root-root",
                        format!("b1={} b2={} r={} s={}", fmt_v(&g.rs.roots[b1]), fmt_v(&g.rs.roots[b2]), fmt_v(r), fmt_v(s)),
                    );
                    for a in -w..=w {
                        let xa = t.x_coeff(&g.unit(b1), a, r);
                        for b in -w..=w {
                            let lhs = t.bracket(&xa, &t.x_coeff(&g.unit(b2), b, s));
                            let rhs = t.rel1_rhs(b1, b2, r, s, a, b);
                            e.record(lhs == rhs, || format!("({a},{b}): lhs {lhs:?} rhs {rhs:?}"));
                        }
                    }
                    entries.push(e);
                }
            }
        }
    }
    // Cartan–Cartan and Cartan–root, with β the simple coroots.
    for &i in &cartan {
        let h1 = g.unit(g.cartan_index(i));
        for r in &win.multi {
            for s in &win.multi {
                for &j in &cartan {
                    let h2 = g.unit(g.cartan_index(j));
                    let mut e = Entry::new("genrel-cartan-cartan", format!("h{} h{} r={} s={}", i + 1, j + 1, fmt_v(r), fmt_v(s)));
                    for a in -w..=w {
                        let xa = t.x_coeff(&h1, a, r);
                        for b in -w..=w {
                            let lhs = t.bracket(&xa, &t.x_coeff(&h2, b, s));
                            let rhs = t.rel2_rhs(&h1, &h2, r, s, a, b);
                            e.record(lhs == rhs, || format!("({a},{b}): lhs {lhs:?} rhs {rhs:?}"));
                        }
                    }
                    entries.push(e);
                }
                for b2 in 0..nr {
                    let mut e = Entry::new(
                        "genrel-cartan-root",
                        format!("h{} b2={} r={} s={}", i + 1, fmt_v(&g.rs.roots[b2]), fmt_v(r), fmt_v(s)),
                    );
                    for a in -w..=w {
                        let xa = t.x_coeff(&h1, a, r);
                        for b in -w..=w {
                            let lhs = t.bracket(&xa, &t.x_coeff(&g.unit(b2), b, s));
                            let rhs = t.rel3_rhs(&h1, b2, r, s, a, b);
                            e.record(lhs == rhs, || format!("({a},{b}): lhs {lhs:?} rhs {rhs:?}"));
                        }
                    }
                    entries.push(e);
                }
            }
        }
    }
    for r in &win.multi {
        // (1/m) D k_0 + Σ r_i k_i = 0.
        let mut e4 = Entry::new("genrel-central-relation", format!("r={}", fmt_v(r)));
        for n in -w..=w {
            let mut acc = t.k_coeff(0, n, r).scale(&CycScalar::frac(n, m));
            for (i, &ri) in r.iter().enumerate() {
                acc = acc.add(&t.k_coeff(i + 1, n, r).scale(&CycScalar::int(ri)));
            }
            let acc = t.normalize(&acc);
            e4.record(acc.is_zero(), || format!("mode {n}: {acc:?}"));
        }
        entries.push(e4);
        // Derivations on k_j, and centrality.
        let mut e5 = Entry::new("genrel-di-central", format!("r={}", fmt_v(r)));
        let mut e6 = Entry::new("genrel-d0-central", format!("r={}", fmt_v(r)));
        let mut e8 = Entry::new("genrel-centrality", format!("r={}", fmt_v(r)));
        // Central in L̄(G, θ); the derivations are covered above.
        let probes: Vec<TElem> = (0..g.dim())
            .flat_map(|x| (-1..=1).map(move |n| (x, n)))
            .map(|(x, n)| t.fixed_part(&TElem::loop_vec(&g.unit(x), n, &vec![0; t.n])))
            .filter(|p| !p.is_zero())
            .collect();
        for j in 0..=t.n {
            for n in -w..=w {
                let k = t.k_coeff(j, n, r);
                for i in 1..=t.n {
                    let lhs = t.bracket(&TElem::deriv(i), &k);
                    let rhs = k.scale(&CycScalar::int(r[i - 1]));
                    e5.record(lhs == rhs, || format!("d{i}, k{j} mode {n}: {lhs:?} vs {rhs:?}"));
                }
                let lhs = t.bracket(&TElem::deriv(0), &k);
                let rhs = k.scale(&CycScalar::int(n));
                e6.record(lhs == rhs, || format!("d0, k{j} mode {n}: {lhs:?} vs {rhs:?}"));
                for p in &probes {
                    let c = t.bracket(&k, p);
                    e8.record(c.is_zero(), || format!("k{j} mode {n} against {p:?}: {c:?}"));
                }
            }
        }
        entries.push(e5);
        entries.push(e6);
        entries.push(e8);
        // x_β(r̲, w^p ζ) = η(p, β) x_{θ^p β}(r̲, ζ).
        let mut e7 = Entry::new("genrel-twist", format!("r={}", fmt_v(r)));
        for beta in 0..nr {
            for p in 0..m {
                let eta = t.theta.eta(p, beta).expect("root index");
                let tb = t.theta.root_pow(p, beta);
                for n in -w..=w {
                    let lhs = t.x_coeff(&g.unit(beta), n, r).scale(&CycScalar::root_of_unity(t.m(), p * n));
                    let rhs = t.x_coeff(&gscale(&eta, &g.unit(tb)), n, r);
                    e7.record(lhs == rhs, || format!("beta {beta} p {p} mode {n}"));
                }
            }
        }
        entries.push(e7);
    }
    entries
}

/// Both sides of f(ζ)δ(ζ^m) = (1/m) Σ_p f(w^p) δ(w^{-p}ζ) on modes |n| ≤ w.
/// `f` is a finite Laurent polynomial given as (exponent, coefficient) pairs.
pub fn delta_specialize(f: &[(i64, CycScalar)], m: u32, w: i64) -> (BTreeMap<i64, CycScalar>, BTreeMap<i64, CycScalar>) {
    let mut lhs = BTreeMap::new();
    let mut rhs = BTreeMap::new();
    let mi = m as i64;
    for n in -w..=w {
        let mut l = CycScalar::zero();
        for (e, c) in f {
            if (n - e).rem_euclid(mi) == 0 {
                l += c;
            }
        }
        lhs.insert(n, l);
        let mut r = CycScalar::zero();
        for p in 0..mi {
            let mut fp = CycScalar::zero();
            for (e, c) in f {
                fp += &(c * &CycScalar::root_of_unity(m, p * e));
            }
            r += &(&fp * &CycScalar::root_of_unity(m, -p * n));
        }
        rhs.insert(n, r.scale(&q(1, mi as i128)));
    }
    (lhs, rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootsys::CartanType;

    fn a1(n: usize) -> Toroidal {
        Toroidal::untwisted(Arc::new(Chevalley::from_type(CartanType::new(crate::rootsys::Kind::A, 1).unwrap())), n)
    }

    #[test]
    fn untwisted_bracket_example() {
        let t = a1(1);
        let g = t.g.clone();
        let x = TElem::loop_vec(&g.unit(0), 1, &[2]);
        let y = TElem::loop_vec(&g.unit(1), -1, &[-2]);
        let got = t.bracket(&x, &y);
        // -h_α + ⟨x_α, x_-α⟩(1·k_0 + 2·k_1) at t^0, with ⟨x_α, x_-α⟩ = -1
        let want = TElem::loop_vec(&g.unit(2), 0, &[0])
            .scale(&CycScalar::int(-1))
            .add(&TElem::central(0, 0, &[0]).scale(&CycScalar::int(-1)))
            .add(&TElem::central(1, 0, &[0]).scale(&CycScalar::int(-2)));
        assert_eq!(got, want);
    }

    #[test]
    fn normal_form() {
        let t = a1(1);
        assert!(t.normalize(&t.relation_element(3, &[2])).is_zero());
        assert!(t.normalize(&t.relation_element(0, &[2])).is_zero());
        let k = TElem::central(1, 0, &[0]);
        assert_eq!(t.normalize(&k), k);
        let got = t.normalize(&TElem::central(0, 1, &[1]));
        assert_eq!(got, TElem::central(1, 1, &[1]).scale(&CycScalar::int(-1)));
        let twice = t.normalize(&got);
        assert_eq!(twice, got);
    }

    #[test]
    fn derivation_action() {
        let t = a1(2);
        let x = TElem::loop_vec(&t.g.unit(0), 2, &[3, -1]);
        assert_eq!(t.bracket(&TElem::deriv(0), &x), x.scale(&CycScalar::int(2)));
        assert_eq!(t.bracket(&TElem::deriv(2), &x), x.scale(&CycScalar::int(-1)));
        let k = TElem::central(0, 0, &[1, 0]);
        assert!(t.bracket(&k, &x).is_zero());
    }

    #[test]
    fn delta_specialization_examples() {
        let one = [(0, CycScalar::one())];
        let (l, r) = delta_specialize(&one, 1, 5);
        assert_eq!(l, r);
        let zeta = [(1, CycScalar::one())];
        let (l, r) = delta_specialize(&zeta, 2, 8);
        assert_eq!(l, r);
        for n in -8..=8i64 {
            assert_eq!(l[&n], CycScalar::int(n.rem_euclid(2)));
        }
        let (l2, _) = delta_specialize(&[(2, CycScalar::one())], 2, 8);
        let (l0, _) = delta_specialize(&[(0, CycScalar::one())], 2, 8);
        assert_eq!(l2, l0);
    }

    #[test]
    fn theta_extension_on_central_terms() {
        let g = Arc::new(Chevalley::from_type("A2".parse().unwrap()));
        let pi = Automorphism::diagram(&g, &[1, 0]).unwrap();
        let t = Toroidal::new(g, 1, pi);
        let k = TElem::central(0, 2, &[1]);
        assert!(t.is_fixed(&k));
        let k1 = TElem::central(1, 1, &[0]);
        assert_eq!(t.theta_ext(&k1), k1.scale(&CycScalar::int(-1)));
    }
}
