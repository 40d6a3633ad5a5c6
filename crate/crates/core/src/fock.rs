//! Bosonic Fock spaces S(h₋) ⊗ C[Γ]: oscillator monomials, Heisenberg modes,
//! exponential dressing factors and lattice vertex operators.
//!
//! All matrix elements in the pictures built on this engine are rational,
//! so coefficients are kept in `Q`.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::rootsys::{vadd, Lattice};
use crate::Q;

/// A creation operator b_i(−n), stored as (i, n) with n > 0.
pub type Osc = (u8, u32);
/// Sorted product of creation operators.
pub type Mono = Vec<Osc>;
pub type OscPoly = BTreeMap<Mono, Q>;
/// ζ-power → coefficient vector.
pub type Series = BTreeMap<i64, FockVec>;
pub type FockVec = BTreeMap<FockState, Q>;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct FockState {
    pub osc: Mono,
    pub label: Vec<i64>,
}

impl FockState {
    pub fn vacuum(label: Vec<i64>) -> Self {
        FockState { osc: Vec::new(), label }
    }

    pub fn level(&self) -> u32 {
        mono_level(&self.osc)
    }
}

pub fn mono_level(m: &Mono) -> u32 {
    m.iter().map(|&(_, n)| n).sum()
}

pub fn mono_mul(a: &Mono, b: &Mono) -> Mono {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        if a[i] <= b[j] {
            out.push(a[i]);
            i += 1;
        } else {
            out.push(b[j]);
            j += 1;
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

pub fn poly_add(acc: &mut OscPoly, m: Mono, c: Q) {
    if c.is_zero() {
        return;
    }
    match acc.entry(m) {
        std::collections::btree_map::Entry::Vacant(e) => {
            e.insert(c);
        }
        std::collections::btree_map::Entry::Occupied(mut e) => {
            *e.get_mut() += c;
            if e.get().is_zero() {
                e.remove();
            }
        }
    }
}

pub fn poly_mul(a: &OscPoly, b: &OscPoly) -> OscPoly {
    let mut out = OscPoly::new();
    for (ma, ca) in a {
        for (mb, cb) in b {
            poly_add(&mut out, mono_mul(ma, mb), ca * cb);
        }
    }
    out
}

pub fn fv_add(acc: &mut FockVec, s: FockState, c: Q) {
    if c.is_zero() {
        return;
    }
    match acc.entry(s) {
        std::collections::btree_map::Entry::Vacant(e) => {
            e.insert(c);
        }
        std::collections::btree_map::Entry::Occupied(mut e) => {
            *e.get_mut() += c;
            if e.get().is_zero() {
                e.remove();
            }
        }
    }
}

/// acc += c·v
pub fn fv_axpy(acc: &mut FockVec, c: &Q, v: &FockVec) {
    if c.is_zero() {
        return;
    }
    for (s, x) in v {
        fv_add(acc, s.clone(), c * x);
    }
}

pub fn fv_sub(a: &FockVec, b: &FockVec) -> FockVec {
    let mut out = a.clone();
    fv_axpy(&mut out, &-Q::one(), b);
    out
}

pub fn fv_single(s: FockState) -> FockVec {
    let mut v = FockVec::new();
    v.insert(s, Q::one());
    v
}

pub fn series_add(acc: &mut Series, p: i64, c: &Q, v: &FockVec) {
    let slot = acc.entry(p).or_default();
    fv_axpy(slot, c, v);
    if slot.is_empty() {
        acc.remove(&p);
    }
}

/// Compact human-readable rendering used in report witnesses.
pub fn fv_render(v: &FockVec) -> String {
    if v.is_empty() {
        return "0".into();
    }
    let parts: Vec<String> = v
        .iter()
        .map(|(s, c)| {
            let osc: Vec<String> = s.osc.iter().map(|(i, n)| format!("b{}(-{})", i, n)).collect();
            format!("({})[{}]e^{:?}", crate::scalar::q_to_string(c), osc.join(" "), s.label)
        })
        .collect();
    parts.join(" + ")
}

/// Oscillators b_0..b_{n-1} attached to label coordinates, with commutator
/// [b_i(p), b_j(q)] = p·gram_ij·δ_{p+q,0}. Fields are series in ζ^step.
#[derive(Debug)]
pub struct FockSpace {
    pub lattice: Lattice,
    pub osc_coord: Vec<usize>,
    pub gram: Vec<Vec<Q>>,
    pub step: i64,
    schur: RefCell<HashMap<(Vec<Q>, Q), Vec<OscPoly>>>,
}

impl FockSpace {
    /// Oscillators on the listed label coordinates; the commutator form is
    /// `kappa` times the lattice form.
    pub fn new(lattice: Lattice, osc_coord: Vec<usize>, kappa: Q, step: i64) -> Self {
        let gram = osc_coord
            .iter()
            .map(|&a| osc_coord.iter().map(|&b| kappa * Q::from(lattice.gram[a][b] as i128)).collect())
            .collect();
        FockSpace { lattice, osc_coord, gram, step, schur: RefCell::new(HashMap::new()) }
    }

    pub fn num_osc(&self) -> usize {
        self.osc_coord.len()
    }

    /// Oscillator coordinates of a lattice vector; `None` if it has weight
    /// on a coordinate that carries no oscillator.
    pub fn to_osc(&self, v: &[i64]) -> Option<Vec<Q>> {
        let mut out = vec![Q::zero(); self.osc_coord.len()];
        for (c, &x) in v.iter().enumerate() {
            if x == 0 {
                continue;
            }
            let i = self.osc_coord.iter().position(|&a| a == c)?;
            out[i] = Q::from(x as i128);
        }
        Some(out)
    }

    fn pair(&self, h: &[Q], i: usize) -> Q {
        let mut s = Q::zero();
        for (j, hj) in h.iter().enumerate() {
            if !hj.is_zero() && !self.gram[j][i].is_zero() {
                s += hj * self.gram[j][i];
            }
        }
        s
    }

    /// h(n) on a monomial, n > 0.
    pub fn annihilate(&self, h: &[Q], n: u32, m: &Mono) -> OscPoly {
        let mut out = OscPoly::new();
        let mut k = 0;
        while k < m.len() {
            let (i, d) = m[k];
            if d == n {
                let c = self.pair(h, i as usize) * Q::from(n as i128);
                if !c.is_zero() {
                    // Count repeated factors so the derivative picks each one.
                    let mut mult = 0;
                    while k + mult < m.len() && m[k + mult] == (i, d) {
                        mult += 1;
                    }
                    let mut rest = m.clone();
                    rest.remove(k);
                    poly_add(&mut out, rest, c * Q::from(mult as i128));
                    k += mult;
                    continue;
                }
            }
            k += 1;
        }
        out
    }

    /// h(−n) on a monomial, n > 0.
    pub fn create(&self, h: &[Q], n: u32, m: &Mono) -> OscPoly {
        let mut out = OscPoly::new();
        for (i, c) in h.iter().enumerate() {
            if !c.is_zero() {
                poly_add(&mut out, mono_mul(m, &vec![(i as u8, n)]), *c);
            }
        }
        out
    }

    /// The Heisenberg mode h(n) for a lattice vector h; h(0) reads the label.
    pub fn heis(&self, h: &[i64], n: i64, s: &FockState) -> FockVec {
        let mut out = FockVec::new();
        if n == 0 {
            let c = self.lattice.form(h, &s.label);
            fv_add(&mut out, s.clone(), Q::from(c as i128));
            return out;
        }
        let ho = self.to_osc(h).expect("Heisenberg mode of a vector without oscillators");
        let poly = if n > 0 { self.annihilate(&ho, n as u32, &s.osc) } else { self.create(&ho, (-n) as u32, &s.osc) };
        for (m, c) in poly {
            fv_add(&mut out, FockState { osc: m, label: s.label.clone() }, c);
        }
        out
    }

    /// exp(c Σ_{j>0} β(j) x^j / j) applied to a monomial, as a polynomial in x:
    /// each factor b(−n) becomes b(−n) + c·[β(n), b(−n)]/n · x^n.
    pub fn eplus(&self, beta: &[Q], c: &Q, m: &Mono) -> BTreeMap<u32, OscPoly> {
        let mut acc: BTreeMap<u32, OscPoly> = BTreeMap::new();
        acc.entry(0).or_default().insert(Vec::new(), Q::one());
        for &(i, n) in m {
            let shift = c * self.pair(beta, i as usize);
            let mut next: BTreeMap<u32, OscPoly> = BTreeMap::new();
            for (p, poly) in &acc {
                for (mono, x) in poly {
                    poly_add(next.entry(*p).or_default(), mono_mul(mono, &vec![(i, n)]), *x);
                    if !shift.is_zero() {
                        poly_add(next.entry(p + n).or_default(), mono.clone(), x * shift);
                    }
                }
            }
            acc = next;
        }
        acc.retain(|_, p| !p.is_empty());
        acc
    }

    /// Coefficient S_n of x^n in exp(c Σ_{j>0} β(−j) x^j / j), a polynomial in
    /// creation operators; n·S_n = Σ_{j=1}^n c β(−j) S_{n−j}.
    pub fn schur(&self, beta: &[Q], c: &Q, n: usize) -> OscPoly {
        let key = (beta.to_vec(), *c);
        let mut cache = self.schur.borrow_mut();
        let list = cache.entry(key).or_insert_with(|| {
            let mut one = OscPoly::new();
            one.insert(Vec::new(), Q::one());
            vec![one]
        });
        while list.len() <= n {
            let k = list.len();
            let mut s = OscPoly::new();
            for j in 1..=k {
                let coef = c / Q::from(k as i128);
                for (mono, x) in &list[k - j] {
                    for (i, b) in beta.iter().enumerate() {
                        if !b.is_zero() {
                            poly_add(&mut s, mono_mul(mono, &vec![(i as u8, j as u32)]), coef * b * x);
                        }
                    }
                }
            }
            list.push(s);
        }
        list[n].clone()
    }

    /// d₀-eigenvalue −step·(level + (γ,γ)/2).
    pub fn d0(&self, s: &FockState) -> Q {
        let norm = self.lattice.form(&s.label, &s.label);
        -Q::from(self.step as i128) * (Q::from(s.level() as i128) + Q::new(norm as i128, 2))
    }

    /// The dressed lattice operator
    ///   exp(cm Σ e(−n) ζ^{−sn}/n) · exp(cp Σ e(n) ζ^{sn}/n) · ζ^{s(−(λ,λ)/2 − (λ,γ))} ε(λ,γ) e^λ
    /// on a basis state, keeping all powers ≥ `lo`.
    pub fn vertex(&self, e: &[Q], cm: &Q, cp: &Q, lambda: &[i64], v: &FockState, lo: i64) -> Series {
        let s = self.step;
        let plus = self.eplus(e, cp, &v.osc);
        let ll = self.lattice.form(lambda, lambda);
        let lg = self.lattice.form(lambda, &v.label);
        debug_assert!(ll % 2 == 0);
        let base = s * (-(ll / 2) - lg);
        let sign = Q::from(self.lattice.eps(lambda, &v.label) as i128);
        let label = vadd(&v.label, lambda);
        let mut out = Series::new();
        for (j, poly) in &plus {
            let top = base + s * (*j as i64);
            if top < lo {
                continue;
            }
            let qmax = ((top - lo) / s) as usize;
            for q in 0..=qmax {
                let sq = self.schur(e, cm, q);
                if sq.is_empty() {
                    continue;
                }
                let prod = poly_mul(&sq, poly);
                let slot = out.entry(top - s * q as i64).or_default();
                for (m, x) in prod {
                    fv_add(slot, FockState { osc: m, label: label.clone() }, x * sign);
                }
            }
        }
        out.retain(|_, v| !v.is_empty());
        out
    }

    /// All basis states with oscillator level ≤ d and label in `labels`.
    pub fn states(&self, d: u32, labels: &[Vec<i64>]) -> Vec<FockState> {
        let monos = monomials(self.num_osc(), d);
        let mut out = Vec::new();
        for l in labels {
            for m in &monos {
                out.push(FockState { osc: m.clone(), label: l.clone() });
            }
        }
        out
    }
}

/// A formal series of operators acting on basis states.
pub trait FieldOp {
    /// All coefficients with ζ-power ≥ lo, applied to `v`.
    fn expand(&self, v: &FockState, lo: i64) -> Series;
    /// Upper bound on the ζ-powers that occur on `v`.
    fn top(&self, v: &FockState) -> i64;
    /// Coefficient of ζ^n applied to `v`.
    fn mode(&self, n: i64, v: &FockState) -> FockVec {
        if n > self.top(v) {
            return FockVec::new();
        }
        self.expand(v, n).remove(&n).unwrap_or_default()
    }
}

/// The dressed lattice operator of [`FockSpace::vertex`].
pub struct Vertex<'a> {
    pub space: &'a FockSpace,
    pub e: Vec<Q>,
    pub cm: Q,
    pub cp: Q,
    pub lambda: Vec<i64>,
}

impl<'a> Vertex<'a> {
    /// Standard form exp(Σ e(−n)ζ^{−n}/n) exp(−Σ e(n)ζ^n/n) ζ^{..} e^λ with e = λ.
    pub fn standard(space: &'a FockSpace, lambda: Vec<i64>) -> Self {
        let e = space.to_osc(&lambda).expect("vertex label outside the oscillator span");
        Vertex { space, e, cm: Q::one(), cp: -Q::one(), lambda }
    }

    /// Label part only, dressed by the exponentials of `e`.
    pub fn with_dressing(space: &'a FockSpace, e: Vec<i64>, lambda: Vec<i64>) -> Self {
        let e = space.to_osc(&e).expect("dressing vector outside the oscillator span");
        Vertex { space, e, cm: Q::one(), cp: -Q::one(), lambda }
    }
}

impl FieldOp for Vertex<'_> {
    fn expand(&self, v: &FockState, lo: i64) -> Series {
        self.space.vertex(&self.e, &self.cm, &self.cp, &self.lambda, v, lo)
    }

    fn top(&self, v: &FockState) -> i64 {
        let f = self.space;
        let ll = f.lattice.form(&self.lambda, &self.lambda);
        let lg = f.lattice.form(&self.lambda, &v.label);
        let raise: u32 = v
            .osc
            .iter()
            .filter(|&&(i, _)| !(self.cp * f.pair(&self.e, i as usize)).is_zero())
            .map(|&(_, n)| n)
            .sum();
        f.step * (-(ll / 2) - lg + raise as i64)
    }

    fn mode(&self, n: i64, v: &FockState) -> FockVec {
        let f = self.space;
        let s = f.step;
        let ll = f.lattice.form(&self.lambda, &self.lambda);
        let lg = f.lattice.form(&self.lambda, &v.label);
        let base = s * (-(ll / 2) - lg);
        let sign = Q::from(f.lattice.eps(&self.lambda, &v.label) as i128);
        let label = vadd(&v.label, &self.lambda);
        let mut out = FockVec::new();
        for (j, poly) in f.eplus(&self.e, &self.cp, &v.osc) {
            let top = base + s * j as i64;
            if top < n || (top - n) % s != 0 {
                continue;
            }
            let sq = f.schur(&self.e, &self.cm, ((top - n) / s) as usize);
            for (m, x) in poly_mul(&sq, &poly) {
                fv_add(&mut out, FockState { osc: m, label: label.clone() }, x * sign);
            }
        }
        out
    }
}

/// h(ζ)·X(ζ) for a field X whose exponentials commute with the nonzero modes
/// of h, so that h(n), n > 0, may be moved to the right of X.
pub struct HeisTimes<'a> {
    pub space: &'a FockSpace,
    pub h: Vec<i64>,
    pub inner: Box<dyn FieldOp + 'a>,
    /// Label shift of the inner field, read by h(0) after it acts.
    pub shift: Vec<i64>,
    pub with_zero_mode: bool,
}

impl FieldOp for HeisTimes<'_> {
    fn expand(&self, v: &FockState, lo: i64) -> Series {
        let f = self.space;
        let s = f.step;
        let mut out = Series::new();
        let ho = f.to_osc(&self.h);
        // Annihilation part: X(ζ) h(n) v ζ^{sn}.
        if let Some(ho) = &ho {
            for n in 1..=v.level() {
                let poly = f.annihilate(ho, n, &v.osc);
                for (m, c) in poly {
                    let t = FockState { osc: m, label: v.label.clone() };
                    for (p, vec) in self.inner.expand(&t, lo - s * n as i64) {
                        if p + s * n as i64 >= lo {
                            series_add(&mut out, p + s * n as i64, &c, &vec);
                        }
                    }
                }
            }
        }
        let base = self.inner.expand(v, lo);
        let h0 = Q::from(f.lattice.form(&self.h, &vadd(&v.label, &self.shift)) as i128);
        for (p, vec) in &base {
            if self.with_zero_mode && !h0.is_zero() {
                series_add(&mut out, *p, &h0, vec);
            }
            if let Some(ho) = &ho {
                let mut n = 1;
                while p - s * n as i64 >= lo {
                    let mut created = FockVec::new();
                    for (t, c) in vec {
                        for (m, x) in f.create(ho, n, &t.osc) {
                            fv_add(&mut created, FockState { osc: m, label: t.label.clone() }, c * x);
                        }
                    }
                    series_add(&mut out, p - s * n as i64, &Q::one(), &created);
                    n += 1;
                }
            }
        }
        out
    }

    fn top(&self, v: &FockState) -> i64 {
        self.inner.top(v) + self.space.step * v.level() as i64
    }
}

/// Σ c_i F_i.
pub struct SumField<'a> {
    pub parts: Vec<(Q, Box<dyn FieldOp + 'a>)>,
}

impl FieldOp for SumField<'_> {
    fn expand(&self, v: &FockState, lo: i64) -> Series {
        let mut out = Series::new();
        for (c, f) in &self.parts {
            for (p, vec) in f.expand(v, lo) {
                series_add(&mut out, p, c, &vec);
            }
        }
        out
    }

    fn top(&self, v: &FockState) -> i64 {
        self.parts.iter().map(|(_, f)| f.top(v)).max().unwrap_or(i64::MIN / 4)
    }

    fn mode(&self, n: i64, v: &FockState) -> FockVec {
        let mut out = FockVec::new();
        for (c, f) in &self.parts {
            fv_axpy(&mut out, c, &f.mode(n, v));
        }
        out
    }
}

/// The constant series Id·ζ⁰ scaled by c.
pub struct ConstField(pub Q);

impl FieldOp for ConstField {
    fn expand(&self, v: &FockState, lo: i64) -> Series {
        let mut out = Series::new();
        if lo <= 0 && !self.0.is_zero() {
            let mut vec = FockVec::new();
            vec.insert(v.clone(), self.0);
            out.insert(0, vec);
        }
        out
    }

    fn top(&self, _v: &FockState) -> i64 {
        0
    }
}

/// F(ζ)G(ζ) for fields where G only creates oscillators that F's
/// annihilators do not see, so F's top on G's output equals its top on
/// `v` with G's label shift applied.
pub fn same_point_product(f: &dyn FieldOp, g: &dyn FieldOp, g_shift: &[i64], v: &FockState, lo: i64) -> Series {
    let probe = FockState { osc: v.osc.clone(), label: vadd(&v.label, g_shift) };
    let tf = f.top(&probe);
    let inner = g.expand(v, lo - tf);
    let mut out = Series::new();
    for (p, vec) in &inner {
        for (t, c) in vec {
            for (p2, v2) in f.expand(t, lo - p) {
                if p + p2 >= lo {
                    series_add(&mut out, p + p2, c, &v2);
                }
            }
        }
    }
    out
}

/// All sorted monomials in `n` oscillator types with level ≤ d.
pub fn monomials(n: usize, d: u32) -> Vec<Mono> {
    let mut out = vec![Vec::new()];
    // Parts are generated in nondecreasing (index, mode) order.
    fn rec(n: usize, left: u32, start: Osc, cur: &mut Mono, out: &mut Vec<Mono>) {
        for i in start.0 as usize..n {
            let first = if i == start.0 as usize { start.1.max(1) } else { 1 };
            for mode in first..=left {
                cur.push((i as u8, mode));
                out.push(cur.clone());
                rec(n, left - mode, (i as u8, mode), cur, out);
                cur.pop();
            }
        }
    }
    rec(n, d, (0, 1), &mut Vec::new(), &mut out);
    out.sort();
    out
}

/// Integer vectors of the given dimension with ℓ¹-norm ≤ b.
pub fn labels_in_ball(dim: usize, b: u32) -> Vec<Vec<i64>> {
    fn rec(dim: usize, left: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if cur.len() == dim {
            out.push(cur.clone());
            return;
        }
        for x in -left..=left {
            cur.push(x);
            rec(dim, left - x.abs(), cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(dim, b as i64, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;

    fn a1() -> FockSpace {
        FockSpace::new(Lattice::new(vec![vec![2]]), vec![0], Q::one(), 1)
    }

    #[test]
    fn colored_partition_counts() {
        let counts: Vec<usize> = (0..=3).map(|d| monomials(3, d).len()).collect();
        assert_eq!(counts, vec![1, 4, 13, 35]);
        assert_eq!(labels_in_ball(4, 2).len(), 41);
    }

    #[test]
    fn heisenberg_commutator_on_states() {
        let f = a1();
        let h = [1i64];
        for s in f.states(4, &[vec![0], vec![1]]) {
            for n in 1..=3i64 {
                let mut lhs = FockVec::new();
                for (t, c) in f.heis(&h, -n, &s) {
                    fv_axpy(&mut lhs, &c, &f.heis(&h, n, &t));
                }
                for (t, c) in f.heis(&h, n, &s) {
                    fv_axpy(&mut lhs, &-c, &f.heis(&h, -n, &t));
                }
                let mut rhs = FockVec::new();
                fv_add(&mut rhs, s.clone(), Q::from(2 * n as i128));
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn schur_low_orders() {
        let f = a1();
        let one = [Q::one()];
        let s2 = f.schur(&one, &Q::one(), 2);
        // exp(b(-1)x + b(-2)x²/2): x² coefficient is b(-1)²/2 + b(-2)/2
        assert_eq!(s2.get(&vec![(0, 1), (0, 1)]), Some(&q(1, 2)));
        assert_eq!(s2.get(&vec![(0, 2)]), Some(&q(1, 2)));
    }

    #[test]
    fn dressing_factors_invert() {
        let f = a1();
        let one = [Q::one()];
        for n in 1..=4 {
            let mut tot = OscPoly::new();
            for j in 0..=n {
                let p = poly_mul(&f.schur(&one, &Q::one(), j), &f.schur(&one, &-Q::one(), n - j));
                for (m, c) in p {
                    poly_add(&mut tot, m, c);
                }
            }
            assert!(tot.is_empty());
        }
    }
}
