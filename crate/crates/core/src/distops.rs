//! Truncated formal distributions: delta series, binomial factors and the
//! exponential dressing operators E^±.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::fock::{FieldOp, FockSpace, FockState, FockVec, Series};
use crate::{CycScalar, Error, Result, Q};

/// Mode bound `w`, state-degree bound `d`, lattice-label bound `b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruncationWindow {
    pub w: i64,
    pub d: u32,
    pub b: u32,
}

impl TruncationWindow {
    pub fn new(w: i64, d: u32, b: u32) -> Result<Self> {
        if w < 0 {
            return Err(Error::Config { key: "window".into(), msg: "mode bound must be nonnegative".into() });
        }
        Ok(TruncationWindow { w, d, b })
    }

    pub fn modes(&self) -> std::ops::RangeInclusive<i64> {
        -self.w..=self.w
    }
}

impl fmt::Display for TruncationWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.w, self.d, self.b)
    }
}

impl FromStr for TruncationWindow {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config { key: "window".into(), msg: format!("expected W,D,B, got '{}'", s) };
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        let w: i64 = parts[0].parse().map_err(|_| bad())?;
        let d: u32 = parts[1].parse().map_err(|_| bad())?;
        let b: u32 = parts[2].parse().map_err(|_| bad())?;
        TruncationWindow::new(w, d, b)
    }
}

/// Which ratio a binomial factor is expanded in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Z1OverZ2,
    Z2OverZ1,
}

/// Generalized binomial coefficients of (1 − u)^c up to u^{len−1}.
pub fn binomial_coeffs(c: &Q, len: usize) -> Vec<Q> {
    let mut out = Vec::with_capacity(len);
    let mut cur = Q::one();
    for n in 0..len {
        out.push(cur);
        // coefficient of u^{n+1}: (−1)^{n+1} C(c, n+1) = cur · (n − c)/(n + 1)
        cur = cur * (Q::from(n as i128) - c) / Q::from(n as i128 + 1);
    }
    out
}

/// (1 − a·u)^c expanded in nonnegative powers of u up to u^{len−1}. The
/// direction only records which ratio u stands for.
pub fn binomial_factor(c: &Q, a: &CycScalar, _dir: Direction, len: usize) -> Vec<CycScalar> {
    let mut pow = CycScalar::one();
    binomial_coeffs(c, len)
        .into_iter()
        .map(|b| {
            let t = pow.scale(&b);
            pow = &pow * a;
            t
        })
        .collect()
}

pub fn series_mul(a: &[CycScalar], b: &[CycScalar]) -> Vec<CycScalar> {
    let len = a.len().min(b.len());
    let mut out = vec![CycScalar::zero(); len];
    for i in 0..len {
        if a[i].is_zero() {
            continue;
        }
        for j in 0..len - i {
            out[i + j] += &(&a[i] * &b[j]);
        }
    }
    out
}

/// Π (1 − a_p u)^{c_p} truncated to `len` terms.
pub fn binomial_product(factors: &[(Q, CycScalar)], dir: Direction, len: usize) -> Vec<CycScalar> {
    let mut acc = vec![CycScalar::zero(); len];
    if len > 0 {
        acc[0] = CycScalar::one();
    }
    for (c, a) in factors {
        if c.is_zero() {
            continue;
        }
        acc = series_mul(&acc, &binomial_factor(c, a, dir, len));
    }
    acc
}

/// Rational form of a scalar series, required by the Fock engine.
pub fn rational_series(s: &[CycScalar]) -> Result<Vec<Q>> {
    s.iter()
        .map(|x| x.as_rational().ok_or_else(|| Error::Support(format!("irrational binomial coefficient {}", x))))
        .collect()
}

/// Finite Laurent polynomial in ζ₁, ζ₂ with a declared one-sided support
/// bound: either every exponent is ≤ n or every exponent is ≥ n.
#[derive(Debug, Clone, PartialEq)]
pub struct Bivar {
    pub coeffs: BTreeMap<(i64, i64), CycScalar>,
    pub support: Support,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Support {
    AtMost(i64),
    AtLeast(i64),
}

impl Bivar {
    pub fn new(coeffs: BTreeMap<(i64, i64), CycScalar>, support: Support) -> Result<Self> {
        for &(i, j) in coeffs.keys() {
            let ok = match support {
                Support::AtMost(n) => i <= n && j <= n,
                Support::AtLeast(n) => i >= n && j >= n,
            };
            if !ok {
                return Err(Error::Support(format!("term ζ₁^{} ζ₂^{} violates {:?}", i, j, support)));
            }
        }
        Ok(Bivar { coeffs, support })
    }

    fn d1(&self) -> BTreeMap<(i64, i64), CycScalar> {
        self.coeffs.iter().map(|(&(i, j), c)| ((i, j), c.scale(&Q::from(i as i128)))).collect()
    }

    fn d2(&self) -> BTreeMap<(i64, i64), CycScalar> {
        self.coeffs.iter().map(|(&(i, j), c)| ((i, j), c.scale(&Q::from(j as i128)))).collect()
    }
}

pub type Grid = BTreeMap<(i64, i64), CycScalar>;

fn put(g: &mut Grid, k: (i64, i64), c: CycScalar) {
    if c.is_zero() {
        return;
    }
    let e = g.entry(k).or_insert_with(CycScalar::zero);
    *e += &c;
    if e.is_zero() {
        g.remove(&k);
    }
}

/// δ(aζ₁/ζ₂) (or Dδ when `deriv`) times f, coefficients with |p|,|q| ≤ w.
fn delta_times(a: &CycScalar, deriv: bool, f: &BTreeMap<(i64, i64), CycScalar>, w: i64) -> Result<Grid> {
    let ainv = a.inv()?;
    let mut g = Grid::new();
    for p in -w..=w {
        for q in -w..=w {
            let mut acc = CycScalar::zero();
            for (&(i, j), c) in f {
                // δ contributes ζ₁^n ζ₂^{−n}; need n = p − i = j − q.
                let n = p - i;
                if n != j - q {
                    continue;
                }
                let an = if n >= 0 { a.pow(n) } else { ainv.pow(-n) };
                let mut t = &an * c;
                if deriv {
                    t = t.scale(&Q::from(n as i128));
                }
                acc += &t;
            }
            put(&mut g, (p, q), acc);
        }
    }
    Ok(g)
}

/// δ(aζ₁/ζ₂)·f on the window.
pub fn delta_mul(a: &CycScalar, f: &Bivar, w: i64) -> Result<Grid> {
    delta_times(a, false, &f.coeffs, w)
}

/// Dδ(aζ₁/ζ₂)·f on the window.
pub fn delta_dmul(a: &CycScalar, f: &Bivar, w: i64) -> Result<Grid> {
    delta_times(a, true, &f.coeffs, w)
}

/// f(ζ₁, aζ₁) as a one-variable series placed in the ζ₁ slot.
fn restrict_first(a: &CycScalar, f: &BTreeMap<(i64, i64), CycScalar>) -> Result<BTreeMap<(i64, i64), CycScalar>> {
    let ainv = a.inv()?;
    let mut out = Grid::new();
    for (&(i, j), c) in f {
        let aj = if j >= 0 { a.pow(j) } else { ainv.pow(-j) };
        put(&mut out, (i + j, 0), &aj * c);
    }
    Ok(out)
}

/// f(a⁻¹ζ₂, ζ₂) in the ζ₂ slot.
fn restrict_second(a: &CycScalar, f: &BTreeMap<(i64, i64), CycScalar>) -> Result<BTreeMap<(i64, i64), CycScalar>> {
    let ainv = a.inv()?;
    let mut out = Grid::new();
    for (&(i, j), c) in f {
        let ai = if i >= 0 { ainv.pow(i) } else { a.pow(-i) };
        put(&mut out, (0, i + j), &ai * c);
    }
    Ok(out)
}

fn grid_add(a: &Grid, b: &Grid, sign: i64) -> Grid {
    let mut out = a.clone();
    for (k, c) in b {
        put(&mut out, *k, c.scale(&Q::from(sign as i128)));
    }
    out
}

/// The three forms of δ(aζ₁/ζ₂)f: as given, with ζ₂ = aζ₁, with ζ₁ = a⁻¹ζ₂.
pub fn delta_forms(a: &CycScalar, f: &Bivar, w: i64) -> Result<[Grid; 3]> {
    Ok([
        delta_times(a, false, &f.coeffs, w)?,
        delta_times(a, false, &restrict_first(a, &f.coeffs)?, w)?,
        delta_times(a, false, &restrict_second(a, &f.coeffs)?, w)?,
    ])
}

/// The three forms of Dδ(aζ₁/ζ₂)f:
///   as given;
///   (Dδ)·f(ζ₁,aζ₁) + δ·(D₂f)(ζ₁,aζ₁);
///   (Dδ)·f(a⁻¹ζ₂,ζ₂) − δ·(D₁f)(a⁻¹ζ₂,ζ₂).
pub fn ddelta_forms(a: &CycScalar, f: &Bivar, w: i64) -> Result<[Grid; 3]> {
    let direct = delta_times(a, true, &f.coeffs, w)?;
    let first = grid_add(
        &delta_times(a, true, &restrict_first(a, &f.coeffs)?, w)?,
        &delta_times(a, false, &restrict_first(a, &f.d2())?, w)?,
        1,
    );
    let second = grid_add(
        &delta_times(a, true, &restrict_second(a, &f.coeffs)?, w)?,
        &delta_times(a, false, &restrict_second(a, &f.d1())?, w)?,
        -1,
    );
    Ok([direct, first, second])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

/// E^+(β,ζ) = exp((m/k) Σ_{j>0} β(j) ζ^{j}/j) and
/// E^−(β,ζ) = exp(−(m/k) Σ_{j>0} β(−j) ζ^{−j}/j), in the variable ζ^step of
/// the underlying Fock space.
#[derive(Debug, Clone)]
pub struct Dressing {
    pub sign: Sign,
    pub beta: Vec<Q>,
    pub coeff: Q,
}

impl Dressing {
    pub fn new(sign: Sign, beta: Vec<Q>, m: u32, k: Q) -> Result<Self> {
        if k.is_zero() {
            return Err(Error::ZeroLevel);
        }
        let c = Q::from(m as i128) / k;
        let coeff = match sign {
            Sign::Plus => c,
            Sign::Minus => -c,
        };
        Ok(Dressing { sign, beta, coeff })
    }

    /// Action on a basis state, all powers ≥ lo.
    pub fn apply(&self, f: &FockSpace, v: &FockState, lo: i64) -> Series {
        let s = f.step;
        let mut out = Series::new();
        match self.sign {
            Sign::Plus => {
                for (j, poly) in f.eplus(&self.beta, &self.coeff, &v.osc) {
                    let mut vec = FockVec::new();
                    for (m, c) in poly {
                        crate::fock::fv_add(&mut vec, FockState { osc: m, label: v.label.clone() }, c);
                    }
                    out.insert(s * j as i64, vec);
                }
            }
            Sign::Minus => {
                if lo > 0 {
                    return out;
                }
                for q in 0..=((-lo) / s) as usize {
                    let mut vec = FockVec::new();
                    for (m, c) in f.schur(&self.beta, &self.coeff, q) {
                        crate::fock::fv_add(&mut vec, FockState { osc: crate::fock::mono_mul(&m, &v.osc), label: v.label.clone() }, c);
                    }
                    if !vec.is_empty() {
                        out.insert(-s * q as i64, vec);
                    }
                }
            }
        }
        out
    }
}

/// Π (1 − a_p u)^{c_p} over Q, truncated to `len` terms.
pub fn binomial_product_q(factors: &[(Q, Q)], len: usize) -> Vec<Q> {
    let mut acc = vec![Q::zero(); len];
    if len > 0 {
        acc[0] = Q::one();
    }
    for (c, a) in factors {
        if c.is_zero() {
            continue;
        }
        let mut f = binomial_coeffs(c, len);
        let mut pow = Q::one();
        for x in f.iter_mut() {
            *x *= pow;
            pow *= a;
        }
        let mut next = vec![Q::zero(); len];
        for i in 0..len {
            if acc[i].is_zero() {
                continue;
            }
            for j in 0..len - i {
                next[i + j] += acc[i] * f[j];
            }
        }
        acc = next;
    }
    acc
}

pub type OpGrid = BTreeMap<(i64, i64), FockVec>;

/// Coefficients at ζ₁^a ζ₂^b, |a|,|b| ≤ w, of
///   B(outer/inner) · F_outer(ζ_outer) F_inner(ζ_inner) v
/// where B = Π (1 − a_p·outer/inner)^{c_p} is expanded in nonnegative powers
/// of outer/inner. `outer_first` says whether the outer field sits at ζ₁.
/// With no factors this is the plain composition f_a ∘ g_b.
pub fn field_product(
    outer: &dyn FieldOp,
    inner: &dyn FieldOp,
    factors: &[(Q, Q)],
    outer_first: bool,
    v: &FockState,
    w: i64,
) -> OpGrid {
    let mut grid = OpGrid::new();
    let t_in = inner.top(v);
    if t_in < -w {
        return grid;
    }
    let len = if factors.is_empty() { 1 } else { (t_in + w + 1) as usize };
    let coeffs = binomial_product_q(factors, len);
    let jmax_all = coeffs.len() as i64 - 1;
    for (p_in, vec) in inner.expand(v, -w) {
        for (t, c) in &vec {
            let lo_out = -w - (p_in + w).min(jmax_all);
            for (p_out, v2) in outer.expand(t, lo_out) {
                let jlo = 0.max(p_in - w).max(-w - p_out);
                let jhi = (p_in + w).min(w - p_out).min(jmax_all);
                for j in jlo..=jhi {
                    let cj = coeffs[j as usize];
                    if cj.is_zero() {
                        continue;
                    }
                    let (a_out, a_in) = (p_out + j, p_in - j);
                    let key = if outer_first { (a_out, a_in) } else { (a_in, a_out) };
                    let slot = grid.entry(key).or_default();
                    crate::fock::fv_axpy(slot, &(cj * c), &v2);
                }
            }
        }
    }
    grid.retain(|_, v| !v.is_empty());
    grid
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;

    #[test]
    fn binomials() {
        assert_eq!(binomial_coeffs(&Q::zero(), 4), vec![Q::one(), Q::zero(), Q::zero(), Q::zero()]);
        assert_eq!(binomial_coeffs(&q(2, 1), 5), vec![q(1, 1), q(-2, 1), q(1, 1), q(0, 1), q(0, 1)]);
        let neg: Vec<Q> = (0..6).map(|n| q(n + 1, 1)).collect();
        assert_eq!(binomial_coeffs(&q(-2, 1), 6), neg);
    }

    #[test]
    fn principal_a1_product() {
        // (1 − x)²(1 + x)^{−2} = 1 + Σ (−1)^n 4n x^n
        let prod = binomial_product(&[(q(2, 1), CycScalar::one()), (q(-2, 1), CycScalar::int(-1))], Direction::Z1OverZ2, 8);
        for (n, c) in prod.iter().enumerate() {
            let want = if n == 0 { 1 } else { (if n % 2 == 0 { 4 } else { -4 }) * n as i64 };
            assert_eq!(*c, CycScalar::int(want));
        }
    }

    #[test]
    fn delta_absorbs_ratio() {
        let mut c = BTreeMap::new();
        c.insert((1, -1), CycScalar::one());
        let f = Bivar::new(c, Support::AtMost(1)).unwrap();
        let one = Bivar::new([((0, 0), CycScalar::one())].into_iter().collect(), Support::AtMost(0)).unwrap();
        assert_eq!(delta_mul(&CycScalar::one(), &f, 6).unwrap(), delta_mul(&CycScalar::one(), &one, 6).unwrap());
    }

    #[test]
    fn support_violation() {
        let c: BTreeMap<_, _> = [((3, 0), CycScalar::one())].into_iter().collect();
        assert!(Bivar::new(c, Support::AtMost(2)).is_err());
    }

    #[test]
    fn zero_level_dressing() {
        assert!(matches!(Dressing::new(Sign::Plus, vec![Q::one()], 1, Q::zero()), Err(Error::ZeroLevel)));
    }
}
