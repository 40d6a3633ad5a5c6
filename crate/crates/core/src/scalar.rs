//! Exact arithmetic in the cyclotomic field Q(ζ_M).
//!
//! An element is stored as a residue modulo the M-th cyclotomic polynomial
//! Φ_M, i.e. as φ(M) rational coefficients on the power basis
//! 1, ζ, …, ζ^{φ(M)-1}. Elements that happen to be rational are always
//! stored at order 1 so mixing rationals with any field is free.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::rc::Rc;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Exact rational used for every coefficient.
pub type Q = Ratio<i128>;

pub(crate) fn qadd(a: &Q, b: &Q) -> Q {
    a.checked_add(b).expect("rational overflow in addition")
}

pub(crate) fn qsub(a: &Q, b: &Q) -> Q {
    a.checked_sub(b).expect("rational overflow in subtraction")
}

pub(crate) fn qmul(a: &Q, b: &Q) -> Q {
    a.checked_mul(b).expect("rational overflow in multiplication")
}

pub fn q(n: i128, d: i128) -> Q {
    Q::new(n, d)
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(n as i128)
}

/// Euler's totient.
pub fn totient(n: u32) -> usize {
    let mut result = n as u64;
    let mut k = n as u64;
    let mut p = 2u64;
    while p * p <= k {
        if k % p == 0 {
            while k % p == 0 {
                k /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if k > 1 {
        result -= result / k;
    }
    result as usize
}

thread_local! {
    static CYCLOTOMIC: RefCell<HashMap<u32, Rc<Vec<i128>>>> = RefCell::new(HashMap::new());
}

/// Integer coefficients of Φ_M, lowest degree first (monic).
pub fn cyclotomic_polynomial(order: u32) -> Rc<Vec<i128>> {
    if let Some(p) = CYCLOTOMIC.with(|c| c.borrow().get(&order).cloned()) {
        return p;
    }
    // x^M - 1 divided by Φ_d for every proper divisor d.
    let mut poly = vec![0i128; order as usize + 1];
    poly[0] = -1;
    poly[order as usize] = 1;
    for d in 1..order {
        if order % d == 0 {
            let div = cyclotomic_polynomial(d);
            poly = exact_div(&poly, &div);
        }
    }
    let rc = Rc::new(poly);
    CYCLOTOMIC.with(|c| c.borrow_mut().insert(order, rc.clone()));
    rc
}

fn exact_div(num: &[i128], den: &[i128]) -> Vec<i128> {
    let mut rem = num.to_vec();
    let dn = den.len() - 1;
    let lead = den[dn];
    let mut quot = vec![0i128; rem.len() - dn];
    for i in (0..quot.len()).rev() {
        let c = rem[i + dn] / lead;
        quot[i] = c;
        for j in 0..=dn {
            rem[i + j] -= c * den[j];
        }
    }
    debug_assert!(rem.iter().all(|&c| c == 0));
    quot
}

/// Element of Q(ζ_M).
#[derive(Clone)]
pub struct CycScalar {
    order: u32,
    coeffs: Vec<Q>,
}

impl CycScalar {
    pub fn zero() -> Self {
        Self::rational(Q::zero())
    }

    pub fn one() -> Self {
        Self::rational(Q::one())
    }

    pub fn rational(c: Q) -> Self {
        CycScalar { order: 1, coeffs: vec![c] }
    }

    pub fn int(n: i64) -> Self {
        Self::rational(qi(n))
    }

    pub fn frac(n: i64, d: i64) -> Self {
        Self::rational(q(n as i128, d as i128))
    }

    /// ζ_M^p in canonical form.
    pub fn root_of_unity(order: u32, p: i64) -> Self {
        assert!(order >= 1, "order must be positive");
        let e = p.rem_euclid(order as i64) as usize;
        let mut poly = vec![Q::zero(); e + 1];
        poly[e] = Q::one();
        Self::from_poly(order, poly)
    }

    /// Builds an element from an arbitrary-length polynomial in ζ_M.
    pub fn from_poly(order: u32, mut poly: Vec<Q>) -> Self {
        let phi = cyclotomic_polynomial(order);
        let deg = phi.len() - 1;
        // Reduce modulo the monic Φ_M.
        if poly.len() > deg {
            for i in (deg..poly.len()).rev() {
                let c = poly[i];
                if c.is_zero() {
                    continue;
                }
                for (j, &pj) in phi.iter().enumerate().take(deg) {
                    if pj != 0 {
                        let t = qmul(&c, &Q::from_integer(pj));
                        poly[i - deg + j] = qsub(&poly[i - deg + j], &t);
                    }
                }
                poly[i] = Q::zero();
            }
        }
        poly.resize(deg, Q::zero());
        Self::normalized(order, poly)
    }

    fn normalized(order: u32, coeffs: Vec<Q>) -> Self {
        if coeffs.iter().skip(1).all(Zero::is_zero) {
            let c = coeffs.first().cloned().unwrap_or_else(Q::zero);
            return CycScalar { order: 1, coeffs: vec![c] };
        }
        CycScalar { order, coeffs }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.as_rational().map(|c| c.is_one()).unwrap_or(false)
    }

    pub fn as_rational(&self) -> Option<Q> {
        if self.order == 1 {
            Some(self.coeffs[0])
        } else {
            None
        }
    }

    /// Re-expresses the element in Q(ζ_target); requires order | target.
    pub fn embed(&self, target: u32) -> Self {
        let coeffs = self.coeffs_at(target);
        Self::normalized(target, coeffs)
    }

    /// Power-basis coefficients of the element inside Q(ζ_target).
    fn coeffs_at(&self, target: u32) -> Vec<Q> {
        assert!(target % self.order == 0, "cannot embed order {} into {}", self.order, target);
        if self.order == target {
            return self.coeffs.clone();
        }
        if self.order == 1 {
            let mut v = vec![Q::zero(); totient(target)];
            v[0] = self.coeffs[0];
            return v;
        }
        let step = (target / self.order) as usize;
        let mut poly = vec![Q::zero(); (self.coeffs.len() - 1) * step + 1];
        for (j, c) in self.coeffs.iter().enumerate() {
            poly[j * step] = *c;
        }
        let e = Self::from_poly(target, poly);
        if e.order == target {
            e.coeffs
        } else {
            e.coeffs_at(target)
        }
    }

    fn common(a: &Self, b: &Self) -> (Vec<Q>, Vec<Q>, u32) {
        let ord = a.order.lcm(&b.order);
        (a.coeffs_at(ord), b.coeffs_at(ord), ord)
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        CycScalar { order: self.order, coeffs: self.coeffs.iter().map(|x| qmul(x, c)).collect() }
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if let Some(c) = self.as_rational() {
            return Ok(Self::rational(c.recip()));
        }
        // Solve a·b = 1 through the multiplication matrix of a.
        let n = self.coeffs.len();
        let mut cols = Vec::with_capacity(n);
        for j in 0..n {
            let basis = Self::root_of_unity(self.order, j as i64);
            cols.push((self * &basis).coeffs_at(self.order));
        }
        // Augmented system rows: sum_j cols[j][i] b_j = [i == 0]
        let mut rows: Vec<Vec<Q>> = (0..n)
            .map(|i| {
                let mut r: Vec<Q> = (0..n).map(|j| cols[j][i]).collect();
                r.push(if i == 0 { Q::one() } else { Q::zero() });
                r
            })
            .collect();
        for c in 0..n {
            let p = (c..n).find(|&r| !rows[r][c].is_zero()).expect("field element is invertible");
            rows.swap(c, p);
            let piv = rows[c][c].recip();
            for x in rows[c].iter_mut() {
                *x = qmul(x, &piv);
            }
            for r in 0..n {
                if r != c && !rows[r][c].is_zero() {
                    let f = rows[r][c];
                    for k in c..=n {
                        let t = qmul(&f, &rows[c][k]);
                        rows[r][k] = qsub(&rows[r][k], &t);
                    }
                }
            }
        }
        let coeffs = rows.iter().map(|r| r[n]).collect();
        Ok(Self::normalized(self.order, coeffs))
    }

    pub fn pow(&self, e: i64) -> Self {
        if e < 0 {
            return self.inv().expect("negative power of zero").pow(-e);
        }
        let mut result = Self::one();
        let mut base = self.clone();
        let mut e = e as u64;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        result
    }

    /// Complex value under ζ_M ↦ exp(2πi/M). Used only by tests.
    pub fn to_complex(&self) -> (f64, f64) {
        let mut re = 0.0;
        let mut im = 0.0;
        for (j, c) in self.coeffs.iter().enumerate() {
            let v = *c.numer() as f64 / *c.denom() as f64;
            let ang = 2.0 * std::f64::consts::PI * j as f64 / self.order as f64;
            re += v * ang.cos();
            im += v * ang.sin();
        }
        (re, im)
    }

    /// Square root of a rational, if it lies in Q(i).
    pub fn sqrt_rational(c: &Q) -> Option<Self> {
        fn isqrt(n: i128) -> Option<i128> {
            if n < 0 {
                return None;
            }
            let r = (n as f64).sqrt().round() as i128;
            (r - 1..=r + 1).find(|&s| s >= 0 && s * s == n)
        }
        let (n, d) = (*c.numer(), *c.denom());
        let sd = isqrt(d)?;
        if n >= 0 {
            Some(Self::rational(Q::new(isqrt(n)?, sd)))
        } else {
            let sn = isqrt(-n)?;
            Some(Self::root_of_unity(4, 1).scale(&Q::new(sn, sd)))
        }
    }
}

impl PartialEq for CycScalar {
    fn eq(&self, other: &Self) -> bool {
        if self.order == other.order {
            return self.coeffs == other.coeffs;
        }
        let (a, b, _) = Self::common(self, other);
        a == b
    }
}

impl Eq for CycScalar {}

impl Default for CycScalar {
    fn default() -> Self {
        Self::zero()
    }
}

impl From<i64> for CycScalar {
    fn from(n: i64) -> Self {
        Self::int(n)
    }
}

impl From<Q> for CycScalar {
    fn from(c: Q) -> Self {
        Self::rational(c)
    }
}

impl<'a> Add<&'a CycScalar> for &'a CycScalar {
    type Output = CycScalar;
    fn add(self, rhs: &CycScalar) -> CycScalar {
        if self.order == 1 && rhs.order == 1 {
            return CycScalar::rational(qadd(&self.coeffs[0], &rhs.coeffs[0]));
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return rhs.clone();
        }
        let (a, b, ord) = CycScalar::common(self, rhs);
        let coeffs = a.iter().zip(b.iter()).map(|(x, y)| qadd(x, y)).collect();
        CycScalar::normalized(ord, coeffs)
    }
}

impl<'a> Mul<&'a CycScalar> for &'a CycScalar {
    type Output = CycScalar;
    fn mul(self, rhs: &CycScalar) -> CycScalar {
        if let Some(c) = rhs.as_rational() {
            return self.scale(&c);
        }
        if let Some(c) = self.as_rational() {
            return rhs.scale(&c);
        }
        let (a, b, ord) = CycScalar::common(self, rhs);
        let mut poly = vec![Q::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if !y.is_zero() {
                    poly[i + j] = qadd(&poly[i + j], &qmul(x, y));
                }
            }
        }
        CycScalar::from_poly(ord, poly)
    }
}

impl<'a> Sub<&'a CycScalar> for &'a CycScalar {
    type Output = CycScalar;
    fn sub(self, rhs: &CycScalar) -> CycScalar {
        self + &(-rhs)
    }
}

impl<'a> Neg for &'a CycScalar {
    type Output = CycScalar;
    fn neg(self) -> CycScalar {
        CycScalar { order: self.order, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Neg for CycScalar {
    type Output = CycScalar;
    fn neg(self) -> CycScalar {
        -&self
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident) => {
        impl $tr<CycScalar> for CycScalar {
            type Output = CycScalar;
            fn $m(self, rhs: CycScalar) -> CycScalar {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a CycScalar> for CycScalar {
            type Output = CycScalar;
            fn $m(self, rhs: &CycScalar) -> CycScalar {
                (&self).$m(rhs)
            }
        }
    };
}
forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl<'a> Div<&'a CycScalar> for &'a CycScalar {
    type Output = CycScalar;
    fn div(self, rhs: &CycScalar) -> CycScalar {
        self * &rhs.inv().expect("division by zero")
    }
}

impl AddAssign<&CycScalar> for CycScalar {
    fn add_assign(&mut self, rhs: &CycScalar) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&CycScalar> for CycScalar {
    fn sub_assign(&mut self, rhs: &CycScalar) {
        *self = &*self - rhs;
    }
}

impl MulAssign<&CycScalar> for CycScalar {
    fn mul_assign(&mut self, rhs: &CycScalar) {
        *self = &*self * rhs;
    }
}

fn fmt_q(c: &Q) -> String {
    if c.denom().is_one() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

fn parse_q(s: &str) -> std::result::Result<Q, String> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: i128 = n.trim().parse().map_err(|e| format!("bad numerator in {s:?}: {e}"))?;
            let d: i128 = d.trim().parse().map_err(|e| format!("bad denominator in {s:?}: {e}"))?;
            if d == 0 {
                return Err(format!("zero denominator in {s:?}"));
            }
            Ok(Q::new(n, d))
        }
        None => s.parse::<i128>().map(Q::from_integer).map_err(|e| format!("bad rational {s:?}: {e}")),
    }
}

impl fmt::Debug for CycScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for CycScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(c) = self.as_rational() {
            return write!(f, "{}", fmt_q(&c));
        }
        let mut first = true;
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            let mag = fmt_q(&c.abs());
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            match (j, mag.as_str()) {
                (0, _) => write!(f, "{mag}")?,
                (_, "1") => write!(f, "z{}^{}", self.order, j)?,
                _ => write!(f, "{mag}*z{}^{}", self.order, j)?,
            }
        }
        Ok(())
    }
}

/// Parses the display form, e.g. `-1/4*z4^1 + 3`, `z8^3`, `2/3`.
impl std::str::FromStr for CycScalar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: String| Error::Config { key: "scalar".into(), msg };
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(bad("empty scalar".into()));
        }
        let mut terms = Vec::new();
        let mut start = 0;
        let bytes = compact.as_bytes();
        for i in 1..bytes.len() {
            if (bytes[i] == b'+' || bytes[i] == b'-') && bytes[i - 1] != b'^' {
                terms.push(&compact[start..i]);
                start = i;
            }
        }
        terms.push(&compact[start..]);
        let mut acc = CycScalar::zero();
        for t in terms {
            let (neg, body) = match t.as_bytes()[0] {
                b'-' => (true, &t[1..]),
                b'+' => (false, &t[1..]),
                _ => (false, t),
            };
            let (coef, root) = match body.split_once('*') {
                Some((c, z)) => (parse_q(c).map_err(bad)?, Some(z)),
                None if body.starts_with('z') => (Q::one(), Some(body)),
                None => (parse_q(body).map_err(bad)?, None),
            };
            let mut term = CycScalar::rational(if neg { -coef } else { coef });
            if let Some(z) = root {
                let z = z.strip_prefix('z').ok_or_else(|| bad(format!("bad root of unity {z:?}")))?;
                let (m, p) = z.split_once('^').unwrap_or((z, "1"));
                let m: u32 = m.parse().map_err(|_| bad(format!("bad order in {t:?}")))?;
                let p: i64 = p.parse().map_err(|_| bad(format!("bad exponent in {t:?}")))?;
                if m == 0 {
                    return Err(bad("order must be positive".into()));
                }
                term = &term * &CycScalar::root_of_unity(m, p);
            }
            acc = &acc + &term;
        }
        Ok(acc)
    }
}

/// Serializes nested rational vectors as "p/q" strings.
pub fn serialize_q_rows<S: Serializer>(rows: &[Vec<Q>], s: S) -> std::result::Result<S::Ok, S::Error> {
    let v: Vec<Vec<String>> = rows.iter().map(|r| r.iter().map(fmt_q).collect()).collect();
    v.serialize(s)
}

/// Serializes a rational vector as "p/q" strings.
pub fn serialize_q_vec<S: Serializer>(v: &[Q], s: S) -> std::result::Result<S::Ok, S::Error> {
    let v: Vec<String> = v.iter().map(fmt_q).collect();
    v.serialize(s)
}

pub fn q_to_string(c: &Q) -> String {
    fmt_q(c)
}

#[derive(Serialize, Deserialize)]
struct CycScalarRepr {
    order: u32,
    coeffs: Vec<String>,
}

impl Serialize for CycScalar {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CycScalarRepr { order: self.order, coeffs: self.coeffs.iter().map(fmt_q).collect() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for CycScalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = CycScalarRepr::deserialize(d)?;
        if repr.order == 0 {
            return Err(serde::de::Error::custom("order must be positive"));
        }
        let coeffs = repr.coeffs.iter().map(|s| parse_q(s)).collect::<std::result::Result<Vec<_>, _>>();
        let coeffs = coeffs.map_err(serde::de::Error::custom)?;
        Ok(CycScalar::from_poly(repr.order, coeffs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn approx(a: &CycScalar, b: &CycScalar) -> bool {
        let (x, y) = (a.to_complex(), b.to_complex());
        (x.0 - y.0).abs() < 1e-12 && (x.1 - y.1).abs() < 1e-12
    }

    #[test]
    fn display_parses_back() {
        let i4 = CycScalar::root_of_unity(4, 1);
        for x in [CycScalar::frac(-1, 4), &i4 * &CycScalar::frac(1, 4), &CycScalar::root_of_unity(8, 3) - &CycScalar::int(2)] {
            let back: CycScalar = x.to_string().parse().unwrap();
            assert_eq!(back, x);
        }
        assert!("1/0".parse::<CycScalar>().is_err());
        assert!("z0^1".parse::<CycScalar>().is_err());
    }

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(*cyclotomic_polynomial(1), vec![-1, 1]);
        assert_eq!(*cyclotomic_polynomial(4), vec![1, 0, 1]);
        assert_eq!(*cyclotomic_polynomial(6), vec![1, -1, 1]);
        assert_eq!(*cyclotomic_polynomial(12), vec![1, 0, -1, 0, 1]);
        for n in 1..40 {
            assert_eq!(cyclotomic_polynomial(n).len() - 1, totient(n));
        }
    }

    #[test]
    fn i_squared_is_minus_one() {
        let i = CycScalar::root_of_unity(4, 1);
        assert_eq!(&i * &i, CycScalar::int(-1));
    }

    #[test]
    fn root_to_its_order_is_one() {
        for m in 1..13 {
            assert!(CycScalar::root_of_unity(m, m as i64).is_one());
            assert!(CycScalar::root_of_unity(m, 1).pow(m as i64).is_one());
        }
    }

    #[test]
    fn sum_of_all_roots_vanishes() {
        for m in 2..13u32 {
            let mut s = CycScalar::zero();
            for p in 0..m {
                s += &CycScalar::root_of_unity(m, p as i64);
            }
            assert!(s.is_zero(), "m = {m}");
        }
    }

    #[test]
    fn multiplicative_order() {
        use num_integer::Integer;
        for m in 1..13u32 {
            for p in 0..m as i64 {
                let z = CycScalar::root_of_unity(m, p);
                let ord = m / m.gcd(&(p as u32));
                assert!(z.pow(ord as i64).is_one());
                for d in 1..ord {
                    assert!(!z.pow(d as i64).is_one());
                }
            }
        }
    }

    #[test]
    fn embedding_matches_complex_value() {
        let minus_one = CycScalar::root_of_unity(2, 1);
        let emb = minus_one.embed(4);
        assert_eq!(emb, CycScalar::root_of_unity(4, 2));
        let z3 = CycScalar::root_of_unity(3, 1);
        let e = z3.embed(12);
        assert!(approx(&e, &CycScalar::root_of_unity(12, 4)));
        assert_eq!(e, CycScalar::root_of_unity(12, 4));
    }

    #[test]
    fn inverse_and_identity() {
        let a = &CycScalar::root_of_unity(12, 1) + &CycScalar::frac(3, 7);
        let b = a.inv().unwrap();
        assert!((&a * &b).is_one());
        assert_eq!(&a + &CycScalar::zero(), a);
        assert!(matches!(CycScalar::zero().inv(), Err(Error::DivisionByZero)));
    }

    #[test]
    fn mixed_orders_compare_by_value() {
        let a = CycScalar::root_of_unity(3, 1);
        let b = CycScalar::root_of_unity(6, 2);
        assert_eq!(a, b);
        assert_ne!(CycScalar::root_of_unity(6, 1), b);
    }

    #[test]
    fn json_round_trip() {
        let a = &CycScalar::root_of_unity(4, 1).scale(&q(1, 4)) + &CycScalar::frac(-2, 3);
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, r#"{"order":4,"coeffs":["-2/3","1/4"]}"#);
        let b: CycScalar = serde_json::from_str(&s).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn square_roots() {
        let r = CycScalar::sqrt_rational(&q(-1, 16)).unwrap();
        assert_eq!(&r * &r, CycScalar::frac(-1, 16));
        assert!(CycScalar::sqrt_rational(&q(2, 1)).is_none());
    }
}
