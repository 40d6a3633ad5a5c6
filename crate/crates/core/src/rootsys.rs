//! Simply-laced root systems, lattices with a 2-cocycle, and the Chevalley
//! basis of the finite-dimensional Lie algebra built from them.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::CycScalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Kind {
    A,
    D,
    E,
}

/// An ADE type such as `A2` or `E6`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CartanType {
    pub kind: Kind,
    pub rank: usize,
}

impl CartanType {
    pub fn new(kind: Kind, rank: usize) -> Result<Self> {
        let ok = match kind {
            Kind::A => rank >= 1,
            Kind::D => rank >= 4,
            Kind::E => (6..=8).contains(&rank),
        };
        if ok {
            Ok(CartanType { kind, rank })
        } else {
            Err(Error::InvalidType(format!("{kind:?}{rank}")))
        }
    }

    /// Edges of the Dynkin diagram, 0-based (Bourbaki numbering).
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.rank;
        match self.kind {
            Kind::A => (0..n - 1).map(|i| (i, i + 1)).collect(),
            Kind::D => {
                let mut e: Vec<_> = (0..n - 2).map(|i| (i, i + 1)).collect();
                e.push((n - 3, n - 1));
                e
            }
            Kind::E => {
                let mut e = vec![(0, 2), (2, 3), (1, 3)];
                e.extend((3..n - 1).map(|i| (i, i + 1)));
                e
            }
        }
    }

    pub fn cartan_matrix(&self) -> Vec<Vec<i64>> {
        let n = self.rank;
        let mut c = vec![vec![0i64; n]; n];
        for (i, row) in c.iter_mut().enumerate() {
            row[i] = 2;
        }
        for (i, j) in self.edges() {
            c[i][j] = -1;
            c[j][i] = -1;
        }
        c
    }
}

impl fmt::Display for CartanType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}{}", self.kind, self.rank)
    }
}

impl FromStr for CartanType {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidType(s.to_string());
        let mut chars = s.chars();
        let kind = match chars.next().map(|c| c.to_ascii_uppercase()) {
            Some('A') => Kind::A,
            Some('D') => Kind::D,
            Some('E') => Kind::E,
            _ => return Err(bad()),
        };
        let rank: usize = chars.as_str().parse().map_err(|_| bad())?;
        CartanType::new(kind, rank)
    }
}

/// Integer vector in a fixed lattice basis.
pub type LatticeVector = Vec<i64>;

pub fn vadd(a: &[i64], b: &[i64]) -> LatticeVector {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn vsub(a: &[i64], b: &[i64]) -> LatticeVector {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn vneg(a: &[i64]) -> LatticeVector {
    a.iter().map(|x| -x).collect()
}

pub fn vscale(c: i64, a: &[i64]) -> LatticeVector {
    a.iter().map(|x| c * x).collect()
}

/// Bimultiplicative ±1-valued cocycle ε(a, b) = (-1)^{aᵀ E b} on a lattice.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cocycle {
    pub base_matrix: Vec<Vec<u8>>,
}

impl Cocycle {
    /// Standard construction from an even Gram matrix: the diagonal carries
    /// (b_i, b_i)/2, the strict lower triangle carries (b_i, b_j), the upper is trivial.
    pub fn from_gram(gram: &[Vec<i64>]) -> Self {
        let n = gram.len();
        let mut e = vec![vec![0u8; n]; n];
        for i in 0..n {
            e[i][i] = (gram[i][i] / 2).rem_euclid(2) as u8;
            for j in 0..i {
                e[i][j] = gram[i][j].rem_euclid(2) as u8;
            }
        }
        Cocycle { base_matrix: e }
    }

    pub fn eval(&self, a: &[i64], b: &[i64]) -> i64 {
        let mut parity = 0i64;
        for (i, &ai) in a.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (j, &bj) in b.iter().enumerate() {
                if bj != 0 && self.base_matrix[i][j] == 1 {
                    parity += ai * bj;
                }
            }
        }
        if parity.rem_euclid(2) == 0 {
            1
        } else {
            -1
        }
    }
}

/// Even lattice given by its Gram matrix, together with a cocycle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lattice {
    pub gram: Vec<Vec<i64>>,
    pub cocycle: Cocycle,
}

impl Lattice {
    pub fn new(gram: Vec<Vec<i64>>) -> Self {
        let cocycle = Cocycle::from_gram(&gram);
        Lattice { gram, cocycle }
    }

    pub fn dim(&self) -> usize {
        self.gram.len()
    }

    pub fn form(&self, a: &[i64], b: &[i64]) -> i64 {
        let mut s = 0;
        for (i, &ai) in a.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (j, &bj) in b.iter().enumerate() {
                s += ai * self.gram[i][j] * bj;
            }
        }
        s
    }

    pub fn eps(&self, a: &[i64], b: &[i64]) -> i64 {
        self.cocycle.eval(a, b)
    }

    /// Γ = Q̊ ⊕ ⟨δ_1..δ_N⟩ ⊕ ⟨d_1..d_N⟩ with (δ_i, d_j) = δ_ij and all other
    /// cross terms zero. Coordinates: simple roots, then δ_i, then d_i.
    pub fn extended(cartan: &[Vec<i64>], n: usize) -> Self {
        let l = cartan.len();
        let dim = l + 2 * n;
        let mut g = vec![vec![0i64; dim]; dim];
        for i in 0..l {
            g[i][..l].copy_from_slice(&cartan[i]);
        }
        for i in 0..n {
            g[l + i][l + n + i] = 1;
            g[l + n + i][l + i] = 1;
        }
        Lattice::new(g)
    }
}

/// Root system of an ADE type; roots are given in simple-root coordinates.
#[derive(Debug, Clone)]
pub struct RootSystem {
    pub ctype: CartanType,
    pub cartan: Vec<Vec<i64>>,
    /// Positive roots by increasing height, then their negatives in the same order.
    pub roots: Vec<LatticeVector>,
    pub lattice: Lattice,
    index: HashMap<LatticeVector, usize>,
}

impl RootSystem {
    pub fn new(ctype: CartanType) -> Self {
        let cartan = ctype.cartan_matrix();
        let l = ctype.rank;
        // Closure of the simple roots under simple reflections.
        let mut seen: BTreeSet<LatticeVector> = BTreeSet::new();
        let mut stack: Vec<LatticeVector> = (0..l)
            .map(|i| {
                let mut v = vec![0; l];
                v[i] = 1;
                v
            })
            .collect();
        while let Some(v) = stack.pop() {
            if !seen.insert(v.clone()) {
                continue;
            }
            for i in 0..l {
                let pairing: i64 = (0..l).map(|j| cartan[i][j] * v[j]).sum();
                let mut w = v.clone();
                w[i] -= pairing;
                if !seen.contains(&w) {
                    stack.push(w);
                }
            }
        }
        let mut pos: Vec<LatticeVector> = seen.into_iter().filter(|v| v.iter().all(|&c| c >= 0)).collect();
        pos.sort_by(|a, b| {
            let ha: i64 = a.iter().sum();
            let hb: i64 = b.iter().sum();
            ha.cmp(&hb).then_with(|| b.cmp(a))
        });
        let mut roots = pos.clone();
        roots.extend(pos.iter().map(|v| vneg(v)));
        let index = roots.iter().enumerate().map(|(i, r)| (r.clone(), i)).collect();
        let lattice = Lattice::new(cartan.clone());
        RootSystem { ctype, cartan, roots, lattice, index }
    }

    pub fn build(kind: Kind, rank: usize) -> Result<Self> {
        Ok(Self::new(CartanType::new(kind, rank)?))
    }

    pub fn rank(&self) -> usize {
        self.ctype.rank
    }

    pub fn num_roots(&self) -> usize {
        self.roots.len()
    }

    pub fn num_positive(&self) -> usize {
        self.roots.len() / 2
    }

    pub fn root_index(&self, v: &[i64]) -> Option<usize> {
        self.index.get(v).copied()
    }

    pub fn neg_index(&self, i: usize) -> usize {
        let p = self.num_positive();
        if i < p {
            i + p
        } else {
            i - p
        }
    }

    pub fn simple_index(&self, i: usize) -> usize {
        let mut v = vec![0; self.rank()];
        v[i] = 1;
        self.root_index(&v).expect("simple root")
    }

    pub fn height(&self, i: usize) -> i64 {
        self.roots[i].iter().sum()
    }

    pub fn form(&self, a: &[i64], b: &[i64]) -> i64 {
        self.lattice.form(a, b)
    }

    pub fn eps(&self, a: &[i64], b: &[i64]) -> i64 {
        self.lattice.eps(a, b)
    }

    pub fn highest_root(&self) -> usize {
        self.num_positive() - 1
    }
}

/// Chevalley basis of G: x_α for α ∈ Φ (in root order) followed by the simple
/// coroots h_1..h_ℓ, which the form identifies with the simple roots.
#[derive(Debug, Clone)]
pub struct Chevalley {
    pub rs: RootSystem,
    /// Integer structure constants: table[a][b] = [a, b] as (index, coeff) list.
    table: Vec<Vec<Vec<(usize, i64)>>>,
}

/// Dense element of G in the Chevalley basis.
pub type GVec = Vec<CycScalar>;

impl Chevalley {
    pub fn new(rs: RootSystem) -> Self {
        let nr = rs.num_roots();
        let l = rs.rank();
        let dim = nr + l;
        let mut table = vec![vec![Vec::new(); dim]; dim];
        for a in 0..dim {
            for b in 0..dim {
                table[a][b] = Self::basis_bracket(&rs, a, b);
            }
        }
        Chevalley { rs, table }
    }

    pub fn from_type(ctype: CartanType) -> Self {
        Self::new(RootSystem::new(ctype))
    }

    fn basis_bracket(rs: &RootSystem, a: usize, b: usize) -> Vec<(usize, i64)> {
        let nr = rs.num_roots();
        match (a < nr, b < nr) {
            (true, true) => {
                let (ra, rb) = (&rs.roots[a], &rs.roots[b]);
                let sum = vadd(ra, rb);
                if sum.iter().all(|&c| c == 0) {
                    let e = rs.eps(ra, rb);
                    ra.iter().enumerate().filter(|(_, &c)| c != 0).map(|(i, &c)| (nr + i, e * c)).collect()
                } else if let Some(k) = rs.root_index(&sum) {
                    vec![(k, rs.eps(ra, rb))]
                } else {
                    Vec::new()
                }
            }
            (false, true) => {
                let i = a - nr;
                let p: i64 = (0..rs.rank()).map(|j| rs.cartan[i][j] * rs.roots[b][j]).sum();
                if p == 0 {
                    Vec::new()
                } else {
                    vec![(b, p)]
                }
            }
            (true, false) => Self::basis_bracket(rs, b, a).into_iter().map(|(k, c)| (k, -c)).collect(),
            (false, false) => Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.rs.num_roots() + self.rs.rank()
    }

    pub fn num_roots(&self) -> usize {
        self.rs.num_roots()
    }

    pub fn rank(&self) -> usize {
        self.rs.rank()
    }

    pub fn is_root(&self, a: usize) -> bool {
        a < self.num_roots()
    }

    pub fn cartan_index(&self, i: usize) -> usize {
        self.num_roots() + i
    }

    /// Weight of a basis vector in simple-root coordinates (zero for Cartan).
    pub fn weight(&self, a: usize) -> LatticeVector {
        if self.is_root(a) {
            self.rs.roots[a].clone()
        } else {
            vec![0; self.rank()]
        }
    }

    pub fn basis_bracket_terms(&self, a: usize, b: usize) -> &[(usize, i64)] {
        &self.table[a][b]
    }

    /// Invariant form on basis vectors: ⟨x_α, x_{-α}⟩ = -1, ⟨h_i, h_j⟩ = (α_i, α_j).
    pub fn basis_form(&self, a: usize, b: usize) -> i64 {
        let nr = self.num_roots();
        match (a < nr, b < nr) {
            (true, true) => {
                if self.rs.neg_index(a) == b {
                    -1
                } else {
                    0
                }
            }
            (false, false) => self.rs.cartan[a - nr][b - nr],
            _ => 0,
        }
    }

    pub fn zero(&self) -> GVec {
        vec![CycScalar::zero(); self.dim()]
    }

    pub fn unit(&self, a: usize) -> GVec {
        let mut v = self.zero();
        v[a] = CycScalar::one();
        v
    }

    /// Cartan element h_α = Σ c_i h_i for α = Σ c_i α_i.
    pub fn coroot(&self, alpha: &[i64]) -> GVec {
        let mut v = self.zero();
        for (i, &c) in alpha.iter().enumerate() {
            v[self.cartan_index(i)] = CycScalar::int(c);
        }
        v
    }

    pub fn bracket(&self, x: &GVec, y: &GVec) -> GVec {
        let mut out = self.zero();
        for (a, xa) in x.iter().enumerate() {
            if xa.is_zero() {
                continue;
            }
            for (b, yb) in y.iter().enumerate() {
                if yb.is_zero() {
                    continue;
                }
                let c = xa * yb;
                for &(k, s) in &self.table[a][b] {
                    out[k] += &c.scale(&crate::scalar::qi(s));
                }
            }
        }
        out
    }

    pub fn form(&self, x: &GVec, y: &GVec) -> CycScalar {
        let mut s = CycScalar::zero();
        for (a, xa) in x.iter().enumerate() {
            if xa.is_zero() {
                continue;
            }
            for (b, yb) in y.iter().enumerate() {
                let f = self.basis_form(a, b);
                if f != 0 && !yb.is_zero() {
                    s += &(xa * yb).scale(&crate::scalar::qi(f));
                }
            }
        }
        s
    }

    pub fn symbol(&self, a: usize) -> String {
        if self.is_root(a) {
            format!("x{:?}", self.rs.roots[a])
        } else {
            format!("h{}", a - self.num_roots() + 1)
        }
    }
}

pub fn gadd(x: &GVec, y: &GVec) -> GVec {
    x.iter().zip(y).map(|(a, b)| a + b).collect()
}

pub fn gscale(c: &CycScalar, x: &GVec) -> GVec {
    x.iter().map(|a| if a.is_zero() { a.clone() } else { c * a }).collect()
}

pub fn gis_zero(x: &GVec) -> bool {
    x.iter().all(|a| a.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force_roots(cartan: &[Vec<i64>]) -> usize {
        let l = cartan.len();
        let lat = Lattice::new(cartan.to_vec());
        let mut count = 0;
        let mut v = vec![-3i64; l];
        loop {
            if lat.form(&v, &v) == 2 {
                count += 1;
            }
            let mut i = 0;
            while i < l && v[i] == 3 {
                v[i] = -3;
                i += 1;
            }
            if i == l {
                break;
            }
            v[i] += 1;
        }
        count
    }

    #[test]
    fn root_counts_match_enumeration() {
        for (k, r, n) in [(Kind::A, 1, 2), (Kind::A, 2, 6), (Kind::A, 3, 12), (Kind::D, 4, 24)] {
            let rs = RootSystem::build(k, r).unwrap();
            assert_eq!(rs.num_roots(), n);
            assert_eq!(brute_force_roots(&rs.cartan), n);
        }
        assert_eq!(RootSystem::build(Kind::E, 6).unwrap().num_roots(), 72);
        assert_eq!(RootSystem::build(Kind::E, 8).unwrap().num_roots(), 240);
    }

    #[test]
    fn invalid_types_are_rejected() {
        assert!(CartanType::new(Kind::D, 3).is_err());
        assert!(CartanType::new(Kind::E, 9).is_err());
        assert!("B2".parse::<CartanType>().is_err());
        assert_eq!("D5".parse::<CartanType>().unwrap(), CartanType { kind: Kind::D, rank: 5 });
    }

    #[test]
    fn cocycle_on_roots() {
        let rs = RootSystem::build(Kind::A, 2).unwrap();
        for r in &rs.roots {
            assert_eq!(rs.eps(r, r), -1);
            assert_eq!(rs.eps(r, &vneg(r)), -1);
            assert_eq!(rs.eps(&[0, 0], r), 1);
        }
    }

    #[test]
    fn null_extension_is_trivial_against_roots() {
        let rs = RootSystem::build(Kind::A, 2).unwrap();
        let lat = Lattice::extended(&rs.cartan, 2);
        for r in &rs.roots {
            let mut a = r.clone();
            a.extend([0; 4]);
            for i in 0..2 {
                let mut d = vec![0; 6];
                d[2 + i] = 1;
                assert_eq!(lat.eps(&a, &d), 1);
                assert_eq!(lat.form(&a, &d), 0);
            }
        }
    }

    #[test]
    fn chevalley_relations() {
        let g = Chevalley::from_type("A2".parse().unwrap());
        let a = g.rs.simple_index(0);
        let na = g.rs.neg_index(a);
        let br = g.bracket(&g.unit(a), &g.unit(na));
        assert_eq!(br, gscale(&CycScalar::int(-1), &g.coroot(&g.rs.roots[a])));
        let h = g.unit(g.cartan_index(0));
        assert_eq!(g.bracket(&h, &g.unit(a)), gscale(&CycScalar::int(2), &g.unit(a)));
        assert!(gis_zero(&g.bracket(&g.unit(a), &g.unit(a))));
    }

    #[test]
    fn form_normalization_from_invariance() {
        // ⟨[x_α, x_{-α}], h_α⟩ = ⟨x_α, [x_{-α}, h_α]⟩ = 2⟨x_α, x_{-α}⟩ and the
        // left side is -(α, α) = -2, so ⟨x_α, x_{-α}⟩ = -1.
        let g = Chevalley::from_type("A1".parse().unwrap());
        let (xa, xna, h) = (g.unit(0), g.unit(1), g.unit(2));
        let lhs = g.form(&g.bracket(&xa, &xna), &h);
        let inner = g.bracket(&xna, &h);
        assert_eq!(inner, gscale(&CycScalar::int(2), &xna));
        let solved = &lhs / &CycScalar::int(2);
        assert_eq!(solved, CycScalar::int(-1));
        assert_eq!(g.form(&xa, &xna), solved);
        assert_eq!(g.form(&h, &h), CycScalar::int(2));
    }

    #[test]
    fn jacobi_on_a2_basis() {
        let g = Chevalley::from_type("A2".parse().unwrap());
        let n = g.dim();
        for a in 0..n {
            for b in 0..n {
                let (x, y) = (g.unit(a), g.unit(b));
                assert_eq!(g.bracket(&x, &y), gscale(&CycScalar::int(-1), &g.bracket(&y, &x)));
                for c in 0..n {
                    let z = g.unit(c);
                    let j1 = g.bracket(&x, &g.bracket(&y, &z));
                    let j2 = g.bracket(&y, &g.bracket(&z, &x));
                    let j3 = g.bracket(&z, &g.bracket(&x, &y));
                    assert!(gis_zero(&gadd(&gadd(&j1, &j2), &j3)));
                }
            }
        }
    }
}
