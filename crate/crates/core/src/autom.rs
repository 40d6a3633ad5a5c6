//! Finite-order automorphisms of G that preserve the Cartan subalgebra, the
//! affine Cartan data attached to a diagram automorphism, and principal-type
//! automorphisms θ with θH_j = H_j, θE_j = w^{s_j}E_j.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::rootsys::{gadd, gis_zero, gscale, Chevalley, GVec};
use crate::scalar::{q, qi, CycScalar, Q};

/// Linear automorphism given by the images of the Chevalley basis vectors.
#[derive(Debug, Clone)]
pub struct Automorphism {
    /// Order m of the root of unity w = ζ_m used for eigenvalues.
    pub order: u32,
    pub images: Vec<GVec>,
    /// θ x_α = root_coeff[α] x_{root_perm[α]}.
    pub root_perm: Vec<usize>,
    pub root_coeff: Vec<CycScalar>,
}

impl Automorphism {
    pub fn identity(g: &Chevalley) -> Self {
        let images = (0..g.dim()).map(|a| g.unit(a)).collect();
        Self::from_images(g, 1, images).expect("identity is valid")
    }

    pub fn from_images(g: &Chevalley, order: u32, images: Vec<GVec>) -> Result<Self> {
        let nr = g.num_roots();
        let mut root_perm = Vec::with_capacity(nr);
        let mut root_coeff = Vec::with_capacity(nr);
        for (a, img) in images.iter().enumerate() {
            let support: Vec<usize> = (0..g.dim()).filter(|&b| !img[b].is_zero()).collect();
            if a < nr {
                if support.len() != 1 || support[0] >= nr {
                    return Err(Error::InvalidAutomorphism(format!("{} does not map to a root vector", g.symbol(a))));
                }
                root_perm.push(support[0]);
                root_coeff.push(img[support[0]].clone());
            } else if support.iter().any(|&b| b < nr) {
                return Err(Error::InvalidAutomorphism("Cartan subalgebra is not preserved".into()));
            }
        }
        Ok(Automorphism { order, images, root_perm, root_coeff })
    }

    /// Diagram automorphism from a node permutation: x_{±α_i} ↦ x_{±α_σ(i)},
    /// extended to the whole algebra through bracket words.
    pub fn diagram(g: &Chevalley, perm: &[usize]) -> Result<Self> {
        let l = g.rank();
        let mut sorted = perm.to_vec();
        sorted.sort_unstable();
        if perm.len() != l || sorted != (0..l).collect::<Vec<_>>() {
            return Err(Error::InvalidAutomorphism(format!("{perm:?} is not a permutation of the nodes")));
        }
        for i in 0..l {
            for j in 0..l {
                if g.rs.cartan[perm[i]][perm[j]] != g.rs.cartan[i][j] {
                    return Err(Error::InvalidAutomorphism(format!("{perm:?} is not a diagram symmetry")));
                }
            }
        }
        let k = permutation_order(perm);
        let rs = &g.rs;
        let pos: Vec<GVec> = (0..l).map(|i| g.unit(rs.simple_index(perm[i]))).collect();
        let neg: Vec<GVec> = (0..l).map(|i| g.unit(rs.neg_index(rs.simple_index(perm[i])))).collect();
        let images = extend_from_generators(g, &pos, &neg);
        let a = Self::from_images(g, k, images)?;
        a.check_homomorphism(g).map_err(Error::InvalidAutomorphism)?;
        Ok(a)
    }

    /// D(x_α) = w^{Σ c_i(α) weights_i} x_α with w = ζ_m; identity on h.
    pub fn scaling(g: &Chevalley, m: u32, weights: &[i64]) -> Self {
        let images = (0..g.dim())
            .map(|a| {
                let wt = g.weight(a);
                let e: i64 = wt.iter().zip(weights).map(|(c, s)| c * s).sum();
                gscale(&CycScalar::root_of_unity(m, e), &g.unit(a))
            })
            .collect();
        Self::from_images(g, m, images).expect("scaling is diagonal")
    }

    /// self ∘ other.
    pub fn compose(&self, g: &Chevalley, other: &Automorphism, order: u32) -> Self {
        let images = other.images.iter().map(|v| self.apply(v)).collect();
        Self::from_images(g, order, images).expect("composition of automorphisms")
    }

    pub fn apply(&self, x: &GVec) -> GVec {
        let mut out = vec![CycScalar::zero(); x.len()];
        for (a, xa) in x.iter().enumerate() {
            if xa.is_zero() {
                continue;
            }
            for (b, c) in self.images[a].iter().enumerate() {
                if !c.is_zero() {
                    out[b] += &(xa * c);
                }
            }
        }
        out
    }

    pub fn apply_pow(&self, p: i64, x: &GVec) -> GVec {
        let p = p.rem_euclid(self.order as i64);
        let mut y = x.clone();
        for _ in 0..p {
            y = self.apply(&y);
        }
        y
    }

    /// Root index of θ^p β.
    pub fn root_pow(&self, p: i64, beta: usize) -> usize {
        let p = p.rem_euclid(self.order as i64);
        (0..p).fold(beta, |b, _| self.root_perm[b])
    }

    /// η(p, β) with θ^p x_β = η(p, β) x_{θ^p β}.
    pub fn eta(&self, p: i64, beta: usize) -> Result<CycScalar> {
        if beta >= self.root_perm.len() {
            return Err(Error::InvalidAutomorphism(format!("{beta} is not a root index")));
        }
        let p = p.rem_euclid(self.order as i64);
        let mut c = CycScalar::one();
        let mut b = beta;
        for _ in 0..p {
            c = &c * &self.root_coeff[b];
            b = self.root_perm[b];
        }
        Ok(c)
    }

    /// Components x_i with θ x_i = w^i x_i, via x_i = (1/m) Σ_p w^{-ip} θ^p x.
    pub fn eigenspace_decompose(&self, x: &GVec) -> Vec<(u32, GVec)> {
        let m = self.order;
        let powers: Vec<GVec> = (0..m as i64).map(|p| self.apply_pow(p, x)).collect();
        let inv_m = CycScalar::frac(1, m as i64);
        let mut out = Vec::new();
        for i in 0..m {
            let mut comp = vec![CycScalar::zero(); x.len()];
            for (p, y) in powers.iter().enumerate() {
                comp = gadd(&comp, &gscale(&CycScalar::root_of_unity(m, -(i as i64) * p as i64), y));
            }
            let comp = gscale(&inv_m, &comp);
            if !gis_zero(&comp) {
                out.push((i, comp));
            }
        }
        out
    }

    pub fn projector(&self, i: i64, x: &GVec) -> GVec {
        let m = self.order;
        let mut comp = vec![CycScalar::zero(); x.len()];
        for p in 0..m as i64 {
            comp = gadd(&comp, &gscale(&CycScalar::root_of_unity(m, -i * p), &self.apply_pow(p, x)));
        }
        gscale(&CycScalar::frac(1, m as i64), &comp)
    }

    /// Smallest p > 0 with θ^p = id.
    pub fn exact_order(&self, g: &Chevalley) -> u32 {
        let mut imgs: Vec<GVec> = self.images.clone();
        let mut p = 1;
        loop {
            if imgs.iter().enumerate().all(|(a, v)| *v == g.unit(a)) {
                return p;
            }
            imgs = imgs.iter().map(|v| self.apply(v)).collect();
            p += 1;
            assert!(p <= 10_000, "automorphism of unbounded order");
        }
    }

    pub fn check_homomorphism(&self, g: &Chevalley) -> std::result::Result<(), String> {
        for a in 0..g.dim() {
            for b in 0..g.dim() {
                let lhs = self.apply(&g.bracket(&g.unit(a), &g.unit(b)));
                let rhs = g.bracket(&self.images[a], &self.images[b]);
                if lhs != rhs {
                    return Err(format!("bracket not preserved on ({}, {})", g.symbol(a), g.symbol(b)));
                }
            }
        }
        Ok(())
    }

    pub fn check_form(&self, g: &Chevalley) -> std::result::Result<(), String> {
        for a in 0..g.dim() {
            for b in 0..g.dim() {
                if g.form(&self.images[a], &self.images[b]) != CycScalar::int(g.basis_form(a, b)) {
                    return Err(format!("form not preserved on ({}, {})", g.symbol(a), g.symbol(b)));
                }
            }
        }
        Ok(())
    }
}

fn permutation_order(perm: &[usize]) -> u32 {
    let mut cur: Vec<usize> = perm.to_vec();
    let mut k = 1;
    while cur.iter().enumerate().any(|(i, &c)| i != c) {
        cur = cur.iter().map(|&c| perm[c]).collect();
        k += 1;
    }
    k
}

/// Images of the whole Chevalley basis from images of x_{α_i} and x_{-α_i}.
pub fn extend_from_generators(g: &Chevalley, pos: &[GVec], neg: &[GVec]) -> Vec<GVec> {
    let rs = &g.rs;
    let l = g.rank();
    let np = rs.num_positive();
    let mut images: Vec<Option<GVec>> = vec![None; g.dim()];
    for i in 0..l {
        images[rs.simple_index(i)] = Some(pos[i].clone());
        images[rs.neg_index(rs.simple_index(i))] = Some(neg[i].clone());
    }
    // Positive roots come sorted by height, so the shorter word is always known.
    for idx in 0..np {
        if images[idx].is_some() {
            continue;
        }
        let gamma = &rs.roots[idx];
        let (i, beta) = (0..l)
            .find_map(|i| {
                let mut b = gamma.clone();
                b[i] -= 1;
                rs.root_index(&b).map(|bi| (i, bi))
            })
            .expect("non-simple positive root has a simple predecessor");
        let ai = rs.simple_index(i);
        // x_γ = ε(α_i, β)[x_{α_i}, x_β]
        let e = CycScalar::int(rs.eps(&rs.roots[ai], &rs.roots[beta]));
        let img = g.bracket(images[ai].as_ref().unwrap(), images[beta].as_ref().unwrap());
        images[idx] = Some(gscale(&e, &img));
        let (nai, nbeta) = (rs.neg_index(ai), rs.neg_index(beta));
        let e = CycScalar::int(rs.eps(&rs.roots[nai], &rs.roots[nbeta]));
        let img = g.bracket(images[nai].as_ref().unwrap(), images[nbeta].as_ref().unwrap());
        images[rs.neg_index(idx)] = Some(gscale(&e, &img));
    }
    for i in 0..l {
        // h_i = -[x_{α_i}, x_{-α_i}]
        let ai = rs.simple_index(i);
        let img = g.bracket(images[ai].as_ref().unwrap(), images[rs.neg_index(ai)].as_ref().unwrap());
        images[g.cartan_index(i)] = Some(gscale(&CycScalar::int(-1), &img));
    }
    images.into_iter().map(|v| v.unwrap()).collect()
}

/// Marks (right null vector) and comarks (left null vector) of an affine
/// Cartan matrix, each positive with gcd 1.
pub fn affine_marks(cartan: &[Vec<i64>]) -> Result<(Vec<i64>, Vec<i64>)> {
    let right = linalg::integer_nullspace(cartan);
    let n = cartan.len();
    let transpose: Vec<Vec<i64>> = (0..n).map(|j| (0..n).map(|i| cartan[i][j]).collect()).collect();
    let left = linalg::integer_nullspace(&transpose);
    if right.len() != 1 || left.len() != 1 {
        return Err(Error::Corank(right.len()));
    }
    let (a, c) = (right[0].clone(), left[0].clone());
    if a.iter().chain(&c).any(|&x| x <= 0) {
        return Err(Error::InvalidAutomorphism("null vectors are not positive".into()));
    }
    Ok((a, c))
}

/// Affine Cartan data of the fixed-point algebra of a diagram automorphism π.
#[derive(Debug, Clone, Serialize)]
pub struct AffineData {
    pub k: u32,
    /// Node orbits of π; orbit j-1 corresponds to index j.
    pub orbits: Vec<Vec<usize>>,
    pub cartan: Vec<Vec<i64>>,
    pub marks: Vec<i64>,
    pub comarks: Vec<i64>,
    /// ψ_j as vectors in simple-root coordinates of h ≅ h*.
    #[serde(serialize_with = "crate::scalar::serialize_q_rows")]
    pub psi: Vec<Vec<Q>>,
    #[serde(skip)]
    pub e: Vec<GVec>,
    #[serde(skip)]
    pub f: Vec<GVec>,
    #[serde(skip)]
    pub h: Vec<GVec>,
}

fn node_orbits(perm: &[usize]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; perm.len()];
    let mut out = Vec::new();
    for i in 0..perm.len() {
        if seen[i] {
            continue;
        }
        let mut orb = vec![i];
        seen[i] = true;
        let mut j = perm[i];
        while j != i {
            orb.push(j);
            seen[j] = true;
            j = perm[j];
        }
        orb.sort_unstable();
        out.push(orb);
    }
    out
}

/// Eigenvalue c with [x, v] = c v, if v is an eigenvector of ad x.
fn ad_eigenvalue(g: &Chevalley, x: &GVec, v: &GVec) -> Option<CycScalar> {
    let w = g.bracket(x, v);
    let a = v.iter().position(|c| !c.is_zero())?;
    let c = &w[a] / &v[a];
    if w == gscale(&c, v) {
        Some(c)
    } else {
        None
    }
}

/// Basis of the ε^j eigenspace of π, spanned by projections of basis vectors.
fn eigenbasis(g: &Chevalley, pi: &Automorphism, j: i64) -> Vec<GVec> {
    let mut basis: Vec<GVec> = Vec::new();
    for a in 0..g.dim() {
        let v = pi.projector(j, &g.unit(a));
        if gis_zero(&v) {
            continue;
        }
        let mut trial = basis.clone();
        trial.push(v.clone());
        if linalg::rank(&trial) == trial.len() {
            basis.push(v);
        }
    }
    basis
}

/// Vectors in span(basis) killed by ad y for every y in `ops`.
fn joint_kernel(g: &Chevalley, basis: &[GVec], ops: &[GVec]) -> Vec<GVec> {
    let images: Vec<Vec<GVec>> = ops.iter().map(|y| basis.iter().map(|v| g.bracket(y, v)).collect()).collect();
    let mut rows: Matrix = Vec::new();
    for img in &images {
        for a in 0..g.dim() {
            rows.push(img.iter().map(|v| v[a].clone()).collect());
        }
    }
    linalg::nullspace(&rows, basis.len())
        .into_iter()
        .map(|c| {
            let mut v = g.zero();
            for (ck, bk) in c.iter().zip(basis) {
                v = gadd(&v, &gscale(ck, bk));
            }
            v
        })
        .collect()
}

impl AffineData {
    pub fn from_diagram(g: &Chevalley, pi: &Automorphism, perm: &[usize]) -> Result<Self> {
        let k = pi.order;
        let orbits = node_orbits(perm);
        for orb in &orbits {
            for &a in orb {
                for &b in orb {
                    if a != b && g.rs.cartan[a][b] != 0 {
                        return Err(Error::InvalidAutomorphism("orbits with adjacent nodes are not supported".into()));
                    }
                }
            }
        }
        let rs = &g.rs;
        let mut e = vec![g.zero()];
        let mut f = vec![g.zero()];
        let mut h = vec![g.zero()];
        for orb in &orbits {
            let mut ej = g.zero();
            let mut fj = g.zero();
            for &i in orb {
                let a = rs.simple_index(i);
                ej = gadd(&ej, &g.unit(a));
                fj = gadd(&fj, &gscale(&CycScalar::int(-1), &g.unit(rs.neg_index(a))));
            }
            h.push(g.bracket(&ej, &fj));
            e.push(ej);
            f.push(fj);
        }
        // E_0: lowest weight vector of G_[1]; F_0: highest weight vector of G_[-1].
        let fs: Vec<GVec> = f[1..].to_vec();
        let es: Vec<GVec> = e[1..].to_vec();
        let e0s = joint_kernel(g, &eigenbasis(g, pi, 1), &fs);
        let f0s = joint_kernel(g, &eigenbasis(g, pi, -1), &es);
        if e0s.len() != 1 || f0s.len() != 1 {
            return Err(Error::InvalidAutomorphism("G_[1] is not an irreducible G_[0]-module".into()));
        }
        let e0 = e0s[0].clone();
        let f0_raw = f0s[0].clone();
        let h_raw = g.bracket(&e0, &f0_raw);
        let lambda = ad_eigenvalue(g, &h_raw, &f0_raw)
            .ok_or_else(|| Error::InvalidAutomorphism("F_0 is not a weight vector".into()))?;
        // Scaling F_0 by c scales the eigenvalue by c; fix [H_0, F_0] = -2F_0.
        let c = &CycScalar::int(-2) / &lambda;
        let f0 = gscale(&c, &f0_raw);
        let h0 = g.bracket(&e0, &f0);
        e[0] = e0;
        f[0] = f0;
        h[0] = h0;

        let n = orbits.len() + 1;
        let mut cartan = vec![vec![0i64; n]; n];
        for i in 0..n {
            for j in 0..n {
                let c = ad_eigenvalue(g, &h[i], &e[j])
                    .and_then(|c| c.as_rational())
                    .ok_or_else(|| Error::InvalidAutomorphism(format!("E_{j} is not an H_{i} eigenvector")))?;
                if !c.is_integer() {
                    return Err(Error::InvalidAutomorphism("non-integral Cartan entry".into()));
                }
                cartan[i][j] = c.to_integer() as i64;
            }
        }
        let (marks, comarks) = affine_marks(&cartan)?;
        let mut psi = Vec::with_capacity(n);
        let e0_root = (0..g.num_roots())
            .find(|&a| !e[0][a].is_zero())
            .ok_or_else(|| Error::InvalidAutomorphism("E_0 has no root component".into()))?;
        psi.push(orbit_average(&rs.roots[e0_root], perm, k));
        for orb in &orbits {
            let mut v = vec![0i64; g.rank()];
            v[orb[0]] = 1;
            psi.push(orbit_average(&v, perm, k));
        }
        Ok(AffineData { k, orbits, cartan, marks, comarks, psi, e, f, h })
    }

    pub fn len(&self) -> usize {
        self.cartan.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cartan.is_empty()
    }

    /// ⟨ψ_i, ψ_j⟩ under the form restricted to t.
    pub fn psi_form(&self, g: &Chevalley, i: usize, j: usize) -> Q {
        let mut s = Q::from_integer(0);
        for (a, pa) in self.psi[i].iter().enumerate() {
            for (b, pb) in self.psi[j].iter().enumerate() {
                s += pa * pb * Q::from_integer(g.rs.cartan[a][b] as i128);
            }
        }
        s
    }

    /// m = K Σ s_j a_j.
    pub fn order_for(&self, s: &[i64]) -> u32 {
        (self.k as i64 * s.iter().zip(&self.marks).map(|(x, a)| x * a).sum::<i64>()) as u32
    }

    pub fn orbit_of(&self, node: usize) -> usize {
        self.orbits.iter().position(|o| o.contains(&node)).expect("node lies in an orbit") + 1
    }
}

pub(crate) fn orbit_average(v: &[i64], perm: &[usize], k: u32) -> Vec<Q> {
    let mut acc = vec![Q::from_integer(0); v.len()];
    let mut cur = v.to_vec();
    for _ in 0..k {
        for (a, c) in acc.iter_mut().zip(&cur) {
            *a += qi(*c);
        }
        let mut next = vec![0i64; v.len()];
        for (i, c) in cur.iter().enumerate() {
            next[perm[i]] += c;
        }
        cur = next;
    }
    acc.iter().map(|a| a * q(1, k as i128)).collect()
}

/// The principal-type automorphism θ = π ∘ D with θH_j = H_j, θE_j = w^{s_j}E_j.
#[derive(Debug, Clone)]
pub struct PrincipalTheta {
    pub theta: Automorphism,
    pub m: u32,
    pub s: Vec<i64>,
}

pub fn principal_theta(g: &Chevalley, pi: &Automorphism, aff: &AffineData, s: &[i64]) -> Result<PrincipalTheta> {
    if s.len() != aff.len() || s.iter().any(|&x| x < 0) || s.iter().all(|&x| x == 0) {
        return Err(Error::InvalidAutomorphism(format!("bad s vector {s:?}")));
    }
    let m = aff.order_for(s);
    let weights: Vec<i64> = (0..g.rank()).map(|i| s[aff.orbit_of(i)]).collect();
    let d = Automorphism::scaling(g, m, &weights);
    let pi_m = Automorphism { order: m, ..pi.clone() };
    let theta = pi_m.compose(g, &d, m);
    for j in 0..aff.len() {
        if theta.apply(&aff.h[j]) != aff.h[j] {
            return Err(Error::InvalidAutomorphism(format!("θ moves H_{j}")));
        }
        let want = gscale(&CycScalar::root_of_unity(m, s[j]), &aff.e[j]);
        if theta.apply(&aff.e[j]) != want {
            return Err(Error::InvalidAutomorphism(format!("θ E_{j} ≠ w^(s_{j}) E_{j}")));
        }
    }
    Ok(PrincipalTheta { theta, m, s: s.to_vec() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chev(t: &str) -> Chevalley {
        Chevalley::from_type(t.parse().unwrap())
    }

    #[test]
    fn a3_flip_is_an_automorphism() {
        let g = chev("A3");
        let pi = Automorphism::diagram(&g, &[2, 1, 0]).unwrap();
        assert_eq!(pi.order, 2);
        assert_eq!(pi.exact_order(&g), 2);
        pi.check_form(&g).unwrap();
    }

    #[test]
    fn non_symmetry_is_rejected() {
        let g = chev("A3");
        assert!(Automorphism::diagram(&g, &[1, 0, 2]).is_err());
    }

    #[test]
    fn a1_affine_data() {
        let g = chev("A1");
        let pi = Automorphism::identity(&g);
        let aff = AffineData::from_diagram(&g, &pi, &[0]).unwrap();
        assert_eq!(aff.cartan, vec![vec![2, -2], vec![-2, 2]]);
        assert_eq!(aff.marks, vec![1, 1]);
        assert_eq!(aff.comarks, vec![1, 1]);
        assert_eq!(aff.order_for(&[1, 1]), 2);
    }

    #[test]
    fn a3_twisted_affine_data() {
        let g = chev("A3");
        let pi = Automorphism::diagram(&g, &[2, 1, 0]).unwrap();
        let aff = AffineData::from_diagram(&g, &pi, &[2, 1, 0]).unwrap();
        assert_eq!(aff.marks[0], 1);
        assert_eq!(aff.order_for(&[1, 1, 1]), 2 * aff.marks.iter().sum::<i64>() as u32);
        // ⟨ψ_0, ψ_0⟩ = 2a¹_0/K
        assert_eq!(aff.psi_form(&g, 0, 0), q(2 * aff.comarks[0] as i128, 2));
    }

    #[test]
    fn principal_theta_order() {
        for (t, perm) in [("A1", vec![0]), ("A2", vec![0, 1]), ("A3", vec![2, 1, 0]), ("D4", vec![0, 1, 2, 3])] {
            let g = chev(t);
            let pi = Automorphism::diagram(&g, &perm).unwrap();
            let aff = AffineData::from_diagram(&g, &pi, &perm).unwrap();
            let s = vec![1; aff.len()];
            let pt = principal_theta(&g, &pi, &aff, &s).unwrap();
            assert_eq!(pt.theta.exact_order(&g), pt.m, "{t}");
            pt.theta.check_homomorphism(&g).unwrap();
        }
    }

    #[test]
    fn a1_principal_decomposition() {
        let g = chev("A1");
        let pi = Automorphism::identity(&g);
        let aff = AffineData::from_diagram(&g, &pi, &[0]).unwrap();
        let pt = principal_theta(&g, &pi, &aff, &[1, 1]).unwrap();
        let x = gadd(&g.unit(2), &g.unit(0));
        let parts = pt.theta.eigenspace_decompose(&x);
        assert_eq!(parts, vec![(0, g.unit(2)), (1, g.unit(0))]);
    }
}
