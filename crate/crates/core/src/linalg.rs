//! Exact Gaussian elimination over Q(ζ_M).

use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::scalar::{CycScalar, Q};

pub type Matrix = Vec<Vec<CycScalar>>;

/// Reduces `rows` in place to reduced row echelon form; returns pivot columns.
pub fn rref(rows: &mut Matrix) -> Vec<usize> {
    let ncols = rows.first().map(|r| r.len()).unwrap_or(0);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].inv().expect("pivot is nonzero");
        for x in rows[r].iter_mut() {
            if !x.is_zero() {
                *x = &*x * &inv;
            }
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                for j in c..ncols {
                    if !rows[r][j].is_zero() {
                        let t = &f * &rows[r][j];
                        rows[i][j] -= &t;
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(rows: &Matrix) -> usize {
    let mut m = rows.clone();
    rref(&mut m).len()
}

/// Basis of {x : A x = 0} for A with `ncols` columns.
pub fn nullspace(rows: &Matrix, ncols: usize) -> Vec<Vec<CycScalar>> {
    let mut m = rows.clone();
    let pivots = rref(&mut m);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![CycScalar::zero(); ncols];
            v[f] = CycScalar::one();
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = -&m[i][f];
            }
            v
        })
        .collect()
}

/// Some solution of A x = b, if one exists.
pub fn solve(rows: &Matrix, b: &[CycScalar]) -> Option<Vec<CycScalar>> {
    let ncols = rows.first().map(|r| r.len()).unwrap_or(0);
    let mut aug: Matrix = rows
        .iter()
        .zip(b)
        .map(|(r, x)| {
            let mut r = r.clone();
            r.push(x.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.last() == Some(&ncols) {
        return None;
    }
    let mut x = vec![CycScalar::zero(); ncols];
    for (i, &p) in pivots.iter().enumerate() {
        x[p] = aug[i][ncols].clone();
    }
    Some(x)
}

/// Primitive integer null vectors of an integer matrix, one per nullspace
/// dimension, each scaled to have coprime entries and a positive leading entry.
pub fn integer_nullspace(rows: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let ncols = rows.first().map(|r| r.len()).unwrap_or(0);
    let m: Matrix = rows.iter().map(|r| r.iter().map(|&x| CycScalar::int(x)).collect()).collect();
    nullspace(&m, ncols)
        .into_iter()
        .map(|v| {
            let qs: Vec<Q> = v.iter().map(|x| x.as_rational().expect("rational entries")).collect();
            primitive_integer(&qs)
        })
        .collect()
}

pub fn primitive_integer(qs: &[Q]) -> Vec<i64> {
    let lcm = qs.iter().fold(1i128, |acc, x| acc.lcm(x.denom()));
    let ints: Vec<i128> = qs.iter().map(|x| (x * Q::from_integer(lcm)).to_integer()).collect();
    let g = ints.iter().fold(0i128, |acc, x| acc.gcd(x));
    let sign = match ints.iter().find(|x| !x.is_zero()) {
        Some(x) if x.is_negative() => -1,
        _ => 1,
    };
    ints.iter().map(|x| (sign * x / g.max(1)) as i64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> Matrix {
        rows.iter().map(|r| r.iter().map(|&x| CycScalar::int(x)).collect()).collect()
    }

    #[test]
    fn rank_and_nullspace() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(rank(&a), 2);
        let ns = nullspace(&a, 3);
        assert_eq!(ns.len(), 1);
        for row in &a {
            let s = row.iter().zip(&ns[0]).fold(CycScalar::zero(), |acc, (x, y)| &acc + &(x * y));
            assert!(s.is_zero());
        }
    }

    #[test]
    fn solve_consistent_and_not() {
        let a = m(&[&[1, 1], &[1, -1]]);
        let x = solve(&a, &[CycScalar::int(3), CycScalar::int(1)]).unwrap();
        assert_eq!(x, vec![CycScalar::int(2), CycScalar::int(1)]);
        let b = m(&[&[1, 1], &[2, 2]]);
        assert!(solve(&b, &[CycScalar::int(1), CycScalar::int(3)]).is_none());
    }

    #[test]
    fn affine_a1_null_vector() {
        let ns = integer_nullspace(&[vec![2, -2], vec![-2, 2]]);
        assert_eq!(ns, vec![vec![1, 1]]);
    }
}
