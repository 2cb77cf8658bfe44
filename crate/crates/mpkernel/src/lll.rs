//! Exact integral LLL (de Weger / Cohen style, all Gram-Schmidt data kept as integers).

use rug::{Integer, Rational};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum LatticeError {
    #[error("basis rows are linearly dependent (row {0})")]
    DependentRows(usize),
    #[error("basis is empty or ragged")]
    BadShape,
    #[error("delta must lie in (1/4, 1)")]
    BadDelta,
}

/// Integer lattice given by its basis rows.
#[derive(Clone, Debug, PartialEq)]
pub struct IntLattice {
    pub basis: Vec<Vec<Integer>>,
}

impl IntLattice {
    pub fn new(basis: Vec<Vec<Integer>>) -> Result<Self, LatticeError> {
        let n = basis.first().map(|r| r.len()).ok_or(LatticeError::BadShape)?;
        if n == 0 || basis.iter().any(|r| r.len() != n) {
            return Err(LatticeError::BadShape);
        }
        Ok(IntLattice { basis })
    }

    pub fn from_i64(rows: &[Vec<i64>]) -> Result<Self, LatticeError> {
        IntLattice::new(rows.iter().map(|r| r.iter().map(|&x| Integer::from(x)).collect()).collect())
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn dim(&self) -> usize {
        self.basis[0].len()
    }

    /// Gram determinant, i.e. the squared covolume.
    pub fn gram_det(&self) -> Result<Integer, LatticeError> {
        let (_, d) = gram_schmidt_data(&self.basis)?;
        Ok(d[self.rank()].clone())
    }
}

fn dot(a: &[Integer], b: &[Integer]) -> Integer {
    let mut s = Integer::new();
    for (x, y) in a.iter().zip(b) {
        s += x * y;
    }
    s
}

// lambda[k][j] (j < k) and d[0..=n], exactly as in the integral algorithm
fn gram_schmidt_data(b: &[Vec<Integer>]) -> Result<(Vec<Vec<Integer>>, Vec<Integer>), LatticeError> {
    let n = b.len();
    let mut lam = vec![vec![Integer::new(); n]; n];
    let mut d = vec![Integer::from(1); n + 1];
    for k in 0..n {
        for j in 0..=k {
            let mut u = dot(&b[k], &b[j]);
            for i in 0..j {
                u = (Integer::from(&d[i + 1] * &u) - Integer::from(&lam[k][i] * &lam[j][i])) / &d[i];
            }
            if j < k {
                lam[k][j] = u;
            } else {
                if u == 0 {
                    return Err(LatticeError::DependentRows(k));
                }
                d[k + 1] = u;
            }
        }
    }
    Ok((lam, d))
}

fn round_div(a: &Integer, b: &Integer) -> Integer {
    // nearest integer to a/b for b > 0
    let two_a = Integer::from(a * 2u32) + b;
    let two_b = Integer::from(b * 2u32);
    two_a.div_rem_floor(two_b).0
}

/// LLL-reduces the rows of `lat` with parameter `delta` in (1/4, 1).
pub fn lll_reduce(lat: &IntLattice, delta: &Rational) -> Result<IntLattice, LatticeError> {
    if *delta <= Rational::from((1, 4)) || *delta >= 1 {
        return Err(LatticeError::BadDelta);
    }
    let (dn, dd) = (delta.numer().clone(), delta.denom().clone());
    let mut b = lat.basis.clone();
    let n = b.len();
    if n == 0 {
        return Err(LatticeError::BadShape);
    }
    let (mut lam, mut d) = gram_schmidt_data(&b)?;
    if n == 1 {
        return Ok(IntLattice { basis: b });
    }

    // d[i+1] is the d_i of the 1-based description
    let red = |b: &mut Vec<Vec<Integer>>, lam: &mut Vec<Vec<Integer>>, d: &Vec<Integer>, k: usize, l: usize| {
        let two = Integer::from(&lam[k][l] * 2u32).abs();
        if two > d[l + 1] {
            let q = round_div(&lam[k][l], &d[l + 1]);
            let bl = b[l].clone();
            for (x, y) in b[k].iter_mut().zip(bl.iter()) {
                *x -= Integer::from(&q * y);
            }
            let t = Integer::from(&q * &d[l + 1]);
            lam[k][l] -= t;
            for i in 0..l {
                let t = Integer::from(&q * &lam[l][i]);
                lam[k][i] -= t;
            }
        }
    };

    let mut k = 1usize;
    while k < n {
        red(&mut b, &mut lam, &d, k, k - 1);
        // Lovasz: dd*d_k*d_{k-2} < dn*d_{k-1}^2 - dd*lam^2  triggers a swap
        let lhs = Integer::from(&dd * &d[k + 1]) * &d[k - 1];
        let rhs = Integer::from(d[k].square_ref()) * &dn - Integer::from(lam[k][k - 1].square_ref()) * &dd;
        if lhs < rhs {
            b.swap(k, k - 1);
            for j in 0..k - 1 {
                let t = lam[k][j].clone();
                lam[k][j] = lam[k - 1][j].clone();
                lam[k - 1][j] = t;
            }
            let l = lam[k][k - 1].clone();
            let bb = (Integer::from(&d[k - 1] * &d[k + 1]) + Integer::from(l.square_ref())) / &d[k];
            for i in k + 1..n {
                let t = lam[i][k].clone();
                lam[i][k] = (Integer::from(&d[k + 1] * &lam[i][k - 1]) - Integer::from(&l * &t)) / &d[k];
                lam[i][k - 1] = (Integer::from(&bb * &t) + Integer::from(&l * &lam[i][k])) / &d[k + 1];
            }
            d[k] = bb;
            if k > 1 {
                k -= 1;
            }
        } else {
            for l in (0..k - 1).rev() {
                red(&mut b, &mut lam, &d, k, l);
            }
            k += 1;
        }
    }
    Ok(IntLattice { basis: b })
}

/// Checks the size and Lovasz conditions exactly.
pub fn is_lll_reduced(lat: &IntLattice, delta: &Rational) -> bool {
    let Ok((lam, d)) = gram_schmidt_data(&lat.basis) else {
        return false;
    };
    let n = lat.rank();
    for k in 1..n {
        for j in 0..k {
            if Integer::from(&lam[k][j] * 2u32).abs() > d[j + 1] {
                return false;
            }
        }
        // |b*_k|^2 >= (delta - mu^2)|b*_{k-1}|^2 with |b*_k|^2 = d_k/d_{k-1}
        let bk = Rational::from((d[k + 1].clone(), d[k].clone()));
        let bk1 = Rational::from((d[k].clone(), d[k - 1].clone()));
        let mu = Rational::from((lam[k][k - 1].clone(), d[k].clone()));
        let rhs = (delta.clone() - Rational::from(mu.square_ref())) * bk1;
        if bk < rhs {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d99() -> Rational {
        Rational::from((99, 100))
    }

    #[test]
    fn identity_is_fixed() {
        let id = IntLattice::from_i64(&[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]).unwrap();
        assert_eq!(lll_reduce(&id, &d99()).unwrap(), id);
    }

    #[test]
    fn two_dim_bound() {
        let l = IntLattice::from_i64(&[vec![1, 0], vec![4, 1]]).unwrap();
        let r = lll_reduce(&l, &d99()).unwrap();
        assert!(is_lll_reduced(&r, &d99()));
        let n0 = dot(&r.basis[0], &r.basis[0]);
        // |b1|^2 <= (4/3)^{1/2} det, det = 1
        assert!(n0.to_f64() <= (4.0f64 / 3.0).sqrt() + 1e-12);
    }

    #[test]
    fn dependent_rows_rejected() {
        let l = IntLattice::from_i64(&[vec![1, 2, 3], vec![2, 4, 6]]).unwrap();
        assert_eq!(lll_reduce(&l, &d99()), Err(LatticeError::DependentRows(1)));
    }

    #[test]
    fn delta_range_checked() {
        let l = IntLattice::from_i64(&[vec![1]]).unwrap();
        assert_eq!(lll_reduce(&l, &Rational::from((1, 4))), Err(LatticeError::BadDelta));
        assert_eq!(lll_reduce(&l, &Rational::from(1)), Err(LatticeError::BadDelta));
    }
}
