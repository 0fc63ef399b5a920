//! Dense square matrices over a [`Ring`].

use crate::error::{Error, Result};
use crate::ring::{Elem, Ring};

/// Row-major square matrix. Entry `(i, j)` is the coefficient of basis
/// element `i` in the image of basis element `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    n: usize,
    data: Vec<Elem>,
}

impl Matrix {
    pub fn zero(ring: &Ring, n: usize) -> Matrix {
        Matrix {
            n,
            data: vec![ring.zero(); n * n],
        }
    }

    pub fn identity(ring: &Ring, n: usize) -> Matrix {
        let mut m = Matrix::zero(ring, n);
        for i in 0..n {
            m.set(i, i, ring.one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Elem>>) -> Result<Matrix> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::DegenerateInput("matrix is not square".into()));
        }
        Ok(Matrix {
            n,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Elem {
        &self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: Elem) {
        self.data[i * self.n + j] = x;
    }

    pub fn rows(&self) -> Vec<Vec<Elem>> {
        self.data.chunks(self.n.max(1)).map(|r| r.to_vec()).collect()
    }

    pub fn mul(&self, ring: &Ring, other: &Matrix) -> Matrix {
        let n = self.n;
        let mut out = Matrix::zero(ring, n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if ring.is_zero(a) {
                    continue;
                }
                for j in 0..n {
                    let b = other.get(k, j);
                    if ring.is_zero(b) {
                        continue;
                    }
                    let acc = ring.add(out.get(i, j), &ring.mul(a, b));
                    out.set(i, j, acc);
                }
            }
        }
        out
    }

    fn add_scalar_identity(&mut self, ring: &Ring, c: &Elem) {
        for i in 0..self.n {
            let x = ring.add(self.get(i, i), c);
            self.set(i, i, x);
        }
    }

    pub fn is_identity(&self, ring: &Ring) -> bool {
        *self == Matrix::identity(ring, self.n)
    }

    /// Coefficients `[1, c_1, …, c_n]` of `det(xI - A)`, highest degree first,
    /// computed without division.
    pub fn characteristic_polynomial(&self, ring: &Ring) -> Vec<Elem> {
        let n = self.n;
        if n == 0 {
            return vec![ring.one()];
        }
        let mut coeffs = vec![ring.one(), ring.neg(self.get(0, 0))];
        for r in 1..n {
            // Toeplitz column (1, -a_rr, -R C, -R M C, …, -R M^{r-1} C)
            let mut t = vec![ring.one(), ring.neg(self.get(r, r))];
            let mut col: Vec<Elem> = (0..r).map(|i| self.get(i, r).clone()).collect();
            for _ in 0..r {
                let rc = (0..r).fold(ring.zero(), |acc, j| ring.add(&acc, &ring.mul(self.get(r, j), &col[j])));
                t.push(ring.neg(&rc));
                col = (0..r)
                    .map(|i| (0..r).fold(ring.zero(), |acc, j| ring.add(&acc, &ring.mul(self.get(i, j), &col[j]))))
                    .collect();
            }
            coeffs = (0..r + 2)
                .map(|i| {
                    (0..=i.min(r)).fold(ring.zero(), |acc, j| ring.add(&acc, &ring.mul(&t[i - j], &coeffs[j])))
                })
                .collect();
        }
        coeffs
    }

    pub fn determinant(&self, ring: &Ring) -> Elem {
        let c = self.characteristic_polynomial(ring);
        let last = c.last().unwrap().clone();
        if self.n % 2 == 1 {
            ring.neg(&last)
        } else {
            last
        }
    }

    /// Inverse by Cayley–Hamilton; fails unless the determinant is a unit.
    pub fn inverse(&self, ring: &Ring) -> Result<Matrix> {
        let n = self.n;
        let c = self.characteristic_polynomial(ring);
        let cn = ring.unit_inverse(&c[n]).ok_or(Error::SingularMatrix)?;
        let mut b = Matrix::identity(ring, n);
        for ck in &c[1..n] {
            b = self.mul(ring, &b);
            b.add_scalar_identity(ring, ck);
        }
        let scale = ring.neg(&cn);
        for x in b.data.iter_mut() {
            *x = ring.mul(x, &scale);
        }
        Ok(b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int_matrix(rows: &[&[i64]]) -> Matrix {
        let r = Ring::Integers;
        Matrix::from_rows(rows.iter().map(|row| row.iter().map(|&x| r.from_i64(x)).collect()).collect()).unwrap()
    }

    #[test]
    fn determinant_and_inverse() {
        let r = Ring::Integers;
        let a = int_matrix(&[&[2, 1, 0], &[1, 1, 0], &[3, 4, 1]]);
        assert_eq!(a.determinant(&r), r.from_i64(1));
        let inv = a.inverse(&r).unwrap();
        assert!(a.mul(&r, &inv).is_identity(&r));
        let s = int_matrix(&[&[2, 0], &[0, 1]]);
        assert_eq!(s.inverse(&r).unwrap_err(), Error::SingularMatrix);
    }
}
