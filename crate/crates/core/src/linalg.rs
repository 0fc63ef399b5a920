//! Integer vector helpers and exact integer linear algebra.
//!
//! Intermediate values are kept in `i128`; results are narrowed back to `i64`
//! and an overflow is reported as [`Error::ResourceBound`].

use num_integer::Integer;

use crate::error::{Error, Result};

pub type IVec = Vec<i64>;

pub fn dot(a: &[i64], b: &[i64]) -> i64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn add(a: &[i64], b: &[i64]) -> IVec {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[i64], b: &[i64]) -> IVec {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn neg(a: &[i64]) -> IVec {
    a.iter().map(|x| -x).collect()
}

pub fn scale(a: &[i64], k: i64) -> IVec {
    a.iter().map(|x| x * k).collect()
}

pub fn is_zero(a: &[i64]) -> bool {
    a.iter().all(|&x| x == 0)
}

/// gcd of the entries (0 for the zero vector).
pub fn content(a: &[i64]) -> i64 {
    a.iter().fold(0i64, |g, &x| g.gcd(&x))
}

/// Divides out the content. The zero vector is returned unchanged.
pub fn primitive(a: &[i64]) -> IVec {
    let g = content(a);
    if g == 0 {
        a.to_vec()
    } else {
        a.iter().map(|x| x / g).collect()
    }
}

pub(crate) fn narrow(x: i128) -> Result<i64> {
    i64::try_from(x).map_err(|_| Error::ResourceBound("integer coordinate overflow".into()))
}

fn widen(rows: &[IVec]) -> Vec<Vec<i128>> {
    rows.iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect()
}

fn narrow_rows(rows: Vec<Vec<i128>>) -> Result<Vec<IVec>> {
    rows.into_iter()
        .map(|r| r.into_iter().map(narrow).collect())
        .collect()
}

/// Fraction-free determinant (Bareiss).
pub fn det(m: &[Vec<i128>]) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut a = m.to_vec();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&i| a[i][k] != 0) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

/// Rank over ℚ.
pub fn rank(rows: &[IVec]) -> usize {
    let mut a = widen(rows);
    let m = a.len();
    if m == 0 {
        return 0;
    }
    let n = a[0].len();
    let mut r = 0;
    for c in 0..n {
        let Some(p) = (r..m).find(|&i| a[i][c] != 0) else {
            continue;
        };
        a.swap(r, p);
        for i in r + 1..m {
            if a[i][c] != 0 {
                let (x, y) = (a[r][c], a[i][c]);
                let g = x.gcd(&y);
                for j in 0..n {
                    a[i][j] = a[i][j] * (x / g) - a[r][j] * (y / g);
                }
                let cg = a[i].iter().fold(0i128, |g, v| g.gcd(v));
                if cg > 1 {
                    a[i].iter_mut().for_each(|v| *v /= cg);
                }
            }
        }
        r += 1;
        if r == m {
            break;
        }
    }
    r
}

/// Integer normal of the hyperplane spanned by `n-1` vectors in ℤ^n
/// (generalized cross product, then made primitive). Zero if the rows are dependent.
pub fn normal_of(rows: &[IVec]) -> Result<IVec> {
    let n = rows.len() + 1;
    let w = widen(rows);
    let mut out = Vec::with_capacity(n);
    for skip in 0..n {
        let minor: Vec<Vec<i128>> = w
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|(j, _)| *j != skip)
                    .map(|(_, &x)| x)
                    .collect()
            })
            .collect();
        let d = det(&minor);
        out.push(if skip % 2 == 0 { d } else { -d });
    }
    let g = out.iter().fold(0i128, |g, v| g.gcd(v));
    if g > 1 {
        out.iter_mut().for_each(|v| *v /= g);
    }
    out.into_iter().map(narrow).collect()
}

/// Row Hermite normal form with transform: returns `(h, u)` with `u * a = h`,
/// `u` unimodular, nonzero rows of `h` first and in echelon form with positive pivots.
pub fn hnf_with_transform(a: &[IVec]) -> (Vec<Vec<i128>>, Vec<Vec<i128>>) {
    let m = a.len();
    let n = a.first().map_or(0, |r| r.len());
    let mut h = widen(a);
    let mut u: Vec<Vec<i128>> = (0..m)
        .map(|i| (0..m).map(|j| i128::from(i == j)).collect())
        .collect();
    let mut row = 0;
    for col in 0..n {
        if row == m {
            break;
        }
        loop {
            let piv = (row..m)
                .filter(|&i| h[i][col] != 0)
                .min_by_key(|&i| h[i][col].abs());
            let Some(p) = piv else { break };
            h.swap(row, p);
            u.swap(row, p);
            let mut done = true;
            for i in row + 1..m {
                if h[i][col] != 0 {
                    let q = num_integer::Integer::div_floor(&h[i][col], &h[row][col]);
                    for j in 0..n {
                        h[i][j] -= q * h[row][j];
                    }
                    for j in 0..m {
                        u[i][j] -= q * u[row][j];
                    }
                    if h[i][col] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if h[row][col] == 0 {
            continue;
        }
        if h[row][col] < 0 {
            h[row].iter_mut().for_each(|v| *v = -*v);
            u[row].iter_mut().for_each(|v| *v = -*v);
        }
        for i in 0..row {
            let q = num_integer::Integer::div_floor(&h[i][col], &h[row][col]);
            if q != 0 {
                for j in 0..n {
                    h[i][j] -= q * h[row][j];
                }
                for j in 0..m {
                    u[i][j] -= q * u[row][j];
                }
            }
        }
        row += 1;
    }
    (h, u)
}

/// A ℤ-basis (HNF rows) of the lattice generated by `rows`.
pub fn lattice_basis(rows: &[IVec]) -> Result<Vec<IVec>> {
    let (h, _) = hnf_with_transform(rows);
    narrow_rows(h.into_iter().filter(|r| r.iter().any(|&x| x != 0)).collect())
}

/// A ℤ-basis of `{y : y * a = 0}` (integer left kernel of `a`).
pub fn left_kernel(a: &[IVec]) -> Result<Vec<IVec>> {
    let (h, u) = hnf_with_transform(a);
    narrow_rows(
        h.iter()
            .zip(u)
            .filter(|(hr, _)| hr.iter().all(|&x| x == 0))
            .map(|(_, ur)| ur)
            .collect(),
    )
}

pub fn transpose(a: &[IVec]) -> Vec<IVec> {
    let n = a.first().map_or(0, |r| r.len());
    (0..n).map(|j| a.iter().map(|r| r[j]).collect()).collect()
}

/// Basis of the saturation `span_ℚ(rows) ∩ ℤ^n`, in Hermite form.
pub fn saturation(rows: &[IVec], n: usize) -> Result<Vec<IVec>> {
    let kernel = left_kernel(&transpose_or_empty(rows, n))?;
    if kernel.is_empty() {
        return Ok(identity(n));
    }
    let sat = left_kernel(&transpose(&kernel))?;
    lattice_basis(&sat)
}

fn transpose_or_empty(rows: &[IVec], n: usize) -> Vec<IVec> {
    if rows.is_empty() {
        vec![Vec::new(); n]
    } else {
        transpose(rows)
    }
}

pub fn identity(n: usize) -> Vec<IVec> {
    (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
        .collect()
}

/// Solves `c * basis = d` for an echelon `basis` (as returned by [`lattice_basis`]).
pub fn coords_in_basis(basis: &[IVec], d: &[i64]) -> Option<IVec> {
    let mut rest: Vec<i128> = d.iter().map(|&x| x as i128).collect();
    let mut c = Vec::with_capacity(basis.len());
    for row in basis {
        let p = row.iter().position(|&x| x != 0)?;
        let piv = row[p] as i128;
        if rest[p] % piv != 0 {
            return None;
        }
        let q = rest[p] / piv;
        for (r, &b) in rest.iter_mut().zip(row) {
            *r -= q * b as i128;
        }
        c.push(i64::try_from(q).ok()?);
    }
    rest.iter().all(|&x| x == 0).then_some(c)
}

/// A vector `g` with `a · g = content(a)`.
pub fn bezout_vector(a: &[i64]) -> IVec {
    let mut g = vec![0i64; a.len()];
    let Some(first) = a.iter().position(|&x| x != 0) else {
        return g;
    };
    let mut acc = a[first];
    g[first] = 1;
    for i in first + 1..a.len() {
        if a[i] == 0 {
            continue;
        }
        let e = acc.extended_gcd(&a[i]);
        for v in g.iter_mut().take(i) {
            *v *= e.x;
        }
        g[i] = e.y;
        acc = e.gcd;
    }
    if acc < 0 {
        g.iter_mut().for_each(|v| *v = -*v);
    }
    g
}

/// Solves `x * m = b` over ℤ for square `m`, if an integral solution exists.
pub fn solve_integral(m: &[IVec], b: &[IVec]) -> Option<Vec<IVec>> {
    let n = m.len();
    let wm = widen(m);
    let d = det(&wm);
    if d == 0 {
        return None;
    }
    // adjugate via cofactors; n is tiny here
    let mut adj = vec![vec![0i128; n]; n];
    for i in 0..n {
        for j in 0..n {
            let minor: Vec<Vec<i128>> = wm
                .iter()
                .enumerate()
                .filter(|(r, _)| *r != i)
                .map(|(_, row)| {
                    row.iter()
                        .enumerate()
                        .filter(|(c, _)| *c != j)
                        .map(|(_, &x)| x)
                        .collect()
                })
                .collect();
            let c = det(&minor);
            adj[j][i] = if (i + j) % 2 == 0 { c } else { -c };
        }
    }
    b.iter()
        .map(|row| {
            (0..n)
                .map(|j| {
                    let s: i128 = (0..n).map(|k| row[k] as i128 * adj[k][j]).sum();
                    (s % d == 0).then(|| i64::try_from(s / d).ok()).flatten()
                })
                .collect::<Option<IVec>>()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinant_small() {
        let m = vec![vec![2i128, 1, 0], vec![1, 3, 1], vec![0, 1, 4]];
        assert_eq!(det(&m), 18);
        assert_eq!(det(&[vec![0i128, 1], vec![1, 0]]), -1);
    }

    #[test]
    fn hnf_transform_is_consistent() {
        let a = vec![vec![2, 4, 6], vec![1, 3, 5], vec![3, 7, 11]];
        let (h, u) = hnf_with_transform(&a);
        for i in 0..3 {
            for j in 0..3 {
                let s: i128 = (0..3).map(|k| u[i][k] * a[k][j] as i128).sum();
                assert_eq!(s, h[i][j]);
            }
        }
        assert_eq!(det(&u).abs(), 1);
        assert!(h[2].iter().all(|&x| x == 0));
    }

    #[test]
    fn saturation_of_diagonal_line() {
        let s = saturation(&[vec![2, 2]], 2).unwrap();
        assert_eq!(s, vec![vec![1, 1]]);
        assert_eq!(coords_in_basis(&s, &[3, 3]), Some(vec![3]));
        assert_eq!(coords_in_basis(&s, &[3, 2]), None);
    }

    #[test]
    fn normal_and_bezout() {
        let n = normal_of(&[vec![1, 0, 0], vec![0, 1, 0]]).unwrap();
        assert_eq!(n.iter().map(|x| x.abs()).collect::<Vec<_>>(), vec![0, 0, 1]);
        let a = vec![6, 10, 15];
        assert_eq!(dot(&a, &bezout_vector(&a)), 1);
        assert_eq!(dot(&[-1, 0], &bezout_vector(&[-1, 0])), 1);
    }

    #[test]
    fn integral_solve() {
        let m = vec![vec![1, 0], vec![1, 1]];
        let x = solve_integral(&m, &[vec![3, 5]]).unwrap();
        assert_eq!(x, vec![vec![-2, 5]]);
        assert!(solve_integral(&[vec![2, 0], vec![0, 1]], &[vec![1, 0]]).is_none());
    }
}
