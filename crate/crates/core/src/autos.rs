//! Elementary graded automorphisms as matrices on degree-one monomials.
//!
//! Basis element `i` is the `i`-th lattice point of the stage polytope in its
//! sorted order. Matrices act by left multiplication, so the matrix of
//! `f ∘ g` is `F · G`.

use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use serde::Serialize;

use crate::columns::{facet_criterion, ColSet};
use crate::corpus;
use crate::error::{Error, Result};
use crate::linalg::{self, IVec};
use crate::matrix::Matrix;
use crate::polytope::LatticePolytope;
use crate::ring::{Elem, Ring};

/// One generator `e_v^λ` of a word.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Letter {
    pub v: IVec,
    pub coef: Elem,
}

impl Letter {
    pub fn new(v: IVec, coef: Elem) -> Self {
        Letter { v, coef }
    }
}

#[derive(Debug, Clone)]
pub struct GradedAutomorphism {
    polytope: Arc<LatticePolytope>,
    ring: Ring,
    matrix: Matrix,
    /// The word of elementary generators this automorphism was built from.
    word: Option<Vec<Letter>>,
}

fn binomial(n: u64, k: u64) -> BigInt {
    (0..k).fold(BigInt::from(1), |acc, i| acc * (n - i) / (i + 1))
}

fn same_stage(a: &LatticePolytope, b: &LatticePolytope) -> bool {
    std::ptr::eq(a, b) || a == b
}

impl GradedAutomorphism {
    pub fn identity(p: &Arc<LatticePolytope>, ring: &Ring) -> Self {
        GradedAutomorphism {
            polytope: p.clone(),
            ring: ring.clone(),
            matrix: Matrix::identity(ring, p.lattice_points().len()),
            word: Some(Vec::new()),
        }
    }

    /// Wraps an externally supplied matrix (no provenance).
    pub fn from_matrix(p: &Arc<LatticePolytope>, ring: &Ring, matrix: Matrix) -> Result<Self> {
        let n = p.lattice_points().len();
        if matrix.size() != n {
            return Err(Error::DimensionMismatch(matrix.size(), n));
        }
        Ok(GradedAutomorphism {
            polytope: p.clone(),
            ring: ring.clone(),
            matrix,
            word: None,
        })
    }

    pub fn polytope(&self) -> &Arc<LatticePolytope> {
        &self.polytope
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn word(&self) -> Option<&[Letter]> {
        self.word.as_deref()
    }

    pub fn is_identity(&self) -> bool {
        self.matrix.is_identity(&self.ring)
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if !same_stage(&self.polytope, &other.polytope) || self.ring != other.ring {
            return Err(Error::StageMismatch);
        }
        Ok(())
    }

    /// Dense matrix with entries printed in the ring's notation.
    pub fn matrix_strings(&self) -> Vec<Vec<String>> {
        self.matrix
            .rows()
            .iter()
            .map(|r| r.iter().map(|x| self.ring.format(x)).collect())
            .collect()
    }
}

/// `e_v^λ`: the monomial `x` goes to `x (1 + λ v)^h` with `h` the height of
/// `x` over the base facet of `v`.
pub fn elementary(p: &Arc<LatticePolytope>, v: &[i64], lambda: &Elem, ring: &Ring) -> Result<GradedAutomorphism> {
    let base = facet_criterion(p, v).ok_or_else(|| Error::StageTooSmall(v.to_vec()))?;
    let facet = p.facet(base);
    let pts = p.lattice_points();
    let mut m = Matrix::identity(ring, pts.len());
    for (j, x) in pts.iter().enumerate() {
        let h = facet.height(x, 1) as u64;
        let mut power = ring.one();
        for k in 1..=h {
            power = ring.mul(&power, lambda);
            let y = linalg::add(x, &linalg::scale(v, k as i64));
            let i = p.point_index(&y).ok_or_else(|| {
                Error::ValidationFailure(format!("{x:?} + {k}·{v:?} leaves the polytope"))
            })?;
            m.set(i, j, ring.mul(&ring.from_bigint(binomial(h, k)), &power));
        }
    }
    Ok(GradedAutomorphism {
        polytope: p.clone(),
        ring: ring.clone(),
        matrix: m,
        word: Some(vec![Letter::new(v.to_vec(), lambda.clone())]),
    })
}

/// Composite of a word, evaluated left to right as `e_1 ∘ e_2 ∘ …`.
pub fn evaluate_letters(p: &Arc<LatticePolytope>, letters: &[Letter], ring: &Ring) -> Result<GradedAutomorphism> {
    let mut acc = GradedAutomorphism::identity(p, ring);
    for l in letters {
        acc = compose(&acc, &elementary(p, &l.v, &l.coef, ring)?)?;
    }
    Ok(acc)
}

/// `f ∘ g`.
pub fn compose(f: &GradedAutomorphism, g: &GradedAutomorphism) -> Result<GradedAutomorphism> {
    f.check_compatible(g)?;
    let word = match (&f.word, &g.word) {
        (Some(a), Some(b)) => Some(a.iter().chain(b).cloned().collect()),
        _ => None,
    };
    Ok(GradedAutomorphism {
        polytope: f.polytope.clone(),
        ring: f.ring.clone(),
        matrix: f.matrix.mul(&f.ring, &g.matrix),
        word,
    })
}

/// Inverse: reversed word with negated coefficients when the provenance is
/// known, otherwise an exact matrix inverse.
pub fn inverse(f: &GradedAutomorphism) -> Result<GradedAutomorphism> {
    match &f.word {
        Some(w) => {
            let r = &f.ring;
            let inv: Vec<Letter> = w.iter().rev().map(|l| Letter::new(l.v.clone(), r.neg(&l.coef))).collect();
            evaluate_letters(&f.polytope, &inv, r)
        }
        None => Ok(GradedAutomorphism {
            polytope: f.polytope.clone(),
            ring: f.ring.clone(),
            matrix: f.matrix.inverse(&f.ring)?,
            word: None,
        }),
    }
}

/// `[f, g] = f ∘ g ∘ f⁻¹ ∘ g⁻¹`.
pub fn commutator(f: &GradedAutomorphism, g: &GradedAutomorphism) -> Result<GradedAutomorphism> {
    let fg = compose(f, g)?;
    let fgf = compose(&fg, &inverse(f)?)?;
    compose(&fgf, &inverse(g)?)
}

pub fn equals(f: &GradedAutomorphism, g: &GradedAutomorphism) -> Result<bool> {
    f.check_compatible(g)?;
    Ok(f.matrix == g.matrix)
}

/// The block of an automorphism on an invariant set of monomials.
#[derive(Debug, Clone)]
pub struct Restriction {
    pub points: Vec<IVec>,
    pub ring: Ring,
    pub matrix: Matrix,
}

impl Restriction {
    pub fn is_identity(&self) -> bool {
        self.matrix.is_identity(&self.ring)
    }
}

/// Restricts `f` to the span of the given lattice points, which must be
/// carried into itself.
pub fn restrict(f: &GradedAutomorphism, points: &[IVec]) -> Result<Restriction> {
    let p = &f.polytope;
    let idx: Vec<usize> = points
        .iter()
        .map(|x| p.point_index(x).ok_or_else(|| Error::NotInvariant(format!("{x:?} is not a lattice point of the stage"))))
        .collect::<Result<_>>()?;
    let r = &f.ring;
    for &j in &idx {
        for i in 0..f.matrix.size() {
            if !idx.contains(&i) && !r.is_zero(f.matrix.get(i, j)) {
                return Err(Error::NotInvariant(format!(
                    "image of {:?} involves {:?}",
                    p.lattice_points()[j],
                    p.lattice_points()[i]
                )));
            }
        }
    }
    let rows = idx
        .iter()
        .map(|&i| idx.iter().map(|&j| f.matrix.get(i, j).clone()).collect())
        .collect();
    Ok(Restriction {
        points: points.to_vec(),
        ring: r.clone(),
        matrix: Matrix::from_rows(rows)?,
    })
}

/// Lattice points of a face, in sorted order.
pub fn facet_points(p: &LatticePolytope, facet: usize) -> Vec<IVec> {
    p.facet_points(facet).into_iter().cloned().collect()
}

/// Sign `s` with `[e_u^λ, e_v^μ] = e_{uv}^{sλμ}`, determined once by a
/// symbolic computation on the unit triangle.
pub fn commutator_sign() -> i64 {
    static SIGN: OnceLock<i64> = OnceLock::new();
    *SIGN.get_or_init(|| {
        let p = Arc::new(corpus::simplex(2, 1).expect("unit triangle"));
        let cols = ColSet::new(p.clone());
        let (u, v, uv) = cols.product_triples()[0];
        let ring = Ring::polynomials(&["l", "m"]).unwrap();
        let (l, m) = (ring.var(0).unwrap(), ring.var(1).unwrap());
        let lhs = commutator(
            &elementary(&p, cols.coords(u), &l, &ring).unwrap(),
            &elementary(&p, cols.coords(v), &m, &ring).unwrap(),
        )
        .unwrap();
        let lm = ring.mul(&l, &m);
        for s in [1, -1] {
            let c = ring.mul(&ring.from_i64(s), &lm);
            if equals(&lhs, &elementary(&p, cols.coords(uv), &c, &ring).unwrap()).unwrap() {
                return s;
            }
        }
        panic!("commutator of elementary automorphisms on the unit triangle is not elementary");
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckMode {
    /// Over ℤ[λ, μ].
    Symbolic,
    /// Concrete pairs `(λ, μ)`; every pair over ℤ/5 by default.
    Sampled,
}

#[derive(Debug, Clone, Serialize)]
pub struct SteinbergCheck {
    pub u: IVec,
    pub v: IVec,
    /// `"product"`, `"reverse-product"` or `"commuting"`.
    pub case: &'static str,
    /// The product vector whose generator appears on the right-hand side.
    pub product: Option<IVec>,
    pub mode: CheckMode,
    pub ring: String,
    /// Right-hand side exponent in terms of `λμ`.
    pub sign: i64,
    pub checks: usize,
    pub passed: bool,
}

/// Checks the commutator relation for `e_u^λ` and `e_v^μ`.
pub fn verify_steinberg(p: &Arc<LatticePolytope>, u: &[i64], v: &[i64], mode: CheckMode) -> Result<SteinbergCheck> {
    let cols = ColSet::new(p.clone());
    verify_steinberg_in(&cols, u, v, mode)
}

/// [`verify_steinberg`] against a precomputed column set.
pub fn verify_steinberg_in(cols: &ColSet, u: &[i64], v: &[i64], mode: CheckMode) -> Result<SteinbergCheck> {
    let ring = match mode {
        CheckMode::Symbolic => Ring::polynomials(&["l", "m"])?,
        CheckMode::Sampled => Ring::integers_mod(5)?,
    };
    verify_steinberg_over(cols, u, v, &ring)
}

/// Checks the relation over `ring`: symbolically in the first two variables
/// of a polynomial ring (a one-variable ring uses `λ = μ = x`), for every
/// pair of elements of a finite ring, and for all `λ, μ ∈ {-3, …, 3}` otherwise.
pub fn verify_steinberg_over(cols: &ColSet, u: &[i64], v: &[i64], ring: &Ring) -> Result<SteinbergCheck> {
    let p = cols.polytope_arc();
    if !cols.is_balanced() {
        return Err(Error::BalancedRequired);
    }
    let ui = cols.find(u).ok_or_else(|| Error::StageTooSmall(u.to_vec()))?;
    let vi = cols.find(v).ok_or_else(|| Error::StageTooSmall(v.to_vec()))?;
    let sum = linalg::add(u, v);
    if linalg::is_zero(&sum) {
        return Err(Error::DegenerateInput("u + v = 0".into()));
    }
    let s = commutator_sign();
    let (case, product, sign) = if let Some(k) = cols.product(ui, vi) {
        ("product", Some(cols.coords(k).clone()), s)
    } else if !cols.contains(&sum) {
        ("commuting", None, 0)
    } else if let Some(k) = cols.product(vi, ui) {
        ("reverse-product", Some(cols.coords(k).clone()), -s)
    } else {
        return Err(Error::CaseNotCovered(format!(
            "{u:?} + {v:?} is a column vector but neither product exists"
        )));
    };
    let check = |l: &Elem, m: &Elem| -> Result<bool> {
        let lhs = commutator(&elementary(p, u, l, ring)?, &elementary(p, v, m, ring)?)?;
        match &product {
            Some(w) => {
                let c = ring.mul(&ring.from_i64(sign), &ring.mul(l, m));
                equals(&lhs, &elementary(p, w, &c, ring)?)
            }
            None => Ok(lhs.is_identity()),
        }
    };
    let (mode, pairs): (CheckMode, Vec<(Elem, Elem)>) = match ring {
        Ring::Polynomials(vars) => {
            let l = ring.var(0)?;
            let m = if vars.len() > 1 { ring.var(1)? } else { l.clone() };
            (CheckMode::Symbolic, vec![(l, m)])
        }
        _ => {
            let pool = ring
                .elements()
                .unwrap_or_else(|| (-3..=3).map(|x| ring.from_i64(x)).collect());
            let pairs = pool.iter().flat_map(|l| pool.iter().map(move |m| (l.clone(), m.clone()))).collect();
            (CheckMode::Sampled, pairs)
        }
    };
    let mut passed = true;
    for (l, m) in &pairs {
        passed &= check(l, m)?;
    }
    Ok(SteinbergCheck {
        u: u.to_vec(),
        v: v.to_vec(),
        case,
        product,
        mode,
        ring: ring.to_string(),
        sign,
        checks: pairs.len(),
        passed,
    })
}

/// `e_{v_1}^{λ_1} ∘ … ∘ e_{v_s}^{λ_s}` for distinct vectors sharing the base
/// facet `facet`.
pub fn phi_embedding(
    p: &Arc<LatticePolytope>,
    facet: usize,
    lambdas: &[Elem],
    vs: &[IVec],
    ring: &Ring,
) -> Result<GradedAutomorphism> {
    if lambdas.len() != vs.len() {
        return Err(Error::DimensionMismatch(lambdas.len(), vs.len()));
    }
    for (i, v) in vs.iter().enumerate() {
        if facet_criterion(p, v) != Some(facet) {
            return Err(Error::BaseFacetMismatch);
        }
        if vs[..i].contains(v) {
            return Err(Error::DegenerateInput(format!("{v:?} is repeated")));
        }
    }
    let letters: Vec<Letter> = vs.iter().zip(lambdas).map(|(v, l)| Letter::new(v.clone(), l.clone())).collect();
    evaluate_letters(p, &letters, ring)
}
