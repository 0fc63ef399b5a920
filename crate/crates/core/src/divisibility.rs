//! Col-divisibility (CD1, CD2) and the embedding of Col-divisible column
//! structures into a unit simplex.

use std::sync::Arc;

use serde::Serialize;

use crate::columns::ColSet;
use crate::corpus;
use crate::error::{Error, Result};
use crate::linalg::{self, IVec};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "axiom")]
pub enum Violation {
    /// `ac` and `bc` exist, `a ≠ b`, but neither `a = db` nor `b = da`.
    Cd1 { a: IVec, b: IVec, c: IVec },
    /// `ab = cd`, `a ≠ c`, and no `t` divides as required.
    Cd2 { a: IVec, b: IVec, c: IVec, d: IVec },
}

#[derive(Debug, Clone, Serialize)]
pub struct DivisibilityReport {
    pub cd1_ok: bool,
    pub cd2_ok: bool,
    pub violations: Vec<Violation>,
    /// Cases where an invertibility shortcut already guaranteed the axiom.
    pub shortcut_cases: usize,
}

impl DivisibilityReport {
    pub fn is_divisible(&self) -> bool {
        self.cd1_ok && self.cd2_ok
    }
}

/// `t` with `x t = y`, i.e. `t = y - x` when that product exists.
fn right_divisor(cols: &ColSet, x: usize, y: usize) -> Option<usize> {
    let t = cols.find(&linalg::sub(cols.coords(y), cols.coords(x)))?;
    (cols.product(x, t) == Some(y)).then_some(t)
}

/// `t` with `t x = y`.
fn left_divisor(cols: &ColSet, x: usize, y: usize) -> Option<usize> {
    let t = cols.find(&linalg::sub(cols.coords(y), cols.coords(x)))?;
    (cols.product(t, x) == Some(y)).then_some(t)
}

/// Witness for CD1 on `(a, b)`: `d` with `a = db` or `b = da`.
pub fn cd1_divisor(cols: &ColSet, a: usize, b: usize) -> Option<(usize, bool)> {
    if let Some(d) = left_divisor(cols, b, a) {
        return Some((d, true));
    }
    left_divisor(cols, a, b).map(|d| (d, false))
}

/// Witness for CD2 on `ab = cd`: `t` with `at = c, td = b` (flag `true`)
/// or `ct = a, tb = d` (flag `false`).
pub fn cd2_divisor(cols: &ColSet, a: usize, b: usize, c: usize, d: usize) -> Option<(usize, bool)> {
    if let Some(t) = right_divisor(cols, a, c) {
        if cols.product(t, d) == Some(b) {
            return Some((t, true));
        }
    }
    if let Some(t) = right_divisor(cols, c, a) {
        if cols.product(t, b) == Some(d) {
            return Some((t, false));
        }
    }
    None
}

/// Exhaustive check of CD1 and CD2. Requires a balanced polytope.
pub fn col_divisibility(cols: &ColSet) -> Result<DivisibilityReport> {
    if !cols.is_balanced() {
        return Err(Error::NotBalanced);
    }
    let n = cols.len();
    let mut violations = Vec::new();
    let mut shortcut_cases = 0;
    let (mut cd1_ok, mut cd2_ok) = (true, true);
    for c in 0..n {
        let into: Vec<usize> = (0..n).filter(|&x| cols.product(x, c).is_some()).collect();
        for (i, &a) in into.iter().enumerate() {
            for &b in &into[i + 1..] {
                if cols.is_invertible(a) || cols.is_invertible(b) {
                    shortcut_cases += 1;
                }
                if cd1_divisor(cols, a, b).is_none() {
                    cd1_ok = false;
                    violations.push(Violation::Cd1 {
                        a: cols.coords(a).clone(),
                        b: cols.coords(b).clone(),
                        c: cols.coords(c).clone(),
                    });
                }
            }
        }
    }
    let triples = cols.product_triples();
    for &(a, b, ab) in &triples {
        for &(c, d, cd) in &triples {
            if ab != cd || a == c {
                continue;
            }
            if [a, b, c, d].iter().any(|&x| cols.is_invertible(x)) {
                shortcut_cases += 1;
            }
            if cd2_divisor(cols, a, b, c, d).is_none() {
                cd2_ok = false;
                violations.push(Violation::Cd2 {
                    a: cols.coords(a).clone(),
                    b: cols.coords(b).clone(),
                    c: cols.coords(c).clone(),
                    d: cols.coords(d).clone(),
                });
            }
        }
    }
    Ok(DivisibilityReport {
        cd1_ok,
        cd2_ok,
        violations,
        shortcut_cases,
    })
}

/// Facet labels of the target simplex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SimplexLabel {
    /// One label per base facet of `P`.
    Facet(usize),
    /// One label per clique of terminal vectors.
    Clique(usize),
}

#[derive(Debug, Clone)]
pub struct SimplexEmbedding {
    pub simplex: ColSet,
    pub labels: Vec<SimplexLabel>,
    /// Terminal cliques as lists of indices into `Col(P)`.
    pub cliques: Vec<Vec<usize>>,
    /// `iota[i]` is the index in `Col(Δ_m)` of the image of `v_i`.
    pub iota: Vec<usize>,
}

impl SimplexEmbedding {
    pub fn dim(&self) -> usize {
        self.simplex.polytope().dim()
    }

    pub fn image(&self, i: usize) -> &IVec {
        self.simplex.coords(self.iota[i])
    }
}

fn find_root(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut y = x;
    while parent[y] != r {
        let next = parent[y];
        parent[y] = r;
        y = next;
    }
    r
}

/// Terminal vectors grouped into classes generated by the neighbor relation
/// (`u = tv` or `v = tu`).
pub fn terminal_cliques(cols: &ColSet) -> Vec<Vec<usize>> {
    let n = cols.len();
    let terminal: Vec<bool> = (0..n).map(|i| cols.is_terminal(i)).collect();
    let mut parent: Vec<usize> = (0..n).collect();
    for u in 0..n {
        for v in 0..n {
            if u != v && terminal[u] && terminal[v] && left_divisor(cols, v, u).is_some() {
                let (a, b) = (find_root(&mut parent, u), find_root(&mut parent, v));
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: Vec<(usize, Vec<usize>)> = Vec::new();
    for i in (0..n).filter(|&i| terminal[i]) {
        let r = find_root(&mut parent, i);
        match groups.iter_mut().find(|(root, _)| *root == r) {
            Some((_, g)) => g.push(i),
            None => groups.push((r, vec![i])),
        }
    }
    groups.into_iter().map(|(_, g)| g).collect()
}

/// Embeds `Col(P)` of a Col-divisible polytope into `Col(Δ_m)` and validates
/// pairing and product preservation.
pub fn embed_in_simplex(cols: &ColSet) -> Result<SimplexEmbedding> {
    if cols.is_empty() {
        return Err(Error::EmptyColumnSet);
    }
    if !col_divisibility(cols).is_ok_and(|r| r.is_divisible()) {
        return Err(Error::NotColDivisible);
    }
    let cliques = terminal_cliques(cols);
    let mut labels: Vec<SimplexLabel> = cols.base_facets().into_iter().map(SimplexLabel::Facet).collect();
    labels.extend((0..cliques.len()).map(SimplexLabel::Clique));
    let m = labels.len() - 1;
    if m == 0 {
        return Err(Error::ValidationFailure("simplex of dimension zero".into()));
    }
    let simplex = ColSet::new(Arc::new(corpus::simplex(m, 1)?));
    // label k ↔ vertex p_k with p_0 = 0 and p_k = e_k
    let vertex = |k: usize| -> IVec {
        let mut p = vec![0; m];
        if k > 0 {
            p[k - 1] = 1;
        }
        p
    };
    let label_of = |l: SimplexLabel| labels.iter().position(|&x| x == l).unwrap();
    let mut iota = Vec::with_capacity(cols.len());
    for i in 0..cols.len() {
        let lower = label_of(SimplexLabel::Facet(cols.base(i)));
        let upper = if cols.is_terminal(i) {
            let c = cliques.iter().position(|g| g.contains(&i)).unwrap();
            label_of(SimplexLabel::Clique(c))
        } else {
            match cols.upper_facets(i)[..] {
                [f] => label_of(SimplexLabel::Facet(f)),
                _ => {
                    return Err(Error::ValidationFailure(format!(
                        "vector {:?} has no unique upper facet",
                        cols.coords(i)
                    )))
                }
            }
        };
        let image = linalg::sub(&vertex(upper), &vertex(lower));
        let k = simplex.find(&image).ok_or_else(|| {
            Error::ValidationFailure(format!("image {image:?} is not an edge vector"))
        })?;
        iota.push(k);
    }
    let emb = SimplexEmbedding {
        simplex,
        labels,
        cliques,
        iota,
    };
    validate_embedding(cols, &emb)?;
    Ok(emb)
}

fn validate_embedding(cols: &ColSet, emb: &SimplexEmbedding) -> Result<()> {
    let n = cols.len();
    let mut seen = std::collections::HashSet::new();
    if !emb.iota.iter().all(|k| seen.insert(*k)) {
        return Err(Error::ValidationFailure("embedding is not injective".into()));
    }
    let s = &emb.simplex;
    for w in 0..n {
        for v in 0..n {
            if cols.pairing(w, v) != s.pairing(emb.iota[w], emb.iota[v]) {
                return Err(Error::ValidationFailure(format!(
                    "pairing of {:?} against the base of {:?} not preserved",
                    cols.coords(v),
                    cols.coords(w)
                )));
            }
            let lhs = cols.product(v, w).map(|k| emb.iota[k]);
            let rhs = s.product(emb.iota[v], emb.iota[w]);
            if lhs != rhs {
                return Err(Error::ValidationFailure(format!(
                    "product of {:?} and {:?} not preserved",
                    cols.coords(v),
                    cols.coords(w)
                )));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::columns::column_vectors;
    use crate::corpus::make;

    #[test]
    fn pyramid_fails_both_axioms() {
        let c = column_vectors(&make("pyr4").unwrap());
        let r = col_divisibility(&c).unwrap();
        assert!(!r.cd1_ok && !r.cd2_ok);
    }

    #[test]
    fn trapezoid_embeds_in_triangle() {
        let c = column_vectors(&make("P_trap").unwrap());
        assert!(col_divisibility(&c).unwrap().is_divisible());
        let e = embed_in_simplex(&c).unwrap();
        assert_eq!(e.dim(), 2);
        assert!(e.cliques.is_empty());
    }

    #[test]
    fn non_balanced_is_rejected() {
        let c = column_vectors(&make("P_nonrig").unwrap());
        assert_eq!(col_divisibility(&c).unwrap_err(), Error::NotBalanced);
    }
}
