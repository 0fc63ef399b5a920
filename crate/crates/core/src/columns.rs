//! Column vectors, their products, long products and balancedness.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::linalg::{self, IVec};
use crate::par;
use crate::polytope::LatticePolytope;

/// A column vector together with its base facet `P_v`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ColumnVector {
    pub v: IVec,
    pub base: usize,
}

/// Facet criterion: the unique facet with pairing `-1`, provided all other
/// pairings are nonnegative.
pub fn facet_criterion(p: &LatticePolytope, v: &[i64]) -> Option<usize> {
    if linalg::is_zero(v) {
        return None;
    }
    let mut base = None;
    for (i, f) in p.facets().iter().enumerate() {
        match f.pairing(v) {
            -1 if base.is_none() => base = Some(i),
            x if x < 0 => return None,
            _ => {}
        }
    }
    base
}

/// Definitional criterion: the facets `F` such that `x + v ∈ P` for every
/// lattice point `x` off `F`.
pub fn definitional_bases(p: &LatticePolytope, v: &[i64]) -> Vec<usize> {
    if linalg::is_zero(v) {
        return Vec::new();
    }
    (0..p.facets().len())
        .filter(|&i| {
            let f = p.facet(i);
            p.lattice_points()
                .iter()
                .filter(|x| !f.contains(x))
                .all(|x| p.contains_lattice_point(&linalg::add(x, v)))
        })
        .collect()
}

/// Nonzero differences of lattice points, sorted.
pub fn candidate_vectors(p: &LatticePolytope) -> Vec<IVec> {
    let pts = p.lattice_points();
    let mut set = HashSet::new();
    for a in pts {
        for b in pts {
            if a != b {
                set.insert(linalg::sub(a, b));
            }
        }
    }
    let mut out: Vec<IVec> = set.into_iter().collect();
    out.sort();
    out
}

/// `Col(P)` with its pairing and product tables.
#[derive(Debug, Clone)]
pub struct ColSet {
    polytope: Arc<LatticePolytope>,
    vectors: Vec<ColumnVector>,
    index: HashMap<IVec, usize>,
    /// `pairing[i][j] = ⟨P_{v_i}, v_j⟩`
    pairing: Vec<Vec<i64>>,
    products: Vec<Vec<Option<usize>>>,
}

/// Outcome of a long product.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LongProduct {
    Strong(ColumnVector),
    /// Exists for the recorded bracket structure but not strongly.
    WeakOnly { value: ColumnVector, bracket: String },
    None,
}

impl LongProduct {
    pub fn value(&self) -> Option<&ColumnVector> {
        match self {
            LongProduct::Strong(v) | LongProduct::WeakOnly { value: v, .. } => Some(v),
            LongProduct::None => None,
        }
    }

    pub fn mode(&self) -> &'static str {
        match self {
            LongProduct::Strong(_) => "strong",
            LongProduct::WeakOnly { .. } => "weak-only",
            LongProduct::None => "none",
        }
    }
}

impl ColSet {
    pub fn new(polytope: Arc<LatticePolytope>) -> Self {
        let candidates = candidate_vectors(&polytope);
        let bases = par::map(&candidates, |v| facet_criterion(&polytope, v));
        let vectors: Vec<ColumnVector> = candidates
            .into_iter()
            .zip(bases)
            .filter_map(|(v, b)| b.map(|base| ColumnVector { v, base }))
            .collect();
        let index = vectors
            .iter()
            .enumerate()
            .map(|(i, c)| (c.v.clone(), i))
            .collect::<HashMap<_, _>>();
        let pairing: Vec<Vec<i64>> = vectors
            .iter()
            .map(|u| {
                let f = polytope.facet(u.base);
                vectors.iter().map(|v| f.pairing(&v.v)).collect()
            })
            .collect();
        let products = (0..vectors.len())
            .map(|i| {
                (0..vectors.len())
                    .map(|j| {
                        let s = linalg::add(&vectors[i].v, &vectors[j].v);
                        if linalg::is_zero(&s) || pairing[j][i] <= 0 {
                            None
                        } else {
                            index.get(&s).copied()
                        }
                    })
                    .collect()
            })
            .collect();
        ColSet {
            polytope,
            vectors,
            index,
            pairing,
            products,
        }
    }

    pub fn polytope(&self) -> &LatticePolytope {
        &self.polytope
    }

    pub fn polytope_arc(&self) -> &Arc<LatticePolytope> {
        &self.polytope
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[ColumnVector] {
        &self.vectors
    }

    pub fn get(&self, i: usize) -> &ColumnVector {
        &self.vectors[i]
    }

    pub fn coords(&self, i: usize) -> &IVec {
        &self.vectors[i].v
    }

    pub fn base(&self, i: usize) -> usize {
        self.vectors[i].base
    }

    pub fn find(&self, v: &[i64]) -> Option<usize> {
        self.index.get(v).copied()
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        self.index.contains_key(v)
    }

    /// `⟨P_{v_i}, v_j⟩`.
    pub fn pairing(&self, i: usize, j: usize) -> i64 {
        self.pairing[i][j]
    }

    pub fn pairing_table(&self) -> &[Vec<i64>] {
        &self.pairing
    }

    /// Index of `v_i v_j` if the product exists.
    pub fn product(&self, i: usize, j: usize) -> Option<usize> {
        self.products[i][j]
    }

    /// All existing products as `(i, j, ij)` triples.
    pub fn product_triples(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.len() {
            for j in 0..self.len() {
                if let Some(k) = self.products[i][j] {
                    out.push((i, j, k));
                }
            }
        }
        out
    }

    /// Product existence by the point-shift form: `u + v ≠ 0` and
    /// `x + u` avoids `P_v` for every lattice point `x` off `P_u`.
    pub fn product_definitional(&self, i: usize, j: usize) -> bool {
        let (u, v) = (&self.vectors[i], &self.vectors[j]);
        if linalg::is_zero(&linalg::add(&u.v, &v.v)) {
            return false;
        }
        let p = &self.polytope;
        let (fu, fv) = (p.facet(u.base), p.facet(v.base));
        p.lattice_points()
            .iter()
            .filter(|x| !fu.contains(x))
            .all(|x| !fv.contains(&linalg::add(x, &u.v)))
    }

    pub fn is_invertible(&self, i: usize) -> bool {
        self.contains(&linalg::neg(&self.vectors[i].v))
    }

    /// The facets occurring as base facets, sorted.
    pub fn base_facets(&self) -> Vec<usize> {
        self.vectors
            .iter()
            .map(|c| c.base)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    }

    /// Terminal: no base facet pairs positively with the vector.
    pub fn is_terminal(&self, i: usize) -> bool {
        let v = &self.vectors[i].v;
        self.base_facets()
            .into_iter()
            .all(|f| self.polytope.facet(f).pairing(v) <= 0)
    }

    /// Base facets pairing to `1` with `v_i`. For a non-terminal vector of a
    /// Col-divisible polytope this is the single upper facet `P^v`.
    pub fn upper_facets(&self, i: usize) -> Vec<usize> {
        let v = &self.vectors[i].v;
        self.base_facets()
            .into_iter()
            .filter(|&f| self.polytope.facet(f).pairing(v) == 1)
            .collect()
    }

    /// Balancedness with the first violating pair `(u, v)`, `⟨P_u, v⟩ ≥ 2`.
    pub fn balance_witness(&self) -> Option<(usize, usize)> {
        for i in 0..self.len() {
            for j in 0..self.len() {
                if self.pairing[i][j] > 1 {
                    return Some((i, j));
                }
            }
        }
        None
    }

    pub fn is_balanced(&self) -> bool {
        self.balance_witness().is_none()
    }

    /// Long product of the listed vectors (indices into the set).
    pub fn long_product(&self, vs: &[usize]) -> LongProduct {
        if vs.is_empty() {
            return LongProduct::None;
        }
        let n = self.polytope.dim();
        let sum = |a: usize, b: usize| -> IVec {
            vs[a..=b].iter().fold(vec![0; n], |acc, &k| linalg::add(&acc, &self.vectors[k].v))
        };
        let m = vs.len();
        let consecutive = vs.windows(2).all(|w| self.products[w[0]][w[1]].is_some());
        let segments_nonzero = (0..m).all(|a| (a..m).all(|b| !linalg::is_zero(&sum(a, b))));
        let total = sum(0, m - 1);
        if consecutive && segments_nonzero {
            // the value is a column vector with base P_{v_1}
            return match self.find(&total) {
                Some(k) if self.vectors[k].base == self.vectors[vs[0]].base => {
                    LongProduct::Strong(self.vectors[k].clone())
                }
                _ => LongProduct::None,
            };
        }
        // bracket structures: ok[a][b] holds a bracket string when v_a..v_b evaluates
        let mut ok: Vec<Vec<Option<String>>> = vec![vec![None; m]; m];
        for (a, row) in ok.iter_mut().enumerate() {
            row[a] = Some(format!("{:?}", self.vectors[vs[a]].v));
        }
        for len in 2..=m {
            for a in 0..=m - len {
                let b = a + len - 1;
                let s = sum(a, b);
                let Some(k) = self.find(&s) else { continue };
                if self.vectors[k].base != self.vectors[vs[a]].base {
                    continue;
                }
                for c in a..b {
                    if let (Some(l), Some(r)) = (&ok[a][c], &ok[c + 1][b]) {
                        let left = self.find(&sum(a, c));
                        let right = self.find(&sum(c + 1, b));
                        if let (Some(li), Some(ri)) = (left, right) {
                            if self.products[li][ri] == Some(k) {
                                ok[a][b] = Some(format!("({l}{r})"));
                                break;
                            }
                        }
                    }
                }
            }
        }
        match (&ok[0][m - 1], self.find(&total)) {
            (Some(br), Some(k)) => LongProduct::WeakOnly {
                value: self.vectors[k].clone(),
                bracket: br.clone(),
            },
            _ => LongProduct::None,
        }
    }
}

/// `Col(P)` for a polytope.
pub fn column_vectors(p: &LatticePolytope) -> ColSet {
    ColSet::new(Arc::new(p.clone()))
}
