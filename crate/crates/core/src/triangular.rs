//! Layers of triangular groups and their canonical representation.
//!
//! Edges of the supporting graph get a degree (the length of the longest path
//! ending with them); an element of the closure lives in the layer of its
//! first edge. A word is brought into canonical form by moving letters of
//! lower layers to the left, inserting the commutator corrections, and then
//! merging letters within each layer (they commute).

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use rand::Rng;
use serde::Serialize;

use crate::autos::{self, commutator_sign, elementary, evaluate_letters, GradedAutomorphism, Letter};
use crate::error::{Error, Result};
use crate::linalg::{self, IVec};
use crate::polytope::LatticePolytope;
use crate::rigid::RigidSystem;
use crate::ring::{Elem, Ring};

/// Most rewrite steps a single canonicalization may take.
pub const REWRITE_CAP: usize = 100_000;

#[derive(Debug, Clone)]
pub struct LayerStructure {
    system: RigidSystem,
    /// Degree of each edge of the supporting graph.
    pub edge_degree: Vec<usize>,
    /// Largest degree (0 for the empty system).
    pub t: usize,
    layer: HashMap<IVec, usize>,
    /// `upper[r - 1]` is `[V]^r`, sorted.
    pub upper: Vec<Vec<IVec>>,
}

pub fn layer_partition(s: &RigidSystem) -> LayerStructure {
    let ht = s.graph.heights();
    let edge_degree: Vec<usize> = s.graph.edges.iter().map(|&(src, _)| ht[src] + 1).collect();
    let t = edge_degree.iter().copied().max().unwrap_or(0);
    let mut upper = vec![Vec::new(); t];
    let mut layer = HashMap::new();
    for (v, &(src, _)) in s.closure_coords().into_iter().zip(&s.endpoints) {
        let r = ht[src] + 1;
        upper[r - 1].push(v.clone());
        layer.insert(v, r);
    }
    upper.iter_mut().for_each(|l| l.sort());
    LayerStructure {
        system: s.clone(),
        edge_degree,
        t,
        layer,
        upper,
    }
}

impl LayerStructure {
    pub fn system(&self) -> &RigidSystem {
        &self.system
    }

    pub fn polytope(&self) -> &Arc<LatticePolytope> {
        self.system.cols().polytope_arc()
    }

    pub fn layer_of(&self, v: &[i64]) -> Option<usize> {
        self.layer.get(v).copied()
    }

    /// `[V]^r`.
    pub fn upper_layer(&self, r: usize) -> &[IVec] {
        r.checked_sub(1).and_then(|i| self.upper.get(i)).map_or(&[], |v| v.as_slice())
    }

    /// `[V]_r`: elements in layers `r` and above.
    pub fn lower_set(&self, r: usize) -> Vec<IVec> {
        (r.max(1)..=self.t).flat_map(|s| self.upper_layer(s).iter().cloned()).collect()
    }

    /// `N_r = |[V]^r|`.
    pub fn n_r(&self, r: usize) -> usize {
        self.upper_layer(r).len()
    }

    /// `ab` when it exists inside the closure.
    pub fn product(&self, a: &[i64], b: &[i64]) -> Option<IVec> {
        let cols = self.system.cols();
        let k = cols.product(cols.find(a)?, cols.find(b)?)?;
        let w = cols.coords(k);
        self.system.contains(w).then(|| w.clone())
    }
}

/// Exponents of `e_v^{·}` per layer; zero entries and empty layers omitted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalForm {
    pub layers: Vec<(usize, Vec<(IVec, Elem)>)>,
}

impl CanonicalForm {
    pub fn is_trivial(&self) -> bool {
        self.layers.is_empty()
    }

    /// The canonical word `ε_r ∘ … ∘ ε_t`.
    pub fn letters(&self) -> Vec<Letter> {
        self.layers
            .iter()
            .flat_map(|(_, es)| es.iter().map(|(v, c)| Letter::new(v.clone(), c.clone())))
            .collect()
    }

    pub fn support(&self) -> Vec<IVec> {
        self.layers.iter().flat_map(|(_, es)| es.iter().map(|(v, _)| v.clone())).collect()
    }

    /// Entries of layer `r`.
    pub fn layer(&self, r: usize) -> &[(IVec, Elem)] {
        self.layers.iter().find(|(s, _)| *s == r).map_or(&[], |(_, e)| e.as_slice())
    }

    /// The form with layer `r` removed.
    pub fn without_layer(&self, r: usize) -> CanonicalForm {
        CanonicalForm {
            layers: self.layers.iter().filter(|(s, _)| *s != r).cloned().collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FormEntry {
    pub v: IVec,
    pub coef: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct FormLayer {
    pub layer: usize,
    pub entries: Vec<FormEntry>,
}

impl CanonicalForm {
    /// JSON-ready view with coefficients printed in the ring's notation.
    pub fn to_view(&self, ring: &Ring) -> Vec<FormLayer> {
        self.layers
            .iter()
            .map(|(r, es)| FormLayer {
                layer: *r,
                entries: es
                    .iter()
                    .map(|(v, c)| FormEntry {
                        v: v.clone(),
                        coef: ring.format(c),
                    })
                    .collect(),
            })
            .collect()
    }
}

/// How a commutator correction is obtained during rewriting.
pub(crate) trait Correction {
    /// Coefficient `κ` of `e_c^κ` in `x_b^μ x_a^λ = x_a^λ x_c^κ x_b^μ`, where
    /// `c` is `ab` (`ab_case`) or `ba`.
    fn kappa(&mut self, a: &Letter, b: &Letter, c: &IVec, ab_case: bool) -> Result<Elem>;
}

/// Corrections read from the relation with the oracle-derived sign.
pub(crate) struct Formal<'a>(pub &'a Ring);

impl Correction for Formal<'_> {
    fn kappa(&mut self, a: &Letter, b: &Letter, _c: &IVec, ab_case: bool) -> Result<Elem> {
        let r = self.0;
        let s = if ab_case { -commutator_sign() } else { commutator_sign() };
        Ok(r.mul(&r.from_i64(s), &r.mul(&a.coef, &b.coef)))
    }
}

/// Corrections computed from matrices and checked to be elementary.
struct MatrixBacked<'a> {
    p: &'a Arc<LatticePolytope>,
    ring: &'a Ring,
}

impl Correction for MatrixBacked<'_> {
    fn kappa(&mut self, a: &Letter, b: &Letter, c: &IVec, _ab_case: bool) -> Result<Elem> {
        let (p, r) = (self.p, self.ring);
        let elem = |l: &Letter, sign: i64| elementary(p, &l.v, &r.mul(&r.from_i64(sign), &l.coef), r);
        // x_b x_a = x_a C x_b, so C = a⁻¹ b a b⁻¹
        let m = [elem(a, -1)?, elem(b, 1)?, elem(a, 1)?, elem(b, -1)?];
        let corr = m[1..].iter().try_fold(m[0].clone(), |acc, x| autos::compose(&acc, x))?;
        let base = crate::columns::facet_criterion(p, c).ok_or_else(|| Error::StageTooSmall(c.clone()))?;
        let x = p
            .lattice_points()
            .iter()
            .find(|x| p.facet(base).height(x, 1) == 1)
            .ok_or_else(|| Error::ValidationFailure(format!("no monomial of height 1 for {c:?}")))?;
        let i = p.point_index(&linalg::add(x, c)).unwrap();
        let j = p.point_index(x).unwrap();
        let kappa = corr.matrix().get(i, j).clone();
        if !autos::equals(&corr, &elementary(p, c, &kappa, r)?)? {
            return Err(Error::ValidationFailure(format!(
                "commutator correction at {c:?} is not elementary"
            )));
        }
        Ok(kappa)
    }
}

fn layer_checked(ls: &LayerStructure, v: &[i64], r: usize) -> Result<usize> {
    match ls.layer_of(v) {
        Some(s) if s >= r => Ok(s),
        _ => Err(Error::LetterOutsideSystem(v.to_vec())),
    }
}

pub(crate) fn rewrite<C: Correction>(
    ls: &LayerStructure,
    ring: &Ring,
    word: &[Letter],
    r: usize,
    corr: &mut C,
) -> Result<CanonicalForm> {
    let mut w: Vec<(usize, Letter)> = Vec::with_capacity(word.len());
    for l in word {
        let s = layer_checked(ls, &l.v, r)?;
        if !ring.is_zero(&l.coef) {
            w.push((s, l.clone()));
        }
    }
    let mut steps = 0;
    while let Some(i) = (0..w.len().saturating_sub(1)).find(|&i| w[i].0 > w[i + 1].0) {
        steps += 1;
        if steps > REWRITE_CAP {
            return Err(Error::ResourceBound(format!("canonicalization exceeded {REWRITE_CAP} steps")));
        }
        let (b, a) = (w[i].clone(), w[i + 1].clone());
        let mut repl = vec![a.clone()];
        let found = match ls.product(&a.1.v, &b.1.v) {
            Some(c) => Some((c, true)),
            None => ls.product(&b.1.v, &a.1.v).map(|c| (c, false)),
        };
        if let Some((c, ab_case)) = found {
            let kappa = corr.kappa(&a.1, &b.1, &c, ab_case)?;
            if !ring.is_zero(&kappa) {
                let s = layer_checked(ls, &c, r)?;
                repl.push((s, Letter::new(c, kappa)));
            }
        }
        repl.push(b);
        w.splice(i..i + 2, repl);
    }
    let mut layers: BTreeMap<usize, BTreeMap<IVec, Elem>> = BTreeMap::new();
    for (s, l) in w {
        let slot = layers.entry(s).or_default();
        let acc = slot.remove(&l.v).unwrap_or_else(|| ring.zero());
        let sum = ring.add(&acc, &l.coef);
        if !ring.is_zero(&sum) {
            slot.insert(l.v, sum);
        }
    }
    Ok(CanonicalForm {
        layers: layers
            .into_iter()
            .filter(|(_, m)| !m.is_empty())
            .map(|(s, m)| (s, m.into_iter().collect()))
            .collect(),
    })
}

/// Canonical form of a word over `[V]_r`, with corrections computed from
/// matrices; the result is checked against the word's matrix.
pub fn canonicalize(ls: &LayerStructure, word: &[Letter], ring: &Ring, r: usize) -> Result<CanonicalForm> {
    let p = ls.polytope().clone();
    let form = rewrite(ls, ring, word, r, &mut MatrixBacked { p: &p, ring })?;
    let lhs = evaluate_letters(&p, word, ring)?;
    let rhs = evaluate_form(ls, &form, ring)?;
    if !autos::equals(&lhs, &rhs)? {
        return Err(Error::ValidationFailure("canonical form evaluates to a different matrix".into()));
    }
    Ok(form)
}

pub fn evaluate_form(ls: &LayerStructure, form: &CanonicalForm, ring: &Ring) -> Result<GradedAutomorphism> {
    evaluate_letters(ls.polytope(), &form.letters(), ring)
}

/// Equality in `G(R, V)` by canonical forms, cross-checked with matrices.
pub fn equals_in_g(ls: &LayerStructure, w1: &[Letter], w2: &[Letter], ring: &Ring) -> Result<bool> {
    let by_form = canonicalize(ls, w1, ring, 1)? == canonicalize(ls, w2, ring, 1)?;
    let p = ls.polytope();
    let by_matrix = autos::equals(&evaluate_letters(p, w1, ring)?, &evaluate_letters(p, w2, ring)?)?;
    if by_form != by_matrix {
        return Err(Error::ValidationFailure(
            "canonical forms and matrices disagree on equality".into(),
        ));
    }
    Ok(by_form)
}

/// A vertex bijection between supporting graphs, if one exists (brute force
/// over permutations; intended for small graphs).
pub fn find_isomorphism(s1: &RigidSystem, s2: &RigidSystem) -> Option<Vec<usize>> {
    let (g1, g2) = (&s1.graph, &s2.graph);
    let n = g1.vertex_count;
    if n != g2.vertex_count || g1.edges.len() != g2.edges.len() || n > 9 {
        return None;
    }
    let edges2: std::collections::HashSet<(usize, usize)> = g2.edges.iter().copied().collect();
    let mut perm: Vec<usize> = (0..n).collect();
    loop {
        if g1.edges.iter().all(|&(a, b)| edges2.contains(&(perm[a], perm[b]))) {
            return Some(perm);
        }
        // next lexicographic permutation
        let i = (1..n).rev().find(|&i| perm[i - 1] < perm[i])?;
        let j = (i..n).rev().find(|&j| perm[j] > perm[i - 1]).unwrap();
        perm.swap(i - 1, j);
        perm[i..].reverse();
    }
}

/// Relabels letters along a graph isomorphism `iso` (vertices of the first
/// graph to vertices of the second).
pub fn transport(sp: &RigidSystem, sq: &RigidSystem, iso: &[usize]) -> Result<HashMap<IVec, IVec>> {
    let (g1, g2) = (&sp.graph, &sq.graph);
    let n = g1.vertex_count;
    let mut seen = vec![false; n];
    let bijective = iso.len() == n && n == g2.vertex_count && iso.iter().all(|&x| x < n && !std::mem::replace(&mut seen[x], true));
    if !bijective || g1.edges.len() != g2.edges.len() {
        return Err(Error::NotIsomorphic("vertex map is not a bijection".into()));
    }
    if let Some(&(a, b)) = g1.edges.iter().find(|&&(a, b)| !g2.edges.contains(&(iso[a], iso[b]))) {
        return Err(Error::NotIsomorphic(format!("edge ({a}, {b}) has no image")));
    }
    let mut map = HashMap::new();
    for (v, &(s, t)) in sp.closure_coords().into_iter().zip(&sp.endpoints) {
        let k = sq
            .element_at((iso[s], iso[t]))
            .ok_or_else(|| Error::NotIsomorphic(format!("no element between the images of {v:?}'s endpoints")))?;
        map.insert(v, sq.cols().coords(k).clone());
    }
    Ok(map)
}

pub fn transport_word(map: &HashMap<IVec, IVec>, word: &[Letter]) -> Result<Vec<Letter>> {
    word.iter()
        .map(|l| {
            map.get(&l.v)
                .map(|v| Letter::new(v.clone(), l.coef.clone()))
                .ok_or_else(|| Error::LetterOutsideSystem(l.v.clone()))
        })
        .collect()
}

/// Whether the element given by a word over `[U]` lies in `G(R, [U] ∩ [V])`,
/// read off its canonical form in `G(R, U)`.
pub fn intersection_membership(lu: &LayerStructure, lv: &LayerStructure, word: &[Letter], ring: &Ring) -> Result<bool> {
    let form = canonicalize(lu, word, ring, 1)?;
    Ok(form.support().iter().all(|v| lv.system().contains(v)))
}

/// A random word of `len` letters drawn from `pool`.
pub fn random_word<R: Rng + ?Sized>(rng: &mut R, pool: &[IVec], len: usize, ring: &Ring) -> Vec<Letter> {
    if pool.is_empty() {
        return Vec::new();
    }
    (0..len)
        .map(|_| Letter::new(pool[rng.gen_range(0..pool.len())].clone(), ring.sample(rng)))
        .collect()
}
