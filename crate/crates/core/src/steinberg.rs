//! Formal Steinberg words: reduction, evaluation and K₂ screening.

use std::sync::Arc;

use serde::Serialize;

use crate::autos::{commutator_sign, evaluate_letters, GradedAutomorphism, Letter};
use crate::columns::{facet_criterion, ColSet};
use crate::error::{Error, Result};
use crate::linalg::{self, IVec};
use crate::polytope::LatticePolytope;
use crate::ring::Ring;
use crate::triangular::{rewrite, CanonicalForm, Formal, LayerStructure};

/// Most rewrites a relational reduction performs before returning.
pub const RELATIONAL_CAP: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ReduceLevel {
    /// Merge equal neighbours and drop zero letters.
    Free,
    /// Also reorder neighbours by the commuting and commutator relations.
    Relational,
}

fn sort_key(cols: &ColSet, v: &[i64]) -> (IVec, usize) {
    (v.to_vec(), cols.find(v).map_or(usize::MAX, |k| cols.base(k)))
}

fn free_pass(word: &mut Vec<Letter>, ring: &Ring) -> bool {
    let mut out: Vec<Letter> = Vec::with_capacity(word.len());
    let mut changed = false;
    for l in word.drain(..) {
        if ring.is_zero(&l.coef) {
            changed = true;
            continue;
        }
        match out.last_mut() {
            Some(prev) if prev.v == l.v => {
                prev.coef = ring.add(&prev.coef, &l.coef);
                if ring.is_zero(&prev.coef) {
                    out.pop();
                }
                changed = true;
            }
            _ => out.push(l),
        }
    }
    *word = out;
    changed
}

/// Rewrites a word without changing its value. Relational rewriting is only
/// applied when `cols` belongs to a balanced polytope, where the commutator
/// relations hold; it is a heuristic normalizer, not a decision procedure.
pub fn reduce(word: &[Letter], level: ReduceLevel, cols: &ColSet, ring: &Ring) -> Vec<Letter> {
    let mut w = word.to_vec();
    free_pass(&mut w, ring);
    if level == ReduceLevel::Free || !cols.is_balanced() {
        return w;
    }
    let s = commutator_sign();
    for _ in 0..RELATIONAL_CAP {
        let step = (0..w.len().saturating_sub(1)).find_map(|i| {
            let (a, b) = (&w[i], &w[i + 1]);
            if sort_key(cols, &b.v) >= sort_key(cols, &a.v) {
                return None;
            }
            let sum = linalg::add(&a.v, &b.v);
            if linalg::is_zero(&sum) {
                return None;
            }
            if !cols.contains(&sum) {
                return Some((i, vec![b.clone(), a.clone()]));
            }
            let (ai, bi) = (cols.find(&a.v)?, cols.find(&b.v)?);
            let lm = ring.mul(&a.coef, &b.coef);
            // x_a x_b = x_c^κ x_b x_a
            let kappa = if cols.product(ai, bi).is_some() {
                ring.mul(&ring.from_i64(s), &lm)
            } else if cols.product(bi, ai).is_some() {
                ring.mul(&ring.from_i64(-s), &lm)
            } else {
                return None;
            };
            Some((i, vec![Letter::new(sum, kappa), b.clone(), a.clone()]))
        });
        let Some((i, repl)) = step else { break };
        w.splice(i..i + 2, repl);
        free_pass(&mut w, ring);
    }
    w
}

/// Evaluates a word on a stage; every letter must be a column vector there.
pub fn evaluate(word: &[Letter], ring: &Ring, stage: &Arc<LatticePolytope>) -> Result<GradedAutomorphism> {
    if let Some(l) = word.iter().find(|l| facet_criterion(stage, &l.v).is_none()) {
        return Err(Error::StageTooSmall(l.v.clone()));
    }
    evaluate_letters(stage, word, ring)
}

/// Canonical form computed by the relations alone (no matrices).
pub fn canonicalize_formal(word: &[Letter], ls: &LayerStructure, ring: &Ring) -> Result<CanonicalForm> {
    rewrite(ls, ring, word, 1, &mut Formal(ring))
}

#[derive(Debug, Clone, Serialize)]
pub struct StageVerdict {
    pub stage: usize,
    pub dim: usize,
    /// `None` when some letter is not a column vector of the stage.
    pub identity: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct K2Report {
    pub stages: Vec<StageVerdict>,
    pub evaluates_to_identity_on_stages: bool,
    pub freely_trivial: bool,
    pub relationally_trivial: bool,
    /// Identity on every tested stage without being relationally trivial.
    pub k2_candidate: bool,
}

fn pad(v: &[i64], n: usize) -> IVec {
    let mut y = v.to_vec();
    y.resize(n, 0);
    y
}

/// Evaluates a word (in base coordinates) on each given stage and reports
/// whether it is trivial there and under reduction.
pub fn k2_screen(word: &[Letter], ring: &Ring, base: &ColSet, stages: &[(usize, Arc<LatticePolytope>)]) -> Result<K2Report> {
    let mut verdicts = Vec::new();
    for (j, p) in stages {
        let n = p.dim();
        let lifted: Vec<Letter> = word.iter().map(|l| Letter::new(pad(&l.v, n), l.coef.clone())).collect();
        let identity = match evaluate(&lifted, ring, p) {
            Ok(f) => Some(f.is_identity()),
            Err(Error::StageTooSmall(_)) => None,
            Err(e) => return Err(e),
        };
        verdicts.push(StageVerdict {
            stage: *j,
            dim: n,
            identity,
        });
    }
    let on_stages = verdicts.iter().all(|v| v.identity == Some(true));
    let freely_trivial = reduce(word, ReduceLevel::Free, base, ring).is_empty();
    let relationally_trivial = reduce(word, ReduceLevel::Relational, base, ring).is_empty();
    Ok(K2Report {
        stages: verdicts,
        evaluates_to_identity_on_stages: on_stages,
        freely_trivial,
        relationally_trivial,
        k2_candidate: on_stages && !relationally_trivial,
    })
}

/// Instances of the defining relations for the given coefficients:
/// additivity for every vector, and the commutator relation for every
/// ordered pair with `u + v ≠ 0` that is either a product or not a column
/// vector.
pub fn relators(cols: &ColSet, ring: &Ring, lambda: &crate::ring::Elem, mu: &crate::ring::Elem) -> Vec<Vec<Letter>> {
    let s = commutator_sign();
    let mut out = Vec::new();
    let neg = |x: &crate::ring::Elem| ring.neg(x);
    for i in 0..cols.len() {
        let v = cols.coords(i).clone();
        out.push(vec![
            Letter::new(v.clone(), lambda.clone()),
            Letter::new(v.clone(), mu.clone()),
            Letter::new(v, neg(&ring.add(lambda, mu))),
        ]);
    }
    for i in 0..cols.len() {
        for j in 0..cols.len() {
            let (u, v) = (cols.coords(i), cols.coords(j));
            let sum = linalg::add(u, v);
            if linalg::is_zero(&sum) {
                continue;
            }
            let mut w = vec![
                Letter::new(u.clone(), lambda.clone()),
                Letter::new(v.clone(), mu.clone()),
                Letter::new(u.clone(), neg(lambda)),
                Letter::new(v.clone(), neg(mu)),
            ];
            if let Some(k) = cols.product(i, j) {
                let c = ring.mul(&ring.from_i64(-s), &ring.mul(lambda, mu));
                w.push(Letter::new(cols.coords(k).clone(), c));
            } else if cols.contains(&sum) {
                continue;
            }
            out.push(w);
        }
    }
    out
}
