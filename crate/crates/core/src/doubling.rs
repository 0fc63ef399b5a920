//! Doubling a polytope along a facet, and fair doubling spectra.
//!
//! Coordinates: with `F = {⟨a,x⟩ = b}` and a lattice vector `g` satisfying
//! `⟨a,g⟩ = 1`, a point `x` of `P` sits at `(x, 0)` and its rotated copy at
//! `x^| = (x - h g, h)` where `h = ⟨a,x⟩ - b`. The double is the wedge
//! `{(x - s g, s) : x ∈ P, 0 ≤ s ≤ h(x)}` and `δ^+ = (-g, 1)`.

use std::collections::{HashSet, VecDeque};
use std::sync::Arc;

use serde::Serialize;

use crate::columns::{facet_criterion, ColSet};
use crate::error::{Error, Result};
use crate::linalg::{self, IVec};
use crate::polytope::{Facet, LatticePolytope};

/// Default cap on the dimension of spectrum stages.
pub const DEFAULT_DIM_CEILING: usize = 8;

#[derive(Debug, Clone)]
pub struct DoubledPolytope {
    pub parent: Arc<LatticePolytope>,
    pub q: Arc<LatticePolytope>,
    /// The doubled facet `F` of the parent.
    pub facet: usize,
    /// Lattice vector with `⟨F, g⟩ = 1` fixing the coordinates.
    pub g: IVec,
    /// `psi[G]` is the facet of `Q` corresponding to facet `G` of the parent;
    /// `psi[F]` is the rotated copy `P^|`.
    pub psi: Vec<usize>,
    /// The facet `P^-` (the parent itself).
    pub lower: usize,
    /// The facet `P^|`.
    pub upper: usize,
    pub delta_plus: IVec,
}

/// Doubles `p` along facet `f`.
pub fn double(p: &Arc<LatticePolytope>, f: usize) -> Result<DoubledPolytope> {
    let n = p.dim();
    let fac = p
        .facets()
        .get(f)
        .ok_or_else(|| Error::DegenerateInput(format!("no facet with id {f}")))?
        .clone();
    let g = linalg::bezout_vector(&fac.normal);
    debug_assert_eq!(fac.pairing(&g), 1);
    let height = |x: &IVec| fac.height(x, 1);
    let lift_at = |x: &IVec, s: i64| -> IVec {
        let mut y = linalg::sub(x, &linalg::scale(&g, s));
        y.push(s);
        y
    };
    let mut facets: Vec<Facet> = p
        .facets()
        .iter()
        .enumerate()
        .map(|(i, gf)| {
            let mut normal = gf.normal.clone();
            normal.push(if i == f { 0 } else { gf.pairing(&g) });
            Facet::new(normal, gf.offset)
        })
        .collect();
    let mut bottom = vec![0; n + 1];
    bottom[n] = 1;
    facets.push(Facet::new(bottom, 0));
    let lower = facets.len() - 1;
    let mut vertices = Vec::new();
    for v in p.vertices() {
        vertices.push(lift_at(v, 0));
        let h = height(v);
        if h > 0 {
            vertices.push(lift_at(v, h));
        }
    }
    let mut points = Vec::new();
    for x in p.lattice_points() {
        for s in 0..=height(x) {
            points.push(lift_at(x, s));
        }
    }
    let q = LatticePolytope::assemble(None, n + 1, vertices, facets, points);
    let mut delta_plus = linalg::neg(&g);
    delta_plus.push(1);
    let d = DoubledPolytope {
        parent: p.clone(),
        q: Arc::new(q),
        facet: f,
        g,
        psi: (0..p.facets().len()).collect(),
        lower,
        upper: f,
        delta_plus,
    };
    d.verify_identities()?;
    Ok(d)
}

impl DoubledPolytope {
    pub fn delta_minus(&self) -> IVec {
        linalg::neg(&self.delta_plus)
    }

    /// `z ↦ (z, 0)`.
    pub fn embed(&self, z: &[i64]) -> IVec {
        let mut y = z.to_vec();
        y.push(0);
        y
    }

    /// The rotated copy `z^|` of a lattice point off the doubled facet.
    pub fn lift_point(&self, z: &[i64]) -> Result<IVec> {
        let h = self.parent.facet(self.facet).height(z, 1);
        if h == 0 {
            return Err(Error::NotLiftable(z.to_vec()));
        }
        let mut y = linalg::sub(z, &linalg::scale(&self.g, h));
        y.push(h);
        Ok(y)
    }

    /// The rotated copy `v^|` of a vector (linear part of the rotation).
    pub fn lift_vector(&self, v: &[i64]) -> IVec {
        let h = self.parent.facet(self.facet).pairing(v);
        let mut y = linalg::sub(v, &linalg::scale(&self.g, h));
        y.push(h);
        y
    }

    /// Checks `⟨Ψ(G), δ^±⟩ = 0` for `G ≠ F`, `⟨P^-, δ^+⟩ = ⟨P^|, δ^-⟩ = 1`,
    /// and `⟨G, z⟩ = ⟨Ψ(G), (z, 0)⟩`.
    pub fn verify_identities(&self) -> Result<()> {
        let q = &self.q;
        let dp = &self.delta_plus;
        let dm = self.delta_minus();
        let fail = |m: String| Err(Error::ValidationFailure(m));
        for (gi, &qi) in self.psi.iter().enumerate() {
            if gi != self.facet && (q.facet(qi).pairing(dp) != 0 || q.facet(qi).pairing(&dm) != 0) {
                return fail(format!("Ψ of facet {gi} pairs nontrivially with δ"));
            }
        }
        if q.facet(self.lower).pairing(dp) != 1 || q.facet(self.upper).pairing(&dm) != 1 {
            return fail("δ pairings with P^- / P^| differ from 1".into());
        }
        let n = self.parent.dim();
        for (gi, &qi) in self.psi.iter().enumerate() {
            for j in 0..n {
                let mut e = vec![0; n];
                e[j] = 1;
                if self.parent.facet(gi).pairing(&e) != q.facet(qi).pairing(&self.embed(&e)) {
                    return fail(format!("Ψ of facet {gi} does not extend the form"));
                }
            }
        }
        if facet_criterion(q, dp) != Some(self.upper) || facet_criterion(q, &dm) != Some(self.lower) {
            return fail("δ^± are not column vectors with the expected base facets".into());
        }
        Ok(())
    }
}

/// A column vector tracked by the fairness scheduler.
#[derive(Debug, Clone, Serialize)]
pub struct TrackedVector {
    pub coords: IVec,
    pub introduced: usize,
    /// Steps (1-based stage numbers) at which the vector's base facet was doubled.
    pub decomposed_at: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct SpectrumStage {
    pub polytope: Arc<LatticePolytope>,
    pub cols: Arc<ColSet>,
    /// The doubling that produced this stage (absent for the base stage).
    pub doubling: Option<DoubledPolytope>,
    /// Tracked vector whose base facet was doubled to produce this stage.
    pub decomposed: Option<usize>,
}

/// A lazily extended doubling spectrum with a FIFO fairness schedule.
#[derive(Debug, Clone)]
pub struct DoublingSpectrum {
    stages: Vec<SpectrumStage>,
    queue: VecDeque<usize>,
    tracked: Vec<TrackedVector>,
    ceiling: usize,
}

fn pad(v: &[i64], n: usize) -> IVec {
    let mut y = v.to_vec();
    y.resize(n, 0);
    y
}

impl DoublingSpectrum {
    pub fn new(base: LatticePolytope, ceiling: usize) -> Result<Self> {
        let polytope = Arc::new(base);
        let cols = Arc::new(ColSet::new(polytope.clone()));
        if cols.is_empty() {
            return Err(Error::EmptyColumnSet);
        }
        let tracked: Vec<TrackedVector> = cols
            .vectors()
            .iter()
            .map(|c| TrackedVector {
                coords: c.v.clone(),
                introduced: 0,
                decomposed_at: Vec::new(),
            })
            .collect();
        Ok(DoublingSpectrum {
            queue: (0..tracked.len()).collect(),
            tracked,
            stages: vec![SpectrumStage {
                polytope,
                cols,
                doubling: None,
                decomposed: None,
            }],
            ceiling,
        })
    }

    pub fn materialized(&self) -> usize {
        self.stages.len() - 1
    }

    pub fn ceiling(&self) -> usize {
        self.ceiling
    }

    pub fn tracked(&self) -> &[TrackedVector] {
        &self.tracked
    }

    pub fn stages(&self) -> &[SpectrumStage] {
        &self.stages
    }

    pub fn base(&self) -> &Arc<LatticePolytope> {
        &self.stages[0].polytope
    }

    /// Stage `j`, extending the spectrum as needed.
    pub fn stage_of(&mut self, j: usize) -> Result<&SpectrumStage> {
        while self.materialized() < j {
            self.extend()?;
        }
        Ok(&self.stages[j])
    }

    fn extend(&mut self) -> Result<()> {
        let last = self.stages.last().unwrap();
        let n = last.polytope.dim();
        if n + 1 > self.ceiling {
            return Err(Error::ResourceBound(format!(
                "stage dimension {} exceeds the ceiling {}",
                n + 1,
                self.ceiling
            )));
        }
        let id = self.queue.pop_front().expect("queue never empties");
        let v = pad(&self.tracked[id].coords, n);
        let vi = last.cols.find(&v).ok_or_else(|| {
            Error::ValidationFailure(format!("tracked vector {v:?} vanished from Col"))
        })?;
        let d = double(&last.polytope, last.cols.base(vi))?;
        let cols = Arc::new(ColSet::new(d.q.clone()));
        // Col(P_i) ⊆ Col(P_{i+1}) under the coordinate embedding
        let old: HashSet<IVec> = last.cols.vectors().iter().map(|c| d.embed(&c.v)).collect();
        if let Some(missing) = old.iter().find(|w| !cols.contains(w)) {
            return Err(Error::ValidationFailure(format!(
                "{missing:?} is not a column vector after doubling"
            )));
        }
        let stage_no = self.stages.len();
        for c in cols.vectors() {
            if !old.contains(&c.v) {
                self.tracked.push(TrackedVector {
                    coords: c.v.clone(),
                    introduced: stage_no,
                    decomposed_at: Vec::new(),
                });
                self.queue.push_back(self.tracked.len() - 1);
            }
        }
        self.tracked[id].decomposed_at.push(stage_no);
        self.queue.push_back(id);
        self.stages.push(SpectrumStage {
            polytope: d.q.clone(),
            cols,
            doubling: Some(d),
            decomposed: Some(id),
        });
        Ok(())
    }

    /// Base-stage vectors not yet decomposed among the materialized stages.
    pub fn undecomposed_base_vectors(&self) -> Vec<IVec> {
        self.tracked
            .iter()
            .filter(|t| t.introduced == 0 && t.decomposed_at.is_empty())
            .map(|t| t.coords.clone())
            .collect()
    }

    pub fn report(&self) -> SpectrumReport {
        SpectrumReport {
            base: self.base().name().map(str::to_string),
            ceiling: self.ceiling,
            stages: self
                .stages
                .iter()
                .enumerate()
                .map(|(i, s)| StageReport {
                    stage: i,
                    dim: s.polytope.dim(),
                    column_vectors: s.cols.len(),
                    lattice_points: s.polytope.lattice_points().len(),
                    doubled_facet: s.doubling.as_ref().map(|d| d.parent.facet(d.facet).clone()),
                    decomposed_vector: s.decomposed.map(|id| self.tracked[id].coords.clone()),
                    rotation_vector: s.doubling.as_ref().map(|d| d.g.clone()),
                    delta_plus: s.doubling.as_ref().map(|d| d.delta_plus.clone()),
                    delta_minus: s.doubling.as_ref().map(|d| d.delta_minus()),
                })
                .collect(),
            ledger: self.tracked.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StageReport {
    pub stage: usize,
    pub dim: usize,
    pub column_vectors: usize,
    pub lattice_points: usize,
    pub doubled_facet: Option<Facet>,
    pub decomposed_vector: Option<IVec>,
    /// The vector `g` with `⟨F, g⟩ = 1` fixing the rotation coordinates.
    pub rotation_vector: Option<IVec>,
    pub delta_plus: Option<IVec>,
    pub delta_minus: Option<IVec>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumReport {
    pub base: Option<String>,
    pub ceiling: usize,
    pub stages: Vec<StageReport>,
    pub ledger: Vec<TrackedVector>,
}

/// Builds a spectrum and materializes stages `0..=horizon`.
pub fn spectrum(p: &LatticePolytope, horizon: usize, ceiling: usize) -> Result<DoublingSpectrum> {
    let mut s = DoublingSpectrum::new(p.clone(), ceiling)?;
    s.stage_of(horizon)?;
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{make, simplex};
    use crate::polytope::are_integrally_affinely_equivalent;

    #[test]
    fn doubling_a_segment_gives_a_triangle() {
        let seg = Arc::new(make("segment(2)").unwrap());
        for f in 0..2 {
            let d = double(&seg, f).unwrap();
            let tri = simplex(2, 2).unwrap();
            assert!(are_integrally_affinely_equivalent(&d.q, &tri).is_some());
        }
        let unit = Arc::new(make("simplex(1,1)").unwrap());
        let d = double(&unit, 0).unwrap();
        assert!(are_integrally_affinely_equivalent(&d.q, &simplex(2, 1).unwrap()).is_some());
    }

    #[test]
    fn spectrum_of_unit_segment() {
        let s = spectrum(&make("simplex(1,1)").unwrap(), 1, DEFAULT_DIM_CEILING).unwrap();
        assert_eq!(s.stages()[0].cols.len(), 2);
        assert_eq!(s.stages()[1].cols.len(), 6);
    }

    #[test]
    fn lifting_points_on_the_facet_fails() {
        let p = Arc::new(make("P_trap").unwrap());
        let bottom = p.facets().iter().position(|f| f.normal == vec![0, 1]).unwrap();
        let d = double(&p, bottom).unwrap();
        assert_eq!(d.lift_point(&[1, 0]), Err(Error::NotLiftable(vec![1, 0])));
        let l = d.lift_point(&[2, 2]).unwrap();
        assert!(d.q.contains_lattice_point(&l));
    }

    #[test]
    fn ceiling_is_enforced() {
        let mut s = DoublingSpectrum::new(make("simplex(1,1)").unwrap(), 2).unwrap();
        assert!(s.stage_of(1).is_ok());
        assert!(matches!(s.stage_of(2), Err(Error::ResourceBound(_))));
    }
}
