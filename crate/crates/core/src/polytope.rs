//! Full-dimensional lattice polytopes with primitive facet forms.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, IVec};

/// Upper bound on the number of boxes points scanned during enumeration.
pub const SCAN_CEILING: u64 = 20_000_000;

/// A facet `{x : ⟨a,x⟩ = b}` of a polytope lying in `⟨a,x⟩ ≥ b`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Facet {
    pub normal: IVec,
    pub offset: i64,
}

impl Facet {
    pub fn new(normal: IVec, offset: i64) -> Self {
        Facet { normal, offset }
    }

    /// The support form `⟨F, x⟩`.
    pub fn pairing(&self, x: &[i64]) -> i64 {
        linalg::dot(&self.normal, x)
    }

    /// `⟨F, x⟩ - deg * b_F`.
    pub fn height(&self, x: &[i64], degree: i64) -> i64 {
        self.pairing(x) - degree * self.offset
    }

    pub fn contains(&self, x: &[i64]) -> bool {
        self.height(x, 1) == 0
    }
}

impl fmt::Display for Facet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?}|{})", self.normal, self.offset)
    }
}

/// A point of the graded semigroup: lattice coordinates plus a degree.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GradedPoint {
    pub coords: IVec,
    pub degree: i64,
}

impl GradedPoint {
    pub fn point(coords: IVec) -> Self {
        GradedPoint { coords, degree: 1 }
    }

    pub fn vector(coords: IVec) -> Self {
        GradedPoint { coords, degree: 0 }
    }
}

#[derive(Clone)]
pub struct LatticePolytope {
    name: Option<String>,
    dim: usize,
    vertices: Vec<IVec>,
    facets: Vec<Facet>,
    lattice_points: Vec<IVec>,
    index: HashMap<IVec, usize>,
}

impl fmt::Debug for LatticePolytope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LatticePolytope")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("vertices", &self.vertices)
            .field("facets", &self.facets)
            .field("lattice_points", &self.lattice_points.len())
            .finish()
    }
}

impl PartialEq for LatticePolytope {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim
            && self.vertices == other.vertices
            && self.facets == other.facets
            && self.lattice_points == other.lattice_points
    }
}

impl Eq for LatticePolytope {}

impl LatticePolytope {
    /// Convex hull of `points`, normalized so that the lexicographically first
    /// lattice point is the origin and the lattice points affinely generate ℤ^n.
    pub fn hull(points: &[IVec]) -> Result<Self> {
        let pts: Vec<IVec> = points
            .iter()
            .cloned()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let Some(first) = pts.first() else {
            return Err(Error::DegenerateInput("no points".into()));
        };
        let ambient = first.len();
        if ambient == 0 || pts.iter().any(|p| p.len() != ambient) {
            return Err(Error::DegenerateInput("inconsistent coordinate arity".into()));
        }
        let origin = first.clone();
        let diffs: Vec<IVec> = pts.iter().map(|p| linalg::sub(p, &origin)).collect();
        let r = linalg::rank(&diffs);
        if r == 0 {
            return Err(Error::DegenerateInput("affine span is a single point".into()));
        }
        let local = if r < ambient {
            let basis = linalg::saturation(&diffs[1..], ambient)?;
            diffs
                .iter()
                .map(|d| {
                    linalg::coords_in_basis(&basis, d).ok_or_else(|| {
                        Error::DegenerateInput("could not express point in its affine span".into())
                    })
                })
                .collect::<Result<Vec<_>>>()?
        } else {
            diffs
        };
        let poly = Self::from_full_dimensional(&local)?;
        // re-base when the lattice points only span a sublattice
        let base = &poly.lattice_points[0];
        let gens: Vec<IVec> = poly.lattice_points[1..]
            .iter()
            .map(|p| linalg::sub(p, base))
            .collect();
        let basis = linalg::lattice_basis(&gens)?;
        let unimodular = basis.len() == r
            && basis
                .iter()
                .enumerate()
                .all(|(i, row)| row.iter().enumerate().all(|(j, &x)| x == i64::from(i == j)));
        let poly = if unimodular {
            poly
        } else {
            let verts = poly
                .vertices
                .iter()
                .map(|v| {
                    linalg::coords_in_basis(&basis, &linalg::sub(v, base)).ok_or_else(|| {
                        Error::ValidationFailure("vertex outside generated lattice".into())
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Self::from_full_dimensional(&verts)?
        };
        Ok(poly.translated_to_lex_origin())
    }

    /// Builds the polytope of full-dimensional points in ℤ^n without changing coordinates.
    pub fn from_full_dimensional(points: &[IVec]) -> Result<Self> {
        let pts: Vec<IVec> = points
            .iter()
            .cloned()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let n = pts.first().map_or(0, |p| p.len());
        if n == 0 || pts.len() <= n {
            return Err(Error::DegenerateInput("too few points for a full-dimensional polytope".into()));
        }
        let facets = enumerate_facets(&pts, n)?;
        if facets.len() <= n {
            return Err(Error::DegenerateInput("points are not full-dimensional".into()));
        }
        let vertices = extreme_points(&pts, &facets, n);
        let lattice_points = scan_lattice_points(&vertices, &facets)?;
        Ok(Self::assemble(None, n, vertices, facets, lattice_points))
    }

    /// Assembles a polytope from data already known to be consistent.
    pub(crate) fn assemble(
        name: Option<String>,
        dim: usize,
        mut vertices: Vec<IVec>,
        facets: Vec<Facet>,
        mut lattice_points: Vec<IVec>,
    ) -> Self {
        vertices.sort();
        vertices.dedup();
        lattice_points.sort();
        lattice_points.dedup();
        let index = lattice_points
            .iter()
            .enumerate()
            .map(|(i, p)| (p.clone(), i))
            .collect();
        LatticePolytope {
            name,
            dim,
            vertices,
            facets,
            lattice_points,
            index,
        }
    }

    fn translated_to_lex_origin(self) -> Self {
        let o = self.lattice_points[0].clone();
        if linalg::is_zero(&o) {
            return self;
        }
        let shift = |p: &IVec| linalg::sub(p, &o);
        let facets = self
            .facets
            .iter()
            .map(|f| Facet::new(f.normal.clone(), f.offset - f.pairing(&o)))
            .collect();
        Self::assemble(
            self.name,
            self.dim,
            self.vertices.iter().map(shift).collect(),
            facets,
            self.lattice_points.iter().map(shift).collect(),
        )
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[IVec] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn facet(&self, id: usize) -> &Facet {
        &self.facets[id]
    }

    pub fn lattice_points(&self) -> &[IVec] {
        &self.lattice_points
    }

    pub fn contains_lattice_point(&self, x: &[i64]) -> bool {
        self.index.contains_key(x)
    }

    pub fn point_index(&self, x: &[i64]) -> Option<usize> {
        self.index.get(x).copied()
    }

    /// `ht_F(z) = ⟨F, z⟩ - deg(z) * b_F`.
    pub fn pairing(&self, facet: usize, z: &GradedPoint) -> i64 {
        self.facets[facet].height(&z.coords, z.degree)
    }

    /// Facets on which `x` lies.
    pub fn tight_facets(&self, x: &[i64]) -> Vec<usize> {
        (0..self.facets.len())
            .filter(|&i| self.facets[i].contains(x))
            .collect()
    }

    /// Inequality membership test (independent from the enumerated point list).
    pub fn satisfies_inequalities(&self, x: &[i64]) -> bool {
        self.facets.iter().all(|f| f.height(x, 1) >= 0)
    }

    /// Lattice points lying on facet `id`.
    pub fn facet_points(&self, id: usize) -> Vec<&IVec> {
        let f = &self.facets[id];
        self.lattice_points.iter().filter(|p| f.contains(p)).collect()
    }

    /// The polytope scaled by a positive integer.
    pub fn dilate(&self, k: i64) -> Result<Self> {
        if k <= 0 {
            return Err(Error::DegenerateInput("dilation factor must be positive".into()));
        }
        let verts: Vec<IVec> = self.vertices.iter().map(|v| linalg::scale(v, k)).collect();
        Self::hull(&verts)
    }

    /// Degree-bounded normality check: every lattice point of `kP`, `k ≤ d`,
    /// is a sum of `k` lattice points of `P`.
    pub fn is_normal_up_to(&self, d: u32, ceiling: usize) -> Result<bool> {
        if d == 0 {
            return Err(Error::DegenerateInput("degree bound must be at least 1".into()));
        }
        let mut sums: HashSet<IVec> = self.lattice_points.iter().cloned().collect();
        for k in 2..=i64::from(d) {
            let mut next = HashSet::with_capacity(sums.len() * 2);
            for s in &sums {
                for p in &self.lattice_points {
                    next.insert(linalg::add(s, p));
                }
                if next.len() > ceiling {
                    return Err(Error::ResourceBound(format!(
                        "degree-{k} point set exceeds {ceiling}"
                    )));
                }
            }
            let dilated_facets: Vec<Facet> = self
                .facets
                .iter()
                .map(|f| Facet::new(f.normal.clone(), f.offset * k))
                .collect();
            let verts: Vec<IVec> = self.vertices.iter().map(|v| linalg::scale(v, k)).collect();
            let points = scan_lattice_points(&verts, &dilated_facets)?;
            if points.len() > ceiling {
                return Err(Error::ResourceBound(format!(
                    "degree-{k} lattice point count exceeds {ceiling}"
                )));
            }
            if points.len() != next.len() || points.iter().any(|p| !next.contains(p)) {
                return Ok(false);
            }
            sums = next;
        }
        Ok(true)
    }
}

/// An integral-affine map `x ↦ x * linear + translation` (row-vector convention).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AffineMap {
    pub linear: Vec<IVec>,
    pub translation: IVec,
}

impl AffineMap {
    pub fn identity(n: usize) -> Self {
        AffineMap {
            linear: linalg::identity(n),
            translation: vec![0; n],
        }
    }

    pub fn apply(&self, x: &[i64]) -> IVec {
        let n = self.translation.len();
        (0..n)
            .map(|j| {
                self.translation[j] + x.iter().zip(&self.linear).map(|(a, row)| a * row[j]).sum::<i64>()
            })
            .collect()
    }
}

/// Searches for a unimodular affine map carrying `L_P` onto `L_Q`.
pub fn are_integrally_affinely_equivalent(
    p: &LatticePolytope,
    q: &LatticePolytope,
) -> Option<AffineMap> {
    let n = p.dim;
    if n != q.dim
        || p.vertices.len() != q.vertices.len()
        || p.lattice_points.len() != q.lattice_points.len()
        || p.facets.len() != q.facets.len()
    {
        return None;
    }
    let frame = affine_frame(&p.vertices, n)?;
    let p0 = &p.vertices[frame[0]];
    let pd: Vec<IVec> = frame[1..]
        .iter()
        .map(|&i| linalg::sub(&p.vertices[i], p0))
        .collect();
    let qv = &q.vertices;
    let qset: HashSet<&IVec> = q.lattice_points.iter().collect();
    let mut choice = vec![0usize; n + 1];
    let mut found = None;
    search_frames(qv, &mut choice, 0, &mut |choice: &[usize]| {
        let q0 = &qv[choice[0]];
        let qd: Vec<IVec> = choice[1..].iter().map(|&i| linalg::sub(&qv[i], q0)).collect();
        // linear * pd^T: solve pd * A = qd
        let a = solve_linear_map(&pd, &qd)?;
        let dt = linalg::det(
            &a.iter()
                .map(|r| r.iter().map(|&x| x as i128).collect())
                .collect::<Vec<_>>(),
        );
        if dt.abs() != 1 {
            return None;
        }
        let mut map = AffineMap {
            linear: a,
            translation: vec![0; n],
        };
        let img0 = map.apply(p0);
        map.translation = linalg::sub(q0, &img0);
        p.lattice_points
            .iter()
            .all(|x| qset.contains(&map.apply(x)))
            .then_some(map)
    }, &mut found);
    found
}

fn search_frames<F>(qv: &[IVec], choice: &mut Vec<usize>, depth: usize, test: &mut F, found: &mut Option<AffineMap>)
where
    F: FnMut(&[usize]) -> Option<AffineMap>,
{
    if found.is_some() {
        return;
    }
    if depth == choice.len() {
        *found = test(choice);
        return;
    }
    for i in 0..qv.len() {
        if choice[..depth].contains(&i) {
            continue;
        }
        choice[depth] = i;
        search_frames(qv, choice, depth + 1, test, found);
        if found.is_some() {
            return;
        }
    }
}

/// `a` with `pd * a = qd` (rows are vectors), integral.
fn solve_linear_map(pd: &[IVec], qd: &[IVec]) -> Option<Vec<IVec>> {
    // pd * a = qd  ⇔  a^T * pd^T = qd^T
    let at = linalg::solve_integral(&linalg::transpose(pd), &linalg::transpose(qd))?;
    Some(linalg::transpose(&at))
}

/// Indices of `n + 1` affinely independent points, greedily in order.
fn affine_frame(points: &[IVec], n: usize) -> Option<Vec<usize>> {
    let mut frame = vec![0usize];
    let mut diffs: Vec<IVec> = Vec::new();
    for (i, p) in points.iter().enumerate().skip(1) {
        let d = linalg::sub(p, &points[0]);
        diffs.push(d);
        if linalg::rank(&diffs) == frame.len() {
            frame.push(i);
        } else {
            diffs.pop();
        }
        if frame.len() == n + 1 {
            return Some(frame);
        }
    }
    None
}

fn enumerate_facets(pts: &[IVec], n: usize) -> Result<Vec<Facet>> {
    let mut found = BTreeSet::new();
    let mut idx: Vec<usize> = (0..n).collect();
    let m = pts.len();
    loop {
        let base = &pts[idx[0]];
        let rows: Vec<IVec> = idx[1..].iter().map(|&i| linalg::sub(&pts[i], base)).collect();
        let normal = linalg::normal_of(&rows)?;
        if !linalg::is_zero(&normal) {
            let b = linalg::dot(&normal, base);
            let (mut lo, mut hi) = (false, false);
            for p in pts {
                let v = linalg::dot(&normal, p);
                lo |= v < b;
                hi |= v > b;
                if lo && hi {
                    break;
                }
            }
            if !(lo && hi) {
                found.insert(if lo {
                    Facet::new(linalg::neg(&normal), -b)
                } else {
                    Facet::new(normal, b)
                });
            }
        }
        // next combination
        let mut i = n;
        loop {
            if i == 0 {
                return Ok(found.into_iter().collect());
            }
            i -= 1;
            if idx[i] != i + m - n {
                break;
            }
        }
        idx[i] += 1;
        for j in i + 1..n {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn extreme_points(pts: &[IVec], facets: &[Facet], n: usize) -> Vec<IVec> {
    pts.iter()
        .filter(|p| {
            let normals: Vec<IVec> = facets
                .iter()
                .filter(|f| f.contains(p))
                .map(|f| f.normal.clone())
                .collect();
            normals.len() >= n && linalg::rank(&normals) == n
        })
        .cloned()
        .collect()
}

/// Bounding-box scan filtered by the facet inequalities.
pub(crate) fn scan_lattice_points(vertices: &[IVec], facets: &[Facet]) -> Result<Vec<IVec>> {
    let n = vertices[0].len();
    let lo: IVec = (0..n).map(|j| vertices.iter().map(|v| v[j]).min().unwrap()).collect();
    let hi: IVec = (0..n).map(|j| vertices.iter().map(|v| v[j]).max().unwrap()).collect();
    let volume = lo
        .iter()
        .zip(&hi)
        .try_fold(1u64, |acc, (a, b)| acc.checked_mul((b - a + 1) as u64))
        .unwrap_or(u64::MAX);
    if volume > SCAN_CEILING {
        return Err(Error::ResourceBound(format!(
            "bounding box holds {volume} points"
        )));
    }
    let mut out = Vec::new();
    let mut x = lo.clone();
    loop {
        if facets.iter().all(|f| f.height(&x, 1) >= 0) {
            out.push(x.clone());
        }
        let mut j = n;
        loop {
            if j == 0 {
                return Ok(out);
            }
            j -= 1;
            if x[j] < hi[j] {
                x[j] += 1;
                break;
            }
            x[j] = lo[j];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_triangle_facets() {
        let p = LatticePolytope::hull(&[vec![0, 0], vec![1, 0], vec![0, 1]]).unwrap();
        let fs: Vec<(IVec, i64)> = p.facets().iter().map(|f| (f.normal.clone(), f.offset)).collect();
        assert!(fs.contains(&(vec![1, 0], 0)));
        assert!(fs.contains(&(vec![0, 1], 0)));
        assert!(fs.contains(&(vec![-1, -1], -1)));
        assert_eq!(p.lattice_points().len(), 3);
    }

    #[test]
    fn hexagon_counts() {
        let p = LatticePolytope::hull(&[
            vec![0, 0],
            vec![5, 0],
            vec![5, 2],
            vec![4, 3],
            vec![2, 3],
            vec![1, 2],
        ])
        .unwrap();
        assert_eq!(p.facets().len(), 6);
        assert_eq!(p.lattice_points().len(), 19);
        assert_eq!(p.vertices().len(), 6);
    }

    #[test]
    fn lower_dimensional_input_is_rebased() {
        let p = LatticePolytope::hull(&[vec![1, 1, 1], vec![3, 3, 1]]).unwrap();
        assert_eq!(p.dim(), 1);
        assert_eq!(p.lattice_points(), &[vec![0], vec![1], vec![2]]);
    }

    #[test]
    fn sublattice_is_rebased() {
        // lattice points only generate an index-two sublattice
        let p = LatticePolytope::hull(&[vec![0, 0], vec![2, 0], vec![0, 2]]).unwrap();
        assert_eq!(p.lattice_points().len(), 6);
        // the vertices of this empty tetrahedron only generate an index-two sublattice
        let q = LatticePolytope::hull(&[
            vec![0, 0, 0],
            vec![1, 0, 0],
            vec![0, 1, 0],
            vec![1, 1, 2],
        ])
        .unwrap();
        assert_eq!(q.lattice_points().len(), 4);
        let unit = LatticePolytope::hull(&crate::linalg::identity(3).into_iter().chain([vec![0, 0, 0]]).collect::<Vec<_>>()).unwrap();
        assert!(are_integrally_affinely_equivalent(&q, &unit).is_some());
    }

    #[test]
    fn degenerate_inputs() {
        assert!(matches!(
            LatticePolytope::hull(&[vec![2, 3]]),
            Err(Error::DegenerateInput(_))
        ));
        assert!(matches!(
            LatticePolytope::hull(&[]),
            Err(Error::DegenerateInput(_))
        ));
    }

    #[test]
    fn shear_equivalence() {
        let a = LatticePolytope::hull(&[vec![0, 0], vec![1, 0], vec![0, 1]]).unwrap();
        let b = LatticePolytope::hull(&[vec![0, 0], vec![1, 0], vec![1, 1]]).unwrap();
        let map = are_integrally_affinely_equivalent(&a, &b).unwrap();
        for x in a.lattice_points() {
            assert!(b.contains_lattice_point(&map.apply(x)));
        }
        let sq = LatticePolytope::hull(&[vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1]]).unwrap();
        assert!(are_integrally_affinely_equivalent(&a, &sq).is_none());
    }
}
