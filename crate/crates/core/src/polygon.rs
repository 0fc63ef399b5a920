//! Normal fans, the classification of balanced polygons, and exhaustive
//! polygon sweeps.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::columns::ColSet;
use crate::corpus::simplex;
use crate::error::{Error, Result};
use crate::linalg::IVec;
use crate::par::Execution;
use crate::polytope::{are_integrally_affinely_equivalent, LatticePolytope};

/// Largest box side accepted by [`lattice_polygons`]; the grid must fit a `u64` mask.
pub const MAX_SWEEP_SIDE: i64 = 7;

/// Inner facet normals grouped by vertex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NormalFan {
    pub vertices: Vec<IVec>,
    /// `maximal_cones[i]` holds the sorted normals of facets through `vertices[i]`.
    pub maximal_cones: Vec<Vec<IVec>>,
}

impl NormalFan {
    /// The cones as a sorted multiset, forgetting which vertex they came from.
    pub fn cone_multiset(&self) -> Vec<Vec<IVec>> {
        let mut c = self.maximal_cones.clone();
        c.sort();
        c
    }

    /// Every normal occurring in some cone.
    pub fn rays(&self) -> BTreeSet<IVec> {
        self.maximal_cones.iter().flatten().cloned().collect()
    }
}

pub fn normal_fan(p: &LatticePolytope) -> NormalFan {
    let maximal_cones = p
        .vertices()
        .iter()
        .map(|v| {
            let mut ns: Vec<IVec> = p.tight_facets(v).into_iter().map(|i| p.facet(i).normal.clone()).collect();
            ns.sort();
            ns
        })
        .collect();
    NormalFan {
        vertices: p.vertices().to_vec(),
        maximal_cones,
    }
}

pub fn projectively_equivalent(p: &LatticePolytope, q: &LatticePolytope) -> Result<bool> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch(p.dim(), q.dim()));
    }
    Ok(normal_fan(p).cone_multiset() == normal_fan(q).cone_multiset())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassTag {
    A,
    B,
    C,
    D,
    E,
    F,
}

impl ClassTag {
    pub const ALL: [ClassTag; 6] = [ClassTag::A, ClassTag::B, ClassTag::C, ClassTag::D, ClassTag::E, ClassTag::F];

    pub fn letter(self) -> char {
        match self {
            ClassTag::A => 'a',
            ClassTag::B => 'b',
            ClassTag::C => 'c',
            ClassTag::D => 'd',
            ClassTag::E => 'e',
            ClassTag::F => 'f',
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ClassParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ColSummary {
    pub vectors: Vec<IVec>,
    pub base_edges: usize,
    /// Triples `(u, v, uv)`.
    pub products: Vec<(IVec, IVec, IVec)>,
    pub invertible: Vec<IVec>,
}

impl ColSummary {
    pub fn of(cols: &ColSet) -> Self {
        ColSummary {
            vectors: (0..cols.len()).map(|i| cols.coords(i).clone()).collect(),
            base_edges: cols.base_facets().len(),
            products: cols
                .product_triples()
                .into_iter()
                .map(|(i, j, k)| (cols.coords(i).clone(), cols.coords(j).clone(), cols.coords(k).clone()))
                .collect(),
            invertible: (0..cols.len())
                .filter(|&i| cols.is_invertible(i))
                .map(|i| cols.coords(i).clone())
                .collect(),
        }
    }
}

/// Block shape of the stable elementary group attached to a class. Only the
/// label and the block layout are recorded; no group is built.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GroupShape {
    pub label: String,
    /// Factors of a direct product; each factor is a block upper-triangular matrix.
    pub factors: Vec<Vec<Vec<String>>>,
}

impl GroupShape {
    pub fn for_class(tag: ClassTag, t: Option<usize>) -> Self {
        let s = |rows: &[&[&str]]| -> Vec<Vec<String>> {
            rows.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect()
        };
        let e = &["E(R)"][..];
        let affine = s(&[&["E(R)", "Hom_R(⊕R, R)"], &["0", "1"]]);
        let (label, factors) = match tag {
            ClassTag::A => ("E_a".to_string(), vec![s(&[e])]),
            ClassTag::B => (
                "E_b".to_string(),
                vec![s(&[&["E(R)", "End_R(⊕R)"], &["0", "E(R)"]])],
            ),
            ClassTag::C => (
                "E_c".to_string(),
                vec![s(&[
                    &["E(R)", "End_R(⊕R)", "Hom_R(⊕R, R)"],
                    &["0", "E(R)", "Hom_R(⊕R, R)"],
                    &["0", "0", "1"],
                ])],
            ),
            ClassTag::D => {
                let t = t.unwrap_or(1);
                let hom = format!("Hom_R(⊕R, R^{t})");
                let id = format!("Id_{t}");
                (
                    format!("E_{{d,{t}}}"),
                    vec![vec![vec!["E(R)".into(), hom], vec!["0".into(), id]]],
                )
            }
            ClassTag::E => ("E_e".to_string(), vec![s(&[e]), s(&[e])]),
            ClassTag::F => ("E_f".to_string(), vec![affine.clone(), affine]),
        };
        GroupShape { label, factors }
    }

    /// One-line rendering, e.g. `[[E(R), End_R(⊕R)], [0, E(R)]]`.
    pub fn describe(&self) -> String {
        self.factors
            .iter()
            .map(|f| {
                if f.len() == 1 && f[0].len() == 1 {
                    return f[0][0].clone();
                }
                let rows: Vec<String> = f.iter().map(|r| format!("[{}]", r.join(", "))).collect();
                format!("[{}]", rows.join(", "))
            })
            .collect::<Vec<_>>()
            .join(" × ")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PolygonClass {
    pub class: ClassTag,
    pub params: ClassParams,
    pub col_summary: ColSummary,
    pub group_shape: GroupShape,
}

fn lattice_length(a: &[i64], b: &[i64]) -> i64 {
    num_integer::gcd(b[0] - a[0], b[1] - a[1]).abs()
}

fn class(tag: ClassTag, params: ClassParams, cols: &ColSet) -> PolygonClass {
    PolygonClass {
        class: tag,
        group_shape: GroupShape::for_class(tag, params.t),
        params,
        col_summary: ColSummary::of(cols),
    }
}

/// Assigns a balanced polygon to one of the six classes by the shape of its
/// column vectors and their products.
pub fn classify(p: &LatticePolytope) -> Result<PolygonClass> {
    if p.dim() != 2 {
        return Err(Error::DimensionMismatch(p.dim(), 2));
    }
    let cols = ColSet::new(Arc::new(p.clone()));
    if cols.is_empty() {
        return Err(Error::NoColumns);
    }
    if !cols.is_balanced() {
        return Err(Error::NotBalanced);
    }
    classify_cols(&cols)
}

/// [`classify`] on an already computed column set.
pub fn classify_cols(cols: &ColSet) -> Result<PolygonClass> {
    let p = cols.polytope();
    let n = cols.len();
    let products = cols.product_triples();
    let all_invertible = (0..n).all(|i| cols.is_invertible(i));
    let unclassifiable = || Error::Unclassifiable(format!("{:?}", ColSummary::of(cols)));

    if cols.base_facets().len() == 1 {
        let params = ClassParams { c: None, t: Some(n) };
        return Ok(class(ClassTag::D, params, cols));
    }
    match (n, products.is_empty(), all_invertible) {
        (6, false, true) => {
            let v = p.vertices();
            if v.len() != 3 {
                return Err(unclassifiable());
            }
            let c = lattice_length(&v[0], &v[1]);
            if are_integrally_affinely_equivalent(p, &simplex(2, c)?).is_none() {
                return Err(unclassifiable());
            }
            Ok(class(ClassTag::A, ClassParams { c: Some(c), t: None }, cols))
        }
        (4, false, false) => {
            let inv: Vec<usize> = (0..n).filter(|&i| cols.is_invertible(i)).collect();
            let [v, mv] = inv[..] else {
                return Err(unclassifiable());
            };
            let rest: Vec<usize> = (0..n).filter(|i| !inv.contains(i)).collect();
            let fits = |a: usize, b: usize, c: usize, d: usize| {
                cols.product(a, b) == Some(c) && cols.product(c, d) == Some(a)
            };
            let [x, y] = rest[..] else {
                return Err(unclassifiable());
            };
            let found = [(x, v, y, mv), (y, v, x, mv), (x, mv, y, v), (y, mv, x, v)]
                .iter()
                .any(|&(u, vv, w, nv)| fits(u, vv, w, nv));
            if !found {
                return Err(unclassifiable());
            }
            Ok(class(ClassTag::B, ClassParams::default(), cols))
        }
        (3, false, _) if products.len() == 1 => Ok(class(ClassTag::C, ClassParams::default(), cols)),
        (4, true, true) => Ok(class(ClassTag::E, ClassParams::default(), cols)),
        (2, true, _) => Ok(class(ClassTag::F, ClassParams::default(), cols)),
        _ => Err(unclassifiable()),
    }
}

/// Vertex list of the convex hull of `pts`, counter-clockwise, without
/// collinear points.
pub fn convex_hull_2d(pts: &[IVec]) -> Vec<IVec> {
    let mut p: Vec<IVec> = pts.to_vec();
    p.sort();
    p.dedup();
    if p.len() < 3 {
        return p;
    }
    let cross = |o: &IVec, a: &IVec, b: &IVec| -> i128 {
        (a[0] - o[0]) as i128 * (b[1] - o[1]) as i128 - (a[1] - o[1]) as i128 * (b[0] - o[0]) as i128
    };
    let mut hull: Vec<IVec> = Vec::with_capacity(2 * p.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &IVec>> = if pass == 0 { Box::new(p.iter()) } else { Box::new(p.iter().rev()) };
        for x in iter {
            while hull.len() >= start + 2 && cross(&hull[hull.len() - 2], &hull[hull.len() - 1], x) <= 0 {
                hull.pop();
            }
            hull.push(x.clone());
        }
        hull.pop();
    }
    hull
}

struct Grid {
    side: i64,
}

impl Grid {
    fn width(&self) -> i64 {
        self.side + 1
    }

    fn bit(&self, x: i64, y: i64) -> u64 {
        1u64 << (y * self.width() + x)
    }

    fn points(&self, mask: u64) -> Vec<IVec> {
        let w = self.width();
        (0..w * w)
            .filter(|k| mask >> k & 1 == 1)
            .map(|k| vec![k % w, k / w])
            .collect()
    }

    /// Mask of grid points in the convex hull of `pts`, or `None` when the hull
    /// is not two-dimensional.
    fn fill(&self, pts: &[IVec]) -> Option<u64> {
        let h = convex_hull_2d(pts);
        if h.len() < 3 {
            return None;
        }
        let mut mask = 0;
        let w = self.width();
        for y in 0..w {
            for x in 0..w {
                let inside = (0..h.len()).all(|i| {
                    let (a, b) = (&h[i], &h[(i + 1) % h.len()]);
                    (b[0] - a[0]) * (y - a[1]) - (b[1] - a[1]) * (x - a[0]) >= 0
                });
                if inside {
                    mask |= self.bit(x, y);
                }
            }
        }
        Some(mask)
    }

    /// Translate so the bounding box touches both axes.
    fn normalize(&self, mask: u64) -> u64 {
        let pts = self.points(mask);
        let mx = pts.iter().map(|p| p[0]).min().unwrap_or(0);
        let my = pts.iter().map(|p| p[1]).min().unwrap_or(0);
        pts.iter().fold(0, |m, p| m | self.bit(p[0] - mx, p[1] - my))
    }
}

/// All two-dimensional lattice polygons with vertices in `[0, side]²`, one per
/// translation class, as sorted vertex lists translated to touch both axes.
pub fn polygon_vertex_sets(side: i64, exec: Execution) -> Result<Vec<Vec<IVec>>> {
    if !(1..=MAX_SWEEP_SIDE).contains(&side) {
        return Err(Error::ResourceBound(format!("sweep side must lie in 1..={MAX_SWEEP_SIDE}")));
    }
    let grid = Grid { side };
    let all = (1u64 << ((side + 1) * (side + 1))) - 1;
    let pts = grid.points(all);
    // every polygon in the box is reached from a triangle on three of its vertices
    // by adding its remaining vertices one at a time
    let mut seen: HashSet<u64> = HashSet::new();
    let mut queue: VecDeque<u64> = VecDeque::new();
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            for k in j + 1..pts.len() {
                if let Some(m) = grid.fill(&[pts[i].clone(), pts[j].clone(), pts[k].clone()]) {
                    if seen.insert(m) {
                        queue.push_back(m);
                    }
                }
            }
        }
    }
    while !queue.is_empty() {
        let layer: Vec<u64> = queue.drain(..).collect();
        let grown: Vec<Vec<u64>> = exec.map(&layer, |&m| {
            let inner = grid.points(m);
            pts.iter()
                .filter(|q| m & grid.bit(q[0], q[1]) == 0)
                .filter_map(|q| {
                    let mut ps = inner.clone();
                    ps.push(q.clone());
                    grid.fill(&ps)
                })
                .collect()
        });
        for m in grown.into_iter().flatten() {
            if seen.insert(m) {
                queue.push_back(m);
            }
        }
    }
    let classes: BTreeSet<u64> = seen.iter().map(|&m| grid.normalize(m)).collect();
    let mut out: Vec<Vec<IVec>> = classes.into_iter().map(|m| convex_hull_2d(&grid.points(m))).collect();
    out.sort();
    Ok(out)
}

/// Number of polygons with vertices in `[0, side]²`, counting translates separately.
pub fn polygon_count_with_translates(side: i64) -> Result<usize> {
    Ok(polygon_vertex_sets(side, Execution::default())?
        .iter()
        .map(|vs| {
            let w = vs.iter().map(|v| v[0]).max().unwrap_or(0);
            let h = vs.iter().map(|v| v[1]).max().unwrap_or(0);
            ((side - w + 1) * (side - h + 1)) as usize
        })
        .sum())
}

/// [`polygon_vertex_sets`] built into polytopes.
pub fn lattice_polygons(side: i64, exec: Execution) -> Result<Vec<LatticePolytope>> {
    let sets = polygon_vertex_sets(side, exec)?;
    exec.map(&sets, |vs| LatticePolytope::from_full_dimensional(vs))
        .into_iter()
        .collect()
}

/// `count` polygons of the `[0, side]²` sweep drawn without replacement,
/// reproducibly for a given seed, in sweep order.
pub fn sample_polygons(side: i64, count: usize, seed: u64, exec: Execution) -> Result<Vec<Vec<IVec>>> {
    let all = polygon_vertex_sets(side, exec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = rand::seq::index::sample(&mut rng, all.len(), count.min(all.len())).into_vec();
    picked.sort_unstable();
    Ok(picked.into_iter().map(|i| all[i].clone()).collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SweepFailure {
    pub vertices: Vec<IVec>,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SweepSummary {
    pub side: i64,
    pub polygons: usize,
    pub without_columns: usize,
    pub not_balanced: usize,
    pub balanced: usize,
    pub by_class: BTreeMap<char, usize>,
    /// Balanced polygons that could not be classified.
    pub failures: Vec<SweepFailure>,
}

/// Classifies every polygon of a sweep.
pub fn classify_sweep(side: i64, exec: Execution) -> Result<SweepSummary> {
    let polys = lattice_polygons(side, exec)?;
    let results = exec.map(&polys, classify);
    let mut s = SweepSummary {
        side,
        polygons: polys.len(),
        without_columns: 0,
        not_balanced: 0,
        balanced: 0,
        by_class: ClassTag::ALL.iter().map(|t| (t.letter(), 0)).collect(),
        failures: Vec::new(),
    };
    for (p, r) in polys.iter().zip(results) {
        match r {
            Ok(c) => {
                s.balanced += 1;
                *s.by_class.entry(c.class.letter()).or_default() += 1;
            }
            Err(Error::NoColumns) => s.without_columns += 1,
            Err(Error::NotBalanced) => s.not_balanced += 1,
            Err(e) => {
                s.balanced += 1;
                s.failures.push(SweepFailure {
                    vertices: p.vertices().to_vec(),
                    error: e.to_string(),
                });
            }
        }
    }
    Ok(s)
}
