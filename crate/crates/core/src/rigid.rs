//! Product closures, rigid systems and their supporting graphs.
//!
//! A rigid system is checked by building a candidate graph from the
//! irreducible elements of the closure: every irreducible contributes an edge
//! with a source and a target port, and the target of `e` is glued to the
//! source of `f` whenever `ef` lies in the closure. The candidate is then
//! validated against the closure (endpoints, products, path realization).

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use serde::Serialize;

use crate::columns::{ColSet, LongProduct};
use crate::divisibility::{cd1_divisor, cd2_divisor, col_divisibility, SimplexEmbedding};
use crate::doubling::{double, DoubledPolytope};
use crate::error::{Error, Result};
use crate::graph::DirectedGraph;
use crate::linalg::{self, IVec};

/// Largest closure accepted before giving up with `ResourceBound`.
pub const CLOSURE_CAP: usize = 64;
/// Largest number of rewrite steps in [`y_resolve`].
pub const RESOLVE_CAP: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ClosureMode {
    /// `[V]`: strongly existing long products of elements of `V`.
    Strong,
    /// `⟨V⟩`: the smallest product-closed set containing `V`.
    Weak,
}

fn too_large(n: usize) -> Error {
    Error::ResourceBound(format!("closure exceeds {CLOSURE_CAP} elements (reached {n})"))
}

fn strong_closure(cols: &ColSet, gens: &BTreeSet<usize>) -> Result<BTreeSet<usize>> {
    let mut out = gens.clone();
    for &first in gens {
        // each state keeps the sums of all segments ending at the last factor,
        // longest first; the first entry is the running product
        let mut stack = vec![(vec![cols.coords(first).clone()], first)];
        while let Some((suffix, last)) = stack.pop() {
            for &w in gens {
                if cols.product(last, w).is_none() {
                    continue;
                }
                let wv = cols.coords(w);
                let mut next: Vec<IVec> = suffix.iter().map(|s| linalg::add(s, wv)).collect();
                next.push(wv.clone());
                if next.iter().any(|s| linalg::is_zero(s)) {
                    continue;
                }
                let Some(k) = cols.find(&next[0]) else { continue };
                if cols.base(k) != cols.base(first) {
                    continue;
                }
                out.insert(k);
                if out.len() > CLOSURE_CAP {
                    return Err(too_large(out.len()));
                }
                // prefixes are distinct column vectors, so lengths stay bounded
                if next.len() < cols.len() {
                    stack.push((next, w));
                }
            }
        }
    }
    Ok(out)
}

fn weak_closure(cols: &ColSet, gens: &BTreeSet<usize>) -> Result<BTreeSet<usize>> {
    let mut set = gens.clone();
    loop {
        let added: BTreeSet<usize> = set
            .iter()
            .flat_map(|&a| set.iter().filter_map(move |&b| cols.product(a, b)))
            .filter(|k| !set.contains(k))
            .collect();
        if added.is_empty() {
            return Ok(set);
        }
        set.extend(added);
        if set.len() > CLOSURE_CAP {
            return Err(too_large(set.len()));
        }
    }
}

/// Closure of a set of column vectors (indices into `cols`), sorted.
pub fn closure(cols: &ColSet, vs: &[usize], mode: ClosureMode) -> Result<Vec<usize>> {
    let gens: BTreeSet<usize> = vs.iter().copied().collect();
    let set = match mode {
        ClosureMode::Strong => strong_closure(cols, &gens)?,
        ClosureMode::Weak => weak_closure(cols, &gens)?,
    };
    Ok(set.into_iter().collect())
}

/// Resolves coordinates to indices of `cols`.
pub fn indices_of(cols: &ColSet, vectors: &[IVec]) -> Result<Vec<usize>> {
    vectors
        .iter()
        .map(|v| cols.find(v).ok_or_else(|| Error::StageTooSmall(v.clone())))
        .collect()
}

/// Why a vector set is not rigid.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "reason", rename_all = "kebab-case")]
pub enum NotRigid {
    /// `v` and `-v` both lie in the hull.
    Pair { v: IVec },
    /// Elements of `⟨V⟩` missing from `[V]`.
    ClosureMismatch { weak_only: Vec<IVec> },
    NotGraphLike { detail: String, pair: Option<(IVec, IVec)> },
}

impl NotRigid {
    pub fn reason(&self) -> &'static str {
        match self {
            NotRigid::Pair { .. } => "pair",
            NotRigid::ClosureMismatch { .. } => "closure-mismatch",
            NotRigid::NotGraphLike { .. } => "not-graph-like",
        }
    }
}

impl std::fmt::Display for NotRigid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NotRigid::Pair { v } => write!(f, "pair: {v:?} and its negative lie in the hull"),
            NotRigid::ClosureMismatch { weak_only } => {
                write!(f, "closure-mismatch: {weak_only:?} are weak-only products")
            }
            NotRigid::NotGraphLike { detail, pair } => match pair {
                Some((a, b)) => write!(f, "not-graph-like: {detail} ({a:?}, {b:?})"),
                None => write!(f, "not-graph-like: {detail}"),
            },
        }
    }
}

pub type Rigidity = std::result::Result<RigidSystem, NotRigid>;

/// A rigid system with its synthesized supporting graph.
#[derive(Debug, Clone)]
pub struct RigidSystem {
    cols: Arc<ColSet>,
    pub generators: Vec<usize>,
    /// `[V]`, sorted indices into the column set.
    pub closure: Vec<usize>,
    /// Irreducible elements; edge `e` of the graph carries `irreducibles[e]`.
    pub irreducibles: Vec<usize>,
    pub graph: DirectedGraph,
    /// `(source, target)` for each element of `closure`.
    pub endpoints: Vec<(usize, usize)>,
    pub y_flag: bool,
    /// The graph with terminal vertices split, when `y_flag` holds.
    pub y_graph: Option<DirectedGraph>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SystemReport {
    pub generators: Vec<IVec>,
    pub closure: Vec<IVec>,
    pub irreducibles: Vec<IVec>,
    pub endpoints: Vec<(IVec, usize, usize)>,
    pub y_rigid: bool,
    pub complexity: (usize, usize),
    pub graph: DirectedGraph,
}

impl RigidSystem {
    pub fn cols(&self) -> &Arc<ColSet> {
        &self.cols
    }

    fn coords(&self, idx: &[usize]) -> Vec<IVec> {
        idx.iter().map(|&i| self.cols.coords(i).clone()).collect()
    }

    pub fn generator_coords(&self) -> Vec<IVec> {
        self.coords(&self.generators)
    }

    pub fn closure_coords(&self) -> Vec<IVec> {
        self.coords(&self.closure)
    }

    pub fn irreducible_coords(&self) -> Vec<IVec> {
        self.coords(&self.irreducibles)
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        self.cols.find(v).is_some_and(|k| self.closure.binary_search(&k).is_ok())
    }

    pub fn is_irreducible(&self, v: &[i64]) -> bool {
        self.cols.find(v).is_some_and(|k| self.irreducibles.contains(&k))
    }

    fn position(&self, k: usize) -> Option<usize> {
        self.closure.binary_search(&k).ok()
    }

    /// Endpoints of an element of the closure.
    pub fn endpoints_of(&self, v: &[i64]) -> Option<(usize, usize)> {
        let k = self.cols.find(v)?;
        self.position(k).map(|p| self.endpoints[p])
    }

    /// The element with the given endpoints.
    pub fn element_at(&self, ends: (usize, usize)) -> Option<usize> {
        self.endpoints.iter().position(|&e| e == ends).map(|p| self.closure[p])
    }

    /// All factorizations of `v` into irreducibles (one per path).
    pub fn decompositions(&self, v: &[i64]) -> Vec<Vec<IVec>> {
        let Some(ends) = self.endpoints_of(v) else {
            return Vec::new();
        };
        self.graph
            .paths()
            .into_iter()
            .filter(|p| (self.graph.path_source(p), self.graph.path_target(p)) == ends)
            .map(|p| p.iter().map(|&e| self.cols.coords(self.irreducibles[e]).clone()).collect())
            .collect()
    }

    pub fn complexity(&self) -> (usize, usize) {
        self.graph.lambda_complexity()
    }

    pub fn to_dot(&self, name: &str) -> String {
        self.graph.to_dot(name)
    }

    pub fn report(&self) -> SystemReport {
        SystemReport {
            generators: self.generator_coords(),
            closure: self.closure_coords(),
            irreducibles: self.irreducible_coords(),
            endpoints: self
                .closure
                .iter()
                .zip(&self.endpoints)
                .map(|(&k, &(s, t))| (self.cols.coords(k).clone(), s, t))
                .collect(),
            y_rigid: self.y_flag,
            complexity: self.complexity(),
            graph: self.graph.clone(),
        }
    }
}

/// Condition (Y) at every non-terminal vertex and unique paths between any
/// two vertices.
pub fn is_y_rigid(s: &RigidSystem) -> bool {
    s.y_flag
}

fn find_root(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    parent[x] = r;
    r
}

fn not_graph_like(detail: impl Into<String>, pair: Option<(&IVec, &IVec)>) -> NotRigid {
    NotRigid::NotGraphLike {
        detail: detail.into(),
        pair: pair.map(|(a, b)| (a.clone(), b.clone())),
    }
}

/// Decides rigidity of `vectors` (column vectors of `cols`' polytope) and
/// synthesizes the supporting graph.
pub fn check_rigid(cols: &Arc<ColSet>, vectors: &[IVec]) -> Result<Rigidity> {
    let mut generators = indices_of(cols, vectors)?;
    generators.sort_unstable();
    generators.dedup();
    let strong = closure(cols, &generators, ClosureMode::Strong)?;
    let weak = closure(cols, &generators, ClosureMode::Weak)?;
    if let Some(&x) = weak.iter().find(|&&x| {
        cols.find(&linalg::neg(cols.coords(x)))
            .is_some_and(|y| weak.binary_search(&y).is_ok())
    }) {
        return Ok(Err(NotRigid::Pair {
            v: cols.coords(x).clone(),
        }));
    }
    if strong != weak {
        let weak_only = weak
            .iter()
            .filter(|k| strong.binary_search(k).is_err())
            .map(|&k| cols.coords(k).clone())
            .collect();
        return Ok(Err(NotRigid::ClosureMismatch { weak_only }));
    }
    Ok(synthesize(cols, generators, strong))
}

fn synthesize(cols: &Arc<ColSet>, generators: Vec<usize>, c: Vec<usize>) -> Rigidity {
    let in_c = |k: usize| c.binary_search(&k).is_ok();
    let label = |k: usize| cols.coords(k);
    let irreducibles: Vec<usize> = c
        .iter()
        .copied()
        .filter(|&x| !c.iter().any(|&a| c.iter().any(|&b| cols.product(a, b) == Some(x))))
        .collect();
    if !c.is_empty() && irreducibles.is_empty() {
        return Err(not_graph_like("closure has no irreducible elements", None));
    }
    let m = irreducibles.len();
    let mut parent: Vec<usize> = (0..2 * m).collect();
    for e in 0..m {
        for f in 0..m {
            if cols.product(irreducibles[e], irreducibles[f]).is_some_and(in_c) {
                let (a, b) = (find_root(&mut parent, 2 * e + 1), find_root(&mut parent, 2 * f));
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut vertex_of_root = HashMap::new();
    let mut vertex = vec![0; 2 * m];
    for (port, slot) in vertex.iter_mut().enumerate() {
        let r = find_root(&mut parent, port);
        let next = vertex_of_root.len();
        *slot = *vertex_of_root.entry(r).or_insert(next);
    }
    let graph = DirectedGraph::new(
        vertex_of_root.len(),
        (0..m).map(|e| (vertex[2 * e], vertex[2 * e + 1])).collect(),
        irreducibles.iter().map(|&k| label(k).clone()).collect(),
    );
    if let Some(defect) = graph.structural_defect() {
        return Err(not_graph_like(defect, None));
    }

    let mut ends_of: HashMap<usize, (usize, usize)> = HashMap::new();
    let mut at_ends: HashMap<(usize, usize), usize> = HashMap::new();
    for p in graph.paths() {
        let seq: Vec<usize> = p.iter().map(|&e| irreducibles[e]).collect();
        let val = match cols.long_product(&seq) {
            LongProduct::Strong(cv) => cols.find(&cv.v).unwrap(),
            _ => {
                let pair = (seq.len() >= 2).then(|| (label(seq[0]), label(seq[1])));
                return Err(not_graph_like(
                    format!("path of length {} has no strong product", seq.len()),
                    pair,
                ));
            }
        };
        if !in_c(val) {
            return Err(not_graph_like(format!("path product {:?} lies outside the closure", label(val)), None));
        }
        let ends = (graph.path_source(&p), graph.path_target(&p));
        if let Some(&old) = ends_of.get(&val) {
            if old != ends {
                return Err(not_graph_like(
                    format!("{:?} is realized between two different vertex pairs", label(val)),
                    None,
                ));
            }
        }
        ends_of.insert(val, ends);
        if let Some(&other) = at_ends.get(&ends) {
            if other != val {
                return Err(not_graph_like("two elements share their endpoints", Some((label(other), label(val)))));
            }
        }
        at_ends.insert(ends, val);
    }
    if let Some(&x) = c.iter().find(|x| !ends_of.contains_key(x)) {
        return Err(not_graph_like(format!("{:?} is not realized by a path", label(x)), None));
    }
    for &x in &c {
        for &y in &c {
            let (ex, ey) = (ends_of[&x], ends_of[&y]);
            let prod = cols.product(x, y).filter(|&k| in_c(k));
            let ok = match prod {
                Some(k) => ex.1 == ey.0 && ends_of[&k] == (ex.0, ey.1),
                None => ex.1 != ey.0,
            };
            if !ok {
                return Err(not_graph_like(
                    "product does not match path concatenation",
                    Some((label(x), label(y))),
                ));
            }
        }
    }
    let endpoints = c.iter().map(|k| ends_of[k]).collect();
    let y_flag = graph.is_y_like();
    let y_graph = y_flag.then(|| graph.split_terminals());
    Ok(RigidSystem {
        cols: cols.clone(),
        generators,
        closure: c,
        irreducibles,
        graph,
        endpoints,
        y_flag,
        y_graph,
    })
}

/// One rewrite of [`y_resolve`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResolveStep {
    /// `"cycle"` (via CD2) or `"meeting"` (via CD1).
    pub kind: &'static str,
    pub added: IVec,
    pub before: (usize, usize),
    pub after: (usize, usize),
}

#[derive(Debug, Clone)]
pub struct YResolution {
    pub system: RigidSystem,
    pub steps: Vec<ResolveStep>,
}

impl YResolution {
    pub fn strictly_decreasing(&self) -> bool {
        self.steps.iter().all(|s| s.after < s.before)
    }
}

fn resolution_candidates(s: &RigidSystem) -> Vec<(&'static str, usize)> {
    let cols = &s.cols;
    let g = &s.graph;
    let (top, _) = s.complexity();
    let mut out = Vec::new();
    let labels = |p: &[usize]| -> Vec<IVec> { p.iter().map(|&e| g.labels[e].clone()).collect() };
    let mut cycles: Vec<_> = g.regular_cycles().into_iter().filter(|c| c.height == top).collect();
    cycles.sort_by_key(|c| (labels(&c.left), labels(&c.right)));
    for cyc in cycles {
        // ab = cd with b, d the last edges of the two paths
        let split = |p: &[usize]| -> Option<(usize, usize)> {
            let (head, last) = p.split_at(p.len() - 1);
            let a = s.element_at((g.path_source(head), g.path_target(head)))?;
            Some((a, s.irreducibles[last[0]]))
        };
        let (Some((a, b)), Some((c, d))) = (split(&cyc.left), split(&cyc.right)) else {
            continue;
        };
        for (w, x, y, z) in [(a, b, c, d), (c, d, a, b)] {
            if let Some((t, _)) = cd2_divisor(cols, w, x, y, z) {
                out.push(("cycle", t));
            }
        }
    }
    for mp in g.meeting_points().into_iter().filter(|m| m.height == top) {
        for (i, &e1) in mp.incoming.iter().enumerate() {
            for &e2 in &mp.incoming[i + 1..] {
                let (a, b) = (s.irreducibles[e1], s.irreducibles[e2]);
                if let Some((d, _)) = cd1_divisor(cols, a, b) {
                    out.push(("meeting", d));
                }
            }
        }
    }
    out
}

/// Embeds a rigid system over a Col-divisible polytope into a Y-rigid one by
/// repeatedly adding CD2 and CD1 divisors.
pub fn y_resolve(cols: &Arc<ColSet>, vectors: &[IVec]) -> Result<YResolution> {
    match col_divisibility(cols) {
        Ok(r) if r.is_divisible() => {}
        _ => return Err(Error::NotColDivisible),
    }
    let mut sys = check_rigid(cols, vectors)?.map_err(|e| Error::RigidityFailure(e.to_string()))?;
    let mut steps = Vec::new();
    for _ in 0..RESOLVE_CAP {
        if sys.y_flag {
            return Ok(YResolution { system: sys, steps });
        }
        let before = sys.complexity();
        let mut next = None;
        for (kind, t) in resolution_candidates(&sys) {
            let tv = cols.coords(t);
            if sys.contains(tv) || sys.contains(&linalg::neg(tv)) {
                continue;
            }
            let mut gens = sys.closure_coords();
            gens.push(tv.clone());
            let Ok(Ok(cand)) = check_rigid(cols, &gens) else { continue };
            let after = cand.complexity();
            if after < before && sys.closure.iter().all(|k| cand.closure.binary_search(k).is_ok()) {
                steps.push(ResolveStep {
                    kind,
                    added: tv.clone(),
                    before,
                    after,
                });
                next = Some(cand);
                break;
            }
        }
        sys = next.ok_or_else(|| {
            Error::RigidityFailure(format!("no divisor lowers the complexity {before:?}"))
        })?;
    }
    Err(Error::ResourceBound(format!("y_resolve exceeded {RESOLVE_CAP} steps")))
}

/// The rigid system on `[U] ∩ [V]`.
pub fn intersect(s1: &RigidSystem, s2: &RigidSystem) -> Result<RigidSystem> {
    if !Arc::ptr_eq(&s1.cols, &s2.cols) && s1.cols.polytope() != s2.cols.polytope() {
        return Err(Error::StageMismatch);
    }
    let common: Vec<IVec> = s1
        .closure
        .iter()
        .filter(|k| s2.closure.binary_search(k).is_ok())
        .map(|&k| s1.cols.coords(k).clone())
        .collect();
    check_rigid(&s1.cols, &common)?.map_err(|e| Error::ValidationFailure(format!("intersection is not rigid: {e}")))
}

fn extend_with(d: &DoubledPolytope, qcols: &Arc<ColSet>, s: &RigidSystem, v: &[i64]) -> Result<RigidSystem> {
    if s.cols.polytope() != d.parent.as_ref() {
        return Err(Error::StageMismatch);
    }
    if !s.is_irreducible(v) {
        return Err(Error::LetterOutsideSystem(v.to_vec()));
    }
    let k = s.cols.find(v).unwrap();
    if s.cols.base(k) != d.facet {
        return Err(Error::BaseFacetMismatch);
    }
    let mut gens: Vec<IVec> = s.generator_coords().iter().map(|g| d.embed(g)).collect();
    gens.push(d.delta_plus.clone());
    gens.push(d.lift_vector(v));
    let ext = check_rigid(qcols, &gens)?
        .map_err(|e| Error::ValidationFailure(format!("extension is not rigid: {e}")))?;
    let (g0, g1) = (&s.graph, &ext.graph);
    if g1.vertex_count != g0.vertex_count + 1 || g1.edges.len() != g0.edges.len() + 1 {
        return Err(Error::ValidationFailure("extension graph is not a subdivision".into()));
    }
    Ok(ext)
}

/// Extends `s` by `δ^+` and `v^|` over the doubled polytope.
pub fn extend_under_doubling(d: &DoubledPolytope, s: &RigidSystem, v: &[i64]) -> Result<RigidSystem> {
    extend_with(d, &Arc::new(ColSet::new(d.q.clone())), s, v)
}

#[derive(Debug, Clone)]
pub struct KDecomposition {
    pub stages: Vec<DoubledPolytope>,
    /// Column set of the last stage.
    pub cols: Arc<ColSet>,
    pub systems: Vec<RigidSystem>,
    /// Each shared irreducible (in last-stage coordinates) with its factors.
    pub factorizations: Vec<(IVec, Vec<IVec>)>,
}

fn pad(v: &[i64], n: usize) -> IVec {
    let mut y = v.to_vec();
    y.resize(n, 0);
    y
}

/// Doubling construction making `∩[U_i]` k-decomposable in `∩[V_i]`.
pub fn k_decompose(systems: &[RigidSystem], k: usize, ceiling: usize) -> Result<KDecomposition> {
    let Some(first) = systems.first() else {
        return Err(Error::DegenerateInput("no systems given".into()));
    };
    if k == 0 {
        return Err(Error::DegenerateInput("k must be at least 1".into()));
    }
    let mut shared = first.clone();
    for s in &systems[1..] {
        shared = intersect(&shared, s)?;
    }
    let targets = shared.irreducible_coords();
    if k == 1 {
        return Ok(KDecomposition {
            stages: Vec::new(),
            cols: first.cols.clone(),
            systems: systems.to_vec(),
            factorizations: targets.into_iter().map(|u| (u.clone(), vec![u])).collect(),
        });
    }
    let needed = first.cols.polytope().dim() + targets.len() * (k - 1);
    if needed > ceiling {
        return Err(Error::ResourceBound(format!(
            "{}-decomposition needs dimension {needed}, ceiling is {ceiling}",
            k
        )));
    }
    let mut cols = first.cols.clone();
    let mut current: Vec<RigidSystem> = systems.to_vec();
    let mut stages = Vec::new();
    let mut factorizations: Vec<(IVec, Vec<IVec>)> = Vec::new();
    let step = |cols: &Arc<ColSet>, current: &[RigidSystem], v: &[i64], pick_first: bool| -> Result<(DoubledPolytope, Arc<ColSet>, Vec<RigidSystem>)> {
        let vi = cols.find(v).ok_or_else(|| Error::StageTooSmall(v.to_vec()))?;
        let d = double(cols.polytope_arc(), cols.base(vi))?;
        let qcols = Arc::new(ColSet::new(d.q.clone()));
        let next = current
            .iter()
            .map(|s| {
                let edge = if pick_first {
                    s.decompositions(v).first().and_then(|f| f.first().cloned())
                } else {
                    Some(v.to_vec())
                };
                let edge = edge.ok_or_else(|| Error::LetterOutsideSystem(v.to_vec()))?;
                extend_with(&d, &qcols, s, &edge)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((d, qcols, next))
    };
    for u in &targets {
        let u0 = pad(u, cols.polytope().dim());
        let (d, qcols, next) = step(&cols, &current, &u0, true)?;
        let mut deltas = vec![d.delta_plus.clone()];
        let mut w = linalg::sub(&d.embed(&u0), &d.delta_plus);
        stages.push(d);
        (cols, current) = (qcols, next);
        for _ in 2..k {
            let (d, qcols, next) = step(&cols, &current, &deltas[0].clone(), false)?;
            let head = deltas.remove(0);
            let mut split = vec![d.delta_plus.clone(), d.lift_vector(&head)];
            split.extend(deltas.iter().map(|x| d.embed(x)));
            deltas = split;
            w = d.embed(&w);
            stages.push(d);
            (cols, current) = (qcols, next);
        }
        deltas.push(w);
        factorizations.push((u0, deltas));
    }
    let n = cols.polytope().dim();
    for (u, fs) in factorizations.iter_mut() {
        *u = pad(u, n);
        fs.iter_mut().for_each(|f| *f = pad(f, n));
    }
    let out = KDecomposition {
        stages,
        cols,
        systems: current,
        factorizations,
    };
    verify_k_decomposition(&out, k)?;
    Ok(out)
}

/// Checks the k-decomposition property on the final stage: factors lie in
/// `∩[V_i]`, multiply strongly to the target, and different targets use
/// disjoint sets of irreducibles.
pub fn verify_k_decomposition(kd: &KDecomposition, k: usize) -> Result<()> {
    let mut shared = kd.systems[0].clone();
    for s in &kd.systems[1..] {
        shared = intersect(&shared, s)?;
    }
    let fail = |m: String| Err(Error::ValidationFailure(m));
    let mut used: Vec<BTreeSet<IVec>> = Vec::new();
    for (u, fs) in &kd.factorizations {
        if fs.len() != k {
            return fail(format!("{u:?} has {} factors", fs.len()));
        }
        if let Some(f) = fs.iter().find(|f| !shared.contains(f)) {
            return fail(format!("factor {f:?} lies outside the intersection"));
        }
        let idx = indices_of(&kd.cols, fs)?;
        match kd.cols.long_product(&idx) {
            LongProduct::Strong(cv) if &cv.v == u => {}
            _ => return fail(format!("factors of {u:?} do not multiply to it")),
        }
        let irr: BTreeSet<IVec> = fs
            .iter()
            .flat_map(|f| shared.decompositions(f).into_iter().flatten())
            .collect();
        if let Some(prev) = used.iter().find(|p| !p.is_disjoint(&irr)) {
            return fail(format!("irreducibles {prev:?} and {irr:?} overlap"));
        }
        used.push(irr);
    }
    Ok(())
}

/// Image of a rigid system under a simplex embedding, checked for rigidity
/// on the simplex.
pub fn embed_system(emb: &SimplexEmbedding, s: &RigidSystem) -> Result<Rigidity> {
    let images: Vec<IVec> = s.generators.iter().map(|&g| emb.image(g).clone()).collect();
    check_rigid(&Arc::new(emb.simplex.clone()), &images)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::make;

    fn cols_of(name: &str) -> Arc<ColSet> {
        Arc::new(ColSet::new(Arc::new(make(name).unwrap())))
    }

    #[test]
    fn trapezoid_closures_agree() {
        let c = cols_of("P_trap");
        let v = indices_of(&c, &[vec![-1, -1], vec![1, 0]]).unwrap();
        let strong = closure(&c, &v, ClosureMode::Strong).unwrap();
        assert_eq!(strong.len(), 3);
        assert_eq!(strong, closure(&c, &v, ClosureMode::Weak).unwrap());
        assert!(closure(&c, &[], ClosureMode::Strong).unwrap().is_empty());
    }

    #[test]
    fn pyramid_systems() {
        let c = cols_of("pyr4");
        let uvw = [vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, -1]];
        let r = check_rigid(&c, &uvw).unwrap();
        assert_eq!(r.unwrap_err().reason(), "closure-mismatch");
        let t = [vec![0, 0, -1], vec![0, 1, -1], vec![1, 0, 0]];
        let s = check_rigid(&c, &t).unwrap().unwrap();
        assert!(!is_y_rigid(&s));
        assert_eq!(s.complexity(), (1, 1));
        assert_eq!(s.graph.vertex_count, 4);
    }

    #[test]
    fn non_rigid_example_is_rejected() {
        let c = cols_of("P_nonrig");
        let uvw = [vec![1, 0, -1], vec![-1, 0, 0], vec![0, 1, 0]];
        assert!(check_rigid(&c, &uvw).unwrap().is_err());
    }

    #[test]
    fn trapezoid_chain_is_linear() {
        let c = cols_of("P_trap");
        let s = check_rigid(&c, &[vec![-1, -1], vec![1, 0]]).unwrap().unwrap();
        assert!(s.y_flag);
        assert_eq!(s.graph.vertex_count, 3);
        assert_eq!(s.complexity(), (0, 0));
        let r = y_resolve(&c, &[vec![-1, -1], vec![0, -1]]).unwrap();
        assert!(r.steps.is_empty());
    }

    #[test]
    fn extension_subdivides_an_edge() {
        let c = cols_of("P_trap");
        let s = check_rigid(&c, &[vec![-1, -1], vec![1, 0]]).unwrap().unwrap();
        let u = c.find(&[-1, -1]).unwrap();
        let d = double(c.polytope_arc(), c.base(u)).unwrap();
        let e = extend_under_doubling(&d, &s, &[-1, -1]).unwrap();
        assert_eq!(e.irreducibles.len(), 3);
        assert!(e.y_flag);
    }

    #[test]
    fn two_decomposition_on_trapezoid() {
        let c = cols_of("P_trap");
        let s = check_rigid(&c, &[vec![-1, -1]]).unwrap().unwrap();
        let kd = k_decompose(&[s], 2, 8).unwrap();
        assert_eq!(kd.stages.len(), 1);
        assert_eq!(kd.factorizations[0].1.len(), 2);
        assert!(kd.factorizations[0].1.iter().all(|f| f[2] != 0));
    }
}
