//! Finite directed graphs supporting rigid systems.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::Serialize;

use crate::linalg::IVec;

/// A directed graph with edges labelled by lattice vectors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DirectedGraph {
    pub vertex_count: usize,
    /// `(source, target)` per edge.
    pub edges: Vec<(usize, usize)>,
    pub labels: Vec<IVec>,
}

/// A pair of paths meeting only at their common endpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegularCycle {
    pub left: Vec<usize>,
    pub right: Vec<usize>,
    pub height: usize,
}

/// A vertex where two distinct edges arrive and some edge leaves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeetingPoint {
    pub vertex: usize,
    pub incoming: Vec<usize>,
    pub outgoing: Vec<usize>,
    pub height: usize,
}

impl DirectedGraph {
    pub fn new(vertex_count: usize, edges: Vec<(usize, usize)>, labels: Vec<IVec>) -> Self {
        DirectedGraph {
            vertex_count,
            edges,
            labels,
        }
    }

    /// Builds a graph from unlabelled edges (labels are empty vectors).
    pub fn from_edges(vertex_count: usize, edges: &[(usize, usize)]) -> Self {
        DirectedGraph::new(vertex_count, edges.to_vec(), vec![Vec::new(); edges.len()])
    }

    pub fn out_edges(&self, v: usize) -> Vec<usize> {
        (0..self.edges.len()).filter(|&e| self.edges[e].0 == v).collect()
    }

    pub fn in_edges(&self, v: usize) -> Vec<usize> {
        (0..self.edges.len()).filter(|&e| self.edges[e].1 == v).collect()
    }

    pub fn is_terminal(&self, v: usize) -> bool {
        self.edges.iter().all(|e| e.0 != v)
    }

    /// Topological order, or `None` if there is a directed cycle.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let mut indeg = vec![0usize; self.vertex_count];
        for &(_, t) in &self.edges {
            indeg[t] += 1;
        }
        let mut ready: Vec<usize> = (0..self.vertex_count).filter(|&v| indeg[v] == 0).collect();
        ready.reverse();
        let mut order = Vec::with_capacity(self.vertex_count);
        while let Some(v) = ready.pop() {
            order.push(v);
            for e in self.out_edges(v) {
                let t = self.edges[e].1;
                indeg[t] -= 1;
                if indeg[t] == 0 {
                    ready.push(t);
                }
            }
        }
        (order.len() == self.vertex_count).then_some(order)
    }

    /// `ht x`: the length of a longest path ending at `x`.
    pub fn heights(&self) -> Vec<usize> {
        let order = self.topological_order().expect("graph is acyclic");
        let mut ht = vec![0usize; self.vertex_count];
        for v in order {
            for e in self.out_edges(v) {
                let t = self.edges[e].1;
                ht[t] = ht[t].max(ht[v] + 1);
            }
        }
        ht
    }

    /// All nonempty paths as edge sequences, in a deterministic order.
    pub fn paths(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut stack: Vec<Vec<usize>> = (0..self.edges.len()).rev().map(|e| vec![e]).collect();
        while let Some(p) = stack.pop() {
            let end = self.edges[*p.last().unwrap()].1;
            for e in self.out_edges(end).into_iter().rev() {
                let mut q = p.clone();
                q.push(e);
                stack.push(q);
            }
            out.push(p);
        }
        out
    }

    pub fn path_source(&self, p: &[usize]) -> usize {
        self.edges[p[0]].0
    }

    pub fn path_target(&self, p: &[usize]) -> usize {
        self.edges[*p.last().unwrap()].1
    }

    /// Checks the graph conditions: no loops, no multiple edges, acyclic, and no
    /// path of length at least two parallel to an edge.
    pub fn structural_defect(&self) -> Option<String> {
        let mut seen = BTreeSet::new();
        for (i, &(s, t)) in self.edges.iter().enumerate() {
            if s == t {
                return Some(format!("edge {i} is a loop"));
            }
            if !seen.insert((s, t)) {
                return Some(format!("edge {i} duplicates another edge"));
            }
        }
        if self.topological_order().is_none() {
            return Some("graph has a directed cycle".into());
        }
        for p in self.paths().iter().filter(|p| p.len() >= 2) {
            let ends = (self.path_source(p), self.path_target(p));
            if seen.contains(&ends) {
                return Some(format!("a path of length {} runs parallel to an edge", p.len()));
            }
        }
        None
    }

    /// Pairs of distinct paths sharing both endpoints and no interior vertex.
    pub fn regular_cycles(&self) -> Vec<RegularCycle> {
        let paths = self.paths();
        let ht = self.heights();
        let interior = |p: &[usize]| -> BTreeSet<usize> {
            p[..p.len() - 1].iter().map(|&e| self.edges[e].1).collect()
        };
        let mut out = Vec::new();
        for (i, l) in paths.iter().enumerate() {
            for r in &paths[i + 1..] {
                if self.path_source(l) != self.path_source(r) || self.path_target(l) != self.path_target(r) {
                    continue;
                }
                if interior(l).is_disjoint(&interior(r)) {
                    let (left, right) = if l <= r { (l.clone(), r.clone()) } else { (r.clone(), l.clone()) };
                    out.push(RegularCycle {
                        left,
                        right,
                        height: ht[self.path_target(l)],
                    });
                }
            }
        }
        out
    }

    pub fn meeting_points(&self) -> Vec<MeetingPoint> {
        let ht = self.heights();
        (0..self.vertex_count)
            .filter_map(|v| {
                let incoming = self.in_edges(v);
                let outgoing = self.out_edges(v);
                (incoming.len() >= 2 && !outgoing.is_empty()).then(|| MeetingPoint {
                    vertex: v,
                    incoming,
                    outgoing,
                    height: ht[v],
                })
            })
            .collect()
    }

    /// `(A, B)`: the largest height of a regular cycle or meeting point, and the
    /// number of vertices where it is attained; `(0, 0)` if there are none.
    pub fn lambda_complexity(&self) -> (usize, usize) {
        let ht = self.heights();
        let mut candidates: BTreeSet<usize> = self
            .regular_cycles()
            .iter()
            .map(|c| *c.left.last().unwrap())
            .map(|e| self.edges[e].1)
            .collect();
        candidates.extend(self.meeting_points().iter().map(|m| m.vertex));
        let Some(a) = candidates.iter().map(|&v| ht[v]).max() else {
            return (0, 0);
        };
        (a, candidates.iter().filter(|&&v| ht[v] == a).count())
    }

    /// Every vertex with an outgoing edge has at most one incoming edge, and
    /// no two distinct paths share both endpoints.
    pub fn is_y_like(&self) -> bool {
        let branching = (0..self.vertex_count).all(|v| self.is_terminal(v) || self.in_edges(v).len() <= 1);
        branching && self.regular_cycles().is_empty()
    }

    /// Splits every terminal vertex with several incoming edges into one
    /// vertex per edge.
    pub fn split_terminals(&self) -> DirectedGraph {
        let mut edges = self.edges.clone();
        let mut count = self.vertex_count;
        for v in (0..self.vertex_count).filter(|&v| self.is_terminal(v)) {
            for e in self.in_edges(v).into_iter().skip(1) {
                edges[e].1 = count;
                count += 1;
            }
        }
        DirectedGraph::new(count, edges, self.labels.clone())
    }

    /// Graphviz rendering; vertex ids are the internal (stable) numbering.
    pub fn to_dot(&self, name: &str) -> String {
        let mut s = format!("digraph \"{name}\" {{\n");
        for v in 0..self.vertex_count {
            let _ = writeln!(s, "  v{v};");
        }
        for (e, &(a, b)) in self.edges.iter().enumerate() {
            let _ = writeln!(s, "  v{a} -> v{b} [label=\"{:?}\"];", self.labels[e]);
        }
        s.push_str("}\n");
        s
    }
}
