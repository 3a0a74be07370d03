//! Vertices, graphs and rate assignments.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::linalg::QMatrix;
use crate::rational::{fmt_q, from_f64, to_f64, Q};

/// A point of Q^n.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RationalVec {
    coords: Vec<Q>,
}

impl RationalVec {
    pub fn new(coords: Vec<Q>) -> Self {
        assert!(!coords.is_empty(), "vectors have positive dimension");
        RationalVec { coords }
    }

    pub fn from_ints(xs: &[i64]) -> Self {
        RationalVec::new(xs.iter().map(|&x| crate::rational::q(x)).collect())
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Q] {
        &self.coords
    }

    pub fn add(&self, other: &RationalVec) -> RationalVec {
        assert_eq!(self.dim(), other.dim());
        RationalVec::new(
            self.coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn sub(&self, other: &RationalVec) -> RationalVec {
        assert_eq!(self.dim(), other.dim());
        RationalVec::new(
            self.coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }

    pub fn scale(&self, c: &Q) -> RationalVec {
        RationalVec::new(self.coords.iter().map(|a| a * c).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coords.iter().map(to_f64).collect()
    }

    /// Nonnegative integer exponents, if every coordinate is one.
    pub fn as_exponents(&self) -> Option<Vec<u32>> {
        self.coords
            .iter()
            .map(|c| {
                if c.is_integer() && !c.is_negative() {
                    c.to_integer().to_u32()
                } else {
                    None
                }
            })
            .collect()
    }
}

impl std::fmt::Display for RationalVec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(fmt_q).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Euclidean embedded graph: a digraph whose vertices are points of Q^n.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EGraph {
    vertices: Vec<RationalVec>,
    edges: Vec<(usize, usize)>,
    labels: Option<Vec<String>>,
}

impl EGraph {
    pub fn new(vertices: Vec<RationalVec>, edges: Vec<(usize, usize)>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::InvalidGraph("no vertices".into()));
        }
        let dim = vertices[0].dim();
        if let Some(v) = vertices.iter().find(|v| v.dim() != dim) {
            return Err(Error::InvalidGraph(format!(
                "vertex {v} has dimension {} but expected {dim}",
                v.dim()
            )));
        }
        let mut seen = BTreeSet::new();
        for (i, v) in vertices.iter().enumerate() {
            if !seen.insert(v) {
                return Err(Error::InvalidGraph(format!(
                    "duplicate vertex {v} at index {i}"
                )));
            }
        }
        let mut pairs = BTreeSet::new();
        for &(s, t) in &edges {
            if s >= vertices.len() || t >= vertices.len() {
                return Err(Error::InvalidGraph(format!("edge ({s},{t}) out of range")));
            }
            if s == t {
                return Err(Error::InvalidGraph(format!("self-loop at vertex {s}")));
            }
            if !pairs.insert((s, t)) {
                return Err(Error::InvalidGraph(format!("duplicate edge ({s},{t})")));
            }
        }
        Ok(EGraph {
            vertices,
            edges,
            labels: None,
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.vertices.len() {
            return Err(Error::InvalidGraph(
                "label count differs from vertex count".into(),
            ));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    /// Complete digraph on the given vertices, edges in lexicographic (source, target) order.
    pub fn complete(vertices: Vec<RationalVec>) -> Result<Self> {
        let n = vertices.len();
        let edges = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .collect();
        EGraph::new(vertices, edges)
    }

    pub fn dim(&self) -> usize {
        self.vertices[0].dim()
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> &[RationalVec] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> &RationalVec {
        &self.vertices[i]
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn vertex_index(&self, v: &RationalVec) -> Option<usize> {
        self.vertices.iter().position(|w| w == v)
    }

    pub fn edge_index(&self, s: usize, t: usize) -> Option<usize> {
        self.edges.iter().position(|&e| e == (s, t))
    }

    /// Indices of the edges leaving `v`, in declared order.
    pub fn out_edges(&self, v: usize) -> Vec<usize> {
        (0..self.edges.len())
            .filter(|&e| self.edges[e].0 == v)
            .collect()
    }

    pub fn reaction_vector(&self, e: usize) -> RationalVec {
        let (s, t) = self.edges[e];
        self.vertices[t].sub(&self.vertices[s])
    }

    /// Source vertices sorted lexicographically by coordinates.
    pub fn sources(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self
            .edges
            .iter()
            .map(|e| e.0)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        s.sort_by(|&a, &b| lex_cmp(&self.vertices[a], &self.vertices[b]));
        s
    }

    /// Subgraph keeping the listed edges (vertices unchanged).
    pub fn edge_subgraph(&self, keep: &[usize]) -> EGraph {
        EGraph {
            vertices: self.vertices.clone(),
            edges: keep.iter().map(|&e| self.edges[e]).collect(),
            labels: self.labels.clone(),
        }
    }

    pub fn is_reversible(&self) -> bool {
        self.edges
            .iter()
            .all(|&(s, t)| self.edge_index(t, s).is_some())
    }

    /// Connected components of the underlying undirected graph, each sorted,
    /// ordered by smallest member.
    pub fn linkage_classes(&self) -> Vec<Vec<usize>> {
        let n = self.vertices.len();
        let mut adj = vec![Vec::new(); n];
        for &(s, t) in &self.edges {
            adj[s].push(t);
            adj[t].push(s);
        }
        let mut comp = vec![usize::MAX; n];
        let mut classes = Vec::new();
        for start in 0..n {
            if comp[start] != usize::MAX {
                continue;
            }
            let id = classes.len();
            let mut members = vec![start];
            comp[start] = id;
            let mut stack = vec![start];
            while let Some(v) = stack.pop() {
                for &w in &adj[v] {
                    if comp[w] == usize::MAX {
                        comp[w] = id;
                        members.push(w);
                        stack.push(w);
                    }
                }
            }
            members.sort_unstable();
            classes.push(members);
        }
        classes
    }

    /// True iff every linkage class is strongly connected.
    pub fn is_weakly_reversible(&self) -> bool {
        let n = self.vertices.len();
        let mut fwd = vec![Vec::new(); n];
        let mut bwd = vec![Vec::new(); n];
        for &(s, t) in &self.edges {
            fwd[s].push(t);
            bwd[t].push(s);
        }
        self.linkage_classes().iter().all(|class| {
            let root = class[0];
            let a = reach(&fwd, root);
            let b = reach(&bwd, root);
            class.iter().all(|&v| a[v] && b[v])
        })
    }

    pub fn stoichiometric_dimension(&self) -> usize {
        self.stoichiometric_matrix().map_or(0, |m| m.rank())
    }

    /// Reaction vectors as rows, or `None` without edges.
    pub fn stoichiometric_matrix(&self) -> Option<QMatrix> {
        if self.edges.is_empty() {
            return None;
        }
        let rows: Vec<Vec<Q>> = (0..self.edges.len())
            .map(|e| self.reaction_vector(e).coords().to_vec())
            .collect();
        Some(QMatrix::from_rows(&rows))
    }

    pub fn deficiency(&self) -> i64 {
        self.vertices.len() as i64
            - self.linkage_classes().len() as i64
            - self.stoichiometric_dimension() as i64
    }

    /// Same graph with every vertex shifted by `t`.
    pub fn translated(&self, t: &RationalVec) -> EGraph {
        EGraph {
            vertices: self.vertices.iter().map(|v| v.add(t)).collect(),
            edges: self.edges.clone(),
            labels: self.labels.clone(),
        }
    }

    /// Name of the formal rate of edge `e`, e.g. `k12` (1-based indices).
    pub fn rate_name(&self, e: usize) -> String {
        let (s, t) = self.edges[e];
        if self.vertices.len() <= 9 {
            format!("k{}{}", s + 1, t + 1)
        } else {
            format!("k{}_{}", s + 1, t + 1)
        }
    }

    pub fn rate_names(&self) -> Vec<String> {
        (0..self.edges.len()).map(|e| self.rate_name(e)).collect()
    }
}

fn reach(adj: &[Vec<usize>], root: usize) -> Vec<bool> {
    let mut seen = vec![false; adj.len()];
    seen[root] = true;
    let mut stack = vec![root];
    while let Some(v) = stack.pop() {
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    seen
}

pub fn lex_cmp(a: &RationalVec, b: &RationalVec) -> Ordering {
    a.coords().cmp(b.coords())
}

/// Per-edge rate values.
#[derive(Clone, Debug, PartialEq)]
pub enum Rates {
    Exact(Vec<Q>),
    Approx(Vec<f64>),
}

/// Rate constants for the edges of a graph. Zero entries are only accepted
/// when `subgraph` is set, meaning the zero edges are switched off.
#[derive(Clone, Debug, PartialEq)]
pub struct RateAssignment {
    values: Rates,
    subgraph: bool,
}

impl RateAssignment {
    pub fn exact(values: Vec<Q>) -> Result<Self> {
        Self::build(Rates::Exact(values), false)
    }

    pub fn approx(values: Vec<f64>) -> Result<Self> {
        Self::build(Rates::Approx(values), false)
    }

    /// Nonnegative rates; zero entries select a subgraph.
    pub fn subgraph(values: Rates) -> Result<Self> {
        Self::build(values, true)
    }

    pub fn from_ints(values: &[i64]) -> Result<Self> {
        Self::exact(values.iter().map(|&v| crate::rational::q(v)).collect())
    }

    fn build(values: Rates, subgraph: bool) -> Result<Self> {
        let bad = match &values {
            Rates::Exact(v) => v
                .iter()
                .position(|x| x.is_negative() || (!subgraph && x.is_zero())),
            Rates::Approx(v) => v
                .iter()
                .position(|x| !x.is_finite() || *x < 0.0 || (!subgraph && *x == 0.0)),
        };
        if let Some(i) = bad {
            let need = if subgraph {
                "nonnegative"
            } else {
                "strictly positive"
            };
            return Err(Error::Rates(format!("rate of edge {i} must be {need}")));
        }
        Ok(RateAssignment { values, subgraph })
    }

    pub fn len(&self) -> usize {
        match &self.values {
            Rates::Exact(v) => v.len(),
            Rates::Approx(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_subgraph(&self) -> bool {
        self.subgraph
    }

    pub fn values(&self) -> &Rates {
        &self.values
    }

    pub fn as_exact(&self) -> Option<&[Q]> {
        match &self.values {
            Rates::Exact(v) => Some(v),
            Rates::Approx(_) => None,
        }
    }

    /// Exact values; floats are converted to the rational they represent.
    pub fn to_exact_lossless(&self) -> Vec<Q> {
        match &self.values {
            Rates::Exact(v) => v.clone(),
            Rates::Approx(v) => v.iter().map(|&x| from_f64(x)).collect(),
        }
    }

    pub fn to_f64(&self) -> Vec<f64> {
        match &self.values {
            Rates::Exact(v) => v.iter().map(to_f64).collect(),
            Rates::Approx(v) => v.clone(),
        }
    }

    pub fn check_graph(&self, g: &EGraph) -> Result<()> {
        if self.len() != g.num_edges() {
            return Err(Error::Dimension(format!(
                "{} rates for {} edges",
                self.len(),
                g.num_edges()
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(pts: &[(i64, i64)], edges: &[(usize, usize)]) -> EGraph {
        EGraph::new(
            pts.iter()
                .map(|&(a, b)| RationalVec::from_ints(&[a, b]))
                .collect(),
            edges.to_vec(),
        )
        .unwrap()
    }

    #[test]
    fn rejects_malformed() {
        let v = vec![
            RationalVec::from_ints(&[0, 0]),
            RationalVec::from_ints(&[1, 0]),
        ];
        assert!(EGraph::new(v.clone(), vec![(0, 0)]).is_err());
        assert!(EGraph::new(v.clone(), vec![(0, 1), (0, 1)]).is_err());
        assert!(EGraph::new(vec![v[0].clone(), v[0].clone()], vec![]).is_err());
        assert!(EGraph::new(vec![v[0].clone(), RationalVec::from_ints(&[1])], vec![]).is_err());
    }

    #[test]
    fn triangle_structure() {
        let g = EGraph::complete(vec![
            RationalVec::from_ints(&[2, 0]),
            RationalVec::from_ints(&[1, 1]),
            RationalVec::from_ints(&[0, 2]),
        ])
        .unwrap();
        assert_eq!(g.linkage_classes(), vec![vec![0, 1, 2]]);
        assert!(g.is_weakly_reversible());
        assert_eq!(g.stoichiometric_dimension(), 1);
        assert_eq!(g.deficiency(), 1);
    }

    #[test]
    fn edgeless_and_pairs() {
        let g = line(&[(0, 0), (1, 0)], &[]);
        assert_eq!(g.linkage_classes(), vec![vec![0], vec![1]]);
        assert_eq!(g.stoichiometric_dimension(), 0);
        let p = line(&[(1, 0), (0, 1)], &[(0, 1), (1, 0)]);
        assert_eq!(p.deficiency(), 0);
        let c = line(&[(2, 0), (1, 1), (0, 2)], &[(0, 1), (1, 2), (2, 0)]);
        assert!(c.is_weakly_reversible());
        let open = line(&[(2, 0), (1, 1), (0, 2)], &[(0, 1), (1, 2)]);
        assert!(!open.is_weakly_reversible());
    }

    #[test]
    fn sources_are_lexicographic() {
        let g = line(&[(0, 2), (2, 0), (1, 1)], &[(0, 2), (1, 2), (2, 1)]);
        assert_eq!(g.sources(), vec![0, 2, 1]);
    }

    #[test]
    fn rates_validation() {
        assert!(RateAssignment::from_ints(&[1, 0]).is_err());
        assert!(RateAssignment::subgraph(Rates::Exact(vec![crate::rational::q(0)])).is_ok());
        assert!(RateAssignment::approx(vec![f64::NAN]).is_err());
    }
}
