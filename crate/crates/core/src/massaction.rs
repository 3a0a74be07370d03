//! The mass-action vector field of a graph with rates, its per-source
//! structure, and realization equality.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::QMatrix;
use crate::model::{EGraph, RateAssignment, RationalVec};
use crate::poly::SparsePoly;
use crate::rational::{to_f64, Q};

/// Right-hand side of `dx/dt = sum_e k_e x^{source} (target - source)`.
#[derive(Clone, Debug)]
pub struct MassActionSystem {
    pub graph: EGraph,
    pub rates: RateAssignment,
    pub components: Vec<SparsePoly>,
}

pub fn species_names(n: usize) -> Arc<Vec<String>> {
    Arc::new((1..=n).map(|i| format!("x{i}")).collect())
}

/// Expands the system exactly. Float rates enter through their exact binary value.
/// Source vertices must have nonnegative integer coordinates.
pub fn generate_system(g: &EGraph, k: &RateAssignment) -> Result<MassActionSystem> {
    k.check_graph(g)?;
    let rates = k.to_exact_lossless();
    let vars = species_names(g.dim());
    let mut components = vec![SparsePoly::zero(&vars); g.dim()];
    for (y, net) in net_vectors(g, &rates) {
        let v = RationalVec::new(y);
        let exps = v.as_exponents().ok_or_else(|| {
            Error::Unsupported(format!("source {v} is not a nonnegative integer point"))
        })?;
        for (i, c) in net.iter().enumerate() {
            if !c.is_zero() {
                components[i] =
                    components[i].add(&SparsePoly::monomial(&vars, exps.clone(), c.clone()));
            }
        }
    }
    Ok(MassActionSystem {
        graph: g.clone(),
        rates: k.clone(),
        components,
    })
}

/// Net reaction vector `sum k_e (y' - y)` per source coordinate vector. Sources
/// whose net vector vanishes are omitted, so the map is a canonical form of
/// the vector field.
pub fn net_vectors(g: &EGraph, rates: &[Q]) -> BTreeMap<Vec<Q>, Vec<Q>> {
    let mut out: BTreeMap<Vec<Q>, Vec<Q>> = BTreeMap::new();
    for (e, &(s, _)) in g.edges().iter().enumerate() {
        if rates[e].is_zero() {
            continue;
        }
        let v = g.reaction_vector(e);
        let entry = out
            .entry(g.vertex(s).coords().to_vec())
            .or_insert_with(|| vec![Q::zero(); g.dim()]);
        for (acc, c) in entry.iter_mut().zip(v.coords()) {
            *acc += &rates[e] * c;
        }
    }
    out.retain(|_, v| v.iter().any(|c| !c.is_zero()));
    out
}

/// Net reaction vectors with symbolic rates (one polynomial per edge).
pub fn net_vectors_symbolic(g: &EGraph, rates: &[SparsePoly]) -> BTreeMap<Vec<Q>, Vec<SparsePoly>> {
    assert_eq!(rates.len(), g.num_edges());
    let mut out: BTreeMap<Vec<Q>, Vec<SparsePoly>> = BTreeMap::new();
    let Some(vars) = rates.first().map(|r| r.vars().clone()) else {
        return out;
    };
    for (e, &(s, _)) in g.edges().iter().enumerate() {
        let v = g.reaction_vector(e);
        let entry = out
            .entry(g.vertex(s).coords().to_vec())
            .or_insert_with(|| vec![SparsePoly::zero(&vars); g.dim()]);
        for (acc, c) in entry.iter_mut().zip(v.coords()) {
            *acc = acc.add(&rates[e].scale(c));
        }
    }
    out.retain(|_, v| v.iter().any(|c| !c.is_zero()));
    out
}

/// Exact equality of the two generated vector fields.
pub fn same_dynamics(
    g1: &EGraph,
    k1: &RateAssignment,
    g2: &EGraph,
    k2: &RateAssignment,
) -> Result<bool> {
    if g1.dim() != g2.dim() {
        return Err(Error::Dimension(format!(
            "{} vs {} species",
            g1.dim(),
            g2.dim()
        )));
    }
    k1.check_graph(g1)?;
    k2.check_graph(g2)?;
    let (Some(a), Some(b)) = (k1.as_exact(), k2.as_exact()) else {
        return Err(Error::ExactRequired(
            "realization equality compares exact rates".into(),
        ));
    };
    Ok(net_vectors(g1, a) == net_vectors(g2, b))
}

/// Per-source reaction-vector matrices and their kernels.
#[derive(Clone, Debug)]
pub struct SourceDecomposition {
    pub sources: Vec<usize>,
    /// Out-edge indices of each source, in declared order.
    pub edges: Vec<Vec<usize>>,
    /// Columns are the reaction vectors of `edges[i]`.
    pub matrices: Vec<QMatrix>,
    pub kernels: Vec<Vec<Vec<Q>>>,
}

pub fn source_decomposition(g: &EGraph) -> SourceDecomposition {
    let sources = g.sources();
    let mut edges = Vec::new();
    let mut matrices = Vec::new();
    let mut kernels = Vec::new();
    for &s in &sources {
        let out = g.out_edges(s);
        let cols: Vec<Vec<Q>> = out
            .iter()
            .map(|&e| g.reaction_vector(e).coords().to_vec())
            .collect();
        let m = QMatrix::from_columns(g.dim(), &cols);
        kernels.push(m.nullspace());
        matrices.push(m);
        edges.push(out);
    }
    SourceDecomposition {
        sources,
        edges,
        matrices,
        kernels,
    }
}

impl SourceDecomposition {
    pub fn kernel_dims(&self) -> Vec<usize> {
        self.kernels.iter().map(Vec::len).collect()
    }

    /// `k + sum_j t_j b_j` over the concatenated kernel bases.
    pub fn perturb(&self, k: &[Q], t: &[Q]) -> Vec<Q> {
        let mut out = k.to_vec();
        let mut idx = 0;
        for (edges, basis) in self.edges.iter().zip(&self.kernels) {
            for b in basis {
                let c = &t[idx];
                idx += 1;
                for (e, bi) in edges.iter().zip(b) {
                    out[*e] += c * bi;
                }
            }
        }
        out
    }

    pub fn total_kernel_dim(&self) -> usize {
        self.kernels.iter().map(Vec::len).sum()
    }
}

/// Float evaluator of a mass-action vector field; accepts arbitrary rational exponents.
#[derive(Clone, Debug)]
pub struct Rhs {
    dim: usize,
    sources: Vec<(Vec<f64>, Vec<f64>)>,
}

impl Rhs {
    pub fn new(g: &EGraph, rates: &[f64]) -> Self {
        assert_eq!(rates.len(), g.num_edges());
        let mut map: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
        for (e, &(s, _)) in g.edges().iter().enumerate() {
            let v = g.reaction_vector(e);
            let entry = map.entry(s).or_insert_with(|| vec![0.0; g.dim()]);
            for (acc, c) in entry.iter_mut().zip(v.coords()) {
                *acc += rates[e] * to_f64(c);
            }
        }
        Rhs {
            dim: g.dim(),
            sources: map
                .into_iter()
                .map(|(s, net)| (g.vertex(s).to_f64(), net))
                .collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eval_into(&self, x: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for (y, net) in &self.sources {
            let m = monomial(x, y);
            for (o, c) in out.iter_mut().zip(net) {
                *o += m * c;
            }
        }
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.eval_into(x, &mut out);
        out
    }
}

/// `x^y` for a positive point and real exponent vector.
pub fn monomial(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).fold(1.0, |acc, (&xi, &yi)| {
        if yi == 0.0 {
            acc
        } else if yi.fract() == 0.0 && yi.abs() < 64.0 {
            acc * xi.powi(yi as i32)
        } else {
            acc * xi.powf(yi)
        }
    })
}
