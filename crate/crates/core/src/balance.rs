//! Complex and detailed balance at a state, tree constants, and the binomial
//! equations of the toric locus.

use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::linalg::{primitive_integer, solve_dense, QMatrix};
use crate::massaction::monomial;
use crate::model::{EGraph, RateAssignment};
use crate::poly::SparsePoly;
use crate::rational::{from_f64, Q};

/// Tree constant of every vertex as a polynomial in the formal edge rates.
#[derive(Clone, Debug)]
pub struct TreeConstants {
    pub vars: Arc<Vec<String>>,
    pub constants: Vec<SparsePoly>,
}

#[derive(Clone, Debug)]
pub struct ToricIdeal {
    pub trees: TreeConstants,
    pub cayley_kernel: Vec<Vec<BigInt>>,
    pub generators: Vec<SparsePoly>,
}

fn check_positive(x0: &[f64]) -> Result<()> {
    if x0.iter().all(|&x| x > 0.0 && x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonPositiveState)
    }
}

/// Per-vertex (inflow, outflow) at `x0`.
pub fn vertex_flows(g: &EGraph, rates: &[f64], x0: &[f64]) -> Vec<(f64, f64)> {
    let mono: Vec<f64> = g
        .vertices()
        .iter()
        .map(|v| monomial(x0, &v.to_f64()))
        .collect();
    let mut flows = vec![(0.0, 0.0); g.num_vertices()];
    for (e, &(s, t)) in g.edges().iter().enumerate() {
        let f = rates[e] * mono[s];
        flows[s].1 += f;
        flows[t].0 += f;
    }
    flows
}

/// Largest relative imbalance `|in - out| / max(in, out)` over the vertices.
pub fn complex_balance_residual(g: &EGraph, rates: &[f64], x0: &[f64]) -> f64 {
    vertex_flows(g, rates, x0)
        .into_iter()
        .map(|(i, o)| rel_gap(i, o))
        .fold(0.0, f64::max)
}

fn rel_gap(a: f64, b: f64) -> f64 {
    let m = a.abs().max(b.abs());
    if m == 0.0 {
        0.0
    } else {
        (a - b).abs() / m
    }
}

pub fn is_complex_balanced_at(
    g: &EGraph,
    k: &RateAssignment,
    x0: &[f64],
    tol: f64,
) -> Result<bool> {
    k.check_graph(g)?;
    check_positive(x0)?;
    if tol == 0.0 {
        if let Some(exact) = k.as_exact() {
            let xq: Vec<Q> = x0.iter().map(|&x| from_f64(x)).collect();
            return is_complex_balanced_exact(g, exact, &xq);
        }
    }
    Ok(complex_balance_residual(g, &k.to_f64(), x0) <= tol)
}

/// Exact test; needs nonnegative integer vertex coordinates.
pub fn is_complex_balanced_exact(g: &EGraph, rates: &[Q], x0: &[Q]) -> Result<bool> {
    if x0.iter().any(|x| !x.is_positive()) {
        return Err(Error::NonPositiveState);
    }
    let mono = exact_monomials(g, x0)?;
    let mut net = vec![Q::zero(); g.num_vertices()];
    for (e, &(s, t)) in g.edges().iter().enumerate() {
        let f = &rates[e] * &mono[s];
        net[s] -= &f;
        net[t] += f;
    }
    Ok(net.iter().all(Zero::is_zero))
}

fn exact_monomials(g: &EGraph, x0: &[Q]) -> Result<Vec<Q>> {
    g.vertices()
        .iter()
        .map(|v| {
            let e = v.as_exponents().ok_or_else(|| {
                Error::ExactRequired(format!("vertex {v} needs integer coordinates"))
            })?;
            Ok(x0.iter().zip(e).fold(Q::one(), |acc, (x, k)| {
                acc * num_traits::pow(x.clone(), k as usize)
            }))
        })
        .collect()
}

/// Largest relative gap `|k_fwd x^y - k_bwd x^y'|` over reversible pairs.
pub fn detailed_balance_residual(g: &EGraph, rates: &[f64], x0: &[f64]) -> Result<f64> {
    if !g.is_reversible() {
        return Err(Error::NotReversible);
    }
    let mono: Vec<f64> = g
        .vertices()
        .iter()
        .map(|v| monomial(x0, &v.to_f64()))
        .collect();
    let mut worst: f64 = 0.0;
    for (e, &(s, t)) in g.edges().iter().enumerate() {
        if s < t {
            let r = g.edge_index(t, s).expect("reversible");
            worst = worst.max(rel_gap(rates[e] * mono[s], rates[r] * mono[t]));
        }
    }
    Ok(worst)
}

pub fn is_detailed_balanced_at(
    g: &EGraph,
    k: &RateAssignment,
    x0: &[f64],
    tol: f64,
) -> Result<bool> {
    k.check_graph(g)?;
    if !g.is_reversible() {
        return Err(Error::NotReversible);
    }
    check_positive(x0)?;
    if tol == 0.0 {
        if let Some(exact) = k.as_exact() {
            let xq: Vec<Q> = x0.iter().map(|&x| from_f64(x)).collect();
            let mono = exact_monomials(g, &xq)?;
            return Ok(g.edges().iter().enumerate().all(|(e, &(s, t))| {
                let r = g.edge_index(t, s).unwrap();
                &exact[e] * &mono[s] == &exact[r] * &mono[t]
            }));
        }
    }
    Ok(detailed_balance_residual(g, &k.to_f64(), x0)? <= tol)
}

/// Symbolic determinant by Laplace expansion, memoized on the remaining columns.
fn symbolic_det(m: &[Vec<SparsePoly>], vars: &Arc<Vec<String>>) -> SparsePoly {
    let n = m.len();
    let mut memo: HashMap<u32, SparsePoly> = HashMap::new();
    fn go(
        m: &[Vec<SparsePoly>],
        mask: u32,
        n: usize,
        vars: &Arc<Vec<String>>,
        memo: &mut HashMap<u32, SparsePoly>,
    ) -> SparsePoly {
        if mask == 0 {
            return SparsePoly::constant(vars, Q::one());
        }
        if let Some(p) = memo.get(&mask) {
            return p.clone();
        }
        let row = n - mask.count_ones() as usize;
        let mut acc = SparsePoly::zero(vars);
        let mut before = 0;
        for j in 0..n {
            if mask & (1 << j) == 0 {
                continue;
            }
            if !m[row][j].is_zero() {
                let minor = go(m, mask & !(1 << j), n, vars, memo);
                let term = m[row][j].mul(&minor);
                acc = if before % 2 == 0 {
                    acc.add(&term)
                } else {
                    acc.sub(&term)
                };
            }
            before += 1;
        }
        memo.insert(mask, acc.clone());
        acc
    }
    go(m, (1u32 << n) - 1, n, vars, &mut memo)
}

/// Rooted spanning-tree polynomial of each vertex within its linkage class:
/// the minor of the out-degree Laplacian with the vertex's row and column removed.
pub fn tree_constants(g: &EGraph) -> Result<TreeConstants> {
    if !g.is_weakly_reversible() {
        return Err(Error::NotWeaklyReversible);
    }
    let vars = Arc::new(g.rate_names());
    let mut constants = vec![SparsePoly::zero(&vars); g.num_vertices()];
    for class in g.linkage_classes() {
        let local = |v: usize| class.iter().position(|&c| c == v);
        let m = class.len();
        let mut lap = vec![vec![SparsePoly::zero(&vars); m]; m];
        for (e, &(s, t)) in g.edges().iter().enumerate() {
            if let (Some(i), Some(j)) = (local(s), local(t)) {
                let k = SparsePoly::var(&vars, e);
                lap[i][i] = lap[i][i].add(&k);
                lap[i][j] = lap[i][j].sub(&k);
            }
        }
        for (i, &v) in class.iter().enumerate() {
            let minor: Vec<Vec<SparsePoly>> = (0..m)
                .filter(|&r| r != i)
                .map(|r| {
                    (0..m)
                        .filter(|&c| c != i)
                        .map(|c| lap[r][c].clone())
                        .collect()
                })
                .collect();
            constants[v] = symbolic_det(&minor, &vars);
        }
    }
    Ok(TreeConstants { vars, constants })
}

/// Exact numeric tree constants at given rates (same minors, evaluated).
pub fn tree_constants_at(g: &EGraph, rates: &[Q]) -> Vec<Q> {
    let mut out = vec![Q::zero(); g.num_vertices()];
    for class in g.linkage_classes() {
        let m = class.len();
        let mut lap = QMatrix::zeros(m, m);
        for (e, &(s, t)) in g.edges().iter().enumerate() {
            if let (Some(i), Some(j)) = (
                class.iter().position(|&c| c == s),
                class.iter().position(|&c| c == t),
            ) {
                lap[(i, i)] += &rates[e];
                lap[(i, j)] -= &rates[e];
            }
        }
        for (i, &v) in class.iter().enumerate() {
            let rows: Vec<Vec<Q>> = (0..m)
                .filter(|&r| r != i)
                .map(|r| {
                    (0..m)
                        .filter(|&c| c != i)
                        .map(|c| lap[(r, c)].clone())
                        .collect()
                })
                .collect();
            out[v] = if rows.is_empty() {
                Q::one()
            } else {
                QMatrix::from_rows(&rows).det()
            };
        }
    }
    out
}

/// Float tree constants via partial-pivot elimination.
pub fn tree_constants_f64(g: &EGraph, rates: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; g.num_vertices()];
    for class in g.linkage_classes() {
        let m = class.len();
        let mut lap = vec![vec![0.0; m]; m];
        for (e, &(s, t)) in g.edges().iter().enumerate() {
            if let (Some(i), Some(j)) = (
                class.iter().position(|&c| c == s),
                class.iter().position(|&c| c == t),
            ) {
                lap[i][i] += rates[e];
                lap[i][j] -= rates[e];
            }
        }
        for (i, &v) in class.iter().enumerate() {
            let minor: Vec<Vec<f64>> = (0..m)
                .filter(|&r| r != i)
                .map(|r| (0..m).filter(|&c| c != i).map(|c| lap[r][c]).collect())
                .collect();
            out[v] = det_f64(minor);
        }
    }
    out
}

fn det_f64(mut a: Vec<Vec<f64>>) -> f64 {
    let n = a.len();
    let mut det = 1.0;
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))
            .unwrap();
        if a[p][k] == 0.0 {
            return 0.0;
        }
        if p != k {
            a.swap(p, k);
            det = -det;
        }
        det *= a[k][k];
        for i in k + 1..n {
            let f = a[i][k] / a[k][k];
            for j in k..n {
                a[i][j] -= f * a[k][j];
            }
        }
    }
    det
}

/// Vertex coordinates stacked over one indicator row per linkage class.
pub fn cayley_matrix(g: &EGraph) -> QMatrix {
    let classes = g.linkage_classes();
    let n = g.dim();
    let mut m = QMatrix::zeros(n + classes.len(), g.num_vertices());
    for (j, v) in g.vertices().iter().enumerate() {
        for (i, c) in v.coords().iter().enumerate() {
            m[(i, j)] = c.clone();
        }
    }
    for (r, class) in classes.iter().enumerate() {
        for &v in class {
            m[(n + r, v)] = Q::one();
        }
    }
    m
}

/// Primitive integer kernel basis of the Cayley matrix, first nonzero entry positive.
pub fn cayley_kernel(g: &EGraph) -> Vec<Vec<BigInt>> {
    cayley_matrix(g)
        .nullspace()
        .iter()
        .map(|v| primitive_integer(v))
        .collect()
}

fn split_exponents(v: &[BigInt]) -> (Vec<u32>, Vec<u32>) {
    let pos = v
        .iter()
        .map(|x| {
            if x.is_positive() {
                x.to_u32().expect("small exponent")
            } else {
                0
            }
        })
        .collect();
    let neg = v
        .iter()
        .map(|x| {
            if x.is_negative() {
                (-x).to_u32().expect("small exponent")
            } else {
                0
            }
        })
        .collect();
    (pos, neg)
}

pub fn toric_ideal(g: &EGraph) -> Result<ToricIdeal> {
    let trees = tree_constants(g)?;
    let kernel = cayley_kernel(g);
    let one = SparsePoly::constant(&trees.vars, Q::one());
    let generators = kernel
        .iter()
        .map(|v| {
            let (pos, neg) = split_exponents(v);
            let side = |e: &[u32]| {
                e.iter()
                    .zip(&trees.constants)
                    .filter(|(&k, _)| k > 0)
                    .fold(one.clone(), |acc, (&k, p)| acc.mul(&p.pow(k)))
            };
            side(&pos).sub(&side(&neg))
        })
        .collect();
    Ok(ToricIdeal {
        trees,
        cayley_kernel: kernel,
        generators,
    })
}

/// Exact membership in the toric locus. Graphs that are not weakly reversible
/// have an empty toric locus.
pub fn in_toric_locus(g: &EGraph, rates: &[Q]) -> bool {
    if !g.is_weakly_reversible() || rates.iter().any(|r| !r.is_positive()) {
        return false;
    }
    let k = tree_constants_at(g, rates);
    cayley_kernel(g).iter().all(|v| {
        let (pos, neg) = split_exponents(v);
        let side = |e: &[u32]| {
            e.iter().zip(&k).fold(Q::one(), |acc, (&p, kv)| {
                acc * num_traits::pow(kv.clone(), p as usize)
            })
        };
        side(&pos) == side(&neg)
    })
}

/// A positive state with `x^{y_i} / K_i` constant on every linkage class, found
/// by least squares in log coordinates. Returns `None` if the graph is not
/// weakly reversible on the support of the rates. The caller judges how well
/// the point balances via [`complex_balance_residual`].
pub fn complex_balanced_point(g: &EGraph, rates: &[f64]) -> Option<Vec<f64>> {
    let support: Vec<usize> = (0..g.num_edges()).filter(|&e| rates[e] > 0.0).collect();
    let sub = g.edge_subgraph(&support);
    if !sub.is_weakly_reversible() {
        return None;
    }
    let sub_rates: Vec<f64> = support.iter().map(|&e| rates[e]).collect();
    let k = tree_constants_f64(&sub, &sub_rates);
    if k.iter().any(|&x| x <= 0.0 || !x.is_finite()) {
        return None;
    }
    let mut rows_q = Vec::new();
    let mut rhs = Vec::new();
    for class in sub.linkage_classes() {
        let r = class[0];
        for &i in &class[1..] {
            rows_q.push(g.vertex(i).sub(g.vertex(r)).coords().to_vec());
            rhs.push(k[i].ln() - k[r].ln());
        }
    }
    let n = g.dim();
    if rows_q.is_empty() {
        return Some(vec![1.0; n]);
    }
    let z = min_norm_lstsq(&rows_q, &rhs, n)?;
    Some(z.iter().map(|v| v.exp()).collect())
}

/// Least-squares solution restricted to the row space (minimum norm).
fn min_norm_lstsq(rows_q: &[Vec<Q>], b: &[f64], n: usize) -> Option<Vec<f64>> {
    let m = QMatrix::from_rows(rows_q);
    let (rref, pivots) = m.rref();
    let basis: Vec<Vec<f64>> = (0..pivots.len())
        .map(|i| rref.row(i).iter().map(crate::rational::to_f64).collect())
        .collect();
    let a: Vec<Vec<f64>> = rows_q
        .iter()
        .map(|r| r.iter().map(crate::rational::to_f64).collect())
        .collect();
    // z = B^T w ; minimize |A B^T w - b|
    let r = basis.len();
    let abt: Vec<Vec<f64>> = a
        .iter()
        .map(|row| {
            (0..r)
                .map(|j| (0..n).map(|c| row[c] * basis[j][c]).sum())
                .collect()
        })
        .collect();
    let mut ata = vec![vec![0.0; r]; r];
    let mut atb = vec![0.0; r];
    for (row, &bi) in abt.iter().zip(b) {
        for i in 0..r {
            atb[i] += row[i] * bi;
            for j in 0..r {
                ata[i][j] += row[i] * row[j];
            }
        }
    }
    let w = solve_dense(ata, atb)?;
    Some(
        (0..n)
            .map(|c| (0..r).map(|j| basis[j][c] * w[j]).sum())
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::RationalVec;
    use crate::rational::q;

    fn triangle() -> EGraph {
        EGraph::complete(vec![
            RationalVec::from_ints(&[2, 0]),
            RationalVec::from_ints(&[1, 1]),
            RationalVec::from_ints(&[0, 2]),
        ])
        .unwrap()
    }

    #[test]
    fn two_cycle_trees() {
        let g = EGraph::new(
            vec![
                RationalVec::from_ints(&[1, 0]),
                RationalVec::from_ints(&[0, 1]),
            ],
            vec![(0, 1), (1, 0)],
        )
        .unwrap();
        let t = tree_constants(&g).unwrap();
        assert_eq!(t.constants[0].to_string(), "k21");
        assert_eq!(t.constants[1].to_string(), "k12");
        assert!(toric_ideal(&g).unwrap().generators.is_empty());
    }

    #[test]
    fn triangle_generator_and_membership() {
        let g = triangle();
        let ti = toric_ideal(&g).unwrap();
        assert_eq!(
            ti.cayley_kernel,
            vec![vec![BigInt::from(1), BigInt::from(-2), BigInt::from(1)]]
        );
        assert_eq!(ti.generators.len(), 1);
        let ones = vec![q(1); 6];
        assert!(in_toric_locus(&g, &ones));
        let mut k = ones.clone();
        k[g.edge_index(1, 0).unwrap()] = q(2);
        assert!(!in_toric_locus(&g, &k));
        assert_eq!(tree_constants_at(&g, &ones), vec![q(3), q(3), q(3)]);
    }

    #[test]
    fn balanced_points() {
        let g = triangle();
        let k = RateAssignment::from_ints(&[1; 6]).unwrap();
        assert!(is_complex_balanced_at(&g, &k, &[1.0, 1.0], 0.0).unwrap());
        assert!(is_detailed_balanced_at(&g, &k, &[1.0, 1.0], 1e-12).unwrap());
        assert!(!is_complex_balanced_at(&g, &k, &[1.0, 2.0], 1e-9).unwrap());
        assert!(is_complex_balanced_at(&g, &k, &[0.0, 1.0], 1e-9).is_err());
        let x = complex_balanced_point(&g, &[1.0; 6]).unwrap();
        assert!(complex_balance_residual(&g, &[1.0; 6], &x) < 1e-12);
    }

    #[test]
    fn detailed_balance_needs_reversible() {
        let g = EGraph::new(
            vec![
                RationalVec::from_ints(&[2, 0]),
                RationalVec::from_ints(&[1, 1]),
                RationalVec::from_ints(&[0, 2]),
            ],
            vec![(0, 1), (1, 2), (2, 0)],
        )
        .unwrap();
        let k = RateAssignment::from_ints(&[1, 1, 1]).unwrap();
        assert!(matches!(
            is_detailed_balanced_at(&g, &k, &[1.0, 1.0], 1e-9),
            Err(Error::NotReversible)
        ));
        assert!(is_complex_balanced_at(&g, &k, &[1.0, 1.0], 0.0).unwrap());
    }
}
