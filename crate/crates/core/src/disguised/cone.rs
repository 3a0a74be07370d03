//! Polyhedral cones: per-source realization cones and the cone of
//! rate vectors on a second graph that reproduce a system of the first.

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::linalg::{nnls, primitive_integer, QMatrix};
use crate::model::EGraph;
use crate::rational::{to_f64, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Relation {
    Ge,
    Gt,
}

/// A cone given by generators and by linear equations plus halfspaces.
/// With strict (`Gt`) halfspaces it describes the relative interior of
/// the cone spanned by the generators.
#[derive(Clone, Debug)]
pub struct ConeDescription {
    pub ambient_dim: usize,
    pub generators: Vec<Vec<Q>>,
    pub inequalities: Vec<(Vec<Q>, Relation)>,
    /// Normals `h` with `h . x = 0` on the cone.
    pub equations: Vec<Vec<Q>>,
}

fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).fold(Q::zero(), |acc, (x, y)| acc + x * y)
}

fn to_q(v: &[num_bigint::BigInt]) -> Vec<Q> {
    v.iter().map(|x| Q::from_integer(x.clone())).collect()
}

impl ConeDescription {
    pub fn contains(&self, x: &[Q]) -> bool {
        self.equations.iter().all(|h| dot(h, x).is_zero())
            && self.inequalities.iter().all(|(h, rel)| {
                let v = dot(h, x);
                match rel {
                    Relation::Ge => !v.is_negative(),
                    Relation::Gt => v.is_positive(),
                }
            })
    }

    /// Membership in the closed cone spanned by the generators, by
    /// nonnegative least squares.
    pub fn contains_by_generators(&self, x: &[f64], tol: f64) -> bool {
        if self.generators.is_empty() {
            return x.iter().all(|v| v.abs() <= tol);
        }
        let a: Vec<Vec<f64>> = (0..self.ambient_dim)
            .map(|i| self.generators.iter().map(|g| to_f64(&g[i])).collect())
            .collect();
        let (_, r) = nnls(&a, x);
        let scale = x.iter().map(|v| v * v).sum::<f64>().sqrt().max(1.0);
        r <= tol * scale
    }

    pub fn is_strict(&self) -> bool {
        self.inequalities.iter().any(|(_, r)| *r == Relation::Gt)
    }

    /// True when a strict inequality has a zero normal, so nothing satisfies it.
    pub fn is_trivially_empty(&self) -> bool {
        self.inequalities
            .iter()
            .any(|(h, r)| *r == Relation::Gt && h.iter().all(Zero::is_zero))
    }
}

/// Halfspace description of the cone spanned by `gens` inside its linear
/// span. Facet normals are found by trying every subset of `rank - 1`
/// generators, which is fine at the sizes met here.
pub fn cone_hrep(gens: &[Vec<Q>], dim: usize, open: bool) -> ConeDescription {
    let nz: Vec<Vec<Q>> = gens
        .iter()
        .filter(|g| g.iter().any(|x| !x.is_zero()))
        .cloned()
        .collect();
    let equations: Vec<Vec<Q>> = if nz.is_empty() {
        (0..dim)
            .map(|i| {
                (0..dim)
                    .map(|j| {
                        if i == j {
                            Q::from_integer(1.into())
                        } else {
                            Q::zero()
                        }
                    })
                    .collect()
            })
            .collect()
    } else {
        QMatrix::from_rows(&nz)
            .nullspace()
            .iter()
            .map(|v| to_q(&primitive_integer(v)))
            .collect()
    };
    let rank = if nz.is_empty() {
        0
    } else {
        QMatrix::from_rows(&nz).rank()
    };
    let mut inequalities: Vec<(Vec<Q>, Relation)> = Vec::new();
    let rel = if open { Relation::Gt } else { Relation::Ge };
    if rank > 0 {
        for subset in subsets(nz.len(), rank - 1) {
            let mut rows: Vec<Vec<Q>> = subset.iter().map(|&i| nz[i].clone()).collect();
            rows.extend(equations.iter().cloned());
            let ns = if rows.is_empty() {
                QMatrix::zeros(1, dim).nullspace()
            } else {
                QMatrix::from_rows(&rows).nullspace()
            };
            if ns.len() != 1 {
                continue;
            }
            let h = to_q(&primitive_integer(&ns[0]));
            let vals: Vec<Q> = nz.iter().map(|g| dot(&h, g)).collect();
            let h = if vals.iter().all(|v| !v.is_negative()) {
                h
            } else if vals.iter().all(|v| !v.is_positive()) {
                h.iter().map(|x| -x).collect()
            } else {
                continue;
            };
            if !inequalities.iter().any(|(g, _)| g == &h) {
                inequalities.push((h, rel));
            }
        }
    }
    ConeDescription {
        ambient_dim: dim,
        generators: nz,
        inequalities,
        equations,
    }
}

/// All `k`-element subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Cone generated by the reaction vectors leaving vertex `y`; the zero cone
/// when `y` is not a source. `open` selects the relative interior.
pub fn source_cone(g: &EGraph, y: usize, open: bool) -> ConeDescription {
    let gens: Vec<Vec<Q>> = g
        .out_edges(y)
        .iter()
        .map(|&e| g.reaction_vector(e).coords().to_vec())
        .collect();
    cone_hrep(&gens, g.dim(), open)
}

/// Extreme rays of the pointed cone `{z : r . z >= 0 for every row r}` by the
/// double description method. Returns `None` if the cone is not pointed.
pub fn double_description(rows: &[Vec<Q>], dim: usize) -> Option<Vec<Vec<Q>>> {
    if dim == 0 {
        return Some(Vec::new());
    }
    // pick dim independent rows to seed a simplicial cone
    let mut chosen: Vec<usize> = Vec::new();
    for i in 0..rows.len() {
        let mut trial: Vec<Vec<Q>> = chosen.iter().map(|&j| rows[j].clone()).collect();
        trial.push(rows[i].clone());
        if QMatrix::from_rows(&trial).rank() == trial.len() {
            chosen.push(i);
            if chosen.len() == dim {
                break;
            }
        }
    }
    if chosen.len() < dim {
        return None;
    }
    let seed = QMatrix::from_rows(&chosen.iter().map(|&j| rows[j].clone()).collect::<Vec<_>>());
    let mut rays: Vec<Vec<Q>> = (0..dim)
        .map(|i| {
            let e: Vec<Q> = (0..dim)
                .map(|j| {
                    if i == j {
                        Q::from_integer(1.into())
                    } else {
                        Q::zero()
                    }
                })
                .collect();
            seed.solve(&e).expect("invertible seed")
        })
        .collect();
    let mut processed: Vec<usize> = chosen.clone();
    for (i, row) in rows.iter().enumerate() {
        if chosen.contains(&i) {
            continue;
        }
        let vals: Vec<Q> = rays.iter().map(|r| dot(row, r)).collect();
        let mut next: Vec<Vec<Q>> = Vec::new();
        for (r, v) in rays.iter().zip(&vals) {
            if !v.is_negative() {
                next.push(r.clone());
            }
        }
        for (p, vp) in rays.iter().zip(&vals) {
            if !vp.is_positive() {
                continue;
            }
            for (n, vn) in rays.iter().zip(&vals) {
                if !vn.is_negative() {
                    continue;
                }
                let common: Vec<Vec<Q>> = processed
                    .iter()
                    .filter(|&&j| dot(&rows[j], p).is_zero() && dot(&rows[j], n).is_zero())
                    .map(|&j| rows[j].clone())
                    .collect();
                let adjacent = dim < 2
                    || (common.len() >= dim - 2
                        && (dim == 2 || QMatrix::from_rows(&common).rank() == dim - 2));
                if !adjacent {
                    continue;
                }
                let new: Vec<Q> = n.iter().zip(p).map(|(a, b)| vp * a - vn * b).collect();
                next.push(new);
            }
        }
        processed.push(i);
        rays = normalize_rays(next);
    }
    Some(normalize_rays(rays))
}

fn normalize_rays(rays: Vec<Vec<Q>>) -> Vec<Vec<Q>> {
    let mut out: Vec<Vec<Q>> = Vec::new();
    for r in rays {
        if r.iter().all(Zero::is_zero) {
            continue;
        }
        let p = to_q(&primitive_integer(&r));
        // primitive_integer makes the first nonzero entry positive; keep the
        // original orientation instead
        let flip = r
            .iter()
            .zip(&p)
            .any(|(a, b)| !a.is_zero() && a.is_positive() != b.is_positive());
        let p: Vec<Q> = if flip {
            p.iter().map(|x| -x).collect()
        } else {
            p
        };
        if !out.contains(&p) {
            out.push(p);
        }
    }
    out.sort();
    out
}

/// Rate vectors on `ghat` whose net reaction vector at every source lies in
/// the realization cone of `g` there. `closed` uses closed cones and
/// nonnegative rates; otherwise open cones and positive rates.
pub fn pi_cone(g: &EGraph, ghat: &EGraph, closed: bool) -> ConeDescription {
    let m = ghat.num_edges();
    let dim = g.dim();
    let rel = if closed { Relation::Ge } else { Relation::Gt };
    let mut equations: Vec<Vec<Q>> = Vec::new();
    let mut inequalities: Vec<(Vec<Q>, Relation)> = Vec::new();
    let mut coords: Vec<Vec<Q>> = g
        .sources()
        .iter()
        .map(|&s| g.vertex(s).coords().to_vec())
        .collect();
    for s in ghat.sources() {
        let c = ghat.vertex(s).coords().to_vec();
        if !coords.contains(&c) {
            coords.push(c);
        }
    }
    for y in coords {
        // linear map k_hat -> net vector at y
        let mut map = vec![vec![Q::zero(); m]; dim];
        if let Some(v) = ghat
            .vertices()
            .iter()
            .position(|w| w.coords() == y.as_slice())
        {
            for e in ghat.out_edges(v) {
                for (i, c) in ghat.reaction_vector(e).coords().iter().enumerate() {
                    map[i][e] = c.clone();
                }
            }
        }
        let cone = match g.vertices().iter().position(|w| w.coords() == y.as_slice()) {
            Some(v) => source_cone(g, v, !closed),
            None => cone_hrep(&[], dim, !closed),
        };
        let pull = |h: &[Q]| -> Vec<Q> {
            (0..m)
                .map(|e| (0..dim).fold(Q::zero(), |acc, i| acc + &h[i] * &map[i][e]))
                .collect()
        };
        for h in &cone.equations {
            let p = pull(h);
            if p.iter().any(|x| !x.is_zero()) && !equations.contains(&p) {
                equations.push(p);
            }
        }
        for (h, _) in &cone.inequalities {
            let p = pull(h);
            if !inequalities.iter().any(|(q, _)| q == &p) {
                inequalities.push((p, rel));
            }
        }
    }
    for e in 0..m {
        let mut h = vec![Q::zero(); m];
        h[e] = Q::from_integer(1.into());
        inequalities.push((h, rel));
    }
    let generators = closed_generators(&equations, &inequalities, m);
    ConeDescription {
        ambient_dim: m,
        generators,
        inequalities,
        equations,
    }
}

fn closed_generators(
    equations: &[Vec<Q>],
    inequalities: &[(Vec<Q>, Relation)],
    m: usize,
) -> Vec<Vec<Q>> {
    let basis: Vec<Vec<Q>> = if equations.is_empty() {
        (0..m)
            .map(|i| {
                (0..m)
                    .map(|j| {
                        if i == j {
                            Q::from_integer(1.into())
                        } else {
                            Q::zero()
                        }
                    })
                    .collect()
            })
            .collect()
    } else {
        QMatrix::from_rows(equations).nullspace()
    };
    let r = basis.len();
    if r == 0 {
        return Vec::new();
    }
    let rows: Vec<Vec<Q>> = inequalities
        .iter()
        .map(|(h, _)| basis.iter().map(|b| dot(h, b)).collect())
        .filter(|row: &Vec<Q>| row.iter().any(|x| !x.is_zero()))
        .collect();
    let Some(rays) = double_description(&rows, r) else {
        return Vec::new();
    };
    let mut out: Vec<Vec<Q>> = rays
        .iter()
        .map(|z| {
            let v: Vec<Q> = (0..m)
                .map(|e| {
                    basis
                        .iter()
                        .zip(z)
                        .fold(Q::zero(), |acc, (b, c)| acc + &b[e] * c)
                })
                .collect();
            to_q(&primitive_integer(&v))
        })
        .collect();
    out.sort();
    out.dedup();
    out
}
