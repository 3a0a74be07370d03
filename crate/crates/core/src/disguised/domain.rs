//! Polyhedral domains of auxiliary coordinates: vertex and ray enumeration
//! per independent block, and seeded sampling.

use num_traits::{One, Signed, Zero};
use rand::Rng;

use crate::linalg::QMatrix;
use crate::rational::{to_f64, Q};

use super::cone::{double_description, subsets};

/// `constant + coef . t` with `> 0` when strict, `>= 0` otherwise.
pub type AffineConstraint = (Q, Vec<Q>, bool);

#[derive(Clone, Debug)]
pub struct Block {
    pub vars: Vec<usize>,
    pub vertices: Vec<Vec<Q>>,
    pub rays: Vec<Vec<Q>>,
}

#[derive(Clone, Debug)]
pub struct DomainGeometry {
    pub dim: usize,
    pub constraints: Vec<AffineConstraint>,
    pub blocks: Vec<Block>,
}

fn value(c: &AffineConstraint, t: &[Q]) -> Q {
    c.1.iter()
        .zip(t)
        .fold(c.0.clone(), |acc, (a, x)| acc + a * x)
}

fn value_f64(c: &AffineConstraint, t: &[f64]) -> f64 {
    c.1.iter()
        .zip(t)
        .fold(to_f64(&c.0), |acc, (a, x)| acc + to_f64(a) * x)
}

impl DomainGeometry {
    /// Builds the geometry of the closure of the domain. `None` when the
    /// closure is empty or a block is not pointed.
    pub fn new(dim: usize, constraints: Vec<AffineConstraint>) -> Option<Self> {
        for c in &constraints {
            if c.1.iter().all(Zero::is_zero) && c.0.is_negative() {
                return None;
            }
        }
        // group variables that share a constraint
        let mut parent: Vec<usize> = (0..dim).collect();
        fn find(p: &mut Vec<usize>, i: usize) -> usize {
            if p[i] != i {
                let r = find(p, p[i]);
                p[i] = r;
            }
            p[i]
        }
        for c in &constraints {
            let vs: Vec<usize> = (0..dim).filter(|&i| !c.1[i].is_zero()).collect();
            for w in vs.windows(2) {
                let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
                parent[a] = b;
            }
        }
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut root_of: Vec<usize> = Vec::new();
        for i in 0..dim {
            let r = find(&mut parent, i);
            match root_of.iter().position(|&x| x == r) {
                Some(g) => groups[g].push(i),
                None => {
                    root_of.push(r);
                    groups.push(vec![i]);
                }
            }
        }
        let mut blocks = Vec::new();
        for vars in groups {
            let local: Vec<(Q, Vec<Q>)> = constraints
                .iter()
                .filter(|c| vars.iter().any(|&i| !c.1[i].is_zero()))
                .map(|c| (c.0.clone(), vars.iter().map(|&i| c.1[i].clone()).collect()))
                .collect();
            blocks.push(block_geometry(vars, &local)?);
        }
        Some(DomainGeometry {
            dim,
            constraints,
            blocks,
        })
    }

    pub fn contains(&self, t: &[Q], closed: bool) -> bool {
        self.constraints.iter().all(|c| {
            let v = value(c, t);
            if c.2 && !closed {
                v.is_positive()
            } else {
                !v.is_negative()
            }
        })
    }

    pub fn contains_f64(&self, t: &[f64], closed: bool) -> bool {
        self.constraints.iter().all(|c| {
            let v = value_f64(c, t);
            if c.2 && !closed {
                v > 0.0
            } else {
                v >= 0.0
            }
        })
    }

    /// Vertices of the closure (product over blocks), at most `cap` of them.
    pub fn vertex_points(&self, cap: usize) -> Vec<Vec<Q>> {
        let mut pts: Vec<Vec<Q>> = vec![vec![Q::zero(); self.dim]];
        for b in &self.blocks {
            let mut next = Vec::new();
            for p in &pts {
                for v in &b.vertices {
                    if next.len() >= cap {
                        break;
                    }
                    let mut p = p.clone();
                    for (&i, x) in b.vars.iter().zip(v) {
                        p[i] = x.clone();
                    }
                    next.push(p);
                }
            }
            pts = next;
        }
        pts
    }

    /// A random point: per block, a random convex combination of the
    /// vertices plus log-uniform multiples of the rays.
    pub fn sample<R: Rng>(&self, rng: &mut R, ray_scale: f64) -> Vec<f64> {
        let mut t = vec![0.0; self.dim];
        for b in &self.blocks {
            let peaked = rng.gen_bool(0.5);
            let w: Vec<f64> = b
                .vertices
                .iter()
                .map(|_| {
                    let e = -(1.0 - rng.gen::<f64>()).ln();
                    if peaked {
                        e.powi(4)
                    } else {
                        e
                    }
                })
                .collect();
            let total: f64 = w.iter().sum::<f64>().max(f64::MIN_POSITIVE);
            for (v, wi) in b.vertices.iter().zip(&w) {
                for (&i, x) in b.vars.iter().zip(v) {
                    t[i] += wi / total * to_f64(x);
                }
            }
            for r in &b.rays {
                let c = ray_scale * 10f64.powf(rng.gen_range(-4.0..4.0));
                for (&i, x) in b.vars.iter().zip(r) {
                    t[i] += c * to_f64(x);
                }
            }
        }
        t
    }
}

fn block_geometry(vars: Vec<usize>, cons: &[(Q, Vec<Q>)]) -> Option<Block> {
    let m = vars.len();
    if cons.is_empty() {
        // an unconstrained coordinate: the whole line
        let mut up = vec![Q::zero(); m];
        up[0] = Q::one();
        let down: Vec<Q> = up.iter().map(|x| -x).collect();
        return Some(Block {
            vars,
            vertices: vec![vec![Q::zero(); m]],
            rays: vec![up, down],
        });
    }
    let rows: Vec<Vec<Q>> = cons.iter().map(|c| c.1.clone()).collect();
    if QMatrix::from_rows(&rows).rank() < m {
        return None;
    }
    let mut vertices: Vec<Vec<Q>> = Vec::new();
    for s in subsets(cons.len(), m) {
        let a = QMatrix::from_rows(&s.iter().map(|&i| rows[i].clone()).collect::<Vec<_>>());
        if a.rank() < m {
            continue;
        }
        let b: Vec<Q> = s.iter().map(|&i| -&cons[i].0).collect();
        let Some(x) = a.solve(&b) else { continue };
        let feasible = cons.iter().all(|c| {
            !c.1.iter()
                .zip(&x)
                .fold(c.0.clone(), |acc, (a, v)| acc + a * v)
                .is_negative()
        });
        if feasible && !vertices.contains(&x) {
            vertices.push(x);
        }
    }
    if vertices.is_empty() {
        return None;
    }
    vertices.sort();
    let rays = double_description(&rows, m)?;
    Some(Block {
        vars,
        vertices,
        rays,
    })
}
