//! Oracles shared by the integration suites and the acceptance harness.
#![allow(dead_code)]

use std::sync::Arc;

use disguised_toric::rational::{q, Q};
use disguised_toric::{EGraph, RationalVec, SparsePoly};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Tree constants by enumerating every choice of one out-edge per non-root vertex.
pub fn brute_tree_constants(g: &EGraph) -> Vec<SparsePoly> {
    let vars = Arc::new(g.rate_names());
    let n = g.num_vertices();
    let out: Vec<Vec<usize>> = (0..n).map(|v| g.out_edges(v)).collect();
    (0..n)
        .map(|root| {
            let others: Vec<usize> = (0..n).filter(|&v| v != root).collect();
            let mut total = SparsePoly::zero(&vars);
            if others.iter().any(|&v| out[v].is_empty()) {
                return total;
            }
            let mut choice = vec![0usize; others.len()];
            loop {
                let mut parent = vec![usize::MAX; n];
                for (slot, &v) in others.iter().enumerate() {
                    parent[v] = g.edges()[out[v][choice[slot]]].1;
                }
                let reaches_root = others.iter().all(|&v| {
                    let mut cur = v;
                    for _ in 0..n {
                        if cur == root {
                            return true;
                        }
                        cur = parent[cur];
                    }
                    cur == root
                });
                if reaches_root {
                    let mut term = SparsePoly::constant(&vars, q(1));
                    for (slot, &v) in others.iter().enumerate() {
                        term = term.mul(&SparsePoly::var(&vars, out[v][choice[slot]]));
                    }
                    total = total.add(&term);
                }
                let mut i = 0;
                loop {
                    if i == others.len() {
                        return total;
                    }
                    choice[i] += 1;
                    if choice[i] < out[others[i]].len() {
                        break;
                    }
                    choice[i] = 0;
                    i += 1;
                }
            }
        })
        .collect()
}

fn reachable(n: usize, edges: &[(usize, usize)], from: usize) -> Vec<bool> {
    let mut seen = vec![false; n];
    let mut stack = vec![from];
    seen[from] = true;
    while let Some(v) = stack.pop() {
        for &(s, t) in edges {
            if s == v && !seen[t] {
                seen[t] = true;
                stack.push(t);
            }
        }
    }
    seen
}

pub fn strongly_connected(n: usize, edges: &[(usize, usize)]) -> bool {
    (0..n).all(|v| reachable(n, edges, v).iter().all(|&b| b))
}

fn spread_points(n: usize) -> Vec<RationalVec> {
    (0..n as i64)
        .map(|i| RationalVec::from_ints(&[i, i * i]))
        .collect()
}

/// Every strongly connected digraph on three labelled vertices, plus seeded
/// random ones on 2 to 6 vertices.
pub fn strongly_connected_suite(random: usize, seed: u64) -> Vec<EGraph> {
    let mut graphs = Vec::new();
    let all3: Vec<(usize, usize)> = (0..3)
        .flat_map(|s| (0..3).filter(move |&t| t != s).map(move |t| (s, t)))
        .collect();
    for mask in 1u32..(1 << all3.len()) {
        let edges: Vec<(usize, usize)> = (0..all3.len())
            .filter(|b| mask >> b & 1 == 1)
            .map(|b| all3[b])
            .collect();
        if strongly_connected(3, &edges) {
            graphs.push(EGraph::new(spread_points(3), edges).unwrap());
        }
    }
    let base = graphs.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while graphs.len() < base + random {
        let n = rng.gen_range(2..=6);
        let mut edges = Vec::new();
        for s in 0..n {
            for t in 0..n {
                if s != t && rng.gen_bool(0.35) {
                    edges.push((s, t));
                }
            }
        }
        if strongly_connected(n, &edges) {
            graphs.push(EGraph::new(spread_points(n), edges).unwrap());
        }
    }
    graphs
}

/// The triangle toric equation written out by hand:
/// `(k21 k31 + k21 k32 + k23 k31)(k12 k23 + k13 k21 + k13 k23) - (k12 k31 + k12 k32 + k13 k32)^2`.
pub fn triangle_equation_by_hand(vars: &Arc<Vec<String>>) -> [SparsePoly; 4] {
    let k = |s: &str| SparsePoly::named(vars, s);
    let first = k("k21")
        .mul(&k("k31"))
        .add(&k("k21").mul(&k("k32")))
        .add(&k("k23").mul(&k("k31")));
    let middle = k("k12")
        .mul(&k("k31"))
        .add(&k("k12").mul(&k("k32")))
        .add(&k("k13").mul(&k("k32")));
    let last = k("k12")
        .mul(&k("k23"))
        .add(&k("k13").mul(&k("k21")))
        .add(&k("k13").mul(&k("k23")));
    let eq = first.mul(&last).sub(&middle.pow(2));
    [first, middle, last, eq]
}

/// Signed line coefficients with the first negative, the last positive and a
/// single sign change after position `flip` (1-based count of leading negatives).
pub fn single_change(rng: &mut ChaCha8Rng, n: usize) -> Vec<Q> {
    let flip = rng.gen_range(1..n);
    (0..n)
        .map(|i| {
            let mag = Q::new(
                rng.gen_range(1..=40i64).into(),
                rng.gen_range(1..=8i64).into(),
            );
            if i < flip {
                -mag
            } else {
                mag
            }
        })
        .collect()
}

pub fn random_positive(rng: &mut ChaCha8Rng, n: usize) -> Vec<Q> {
    (0..n)
        .map(|_| {
            Q::new(
                rng.gen_range(1..=60i64).into(),
                rng.gen_range(1..=10i64).into(),
            )
        })
        .collect()
}
