//! Builders for the standard example networks.

use crate::model::{EGraph, RationalVec};
use crate::rational::{q, Q};

fn pt(a: i64, b: i64) -> RationalVec {
    RationalVec::from_ints(&[a, b])
}

/// Points `(N-i, i-1)`, `i = 1..N`, on the line `x1 + x2 = N - 1`.
pub fn line_vertices(n: usize) -> Vec<RationalVec> {
    (1..=n as i64).map(|i| pt(n as i64 - i, i - 1)).collect()
}

/// Complete digraph on `n` collinear lattice points.
pub fn complete_line(n: usize) -> EGraph {
    EGraph::complete(line_vertices(n)).expect("valid line graph")
}

/// Complete digraph on (2,0), (1,1), (0,2); edges 12, 13, 21, 23, 31, 32.
pub fn triangle() -> EGraph {
    complete_line(3)
}

/// One-reaction-per-source cycle on the triangle: y1 -> y3, y2 -> y1, y3 -> y2.
pub fn triangle_cycle() -> EGraph {
    EGraph::new(line_vertices(3), vec![(0, 2), (1, 0), (2, 1)]).expect("valid cycle")
}

/// Reversible path y1 <-> y2 <-> ... <-> yN; edges ordered (i,i+1), (i+1,i).
pub fn line_path(n: usize) -> EGraph {
    let edges = (0..n - 1).flat_map(|i| [(i, i + 1), (i + 1, i)]).collect();
    EGraph::new(line_vertices(n), edges).expect("valid path")
}

/// Corners y1..y4 of the `a x b` rectangle at the origin, counterclockwise.
pub fn rectangle_corners(a: &Q, b: &Q) -> Vec<RationalVec> {
    let z = q(0);
    vec![
        RationalVec::new(vec![z.clone(), z.clone()]),
        RationalVec::new(vec![a.clone(), z.clone()]),
        RationalVec::new(vec![a.clone(), b.clone()]),
        RationalVec::new(vec![z, b.clone()]),
    ]
}

/// Four reactions from the corners of an `a x b` rectangle pointing inward
/// by `(alpha a, beta b)`: y_i -> y_{i+4}. Targets that coincide with each
/// other or with a corner are merged, so the vertex count can drop below 8.
pub fn rectangle(alpha: &Q, beta: &Q, a: &Q, b: &Q) -> EGraph {
    let c = rectangle_corners(a, b);
    let da = alpha * a;
    let db = beta * b;
    let shift = |v: &RationalVec, sx: i64, sy: i64| {
        RationalVec::new(vec![
            &v.coords()[0] + &da * q(sx),
            &v.coords()[1] + &db * q(sy),
        ])
    };
    let targets = [
        shift(&c[0], 1, 1),
        shift(&c[1], -1, 1),
        shift(&c[2], -1, -1),
        shift(&c[3], 1, -1),
    ];
    let mut vertices = c.clone();
    let mut edges = Vec::new();
    for (i, t) in targets.into_iter().enumerate() {
        let j = match vertices.iter().position(|v| v == &t) {
            Some(j) => j,
            None => {
                vertices.push(t);
                vertices.len() - 1
            }
        };
        edges.push((i, j));
    }
    EGraph::new(vertices, edges).expect("valid rectangle network")
}

/// Complete digraph on the rectangle corners; edges 12,13,14,21,23,24,31,32,34,41,42,43.
pub fn rectangle_hat(a: &Q, b: &Q) -> EGraph {
    EGraph::complete(rectangle_corners(a, b)).expect("valid complete graph")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes() {
        let r = rectangle(
            &crate::rational::qr(1, 4),
            &crate::rational::qr(1, 3),
            &q(1),
            &q(1),
        );
        assert_eq!(r.num_vertices(), 8);
        assert_eq!(r.linkage_classes().len(), 4);
        assert!(!r.is_weakly_reversible());
        assert_eq!(r.stoichiometric_dimension(), 2);
        let merged = rectangle(&q(1), &q(1), &q(1), &q(1));
        assert_eq!(merged.num_vertices(), 4);
        assert!(merged.is_weakly_reversible());
        let single = rectangle(
            &crate::rational::qr(1, 2),
            &crate::rational::qr(1, 2),
            &q(2),
            &q(2),
        );
        assert_eq!(single.num_vertices(), 5);
        assert_eq!(complete_line(5).deficiency(), 3);
        assert_eq!(line_path(4).num_edges(), 6);
        assert_eq!(
            triangle().rate_names(),
            vec!["k12", "k13", "k21", "k23", "k31", "k32"]
        );
    }
}
