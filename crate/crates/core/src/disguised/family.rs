//! Recognition of the network families with closed-form answers.

use num_traits::{Signed, Zero};

use crate::model::EGraph;
use crate::rational::Q;

/// A rectangle network: one reaction from each corner pointing inward by
/// `(alpha * width, beta * height)` with signs set by the corner.
#[derive(Clone, Debug, PartialEq)]
pub struct RectangleShape {
    /// Vertex indices of the corners, counterclockwise from the lower left.
    pub corners: [usize; 4],
    /// Edge leaving each corner.
    pub corner_edges: [usize; 4],
    pub width: Q,
    pub height: Q,
    pub alpha: Q,
    pub beta: Q,
}

pub fn rectangle_shape(g: &EGraph) -> Option<RectangleShape> {
    if g.dim() != 2 || g.num_edges() != 4 {
        return None;
    }
    let sources = g.sources();
    if sources.len() != 4 {
        return None;
    }
    let xs: Vec<&Q> = sources.iter().map(|&s| &g.vertex(s).coords()[0]).collect();
    let ys: Vec<&Q> = sources.iter().map(|&s| &g.vertex(s).coords()[1]).collect();
    let (x0, x1) = (xs.iter().min()?, xs.iter().max()?);
    let (y0, y1) = (ys.iter().min()?, ys.iter().max()?);
    let width: Q = *x1 - *x0;
    let height: Q = *y1 - *y0;
    if !width.is_positive() || !height.is_positive() {
        return None;
    }
    let at = |x: &Q, y: &Q| {
        sources
            .iter()
            .copied()
            .find(|&s| &g.vertex(s).coords()[0] == x && &g.vertex(s).coords()[1] == y)
    };
    let corners = [at(x0, y0)?, at(x1, y0)?, at(x1, y1)?, at(x0, y1)?];
    let signs = [(1, 1), (-1, 1), (-1, -1), (1, -1)];
    let mut corner_edges = [0; 4];
    let mut alpha: Option<Q> = None;
    let mut beta: Option<Q> = None;
    for (i, &c) in corners.iter().enumerate() {
        let out = g.out_edges(c);
        if out.len() != 1 {
            return None;
        }
        corner_edges[i] = out[0];
        let v = g.reaction_vector(out[0]);
        let a = &v.coords()[0] / &width * Q::from_integer(signs[i].0.into());
        let b = &v.coords()[1] / &height * Q::from_integer(signs[i].1.into());
        if a.is_negative() || b.is_negative() {
            return None;
        }
        match (&alpha, &beta) {
            (Some(pa), Some(pb)) if pa != &a || pb != &b => return None,
            _ => {}
        }
        alpha = Some(a);
        beta = Some(b);
    }
    let (alpha, beta) = (alpha?, beta?);
    if alpha.is_zero() && beta.is_zero() {
        return None;
    }
    Some(RectangleShape {
        corners,
        corner_edges,
        width,
        height,
        alpha,
        beta,
    })
}

/// True when `ghat` is the complete graph on exactly the given points.
pub fn is_complete_on(ghat: &EGraph, points: &[&[Q]]) -> bool {
    let n = points.len();
    ghat.num_vertices() == n
        && ghat.num_edges() == n * (n - 1)
        && points
            .iter()
            .all(|p| ghat.vertices().iter().any(|v| v.coords() == *p))
}

/// Same vertex coordinates on every edge, in any order.
pub fn same_edge_set(g: &EGraph, h: &EGraph) -> bool {
    let key = |x: &EGraph| {
        let mut v: Vec<(Vec<Q>, Vec<Q>)> = x
            .edges()
            .iter()
            .map(|&(s, t)| (x.vertex(s).coords().to_vec(), x.vertex(t).coords().to_vec()))
            .collect();
        v.sort();
        v
    };
    key(g) == key(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{rectangle, triangle};
    use crate::rational::{q, qr};

    #[test]
    fn recognizes_rectangles() {
        let g = rectangle(&qr(1, 4), &qr(1, 3), &q(2), &q(3));
        let s = rectangle_shape(&g).unwrap();
        assert_eq!((s.alpha.clone(), s.beta.clone()), (qr(1, 4), qr(1, 3)));
        assert_eq!((s.width.clone(), s.height.clone()), (q(2), q(3)));
        assert_eq!(s.corners, [0, 1, 2, 3]);
        let merged = rectangle(&q(1), &q(1), &q(1), &q(1));
        assert!(rectangle_shape(&merged).is_some());
        assert!(rectangle_shape(&triangle()).is_none());
    }
}
