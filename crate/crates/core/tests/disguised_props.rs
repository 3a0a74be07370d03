//! Realization cones, parametrizations and the rectangle rule.

mod common;

use std::sync::Arc;

use disguised_toric::balance::toric_ideal;
use disguised_toric::disguised::cone::cone_hrep;
use disguised_toric::disguised::{
    check_faithful, disguised_membership_rectangle, disguised_search, pi_cone, pullback_toric,
    triangle_parametrization, Budget,
};
use disguised_toric::fixtures::{rectangle, rectangle_hat, triangle, triangle_cycle};
use disguised_toric::massaction::{net_vectors, source_decomposition};
use disguised_toric::rational::{q, qr, to_f64, Q};
use disguised_toric::{RateAssignment, SparsePoly};
use proptest::prelude::*;

fn pos() -> impl Strategy<Value = Q> {
    (1i64..=40, 1i64..=8).prop_map(|(n, d)| Q::new(n.into(), d.into()))
}

#[test]
fn triangle_pullback_is_the_hand_derived_function() {
    let g = triangle_cycle();
    let rho = triangle_parametrization(&g, &triangle(), false).unwrap();
    check_faithful(&rho, &g, &triangle()).unwrap();
    let pb = pullback_toric(&rho, &triangle()).unwrap();
    assert_eq!(pb.generators.len(), 1);
    let v = &rho.vars;
    let p = |s: &str| SparsePoly::named(v, s);
    let c = |x: Q| SparsePoly::constant(v, x);
    let (k1, k2, k3) = (p("k13"), p("k21"), p("k32"));
    let (a, b, cc) = (p("a"), p("b"), p("c"));
    let half = c(qr(1, 2));
    let one = c(q(1));
    let two = c(q(2));
    // the three brackets of the target function with their denominators cleared
    let first = k3
        .mul(&b.add(&k2))
        .add(&half.mul(&a).mul(&k3).mul(&b.add(&k2)))
        .add(&half.mul(&b).mul(&a).mul(&k3));
    let second = k1
        .mul(&b.add(&k2))
        .add(&b.mul(&k1))
        .add(&two.mul(&b).mul(&cc).mul(&k1));
    let third = k1
        .mul(&k3)
        .add(&two.mul(&cc).mul(&k1).mul(&k3))
        .add(&a.mul(&cc).mul(&k1).mul(&k3));
    let a1 = one.add(&a);
    let c1 = one.add(&cc);
    let cleared = first.mul(&second).mul(&a1).mul(&c1).sub(&third.pow(2));
    let expected = cleared.mul(&a1.pow(2)).mul(&c1.pow(2)).scale(&q(16));
    assert_eq!(pb.generators[0], expected);
}

/// The corner split onto the complete graph, with `alpha`, `beta` kept symbolic.
fn hand_rectangle_map(v: &Arc<Vec<String>>) -> Vec<SparsePoly> {
    let p = |s: &str| SparsePoly::named(v, s);
    let (al, be) = (p("alpha"), p("beta"));
    let (k1, k2, k3, k4) = (p("k1"), p("k2"), p("k3"), p("k4"));
    let (a, b, c, d) = (p("a"), p("b"), p("c"), p("d"));
    vec![
        k1.mul(&al.sub(&a)),
        k1.mul(&a),
        k1.mul(&be.sub(&a)),
        k2.mul(&al.sub(&b)),
        k2.mul(&be.sub(&b)),
        k2.mul(&b),
        k3.mul(&c),
        k3.mul(&be.sub(&c)),
        k3.mul(&al.sub(&c)),
        k4.mul(&be.sub(&d)),
        k4.mul(&d),
        k4.mul(&al.sub(&d)),
    ]
}

#[test]
fn rectangle_equation_shape_and_pullback() {
    let hat = rectangle_hat(&q(1), &q(1));
    let ideal = toric_ideal(&hat).unwrap();
    assert_eq!(ideal.generators.len(), 1);
    let gen = &ideal.generators[0];
    assert!(gen.is_homogeneous());
    assert_eq!(gen.total_degree(), Some(6));
    assert_eq!(gen.num_terms(), 346);
    // the equation does not depend on the side lengths
    assert_eq!(
        toric_ideal(&rectangle_hat(&q(3), &q(5)))
            .unwrap()
            .generators[0],
        *gen
    );

    let v: Arc<Vec<String>> = Arc::new(
        ["k1", "k2", "k3", "k4", "alpha", "beta", "a", "b", "c", "d"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
    );
    let pulled = gen.compose(&hand_rectangle_map(&v));
    let p = |s: &str| SparsePoly::named(&v, s);
    let s = p("alpha").add(&p("beta"));
    let inner = p("k1")
        .mul(&p("k3"))
        .mul(&p("a").add(&p("c")).sub(&s).pow(2))
        .sub(
            &p("k2")
                .mul(&p("k4"))
                .mul(&p("b").add(&p("d")).sub(&s).pow(2)),
        );
    let expected = p("k1")
        .mul(&p("k2"))
        .mul(&p("k3"))
        .mul(&p("k4"))
        .mul(&inner);
    let factor = p("alpha").pow(2).mul(&p("beta").pow(2)).scale(&q(-4));
    assert_eq!(pulled, expected.mul(&factor));
}

#[test]
fn rectangle_search_matches_closed_form_on_examples() {
    let g = rectangle(&qr(1, 4), &qr(1, 3), &q(4), &q(3));
    let budget = Budget {
        samples: 2000,
        seed: 1,
        tol: 1e-9,
        closed: true,
    };
    for (k, inside) in [
        ([2, 1, 3, 1], true),
        ([1, 1, 1, 1], true),
        ([50, 1, 1, 1], false),
        ([1, 60, 1, 1], false),
    ] {
        let kq: Vec<Q> = k.iter().map(|&x| q(x)).collect();
        assert_eq!(
            disguised_membership_rectangle(&kq, &qr(1, 4), &qr(1, 3), false).unwrap(),
            inside
        );
        let hat = rectangle_hat(&q(4), &q(3));
        let rep =
            disguised_search(&g, &RateAssignment::exact(kq).unwrap(), &hat, None, &budget).unwrap();
        assert_eq!(rep.verdict.is_yes(), inside, "{k:?}: {}", rep.verdict.tag());
    }
}

#[test]
fn realization_cone_contains_the_chosen_realization() {
    let g = triangle_cycle();
    let cone = pi_cone(&g, &triangle(), true);
    let rho = triangle_parametrization(&g, &triangle(), false).unwrap();
    let point: Vec<Q> = [3, 5, 7, 1, 2, 3].iter().map(|&x| q(x)).collect();
    let khat = rho.eval(&point[..3], &point[3..]).unwrap();
    assert!(cone.contains(&khat));
    let kf: Vec<f64> = khat.iter().map(to_f64).collect();
    assert!(cone.contains_by_generators(&kf, 1e-9));
    let mut off = khat.clone();
    // y2 now drifts towards y3, against the cycle's only reaction there
    off[3] = &off[2] + q(1);
    assert!(!cone.contains(&off));
}

fn gens3() -> impl Strategy<Value = Vec<Vec<Q>>> {
    prop::collection::vec(prop::collection::vec(-3i64..=6, 3), 1..6).prop_map(|gs| {
        gs.into_iter()
            .map(|g| g.into_iter().map(q).collect())
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn halfspaces_agree_with_generators(gens in gens3(), coeffs in prop::collection::vec(0i64..=5, 6), probe in prop::collection::vec(-6i64..=6, 3)) {
        let cone = cone_hrep(&gens, 3, false);
        prop_assume!(!cone.generators.is_empty());
        let mut inside = vec![q(0); 3];
        for (g, c) in gens.iter().zip(&coeffs) {
            for i in 0..3 {
                inside[i] += &g[i] * q(*c);
            }
        }
        prop_assert!(cone.contains(&inside));
        let other: Vec<Q> = probe.into_iter().map(q).collect();
        let of: Vec<f64> = other.iter().map(to_f64).collect();
        prop_assert_eq!(cone.contains(&other), cone.contains_by_generators(&of, 1e-9));
    }

    #[test]
    fn kernel_moves_keep_the_dynamics(k in prop::collection::vec(pos(), 6), t in prop::collection::vec(-3i64..=3, 3)) {
        let g = triangle();
        let dec = source_decomposition(&g);
        prop_assert_eq!(dec.total_kernel_dim(), 3);
        let moved = dec.perturb(&k, &t.iter().map(|&x| q(x)).collect::<Vec<_>>());
        prop_assert_eq!(net_vectors(&g, &moved), net_vectors(&g, &k));
    }

    #[test]
    fn strict_membership_implies_closed(k in prop::collection::vec(pos(), 4), al in 0i64..=6, be in 0i64..=6) {
        prop_assume!(al + be > 0);
        let (alpha, beta) = (qr(al, 6), qr(be, 6));
        let strict = disguised_membership_rectangle(&k, &alpha, &beta, true).unwrap();
        let closed = disguised_membership_rectangle(&k, &alpha, &beta, false).unwrap();
        prop_assert!(!strict || closed);
        // swapping the shifts and rescaling the rates leave the answer unchanged
        prop_assert_eq!(disguised_membership_rectangle(&k, &beta, &alpha, true).unwrap(), strict);
        let scaled: Vec<Q> = k.iter().map(|x| x * q(7)).collect();
        prop_assert_eq!(disguised_membership_rectangle(&scaled, &alpha, &beta, true).unwrap(), strict);
    }
}
