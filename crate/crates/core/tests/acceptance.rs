//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

mod common;

use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use disguised_toric::balance::{toric_ideal, tree_constants};
use disguised_toric::chambers::{
    discriminant, ngon_disguised_certificate, segre_test, LineReduction,
};
use disguised_toric::disguised::{
    disguised_membership_rectangle, disguised_search, pullback_toric, rectangle_parametrization,
    rectangle_shape, Budget, SameDynamics, Verdict,
};
use disguised_toric::dynamics::{
    integrate_rhs, multistationarity_probe, run_to_rest, steady_states_on_class,
};
use disguised_toric::fixtures::{complete_line, line_path, rectangle, rectangle_hat, triangle};
use disguised_toric::massaction::{net_vectors, Rhs};
use disguised_toric::rational::{q, qr, to_f64, Q};
use disguised_toric::{EGraph, RateAssignment, SparsePoly, UniPoly};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const WITNESS_TOL: f64 = 1e-9;
const DRIFT_TOL: f64 = 1e-8;
const CONVERGENCE_TOL: f64 = 1e-6;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn complete_on_sources(g: &EGraph) -> EGraph {
    EGraph::complete(g.sources().iter().map(|&s| g.vertex(s).clone()).collect()).unwrap()
}

fn criterion_1() -> Outcome {
    let ideal = toric_ideal(&triangle()).map_err(|e| e.to_string())?;
    let [first, middle, last, eq] = common::triangle_equation_by_hand(&ideal.trees.vars);
    ensure(ideal.trees.constants == vec![first, middle, last], || {
        "tree constants differ".into()
    })?;
    ensure(ideal.generators.len() == 1, || {
        format!("{} generators", ideal.generators.len())
    })?;
    ensure(ideal.generators[0] == eq, || {
        format!("generator {}", ideal.generators[0])
    })?;
    Ok("three tree constants and one generator, exact".into())
}

fn criterion_2() -> Outcome {
    let suite = common::strongly_connected_suite(50, 2);
    for g in &suite {
        let tc = tree_constants(g).map_err(|e| e.to_string())?;
        ensure(tc.constants == common::brute_tree_constants(g), || {
            format!("mismatch on {:?}", g.edges())
        })?;
    }
    ensure(suite.len() >= 50, || "suite too small".into())?;
    Ok(format!(
        "{} strongly connected graphs, up to 6 vertices",
        suite.len()
    ))
}

fn criterion_3() -> Outcome {
    let ideal = toric_ideal(&rectangle_hat(&q(1), &q(1))).map_err(|e| e.to_string())?;
    ensure(ideal.generators.len() == 1, || {
        format!("{} generators", ideal.generators.len())
    })?;
    let gen = &ideal.generators[0];
    ensure(
        gen.is_homogeneous() && gen.total_degree() == Some(6),
        || "not homogeneous of degree 6".into(),
    )?;
    ensure(gen.num_terms() == 346, || {
        format!("{} terms", gen.num_terms())
    })?;
    // pullback through the corner split on a concrete shape, alpha = 1/4, beta = 1/3
    let (alpha, beta) = (qr(1, 4), qr(1, 3));
    let g = rectangle(&alpha, &beta, &q(1), &q(1));
    let hat = rectangle_hat(&q(1), &q(1));
    let shape = rectangle_shape(&g).ok_or("shape not recognized")?;
    let rho = rectangle_parametrization(&g, &shape, &hat).map_err(|e| e.to_string())?;
    let pb = pullback_toric(&rho, &hat).map_err(|e| e.to_string())?;
    let v = &rho.vars;
    let k = |i: usize| SparsePoly::var(v, shape.corner_edges[i]);
    let p = |s: &str| SparsePoly::named(v, s);
    let s = SparsePoly::constant(v, &alpha + &beta);
    let target = k(0).mul(&k(1)).mul(&k(2)).mul(&k(3)).mul(
        &k(0)
            .mul(&k(2))
            .mul(&p("a").add(&p("c")).sub(&s).pow(2))
            .sub(&k(1).mul(&k(3)).mul(&p("b").add(&p("d")).sub(&s).pow(2))),
    );
    let factor = pb.generators[0]
        .scalar_multiple_of(&target)
        .ok_or("pullback is not a multiple")?;
    ensure(factor != q(0), || "zero pullback".into())?;
    Ok(format!(
        "degree 6, 346 terms; pullback = {} x target",
        disguised_toric::rational::fmt_q(&factor)
    ))
}

fn criterion_4() -> Outcome {
    let g = triangle();
    let mut r = rng(4);
    let mut worst: f64 = 0.0;
    for i in 0..100u64 {
        let k = common::random_positive(&mut r, 6);
        let budget = Budget {
            samples: 4000,
            seed: i,
            tol: WITNESS_TOL,
            closed: false,
        };
        let rep = disguised_search(
            &g,
            &RateAssignment::exact(k.clone()).unwrap(),
            &g,
            None,
            &budget,
        )
        .map_err(|e| e.to_string())?;
        let Verdict::CertifiedYes(w) = &rep.verdict else {
            return Err(format!("instance {i}: {}", rep.verdict.tag()));
        };
        ensure(w.same_dynamics == SameDynamics::Exact, || {
            format!("instance {i}: not exact")
        })?;
        let exact = w
            .exact_rates
            .as_ref()
            .ok_or(format!("instance {i}: no exact rates"))?;
        ensure(net_vectors(&w.graph, exact) == net_vectors(&g, &k), || {
            format!("instance {i}: dynamics differ")
        })?;
        ensure(w.complex_balance_residual < WITNESS_TOL, || {
            format!("instance {i}: residual {}", w.complex_balance_residual)
        })?;
        worst = worst.max(w.complex_balance_residual);
    }
    Ok(format!("100/100 certified, worst residual {worst:.1e}"))
}

fn criterion_5() -> Outcome {
    let singles: [[i8; 4]; 3] = [[-1, -1, -1, 1], [-1, -1, 1, 1], [-1, 1, 1, 1]];
    let fourth = [-1i8, 1, -1, 1];
    let mut r = rng(5);
    let run = |k: &[Q], d: &[i8], seed: u64| -> Result<Verdict, String> {
        let red = LineReduction::from_pattern(k, d).map_err(|e| e.to_string())?;
        let hat = complete_on_sources(&red.reduced_graph);
        let budget = Budget {
            samples: 500,
            seed,
            tol: WITNESS_TOL,
            closed: false,
        };
        disguised_search(&red.reduced_graph, &red.reduced_rates, &hat, None, &budget)
            .map(|rep| rep.verdict)
            .map_err(|e| e.to_string())
    };
    let check_yes = |v: &Verdict, what: &str| -> Result<(), String> {
        let w = v.witness().ok_or_else(|| format!("{what}: {}", v.tag()))?;
        let db = w
            .detailed_balance_residual
            .ok_or_else(|| format!("{what}: no detailed balance"))?;
        ensure(db < WITNESS_TOL, || {
            format!("{what}: detailed residual {db}")
        })
    };
    for i in 0..500u64 {
        let k = common::random_positive(&mut r, 4);
        check_yes(
            &run(&k, &singles[i as usize % 3], i)?,
            &format!("single {i}"),
        )?;
    }
    let mut yes = 0;
    while yes < 500 {
        let mut k = common::random_positive(&mut r, 4);
        if yes % 10 == 0 {
            // on the bound itself
            k[3] = &k[2] * &k[1] / &k[0];
        }
        if !segre_test(&k) {
            continue;
        }
        check_yes(&run(&k, &fourth, yes)?, &format!("fourth chamber {yes}"))?;
        yes += 1;
    }
    let mut no = 0;
    while no < 500 {
        let k = common::random_positive(&mut r, 4);
        if segre_test(&k) {
            continue;
        }
        let v = run(&k, &fourth, no)?;
        ensure(matches!(v, Verdict::CertifiedNoByClosedForm(_)), || {
            format!("violated {no}: {}", v.tag())
        })?;
        no += 1;
    }
    Ok("1500 instances, zero misclassifications".into())
}

fn criterion_6() -> Outcome {
    let ks = |v: [i64; 4]| v.map(q).to_vec();
    let cubic = |k: &[Q]| {
        UniPoly::new(vec![
            k[0].clone(),
            -k[1].clone(),
            k[2].clone(),
            -k[3].clone(),
        ])
    };
    ensure(discriminant(&ks([1, 1, 1, 1])) == q(-16), || {
        "fixture (1,1,1,1)".into()
    })?;
    ensure(discriminant(&ks([6, 11, 6, 1])) > q(0), || {
        "fixture (6,11,6,1)".into()
    })?;
    ensure(discriminant(&ks([2, 5, 4, 1])) == q(0), || {
        "fixture (2,5,4,1)".into()
    })?;
    let mut r = rng(6);
    let mut negative = 0;
    let mut samples: Vec<Vec<Q>> = vec![ks([1, 1, 1, 1]), ks([6, 11, 6, 1]), ks([2, 5, 4, 1])];
    samples.extend((0..600).map(|_| common::random_positive(&mut r, 4)));
    // cubics with three chosen positive roots, sometimes repeated
    for i in 0..400 {
        let mut roots = common::random_positive(&mut r, 3);
        if i % 4 == 0 {
            roots[1] = roots[0].clone();
        }
        let lead = common::random_positive(&mut r, 1).remove(0);
        let (a, b, c) = (&roots[0], &roots[1], &roots[2]);
        samples.push(vec![
            &lead * a * b * c,
            &lead * (a * b + a * c + b * c),
            &lead * (a + b + c),
            lead.clone(),
        ]);
    }
    for k in &samples {
        let delta = discriminant(k);
        let roots = cubic(k)
            .count_positive_roots_with_multiplicity()
            .map_err(|e| e.to_string())?;
        ensure((delta < q(0)) == (roots == 1), || {
            format!("{k:?}: delta {delta}, {roots} roots")
        })?;
        negative += usize::from(delta < q(0));
    }
    Ok(format!(
        "{} samples ({negative} with negative discriminant), zero discrepancies",
        samples.len()
    ))
}

fn criterion_7() -> Outcome {
    let mut r = rng(7);
    let mut n = 0;
    while n < 1000 {
        let k = common::random_positive(&mut r, 4);
        if !segre_test(&k) {
            continue;
        }
        ensure(discriminant(&k) < q(0), || format!("{k:?}"))?;
        n += 1;
    }
    Ok("1000 samples, all with negative discriminant".into())
}

fn random_fraction(r: &mut ChaCha8Rng) -> Q {
    Q::new(r.gen_range(1..=11i64).into(), 12.into())
}

/// Whether the pulled-back equation changes sign on a grid of the open domain.
fn grid_sign_change(pb: &SparsePoly, k: &[f64], bound: f64) -> bool {
    let steps = 12;
    let (mut pos, mut neg) = (false, false);
    let compiled = pb.compile();
    let mut point = k.to_vec();
    point.extend([0.0; 4]);
    for i in 0..steps * steps * steps * steps {
        let mut idx = i;
        for j in 0..4 {
            point[4 + j] = bound * ((idx % steps) as f64 + 0.5) / steps as f64;
            idx /= steps;
        }
        let v = compiled.eval(&point);
        pos |= v > 0.0;
        neg |= v < 0.0;
    }
    pos && neg
}

fn criterion_8() -> Outcome {
    let mut r = rng(8);
    let (mut inside, mut outside) = (0, 0);
    while inside < 10 || outside < 10 {
        let (alpha, beta) = (random_fraction(&mut r), random_fraction(&mut r));
        if alpha == beta {
            continue;
        }
        let k = common::random_positive(&mut r, 4);
        let ratio = to_f64(&(&k[0] * &k[2] / (&k[1] * &k[3])));
        let s = to_f64(&((&alpha - &beta) / (&alpha + &beta))).powi(2);
        // keep clear of the boundary so the sampled side is unambiguous
        let margin = 1.5;
        let is_inside = ratio > s * margin && ratio * margin < 1.0 / s;
        let is_outside = ratio * margin < s || ratio > margin / s;
        if (is_inside && inside >= 10)
            || (is_outside && outside >= 10)
            || !(is_inside || is_outside)
        {
            continue;
        }
        let closed_form =
            disguised_membership_rectangle(&k, &alpha, &beta, true).map_err(|e| e.to_string())?;
        let g = rectangle(&alpha, &beta, &q(1), &q(1));
        let hat = rectangle_hat(&q(1), &q(1));
        let shape = rectangle_shape(&g).ok_or("shape")?;
        let rho = rectangle_parametrization(&g, &shape, &hat).map_err(|e| e.to_string())?;
        let pb = pullback_toric(&rho, &hat).map_err(|e| e.to_string())?;
        let kf: Vec<f64> = (0..4).map(|i| to_f64(&k[i])).collect();
        let mut point = vec![0.0; g.num_edges()];
        for (i, &e) in shape.corner_edges.iter().enumerate() {
            point[e] = kf[i];
        }
        let bound = to_f64(if alpha < beta { &alpha } else { &beta });
        let sampled = grid_sign_change(&pb.generators[0], &point, bound);
        let budget = Budget {
            samples: 3000,
            seed: (inside + outside) as u64,
            tol: WITNESS_TOL,
            closed: false,
        };
        let rep = disguised_search(
            &g,
            &RateAssignment::exact(k.clone()).unwrap(),
            &hat,
            Some(&rho),
            &budget,
        )
        .map_err(|e| e.to_string())?;
        let what = format!("k = {k:?}, alpha = {alpha}, beta = {beta}");
        ensure(closed_form == is_inside, || {
            format!("{what}: closed form {closed_form}")
        })?;
        ensure(sampled == closed_form, || {
            format!("{what}: grid sign change {sampled}")
        })?;
        ensure(rep.verdict.is_yes() == closed_form, || {
            format!("{what}: search {}", rep.verdict.tag())
        })?;
        if is_inside {
            inside += 1;
        } else {
            outside += 1;
        }
    }
    for _ in 0..10 {
        let k = common::random_positive(&mut r, 4);
        let a = random_fraction(&mut r);
        ensure(
            disguised_membership_rectangle(&k, &a, &a, true).unwrap(),
            || format!("equal shifts {k:?}"),
        )?;
    }
    for i in 0..10 {
        let mut k = common::random_positive(&mut r, 4);
        if i % 2 == 0 {
            k[3] = &k[0] * &k[2] / &k[1];
        }
        let b = random_fraction(&mut r);
        let expect = &k[0] * &k[2] == &k[1] * &k[3];
        for strict in [true, false] {
            ensure(
                disguised_membership_rectangle(&k, &q(0), &b, strict).unwrap() == expect,
                || format!("axis shift {k:?}"),
            )?;
        }
    }
    Ok("20 sampled instances agree; 10 equal-shift and 10 axis-shift cases hold".into())
}

fn criterion_9() -> Outcome {
    let mut r = rng(9);
    let mut worst: f64 = 0.0;
    for n in 3..=10 {
        for i in 0..50 {
            let red = LineReduction::from_signed(common::single_change(&mut r, n))
                .map_err(|e| e.to_string())?;
            let c =
                ngon_disguised_certificate(&red).ok_or(format!("N = {n}, #{i}: no certificate"))?;
            ensure(c.same_dynamics_mod_relation(&red), || {
                format!("N = {n}, #{i}: dynamics differ")
            })?;
            let res = c.detailed_balance_residual();
            ensure(res < WITNESS_TOL, || {
                format!("N = {n}, #{i}: residual {res}")
            })?;
            worst = worst.max(res);
        }
    }
    Ok(format!(
        "400 certificates, worst detailed residual {worst:.1e}"
    ))
}

fn criterion_10() -> Outcome {
    let mut r = rng(10);
    let mut drift: f64 = 0.0;
    let mut graphs: Vec<(EGraph, usize)> = (2..=6).map(|n| (complete_line(n), n)).collect();
    graphs.extend((2..=6).map(|n| (line_path(n), n)));
    for (g, _) in &graphs {
        let rates: Vec<f64> = (0..g.num_edges()).map(|_| r.gen_range(0.1..5.0)).collect();
        let x1 = r.gen_range(0.05..1.95);
        let tr = integrate_rhs(&Rhs::new(g, &rates), &[x1, 2.0 - x1], 50.0, 1e-3, 1)
            .map_err(|e| e.to_string())?;
        ensure(!tr.halted(), || "trajectory halted".into())?;
        drift = drift.max(tr.drift(&[1.0, 1.0]));
    }
    ensure(drift < DRIFT_TOL, || format!("drift {drift}"))?;
    let mut instances = 0;
    let mut worst: f64 = 0.0;
    while instances < 5 {
        let k = common::random_positive(&mut r, 4);
        if discriminant(&k) >= q(0) {
            continue;
        }
        instances += 1;
        let red = LineReduction::from_pattern(&k, &[-1, 1, -1, 1]).map_err(|e| e.to_string())?;
        let eq = steady_states_on_class(&red, 2.0).map_err(|e| e.to_string())?;
        ensure(eq.len() == 1, || format!("{k:?}: {} equilibria", eq.len()))?;
        let rhs = Rhs::new(&red.reduced_graph, &red.reduced_rates.to_f64());
        for _ in 0..20 {
            let x1 = r.gen_range(0.01..1.99);
            let (x, _) =
                run_to_rest(&rhs, &[x1, 2.0 - x1], 1e-3, 5000.0).map_err(|e| e.to_string())?;
            let err = (x[0] - eq[0].x[0]).abs().max((x[1] - eq[0].x[1]).abs());
            worst = worst.max(err);
        }
    }
    ensure(worst < CONVERGENCE_TOL, || {
        format!("convergence error {worst}")
    })?;
    let three = LineReduction::from_pattern(&[6, 11, 6, 1].map(q), &[-1, 1, -1, 1]).unwrap();
    let probe = multistationarity_probe(&three, 2.0, 40, 10).map_err(|e| e.to_string())?;
    ensure(probe.clusters.len() == 2, || {
        format!("{} clusters", probe.clusters.len())
    })?;
    Ok(format!(
        "drift {drift:.1e}, convergence error {worst:.1e}, 2 clusters"
    ))
}

fn criterion_11() -> Outcome {
    let fixtures = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let commands: &[&[&str]] = &[
        &["disguised", "triangle.json", "--seed", "3"],
        &[
            "disguised",
            "rectangle.json",
            "--ghat",
            "complete",
            "--closed",
            "--seed",
            "7",
        ],
        &["disguised", "ngon6.json", "--seed", "11"],
        &["simulate", "quad_c1.json", "--probe", "16", "--seed", "4"],
        &[
            "simulate",
            "quad_c2.json",
            "--x0",
            "0.5,1.5",
            "--t-end",
            "5",
        ],
        &["toric-ideal", "triangle.json"],
    ];
    let run = |args: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_dtoric"))
            .args(args)
            .current_dir(&fixtures)
            .output()
            .map(|o| (o.status.code(), o.stdout))
            .map_err(|e| e.to_string())
    };
    for args in commands {
        let first = run(args)?;
        ensure(first.0 == Some(0), || {
            format!("{args:?}: exit {:?}", first.0)
        })?;
        ensure(run(args)? == first, || format!("{args:?}: outputs differ"))?;
    }
    // the library search is deterministic too, across thread scheduling
    let g = rectangle(&qr(1, 4), &qr(1, 3), &q(1), &q(1));
    let hat = rectangle_hat(&q(1), &q(1));
    let k = RateAssignment::from_ints(&[2, 1, 3, 1]).unwrap();
    let budget = Budget {
        samples: 2000,
        seed: 99,
        tol: WITNESS_TOL,
        closed: false,
    };
    let once = |_: u8| -> Result<String, String> {
        let rep = disguised_search(&g, &k, &hat, None, &budget).map_err(|e| e.to_string())?;
        Ok(format!("{:?}", rep.verdict))
    };
    ensure(once(0)? == once(1)?, || {
        "library search differs between runs".into()
    })?;
    Ok(format!(
        "{} commands byte-identical across runs",
        commands.len()
    ))
}

fn main() {
    let criteria: [(&str, u64, fn() -> Outcome); 11] = [
        ("triangle toric ideal", 1, criterion_1),
        ("tree constants vs enumeration", 30, criterion_2),
        ("rectangle toric polynomial", 60, criterion_3),
        ("triangle universality", 300, criterion_4),
        ("quadrilateral characterization", 120, criterion_5),
        ("discriminant equivalence", 30, criterion_6),
        ("bound implies unique equilibrium", 10, criterion_7),
        ("rectangle membership", 120, criterion_8),
        ("line certificates N = 3..10", 180, criterion_9),
        ("dynamics", 180, criterion_10),
        ("determinism", 120, criterion_11),
    ];
    let mut failed = 0;
    for (i, (name, limit, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > Duration::from_secs(*limit) => {
                Err(format!("{detail}; over time"))
            }
            other => other,
        };
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        failed += usize::from(outcome.is_err());
        println!(
            "{tag} {:>2} {name:<34} {:>8.2}s / {limit}s  {detail}",
            i + 1,
            elapsed.as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
