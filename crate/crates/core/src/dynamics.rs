//! Fixed-step integration of mass-action systems and steady states of line
//! networks on their one-dimensional compatibility classes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::chambers::LineReduction;
use crate::error::{Error, Result};
use crate::linalg::QMatrix;
use crate::massaction::{MassActionSystem, Rhs};
use crate::model::EGraph;
use crate::poly::UniPoly;
use crate::rational::{to_f64, Q};

/// Integration stops once a coordinate exceeds this.
pub const OVERFLOW_BOUND: f64 = 1e12;

#[derive(Clone, Debug, Default)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    /// `(time, tag)`; a halt is always recorded here.
    pub events: Vec<(f64, String)>,
}

impl Trajectory {
    pub fn last(&self) -> Option<&[f64]> {
        self.states.last().map(Vec::as_slice)
    }

    pub fn halted(&self) -> bool {
        self.events.iter().any(|(_, tag)| tag.starts_with("halt"))
    }

    /// Largest deviation of `w . x(t)` from its initial value.
    pub fn drift(&self, w: &[f64]) -> f64 {
        let dot = |x: &[f64]| x.iter().zip(w).map(|(a, b)| a * b).sum::<f64>();
        let Some(first) = self.states.first() else {
            return 0.0;
        };
        let c = dot(first);
        self.states
            .iter()
            .map(|x| (dot(x) - c).abs())
            .fold(0.0, f64::max)
    }
}

fn rk4_step(
    rhs: &Rhs,
    x: &[f64],
    dt: f64,
    k: &mut [Vec<f64>; 4],
    tmp: &mut [f64],
    out: &mut [f64],
) {
    let n = x.len();
    rhs.eval_into(x, &mut k[0]);
    for i in 0..n {
        tmp[i] = x[i] + 0.5 * dt * k[0][i];
    }
    rhs.eval_into(tmp, &mut k[1]);
    for i in 0..n {
        tmp[i] = x[i] + 0.5 * dt * k[1][i];
    }
    rhs.eval_into(tmp, &mut k[2]);
    for i in 0..n {
        tmp[i] = x[i] + dt * k[2][i];
    }
    rhs.eval_into(tmp, &mut k[3]);
    for i in 0..n {
        out[i] = x[i] + dt / 6.0 * (k[0][i] + 2.0 * k[1][i] + 2.0 * k[2][i] + k[3][i]);
    }
}

/// Classical RK4 with step `dt` up to `t_end`, keeping every step.
pub fn integrate(sys: &MassActionSystem, x0: &[f64], t_end: f64, dt: f64) -> Result<Trajectory> {
    let rhs = Rhs::new(&sys.graph, &sys.rates.to_f64());
    integrate_rhs(&rhs, x0, t_end, dt, 1)
}

/// RK4 on a float right-hand side, recording every `every`-th step and the
/// final state. Stops early when a coordinate leaves `(0, OVERFLOW_BOUND)`.
pub fn integrate_rhs(
    rhs: &Rhs,
    x0: &[f64],
    t_end: f64,
    dt: f64,
    every: usize,
) -> Result<Trajectory> {
    if x0.len() != rhs.dim() {
        return Err(Error::Dimension(format!(
            "state has {} entries, system {}",
            x0.len(),
            rhs.dim()
        )));
    }
    if !x0.iter().all(|&x| x > 0.0 && x.is_finite()) {
        return Err(Error::NonPositiveState);
    }
    if !(dt > 0.0) || !(t_end >= 0.0) {
        return Err(Error::Unsupported(
            "dt must be positive and t_end nonnegative".into(),
        ));
    }
    let every = every.max(1);
    let n = x0.len();
    let steps = (t_end / dt).ceil() as usize;
    let mut traj = Trajectory {
        times: vec![0.0],
        states: vec![x0.to_vec()],
        events: Vec::new(),
    };
    let mut x = x0.to_vec();
    let mut next = vec![0.0; n];
    let mut tmp = vec![0.0; n];
    let mut k: [Vec<f64>; 4] = std::array::from_fn(|_| vec![0.0; n]);
    let mut t = 0.0;
    for s in 1..=steps {
        let h = if s == steps { t_end - t } else { dt };
        if h <= 0.0 {
            break;
        }
        rk4_step(rhs, &x, h, &mut k, &mut tmp, &mut next);
        t = if s == steps { t_end } else { s as f64 * dt };
        if let Some(i) = next.iter().position(|&v| !(v > 0.0)) {
            traj.events
                .push((t, format!("halt: x{} nonpositive", i + 1)));
            traj.times.push(t);
            traj.states.push(next.clone());
            return Ok(traj);
        }
        if let Some(i) = next
            .iter()
            .position(|&v| v > OVERFLOW_BOUND || !v.is_finite())
        {
            traj.events
                .push((t, format!("halt: x{} above {OVERFLOW_BOUND:e}", i + 1)));
            traj.times.push(t);
            traj.states.push(next.clone());
            return Ok(traj);
        }
        std::mem::swap(&mut x, &mut next);
        if s % every == 0 || s == steps {
            traj.times.push(t);
            traj.states.push(x.clone());
        }
    }
    Ok(traj)
}

/// Integrates until `|F(x)|` is negligible or `t_max` is reached; returns
/// the final state and time.
pub fn run_to_rest(rhs: &Rhs, x0: &[f64], dt: f64, t_max: f64) -> Result<(Vec<f64>, f64)> {
    let chunk = (1.0f64).max(dt * 1000.0);
    let mut x = x0.to_vec();
    let mut t = 0.0;
    let mut quiet = 0;
    while t < t_max {
        let tr = integrate_rhs(rhs, &x, chunk, dt, usize::MAX)?;
        if tr.halted() {
            return Err(Error::Unsupported(format!(
                "trajectory left the positive orthant near t = {t}"
            )));
        }
        let prev = std::mem::replace(&mut x, tr.last().unwrap().to_vec());
        t += chunk;
        let scale = x.iter().map(|v| v.abs()).fold(0.0, f64::max).max(1e-300);
        let moved = x
            .iter()
            .zip(&prev)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
            / scale;
        if moved < 1e-14 {
            quiet += 1;
            if quiet >= 2 {
                break;
            }
        } else {
            quiet = 0;
        }
    }
    Ok((x, t))
}

/// `sum_i c_i a^{i-1}` where `c_i` is the signed reduced coefficient at `y_i`
/// and `a = x2/x1`. Its positive roots are the steady-state ratios.
pub fn ratio_polynomial(red: &LineReduction) -> UniPoly {
    UniPoly::new(red.signed.clone())
}

#[derive(Clone, Debug, Serialize)]
pub struct SteadyState {
    pub x: Vec<f64>,
    /// `x2 / x1`.
    pub ratio: f64,
    pub multiplicity: usize,
    /// Stability along the class; `None` for a multiple root.
    pub stable: Option<bool>,
}

/// All positive steady states with `x1 + x2 = total`.
pub fn steady_states_on_class(red: &LineReduction, total: f64) -> Result<Vec<SteadyState>> {
    if !(total > 0.0) {
        return Err(Error::Unsupported("total must be positive".into()));
    }
    let p = ratio_polynomial(red);
    let dp = p.derivative();
    let mut out = Vec::new();
    for r in p.positive_roots(1e-30)? {
        let a = r.midpoint();
        let stable = if r.multiplicity == 1 {
            // dp has no root in the isolating interval, so its sign there is exact
            let m = r.midpoint_exact();
            let d = dp.eval(&m);
            Some(d > Q::from_integer(0.into()))
        } else {
            None
        };
        out.push(SteadyState {
            x: vec![total / (1.0 + a), total * a / (1.0 + a)],
            ratio: a,
            multiplicity: r.multiplicity,
            stable,
        });
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct Cluster {
    pub center: Vec<f64>,
    pub count: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProbeReport {
    pub trials: usize,
    pub seed: u64,
    pub total: f64,
    pub steady_states: Vec<SteadyState>,
    pub clusters: Vec<Cluster>,
    pub stable_states: usize,
    /// Every cluster sits on a steady state and, when all roots are simple,
    /// the clusters are exactly the stable ones.
    pub consistent: bool,
}

/// Absolute tolerance for merging trajectory endpoints.
pub const CLUSTER_TOL: f64 = 1e-4;

/// Integrates the reduced system from `trials` seeded random starts on the
/// class and clusters the endpoints.
pub fn multistationarity_probe(
    red: &LineReduction,
    total: f64,
    trials: usize,
    seed: u64,
) -> Result<ProbeReport> {
    let states = steady_states_on_class(red, total)?;
    let stable_states = states.iter().filter(|s| s.stable == Some(true)).count();
    if trials == 0 {
        return Ok(ProbeReport {
            trials,
            seed,
            total,
            steady_states: states,
            clusters: Vec::new(),
            stable_states,
            consistent: true,
        });
    }
    let rhs = Rhs::new(&red.reduced_graph, &red.reduced_rates.to_f64());
    let dt = line_step(red, total);
    let ends: Vec<Result<Vec<f64>>> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let u: f64 = rng.gen_range(0.02..0.98);
            let x0 = [total * u, total * (1.0 - u)];
            run_to_rest(&rhs, &x0, dt, 20_000.0).map(|(x, _)| x)
        })
        .collect();
    let mut clusters: Vec<Cluster> = Vec::new();
    for e in ends {
        let e = e?;
        match clusters
            .iter_mut()
            .find(|c| dist(&c.center, &e) < CLUSTER_TOL)
        {
            Some(c) => c.count += 1,
            None => clusters.push(Cluster {
                center: e,
                count: 1,
            }),
        }
    }
    clusters.sort_by(|a, b| a.center[0].total_cmp(&b.center[0]));
    let on_states = clusters
        .iter()
        .all(|c| states.iter().any(|s| dist(&s.x, &c.center) < CLUSTER_TOL));
    let all_simple = states.iter().all(|s| s.multiplicity == 1);
    let consistent = on_states && (!all_simple || clusters.len() == stable_states);
    Ok(ProbeReport {
        trials,
        seed,
        total,
        steady_states: states,
        clusters,
        stable_states,
        consistent,
    })
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// A step small against the fastest local rate of the reduced system.
fn line_step(red: &LineReduction, total: f64) -> f64 {
    let n = red.n() as i32;
    let scale: f64 =
        red.kstar.iter().map(to_f64).sum::<f64>() * total.max(1.0).powi(n - 2) * (n as f64);
    (0.05 / scale.max(1e-12)).min(0.01)
}

#[derive(Clone, Debug, Serialize)]
pub struct StabilityReport {
    pub trials: usize,
    pub max_error: f64,
    pub converged: bool,
}

/// Starts `trials` trajectories within `fraction` (relative) of `x0` inside
/// its compatibility class and measures how close they return.
pub fn local_stability(
    g: &EGraph,
    rates: &[f64],
    x0: &[f64],
    fraction: f64,
    trials: usize,
    seed: u64,
) -> Result<StabilityReport> {
    let rhs = Rhs::new(g, rates);
    let basis = stoichiometric_basis(g);
    let fastest =
        rates.iter().copied().fold(0.0, f64::max) * x0.iter().copied().fold(1.0, f64::max).powi(3);
    let dt = (0.02 / fastest.max(1e-12)).min(0.01);
    let errs: Vec<Result<f64>> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let mut x = x0.to_vec();
            if !basis.is_empty() {
                let mut v = vec![0.0; x0.len()];
                for b in &basis {
                    let c: f64 = rng.gen_range(-1.0..1.0);
                    for (vi, bi) in v.iter_mut().zip(b) {
                        *vi += c * bi;
                    }
                }
                // largest step keeping every coordinate within `fraction`
                let s = v
                    .iter()
                    .zip(x0)
                    .filter(|(vi, _)| vi.abs() > 0.0)
                    .map(|(vi, xi)| fraction * xi / vi.abs())
                    .fold(f64::INFINITY, f64::min);
                if s.is_finite() {
                    for (xi, vi) in x.iter_mut().zip(&v) {
                        *xi += s * vi;
                    }
                }
            }
            let (end, _) = run_to_rest(&rhs, &x, dt, 50_000.0)?;
            let scale = x0.iter().map(|v| v.abs()).fold(0.0, f64::max);
            Ok(dist(&end, x0) / scale)
        })
        .collect();
    let mut max_error: f64 = 0.0;
    for e in errs {
        max_error = max_error.max(e?);
    }
    Ok(StabilityReport {
        trials,
        max_error,
        converged: max_error < 1e-6,
    })
}

fn stoichiometric_basis(g: &EGraph) -> Vec<Vec<f64>> {
    let vecs: Vec<Vec<Q>> = (0..g.num_edges())
        .map(|e| g.reaction_vector(e).coords().to_vec())
        .collect();
    if vecs.is_empty() {
        return Vec::new();
    }
    let (r, piv) = QMatrix::from_rows(&vecs).rref();
    (0..piv.len())
        .map(|i| r.row(i).iter().map(to_f64).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::massaction::generate_system;
    use crate::model::{RateAssignment, RationalVec};
    use crate::rational::q;

    fn red(c: &[i64]) -> LineReduction {
        LineReduction::from_signed(c.iter().map(|&x| q(x)).collect()).unwrap()
    }

    #[test]
    fn conservation_on_the_line() {
        let r = red(&[-1, 1, -1, 1]);
        let sys = generate_system(&r.reduced_graph, &r.reduced_rates).unwrap();
        let tr = integrate(&sys, &[0.3, 1.7], 50.0, 1e-3).unwrap();
        assert!(!tr.halted());
        assert!(tr.drift(&[1.0, 1.0]) < 1e-9);
        assert_eq!(tr.times.len(), 50_001);
    }

    #[test]
    fn empty_graph_is_constant() {
        let g = EGraph::new(vec![RationalVec::from_ints(&[1, 0])], vec![]).unwrap();
        let sys = generate_system(&g, &RateAssignment::exact(vec![]).unwrap()).unwrap();
        let tr = integrate(&sys, &[2.0, 3.0], 1.0, 0.1).unwrap();
        assert_eq!(tr.last().unwrap(), &[2.0, 3.0]);
    }

    #[test]
    fn halts_on_positivity_loss() {
        let g = EGraph::new(
            vec![
                RationalVec::from_ints(&[0, 0]),
                RationalVec::from_ints(&[1, 0]),
            ],
            vec![(0, 1), (1, 0)],
        )
        .unwrap();
        // x1' = 1 - 100 x1 with a coarse step overshoots below zero
        let rhs = Rhs::new(&g, &[1.0, 100.0]);
        let tr = integrate_rhs(&rhs, &[1.0, 1.0], 1.0, 0.1, 1).unwrap();
        assert!(tr.halted());
        assert!(integrate_rhs(&rhs, &[0.0, 1.0], 1.0, 0.1, 1).is_err());
    }

    #[test]
    fn steady_states() {
        let one = steady_states_on_class(&red(&[-1, 1, -1, 1]), 2.0).unwrap();
        assert_eq!(one.len(), 1);
        assert!((one[0].x[0] - 1.0).abs() < 1e-12 && (one[0].x[1] - 1.0).abs() < 1e-12);
        let three = steady_states_on_class(&red(&[-6, 11, -6, 1]), 2.0).unwrap();
        let ratios: Vec<f64> = three.iter().map(|s| s.ratio).collect();
        for (r, e) in ratios.iter().zip([1.0, 2.0, 3.0]) {
            assert!((r - e).abs() < 1e-12);
        }
        assert_eq!(
            three.iter().map(|s| s.stable).collect::<Vec<_>>(),
            vec![Some(true), Some(false), Some(true)]
        );
        assert!((three[2].x[0] - 0.5).abs() < 1e-12);
        let double = steady_states_on_class(&red(&[-2, 5, -4, 1]), 2.0).unwrap();
        assert_eq!(double.len(), 2);
        assert_eq!(double.iter().filter(|s| s.multiplicity == 2).count(), 1);
    }

    #[test]
    fn probe_counts() {
        let r = red(&[-6, 11, -6, 1]);
        let p = multistationarity_probe(&r, 2.0, 12, 5).unwrap();
        assert_eq!(p.clusters.len(), 2);
        assert!(p.consistent);
        assert!(multistationarity_probe(&r, 2.0, 0, 5)
            .unwrap()
            .clusters
            .is_empty());
    }
}
