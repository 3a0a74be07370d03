//! Networks whose vertices are the lattice points of `x1 + x2 = N - 1`.
//!
//! Vertex `y_i = (N-i, i-1)`. The net reaction vector at `y_i` is
//! `c_i (1,-1)`; its sign is the direction and `|c_i|` the reduced rate.

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::balance::{complex_balance_residual, detailed_balance_residual};
use crate::error::{Error, Result};
use crate::fixtures::line_vertices;
use crate::model::{EGraph, RateAssignment};
use crate::poly::UniPoly;
use crate::rational::{q, sign, to_f64, Q};

#[derive(Clone, Debug)]
pub struct LineReduction {
    /// Signed coefficient `c_i` of `(1,-1)` at each line position.
    pub signed: Vec<Q>,
    pub kstar: Vec<Q>,
    /// +1 towards `y_{i-1}`, -1 towards `y_{i+1}`, 0 when `c_i = 0`.
    pub directions: Vec<i8>,
    /// Line position to vertex index of the input graph.
    pub vertex_map: Vec<usize>,
    pub reduced_graph: EGraph,
    pub reduced_rates: RateAssignment,
}

impl LineReduction {
    /// Builds the reduction directly from the signed coefficients `c_i`.
    pub fn from_signed(signed: Vec<Q>) -> Result<Self> {
        let n = signed.len();
        if n < 2 {
            return Err(Error::NotLineNetwork("need at least two vertices".into()));
        }
        if !signed[0].is_negative() || !signed[n - 1].is_positive() {
            return Err(Error::NotLineNetwork(
                "first coefficient must be negative and last positive".into(),
            ));
        }
        let directions: Vec<i8> = signed.iter().map(sign).collect();
        let kstar: Vec<Q> = signed.iter().map(|c| c.abs()).collect();
        let mut edges = Vec::new();
        let mut rates = Vec::new();
        for (i, c) in signed.iter().enumerate() {
            match sign(c) {
                1 => edges.push((i, i - 1)),
                -1 => edges.push((i, i + 1)),
                _ => continue,
            }
            rates.push(c.abs());
        }
        let reduced_graph = EGraph::new(line_vertices(n), edges)?;
        Ok(LineReduction {
            signed,
            kstar,
            directions,
            vertex_map: (0..n).collect(),
            reduced_graph,
            reduced_rates: RateAssignment::exact(rates)?,
        })
    }

    /// Reduced rates with a direction pattern (entries of `kstar` may be zero
    /// only where the direction is 0).
    pub fn from_pattern(kstar: &[Q], directions: &[i8]) -> Result<Self> {
        assert_eq!(kstar.len(), directions.len());
        let signed = kstar
            .iter()
            .zip(directions)
            .map(|(k, &d)| k * q(d as i64))
            .collect();
        Self::from_signed(signed)
    }

    pub fn n(&self) -> usize {
        self.signed.len()
    }

    pub fn kstar_f64(&self) -> Vec<f64> {
        self.kstar.iter().map(to_f64).collect()
    }

    pub fn is_degenerate(&self) -> bool {
        self.directions.contains(&0)
    }
}

/// Computes the reduced rates of a line network.
pub fn line_reduce(g: &EGraph, k: &RateAssignment) -> Result<LineReduction> {
    k.check_graph(g)?;
    if g.dim() != 2 {
        return Err(Error::NotLineNetwork("two species required".into()));
    }
    let n = g.num_vertices();
    let top = q(n as i64 - 1);
    let mut pos_of = vec![usize::MAX; n];
    let mut vertex_map = vec![usize::MAX; n];
    for (v, y) in g.vertices().iter().enumerate() {
        let c = y.coords();
        if !c.iter().all(|x| x.is_integer() && !x.is_negative()) || &c[0] + &c[1] != top {
            return Err(Error::NotLineNetwork(format!(
                "vertex {y} is not a lattice point of x1 + x2 = {top}"
            )));
        }
        let p: usize = num_traits::ToPrimitive::to_usize(&c[1].to_integer()).unwrap();
        pos_of[v] = p;
        vertex_map[p] = v;
    }
    let rates = k.to_exact_lossless();
    let mut signed = vec![Q::zero(); n];
    let mut has_out = vec![false; n];
    for (e, &(s, t)) in g.edges().iter().enumerate() {
        let (i, j) = (pos_of[s] as i64, pos_of[t] as i64);
        signed[pos_of[s]] += &rates[e] * q(i - j);
        has_out[pos_of[s]] |= !rates[e].is_zero();
    }
    if !has_out[0] || !has_out[n - 1] {
        return Err(Error::NotLineNetwork(
            "both endpoints must be sources".into(),
        ));
    }
    let mut red = LineReduction::from_signed(signed)?;
    red.vertex_map = vertex_map;
    Ok(red)
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct ChamberReport {
    pub pattern: String,
    pub label: String,
    /// Labels of every chamber whose closure contains the pattern.
    pub containing: Vec<String>,
    pub single_sign_change: bool,
    pub sign_change_count: usize,
    pub degenerate: bool,
}

fn pattern_string(d: &[i8]) -> String {
    let parts: Vec<&str> = d
        .iter()
        .map(|&s| match s {
            1 => "+",
            -1 => "-",
            _ => "0",
        })
        .collect();
    format!("({})", parts.join(","))
}

/// Names the chamber of a nondegenerate pattern.
pub fn chamber_label(d: &[i8]) -> String {
    if d.len() == 4 {
        match (d[1], d[2]) {
            (-1, -1) => return "C1".into(),
            (-1, 1) => return "C2".into(),
            (1, 1) => return "C3".into(),
            (1, -1) => return "C4".into(),
            _ => {}
        }
    }
    pattern_string(d)
}

fn flips(d: &[i8]) -> usize {
    let nz: Vec<i8> = d.iter().copied().filter(|&s| s != 0).collect();
    nz.windows(2).filter(|w| w[0] != w[1]).count()
}

/// All sign patterns obtained by resolving the zero entries.
pub fn completions(d: &[i8]) -> Vec<Vec<i8>> {
    let zeros: Vec<usize> = (0..d.len()).filter(|&i| d[i] == 0).collect();
    (0..1u64 << zeros.len())
        .map(|mask| {
            let mut p = d.to_vec();
            for (b, &i) in zeros.iter().enumerate() {
                p[i] = if mask & (1 << b) != 0 { 1 } else { -1 };
            }
            p
        })
        .collect()
}

pub fn classify_chamber(red: &LineReduction) -> ChamberReport {
    let d = &red.directions;
    let mut containing: Vec<String> = completions(d).iter().map(|p| chamber_label(p)).collect();
    containing.sort();
    containing.dedup();
    let degenerate = red.is_degenerate();
    let count = flips(d);
    ChamberReport {
        pattern: pattern_string(d),
        label: if degenerate {
            containing.join("|")
        } else {
            chamber_label(d)
        },
        containing,
        single_sign_change: count == 1,
        sign_change_count: count,
        degenerate,
    }
}

pub fn classify_batch(reds: &[LineReduction]) -> Vec<ChamberReport> {
    reds.par_iter().map(classify_chamber).collect()
}

/// `k3* k2* <= k4* k1*`.
pub fn segre_test(kstar: &[Q]) -> bool {
    assert_eq!(kstar.len(), 4);
    &kstar[2] * &kstar[1] <= &kstar[3] * &kstar[0]
}

/// Membership of a four-vertex line system in the disguised toric locus.
/// On chamber walls the answer is true if any adjacent chamber certifies it.
pub fn is_disguised_toric_quadrilateral(red: &LineReduction) -> Result<bool> {
    if red.n() != 4 {
        return Err(Error::NotLineNetwork("four vertices required".into()));
    }
    Ok(completions(&red.directions)
        .iter()
        .any(|p| flips(p) == 1 || segre_test(&red.kstar)))
}

/// Cubic whose positive roots are the steady-state ratios `x2/x1`:
/// `k1 - k2 t + k3 t^2 - k4 t^3`.
pub fn quadrilateral_cubic(kstar: &[Q]) -> UniPoly {
    UniPoly::new(vec![
        kstar[0].clone(),
        -kstar[1].clone(),
        kstar[2].clone(),
        -kstar[3].clone(),
    ])
}

pub fn discriminant(k: &[Q]) -> Q {
    let (k1, k2, k3, k4) = (&k[0], &k[1], &k[2], &k[3]);
    let s = |x: &Q| x * x;
    s(&(k3 * k2)) - q(4) * k4 * k2 * k2 * k2 - q(4) * k3 * k3 * k3 * k1 - q(27) * s(&(k4 * k1))
        + q(18) * k4 * k3 * k1 * k2
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct DiscriminantReport {
    #[serde(serialize_with = "ser_q")]
    pub delta: Q,
    pub boundary: bool,
    /// `None` on the boundary `delta = 0`.
    pub unique_equilibrium: Option<bool>,
    pub positive_roots: usize,
    pub positive_roots_with_multiplicity: usize,
    /// Whether `delta < 0` agrees with "exactly one positive root, simple".
    pub consistent: bool,
}

fn ser_q<S: serde::Serializer>(x: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&crate::rational::fmt_q(x))
}

pub fn discriminant_report(kstar: &[Q]) -> Result<DiscriminantReport> {
    if kstar.len() != 4 || kstar.iter().any(|k| !k.is_positive()) {
        return Err(Error::Rates("four positive reduced rates required".into()));
    }
    let delta = discriminant(kstar);
    let f = quadrilateral_cubic(kstar);
    let distinct = f.count_positive_roots()?;
    let with_mult = f.count_positive_roots_with_multiplicity()?;
    let boundary = delta.is_zero();
    Ok(DiscriminantReport {
        boundary,
        unique_equilibrium: (!boundary).then(|| delta.is_negative()),
        positive_roots: distinct,
        positive_roots_with_multiplicity: with_mult,
        consistent: delta.is_negative() == (with_mult == 1),
        delta,
    })
}

/// A detailed balanced realization of a line system on the reversible path
/// graph, with rates that are polynomials in a ratio `t` of the species at a
/// steady state (reduced modulo `relation`, which the ratio satisfies).
#[derive(Clone, Debug)]
pub struct LineCertificate {
    pub graph: EGraph,
    pub symbolic_rates: Vec<UniPoly>,
    pub relation: UniPoly,
    pub root: (Q, Q),
    pub ratio: f64,
    /// `"x1/x2"` or `"x2/x1"`: which species ratio `t` stands for.
    pub ratio_convention: &'static str,
    pub rates: Vec<f64>,
    pub x0: Vec<f64>,
    /// Whether the vertex order was reversed and species swapped to reach the
    /// construction's normal form (then `x0` has already been mapped back).
    pub involution_applied: bool,
    pub construction: &'static str,
}

impl LineCertificate {
    /// Exact check that the certificate generates the reduced system, with
    /// coefficients compared in `Q[t]/(relation)`.
    pub fn same_dynamics_mod_relation(&self, red: &LineReduction) -> bool {
        let n = red.n();
        let mut net = vec![UniPoly::zero(); n];
        for (e, &(s, t)) in self.graph.edges().iter().enumerate() {
            // (1,-1) coefficient of y_t - y_s is s - t
            let d = q(s as i64 - t as i64);
            net[s] = net[s].add(&self.symbolic_rates[e].scale(&d));
        }
        net.iter().zip(&red.signed).all(|(p, c)| {
            p.sub(&UniPoly::constant(c.clone()))
                .rem(&self.relation)
                .is_zero()
        })
    }

    /// Exact check of the pairwise balance in `Q[t]/(relation)`.
    pub fn detailed_balance_mod_relation(&self) -> bool {
        let t = UniPoly::x();
        self.graph.edges().iter().enumerate().all(|(e, &(s, u))| {
            if s > u {
                return true;
            }
            let back = self.graph.edge_index(u, s).expect("reversible");
            let (fwd, bwd) = (&self.symbolic_rates[e], &self.symbolic_rates[back]);
            // x^{y_{s+1}} / x^{y_s} = x2/x1
            let diff = match self.ratio_convention {
                "x1/x2" => bwd.sub(&t.mul(fwd)),
                _ => fwd.sub(&t.mul(bwd)),
            };
            diff.rem(&self.relation).is_zero()
        })
    }

    pub fn detailed_balance_residual(&self) -> f64 {
        detailed_balance_residual(&self.graph, &self.rates, &self.x0).expect("reversible path")
    }

    pub fn complex_balance_residual(&self) -> f64 {
        complex_balance_residual(&self.graph, &self.rates, &self.x0)
    }
}

fn isolate_unique(p: &UniPoly) -> Result<(Q, Q)> {
    let roots = p.isolate_positive_roots(1e-40)?;
    match roots.as_slice() {
        [r] => Ok(r.clone()),
        _ => Err(Error::Unsupported(format!(
            "expected one positive root of {p}, found {}",
            roots.len()
        ))),
    }
}

/// Detailed balanced path realization for single-sign-change patterns.
///
/// With `t = x1/x2` at the steady state, rates are built inward from both
/// ends: `k_{i,i+1} = k_i* + t k_{i-1,i}` left of the flip and
/// `k_{i,i-1} = k_i* + k_{i+1,i}/t` right of it. The two chains meet at the
/// flip, where balance holds exactly when `t` is the positive root of
/// `sum_{i<=j} k_i* t^{N-i} - sum_{i>j} k_i* t^{N-i}`.
pub fn horner_realization(red: &LineReduction) -> Result<LineCertificate> {
    let n = red.n();
    let d = &red.directions;
    let last_neg = (0..n).filter(|&i| d[i] == -1).max().unwrap();
    let first_pos = (0..n).filter(|&i| d[i] == 1).min().unwrap();
    if last_neg > first_pos {
        return Err(Error::NotSingleSignChange);
    }
    let j = last_neg; // 0-based: positions 0..=j push right
    let k = &red.kstar;
    let mut rel = vec![Q::zero(); n];
    for i in 0..n {
        let c = if i <= j { k[i].clone() } else { -k[i].clone() };
        rel[n - 1 - i] = c;
    }
    let relation = UniPoly::new(rel);
    let t = UniPoly::x();
    let t_inv = t
        .inverse_mod(&relation)
        .expect("relation has nonzero constant term");
    let root = isolate_unique(&relation)?;
    let ratio = to_f64(&((&root.0 + &root.1) / q(2)));

    // symbolic rates right[i] = k_{i,i+1}, left[i] = k_{i,i-1}
    let mut right = vec![UniPoly::zero(); n];
    let mut left = vec![UniPoly::zero(); n];
    let mut right_f = vec![0.0; n];
    let mut left_f = vec![0.0; n];
    for i in 0..=j.min(n - 2) {
        let prev = if i == 0 {
            UniPoly::zero()
        } else {
            left[i].clone()
        };
        let prev_f = if i == 0 { 0.0 } else { left_f[i] };
        right[i] = UniPoly::constant(k[i].clone()).add(&prev);
        right_f[i] = to_f64(&k[i]) + prev_f;
        if i < j {
            left[i + 1] = t.mul_mod(&right[i], &relation);
            left_f[i + 1] = ratio * right_f[i];
        }
    }
    for i in (j + 1..n).rev() {
        let next = if i == n - 1 {
            UniPoly::zero()
        } else {
            right[i].clone()
        };
        let next_f = if i == n - 1 { 0.0 } else { right_f[i] };
        left[i] = UniPoly::constant(k[i].clone()).add(&next);
        left_f[i] = to_f64(&k[i]) + next_f;
        if i > j + 1 {
            right[i - 1] = t_inv.mul_mod(&left[i], &relation);
            right_f[i - 1] = left_f[i] / ratio;
        }
    }
    let graph = crate::fixtures::line_path(n);
    let mut symbolic_rates = Vec::new();
    let mut rates = Vec::new();
    for &(s, u) in graph.edges() {
        if u == s + 1 {
            symbolic_rates.push(right[s].rem(&relation));
            rates.push(right_f[s]);
        } else {
            symbolic_rates.push(left[s].rem(&relation));
            rates.push(left_f[s]);
        }
    }
    Ok(LineCertificate {
        graph,
        symbolic_rates,
        relation,
        root,
        ratio,
        ratio_convention: "x1/x2",
        rates,
        x0: vec![ratio, 1.0],
        involution_applied: false,
        construction: "horner",
    })
}

/// Path realization for the three-flip four-vertex chamber under the Segre
/// inequality. With `t = x2/x1` a root of the cubic and `b = t k4* - k3*`,
/// `a = t b`: rates `k12 = k1*`, `k21 = k2* + a`, `k23 = a`, `k32 = b`,
/// `k34 = k3* + b`, `k43 = k4*`. When `b = 0` the middle pair is dropped.
pub fn segre_realization(red: &LineReduction) -> Result<LineCertificate> {
    if red.n() != 4 || red.directions != [-1, 1, -1, 1] {
        return Err(Error::Unsupported("needs the (-,+,-,+) chamber".into()));
    }
    let k = &red.kstar;
    if !segre_test(k) {
        return Err(Error::Unsupported("Segre inequality fails".into()));
    }
    let f = quadrilateral_cubic(k);
    let boundary_root = &k[2] / &k[3];
    let exact_root = f.eval(&boundary_root).is_zero();
    let root = if exact_root {
        (boundary_root.clone(), boundary_root)
    } else {
        let roots = f.squarefree_part().isolate_positive_roots(1e-40)?;
        roots
            .last()
            .cloned()
            .ok_or_else(|| Error::Unsupported("cubic has no positive root".into()))?
    };
    let ratio = to_f64(&((&root.0 + &root.1) / q(2)));
    let t = UniPoly::x();
    let relation = if exact_root {
        UniPoly::new(vec![-root.0.clone(), Q::one()])
    } else {
        f.clone()
    };
    let kk = |i: usize| UniPoly::constant(k[i].clone());
    let b = t.mul(&kk(3)).sub(&kk(2)).rem(&relation);
    let a = t.mul(&b).rem(&relation);
    let (k1, k2, k3, k4) = (to_f64(&k[0]), to_f64(&k[1]), to_f64(&k[2]), to_f64(&k[3]));
    let bf = if exact_root { 0.0 } else { ratio * k4 - k3 };
    let af = ratio * bf;
    let (graph, symbolic_rates, rates) = if exact_root {
        let g = EGraph::new(line_vertices(4), vec![(0, 1), (1, 0), (2, 3), (3, 2)])?;
        (g, vec![kk(0), kk(1), kk(2), kk(3)], vec![k1, k2, k3, k4])
    } else {
        (
            crate::fixtures::line_path(4),
            vec![
                kk(0),
                kk(1).add(&a),
                a.clone(),
                b.clone(),
                kk(2).add(&b),
                kk(3),
            ],
            vec![k1, k2 + af, af, bf, k3 + bf, k4],
        )
    };
    Ok(LineCertificate {
        graph,
        symbolic_rates,
        relation,
        root,
        ratio,
        ratio_convention: "x2/x1",
        rates,
        x0: vec![1.0, ratio],
        involution_applied: false,
        construction: "segre",
    })
}

/// Certificate for any single-sign-change line system; `None` otherwise.
pub fn ngon_disguised_certificate(red: &LineReduction) -> Option<LineCertificate> {
    if flips(&red.directions) != 1 {
        return None;
    }
    horner_realization(red).ok()
}

/// Certificate for a four-vertex line system when one exists.
pub fn quadrilateral_certificate(red: &LineReduction) -> Result<Option<LineCertificate>> {
    if red.n() != 4 {
        return Err(Error::NotLineNetwork("four vertices required".into()));
    }
    if let Some(c) = ngon_disguised_certificate(red) {
        return Ok(Some(c));
    }
    if red.directions == [-1, 1, -1, 1] && segre_test(&red.kstar) {
        return segre_realization(red).map(Some);
    }
    Ok(None)
}
