//! Pointwise membership search: fix the rates, sample the auxiliary domain
//! for sign changes of the pulled-back toric equations, refine a root, and
//! verify the resulting realization.

use num_traits::{Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::balance::{complex_balance_residual, complex_balanced_point, detailed_balance_residual};
use crate::chambers::{
    line_reduce, ngon_disguised_certificate, quadrilateral_certificate, LineCertificate,
    LineReduction,
};
use crate::error::{Error, Result};
use crate::linalg::solve_dense;
use crate::massaction::net_vectors;
use crate::model::{EGraph, RateAssignment};
use crate::poly::{CompiledPoly, SparsePoly, UniPoly};
use crate::rational::{from_f64, to_f64, Q};

use super::closed::disguised_membership_rectangle;
use super::domain::DomainGeometry;
use super::family::{is_complete_on, rectangle_shape, same_edge_set};
use super::param::{
    check_faithful, generic_parametrization, identity_parametrization, pullback_toric,
    rectangle_parametrization, triangle_parametrization, Parametrization, Pullback,
};

#[derive(Clone, Debug)]
pub struct Budget {
    pub samples: usize,
    pub seed: u64,
    /// Complex balance residual accepted for a witness.
    pub tol: f64,
    /// Allow vanishing target rates (realizations on subgraphs).
    pub closed: bool,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            samples: 4000,
            seed: 0,
            tol: 1e-9,
            closed: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SameDynamics {
    Exact,
    /// Exact in the quotient ring of the algebraic ratio's minimal relation.
    ExactModuloRelation,
}

/// A complex balanced realization of the input system.
#[derive(Clone, Debug)]
pub struct Witness {
    pub graph: EGraph,
    pub rates: Vec<f64>,
    pub exact_rates: Option<Vec<Q>>,
    pub x0: Vec<f64>,
    pub aux_names: Vec<String>,
    pub aux: Vec<f64>,
    pub same_dynamics: SameDynamics,
    pub complex_balance_residual: f64,
    pub detailed_balance_residual: Option<f64>,
    pub relation: Option<UniPoly>,
    pub method: String,
}

#[derive(Clone, Debug)]
pub enum Verdict {
    CertifiedYes(Box<Witness>),
    CertifiedNoByClosedForm(String),
    Unknown(String),
}

impl Verdict {
    pub fn tag(&self) -> &'static str {
        match self {
            Verdict::CertifiedYes(_) => "certified-yes",
            Verdict::CertifiedNoByClosedForm(_) => "certified-no-by-closed-form",
            Verdict::Unknown(_) => "unknown",
        }
    }

    pub fn is_yes(&self) -> bool {
        matches!(self, Verdict::CertifiedYes(_))
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Verdict::CertifiedYes(w) => Some(w),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SearchReport {
    pub verdict: Verdict,
    pub seed: u64,
    pub generators_used: usize,
    pub samples_used: usize,
    pub parametrization: Option<String>,
    /// "closed-form", "certificate", "proven-parametrization" or "sampled-parametrization".
    pub evidence: String,
    pub warnings: Vec<String>,
}

impl SearchReport {
    fn shortcut(verdict: Verdict, seed: u64, evidence: &str, warnings: Vec<String>) -> Self {
        SearchReport {
            verdict,
            seed,
            generators_used: 0,
            samples_used: 0,
            parametrization: None,
            evidence: evidence.into(),
            warnings,
        }
    }
}

/// Decides whether `(g, k)` has a complex balanced realization on `ghat`
/// (or, in the closed regime, on a subgraph of it). Uses a closed form or a
/// line certificate when `rho` is not given and the network belongs to a
/// family that has one; otherwise searches the fiber of `rho` over `k`.
pub fn disguised_search(
    g: &EGraph,
    k: &RateAssignment,
    ghat: &EGraph,
    rho: Option<&Parametrization>,
    budget: &Budget,
) -> Result<SearchReport> {
    k.check_graph(g)?;
    if g.dim() != ghat.dim() {
        return Err(Error::Dimension(format!(
            "{} vs {} species",
            g.dim(),
            ghat.dim()
        )));
    }
    let kq = k.to_exact_lossless();
    let mut warnings = Vec::new();
    if rho.is_none() {
        if let Some(r) = family_shortcut(g, &kq, ghat, budget, &mut warnings)? {
            return Ok(r);
        }
    }
    let owned;
    let rho = match rho {
        Some(r) => r,
        None => {
            owned = default_parametrization(g, &kq, ghat)?;
            &owned
        }
    };
    check_faithful(rho, g, ghat)?;
    if !rho.flags.proven {
        warnings.push("fallback parametrization: surjectivity is sampled, not proven".into());
    }
    if !ghat.is_weakly_reversible() {
        return Ok(SearchReport::shortcut(
            Verdict::Unknown("target graph is not weakly reversible".into()),
            budget.seed,
            "none",
            warnings,
        ));
    }
    let pb = pullback_toric(rho, ghat)?;
    let mut report = fiber_search(g, &kq, ghat, rho, &pb, budget, warnings)?;
    if !report.verdict.is_yes() && rho_is_default(rho) {
        // the line certificate may still apply
        if let Ok(red) = line_reduce(
            g,
            &RateAssignment::subgraph(crate::model::Rates::Exact(kq.clone()))?,
        ) {
            if let Some(cert) = ngon_disguised_certificate(&red) {
                if let Some(v) = certificate_verdict(&red, &cert, budget.tol) {
                    report.verdict = v;
                    report.evidence = "certificate".into();
                }
            }
        }
    }
    Ok(report)
}

fn rho_is_default(rho: &Parametrization) -> bool {
    matches!(
        rho.name.as_str(),
        "triangle" | "triangle-mirrored" | "generic" | "identity"
    )
}

fn family_shortcut(
    g: &EGraph,
    kq: &[Q],
    ghat: &EGraph,
    budget: &Budget,
    warnings: &mut Vec<String>,
) -> Result<Option<SearchReport>> {
    if let Some(shape) = rectangle_shape(g) {
        let k4: Vec<Q> = shape.corner_edges.iter().map(|&e| kq[e].clone()).collect();
        if k4.iter().all(Signed::is_positive) {
            let corners: Vec<&[Q]> = shape
                .corners
                .iter()
                .map(|&c| g.vertex(c).coords())
                .collect();
            let on_complete = is_complete_on(ghat, &corners);
            let strict = !budget.closed;
            let inside = disguised_membership_rectangle(&k4, &shape.alpha, &shape.beta, strict)?;
            // the open form speaks about the complete corner graph only;
            // the closed form about every realization
            if !inside && (budget.closed || on_complete) {
                let reason = if strict {
                    "k1 k3 / (k2 k4) outside the open rectangle bounds"
                } else {
                    "k1 k3 / (k2 k4) outside the closed rectangle bounds"
                };
                return Ok(Some(SearchReport::shortcut(
                    Verdict::CertifiedNoByClosedForm(reason.into()),
                    budget.seed,
                    "closed-form",
                    warnings.clone(),
                )));
            }
        }
    }
    let exact = RateAssignment::subgraph(crate::model::Rates::Exact(kq.to_vec()))?;
    if let Ok(red) = line_reduce(g, &exact) {
        if red.n() == 4 {
            return Ok(Some(match quadrilateral_certificate(&red)? {
                Some(cert) => match certificate_verdict(&red, &cert, budget.tol) {
                    Some(v) => {
                        SearchReport::shortcut(v, budget.seed, "certificate", warnings.clone())
                    }
                    None => SearchReport::shortcut(
                        Verdict::Unknown("line certificate failed numeric verification".into()),
                        budget.seed,
                        "certificate",
                        warnings.clone(),
                    ),
                },
                None => SearchReport::shortcut(
                    Verdict::CertifiedNoByClosedForm(
                        "fourth chamber with k3* k2* > k4* k1*".into(),
                    ),
                    budget.seed,
                    "closed-form",
                    warnings.clone(),
                ),
            }));
        }
        let triangle_target = red.n() == 3 && is_triangle_target(g, ghat);
        if !triangle_target {
            if let Some(cert) = ngon_disguised_certificate(&red) {
                if let Some(v) = certificate_verdict(&red, &cert, budget.tol) {
                    return Ok(Some(SearchReport::shortcut(
                        v,
                        budget.seed,
                        "certificate",
                        warnings.clone(),
                    )));
                }
                warnings.push("line certificate failed numeric verification".into());
            }
        }
    }
    Ok(None)
}

fn is_triangle_target(g: &EGraph, ghat: &EGraph) -> bool {
    let pts: Vec<&[Q]> = g.vertices().iter().map(|v| v.coords()).collect();
    is_complete_on(ghat, &pts)
}

fn certificate_verdict(red: &LineReduction, cert: &LineCertificate, tol: f64) -> Option<Verdict> {
    if !cert.same_dynamics_mod_relation(red) || !cert.detailed_balance_mod_relation() {
        return None;
    }
    let cb = cert.complex_balance_residual();
    let db = cert.detailed_balance_residual();
    if !(cb < tol && db < tol) {
        return None;
    }
    Some(Verdict::CertifiedYes(Box::new(Witness {
        graph: cert.graph.clone(),
        rates: cert.rates.clone(),
        exact_rates: None,
        x0: cert.x0.clone(),
        aux_names: vec![format!("t = {}", cert.ratio_convention)],
        aux: vec![cert.ratio],
        same_dynamics: SameDynamics::ExactModuloRelation,
        complex_balance_residual: cb,
        detailed_balance_residual: Some(db),
        relation: Some(cert.relation.clone()),
        method: cert.construction.to_string(),
    })))
}

/// The parametrization used when none is supplied.
pub fn default_parametrization(g: &EGraph, kq: &[Q], ghat: &EGraph) -> Result<Parametrization> {
    if g.num_vertices() == 3 && is_triangle_target(g, ghat) {
        if let Ok(rho) = triangle_parametrization(g, ghat, false) {
            // the middle vertex decides the orientation
            let mid = middle_net(g, kq);
            if !mid.is_negative() {
                return Ok(rho);
            }
            return triangle_parametrization(g, ghat, true);
        }
    }
    if let Some(shape) = rectangle_shape(g) {
        let corners: Vec<&[Q]> = shape
            .corners
            .iter()
            .map(|&c| g.vertex(c).coords())
            .collect();
        if is_complete_on(ghat, &corners) {
            return rectangle_parametrization(g, &shape, ghat);
        }
    }
    if same_edge_set(g, ghat) {
        return identity_parametrization(g, ghat);
    }
    generic_parametrization(g, ghat)
}

/// Coefficient of `(1,-1)` in the net reaction vector at the middle vertex
/// of a three-point line, oriented from the vertex with larger first coordinate.
fn middle_net(g: &EGraph, kq: &[Q]) -> Q {
    let mut idx: Vec<usize> = (0..3).collect();
    idx.sort_by(|&i, &j| g.vertex(j).coords()[0].cmp(&g.vertex(i).coords()[0]));
    let m = idx[1];
    let mut c = Q::zero();
    for e in g.out_edges(m) {
        let v = g.reaction_vector(e);
        c += &kq[e] * &v.coords()[0];
    }
    c
}

struct Fiber<'a> {
    g: &'a EGraph,
    kq: &'a [Q],
    ghat: &'a EGraph,
    rho: &'a Parametrization,
    closed: bool,
    tol: f64,
    n_k: usize,
}

impl Fiber<'_> {
    fn full(&self, aux: &[f64]) -> Vec<f64> {
        let mut x = vec![0.0; self.n_k];
        x.extend_from_slice(aux);
        x
    }

    fn target_rates_ok(&self, aux: &[f64]) -> bool {
        let kf: Vec<f64> = self.kq.iter().map(to_f64).collect();
        let r = self.rho.eval_f64(&kf, aux);
        r.iter()
            .all(|&x| x.is_finite() && if self.closed { x >= 0.0 } else { x > 0.0 })
    }

    /// Exact target rates at `aux`, checked for same dynamics and complex balance.
    fn witness(&self, aux: &[f64], method: &str) -> Option<Witness> {
        let auxq: Vec<Q> = aux.iter().map(|&x| from_f64(x)).collect();
        self.witness_exact(&auxq, method)
    }

    fn witness_exact(&self, auxq: &[Q], method: &str) -> Option<Witness> {
        let khat = self.rho.eval(self.kq, auxq)?;
        let ok = khat.iter().all(|x| {
            if self.closed {
                !x.is_negative()
            } else {
                x.is_positive()
            }
        });
        if !ok || khat.iter().all(Zero::is_zero) {
            return None;
        }
        if net_vectors(self.g, self.kq) != net_vectors(self.ghat, &khat) {
            return None;
        }
        let support: Vec<usize> = (0..khat.len()).filter(|&e| !khat[e].is_zero()).collect();
        let sub = self.ghat.edge_subgraph(&support);
        let sub_exact: Vec<Q> = support.iter().map(|&e| khat[e].clone()).collect();
        let sub_rates: Vec<f64> = sub_exact.iter().map(to_f64).collect();
        let x0 = complex_balanced_point(&sub, &sub_rates)?;
        let cb = complex_balance_residual(&sub, &sub_rates, &x0);
        if !(cb < self.tol) {
            return None;
        }
        let db = if sub.is_reversible() {
            detailed_balance_residual(&sub, &sub_rates, &x0).ok()
        } else {
            None
        };
        Some(Witness {
            graph: sub,
            rates: sub_rates,
            exact_rates: Some(sub_exact),
            x0,
            aux_names: self.rho.aux_names().to_vec(),
            aux: auxq.iter().map(to_f64).collect(),
            same_dynamics: SameDynamics::Exact,
            complex_balance_residual: cb,
            detailed_balance_residual: db,
            relation: None,
            method: method.into(),
        })
    }
}

fn normalized(p: &CompiledPoly, x: &[f64]) -> f64 {
    let m = p.magnitude(x);
    if m == 0.0 {
        0.0
    } else {
        p.eval(x) / m
    }
}

fn fiber_search(
    g: &EGraph,
    kq: &[Q],
    ghat: &EGraph,
    rho: &Parametrization,
    pb: &Pullback,
    budget: &Budget,
    warnings: Vec<String>,
) -> Result<SearchReport> {
    let evidence = if rho.flags.proven {
        "proven-parametrization"
    } else {
        "sampled-parametrization"
    };
    let mut report = SearchReport {
        verdict: Verdict::Unknown(String::new()),
        seed: budget.seed,
        generators_used: pb.generators.len(),
        samples_used: 0,
        parametrization: Some(rho.name.clone()),
        evidence: evidence.into(),
        warnings,
    };
    let assign: Vec<(usize, Q)> = kq.iter().cloned().enumerate().collect();
    let gens: Vec<SparsePoly> = pb
        .generators
        .iter()
        .map(|p| p.partial_eval(&assign))
        .filter(|p| !p.is_zero())
        .collect();
    if gens.iter().any(|p| p.total_degree() == Some(0)) {
        report.verdict =
            Verdict::Unknown("a pulled-back equation is a nonzero constant on this fiber".into());
        return Ok(report);
    }
    let mut cons = rho.affine_domain(kq)?;
    if budget.closed {
        for c in &mut cons {
            c.2 = false;
        }
    }
    let Some(geo) = DomainGeometry::new(rho.n_aux(), cons) else {
        report.verdict = Verdict::Unknown("auxiliary domain is empty".into());
        return Ok(report);
    };
    let fiber = Fiber {
        g,
        kq,
        ghat,
        rho,
        closed: budget.closed,
        tol: budget.tol,
        n_k: rho.n_k,
    };
    // domain vertices are admissible points in the closed regime; test them exactly
    if budget.closed || rho.n_aux() == 0 {
        for v in geo.vertex_points(4096) {
            let full: Vec<Q> = kq.iter().cloned().chain(v.iter().cloned()).collect();
            if gens.iter().all(|p| p.eval(&full).is_zero()) {
                if let Some(w) = fiber.witness_exact(&v, "domain vertex") {
                    report.verdict = Verdict::CertifiedYes(Box::new(w));
                    return Ok(report);
                }
            }
        }
    }
    if rho.n_aux() == 0 {
        report.verdict =
            Verdict::Unknown("no auxiliary freedom and the toric equations fail".into());
        return Ok(report);
    }
    let compiled: Vec<CompiledPoly> = gens.iter().map(SparsePoly::compile).collect();
    let scale = geometric_mean(kq);
    let seed = budget.seed;
    let samples: Vec<Option<(Vec<f64>, Vec<f64>)>> = (0..budget.samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let t = geo.sample(&mut rng, scale);
            if !geo.contains_f64(&t, budget.closed) || !fiber.target_rates_ok(&t) {
                return None;
            }
            let x = fiber.full(&t);
            let vals: Vec<f64> = compiled.iter().map(|p| normalized(p, &x)).collect();
            vals.iter().all(|v| v.is_finite()).then_some((t, vals))
        })
        .collect();
    report.samples_used = budget.samples;
    let mut pts: Vec<(Vec<f64>, Vec<f64>)> = samples.into_iter().flatten().collect();
    if budget.closed {
        for v in geo.vertex_points(256) {
            let t: Vec<f64> = v.iter().map(to_f64).collect();
            if fiber.target_rates_ok(&t) {
                let x = fiber.full(&t);
                let vals = compiled.iter().map(|p| normalized(p, &x)).collect();
                pts.push((t, vals));
            }
        }
    }
    if gens.is_empty() {
        for (t, _) in pts.iter().take(16) {
            if let Some(w) = fiber.witness(t, "any domain point") {
                report.verdict = Verdict::CertifiedYes(Box::new(w));
                return Ok(report);
            }
        }
        report.verdict = Verdict::Unknown("no admissible sample verified".into());
        return Ok(report);
    }
    if compiled.len() == 1 {
        let p = &compiled[0];
        let pos: Vec<&Vec<f64>> = pts
            .iter()
            .filter(|(_, v)| v[0] > 0.0)
            .map(|(t, _)| t)
            .collect();
        let neg: Vec<&Vec<f64>> = pts
            .iter()
            .filter(|(_, v)| v[0] < 0.0)
            .map(|(t, _)| t)
            .collect();
        for (t, v) in &pts {
            if v[0] == 0.0 {
                if let Some(w) = fiber.witness(t, "sample root") {
                    report.verdict = Verdict::CertifiedYes(Box::new(w));
                    return Ok(report);
                }
            }
        }
        if pos.is_empty() || neg.is_empty() {
            report.verdict = Verdict::Unknown(format!(
                "no sign change among {} admissible samples ({} positive, {} negative)",
                pts.len(),
                pos.len(),
                neg.len()
            ));
            return Ok(report);
        }
        for j in 0..32.min(pos.len().max(neg.len())) {
            let a = pos[j % pos.len()];
            let b = neg[(j * 7) % neg.len()];
            let t = bisect(p, &fiber, a, b);
            if let Some(w) = fiber.witness(&t, "bisection") {
                report.verdict = Verdict::CertifiedYes(Box::new(w));
                return Ok(report);
            }
        }
        report.verdict = Verdict::Unknown("bracketed roots failed verification".into());
        return Ok(report);
    }
    // several equations: damped Gauss-Newton from the best samples
    let derivs: Vec<Vec<CompiledPoly>> = gens
        .iter()
        .map(|p| {
            (rho.n_k..rho.vars.len())
                .map(|i| p.derivative(i).compile())
                .collect()
        })
        .collect();
    let mut order: Vec<usize> = (0..pts.len()).collect();
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>();
    order.sort_by(|&i, &j| norm(&pts[i].1).total_cmp(&norm(&pts[j].1)));
    for &i in order.iter().take(16) {
        if let Some(t) =
            levenberg_marquardt(&compiled, &derivs, &fiber, &geo, budget.closed, &pts[i].0)
        {
            if let Some(w) = fiber.witness(&t, "damped root solve") {
                report.verdict = Verdict::CertifiedYes(Box::new(w));
                return Ok(report);
            }
        }
    }
    report.verdict = Verdict::Unknown("no simultaneous root found within the budget".into());
    Ok(report)
}

fn geometric_mean(k: &[Q]) -> f64 {
    let logs: Vec<f64> = k
        .iter()
        .map(to_f64)
        .filter(|&x| x > 0.0)
        .map(f64::ln)
        .collect();
    if logs.is_empty() {
        1.0
    } else {
        (logs.iter().sum::<f64>() / logs.len() as f64).exp()
    }
}

/// Bisection on the segment from `a` (positive value) to `b` (negative value).
fn bisect(p: &CompiledPoly, fiber: &Fiber, a: &[f64], b: &[f64]) -> Vec<f64> {
    let at = |s: f64| -> Vec<f64> { a.iter().zip(b).map(|(x, y)| x + s * (y - x)).collect() };
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = p.eval(&fiber.full(&at(mid)));
        if v == 0.0 {
            return at(mid);
        }
        if v > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (pl, ph) = (at(lo), at(hi));
    if p.eval(&fiber.full(&pl)).abs() <= p.eval(&fiber.full(&ph)).abs() {
        pl
    } else {
        ph
    }
}

fn levenberg_marquardt(
    gens: &[CompiledPoly],
    derivs: &[Vec<CompiledPoly>],
    fiber: &Fiber,
    geo: &DomainGeometry,
    closed: bool,
    start: &[f64],
) -> Option<Vec<f64>> {
    let m = start.len();
    let mut t = start.to_vec();
    let resid = |t: &[f64]| -> (Vec<f64>, Vec<f64>) {
        let x = fiber.full(t);
        let mags: Vec<f64> = gens
            .iter()
            .map(|p| p.magnitude(&x).max(f64::MIN_POSITIVE))
            .collect();
        (
            gens.iter()
                .zip(&mags)
                .map(|(p, s)| p.eval(&x) / s)
                .collect(),
            mags,
        )
    };
    let (mut r, mut mags) = resid(&t);
    let mut cost: f64 = r.iter().map(|x| x * x).sum();
    let mut mu = 1e-3;
    for _ in 0..200 {
        if cost < 1e-30 {
            break;
        }
        let x = fiber.full(&t);
        let jac: Vec<Vec<f64>> = derivs
            .iter()
            .zip(&mags)
            .map(|(row, s)| row.iter().map(|d| d.eval(&x) / s).collect())
            .collect();
        let mut jtj = vec![vec![0.0; m]; m];
        let mut jtr = vec![0.0; m];
        for (row, ri) in jac.iter().zip(&r) {
            for a in 0..m {
                jtr[a] -= row[a] * ri;
                for b in 0..m {
                    jtj[a][b] += row[a] * row[b];
                }
            }
        }
        let mut improved = false;
        for _ in 0..20 {
            let mut a = jtj.clone();
            for (i, row) in a.iter_mut().enumerate() {
                row[i] += mu * (1.0 + jtj[i][i]);
            }
            let Some(step) = solve_dense(a, jtr.clone()) else {
                mu *= 10.0;
                continue;
            };
            let cand: Vec<f64> = t.iter().zip(&step).map(|(x, s)| x + s).collect();
            if geo.contains_f64(&cand, closed) && fiber.target_rates_ok(&cand) {
                let (rc, mc) = resid(&cand);
                let c: f64 = rc.iter().map(|x| x * x).sum();
                if c < cost {
                    t = cand;
                    r = rc;
                    mags = mc;
                    cost = c;
                    mu = (mu * 0.3).max(1e-12);
                    improved = true;
                    break;
                }
            }
            mu *= 10.0;
        }
        if !improved {
            break;
        }
    }
    (cost < 1e-24).then_some(t)
}

/// Searches all realizations on subgraphs of the complete graph on the
/// sources of `g`.
pub fn subgraph_union_sweep(
    g: &EGraph,
    k: &RateAssignment,
    budget: &Budget,
) -> Result<SearchReport> {
    const MAX_SOURCES: usize = 5;
    let sources = g.sources();
    if sources.len() > MAX_SOURCES {
        return Err(Error::Unsupported(format!(
            "{} sources; the complete source graph is built only for at most {MAX_SOURCES}",
            sources.len()
        )));
    }
    let points = sources.iter().map(|&s| g.vertex(s).clone()).collect();
    let gcomp = EGraph::complete(points)?;
    let closed = Budget {
        closed: true,
        ..budget.clone()
    };
    disguised_search(g, k, &gcomp, None, &closed)
}
