//! Mass-action parametrizations: maps from (rates of G, auxiliary
//! coordinates) to rates on a second graph that generate the same system.

use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::balance::toric_ideal;
use crate::error::{Error, Result};
use crate::linalg::QMatrix;
use crate::massaction::net_vectors_symbolic;
use crate::model::EGraph;
use crate::poly::SparsePoly;
use crate::rational::{from_f64, q, qr, to_f64, Q};

use super::cone::subsets;
use super::domain::DomainGeometry;
use super::family::RectangleShape;

/// `expr > 0` (strict) or `expr >= 0`, affine in the auxiliary variables.
#[derive(Clone, Debug)]
pub struct Constraint {
    pub expr: SparsePoly,
    pub strict: bool,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ParamFlags {
    pub mass_action_faithful: bool,
    pub dynamically_complete: Option<bool>,
    pub target_surjective: Option<bool>,
    pub surjective: Option<bool>,
    /// Flags follow from the construction rather than from sampling alone.
    pub proven: bool,
}

/// Rates on the target graph as `numerators[e] / denominator`, polynomials in
/// `vars`. The first `n_k` variables are the rates of the source graph in
/// edge order; the rest are auxiliary.
#[derive(Clone, Debug)]
pub struct Parametrization {
    pub name: String,
    pub vars: Arc<Vec<String>>,
    pub n_k: usize,
    pub numerators: Vec<SparsePoly>,
    /// Positive on the domain.
    pub denominator: SparsePoly,
    pub domain: Vec<Constraint>,
    pub flags: ParamFlags,
}

impl Parametrization {
    pub fn n_aux(&self) -> usize {
        self.vars.len() - self.n_k
    }

    pub fn aux_names(&self) -> &[String] {
        &self.vars[self.n_k..]
    }

    fn point(&self, k: &[Q], aux: &[Q]) -> Vec<Q> {
        k.iter().chain(aux).cloned().collect()
    }

    /// Exact target rates; `None` where the denominator vanishes.
    pub fn eval(&self, k: &[Q], aux: &[Q]) -> Option<Vec<Q>> {
        let p = self.point(k, aux);
        let d = self.denominator.eval(&p);
        if d.is_zero() {
            return None;
        }
        Some(self.numerators.iter().map(|n| n.eval(&p) / &d).collect())
    }

    pub fn eval_f64(&self, k: &[f64], aux: &[f64]) -> Vec<f64> {
        let p: Vec<f64> = k.iter().chain(aux).copied().collect();
        let d = self.denominator.eval_f64(&p);
        self.numerators.iter().map(|n| n.eval_f64(&p) / d).collect()
    }

    /// Domain constraints with the rates fixed, as `(constant, aux coefficients, strict)`.
    pub fn affine_domain(&self, k: &[Q]) -> Result<Vec<(Q, Vec<Q>, bool)>> {
        let assign: Vec<(usize, Q)> = k.iter().cloned().enumerate().collect();
        let m = self.n_aux();
        let mut out = Vec::new();
        for c in &self.domain {
            let p = c.expr.partial_eval(&assign);
            let mut coef = vec![Q::zero(); m];
            let mut cst = Q::zero();
            for (e, v) in p.terms() {
                let deg: u32 = e.iter().sum();
                match deg {
                    0 => cst += v,
                    1 => {
                        let i = e.iter().position(|&x| x == 1).unwrap();
                        coef[i - self.n_k] += v;
                    }
                    _ => {
                        return Err(Error::Unsupported(format!(
                            "domain constraint {} is not affine",
                            c.expr
                        )))
                    }
                }
            }
            out.push((cst, coef, c.strict));
        }
        Ok(out)
    }
}

fn var_list(g: &EGraph, aux: &[&str]) -> Arc<Vec<String>> {
    let mut v = g.rate_names();
    v.extend(aux.iter().map(|s| s.to_string()));
    Arc::new(v)
}

fn constant(vars: &Arc<Vec<String>>, c: Q) -> SparsePoly {
    SparsePoly::constant(vars, c)
}

fn find_vertex(g: &EGraph, coords: &[Q]) -> Option<usize> {
    g.vertices().iter().position(|v| v.coords() == coords)
}

/// Edge of `ghat` between the vertices of `g` with indices `s`, `t`.
fn map_edge(g: &EGraph, ghat: &EGraph, s: usize, t: usize) -> Option<usize> {
    let hs = find_vertex(ghat, g.vertex(s).coords())?;
    let ht = find_vertex(ghat, g.vertex(t).coords())?;
    ghat.edge_index(hs, ht)
}

/// k = G: no auxiliary coordinates.
pub fn identity_parametrization(g: &EGraph, ghat: &EGraph) -> Result<Parametrization> {
    let vars = var_list(g, &[]);
    let mut numerators = vec![SparsePoly::zero(&vars); ghat.num_edges()];
    for (e, &(s, t)) in g.edges().iter().enumerate() {
        let h = map_edge(g, ghat, s, t).ok_or_else(|| {
            Error::Unsupported("identity map needs every edge of G in the target graph".into())
        })?;
        numerators[h] = SparsePoly::var(&vars, e);
    }
    Ok(Parametrization {
        name: "identity".into(),
        vars: vars.clone(),
        n_k: g.num_edges(),
        numerators,
        denominator: constant(&vars, Q::one()),
        domain: Vec::new(),
        flags: ParamFlags {
            mass_action_faithful: true,
            dynamically_complete: Some(true),
            target_surjective: Some(true),
            surjective: Some(true),
            proven: true,
        },
    })
}

/// Three collinear vertices `(2,0), (1,1), (0,2)` up to translation; any edge
/// set on them. The target graph must be the complete graph on the same
/// vertices. `mirror` swaps the roles of the two end vertices, which is needed
/// when the middle vertex points toward the third one.
pub fn triangle_parametrization(
    g: &EGraph,
    ghat: &EGraph,
    mirror: bool,
) -> Result<Parametrization> {
    let order = triangle_order(g)?;
    let vars = var_list(g, &["a", "b", "c"]);
    let sigma = |i: usize| if mirror { order[2 - i] } else { order[i] };
    let rate = |i: usize, j: usize| -> SparsePoly {
        match g.edge_index(sigma(i), sigma(j)) {
            Some(e) => SparsePoly::var(&vars, e),
            None => SparsePoly::zero(&vars),
        }
    };
    let c = |x: Q| constant(&vars, x);
    let one = c(Q::one());
    let (a, b, cc) = (
        SparsePoly::named(&vars, "a"),
        SparsePoly::named(&vars, "b"),
        SparsePoly::named(&vars, "c"),
    );
    // reduced rates of the one-reaction-per-source cycle
    let k1s = rate(0, 1).add(&rate(0, 2).scale(&q(2))).scale(&qr(1, 2));
    let k2s = rate(1, 0).sub(&rate(1, 2));
    let k3s = rate(2, 1).add(&rate(2, 0).scale(&q(2)));
    let pa = one.add(&a);
    let pc = one.add(&cc);
    let denominator = pa.mul(&pc).scale(&q(2));
    let mut numerators = vec![SparsePoly::zero(&vars); ghat.num_edges()];
    let mut put = |i: usize, j: usize, p: SparsePoly| -> Result<()> {
        let e = map_edge(g, ghat, sigma(i), sigma(j)).ok_or_else(|| {
            Error::Unsupported(
                "target graph must be the complete graph on the three vertices".into(),
            )
        })?;
        numerators[e] = p;
        Ok(())
    };
    put(2, 1, pc.mul(&k3s).scale(&q(2)))?;
    put(2, 0, a.mul(&pc).mul(&k3s))?;
    put(1, 0, denominator.mul(&k2s.add(&b)))?;
    put(1, 2, denominator.mul(&b))?;
    put(0, 1, cc.mul(&pa).mul(&k1s).scale(&q(4)))?;
    put(0, 2, pa.mul(&k1s).scale(&q(2)))?;
    if ghat.num_edges() != 6 {
        return Err(Error::Unsupported(
            "target graph must be the complete graph on the three vertices".into(),
        ));
    }
    let domain = ["a", "b", "c"]
        .iter()
        .map(|n| Constraint {
            expr: SparsePoly::named(&vars, n),
            strict: true,
        })
        .collect();
    Ok(Parametrization {
        name: if mirror {
            "triangle-mirrored".into()
        } else {
            "triangle".into()
        },
        vars,
        n_k: g.num_edges(),
        numerators,
        denominator,
        domain,
        flags: ParamFlags {
            mass_action_faithful: true,
            dynamically_complete: None,
            target_surjective: None,
            surjective: None,
            proven: true,
        },
    })
}

/// Vertex indices ordered as `(2,0), (1,1), (0,2)` after translation.
fn triangle_order(g: &EGraph) -> Result<[usize; 3]> {
    let bad = || {
        Error::Unsupported(
            "expected three vertices on a line x1 + x2 = const with unit spacing".into(),
        )
    };
    if g.dim() != 2 || g.num_vertices() != 3 {
        return Err(bad());
    }
    let mut idx: Vec<usize> = (0..3).collect();
    idx.sort_by(|&i, &j| g.vertex(j).coords()[0].cmp(&g.vertex(i).coords()[0]));
    let v: Vec<&[Q]> = idx.iter().map(|&i| g.vertex(i).coords()).collect();
    for w in v.windows(2) {
        if &w[0][0] - &w[1][0] != q(1) || &w[1][1] - &w[0][1] != q(1) {
            return Err(bad());
        }
    }
    Ok([idx[0], idx[1], idx[2]])
}

/// The inward-diagonal rectangle split over the complete graph on its
/// corners. With symbolic `alpha`/`beta` this is the generic form; the
/// specialized form substitutes the shape of a concrete network.
pub fn rectangle_map(
    vars: &Arc<Vec<String>>,
    k: [SparsePoly; 4],
    alpha: &SparsePoly,
    beta: &SparsePoly,
) -> Vec<SparsePoly> {
    let [a, b, c, d] = ["a", "b", "c", "d"].map(|n| SparsePoly::named(vars, n));
    let [k1, k2, k3, k4] = k;
    // edges in the order 12 13 14 21 23 24 31 32 34 41 42 43
    vec![
        k1.mul(&alpha.sub(&a)),
        k1.mul(&a),
        k1.mul(&beta.sub(&a)),
        k2.mul(&alpha.sub(&b)),
        k2.mul(&beta.sub(&b)),
        k2.mul(&b),
        k3.mul(&c),
        k3.mul(&beta.sub(&c)),
        k3.mul(&alpha.sub(&c)),
        k4.mul(&beta.sub(&d)),
        k4.mul(&d),
        k4.mul(&alpha.sub(&d)),
    ]
}

/// Variables `k1..k4, alpha, beta, a, b, c, d` and the symbolic rectangle map.
pub fn rectangle_symbolic() -> (Arc<Vec<String>>, Vec<SparsePoly>) {
    let vars: Arc<Vec<String>> = Arc::new(
        ["k1", "k2", "k3", "k4", "alpha", "beta", "a", "b", "c", "d"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
    );
    let k = [0, 1, 2, 3].map(|i| SparsePoly::var(&vars, i));
    let map = rectangle_map(
        &vars,
        k,
        &SparsePoly::named(&vars, "alpha"),
        &SparsePoly::named(&vars, "beta"),
    );
    (vars, map)
}

pub fn rectangle_parametrization(
    g: &EGraph,
    shape: &RectangleShape,
    ghat: &EGraph,
) -> Result<Parametrization> {
    let vars = var_list(g, &["a", "b", "c", "d"]);
    let k = [0, 1, 2, 3].map(|i| SparsePoly::var(&vars, shape.corner_edges[i]));
    let alpha = constant(&vars, shape.alpha.clone());
    let beta = constant(&vars, shape.beta.clone());
    let map = rectangle_map(&vars, k, &alpha, &beta);
    let mut numerators = vec![SparsePoly::zero(&vars); ghat.num_edges()];
    let pairs = [
        (0, 1),
        (0, 2),
        (0, 3),
        (1, 0),
        (1, 2),
        (1, 3),
        (2, 0),
        (2, 1),
        (2, 3),
        (3, 0),
        (3, 1),
        (3, 2),
    ];
    if ghat.num_edges() != 12 {
        return Err(Error::Unsupported(
            "target graph must be the complete graph on the four corners".into(),
        ));
    }
    for (p, (i, j)) in map.into_iter().zip(pairs) {
        let e = map_edge(g, ghat, shape.corners[i], shape.corners[j]).ok_or_else(|| {
            Error::Unsupported("target graph must be the complete graph on the four corners".into())
        })?;
        numerators[e] = p;
    }
    let m = if shape.alpha < shape.beta {
        shape.alpha.clone()
    } else {
        shape.beta.clone()
    };
    let mut domain = Vec::new();
    for n in ["a", "b", "c", "d"] {
        let v = SparsePoly::named(&vars, n);
        domain.push(Constraint {
            expr: v.clone(),
            strict: true,
        });
        domain.push(Constraint {
            expr: constant(&vars, m.clone()).sub(&v),
            strict: true,
        });
    }
    Ok(Parametrization {
        name: "rectangle".into(),
        vars: vars.clone(),
        n_k: g.num_edges(),
        numerators,
        denominator: constant(&vars, Q::one()),
        domain,
        flags: ParamFlags {
            mass_action_faithful: true,
            dynamically_complete: Some(true),
            target_surjective: Some(true),
            surjective: None,
            proven: true,
        },
    })
}

/// Nonnegative `lambda` with `cols * lambda = v`, found by trying column
/// subsets of increasing size.
fn nonneg_combination(cols: &[Vec<Q>], v: &[Q]) -> Option<Vec<Q>> {
    if v.iter().all(Zero::is_zero) {
        return Some(vec![Q::zero(); cols.len()]);
    }
    let dim = v.len();
    for size in 1..=cols.len().min(dim) {
        for s in subsets(cols.len(), size) {
            let sub: Vec<Vec<Q>> = s.iter().map(|&i| cols[i].clone()).collect();
            let m = QMatrix::from_columns(dim, &sub);
            if m.rank() < size {
                continue;
            }
            let Some(lam) = solve_full_column(&m, v) else {
                continue;
            };
            if lam.iter().all(|x| !x.is_negative()) {
                let mut out = vec![Q::zero(); cols.len()];
                for (i, l) in s.iter().zip(lam) {
                    out[*i] = l;
                }
                return Some(out);
            }
        }
    }
    None
}

/// Exact solution of an overdetermined consistent system with independent columns.
fn solve_full_column(m: &QMatrix, b: &[Q]) -> Option<Vec<Q>> {
    let n = m.cols();
    let mut aug: Vec<Vec<Q>> = (0..m.rows())
        .map(|i| {
            let mut r = m.row(i).to_vec();
            r.push(b[i].clone());
            r
        })
        .collect();
    let (r, piv) = QMatrix::from_rows(&aug).rref();
    if piv.contains(&n) {
        return None;
    }
    aug.clear();
    let mut x = vec![Q::zero(); n];
    for (i, &p) in piv.iter().enumerate() {
        x[p] = r[(i, n)].clone();
    }
    Some(x)
}

/// Fallback for arbitrary graphs: at each source, a particular nonnegative
/// split of every reaction of G over the target's reactions plus free
/// coordinates along the kernel of the target's reaction vectors there.
/// Faithful by construction; surjectivity is only sampled.
pub fn generic_parametrization(g: &EGraph, ghat: &EGraph) -> Result<Parametrization> {
    if g.dim() != ghat.dim() {
        return Err(Error::Dimension(format!(
            "{} vs {} species",
            g.dim(),
            ghat.dim()
        )));
    }
    let mut aux_names: Vec<String> = Vec::new();
    let mut blocks: Vec<(usize, Vec<usize>, Vec<Vec<Q>>)> = Vec::new();
    for s in ghat.sources() {
        let out = ghat.out_edges(s);
        let cols: Vec<Vec<Q>> = out
            .iter()
            .map(|&e| ghat.reaction_vector(e).coords().to_vec())
            .collect();
        let kernel = QMatrix::from_columns(ghat.dim(), &cols).nullspace();
        for j in 0..kernel.len() {
            aux_names.push(format!("t{}_{}", s + 1, j + 1));
        }
        blocks.push((s, out, kernel));
    }
    let aux_refs: Vec<&str> = aux_names.iter().map(String::as_str).collect();
    let vars = var_list(g, &aux_refs);
    let n_k = g.num_edges();
    let mut numerators = vec![SparsePoly::zero(&vars); ghat.num_edges()];
    let mut next_aux = n_k;
    for (s, out, kernel) in &blocks {
        let cols: Vec<Vec<Q>> = out
            .iter()
            .map(|&e| ghat.reaction_vector(e).coords().to_vec())
            .collect();
        if let Some(gs) = find_vertex(g, ghat.vertex(*s).coords()) {
            for e in g.out_edges(gs) {
                let v = g.reaction_vector(e);
                let lam = nonneg_combination(&cols, v.coords()).ok_or_else(|| {
                    Error::Unsupported(format!(
                        "reaction {} of G is not a nonnegative combination of the target's reactions at its source",
                        g.rate_name(e)
                    ))
                })?;
                let ke = SparsePoly::var(&vars, e);
                for (h, l) in out.iter().zip(&lam) {
                    if !l.is_zero() {
                        numerators[*h] = numerators[*h].add(&ke.scale(l));
                    }
                }
            }
        }
        for b in kernel {
            let t = SparsePoly::var(&vars, next_aux);
            next_aux += 1;
            for (h, bi) in out.iter().zip(b) {
                if !bi.is_zero() {
                    numerators[*h] = numerators[*h].add(&t.scale(bi));
                }
            }
        }
    }
    for s in g.sources() {
        if find_vertex(ghat, g.vertex(s).coords()).is_none() {
            return Err(Error::Unsupported(format!(
                "source {} of G is not a vertex of the target graph",
                g.vertex(s)
            )));
        }
    }
    let domain = numerators
        .iter()
        .map(|n| Constraint {
            expr: n.clone(),
            strict: true,
        })
        .collect();
    Ok(Parametrization {
        name: "generic".into(),
        vars: vars.clone(),
        n_k,
        numerators,
        denominator: constant(&vars, Q::one()),
        domain,
        flags: ParamFlags {
            mass_action_faithful: true,
            dynamically_complete: None,
            target_surjective: None,
            surjective: None,
            proven: false,
        },
    })
}

/// Exact identity `D * F_{G,k} = F_{Ghat, N}` with symbolic rates and aux.
pub fn check_faithful(rho: &Parametrization, g: &EGraph, ghat: &EGraph) -> Result<()> {
    if rho.numerators.len() != ghat.num_edges() {
        return Err(Error::Dimension(format!(
            "parametrization has {} components, target graph {} edges",
            rho.numerators.len(),
            ghat.num_edges()
        )));
    }
    if rho.n_k != g.num_edges() {
        return Err(Error::Dimension(format!(
            "parametrization expects {} rates, G has {}",
            rho.n_k,
            g.num_edges()
        )));
    }
    let kvars: Vec<SparsePoly> = (0..rho.n_k)
        .map(|e| SparsePoly::var(&rho.vars, e).mul(&rho.denominator))
        .collect();
    let lhs = if kvars.is_empty() {
        Default::default()
    } else {
        net_vectors_symbolic(g, &kvars)
    };
    let rhs = if rho.numerators.is_empty() {
        Default::default()
    } else {
        net_vectors_symbolic(ghat, &rho.numerators)
    };
    if lhs != rhs {
        let detail = lhs
            .keys()
            .chain(rhs.keys())
            .find(|y| lhs.get(*y) != rhs.get(*y))
            .map(|y| {
                format!(
                    "net reaction vectors differ at source {:?}",
                    y.iter().map(crate::rational::fmt_q).collect::<Vec<_>>()
                )
            })
            .unwrap_or_default();
        return Err(Error::NotFaithful(detail));
    }
    Ok(())
}

/// Evidence gathered by [`check_parametrization`].
#[derive(Clone, Debug, Serialize)]
pub struct ParamEvidence {
    pub mass_action_faithful: bool,
    pub samples: usize,
    /// Samples where rates on G reproducing the sampled target rates were found.
    pub completeness_hits: usize,
    /// Samples where auxiliary values mapping exactly onto the target rates were found.
    pub surjectivity_hits: usize,
    pub surjectivity_tested: bool,
    pub counterexamples: Vec<String>,
    pub warnings: Vec<String>,
}

impl ParamEvidence {
    pub fn dynamically_complete(&self) -> bool {
        self.completeness_hits == self.samples
    }

    pub fn target_surjective(&self) -> Option<bool> {
        self.surjectivity_tested
            .then_some(self.surjectivity_hits == self.samples)
    }
}

/// Hard faithfulness check plus sampled evidence. Samples target rates in the
/// image, moves them along the equidynamic directions of the target graph,
/// then tries to recover rates on G (completeness) and auxiliary values
/// (surjectivity) by linear solving.
pub fn check_parametrization(
    rho: &Parametrization,
    g: &EGraph,
    ghat: &EGraph,
    samples: usize,
    seed: u64,
) -> Result<ParamEvidence> {
    check_faithful(rho, g, ghat)?;
    let mut ev = ParamEvidence {
        mass_action_faithful: true,
        samples: 0,
        completeness_hits: 0,
        surjectivity_hits: 0,
        surjectivity_tested: false,
        counterexamples: Vec::new(),
        warnings: Vec::new(),
    };
    let linear_aux = rho.denominator.total_degree().unwrap_or(0) == 0
        && rho.numerators.iter().all(|n| {
            (rho.n_k..rho.vars.len()).all(|i| n.degree_in(i) <= 1) && aux_degree(rho, n) <= 1
        });
    ev.surjectivity_tested = linear_aux;
    if !linear_aux {
        ev.warnings.push(
            "map is not affine in the auxiliary coordinates; surjectivity not sampled".into(),
        );
    }
    let decomp = crate::massaction::source_decomposition(ghat);
    let mut tries = 0;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while ev.samples < samples && tries < samples * 50 {
        tries += 1;
        let k: Vec<Q> = (0..rho.n_k)
            .map(|_| from_f64(round_sample(rng.gen_range(0.2..5.0))))
            .collect();
        let Some(aux) = sample_domain_point(rho, &k, &mut rng) else {
            continue;
        };
        let Some(base) = rho.eval(&k, &aux) else {
            continue;
        };
        if base.iter().any(|x| !x.is_positive()) {
            continue;
        }
        // move within the equidynamic slice of the target graph, staying positive
        let t: Vec<Q> = (0..decomp.total_kernel_dim())
            .map(|_| from_f64(round_sample(rng.gen_range(-1.0..1.0))))
            .collect();
        let mut khat = decomp.perturb(&base, &t);
        let mut shrink = 0;
        while khat.iter().any(|x| !x.is_positive()) && shrink < 30 {
            let t2: Vec<Q> = t
                .iter()
                .map(|x| x / Q::from_integer((1i64 << (shrink + 1)).into()))
                .collect();
            khat = decomp.perturb(&base, &t2);
            shrink += 1;
        }
        if khat.iter().any(|x| !x.is_positive()) {
            continue;
        }
        ev.samples += 1;
        match recover_rates(g, ghat, &khat) {
            Some(kr) => {
                ev.completeness_hits += 1;
                if linear_aux {
                    if recover_joint(rho, &khat).is_some()
                        || recover_aux(rho, &kr, &khat).is_some()
                        || recover_aux(rho, &k, &khat).is_some()
                    {
                        ev.surjectivity_hits += 1;
                    } else if ev.counterexamples.len() < 5 {
                        ev.counterexamples.push(format!(
                            "no auxiliary values reach target rates [{}]",
                            khat.iter()
                                .map(crate::rational::fmt_q)
                                .collect::<Vec<_>>()
                                .join(", ")
                        ));
                    }
                }
            }
            None => {
                if ev.counterexamples.len() < 5 {
                    ev.counterexamples.push(format!(
                        "no rates on G reproduce target rates [{}]",
                        khat.iter()
                            .map(crate::rational::fmt_q)
                            .collect::<Vec<_>>()
                            .join(", ")
                    ));
                }
            }
        }
    }
    if ev.samples < samples {
        ev.warnings.push(format!(
            "only {} of {samples} samples landed in the domain",
            ev.samples
        ));
    }
    Ok(ev)
}

fn aux_degree(rho: &Parametrization, p: &SparsePoly) -> u32 {
    p.terms()
        .map(|(e, _)| e[rho.n_k..].iter().sum::<u32>())
        .max()
        .unwrap_or(0)
}

/// Rounds to a short binary fraction so exact arithmetic stays cheap.
fn round_sample(x: f64) -> f64 {
    (x * 1024.0).round() / 1024.0
}

/// A random point strictly inside the domain for fixed rates; `None` after a
/// bounded number of tries.
fn sample_domain_point(rho: &Parametrization, k: &[Q], rng: &mut ChaCha8Rng) -> Option<Vec<Q>> {
    let geo = DomainGeometry::new(rho.n_aux(), rho.affine_domain(k).ok()?)?;
    for _ in 0..50 {
        let aux: Vec<Q> = geo
            .sample(rng, 1.0)
            .into_iter()
            .map(|x| from_f64(round_sample(x)))
            .collect();
        if geo.contains(&aux, false) {
            return Some(aux);
        }
    }
    None
}

/// Nonnegative rates on G with the same net reaction vectors as `khat`.
fn recover_rates(g: &EGraph, ghat: &EGraph, khat: &[Q]) -> Option<Vec<Q>> {
    let target = crate::massaction::net_vectors(ghat, khat);
    let mut k = vec![Q::zero(); g.num_edges()];
    for (y, net) in &target {
        let s = find_vertex(g, y)?;
        let out = g.out_edges(s);
        let cols: Vec<Vec<Q>> = out
            .iter()
            .map(|&e| g.reaction_vector(e).coords().to_vec())
            .collect();
        let lam = nonneg_combination(&cols, net)?;
        for (e, l) in out.iter().zip(lam) {
            k[*e] = l;
        }
    }
    Some(k)
}

/// Rates and auxiliary values together, for maps linear in all variables.
fn recover_joint(rho: &Parametrization, khat: &[Q]) -> Option<(Vec<Q>, Vec<Q>)> {
    if rho
        .numerators
        .iter()
        .any(|n| n.total_degree().unwrap_or(0) > 1)
    {
        return None;
    }
    let nv = rho.vars.len();
    let mut aug: Vec<Vec<Q>> = Vec::new();
    for (n, target) in rho.numerators.iter().zip(khat) {
        let mut row = vec![Q::zero(); nv + 1];
        let mut cst = Q::zero();
        for (e, v) in n.terms() {
            match e.iter().position(|&x| x > 0) {
                None => cst += v,
                Some(i) => row[i] += v,
            }
        }
        row[nv] = target - cst;
        aug.push(row);
    }
    let (r, piv) = QMatrix::from_rows(&aug).rref();
    if piv.contains(&nv) {
        return None;
    }
    let mut x = vec![Q::zero(); nv];
    for (i, &p) in piv.iter().enumerate() {
        x[p] = r[(i, nv)].clone();
    }
    let (k, _) = x.split_at(rho.n_k);
    if k.iter().any(|v| v.is_negative()) {
        return None;
    }
    recover_aux(rho, k, khat).map(|a| (k.to_vec(), a))
}

/// Auxiliary values with `rho(k, aux) = khat`, for maps affine in aux with unit denominator.
fn recover_aux(rho: &Parametrization, k: &[Q], khat: &[Q]) -> Option<Vec<Q>> {
    let m = rho.n_aux();
    let assign: Vec<(usize, Q)> = k.iter().cloned().enumerate().collect();
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for (n, target) in rho.numerators.iter().zip(khat) {
        let p = n.partial_eval(&assign);
        let mut row = vec![Q::zero(); m];
        let mut cst = Q::zero();
        for (e, v) in p.terms() {
            match e.iter().position(|&x| x > 0) {
                None => cst += v,
                Some(i) => row[i - rho.n_k] += v,
            }
        }
        rows.push(row);
        rhs.push(target - cst);
    }
    let aux = if m == 0 {
        Vec::new()
    } else {
        let mut aug: Vec<Vec<Q>> = rows.clone();
        for (r, b) in aug.iter_mut().zip(&rhs) {
            r.push(b.clone());
        }
        let (r, piv) = QMatrix::from_rows(&aug).rref();
        if piv.contains(&m) {
            return None;
        }
        let mut x = vec![Q::zero(); m];
        for (i, &p) in piv.iter().enumerate() {
            x[p] = r[(i, m)].clone();
        }
        x
    };
    let back = rho.eval(k, &aux)?;
    if back != khat {
        return None;
    }
    let dom = rho.affine_domain(k).ok()?;
    let inside = dom.iter().all(|(c, coef, strict)| {
        let v = coef
            .iter()
            .zip(&aux)
            .fold(c.clone(), |acc, (a, x)| acc + a * x);
        if *strict {
            v.is_positive()
        } else {
            !v.is_negative()
        }
    });
    inside.then_some(aux)
}

/// Pullback of the toric equations of `ghat` through `rho`.
#[derive(Clone, Debug)]
pub struct Pullback {
    /// Generators composed with the numerators: `gen(N) = D^deg * gen(khat)`.
    pub generators: Vec<SparsePoly>,
    pub degrees: Vec<u32>,
    /// The positive denominator that was cleared, raised per generator to its degree.
    pub cleared: SparsePoly,
}

pub fn pullback_toric(rho: &Parametrization, ghat: &EGraph) -> Result<Pullback> {
    if !ghat.is_weakly_reversible() {
        return Err(Error::NotWeaklyReversible);
    }
    if rho.numerators.len() != ghat.num_edges() {
        return Err(Error::Dimension(
            "parametrization does not match the target graph".into(),
        ));
    }
    let ideal = toric_ideal(ghat)?;
    let mut generators = Vec::new();
    let mut degrees = Vec::new();
    for gen in &ideal.generators {
        let d = gen.total_degree().unwrap_or(0);
        let mut p = gen.compose(&rho.numerators);
        if !gen.is_homogeneous() {
            // scale inhomogeneous parts so the cleared factor is uniform
            p = SparsePoly::zero(&rho.vars);
            for (e, c) in gen.terms() {
                let deg: u32 = e.iter().sum();
                let mono =
                    SparsePoly::monomial(gen.vars(), e.clone(), c.clone()).compose(&rho.numerators);
                p = p.add(&mono.mul(&rho.denominator.pow(d - deg)));
            }
        }
        generators.push(p);
        degrees.push(d);
    }
    Ok(Pullback {
        generators,
        degrees,
        cleared: rho.denominator.clone(),
    })
}

/// Float values of the target rates, for reporting.
pub fn eval_rates_f64(rho: &Parametrization, k: &[Q], aux: &[f64]) -> Vec<f64> {
    let kf: Vec<f64> = k.iter().map(to_f64).collect();
    rho.eval_f64(&kf, aux)
}
