//! The `dtoric` command line.

use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::balance::{
    complex_balance_residual, complex_balanced_point, detailed_balance_residual, in_toric_locus,
    is_complex_balanced_at, toric_ideal,
};
use crate::chambers::{
    classify_chamber, discriminant_report, is_disguised_toric_quadrilateral, line_reduce,
    ngon_disguised_certificate, quadrilateral_certificate, segre_test, LineCertificate,
};
use crate::disguised::{disguised_search, Budget, SearchReport, Verdict};
use crate::dynamics::{integrate_rhs, multistationarity_probe};
use crate::error::{Error, Result};
use crate::massaction::{species_names, Rhs};
use crate::model::{EGraph, RateAssignment};
use crate::network_io::{network_to_json, read_network, Network};
use crate::poly::SparsePoly;
use crate::rational::{fmt_q, Q};

#[derive(Parser, Debug)]
#[command(
    name = "dtoric",
    version,
    about = "Analyze mass-action reaction networks"
)]
pub struct Cli {
    /// Numeric tolerance for balance checks and witnesses.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Structure of the network and its mass-action system.
    Analyze { input: PathBuf },
    /// Tree constants and the binomial equations of the toric locus.
    ToricIdeal { input: PathBuf },
    /// Complex and detailed balance at a state (or at a computed candidate).
    CheckBalance {
        input: PathBuf,
        /// Comma-separated positive state.
        #[arg(long)]
        x0: Option<String>,
    },
    /// Chamber of a line network, with certificates where available.
    Chamber { input: PathBuf },
    /// Search for a complex balanced realization.
    Disguised {
        input: PathBuf,
        /// `complete` (complete graph on the sources) or a network file.
        #[arg(long, default_value = "complete")]
        ghat: String,
        /// Allow vanishing rates on the target graph.
        #[arg(long)]
        closed: bool,
        /// Number of auxiliary samples.
        #[arg(long, default_value_t = 4000)]
        budget: usize,
    },
    /// Integrate the system (CSV), or probe a line network for multiple equilibria.
    Simulate {
        input: PathBuf,
        #[arg(long)]
        x0: Option<String>,
        #[arg(long, default_value_t = 50.0)]
        t_end: f64,
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
        /// Keep every k-th step.
        #[arg(long, default_value_t = 1)]
        every: usize,
        /// Run this many seeded trajectories on a line network and cluster endpoints.
        #[arg(long)]
        probe: Option<usize>,
        /// Conserved total x1 + x2 for the probe.
        #[arg(long, default_value_t = 2.0)]
        total: f64,
    },
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli) {
        Ok(text) => {
            let written = match &cli.output {
                Some(path) => std::fs::write(path, text.as_bytes())
                    .map_err(|e| format!("{}: {e}", path.display())),
                None => std::io::stdout()
                    .write_all(text.as_bytes())
                    .map_err(|e| e.to_string()),
            };
            match written {
                Ok(()) => 0,
                Err(e) => {
                    eprintln!("error: {e}");
                    1
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

/// Runs a parsed command and returns the report text.
pub fn execute(cli: &Cli) -> Result<String> {
    match &cli.command {
        Command::Analyze { input } => emit(cli, analyze(&load(input)?)?),
        Command::ToricIdeal { input } => emit(cli, toric(&load(input)?)?),
        Command::CheckBalance { input, x0 } => {
            emit(cli, check_balance(&load(input)?, x0.as_deref(), cli.tol)?)
        }
        Command::Chamber { input } => emit(cli, chamber(&load(input)?, cli.tol)?),
        Command::Disguised {
            input,
            ghat,
            closed,
            budget,
        } => {
            let b = Budget {
                samples: *budget,
                seed: cli.seed,
                tol: cli.tol,
                closed: *closed,
            };
            emit(cli, disguised(&load(input)?, ghat, &b)?)
        }
        Command::Simulate {
            input,
            x0,
            t_end,
            dt,
            every,
            probe,
            total,
        } => {
            let loaded = load(input)?;
            match probe {
                Some(trials) => emit(cli, probe_report(&loaded, *total, *trials, cli.seed)?),
                None => {
                    if matches!(cli.format, Some(Format::Json) | Some(Format::Text)) {
                        return Err(Error::Unsupported(
                            "simulate writes CSV; use --probe for a JSON report".into(),
                        ));
                    }
                    simulate(&loaded, x0.as_deref(), *t_end, *dt, *every)
                }
            }
        }
    }
}

struct Loaded {
    net: Network,
    sha: String,
}

fn load(path: &std::path::Path) -> Result<Loaded> {
    let (net, bytes) = read_network(path)?;
    let sha = hex::encode(Sha256::digest(&bytes));
    Ok(Loaded { net, sha })
}

fn rates(l: &Loaded) -> Result<&RateAssignment> {
    l.net
        .rates
        .as_ref()
        .ok_or_else(|| Error::Rates("this command needs a rate on every edge".into()))
}

fn emit(cli: &Cli, report: Value) -> Result<String> {
    match cli.format.unwrap_or(Format::Json) {
        Format::Json => Ok(serde_json::to_string_pretty(&report).expect("serializable") + "\n"),
        Format::Text => Ok(text_report(&report, "")),
        Format::Csv => Err(Error::Unsupported(
            "CSV output is only produced by simulate".into(),
        )),
    }
}

/// Indented `key: value` lines.
fn text_report(v: &Value, indent: &str) -> String {
    let mut out = String::new();
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                match x {
                    Value::Object(_) | Value::Array(_) if !is_flat(x) => {
                        out.push_str(&format!("{indent}{k}:\n"));
                        out.push_str(&text_report(x, &format!("{indent}  ")));
                    }
                    _ => out.push_str(&format!("{indent}{k}: {}\n", scalar(x))),
                }
            }
        }
        Value::Array(a) => {
            for x in a {
                if is_flat(x) {
                    out.push_str(&format!("{indent}- {}\n", scalar(x)));
                } else {
                    out.push_str(&format!("{indent}-\n"));
                    out.push_str(&text_report(x, &format!("{indent}  ")));
                }
            }
        }
        _ => out.push_str(&format!("{indent}{}\n", scalar(v))),
    }
    out
}

fn is_flat(v: &Value) -> bool {
    match v {
        Value::Array(a) => a.iter().all(|x| !x.is_array() && !x.is_object()),
        Value::Object(_) => false,
        _ => true,
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(a) => format!("[{}]", a.iter().map(scalar).collect::<Vec<_>>().join(", ")),
        other => other.to_string(),
    }
}

fn qs(v: &[Q]) -> Value {
    Value::Array(v.iter().map(|x| Value::String(fmt_q(x))).collect())
}

fn header(l: &Loaded) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("input_sha256".into(), json!(l.sha));
    m
}

fn vertex_name(g: &EGraph, i: usize) -> String {
    match g.labels() {
        Some(l) => l[i].clone(),
        None => format!("y{}", i + 1),
    }
}

/// `dx_i/dt` with the rates kept as symbols.
fn symbolic_system(g: &EGraph) -> Option<Vec<SparsePoly>> {
    let mut names: Vec<String> = species_names(g.dim()).to_vec();
    names.extend(g.rate_names());
    let vars = Arc::new(names);
    let n = g.dim();
    let mut f = vec![SparsePoly::zero(&vars); n];
    for (e, &(s, _)) in g.edges().iter().enumerate() {
        let mut exps = g.vertex(s).as_exponents()?;
        exps.resize(vars.len(), 0);
        exps[n + e] = 1;
        let mono = SparsePoly::monomial(&vars, exps, Q::from_integer(1.into()));
        for (i, c) in g.reaction_vector(e).coords().iter().enumerate() {
            f[i] = f[i].add(&mono.scale(c));
        }
    }
    Some(f)
}

fn analyze(l: &Loaded) -> Result<Value> {
    let g = &l.net.graph;
    let mut m = header(l);
    m.insert("species".into(), json!(g.dim()));
    m.insert("vertices".into(), json!(g.num_vertices()));
    m.insert("edges".into(), json!(g.num_edges()));
    let classes: Vec<Vec<String>> = g
        .linkage_classes()
        .iter()
        .map(|c| c.iter().map(|&i| vertex_name(g, i)).collect())
        .collect();
    m.insert("linkage_classes".into(), json!(classes));
    m.insert(
        "stoichiometric_dimension".into(),
        json!(g.stoichiometric_dimension()),
    );
    m.insert("deficiency".into(), json!(g.deficiency()));
    m.insert("weakly_reversible".into(), json!(g.is_weakly_reversible()));
    m.insert("reversible".into(), json!(g.is_reversible()));
    let mut src = g.sources();
    src.sort_unstable();
    let sources: Vec<String> = src.iter().map(|&i| vertex_name(g, i)).collect();
    m.insert("sources".into(), json!(sources));
    let system = match &l.net.rates {
        Some(k) => crate::massaction::generate_system(g, k)
            .ok()
            .map(|s| s.components),
        None => symbolic_system(g),
    };
    if let Some(f) = system {
        let lines: Vec<String> = f
            .iter()
            .enumerate()
            .map(|(i, p)| format!("dx{}/dt = {p}", i + 1))
            .collect();
        m.insert("system".into(), json!(lines));
    }
    Ok(Value::Object(m))
}

fn toric(l: &Loaded) -> Result<Value> {
    let g = &l.net.graph;
    let ideal = toric_ideal(g)?;
    let mut m = header(l);
    m.insert("weakly_reversible".into(), json!(g.is_weakly_reversible()));
    m.insert("deficiency".into(), json!(g.deficiency()));
    let mut trees = Map::new();
    for (i, p) in ideal.trees.constants.iter().enumerate() {
        trees.insert(format!("K{}", i + 1), json!(p.to_string()));
    }
    m.insert("tree_constants".into(), Value::Object(trees));
    let kernel: Vec<Vec<String>> = ideal
        .cayley_kernel
        .iter()
        .map(|v| v.iter().map(|x| x.to_string()).collect())
        .collect();
    m.insert("cayley_kernel".into(), json!(kernel));
    let gens: Vec<Value> = ideal
        .generators
        .iter()
        .map(|p| {
            json!({
                "degree": p.total_degree().unwrap_or(0),
                "terms": p.num_terms(),
                "polynomial": p.to_string(),
            })
        })
        .collect();
    m.insert("generators".into(), Value::Array(gens));
    if let Some(exact) = l.net.rates.as_ref().and_then(|k| k.as_exact()) {
        m.insert("in_toric_locus".into(), json!(in_toric_locus(g, exact)));
    }
    Ok(Value::Object(m))
}

fn parse_point(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::Format(format!("cannot parse state entry {t:?}")))
        })
        .collect()
}

fn check_balance(l: &Loaded, x0: Option<&str>, tol: f64) -> Result<Value> {
    let g = &l.net.graph;
    let k = rates(l)?;
    let kf = k.to_f64();
    let mut m = header(l);
    m.insert("tol".into(), json!(tol));
    let (x, source) = match x0 {
        Some(s) => (parse_point(s)?, "given"),
        None => match complex_balanced_point(g, &kf) {
            Some(x) => (x, "computed"),
            None => {
                m.insert("complex_balanced".into(), json!(false));
                m.insert(
                    "reason".into(),
                    json!("not weakly reversible on the support of the rates"),
                );
                return Ok(Value::Object(m));
            }
        },
    };
    if x.len() != g.dim() {
        return Err(Error::Dimension(format!(
            "state has {} entries, network {}",
            x.len(),
            g.dim()
        )));
    }
    m.insert("x0".into(), json!(x));
    m.insert("x0_source".into(), json!(source));
    m.insert(
        "complex_balanced".into(),
        json!(is_complex_balanced_at(g, k, &x, tol)?),
    );
    m.insert(
        "complex_balance_residual".into(),
        json!(complex_balance_residual(g, &kf, &x)),
    );
    if g.is_reversible() {
        let r = detailed_balance_residual(g, &kf, &x)?;
        m.insert("detailed_balanced".into(), json!(r <= tol));
        m.insert("detailed_balance_residual".into(), json!(r));
    }
    if let Some(exact) = k.as_exact() {
        m.insert("in_toric_locus".into(), json!(in_toric_locus(g, exact)));
    }
    Ok(Value::Object(m))
}

fn certificate_json(c: &LineCertificate) -> Value {
    let edges: Vec<Value> = c
        .graph
        .edges()
        .iter()
        .zip(&c.rates)
        .map(|(&(s, t), r)| json!({"from": s, "to": t, "rate": r}))
        .collect();
    json!({
        "construction": c.construction,
        "edges": edges,
        "relation": c.relation.fmt_with("t"),
        "ratio_convention": c.ratio_convention,
        "ratio": c.ratio,
        "x0": c.x0,
        "detailed_balance_residual": c.detailed_balance_residual(),
        "complex_balance_residual": c.complex_balance_residual(),
    })
}

fn chamber(l: &Loaded, _tol: f64) -> Result<Value> {
    let red = line_reduce(&l.net.graph, rates(l)?)?;
    let rep = classify_chamber(&red);
    let mut m = header(l);
    m.insert("n".into(), json!(red.n()));
    m.insert("signed".into(), qs(&red.signed));
    m.insert("kstar".into(), qs(&red.kstar));
    m.insert(
        "chamber".into(),
        serde_json::to_value(&rep).expect("serializable"),
    );
    let cert = if red.n() == 4 {
        m.insert("segre".into(), json!(segre_test(&red.kstar)));
        let d = discriminant_report(&red.kstar)?;
        m.insert(
            "discriminant".into(),
            json!({
                "delta": fmt_q(&d.delta),
                "boundary": d.boundary,
                "unique_equilibrium": d.unique_equilibrium,
                "positive_roots": d.positive_roots,
                "positive_roots_with_multiplicity": d.positive_roots_with_multiplicity,
                "consistent": d.consistent,
            }),
        );
        m.insert(
            "disguised_toric".into(),
            json!(is_disguised_toric_quadrilateral(&red)?),
        );
        quadrilateral_certificate(&red)?
    } else {
        ngon_disguised_certificate(&red)
    };
    m.insert(
        "certificate".into(),
        cert.as_ref().map(certificate_json).unwrap_or(Value::Null),
    );
    Ok(Value::Object(m))
}

fn disguised(l: &Loaded, ghat: &str, budget: &Budget) -> Result<Value> {
    let g = &l.net.graph;
    let k = rates(l)?;
    let target = if ghat == "complete" {
        let pts = g.sources().iter().map(|&s| g.vertex(s).clone()).collect();
        EGraph::complete(pts)?
    } else {
        read_network(std::path::Path::new(ghat))?.0.graph
    };
    let rep = disguised_search(g, k, &target, None, budget)?;
    let mut m = header(l);
    m.extend(report_json(&rep));
    m.insert("closed".into(), json!(budget.closed));
    Ok(Value::Object(m))
}

/// JSON form of a search report.
pub fn report_json(rep: &SearchReport) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("verdict".into(), json!(rep.verdict.tag()));
    match &rep.verdict {
        Verdict::CertifiedYes(w) => {
            let graph = match &w.exact_rates {
                Some(r) => network_to_json(&w.graph, Some(r)),
                None => {
                    let mut doc = network_to_json(&w.graph, None);
                    if let Some(edges) = doc["edges"].as_array_mut() {
                        for (e, r) in edges.iter_mut().zip(&w.rates) {
                            e["rate"] = json!(r);
                        }
                    }
                    doc
                }
            };
            let aux: Map<String, Value> = w
                .aux_names
                .iter()
                .cloned()
                .zip(w.aux.iter().map(|x| json!(x)))
                .collect();
            let mut wit = json!({
                "graph": graph,
                "x0": w.x0,
                "auxiliary": aux,
                "method": w.method,
            });
            if let Some(rel) = &w.relation {
                wit["relation"] = json!(rel.fmt_with("t"));
            }
            m.insert("witness".into(), wit);
            let mut res = json!({
                "same_dynamics": w.same_dynamics,
                "complex_balance": w.complex_balance_residual,
            });
            if let Some(d) = w.detailed_balance_residual {
                res["detailed_balance"] = json!(d);
            }
            m.insert("residuals".into(), res);
        }
        Verdict::CertifiedNoByClosedForm(r) | Verdict::Unknown(r) => {
            m.insert("reason".into(), json!(r));
        }
    }
    m.insert("seed".into(), json!(rep.seed));
    m.insert("generators_used".into(), json!(rep.generators_used));
    m.insert("samples_used".into(), json!(rep.samples_used));
    m.insert("parametrization".into(), json!(rep.parametrization));
    m.insert("evidence".into(), json!(rep.evidence));
    m.insert("warnings".into(), json!(rep.warnings));
    m
}

fn probe_report(l: &Loaded, total: f64, trials: usize, seed: u64) -> Result<Value> {
    let red = line_reduce(&l.net.graph, rates(l)?)?;
    let rep = multistationarity_probe(&red, total, trials, seed)?;
    let mut m = header(l);
    if let Value::Object(r) = serde_json::to_value(&rep).expect("serializable") {
        m.extend(r);
    }
    Ok(Value::Object(m))
}

fn simulate(l: &Loaded, x0: Option<&str>, t_end: f64, dt: f64, every: usize) -> Result<String> {
    let g = &l.net.graph;
    let k = rates(l)?;
    let x0 = parse_point(x0.ok_or_else(|| Error::Format("simulate needs --x0".into()))?)?;
    let rhs = Rhs::new(g, &k.to_f64());
    let tr = integrate_rhs(&rhs, &x0, t_end, dt, every)?;
    let mut out = String::from("t");
    for i in 1..=g.dim() {
        out.push_str(&format!(",x{i}"));
    }
    out.push('\n');
    for (t, x) in tr.times.iter().zip(&tr.states) {
        out.push_str(&t.to_string());
        for v in x {
            out.push(',');
            out.push_str(&v.to_string());
        }
        out.push('\n');
    }
    for (t, tag) in &tr.events {
        eprintln!("event at t = {t}: {tag}");
    }
    Ok(out)
}
