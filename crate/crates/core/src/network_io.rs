//! JSON network files.
//!
//! ```json
//! { "dim": 2,
//!   "vertices": [[2, 0], [1, 1], [0, 2]],
//!   "edges": [{"from": 0, "to": 1, "rate": "3/2"}] }
//! ```
//! Numbers may be bare integers, decimals, or `"p/q"` strings. Indices are 0-based.

use serde::Deserialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::model::{EGraph, RateAssignment, RationalVec};
use crate::rational::{fmt_q, parse_q, Q};

#[derive(Clone, Debug)]
pub struct Network {
    pub graph: EGraph,
    pub rates: Option<RateAssignment>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Num {
    Int(i64),
    Float(f64),
    Str(String),
}

impl Num {
    fn to_q(&self) -> Result<Q> {
        match self {
            Num::Int(i) => Ok(crate::rational::q(*i)),
            Num::Float(f) => {
                if !f.is_finite() {
                    return Err(Error::Format(format!("non-finite number {f}")));
                }
                parse_q(&format!("{f}"))
            }
            Num::Str(s) => parse_q(s),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeFile {
    from: usize,
    to: usize,
    rate: Option<Num>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NetworkFile {
    dim: usize,
    vertices: Vec<Vec<Num>>,
    edges: Vec<EdgeFile>,
    #[serde(default)]
    labels: Option<Vec<String>>,
}

pub fn parse_network(text: &str) -> Result<Network> {
    let file: NetworkFile = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
    if file.dim == 0 {
        return Err(Error::Format("dim must be positive".into()));
    }
    let mut vertices = Vec::new();
    for (i, v) in file.vertices.iter().enumerate() {
        if v.len() != file.dim {
            return Err(Error::Format(format!(
                "vertex {i} has {} coordinates, dim is {}",
                v.len(),
                file.dim
            )));
        }
        vertices.push(RationalVec::new(
            v.iter().map(Num::to_q).collect::<Result<_>>()?,
        ));
    }
    let edges = file.edges.iter().map(|e| (e.from, e.to)).collect();
    let mut graph = EGraph::new(vertices, edges)?;
    if let Some(labels) = file.labels {
        graph = graph.with_labels(labels)?;
    }
    let given = file.edges.iter().filter(|e| e.rate.is_some()).count();
    let rates = if given == 0 {
        None
    } else if given < file.edges.len() {
        let i = file.edges.iter().position(|e| e.rate.is_none()).unwrap();
        return Err(Error::Format(format!(
            "edge {i} has no rate while others do"
        )));
    } else {
        let vals = file
            .edges
            .iter()
            .map(|e| e.rate.as_ref().unwrap().to_q())
            .collect::<Result<Vec<_>>>()?;
        Some(RateAssignment::exact(vals)?)
    };
    Ok(Network { graph, rates })
}

pub fn read_network(path: &std::path::Path) -> Result<(Network, Vec<u8>)> {
    let bytes =
        std::fs::read(path).map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
    let text = std::str::from_utf8(&bytes).map_err(|e| Error::Format(e.to_string()))?;
    Ok((parse_network(text)?, bytes))
}

/// Serializes a graph, with optional exact rates, in the file format.
pub fn network_to_json(g: &EGraph, rates: Option<&[Q]>) -> Value {
    let vertices: Vec<Value> = g
        .vertices()
        .iter()
        .map(|v| Value::Array(v.coords().iter().map(q_json).collect()))
        .collect();
    let edges: Vec<Value> = g
        .edges()
        .iter()
        .enumerate()
        .map(|(i, &(s, t))| match rates {
            Some(r) => json!({"from": s, "to": t, "rate": fmt_q(&r[i])}),
            None => json!({"from": s, "to": t}),
        })
        .collect();
    let mut doc = json!({"dim": g.dim(), "vertices": vertices, "edges": edges});
    if let Some(l) = g.labels() {
        doc["labels"] = json!(l);
    }
    doc
}

/// Integers stay bare, other rationals become `"p/q"` strings.
pub fn q_json(x: &Q) -> Value {
    use num_traits::ToPrimitive;
    if x.is_integer() {
        if let Some(i) = x.to_integer().to_i64() {
            return json!(i);
        }
    }
    Value::String(fmt_q(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qr;

    #[test]
    fn roundtrip() {
        let text = r#"{"dim":2,"vertices":[[2,0],["1",1],[0,"2/1"]],
            "edges":[{"from":0,"to":1,"rate":"3/2"},{"from":1,"to":2,"rate":0.25}]}"#;
        let n = parse_network(text).unwrap();
        assert_eq!(n.graph.num_vertices(), 3);
        let r = n.rates.unwrap();
        assert_eq!(r.as_exact().unwrap(), &[qr(3, 2), qr(1, 4)]);
        let back = network_to_json(&n.graph, r.as_exact());
        let again = parse_network(&back.to_string()).unwrap();
        assert_eq!(again.graph, n.graph);
    }

    #[test]
    fn errors_carry_position() {
        let err = parse_network("{\"dim\": 2,\n \"vertices\": [[1,}").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
        let mixed = r#"{"dim":1,"vertices":[[0],[1]],"edges":[{"from":0,"to":1,"rate":1},{"from":1,"to":0}]}"#;
        assert!(parse_network(mixed).is_err());
        let bad = r#"{"dim":1,"vertices":[[0],[1]],"edges":[],"extra":1}"#;
        assert!(parse_network(bad).is_err());
    }
}
