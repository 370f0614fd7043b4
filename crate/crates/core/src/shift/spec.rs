use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{CmsGraph, FiniteGraph, LoopSystem, Tail};
use crate::error::{Error, Result};

/// The JSON graph document, field names exactly as accepted on disk.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GraphSpec {
    Finite { symbols: i64, edges: Vec<[i64; 2]> },
    LoopSystem { loops: Vec<LoopEntry>, tail: Option<TailSpec> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoopEntry {
    pub length: i64,
    pub multiplicity: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TailSpec {
    pub from_length: i64,
    pub coeff: f64,
    pub growth: f64,
    /// Polynomial correction `ℓ^power`; omitted means `0`.
    #[serde(default, skip_serializing_if = "is_zero")]
    pub power: f64,
    #[serde(default, skip_serializing_if = "TailRule::is_default")]
    pub rule: TailRule,
}

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailRule {
    #[default]
    PowerGeometric,
    GreedyCritical,
}

impl TailRule {
    fn is_default(&self) -> bool {
        *self == TailRule::PowerGeometric
    }
}

fn is_zero(x: &f64) -> bool {
    *x == 0.0
}

impl GraphSpec {
    pub fn finite(symbols: usize, edges: impl IntoIterator<Item = (u64, u64)>) -> Self {
        GraphSpec::Finite {
            symbols: symbols as i64,
            edges: edges.into_iter().map(|(a, b)| [a as i64, b as i64]).collect(),
        }
    }

    /// Document describing an already validated graph.
    pub fn describe(g: &CmsGraph) -> Self {
        match g {
            CmsGraph::Finite(f) => GraphSpec::finite(f.len(), f.edges().map(|(a, b)| (a.index(), b.index()))),
            CmsGraph::Loop(l) => GraphSpec::LoopSystem {
                loops: l
                    .explicit_loops()
                    .iter()
                    .map(|&(length, m)| LoopEntry { length: length as i64, multiplicity: m as i64 })
                    .collect(),
                tail: l.tail().map(|t| match *t {
                    Tail::PowerGeometric { from_length, coeff, growth, power } => TailSpec {
                        from_length: from_length as i64,
                        coeff,
                        growth,
                        power,
                        rule: TailRule::PowerGeometric,
                    },
                    Tail::GreedyCritical { growth } => TailSpec {
                        from_length: 1,
                        coeff: 1.0,
                        growth: growth as f64,
                        power: 0.0,
                        rule: TailRule::GreedyCritical,
                    },
                }),
            },
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("graph documents always serialize")
    }

    /// Check invariants and build the graph.
    pub fn build(&self) -> Result<CmsGraph> {
        match self {
            GraphSpec::Finite { symbols, edges } => build_finite(*symbols, edges),
            GraphSpec::LoopSystem { loops, tail } => build_loops(loops, tail.as_ref()),
        }
    }
}

fn build_finite(symbols: i64, edges: &[[i64; 2]]) -> Result<CmsGraph> {
    if symbols < 1 {
        return Err(Error::validation("symbols", "must be at least 1"));
    }
    if edges.is_empty() {
        return Err(Error::validation("edges", "edge set must be nonempty"));
    }
    for (i, e) in edges.iter().enumerate() {
        for (j, &v) in e.iter().enumerate() {
            if v < 1 || v > symbols {
                return Err(Error::validation(format!("edges[{i}][{j}]"), format!("symbol {v} outside 1..={symbols}")));
            }
        }
    }
    let n = symbols as usize;
    Ok(CmsGraph::Finite(FiniteGraph::from_edges(n, edges.iter().map(|e| (e[0] as u64, e[1] as u64)))))
}

fn build_loops(loops: &[LoopEntry], tail: Option<&TailSpec>) -> Result<CmsGraph> {
    let mut explicit = Vec::with_capacity(loops.len());
    for (i, e) in loops.iter().enumerate() {
        if e.length < 1 {
            return Err(Error::validation(format!("loops[{i}].length"), "must be at least 1"));
        }
        if e.multiplicity < 0 {
            return Err(Error::validation(format!("loops[{i}].multiplicity"), "multiplicities must be nonnegative"));
        }
        explicit.push((e.length as u64, e.multiplicity as u64));
    }
    let tail = match tail {
        None => None,
        Some(t) => Some(build_tail(t)?),
    };
    let sys = LoopSystem::new(explicit, tail);
    let any_positive = match sys.max_loop_len() {
        None => true,
        Some(end) => sys.multiplicities().take(end as usize).any(|(_, a)| a > 0u32.into()),
    };
    if !any_positive {
        return Err(Error::validation("loops", "at least one multiplicity must be positive"));
    }
    if sys.multiplicity(1) > 1u32.into() {
        return Err(Error::validation(
            "loops",
            "at most one loop of length 1 (a 0/1 transition matrix has one self-loop)",
        ));
    }
    Ok(CmsGraph::Loop(sys))
}

fn build_tail(t: &TailSpec) -> Result<Tail> {
    if t.from_length < 1 {
        return Err(Error::validation("tail.from_length", "must be at least 1"));
    }
    if !t.coeff.is_finite() || t.coeff < 0.0 {
        return Err(Error::validation("tail.coeff", "must be finite and nonnegative"));
    }
    if !t.growth.is_finite() || t.growth < 1.0 {
        return Err(Error::validation("tail.growth", "growth base must be finite and at least 1"));
    }
    if !t.power.is_finite() {
        return Err(Error::validation("tail.power", "must be finite"));
    }
    match t.rule {
        TailRule::PowerGeometric => Ok(Tail::PowerGeometric {
            from_length: t.from_length as u64,
            coeff: t.coeff,
            growth: t.growth,
            power: t.power,
        }),
        TailRule::GreedyCritical => {
            if t.growth.fract() != 0.0 || !(2.0..=16.0).contains(&t.growth) {
                return Err(Error::validation("tail.growth", "greedy_critical needs an integer growth in 2..=16"));
            }
            if t.from_length != 1 {
                return Err(Error::validation("tail.from_length", "greedy_critical starts at 1"));
            }
            Ok(Tail::GreedyCritical { growth: t.growth as u32 })
        }
    }
}

fn schema_err<E: std::fmt::Display>(e: serde_path_to_error::Error<E>) -> Error {
    Error::Schema { path: e.path().to_string(), message: e.inner().to_string() }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FiniteDoc {
    #[serde(rename = "kind")]
    _kind: String,
    symbols: i64,
    edges: Vec<[i64; 2]>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LoopDoc {
    #[serde(rename = "kind")]
    _kind: String,
    #[serde(default)]
    loops: Vec<LoopEntry>,
    #[serde(default)]
    tail: Option<TailSpec>,
}

/// Parse a graph document without validating invariants. The `kind` tag is read first so that
/// field paths in schema errors point into the document body.
pub fn parse_spec(json: &str) -> Result<GraphSpec> {
    let de = &mut serde_json::Deserializer::from_str(json);
    let value: serde_json::Value = serde_path_to_error::deserialize(de).map_err(schema_err)?;
    let kind = value.get("kind").and_then(|k| k.as_str()).map(str::to_owned);
    match kind.as_deref() {
        Some("finite") => {
            let d: FiniteDoc = serde_path_to_error::deserialize(value).map_err(schema_err)?;
            Ok(GraphSpec::Finite { symbols: d.symbols, edges: d.edges })
        }
        Some("loop_system") => {
            let d: LoopDoc = serde_path_to_error::deserialize(value).map_err(schema_err)?;
            Ok(GraphSpec::LoopSystem { loops: d.loops, tail: d.tail })
        }
        _ => Err(Error::Schema { path: "kind".into(), message: "expected \"finite\" or \"loop_system\"".into() }),
    }
}

/// Parse and validate a graph document.
pub fn load_graph_str(json: &str) -> Result<CmsGraph> {
    parse_spec(json)?.build()
}

pub fn load_graph(path: impl AsRef<Path>) -> Result<CmsGraph> {
    load_graph_str(&std::fs::read_to_string(path)?)
}
