use std::fs;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{CylinderMeasure, FiniteMarkov, LengthLaw, LoopMarkov, MarkovMeasure, MeasureSequence, Mixture};
use crate::error::{Error, Result};
use crate::numeric::ext_f64;
use crate::shift::{parse_spec, CmsGraph, GraphSpec, Symbol};

/// On-disk form of a measure. `entropy` is informational and ignored when reading.
#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum MeasureDoc {
    Finite {
        states: Vec<u64>,
        pi: Vec<f64>,
        /// Row `i`: `(target symbol, probability)`.
        rows: Vec<Vec<(u64, f64)>>,
        #[serde(with = "ext_f64", default)]
        entropy: f64,
    },
    Loop {
        system: serde_json::Value,
        law: LengthLaw,
        #[serde(with = "ext_f64", default)]
        entropy: f64,
    },
}

impl MeasureDoc {
    fn from_measure(m: &MarkovMeasure) -> Self {
        match m {
            MarkovMeasure::Finite(f) => MeasureDoc::Finite {
                states: f.states().iter().map(|s| s.index()).collect(),
                pi: f.pi().to_vec(),
                rows: f.rows().iter().map(|r| r.iter().map(|&(j, p)| (f.states()[j].index(), p)).collect()).collect(),
                entropy: f.entropy(),
            },
            MarkovMeasure::Loop(l) => MeasureDoc::Loop {
                system: serde_json::to_value(GraphSpec::describe(&CmsGraph::Loop((**l.system()).clone())))
                    .expect("graph documents serialize"),
                law: l.law().clone(),
                entropy: l.entropy(),
            },
        }
    }

    fn build(self) -> Result<MarkovMeasure> {
        match self {
            MeasureDoc::Finite { states, pi, rows, .. } => {
                let syms = states.iter().map(|&s| Symbol::try_new(s)).collect::<Result<Vec<_>>>()?;
                let mut idx_rows = Vec::with_capacity(rows.len());
                for row in rows {
                    let mut r = Vec::with_capacity(row.len());
                    for (s, p) in row {
                        let j = states.iter().position(|&t| t == s).ok_or(Error::UnknownSymbol(s))?;
                        r.push((j, p));
                    }
                    idx_rows.push(r);
                }
                Ok(FiniteMarkov::new(syms, pi, idx_rows)?.into())
            }
            MeasureDoc::Loop { system, law, .. } => match parse_spec(&system.to_string())?.build()? {
                CmsGraph::Loop(l) => Ok(LoopMarkov::new(Arc::new(l), law)?.into()),
                CmsGraph::Finite(_) => Err(Error::validation("system.kind", "loop measures need a loop system")),
            },
        }
    }
}

impl Serialize for MarkovMeasure {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MeasureDoc::from_measure(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for MarkovMeasure {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        MeasureDoc::deserialize(d)?.build().map_err(serde::de::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct SequenceManifest {
    tag: Option<String>,
    files: Vec<String>,
}

/// One JSON file per measure plus `manifest.json` listing them in order.
pub fn write_sequence(dir: &Path, seq: &MeasureSequence) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut files = Vec::new();
    for (i, item) in seq.items.iter().enumerate() {
        let name = format!("measure_{i:04}.json");
        fs::write(dir.join(&name), to_json(item))?;
        files.push(name);
    }
    let manifest = SequenceManifest { tag: seq.tag.clone(), files };
    fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(&manifest).map_err(json_err)?)?;
    Ok(())
}

pub fn read_sequence(dir: &Path) -> Result<MeasureSequence> {
    let manifest: SequenceManifest =
        serde_json::from_str(&fs::read_to_string(dir.join("manifest.json"))?).map_err(json_err)?;
    let items = manifest
        .files
        .iter()
        .map(|f| serde_json::from_str::<Mixture>(&fs::read_to_string(dir.join(f))?).map_err(json_err))
        .collect::<Result<Vec<_>>>()?;
    Ok(MeasureSequence { items, tag: manifest.tag })
}

fn to_json(m: &Mixture) -> String {
    serde_json::to_string_pretty(m).expect("measures serialize")
}

fn json_err(e: serde_json::Error) -> Error {
    Error::Schema { path: format!("line {} column {}", e.line(), e.column()), message: e.to_string() }
}
