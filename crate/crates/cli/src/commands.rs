use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

use cmshift::counting::loop_count;
use cmshift::density::{density_demo, emit_graph, DensityOptions};
use cmshift::infinity::{
    b_inf_estimate, dimension_series, family_sequence, h_inf_lower_bound, mass_bound_check, verify_main_inequality,
    BInfOptions, DriftSchedule, Family, SeriesVerdict,
};
use cmshift::katok::katok_estimate;
use cmshift::measures::{parry_measure, MarkovMeasure};
use cmshift::shift::{load_graph, CmsGraph};
use cmshift::thermo::{
    classify, delta_inf, gurevich_entropy, is_spr, loop_gf, tail_log_growth, GridSpec, RecurrenceClass, SprOptions,
    SprVerdict,
};
use cmshift::{Error, Result, Symbol};

use crate::output::write_outputs;
use crate::Command;

pub const SCHEMA_VERSION: u32 = 1;

/// A command's report and the tables written next to it.
pub struct Output {
    pub command: &'static str,
    pub report: Value,
    pub tables: Vec<(String, Vec<u8>)>,
    /// Verdict was inconclusive (or a check failed, see `failed`).
    pub inconclusive: bool,
    pub failed: bool,
}

impl Output {
    fn new(command: &'static str, report: &impl Serialize) -> Self {
        Output {
            command,
            report: serde_json::to_value(report).expect("reports serialize"),
            tables: Vec::new(),
            inconclusive: false,
            failed: false,
        }
    }

    fn table(mut self, name: &str, data: Vec<u8>) -> Self {
        self.tables.push((name.to_string(), data));
        self
    }

    pub fn document(&self) -> Value {
        json!({ "schema_version": SCHEMA_VERSION, "command": self.command, "report": self.report })
    }
}

pub enum Outcome {
    Done { json: String, code: u8 },
    Failed { json: String, code: u8 },
}

impl Outcome {
    pub fn code(&self) -> u8 {
        match self {
            Outcome::Done { code, .. } | Outcome::Failed { code, .. } => *code,
        }
    }
}

pub fn error_code(e: &Error) -> u8 {
    match e {
        Error::Schema { .. } | Error::Validation { .. } | Error::UnknownSymbol(_) => 2,
        _ => 1,
    }
}

pub fn error_document(e: &Error) -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "error": { "code": e.code(), "path": e.path(), "message": e.to_string() }
    })
}

fn common(cmd: &Command) -> (Option<&Path>, bool) {
    let c = match cmd {
        Command::Entropy { common, .. }
        | Command::DeltaInf { common, .. }
        | Command::Classify { common, .. }
        | Command::Spr { common, .. }
        | Command::BInf { common, .. }
        | Command::HInf { common, .. }
        | Command::Katok { common, .. }
        | Command::VerifyMain { common, .. }
        | Command::MassBound { common, .. }
        | Command::DimSeries { common, .. }
        | Command::DensityDemo { common, .. } => common,
        Command::Run { .. } => return (None, false),
    };
    (c.out.as_deref(), c.strict)
}

/// Run one command, writing its outputs into `out` when given.
pub fn execute_into(cmd: &Command, out: Option<&Path>) -> Outcome {
    let (own_out, strict) = common(cmd);
    let out = out.or(own_out);
    let result = run(cmd).and_then(|o| {
        if let Some(dir) = out {
            write_outputs(dir, &o)?;
        }
        Ok(o)
    });
    match result {
        Ok(o) => {
            let code = exit_code(&o, strict);
            Outcome::Done { json: serde_json::to_string_pretty(&o.document()).expect("json"), code }
        }
        Err(e) => Outcome::Failed {
            json: serde_json::to_string_pretty(&error_document(&e)).expect("json"),
            code: error_code(&e),
        },
    }
}

fn exit_code(o: &Output, strict: bool) -> u8 {
    match (strict, o.failed, o.inconclusive) {
        (false, _, _) => 0,
        (true, true, _) => 1,
        (true, false, true) => 3,
        (true, false, false) => 0,
    }
}

pub fn execute(cmd: &Command) -> Outcome {
    execute_into(cmd, None)
}

fn csv(f: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    f(&mut buf)?;
    Ok(buf)
}

fn parse_family(s: &str) -> Result<Family> {
    serde_json::from_value(Value::String(s.into()))
        .map_err(|_| Error::Validation { path: "family".into(), message: format!("unknown family `{s}`") })
}

/// Exact entropy at infinity for loop systems, otherwise the grid headline.
fn default_delta_inf(g: &CmsGraph) -> Result<f64> {
    match g {
        CmsGraph::Loop(l) => Ok(tail_log_growth(l)),
        CmsGraph::Finite(_) => Ok(delta_inf(g, &GridSpec::default())?.headline.unwrap_or(f64::NEG_INFINITY)),
    }
}

fn run(cmd: &Command) -> Result<Output> {
    match cmd {
        Command::Entropy { graph, vertex, n_max, .. } => {
            let g = load_graph(&graph.graph)?;
            let v = Symbol::try_new(*vertex)?;
            let r = gurevich_entropy(&g, v, *n_max)?;
            let counts = loop_count(&g, v, *n_max)?;
            let mut o = Output::new("entropy", &r).table("counts.csv", csv(|b| counts.write_csv(b))?);
            o.failed = r.agrees == Some(false);
            Ok(o)
        }
        Command::DeltaInf { graph, m, q, n_max, .. } => {
            let g = load_graph(&graph.graph)?;
            let spec = GridSpec { ms: m.clone(), qs: q.clone(), n_max: *n_max };
            let r = delta_inf(&g, &spec)?;
            let mut o = Output::new("delta-inf", &r).table("grid.csv", csv(|b| r.write_csv(b))?);
            o.inconclusive = r.headline.is_none() && r.exact.is_none();
            Ok(o)
        }
        Command::Classify { graph, vertex, .. } => {
            let g = load_graph(&graph.graph)?;
            let r = classify(&g, Symbol::try_new(*vertex)?)?;
            let mut o = Output::new("classify", &r);
            o.inconclusive = r.class == RecurrenceClass::Inconclusive;
            Ok(o)
        }
        Command::Spr { graph, n_max, no_grid, .. } => {
            let g = load_graph(&graph.graph)?;
            let opts = SprOptions {
                grid: (!no_grid).then(|| GridSpec { n_max: *n_max, ..GridSpec::default() }),
                ..SprOptions::default()
            };
            let r = is_spr(&g, &opts)?;
            let mut o = Output::new("spr", &r);
            if let Some(grid) = &r.grid {
                o = o.table("grid.csv", csv(|b| grid.write_csv(b))?);
            }
            o.inconclusive = r.verdict == SprVerdict::Inconclusive;
            Ok(o)
        }
        Command::BInf { graph, t, .. } => {
            let g = load_graph(&graph.graph)?;
            let r = b_inf_estimate(&g, &BInfOptions { t_max: *t, ..BInfOptions::default() })?;
            let mut o = Output::new("b-inf", &r).table("pressure.csv", csv(|b| r.write_csv(b))?);
            o.inconclusive = r.headline.is_none();
            Ok(o)
        }
        Command::HInf { graph, steps, width, .. } => {
            let g = load_graph(&graph.graph)?;
            let schedule = DriftSchedule { width: *width, ..DriftSchedule::geometric(*steps) };
            let r = h_inf_lower_bound(&g, &schedule)?;
            Ok(Output::new("h-inf", &r))
        }
        Command::Katok { measure, graph, delta, n_min, n_max, .. } => {
            let m: MarkovMeasure = match (measure, graph) {
                (Some(p), _) => {
                    let text = std::fs::read_to_string(p)?;
                    serde_json::from_str(&text)
                        .map_err(|e| Error::Schema { path: "measure".into(), message: e.to_string() })?
                }
                (None, Some(p)) => match load_graph(p)? {
                    CmsGraph::Finite(f) => parry_measure(&f)?.into(),
                    CmsGraph::Loop(_) => {
                        return Err(Error::validation("graph", "Parry measures need a finite graph"));
                    }
                },
                (None, None) => return Err(Error::validation("measure", "give --measure or --graph")),
            };
            let r = katok_estimate(&m, delta, *n_min, *n_max)?;
            let mut o = Output::new("katok", &r);
            for p in &r.profiles {
                o = o.table(&format!("covering_delta_{}.csv", p.delta), csv(|b| p.write_csv(b))?);
            }
            Ok(o)
        }
        Command::VerifyMain { graph, family, steps, delta_inf, .. } => {
            let g = load_graph(&graph.graph)?;
            let fam = parse_family(family)?;
            let d = match delta_inf {
                Some(d) => *d,
                None => default_delta_inf(&g)?,
            };
            let seq = family_sequence(&g, fam, *steps)?;
            let r = verify_main_inequality(&g, &seq, d)?;
            let mut o = Output::new("verify-main", &r);
            o.failed = !r.pass;
            Ok(o)
        }
        Command::MassBound { graph, family, steps, c, .. } => {
            let g = load_graph(&graph.graph)?;
            let CmsGraph::Loop(l) = &g else {
                return Err(Error::validation("graph", "mass-bound families need a loop system"));
            };
            let fam = parse_family(family)?;
            let seq = family_sequence(&g, fam, *steps)?;
            let floor = match c {
                Some(c) => *c,
                None => seq.entropies().into_iter().fold(f64::INFINITY, f64::min),
            };
            let r = mass_bound_check(&g, &seq, floor, tail_log_growth(l), loop_gf(l).log_growth)?;
            let mut o = Output::new("mass-bound", &r);
            o.failed = !r.pass;
            Ok(o)
        }
        Command::DimSeries { graph, m, q, t, n_max, .. } => {
            let g = load_graph(&graph.graph)?;
            let r = dimension_series(&g, *m, *q, *t, *n_max)?;
            let mut table = String::from("len,ln_term,ln_partial\n");
            for term in &r.terms {
                table.push_str(&format!(
                    "{},{},{}\n",
                    term.len,
                    cmshift::numeric::ext_f64::format(term.ln_term),
                    cmshift::numeric::ext_f64::format(term.ln_partial)
                ));
            }
            let mut o = Output::new("dim-series", &r).table("terms.csv", table.into_bytes());
            o.inconclusive = r.verdict == SeriesVerdict::Inconclusive;
            Ok(o)
        }
        Command::DensityDemo { n, m, depth, seed, .. } => {
            let opts = DensityOptions { n: *n, m_blocks: *m, depth: *depth, seed: *seed, ..DensityOptions::default() };
            let (system, r) = density_demo(&opts)?;
            let (spec, labels) = emit_graph(&system);
            let mut o = Output::new("density-demo", &r)
                .table("sft.json", spec.to_json().into_bytes())
                .table("labels.json", serde_json::to_vec(&labels).expect("json"));
            o.failed = !r.met;
            Ok(o)
        }
        Command::Run { .. } => unreachable!("manifests are dispatched separately"),
    }
}
