use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::ext_f64;
use crate::shift::{CmsGraph, FiniteGraph, LoopPos, Symbol};
use crate::spectral::{perron, SparseMatrix};
use crate::thermo::{log_growth, tail_log_growth, GfSeries};

/// `P(-t·1_[F])`: growth rate of loop weights where every step leaving a vertex of `F` costs
/// `e^{-t}`. Exact on both graph kinds: a generating-function root for loop systems, a Perron
/// root on the component of symbol 1 for finite graphs.
pub fn pressure_indicator(g: &CmsGraph, f: &[Symbol], t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::validation("t", "t must be nonnegative"));
    }
    match g {
        CmsGraph::Loop(l) => Ok(log_growth(&GfSeries::weighted(l, f, t))),
        CmsGraph::Finite(fg) => finite_pressure(fg, f, t),
    }
}

fn finite_pressure(g: &FiniteGraph, f: &[Symbol], t: f64) -> Result<f64> {
    if g.is_empty() {
        return Ok(f64::NEG_INFINITY);
    }
    let comp = g.component_of(0);
    let sub = g.induced(&comp);
    if sub.edge_count() == 0 {
        return Ok(f64::NEG_INFINITY);
    }
    let w = (-t).exp();
    let rows = (0..sub.len())
        .map(|i| {
            let cost = if f.contains(&Symbol::new(comp[i] as u64 + 1)) { w } else { 1.0 };
            sub.successors(i).iter().map(|&j| (j, cost)).collect()
        })
        .collect();
    Ok(perron(&SparseMatrix { rows })?.lambda.ln())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BInfOptions {
    /// `F = {1, …, k}` for each `k`.
    pub f_ladder: Vec<u64>,
    pub lambdas: Vec<f64>,
    pub t_max: f64,
    pub t_step: f64,
}

impl Default for BInfOptions {
    fn default() -> Self {
        BInfOptions { f_ladder: vec![1, 4, 16], lambdas: vec![0.1, 0.03, 0.01], t_max: 40.0, t_step: 0.05 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PressureCurve {
    pub f_size: u64,
    pub t: Vec<f64>,
    #[serde(with = "ext_f64::vec")]
    pub pressure: Vec<f64>,
    /// `lim_{t→∞} P(-t·1_[F])` when known in closed form.
    #[serde(with = "ext_f64::option")]
    pub t_limit: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualValue {
    pub f_size: u64,
    pub lambda: f64,
    /// `min_t P(-t·1_[F]) + tλ` over the grid.
    #[serde(with = "ext_f64")]
    pub value: f64,
    pub t_star: f64,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BInfStatus {
    Estimated,
    /// `F` exhausts a finite alphabet: no mass can avoid it.
    NoEscape,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BInfCurve {
    pub curves: Vec<PressureCurve>,
    pub duals: Vec<DualValue>,
    pub status: BInfStatus,
    /// Dual value at the largest `F` and smallest `λ`: an upper bound for `b∞`.
    #[serde(with = "ext_f64::option")]
    pub headline: Option<f64>,
    pub pressure_nonincreasing: bool,
    pub dual_monotone: bool,
}

impl BInfCurve {
    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["F", "t", "pressure"]).map_err(crate::counting::csv_err)?;
        for c in &self.curves {
            for (t, p) in c.t.iter().zip(&c.pressure) {
                out.write_record([c.f_size.to_string(), format!("{t:.2}"), ext_f64::format(*p)])
                    .map_err(crate::counting::csv_err)?;
            }
        }
        out.flush()?;
        Ok(())
    }
}

/// Upper bound for Buzzi's `b∞` through the Lagrangian dual of
/// `sup { h_μ : μ([F]) ≤ λ }`, namely `inf_{t ≥ 0} P(-t·1_[F]) + tλ`.
pub fn b_inf_estimate(g: &CmsGraph, opts: &BInfOptions) -> Result<BInfCurve> {
    if opts.f_ladder.is_empty() || opts.lambdas.is_empty() || !(opts.t_step > 0.0) || !(opts.t_max >= 0.0) {
        return Err(Error::validation("b_inf", "ladders must be nonempty and the t grid positive"));
    }
    let steps = (opts.t_max / opts.t_step).round() as usize;
    let ts: Vec<f64> = (0..=steps).map(|i| i as f64 * opts.t_step).collect();
    let curves = opts
        .f_ladder
        .par_iter()
        .map(|&k| {
            let f: Vec<Symbol> = (1..=k).map(Symbol::new).collect();
            let pressure = match g {
                CmsGraph::Loop(l) => {
                    let base = GfSeries::new(l);
                    ts.iter().map(|&t| log_growth(&base.reweighted(l, &f, t))).collect()
                }
                CmsGraph::Finite(_) => ts.iter().map(|&t| pressure_indicator(g, &f, t)).collect::<Result<Vec<_>>>()?,
            };
            let t_limit = match g {
                CmsGraph::Loop(l) if covers_base(g, &f) => Some(tail_log_growth(l)),
                _ => None,
            };
            Ok(PressureCurve { f_size: k, t: ts.clone(), pressure, t_limit })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut duals = Vec::new();
    for c in &curves {
        for &lambda in &opts.lambdas {
            let (i, value) = c
                .pressure
                .iter()
                .enumerate()
                .map(|(i, p)| (i, p + c.t[i] * lambda))
                .fold((0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
            duals.push(DualValue { f_size: c.f_size, lambda, value, t_star: c.t[i] });
        }
    }
    let pressure_nonincreasing =
        curves.iter().all(|c| c.pressure.windows(2).all(|w| w[1] <= w[0] + 1e-9 || w[0] == f64::NEG_INFINITY));
    let dual_monotone = curves.iter().all(|c| {
        let mut d: Vec<&DualValue> = duals.iter().filter(|d| d.f_size == c.f_size).collect();
        d.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
        d.windows(2).all(|w| w[0].value <= w[1].value + 1e-12)
    });
    let top = *opts.f_ladder.iter().max().expect("nonempty");
    let exhausted = match g {
        CmsGraph::Finite(fg) => top >= fg.len() as u64,
        CmsGraph::Loop(l) => l.symbol_count().is_some_and(|n| top >= n),
    };
    let (status, headline) = if exhausted {
        (BInfStatus::NoEscape, None)
    } else {
        let lmin = opts.lambdas.iter().copied().fold(f64::INFINITY, f64::min);
        let h = duals.iter().find(|d| d.f_size == top && d.lambda == lmin).map(|d| d.value);
        (BInfStatus::Estimated, h)
    };
    Ok(BInfCurve { curves, duals, status, headline, pressure_nonincreasing, dual_monotone })
}

/// True when `F` contains the base of a loop system, so every loop is penalized.
pub fn covers_base(g: &CmsGraph, f: &[Symbol]) -> bool {
    match g {
        CmsGraph::Loop(l) => f.iter().any(|&s| l.locate(s) == Some(LoopPos::Base)),
        CmsGraph::Finite(_) => false,
    }
}
