use serde::{Deserialize, Serialize};

use super::loop_gf::{loop_gf, tail_log_growth};
use crate::counting::{first_return_count, growth_rate, loop_count, GrowthEstimate, GrowthMethod};
use crate::error::Result;
use crate::numeric::ext_f64;
use crate::shift::{truncate, CmsGraph, LoopPos, Symbol};
use crate::spectral::component_radius;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub q: u64,
    /// Log spectral radius of the component of the vertex inside the truncation.
    #[serde(with = "ext_f64")]
    pub log_radius: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyReport {
    pub vertex: u64,
    pub n_max: usize,
    /// Affine fit of `log Z_n(a)`.
    pub estimate: GrowthEstimate,
    /// Perron value (finite graphs) or `-ln x_c` (loop systems).
    #[serde(with = "ext_f64::option")]
    pub exact: Option<f64>,
    /// Entropy of growing truncations; nondecreasing in `q`.
    pub truncation_trace: Vec<TraceEntry>,
    pub transitive: bool,
    /// Allowed gap between estimate and exact value: fit residual plus `2|h|/n_max`.
    #[serde(with = "ext_f64")]
    pub tolerance: f64,
    pub agrees: Option<bool>,
}

impl EntropyReport {
    /// The exact value when known, otherwise the count estimate.
    pub fn value(&self) -> f64 {
        self.exact.unwrap_or(self.estimate.value)
    }
}

fn exact_entropy(g: &CmsGraph, a: Symbol) -> f64 {
    match g {
        CmsGraph::Finite(f) => component_radius(f, a.index() as usize - 1).ln(),
        CmsGraph::Loop(l) => loop_gf(l).log_growth,
    }
}

fn trace(g: &CmsGraph, a: Symbol) -> Vec<TraceEntry> {
    let top = g.symbol_count().unwrap_or(u64::MAX).min(64);
    let mut qs: Vec<u64> = std::iter::successors(Some(1u64), |q| Some(q * 2)).take_while(|&q| q < top).collect();
    qs.push(top);
    qs.into_iter()
        .filter(|&q| q >= a.index())
        .map(|q| {
            let t = truncate(g, q);
            TraceEntry { q, log_radius: component_radius(&t.graph, a.index() as usize - 1).ln() }
        })
        .collect()
}

/// Gurevich entropy from loop counts at `a`, with the exact value alongside.
pub fn gurevich_entropy(g: &CmsGraph, a: Symbol, n_max: usize) -> Result<EntropyReport> {
    let z = loop_count(g, a, n_max)?;
    let estimate = growth_rate(&z, GrowthMethod::AffineFit, None)?;
    let exact = exact_entropy(g, a);
    let tolerance = estimate.residual.unwrap_or(0.0) + 2.0 * exact.abs() / n_max as f64;
    let agrees = (exact.is_finite() && estimate.value.is_finite())
        .then(|| (estimate.value - exact).abs() <= tolerance)
        .or(Some(exact == estimate.value));
    Ok(EntropyReport {
        vertex: a.index(),
        n_max,
        estimate,
        exact: Some(exact),
        truncation_trace: trace(g, a),
        transitive: g.is_transitive(),
        tolerance,
        agrees,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BigDeltaReport {
    pub vertex: u64,
    /// Growth of first-return counts `Z*_n(a)`.
    pub estimate: GrowthEstimate,
    /// Exact value at the base of a loop system: the log growth of the multiplicities.
    #[serde(with = "ext_f64::option")]
    pub exact: Option<f64>,
}

impl BigDeltaReport {
    pub fn value(&self) -> f64 {
        self.exact.unwrap_or(self.estimate.value)
    }
}

/// `Δ∞([a])`: exponential growth of first returns to `a`.
pub fn big_delta_inf(g: &CmsGraph, a: Symbol, n_max: usize) -> Result<BigDeltaReport> {
    let zs = first_return_count(g, a, n_max)?;
    let estimate = growth_rate(&zs, GrowthMethod::AffineFit, None)?;
    let exact = match g {
        CmsGraph::Loop(l) if l.locate(a) == Some(LoopPos::Base) => Some(tail_log_growth(l)),
        // first returns to a vertex of a finite graph eventually repeat no vertex, so vanish
        CmsGraph::Finite(_) => first_returns_vanish(&zs).then_some(f64::NEG_INFINITY),
        CmsGraph::Loop(_) => None,
    };
    Ok(BigDeltaReport { vertex: a.index(), estimate, exact })
}

fn first_returns_vanish(zs: &crate::counting::CountSeries) -> bool {
    // a first return visits no vertex twice, so its length is at most the vertex count
    let n = zs.certificate.explicit_cutoff as usize;
    zs.last_index() > n && zs.iter().skip(n).all(|(_, v)| v.bits() == 0)
}

/// Per-vertex `Δ∞([a])` and their minimum.
pub fn big_delta_inf_min(g: &CmsGraph, vertices: &[Symbol], n_max: usize) -> Result<(Vec<BigDeltaReport>, f64)> {
    let reports = vertices.iter().map(|&a| big_delta_inf(g, a, n_max)).collect::<Result<Vec<_>>>()?;
    let min = reports.iter().map(BigDeltaReport::value).fold(f64::INFINITY, f64::min);
    Ok((reports, min))
}
