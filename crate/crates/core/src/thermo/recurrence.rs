use serde::{Deserialize, Serialize};

use super::entropy::gurevich_entropy;
use super::grid::{delta_inf, GridSpec, InfinityReport};
use super::loop_gf::{loop_gf, tail_log_growth, LoopGf, RootStatus};
use crate::error::{Error, Result};
use crate::numeric::ext_f64;
use crate::shift::{CmsGraph, Symbol};
use crate::spectral::component_radius;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RecurrenceClass {
    Transient,
    NullRecurrent,
    PositiveRecurrent,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecurrenceVerdict {
    pub class: RecurrenceClass,
    /// Decided from closed-form data rather than numerical heuristics.
    pub exact: bool,
    /// Generating-function analysis for loop systems.
    pub evidence: Option<LoopGf>,
    pub reason: String,
}

/// Recurrence class of the zero potential.
///
/// Loop systems are decided from `f(x) = Σ a_ℓ x^ℓ`: transient iff `f(R) < 1`, positive
/// recurrent iff the root `x*` exists and `Σ ℓ a_ℓ x*^ℓ < ∞`, null recurrent iff `x* = R` and
/// that mean diverges. Finite irreducible graphs are positive recurrent.
pub fn classify(g: &CmsGraph, a: Symbol) -> Result<RecurrenceVerdict> {
    if !g.contains(a) {
        return Err(Error::UnknownSymbol(a.index()));
    }
    let sys = match g {
        CmsGraph::Finite(f) => {
            let cyclic = component_radius(f, a.index() as usize - 1) > 0.0;
            return Ok(RecurrenceVerdict {
                class: if cyclic { RecurrenceClass::PositiveRecurrent } else { RecurrenceClass::Inconclusive },
                exact: cyclic,
                evidence: None,
                reason: if cyclic { "finite irreducible component".into() } else { "vertex lies on no cycle".into() },
            });
        }
        CmsGraph::Loop(l) => l,
    };
    let gf = loop_gf(sys);
    let (class, reason) = match gf.status {
        RootStatus::Absent => (RecurrenceClass::Transient, "f(R) < 1".to_string()),
        RootStatus::Interior => (RecurrenceClass::PositiveRecurrent, "root below the radius".to_string()),
        RootStatus::AtRadius if gf.mean.lo.is_infinite() => {
            (RecurrenceClass::NullRecurrent, "f(R) = 1 and the mean diverges".to_string())
        }
        RootStatus::AtRadius if gf.mean.hi.is_finite() => {
            (RecurrenceClass::PositiveRecurrent, "f(R) = 1 with finite mean".to_string())
        }
        _ => (RecurrenceClass::Inconclusive, format!("f(R) in [{}, {}]", gf.f_at_radius.lo, gf.f_at_radius.hi)),
    };
    Ok(RecurrenceVerdict { exact: class != RecurrenceClass::Inconclusive, class, evidence: Some(gf), reason })
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SprVerdict {
    Spr,
    NotSpr,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SprReport {
    pub verdict: SprVerdict,
    #[serde(with = "ext_f64")]
    pub h_top: f64,
    /// `Δ∞` at the base from the multiplicity growth (loop systems) or `-inf` (finite graphs).
    #[serde(with = "ext_f64::option")]
    pub exact_delta_inf: Option<f64>,
    /// Headline of the `δ∞(M, q)` grid.
    #[serde(with = "ext_f64::option")]
    pub grid_delta_inf: Option<f64>,
    /// `h_top` minus the entropy at infinity used for the verdict.
    #[serde(with = "ext_f64")]
    pub margin: f64,
    pub threshold: f64,
    /// `"exact"` or `"grid"`.
    pub route: String,
    pub grid: Option<InfinityReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SprOptions {
    pub threshold: f64,
    /// Grid for the numerical route; `None` skips it.
    pub grid: Option<GridSpec>,
}

impl Default for SprOptions {
    fn default() -> Self {
        SprOptions { threshold: 0.02, grid: Some(GridSpec::default()) }
    }
}

/// Strong positive recurrence: entropy at infinity strictly below `h_top`.
pub fn is_spr(g: &CmsGraph, opts: &SprOptions) -> Result<SprReport> {
    let base = Symbol::new(1);
    let (h_top, exact) = match g {
        CmsGraph::Loop(l) => (loop_gf(l).log_growth, Some(tail_log_growth(l))),
        CmsGraph::Finite(_) => {
            let h = gurevich_entropy(g, base, 8)?.value();
            (h, Some(f64::NEG_INFINITY))
        }
    };
    let grid = opts.grid.as_ref().map(|s| delta_inf(g, s)).transpose()?;
    let grid_value = grid.as_ref().and_then(|r| r.headline);
    let (delta, route) = match (exact, grid_value) {
        (Some(d), _) => (d, "exact"),
        (None, Some(d)) => (d, "grid"),
        (None, None) => (f64::NAN, "none"),
    };
    let margin = h_top - delta;
    let verdict = if margin.is_nan() {
        SprVerdict::Inconclusive
    } else if margin > opts.threshold {
        SprVerdict::Spr
    } else if route == "exact" {
        SprVerdict::NotSpr
    } else {
        SprVerdict::Inconclusive
    };
    Ok(SprReport {
        verdict,
        h_top,
        exact_delta_inf: exact,
        grid_delta_inf: grid_value,
        margin,
        threshold: opts.threshold,
        route: route.into(),
        grid,
    })
}
