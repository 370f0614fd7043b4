use serde::{Deserialize, Serialize};

use super::CountSeries;
use crate::error::{Error, Result};
use crate::numeric::{affine_fit, ext_f64, ln_big};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GrowthMethod {
    /// `max (1/n) log c_n` over the window.
    TailMax,
    /// Least-squares slope of `log c_n` against `n` over the window.
    AffineFit,
}

/// Estimate of `limsup (1/n) log c_n`. `value` is `-inf` when every count in the window
/// vanishes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthEstimate {
    #[serde(with = "ext_f64")]
    pub value: f64,
    /// `(n, (1/n) log c_n)` for every nonzero `c_n` with `n ≥ 1`.
    pub per_n: Vec<(usize, f64)>,
    /// Method actually used; an affine fit needs two nonzero points and otherwise falls back
    /// to the tail maximum.
    pub method: GrowthMethod,
    pub window: (usize, usize),
    /// Root-mean-square residual of the affine fit.
    #[serde(with = "ext_f64::option", default)]
    pub residual: Option<f64>,
}

impl GrowthEstimate {
    pub fn is_neg_infinite(&self) -> bool {
        self.value == f64::NEG_INFINITY
    }
}

/// Default window: the upper half `[n_max/2, n_max]` of the tabulated range.
pub fn default_window(s: &CountSeries) -> (usize, usize) {
    let hi = s.last_index();
    ((hi / 2).max(s.first_index).max(1), hi)
}

pub fn growth_rate(s: &CountSeries, method: GrowthMethod, window: Option<(usize, usize)>) -> Result<GrowthEstimate> {
    let (lo, hi) = window.unwrap_or_else(|| default_window(s));
    if lo > hi || hi > s.last_index() || lo < s.first_index {
        return Err(Error::EmptyWindow { lo, hi });
    }
    let logs: Vec<(usize, f64)> =
        s.iter().filter(|(n, c)| *n >= 1 && c.bits() > 0).map(|(n, c)| (n, ln_big(c))).collect();
    let per_n = logs.iter().map(|&(n, l)| (n, l / n as f64)).collect::<Vec<_>>();
    let in_window: Vec<(f64, f64)> =
        logs.iter().filter(|(n, _)| (lo..=hi).contains(n)).map(|&(n, l)| (n as f64, l)).collect();
    let tail_max =
        || per_n.iter().filter(|(n, _)| (lo..=hi).contains(n)).map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let (value, method, residual) = match method {
        GrowthMethod::AffineFit if in_window.len() >= 2 => {
            let (slope, _, rms) = affine_fit(&in_window).expect("two distinct abscissae");
            (slope, GrowthMethod::AffineFit, Some(rms))
        }
        _ => (tail_max(), GrowthMethod::TailMax, None),
    };
    Ok(GrowthEstimate { value, per_n, method, window: (lo, hi), residual })
}
