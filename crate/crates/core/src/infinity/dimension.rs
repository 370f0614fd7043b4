use serde::{Deserialize, Serialize};

use super::verify::tail_start;
use crate::counting::escape_count;
use crate::error::{Error, Result};
use crate::numeric::{affine_fit, ext_f64, ln_big};
use crate::shift::CmsGraph;

/// Terms below this count as negligible.
pub const SMALL_TERM: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesTerm {
    pub len: u64,
    /// `ln(e^{-sℓ} z_{ℓ-2}(M, q))`.
    #[serde(with = "ext_f64")]
    pub ln_term: f64,
    /// `ln` of the partial sum up to `ℓ`.
    #[serde(with = "ext_f64")]
    pub ln_partial: f64,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SeriesVerdict {
    Convergent,
    Diverging,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DimensionSeries {
    #[serde(rename = "M")]
    pub m: u64,
    pub q: u64,
    pub t: f64,
    /// `s = t ln 2`.
    pub s: f64,
    pub terms: Vec<SeriesTerm>,
    /// Slope of `ln term` against `ℓ` over the final third of the nonzero terms.
    #[serde(with = "ext_f64::option")]
    pub tail_slope: Option<f64>,
    /// First `ℓ` from which every term is below [`SMALL_TERM`].
    pub small_from: Option<u64>,
    pub verdict: SeriesVerdict,
}

/// Partial sums of `Z(s) = Σ_{ℓ ≥ 2} e^{-sℓ} z_{ℓ-2}(M, q)` at `s = t ln 2` for `ℓ ≤ len_max`.
/// The series converges for `s > δ∞(M, q)`.
pub fn dimension_series(g: &CmsGraph, m: u64, q: u64, t: f64, len_max: u64) -> Result<DimensionSeries> {
    if !(t > 0.0) {
        return Err(Error::validation("t", "t must be positive"));
    }
    if len_max < 2 {
        return Err(Error::validation("len_max", "len_max must be at least 2"));
    }
    let s = t * std::f64::consts::LN_2;
    let z = escape_count(g, m, q, (len_max - 2) as usize)?;
    let mut partial = f64::NEG_INFINITY;
    let terms: Vec<SeriesTerm> = (2..=len_max)
        .map(|len| {
            let ln_term = ln_big(z.get((len - 2) as usize)) - s * len as f64;
            partial = log_add(partial, ln_term);
            SeriesTerm { len, ln_term, ln_partial: partial }
        })
        .collect();
    let nonzero: Vec<&SeriesTerm> = terms.iter().filter(|t| t.ln_term > f64::NEG_INFINITY).collect();
    let small = SMALL_TERM.ln();
    let small_from = match terms.iter().rposition(|t| t.ln_term >= small) {
        Some(i) if i + 1 < terms.len() => Some(terms[i + 1].len),
        Some(_) => None,
        None => Some(2),
    };
    let (tail_slope, verdict) = if nonzero.len() < 3 {
        (None, if small_from.is_some() { SeriesVerdict::Convergent } else { SeriesVerdict::Inconclusive })
    } else {
        let tail = &nonzero[tail_start(nonzero.len())..];
        let pts: Vec<(f64, f64)> = tail.iter().map(|t| (t.len as f64, t.ln_term)).collect();
        let slope = affine_fit(&pts).map(|f| f.0);
        let max_tail = tail.iter().map(|t| t.ln_term).fold(f64::NEG_INFINITY, f64::max);
        let verdict = match slope {
            Some(k) if k < 0.0 && max_tail < small => SeriesVerdict::Convergent,
            Some(k) if k >= 0.0 => SeriesVerdict::Diverging,
            _ => SeriesVerdict::Inconclusive,
        };
        (slope, verdict)
    };
    Ok(DimensionSeries { m, q, t, s, terms, tail_slope, small_from, verdict })
}

fn log_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        hi
    } else {
        hi + (lo - hi).exp().ln_1p()
    }
}
