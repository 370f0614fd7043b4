use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::counting::{csv_err, escape_tables, growth_rate, GrowthEstimate, GrowthMethod};
use crate::error::{Error, Result};
use crate::numeric::ext_f64;
use crate::shift::CmsGraph;

use super::loop_gf::tail_log_growth;

/// Parameters of a `δ∞(M, q)` grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    #[serde(rename = "M")]
    pub ms: Vec<u64>,
    pub qs: Vec<u64>,
    pub n_max: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { ms: vec![8, 16, 32, 64], qs: vec![1, 2, 4], n_max: 256 }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellStatus {
    Estimated,
    /// Every count in the window vanishes.
    NoEscape,
    /// Too few nonzero counts in the window to fit.
    Undetermined,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridCell {
    #[serde(rename = "M")]
    pub m: u64,
    pub q: u64,
    pub status: CellStatus,
    #[serde(with = "ext_f64")]
    pub value: f64,
    pub estimate: Option<GrowthEstimate>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InfinityReport {
    pub grid: GridSpec,
    pub cells: Vec<GridCell>,
    /// Minimum over decided cells. Only an upper approximation of the infimum over all
    /// `(M, q)`.
    #[serde(with = "ext_f64::option")]
    pub headline: Option<f64>,
    pub upper_approximation: bool,
    /// Cell values nonincreasing in `M` for every `q`.
    pub monotone_in_m: bool,
    /// Exact value when known (loop systems, finite graphs).
    #[serde(with = "ext_f64::option")]
    pub exact: Option<f64>,
}

/// Minimum number of nonzero counts needed inside a cell window.
pub const MIN_FIT_POINTS: usize = 8;

/// Window for `z_n(M, q)`: the upper half of the range, and late enough that the visit budget
/// `⌊(n+2)/M⌋` is at least 3.
pub fn cell_window(m: u64, n_max: usize) -> (usize, usize) {
    ((n_max / 2).max(3 * m as usize - 2), n_max)
}

pub fn delta_inf(g: &CmsGraph, spec: &GridSpec) -> Result<InfinityReport> {
    if spec.ms.is_empty() || spec.qs.is_empty() {
        return Err(Error::validation("grid", "M and q lists must be nonempty"));
    }
    let m_min = *spec.ms.iter().min().expect("nonempty");
    let tables = escape_tables(g, &spec.qs, m_min, spec.n_max)?;
    let pairs: Vec<(u64, usize)> = spec.ms.iter().flat_map(|&m| (0..spec.qs.len()).map(move |qi| (m, qi))).collect();
    let cells = pairs
        .par_iter()
        .map(|&(m, qi)| {
            let series = tables[qi].series(m);
            let (lo, hi) = cell_window(m, spec.n_max);
            let q = spec.qs[qi];
            if lo > hi {
                return Ok(GridCell { m, q, status: CellStatus::Undetermined, value: f64::NAN, estimate: None });
            }
            let nonzero = series.iter().filter(|(n, v)| (lo..=hi).contains(n) && v.bits() > 0).count();
            let est = growth_rate(&series, GrowthMethod::AffineFit, Some((lo, hi)))?;
            let status = match nonzero {
                0 => CellStatus::NoEscape,
                k if k < MIN_FIT_POINTS => CellStatus::Undetermined,
                _ => CellStatus::Estimated,
            };
            let value = match status {
                CellStatus::Undetermined => f64::NAN,
                _ => est.value,
            };
            Ok(GridCell { m, q, status, value, estimate: Some(est) })
        })
        .collect::<Result<Vec<_>>>()?;
    let headline = cells.iter().filter(|c| c.status != CellStatus::Undetermined).map(|c| c.value).reduce(f64::min);
    let mut monotone_in_m = true;
    for &q in &spec.qs {
        let mut row: Vec<&GridCell> =
            cells.iter().filter(|c| c.q == q && c.status != CellStatus::Undetermined).collect();
        row.sort_by_key(|c| c.m);
        monotone_in_m &= row.windows(2).all(|w| w[1].value <= w[0].value + 1e-9);
    }
    let exact = match g {
        CmsGraph::Loop(l) => Some(tail_log_growth(l)),
        CmsGraph::Finite(_) => Some(f64::NEG_INFINITY),
    };
    Ok(InfinityReport { grid: spec.clone(), cells, headline, upper_approximation: true, monotone_in_m, exact })
}

impl InfinityReport {
    /// Cell values as a matrix: one row per `M`, one column per `q`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let mut header = vec!["M".to_string()];
        header.extend(self.grid.qs.iter().map(|q| format!("q={q}")));
        out.write_record(&header).map_err(csv_err)?;
        for &m in &self.grid.ms {
            let mut row = vec![m.to_string()];
            for &q in &self.grid.qs {
                let cell = self.cells.iter().find(|c| c.m == m && c.q == q).expect("full grid");
                row.push(ext_f64::format(cell.value));
            }
            out.write_record(&row).map_err(csv_err)?;
        }
        out.flush()?;
        Ok(())
    }
}
