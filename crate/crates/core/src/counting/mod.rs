//! Exact big-integer path counts and growth-rate estimation.
//!
//! Four families of counts are provided, all for the zero potential:
//! closed walks `Z_n(a)` at a vertex, first-return loops `Z*_n(a)`, and escape counts
//! `z_n(M, q)`: words `[x_0, …, x_{n+1}]` with both endpoints in `{1..q}` visiting `{1..q}`
//! at most `⌊(n+2)/M⌋` times (optionally with pinned endpoints `a`, `b`).

mod growth;
mod walk;

use std::io::Write;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::big_dec;
use crate::shift::{CmsGraph, Symbol};

pub use growth::{growth_rate, GrowthEstimate, GrowthMethod};
use walk::WalkGraph;
pub use walk::{Certificate, MAX_CERTIFIED_LEN};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CountKind {
    /// Closed walks at a vertex.
    Zn,
    /// First-return loops at a vertex.
    ZnStar,
    /// Escape counts with free small endpoints.
    #[serde(rename = "zn")]
    Escape,
    /// Escape counts with pinned endpoints.
    #[serde(rename = "znAB")]
    EscapeAb,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<u64>,
    #[serde(rename = "M", skip_serializing_if = "Option::is_none")]
    pub m: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<u64>,
}

/// An exact count sequence `c_first, c_{first+1}, …`.
///
/// Closed-walk sequences start at `n = 1`; escape sequences start at `n = 0`, where `z_n`
/// counts words with `n + 2` symbols.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountSeries {
    pub kind: CountKind,
    pub first_index: usize,
    #[serde(with = "big_dec::vec")]
    pub values: Vec<BigUint>,
    pub params: CountParams,
    pub certificate: Certificate,
}

impl CountSeries {
    pub fn last_index(&self) -> usize {
        self.first_index + self.values.len() - 1
    }

    /// `c_n`; panics outside the tabulated range.
    pub fn get(&self, n: usize) -> &BigUint {
        &self.values[n - self.first_index]
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &BigUint)> {
        self.values.iter().enumerate().map(move |(i, v)| (i + self.first_index, v))
    }

    /// Two columns: `n` and the count as a decimal string.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["n", "count"]).map_err(csv_err)?;
        for (n, v) in self.iter() {
            out.write_record([n.to_string(), v.to_string()]).map_err(csv_err)?;
        }
        out.flush()?;
        Ok(())
    }
}

pub(crate) fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

fn vertex(g: &CmsGraph, a: Symbol) -> Result<usize> {
    if g.contains(a) {
        Ok(a.index() as usize - 1)
    } else {
        Err(Error::UnknownSymbol(a.index()))
    }
}

fn walk_series(g: &CmsGraph, a: Symbol, n_max: usize, first_return: bool) -> Result<CountSeries> {
    let v = vertex(g, a)?;
    let wg = WalkGraph::build(g, a.index(), n_max as u64)?;
    let values = wg.closed_walks(v, n_max, first_return);
    Ok(CountSeries {
        kind: if first_return { CountKind::ZnStar } else { CountKind::Zn },
        first_index: 1,
        values: values[1..].to_vec(),
        params: CountParams { a: Some(a.index()), ..Default::default() },
        certificate: wg.certificate,
    })
}

/// `Z_n(a)` for `1 ≤ n ≤ n_max`: closed walks of length `n` at `a`.
pub fn loop_count(g: &CmsGraph, a: Symbol, n_max: usize) -> Result<CountSeries> {
    walk_series(g, a, n_max, false)
}

/// `Z*_n(a)` for `1 ≤ n ≤ n_max`: closed walks of length `n` at `a` not visiting `a` in between.
pub fn first_return_count(g: &CmsGraph, a: Symbol, n_max: usize) -> Result<CountSeries> {
    walk_series(g, a, n_max, true)
}

/// Escape counts for several budgets `M` at once, sharing one dynamic program.
pub struct EscapeTable {
    q: u64,
    m_min: u64,
    pins: Option<(u64, u64)>,
    table: Vec<Vec<BigUint>>,
    certificate: Certificate,
}

impl EscapeTable {
    /// Tabulate for `n = 0..=n_max`, supporting every `M ≥ m_min`.
    pub fn compute(
        g: &CmsGraph,
        q: u64,
        pins: Option<(Symbol, Symbol)>,
        m_min: u64,
        n_max: usize,
    ) -> Result<EscapeTable> {
        if q == 0 || m_min == 0 {
            return Err(Error::validation("q/M", "q and M must be positive"));
        }
        let pin_idx = match pins {
            Some((a, b)) => Some((vertex(g, a)?, vertex(g, b)?)),
            None => None,
        };
        let cutoff = pins.map_or(q, |(a, b)| q.max(a.index()).max(b.index()));
        let wg = WalkGraph::build(g, cutoff, n_max as u64 + 1)?;
        let small = (q as usize).min(wg.len());
        let k_cap = (n_max + 2) / m_min as usize;
        let table = match pin_idx {
            Some((a, b)) => {
                let (a_ok, b_ok) = (a < small, b < small);
                wg.constrained_walks(small, |v| a_ok && v == a, |v| b_ok && v == b, n_max, k_cap)
            }
            None => wg.constrained_walks(small, |v| v < small, |v| v < small, n_max, k_cap),
        };
        Ok(EscapeTable {
            q,
            m_min,
            pins: pins.map(|(a, b)| (a.index(), b.index())),
            table,
            certificate: wg.certificate,
        })
    }

    pub fn n_max(&self) -> usize {
        self.table.len() - 1
    }

    /// `z_n(M, q)` for `n = 0..=n_max`.
    pub fn series(&self, m: u64) -> CountSeries {
        assert!(m >= self.m_min, "M = {m} below the tabulated minimum {}", self.m_min);
        let values =
            self.table.iter().enumerate().map(|(n, row)| row.iter().take((n + 2) / m as usize + 1).sum()).collect();
        CountSeries {
            kind: if self.pins.is_some() { CountKind::EscapeAb } else { CountKind::Escape },
            first_index: 0,
            values,
            params: CountParams { a: self.pins.map(|p| p.0), b: self.pins.map(|p| p.1), m: Some(m), q: Some(self.q) },
            certificate: self.certificate.clone(),
        }
    }
}

/// `z_n(M, q)` for `0 ≤ n ≤ n_max`.
pub fn escape_count(g: &CmsGraph, m: u64, q: u64, n_max: usize) -> Result<CountSeries> {
    Ok(EscapeTable::compute(g, q, None, m, n_max)?.series(m))
}

/// `z_n(M, q, a, b)`: escape counts with `x_0 = a` and `x_{n+1} = b`.
pub fn escape_count_ab(g: &CmsGraph, m: u64, q: u64, a: Symbol, b: Symbol, n_max: usize) -> Result<CountSeries> {
    Ok(EscapeTable::compute(g, q, Some((a, b)), m, n_max)?.series(m))
}

/// Escape tables for each `q`, computed in parallel.
pub fn escape_tables(g: &CmsGraph, qs: &[u64], m_min: u64, n_max: usize) -> Result<Vec<EscapeTable>> {
    qs.par_iter().map(|&q| EscapeTable::compute(g, q, None, m_min, n_max)).collect()
}
