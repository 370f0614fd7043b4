//! Katok covering numbers: the fewest `n`-cylinders covering more than `1 - δ` of a measure,
//! and the entropy read off their growth.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::counting::csv_err;
use crate::error::{Error, Result};
use crate::measures::{CylinderMeasure, FiniteMarkov, MarkovMeasure};
use crate::numeric::{affine_fit, KahanSum};

/// Most positive-mass cylinders enumerated for one `n`.
pub const COVER_CAP: usize = 1 << 20;
/// Most support symbols accepted when a loop measure is made explicit.
pub const SUPPORT_CAP: usize = 1 << 16;

/// Masses of all positive-mass `n`-cylinders, in no particular order.
pub fn cylinder_masses(m: &FiniteMarkov, n: usize, cap: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::validation("n", "n must be at least 1"));
    }
    let mut layer: Vec<(usize, f64)> = m.pi().iter().enumerate().filter(|e| *e.1 > 0.0).map(|(i, &p)| (i, p)).collect();
    for _ in 1..n {
        let size: usize = layer.iter().map(|e| m.rows()[e.0].len()).sum();
        if size > cap {
            return Err(Error::Capacity { what: "positive n-cylinders", needed: size as u128, cap: cap as u128 });
        }
        layer = layer.iter().flat_map(|&(i, p)| m.rows()[i].iter().map(move |&(j, q)| (j, p * q))).collect();
    }
    if layer.len() > cap {
        return Err(Error::Capacity { what: "positive n-cylinders", needed: layer.len() as u128, cap: cap as u128 });
    }
    Ok(layer.into_iter().map(|e| e.1).collect())
}

/// Size of the shortest prefix of `masses`, sorted in decreasing order, whose sum exceeds
/// `1 - δ`. Cylinders are disjoint, so this is the minimum cover.
pub fn greedy_cover(mut masses: Vec<f64>, delta: f64) -> u64 {
    masses.sort_by(|a, b| b.total_cmp(a));
    let target = 1.0 - delta;
    let mut sum = KahanSum::default();
    for (i, &p) in masses.iter().enumerate() {
        sum.add(p);
        if sum.value() > target {
            return i as u64 + 1;
        }
    }
    masses.len() as u64
}

/// `N_μ(n, 1, δ)`.
pub fn covering_number(m: &MarkovMeasure, n: usize, delta: f64) -> Result<u64> {
    check_delta(delta)?;
    let f = m.to_finite(SUPPORT_CAP)?;
    Ok(greedy_cover(cylinder_masses(&f, n, COVER_CAP)?, delta))
}

fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta < 1.0 {
        Ok(())
    } else {
        Err(Error::validation("delta", "delta must lie in (0, 1)"))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoveringProfile {
    pub delta: f64,
    pub n: Vec<usize>,
    pub counts: Vec<u64>,
    /// `ln N / n`.
    pub rates: Vec<f64>,
    /// Slope of `ln N` against `n`.
    pub fitted_rate: f64,
    pub residual: f64,
}

impl CoveringProfile {
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["n", "N", "rate"]).map_err(csv_err)?;
        for ((n, c), r) in self.n.iter().zip(&self.counts).zip(&self.rates) {
            out.write_record([n.to_string(), c.to_string(), r.to_string()]).map_err(csv_err)?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Covering numbers for `n ∈ [n_min, n_max]` at one `δ`.
pub fn covering_profile(m: &MarkovMeasure, delta: f64, n_min: usize, n_max: usize) -> Result<CoveringProfile> {
    check_delta(delta)?;
    if n_min == 0 || n_max < n_min + 1 {
        return Err(Error::EmptyWindow { lo: n_min, hi: n_max });
    }
    let f = m.to_finite(SUPPORT_CAP)?;
    let ns: Vec<usize> = (n_min..=n_max).collect();
    let counts = ns
        .par_iter()
        .map(|&n| Ok(greedy_cover(cylinder_masses(&f, n, COVER_CAP)?, delta)))
        .collect::<Result<Vec<_>>>()?;
    let rates = ns.iter().zip(&counts).map(|(&n, &c)| (c as f64).ln() / n as f64).collect();
    let pts: Vec<(f64, f64)> = ns.iter().zip(&counts).map(|(&n, &c)| (n as f64, (c as f64).ln())).collect();
    let (fitted_rate, _, residual) = affine_fit(&pts).expect("at least two points");
    Ok(CoveringProfile { delta, n: ns, counts, rates, fitted_rate, residual })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KatokReport {
    pub entropy: f64,
    pub profiles: Vec<CoveringProfile>,
    /// `|fitted rate - entropy|` per profile.
    pub gaps: Vec<f64>,
    /// Largest difference between fitted rates at different `δ`.
    pub delta_spread: f64,
}

/// Fitted covering-number growth at each `δ`, compared with the entropy of `m`.
pub fn katok_estimate(m: &MarkovMeasure, deltas: &[f64], n_min: usize, n_max: usize) -> Result<KatokReport> {
    if deltas.is_empty() {
        return Err(Error::validation("delta", "at least one delta is needed"));
    }
    let profiles = deltas.iter().map(|&d| covering_profile(m, d, n_min, n_max)).collect::<Result<Vec<_>>>()?;
    let entropy = m.entropy();
    let gaps = profiles.iter().map(|p| (p.fitted_rate - entropy).abs()).collect();
    let rates: Vec<f64> = profiles.iter().map(|p| p.fitted_rate).collect();
    let delta_spread =
        rates.iter().copied().fold(f64::NEG_INFINITY, f64::max) - rates.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(KatokReport { entropy, profiles, gaps, delta_spread })
}

#[cfg(test)]
mod tests;
