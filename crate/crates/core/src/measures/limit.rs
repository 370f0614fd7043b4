use serde::{Deserialize, Serialize};

use super::{Component, CylinderMeasure, FiniteMarkov, MarkovMeasure, MeasureSequence, Mixture};
use crate::error::{Error, Result};
use crate::shift::{FiniteGraph, Symbol, Word};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitOptions {
    /// Cauchy tolerance over the final third of the sequence.
    pub tol: f64,
    /// Largest `q` in the mass ladder `Σ_{a ≤ q} μ([a])`.
    pub ladder_max_q: u64,
    /// Finite ambient graph, enabling reconstruction of a Markov limit from 1- and 2-cylinders.
    #[serde(skip)]
    pub ambient: Option<FiniteGraph>,
}

impl Default for LimitOptions {
    fn default() -> Self {
        LimitOptions { tol: 0.01, ladder_max_q: 64, ambient: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CylinderTrack {
    pub word: Vec<u64>,
    pub limit: f64,
    /// Largest deviation from the limit over the final third.
    pub tail_deviation: f64,
    pub converged: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitMethod {
    /// Components present unchanged throughout the final third carry the limit; the remaining
    /// weight drifts to zero on every tracked cylinder.
    Persistent,
    /// Finite ambient graph: the limit chain is rebuilt from 1- and 2-cylinder limits.
    Reconstructed,
    /// All tracked masses vanish.
    Zero,
    /// Only the mass ladder is available.
    Ladder,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CylinderLimit {
    pub tracks: Vec<CylinderTrack>,
    /// Indices into `tracks` that failed the Cauchy check.
    pub non_convergent: Vec<usize>,
    /// `(q, Σ_{a≤q} lim μ_n([a]))`, nondecreasing in `q`.
    pub mass_ladder: Vec<(u64, f64)>,
    /// `|μ|`.
    pub mass: f64,
    pub method: LimitMethod,
    /// `μ/|μ|` when `|μ| > 0` and the limit was identified.
    pub normalized: Option<Mixture>,
}

impl CylinderLimit {
    pub fn normalized_entropy(&self) -> Option<f64> {
        self.normalized.as_ref().map(CylinderMeasure::entropy)
    }
}

fn track(seq: &MeasureSequence, w: &Word, tail_start: usize, tol: f64) -> CylinderTrack {
    let values: Vec<f64> = seq.items.iter().map(|m| m.cylinder_mass(w)).collect();
    let limit = *values.last().expect("nonempty sequence");
    let tail_deviation = values[tail_start..].iter().map(|v| (v - limit).abs()).fold(0.0, f64::max);
    CylinderTrack {
        word: w.iter().map(|s| s.index()).collect(),
        limit,
        tail_deviation,
        converged: tail_deviation <= tol,
    }
}

/// Components appearing with the same weight in every item from `tail_start` on.
fn persistent(seq: &MeasureSequence, tail_start: usize) -> Vec<Component> {
    let last = seq.items.last().expect("nonempty sequence");
    last.parts.iter().filter(|c| seq.items[tail_start..].iter().all(|m| m.parts.contains(c))).cloned().collect()
}

/// Cylinder-topology limit of a measure sequence.
///
/// The limit of each tracked cylinder is read off the last item and accepted when the final
/// third stays within `tol` of it.
pub fn cylinder_limit(seq: &MeasureSequence, cylinders: &[Word], opts: &LimitOptions) -> Result<CylinderLimit> {
    let n = seq.items.len();
    if n < 3 {
        return Err(Error::PreconditionFailed(format!("need at least 3 measures, got {n}")));
    }
    let tail_start = (2 * n / 3).min(n - 2);
    let tracks: Vec<CylinderTrack> = cylinders.iter().map(|w| track(seq, w, tail_start, opts.tol)).collect();
    let non_convergent = tracks.iter().enumerate().filter(|(_, t)| !t.converged).map(|(i, _)| i).collect();

    let last = seq.items.last().expect("nonempty");
    let mut mass_ladder = Vec::new();
    let mut running = 0.0;
    let mut q = 1;
    let mut next_mark = 1;
    while q <= opts.ladder_max_q {
        running += last.cylinder_mass(&[Symbol::new(q)]);
        if q == next_mark || q == opts.ladder_max_q {
            mass_ladder.push((q, running));
            next_mark *= 2;
        }
        q += 1;
    }

    let keep = persistent(seq, tail_start);
    let kept_weight: f64 = keep.iter().map(|c| c.weight).sum();
    let candidate = Mixture { parts: keep };
    let matches = tracks
        .iter()
        .zip(cylinders)
        .all(|(t, w)| t.converged && (t.limit - candidate.cylinder_mass(w)).abs() <= opts.tol);
    let all_small = tracks.iter().all(|t| t.converged && t.limit <= opts.tol);

    let (method, mass, normalized) = if matches && kept_weight > opts.tol {
        let parts = candidate
            .parts
            .iter()
            .map(|c| Component { weight: c.weight / kept_weight, measure: c.measure.clone() })
            .collect();
        (LimitMethod::Persistent, kept_weight, Some(Mixture { parts }))
    } else if all_small {
        (LimitMethod::Zero, 0.0, None)
    } else if let Some(m) = opts.ambient.as_ref().and_then(|g| reconstruct(last, g, opts.tol)) {
        (LimitMethod::Reconstructed, 1.0, Some(Mixture::single(m)))
    } else {
        let top = mass_ladder.last().map_or(0.0, |e| e.1);
        (LimitMethod::Ladder, top, None)
    };
    Ok(CylinderLimit { tracks, non_convergent, mass_ladder, mass, method, normalized })
}

/// Markov chain with the 1- and 2-cylinder masses of `m` on a finite ambient graph.
fn reconstruct(m: &Mixture, g: &FiniteGraph, tol: f64) -> Option<MarkovMeasure> {
    let states: Vec<Symbol> =
        (1..=g.len() as u64).map(Symbol::new).filter(|&s| m.cylinder_mass(&[s]) > tol * 1e-3).collect();
    let rows: Vec<Vec<(usize, f64)>> = states
        .iter()
        .map(|&a| {
            let pa = m.cylinder_mass(&[a]);
            states
                .iter()
                .enumerate()
                .filter_map(|(j, &b)| {
                    let p = m.cylinder_mass(&[a, b]) / pa;
                    (p > 0.0).then_some((j, p))
                })
                .collect::<Vec<_>>()
        })
        .map(|mut r| {
            let s: f64 = r.iter().map(|e| e.1).sum();
            r.iter_mut().for_each(|e| e.1 /= s);
            r
        })
        .collect();
    FiniteMarkov::from_transitions(states, rows).ok().map(MarkovMeasure::Finite)
}
