use std::sync::Arc;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{LoopMarkov, MarkovMeasure, MeasureSequence, Mixture};
use crate::shift::{CmsGraph, LoopSystem};

/// Increasing loop-length cutoffs `k_1 < k_2 < …`. Step `i` uses the maximal-entropy measure
/// of the loops with lengths in `[k_i, width · k_i]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriftSchedule {
    pub cutoffs: Vec<u64>,
    pub width: u64,
}

impl DriftSchedule {
    /// `k_i = ceil(4 · 1.35^i)` for `i = 1..=steps`, single-length windows.
    pub fn geometric(steps: usize) -> Self {
        let mut cutoffs: Vec<u64> = (1..=steps as i32).map(|i| (4.0 * 1.35f64.powi(i)).ceil() as u64).collect();
        cutoffs.dedup();
        DriftSchedule { cutoffs, width: 1 }
    }

    /// Shift the cutoffs up to the first length that carries loops, keeping them increasing.
    fn realized(&self, sys: &LoopSystem) -> Result<Vec<u64>> {
        let mut out: Vec<u64> = Vec::with_capacity(self.cutoffs.len());
        for &k in &self.cutoffs {
            let mut k = k.max(out.last().map_or(1, |p| p + 1));
            while sys.multiplicity(k).is_zero() {
                k += 1;
                if sys.max_loop_len().is_some_and(|m| k > m) {
                    return Err(Error::NotDrifting(format!("no loops of length {k} or more")));
                }
            }
            out.push(k);
        }
        Ok(out)
    }
}

impl Default for DriftSchedule {
    fn default() -> Self {
        DriftSchedule::geometric(12)
    }
}

/// The sequences used to exercise the escape-of-mass inequality.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// The measure of maximal entropy at every step.
    ConstantMme,
    /// Maximal-entropy measures on ever longer loops.
    PureDrift,
    /// `½ μ_max + ½ drift_n`.
    HalfMmeHalfDrift,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::ConstantMme, Family::PureDrift, Family::HalfMmeHalfDrift];

    pub fn name(self) -> &'static str {
        match self {
            Family::ConstantMme => "constant-mme",
            Family::PureDrift => "pure-drift",
            Family::HalfMmeHalfDrift => "half-mme-half-drift",
        }
    }
}

pub(crate) fn loop_system(g: &CmsGraph) -> Result<Arc<LoopSystem>> {
    match g {
        CmsGraph::Loop(l) => Ok(Arc::new(l.clone())),
        CmsGraph::Finite(_) => {
            Err(Error::NotDrifting("a finite graph carries no sequence escaping to infinity".into()))
        }
    }
}

pub(crate) fn drift_measures(
    sys: &Arc<LoopSystem>,
    schedule: &DriftSchedule,
) -> Result<(Vec<u64>, Vec<MarkovMeasure>)> {
    if schedule.cutoffs.is_empty() || schedule.width == 0 {
        return Err(Error::validation("schedule", "cutoffs must be nonempty and width positive"));
    }
    let ks = schedule.realized(sys)?;
    let ms = ks
        .iter()
        .map(|&k| LoopMarkov::window_max_entropy(sys.clone(), k, k * schedule.width).map(MarkovMeasure::from))
        .collect::<Result<_>>()?;
    Ok((ks, ms))
}

/// Build `steps` members of a family on a loop system.
pub fn family_sequence(g: &CmsGraph, family: Family, steps: usize) -> Result<MeasureSequence> {
    let sys = loop_system(g).map_err(|_| Error::PreconditionFailed("families are defined on loop systems".into()))?;
    let mme = || LoopMarkov::max_entropy(sys.clone()).map(MarkovMeasure::from);
    let items = match family {
        Family::ConstantMme => {
            let m = mme()?;
            vec![Mixture::single(m); steps]
        }
        Family::PureDrift => {
            let (_, ds) = drift_measures(&sys, &DriftSchedule::geometric(steps))?;
            ds.into_iter().map(Mixture::single).collect()
        }
        Family::HalfMmeHalfDrift => {
            let m = mme()?;
            let (_, ds) = drift_measures(&sys, &DriftSchedule::geometric(steps))?;
            ds.into_iter().map(|d| Mixture::new(vec![(0.5, m.clone()), (0.5, d)])).collect::<Result<_>>()?
        }
    };
    Ok(MeasureSequence::new(items, family.name()))
}
