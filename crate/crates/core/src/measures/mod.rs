//! Invariant measures: stationary Markov chains on finite graphs and on loop systems, finite
//! mixtures of them, cylinder masses, entropy, limits along sequences and the `ρ` distance.

mod finite;
mod io;
mod limit;
mod loops;
mod rho;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::shift::Symbol;

pub use finite::{parry_measure, FiniteMarkov};
pub use io::{read_sequence, write_sequence};
pub use limit::{cylinder_limit, CylinderLimit, CylinderTrack, LimitMethod, LimitOptions};
pub use loops::{LengthLaw, LoopMarkov, MAX_LAW_LEN};
pub use rho::{rho_distance, RhoReport};

/// Anything that assigns masses to cylinders and has an entropy.
pub trait CylinderMeasure {
    /// Mass of the cylinder spanned by `w`; zero when `w` leaves the support.
    fn cylinder_mass(&self, w: &[Symbol]) -> f64;
    /// Kolmogorov–Sinai entropy.
    fn entropy(&self) -> f64;
}

/// An ergodic stationary Markov measure.
#[derive(Clone, Debug, PartialEq)]
pub enum MarkovMeasure {
    Finite(FiniteMarkov),
    Loop(LoopMarkov),
}

impl CylinderMeasure for MarkovMeasure {
    fn cylinder_mass(&self, w: &[Symbol]) -> f64 {
        match self {
            MarkovMeasure::Finite(m) => m.cylinder_mass(w),
            MarkovMeasure::Loop(m) => m.cylinder_mass(w),
        }
    }

    fn entropy(&self) -> f64 {
        match self {
            MarkovMeasure::Finite(m) => m.entropy(),
            MarkovMeasure::Loop(m) => m.entropy(),
        }
    }
}

impl MarkovMeasure {
    /// Explicit chain on the support (see [`LoopMarkov::to_finite`]).
    pub fn to_finite(&self, cap: usize) -> Result<FiniteMarkov> {
        match self {
            MarkovMeasure::Finite(m) => Ok(m.clone()),
            MarkovMeasure::Loop(m) => m.to_finite(cap),
        }
    }
}

impl From<FiniteMarkov> for MarkovMeasure {
    fn from(m: FiniteMarkov) -> Self {
        MarkovMeasure::Finite(m)
    }
}

impl From<LoopMarkov> for MarkovMeasure {
    fn from(m: LoopMarkov) -> Self {
        MarkovMeasure::Loop(m)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Component {
    pub weight: f64,
    pub measure: MarkovMeasure,
}

/// A finite convex combination of Markov measures. Masses are linear and entropy is affine
/// in the weights.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mixture {
    pub parts: Vec<Component>,
}

impl Mixture {
    pub fn new(parts: Vec<(f64, MarkovMeasure)>) -> Result<Self> {
        let total: f64 = parts.iter().map(|p| p.0).sum();
        if parts.is_empty() || parts.iter().any(|p| p.0 < 0.0) || (total - 1.0).abs() > 1e-12 {
            return Err(Error::validation("mixture.weights", "weights must be nonnegative and sum to one"));
        }
        Ok(Mixture { parts: parts.into_iter().map(|(weight, measure)| Component { weight, measure }).collect() })
    }

    pub fn single(m: impl Into<MarkovMeasure>) -> Self {
        Mixture { parts: vec![Component { weight: 1.0, measure: m.into() }] }
    }

    /// Sum of the weights (one for a probability mixture; less for sub-mixtures).
    pub fn total_weight(&self) -> f64 {
        self.parts.iter().map(|p| p.weight).sum()
    }
}

impl CylinderMeasure for Mixture {
    fn cylinder_mass(&self, w: &[Symbol]) -> f64 {
        self.parts.iter().map(|p| p.weight * p.measure.cylinder_mass(w)).sum()
    }

    fn entropy(&self) -> f64 {
        self.parts.iter().map(|p| p.weight * p.measure.entropy()).sum()
    }
}

/// A sequence `(μ_n)` of measures on one ambient shift.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureSequence {
    pub items: Vec<Mixture>,
    pub tag: Option<String>,
}

impl MeasureSequence {
    pub fn new(items: Vec<Mixture>, tag: impl Into<String>) -> Self {
        MeasureSequence { items, tag: Some(tag.into()) }
    }

    pub fn entropies(&self) -> Vec<f64> {
        self.items.iter().map(CylinderMeasure::entropy).collect()
    }
}
