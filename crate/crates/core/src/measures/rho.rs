use serde::{Deserialize, Serialize};

use super::CylinderMeasure;
use crate::error::Result;
use crate::numeric::KahanSum;
use crate::shift::{canonical_cylinders, FiniteGraph, DEFAULT_WORD_CAP};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RhoReport {
    pub value: f64,
    /// Total weight `2^{-K}` of the cylinders past the `K` that were summed; bounds the
    /// difference to the untruncated distance.
    pub truncation_error: f64,
    pub cylinders: usize,
    pub depth: usize,
}

/// `ρ(μ, ν) = Σ_k 2^{-k} |μ(C_k) - ν(C_k)|` over the admissible cylinders of `ambient` of length
/// at most `depth`, numbered breadth-first by length and lexicographically within a length
/// (`k` starts at 1).
pub fn rho_distance(
    ambient: &FiniteGraph,
    mu: &dyn CylinderMeasure,
    nu: &dyn CylinderMeasure,
    depth: usize,
) -> Result<RhoReport> {
    let cylinders = canonical_cylinders(ambient, depth, DEFAULT_WORD_CAP)?;
    let mut sum = KahanSum::default();
    let mut weight = 1.0;
    for c in &cylinders {
        weight *= 0.5;
        if weight == 0.0 {
            break;
        }
        sum.add(weight * (mu.cylinder_mass(c) - nu.cylinder_mass(c)).abs());
    }
    Ok(RhoReport {
        value: sum.value(),
        truncation_error: 0.5f64.powi(cylinders.len().min(i32::MAX as usize) as i32),
        cylinders: cylinders.len(),
        depth,
    })
}
