//! Entropy at infinity for countable Markov shifts.
//!
//! The crate works with two presentations of a shift: explicit finite graphs and loop systems
//! (a base vertex with `a_ℓ` simple loops of each length). On top of exact big-integer path
//! counts it estimates Gurevich entropy, the entropy at infinity through three independent
//! routes, the recurrence class, and runs checks of escape-of-mass inequalities on sequences of
//! Markov measures.

pub mod counting;
pub mod density;
pub mod error;
pub mod infinity;
pub mod katok;
pub mod measures;
pub mod numeric;
pub mod shift;
pub mod spectral;
pub mod thermo;

pub use error::{Error, Result};
pub use shift::{CmsGraph, Symbol, Word};
