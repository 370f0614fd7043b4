//! Graph presentations of countable Markov shifts.
//!
//! A shift is either an explicit finite directed graph or a *loop system*: a base vertex with
//! `a_ℓ` simple loops of each length `ℓ`. Symbols are identified with the positive integers
//! through a canonical [enumeration](LoopSystem::locate): the base is `1`, loops are ordered by
//! length and then insertion index, and the internal vertices of each loop are numbered
//! consecutively.

mod finite;
mod loops;
mod spec;
mod truncation;
mod words;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use finite::FiniteGraph;
pub use loops::{LoopId, LoopPos, LoopSystem, Multiplicities, Tail};
pub use spec::{load_graph, load_graph_str, parse_spec, GraphSpec, LoopEntry, TailRule, TailSpec};
pub use truncation::{truncate, Truncation};
pub use words::{canonical_cylinders, enumerate_words, DEFAULT_WORD_CAP};

/// A letter of the alphabet, identified with a positive integer.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct Symbol(u64);

impl Symbol {
    /// Panics on zero; use [`Symbol::try_new`] for untrusted input.
    pub fn new(index: u64) -> Self {
        Self::try_new(index).expect("symbols are positive integers")
    }

    pub fn try_new(index: u64) -> Result<Self> {
        if index == 0 {
            Err(Error::validation("symbol", "symbols start at 1"))
        } else {
            Ok(Symbol(index))
        }
    }

    pub fn index(self) -> u64 {
        self.0
    }
}

impl TryFrom<u64> for Symbol {
    type Error = Error;
    fn try_from(v: u64) -> Result<Self> {
        Symbol::try_new(v)
    }
}

impl From<Symbol> for u64 {
    fn from(s: Symbol) -> u64 {
        s.0
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// An admissible word `x_0 … x_{k-1}`; identified with the cylinder it spans.
pub type Word = Vec<Symbol>;

/// Convenience constructor for words in tests and examples.
pub fn word(indices: &[u64]) -> Word {
    indices.iter().map(|&i| Symbol::new(i)).collect()
}

/// The metric on sequence space evaluated on two (finite prefixes of) sequences:
/// `1` when the first symbols differ, `2^{-k}` when they agree exactly on the first `k`
/// places, and `0` when no difference is visible.
pub fn distance(x: &[Symbol], y: &[Symbol]) -> f64 {
    match x.iter().zip(y).position(|(a, b)| a != b) {
        Some(0) => 1.0,
        Some(k) => 0.5f64.powi(k as i32),
        None => 0.0,
    }
}

/// A countable Markov shift presentation. Immutable once loaded.
#[derive(Clone, Debug, PartialEq)]
pub enum CmsGraph {
    Finite(FiniteGraph),
    Loop(LoopSystem),
}

impl CmsGraph {
    pub fn is_edge(&self, a: Symbol, b: Symbol) -> bool {
        match self {
            CmsGraph::Finite(g) => g.has_edge(a, b),
            CmsGraph::Loop(l) => l.is_edge(a, b),
        }
    }

    pub fn contains(&self, s: Symbol) -> bool {
        match self {
            CmsGraph::Finite(g) => s.index() as usize <= g.len(),
            CmsGraph::Loop(l) => l.locate(s).is_some(),
        }
    }

    pub fn is_admissible(&self, w: &[Symbol]) -> bool {
        !w.is_empty() && w.iter().all(|&s| self.contains(s)) && w.windows(2).all(|p| self.is_edge(p[0], p[1]))
    }

    /// Number of symbols, `None` for an infinite alphabet.
    pub fn symbol_count(&self) -> Option<u64> {
        match self {
            CmsGraph::Finite(g) => Some(g.len() as u64),
            CmsGraph::Loop(l) => l.symbol_count(),
        }
    }

    pub fn as_loop_system(&self) -> Option<&LoopSystem> {
        match self {
            CmsGraph::Loop(l) => Some(l),
            CmsGraph::Finite(_) => None,
        }
    }

    pub fn as_finite(&self) -> Option<&FiniteGraph> {
        match self {
            CmsGraph::Finite(g) => Some(g),
            CmsGraph::Loop(_) => None,
        }
    }

    /// Every loop system is transitive (all loops pass through the base); finite graphs are
    /// checked for strong connectivity.
    pub fn is_transitive(&self) -> bool {
        match self {
            CmsGraph::Finite(g) => g.is_strongly_connected(),
            CmsGraph::Loop(_) => true,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distance_follows_first_disagreement() {
        assert_eq!(distance(&word(&[1, 2]), &word(&[2, 2])), 1.0);
        assert_eq!(distance(&word(&[1, 2, 3]), &word(&[1, 2, 1])), 0.25);
        assert_eq!(distance(&word(&[1, 2]), &word(&[1, 2])), 0.0);
    }

    #[test]
    fn zero_is_not_a_symbol() {
        assert!(Symbol::try_new(0).is_err());
        assert_eq!(Symbol::new(7).index(), 7);
    }
}
