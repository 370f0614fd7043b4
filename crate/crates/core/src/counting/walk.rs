//! Path-counting graphs with compressed loop tails.
//!
//! A loop system has infinitely many vertices, but a walk of length `L` through the base can
//! only enter loops of length at most `L`, and every vertex of a loop beyond the explicit cutoff
//! is a "large" symbol. Such a walk segment is therefore replaced by one weighted edge
//! `base → base` of length `ℓ` whose weight is the number of loops of length `ℓ` lying entirely
//! beyond the cutoff. The partially explicit loop straddling the cutoff gets a shortcut edge
//! from its last explicit vertex back to the base.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::shift::{CmsGraph, LoopPos, LoopSystem};

/// Longest compressed edge accepted; beyond this the multiplicities are not tabulated.
pub const MAX_CERTIFIED_LEN: u64 = 1 << 14;

/// Records which finite graph stood in for the shift and for which path lengths it is exact.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    /// Symbols `1..=explicit_cutoff` are kept as vertices.
    pub explicit_cutoff: u64,
    /// All walks with at most this many steps are represented.
    pub complete_up_to: u64,
    /// Number of compressed loop edges.
    pub compressed_edges: usize,
}

#[derive(Clone, Debug)]
pub(crate) struct Edge {
    pub to: usize,
    pub len: usize,
    pub weight: BigUint,
}

/// Vertex `i` is symbol `i + 1`.
#[derive(Clone, Debug)]
pub(crate) struct WalkGraph {
    pub out: Vec<Vec<Edge>>,
    pub max_len: usize,
    pub certificate: Certificate,
}

fn unit(to: usize) -> Edge {
    Edge { to, len: 1, weight: BigUint::one() }
}

impl WalkGraph {
    pub fn build(g: &CmsGraph, cutoff: u64, max_steps: u64) -> Result<WalkGraph> {
        match g {
            CmsGraph::Finite(f) => {
                let out = (0..f.len()).map(|v| f.successors(v).iter().map(|&w| unit(w)).collect()).collect();
                Ok(WalkGraph {
                    out,
                    max_len: 1,
                    certificate: Certificate {
                        explicit_cutoff: f.len() as u64,
                        complete_up_to: u64::MAX,
                        compressed_edges: 0,
                    },
                })
            }
            CmsGraph::Loop(l) => Self::build_loops(l, cutoff, max_steps),
        }
    }

    fn build_loops(l: &LoopSystem, cutoff: u64, max_steps: u64) -> Result<WalkGraph> {
        if max_steps > MAX_CERTIFIED_LEN {
            return Err(Error::TruncationInsufficient(format!(
                "walks of length {max_steps} exceed the tabulated loop lengths ({MAX_CERTIFIED_LEN})"
            )));
        }
        let positions = l.positions_upto(cutoff.max(1));
        let n = positions.len();
        let mut out: Vec<Vec<Edge>> = vec![Vec::new(); n];
        let table = l.multiplicity_table(max_steps);
        if table.get(1).is_some_and(|a| a.is_one()) {
            out[0].push(unit(0));
        }
        let mut touched = vec![0u64; table.len()];
        let mut last_copy = None;
        for (i, &(_, pos)) in positions.iter().enumerate() {
            let LoopPos::Internal { id, offset } = pos else { continue };
            if last_copy != Some(id) {
                last_copy = Some(id);
                if (id.len as usize) < touched.len() {
                    touched[id.len as usize] += 1;
                }
            }
            if offset == 1 {
                out[0].push(unit(i));
            }
            if offset + 1 == id.len {
                out[i].push(unit(0));
            } else if i + 1 < n {
                out[i].push(unit(i + 1));
            } else {
                let rest = id.len - offset;
                if rest <= max_steps {
                    out[i].push(Edge { to: 0, len: rest as usize, weight: BigUint::one() });
                }
            }
        }
        let mut compressed = 0;
        for (len, a) in table.iter().enumerate().skip(2) {
            let explicit = BigUint::from(touched[len]);
            if *a > explicit {
                out[0].push(Edge { to: 0, len, weight: a - explicit });
                compressed += 1;
            }
        }
        let max_len = out.iter().flatten().map(|e| e.len).max().unwrap_or(1);
        Ok(WalkGraph {
            out,
            max_len,
            certificate: Certificate {
                explicit_cutoff: n as u64,
                complete_up_to: max_steps,
                compressed_edges: compressed,
            },
        })
    }

    pub fn len(&self) -> usize {
        self.out.len()
    }

    /// Closed walks at `a` of each length `0..=n_max`. With `first_return`, walks may not
    /// visit `a` strictly between their endpoints.
    pub fn closed_walks(&self, a: usize, n_max: usize, first_return: bool) -> Vec<BigUint> {
        let nv = self.len();
        let ring = self.max_len + 1;
        let mut slots = vec![vec![BigUint::zero(); nv]; ring];
        slots[0][a] = BigUint::one();
        let mut result = vec![BigUint::zero(); n_max + 1];
        for t in 0..=n_max {
            let cur = std::mem::replace(&mut slots[t % ring], vec![BigUint::zero(); nv]);
            result[t] = cur[a].clone();
            for (v, count) in cur.iter().enumerate() {
                if count.is_zero() || (first_return && v == a && t > 0) {
                    continue;
                }
                for e in &self.out[v] {
                    if t + e.len > n_max {
                        continue;
                    }
                    let slot = &mut slots[(t + e.len) % ring][e.to];
                    if e.weight.is_one() {
                        *slot += count;
                    } else {
                        *slot += count * &e.weight;
                    }
                }
            }
        }
        result
    }

    /// Walks with `steps = n + 1` for `n = 0..=n_max` whose first and last vertices satisfy
    /// the endpoint predicates, tabulated by the number of visits to vertices `< small`
    /// (0-based), endpoints included. Visit counts above `k_cap` are discarded.
    /// Returns `table[n][k]`.
    pub fn constrained_walks(
        &self,
        small: usize,
        start_ok: impl Fn(usize) -> bool,
        end_ok: impl Fn(usize) -> bool,
        n_max: usize,
        k_cap: usize,
    ) -> Vec<Vec<BigUint>> {
        let nv = self.len();
        let kw = k_cap + 1;
        let ring = self.max_len + 1;
        let zero_slot = || vec![BigUint::zero(); nv * kw];
        let mut slots: Vec<Vec<BigUint>> = (0..ring).map(|_| zero_slot()).collect();
        let is_small = |v: usize| usize::from(v < small);
        for v in (0..nv).filter(|&v| start_ok(v)) {
            let k = is_small(v);
            if k <= k_cap {
                slots[0][v * kw + k] = BigUint::one();
            }
        }
        let steps_max = n_max + 1;
        let mut table = vec![vec![BigUint::zero(); kw]; n_max + 1];
        for t in 0..=steps_max {
            let cur = std::mem::replace(&mut slots[t % ring], zero_slot());
            if t >= 1 {
                for v in (0..nv).filter(|&v| end_ok(v)) {
                    for k in 0..kw {
                        table[t - 1][k] += &cur[v * kw + k];
                    }
                }
            }
            for v in 0..nv {
                for k in 0..kw {
                    let count = &cur[v * kw + k];
                    if count.is_zero() {
                        continue;
                    }
                    for e in &self.out[v] {
                        let k2 = k + is_small(e.to);
                        if t + e.len > steps_max || k2 > k_cap {
                            continue;
                        }
                        let slot = &mut slots[(t + e.len) % ring][e.to * kw + k2];
                        if e.weight.is_one() {
                            *slot += count;
                        } else {
                            *slot += count * &e.weight;
                        }
                    }
                }
            }
        }
        table
    }
}
