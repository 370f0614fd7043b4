use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::CylinderMeasure;
use crate::error::{Error, Result};
use crate::shift::{CmsGraph, FiniteGraph, Symbol};
use crate::spectral::{perron, SparseMatrix};

/// A stationary Markov chain on finitely many symbols.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiniteMarkov {
    /// Sorted support symbols; state `i` is `states[i]`.
    states: Vec<Symbol>,
    pi: Vec<f64>,
    /// Row `i`: `(j, P_ij)` with `P_ij > 0`.
    rows: Vec<Vec<(usize, f64)>>,
}

const STATIONARY_TOL: f64 = 1e-10;

impl FiniteMarkov {
    /// Assemble and check a chain: rows stochastic, `π` a probability vector with `πP = π`.
    pub fn new(states: Vec<Symbol>, pi: Vec<f64>, rows: Vec<Vec<(usize, f64)>>) -> Result<Self> {
        let n = states.len();
        if n == 0 || pi.len() != n || rows.len() != n {
            return Err(Error::validation("measure", "states, pi and rows must have equal nonzero length"));
        }
        if states.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::validation("measure.states", "states must be strictly increasing"));
        }
        let m = FiniteMarkov { states, pi, rows };
        m.check()?;
        Ok(m)
    }

    fn check(&self) -> Result<()> {
        let n = self.states.len();
        if (self.pi.iter().sum::<f64>() - 1.0).abs() > STATIONARY_TOL || self.pi.iter().any(|&p| p < 0.0) {
            return Err(Error::validation("measure.pi", "pi must be a probability vector"));
        }
        let mut pushed = vec![0.0; n];
        for (i, row) in self.rows.iter().enumerate() {
            let total: f64 = row.iter().map(|e| e.1).sum();
            if row.iter().any(|&(j, p)| j >= n || p <= 0.0) || (total - 1.0).abs() > STATIONARY_TOL {
                return Err(Error::validation(format!("measure.rows[{i}]"), "rows must be stochastic"));
            }
            for &(j, p) in row {
                pushed[j] += self.pi[i] * p;
            }
        }
        if pushed.iter().zip(&self.pi).any(|(a, b)| (a - b).abs() > STATIONARY_TOL) {
            return Err(Error::validation("measure.pi", "pi is not stationary"));
        }
        Ok(())
    }

    /// Chain with the given transitions; the stationary vector is solved for. The transition
    /// graph must be strongly connected (so that `π` is unique).
    pub fn from_transitions(states: Vec<Symbol>, rows: Vec<Vec<(usize, f64)>>) -> Result<Self> {
        let n = states.len();
        let pattern = SparseMatrix { rows: rows.clone() };
        if !pattern.is_irreducible() {
            return Err(Error::NotStronglyConnected);
        }
        // (Pᵀ - I) π = 0 with the last equation replaced by Σ π = 1
        let mut a = DMatrix::<f64>::zeros(n, n);
        for (i, row) in rows.iter().enumerate() {
            for &(j, p) in row {
                a[(j, i)] += p;
            }
        }
        for i in 0..n {
            a[(i, i)] -= 1.0;
            a[(n - 1, i)] = 1.0;
        }
        let mut b = DVector::<f64>::zeros(n);
        b[n - 1] = 1.0;
        let pi = a.lu().solve(&b).ok_or_else(|| Error::validation("measure.rows", "singular stationary system"))?;
        let pi = pi.iter().map(|&p| p.max(0.0)).collect();
        FiniteMarkov::new(states, pi, rows)
    }

    /// I.i.d. symbols `1..=k` with the given probabilities (zero entries are dropped).
    pub fn bernoulli(probs: &[f64]) -> Result<Self> {
        let keep: Vec<usize> = (0..probs.len()).filter(|&i| probs[i] > 0.0).collect();
        let states = keep.iter().map(|&i| Symbol::new(i as u64 + 1)).collect();
        let pi: Vec<f64> = keep.iter().map(|&i| probs[i]).collect();
        let rows = (0..keep.len()).map(|_| pi.iter().copied().enumerate().collect()).collect();
        FiniteMarkov::new(states, pi, rows)
    }

    /// Uniform measure on the periodic orbit through the given distinct symbols.
    pub fn cycle(symbols: &[u64]) -> Result<Self> {
        let mut order: Vec<usize> = (0..symbols.len()).collect();
        order.sort_by_key(|&i| symbols[i]);
        let states: Vec<Symbol> = order.iter().map(|&i| Symbol::new(symbols[i])).collect();
        let pos = |s: u64| states.binary_search(&Symbol::new(s)).expect("listed symbol");
        let k = symbols.len();
        let mut rows = vec![Vec::new(); k];
        for i in 0..k {
            rows[pos(symbols[i])] = vec![(pos(symbols[(i + 1) % k]), 1.0)];
        }
        FiniteMarkov::new(states, vec![1.0 / k as f64; k], rows)
    }

    /// Measure of maximal entropy of a strongly connected graph whose vertex `i` carries
    /// symbol `labels[i]`.
    pub fn parry_labeled(g: &FiniteGraph, labels: &[Symbol]) -> Result<Self> {
        let p = perron(&SparseMatrix::adjacency(g))?;
        let n = g.len();
        let norm: f64 = (0..n).map(|i| p.left[i] * p.right[i]).sum();
        let pi_raw: Vec<f64> = (0..n).map(|i| p.left[i] * p.right[i] / norm).collect();
        let rows_raw: Vec<Vec<(usize, f64)>> = (0..n)
            .map(|i| g.successors(i).iter().map(|&j| (j, p.right[j] / (p.lambda * p.right[i]))).collect())
            .collect();
        // relabel so that states are sorted
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&i| labels[i]);
        let mut rank = vec![0; n];
        for (r, &i) in order.iter().enumerate() {
            rank[i] = r;
        }
        let states = order.iter().map(|&i| labels[i]).collect();
        let pi = order.iter().map(|&i| pi_raw[i]).collect();
        let rows = order
            .iter()
            .map(|&i| {
                let mut row: Vec<(usize, f64)> = rows_raw[i].iter().map(|&(j, q)| (rank[j], q)).collect();
                normalize_row(&mut row);
                row
            })
            .collect();
        FiniteMarkov::new(states, pi, rows)
    }

    pub fn states(&self) -> &[Symbol] {
        &self.states
    }

    pub fn pi(&self) -> &[f64] {
        &self.pi
    }

    pub fn rows(&self) -> &[Vec<(usize, f64)>] {
        &self.rows
    }

    pub fn state_of(&self, s: Symbol) -> Option<usize> {
        self.states.binary_search(&s).ok()
    }

    pub fn transition(&self, i: usize, j: usize) -> f64 {
        self.rows[i].iter().find(|e| e.0 == j).map_or(0.0, |e| e.1)
    }

    /// Support edges as symbol pairs.
    pub fn support_edges(&self) -> Vec<(Symbol, Symbol)> {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(i, r)| r.iter().map(move |&(j, _)| (self.states[i], self.states[j])))
            .collect()
    }

    /// True when every transition is an edge of `g`.
    pub fn lives_on(&self, g: &CmsGraph) -> bool {
        self.support_edges().into_iter().all(|(a, b)| g.is_edge(a, b))
    }

    /// Support as an explicit graph on symbols `1..=max state`.
    pub fn support_graph(&self) -> FiniteGraph {
        let n = self.states.last().map_or(0, |s| s.index()) as usize;
        FiniteGraph::from_edges(n, self.support_edges().into_iter().map(|(a, b)| (a.index(), b.index())))
    }
}

/// Rescale a row to sum to exactly one (floating round-off from eigenvector division).
fn normalize_row(row: &mut [(usize, f64)]) {
    let s: f64 = row.iter().map(|e| e.1).sum();
    row.iter_mut().for_each(|e| e.1 /= s);
}

/// Measure of maximal entropy of a strongly connected finite graph on symbols `1..=n`.
pub fn parry_measure(g: &FiniteGraph) -> Result<FiniteMarkov> {
    let labels: Vec<Symbol> = (1..=g.len() as u64).map(Symbol::new).collect();
    FiniteMarkov::parry_labeled(g, &labels)
}

impl CylinderMeasure for FiniteMarkov {
    fn cylinder_mass(&self, w: &[Symbol]) -> f64 {
        let Some(first) = w.first().and_then(|&s| self.state_of(s)) else {
            return 0.0;
        };
        let mut mass = self.pi[first];
        let mut cur = first;
        for &s in &w[1..] {
            let Some(next) = self.state_of(s) else { return 0.0 };
            mass *= self.transition(cur, next);
            if mass == 0.0 {
                return 0.0;
            }
            cur = next;
        }
        mass
    }

    fn entropy(&self) -> f64 {
        let h: f64 = self
            .rows
            .iter()
            .zip(&self.pi)
            .map(|(row, &p)| -p * row.iter().map(|&(_, q)| q * q.ln()).sum::<f64>())
            .sum();
        h.max(0.0)
    }
}
