use std::collections::VecDeque;

use super::Symbol;

/// An explicit finite directed graph on symbols `1..=n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGraph {
    succ: Vec<Vec<usize>>,
}

impl FiniteGraph {
    /// Builds a graph from 1-based edge pairs. Duplicate edges collapse; out-of-range
    /// endpoints are the caller's responsibility (see [`super::load_graph`]).
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (u64, u64)>) -> Self {
        let mut succ = vec![Vec::new(); n];
        for (a, b) in edges {
            succ[(a - 1) as usize].push((b - 1) as usize);
        }
        for s in &mut succ {
            s.sort_unstable();
            s.dedup();
        }
        FiniteGraph { succ }
    }

    pub fn len(&self) -> usize {
        self.succ.len()
    }

    pub fn is_empty(&self) -> bool {
        self.succ.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    /// 0-based successor lists.
    pub fn successors(&self, v: usize) -> &[usize] {
        &self.succ[v]
    }

    pub fn has_edge(&self, a: Symbol, b: Symbol) -> bool {
        let (a, b) = (a.index() as usize, b.index() as usize);
        a >= 1 && a <= self.len() && b >= 1 && self.succ[a - 1].binary_search(&(b - 1)).is_ok()
    }

    /// 1-based edge list in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (Symbol, Symbol)> + '_ {
        self.succ
            .iter()
            .enumerate()
            .flat_map(|(a, bs)| bs.iter().map(move |&b| (Symbol::new(a as u64 + 1), Symbol::new(b as u64 + 1))))
    }

    fn reachable(&self, start: usize, reverse: bool) -> Vec<bool> {
        let adj = if reverse { self.reversed() } else { self.succ.clone() };
        let mut seen = vec![false; self.len()];
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        seen
    }

    fn reversed(&self) -> Vec<Vec<usize>> {
        let mut pred = vec![Vec::new(); self.len()];
        for (a, bs) in self.succ.iter().enumerate() {
            for &b in bs {
                pred[b].push(a);
            }
        }
        pred
    }

    /// 0-based vertex set of the strongly connected component containing `v`.
    pub fn component_of(&self, v: usize) -> Vec<usize> {
        let fwd = self.reachable(v, false);
        let bwd = self.reachable(v, true);
        (0..self.len()).filter(|&w| fwd[w] && bwd[w]).collect()
    }

    /// Strongly connected with at least one edge.
    pub fn is_strongly_connected(&self) -> bool {
        !self.is_empty() && self.edge_count() > 0 && self.component_of(0).len() == self.len()
    }

    /// Induced subgraph on the given 0-based vertices (relabelled in the given order).
    pub fn induced(&self, vertices: &[usize]) -> FiniteGraph {
        let mut pos = vec![usize::MAX; self.len()];
        for (i, &v) in vertices.iter().enumerate() {
            pos[v] = i;
        }
        let succ = vertices
            .iter()
            .map(|&v| {
                let mut s: Vec<usize> =
                    self.succ[v].iter().filter(|&&w| pos[w] != usize::MAX).map(|&w| pos[w]).collect();
                s.sort_unstable();
                s
            })
            .collect();
        FiniteGraph { succ }
    }
}
