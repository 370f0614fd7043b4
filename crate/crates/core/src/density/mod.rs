//! Compactly supported ergodic measures close to a mixture of Markov measures.
//!
//! Each component contributes words sampled from its chain that start and end at a fixed
//! anchor symbol and have near-typical symbol frequencies. A period consists of `M` blocks per
//! component, each block a concatenation of freely chosen sampled words, with shortest
//! connecting paths between components. The resulting subshift carries a unique measure of
//! maximal entropy: uniform phase in the period and independent uniform word choices.

mod sample;
mod system;

use std::collections::VecDeque;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{rho_distance, CylinderMeasure, FiniteMarkov, Mixture, RhoReport};
use crate::shift::{CmsGraph, FiniteGraph, GraphSpec, Symbol, Word};

pub use sample::{generic_words, SampleOptions};
pub use system::{BlockSystem, Slot};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityOptions {
    /// Block length; a multiple of `word_len`.
    pub n: usize,
    /// Blocks per component in one period.
    #[serde(rename = "M")]
    pub m_blocks: usize,
    /// Length of the sampled words that make up a block.
    pub word_len: usize,
    /// Most distinct words sampled per component.
    pub count: usize,
    pub sample: SampleOptions,
    /// Depth of the `ρ` report.
    pub depth: usize,
    pub seed: u64,
    /// Target cylinder distance.
    pub eps: f64,
    /// Target entropy gap.
    pub eta: f64,
}

impl Default for DensityOptions {
    fn default() -> Self {
        DensityOptions {
            n: 64,
            m_blocks: 4,
            word_len: 8,
            count: 96,
            sample: SampleOptions::default(),
            depth: 6,
            seed: 1,
            eps: 0.05,
            eta: 0.1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentReport {
    pub anchor: u64,
    pub words: usize,
    pub entropy: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub options: DensityOptions,
    pub components: Vec<ComponentReport>,
    /// Connecting words between consecutive components (anchor excluded at the far end).
    pub connectors: Vec<Vec<u64>>,
    pub period: usize,
    pub vertices: usize,
    pub entropy_mu: f64,
    pub entropy_nu: f64,
    pub entropy_gap: f64,
    pub rho: RhoReport,
    pub met: bool,
}

/// Symbol with the largest stationary mass (the smallest one on ties).
fn anchor_of(m: &FiniteMarkov) -> Symbol {
    let mut best = 0;
    for i in 1..m.pi().len() {
        if m.pi()[i] > m.pi()[best] + 1e-12 {
            best = i;
        }
    }
    m.states()[best]
}

/// Shortest path `from → … → to` in `g`, without the final `to`.
fn connector(g: &FiniteGraph, from: Symbol, to: Symbol) -> Result<Word> {
    let (s, t) = (from.index() as usize - 1, to.index() as usize - 1);
    let mut prev = vec![usize::MAX; g.len()];
    prev[s] = s;
    let mut queue = VecDeque::from([s]);
    while let Some(v) = queue.pop_front() {
        for &w in g.successors(v) {
            if w == t {
                let mut path = vec![v];
                while *path.last().expect("nonempty") != s {
                    path.push(prev[*path.last().expect("nonempty")]);
                }
                return Ok(path.into_iter().rev().map(|i| Symbol::new(i as u64 + 1)).collect());
            }
            if prev[w] == usize::MAX {
                prev[w] = v;
                queue.push_back(w);
            }
        }
    }
    Err(Error::ConnectorNotFound { from: from.index(), to: to.index() })
}

/// Build the periodic block system approximating a uniform mixture and compare it with the mixture.
pub fn density_construction(
    ambient: &FiniteGraph,
    mu: &Mixture,
    opts: &DensityOptions,
) -> Result<(BlockSystem, DensityReport)> {
    let k = mu.parts.len();
    if k == 0 || mu.parts.iter().any(|p| (p.weight - 1.0 / k as f64).abs() > 1e-12) {
        return Err(Error::validation("mixture.weights", "weights must be uniform"));
    }
    if opts.word_len == 0
        || opts.n == 0
        || !opts.n.is_multiple_of(opts.word_len)
        || opts.m_blocks == 0
        || opts.count == 0
    {
        return Err(Error::validation("density", "n must be a positive multiple of word_len; M and count positive"));
    }
    let ambient_graph = CmsGraph::Finite(ambient.clone());
    let chains = mu
        .parts
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let f = p.measure.to_finite(1 << 16)?;
            if !f.lives_on(&ambient_graph) {
                return Err(Error::validation(format!("mixture.parts[{i}]"), "component leaves the ambient graph"));
            }
            let support: Vec<usize> = f.states().iter().map(|s| s.index() as usize - 1).collect();
            if !f.support_graph().induced(&support).is_strongly_connected() {
                return Err(Error::validation(format!("mixture.parts[{i}]"), "component is not ergodic"));
            }
            Ok(f)
        })
        .collect::<Result<Vec<_>>>()?;
    let anchors: Vec<Symbol> = chains.iter().map(anchor_of).collect();
    let pools = chains
        .par_iter()
        .enumerate()
        .map(|(i, f)| {
            sample::sample_distinct(f, anchors[i], opts.word_len, opts.count, &opts.sample, opts.seed, i as u64)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut connectors = Vec::new();
    let mut slots = Vec::new();
    let per_block = opts.n / opts.word_len;
    for i in 0..k {
        let pool = std::sync::Arc::new(pools[i].clone());
        for _ in 0..opts.m_blocks * per_block {
            slots.push(Slot::new(pool.clone()));
        }
        let next = anchors[(i + 1) % k];
        if next != anchors[i] {
            let c = connector(ambient, anchors[i], next)?;
            connectors.push(c.iter().map(|s| s.index()).collect());
            slots.push(Slot::new(std::sync::Arc::new(vec![c])));
        }
    }
    let system = BlockSystem::new(slots);
    let rho = rho_distance(ambient, mu, &system, opts.depth)?;
    let entropy_mu = mu.entropy();
    let entropy_nu = system.entropy();
    let entropy_gap = (entropy_mu - entropy_nu).abs();
    let report = DensityReport {
        options: opts.clone(),
        components: chains
            .iter()
            .zip(&anchors)
            .zip(&pools)
            .map(|((f, a), p)| ComponentReport { anchor: a.index(), words: p.len(), entropy: f.entropy() })
            .collect(),
        connectors,
        period: system.period(),
        vertices: system.vertex_count(),
        entropy_mu,
        entropy_nu,
        entropy_gap,
        met: rho.value <= opts.eps && entropy_gap <= opts.eta,
        rho,
    };
    Ok((system, report))
}

/// The demonstration ambient graph on four symbols: a full shift on `{1, 2}` and a two-cycle
/// on `{3, 4}`, joined by `1 → 3` and `4 → 1`.
pub fn demo_ambient() -> FiniteGraph {
    FiniteGraph::from_edges(4, [(1, 1), (1, 2), (2, 1), (2, 2), (1, 3), (3, 4), (4, 3), (4, 1)])
}

/// `½ Bernoulli(½, ½)` on `{1, 2}` plus `½` the periodic orbit `3 4`.
pub fn demo_mixture() -> Mixture {
    let b = FiniteMarkov::bernoulli(&[0.5, 0.5]).expect("valid");
    let c = FiniteMarkov::cycle(&[3, 4]).expect("valid");
    Mixture::new(vec![(0.5, b.into()), (0.5, c.into())]).expect("valid")
}

/// Run the construction on the demonstration mixture.
pub fn density_demo(opts: &DensityOptions) -> Result<(BlockSystem, DensityReport)> {
    density_construction(&demo_ambient(), &demo_mixture(), opts)
}

/// The block system as a graph document, with the ambient symbol carried by each vertex.
pub fn emit_graph(system: &BlockSystem) -> (GraphSpec, Vec<u64>) {
    let (g, labels) = system.to_graph();
    (GraphSpec::describe(&CmsGraph::Finite(g)), labels.iter().map(|s| s.index()).collect())
}
