use std::collections::HashMap;
use std::sync::Arc;

use crate::measures::CylinderMeasure;
use crate::shift::{FiniteGraph, Symbol, Word};

/// One position of the period: a set of equally long words, one of which is chosen uniformly.
#[derive(Clone, Debug, PartialEq)]
pub struct Slot {
    words: Arc<Vec<Word>>,
}

impl Slot {
    /// `words` must be nonempty, distinct and of a common length.
    pub fn new(words: Arc<Vec<Word>>) -> Self {
        assert!(!words.is_empty() && words.iter().all(|w| w.len() == words[0].len() && !w.is_empty()));
        Slot { words }
    }

    pub fn len(&self) -> usize {
        self.words[0].len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    /// Fraction of words matching `seg` from `offset`.
    fn fraction(&self, offset: usize, seg: &[Symbol]) -> f64 {
        let hits = self.words.iter().filter(|w| w[offset..offset + seg.len()] == *seg).count();
        hits as f64 / self.words.len() as f64
    }
}

/// Cyclic sequence of slots. Its measure of maximal entropy picks a uniform phase and
/// independent uniform words.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockSystem {
    slots: Vec<Slot>,
    starts: Vec<usize>,
    period: usize,
}

impl BlockSystem {
    pub fn new(slots: Vec<Slot>) -> Self {
        let mut starts = Vec::with_capacity(slots.len());
        let mut period = 0;
        for s in &slots {
            starts.push(period);
            period += s.len();
        }
        BlockSystem { slots, starts, period }
    }

    pub fn period(&self) -> usize {
        self.period
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    /// Vertices of [`BlockSystem::to_graph`].
    pub fn vertex_count(&self) -> usize {
        self.slots.iter().map(|s| trie_nodes(s).len()).sum()
    }

    /// Realize the system as a graph: one prefix tree per slot whose leaves feed the next
    /// slot's root. Every vertex carries the symbol it emits.
    pub fn to_graph(&self) -> (FiniteGraph, Vec<Symbol>) {
        let tries: Vec<Vec<(Symbol, Vec<usize>)>> = self.slots.iter().map(trie_nodes).collect();
        let mut offset = vec![0];
        for t in &tries {
            offset.push(offset.last().expect("nonempty") + t.len());
        }
        let mut edges = Vec::new();
        let mut labels = Vec::new();
        for (j, t) in tries.iter().enumerate() {
            let next_root = offset[(j + 1) % tries.len()];
            for (v, (sym, children)) in t.iter().enumerate() {
                labels.push(*sym);
                let from = (offset[j] + v) as u64 + 1;
                if children.is_empty() {
                    edges.push((from, next_root as u64 + 1));
                }
                for &c in children {
                    edges.push((from, (offset[j] + c) as u64 + 1));
                }
            }
        }
        (FiniteGraph::from_edges(labels.len(), edges), labels)
    }

    /// Mass of the words `w` starting at period position `p`.
    fn mass_at(&self, p: usize, w: &[Symbol]) -> f64 {
        let mut j = self.starts.partition_point(|&s| s <= p) - 1;
        let mut offset = p - self.starts[j];
        let mut rest = w;
        let mut mass = 1.0;
        while !rest.is_empty() {
            let slot = &self.slots[j];
            let take = rest.len().min(slot.len() - offset);
            mass *= slot.fraction(offset, &rest[..take]);
            if mass == 0.0 {
                return 0.0;
            }
            rest = &rest[take..];
            j = (j + 1) % self.slots.len();
            offset = 0;
        }
        mass
    }
}

/// Prefix tree of a slot's words as `(symbol, children)`, root first. The words of a slot
/// share their first symbol (the anchor, or the start of a connector).
fn trie_nodes(slot: &Slot) -> Vec<(Symbol, Vec<usize>)> {
    let mut nodes: Vec<(Symbol, Vec<usize>)> = vec![(slot.words[0][0], Vec::new())];
    let mut index: HashMap<(usize, Symbol), usize> = HashMap::new();
    for w in slot.words.iter() {
        assert_eq!(w[0], nodes[0].0, "slot words must share their first symbol");
        let mut cur = 0;
        for &s in &w[1..] {
            cur = *index.entry((cur, s)).or_insert_with(|| {
                nodes.push((s, Vec::new()));
                let id = nodes.len() - 1;
                nodes[cur].1.push(id);
                id
            });
        }
    }
    nodes
}

impl CylinderMeasure for BlockSystem {
    fn cylinder_mass(&self, w: &[Symbol]) -> f64 {
        if w.is_empty() {
            return 1.0;
        }
        let total: f64 = (0..self.period).map(|p| self.mass_at(p, w)).sum();
        total / self.period as f64
    }

    fn entropy(&self) -> f64 {
        let choices: f64 = self.slots.iter().map(|s| (s.words.len() as f64).ln()).sum();
        choices / self.period as f64
    }
}
