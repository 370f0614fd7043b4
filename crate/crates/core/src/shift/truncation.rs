use super::{CmsGraph, FiniteGraph, LoopPos, LoopSystem};

/// The subgraph induced on symbols `1..=q`.
///
/// Vertex `i` of [`Truncation::graph`] is symbol `i + 1`; since the enumeration covers an
/// initial segment of the integers, no relabeling is needed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Truncation {
    pub cutoff: u64,
    pub graph: FiniteGraph,
}

impl Truncation {
    /// True when the truncation has no edges at all.
    pub fn is_empty(&self) -> bool {
        self.graph.edge_count() == 0
    }

    pub fn as_graph(&self) -> CmsGraph {
        CmsGraph::Finite(self.graph.clone())
    }
}

pub fn truncate(g: &CmsGraph, q: u64) -> Truncation {
    assert!(q >= 1, "truncation cutoff must be positive");
    let graph = match g {
        CmsGraph::Finite(f) => {
            let keep = (q as usize).min(f.len());
            let verts: Vec<usize> = (0..keep).collect();
            f.induced(&verts)
        }
        CmsGraph::Loop(l) => truncate_loops(l, q),
    };
    Truncation { cutoff: q, graph }
}

fn truncate_loops(l: &LoopSystem, q: u64) -> FiniteGraph {
    let positions = l.positions_upto(q);
    let n = positions.len();
    let mut edges = Vec::new();
    if l.multiplicity(1) == 1u32.into() {
        edges.push((1, 1));
    }
    for (i, &(s, pos)) in positions.iter().enumerate() {
        let LoopPos::Internal { id, offset } = pos else { continue };
        if offset == 1 {
            edges.push((1, s.index()));
        } else {
            edges.push((s.index() - 1, s.index()));
        }
        if offset + 1 == id.len {
            edges.push((s.index(), 1));
        } else if i + 1 < n {
            edges.push((s.index(), s.index() + 1));
        }
    }
    FiniteGraph::from_edges(n, edges)
}
