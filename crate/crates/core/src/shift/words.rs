use super::{FiniteGraph, Symbol, Truncation, Word};
use crate::error::{Error, Result};

/// Default bound on explicit word lists.
pub const DEFAULT_WORD_CAP: usize = 1 << 20;

/// All admissible words `x_0 … x_{n-1}` with `x_0 = a` and `x_{n-1} = b`, in lexicographic
/// order. Fails with a capacity error before enumerating if there are more than `cap`.
pub fn enumerate_words(t: &Truncation, a: Symbol, b: Symbol, n: usize, cap: usize) -> Result<Vec<Word>> {
    assert!(n >= 1, "words have at least one symbol");
    let g = &t.graph;
    let len = g.len();
    let (ai, bi) = (a.index() as usize, b.index() as usize);
    if ai == 0 || ai > len || bi == 0 || bi > len {
        return Ok(Vec::new());
    }
    let (ai, bi) = (ai - 1, bi - 1);
    // ways[k][v]: paths with k more symbols from v to b, saturating
    let mut ways = vec![vec![0u128; len]; n];
    ways[0][bi] = 1;
    for k in 1..n {
        for v in 0..len {
            ways[k][v] = g.successors(v).iter().fold(0u128, |acc, &w| acc.saturating_add(ways[k - 1][w]));
        }
    }
    let total = ways[n - 1][ai];
    if total > cap as u128 {
        return Err(Error::Capacity { what: "admissible words", needed: total, cap: cap as u128 });
    }
    let mut out = Vec::with_capacity(total as usize);
    let mut cur = vec![ai];
    extend(g, &ways, n, &mut cur, &mut out);
    Ok(out)
}

fn extend(g: &FiniteGraph, ways: &[Vec<u128>], n: usize, cur: &mut Vec<usize>, out: &mut Vec<Word>) {
    if cur.len() == n {
        out.push(cur.iter().map(|&v| Symbol::new(v as u64 + 1)).collect());
        return;
    }
    let remaining = n - cur.len() - 1;
    let last = *cur.last().expect("nonempty prefix");
    for &w in g.successors(last) {
        if ways[remaining][w] > 0 {
            cur.push(w);
            extend(g, ways, n, cur, out);
            cur.pop();
        }
    }
}

/// Admissible words of lengths `1..=depth` ordered by length, then lexicographically. This is
/// the cylinder order used to weight the `ρ` distance.
pub fn canonical_cylinders(g: &FiniteGraph, depth: usize, cap: usize) -> Result<Vec<Word>> {
    let mut out: Vec<Word> = Vec::new();
    let mut layer: Vec<Vec<usize>> = (0..g.len()).map(|v| vec![v]).collect();
    for k in 1..=depth {
        if out.len() + layer.len() > cap {
            return Err(Error::Capacity {
                what: "canonical cylinders",
                needed: (out.len() + layer.len()) as u128,
                cap: cap as u128,
            });
        }
        out.extend(layer.iter().map(|w| w.iter().map(|&v| Symbol::new(v as u64 + 1)).collect::<Word>()));
        if k == depth {
            break;
        }
        layer = layer
            .iter()
            .flat_map(|w| {
                let last = *w.last().expect("nonempty word");
                g.successors(last).iter().map(move |&s| {
                    let mut next = w.clone();
                    next.push(s);
                    next
                })
            })
            .collect();
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shift::{truncate, word, CmsGraph};

    fn golden() -> Truncation {
        truncate(&CmsGraph::Finite(FiniteGraph::from_edges(2, [(1, 1), (1, 2), (2, 1)])), 2)
    }

    #[test]
    fn golden_mean_words() {
        let t = golden();
        let w = enumerate_words(&t, Symbol::new(1), Symbol::new(1), 3, DEFAULT_WORD_CAP).unwrap();
        assert_eq!(w, vec![word(&[1, 1, 1]), word(&[1, 2, 1])]);
        assert!(enumerate_words(&t, Symbol::new(2), Symbol::new(2), 2, DEFAULT_WORD_CAP).unwrap().is_empty());
    }

    #[test]
    fn brute_force_agrees() {
        let t = golden();
        for n in 1..=8usize {
            let mut brute = Vec::new();
            for code in 0..(1u32 << n) {
                let w: Word = (0..n).rev().map(|i| Symbol::new(1 + ((code >> i) & 1) as u64)).collect();
                if w[0].index() == 1 && w[n - 1].index() == 1 && t.as_graph().is_admissible(&w) {
                    brute.push(w);
                }
            }
            let got = enumerate_words(&t, Symbol::new(1), Symbol::new(1), n, DEFAULT_WORD_CAP).unwrap();
            assert_eq!(got, brute);
        }
    }

    #[test]
    fn cap_is_enforced() {
        let t = truncate(&CmsGraph::Finite(FiniteGraph::from_edges(2, [(1, 1), (1, 2), (2, 1), (2, 2)])), 2);
        let err = enumerate_words(&t, Symbol::new(1), Symbol::new(1), 12, 100).unwrap_err();
        assert_eq!(err.code(), "CAPACITY");
    }

    #[test]
    fn cylinder_order_is_breadth_first() {
        let g = FiniteGraph::from_edges(2, [(1, 1), (1, 2), (2, 1)]);
        let c = canonical_cylinders(&g, 2, 100).unwrap();
        assert_eq!(c, vec![word(&[1]), word(&[2]), word(&[1, 1]), word(&[1, 2]), word(&[2, 1])]);
    }
}
