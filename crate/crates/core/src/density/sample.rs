use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{CylinderMeasure, FiniteMarkov, MarkovMeasure};
use crate::shift::{Symbol, Word};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleOptions {
    /// Cylinders up to this length serve as Birkhoff test functions.
    pub test_depth: usize,
    /// Allowed gap between a word's empirical cylinder frequencies and the measure.
    pub beta: f64,
    /// Draws allowed per requested word.
    pub tries_per_word: usize,
}

impl Default for SampleOptions {
    fn default() -> Self {
        SampleOptions { test_depth: 1, beta: 0.25, tries_per_word: 64 }
    }
}

fn step(m: &FiniteMarkov, i: usize, rng: &mut ChaCha8Rng) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    let row = &m.rows()[i];
    for &(j, p) in row {
        acc += p;
        if u < acc {
            return j;
        }
    }
    row.last().expect("stochastic row").0
}

fn initial(m: &FiniteMarkov, rng: &mut ChaCha8Rng) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (i, &p) in m.pi().iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    m.pi().len() - 1
}

/// Cylinders of length `1..=depth` in the support of `m`.
fn test_cylinders(m: &FiniteMarkov, depth: usize) -> Vec<(Vec<usize>, f64)> {
    let mut out = Vec::new();
    let mut layer: Vec<Vec<usize>> = (0..m.states().len()).map(|i| vec![i]).collect();
    for d in 1..=depth {
        if d > 1 {
            layer = layer
                .iter()
                .flat_map(|w| {
                    let last = *w.last().expect("nonempty");
                    m.rows()[last].iter().map(move |&(j, _)| {
                        let mut v = w.clone();
                        v.push(j);
                        v
                    })
                })
                .collect();
        }
        for w in &layer {
            let syms: Vec<Symbol> = w.iter().map(|&i| m.states()[i]).collect();
            out.push((w.clone(), m.cylinder_mass(&syms)));
        }
    }
    out
}

/// Frequencies of the test cylinders among the windows starting at positions `0..len-1` of
/// the state path (the final symbol only closes windows).
fn is_typical(path: &[usize], tests: &[(Vec<usize>, f64)], beta: f64) -> bool {
    let n = path.len() - 1;
    tests.iter().all(|(c, mass)| {
        let k = c.len();
        let starts = (n + 1).saturating_sub(k).min(n);
        if starts == 0 {
            return true;
        }
        let hits = (0..starts).filter(|&i| path[i..i + k] == c[..]).count();
        (hits as f64 / starts as f64 - mass).abs() <= beta
    })
}

/// Up to `count` distinct typical words of length `len + 1` from `m`'s chain, returned without
/// their final symbol. With an anchor, words start and end at it. Sampling stops early once
/// `tries_per_word · count` draws in a row add nothing.
pub(crate) fn sample_distinct(
    m: &FiniteMarkov,
    anchor: Symbol,
    len: usize,
    count: usize,
    opts: &SampleOptions,
    seed: u64,
    stream: u64,
) -> Result<Vec<Word>> {
    let words = draw(m, Some(anchor), len, count, opts, seed, stream, true)?;
    if words.is_empty() {
        return Err(Error::SamplingExhausted(format!("no typical anchored word of length {} at {anchor}", len + 1)));
    }
    Ok(words
        .into_iter()
        .map(|mut w| {
            w.pop();
            w
        })
        .collect())
}

#[allow(clippy::too_many_arguments)]
fn draw(
    m: &FiniteMarkov,
    anchor: Option<Symbol>,
    len: usize,
    count: usize,
    opts: &SampleOptions,
    seed: u64,
    stream: u64,
    stop_when_saturated: bool,
) -> Result<Vec<Word>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let tests = test_cylinders(m, opts.test_depth);
    let start = match anchor {
        Some(a) => Some(m.state_of(a).ok_or(Error::UnknownSymbol(a.index()))?),
        None => None,
    };
    let budget = opts.tries_per_word.saturating_mul(count).max(1);
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let mut out = Vec::new();
    let mut tries = 0usize;
    let mut idle = 0usize;
    while out.len() < count && tries < budget && !(stop_when_saturated && idle >= budget / 4 && !out.is_empty()) {
        tries += 1;
        idle += 1;
        let mut path = Vec::with_capacity(len + 1);
        path.push(start.unwrap_or_else(|| initial(m, &mut rng)));
        for _ in 0..len {
            let next = step(m, *path.last().expect("nonempty"), &mut rng);
            path.push(next);
        }
        if start.is_some_and(|s| path[len] != s) || !is_typical(&path, &tests, opts.beta) {
            continue;
        }
        if seen.insert(path[..len].to_vec()) {
            idle = 0;
            out.push(path.iter().map(|&i| m.states()[i]).collect());
        }
    }
    Ok(out)
}

/// `count` typical words of length `n + 1`, pairwise distinct in their first `n` symbols.
pub fn generic_words(m: &MarkovMeasure, n: usize, count: usize, seed: u64, opts: &SampleOptions) -> Result<Vec<Word>> {
    if n == 0 || count == 0 {
        return Err(Error::validation("n/count", "n and count must be positive"));
    }
    let f = m.to_finite(1 << 16)?;
    let words = draw(&f, None, n, count, opts, seed, 0, false)?;
    if words.len() < count {
        return Err(Error::SamplingExhausted(format!(
            "found {} of {count} distinct typical words of length {}",
            words.len(),
            n + 1
        )));
    }
    Ok(words)
}
