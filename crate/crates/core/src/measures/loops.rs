use std::sync::Arc;

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::{CylinderMeasure, FiniteMarkov};
use crate::error::{Error, Result};
use crate::numeric::{ln_big, KahanSum};
use crate::shift::{LoopId, LoopPos, LoopSystem, Symbol};
use crate::thermo::GfSeries;

/// Longest loop length a finite length law may use.
pub const MAX_LAW_LEN: u64 = 1 << 16;

/// Distribution of the loop chosen at each visit to the base. All `a_ℓ` loops of one length
/// are equally likely.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum LengthLaw {
    /// Each loop of length `ℓ ∈ [min_len, max_len]` has weight `x^ℓ`. Without `max_len` the
    /// window is unbounded (requires `x` inside the radius of convergence, or at it with a
    /// finite mean).
    Gibbs { x: f64, min_len: u64, max_len: Option<u64> },
    /// `(ℓ, probability of length ℓ)`.
    Explicit { lengths: Vec<(u64, f64)> },
}

/// Stationary Markov measure on a loop system: from the base a loop is drawn from the
/// length law and traversed.
#[derive(Clone, Debug, PartialEq)]
pub struct LoopMarkov {
    system: Arc<LoopSystem>,
    law: LengthLaw,
    /// `ln Σ_ℓ (number of loops) · weight_ℓ`.
    ln_z: f64,
    /// Expected loop length.
    mean: f64,
    /// Sum of `-P(ℓ) ln P(ℓ)`, where `P(ℓ)` is the probability of one particular loop.
    choice_entropy: f64,
}

struct Terms {
    /// `(ℓ, ln a_ℓ, ln weight_ℓ)`.
    rows: Vec<(u64, f64, f64)>,
}

impl Terms {
    fn gibbs_window(sys: &LoopSystem, x: f64, min_len: u64, max_len: u64) -> Terms {
        let table = sys.multiplicity_table(max_len);
        let rows = (min_len.max(1)..=max_len)
            .filter_map(|l| {
                let la = ln_big(&table[l as usize]);
                (la > f64::NEG_INFINITY).then_some((l, la, l as f64 * x.ln()))
            })
            .collect();
        Terms { rows }
    }
}

impl LoopMarkov {
    pub fn new(system: Arc<LoopSystem>, law: LengthLaw) -> Result<Self> {
        match &law {
            LengthLaw::Gibbs { x, min_len, max_len } => {
                if !(*x > 0.0 && x.is_finite()) {
                    return Err(Error::validation("law.x", "x must be positive"));
                }
                match max_len {
                    Some(m) => {
                        if *m > MAX_LAW_LEN || m < min_len {
                            return Err(Error::validation("law.max_len", "window must be nonempty and bounded"));
                        }
                        let terms = Terms::gibbs_window(&system, *x, *min_len, *m);
                        Self::from_terms(system, law.clone(), terms)
                    }
                    None => Self::unbounded_gibbs(system, *x, *min_len, law.clone()),
                }
            }
            LengthLaw::Explicit { lengths } => {
                let total: f64 = lengths.iter().map(|e| e.1).sum();
                if (total - 1.0).abs() > 1e-10 || lengths.iter().any(|e| e.1 < 0.0 || e.0 > MAX_LAW_LEN) {
                    return Err(Error::validation("law.lengths", "length probabilities must sum to one"));
                }
                let max = lengths.iter().map(|e| e.0).max().unwrap_or(0);
                let table = system.multiplicity_table(max);
                let mut rows = Vec::new();
                for &(l, p) in lengths.iter().filter(|e| e.1 > 0.0) {
                    let la = ln_big(&table[l as usize]);
                    if la == f64::NEG_INFINITY {
                        return Err(Error::validation("law.lengths", format!("no loops of length {l}")));
                    }
                    // weight per loop so that the length carries probability p
                    rows.push((l, la, p.ln() - la));
                }
                Self::from_terms(system, law.clone(), Terms { rows })
            }
        }
    }

    fn from_terms(system: Arc<LoopSystem>, law: LengthLaw, terms: Terms) -> Result<Self> {
        if terms.rows.is_empty() {
            return Err(Error::validation("law", "no loops in the window"));
        }
        let shift = terms.rows.iter().map(|r| r.1 + r.2).fold(f64::NEG_INFINITY, f64::max);
        let z: KahanSum = terms.rows.iter().map(|r| (r.1 + r.2 - shift).exp()).collect();
        let ln_z = shift + z.value().ln();
        let mut mean = KahanSum::default();
        let mut ent = KahanSum::default();
        for &(l, la, lw) in &terms.rows {
            let p_len = (la + lw - ln_z).exp();
            mean.add(l as f64 * p_len);
            ent.add(-p_len * (lw - ln_z));
        }
        Ok(LoopMarkov { system, law, ln_z, mean: mean.value(), choice_entropy: ent.value() })
    }

    fn unbounded_gibbs(system: Arc<LoopSystem>, x: f64, min_len: u64, law: LengthLaw) -> Result<Self> {
        let series = GfSeries::new(&system);
        let below = min_len.saturating_sub(1);
        let z = series.value(x).mid() - series.partial_moment(x, 0, below);
        let m1 = series.mean(x).mid() - series.partial_moment(x, 1, below);
        if !(z.is_finite() && m1.is_finite() && z > 0.0) {
            return Err(Error::PreconditionFailed(format!(
                "Gibbs weights at x = {x} do not give a finite expected loop length"
            )));
        }
        // Σ_ℓ a_ℓ x^ℓ (-ln(x^ℓ / Z)) / Z = -ln x · E[ℓ] + ln Z
        let mean = m1 / z;
        let choice_entropy = -x.ln() * mean + z.ln();
        Ok(LoopMarkov { system, law, ln_z: z.ln(), mean, choice_entropy })
    }

    /// Gibbs measure at the critical point: the measure of maximal entropy when it exists.
    pub fn max_entropy(system: Arc<LoopSystem>) -> Result<Self> {
        let gf = crate::thermo::loop_gf(&system);
        if gf.root.is_none() {
            return Err(Error::PreconditionFailed("f(x) = 1 has no root: no measure of maximal entropy".into()));
        }
        Self::new(system, LengthLaw::Gibbs { x: gf.x_c, min_len: 1, max_len: None })
    }

    /// Maximal-entropy measure of the loops with lengths in `[min_len, max_len]`.
    pub fn window_max_entropy(system: Arc<LoopSystem>, min_len: u64, max_len: u64) -> Result<Self> {
        let table = system.multiplicity_table(max_len);
        let rows: Vec<(u64, f64)> = (min_len.max(1)..=max_len)
            .map(|l| (l, ln_big(&table[l as usize])))
            .filter(|r| r.1 > f64::NEG_INFINITY)
            .collect();
        if rows.is_empty() {
            return Err(Error::validation("law", "no loops in the window"));
        }
        // solve Σ a_ℓ e^{-sℓ} = 1 for s (decreasing in s)
        let g = |s: f64| {
            let v: KahanSum = rows.iter().map(|&(l, la)| (la - s * l as f64).exp()).collect();
            v.value().ln()
        };
        let (mut lo, mut hi) = (-1.0, 1.0);
        while g(lo) < 0.0 {
            lo *= 2.0;
        }
        while g(hi) > 0.0 {
            hi *= 2.0;
        }
        let s = crate::numeric::bisect_increasing(lo, hi, 1e-14, |s| -g(s));
        Self::new(system, LengthLaw::Gibbs { x: (-s).exp(), min_len, max_len: Some(max_len) })
    }

    pub fn system(&self) -> &Arc<LoopSystem> {
        &self.system
    }

    pub fn law(&self) -> &LengthLaw {
        &self.law
    }

    pub fn mean_length(&self) -> f64 {
        self.mean
    }

    /// `ln` of the probability of choosing one particular loop of length `len`.
    fn ln_loop_prob(&self, len: u64) -> f64 {
        match &self.law {
            LengthLaw::Gibbs { x, min_len, max_len } => {
                if len < *min_len || max_len.is_some_and(|m| len > m) {
                    f64::NEG_INFINITY
                } else {
                    len as f64 * x.ln() - self.ln_z
                }
            }
            LengthLaw::Explicit { lengths } => {
                let p: f64 = lengths.iter().filter(|e| e.0 == len).map(|e| e.1).sum();
                if p > 0.0 {
                    p.ln() - ln_big(&self.system.multiplicity(len))
                } else {
                    f64::NEG_INFINITY
                }
            }
        }
    }

    /// Lengths carrying positive probability, or `None` for an unbounded law.
    fn support_lengths(&self) -> Option<Vec<u64>> {
        match &self.law {
            LengthLaw::Gibbs { max_len: None, .. } => None,
            LengthLaw::Gibbs { min_len, max_len: Some(m), .. } => Some((*min_len.max(&1)..=*m).collect()),
            LengthLaw::Explicit { lengths } => {
                let mut l: Vec<u64> = lengths.iter().filter(|e| e.1 > 0.0).map(|e| e.0).collect();
                l.sort_unstable();
                l.dedup();
                Some(l)
            }
        }
    }

    /// The same measure as an explicit chain on its (finite) support. Fails for unbounded
    /// laws and for supports with more than `cap` symbols.
    pub fn to_finite(&self, cap: usize) -> Result<FiniteMarkov> {
        let lengths = self.support_lengths().ok_or(Error::Capacity {
            what: "loop measure support",
            needed: u128::MAX,
            cap: cap as u128,
        })?;
        let mut loops: Vec<(u64, u64, u64, f64)> = Vec::new(); // (len, count, first symbol, prob per loop)
        let mut needed: u128 = 1;
        for &l in &lengths {
            let p = self.ln_loop_prob(l).exp();
            let a = self.system.multiplicity(l).to_u64().unwrap_or(u64::MAX);
            if p == 0.0 || a == 0 {
                continue;
            }
            needed = needed.saturating_add(a as u128 * (l - 1) as u128);
            if needed > cap as u128 {
                return Err(Error::Capacity { what: "loop measure support", needed, cap: cap as u128 });
            }
            let first = match l {
                1 => 1,
                _ => self
                    .system
                    .symbol_of(LoopPos::Internal { id: LoopId { len: l, copy: 0 }, offset: 1 })
                    .expect("bounded support fits")
                    .index(),
            };
            loops.push((l, a, first, p));
        }
        let mut syms: Vec<(u64, f64, Vec<(u64, f64)>)> = vec![(1, 1.0 / self.mean, Vec::new())];
        for &(l, a, first, p) in &loops {
            if l == 1 {
                syms[0].2.push((1, p));
                continue;
            }
            for c in 0..a {
                let start = first + c * (l - 1);
                syms[0].2.push((start, p));
                for o in 0..l - 1 {
                    let next = if o + 2 < l { start + o + 1 } else { 1 };
                    syms.push((start + o, p / self.mean, vec![(next, 1.0)]));
                }
            }
        }
        syms.sort_by_key(|e| e.0);
        let states: Vec<Symbol> = syms.iter().map(|e| Symbol::new(e.0)).collect();
        let index = |s: u64| states.binary_search(&Symbol::new(s)).expect("support symbol");
        let rows = syms.iter().map(|e| e.2.iter().map(|&(t, p)| (index(t), p)).collect()).collect();
        let pi = syms.iter().map(|e| e.1).collect();
        FiniteMarkov::new(states, pi, rows)
    }

    fn state_mass(&self, pos: LoopPos) -> f64 {
        match pos {
            LoopPos::Base => 1.0 / self.mean,
            LoopPos::Internal { id, .. } => self.ln_loop_prob(id.len).exp() / self.mean,
        }
    }
}

impl CylinderMeasure for LoopMarkov {
    fn cylinder_mass(&self, w: &[Symbol]) -> f64 {
        let Some(mut cur) = w.first().and_then(|&s| self.system.locate(s)) else {
            return 0.0;
        };
        let mut mass = self.state_mass(cur);
        for &s in &w[1..] {
            let Some(next) = self.system.locate(s) else { return 0.0 };
            let step = match (cur, next) {
                (LoopPos::Base, LoopPos::Base) => {
                    if self.system.multiplicity(1) == 1u32.into() {
                        self.ln_loop_prob(1).exp()
                    } else {
                        0.0
                    }
                }
                (LoopPos::Base, LoopPos::Internal { id, offset: 1 }) => self.ln_loop_prob(id.len).exp(),
                (p, q) if LoopSystem::next_in_loop(p) == Some(q) => 1.0,
                _ => 0.0,
            };
            mass *= step;
            if mass == 0.0 {
                return 0.0;
            }
            cur = next;
        }
        mass
    }

    fn entropy(&self) -> f64 {
        (self.choice_entropy / self.mean).max(0.0)
    }
}
