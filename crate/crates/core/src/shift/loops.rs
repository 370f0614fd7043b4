use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use super::Symbol;

/// Rule generating loop multiplicities beyond the explicit list.
#[derive(Clone, Debug, PartialEq)]
pub enum Tail {
    /// `a_ℓ = floor(coeff · growth^ℓ · ℓ^power)` for `ℓ ≥ from_length`, evaluated in the
    /// base-2 log domain so that powers of two are exact.
    PowerGeometric { from_length: u64, coeff: f64, growth: f64, power: f64 },
    /// Greedy integer digits: with `R_1 = 1`,
    /// `a_ℓ = floor(g^ℓ (R_ℓ - 1/(ℓ+1)))` and `R_{ℓ+1} = R_ℓ - a_ℓ g^{-ℓ}`.
    /// Then `R_{ℓ+1} ∈ [1/(ℓ+1), 1/(ℓ+1) + g^{-ℓ})`, so `Σ a_ℓ g^{-ℓ} = 1` exactly while
    /// `Σ ℓ a_ℓ g^{-ℓ}` diverges like the harmonic series.
    GreedyCritical { growth: u32 },
}

impl Tail {
    fn power_log2(from_length: u64, coeff: f64, growth: f64, power: f64, len: u64) -> Option<f64> {
        if len < from_length || coeff <= 0.0 {
            return None;
        }
        let l2 = coeff.log2() + len as f64 * growth.log2() + power * (len as f64).log2();
        (l2 >= 0.0).then_some(l2)
    }

    /// Length after which the tail vanishes; `None` when it is infinite.
    fn support_end(&self) -> Option<u64> {
        match *self {
            Tail::GreedyCritical { .. } => None,
            Tail::PowerGeometric { from_length, coeff, growth, power } => {
                if coeff <= 0.0 {
                    Some(0)
                } else if growth > 1.0 || power > 0.0 || (power == 0.0 && coeff >= 1.0) {
                    None
                } else if power == 0.0 {
                    Some(0)
                } else {
                    // growth == 1 and power < 0: coeff·ℓ^power ≥ 1 iff ℓ ≤ coeff^{-1/power}
                    let last = coeff.powf(-1.0 / power).floor() as u64 + 1;
                    Some(last.max(from_length))
                }
            }
        }
    }
}

/// `floor(2^l2)` as an exact integer, keeping 53 significant bits for huge values.
fn floor_exp2(l2: f64) -> BigUint {
    if l2 < 53.0 {
        BigUint::from(l2.exp2().floor() as u64)
    } else {
        let e = l2.floor();
        let mant = (l2 - e + 52.0).exp2().floor() as u64;
        BigUint::from(mant) << ((e as u64) - 52)
    }
}

/// Identifies one simple loop: its length and its index among loops of that length.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LoopId {
    pub len: u64,
    pub copy: u64,
}

/// Position of a symbol inside a loop system.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum LoopPos {
    Base,
    /// `offset ∈ 1..len` counts steps from the base.
    Internal {
        id: LoopId,
        offset: u64,
    },
}

/// A base vertex with `a_ℓ` simple loops of each length `ℓ`.
#[derive(Clone, Debug, PartialEq)]
pub struct LoopSystem {
    explicit: Vec<(u64, u64)>,
    tail: Option<Tail>,
}

impl LoopSystem {
    /// Callers must validate (see [`super::load_graph`]); this only assembles the parts.
    pub fn new(explicit: Vec<(u64, u64)>, tail: Option<Tail>) -> Self {
        LoopSystem { explicit, tail }
    }

    /// The loop system with exactly one loop of every length.
    pub fn renewal() -> Self {
        Self::geometric(1, 1.0, 1.0, 0.0)
    }

    pub fn geometric(from_length: u64, coeff: f64, growth: f64, power: f64) -> Self {
        LoopSystem::new(Vec::new(), Some(Tail::PowerGeometric { from_length, coeff, growth, power }))
    }

    pub fn explicit_loops(&self) -> &[(u64, u64)] {
        &self.explicit
    }

    pub fn tail(&self) -> Option<&Tail> {
        self.tail.as_ref()
    }

    fn explicit_multiplicity(&self, len: u64) -> u64 {
        self.explicit.iter().filter(|e| e.0 == len).map(|e| e.1).sum()
    }

    fn explicit_end(&self) -> u64 {
        self.explicit.iter().filter(|e| e.1 > 0).map(|e| e.0).max().unwrap_or(0)
    }

    /// Length after which no loops exist; `None` for an infinite tail.
    pub fn max_loop_len(&self) -> Option<u64> {
        let tail_end = match &self.tail {
            None => Some(0),
            Some(t) => t.support_end(),
        };
        tail_end.map(|t| t.max(self.explicit_end()))
    }

    pub fn has_infinite_tail(&self) -> bool {
        self.max_loop_len().is_none()
    }

    /// Iterates `(ℓ, a_ℓ)` for `ℓ = 1, 2, …`; ends after the last loop when finitely many.
    pub fn multiplicities(&self) -> Multiplicities<'_> {
        Multiplicities {
            sys: self,
            len: 0,
            end: self.max_loop_len(),
            greedy: match self.tail {
                Some(Tail::GreedyCritical { growth }) => {
                    Some(GreedyState { g: BigUint::from(growth), numer: BigUint::one(), g_pow: BigUint::from(growth) })
                }
                _ => None,
            },
        }
    }

    /// `a_ℓ` for a single length. Linear in `ℓ` for greedy tails; prefer
    /// [`LoopSystem::multiplicity_table`] for many lengths.
    pub fn multiplicity(&self, len: u64) -> BigUint {
        if len == 0 {
            return BigUint::zero();
        }
        match self.tail {
            Some(Tail::GreedyCritical { .. }) => {
                self.multiplicities().find(|(l, _)| *l == len).map(|(_, a)| a).unwrap_or_default()
            }
            _ => self.tail_multiplicity(len) + self.explicit_multiplicity(len),
        }
    }

    fn tail_multiplicity(&self, len: u64) -> BigUint {
        match self.tail {
            Some(Tail::PowerGeometric { from_length, coeff, growth, power }) => {
                match Tail::power_log2(from_length, coeff, growth, power, len) {
                    Some(l2) => floor_exp2(l2),
                    None => BigUint::zero(),
                }
            }
            _ => BigUint::zero(),
        }
    }

    /// `[a_0 = 0, a_1, …, a_max]`.
    pub fn multiplicity_table(&self, max_len: u64) -> Vec<BigUint> {
        let mut table = vec![BigUint::zero(); max_len as usize + 1];
        for (l, a) in self.multiplicities().take_while(|(l, _)| *l <= max_len) {
            table[l as usize] = a;
        }
        table
    }

    /// Exponential growth rate of the multiplicities, i.e. `1/R` for the radius of
    /// convergence `R` of `Σ a_ℓ x^ℓ`. `None` when there are finitely many loops.
    pub fn tail_growth(&self) -> Option<f64> {
        if !self.has_infinite_tail() {
            return None;
        }
        match self.tail {
            Some(Tail::PowerGeometric { growth, .. }) => Some(growth),
            Some(Tail::GreedyCritical { growth }) => Some(growth as f64),
            None => None,
        }
    }

    /// Total number of symbols when the alphabet is finite (saturating).
    pub fn symbol_count(&self) -> Option<u64> {
        self.max_loop_len()?;
        let mut total: u64 = 1;
        for (l, a) in self.multiplicities() {
            let span = a * BigUint::from(l.saturating_sub(1));
            total = total.saturating_add(span.to_u64().unwrap_or(u64::MAX));
        }
        Some(total)
    }

    /// Position of a symbol under the canonical enumeration.
    pub fn locate(&self, s: Symbol) -> Option<LoopPos> {
        let s = s.index() as u128;
        if s == 1 {
            return Some(LoopPos::Base);
        }
        let mut start: u128 = 2;
        for (len, a) in self.multiplicities() {
            if len < 2 || a.is_zero() {
                continue;
            }
            let per = (len - 1) as u128;
            let span = a.to_u128().and_then(|a| a.checked_mul(per)).unwrap_or(u128::MAX);
            if s - start < span {
                let rel = s - start;
                return Some(LoopPos::Internal {
                    id: LoopId { len, copy: (rel / per) as u64 },
                    offset: (rel % per) as u64 + 1,
                });
            }
            start = start.saturating_add(span);
            if start > u64::MAX as u128 {
                return None;
            }
        }
        None
    }

    /// Inverse of [`LoopSystem::locate`]; `None` if the index does not fit in `u64`.
    pub fn symbol_of(&self, pos: LoopPos) -> Option<Symbol> {
        match pos {
            LoopPos::Base => Some(Symbol::new(1)),
            LoopPos::Internal { id, offset } => {
                let mut start: u128 = 2;
                for (len, a) in self.multiplicities() {
                    if len >= id.len {
                        break;
                    }
                    if len >= 2 {
                        let span = a.to_u128()?.checked_mul((len - 1) as u128)?;
                        start = start.checked_add(span)?;
                    }
                }
                let idx = start + id.copy as u128 * (id.len - 1) as u128 + (offset - 1) as u128;
                u64::try_from(idx).ok().map(Symbol::new)
            }
        }
    }

    /// Successor positions, excluding the infinitely many loop entries from the base.
    pub fn next_in_loop(pos: LoopPos) -> Option<LoopPos> {
        match pos {
            LoopPos::Base => None,
            LoopPos::Internal { id, offset } if offset + 1 < id.len => {
                Some(LoopPos::Internal { id, offset: offset + 1 })
            }
            LoopPos::Internal { .. } => Some(LoopPos::Base),
        }
    }

    pub fn is_edge(&self, a: Symbol, b: Symbol) -> bool {
        let (Some(pa), Some(pb)) = (self.locate(a), self.locate(b)) else {
            return false;
        };
        match (pa, pb) {
            (LoopPos::Base, LoopPos::Base) => self.multiplicity(1).is_one(),
            (LoopPos::Base, LoopPos::Internal { offset, .. }) => offset == 1,
            (p, q) => LoopSystem::next_in_loop(p) == Some(q),
        }
    }

    /// `(symbol, position)` for every symbol up to `q`, in enumeration order.
    pub fn positions_upto(&self, q: u64) -> Vec<(Symbol, LoopPos)> {
        let mut out = Vec::new();
        if q == 0 {
            return out;
        }
        out.push((Symbol::new(1), LoopPos::Base));
        let mut next: u64 = 2;
        'outer: for (len, a) in self.multiplicities() {
            if next > q {
                break;
            }
            if len < 2 || a.is_zero() {
                continue;
            }
            let copies = a.to_u64().unwrap_or(u64::MAX);
            for copy in 0..copies {
                for offset in 1..len {
                    if next > q {
                        break 'outer;
                    }
                    out.push((Symbol::new(next), LoopPos::Internal { id: LoopId { len, copy }, offset }));
                    next += 1;
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug)]
struct GreedyState {
    g: BigUint,
    /// `R_ℓ = numer / g^{ℓ-1}`.
    numer: BigUint,
    /// `g^ℓ`.
    g_pow: BigUint,
}

/// Iterator over `(ℓ, a_ℓ)`; see [`LoopSystem::multiplicities`].
pub struct Multiplicities<'a> {
    sys: &'a LoopSystem,
    len: u64,
    end: Option<u64>,
    greedy: Option<GreedyState>,
}

impl Iterator for Multiplicities<'_> {
    type Item = (u64, BigUint);

    fn next(&mut self) -> Option<Self::Item> {
        self.len += 1;
        let len = self.len;
        if let Some(end) = self.end {
            if len > end {
                return None;
            }
        }
        let a = match &mut self.greedy {
            Some(st) => {
                let l1 = BigUint::from(len + 1);
                let num = &st.g * &st.numer * &l1;
                let a = if num > st.g_pow { (num - &st.g_pow) / l1 } else { BigUint::zero() };
                st.numer = &st.g * &st.numer - &a;
                st.g_pow = &st.g_pow * &st.g;
                a
            }
            None => self.sys.tail_multiplicity(len),
        };
        Some((len, a + self.sys.explicit_multiplicity(len)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn first(sys: &LoopSystem, n: usize) -> Vec<u64> {
        sys.multiplicities().take(n).map(|(_, a)| a.to_u64().unwrap()).collect()
    }

    #[test]
    fn renewal_has_one_loop_per_length() {
        assert_eq!(first(&LoopSystem::renewal(), 6), vec![1; 6]);
        assert!(LoopSystem::renewal().has_infinite_tail());
    }

    #[test]
    fn powers_of_two_are_exact() {
        let sys = LoopSystem::geometric(2, 1.0, 2.0, 0.0);
        assert_eq!(first(&sys, 5), vec![0, 4, 8, 16, 32]);
        assert_eq!(sys.multiplicity(200), BigUint::one() << 200u32);
    }

    #[test]
    fn quadratic_damping_matches_integer_division() {
        // floor(2^ℓ / (4ℓ²)) computed exactly
        let sys = LoopSystem::geometric(1, 0.25, 2.0, -2.0);
        for l in 1..=60u64 {
            let exact = (BigUint::one() << l) / BigUint::from(4 * l * l);
            assert_eq!(sys.multiplicity(l), exact, "length {l}");
        }
    }

    #[test]
    fn greedy_digits_follow_the_recursion() {
        let sys = LoopSystem::new(vec![], Some(Tail::GreedyCritical { growth: 2 }));
        assert_eq!(first(&sys, 5), vec![1, 0, 2, 0, 2]);
        // remainder invariant R_{ℓ+1} ∈ [1/(ℓ+1), 1/(ℓ+1) + 2^{-ℓ})
        let mut r = 1.0f64;
        for (l, a) in sys.multiplicities().take(40) {
            r -= a.to_f64().unwrap() * 0.5f64.powi(l as i32);
            let lo = 1.0 / (l + 1) as f64;
            assert!(r >= lo - 1e-12 && r < lo + 0.5f64.powi(l as i32) + 1e-12);
        }
    }

    #[test]
    fn finite_loop_lists_end() {
        let sys = LoopSystem::new(vec![(2, 1), (3, 2)], None);
        assert_eq!(sys.max_loop_len(), Some(3));
        assert_eq!(sys.symbol_count(), Some(1 + 1 + 4));
        assert_eq!(sys.multiplicities().count(), 3);
        let tail_only_small = LoopSystem::geometric(1, 3.0, 1.0, -1.0);
        assert_eq!(tail_only_small.max_loop_len(), Some(4));
    }

    #[test]
    fn enumeration_numbers_loops_consecutively() {
        let sys = LoopSystem::renewal();
        // base=1, loop len 2 -> {2}, len 3 -> {3,4}, len 4 -> {5,6,7}
        assert_eq!(sys.locate(Symbol::new(1)), Some(LoopPos::Base));
        let p = sys.locate(Symbol::new(4)).unwrap();
        assert_eq!(p, LoopPos::Internal { id: LoopId { len: 3, copy: 0 }, offset: 2 });
        assert_eq!(sys.symbol_of(p), Some(Symbol::new(4)));
        assert!(sys.is_edge(Symbol::new(4), Symbol::new(1)));
        assert!(sys.is_edge(Symbol::new(1), Symbol::new(5)));
        assert!(!sys.is_edge(Symbol::new(1), Symbol::new(6)));
        assert!(sys.is_edge(Symbol::new(1), Symbol::new(1)));
        for (s, pos) in sys.positions_upto(50) {
            assert_eq!(sys.locate(s), Some(pos));
            assert_eq!(sys.symbol_of(pos), Some(s));
        }
    }
}
