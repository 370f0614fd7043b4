//! Exact analysis of loop-system generating functions `f(x) = Σ a_ℓ x^ℓ`.
//!
//! The base vertex of a loop system sees first returns of length `ℓ` exactly `a_ℓ` times, so
//! `Z_n(base)` has generating function `1/(1 - f)`. Entropy, recurrence and the entropy at
//! infinity all follow from `f`, its radius of convergence `R` and the root of `f = 1`.

use serde::{Deserialize, Serialize};

use crate::numeric::{bisect_increasing, ext_f64, ln_big, KahanSum};
use crate::shift::{LoopPos, LoopSystem, Symbol, Tail};

/// Lengths with tabulated (exact) multiplicities.
const HEAD_LEN: u64 = 256;
/// Maximum number of tail terms summed before falling back on bounds.
const TERM_CAP: u64 = 20_000_000;
/// Terms summed explicitly when evaluating at the radius itself.
const RADIUS_TERMS: u64 = 1_000_000;

/// A closed interval known to contain a real value.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bracket {
    #[serde(with = "ext_f64")]
    pub lo: f64,
    #[serde(with = "ext_f64")]
    pub hi: f64,
}

impl Bracket {
    pub fn exact(v: f64) -> Self {
        Bracket { lo: v, hi: v }
    }

    pub fn mid(&self) -> f64 {
        if self.hi.is_infinite() {
            self.hi
        } else {
            0.5 * (self.lo + self.hi)
        }
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    pub fn is_infinite(&self) -> bool {
        self.lo.is_infinite()
    }
}

/// Envelope `a_ℓ ≤ exp(ln_c + ℓ ln_g) ℓ^p` valid beyond the tabulated head.
#[derive(Copy, Clone, Debug)]
struct Envelope {
    ln_c: f64,
    ln_g: f64,
    p: f64,
}

#[derive(Clone, Debug)]
enum TailModel {
    None,
    /// Same floor formula as [`Tail::PowerGeometric`].
    Power {
        from_length: u64,
        coeff: f64,
        growth: f64,
        power: f64,
    },
    /// `a_ℓ g^{-ℓ} = 1/(ℓ(ℓ+1)) + O(g^{-ℓ})`; the error is far below `f64` resolution past
    /// the head.
    Greedy {
        ln_g: f64,
    },
}

/// Coefficient source for `Σ w_ℓ x^ℓ`, where `w_ℓ = scale · (a_ℓ + adjust_ℓ)`.
#[derive(Clone, Debug)]
pub struct GfSeries {
    head: Vec<f64>,
    tail: TailModel,
    max_len: Option<u64>,
    adjust: Vec<(u64, f64)>,
    scale: f64,
}

impl GfSeries {
    pub fn new(sys: &LoopSystem) -> Self {
        let explicit_end = sys.explicit_loops().iter().map(|e| e.0).max().unwrap_or(0);
        let max_len = sys.max_loop_len();
        let head_len = match max_len {
            Some(m) => m,
            None => HEAD_LEN.max(explicit_end),
        };
        let head = sys.multiplicity_table(head_len).iter().map(ln_big).collect();
        let tail = match (max_len, sys.tail()) {
            (Some(_), _) | (None, None) => TailModel::None,
            (None, Some(&Tail::PowerGeometric { from_length, coeff, growth, power })) => {
                TailModel::Power { from_length, coeff, growth, power }
            }
            (None, Some(&Tail::GreedyCritical { growth })) => TailModel::Greedy { ln_g: (growth as f64).ln() },
        };
        GfSeries { head, tail, max_len, adjust: Vec::new(), scale: 1.0 }
    }

    /// Weight each loop by `e^{-t·k}`, `k` the number of its vertices (base included) in `set`.
    pub fn weighted(sys: &LoopSystem, set: &[Symbol], t: f64) -> Self {
        GfSeries::new(sys).reweighted(sys, set, t)
    }

    /// [`GfSeries::weighted`] reusing this series' coefficients (which must come from `sys`).
    pub fn reweighted(&self, sys: &LoopSystem, set: &[Symbol], t: f64) -> Self {
        let mut s = GfSeries { adjust: Vec::new(), scale: 1.0, ..self.clone() };
        let mut visits: Vec<(u64, u64, u64)> = Vec::new();
        for &v in set {
            match sys.locate(v) {
                Some(LoopPos::Base) => s.scale = (-t).exp(),
                Some(LoopPos::Internal { id, .. }) => {
                    match visits.iter_mut().find(|e| (e.0, e.1) == (id.len, id.copy)) {
                        Some(e) => e.2 += 1,
                        None => visits.push((id.len, id.copy, 1)),
                    }
                }
                None => {}
            }
        }
        s.adjust = visits.into_iter().map(|(len, _, k)| (len, (-t * k as f64).exp() - 1.0)).collect();
        s
    }

    fn head_len(&self) -> u64 {
        self.head.len() as u64 - 1
    }

    fn ln_tail_coeff(&self, len: u64) -> f64 {
        match self.tail {
            TailModel::None => f64::NEG_INFINITY,
            TailModel::Power { from_length, coeff, growth, power } => {
                if len < from_length || coeff <= 0.0 {
                    return f64::NEG_INFINITY;
                }
                let l2 = coeff.log2() + len as f64 * growth.log2() + power * (len as f64).log2();
                if l2 < 0.0 {
                    f64::NEG_INFINITY
                } else if l2 < 53.0 {
                    l2.exp2().floor().ln()
                } else {
                    l2 * std::f64::consts::LN_2
                }
            }
            TailModel::Greedy { ln_g } => len as f64 * ln_g - ((len * (len + 1)) as f64).ln(),
        }
    }

    fn envelope(&self) -> Option<Envelope> {
        match self.tail {
            TailModel::None => None,
            TailModel::Power { coeff, growth, power, .. } => {
                Some(Envelope { ln_c: coeff.ln(), ln_g: growth.ln(), p: power })
            }
            TailModel::Greedy { ln_g } => Some(Envelope { ln_c: 0.0, ln_g, p: -2.0 }),
        }
    }

    /// Radius of convergence: `1/growth` for infinite tails, `+inf` for finitely many loops.
    pub fn radius(&self) -> f64 {
        match self.envelope() {
            None => f64::INFINITY,
            Some(e) => (-e.ln_g).exp(),
        }
    }

    fn head_sum(&self, x: f64, k: i32, upto: u64) -> KahanSum {
        let ln_x = x.ln();
        let mut sum = KahanSum::default();
        for (len, &la) in self.head.iter().enumerate().take(upto as usize + 1).skip(1) {
            if la > f64::NEG_INFINITY {
                sum.add((la + len as f64 * ln_x).exp() * (len as f64).powi(k));
            }
        }
        for &(len, delta) in &self.adjust {
            if len <= upto {
                sum.add(delta * x.powi(len as i32) * (len as f64).powi(k));
            }
        }
        sum
    }

    /// `Σ ℓ^k w_ℓ x^ℓ` for `k ∈ {0, 1}` and `x > 0`, as a bracket.
    pub fn moment(&self, x: f64, k: i32) -> Bracket {
        let r = self.radius();
        if x > r {
            return Bracket::exact(f64::INFINITY);
        }
        if x == r {
            return self.moment_at_radius(k);
        }
        let mut sum = self.head_sum(x, k, self.head_len());
        let Some(env) = self.envelope() else {
            return Bracket::exact(self.scale * sum.value());
        };
        if let Some(t) = self.closed_tail(x, k) {
            sum.add(t);
            let v = sum.value();
            return Bracket { lo: self.scale * v, hi: self.scale * v * (1.0 + 1e-15) };
        }
        let ln_x = x.ln();
        let mut len = self.head_len();
        let mut rem = f64::INFINITY;
        while len < self.head_len() + TERM_CAP {
            len += 1;
            let la = self.ln_tail_coeff(len);
            let lnl = (len as f64).ln();
            if la > f64::NEG_INFINITY {
                sum.add((la + len as f64 * ln_x + k as f64 * lnl).exp());
            }
            if len.is_multiple_of(64) {
                let p = env.p + k as f64;
                let ratio = (env.ln_g + ln_x).exp() * (1.0 + 1.0 / len as f64).powf(p.max(0.0));
                if ratio < 1.0 {
                    let term = (env.ln_c + len as f64 * (env.ln_g + ln_x) + p * lnl).exp();
                    rem = term * ratio / (1.0 - ratio);
                    if rem <= 1e-16 * sum.value().max(1e-300) {
                        break;
                    }
                }
            }
        }
        let v = sum.value();
        Bracket { lo: self.scale * v, hi: self.scale * (v + rem) }
    }

    /// Tail sum past the head in closed form, for geometric tails whose floors are exact
    /// (constant multiplicities) or negligible (beyond `f64` resolution).
    fn closed_tail(&self, x: f64, k: i32) -> Option<f64> {
        let TailModel::Power { from_length, coeff, growth, power } = self.tail else {
            return None;
        };
        if power != 0.0 {
            return None;
        }
        let start = (self.head_len() + 1).max(from_length);
        let (a, y) = if growth == 1.0 {
            (coeff.floor(), x)
        } else if coeff.log2() + start as f64 * growth.log2() >= 53.0 {
            (coeff, growth * x)
        } else {
            return None;
        };
        let s = start as f64;
        let ys = (s * y.ln()).exp();
        Some(match k {
            0 => a * ys / (1.0 - y),
            _ => a * ys * (s - (s - 1.0) * y) / ((1.0 - y) * (1.0 - y)),
        })
    }

    pub fn value(&self, x: f64) -> Bracket {
        self.moment(x, 0)
    }

    pub fn mean(&self, x: f64) -> Bracket {
        self.moment(x, 1)
    }

    fn moment_at_radius(&self, k: i32) -> Bracket {
        let env = self.envelope().expect("finite radius implies an infinite tail");
        let p = env.p + k as f64;
        if let TailModel::Greedy { .. } = self.tail {
            if k == 0 && self.adjust.is_empty() {
                // the greedy digits telescope: Σ a_ℓ g^{-ℓ} = R_1 - lim R_ℓ = 1
                return Bracket::exact(self.scale);
            }
        }
        if env.ln_g == 0.0 || p >= -1.0 {
            return Bracket::exact(f64::INFINITY);
        }
        let x = self.radius();
        let mut sum = self.head_sum(x, k, self.head_len());
        let ln_x = x.ln();
        let last = self.head_len() + RADIUS_TERMS;
        for len in self.head_len() + 1..=last {
            let la = self.ln_tail_coeff(len);
            if la > f64::NEG_INFINITY {
                sum.add((la + len as f64 * ln_x + k as f64 * (len as f64).ln()).exp());
            }
        }
        // Σ_{ℓ>L} c ℓ^p lies between the integrals from L+1 and from L; floors lose < g^{-ℓ}
        let c = env.ln_c.exp();
        let l = last as f64;
        let hi_tail = c * l.powf(p + 1.0) / (-p - 1.0);
        let floor_loss = (-(l * env.ln_g)).exp() / (env.ln_g.exp() - 1.0) * l.powi(k);
        let lo_tail = (c * (l + 1.0).powf(p + 1.0) / (-p - 1.0) - floor_loss).max(0.0);
        let v = sum.value();
        Bracket { lo: self.scale * (v + lo_tail), hi: self.scale * (v + hi_tail) }
    }

    /// `Σ_{ℓ≤len} ℓ^k w_ℓ x^ℓ` (tail coefficients past the head use the closed form).
    pub fn partial_moment(&self, x: f64, k: i32, len: u64) -> f64 {
        let mut sum = self.head_sum(x, k, len.min(self.head_len()));
        let ln_x = x.ln();
        for l in self.head_len() + 1..=len {
            let la = self.ln_tail_coeff(l);
            if la > f64::NEG_INFINITY {
                sum.add((la + l as f64 * ln_x + k as f64 * (l as f64).ln()).exp());
            }
        }
        self.scale * sum.value()
    }

    pub fn max_len(&self) -> Option<u64> {
        self.max_len
    }
}

/// Where the critical point `x_c = min(x*, R)` sits.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RootStatus {
    /// `f(x*) = 1` with `x* < R`.
    Interior,
    /// `f(R) = 1` exactly.
    AtRadius,
    /// `f(R) < 1`: no root, `x_c = R`.
    Absent,
    /// The bracket for `f(R)` contains `1`.
    Undecided,
}

/// Partial sums of `f` and of `Σ ℓ a_ℓ x^ℓ` at the critical point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartialSum {
    pub len: u64,
    pub f: f64,
    #[serde(with = "ext_f64")]
    pub mean: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LoopGf {
    #[serde(with = "ext_f64")]
    pub radius: f64,
    /// `f(R^-)`; `+inf` for finitely many loops.
    pub f_at_radius: Bracket,
    pub status: RootStatus,
    /// Root of `f(x) = 1` when it exists.
    #[serde(with = "ext_f64::option")]
    pub root: Option<f64>,
    /// `min(x*, R)`.
    pub x_c: f64,
    /// `Σ ℓ a_ℓ x_c^ℓ`.
    pub mean: Bracket,
    /// `-ln x_c`: Gurevich entropy (or pressure, for weighted series).
    pub log_growth: f64,
    pub evidence: Vec<PartialSum>,
}

const ROOT_TOL: f64 = 1e-12;

/// Root status, root and `f(R^-)` of a (possibly weighted) series.
fn critical_point(series: &GfSeries) -> (RootStatus, Option<f64>, Bracket) {
    let radius = series.radius();
    if radius.is_infinite() {
        let mut hi = 1.0;
        while series.value(hi).lo < 1.0 && hi < 1e300 {
            hi *= 2.0;
        }
        let x = bisect_increasing(0.0, hi, ROOT_TOL * hi.min(1.0), |x| series.value(x).mid() - 1.0);
        return (RootStatus::Interior, Some(x), Bracket::exact(f64::INFINITY));
    }
    let fr = series.value(radius);
    if fr.hi < 1.0 {
        (RootStatus::Absent, None, fr)
    } else if fr.lo == 1.0 && fr.hi == 1.0 {
        (RootStatus::AtRadius, Some(radius), fr)
    } else if fr.lo > 1.0 {
        let x = bisect_increasing(0.0, radius, ROOT_TOL * radius.min(1.0), |x| series.value(x).mid() - 1.0);
        (RootStatus::Interior, Some(x), fr)
    } else {
        (RootStatus::Undecided, None, fr)
    }
}

/// `-ln x_c` alone, skipping the mean and the partial-sum evidence.
pub fn log_growth(series: &GfSeries) -> f64 {
    -critical_point(series).1.unwrap_or(series.radius()).ln()
}

/// Analyse a (possibly weighted) series.
pub fn analyse(series: &GfSeries) -> LoopGf {
    let radius = series.radius();
    let (status, root, f_at_radius) = critical_point(series);
    let x_c = root.unwrap_or(radius);
    let mean = series.mean(x_c);
    let top = series.max_len().unwrap_or(1 << 16).min(1 << 16);
    let evidence = std::iter::successors(Some(16u64), |l| Some(l * 4))
        .take_while(|&l| l <= top.max(16))
        .map(|len| PartialSum { len, f: series.partial_moment(x_c, 0, len), mean: series.partial_moment(x_c, 1, len) })
        .collect();
    LoopGf { radius, f_at_radius, status, root, x_c, mean, log_growth: -x_c.ln(), evidence }
}

/// Generating-function analysis of the unweighted loop system.
pub fn loop_gf(sys: &LoopSystem) -> LoopGf {
    analyse(&GfSeries::new(sys))
}

/// `ln` of the multiplicity growth: the exact `Δ∞` at the base (`-inf` for finitely many loops).
pub fn tail_log_growth(sys: &LoopSystem) -> f64 {
    sys.tail_growth().map_or(f64::NEG_INFINITY, f64::ln)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renewal_closed_forms() {
        let gf = loop_gf(&LoopSystem::renewal());
        assert_eq!(gf.radius, 1.0);
        assert_eq!(gf.status, RootStatus::Interior);
        assert!((gf.x_c - 0.5).abs() < 1e-12);
        assert!((gf.mean.mid() - 2.0).abs() < 1e-10);
        assert!((gf.log_growth - 2f64.ln()).abs() < 1e-11);
        assert!(gf.f_at_radius.lo.is_infinite());
    }

    #[test]
    fn every_length_doubling() {
        // a_ℓ = 2^ℓ for all ℓ ≥ 1: f = 2x/(1-2x), x* = 1/4
        let gf = loop_gf(&LoopSystem::geometric(1, 1.0, 2.0, 0.0));
        assert_eq!(gf.radius, 0.5);
        assert!((gf.x_c - 0.25).abs() < 1e-12);
        assert!((gf.log_growth - 4f64.ln()).abs() < 1e-11);
        // mean Σ ℓ 2^ℓ 4^{-ℓ} = Σ ℓ 2^{-ℓ} = 2
        assert!((gf.mean.mid() - 2.0).abs() < 1e-10);
    }

    #[test]
    fn doubling_from_two() {
        // f = 4x²/(1-2x); root of 4x² + 2x - 1
        let gf = loop_gf(&LoopSystem::geometric(2, 1.0, 2.0, 0.0));
        let want = (5f64.sqrt() - 1.0) / 4.0;
        assert!((gf.x_c - want).abs() < 1e-12);
    }

    #[test]
    fn quadratically_damped_family_is_subcritical() {
        let gf = loop_gf(&LoopSystem::geometric(1, 0.25, 2.0, -2.0));
        assert_eq!(gf.status, RootStatus::Absent);
        assert_eq!(gf.x_c, 0.5);
        // oracle: exact partial sum to 4000 plus the envelope bound Σ_{ℓ>4000} 1/(4ℓ²)
        let sys = LoopSystem::geometric(1, 0.25, 2.0, -2.0);
        let mut partial = 0.0;
        for (l, a) in sys.multiplicities().take(4000) {
            partial += (ln_big(&a) - l as f64 * 2f64.ln()).exp();
        }
        assert!(gf.f_at_radius.lo >= partial - 1e-12);
        assert!(gf.f_at_radius.hi <= partial + 0.25 / 3999.0);
        assert!(gf.f_at_radius.hi < std::f64::consts::PI.powi(2) / 24.0);
        assert!(gf.f_at_radius.hi - gf.f_at_radius.lo < 1e-9);
    }

    #[test]
    fn greedy_digits_sit_at_the_radius() {
        let sys = LoopSystem::new(vec![], Some(Tail::GreedyCritical { growth: 2 }));
        let gf = loop_gf(&sys);
        assert_eq!(gf.status, RootStatus::AtRadius);
        assert_eq!(gf.x_c, 0.5);
        assert!(gf.mean.lo.is_infinite());
        // partial sums of the mean grow without bound, roughly like ln ℓ
        let means: Vec<f64> = gf.evidence.iter().map(|e| e.mean).collect();
        assert!(means.windows(2).all(|w| w[1] > w[0] + 1.0));
        // and f's partial sums approach 1
        let last = gf.evidence.last().unwrap();
        assert!((last.f - 1.0).abs() < 1e-3);
    }

    #[test]
    fn finite_loop_lists_are_polynomials() {
        // loops of length 1 and 2: f = x + x², root (√5 - 1)/2
        let sys = LoopSystem::new(vec![(1, 1), (2, 1)], None);
        let gf = loop_gf(&sys);
        assert!(gf.radius.is_infinite());
        assert!((gf.x_c - (5f64.sqrt() - 1.0) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn weighting_the_base_matches_closed_form() {
        // renewal with e^{-t} per visit to the base: x_t = 1/(1 + e^{-t})
        for t in [0.0, 0.5, 2.0, 10.0] {
            let s = GfSeries::weighted(&LoopSystem::renewal(), &[Symbol::new(1)], t);
            let gf = analyse(&s);
            assert!((gf.log_growth - (1.0 + (-t).exp()).ln()).abs() < 1e-10, "t={t}");
        }
    }
}
