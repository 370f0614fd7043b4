use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::families::{drift_measures, loop_system, DriftSchedule};
use crate::error::{Error, Result};
use crate::measures::{
    cylinder_limit, CylinderLimit, CylinderMeasure, FiniteMarkov, LimitMethod, LimitOptions, LoopMarkov,
    MeasureSequence, Mixture,
};
use crate::numeric::ext_f64;
use crate::shift::{CmsGraph, FiniteGraph, Symbol, Word};
use crate::thermo::loop_gf;

/// Slack tolerance of the verifiers.
pub const VERIFY_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub step: usize,
    pub entropy: f64,
    /// Mass of `[1]`.
    pub base_mass: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub name: String,
    pub parameters: serde_json::Value,
    #[serde(with = "ext_f64")]
    pub lhs: f64,
    #[serde(with = "ext_f64")]
    pub rhs: f64,
    /// `rhs - lhs`.
    #[serde(with = "ext_f64")]
    pub slack: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub trace: Vec<TraceStep>,
    pub limit: Option<CylinderLimit>,
}

impl ExperimentReport {
    fn new(
        name: &str,
        parameters: serde_json::Value,
        lhs: f64,
        rhs: f64,
        trace: Vec<TraceStep>,
        limit: Option<CylinderLimit>,
    ) -> Self {
        let slack = rhs - lhs;
        ExperimentReport {
            name: name.into(),
            parameters,
            lhs,
            rhs,
            slack,
            tolerance: VERIFY_TOL,
            pass: slack >= -VERIFY_TOL,
            trace,
            limit,
        }
    }
}

/// Index where the final third of a length-`n` sequence starts.
pub fn tail_start(n: usize) -> usize {
    (2 * n / 3).min(n.saturating_sub(2))
}

/// Max entropy over the final third: the finite stand-in for `limsup`.
pub fn limsup_proxy(entropies: &[f64]) -> f64 {
    entropies[tail_start(entropies.len())..].iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// Admissible words of length one and two over the symbols `1..=q`.
pub fn tracked_cylinders(g: &CmsGraph, q: u64) -> Vec<Word> {
    let syms: Vec<Symbol> = (1..=q).map(Symbol::new).filter(|&s| g.contains(s)).collect();
    let mut out: Vec<Word> = syms.iter().map(|&s| vec![s]).collect();
    for &a in &syms {
        for &b in &syms {
            if g.is_edge(a, b) {
                out.push(vec![a, b]);
            }
        }
    }
    out
}

fn trace_of(seq: &MeasureSequence) -> Vec<TraceStep> {
    seq.items
        .iter()
        .enumerate()
        .map(|(step, m)| TraceStep { step, entropy: m.entropy(), base_mass: m.cylinder_mass(&[Symbol::new(1)]) })
        .collect()
}

fn limit_of(g: &CmsGraph, seq: &MeasureSequence) -> Result<CylinderLimit> {
    let opts = LimitOptions { ambient: g.as_finite().cloned(), ..LimitOptions::default() };
    let lim = cylinder_limit(seq, &tracked_cylinders(g, 16), &opts)?;
    if !lim.non_convergent.is_empty() {
        return Err(Error::NonConvergent(format!(
            "{} tracked cylinders fail the Cauchy check",
            lim.non_convergent.len()
        )));
    }
    if lim.method == LimitMethod::Ladder {
        return Err(Error::NonConvergent("limit measure could not be identified".into()));
    }
    Ok(lim)
}

/// Check `limsup h(μ_n) ≤ |μ| h(μ/|μ|) + (1 - |μ|) δ∞` along `seq`.
pub fn verify_main_inequality(g: &CmsGraph, seq: &MeasureSequence, delta_inf: f64) -> Result<ExperimentReport> {
    let lim = limit_of(g, seq)?;
    let trace = trace_of(seq);
    let lhs = limsup_proxy(&seq.entropies());
    let rhs = if lim.mass == 0.0 {
        delta_inf
    } else {
        lim.mass * lim.normalized_entropy().expect("identified limit") + (1.0 - lim.mass) * delta_inf
    };
    let params = serde_json::json!({
        "family": seq.tag,
        "steps": seq.items.len(),
        "delta_inf": ext_f64::format(delta_inf),
    });
    Ok(ExperimentReport::new("verify-main", params, lhs, rhs, trace, Some(lim)))
}

/// Check `|μ| ≥ (c - δ∞)/(h_top - δ∞)` for a sequence with entropies at least `c`.
pub fn mass_bound_check(
    g: &CmsGraph,
    seq: &MeasureSequence,
    c: f64,
    delta_inf: f64,
    h_top: f64,
) -> Result<ExperimentReport> {
    if h_top <= delta_inf {
        return Err(Error::PreconditionFailed(format!("not SPR: h_top = {h_top}, delta_inf = {delta_inf}")));
    }
    if let Some((i, h)) = seq.entropies().into_iter().enumerate().find(|&(_, h)| h < c - VERIFY_TOL) {
        return Err(Error::PreconditionFailed(format!("entropy {h} of measure {i} is below c = {c}")));
    }
    let lim = limit_of(g, seq)?;
    let bound = (c - delta_inf) / (h_top - delta_inf);
    let params = serde_json::json!({
        "c": c,
        "delta_inf": ext_f64::format(delta_inf),
        "h_top": h_top,
        "steps": seq.items.len(),
    });
    let mass = lim.mass;
    Ok(ExperimentReport::new("mass-bound", params, bound, mass, trace_of(seq), Some(lim)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HInfReport {
    /// Max entropy over the final third.
    pub value: f64,
    pub cutoffs: Vec<u64>,
    pub entropies: Vec<f64>,
    pub limit: CylinderLimit,
}

/// Lower bound for `h∞`: entropies along maximal-entropy measures on ever longer loops, after
/// checking that the sequence converges to the zero measure on cylinders.
pub fn h_inf_lower_bound(g: &CmsGraph, schedule: &DriftSchedule) -> Result<HInfReport> {
    let sys = loop_system(g)?;
    let (cutoffs, ms) = drift_measures(&sys, schedule)?;
    let seq = MeasureSequence::new(ms.into_iter().map(Mixture::single).collect(), "drift");
    let limit = cylinder_limit(&seq, &tracked_cylinders(g, 16), &LimitOptions::default())?;
    if limit.method != LimitMethod::Zero {
        return Err(Error::NotDrifting(format!("cylinder limit has method {:?}", limit.method)));
    }
    let entropies = seq.entropies();
    Ok(HInfReport { value: limsup_proxy(&entropies), cutoffs, entropies, limit })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub windows: Vec<u64>,
    pub entropies: Vec<f64>,
    pub h_top: f64,
    /// Largest `|lim μ_n(C) - μ_max(C)|` over the tracked cylinders.
    pub max_deviation: f64,
    pub pass: bool,
}

/// Maximal-entropy measures of the loops of length at most `K` for growing `K`: their entropies
/// approach `h_top`, and on SPR systems their cylinder limits are the maximal-entropy measure.
pub fn mme_stability(g: &CmsGraph, windows: &[u64], tol: f64) -> Result<StabilityReport> {
    let sys = loop_system(g).map_err(|_| Error::PreconditionFailed("stability runs on loop systems".into()))?;
    let h_top = loop_gf(&sys).log_growth;
    let mme = LoopMarkov::max_entropy(sys.clone())?;
    let items = windows
        .iter()
        .map(|&k| LoopMarkov::window_max_entropy(sys.clone(), 1, k).map(Mixture::single))
        .collect::<Result<Vec<_>>>()?;
    let seq = MeasureSequence::new(items, "mme-stability");
    let cyl = tracked_cylinders(g, 16);
    let lim = cylinder_limit(&seq, &cyl, &LimitOptions { tol, ..LimitOptions::default() })?;
    let max_deviation =
        lim.tracks.iter().zip(&cyl).map(|(t, w)| (t.limit - mme.cylinder_mass(w)).abs()).fold(0.0, f64::max);
    Ok(StabilityReport {
        windows: windows.to_vec(),
        entropies: seq.entropies(),
        h_top,
        max_deviation,
        pass: max_deviation <= tol && lim.non_convergent.is_empty(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UscTrial {
    pub limsup: f64,
    pub limit_entropy: f64,
    pub excess: f64,
    /// Limit mass of the sequence on the tracked cylinders.
    pub mass: f64,
    /// Largest `|lim μ_n(C) - μ(C)|` over the tracked cylinders.
    pub cylinder_gap: f64,
}

/// Random chains `P_n = P + (Q - P)/n²` on a strongly connected graph, converging to `P`.
/// Each trial compares the limsup proxy of `h(P_n)` with `h(P)`.
pub fn usc_trials(g: &FiniteGraph, trials: usize, steps: usize, seed: u64) -> Result<Vec<UscTrial>> {
    if !g.is_strongly_connected() {
        return Err(Error::NotStronglyConnected);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let states: Vec<Symbol> = (1..=g.len() as u64).map(Symbol::new).collect();
    let random_rows = |rng: &mut ChaCha8Rng| -> Vec<Vec<f64>> {
        (0..g.len())
            .map(|v| {
                let w: Vec<f64> = g.successors(v).iter().map(|_| rng.gen_range(0.05..1.0)).collect();
                let s: f64 = w.iter().sum();
                w.into_iter().map(|x| x / s).collect()
            })
            .collect()
    };
    let chain = |rows: &[Vec<f64>]| {
        let r = rows
            .iter()
            .enumerate()
            .map(|(v, row)| g.successors(v).iter().copied().zip(row.iter().copied()).collect())
            .collect();
        FiniteMarkov::from_transitions(states.clone(), r)
    };
    let ambient = CmsGraph::Finite(g.clone());
    let cylinders = tracked_cylinders(&ambient, g.len() as u64);
    (0..trials)
        .map(|_| {
            let p = random_rows(&mut rng);
            let q = random_rows(&mut rng);
            let limit = chain(&p)?;
            let chains = (1..=steps)
                .map(|n| {
                    let e = 1.0 / (n * n) as f64;
                    let rows: Vec<Vec<f64>> = p
                        .iter()
                        .zip(&q)
                        .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + (y - x) * e).collect())
                        .collect();
                    chain(&rows)
                })
                .collect::<Result<Vec<_>>>()?;
            let entropies: Vec<f64> = chains.iter().map(|m| m.entropy()).collect();
            let seq = MeasureSequence::new(chains.into_iter().map(Mixture::single).collect(), "usc");
            let lim = cylinder_limit(&seq, &cylinders, &LimitOptions::default())?;
            let cylinder_gap = lim
                .tracks
                .iter()
                .zip(&cylinders)
                .map(|(t, w)| (t.limit - limit.cylinder_mass(w)).abs())
                .fold(0.0, f64::max);
            let limsup = limsup_proxy(&entropies);
            let limit_entropy = limit.entropy();
            Ok(UscTrial { limsup, limit_entropy, excess: limsup - limit_entropy, mass: lim.mass, cylinder_gap })
        })
        .collect()
}
