//! Acceptance gate: one line per criterion, nonzero exit when any fails.

use std::time::Instant;

use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cmshift::counting::{escape_count, escape_count_ab, first_return_count, loop_count};
use cmshift::density::{density_demo, DensityOptions};
use cmshift::infinity::{
    b_inf_estimate, dimension_series, family_sequence, h_inf_lower_bound, mass_bound_check, usc_trials,
    verify_main_inequality, BInfOptions, DriftSchedule, Family, SeriesVerdict,
};
use cmshift::katok::{greedy_cover, katok_estimate};
use cmshift::measures::{parry_measure, CylinderMeasure, FiniteMarkov, MarkovMeasure};
use cmshift::shift::{CmsGraph, FiniteGraph, LoopSystem, Symbol, Tail};
use cmshift::thermo::{
    classify, delta_inf, gurevich_entropy, is_spr, GridSpec, RecurrenceClass, SprOptions, SprVerdict,
};

const LN2: f64 = std::f64::consts::LN_2;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn fail<E: std::fmt::Display>(e: E) -> String {
    format!("error: {e}")
}

fn full2() -> CmsGraph {
    CmsGraph::Finite(FiniteGraph::from_edges(2, [(1, 1), (1, 2), (2, 1), (2, 2)]))
}

fn golden_graph() -> FiniteGraph {
    FiniteGraph::from_edges(2, [(1, 1), (1, 2), (2, 1)])
}

fn renewal() -> CmsGraph {
    CmsGraph::Loop(LoopSystem::renewal())
}

fn doubling() -> CmsGraph {
    CmsGraph::Loop(LoopSystem::geometric(2, 1.0, 2.0, 0.0))
}

/// `a_ℓ = ⌊2^ℓ / (4ℓ²)⌋`.
fn damped() -> CmsGraph {
    CmsGraph::Loop(LoopSystem::geometric(1, 0.25, 2.0, -2.0))
}

fn greedy() -> CmsGraph {
    CmsGraph::Loop(LoopSystem::new(vec![], Some(Tail::GreedyCritical { growth: 2 })))
}

fn entropy() -> Outcome {
    let a = Symbol::new(1);
    let f = gurevich_entropy(&full2(), a, 24).map_err(fail)?.estimate.value;
    let g = gurevich_entropy(&CmsGraph::Finite(golden_graph()), a, 30).map_err(fail)?.estimate.value;
    let r = gurevich_entropy(&renewal(), a, 64).map_err(fail)?.estimate.value;
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    check(
        (f - LN2).abs() < 1e-3 && (g - phi.ln()).abs() < 5e-3 && (r - LN2).abs() < 1e-2,
        format!("full2 {f:.6} golden {g:.6} (ln φ {:.6}) renewal {r:.6}", phi.ln()),
    )
}

fn triple() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for (name, g, target) in [("renewal", renewal(), 0.0), ("2^l", doubling(), LN2)] {
        let d = delta_inf(&g, &GridSpec::default()).map_err(fail)?.headline.ok_or("grid undecided")?;
        let h = h_inf_lower_bound(&g, &DriftSchedule::default()).map_err(fail)?.value;
        let b = b_inf_estimate(&g, &BInfOptions::default()).map_err(fail)?.headline.ok_or("no b_inf")?;
        ok &= [d, h, b].iter().all(|v| (v - target).abs() <= 0.1);
        parts.push(format!("{name}: δ∞ {d:.4} h∞ {h:.4} b∞ {b:.4}"));
    }
    check(ok, parts.join("; "))
}

/// `f(1/2)` for `a_ℓ = ⌊2^ℓ/(4ℓ²)⌋`, summed directly; the tail past 200 is below `1/800`.
fn damped_f_half() -> f64 {
    (1..=200u32).map(|l| (2f64.powi(l as i32) / (4.0 * (l * l) as f64)).floor() / 2f64.powi(l as i32)).sum()
}

fn classification() -> Outcome {
    let a = Symbol::new(1);
    let r = classify(&renewal(), a).map_err(fail)?;
    let d = classify(&damped(), a).map_err(fail)?;
    let g = classify(&greedy(), a).map_err(fail)?;
    // renewal: f(x) = x/(1-x) = 1 at x = 1/2, where Σ ℓ x^ℓ = x/(1-x)² = 2
    let r_gf = r.evidence.as_ref().ok_or("no evidence")?;
    let renewal_oracle = (r_gf.x_c - 0.5).abs() < 1e-9 && (r_gf.mean.mid() - 2.0).abs() < 1e-9;
    let f_half = damped_f_half();
    let damped_oracle = f_half + 1.0 / 800.0 < 1.0;
    let trend = &g.evidence.as_ref().ok_or("no evidence")?.evidence;
    let means_grow = trend.windows(2).all(|w| w[1].mean > w[0].mean);
    let fs_rise = trend.windows(2).all(|w| w[1].f >= w[0].f) && trend.last().is_some_and(|p| p.f > 0.999);
    check(
        r.class == RecurrenceClass::PositiveRecurrent
            && r.exact
            && renewal_oracle
            && d.class == RecurrenceClass::Transient
            && d.exact
            && damped_oracle
            && g.class == RecurrenceClass::NullRecurrent
            && means_grow
            && fs_rise,
        format!(
            "renewal {:?}, damped {:?} (f(1/2) = {f_half:.4}), greedy {:?} (mean at len {} = {:.2})",
            r.class,
            d.class,
            g.class,
            trend.last().map_or(0, |p| p.len),
            trend.last().map_or(f64::NAN, |p| p.mean)
        ),
    )
}

fn spr() -> Outcome {
    let r = is_spr(&renewal(), &SprOptions::default()).map_err(fail)?;
    let d = is_spr(&damped(), &SprOptions::default()).map_err(fail)?;
    let big = d.exact_delta_inf.ok_or("no exact Δ∞")?;
    check(
        r.verdict == SprVerdict::Spr
            && r.margin >= 0.5
            && d.verdict == SprVerdict::NotSpr
            && (big - LN2).abs() <= 0.05
            && (d.h_top - LN2).abs() <= 0.05,
        format!(
            "renewal {:?} margin {:.4}; damped {:?} Δ∞ {big:.4} h_top {:.4}",
            r.verdict, r.margin, d.verdict, d.h_top
        ),
    )
}

fn main_inequality() -> Outcome {
    let mut worst = f64::INFINITY;
    let mut half = Vec::new();
    for (g, delta) in [(renewal(), 0.0), (doubling(), LN2)] {
        for fam in Family::ALL {
            let seq = family_sequence(&g, fam, 20).map_err(fail)?;
            let r = verify_main_inequality(&g, &seq, delta).map_err(fail)?;
            worst = worst.min(r.slack);
            if fam == Family::HalfMmeHalfDrift {
                half.push(r.slack);
            }
        }
    }
    check(
        worst >= -1e-9 && half.iter().all(|s| s.abs() <= 0.05),
        format!("6 runs, min slack {worst:.3e}, half-half slack {half:?}"),
    )
}

fn katok() -> Outcome {
    let bern: MarkovMeasure = FiniteMarkov::bernoulli(&[0.5, 0.5]).map_err(fail)?.into();
    let gold: MarkovMeasure = parry_measure(&golden_graph()).map_err(fail)?.into();
    let b = katok_estimate(&bern, &[0.1, 0.4], 10, 20).map_err(fail)?;
    let g = katok_estimate(&gold, &[0.1, 0.4], 11, 22).map_err(fail)?;
    let bg = b.gaps.iter().cloned().fold(0.0, f64::max);
    let gg = g.gaps.iter().cloned().fold(0.0, f64::max);
    check(
        bg <= 0.03 && gg <= 0.05 && b.delta_spread < 0.02 && g.delta_spread < 0.02,
        format!("Bernoulli gap {bg:.4} spread {:.4}; golden gap {gg:.4} spread {:.4}", b.delta_spread, g.delta_spread),
    )
}

fn mass_bound() -> Outcome {
    let g = renewal();
    let seq = family_sequence(&g, Family::HalfMmeHalfDrift, 20).map_err(fail)?;
    let r = mass_bound_check(&g, &seq, 0.5 * LN2, 0.0, LN2).map_err(fail)?;
    check(
        (r.rhs - 0.5).abs() <= 0.02 && (r.lhs - 0.5).abs() < 1e-9 && r.pass,
        format!("mass {:.6}, bound {:.6}", r.rhs, r.lhs),
    )
}

fn dimension() -> Outcome {
    let r = dimension_series(&renewal(), 16, 1, 0.5, 120).map_err(fail)?;
    let d = dimension_series(&doubling(), 16, 1, 0.5, 120).map_err(fail)?;
    check(
        r.verdict == SeriesVerdict::Convergent
            && r.small_from.is_some_and(|l| l <= 60)
            && d.verdict == SeriesVerdict::Diverging,
        format!("renewal {:?} small from ℓ = {:?}; 2^l {:?}", r.verdict, r.small_from, d.verdict),
    )
}

fn density() -> Outcome {
    let start = Instant::now();
    let (_, r) = density_demo(&DensityOptions::default()).map_err(fail)?;
    let secs = start.elapsed().as_secs_f64();
    check(
        r.rho.value <= 0.05 && r.entropy_gap <= 0.1 && secs < 120.0,
        format!("ρ {:.4}, gap {:.4}, {} vertices, {secs:.2}s", r.rho.value, r.entropy_gap, r.vertices),
    )
}

fn random_graph(rng: &mut ChaCha8Rng) -> FiniteGraph {
    loop {
        let n = rng.gen_range(1..=5usize);
        let edges: Vec<(u64, u64)> =
            (1..=n as u64).flat_map(|a| (1..=n as u64).map(move |b| (a, b))).filter(|_| rng.gen_bool(0.5)).collect();
        if !edges.is_empty() {
            return FiniteGraph::from_edges(n, edges);
        }
    }
}

fn words(g: &FiniteGraph, len: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = (0..g.len()).map(|v| vec![v]).collect();
    for _ in 1..len {
        out = out
            .into_iter()
            .flat_map(|w| g.successors(*w.last().unwrap()).iter().map(move |&s| [w.clone(), vec![s]].concat()))
            .collect();
    }
    out
}

fn relabel(g: &FiniteGraph, perm: &[usize]) -> FiniteGraph {
    let map = |s: Symbol| perm.get(s.index() as usize - 1).map_or(s.index(), |&p| p as u64 + 1);
    FiniteGraph::from_edges(g.len(), g.edges().map(|(a, b)| (map(a), map(b))).collect::<Vec<_>>())
}

fn random_chain(g: &FiniteGraph, rng: &mut ChaCha8Rng) -> Option<FiniteMarkov> {
    let comp = g.component_of(0);
    let sub = g.induced(&comp);
    if !sub.is_strongly_connected() || sub.edge_count() == 0 {
        return None;
    }
    let rows = (0..sub.len())
        .map(|v| {
            let w: Vec<f64> = sub.successors(v).iter().map(|_| rng.gen_range(0.05..1.0)).collect();
            let s: f64 = w.iter().sum();
            sub.successors(v).iter().copied().zip(w.into_iter().map(|x| x / s)).collect()
        })
        .collect();
    FiniteMarkov::from_transitions((1..=sub.len() as u64).map(Symbol::new).collect(), rows).ok()
}

fn exhaustive_cover(masses: &[f64], delta: f64) -> u64 {
    (1u32..1 << masses.len())
        .filter(|s| (0..masses.len()).filter(|i| s >> i & 1 == 1).map(|i| masses[i]).sum::<f64>() > 1.0 - delta)
        .map(|s| s.count_ones() as u64)
        .min()
        .unwrap_or(masses.len() as u64)
}

/// Randomized small instances for every structural identity, against brute force.
fn properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let n_max = 8;
    let mut failures: Vec<&str> = Vec::new();
    let mut chains = 0;
    let instances = 200;
    for _ in 0..instances {
        let f = random_graph(&mut rng);
        let g = CmsGraph::Finite(f.clone());
        let n = f.len();
        let all: Vec<Vec<Vec<usize>>> =
            (0..=n_max + 2).map(|len| if len == 0 { vec![] } else { words(&f, len) }).collect();

        let a = rng.gen_range(1..=n as u64);
        let z = loop_count(&g, Symbol::new(a), n_max).map_err(fail)?;
        let zs = first_return_count(&g, Symbol::new(a), n_max).map_err(fail)?;
        let at = |s: &cmshift::counting::CountSeries, k: usize| if k == 0 { 1 } else { s.get(k).to_u64().unwrap() };
        let zv: Vec<u64> = (0..=n_max).map(|k| at(&z, k)).collect();
        let zsv: Vec<u64> = (0..=n_max).map(|k| at(&zs, k)).collect();
        let ai = a as usize - 1;
        for k in 1..=n_max {
            let closed = all[k + 1].iter().filter(|w| w[0] == ai && w[k] == ai);
            let brute = closed.clone().count() as u64;
            let brute_first = closed.filter(|w| w[1..k].iter().all(|&v| v != ai)).count() as u64;
            if zv[k] != brute || zsv[k] != brute_first {
                failures.push("dp-vs-brute");
            }
            let conv: u64 = (1..=k).map(|j| zsv[j] * zv[k - j]).sum();
            if conv != zv[k] {
                failures.push("renewal-identity");
            }
            for m in 1..=n_max - k {
                if zv[k + m] < zv[k] * zv[m] {
                    failures.push("superadditivity");
                }
            }
        }

        let q = rng.gen_range(1..=n as u64);
        let series: Vec<Vec<u64>> = (1..=4)
            .map(|m| {
                let s = escape_count(&g, m, q, 6).unwrap();
                (0..=6).map(|k| s.get(k).to_u64().unwrap()).collect()
            })
            .collect();
        for (mi, s) in series.iter().enumerate() {
            for k in 0..=6 {
                let brute = all[k + 2]
                    .iter()
                    .filter(|w| {
                        w[0] < q as usize
                            && w[k + 1] < q as usize
                            && w.iter().filter(|&&v| v < q as usize).count() <= (k + 2) / (mi + 1)
                    })
                    .count() as u64;
                if s[k] != brute {
                    failures.push("escape-vs-brute");
                }
                if mi > 0 && s[k] > series[mi - 1][k] {
                    failures.push("monotone-in-M");
                }
            }
        }
        let (pa, pb) = (rng.gen_range(1..=q), rng.gen_range(1..=q));
        for m in 1..=3 {
            let lo = escape_count_ab(&g, m, q, Symbol::new(pa), Symbol::new(pb), 6).map_err(fail)?;
            let hi = escape_count_ab(&g, m, q + 1, Symbol::new(pa), Symbol::new(pb), 6);
            if let Ok(hi) = hi {
                if (0..=6).any(|k| hi.get(k) > lo.get(k)) {
                    failures.push("monotone-in-q");
                }
            }
        }

        let mut perm: Vec<usize> = (0..q as usize).collect();
        for i in (1..perm.len()).rev() {
            perm.swap(i, rng.gen_range(0..=i));
        }
        let h = CmsGraph::Finite(relabel(&f, &perm));
        for m in 1..=3 {
            if escape_count(&g, m, q, 7).map_err(fail)?.values != escape_count(&h, m, q, 7).map_err(fail)?.values {
                failures.push("relabel-invariance");
            }
        }

        if let Some(mc) = random_chain(&f, &mut rng) {
            chains += 1;
            let k = mc.states().len();
            for j in 0..k {
                let inflow: f64 = (0..k).map(|i| mc.pi()[i] * mc.transition(i, j)).sum();
                if (inflow - mc.pi()[j]).abs() > 1e-9 {
                    failures.push("stationarity");
                }
            }
            let sub = mc.support_graph();
            for w in words(&sub, 3) {
                let sym: Vec<Symbol> = w.iter().map(|&v| Symbol::new(v as u64 + 1)).collect();
                let whole = mc.cylinder_mass(&sym);
                let right: f64 =
                    (1..=k as u64).map(|b| mc.cylinder_mass(&[&sym[..], &[Symbol::new(b)]].concat())).sum();
                let left: f64 = (1..=k as u64).map(|b| mc.cylinder_mass(&[&[Symbol::new(b)], &sym[..]].concat())).sum();
                if (whole - right).abs() > 1e-12 || (whole - left).abs() > 1e-12 {
                    failures.push("consistency");
                }
            }
            let parry = parry_measure(&sub).map_err(fail)?;
            if mc.entropy() > parry.entropy() + 1e-12 {
                failures.push("parry-maximality");
            }
            let masses: Vec<f64> = words(&sub, 2)
                .iter()
                .map(|w| mc.cylinder_mass(&[Symbol::new(w[0] as u64 + 1), Symbol::new(w[1] as u64 + 1)]))
                .filter(|&p| p > 0.0)
                .collect();
            if masses.len() <= 16 {
                let delta = rng.gen_range(0.05..0.95);
                if greedy_cover(masses.clone(), delta) != exhaustive_cover(&masses, delta) {
                    failures.push("greedy-cover");
                }
            }
        }
    }
    failures.sort_unstable();
    failures.dedup();
    check(
        failures.is_empty(),
        if failures.is_empty() {
            format!("{instances} random graphs, {chains} random chains, all identities hold")
        } else {
            format!("violated: {}", failures.join(", "))
        },
    )
}

fn usc() -> Outcome {
    let g = FiniteGraph::from_edges(4, [(1, 1), (1, 2), (2, 3), (3, 1), (3, 4), (4, 1), (2, 4)]);
    let trials = usc_trials(&g, 10, 30, 7).map_err(fail)?;
    let excess = trials.iter().map(|t| t.excess).fold(f64::NEG_INFINITY, f64::max);
    let gap = trials.iter().map(|t| t.cylinder_gap).fold(0.0, f64::max);
    let mass = trials.iter().map(|t| (t.mass - 1.0).abs()).fold(0.0, f64::max);
    check(
        trials.len() == 10 && excess <= 0.02 && gap < 1e-3 && mass < 1e-6,
        format!("10 trials, max excess {excess:.2e}, max cylinder gap {gap:.2e}, mass defect {mass:.1e}"),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("gurevich entropy", entropy),
        ("entropy at infinity agreement", triple),
        ("recurrence classification", classification),
        ("strong positive recurrence", spr),
        ("escape-of-mass inequality", main_inequality),
        ("katok covering rates", katok),
        ("mass lower bound", mass_bound),
        ("dimension series", dimension),
        ("entropy density", density),
        ("property suites", properties),
        ("upper semicontinuity", usc),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let (tag, detail) = match f() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("[{tag}] {:>2} {name}: {detail} ({:.2}s)", i + 1, t.elapsed().as_secs_f64());
    }
    println!(
        "{} of {} criteria passed in {:.1}s",
        criteria.len() - failed,
        criteria.len(),
        start.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
