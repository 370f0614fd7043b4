use super::*;
use crate::shift::{load_graph_str, CmsGraph, FiniteGraph, LoopSystem, Symbol, Tail};

fn golden() -> CmsGraph {
    CmsGraph::Finite(FiniteGraph::from_edges(2, [(1, 1), (1, 2), (2, 1)]))
}

fn full2() -> CmsGraph {
    CmsGraph::Finite(FiniteGraph::from_edges(2, [(1, 1), (1, 2), (2, 1), (2, 2)]))
}

fn renewal() -> CmsGraph {
    CmsGraph::Loop(LoopSystem::renewal())
}

fn doubling() -> CmsGraph {
    CmsGraph::Loop(LoopSystem::geometric(2, 1.0, 2.0, 0.0))
}

fn damped() -> CmsGraph {
    load_graph_str(
        r#"{"kind":"loop_system","loops":[],"tail":{"from_length":1,"coeff":0.25,"growth":2.0,"power":-2.0}}"#,
    )
    .unwrap()
}

fn greedy() -> CmsGraph {
    CmsGraph::Loop(LoopSystem::new(vec![], Some(Tail::GreedyCritical { growth: 2 })))
}

const LN2: f64 = std::f64::consts::LN_2;

#[test]
fn entropy_of_basic_shifts() {
    let r = gurevich_entropy(&full2(), Symbol::new(1), 24).unwrap();
    assert!((r.estimate.value - LN2).abs() < 1e-3);
    assert!((r.exact.unwrap() - LN2).abs() < 1e-12);
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let r = gurevich_entropy(&golden(), Symbol::new(1), 30).unwrap();
    assert!((r.estimate.value - phi.ln()).abs() < 5e-3);
    assert_eq!(r.agrees, Some(true));
    let r = gurevich_entropy(&renewal(), Symbol::new(1), 64).unwrap();
    assert!((r.estimate.value - LN2).abs() < 1e-2);
    assert!((r.exact.unwrap() - LN2).abs() < 1e-11);
}

#[test]
fn truncation_trace_increases_towards_entropy() {
    let r = gurevich_entropy(&renewal(), Symbol::new(1), 32).unwrap();
    let vals: Vec<f64> = r.truncation_trace.iter().map(|t| t.log_radius).collect();
    assert!(vals.windows(2).all(|w| w[1] >= w[0] - 1e-12));
    assert_eq!(vals[0], 0.0);
    assert!(*vals.last().unwrap() <= LN2 + 1e-12);
    assert!(*vals.last().unwrap() > 0.6);
}

#[test]
fn entropy_of_doubling_from_two() {
    let r = gurevich_entropy(&doubling(), Symbol::new(1), 128).unwrap();
    let exact = (1.0 + 5f64.sqrt()).ln();
    assert!((r.exact.unwrap() - exact).abs() < 1e-11);
    assert!((r.estimate.value - exact).abs() < 1e-2);
}

#[test]
fn first_return_growth() {
    let r = big_delta_inf(&renewal(), Symbol::new(1), 40).unwrap();
    assert_eq!(r.estimate.value, 0.0);
    assert_eq!(r.exact, Some(0.0));
    let r = big_delta_inf(&doubling(), Symbol::new(1), 40).unwrap();
    assert!((r.estimate.value - LN2).abs() < 1e-12);
    assert!((r.value() - LN2).abs() < 1e-15);
    let r = big_delta_inf(&golden(), Symbol::new(1), 20).unwrap();
    assert_eq!(r.value(), f64::NEG_INFINITY);
    assert!(r.estimate.is_neg_infinite());
    let (_, min) = big_delta_inf_min(&renewal(), &[Symbol::new(1), Symbol::new(2)], 40).unwrap();
    assert_eq!(min, 0.0);
}

#[test]
fn compact_grid_has_no_escape() {
    let spec = GridSpec { ms: vec![2, 4], qs: vec![2, 3], n_max: 40 };
    let r = delta_inf(&full2(), &spec).unwrap();
    assert!(r.cells.iter().all(|c| c.status == CellStatus::NoEscape && c.value == f64::NEG_INFINITY));
    assert_eq!(r.headline, Some(f64::NEG_INFINITY));
}

#[test]
fn grid_is_monotone_and_bounded_by_entropy() {
    let spec = GridSpec { ms: vec![4, 8], qs: vec![1, 2, 4], n_max: 96 };
    let r = delta_inf(&renewal(), &spec).unwrap();
    assert!(r.monotone_in_m);
    for c in &r.cells {
        assert_eq!(c.status, CellStatus::Estimated);
        assert!(c.value <= LN2 + 0.02);
    }
    let mut csv = Vec::new();
    r.write_csv(&mut csv).unwrap();
    let text = String::from_utf8(csv).unwrap();
    assert!(text.starts_with("M,q=1,q=2,q=4\n4,"));
}

#[test]
fn recurrence_classes() {
    let v = classify(&renewal(), Symbol::new(1)).unwrap();
    assert_eq!(v.class, RecurrenceClass::PositiveRecurrent);
    assert!(v.exact);
    assert_eq!(classify(&damped(), Symbol::new(1)).unwrap().class, RecurrenceClass::Transient);
    assert_eq!(classify(&greedy(), Symbol::new(1)).unwrap().class, RecurrenceClass::NullRecurrent);
    assert_eq!(classify(&golden(), Symbol::new(2)).unwrap().class, RecurrenceClass::PositiveRecurrent);
}

#[test]
fn classification_ignores_loop_order() {
    let a = CmsGraph::Loop(LoopSystem::new(vec![(2, 1), (3, 2), (5, 1)], None));
    let b = CmsGraph::Loop(LoopSystem::new(vec![(5, 1), (3, 1), (2, 1), (3, 1)], None));
    let (va, vb) = (classify(&a, Symbol::new(1)).unwrap(), classify(&b, Symbol::new(1)).unwrap());
    assert_eq!(va.class, vb.class);
    assert!((va.evidence.unwrap().x_c - vb.evidence.unwrap().x_c).abs() < 1e-12);
}

#[test]
fn spr_verdicts() {
    let no_grid = SprOptions { grid: None, ..Default::default() };
    let r = is_spr(&renewal(), &no_grid).unwrap();
    assert_eq!(r.verdict, SprVerdict::Spr);
    assert!(r.margin >= 0.5);
    let r = is_spr(&damped(), &no_grid).unwrap();
    assert_eq!(r.verdict, SprVerdict::NotSpr);
    assert!((r.h_top - LN2).abs() < 1e-9);
    assert!((r.exact_delta_inf.unwrap() - LN2).abs() < 1e-12);
    let r = is_spr(&golden(), &no_grid).unwrap();
    assert_eq!(r.verdict, SprVerdict::Spr);
    assert_eq!(r.margin, f64::INFINITY);
}
