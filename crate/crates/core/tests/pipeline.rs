use cmshift::infinity::{family_sequence, verify_main_inequality, Family};
use cmshift::katok::covering_number;
use cmshift::measures::{read_sequence, write_sequence, CylinderMeasure, MarkovMeasure};
use cmshift::shift::{load_graph_str, GraphSpec};
use cmshift::thermo::{classify, gurevich_entropy, is_spr, RecurrenceClass, SprOptions, SprVerdict};
use cmshift::{density, Symbol};

const LN2: f64 = std::f64::consts::LN_2;

const RENEWAL: &str = r#"{"kind":"loop_system","loops":[],"tail":{"from_length":1,"coeff":1.0,"growth":1.0}}"#;

#[test]
fn renewal_from_json_through_every_stage() {
    let g = load_graph_str(RENEWAL).unwrap();
    let h = gurevich_entropy(&g, Symbol::new(1), 48).unwrap();
    assert!((h.value() - LN2).abs() < 1e-9);
    assert_eq!(classify(&g, Symbol::new(1)).unwrap().class, RecurrenceClass::PositiveRecurrent);
    let spr = is_spr(&g, &SprOptions { grid: None, ..Default::default() }).unwrap();
    assert_eq!(spr.verdict, SprVerdict::Spr);

    let seq = family_sequence(&g, Family::HalfMmeHalfDrift, 14).unwrap();
    let dir = tempdir("pipeline");
    write_sequence(&dir, &seq).unwrap();
    let back = read_sequence(&dir).unwrap();
    std::fs::remove_dir_all(&dir).unwrap();
    assert_eq!(back, seq);

    let r = verify_main_inequality(&g, &back, 0.0).unwrap();
    assert!(r.pass);
    assert!((r.limit.unwrap().mass - 0.5).abs() < 1e-9);
}

#[test]
fn demo_graph_round_trips_and_carries_its_measure() {
    let opts = density::DensityOptions { n: 16, ..Default::default() };
    let (system, report) = density::density_demo(&opts).unwrap();
    let (spec, labels) = density::emit_graph(&system);
    let g = load_graph_str(&spec.to_json()).unwrap();
    assert_eq!(GraphSpec::describe(&g), spec);
    assert_eq!(labels.len(), report.vertices);
    let h = gurevich_entropy(&g, Symbol::new(1), 8).unwrap();
    assert!(h.value() >= system.entropy() - 1e-9);
}

#[test]
fn covering_numbers_of_loaded_measures() {
    let doc = r#"{"kind":"finite","states":[1,2],"pi":[0.5,0.5],"rows":[[[1,0.5],[2,0.5]],[[1,0.5],[2,0.5]]],"entropy":0.6931471805599453}"#;
    let m: MarkovMeasure = serde_json::from_str(doc).unwrap();
    assert!((m.entropy() - LN2).abs() < 1e-12);
    assert_eq!(covering_number(&m, 4, 0.25).unwrap(), 13);
}

fn tempdir(tag: &str) -> std::path::PathBuf {
    std::env::temp_dir().join(format!("cmshift-{tag}-{}", std::process::id()))
}
