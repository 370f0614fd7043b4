use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use sha2::{Digest, Sha256};

const LN2: f64 = std::f64::consts::LN_2;

fn graph(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../graphs").join(name)
}

fn cmshift(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cmshift")).args(args).output().expect("spawn cmshift")
}

fn report(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["schema_version"], 1);
    doc["report"].clone()
}

fn schema() -> Value {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schema/v1.json");
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn entropy_of_full_shift() {
    let g = graph("full2.json");
    let r = report(&cmshift(&["entropy", "--graph", g.to_str().unwrap(), "--vertex", "1", "--n-max", "24"]));
    let h = r["estimate"]["value"].as_f64().unwrap();
    assert!((h - LN2).abs() < 1e-3, "{h}");
}

#[test]
fn renewal_is_spr() {
    let g = graph("renewal.json");
    let r = report(&cmshift(&["spr", "--graph", g.to_str().unwrap()]));
    assert_eq!(r["verdict"], "Spr");
    assert!((r["h_top"].as_f64().unwrap() - LN2).abs() < 1e-6);
    assert!(r["exact_delta_inf"].as_f64().unwrap().abs() < 1e-9);
}

#[test]
fn half_family_is_sharp_on_renewal() {
    let g = graph("renewal.json");
    let r = report(&cmshift(&[
        "verify-main",
        "--graph",
        g.to_str().unwrap(),
        "--family",
        "half-mme-half-drift",
        "--steps",
        "20",
    ]));
    assert_eq!(r["pass"], true);
    assert!(r["slack"].as_f64().unwrap().abs() <= 0.05);
}

#[test]
fn malformed_graph_exits_two_with_path() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"kind":"finite","symbols":2,"edges":[[1,3]]}"#).unwrap();
    let out = cmshift(&["entropy", "--graph", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    let doc: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(doc["error"]["code"], "VALIDATION");
    assert_eq!(doc["error"]["path"], "edges[0][1]");

    std::fs::write(&bad, r#"{"kind":"finite","symbols":"two","edges":[]}"#).unwrap();
    let out = cmshift(&["classify", "--graph", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let doc: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(doc["error"]["code"], "SCHEMA");
    assert_eq!(doc["error"]["path"], "symbols");
}

#[test]
fn missing_file_is_an_io_error() {
    let out = cmshift(&["classify", "--graph", "/nonexistent/graph.json"]);
    assert_eq!(out.status.code(), Some(1));
    let doc: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(doc["error"]["code"], "IO");
}

#[test]
fn strict_passes_settled_verdicts() {
    let g = graph("renewal.json");
    let out = cmshift(&["classify", "--graph", g.to_str().unwrap(), "--strict"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["class"], "PositiveRecurrent");
    let out = cmshift(&["dim-series", "--graph", g.to_str().unwrap(), "--strict"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn density_rejects_ragged_blocks() {
    let out = cmshift(&["density-demo", "--n", "12"]);
    assert_eq!(out.status.code(), Some(2));
    let doc: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(doc["error"]["path"], "density");
}

#[test]
fn reports_match_schema() {
    let schema = schema();
    let dir = tempfile::tempdir().unwrap();
    let renewal = graph("renewal.json");
    let full2 = graph("full2.json");
    let cases: Vec<(&str, Vec<&str>)> = vec![
        ("entropy", vec!["--graph", full2.to_str().unwrap(), "--n-max", "12"]),
        ("delta-inf", vec!["--graph", renewal.to_str().unwrap(), "--n-max", "96", "--M", "8,16", "--q", "1,2"]),
        ("classify", vec!["--graph", renewal.to_str().unwrap()]),
        ("spr", vec!["--graph", renewal.to_str().unwrap(), "--n-max", "96"]),
        ("b-inf", vec!["--graph", renewal.to_str().unwrap()]),
        ("h-inf", vec!["--graph", renewal.to_str().unwrap()]),
        ("katok", vec!["--graph", full2.to_str().unwrap(), "--n-min", "4", "--n-max", "8"]),
        ("verify-main", vec!["--graph", renewal.to_str().unwrap(), "--steps", "12"]),
        ("mass-bound", vec!["--graph", renewal.to_str().unwrap(), "--steps", "12"]),
        ("dim-series", vec!["--graph", renewal.to_str().unwrap(), "--n-max", "40"]),
        ("density-demo", vec!["--n", "16"]),
    ];
    for (cmd, extra) in cases {
        let out_dir = dir.path().join(cmd);
        let mut args = vec![cmd];
        args.extend(extra);
        args.extend(["--out", out_dir.to_str().unwrap()]);
        let out = cmshift(&args);
        let doc: Value = serde_json::from_slice(&out.stdout).unwrap_or_else(|_| panic!("{cmd}: {out:?}"));
        let mut keys: Vec<&String> = doc.as_object().unwrap().keys().collect();
        keys.sort();
        assert_eq!(keys, ["command", "report", "schema_version"]);
        assert_eq!(doc["command"], cmd);

        let entry = &schema["commands"][cmd];
        let mut expected: Vec<&str> = entry["report"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
        expected.sort_unstable();
        let mut got: Vec<&str> = doc["report"].as_object().unwrap().keys().map(String::as_str).collect();
        got.sort_unstable();
        assert_eq!(got, expected, "{cmd}");

        let on_disk: Value = serde_json::from_slice(&std::fs::read(out_dir.join("report.json")).unwrap()).unwrap();
        assert_eq!(on_disk, doc, "{cmd}");
        for (name, columns) in entry["tables"].as_object().unwrap() {
            let Some(cols) = columns.as_array() else { continue };
            let files: Vec<PathBuf> = std::fs::read_dir(&out_dir)
                .unwrap()
                .map(|e| e.unwrap().path())
                .filter(|p| matches_pattern(name, p.file_name().unwrap().to_str().unwrap()))
                .collect();
            assert!(!files.is_empty(), "{cmd}: no {name}");
            for f in files {
                let text = std::fs::read_to_string(&f).unwrap();
                let header: Vec<&str> = text.lines().next().unwrap().split(',').collect();
                check_header(&header, cols, cmd);
            }
        }
    }
}

fn matches_pattern(pattern: &str, file: &str) -> bool {
    match pattern.split_once("<") {
        None => pattern == file,
        Some((pre, rest)) => {
            let post = rest.split_once('>').unwrap().1;
            file.starts_with(pre) && file.ends_with(post)
        }
    }
}

fn check_header(header: &[&str], cols: &[Value], cmd: &str) {
    let mut i = 0;
    for c in cols {
        let c = c.as_str().unwrap();
        if let Some(prefix) = c.strip_suffix("<q>...") {
            assert!(header[i..].iter().all(|h| h.starts_with(prefix)), "{cmd}: {header:?}");
            assert!(i < header.len(), "{cmd}: {header:?}");
            return;
        }
        assert_eq!(header.get(i), Some(&c), "{cmd}: {header:?}");
        i += 1;
    }
    assert_eq!(i, header.len(), "{cmd}: {header:?}");
}

fn tree_digest(dir: &Path) -> Vec<(String, String)> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let bytes = std::fs::read(&p).unwrap();
                let rel = p.strip_prefix(dir).unwrap().to_string_lossy().into_owned();
                out.push((rel, format!("{:x}", Sha256::digest(&bytes))));
            }
        }
    }
    out.sort();
    out
}

#[test]
fn manifest_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::copy(graph("renewal.json"), dir.path().join("renewal.json")).unwrap();
    std::fs::copy(graph("full2.json"), dir.path().join("full2.json")).unwrap();
    let manifest = dir.path().join("manifest.json");
    std::fs::write(
        &manifest,
        r#"{
  "seed": 7,
  "entries": [
    {"name": "h", "command": "entropy", "args": {"graph": "full2.json", "n-max": 16}},
    {"name": "grid", "command": "delta-inf", "args": {"graph": "renewal.json", "M": [8, 16], "q": [1, 2], "n-max": 96}},
    {"name": "katok", "command": "katok", "args": {"graph": "full2.json", "delta": [0.1, 0.4], "n-min": 4, "n-max": 8}},
    {"name": "demo", "command": "density-demo", "args": {"n": 16}},
    {"name": "broken", "command": "classify", "args": {"graph": "missing.json"}}
  ]
}"#,
    )
    .unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let ra = cmshift(&["run", manifest.to_str().unwrap(), "--jobs", "4", "--out", a.to_str().unwrap()]);
    let rb = cmshift(&["run", manifest.to_str().unwrap(), "--jobs", "1", "--out", b.to_str().unwrap()]);
    assert_eq!(ra.status.code(), Some(1));
    assert_eq!(rb.status.code(), Some(1));
    assert_eq!(tree_digest(&a), tree_digest(&b));

    let results: Value = serde_json::from_slice(&std::fs::read(a.join("manifest_results.json")).unwrap()).unwrap();
    let exits: Vec<(String, u64)> = results["entries"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| (e["name"].as_str().unwrap().to_string(), e["exit"].as_u64().unwrap()))
        .collect();
    assert_eq!(
        exits,
        [("h".into(), 0), ("grid".into(), 0), ("katok".into(), 0), ("demo".into(), 0), ("broken".into(), 1)]
    );
    assert!(a.join("broken/error.json").exists());
    assert!(a.join("demo/sft.json").exists());
    let demo: Value = serde_json::from_slice(&std::fs::read(a.join("demo/report.json")).unwrap()).unwrap();
    assert_eq!(demo["report"]["options"]["seed"], 7);
}

#[test]
fn manifest_rejects_unknown_fields() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("m.json");
    std::fs::write(&manifest, r#"{"entries":[{"name":"x","command":"entropy","argz":{}}]}"#).unwrap();
    let out = cmshift(&["run", manifest.to_str().unwrap(), "--out", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let doc: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(doc["error"]["code"], "SCHEMA");
    assert_eq!(doc["error"]["path"], "entries[0].argz");
}
