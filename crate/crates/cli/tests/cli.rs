use std::fs;
use std::path::PathBuf;

use serde_json::Value;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("momentkit").chain(args.iter().copied());
    let code = momentkit_cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(args: &[&str]) -> Value {
    let (code, out, err) = run(args);
    assert_eq!(code, 0, "{err}");
    serde_json::from_str(&out).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("momentkit-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn graph_dot() {
    let (code, out, _) = run(&["graph", "--type", "A2", "--fmt", "dot"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("digraph"));
    assert_eq!(out.matches("[label=\"").count() - out.matches("->").count(), 6);
    assert_eq!(out.matches("->").count(), 9);
    let (_, default, _) = run(&["graph", "--type", "A2"]);
    assert_eq!(default, out);
}

#[test]
fn graph_json_is_a_loadable_graph() {
    let (code, out, _) = run(&["graph", "--type", "A3", "--J", "1,3", "--fmt", "json"]);
    assert_eq!(code, 0);
    let g = momentkit::graph::MomentGraph::from_json(&out).unwrap();
    assert_eq!(g.num_vertices(), 6);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["schema_version"], 1);
}

#[test]
fn bmp_json() {
    let v = json(&["bmp", "--type", "A3", "--w", "2132", "--field", "Q", "--fmt", "json"]);
    assert_eq!(v["schema_version"], 1);
    let rows = v["rows"].as_array().unwrap();
    let at = |y: &str| rows.iter().find(|r| r["y"] == y).unwrap();
    assert_eq!(at("2")["rank"], "1+q");
    assert_eq!(at("")["rank"], "1+q");
    assert_eq!(at("2132")["rank"], "1");
    assert_eq!(at("2")["coeffs"], serde_json::json!([1, 1]));
    assert!(rows.iter().all(|r| r.get("wall_ms").is_none()));
    let timed = json(&["bmp", "--type", "A2", "--fmt", "json", "--timings"]);
    assert!(timed["rows"].as_array().unwrap().iter().all(|r| r["wall_ms"].is_u64()));
}

#[test]
fn bmp_text_and_csv() {
    let (code, text, _) = run(&["bmp", "--type", "A3", "--w", "2132"]);
    assert_eq!(code, 0);
    assert!(text.contains("1+q"));
    let (code, csv, _) = run(&["bmp", "--type", "A3", "--w", "2132", "--fmt", "csv"]);
    assert_eq!(code, 0);
    let mut reader = csv::Reader::from_reader(csv.as_bytes());
    let headers = reader.headers().unwrap().clone();
    let rank_col = headers.iter().position(|h| h == "rank").unwrap();
    let y_col = headers.iter().position(|h| h == "y").unwrap();
    let rows: Vec<_> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 14);
    assert!(rows.iter().any(|r| &r[y_col] == "2" && &r[rank_col] == "1+q"));
}

#[test]
fn bmp_writes_sheaf_file() {
    let path = scratch("sheaf.json");
    let p = path.to_str().unwrap();
    let (code, _, err) = run(&["bmp", "--type", "A2", "--field", "F5", "--sheaf", p]);
    assert_eq!(code, 0, "{err}");
    let text = fs::read_to_string(&path).unwrap();
    let f5 = momentkit::PrimeField::new(5).unwrap();
    let sheaf = momentkit::sheaf::SheafData::from_json(&text, &f5).unwrap();
    assert_eq!(sheaf.graph().num_vertices(), 6);
}

#[test]
fn kl_outputs() {
    let v = json(&["kl", "--type", "A3", "--w", "2132", "--fmt", "json"]);
    let rows = v["rows"].as_array().unwrap();
    assert!(rows.iter().any(|r| r["y"] == "" && r["P"] == "1+q"));
    let v = json(&["kl", "--type", "A3", "--J", "2", "--fmt", "json"]);
    assert!(!v["rows"].as_array().unwrap().is_empty());
    let (code, _, _) = run(&["kl", "--type", "A3", "--J", "2", "--w", "2"]);
    assert_eq!(code, 2);
}

#[test]
fn verify_all_over_f3() {
    let (code, out, _) = run(&["verify", "--suite", "all", "--type", "A2", "--field", "F3"]);
    assert_eq!(code, 0);
    assert_eq!(out.matches("PASS").count(), 10);
    assert!(!out.contains("FAIL"));
    let v = json(&["verify", "--suite", "kl-identities,thm62", "--type", "B2", "--fmt", "json"]);
    assert_eq!(v["schema_version"], 1);
}

#[test]
fn gkm_and_pullback() {
    let (code, out, _) = run(&["gkm", "--type", "G2", "--field", "F3"]);
    assert_eq!(code, 0);
    assert!(out.contains("GKM pair: no"));
    let v = json(&["gkm", "--type", "A3", "--field", "F3", "--fmt", "json"]);
    assert_eq!(v["schema_version"], 1);
    let (code, out, _) = run(&["pullback", "--type", "A2"]);
    assert_eq!(code, 0);
    assert!(out.contains("PASS pullback"));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["bmp", "--type", "Z9"][..],
        &["bmp", "--type", "A2", "--field", "F4"],
        &["bmp", "--type", "A2", "--w", "13"],
        &["graph", "--type", "A2", "--J", "3"],
        &["graph", "--type", "A2", "--fmt", "csv"],
        &["verify", "--type", "A2", "--suite", "nonsense"],
        &["frobnicate"],
        &[],
    ] {
        let (code, _, err) = run(args);
        assert_eq!(code, 2, "{args:?}");
        assert!(!err.is_empty(), "{args:?}");
    }
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("verify"));
}

#[test]
fn config_file_with_flag_override() {
    let path = scratch("run.conf");
    fs::write(&path, "# A3 run\ntype = A3\nw = 2132\nfield = F5\nfmt = json\n").unwrap();
    let p = path.to_str().unwrap();
    let v = json(&["bmp", "--config", p]);
    assert_eq!(v["field"], "F5");
    assert_eq!(v["rows"].as_array().unwrap().len(), 14);
    let v = json(&["bmp", "--config", p, "--field", "Q", "--w", "213"]);
    assert_eq!(v["field"], "Q");
    assert!(v["rows"].as_array().unwrap().iter().all(|r| r["w"] == "213"));
    fs::write(&path, "type = A3\ncolour = blue\n").unwrap();
    assert_eq!(run(&["bmp", "--config", p]).0, 2);
}

#[test]
fn output_is_deterministic() {
    for args in [
        &["bmp", "--type", "A3", "--fmt", "json"][..],
        &["graph", "--type", "B2", "--fmt", "json"],
        &["verify", "--type", "A2", "--suite", "all", "--fmt", "json"],
    ] {
        assert_eq!(run(args).1, run(args).1, "{args:?}");
    }
}

#[test]
fn out_flag_writes_file() {
    let path = scratch("graph.dot");
    let p = path.to_str().unwrap();
    let (code, out, _) = run(&["graph", "--type", "A2", "--out", p]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    assert!(fs::read_to_string(&path).unwrap().starts_with("digraph"));
}
