use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn hitwalk(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hitwalk"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn ok(args: &[&str], dir: &Path) -> Value {
    let out = hitwalk(args, dir);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    json(&out)
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap_or_else(|| panic!("not a number: {v}"))
}

fn workdir() -> (TempDir, PathBuf) {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().to_path_buf();
    (dir, path)
}

#[test]
fn gen_writes_json_and_edge_lists() {
    let (_d, dir) = workdir();
    let summary = ok(&["gen", "cycle", "5", "-o", "c5.json"], &dir);
    assert_eq!(summary["format"], "json");
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(dir.join("c5.json")).unwrap()).unwrap();
    assert_eq!(doc["n"], 5);
    assert_eq!(doc["adj"][0], serde_json::json!([0, 1, 0, 0, 1]));

    ok(&["gen", "hypercube", "3", "-o", "q3.txt"], &dir);
    let text = std::fs::read_to_string(dir.join("q3.txt")).unwrap();
    // One `n` header line, then one line per edge.
    assert!(text.starts_with("n 8\n"));
    assert_eq!(text.lines().skip(1).filter(|l| !l.trim().is_empty()).count(), 12);

    let wheel = ok(&["gen", "cone", "--base", "c5.json", "-o", "wheel6.json"], &dir);
    assert_eq!(wheel["n"], 6);
    assert_eq!(wheel["edges"], 10);

    let stdout = ok(&["gen", "petersen"], &dir);
    assert_eq!(stdout["n"], 10);
}

#[test]
fn quotient_method_on_the_cube() {
    let (_d, dir) = workdir();
    ok(&["gen", "hypercube", "3", "-o", "q3.json"], &dir);
    let r = ok(&["hit", "q3.json", "--target", "0", "--method", "quotient"], &dir);
    assert_eq!(r["method"], "quotient");
    assert!(r["convention"].as_str().unwrap().contains("column-stochastic"));
    assert_eq!(r["partition"]["blocks"].as_array().unwrap().len(), 4);
    assert!((f(&r["times"][7]) - 10.0).abs() < 1e-8);
    assert!((f(&r["times"][1]) - 7.0).abs() < 1e-8);
    let full = ok(&["hit", "q3.json", "--target", "0"], &dir);
    for u in 0..8 {
        assert!((f(&full["times"][u]) - f(&r["times"][u])).abs() < 1e-8);
    }
}

#[test]
fn merw_on_the_wheel_apex() {
    let (_d, dir) = workdir();
    ok(&["gen", "cycle", "5", "-o", "c5.json"], &dir);
    ok(&["gen", "cone", "--base", "c5.json", "-o", "wheel6.json"], &dir);
    let r = ok(&["hit", "wheel6.json", "--target", "5", "--walk", "merw", "--method", "full"], &dir);
    let lambda = 1.0 + 6f64.sqrt();
    for u in 0..5 {
        assert!((f(&r["times"][u]) - lambda * lambda / 5.0).abs() < 1e-8);
    }
    let q = ok(&["hit", "wheel6.json", "--target", "5", "--walk", "merw", "--method", "quotient"], &dir);
    assert!((f(&q["times"][0]) - lambda * lambda / 5.0).abs() < 1e-8);
}

#[test]
fn monte_carlo_on_c5_is_reproducible() {
    let (_d, dir) = workdir();
    ok(&["gen", "cycle", "5", "-o", "c5.json"], &dir);
    let args = [
        "hit", "c5.json", "--target", "0", "--source", "1", "--method", "mc", "--samples", "100000", "--seed", "7",
    ];
    let r = ok(&args, &dir);
    let (mean, se) = (f(&r["time"]), f(&r["stderr"][1]));
    assert!((mean - 4.0).abs() <= 4.0 * se, "mean {mean} stderr {se}");
    assert_eq!(r["seed"], 7);
    assert_eq!(r["rng"], "chacha8");
    assert!(r["residual"].is_null());
    assert!(r["times"][2].is_null());
    let again = hitwalk(&args, &dir);
    assert_eq!(again.stdout, hitwalk(&args, &dir).stdout);
}

#[test]
fn run_record_digests_inputs() {
    let (_d, dir) = workdir();
    ok(&["gen", "cycle", "5", "-o", "c5.json"], &dir);
    let r = ok(&["hit", "c5.json", "--target", "0", "--record", "run.json"], &dir);
    let rec: Value = serde_json::from_str(&std::fs::read_to_string(dir.join("run.json")).unwrap()).unwrap();
    assert_eq!(rec["results"], r);
    assert_eq!(rec["inputs"][0]["path"], "c5.json");
    assert_eq!(rec["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
    assert!(rec["command_line"].as_array().unwrap().iter().any(|a| a == "--record"));
    assert!(rec["timings"]["elapsed_seconds"].as_f64().unwrap() >= 0.0);
}

#[test]
fn verify_family_suite() {
    let (_d, dir) = workdir();
    let r = ok(&["verify", "--suite", "families", "--checks", "dbrgHT"], &dir);
    let s = &r["summary"][0];
    assert_eq!(s["check"], "dbrgHT");
    assert_eq!(s["status"], "pass");
    assert!(f(&s["max_residual"]) < 1e-8);
    let all = ok(&["verify", "--suite", "families"], &dir);
    assert_eq!(all["summary"].as_array().unwrap().len(), 8);
}

#[test]
fn verify_gen_r_on_k4() {
    let (_d, dir) = workdir();
    ok(&["gen", "complete", "4", "-o", "k4.json"], &dir);
    let r = ok(&["verify", "k4.json", "--checks", "genR"], &dir);
    assert_eq!(r["results"][0]["status"], "pass");
    assert!((f(&r["results"][0]["value"]) - 3.0).abs() < 1e-12);
}

#[test]
fn verify_reports_a_corrupted_quotient() {
    let (_d, dir) = workdir();
    ok(&["gen", "hypercube", "3", "-o", "q3.json"], &dir);
    let mut doc: Value = serde_json::from_str(&std::fs::read_to_string(dir.join("q3.json")).unwrap()).unwrap();
    doc["partition"] = serde_json::json!({ "center": 0, "blocks": [[0], [1, 2, 4], [3, 5, 6], [7]] });
    // The correct matrix has 2 at (2, 1).
    doc["quotient"] = serde_json::json!([[0, 1, 0, 0], [3, 0, 2, 0], [0, 3, 0, 3], [0, 0, 1, 0]]);
    std::fs::write(dir.join("broken.json"), doc.to_string()).unwrap();
    let out = hitwalk(&["verify", "broken.json", "--checks", "stabHt"], &dir);
    assert_eq!(out.status.code(), Some(3));
    let r = json(&out);
    assert_eq!(r["results"][0]["status"], "fail");
    assert!(r["results"][0]["witness"].is_object());

    doc["quotient"] = serde_json::json!([[0, 1, 0, 0], [3, 0, 2, 0], [0, 2, 0, 3], [0, 0, 1, 0]]);
    std::fs::write(dir.join("fixed.json"), doc.to_string()).unwrap();
    ok(&["verify", "fixed.json", "--checks", "stabHt"], &dir);
}

#[test]
fn partition_examples() {
    let (_d, dir) = workdir();
    ok(&["gen", "hypercube", "3", "-o", "q3.json"], &dir);
    let r = ok(&["partition", "q3.json", "--center", "0"], &dir);
    assert_eq!(
        r["partition"]["blocks"],
        serde_json::json!([[0], [1, 2, 4], [3, 5, 6], [7]])
    );
    let m: Vec<Vec<f64>> = serde_json::from_value(r["quotient"]["matrix"].clone()).unwrap();
    assert_eq!(
        m,
        vec![
            vec![0.0, 1.0, 0.0, 0.0],
            vec![3.0, 0.0, 2.0, 0.0],
            vec![0.0, 2.0, 0.0, 3.0],
            vec![0.0, 0.0, 1.0, 0.0]
        ]
    );

    ok(&["gen", "star", "4", "-o", "star.json"], &dir);
    let hub = (0..5)
        .find(|&v| {
            let r = ok(&["partition", "star.json", "--center", &v.to_string()], &dir);
            r["partition"]["blocks"].as_array().unwrap().len() == 2
        })
        .expect("the hub gives two blocks");
    let leaf = (hub + 1) % 5;
    let r = ok(&["partition", "star.json", "--center", &leaf.to_string()], &dir);
    assert_eq!(r["partition"]["blocks"].as_array().unwrap().len(), 3);

    ok(&["gen", "cycle", "4", "-o", "c4.json"], &dir);
    ok(&["gen", "cone", "--base", "c4.json", "-o", "w.json"], &dir);
    let r = ok(&["partition", "w.json", "--center", "4", "--kind", "weight"], &dir);
    for s in r["column_sums"].as_array().unwrap() {
        assert!((f(s) - (1.0 + 5f64.sqrt())).abs() < 1e-9);
    }
    assert!((f(&r["block_hitting_times"][1]) - (3.0 + 5f64.sqrt()) / 2.0).abs() < 1e-9);
}

#[test]
fn scheme_examples() {
    let (_d, dir) = workdir();
    let r = ok(&["scheme", "--catalog", "trivial:6", "--relation", "1", "--start", "1"], &dir);
    assert!((f(&r["value"]) - 5.0).abs() < 1e-9);
    assert_eq!(f(&r["adjacent_closed_form"]), 5.0);
    let r = ok(&["scheme", "--catalog", "hamming:3", "--relation", "1", "--start", "3"], &dir);
    assert!((f(&r["value"]) - 10.0).abs() < 1e-8);
    // Relations 1 and 2 of Q3 together form the cocktail-party graph on 8
    // vertices; from the antipode the first step never hits, and from any
    // other vertex h = 1 + h_antipode/6 + 4h/6, which gives 7 and 8.
    let r = ok(&["scheme", "--catalog", "hamming:3", "--union", "1,2", "--start", "3"], &dir);
    assert!((f(&r["value"]) - 8.0).abs() < 1e-8);

    // Label-matrix input: the distance labels of C5.
    let labels: Vec<Vec<u8>> = (0..5)
        .map(|u: i32| (0..5).map(|v: i32| ((u - v).rem_euclid(5)).min((v - u).rem_euclid(5)) as u8).collect())
        .collect();
    std::fs::write(dir.join("c5s.json"), serde_json::json!({ "n": 5, "relations": labels }).to_string()).unwrap();
    let r = ok(&["scheme", "c5s.json", "--relation", "1", "--start", "1"], &dir);
    assert!((f(&r["value"]) - 4.0).abs() < 1e-9);
}

#[test]
fn invalid_scheme_exits_with_a_witness() {
    let (_d, dir) = workdir();
    // Distance labels of P4 do not close under multiplication.
    let labels = [[0, 1, 2, 3], [1, 0, 1, 2], [2, 1, 0, 1], [3, 2, 1, 0]];
    std::fs::write(dir.join("p4s.json"), serde_json::json!({ "n": 4, "relations": labels }).to_string()).unwrap();
    let out = hitwalk(&["scheme", "p4s.json", "--relation", "1", "--start", "1"], &dir);
    assert_eq!(out.status.code(), Some(3));
    let r = json(&out);
    assert_eq!(r["error"]["kind"], "check");
    assert!(r["error"]["details"]["axiom"].is_string());
}

#[test]
fn errors_use_distinct_exit_codes() {
    let (_d, dir) = workdir();
    let out = hitwalk(&["hit", "missing.json", "--target", "0"], &dir);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["error"]["kind"], "input");
    assert!(!out.stderr.is_empty());

    ok(&["gen", "cycle", "5", "-o", "c5.json"], &dir);
    let out = hitwalk(&["hit", "c5.json", "--target", "9"], &dir);
    assert_eq!(out.status.code(), Some(2));

    std::fs::write(dir.join("split.txt"), "0 1\n2 3\n").unwrap();
    let out = hitwalk(&["hit", "split.txt", "--target", "0"], &dir);
    assert_eq!(out.status.code(), Some(2));

    let out = hitwalk(&["gen", "cone", "-o", "x.json"], &dir);
    assert_eq!(out.status.code(), Some(2));

    let out = hitwalk(&["verify", "c5.json", "--checks", "nope"], &dir);
    assert_eq!(out.status.code(), Some(2));

    let out = hitwalk(&["scheme", "--catalog", "hamming:3", "--relation", "2", "--start", "1"], &dir);
    assert_eq!(out.status.code(), Some(2), "relation 2 of Q3 is disconnected");
}

#[test]
fn methods_agree_on_a_family() {
    let (_d, dir) = workdir();
    ok(&["gen", "petersen", "-o", "p.json"], &dir);
    for walk in ["simple", "merw"] {
        let full = ok(&["hit", "p.json", "--target", "0", "--walk", walk], &dir);
        let quot = ok(&["hit", "p.json", "--target", "0", "--walk", walk, "--method", "quotient"], &dir);
        let mc = ok(
            &["hit", "p.json", "--target", "0", "--walk", walk, "--method", "mc", "--source", "7", "--samples", "20000", "--seed", "1"],
            &dir,
        );
        assert!((f(&full["times"][7]) - 12.0).abs() < 1e-8);
        assert!((f(&quot["times"][7]) - 12.0).abs() < 1e-8);
        assert!((f(&mc["time"]) - 12.0).abs() <= 4.0 * f(&mc["stderr"][7]));
    }
}
