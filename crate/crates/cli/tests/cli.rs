use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

/// Runs the binary on a whitespace-separated command line.
fn run(line: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dagger"))
        .args(line.split_whitespace())
        .output()
        .unwrap()
}

fn ok(line: &str) -> String {
    let out = run(line);
    assert!(
        out.status.success(),
        "{line}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn example() -> String {
    let p = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/example.txt");
    p.to_str().unwrap().to_string()
}

#[test]
fn query_on_the_example() {
    let g = example();
    // R = 16, S = 17, M = 12
    assert_eq!(
        ok(&format!("query --graph {g} --k 1 --seed 1 --pair 16 17")),
        "true\n"
    );
    assert_eq!(
        ok(&format!("query --graph {g} --k 1 --seed 1 --pair 12 16")),
        "false\n"
    );
}

#[test]
fn query_after_a_workload() {
    let dir = tempfile::tempdir().unwrap();
    let w = dir.path().join("w.txt");
    // N -> B closes a cycle through the middle of the graph
    std::fs::write(&w, "IE 13 1\n").unwrap();
    let (g, w) = (example(), w.display());
    assert_eq!(
        ok(&format!("query --graph {g} --workload {w} --pair 12 0")),
        "false\n"
    );
    assert_eq!(
        ok(&format!("query --graph {g} --workload {w} --pair 18 0")),
        "true\n"
    );
}

#[test]
fn missing_file_exits_with_one() {
    let out = run("query --graph /nonexistent/g.txt --pair 0 1");
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("/nonexistent/g.txt"), "{err}");
}

#[test]
fn bad_input_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "0 1\n1 x\n").unwrap();
    let (g, bad) = (example(), bad.display());

    let out = run(&format!("build --graph {bad}"));
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    let out = run(&format!("query --graph {g} --pair 0 99"));
    assert_eq!(out.status.code(), Some(1));
    let out = run(&format!(
        "bench --graph {g} --workload {bad} --variant dg9x"
    ));
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(run("frobnicate").status.code(), Some(1));
    assert_eq!(run("--help").status.code(), Some(0));
}

#[test]
fn failing_workload_op_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let w = dir.path().join("w.txt");
    std::fs::write(&w, "IE 0 7\nDE 7 0\n").unwrap();
    let out = run(&format!(
        "bench --graph {} --workload {}",
        example(),
        w.display()
    ));
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("op 1"), "{err}");
}

#[test]
fn build_prints_a_summary() {
    let text = ok(&format!("build --graph {} --k 2", example()));
    for line in [
        "nodes 19",
        "edges 28",
        "dag_nodes 10",
        "components 3",
        "largest_component 5",
    ] {
        assert!(
            text.lines().any(|l| l == line),
            "{line} missing from {text}"
        );
    }
}

fn generate(dir: &Path) -> (PathBuf, PathBuf) {
    let g = dir.join("g.txt");
    let w = dir.join("w.txt");
    ok(&format!(
        "gen-graph --model ba --n 2000 --d 2 --reverse-prob 0.5 --seed 42 --out {}",
        g.display()
    ));
    ok(&format!(
        "gen-updates --graph {} --count 300 --ratios 60,15,20,5 --seed 42 --out {}",
        g.display(),
        w.display()
    ));
    (g, w)
}

fn bench(g: &Path, w: &Path, variant: &str, report: &str) -> String {
    ok(&format!(
        "bench --graph {} --workload {} --variant {variant} --qpu 2 --seed 42 --report {report}",
        g.display(),
        w.display()
    ))
}

fn without_timing(json: &str) -> Value {
    let mut v: Value = serde_json::from_str(json).unwrap();
    for f in dagger::bench::TIMING_FIELDS {
        v.as_object_mut().unwrap().remove(f);
    }
    v
}

#[test]
fn generation_is_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let (ga, wa) = generate(a.path());
    let (gb, wb) = generate(b.path());
    assert_eq!(std::fs::read(ga).unwrap(), std::fs::read(gb).unwrap());
    assert_eq!(std::fs::read(wa).unwrap(), std::fs::read(wb).unwrap());
}

#[test]
fn bench_reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (g, w) = generate(dir.path());
    let first = bench(&g, &w, "dg1", "json");
    let second = bench(&g, &w, "dg1", "json");
    let (a, b) = (without_timing(&first), without_timing(&second));
    assert_eq!(a.to_string(), b.to_string());
    assert_eq!(a["dataset"], "g");
    assert_eq!(a["variant"], "dg1");

    let ops = std::fs::read_to_string(&w).unwrap().lines().count() as u64;
    let kinds: u64 = ["q_count", "ei_count", "ed_count", "ni_count", "nd_count"]
        .iter()
        .map(|k| a[k].as_u64().unwrap())
        .sum();
    assert_eq!(kinds, a["executed_ops"].as_u64().unwrap());
    assert_eq!(a["q_count"].as_u64().unwrap(), 2 * ops);
}

#[test]
fn variants_give_the_same_answers() {
    let dir = tempfile::tempdir().unwrap();
    let (g, w) = generate(dir.path());
    let digests: Vec<Value> = ["dfs", "dg0", "dg1", "dg2"]
        .iter()
        .map(|v| without_timing(&bench(&g, &w, v, "json"))["answers_digest"].clone())
        .collect();
    assert!(digests.windows(2).all(|p| p[0] == p[1]), "{digests:?}");
}

#[test]
fn csv_report_has_header_and_row() {
    let dir = tempfile::tempdir().unwrap();
    let (g, w) = generate(dir.path());
    let csv = bench(&g, &w, "dfs", "csv");
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("dataset,variant,seed,qpu"));
    assert!(lines[1].starts_with("g,dfs,42,2,"));
}

#[test]
fn zero_qpu_dfs_runs_no_queries() {
    let dir = tempfile::tempdir().unwrap();
    let (g, w) = generate(dir.path());
    let out = ok(&format!(
        "bench --graph {} --workload {} --variant dfs --qpu 0",
        g.display(),
        w.display()
    ));
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["q_count"], 0);
    assert_eq!(v["q_mean_ms"], 0.0);
}
