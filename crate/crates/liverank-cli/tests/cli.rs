//! Black-box tests of the binary: argument handling, output files,
//! and the config/data/runtime exit-code split.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn liverank_bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_liverank"))
}

fn run(args: &[&str]) -> Output {
    liverank_bin().args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write_cycle(dir: &Path) -> String {
    let path = dir.join("cycle.txt");
    fs::write(&path, "# 3 3\n0 1\n1 2\n2 0\n").unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn ingest_summarizes_and_caches() {
    let dir = tempfile::tempdir().unwrap();
    let edges = write_cycle(dir.path());
    let cache = dir.path().join("g.bin");

    let out = run(&[
        "ingest",
        "--graph",
        &edges,
        "--out",
        cache.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("nodes: 3"), "{text}");
    assert!(text.contains("edges: 3"), "{text}");
    assert!(text.contains("dangling: 0"), "{text}");
    assert!(cache.exists());

    // Reading the cache back gives the identical summary.
    let cache2 = dir.path().join("g2.bin");
    let again = run(&[
        "ingest",
        "--graph",
        cache.to_str().unwrap(),
        "--out",
        cache2.to_str().unwrap(),
    ]);
    assert!(again.status.success());
    let first = |s: &str| s.lines().take(5).map(String::from).collect::<Vec<_>>();
    assert_eq!(first(&text), first(&stdout(&again)));
}

#[test]
fn rank_on_a_cycle_breaks_ties_by_id() {
    let dir = tempfile::tempdir().unwrap();
    let edges = write_cycle(dir.path());
    let order_path = dir.path().join("order.txt");

    let out = run(&[
        "rank",
        "--graph",
        &edges,
        "--strategy",
        "pagerank",
        "--out",
        order_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let body = fs::read_to_string(&order_path).unwrap();
    let mut lines = body.lines();
    assert!(lines.next().unwrap().starts_with("# pagerank"));
    assert_eq!(lines.collect::<Vec<_>>(), ["0", "1", "2"]);
}

#[test]
fn dynamic_strategies_cannot_be_ranked_offline() {
    let dir = tempfile::tempdir().unwrap();
    let edges = write_cycle(dir.path());
    let out = run(&[
        "rank",
        "--graph",
        &edges,
        "--strategy",
        "bfs",
        "--out",
        dir.path().join("o.txt").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
    assert!(stderr(&out).contains("simulate"), "{}", stderr(&out));
}

#[test]
fn edge_count_mismatch_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.txt");
    fs::write(&path, "# 5 3\n0 1\n1 2\n").unwrap();
    let out = run(&[
        "ingest",
        "--graph",
        path.to_str().unwrap(),
        "--out",
        dir.path().join("g.bin").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
    assert!(stderr(&out).contains("shape mismatch"), "{}", stderr(&out));
}

#[test]
fn missing_labels_file_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let edges = write_cycle(dir.path());
    let out = run(&[
        "simulate",
        "--graph",
        &edges,
        "--labels",
        dir.path().join("nope.txt").to_str().unwrap(),
        "--strategy",
        "pagerank",
        "--out",
        dir.path().join("sim").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
}

#[test]
fn unknown_config_key_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("exp.toml");
    fs::write(
        &config,
        "version = 1\nfrobnicate = true\n\n[dataset.synthetic]\nn = 10\n",
    )
    .unwrap();
    let out = run(&["run", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
}

#[test]
fn missing_config_file_is_a_config_error() {
    let out = run(&["run", "/definitely/not/here.toml"]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
}

#[test]
fn stats_writes_the_liveness_cdf_csv() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    let out = run(&[
        "synth",
        "--n",
        "300",
        "--model",
        "site_block",
        "--site-count",
        "10",
        "--site-death-prob",
        "0.5",
        "--within-site-noise",
        "0.05",
        "--seed",
        "7",
        "--out",
        data.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(data.join("urls.txt").exists(), "site model emits urls");

    let csv = dir.path().join("cdf.csv");
    let out = run(&[
        "stats",
        "--graph",
        data.join("edges.txt").to_str().unwrap(),
        "--labels",
        data.join("labels.txt").to_str().unwrap(),
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let body = fs::read_to_string(&csv).unwrap();
    assert_eq!(body.lines().next().unwrap(), "metric,group,value,cum_frac");
    assert!(body.lines().any(|l| l.starts_with("pagerank,active,")));
    assert!(body.lines().any(|l| l.starts_with("indegree,inactive,")));
}

#[test]
fn worker_override_must_be_a_positive_integer() {
    let dir = tempfile::tempdir().unwrap();
    let edges = write_cycle(dir.path());
    for bad in ["0", "many"] {
        let out = liverank_bin()
            .args(["pagerank", "--graph", &edges, "--out"])
            .arg(dir.path().join("pr.txt"))
            .env("LIVERANK_WORKERS", bad)
            .output()
            .unwrap();
        assert_eq!(
            out.status.code(),
            Some(2),
            "workers={bad}: {}",
            stderr(&out)
        );
    }
}
