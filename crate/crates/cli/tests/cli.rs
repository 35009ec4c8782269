use std::path::Path;
use std::process::{Command, Output};

fn graphonlab(args: &[&str]) -> Output {
    graphonlab_in(None, &[], args)
}

fn graphonlab_in(dir: Option<&Path>, env: &[(&str, &str)], args: &[&str]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_graphonlab"));
    cmd.args(args).env_remove("GRAPHONLAB_THREADS");
    if let Some(dir) = dir {
        cmd.current_dir(dir);
    }
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn xdist_of_constant_half() {
    let out = graphonlab(&["xdist", "--graphon", "constant:0.5", "-k", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "m,P\n0,0.125\n1,0.375\n2,0.375\n3,0.125\n");
}

#[test]
fn exact_density_prints_decimal_and_rational() {
    let out = graphonlab(&["density", "--graphon", "bipartite:0.6", "--graph", "C4", "--exact"]);
    assert_eq!(stdout(&out), "0.0162\n81/5000\n");
    let out = graphonlab(&["density", "--graphon", "bipartite:0.6", "--graph", "3;1-2,2-3"]);
    assert_eq!(stdout(&out), "0.09\n");
}

#[test]
fn randomized_commands_require_a_seed() {
    for args in [
        &["sample", "--graphon", "constant:0.5", "-k", "5"][..],
        &["empirical", "--graphon", "constant:0.5", "-k", "4", "-N", "10"][..],
        &["alpha-pipeline", "--graphon", "negated:0.5,0.8,0.3", "-n", "50", "-k", "3"][..],
    ] {
        assert_eq!(graphonlab(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(graphonlab(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(graphonlab(&["spectrum", "--graphon", "negated:0.5"]).status.code(), Some(2));
    assert_eq!(graphonlab(&["verify", "--suite", "bipartite:1.5"]).status.code(), Some(2));
    assert_eq!(graphonlab(&["counterexample", "--kind", "stars"]).status.code(), Some(2));
    let out = graphonlab_in(None, &[("GRAPHONLAB_THREADS", "none")], &["spectrum", "--graphon", "constant:1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_suite_passes_with_json_ledger() {
    let out = graphonlab(&["verify", "--suite", "bipartite:0.6"]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["passed"], true);
    assert_eq!(report["exact"], true);
    assert!(report["checks"].as_array().unwrap().len() > 5);
    let out = graphonlab(&["verify", "--suite", "negated:0.4,0.7,0.5", "--float"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn sample_is_seed_stable_edge_list() {
    let args = ["sample", "--graphon", "negated:0.5,0.8,0.3", "-k", "9", "--seed", "11"];
    let first = stdout(&graphonlab(&args));
    assert_eq!(first, stdout(&graphonlab(&args)));
    let mut lines = first.lines();
    assert_eq!(lines.next(), Some("9"));
    for line in lines {
        let labels: Vec<usize> = line.split(' ').map(|t| t.parse().unwrap()).collect();
        assert!(labels.len() == 2 && labels[0] < labels[1] && labels[1] <= 9);
    }
}

#[test]
fn thread_count_does_not_change_output() {
    let args = ["empirical", "--graphon", "bipartite:0.7", "-k", "5", "-N", "20000", "--seed", "3"];
    let one = stdout(&graphonlab_in(None, &[("GRAPHONLAB_THREADS", "1")], &args));
    let four = stdout(&graphonlab_in(None, &[("GRAPHONLAB_THREADS", "4")], &args));
    assert_eq!(one, four);
    assert!(one.starts_with("m,count,empirical,exact\n"));
}

#[test]
fn save_and_replay_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("w.json"), r#"{"parts":[0.25,0.75],"values":[[0,0.6],[0.6,0.3]]}"#).unwrap();
    let out = graphonlab_in(
        Some(dir.path()),
        &[],
        &["--save", "run", "empirical", "--graphon", "w.json", "-k", "4", "-N", "5000", "--seed", "9"],
    );
    assert_eq!(out.status.code(), Some(0));
    let saved = std::fs::read_to_string(dir.path().join("run/output.csv")).unwrap();
    assert_eq!(saved, stdout(&out));
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("run/manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 9);
    assert!(manifest["inputs"]["w.json"].is_string());

    // the graphon file is no longer needed
    std::fs::remove_file(dir.path().join("w.json")).unwrap();
    let replayed = graphonlab_in(Some(dir.path()), &[], &["replay", "run"]);
    assert_eq!(replayed.status.code(), Some(0));
    assert_eq!(stdout(&replayed), saved);

    std::fs::write(dir.path().join("run/output.csv"), saved.replace("0,", "1,")).unwrap();
    assert_eq!(graphonlab_in(Some(dir.path()), &[], &["replay", "run"]).status.code(), Some(1));
}

#[test]
fn out_path_picks_format_from_extension() {
    let dir = tempfile::tempdir().unwrap();
    let out = graphonlab_in(Some(dir.path()), &[], &["spectrum", "--graphon", "bipartite:0.3", "--out", "s.json"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("s.json")).unwrap()).unwrap();
    let ev = report["eigenvalues"].as_array().unwrap();
    assert!((ev[0].as_f64().unwrap() - 0.15).abs() < 1e-12);
    assert!((ev[1].as_f64().unwrap() + 0.15).abs() < 1e-12);
}

#[test]
fn cycle_counterexample_table() {
    let out = graphonlab(&["counterexample", "--kind", "cycles", "--out", "csv"]);
    let text = stdout(&out);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 8);
    assert!(rows.iter().all(|r| r.ends_with(",true")));
    let json: serde_json::Value =
        serde_json::from_str(&stdout(&graphonlab(&["counterexample", "--kind", "cycles"]))).unwrap();
    assert_eq!(json["clique_witness"]["graph"]["n"], 4);
}

#[test]
fn containers_from_files() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("c6.txt"), "6\n1 2\n2 3\n3 4\n4 5\n5 6\n6 1\n").unwrap();
    std::fs::write(dir.path().join("i.txt"), "1 3 5\n").unwrap();
    let out = graphonlab_in(
        Some(dir.path()),
        &[],
        &["containers", "--graph", "c6.txt", "--independent", "i.txt", "--delta", "1/2"],
    );
    assert_eq!(out.status.code(), Some(0));
    let rep: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(rep["contains_independent_set"], true);
    assert_eq!(rep["certificate_holds"], true);

    std::fs::write(dir.path().join("bad.txt"), "1 2\n").unwrap();
    let out = graphonlab_in(
        Some(dir.path()),
        &[],
        &["containers", "--graph", "c6.txt", "--independent", "bad.txt", "--delta", "1/2"],
    );
    assert_eq!(out.status.code(), Some(2));

    let out = graphonlab(&["containers", "--graph", "8;1-2,3-4,5-6,7-8", "--delta", "0.2", "-k", "4"]);
    let rep: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(rep["containment"]["failures"], 0);
    assert_eq!(rep["containment"]["sets_checked"], 81);
}

#[test]
fn witness_separates_bipartite_from_constant() {
    let out = graphonlab(&["witness", "--a", "bipartite:1", "--b", "constant:1/2", "--max-n", "4", "--exact"]);
    let rep: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(rep["witness"]["graph"]["n"], 3);
    assert_eq!(rep["witness"]["second_exact"], "1/8");
}
