use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn forcepath(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_forcepath"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

fn error_category(out: &Output) -> String {
    assert!(!out.status.success());
    let v: Value = serde_json::from_slice(&out.stderr).expect("json on stderr");
    v["error"]["category"].as_str().unwrap().to_string()
}

fn write_clique(dir: &Path, n: usize) -> String {
    let path = dir.join("clique.txt");
    let mut text = String::new();
    for u in 0..n {
        for v in u + 1..n {
            let w = if (u, v) == (0, n - 1) { n } else { 1 };
            text.push_str(&format!("n{u} n{v} {w}\n"));
        }
    }
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn generate_writes_loadable_lattice() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("lat.txt");
    let out = forcepath(&[
        "generate",
        "--family",
        "lattice",
        "--rows",
        "3",
        "--cols",
        "4",
        "--weights",
        "uniform",
        "--weight-seed",
        "5",
        "-o",
        file.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = fs::read_to_string(&file).unwrap();
    let edges = text.lines().filter(|l| !l.starts_with('#')).count();
    assert_eq!(edges, 17);
    let again = forcepath(&[
        "generate",
        "--family",
        "lattice",
        "--rows",
        "3",
        "--cols",
        "4",
        "--weights",
        "uniform",
        "--weight-seed",
        "5",
    ]);
    assert_eq!(String::from_utf8(again.stdout).unwrap(), text);
}

#[test]
fn attack_clique_with_labels() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write_clique(dir.path(), 6);
    for method in [
        "pathattack-lp",
        "pathattack-greedy",
        "greedy-cost",
        "greedy-eigenscore",
    ] {
        let v = stdout_json(&forcepath(&[
            "attack", "--graph", &graph, "--path", "n0,n5", "--method", method,
        ]));
        assert_eq!(v["plan"]["total_cost"], 4.0, "{method}");
        assert_eq!(v["removed_edge_labels"].as_array().unwrap().len(), 4);
        assert_eq!(v["protected_path_labels"], serde_json::json!(["n0", "n5"]));
    }
}

#[test]
fn attack_by_rank_with_budget_and_lp_dump() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write_clique(dir.path(), 5);
    let lp = dir.path().join("final.lp");
    let v = stdout_json(&forcepath(&[
        "attack",
        "--graph",
        &graph,
        "--source",
        "n0",
        "--target",
        "n4",
        "--rank",
        "1",
        "--budget",
        "1",
        "--lp-out",
        lp.to_str().unwrap(),
    ]));
    // the two tied two-hop routes must both go
    assert_eq!(v["plan"]["total_cost"], 2.0);
    assert_eq!(v["plan"]["within_budget"], false);
    let text = fs::read_to_string(&lp).unwrap();
    assert!(text.contains("Minimize") && text.contains("Subject To"));
}

#[test]
fn brute_force_matches_attack() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write_clique(dir.path(), 5);
    let v = stdout_json(&forcepath(&[
        "brute-force",
        "--graph",
        &graph,
        "--path",
        "n0,n4",
    ]));
    assert_eq!(v["plan"]["total_cost"], 3.0);
    let out = forcepath(&[
        "brute-force",
        "--graph",
        &graph,
        "--path",
        "n0,n4",
        "--limit",
        "3",
    ]);
    assert_eq!(error_category(&out), "input");
}

#[test]
fn reduce_check_agrees() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("tri.txt");
    fs::write(&graph, "a b 1\nb c 1\na c 1\n").unwrap();
    let g = graph.to_str().unwrap();
    for (budget, expected) in [("3", true), ("2", false)] {
        let v = stdout_json(&forcepath(&[
            "reduce-check",
            "--graph",
            g,
            "--terminals",
            "a,b,c",
            "--budget",
            budget,
        ]));
        assert_eq!(v["three_terminal_cut"], expected);
        assert_eq!(v["agree"], true);
    }
}

#[test]
fn experiment_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("exp.toml");
    let out_dir = dir.path().join("out");
    fs::write(
        &config,
        format!(
            "ranks = [1, 3]\nrepetitions = 2\nmaster_seed = 4\noutput_dir = {:?}\n\n\
             [generator]\nfamily = \"ba\"\nn = 40\nm = 2\n\n[weights]\nkind = \"poisson\"\n",
            out_dir.to_str().unwrap()
        ),
    )
    .unwrap();
    let out = forcepath(&[
        "experiment",
        "--config",
        config.to_str().unwrap(),
        "--serial",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(String::from_utf8(out.stdout)
        .unwrap()
        .contains("pathattack-lp"));
    let records = fs::read_to_string(out_dir.join("records.jsonl")).unwrap();
    assert_eq!(records.lines().count(), 2 * 2 * 4);
    for name in ["timings.jsonl", "summary.json", "summary.txt"] {
        assert!(out_dir.join(name).exists(), "{name}");
    }
}

#[test]
fn experiment_from_flags_only() {
    let out = forcepath(&[
        "experiment",
        "--family",
        "er",
        "--nodes",
        "30",
        "--prob",
        "0.2",
        "--ranks",
        "2",
        "--repetitions",
        "1",
        "--methods",
        "greedy-cost,pathattack-greedy",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn errors_are_categorised() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.txt");
    let out = forcepath(&[
        "attack",
        "--graph",
        missing.to_str().unwrap(),
        "--path",
        "a,b",
    ]);
    assert_eq!(error_category(&out), "io");

    let bad = dir.path().join("bad.txt");
    fs::write(&bad, "a b notanumber\n").unwrap();
    let out = forcepath(&["attack", "--graph", bad.to_str().unwrap(), "--path", "a,b"]);
    assert_eq!(error_category(&out), "parse");

    let graph = write_clique(dir.path(), 4);
    let out = forcepath(&["attack", "--graph", &graph, "--path", "n0,zz"]);
    assert_eq!(error_category(&out), "config");
    let out = forcepath(&["attack", "--graph", &graph, "--path", "n0,n3,n0"]);
    assert_eq!(error_category(&out), "input");

    let out = forcepath(&["experiment", "--ranks", "1"]);
    assert_eq!(error_category(&out), "config");
}
