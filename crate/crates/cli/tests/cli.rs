use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn kemeny() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_kemeny"));
    cmd.env_remove("KF_THREADS");
    cmd
}

fn run(args: &[&str]) -> Output {
    kemeny().args(args).output().unwrap()
}

fn graph_file(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json_lines(out: &Output) -> Vec<Value> {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone())
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

const K3: &str = "1 2\n2 3\n1 3\n";
const P3: &str = "10 20\n20 30\n";

#[test]
fn exact_prints_twelve_significant_digits() {
    let dir = TempDir::new().unwrap();
    let g = graph_file(&dir, "k3.txt", K3);
    let out = run(&["exact", s(&g)]);
    let v = &json_lines(&out)[0];
    assert_eq!(v["kappa"].as_f64().unwrap(), 1.33333333333);
    assert!(String::from_utf8_lossy(&out.stderr).contains("1.33333333333 "));
}

#[test]
fn estimate_examples() {
    let dir = TempDir::new().unwrap();
    let k3 = graph_file(&dir, "k3.txt", K3);
    let v = &json_lines(&run(&["estimate", s(&k3), "--samples", "10000", "--seed", "7"]))[0];
    let k = v["kappa_hat"].as_f64().unwrap();
    assert!((k - 4.0 / 3.0).abs() / (4.0 / 3.0) <= 0.03, "{k}");

    let p3 = graph_file(&dir, "p3.edges", P3);
    let v = &json_lines(&run(&["estimate", s(&p3), "--samples", "1"]))[0];
    assert_eq!(v["kappa_hat"].as_f64().unwrap(), 1.5);
    assert_eq!(v["root"].as_u64().unwrap(), 20);

    // ln(2 / 0.27) = 2.0025, so the ceiling is 5 rather than 4
    let k2 = graph_file(&dir, "k2.txt", "0 1\n");
    let v = &json_lines(&run(&["estimate", s(&k2), "--eps", "1", "--pf", "0.27"]))[0];
    assert_eq!(v["samples"].as_u64().unwrap(), 5);
    assert_eq!(v["kappa_hat"].as_f64().unwrap(), 0.5);
}

#[test]
fn trace_has_one_line_per_sample() {
    let dir = TempDir::new().unwrap();
    let k3 = graph_file(&dir, "k3.txt", K3);
    let trace = dir.path().join("trace.jsonl");
    let v = &json_lines(&run(&["estimate", s(&k3), "--samples", "25", "--trace", s(&trace)]))[0];
    let lines: Vec<Value> = std::fs::read_to_string(&trace)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 25);
    let steps: u64 = lines.iter().map(|l| l["walk_steps"].as_u64().unwrap()).sum();
    assert_eq!(steps, v["walk_steps"].as_u64().unwrap());
    let total: i64 = lines.iter().map(|l| l["f"].as_i64().unwrap()).sum();
    assert_eq!(total as f64 / (6.0 * 25.0), v["kappa_hat"].as_f64().unwrap());
}

#[test]
fn payloads_repeat_byte_for_byte_without_timings() {
    let dir = TempDir::new().unwrap();
    let g = graph_file(&dir, "g.txt", "1 2\n2 3\n3 4\n4 1\n1 3\n3 5\n5 6\n6 3\n");
    let strip = |out: Output| {
        let mut v = json_lines(&out).remove(0);
        v.as_object_mut().unwrap().remove("timings");
        v.to_string()
    };
    let args = ["estimate", s(&g), "--samples", "200", "--seed", "9", "--tau0", "wilson", "--method", "opt"];
    assert_eq!(strip(run(&args)), strip(run(&args)));
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let bad_ext = graph_file(&dir, "k3.csv", K3);
    assert_eq!(run(&["exact", s(&bad_ext)]).status.code(), Some(2));
    let malformed = graph_file(&dir, "bad.txt", "1 x\n");
    assert_eq!(run(&["exact", s(&malformed)]).status.code(), Some(2));
    let k3 = graph_file(&dir, "k3.txt", K3);
    assert_eq!(run(&["estimate", s(&k3), "--root", "99"]).status.code(), Some(2));
    assert_eq!(run(&["estimate", s(&k3), "--eps", "0"]).status.code(), Some(2));
    assert_eq!(run(&["oracle-check", "--max-n", "9"]).status.code(), Some(3));
    let missing = dir.path().join("none.txt");
    assert_eq!(run(&["exact", s(&missing)]).status.code(), Some(2));
}

#[test]
fn env_threads_override_flag() {
    let dir = TempDir::new().unwrap();
    let k3 = graph_file(&dir, "k3.txt", K3);
    let out = kemeny()
        .env("KF_THREADS", "0")
        .args(["--threads", "2", "estimate", s(&k3)])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = kemeny()
        .env("KF_THREADS", "2")
        .args(["--threads", "0", "estimate", s(&k3)])
        .output()
        .unwrap();
    assert!(out.status.success());
}

#[test]
fn disconnected_input_uses_largest_component() {
    let dir = TempDir::new().unwrap();
    let g = graph_file(&dir, "g.txt", "1 2\n2 3\n1 3\n7 8\n");
    let v = &json_lines(&run(&["exact", s(&g)]))[0];
    assert_eq!((v["n"].as_u64(), v["m"].as_u64()), (Some(3), Some(3)));
}

fn gen(graph: &Path, out: &Path, count: usize, insert_frac: f64, seed: u64) -> String {
    let o = run(&[
        "gen-updates",
        s(graph),
        "--count",
        &count.to_string(),
        "--insert-frac",
        &insert_frac.to_string(),
        "--seed",
        &seed.to_string(),
        "--out",
        s(out),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    std::fs::read_to_string(out).unwrap()
}

#[test]
fn gen_updates_examples() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("u.txt");
    let p3 = graph_file(&dir, "p3.txt", P3);
    assert_eq!(gen(&p3, &out, 1, 1.0, 0).trim(), "I 10 30");

    let k3 = graph_file(&dir, "k3.txt", K3);
    let mut counts: HashMap<String, usize> = HashMap::new();
    let draws = 300;
    for seed in 0..draws {
        *counts.entry(gen(&k3, &out, 1, 0.0, seed)).or_default() += 1;
    }
    assert_eq!(counts.len(), 3);
    for (line, c) in &counts {
        assert!(line.starts_with('D'));
        assert!((*c as f64 / draws as f64 - 1.0 / 3.0).abs() < 0.1, "{counts:?}");
    }
    assert_eq!(gen(&k3, &out, 4, 0.5, 5), gen(&k3, &out, 4, 0.5, 5));
}

#[test]
fn star_deletions_fall_back_to_insertions() {
    let dir = TempDir::new().unwrap();
    let star = graph_file(&dir, "s5.txt", "0 1\n0 2\n0 3\n0 4\n");
    let out = dir.path().join("u.txt");
    let text = gen(&star, &out, 1, 0.0, 1);
    assert!(text.starts_with('I'), "{text}");
}

#[test]
fn index_lifecycle_and_replay_modes() {
    let dir = TempDir::new().unwrap();
    let mut text = String::new();
    for i in 0..30u32 {
        text += &format!("{} {}\n{} {}\n", i, (i + 1) % 30, i, (i + 7) % 30);
    }
    let g = graph_file(&dir, "g.txt", &text);
    let idx = dir.path().join("g.kfi");
    let built = &json_lines(&run(&[
        "index", "build", s(&g), "--out", s(&idx), "--mode", "bsm", "--samples", "400", "--seed", "3",
    ]))[0];
    let est = &json_lines(&run(&["estimate", s(&g), "--samples", "400", "--seed", "3"]))[0];
    assert_eq!(built["kappa_hat"], est["kappa_hat"]);

    let upd = dir.path().join("u.txt");
    gen(&g, &upd, 6, 0.5, 11);
    let mut finals = Vec::new();
    for mode in ["bsm", "ism", "rebuild"] {
        let saved = dir.path().join(format!("{mode}.kfi"));
        let graph_out = dir.path().join(format!("{mode}.txt"));
        let lines = json_lines(&run(&[
            "update-replay",
            s(&g),
            s(&idx),
            s(&upd),
            "--mode",
            mode,
            "--save-index",
            s(&saved),
            "--save-graph",
            s(&graph_out),
        ]));
        assert_eq!(lines.len(), 6);
        if mode == "ism" {
            assert!(lines.iter().all(|l| l["wilson_walks"] == 0));
        }
        let last = lines.last().unwrap()["kappa_hat"].as_f64().unwrap();
        // the saved index reloads on the saved graph and rebuilds cleanly
        let rebuilt = &json_lines(&run(&["index", "rebuild", s(&graph_out), s(&saved)]))[0];
        assert_eq!(rebuilt["samples"], 400);
        finals.push((last, graph_out));
    }
    let exact = json_lines(&run(&["exact", s(&finals[0].1)]))[0]["kappa"].as_f64().unwrap();
    for (k, _) in &finals {
        assert!((k - exact).abs() / exact < 0.1, "{k} vs {exact}");
    }
}

#[test]
fn index_rejects_other_graph() {
    let dir = TempDir::new().unwrap();
    let k3 = graph_file(&dir, "k3.txt", K3);
    let c4 = graph_file(&dir, "c4.txt", "1 2\n2 3\n3 4\n4 1\n");
    let idx = dir.path().join("k3.kfi");
    assert!(run(&["index", "build", s(&k3), "--out", s(&idx), "--samples", "10"]).status.success());
    assert_eq!(run(&["index", "rebuild", s(&c4), s(&idx)]).status.code(), Some(5));
}

#[test]
fn oracle_check_passes_on_small_graphs() {
    let lines = json_lines(&run(&["oracle-check", "--max-n", "5", "--graphs-per-size", "2"]));
    assert_eq!(lines.len(), 5);
    assert!(lines.iter().all(|l| l["passed"] == true));
}
