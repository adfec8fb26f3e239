use std::path::Path;
use std::process::{Command, Output};

use bique::data::RawTriple;
use bique::toy::toy_triples;

fn bique(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bique")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write_tsv(path: &Path, triples: &[RawTriple]) {
    let text: String = triples.iter().map(|t| format!("{}\t{}\t{}\n", t.head, t.relation, t.tail)).collect();
    std::fs::write(path, text).unwrap();
}

/// Writes toy train/valid/test files into `dir`.
fn toy_files(dir: &Path) -> [String; 3] {
    let all = toy_triples();
    let (train, rest): (Vec<_>, Vec<_>) = all.into_iter().enumerate().partition(|(i, _)| i % 10 != 0);
    let rest: Vec<RawTriple> = rest.into_iter().map(|(_, t)| t).collect();
    let train: Vec<RawTriple> = train.into_iter().map(|(_, t)| t).collect();
    let (valid, test) = rest.split_at(rest.len() / 2);
    let names = ["train.tsv", "valid.tsv", "test.tsv"].map(|n| dir.join(n));
    write_tsv(&names[0], &train);
    write_tsv(&names[1], valid);
    write_tsv(&names[2], test);
    names.map(|p| p.to_str().unwrap().to_owned())
}

#[test]
fn train_then_eval() {
    let dir = tempfile::tempdir().unwrap();
    let [train, valid, test] = toy_files(dir.path());
    let ckpt = dir.path().join("ckpt.bq");
    let ckpt = ckpt.to_str().unwrap();
    let report = dir.path().join("report.json");
    let o = bique(&[
        "train", "--train", &train, "--valid", &valid, "--test", &test, "--dim", "8", "--epochs", "20",
        "--lr", "0.1", "--batch", "300", "--lambda", "0.15", "--lambda1", "2.0", "--lambda2", "0.5",
        "--seed", "7", "--eval-every", "5", "--out", ckpt, "--report", report.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    assert!(out.contains("seed 7"));
    assert!(out.contains("best validation MRR"));
    assert!(Path::new(ckpt).is_file());
    let log = std::fs::read_to_string(format!("{ckpt}.log.jsonl")).unwrap();
    assert_eq!(log.lines().count(), 20);
    let last: serde_json::Value = serde_json::from_str(log.lines().last().unwrap()).unwrap();
    assert_eq!(last["epoch"], 20);
    assert!(last["valid_mrr"].is_f64());
    let rep: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert!(rep["mrr"].as_f64().unwrap() > 0.0);

    let csv = dir.path().join("rel.csv");
    let o = bique(&[
        "eval", "--checkpoint", ckpt, "--train", &train, "--valid", &valid, "--test", &test, "--split",
        "test", "--threads", "2", "--csv", csv.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("MRR"));
    let csv = std::fs::read_to_string(csv).unwrap();
    assert_eq!(csv.lines().next(), Some("relation,count,mrr,hits10"));
    assert!(csv.contains("child_of_reciprocal"));
}

#[test]
fn eval_rejects_mismatched_graph() {
    let dir = tempfile::tempdir().unwrap();
    let [train, valid, _] = toy_files(dir.path());
    let ckpt = dir.path().join("c.bq");
    let o = bique(&[
        "train", "--train", &train, "--valid", &valid, "--dim", "2", "--epochs", "1", "--out",
        ckpt.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let other = dir.path().join("other.tsv");
    std::fs::write(&other, "a\tr\tb\n").unwrap();
    let o = bique(&["eval", "--checkpoint", ckpt.to_str().unwrap(), "--train", other.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(bique(&["train", "--valid", "v.tsv"]).status.code(), Some(2));
    assert_eq!(bique(&["train", "--train", "/nonexistent/t.tsv", "--valid", "/nonexistent/v.tsv"]).status.code(), Some(2));
    assert_eq!(bique(&["rotate-demo", "--steps", "1"]).status.code(), Some(2));
    assert_eq!(bique(&["factorize", "1", "0"]).status.code(), Some(2));
    assert_eq!(bique(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn gradcheck_exit_codes() {
    let o = bique(&["gradcheck"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("seed 0"));
    let o = bique(&["gradcheck", "--seed", "5", "--corrupt-gradient"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("worst coordinate"));
    assert_eq!(bique(&["gradcheck", "--steps", "1e-3", "--threshold", "1e-2"]).status.code(), Some(0));
    for mode in ["quaternion_only", "no-translation", "norm_real", "norm_biquat"] {
        assert_eq!(bique(&["gradcheck", "--mode", mode, "--seed", "3"]).status.code(), Some(0), "{mode}");
    }
}

#[test]
fn factorize_outputs() {
    let o = bique(&["factorize", "0.6", "0", "0.8", "0", "0", "0", "0", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("phi    0.000000000000"));

    let o = bique(&["factorize", "--normalize", "-0.3", "0.2", "0.5", "-0.9", "-0.4", "0.1", "0.7", "-0.6"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    let errors: Vec<f64> = out
        .lines()
        .filter_map(|l| l.trim().strip_prefix("reconstruction error "))
        .map(|v| v.parse().unwrap())
        .collect();
    assert_eq!(errors.len(), 2);
    assert!(errors.iter().all(|&e| e < 1e-9));

    let o = bique(&["factorize", "1", "1", "0", "0", "0", "0", "0", "0"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn rotate_demo_csv() {
    let o = bique(&["rotate-demo"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 82);
    assert_eq!(lines[41], "0.0,1.0,3.0,2.0,4.0");

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("traj.csv");
    let o = bique(&["rotate-demo", "--phi-min", "-1", "--phi-max", "1", "--steps", "5", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(path).unwrap().lines().count(), 6);
}

#[test]
fn selftest_passes() {
    let o = bique(&["selftest", "--seed", "11"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(stdout(&o).matches("PASS").count(), 4);
}
