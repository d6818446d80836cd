use std::fs;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_havoc-taint");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(run(&["fuzz", "--target", "unknown"]).status.code(), Some(2));
    assert_eq!(run(&["sample-start", "--iterations", "0", "--seed-len", "4"]).status.code(), Some(2));
    assert_eq!(run(&["stack-distance", "--stacks", "0", "--seed-len", "4"]).status.code(), Some(2));
    assert_eq!(run(&["compare", "--a", "x.csv"]).status.code(), Some(2));
}

#[test]
fn infeasible_splicing_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let seed = dir.path().join("seed");
    fs::write(&seed, b"same bytes").unwrap();
    let s = seed.to_str().unwrap();
    let out = run(&["splice-distance", "--corpus", s, s, "--iterations", "20"]);
    assert_eq!(out.status.code(), Some(3));
    let out = run(&["splice-distance", "--corpus", s, "--iterations", "20"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn fuzz_writes_stats_and_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let stats = dir.path().join("stats.csv");
    let corpus = dir.path().join("corpus");
    let out = run(&[
        "fuzz",
        "--target",
        "nested_cmp",
        "--max-executions",
        "5000",
        "--out",
        stats.to_str().unwrap(),
        "--corpus-dir",
        corpus.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&stats).unwrap();
    assert!(text.starts_with("execution,edges_covered,corpus_size,accepted_samples\n"));
    let summary = text.lines().last().unwrap();
    assert!(summary.starts_with("summary,executions=5000,"), "{summary}");
    let files: Vec<_> = fs::read_dir(&corpus).unwrap().collect();
    assert!(!files.is_empty());
}

#[test]
fn stdout_when_no_out() {
    let out = run(&["sample-start", "--seed-len", "10", "--iterations", "50", "--runs", "1"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("position,count"));
    assert_eq!(text.lines().count(), 11);
}

#[test]
fn compare_reports_significance() {
    let dir = tempfile::tempdir().unwrap();
    let mut fast = vec![];
    let mut slow = vec![];
    for i in 0..8 {
        let f = dir.path().join(format!("f{i}"));
        fs::write(&f, format!("execution,edges_covered,corpus_size,accepted_samples\nsummary,executions=9,edges_covered=3,corpus_size=1,accepted_samples=0,full_coverage_at={}\n", 100 + i)).unwrap();
        let s = dir.path().join(format!("s{i}"));
        fs::write(&s, "summary,executions=9,edges_covered=2,corpus_size=1,accepted_samples=0,full_coverage_at=none\n").unwrap();
        fast.push(f.to_str().unwrap().to_owned());
        slow.push(s.to_str().unwrap().to_owned());
    }
    let mut args = vec!["compare", "--target", "t", "--alternative", "less", "--a"];
    args.extend(fast.iter().map(String::as_str));
    args.push("--b");
    args.extend(slow.iter().map(String::as_str));
    let out = run(&args);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[0], "t");
    assert_eq!(row[1], "0");
    assert_eq!(row[3], "true");
}
