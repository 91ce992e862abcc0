//! End-to-end checks of the command-line interface: generate, solve, verify,
//! sweep, exit codes, and byte-identical outputs.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_multimind")
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().expect("spawn")
}

fn run_ok(args: &[&str]) -> Output {
    let out = run(args);
    assert!(
        out.status.success(),
        "command {:?} failed: {}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

#[test]
fn gen_solve_verify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let hidden = dir.path().join("hidden.txt");
    let recovered = dir.path().join("recovered.txt");

    run_ok(&[
        "gen", "--instance", "random", "--problem", "binary", "--d", "12", "--n", "6", "--seed",
        "5", "--out", hidden.to_str().unwrap(),
    ]);
    let instance_arg = format!("file:{}", hidden.display());
    run_ok(&[
        "solve",
        "--problem",
        "strong",
        "--solver",
        "strong",
        "--instance",
        &instance_arg,
        "--recovered-out",
        recovered.to_str().unwrap(),
    ]);
    run_ok(&[
        "verify",
        "--instance",
        hidden.to_str().unwrap(),
        "--recovered",
        recovered.to_str().unwrap(),
    ]);
}

#[test]
fn verify_mismatch_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.txt");
    let b = dir.path().join("b.txt");
    std::fs::write(&a, "B 3 2\n010\n111\n").unwrap();
    std::fs::write(&b, "B 3 2\n010\n101\n").unwrap();
    let out = run(&[
        "verify", "--instance", a.to_str().unwrap(), "--recovered", b.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("missing 111"));
    assert!(text.contains("extra 101"));
}

#[test]
fn bad_arguments_exit_nonzero() {
    let out = run(&["solve", "--problem", "sphere", "--solver", "strong", "--d", "3", "--n", "2"]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&["gen", "--instance", "mystery", "--out", "/tmp/nope.txt"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn solve_output_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let out1 = dir.path().join("r1.jsonl");
    let out2 = dir.path().join("r2.jsonl");
    for path in [&out1, &out2] {
        run_ok(&[
            "solve", "--problem", "sphere", "--solver", "sphere", "--instance", "random", "--d",
            "3", "--n", "5", "--k", "2", "--seed", "7", "--trials", "6", "--out",
            path.to_str().unwrap(),
        ]);
    }
    let b1 = std::fs::read(&out1).unwrap();
    let b2 = std::fs::read(&out2).unwrap();
    assert!(!b1.is_empty());
    assert_eq!(b1, b2);
    let text = String::from_utf8(b1).unwrap();
    assert_eq!(text.lines().count(), 6);
    assert!(text.contains("\"success\":true"));
    assert!(!text.contains("elapsed_ms"));
}

#[test]
fn hamming_solve_reports_two_rounds() {
    let out = run_ok(&[
        "solve",
        "--problem",
        "hamming",
        "--solver",
        "hamming-two-round",
        "--instance",
        "random",
        "--d",
        "10",
        "--n",
        "3",
        "--t",
        "64",
        "--r",
        "3",
        "--trials",
        "4",
        "--seed",
        "3",
    ]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("rounds Some(2)"), "stdout: {text}");
}

#[test]
fn sweep_emits_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("agg.csv");
    let out = run_ok(&[
        "sweep", "--problem", "sphere", "--solver", "sphere", "--instance", "random", "--d", "3",
        "--n", "2", "--k", "2", "--n-axis", "2,4,6", "--trials", "2", "--seed", "1", "--out",
        csv.to_str().unwrap(),
    ]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.starts_with("instance,tie_policy"));
    let file_text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(file_text.lines().count(), 4);
    for line in file_text.lines().skip(1) {
        // trailing columns are success_rate, mean_queries, mean_rounds
        let fields: Vec<&str> = line.rsplit(',').collect();
        assert_eq!(fields[2], "1", "success_rate in {line:?}");
    }
}

#[test]
fn bench_prints_summary() {
    let out = run_ok(&[
        "bench", "--problem", "strong", "--solver", "strong-leveled", "--instance", "random",
        "--d", "16", "--n", "8", "--trials", "3", "--seed", "2",
    ]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("trials         3"), "stdout: {text}");
    assert!(text.contains("success rate   1.000"), "stdout: {text}");
}

#[test]
fn corpus_files_match_constructors() {
    use multimind::harness::files::parse_hidden_points;
    use multimind::harness::instances::structured_corpus;
    use multimind::oracle::HiddenPoints;

    for (name, points) in structured_corpus() {
        let path = corpus_dir().join(format!("{name}.txt"));
        let text = std::fs::read_to_string(&path)
            .unwrap_or_else(|_| panic!("corpus file missing for {name}"));
        match parse_hidden_points(&text).unwrap() {
            HiddenPoints::Sphere(loaded) => {
                assert_eq!(loaded.len(), points.len(), "{name}");
                for (a, b) in loaded.iter().zip(&points) {
                    assert!(a.distance(b) < 1e-9, "{name}: corpus file drifted");
                }
            }
            HiddenPoints::Binary(_) => panic!("{name}: wrong variant"),
        }
    }
}

#[test]
fn corpus_instances_solve_from_file() {
    let path = corpus_dir().join("circle-m6.txt");
    let instance_arg = format!("file:{}", path.display());
    let out = run_ok(&[
        "solve",
        "--problem",
        "sphere",
        "--solver",
        "sphere",
        "--instance",
        &instance_arg,
        "--tie-policy",
        "prefer-revealed",
    ]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("1/1 trials succeeded"), "stdout: {text}");
}
