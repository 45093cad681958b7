mod common;

use std::path::Path;
use std::process::Command;

use common::fixture_dir;
use priorepair::cli::main_with;

/// Runs the CLI in-process: (exit code, stdout, stderr).
fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = main_with(std::iter::once("priorepair").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn running_args(extra: &[&str]) -> Vec<String> {
    let dir = fixture_dir("running");
    let p = |f: &str| dir.join(f).display().to_string();
    let mut v: Vec<String> = vec![
        "--data".into(),
        p("ex.dkb"),
        "--meta".into(),
        p("ex.meta"),
        "--constraints".into(),
        p("ex.dc"),
        "--rules".into(),
        p("ex.prefs"),
        "--queries".into(),
        p("ex.ucq"),
        "--taxonomy".into(),
        p("ex.tax"),
    ];
    v.extend(extra.iter().map(|s| s.to_string()));
    v
}

fn run_owned(cmd: &str, args: &[String]) -> (i32, String, String) {
    let mut all = vec![cmd];
    all.extend(args.iter().map(String::as_str));
    run(&all)
}

fn lines(s: &str) -> Vec<serde_json::Value> {
    s.lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

#[test]
fn answer_reports_verdicts_per_tuple() {
    let (code, out, err) =
        run_owned("answer", &running_args(&["--strategy", "d", "--repair", "P", "--sem", "IAR", "--query", "adm"]));
    assert_eq!(code, 0, "{err}");
    let v = lines(&out);
    assert_eq!(v.len(), 2);
    assert_eq!(v[1]["tuple"], serde_json::json!(["b"]));
    assert_eq!(v[1]["entailed"], true);
    assert_eq!(v[1]["repair"], "P");
    assert_eq!(v[1]["semantics"], "IAR");
}

#[test]
fn answer_is_stable_across_job_counts() {
    let base = running_args(&["--repair", "S,P,C", "--sem", "brave,AR,IAR"]);
    let (_, one, _) = run_owned("answer", &base);
    let mut with_jobs = base.clone();
    with_jobs.extend(["--jobs".to_string(), "3".to_string()]);
    let (code, three, _) = run_owned("answer", &with_jobs);
    assert_eq!(code, 0);
    assert_eq!(one, three);
    assert_eq!(lines(&one).len(), 9 * 7);
}

#[test]
fn priority_on_cycle_fixture() {
    let dir = fixture_dir("ru-g-1");
    let p = |f: &str| dir.join(f).display().to_string();
    let (code, out, _) = run(&[
        "priority", "--strategy", "g", "--data", &p("g.dkb"), "--meta", &p("g.meta"), "--constraints", &p("g.dc"),
        "--rules", &p("g.prefs"), "--acyclicity",
    ]);
    assert_eq!(code, 0);
    let v = lines(&out);
    assert_eq!(v[0]["strongly_acyclic"], false);
    assert_eq!(v.len(), 4);
    assert_eq!(v[1], serde_json::json!({"from": "1", "to": "2"}));
}

#[test]
fn empty_dataset_has_no_conflicts() {
    assert_eq!(run(&["conflicts"]), (0, "[]\n".to_string(), String::new()));
}

#[test]
fn pretty_output_is_indented() {
    let (code, out, _) = run_owned("conflicts", &running_args(&["--pretty"]));
    assert_eq!(code, 0);
    assert!(out.lines().count() > 8);
    assert!(out.starts_with("[\n"));
}

#[test]
fn input_errors_exit_with_diagnostics() {
    let (code, out, err) = run_owned("answer", &running_args(&["--query", "missing"]));
    assert_eq!((code, out.as_str()), (1, ""));
    assert!(err.contains("unknown query `missing`"), "{err}");

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.dkb");
    std::fs::write(&bad, "1 | A(a)\n2 A(b)\n").unwrap();
    let (code, _, err) = run(&["conflicts", "--data", bad.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.contains("bad.dkb") && err.contains("line 2"), "{err}");

    let (code, _, err) = run(&["conflicts", "--data", "/nonexistent/x.dkb"]);
    assert_eq!(code, 1);
    assert!(err.contains("x.dkb"), "{err}");

    let (code, _, err) = run(&["priority", "--strategy", "zz"]);
    assert_eq!(code, 2, "{err}");
}

#[test]
fn repairs_respect_caps() {
    let (code, out, _) = run_owned("repairs", &running_args(&["--repair", "C", "--strategy", "d"]));
    assert_eq!(code, 0);
    assert!(!out.is_empty());
    let (code, _, err) = run_owned("repairs", &running_args(&["--cap", "5"]));
    assert_eq!(code, 1);
    assert!(err.contains("cap"), "{err}");
}

#[test]
fn emit_asp_prints_programs() {
    let (code, out, _) = run(&["emit-asp", "priority", "--strategy", "u"]);
    assert_eq!(code, 0);
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/priority_u.lp");
    assert_eq!(out, std::fs::read_to_string(golden).unwrap());
    let (code, out, err) = run_owned("emit-asp", &{
        let mut a = vec!["input".to_string()];
        a.extend(running_args(&[]));
        a
    });
    assert_eq!(code, 0);
    assert!(out.contains("data(1).\napr(1, a)."));
    assert!(err.contains("warning:"), "{err}");
}

#[test]
fn gen_is_byte_identical_for_equal_seeds() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let (code, out, err) = run(&[
            "gen", "--facts", "100", "--conflict-rate", "0.3", "--max-conflict-arity", "3", "--levels", "2",
            "--pref-density", "0.5", "--seed", "7", "--out", d.path().to_str().unwrap(),
        ]);
        assert_eq!(code, 0, "{err}");
        assert_eq!(lines(&out)[0]["files"].as_array().unwrap().len(), 5);
    }
    for name in ["gen.dkb", "gen.meta", "gen.dc", "gen.ucq", "gen.prefs"] {
        assert_eq!(std::fs::read(a.path().join(name)).unwrap(), std::fs::read(b.path().join(name)).unwrap());
    }
    let (code, _, err) = run(&["gen", "--facts", "10", "--conflict-rate", "0.1", "--out", a.path().to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.contains("single fact"), "{err}");
}

#[test]
fn binary_runs_end_to_end() {
    let out = Command::new(env!("CARGO_BIN_EXE_priorepair"))
        .arg("conflicts")
        .args(running_args(&[]))
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(lines(&String::from_utf8(out.stdout).unwrap())[0].as_array().unwrap().len(), 8);
    let out = Command::new(env!("CARGO_BIN_EXE_priorepair")).args(["answer", "--query", "q"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
}
