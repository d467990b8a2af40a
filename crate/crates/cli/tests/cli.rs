use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn corpus(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(format!("{name}.bh"))
}

fn boheap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_boheap")).args(args).output().unwrap()
}

fn analyze(extra: &[&str], file: &Path) -> Output {
    let mut args = vec!["analyze", "--scope", "2", "--data-max", "3"];
    args.extend_from_slice(extra);
    args.push(file.to_str().unwrap());
    boheap(&args)
}

fn stats_row(out: &Output) -> Vec<String> {
    let err = String::from_utf8_lossy(&out.stderr);
    let mut lines = err.lines().filter(|l| l.contains('\t'));
    let header = lines.next().unwrap();
    assert!(header.starts_with("procedure\tpredicates"));
    lines.next().unwrap().split('\t').map(String::from).collect()
}

fn broken(dir: &Path, ensures: &str) -> PathBuf {
    let text = std::fs::read_to_string(corpus("list_traverse")).unwrap();
    let mut out = String::new();
    let mut done = false;
    for line in text.lines() {
        if line.starts_with("ensures ") {
            if !done {
                out.push_str(&format!("ensures {ensures}\n"));
                done = true;
            }
        } else {
            out.push_str(line);
            out.push('\n');
        }
    }
    let path = dir.join("broken.bh");
    std::fs::write(&path, out).unwrap();
    path
}

#[test]
fn verified_procedure_exits_zero() {
    let out = analyze(&[], &corpus("list_traverse"));
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("procedure List.traverse: VERIFIED at N=2 M=3"));
    assert!(text.contains("invariant at head:"));
}

#[test]
fn failed_condition_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = analyze(&[], &broken(dir.path(), "first = null"));
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stdout).unwrap().contains("witness:"));
}

#[test]
fn unknown_condition_exits_two() {
    let out = analyze(&["--backend", "smtlib:/nonexistent/solver"], &corpus("list_traverse"));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stdout).unwrap().contains("INCONCLUSIVE"));
}

#[test]
fn any_failing_file_fails_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let bad = broken(dir.path(), "first = null");
    let out = analyze(&[], &bad);
    assert_eq!(out.status.code(), Some(1));
    let both = boheap(&[
        "analyze",
        "--scope",
        "2",
        corpus("list_traverse").to_str().unwrap(),
        bad.to_str().unwrap(),
    ]);
    assert_eq!(both.status.code(), Some(1));
}

#[test]
fn input_errors_exit_three() {
    let out = analyze(&[], Path::new("/nonexistent/file.bh"));
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error:"));
    let dir = tempfile::tempdir().unwrap();
    let junk = dir.path().join("junk.bh");
    std::fs::write(&junk, "boheap 1\nprocedure\n").unwrap();
    assert_eq!(analyze(&[], &junk).status.code(), Some(3));
    assert_eq!(analyze(&["--backend", "z3"], &corpus("list_traverse")).status.code(), Some(3));
}

#[test]
fn print_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["sorted_insert", "tree_insert", "dll_append"] {
        let once = boheap(&["print", corpus(name).to_str().unwrap()]);
        assert_eq!(once.status.code(), Some(0));
        let path = dir.path().join(format!("{name}.bh"));
        std::fs::write(&path, &once.stdout).unwrap();
        let twice = boheap(&["print", path.to_str().unwrap()]);
        assert_eq!(once.stdout, twice.stdout, "{name}");
    }
}

#[test]
fn cache_off_gives_the_same_report() {
    let file = corpus("list_reverse");
    let on = analyze(&[], &file);
    let off = analyze(&["--no-cache"], &file);
    assert_eq!(on.stdout, off.stdout);
    assert_eq!(stats_row(&off)[3], "0.0");
}

#[test]
fn warm_cache_file_is_used() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("queries.cache");
    let c = cache.to_str().unwrap();
    let file = corpus("dll_append");
    let cold = analyze(&["--cache", c], &file);
    assert!(cache.exists());
    let warm = analyze(&["--cache", c], &file);
    assert_eq!(cold.stdout, warm.stdout);
    let (a, b) = (stats_row(&cold), stats_row(&warm));
    let backend = |r: &[String]| r[4].parse::<u64>().unwrap();
    assert!(backend(&b) < backend(&a));
    assert!(b[3].parse::<f64>().unwrap() > 0.0);
}

#[test]
fn json_lines_are_records() {
    let out = analyze(&["--emit", "json-lines"], &corpus("two_level"));
    let text = String::from_utf8(out.stdout).unwrap();
    let recs: Vec<serde_json::Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert!(recs.iter().any(|r| r["kind"] == "location"));
    assert!(recs.iter().any(|r| r["kind"] == "vc" && r["verdict"] == "valid"));
    let last = recs.last().unwrap();
    assert_eq!(last["kind"], "summary");
    assert_eq!(last["status"], "VERIFIED");
}

#[test]
fn report_file_trace_and_export() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.txt");
    let smt = dir.path().join("smt");
    let out = analyze(
        &[
            "--out",
            report.to_str().unwrap(),
            "--trace",
            "--export-smtlib",
            smt.to_str().unwrap(),
            "--jobs",
            "1",
        ],
        &corpus("list_traverse"),
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    assert!(std::fs::read_to_string(&report).unwrap().contains("VERIFIED"));
    assert!(String::from_utf8_lossy(&out.stderr).contains("node 0 at entry"));
    let scripts: Vec<_> = std::fs::read_dir(&smt).unwrap().collect();
    assert!(!scripts.is_empty());
}
