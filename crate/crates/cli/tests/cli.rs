use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn tdch(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tdch")).args(args).current_dir(dir).output().expect("binary runs")
}

fn ok(args: &[&str], dir: &Path) -> String {
    let out = tdch(args, dir);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn generates_deterministic_graphs() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["gen", "random", "40", "3", "--seed", "5", "-o", "a.tdg"], dir.path());
    ok(&["gen", "random", "40", "3", "--seed", "5", "-o", "b.tdg"], dir.path());
    ok(&["gen", "random", "40", "3", "--seed", "6", "-o", "c.tdg"], dir.path());
    let read = |f: &str| fs::read(dir.path().join(f)).unwrap();
    assert_eq!(read("a.tdg"), read("b.tdg"));
    assert_ne!(read("a.tdg"), read("c.tdg"));

    let tiny = ok(&["gen", "grid", "1", "1"], dir.path());
    assert_eq!(tiny.lines().nth(1).unwrap(), "1 0 86400");
    let square = ok(&["gen", "grid", "2", "2"], dir.path());
    assert!(square.lines().nth(1).unwrap().starts_with("4 8 "));
}

#[test]
fn query_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(&["gen", "grid", "6", "6", "--seed", "2", "-o", "g.tdg"], d);
    ok(&["preprocess", "g.tdg", "-o", "g.tch"], d);
    fs::write(d.join("q.txt"), "0 35 100\n7 7 5000\n35 0 80000.5\n").unwrap();

    let tch = ok(&["query", "g.tch", "q.txt"], d);
    let rows: Vec<Vec<&str>> = tch.lines().map(|l| l.split(' ').collect()).collect();
    assert_eq!(rows.len(), 3);
    assert_eq!(&rows[1][..5], ["7", "7", "5000", "5000", "0"]);

    let dijkstra = ok(&["query", "g.tdg", "q.txt", "--algo", "dijkstra"], d);
    for (a, b) in tch.lines().zip(dijkstra.lines()) {
        let ta: f64 = a.split(' ').nth(4).unwrap().parse().unwrap();
        let tb: f64 = b.split(' ').nth(4).unwrap().parse().unwrap();
        assert!((ta - tb).abs() <= 1e-6 * tb.max(1.0));
    }
    for algo in [["--algo", "pruned"], ["--algo", "profile"]] {
        let out = ok(&["query", "g.tch", "q.txt", algo[0], algo[1]], d);
        assert_eq!(out.lines().count(), 3);
    }
    ok(&["query", "g.tch", "q.txt", "--algo", "pruned", "--pruning", "interval", "-o", "r.txt"], d);
    assert_eq!(fs::read_to_string(d.join("r.txt")).unwrap().lines().count(), 3);
}

#[test]
fn verify_and_bench() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(&["gen", "grid", "5", "5", "--points", "1", "1", "-o", "g.tdg"], d);
    ok(&["preprocess", "g.tdg", "-o", "g.tch"], d);
    let report = ok(&["verify", "g.tdg", "g.tch", "--queries", "100", "--seed", "3"], d);
    assert!(report.contains("failures     0") && report.ends_with("result: PASS\n"), "{report}");

    ok(&["preprocess", "g.tdg", "--mode", "approx", "--epsilon", "0.5", "-o", "a.tch"], d);
    let report = ok(&["verify", "g.tdg", "a.tch", "--queries", "50", "--window", "25000", "30000"], d);
    assert!(report.contains("atch"));
    let report = ok(&["verify", "g.tdg", "a.tch", "--queries", "50", "--algo", "tch"], d);
    assert!(report.contains("condensed-tch"));

    let bench = ok(&["bench", "g.tdg", "--queries", "20"], d);
    assert!(bench.contains("preprocessing:") && bench.contains("tch"), "{bench}");
    let bench = ok(&["bench", "g.tdg", "a.tch", "--queries", "20"], d);
    assert!(bench.contains("not measured") && bench.contains("atch"), "{bench}");
}

#[test]
fn errors_map_to_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(&["gen", "grid", "3", "3", "-o", "g.tdg"], d);
    ok(&["preprocess", "g.tdg", "-o", "g.tch"], d);
    fs::write(d.join("q.txt"), "0 1 0\n").unwrap();
    fs::write(d.join("bad.txt"), "0 1\n").unwrap();
    fs::write(d.join("far.txt"), "0 100 0\n").unwrap();

    let code = |args: &[&str]| tdch(args, d).status.code();
    assert_eq!(code(&["query", "g.tch", "q.txt", "--algo", "atch"]), Some(2));
    assert_eq!(code(&["query", "g.tdg", "q.txt", "--algo", "tch"]), Some(2));
    assert_eq!(code(&["query", "g.tch", "far.txt"]), Some(2));
    assert_eq!(code(&["query", "g.tch", "missing.txt"]), Some(2));
    assert_eq!(code(&["frobnicate"]), Some(2));

    let out = tdch(&["query", "g.tch", "bad.txt"], d);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1"));

    ok(&["gen", "grid", "3", "3", "--seed", "9", "-o", "other.tdg"], d);
    assert_eq!(code(&["verify", "other.tdg", "g.tch", "--queries", "5"]), Some(2));
}

#[test]
fn failed_verification_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(&["gen", "grid", "5", "5", "-o", "g.tdg"], d);
    ok(&["preprocess", "g.tdg", "-o", "g.tch"], d);
    // Make every shortcut far too fast.
    let text = fs::read_to_string(d.join("g.tch")).unwrap();
    let broken: Vec<String> = text
        .lines()
        .map(|line| {
            let tok: Vec<&str> = line.split(' ').collect();
            if tok.len() > 6 && tok[3] != "-1" && tok[5] == "e" {
                let k: usize = tok[6].parse().unwrap();
                let mut out: Vec<String> = tok[..7].iter().map(|s| s.to_string()).collect();
                for i in 0..k {
                    out.push(tok[7 + 2 * i].to_string());
                    out.push("0.5".to_string());
                }
                out.extend(tok[7 + 2 * k..].iter().map(|s| s.to_string()));
                out.join(" ")
            } else {
                line.to_string()
            }
        })
        .collect();
    fs::write(d.join("broken.tch"), broken.join("\n")).unwrap();
    let out = tdch(&["verify", "g.tdg", "broken.tch", "--queries", "200", "--algo", "tch"], d);
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stdout));
    assert!(String::from_utf8_lossy(&out.stdout).ends_with("result: FAIL\n"));
}
