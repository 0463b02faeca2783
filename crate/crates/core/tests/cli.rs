//! End-to-end runs of the `plate` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use hinged_plate::certify::{claims, CertificationReport, Suite};
use hinged_plate::io::RunManifest;

const SMALL: &str = "n_modes_x = 6\nn_basis_y = 5\nn_quad_x = 24\nn_quad_y = 12\n";

fn plate(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_plate")).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8_lossy(&out.stdout).into_owned())
}

fn config(dir: &Path, text: &str) -> PathBuf {
    let path = dir.join("plate.toml");
    fs::write(&path, text).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn solve_writes_outputs_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), SMALL);
    let out = dir.path().join("run");
    let (code, stdout) = plate(&["solve", "--config", s(&cfg), "--out", s(&out)]);
    assert_eq!(code, 0);
    assert!(stdout.starts_with("lambda1 = "));
    for f in ["coefficients.csv", "u_grid.csv", "level_sets.csv", "eigen.json"] {
        assert!(out.join(f).is_file(), "{f} missing");
    }
    assert!(fs::read_to_string(out.join("coefficients.csv")).unwrap().starts_with("m,d,coefficient\n"));
    let manifest = RunManifest::read_all(&out).unwrap();
    assert_eq!(manifest.len(), 1);
    assert_eq!(manifest[0].command, "solve");
    for o in &manifest[0].outputs {
        assert!(out.join(o).is_file());
    }
}

#[test]
fn density_files_round_trip_and_are_validated() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), SMALL);
    let first = dir.path().join("first");
    assert_eq!(plate(&["optimize", "--config", s(&cfg), "--starts", "1", "--out", s(&first)]).0, 0);
    let density = first.join("start_0_uniform").join("final_density.csv");
    let again = dir.path().join("again");
    let (code, _) = plate(&["solve", "--config", s(&cfg), "--density", s(&density), "--out", s(&again)]);
    assert_eq!(code, 0);

    // a node value below alpha
    let text = fs::read_to_string(&density).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    let mut cols: Vec<String> = lines[1].split(',').map(String::from).collect();
    cols[2] = "0.4".into();
    lines[1] = cols.join(",");
    let bad = dir.path().join("bad.csv");
    fs::write(&bad, lines.join("\n") + "\n").unwrap();
    assert_eq!(plate(&["solve", "--config", s(&cfg), "--density", s(&bad), "--out", s(&again)]).0, 2);
}

#[test]
fn validation_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let bad_sigma = config(dir.path(), "sigma = 1.0\n");
    assert_eq!(plate(&["solve", "--config", s(&bad_sigma), "--out", s(&out)]).0, 2);
    let unknown = config(dir.path(), "gamma = 1.0\n");
    assert_eq!(plate(&["solve", "--config", s(&unknown), "--out", s(&out)]).0, 2);
    let odd = config(dir.path(), &format!("{SMALL}n_quad_x = 25\n").replace("n_quad_x = 24\n", ""));
    assert_eq!(plate(&["solve", "--config", s(&odd), "--out", s(&out)]).0, 2);
    assert_eq!(plate(&["certify", "--suite", "nonsense", "--out", s(&out)]).0, 2);
    assert_eq!(plate(&["frobnicate"]).0, 2);
    assert_eq!(plate(&["solve", "--density", "/no/such/file.csv", "--out", s(&out)]).0, 2);
}

#[test]
fn one_iteration_gives_two_trace_rows() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), &format!("{SMALL}opt_max_iter = 1\n"));
    let out = dir.path().join("o");
    assert_eq!(plate(&["optimize", "--config", s(&cfg), "--starts", "1", "--out", s(&out)]).0, 0);
    let trace = fs::read_to_string(out.join("start_0_uniform").join("trace.csv")).unwrap();
    let rows: Vec<&str> = trace.lines().collect();
    assert_eq!(rows[0], "iter,lambda1,threshold_t,S_measure,density_change_measure");
    assert_eq!(rows.len(), 3);
}

#[test]
fn certify_all_reports_each_claim_once() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), SMALL);
    let out = dir.path().join("o");
    let (code, _) = plate(&["certify", "--config", s(&cfg), "--suite", "all", "--out", s(&out)]);
    let bundle: Vec<CertificationReport> =
        serde_json::from_str(&fs::read_to_string(out.join("certifications.json")).unwrap()).unwrap();
    let ids: Vec<&str> = bundle.iter().map(|r| r.claim_id.as_str()).collect();
    let expected: Vec<&str> = claims(Suite::All).map(|c| c.id).collect();
    assert_eq!(ids, expected);
    for r in &bundle {
        assert!(out.join("certifications").join(format!("{}.json", r.claim_id)).is_file());
    }
    let all_pass = bundle.iter().all(|r| r.pass);
    assert_eq!(code, if all_pass { 0 } else { 4 });
    let manifest = RunManifest::read_all(&out).unwrap();
    assert_eq!(manifest[0].certifications.as_ref().unwrap().total, expected.len());
}

#[test]
fn failing_certification_exits_with_four() {
    // two x-modes cannot resolve the Green function near the hinged edges
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "n_modes_x = 1\nn_basis_y = 2\nn_quad_x = 4\nn_quad_y = 2\n");
    let out = dir.path().join("o");
    let (code, _) = plate(&["certify", "--config", s(&cfg), "--suite", "green", "--out", s(&out)]);
    let bundle: Vec<CertificationReport> =
        serde_json::from_str(&fs::read_to_string(out.join("certifications.json")).unwrap()).unwrap();
    assert!(bundle.iter().any(|r| !r.pass));
    assert_eq!(code, 4);
}

fn snapshot(dir: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    let mut files = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else if p.file_name().unwrap() != "manifest.jsonl" {
                files.push((p.strip_prefix(dir).unwrap().to_path_buf(), fs::read(&p).unwrap()));
            }
        }
    }
    files.sort();
    files
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), SMALL);
    for args in [vec!["optimize", "--starts", "4", "--seed", "9"], vec!["certify", "--suite", "polarization", "--seed", "3"], vec!["solve"]] {
        let runs: Vec<_> = ["a", "b"]
            .iter()
            .map(|name| {
                let out = dir.path().join(format!("{}_{name}", args[0]));
                let mut full = args.clone();
                full.extend(["--config", s(&cfg), "--out", s(&out)]);
                plate(&full);
                snapshot(&out)
            })
            .collect();
        assert!(!runs[0].is_empty());
        assert_eq!(runs[0], runs[1], "{} outputs differ", args[0]);
    }
}
