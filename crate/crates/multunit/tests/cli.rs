use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use multunit::mu_core::UnitaryFile;
use multunit::tensorlin::ComplexMatrix;
use tempfile::TempDir;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn mu(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mu")).args(args).output().expect("run mu")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_string_lossy().into_owned()
}

/// Builds the S3 unitary into `dir` and returns its path.
fn s3(dir: &TempDir) -> String {
    let v = path(dir, "s3.json");
    let out = mu(&["build", "group", "--table", data("s3.grp").to_str().unwrap(), "-o", &v]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    v
}

#[test]
fn build_and_verify_s3() {
    let dir = TempDir::new().unwrap();
    let v = s3(&dir);
    let file: UnitaryFile = serde_json::from_str(&fs::read_to_string(&v).unwrap()).unwrap();
    assert_eq!(file.n, 6);
    let report = path(&dir, "verify.json");
    let out = mu(&["verify", "-i", &v, "--report", &report]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert!(!stdout(&out).contains("FAIL"));
    let checks: serde_json::Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert!(checks.as_array().unwrap().iter().all(|c| c["pass"] == true));
}

#[test]
fn dual_and_tensor_builds_verify() {
    let dir = TempDir::new().unwrap();
    let v = s3(&dir);
    for (flag, name) in [(None, "hat.json"), (Some("--tilde"), "tilde.json")] {
        let out_path = path(&dir, name);
        let mut args = vec!["build", "dual", "-i", &v, "-o", &out_path];
        args.extend(flag);
        assert_eq!(code(&mu(&args)), 0);
        assert_eq!(code(&mu(&["verify", "-i", &out_path])), 0);
    }
    let z2 = path(&dir, "z2.json");
    let z3 = path(&dir, "z3.json");
    assert_eq!(code(&mu(&["build", "group", "--table", data("z2.grp").to_str().unwrap(), "-o", &z2])), 0);
    assert_eq!(code(&mu(&["build", "group", "--table", data("z3.grp").to_str().unwrap(), "-o", &z3])), 0);
    let t = path(&dir, "t.json");
    assert_eq!(code(&mu(&["build", "tensor", "-i", &z2, &z3, "-o", &t])), 0);
    assert_eq!(code(&mu(&["verify", "-i", &t])), 0);
    let out = mu(&["build", "tensor", "-i", &v, &v, "-o", &t]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("above the supported"));
}

#[test]
fn identity_input_reports_multiplicity() {
    let dir = TempDir::new().unwrap();
    let p = path(&dir, "id.json");
    let file = UnitaryFile { n: 2, v: ComplexMatrix::identity(4), tol: 1e-9 };
    fs::write(&p, serde_json::to_string(&file).unwrap()).unwrap();
    let out = mu(&["verify", "-i", &p]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("multiplicity != 1"), "{}", stderr(&out));
}

#[test]
fn malformed_inputs_exit_two() {
    let dir = TempDir::new().unwrap();
    let corrupt = path(&dir, "corrupt.json");
    fs::write(&corrupt, "{\"n\": 2, \"V\": [").unwrap();
    assert_eq!(code(&mu(&["verify", "-i", &corrupt])), 2);
    assert_eq!(code(&mu(&["verify", "-i", &path(&dir, "missing.json")])), 2);

    let broken = path(&dir, "broken.grp");
    fs::write(&broken, "5\n0 1 2 3 4\n1 0 3 4 2\n2 4 0 1 3\n3 2 4 0 1\n4 3 1 2 0\n").unwrap();
    let out = mu(&["build", "group", "--table", &broken, "-o", &path(&dir, "x.json")]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("associative"), "{}", stderr(&out));

    let v = s3(&dir);
    for tol in ["0", "-1", "0.01", "nan"] {
        assert_eq!(code(&mu(&["--tol", tol, "verify", "-i", &v])), 2, "tol {tol}");
    }
    assert_eq!(code(&mu(&["verify"])), 2);
}

#[test]
fn presub_enumeration_and_exports() {
    let dir = TempDir::new().unwrap();
    let v = s3(&dir);
    let dot = path(&dir, "lattice.dot");
    let report = path(&dir, "presub.json");
    let out = mu(&["presub", "-i", &v, "--lattice", &dot, "--report", &report]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).starts_with("6 pre-subgroups (best_effort = true)"));
    assert!(fs::read_to_string(&dot).unwrap().starts_with("digraph"));
    let r: serde_json::Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(r["nodes"].as_array().unwrap().len(), 6);

    assert_eq!(code(&mu(&["--strict", "presub", "-i", &v])), 3);
    let table = data("s3.grp");
    let out = mu(&["--strict", "presub", "-i", &v, "--table", table.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("best_effort = false"));

    for (grp, nodes) in [("z4.grp", 3), ("z1.grp", 1)] {
        let p = path(&dir, grp);
        assert_eq!(code(&mu(&["build", "group", "--table", data(grp).to_str().unwrap(), "-o", &p])), 0);
        let out = mu(&["presub", "-i", &p]);
        assert!(stdout(&out).starts_with(&format!("{nodes} pre-subgroups")));
    }
}

#[test]
fn seed_file_is_validated() {
    let dir = TempDir::new().unwrap();
    let v = s3(&dir);
    let seeds = path(&dir, "seeds.json");
    fs::write(&seeds, r#"{"vectors": [[[1, 0], [0, 0], [0, 0], [0, 0], [0, 0], [0, 0]]]}"#).unwrap();
    assert_eq!(code(&mu(&["--seed-extra", &seeds, "presub", "-i", &v])), 0);
    fs::write(&seeds, r#"{"vectors": [[[1, 0]]]}"#).unwrap();
    assert_eq!(code(&mu(&["--seed-extra", &seeds, "presub", "-i", &v])), 2);
}

#[test]
fn classify_and_coideal_reports() {
    let dir = TempDir::new().unwrap();
    let v = s3(&dir);
    let out = mu(&["classify", "-i", &v]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("6 pre-subgroups: 6 subgroups, 3 co-subgroups, 3 normal"));
    let report = path(&dir, "coideal.json");
    let out = mu(&["coideal", "-i", &v, "--report", &report]);
    assert_eq!(code(&out), 0);
    let r: serde_json::Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    for node in r["nodes"].as_array().unwrap() {
        assert!(node["round_trip"].as_array().unwrap().iter().all(|b| b == true));
    }
}

#[test]
fn bicross_on_matched_and_unmatched_pairs() {
    let dir = TempDir::new().unwrap();
    let v = s3(&dir);
    let w = path(&dir, "w.json");
    let out = mu(&["bicross", "-i", &v, "--f", "4", "--g", "1", "-o", &w]);
    assert_eq!(code(&out), 0, "{}{}", stdout(&out), stderr(&out));
    assert!(stdout(&out).contains("double construction: Exact"));
    assert_eq!(code(&mu(&["verify", "-i", &w])), 0);
    let built = path(&dir, "w2.json");
    assert_eq!(code(&mu(&["build", "bicrossed", "-i", &v, "--f", "4", "--g", "1", "-o", &built])), 0);
    assert_eq!(fs::read(&w).unwrap(), fs::read(&built).unwrap());

    let out = mu(&["bicross", "-i", &v, "--f", "1", "--g", "2"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("not maximally distant"));
    assert_eq!(code(&mu(&["bicross", "-i", &v, "--f", "9", "--g", "1"])), 2);
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let dir = TempDir::new().unwrap();
    let v = s3(&dir);
    let runs: Vec<Vec<Vec<u8>>> = (0..2)
        .map(|k| {
            let names = ["verify", "presub", "classify", "coideal", "bicross"];
            names
                .iter()
                .map(|cmd| {
                    let r = path(&dir, &format!("{cmd}{k}.json"));
                    let mut args = vec![*cmd, "-i", v.as_str(), "--report", r.as_str()];
                    if *cmd == "bicross" {
                        args.extend(["--f", "4", "--g", "1"]);
                    }
                    assert_eq!(code(&mu(&args)), 0, "{cmd}");
                    fs::read(&r).unwrap()
                })
                .collect()
        })
        .collect();
    assert_eq!(runs[0], runs[1]);
}
