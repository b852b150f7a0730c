use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn weil(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_weil"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_out(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn hash_line(out: &Output) -> String {
    let err = String::from_utf8_lossy(&out.stderr);
    err.lines()
        .find_map(|l| l.split("hash ").nth(1))
        .expect("summary line")
        .to_string()
}

#[test]
fn bernoulli_reports_the_irregular_index() {
    let out = weil(&["bernoulli", "--p", "37"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_out(&out);
    let irr = v["results"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["check"] == "irregular")
        .unwrap();
    assert_eq!(irr["witness"]["recurrence"], serde_json::json!([32]));
    assert_eq!(irr["witness"]["via_b1"], serde_json::json!([32]));
}

#[test]
fn verify_excludes_l_equal_p() {
    let out = weil(&["verify", "--p", "3", "--l-max", "3", "--n-max", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_out(&out);
    let results = v["results"].as_array().unwrap();
    assert!(!results.is_empty());
    for r in results {
        let l = r["params"]["l"].as_u64().unwrap();
        if l == 3 {
            assert_eq!(r["status"], "skipped");
            assert_eq!(r["witness"]["reason"], "l = p excluded");
        } else {
            assert_eq!(l, 2);
        }
    }
    let out = weil(&["verify", "--p", "3", "--l-max", "2"]);
    assert_eq!(out.status.code(), Some(0));
    for r in json_out(&out)["results"].as_array().unwrap() {
        if let Some(l) = r["params"]["l"].as_u64() {
            assert_eq!(l, 2);
        }
    }
}

#[test]
fn usage_and_config_errors_exit_2() {
    let out = weil(&["verify", "--frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
    assert_eq!(weil(&["verify", "--p", "4"]).status.code(), Some(2));
    assert_eq!(weil(&["verify", "--checks", "nope"]).status.code(), Some(2));
    assert_eq!(weil(&["launch"]).status.code(), Some(2));
    let out = weil(&[
        "bernoulli",
        "--p",
        "5",
        "--output",
        "/nonexistent-dir/r.json",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_file_and_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# small run\np = 5\nN = 3\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    let out = weil(&["bernoulli", "--config", cfg]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_out(&out);
    assert_eq!(v["config"]["primes"], serde_json::json!([5]));
    assert_eq!(v["config"]["N"], 3);
    let out = weil(&["bernoulli", "--config", cfg, "--p", "7"]);
    let v = json_out(&out);
    assert_eq!(v["config"]["primes"], serde_json::json!([7]));
    assert_eq!(v["config"]["N"], 3);

    std::fs::write(dir.path().join("bad.cfg"), "p: 5\n").unwrap();
    let bad = dir.path().join("bad.cfg");
    let out = weil(&["bernoulli", "--config", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn output_files_and_report_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("r.json");
    let csv = dir.path().join("r.csv");
    let out = weil(&[
        "gauss",
        "--p",
        "3",
        "--n",
        "0",
        "--l",
        "7",
        "--output",
        json.to_str().unwrap(),
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v = read_json(&json);
    let keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
    assert_eq!(keys.len(), 3);
    assert_eq!(v["results"][0]["check"], "gauss_norm");
    assert_eq!(v["results"][0]["status"], "pass");
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("check,status,params,witness,ms\ngauss_norm,pass,"));

    let again = weil(&["report", "--input", json.to_str().unwrap()]);
    assert_eq!(again.status.code(), Some(0));
    assert_eq!(hash_line(&again), hash_line(&out));

    // a failing entry drives the exit code
    let mut failing = v.clone();
    failing["results"][0]["status"] = "fail".into();
    let fpath = dir.path().join("fail.json");
    std::fs::write(&fpath, failing.to_string()).unwrap();
    assert_eq!(
        weil(&["report", "--input", fpath.to_str().unwrap()]).status.code(),
        Some(1)
    );
    std::fs::write(&fpath, "{").unwrap();
    assert_eq!(
        weil(&["report", "--input", fpath.to_str().unwrap()]).status.code(),
        Some(2)
    );
}

#[test]
fn theta_and_iwasawa() {
    let out = weil(&["theta", "--p", "37", "--psi", "5", "--n", "1", "--N", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_out(&out);
    let lm = v["results"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["check"] == "lambda_mu")
        .unwrap();
    assert_eq!((lm["witness"]["lambda"].as_u64(), lm["witness"]["mu"].as_u64()), (Some(1), Some(0)));

    let out = weil(&["iwasawa", "--p", "3,5", "--n-max", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_out(&out);
    let results = v["results"].as_array().unwrap();
    assert!(results
        .iter()
        .any(|r| r["params"]["p"] == 3 && r["witness"]["reason"] == "no valid ψ"));
    assert!(results.iter().any(|r| r["check"] == "coker_order" && r["status"] == "pass"));
    // p = 3 has no valid ψ for the θ-series
    assert_eq!(weil(&["theta", "--p", "3"]).status.code(), Some(2));
}

#[test]
fn same_config_same_hash() {
    let args = ["verify", "--p", "5", "--n-max", "0", "--l-max", "31", "--seed", "3"];
    let a = weil(&args);
    let b = weil(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(hash_line(&a), hash_line(&b));
    let mut va = json_out(&a);
    let mut vb = json_out(&b);
    for v in [&mut va, &mut vb] {
        for r in v["results"].as_array_mut().unwrap() {
            r.as_object_mut().unwrap().remove("ms");
        }
    }
    assert_eq!(va, vb);
}

#[test]
fn site_cache_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("sites");
    std::fs::create_dir(&cache).unwrap();
    let args = [
        "verify", "--p", "3", "--n-max", "0", "--l-max", "13", "--checks", "gauss_norm,stickelberger",
        "--cache-dir", cache.to_str().unwrap(),
    ];
    let cold = weil(&args);
    assert_eq!(cold.status.code(), Some(0));
    assert!(std::fs::read_dir(&cache).unwrap().count() > 0);
    let warm = weil(&args);
    assert_eq!(warm.status.code(), Some(0));
    assert_eq!(hash_line(&cold), hash_line(&warm));
}
