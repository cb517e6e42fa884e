//! End-to-end runs of the command line through `cli::run`.

use std::fs;
use std::path::Path;

use serde_json::Value;
use torusblocks::cli::{run, EXIT_CHECK_FAILED, EXIT_NUMERICAL, EXIT_OK, EXIT_USAGE};

/// Runs with `--output` pointing into `dir`; returns the exit code and output.
fn run_to(dir: &Path, args: &[&str]) -> (i32, String) {
    let out = dir.join("out.txt");
    let _ = fs::remove_file(&out);
    let mut argv = vec!["torusblocks"];
    argv.extend_from_slice(args);
    let out_s = out.to_str().unwrap().to_string();
    argv.extend_from_slice(&["--output", &out_s]);
    let code = run(argv);
    (code, fs::read_to_string(&out).unwrap_or_default())
}

fn json(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

#[test]
fn smatrix_at_kappa_4_is_one_by_one() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out) = run_to(dir.path(), &["smatrix", "--kappa", "4", "--p", "1", "--format", "json"]);
    assert_eq!(code, EXIT_OK);
    let v = json(&out);
    assert_eq!(v["basis"], serde_json::json!([2]));
    assert_eq!(v["S"].as_array().unwrap().len(), 1);
    assert_eq!(v["relations"]["s_squared"], "pass");
    assert_eq!(v["relations"]["st_cubed"], "pass");
    // the single entry is ζ_32^8 = i
    let coeffs = v["S"][0][0]["coeffs"].as_array().unwrap();
    assert_eq!(v["S"][0][0]["order"], 32);
    for (j, c) in coeffs.iter().enumerate() {
        assert_eq!(c[0], if j == 8 { 1 } else { 0 });
    }
    let (_, f) = run_to(dir.path(), &["smatrix", "--kappa", "4", "--p", "1", "--backend", "float"]);
    let s = &json(&f)["S"][0][0];
    assert!(s[0].as_f64().unwrap().abs() < 1e-14);
    assert!((s[1].as_f64().unwrap() - 1.0).abs() < 1e-14);
}

#[test]
fn exact_output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["smatrix", "--kappa", "8", "--p", "2"][..],
        &["macdonald", "--n", "4", "--k", "2", "--eval", "1"][..],
        &["verify", "identities", "--kappa", "7", "--p", "2"][..],
    ] {
        let (c1, a) = run_to(dir.path(), args);
        let (c2, b) = run_to(dir.path(), args);
        assert_eq!((c1, c2), (EXIT_OK, EXIT_OK), "{args:?}");
        assert_eq!(a, b, "{args:?}");
    }
}

#[test]
fn relations_over_a_kappa_range_pass() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out) = run_to(dir.path(), &["verify", "relations", "--kappa", "4..12"]);
    assert_eq!(code, EXIT_OK);
    let v = json(&out);
    assert_eq!(v["summary"]["failed"], 0);
    assert!(v["summary"]["total"].as_u64().unwrap() >= 5 * 34);
    for r in v["records"].as_array().unwrap() {
        assert!(!r["anchor"].as_str().unwrap().is_empty());
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(run_to(d, &["smatrix", "--kappa", "5", "--p", "2"]).0, EXIT_USAGE);
    assert_eq!(run_to(d, &["frobnicate"]).0, EXIT_USAGE);
    assert_eq!(run_to(d, &["verify", "kzb", "--kappa", "4", "--p", "1", "--format", "csv"]).0, EXIT_USAGE);
    assert_eq!(run_to(d, &["verify", "stokes", "--kappa", "4", "--p", "1", "--level", "1"]).0, EXIT_USAGE);
    // p = 2 integrals off the imaginary axis have no tracked branch
    assert_eq!(run_to(d, &["verify", "vanishing", "--kappa", "8", "--p", "2", "--tau", "0.3,1"]).0, EXIT_NUMERICAL);

    let cfg = d.join("strict.toml");
    fs::write(&cfg, "[tolerances]\nkzb = 1e-30\n").unwrap();
    let cfg_s = cfg.to_str().unwrap();
    let (code, out) = run_to(d, &["verify", "kzb", "--kappa", "4", "--p", "1", "--config", cfg_s]);
    assert_eq!(code, EXIT_CHECK_FAILED);
    assert_eq!(json(&out)["summary"]["failed"], 1);
    assert_eq!(run_to(d, &["verify", "kzb", "--kappa", "4", "--p", "1"]).0, EXIT_OK);
}

#[test]
fn empirical_probes_do_not_fail_a_run() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out) = run_to(dir.path(), &["verify", "kirillov", "--kappa", "5", "--p", "1"]);
    let v = json(&out);
    assert_eq!(v["summary"]["failed"], 0);
    assert_eq!(code, EXIT_OK);
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "kappa = 6\np = 1\nformat = \"pretty\"\n").unwrap();
    let cfg_s = cfg.to_str().unwrap();
    let (code, out) = run_to(dir.path(), &["smatrix", "--config", cfg_s]);
    assert_eq!(code, EXIT_OK);
    assert!(out.starts_with("kappa = 6, p = 1"), "{out}");
    let (_, out) = run_to(dir.path(), &["smatrix", "--config", cfg_s, "--kappa", "7", "--format", "json"]);
    assert_eq!(json(&out)["kappa"], 7);
    fs::write(&cfg, "kappa = 6\n[tolerances]\nkzb = -1\n").unwrap();
    assert_eq!(run_to(dir.path(), &["smatrix", "--config", cfg_s, "--p", "1"]).0, EXIT_USAGE);
}

#[test]
fn smatrix_csv_has_one_row_per_entry() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out) = run_to(dir.path(), &["smatrix", "--kappa", "7", "--p", "1", "--format", "csv"]);
    assert_eq!(code, EXIT_OK);
    let lines: Vec<_> = out.lines().collect();
    assert_eq!(lines[0], "m,n,re,im");
    assert_eq!(lines.len(), 1 + 16);
}

#[test]
fn cache_is_used_and_repaired() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let c = cache.to_str().unwrap();
    let (code, _) = run_to(dir.path(), &["cache", "warm", "--kappa", "4..6", "--cache-dir", c]);
    assert_eq!(code, EXIT_OK);
    let (_, listed) = run_to(dir.path(), &["cache", "list", "--cache-dir", c]);
    assert_eq!(json(&listed)["entries"].as_array().unwrap().len(), 7);

    let (_, fresh) = run_to(dir.path(), &["smatrix", "--kappa", "6", "--p", "1"]);
    let (_, cached) = run_to(dir.path(), &["smatrix", "--kappa", "6", "--p", "1", "--cache-dir", c]);
    assert_eq!(fresh, cached);

    let entry = cache.join("modular-k6-p1.json");
    fs::write(&entry, "corrupt").unwrap();
    let (code, repaired) = run_to(dir.path(), &["smatrix", "--kappa", "6", "--p", "1", "--cache-dir", c]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(repaired, fresh);
    assert!(fs::read_to_string(&entry).unwrap().starts_with("{\"version\""));

    let (_, cleared) = run_to(dir.path(), &["cache", "clear", "--cache-dir", c]);
    assert_eq!(json(&cleared)["removed"], 7);
}

#[test]
fn macdonald_json_shape() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out) = run_to(dir.path(), &["macdonald", "--n", "3", "--k", "1", "--kappa", "7", "--eval", "2"]);
    assert_eq!(code, EXIT_OK);
    let v = json(&out);
    assert_eq!(v["basis"], "q^{dx}+q^{-dx}");
    let keys: Vec<_> = v["coeffs"].as_object().unwrap().keys().cloned().collect();
    assert_eq!(keys, vec!["1", "3"]);
    assert!(v["eval"]["value"]["order"].is_u64());
}

#[test]
fn trace_with_oracle_reports_the_convention() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out) = run_to(
        dir.path(),
        &["trace", "--k", "2", "--nu", "-2.3", "--mu", "1.7", "--q-modulus", "0.9", "--oracle"],
    );
    assert_eq!(code, EXIT_OK);
    let v = json(&out);
    assert!(v["convention_factor"]["exponent"].as_f64().unwrap().abs() < 1e-10);
    let (code, out) = run_to(dir.path(), &["trace", "--k", "1", "--nu", "3", "--mu", "8", "--kappa", "8"]);
    assert_eq!(code, EXIT_OK);
    let v = json(&out);
    assert!(v["psi"]["error"].is_string());
    assert!(v["psi_renormalized"]["exact"].is_object());
    assert_eq!(run_to(dir.path(), &["trace", "--k", "1", "--nu", "1", "--mu", "1", "--kappa", "8", "--oracle"]).0, EXIT_USAGE);
}
