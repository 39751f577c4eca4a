use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn permlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_permlab")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).trim().to_string()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write_matrix(dir: &Path, name: &str, n: usize, domain: &str, entries: &str) -> String {
    let path = dir.join(name);
    let doc = format!(r#"{{"schema":"perm-matrix-v1","n":{n},"domain":"{domain}","entries":{entries}}}"#);
    fs::write(&path, doc).unwrap();
    path_str(&path).to_string()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn rows(path: &Path) -> Vec<Vec<f64>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|f| if f.is_empty() { f64::NAN } else { f.parse().unwrap() }).collect())
        .collect()
}

#[test]
fn perm_examples() {
    let dir = tempfile::tempdir().unwrap();
    let eye = write_matrix(dir.path(), "eye.json", 3, "complex", "[[1,0],[0,0],[0,0],[0,0],[1,0],[0,0],[0,0],[0,0],[1,0]]");
    let o = permlab(&["perm", &eye, "--method", "ryser"]);
    assert_eq!((code(&o), stdout(&o).as_str()), (0, "1 + 0i"));

    let small = write_matrix(dir.path(), "small.json", 2, "integer", "[1,2,3,4]");
    let o = permlab(&["perm", &small, "--method", "naive"]);
    assert_eq!((code(&o), stdout(&o).as_str()), (0, "10"));
    for method in ["ryser", "glynn"] {
        assert_eq!(stdout(&permlab(&["perm", &small, "--method", method])), "10");
    }
    assert_eq!(stdout(&permlab(&["perm", &small, "--domain", "real"])), "10");

    let ragged = write_matrix(dir.path(), "ragged.json", 2, "real", "[1,2,3,4,5,6]");
    assert_eq!(code(&permlab(&["perm", &ragged])), 2);
    fs::write(dir.path().join("junk.json"), "not json").unwrap();
    assert_eq!(code(&permlab(&["perm", path_str(&dir.path().join("junk.json"))])), 2);
}

#[test]
fn perm_dimension_cap_is_a_limit_error() {
    let dir = tempfile::tempdir().unwrap();
    let entries = format!("[{}]", vec!["1"; 144].join(","));
    let big = write_matrix(dir.path(), "big.json", 12, "integer", &entries);
    assert_eq!(code(&permlab(&["perm", &big, "--method", "naive"])), 3);
    // perm(J_12) = 12!
    assert_eq!(stdout(&permlab(&["perm", &big, "--method", "ryser"])), "479001600");
}

#[test]
fn schur_examples() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("s3.json");
    let o = permlab(&["schur", "--n", "3", "--out", path_str(&report)]);
    assert_eq!((code(&o), stdout(&o).as_str()), (0, "-3"));
    let doc = read_json(&report);
    assert_eq!(doc["schema"], "perm-schur-v1");
    assert_eq!(doc["value"], "-3");
    assert_eq!(doc["primes"].as_array().unwrap().len(), doc["residues"].as_array().unwrap().len());
    assert!(doc["elapsed_seconds"].as_f64().unwrap() >= 0.0);

    assert_eq!(stdout(&permlab(&["schur", "--n", "2"])), "0");
    // Rounded naive permanent of S_7.
    assert_eq!(stdout(&permlab(&["schur", "--n", "7", "--prime-bits", "20"])), "-105");
    assert_eq!(code(&permlab(&["schur", "--n", "25"])), 3);
    assert_eq!(code(&permlab(&["schur", "--n", "5", "--prime-bits", "70"])), 2);
}

#[test]
fn sampling_is_reproducible_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for (out, threads) in [(&a, "1"), (&b, "8")] {
        let o = permlab(&[
            "sample", "--ensemble", "haar-u", "--n", "5", "--count", "100", "--seed", "1", "--threads", threads,
            "--out", path_str(out),
        ]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert!(fs::read_to_string(&a).unwrap().starts_with("re,im\n"));
    assert_eq!(rows(&a).len(), 100);

    let manifest = read_json(&dir.path().join("a.csv.manifest.json"));
    assert_eq!(manifest["schema"], "perm-samples-v1");
    assert_eq!(manifest["parameters"]["ensemble"], "haar-u");
    assert_eq!(manifest["parameters"]["n"], 5);
    assert_eq!(manifest["parameters"]["count"], 100);
    assert_eq!(manifest["seed"], 1);
    assert_eq!(manifest["engine"], "ryser");
    assert_eq!(manifest["data"], "a.csv");
}

#[test]
fn large_dimension_sampling_is_reproducible_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for threads in ["1", "3"] {
        let out = dir.path().join(format!("g{threads}.csv"));
        let o = permlab(&[
            "sample", "--ensemble", "ginibre-c", "--n", "14", "--count", "3", "--seed", "9", "--threads", threads,
            "--out", path_str(&out),
        ]);
        assert_eq!(code(&o), 0);
        files.push(fs::read(&out).unwrap());
    }
    assert_eq!(files[0], files[1]);
}

#[test]
fn gue_permanents_are_real() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("gue.csv");
    let o = permlab(&["sample", "--ensemble", "gue", "--n", "5", "--count", "200", "--seed", "3", "--out", path_str(&out)]);
    assert_eq!(code(&o), 0);
    for r in rows(&out) {
        assert!(r[1].abs() < 1e-12 * r[0].abs(), "{r:?}");
    }
}

#[test]
fn sample_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    let out = path_str(&out);
    assert_eq!(code(&permlab(&["sample", "--ensemble", "cue", "--n", "5", "--count", "5", "--seed", "1", "--out", out])), 2);
    assert_eq!(code(&permlab(&["sample", "--ensemble", "gue", "--n", "5", "--count", "0", "--seed", "1", "--out", out])), 2);
    // Seeds are mandatory.
    assert_eq!(code(&permlab(&["sample", "--ensemble", "gue", "--n", "5", "--count", "5", "--out", out])), 2);
}

#[test]
fn geodesic_examples() {
    let dir = tempfile::tempdir().unwrap();
    let cycle = dir.path().join("cycle.csv");
    let o = permlab(&["geodesic", "--target", "cycle", "--n", "5", "--steps", "3", "--out", path_str(&cycle)]);
    assert_eq!(code(&o), 0);
    assert!(fs::read_to_string(&cycle).unwrap().starts_with("t,re,im,f\n"));
    let r = rows(&cycle);
    assert_eq!(r.len(), 3);
    assert_eq!(r[1][0], 0.5);
    assert!((r[1][1] / 1.440e-2 - 1.0).abs() < 1e-3, "{:?}", r[1]);
    assert!((r[1][3] + (r[1][1].abs().ln()) / 5.0).abs() < 1e-15);
    let manifest = read_json(&dir.path().join("cycle.csv.manifest.json"));
    assert_eq!(manifest["schema"], "perm-trace-v1");
    assert_eq!(manifest["parameters"]["target"], "cycle");
    assert_eq!(manifest["parameters"]["steps"], 3);

    let dft = dir.path().join("dft.csv");
    assert_eq!(code(&permlab(&["geodesic", "--target", "dft", "--n", "4", "--steps", "2", "--out", path_str(&dft)])), 0);
    let r = rows(&dft);
    assert_eq!(r.len(), 2);
    assert_eq!((r[0][0], r[0][1], r[0][2]), (0.0, 1.0, 0.0));
    // perm(F_4) = perm(S_4) / 16 = 0.
    assert_eq!(r[1][0], 1.0);
    assert!(r[1][1].abs() < 1e-12 && r[1][2].abs() < 1e-12, "{:?}", r[1]);

    // Even n vanishes at the midpoint.
    let even = dir.path().join("even.csv");
    assert_eq!(code(&permlab(&["geodesic", "--target", "cycle", "--n", "6", "--steps", "3", "--out", path_str(&even)])), 0);
    let r = rows(&even);
    assert!(r[1][1].abs() < 1e-12);

    let out = dir.path().join("bad.csv");
    assert_eq!(code(&permlab(&["geodesic", "--target", "cycle", "--n", "5", "--steps", "1", "--out", path_str(&out)])), 2);
    assert_eq!(code(&permlab(&["geodesic", "--target", "circle", "--n", "5", "--steps", "3", "--out", path_str(&out)])), 2);
}

fn sample(dir: &Path, ensemble: &str, n: &str, count: &str, seed: &str) -> String {
    let out = dir.join(format!("{ensemble}-{n}.csv"));
    let o = permlab(&["sample", "--ensemble", ensemble, "--n", n, "--count", count, "--seed", seed, "--out", path_str(&out)]);
    assert_eq!(code(&o), 0);
    path_str(&out).to_string()
}

#[test]
fn stats_rayleigh_on_haar_data() {
    let dir = tempfile::tempdir().unwrap();
    let data = sample(dir.path(), "haar-u", "7", "10000", "11");
    let report = dir.path().join("report.json");
    let o = permlab(&["stats", &data, "--tests", "rayleigh,gaussian", "--out", path_str(&report)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let doc = read_json(&report);
    assert_eq!(doc["schema"], "perm-report-v1");
    assert_eq!(doc["manifest"]["parameters"]["ensemble"], "haar-u");
    let shape = doc["tests"]["rayleigh"]["weibull"]["parameters"]["shape"].as_f64().unwrap();
    assert!((1.9..=2.1).contains(&shape), "{shape}");
    let ratio = doc["tests"]["gaussian"]["var_ratio"].as_f64().unwrap();
    assert!((0.95..=1.05).contains(&ratio), "{ratio}");
}

#[test]
fn stats_stable_on_goe_data() {
    let dir = tempfile::tempdir().unwrap();
    let data = sample(dir.path(), "goe", "7", "10000", "5");
    let o = permlab(&["stats", &data, "--tests", "stable"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    let alpha = doc["tests"]["stable"]["ecf"]["alpha"].as_f64().unwrap();
    assert!((0.87..=1.17).contains(&alpha), "{alpha}");
}

#[test]
fn stats_on_traces_and_all_batteries() {
    let dir = tempfile::tempdir().unwrap();
    let data = sample(dir.path(), "ginibre-c", "5", "1000", "2");
    let o = permlab(&["stats", &data, "--tests", "moments,exponential,lognormal,anticoncentration"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["tests"]["anticoncentration"]["e_ref"], 120.0);
    let p: Vec<f64> = doc["tests"]["anticoncentration"]["probability"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    assert!(p.windows(2).all(|w| w[0] <= w[1]), "{p:?}");

    let trace = dir.path().join("t.csv");
    assert_eq!(code(&permlab(&["geodesic", "--target", "dft", "--n", "5", "--steps", "50", "--out", path_str(&trace)])), 0);
    let o = permlab(&["stats", path_str(&trace), "--tests", "moments"]);
    assert_eq!(code(&o), 0);
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["provenance"]["source"], "trace");
}

#[test]
fn stats_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let data = sample(dir.path(), "haar-u", "3", "50", "1");
    assert_eq!(code(&permlab(&["stats", &data, "--tests"])), 2);
    assert_eq!(code(&permlab(&["stats", &data, "--tests", "kurtosis"])), 2);
    assert_eq!(code(&permlab(&["stats", &data])), 2);
    fs::remove_file(format!("{data}.manifest.json")).unwrap();
    assert_eq!(code(&permlab(&["stats", &data, "--tests", "moments"])), 2);
}

#[test]
fn stats_numeric_failure_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    // 50 samples are too few for the quantile estimator.
    let data = sample(dir.path(), "goe", "4", "50", "1");
    let report = dir.path().join("r.json");
    let o = permlab(&["stats", &data, "--tests", "moments,stable", "--out", path_str(&report)]);
    assert_eq!(code(&o), 4);
    let doc = read_json(&report);
    assert!(doc["tests"]["moments"]["re"]["mean"].is_number());
    // GOE permanents are real.
    assert!(doc["tests"]["moments"]["im"]["degenerate"].is_string());
    assert!(doc["tests"]["stable"]["error"].is_string());
}
