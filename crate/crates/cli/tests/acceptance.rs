//! CLI acceptance tests: byte-identical outputs on repeated invocations of
//! every command, the committed golden trajectory, documented exit codes,
//! and the degenerate train configurations.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_relugd"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn read_dir_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut entries: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    entries.sort_by(|a, b| a.0.cmp(&b.0));
    entries
}

fn data_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p
}

#[test]
fn criterion_11_every_command_is_byte_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let root = tmp.path();

    // gen-data twice.
    let (a, b) = (root.join("gen_a"), root.join("gen_b"));
    for out in [&a, &b] {
        let r = run(&[
            "gen-data", "--d", "3", "--m", "5", "--seed", "21",
            "--norm-min", "0.5", "--norm-max", "2.0",
            "--out", out.to_str().unwrap(),
        ]);
        assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stderr));
    }
    assert_eq!(read_dir_bytes(&a), read_dir_bytes(&b));
    let dataset = a.join("dataset.json");

    // train twice (config with an explicit dataset path).
    let cfg = write_config(
        root,
        "train.json",
        &format!(
            r#"{{
  "schema": "experiment/1",
  "data": {{"path": {:?}}},
  "width": 32,
  "eta": 0.0005,
  "steps": 40,
  "eps": 0.2,
  "seed": 9,
  "record_gram_every": 20
}}"#,
            dataset
        ),
    );
    let (ta, tb) = (root.join("train_a"), root.join("train_b"));
    for out in [&ta, &tb] {
        let r = run(&["train", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
        assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stderr));
    }
    assert_eq!(read_dir_bytes(&ta), read_dir_bytes(&tb));

    // certify twice, Monte Carlo method so the seed actually matters.
    let (ca, cb) = (root.join("cert_a"), root.join("cert_b"));
    for out in [&ca, &cb] {
        let r = run(&[
            "certify", "--data", dataset.to_str().unwrap(), "--eps", "0.25",
            "--gram", "mc", "--mc-samples", "20000", "--seed", "4",
            "--out", out.to_str().unwrap(),
        ]);
        assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stderr));
    }
    assert_eq!(read_dir_bytes(&ca), read_dir_bytes(&cb));

    // verify-convergence twice.
    let vcfg = write_config(
        root,
        "verify.json",
        &format!(
            r#"{{
  "schema": "experiment/1",
  "data": {{"path": {:?}}},
  "width": 128,
  "eta": "cor-max",
  "steps": 60,
  "eps": 0.2,
  "trials": 3,
  "seed": 5
}}"#,
            dataset
        ),
    );
    let (va, vb) = (root.join("ver_a"), root.join("ver_b"));
    for out in [&va, &vb] {
        let r = run(&["verify-convergence", "--config", vcfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
        assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stderr));
    }
    assert_eq!(read_dir_bytes(&va), read_dir_bytes(&vb));

    // probe-lemmas twice at quick scale.
    let (pa, pb) = (root.join("probe_a"), root.join("probe_b"));
    for out in [&pa, &pb] {
        let r = run(&["probe-lemmas", "--seed", "3", "--scale", "quick", "--out", out.to_str().unwrap()]);
        assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stderr));
    }
    assert_eq!(read_dir_bytes(&pa), read_dir_bytes(&pb));

    println!("[PASS] criterion 11: repeated invocations of all five commands are byte-identical");
}

#[test]
fn demo_config_reproduces_golden_trajectory() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("demo");
    let r = run(&[
        "train",
        "--config",
        data_path("demo_config.json").to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stderr));
    let got = fs::read(out.join("trajectory.csv")).unwrap();
    let golden = fs::read(data_path("demo_trajectory.csv")).unwrap();
    assert_eq!(got, golden, "trajectory.csv differs from the committed golden file");
}

#[test]
fn exit_code_2_on_unsatisfiable_generator() {
    let tmp = tempfile::tempdir().unwrap();
    // d = 1, m = 2: any two nonzero scalars are linearly dependent.
    let r = run(&[
        "gen-data", "--d", "1", "--m", "2", "--seed", "1",
        "--out", tmp.path().join("x").to_str().unwrap(),
    ]);
    assert_eq!(code(&r), 2);
    let err = String::from_utf8_lossy(&r.stderr);
    assert!(err.contains("dependent pair"), "stderr: {err}");
}

#[test]
fn exit_code_2_on_degenerate_dataset_and_bad_eps() {
    let tmp = tempfile::tempdir().unwrap();
    let data = write_config(
        tmp.path(),
        "degenerate.json",
        r#"{"schema": "dataset/1", "d": 2, "m": 2, "x": [[1.0, 0.0], [2.0, 0.0]], "y": [0.5, -0.5]}"#,
    );
    let r = run(&[
        "certify", "--data", data.to_str().unwrap(), "--eps", "0.2",
        "--out", tmp.path().join("c").to_str().unwrap(),
    ]);
    assert_eq!(code(&r), 2);
    assert!(String::from_utf8_lossy(&r.stderr).contains("(0, 1)"));

    let ok = write_config(
        tmp.path(),
        "ok.json",
        r#"{"schema": "dataset/1", "d": 2, "m": 2, "x": [[1.0, 0.0], [0.0, 1.0]], "y": [0.5, -0.5]}"#,
    );
    let r = run(&[
        "certify", "--data", ok.to_str().unwrap(), "--eps", "1.5",
        "--out", tmp.path().join("c").to_str().unwrap(),
    ]);
    assert_eq!(code(&r), 2);
}

#[test]
fn exit_code_2_on_unknown_schema_major() {
    let tmp = tempfile::tempdir().unwrap();
    let data = write_config(
        tmp.path(),
        "future.json",
        r#"{"schema": "dataset/9", "d": 2, "m": 1, "x": [[1.0, 0.0]], "y": [0.5]}"#,
    );
    let r = run(&[
        "certify", "--data", data.to_str().unwrap(), "--eps", "0.2",
        "--out", tmp.path().join("c").to_str().unwrap(),
    ]);
    assert_eq!(code(&r), 2);
    assert!(String::from_utf8_lossy(&r.stderr).contains("schema"));
}

#[test]
fn exit_code_3_on_divergence() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "diverge.json",
        r#"{
  "schema": "experiment/1",
  "data": {"generator": {"d": 2, "m": 4, "seed": 7, "norm_range": [1.0, 1.0]}},
  "width": 64,
  "eta": 100.0,
  "steps": 200,
  "eps": 0.2,
  "seed": 11
}"#,
    );
    let r = run(&["train", "--config", cfg.to_str().unwrap(), "--out", tmp.path().join("d").to_str().unwrap()]);
    assert_eq!(code(&r), 3, "{}", String::from_utf8_lossy(&r.stderr));
    assert!(String::from_utf8_lossy(&r.stderr).contains("diverged"));
}

#[test]
fn certify_orthonormal_pair_eigenvalues() {
    let tmp = tempfile::tempdir().unwrap();
    let data = write_config(
        tmp.path(),
        "pair.json",
        r#"{"schema": "dataset/1", "d": 2, "m": 2, "x": [[1.0, 0.0], [0.0, 1.0]], "y": [0.5, -0.5]}"#,
    );
    let out = tmp.path().join("cert");
    let r = run(&["certify", "--data", data.to_str().unwrap(), "--eps", "0.2", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stderr));
    let cert: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("certificate.json")).unwrap()).unwrap();
    assert!((cert["lambda"].as_f64().unwrap() - 0.25).abs() < 1e-12);
    assert!((cert["mu"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert_eq!(cert["provenance"]["gram_method"], "closed_form");

    // The Monte Carlo variant records its provenance.
    let out_mc = tmp.path().join("cert_mc");
    let r = run(&[
        "certify", "--data", data.to_str().unwrap(), "--eps", "0.2",
        "--gram", "mc", "--mc-samples", "50000", "--seed", "8",
        "--out", out_mc.to_str().unwrap(),
    ]);
    assert_eq!(code(&r), 0);
    let cert: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_mc.join("certificate.json")).unwrap())
            .unwrap();
    assert_eq!(cert["provenance"]["gram_method"], "monte_carlo");
    assert_eq!(cert["provenance"]["mc_samples"], 50000);
    assert_eq!(cert["provenance"]["seed"], 8);
}

#[test]
fn train_degenerate_configurations() {
    let tmp = tempfile::tempdir().unwrap();
    let dataset = write_config(
        tmp.path(),
        "data.json",
        r#"{"schema": "dataset/1", "d": 2, "m": 2, "x": [[1.0, 0.0], [0.0, 1.0]], "y": [0.5, -0.5]}"#,
    );

    // steps = 0: a single CSV row after the header.
    let cfg0 = write_config(
        tmp.path(),
        "steps0.json",
        &format!(
            r#"{{"schema": "experiment/1", "data": {{"path": {:?}}}, "width": 8, "eta": 0.01, "steps": 0, "eps": 0.2, "seed": 1}}"#,
            dataset
        ),
    );
    let out0 = tmp.path().join("steps0");
    let r = run(&["train", "--config", cfg0.to_str().unwrap(), "--out", out0.to_str().unwrap()]);
    assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stderr));
    let csv = fs::read_to_string(out0.join("trajectory.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);

    // eta = 0: the risk column is constant.
    let cfg_eta0 = write_config(
        tmp.path(),
        "eta0.json",
        &format!(
            r#"{{"schema": "experiment/1", "data": {{"path": {:?}}}, "width": 8, "eta": 0.0, "steps": 10, "eps": 0.2, "seed": 1}}"#,
            dataset
        ),
    );
    let out_eta0 = tmp.path().join("eta0");
    let r = run(&["train", "--config", cfg_eta0.to_str().unwrap(), "--out", out_eta0.to_str().unwrap()]);
    assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stderr));
    let csv = fs::read_to_string(out_eta0.join("trajectory.csv")).unwrap();
    let risks: Vec<&str> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap())
        .collect();
    assert_eq!(risks.len(), 11);
    assert!(risks.iter().all(|&r| r == risks[0]), "risk column not constant: {risks:?}");
}

#[test]
fn verify_convergence_reports_envelope_violation_or_divergence_for_huge_eta() {
    let tmp = tempfile::tempdir().unwrap();
    // eta far above m/(lambda+mu): every trial must diverge or break the
    // envelope; the fraction fields stay inside [0,1].
    let cfg = write_config(
        tmp.path(),
        "huge.json",
        r#"{
  "schema": "experiment/1",
  "data": {"generator": {"d": 2, "m": 4, "seed": 7, "norm_range": [1.0, 1.0]}},
  "width": 64,
  "eta": 500.0,
  "steps": 100,
  "eps": 0.2,
  "trials": 2,
  "seed": 6
}"#,
    );
    let out = tmp.path().join("v");
    let r = run(&["verify-convergence", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stderr));
    let v: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("verification.json")).unwrap()).unwrap();
    for trial in v["per_trial"].as_array().unwrap() {
        let diverged = trial["diverged"].as_bool().unwrap();
        let env = trial["envelope_sum_over_m"].as_bool().unwrap();
        assert!(diverged || !env, "huge eta neither diverged nor broke the envelope");
    }
    for key in [
        "fraction_envelope_capital_lambda",
        "fraction_envelope_sum_over_m",
        "fraction_monotone",
    ] {
        let f = v[key].as_f64().unwrap();
        assert!((0.0..=1.0).contains(&f));
    }
}

#[test]
fn verify_single_trial_wide_network_holds_envelope_everywhere() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "wide.json",
        r#"{
  "schema": "experiment/1",
  "data": {"generator": {"d": 2, "m": 4, "seed": 7, "norm_range": [1.0, 1.0]}},
  "width": 4096,
  "eta": "cor-max",
  "steps": 100,
  "eps": 0.2,
  "trials": 1,
  "seed": 3
}"#,
    );
    let out = tmp.path().join("v");
    let r = run(&["verify-convergence", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stderr));
    let v: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("verification.json")).unwrap()).unwrap();
    assert_eq!(v["fraction_envelope_capital_lambda"].as_f64().unwrap(), 1.0);
    assert_eq!(v["per_trial"][0]["envelope_capital_lambda"], true);
}

#[test]
fn probe_report_schema_shape() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("p");
    let r = run(&["probe-lemmas", "--seed", "12", "--scale", "quick", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&r), 0);
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("probes.json")).unwrap()).unwrap();
    assert_eq!(report["schema"], "probe-report/1");
    let probes = report["probes"].as_array().unwrap();
    assert!(!probes.is_empty());
    for p in probes {
        for key in ["name", "samples", "statistic", "bound", "se", "pass", "vacuous", "seed"] {
            assert!(p.get(key).is_some(), "probe entry missing {key}: {p}");
        }
    }
}
