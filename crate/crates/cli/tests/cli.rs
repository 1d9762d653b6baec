//! End-to-end checks of the command-line interface and its exit codes.

use std::process::{Command, Output};

fn gybe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gybe"))
        .args(args)
        .output()
        .expect("spawning the binary")
}

fn write_state(dir: &tempfile::TempDir, name: &str, num_qubits: usize, amps: &[[f64; 2]]) -> String {
    let path = dir.path().join(name);
    let body = serde_json::json!({
        "num_qubits": num_qubits,
        "amplitudes": amps,
    });
    std::fs::write(&path, serde_json::to_string_pretty(&body).unwrap()).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn verify_single_case_json_exit_zero() {
    let out = gybe(&["verify", "--case", "U3", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let parsed: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let report = &parsed.as_array().unwrap()[0];
    assert_eq!(report["case_id"], "U3");
    assert_eq!(report["flags"]["overall"], true);
    let gybe_res = report["gybe_residual"]["value"].as_f64().unwrap();
    assert!(gybe_res < 1e-10);
    // eigenvalues come in two sixteen-fold clusters
    let clusters = report["spectrum"]["value"]["computed"].as_array().unwrap();
    assert_eq!(clusters.len(), 2);
    assert_eq!(clusters[0]["multiplicity"], 16);
}

#[test]
fn verify_unknown_case_is_usage_error() {
    let out = gybe(&["verify", "--case", "NOPE"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("NOPE"));
}

#[test]
fn verify_rejects_unknown_param_before_compute() {
    let out = gybe(&["verify", "--case", "U3", "--param", "zeta=1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_param_override_works() {
    let out = gybe(&["verify", "--case", "6C", "--param", "k=1", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let parsed: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let report = &parsed.as_array().unwrap()[0];
    assert_eq!(report["diagonalizable"]["value"], false);
    assert_eq!(report["slocc"]["value"]["report"]["class"], "w");
}

#[test]
fn classify_w_ghz_and_product_states() {
    let dir = tempfile::tempdir().unwrap();
    let s = 1.0 / 3f64.sqrt();
    let w = write_state(
        &dir,
        "w.json",
        3,
        &[
            [0.0, 0.0],
            [s, 0.0],
            [s, 0.0],
            [0.0, 0.0],
            [s, 0.0],
            [0.0, 0.0],
            [0.0, 0.0],
            [0.0, 0.0],
        ],
    );
    let out = gybe(&["classify", &w, "--format", "json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let parsed: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(parsed["class"], "W");

    let h = 1.0 / 2f64.sqrt();
    let mut amps = vec![[0.0, 0.0]; 8];
    amps[0] = [h, 0.0];
    amps[7] = [h, 0.0];
    let ghz = write_state(&dir, "ghz.json", 3, &amps);
    let out = gybe(&["classify", &ghz, "--format", "json"]);
    let parsed: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(parsed["class"], "Ghz");

    let mut amps = vec![[0.0, 0.0]; 8];
    amps[0] = [1.0, 0.0];
    let zero = write_state(&dir, "zero.json", 3, &amps);
    let out = gybe(&["classify", &zero, "--format", "json"]);
    let parsed: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(parsed["class"], "Product");
}

#[test]
fn classify_malformed_file_is_schema_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\"num_qubits\": 2, \"amplitudes\": [[1,0]]}").unwrap();
    let out = gybe(&["classify", &path.to_string_lossy()]);
    assert_eq!(out.status.code(), Some(3));
    let out = gybe(&["classify", "/nonexistent/state.json"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn search_replays_the_symmetric_point() {
    let out = gybe(&["search", "U3sym", "--start", "0.3"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let parsed: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let alpha = parsed["params"][0][0].as_f64().unwrap();
    assert!((alpha.abs() - 1.0 / 5f64.sqrt()).abs() < 1e-6);
    assert_eq!(parsed["converged"], true);
    assert!(parsed["matched_known_target"]["index"].is_number());
}

#[test]
fn search_unknown_family_is_usage_error() {
    let out = gybe(&["search", "bogus"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn probe_full_pass_on_manifold() {
    let out = gybe(&["probe", "P2", "--samples", "25", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let parsed: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(parsed["passes"], 25);
    assert_eq!(parsed["pass_fraction"], 1.0);
}

#[test]
fn powers_within_tolerance() {
    let out = gybe(&["powers", "+", "--nmax", "12"]);
    assert_eq!(out.status.code(), Some(0));
    let parsed: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(parsed["max_deviation"].as_f64().unwrap() < 1e-10);
    let out = gybe(&["powers", "x"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn spectrum_subcommand_reports_match() {
    let out = gybe(&["spectrum", "6C", "--param", "k=2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let parsed: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(parsed["check"]["matched"], true);
    // scaled eigenvalues 2 * {1, +-7}
    let clusters = parsed["clusters"].as_array().unwrap();
    assert_eq!(clusters.len(), 3);
}

#[test]
fn cases_listing_contains_all_ids() {
    let out = gybe(&["cases"]);
    assert_eq!(out.status.code(), Some(0));
    let parsed: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let ids: Vec<&str> = parsed
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["id"].as_str().unwrap())
        .collect();
    for want in [
        "5A-i", "5A-ii", "5B", "5C", "5D", "6A", "6B", "6C", "7A", "P1", "P1-phase", "P2",
        "P2-W", "P2-phase", "U3", "Un",
    ] {
        assert!(ids.contains(&want), "missing {want}");
    }
}

#[test]
fn markdown_and_csv_render() {
    let out = gybe(&["verify", "--case", "P2-W", "--format", "markdown"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("| P2-W |"));
    let out = gybe(&["verify", "--case", "P2-W", "--format", "csv"]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.lines().count() >= 2);
    assert!(text.starts_with("case,"));
}

#[test]
fn impossible_tolerance_is_reported_as_mismatch() {
    // demanding a residual below what floating point can deliver flips the
    // claim comparison and must exit 1
    let out = gybe(&["verify", "--case", "U3", "--tol", "1e-18"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn parallel_jobs_produce_identical_reports() {
    let run = |jobs: &str| {
        gybe(&[
            "verify", "--case", "P1", "--case", "P2-W", "--format", "json", "--jobs", jobs,
        ])
    };
    let a = run("1");
    let b = run("2");
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn seeded_single_case_json_is_byte_identical() {
    let run = || gybe(&["verify", "--case", "6B", "--format", "json", "--seed", "7"]);
    let a = run();
    let b = run();
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}
