//! End-to-end tests of the `virial` binary: spawn it, parse its output, and
//! cross-check values against the library called directly.

use std::io::Write;
use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;
use virial_core::graph::enumerate_d;
use virial_core::numerics::{kernel_hat_reduced, QuadratureSpec};
use virial_core::oracle::{limit_pair_correlation, tonks_partition_function};
use virial_core::potential::{Beta, PairPotential};
use virial_core::series::correlation;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_virial"))
}

fn run(args: &[&str]) -> (i32, String) {
    let out = bin().args(args).output().expect("binary runs");
    let code = out.status.code().expect("binary exits normally");
    assert!(
        out.stderr.is_empty(),
        "unexpected stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    (code, String::from_utf8(out.stdout).expect("utf-8 stdout"))
}

fn run_ok(args: &[&str]) -> String {
    let (code, stdout) = run(args);
    assert_eq!(code, 0, "nonzero exit; stdout:\n{stdout}");
    stdout
}

fn json(stdout: &str) -> Value {
    serde_json::from_str(stdout).expect("stdout is JSON")
}

fn rods_config(dir: &tempfile::TempDir) -> PathBuf {
    let path = dir.path().join("rods.toml");
    let mut f = std::fs::File::create(&path).unwrap();
    writeln!(
        f,
        "beta = 1.0\nseed = 7\n\n[potential]\nkind = \"hard-core\"\ndiameter = 1.0\n\n[quadrature]\ndimension = 1\nmode = \"grid\"\npoints_per_panel = 6\n"
    )
    .unwrap();
    path
}

fn rods() -> PairPotential {
    PairPotential::HardCore { diameter: 1.0 }
}

#[test]
fn correlate_matches_library() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = rods_config(&dir);
    let out = run_ok(&[
        "--config",
        cfg.to_str().unwrap(),
        "correlate",
        "--eta",
        "-0.6,0.6",
        "--rho",
        "0.05",
        "--nmax",
        "2",
    ]);
    let v = json(&out);
    assert_eq!(v["command"], "correlate");
    assert_eq!(v["seed"], 7);
    let got = v["data"]["value"].as_f64().unwrap();

    let spec = QuadratureSpec::grid_1d(6);
    let eta = [[-0.6, 0.0, 0.0], [0.6, 0.0, 0.0]];
    let want = correlation(
        &eta,
        0.05,
        Beta::new(1.0).unwrap(),
        &rods(),
        2,
        &spec,
        200_000,
    )
    .unwrap()
    .value;
    assert!(
        (got - want).abs() <= 1e-12 * want.abs(),
        "binary {got} vs library {want}"
    );
    assert_eq!(v["data"]["terms"].as_array().unwrap().len(), 3);
}

#[test]
fn unknown_config_key_is_named_and_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, "beta = 1.0\n[quadrature]\npoints_per_pannel = 4\n").unwrap();
    let (code, out) = run(&["--config", path.to_str().unwrap(), "counts", "--max-m", "1", "--max-n", "1"]);
    assert_eq!(code, 2);
    let v = json(&out);
    assert_eq!(v["error"]["kind"], "config");
    assert_eq!(v["error"]["key"], "points_per_pannel");
}

#[test]
fn invalid_config_value_is_named_and_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, "beta = -2.0\n").unwrap();
    let (code, out) = run(&["--config", path.to_str().unwrap(), "counts", "--max-m", "1", "--max-n", "1"]);
    assert_eq!(code, 2);
    let v = json(&out);
    assert_eq!(v["error"]["kind"], "config");
    assert_eq!(v["error"]["key"], "beta");
}

#[test]
fn missing_potential_is_a_config_error() {
    let (code, out) = run(&["correlate", "--eta", "0.0", "--rho", "0.1", "--nmax", "1"]);
    assert_eq!(code, 2);
    let v = json(&out);
    assert_eq!(v["error"]["kind"], "config");
    assert_eq!(v["error"]["key"], "potential");
}

#[test]
fn malformed_eta_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = rods_config(&dir);
    let (code, out) = run(&[
        "--config",
        cfg.to_str().unwrap(),
        "correlate",
        "--eta",
        "0.1,zebra",
        "--rho",
        "0.1",
        "--nmax",
        "1",
    ]);
    assert_eq!(code, 2);
    let v = json(&out);
    assert_eq!(v["error"]["kind"], "usage");
    assert_eq!(v["error"]["key"], "--eta");
}

#[test]
fn repeat_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = rods_config(&dir);
    let args = [
        "--config",
        cfg.to_str().unwrap(),
        "correlate",
        "--eta",
        "-0.6,0.6",
        "--rho",
        "0.05",
        "--nmax",
        "2",
    ];
    assert_eq!(run_ok(&args), run_ok(&args));
}

#[test]
fn graphs_enumerate_streams_the_family() {
    let out = run_ok(&["graphs", "enumerate", "--white", "2", "--black", "2"]);
    let family = enumerate_d(2, 2).unwrap();
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), family.members.len());
    for line in lines {
        let v: Value = serde_json::from_str(line).expect("one JSON object per line");
        assert_eq!(v["white"], 2);
        assert_eq!(v["black"], 2);
        assert!(v["edges"].as_array().unwrap().len() >= 2);
    }
}

#[test]
fn counts_csv_has_preamble_and_closed_form_values() {
    let out = run_ok(&["counts", "--max-m", "2", "--max-n", "2"]);
    let mut lines = out.lines();
    let preamble = lines.next().unwrap();
    assert!(preamble.starts_with("# version="));
    assert!(preamble.contains("command=counts"));
    assert!(preamble.contains("config_sha256="));
    assert_eq!(lines.next().unwrap(), "m,n,count");
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 9);
    assert!(rows.contains(&"2,2,36"));
}

#[test]
fn one_white_kernel_is_empty() {
    let out = run_ok(&["kernel", "--white", "1", "--black", "1"]);
    let v = json(&out);
    assert_eq!(v["data"]["term_count"], 0);
    assert_eq!(v["data"]["terms"].as_array().unwrap().len(), 0);
}

#[test]
fn raw_kernel_terms_carry_signs() {
    let out = run_ok(&["kernel", "--white", "1", "--black", "1", "--no-cancel"]);
    let v = json(&out);
    assert_eq!(v["data"]["cancelled"], false);
    let terms = v["data"]["terms"].as_array().unwrap();
    assert!(!terms.is_empty());
    let total: i64 = terms.iter().map(|t| t["sign"].as_i64().unwrap()).sum();
    assert_eq!(total, 0, "signs must cancel for the one-white kernel");
}

#[test]
fn oracle_z_matches_the_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = rods_config(&dir);
    let out = run_ok(&[
        "--config",
        cfg.to_str().unwrap(),
        "oracle",
        "z",
        "--n",
        "4",
        "--half-width",
        "5",
    ]);
    let v = json(&out);
    let got = v["data"]["value"].as_f64().unwrap();
    let want = tonks_partition_function(4, 5.0, 1.0);
    assert!((got - want).abs() <= 1e-10 * want, "{got} vs {want}");
}

#[test]
fn oracle_ks_check_residual_is_tiny() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = rods_config(&dir);
    let out = run_ok(&[
        "--config",
        cfg.to_str().unwrap(),
        "oracle",
        "ks-check",
        "--n",
        "3",
        "--half-width",
        "4",
        "--eta",
        "0.3",
        "--points",
        "4",
    ]);
    let v = json(&out);
    let rel = v["data"]["relative_residual"].as_f64().unwrap();
    assert!(rel <= 1e-10, "relative residual {rel}");
    assert_eq!(v["data"]["bridge_contributions"].as_array().unwrap().len(), 3);
}

#[test]
fn oracle_extrapolate_matches_library() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = rods_config(&dir);
    let out = run_ok(&[
        "--config",
        cfg.to_str().unwrap(),
        "oracle",
        "extrapolate",
        "--rho",
        "0.05",
        "--separation",
        "1.5",
        "--sizes",
        "2,3,4",
    ]);
    let v = json(&out);
    let got = v["data"]["extrapolated"].as_f64().unwrap();
    let want = limit_pair_correlation(&rods(), Beta::new(1.0).unwrap(), 0.05, 1.5, &[2, 3, 4])
        .unwrap()
        .extrapolated;
    assert!((got - want).abs() <= 1e-12 * want.abs(), "{got} vs {want}");
    assert_eq!(v["data"]["samples"].as_array().unwrap().len(), 3);
}

#[test]
fn kernel_hat_matches_library() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = rods_config(&dir);
    let out = run_ok(&[
        "--config",
        cfg.to_str().unwrap(),
        "kernel-hat",
        "--eta",
        "-0.6,0.6",
        "--order",
        "1",
    ]);
    let v = json(&out);
    let got = v["data"]["value"].as_f64().unwrap();
    let spec = QuadratureSpec::grid_1d(6);
    let eta = [[-0.6, 0.0, 0.0], [0.6, 0.0, 0.0]];
    let want = kernel_hat_reduced(&eta, 1, &rods(), Beta::new(1.0).unwrap(), &spec, 200_000)
        .unwrap()
        .value;
    assert!((got - want).abs() <= 1e-12 * want.abs(), "{got} vs {want}");
    assert_eq!(
        v["data"]["family_size"].as_u64().unwrap() as usize,
        v["data"]["per_graph"].as_array().unwrap().len()
    );
}

#[test]
fn sweep_emits_one_row_per_density() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = rods_config(&dir);
    let out = run_ok(&[
        "--config",
        cfg.to_str().unwrap(),
        "sweep",
        "--eta",
        "-0.6,0.6",
        "--rho-grid",
        "0.02:0.06:3",
        "--nmax",
        "1",
        "--with-normalization",
    ]);
    let lines: Vec<&str> = out.lines().collect();
    assert!(lines[0].starts_with("# version="));
    assert_eq!(lines[1], "# dimension=1 mode=grid points_per_panel=6");
    assert_eq!(lines[2], "rho,value,error,q_hat,activity_factor");
    assert_eq!(lines.len(), 6);
    for row in &lines[3..] {
        assert_eq!(row.split(',').count(), 5);
    }
}

#[test]
fn potential_check_reports_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = rods_config(&dir);
    let out = run_ok(&[
        "--config",
        cfg.to_str().unwrap(),
        "potential",
        "check",
        "--dim",
        "1",
        "--n-max",
        "6",
        "--trials",
        "40",
    ]);
    let v = json(&out);
    assert_eq!(v["data"]["potential"]["kind"], "hard-core");
    assert_eq!(v["data"]["regularity_integral"].as_f64().unwrap(), 2.0);
    assert_eq!(v["data"]["stability"]["collapse_suspected"], false);
}

#[test]
fn algebra_check_passes() {
    let out = run_ok(&["algebra-check", "--cases", "40"]);
    let v = json(&out);
    assert_eq!(v["data"]["ok"], true);
    assert_eq!(v["data"]["failures"], 0);
}

#[test]
fn verify_all_passes() {
    let out = run_ok(&["verify", "all"]);
    let v = json(&out);
    assert_eq!(v["data"]["ok"], true);
    let checks = v["data"]["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 6);
    for c in checks {
        assert_eq!(c["ok"], true, "check {} failed: {}", c["name"], c["detail"]);
    }
}

#[test]
fn beta_override_changes_the_config_hash() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = rods_config(&dir);
    let base = run_ok(&["--config", cfg.to_str().unwrap(), "counts", "--max-m", "1", "--max-n", "1"]);
    let overridden = run_ok(&[
        "--config",
        cfg.to_str().unwrap(),
        "--beta",
        "2.0",
        "counts",
        "--max-m",
        "1",
        "--max-n",
        "1",
    ]);
    let hash = |s: &str| {
        s.lines()
            .next()
            .unwrap()
            .split_whitespace()
            .find(|w| w.starts_with("config_sha256="))
            .unwrap()
            .to_string()
    };
    assert_ne!(hash(&base), hash(&overridden));
}
