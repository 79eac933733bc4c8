//! End-to-end tests of the `regen-lil` binary: exit codes, stdout table
//! shapes, persisted file pairs, replay round-trips, and seed/worker
//! determinism. Each test spawns the compiled binary, so these double as
//! smoke tests of the documented command lines.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_regen-lil"))
        .args(args)
        .output()
        .expect("failed to spawn regen-lil")
}

fn run_with_env(args: &[&str], key: &str, value: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_regen-lil"))
        .args(args)
        .env(key, value)
        .output()
        .expect("failed to spawn regen-lil")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("process terminated by signal")
}

/// Fresh scratch directory under the system temp dir, unique per test name.
fn scratch(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("regen-lil-cli-{}-{tag}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

const GAMMA: &str = "kind=gamma theta=1 lambda=1";
const GAMMALIKE: &str = "kind=gammalike theta=1 lambda=1";

#[test]
fn help_and_version_exit_zero() {
    let help = run(&["--help"]);
    assert_eq!(exit_code(&help), 0);
    let text = stdout(&help);
    for sub in ["phi-table", "clt", "lil", "bm-lil", "validate", "replay"] {
        assert!(text.contains(sub), "--help does not list `{sub}`");
    }
    let version = run(&["--version"]);
    assert_eq!(exit_code(&version), 0);
    assert!(stdout(&version).contains("regen-lil"));
}

#[test]
fn usage_errors_exit_one() {
    let unknown = run(&["--no-such-flag"]);
    assert_eq!(exit_code(&unknown), 1);
    let missing = run(&["clt", "--n", "100", "--reps", "5"]);
    assert_eq!(exit_code(&missing), 1, "missing --model must be a usage error");
    assert!(stderr(&missing).contains("--model"));
}

#[test]
fn zero_replicates_rejected_with_flag_name() {
    let out_base = scratch("reps0").join("run");
    let out = run(&[
        "clt", "--model", GAMMA, "--n", "100", "--reps", "0",
        "--out", out_base.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 1);
    assert!(
        stderr(&out).contains("--reps"),
        "error should name the offending flag: {}",
        stderr(&out)
    );
}

#[test]
fn bad_value_lists_rejected() {
    let reversed = run(&["phi-table", "--model", GAMMA, "--t", "geo:5:1:3"]);
    assert_eq!(exit_code(&reversed), 1);
    assert!(stderr(&reversed).contains("geometric range"));
    let negative = run(&["phi-table", "--model", GAMMA, "--t", "10,-3"]);
    assert_eq!(exit_code(&negative), 1);
}

/// Φ(10⁶) landmarks: log t − log λ for the Gamma family (13.81551…) and
/// log t − Ψ(1) = log t + γ for the GammaLike family (14.39273…).
#[test]
fn phi_table_hits_reference_values() {
    let gamma = run(&["phi-table", "--model", GAMMA, "--t", "1e6"]);
    assert_eq!(exit_code(&gamma), 0);
    let text = stdout(&gamma);
    assert!(text.starts_with("t,phi,phi_log_derivative,asymptote,residual"));
    assert!(text.contains("13.81551"), "Gamma Φ(1e6) row missing: {text}");

    let gl = run(&["phi-table", "--model", GAMMALIKE, "--t", "1e6"]);
    assert_eq!(exit_code(&gl), 0);
    assert!(stdout(&gl).contains("14.39273"), "GammaLike Φ(1e6) row missing");
}

#[test]
fn phi_table_geometric_list_expands() {
    let out = run(&["phi-table", "--model", GAMMA, "--t", "geo:1e2:1e6:3"]);
    assert_eq!(exit_code(&out), 0);
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4, "header + 3 rows expected: {text}");
    assert!(lines[1].starts_with("100,"));
    assert!(lines[2].starts_with("10000,"));
    assert!(lines[3].starts_with("1000000,"));
}

#[test]
fn clt_persists_manifest_csv_pair_and_is_seed_deterministic() {
    let dir = scratch("clt");
    let base_a = dir.join("a");
    let base_b = dir.join("b");
    for base in [&base_a, &base_b] {
        let out = run(&[
            "clt", "--model", GAMMALIKE, "--n", "50,200", "--reps", "20",
            "--seed", "7", "--out", base.to_str().unwrap(),
        ]);
        assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));
        assert!(stdout(&out).starts_with("n,mean,variance,ks_distance,ks_pass_1pct"));
        assert!(base.with_extension("manifest").exists());
        assert!(base.with_extension("csv").exists());
    }
    let csv_a = fs::read(base_a.with_extension("csv")).unwrap();
    let csv_b = fs::read(base_b.with_extension("csv")).unwrap();
    assert_eq!(csv_a, csv_b, "same seed must give byte-identical CSVs");

    let other_seed = run(&[
        "clt", "--model", GAMMALIKE, "--n", "50,200", "--reps", "20",
        "--seed", "8", "--out", dir.join("c").to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&other_seed), 0);
    let csv_c = fs::read(dir.join("c").with_extension("csv")).unwrap();
    assert_ne!(csv_a, csv_c, "different seeds should not collide");
}

#[test]
fn worker_count_env_does_not_change_bytes() {
    let dir = scratch("workers");
    let base_1 = dir.join("w1");
    let base_2 = dir.join("w2");
    let run_at = |base: &PathBuf, threads: &str| {
        run_with_env(
            &[
                "clt", "--model", GAMMALIKE, "--n", "100,400", "--reps", "25",
                "--seed", "11", "--out", base.to_str().unwrap(),
            ],
            "REGEN_LIL_THREADS",
            threads,
        )
    };
    let out1 = run_at(&base_1, "1");
    assert_eq!(exit_code(&out1), 0, "stderr: {}", stderr(&out1));
    let out2 = run_at(&base_2, "2");
    assert_eq!(exit_code(&out2), 0, "stderr: {}", stderr(&out2));
    assert_eq!(
        fs::read(base_1.with_extension("csv")).unwrap(),
        fs::read(base_2.with_extension("csv")).unwrap(),
        "worker count leaked into the output bytes"
    );
}

#[test]
fn lil_reports_extremes_and_histogram() {
    let dir = scratch("lil");
    let base = dir.join("run");
    let out = run(&[
        "lil", "--model", GAMMALIKE, "--nmax", "3000", "--reps", "8",
        "--seed", "3", "--out", base.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("# normalization_constant_note"));
    assert!(text.contains("running_min,"));
    assert!(text.contains("running_max,"));
    assert!(text.contains("bin_center,count"));
    assert!(base.with_extension("manifest").exists());
    assert!(base.with_extension("csv").exists());
}

#[test]
fn replay_round_trips_byte_for_byte() {
    let dir = scratch("replay");
    let base = dir.join("run");
    let produce = run(&[
        "clt", "--model", GAMMA, "--n", "50,150", "--reps", "15",
        "--seed", "21", "--out", base.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&produce), 0, "stderr: {}", stderr(&produce));
    let manifest = base.with_extension("manifest");
    let replay = run(&["replay", "--manifest", manifest.to_str().unwrap()]);
    assert_eq!(exit_code(&replay), 0, "stderr: {}", stderr(&replay));
    assert!(
        stdout(&replay).contains("byte-for-byte"),
        "replay verdict missing: {}",
        stdout(&replay)
    );
    assert!(base.with_extension("replay.csv").exists());
}

#[test]
fn replay_flags_tampered_results() {
    let dir = scratch("tamper");
    let base = dir.join("run");
    let produce = run(&[
        "clt", "--model", GAMMA, "--n", "60", "--reps", "10",
        "--seed", "2", "--out", base.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&produce), 0);
    let csv_path = base.with_extension("csv");
    let mut tampered = fs::read_to_string(&csv_path).unwrap();
    tampered.push_str("# appended after the fact\n");
    fs::write(&csv_path, tampered).unwrap();
    let replay = run(&["replay", "--manifest", base.with_extension("manifest").to_str().unwrap()]);
    assert_eq!(exit_code(&replay), 2, "tampered CSV must yield the validation exit code");
    assert!(stdout(&replay).contains("DIFFERS"));
}

#[test]
fn bm_lil_emits_trajectory_and_extremes() {
    let out = run(&["bm-lil", "--alpha", "1", "--T", "30", "--step", "0.01", "--seed", "4"]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.starts_with("t,convolution"));
    assert!(text.contains("bin_center,count"));
}

/// The full invariant suite on a healthy build: exit 0 and one PASS line per
/// property. This is the slowest CLI test (≈12 s); it doubles as the check
/// that `validate` wires exit code 2 only to failures.
#[test]
fn validate_passes_on_healthy_build() {
    let out = run(&["validate"]);
    assert_eq!(exit_code(&out), 0, "stdout: {}", stdout(&out));
    let text = stdout(&out);
    assert!(text.lines().filter(|l| l.starts_with("PASS ")).count() >= 20);
    assert!(!text.contains("\nFAIL "));
    assert!(text.contains("properties passed"));
}
