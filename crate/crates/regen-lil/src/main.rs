//! Command-line front end: model parsing, experiment launching, tabulation
//! of Φ/centering/normalization, validation-suite runner, and plot-ready
//! data emission (CSV on stdout / persisted CSV + manifest pairs).
//!
//! Exit codes: 0 success, 1 usage error (the offending flag is named),
//! 2 validation failure (a failing property or a replay mismatch).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use regen_lil::brownian_lab::{bm_lil_trajectory, KernelSpec};
use regen_lil::experiment_harness::{
    manifest_from_str, persist, records_to_csv, run_clt_experiment, run_lil_experiment,
    ExperimentKind, ExperimentManifest, RunningExtremes,
};
use regen_lil::levy_models::LevyModel;
use regen_lil::streams::derive_stream;
use regen_lil::validation::run_validation_suite;
use regen_lil::Result;

#[derive(Parser)]
#[command(
    name = "regen-lil",
    version,
    about = "Block counts of regenerative compositions: special functions, exact and pathwise \
             samplers, CLT/LIL-scale Monte Carlo diagnostics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

const MODEL_HELP: &str = "Model descriptor, e.g. \"kind=gamma theta=1 lambda=1\", \
                          \"kind=gammalike theta=2 lambda=0.7\", \"kind=cp jump=exp rate=1\"";

const LIST_HELP: &str = "Comma list (`1e3,1e4`) or geometric range (`geo:1e3:1e6:4`)";

#[derive(Subcommand)]
enum Command {
    /// Tabulate t, Φ(t), φ′(log t), and the digamma-form asymptote (CSV on stdout)
    PhiTable {
        #[arg(long, help = MODEL_HELP)]
        model: String,
        #[arg(long, help = LIST_HELP)]
        t: String,
    },
    /// Run a replicated CLT-scale ensemble; persists CSV + manifest
    Clt {
        #[arg(long, help = MODEL_HELP)]
        model: String,
        #[arg(long, help = LIST_HELP)]
        n: String,
        /// Replicates per grid point
        #[arg(long)]
        reps: u64,
        /// Master seed; fully determines all random output
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output base path (writes <out>.csv and <out>.manifest)
        #[arg(long, default_value = "clt_run")]
        out: PathBuf,
    },
    /// Run coupled LIL-scale trajectories; persists CSV + manifest
    Lil {
        #[arg(long, help = MODEL_HELP)]
        model: String,
        /// Largest sample size (Gamma/GammaLike) or poissonization time (cp)
        #[arg(long)]
        nmax: f64,
        /// Truncation level ε for pathwise simulation (Gamma/GammaLike only;
        /// picked automatically when omitted)
        #[arg(long)]
        eps: Option<f64>,
        /// Trajectories to simulate
        #[arg(long, default_value_t = 64)]
        reps: u64,
        /// Master seed; fully determines all random output
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output base path (writes <out>.csv and <out>.manifest)
        #[arg(long, default_value = "lil_run")]
        out: PathBuf,
    },
    /// One Brownian convolution trajectory under LIL normalization
    BmLil {
        /// Kernel exponent α in f(x) = x^α
        #[arg(long)]
        alpha: f64,
        /// Time horizon
        #[arg(long = "T")]
        t_max: f64,
        /// Simulation step
        #[arg(long)]
        step: f64,
        /// Master seed; fully determines all random output
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run the named invariant suite; one PASS/FAIL line per property
    Validate,
    /// Re-execute a persisted manifest and compare against its CSV
    Replay {
        /// Path to a `.manifest` file written by `clt` or `lil`
        #[arg(long)]
        manifest: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap reserves exit code 2 for usage problems; this tool keeps 2
            // for validation failures and reports usage errors with 1.
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::PhiTable { model, t } => phi_table(&model, &t),
        Command::Clt { model, n, reps, seed, out } => clt(&model, &n, reps, seed, &out),
        Command::Lil { model, nmax, eps, reps, seed, out } => {
            lil(&model, nmax, eps, reps, seed, &out)
        }
        Command::BmLil { alpha, t_max, step, seed } => bm_lil(alpha, t_max, step, seed),
        Command::Validate => validate(),
        Command::Replay { manifest } => replay(&manifest),
    }
}

/// Parse `1e3,1e4,...` or `geo:A:B:COUNT` into a positive, finite list.
fn parse_value_list(text: &str) -> Result<Vec<f64>> {
    use regen_lil::Error;
    let bad = |msg: String| Error::Parse(msg);
    let values: Vec<f64> = if let Some(rest) = text.strip_prefix("geo:") {
        let parts: Vec<&str> = rest.split(':').collect();
        if parts.len() != 3 {
            return Err(bad(format!("geometric range needs geo:A:B:COUNT, got `{text}`")));
        }
        let a: f64 = parts[0]
            .parse()
            .map_err(|_| bad(format!("bad range start `{}`", parts[0])))?;
        let b: f64 = parts[1]
            .parse()
            .map_err(|_| bad(format!("bad range end `{}`", parts[1])))?;
        let count: usize = parts[2]
            .parse()
            .map_err(|_| bad(format!("bad range count `{}`", parts[2])))?;
        if !(a > 0.0) || !(b > a) || count < 2 {
            return Err(bad("geometric range needs 0 < A < B and COUNT ≥ 2".into()));
        }
        let ratio = (b / a).powf(1.0 / (count - 1) as f64);
        (0..count)
            .map(|i| if i + 1 == count { b } else { a * ratio.powi(i as i32) })
            .collect()
    } else {
        text.split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<f64>()
                    .map_err(|_| bad(format!("bad numeric list entry `{tok}`")))
            })
            .collect::<Result<_>>()?
    };
    if values.is_empty() || values.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(bad("list entries must be positive and finite".into()));
    }
    Ok(values)
}

fn phi_table(model_desc: &str, t_list: &str) -> Result<ExitCode> {
    let model = LevyModel::parse_descriptor(model_desc)?;
    let ts = parse_value_list(t_list)?;
    println!("t,phi,phi_log_derivative,asymptote,residual");
    for t in ts {
        let phi = model.phi(t)?;
        let slope = model.phi_log_derivative(t.ln())?;
        let asym = model.phi_asymptote(t)?;
        println!("{t},{phi:.5},{slope:.5},{asym:.5},{:.3e}", phi - asym);
    }
    Ok(ExitCode::SUCCESS)
}

fn clt(model_desc: &str, n_list: &str, reps: u64, seed: u64, out: &Path) -> Result<ExitCode> {
    let model = LevyModel::parse_descriptor(model_desc)?;
    let grid = parse_value_list(n_list)?;
    let manifest = ExperimentManifest::new_clt(model, grid, reps, seed)?;
    let output = run_clt_experiment(&manifest)?;
    let (man_path, csv_path) = persist(&manifest, &output.records, &output.metadata, out)?;
    println!("n,mean,variance,ks_distance,ks_pass_1pct");
    for row in &output.summary {
        let (ks, pass) = match (row.ks_distance, row.ks_pass_1pct) {
            (Some(d), Some(p)) => (format!("{d:.5}"), p.to_string()),
            _ => ("NA".into(), "NA".into()),
        };
        println!("{},{:.5},{:.5},{ks},{pass}", row.n, row.mean, row.variance);
    }
    eprintln!("wrote {} and {}", man_path.display(), csv_path.display());
    Ok(ExitCode::SUCCESS)
}

/// Geometric checkpoint grid ending exactly at `nmax`. Family models need
/// integer sample sizes above e^e; poissonization times only need t > e.
fn lil_grid(model: &LevyModel, nmax: f64) -> Result<Vec<f64>> {
    use regen_lil::levy_models::ModelKind;
    let integer_sizes = model.kind() != ModelKind::CompoundPoisson;
    let start = if integer_sizes { 16.0 } else { 4.0 };
    if nmax <= start {
        return Ok(vec![nmax]);
    }
    let count = 12usize;
    let ratio = (nmax / start).powf(1.0 / (count - 1) as f64);
    let mut grid: Vec<f64> = Vec::with_capacity(count);
    for i in 0..count {
        let mut v = if i + 1 == count { nmax } else { start * ratio.powi(i as i32) };
        if integer_sizes {
            v = v.round();
        }
        if grid.last().map_or(true, |&last| v > last) {
            grid.push(v);
        }
    }
    Ok(grid)
}

fn lil(
    model_desc: &str,
    nmax: f64,
    eps: Option<f64>,
    reps: u64,
    seed: u64,
    out: &Path,
) -> Result<ExitCode> {
    let model = LevyModel::parse_descriptor(model_desc)?;
    let grid = lil_grid(&model, nmax)?;
    let manifest = ExperimentManifest::new_lil(model, grid, reps, seed, eps)?;
    let output = run_lil_experiment(&manifest)?;
    let (man_path, csv_path) = persist(&manifest, &output.records, &output.metadata, out)?;
    for (key, value) in &output.metadata {
        println!("# {key} = {value}");
    }
    print_extremes(&output.extremes);
    eprintln!("wrote {} and {}", man_path.display(), csv_path.display());
    Ok(ExitCode::SUCCESS)
}

fn print_extremes(extremes: &RunningExtremes) {
    println!(
        "running_min,{:.5}\nrunning_max,{:.5}\nobservations,{}\ncoverage,{:.3}",
        extremes.running_min(),
        extremes.running_max(),
        extremes.count(),
        extremes.coverage()
    );
    println!("bin_center,count");
    for (i, count) in extremes.histogram().iter().enumerate() {
        println!("{:.2},{count}", -1.0 + i as f64 * 0.05);
    }
}

fn bm_lil(alpha: f64, t_max: f64, step: f64, seed: u64) -> Result<ExitCode> {
    let kernel = KernelSpec::power(alpha)?;
    let mut rng = derive_stream(seed, "bm-lil", 0);
    let trajectory = bm_lil_trajectory(&kernel, t_max, step, &mut rng)?;
    println!("t,convolution");
    for (t, value) in &trajectory.samples {
        println!("{t:.5},{value:.5}");
    }
    print_extremes(&trajectory.extremes);
    Ok(ExitCode::SUCCESS)
}

fn validate() -> Result<ExitCode> {
    let results = run_validation_suite();
    let mut failures = 0u32;
    for r in &results {
        let tag = if r.passed { "PASS" } else { "FAIL" };
        println!("{tag} {} — {}", r.name, r.detail);
        failures += u32::from(!r.passed);
    }
    if failures > 0 {
        println!("{failures} of {} properties failed", results.len());
        return Ok(ExitCode::from(2));
    }
    println!("all {} properties passed", results.len());
    Ok(ExitCode::SUCCESS)
}

fn replay(manifest_path: &Path) -> Result<ExitCode> {
    let manifest = manifest_from_str(&std::fs::read_to_string(manifest_path)?)?;
    let (records, metadata) = match manifest.kind() {
        ExperimentKind::Clt => {
            let out = run_clt_experiment(&manifest)?;
            (out.records, out.metadata)
        }
        _ => {
            let out = run_lil_experiment(&manifest)?;
            (out.records, out.metadata)
        }
    };
    let replayed = records_to_csv(&records, &metadata);
    let csv_path = manifest_path.with_extension("csv");
    let replay_path = manifest_path.with_extension("replay.csv");
    std::fs::write(&replay_path, &replayed)?;
    eprintln!("wrote {}", replay_path.display());
    if csv_path.exists() {
        if std::fs::read_to_string(&csv_path)? == replayed {
            println!("replay matches {} byte-for-byte", csv_path.display());
        } else {
            println!("replay DIFFERS from {}", csv_path.display());
            return Ok(ExitCode::from(2));
        }
    }
    Ok(ExitCode::SUCCESS)
}
