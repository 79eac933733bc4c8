//! Reproducible Monte Carlo experiments: CLT-scale verification, coupled LIL
//! trajectory diagnostics, Kolmogorov–Smirnov tests, manifests, persistence.
//!
//! Every replicate draws from its own counter-derived random stream, a pure
//! function of (master seed, experiment kind, replicate index), so identical
//! manifests give byte-identical result tables regardless of worker count or
//! scheduling.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;

use crate::composition_engine::{
    cp_centering, cp_coupled_counts, cp_normalization, sample_composition, truncation_bias_bound,
    PathwiseKn,
};
use crate::error::{Error, Result};
use crate::levy_models::{JumpDist, LevyModel, ModelKind, NormalizationVariant, EXP_E};
use crate::special_math::normal_cdf;
use crate::streams::derive_stream;

/// Version tag written into every manifest; bumped on format changes.
pub const SCHEMA_VERSION: u32 = 1;

/// Coverage grid resolution: 41 points spanning [−1, 1] with spacing 0.05.
pub const COVERAGE_BINS: usize = 41;

const COVERAGE_TOLERANCE: f64 = 0.05;

/// Kind of experiment a manifest configures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    Clt,
    Lil,
    BmLil,
    Validate,
}

impl ExperimentKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentKind::Clt => "clt",
            ExperimentKind::Lil => "lil",
            ExperimentKind::BmLil => "bm_lil",
            ExperimentKind::Validate => "validate",
        }
    }
}

impl std::fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "clt" => Ok(ExperimentKind::Clt),
            "lil" => Ok(ExperimentKind::Lil),
            "bm_lil" => Ok(ExperimentKind::BmLil),
            "validate" => Ok(ExperimentKind::Validate),
            other => Err(Error::Parse(format!("unknown experiment kind `{other}`"))),
        }
    }
}

/// Full, replayable description of an experiment. Two manifests with equal
/// fields produce bitwise-identical outputs.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentManifest {
    kind: ExperimentKind,
    model: LevyModel,
    n_grid: Vec<f64>,
    replicates: u64,
    master_seed: u64,
    epsilon: Option<f64>,
    schema_version: u32,
}

impl ExperimentManifest {
    /// Manifest for a CLT ensemble over an n-grid (Gamma/GammaLike models).
    pub fn new_clt(
        model: LevyModel,
        n_grid: Vec<f64>,
        replicates: u64,
        master_seed: u64,
    ) -> Result<Self> {
        let man = ExperimentManifest {
            kind: ExperimentKind::Clt,
            model,
            n_grid,
            replicates,
            master_seed,
            epsilon: None,
            schema_version: SCHEMA_VERSION,
        };
        man.validate()?;
        Ok(man)
    }

    /// Manifest for coupled LIL trajectories (n-grid for the families, t-grid
    /// for the compound-Poisson approximation). `epsilon = None` auto-selects
    /// the truncation level.
    pub fn new_lil(
        model: LevyModel,
        n_grid: Vec<f64>,
        replicates: u64,
        master_seed: u64,
        epsilon: Option<f64>,
    ) -> Result<Self> {
        let man = ExperimentManifest {
            kind: ExperimentKind::Lil,
            model,
            n_grid,
            replicates,
            master_seed,
            epsilon,
            schema_version: SCHEMA_VERSION,
        };
        man.validate()?;
        Ok(man)
    }

    pub fn kind(&self) -> ExperimentKind {
        self.kind
    }

    pub fn model(&self) -> &LevyModel {
        &self.model
    }

    pub fn n_grid(&self) -> &[f64] {
        &self.n_grid
    }

    pub fn replicates(&self) -> u64 {
        self.replicates
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn epsilon(&self) -> Option<f64> {
        self.epsilon
    }

    pub fn schema_version(&self) -> u32 {
        self.schema_version
    }

    /// Kind-specific structural checks (grid shape, replicate count, model
    /// compatibility). Run functions call this before touching any RNG.
    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(Error::Config(
                "replicates must be ≥ 1 (set --reps to a positive count)".into(),
            ));
        }
        if self.n_grid.is_empty() {
            return Err(Error::Config("the grid must not be empty".into()));
        }
        let mut prev = 0.0;
        for &n in &self.n_grid {
            if !(n.is_finite() && n > prev) {
                return Err(Error::Config(format!(
                    "grid must be positive and strictly increasing, offending entry {n}"
                )));
            }
            prev = n;
        }
        match self.kind {
            ExperimentKind::Clt => {
                self.model.beta()?; // Gamma/GammaLike only
                for &n in &self.n_grid {
                    if n.fract() != 0.0 || n < 10.0 {
                        return Err(Error::Config(format!(
                            "clt grid entries must be integers ≥ 10, got {n}"
                        )));
                    }
                }
                if self.epsilon.is_some() {
                    return Err(Error::Config(
                        "epsilon applies only to pathwise (lil) experiments".into(),
                    ));
                }
            }
            ExperimentKind::Lil => match self.model.kind() {
                ModelKind::CompoundPoisson => {
                    if self.n_grid[0] <= std::f64::consts::E {
                        return Err(Error::Config(format!(
                            "compound-Poisson t-grid entries must exceed e, got {}",
                            self.n_grid[0]
                        )));
                    }
                    if self.epsilon.is_some() {
                        return Err(Error::Config(
                            "epsilon does not apply to the compound-Poisson approximation run"
                                .into(),
                        ));
                    }
                }
                _ => {
                    for &n in &self.n_grid {
                        if n.fract() != 0.0 || n <= EXP_E {
                            return Err(Error::Config(format!(
                                "lil n-grid entries must be integers > e^e ≈ 15.15, got {n}"
                            )));
                        }
                    }
                    if let Some(eps) = self.epsilon {
                        if !(eps > 0.0) || !eps.is_finite() {
                            return Err(Error::Config(format!(
                                "epsilon must be positive, got {eps}"
                            )));
                        }
                    }
                }
            },
            ExperimentKind::BmLil | ExperimentKind::Validate => {
                return Err(Error::UnsupportedKind(format!(
                    "manifests of kind `{}` are not runnable through the Monte Carlo harness",
                    self.kind
                )));
            }
        }
        Ok(())
    }
}

/// One output row: a raw statistic with its centering/normalization and the
/// stream that produced it. `normalized = (raw − centering)/normalization`
/// exactly as computed.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRecord {
    pub n: f64,
    pub raw: f64,
    pub centering: f64,
    pub normalization: f64,
    pub normalized: f64,
    pub replicate: u64,
    pub stream_id: u64,
}

/// Running extremes of a normalized trajectory plus a coverage histogram
/// over the candidate cluster set [−1, 1] (41 grid points, spacing 0.05;
/// a grid point counts as visited when some observation lands within 0.05).
#[derive(Debug, Clone, PartialEq)]
pub struct RunningExtremes {
    running_max: f64,
    running_min: f64,
    count: u64,
    histogram: [u64; COVERAGE_BINS],
    visited: [bool; COVERAGE_BINS],
}

impl Default for RunningExtremes {
    fn default() -> Self {
        Self::new()
    }
}

impl RunningExtremes {
    pub fn new() -> Self {
        RunningExtremes {
            running_max: f64::NEG_INFINITY,
            running_min: f64::INFINITY,
            count: 0,
            histogram: [0; COVERAGE_BINS],
            visited: [false; COVERAGE_BINS],
        }
    }

    /// Fold in one observation: max/min update, histogram bin (clamped to
    /// the edge bins beyond ±1), visited marks within the 0.05 tolerance.
    pub fn observe(&mut self, value: f64) {
        if value.is_nan() {
            return;
        }
        self.count += 1;
        self.running_max = self.running_max.max(value);
        self.running_min = self.running_min.min(value);
        if value.is_infinite() {
            return;
        }
        let bin = ((value.clamp(-1.0, 1.0) + 1.0) / COVERAGE_TOLERANCE).round() as usize;
        self.histogram[bin.min(COVERAGE_BINS - 1)] += 1;
        for (i, slot) in self.visited.iter_mut().enumerate() {
            let grid_point = -1.0 + COVERAGE_TOLERANCE * i as f64;
            if (value - grid_point).abs() <= COVERAGE_TOLERANCE + 1e-12 {
                *slot = true;
            }
        }
    }

    /// Largest observation so far (−∞ before any observation).
    pub fn running_max(&self) -> f64 {
        self.running_max
    }

    /// Smallest observation so far (+∞ before any observation).
    pub fn running_min(&self) -> f64 {
        self.running_min
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn histogram(&self) -> &[u64; COVERAGE_BINS] {
        &self.histogram
    }

    /// Fraction of the [−1, 1] grid visited within tolerance.
    pub fn coverage(&self) -> f64 {
        self.visited.iter().filter(|&&v| v).count() as f64 / COVERAGE_BINS as f64
    }
}

/// Per-grid-point ensemble summary of a CLT run. The KS fields are present
/// once the ensemble is large enough for the asymptotic test (N ≥ 20 and a
/// nondegenerate spread).
#[derive(Debug, Clone)]
pub struct CltSummaryRow {
    pub n: f64,
    pub mean: f64,
    pub variance: f64,
    pub ks_distance: Option<f64>,
    pub ks_pass_1pct: Option<bool>,
}

/// Output of a CLT experiment: the full record table (grid-major, replicate
/// order within each grid point) and per-n summaries.
#[derive(Debug, Clone)]
pub struct CltOutput {
    pub records: Vec<ResultRecord>,
    pub summary: Vec<CltSummaryRow>,
    pub metadata: Vec<(String, String)>,
}

/// Output of a LIL experiment: trajectory records (replicate-major, grid
/// order within each trajectory), pooled running extremes, and the metadata
/// notes that accompany every persisted copy.
#[derive(Debug, Clone)]
pub struct LilOutput {
    pub records: Vec<ResultRecord>,
    pub extremes: RunningExtremes,
    pub metadata: Vec<(String, String)>,
}

/// Worker-pool size: `REGEN_LIL_THREADS` when set (positive integer),
/// otherwise the machine parallelism.
pub fn worker_count_from_env() -> Result<usize> {
    match std::env::var("REGEN_LIL_THREADS") {
        Ok(raw) => match raw.trim().parse::<usize>() {
            Ok(w) if w >= 1 => Ok(w),
            _ => Err(Error::Config(format!(
                "REGEN_LIL_THREADS must be a positive integer, got `{raw}`"
            ))),
        },
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |p| p.get())),
    }
}

fn build_pool(workers: usize) -> Result<rayon::ThreadPool> {
    if workers == 0 {
        return Err(Error::Config("worker count must be ≥ 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("worker pool setup failed: {e}")))
}

fn assert_unique_streams(records: &[ResultRecord], per_stream_rows: usize) -> Result<()> {
    let ids: HashSet<u64> = records.iter().map(|r| r.stream_id).collect();
    if ids.len() * per_stream_rows != records.len() {
        return Err(Error::Config(
            "internal error: stream ids reused across replicates".into(),
        ));
    }
    Ok(())
}

/// Run a CLT experiment with the environment-selected worker count.
pub fn run_clt_experiment(manifest: &ExperimentManifest) -> Result<CltOutput> {
    run_clt_experiment_with_workers(manifest, worker_count_from_env()?)
}

/// Z_n = (K_n − centering(n)) / clt_normalization(n) for every grid point
/// and replicate, K_n drawn by the exact decrement sampler. Replicate
/// (grid_idx, rep) uses the stream with id `grid_idx·R + rep`; the record
/// table is ordered by (grid_idx, rep) independent of the worker count.
pub fn run_clt_experiment_with_workers(
    manifest: &ExperimentManifest,
    workers: usize,
) -> Result<CltOutput> {
    if manifest.kind != ExperimentKind::Clt {
        return Err(Error::Config(format!(
            "run_clt_experiment needs a clt manifest, got kind `{}`",
            manifest.kind
        )));
    }
    manifest.validate()?;
    let model = &manifest.model;
    let reps = manifest.replicates;
    let beta = model.beta()?;
    let limit_variance = 1.0 / (2.0 * beta + 1.0);

    // Centering/normalization are deterministic per grid point; compute once.
    let mut grid_constants = Vec::with_capacity(manifest.n_grid.len());
    for &nf in &manifest.n_grid {
        let n = nf as u64;
        grid_constants.push((
            n,
            model.centering(nf)?,
            model.theorem_normalization(nf, NormalizationVariant::Clt)?,
        ));
    }

    let jobs: Vec<(usize, u64)> = (0..manifest.n_grid.len())
        .flat_map(|gi| (0..reps).map(move |rep| (gi, rep)))
        .collect();
    let pool = build_pool(workers)?;
    let seed = manifest.master_seed;
    let records: Vec<ResultRecord> = pool.install(|| {
        jobs.par_iter()
            .map(|&(gi, rep)| {
                let (n, centering, normalization) = grid_constants[gi];
                let stream_id = gi as u64 * reps + rep;
                let mut rng = derive_stream(seed, "clt", stream_id);
                let raw = sample_composition(model, n, &mut rng)?.k() as f64;
                let normalized = (raw - centering) / normalization;
                Ok(ResultRecord {
                    n: n as f64,
                    raw,
                    centering,
                    normalization,
                    normalized,
                    replicate: rep,
                    stream_id,
                })
            })
            .collect::<Result<Vec<_>>>()
    })?;
    assert_unique_streams(&records, 1)?;

    let mut summary = Vec::with_capacity(manifest.n_grid.len());
    for (gi, &nf) in manifest.n_grid.iter().enumerate() {
        let slice = &records[gi * reps as usize..(gi + 1) * reps as usize];
        let vals: Vec<f64> = slice.iter().map(|r| r.normalized).collect();
        let mean = vals.iter().sum::<f64>() / vals.len() as f64;
        let variance = if vals.len() > 1 {
            vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (vals.len() - 1) as f64
        } else {
            0.0
        };
        let (ks_distance, ks_pass_1pct) = match ks_statistic(&vals, limit_variance) {
            Ok((d, pass)) => (Some(d), Some(pass)),
            Err(_) => (None, None),
        };
        summary.push(CltSummaryRow { n: nf, mean, variance, ks_distance, ks_pass_1pct });
    }

    Ok(CltOutput {
        records,
        summary,
        metadata: vec![("limit_variance".into(), fmt_value(limit_variance))],
    })
}

/// Run a LIL experiment with the environment-selected worker count.
pub fn run_lil_experiment(manifest: &ExperimentManifest) -> Result<LilOutput> {
    run_lil_experiment_with_workers(manifest, worker_count_from_env()?)
}

/// Coupled LIL trajectories. Gamma/GammaLike models walk one ε-truncated
/// pathwise realization per replicate through the whole n-grid and normalize
/// K_n on the iterated-logarithm scale; compound-Poisson models instead run
/// the approximation sum along the t-grid on the passage-time scale. All
/// normalized outputs are diagnostics (the loglog scale is unreachable at
/// desk scale), flagged as such in the metadata.
pub fn run_lil_experiment_with_workers(
    manifest: &ExperimentManifest,
    workers: usize,
) -> Result<LilOutput> {
    if manifest.kind != ExperimentKind::Lil {
        return Err(Error::Config(format!(
            "run_lil_experiment needs a lil manifest, got kind `{}`",
            manifest.kind
        )));
    }
    manifest.validate()?;
    let model = &manifest.model;
    let reps = manifest.replicates;
    let seed = manifest.master_seed;
    let pool = build_pool(workers)?;

    let mut metadata: Vec<(String, String)> = vec![
        ("diagnostic".into(), "true".into()),
        (
            "normalization_constant_note".into(),
            "the (2beta+1)^{-1} factor stays inside the square root; quoting the constant as \
             sigma^2 mu^{-3} alone overstates the normalization by sqrt(2beta+1) (sqrt(3) at \
             beta = 1)"
                .into(),
        ),
        (
            "passage_time_constant_note".into(),
            "the inverse-path deviation diagnostic uses sigma mu^{-3/2}; the variant constant \
             sigma mu^{-3} is documented, not asserted"
                .into(),
        ),
    ];

    let (records, rows_per_stream) = match model.kind() {
        ModelKind::CompoundPoisson => {
            metadata.push((
                "approximation".into(),
                "block counts realized by the compound-Poisson approximation sum; exact K_n at \
                 n = e^t is out of reach"
                    .into(),
            ));
            metadata.push(("m_convention".into(), "m = E xi (mean jump size)".into()));
            let jump = model.jump_dist().unwrap().clone();
            let t_grid = manifest.n_grid.clone();
            let mut grid_constants = Vec::with_capacity(t_grid.len());
            for &t in &t_grid {
                grid_constants.push((t, cp_centering(&jump, t)?, cp_normalization(&jump, t)?));
            }
            let records: Vec<ResultRecord> = pool.install(|| {
                (0..reps)
                    .into_par_iter()
                    .map(|rep| {
                        let mut rng = derive_stream(seed, "lil-cp", rep);
                        let counts = cp_coupled_counts(&jump, &t_grid, &mut rng)?;
                        Ok(grid_constants
                            .iter()
                            .zip(counts)
                            .map(|(&(t, centering, normalization), count)| {
                                let raw = count as f64;
                                ResultRecord {
                                    n: t,
                                    raw,
                                    centering,
                                    normalization,
                                    normalized: (raw - centering) / normalization,
                                    replicate: rep,
                                    stream_id: rep,
                                }
                            })
                            .collect::<Vec<_>>())
                    })
                    .collect::<Result<Vec<_>>>()
            })?
            .into_iter()
            .flatten()
            .collect();
            (records, manifest.n_grid.len())
        }
        _ => {
            let n_max = *manifest.n_grid.last().unwrap() as u64;
            let epsilon = match manifest.epsilon {
                Some(eps) => {
                    let bound = truncation_bias_bound(model, n_max, eps)?;
                    if bound > 0.5 {
                        let suggestion = auto_epsilon(model, n_max, eps)?;
                        return Err(Error::Config(format!(
                            "truncation bias bound {bound:.3} at epsilon = {eps:e} exceeds 0.5; \
                             try epsilon ≤ {suggestion:e}"
                        )));
                    }
                    eps
                }
                None => auto_epsilon(model, n_max, 1e-4)?,
            };
            let bound = truncation_bias_bound(model, n_max, epsilon)?;
            metadata.push(("epsilon".into(), fmt_value(epsilon)));
            metadata.push(("truncation_bias_bound".into(), fmt_value(bound)));

            let grid_u: Vec<u64> = manifest.n_grid.iter().map(|&n| n as u64).collect();
            let mut grid_constants = Vec::with_capacity(grid_u.len());
            for &n in &grid_u {
                grid_constants.push((
                    n,
                    model.centering(n as f64)?,
                    model.theorem_normalization(n as f64, NormalizationVariant::Lil)?,
                ));
            }
            let records: Vec<ResultRecord> = pool.install(|| {
                (0..reps)
                    .into_par_iter()
                    .map(|rep| {
                        let mut rng = derive_stream(seed, "lil", rep);
                        let mut traj = PathwiseKn::new(model, epsilon)?;
                        let mut rows = Vec::with_capacity(grid_u.len());
                        for &(n, centering, normalization) in &grid_constants {
                            while traj.n() < n {
                                traj.extend(&mut rng)?;
                            }
                            let raw = traj.k() as f64;
                            rows.push(ResultRecord {
                                n: n as f64,
                                raw,
                                centering,
                                normalization,
                                normalized: (raw - centering) / normalization,
                                replicate: rep,
                                stream_id: rep,
                            });
                        }
                        Ok(rows)
                    })
                    .collect::<Result<Vec<_>>>()
            })?
            .into_iter()
            .flatten()
            .collect();
            (records, manifest.n_grid.len())
        }
    };
    assert_unique_streams(&records, rows_per_stream)?;
    let mut extremes = RunningExtremes::new();
    for r in &records {
        extremes.observe(r.normalized);
    }
    Ok(LilOutput { records, extremes, metadata })
}

/// Smallest tried ε (halving from `start`) whose truncation bias bound at
/// n_max stays ≤ 0.5.
fn auto_epsilon(model: &LevyModel, n_max: u64, start: f64) -> Result<f64> {
    let mut eps = start;
    for _ in 0..80 {
        if truncation_bias_bound(model, n_max, eps)? <= 0.5 {
            return Ok(eps);
        }
        eps *= 0.5;
    }
    Err(Error::Config(format!(
        "no workable truncation level at or below {start:e}"
    )))
}

/// One-sample Kolmogorov–Smirnov distance to Normal(0, variance) with the
/// asymptotic 1% decision (critical value 1.628/√N). Needs N ≥ 20 and a
/// nondegenerate sample.
pub fn ks_statistic(sample: &[f64], variance: f64) -> Result<(f64, bool)> {
    if sample.len() < 20 {
        return Err(Error::Domain(format!(
            "KS test needs at least 20 observations, got {}",
            sample.len()
        )));
    }
    if !(variance > 0.0) || !variance.is_finite() {
        return Err(Error::Domain(format!("variance must be positive, got {variance}")));
    }
    let mut sorted = sample.to_vec();
    sorted.sort_by(f64::total_cmp);
    if sorted[0] == sorted[sorted.len() - 1] {
        return Err(Error::Domain("degenerate sample: all observations equal".into()));
    }
    let n = sorted.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let f = normal_cdf(x, variance)?;
        d = d.max((f - i as f64 / n).abs()).max((f - (i as f64 + 1.0) / n).abs());
    }
    let critical = 1.628 / n.sqrt();
    Ok((d, d < critical))
}

/// Two-sample KS distance with the asymptotic 1% decision
/// (critical value 1.628·√((n_a+n_b)/(n_a·n_b))).
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<(f64, bool)> {
    if a.len() < 20 || b.len() < 20 {
        return Err(Error::Domain(
            "two-sample KS test needs at least 20 observations per sample".into(),
        ));
    }
    let mut xa = a.to_vec();
    let mut xb = b.to_vec();
    xa.sort_by(f64::total_cmp);
    xb.sort_by(f64::total_cmp);
    let (na, nb) = (xa.len() as f64, xb.len() as f64);
    let mut i = 0;
    let mut j = 0;
    let mut d = 0.0f64;
    // Consume ties across both samples together (the samples here are often
    // integer-valued block counts) so the gap is measured between, not
    // inside, tie groups.
    while i < xa.len() || j < xb.len() {
        let x = match (xa.get(i), xb.get(j)) {
            (Some(&a), Some(&b)) => a.min(b),
            (Some(&a), None) => a,
            (None, Some(&b)) => b,
            (None, None) => break,
        };
        while i < xa.len() && xa[i] == x {
            i += 1;
        }
        while j < xb.len() && xb[j] == x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    let critical = 1.628 * ((na + nb) / (na * nb)).sqrt();
    Ok((d, d < critical))
}

/// Integer-valued floats print as plain integers; everything else in
/// scientific notation with 17 significant digits (exact f64 round trip).
pub fn fmt_value(x: f64) -> String {
    if x == x.trunc() && x.abs() < 9.0e15 {
        format!("{x:.0}")
    } else {
        format!("{x:.16e}")
    }
}

fn base_paths(path: &Path) -> (PathBuf, PathBuf) {
    let base = if path.extension().map_or(false, |e| e == "manifest" || e == "csv") {
        path.with_extension("")
    } else {
        path.to_path_buf()
    };
    (base.with_extension("manifest"), base.with_extension("csv"))
}

/// Serialize a manifest in `key = value` form.
fn manifest_to_string(man: &ExperimentManifest) -> Result<String> {
    let mut out = String::new();
    out.push_str("# experiment manifest\n");
    let _ = writeln!(out, "schema_version = {}", man.schema_version);
    let _ = writeln!(out, "kind = {}", man.kind);
    match man.model.kind() {
        ModelKind::Gamma => {
            let _ = writeln!(out, "model = gamma");
            let _ = writeln!(out, "theta = {}", fmt_value(man.model.theta().unwrap()));
            let _ = writeln!(out, "lambda = {}", fmt_value(man.model.lambda().unwrap()));
        }
        ModelKind::GammaLike => {
            let _ = writeln!(out, "model = gammalike");
            let _ = writeln!(out, "theta = {}", fmt_value(man.model.theta().unwrap()));
            let _ = writeln!(out, "lambda = {}", fmt_value(man.model.lambda().unwrap()));
        }
        ModelKind::CompoundPoisson => {
            let _ = writeln!(out, "model = cp");
            match man.model.jump_dist().unwrap() {
                JumpDist::Exponential { rate } => {
                    let _ = writeln!(out, "jump = exp");
                    let _ = writeln!(out, "rate = {}", fmt_value(*rate));
                }
                JumpDist::Deterministic { value } => {
                    // `rate` carries the deterministic jump size.
                    let _ = writeln!(out, "jump = det");
                    let _ = writeln!(out, "rate = {}", fmt_value(*value));
                }
                JumpDist::Discrete { .. } => {
                    return Err(Error::Config(
                        "discrete jump tables are library-only and cannot be persisted in a \
                         manifest"
                            .into(),
                    ));
                }
            }
        }
    }
    let grid: Vec<String> = man.n_grid.iter().map(|&n| fmt_value(n)).collect();
    let _ = writeln!(out, "n_grid = {}", grid.join(","));
    let _ = writeln!(out, "replicates = {}", man.replicates);
    let _ = writeln!(out, "master_seed = {}", man.master_seed);
    if let Some(eps) = man.epsilon {
        let _ = writeln!(out, "epsilon = {}", fmt_value(eps));
    }
    Ok(out)
}

/// Parse a `key = value` manifest (the exact inverse of persistence).
pub fn manifest_from_str(text: &str) -> Result<ExperimentManifest> {
    const KNOWN: [&str; 11] = [
        "kind",
        "model",
        "theta",
        "lambda",
        "jump",
        "rate",
        "n_grid",
        "replicates",
        "master_seed",
        "epsilon",
        "schema_version",
    ];
    let mut seen: Vec<(String, String)> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Parse(format!("manifest line {} is not `key = value`: `{line}`", lineno + 1))
        })?;
        let key = key.trim();
        let value = value.trim();
        if !KNOWN.contains(&key) {
            return Err(Error::Parse(format!("unknown manifest key `{key}`")));
        }
        if seen.iter().any(|(k, _)| k == key) {
            return Err(Error::Parse(format!("duplicate manifest key `{key}`")));
        }
        seen.push((key.to_string(), value.to_string()));
    }
    let get = |key: &str| seen.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str());
    let require = |key: &str| {
        get(key).ok_or_else(|| Error::Parse(format!("manifest is missing key `{key}`")))
    };

    let version: u32 = require("schema_version")?
        .parse()
        .map_err(|_| Error::Parse("schema_version must be an integer".into()))?;
    if version != SCHEMA_VERSION {
        return Err(Error::SchemaVersion {
            found: version as u64,
            expected: SCHEMA_VERSION as u64,
        });
    }
    let kind: ExperimentKind = require("kind")?.parse()?;
    let parse_f64 = |key: &str, raw: &str| -> Result<f64> {
        raw.parse::<f64>()
            .map_err(|_| Error::Parse(format!("manifest key `{key}` has non-numeric value `{raw}`")))
    };
    let model = match require("model")? {
        "gamma" | "gammalike" => {
            let theta = parse_f64("theta", require("theta")?)?;
            let lambda = parse_f64("lambda", require("lambda")?)?;
            if get("jump").is_some() || get("rate").is_some() {
                return Err(Error::Parse(
                    "jump/rate keys apply only to compound-Poisson manifests".into(),
                ));
            }
            if get("model") == Some("gamma") {
                LevyModel::gamma(theta, lambda)?
            } else {
                LevyModel::gamma_like(theta, lambda)?
            }
        }
        "cp" => {
            if get("theta").is_some() || get("lambda").is_some() {
                return Err(Error::Parse(
                    "theta/lambda keys apply only to gamma/gammalike manifests".into(),
                ));
            }
            let rate = parse_f64("rate", require("rate")?)?;
            match require("jump")? {
                "exp" => LevyModel::compound_poisson(JumpDist::Exponential { rate })?,
                "det" => LevyModel::compound_poisson(JumpDist::Deterministic { value: rate })?,
                other => {
                    return Err(Error::Parse(format!(
                        "unknown jump law `{other}` (expected `exp` or `det`)"
                    )))
                }
            }
        }
        other => return Err(Error::Parse(format!("unknown model `{other}`"))),
    };
    let mut n_grid = Vec::new();
    for piece in require("n_grid")?.split(',') {
        n_grid.push(parse_f64("n_grid", piece.trim())?);
    }
    let replicates: u64 = require("replicates")?
        .parse()
        .map_err(|_| Error::Parse("replicates must be a nonnegative integer".into()))?;
    let master_seed: u64 = require("master_seed")?
        .parse()
        .map_err(|_| Error::Parse("master_seed must be a 64-bit unsigned integer".into()))?;
    let epsilon = match get("epsilon") {
        Some(raw) => Some(parse_f64("epsilon", raw)?),
        None => None,
    };
    let man = ExperimentManifest {
        kind,
        model,
        n_grid,
        replicates,
        master_seed,
        epsilon,
        schema_version: version,
    };
    man.validate()?;
    Ok(man)
}

/// Render records as CSV: optional `# key = value` comment lines, the fixed
/// header, then one row per record with 17-significant-digit floats.
pub fn records_to_csv(records: &[ResultRecord], metadata: &[(String, String)]) -> String {
    let mut out = String::new();
    for (key, value) in metadata {
        let _ = writeln!(out, "# {key} = {value}");
    }
    out.push_str("n,raw,centering,normalization,normalized,replicate,stream_id\n");
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{:.16e},{:.16e},{:.16e},{},{}",
            fmt_value(r.n),
            fmt_value(r.raw),
            r.centering,
            r.normalization,
            r.normalized,
            r.replicate,
            r.stream_id
        );
    }
    out
}

/// Parse [`records_to_csv`] output (comment lines are skipped).
pub fn records_from_csv(text: &str) -> Result<Vec<ResultRecord>> {
    const HEADER: &str = "n,raw,centering,normalization,normalized,replicate,stream_id";
    let mut lines = text.lines().filter(|l| !l.trim_start().starts_with('#'));
    match lines.next() {
        Some(h) if h.trim() == HEADER => {}
        other => {
            return Err(Error::Parse(format!(
                "bad CSV header: expected `{HEADER}`, got `{}`",
                other.unwrap_or("<empty>")
            )))
        }
    }
    let mut records = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(Error::Parse(format!(
                "CSV row {} has {} fields, expected 7",
                lineno + 2,
                fields.len()
            )));
        }
        let f = |i: usize| -> Result<f64> {
            fields[i]
                .trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad float `{}` in CSV row {}", fields[i], lineno + 2)))
        };
        let u = |i: usize| -> Result<u64> {
            fields[i]
                .trim()
                .parse::<u64>()
                .map_err(|_| Error::Parse(format!("bad integer `{}` in CSV row {}", fields[i], lineno + 2)))
        };
        records.push(ResultRecord {
            n: f(0)?,
            raw: f(1)?,
            centering: f(2)?,
            normalization: f(3)?,
            normalized: f(4)?,
            replicate: u(5)?,
            stream_id: u(6)?,
        });
    }
    Ok(records)
}

/// Write `<base>.manifest` and `<base>.csv`; returns the two paths.
pub fn persist(
    manifest: &ExperimentManifest,
    records: &[ResultRecord],
    metadata: &[(String, String)],
    path: &Path,
) -> Result<(PathBuf, PathBuf)> {
    let (man_path, csv_path) = base_paths(path);
    fs::write(&man_path, manifest_to_string(manifest)?)?;
    fs::write(&csv_path, records_to_csv(records, metadata))?;
    Ok((man_path, csv_path))
}

/// Read back a persisted experiment (accepts the base path or either file's
/// path). The manifest's schema version is checked before anything else.
pub fn load(path: &Path) -> Result<(ExperimentManifest, Vec<ResultRecord>)> {
    let (man_path, csv_path) = base_paths(path);
    let manifest = manifest_from_str(&fs::read_to_string(&man_path)?)?;
    let records = records_from_csv(&fs::read_to_string(&csv_path)?)?;
    Ok((manifest, records))
}
