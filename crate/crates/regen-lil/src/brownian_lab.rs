//! Discretized Brownian machinery: path generation, the convolution
//! ∫₀ᵗ B(t−x) f′(x) dx, the weighted integral ∫₀ᵗ (t−x)^α dB(x), their
//! pathwise identity, and running LIL statistics.
//!
//! Both integrals are Gaussian at fixed t; integration by parts gives
//! ∫₀ᵗ B(t−x) f′(x) dx = ∫₀ᵗ (f(t−s) − f(0)) dB(s), so the convolution has
//! variance ∫₀ᵗ (f(u) − f(0))² du, while the weighted integral has variance
//! ∫₀ᵗ (t−x)^{2α} dx = t^{2α+1}/(2α+1). For f(x) = x^α the two integrals
//! coincide pathwise (f′(x) = α x^{α−1} puts the classical
//! α∫₀ᵗ B(t−x) x^{α−1} dx = ∫₀ᵗ (t−x)^α dB(x) in this form), which the
//! discretizations reproduce with O(step^{1/2}) error on shared paths.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::experiment_harness::RunningExtremes;

/// Default cap on the number of stored grid points (≈ 0.5 GiB of f64).
pub const DEFAULT_MEMORY_CAP_POINTS: usize = 1 << 26;

/// A Brownian path on the uniform grid kΔ, k = 0..N, with B(0) = 0 and iid
/// Normal(0, Δ) increments. Immutable after generation.
#[derive(Debug, Clone)]
pub struct BrownianPath {
    step: f64,
    values: Vec<f64>,
}

impl BrownianPath {
    /// Wrap explicit grid values (values[0] must be 0). Mainly for
    /// deterministic-path tests; simulation goes through [`simulate_bm`].
    pub fn from_values(step: f64, values: Vec<f64>) -> Result<Self> {
        if !(step > 0.0) || !step.is_finite() {
            return Err(Error::Config(format!("path step must be positive, got {step}")));
        }
        if values.is_empty() || values[0] != 0.0 {
            return Err(Error::Config("path values must start at B(0) = 0".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("path values must be finite".into()));
        }
        Ok(BrownianPath { step, values })
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Largest grid time NΔ.
    pub fn t_max(&self) -> f64 {
        (self.values.len() - 1) as f64 * self.step
    }

    /// The path c·B on the same grid (exact scaling, used by linearity checks).
    pub fn scaled(&self, c: f64) -> BrownianPath {
        BrownianPath {
            step: self.step,
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }

    /// Grid index nearest to t, or an error if t lies beyond the path.
    fn grid_index(&self, t: f64) -> Result<usize> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::Domain(format!("time must be finite and ≥ 0, got {t}")));
        }
        let k = (t / self.step).round() as usize;
        if k >= self.values.len() {
            return Err(Error::Domain(format!(
                "t = {t} beyond path horizon {}",
                self.t_max()
            )));
        }
        Ok(k)
    }
}

/// Simulate standard Brownian motion up to T with spacing `step`
/// (partial sums of iid Normal(0, step) draws), under the default memory cap.
pub fn simulate_bm<R: Rng + ?Sized>(t_max: f64, step: f64, rng: &mut R) -> Result<BrownianPath> {
    simulate_bm_capped(t_max, step, DEFAULT_MEMORY_CAP_POINTS, rng)
}

/// [`simulate_bm`] with an explicit cap on stored grid points.
pub fn simulate_bm_capped<R: Rng + ?Sized>(
    t_max: f64,
    step: f64,
    cap_points: usize,
    rng: &mut R,
) -> Result<BrownianPath> {
    if !(t_max > 0.0) || !t_max.is_finite() {
        return Err(Error::Domain(format!("horizon must be positive, got {t_max}")));
    }
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::Domain(format!("step must be positive, got {step}")));
    }
    let n = (t_max / step).ceil() as usize;
    if n + 1 > cap_points {
        return Err(Error::Config(format!(
            "path of {} points exceeds the memory cap of {cap_points}",
            n + 1
        )));
    }
    let normal = Normal::new(0.0, step.sqrt()).expect("validated step");
    let mut values = Vec::with_capacity(n + 1);
    let mut b = 0.0;
    values.push(b);
    for _ in 0..n {
        b += normal.sample(rng);
        values.push(b);
    }
    Ok(BrownianPath { step, values })
}

/// Built-in kernel shapes with f′ regularly varying of index α − 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum KernelForm {
    /// f(x) = x^α.
    Power,
    /// f(x) = x^α (1 + log(1 + x)) — slowly-varying perturbation.
    PowerLog,
    /// f ≡ 1 (degenerate; for zero-convolution checks only).
    Constant,
}

/// A weight kernel f for the convolution ∫₀ᵗ B(t−x) f′(x) dx: nonnegative,
/// differentiable, positive from t₀ on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSpec {
    alpha: f64,
    t0: f64,
    form: KernelForm,
}

impl KernelSpec {
    /// f(x) = x^α, α > 0.
    pub fn power(alpha: f64) -> Result<Self> {
        Self::validated(alpha, KernelForm::Power)
    }

    /// f(x) = x^α·(1 + log(1 + x)), α > 0.
    pub fn power_log(alpha: f64) -> Result<Self> {
        Self::validated(alpha, KernelForm::PowerLog)
    }

    /// f ≡ 1. Its derivative vanishes, so the convolution against it is 0;
    /// exists to pin that degenerate case down in tests.
    pub fn constant() -> Self {
        KernelSpec { alpha: 1.0, t0: 0.0, form: KernelForm::Constant }
    }

    fn validated(alpha: f64, form: KernelForm) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::Domain(format!("kernel index α must be positive, got {alpha}")));
        }
        Ok(KernelSpec { alpha, t0: 0.0, form })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Threshold from which f is guaranteed positive (0 for the built-ins).
    pub fn t0(&self) -> f64 {
        self.t0
    }

    /// f(x), x ≥ 0.
    pub fn eval(&self, x: f64) -> f64 {
        match self.form {
            KernelForm::Power => x.powf(self.alpha),
            KernelForm::PowerLog => x.powf(self.alpha) * (1.0 + x.ln_1p()),
            KernelForm::Constant => 1.0,
        }
    }
}

/// Trapezoidal discretization of ∫₀ᵗ B(t−x) f′(x) dx on the path grid:
/// the path is averaged over each cell and weighted by the exact increment
/// f(x_{j+1}) − f(x_j) (so integrable singularities of f′ at 0, as for
/// f(x) = x^α with α < 1, cost no accuracy). t is snapped to the nearest
/// grid point.
pub fn convolve_bm(path: &BrownianPath, kernel: &KernelSpec, t: f64) -> Result<f64> {
    let k_t = path.grid_index(t)?;
    let v = path.values();
    let step = path.step();
    let mut sum = 0.0;
    let mut f_prev = kernel.eval(0.0);
    for j in 0..k_t {
        let f_next = kernel.eval((j + 1) as f64 * step);
        sum += 0.5 * (v[k_t - j] + v[k_t - j - 1]) * (f_next - f_prev);
        f_prev = f_next;
    }
    Ok(sum)
}

/// Left-endpoint Riemann–Stieltjes sum for ∫₀ᵗ (t−x)^α dB(x):
/// Σ_k (t−x_k)^α (B(x_{k+1}) − B(x_k)) over grid points x_k < t. t is
/// snapped to the nearest grid point. α = 0 is the degenerate kernel ≡ 1,
/// for which the sum telescopes to B(t) exactly.
pub fn weighted_ito_integral(path: &BrownianPath, alpha: f64, t: f64) -> Result<f64> {
    if !(alpha >= 0.0) || !alpha.is_finite() {
        return Err(Error::Domain(format!("weight index α must be ≥ 0, got {alpha}")));
    }
    let k_t = path.grid_index(t)?;
    let step = path.step();
    let t_s = k_t as f64 * step;
    let v = path.values();
    let mut sum = 0.0;
    for k in 0..k_t {
        let w = (t_s - k as f64 * step).powf(alpha);
        sum += w * (v[k + 1] - v[k]);
    }
    Ok(sum)
}

/// Fold (t, value) samples of the Brownian convolution functional into
/// running LIL extremes of value / ((2(2α+1)^{-1} t loglog t)^{1/2} f(t)),
/// with the cluster-set coverage histogram over [−1, 1]. Requires every
/// t > max(e, t₀).
pub fn lil_trajectory_stat(samples: &[(f64, f64)], kernel: &KernelSpec) -> Result<RunningExtremes> {
    let mut extremes = RunningExtremes::new();
    for &(t, value) in samples {
        if !(t > std::f64::consts::E) || !(t > kernel.t0()) {
            return Err(Error::Domain(format!(
                "LIL normalization requires t > max(e, t₀), got {t}"
            )));
        }
        let norm = (2.0 / (2.0 * kernel.alpha() + 1.0) * t * t.ln().ln()).sqrt() * kernel.eval(t);
        extremes.observe(value / norm);
    }
    Ok(extremes)
}

/// One long-horizon LIL trajectory: normalized convolution values at the
/// geometric checkpoints t_j ≈ 1.05^j (snapped to the grid) from 10 to T.
#[derive(Debug, Clone)]
pub struct BmLilTrajectory {
    /// (t, ∫₀ᵗ B(t−x) f′(x) dx) at each checkpoint.
    pub samples: Vec<(f64, f64)>,
    pub extremes: RunningExtremes,
}

/// Simulate a single path to T and evaluate the convolution at geometric
/// checkpoints (ratio 1.05, per-checkpoint exact trapezoid over the stored
/// grid). loglog growth is unverifiable at desk scale, so the output is a
/// diagnostic record, never a hard assertion.
pub fn bm_lil_trajectory<R: Rng + ?Sized>(
    kernel: &KernelSpec,
    t_max: f64,
    step: f64,
    rng: &mut R,
) -> Result<BmLilTrajectory> {
    let path = simulate_bm(t_max, step, rng)?;
    let start = 10.0f64.max(kernel.t0() + step).max(4.0 * step);
    if start > t_max {
        return Err(Error::Config(format!(
            "horizon {t_max} leaves no checkpoints above {start}"
        )));
    }
    let mut checkpoints: Vec<f64> = Vec::new();
    let mut t = start;
    while t <= t_max {
        let snapped = (t / step).round() * step;
        if snapped <= t_max && checkpoints.last() != Some(&snapped) {
            checkpoints.push(snapped);
        }
        t *= 1.05;
    }
    let mut samples = Vec::with_capacity(checkpoints.len());
    for &tj in &checkpoints {
        samples.push((tj, convolve_bm(&path, kernel, tj)?));
    }
    let extremes = lil_trajectory_stat(&samples, kernel)?;
    Ok(BmLilTrajectory { samples, extremes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn path_shape_and_origin() {
        let mut r = rng(1);
        let path = simulate_bm(1.0, 0.25, &mut r).unwrap();
        assert_eq!(path.values().len(), 5);
        assert_eq!(path.values()[0], 0.0);
        assert_relative_eq!(path.t_max(), 1.0);
    }

    #[test]
    fn memory_cap_is_enforced() {
        let mut r = rng(1);
        assert!(simulate_bm_capped(1.0, 1e-6, 1000, &mut r).is_err());
    }

    #[test]
    fn terminal_variance_matches_horizon() {
        let mut r = rng(2);
        let reps = 5000;
        let t = 1.0;
        let finals: Vec<f64> = (0..reps)
            .map(|_| *simulate_bm(t, 0.05, &mut r).unwrap().values().last().unwrap())
            .collect();
        let mean = finals.iter().sum::<f64>() / reps as f64;
        let var = finals.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (reps - 1) as f64;
        let se = t * (2.0 / (reps as f64 - 1.0)).sqrt();
        assert!((var - t).abs() < 3.0 * se, "Var B(1) = {var}");
    }

    #[test]
    fn covariance_is_min_of_times() {
        // Cov(B(0.3), B(0.7)) = 0.3; SE from the empirical sd of the products.
        let mut r = rng(3);
        let reps = 10_000;
        let mut products = Vec::with_capacity(reps);
        for _ in 0..reps {
            let path = simulate_bm(1.0, 0.01, &mut r).unwrap();
            products.push(path.values()[30] * path.values()[70]);
        }
        let mean = products.iter().sum::<f64>() / reps as f64;
        let var = products.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (reps - 1) as f64;
        let se = (var / reps as f64).sqrt();
        assert!((mean - 0.3).abs() < 3.0 * se, "cov = {mean} ± {se}");
    }

    #[test]
    fn constant_kernel_convolves_to_zero() {
        let mut r = rng(4);
        let path = simulate_bm(1.0, 0.01, &mut r).unwrap();
        assert_eq!(convolve_bm(&path, &KernelSpec::constant(), 1.0).unwrap(), 0.0);
    }

    #[test]
    fn convolution_variance_linear_kernel() {
        // f(x) = x at t = 1: variance ∫₀¹ u² du = 1/3.
        let mut r = rng(5);
        let kernel = KernelSpec::power(1.0).unwrap();
        let reps = 5000;
        let vals: Vec<f64> = (0..reps)
            .map(|_| {
                let path = simulate_bm(1.0, 0.01, &mut r).unwrap();
                convolve_bm(&path, &kernel, 1.0).unwrap()
            })
            .collect();
        let mean = vals.iter().sum::<f64>() / reps as f64;
        let var = vals.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (reps - 1) as f64;
        let se = (1.0 / 3.0) * (2.0 / (reps as f64 - 1.0)).sqrt();
        assert!((var - 1.0 / 3.0).abs() < 3.0 * se, "Var = {var}");
    }

    #[test]
    fn ito_variance_identity() {
        // Var ∫₀ᵗ (t−x)^α dB = t^{2α+1}/(2α+1) at (α, t) = (0.5, 1), (2, 4).
        let mut r = rng(6);
        for &(alpha, t, step, reps) in &[(0.5, 1.0, 0.005, 4000usize), (2.0, 4.0, 0.01, 4000)] {
            let vals: Vec<f64> = (0..reps)
                .map(|_| {
                    let path = simulate_bm(t, step, &mut r).unwrap();
                    weighted_ito_integral(&path, alpha, t).unwrap()
                })
                .collect();
            let mean = vals.iter().sum::<f64>() / reps as f64;
            let var = vals.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (reps - 1) as f64;
            let oracle = t.powf(2.0 * alpha + 1.0) / (2.0 * alpha + 1.0);
            let se = oracle * (2.0 / (reps as f64 - 1.0)).sqrt();
            assert!(
                (var - oracle).abs() < 3.0 * se,
                "α={alpha} t={t}: Var {var} vs {oracle}"
            );
        }
    }

    #[test]
    fn ito_alpha_zero_telescopes_to_terminal_value() {
        let mut r = rng(7);
        let path = simulate_bm(1.0, 0.01, &mut r).unwrap();
        let b_t = path.values()[100];
        assert_eq!(weighted_ito_integral(&path, 0.0, 1.0).unwrap(), b_t);
    }

    #[test]
    fn scaling_is_exact_for_both_integrals() {
        let mut r = rng(8);
        let path = simulate_bm(1.0, 0.01, &mut r).unwrap();
        let doubled = path.scaled(2.0);
        let kernel = KernelSpec::power_log(1.5).unwrap();
        assert_relative_eq!(
            convolve_bm(&doubled, &kernel, 1.0).unwrap(),
            2.0 * convolve_bm(&path, &kernel, 1.0).unwrap(),
        );
        assert_relative_eq!(
            weighted_ito_integral(&doubled, 1.5, 1.0).unwrap(),
            2.0 * weighted_ito_integral(&path, 1.5, 1.0).unwrap(),
        );
    }

    #[test]
    fn convolution_ito_identity_error_shrinks_with_step() {
        // ∫₀ᵗ B(t−x) f′(x) dx = ∫₀ᵗ (t−x)^α dB(x) for f(x) = x^α on shared
        // paths; discretization error decreases along steps 1e−2, 1e−3, 1e−4.
        let alpha = 1.5;
        let kernel = KernelSpec::power(alpha).unwrap();
        let mut errors = Vec::new();
        for (i, &step) in [1e-2, 1e-3, 1e-4].iter().enumerate() {
            let mut r = rng(900 + i as u64);
            let path = simulate_bm(1.0, step, &mut r).unwrap();
            let conv = convolve_bm(&path, &kernel, 1.0).unwrap();
            let ito = weighted_ito_integral(&path, alpha, 1.0).unwrap();
            errors.push((conv - ito).abs());
        }
        assert!(
            errors[0] > errors[1] && errors[1] > errors[2],
            "identity errors not decreasing: {errors:?}"
        );
    }

    #[test]
    fn t_beyond_path_is_rejected() {
        let mut r = rng(9);
        let path = simulate_bm(1.0, 0.01, &mut r).unwrap();
        let kernel = KernelSpec::power(1.0).unwrap();
        assert!(convolve_bm(&path, &kernel, 2.0).is_err());
        assert!(weighted_ito_integral(&path, 1.0, 2.0).is_err());
    }

    #[test]
    fn lil_stat_zero_values_and_coverage() {
        let kernel = KernelSpec::power(1.0).unwrap();
        let samples: Vec<(f64, f64)> = (0..50).map(|i| (10.0 + i as f64, 0.0)).collect();
        let ext = lil_trajectory_stat(&samples, &kernel).unwrap();
        assert_eq!(ext.running_max(), 0.0);
        assert_eq!(ext.running_min(), 0.0);
        // Grid points of [−1,1] (spacing 0.05) within 0.05 of zero: 3 of 41.
        assert_relative_eq!(ext.coverage(), 3.0 / 41.0, epsilon = 1e-12);
        assert!(lil_trajectory_stat(&[(2.0, 0.0)], &kernel).is_err());
    }

    #[test]
    fn lil_stat_running_max_monotone_under_appends() {
        let kernel = KernelSpec::power(1.0).unwrap();
        let mut r = rng(10);
        let samples: Vec<(f64, f64)> =
            (0..200).map(|i| (10.0 + i as f64, r.random::<f64>() * 40.0 - 20.0)).collect();
        let mut prev_max = f64::NEG_INFINITY;
        let mut prev_min = f64::INFINITY;
        for k in 1..=samples.len() {
            let ext = lil_trajectory_stat(&samples[..k], &kernel).unwrap();
            assert!(ext.running_max() >= prev_max);
            assert!(ext.running_min() <= prev_min);
            prev_max = ext.running_max();
            prev_min = ext.running_min();
        }
    }

    #[test]
    fn bm_lil_trajectory_smoke() {
        let kernel = KernelSpec::power(1.0).unwrap();
        let mut r = rng(11);
        let traj = bm_lil_trajectory(&kernel, 2000.0, 0.5, &mut r).unwrap();
        assert!(!traj.samples.is_empty());
        assert!(traj.samples.windows(2).all(|w| w[0].0 < w[1].0));
        assert!(traj.extremes.running_max().is_finite());
        assert!(traj.extremes.running_min() <= traj.extremes.running_max());
    }
}
