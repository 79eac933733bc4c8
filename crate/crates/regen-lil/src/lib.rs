//! Simulation and numerical-verification toolkit for regenerative composition
//! structures generated by subordinators.
//!
//! A subordinator's closed range splits (0, ∞) into open gaps; dropping n iid
//! Exp(1) points into the gaps and reading off the occupied gaps left to
//! right produces a regenerative composition of n. This crate evaluates the
//! special functions attached to that construction — the log-scale Laplace
//! exponent Φ(t) = ∫(1 − exp{−t(1 − e^{−x})}) ν(dx), decrement matrices,
//! centering and normalization integrals — samples the block count K_n both
//! exactly (via the decrement-matrix regeneration) and pathwise (via
//! ε-truncated jump simulation), and runs seeded Monte Carlo ensembles that
//! probe the Gaussian fluctuation and iterated-logarithm scalings of K_n,
//! alongside a small Brownian laboratory for the weighted-integral limit
//! objects.
//!
//! Modules
//! - [`special_math`]: adaptive Gauss–Kronrod quadrature, polygamma family,
//!   log-beta, normal CDF.
//! - [`levy_models`]: the model zoo (Gamma, GammaLike, finite compound
//!   Poisson), Φ and its derivative, moments, centering/normalization.
//! - [`composition_engine`]: decrement rows q(n, m), exact samplers,
//!   poissonized and pathwise samplers, truncation-bias control.
//! - [`brownian_lab`]: Brownian paths, kernel convolutions, weighted Itô
//!   sums, trajectory statistics under LIL normalization.
//! - [`experiment_harness`]: manifests, replicated seeded ensembles,
//!   Kolmogorov–Smirnov checks, CSV/manifest persistence.
//! - [`validation`]: the named invariant suite behind the `validate`
//!   subcommand and the acceptance gates.
//!
//! All randomness flows through [`streams::derive_stream`], so a master seed
//! fully determines every output, independent of worker count.

pub mod brownian_lab;
pub mod composition_engine;
pub mod error;
pub mod experiment_harness;
pub mod levy_models;
pub mod special_math;
pub mod streams;
pub mod validation;

pub use error::{Error, Result};
pub use levy_models::{JumpDist, LevyModel, ModelKind};
