//! # maxzonoid
//!
//! Simple max-stable random vectors (unit Fréchet marginals) are in one-to-one
//! correspondence with *max-zonoids*: convex bodies in the nonnegative orthant
//! obtained as (limits of) Minkowski sums of cross-polytopes
//! `Δ_a = conv{0, a_1 e_1, …, a_d e_d}`. The correspondence runs through the
//! support function:
//!
//! ```text
//! F(x) = P(ξ ≤ x) = exp(−h(K, x*)),   x* = (1/x_1, …, 1/x_d)
//! ```
//!
//! This crate works entirely through that support function `h(K, ·)`:
//!
//! - [`geometry`]: max-zonoids, dependency sets, 2-D polygons, the operation
//!   algebra (rescaling, projection, products, Minkowski sums/differences,
//!   hull/intersection/power means in the plane), polar sets, volumes and metrics.
//! - [`spectral`]: discrete spectral measures on a reference sphere and the
//!   conversions between measures, polygons and max-zonoids.
//! - [`families`]: named parametric dependency sets (logistic, negative
//!   logistic, Hüsler–Reiss, Marshall–Olkin, matrix weights) and their
//!   discretization into atoms.
//! - [`distribution`]: cdf, copula, Pickands function, quantile curves,
//!   exponent-measure densities and exact simulation.
//! - [`dependence`]: extremal coefficients, χ, Spearman ρ_S, Kendall τ,
//!   inverted-Pearson covariance and the multivariate ρ.
//! - [`alternation`]: complete-alternation checks and extremal-coefficient
//!   consistency via subset Möbius inversion.
//! - [`estimate`]: empirical spectral measures, 2-D half-plane estimators and
//!   Hausdorff convergence diagnostics.
//!
//! All values are immutable after construction. Monte Carlo routines take an
//! explicit seed and split it deterministically by chunk index, so results do
//! not depend on the number of threads.

#![forbid(unsafe_code)]

pub mod alternation;
pub mod dependence;
pub mod distribution;
pub mod estimate;
pub mod families;
pub mod geometry;
pub mod numeric;
pub mod spectral;

mod error;

pub use error::{Error, Result};
pub use families::{Family, FamilySpec};
pub use geometry::{DependencySet, MaxZonoid, Polygon2D};
pub use spectral::{Atom, ReferenceNorm, SpectralMeasure};

/// Library version string.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
