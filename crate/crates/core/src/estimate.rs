//! Estimation from data: the empirical spectral measure
//! `σ_s = (s/n) Σ_{‖ζ_j‖ ≥ s} δ_{ζ_j/‖ζ_j‖}`, the planar half-plane estimator
//! of a dependency set from tail-dependence values, and Hausdorff
//! convergence diagnostics.

use rayon::prelude::*;

use crate::distribution::SampleMatrix;
use crate::error::{Error, Result};
use crate::geometry::{hausdorff_distance, scale, DependencySet, MaxZonoid, Polygon2D};
use crate::spectral::{ReferenceNorm, SpectralMeasure};

/// Atoms `ζ_j/‖ζ_j‖` of mass `s/n` for every row with `‖ζ_j‖ ≥ s`.
pub fn empirical_spectral(samples: &SampleMatrix, s: f64, norm: ReferenceNorm) -> Result<SpectralMeasure> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::InvalidParameter(format!("threshold must be positive and finite, got {s}")));
    }
    let n = samples.nrows() as f64;
    let raw: Vec<(Vec<f64>, f64)> = samples
        .rows()
        .filter_map(|r| {
            let len = norm.norm(r);
            (len >= s).then(|| (r.iter().map(|v| v / len).collect(), s / n))
        })
        .collect();
    if raw.is_empty() {
        return Err(Error::NoExceedances { threshold: s });
    }
    SpectralMeasure::from_unnormalized(norm, samples.ncols(), raw)
}

/// Number of rows with `‖ζ_j‖ ≥ s`.
pub fn exceedance_count(samples: &SampleMatrix, s: f64, norm: ReferenceNorm) -> usize {
    samples.rows().filter(|r| norm.norm(r) >= s).count()
}

/// Estimated tail dependence `l̂(u)` at a direction `u`.
#[derive(Clone, Debug, PartialEq)]
pub struct DirectionEstimate {
    pub direction: Vec<f64>,
    pub value: f64,
}

/// Result of [`estimate_zonoid_2d`].
#[derive(Clone, Debug, PartialEq)]
pub struct ZonoidEstimate {
    pub polygon: Polygon2D,
    /// Indices of the estimates that were clipped into `[max_i u_i, Σ u_i]`.
    pub clipped: Vec<usize>,
}

impl ZonoidEstimate {
    pub fn any_clipped(&self) -> bool {
        !self.clipped.is_empty()
    }
}

/// Intersection of the half-planes `{x : ⟨x, u⟩ ≤ l̂(u)}` with the unit
/// square, rescaled so that `h(e_i) = 1`. Values outside the admissible
/// range `[max_i u_i, Σ u_i]` are clipped and reported. In the plane the
/// result is always a max-zonoid; the estimator is not offered in higher
/// dimension, where that fails.
pub fn estimate_zonoid_2d(estimates: &[DirectionEstimate]) -> Result<ZonoidEstimate> {
    if estimates.len() < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 direction estimates, got {}", estimates.len())));
    }
    let mut dirs: Vec<[f64; 2]> = vec![[1.0, 0.0], [0.0, 1.0]];
    let mut vals: Vec<f64> = vec![1.0, 1.0];
    let mut clipped = Vec::new();
    for (i, e) in estimates.iter().enumerate() {
        if e.direction.len() != 2 {
            return Err(Error::UnsupportedDimension { op: "estimate_zonoid_2d", required: "2", found: e.direction.len() });
        }
        let u = [e.direction[0], e.direction[1]];
        if !(u[0] >= 0.0 && u[1] >= 0.0) || u[0] + u[1] <= 0.0 || !u[0].is_finite() || !u[1].is_finite() {
            return Err(Error::InvalidParameter(format!("direction {u:?} must be nonzero and nonnegative")));
        }
        if !e.value.is_finite() {
            return Err(Error::InvalidParameter(format!("estimate {} at {u:?} is not finite", e.value)));
        }
        let lo = u[0].max(u[1]);
        let hi = u[0] + u[1];
        let v = e.value.clamp(lo, hi);
        if v != e.value {
            clipped.push(i);
        }
        dirs.push(u);
        vals.push(v);
    }
    let raw = Polygon2D::from_support_values(&dirs, &vals)?;
    let [z1, z2] = raw.extents();
    let polygon = if (z1 - 1.0).abs() > 0.0 || (z2 - 1.0).abs() > 0.0 { raw.scaled([1.0 / z1, 1.0 / z2]) } else { raw };
    Ok(ZonoidEstimate { polygon, clipped })
}

/// One row of [`convergence_diagnostic`].
#[derive(Clone, Debug, PartialEq)]
pub struct ConvergencePoint {
    pub s: f64,
    pub exceedances: usize,
    /// `None` when no observation exceeds `s`.
    pub distance: Option<f64>,
}

/// Dependency set of `σ_s` after coordinatewise normalization.
pub fn estimated_dependency_set(samples: &SampleMatrix, s: f64, norm: ReferenceNorm) -> Result<DependencySet> {
    let sigma = empirical_spectral(samples, s, norm)?;
    DependencySet::normalize(&MaxZonoid::from_spectral(sigma))
}

/// Hausdorff distance between the normalized max-zonoid of `σ_s` and the
/// target, for each threshold of an increasing grid.
pub fn convergence_diagnostic(
    samples: &SampleMatrix,
    s_grid: &[f64],
    target: &MaxZonoid,
    grid_n: usize,
) -> Result<Vec<ConvergencePoint>> {
    if s_grid.is_empty() {
        return Err(Error::Empty("threshold grid"));
    }
    if s_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParameter("threshold grid must be strictly increasing".into()));
    }
    if target.dim() != samples.ncols() {
        return Err(Error::DimensionMismatch { expected: target.dim(), found: samples.ncols() });
    }
    let norm = ReferenceNorm::L1;
    s_grid
        .par_iter()
        .map(|&s| {
            let exceedances = exceedance_count(samples, s, norm);
            if exceedances == 0 {
                return Ok(ConvergencePoint { s, exceedances, distance: None });
            }
            let k = estimated_dependency_set(samples, s, norm)?;
            let distance = hausdorff_distance(&k, target, grid_n)?;
            Ok(ConvergencePoint { s, exceedances, distance: Some(distance) })
        })
        .collect()
}

/// Rescales a body so that `h(e_i) = 1`.
pub fn normalize_zonoid(k: &MaxZonoid) -> Result<MaxZonoid> {
    let lambda: Vec<f64> = k.marginals().iter().map(|m| 1.0 / m).collect();
    scale(k, &lambda)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distribution::{simulate, MaxStableModel};
    use crate::families::make_family;

    fn model(s: &str) -> MaxStableModel {
        MaxStableModel::new(make_family(&s.parse().unwrap()).unwrap())
    }

    fn exact(k: &MaxZonoid, n: usize) -> Vec<DirectionEstimate> {
        (0..n)
            .map(|j| {
                let th = std::f64::consts::FRAC_PI_2 * j as f64 / (n - 1) as f64;
                let u = vec![th.cos(), th.sin()];
                DirectionEstimate { value: k.support(&u).unwrap(), direction: u }
            })
            .collect()
    }

    #[test]
    fn complete_dependence_atoms_are_diagonal() {
        let x = simulate(&model("dependence"), 2000, 5).unwrap();
        let sigma = empirical_spectral(&x, 10.0, ReferenceNorm::L1).unwrap();
        assert_eq!(sigma.atoms().len(), 1);
        assert!((sigma.atoms()[0].point[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn atoms_on_sphere_with_positive_mass() {
        let x = simulate(&model("logistic(p=2)"), 3000, 1).unwrap();
        for norm in [ReferenceNorm::L1, ReferenceNorm::L2, ReferenceNorm::LInf] {
            let sigma = empirical_spectral(&x, 5.0, norm).unwrap();
            for a in sigma.atoms() {
                assert!(a.mass > 0.0);
                assert!((norm.norm(&a.point) - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn no_exceedances_error() {
        let x = SampleMatrix::from_rows(&[vec![1.0, 2.0], vec![0.5, 0.1]]).unwrap();
        assert_eq!(empirical_spectral(&x, 100.0, ReferenceNorm::L1), Err(Error::NoExceedances { threshold: 100.0 }));
    }

    #[test]
    fn half_plane_estimator_recovers_square_and_cross() {
        for k in [MaxZonoid::unit_cube(2), MaxZonoid::unit_cross(2)] {
            let est = estimate_zonoid_2d(&exact(&k, 65)).unwrap();
            assert!(!est.any_clipped());
            let d = hausdorff_distance(&MaxZonoid::from_polygon(est.polygon), &k, 4096).unwrap();
            assert!(d <= 1e-9, "{d}");
        }
    }

    #[test]
    fn half_plane_estimator_clips() {
        let est = estimate_zonoid_2d(&[
            DirectionEstimate { direction: vec![1.0, 1.0], value: 2.5 },
            DirectionEstimate { direction: vec![1.0, 2.0], value: 2.5 },
        ])
        .unwrap();
        assert_eq!(est.clipped, vec![0]);
        assert!(estimate_zonoid_2d(&[DirectionEstimate { direction: vec![1.0, 1.0], value: 1.5 }]).is_err());
    }

    #[test]
    fn diagnostic_flags_empty_thresholds() {
        let x = simulate(&model("logistic(p=2)"), 1000, 2).unwrap();
        let target = make_family(&"logistic(p=2)".parse().unwrap()).unwrap();
        let out = convergence_diagnostic(&x, &[5.0, 1e9], &target, 1024).unwrap();
        assert!(out[0].distance.is_some());
        assert_eq!(out[1].distance, None);
        assert!(convergence_diagnostic(&x, &[5.0, 2.0], &target, 1024).is_err());
    }
}
