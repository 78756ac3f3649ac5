//! Scalar dependence functionals computed from the dependency set:
//! extremal coefficients, χ, Spearman's ρ_S, Kendall's τ, the covariance of
//! the inverted components and the multivariate ρ.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::geometry::{minkowski_combine, polar_volume, CombineMode, Estimate, MaxZonoid, VolumeMethod, Weight};
use crate::numeric::{adaptive_simpson, factorial};

/// Largest dimension for which full subset tables are materialized.
pub const MAX_TABLE_DIM: usize = 20;

/// Extremal coefficients `θ_A` for every subset `A`, indexed by bit mask
/// (bit `i` set when coordinate `i` belongs to `A`; `θ_∅ = 0`).
#[derive(Clone, Debug, PartialEq)]
pub struct ExtremalTable {
    d: usize,
    theta: Vec<f64>,
}

/// Bit mask of a subset of `{0, …, d−1}`.
pub fn subset_mask(subset: &[usize], d: usize) -> Result<usize> {
    if subset.is_empty() {
        return Err(Error::Empty("subset"));
    }
    let mut mask = 0usize;
    for &i in subset {
        if i >= d {
            return Err(Error::InvalidParameter(format!("coordinate {} out of range for dimension {d}", i + 1)));
        }
        mask |= 1 << i;
    }
    Ok(mask)
}

/// Sorted 0-based coordinates of a mask.
pub fn mask_members(mask: usize, d: usize) -> Vec<usize> {
    (0..d).filter(|i| mask & (1 << i) != 0).collect()
}

impl ExtremalTable {
    /// Table from values on all nonempty subsets (`values[mask]`, `values[0]`
    /// ignored).
    pub fn from_masks(d: usize, mut values: Vec<f64>) -> Result<Self> {
        if d == 0 || d > MAX_TABLE_DIM {
            return Err(Error::UnsupportedDimension { op: "extremal table", required: "1..=20", found: d });
        }
        if values.len() != 1 << d {
            return Err(Error::DimensionMismatch { expected: 1 << d, found: values.len() });
        }
        if let Some(bad) = values.iter().skip(1).find(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("extremal coefficient {bad} is not finite")));
        }
        values[0] = 0.0;
        Ok(ExtremalTable { d, theta: values })
    }

    /// Table from a map of subsets (0-based indices). Singletons default to 1;
    /// every other nonempty subset must be present.
    pub fn from_subsets(d: usize, map: &BTreeMap<Vec<usize>, f64>) -> Result<Self> {
        if d == 0 || d > MAX_TABLE_DIM {
            return Err(Error::UnsupportedDimension { op: "extremal table", required: "1..=20", found: d });
        }
        let mut values = vec![f64::NAN; 1 << d];
        values[0] = 0.0;
        for (subset, &v) in map {
            let mask = subset_mask(subset, d)?;
            values[mask] = v;
        }
        for i in 0..d {
            if values[1 << i].is_nan() {
                values[1 << i] = 1.0;
            }
        }
        if let Some(mask) = (1..1usize << d).find(|&m| values[m].is_nan()) {
            return Err(Error::InvalidParameter(format!(
                "missing extremal coefficient for subset {{{}}}",
                mask_members(mask, d).iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(",")
            )));
        }
        ExtremalTable::from_masks(d, values)
    }

    /// All coefficients of a body.
    pub fn of_zonoid(k: &MaxZonoid) -> Result<Self> {
        let d = k.dim();
        if d > MAX_TABLE_DIM {
            return Err(Error::UnsupportedDimension { op: "extremal table", required: "≤ 20", found: d });
        }
        let values = (0..1usize << d)
            .map(|mask| if mask == 0 { 0.0 } else { k.h(&indicator(mask, d)) })
            .collect();
        ExtremalTable::from_masks(d, values)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn get_mask(&self, mask: usize) -> f64 {
        self.theta[mask]
    }

    pub fn get(&self, subset: &[usize]) -> Result<f64> {
        Ok(self.theta[subset_mask(subset, self.d)?])
    }

    /// Values indexed by mask, `θ_∅ = 0` first.
    pub fn as_masks(&self) -> &[f64] {
        &self.theta
    }

    /// Nonempty subsets with their coefficients, by mask order.
    pub fn iter(&self) -> impl Iterator<Item = (Vec<usize>, f64)> + '_ {
        (1..self.theta.len()).map(move |m| (mask_members(m, self.d), self.theta[m]))
    }
}

/// 0/1 indicator vector of a mask.
pub fn indicator(mask: usize, d: usize) -> Vec<f64> {
    (0..d).map(|i| if mask & (1 << i) != 0 { 1.0 } else { 0.0 }).collect()
}

/// `θ_A = h(K, e_A)` for a nonempty subset `A` (0-based indices).
pub fn extremal_coefficient(k: &MaxZonoid, subset: &[usize]) -> Result<f64> {
    let mask = subset_mask(subset, k.dim())?;
    Ok(k.h(&indicator(mask, k.dim())))
}

fn require_2d(k: &MaxZonoid, op: &'static str) -> Result<()> {
    if k.dim() == 2 {
        Ok(())
    } else {
        Err(Error::UnsupportedDimension { op, required: "2", found: k.dim() })
    }
}

/// Upper tail dependence `χ = 2 − h(K, (1, 1))`.
pub fn chi(k: &MaxZonoid) -> Result<f64> {
    require_2d(k, "chi")?;
    Ok(2.0 - k.h(&[1.0, 1.0]))
}

/// How polar volumes are computed by the volume-based measures.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MeasureMethod {
    /// Exact in the plane; an error in higher dimension.
    Exact,
    MonteCarlo { samples: usize, seed: u64 },
}

impl MeasureMethod {
    fn volume(self) -> VolumeMethod {
        match self {
            MeasureMethod::Exact => VolumeMethod::Exact2d,
            MeasureMethod::MonteCarlo { samples, seed } => VolumeMethod::MonteCarlo { samples, seed },
        }
    }
}

/// Spearman's ρ_S through `L = (K + [0,1]^d)/2`:
/// `ρ_S = 3(2V_2(L°) − 1)` in the plane and
/// `ρ_S = c(d! V_d(L°) − 1)`, `c = (d+1)/(2^d − d − 1)`, for `d ≥ 3`.
pub fn spearman_rho(k: &MaxZonoid, method: MeasureMethod) -> Result<Estimate> {
    let d = k.dim();
    if d < 2 {
        return Err(Error::UnsupportedDimension { op: "spearman_rho", required: "≥ 2", found: d });
    }
    let l = minkowski_combine(k, &MaxZonoid::unit_cube(d), &Weight::Scalar(0.5), CombineMode::Sum)?;
    let v = polar_volume(&l, method.volume())?;
    if d == 2 {
        return Ok(Estimate { value: 3.0 * (2.0 * v.value - 1.0), std_error: 6.0 * v.std_error });
    }
    let c = (d as f64 + 1.0) / (2f64.powi(d as i32) - d as f64 - 1.0);
    let f = factorial(d);
    Ok(Estimate { value: c * (f * v.value - 1.0), std_error: c * f * v.std_error })
}

/// Kendall's τ in the plane with absolute quadrature tolerance 1e-8.
pub fn kendall_tau_2d(k: &MaxZonoid) -> Result<f64> {
    kendall_tau_2d_with_tol(k, 1e-8)
}

/// `τ = 1 − ∫_0^1 y_1 y_2 / h(K, (t, 1−t))² dt` with `y` the coordinatewise
/// maxima of the support set at `(t, 1−t)`, integrated by adaptive Simpson
/// with breakpoints where `h` has kinks.
pub fn kendall_tau_2d_with_tol(k: &MaxZonoid, tol: f64) -> Result<f64> {
    require_2d(k, "kendall_tau_2d")?;
    let f = |t: f64| {
        let x = [t, 1.0 - t];
        let a = k.h(&x);
        let y = k.grad(&x);
        y[0] * y[1] / (a * a)
    };
    // The integrand jumps at kinks; each piece is evaluated strictly inside.
    let mut knots: Vec<f64> = k.kinks_2d().into_iter().filter(|t| *t > 0.0 && *t < 1.0).collect();
    knots.extend([0.0, 1.0]);
    knots.sort_by(|a, b| a.total_cmp(b));
    knots.dedup_by(|a, b| (*a - *b).abs() <= 1e-14);
    let pieces = (knots.len() - 1) as f64;
    let integral: f64 = knots
        .windows(2)
        .map(|w| {
            let eta = 1e-9 * (w[1] - w[0]);
            let (lo, hi) = (w[0] + eta, w[1] - eta);
            adaptive_simpson(|t| f(t.clamp(lo, hi)), w[0], w[1], tol / pieces)
        })
        .sum();
    Ok(1.0 - integral)
}

/// Covariance of `1/ξ_1` and `1/ξ_2`: `2V_2(K°) − 1`.
pub fn inverted_pearson_2d(k: &MaxZonoid, method: MeasureMethod) -> Result<Estimate> {
    require_2d(k, "inverted_pearson_2d")?;
    let v = polar_volume(k, method.volume())?;
    Ok(Estimate { value: 2.0 * v.value - 1.0, std_error: 2.0 * v.std_error })
}

/// `ρ = (d! V_d(K°) − 1)/(d! − 1)`, between 0 (independence) and 1
/// (complete dependence).
pub fn multivariate_rho(k: &MaxZonoid, method: MeasureMethod) -> Result<Estimate> {
    let d = k.dim();
    if d < 2 {
        return Err(Error::UnsupportedDimension { op: "multivariate_rho", required: "≥ 2", found: d });
    }
    let v = polar_volume(k, method.volume())?;
    let f = factorial(d);
    Ok(Estimate { value: (f * v.value - 1.0) / (f - 1.0), std_error: f * v.std_error / (f - 1.0) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::make_family;
    use crate::numeric::{adaptive_simpson, gamma, std_normal_cdf};

    fn fam(s: &str) -> MaxZonoid {
        make_family(&s.parse().unwrap()).unwrap().into_zonoid()
    }

    const MC: MeasureMethod = MeasureMethod::MonteCarlo { samples: 400_000, seed: 3 };

    #[test]
    fn extremal_coefficients() {
        let cube = fam("independence(d=4)");
        let cross = fam("dependence(d=4)");
        let lg = fam("logistic(p=3, d=4)");
        for subset in [vec![0], vec![1, 3], vec![0, 1, 2, 3]] {
            assert!((extremal_coefficient(&cube, &subset).unwrap() - subset.len() as f64).abs() < 1e-15);
            assert!((extremal_coefficient(&cross, &subset).unwrap() - 1.0).abs() < 1e-15);
        }
        assert!((extremal_coefficient(&lg, &[0, 1, 2, 3]).unwrap() - 4f64.powf(1.0 / 3.0)).abs() < 1e-14);
        assert!(extremal_coefficient(&lg, &[]).is_err());
        assert!(extremal_coefficient(&lg, &[4]).is_err());
    }

    #[test]
    fn chi_values() {
        assert_eq!(chi(&fam("independence")).unwrap(), 0.0);
        assert_eq!(chi(&fam("dependence")).unwrap(), 1.0);
        let lambda = 0.8;
        let hr = fam("husler_reiss(lambda=0.8)");
        assert!((chi(&hr).unwrap() - (2.0 - 2.0 * std_normal_cdf(lambda))).abs() < 1e-14);
        assert!(chi(&fam("independence(d=3)")).is_err());
    }

    #[test]
    fn spearman_endpoints() {
        assert!(spearman_rho(&fam("independence"), MeasureMethod::Exact).unwrap().value.abs() < 1e-12);
        assert!((spearman_rho(&fam("dependence"), MeasureMethod::Exact).unwrap().value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn spearman_logistic_matches_quadrature_oracle() {
        let j = adaptive_simpson(|t: f64| (1.0 + (t * t + (1.0 - t) * (1.0 - t)).sqrt()).powi(-2), 0.0, 1.0, 1e-13);
        let want = 12.0 * j - 3.0;
        let exact = spearman_rho(&fam("logistic(p=2)"), MeasureMethod::Exact).unwrap();
        assert!((exact.value - want).abs() < 1e-9, "{} vs {want}", exact.value);
        let mc = spearman_rho(&fam("logistic(p=2)"), MC).unwrap();
        assert!((mc.value - want).abs() < 3.0 * mc.std_error + 1e-12);
    }

    #[test]
    fn kendall_values() {
        assert!(kendall_tau_2d(&fam("independence")).unwrap().abs() < 1e-12);
        assert!((kendall_tau_2d(&fam("dependence")).unwrap() - 1.0).abs() < 1e-12);
        assert!((kendall_tau_2d(&fam("logistic(p=2)")).unwrap() - 0.5).abs() < 1e-6);
        // logistic family: τ = 1 − 1/p
        for p in [1.5, 3.0, 6.0] {
            let k = make_family(&crate::FamilySpec::new(crate::Family::Logistic { p }, 2)).unwrap();
            assert!((kendall_tau_2d(&k).unwrap() - (1.0 - 1.0 / p)).abs() < 1e-6, "p = {p}");
        }
    }

    #[test]
    fn inverted_pearson_values() {
        assert!(inverted_pearson_2d(&fam("independence"), MeasureMethod::Exact).unwrap().value.abs() < 1e-15);
        assert!((inverted_pearson_2d(&fam("dependence"), MeasureMethod::Exact).unwrap().value - 1.0).abs() < 1e-15);
        let lg = fam("logistic(p=2)");
        let exact = inverted_pearson_2d(&lg, MeasureMethod::Exact).unwrap();
        assert!((exact.value - (std::f64::consts::FRAC_PI_2 - 1.0)).abs() < 1e-9);
        let mc = inverted_pearson_2d(&lg, MC).unwrap();
        assert!((mc.value - (std::f64::consts::FRAC_PI_2 - 1.0)).abs() < 3.0 * mc.std_error);
    }

    #[test]
    fn multivariate_rho_closed_form() {
        for p in [1.0, 2.0, 4.0] {
            let d = 3;
            let k = make_family(&crate::FamilySpec::new(crate::Family::Logistic { p }, d)).unwrap();
            let f = factorial(d);
            let v = gamma(1.0 + 1.0 / p).powi(d as i32) / gamma(1.0 + d as f64 / p);
            let want = (f * v - 1.0) / (f - 1.0);
            let est = multivariate_rho(&k, MC).unwrap();
            assert!((est.value - want).abs() < 3.0 * est.std_error + 1e-12, "p = {p}: {} vs {want}", est.value);
        }
        assert!(multivariate_rho(&fam("dependence(d=3)"), MeasureMethod::Exact).is_err());
    }

    #[test]
    fn table_from_subsets() {
        let mut map = BTreeMap::new();
        map.insert(vec![0, 1], 1.5);
        let t = ExtremalTable::from_subsets(2, &map).unwrap();
        assert_eq!(t.as_masks(), &[0.0, 1.0, 1.0, 1.5]);
        let mut partial = BTreeMap::new();
        partial.insert(vec![0, 1], 1.5);
        assert!(ExtremalTable::from_subsets(3, &partial).is_err());
        let t = ExtremalTable::of_zonoid(&fam("independence(d=3)")).unwrap();
        assert_eq!(t.get(&[0, 2]).unwrap(), 2.0);
    }
}
