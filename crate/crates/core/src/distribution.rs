//! The probability layer: distribution function, copula, Pickands function,
//! quantile curves, exponent-measure densities and exact simulation.
//!
//! A model with dependency set `K` has `F(x) = exp(−h(K, x*))`,
//! `x* = (1/x_1, …, 1/x_d)`, and unit Fréchet marginals.

use rayon::prelude::*;

use crate::error::{ensure_dim, Error, Result};
use crate::families::{discretize, DEFAULT_ATOMS};
use crate::geometry::{DependencySet, MaxZonoid, Representation};
use crate::numeric::{chunk_rng, unit_frechet, CHUNK};
use crate::spectral::{ReferenceNorm, SpectralMeasure, DEPENDENCY_TOL};

/// A simple max-stable law, given by its dependency set and (when
/// available) a discrete spectral form used for simulation.
#[derive(Clone, Debug, PartialEq)]
pub struct MaxStableModel {
    set: DependencySet,
    discrete: Option<SpectralMeasure>,
    discretization_error: f64,
}

impl MaxStableModel {
    /// Model of a dependency set. Bodies with finite atom lists carry their
    /// exact discrete form.
    pub fn new(set: DependencySet) -> Self {
        let discrete = set.exact_spectral().map(|s| s.rebase(ReferenceNorm::L1));
        MaxStableModel { set, discrete, discretization_error: 0.0 }
    }

    /// Model with an explicit discrete form (marginal sums must be 1).
    pub fn with_discrete(set: DependencySet, sigma: SpectralMeasure, error: f64) -> Result<Self> {
        ensure_dim(set.dim(), sigma.dim())?;
        check_unit_marginals(&sigma)?;
        Ok(MaxStableModel { set, discrete: Some(sigma.rebase(ReferenceNorm::L1)), discretization_error: error })
    }

    /// Model whose dependency set is the discrete measure itself.
    pub fn from_spectral(sigma: SpectralMeasure) -> Result<Self> {
        check_unit_marginals(&sigma)?;
        let set = DependencySet::new(MaxZonoid::from_spectral(sigma))?;
        Ok(MaxStableModel::new(set))
    }

    /// Attaches an `m`-atom discretization when no exact discrete form exists.
    pub fn discretized(self, m: usize) -> Result<Self> {
        if self.discrete.is_some() {
            return Ok(self);
        }
        let disc = discretize(&self.set, m)?;
        Ok(MaxStableModel { discrete: Some(disc.measure), discretization_error: disc.max_error, set: self.set })
    }

    pub fn dependency_set(&self) -> &DependencySet {
        &self.set
    }

    pub fn dim(&self) -> usize {
        self.set.dim()
    }

    pub fn discrete_form(&self) -> Option<&SpectralMeasure> {
        self.discrete.as_ref()
    }

    /// Support-function error of the discrete form (0 when exact).
    pub fn discretization_error(&self) -> f64 {
        self.discretization_error
    }

    /// `h(K, x)`; the stable tail dependence function.
    pub fn tail_dependence(&self, x: &[f64]) -> Result<f64> {
        self.set.support(x)
    }
}

fn check_unit_marginals(sigma: &SpectralMeasure) -> Result<()> {
    let sums = sigma.marginal_sums();
    if sums.iter().all(|s| (s - 1.0).abs() <= DEPENDENCY_TOL) {
        Ok(())
    } else {
        Err(Error::NotDependency { marginals: sums })
    }
}

fn inverted(x: &[f64]) -> Vec<f64> {
    x.iter()
        .map(|&v| if v == f64::INFINITY { 0.0 } else if v == 0.0 { f64::INFINITY } else { 1.0 / v })
        .collect()
}

/// `F(x) = exp(−h(K, x*))` for `x ∈ [0, ∞]^d`; infinite coordinates
/// marginalize, zero coordinates give 0.
pub fn cdf(model: &MaxStableModel, x: &[f64]) -> Result<f64> {
    ensure_dim(model.dim(), x.len())?;
    if let Some(bad) = x.iter().find(|v| !(**v >= 0.0)) {
        return Err(Error::Domain(format!("cdf argument has negative or NaN coordinate {bad}")));
    }
    if x.contains(&0.0) {
        return Ok(0.0);
    }
    Ok((-model.set.h(&inverted(x))).exp())
}

/// `C(u) = exp(−h(K, (−log u_1, …, −log u_d)))` on `[0, 1]^d`.
pub fn copula(model: &MaxStableModel, u: &[f64]) -> Result<f64> {
    ensure_dim(model.dim(), u.len())?;
    if let Some(bad) = u.iter().find(|v| !(**v >= 0.0 && **v <= 1.0)) {
        return Err(Error::Domain(format!("copula argument {bad} outside [0, 1]")));
    }
    if u.contains(&0.0) {
        return Ok(0.0);
    }
    let y: Vec<f64> = u.iter().map(|&v| if v == 1.0 { 0.0 } else { -v.ln() }).collect();
    Ok((-model.set.h(&y)).exp())
}

/// Pickands function `A(t) = h(K, (t_1, …, t_{d−1}, 1 − Σt))`; `t` holds the
/// first `d − 1` simplex coordinates.
pub fn pickands(model: &MaxStableModel, t: &[f64]) -> Result<f64> {
    let d = model.dim();
    if d < 2 {
        return Err(Error::UnsupportedDimension { op: "pickands", required: "≥ 2", found: d });
    }
    ensure_dim(d - 1, t.len())?;
    let s: f64 = t.iter().sum();
    if t.iter().any(|v| !(*v >= -1e-15)) || s > 1.0 + 1e-12 {
        return Err(Error::Domain(format!("{t:?} is not in the unit simplex")));
    }
    let mut x: Vec<f64> = t.iter().map(|v| v.max(0.0)).collect();
    x.push((1.0 - s).max(0.0));
    Ok(model.set.h(&x))
}

/// Points on the boundary of `{x : F(x) ≥ α}` in the plane, ordered from
/// the `x_2`-axis side to the `x_1`-axis side.
///
/// The level set is `(1/c)·{y* : y ∈ K°}` with `c = −log α`, so along a
/// direction `u` of the open quadrant the boundary point is
/// `x_i = h(K, u) / (c u_i)`. Directions are `points_n` equiangular rays
/// together with the rays through the vertices of the polar polygon.
pub fn quantile_curve(model: &MaxStableModel, alpha: f64, points_n: usize) -> Result<Vec<[f64; 2]>> {
    let d = model.dim();
    if d != 2 {
        return Err(Error::UnsupportedDimension { op: "quantile_curve", required: "2", found: d });
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!("quantile level must lie in (0, 1), got {alpha}")));
    }
    let c = -alpha.ln();
    let mut angles: Vec<f64> = (1..=points_n)
        .map(|j| std::f64::consts::FRAC_PI_2 * j as f64 / (points_n + 1) as f64)
        .collect();
    if let Some(p) = model.set.to_polygon_2d() {
        for v in p.polar().vertices() {
            if v[0] > 0.0 && v[1] > 0.0 {
                angles.push(v[1].atan2(v[0]));
            }
        }
    }
    angles.sort_by(f64::total_cmp);
    angles.dedup_by(|a, b| (*a - *b).abs() < 1e-13);
    Ok(angles
        .into_iter()
        .map(|th| {
            let u = [th.cos(), th.sin()];
            let h = model.set.h(&u);
            [h / (c * u[0]), h / (c * u[1])]
        })
        .collect())
}

/// `n × d` matrix of positive observations, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleMatrix {
    n: usize,
    d: usize,
    data: Vec<f64>,
    seed: Option<u64>,
}

impl SampleMatrix {
    pub fn new(n: usize, d: usize, data: Vec<f64>, seed: Option<u64>) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidParameter("sample dimension must be at least 1".into()));
        }
        if data.len() != n * d {
            return Err(Error::DimensionMismatch { expected: n * d, found: data.len() });
        }
        if let Some(bad) = data.iter().find(|v| !(**v > 0.0) || !v.is_finite()) {
            return Err(Error::Domain(format!("samples must be positive and finite, found {bad}")));
        }
        Ok(SampleMatrix { n, d, data, seed })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let d = rows.first().map(Vec::len).ok_or(Error::Empty("sample rows"))?;
        let mut data = Vec::with_capacity(rows.len() * d);
        for r in rows {
            ensure_dim(d, r.len())?;
            data.extend_from_slice(r);
        }
        SampleMatrix::new(rows.len(), d, data, None)
    }

    pub fn nrows(&self) -> usize {
        self.n
    }

    pub fn ncols(&self) -> usize {
        self.d
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.d..(i + 1) * self.d]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.d)
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.rows().map(|r| r[j]).collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

/// Exact simulation `ξ_j = max_k ζ_k a_{kj}` with iid unit Fréchet `ζ_k`,
/// where `a_{kj} = w_k a_{k,j}` for the atoms `(a_k, w_k)` on the ℓ1 simplex.
///
/// Models without a discrete form are discretized with
/// [`DEFAULT_ATOMS`] atoms first. Rows are generated in chunks of
/// [`CHUNK`] with per-chunk streams, so the output depends only on
/// `(model, n, seed)`.
pub fn simulate(model: &MaxStableModel, n: usize, seed: u64) -> Result<SampleMatrix> {
    if n == 0 {
        return Err(Error::InvalidParameter("number of samples must be positive".into()));
    }
    let owned;
    let sigma = match &model.discrete {
        Some(s) => s,
        None => {
            owned = discretize(&model.set, DEFAULT_ATOMS)?.measure;
            &owned
        }
    };
    check_unit_marginals(sigma)?;
    let d = sigma.dim();
    let weights: Vec<Vec<f64>> = sigma
        .rebase(ReferenceNorm::L1)
        .atoms()
        .iter()
        .map(|a| a.point.iter().map(|c| c * a.mass).collect())
        .collect();
    let chunks = n.div_ceil(CHUNK);
    let blocks: Vec<Vec<f64>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let rows = CHUNK.min(n - c * CHUNK);
            let mut rng = chunk_rng(seed, c as u64);
            let mut out = vec![0.0_f64; rows * d];
            for r in 0..rows {
                let xi = &mut out[r * d..(r + 1) * d];
                for w in &weights {
                    let z = unit_frechet(&mut rng);
                    for (x, a) in xi.iter_mut().zip(w) {
                        *x = x.max(z * a);
                    }
                }
            }
            out
        })
        .collect();
    let data: Vec<f64> = blocks.into_iter().flatten().collect();
    SampleMatrix::new(n, d, data, Some(seed))
}

/// Relative finite-difference step for the mixed derivative.
fn fd_step(d: usize) -> f64 {
    if d == 2 {
        1e-4
    } else {
        2e-3
    }
}

fn mixed_derivative<F: Fn(&[f64]) -> f64>(l: &F, x: &[f64], steps: &[f64]) -> f64 {
    let d = x.len();
    let mut acc = 0.0;
    let mut y = vec![0.0; d];
    for mask in 0u32..(1 << d) {
        let mut sign = 1.0;
        for i in 0..d {
            if mask & (1 << i) != 0 {
                y[i] = x[i] - steps[i];
                sign = -sign;
            } else {
                y[i] = x[i] + steps[i];
            }
        }
        acc += sign * l(&y);
    }
    acc / steps.iter().map(|h| 2.0 * h).product::<f64>()
}

/// Density of the exponent measure at `z ∈ (0, ∞)^d`, `d ∈ {2, 3}`:
/// `f(z) = (−1)^{d−1} ∂^d l/∂x_1…∂x_d (z*) · ∏ z_i^{−2}` with `l = h(K, ·)`,
/// by central mixed differences (step `1e-4·x_i` in 2-D, `2e-3·x_i` in 3-D)
/// with one Richardson extrapolation.
pub fn exponent_density(model: &MaxStableModel, z: &[f64]) -> Result<f64> {
    let d = model.dim();
    if d != 2 && d != 3 {
        return Err(Error::UnsupportedDimension { op: "exponent_density", required: "2 or 3", found: d });
    }
    ensure_dim(d, z.len())?;
    if let Some(bad) = z.iter().find(|v| !(**v > 0.0) || !v.is_finite()) {
        return Err(Error::Domain(format!("density argument must be positive and finite, found {bad}")));
    }
    let k: &MaxZonoid = &model.set;
    let discrete = matches!(k.representation(), Representation::Spectral(_) | Representation::Polygon(_));
    if discrete {
        // Atoms on the axes carry no interior mass; any other atom makes the
        // exponent measure singular.
        let sigma = k.exact_spectral().expect("discrete representation");
        if sigma.atoms().iter().all(|a| a.point.iter().filter(|&&c| c > 0.0).count() == 1) {
            return Ok(0.0);
        }
        return Err(Error::DensityUnavailable);
    }
    let x: Vec<f64> = z.iter().map(|v| 1.0 / v).collect();
    let l = |y: &[f64]| k.h(y);
    let c = fd_step(d);
    let steps: Vec<f64> = x.iter().map(|v| c * v).collect();
    let half: Vec<f64> = steps.iter().map(|h| 0.5 * h).collect();
    let d1 = mixed_derivative(&l, &x, &steps);
    let d2 = mixed_derivative(&l, &x, &half);
    let deriv = (4.0 * d2 - d1) / 3.0;
    let sign = if d % 2 == 1 { 1.0 } else { -1.0 };
    let jac: f64 = z.iter().map(|v| v.powi(-2)).product();
    Ok(sign * deriv * jac)
}

/// Exponent-measure mass of the box `(a, b]` in the plane by
/// inclusion–exclusion of `ν(x) = h(K, x*)`.
pub fn exponent_box_mass_2d(model: &MaxStableModel, a: [f64; 2], b: [f64; 2]) -> Result<f64> {
    let d = model.dim();
    if d != 2 {
        return Err(Error::UnsupportedDimension { op: "exponent_box_mass_2d", required: "2", found: d });
    }
    if !(a[0] > 0.0 && a[1] > 0.0 && b[0] > a[0] && b[1] > a[1]) {
        return Err(Error::Domain(format!("box ({a:?}, {b:?}] must satisfy 0 < a < b")));
    }
    let nu = |p: [f64; 2]| model.set.h(&[1.0 / p[0], 1.0 / p[1]]);
    Ok(-(nu(a) - nu([b[0], a[1]]) - nu([a[0], b[1]]) + nu(b)))
}

/// `max_x |F(n x)^n − F(x)|` over the grid for an arbitrary distribution
/// function; zero for max-stable laws with unit Fréchet marginals.
pub fn max_stability_deviation<F: Fn(&[f64]) -> f64>(f: F, n_fold: u32, grid: &[Vec<f64>]) -> Result<f64> {
    if n_fold < 2 {
        return Err(Error::InvalidParameter(format!("n_fold must be at least 2, got {n_fold}")));
    }
    let n = n_fold as f64;
    Ok(grid
        .iter()
        .map(|x| {
            let nx: Vec<f64> = x.iter().map(|v| n * v).collect();
            (f(&nx).powi(n_fold as i32) - f(x)).abs()
        })
        .fold(0.0, f64::max))
}

/// [`max_stability_deviation`] for a model's distribution function.
pub fn max_stability_check(model: &MaxStableModel, n_fold: u32, grid: &[Vec<f64>]) -> Result<f64> {
    for x in grid {
        ensure_dim(model.dim(), x.len())?;
    }
    max_stability_deviation(|x| cdf(model, x).unwrap_or(f64::NAN), n_fold, grid)
}

/// Regular grid with `per_axis` points per coordinate on `(0, upper]^d`.
pub fn positive_grid(d: usize, per_axis: usize, upper: f64) -> Vec<Vec<f64>> {
    let axis: Vec<f64> = (1..=per_axis).map(|i| upper * i as f64 / per_axis as f64).collect();
    let mut out = vec![Vec::new()];
    for _ in 0..d {
        out = out
            .into_iter()
            .flat_map(|p| {
                axis.iter().map(move |&v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::make_family;
    use crate::numeric::gauss_legendre;
    use crate::spectral::Atom;

    fn model(s: &str) -> MaxStableModel {
        MaxStableModel::new(make_family(&s.parse().unwrap()).unwrap())
    }

    #[test]
    fn cdf_values() {
        assert!((cdf(&model("independence"), &[1.0, 1.0]).unwrap() - (-2.0f64).exp()).abs() < 1e-15);
        assert!((cdf(&model("dependence"), &[1.0, 1.0]).unwrap() - (-1.0f64).exp()).abs() < 1e-15);
        let want = (-(2.0f64).sqrt()).exp();
        assert!((cdf(&model("logistic(p=2)"), &[1.0, 1.0]).unwrap() - want).abs() < 1e-15);
        assert_eq!(cdf(&model("logistic(p=2)"), &[0.0, 1.0]).unwrap(), 0.0);
        assert!(cdf(&model("logistic(p=2)"), &[-1.0, 1.0]).is_err());
    }

    #[test]
    fn marginals_are_unit_frechet() {
        for s in ["independence", "logistic(p=3)", "husler_reiss(lambda=0.6)", "marshall_olkin(alpha1=0.2, alpha2=0.9)"] {
            let m = model(s);
            for x in [0.3, 1.0, 4.5] {
                let f = cdf(&m, &[x, f64::INFINITY]).unwrap();
                assert!((f - (-1.0 / x).exp()).abs() < 1e-15, "{s}");
                let f = cdf(&m, &[f64::INFINITY, x]).unwrap();
                assert!((f - (-1.0 / x).exp()).abs() < 1e-15, "{s}");
            }
        }
    }

    #[test]
    fn copula_endpoints_and_consistency() {
        let indep = model("independence");
        assert!((copula(&indep, &[0.3, 0.6]).unwrap() - 0.18).abs() < 1e-15);
        let dep = model("dependence");
        assert!((copula(&dep, &[0.3, 0.6]).unwrap() - 0.3).abs() < 1e-15);
        let m = model("husler_reiss(lambda=0.8)");
        assert!((copula(&m, &[0.37, 1.0]).unwrap() - 0.37).abs() < 1e-12);
        let x = [0.7_f64, 2.3];
        let u = [(-1.0 / x[0]).exp(), (-1.0 / x[1]).exp()];
        assert!((copula(&m, &u).unwrap() - cdf(&m, &x).unwrap()).abs() < 1e-12);
        assert!(copula(&m, &[1.2, 0.5]).is_err());
    }

    #[test]
    fn pickands_values_and_convexity() {
        assert!((pickands(&model("independence"), &[0.5]).unwrap() - 1.0).abs() < 1e-15);
        assert!((pickands(&model("dependence"), &[0.5]).unwrap() - 0.5).abs() < 1e-15);
        assert!((pickands(&model("logistic(p=2)"), &[0.5]).unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
        let m = model("neg_logistic(lambda=0.8, p=-1.5)");
        let h = 1e-3;
        for j in 1..999 {
            let t = j as f64 / 1000.0;
            let a = pickands(&m, &[t]).unwrap();
            assert!(a >= t.max(1.0 - t) - 1e-12 && a <= 1.0 + 1e-12);
            if t > h && t < 1.0 - h {
                let dd = pickands(&m, &[t - h]).unwrap() - 2.0 * a + pickands(&m, &[t + h]).unwrap();
                assert!(dd >= -1e-9);
            }
        }
        assert!(pickands(&m, &[1.5]).is_err());
        let m3 = model("logistic(p=2, d=3)");
        assert!((pickands(&m3, &[1.0 / 3.0, 1.0 / 3.0]).unwrap() - (1.0f64 / 3.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn quantile_curve_level() {
        for (s, alpha) in [("independence", (-2.0f64).exp()), ("logistic(p=2)", 0.3), ("marshall_olkin(alpha1=0.4, alpha2=0.7)", 0.8)] {
            let m = model(s);
            let curve = quantile_curve(&m, alpha, 101).unwrap();
            for x in &curve {
                assert!((cdf(&m, x).unwrap() - alpha).abs() < 1e-9, "{s}");
            }
        }
        let curve = quantile_curve(&model("independence"), (-2.0f64).exp(), 101).unwrap();
        assert!(curve.iter().any(|x| (x[0] - 1.0).abs() < 1e-12 && (x[1] - 1.0).abs() < 1e-12));
        // dependence: the polar vertex (1,1) gives the corner of the L-shaped level set
        let curve = quantile_curve(&model("dependence"), (-1.0f64).exp(), 10).unwrap();
        assert!(curve.iter().any(|x| (x[0] - 1.0).abs() < 1e-12 && (x[1] - 1.0).abs() < 1e-12));
        assert!(quantile_curve(&model("logistic(p=2, d=3)"), 0.5, 10).is_err());
    }

    #[test]
    fn simulation_is_deterministic_and_dependent() {
        let m = model("dependence(d=3)");
        let a = simulate(&m, 5000, 11).unwrap();
        let b = simulate(&m, 5000, 11).unwrap();
        assert_eq!(a, b);
        for r in a.rows() {
            assert!((r[0] - r[1]).abs() <= 1e-12 * r[0] && (r[0] - r[2]).abs() <= 1e-12 * r[0]);
        }
        let c = simulate(&m, 5000, 12).unwrap();
        assert_ne!(a, c);
        assert!(simulate(&m, 0, 1).is_err());
    }

    #[test]
    fn simulation_rejects_unnormalized_measures() {
        let sigma = SpectralMeasure::new(ReferenceNorm::L1, vec![Atom::new(vec![1.0, 0.0], 0.5), Atom::new(vec![0.0, 1.0], 1.0)]).unwrap();
        assert!(MaxStableModel::from_spectral(sigma).is_err());
    }

    #[test]
    fn density_of_logistic_two() {
        let m = model("logistic(p=2)");
        let f = exponent_density(&m, &[1.0, 1.0]).unwrap();
        assert!((f - 2f64.powf(-1.5)).abs() < 1e-8, "{f}");
        // symbolic oracle at another point: −∂²‖x‖/∂x1∂x2 = x1x2‖x‖^{-3} at x = z*
        let z = [0.5_f64, 2.0];
        let x = [2.0_f64, 0.5];
        let n = (x[0] * x[0] + x[1] * x[1]).sqrt();
        let want = x[0] * x[1] / n.powi(3) * z[0].powi(-2) * z[1].powi(-2);
        assert!((exponent_density(&m, &z).unwrap() - want).abs() < 1e-7 * want.max(1.0));
    }

    #[test]
    fn density_three_dimensional_logistic() {
        // ∂³‖x‖_2 / ∂x1∂x2∂x3 = 3 x1 x2 x3 ‖x‖^{-5}
        let m = model("logistic(p=2, d=3)");
        let z = [1.0, 0.8, 1.5];
        let x: Vec<f64> = z.iter().map(|v| 1.0 / v).collect();
        let n = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let want = 3.0 * x[0] * x[1] * x[2] / n.powi(5) * z.iter().map(|v| v.powi(-2)).product::<f64>();
        let got = exponent_density(&m, &z).unwrap();
        assert!((got - want).abs() < 1e-6, "{got} vs {want}");
    }

    #[test]
    fn density_special_cases() {
        assert_eq!(exponent_density(&model("independence"), &[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(exponent_density(&model("marshall_olkin(alpha1=0.5, alpha2=0.5)"), &[1.0, 2.0]), Err(Error::DensityUnavailable));
    }

    #[test]
    fn density_integrates_to_box_mass() {
        for s in ["logistic(p=2)", "husler_reiss(lambda=0.7)", "neg_logistic(lambda=0.6, p=-2)"] {
            let m = model(s);
            let (nodes, weights) = gauss_legendre(24);
            let mut integral = 0.0;
            for (xi, wi) in nodes.iter().zip(&weights) {
                for (yj, wj) in nodes.iter().zip(&weights) {
                    let z = [1.5 + 0.5 * xi, 1.5 + 0.5 * yj];
                    integral += 0.25 * wi * wj * exponent_density(&m, &z).unwrap();
                }
            }
            let mass = exponent_box_mass_2d(&m, [1.0, 1.0], [2.0, 2.0]).unwrap();
            assert!((integral - mass).abs() < 1e-6, "{s}: {integral} vs {mass}");
        }
    }

    #[test]
    fn max_stability() {
        let grid = positive_grid(2, 5, 3.0);
        assert_eq!(grid.len(), 25);
        for s in ["independence", "logistic(p=2)", "husler_reiss(lambda=1.3)"] {
            for n in [2, 3, 5] {
                assert!(max_stability_check(&model(s), n, &grid).unwrap() < 1e-12);
            }
        }
        // h + 0.1 is not homogeneous
        let m = model("logistic(p=2)");
        let corrupted = |x: &[f64]| {
            let y: Vec<f64> = x.iter().map(|v| 1.0 / v).collect();
            (-(m.dependency_set().h(&y) + 0.1)).exp()
        };
        assert!(max_stability_deviation(corrupted, 3, &grid).unwrap() > 0.01);
    }
}
