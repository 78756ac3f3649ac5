//! Named parametric dependency sets and their discretization into atoms.
//!
//! | family | `h(K, x)` |
//! |---|---|
//! | independence | `Σ x_i` |
//! | dependence | `max_i x_i` |
//! | logistic(p), `p ∈ [1, ∞]` | `‖x‖_p` |
//! | neg_logistic(λ, p), `λ ∈ [0,1]`, `p ∈ [−∞, 0]`, d = 2 | `‖x‖_1 − λ‖x‖_p` |
//! | husler_reiss(λ), `λ ∈ [0, ∞]`, d = 2 | `x_1Φ(λ + r/2λ) + x_2Φ(λ − r/2λ)`, `r = log(x_1/x_2)` |
//! | marshall_olkin(α_1, α_2), d = 2 | polygon `conv{0, e_1, (1, α_2), (α_1, 1), e_2}` |
//! | matrix_weights(A) | `Σ_i max_j a_{ij} x_j`, column sums 1 |
//!
//! Families have a canonical text form, e.g. `logistic(p=2, d=3)` or
//! `matrix_weights(a=[0.5 0.5; 0.5 0.5], d=2)`.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::geometry::{DependencySet, MaxZonoid, Polygon2D};
use crate::numeric::{chebyshev_lobatto, nnls, orthant_directions, simplex_grid, std_normal_cdf};
use crate::spectral::{Atom, ReferenceNorm, SpectralMeasure};

/// Smooth (or piecewise smooth) family norms evaluated in closed form.
#[derive(Clone, Debug, PartialEq)]
pub enum AnalyticNorm {
    /// `‖x‖_p` in dimension `d`.
    Logistic { d: usize, p: f64 },
    /// `x_1 + x_2 − λ‖x‖_p` with `p ≤ 0`.
    NegLogistic { lambda: f64, p: f64 },
    HuslerReiss { lambda: f64 },
}

fn any_inf(x: &[f64]) -> bool {
    x.iter().any(|v| v.is_infinite())
}

fn max_norm(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, &v| m.max(v))
}

/// `‖x‖_p` for `p ≥ 1`, scaled to avoid overflow.
fn lp_norm(x: &[f64], p: f64) -> f64 {
    if any_inf(x) {
        return f64::INFINITY;
    }
    if p == 1.0 {
        return x.iter().sum();
    }
    let m = max_norm(x);
    if p.is_infinite() || m == 0.0 {
        return m;
    }
    m * x.iter().map(|v| (v / m).powf(p)).sum::<f64>().powf(1.0 / p)
}

/// Power mean `(x_1^p + x_2^p)^{1/p}` for `p ≤ 0`; zero if any coordinate is
/// zero, `min` for `p = −∞`, `0` for `p = 0`.
fn neg_power(x: &[f64], p: f64) -> f64 {
    let lo = x.iter().fold(f64::INFINITY, |m, &v| m.min(v));
    if lo == 0.0 || p == 0.0 {
        return 0.0;
    }
    if p == f64::NEG_INFINITY {
        return lo;
    }
    lo * x.iter().map(|v| (v / lo).powf(p)).sum::<f64>().powf(1.0 / p)
}

/// Indicator of the maximal coordinates: the coordinatewise maxima of the
/// support set of the unit cross-polytope.
fn argmax_indicator(x: &[f64]) -> Vec<f64> {
    let m = max_norm(x);
    x.iter().map(|&v| if v >= m * (1.0 - 1e-12) { 1.0 } else { 0.0 }).collect()
}

impl AnalyticNorm {
    pub fn dim(&self) -> usize {
        match self {
            AnalyticNorm::Logistic { d, .. } => *d,
            _ => 2,
        }
    }

    /// `h(K, x)` for `x ∈ [0, ∞]^d`.
    pub fn eval(&self, x: &[f64]) -> f64 {
        match *self {
            AnalyticNorm::Logistic { p, .. } => lp_norm(x, p),
            AnalyticNorm::NegLogistic { lambda, p } => {
                if any_inf(x) {
                    return f64::INFINITY;
                }
                x[0] + x[1] - lambda * neg_power(x, p)
            }
            AnalyticNorm::HuslerReiss { lambda } => {
                let (a, b) = (x[0], x[1]);
                if a.is_infinite() || b.is_infinite() {
                    return f64::INFINITY;
                }
                if a == 0.0 || b == 0.0 {
                    return a + b;
                }
                if lambda == 0.0 {
                    return a.max(b);
                }
                if lambda.is_infinite() {
                    return a + b;
                }
                let r = (a / b).ln();
                a * std_normal_cdf(lambda + r / (2.0 * lambda)) + b * std_normal_cdf(lambda - r / (2.0 * lambda))
            }
        }
    }

    /// Coordinatewise maxima of the support set (the gradient where `h` is
    /// differentiable).
    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        match *self {
            AnalyticNorm::Logistic { p, d } => {
                if p == 1.0 {
                    return vec![1.0; d];
                }
                if p.is_infinite() || x.iter().all(|&v| v == 0.0) {
                    return argmax_indicator(x);
                }
                let n = lp_norm(x, p);
                x.iter().map(|&v| (v / n).powf(p - 1.0)).collect()
            }
            AnalyticNorm::NegLogistic { lambda, p } => {
                if p == 0.0 || lambda == 0.0 {
                    return vec![1.0, 1.0];
                }
                if p == f64::NEG_INFINITY {
                    // 1 − λ·(indicator of the minimal coordinates)
                    let lo = x[0].min(x[1]);
                    return x.iter().map(|&v| if v <= lo { 1.0 - lambda } else { 1.0 }).collect();
                }
                if x[0] == 0.0 || x[1] == 0.0 {
                    // ‖x‖_p behaves like the smaller coordinate near the axes
                    return x.iter().map(|&v| if v == 0.0 { 1.0 - lambda } else { 1.0 }).collect();
                }
                let n = neg_power(x, p);
                x.iter().map(|&v| 1.0 - lambda * (v / n).powf(p - 1.0)).collect()
            }
            AnalyticNorm::HuslerReiss { lambda } => {
                let (a, b) = (x[0], x[1]);
                if lambda.is_infinite() {
                    return vec![1.0, 1.0];
                }
                if lambda == 0.0 {
                    return argmax_indicator(x);
                }
                if a == 0.0 && b == 0.0 {
                    return vec![1.0, 1.0];
                }
                if a == 0.0 {
                    return vec![0.0, 1.0];
                }
                if b == 0.0 {
                    return vec![1.0, 0.0];
                }
                let r = (a / b).ln();
                vec![std_normal_cdf(lambda + r / (2.0 * lambda)), std_normal_cdf(lambda - r / (2.0 * lambda))]
            }
        }
    }

    /// Exact atoms for the parameter values where the family degenerates to
    /// independence or complete dependence.
    pub fn exact_atoms(&self) -> Option<SpectralMeasure> {
        let d = self.dim();
        let independent = || {
            let atoms = (0..d)
                .map(|i| {
                    let mut e = vec![0.0; d];
                    e[i] = 1.0;
                    Atom::new(e, 1.0)
                })
                .collect();
            SpectralMeasure::new(ReferenceNorm::L1, atoms).ok()
        };
        let dependent = || SpectralMeasure::new(ReferenceNorm::L1, vec![Atom::new(vec![1.0 / d as f64; d], d as f64)]).ok();
        match *self {
            AnalyticNorm::Logistic { p, .. } if p == 1.0 => independent(),
            AnalyticNorm::Logistic { p, .. } if p.is_infinite() => dependent(),
            AnalyticNorm::NegLogistic { lambda, p } if lambda == 0.0 || p == 0.0 => independent(),
            AnalyticNorm::NegLogistic { lambda, p } if p == f64::NEG_INFINITY => {
                // x_1 + x_2 − λ min(x_1, x_2): (1−λ) on each axis plus λ on the diagonal
                let mut atoms = vec![Atom::new(vec![0.5, 0.5], 2.0 * lambda)];
                if lambda < 1.0 {
                    atoms.push(Atom::new(vec![1.0, 0.0], 1.0 - lambda));
                    atoms.push(Atom::new(vec![0.0, 1.0], 1.0 - lambda));
                }
                SpectralMeasure::new(ReferenceNorm::L1, atoms).ok()
            }
            AnalyticNorm::HuslerReiss { lambda } if lambda == 0.0 => dependent(),
            AnalyticNorm::HuslerReiss { lambda } if lambda.is_infinite() => independent(),
            _ => None,
        }
    }

    /// Simplex parameters where `t ↦ h(t, 1−t)` has kinks (2-D only).
    pub fn kinks_2d(&self) -> Vec<f64> {
        let kinked = match *self {
            AnalyticNorm::Logistic { d, p } => d == 2 && p.is_infinite(),
            AnalyticNorm::NegLogistic { lambda, p } => lambda > 0.0 && p == f64::NEG_INFINITY,
            AnalyticNorm::HuslerReiss { lambda } => lambda == 0.0,
        };
        if kinked {
            vec![0.5]
        } else {
            Vec::new()
        }
    }
}

/// Parametric family.
#[derive(Clone, Debug, PartialEq)]
pub enum Family {
    Independence,
    Dependence,
    Logistic { p: f64 },
    NegLogistic { lambda: f64, p: f64 },
    HuslerReiss { lambda: f64 },
    MarshallOlkin { alpha1: f64, alpha2: f64 },
    /// `m × d` matrix of nonnegative weights with unit column sums.
    MatrixWeights { rows: Vec<Vec<f64>> },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Independence => "independence",
            Family::Dependence => "dependence",
            Family::Logistic { .. } => "logistic",
            Family::NegLogistic { .. } => "neg_logistic",
            Family::HuslerReiss { .. } => "husler_reiss",
            Family::MarshallOlkin { .. } => "marshall_olkin",
            Family::MatrixWeights { .. } => "matrix_weights",
        }
    }
}

/// A family together with its dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct FamilySpec {
    pub family: Family,
    pub dim: usize,
}

impl FamilySpec {
    pub fn new(family: Family, dim: usize) -> Self {
        FamilySpec { family, dim }
    }

    /// Checks the parameter ranges.
    pub fn validate(&self) -> Result<()> {
        let d = self.dim;
        if d == 0 {
            return Err(Error::InvalidParameter("dimension must be at least 1".into()));
        }
        let need_2d = |name: &str| -> Result<()> {
            if d == 2 {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("{name} is defined for d = 2 only, got d = {d}")))
            }
        };
        match &self.family {
            Family::Independence | Family::Dependence => Ok(()),
            Family::Logistic { p } => {
                if *p >= 1.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter(format!("logistic requires p ≥ 1, got {p}")))
                }
            }
            Family::NegLogistic { lambda, p } => {
                need_2d("neg_logistic")?;
                if !(0.0..=1.0).contains(lambda) {
                    return Err(Error::InvalidParameter(format!("neg_logistic requires λ ∈ [0, 1], got {lambda}")));
                }
                if !(*p <= 0.0) {
                    return Err(Error::InvalidParameter(format!("neg_logistic requires p ∈ [−∞, 0], got {p}")));
                }
                Ok(())
            }
            Family::HuslerReiss { lambda } => {
                need_2d("husler_reiss")?;
                if *lambda >= 0.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter(format!("husler_reiss requires λ ∈ [0, ∞], got {lambda}")))
                }
            }
            Family::MarshallOlkin { alpha1, alpha2 } => {
                need_2d("marshall_olkin")?;
                for a in [alpha1, alpha2] {
                    if !(0.0..=1.0).contains(a) {
                        return Err(Error::InvalidParameter(format!("marshall_olkin requires α ∈ [0, 1], got {a}")));
                    }
                }
                Ok(())
            }
            Family::MatrixWeights { rows } => {
                if rows.is_empty() {
                    return Err(Error::Empty("weight matrix"));
                }
                for row in rows {
                    if row.len() != d {
                        return Err(Error::DimensionMismatch { expected: d, found: row.len() });
                    }
                    if row.iter().any(|a| !(*a >= 0.0) || !a.is_finite()) {
                        return Err(Error::InvalidParameter(format!("weights must be nonnegative and finite: {row:?}")));
                    }
                }
                for j in 0..d {
                    let s: f64 = rows.iter().map(|r| r[j]).sum();
                    if (s - 1.0).abs() > 1e-9 {
                        return Err(Error::InvalidParameter(format!("column {} of the weight matrix sums to {s}, not 1", j + 1)));
                    }
                }
                Ok(())
            }
        }
    }
}

fn fmt_num(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{v}")
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let params = match &self.family {
            Family::Independence | Family::Dependence => String::new(),
            Family::Logistic { p } => format!("p={}, ", fmt_num(*p)),
            Family::NegLogistic { lambda, p } => format!("lambda={}, p={}, ", fmt_num(*lambda), fmt_num(*p)),
            Family::HuslerReiss { lambda } => format!("lambda={}, ", fmt_num(*lambda)),
            Family::MarshallOlkin { alpha1, alpha2 } => format!("alpha1={}, alpha2={}, ", fmt_num(*alpha1), fmt_num(*alpha2)),
            Family::MatrixWeights { rows } => {
                let body: Vec<String> = rows
                    .iter()
                    .map(|r| r.iter().map(|v| fmt_num(*v)).collect::<Vec<_>>().join(" "))
                    .collect();
                format!("a=[{}], ", body.join("; "))
            }
        };
        write!(f, "{}({}d={})", self.family.name(), params, self.dim)
    }
}

fn parse_num(key: &str, v: &str) -> Result<f64> {
    v.trim()
        .parse::<f64>()
        .map_err(|_| Error::InvalidParameter(format!("parameter {key}: cannot parse '{v}' as a number")))
}

/// Splits on commas that are not inside brackets.
fn split_top_level(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '[' => depth += 1,
            ']' => depth -= 1,
            ',' if depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out.into_iter().map(str::trim).filter(|p| !p.is_empty()).collect()
}

/// Parses `a=[0.5 0.5; 0.5 0.5]` style matrices.
pub fn parse_matrix(v: &str) -> Result<Vec<Vec<f64>>> {
    let inner = v
        .trim()
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| Error::InvalidParameter(format!("matrix must be written as [a b; c d], got '{v}'")))?;
    inner
        .split(';')
        .map(|row| row.split_whitespace().map(|x| parse_num("a", x)).collect::<Result<Vec<f64>>>())
        .collect()
}

impl FromStr for FamilySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, args) = match s.find('(') {
            Some(i) => {
                let rest = s[i + 1..]
                    .strip_suffix(')')
                    .ok_or_else(|| Error::InvalidParameter(format!("unbalanced parentheses in '{s}'")))?;
                (&s[..i], rest)
            }
            None => (s, ""),
        };
        let mut kv = std::collections::BTreeMap::new();
        for part in split_top_level(args) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::InvalidParameter(format!("expected key=value, got '{part}'")))?;
            kv.insert(k.trim().to_ascii_lowercase(), v.trim().to_string());
        }
        let get = |k: &str| -> Result<f64> {
            let v = kv.get(k).ok_or_else(|| Error::InvalidParameter(format!("missing parameter '{k}'")))?;
            parse_num(k, v)
        };
        let family = match name.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "independence" => Family::Independence,
            "dependence" => Family::Dependence,
            "logistic" => Family::Logistic { p: get("p")? },
            "neg_logistic" => Family::NegLogistic { lambda: get("lambda")?, p: get("p")? },
            "husler_reiss" => Family::HuslerReiss { lambda: get("lambda")? },
            "marshall_olkin" => Family::MarshallOlkin { alpha1: get("alpha1")?, alpha2: get("alpha2")? },
            "matrix_weights" => {
                let a = kv.get("a").ok_or_else(|| Error::InvalidParameter("missing parameter 'a'".into()))?;
                Family::MatrixWeights { rows: parse_matrix(a)? }
            }
            other => return Err(Error::InvalidParameter(format!("unknown family '{other}'"))),
        };
        let dim = match kv.get("d") {
            Some(v) => v
                .parse::<usize>()
                .map_err(|_| Error::InvalidParameter(format!("dimension must be a positive integer, got '{v}'")))?,
            None => match &family {
                Family::MatrixWeights { rows } => rows.first().map_or(0, Vec::len),
                _ => 2,
            },
        };
        let spec = FamilySpec { family, dim };
        spec.validate()?;
        Ok(spec)
    }
}

/// Builds the dependency set of a family.
pub fn make_family(spec: &FamilySpec) -> Result<DependencySet> {
    spec.validate()?;
    let d = spec.dim;
    let k = match &spec.family {
        Family::Independence => MaxZonoid::unit_cube(d),
        Family::Dependence => MaxZonoid::unit_cross(d),
        Family::Logistic { p } => MaxZonoid::from_analytic(AnalyticNorm::Logistic { d, p: *p }),
        Family::NegLogistic { lambda, p } => MaxZonoid::from_analytic(AnalyticNorm::NegLogistic { lambda: *lambda, p: *p }),
        Family::HuslerReiss { lambda } => MaxZonoid::from_analytic(AnalyticNorm::HuslerReiss { lambda: *lambda }),
        Family::MarshallOlkin { alpha1, alpha2 } => MaxZonoid::from_polygon(Polygon2D::new(vec![
            [1.0, 0.0],
            [1.0, *alpha2],
            [*alpha1, 1.0],
            [0.0, 1.0],
        ])?),
        Family::MatrixWeights { rows } => {
            let raw = rows.iter().map(|r| (r.clone(), 1.0));
            MaxZonoid::from_spectral(SpectralMeasure::from_unnormalized(ReferenceNorm::L1, d, raw)?)
        }
    };
    DependencySet::new(k)
}

/// Result of [`discretize`].
#[derive(Clone, Debug, PartialEq)]
pub struct Discretization {
    /// Atoms on the ℓ1 simplex with marginal sums exactly 1.
    pub measure: SpectralMeasure,
    /// Maximal support-function error on the evaluation grid (unit-norm
    /// orthant directions).
    pub max_error: f64,
}

/// Default atom count for discretizations.
pub const DEFAULT_ATOMS: usize = 1000;

/// Approximates a dependency set by `m` atoms on the ℓ1 simplex.
///
/// In the plane the Pickands function `A(t) = h(t, 1−t)` is interpolated
/// piecewise linearly at `m` Chebyshev–Lobatto knots; slope jumps become atom
/// masses, which are nonnegative by convexity, and the end slopes fix the
/// axis atoms so marginals are exact. Measured errors: about 1e-6 for
/// logistic(2) with `m = 1000`.
///
/// In dimension `d ≥ 3` masses on a Chebyshev-warped simplex grid of about
/// `m` points are fitted by nonnegative least squares to support values on a
/// finer grid, then rescaled to unit marginals.
pub fn discretize(k: &MaxZonoid, m: usize) -> Result<Discretization> {
    if m < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 atoms, got {m}")));
    }
    let d = k.dim();
    if let Some(exact) = k.exact_spectral() {
        let measure = exact.rebase(ReferenceNorm::L1).normalized()?;
        let err = support_error(k, &measure);
        return Ok(Discretization { measure, max_error: err });
    }
    let measure = if d == 1 {
        SpectralMeasure::new(ReferenceNorm::L1, vec![Atom::new(vec![1.0], k.marginals()[0])])?
    } else if d == 2 {
        discretize_2d(k, m)?
    } else {
        discretize_nnls(k, m)?
    };
    let max_error = support_error(k, &measure);
    Ok(Discretization { measure, max_error })
}

fn support_error(k: &MaxZonoid, sigma: &SpectralMeasure) -> f64 {
    let d = k.dim();
    let n = if d == 2 { 4096 } else { 5000 };
    orthant_directions(d, n)
        .iter()
        .map(|u| {
            let r: f64 = u.iter().map(|v| v * v).sum::<f64>().sqrt();
            let u: Vec<f64> = u.iter().map(|v| v / r).collect();
            (k.h(&u) - sigma.support(&u)).abs()
        })
        .fold(0.0, f64::max)
}

fn discretize_2d(k: &MaxZonoid, m: usize) -> Result<SpectralMeasure> {
    let mut knots = chebyshev_lobatto(m);
    knots.extend(k.kinks_2d());
    knots.sort_by(f64::total_cmp);
    knots.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    let a: Vec<f64> = knots.iter().map(|&t| k.h(&[t, 1.0 - t])).collect();
    let slopes: Vec<f64> = knots
        .windows(2)
        .zip(a.windows(2))
        .map(|(t, v)| (v[1] - v[0]) / (t[1] - t[0]))
        .collect();
    let mut atoms = Vec::with_capacity(knots.len());
    let first = slopes[0] + a[0];
    let last = a[a.len() - 1] - slopes[slopes.len() - 1];
    if first > 0.0 {
        atoms.push(Atom::new(vec![1.0, 0.0], first));
    }
    for (i, &t) in knots.iter().enumerate().take(knots.len() - 1).skip(1) {
        let jump = slopes[i] - slopes[i - 1];
        if jump > 0.0 {
            atoms.push(Atom::new(vec![1.0 - t, t], jump));
        }
    }
    if last > 0.0 {
        atoms.push(Atom::new(vec![0.0, 1.0], last));
    }
    SpectralMeasure::from_parts_unchecked(ReferenceNorm::L1, 2, atoms).normalized()
}

fn warp(c: f64) -> f64 {
    0.5 * (1.0 - (std::f64::consts::PI * c).cos())
}

fn discretize_nnls(k: &MaxZonoid, m: usize) -> Result<SpectralMeasure> {
    let d = k.dim();
    let mut level = 1;
    while crate::numeric::binomial(level + 1 + d - 1, d - 1) <= m as f64 {
        level += 1;
    }
    let mut candidates: Vec<Vec<f64>> = simplex_grid(level, d)
        .into_iter()
        .map(|p| {
            let w: Vec<f64> = p.iter().map(|&c| warp(c)).collect();
            let s: f64 = w.iter().sum();
            w.into_iter().map(|c| c / s).collect()
        })
        .collect();
    candidates.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    candidates.dedup_by(|a, b| a.iter().zip(b.iter()).all(|(x, y)| (x - y).abs() < 1e-12));
    let fit: Vec<Vec<f64>> = simplex_grid(2 * level, d);
    let mat = DMatrix::from_fn(fit.len(), candidates.len(), |i, j| {
        fit[i].iter().zip(&candidates[j]).fold(0.0_f64, |acc, (x, a)| acc.max(x * a))
    });
    let rhs = DVector::from_iterator(fit.len(), fit.iter().map(|x| k.h(x)));
    let w = nnls(&mat, &rhs, 20 * candidates.len());
    let atoms: Vec<Atom> = candidates
        .into_iter()
        .zip(w.iter())
        .filter(|(_, &w)| w > 1e-14)
        .map(|(p, &w)| Atom::new(p, w))
        .collect();
    if atoms.is_empty() {
        return Err(Error::Domain("discretization produced no atoms".into()));
    }
    SpectralMeasure::from_parts_unchecked(ReferenceNorm::L1, d, atoms).normalized()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{minkowski_combine, CombineMode, Weight};
    use std::f64::consts::SQRT_2;

    fn fam(s: &str) -> DependencySet {
        make_family(&s.parse().unwrap()).unwrap()
    }

    #[test]
    fn logistic_extremes() {
        let p1 = fam("logistic(p=1, d=3)");
        let pinf = fam("logistic(p=inf, d=3)");
        for x in [[1.0, 2.0, 0.5], [0.0, 1.0, 3.0]] {
            assert!((p1.h(&x) - x.iter().sum::<f64>()).abs() < 1e-14);
            assert!((pinf.h(&x) - x.iter().fold(0.0, |m: f64, v| m.max(*v))).abs() < 1e-14);
        }
    }

    #[test]
    fn logistic_ones_vector() {
        for (p, d) in [(2.0, 2), (3.0, 4), (1.5, 5)] {
            let k = make_family(&FamilySpec::new(Family::Logistic { p }, d)).unwrap();
            let ones = vec![1.0; d];
            assert!((k.h(&ones) - (d as f64).powf(1.0 / p)).abs() < 1e-13);
        }
    }

    #[test]
    fn husler_reiss_limits_and_diagonal() {
        let near_indep = fam("husler_reiss(lambda=100)");
        assert!((near_indep.h(&[1.0, 1.0]) - 2.0).abs() < 1e-12);
        let near_dep = fam("husler_reiss(lambda=0.01)");
        assert!((near_dep.h(&[1.0, 1.0]) - 1.0).abs() < 0.01);
        for lambda in [0.1, 0.5, 1.0, 2.0] {
            let k = make_family(&FamilySpec::new(Family::HuslerReiss { lambda }, 2)).unwrap();
            assert!((k.h(&[1.0, 1.0]) - 2.0 * std_normal_cdf(lambda)).abs() < 1e-14);
            assert_eq!(k.h(&[0.0, 3.0]), 3.0);
            assert_eq!(k.h(&[2.0, 0.0]), 2.0);
        }
    }

    #[test]
    fn husler_reiss_gradient_matches_finite_differences() {
        let k = AnalyticNorm::HuslerReiss { lambda: 0.7 };
        let x = [0.8, 0.3];
        let g = k.gradient(&x);
        let eps = 1e-6;
        for i in 0..2 {
            let mut a = x;
            let mut b = x;
            a[i] += eps;
            b[i] -= eps;
            let fd = (k.eval(&a) - k.eval(&b)) / (2.0 * eps);
            assert!((g[i] - fd).abs() < 1e-8, "{i}: {} vs {fd}", g[i]);
        }
    }

    #[test]
    fn neg_logistic_conventions() {
        let indep = fam("neg_logistic(lambda=0, p=-1)");
        assert!((indep.h(&[0.3, 0.9]) - 1.2).abs() < 1e-15);
        let min = fam("neg_logistic(lambda=1, p=-inf)");
        assert!((min.h(&[0.3, 0.9]) - 0.9).abs() < 1e-15);
        let k = fam("neg_logistic(lambda=0.5, p=-2)");
        let x: [f64; 2] = [1.0, 2.0];
        let pm = (x[0].powi(-2) + x[1].powi(-2)).powf(-0.5);
        assert!((k.h(&x) - (3.0 - 0.5 * pm)).abs() < 1e-14);
        assert_eq!(k.h(&[0.0, 2.0]), 2.0);
    }

    #[test]
    fn matrix_weights_extremes() {
        let id = fam("matrix_weights(a=[1 0; 0 1], d=2)");
        assert!((id.h(&[0.3, 0.4]) - 0.7).abs() < 1e-15);
        let ones = fam("matrix_weights(a=[1 1])");
        assert!((ones.h(&[0.3, 0.4]) - 0.4).abs() < 1e-15);
        let bad: Result<FamilySpec> = "matrix_weights(a=[0.5 0.5; 0.6 0.5])".parse();
        assert!(bad.is_err());
    }

    #[test]
    fn parameter_ranges_are_enforced() {
        for s in [
            "logistic(p=0.5)",
            "neg_logistic(lambda=1.5, p=-1)",
            "neg_logistic(lambda=0.5, p=1)",
            "husler_reiss(lambda=-1)",
            "husler_reiss(lambda=1, d=3)",
            "marshall_olkin(alpha1=1.2, alpha2=0.5)",
            "gumbel(p=2)",
        ] {
            assert!(s.parse::<FamilySpec>().is_err(), "{s}");
        }
    }

    #[test]
    fn text_form_round_trips() {
        for s in [
            "independence(d=4)",
            "logistic(p=inf, d=3)",
            "neg_logistic(lambda=0.25, p=-inf, d=2)",
            "marshall_olkin(alpha1=0.3, alpha2=0.7, d=2)",
            "matrix_weights(a=[0.5 0.25; 0.5 0.75], d=2)",
        ] {
            let spec: FamilySpec = s.parse().unwrap();
            assert_eq!(spec.to_string(), s);
            assert_eq!(spec.to_string().parse::<FamilySpec>().unwrap(), spec);
        }
    }

    #[test]
    fn marshall_olkin_is_a_cube_cross_combination() {
        // conv{0, e1, (1, α2), (α1, 1), e2} = μ∘Δ + (1−μ)∘[0,1]² with μ = (1−α1, 1−α2)
        for (a1, a2) in [(0.5, 0.5), (0.2, 0.7), (0.0, 1.0), (0.9, 0.1)] {
            let mo = make_family(&FamilySpec::new(Family::MarshallOlkin { alpha1: a1, alpha2: a2 }, 2)).unwrap();
            let comb = minkowski_combine(
                &MaxZonoid::unit_cross(2),
                &MaxZonoid::unit_cube(2),
                &Weight::Vector(vec![1.0 - a1, 1.0 - a2]),
                CombineMode::Sum,
            )
            .unwrap();
            for j in 0..=64 {
                let t = j as f64 / 64.0;
                let x = [t, 1.0 - t];
                assert!((mo.h(&x) - comb.h(&x)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn sandwich_for_every_family() {
        let specs = [
            "independence(d=3)",
            "dependence(d=3)",
            "logistic(p=2.5, d=3)",
            "neg_logistic(lambda=0.7, p=-0.5)",
            "husler_reiss(lambda=0.4)",
            "marshall_olkin(alpha1=0.2, alpha2=0.6)",
            "matrix_weights(a=[0.2 0.5 0.1; 0.8 0.5 0.9], d=3)",
        ];
        for s in specs {
            let k = fam(s);
            let d = k.dim();
            for j in 0..50 {
                let x: Vec<f64> = (0..d).map(|i| ((j * 7 + i * 13) % 11) as f64 / 10.0).collect();
                let h = k.h(&x);
                let mx = x.iter().fold(0.0, |m: f64, v| m.max(*v));
                let sm: f64 = x.iter().sum();
                assert!(h >= mx - 1e-12 && h <= sm + 1e-12, "{s} at {x:?}: {h}");
            }
        }
    }

    #[test]
    fn discretize_independence_exactly() {
        let d = discretize(&fam("independence(d=2)"), 10).unwrap();
        assert_eq!(d.measure.atoms().len(), 2);
        assert_eq!(d.max_error, 0.0);
        let d = discretize(&fam("logistic(p=1, d=2)"), 10).unwrap();
        assert!(d.max_error < 1e-15);
    }

    #[test]
    fn discretize_logistic_2d() {
        let k = fam("logistic(p=2)");
        let d = discretize(&k, DEFAULT_ATOMS).unwrap();
        assert!(d.max_error < 1e-4, "error {}", d.max_error);
        for s in d.measure.marginal_sums() {
            assert!((s - 1.0).abs() < 1e-14);
        }
        // diagonal support is √2 · A(1/2)
        assert!((d.measure.support(&[1.0, 1.0]) - SQRT_2).abs() < 1e-5);
    }

    #[test]
    fn discretize_logistic_3d() {
        let k = fam("logistic(p=2, d=3)");
        let d = discretize(&k, 120).unwrap();
        for s in d.measure.marginal_sums() {
            assert!((s - 1.0).abs() < 1e-14);
        }
        assert!(d.max_error < 0.02, "error {}", d.max_error);
    }

    #[test]
    fn discretize_rejects_single_atom() {
        assert!(discretize(&fam("logistic(p=2)"), 1).is_err());
    }

    #[test]
    fn discrete_forms_at_degenerate_parameters() {
        let hr0 = AnalyticNorm::HuslerReiss { lambda: 0.0 }.exact_atoms().unwrap();
        assert_eq!(hr0.atoms().len(), 1);
        let nl = AnalyticNorm::NegLogistic { lambda: 0.4, p: f64::NEG_INFINITY };
        let s = nl.exact_atoms().unwrap();
        for x in [[0.2, 0.9], [1.0, 1.0], [0.7, 0.1]] {
            assert!((s.support(&x) - nl.eval(&x)).abs() < 1e-15);
        }
    }
}
