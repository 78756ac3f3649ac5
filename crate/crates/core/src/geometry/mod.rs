//! Max-zonoids in the nonnegative orthant, handled through their support
//! functions, and the operations that keep the class closed.
//!
//! A [`MaxZonoid`] is one of
//!
//! - a discrete spectral measure `Σ_k w_k Δ_{a_k}` (the canonical form),
//! - a planar polygon,
//! - an analytic family norm,
//! - a composite `x ↦ Σ_j h(K_j, C_j x)` produced by rescaling, projection,
//!   products and sums of bodies that have no finite atom list.
//!
//! Operations on discrete inputs stay discrete and exact.

mod polygon;

use std::ops::Deref;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{ensure_dim, Error, Result};
use crate::families::AnalyticNorm;
use crate::numeric::{
    bisect_threshold, chunk_rng, golden_section_min, integrate_piecewise, mul0, open01, orthant_directions,
    sphere_directions, CHUNK, GEOM_TOL,
};
use crate::spectral::{self, Atom, ReferenceNorm, SpectralMeasure};

pub use polygon::Polygon2D;

/// Default number of directions for 2-D envelopes (power means, materialized
/// analytic bodies).
pub const ENVELOPE_GRID: usize = 512;

/// Default direction count for Hausdorff and m-distances in the plane.
pub const DISTANCE_GRID_2D: usize = 4096;

/// Default direction count for Hausdorff and m-distances in dimension ≥ 3.
pub const DISTANCE_GRID_HIGH: usize = 20_000;

/// Cross-polytope `Δ_a = conv{0, a_1 e_1, …, a_d e_d}`.
#[derive(Clone, Debug, PartialEq)]
pub struct CrossPolytope {
    pub apex: Vec<f64>,
}

impl CrossPolytope {
    pub fn new(apex: Vec<f64>) -> Result<Self> {
        if apex.is_empty() {
            return Err(Error::Empty("cross-polytope apex"));
        }
        if apex.iter().any(|&a| !(a >= 0.0) || !a.is_finite()) {
            return Err(Error::InvalidParameter(format!("apex {apex:?} must be nonnegative and finite")));
        }
        Ok(CrossPolytope { apex })
    }

    /// `max_i max(0, a_i x_i)`.
    pub fn support(&self, x: &[f64]) -> f64 {
        self.apex.iter().zip(x).fold(0.0, |m, (&a, &xi)| m.max(mul0(a, xi)))
    }

    pub fn to_zonoid(&self) -> Result<MaxZonoid> {
        let sigma = SpectralMeasure::from_unnormalized(ReferenceNorm::L1, self.apex.len(), [(self.apex.clone(), 1.0)])?;
        Ok(MaxZonoid::from_spectral(sigma))
    }
}

/// One summand `h(body, C x)` of a composite body, where `C` maps outer
/// coordinates to body coordinates: body coordinate `j` receives
/// `c · x_i` for `inputs[j] = Some((i, c))` and `0` for `None`.
#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub body: Arc<MaxZonoid>,
    pub inputs: Vec<Option<(usize, f64)>>,
}

impl Term {
    fn pull_back(&self, x: &[f64]) -> Vec<f64> {
        self.inputs
            .iter()
            .map(|inp| match *inp {
                Some((i, c)) => mul0(c, x[i]),
                None => 0.0,
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Representation {
    Spectral(SpectralMeasure),
    Polygon(Polygon2D),
    Analytic(AnalyticNorm),
    Composite(Vec<Term>),
}

/// A max-zonoid, exposed through its support function.
#[derive(Clone, Debug, PartialEq)]
pub struct MaxZonoid {
    dim: usize,
    repr: Representation,
}

impl MaxZonoid {
    pub fn from_spectral(sigma: SpectralMeasure) -> Self {
        MaxZonoid { dim: sigma.dim(), repr: Representation::Spectral(sigma) }
    }

    pub fn from_polygon(polygon: Polygon2D) -> Self {
        MaxZonoid { dim: 2, repr: Representation::Polygon(polygon) }
    }

    pub fn from_analytic(norm: AnalyticNorm) -> Self {
        MaxZonoid { dim: norm.dim(), repr: Representation::Analytic(norm) }
    }

    /// Unit cube `[0,1]^d` (independence).
    pub fn unit_cube(d: usize) -> Self {
        let atoms = (0..d)
            .map(|i| {
                let mut e = vec![0.0; d];
                e[i] = 1.0;
                Atom::new(e, 1.0)
            })
            .collect();
        MaxZonoid::from_spectral(SpectralMeasure::from_parts_unchecked(ReferenceNorm::L1, d, atoms))
    }

    /// Unit cross-polytope `Δ_{(1,…,1)}` (complete dependence).
    pub fn unit_cross(d: usize) -> Self {
        let atom = Atom::new(vec![1.0 / d as f64; d], d as f64);
        MaxZonoid::from_spectral(SpectralMeasure::from_parts_unchecked(ReferenceNorm::L1, d, vec![atom]))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn representation(&self) -> &Representation {
        &self.repr
    }

    /// `h(K, x)` for `x ∈ [0, ∞]^d`, with `0 · ∞ = 0`.
    pub fn support(&self, x: &[f64]) -> Result<f64> {
        ensure_dim(self.dim, x.len())?;
        if let Some(bad) = x.iter().find(|v| !(**v >= 0.0)) {
            return Err(Error::Domain(format!("support argument has negative or NaN coordinate {bad}")));
        }
        Ok(self.h(x))
    }

    /// Support function without argument validation.
    pub(crate) fn h(&self, x: &[f64]) -> f64 {
        match &self.repr {
            Representation::Spectral(s) => s.support(x),
            Representation::Polygon(p) => p.support(x),
            Representation::Analytic(n) => n.eval(x),
            Representation::Composite(terms) => terms.iter().map(|t| t.body.h(&t.pull_back(x))).sum(),
        }
    }

    /// Support function extended to all of `ℝ^d`. The body is down-closed in
    /// the orthant, so `h(K, u) = h(K, u⁺)`.
    pub fn support_full(&self, u: &[f64]) -> f64 {
        let pos: Vec<f64> = u.iter().map(|v| v.max(0.0)).collect();
        self.h(&pos)
    }

    /// Coordinatewise maxima of the support set `F(K, x)`; the gradient of
    /// `h` wherever it is differentiable.
    pub fn support_gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        ensure_dim(self.dim, x.len())?;
        Ok(self.grad(x))
    }

    pub(crate) fn grad(&self, x: &[f64]) -> Vec<f64> {
        match &self.repr {
            Representation::Spectral(s) => s.support_gradient(x),
            Representation::Polygon(p) => p.support_gradient(x).to_vec(),
            Representation::Analytic(n) => n.gradient(x),
            Representation::Composite(terms) => {
                let mut y = vec![0.0; self.dim];
                for t in terms {
                    let g = t.body.grad(&t.pull_back(x));
                    for (j, inp) in t.inputs.iter().enumerate() {
                        if let Some((i, c)) = *inp {
                            y[i] += c * g[j];
                        }
                    }
                }
                y
            }
        }
    }

    /// `h(K, e_i)` for every `i`: the scale parameters of the marginals.
    pub fn marginals(&self) -> Vec<f64> {
        (0..self.dim)
            .map(|i| {
                let mut e = vec![0.0; self.dim];
                e[i] = 1.0;
                self.h(&e)
            })
            .collect()
    }

    /// Finite atom list, when the body has one (all leaves discrete or with
    /// known exact atoms). The reference norm is ℓ1 unless the body is
    /// already spectral.
    pub fn exact_spectral(&self) -> Option<SpectralMeasure> {
        match &self.repr {
            Representation::Spectral(s) => Some(s.clone()),
            Representation::Polygon(p) => Some(spectral::spectral_from_polygon_2d(p, ReferenceNorm::L1)),
            Representation::Analytic(n) => n.exact_atoms(),
            Representation::Composite(terms) => {
                let mut raw: Vec<(Vec<f64>, f64)> = Vec::new();
                for t in terms {
                    let inner = t.body.exact_spectral()?;
                    for atom in inner.atoms() {
                        let mut b = vec![0.0; self.dim];
                        for (j, inp) in t.inputs.iter().enumerate() {
                            if let Some((i, c)) = *inp {
                                b[i] = f64::max(b[i], atom.point[j] * c);
                            }
                        }
                        raw.push((b, atom.mass));
                    }
                }
                SpectralMeasure::from_unnormalized(ReferenceNorm::L1, self.dim, raw).ok()
            }
        }
    }

    /// Exact polygon for planar bodies with a finite atom list.
    pub fn to_polygon_2d(&self) -> Option<Polygon2D> {
        if self.dim != 2 {
            return None;
        }
        match &self.repr {
            Representation::Polygon(p) => Some(p.clone()),
            _ => spectral::polygon_from_spectral_2d(&self.exact_spectral()?).ok(),
        }
    }

    /// Polygon for a planar body: exact when possible, otherwise the
    /// supporting-line envelope on `grid + 1` equiangular directions (an
    /// outer approximation touching `K` at every grid direction).
    pub fn polygon_2d(&self, grid: usize) -> Result<Polygon2D> {
        if self.dim != 2 {
            return Err(Error::UnsupportedDimension { op: "polygon_2d", required: "2", found: self.dim });
        }
        if let Some(p) = self.to_polygon_2d() {
            return Ok(p);
        }
        envelope_2d(|u| self.h(u), grid)
    }

    /// Simplex parameters `t` where `t ↦ h(K, (t, 1−t))` may have kinks.
    pub fn kinks_2d(&self) -> Vec<f64> {
        if self.dim != 2 {
            return Vec::new();
        }
        let mut out = match &self.repr {
            Representation::Polygon(p) => p.kink_parameters(),
            Representation::Spectral(s) => s
                .atoms()
                .iter()
                .filter(|a| a.point[0] > 0.0 && a.point[1] > 0.0)
                .map(|a| a.point[1] / (a.point[0] + a.point[1]))
                .collect(),
            Representation::Analytic(n) => n.kinks_2d(),
            Representation::Composite(terms) => {
                let mut ks = Vec::new();
                for t in terms {
                    if t.body.dim != 2 {
                        continue;
                    }
                    let (Some((i0, c0)), Some((i1, c1))) = (t.inputs[0], t.inputs[1]) else { continue };
                    for s in t.body.kinks_2d() {
                        // body direction (s, 1−s) ∝ (c0 x_i0, c1 x_i1)
                        let (w0, w1) = (s / c0, (1.0 - s) / c1);
                        let t_outer = if i0 == 0 { w0 / (w0 + w1) } else { w1 / (w0 + w1) };
                        if i0 != i1 {
                            ks.push(t_outer);
                        }
                    }
                }
                ks
            }
        };
        out.retain(|t| *t > 0.0 && *t < 1.0);
        out.sort_by(f64::total_cmp);
        out.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
        out
    }
}

/// Supporting-line envelope of a planar support function sampled at
/// `grid + 1` equiangular directions of the quarter circle.
pub fn envelope_2d<F: Fn(&[f64]) -> f64>(h: F, grid: usize) -> Result<Polygon2D> {
    if grid < 2 {
        return Err(Error::InvalidParameter("envelope grid must have at least 2 intervals".into()));
    }
    let dirs: Vec<[f64; 2]> = orthant_directions(2, grid)
        .into_iter()
        .map(|u| [clean(u[0]), clean(u[1])])
        .collect();
    let vals: Vec<f64> = dirs.iter().map(|u| h(u)).collect();
    Polygon2D::from_support_values(&dirs, &vals)
}

fn clean(v: f64) -> f64 {
    if v.abs() < 1e-15 {
        0.0
    } else {
        v
    }
}

/// A max-zonoid with `h(K, e_i) = 1` for all `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct DependencySet(MaxZonoid);

impl DependencySet {
    /// Checks `h(K, e_i) = 1` within 1e-9.
    pub fn new(k: MaxZonoid) -> Result<Self> {
        let marginals = k.marginals();
        if marginals.iter().all(|m| (m - 1.0).abs() <= GEOM_TOL) {
            Ok(DependencySet(k))
        } else {
            Err(Error::NotDependency { marginals })
        }
    }

    /// Rescales coordinatewise by `1/h(K, e_i)`.
    pub fn normalize(k: &MaxZonoid) -> Result<Self> {
        let marginals = k.marginals();
        if marginals.iter().any(|m| !(*m > 0.0) || !m.is_finite()) {
            return Err(Error::NotDependency { marginals });
        }
        let lambda: Vec<f64> = marginals.iter().map(|m| 1.0 / m).collect();
        let mut scaled = scale(k, &lambda)?;
        // exact unit marginals for discrete forms
        if let Representation::Spectral(s) = &scaled.repr {
            scaled = MaxZonoid::from_spectral(s.normalized()?);
        }
        DependencySet::new(scaled)
    }

    pub fn zonoid(&self) -> &MaxZonoid {
        &self.0
    }

    pub fn into_zonoid(self) -> MaxZonoid {
        self.0
    }
}

impl Deref for DependencySet {
    type Target = MaxZonoid;

    fn deref(&self) -> &MaxZonoid {
        &self.0
    }
}

impl From<DependencySet> for MaxZonoid {
    fn from(d: DependencySet) -> MaxZonoid {
        d.0
    }
}

/// `h(K, x)` with argument validation.
pub fn support_function(k: &MaxZonoid, x: &[f64]) -> Result<f64> {
    k.support(x)
}

fn composite_scale(k: &MaxZonoid, lambda: &[f64]) -> MaxZonoid {
    let inputs = lambda
        .iter()
        .enumerate()
        .map(|(i, &l)| if l > 0.0 { Some((i, l)) } else { None })
        .collect();
    MaxZonoid { dim: k.dim, repr: Representation::Composite(vec![Term { body: Arc::new(k.clone()), inputs }]) }
}

/// Coordinatewise rescaling with nonnegative factors (zero factors allowed).
fn scale_nonneg(k: &MaxZonoid, lambda: &[f64]) -> Option<MaxZonoid> {
    if lambda.iter().all(|&l| l == 0.0) {
        return None;
    }
    if lambda.iter().all(|&l| l == 1.0) {
        return Some(k.clone());
    }
    Some(match &k.repr {
        Representation::Spectral(s) => {
            let sc = s.scaled(lambda);
            if sc.atoms().is_empty() {
                return None;
            }
            MaxZonoid::from_spectral(sc)
        }
        Representation::Polygon(p) if lambda.iter().all(|&l| l > 0.0) => MaxZonoid::from_polygon(p.scaled([lambda[0], lambda[1]])),
        Representation::Polygon(p) => {
            let sc = spectral::spectral_from_polygon_2d(p, ReferenceNorm::L1).scaled(lambda);
            if sc.atoms().is_empty() {
                return None;
            }
            MaxZonoid::from_spectral(sc)
        }
        _ => composite_scale(k, lambda),
    })
}

/// `λK = {(λ_1 x_1, …, λ_d x_d) : x ∈ K}`, so that `h(λK, x) = h(K, λ∘x)`.
pub fn scale(k: &MaxZonoid, lambda: &[f64]) -> Result<MaxZonoid> {
    ensure_dim(k.dim, lambda.len())?;
    if let Some(bad) = lambda.iter().find(|l| !(**l > 0.0) || !l.is_finite()) {
        return Err(Error::InvalidParameter(format!("scale factors must be positive and finite, got {bad}")));
    }
    Ok(scale_nonneg(k, lambda).expect("positive factors keep the body nonempty"))
}

/// Projection onto the coordinates `coords` (0-based, in the given order);
/// equals the section `K ∩ span{e_i : i ∈ coords}`.
pub fn project(k: &MaxZonoid, coords: &[usize]) -> Result<MaxZonoid> {
    if coords.is_empty() {
        return Err(Error::Empty("projection coordinates"));
    }
    for &c in coords {
        if c >= k.dim {
            return Err(Error::InvalidParameter(format!("coordinate {c} out of range for dimension {}", k.dim)));
        }
    }
    let mut seen = vec![false; k.dim];
    for &c in coords {
        if std::mem::replace(&mut seen[c], true) {
            return Err(Error::InvalidParameter(format!("coordinate {c} repeated in projection")));
        }
    }
    let m = coords.len();
    let sigma = match &k.repr {
        Representation::Spectral(s) => Some(s.clone()),
        Representation::Polygon(p) => Some(spectral::spectral_from_polygon_2d(p, ReferenceNorm::L1)),
        _ => None,
    };
    if let Some(s) = sigma {
        let raw = s
            .atoms()
            .iter()
            .map(|a| (coords.iter().map(|&c| a.point[c]).collect::<Vec<_>>(), a.mass));
        let projected = SpectralMeasure::from_unnormalized(s.reference_norm(), m, raw)?;
        return Ok(MaxZonoid::from_spectral(projected));
    }
    let mut inputs = vec![None; k.dim];
    for (pos, &c) in coords.iter().enumerate() {
        inputs[c] = Some((pos, 1.0));
    }
    Ok(MaxZonoid { dim: m, repr: Representation::Composite(vec![Term { body: Arc::new(k.clone()), inputs }]) })
}

/// `K1 × K2`, the body of the concatenation of independent vectors:
/// `h((x1, x2)) = h(K1, x1) + h(K2, x2)`.
pub fn cartesian_product(k1: &MaxZonoid, k2: &MaxZonoid) -> MaxZonoid {
    let (d1, d2) = (k1.dim, k2.dim);
    let d = d1 + d2;
    if let (Some(s1), Some(s2)) = (discrete(k1), discrete(k2)) {
        let norm = s1.reference_norm();
        let s2 = s2.rebase(norm);
        let mut atoms: Vec<Atom> = Vec::with_capacity(s1.atoms().len() + s2.atoms().len());
        for a in s1.atoms() {
            let mut p = a.point.clone();
            p.resize(d, 0.0);
            atoms.push(Atom::new(p, a.mass));
        }
        for a in s2.atoms() {
            let mut p = vec![0.0; d1];
            p.extend_from_slice(&a.point);
            atoms.push(Atom::new(p, a.mass));
        }
        return MaxZonoid::from_spectral(SpectralMeasure::from_parts_unchecked(norm, d, atoms));
    }
    let t1 = Term { body: Arc::new(k1.clone()), inputs: (0..d1).map(|i| Some((i, 1.0))).collect() };
    let t2 = Term { body: Arc::new(k2.clone()), inputs: (0..d2).map(|i| Some((d1 + i, 1.0))).collect() };
    MaxZonoid { dim: d, repr: Representation::Composite(vec![t1, t2]) }
}

/// Atoms for spectral and polygonal bodies; `None` for analytic ones, so that
/// operations keep analytic bodies exact.
fn discrete(k: &MaxZonoid) -> Option<SpectralMeasure> {
    match &k.repr {
        Representation::Spectral(s) => Some(s.clone()),
        Representation::Polygon(p) => Some(spectral::spectral_from_polygon_2d(p, ReferenceNorm::L1)),
        _ => None,
    }
}

/// Mixing weight of a Minkowski combination.
#[derive(Clone, Debug, PartialEq)]
pub enum Weight {
    Scalar(f64),
    Vector(Vec<f64>),
}

impl Weight {
    fn resolve(&self, d: usize) -> Result<Vec<f64>> {
        let v = match self {
            Weight::Scalar(l) => vec![*l; d],
            Weight::Vector(v) => {
                ensure_dim(d, v.len())?;
                v.clone()
            }
        };
        if let Some(bad) = v.iter().find(|l| !(**l >= 0.0 && **l <= 1.0)) {
            return Err(Error::InvalidParameter(format!("mixing weights must lie in [0, 1], got {bad}")));
        }
        Ok(v)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CombineMode {
    /// `h = h(λK1, ·) + h((1−λ)K2, ·)`.
    Sum,
    /// Spectral masses `σ1 − λσ2`.
    Difference,
}

/// Minkowski sum `λK1 + (1−λ)K2` (the body of `(λξ') ∨ ((1−λ)ξ'')` for
/// independent `ξ', ξ''`) or Minkowski difference `K1 ⊖ λK2` of discrete
/// bodies.
pub fn minkowski_combine(k1: &MaxZonoid, k2: &MaxZonoid, lambda: &Weight, mode: CombineMode) -> Result<MaxZonoid> {
    ensure_dim(k1.dim, k2.dim)?;
    let d = k1.dim;
    let l = lambda.resolve(d)?;
    match mode {
        CombineMode::Sum => {
            let l2: Vec<f64> = l.iter().map(|v| 1.0 - v).collect();
            let a = scale_nonneg(k1, &l);
            let b = scale_nonneg(k2, &l2);
            match (a, b) {
                (Some(a), Some(b)) => Ok(sum(&a, &b)),
                (Some(a), None) => Ok(a),
                (None, Some(b)) => Ok(b),
                (None, None) => Err(Error::Empty("both summands vanish")),
            }
        }
        CombineMode::Difference => {
            let s1 = discrete(k1).or_else(|| k1.exact_spectral()).ok_or_else(|| {
                Error::InvalidParameter("Minkowski difference requires bodies with finite atom lists".into())
            })?;
            let s2 = discrete(k2).or_else(|| k2.exact_spectral()).ok_or_else(|| {
                Error::InvalidParameter("Minkowski difference requires bodies with finite atom lists".into())
            })?;
            let norm = s1.reference_norm();
            let sub = s2.scaled(&l).rebase(norm);
            let mut atoms: Vec<Atom> = s1.atoms().to_vec();
            for a in sub.atoms() {
                let matched = atoms
                    .iter_mut()
                    .find(|b| b.point.iter().zip(&a.point).all(|(x, y)| (x - y).abs() <= GEOM_TOL));
                match matched {
                    Some(b) if b.mass - a.mass >= -GEOM_TOL * b.mass.max(1.0) => b.mass -= a.mass,
                    Some(b) => {
                        return Err(Error::NegativeMass { atom: a.point.clone(), mass: b.mass - a.mass });
                    }
                    None => return Err(Error::NegativeMass { atom: a.point.clone(), mass: -a.mass }),
                }
            }
            atoms.retain(|a| a.mass > GEOM_TOL);
            if atoms.is_empty() {
                return Err(Error::Empty("Minkowski difference is the zero measure"));
            }
            Ok(MaxZonoid::from_spectral(SpectralMeasure::from_parts_unchecked(norm, d, atoms)))
        }
    }
}

/// Plain Minkowski sum `K1 + K2`.
fn sum(a: &MaxZonoid, b: &MaxZonoid) -> MaxZonoid {
    let d = a.dim;
    if let (Some(s1), Some(s2)) = (discrete(a), discrete(b)) {
        let norm = s1.reference_norm();
        let mut atoms = s1.into_atoms();
        atoms.extend(s2.rebase(norm).into_atoms());
        return MaxZonoid::from_spectral(SpectralMeasure::from_parts_unchecked(norm, d, atoms));
    }
    let identity: Vec<Option<(usize, f64)>> = (0..d).map(|i| Some((i, 1.0))).collect();
    let mut terms = Vec::new();
    for k in [a, b] {
        match &k.repr {
            Representation::Composite(ts) => terms.extend(ts.iter().cloned()),
            _ => terms.push(Term { body: Arc::new(k.clone()), inputs: identity.clone() }),
        }
    }
    MaxZonoid { dim: d, repr: Representation::Composite(terms) }
}

/// Planar set operations that stay within max-zonoids.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Combine2d {
    /// `conv(K1 ∪ K2)`, `h = max(h1, h2)`.
    Hull,
    Intersection,
    /// `h = (λ h1^p + (1−λ) h2^p)^{1/p}`, materialized as an envelope.
    PowerMean { p: f64, lambda: f64 },
}

/// Hull, intersection or power mean of two planar bodies. Non-polygonal
/// inputs are first replaced by their envelope on [`ENVELOPE_GRID`]
/// directions.
pub fn combine_2d(k1: &MaxZonoid, k2: &MaxZonoid, mode: Combine2d) -> Result<MaxZonoid> {
    for k in [k1, k2] {
        if k.dim != 2 {
            return Err(Error::UnsupportedDimension { op: "combine_2d", required: "2", found: k.dim });
        }
    }
    match mode {
        Combine2d::Hull => Ok(MaxZonoid::from_polygon(k1.polygon_2d(ENVELOPE_GRID)?.hull(&k2.polygon_2d(ENVELOPE_GRID)?))),
        Combine2d::Intersection => Ok(MaxZonoid::from_polygon(
            k1.polygon_2d(ENVELOPE_GRID)?.intersection(&k2.polygon_2d(ENVELOPE_GRID)?),
        )),
        Combine2d::PowerMean { p, lambda } => {
            if !(p >= 1.0) {
                return Err(Error::InvalidParameter(format!("power mean exponent must be ≥ 1, got {p}")));
            }
            if !(0.0..=1.0).contains(&lambda) {
                return Err(Error::InvalidParameter(format!("power mean weight must lie in [0, 1], got {lambda}")));
            }
            let f = |u: &[f64]| {
                let (a, b) = (k1.h(u), k2.h(u));
                if p.is_infinite() {
                    a.max(b)
                } else {
                    (lambda * a.powf(p) + (1.0 - lambda) * b.powf(p)).powf(1.0 / p)
                }
            };
            Ok(MaxZonoid::from_polygon(envelope_2d(f, ENVELOPE_GRID)?))
        }
    }
}

/// Polar set `K° = {x ∈ E : h(K, x) ≤ 1}` of a planar body; exact for bodies
/// with atoms, an inner approximation through [`ENVELOPE_GRID`] boundary
/// points otherwise.
pub fn polar_2d(k: &MaxZonoid) -> Result<Polygon2D> {
    if k.dim != 2 {
        return Err(Error::UnsupportedDimension { op: "polar_2d", required: "2", found: k.dim });
    }
    Ok(k.polygon_2d(ENVELOPE_GRID)?.polar())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum VolumeMethod {
    /// Exact area in the plane (shoelace for bodies with atoms, adaptive
    /// quadrature of `½∫_0^1 h(t, 1−t)^{-2} dt` for analytic ones).
    Exact2d,
    /// Rejection sampling in the box `∏[0, 1/h(e_i)]`, which contains `K°`.
    MonteCarlo { samples: usize, seed: u64 },
}

/// Value with standard error (zero for exact methods).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
}

/// Lebesgue measure of `K°`.
pub fn polar_volume(k: &MaxZonoid, method: VolumeMethod) -> Result<Estimate> {
    match method {
        VolumeMethod::Exact2d => {
            if k.dim != 2 {
                return Err(Error::UnsupportedDimension { op: "exact polar area", required: "2", found: k.dim });
            }
            if let Some(p) = k.to_polygon_2d() {
                return Ok(Estimate { value: p.polar().area(), std_error: 0.0 });
            }
            let f = |t: f64| {
                let h = k.h(&[t, 1.0 - t]);
                1.0 / (h * h)
            };
            let value = 0.5 * integrate_piecewise(f, 0.0, 1.0, &k.kinks_2d(), 1e-12);
            Ok(Estimate { value, std_error: 0.0 })
        }
        VolumeMethod::MonteCarlo { samples, seed } => {
            if samples == 0 {
                return Err(Error::InvalidParameter("Monte Carlo volume needs at least one sample".into()));
            }
            let d = k.dim;
            let bounds: Vec<f64> = k.marginals().iter().map(|m| 1.0 / m).collect();
            if bounds.iter().any(|b| !b.is_finite() || *b <= 0.0) {
                return Err(Error::InvalidParameter("polar set is unbounded (zero marginal)".into()));
            }
            let box_volume: f64 = bounds.iter().product();
            let chunks = samples.div_ceil(CHUNK);
            let hits: usize = (0..chunks)
                .into_par_iter()
                .map(|c| {
                    let mut rng = chunk_rng(seed, c as u64);
                    let n = CHUNK.min(samples - c * CHUNK);
                    let mut x = vec![0.0; d];
                    let mut hits = 0usize;
                    for _ in 0..n {
                        for (xi, b) in x.iter_mut().zip(&bounds) {
                            *xi = open01(&mut rng) * b;
                        }
                        if k.h(&x) <= 1.0 {
                            hits += 1;
                        }
                    }
                    hits
                })
                .sum();
            let p = hits as f64 / samples as f64;
            let se = (p * (1.0 - p) / samples as f64).sqrt();
            Ok(Estimate { value: p * box_volume, std_error: se * box_volume })
        }
    }
}

fn default_sphere_grid(d: usize, grid_n: usize) -> usize {
    if grid_n > 0 {
        grid_n
    } else if d == 2 {
        DISTANCE_GRID_2D
    } else {
        DISTANCE_GRID_HIGH
    }
}

/// Grid Hausdorff distance `max_u |h(K1, u) − h(K2, u)|` over `grid_n`
/// directions of the full unit sphere (`0` picks the default grid). The
/// 2-D grid is nested under doubling, so the value is nondecreasing along
/// `n, 2n, 4n, …` and converges to the exact distance.
pub fn hausdorff_distance(k1: &MaxZonoid, k2: &MaxZonoid, grid_n: usize) -> Result<f64> {
    ensure_dim(k1.dim, k2.dim)?;
    let dirs = sphere_directions(k1.dim, default_sphere_grid(k1.dim, grid_n));
    Ok(dirs
        .par_iter()
        .map(|u| (k1.support_full(u) - k2.support_full(u)).abs())
        .reduce(|| 0.0, f64::max))
}

/// Banach–Mazur style distance `log inf{∏λ_i : K1 ⊆ λK2, K2 ⊆ λK1}`.
///
/// Containment is tested through support functions on `grid_n` orthant
/// directions (`0` picks the default). In the plane the problem is solved
/// to 1e-10 in `log λ`; in higher dimension pairwise coordinate descent
/// returns an upper bound.
pub fn m_distance(k1: &MaxZonoid, k2: &MaxZonoid, grid_n: usize) -> Result<f64> {
    ensure_dim(k1.dim, k2.dim)?;
    let d = k1.dim;
    let n = if grid_n > 0 {
        grid_n
    } else if d == 2 {
        DISTANCE_GRID_2D
    } else {
        // simplex grid size grows quickly with d
        DISTANCE_GRID_HIGH.min(5000)
    };
    let dirs = orthant_directions(d, n);
    let h1: Vec<f64> = dirs.iter().map(|y| k1.h(y)).collect();
    let h2: Vec<f64> = dirs.iter().map(|y| k2.h(y)).collect();
    // With y = λ∘u, K1 ⊆ λK2 ⇔ h(K1, e^{−s}∘y) ≤ h(K2, y) for all y; the
    // left side is convex in s, so the feasible set is convex.
    let feasible = |s: &[f64]| -> bool {
        let inv: Vec<f64> = s.iter().map(|v| (-v).exp()).collect();
        let mut z = vec![0.0; d];
        dirs.iter().enumerate().all(|(j, y)| {
            for i in 0..d {
                z[i] = y[i] * inv[i];
            }
            let slack = 1e-12 * h1[j].max(h2[j]);
            k1.h(&z) <= h2[j] + slack && k2.h(&z) <= h1[j] + slack
        })
    };
    let ratio = k1
        .marginals()
        .iter()
        .zip(k2.marginals())
        .map(|(a, b)| (a / b).ln().abs())
        .fold(0.0, f64::max);
    let t_hi = (d as f64).ln() + ratio + 1.0;
    let t0 = bisect_threshold(|t| feasible(&vec![t; d]), -t_hi, t_hi, 1e-12)
        .ok_or_else(|| Error::Domain("no feasible scaling found for m-distance".into()))?;
    let mut s = vec![t0; d];
    let big = t0 + 50.0;
    let mut total: f64 = s.iter().sum();
    for _sweep in 0..if d == 2 { 1 } else { 20 } {
        let before = total;
        for i in 0..d {
            for j in (i + 1)..d {
                // minimize s_i + s_j over the line of feasible (s_i, s_j)
                let min_j = |si: f64, s: &mut Vec<f64>| -> Option<f64> {
                    s[i] = si;
                    bisect_threshold(
                        |v| {
                            s[j] = v;
                            feasible(s)
                        },
                        s_lower(t0, big),
                        big,
                        1e-11,
                    )
                };
                let mut work = s.clone();
                let si_lo = {
                    work[j] = big;
                    let v = bisect_threshold(
                        |v| {
                            work[i] = v;
                            feasible(&work)
                        },
                        s_lower(t0, big),
                        big,
                        1e-11,
                    );
                    v.unwrap_or(s[i])
                };
                let mut work = s.clone();
                let sj_lo = {
                    work[i] = big;
                    bisect_threshold(
                        |v| {
                            work[j] = v;
                            feasible(&work)
                        },
                        s_lower(t0, big),
                        big,
                        1e-11,
                    )
                    .unwrap_or(s[j])
                };
                let si_hi = (s[i] + s[j] - sj_lo).max(si_lo);
                let mut work = s.clone();
                let (best_i, best) = golden_section_min(
                    |si| match min_j(si, &mut work) {
                        Some(sj) => si + sj,
                        None => f64::INFINITY,
                    },
                    si_lo,
                    si_hi,
                    1e-10,
                );
                if best < s[i] + s[j] {
                    let mut work = s.clone();
                    if let Some(sj) = min_j(best_i, &mut work) {
                        s[i] = best_i;
                        s[j] = sj;
                    }
                }
            }
        }
        total = s.iter().sum();
        if before - total < 1e-12 {
            break;
        }
    }
    Ok(total.max(0.0))
}

fn s_lower(t0: f64, big: f64) -> f64 {
    t0 - (big - t0)
}

#[cfg(test)]
mod tests;
