//! Discrete spectral measures on a reference sphere in the nonnegative orthant
//! and the conversions between measures, planar polygons and max-zonoids.
//!
//! A measure `σ = Σ_k w_k δ_{a_k}` induces the max-zonoid
//! `K = Σ_k w_k Δ_{a_k}` with support function `h(K, x) = Σ_k w_k max_i a_{k,i} x_i`.
//! The support function does not depend on the reference norm: rebasing an
//! atom `(a, w)` to `(a/‖a‖', w‖a‖')` leaves every term unchanged.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::geometry::{MaxZonoid, Polygon2D};
use crate::numeric::{mul0, GEOM_TOL};

/// Norm whose unit sphere (restricted to the orthant) carries the atoms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum ReferenceNorm {
    /// Atoms on the unit simplex.
    #[default]
    L1,
    L2,
    LInf,
}

impl ReferenceNorm {
    pub fn norm(self, v: &[f64]) -> f64 {
        match self {
            ReferenceNorm::L1 => v.iter().map(|x| x.abs()).sum(),
            ReferenceNorm::L2 => v.iter().map(|x| x * x).sum::<f64>().sqrt(),
            ReferenceNorm::LInf => v.iter().fold(0.0, |m, x| m.max(x.abs())),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ReferenceNorm::L1 => "l1",
            ReferenceNorm::L2 => "l2",
            ReferenceNorm::LInf => "linf",
        }
    }
}

impl fmt::Display for ReferenceNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ReferenceNorm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "l1" | "simplex" => Ok(ReferenceNorm::L1),
            "l2" | "euclidean" => Ok(ReferenceNorm::L2),
            "linf" | "max" | "l_inf" => Ok(ReferenceNorm::LInf),
            other => Err(Error::InvalidParameter(format!("unknown reference norm '{other}'"))),
        }
    }
}

/// A point on the reference sphere carrying positive mass.
#[derive(Clone, Debug, PartialEq)]
pub struct Atom {
    pub point: Vec<f64>,
    pub mass: f64,
}

impl Atom {
    pub fn new(point: Vec<f64>, mass: f64) -> Self {
        Atom { point, mass }
    }

    /// `max_i a_i x_i` with `0 · ∞ = 0`.
    #[inline]
    fn cross_support(&self, x: &[f64]) -> f64 {
        self.point
            .iter()
            .zip(x)
            .fold(0.0, |m, (&a, &xi)| m.max(mul0(a, xi)))
    }
}

/// Finite measure on the reference sphere: the canonical representation of
/// a max-zonoid.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralMeasure {
    norm: ReferenceNorm,
    dim: usize,
    atoms: Vec<Atom>,
}

/// Outcome of [`validate_dependency`].
#[derive(Clone, Debug, PartialEq)]
pub struct DependencyReport {
    pub is_dependency: bool,
    pub marginal_sums: Vec<f64>,
    pub total_mass: f64,
}

/// Tolerance on marginal sums for a measure to count as a dependency measure.
pub const DEPENDENCY_TOL: f64 = 1e-6;

impl SpectralMeasure {
    /// Validates atoms (nonnegative points on the reference sphere within
    /// 1e-9, positive finite masses) and merges atoms closer than 1e-9.
    pub fn new(norm: ReferenceNorm, atoms: Vec<Atom>) -> Result<Self> {
        let first = atoms.first().ok_or(Error::Empty("spectral measure has no atoms"))?;
        let dim = first.point.len();
        if dim == 0 {
            return Err(Error::InvalidParameter("atoms must have dimension at least 1".into()));
        }
        for atom in &atoms {
            if atom.point.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: atom.point.len() });
            }
            if atom.point.iter().any(|&c| !(c >= 0.0) || !c.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "atom {:?} has a negative or non-finite coordinate",
                    atom.point
                )));
            }
            if !(atom.mass > 0.0) || !atom.mass.is_finite() {
                return Err(Error::NegativeMass { atom: atom.point.clone(), mass: atom.mass });
            }
            let r = norm.norm(&atom.point);
            if (r - 1.0).abs() > GEOM_TOL {
                return Err(Error::InvalidParameter(format!(
                    "atom {:?} is not on the {norm} sphere (norm {r})",
                    atom.point
                )));
            }
        }
        Ok(SpectralMeasure { norm, dim, atoms: merge_atoms(atoms) })
    }

    /// Builds a measure from arbitrary nonnegative points by normalizing each
    /// onto the sphere; zero points are dropped.
    pub(crate) fn from_unnormalized(norm: ReferenceNorm, dim: usize, raw: impl IntoIterator<Item = (Vec<f64>, f64)>) -> Result<Self> {
        let mut atoms = Vec::new();
        for (z, w) in raw {
            if z.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: z.len() });
            }
            if z.iter().any(|&c| !(c >= 0.0) || !c.is_finite()) {
                return Err(Error::InvalidParameter(format!("vector {z:?} must be nonnegative and finite")));
            }
            if !(w >= 0.0) || !w.is_finite() {
                return Err(Error::InvalidParameter(format!("weight {w} must be nonnegative")));
            }
            let r = norm.norm(&z);
            let mass = w * r;
            if r <= 0.0 || mass <= 0.0 {
                continue;
            }
            atoms.push(Atom::new(z.iter().map(|c| c / r).collect(), mass));
        }
        if atoms.is_empty() {
            return Err(Error::Empty("no nonzero atoms"));
        }
        Ok(SpectralMeasure { norm, dim, atoms: merge_atoms(atoms) })
    }

    pub fn reference_norm(&self) -> ReferenceNorm {
        self.norm
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.mass).sum()
    }

    /// `Σ_k w_k a_{k,i}` for every coordinate `i`; equals `h(K, e_i)`.
    pub fn marginal_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.dim];
        for atom in &self.atoms {
            for (s, a) in sums.iter_mut().zip(&atom.point) {
                *s += atom.mass * a;
            }
        }
        sums
    }

    /// Support function of the induced max-zonoid. Coordinates may be `+∞`.
    pub fn support(&self, x: &[f64]) -> f64 {
        self.atoms.iter().map(|a| a.mass * a.cross_support(x)).sum()
    }

    /// Maximal coordinates of the support set `F(K, x)`: for every atom the
    /// coordinates attaining `max_i a_i x_i` all contribute.
    pub fn support_gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.dim];
        for atom in &self.atoms {
            let m = atom.cross_support(x);
            let slack = GEOM_TOL * m.max(1e-300);
            for i in 0..self.dim {
                if mul0(atom.point[i], x[i]) >= m - slack && atom.point[i] > 0.0 {
                    y[i] += atom.mass * atom.point[i];
                }
            }
        }
        y
    }

    /// Same measure on another reference sphere.
    pub fn rebase(&self, norm: ReferenceNorm) -> SpectralMeasure {
        if norm == self.norm {
            return self.clone();
        }
        let atoms = self
            .atoms
            .iter()
            .map(|a| {
                let r = norm.norm(&a.point);
                Atom::new(a.point.iter().map(|c| c / r).collect(), a.mass * r)
            })
            .collect();
        SpectralMeasure { norm, dim: self.dim, atoms }
    }

    /// Rescales coordinatewise so that every marginal sum equals 1.
    pub fn normalized(&self) -> Result<SpectralMeasure> {
        let sums = self.marginal_sums();
        if sums.iter().any(|&s| s <= 0.0) {
            return Err(Error::NotDependency { marginals: sums });
        }
        let lambda: Vec<f64> = sums.iter().map(|s| 1.0 / s).collect();
        Ok(self.scaled(&lambda))
    }

    /// Spectral measure of `λK = {(λ_1 x_1, …, λ_d x_d) : x ∈ K}`; zero
    /// factors are allowed and drop the atoms they annihilate.
    pub(crate) fn scaled(&self, lambda: &[f64]) -> SpectralMeasure {
        let raw = self
            .atoms
            .iter()
            .map(|a| (a.point.iter().zip(lambda).map(|(c, l)| c * l).collect::<Vec<_>>(), a.mass));
        SpectralMeasure::from_unnormalized(self.norm, self.dim, raw).unwrap_or_else(|_| SpectralMeasure {
            norm: self.norm,
            dim: self.dim,
            atoms: Vec::new(),
        })
    }

    pub(crate) fn from_parts_unchecked(norm: ReferenceNorm, dim: usize, atoms: Vec<Atom>) -> Self {
        SpectralMeasure { norm, dim, atoms: merge_atoms(atoms) }
    }

    /// Raw atom list without validation; used when assembling sums.
    pub(crate) fn into_atoms(self) -> Vec<Atom> {
        self.atoms
    }
}

/// Lexicographic sort followed by merging of atoms within 1e-9 (sup norm).
fn merge_atoms(mut atoms: Vec<Atom>) -> Vec<Atom> {
    atoms.sort_by(|a, b| {
        a.point
            .iter()
            .zip(&b.point)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut out: Vec<Atom> = Vec::with_capacity(atoms.len());
    for atom in atoms {
        if let Some(last) = out.last_mut() {
            let close = last
                .point
                .iter()
                .zip(&atom.point)
                .all(|(x, y)| (x - y).abs() <= GEOM_TOL);
            if close {
                last.mass += atom.mass;
                continue;
            }
        }
        out.push(atom);
    }
    out
}

/// The max-zonoid `Σ_k w_k Δ_{a_k}` induced by a measure.
pub fn zonoid_from_spectral(sigma: &SpectralMeasure) -> Result<MaxZonoid> {
    if sigma.atoms.is_empty() {
        return Err(Error::Empty("spectral measure has no atoms"));
    }
    Ok(MaxZonoid::from_spectral(sigma.clone()))
}

/// Converts weighted vectors `ζ` into atoms `ζ/‖ζ‖` with mass `w‖ζ‖`.
pub fn spectral_from_points(zeta: &[(Vec<f64>, f64)], norm: ReferenceNorm) -> Result<SpectralMeasure> {
    let dim = zeta.first().map(|(z, _)| z.len()).ok_or(Error::Empty("no points"))?;
    SpectralMeasure::from_unnormalized(norm, dim, zeta.iter().cloned())
}

/// Triangle decomposition of a planar polygon: the edge from `a^{i−1}` to
/// `a^i` yields `u_i = (a^{i−1}_1 − a^i_1, a^i_2 − a^{i−1}_2)`, an atom at
/// `u_i/‖u_i‖` with mass `‖u_i‖`. With the ℓ2 reference this is the length
/// measure of the reflected polygon restricted to the positive quadrant.
pub fn spectral_from_polygon_2d(polygon: &Polygon2D, norm: ReferenceNorm) -> SpectralMeasure {
    let raw = polygon
        .vertices()
        .windows(2)
        .map(|w| (vec![w[0][0] - w[1][0], w[1][1] - w[0][1]], 1.0));
    SpectralMeasure::from_unnormalized(norm, 2, raw).expect("a valid polygon has at least one edge")
}

/// Inverse of [`spectral_from_polygon_2d`]: sums the triangles
/// `Δ_{w_k a_k}` in order of increasing edge angle.
pub fn polygon_from_spectral_2d(sigma: &SpectralMeasure) -> Result<Polygon2D> {
    if sigma.dim != 2 {
        return Err(Error::UnsupportedDimension { op: "polygon_from_spectral_2d", required: "2", found: sigma.dim });
    }
    let mut edges: Vec<[f64; 2]> = sigma
        .atoms
        .iter()
        .map(|a| [a.mass * a.point[0], a.mass * a.point[1]])
        .collect();
    // e_2 atoms (vertical edges) first, e_1 atoms (horizontal edges) last.
    edges.sort_by(|u, v| u[0].atan2(u[1]).total_cmp(&v[0].atan2(v[1])));
    let z1: f64 = edges.iter().map(|u| u[0]).sum();
    let mut vertices = Vec::with_capacity(edges.len() + 1);
    let mut cur = [z1, 0.0];
    vertices.push(cur);
    for u in edges {
        cur = [cur[0] - u[0], cur[1] + u[1]];
        vertices.push(cur);
    }
    if let Some(last) = vertices.last_mut() {
        // accumulated rounding on the closing vertex
        if last[0].abs() < 1e-12 * z1.max(1.0) {
            last[0] = 0.0;
        }
    }
    Polygon2D::new(vertices)
}

/// Marginal sums and total mass; a dependency measure has all marginal sums
/// equal to 1 (within 1e-6).
pub fn validate_dependency(sigma: &SpectralMeasure) -> DependencyReport {
    let marginal_sums = sigma.marginal_sums();
    let is_dependency = !sigma.atoms.is_empty()
        && marginal_sums.iter().all(|s| (s - 1.0).abs() <= DEPENDENCY_TOL);
    DependencyReport { is_dependency, marginal_sums, total_mass: sigma.total_mass() }
}

/// Re-expresses the measure on another reference sphere; the induced support
/// function is unchanged.
pub fn rebase_reference(sigma: &SpectralMeasure, norm: ReferenceNorm) -> SpectralMeasure {
    sigma.rebase(norm)
}
