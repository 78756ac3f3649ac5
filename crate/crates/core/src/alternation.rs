//! Complete alternation under coordinatewise maxima, consistency of
//! extremal-coefficient tables, and construction of a max-stable model from
//! a consistent table.
//!
//! For a function `f` on a max-semilattice the successive differences are
//!
//! ```text
//! Δ_{x_1}f(x) = f(x) − f(x ∨ x_1),
//! Δ_{x_1…x_n}f(x) = Σ_{S ⊆ {1..n}} (−1)^{|S|} f(x ∨ ⋁_{i∈S} x_i).
//! ```
//!
//! Support functions of max-zonoids have all differences `≤ 0`.

use std::collections::HashMap;

use crate::dependence::{mask_members, ExtremalTable};
use crate::distribution::MaxStableModel;
use crate::error::{Error, Result};
use crate::numeric::binomial;
use crate::spectral::{Atom, ReferenceNorm, SpectralMeasure};

/// Differences above this value count as violations.
pub const ALTERNATION_TOL: f64 = 1e-9;

/// Default limit on function evaluations of [`check_alternation`].
pub const DEFAULT_BUDGET: u128 = 10_000_000;

/// Finite set of points closed under coordinatewise maxima.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteMaxLattice {
    dim: usize,
    points: Vec<Vec<f64>>,
}

fn join(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x.max(*y)).collect()
}

fn key(p: &[f64]) -> Vec<u64> {
    p.iter().map(|v| v.to_bits()).collect()
}

impl FiniteMaxLattice {
    /// Closes the given points under coordinatewise maxima.
    pub fn from_points(points: Vec<Vec<f64>>) -> Result<Self> {
        let dim = points.first().map(Vec::len).ok_or(Error::Empty("lattice points"))?;
        let mut seen: HashMap<Vec<u64>, ()> = HashMap::new();
        let mut pts: Vec<Vec<f64>> = Vec::new();
        for p in points {
            if p.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: p.len() });
            }
            if p.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidParameter(format!("lattice point {p:?} is not finite")));
            }
            let p: Vec<f64> = p.into_iter().map(|v| v + 0.0).collect();
            if seen.insert(key(&p), ()).is_none() {
                pts.push(p);
            }
        }
        let mut i = 0;
        while i < pts.len() {
            for j in 0..i {
                let m = join(&pts[i], &pts[j]);
                if seen.insert(key(&m), ()).is_none() {
                    pts.push(m);
                }
            }
            i += 1;
        }
        Ok(FiniteMaxLattice { dim, points: pts })
    }

    /// Product grid `values^d`, which is closed under maxima.
    pub fn grid(values: &[f64], d: usize) -> Result<Self> {
        if values.is_empty() || d == 0 {
            return Err(Error::Empty("grid axis values"));
        }
        let mut pts = vec![Vec::new()];
        for _ in 0..d {
            pts = pts
                .into_iter()
                .flat_map(|p| {
                    values.iter().map(move |&v| {
                        let mut q = p.clone();
                        q.push(v);
                        q
                    })
                })
                .collect();
        }
        FiniteMaxLattice::from_points(pts)
    }

    /// The Boolean lattice of 0/1 vectors (subsets under union).
    pub fn boolean(d: usize) -> Result<Self> {
        FiniteMaxLattice::grid(&[0.0, 1.0], d)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    /// Whether `t·u ≤ v` for some `t > 0` implies `u ≤ v` for all pairs; a
    /// condition of the general extension theorem, reported rather than
    /// enforced (product grids with more than two levels violate it).
    pub fn scaling_condition_holds(&self) -> bool {
        for u in &self.points {
            for v in &self.points {
                let le = u.iter().zip(v).all(|(a, b)| a <= b);
                if le {
                    continue;
                }
                // for points of the orthant, some t > 0 with t·u ≤ v exists
                // iff v_i > 0 wherever u_i > 0
                let scalable = u.iter().zip(v).all(|(a, b)| *a <= 0.0 || *b > 0.0);
                if scalable {
                    return false;
                }
            }
        }
        true
    }
}

/// Outcome of an alternation check.
#[derive(Clone, Debug, PartialEq)]
pub enum AlternationResult {
    /// Every difference up to the requested order is `≤ 1e-9`.
    Ok { evaluations: u128 },
    /// A positive difference `Δ_{points} f(base) = value`.
    Witness { base: Vec<f64>, points: Vec<Vec<f64>>, value: f64 },
}

impl AlternationResult {
    pub fn is_ok(&self) -> bool {
        matches!(self, AlternationResult::Ok { .. })
    }
}

/// Number of terms evaluated by a full check up to `max_order`.
pub fn alternation_cost(lattice_size: usize, max_order: usize) -> u128 {
    (1..=max_order.min(lattice_size))
        .map(|n| lattice_size as f64 * binomial(lattice_size, n) * 2f64.powi(n as i32))
        .sum::<f64>() as u128
}

/// Searches all bases `x ∈ M` and all sets of `n ≤ max_order` distinct
/// points of `M` for a positive successive difference of `f`.
pub fn check_alternation<F: Fn(&[f64]) -> f64>(
    f: F,
    lattice: &FiniteMaxLattice,
    max_order: usize,
    budget: u128,
) -> Result<AlternationResult> {
    if max_order == 0 {
        return Err(Error::InvalidParameter("max_order must be at least 1".into()));
    }
    let m = lattice.points.len();
    let needed = alternation_cost(m, max_order);
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, limit: budget });
    }
    let index: HashMap<Vec<u64>, usize> = lattice.points.iter().enumerate().map(|(i, p)| (key(p), i)).collect();
    let values: Vec<f64> = lattice.points.iter().map(|p| f(p)).collect();
    let joins: Vec<Vec<usize>> = (0..m)
        .map(|i| (0..m).map(|j| index[&key(&join(&lattice.points[i], &lattice.points[j]))]).collect())
        .collect();
    let mut combo: Vec<usize> = Vec::with_capacity(max_order);
    for order in 1..=max_order.min(m) {
        for base in 0..m {
            combo.clear();
            combo.extend(0..order);
            loop {
                // Σ_S (−1)^{|S|} f(base ∨ ⋁S), accumulated over subsets by
                // incremental joins
                let mut joined = vec![base; 1 << order];
                let mut diff = values[base];
                for s in 1usize..(1 << order) {
                    let low = s.trailing_zeros() as usize;
                    joined[s] = joins[joined[s & (s - 1)]][combo[low]];
                    let term = values[joined[s]];
                    if s.count_ones() % 2 == 1 {
                        diff -= term;
                    } else {
                        diff += term;
                    }
                }
                if diff > ALTERNATION_TOL {
                    return Ok(AlternationResult::Witness {
                        base: lattice.points[base].clone(),
                        points: combo.iter().map(|&i| lattice.points[i].clone()).collect(),
                        value: diff,
                    });
                }
                if !next_combination(&mut combo, m) {
                    break;
                }
            }
        }
    }
    Ok(AlternationResult::Ok { evaluations: needed })
}

fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Inclusion–exclusion weights `c_B` with `θ_A = Σ_{B∩A≠∅} c_B`, indexed by
/// mask (`c_∅ = 0`).
#[derive(Clone, Debug, PartialEq)]
pub struct MobiusWeights {
    d: usize,
    c: Vec<f64>,
}

impl MobiusWeights {
    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn get_mask(&self, mask: usize) -> f64 {
        self.c[mask]
    }

    pub fn as_masks(&self) -> &[f64] {
        &self.c
    }

    /// `Σ_{B∩A≠∅} c_B` for the subset with mask `a`.
    pub fn reproduce(&self, a: usize) -> f64 {
        let full = (1usize << self.d) - 1;
        let outside = full & !a;
        let total: f64 = self.c.iter().sum();
        // subtract the weights of B ⊆ A^c
        let mut inside = 0.0;
        let mut b = outside;
        loop {
            inside += self.c[b];
            if b == 0 {
                break;
            }
            b = (b - 1) & outside;
        }
        total - inside
    }

    /// Weights with their subsets, by mask order.
    pub fn iter(&self) -> impl Iterator<Item = (Vec<usize>, f64)> + '_ {
        (1..self.c.len()).map(move |m| (mask_members(m, self.d), self.c[m]))
    }
}

/// Verdict of [`check_extremal_consistency`].
#[derive(Clone, Debug, PartialEq)]
pub enum Consistency {
    Consistent(MobiusWeights),
    /// The most negative weight (smallest mask on ties), with all weights.
    Violation { subset: Vec<usize>, weight: f64, weights: MobiusWeights },
}

impl Consistency {
    pub fn is_consistent(&self) -> bool {
        matches!(self, Consistency::Consistent(_))
    }

    pub fn weights(&self) -> &MobiusWeights {
        match self {
            Consistency::Consistent(w) => w,
            Consistency::Violation { weights, .. } => weights,
        }
    }
}

/// Checks whether a table of extremal coefficients comes from a max-stable
/// law: with `g(C) = θ_full − θ_{C^c}`, the weights
/// `c_B = Σ_{C⊆B} (−1)^{|B∖C|} g(C)` must all be `≥ −1e-9`.
pub fn check_extremal_consistency(theta: &ExtremalTable) -> Result<Consistency> {
    let d = theta.dim();
    for i in 0..d {
        let t = theta.get_mask(1 << i);
        if (t - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "θ_{{{}}} = {t}, but single-coordinate coefficients must equal 1",
                i + 1
            )));
        }
    }
    let full = (1usize << d) - 1;
    let mut c: Vec<f64> = (0..=full).map(|m| theta.get_mask(full) - theta.get_mask(full & !m)).collect();
    // subset Möbius transform
    for i in 0..d {
        for m in 0..=full {
            if m & (1 << i) != 0 {
                c[m] -= c[m ^ (1 << i)];
            }
        }
    }
    c[0] = 0.0;
    let weights = MobiusWeights { d, c };
    let worst = (1..=full).fold(None::<usize>, |best, m| match best {
        Some(b) if weights.c[b] <= weights.c[m] => Some(b),
        _ => Some(m),
    });
    match worst {
        Some(m) if weights.c[m] < -ALTERNATION_TOL => Ok(Consistency::Violation {
            subset: mask_members(m, d),
            weight: weights.c[m],
            weights,
        }),
        _ => Ok(Consistency::Consistent(weights)),
    }
}

/// Union-alternation of `A ↦ θ_A` on the Boolean lattice (with `θ_∅ = 0`)
/// up to order `d`, which already decides consistency.
pub fn check_table_alternation(theta: &ExtremalTable) -> Result<AlternationResult> {
    let d = theta.dim();
    let lattice = FiniteMaxLattice::boolean(d)?;
    let f = |x: &[f64]| {
        let mask = x.iter().enumerate().fold(0usize, |m, (i, v)| if *v > 0.5 { m | (1 << i) } else { m });
        theta.get_mask(mask)
    };
    check_alternation(f, &lattice, d, DEFAULT_BUDGET)
}

/// Max-stable model with one atom `e_B/‖e_B‖_1` of mass `c_B |B|` for each
/// subset with `c_B > 0`; its extremal coefficients reproduce the table.
pub fn construct_from_extremal(theta: &ExtremalTable) -> Result<MaxStableModel> {
    let weights = match check_extremal_consistency(theta)? {
        Consistency::Consistent(w) => w,
        Consistency::Violation { subset, weight, .. } => {
            return Err(Error::Inconsistent { subset: subset.iter().map(|i| i + 1).collect(), weight });
        }
    };
    let d = theta.dim();
    let atoms: Vec<Atom> = (1..weights.c.len())
        .filter(|&m| weights.c[m] > 0.0)
        .map(|m| {
            let size = m.count_ones() as f64;
            let point = (0..d).map(|i| if m & (1 << i) != 0 { 1.0 / size } else { 0.0 }).collect();
            Atom::new(point, weights.c[m] * size)
        })
        .collect();
    let sigma = SpectralMeasure::new(ReferenceNorm::L1, atoms)?;
    MaxStableModel::from_spectral(sigma)
}
