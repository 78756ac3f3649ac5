//! Numerical kernels shared by the geometric and probabilistic layers:
//! quadrature, one-dimensional search, nonnegative least squares, direction
//! grids and deterministic random streams.

use nalgebra::{DMatrix, DVector};
use rand::distr::{Distribution, Open01};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Default geometry tolerance (vertex dedup, collinearity, normalization).
pub const GEOM_TOL: f64 = 1e-9;

/// Rows (or MC draws) per deterministic random chunk.
pub const CHUNK: usize = 4096;

/// Standard normal cdf, `Φ(x) = erfc(−x/√2)/2`.
pub fn std_normal_cdf(x: f64) -> f64 {
    if x == f64::INFINITY {
        return 1.0;
    }
    if x == f64::NEG_INFINITY {
        return 0.0;
    }
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// Standard normal density.
pub fn std_normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// `n!` as a float.
pub fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Gamma function.
pub fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}

/// Compares two numbers with absolute tolerance for values up to 1 and
/// relative tolerance beyond.
pub fn approx_eq(a: f64, b: f64, tol: f64) -> bool {
    if a == b {
        return true;
    }
    let scale = a.abs().max(b.abs()).max(1.0);
    (a - b).abs() <= tol * scale
}

/// Product with the convention `0 · ∞ = 0`.
#[inline]
pub fn mul0(a: f64, x: f64) -> f64 {
    if a == 0.0 || x == 0.0 {
        0.0
    } else {
        a * x
    }
}

fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Adaptive Simpson quadrature on `[a, b]` with absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    // Seed with a few panels so that narrow features are not skipped.
    const PANELS: usize = 8;
    let width = (b - a) / PANELS as f64;
    (0..PANELS)
        .map(|k| {
            let lo = a + k as f64 * width;
            let hi = if k + 1 == PANELS { b } else { lo + width };
            let fa = f(lo);
            let fb = f(hi);
            let fm = f(0.5 * (lo + hi));
            let whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
            simpson_step(&f, lo, hi, fa, fm, fb, whole, tol / PANELS as f64, 40)
        })
        .sum()
}

/// Adaptive Simpson on `[a, b]`, forcing breakpoints at the given interior
/// points (where the integrand is only piecewise smooth).
pub fn integrate_piecewise<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, breaks: &[f64], tol: f64) -> f64 {
    let mut knots: Vec<f64> = breaks
        .iter()
        .copied()
        .filter(|t| *t > a && *t < b && t.is_finite())
        .collect();
    knots.push(a);
    knots.push(b);
    knots.sort_by(|x, y| x.total_cmp(y));
    knots.dedup_by(|x, y| (*x - *y).abs() <= 1e-14);
    let pieces = (knots.len() - 1).max(1) as f64;
    knots
        .windows(2)
        .map(|w| {
            if w[1] - w[0] < 1e-6 {
                // Tiny pieces: fixed Simpson is plenty.
                let m = 0.5 * (w[0] + w[1]);
                (w[1] - w[0]) / 6.0 * (f(w[0]) + 4.0 * f(m) + f(w[1]))
            } else {
                adaptive_simpson(&f, w[0], w[1], tol / pieces)
            }
        })
        .sum()
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p1, mut p2) = (1.0, 0.0);
            for j in 1..=n {
                let p3 = p2;
                p2 = p1;
                p1 = ((2 * j - 1) as f64 * z * p2 - (j - 1) as f64 * p3) / j as f64;
            }
            dp = n as f64 * (z * p1 - p2) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Golden-section minimization of a unimodal function on `[a, b]`.
pub fn golden_section_min<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Smallest `t ∈ [lo, hi]` with `feasible(t)`, assuming feasibility is
/// monotone in `t`. Returns `None` when `hi` itself is infeasible.
pub fn bisect_threshold<F: FnMut(f64) -> bool>(mut feasible: F, mut lo: f64, mut hi: f64, tol: f64) -> Option<f64> {
    if !feasible(hi) {
        return None;
    }
    if feasible(lo) {
        return Some(lo);
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if feasible(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

/// Lawson–Hanson nonnegative least squares: `min ‖A x − b‖₂` subject to `x ≥ 0`.
///
/// Works on the normal equations; passive-set solves reuse a Cholesky factor
/// that grows one column at a time. Columns numerically dependent on the
/// passive set are skipped.
pub fn nnls(a: &DMatrix<f64>, b: &DVector<f64>, max_iter: usize) -> DVector<f64> {
    let n = a.ncols();
    let g = a.tr_mul(a);
    let atb = a.tr_mul(b);
    let diag_max = (0..n).map(|j| g[(j, j)]).fold(0.0, f64::max);
    let ridge = 1e-13 * diag_max.max(f64::MIN_POSITIVE);
    let tol = 1e-11 * atb.amax().max(1.0);
    let mut x = DVector::<f64>::zeros(n);
    let mut passive = vec![false; n];
    let mut skipped = vec![false; n];
    let mut chol = GrowingCholesky::default();
    for _ in 0..max_iter {
        let w = &atb - &g * &x;
        let candidate = (0..n)
            .filter(|&j| !passive[j] && !skipped[j] && w[j] > tol)
            .max_by(|&i, &j| w[i].total_cmp(&w[j]));
        let Some(j) = candidate else { break };
        if !chol.push(&g, j, ridge) {
            skipped[j] = true;
            continue;
        }
        skipped.fill(false);
        passive[j] = true;
        loop {
            let z = chol.solve(&atb);
            if z.iter().all(|&v| v > 0.0) {
                for (k, &col) in chol.idx.iter().enumerate() {
                    x[col] = z[k];
                }
                break;
            }
            let mut alpha = f64::INFINITY;
            for (k, &col) in chol.idx.iter().enumerate() {
                if z[k] <= 0.0 {
                    let denom = x[col] - z[k];
                    if denom > 0.0 {
                        alpha = alpha.min(x[col] / denom);
                    }
                }
            }
            if !alpha.is_finite() {
                alpha = 0.0;
            }
            let mut keep = Vec::with_capacity(chol.idx.len());
            for (k, &col) in chol.idx.iter().enumerate() {
                x[col] += alpha * (z[k] - x[col]);
                if x[col] <= 1e-15 {
                    x[col] = 0.0;
                    passive[col] = false;
                } else {
                    keep.push(col);
                }
            }
            chol = GrowingCholesky::default();
            for col in keep {
                if !chol.push(&g, col, ridge) {
                    x[col] = 0.0;
                    passive[col] = false;
                }
            }
            if chol.idx.is_empty() {
                break;
            }
        }
    }
    x
}

/// Lower-triangular factor of `G[idx, idx] + ridge·I`, stored by rows.
#[derive(Default)]
struct GrowingCholesky {
    idx: Vec<usize>,
    rows: Vec<Vec<f64>>,
}

impl GrowingCholesky {
    /// Appends column `j`; false (and no change) if it is numerically dependent.
    fn push(&mut self, g: &DMatrix<f64>, j: usize, ridge: f64) -> bool {
        let mut r = Vec::with_capacity(self.idx.len() + 1);
        for (i, row) in self.rows.iter().enumerate() {
            let s = g[(self.idx[i], j)] - dot(&row[..i], &r);
            r.push(s / row[i]);
        }
        let gjj = g[(j, j)] + ridge;
        let d = gjj - dot(&r, &r);
        if !(d > 1e-12 * gjj) {
            return false;
        }
        r.push(d.sqrt());
        self.rows.push(r);
        self.idx.push(j);
        true
    }

    fn solve(&self, rhs: &DVector<f64>) -> Vec<f64> {
        let p = self.idx.len();
        let mut y = vec![0.0; p];
        for i in 0..p {
            let row = &self.rows[i];
            y[i] = (rhs[self.idx[i]] - dot(&row[..i], &y[..i])) / row[i];
        }
        for i in (0..p).rev() {
            let mut s = y[i];
            for k in i + 1..p {
                s -= self.rows[k][i] * y[k];
            }
            y[i] = s / self.rows[i][i];
        }
        y
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Chebyshev–Lobatto nodes mapped to `[0, 1]` (endpoints included).
pub fn chebyshev_lobatto(n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![0.5];
    }
    (0..n)
        .map(|k| 0.5 * (1.0 - (std::f64::consts::PI * k as f64 / (n - 1) as f64).cos()))
        .collect()
}

/// All compositions `(i_1, …, i_d)` of `level` into `d` nonnegative parts.
pub fn compositions(level: usize, d: usize) -> Vec<Vec<usize>> {
    fn rec(rem: usize, d: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if d == 1 {
            prefix.push(rem);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for i in 0..=rem {
            prefix.push(i);
            rec(rem - i, d - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(level, d, &mut Vec::with_capacity(d), &mut out);
    out
}

/// Regular grid on the unit ℓ1 simplex with `level` subdivisions per edge.
pub fn simplex_grid(level: usize, d: usize) -> Vec<Vec<f64>> {
    compositions(level, d)
        .into_iter()
        .map(|c| c.into_iter().map(|i| i as f64 / level as f64).collect())
        .collect()
}

/// Directions on the full unit sphere: an equiangular grid of `n` points in
/// 2-D (nested under doubling), a Fibonacci lattice in 3-D and seeded
/// normalized Gaussians beyond.
pub fn sphere_directions(d: usize, n: usize) -> Vec<Vec<f64>> {
    match d {
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..n)
            .map(|j| {
                let th = 2.0 * std::f64::consts::PI * j as f64 / n as f64;
                vec![th.cos(), th.sin()]
            })
            .collect(),
        3 => {
            let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
            (0..n)
                .map(|j| {
                    let z = 1.0 - 2.0 * (j as f64 + 0.5) / n as f64;
                    let r = (1.0 - z * z).max(0.0).sqrt();
                    let th = golden * j as f64;
                    vec![r * th.cos(), r * th.sin(), z]
                })
                .collect()
        }
        _ => {
            let mut rng = chunk_rng(0x5eed_d1e5, 0);
            let normal = rand_distr_normal();
            (0..n)
                .map(|_| {
                    let v: Vec<f64> = (0..d).map(|_| normal(&mut rng)).collect();
                    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                    v.into_iter().map(|x| x / norm).collect()
                })
                .collect()
        }
    }
}

fn rand_distr_normal() -> impl Fn(&mut ChaCha8Rng) -> f64 {
    // Box–Muller; the stream is only used for direction grids.
    |rng: &mut ChaCha8Rng| {
        let u1: f64 = Open01.sample(rng);
        let u2: f64 = Open01.sample(rng);
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }
}

/// Directions in the nonnegative orthant: `n + 1` equiangular points on the
/// quarter circle in 2-D (both axes included), or normalized simplex grid
/// points of roughly `n` elements in higher dimension.
pub fn orthant_directions(d: usize, n: usize) -> Vec<Vec<f64>> {
    if d == 1 {
        return vec![vec![1.0]];
    }
    if d == 2 {
        return (0..=n)
            .map(|j| {
                let th = std::f64::consts::FRAC_PI_2 * j as f64 / n as f64;
                vec![th.cos(), th.sin()]
            })
            .collect();
    }
    let mut level = 1;
    while binomial(level + 1 + d - 1, d - 1) <= n as f64 {
        level += 1;
    }
    simplex_grid(level, d)
}

pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Deterministic random stream for chunk `chunk` of a computation seeded by
/// `seed`. Results of chunked computations are independent of thread count.
pub fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// Unit Fréchet draw `ζ = −1/log U` with `U` on the open unit interval.
#[inline]
pub fn unit_frechet<R: rand::Rng + ?Sized>(rng: &mut R) -> f64 {
    let u: f64 = Open01.sample(rng);
    -1.0 / u.ln()
}

/// Uniform draw on the open unit interval.
#[inline]
pub fn open01<R: rand::Rng + ?Sized>(rng: &mut R) -> f64 {
    Open01.sample(rng)
}

/// Kolmogorov distribution survival function `P(K > λ)` (asymptotic law of
/// `√n · D_n`).
pub fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    let mut s = 0.0;
    for k in 1..=100 {
        let term = (-2.0 * (k * k) as f64 * lambda * lambda).exp();
        s += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * s).clamp(0.0, 1.0)
}
