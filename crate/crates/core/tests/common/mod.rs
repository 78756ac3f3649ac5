#![allow(dead_code)]

use maxzonoid::distribution::MaxStableModel;
use maxzonoid::{Atom, ReferenceNorm, SpectralMeasure};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Atoms `(point on the ℓ1 simplex, mass)` with unit marginal sums.
#[derive(Clone, Debug)]
pub struct Discrete {
    pub d: usize,
    pub atoms: Vec<(Vec<f64>, f64)>,
}

impl Discrete {
    /// `h(x) = Σ_k m_k max_i a_{k,i} x_i`, written out directly.
    pub fn h(&self, x: &[f64]) -> f64 {
        self.atoms
            .iter()
            .map(|(a, m)| m * a.iter().zip(x).map(|(ai, xi)| if *ai == 0.0 { 0.0 } else { ai * xi }).fold(0.0, f64::max))
            .sum()
    }

    pub fn cdf(&self, x: &[f64]) -> f64 {
        let inv: Vec<f64> = x.iter().map(|v| 1.0 / v).collect();
        (-self.h(&inv)).exp()
    }

    pub fn theta(&self, subset: &[usize]) -> f64 {
        let mut e = vec![0.0; self.d];
        for &i in subset {
            e[i] = 1.0;
        }
        self.h(&e)
    }

    pub fn measure(&self) -> SpectralMeasure {
        let atoms = self.atoms.iter().map(|(a, m)| Atom::new(a.clone(), *m)).collect();
        SpectralMeasure::new(ReferenceNorm::L1, atoms).unwrap()
    }

    pub fn model(&self) -> MaxStableModel {
        MaxStableModel::from_spectral(self.measure()).unwrap()
    }
}

/// Random discrete dependency model with `k` atoms, some coordinates zeroed.
pub fn random_discrete(d: usize, k: usize, rng: &mut impl Rng) -> Discrete {
    let mut raw: Vec<(Vec<f64>, f64)> = (0..k)
        .map(|_| {
            let mut p: Vec<f64> = (0..d).map(|_| if rng.random_bool(0.2) { 0.0 } else { rng.random_range(0.05..1.0) }).collect();
            if p.iter().all(|v| *v == 0.0) {
                p[rng.random_range(0..d)] = 1.0;
            }
            (p, rng.random_range(0.1..1.0))
        })
        .collect();
    // every coordinate must be charged
    for i in 0..d {
        if raw.iter().all(|(p, _)| p[i] == 0.0) {
            let mut p = vec![0.0; d];
            p[i] = 1.0;
            raw.push((p, 0.5));
        }
    }
    // move to the ℓ1 simplex, then rescale coordinates to unit marginals
    let mut sums = vec![0.0; d];
    for (p, m) in &raw {
        let s: f64 = p.iter().sum();
        for i in 0..d {
            sums[i] += m * p[i] / s;
        }
    }
    let atoms = raw
        .into_iter()
        .map(|(p, m)| {
            let s: f64 = p.iter().sum();
            let q: Vec<f64> = p.iter().zip(&sums).map(|(v, c)| v / s / c).collect();
            let t: f64 = q.iter().sum();
            (q.iter().map(|v| v / t).collect(), m * t)
        })
        .collect();
    Discrete { d, atoms }
}

/// Sample Kendall τ by counting discordant pairs with a merge sort, assuming
/// no ties.
pub fn sample_kendall_tau(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut v: Vec<f64> = idx.iter().map(|&i| y[i]).collect();
    let mut buf = v.clone();
    let inversions = merge_count(&mut v, &mut buf);
    let pairs = n as f64 * (n as f64 - 1.0) / 2.0;
    1.0 - 2.0 * inversions as f64 / pairs
}

fn merge_count(v: &mut [f64], buf: &mut [f64]) -> u64 {
    let n = v.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut count = merge_count(&mut v[..mid], &mut buf[..mid]) + merge_count(&mut v[mid..], &mut buf[mid..]);
    let (mut i, mut j, mut k) = (0, mid, 0);
    while i < mid && j < n {
        if v[i] <= v[j] {
            buf[k] = v[i];
            i += 1;
        } else {
            buf[k] = v[j];
            count += (mid - i) as u64;
            j += 1;
        }
        k += 1;
    }
    buf[k..k + mid - i].copy_from_slice(&v[i..mid]);
    let k2 = k + mid - i;
    buf[k2..].copy_from_slice(&v[j..]);
    v.copy_from_slice(buf);
    count
}

/// Kolmogorov–Smirnov statistic of a sample against a continuous cdf.
pub fn ks_statistic(sample: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut s = sample.to_vec();
    s.sort_by(|a, b| a.total_cmp(b));
    let n = s.len() as f64;
    s.iter()
        .enumerate()
        .map(|(i, &v)| {
            let f = cdf(v);
            (f - i as f64 / n).max((i as f64 + 1.0) / n - f)
        })
        .fold(0.0, f64::max)
}

/// Asymptotic p-value `P(√n D > t)` of the KS statistic.
pub fn ks_pvalue(stat: f64, n: usize) -> f64 {
    let sn = (n as f64).sqrt();
    let t = (sn + 0.12 + 0.11 / sn) * stat;
    if t < 0.2 {
        return 1.0;
    }
    let mut p = 0.0;
    for k in 1..200 {
        let kf = k as f64;
        let term = 2.0 * (-1f64).powi(k - 1) * (-2.0 * kf * kf * t * t).exp();
        p += term;
        if term.abs() < 1e-16 {
            break;
        }
    }
    p.clamp(0.0, 1.0)
}

pub fn unit_frechet_cdf(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        (-1.0 / x).exp()
    }
}

/// Random dependency polygon: down-closed hull of random points of the
/// unit square together with both basis vectors.
pub fn random_dependency_vertices(rng: &mut impl Rng) -> Vec<[f64; 2]> {
    let k = rng.random_range(1..8);
    let mut pts = vec![[1.0, 0.0], [0.0, 1.0]];
    for _ in 0..k {
        pts.push([rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)]);
    }
    if rng.random_bool(0.3) {
        pts.push([1.0, rng.random_range(0.0..1.0)]);
    }
    pts
}
