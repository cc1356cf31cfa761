#![allow(dead_code)]

use qgames_core::linalg::{c, CMatrix, C64};
use qgames_core::quantum::{Channel, DensityMatrix, StateVector, Unitary};
use rand::{Rng, SeedableRng};
use rand_pcg::Pcg32;

pub fn rng(seed: u64) -> Pcg32 {
    Pcg32::seed_from_u64(seed)
}

pub fn rand_c<R: Rng>(r: &mut R) -> C64 {
    c(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0))
}

pub fn random_state<R: Rng>(r: &mut R, dim: usize) -> StateVector {
    loop {
        let v: Vec<C64> = (0..dim).map(|_| rand_c(r)).collect();
        if let Ok(s) = StateVector::normalized(v) {
            return s;
        }
    }
}

/// Haar-ish unitary by Gram-Schmidt on random columns.
pub fn random_unitary<R: Rng>(r: &mut R, dim: usize) -> Unitary {
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(dim);
    while cols.len() < dim {
        let mut v: Vec<C64> = (0..dim).map(|_| rand_c(r)).collect();
        for u in &cols {
            let proj: C64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (x, y) in v.iter_mut().zip(u) {
                *x -= proj * y;
            }
        }
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n < 1e-6 {
            continue;
        }
        cols.push(v.into_iter().map(|z| z / n).collect());
    }
    Unitary::new(CMatrix::from_fn(dim, |i, j| cols[j][i])).unwrap()
}

/// Full-rank random density matrix `G G^dagger / tr`.
pub fn random_density<R: Rng>(r: &mut R, dim: usize) -> DensityMatrix {
    let vals: Vec<C64> = (0..dim * dim).map(|_| rand_c(r)).collect();
    let g = CMatrix::from_fn(dim, |i, j| vals[i * dim + j]);
    let m = &g * &g.adjoint();
    let t = m.trace().re;
    let mut m = m.scale(c(1.0 / t, 0.0));
    // Symmetrize away rounding so construction-time checks see exact
    // Hermiticity.
    for i in 0..dim {
        for j in 0..i {
            let z = m[(j, i)].conj();
            m[(i, j)] = z;
        }
        m[(i, i)] = c(m[(i, i)].re, 0.0);
    }
    DensityMatrix::new(m).unwrap()
}

/// Random channel with `k` Kraus operators, cut from the first `dim`
/// columns of a random unitary on `dim * k`.
pub fn random_kraus_channel<R: Rng>(r: &mut R, dim: usize, k: usize) -> Channel {
    let u = random_unitary(r, dim * k);
    let ops = (0..k)
        .map(|b| CMatrix::from_fn(dim, |i, j| u.matrix()[(b * dim + i, j)]))
        .collect();
    Channel::kraus(ops).unwrap()
}

pub fn random_convex_channel<R: Rng>(r: &mut R, dim: usize, k: usize) -> Channel {
    let mut w: Vec<f64> = (0..k).map(|_| r.random_range(0.01..1.0)).collect();
    let s: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= s);
    let last = 1.0 - w[..k - 1].iter().sum::<f64>();
    w[k - 1] = last;
    Channel::convex(w.into_iter().map(|x| (x, random_unitary(r, dim))).collect()).unwrap()
}

pub fn random_channel<R: Rng>(r: &mut R, dim: usize) -> Channel {
    let k = r.random_range(1..=4);
    if r.random::<bool>() {
        random_kraus_channel(r, dim, k)
    } else {
        random_convex_channel(r, dim, k)
    }
}

/// A random `U(a, b)` drawn uniformly in the angle box.
pub fn random_u2<R: Rng>(r: &mut R) -> (Unitary, f64) {
    let alpha = r.random_range(0.0..std::f64::consts::FRAC_PI_2);
    let p1 = r.random_range(0.0..std::f64::consts::TAU);
    let p2 = r.random_range(0.0..std::f64::consts::TAU);
    let u = qgames_core::u2_angles(alpha, p1, p2).unwrap();
    let aa = alpha.cos().powi(2);
    (u, aa)
}

/// Smallest eigenvalue of the symmetric tridiagonal matrix with diagonal
/// `d` and off-diagonal `e`, by Sturm-sequence bisection.
pub fn tridiagonal_min_eigenvalue(d: &[f64], e: &[f64]) -> f64 {
    let count_below = |x: f64| {
        let mut count = 0;
        let mut q = d[0] - x;
        if q < 0.0 {
            count += 1;
        }
        for i in 1..d.len() {
            let denom = if q == 0.0 { f64::EPSILON } else { q };
            q = d[i] - x - e[i - 1] * e[i - 1] / denom;
            if q < 0.0 {
                count += 1;
            }
        }
        count
    };
    let radius = d
        .iter()
        .enumerate()
        .map(|(i, di)| {
            let left = if i > 0 { e[i - 1].abs() } else { 0.0 };
            let right = if i < e.len() { e[i].abs() } else { 0.0 };
            (di - left - right, di + left + right)
        })
        .fold((f64::INFINITY, f64::NEG_INFINITY), |acc, (lo, hi)| {
            (acc.0.min(lo), acc.1.max(hi))
        });
    let (mut lo, mut hi) = radius;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if count_below(mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}
