//! Independent reference computations shared by the integration tests. None
//! of these reuse the library's linear algebra.

#![allow(dead_code, clippy::needless_range_loop)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Gaussian elimination with partial pivoting; `None` if a pivot falls below
/// `1e-13` times the largest entry.
pub fn gauss_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    let scale = a.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() <= 1e-13 * scale {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            for c in col..n {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Projection of `x0` onto `{z : ⟨a_i, z⟩ ≤ b_i}` by active-set enumeration
/// with a full KKT check: the chosen active set must give nonnegative
/// multipliers and a feasible point. Returns the first KKT point found.
pub fn qp_project(cuts: &[(Vec<f64>, f64)], x0: &[f64]) -> Option<Vec<f64>> {
    let m = cuts.len();
    let dim = x0.len();
    let feasible = |z: &[f64]| {
        cuts.iter().all(|(a, b)| dot(a, z) - b <= 1e-9 * (1.0 + b.abs() + dot(a, a).sqrt() * (1.0 + dot(z, z).sqrt())))
    };
    if feasible(x0) {
        return Some(x0.to_vec());
    }
    for k in 1..=m.min(dim) {
        for mask in 0u32..(1 << m) {
            if mask.count_ones() as usize != k {
                continue;
            }
            let act: Vec<usize> = (0..m).filter(|i| mask & (1 << i) != 0).collect();
            let g: Vec<Vec<f64>> =
                act.iter().map(|&i| act.iter().map(|&j| dot(&cuts[i].0, &cuts[j].0)).collect()).collect();
            let r: Vec<f64> = act.iter().map(|&i| dot(&cuts[i].0, x0) - cuts[i].1).collect();
            let Some(mu) = gauss_solve(g, r) else { continue };
            if mu.iter().any(|&v| v < -1e-10) {
                continue;
            }
            let mut z = x0.to_vec();
            for (&i, &u) in act.iter().zip(&mu) {
                for (zc, ac) in z.iter_mut().zip(&cuts[i].0) {
                    *zc -= u * ac;
                }
            }
            if feasible(&z) {
                return Some(z);
            }
        }
    }
    None
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
pub fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _sweep in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i][j] * a[i][j]).sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i][i]).collect()
}

/// Spectral norm as the square root of the largest eigenvalue of `MᵀM`.
pub fn spectral_norm(m: &[Vec<f64>]) -> f64 {
    let n = m[0].len();
    let mtm: Vec<Vec<f64>> =
        (0..n).map(|i| (0..n).map(|j| m.iter().map(|row| row[i] * row[j]).sum()).collect()).collect();
    jacobi_eigenvalues(mtm).into_iter().fold(0.0, f64::max).sqrt()
}

/// Minimizer of `f` over the box `[lo, hi]` by repeated grid refinement:
/// evaluate a `points^d` grid, recentre on the best node, shrink by half.
pub fn grid_minimize(f: impl Fn(&[f64]) -> f64, lo: &[f64], hi: &[f64], points: usize, rounds: usize) -> Vec<f64> {
    let d = lo.len();
    let mut lo = lo.to_vec();
    let mut hi = hi.to_vec();
    let (lo0, hi0) = (lo.clone(), hi.clone());
    let mut best = lo.clone();
    for _ in 0..rounds {
        let mut best_val = f64::INFINITY;
        let total = points.pow(d as u32);
        for idx in 0..total {
            let mut rem = idx;
            let z: Vec<f64> = (0..d)
                .map(|k| {
                    let t = (rem % points) as f64 / (points - 1) as f64;
                    rem /= points;
                    lo[k] + t * (hi[k] - lo[k])
                })
                .collect();
            let v = f(&z);
            if v < best_val {
                best_val = v;
                best = z;
            }
        }
        for k in 0..d {
            let w = (hi[k] - lo[k]) / 4.0;
            lo[k] = (best[k] - w).max(lo0[k]);
            hi[k] = (best[k] + w).min(hi0[k]);
        }
    }
    best
}

/// Feasible system of `m` cuts in R^dim around a random witness; a third of
/// the cuts pass through the witness.
pub fn random_system(rng: &mut ChaCha8Rng, dim: usize, m: usize) -> (Vec<(Vec<f64>, f64)>, Vec<f64>) {
    let w: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let cuts = (0..m)
        .map(|k| {
            let a: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let slack = if k % 3 == 0 { 0.0 } else { rng.gen_range(0.0..1.0) };
            let b = dot(&a, &w) + slack;
            (a, b)
        })
        .collect();
    let x0 = (0..dim).map(|_| rng.gen_range(-4.0..4.0)).collect();
    (cuts, x0)
}
