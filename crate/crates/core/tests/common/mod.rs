#![allow(dead_code, clippy::needless_range_loop)]

use logsmooth::operator::ProductWeights;

pub fn dense(w: &ProductWeights) -> Vec<Vec<f64>> {
    let d = w.n() + 1;
    (0..d)
        .map(|j| (0..d).map(|i| w.entry(j, i)).collect())
        .collect()
}

pub fn matvec(a: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    a.iter()
        .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
        .collect()
}

/// Gaussian elimination with partial pivoting.
pub fn lu_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for k in 0..n {
        let piv = (k..n)
            .max_by(|&i, &j| a[i][k].abs().partial_cmp(&a[j][k].abs()).unwrap())
            .unwrap();
        a.swap(k, piv);
        b.swap(k, piv);
        for i in k + 1..n {
            let f = a[i][k] / a[k][k];
            if f != 0.0 {
                for j in k..n {
                    a[i][j] -= f * a[k][j];
                }
                b[i] -= f * b[k];
            }
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| a[i][j] * x[j]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    x
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

pub fn sup(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// First column of `T^p` for the lower-triangular Toeplitz matrix with first
/// column `t`, via the Miller power-series recurrence.
pub fn toeplitz_power_column(t: &[f64], p: f64, len: usize) -> Vec<f64> {
    let mut g = vec![0.0; len];
    g[0] = t[0].powf(p);
    for k in 1..len {
        let mut s = 0.0;
        for j in 1..=k.min(t.len() - 1) {
            s += ((p + 1.0) * j as f64 - k as f64) * t[j] * g[k - j];
        }
        g[k] = s / (k as f64 * t[0]);
    }
    g
}

pub fn toeplitz_apply(col: &[f64], u: &[f64]) -> Vec<f64> {
    (0..u.len())
        .map(|j| (0..=j).map(|i| col[j - i] * u[i]).sum())
        .collect()
}
