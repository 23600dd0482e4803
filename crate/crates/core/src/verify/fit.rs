//! Least-squares fits of `Σ c_i (log n)^{d−i}` to sampled values.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogPolyFit {
    /// Descending powers of `log n`, like [`crate::singular::LogPolynomial`].
    pub coeffs: Vec<f64>,
    /// 2-norm condition number of the (column-scaled) design matrix.
    pub condition_number: f64,
    pub rms_residual: f64,
}

impl LogPolyFit {
    pub fn eval(&self, n: f64) -> f64 {
        let l = n.ln();
        self.coeffs.iter().fold(0.0, |acc, c| acc * l + c)
    }
}

/// Geometric grid of `count` integers from `lo` to `hi` (deduplicated).
pub fn geometric_grid(lo: usize, hi: usize, count: usize) -> Vec<usize> {
    assert!(lo >= 1 && hi >= lo && count >= 2);
    let r = (hi as f64 / lo as f64).ln() / (count - 1) as f64;
    let mut out: Vec<usize> =
        (0..count).map(|i| ((lo as f64).ln() + r * i as f64).exp().round() as usize).collect();
    out[count - 1] = hi;
    out.dedup();
    out
}

/// Ordinary least squares via Householder QR on columns scaled to unit norm.
pub fn fit_log_polynomial(samples: &[(f64, f64)], degree: usize) -> Result<LogPolyFit> {
    let cols = degree + 1;
    if samples.len() < degree + 2 {
        return Err(Error::Precondition(format!(
            "{} samples for a degree-{degree} fit; need at least {}",
            samples.len(),
            degree + 2
        )));
    }
    let (lo, hi) = samples
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &(n, _)| (lo.min(n), hi.max(n)));
    if !(lo > 0.0) || hi < 10.0 * lo {
        return Err(Error::Precondition(format!("samples span [{lo}, {hi}], need a factor >= 10")));
    }
    let rows = samples.len();
    // column j holds (log n)^{degree−j}
    let mut a = vec![vec![0.0; cols]; rows];
    let mut b: Vec<f64> = samples.iter().map(|s| s.1).collect();
    for (row, &(n, _)) in a.iter_mut().zip(samples) {
        let l = n.ln();
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = l.powi((degree - j) as i32);
        }
    }
    let scale: Vec<f64> =
        (0..cols).map(|j| a.iter().map(|r| r[j] * r[j]).sum::<f64>().sqrt()).collect();
    for row in a.iter_mut() {
        for j in 0..cols {
            row[j] /= scale[j];
        }
    }
    let design = a.clone();
    for k in 0..cols {
        let norm = (k..rows).map(|i| a[i][k] * a[i][k]).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::RankDeficient(format!("column {k} vanishes")));
        }
        let alpha = if a[k][k] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = (k..rows).map(|i| a[i][k]).collect();
        v[0] -= alpha;
        let vn = v.iter().map(|x| x * x).sum::<f64>();
        if vn > 0.0 {
            for j in k..cols {
                let dot: f64 = (k..rows).map(|i| v[i - k] * a[i][j]).sum();
                let f = 2.0 * dot / vn;
                for i in k..rows {
                    a[i][j] -= f * v[i - k];
                }
            }
            let dot: f64 = (k..rows).map(|i| v[i - k] * b[i]).sum();
            let f = 2.0 * dot / vn;
            for i in k..rows {
                b[i] -= f * v[i - k];
            }
        }
    }
    let diag_max = (0..cols).map(|k| a[k][k].abs()).fold(0.0, f64::max);
    if let Some(k) = (0..cols).find(|&k| a[k][k].abs() <= 1e-13 * diag_max) {
        return Err(Error::RankDeficient(format!("pivot {k} is negligible")));
    }
    let mut x = vec![0.0; cols];
    for k in (0..cols).rev() {
        let s: f64 = (k + 1..cols).map(|j| a[k][j] * x[j]).sum();
        x[k] = (b[k] - s) / a[k][k];
    }
    let condition_number = condition(&design);
    let coeffs: Vec<f64> = x.iter().zip(&scale).map(|(c, s)| c / s).collect();
    let fit = LogPolyFit { coeffs, condition_number, rms_residual: 0.0 };
    let ss: f64 = samples.iter().map(|&(n, y)| (fit.eval(n) - y).powi(2)).sum();
    Ok(LogPolyFit { rms_residual: (ss / rows as f64).sqrt(), ..fit })
}

/// `sqrt(λ_max/λ_min)` of `AᵀA` by cyclic Jacobi rotations.
fn condition(a: &[Vec<f64>]) -> f64 {
    let c = a[0].len();
    let mut m = vec![vec![0.0; c]; c];
    for row in a {
        for i in 0..c {
            for j in 0..c {
                m[i][j] += row[i] * row[j];
            }
        }
    }
    for _ in 0..100 {
        let off: f64 = (0..c).flat_map(|i| (0..c).map(move |j| (i, j))).filter(|(i, j)| i != j).map(|(i, j)| m[i][j] * m[i][j]).sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..c {
            for q in p + 1..c {
                if m[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let (cs, sn) = (1.0 / (t * t + 1.0).sqrt(), t / (t * t + 1.0).sqrt());
                for k in 0..c {
                    let (mkp, mkq) = (m[k][p], m[k][q]);
                    m[k][p] = cs * mkp - sn * mkq;
                    m[k][q] = sn * mkp + cs * mkq;
                }
                for k in 0..c {
                    let (mpk, mqk) = (m[p][k], m[q][k]);
                    m[p][k] = cs * mpk - sn * mqk;
                    m[q][k] = sn * mpk + cs * mqk;
                }
            }
        }
    }
    let eig: Vec<f64> = (0..c).map(|i| m[i][i].abs()).collect();
    let (lo, hi) = eig.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &e| (lo.min(e), hi.max(e)));
    (hi / lo).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Vec<f64> {
        geometric_grid(10_000, 1_000_000, 25).into_iter().map(|n| n as f64).collect()
    }

    #[test]
    fn exact_recovery() {
        let c = [0.5, -1.25, 3.0];
        let s: Vec<(f64, f64)> = grid()
            .into_iter()
            .map(|n| {
                let l = n.ln();
                (n, c[0] * l * l + c[1] * l + c[2])
            })
            .collect();
        let f = fit_log_polynomial(&s, 2).unwrap();
        for (a, b) in f.coeffs.iter().zip(c) {
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
        assert!(f.condition_number > 1.0 && f.condition_number.is_finite());
    }

    #[test]
    fn noise_perturbs_little() {
        let s: Vec<(f64, f64)> = grid()
            .into_iter()
            .enumerate()
            .map(|(i, n)| (n, n.ln() + 0.2 + if i % 2 == 0 { 1e-6 } else { -1e-6 }))
            .collect();
        let f = fit_log_polynomial(&s, 1).unwrap();
        assert!((f.coeffs[0] - 1.0).abs() < 1e-4 && (f.coeffs[1] - 0.2).abs() < 1e-4);
    }

    #[test]
    fn preconditions() {
        let narrow: Vec<(f64, f64)> = (1..10).map(|i| (100.0 + i as f64, 1.0)).collect();
        assert!(matches!(fit_log_polynomial(&narrow, 1), Err(Error::Precondition(_))));
        let few = [(10.0, 1.0), (1000.0, 2.0)];
        assert!(fit_log_polynomial(&few, 1).is_err());
    }

    #[test]
    fn grid_is_geometric() {
        let g = geometric_grid(100, 10_000, 5);
        assert_eq!(g, vec![100, 316, 1000, 3162, 10_000]);
    }
}
