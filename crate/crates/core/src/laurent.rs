//! Truncated Laurent series about `s = 1` and the zeta expansion built from
//! computed Stieltjes constants.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `Σ_{k=min_index}^{max_index} c_k (s-1)^k`, exact through `max_index`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaurentSeries {
    pub min_index: i32,
    pub coeffs: Vec<f64>,
}

impl LaurentSeries {
    pub fn new(min_index: i32, coeffs: Vec<f64>) -> Self {
        assert!(!coeffs.is_empty(), "empty Laurent series");
        Self { min_index, coeffs }
    }

    /// Taylor series (min index 0).
    pub fn taylor(coeffs: Vec<f64>) -> Self {
        Self::new(0, coeffs)
    }

    pub fn max_index(&self) -> i32 {
        self.min_index + self.coeffs.len() as i32 - 1
    }

    pub fn coeff(&self, k: i32) -> f64 {
        if k < self.min_index || k > self.max_index() {
            0.0
        } else {
            self.coeffs[(k - self.min_index) as usize]
        }
    }

    /// Order of the pole at `s = 1` (0 if holomorphic there).
    pub fn pole_order(&self) -> u32 {
        self.coeffs
            .iter()
            .position(|&c| c != 0.0)
            .map(|i| (-(self.min_index + i as i32)).max(0) as u32)
            .unwrap_or(0)
    }

    pub fn residue(&self) -> f64 {
        self.coeff(-1)
    }

    pub fn scale(&self, c: f64) -> Self {
        Self::new(self.min_index, self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let lo = self.min_index.min(other.min_index);
        let hi = self.max_index().min(other.max_index());
        let coeffs = (lo..=hi).map(|k| self.coeff(k) + other.coeff(k)).collect();
        Self::new(lo, coeffs)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let lo = self.min_index + other.min_index;
        let hi = (self.max_index() + other.min_index).min(other.max_index() + self.min_index);
        let len = (hi - lo + 1).max(1) as usize;
        let mut coeffs = vec![0.0; len];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                if i + j < len {
                    coeffs[i + j] += a * b;
                }
            }
        }
        Self::new(lo, coeffs)
    }

    pub fn powi(&self, e: u32) -> Self {
        let mut acc = Self::taylor(vec![1.0; 1]);
        // keep the unit series long enough not to truncate the result
        acc.coeffs.resize(self.coeffs.len(), 0.0);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Reciprocal of a Taylor series with nonzero constant term.
    pub fn recip_taylor(&self) -> Result<Self> {
        if self.min_index != 0 || self.coeffs[0] == 0.0 {
            return Err(Error::Domain(
                "reciprocal needs a Taylor series with nonzero constant term".into(),
            ));
        }
        let a = &self.coeffs;
        let mut b = vec![0.0; a.len()];
        b[0] = 1.0 / a[0];
        for k in 1..a.len() {
            let s: f64 = (1..=k).map(|i| a[i] * b[k - i]).sum();
            b[k] = -s / a[0];
        }
        Ok(Self::taylor(b))
    }

    /// Residue at `s = 1` of `y^s / s · self(s)`, returned as the coefficients
    /// (ascending in `L = log y`) of the polynomial `R` with residue `y · R(log y)`.
    pub fn mellin_residue_poly(&self) -> Result<Vec<f64>> {
        let order = self.pole_order().max(1) as usize;
        if self.max_index() < -1 {
            return Err(Error::TruncationOrder { order: 0, needed: order });
        }
        // 1/s = 1/(1+u) = Σ (-u)^k
        let len = self.coeffs.len();
        let inv_s = Self::taylor((0..len).map(|k| if k % 2 == 0 { 1.0 } else { -1.0 }).collect());
        let g = self.mul(&inv_s);
        if g.max_index() < -1 {
            return Err(Error::TruncationOrder { order: self.coeffs.len(), needed: order });
        }
        // y^{1+u} = y Σ L^j u^j / j!
        let mut fact = 1.0;
        let mut out = Vec::with_capacity(order);
        for j in 0..order {
            if j > 0 {
                fact *= j as f64;
            }
            out.push(g.coeff(-1 - j as i32) / fact);
        }
        Ok(out)
    }
}

const BERNOULLI_EVEN: [(f64, f64); 10] = [
    (1.0, 6.0),
    (-1.0, 30.0),
    (1.0, 42.0),
    (-1.0, 30.0),
    (5.0, 66.0),
    (-691.0, 2730.0),
    (7.0, 6.0),
    (-3617.0, 510.0),
    (43867.0, 798.0),
    (-174611.0, 330.0),
];

/// γ_k from `Σ_{m≤N} (log m)^k/m − (log N)^{k+1}/(k+1)` with the
/// Euler–Maclaurin tail removed through `B_20`.
fn stieltjes_at(k: usize, n: u64) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for m in 1..=n {
        let lm = (m as f64).ln();
        let term = lm.powi(k as i32) / m as f64;
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
    }
    let nf = n as f64;
    let ln = nf.ln();
    let mut value = sum + comp - ln.powi(k as i32 + 1) / (k as f64 + 1.0);
    let f_n = ln.powi(k as i32) / nf;
    value -= f_n / 2.0;
    // f^{(r)}(t) = t^{-1-r} Σ_i a_i (log t)^i
    let mut a = vec![0.0; k + 1];
    a[k] = 1.0;
    let mut fact = 2.0; // (2j)!
    for (j, &(bn, bd)) in BERNOULLI_EVEN.iter().enumerate() {
        let r_odd = 2 * j + 1;
        // advance derivative order to r_odd
        let start = if j == 0 { 0 } else { r_odd - 2 };
        for r in start..r_odd {
            let mut next = vec![0.0; k + 1];
            for i in 0..=k {
                next[i] -= (1.0 + r as f64) * a[i];
                if i > 0 {
                    next[i - 1] += i as f64 * a[i];
                }
            }
            a = next;
        }
        let deriv: f64 = a
            .iter()
            .enumerate()
            .map(|(i, c)| c * ln.powi(i as i32))
            .sum::<f64>()
            * nf.powi(-(r_odd as i32) - 1);
        if j > 0 {
            fact *= (2 * j + 1) as f64 * (2 * j + 2) as f64;
        }
        value -= bn / bd / fact * deriv;
    }
    value
}

/// Stieltjes constant γ_k, agreement of two cut-offs checked to `1e-10` on the
/// scale of `γ_k / k!`.
pub fn stieltjes(k: usize) -> Result<f64> {
    let a = stieltjes_at(k, 200);
    let b = stieltjes_at(k, 400);
    let scale: f64 = (1..=k).map(|i| i as f64).product();
    if ((a - b) / scale).abs() > 1e-10 {
        return Err(Error::Precision(format!(
            "Stieltjes constant γ_{k} did not converge ({a} vs {b})"
        )));
    }
    Ok(b)
}

/// Laurent expansion of ζ(s) at `s = 1` through index `order`.
pub fn zeta_laurent(order: usize) -> Result<LaurentSeries> {
    if order > 10 {
        return Err(Error::Domain(format!("zeta expansion order {order} > 10")));
    }
    let mut coeffs = vec![1.0];
    let mut fact = 1.0;
    for k in 0..=order {
        if k > 0 {
            fact *= k as f64;
        }
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        coeffs.push(sign * stieltjes(k)? / fact);
    }
    Ok(LaurentSeries::new(-1, coeffs))
}
