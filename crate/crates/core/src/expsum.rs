//! Weighted exponential sums `Σ_{k≤n} w(k) e(kx)`, their normalizations, and
//! the geometric kernel `Σ_{m≤n} e(mβ)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::weights::{WeightKind, WeightSequence};

pub type ExpSumValue = Complex64;

/// `T_n(x) = S_n(x) / S_n(0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedTransform {
    pub value: ExpSumValue,
    pub n: usize,
    pub kind: WeightKind,
}

/// `e(t) = exp(2πit)`.
pub fn e(t: f64) -> Complex64 {
    let (s, c) = (2.0 * PI * t).sin_cos();
    Complex64::new(c, s)
}

/// Fractional part of `k·x` without losing the low bits of the product.
pub fn reduced_phase(k: u64, x: f64) -> f64 {
    let kf = k as f64;
    let hi = kf * x;
    let lo = kf.mul_add(x, -hi);
    let f = hi - hi.floor() + lo;
    f - f.floor()
}

/// Neumaier-compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Compensated {
    sum: f64,
    comp: f64,
}

impl Compensated {
    #[inline]
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub(crate) fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

const ANCHOR_SPACING: usize = 32;

/// `Σ_{a≤k≤b} w(k) e(kx)`; phases are re-anchored every 32 terms from the
/// exactly reduced `k·x` and advanced by multiplication in between.
fn weighted_sum(values: &[f64], lo: usize, hi: usize, x: f64) -> Complex64 {
    let step = e(x);
    let (mut re, mut im) = (Compensated::default(), Compensated::default());
    let mut k = lo;
    while k <= hi {
        let end = (k + ANCHOR_SPACING - 1).min(hi);
        let mut z = e(reduced_phase(k as u64, x));
        for &w in &values[k..=end] {
            re.add(w * z.re);
            im.add(w * z.im);
            z *= step;
        }
        k = end + 1;
    }
    Complex64::new(re.value(), im.value())
}

/// `Σ_{k≤n} w(k) e(kx)`.
pub fn exp_sum(w: &WeightSequence, x: f64, n: usize) -> Result<ExpSumValue> {
    w.check_index(n)?;
    if !x.is_finite() {
        return Err(Error::Domain(format!("exponential sum at non-finite x = {x}")));
    }
    let x = x - x.floor();
    if x == 0.0 {
        return Ok(Complex64::new(w.prefix_sum(n), 0.0));
    }
    Ok(weighted_sum(w.values(), 1, n, x))
}

/// Exponential sum at every `x = j/M`, `j = 0..M`, by folding `k mod M` and one
/// length-`M` FFT.
pub fn exp_sum_grid(w: &WeightSequence, n: usize, m: usize) -> Result<Vec<ExpSumValue>> {
    w.check_index(n)?;
    if m < 2 || !m.is_power_of_two() {
        return Err(Error::Domain(format!("grid size must be a power of two >= 2, got {m}")));
    }
    let mut bins = vec![Compensated::default(); m];
    for (k, &wk) in w.values()[..=n].iter().enumerate().skip(1) {
        bins[k & (m - 1)].add(wk);
    }
    let mut buf: Vec<Complex64> = bins.iter().map(|b| Complex64::new(b.value(), 0.0)).collect();
    // inverse transform carries e(+kj/M), the sign convention of e(kx)
    FftPlanner::new().plan_fft_inverse(m).process(&mut buf);
    buf[0] = Complex64::new(w.prefix_sum(n), 0.0);
    Ok(buf)
}

/// `T_n(x) = exp_sum(w, x, n) / prefix_sum(n)`.
pub fn normalized_t(w: &WeightSequence, x: f64, n: usize) -> Result<NormalizedTransform> {
    w.check_index(n)?;
    let total = w.prefix_sum(n);
    if total == 0.0 {
        return Err(Error::DivisionByZero(format!("weights sum to zero up to n = {n}")));
    }
    let value = if x - x.floor() == 0.0 {
        Complex64::new(1.0, 0.0)
    } else {
        exp_sum(w, x, n)? / total
    };
    Ok(NormalizedTransform { value, n, kind: w.kind().clone() })
}

/// `Σ_{m=1}^n e(mβ) = e((n+1)β/2) sin(πnβ)/sin(πβ)`, equal to `n` when β ∈ ℤ.
pub fn geometric_kernel(n: usize, beta: f64) -> ExpSumValue {
    let b = beta - beta.round();
    if b == 0.0 {
        return Complex64::new(n as f64, 0.0);
    }
    let nf = n as f64;
    let ratio = (PI * nf * b).sin() / (PI * b).sin();
    e((nf + 1.0) * b / 2.0) * ratio
}
