//! Major/minor arc decomposition and the circle-method approximants.
//!
//! Major arcs are `|x − a/q| ≤ 1/Q` with `q ≤ P`, where
//! `P = (log n)^{3(1−ε)}` and `Q = n/(log n)^{2(1−ε)}`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::arith::gcd;
use crate::error::{Error, Result};
use crate::expsum::geometric_kernel;
use crate::singular::LogPolynomial;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArcParams {
    pub n: u64,
    pub eps: f64,
    pub p: f64,
    pub q: f64,
    pub m_const: f64,
    /// `log n₀`: beyond it `1/Q ≤ 1/(8MP²)` holds.
    pub log_threshold: f64,
}

impl ArcParams {
    pub fn new(n: u64, eps: f64, m_const: f64) -> Result<Self> {
        if n < 3 {
            return Err(Error::Domain(format!("arc parameters need n >= 3, got {n}")));
        }
        if !(eps > 0.0 && eps < 0.5) {
            return Err(Error::Domain(format!("eps must lie in (0, 1/2), got {eps}")));
        }
        if !(m_const >= 1.0) {
            return Err(Error::Domain(format!("bump constant M must be >= 1, got {m_const}")));
        }
        let l = (n as f64).ln();
        Ok(Self {
            n,
            eps,
            p: l.powf(3.0 * (1.0 - eps)),
            q: n as f64 / l.powf(2.0 * (1.0 - eps)),
            m_const,
            log_threshold: log_threshold(eps, m_const),
        })
    }

    pub fn p_floor(&self) -> u64 {
        self.p.floor() as u64
    }

    /// `n₀` as a float (it overflows every integer type for small ε).
    pub fn threshold(&self) -> f64 {
        self.log_threshold.exp()
    }

    /// Whether `8MP² ≤ Q` already holds at this `n`.
    pub fn separated(&self) -> bool {
        8.0 * self.m_const * self.p * self.p <= self.q
    }

    /// Dyadic truncation of the φ-sum: `⌈log₂ P⌉ + 2`.
    pub fn s_max(&self) -> u32 {
        self.p.log2().ceil().max(0.0) as u32 + 2
    }
}

/// Largest root `L` of `L − ln(8M) − 8(1−ε) ln L = 0`.
fn log_threshold(eps: f64, m_const: f64) -> f64 {
    let c = 8.0 * (1.0 - eps);
    let f = |l: f64| l - (8.0 * m_const).ln() - c * l.ln();
    let (mut lo, mut hi) = (c.max(1.0), c.max(1.0) * 2.0);
    while f(hi) < 0.0 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ArcClassification {
    Major { a: u64, q: u64 },
    Minor,
}

/// Smallest `q ≤ P` with `|x − a/q| ≤ 1/Q`, `a = round(qx)`.
pub fn classify(x: f64, params: &ArcParams) -> ArcClassification {
    let inv_q = 1.0 / params.q;
    for q in 1..=params.p_floor().max(1) {
        let a = (q as f64 * x).round();
        if (x - a / q as f64).abs() <= inv_q {
            let a = a as u64;
            let g = gcd(a, q).max(1);
            return ArcClassification::Major { a: a / g, q: q / g };
        }
    }
    ArcClassification::Minor
}

/// Best approximation `a/q` to `x` with `1 ≤ q ≤ q_max` (convergents and the
/// last admissible semiconvergent); ties go to the smaller `q`.
pub fn best_rational(x: f64, q_max: u64) -> (i64, u64) {
    assert!(q_max >= 1);
    let mut candidates: Vec<(i64, u64)> = vec![(x.round() as i64, 1)];
    let (mut p_prev, mut q_prev) = (1i128, 0i128);
    let (mut p_cur, mut q_cur) = (x.floor() as i128, 1i128);
    let mut rem = x - x.floor();
    loop {
        if q_cur as u64 <= q_max {
            candidates.push((p_cur as i64, q_cur as u64));
        }
        if rem < 1e-15 {
            break;
        }
        let inv = 1.0 / rem;
        let a = inv.floor();
        rem = inv - a;
        let a = a as i128;
        let q_next = a * q_cur + q_prev;
        if q_next > q_max as i128 {
            // largest semiconvergent below the bound
            let t = (q_max as i128 - q_prev) / q_cur;
            if t >= 1 {
                candidates.push(((t * p_cur + p_prev) as i64, (t * q_cur + q_prev) as u64));
            }
            break;
        }
        (p_prev, q_prev, p_cur, q_cur) = (p_cur, q_cur, a * p_cur + p_prev, q_next);
    }
    let dist = |&(a, q): &(i64, u64)| (x - a as f64 / q as f64).abs();
    let mut best = candidates[0];
    for c in &candidates[1..] {
        let (dc, db) = (dist(c), dist(&best));
        if dc < db || (dc == db && c.1 < best.1) {
            best = *c;
        }
    }
    let g = gcd(best.0.unsigned_abs(), best.1).max(1);
    (best.0 / g as i64, best.1 / g)
}

/// Continued-fraction convergents `p_k/q_k` of `x` with `q_k ≤ q_max`.
pub fn convergents(x: f64, q_max: u64) -> Vec<(i64, u64)> {
    let (mut p_prev, mut q_prev) = (1i128, 0i128);
    let (mut p_cur, mut q_cur) = (x.floor() as i128, 1i128);
    let mut rem = x - x.floor();
    let mut out = vec![(p_cur as i64, 1)];
    while rem >= 1e-15 {
        let inv = 1.0 / rem;
        let a = inv.floor();
        rem = inv - a;
        let q_next = a as i128 * q_cur + q_prev;
        if q_next > q_max as i128 {
            break;
        }
        (p_prev, q_prev, p_cur, q_cur) = (p_cur, q_cur, a as i128 * p_cur + p_prev, q_next);
        out.push((p_cur as i64, q_cur as u64));
    }
    out
}

fn glue(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        (-1.0 / t).exp()
    }
}

/// Smooth bump: 1 on `[−1/4, 1/4]`, 0 outside `[−1/2, 1/2]`.
pub fn eta(x: f64) -> f64 {
    let ax = x.abs();
    if ax <= 0.25 {
        1.0
    } else if ax >= 0.5 {
        0.0
    } else {
        let t = (0.5 - ax) * 4.0;
        let (g, h) = (glue(t), glue(1.0 - t));
        g / (g + h)
    }
}

/// `η_s(x) = η(4^s M x)`.
pub fn eta_s(x: f64, s: u32, m_const: f64) -> f64 {
    eta(4f64.powi(s as i32) * m_const * x)
}

/// `ψ = amplitude/normalizer · Σ_{m≤n} e(mβ)`.
pub fn psi(n: usize, normalizer: f64, amplitude: f64, beta: f64) -> Complex64 {
    geometric_kernel(n, beta) * (amplitude / normalizer)
}

/// Amplitude per denominator: constant (λ²) or a log-polynomial in `n` (d_v).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Amplitude {
    Constant(f64),
    LogPoly(LogPolynomial),
}

impl Amplitude {
    pub fn at(&self, n: usize) -> f64 {
        match self {
            Amplitude::Constant(c) => *c,
            Amplitude::LogPoly(p) => p.eval(n as f64),
        }
    }
}

/// ψ_{n,q} and φ_n at a fixed `n`, with amplitudes for `q < 2^{s_max}`.
#[derive(Debug, Clone)]
pub struct ArcApproximant {
    pub n: usize,
    pub normalizer: f64,
    pub m_const: f64,
    pub s_max: u32,
    /// `amplitudes[q]` for `q ≥ 1`; index 0 unused.
    amplitudes: Vec<f64>,
}

impl ArcApproximant {
    /// `amplitude(q)` must be defined for `1 ≤ q < 2^{s_max}`.
    pub fn new(
        n: usize,
        normalizer: f64,
        m_const: f64,
        s_max: u32,
        amplitude: impl Fn(u64) -> Result<f64>,
    ) -> Result<Self> {
        if !(normalizer > 0.0) {
            return Err(Error::DivisionByZero(format!("normalizer at n = {n} is {normalizer}")));
        }
        let cap = 1u64 << s_max;
        let mut amplitudes = vec![0.0];
        for q in 1..cap {
            amplitudes.push(amplitude(q)?);
        }
        Ok(Self { n, normalizer, m_const, s_max, amplitudes })
    }

    pub fn amplitude(&self, q: u64) -> f64 {
        self.amplitudes[q as usize]
    }

    pub fn max_q(&self) -> u64 {
        self.amplitudes.len() as u64 - 1
    }

    pub fn psi(&self, q: u64, beta: f64) -> Complex64 {
        psi(self.n, self.normalizer, self.amplitude(q), beta)
    }

    /// `φ_n(x)` truncated at `s_max`.
    pub fn phi(&self, x: f64) -> Complex64 {
        self.phi_truncated(x, self.s_max)
    }

    pub fn phi_truncated(&self, x: f64, s_max: u32) -> Complex64 {
        assert!(s_max <= self.s_max, "amplitudes only cover q < 2^{}", self.s_max);
        let mut total = self.psi(1, x) * eta_s(x, 0, self.m_const);
        for s in 1..=s_max {
            let scale = 4f64.powi(s as i32) * self.m_const;
            let radius = 0.5 / scale;
            for q in (1u64 << (s - 1))..(1u64 << s) {
                let qf = q as f64;
                let a = (qf * x).round().clamp(1.0, qf);
                let beta = x - a / qf;
                if beta.abs() >= radius {
                    continue;
                }
                if gcd(a as u64, q) != 1 {
                    continue;
                }
                total += self.psi(q, beta) * eta(scale * beta);
            }
        }
        total
    }
}

/// Reduced fractions in `[0, 1]` with denominator `≤ order`, ascending.
pub fn farey(order: u64) -> Vec<(u64, u64)> {
    let (mut a, mut b, mut c, mut d) = (0u64, 1u64, 1u64, order);
    let mut out = vec![(0, 1)];
    while c <= order {
        let k = (order + b) / d;
        (a, b, c, d) = (c, d, k * c - a, k * d - b);
        out.push((a, b));
    }
    out
}

/// The minor arcs as disjoint open intervals of `[0, 1)`.
pub fn minor_arc_intervals(params: &ArcParams) -> Vec<(f64, f64)> {
    let r = 1.0 / params.q;
    let fr = farey(params.p_floor().max(1));
    fr.windows(2)
        .filter_map(|w| {
            let lo = w[0].0 as f64 / w[0].1 as f64 + r;
            let hi = w[1].0 as f64 / w[1].1 as f64 - r;
            (lo < hi).then_some((lo, hi))
        })
        .collect()
}
