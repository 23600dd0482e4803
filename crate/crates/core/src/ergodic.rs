//! Weighted ergodic averages on concrete systems and the shift-model kernel
//! calculus: kernels `K_n`, `κ_n`, `ω_{n,q}`, convolutions, the Cesàro maximal
//! function, and lacunary oscillation sums.

use num_complex::Complex64;
use rand::RngCore;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::arcs::Amplitude;
use crate::error::{Error, Result};
use crate::expsum::{e, reduced_phase, Compensated};
use crate::rng::seeded;
use crate::weights::WeightSequence;

/// Finitely supported sequence on ℤ: `values[i]` sits at index `offset + i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoSided {
    pub offset: i64,
    pub values: Vec<f64>,
}

impl TwoSided {
    pub fn new(offset: i64, values: Vec<f64>) -> Self {
        Self { offset, values }
    }

    pub fn zero() -> Self {
        Self { offset: 0, values: Vec::new() }
    }

    pub fn delta(at: i64) -> Self {
        Self { offset: at, values: vec![1.0] }
    }

    pub fn start(&self) -> i64 {
        self.offset
    }

    /// One past the last stored index.
    pub fn end(&self) -> i64 {
        self.offset + self.values.len() as i64
    }

    pub fn get(&self, j: i64) -> f64 {
        if j < self.start() || j >= self.end() {
            0.0
        } else {
            self.values[(j - self.offset) as usize]
        }
    }

    pub fn norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    pub fn shifted(&self, by: i64) -> Self {
        Self { offset: self.offset + by, values: self.values.clone() }
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { offset: self.offset, values: self.values.iter().map(|v| v * c).collect() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum DynamicalSystem {
    Rotation { theta: f64 },
    /// `x ↦ 2x mod 1`. Orbits are read off a bit stream: the first 53 bits of
    /// the start point followed by bits drawn from a stream keyed by `seed` and
    /// those 53 bits, so arbitrarily long orbits stay exact instead of
    /// collapsing to 0 after 53 steps.
    Doubling { seed: u64 },
    /// `(z_n) ↦ (z_{n+1})` on two-sided sequences.
    IntegerShift,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum State {
    Point(f64),
    Sequence(TwoSided),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Observable {
    /// `e(mx)`.
    Character(i64),
    /// Indicator of `[lo, hi)`.
    Indicator { lo: f64, hi: f64 },
    /// Piecewise constant: `table[⌊x·len⌋]`.
    Table(Vec<f64>),
    /// `z ↦ z_0`, for the shift.
    Coordinate,
}

impl Observable {
    pub fn validate(&self) -> Result<()> {
        match self {
            Observable::Table(t) if t.is_empty() || t.iter().any(|v| !v.is_finite()) => Err(
                Error::UnboundedObservable("table must be nonempty with finite entries".into()),
            ),
            Observable::Indicator { lo, hi } if !(lo.is_finite() && hi.is_finite()) => {
                Err(Error::UnboundedObservable(format!("interval [{lo}, {hi})")))
            }
            _ => Ok(()),
        }
    }

    pub fn at_point(&self, x: f64) -> Result<Complex64> {
        Ok(match self {
            Observable::Character(m) => e(reduced_phase(m.unsigned_abs(), x) * m.signum() as f64),
            Observable::Indicator { lo, hi } => Complex64::new(f64::from(u8::from(*lo <= x && x < *hi)), 0.0),
            Observable::Table(t) => {
                let i = ((x * t.len() as f64) as usize).min(t.len() - 1);
                Complex64::new(t[i], 0.0)
            }
            Observable::Coordinate => {
                return Err(Error::Domain("the coordinate observable needs the shift system".into()))
            }
        })
    }
}

/// Bits of the doubling-map orbit, most significant first.
struct BitStream {
    words: Vec<u64>,
}

impl BitStream {
    fn new(x0: f64, seed: u64, bits: usize) -> Self {
        let head = (x0 * (1u64 << 53) as f64) as u64;
        let mut rng = seeded(seed ^ head.wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let count = bits.div_ceil(64) + 2;
        let mut words = Vec::with_capacity(count);
        // first 53 bits come from x0, the rest of the first word from the stream
        words.push((head << 11) | (rng.next_u64() >> 53));
        for _ in 1..count {
            words.push(rng.next_u64());
        }
        Self { words }
    }

    /// `Σ_{i<53} b_{k+i} 2^{−i−1}`.
    fn point(&self, k: usize) -> f64 {
        let (w, b) = (k / 64, k % 64);
        let hi = self.words[w] << b;
        let lo = if b == 0 { 0 } else { self.words[w + 1] >> (64 - b) };
        ((hi | lo) >> 11) as f64 / (1u64 << 53) as f64
    }
}

impl DynamicalSystem {
    /// `τ^k(x0)` for `k = 1..=n`.
    pub fn orbit(&self, x0: f64, n: usize) -> Result<Vec<f64>> {
        if !(0.0..1.0).contains(&x0) {
            return Err(Error::Domain(format!("start point {x0} outside [0, 1)")));
        }
        match self {
            DynamicalSystem::Rotation { theta } => Ok((1..=n as u64)
                .map(|k| {
                    let y = x0 + reduced_phase(k, *theta);
                    y - y.floor()
                })
                .collect()),
            DynamicalSystem::Doubling { seed } => {
                let bits = BitStream::new(x0, *seed, n + 64);
                Ok((1..=n).map(|k| bits.point(k)).collect())
            }
            DynamicalSystem::IntegerShift => {
                Err(Error::Domain("the shift acts on sequences, not points".into()))
            }
        }
    }
}

/// `Σ_{k≤n} w(k) f(τ^k x0) / Σ_{k≤n} w(k)`.
pub fn weighted_average(
    sys: &DynamicalSystem,
    w: &WeightSequence,
    f: &Observable,
    x0: &State,
    n: usize,
) -> Result<Complex64> {
    Ok(running_averages(sys, w, f, x0, &[n])?[0])
}

/// Averages at each of the ascending lengths `ns` in a single pass.
fn running_averages(
    sys: &DynamicalSystem,
    w: &WeightSequence,
    f: &Observable,
    x0: &State,
    ns: &[usize],
) -> Result<Vec<Complex64>> {
    f.validate()?;
    let n_max = *ns.last().unwrap_or(&0);
    w.check_index(n_max)?;
    let values: Vec<Complex64> = match (sys, x0, f) {
        (DynamicalSystem::IntegerShift, State::Sequence(z), Observable::Coordinate) => {
            (1..=n_max as i64).map(|k| Complex64::new(z.get(k), 0.0)).collect()
        }
        (DynamicalSystem::IntegerShift, _, _) => {
            return Err(Error::Domain("the shift pairs a sequence state with the coordinate observable".into()))
        }
        (_, State::Point(x), _) => {
            sys.orbit(*x, n_max)?.into_iter().map(|y| f.at_point(y)).collect::<Result<_>>()?
        }
        (_, State::Sequence(_), _) => {
            return Err(Error::Domain("point systems need a point state".into()))
        }
    };
    let (mut re, mut im) = (Compensated::default(), Compensated::default());
    let mut out = Vec::with_capacity(ns.len());
    let mut next = 0;
    for (k, v) in values.iter().enumerate() {
        let wk = w.get(k + 1);
        re.add(wk * v.re);
        im.add(wk * v.im);
        while next < ns.len() && ns[next] == k + 1 {
            let norm = w.prefix_sum(k + 1);
            if norm <= 0.0 {
                return Err(Error::DivisionByZero(format!("weights vanish up to {}", k + 1)));
            }
            out.push(Complex64::new(re.value(), im.value()) / norm);
            next += 1;
        }
    }
    if out.len() != ns.len() {
        return Err(Error::Precondition("lengths must be ascending and at least 1".into()));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceDiagnostic {
    pub lengths: Vec<usize>,
    pub averages: Vec<(f64, f64)>,
    /// `tail_sup[j] = sup_{i≥j} |A_{i+1} − A_i|`.
    pub tail_sup: Vec<f64>,
}

/// Averages along `I_ρ ∩ [1, n_max]` and their successive-difference tails.
pub fn convergence_diagnostic(
    sys: &DynamicalSystem,
    w: &WeightSequence,
    f: &Observable,
    x0: &State,
    rho: f64,
    n_max: usize,
) -> Result<ConvergenceDiagnostic> {
    let lac = LacunarySequence::new(rho, n_max)?;
    let lengths = lac.elements.clone();
    let avgs = running_averages(sys, w, f, x0, &lengths)?;
    let diffs: Vec<f64> = avgs.windows(2).map(|p| (p[1] - p[0]).norm()).collect();
    let mut tail_sup = diffs.clone();
    for i in (0..tail_sup.len().saturating_sub(1)).rev() {
        tail_sup[i] = tail_sup[i].max(tail_sup[i + 1]);
    }
    Ok(ConvergenceDiagnostic {
        lengths,
        averages: avgs.iter().map(|a| (a.re, a.im)).collect(),
        tail_sup,
    })
}

/// `I_ρ = {[ρ^m] : m ≥ 0}` up to a bound, with blocks `N_{j+1} ≥ 2N_j`
/// chosen greedily from `I_ρ` starting at `N_1 = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LacunarySequence {
    pub rho: f64,
    pub elements: Vec<usize>,
    pub blocks: Vec<usize>,
}

impl LacunarySequence {
    pub fn new(rho: f64, bound: usize) -> Result<Self> {
        if !(rho > 1.0) || !rho.is_finite() {
            return Err(Error::Domain(format!("lacunary ratio must exceed 1, got {rho}")));
        }
        let mut elements = Vec::new();
        let mut m = 0i32;
        loop {
            let v = rho.powi(m).floor();
            if v > bound as f64 {
                break;
            }
            elements.push(v as usize);
            m += 1;
        }
        elements.dedup();
        let mut blocks = Vec::new();
        for &x in &elements {
            if blocks.last().is_none_or(|&b: &usize| x >= 2 * b) {
                blocks.push(x);
            }
        }
        Ok(Self { rho, elements, blocks })
    }

    /// Elements of `I_ρ` in `[N_j, N_{j+1}]` (1-based `j`).
    pub fn block(&self, j: usize) -> &[usize] {
        let (lo, hi) = (self.blocks[j - 1], self.blocks[j]);
        let a = self.elements.partition_point(|&x| x < lo);
        let b = self.elements.partition_point(|&x| x <= hi);
        &self.elements[a..b]
    }
}

/// A finitely supported kernel `Σ_{k=1}^n c_k δ_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Kernel {
    Boxcar { n: usize, height: f64 },
    General { coeffs: Vec<f64> },
}

impl Kernel {
    pub fn len(&self) -> usize {
        match self {
            Kernel::Boxcar { n, .. } => *n,
            Kernel::General { coeffs } => coeffs.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn coeff(&self, k: usize) -> f64 {
        if k == 0 || k > self.len() {
            return 0.0;
        }
        match self {
            Kernel::Boxcar { height, .. } => *height,
            Kernel::General { coeffs } => coeffs[k - 1],
        }
    }

    pub fn total(&self) -> f64 {
        match self {
            Kernel::Boxcar { n, height } => *n as f64 * height,
            Kernel::General { coeffs } => {
                let mut c = Compensated::default();
                coeffs.iter().for_each(|&x| c.add(x));
                c.value()
            }
        }
    }

    pub fn to_general(&self) -> Kernel {
        Kernel::General { coeffs: (1..=self.len()).map(|k| self.coeff(k)).collect() }
    }
}

#[derive(Debug, Clone)]
pub enum KernelFamily {
    /// `K_n = Σ w(k) δ_k / Σ w(k)`.
    Weighted(WeightSequence),
    /// `κ_n = Σ δ_k / n`.
    Cesaro,
    /// `ω_{n,q} = (A_q(n)/W_n) Σ δ_m`, `W_n` the weight prefix sum.
    Omega { q: u64, amplitude: Amplitude, normalizer: WeightSequence },
}

impl KernelFamily {
    pub fn name(&self) -> String {
        match self {
            KernelFamily::Weighted(w) => format!("weighted:{}", w.kind()),
            KernelFamily::Cesaro => "cesaro".into(),
            KernelFamily::Omega { q, normalizer, .. } => format!("omega:{}:q{q}", normalizer.kind()),
        }
    }

    pub fn kernel(&self, n: usize) -> Result<Kernel> {
        if n == 0 {
            return Err(Error::Domain("kernels start at n = 1".into()));
        }
        match self {
            KernelFamily::Weighted(w) => {
                w.check_index(n)?;
                let norm = w.prefix_sum(n);
                Ok(Kernel::General { coeffs: w.values()[1..=n].iter().map(|x| x / norm).collect() })
            }
            KernelFamily::Cesaro => Ok(Kernel::Boxcar { n, height: 1.0 / n as f64 }),
            KernelFamily::Omega { amplitude, normalizer, .. } => {
                normalizer.check_index(n)?;
                Ok(Kernel::Boxcar { n, height: amplitude.at(n) / normalizer.prefix_sum(n) })
            }
        }
    }

    /// Raw coefficient profile `c_k` (before the per-`n` scale) and that scale.
    fn profile(&self, n_max: usize) -> Result<(Option<Vec<f64>>, Box<dyn Fn(usize) -> f64 + '_>)> {
        match self {
            KernelFamily::Weighted(w) => {
                w.check_index(n_max)?;
                Ok((Some(w.values()[1..=n_max].to_vec()), Box::new(move |n| 1.0 / w.prefix_sum(n))))
            }
            KernelFamily::Cesaro => Ok((None, Box::new(|n| 1.0 / n as f64))),
            KernelFamily::Omega { amplitude, normalizer, .. } => {
                normalizer.check_index(n_max)?;
                Ok((None, Box::new(move |n| amplitude.at(n) / normalizer.prefix_sum(n))))
            }
        }
    }
}

/// `(K ∗ g)(j) = Σ_k K(k) g(j + k)`: the shift-model ergodic average, so the
/// output lives on `[start(g) − n, end(g) − 1)`.
pub fn convolve(kernel: &Kernel, g: &TwoSided) -> TwoSided {
    if g.values.is_empty() || kernel.is_empty() {
        return TwoSided::zero();
    }
    let n = kernel.len();
    match kernel {
        Kernel::Boxcar { height, .. } => {
            let prefix = prefix_sums(g);
            let out = (0..n + g.values.len() - 1)
                .map(|t| {
                    let j = g.start() - n as i64 + t as i64;
                    height * (prefix_at(&prefix, g, j + n as i64) - prefix_at(&prefix, g, j))
                })
                .collect();
            TwoSided::new(g.start() - n as i64, out)
        }
        Kernel::General { coeffs } => {
            if n.saturating_mul(g.values.len()) <= 1 << 22 {
                convolve_direct(kernel, g)
            } else {
                TwoSided::new(g.start() - n as i64, fft_correlate(coeffs, &g.values))
            }
        }
    }
}

/// Term-by-term evaluation, for cross-checking [`convolve`].
pub fn convolve_direct(kernel: &Kernel, g: &TwoSided) -> TwoSided {
    if g.values.is_empty() || kernel.is_empty() {
        return TwoSided::zero();
    }
    let n = kernel.len() as i64;
    let out = (g.start() - n..g.end() - 1)
        .map(|j| {
            let mut acc = Compensated::default();
            for i in g.start().max(j + 1)..g.end().min(j + n + 1) {
                acc.add(kernel.coeff((i - j) as usize) * g.get(i));
            }
            acc.value()
        })
        .collect();
    TwoSided::new(g.start() - n, out)
}

/// `P[i] = Σ_{t<i} values[t]`.
fn prefix_sums(g: &TwoSided) -> Vec<f64> {
    let mut p = Vec::with_capacity(g.values.len() + 1);
    let mut acc = Compensated::default();
    p.push(0.0);
    for &v in &g.values {
        acc.add(v);
        p.push(acc.value());
    }
    p
}

/// `Σ_{i≤j} g(i)`.
fn prefix_at(prefix: &[f64], g: &TwoSided, j: i64) -> f64 {
    let idx = (j - g.start() + 1).clamp(0, g.values.len() as i64);
    prefix[idx as usize]
}

/// `h[t] = Σ_{k=1}^{n} c_k G[t + k − n]`, `t ∈ [0, n + len − 1)`.
fn fft_correlate(coeffs: &[f64], values: &[f64]) -> Vec<f64> {
    let n = coeffs.len();
    let out_len = n + values.len() - 1;
    let size = out_len.next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(size);
    let inv = planner.plan_fft_inverse(size);
    let mut a = vec![Complex64::new(0.0, 0.0); size];
    let mut b = vec![Complex64::new(0.0, 0.0); size];
    for m in 0..n {
        a[m].re = coeffs[n - 1 - m];
    }
    for (i, &v) in values.iter().enumerate() {
        b[i].re = v;
    }
    fwd.process(&mut a);
    fwd.process(&mut b);
    for (x, y) in a.iter_mut().zip(&b) {
        *x *= y;
    }
    inv.process(&mut a);
    a[..out_len].iter().map(|z| z.re / size as f64).collect()
}

/// `‖sup_{n≤n_max} |κ_n ∗ g|‖₂ / ‖g‖₂`.
pub fn maximal_cesaro(g: &TwoSided, n_max: usize) -> Result<f64> {
    let norm = g.norm_sq().sqrt();
    if norm == 0.0 {
        return Err(Error::DivisionByZero("g vanishes".into()));
    }
    if n_max == 0 {
        return Err(Error::Domain("n_max must be at least 1".into()));
    }
    let prefix = prefix_sums(g);
    let mut total = 0.0;
    for j in g.start() - n_max as i64..g.end() - 1 {
        let base = prefix_at(&prefix, g, j);
        let mut best = 0.0f64;
        for n in 1..=n_max {
            let v = (prefix_at(&prefix, g, j + n as i64) - base).abs() / n as f64;
            best = best.max(v);
        }
        total += best * best;
    }
    Ok(total.sqrt() / norm)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OscillationReport {
    pub family: String,
    pub rho: f64,
    pub j_count: usize,
    pub value: f64,
    pub value_per_j: f64,
    pub terms: Vec<f64>,
    pub g_norm_sq: f64,
}

/// Unnormalized `Σ_{k≤n} c_k g(j + k)` for every `n ≤ n_max`, answered from one
/// full-length correlation plus a short direct sum on the partial window.
struct ShiftCorrelator<'a> {
    g: &'a TwoSided,
    coeffs: Option<Vec<f64>>,
    prefix: Vec<f64>,
    n_max: usize,
    /// `Σ_{k≤n_max} c_k g(j + k)` for `j ∈ [start − n_max, end − 1)`.
    full: Vec<f64>,
}

impl<'a> ShiftCorrelator<'a> {
    fn new(g: &'a TwoSided, coeffs: Option<Vec<f64>>, n_max: usize) -> Self {
        let prefix = prefix_sums(g);
        let full = match &coeffs {
            Some(c) => fft_correlate(c, &g.values),
            None => (g.start() - n_max as i64..g.end() - 1)
                .map(|j| prefix_at(&prefix, g, j + n_max as i64) - prefix_at(&prefix, g, j))
                .collect(),
        };
        Self { g, coeffs, prefix, n_max, full }
    }

    fn raw(&self, n: usize, j: i64) -> f64 {
        let (s, e) = (self.g.start(), self.g.end());
        if j < s - n as i64 || j >= e - 1 {
            return 0.0;
        }
        if j >= e - 1 - n as i64 {
            return self.full[(j - (s - self.n_max as i64)) as usize];
        }
        match &self.coeffs {
            None => prefix_at(&self.prefix, self.g, j + n as i64) - prefix_at(&self.prefix, self.g, j),
            Some(c) => {
                let mut acc = 0.0;
                for i in s.max(j + 1)..=(j + n as i64) {
                    acc += c[(i - j - 1) as usize] * self.g.get(i);
                }
                acc
            }
        }
    }
}

/// `Σ_{j=1}^{J} ‖sup_{N ∈ I_ρ ∩ [N_j, N_{j+1}]} |(K_N − K_{N_j}) ∗ g|‖²`.
pub fn oscillation_sum(
    g: &TwoSided,
    family: &KernelFamily,
    lac: &LacunarySequence,
    j_count: usize,
) -> Result<OscillationReport> {
    if j_count == 0 || lac.blocks.len() < j_count + 1 {
        return Err(Error::Precondition(format!(
            "{j_count} blocks requested, the lacunary sequence holds {}",
            lac.blocks.len().saturating_sub(1)
        )));
    }
    let mut report = OscillationReport {
        family: family.name(),
        rho: lac.rho,
        j_count,
        value: 0.0,
        value_per_j: 0.0,
        terms: vec![0.0; j_count],
        g_norm_sq: g.norm_sq(),
    };
    if g.values.is_empty() {
        return Ok(report);
    }
    let n_max = lac.blocks[j_count];
    let (coeffs, scale) = family.profile(n_max)?;
    let corr = ShiftCorrelator::new(g, coeffs, n_max);
    for j in 1..=j_count {
        let base = lac.blocks[j - 1];
        let block = lac.block(j);
        let top = *block.last().unwrap();
        let base_scale = scale(base);
        let scales: Vec<(usize, f64)> = block.iter().filter(|&&n| n != base).map(|&n| (n, scale(n))).collect();
        let mut term = 0.0;
        for jj in g.start() - top as i64..g.end() - 1 {
            let b = base_scale * corr.raw(base, jj);
            let sup = scales.iter().fold(0.0f64, |m, &(n, s)| m.max((s * corr.raw(n, jj) - b).abs()));
            term += sup * sup;
        }
        report.terms[j - 1] = term;
    }
    report.value = report.terms.iter().sum();
    report.value_per_j = report.value / j_count as f64;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expsum::exp_sum;
    use crate::weights::{hecke_lambda_sq, piltz_table, WeightKind};
    use rand::Rng;

    fn random_g(seed: u64, offset: i64, len: usize) -> TwoSided {
        let mut rng = seeded(seed);
        TwoSided::new(offset, (0..len).map(|_| rng.random_range(-1.0..1.0)).collect())
    }

    #[test]
    fn constant_observable_averages_to_one() {
        let w = piltz_table(2, 1000).unwrap();
        let sys = DynamicalSystem::Rotation { theta: 2f64.sqrt() - 1.0 };
        let f = Observable::Table(vec![1.0]);
        let a = weighted_average(&sys, &w, &f, &State::Point(0.3), 1000).unwrap();
        assert!((a - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn rotation_matches_exponential_sum() {
        let w = hecke_lambda_sq(5000).unwrap();
        let theta = 0.318_309_886_183_790_7;
        let x0 = 0.123;
        let sys = DynamicalSystem::Rotation { theta };
        let a = weighted_average(&sys, &w, &Observable::Character(1), &State::Point(x0), 5000).unwrap();
        let b = e(x0) * exp_sum(&w, theta, 5000).unwrap() / w.prefix_sum(5000);
        assert!((a - b).norm() < 1e-12);
    }

    #[test]
    fn bad_observables_are_rejected() {
        let w = piltz_table(2, 10).unwrap();
        let sys = DynamicalSystem::Rotation { theta: 0.1 };
        let bad = Observable::Table(vec![1.0, f64::INFINITY]);
        assert!(matches!(
            weighted_average(&sys, &w, &bad, &State::Point(0.0), 10),
            Err(Error::UnboundedObservable(_))
        ));
        assert!(weighted_average(&sys, &w, &Observable::Coordinate, &State::Point(0.0), 10).is_err());
    }

    #[test]
    fn shift_coordinate_average() {
        let w = piltz_table(2, 3).unwrap();
        let z = TwoSided::new(1, vec![3.0, 5.0, 7.0]);
        let a = weighted_average(&DynamicalSystem::IntegerShift, &w, &Observable::Coordinate, &State::Sequence(z), 3)
            .unwrap();
        // d₂ = 1, 2, 2
        assert!((a.re - (3.0 + 10.0 + 14.0) / 5.0).abs() < 1e-15);
    }

    #[test]
    fn doubling_orbit_is_exact_doubling() {
        let sys = DynamicalSystem::Doubling { seed: 3 };
        let x0 = 0.375;
        let orbit = sys.orbit(x0, 200).unwrap();
        let ulp = 1.0 / (1u64 << 52) as f64;
        assert!((orbit[0] - 0.75).abs() < ulp);
        assert!((orbit[1] - 0.5).abs() < 2.0 * ulp);
        for k in 0..199 {
            let d = (2.0 * orbit[k]) % 1.0;
            assert!((d - orbit[k + 1]).abs() < ulp);
        }
        assert!(orbit[100] > 0.0);
    }

    #[test]
    fn doubling_preserves_lebesgue() {
        let sys = DynamicalSystem::Doubling { seed: 11 };
        let mut rng = seeded(5);
        let mut pts: Vec<f64> = (0..10_000)
            .map(|_| {
                let x0 = rng.random::<f64>();
                sys.orbit(x0, 100).unwrap()[99]
            })
            .collect();
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let ks = pts
            .iter()
            .enumerate()
            .map(|(i, &x)| ((i + 1) as f64 / 1e4 - x).abs().max((x - i as f64 / 1e4).abs()))
            .fold(0.0, f64::max);
        assert!(ks < 0.05, "KS statistic {ks}");
    }

    #[test]
    fn rotation_preserves_lebesgue() {
        let sys = DynamicalSystem::Rotation { theta: 0.5 * (5f64.sqrt() - 1.0) };
        let mut rng = seeded(6);
        let mut pts: Vec<f64> = (0..10_000).map(|_| sys.orbit(rng.random::<f64>(), 37).unwrap()[36]).collect();
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let ks = pts.iter().enumerate().map(|(i, &x)| ((i + 1) as f64 / 1e4 - x).abs()).fold(0.0, f64::max);
        assert!(ks < 0.05);
    }

    #[test]
    fn diagnostic_constant_has_no_oscillation() {
        let w = piltz_table(3, 4096).unwrap();
        let d = convergence_diagnostic(
            &DynamicalSystem::Doubling { seed: 1 },
            &w,
            &Observable::Table(vec![2.0]),
            &State::Point(0.2),
            2.0,
            4096,
        )
        .unwrap();
        assert_eq!(d.lengths.len(), 13);
        assert!(d.tail_sup.iter().all(|&t| t < 1e-14));
    }

    #[test]
    fn lacunary_blocks() {
        let l = LacunarySequence::new(2.0, 1 << 10).unwrap();
        assert_eq!(l.blocks, (0..=10).map(|k| 1usize << k).collect::<Vec<_>>());
        assert_eq!(l.block(3), &[4, 8]);
        let l = LacunarySequence::new(1.3, 1000).unwrap();
        assert!(l.blocks.windows(2).all(|p| p[1] >= 2 * p[0]));
        assert!(l.elements.windows(2).all(|p| p[1] > p[0]));
        assert!(LacunarySequence::new(1.0, 10).is_err());
    }

    #[test]
    fn cesaro_of_delta() {
        let h = convolve(&KernelFamily::Cesaro.kernel(5).unwrap(), &TwoSided::delta(0));
        assert_eq!(h.start(), -5);
        assert_eq!(h.values, vec![0.2; 5]);
    }

    #[test]
    fn kernels_sum_to_one() {
        let w = hecke_lambda_sq(1000).unwrap();
        for n in [1, 7, 1000] {
            for fam in [KernelFamily::Weighted(w.clone()), KernelFamily::Cesaro] {
                let k = fam.kernel(n).unwrap();
                assert!((k.total() - 1.0).abs() < 1e-12);
                assert!((1..=n).all(|i| k.coeff(i) >= 0.0));
            }
        }
    }

    #[test]
    fn convolution_paths_agree() {
        let w = hecke_lambda_sq(3000).unwrap();
        let g = random_g(9, -40, 2000);
        let k = KernelFamily::Weighted(w).kernel(3000).unwrap();
        let a = convolve(&k, &g);
        let b = convolve_direct(&k, &g);
        assert_eq!(a.offset, b.offset);
        let m = a.values.iter().zip(&b.values).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        assert!(m < 1e-13, "{m}");
        let c = convolve(&Kernel::Boxcar { n: 300, height: 0.5 }, &g);
        let d = convolve_direct(&Kernel::Boxcar { n: 300, height: 0.5 }, &g);
        let m = c.values.iter().zip(&d.values).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        assert!(m < 1e-12);
    }

    #[test]
    fn parseval_contraction() {
        let w = hecke_lambda_sq(500).unwrap();
        let g = random_g(2, 0, 300);
        let h = convolve(&KernelFamily::Weighted(w).kernel(500).unwrap(), &g);
        assert!(h.norm_sq() <= g.norm_sq() * (1.0 + 1e-12));
    }

    #[test]
    fn maximal_of_delta_is_explicit() {
        let r = maximal_cesaro(&TwoSided::delta(3), 50).unwrap();
        let exact = (1..=50).map(|m| 1.0 / (m * m) as f64).sum::<f64>().sqrt();
        assert!((r - exact).abs() < 1e-14);
        let g = random_g(4, 1, 200);
        let r1 = maximal_cesaro(&g, 64).unwrap();
        let r2 = maximal_cesaro(&g.scaled(-3.5), 64).unwrap();
        assert!((r1 - r2).abs() < 1e-12);
    }

    fn brute_oscillation(g: &TwoSided, fam: &KernelFamily, lac: &LacunarySequence, j_count: usize) -> f64 {
        let mut total = 0.0;
        for j in 1..=j_count {
            let base = convolve_direct(&fam.kernel(lac.blocks[j - 1]).unwrap(), g);
            let others: Vec<TwoSided> =
                lac.block(j).iter().map(|&n| convolve_direct(&fam.kernel(n).unwrap(), g)).collect();
            let top = *lac.block(j).last().unwrap() as i64;
            for jj in g.start() - top..g.end() {
                let b = base.get(jj);
                let s = others.iter().fold(0.0f64, |m, h| m.max((h.get(jj) - b).abs()));
                total += s * s;
            }
        }
        total
    }

    #[test]
    fn oscillation_matches_brute_force() {
        let w = hecke_lambda_sq(2048).unwrap();
        let g = random_g(8, 5, 40);
        for rho in [2.0, 1.5] {
            let lac = LacunarySequence::new(rho, 2048).unwrap();
            let j = lac.blocks.len() - 1;
            for fam in [KernelFamily::Weighted(w.clone()), KernelFamily::Cesaro] {
                let r = oscillation_sum(&g, &fam, &lac, j).unwrap();
                let b = brute_oscillation(&g, &fam, &lac, j);
                assert!((r.value - b).abs() <= 1e-12 * b.max(1.0), "{} vs {b}", r.value);
            }
        }
    }

    #[test]
    fn oscillation_shift_invariant_and_zero() {
        let lac = LacunarySequence::new(2.0, 1024).unwrap();
        let g = random_g(3, 0, 64);
        let a = oscillation_sum(&g, &KernelFamily::Cesaro, &lac, 10).unwrap();
        let b = oscillation_sum(&g.shifted(1234), &KernelFamily::Cesaro, &lac, 10).unwrap();
        assert!((a.value - b.value).abs() < 1e-12 * a.value);
        let z = oscillation_sum(&TwoSided::zero(), &KernelFamily::Cesaro, &lac, 10).unwrap();
        assert_eq!(z.value, 0.0);
        assert!(oscillation_sum(&g, &KernelFamily::Cesaro, &lac, 11).is_err());
    }

    #[test]
    fn omega_is_scaled_cesaro() {
        let w = piltz_table(1, 100).unwrap();
        assert_eq!(w.kind(), &WeightKind::Piltz(1));
        let fam = KernelFamily::Omega { q: 1, amplitude: Amplitude::Constant(1.0), normalizer: w };
        let k = fam.kernel(100).unwrap();
        assert!((k.total() - 1.0).abs() < 1e-15);
    }
}
