//! Arithmetic weight sequences: Hecke eigenvalue squares of the discriminant
//! form Δ, Piltz divisor functions, and generic multiplicative weights.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::arith::{binomial, Sieve};
use crate::error::{Error, Result};
use crate::laurent::{zeta_laurent, LaurentSeries};
use crate::ntt::{crt_signed, Ntt, MODULI};

/// Largest index for which τ(n) is reconstructed exactly: `d(n) n^{11/2}`
/// stays below half the CRT modulus and the truncated squaring fits a
/// length-2^21 transform.
pub const TAU_CAPACITY: usize = 1 << 20;

/// Exact Ramanujan τ(1..=N).
#[derive(Debug, Clone, PartialEq)]
pub struct TauTable {
    /// `tau[0]` is a placeholder so that `tau[n] = τ(n)`.
    tau: Vec<i128>,
}

impl TauTable {
    pub fn from_values(tau: Vec<i128>) -> Self {
        assert!(!tau.is_empty());
        Self { tau }
    }

    pub fn len(&self) -> usize {
        self.tau.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, n: usize) -> i128 {
        self.tau[n]
    }

    pub fn values(&self) -> &[i128] {
        &self.tau
    }

    /// Normalized Hecke eigenvalue λ(n) = τ(n) / n^{11/2}.
    pub fn lambda(&self, n: usize) -> f64 {
        self.tau[n] as f64 / (n as f64).powf(5.5)
    }
}

/// Coefficients of `∏_{n≥1}(1 − q^n)` below `q^len` (Euler's pentagonal theorem).
fn euler_product(len: usize) -> Vec<i64> {
    let mut out = vec![0i64; len];
    out[0] = 1;
    for k in 1i64.. {
        let sign = if k % 2 == 0 { 1 } else { -1 };
        let e1 = (k * (3 * k - 1) / 2) as usize;
        let e2 = (k * (3 * k + 1) / 2) as usize;
        if e1 >= len {
            break;
        }
        out[e1] += sign;
        if e2 < len {
            out[e2] += sign;
        }
    }
    out
}

/// Exact τ(1..=n) from `Δ = q ∏(1 − q^m)^24`.
///
/// The pentagonal series is raised to the 24th power by repeated squaring
/// (`P², P⁴, P⁸, P¹⁶`, then `P⁸·P¹⁶`) independently modulo each prime in
/// [`MODULI`]; coefficients are recovered with CRT.
pub fn tau_table(n: usize) -> Result<TauTable> {
    if n == 0 {
        return Err(Error::Domain("tau table needs N >= 1".into()));
    }
    if n > TAU_CAPACITY {
        return Err(Error::Capacity(format!(
            "tau table limited to N <= {TAU_CAPACITY} for exact 128-bit reconstruction, got {n}"
        )));
    }
    let len = n; // coefficients q^0..q^{n-1} of P^24 give τ(1..=n)
    let log_len = (2 * len - 1).next_power_of_two().trailing_zeros().max(1);
    let base = euler_product(len);
    let residues: Vec<Vec<u64>> = MODULI
        .iter()
        .map(|&(p, g)| {
            let ntt = Ntt::new(p, g, log_len);
            let pm: Vec<u64> = base.iter().map(|&c| c.rem_euclid(p as i64) as u64).collect();
            let p2 = ntt.square(&pm, len);
            let p4 = ntt.square(&p2, len);
            let p8 = ntt.square(&p4, len);
            let p16 = ntt.square(&p8, len);
            ntt.multiply(&p8, &p16, len)
        })
        .collect();
    let mut tau = Vec::with_capacity(n + 1);
    tau.push(0);
    for i in 0..len {
        tau.push(crt_signed(&[residues[0][i], residues[1][i], residues[2][i], residues[3][i]]));
    }
    Ok(TauTable { tau })
}

/// Which arithmetic weight a [`WeightSequence`] holds.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum WeightKind {
    HeckeSquare,
    Piltz(u32),
    Generic(String),
}

impl fmt::Display for WeightKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightKind::HeckeSquare => write!(f, "hecke2"),
            WeightKind::Piltz(v) => write!(f, "piltz{v}"),
            WeightKind::Generic(id) => write!(f, "generic:{id}"),
        }
    }
}

/// Weights `w(1..=N)` with running sums. Index 0 holds a zero placeholder.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSequence {
    kind: WeightKind,
    values: Vec<f64>,
    prefix: Vec<f64>,
}

impl WeightSequence {
    pub fn new(kind: WeightKind, values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::Domain("weight sequence needs N >= 1".into()));
        }
        if let Some(k) = values[1..].iter().position(|w| !(*w >= 0.0) || !w.is_finite()) {
            return Err(Error::Domain(format!("weight w({}) = {} is not a finite nonnegative real", k + 1, values[k + 1])));
        }
        let mut prefix = Vec::with_capacity(values.len());
        prefix.push(0.0);
        let mut acc = 0.0;
        for w in &values[1..] {
            acc += w;
            prefix.push(acc);
        }
        let mut values = values;
        values[0] = 0.0;
        Ok(Self { kind, values, prefix })
    }

    /// From one-based weights `w(1), w(2), ...`.
    pub fn from_one_based(kind: WeightKind, weights: &[f64]) -> Result<Self> {
        let mut v = Vec::with_capacity(weights.len() + 1);
        v.push(0.0);
        v.extend_from_slice(weights);
        Self::new(kind, v)
    }

    pub fn kind(&self) -> &WeightKind {
        &self.kind
    }

    /// Index bound N.
    pub fn len(&self) -> usize {
        self.values.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, k: usize) -> f64 {
        self.values[k]
    }

    /// `values()[k] = w(k)`; `values()[0] = 0`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `prefix_sum(n) = Σ_{k≤n} w(k)`.
    pub fn prefix_sum(&self, n: usize) -> f64 {
        self.prefix[n]
    }

    pub fn prefix_sums(&self) -> &[f64] {
        &self.prefix
    }

    pub fn check_index(&self, n: usize) -> Result<()> {
        if n == 0 || n > self.len() {
            Err(Error::Range { index: n, len: self.len() })
        } else {
            Ok(())
        }
    }

    /// Copy restricted to `1..=n`.
    pub fn truncated(&self, n: usize) -> Result<Self> {
        self.check_index(n)?;
        Self::new(self.kind.clone(), self.values[..=n].to_vec())
    }
}

/// λ(n)² = τ(n)²/n¹¹ for `n ≤ N`.
pub fn hecke_lambda_sq(n: usize) -> Result<WeightSequence> {
    let tau = tau_table(n)?;
    hecke_lambda_sq_from(&tau)
}

pub fn hecke_lambda_sq_from(tau: &TauTable) -> Result<WeightSequence> {
    let values = (0..=tau.len())
        .map(|k| if k == 0 { 0.0 } else { tau.lambda(k).powi(2) })
        .collect();
    WeightSequence::new(WeightKind::HeckeSquare, values)
}

/// Piltz divisor function d_v(1..=N) by `v − 1` divisor-sum convolutions.
pub fn piltz_table(v: u32, n: usize) -> Result<WeightSequence> {
    if v == 0 || n == 0 {
        return Err(Error::Domain(format!("piltz table needs v >= 1 and N >= 1 (v = {v}, N = {n})")));
    }
    let mut cur = vec![1u64; n + 1];
    cur[0] = 0;
    for _ in 1..v {
        let mut next = vec![0u64; n + 1];
        for d in 1..=n {
            let c = cur[d];
            let mut m = d;
            while m <= n {
                next[m] += c;
                m += d;
            }
        }
        cur = next;
    }
    WeightSequence::new(WeightKind::Piltz(v), cur.into_iter().map(|x| x as f64).collect())
}

pub type LocalFactor = Arc<dyn Fn(u64, u32) -> f64 + Send + Sync>;

/// A multiplicative weight given by its prime-power values, with the Laurent
/// data of its Dirichlet series at `s = 1` supplied by the caller.
#[derive(Clone)]
pub struct MultiplicativeWeightSpec {
    pub id: String,
    /// Pole order ϰ of the Dirichlet series at `s = 1`.
    pub pole_order: u32,
    /// k in `0 ≤ α(m) ≤ d₂(m)^k`.
    pub divisor_exponent: u32,
    pub local_factor: LocalFactor,
    pub laurent: LaurentSeries,
    pub growth_exponents: (u32, u32),
}

impl fmt::Debug for MultiplicativeWeightSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MultiplicativeWeightSpec")
            .field("id", &self.id)
            .field("pole_order", &self.pole_order)
            .field("divisor_exponent", &self.divisor_exponent)
            .field("laurent", &self.laurent)
            .field("growth_exponents", &self.growth_exponents)
            .finish_non_exhaustive()
    }
}

impl MultiplicativeWeightSpec {
    pub fn new(
        id: impl Into<String>,
        pole_order: u32,
        divisor_exponent: u32,
        local_factor: LocalFactor,
        laurent: LaurentSeries,
        growth_exponents: (u32, u32),
    ) -> Result<Self> {
        let spec = Self {
            id: id.into(),
            pole_order,
            divisor_exponent,
            local_factor,
            laurent,
            growth_exponents,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.pole_order == 0 {
            return Err(Error::Domain("pole order must be at least 1".into()));
        }
        if self.laurent.pole_order() != self.pole_order || self.laurent.min_index != -(self.pole_order as i32) {
            return Err(Error::Domain(format!(
                "laurent data has pole order {} (min index {}), spec declares {}",
                self.laurent.pole_order(),
                self.laurent.min_index,
                self.pole_order
            )));
        }
        let (b1, b2) = self.growth_exponents;
        if b1 <= 3 || b2 <= 3 {
            return Err(Error::Domain(format!("growth exponents must exceed 3, got ({b1}, {b2})")));
        }
        Ok(())
    }

    /// α(p^l), checked against `0 ≤ α(p^l) ≤ (l+1)^k`.
    pub fn alpha(&self, p: u64, l: u32) -> Result<f64> {
        if l == 0 {
            return Ok(1.0);
        }
        let a = (self.local_factor)(p, l);
        let cap = ((l + 1) as f64).powi(self.divisor_exponent as i32);
        if !(a >= 0.0) || a > cap * (1.0 + 1e-12) {
            return Err(Error::Domain(format!(
                "spec {}: α({p}^{l}) = {a} outside [0, {cap}]",
                self.id
            )));
        }
        Ok(a)
    }

    /// Cesàro weight α ≡ 1, Dirichlet series ζ(s).
    pub fn cesaro() -> Self {
        Self::new(
            "cesaro",
            1,
            0,
            Arc::new(|_, _| 1.0),
            LaurentSeries::new(-1, vec![1.0]),
            (4, 4),
        )
        .expect("cesaro spec is valid")
    }

    /// d_v as a generic spec, Dirichlet series ζ(s)^v.
    pub fn piltz(v: u32) -> Result<Self> {
        if v == 0 {
            return Err(Error::Domain("piltz spec needs v >= 1".into()));
        }
        let zeta = zeta_laurent(v as usize + 3)?;
        let laurent = zeta.powi(v);
        Self::new(
            format!("piltz{v}"),
            v,
            v.saturating_sub(1).max(1),
            Arc::new(move |_, l| binomial(l as u64 + v as u64 - 1, v as u64 - 1) as f64),
            laurent,
            (4, 4),
        )
    }

    /// λ² with λ at primes from a τ table; only the residue `c_phi` of the
    /// Rankin–Selberg series is supplied (simple pole).
    pub fn hecke_square(tau: &TauTable, c_phi: f64) -> Result<Self> {
        let limit = tau.len();
        let lambda_p: Vec<f64> = (0..=limit).map(|p| if p == 0 { 0.0 } else { tau.lambda(p) }).collect();
        let local: LocalFactor = Arc::new(move |p, l| {
            let lp = lambda_p.get(p as usize).copied().unwrap_or(f64::NAN);
            hecke_prime_powers(lp, l as usize)[l as usize].powi(2)
        });
        Self::new("hecke2", 1, 2, local, LaurentSeries::new(-1, vec![c_phi]), (4, 4))
    }
}

/// `[λ(1), λ(p), …, λ(p^count)]` from the Hecke recursion
/// `λ(p^{l+1}) = λ(p)λ(p^l) − λ(p^{l−1})`.
pub fn hecke_prime_powers(lambda_p: f64, count: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(count + 1);
    out.push(1.0);
    if count >= 1 {
        out.push(lambda_p);
    }
    for l in 1..count {
        let next = lambda_p * out[l] - out[l - 1];
        out.push(next);
    }
    out
}

/// `w(n) = ∏_{p^l ‖ n} α(p^l)` by a smallest-prime-factor sieve.
pub fn generic_table(spec: &MultiplicativeWeightSpec, n: usize) -> Result<WeightSequence> {
    if n == 0 {
        return Err(Error::Domain("generic table needs N >= 1".into()));
    }
    let sieve = Sieve::new(n);
    let mut values = vec![0.0; n + 1];
    values[1] = 1.0;
    for m in 2..=n {
        let (p, l, rest) = sieve.split_smallest(m);
        values[m] = spec.alpha(p as u64, l)? * values[rest];
    }
    WeightSequence::new(WeightKind::Generic(spec.id.clone()), values)
}
