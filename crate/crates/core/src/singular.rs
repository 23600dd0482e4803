//! Rational-point amplitudes: the λ² coefficient `D_q`, and the
//! log-polynomials attached to d_v and to generic multiplicative weights,
//! extracted as residues of truncated Laurent expansions at `s = 1`.
//!
//! For a split `q = q₀q₁` (`q₁` squarefree) the Dirichlet series
//! `Σ_{(m,q₁)=1} α(q₀m) m^{-s}` equals the full series times, for each `p | q`,
//! the inverse local factor `(Σ_j α(p^j) p^{-js})^{-1}` and the local
//! replacement `Σ_j α(p^{a+j}) p^{-js}` when `p ∤ q₁`, or `α(p^a)` when `p | q₁`
//! (`a = v_p(q₀)`). The cumulative main term at `a/q` is then
//! `Σ μ(q₁)/φ(q₁) · Res_{s=1} (n/q₀)^s/s · (series)`.

use serde::{Deserialize, Serialize};

use crate::arith::{binomial, divisor_count, divisors, euler_phi, factorize, mobius, valuation};
use crate::error::{Error, Result};
use crate::laurent::{zeta_laurent, LaurentSeries};
use crate::weights::{hecke_prime_powers, MultiplicativeWeightSpec, WeightSequence};

/// Tolerance for truncating the infinite local sums.
pub const LOCAL_TOL: f64 = 1e-12;

/// Fixed ε used by every bound-shape check.
pub const EPS: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingularCoefficientD {
    pub q: u64,
    pub value: f64,
    pub c_phi: f64,
}

impl SingularCoefficientD {
    /// `|D_q| q / (d₂(q) log(q+2)^7)`, the quantity kept bounded by a constant.
    pub fn bound_ratio(&self) -> f64 {
        let q = self.q as f64;
        self.value.abs() * q / (divisor_count(self.q) as f64 * (q + 2.0).ln().powi(7))
    }
}

/// `Σ_j c_j` with `c_j` dominated by `bound(j)`; stops once the bound's tail,
/// estimated by the ratio test, falls below `tol`.
fn sum_with_tail_bound(
    mut term: impl FnMut(u32) -> Result<f64>,
    bound: impl Fn(u32) -> f64,
    tol: f64,
) -> Result<f64> {
    let mut acc = 0.0;
    for j in 0..10_000u32 {
        acc += term(j)?;
        let next = bound(j + 1);
        let ratio = bound(j + 2) / next;
        if ratio < 1.0 && next / (1.0 - ratio) < tol {
            return Ok(acc);
        }
    }
    Err(Error::Divergence("local sum did not reach tolerance within 10000 terms".into()))
}

/// `Σ_{j≥0} λ(p^{l+j})² p^{-j}` with `λ(p^m)` from the Hecke recursion.
pub fn euler_local_sum(p: u64, l: u32, lambda_p: f64, tol: f64) -> f64 {
    let pf = p as f64;
    let mut powers = hecke_prime_powers(lambda_p, l as usize + 64);
    let result = sum_with_tail_bound(
        |j| {
            let m = (l + j) as usize;
            if m >= powers.len() {
                powers = hecke_prime_powers(lambda_p, 2 * m);
            }
            Ok(powers[m].powi(2) * pf.powi(-(j as i32)))
        },
        |j| ((l + j + 1) as f64).powi(2) * pf.powi(-(j as i32)),
        tol,
    );
    result.expect("λ² local sums converge for every prime")
}

/// The inverse local factor at `p` of `Σ λ(n)² n^{-s}` at `s = 1`:
/// `((p−1)/(p+1)) (1 − (λ(p)² − 2)/p + 1/p²)`.
pub fn hecke_inverse_local_factor(p: u64, lambda_p: f64) -> f64 {
    let pf = p as f64;
    (pf - 1.0) / (pf + 1.0) * (1.0 - (lambda_p * lambda_p - 2.0) / pf + 1.0 / (pf * pf))
}

/// `D_q = Σ_{q₀q₁=q} μ(q₁)/(φ(q₁)q₀) · w_{q₀,q₁}`.
pub fn d_q(q: u64, c_phi: f64, lambda_p: &dyn Fn(u64) -> f64, tol: f64) -> SingularCoefficientD {
    assert!(q >= 1);
    let primes = factorize(q);
    let inverse: f64 = primes
        .iter()
        .map(|&(p, _)| hecke_inverse_local_factor(p, lambda_p(p)))
        .product();
    let mut value = 0.0;
    for q1 in divisors(q) {
        let mu = mobius(q1);
        if mu == 0 {
            continue;
        }
        let q0 = q / q1;
        let mut w = c_phi;
        if q > 1 {
            w *= inverse;
        }
        for &(p, _) in &primes {
            let a = valuation(q0, p);
            if q1 % p == 0 {
                w *= hecke_prime_powers(lambda_p(p), a as usize)[a as usize].powi(2);
            } else {
                w *= euler_local_sum(p, a, lambda_p(p), tol);
            }
        }
        value += mu as f64 / (euler_phi(q1) as f64 * q0 as f64) * w;
    }
    SingularCoefficientD { q, value, c_phi }
}

/// `C_Φ ≈ Σ_{k≤n} λ(k)² / n`; the error decays like `n^{-2/5}`.
pub fn estimate_c_phi(w: &WeightSequence, n: usize) -> Result<f64> {
    w.check_index(n)?;
    Ok(w.prefix_sum(n) / n as f64)
}

/// `Σ_i c_i (log x)^{d+1-i}`, coefficients in descending powers of `log x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogPolynomial {
    pub q: u64,
    /// v for d_v, ϰ for generic weights.
    pub order: u32,
    pub coeffs: Vec<f64>,
}

impl LogPolynomial {
    pub fn from_ascending(q: u64, order: u32, ascending: &[f64]) -> Self {
        Self { q, order, coeffs: ascending.iter().rev().copied().collect() }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn ascending(&self) -> Vec<f64> {
        self.coeffs.iter().rev().copied().collect()
    }

    pub fn eval_log(&self, log_x: f64) -> f64 {
        self.coeffs.iter().fold(0.0, |acc, c| acc * log_x + c)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.eval_log(x.ln())
    }

    /// `max_i |c_i| · q^{1−ε}`, the quantity kept bounded by a constant.
    pub fn bound_ratio(&self) -> f64 {
        let m = self.coeffs.iter().fold(0.0f64, |acc, c| acc.max(c.abs()));
        m * (self.q as f64).powf(1.0 - EPS)
    }
}

/// `R(L) ↦ R(L − shift)`, ascending coefficients.
fn shift_poly(r: &[f64], shift: f64) -> Vec<f64> {
    let mut out = vec![0.0; r.len()];
    for (j, &c) in r.iter().enumerate() {
        for i in 0..=j {
            out[i] += c * binomial(j as u64, i as u64) as f64 * (-shift).powi((j - i) as i32);
        }
    }
    out
}

/// `R + R'`, ascending coefficients: `d/dy [y R(log y)] = R(L) + R'(L)`.
fn density_poly(r: &[f64]) -> Vec<f64> {
    let mut out = r.to_vec();
    for j in 1..r.len() {
        out[j - 1] += j as f64 * r[j];
    }
    out
}

/// Taylor coefficients in `u = s − 1`, through `u^order`, of
/// `Σ_j c(j) p^{-j s}` with `|c(j)| ≤ (a+j+1)^k`.
fn local_taylor(
    p: u64,
    a: u32,
    k: u32,
    order: usize,
    c: &dyn Fn(u32) -> Result<f64>,
    tol: f64,
) -> Result<LaurentSeries> {
    let pf = p as f64;
    let lp = pf.ln();
    let mut out = vec![0.0; order + 1];
    let mut r_fact = 1.0;
    for (r, slot) in out.iter_mut().enumerate() {
        if r > 0 {
            r_fact *= r as f64;
        }
        *slot = sum_with_tail_bound(
            |j| {
                let cj = c(j)?;
                let cap = ((a + j + 1) as f64).powi(k as i32);
                if cj.abs() > cap * (1.0 + 1e-9) {
                    return Err(Error::Divergence(format!(
                        "coefficient at p^{} is {cj}, above its bound {cap}",
                        a + j
                    )));
                }
                Ok(cj * pf.powi(-(j as i32)) * (-(j as f64) * lp).powi(r as i32) / r_fact)
            },
            |j| {
                ((a + j + 1) as f64).powi(k as i32)
                    * pf.powi(-(j as i32))
                    * (j as f64 * lp).max(1.0).powi(r as i32)
                    / r_fact
            },
            tol,
        )?;
    }
    Ok(LaurentSeries::taylor(out))
}

/// Cumulative `F` (with `n F(n)` the main term) and density `G = d/dx(x F)`.
fn residue_pipeline(
    q: u64,
    order: u32,
    base: &LaurentSeries,
    correction: &dyn Fn(u64, u64) -> Result<LaurentSeries>,
) -> Result<(LogPolynomial, LogPolynomial)> {
    let mut cumulative = vec![0.0; order as usize];
    let mut density = vec![0.0; order as usize];
    for q1 in divisors(q) {
        let mu = mobius(q1);
        if mu == 0 {
            continue;
        }
        let q0 = q / q1;
        let series = base.mul(&correction(q0, q1)?);
        let mut r = series.mellin_residue_poly()?;
        r.resize(order as usize, 0.0);
        let scale = mu as f64 / (euler_phi(q1) as f64 * q0 as f64);
        let shift = (q0 as f64).ln();
        for (acc, c) in cumulative.iter_mut().zip(shift_poly(&r, shift)) {
            *acc += scale * c;
        }
        for (acc, c) in density.iter_mut().zip(shift_poly(&density_poly(&r), shift)) {
            *acc += scale * c;
        }
    }
    Ok((
        LogPolynomial::from_ascending(q, order, &cumulative),
        LogPolynomial::from_ascending(q, order, &density),
    ))
}

/// Internal Taylor/Laurent order used by [`piltz_log_polynomials`].
pub fn default_piltz_order(v: u32) -> usize {
    (v as usize + 2).min(10)
}

/// Cumulative and density log-polynomials for `d_v` at denominator `q`.
/// The density is `P_{v,q}`, the main-term amplitude `E_{q,n} = P_{v,q}(n)`.
pub fn piltz_log_polynomials(v: u32, q: u64) -> Result<(LogPolynomial, LogPolynomial)> {
    piltz_log_polynomials_with_order(v, q, default_piltz_order(v))
}

pub fn piltz_log_polynomials_with_order(
    v: u32,
    q: u64,
    order: usize,
) -> Result<(LogPolynomial, LogPolynomial)> {
    if v < 2 || q == 0 {
        return Err(Error::Domain(format!("piltz log-polynomial needs v >= 2 and q >= 1 (v = {v}, q = {q})")));
    }
    if order < v as usize {
        return Err(Error::TruncationOrder { order, needed: v as usize });
    }
    let base = zeta_laurent(order)?.powi(v);
    let primes = factorize(q);
    let dv = |m: u64| binomial(m + v as u64 - 1, v as u64 - 1) as f64;
    let taylor_len = v as usize + 1;
    let correction = |q0: u64, q1: u64| -> Result<LaurentSeries> {
        let mut acc = LaurentSeries::taylor(vec![1.0; 1]);
        acc.coeffs.resize(taylor_len + 1, 0.0);
        for &(p, _) in &primes {
            let pf = p as f64;
            let lp = pf.ln();
            // (1 − p^{-s})^v
            let mut fact = 1.0;
            let one_minus: Vec<f64> = (0..=taylor_len)
                .map(|r| {
                    if r > 0 {
                        fact *= r as f64;
                    }
                    let t = (-lp).powi(r as i32) / fact / pf;
                    if r == 0 { 1.0 - t } else { -t }
                })
                .collect();
            acc = acc.mul(&LaurentSeries::taylor(one_minus).powi(v));
            let a = valuation(q0, p);
            if q1 % p == 0 {
                acc = acc.scale(dv(a as u64));
            } else {
                let local = local_taylor(p, a, v - 1, taylor_len, &|j| Ok(dv((a + j) as u64)), LOCAL_TOL)?;
                acc = acc.mul(&local);
            }
        }
        Ok(acc)
    };
    residue_pipeline(q, v, &base, &correction)
}

/// `P_{v,q}`: the density log-polynomial of `d_v` at denominator `q`.
pub fn piltz_log_polynomial(v: u32, q: u64) -> Result<LogPolynomial> {
    Ok(piltz_log_polynomials(v, q)?.1)
}

/// `(F_q, G_q)` for a generic multiplicative weight.
pub fn generic_log_polynomials(
    spec: &MultiplicativeWeightSpec,
    q: u64,
) -> Result<(LogPolynomial, LogPolynomial)> {
    spec.validate()?;
    if q == 0 {
        return Err(Error::Domain("q must be at least 1".into()));
    }
    let order = spec.pole_order;
    let primes = factorize(q);
    let taylor_len = order as usize + 1;
    let k = spec.divisor_exponent;
    let correction = |q0: u64, q1: u64| -> Result<LaurentSeries> {
        let mut acc = LaurentSeries::taylor(vec![1.0; 1]);
        acc.coeffs.resize(taylor_len + 1, 0.0);
        for &(p, _) in &primes {
            let full = local_taylor(p, 0, k, taylor_len, &|j| spec.alpha(p, j), LOCAL_TOL)?;
            acc = acc.mul(&full.recip_taylor()?);
            let a = valuation(q0, p);
            if q1 % p == 0 {
                acc = acc.scale(spec.alpha(p, a)?);
            } else {
                let local = local_taylor(p, a, k, taylor_len, &|j| spec.alpha(p, a + j), LOCAL_TOL)?;
                acc = acc.mul(&local);
            }
        }
        Ok(acc)
    };
    residue_pipeline(q, order, &spec.laurent, &correction)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::{hecke_lambda_sq_from, piltz_table, tau_table};

    const GAMMA0: f64 = 0.577_215_664_901_532_9;

    #[test]
    fn local_sum_stops_on_tail_bound() {
        let lam2 = -24.0 / 2f64.powf(5.5);
        let full = euler_local_sum(2, 0, lam2, 1e-12);
        let coarse = euler_local_sum(2, 0, lam2, 1e-3);
        assert!((full - coarse).abs() < 1e-3);
        // closed form Σ λ(p^j)² X^j = (1+X)/((1−X)(1−(λ²−2)X+X²))
        let x = 0.5;
        let closed = (1.0 + x) / ((1.0 - x) * (1.0 - (lam2 * lam2 - 2.0) * x + x * x));
        assert!((full - closed).abs() < 1e-11);
        assert!((1.0 / full - hecke_inverse_local_factor(2, lam2)).abs() < 1e-11);
        // λ(p) = 0: j = 0 term contributes λ(1)² = 1
        assert!(euler_local_sum(3, 0, 0.0, 1e-12) >= 1.0);
    }

    #[test]
    fn d_one_is_c_phi() {
        let d = d_q(1, 0.123_456, &|_| 0.7, LOCAL_TOL);
        assert_eq!(d.value, 0.123_456);
    }

    #[test]
    fn dq_bound_shape_up_to_100() {
        let tau = tau_table(200).unwrap();
        let lam = |p: u64| tau.lambda(p as usize);
        let ratios: Vec<f64> = (1..=100).map(|q| d_q(q, 1.0, &lam, LOCAL_TOL).bound_ratio()).collect();
        assert!(ratios.iter().all(|r| r.is_finite() && *r < 1.0));
    }

    #[test]
    fn piltz_v2_q1_closed_form() {
        let p = piltz_log_polynomial(2, 1).unwrap();
        assert_eq!(p.degree(), 1);
        assert!((p.coeffs[0] - 1.0).abs() < 1e-12);
        assert!((p.coeffs[1] - 2.0 * GAMMA0).abs() < 1e-10);
        let (f, _) = piltz_log_polynomials(2, 1).unwrap();
        assert!((f.coeffs[1] - (2.0 * GAMMA0 - 1.0)).abs() < 1e-10);
    }

    #[test]
    fn truncation_order_error() {
        assert!(matches!(
            piltz_log_polynomials_with_order(4, 3, 3),
            Err(Error::TruncationOrder { order: 3, needed: 4 })
        ));
        assert!(piltz_log_polynomial(1, 3).is_err());
    }

    #[test]
    fn cesaro_generic_polynomials() {
        let spec = MultiplicativeWeightSpec::cesaro();
        let (f, g) = generic_log_polynomials(&spec, 1).unwrap();
        assert_eq!(f.degree(), 0);
        assert!((f.coeffs[0] - 1.0).abs() < 1e-12 && (g.coeffs[0] - 1.0).abs() < 1e-12);
        // Σ_{k≤n} e(ak/q) is bounded: no main term for q > 1
        for q in 2..=12 {
            let (f, g) = generic_log_polynomials(&spec, q).unwrap();
            assert!(f.coeffs[0].abs() < 1e-10 && g.coeffs[0].abs() < 1e-10, "q = {q}");
        }
    }

    #[test]
    fn generic_d2_matches_piltz_pipeline() {
        let spec = MultiplicativeWeightSpec::piltz(2).unwrap();
        for q in 1..=20 {
            let (gf, gg) = generic_log_polynomials(&spec, q).unwrap();
            let (pf, pg) = piltz_log_polynomials(2, q).unwrap();
            for i in 0..2 {
                assert!((gf.coeffs[i] - pf.coeffs[i]).abs() < 1e-10, "F q = {q}");
                assert!((gg.coeffs[i] - pg.coeffs[i]).abs() < 1e-10, "G q = {q}");
            }
        }
    }

    #[test]
    fn generic_hecke_square_matches_dq() {
        let tau = tau_table(400).unwrap();
        let w = hecke_lambda_sq_from(&tau).unwrap();
        let c = estimate_c_phi(&w, 400).unwrap();
        let spec = MultiplicativeWeightSpec::hecke_square(&tau, c).unwrap();
        let lam = |p: u64| tau.lambda(p as usize);
        for q in 1..=30 {
            let (_, g) = generic_log_polynomials(&spec, q).unwrap();
            let d = d_q(q, c, &lam, LOCAL_TOL).value;
            assert!((g.coeffs[0] - d).abs() <= 0.02 * d.abs().max(1e-3 * c), "q = {q}: {} vs {d}", g.coeffs[0]);
        }
    }

    #[test]
    fn residue_pipeline_is_linear() {
        let spec = MultiplicativeWeightSpec::piltz(3).unwrap();
        let mut doubled = spec.clone();
        doubled.laurent = spec.laurent.scale(2.0);
        for q in [1, 6, 12] {
            let (f1, g1) = generic_log_polynomials(&spec, q).unwrap();
            let (f2, g2) = generic_log_polynomials(&doubled, q).unwrap();
            for i in 0..3 {
                assert!((2.0 * f1.coeffs[i] - f2.coeffs[i]).abs() < 1e-12);
                assert!((2.0 * g1.coeffs[i] - g2.coeffs[i]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn piltz_coefficients_decay_in_q() {
        for v in [2, 3] {
            let worst = (1..=50)
                .map(|q| piltz_log_polynomial(v, q).unwrap().bound_ratio())
                .fold(0.0f64, f64::max);
            assert!(worst < 20.0, "v = {v}: {worst}");
        }
    }

    #[test]
    fn piltz_main_term_near_zero_frequency() {
        let n = 200_000;
        let d2 = piltz_table(2, n).unwrap();
        let (f, _) = piltz_log_polynomials(2, 1).unwrap();
        let err = (d2.prefix_sum(n) - n as f64 * f.eval(n as f64)).abs();
        assert!(err < 3.0 * (n as f64).sqrt());
    }
}
