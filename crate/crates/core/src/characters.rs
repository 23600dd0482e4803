//! Dirichlet characters from the structure of `(ℤ/qℤ)*`, Gauss sums, and the
//! identity expressing `e(am/q) 1_{(m,q)=1}` through multiplicative characters.

use num_complex::Complex64;

use crate::arith::{euler_phi, factorize, gcd};
use crate::error::{Error, Result};
use crate::expsum::e;
use crate::ntt::pow_mod;

#[derive(Debug, Clone, PartialEq)]
pub struct DirichletCharacter {
    pub modulus: u64,
    /// `values[m] = χ(m)` for `m = 0..q`.
    pub values: Vec<Complex64>,
    pub principal: bool,
}

impl DirichletCharacter {
    pub fn at(&self, m: u64) -> Complex64 {
        self.values[(m % self.modulus) as usize]
    }
}

/// One cyclic factor of `(ℤ/qℤ)*`: its order and the discrete log of every
/// residue modulo the prime power it lives in.
struct CyclicFactor {
    prime_power: u64,
    order: u64,
    log: Vec<Option<u64>>,
}

fn cyclic_factor(prime_power: u64, generator: u64, order: u64, sign_split: bool) -> CyclicFactor {
    let mut log = vec![None; prime_power as usize];
    let mut x = 1u64;
    for t in 0..order {
        log[x as usize] = Some(t);
        if sign_split {
            // 2^e, e ≥ 3: −5^t carries the same 5-exponent as 5^t
            log[(prime_power - x) as usize] = Some(t);
        }
        x = x * generator % prime_power;
    }
    CyclicFactor { prime_power, order, log }
}

fn primitive_root(p: u64, pe: u64) -> u64 {
    let phi = pe / p * (p - 1);
    let factors = factorize(phi);
    (2..pe)
        .find(|&g| gcd(g, pe) == 1 && factors.iter().all(|&(r, _)| pow_mod(g, phi / r, pe) != 1))
        .expect("odd prime powers are cyclic")
}

fn factors_of(q: u64) -> Vec<CyclicFactor> {
    let mut out = Vec::new();
    for (p, l) in factorize(q) {
        let pe = p.pow(l);
        if p == 2 {
            match l {
                1 => {}
                2 => out.push(cyclic_factor(4, 3, 2, false)),
                _ => {
                    // sign component: ±1
                    let mut log = vec![None; pe as usize];
                    let mut x = 1u64;
                    for _ in 0..(pe / 4) {
                        log[x as usize] = Some(0);
                        log[(pe - x) as usize] = Some(1);
                        x = x * 5 % pe;
                    }
                    out.push(CyclicFactor { prime_power: pe, order: 2, log });
                    out.push(cyclic_factor(pe, 5, pe / 4, true));
                }
            }
        } else {
            let g = primitive_root(p, pe);
            out.push(cyclic_factor(pe, g, pe / p * (p - 1), false));
        }
    }
    out
}

/// All `φ(q)` characters modulo `q`; the principal one comes first.
pub fn dirichlet_characters(q: u64) -> Vec<DirichletCharacter> {
    assert!(q >= 1, "modulus must be positive");
    let factors = factors_of(q);
    let exponent = factors.iter().fold(1u64, |acc, f| acc / gcd(acc, f.order) * f.order);
    // discrete-log vector of every unit
    let logs: Vec<Option<Vec<u64>>> = (0..q)
        .map(|m| {
            if gcd(m, q) != 1 {
                return None;
            }
            Some(
                factors
                    .iter()
                    .map(|f| f.log[(m % f.prime_power) as usize].expect("unit has a discrete log"))
                    .collect(),
            )
        })
        .collect();
    let count = euler_phi(q);
    let mut out = Vec::with_capacity(count as usize);
    for index in 0..count {
        // mixed-radix digits of `index` select the character
        let mut rest = index;
        let digits: Vec<u64> = factors
            .iter()
            .map(|f| {
                let d = rest % f.order;
                rest /= f.order;
                d
            })
            .collect();
        let values = logs
            .iter()
            .map(|lg| match lg {
                None => Complex64::new(0.0, 0.0),
                Some(lg) => {
                    let num = factors
                        .iter()
                        .zip(&digits)
                        .zip(lg)
                        .map(|((f, d), t)| d * t % f.order * (exponent / f.order))
                        .sum::<u64>()
                        % exponent;
                    if num == 0 {
                        Complex64::new(1.0, 0.0)
                    } else {
                        e(num as f64 / exponent as f64)
                    }
                }
            })
            .collect();
        out.push(DirichletCharacter { modulus: q, values, principal: digits.iter().all(|&d| d == 0) });
    }
    out
}

/// `τ(χ̄) = Σ_{m=1}^{q} χ̄(m) e(m/q)`.
pub fn gauss_sum(chi: &DirichletCharacter) -> Complex64 {
    let q = chi.modulus;
    (1..=q).map(|m| chi.at(m).conj() * e((m % q) as f64 / q as f64)).sum()
}

/// Characters mod `q` together with their Gauss sums.
pub struct CharacterTable {
    pub modulus: u64,
    pub characters: Vec<DirichletCharacter>,
    pub gauss: Vec<Complex64>,
}

impl CharacterTable {
    pub fn new(q: u64) -> Self {
        let characters = dirichlet_characters(q);
        let gauss = characters.iter().map(gauss_sum).collect();
        Self { modulus: q, characters, gauss }
    }

    /// `|e(am/q) 1_{(m,q)=1} − φ(q)^{-1} Σ_χ χ(a)χ(m)τ(χ̄)|`.
    pub fn identity_error(&self, a: u64, m: u64) -> Result<f64> {
        let q = self.modulus;
        if gcd(a, q) != 1 {
            return Err(Error::Precondition(format!("gcd({a}, {q}) != 1")));
        }
        let lhs = if gcd(m, q) == 1 {
            e((a % q * (m % q) % q) as f64 / q as f64)
        } else {
            Complex64::new(0.0, 0.0)
        };
        let rhs: Complex64 = self
            .characters
            .iter()
            .zip(&self.gauss)
            .map(|(chi, tau)| chi.at(a) * chi.at(m) * tau)
            .sum::<Complex64>()
            / euler_phi(q) as f64;
        Ok((lhs - rhs).norm())
    }
}

pub fn character_identity_check(a: u64, q1: u64, m1: u64) -> Result<f64> {
    if q1 == 0 {
        return Err(Error::Precondition("modulus must be positive".into()));
    }
    CharacterTable::new(q1).identity_error(a, m1)
}
