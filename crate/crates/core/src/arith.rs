//! Elementary multiplicative number theory used throughout the crate.

/// Smallest-prime-factor table for `0..=n`.
#[derive(Debug, Clone)]
pub struct Sieve {
    spf: Vec<u32>,
}

impl Sieve {
    pub fn new(n: usize) -> Self {
        let mut spf = vec![0u32; n + 1];
        for i in 2..=n {
            if spf[i] == 0 {
                let mut j = i;
                while j <= n {
                    if spf[j] == 0 {
                        spf[j] = i as u32;
                    }
                    j += i;
                }
            }
        }
        Self { spf }
    }

    pub fn limit(&self) -> usize {
        self.spf.len() - 1
    }

    pub fn smallest_prime_factor(&self, n: usize) -> usize {
        self.spf[n] as usize
    }

    pub fn is_prime(&self, n: usize) -> bool {
        n >= 2 && self.spf[n] as usize == n
    }

    pub fn primes(&self) -> impl Iterator<Item = usize> + '_ {
        (2..self.spf.len()).filter(move |&i| self.spf[i] as usize == i)
    }

    /// Splits `n = p^l * m` with `p` the smallest prime factor of `n`.
    pub fn split_smallest(&self, mut n: usize) -> (usize, u32, usize) {
        let p = self.spf[n] as usize;
        let mut l = 0;
        while n % p == 0 {
            n /= p;
            l += 1;
        }
        (p, l, n)
    }
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Prime factorization by trial division, ascending primes.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut l = 0;
            while n % p == 0 {
                n /= p;
                l += 1;
            }
            out.push((p, l));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && factorize(n).first() == Some(&(n, 1))
}

pub fn mobius(n: u64) -> i64 {
    let f = factorize(n);
    if f.iter().any(|&(_, l)| l > 1) {
        0
    } else if f.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n)
        .into_iter()
        .fold(n, |acc, (p, _)| acc / p * (p - 1))
}

/// Sorted divisors of `n`.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    for (p, l) in factorize(n) {
        let len = out.len();
        let mut pk = 1;
        for _ in 0..l {
            pk *= p;
            for i in 0..len {
                out.push(out[i] * pk);
            }
        }
    }
    out.sort_unstable();
    out
}

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// Number of divisors d₂(n).
pub fn divisor_count(n: u64) -> u64 {
    factorize(n).iter().map(|&(_, l)| l as u64 + 1).product()
}

/// p-adic valuation.
pub fn valuation(mut n: u64, p: u64) -> u32 {
    let mut l = 0;
    while n % p == 0 {
        n /= p;
        l += 1;
    }
    l
}

/// Distance to the nearest integer, ‖x‖.
pub fn dist_to_int(x: f64) -> f64 {
    (x - x.round()).abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        assert_eq!(mobius(1), 1);
        assert_eq!(mobius(6), 1);
        assert_eq!(mobius(12), 0);
        assert_eq!(mobius(30), -1);
        assert_eq!(euler_phi(1), 1);
        assert_eq!(euler_phi(12), 4);
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(divisor_count(720720), 240);
        assert_eq!(valuation(48, 2), 4);
    }

    #[test]
    fn sieve_agrees_with_trial_division() {
        let s = Sieve::new(2000);
        for n in 2..=2000u64 {
            assert_eq!(s.is_prime(n as usize), is_prime(n));
            assert_eq!(s.smallest_prime_factor(n as usize) as u64, factorize(n)[0].0);
        }
        assert_eq!(s.primes().count(), 303);
    }
}
