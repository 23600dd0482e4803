//! Number-theoretic transforms over word-sized primes and CRT reconstruction.
//!
//! Truncated power series with exact integer coefficients are multiplied
//! independently modulo several NTT-friendly primes; coefficients are then
//! recovered in `i128` by Garner's algorithm. This is exact as long as every
//! true coefficient has magnitude below half the product of the moduli.

/// `(prime, primitive root)`; each prime is `c * 2^k + 1` with `k >= 24`.
pub const MODULI: [(u64, u64); 4] = [
    (998_244_353, 3),
    (754_974_721, 11),
    (1_107_296_257, 10),
    (2_013_265_921, 31),
];

/// Largest transform length supported by every modulus.
pub const MAX_LOG_LEN: u32 = 23;

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        exp >>= 1;
    }
    acc
}

/// Product of all moduli.
pub fn modulus_product() -> u128 {
    MODULI.iter().map(|&(p, _)| p as u128).product()
}

pub struct Ntt {
    p: u64,
    log_len: u32,
    /// `roots[s]` holds the twiddles of butterfly stage `s` (half-length `2^s`).
    roots: Vec<Vec<u64>>,
    inv_roots: Vec<Vec<u64>>,
    inv_len: u64,
}

impl Ntt {
    pub fn new(p: u64, g: u64, log_len: u32) -> Self {
        assert!(log_len <= MAX_LOG_LEN);
        assert_eq!((p - 1) % (1 << log_len), 0);
        let mut roots = Vec::with_capacity(log_len as usize);
        let mut inv_roots = Vec::with_capacity(log_len as usize);
        for s in 0..log_len {
            let half = 1usize << s;
            let w = pow_mod(g, (p - 1) / (2 * half as u64), p);
            let wi = pow_mod(w, p - 2, p);
            let mut r = Vec::with_capacity(half);
            let mut ri = Vec::with_capacity(half);
            let (mut a, mut b) = (1u64, 1u64);
            for _ in 0..half {
                r.push(a);
                ri.push(b);
                a = a * w % p;
                b = b * wi % p;
            }
            roots.push(r);
            inv_roots.push(ri);
        }
        let inv_len = pow_mod(1 << log_len, p - 2, p);
        Self { p, log_len, roots, inv_roots, inv_len }
    }

    pub fn len(&self) -> usize {
        1 << self.log_len
    }

    fn bit_reverse(a: &mut [u64]) {
        let n = a.len();
        let mut j = 0;
        for i in 1..n {
            let mut bit = n >> 1;
            while j & bit != 0 {
                j ^= bit;
                bit >>= 1;
            }
            j |= bit;
            if i < j {
                a.swap(i, j);
            }
        }
    }

    fn transform(&self, a: &mut [u64], inverse: bool) {
        debug_assert_eq!(a.len(), self.len());
        let p = self.p;
        Self::bit_reverse(a);
        let tables = if inverse { &self.inv_roots } else { &self.roots };
        for (s, tw) in tables.iter().enumerate() {
            let half = 1usize << s;
            for chunk in a.chunks_exact_mut(2 * half) {
                let (lo, hi) = chunk.split_at_mut(half);
                for ((x, y), &w) in lo.iter_mut().zip(hi.iter_mut()).zip(tw) {
                    let u = *x;
                    let v = *y * w % p;
                    *x = if u + v >= p { u + v - p } else { u + v };
                    *y = if u >= v { u - v } else { u + p - v };
                }
            }
        }
        if inverse {
            for x in a.iter_mut() {
                *x = *x * self.inv_len % p;
            }
        }
    }

    /// Product of two series (residues mod p), truncated to `keep` terms.
    pub fn multiply(&self, a: &[u64], b: &[u64], keep: usize) -> Vec<u64> {
        assert!(a.len() + b.len() <= self.len() + 1);
        let mut fa = a.to_vec();
        fa.resize(self.len(), 0);
        self.transform(&mut fa, false);
        let mut fb = b.to_vec();
        fb.resize(self.len(), 0);
        self.transform(&mut fb, false);
        for (x, y) in fa.iter_mut().zip(&fb) {
            *x = *x * y % self.p;
        }
        self.transform(&mut fa, true);
        fa.truncate(keep);
        fa
    }

    pub fn square(&self, a: &[u64], keep: usize) -> Vec<u64> {
        assert!(2 * a.len() <= self.len() + 1);
        let mut fa = a.to_vec();
        fa.resize(self.len(), 0);
        self.transform(&mut fa, false);
        for x in fa.iter_mut() {
            *x = *x * *x % self.p;
        }
        self.transform(&mut fa, true);
        fa.truncate(keep);
        fa
    }
}

/// Recovers the symmetric representative of a value from its residues modulo
/// [`MODULI`] (Garner mixed-radix form).
pub fn crt_signed(residues: &[u64; 4]) -> i128 {
    let m: Vec<u64> = MODULI.iter().map(|&(p, _)| p).collect();
    // mixed-radix digits t_i with x = t0 + t1 m0 + t2 m0 m1 + t3 m0 m1 m2
    let mut t = [0u64; 4];
    for i in 0..4 {
        let mut x = residues[i] % m[i];
        let mut prod = 1u64;
        let mut partial = 0u64;
        for j in 0..i {
            partial = (partial + t[j] % m[i] * prod) % m[i];
            prod = prod * (m[j] % m[i]) % m[i];
        }
        x = (x + m[i] - partial) % m[i];
        t[i] = x * pow_mod(prod, m[i] - 2, m[i]) % m[i];
    }
    let mut value: u128 = 0;
    let mut radix: u128 = 1;
    for i in 0..4 {
        value += t[i] as u128 * radix;
        radix *= m[i] as u128;
    }
    let total = modulus_product();
    if value > total / 2 {
        -((total - value) as i128)
    } else {
        value as i128
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::factorize;

    #[test]
    fn generators_are_primitive_roots() {
        for &(p, g) in &MODULI {
            assert_eq!((p - 1) % (1 << MAX_LOG_LEN), 0, "p = {p}");
            for (r, _) in factorize(p - 1) {
                assert_ne!(pow_mod(g, (p - 1) / r, p), 1, "g = {g} mod {p}");
            }
        }
    }

    #[test]
    fn multiply_matches_schoolbook() {
        let (p, g) = MODULI[1];
        let ntt = Ntt::new(p, g, 6);
        let a: Vec<u64> = (0..20).map(|i| (i * 7919 + 3) % p).collect();
        let b: Vec<u64> = (0..30).map(|i| (i * i * 31 + 11) % p).collect();
        let got = ntt.multiply(&a, &b, 49);
        let mut want = vec![0u64; 49];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                want[i + j] = (want[i + j] + x * y) % p;
            }
        }
        assert_eq!(got, want);
        assert_eq!(ntt.square(&a, 39), ntt.multiply(&a, &a, 39));
    }

    #[test]
    fn crt_roundtrip_signed() {
        for &v in &[0i128, 1, -1, 123_456_789_012_345_678_901_234_567, -(1i128 << 110)] {
            let r = MODULI.map(|(p, _)| v.rem_euclid(p as i128) as u64);
            assert_eq!(crt_signed(&r), v);
        }
    }
}
