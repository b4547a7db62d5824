//! Prime-exponent representation of factorial ratios.

use std::sync::LazyLock;

use num_bigint::BigUint;
use num_traits::One;

/// Largest argument accepted by [`Factored::mul_factorial`].
pub(crate) const MAX_FACTORIAL: u32 = 4096;

static PRIMES: LazyLock<Vec<u32>> = LazyLock::new(|| {
    let n = MAX_FACTORIAL as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut k = i * i;
            while k <= n {
                sieve[k] = false;
                k += i;
            }
        }
        i += 1;
    }
    (0..=n).filter(|&k| sieve[k]).map(|k| k as u32).collect()
});

/// A rational number `Π pᵢ^eᵢ` with signed exponents.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub(crate) struct Factored {
    exps: Vec<i32>,
}

impl Factored {
    pub(crate) fn one() -> Self {
        Self::default()
    }

    fn ensure_len(&mut self, len: usize) {
        if self.exps.len() < len {
            self.exps.resize(len, 0);
        }
    }

    /// Multiplies by `(n!)^power` (Legendre's formula).
    pub(crate) fn mul_factorial(&mut self, n: u32, power: i32) {
        assert!(
            n <= MAX_FACTORIAL,
            "factorial argument {n} exceeds {MAX_FACTORIAL}"
        );
        for (idx, &p) in PRIMES.iter().enumerate() {
            if p > n {
                break;
            }
            self.ensure_len(idx + 1);
            let mut e = 0u32;
            let mut q = n / p;
            while q > 0 {
                e += q;
                q /= p;
            }
            self.exps[idx] += power * e as i32;
        }
    }

    pub(crate) fn mul(&mut self, other: &Factored) {
        self.ensure_len(other.exps.len());
        for (a, b) in self.exps.iter_mut().zip(&other.exps) {
            *a += *b;
        }
    }

    /// Elementwise minimum of exponents (largest common factor).
    pub(crate) fn min_with(&mut self, other: &Factored) {
        let len = self.exps.len().max(other.exps.len());
        self.ensure_len(len);
        for (i, a) in self.exps.iter_mut().enumerate() {
            let b = other.exps.get(i).copied().unwrap_or(0);
            *a = (*a).min(b);
        }
    }

    pub(crate) fn div(&mut self, other: &Factored) {
        self.ensure_len(other.exps.len());
        for (a, b) in self.exps.iter_mut().zip(&other.exps) {
            *a -= *b;
        }
    }

    /// Splits into `(numerator, denominator)` integers.
    pub(crate) fn to_ratio(&self) -> (BigUint, BigUint) {
        let mut num = BigUint::one();
        let mut den = BigUint::one();
        for (idx, &e) in self.exps.iter().enumerate() {
            if e == 0 {
                continue;
            }
            let p = BigUint::from(PRIMES[idx]);
            let pw = p.pow(e.unsigned_abs());
            if e > 0 {
                num *= pw;
            } else {
                den *= pw;
            }
        }
        (num, den)
    }

    /// Integer value; panics if any exponent is negative.
    pub(crate) fn to_integer(&self) -> BigUint {
        let (num, den) = self.to_ratio();
        debug_assert!(den.is_one());
        num
    }

    /// Splits `x = s² · r` where `r` is square-free in the exponent sense.
    pub(crate) fn split_square(&self) -> (Factored, Factored) {
        let mut sq = Factored {
            exps: vec![0; self.exps.len()],
        };
        let mut rest = Factored {
            exps: vec![0; self.exps.len()],
        };
        for (i, &e) in self.exps.iter().enumerate() {
            let half = e.div_euclid(2);
            sq.exps[i] = half;
            rest.exps[i] = e - 2 * half;
        }
        (sq, rest)
    }
}
