//! Textbook Racah sums in arbitrary-precision rationals.

use std::sync::LazyLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

static FACTORIALS: LazyLock<Vec<BigInt>> = LazyLock::new(|| {
    let mut v = vec![BigInt::one()];
    for k in 1..=64u32 {
        let next = &v[k as usize - 1] * k;
        v.push(next);
    }
    v
});

fn fact_int(twice: i32) -> &'static BigInt {
    debug_assert!(twice >= 0 && twice % 2 == 0);
    &FACTORIALS[(twice / 2) as usize]
}

fn fact(twice: i32) -> BigRational {
    BigRational::from_integer(fact_int(twice).clone())
}

/// `Σ sign_k / den_k` with integer denominators, summed over their product-free
/// least common multiple and reduced once.
fn alternating_sum(terms: Vec<(bool, BigInt, BigInt)>) -> BigRational {
    let mut lcm = BigInt::one();
    for (_, _, d) in &terms {
        lcm = num_integer::Integer::lcm(&lcm, d);
    }
    let mut num = BigInt::zero();
    for (neg, n, d) in terms {
        let t = n * (&lcm / d);
        if neg {
            num -= t;
        } else {
            num += t;
        }
    }
    BigRational::new(num, lcm)
}

fn triangle(a: i32, b: i32, c: i32) -> bool {
    a >= 0 && b >= 0 && c >= 0 && c <= a + b && c >= (a - b).abs() && (a + b + c) % 2 == 0
}

fn delta(a: i32, b: i32, c: i32) -> BigRational {
    fact(a + b - c) * fact(a - b + c) * fact(-a + b + c) / fact(a + b + c + 2)
}

/// `s · sqrt(q)` with `s` carrying the sign.
fn signed_sqrt(s: &BigRational, q: &BigRational) -> f64 {
    if s.is_zero() {
        return 0.0;
    }
    let mag = (s * s * q).to_f64().unwrap().sqrt();
    if s.is_negative() {
        -mag
    } else {
        mag
    }
}

/// `(j1 j2 j3; m1 m2 m3)` from doubled arguments.
pub fn racah_3j_naive(t: [i32; 6]) -> f64 {
    let [j1, j2, j3, m1, m2, m3] = t;
    if !triangle(j1, j2, j3) || m1 + m2 + m3 != 0 {
        return 0.0;
    }
    for (j, m) in [(j1, m1), (j2, m2), (j3, m3)] {
        if m.abs() > j || (j + m) % 2 != 0 {
            return 0.0;
        }
    }
    let mut terms = Vec::new();
    let mut k = 0;
    loop {
        let args = [
            k,
            j3 - j2 + k + m1,
            j3 - j1 + k - m2,
            j1 + j2 - j3 - k,
            j1 - k - m1,
            j2 - k + m2,
        ];
        if args[3] < 0 || args[4] < 0 || args[5] < 0 {
            break;
        }
        if args.iter().all(|&a| a >= 0) {
            let den = args.iter().fold(BigInt::one(), |d, &a| d * fact_int(a));
            terms.push(((k / 2) % 2 == 1, BigInt::one(), den));
        }
        k += 2;
    }
    let sum = alternating_sum(terms);
    let q = delta(j1, j2, j3)
        * fact(j1 + m1)
        * fact(j1 - m1)
        * fact(j2 + m2)
        * fact(j2 - m2)
        * fact(j3 + m3)
        * fact(j3 - m3);
    let phase = if ((j1 - j2 - m3) / 2).rem_euclid(2) == 0 {
        1
    } else {
        -1
    };
    signed_sqrt(&(sum * BigRational::from_integer(phase.into())), &q)
}

/// `{j1 j2 j3; j4 j5 j6}` from doubled arguments.
pub fn racah_6j_naive(t: [i32; 6]) -> f64 {
    let [j1, j2, j3, j4, j5, j6] = t;
    let triads = [(j1, j2, j3), (j1, j5, j6), (j4, j2, j6), (j4, j5, j3)];
    if !triads.iter().all(|&(a, b, c)| triangle(a, b, c)) {
        return 0.0;
    }
    let a = triads.map(|(x, y, z)| x + y + z);
    let b = [j1 + j2 + j4 + j5, j2 + j3 + j5 + j6, j3 + j1 + j6 + j4];
    let lo = *a.iter().max().unwrap();
    let hi = *b.iter().min().unwrap();
    let mut terms = Vec::new();
    let mut t2 = lo;
    while t2 <= hi {
        let den = a
            .iter()
            .map(|&x| fact_int(t2 - x))
            .chain(b.iter().map(|&x| fact_int(x - t2)))
            .fold(BigInt::one(), |d, f| d * f);
        terms.push(((t2 / 2) % 2 == 1, fact_int(t2 + 2).clone(), den));
        t2 += 2;
    }
    let sum = alternating_sum(terms);
    let q = triads
        .iter()
        .map(|&(x, y, z)| delta(x, y, z))
        .fold(BigRational::one(), |p, d| p * d);
    signed_sqrt(&sum, &q)
}
