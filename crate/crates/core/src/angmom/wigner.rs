//! Exact Wigner 3-j and 6-j symbols.
//!
//! Each Racah sum is accumulated as a big integer over the common factor of its
//! terms (factorials kept as prime exponent vectors), so no cancellation error
//! occurs before the single final conversion to `f64`.

use std::collections::HashMap;
use std::sync::{LazyLock, RwLock};

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::primes::Factored;
use super::HalfInt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Kind {
    ThreeJ,
    SixJ,
}

type Key = (Kind, [i32; 6]);

static CACHE: LazyLock<RwLock<HashMap<Key, f64>>> = LazyLock::new(|| RwLock::new(HashMap::new()));

/// Drops every memoized symbol.
pub fn clear_cache() {
    CACHE.write().expect("wigner cache poisoned").clear();
}

fn cached(key: Key, compute: impl FnOnce() -> f64) -> f64 {
    if let Some(&v) = CACHE.read().expect("wigner cache poisoned").get(&key) {
        return v;
    }
    let v = compute();
    // Concurrent inserts of the same key write the same value.
    CACHE.write().expect("wigner cache poisoned").insert(key, v);
    v
}

/// Triangle rule with integer perimeter, in doubled units.
fn triangle(a: i32, b: i32, c: i32) -> bool {
    a >= 0 && b >= 0 && c >= 0 && c <= a + b && c >= (a - b).abs() && (a + b + c) % 2 == 0
}

fn valid_projection(j: i32, m: i32) -> bool {
    m.abs() <= j && (j - m) % 2 == 0
}

fn sign_of_parity(twice: i32) -> f64 {
    // (-1)^(twice/2); twice is even by construction.
    if (twice / 2).rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `(j1 j2 j3; m1 m2 m3)`, memoized.
pub fn wigner_3j(
    j1: HalfInt,
    j2: HalfInt,
    j3: HalfInt,
    m1: HalfInt,
    m2: HalfInt,
    m3: HalfInt,
) -> f64 {
    let t = [
        j1.twice(),
        j2.twice(),
        j3.twice(),
        m1.twice(),
        m2.twice(),
        m3.twice(),
    ];
    if !selection_3j(&t) {
        return 0.0;
    }
    let (key, phase) = canonical_3j(t);
    let v = cached((Kind::ThreeJ, key), || racah_3j(key));
    phase * v
}

/// `(j1 j2 j3; m1 m2 m3)` without touching the memo cache.
pub fn wigner_3j_uncached(
    j1: HalfInt,
    j2: HalfInt,
    j3: HalfInt,
    m1: HalfInt,
    m2: HalfInt,
    m3: HalfInt,
) -> f64 {
    let t = [
        j1.twice(),
        j2.twice(),
        j3.twice(),
        m1.twice(),
        m2.twice(),
        m3.twice(),
    ];
    if !selection_3j(&t) {
        return 0.0;
    }
    racah_3j(t)
}

/// `{j1 j2 j3; l1 l2 l3}`, memoized.
pub fn wigner_6j(
    j1: HalfInt,
    j2: HalfInt,
    j3: HalfInt,
    l1: HalfInt,
    l2: HalfInt,
    l3: HalfInt,
) -> f64 {
    let t = [
        j1.twice(),
        j2.twice(),
        j3.twice(),
        l1.twice(),
        l2.twice(),
        l3.twice(),
    ];
    if !selection_6j(&t) {
        return 0.0;
    }
    let key = canonical_6j(t);
    cached((Kind::SixJ, key), || racah_6j(key))
}

/// `{j1 j2 j3; l1 l2 l3}` without touching the memo cache.
pub fn wigner_6j_uncached(
    j1: HalfInt,
    j2: HalfInt,
    j3: HalfInt,
    l1: HalfInt,
    l2: HalfInt,
    l3: HalfInt,
) -> f64 {
    let t = [
        j1.twice(),
        j2.twice(),
        j3.twice(),
        l1.twice(),
        l2.twice(),
        l3.twice(),
    ];
    if !selection_6j(&t) {
        return 0.0;
    }
    racah_6j(t)
}

fn selection_3j(t: &[i32; 6]) -> bool {
    let [j1, j2, j3, m1, m2, m3] = *t;
    triangle(j1, j2, j3)
        && valid_projection(j1, m1)
        && valid_projection(j2, m2)
        && valid_projection(j3, m3)
        && m1 + m2 + m3 == 0
}

fn selection_6j(t: &[i32; 6]) -> bool {
    let [a, b, c, d, e, f] = *t;
    triangle(a, b, c) && triangle(a, e, f) && triangle(d, b, f) && triangle(d, e, c)
}

/// Picks a representative among the column permutations and the `m → -m`
/// reflection, returning the phase that relates the two symbols.
fn canonical_3j(t: [i32; 6]) -> ([i32; 6], f64) {
    const PERMS: [([usize; 3], bool); 6] = [
        ([0, 1, 2], false),
        ([1, 2, 0], false),
        ([2, 0, 1], false),
        ([1, 0, 2], true),
        ([0, 2, 1], true),
        ([2, 1, 0], true),
    ];
    let odd_phase = sign_of_parity(t[0] + t[1] + t[2]);
    let mut best = t;
    let mut best_phase = 1.0;
    for (perm, odd) in PERMS {
        for flip in [false, true] {
            let s = if flip { -1 } else { 1 };
            let cand = [
                t[perm[0]],
                t[perm[1]],
                t[perm[2]],
                s * t[3 + perm[0]],
                s * t[3 + perm[1]],
                s * t[3 + perm[2]],
            ];
            if cand > best {
                best = cand;
                let mut ph = 1.0;
                if odd {
                    ph *= odd_phase;
                }
                if flip {
                    ph *= odd_phase;
                }
                best_phase = ph;
            }
        }
    }
    (best, best_phase)
}

fn canonical_6j(t: [i32; 6]) -> [i32; 6] {
    const PERMS: [[usize; 3]; 6] = [
        [0, 1, 2],
        [1, 2, 0],
        [2, 0, 1],
        [1, 0, 2],
        [0, 2, 1],
        [2, 1, 0],
    ];
    // Upper/lower exchange in two of the three columns.
    const SWAPS: [[bool; 3]; 4] = [
        [false, false, false],
        [true, true, false],
        [true, false, true],
        [false, true, true],
    ];
    let mut best = t;
    for perm in PERMS {
        for swap in SWAPS {
            let mut cand = [0; 6];
            for col in 0..3 {
                let (u, l) = (t[perm[col]], t[3 + perm[col]]);
                let (u, l) = if swap[col] { (l, u) } else { (u, l) };
                cand[col] = u;
                cand[3 + col] = l;
            }
            if cand > best {
                best = cand;
            }
        }
    }
    best
}

/// Δ(abc)² as factored rational, doubled-unit arguments.
fn delta_sq(a: i32, b: i32, c: i32) -> Factored {
    let mut f = Factored::one();
    f.mul_factorial(((a + b - c) / 2) as u32, 1);
    f.mul_factorial(((a - b + c) / 2) as u32, 1);
    f.mul_factorial(((-a + b + c) / 2) as u32, 1);
    f.mul_factorial(((a + b + c) / 2 + 1) as u32, -1);
    f
}

/// `phase · sqrt(prefactor) · Σ sign_k · term_k` evaluated exactly.
fn finish(prefactor: Factored, terms: Vec<(bool, Factored)>, phase: f64) -> f64 {
    if terms.is_empty() {
        return 0.0;
    }
    let mut common = terms[0].1.clone();
    for (_, t) in &terms[1..] {
        common.min_with(t);
    }
    let mut sum = BigInt::zero();
    for (negative, mut t) in terms {
        t.div(&common);
        let n = BigInt::from_biguint(Sign::Plus, t.to_integer());
        if negative {
            sum -= n;
        } else {
            sum += n;
        }
    }
    if sum.is_zero() {
        return 0.0;
    }
    // value = phase · sum · sqrt(prefactor · common²)
    let mut x = prefactor;
    x.mul(&common);
    x.mul(&common);
    let (sq, rest) = x.split_square();
    let (sq_num, sq_den) = sq.to_ratio();
    let (r_num, r_den) = rest.to_ratio();
    let rational = BigRational::new(sum * BigInt::from(sq_num), BigInt::from(sq_den));
    let radical = BigRational::new(BigInt::from(r_num), BigInt::from(r_den));
    let a = rational.to_f64().expect("finite 3j/6j rational part");
    let b = radical.to_f64().expect("finite 3j/6j radical part");
    phase * a * b.sqrt()
}

fn racah_3j(t: [i32; 6]) -> f64 {
    let [j1, j2, j3, m1, m2, m3] = t;
    let mut pre = delta_sq(j1, j2, j3);
    for (j, m) in [(j1, m1), (j2, m2), (j3, m3)] {
        pre.mul_factorial(((j + m) / 2) as u32, 1);
        pre.mul_factorial(((j - m) / 2) as u32, 1);
    }
    // Denominator factorial arguments, doubled.
    let a = [j1 + j2 - j3, j1 - m1, j2 + m2];
    let b = [j3 - j2 + m1, j3 - j1 - m2];
    let kmin = 0.max(-b[0]).max(-b[1]) / 2;
    let kmax = a.iter().copied().min().unwrap() / 2;
    let mut terms = Vec::new();
    let mut k = kmin;
    while k <= kmax {
        let k2 = 2 * k;
        let mut f = Factored::one();
        f.mul_factorial(k as u32, -1);
        for &x in &a {
            f.mul_factorial(((x - k2) / 2) as u32, -1);
        }
        for &x in &b {
            f.mul_factorial(((x + k2) / 2) as u32, -1);
        }
        terms.push((k % 2 == 1, f));
        k += 1;
    }
    finish(pre, terms, sign_of_parity(j1 - j2 - m3))
}

fn racah_6j(t: [i32; 6]) -> f64 {
    let [j1, j2, j3, l1, l2, l3] = t;
    let mut pre = delta_sq(j1, j2, j3);
    pre.mul(&delta_sq(j1, l2, l3));
    pre.mul(&delta_sq(l1, j2, l3));
    pre.mul(&delta_sq(l1, l2, j3));
    let alpha = [j1 + j2 + j3, j1 + l2 + l3, l1 + j2 + l3, l1 + l2 + j3].map(|x| x / 2);
    let beta = [j1 + j2 + l1 + l2, j2 + j3 + l2 + l3, j3 + j1 + l3 + l1].map(|x| x / 2);
    let kmin = *alpha.iter().max().unwrap();
    let kmax = *beta.iter().min().unwrap();
    let mut terms = Vec::new();
    for k in kmin..=kmax {
        let mut f = Factored::one();
        f.mul_factorial((k + 1) as u32, 1);
        for &a in &alpha {
            f.mul_factorial((k - a) as u32, -1);
        }
        for &b in &beta {
            f.mul_factorial((b - k) as u32, -1);
        }
        terms.push((k % 2 == 1, f));
    }
    finish(pre, terms, 1.0)
}
