//! Independent reference computations used by the integration tests.
//!
//! Everything here is deliberately naive: plain enumeration, exact rational
//! arithmetic and grid scans, sharing no code with the library paths they
//! check.
#![allow(dead_code)]

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub fn q(a: i64, b: i64) -> BigRational {
    BigRational::new(a.into(), b.into())
}

/// Every coefficient vector of length `n + 1` over `{±1, …, ±N}`.
pub fn all_vectors(n: usize, big_n: i64) -> Vec<Vec<i64>> {
    let digits: Vec<i64> = (-big_n..=big_n).filter(|&d| d != 0).collect();
    let mut out = vec![Vec::new()];
    for _ in 0..=n {
        out = out
            .into_iter()
            .flat_map(|v| {
                digits.iter().map(move |&d| {
                    let mut w = v.clone();
                    w.push(d);
                    w
                })
            })
            .collect();
    }
    out
}

/// Counts of `(Σ aᵢξᵢ, Σ bᵢξᵢ)` over all coefficient vectors, where
/// `(aᵢ, bᵢ) = w(i)`, by depth-first enumeration.
pub fn joint_counts(n: usize, big_n: i64, w: impl Fn(usize) -> (i64, i64)) -> HashMap<(i64, i64), u64> {
    fn go(
        i: usize,
        n: usize,
        big_n: i64,
        s: i64,
        t: i64,
        w: &dyn Fn(usize) -> (i64, i64),
        out: &mut HashMap<(i64, i64), u64>,
    ) {
        if i > n {
            *out.entry((s, t)).or_default() += 1;
            return;
        }
        let (a, b) = w(i);
        for d in (-big_n..=big_n).filter(|&d| d != 0) {
            go(i + 1, n, big_n, s + a * d, t + b * d, w, out);
        }
    }
    let mut out = HashMap::new();
    go(0, n, big_n, 0, 0, &w, &mut out);
    out
}

pub fn sign_alt(i: usize) -> i64 {
    if i % 2 == 0 {
        1
    } else {
        -1
    }
}

fn eval_exact(c: &[i64], x: &BigRational) -> BigRational {
    c.iter()
        .rev()
        .fold(BigRational::zero(), |acc, &ci| acc * x + BigRational::from_integer(ci.into()))
}

/// Sign of `P(x)`, from floating point when the rounding bound allows and
/// exactly otherwise.
fn sign_at(c: &[i64], num: i64, den_log2: u32) -> i32 {
    let x = num as f64 / (1u64 << den_log2) as f64;
    let (mut v, mut m) = (0.0f64, 0.0f64);
    for &ci in c.iter().rev() {
        v = v * x + ci as f64;
        m = m * x.abs() + (ci as f64).abs();
    }
    let n = c.len() as f64;
    let bound = 4.0 * n * f64::EPSILON * m;
    if v.abs() > bound {
        return if v > 0.0 { 1 } else { -1 };
    }
    let xr = BigRational::new(num.into(), BigInt::one() << den_log2);
    let e = eval_exact(c, &xr);
    if e.is_zero() {
        0
    } else if e.is_positive() {
        1
    } else {
        -1
    }
}

/// Distinct real roots of an integer polynomial seen by a grid scan of
/// `[−R, R]` with step `2^−log2_step`: grid zeros plus sign changes
/// between consecutive nonzero grid values with no grid zero in between.
/// Exact when every root lies inside the window and no cell holds two.
pub fn dense_scan_count(c: &[i64], radius: i64, log2_step: u32) -> usize {
    let lim = radius << log2_step;
    let mut roots = 0;
    let mut prev: Option<i32> = None;
    let mut zero_between = false;
    for k in -lim..=lim {
        let s = sign_at(c, k, log2_step);
        if s == 0 {
            roots += 1;
            zero_between = true;
            continue;
        }
        if let Some(p) = prev {
            if p != s && !zero_between {
                roots += 1;
            }
        }
        prev = Some(s);
        zero_between = false;
    }
    roots
}

/// `P(|Σ ξᵢ xⁱ| ≤ δ)` by full enumeration.
pub fn brute_smallball(n: usize, big_n: i64, x: &BigRational, delta: &BigRational) -> BigRational {
    let vs = all_vectors(n, big_n);
    let hits = vs.iter().filter(|c| eval_exact(c, x).abs() <= *delta).count();
    BigRational::new(hits.into(), vs.len().into())
}

/// Minimal gap of `{Σⱼ εⱼ x^{mⱼ} : εⱼ ∈ digits}` by exact sorting.
pub fn brute_min_gap(x: &BigRational, exponents: &[u32], digits: &[i64]) -> BigRational {
    let mut vals = vec![BigRational::zero()];
    for &m in exponents {
        let p = num_traits::pow(x.clone(), m as usize);
        vals = vals
            .iter()
            .flat_map(|v| digits.iter().map(|&d| v + &p * BigRational::from_integer(d.into())).collect::<Vec<_>>())
            .collect();
    }
    vals.sort();
    vals.windows(2).map(|w| &w[1] - &w[0]).min().expect("at least two values")
}

/// Smallest `ℓ ≥ 1` with `x^ℓ < τ`.
pub fn smallest_power_below(x: &BigRational, tau: &BigRational) -> u32 {
    (1..).find(|&l| num_traits::pow(x.clone(), l as usize) < *tau).expect("x < 1")
}
