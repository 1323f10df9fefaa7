//! `P(|Σ ξᵢ xⁱ| ≤ δ)` by meet-in-the-middle over exact scaled integers.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Largest half-enumeration size, `(2N)^{⌈(n+1)/2⌉}`.
pub const MITM_MAX_HALF: u64 = 1 << 26;

/// All sums `Σ ξᵢ cᵢ` over `ξᵢ ∈ {±1, …, ±N}`.
fn half_sums<T>(coeffs: &[T], big_n: i64) -> Vec<T>
where
    T: Clone + std::ops::Add<Output = T> + std::ops::Mul<Output = T> + From<i64>,
{
    let mut sums = vec![T::from(0)];
    for c in coeffs {
        let mut next = Vec::with_capacity(sums.len() * 2 * big_n as usize);
        for s in &sums {
            for xi in (-big_n..=big_n).filter(|&v| v != 0) {
                next.push(s.clone() + c.clone() * T::from(xi));
            }
        }
        sums = next;
    }
    sums
}

/// Number of pairs `(a, b)` with `|a + b| ≤ d`, both inputs sorted.
fn window_pairs<T: Ord + Clone + std::ops::Add<Output = T>>(a: &[T], b: &[T], d: &T, neg_d: &T) -> u64 {
    // For ascending a the admissible b range [−d − a, d − a] moves left.
    let mut lo = b.len();
    let mut hi = b.len();
    let mut count = 0u64;
    for x in a {
        while lo > 0 && b[lo - 1].clone() + x.clone() >= *neg_d {
            lo -= 1;
        }
        while hi > 0 && b[hi - 1].clone() + x.clone() > *d {
            hi -= 1;
        }
        count += (hi.max(lo) - lo) as u64;
    }
    count
}

/// Exact `P(|Σ_{i=0}^n ξᵢ xⁱ| ≤ δ)` for `ξᵢ` uniform on `{±1, …, ±N}`.
pub fn smallball_prob(n: usize, big_n: u32, x: &BigRational, delta: &BigRational) -> Result<BigRational> {
    if big_n == 0 {
        return Err(Error::invalid("N must be at least 1"));
    }
    if delta.is_negative() {
        return Err(Error::invalid("delta must be nonnegative"));
    }
    let terms = n + 1;
    let half_b = terms / 2;
    let half_a = terms - half_b;
    let base = 2 * big_n as u64;
    let half_size = (base as f64).powi(half_a as i32);
    if half_size > MITM_MAX_HALF as f64 {
        return Err(Error::resource(format!(
            "meet-in-the-middle half has (2N)^{half_a} ≈ {half_size:.3e} sums (limit {MITM_MAX_HALF})"
        )));
    }
    // Scale by q^n: coefficient i becomes p^i q^{n−i}; compare |S| q_δ ≤ p_δ q^n.
    let (p, q) = (x.numer().clone(), x.denom().clone());
    let scaled: Vec<BigInt> = (0..terms)
        .map(|i| p.pow(i as u32) * q.pow((n - i) as u32))
        .collect();
    let d = delta.numer() * q.pow(n as u32);
    let dq = delta.denom().clone();
    // |S| ≤ d / dq  ⟺  |S · dq| ≤ d.
    let scaled: Vec<BigInt> = scaled.into_iter().map(|c| c * &dq).collect();
    let bound: BigInt = scaled.iter().map(|c| c.abs()).sum::<BigInt>() * BigInt::from(big_n) + d.abs();
    let (ca, cb) = scaled.split_at(half_a);
    let bn = big_n as i64;
    let count = if bound.bits() < 126 {
        let ca: Vec<i128> = ca.iter().map(|c| c.to_i128().unwrap()).collect();
        let cb: Vec<i128> = cb.iter().map(|c| c.to_i128().unwrap()).collect();
        let mut sa = half_sums(&ca, bn);
        let mut sb = half_sums(&cb, bn);
        sa.sort_unstable();
        sb.sort_unstable();
        let d = d.to_i128().unwrap();
        window_pairs(&sa, &sb, &d, &-d)
    } else {
        let mut sa = half_sums(ca, bn);
        let mut sb = half_sums(cb, bn);
        sa.sort_unstable();
        sb.sort_unstable();
        window_pairs(&sa, &sb, &d, &-d.clone())
    };
    let total = BigUint::from(base).pow(terms as u32);
    let p = BigRational::new(BigInt::from(count), total.into());
    debug_assert!(p <= BigRational::one() && !p.is_negative() || p.is_zero());
    Ok(p)
}
