//! Separation of lacunary sign sums `Σ εⱼ x^{mⱼ}`.
//!
//! The value set is enumerated in double precision with a rigorous error
//! bound `E` per value. If every adjacent pair in the sorted list is more
//! than `2E` apart the float order is the true order, and only pairs whose
//! float gap is within `4E` of the smallest one are recomputed exactly.
//! Otherwise all values are recomputed as exact integers and sorted.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::to_f64;
use crate::error::{Error, Result};

/// `ℓ` and `k` of the lacunary construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LacunaryParams {
    pub ell: u32,
    pub k: u32,
}

fn pow(x: &BigRational, e: u32) -> BigRational {
    num_traits::pow(x.clone(), e as usize)
}

/// Threshold `τ` with `x^ℓ < τ ≤ x^{ℓ−1}`: `1/2` for `N = 1`,
/// `1/(2N+1)` otherwise.
fn ell_threshold(big_n: u32) -> BigRational {
    let d = if big_n == 1 { 2 } else { 2 * big_n as i64 + 1 };
    BigRational::new(1.into(), d.into())
}

fn ell_for(x: &BigRational, big_n: u32) -> u32 {
    let tau = ell_threshold(big_n);
    let mut ell = 1;
    let mut p = x.clone();
    while p >= tau {
        p *= x;
        ell += 1;
    }
    ell
}

/// `ℓ` from `x^ℓ < τ ≤ x^{ℓ−1}` and the largest `k` with
/// `x^{ℓk} ≥ n^{−2A}`, both decided in exact arithmetic.
pub fn choose_lacunary_params(
    x: &BigRational,
    big_n: u32,
    a: &BigRational,
    n: u64,
) -> Result<LacunaryParams> {
    if big_n == 0 {
        return Err(Error::invalid("N must be at least 1"));
    }
    let lower = BigRational::new(1.into(), (big_n as i64 + 1).into());
    if !(*x > lower && *x < BigRational::one()) {
        return Err(Error::invalid(format!("x must lie in (1/{}, 1)", big_n + 1)));
    }
    if !a.is_positive() || n < 2 {
        return Err(Error::invalid("A must be positive and n at least 2"));
    }
    let ell = ell_for(x, big_n);
    // x^{ℓk} ≥ n^{−2A} with A = a/b  ⟺  x^{ℓkb} · n^{2a} ≥ 1.
    let (an, ad) = (
        a.numer().to_u32().ok_or_else(|| Error::invalid("A numerator too large"))?,
        a.denom().to_u32().ok_or_else(|| Error::invalid("A denominator too large"))?,
    );
    let n_pow = BigRational::from_integer(BigInt::from(n).pow(2 * an));
    let step = pow(x, ell * ad);
    let mut k = 0;
    let mut acc = n_pow;
    loop {
        let next = &acc * &step;
        if next < BigRational::one() {
            break;
        }
        acc = next;
        k += 1;
    }
    Ok(LacunaryParams { ell, k })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeparationVariant {
    /// `Σ_{j=1}^{k} εⱼ x^{jℓ}`, `εⱼ = ±1`, radius `2x^{kℓ}`.
    Claim1,
    /// `Σ_{j=0}^{k} ε x^{2j} + Σ_{j=0}^{⌊k/8⌋} ε x^{8j+1}`, `ε = ±1`,
    /// radius `x^{2k}/8`, for `1/2 < x < 1/2 + c₀`.
    Claim2,
    /// `Σ_{j=1}^{k} εⱼ x^{jℓ}`, `εⱼ ∈ {±1, …, ±N}`, radius `x^{kℓ}`.
    Uniform,
}

impl SeparationVariant {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "claim1" => Ok(Self::Claim1),
            "claim2" => Ok(Self::Claim2),
            "uniform" => Ok(Self::Uniform),
            _ => Err(Error::invalid(format!("unknown variant {s:?} (claim1, claim2, uniform)"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Claim1 => "claim1",
            Self::Claim2 => "claim2",
            Self::Uniform => "uniform",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeparationOptions {
    /// Width of the admissible window above `1/2` for [`SeparationVariant::Claim2`].
    pub c0: BigRational,
    /// Largest `k` for the two-sign variants.
    pub max_k: u32,
    /// Largest value-set size for the uniform variant.
    pub max_values: u64,
}

impl Default for SeparationOptions {
    fn default() -> Self {
        Self {
            c0: BigRational::new(1.into(), 50.into()),
            max_k: 22,
            max_values: 1 << 24,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeparationResult {
    pub variant: SeparationVariant,
    pub x: BigRational,
    pub ell: u32,
    pub k: u32,
    pub big_n: u32,
    /// Number of enumerated sign vectors.
    pub values: u64,
    /// Smallest distance between two values (absent on a precondition
    /// failure).
    pub min_gap: Option<BigRational>,
    pub bound: BigRational,
    pub pass: bool,
    /// Set when the check failed or was not applicable.
    pub reason: Option<String>,
    /// Whether the float ordering was certified (otherwise an exact sort
    /// was used).
    pub float_certified: bool,
}

struct Spec {
    exponents: Vec<u32>,
    digits: Vec<i64>,
    ell: u32,
    bound: BigRational,
}

/// Minimal gap of the value set `{Σ εⱼ x^{mⱼ}}` against the variant's
/// claimed radius.
pub fn separation_check(
    variant: SeparationVariant,
    x: &BigRational,
    big_n: u32,
    k: u32,
    opts: &SeparationOptions,
) -> Result<SeparationResult> {
    if big_n == 0 {
        return Err(Error::invalid("N must be at least 1"));
    }
    if k == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    let half = BigRational::new(1.into(), 2.into());
    let fail = |ell: u32, bound: BigRational, reason: String| SeparationResult {
        variant,
        x: x.clone(),
        ell,
        k,
        big_n,
        values: 0,
        min_gap: None,
        bound,
        pass: false,
        reason: Some(reason),
        float_certified: false,
    };
    let spec = match variant {
        SeparationVariant::Claim1 | SeparationVariant::Uniform => {
            let lower = BigRational::new(1.into(), (big_n as i64 + 1).into());
            let n_eff = if variant == SeparationVariant::Claim1 { 1 } else { big_n };
            if variant == SeparationVariant::Claim1 && big_n != 1 {
                return Ok(fail(0, BigRational::zero(), "claim1 is stated for N = 1".into()));
            }
            if !(*x > lower && *x < BigRational::one()) {
                return Ok(fail(0, BigRational::zero(), format!("x outside (1/{}, 1)", big_n + 1)));
            }
            let ell = ell_for(x, n_eff);
            let radius = pow(x, k * ell);
            let bound = if variant == SeparationVariant::Claim1 {
                radius * BigRational::from_integer(2.into())
            } else {
                radius
            };
            let digits: Vec<i64> = (-(n_eff as i64)..=n_eff as i64).filter(|&v| v != 0).collect();
            Spec {
                exponents: (1..=k).map(|j| j * ell).collect(),
                digits,
                ell,
                bound,
            }
        }
        SeparationVariant::Claim2 => {
            let bound = pow(x, 2 * k) / BigRational::from_integer(8.into());
            if big_n != 1 {
                return Ok(fail(2, bound, "claim2 is stated for N = 1".into()));
            }
            if !(*x > half && *x < &half + &opts.c0) {
                return Ok(fail(
                    2,
                    bound,
                    format!("x outside (1/2, 1/2 + c0) with c0 = {}", opts.c0),
                ));
            }
            let mut exponents: Vec<u32> = (0..=k).map(|j| 2 * j).collect();
            exponents.extend((0..=k / 8).map(|j| 8 * j + 1));
            Spec {
                exponents,
                digits: vec![-1, 1],
                ell: 2,
                bound,
            }
        }
    };
    let radix = spec.digits.len() as u64;
    let count = (radix as f64).powi(spec.exponents.len() as i32);
    let too_big = match variant {
        SeparationVariant::Uniform => count > opts.max_values as f64,
        _ => k > opts.max_k,
    };
    if too_big {
        return Err(Error::resource(format!(
            "{} sign vectors for {} at k = {k} exceed the enumeration guard",
            count,
            variant.name()
        )));
    }
    let (min_gap, float_certified) = min_gap(x, &spec)?;
    let pass = min_gap >= spec.bound;
    Ok(SeparationResult {
        variant,
        x: x.clone(),
        ell: spec.ell,
        k,
        big_n,
        values: count as u64,
        reason: (!pass).then(|| format!("min gap {} below bound {}", to_f64(&min_gap), to_f64(&spec.bound))),
        min_gap: Some(min_gap),
        bound: spec.bound,
        pass,
        float_certified,
    })
}

/// Mixed-radix index → digit per term (term 0 least significant).
fn decode(mut idx: u64, terms: usize, digits: &[i64]) -> Vec<i64> {
    let r = digits.len() as u64;
    (0..terms)
        .map(|_| {
            let d = digits[(idx % r) as usize];
            idx /= r;
            d
        })
        .collect()
}

/// Weights `p^{mⱼ} q^{M−mⱼ}`: a value times `q^M` is the integer `Σ εⱼ wⱼ`.
fn scaled_weights(x: &BigRational, spec: &Spec, max_m: u32) -> Vec<BigInt> {
    let (p, q) = (x.numer(), x.denom());
    spec.exponents.iter().map(|&m| p.pow(m) * q.pow(max_m - m)).collect()
}

fn scaled_value(w: &[BigInt], digits: &[i64], idx: u64) -> BigInt {
    decode(idx, w.len(), digits).iter().zip(w).map(|(&e, c)| c * BigInt::from(e)).sum()
}

fn min_gap(x: &BigRational, spec: &Spec) -> Result<(BigRational, bool)> {
    let terms = spec.exponents.len();
    let xf = to_f64(x);
    let u = f64::EPSILON / 2.0;
    // fl(x^m) by repeated multiplication: relative error ≤ γ_{m+1}.
    let max_m = *spec.exponents.iter().max().unwrap() as usize;
    let mut powers = vec![1.0f64; max_m + 1];
    for m in 1..=max_m {
        powers[m] = powers[m - 1] * xf;
    }
    let gamma = |k: usize| (k as f64 * u) / (1.0 - k as f64 * u);
    let dmax = spec.digits.iter().map(|d| d.abs()).max().unwrap() as f64;
    let mag: f64 = spec.exponents.iter().map(|&m| dmax * powers[m as usize]).sum();
    let err = 2.0 * (gamma(max_m + 2) + gamma(terms + 1)) * mag * 1.01;

    // values[idx] with term 0 least significant.
    let mut values = vec![0.0f64];
    for &m in spec.exponents.iter().rev() {
        let w = powers[m as usize];
        let mut next = Vec::with_capacity(values.len() * spec.digits.len());
        for v in &values {
            for &d in &spec.digits {
                next.push(v + d as f64 * w);
            }
        }
        values = next;
    }
    // Terms were added last to first, so term 0 is the least significant
    // digit of the position, matching `decode`.
    let mut order: Vec<(f64, u64)> = values
        .iter()
        .enumerate()
        .map(|(i, &v)| (v, i as u64))
        .collect();
    drop(values);
    order.sort_unstable_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let gaps: Vec<f64> = order.windows(2).map(|w| w[1].0 - w[0].0).collect();
    let certified = gaps.iter().all(|&g| g > 2.0 * err * 1.0001);
    let mm = max_m as u32;
    let w = scaled_weights(x, spec, mm);
    let scale = x.denom().pow(mm);
    if certified {
        let gmin = gaps.iter().copied().fold(f64::INFINITY, f64::min);
        // A gap depends only on the digit difference of the pair, and the
        // near-minimal pairs repeat a handful of differences many times.
        let mut seen = HashSet::new();
        let mut best: Option<BigInt> = None;
        for (i, &g) in gaps.iter().enumerate() {
            if g <= gmin + 4.0 * err * 1.0001 {
                let lo = decode(order[i].1, terms, &spec.digits);
                let hi = decode(order[i + 1].1, terms, &spec.digits);
                let diff: Vec<i64> = hi.iter().zip(&lo).map(|(a, b)| a - b).collect();
                if !seen.insert(diff.clone()) {
                    continue;
                }
                let d: BigInt = diff.iter().zip(&w).map(|(&e, c)| c * BigInt::from(e)).sum();
                if best.as_ref().is_none_or(|b| d < *b) {
                    best = Some(d);
                }
            }
        }
        return Ok((BigRational::new(best.expect("at least two values"), scale), true));
    }
    // Exact fallback over every value.
    let mut exact: Vec<BigInt> = (0..order.len() as u64).map(|idx| scaled_value(&w, &spec.digits, idx)).collect();
    exact.sort_unstable();
    let g = exact
        .windows(2)
        .map(|p| &p[1] - &p[0])
        .min()
        .expect("at least two values");
    Ok((BigRational::new(g, scale), false))
}
