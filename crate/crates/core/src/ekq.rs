//! Real-zero density of Gaussian Kac polynomials and its integral.
//!
//! `ρₙ(t) = (1/π) √( 1/(t²−1)² − (n+1)² t²ⁿ/(t²ⁿ⁺²−1)² )`.
//!
//! Both terms blow up like `(1−t)⁻²` near `|t| = 1`. Writing `t² = e^{−L}`
//! the radicand becomes
//! `(e^L/4) [ g(L/2) + (4/L²) h((n+1)L/2) ]` with
//! `g(y) = 1/sinh²y − 1/y²` and `h(z) = 1 − z²/sinh²z`, both smooth and free
//! of cancellation, which gives full relative precision up to `t = 1`.

use std::sync::OnceLock;

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Limit of `E N_n − (2/π) ln n` for Gaussian coefficients.
pub const C_GAU: f64 = 0.625738072;

/// Taylor coefficients of `g(y)` in powers of `y²`.
const G_SERIES: [f64; 13] = [
    -0.333_333_333_333_333_33,
    0.066_666_666_666_666_667,
    -0.010_582_010_582_010_582,
    0.001_481_481_481_481_481_5,
    -0.000_192_400_192_400_192_4,
    2.380_844_708_887_037e-5,
    -2.850_373_220_743_591e-6,
    3.332_191_318_496_952e-7,
    -3.826_333_907_857_529e-8,
    4.332_978_728_872_515e-9,
    -4.852_350_845_790_551e-10,
    5.384_692_568_559_723e-11,
    -5.930_254_350_058_414e-12,
];

/// `1/sinh²y − 1/y²`
fn g(y: f64) -> f64 {
    if y.abs() < 0.5 {
        let y2 = y * y;
        G_SERIES.iter().rev().fold(0.0, |acc, &c| acc * y2 + c)
    } else {
        let s = y.sinh();
        1.0 / (s * s) - 1.0 / (y * y)
    }
}

/// `1 − z²/sinh²z` for `z ≥ 0`.
fn h(z: f64) -> f64 {
    if z < 0.5 {
        -z * z * g(z)
    } else {
        let e = (-2.0 * z).exp();
        1.0 - 4.0 * z * z * e / ((1.0 - e) * (1.0 - e))
    }
}

/// Radicand `π² ρₙ(t)²` for `t ∈ [0, 1]`.
fn radicand_unit(n: u64, t: f64) -> f64 {
    let nf = n as f64;
    if t == 1.0 {
        return nf * (nf + 2.0) / 12.0;
    }
    if t < 0.5 {
        let t2 = t * t;
        let a = 1.0 / ((t2 - 1.0) * (t2 - 1.0));
        let tn = t2.powf(nf);
        let d = tn * t2 - 1.0;
        return a - (nf + 1.0) * (nf + 1.0) * tn / (d * d);
    }
    let l = -2.0 * t.ln();
    (l.exp() / 4.0) * (g(l / 2.0) + 4.0 / (l * l) * h((nf + 1.0) * l / 2.0))
}

/// `ρₙ(t)`, the expected number of real zeros per unit length at `t`.
///
/// The radicand is evaluated in a cancellation-free form; a negative value
/// closer than `10⁻³` to `|t| = 1` is treated as rounding and clamped, any
/// other negative value is reported.
pub fn ek_density(n: u64, t: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::invalid("degree must be at least 1"));
    }
    if t.is_nan() {
        return Err(Error::invalid("density argument is NaN"));
    }
    let a = t.abs();
    if a.is_infinite() {
        return Ok(0.0);
    }
    let (u, scale) = if a > 1.0 { (1.0 / a, 1.0 / (a * a)) } else { (a, 1.0) };
    let r = radicand_unit(n, u);
    if r < 0.0 {
        if (a - 1.0).abs() <= 1e-3 {
            return Ok(0.0);
        }
        return Err(Error::Numerical(format!("negative radicand {r:e} at t = {t}")));
    }
    Ok(scale * r.sqrt() / std::f64::consts::PI)
}

/// Quadrature value with an error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error_estimate: f64,
    pub subintervals: usize,
}

/// Integration range for [`ek_expected`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EkRange {
    WholeLine,
    /// `[a, b]`, endpoints may be infinite.
    Between(f64, f64),
}

const GL_ORDER: usize = 20;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
fn gauss_legendre() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| {
        let m = GL_ORDER;
        let mut out = Vec::with_capacity(m);
        for i in 0..m {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=m {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = m as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
        }
        out
    })
}

fn gl(n: u64, a: f64, b: f64) -> Result<f64> {
    let (c, r) = ((a + b) / 2.0, (b - a) / 2.0);
    let mut s = 0.0;
    for &(x, w) in gauss_legendre() {
        s += w * ek_density(n, c + r * x)?;
    }
    Ok(s * r)
}

/// Adaptive halving on one panel: accepts when the panel estimate and the
/// sum over its halves agree to `tol`.
fn adaptive(n: u64, a: f64, b: f64, tol: f64, depth: u32) -> Result<QuadResult> {
    let whole = gl(n, a, b)?;
    let m = (a + b) / 2.0;
    let (left, right) = (gl(n, a, m)?, gl(n, m, b)?);
    let diff = (left + right - whole).abs();
    if diff <= tol || depth == 0 {
        return Ok(QuadResult {
            value: left + right,
            error_estimate: diff,
            subintervals: 2,
        });
    }
    let l = adaptive(n, a, m, tol / 2.0, depth - 1)?;
    let r = adaptive(n, m, b, tol / 2.0, depth - 1)?;
    Ok(QuadResult {
        value: l.value + r.value,
        error_estimate: l.error_estimate + r.error_estimate,
        subintervals: l.subintervals + r.subintervals,
    })
}

/// `∫_α^β ρₙ` for `0 ≤ α ≤ β ≤ 1`, with panels graded geometrically
/// toward 1 where the density peaks on a `1/n` scale.
fn integrate_unit(n: u64, alpha: f64, beta: f64, tol: f64) -> Result<QuadResult> {
    let levels = ((n as f64 + 1.0).log2().ceil() as i32 + 8).min(60);
    let mut pts = vec![alpha];
    pts.extend(
        (1..=levels)
            .map(|j| 1.0 - 0.5f64.powi(j))
            .filter(|&p| p > alpha && p < beta),
    );
    pts.push(beta);
    let panels: Vec<(f64, f64)> = pts.windows(2).map(|w| (w[0], w[1])).filter(|(a, b)| b > a).collect();
    let parts: Vec<Result<QuadResult>> = panels
        .par_iter()
        .map(|&(a, b)| adaptive(n, a, b, tol, 30))
        .collect();
    let mut total = QuadResult { value: 0.0, error_estimate: 0.0, subintervals: 0 };
    for p in parts {
        let p = p?;
        total.value += p.value;
        total.error_estimate += p.error_estimate;
        total.subintervals += p.subintervals;
    }
    Ok(total)
}

fn add(a: QuadResult, b: QuadResult, scale: f64) -> QuadResult {
    QuadResult {
        value: a.value + scale * b.value,
        error_estimate: a.error_estimate + scale * b.error_estimate,
        subintervals: a.subintervals + b.subintervals,
    }
}

/// `∫_a^b ρₙ` for `0 ≤ a ≤ b ≤ ∞`, folding `[1, ∞]` onto `[0, 1]` by
/// `t ↦ 1/t`.
fn integrate_nonneg(n: u64, a: f64, b: f64, tol: f64) -> Result<QuadResult> {
    let zero = QuadResult { value: 0.0, error_estimate: 0.0, subintervals: 0 };
    let mut acc = zero;
    if a < 1.0 {
        acc = add(acc, integrate_unit(n, a, b.min(1.0), tol)?, 1.0);
    }
    if b > 1.0 {
        let lo = 1.0 / b;
        let hi = 1.0 / a.max(1.0);
        acc = add(acc, integrate_unit(n, lo, hi, tol)?, 1.0);
    }
    Ok(acc)
}

/// Default per-panel tolerance of the adaptive rule.
pub const DEFAULT_TOLERANCE: f64 = 1e-14;

/// Expected number of real zeros of a degree-`n` Gaussian Kac polynomial in
/// `range`.
pub fn ek_expected(n: u64, range: EkRange) -> Result<QuadResult> {
    ek_expected_with_tolerance(n, range, DEFAULT_TOLERANCE)
}

/// [`ek_expected`] with an explicit per-panel tolerance.
pub fn ek_expected_with_tolerance(n: u64, range: EkRange, tol: f64) -> Result<QuadResult> {
    if n == 0 {
        return Err(Error::invalid("degree must be at least 1"));
    }
    if !(tol > 0.0) {
        return Err(Error::invalid("tolerance must be positive"));
    }
    let zero = QuadResult { value: 0.0, error_estimate: 0.0, subintervals: 0 };
    match range {
        EkRange::WholeLine => {
            // ρ is even and ∫₁^∞ ρ = ∫₀¹ ρ.
            let unit = integrate_unit(n, 0.0, 1.0, tol)?;
            Ok(add(zero, unit, 4.0))
        }
        EkRange::Between(a, b) => {
            if a.is_nan() || b.is_nan() || a > b {
                return Err(Error::invalid("interval must satisfy a ≤ b"));
            }
            let mut acc = zero;
            if a < 0.0 {
                acc = add(acc, integrate_nonneg(n, (-b).max(0.0), -a, tol)?, 1.0);
            }
            if b > 0.0 {
                acc = add(acc, integrate_nonneg(n, a.max(0.0), b, tol)?, 1.0);
            }
            Ok(acc)
        }
    }
}

/// `E N_n − (2/π) ln n`.
pub fn ek_residual(n: u64) -> Result<f64> {
    let e = ek_expected(n, EkRange::WholeLine)?;
    Ok(e.value - 2.0 / std::f64::consts::PI * (n as f64).ln())
}

/// `(∫₀^{1−1/C₀} dt/(π(1−t²)), C_GAU/4 − that integral)`.
pub fn ek_limit_tail(c0: f64) -> Result<(f64, f64)> {
    if !(c0 > 1.0) {
        return Err(Error::invalid("C0 must exceed 1"));
    }
    let integral = (1.0 - 1.0 / c0).atanh() / std::f64::consts::PI;
    Ok((integral, C_GAU / 4.0 - integral))
}

/// One row of a degree sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EkRow {
    pub n: u64,
    pub expected: f64,
    pub quad_error: f64,
    pub residual: f64,
}

pub fn ek_sweep(ns: &[u64]) -> Result<Vec<EkRow>> {
    ns.iter()
        .map(|&n| {
            let e = ek_expected(n, EkRange::WholeLine)?;
            Ok(EkRow {
                n,
                expected: e.value,
                quad_error: e.error_estimate,
                residual: e.value - 2.0 / std::f64::consts::PI * (n as f64).ln(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn naive(n: u64, t: f64) -> f64 {
        let nf = n as f64;
        let t2 = t * t;
        let f = 1.0 / ((t2 - 1.0) * (t2 - 1.0))
            - (nf + 1.0).powi(2) * t2.powf(nf) / (t2.powf(nf + 1.0) - 1.0).powi(2);
        f.sqrt() / PI
    }

    #[test]
    fn series_matches_direct_g() {
        for y in [0.3f64, 0.45, 0.499] {
            let s = y.sinh();
            let direct = 1.0 / (s * s) - 1.0 / (y * y);
            assert!((g(y) - direct).abs() < 1e-12 * direct.abs().max(1.0) * 1e2);
        }
    }

    #[test]
    fn stable_form_matches_naive_away_from_one() {
        for n in [1, 3, 10, 40] {
            for t in [0.55, 0.7, 0.9, 0.97] {
                let a = ek_density(n, t).unwrap();
                let b = naive(n, t);
                assert!((a - b).abs() <= 1e-9 * b, "n={n} t={t}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn gauss_rule_integrates_polynomials() {
        let s: f64 = gauss_legendre().iter().map(|&(x, w)| w * x.powi(38)).sum();
        assert!((s - 2.0 / 39.0).abs() < 1e-14);
    }
}
