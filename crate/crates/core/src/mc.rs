//! Deterministic parallel Monte Carlo over random polynomials.
//!
//! Trial `j` at degree `n` draws its coefficients from the counter-based
//! stream `(derive_seed(seed, n), j)`, so a trial is the same polynomial on
//! every worker. Per-trial outcomes are collected in trial order and reduced
//! sequentially (integer counts are summed exactly), which makes every summary
//! independent of the thread count.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::atom::{sample_poly, Atom};
use crate::error::{Error, Result};
use crate::exact::{double_root_prob_exact, DoubleRootResult};
use crate::poly::RandomPoly;
use crate::rng::RngSpec;
use crate::roots::{self, Interval, Method};

/// `(4/π)(1 − 2/π)`, the variance-to-`ln n` limit.
pub const VARIANCE_CONSTANT: f64 = 4.0 / PI * (1.0 - 2.0 / PI);

/// Width to which roots are refined when gaps are collected.
const GAP_WIDTH_LOG2: u32 = 40;

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub atom: Atom,
    /// Sorted, nonempty.
    pub degrees: Vec<usize>,
    pub trials: u64,
    pub seed: u64,
    /// Count roots in this interval only (whole line if `None`).
    pub interval: Option<Interval<BigRational>>,
    /// Near-double threshold exponent: `|P|, |P′| ≤ n^{−B}`.
    pub b: f64,
    /// `I₀ = (1/(N+1), 1 − n^{−2+ε}]`.
    pub epsilon: f64,
    pub collect_gaps: bool,
    pub collect_near_double: bool,
    pub method: Method,
}

impl SimConfig {
    pub fn new(atom: Atom, degrees: Vec<usize>, trials: u64, seed: u64) -> Self {
        Self {
            atom,
            degrees,
            trials,
            seed,
            interval: None,
            b: 16.0,
            epsilon: 0.125,
            collect_gaps: false,
            collect_near_double: false,
            method: Method::Auto,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::invalid("at least one trial per degree is required"));
        }
        if self.degrees.is_empty() {
            return Err(Error::invalid("no degrees requested"));
        }
        if self.degrees.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("degrees must be strictly increasing"));
        }
        if self.degrees[0] == 0 {
            return Err(Error::invalid("degree 0 polynomials have no roots to count"));
        }
        if !(self.b > 0.0) {
            return Err(Error::invalid("B must be positive"));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 2.0) {
            return Err(Error::invalid("epsilon must lie in (0, 2)"));
        }
        Ok(())
    }
}

/// Per-degree aggregate.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeSummary {
    pub n: usize,
    /// Trials that entered the statistics.
    pub trials: u64,
    /// Trials dropped after a certification failure.
    pub excluded: u64,
    pub mean: f64,
    /// Unbiased sample variance.
    pub variance: f64,
    /// Jackknife standard error of `variance`.
    pub variance_se: f64,
    /// `mean − (2/π) ln n`.
    pub residual: f64,
    /// `1.96 √(variance / trials)`.
    pub ci_half_width: f64,
    pub near_double_freq: Option<f64>,
    pub min_gap_p01: Option<f64>,
    pub min_gap_p50: Option<f64>,
    /// Seed of this degree's trial streams.
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimSummary {
    pub seed: u64,
    pub rows: Vec<DegreeSummary>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Trial {
    count: Option<u32>,
    min_gap: Option<f64>,
    near_double: bool,
}

/// `I₀ = (1/(N+1), 1 − n^{−2+ε}]`, with `N = 1` for atoms that are not Type I.
pub fn bulk_interval(n: usize, big_n: u32, epsilon: f64) -> Interval<BigRational> {
    let lo = BigRational::new(BigInt::from(1), BigInt::from(big_n as u64 + 1));
    let hi = 1.0 - (n as f64).powf(-2.0 + epsilon);
    let hi = BigRational::from_float(hi).unwrap_or_else(|| lo.clone());
    Interval::open_closed(lo, hi)
}

fn is_certification(e: &Error) -> bool {
    matches!(e, Error::Certification { .. })
}

fn run_trial(cfg: &SimConfig, n: usize, seed: u64, j: u64, i0: &Interval<BigRational>) -> Result<Trial> {
    let p = sample_poly(&cfg.atom, n, &mut RngSpec::new(seed, j));
    let interval = cfg.interval.as_ref();
    let outcome = (|| -> Result<Trial> {
        let (count, min_gap) = if cfg.collect_gaps {
            let width = BigRational::new(BigInt::from(1), BigInt::from(1u64) << GAP_WIDTH_LOG2);
            let report = roots::isolate_and_refine_with(&p, interval, &width, cfg.method)?;
            (report.distinct_count, report.min_gap)
        } else {
            (roots::count_real_roots_with(&p, interval, cfg.method)?, None)
        };
        let near_double = cfg.collect_near_double && !roots::near_double_scan(&p, cfg.b, Some(i0))?.is_empty();
        Ok(Trial { count: Some(count as u32), min_gap, near_double })
    })();
    match outcome {
        Err(e) if is_certification(&e) => Ok(Trial { count: None, min_gap: None, near_double: false }),
        other => other,
    }
}

/// Nearest-rank quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> Option<f64> {
    if sorted.is_empty() {
        return None;
    }
    let rank = (q * sorted.len() as f64).ceil().max(1.0) as usize;
    Some(sorted[rank.min(sorted.len()) - 1])
}

/// Mean and unbiased variance from exact integer sums.
fn moments(m: u64, s1: u64, s2: u128) -> (f64, f64) {
    if m == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = s1 as f64 / m as f64;
    if m == 1 {
        return (mean, 0.0);
    }
    // m·s2 − s1² is an exact integer, so the variance is rounded once.
    let num = BigInt::from(m) * BigInt::from(s2) - BigInt::from(s1) * BigInt::from(s1);
    let den = BigInt::from(m) * BigInt::from(m - 1);
    let var = BigRational::new(num, den).to_f64().unwrap_or(f64::NAN);
    (mean, var)
}

fn run_degree(cfg: &SimConfig, n: usize) -> Result<DegreeSummary> {
    let seed = RngSpec::derive_seed(cfg.seed, n as u64);
    let big_n = cfg.atom.type_i_n().unwrap_or(1);
    let i0 = bulk_interval(n, big_n, cfg.epsilon);
    let trials: Vec<Trial> = (0..cfg.trials)
        .into_par_iter()
        .map(|j| run_trial(cfg, n, seed, j, &i0))
        .collect::<Result<_>>()?;

    let counts: Vec<u32> = trials.iter().filter_map(|t| t.count).collect();
    let m = counts.len() as u64;
    let s1: u64 = counts.iter().map(|&c| c as u64).sum();
    let s2: u128 = counts.iter().map(|&c| (c as u128) * (c as u128)).sum();
    let (mean, variance) = moments(m, s1, s2);
    let near = trials.iter().filter(|t| t.count.is_some() && t.near_double).count();
    let mut gaps: Vec<f64> = trials.iter().filter_map(|t| t.min_gap).collect();
    gaps.sort_by(f64::total_cmp);

    Ok(DegreeSummary {
        n,
        trials: m,
        excluded: cfg.trials - m,
        mean,
        variance,
        variance_se: jackknife_variance_se(&counts),
        residual: mean - 2.0 / PI * (n as f64).ln(),
        ci_half_width: 1.96 * (variance / m as f64).sqrt(),
        near_double_freq: cfg.collect_near_double.then(|| near as f64 / m as f64),
        min_gap_p01: if cfg.collect_gaps { quantile(&gaps, 0.01) } else { None },
        min_gap_p50: if cfg.collect_gaps { quantile(&gaps, 0.5) } else { None },
        seed,
    })
}

/// Mean, variance, residual and optional gap / near-double statistics of the
/// real-root count for every configured degree.
pub fn run_expectation(cfg: &SimConfig) -> Result<SimSummary> {
    cfg.validate()?;
    let rows = cfg
        .degrees
        .iter()
        .map(|&n| run_degree(cfg, n))
        .collect::<Result<_>>()?;
    Ok(SimSummary { seed: cfg.seed, rows })
}

#[derive(Debug, Clone, PartialEq)]
pub struct VarianceRatio {
    pub n: usize,
    pub trials: u64,
    pub variance: f64,
    /// `variance / ln n`.
    pub ratio: f64,
    /// Jackknife standard error of `ratio`.
    pub jackknife_se: f64,
}

/// Leave-one-out jackknife standard error of the sample variance.
fn jackknife_variance_se(counts: &[u32]) -> f64 {
    let m = counts.len();
    if m < 3 {
        return f64::NAN;
    }
    let s1: f64 = counts.iter().map(|&c| c as f64).sum();
    let s2: f64 = counts.iter().map(|&c| (c as f64).powi(2)).sum();
    let mf = m as f64;
    let loo: Vec<f64> = counts
        .iter()
        .map(|&c| {
            let c = c as f64;
            let a = s1 - c;
            (s2 - c * c - a * a / (mf - 1.0)) / (mf - 2.0)
        })
        .collect();
    let bar = loo.iter().sum::<f64>() / mf;
    let ss: f64 = loo.iter().map(|v| (v - bar).powi(2)).sum();
    ((mf - 1.0) / mf * ss).sqrt()
}

/// `Var(N_n) / ln n` per degree, with a jackknife error bar.
pub fn variance_ratio(cfg: &SimConfig) -> Result<Vec<VarianceRatio>> {
    cfg.validate()?;
    if cfg.degrees[0] < 2 {
        return Err(Error::invalid("ln n vanishes at n = 1"));
    }
    Ok(run_expectation(cfg)?.rows.iter().map(VarianceRatio::from_summary).collect())
}

impl VarianceRatio {
    pub fn from_summary(r: &DegreeSummary) -> Self {
        let ln = (r.n as f64).ln();
        VarianceRatio {
            n: r.n,
            trials: r.trials,
            variance: r.variance,
            ratio: r.variance / ln,
            jackknife_se: r.variance_se / ln,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualRow {
    pub n: usize,
    pub mean: f64,
    pub residual: f64,
    pub ci_half_width: f64,
}

/// `(n, mean, mean − (2/π) ln n, half-width)` per degree.
pub fn residual_curve(cfg: &SimConfig) -> Result<Vec<ResidualRow>> {
    Ok(run_expectation(cfg)?
        .rows
        .into_iter()
        .map(|r| ResidualRow { n: r.n, mean: r.mean, residual: r.residual, ci_half_width: r.ci_half_width })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruncationRecord {
    pub n: usize,
    pub m: usize,
    pub r: f64,
    pub trials: u64,
    pub excluded: u64,
    /// Mean of `|N_n(J) − N_m(J)|`.
    pub mean_abs_diff: f64,
    /// Fraction of trials with `N_n(J) ≠ N_m(J)`.
    pub mismatch_fraction: f64,
    /// Whether `m ≥ 4B r⁻¹ ln n`.
    pub precondition_met: bool,
    /// Whether `J ⊆ (0, 1 − r]`.
    pub interval_in_range: bool,
}

/// Root counts in `J` of `P_n` and of its literal truncation `P_m`.
#[allow(clippy::too_many_arguments)]
pub fn truncation_compare(
    atom: &Atom,
    n: usize,
    m: usize,
    r: f64,
    j: &Interval<BigRational>,
    trials: u64,
    seed: u64,
    b: f64,
) -> Result<TruncationRecord> {
    if trials == 0 {
        return Err(Error::invalid("at least one trial is required"));
    }
    if !(r > 1.0 / n as f64 && r < 1.0) {
        return Err(Error::invalid("r must lie in (1/n, 1)"));
    }
    if m == 0 || m > n {
        return Err(Error::invalid("truncation degree must lie in [1, n]"));
    }
    if !(b > 0.0) {
        return Err(Error::invalid("B must be positive"));
    }
    let edge = BigRational::from_float(1.0 - r).ok_or_else(|| Error::invalid("r is not finite"))?;
    let zero = BigRational::zero();
    let in_range = |bound: &std::ops::Bound<BigRational>, lower: bool| match bound {
        std::ops::Bound::Unbounded => false,
        std::ops::Bound::Included(v) => if lower { *v > zero } else { *v <= edge },
        std::ops::Bound::Excluded(v) => if lower { *v >= zero } else { *v <= edge },
    };
    let interval_in_range = in_range(&j.lo, true) && in_range(&j.hi, false);

    let seed = RngSpec::derive_seed(seed, n as u64);
    let diffs: Vec<Option<u32>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let p = sample_poly(atom, n, &mut RngSpec::new(seed, t));
            let q = p.truncate(m);
            let counted = roots::count_real_roots(&p, Some(j))
                .and_then(|a| roots::count_real_roots(&q, Some(j)).map(|b| (a, b)));
            match counted {
                Ok((a, b)) => Ok(Some(a.abs_diff(b) as u32)),
                Err(e) if is_certification(&e) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<_>>()?;
    let used: Vec<u32> = diffs.iter().flatten().copied().collect();
    let k = used.len() as u64;
    let total: u64 = used.iter().map(|&d| d as u64).sum();
    let mismatched = used.iter().filter(|&&d| d > 0).count() as u64;
    Ok(TruncationRecord {
        n,
        m,
        r,
        trials: k,
        excluded: trials - k,
        mean_abs_diff: total as f64 / k as f64,
        mismatch_fraction: mismatched as f64 / k as f64,
        precondition_met: m as f64 >= 4.0 * b / r * (n as f64).ln(),
        interval_in_range,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct UniversalityRecord {
    pub n: usize,
    pub r: f64,
    pub a: DegreeSummary,
    pub b: DegreeSummary,
    /// `mean_a − mean_b`.
    pub difference: f64,
    /// `√(var_a/M_a + var_b/M_b)`.
    pub combined_se: f64,
}

/// `E N` on `(1 − r, 1)` for two atoms at the same degree.
///
/// Both runs use the same master seed, so identical atoms give identical
/// samples.
pub fn near_one_universality(
    atom_a: &Atom,
    atom_b: &Atom,
    n: usize,
    r: f64,
    trials: u64,
    seed: u64,
) -> Result<UniversalityRecord> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::invalid("r must lie in (0, 1)"));
    }
    let lo = BigRational::from_float(1.0 - r).ok_or_else(|| Error::invalid("r is not finite"))?;
    let run = |atom: &Atom| {
        let mut cfg = SimConfig::new(atom.clone(), vec![n], trials, seed);
        cfg.interval = Some(Interval::open(lo.clone(), BigRational::from_integer(1.into())));
        run_expectation(&cfg).map(|s| s.rows.into_iter().next().expect("one degree"))
    };
    let a = run(atom_a)?;
    let b = run(atom_b)?;
    let combined_se = (a.variance / a.trials as f64 + b.variance / b.trials as f64).sqrt();
    Ok(UniversalityRecord { n, r, difference: a.mean - b.mean, combined_se, a, b })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeMomentRow {
    pub n: usize,
    pub k: usize,
    pub trials: u64,
    /// Median of `|Σ C(i,k) ξᵢ|`.
    pub median: f64,
    /// Sample mean of `(Σ C(i,k) ξᵢ)²`.
    pub second_moment: f64,
    /// Standard error of `second_moment`.
    pub second_moment_se: f64,
    /// `σ² Σ C(i,k)²`.
    pub second_moment_exact: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeMomentRecord {
    pub rows: Vec<EdgeMomentRow>,
    /// Least-squares slope of `ln median` against `ln n` (needs two degrees).
    pub slope: Option<f64>,
}

fn big_to_f64(x: &BigInt) -> f64 {
    x.to_f64().unwrap_or(f64::INFINITY)
}

/// Magnitude of `Σᵢ C(i,k) ξᵢ` in exact integer arithmetic.
pub fn edge_moment_growth(
    atom: &Atom,
    degrees: &[usize],
    k: usize,
    trials: u64,
    seed: u64,
) -> Result<EdgeMomentRecord> {
    if !atom.is_discrete() {
        return Err(Error::invalid("edge moments need an integer-valued atom"));
    }
    if trials == 0 || degrees.is_empty() {
        return Err(Error::invalid("need at least one degree and one trial"));
    }
    let sigma2 = atom.moments().variance;
    let mut rows = Vec::with_capacity(degrees.len());
    for &n in degrees {
        if k > n {
            return Err(Error::invalid("k must not exceed n"));
        }
        // binom[i] = C(i, k) for i = 0..=n
        let mut binom = vec![BigInt::zero(); n + 1];
        binom[k] = BigInt::from(1);
        for i in k + 1..=n {
            binom[i] = &binom[i - 1] * BigInt::from(i) / BigInt::from(i - k);
        }
        let exact: BigInt = binom.iter().map(|c| c * c).sum();
        let seed_n = RngSpec::derive_seed(seed, n as u64);
        let mut sums: Vec<BigInt> = (0..trials)
            .into_par_iter()
            .map(|t| {
                let p = sample_poly(atom, n, &mut RngSpec::new(seed_n, t));
                let c = p.as_int().expect("discrete atom").coeffs();
                binom
                    .iter()
                    .zip(c)
                    .skip(k)
                    .map(|(b, &x)| b * BigInt::from(x))
                    .sum::<BigInt>()
                    .abs()
            })
            .collect();
        let sq: Vec<f64> = sums.iter().map(|s| big_to_f64(&(s * s))).collect();
        let mf = trials as f64;
        let mean_sq = sq.iter().sum::<f64>() / mf;
        let var_sq = if trials > 1 {
            sq.iter().map(|v| (v - mean_sq).powi(2)).sum::<f64>() / (mf - 1.0)
        } else {
            0.0
        };
        sums.sort();
        let median = if sums.len() % 2 == 1 {
            big_to_f64(&sums[sums.len() / 2])
        } else {
            let h = sums.len() / 2;
            (big_to_f64(&sums[h - 1]) + big_to_f64(&sums[h])) / 2.0
        };
        rows.push(EdgeMomentRow {
            n,
            k,
            trials,
            median,
            second_moment: mean_sq,
            second_moment_se: (var_sq / mf).sqrt(),
            second_moment_exact: sigma2 * big_to_f64(&exact),
        });
    }
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.median > 0.0)
        .map(|r| ((r.n as f64).ln(), r.median.ln()))
        .collect();
    let slope = (pts.len() >= 2).then(|| {
        let k = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        sxy / sxx
    });
    Ok(EdgeMomentRecord { rows, slope })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DoubleRootMcRecord {
    pub n: usize,
    pub big_n: u32,
    pub trials: u64,
    /// Trials with `P(1) = P′(1) = 0`.
    pub double_at_one: u64,
    /// Trials with `P(−1) = P′(−1) = 0`.
    pub double_at_minus_one: u64,
    /// Trials with a double root at `1` or `−1`.
    pub double_at_either: u64,
    /// Trials with a near-double event in `I₀` (when scanned).
    pub near_double: Option<u64>,
    pub freq_either: f64,
    pub ci_half_width: f64,
    /// Exact `P(double root at ±1)` when the lattice table fits.
    pub exact_p_union: Option<f64>,
}

/// `(P(1), P′(1), P(−1), P′(−1))` of an integer polynomial.
fn values_at_units(c: &[i64]) -> [i128; 4] {
    let mut v = [0i128; 4];
    for (i, &x) in c.iter().enumerate() {
        let x = x as i128;
        let s = if i % 2 == 0 { x } else { -x };
        v[0] += x;
        v[1] += i as i128 * x;
        v[2] += s;
        v[3] -= i as i128 * s;
    }
    v
}

/// Empirical frequency of exact double roots at `±1` and, when `scan` is
/// set, of near-double events in `I₀`.
pub fn double_root_mc(
    n: usize,
    big_n: u32,
    trials: u64,
    seed: u64,
    scan: Option<(f64, f64)>,
) -> Result<DoubleRootMcRecord> {
    if trials == 0 || n == 0 {
        return Err(Error::invalid("need n ≥ 1 and at least one trial"));
    }
    let atom = Atom::type_i(big_n)?;
    let seed_n = RngSpec::derive_seed(seed, n as u64);
    let i0 = scan.map(|(_, eps)| bulk_interval(n, big_n, eps));
    let per_trial: Vec<(bool, bool, bool)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let p = sample_poly(&atom, n, &mut RngSpec::new(seed_n, t));
            let v = values_at_units(p.as_int().expect("Type I").coeffs());
            let near = match (&scan, &i0) {
                (Some((b, _)), Some(i0)) => !roots::near_double_scan(&p, *b, Some(i0))?.is_empty(),
                _ => false,
            };
            Ok((v[0] == 0 && v[1] == 0, v[2] == 0 && v[3] == 0, near))
        })
        .collect::<Result<_>>()?;
    let one = per_trial.iter().filter(|t| t.0).count() as u64;
    let minus = per_trial.iter().filter(|t| t.1).count() as u64;
    let either = per_trial.iter().filter(|t| t.0 || t.1).count() as u64;
    let near = scan.map(|_| per_trial.iter().filter(|t| t.2).count() as u64);
    let f = either as f64 / trials as f64;
    let exact_p_union = match double_root_prob_exact(n, big_n) {
        Ok(DoubleRootResult { p_union, .. }) => p_union.to_f64(),
        Err(Error::ResourceLimit(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(DoubleRootMcRecord {
        n,
        big_n,
        trials,
        double_at_one: one,
        double_at_minus_one: minus,
        double_at_either: either,
        near_double: near,
        freq_either: f,
        ci_half_width: 1.96 * (f * (1.0 - f) / trials as f64).sqrt(),
        exact_p_union,
    })
}

/// Random polynomial for trial `j` of degree `n` in a run seeded by `seed`.
pub fn trial_poly(atom: &Atom, n: usize, seed: u64, j: u64) -> RandomPoly {
    sample_poly(atom, n, &mut RngSpec::new(RngSpec::derive_seed(seed, n as u64), j))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pool(threads: usize) -> rayon::ThreadPool {
        rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap()
    }

    #[test]
    fn degree_one_gaussian_has_one_root() {
        let s = run_expectation(&SimConfig::new(Atom::gaussian(), vec![1], 200, 3)).unwrap();
        assert_eq!(s.rows[0].mean, 1.0);
        assert_eq!(s.rows[0].variance, 0.0);
        assert_eq!(s.rows[0].ci_half_width, 0.0);
    }

    #[test]
    fn quadratic_bernoulli_mean() {
        // Two roots iff ξ₀ξ₂ = −1: E N = 1.
        let s = run_expectation(&SimConfig::new(Atom::bernoulli(), vec![2], 20000, 5)).unwrap();
        let r = &s.rows[0];
        assert!((r.mean - 1.0).abs() < r.ci_half_width * 1.5, "{r:?}");
        assert!((r.variance - 1.0).abs() < 0.05);
        assert_eq!(r.excluded, 0);
    }

    #[test]
    fn summary_invariants() {
        let mut cfg = SimConfig::new(Atom::uniform(), vec![5, 20], 300, 8);
        cfg.collect_gaps = true;
        let s = run_expectation(&cfg).unwrap();
        for r in &s.rows {
            assert_eq!(r.ci_half_width, 1.96 * (r.variance / r.trials as f64).sqrt());
            assert_eq!(r.residual, r.mean - 2.0 / PI * (r.n as f64).ln());
            assert!(r.min_gap_p01.unwrap() <= r.min_gap_p50.unwrap());
        }
    }

    #[test]
    fn worker_count_does_not_matter() {
        let mut cfg = SimConfig::new(Atom::gaussian(), vec![10, 100], 200, 99);
        cfg.collect_gaps = true;
        let a = pool(1).install(|| run_expectation(&cfg)).unwrap();
        let b = pool(4).install(|| run_expectation(&cfg)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn moments_are_exact() {
        assert_eq!(moments(4, 6, 14), (1.5, 5.0 / 3.0));
        assert_eq!(moments(1, 3, 9), (3.0, 0.0));
    }

    #[test]
    fn jackknife_of_constant_is_zero() {
        assert_eq!(jackknife_variance_se(&[2; 10]), 0.0);
        assert!(jackknife_variance_se(&[0, 1, 2, 3, 4]) > 0.0);
    }

    #[test]
    fn quantiles() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile(&v, 0.5), Some(2.0));
        assert_eq!(quantile(&v, 0.01), Some(1.0));
        assert_eq!(quantile(&[], 0.5), None);
    }

    #[test]
    fn full_truncation_is_exact() {
        let j = Interval::open_closed(BigRational::zero(), BigRational::new(1.into(), 2.into()));
        let rec = truncation_compare(&Atom::bernoulli(), 60, 60, 0.5, &j, 50, 1, 16.0).unwrap();
        assert_eq!(rec.mean_abs_diff, 0.0);
        assert_eq!(rec.mismatch_fraction, 0.0);
        assert!(rec.interval_in_range);
        assert!(!rec.precondition_met);
    }

    #[test]
    fn identical_atoms_agree_near_one() {
        let rec = near_one_universality(&Atom::bernoulli(), &Atom::bernoulli(), 30, 0.25, 100, 4).unwrap();
        assert_eq!(rec.difference, 0.0);
    }

    #[test]
    fn edge_moments_match_second_moment() {
        let rec = edge_moment_growth(&Atom::bernoulli(), &[20, 40], 1, 2000, 6).unwrap();
        for r in &rec.rows {
            assert!((r.second_moment - r.second_moment_exact).abs() < 5.0 * r.second_moment_se, "{r:?}");
        }
        assert!(rec.slope.is_some());
    }

    #[test]
    fn units_values() {
        // 1 − 2x + x²: double root at 1.
        assert_eq!(values_at_units(&[1, -2, 1]), [0, 0, 4, -4]);
    }

    #[test]
    fn cubic_double_roots() {
        let rec = double_root_mc(3, 1, 4000, 2, None).unwrap();
        assert_eq!(rec.exact_p_union, Some(0.25));
        assert!((rec.freq_either - 0.25).abs() < 0.03);
        let rec = double_root_mc(9, 1, 2000, 2, None).unwrap();
        assert_eq!(rec.double_at_either, 0);
    }
}
