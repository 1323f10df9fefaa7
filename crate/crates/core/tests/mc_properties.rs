mod common;

use common::*;
use kac_core::ekq::ek_residual;
use kac_core::mc::*;
use kac_core::roots::{count_real_roots_with, Interval, Method};
use kac_core::{Atom, IntPoly, RandomPoly};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use proptest::prelude::*;

fn pool(threads: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap()
}

/// `E N_n` for ±1 coefficients by enumerating every sign vector with
/// `ξ₀ = 1` (negating `P` leaves its roots unchanged).
fn exhaustive_expectation(n: usize, count: impl Fn(&[i64]) -> usize) -> f64 {
    let vs: Vec<Vec<i64>> = all_vectors(n, 1).into_iter().filter(|c| c[0] == 1).collect();
    let total: usize = vs.iter().map(|c| count(c)).sum();
    total as f64 / vs.len() as f64
}

#[test]
fn means_bracket_exhaustive_expectations() {
    let mut cfg = SimConfig::new(Atom::bernoulli(), vec![2, 5, 8, 11, 16], 4000, 2024);
    cfg.method = Method::Auto;
    let s = run_expectation(&cfg).unwrap();
    for r in &s.rows {
        let exact = if r.n <= 11 {
            exhaustive_expectation(r.n, |c| dense_scan_count(c, 2, 12))
        } else {
            exhaustive_expectation(r.n, |c| {
                count_real_roots_with(&RandomPoly::Int(IntPoly::new(c.to_vec())), None, Method::Float).unwrap()
            })
        };
        assert_eq!(r.excluded, 0);
        assert!(
            (r.mean - exact).abs() <= r.ci_half_width,
            "n={}: mean {} ± {} vs exact {exact}",
            r.n,
            r.mean,
            r.ci_half_width
        );
    }
}

#[test]
fn summaries_do_not_depend_on_worker_count() {
    let mut cfg = SimConfig::new(Atom::bernoulli(), vec![20, 100], 150, 7);
    cfg.collect_gaps = true;
    cfg.collect_near_double = true;
    let one = pool(1).install(|| run_expectation(&cfg)).unwrap();
    let three = pool(3).install(|| run_expectation(&cfg)).unwrap();
    assert_eq!(one, three);
    cfg.atom = Atom::gaussian();
    let one = pool(1).install(|| run_expectation(&cfg)).unwrap();
    let three = pool(3).install(|| run_expectation(&cfg)).unwrap();
    assert_eq!(one, three);
}

#[test]
fn positive_and_negative_halves_agree() {
    for atom in [Atom::gaussian(), Atom::bernoulli()] {
        let side = |lo: i64, hi: i64| {
            let mut cfg = SimConfig::new(atom.clone(), vec![30], 4000, 11);
            cfg.interval = Some(Interval::open(BigRational::from_integer(lo.into()), BigRational::from_integer(hi.into())));
            run_expectation(&cfg).unwrap().rows.remove(0)
        };
        let (pos, neg) = (side(0, 1), side(-1, 0));
        let combined = 1.96 * (pos.variance / pos.trials as f64 + neg.variance / neg.trials as f64).sqrt();
        assert!((pos.mean - neg.mean).abs() <= combined, "{}: {pos:?} {neg:?}", atom.label);
    }
}

#[test]
fn gaussian_residuals_match_quadrature() {
    let cfg = SimConfig::new(Atom::gaussian(), vec![10, 50, 200], 20000, 31);
    for r in residual_curve(&cfg).unwrap() {
        let want = ek_residual(r.n as u64).unwrap();
        assert!((r.residual - want).abs() <= r.ci_half_width, "n={}: {} vs {want} ± {}", r.n, r.residual, r.ci_half_width);
    }
}

#[test]
fn variance_ratio_uses_the_summary_variance() {
    let cfg = SimConfig::new(Atom::gaussian(), vec![16, 64], 2000, 3);
    let s = run_expectation(&cfg).unwrap();
    let v = variance_ratio(&cfg).unwrap();
    for (r, v) in s.rows.iter().zip(&v) {
        assert_eq!(v.ratio, r.variance / (r.n as f64).ln());
        assert!(v.jackknife_se > 0.0 && v.jackknife_se < v.ratio);
    }
    // (4/π)(1 − 2/π) to 16 digits, from a 20-digit mpmath evaluation.
    assert!((VARIANCE_CONSTANT - 0.4626700755964605).abs() < 1e-15);
}

#[test]
fn truncation_controls() {
    let half = BigRational::new(1.into(), 2.into());
    let inside = Interval::open_closed(BigRational::zero(), half.clone());
    let rec = truncation_compare(&Atom::bernoulli(), 400, 400, 0.5, &inside, 100, 1, 16.0).unwrap();
    assert_eq!(rec.mismatch_fraction, 0.0);
    let rec = truncation_compare(&Atom::bernoulli(), 400, 200, 0.5, &inside, 300, 1, 16.0).unwrap();
    assert!(rec.mismatch_fraction <= 0.05, "{rec:?}");
    assert!(rec.interval_in_range && !rec.precondition_met);
    let outside = Interval::open(BigRational::new(3.into(), 4.into()), BigRational::from_integer(1.into()));
    let rec = truncation_compare(&Atom::bernoulli(), 400, 200, 0.5, &outside, 300, 1, 16.0).unwrap();
    assert!(!rec.interval_in_range);
    assert!(rec.mismatch_fraction > 0.1, "{rec:?}");
}

#[test]
fn near_one_universality_difference_is_small() {
    let rec = near_one_universality(&Atom::gaussian(), &Atom::gaussian(), 100, 0.25, 500, 9).unwrap();
    assert_eq!(rec.difference, 0.0);
    let rec = near_one_universality(&Atom::bernoulli(), &Atom::gaussian(), 500, 0.25, 20000, 9).unwrap();
    assert!(rec.difference.abs() <= 3.0 * rec.combined_se + 0.1, "{rec:?}");
}

#[test]
fn edge_moments_grow_at_the_predicted_rate() {
    let rec = edge_moment_growth(&Atom::bernoulli(), &[100, 1000, 10000], 0, 2000, 4).unwrap();
    for r in &rec.rows {
        let scaled = r.median / ((r.n + 1) as f64).sqrt();
        assert!((0.4..=1.2).contains(&scaled), "{r:?}");
        assert!((r.second_moment - r.second_moment_exact).abs() <= 5.0 * r.second_moment_se, "{r:?}");
    }
    let rec = edge_moment_growth(&Atom::bernoulli(), &[256, 1024, 4096], 2, 1000, 4).unwrap();
    let slope = rec.slope.unwrap();
    assert!((slope - 2.5).abs() <= 0.2, "slope {slope}");
    for r in &rec.rows {
        assert!((r.second_moment - r.second_moment_exact).abs() <= 5.0 * r.second_moment_se, "{r:?}");
    }
}

#[test]
fn double_roots_at_units() {
    let rec = double_root_mc(3, 1, 100_000, 8, None).unwrap();
    assert!((rec.freq_either - 0.25).abs() <= 0.01, "{rec:?}");
    assert_eq!(rec.exact_p_union, Some(0.25));
    let rec = double_root_mc(9, 1, 20_000, 8, None).unwrap();
    assert_eq!(rec.double_at_either, 0);
    let rec = double_root_mc(7, 2, 20_000, 8, None).unwrap();
    let exact = rec.exact_p_union.unwrap();
    assert!((rec.freq_either - exact).abs() <= 3.0 * (exact / 20_000.0).sqrt());
}

#[test]
fn bulk_interval_endpoints() {
    let i = bulk_interval(50, 1, 0.125);
    let lo = i.lo_value().unwrap().to_f64().unwrap();
    let hi = i.hi_value().unwrap().to_f64().unwrap();
    assert_eq!(lo, 0.5);
    assert!((hi - (1.0 - 50f64.powf(-1.875))).abs() < 1e-15);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn summary_identities(seed in any::<u64>(), trials in 1u64..60, n in 1usize..30) {
        let s = run_expectation(&SimConfig::new(Atom::uniform(), vec![n], trials, seed)).unwrap();
        let r = &s.rows[0];
        prop_assert_eq!(r.ci_half_width, 1.96 * (r.variance / r.trials as f64).sqrt());
        prop_assert_eq!(r.residual, r.mean - 2.0 / std::f64::consts::PI * (n as f64).ln());
        prop_assert!(r.mean >= 1.0 - 1e-12 || n % 2 == 0);
        prop_assert!(r.mean <= n as f64);
    }

    #[test]
    fn trials_are_replayable(seed in any::<u64>(), j in 0u64..1000) {
        let a = trial_poly(&Atom::bernoulli(), 12, seed, j);
        let b = trial_poly(&Atom::bernoulli(), 12, seed, j);
        prop_assert_eq!(a, b);
    }
}
