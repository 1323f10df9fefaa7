mod common;

use common::*;
use kac_core::atom::sample_poly;
use kac_core::roots::{
    count_real_roots, count_real_roots_with, isolate_and_refine, isolate_and_refine_with, near_double_scan,
    root_match, Interval, Method,
};
use kac_core::{Atom, IntPoly, RandomPoly, RngSpec, Transform};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

fn int(c: &[i64]) -> RandomPoly {
    RandomPoly::Int(IntPoly::new(c.to_vec()))
}

fn exact_value(c: &[i64], x: &BigRational) -> BigRational {
    c.iter()
        .rev()
        .fold(BigRational::zero(), |acc, &ci| acc * x + BigRational::from_integer(ci.into()))
}

fn sign_change_or_exact(c: &[i64], lo: &BigRational, hi: &BigRational) -> bool {
    if lo == hi {
        return exact_value(c, lo).is_zero();
    }
    let (a, b) = (exact_value(c, lo), exact_value(c, hi));
    a.is_zero() || b.is_zero() || a.signum() != b.signum()
}

#[test]
fn sturm_equals_dense_scan_for_small_sign_vectors() {
    for n in 1..=9 {
        for c in all_vectors(n, 1) {
            let want = dense_scan_count(&c, 2, 12);
            let got = count_real_roots_with(&int(&c), None, Method::Exact).unwrap();
            assert_eq!(got, want, "{c:?}");
        }
    }
}

#[test]
fn float_path_agrees_with_sturm() {
    for (atom, degrees) in [
        (Atom::bernoulli(), vec![20, 50, 90]),
        (Atom::type_i(3).unwrap(), vec![30, 60]),
        (Atom::gaussian(), vec![10, 25, 40]),
        (Atom::uniform(), vec![15, 30]),
    ] {
        for n in degrees {
            for t in 0..20 {
                let p = sample_poly(&atom, n, &mut RngSpec::new(17, t));
                let exact = count_real_roots_with(&p, None, Method::Exact).unwrap();
                let float = count_real_roots_with(&p, None, Method::Float).unwrap();
                assert_eq!(exact, float, "{} n={n} trial {t}", atom.label);
                let half = Interval::open(BigRational::zero(), BigRational::new(1.into(), 2.into()));
                let exact = count_real_roots_with(&p, Some(&half), Method::Exact).unwrap();
                let float = count_real_roots_with(&p, Some(&half), Method::Float).unwrap();
                assert_eq!(exact, float, "{} n={n} trial {t} on (0,1/2)", atom.label);
            }
        }
    }
}

#[test]
fn degree_thirty_against_fine_scan() {
    for t in 0..20 {
        let p = sample_poly(&Atom::bernoulli(), 30, &mut RngSpec::new(3, t));
        let c = p.as_int().unwrap().coeffs().to_vec();
        // 2·2·2^18 ≈ 10⁶ grid points on [−2, 2].
        assert_eq!(count_real_roots(&p, None).unwrap(), dense_scan_count(&c, 2, 18), "trial {t}");
    }
}

#[test]
fn small_examples() {
    assert_eq!(count_real_roots(&int(&[-1, 0, 1]), None).unwrap(), 2);
    assert_eq!(count_real_roots(&int(&[1, 0, 1]), None).unwrap(), 0);
    let w = BigRational::new(1.into(), 1_000_000_000.into());
    let r = isolate_and_refine(&int(&[1, -1, -1, 1]), None, &w).unwrap();
    assert_eq!(r.distinct_count, 2);
    assert_eq!(r.multiple_root_flag, Some(true));
    assert!((r.min_gap.unwrap() - 2.0).abs() <= 2e-9);
    let r = isolate_and_refine(&int(&[-1, 0, 1]), None, &w).unwrap();
    assert!((r.min_gap.unwrap() - 2.0).abs() <= 2e-9);
    assert_eq!(r.multiple_root_flag, Some(false));
    let r = isolate_and_refine(&int(&[1, 1, 1, 1]), None, &w).unwrap();
    assert_eq!(r.distinct_count, 1);
    assert!(r.min_gap.is_none());
    assert!((r.refined_roots[0] + 1.0).abs() < 1e-9);
}

#[test]
fn isolating_intervals_are_certified() {
    let w = BigRational::new(BigInt::one(), BigInt::one() << 30);
    for t in 0..30 {
        let p = sample_poly(&Atom::type_i(2).unwrap(), 40, &mut RngSpec::new(8, t));
        let c = p.as_int().unwrap().coeffs().to_vec();
        for method in [Method::Exact, Method::Float] {
            let r = isolate_and_refine_with(&p, None, &w, method).unwrap();
            assert_eq!(r.distinct_count, r.intervals.len());
            for iv in &r.intervals {
                assert!(sign_change_or_exact(&c, &iv.lo, &iv.hi), "trial {t} {method:?}");
            }
            for pair in r.intervals.windows(2) {
                assert!(pair[0].hi < pair[1].lo, "overlap in trial {t} {method:?}");
            }
            if method == Method::Exact {
                assert!(r.intervals.iter().all(|iv| &iv.hi - &iv.lo <= w));
            }
        }
    }
}

#[test]
fn near_double_examples() {
    let ev = near_double_scan(&int(&[1, -1, -1, 1]), 16.0, None).unwrap();
    assert_eq!(ev.len(), 1);
    assert!(ev[0].lo <= 1.0 && 1.0 <= ev[0].hi && ev[0].certified);
    assert!(near_double_scan(&int(&[-1, 0, 1]), 16.0, None).unwrap().is_empty());
    // (x − 1)² times a random ±1 polynomial always fires at 1.
    for t in 0..20 {
        let p = sample_poly(&Atom::bernoulli(), 20, &mut RngSpec::new(5, t));
        let c = p.as_int().unwrap().coeffs();
        let mut prod = vec![0i64; c.len() + 2];
        for (i, &ci) in c.iter().enumerate() {
            prod[i] += ci;
            prod[i + 1] -= 2 * ci;
            prod[i + 2] += ci;
        }
        let ev = near_double_scan(&int(&prod), 16.0, None).unwrap();
        assert!(ev.iter().any(|e| e.lo <= 1.0 && 1.0 <= e.hi), "trial {t}");
    }
}

#[test]
fn root_match_examples() {
    let f = RandomPoly::Float(kac_core::FloatPoly::new(vec![-0.5, 1.0]));
    let g = RandomPoly::Float(kac_core::FloatPoly::new(vec![-0.49, 1.0]));
    let m = root_match(&f, &g, 1.0, 1.0, None).unwrap();
    assert!(m.all_matched());
    assert!((m.roots[0].lo + 0.5).abs() < 1e-12 && (m.roots[0].hi - 1.5).abs() < 1e-12);

    let mut matched = 0;
    let domain = Interval::open_closed(BigRational::zero(), BigRational::new(1.into(), 2.into()));
    for t in 0..100 {
        let p = sample_poly(&Atom::bernoulli(), 200, &mut RngSpec::new(12, t));
        let r = root_match(&p, &p.truncate(100), 1e-3, 1e3, Some(&domain)).unwrap();
        matched += r.all_matched() as u32;
        let same = root_match(&p, &p, 1e-3, 1e3, None).unwrap();
        assert!(same.roots.iter().filter(|r| r.preconditions).all(|r| r.matched));
    }
    assert!(matched >= 99, "{matched}");
}

fn small_int_poly() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-4i64..=4, 2..14).prop_filter("nonzero leading and constant terms", |c| {
        c[0] != 0 && *c.last().unwrap() != 0
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn scaling_preserves_the_count(c in small_int_poly(), k in prop::sample::select(vec![-7i64, -2, 3, 5])) {
        let scaled: Vec<i64> = c.iter().map(|x| x * k).collect();
        prop_assert_eq!(
            count_real_roots(&int(&c), None).unwrap(),
            count_real_roots(&int(&scaled), None).unwrap()
        );
    }

    #[test]
    fn reciprocal_and_reflection(c in small_int_poly()) {
        let p = int(&c);
        let zero = BigRational::zero();
        let one = BigRational::one();
        let unit = Interval::open(zero.clone(), one.clone());
        let beyond = Interval { lo: std::ops::Bound::Excluded(one.clone()), hi: std::ops::Bound::Unbounded };
        prop_assert_eq!(
            count_real_roots(&p, Some(&unit)).unwrap(),
            count_real_roots(&p.transform(Transform::Reciprocal), Some(&beyond)).unwrap()
        );
        let (a, b) = (BigRational::new((-1).into(), 3.into()), BigRational::new(5.into(), 4.into()));
        prop_assert_eq!(
            count_real_roots(&p.transform(Transform::NegateArg), Some(&Interval::open(a.clone(), b.clone()))).unwrap(),
            count_real_roots(&p, Some(&Interval::open(-b, -a))).unwrap()
        );
    }

    #[test]
    fn exact_and_float_paths_agree(c in small_int_poly()) {
        let p = int(&c);
        let whole = count_real_roots_with(&p, None, Method::Exact).unwrap();
        match count_real_roots_with(&p, None, Method::Float) {
            Ok(f) => prop_assert_eq!(whole, f),
            // Repeated roots cannot be certified in floating point.
            Err(kac_core::Error::Certification { .. }) => {}
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        }
    }
}
