use kac_core::ekq::{ek_density, ek_expected, ek_limit_tail, ek_residual, ek_sweep, EkRange, C_GAU};
use proptest::prelude::*;

/// Real-zero density from the raw covariance sums
/// `A = Σ t^{2i}`, `B = Σ i t^{2i−1}`, `C = Σ i² t^{2i−2}`:
/// `ρ = √(AC − B²) / (π A)`. Accurate only where the cancellation is mild.
fn direct_density(n: u64, t: f64) -> f64 {
    let (mut a, mut b, mut c) = (0.0, 0.0, 0.0);
    for i in 0..=n {
        let i = i as f64;
        a += t.powf(2.0 * i);
        if i > 0.0 {
            b += i * t.powf(2.0 * i - 1.0);
            c += i * i * t.powf(2.0 * i - 2.0);
        }
    }
    (a * c - b * b).sqrt() / (std::f64::consts::PI * a)
}

/// Composite Simpson rule with `m` (even) panels.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, m: usize) -> f64 {
    let h = (b - a) / m as f64;
    let mut s = f(a) + f(b);
    for k in 1..m {
        s += f(a + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

#[test]
fn small_degrees_match_direct_integration() {
    for n in [1u64, 2, 3, 5, 10, 20] {
        // ∫_ℝ ρ = 2 ∫_{−1}^{1} ρ by the t ↦ 1/t symmetry.
        let want = 2.0 * simpson(|t| direct_density(n, t), -1.0, 1.0, 20_000);
        let got = ek_expected(n, EkRange::WholeLine).unwrap();
        assert!((got.value - want).abs() < 1e-9, "n={n}: {} vs {want}", got.value);
    }
    assert!((ek_expected(1, EkRange::WholeLine).unwrap().value - 1.0).abs() < 1e-13);
}

#[test]
fn intervals_are_additive() {
    for n in [10u64, 300] {
        let whole = ek_expected(n, EkRange::WholeLine).unwrap().value;
        let parts: f64 = [(f64::NEG_INFINITY, -1.0), (-1.0, 0.0), (0.0, 0.5), (0.5, 2.0), (2.0, f64::INFINITY)]
            .iter()
            .map(|&(a, b)| ek_expected(n, EkRange::Between(a, b)).unwrap().value)
            .sum();
        assert!((whole - parts).abs() < 1e-11, "n={n}");
        let direct = simpson(|t| direct_density(n, t), 0.0, 0.5, 2000);
        let q = ek_expected(n, EkRange::Between(0.0, 0.5)).unwrap();
        assert!((q.value - direct).abs() < 1e-10 + q.error_estimate, "n={n}");
    }
}

#[test]
fn residuals_approach_the_gaussian_constant() {
    let rows = ek_sweep(&[100, 1000, 10_000, 100_000]).unwrap();
    assert!((rows[3].residual - C_GAU).abs() <= 1e-2);
    let diffs: Vec<f64> = rows.windows(2).map(|w| (w[1].residual - w[0].residual).abs()).collect();
    assert!(diffs.windows(2).all(|d| d[1] < d[0]), "{diffs:?}");
    for r in &rows {
        assert_eq!(r.residual, ek_residual(r.n).unwrap());
        assert!(r.quad_error < 1e-10);
    }
}

#[test]
fn limit_tail_split() {
    let (integral, rest) = ek_limit_tail(2.0).unwrap();
    // ∫₀^{1/2} dt / (π(1 − t²)) = atanh(1/2) / π = ln 3 / (2π).
    assert!((integral - 3f64.ln() / (2.0 * std::f64::consts::PI)).abs() < 1e-15);
    assert_eq!(integral + rest, C_GAU / 4.0);
    assert!(ek_limit_tail(1.0).is_err());
}

proptest! {
    #[test]
    fn density_symmetries(n in 1u64..400, t in 0.01f64..0.99) {
        let r = ek_density(n, t).unwrap();
        prop_assert!(r > 0.0);
        prop_assert_eq!(ek_density(n, -t).unwrap(), r);
        let inv = ek_density(n, 1.0 / t).unwrap() / (t * t);
        prop_assert!((inv - r).abs() <= 1e-12 * r.max(1.0), "{} vs {}", inv, r);
    }

    #[test]
    fn density_matches_raw_sums(n in 1u64..60, t in -0.9f64..0.9) {
        let r = ek_density(n, t).unwrap();
        let d = direct_density(n, t);
        prop_assert!((r - d).abs() <= 1e-9 * d.max(1e-3), "{} vs {}", r, d);
    }
}
