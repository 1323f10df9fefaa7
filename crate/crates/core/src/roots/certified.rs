//! Certified real-root isolation for polynomials with `f64` coefficients.
//!
//! Roots in `[-1, 1]` are found on `P` itself and roots outside via the
//! reversed polynomial `Q(y) = yⁿ P(1/y)` on `[-1, 1]`. Each cell
//! `[c − r, c + r]` is tested with a second-order Taylor bound:
//!
//! * exclusion when `|P(c)| > |P′(c)| r + M₂ r²/2`,
//! * monotonicity when `|P′(c)| > M₂ r`,
//!
//! where `M₂ = Σ i(i−1)|aᵢ| Rⁱ⁻²` bounds `|P″|` on `|x| ≤ R`, and every
//! evaluation carries a rigorous rounding bound. Cells near `±1` are graded
//! geometrically. Far from `±1` the series is truncated with an explicit
//! tail bound. Point signs that floating point cannot settle are decided by
//! exact dyadic arithmetic.

use std::cell::OnceCell;
use std::cmp::Ordering;
use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, Zero};

use super::sturm::{sign_at, Point, ZPoly};
use crate::error::{Error, Result};

const U: f64 = f64::EPSILON / 2.0;
/// Tail terms below this are ignored after being folded into the bounds.
const TAIL_TOL: f64 = 1e-60;
const SAFE_UP: f64 = 1.0 + 1e-12;
const SAFE_DOWN: f64 = 1.0 - 1e-12;

fn gamma(k: usize) -> f64 {
    let ku = k as f64 * U;
    ku / (1.0 - ku)
}

/// Exact integer polynomial with the same real roots as `coeffs`
/// (all dyadic coefficients scaled by a common power of two).
pub(crate) fn dyadic_to_ints(coeffs: &[f64]) -> ZPoly {
    let parts: Vec<(u64, i16, i8)> = coeffs
        .iter()
        .map(|c| {
            let (m, e, s) = c.integer_decode();
            if m == 0 {
                (0, 0, s)
            } else {
                let tz = m.trailing_zeros();
                (m >> tz, e + tz as i16, s)
            }
        })
        .collect();
    let emin = parts
        .iter()
        .filter(|(m, _, _)| *m != 0)
        .map(|&(_, e, _)| e)
        .min()
        .unwrap_or(0);
    let mut out: ZPoly = parts
        .iter()
        .map(|&(m, e, s)| {
            if m == 0 {
                BigInt::zero()
            } else {
                let v = BigInt::from(m) << ((e - emin) as usize);
                if s < 0 { -v } else { v }
            }
        })
        .collect();
    while out.last().is_some_and(Zero::is_zero) {
        out.pop();
    }
    out
}

fn rational(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite")
}

struct Eval {
    p: f64,
    ep: f64,
    dp: f64,
    edp: f64,
}

/// One side (direct or reversed) prepared for repeated cell tests.
struct Side {
    /// Per index: `aᵢ`, `(i+1)aᵢ₊₁`, `|aᵢ|`, `|(i+1)aᵢ₊₁|`,
    /// `(i+2)(i+1)|aᵢ₊₂|`, zero padded.
    fused: Vec<[f64; 5]>,
    a: Vec<f64>,
    da: Vec<f64>,
    abs_a: Vec<f64>,
    abs_da: Vec<f64>,
    /// `fl(i·aᵢ)` may differ from `i·aᵢ`.
    da_rounded: bool,
    max_abs: f64,
    exact: OnceCell<ZPoly>,
}

impl Side {
    fn new(a: Vec<f64>) -> Self {
        let n = a.len();
        let mut da = vec![0.0; n.saturating_sub(1)];
        let mut da_rounded = false;
        for i in 1..n {
            let v = i as f64 * a[i];
            if (i as f64).mul_add(a[i], -v) != 0.0 {
                da_rounded = true;
            }
            da[i - 1] = v;
        }
        let abs_a: Vec<f64> = a.iter().map(|v| v.abs()).collect();
        let abs_da: Vec<f64> = da.iter().map(|v| v.abs()).collect();
        let abs_dda: Vec<f64> = (2..n)
            .map(|i| (i * (i - 1)) as f64 * abs_a[i])
            .collect();
        let max_abs = abs_a.iter().copied().fold(0.0, f64::max);
        let pad = |v: &[f64]| {
            let mut w = v.to_vec();
            w.resize(n, 0.0);
            w
        };
        let (da_p, abs_da_p, dda_p) = (pad(&da), pad(&abs_da), pad(&abs_dda));
        let fused = (0..n)
            .map(|i| [a[i], da_p[i], abs_a[i], abs_da_p[i], dda_p[i]])
            .collect();
        Self {
            fused,
            a,
            da,
            abs_a,
            abs_da,
            da_rounded,
            max_abs,
            exact: OnceCell::new(),
        }
    }

    fn degree(&self) -> usize {
        self.a.len() - 1
    }

    fn exact(&self) -> &ZPoly {
        self.exact.get_or_init(|| dyadic_to_ints(&self.a))
    }

    /// Number of leading terms to keep on `|x| ≤ r` and a bound on what
    /// the dropped terms can contribute to `P`, `P′` or `P″`.
    fn truncation(&self, r: f64) -> (usize, f64) {
        let n = self.degree();
        if r >= 0.999 || n < 64 || self.max_abs == 0.0 {
            return (n, 0.0);
        }
        // Σ_{i>K} i² rⁱ⁻² ≤ (K+1)² r^{K−1} / (1 − q), q = ((K+2)/(K+1))² r.
        let bound = |k: usize| {
            let kf = k as f64;
            let q = ((kf + 2.0) / (kf + 1.0)).powi(2) * r;
            if q >= 1.0 {
                return f64::INFINITY;
            }
            self.max_abs * (kf + 1.0).powi(2) * r.powf(kf - 1.0) / (1.0 - q)
        };
        let mut k = ((TAIL_TOL / self.max_abs).ln() / r.ln()).ceil().max(8.0) as usize;
        while k < n && bound(k) > TAIL_TOL {
            k += k / 8 + 1;
        }
        if k >= n { (n, 0.0) } else { (k, bound(k) * SAFE_UP) }
    }

    fn eval(&self, x: f64, compensated: bool) -> Eval {
        let ax = x.abs();
        let (k, tail) = self.truncation(ax);
        let (p, ep) = horner_bounded(&self.a[..=k], &self.abs_a[..=k], x, ax, compensated);
        let kd = k.min(self.da.len());
        let (dp, mut edp) = if kd == 0 {
            (0.0, 0.0)
        } else {
            horner_bounded(&self.da[..kd], &self.abs_da[..kd], x, ax, compensated)
        };
        if self.da_rounded && kd > 0 {
            edp += U * abs_horner(&self.abs_da[..kd], ax) * SAFE_UP;
        }
        Eval {
            p,
            ep: ep + tail,
            dp,
            edp: edp + tail,
        }
    }

    /// Plain-precision value and slope at `x` with error bounds, plus a
    /// bound on `|P″|` over `|x| ≤ reach` (`|x| ≤ reach` required), all
    /// accumulated in one pass.
    fn eval_cell(&self, x: f64, reach: f64) -> (Eval, f64) {
        let ax = x.abs();
        let (k, tail) = self.truncation(reach);
        let (mut p, mut dp, mut ap, mut adp, mut m2) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for t in self.fused[..=k].iter().rev() {
            p = p * x + t[0];
            dp = dp * x + t[1];
            ap = ap * ax + t[2];
            adp = adp * ax + t[3];
            m2 = m2 * reach + t[4];
        }
        let g = gamma(2 * k + 4);
        let tiny = 4.0 * (k + 1) as f64 * f64::MIN_POSITIVE;
        let ep = 1.01 * g * ap * (1.0 + g) + tiny + tail;
        let mut edp = 1.01 * g * adp * (1.0 + g) + tiny + tail;
        if self.da_rounded {
            edp += U * adp * SAFE_UP;
        }
        let m2 = m2 * (1.0 + g) * SAFE_UP + tail;
        (Eval { p, ep, dp, edp }, m2)
    }

    /// Certified sign at a float point, with exact fallback.
    fn sign(&self, x: f64) -> Ordering {
        for compensated in [false, true] {
            let e = self.eval(x, compensated);
            if e.p.abs() > e.ep {
                return e.p.partial_cmp(&0.0).unwrap();
            }
        }
        sign_at(self.exact(), &Point::At(rational(x)))
    }
}

fn abs_horner(abs: &[f64], ax: f64) -> f64 {
    abs.iter().rev().fold(0.0, |acc, &c| acc * ax + c)
}

/// Horner value with a rigorous bound on its distance to the exact value.
fn horner_bounded(a: &[f64], abs: &[f64], x: f64, ax: f64, compensated: bool) -> (f64, f64) {
    let k = a.len();
    let abs_val = abs_horner(abs, ax) * (1.0 + gamma(2 * k + 2));
    let tiny = 4.0 * k as f64 * f64::MIN_POSITIVE;
    if compensated {
        let (v, _) = crate::poly::compensated_horner(a, x);
        let g = gamma(2 * k);
        let err = 1.01 * (U * v.abs() + g * g * abs_val) + tiny;
        (v, err)
    } else {
        let v = a.iter().rev().fold(0.0, |acc, &c| acc * x + c);
        (v, 1.01 * gamma(2 * k) * abs_val + tiny)
    }
}

/// Which polynomial a bracket's native coordinates refer to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Space {
    Direct,
    Reciprocal,
}

/// A certified bracket: either an exact root (`lo == hi` in native
/// coordinates) or a cell with a strict sign change and a single simple
/// root inside.
#[derive(Debug, Clone)]
pub(crate) struct Bracket {
    pub space: Space,
    /// Native coordinates (`x` for direct, `y = 1/x` for reciprocal).
    pub nlo: f64,
    pub nhi: f64,
}

impl Bracket {
    pub fn is_exact(&self) -> bool {
        self.nlo == self.nhi
    }

    /// Enclosure in `x`, rounded outward for reciprocal brackets.
    pub fn x_range(&self) -> (f64, f64) {
        match self.space {
            Space::Direct => (self.nlo, self.nhi),
            Space::Reciprocal => {
                let (a, b) = (1.0 / self.nhi, 1.0 / self.nlo);
                let exact = |y: f64, x: f64| x.mul_add(y, -1.0) == 0.0;
                let lo = if exact(self.nhi, a) { a } else { a.next_down() };
                let hi = if exact(self.nlo, b) { b } else { b.next_up() };
                (lo, hi)
            }
        }
    }

    pub fn x_width(&self) -> f64 {
        let (lo, hi) = self.x_range();
        hi - lo
    }

    pub fn x_mid(&self) -> f64 {
        let (lo, hi) = self.x_range();
        lo + (hi - lo) / 2.0
    }
}

/// Certified isolation of all real roots of a polynomial with no roots at
/// `0` or `±1`, `P(0) ≠ 0` and nonzero leading coefficient.
pub(crate) struct Isolator {
    direct: Side,
    reversed: Side,
}

impl Isolator {
    pub fn new(coeffs: &[f64]) -> Result<Self> {
        if coeffs.len() < 2 {
            return Err(Error::invalid("isolation needs degree at least one"));
        }
        if coeffs[0] == 0.0 || *coeffs.last().unwrap() == 0.0 {
            return Err(Error::invalid("polynomial must not vanish at 0 or have a zero lead"));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("non-finite coefficient"));
        }
        let direct = Side::new(coeffs.to_vec());
        let reversed = Side::new(coeffs.iter().rev().copied().collect());
        for x in [-1.0, 1.0] {
            if direct.sign(x) == Ordering::Equal {
                return Err(Error::Certification {
                    location: x,
                    reason: "root at ±1 must be deflated before float isolation".into(),
                });
            }
        }
        Ok(Self { direct, reversed })
    }

    fn side(&self, space: Space) -> &Side {
        match space {
            Space::Direct => &self.direct,
            Space::Reciprocal => &self.reversed,
        }
    }

    /// All real roots, sorted by `x`, with pairwise disjoint enclosures.
    pub fn isolate(&self) -> Result<Vec<Bracket>> {
        let mut out = Vec::new();
        for space in [Space::Direct, Space::Reciprocal] {
            self.isolate_unit(space, &mut out)?;
        }
        // Keep reciprocal brackets away from y = 0 so x stays finite.
        for b in out.iter_mut().filter(|b| b.space == Space::Reciprocal) {
            while (b.nlo == 0.0 || b.nhi == 0.0) && self.bisect(b) {}
        }
        out.sort_by(|a, b| a.x_mid().partial_cmp(&b.x_mid()).unwrap());
        self.separate(&mut out)?;
        Ok(out)
    }

    fn isolate_unit(&self, space: Space, out: &mut Vec<Bracket>) -> Result<()> {
        let side = self.side(space);
        let n = side.degree();
        let levels = ((n + 1) as f64).log2().ceil() as i32 + 3;
        let levels = levels.clamp(2, 60);
        let mut pts = vec![0.0];
        for j in 1..=levels {
            let v = 1.0 - (0.5f64).powi(j);
            pts.push(v);
            pts.push(-v);
        }
        pts.push(1.0);
        pts.push(-1.0);
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        // Endpoint signs are only needed for monotone cells.
        let mut signs: HashMap<u64, Ordering> = HashMap::new();
        let mut sign = |x: f64| *signs.entry(x.to_bits()).or_insert_with(|| side.sign(x));
        let mut exact_roots: Vec<f64> = Vec::new();
        let mut stack: Vec<(f64, f64)> = pts.windows(2).map(|p| (p[0], p[1])).collect();
        while let Some((a, b)) = stack.pop() {
            match self.classify(side, a, b) {
                Cell::Empty => {}
                Cell::Monotone => {
                    let (sa, sb) = (sign(a), sign(b));
                    if sa == Ordering::Equal {
                        exact_roots.push(a);
                    } else if sb == Ordering::Equal {
                        exact_roots.push(b);
                    } else if sa != sb {
                        out.push(Bracket { space, nlo: a, nhi: b });
                    }
                }
                Cell::Unknown => {
                    let m = a + (b - a) / 2.0;
                    if !(a < m && m < b) || (b - a) <= 8.0 * f64::EPSILON * a.abs().max(b.abs()) {
                        let x = if space == Space::Direct { m } else { 1.0 / m };
                        return Err(Error::Certification {
                            location: x,
                            reason: "roots too close to separate in double precision".into(),
                        });
                    }
                    stack.push((m, b));
                    stack.push((a, m));
                }
            }
        }
        exact_roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
        exact_roots.dedup();
        out.extend(exact_roots.into_iter().map(|x| Bracket { space, nlo: x, nhi: x }));
        Ok(())
    }

    fn classify(&self, side: &Side, a: f64, b: f64) -> Cell {
        let c = a + (b - a) / 2.0;
        let r = (c - a).max(b - c).next_up();
        let reach = (c.abs() + r).next_up().min(1.0);
        let (e, m2) = side.eval_cell(c, reach);
        let test = |e: &Eval| {
            let slope = (e.dp.abs() + e.edp) * r;
            let curve = m2 * r * r / 2.0;
            if (e.p.abs() - e.ep) * SAFE_DOWN > (slope + curve) * SAFE_UP {
                Some(Cell::Empty)
            } else if (e.dp.abs() - e.edp) * SAFE_DOWN > m2 * r * SAFE_UP {
                Some(Cell::Monotone)
            } else {
                None
            }
        };
        if let Some(cell) = test(&e) {
            return cell;
        }
        // Retry in higher precision only if exact values could pass.
        let ideal = Eval { ep: 0.0, edp: 0.0, ..e };
        if test(&ideal).is_some() {
            if let Some(cell) = test(&side.eval(c, true)) {
                return cell;
            }
        }
        Cell::Unknown
    }

    /// Sign of the native polynomial at a native coordinate.
    fn native_sign(&self, space: Space, y: f64) -> Ordering {
        self.side(space).sign(y)
    }

    /// Halves a bracket once; returns false when it cannot shrink further.
    pub fn bisect(&self, b: &mut Bracket) -> bool {
        if b.is_exact() {
            return false;
        }
        let m = b.nlo + (b.nhi - b.nlo) / 2.0;
        if !(b.nlo < m && m < b.nhi) {
            return false;
        }
        let sm = self.native_sign(b.space, m);
        let slo = self.native_sign(b.space, b.nlo);
        if sm == Ordering::Equal {
            b.nlo = m;
            b.nhi = m;
        } else if sm == slo {
            b.nlo = m;
        } else {
            b.nhi = m;
        }
        true
    }

    /// Bisects until the `x` enclosure is no wider than `width` or cannot
    /// shrink further in double precision.
    pub fn refine(&self, b: &mut Bracket, width: f64) {
        while b.x_width() > width && self.bisect(b) {}
    }

    fn separate(&self, out: &mut [Bracket]) -> Result<()> {
        loop {
            let mut touched = false;
            for i in 1..out.len() {
                if out[i - 1].x_range().1 >= out[i].x_range().0 {
                    touched = true;
                    let (l, r) = out.split_at_mut(i);
                    let a = self.bisect(&mut l[i - 1]);
                    let b = self.bisect(&mut r[0]);
                    if !a && !b {
                        return Err(Error::Certification {
                            location: r[0].x_mid(),
                            reason: "root enclosures overlap at double precision".into(),
                        });
                    }
                }
            }
            if !touched {
                return Ok(());
            }
        }
    }
}

enum Cell {
    Empty,
    Monotone,
    Unknown,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn roots(c: &[f64]) -> Vec<f64> {
        let iso = Isolator::new(c).unwrap();
        iso.isolate()
            .unwrap()
            .into_iter()
            .map(|mut b| {
                iso.refine(&mut b, 1e-12);
                b.x_mid()
            })
            .collect()
    }

    #[test]
    fn quadratic_roots_both_sides_of_unit_circle() {
        // (x - 0.5)(x - 3) = x² - 3.5x + 1.5
        let r = roots(&[1.5, -3.5, 1.0]);
        assert_eq!(r.len(), 2);
        assert!((r[0] - 0.5).abs() < 1e-11);
        assert!((r[1] - 3.0).abs() < 1e-11);
    }

    #[test]
    fn no_real_roots() {
        assert!(roots(&[1.0, 0.0, 1.0]).is_empty());
        assert!(roots(&[1.0, 1.0, 1.0, 1.0, 1.0]).is_empty());
    }

    #[test]
    fn negative_roots_and_exact_points() {
        // (x + 0.25)(x + 4)(x - 2) = x³ + 2.25x² - 7.5x - 2
        let r = roots(&[-2.0, -7.5, 2.25, 1.0]);
        assert_eq!(r.len(), 3);
        for (got, want) in r.iter().zip([-4.0, -0.25, 2.0]) {
            assert!((got - want).abs() < 1e-11, "{got} vs {want}");
        }
    }

    #[test]
    fn rejects_root_at_one() {
        assert!(Isolator::new(&[-1.0, 0.0, 1.0]).is_err());
    }

    #[test]
    fn high_degree_truncation_is_sound() {
        // 1 - 2x + x^200/2 has a root near 0.5 and one near 1 (inside the
        // unit interval) plus negative/large ones.
        let mut c = vec![0.0; 201];
        c[0] = 1.0;
        c[1] = -2.0;
        c[200] = 0.5;
        let r = roots(&c);
        let near_half = r.iter().filter(|x| (**x - 0.5).abs() < 1e-6).count();
        assert_eq!(near_half, 1);
        for x in &r {
            let v: f64 = c.iter().rev().fold(0.0, |acc, &a| acc * x + a);
            let dv: f64 = c
                .iter()
                .enumerate()
                .skip(1)
                .rev()
                .fold(0.0, |acc, (i, &a)| acc * x + i as f64 * a);
            assert!(v.abs() <= 1e-6 * dv.abs().max(1.0), "x = {x}, P = {v}");
        }
    }

    #[test]
    fn dyadic_scaling_is_exact() {
        let z = dyadic_to_ints(&[0.5, -0.25, 3.0]);
        assert_eq!(z, vec![BigInt::from(2), BigInt::from(-1), BigInt::from(12)]);
    }
}
