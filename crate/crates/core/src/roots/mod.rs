//! Counting, isolation and refinement of real roots.
//!
//! Integer polynomials of moderate degree go through an exact Sturm
//! sequence. Everything else uses certified double-precision isolation;
//! when that cannot certify a configuration the exact path is retried if
//! the degree allows it, otherwise a certification error is returned.

mod certified;
mod interval;
mod sturm;

use std::cmp::Ordering;
use std::ops::Bound;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

pub use interval::{Interval, RootInterval};
pub use sturm::SturmChain;

use certified::{dyadic_to_ints, Bracket, Isolator, Space};
use sturm::{sign_at, Point, ZPoly};

use crate::error::{Error, Result};
use crate::poly::{Polynomial, RandomPoly};

/// Integer polynomials up to this degree use Sturm sequences by default.
pub const EXACT_AUTO_MAX_DEGREE: usize = 64;
/// Largest degree for which a failed float certification is retried exactly.
pub const EXACT_FALLBACK_MAX_DEGREE: usize = 256;

/// Root-finding strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    /// Exact for integer polynomials of small degree, certified float
    /// otherwise.
    #[default]
    Auto,
    /// Sturm sequences; float coefficients are used as exact dyadics.
    Exact,
    /// Certified double-precision isolation.
    Float,
}

/// Isolated and refined real roots of one polynomial.
#[derive(Debug, Clone, PartialEq)]
pub struct RootReport {
    pub distinct_count: usize,
    /// Disjoint, ascending; one distinct root in each.
    pub intervals: Vec<RootInterval<BigRational>>,
    /// Interval midpoints.
    pub refined_roots: Vec<f64>,
    pub min_gap: Option<f64>,
    /// Whether `gcd(P, P′)` is nonconstant. Known exactly on the Sturm
    /// path; the float path only reports certified repeated real roots and
    /// otherwise leaves it undetermined.
    pub multiple_root_flag: Option<bool>,
    /// `Exact` or `Float`, whichever produced the report.
    pub method: Method,
}

/// A location where `|P|` and `|P′|` are both at most `threshold`.
#[derive(Debug, Clone, PartialEq)]
pub struct NearDoubleEvent {
    /// Enclosure of the location.
    pub lo: f64,
    pub hi: f64,
    /// Upper bound on `|P|` at the location.
    pub p_bound: f64,
    /// Upper bound on `|P′|` at the location.
    pub dp_bound: f64,
    pub threshold: f64,
    /// False when the bounds could not be separated from the threshold and
    /// the event is reported conservatively.
    pub certified: bool,
}

/// Outcome of pairing one root of `F` with a root of `G`.
#[derive(Debug, Clone, PartialEq)]
pub struct RootMatch {
    pub root: f64,
    pub lo: f64,
    pub hi: f64,
    /// `|F′(x₀)| ≥ ε₁`, `|F″| ≤ M` and `|F − G| ≤ ε₁²/(4M)` on the
    /// interval, checked on a grid.
    pub preconditions: bool,
    /// `G` changes sign on (or vanishes at an end of) the interval.
    pub matched: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct MatchReport {
    pub roots: Vec<RootMatch>,
}

impl MatchReport {
    pub fn all_matched(&self) -> bool {
        self.roots.iter().all(|r| r.matched)
    }

    pub fn matched_count(&self) -> usize {
        self.roots.iter().filter(|r| r.matched).count()
    }
}

/// Integer polynomial with the same roots (float coefficients scaled).
fn exact_poly(p: &RandomPoly) -> ZPoly {
    let mut z: ZPoly = match p {
        RandomPoly::Int(q) => q.coeffs().iter().map(|&c| BigInt::from(c)).collect(),
        RandomPoly::Float(q) => dyadic_to_ints(q.coeffs()),
    };
    while z.last().is_some_and(Zero::is_zero) {
        z.pop();
    }
    z
}

fn exact_value(p: &RandomPoly, x: &BigRational) -> BigRational {
    match p {
        RandomPoly::Int(q) => q.eval_rational(x),
        RandomPoly::Float(q) => q
            .coeffs()
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, &c| acc * x + rational(c)),
    }
}

fn rational(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite value")
}

fn to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// Root enclosure from either engine.
#[derive(Debug, Clone)]
enum Enclosure {
    Rat(RootInterval<BigRational>),
    Float(Bracket),
}

/// Certified float isolation together with the roots at 0 and ±1 that were
/// divided out beforehand.
struct FloatRoots {
    iso: Option<Isolator>,
    brackets: Vec<Bracket>,
    repeated: bool,
}

fn float_isolate(p: &RandomPoly) -> Result<FloatRoots> {
    let mut points: Vec<f64> = Vec::new();
    let mut repeated = false;
    let rest: Vec<f64> = match p {
        RandomPoly::Int(q) => {
            let mut c: Vec<i128> = q.coeffs().iter().map(|&v| v as i128).collect();
            while c.last() == Some(&0) {
                c.pop();
            }
            let zeros = c.iter().take_while(|&&v| v == 0).count();
            if zeros > 0 {
                points.push(0.0);
                repeated |= zeros > 1;
                c.drain(..zeros);
            }
            for r in [1i128, -1] {
                let mut mult = 0;
                while c.len() > 1 && eval_i128(&c, r) == Some(0) {
                    c = synthetic_div(&c, r)?;
                    mult += 1;
                }
                if mult > 0 {
                    points.push(r as f64);
                    repeated |= mult > 1;
                }
            }
            const LIMIT: i128 = 1 << 53;
            if c.iter().any(|v| v.abs() > LIMIT) {
                return Err(Error::Certification {
                    location: 1.0,
                    reason: "deflated coefficients exceed double precision".into(),
                });
            }
            c.into_iter().map(|v| v as f64).collect()
        }
        RandomPoly::Float(q) => {
            let mut c = q.coeffs().to_vec();
            while c.last() == Some(&0.0) {
                c.pop();
            }
            let zeros = c.iter().take_while(|&&v| v == 0.0).count();
            if zeros > 0 {
                points.push(0.0);
                repeated |= zeros > 1;
                c.drain(..zeros);
            }
            c
        }
    };
    let mut brackets: Vec<Bracket> = points
        .into_iter()
        .map(|x| Bracket { space: Space::Direct, nlo: x, nhi: x })
        .collect();
    let iso = if rest.len() >= 2 {
        let iso = Isolator::new(&rest)?;
        brackets.extend(iso.isolate()?);
        Some(iso)
    } else {
        None
    };
    brackets.sort_by(|a, b| a.x_mid().partial_cmp(&b.x_mid()).unwrap());
    Ok(FloatRoots { iso, brackets, repeated })
}

fn eval_i128(c: &[i128], x: i128) -> Option<i128> {
    c.iter()
        .rev()
        .try_fold(0i128, |acc, &v| acc.checked_mul(x)?.checked_add(v))
}

/// Quotient of `c` by `x − r`, assuming `r` is a root.
fn synthetic_div(c: &[i128], r: i128) -> Result<Vec<i128>> {
    let n = c.len() - 1;
    let mut q = vec![0i128; n];
    let mut acc = 0i128;
    for i in (1..=n).rev() {
        acc = acc
            .checked_mul(r)
            .and_then(|v| v.checked_add(c[i]))
            .ok_or_else(|| Error::resource("coefficient overflow while deflating"))?;
        q[i - 1] = acc;
    }
    Ok(q)
}

/// Isolation state shared by the public operations.
struct Roots {
    exact: ZPoly,
    engine: Engine,
    encl: Vec<Enclosure>,
}

enum Engine {
    Exact(SturmChain),
    Float(Option<Isolator>, bool),
}

impl Roots {
    fn new(p: &RandomPoly, interval: &Interval<BigRational>, method: Method) -> Result<Self> {
        let exact = exact_poly(p);
        if exact.is_empty() {
            return Err(Error::invalid("the zero polynomial has infinitely many roots"));
        }
        let use_exact = match method {
            Method::Exact => true,
            Method::Float => false,
            Method::Auto => matches!(p, RandomPoly::Int(_)) && exact.len() - 1 <= EXACT_AUTO_MAX_DEGREE,
        };
        if use_exact {
            return Self::exact(exact, interval);
        }
        match float_isolate(p) {
            Ok(fr) => {
                let mut roots = Self {
                    exact,
                    engine: Engine::Float(fr.iso, fr.repeated),
                    encl: fr.brackets.into_iter().map(Enclosure::Float).collect(),
                };
                roots.restrict(interval)?;
                Ok(roots)
            }
            Err(Error::Certification { .. })
                if method == Method::Auto && exact.len() - 1 <= EXACT_FALLBACK_MAX_DEGREE =>
            {
                Self::exact(exact, interval)
            }
            Err(e) => Err(e),
        }
    }

    fn exact(exact: ZPoly, interval: &Interval<BigRational>) -> Result<Self> {
        let chain = SturmChain::new(&Polynomial::new(exact.clone()))?;
        // Coarse isolation; callers refine to their own width.
        let width = BigRational::from_integer(BigInt::from(1u64 << 62));
        let encl = chain
            .isolate(interval, &width)?
            .into_iter()
            .map(Enclosure::Rat)
            .collect();
        Ok(Self {
            exact,
            engine: Engine::Exact(chain),
            encl,
        })
    }

    fn method(&self) -> Method {
        match self.engine {
            Engine::Exact(_) => Method::Exact,
            Engine::Float(..) => Method::Float,
        }
    }

    fn sign(&self, x: &BigRational) -> Ordering {
        sign_at(&self.exact, &Point::At(x.clone()))
    }

    /// Drops float enclosures whose root lies outside `interval`.
    fn restrict(&mut self, interval: &Interval<BigRational>) -> Result<()> {
        let encl = std::mem::take(&mut self.encl);
        for e in encl {
            let Enclosure::Float(b) = &e else {
                self.encl.push(e);
                continue;
            };
            let (lo, hi) = b.x_range();
            let (lo, hi) = (rational(lo), rational(hi));
            let keep = self.side_ok(&lo, &hi, &interval.lo, true)?
                && self.side_ok(&lo, &hi, &interval.hi, false)?;
            if keep {
                self.encl.push(e);
            }
        }
        Ok(())
    }

    /// Whether the single root in `[lo, hi]` satisfies one bound.
    fn side_ok(
        &self,
        lo: &BigRational,
        hi: &BigRational,
        bound: &Bound<BigRational>,
        lower: bool,
    ) -> Result<bool> {
        let (e, closed) = match bound {
            Bound::Unbounded => return Ok(true),
            Bound::Included(e) => (e, true),
            Bound::Excluded(e) => (e, false),
        };
        if lo == hi {
            return Ok(match lo.cmp(e) {
                Ordering::Equal => closed,
                Ordering::Greater => lower,
                Ordering::Less => !lower,
            });
        }
        // Open enclosure: the root lies strictly inside (lo, hi).
        if e <= lo {
            return Ok(lower);
        }
        if e >= hi {
            return Ok(!lower);
        }
        let se = self.sign(e);
        if se == Ordering::Equal {
            return Ok(closed);
        }
        let slo = self.sign(lo);
        let shi = self.sign(hi);
        if slo == Ordering::Equal || shi == Ordering::Equal || slo == shi {
            return Err(Error::Certification {
                location: to_f64(e),
                reason: "cannot place a root relative to an interval end".into(),
            });
        }
        // Root above e exactly when P(e) still has the sign at lo.
        let above = se == slo;
        Ok(above == lower)
    }

    fn refine(&self, e: &mut Enclosure, width: &BigRational) {
        match (e, &self.engine) {
            (Enclosure::Rat(r), Engine::Exact(chain)) => chain.refine_root(r, width),
            (Enclosure::Float(b), Engine::Float(Some(iso), _)) => {
                if !b.is_exact() {
                    iso.refine(b, to_f64(width));
                }
            }
            _ => {}
        }
    }

    fn interval_of(e: &Enclosure) -> RootInterval<BigRational> {
        match e {
            Enclosure::Rat(r) => r.clone(),
            Enclosure::Float(b) => {
                let (lo, hi) = b.x_range();
                RootInterval { lo: rational(lo), hi: rational(hi) }
            }
        }
    }

    fn report(mut self, width: &BigRational) -> RootReport {
        let mut encl = std::mem::take(&mut self.encl);
        for e in &mut encl {
            self.refine(e, width);
        }
        let intervals: Vec<RootInterval<BigRational>> = encl.iter().map(Self::interval_of).collect();
        let two = BigRational::from_integer(BigInt::from(2));
        let refined_roots: Vec<f64> = intervals
            .iter()
            .map(|r| to_f64(&((&r.lo + &r.hi) / &two)))
            .collect();
        let multiple_root_flag = match &self.engine {
            Engine::Exact(chain) => Some(chain.has_multiple_roots()),
            Engine::Float(_, true) => Some(true),
            Engine::Float(_, false) => None,
        };
        let method = self.method();
        let mut report = RootReport {
            distinct_count: intervals.len(),
            intervals,
            refined_roots,
            min_gap: None,
            multiple_root_flag,
            method,
        };
        report.min_gap = min_gap(&report);
        report
    }
}

/// Number of distinct real roots of `p` in `interval` (whole line if `None`).
pub fn count_real_roots(p: &RandomPoly, interval: Option<&Interval<BigRational>>) -> Result<usize> {
    count_real_roots_with(p, interval, Method::Auto)
}

pub fn count_real_roots_with(
    p: &RandomPoly,
    interval: Option<&Interval<BigRational>>,
    method: Method,
) -> Result<usize> {
    let all = Interval::all();
    let interval = interval.unwrap_or(&all);
    let exact = exact_poly(p);
    if exact.is_empty() {
        return Err(Error::invalid("the zero polynomial has infinitely many roots"));
    }
    let sturm = match method {
        Method::Exact => true,
        Method::Float => false,
        Method::Auto => matches!(p, RandomPoly::Int(_)) && exact.len() - 1 <= EXACT_AUTO_MAX_DEGREE,
    };
    if sturm {
        return Ok(SturmChain::new(&Polynomial::new(exact))?.count(interval));
    }
    Ok(Roots::new(p, interval, method)?.encl.len())
}

/// Isolating intervals of width at most `width` for every distinct root in
/// `interval`. On the float path the width is limited to a few ulps.
pub fn isolate_and_refine(
    p: &RandomPoly,
    interval: Option<&Interval<BigRational>>,
    width: &BigRational,
) -> Result<RootReport> {
    isolate_and_refine_with(p, interval, width, Method::Auto)
}

pub fn isolate_and_refine_with(
    p: &RandomPoly,
    interval: Option<&Interval<BigRational>>,
    width: &BigRational,
    method: Method,
) -> Result<RootReport> {
    if !width.is_positive() {
        return Err(Error::invalid("refinement width must be positive"));
    }
    let all = Interval::all();
    Ok(Roots::new(p, interval.unwrap_or(&all), method)?.report(width))
}

/// Smallest distance between consecutive refined roots.
pub fn min_gap(report: &RootReport) -> Option<f64> {
    report
        .refined_roots
        .windows(2)
        .map(|w| w[1] - w[0])
        .min_by(|a, b| a.partial_cmp(b).unwrap())
}

/// `Σ i(i−1)|cᵢ| Rⁱ⁻²`, an upper bound on `|f″|` over `|x| ≤ R`.
fn second_derivative_bound(p: &RandomPoly, r: f64) -> f64 {
    let c = p.to_float();
    let c = c.coeffs();
    let n = c.len();
    let mut acc = 0.0;
    for i in (2..n).rev() {
        acc = acc * r + (i * (i - 1)) as f64 * c[i].abs();
    }
    acc * (1.0 + 1e-10)
}

/// Locations in `domain` where `|P| ≤ n^{−B}` and `|P′| ≤ n^{−B}` both hold.
///
/// Candidates are the real roots of `P` (checked for small `|P′|`) and of
/// `P′` (checked for small `|P|`); values are computed exactly at rational
/// points and enclosures are refined until the comparison is decided.
pub fn near_double_scan(
    p: &RandomPoly,
    b: f64,
    domain: Option<&Interval<BigRational>>,
) -> Result<Vec<NearDoubleEvent>> {
    if !(b > 0.0) {
        return Err(Error::invalid("B must be positive"));
    }
    let n = p.degree().max(1);
    let threshold = (n as f64).powf(-b);
    let all = Interval::all();
    let domain = domain.unwrap_or(&all);
    let dp = p.transform(crate::poly::Transform::Derivative);

    let mut events = Vec::new();
    let roots = Roots::new(p, domain, Method::Auto)?;
    let m2 = |e: &Enclosure| {
        let r = Roots::interval_of(e);
        second_derivative_bound(p, to_f64(&r.lo).abs().max(to_f64(&r.hi).abs()))
    };
    for e in roots.encl.clone() {
        // At a root of P: P = 0, bound |P′| over the enclosure.
        let ev = decide(&roots, e, threshold, |r, mid, hw| {
            let d = to_f64(&exact_value(&dp, mid).abs());
            let slack = m2(&Enclosure::Rat(r.clone())) * hw;
            (0.0, d - slack, d + slack)
        });
        events.extend(ev);
    }
    if !exact_poly(&dp).is_empty() && dp.degree() > 0 {
        let crit = Roots::new(&dp, domain, Method::Auto)?;
        for e in crit.encl.clone() {
            // At a critical point: P′ = 0, bound |P| over the enclosure.
            let ev = decide(&crit, e, threshold, |r, mid, hw| {
                let v = to_f64(&exact_value(p, mid).abs());
                let d = to_f64(&exact_value(&dp, mid).abs());
                let slack = (d + m2(&Enclosure::Rat(r.clone())) * hw) * hw;
                (1.0, v - slack, v + slack)
            });
            events.extend(ev);
        }
    }
    events.sort_by(|a, b| a.lo.partial_cmp(&b.lo).unwrap());
    let mut merged: Vec<NearDoubleEvent> = Vec::new();
    for e in events {
        match merged.last_mut() {
            Some(last) if e.lo <= last.hi => {
                last.hi = last.hi.max(e.hi);
                last.p_bound = last.p_bound.min(e.p_bound);
                last.dp_bound = last.dp_bound.min(e.dp_bound);
                last.certified &= e.certified;
            }
            _ => merged.push(e),
        }
    }
    Ok(merged)
}

/// Refines one enclosure until the tested quantity is decided against the
/// threshold. `probe` returns `(kind, lower, upper)` where kind 0 means the
/// quantity is `|P′|` at a root and 1 means `|P|` at a critical point.
fn decide(
    roots: &Roots,
    mut e: Enclosure,
    threshold: f64,
    probe: impl Fn(&RootInterval<BigRational>, &BigRational, f64) -> (f64, f64, f64),
) -> Option<NearDoubleEvent> {
    let two = BigRational::from_integer(BigInt::from(2));
    let mut width = {
        let r = Roots::interval_of(&e);
        (&r.hi - &r.lo) / &two
    };
    for _ in 0..200 {
        let r = Roots::interval_of(&e);
        let mid = (&r.lo + &r.hi) / &two;
        let hw = to_f64(&((&r.hi - &r.lo) / &two));
        let (kind, lower, upper) = probe(&r, &mid, hw);
        let certain = upper <= threshold;
        if certain || lower > threshold {
            return certain.then(|| event(&r, kind, upper, threshold, true));
        }
        if r.is_exact() || width.is_zero() {
            break;
        }
        let before = r.hi.clone() - r.lo.clone();
        roots.refine(&mut e, &width);
        let after = Roots::interval_of(&e);
        if after.hi.clone() - after.lo.clone() >= before {
            // No further progress possible at this precision.
            return Some(event(&after, kind, upper, threshold, false));
        }
        width = &width / &two;
    }
    let r = Roots::interval_of(&e);
    Some(event(&r, 0.0, f64::INFINITY, threshold, false))
}

fn event(r: &RootInterval<BigRational>, kind: f64, upper: f64, threshold: f64, certified: bool) -> NearDoubleEvent {
    let (p_bound, dp_bound) = if kind == 0.0 { (0.0, upper) } else { (upper, 0.0) };
    NearDoubleEvent {
        lo: to_f64(&r.lo),
        hi: to_f64(&r.hi),
        p_bound,
        dp_bound,
        threshold,
        certified,
    }
}

/// Pairs roots of `f` in `domain` with roots of `g`: for each root `x₀`,
/// checks the perturbation preconditions on `I = [x₀ − ε₁/M, x₀ + ε₁/M]`
/// and certifies a sign change of `g` on `I`.
pub fn root_match(
    f: &RandomPoly,
    g: &RandomPoly,
    eps1: f64,
    m: f64,
    domain: Option<&Interval<BigRational>>,
) -> Result<MatchReport> {
    if !(eps1 > 0.0 && m > 0.0) {
        return Err(Error::invalid("eps1 and M must be positive"));
    }
    let width = rational(1e-14);
    let report = isolate_and_refine(f, domain, &width)?;
    let ff = f.to_float();
    let gf = g.to_float();
    let df = ff.derivative();
    let ddf = df.derivative();
    let gz = exact_poly(g);
    let radius = eps1 / m;
    let sup_tol = eps1 * eps1 / (4.0 * m);
    const GRID: usize = 128;
    let mut out = MatchReport::default();
    for &x0 in &report.refined_roots {
        let (lo, hi) = (x0 - radius, x0 + radius);
        let mut ok = df.eval_compensated(x0).abs() >= eps1;
        for k in 0..=GRID {
            if !ok {
                break;
            }
            let x = lo + (hi - lo) * k as f64 / GRID as f64;
            ok &= ddf.eval_compensated(x).abs() <= m;
            ok &= (ff.eval_compensated(x) - gf.eval_compensated(x)).abs() <= sup_tol;
        }
        let matched = ok && {
            if gz.is_empty() {
                true
            } else {
                let sl = sign_at(&gz, &Point::At(rational(lo)));
                let sh = sign_at(&gz, &Point::At(rational(hi)));
                sl == Ordering::Equal || sh == Ordering::Equal || sl != sh
            }
        };
        out.roots.push(RootMatch {
            root: x0,
            lo,
            hi,
            preconditions: ok,
            matched,
        });
    }
    Ok(out)
}
