//! Exact real-root counting and isolation for integer polynomials.
//!
//! Works on the squarefree part `P / gcd(P, P′)` so that Sturm's theorem
//! counts distinct roots. Remainders are pseudo-remainders scaled by a
//! positive factor and reduced to primitive form, which keeps the signs of
//! the sequence intact while bounding coefficient growth.

use std::cmp::Ordering;
use std::ops::Bound;

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::interval::{Interval, RootInterval};
use crate::error::{Error, Result};
use crate::poly::Polynomial;

/// Dense integer polynomial, ascending, no vanishing leading coefficient.
/// The zero polynomial is the empty vector.
pub(crate) type ZPoly = Vec<BigInt>;

pub(crate) fn trim(mut p: ZPoly) -> ZPoly {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

fn deg(p: &ZPoly) -> usize {
    p.len() - 1
}

pub(crate) fn derivative(p: &ZPoly) -> ZPoly {
    trim(
        p.iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * BigInt::from(i))
            .collect(),
    )
}

fn content(p: &ZPoly) -> BigInt {
    p.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
}

/// Divides out the (positive) content; signs are preserved.
fn primitive(p: ZPoly) -> ZPoly {
    let g = content(&p);
    if g.is_zero() || g.is_one() {
        return p;
    }
    p.into_iter().map(|c| c / &g).collect()
}

/// Pseudo-remainder of `a` by `b`, multiplied by a positive constant.
fn prem(a: &ZPoly, b: &ZPoly) -> ZPoly {
    let lb = b.last().expect("nonzero divisor");
    let lb_abs = lb.abs();
    let sign_b = lb.signum();
    let mut r = a.clone();
    while !r.is_empty() && r.len() >= b.len() {
        let shift = r.len() - b.len();
        let lr = r.last().unwrap().clone();
        let factor = &sign_b * lr;
        for c in r.iter_mut() {
            *c *= &lb_abs;
        }
        for (i, bc) in b.iter().enumerate() {
            r[i + shift] -= &factor * bc;
        }
        r = trim(r);
    }
    r
}

/// Primitive gcd with positive leading coefficient.
pub(crate) fn gcd(a: &ZPoly, b: &ZPoly) -> ZPoly {
    let (mut x, mut y) = (primitive(a.clone()), primitive(b.clone()));
    if x.len() < y.len() {
        std::mem::swap(&mut x, &mut y);
    }
    while !y.is_empty() {
        let r = primitive(prem(&x, &y));
        x = y;
        y = r;
    }
    if x.last().is_some_and(Signed::is_negative) {
        x = x.into_iter().map(|c| -c).collect();
    }
    x
}

/// `a / b` when `b` divides `a` over the integers.
fn exact_div(a: &ZPoly, b: &ZPoly) -> ZPoly {
    let lb = b.last().expect("nonzero divisor");
    let mut r = a.clone();
    let mut q = vec![BigInt::zero(); a.len().saturating_sub(b.len()) + 1];
    while !r.is_empty() && r.len() >= b.len() {
        let shift = r.len() - b.len();
        let (coef, rem) = r.last().unwrap().div_rem(lb);
        debug_assert!(rem.is_zero(), "inexact polynomial division");
        for (i, bc) in b.iter().enumerate() {
            r[i + shift] -= &coef * bc;
        }
        q[shift] = coef;
        r = trim(r);
    }
    trim(q)
}

/// A point of the extended real line.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Point {
    NegInf,
    At(BigRational),
    PosInf,
}

/// Sign of `p` at `x`.
pub(crate) fn sign_at(p: &ZPoly, x: &Point) -> Ordering {
    let Some(lead) = p.last() else {
        return Ordering::Equal;
    };
    match x {
        Point::PosInf => lead.sign_ord(),
        Point::NegInf => {
            let s = lead.sign_ord();
            if deg(p) % 2 == 1 { s.reverse() } else { s }
        }
        Point::At(q) => {
            // Σ cᵢ pⁱ q^{d−i} has the sign of P(p/q) since q > 0.
            let (num, den) = (q.numer(), q.denom());
            let mut acc = BigInt::zero();
            let mut den_pow = BigInt::one();
            for c in p.iter().rev() {
                acc = acc * num + c * &den_pow;
                den_pow *= den;
            }
            acc.sign_ord()
        }
    }
}

trait SignOrd {
    fn sign_ord(&self) -> Ordering;
}

impl SignOrd for BigInt {
    fn sign_ord(&self) -> Ordering {
        self.cmp(&BigInt::zero())
    }
}

/// Sturm sequence of the squarefree part of an integer polynomial.
#[derive(Debug, Clone)]
pub struct SturmChain {
    seq: Vec<ZPoly>,
    multiple_roots: bool,
}

impl SturmChain {
    pub fn new(p: &Polynomial<BigInt>) -> Result<Self> {
        let p = trim(p.coeffs().to_vec());
        if p.is_empty() {
            return Err(Error::invalid("the zero polynomial has no isolated roots"));
        }
        let dp = derivative(&p);
        let (sqfree, multiple_roots) = if dp.is_empty() {
            (primitive(p), false)
        } else {
            let g = gcd(&p, &dp);
            let multiple = g.len() > 1;
            (primitive(if multiple { exact_div(&p, &g) } else { p }), multiple)
        };
        let mut seq = vec![sqfree];
        let d1 = primitive(derivative(&seq[0]));
        if !d1.is_empty() {
            seq.push(d1);
            loop {
                let k = seq.len();
                let r = prem(&seq[k - 2], &seq[k - 1]);
                if r.is_empty() {
                    break;
                }
                seq.push(primitive(r).into_iter().map(|c| -c).collect());
            }
        }
        Ok(Self { seq, multiple_roots })
    }

    pub fn from_ints(p: &Polynomial<i64>) -> Result<Self> {
        Self::new(&p.to_big())
    }

    /// Whether the input had a repeated root (`gcd(P, P′)` nonconstant).
    pub fn has_multiple_roots(&self) -> bool {
        self.multiple_roots
    }

    #[cfg(test)]
    pub(crate) fn squarefree(&self) -> &ZPoly {
        &self.seq[0]
    }

    fn variations(&self, x: &Point) -> usize {
        let mut last = Ordering::Equal;
        let mut count = 0;
        for s in &self.seq {
            let sg = sign_at(s, x);
            if sg == Ordering::Equal {
                continue;
            }
            if last != Ordering::Equal && sg != last {
                count += 1;
            }
            last = sg;
        }
        count
    }

    fn is_root(&self, x: &BigRational) -> bool {
        sign_at(&self.seq[0], &Point::At(x.clone())) == Ordering::Equal
    }

    /// Distinct roots in the half-open `(a, b]`.
    fn count_half_open(&self, a: &Point, b: &Point) -> usize {
        self.variations(a) - self.variations(b)
    }

    /// Distinct roots in the open `(a, b)`.
    fn count_open(&self, a: &Point, b: &Point) -> usize {
        let at_b = match b {
            Point::At(q) => usize::from(self.is_root(q)),
            _ => 0,
        };
        self.count_half_open(a, b) - at_b
    }

    /// Distinct real roots in `interval`.
    pub fn count(&self, interval: &Interval<BigRational>) -> usize {
        let lo = bound_point(&interval.lo, Point::NegInf);
        let hi = bound_point(&interval.hi, Point::PosInf);
        if let (Point::At(a), Point::At(b)) = (&lo, &hi) {
            if a > b {
                return 0;
            }
            if a == b {
                let closed = matches!(interval.lo, Bound::Included(_))
                    && matches!(interval.hi, Bound::Included(_));
                return usize::from(closed && self.is_root(a));
            }
        }
        let mut n = self.count_open(&lo, &hi);
        if let Bound::Included(a) = &interval.lo {
            n += usize::from(self.is_root(a));
        }
        if let Bound::Included(b) = &interval.hi {
            n += usize::from(self.is_root(b));
        }
        n
    }

    /// Power of two strictly exceeding every root modulus (Cauchy bound).
    fn root_bound(&self) -> BigRational {
        let p = &self.seq[0];
        let lead = p.last().unwrap().abs();
        let max = p.iter().map(Signed::abs).max().unwrap();
        let bound = BigRational::one() + BigRational::new(max, lead);
        let mut b = BigRational::one();
        while b <= bound {
            b *= BigInt::from(2);
        }
        b
    }

    /// Disjoint closed isolating intervals of width at most `width`, one
    /// per distinct root in `interval`, ascending. Nondegenerate intervals
    /// carry a strict sign change of the squarefree part.
    pub fn isolate(
        &self,
        interval: &Interval<BigRational>,
        width: &BigRational,
    ) -> Result<Vec<RootInterval<BigRational>>> {
        if !width.is_positive() {
            return Err(Error::invalid("refinement width must be positive"));
        }
        let bound = self.root_bound();
        let lo = match interval.lo_value() {
            Some(a) if *a > -&bound => a.clone(),
            _ => -&bound,
        };
        let hi = match interval.hi_value() {
            Some(b) if *b < bound => b.clone(),
            _ => bound.clone(),
        };
        let mut out = Vec::new();
        if lo > hi {
            return Ok(out);
        }
        if matches!(interval.lo, Bound::Included(_)) && self.is_root(&lo) {
            out.push(RootInterval { lo: lo.clone(), hi: lo.clone() });
        }
        if lo == hi {
            return Ok(out);
        }
        let two = BigRational::from_integer(BigInt::from(2));
        // Open subintervals, processed left to right.
        let mut stack = vec![(lo.clone(), hi.clone())];
        while let Some((a, b)) = stack.pop() {
            if a == b {
                out.push(RootInterval { lo: a, hi: b });
                continue;
            }
            let n = self.count_open(&Point::At(a.clone()), &Point::At(b.clone()));
            if n == 0 {
                continue;
            }
            if n == 1 {
                out.push(self.refine_single(a, b, width));
                continue;
            }
            let m = (&a + &b) / &two;
            stack.push((m.clone(), b));
            if self.is_root(&m) {
                stack.push((m.clone(), m.clone()));
            }
            stack.push((a, m));
        }
        let mut roots = out;
        if matches!(interval.hi, Bound::Included(_)) && self.is_root(&hi) {
            roots.push(RootInterval { lo: hi.clone(), hi });
        }
        self.separate(&mut roots);
        Ok(roots)
    }

    /// Refines an isolating interval produced by [`Self::isolate`] in place.
    pub fn refine_root(&self, r: &mut RootInterval<BigRational>, width: &BigRational) {
        if r.is_exact() {
            return;
        }
        *r = self.refine_single(r.lo.clone(), r.hi.clone(), width);
    }

    /// Shrinks the unique root in the open `(a, b)` to width `width`, with
    /// nonzero signs at both ends (or hits it exactly).
    fn refine_single(
        &self,
        mut a: BigRational,
        mut b: BigRational,
        width: &BigRational,
    ) -> RootInterval<BigRational> {
        if a == b {
            return RootInterval { lo: a, hi: b };
        }
        let two = BigRational::from_integer(BigInt::from(2));
        let sq = &self.seq[0];
        loop {
            let sa = sign_at(sq, &Point::At(a.clone()));
            let sb = sign_at(sq, &Point::At(b.clone()));
            if sa != Ordering::Equal && sb != Ordering::Equal && &(&b - &a) <= width {
                return RootInterval { lo: a, hi: b };
            }
            let m = (&a + &b) / &two;
            let sm = sign_at(sq, &Point::At(m.clone()));
            if sm == Ordering::Equal {
                return RootInterval { lo: m.clone(), hi: m };
            }
            if sa != Ordering::Equal && sb != Ordering::Equal {
                if sm == sa {
                    a = m;
                } else {
                    b = m;
                }
            } else if self.count_open(&Point::At(a.clone()), &Point::At(m.clone())) == 1 {
                b = m;
            } else {
                a = m;
            }
        }
    }

    /// Bisects touching neighbours until the closed intervals are disjoint.
    fn separate(&self, roots: &mut [RootInterval<BigRational>]) {
        let two = BigRational::from_integer(BigInt::from(2));
        let sq = self.seq[0].clone();
        let step = |r: &mut RootInterval<BigRational>| {
            if r.lo == r.hi {
                return;
            }
            let m = (&r.lo + &r.hi) / &two;
            let sm = sign_at(&sq, &Point::At(m.clone()));
            if sm == Ordering::Equal {
                r.lo = m.clone();
                r.hi = m;
            } else if sm == sign_at(&sq, &Point::At(r.lo.clone())) {
                r.lo = m;
            } else {
                r.hi = m;
            }
        };
        loop {
            let mut touched = false;
            for i in 1..roots.len() {
                if roots[i - 1].hi >= roots[i].lo {
                    touched = true;
                    let (left, right) = roots.split_at_mut(i);
                    step(&mut left[i - 1]);
                    step(&mut right[0]);
                }
            }
            if !touched {
                break;
            }
        }
    }
}

fn bound_point(b: &Bound<BigRational>, inf: Point) -> Point {
    match b {
        Bound::Unbounded => inf,
        Bound::Included(v) | Bound::Excluded(v) => Point::At(v.clone()),
    }
}
