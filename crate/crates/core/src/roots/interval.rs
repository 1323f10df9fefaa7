use std::ops::Bound;

use num_rational::BigRational;

/// Real interval with open, closed or infinite ends.
#[derive(Debug, Clone, PartialEq)]
pub struct Interval<T> {
    pub lo: Bound<T>,
    pub hi: Bound<T>,
}

impl<T: PartialOrd + Clone> Interval<T> {
    pub fn all() -> Self {
        Self { lo: Bound::Unbounded, hi: Bound::Unbounded }
    }

    pub fn open(a: T, b: T) -> Self {
        Self { lo: Bound::Excluded(a), hi: Bound::Excluded(b) }
    }

    pub fn closed(a: T, b: T) -> Self {
        Self { lo: Bound::Included(a), hi: Bound::Included(b) }
    }

    /// `(a, b]`
    pub fn open_closed(a: T, b: T) -> Self {
        Self { lo: Bound::Excluded(a), hi: Bound::Included(b) }
    }

    /// `[a, b)`
    pub fn closed_open(a: T, b: T) -> Self {
        Self { lo: Bound::Included(a), hi: Bound::Excluded(b) }
    }

    pub fn contains(&self, x: &T) -> bool {
        let above = match &self.lo {
            Bound::Unbounded => true,
            Bound::Included(a) => x >= a,
            Bound::Excluded(a) => x > a,
        };
        let below = match &self.hi {
            Bound::Unbounded => true,
            Bound::Included(b) => x <= b,
            Bound::Excluded(b) => x < b,
        };
        above && below
    }

    pub fn lo_value(&self) -> Option<&T> {
        match &self.lo {
            Bound::Included(a) | Bound::Excluded(a) => Some(a),
            Bound::Unbounded => None,
        }
    }

    pub fn hi_value(&self) -> Option<&T> {
        match &self.hi {
            Bound::Included(b) | Bound::Excluded(b) => Some(b),
            Bound::Unbounded => None,
        }
    }

    pub fn map<U>(&self, f: impl Fn(&T) -> U) -> Interval<U> {
        let m = |b: &Bound<T>| match b {
            Bound::Unbounded => Bound::Unbounded,
            Bound::Included(v) => Bound::Included(f(v)),
            Bound::Excluded(v) => Bound::Excluded(f(v)),
        };
        Interval { lo: m(&self.lo), hi: m(&self.hi) }
    }
}

impl Interval<f64> {
    /// The same set with exact rational endpoints.
    pub fn to_rational(&self) -> Interval<BigRational> {
        self.map(|&v| BigRational::from_float(v).expect("finite interval endpoint"))
    }

    pub fn is_empty(&self) -> bool {
        match (self.lo_value(), self.hi_value()) {
            (Some(a), Some(b)) => {
                a > b
                    || (a == b
                        && !(matches!(self.lo, Bound::Included(_))
                            && matches!(self.hi, Bound::Included(_))))
            }
            _ => false,
        }
    }
}

/// Closed isolating interval `[lo, hi]`; `lo == hi` marks an exact root.
#[derive(Debug, Clone, PartialEq)]
pub struct RootInterval<T> {
    pub lo: T,
    pub hi: T,
}

impl<T: PartialEq> RootInterval<T> {
    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }
}
