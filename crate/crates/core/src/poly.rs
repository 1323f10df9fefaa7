use num_bigint::{BigInt, ToBigInt};
use num_rational::BigRational;
use num_traits::{Float, One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Dense univariate polynomial, coefficients in ascending power order.
///
/// The nominal degree is `coeffs.len() - 1`; a vanishing leading
/// coefficient is kept as is so that a sampled `P_n` always reports `n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Polynomial<T> {
    coeffs: Vec<T>,
}

/// Structural transforms preserving the Kac ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Transform {
    /// `P′`
    Derivative,
    /// `xⁿ P(1/x)`
    Reciprocal,
    /// `P(−x)`
    NegateArg,
}

impl<T: Scalar> Polynomial<T> {
    /// Builds `a₀ + a₁x + … + aₙxⁿ`. An empty vector is the zero polynomial.
    pub fn new(mut coeffs: Vec<T>) -> Self {
        if coeffs.is_empty() {
            coeffs.push(T::zero());
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self::new(vec![T::zero()])
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Degree after dropping vanishing leading coefficients (`None` for 0).
    pub fn effective_degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| !c.is_zero())
    }

    /// Copy without vanishing leading coefficients.
    pub fn trimmed(&self) -> Self {
        let len = self.effective_degree().map_or(1, |d| d + 1);
        Self::new(self.coeffs[..len].to_vec())
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self::zero();
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c.scale_by_index(i))
                .collect(),
        )
    }

    pub fn reciprocal(&self) -> Self {
        Self::new(self.coeffs.iter().rev().cloned().collect())
    }

    pub fn negate_arg(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| if i % 2 == 1 { -c.clone() } else { c.clone() })
                .collect(),
        )
    }

    pub fn transform(&self, kind: Transform) -> Self {
        match kind {
            Transform::Derivative => self.derivative(),
            Transform::Reciprocal => self.reciprocal(),
            Transform::NegateArg => self.negate_arg(),
        }
    }

    /// The first `m + 1` coefficients, i.e. `P_m` for a sampled `P_n`.
    pub fn truncate(&self, m: usize) -> Self {
        Self::new(self.coeffs[..=m.min(self.degree())].to_vec())
    }

    /// Plain Horner evaluation in the coefficient ring.
    pub fn horner(&self, x: &T) -> T {
        self.coeffs
            .iter()
            .rev()
            .fold(T::zero(), |acc, c| acc * x.clone() + c.clone())
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Polynomial<U> {
        Polynomial::new(self.coeffs.iter().map(f).collect())
    }
}

impl<T: Scalar + ToBigInt> Polynomial<T> {
    pub fn to_big(&self) -> Polynomial<BigInt> {
        self.map(|c| c.to_bigint().expect("integer coefficient"))
    }

    /// Error-free value at a rational point.
    pub fn eval_rational(&self, x: &BigRational) -> BigRational {
        let (num, den) = (x.numer(), x.denom());
        let mut acc = BigInt::zero();
        let mut den_pow = BigInt::one();
        for c in self.coeffs.iter().rev() {
            let c = c.to_bigint().expect("integer coefficient");
            acc = acc * num + c * &den_pow;
            den_pow *= den;
        }
        // den_pow overshoots by one factor of `den`.
        BigRational::new(acc * den, den_pow)
    }
}

impl<F: Float + Scalar> Polynomial<F> {
    /// Horner evaluation with the rounding error of every step carried in a
    /// second accumulator (error-free `two_sum` / `two_prod`).
    ///
    /// The result is as accurate as if computed in twice the working
    /// precision and then rounded.
    pub fn eval_compensated(&self, x: F) -> F {
        compensated_horner(&self.coeffs, x).0
    }
}

/// `a + b = s + e` exactly.
#[inline]
pub(crate) fn two_sum<F: Float>(a: F, b: F) -> (F, F) {
    let s = a + b;
    let z = s - a;
    let e = (a - (s - z)) + (b - z);
    (s, e)
}

/// `a · b = p + e` exactly (requires a fused multiply-add).
#[inline]
pub(crate) fn two_prod<F: Float>(a: F, b: F) -> (F, F) {
    let p = a * b;
    let e = a.mul_add(b, -p);
    (p, e)
}

/// Compensated Horner over a coefficient slice; returns `(value, |raw|)`
/// where `raw` is the uncorrected Horner value.
#[inline]
pub(crate) fn compensated_horner<F: Float>(coeffs: &[F], x: F) -> (F, F) {
    let mut s = match coeffs.last() {
        Some(&c) => c,
        None => return (F::zero(), F::zero()),
    };
    let mut c = F::zero();
    for &a in coeffs.iter().rev().skip(1) {
        let (p, pi) = two_prod(s, x);
        let (t, sigma) = two_sum(p, a);
        s = t;
        c = c * x + (pi + sigma);
    }
    (s + c, s.abs())
}

/// Evaluation strategy for [`RandomPoly::evaluate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalMode {
    Standard,
    Compensated,
    ExactRational,
}

/// A sampled Kac polynomial: lossless integers for discrete atoms, doubles
/// for continuous ones.
#[derive(Debug, Clone, PartialEq)]
pub enum RandomPoly {
    Int(Polynomial<i64>),
    Float(Polynomial<f64>),
}

/// Result of [`RandomPoly::evaluate`].
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Float(f64),
    Exact(BigRational),
}

impl Value {
    pub fn to_f64(&self) -> f64 {
        match self {
            Value::Float(v) => *v,
            Value::Exact(q) => q.to_f64().unwrap_or(f64::NAN),
        }
    }
}

impl RandomPoly {
    pub fn degree(&self) -> usize {
        match self {
            RandomPoly::Int(p) => p.degree(),
            RandomPoly::Float(p) => p.degree(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            RandomPoly::Int(p) => p.is_zero(),
            RandomPoly::Float(p) => p.is_zero(),
        }
    }

    /// Coefficients widened to `f64` (exact for integers below 2⁵³).
    pub fn to_float(&self) -> Polynomial<f64> {
        match self {
            RandomPoly::Int(p) => p.map(|&c| c as f64),
            RandomPoly::Float(p) => p.clone(),
        }
    }

    pub fn as_int(&self) -> Option<&Polynomial<i64>> {
        match self {
            RandomPoly::Int(p) => Some(p),
            RandomPoly::Float(_) => None,
        }
    }

    pub fn transform(&self, kind: Transform) -> Self {
        match self {
            RandomPoly::Int(p) => RandomPoly::Int(p.transform(kind)),
            RandomPoly::Float(p) => RandomPoly::Float(p.transform(kind)),
        }
    }

    pub fn truncate(&self, m: usize) -> Self {
        match self {
            RandomPoly::Int(p) => RandomPoly::Int(p.truncate(m)),
            RandomPoly::Float(p) => RandomPoly::Float(p.truncate(m)),
        }
    }

    /// Evaluates at `x`. Float modes round `x` to the nearest double first;
    /// exact mode requires integer coefficients.
    pub fn evaluate(&self, x: &BigRational, mode: EvalMode) -> Result<Value> {
        match mode {
            EvalMode::ExactRational => match self {
                RandomPoly::Int(p) => Ok(Value::Exact(p.eval_rational(x))),
                RandomPoly::Float(_) => Err(Error::invalid(
                    "exact-rational evaluation needs integer coefficients",
                )),
            },
            EvalMode::Standard | EvalMode::Compensated => {
                let xf = x
                    .to_f64()
                    .ok_or_else(|| Error::invalid("point not representable as f64"))?;
                Ok(Value::Float(self.eval_f64(xf, mode == EvalMode::Compensated)))
            }
        }
    }

    pub fn eval_f64(&self, x: f64, compensated: bool) -> f64 {
        let p = self.to_float();
        if compensated {
            p.eval_compensated(x)
        } else {
            p.horner(&x)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn horner_small_cases() {
        let p = Polynomial::new(vec![1i64, 1, 1]);
        assert_eq!(p.horner(&1), 3);
        let p = Polynomial::new(vec![1i64, -1]);
        assert_eq!(p.horner(&1), 0);
    }

    #[test]
    fn transforms_match_examples() {
        let p = Polynomial::new(vec![1i64, 2, 3]);
        assert_eq!(p.derivative().coeffs(), &[2, 6]);
        assert_eq!(p.reciprocal().coeffs(), &[3, 2, 1]);
        assert_eq!(p.negate_arg().coeffs(), &[1, -2, 3]);
        let c = Polynomial::new(vec![5i64]);
        assert_eq!(c.derivative(), Polynomial::zero());
    }

    #[test]
    fn exact_eval_at_rational() {
        // 1 - 3x + 2x^2 at 1/2 = 0
        let p = Polynomial::new(vec![1i64, -3, 2]);
        assert!(p.eval_rational(&q(1, 2)).is_zero());
        assert_eq!(p.eval_rational(&q(-2, 3)), q(1, 1) + q(2, 1) + q(8, 9));
    }

    #[test]
    fn exact_mode_rejects_float_coefficients() {
        let p = RandomPoly::Float(Polynomial::new(vec![1.0, 2.0]));
        assert!(matches!(
            p.evaluate(&q(1, 1), EvalMode::ExactRational),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn compensated_beats_plain_near_one() {
        // (x - 1)^7 expanded, evaluated just off the root
        let c: Vec<f64> = vec![-1.0, 7.0, -21.0, 35.0, -35.0, 21.0, -7.0, 1.0];
        let p = Polynomial::new(c.clone());
        let ip = Polynomial::new(c.iter().map(|&v| v as i64).collect::<Vec<_>>());
        let x = 1.0 + 1.0 / 1024.0;
        let exact = ip
            .eval_rational(&BigRational::from_float(x).unwrap())
            .to_f64()
            .unwrap();
        let comp = p.eval_compensated(x);
        assert!(((comp - exact) / exact).abs() < 1e-15);
    }

    #[test]
    fn generic_over_scalar_types() {
        let p32 = Polynomial::new(vec![1.0f32, 2.0, 3.0]);
        assert_eq!(p32.horner(&2.0), 17.0);
        let pr = Polynomial::new(vec![q(1, 2), q(1, 3)]);
        assert_eq!(pr.derivative().coeffs(), &[q(1, 3)]);
        let pb = Polynomial::new(vec![BigInt::from(4), BigInt::from(-1)]);
        assert_eq!(pb.horner(&BigInt::from(4)), BigInt::zero());
    }
}
