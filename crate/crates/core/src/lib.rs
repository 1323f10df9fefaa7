//! Real-root statistics of Kac random polynomials `P(x) = Σ ξᵢ xⁱ`.
//!
//! The crate is organised around five layers:
//!
//! * [`poly`], [`atom`], [`rng`]: polynomial representation, evaluation
//!   (plain, compensated, exact rational), structural transforms and
//!   reproducible coefficient sampling.
//! * [`roots`]: exact Sturm counting for integer polynomials, certified
//!   floating-point isolation for everything else, near-double-root scans,
//!   minimal gaps and root matching.
//! * [`ekq`]: the Gaussian real-zero density and its quadrature.
//! * [`exact`]: big-integer lattice counts (double roots at ±1,
//!   anti-concentration, small-ball probabilities, lacunary separation).
//! * [`mc`]: deterministic parallel Monte Carlo experiments.
//!
//! Numeric code is generic over the scalar type through `num-traits`; the
//! aliases below name the instantiations used throughout.

pub mod atom;
pub mod ekq;
pub mod error;
pub mod exact;
pub mod mc;
pub mod poly;
pub mod rng;
pub mod roots;
pub mod scalar;

pub use atom::{Atom, AtomKind, Moments};
pub use error::{Error, Result};
pub use poly::{EvalMode, Polynomial, RandomPoly, Transform};
pub use rng::RngSpec;
pub use scalar::Scalar;

/// Arbitrary precision integer.
pub type Integer = num_bigint::BigInt;
/// Exact rational number.
pub type Rational = num_rational::BigRational;

/// Polynomial with machine-integer coefficients (Type I samples).
pub type IntPoly = Polynomial<i64>;
/// Polynomial with double precision coefficients (continuous atoms).
pub type FloatPoly = Polynomial<f64>;
/// Polynomial with single precision coefficients.
pub type Float32Poly = Polynomial<f32>;
/// Polynomial with big-integer coefficients (exact root counting).
pub type BigPoly = Polynomial<Integer>;
/// Polynomial with exact rational coefficients.
pub type RationalPoly = Polynomial<Rational>;
