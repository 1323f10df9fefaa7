use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::poly::{Polynomial, RandomPoly};
use crate::rng::RngSpec;

/// Distribution of the coefficients `ξᵢ`.
#[derive(Debug, Clone, PartialEq)]
pub enum AtomKind {
    /// Uniform on `{±1, …, ±N}`; `N = 1` is Bernoulli.
    TypeI { n: u32 },
    /// Standard normal.
    Gaussian,
    /// Uniform on `[−√3, √3]` (unit variance).
    UniformContinuous,
    /// Finite table of nonzero integer values.
    CustomDiscrete(DiscreteTable),
}

/// Value/probability table for [`AtomKind::CustomDiscrete`].
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteTable {
    values: Vec<i64>,
    probs: Vec<f64>,
    cumulative: Vec<f64>,
}

impl DiscreteTable {
    /// Probabilities must sum to 1, the mean must vanish and 0 may not be a
    /// value.
    pub fn new(values: Vec<i64>, probs: Vec<f64>) -> Result<Self> {
        if values.is_empty() || values.len() != probs.len() {
            return Err(Error::invalid("value and probability tables differ in length"));
        }
        if values.contains(&0) {
            return Err(Error::invalid("zero is excluded from the support"));
        }
        if probs.iter().any(|&p| !(p >= 0.0)) {
            return Err(Error::invalid("negative probability"));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(format!("probabilities sum to {total}")));
        }
        let mean: f64 = values.iter().zip(&probs).map(|(&v, &p)| v as f64 * p).sum();
        if mean.abs() > 1e-12 {
            return Err(Error::invalid(format!("mean {mean} is not zero")));
        }
        let mut acc = 0.0;
        let cumulative = probs
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        Ok(Self {
            values,
            probs,
            cumulative,
        })
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> i64 {
        let u: f64 = rng.random();
        let idx = self.cumulative.partition_point(|&c| c <= u);
        self.values[idx.min(self.values.len() - 1)]
    }
}

/// Integrability metadata of a continuous atom. Carried for bookkeeping;
/// nothing in the crate computes with it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TypeIIMeta {
    /// Exponent `p > 1` of the integrable density.
    pub p: f64,
    /// Moment slack `ε₀` in the bounded `(2 + ε₀)`-moment assumption.
    pub eps0: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub kind: AtomKind,
    pub label: String,
    pub type_ii: Option<TypeIIMeta>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub mean: f64,
    pub variance: f64,
}

impl Atom {
    pub fn type_i(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("Type I parameter N must be positive"));
        }
        let label = if n == 1 {
            "bernoulli".to_string()
        } else {
            format!("typeI:{n}")
        };
        Ok(Self {
            kind: AtomKind::TypeI { n },
            label,
            type_ii: None,
        })
    }

    pub fn bernoulli() -> Self {
        Self::type_i(1).expect("N = 1 is valid")
    }

    pub fn gaussian() -> Self {
        Self {
            kind: AtomKind::Gaussian,
            label: "gaussian".into(),
            type_ii: Some(TypeIIMeta { p: f64::INFINITY, eps0: f64::INFINITY }),
        }
    }

    pub fn uniform() -> Self {
        Self {
            kind: AtomKind::UniformContinuous,
            label: "uniform".into(),
            type_ii: Some(TypeIIMeta { p: f64::INFINITY, eps0: f64::INFINITY }),
        }
    }

    pub fn custom(label: impl Into<String>, table: DiscreteTable) -> Self {
        Self {
            kind: AtomKind::CustomDiscrete(table),
            label: label.into(),
            type_ii: None,
        }
    }

    /// Parses `bernoulli`, `typeI:N`, `gaussian` or `uniform`.
    pub fn parse(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        match lower.as_str() {
            "bernoulli" => Ok(Self::bernoulli()),
            "gaussian" | "normal" => Ok(Self::gaussian()),
            "uniform" => Ok(Self::uniform()),
            other => {
                let n = other
                    .strip_prefix("typei:")
                    .ok_or_else(|| Error::invalid(format!("unknown atom `{s}`")))?;
                let n: u32 = n
                    .parse()
                    .map_err(|_| Error::invalid(format!("bad Type I parameter in `{s}`")))?;
                Self::type_i(n)
            }
        }
    }

    pub fn is_discrete(&self) -> bool {
        matches!(self.kind, AtomKind::TypeI { .. } | AtomKind::CustomDiscrete(_))
    }

    /// Type I parameter, if any.
    pub fn type_i_n(&self) -> Option<u32> {
        match self.kind {
            AtomKind::TypeI { n } => Some(n),
            _ => None,
        }
    }

    /// Largest absolute coefficient value, `None` when unbounded.
    pub fn max_abs(&self) -> Option<i64> {
        match &self.kind {
            AtomKind::TypeI { n } => Some(*n as i64),
            AtomKind::CustomDiscrete(t) => t.values.iter().map(|v| v.abs()).max(),
            _ => None,
        }
    }

    pub fn moments(&self) -> Moments {
        match &self.kind {
            AtomKind::TypeI { n } => {
                let n = *n as f64;
                Moments {
                    mean: 0.0,
                    variance: (n + 1.0) * (2.0 * n + 1.0) / 6.0,
                }
            }
            AtomKind::Gaussian | AtomKind::UniformContinuous => Moments {
                mean: 0.0,
                variance: 1.0,
            },
            AtomKind::CustomDiscrete(t) => {
                let mean: f64 = t.values.iter().zip(&t.probs).map(|(&v, &p)| v as f64 * p).sum();
                let second: f64 = t
                    .values
                    .iter()
                    .zip(&t.probs)
                    .map(|(&v, &p)| (v as f64).powi(2) * p)
                    .sum();
                Moments {
                    mean,
                    variance: second - mean * mean,
                }
            }
        }
    }

    /// One draw from a discrete atom.
    pub fn draw_int<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<i64> {
        match &self.kind {
            AtomKind::TypeI { n } => {
                let k = rng.random_range(0..2 * *n as i64);
                Some(if k < *n as i64 { k + 1 } else { *n as i64 - k - 1 })
            }
            AtomKind::CustomDiscrete(t) => Some(t.draw(rng)),
            _ => None,
        }
    }

    /// One draw as a double, whatever the atom.
    pub fn draw_f64<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match &self.kind {
            AtomKind::Gaussian => rng.sample(StandardNormal),
            AtomKind::UniformContinuous => {
                let half = 3f64.sqrt();
                rng.random_range(-half..half)
            }
            _ => self.draw_int(rng).expect("discrete atom") as f64,
        }
    }
}

/// Draws `P_n` with iid coefficients; advances `rng.counter` past the draws.
pub fn sample_poly(atom: &Atom, n: usize, rng: &mut RngSpec) -> RandomPoly {
    let mut g = rng.generator();
    let poly = if atom.is_discrete() {
        let coeffs = (0..=n)
            .map(|_| atom.draw_int(&mut g).expect("discrete atom"))
            .collect();
        RandomPoly::Int(Polynomial::new(coeffs))
    } else {
        RandomPoly::Float(Polynomial::new((0..=n).map(|_| atom.draw_f64(&mut g)).collect()))
    };
    rng.advance_to(&g);
    poly
}
