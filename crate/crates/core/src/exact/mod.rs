//! Exact lattice oracles for Type I coefficients `ξᵢ ∈ {±1, …, ±N}`.
//!
//! `P(±1) = P′(±1) = 0` are linear conditions on `ξ`, so double-root
//! probabilities at `±1` reduce to counting lattice points with a dynamic
//! program over joint sums. The same tables give anti-concentration
//! suprema; small-ball probabilities use meet-in-the-middle enumeration.

mod lacunary;
mod smallball;
mod table;

pub use lacunary::{
    choose_lacunary_params, separation_check, LacunaryParams, SeparationOptions,
    SeparationResult, SeparationVariant,
};
pub use smallball::{smallball_prob, MITM_MAX_HALF};
pub use table::{build_joint_table, JointSumTable, Weights, MAX_TABLE_BYTES};

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Why a double root at `±1` is or is not possible.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ParityCertificate {
    /// `n` even: `P(±1)` is a sum of an odd number of odd terms (N = 1).
    EvenParityObstruction,
    /// `n ≡ 1 (mod 4)`: `Σξᵢ = 0` forces `Σ iξᵢ` odd (N = 1).
    FourKPlusOneObstruction,
    Feasible,
    /// Exhaustive table count found no coefficient vector (N ≥ 2).
    TableObstruction,
}

impl ParityCertificate {
    pub fn name(self) -> &'static str {
        match self {
            ParityCertificate::EvenParityObstruction => "EvenParityObstruction",
            ParityCertificate::FourKPlusOneObstruction => "FourKPlusOneObstruction",
            ParityCertificate::Feasible => "Feasible",
            ParityCertificate::TableObstruction => "TableObstruction",
        }
    }

    pub fn is_obstruction(self) -> bool {
        self != ParityCertificate::Feasible
    }
}

/// Exact probabilities of a double root at `1`, at `−1`, and at either.
#[derive(Debug, Clone, PartialEq)]
pub struct DoubleRootResult {
    pub n: usize,
    pub big_n: u32,
    pub count1: BigUint,
    pub count_m1: BigUint,
    /// Vectors with double roots at both `1` and `−1`.
    pub count_both: BigUint,
    pub total: BigUint,
    pub p1: BigRational,
    pub pm1: BigRational,
    pub p_union: BigRational,
    /// Set when `p_union = 0` and a certificate explains it.
    pub certificate: Option<ParityCertificate>,
}

fn ratio(a: &BigUint, b: &BigUint) -> BigRational {
    BigRational::new(a.clone().into(), b.clone().into())
}

/// Rule-based certificate for `N = 1`.
fn parity_rule(n: usize) -> ParityCertificate {
    if n % 2 == 0 {
        ParityCertificate::EvenParityObstruction
    } else if n % 4 == 1 {
        ParityCertificate::FourKPlusOneObstruction
    } else {
        ParityCertificate::Feasible
    }
}

/// Double-root probabilities for every degree `1..=n_max` from one pass of
/// each dynamic program.
///
/// The event at both points splits over even and odd indices:
/// `P(1) = P(−1) = 0 ⟺ Σ_even ξᵢ = Σ_odd ξᵢ = 0`, and likewise for the
/// derivatives with weights `i`, so its count is a product of two smaller
/// tables' centre cells.
pub fn double_root_sweep(n_max: usize, big_n: u32) -> Result<Vec<DoubleRootResult>> {
    if n_max == 0 {
        return Err(Error::invalid("degree must be at least 1"));
    }
    let all: Vec<usize> = (0..=n_max).collect();
    let centre = |w: Weights, idx: &[usize]| -> Result<Vec<BigUint>> {
        // centre[i] = count at (0, 0) after processing indices ≤ i.
        let mut out = vec![BigUint::zero(); n_max + 1];
        let mut last = BigUint::zero();
        let mut next = idx.iter().peekable();
        let mut values = Vec::new();
        table::sweep_tables(n_max, big_n, w, idx, |i, t| values.push((i, t.get(0, 0))))?;
        for (i, slot) in out.iter_mut().enumerate() {
            while let Some(&&j) = next.peek() {
                if j > i {
                    break;
                }
                next.next();
                last = values.iter().find(|(k, _)| *k == j).unwrap().1.clone();
            }
            *slot = last.clone();
        }
        Ok(out)
    };
    let c1 = centre(Weights::U, &all)?;
    let cm1 = centre(Weights::MinusOne, &all)?;
    let evens: Vec<usize> = (0..=n_max).step_by(2).collect();
    let odds: Vec<usize> = (1..=n_max).step_by(2).collect();
    let ce = centre(Weights::U, &evens)?;
    let co = centre(Weights::U, &odds)?;
    let base = BigUint::from(2 * big_n);
    Ok((1..=n_max)
        .map(|n| {
            let total = base.pow(n as u32 + 1);
            let count_both = &ce[n] * &co[n];
            let union = &c1[n] + &cm1[n] - &count_both;
            let p_union = ratio(&union, &total);
            let certificate = if big_n == 1 && parity_rule(n).is_obstruction() && union.is_zero() {
                Some(parity_rule(n))
            } else if big_n > 1 && union.is_zero() {
                Some(ParityCertificate::TableObstruction)
            } else {
                None
            };
            DoubleRootResult {
                n,
                big_n,
                p1: ratio(&c1[n], &total),
                pm1: ratio(&cm1[n], &total),
                count1: c1[n].clone(),
                count_m1: cm1[n].clone(),
                count_both,
                total,
                p_union,
                certificate,
            }
        })
        .collect())
}

/// Exact double-root probabilities at `±1` for degree `n`.
pub fn double_root_prob_exact(n: usize, big_n: u32) -> Result<DoubleRootResult> {
    Ok(double_root_sweep(n, big_n)?.pop().expect("n ≥ 1"))
}

/// Certificate for the possibility of a double root at `±1`. For `N = 1`
/// the parity rules decide; for `N ≥ 2` the exact tables are consulted.
pub fn parity_certificate(n: usize, big_n: u32) -> Result<ParityCertificate> {
    if big_n == 0 {
        return Err(Error::invalid("N must be at least 1"));
    }
    if big_n == 1 {
        return Ok(parity_rule(n));
    }
    if n == 0 {
        return Ok(ParityCertificate::TableObstruction);
    }
    let r = double_root_prob_exact(n, big_n)?;
    Ok(if r.p_union.is_zero() {
        ParityCertificate::TableObstruction
    } else {
        ParityCertificate::Feasible
    })
}

/// Two-dimensional local-limit approximation of `P(P(1) = P′(1) = 0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CltApprox {
    pub value: f64,
    /// Atom variance `σ²`.
    pub sigma2: f64,
    /// `n(n+1)²(n+2)/12`, the covariance determinant over `σ⁴`.
    pub det: f64,
    /// Lattice covolume.
    pub h: f64,
}

/// `h / (2π σ² √D)`: `h = 4` for `N = 1` (sums confined to a coset of
/// `2ℤ²`), `h = 1` otherwise.
pub fn double_root_prob_clt(n: usize, big_n: u32) -> Result<CltApprox> {
    if big_n == 0 {
        return Err(Error::invalid("N must be at least 1"));
    }
    if n < 3 {
        return Err(Error::invalid("the local-limit approximation needs n ≥ 3"));
    }
    if big_n == 1 {
        let cert = parity_rule(n);
        if cert.is_obstruction() {
            return Err(Error::Infeasible(format!(
                "n = {n}, N = 1: {} (no double root at ±1 is possible)",
                cert.name()
            )));
        }
    }
    let nf = n as f64;
    let bn = big_n as f64;
    let sigma2 = (bn + 1.0) * (2.0 * bn + 1.0) / 6.0;
    let det = nf * (nf + 1.0) * (nf + 1.0) * (nf + 2.0) / 12.0;
    let h = if big_n == 1 { 4.0 } else { 1.0 };
    Ok(CltApprox {
        value: h / (2.0 * std::f64::consts::PI * sigma2 * det.sqrt()),
        sigma2,
        det,
        h,
    })
}

/// `max_{(s,t)} P(Σ ξᵢ wᵢ = (s, t))`, with a cell attaining it.
pub fn anticonc_sup_with_cell(
    n: usize,
    big_n: u32,
    weights: Weights,
) -> Result<(BigRational, (i64, i64))> {
    let t = build_joint_table(n, big_n, weights)?;
    let (s, tt, c) = t.max_cell();
    Ok((ratio(&c, &t.total()), (s, tt)))
}

pub fn anticonc_sup(n: usize, big_n: u32, weights: Weights) -> Result<BigRational> {
    Ok(anticonc_sup_with_cell(n, big_n, weights)?.0)
}

pub(crate) fn to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}
