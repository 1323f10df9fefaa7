//! Value parsers shared by the subcommands.

use std::ops::Bound;

use anyhow::{anyhow, bail, Context, Result};
use kac_core::roots::Interval;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Zero};

/// Nonnegative integer written as `4096`, `2^12` or `1e5`.
pub fn parse_count(s: &str) -> Result<u64> {
    let s = s.trim();
    if let Some((b, e)) = s.split_once('^') {
        let b: u64 = b.trim().parse().with_context(|| format!("bad base in `{s}`"))?;
        let e: u32 = e.trim().parse().with_context(|| format!("bad exponent in `{s}`"))?;
        return b.checked_pow(e).ok_or_else(|| anyhow!("`{s}` overflows"));
    }
    if let Some((m, e)) = s.split_once(['e', 'E']) {
        let m: u64 = m.trim().parse().with_context(|| format!("bad mantissa in `{s}`"))?;
        let e: u32 = e.trim().parse().with_context(|| format!("bad exponent in `{s}`"))?;
        return 10u64
            .checked_pow(e)
            .and_then(|p| p.checked_mul(m))
            .ok_or_else(|| anyhow!("`{s}` overflows"));
    }
    s.parse().with_context(|| format!("`{s}` is not a nonnegative integer"))
}

/// Comma list of degrees. Items are single values (see [`parse_count`]),
/// `2^a..2^b` (every power of two in between) or `a..b` (every integer).
/// The result is sorted and deduplicated.
pub fn parse_degrees(s: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        if let Some((a, b)) = item.split_once("..") {
            match (a.trim().strip_prefix("2^"), b.trim().strip_prefix("2^")) {
                (Some(a), Some(b)) => {
                    let (a, b): (u32, u32) = (a.parse()?, b.parse()?);
                    if a > b || b > 62 {
                        bail!("bad power-of-two range `{item}`");
                    }
                    out.extend((a..=b).map(|e| 1usize << e));
                }
                (None, None) => {
                    let (a, b) = (parse_count(a)? as usize, parse_count(b)? as usize);
                    if a > b {
                        bail!("empty range `{item}`");
                    }
                    out.extend(a..=b);
                }
                _ => bail!("mixed range `{item}`: write both ends as 2^k or neither"),
            }
        } else {
            out.push(parse_count(item)? as usize);
        }
    }
    if out.is_empty() {
        bail!("empty degree list");
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// Exact rational from `p/q`, an integer, or a decimal such as `0.55` or
/// `1.5e-3`.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().with_context(|| format!("bad numerator in `{s}`"))?;
        let q: BigInt = q.trim().parse().with_context(|| format!("bad denominator in `{s}`"))?;
        if q.is_zero() {
            bail!("zero denominator in `{s}`");
        }
        return Ok(BigRational::new(p, q));
    }
    let (mantissa, exp) = match s.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().with_context(|| format!("bad exponent in `{s}`"))?),
        None => (s, 0),
    };
    let (int, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int.is_empty() && frac.is_empty() {
        bail!("`{s}` is not a number");
    }
    let digits = format!("{int}{frac}");
    let digits = if digits == "-" || digits == "+" { format!("{digits}0") } else { digits };
    let num: BigInt = digits.parse().with_context(|| format!("`{s}` is not a number"))?;
    let scale = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    let q = if scale >= 0 {
        BigRational::from_integer(num * Pow::pow(&ten, scale as u32))
    } else {
        BigRational::new(num, Pow::pow(&ten, (-scale) as u32))
    };
    Ok(q)
}

fn parse_end(s: &str) -> Result<Option<BigRational>> {
    match s.trim() {
        "inf" | "+inf" | "-inf" => Ok(None),
        v => parse_rational(v).map(Some),
    }
}

/// Open interval `a,b` with exact rational ends; `-inf` / `inf` leave a
/// side unbounded.
pub fn parse_interval(s: &str) -> Result<Interval<BigRational>> {
    let (a, b) = s.split_once(',').ok_or_else(|| anyhow!("interval must be written `a,b`"))?;
    let lo = parse_end(a)?.map_or(Bound::Unbounded, Bound::Excluded);
    let hi = parse_end(b)?.map_or(Bound::Unbounded, Bound::Excluded);
    if let (Bound::Excluded(a), Bound::Excluded(b)) = (&lo, &hi) {
        if a >= b {
            bail!("interval `{s}` is empty");
        }
    }
    Ok(Interval { lo, hi })
}

/// Interval `a,b` in floating point; `inf` is accepted at either end.
pub fn parse_float_interval(s: &str) -> Result<(f64, f64)> {
    let (a, b) = s.split_once(',').ok_or_else(|| anyhow!("interval must be written `a,b`"))?;
    let a: f64 = a.trim().parse().with_context(|| format!("bad lower end in `{s}`"))?;
    let b: f64 = b.trim().parse().with_context(|| format!("bad upper end in `{s}`"))?;
    if !(a <= b) {
        bail!("interval `{s}` must satisfy a ≤ b");
    }
    Ok((a, b))
}

/// `n/d` (or `n` when the denominator is 1).
pub fn render_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}
