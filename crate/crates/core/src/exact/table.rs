//! Exact counts of `(Σ aᵢξᵢ, Σ bᵢξᵢ)` over all coefficient vectors.
//!
//! Counts live in fixed-width little-endian `u64` limbs sized for the
//! largest possible count, stored in one row per value of `s` covering the
//! contiguous range of reachable `t`.

use std::io::{Read, Write};

use num_bigint::BigUint;
use num_traits::Zero;

use crate::error::{Error, Result};

/// Upper bound on the memory held by the two DP buffers.
pub const MAX_TABLE_BYTES: usize = 2 << 30;

/// Per-index weight vectors `(aᵢ, bᵢ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Weights {
    /// `(1, i)`: `P(1)` and `P′(1)`.
    U,
    /// `(1, (−1)^{i−1} i)`.
    V,
    /// `((−1)^i, (−1)^{i−1} i)`: `P(−1)` and `P′(−1)`.
    MinusOne,
}

impl Weights {
    pub fn at(self, i: usize) -> (i64, i64) {
        let i64_ = i as i64;
        let alt = if i % 2 == 0 { -1 } else { 1 }; // (−1)^{i−1}
        match self {
            Weights::U => (1, i64_),
            Weights::V => (1, alt * i64_),
            Weights::MinusOne => (-alt, alt * i64_),
        }
    }

    pub fn tag(self) -> u8 {
        match self {
            Weights::U => 0,
            Weights::V => 1,
            Weights::MinusOne => 2,
        }
    }

    pub fn from_tag(tag: u8) -> Result<Self> {
        match tag {
            0 => Ok(Weights::U),
            1 => Ok(Weights::V),
            2 => Ok(Weights::MinusOne),
            _ => Err(Error::Format(format!("unknown weight tag {tag}"))),
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "u" | "U" => Ok(Weights::U),
            "v" | "V" => Ok(Weights::V),
            "minus-one" | "m" => Ok(Weights::MinusOne),
            _ => Err(Error::invalid(format!("unknown weights {s:?} (u, v, minus-one)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Row {
    t_lo: i64,
    len: usize,
    off: usize,
}

/// Shape of a table: reachable `t` range per `s`, sampled every `stride`
/// (for `N = 1` all reachable `t` share one parity).
#[derive(Debug, Clone, PartialEq, Eq)]
struct Shape {
    s_min: i64,
    stride: i64,
    rows: Vec<Row>,
}

impl Shape {
    fn origin(stride: i64) -> Self {
        Shape {
            s_min: 0,
            stride,
            rows: vec![Row { t_lo: 0, len: 1, off: 0 }],
        }
    }

    fn t_hi(&self, r: &Row) -> i64 {
        r.t_lo + (r.len as i64 - 1) * self.stride
    }

    fn cells(&self) -> usize {
        self.rows.iter().map(|r| r.len).sum()
    }

    /// Shape after adding `ξ·(a, b)` for `ξ ∈ {±1, …, ±N}`.
    fn extend(&self, a: i64, b: i64, big_n: i64) -> Shape {
        let s_min = self.s_min - big_n;
        let count = self.rows.len() + 2 * big_n as usize;
        let mut lo = vec![i64::MAX; count];
        let mut hi = vec![i64::MIN; count];
        for (k, r) in self.rows.iter().enumerate() {
            if r.len == 0 {
                continue;
            }
            let s = self.s_min + k as i64;
            for xi in (-big_n..=big_n).filter(|&x| x != 0) {
                let j = (s + xi * a - s_min) as usize;
                lo[j] = lo[j].min(r.t_lo + xi * b);
                hi[j] = hi[j].max(self.t_hi(r) + xi * b);
            }
        }
        let mut off = 0;
        let rows = lo
            .iter()
            .zip(&hi)
            .map(|(&l, &h)| {
                if l > h {
                    Row { t_lo: 0, len: 0, off }
                } else {
                    let len = ((h - l) / self.stride + 1) as usize;
                    let r = Row { t_lo: l, len, off };
                    off += len;
                    r
                }
            })
            .collect();
        Shape { s_min, stride: self.stride, rows }
    }
}

/// With `N = 1` every `ξᵢ` is odd, so `t ≡ Σ bᵢ (mod 2)` on the whole table.
fn stride_for(big_n: u32) -> i64 {
    if big_n == 1 { 2 } else { 1 }
}

/// Limbs needed for counts up to `(2N)^{terms}`.
fn limbs_for(terms: usize, big_n: u32) -> usize {
    let bits = (terms as f64 * (2.0 * big_n as f64).log2()).ceil() as usize + 2;
    bits.div_ceil(64).max(1)
}

/// Exact joint-sum counts for one index set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointSumTable {
    pub n: usize,
    pub big_n: u32,
    pub weights: Weights,
    /// Number of coefficients counted (`n + 1` for a full table).
    pub terms: usize,
    limbs: usize,
    shape: Shape,
    data: Vec<u64>,
}

impl JointSumTable {
    fn origin(n: usize, big_n: u32, weights: Weights, limbs: usize) -> Self {
        let mut data = vec![0u64; limbs];
        data[0] = 1;
        JointSumTable {
            n,
            big_n,
            weights,
            terms: 0,
            limbs,
            shape: Shape::origin(stride_for(big_n)),
            data,
        }
    }

    fn cell(&self, s: i64, t: i64) -> Option<&[u64]> {
        let k = s - self.shape.s_min;
        if k < 0 || k as usize >= self.shape.rows.len() {
            return None;
        }
        let r = self.shape.rows[k as usize];
        let d = t - r.t_lo;
        if d < 0 || d % self.shape.stride != 0 {
            return None;
        }
        let j = d / self.shape.stride;
        if j as usize >= r.len {
            return None;
        }
        let at = (r.off + j as usize) * self.limbs;
        Some(&self.data[at..at + self.limbs])
    }

    /// Number of coefficient vectors with `Σ aᵢξᵢ = s` and `Σ bᵢξᵢ = t`.
    pub fn get(&self, s: i64, t: i64) -> BigUint {
        self.cell(s, t).map_or_else(BigUint::zero, limbs_to_big)
    }

    /// `(2N)^{terms}`.
    pub fn total(&self) -> BigUint {
        BigUint::from(2 * self.big_n).pow(self.terms as u32)
    }

    /// Sum of all cells (equals [`Self::total`]).
    pub fn sum(&self) -> BigUint {
        self.data.chunks(self.limbs).map(limbs_to_big).sum()
    }

    /// All nonzero cells in row-major order.
    pub fn cells(&self) -> impl Iterator<Item = (i64, i64, BigUint)> + '_ {
        self.shape.rows.iter().enumerate().flat_map(move |(k, r)| {
            let s = self.shape.s_min + k as i64;
            (0..r.len).filter_map(move |j| {
                let at = (r.off + j) * self.limbs;
                let c = &self.data[at..at + self.limbs];
                let t = r.t_lo + j as i64 * self.shape.stride;
                c.iter().any(|&v| v != 0).then(|| (s, t, limbs_to_big(c)))
            })
        })
    }

    /// Largest count and the first cell (row-major) attaining it.
    pub fn max_cell(&self) -> (i64, i64, BigUint) {
        let mut best = (0, 0, BigUint::zero());
        for (s, t, c) in self.cells() {
            if c > best.2 {
                best = (s, t, c);
            }
        }
        best
    }

    /// `max |s|` and `max |t|` over reachable cells.
    pub fn bounds(&self) -> (i64, i64) {
        let mut bs = 0;
        let mut bt = 0;
        for (k, r) in self.shape.rows.iter().enumerate() {
            if r.len == 0 {
                continue;
            }
            bs = bs.max((self.shape.s_min + k as i64).abs());
            bt = bt.max(r.t_lo.abs()).max(self.shape.t_hi(r).abs());
        }
        (bs, bt)
    }

    /// Adds index `i` with weight `(a, b)`.
    fn step(&self, a: i64, b: i64) -> Self {
        let big_n = self.big_n as i64;
        let shape = self.shape.extend(a, b, big_n);
        let w = self.limbs;
        let mut data = vec![0u64; shape.cells() * w];
        for (k, r) in self.shape.rows.iter().enumerate() {
            if r.len == 0 {
                continue;
            }
            let s = self.shape.s_min + k as i64;
            let src = &self.data[r.off * w..(r.off + r.len) * w];
            for xi in (-big_n..=big_n).filter(|&x| x != 0) {
                let dst_row = shape.rows[(s + xi * a - shape.s_min) as usize];
                let start = ((r.t_lo + xi * b - dst_row.t_lo) / shape.stride) as usize;
                let at = (dst_row.off + start) * w;
                add_into(&mut data[at..at + r.len * w], src, w);
            }
        }
        JointSumTable {
            n: self.n,
            big_n: self.big_n,
            weights: self.weights,
            terms: self.terms + 1,
            limbs: w,
            shape,
            data,
        }
    }

    /// Binary cache: magic, version, `n`, `N`, weight tag, bounds `S`, `T`,
    /// then LEB128 counts for every `(s, t) ∈ [−S, S] × [−T, T]` row-major.
    pub fn write_cache<W: Write>(&self, mut out: W) -> Result<()> {
        let (bs, bt) = self.bounds();
        let mut buf = Vec::new();
        buf.extend_from_slice(CACHE_MAGIC);
        buf.push(CACHE_VERSION);
        buf.extend_from_slice(&(self.n as u32).to_le_bytes());
        buf.extend_from_slice(&self.big_n.to_le_bytes());
        buf.push(self.weights.tag());
        buf.extend_from_slice(&(self.terms as u32).to_le_bytes());
        buf.extend_from_slice(&(bs as u64).to_le_bytes());
        buf.extend_from_slice(&(bt as u64).to_le_bytes());
        for s in -bs..=bs {
            for t in -bt..=bt {
                match self.cell(s, t) {
                    Some(c) => write_varint(&mut buf, c),
                    None => buf.push(0),
                }
            }
        }
        out.write_all(&buf).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn read_cache<R: Read>(mut input: R) -> Result<Self> {
        let mut buf = Vec::new();
        input
            .read_to_end(&mut buf)
            .map_err(|e| Error::Format(e.to_string()))?;
        let mut cur = Cursor { buf: &buf, pos: 0 };
        if cur.take(4)? != CACHE_MAGIC {
            return Err(Error::Format("not a joint-sum table cache".into()));
        }
        if cur.take(1)?[0] != CACHE_VERSION {
            return Err(Error::Format("unsupported cache version".into()));
        }
        let n = cur.u32()? as usize;
        let big_n = cur.u32()?;
        let weights = Weights::from_tag(cur.take(1)?[0])?;
        let terms = cur.u32()? as usize;
        let bs = cur.u64()? as i64;
        let bt = cur.u64()? as i64;
        if big_n == 0 {
            return Err(Error::Format("N must be positive".into()));
        }
        let limbs = limbs_for(terms, big_n);
        let stride = stride_for(big_n);
        let mut rows = Vec::new();
        let mut data = Vec::new();
        let mut off = 0;
        for _ in -bs..=bs {
            let mut cells: Vec<Vec<u64>> = Vec::with_capacity((2 * bt + 1) as usize);
            for _ in -bt..=bt {
                cells.push(cur.varint(limbs)?);
            }
            let nz = |c: &Vec<u64>| c.iter().any(|&v| v != 0);
            match (cells.iter().position(nz), cells.iter().rposition(nz)) {
                (Some(first), Some(last)) => {
                    let step = stride as usize;
                    if (last - first) % step != 0
                        || cells[first..=last].iter().enumerate().any(|(j, c)| j % step != 0 && nz(c))
                    {
                        return Err(Error::Format("cell outside the parity lattice".into()));
                    }
                    let len = (last - first) / step + 1;
                    rows.push(Row { t_lo: first as i64 - bt, len, off });
                    off += len;
                    for c in cells[first..=last].iter().step_by(step) {
                        data.extend_from_slice(c);
                    }
                }
                _ => rows.push(Row { t_lo: 0, len: 0, off }),
            }
        }
        if cur.pos != buf.len() {
            return Err(Error::Format("trailing bytes in cache".into()));
        }
        Ok(JointSumTable {
            n,
            big_n,
            weights,
            terms,
            limbs,
            shape: Shape { s_min: -bs, stride, rows },
            data,
        })
    }
}

const CACHE_MAGIC: &[u8; 4] = b"KJST";
const CACHE_VERSION: u8 = 1;

fn write_varint(buf: &mut Vec<u8>, limbs: &[u64]) {
    let mut v = limbs_to_big(limbs);
    let mask = BigUint::from(0x7fu8);
    loop {
        let low = (&v & &mask).iter_u32_digits().next().unwrap_or(0) as u8;
        v >>= 7;
        if v.is_zero() {
            buf.push(low);
            return;
        }
        buf.push(low | 0x80);
    }
}

struct Cursor<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn take(&mut self, k: usize) -> Result<&[u8]> {
        let end = self.pos + k;
        if end > self.buf.len() {
            return Err(Error::Format("truncated cache".into()));
        }
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn varint(&mut self, limbs: usize) -> Result<Vec<u64>> {
        let mut bytes = Vec::new();
        loop {
            let byte = self.take(1)?[0];
            bytes.push(byte & 0x7f);
            if byte & 0x80 == 0 {
                break;
            }
        }
        let digits = BigUint::from_radix_le(&bytes, 128)
            .ok_or_else(|| Error::Format("bad varint".into()))?
            .to_u64_digits();
        if digits.len() > limbs {
            return Err(Error::Format("count exceeds table width".into()));
        }
        let mut out = vec![0u64; limbs];
        out[..digits.len()].copy_from_slice(&digits);
        Ok(out)
    }
}

fn limbs_to_big(c: &[u64]) -> BigUint {
    let mut digits = Vec::with_capacity(c.len() * 2);
    for &v in c {
        digits.push(v as u32);
        digits.push((v >> 32) as u32);
    }
    BigUint::new(digits)
}

/// Cellwise `dst += src` for `w`-limb numbers.
fn add_into(dst: &mut [u64], src: &[u64], w: usize) {
    if w == 1 {
        for (d, s) in dst.iter_mut().zip(src) {
            *d += *s;
        }
        return;
    }
    for (d, s) in dst.chunks_exact_mut(w).zip(src.chunks_exact(w)) {
        let mut carry = false;
        for (x, y) in d.iter_mut().zip(s) {
            let (v, c1) = x.overflowing_add(*y);
            let (v, c2) = v.overflowing_add(carry as u64);
            *x = v;
            carry = c1 | c2;
        }
    }
}

/// Runs the DP over `indices` (ascending), calling `visit` after each one.
/// Fails before allocating if the final table would exceed the memory
/// guard.
pub(crate) fn sweep_tables(
    n: usize,
    big_n: u32,
    weights: Weights,
    indices: &[usize],
    mut visit: impl FnMut(usize, &JointSumTable),
) -> Result<JointSumTable> {
    if big_n == 0 {
        return Err(Error::invalid("N must be at least 1"));
    }
    let limbs = limbs_for(indices.len(), big_n);
    // Dry run on shapes only.
    let mut shape = Shape::origin(stride_for(big_n));
    let mut peak = 1;
    for &i in indices {
        let (a, b) = weights.at(i);
        let next = shape.extend(a, b, big_n as i64);
        peak = peak.max(shape.cells() + next.cells());
        shape = next;
        if peak.saturating_mul(limbs * 8) > MAX_TABLE_BYTES {
            break;
        }
    }
    let bytes = peak.saturating_mul(limbs * 8);
    if bytes > MAX_TABLE_BYTES {
        return Err(Error::resource(format!(
            "joint-sum table for n = {n}, N = {big_n} needs more than {} MiB (limit {} MiB); \
             use the local-CLT approximation instead",
            bytes >> 20,
            MAX_TABLE_BYTES >> 20
        )));
    }
    let mut table = JointSumTable::origin(n, big_n, weights, limbs);
    for &i in indices {
        let (a, b) = weights.at(i);
        table = table.step(a, b);
        visit(i, &table);
    }
    Ok(table)
}

/// Counts of `(Σ aᵢξᵢ, Σ bᵢξᵢ)` over `ξ ∈ {±1, …, ±N}^{n+1}`.
pub fn build_joint_table(n: usize, big_n: u32, weights: Weights) -> Result<JointSumTable> {
    let indices: Vec<usize> = (0..=n).collect();
    sweep_tables(n, big_n, weights, &indices, |_, _| {})
}
