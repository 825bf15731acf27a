//! Closed-form quantities: communication cost and rate, Gaussian binomials,
//! the superspace-guessing probability behind the subspace attack, the
//! full-rank lower bound used against the linear-dependency attack, and the
//! parameter table / sweep built from them.
//!
//! Everything probabilistic is evaluated exactly over big rationals and only
//! turned into `f64` (or `log2`) at the end.

use std::fmt::Write as _;
use std::ops::RangeInclusive;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::pir::SchemeParams;

/// `H(Q) = mδns·log2(q)` bits.
pub fn upload_bits(p: &SchemeParams) -> u128 {
    p.m as u128 * p.delta() as u128 * p.n as u128 * p.s as u128 * p.w() as u128
}

/// `H(A) = Lns·log2(q)` bits.
pub fn download_bits(p: &SchemeParams) -> u128 {
    p.l as u128 * p.n as u128 * p.s as u128 * p.w() as u128
}

fn ratio(num: impl Into<BigInt>, den: impl Into<BigInt>) -> BigRational {
    BigRational::new(num.into(), den.into())
}

/// Retrieved bits over transmitted bits, `Lδ·log2 q / (H(Q) + H(A))`.
pub fn rate_exact(p: &SchemeParams) -> BigRational {
    let useful = p.l as u128 * p.delta() as u128 * p.w() as u128;
    ratio(useful, upload_bits(p) + download_bits(p))
}

/// The `L ≫ mδ` limit `1 - (k + (v/s)(n - k))/n`.
pub fn rate_asymptotic(p: &SchemeParams) -> BigRational {
    let n = BigInt::from(p.n);
    let inner = BigRational::from_integer(BigInt::from(p.k))
        + ratio(p.v, p.s) * BigRational::from_integer(BigInt::from(p.n - p.k));
    BigRational::one() - inner / BigRational::from_integer(n)
}

fn pow(q: u32, e: usize) -> BigUint {
    BigUint::from(q).pow(e as u32)
}

/// Number of `v`-dimensional subspaces of `F_q^s`.
pub fn gaussian_binomial(s: usize, v: usize, q: u32) -> BigUint {
    if v > s {
        return BigUint::zero();
    }
    let one = BigUint::one();
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for i in 0..v {
        num *= pow(q, s - i) - &one;
        den *= pow(q, i + 1) - &one;
    }
    num / den
}

/// Number of `z`-dimensional subspaces containing a fixed `v`-dimensional one.
pub fn extension_space_count(s: usize, v: usize, z: usize, q: u32) -> BigUint {
    if z < v || z > s {
        return BigUint::zero();
    }
    gaussian_binomial(s - v, z - v, q)
}

/// Probability that a uniform hyperplane of `F_q^s` contains a fixed
/// `v`-dimensional subspace.
pub fn superspace_hit_prob(s: usize, v: usize, q: u32) -> BigRational {
    assert!(0 < v && v < s, "superspace_hit_prob needs 0 < v < s");
    BigRational::new(
        extension_space_count(s, v, s - 1, q).into(),
        gaussian_binomial(s, s - 1, q).into(),
    )
}

/// `log2` of a positive big integer.
pub fn log2_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 64 {
        return (x.to_u64().expect("fits in 64 bits") as f64).log2();
    }
    let shift = bits - 64;
    let top: BigUint = x >> shift;
    (top.to_u64().expect("top 64 bits") as f64).log2() + shift as f64
}

/// `log2` of a positive rational.
pub fn log2_rational(r: &BigRational) -> f64 {
    assert!(r.numer() > &BigInt::zero() && r.denom() > &BigInt::zero(), "log2 of a non-positive value");
    log2_big(r.numer().magnitude()) - log2_big(r.denom().magnitude())
}

/// Subspace-attack work factor `log2(1 / Pr{V ⊆ Z})`.
pub fn ss_workfactor_log2(s: usize, v: usize, q: u32) -> f64 {
    -log2_rational(&superspace_hit_prob(s, v, q))
}

/// `Π_{j∈js}(1 - q^{-sj})` as `(numerator, e)` meaning `numerator / 2^e`.
/// Kept unreduced: every denominator is a power of two, so no gcd is needed
/// until the very end.
fn dyadic_product(w: u32, s: usize, js: RangeInclusive<usize>) -> (BigInt, u64) {
    let exps: Vec<u64> = js.map(|j| w as u64 * (s * j) as u64).collect();
    let factors = exps.iter().map(|&e| (BigInt::one() << e) - BigInt::one()).collect();
    (balanced_product(factors), exps.iter().sum())
}

/// Pairwise product tree; keeps operands balanced so large products stay
/// in the fast multiplication regime.
fn balanced_product(mut xs: Vec<BigInt>) -> BigInt {
    if xs.is_empty() {
        return BigInt::one();
    }
    while xs.len() > 1 {
        let mut next = Vec::with_capacity(xs.len().div_ceil(2));
        let mut it = xs.into_iter();
        while let Some(a) = it.next() {
            next.push(match it.next() {
                Some(b) => a * b,
                None => a,
            });
        }
        xs = next;
    }
    xs.pop().expect("one element left")
}

/// Lower bound on `Pr{rk(D_I + E_I) = n}` for `n` query rows outside the
/// requested file's block:
/// `Π_{j=n-k+1}^{n}(1 - q^{-sj}) · (Π_{j=1}^{n-k}(1 - q^{-sj}) - (1 - Π_{j=k+1}^{n}(1 - q^{-sj})))`.
pub fn ld_rank_bound(q: u32, s: usize, n: usize, k: usize) -> BigRational {
    assert!(k < n, "ld_rank_bound needs k < n");
    assert!(q.is_power_of_two() && q >= 2, "q must be a power of two");
    let w = q.trailing_zeros();
    let (nu, a) = dyadic_product(w, s, n - k + 1..=n);
    let (ne, b) = dyadic_product(w, s, 1..=n - k);
    let (nf, c) = dyadic_product(w, s, k + 1..=n);
    let d = b.max(c);
    let inner = (ne << (d - b)) - (BigInt::one() << d) + (nf << (d - c));
    let num = nu * inner;
    let exp = a + d;
    if num.is_zero() {
        return BigRational::zero();
    }
    let tz = num.magnitude().trailing_zeros().unwrap_or(0).min(exp);
    BigRational::new_raw(num >> tz, BigInt::one() << (exp - tz))
}

pub fn ld_rank_bound_f64(q: u32, s: usize, n: usize, k: usize) -> f64 {
    rational_to_f64(&ld_rank_bound(q, s, n, k))
}

/// Nearest `f64` (to about 2^-62 relative), also for numerators and
/// denominators far beyond `f64` range. No gcd is taken.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    let sign = if r.numer().is_negative() != r.denom().is_negative() { -1.0 } else { 1.0 };
    let (mn, en) = top_bits(r.numer().magnitude());
    let (md, ed) = top_bits(r.denom().magnitude());
    sign * (mn / md) * (2f64).powi((en - ed) as i32)
}

/// `x = m · 2^e` with `m` holding the leading (at most) 64 bits of `x`.
fn top_bits(x: &BigUint) -> (f64, i64) {
    let shift = x.bits().saturating_sub(64);
    let m: BigUint = x >> shift;
    (m.to_u64().expect("64 bits") as f64, shift as i64)
}

/// Expected dimension of a random subspace subcode of the punctured query
/// code, `max{(m-1)δ - ((m-1)δ - n)s, 0}`. Requires `(m-1)δ >= n`.
pub fn expected_subcode_dim(m: usize, delta: usize, n: usize, s: usize) -> Result<usize> {
    let len = (m.saturating_sub(1) * delta) as i128;
    if m == 0 || len < n as i128 {
        return Err(Error::InvalidParams(format!("expected_subcode_dim needs (m-1)δ >= n, got {len} < {n}")));
    }
    let d = len - (len - n as i128) * s as i128;
    Ok(d.max(0) as usize)
}

/// `log2` of the field size whose multiplication cost matches `s`
/// coefficient-wise products in `F_q`, assuming quadratic cost:
/// `s (log q)^2 = (log q^{√s})^2`.
pub fn equiv_field_log2(q: u32, s: usize) -> f64 {
    (s as f64).sqrt() * (q as f64).log2()
}

/// One row of the parameter table.
#[derive(Clone, Debug, PartialEq)]
pub struct TableRow {
    pub q: u32,
    pub s: usize,
    pub v: usize,
    pub n: usize,
    pub k: usize,
    pub delta: usize,
    pub rate: BigRational,
    pub ss_log2: f64,
    pub ld_bound: f64,
    /// Published linear-dependency work factor, shown verbatim; there is no
    /// formula to recompute it from.
    pub ld_reported: Option<&'static str>,
}

/// `(q, s, v, n, k, reported linear-dependency work factor)`.
pub type TableSpec = (u32, usize, usize, usize, usize, Option<&'static str>);

/// The six published parameter sets.
pub const PUBLISHED_ROWS: [TableSpec; 6] = [
    (16, 32, 31, 100, 50, Some("2^128")),
    (16, 32, 16, 100, 50, Some("2^128")),
    (32, 32, 31, 100, 50, Some("2^160")),
    (32, 32, 26, 100, 50, Some("2^160")),
    (32, 32, 24, 100, 50, Some("2^120")),
    (64, 32, 21, 100, 50, Some("2^126")),
];

pub fn table_row(spec: TableSpec) -> Result<TableRow> {
    let (q, s, v, n, k, ld_reported) = spec;
    let p = SchemeParams::new(q, s, v, n, k, 1, 1)?;
    Ok(TableRow {
        q,
        s,
        v,
        n,
        k,
        delta: p.delta(),
        rate: rate_asymptotic(&p),
        ss_log2: ss_workfactor_log2(s, v, q),
        ld_bound: ld_rank_bound_f64(q, s, n, k),
        ld_reported,
    })
}

pub fn build_table(rows: &[TableSpec]) -> Result<Vec<TableRow>> {
    rows.iter().map(|&r| table_row(r)).collect()
}

impl TableRow {
    /// `key=value` pairs with keys `q,s,v,n,k,delta,rate_num,rate_den,ss_log2`
    /// (plus `ld_reported` when present), space separated.
    pub fn to_kv_line(&self) -> String {
        let mut line = format!(
            "q={} s={} v={} n={} k={} delta={} rate_num={} rate_den={} ss_log2={:.4}",
            self.q,
            self.s,
            self.v,
            self.n,
            self.k,
            self.delta,
            self.rate.numer(),
            self.rate.denom(),
            self.ss_log2
        );
        if let Some(ld) = self.ld_reported {
            let _ = write!(line, " ld_reported={ld}");
        }
        line
    }
}

/// Human-readable aligned table.
pub fn format_table(rows: &[TableRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:>4} {:>4} {:>4} {:>5} {:>5} {:>6} {:>8} {:>10} {:>14}",
        "q", "s", "v", "n", "k", "delta", "R", "subspace", "lin.dep."
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{:>4} {:>4} {:>4} {:>5} {:>5} {:>6} {:>8} {:>10} {:>14}",
            r.q,
            r.s,
            r.v,
            r.n,
            r.k,
            r.delta,
            format!("{}/{}", r.rate.numer(), r.rate.denom()),
            format!("2^{:.1}", r.ss_log2),
            r.ld_reported.map_or("-".to_string(), |ld| format!("{ld} [reported]")),
        );
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepPoint {
    pub v: usize,
    pub ss_log2: f64,
    pub ld_bound: f64,
}

/// Work factor and rank bound for each `v` in the range (`0 < v < s`).
pub fn sweep_v(q: u32, s: usize, n: usize, k: usize, vs: RangeInclusive<usize>) -> Result<Vec<SweepPoint>> {
    if *vs.start() == 0 || *vs.end() >= s {
        return Err(Error::InvalidParams(format!("sweep range must lie in 1..{s}")));
    }
    if k == 0 || k >= n {
        return Err(Error::InvalidParams("k < n required".into()));
    }
    let ld = ld_rank_bound_f64(q, s, n, k);
    Ok(vs.map(|v| SweepPoint { v, ss_log2: ss_workfactor_log2(s, v, q), ld_bound: ld }).collect())
}

/// CSV with header `v,ss_log2,ld_bound`.
pub fn sweep_csv(points: &[SweepPoint]) -> String {
    let mut out = String::from("v,ss_log2,ld_bound\n");
    for p in points {
        let _ = writeln!(out, "{},{:.6},{:.12}", p.v, p.ss_log2, p.ld_bound);
    }
    out
}

pub fn parse_sweep_csv(text: &str) -> Result<Vec<SweepPoint>> {
    let mut lines = text.lines();
    if lines.next() != Some("v,ss_log2,ld_bound") {
        return Err(Error::Malformed("missing sweep CSV header".into()));
    }
    lines
        .filter(|l| !l.is_empty())
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            let bad = || Error::Malformed(format!("bad sweep line {l:?}"));
            if f.len() != 3 {
                return Err(bad());
            }
            Ok(SweepPoint {
                v: f[0].parse().map_err(|_| bad())?,
                ss_log2: f[1].parse().map_err(|_| bad())?,
                ld_bound: f[2].parse().map_err(|_| bad())?,
            })
        })
        .collect()
}
