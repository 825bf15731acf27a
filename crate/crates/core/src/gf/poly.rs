//! Dense univariate polynomials over a base field `F_q`, coefficients lowest
//! degree first. Used for the extension-field construction only.

use super::BaseField;

pub(crate) fn trim(p: &mut Vec<u8>) {
    while p.last() == Some(&0) {
        p.pop();
    }
}

/// Degree of `p`, `None` for the zero polynomial.
pub(crate) fn degree(p: &[u8]) -> Option<usize> {
    p.iter().rposition(|&c| c != 0)
}

pub(crate) fn add(a: &[u8], b: &[u8]) -> Vec<u8> {
    let mut out = vec![0u8; a.len().max(b.len())];
    for (o, &c) in out.iter_mut().zip(a) {
        *o ^= c;
    }
    for (o, &c) in out.iter_mut().zip(b) {
        *o ^= c;
    }
    trim(&mut out);
    out
}

pub(crate) fn mul(f: &BaseField, a: &[u8], b: &[u8]) -> Vec<u8> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u8; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] ^= f.mul(x, y);
        }
    }
    trim(&mut out);
    out
}

/// Returns `(quotient, remainder)`. Panics if `d` is zero.
pub(crate) fn divrem(f: &BaseField, a: &[u8], d: &[u8]) -> (Vec<u8>, Vec<u8>) {
    let dd = degree(d).expect("division by the zero polynomial");
    let lead_inv = f.inv(d[dd]).expect("nonzero leading coefficient");
    let mut rem: Vec<u8> = a.to_vec();
    trim(&mut rem);
    if rem.len() <= dd {
        return (Vec::new(), rem);
    }
    let mut quot = vec![0u8; rem.len() - dd];
    while let Some(rd) = degree(&rem) {
        if rd < dd {
            break;
        }
        let c = f.mul(rem[rd], lead_inv);
        let shift = rd - dd;
        quot[shift] = c;
        for (j, &dj) in d[..=dd].iter().enumerate() {
            rem[shift + j] ^= f.mul(c, dj);
        }
        trim(&mut rem);
    }
    trim(&mut quot);
    (quot, rem)
}

pub(crate) fn rem(f: &BaseField, a: &[u8], d: &[u8]) -> Vec<u8> {
    divrem(f, a, d).1
}

pub(crate) fn gcd(f: &BaseField, a: &[u8], b: &[u8]) -> Vec<u8> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let r = rem(f, &a, &b);
        a = b;
        b = r;
    }
    a
}

pub(crate) fn mulmod(f: &BaseField, a: &[u8], b: &[u8], m: &[u8]) -> Vec<u8> {
    rem(f, &mul(f, a, b), m)
}

/// `base^exp mod m` by square-and-multiply.
pub(crate) fn powmod(f: &BaseField, base: &[u8], mut exp: u64, m: &[u8]) -> Vec<u8> {
    let mut acc = vec![1u8];
    let mut sq = rem(f, base, m);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(f, &acc, &sq, m);
        }
        sq = mulmod(f, &sq, &sq, m);
        exp >>= 1;
    }
    rem(f, &acc, m)
}

/// Ben-Or test: a polynomial of degree `d` over `F_q` is irreducible iff
/// `gcd(p, x^(q^j) - x) = 1` for every `1 <= j <= d/2`.
pub(crate) fn is_irreducible(f: &BaseField, p: &[u8]) -> bool {
    let d = match degree(p) {
        None | Some(0) => return false,
        Some(d) => d,
    };
    if d == 1 {
        return true;
    }
    let q = f.order() as u64;
    let x = vec![0u8, 1];
    let mut h = x.clone();
    for _ in 1..=d / 2 {
        h = powmod(f, &h, q, p);
        let g = gcd(f, p, &add(&h, &x));
        if degree(&g) != Some(0) {
            return false;
        }
    }
    true
}

/// Extended Euclid: returns `a^{-1} mod m`, or `None` when `gcd(a, m) != 1`.
pub(crate) fn inv_mod(f: &BaseField, a: &[u8], m: &[u8]) -> Option<Vec<u8>> {
    let mut r0 = m.to_vec();
    let mut r1 = rem(f, a, m);
    trim(&mut r0);
    let mut t0: Vec<u8> = Vec::new();
    let mut t1: Vec<u8> = vec![1];
    while !r1.is_empty() {
        let (quo, r2) = divrem(f, &r0, &r1);
        let t2 = add(&t0, &mul(f, &quo, &t1));
        r0 = r1;
        r1 = r2;
        t0 = t1;
        t1 = t2;
    }
    if degree(&r0) != Some(0) {
        return None;
    }
    let c = f.inv(r0[0]).ok()?;
    let scaled: Vec<u8> = t0.iter().map(|&t| f.mul(t, c)).collect();
    Some(rem(f, &scaled, m))
}
