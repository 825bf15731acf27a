//! Arithmetic in `F_q` (`q = 2^w`, `w <= 8`) and in its degree-`s`
//! extension `F_{q^s} = F_q[x]/(p(x))`.
//!
//! Extension elements live in the polynomial basis over `F_q`: an element is
//! the vector of its `s` coefficients, lowest degree first. Any other basis
//! (see [`BasisGamma`]) is a change of coordinates on top of that, never a
//! change of representation.

use std::fmt;
use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};

mod basis;
pub(crate) mod poly;

pub use basis::{BasisGamma, Subspace};

/// Fixed base-field moduli per `w`, including the leading `x^w` term.
pub const DEFAULT_MODULI: [u16; 9] = [
    0,
    0b11,          // x + 1
    0b111,         // x^2 + x + 1
    0b1011,        // x^3 + x + 1
    0b1_0011,      // x^4 + x + 1
    0b10_0101,     // x^5 + x^2 + 1
    0b100_0011,    // x^6 + x + 1
    0b1000_0011,   // x^7 + x + 1
    0b1_0001_1011, // x^8 + x^4 + x^3 + x + 1
];

/// Carry-less multiply of two `w`-bit polynomials, reduced by `modulus`
/// (which includes the `x^w` bit).
pub fn mul_shift_xor(w: u8, modulus: u16, a: u8, b: u8) -> u8 {
    let top = 1u16 << w;
    let mut a = a as u16;
    let mut b = b;
    let mut acc = 0u16;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a;
        }
        b >>= 1;
        a <<= 1;
        if a & top != 0 {
            a ^= modulus;
        }
    }
    acc as u8
}

fn is_irreducible_f2(modulus: u16, w: u8) -> bool {
    if modulus >> w != 1 {
        return false;
    }
    // trial division by every polynomial of degree 1..=w/2
    for d in 1..=(w / 2) {
        for cand in (1u16 << d)..(1u16 << (d + 1)) {
            let mut r = modulus;
            for shift in (0..=(w - d)).rev() {
                if r & (1 << (shift + d)) != 0 {
                    r ^= cand << shift;
                }
            }
            if r == 0 {
                return false;
            }
        }
    }
    true
}

/// The base field `F_q` with `q = 2^w`.
#[derive(Clone)]
pub struct BaseField {
    w: u8,
    modulus: u16,
    mul_table: Arc<[u8]>,
    inv_table: Arc<[u8]>,
}

impl BaseField {
    /// Base field with the default modulus for `w`.
    pub fn new(w: u8) -> Result<Self> {
        if !(1..=8).contains(&w) {
            return Err(Error::InvalidParams(format!(
                "base field exponent w must be in 1..=8, got {w}"
            )));
        }
        Self::with_modulus(w, DEFAULT_MODULI[w as usize])
    }

    /// Base field of order `q`, which must be a power of two in `2..=256`.
    pub fn from_order(q: u32) -> Result<Self> {
        if !q.is_power_of_two() || !(2..=256).contains(&q) {
            return Err(Error::InvalidParams(format!(
                "q must be 2^w with 1 <= w <= 8, got {q}"
            )));
        }
        Self::new(q.trailing_zeros() as u8)
    }

    /// `modulus` includes the leading `x^w` bit and must be irreducible.
    pub fn with_modulus(w: u8, modulus: u16) -> Result<Self> {
        if !(1..=8).contains(&w) {
            return Err(Error::InvalidParams(format!(
                "base field exponent w must be in 1..=8, got {w}"
            )));
        }
        if !is_irreducible_f2(modulus, w) {
            return Err(Error::InvalidParams(format!(
                "modulus {modulus:#b} is not an irreducible polynomial of degree {w}"
            )));
        }
        let q = 1usize << w;
        let mut mul_table = vec![0u8; q * q];
        for a in 0..q {
            for b in a..q {
                let p = mul_shift_xor(w, modulus, a as u8, b as u8);
                mul_table[a * q + b] = p;
                mul_table[b * q + a] = p;
            }
        }
        let mut inv_table = vec![0u8; q];
        for a in 1..q {
            inv_table[a] = (1..q)
                .find(|&b| mul_table[a * q + b] == 1)
                .expect("every nonzero element of a field is invertible") as u8;
        }
        Ok(BaseField {
            w,
            modulus,
            mul_table: mul_table.into(),
            inv_table: inv_table.into(),
        })
    }

    pub fn w(&self) -> u8 {
        self.w
    }

    /// Full modulus including the `x^w` bit.
    pub fn modulus(&self) -> u16 {
        self.modulus
    }

    /// Modulus with the implicit leading term dropped; fits one byte.
    pub fn modulus_mask(&self) -> u8 {
        (self.modulus & ((1u16 << self.w) - 1)) as u8
    }

    pub fn order(&self) -> usize {
        1usize << self.w
    }

    #[inline]
    pub fn add(&self, a: u8, b: u8) -> u8 {
        a ^ b
    }

    #[inline]
    pub fn mul(&self, a: u8, b: u8) -> u8 {
        self.mul_table[((a as usize) << self.w) | b as usize]
    }

    /// Row of the multiplication table for a fixed left factor.
    #[inline]
    pub fn mul_row(&self, a: u8) -> &[u8] {
        let q = self.order();
        &self.mul_table[a as usize * q..(a as usize + 1) * q]
    }

    pub fn inv(&self, a: u8) -> Result<u8> {
        if a == 0 {
            Err(Error::DivisionByZero)
        } else {
            Ok(self.inv_table[a as usize])
        }
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> u8 {
        rng.gen_range(0..self.order()) as u8
    }

    pub fn contains(&self, a: u8) -> bool {
        (a as usize) < self.order()
    }
}

impl PartialEq for BaseField {
    fn eq(&self, other: &Self) -> bool {
        self.w == other.w && self.modulus == other.modulus
    }
}

impl Eq for BaseField {}

impl fmt::Debug for BaseField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF(2^{}; {:#b})", self.w, self.modulus)
    }
}

/// An element of `F_{q^s}`: `s` coefficients over `F_q`, lowest degree first.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExtElem {
    coeffs: Vec<u8>,
}

impl ExtElem {
    pub fn coeffs(&self) -> &[u8] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<u8> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub(crate) fn from_vec_unchecked(coeffs: Vec<u8>) -> Self {
        ExtElem { coeffs }
    }
}

impl fmt::Debug for ExtElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.coeffs)
    }
}

/// The extension field `F_{q^s} = F_q[x]/(p(x))` for a monic irreducible `p`.
#[derive(Clone, PartialEq, Eq)]
pub struct ExtField {
    base: BaseField,
    s: usize,
    modulus: Vec<u8>,
}

impl fmt::Debug for ExtField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}[x]/{:?} (s = {})", self.base, self.modulus, self.s)
    }
}

impl ExtField {
    /// `modulus` holds `s + 1` coefficients, lowest first, and must be monic
    /// and irreducible over the base field.
    pub fn new(base: BaseField, modulus: Vec<u8>) -> Result<Self> {
        if modulus.len() < 2 {
            return Err(Error::InvalidParams("extension degree must be >= 1".into()));
        }
        let s = modulus.len() - 1;
        if modulus[s] != 1 {
            return Err(Error::InvalidParams("extension modulus must be monic".into()));
        }
        if modulus.iter().any(|&c| !base.contains(c)) {
            return Err(Error::InvalidParams(
                "extension modulus coefficient outside the base field".into(),
            ));
        }
        if !poly::is_irreducible(&base, &modulus) {
            return Err(Error::InvalidParams(format!(
                "extension modulus {modulus:?} is reducible"
            )));
        }
        Ok(ExtField { base, s, modulus })
    }

    /// Extension of degree `s` with a modulus drawn by [`find_irreducible`].
    pub fn random<R: Rng + ?Sized>(base: BaseField, s: usize, rng: &mut R) -> Result<Self> {
        if s == 0 {
            return Err(Error::InvalidParams("extension degree must be >= 1".into()));
        }
        let modulus = find_irreducible(&base, s, rng);
        Ok(ExtField { base, s, modulus })
    }

    pub fn base(&self) -> &BaseField {
        &self.base
    }

    pub fn degree(&self) -> usize {
        self.s
    }

    pub fn modulus(&self) -> &[u8] {
        &self.modulus
    }

    pub fn zero(&self) -> ExtElem {
        ExtElem { coeffs: vec![0; self.s] }
    }

    pub fn one(&self) -> ExtElem {
        self.embed(1)
    }

    /// The canonical image of `b ∈ F_q` in `F_{q^s}`.
    pub fn embed(&self, b: u8) -> ExtElem {
        let mut coeffs = vec![0; self.s];
        coeffs[0] = b;
        ExtElem { coeffs }
    }

    /// The class of `x` in `F_q[x]/(p)`.
    pub fn generator(&self) -> ExtElem {
        let mut coeffs = vec![0; self.s];
        if self.s > 1 {
            coeffs[1] = 1;
        } else {
            // s = 1: x ≡ -p_0 = p_0
            coeffs[0] = self.modulus[0];
        }
        ExtElem { coeffs }
    }

    pub fn elem(&self, coeffs: Vec<u8>) -> Result<ExtElem> {
        if coeffs.len() != self.s {
            return Err(Error::dims(format!(
                "extension element needs {} coefficients, got {}",
                self.s,
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|&c| !self.base.contains(c)) {
            return Err(Error::Malformed("coefficient outside the base field".into()));
        }
        Ok(ExtElem { coeffs })
    }

    /// Decodes the integer `index < q^s` in base `q`, lowest digit first.
    /// Handy for exhaustive enumeration of small fields.
    pub fn elem_from_index(&self, mut index: u64) -> ExtElem {
        let q = self.base.order() as u64;
        let coeffs = (0..self.s)
            .map(|_| {
                let c = (index % q) as u8;
                index /= q;
                c
            })
            .collect();
        ExtElem { coeffs }
    }

    /// `q^s` if it fits in a `u64`.
    pub fn order(&self) -> Option<u64> {
        (self.base.order() as u64).checked_pow(self.s as u32)
    }

    pub fn random_elem<R: Rng + ?Sized>(&self, rng: &mut R) -> ExtElem {
        ExtElem {
            coeffs: (0..self.s).map(|_| self.base.random(rng)).collect(),
        }
    }

    pub fn add(&self, a: &ExtElem, b: &ExtElem) -> ExtElem {
        ExtElem {
            coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x ^ y).collect(),
        }
    }

    pub fn mul(&self, a: &ExtElem, b: &ExtElem) -> ExtElem {
        let mut out = vec![0u8; self.s];
        self.mul_into(&a.coeffs, &b.coeffs, &mut out);
        ExtElem { coeffs: out }
    }

    pub fn inv(&self, a: &ExtElem) -> Result<ExtElem> {
        let mut out = vec![0u8; self.s];
        self.inv_into(&a.coeffs, &mut out)?;
        Ok(ExtElem { coeffs: out })
    }

    /// `a · b` with `b ∈ F_q`: `s` base multiplications, no reduction.
    pub fn scalar_mul(&self, a: &ExtElem, b: u8) -> ExtElem {
        let row = self.base.mul_row(b);
        ExtElem {
            coeffs: a.coeffs.iter().map(|&c| row[c as usize]).collect(),
        }
    }

    /// Schoolbook product followed by reduction modulo the monic modulus.
    pub fn mul_into(&self, a: &[u8], b: &[u8], out: &mut [u8]) {
        let s = self.s;
        debug_assert!(a.len() == s && b.len() == s && out.len() == s);
        let mut buf = [0u8; 64];
        let mut heap;
        let prod: &mut [u8] = if 2 * s - 1 <= buf.len() {
            &mut buf[..2 * s - 1]
        } else {
            heap = vec![0u8; 2 * s - 1];
            &mut heap
        };
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            let row = self.base.mul_row(x);
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] ^= row[y as usize];
            }
        }
        for i in (s..2 * s - 1).rev() {
            let c = prod[i];
            if c == 0 {
                continue;
            }
            let row = self.base.mul_row(c);
            for (j, &m) in self.modulus[..s].iter().enumerate() {
                prod[i - s + j] ^= row[m as usize];
            }
            prod[i] = 0;
        }
        out.copy_from_slice(&prod[..s]);
    }

    pub fn inv_into(&self, a: &[u8], out: &mut [u8]) -> Result<()> {
        if a.iter().all(|&c| c == 0) {
            return Err(Error::DivisionByZero);
        }
        let inv = poly::inv_mod(&self.base, a, &self.modulus)
            .expect("nonzero elements are invertible modulo an irreducible polynomial");
        out.fill(0);
        out[..inv.len()].copy_from_slice(&inv);
        Ok(())
    }
}

/// Draws random monic degree-`s` polynomials over `F_q` until one passes the
/// irreducibility test. Roughly one candidate in `s` is accepted.
pub fn find_irreducible<R: Rng + ?Sized>(base: &BaseField, s: usize, rng: &mut R) -> Vec<u8> {
    assert!(s >= 1, "extension degree must be >= 1");
    loop {
        let mut cand: Vec<u8> = (0..s).map(|_| base.random(rng)).collect();
        cand.push(1);
        if s > 1 && cand[0] == 0 {
            continue;
        }
        if poly::is_irreducible(base, &cand) {
            return cand;
        }
    }
}

/// Public irreducibility test for a coefficient vector (lowest first).
pub fn is_irreducible(base: &BaseField, p: &[u8]) -> bool {
    poly::is_irreducible(base, p)
}
