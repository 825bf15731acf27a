//! The secret basis Γ of `F_{q^s}` over `F_q` and the split into the noise
//! subspace `V` (first `v` basis vectors) and the payload subspace `W`
//! (remaining `s - v`).

use rand::Rng;

use super::{BaseField, ExtElem, ExtField};
use crate::error::{Error, Result};
use crate::linalg::{inverse_base, rank_base, MatBase};

/// Selects one of the two complementary subspaces.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subspace {
    /// Span of `γ_1 .. γ_v`.
    V,
    /// Span of `γ_{v+1} .. γ_s`.
    W,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisGamma {
    base: BaseField,
    /// Row `j` holds `γ_{j+1}` in polynomial-basis coordinates.
    b: MatBase,
    b_inv: MatBase,
    v: usize,
}

impl BasisGamma {
    /// Uniformly random invertible `B` by rejection on rank.
    pub fn sample<R: Rng + ?Sized>(field: &ExtField, v: usize, rng: &mut R) -> Result<Self> {
        let s = field.degree();
        if v == 0 || v >= s {
            return Err(Error::InvalidParams(format!("basis split needs 0 < v < s, got v={v}, s={s}")));
        }
        let base = field.base().clone();
        loop {
            let b = MatBase::random(&base, s, s, rng);
            if rank_base(&base, &b) == s {
                return Self::from_matrix(base, b, v);
            }
        }
    }

    pub fn from_matrix(base: BaseField, b: MatBase, v: usize) -> Result<Self> {
        let s = b.rows();
        if b.cols() != s {
            return Err(Error::dims("basis matrix must be square"));
        }
        if v > s {
            return Err(Error::InvalidParams(format!("split point {v} exceeds s = {s}")));
        }
        let b_inv = inverse_base(&base, &b)?;
        Ok(BasisGamma { base, b, b_inv, v })
    }

    /// The polynomial basis itself, split at `v`.
    pub fn identity(field: &ExtField, v: usize) -> Result<Self> {
        Self::from_matrix(field.base().clone(), MatBase::identity(field.degree()), v)
    }

    pub fn base_field(&self) -> &BaseField {
        &self.base
    }

    pub fn matrix(&self) -> &MatBase {
        &self.b
    }

    pub fn inverse(&self) -> &MatBase {
        &self.b_inv
    }

    pub fn split(&self) -> usize {
        self.v
    }

    pub fn degree(&self) -> usize {
        self.b.rows()
    }

    /// `γ_j` (0-based) as a field element.
    pub fn gamma(&self, j: usize) -> ExtElem {
        ExtElem::from_vec_unchecked(self.b.row(j).to_vec())
    }

    /// Γ-coordinates: `rep(a) · B⁻¹`.
    pub fn coords(&self, a: &[u8]) -> Vec<u8> {
        self.b_inv.vec_mul(&self.base, a).expect("element width equals s")
    }

    pub fn from_coords(&self, c: &[u8]) -> ExtElem {
        ExtElem::from_vec_unchecked(self.b.vec_mul(&self.base, c).expect("coordinate count equals s"))
    }

    /// Keeps the `W`-part: zeroes the first `v` Γ-coordinates.
    pub fn psi_cut(&self, a: &[u8]) -> ExtElem {
        let mut c = self.coords(a);
        c[..self.v].fill(0);
        self.from_coords(&c)
    }

    /// The `s - v` Γ-coordinates of `a` on the `W` basis vectors.
    pub fn w_coords(&self, a: &[u8]) -> Vec<u8> {
        self.coords(a).split_off(self.v)
    }

    pub fn contains(&self, which: Subspace, a: &[u8]) -> bool {
        let c = self.coords(a);
        match which {
            Subspace::V => c[self.v..].iter().all(|&x| x == 0),
            Subspace::W => c[..self.v].iter().all(|&x| x == 0),
        }
    }

    /// Basis rows of `V` (polynomial coordinates), `v × s`.
    pub fn v_basis(&self) -> MatBase {
        self.rows(0..self.v)
    }

    /// Basis rows of `W` (polynomial coordinates), `(s - v) × s`.
    pub fn w_basis(&self) -> MatBase {
        self.rows(self.v..self.degree())
    }

    fn rows(&self, range: std::ops::Range<usize>) -> MatBase {
        let s = self.degree();
        let data = range.clone().flat_map(|r| self.b.row(r).to_vec()).collect();
        MatBase::new(range.len(), s, data).expect("row slice of a square matrix")
    }

    /// Uniform element of the chosen subspace (zero included).
    pub fn sample_elem<R: Rng + ?Sized>(&self, which: Subspace, rng: &mut R) -> ExtElem {
        let s = self.degree();
        let mut c = vec![0u8; s];
        let range = match which {
            Subspace::V => 0..self.v,
            Subspace::W => self.v..s,
        };
        for j in range {
            c[j] = self.base.random(rng);
        }
        self.from_coords(&c)
    }
}
