//! Random linear `[n, k]` codes over `F_{q^s}` and information-set erasure
//! decoding.

use rand::seq::index::sample;
use rand::Rng;

use crate::error::{Error, Result};
use crate::gf::ExtField;
use crate::linalg::{inverse_ext, mul_ext, rank_ext, vec_mul_ext, MatExt};

/// Attempts made by [`pick_information_set`] before giving up.
pub const INFO_SET_RETRY_LIMIT: usize = 100;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearCode {
    field: ExtField,
    g: MatExt,
}

impl LinearCode {
    /// Wraps a generator matrix, checking `rank(G) = k < n`.
    pub fn from_generator(field: ExtField, g: MatExt) -> Result<Self> {
        if g.width() != field.degree() {
            return Err(Error::dims("generator entries do not match the field degree"));
        }
        if g.rows() == 0 || g.rows() >= g.cols() {
            return Err(Error::InvalidParams(format!(
                "code needs 0 < k < n, got k={}, n={}",
                g.rows(),
                g.cols()
            )));
        }
        if rank_ext(&field, &g) != g.rows() {
            return Err(Error::InvalidParams("generator matrix is not of full row rank".into()));
        }
        Ok(LinearCode { field, g })
    }

    pub fn field(&self) -> &ExtField {
        &self.field
    }

    pub fn generator(&self) -> &MatExt {
        &self.g
    }

    pub fn n(&self) -> usize {
        self.g.cols()
    }

    pub fn k(&self) -> usize {
        self.g.rows()
    }

    /// `u · G` for a message of `k` extension elements.
    pub fn encode(&self, u: &[u8]) -> Result<Vec<u8>> {
        vec_mul_ext(&self.field, u, &self.g)
    }

    /// True iff `word` lies in the row space of `G`.
    pub fn contains(&self, word: &[u8]) -> bool {
        let s = self.field.degree();
        if word.len() != self.n() * s {
            return false;
        }
        let w = MatExt::new(1, self.n(), s, word.to_vec()).expect("length checked");
        let mut stacked = self.g.clone();
        let mut data = stacked.data().to_vec();
        data.extend_from_slice(w.data());
        stacked = MatExt::new(self.k() + 1, self.n(), s, data).expect("shape is consistent");
        rank_ext(&self.field, &stacked) == self.k()
    }
}

/// Uniform rank-`k` generator in `F_{q^s}^{k×n}`, rejection on rank.
pub fn sample_code<R: Rng + ?Sized>(field: &ExtField, n: usize, k: usize, rng: &mut R) -> Result<LinearCode> {
    sample_code_counting(field, n, k, rng).map(|(c, _)| c)
}

/// Like [`sample_code`], also returning the number of draws used.
pub fn sample_code_counting<R: Rng + ?Sized>(
    field: &ExtField,
    n: usize,
    k: usize,
    rng: &mut R,
) -> Result<(LinearCode, usize)> {
    if k == 0 || k >= n {
        return Err(Error::InvalidParams(format!("code needs 0 < k < n, got k={k}, n={n}")));
    }
    let mut draws = 0;
    loop {
        draws += 1;
        let g = MatExt::random(field, k, n, rng);
        if rank_ext(field, &g) == k {
            return Ok((LinearCode { field: field.clone(), g }, draws));
        }
    }
}

/// An information set `I` (`|I| = k`), its complement `ℰ`, and the inverse of
/// `G` restricted to `I`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InfoSet {
    info: Vec<usize>,
    erasures: Vec<usize>,
    g_info_inv: MatExt,
}

impl InfoSet {
    /// Checks that `indices` (any order, no repeats) is an information set.
    pub fn new(code: &LinearCode, mut indices: Vec<usize>) -> Result<Self> {
        let n = code.n();
        indices.sort_unstable();
        indices.dedup();
        if indices.len() != code.k() {
            return Err(Error::InvalidParams(format!(
                "information set needs {} distinct indices, got {}",
                code.k(),
                indices.len()
            )));
        }
        if let Some(&bad) = indices.iter().find(|&&i| i >= n) {
            return Err(Error::IndexOutOfRange { index: bad, bound: n });
        }
        let g_i = code.g.select_cols(&indices);
        let g_info_inv = inverse_ext(&code.field, &g_i).map_err(|_| {
            Error::InvalidParams("restriction of G to the index set is singular".into())
        })?;
        let erasures = (0..n).filter(|i| indices.binary_search(i).is_err()).collect();
        Ok(InfoSet { info: indices, erasures, g_info_inv })
    }

    /// Sorted indices of `I`.
    pub fn info(&self) -> &[usize] {
        &self.info
    }

    /// Sorted indices of `ℰ = [n] \ I`.
    pub fn erasures(&self) -> &[usize] {
        &self.erasures
    }

    pub fn g_info_inv(&self) -> &MatExt {
        &self.g_info_inv
    }
}

/// True iff `G|_I` has rank `k`.
pub fn is_information_set(code: &LinearCode, indices: &[usize]) -> bool {
    indices.len() == code.k() && rank_ext(&code.field, &code.g.select_cols(indices)) == code.k()
}

/// Draws uniform `k`-subsets until one is an information set.
pub fn pick_information_set<R: Rng + ?Sized>(code: &LinearCode, rng: &mut R) -> Result<InfoSet> {
    for _ in 0..INFO_SET_RETRY_LIMIT {
        let mut idx = sample(rng, code.n(), code.k()).into_vec();
        idx.sort_unstable();
        if is_information_set(code, &idx) {
            return InfoSet::new(code, idx);
        }
    }
    Err(Error::RetryLimitExceeded("picking an information set"))
}

/// `u · G` with `u` uniform in `F_{q^s}^k`.
pub fn sample_codeword<R: Rng + ?Sized>(code: &LinearCode, rng: &mut R) -> Vec<u8> {
    let s = code.field.degree();
    let u: Vec<u8> = (0..code.k() * s).map(|_| code.field.base().random(rng)).collect();
    code.encode(&u).expect("message length is k")
}

/// Restriction of a length-`n` word to the given positions.
pub fn restrict(word: &[u8], s: usize, positions: &[usize]) -> Vec<u8> {
    positions.iter().flat_map(|&p| word[p * s..(p + 1) * s].iter().copied()).collect()
}

/// The unique codeword agreeing with `values_on_info` on `I`:
/// `(values · G_I⁻¹) · G`.
pub fn erasure_decode(code: &LinearCode, iset: &InfoSet, values_on_info: &[u8]) -> Result<Vec<u8>> {
    let msg = vec_mul_ext(&code.field, values_on_info, &iset.g_info_inv)?;
    vec_mul_ext(&code.field, &msg, &code.g)
}

/// Decodes every row of `values` (`rows × k`) at once.
pub fn erasure_decode_rows(code: &LinearCode, iset: &InfoSet, values: &MatExt) -> Result<MatExt> {
    let msg = mul_ext(&code.field, values, &iset.g_info_inv)?;
    mul_ext(&code.field, &msg, &code.g)
}
