//! The retrieval scheme: parameters, query generation, the server response
//! and file recovery.
//!
//! A query for file `i` is `Q = D + E + Δ` where the `mδ` rows of `D` are
//! uniform codewords of a secret `[n, k]` code, `E` carries noise from the
//! subspace `V` on the erasure positions `ℰ`, and `Δ` adds a full-rank block
//! over `W` to rows `iδ .. (i+1)δ` only (files are 0-based in code). The
//! server returns `A = X · Q`. For each row the user erasure-decodes the
//! codeword part from the information set, keeps the `W`-coordinates of the
//! residual on `ℰ` and solves against `Δ̂` to read off `X^i`.

use std::ops::Range;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::code::{erasure_decode_rows, pick_information_set, sample_code, sample_codeword, InfoSet, LinearCode};
use crate::error::{Error, Result};
use crate::gf::{BaseField, BasisGamma, ExtField, Subspace};
use crate::linalg::{inverse_base, mat_mul_mixed, rank_base_of_ext, MatBase, MatExt};
use crate::wire;

/// Whole-matrix resampling attempts for `Δ̂` before giving up.
pub const DELTA_RETRY_LIMIT: usize = 100;

/// Public parameters `(q, s, v, n, k, m, L)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SchemeParams {
    /// Base field order, `2^w` with `1 <= w <= 8`.
    pub q: u32,
    /// Extension degree.
    pub s: usize,
    /// Dimension of the noise subspace `V`.
    pub v: usize,
    /// Code length.
    pub n: usize,
    /// Code dimension.
    pub k: usize,
    /// Number of files.
    pub m: usize,
    /// Rows per file.
    pub l: usize,
}

impl SchemeParams {
    /// Builds and validates.
    pub fn new(q: u32, s: usize, v: usize, n: usize, k: usize, m: usize, l: usize) -> Result<Self> {
        let p = SchemeParams { q, s, v, n, k, m, l };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidParams(msg.to_string()));
        if !self.q.is_power_of_two() || !(2..=256).contains(&self.q) {
            return bad("q must be 2^w with 1 <= w <= 8");
        }
        if self.v == 0 {
            return bad("0 < v required");
        }
        if self.v >= self.s {
            return bad("v < s required");
        }
        if self.k == 0 {
            return bad("0 < k required");
        }
        if self.k >= self.n {
            return bad("k < n required");
        }
        if self.m == 0 {
            return bad("m >= 1 required");
        }
        if self.l == 0 {
            return bad("L >= 1 required");
        }
        let fits = |x: Option<usize>| x.is_some_and(|x| x <= u32::MAX as usize);
        let delta = (self.s - self.v).checked_mul(self.n - self.k);
        if !fits(delta) || !fits(delta.and_then(|d| d.checked_mul(self.m))) || !fits(Some(self.s)) {
            return bad("m·δ must fit in 32 bits");
        }
        if self.s > u16::MAX as usize {
            return bad("s must fit in 16 bits");
        }
        Ok(())
    }

    pub fn w(&self) -> u8 {
        self.q.trailing_zeros() as u8
    }

    /// Subpacketization `δ = (s - v)(n - k)`.
    pub fn delta(&self) -> usize {
        (self.s - self.v) * (self.n - self.k)
    }

    /// Query row count `m·δ`, also the column count of the database.
    pub fn query_rows(&self) -> usize {
        self.m * self.delta()
    }

    /// Database columns holding file `i` (0-based).
    pub fn file_cols(&self, i: usize) -> Range<usize> {
        let d = self.delta();
        i * d..(i + 1) * d
    }
}

/// The `L × mδ` file matrix; file `i` occupies columns `iδ .. (i+1)δ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Database {
    params: SchemeParams,
    x: MatBase,
}

impl Database {
    pub fn new(params: SchemeParams, x: MatBase) -> Result<Self> {
        params.validate()?;
        if x.rows() != params.l || x.cols() != params.query_rows() {
            return Err(Error::dims(format!(
                "database must be {}x{}, got {}x{}",
                params.l,
                params.query_rows(),
                x.rows(),
                x.cols()
            )));
        }
        if x.data().iter().any(|&b| b as u32 >= params.q) {
            return Err(Error::Malformed("database symbol outside F_q".into()));
        }
        Ok(Database { params, x })
    }

    pub fn random<R: Rng + ?Sized>(params: SchemeParams, rng: &mut R) -> Result<Self> {
        params.validate()?;
        let base = BaseField::from_order(params.q)?;
        let x = MatBase::random(&base, params.l, params.query_rows(), rng);
        Ok(Database { params, x })
    }

    pub fn params(&self) -> &SchemeParams {
        &self.params
    }

    pub fn matrix(&self) -> &MatBase {
        &self.x
    }

    /// File `i` as an `L × δ` matrix.
    pub fn file(&self, i: usize) -> Result<MatBase> {
        if i >= self.params.m {
            return Err(Error::IndexOutOfRange { index: i, bound: self.params.m });
        }
        let cols: Vec<usize> = self.params.file_cols(i).collect();
        Ok(self.x.select_cols(&cols))
    }
}

/// Spreads the columns of `ehat` onto the positions `erasures` (sorted) of a
/// width-`n` matrix, zero elsewhere: `E · M_ℰ`.
pub fn phi_map(ehat: &MatExt, erasures: &[usize], n: usize) -> Result<MatExt> {
    if ehat.cols() != erasures.len() {
        return Err(Error::dims(format!(
            "phi_map: {} columns for {} erasure positions",
            ehat.cols(),
            erasures.len()
        )));
    }
    if erasures.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParams("erasure positions must be strictly increasing".into()));
    }
    if let Some(&bad) = erasures.iter().find(|&&e| e >= n) {
        return Err(Error::IndexOutOfRange { index: bad, bound: n });
    }
    let mut out = MatExt::zeros(ehat.rows(), n, ehat.width());
    for r in 0..ehat.rows() {
        for (j, &e) in erasures.iter().enumerate() {
            out.set(r, e, ehat.get(r, j));
        }
    }
    Ok(out)
}

pub type QueryDigest = [u8; 32];

/// The `mδ × n` query matrix together with the public field description.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Query {
    params: SchemeParams,
    field: ExtField,
    q: MatExt,
}

impl Query {
    pub fn new(params: SchemeParams, field: ExtField, q: MatExt) -> Result<Self> {
        params.validate()?;
        if q.rows() != params.query_rows() || q.cols() != params.n || q.width() != params.s {
            return Err(Error::dims(format!(
                "query must be {}x{} over s = {}",
                params.query_rows(),
                params.n,
                params.s
            )));
        }
        if field.degree() != params.s || field.base().order() != params.q as usize {
            return Err(Error::ParamMismatch("field does not match (q, s)".into()));
        }
        Ok(Query { params, field, q })
    }

    pub fn params(&self) -> &SchemeParams {
        &self.params
    }

    pub fn field(&self) -> &ExtField {
        &self.field
    }

    pub fn matrix(&self) -> &MatExt {
        &self.q
    }

    /// SHA-256 of the wire encoding; binds a response to its query.
    pub fn digest(&self) -> QueryDigest {
        Sha256::digest(wire::encode_query(self)).into()
    }
}

/// The `L × n` answer over `F_{q^s}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Response {
    params: SchemeParams,
    query_digest: QueryDigest,
    a: MatExt,
}

impl Response {
    pub fn new(params: SchemeParams, query_digest: QueryDigest, a: MatExt) -> Result<Self> {
        if a.rows() != params.l || a.cols() != params.n || a.width() != params.s {
            return Err(Error::dims(format!(
                "response must be {}x{} over s = {}",
                params.l, params.n, params.s
            )));
        }
        Ok(Response { params, query_digest, a })
    }

    pub fn params(&self) -> &SchemeParams {
        &self.params
    }

    pub fn query_digest(&self) -> &QueryDigest {
        &self.query_digest
    }

    pub fn matrix(&self) -> &MatExt {
        &self.a
    }

    pub fn matrix_mut(&mut self) -> &mut MatExt {
        &mut self.a
    }
}

/// Acknowledges that a caller is deliberately reading secret query material
/// (white-box experiments only).
#[derive(Clone, Copy, Debug)]
pub struct ExposeSecret(());

impl ExposeSecret {
    pub fn acknowledge() -> Self {
        ExposeSecret(())
    }
}

/// Everything the user keeps private to decode the response.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuerySecret {
    params: SchemeParams,
    field: ExtField,
    code: LinearCode,
    iset: InfoSet,
    basis: BasisGamma,
    index: usize,
    delta_hat: MatExt,
    delta_solver: MatBase,
    seed: Option<u64>,
    query_digest: QueryDigest,
}

impl QuerySecret {
    /// Reassembles a secret from its persisted parts, recomputing the solver.
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        params: SchemeParams,
        code: LinearCode,
        iset: InfoSet,
        basis: BasisGamma,
        index: usize,
        delta_hat: MatExt,
        seed: Option<u64>,
        query_digest: QueryDigest,
    ) -> Result<Self> {
        params.validate()?;
        if index >= params.m {
            return Err(Error::IndexOutOfRange { index, bound: params.m });
        }
        let field = code.field().clone();
        if code.n() != params.n || code.k() != params.k || field.degree() != params.s {
            return Err(Error::ParamMismatch("code does not match (n, k, s)".into()));
        }
        if basis.degree() != params.s || basis.split() != params.v {
            return Err(Error::ParamMismatch("basis does not match (s, v)".into()));
        }
        let delta_solver = delta_solver(&basis, &delta_hat, params.delta())?;
        Ok(QuerySecret {
            params,
            field,
            code,
            iset,
            basis,
            index,
            delta_hat,
            delta_solver,
            seed,
            query_digest,
        })
    }

    pub fn params(&self) -> &SchemeParams {
        &self.params
    }

    pub fn field(&self) -> &ExtField {
        &self.field
    }

    pub fn code(&self) -> &LinearCode {
        &self.code
    }

    pub fn info_set(&self) -> &InfoSet {
        &self.iset
    }

    pub fn basis(&self) -> &BasisGamma {
        &self.basis
    }

    /// 0-based index of the requested file.
    pub fn index(&self) -> usize {
        self.index
    }

    pub fn delta_hat(&self) -> &MatExt {
        &self.delta_hat
    }

    pub fn delta_solver(&self) -> &MatBase {
        &self.delta_solver
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn query_digest(&self) -> &QueryDigest {
        &self.query_digest
    }

    /// Basis of the noise subspace `V` in polynomial coordinates (`v × s`).
    pub fn noise_subspace(&self, _: ExposeSecret) -> MatBase {
        self.basis.v_basis()
    }
}

/// `Δ̂_W`: the `δ × δ` matrix of `W`-coordinates of `Δ̂`, inverted.
fn delta_solver(basis: &BasisGamma, delta_hat: &MatExt, delta: usize) -> Result<MatBase> {
    let sv = basis.degree() - basis.split();
    if delta_hat.rows() != delta || delta_hat.cols() * sv != delta {
        return Err(Error::dims("Δ̂ must be δ × (n - k)"));
    }
    let mut data = Vec::with_capacity(delta * delta);
    for r in 0..delta_hat.rows() {
        for c in 0..delta_hat.cols() {
            let e = delta_hat.get(r, c);
            if !basis.contains(Subspace::W, e) {
                return Err(Error::InvalidParams("Δ̂ has an entry outside W".into()));
            }
            data.extend(basis.w_coords(e));
        }
    }
    let dw = MatBase::new(delta, delta, data)?;
    inverse_base(basis.base_field(), &dw)
        .map_err(|_| Error::InvalidParams("Δ̂ is not of full F_q-row rank".into()))
}

/// Samples a fresh code, information set, basis and noise, and builds the
/// query for file `index` (0-based).
pub fn build_query<R: Rng + ?Sized>(params: &SchemeParams, index: usize, rng: &mut R) -> Result<(Query, QuerySecret)> {
    params.validate()?;
    if index >= params.m {
        return Err(Error::IndexOutOfRange { index, bound: params.m });
    }
    let (n, k, s, v) = (params.n, params.k, params.s, params.v);
    let delta = params.delta();
    let rows = params.query_rows();

    let base = BaseField::from_order(params.q)?;
    let field = ExtField::random(base.clone(), s, rng)?;
    let code = sample_code(&field, n, k, rng)?;
    let iset = pick_information_set(&code, rng)?;
    let basis = BasisGamma::sample(&field, v, rng)?;

    let mut q = MatExt::zeros(rows, n, s);
    for r in 0..rows {
        q.row_mut(r).copy_from_slice(&sample_codeword(&code, rng));
    }

    let mut ehat = MatExt::zeros(rows, n - k, s);
    for r in 0..rows {
        for c in 0..n - k {
            ehat.set(r, c, basis.sample_elem(Subspace::V, rng).coeffs());
        }
    }
    q.add_assign(&phi_map(&ehat, iset.erasures(), n)?)?;

    let delta_hat = (0..DELTA_RETRY_LIMIT)
        .find_map(|_| {
            let mut d = MatExt::zeros(delta, n - k, s);
            for r in 0..delta {
                for c in 0..n - k {
                    d.set(r, c, basis.sample_elem(Subspace::W, rng).coeffs());
                }
            }
            (rank_base_of_ext(&base, &d) == delta).then_some(d)
        })
        .ok_or(Error::RetryLimitExceeded("sampling a full-rank Δ̂"))?;
    let delta_full = phi_map(&delta_hat, iset.erasures(), n)?;
    for (t, r) in params.file_cols(index).enumerate() {
        let src = delta_full.row(t).to_vec();
        for (d, b) in q.row_mut(r).iter_mut().zip(src) {
            *d ^= b;
        }
    }

    let query = Query::new(*params, field, q)?;
    let digest = query.digest();
    let secret = QuerySecret::from_parts(*params, code, iset, basis, index, delta_hat, None, digest)?;
    Ok((query, secret))
}

/// [`build_query`] driven by a ChaCha generator seeded with `seed`; the seed
/// is recorded in the secret.
pub fn build_query_seeded(params: &SchemeParams, index: usize, seed: u64) -> Result<(Query, QuerySecret)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (q, mut sec) = build_query(params, index, &mut rng)?;
    sec.seed = Some(seed);
    Ok((q, sec))
}

/// `A = X · Q`: each answer row is the `F_q`-combination of query rows given
/// by the matching database row.
pub fn respond(db: &Database, query: &Query) -> Result<Response> {
    let dp = db.params();
    let qp = query.params();
    if dp.q != qp.q {
        return Err(Error::ParamMismatch(format!("database has q={}, query has q={}", dp.q, qp.q)));
    }
    if db.matrix().cols() != query.matrix().rows() {
        return Err(Error::dims(format!(
            "database has m·δ = {}, query has {} rows",
            db.matrix().cols(),
            query.matrix().rows()
        )));
    }
    let a = mat_mul_mixed(query.field().base(), db.matrix(), query.matrix())?;
    let params = SchemeParams { l: dp.l, ..*qp };
    Response::new(params, query.digest(), a)
}

/// Recovers file `X^i` (`L × δ`) from a response to the query built with
/// `secret`.
pub fn decode(resp: &Response, secret: &QuerySecret) -> Result<MatBase> {
    if resp.query_digest() != secret.query_digest() {
        return Err(Error::InconsistentResponse("response answers a different query".into()));
    }
    let a = resp.matrix();
    let p = secret.params();
    if a.cols() != p.n || a.width() != p.s {
        return Err(Error::InconsistentResponse(format!(
            "response is {}x{} over s = {}, expected n = {}, s = {}",
            a.rows(),
            a.cols(),
            a.width(),
            p.n,
            p.s
        )));
    }
    let iset = secret.info_set();
    let on_info = a.select_cols(iset.info());
    let codewords = erasure_decode_rows(secret.code(), iset, &on_info)?;
    let residual = a.add(&codewords)?;
    let base = secret.field().base();
    let delta = p.delta();
    let rows: Vec<Result<Vec<u8>>> = (0..a.rows())
        .into_par_iter()
        .map(|z| {
            if iset.info().iter().any(|&c| residual.get(z, c).iter().any(|&b| b != 0)) {
                return Err(Error::InconsistentResponse(format!("row {z}: residual nonzero outside ℰ")));
            }
            let mut y = Vec::with_capacity(delta);
            for &e in iset.erasures() {
                let cut = secret.basis().psi_cut(residual.get(z, e));
                y.extend(secret.basis().w_coords(cut.coeffs()));
            }
            secret.delta_solver().vec_mul(base, &y)
        })
        .collect();
    let mut data = Vec::with_capacity(a.rows() * delta);
    for r in rows {
        data.extend(r?);
    }
    MatBase::new(a.rows(), delta, data)
}
