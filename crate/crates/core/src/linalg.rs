//! Dense matrices over `F_q` ([`MatBase`]) and `F_{q^s}` ([`MatExt`]).
//!
//! Both store row-major byte buffers; an extension entry occupies `s`
//! consecutive bytes (polynomial-basis coefficients, lowest first). One
//! elimination routine, generic over [`FieldOps`], serves both fields.
//! Pivoting takes the first nonzero entry scanning columns left to right and
//! rows top to bottom, so results are deterministic.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gf::{BaseField, ExtElem, ExtField};

/// Minimal field interface for elimination over byte-encoded elements.
/// Addition is XOR in characteristic 2 and is not part of the trait.
pub trait FieldOps {
    /// Bytes per element.
    fn width(&self) -> usize;
    fn mul_into(&self, a: &[u8], b: &[u8], out: &mut [u8]);
    fn inv_into(&self, a: &[u8], out: &mut [u8]) -> Result<()>;
}

impl FieldOps for BaseField {
    fn width(&self) -> usize {
        1
    }

    fn mul_into(&self, a: &[u8], b: &[u8], out: &mut [u8]) {
        out[0] = self.mul(a[0], b[0]);
    }

    fn inv_into(&self, a: &[u8], out: &mut [u8]) -> Result<()> {
        out[0] = self.inv(a[0])?;
        Ok(())
    }
}

impl FieldOps for ExtField {
    fn width(&self) -> usize {
        self.degree()
    }

    fn mul_into(&self, a: &[u8], b: &[u8], out: &mut [u8]) {
        ExtField::mul_into(self, a, b, out)
    }

    fn inv_into(&self, a: &[u8], out: &mut [u8]) -> Result<()> {
        ExtField::inv_into(self, a, out)
    }
}

#[inline]
fn is_zero(e: &[u8]) -> bool {
    e.iter().all(|&b| b == 0)
}

#[inline]
fn xor_into(dst: &mut [u8], src: &[u8]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= s;
    }
}

/// In-place reduced row echelon form. Returns the pivot column of each
/// nonzero row, in order.
fn rref<F: FieldOps + ?Sized>(f: &F, data: &mut [u8], rows: usize, cols: usize) -> Vec<usize> {
    let w = f.width();
    let stride = cols * w;
    let mut pivots = Vec::new();
    let mut inv = vec![0u8; w];
    let mut tmp = vec![0u8; w];
    let mut pivot_row = vec![0u8; stride];
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !is_zero(&data[i * stride + c * w..i * stride + (c + 1) * w]))
        else {
            continue;
        };
        if p != r {
            let (lo, hi) = data.split_at_mut(p * stride);
            lo[r * stride..(r + 1) * stride].swap_with_slice(&mut hi[..stride]);
        }
        f.inv_into(&data[r * stride + c * w..r * stride + (c + 1) * w], &mut inv)
            .expect("pivot is nonzero");
        for cc in c..cols {
            let e = &mut data[r * stride + cc * w..r * stride + (cc + 1) * w];
            f.mul_into(e, &inv, &mut tmp);
            e.copy_from_slice(&tmp);
        }
        pivot_row.copy_from_slice(&data[r * stride..(r + 1) * stride]);
        let mut factor = vec![0u8; w];
        for i in 0..rows {
            if i == r {
                continue;
            }
            let row = &mut data[i * stride..(i + 1) * stride];
            factor.copy_from_slice(&row[c * w..(c + 1) * w]);
            if is_zero(&factor) {
                continue;
            }
            for cc in c..cols {
                let src = &pivot_row[cc * w..(cc + 1) * w];
                if is_zero(src) {
                    continue;
                }
                f.mul_into(&factor, src, &mut tmp);
                xor_into(&mut row[cc * w..(cc + 1) * w], &tmp);
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

fn rank_generic<F: FieldOps + ?Sized>(f: &F, data: &[u8], rows: usize, cols: usize) -> usize {
    let mut d = data.to_vec();
    rref(f, &mut d, rows, cols).len()
}

/// Basis of `{x : M x = 0}`, one vector per output row.
fn kernel_generic<F: FieldOps + ?Sized>(
    f: &F,
    data: &[u8],
    rows: usize,
    cols: usize,
) -> (usize, Vec<u8>) {
    let w = f.width();
    let stride = cols * w;
    let mut d = data.to_vec();
    let pivots = rref(f, &mut d, rows, cols);
    let mut is_pivot = vec![false; cols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let free: Vec<usize> = (0..cols).filter(|&c| !is_pivot[c]).collect();
    let mut out = vec![0u8; free.len() * stride];
    for (k, &fc) in free.iter().enumerate() {
        let v = &mut out[k * stride..(k + 1) * stride];
        // x_free = 1
        v[fc * w] = 1;
        for (r, &pc) in pivots.iter().enumerate() {
            // x_pivot = -R[r][free] = R[r][free] in characteristic 2
            v[pc * w..(pc + 1) * w].copy_from_slice(&d[r * stride + fc * w..r * stride + (fc + 1) * w]);
        }
    }
    (free.len(), out)
}

fn inverse_generic<F: FieldOps + ?Sized>(f: &F, data: &[u8], n: usize) -> Result<Vec<u8>> {
    let w = f.width();
    let aug_cols = 2 * n;
    let mut aug = vec![0u8; n * aug_cols * w];
    for i in 0..n {
        aug[i * aug_cols * w..i * aug_cols * w + n * w].copy_from_slice(&data[i * n * w..(i + 1) * n * w]);
        aug[i * aug_cols * w + (n + i) * w] = 1;
    }
    let pivots = rref(f, &mut aug, n, aug_cols);
    if pivots.len() < n || pivots[n - 1] >= n {
        return Err(Error::Singular);
    }
    let mut out = vec![0u8; n * n * w];
    for i in 0..n {
        out[i * n * w..(i + 1) * n * w]
            .copy_from_slice(&aug[i * aug_cols * w + n * w..(i + 1) * aug_cols * w]);
    }
    Ok(out)
}

/// Matrix over `F_q`, one byte per entry.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MatBase {
    rows: usize,
    cols: usize,
    data: Vec<u8>,
}

impl MatBase {
    pub fn new(rows: usize, cols: usize, data: Vec<u8>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::dims(format!(
                "{rows}x{cols} base matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(MatBase { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        MatBase { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn random<R: rand::Rng + ?Sized>(f: &BaseField, rows: usize, cols: usize, rng: &mut R) -> Self {
        MatBase { rows, cols, data: (0..rows * cols).map(|_| f.random(rng)).collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn get(&self, r: usize, c: usize) -> u8 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: u8) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[u8] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        is_zero(&self.data)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.get(r, c);
            }
        }
        t
    }

    pub fn select_cols(&self, cols: &[usize]) -> Self {
        let mut out = Self::zeros(self.rows, cols.len());
        for r in 0..self.rows {
            for (j, &c) in cols.iter().enumerate() {
                out.data[r * cols.len() + j] = self.get(r, c);
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::dims("matrix sum of different shapes"));
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a ^ b).collect();
        Ok(MatBase { rows: self.rows, cols: self.cols, data })
    }

    pub fn mul(&self, f: &BaseField, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::dims(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(r, l);
                if a == 0 {
                    continue;
                }
                let tab = f.mul_row(a);
                let dst = &mut out.data[r * other.cols..(r + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(other.row(l)) {
                    *d ^= tab[b as usize];
                }
            }
        }
        Ok(out)
    }

    /// Row vector times matrix.
    pub fn vec_mul(&self, f: &BaseField, x: &[u8]) -> Result<Vec<u8>> {
        if x.len() != self.rows {
            return Err(Error::dims("vector length does not match matrix rows"));
        }
        let mut out = vec![0u8; self.cols];
        for (l, &a) in x.iter().enumerate() {
            if a == 0 {
                continue;
            }
            let tab = f.mul_row(a);
            for (d, &b) in out.iter_mut().zip(self.row(l)) {
                *d ^= tab[b as usize];
            }
        }
        Ok(out)
    }
}

pub fn rank_base(f: &BaseField, m: &MatBase) -> usize {
    rank_generic(f, &m.data, m.rows, m.cols)
}

pub fn inverse_base(f: &BaseField, m: &MatBase) -> Result<MatBase> {
    if m.rows != m.cols {
        return Err(Error::dims("inverse of a non-square matrix"));
    }
    Ok(MatBase { rows: m.rows, cols: m.cols, data: inverse_generic(f, &m.data, m.rows)? })
}

/// Rows of the result form a basis of the right kernel `{x : M x = 0}`.
pub fn right_kernel_base(f: &BaseField, m: &MatBase) -> MatBase {
    let (k, data) = kernel_generic(f, &m.data, m.rows, m.cols);
    MatBase { rows: k, cols: m.cols, data }
}

/// Solves `x · M = y` for square invertible `M`.
pub fn solve_base(f: &BaseField, m: &MatBase, y: &[u8]) -> Result<Vec<u8>> {
    if m.rows != m.cols || y.len() != m.cols {
        return Err(Error::dims("solve_base expects a square system"));
    }
    let n = m.rows;
    // Mᵀ xᵀ = yᵀ, augmented with y as the last column.
    let mut aug = vec![0u8; n * (n + 1)];
    for i in 0..n {
        for j in 0..n {
            aug[i * (n + 1) + j] = m.get(j, i);
        }
        aug[i * (n + 1) + n] = y[i];
    }
    let pivots = rref(f, &mut aug, n, n + 1);
    if pivots.len() < n || pivots[n - 1] >= n {
        return Err(Error::Singular);
    }
    Ok((0..n).map(|i| aug[i * (n + 1) + n]).collect())
}

/// Matrix over `F_{q^s}`; each entry occupies `s` bytes.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MatExt {
    rows: usize,
    cols: usize,
    s: usize,
    data: Vec<u8>,
}

impl MatExt {
    pub fn new(rows: usize, cols: usize, s: usize, data: Vec<u8>) -> Result<Self> {
        if data.len() != rows * cols * s {
            return Err(Error::dims(format!(
                "{rows}x{cols} extension matrix (s = {s}) needs {} bytes, got {}",
                rows * cols * s,
                data.len()
            )));
        }
        Ok(MatExt { rows, cols, s, data })
    }

    pub fn zeros(rows: usize, cols: usize, s: usize) -> Self {
        MatExt { rows, cols, s, data: vec![0; rows * cols * s] }
    }

    pub fn identity(n: usize, s: usize) -> Self {
        let mut m = Self::zeros(n, n, s);
        for i in 0..n {
            m.data[(i * n + i) * s] = 1;
        }
        m
    }

    pub fn random<R: rand::Rng + ?Sized>(f: &ExtField, rows: usize, cols: usize, rng: &mut R) -> Self {
        let s = f.degree();
        let base = f.base();
        MatExt { rows, cols, s, data: (0..rows * cols * s).map(|_| base.random(rng)).collect() }
    }

    /// Embeds an `F_q` matrix entry-wise.
    pub fn from_base(m: &MatBase, s: usize) -> Self {
        let mut out = Self::zeros(m.rows, m.cols, s);
        for (i, &v) in m.data.iter().enumerate() {
            out.data[i * s] = v;
        }
        out
    }

    pub fn from_rows(rows: &[Vec<ExtElem>], s: usize) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(rows.len() * cols * s);
        for r in rows {
            if r.len() != cols {
                return Err(Error::dims("ragged rows"));
            }
            for e in r {
                if e.coeffs().len() != s {
                    return Err(Error::dims("element width does not match s"));
                }
                data.extend_from_slice(e.coeffs());
            }
        }
        Ok(MatExt { rows: rows.len(), cols, s, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Extension degree, i.e. bytes per entry.
    pub fn width(&self) -> usize {
        self.s
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn get(&self, r: usize, c: usize) -> &[u8] {
        let o = (r * self.cols + c) * self.s;
        &self.data[o..o + self.s]
    }

    pub fn elem(&self, r: usize, c: usize) -> ExtElem {
        ExtElem::from_vec_unchecked(self.get(r, c).to_vec())
    }

    pub fn set(&mut self, r: usize, c: usize, v: &[u8]) {
        let o = (r * self.cols + c) * self.s;
        self.data[o..o + self.s].copy_from_slice(v);
    }

    pub fn row(&self, r: usize) -> &[u8] {
        let stride = self.cols * self.s;
        &self.data[r * stride..(r + 1) * stride]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [u8] {
        let stride = self.cols * self.s;
        &mut self.data[r * stride..(r + 1) * stride]
    }

    pub fn is_zero(&self) -> bool {
        is_zero(&self.data)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows, self.s);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    pub fn select_cols(&self, cols: &[usize]) -> Self {
        let mut out = Self::zeros(self.rows, cols.len(), self.s);
        for r in 0..self.rows {
            for (j, &c) in cols.iter().enumerate() {
                out.set(r, j, self.get(r, c));
            }
        }
        out
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        let mut out = Self::zeros(rows.len(), self.cols, self.s);
        for (i, &r) in rows.iter().enumerate() {
            out.row_mut(i).copy_from_slice(self.row(r));
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if (self.rows, self.cols, self.s) != (other.rows, other.cols, other.s) {
            return Err(Error::dims("matrix sum of different shapes"));
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a ^ b).collect();
        Ok(MatExt { rows: self.rows, cols: self.cols, s: self.s, data })
    }

    pub fn add_assign(&mut self, other: &Self) -> Result<()> {
        if (self.rows, self.cols, self.s) != (other.rows, other.cols, other.s) {
            return Err(Error::dims("matrix sum of different shapes"));
        }
        xor_into(&mut self.data, &other.data);
        Ok(())
    }
}

/// Full extension-field product `A · B`.
pub fn mul_ext(f: &ExtField, a: &MatExt, b: &MatExt) -> Result<MatExt> {
    if a.cols != b.rows {
        return Err(Error::dims(format!(
            "cannot multiply {}x{} by {}x{}",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    let s = f.degree();
    let mut out = MatExt::zeros(a.rows, b.cols, s);
    let mut tmp = vec![0u8; s];
    for r in 0..a.rows {
        for l in 0..a.cols {
            let x = a.get(r, l);
            if is_zero(x) {
                continue;
            }
            for c in 0..b.cols {
                f.mul_into(x, b.get(l, c), &mut tmp);
                let o = (r * b.cols + c) * s;
                xor_into(&mut out.data[o..o + s], &tmp);
            }
        }
    }
    Ok(out)
}

/// Row vector over `F_{q^s}` times matrix.
pub fn vec_mul_ext(f: &ExtField, x: &[u8], m: &MatExt) -> Result<Vec<u8>> {
    let s = f.degree();
    if x.len() != m.rows * s {
        return Err(Error::dims("vector length does not match matrix rows"));
    }
    let mut out = vec![0u8; m.cols * s];
    let mut tmp = vec![0u8; s];
    for l in 0..m.rows {
        let a = &x[l * s..(l + 1) * s];
        if is_zero(a) {
            continue;
        }
        for c in 0..m.cols {
            f.mul_into(a, m.get(l, c), &mut tmp);
            xor_into(&mut out[c * s..(c + 1) * s], &tmp);
        }
    }
    Ok(out)
}

fn mixed_row(base: &BaseField, x_row: &[u8], q: &MatExt, out: &mut [u8]) {
    for (l, &a) in x_row.iter().enumerate() {
        if a == 0 {
            continue;
        }
        let tab = base.mul_row(a);
        for (d, &b) in out.iter_mut().zip(q.row(l)) {
            *d ^= tab[b as usize];
        }
    }
}

/// `X · Q` for `X` over `F_q` and `Q` over `F_{q^s}`. Every product is a
/// subfield scalar times an extension element, so only the base-field table
/// is needed. Output rows are computed in parallel.
pub fn mat_mul_mixed(base: &BaseField, x: &MatBase, q: &MatExt) -> Result<MatExt> {
    if x.cols != q.rows {
        return Err(Error::dims(format!(
            "cannot multiply {}x{} by {}x{}",
            x.rows, x.cols, q.rows, q.cols
        )));
    }
    let stride = q.cols * q.s;
    let mut out = MatExt::zeros(x.rows, q.cols, q.s);
    if stride > 0 {
        out.data
            .par_chunks_mut(stride)
            .enumerate()
            .for_each(|(z, dst)| mixed_row(base, x.row(z), q, dst));
    }
    Ok(out)
}

/// Single-threaded reference for [`mat_mul_mixed`].
pub fn mat_mul_mixed_seq(base: &BaseField, x: &MatBase, q: &MatExt) -> Result<MatExt> {
    if x.cols != q.rows {
        return Err(Error::dims("inner dimensions differ"));
    }
    let stride = q.cols * q.s;
    let mut out = MatExt::zeros(x.rows, q.cols, q.s);
    for z in 0..x.rows {
        mixed_row(base, x.row(z), q, &mut out.data[z * stride..(z + 1) * stride]);
    }
    Ok(out)
}

pub fn rank_ext(f: &ExtField, m: &MatExt) -> usize {
    rank_generic(f, &m.data, m.rows, m.cols)
}

pub fn inverse_ext(f: &ExtField, m: &MatExt) -> Result<MatExt> {
    if m.rows != m.cols {
        return Err(Error::dims("inverse of a non-square matrix"));
    }
    Ok(MatExt { rows: m.rows, cols: m.cols, s: m.s, data: inverse_generic(f, &m.data, m.rows)? })
}

/// Rows of the result form a basis of `{x : M x = 0}`; the row count is
/// `cols - rank(M)`.
pub fn right_kernel_ext(f: &ExtField, m: &MatExt) -> MatExt {
    let (k, data) = kernel_generic(f, &m.data, m.rows, m.cols);
    MatExt { rows: k, cols: m.cols, s: m.s, data }
}

/// `(a × b)` over `F_{q^s}` to `(s·a × b)` over `F_q`: entry `(i, j)` becomes
/// the column of its coordinates at rows `i·s .. i·s + s`.
pub fn expand_rows(m: &MatExt) -> MatBase {
    let s = m.s;
    let mut out = MatBase::zeros(m.rows * s, m.cols);
    for r in 0..m.rows {
        for c in 0..m.cols {
            for (t, &v) in m.get(r, c).iter().enumerate() {
                out.set(r * s + t, c, v);
            }
        }
    }
    out
}

/// `(a × b)` over `F_{q^s}` to `(a × s·b)` over `F_q`: entry `(i, j)` becomes
/// its coordinates at columns `j·s .. j·s + s`.
pub fn expand_cols(m: &MatExt) -> MatBase {
    MatBase { rows: m.rows, cols: m.cols * m.s, data: m.data.clone() }
}

/// `F_q`-rank of the rows of `M`, each row read as a vector in `F_q^{s·cols}`.
pub fn rank_base_of_ext(base: &BaseField, m: &MatExt) -> usize {
    rank_base(base, &expand_cols(m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn f16() -> ExtField {
        // F_4 over F_2 is too small for interesting ranks; use F_16 = F_4[x]/(x^2+x+2)
        let base = BaseField::new(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        ExtField::random(base, 2, &mut rng).unwrap()
    }

    #[test]
    fn rank_of_identity_and_zero() {
        let f = f16();
        assert_eq!(rank_ext(&f, &MatExt::identity(5, 2)), 5);
        assert_eq!(rank_ext(&f, &MatExt::zeros(3, 4, 2)), 0);
        let b = BaseField::new(3).unwrap();
        assert_eq!(rank_base(&b, &MatBase::identity(4)), 4);
        assert_eq!(rank_base(&b, &MatBase::zeros(4, 2)), 0);
    }

    #[test]
    fn inverse_round_trip_and_singular() {
        let f = f16();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut tried = 0;
        while tried < 20 {
            let m = MatExt::random(&f, 4, 4, &mut rng);
            if let Ok(inv) = inverse_ext(&f, &m) {
                assert_eq!(mul_ext(&f, &m, &inv).unwrap(), MatExt::identity(4, 2));
                tried += 1;
            }
        }
        let mut sing = MatExt::identity(3, 2);
        sing.set(2, 2, &[0, 0]);
        assert!(matches!(inverse_ext(&f, &sing), Err(Error::Singular)));
        assert!(matches!(inverse_ext(&f, &MatExt::zeros(2, 3, 2)), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn kernel_annihilates() {
        let f = f16();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let m = MatExt::random(&f, 4, 6, &mut rng);
        let k = right_kernel_ext(&f, &m);
        assert_eq!(rank_ext(&f, &m) + k.rows(), 6);
        let prod = mul_ext(&f, &m, &k.transpose()).unwrap();
        assert!(prod.is_zero());
    }

    #[test]
    fn mixed_product_identity_and_zero() {
        let f = f16();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let q = MatExt::random(&f, 3, 2, &mut rng);
        let zero = mat_mul_mixed(f.base(), &MatBase::zeros(2, 3), &q).unwrap();
        assert!(zero.is_zero());
        assert_eq!(mat_mul_mixed(f.base(), &MatBase::identity(3), &q).unwrap(), q);
        assert!(mat_mul_mixed(f.base(), &MatBase::zeros(2, 4), &q).is_err());
    }

    #[test]
    fn mixed_product_matches_full_field_oracle() {
        let f = f16();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x = MatBase::random(f.base(), 2, 3, &mut rng);
        let q = MatExt::random(&f, 3, 2, &mut rng);
        let fast = mat_mul_mixed(f.base(), &x, &q).unwrap();
        let oracle = mul_ext(&f, &MatExt::from_base(&x, 2), &q).unwrap();
        assert_eq!(fast, oracle);
    }

    #[test]
    fn solve_base_examples() {
        let b = BaseField::new(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let id = MatBase::identity(3);
        assert_eq!(solve_base(&b, &id, &[1, 2, 3]).unwrap(), vec![1, 2, 3]);
        let mut done = 0;
        while done < 10 {
            let m = MatBase::random(&b, 4, 4, &mut rng);
            if rank_base(&b, &m) < 4 {
                assert!(matches!(solve_base(&b, &m, &[0; 4]), Err(Error::Singular)));
                continue;
            }
            assert_eq!(solve_base(&b, &m, &[0; 4]).unwrap(), vec![0; 4]);
            let x: Vec<u8> = (0..4).map(|_| b.random(&mut rng)).collect();
            let y = m.vec_mul(&b, &x).unwrap();
            assert_eq!(solve_base(&b, &m, &y).unwrap(), x);
            done += 1;
        }
    }

    #[test]
    fn expansion_shapes() {
        let f = f16();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let m = MatExt::random(&f, 2, 3, &mut rng);
        let r = expand_rows(&m);
        let c = expand_cols(&m);
        assert_eq!((r.rows(), r.cols()), (4, 3));
        assert_eq!((c.rows(), c.cols()), (2, 6));
        assert!(expand_cols(&MatExt::zeros(2, 2, 2)).is_zero());
        // single nonzero scalar: F_q-rank 1 as a 1x2 row
        let single = MatExt::new(1, 1, 2, vec![3, 1]).unwrap();
        assert_eq!(rank_base_of_ext(f.base(), &single), 1);
    }
}
