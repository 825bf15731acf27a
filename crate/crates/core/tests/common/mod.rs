//! Checks shared by the property suites and the acceptance run. Each returns
//! `Err(description)` on the first violation.

#![allow(dead_code)]

use cpir_core::gf::{BaseField, BasisGamma, ExtField, Subspace};
use cpir_core::linalg::{
    rank_base, rank_ext, right_kernel_base, right_kernel_ext, vec_mul_ext, MatBase, MatExt,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Check = Result<(), String>;

/// Every `(w, s)` with `2^{ws} <= 256`.
pub fn small_fields() -> Vec<(u8, usize)> {
    (1u8..=8).flat_map(|w| (1..=8 / w as usize).map(move |s| (w, s))).collect()
}

fn index_of(q: usize, coeffs: &[u8]) -> usize {
    coeffs.iter().rev().fold(0, |acc, &c| acc * q + c as usize)
}

/// Field axioms over every pair and triple, through a full product table.
/// Elements are indexed by their packed coefficients, so addition is XOR of
/// indices.
pub fn field_axioms_exhaustive(f: &ExtField) -> Check {
    let q = f.base().order();
    let n = f.order().unwrap() as usize;
    let elems: Vec<_> = (0..n as u64).map(|i| f.elem_from_index(i)).collect();
    for (i, e) in elems.iter().enumerate() {
        if index_of(q, e.coeffs()) != i {
            return Err(format!("index packing broken at {i}"));
        }
    }
    let mut t = vec![0usize; n * n];
    for a in 0..n {
        for b in 0..n {
            t[a * n + b] = index_of(q, f.mul(&elems[a], &elems[b]).coeffs());
        }
    }
    for a in 0..n {
        if t[a * n + 1] != a || t[a * n] != 0 {
            return Err(format!("identity/zero fails for element {a}"));
        }
        if index_of(q, f.add(&elems[a], &elems[a]).coeffs()) != 0 {
            return Err(format!("characteristic 2 fails for {a}"));
        }
        if a != 0 {
            let inv = f.inv(&elems[a]).map_err(|e| format!("inverse of {a}: {e}"))?;
            if t[a * n + index_of(q, inv.coeffs())] != 1 {
                return Err(format!("inverse of {a} is wrong"));
            }
        }
        for b in 0..n {
            if t[a * n + b] != t[b * n + a] {
                return Err(format!("commutativity fails at ({a}, {b})"));
            }
            if index_of(q, f.add(&elems[a], &elems[b]).coeffs()) != a ^ b {
                return Err(format!("addition fails at ({a}, {b})"));
            }
            let ab = t[a * n + b];
            for c in 0..n {
                if t[ab * n + c] != t[a * n + t[b * n + c]] {
                    return Err(format!("associativity fails at ({a}, {b}, {c})"));
                }
                if t[a * n + (b ^ c)] != ab ^ t[a * n + c] {
                    return Err(format!("distributivity fails at ({a}, {b}, {c})"));
                }
            }
        }
    }
    if f.inv(&elems[0]).is_ok() {
        return Err("zero has an inverse".into());
    }
    Ok(())
}

pub fn all_small_fields_exhaustive(seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for (w, s) in small_fields() {
        let f = ExtField::random(BaseField::new(w).unwrap(), s, &mut rng).unwrap();
        field_axioms_exhaustive(&f).map_err(|e| format!("GF(2^{w})^{s}: {e}"))?;
    }
    Ok(())
}

/// `scalar_mul(a, b) = a · embed(b)` on random pairs over random fields.
pub fn scalar_mul_matches_embed(pairs: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..pairs {
        let w = rng.gen_range(1..=8);
        let s = rng.gen_range(1..=12);
        let f = ExtField::random(BaseField::new(w).unwrap(), s, &mut rng).unwrap();
        let a = f.random_elem(&mut rng);
        let b = f.base().random(&mut rng);
        if f.scalar_mul(&a, b) != f.mul(&a, &f.embed(b)) {
            return Err(format!("pair {i}: w={w}, s={s}"));
        }
    }
    Ok(())
}

fn random_low_rank_base<R: Rng>(f: &BaseField, rows: usize, cols: usize, rng: &mut R) -> MatBase {
    let r = rng.gen_range(0..=rows.min(cols));
    let a = MatBase::random(f, rows, r, rng);
    let b = MatBase::random(f, r, cols, rng);
    if r == 0 {
        MatBase::zeros(rows, cols)
    } else {
        a.mul(f, &b).unwrap()
    }
}

/// Rank-nullity and `M · k = 0` for every kernel vector, over `F_q` and over
/// extensions, on `count` matrices of each kind.
pub fn rank_nullity_and_kernels(count: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..count {
        let f = BaseField::new(rng.gen_range(1..=8)).unwrap();
        let (rows, cols) = (rng.gen_range(1..=9), rng.gen_range(1..=9));
        let m = random_low_rank_base(&f, rows, cols, &mut rng);
        let k = right_kernel_base(&f, &m);
        let r = rank_base(&f, &m);
        if r + k.rows() != cols || rank_base(&f, &k) != k.rows() {
            return Err(format!("base matrix {i}: rank {r}, kernel {} of {cols}", k.rows()));
        }
        if !m.mul(&f, &k.transpose()).unwrap().is_zero() {
            return Err(format!("base matrix {i}: kernel vector not annihilated"));
        }

        let ext = ExtField::random(f.clone(), rng.gen_range(1..=4), &mut rng).unwrap();
        let (rows, cols) = (rng.gen_range(1..=6), rng.gen_range(1..=6));
        let mut m = MatExt::random(&ext, rows, cols, &mut rng);
        if rows > 1 && rng.gen_bool(0.5) {
            // duplicate a row to force a dependency
            let first = m.row(0).to_vec();
            m.row_mut(rows - 1).copy_from_slice(&first);
        }
        let k = right_kernel_ext(&ext, &m);
        let r = rank_ext(&ext, &m);
        if r + k.rows() != cols {
            return Err(format!("ext matrix {i}: rank {r}, kernel {} of {cols}", k.rows()));
        }
        let mt = m.transpose();
        for j in 0..k.rows() {
            let prod = vec_mul_ext(&ext, k.row(j), &mt).unwrap();
            if prod.iter().any(|&b| b != 0) {
                return Err(format!("ext matrix {i}: kernel vector {j} not annihilated"));
            }
        }
    }
    Ok(())
}

/// Every invertible `3 × 3` matrix over `F_2`.
pub fn all_bases_f2_3() -> Vec<MatBase> {
    let f = BaseField::new(1).unwrap();
    (0u32..512)
        .map(|bits| MatBase::new(3, 3, (0..9).map(|i| ((bits >> i) & 1) as u8).collect()).unwrap())
        .filter(|m| rank_base(&f, m) == 3)
        .collect()
}

/// At `q = 2, s = 3, v = 1`, over every basis and every element: the cut is
/// additive (hence `F_2`-linear), idempotent, kills `V`, fixes `W`, and
/// `ψ(Σ α_j γ_{W,j} + α' γ_V) = Σ α_j γ_{W,j}`.
pub fn psi_exhaustive() -> Check {
    let base = BaseField::new(1).unwrap();
    let field = ExtField::new(base.clone(), vec![1, 1, 0, 1]).unwrap();
    let elems: Vec<Vec<u8>> = (0..8).map(|i| field.elem_from_index(i).into_coeffs()).collect();
    let xor = |a: &[u8], b: &[u8]| -> Vec<u8> { a.iter().zip(b).map(|(x, y)| x ^ y).collect() };
    let bases = all_bases_f2_3();
    if bases.len() != 168 {
        return Err(format!("expected |GL(3,2)| = 168 bases, found {}", bases.len()));
    }
    for b in bases {
        let g = BasisGamma::from_matrix(base.clone(), b, 1).unwrap();
        for a in &elems {
            let pa = g.psi_cut(a).into_coeffs();
            if g.psi_cut(&pa).into_coeffs() != pa {
                return Err("ψ is not idempotent".into());
            }
            if !g.contains(Subspace::W, &pa) {
                return Err("ψ leaves W".into());
            }
            if g.contains(Subspace::V, a) && pa.iter().any(|&x| x != 0) {
                return Err("ψ does not kill V".into());
            }
            if g.contains(Subspace::W, a) && &pa != a {
                return Err("ψ moves an element of W".into());
            }
            for c in &elems {
                let lhs = g.psi_cut(&xor(a, c)).into_coeffs();
                if lhs != xor(&pa, g.psi_cut(c).coeffs()) {
                    return Err("ψ is not additive".into());
                }
            }
        }
        for w_part in 0u8..4 {
            for v_part in 0u8..2 {
                let coords = [v_part, w_part & 1, w_part >> 1];
                let w_only = [0, w_part & 1, w_part >> 1];
                let mixed = g.from_coords(&coords).into_coeffs();
                if g.psi_cut(&mixed) != g.from_coords(&w_only) {
                    return Err(format!("cut identity fails for coords {coords:?}"));
                }
            }
        }
    }
    Ok(())
}

/// All subspaces of `F_2^s` of dimension `v`, as sorted element bitmasks.
pub fn enumerate_subspaces_f2(s: usize, v: usize) -> std::collections::BTreeSet<u32> {
    let n = 1usize << s;
    let mut out = std::collections::BTreeSet::new();
    // a subspace is the span of any v independent vectors; grow spans
    fn grow(span: u32, dim: usize, target: usize, n: usize, out: &mut std::collections::BTreeSet<u32>) {
        if dim == target {
            out.insert(span);
            return;
        }
        for x in 1..n {
            if span & (1 << x) == 0 {
                let mut next = span;
                for y in 0..n {
                    if span & (1 << y) != 0 {
                        next |= 1 << (x ^ y);
                    }
                }
                if !out.contains(&next) || dim + 1 < target {
                    grow(next, dim + 1, target, n, out);
                }
            }
        }
    }
    grow(1, 0, v, n, &mut out);
    out
}
