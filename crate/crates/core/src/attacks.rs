//! The adversary's side: the subspace-subcode distinguisher run against a
//! query for a guessed noise space, the superspace-guessing experiment that
//! prices it, and the rank experiment behind the linear-dependency attack.
//!
//! All experiments derive one generator per trial from `(seed, trial)` and
//! run trials in parallel, so results do not depend on scheduling.

use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;

use crate::analysis::{ld_rank_bound_f64, superspace_hit_prob, rational_to_f64};
use crate::error::{Error, Result};
use crate::gf::{BaseField, BasisGamma, ExtField};
use crate::linalg::{rank_base, rank_ext, right_kernel_base, right_kernel_ext, MatBase, MatExt};
use crate::pir::{build_query, ExposeSecret, Query, SchemeParams};
use crate::trial_rng;

/// An `F_q`-subspace `Z ⊆ F_{q^s}` guessed by the attacker.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubspaceGuess {
    /// `z × s`, polynomial-basis coordinates, linearly independent rows.
    basis_rows: MatBase,
}

impl SubspaceGuess {
    pub fn new(base: &BaseField, basis_rows: MatBase) -> Result<Self> {
        if rank_base(base, &basis_rows) != basis_rows.rows() {
            return Err(Error::InvalidParams("guess basis rows are linearly dependent".into()));
        }
        Ok(SubspaceGuess { basis_rows })
    }

    /// Uniform `z`-dimensional subspace of `F_q^s`.
    pub fn random<R: Rng + ?Sized>(base: &BaseField, s: usize, z: usize, rng: &mut R) -> Result<Self> {
        if z > s {
            return Err(Error::InvalidParams(format!("guess dimension {z} exceeds s = {s}")));
        }
        loop {
            let m = MatBase::random(base, z, s, rng);
            if rank_base(base, &m) == z {
                return Ok(SubspaceGuess { basis_rows: m });
            }
        }
    }

    /// Uniform `z`-dimensional subspace that does not contain `avoid`.
    pub fn random_avoiding<R: Rng + ?Sized>(
        base: &BaseField,
        s: usize,
        z: usize,
        avoid: &MatBase,
        rng: &mut R,
    ) -> Result<Self> {
        if avoid.rows() > 0 && z >= s {
            return Err(Error::InvalidParams("the full space contains every subspace".into()));
        }
        loop {
            let g = Self::random(base, s, z, rng)?;
            if !g.contains_space(base, avoid) {
                return Ok(g);
            }
        }
    }

    pub fn basis(&self) -> &MatBase {
        &self.basis_rows
    }

    pub fn dim(&self) -> usize {
        self.basis_rows.rows()
    }

    pub fn degree(&self) -> usize {
        self.basis_rows.cols()
    }

    /// True iff the row space of `other` lies inside `Z`.
    pub fn contains_space(&self, base: &BaseField, other: &MatBase) -> bool {
        rank_base(base, &stack(&self.basis_rows, other)) == self.dim()
    }
}

fn stack(a: &MatBase, b: &MatBase) -> MatBase {
    let mut data = a.data().to_vec();
    data.extend_from_slice(b.data());
    MatBase::new(a.rows() + b.rows(), a.cols(), data).expect("equal widths")
}

/// Outcome of running the distinguisher on every file block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AttackVerdict {
    /// `F_q`-dimension of the subspace subcode after puncturing block `l`.
    pub subcode_dims: Vec<usize>,
    /// The unique block with nonzero dimension, if there is exactly one.
    pub recovered_index: Option<usize>,
}

/// Generator (`n × (m-1)δ`) of the code spanned by `Qᵀ` with the coordinates
/// of block `l` (0-based) removed.
pub fn puncture_file(q: &Query, l: usize) -> Result<MatExt> {
    let p = q.params();
    if l >= p.m {
        return Err(Error::IndexOutOfRange { index: l, bound: p.m });
    }
    if p.m == 1 {
        return Err(Error::InvalidParams("puncturing the only file leaves an empty code".into()));
    }
    let block = p.file_cols(l);
    let keep: Vec<usize> = (0..p.query_rows()).filter(|r| !block.contains(r)).collect();
    Ok(q.matrix().select_rows(&keep).transpose())
}

/// Basis of the dual of the code generated by `gp`, one vector per row.
pub fn dual_basis(field: &ExtField, gp: &MatExt) -> MatExt {
    right_kernel_ext(field, gp)
}

/// `F_q`-dimension of `{c ∈ rowspace(gp) : c_t ∈ Z for all t}`.
///
/// A codeword is `Σ_j u_j · gp[j]` with `u_j = Σ_b u_{j,b} x^b`, which is
/// `F_q`-linear in the `ns` unknowns `u_{j,b}`. Each coordinate must vanish
/// against the annihilator of `Z`; the solution space, modulo the kernel of
/// `u ↦ c`, is the subcode.
pub fn subspace_subcode_dim(field: &ExtField, gp: &MatExt, guess: &SubspaceGuess) -> usize {
    let base = field.base();
    let s = field.degree();
    assert_eq!(guess.degree(), s, "guess lives in a different extension");
    let (n, len) = (gp.rows(), gp.cols());
    let ann = right_kernel_base(base, guess.basis());
    let h = ann.rows();

    // Row (j, b) of the system holds, for every coordinate t and annihilator
    // vector a, the inner product <x^b · gp[j, t], a>.
    let mut sys = MatBase::zeros(n * s, len * h);
    let mut shifted = vec![0u8; s];
    for j in 0..n {
        for t in 0..len {
            shifted.copy_from_slice(gp.get(j, t));
            for b in 0..s {
                if b > 0 {
                    times_x(field, &mut shifted);
                }
                for a in 0..h {
                    let dot = shifted
                        .iter()
                        .zip(ann.row(a))
                        .fold(0u8, |acc, (&x, &y)| acc ^ base.mul(x, y));
                    sys.set(j * s + b, t * h + a, dot);
                }
            }
        }
    }
    let solutions = n * s - rank_base(base, &sys);
    solutions - s * (n - rank_ext(field, gp))
}

/// In-place multiplication by `x` modulo the field polynomial.
fn times_x(field: &ExtField, a: &mut [u8]) {
    let base = field.base();
    let s = a.len();
    let top = a[s - 1];
    a.copy_within(0..s - 1, 1);
    a[0] = 0;
    if top != 0 {
        let m = field.modulus();
        let lead_inv = base.inv(m[s]).expect("monic modulus");
        let c = base.mul(top, lead_inv);
        for (d, &mi) in a.iter_mut().zip(&m[..s]) {
            *d ^= base.mul(c, mi);
        }
    }
}

/// Punctures each block in turn and measures the subspace subcode.
pub fn subspace_attack(q: &Query, guess: &SubspaceGuess) -> Result<AttackVerdict> {
    let m = q.params().m;
    let subcode_dims = (0..m)
        .map(|l| puncture_file(q, l).map(|gp| subspace_subcode_dim(q.field(), &gp, guess)))
        .collect::<Result<Vec<_>>>()?;
    let mut nonzero = subcode_dims.iter().enumerate().filter(|(_, &d)| d > 0).map(|(l, _)| l);
    let recovered_index = match (nonzero.next(), nonzero.next()) {
        (Some(l), None) => Some(l),
        _ => None,
    };
    Ok(AttackVerdict { subcode_dims, recovered_index })
}

/// Which subspace the attacker feeds to the distinguisher.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GuessKind {
    /// The true noise space `V`, taken from the query secret.
    TrueNoise,
    /// A uniform `v`-dimensional subspace different from `V`.
    WrongSameDim,
    /// A uniform hyperplane not containing `V`.
    WrongHyperplane,
    /// A uniform `v`-dimensional subspace that is not `λ·V` for any nonzero
    /// `λ ∈ F_{q^s}`. The distinguisher cannot tell `V` from `λ·V`, so this
    /// is the only kind of wrong guess that is wrong for the attacker too.
    /// Does not exist for `v = 1`.
    WrongUpToScaling,
}

/// True iff the row space of `z` equals `λ · rowspace(v)` for some nonzero
/// `λ ∈ F_{q^s}`.
pub fn is_scaled_copy(field: &ExtField, z: &MatBase, v: &MatBase) -> bool {
    let base = field.base();
    if z.rows() != v.rows() {
        return false;
    }
    let order = field.order().expect("desk-scale field");
    let guess = SubspaceGuess { basis_rows: z.clone() };
    (1..order).any(|idx| {
        let lambda = field.elem_from_index(idx);
        let data: Vec<u8> = (0..v.rows())
            .flat_map(|r| {
                let e = field.elem(v.row(r).to_vec()).expect("row of width s");
                field.mul(&lambda, &e).into_coeffs()
            })
            .collect();
        let scaled = MatBase::new(v.rows(), v.cols(), data).expect("same shape");
        guess.contains_space(base, &scaled)
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AttackTrial {
    pub trial: u64,
    pub target: usize,
    pub verdict: AttackVerdict,
}

impl AttackTrial {
    pub fn success(&self) -> bool {
        self.verdict.recovered_index == Some(self.target)
    }
}

/// Builds `trials` fresh queries for uniform targets and runs the attack on
/// each with the chosen kind of guess.
pub fn subspace_attack_experiment(
    p: &SchemeParams,
    kind: GuessKind,
    trials: u64,
    seed: u64,
    _: ExposeSecret,
) -> Result<Vec<AttackTrial>> {
    p.validate()?;
    (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(seed, trial);
            let target = rng.gen_range(0..p.m);
            let (query, secret) = build_query(p, target, &mut rng)?;
            let base = query.field().base();
            let v_basis = secret.noise_subspace(ExposeSecret::acknowledge());
            let guess = match kind {
                GuessKind::TrueNoise => SubspaceGuess::new(base, v_basis)?,
                GuessKind::WrongSameDim => loop {
                    let g = SubspaceGuess::random(base, p.s, p.v, &mut rng)?;
                    if !g.contains_space(base, &v_basis) {
                        break g;
                    }
                },
                GuessKind::WrongHyperplane => SubspaceGuess::random_avoiding(base, p.s, p.s - 1, &v_basis, &mut rng)?,
                GuessKind::WrongUpToScaling => {
                    if p.v == 1 {
                        return Err(Error::InvalidParams(
                            "every 1-dimensional subspace is a scalar multiple of V".into(),
                        ));
                    }
                    loop {
                        let g = SubspaceGuess::random(base, p.s, p.v, &mut rng)?;
                        if !is_scaled_copy(query.field(), g.basis(), &v_basis) {
                            break g;
                        }
                    }
                }
            };
            let verdict = subspace_attack(&query, &guess)?;
            Ok(AttackTrial { trial, target, verdict })
        })
        .collect()
}

/// Result of drawing uniform hyperplanes against a fixed noise space.
#[derive(Clone, Debug, PartialEq)]
pub struct GuessingOutcome {
    pub trials: u64,
    pub hits: u64,
    /// The hyperplanes that contained `V`, in trial order.
    pub hit_guesses: Vec<SubspaceGuess>,
    /// `Pr{V ⊆ Z}` evaluated exactly.
    pub predicted: f64,
}

impl GuessingOutcome {
    pub fn rate(&self) -> f64 {
        self.hits as f64 / self.trials as f64
    }
}

/// Draws `trials` uniform `(s-1)`-dimensional subspaces and counts those
/// containing the row space of `v_basis`.
pub fn guess_superspaces(base: &BaseField, v_basis: &MatBase, trials: u64, seed: u64) -> Result<GuessingOutcome> {
    if trials == 0 {
        return Err(Error::InvalidParams("at least one trial required".into()));
    }
    let (v, s) = (v_basis.rows(), v_basis.cols());
    if v == 0 || v >= s {
        return Err(Error::InvalidParams(format!("noise space needs 0 < v < s, got v={v}, s={s}")));
    }
    let results: Vec<Option<SubspaceGuess>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(seed, trial);
            let g = SubspaceGuess::random(base, s, s - 1, &mut rng)?;
            Ok(g.contains_space(base, v_basis).then_some(g))
        })
        .collect::<Result<_>>()?;
    let hit_guesses: Vec<SubspaceGuess> = results.into_iter().flatten().collect();
    Ok(GuessingOutcome {
        trials,
        hits: hit_guesses.len() as u64,
        hit_guesses,
        predicted: rational_to_f64(&superspace_hit_prob(s, v, base.order() as u32)),
    })
}

/// [`guess_superspaces`] against the noise space of a freshly sampled basis.
pub fn simulate_superspace_guessing(p: &SchemeParams, trials: u64, seed: u64) -> Result<GuessingOutcome> {
    p.validate()?;
    let mut rng = trial_rng(seed, u64::MAX);
    let base = BaseField::from_order(p.q)?;
    let field = ExtField::random(base.clone(), p.s, &mut rng)?;
    let basis = BasisGamma::sample(&field, p.v, &mut rng)?;
    guess_superspaces(&base, &basis.v_basis(), trials, seed)
}

/// Full-rank counts of random `n × n` row selections of fresh queries.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LdExperiment {
    pub trials: u64,
    /// Selections avoiding every row of the requested block.
    pub full_rank_excluding: u64,
    /// Selections with at least one row of the requested block.
    pub full_rank_including: u64,
    /// Lower bound on the excluding frequency (meaningful for `v | s`).
    pub bound: f64,
    pub v_divides_s: bool,
}

impl LdExperiment {
    pub fn freq_excluding(&self) -> f64 {
        self.full_rank_excluding as f64 / self.trials as f64
    }

    pub fn freq_including(&self) -> f64 {
        self.full_rank_including as f64 / self.trials as f64
    }
}

/// Per trial: one query for a uniform target, one `n`-subset of rows outside
/// the target block and one uniform `n`-subset meeting it; counts how often
/// each selected submatrix is invertible over `F_{q^s}`.
pub fn ld_rank_experiment(p: &SchemeParams, trials: u64, seed: u64) -> Result<LdExperiment> {
    p.validate()?;
    let delta = p.delta();
    let rows = p.query_rows();
    if rows - delta < p.n {
        return Err(Error::InvalidParams(format!(
            "need mδ - δ >= n to avoid the target block, got {} < {}",
            rows - delta,
            p.n
        )));
    }
    if trials == 0 {
        return Err(Error::InvalidParams("at least one trial required".into()));
    }
    let counts: Vec<(bool, bool)> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(seed, trial);
            let target = rng.gen_range(0..p.m);
            let (query, _) = build_query(p, target, &mut rng)?;
            let block = p.file_cols(target);
            let outside: Vec<usize> = (0..rows).filter(|r| !block.contains(r)).collect();
            let excl: Vec<usize> = sample(&mut rng, outside.len(), p.n).into_iter().map(|i| outside[i]).collect();
            let incl = loop {
                let pick = sample(&mut rng, rows, p.n).into_vec();
                if pick.iter().any(|r| block.contains(r)) {
                    break pick;
                }
            };
            let full = |sel: &[usize]| rank_ext(query.field(), &query.matrix().select_rows(sel)) == p.n;
            Ok((full(&excl), full(&incl)))
        })
        .collect::<Result<_>>()?;
    Ok(LdExperiment {
        trials,
        full_rank_excluding: counts.iter().filter(|c| c.0).count() as u64,
        full_rank_including: counts.iter().filter(|c| c.1).count() as u64,
        bound: ld_rank_bound_f64(p.q, p.s, p.n, p.k),
        v_divides_s: p.s.is_multiple_of(p.v),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::vec_mul_ext;
    use crate::pir::build_query_seeded;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn desk() -> SchemeParams {
        SchemeParams::new(2, 3, 1, 6, 3, 6, 1).unwrap()
    }

    /// Enumerates every codeword `u · gp` and counts those inside `Z`.
    fn brute_subcode_dim(field: &ExtField, gp: &MatExt, guess: &SubspaceGuess) -> usize {
        let base = field.base();
        let order = field.order().unwrap();
        let n = gp.rows();
        let mut words = std::collections::HashSet::new();
        let total = order.pow(n as u32);
        for mut idx in 0..total {
            let mut u = Vec::new();
            for _ in 0..n {
                u.extend(field.elem_from_index(idx % order).into_coeffs());
                idx /= order;
            }
            let c = vec_mul_ext(field, &u, gp).unwrap();
            let inside = c.chunks(field.degree()).all(|e| {
                let one = MatBase::new(1, e.len(), e.to_vec()).unwrap();
                guess.contains_space(base, &one)
            });
            if inside {
                words.insert(c);
            }
        }
        let count = words.len() as f64;
        (count.log2() / (base.order() as f64).log2()).round() as usize
    }

    #[test]
    fn puncture_shapes_and_errors() {
        let p = desk();
        let (q, _) = build_query_seeded(&p, 2, 1).unwrap();
        let gp = puncture_file(&q, 0).unwrap();
        assert_eq!((gp.rows(), gp.cols()), (6, 30));
        assert!(matches!(puncture_file(&q, 6), Err(Error::IndexOutOfRange { .. })));

        let single = SchemeParams::new(2, 3, 1, 6, 3, 1, 1).unwrap();
        let (q1, _) = build_query_seeded(&single, 0, 2).unwrap();
        assert!(puncture_file(&q1, 0).is_err());
    }

    #[test]
    fn punctured_code_contains_restricted_columns() {
        let p = desk();
        let (q, _) = build_query_seeded(&p, 1, 3).unwrap();
        let gp = puncture_file(&q, 4).unwrap();
        let qt = q.matrix().transpose();
        let kept: Vec<usize> = (0..36).filter(|r| !(24..30).contains(r)).collect();
        let restricted = qt.select_cols(&kept);
        assert_eq!(restricted, gp);
        let r = rank_ext(q.field(), &gp);
        for j in 0..6 {
            let mut rows = gp.data().to_vec();
            rows.extend_from_slice(restricted.row(j));
            let st = MatExt::new(7, 30, 3, rows).unwrap();
            assert_eq!(rank_ext(q.field(), &st), r);
        }
    }

    #[test]
    fn dual_annihilates_punctured_generator() {
        let p = desk();
        let (q, _) = build_query_seeded(&p, 0, 4).unwrap();
        let f = q.field();
        let gp = puncture_file(&q, 3).unwrap();
        let dual = dual_basis(f, &gp);
        assert_eq!(dual.rows() + rank_ext(f, &gp), gp.cols());
        for j in 0..gp.rows() {
            for d in 0..dual.rows() {
                let mut acc = f.zero();
                for t in 0..gp.cols() {
                    acc = f.add(&acc, &f.mul(&gp.elem(j, t), &dual.elem(d, t)));
                }
                assert!(acc.is_zero());
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let sq = loop {
            let m = MatExt::random(f, 4, 4, &mut rng);
            if rank_ext(f, &m) == 4 {
                break m;
            }
        };
        assert_eq!(dual_basis(f, &sq).rows(), 0);
    }

    #[test]
    fn subcode_dim_matches_enumeration() {
        let base = BaseField::new(1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for trial in 0..12 {
            let field = ExtField::random(base.clone(), 3, &mut rng).unwrap();
            let n = 1 + trial % 3;
            let len = 2 + trial % 4;
            let mut gp = MatExt::random(&field, n, len, &mut rng);
            if trial % 4 == 0 {
                // force entries into a small subspace so the subcode is large
                let g = SubspaceGuess::random(&base, 3, 1, &mut rng).unwrap();
                for t in 0..len {
                    let c = base.random(&mut rng);
                    gp.set(0, t, &g.basis().row(0).iter().map(|&x| base.mul(x, c)).collect::<Vec<_>>());
                }
            }
            for z in 0..=3 {
                let guess = SubspaceGuess::random(&base, 3, z, &mut rng).unwrap();
                assert_eq!(
                    subspace_subcode_dim(&field, &gp, &guess),
                    brute_subcode_dim(&field, &gp, &guess),
                    "trial {trial}, z {z}"
                );
            }
        }
    }

    #[test]
    fn full_space_gives_whole_code() {
        let p = desk();
        let (q, _) = build_query_seeded(&p, 0, 7).unwrap();
        let base = q.field().base().clone();
        let gp = puncture_file(&q, 1).unwrap();
        let full = SubspaceGuess::new(&base, MatBase::identity(3)).unwrap();
        assert_eq!(subspace_subcode_dim(q.field(), &gp, &full), 3 * rank_ext(q.field(), &gp));
    }

    #[test]
    fn subcode_dim_is_monotone() {
        let p = desk();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let (q, sec) = build_query_seeded(&p, 2, 9).unwrap();
        let base = q.field().base().clone();
        let v = sec.noise_subspace(ExposeSecret::acknowledge());
        let small = SubspaceGuess::new(&base, v.clone()).unwrap();
        let big = loop {
            let h = SubspaceGuess::random(&base, 3, 2, &mut rng).unwrap();
            if h.contains_space(&base, &v) {
                break h;
            }
        };
        for l in 0..p.m {
            let gp = puncture_file(&q, l).unwrap();
            assert!(subspace_subcode_dim(q.field(), &gp, &small) <= subspace_subcode_dim(q.field(), &gp, &big));
        }
    }

    #[test]
    fn true_noise_space_reveals_index() {
        let p = desk();
        let trials = subspace_attack_experiment(&p, GuessKind::TrueNoise, 20, 10, ExposeSecret::acknowledge()).unwrap();
        let ok = trials.iter().filter(|t| t.success()).count();
        assert!(ok >= 19, "{ok}/20");
        for t in &trials {
            assert!(t.verdict.subcode_dims[t.target] >= p.n - p.k);
        }
    }

    #[test]
    fn scaled_noise_space_is_as_good_as_the_true_one() {
        let p = desk();
        let (q, sec) = build_query_seeded(&p, 3, 16).unwrap();
        let f = q.field();
        let v = sec.noise_subspace(ExposeSecret::acknowledge());
        let truth = subspace_attack(&q, &SubspaceGuess::new(f.base(), v.clone()).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..5 {
            let lambda = loop {
                let l = f.random_elem(&mut rng);
                if !l.is_zero() {
                    break l;
                }
            };
            let scaled = f.mul(&lambda, &f.elem(v.row(0).to_vec()).unwrap()).into_coeffs();
            let z = MatBase::new(1, 3, scaled).unwrap();
            assert!(is_scaled_copy(f, &z, &v));
            let verdict = subspace_attack(&q, &SubspaceGuess::new(f.base(), z).unwrap()).unwrap();
            assert_eq!(verdict, truth);
        }
    }

    #[test]
    fn guesses_off_the_scaling_orbit_reveal_nothing() {
        let p = SchemeParams::new(2, 4, 2, 4, 2, 6, 1).unwrap();
        let truth = subspace_attack_experiment(&p, GuessKind::TrueNoise, 20, 18, ExposeSecret::acknowledge()).unwrap();
        assert!(truth.iter().filter(|t| t.success()).count() >= 19);
        let wrong =
            subspace_attack_experiment(&p, GuessKind::WrongUpToScaling, 20, 19, ExposeSecret::acknowledge()).unwrap();
        let ok = wrong.iter().filter(|t| t.success()).count();
        assert!(ok <= 2, "{ok}/20");
        assert!(matches!(
            subspace_attack_experiment(&desk(), GuessKind::WrongUpToScaling, 1, 1, ExposeSecret::acknowledge()),
            Err(Error::InvalidParams(_))
        ));
    }

    #[test]
    fn few_files_leave_several_candidates() {
        // (m-1)δ = 6 = n: every punctured code is the whole space F_8^6
        let p = SchemeParams::new(2, 3, 1, 6, 3, 2, 1).unwrap();
        let trials = subspace_attack_experiment(&p, GuessKind::TrueNoise, 5, 12, ExposeSecret::acknowledge()).unwrap();
        for t in trials {
            assert!(t.verdict.subcode_dims.iter().all(|&d| d > 0));
            assert_eq!(t.verdict.recovered_index, None);
        }
    }

    #[test]
    fn guessing_rate_examples() {
        let p = SchemeParams::new(2, 3, 1, 6, 3, 6, 1).unwrap();
        let out = simulate_superspace_guessing(&p, 4000, 13).unwrap();
        let prob: f64 = 3.0 / 7.0;
        let sigma = (prob * (1.0 - prob) / 4000.0).sqrt();
        assert!((out.rate() - prob).abs() <= 3.0 * sigma, "{}", out.rate());
        assert!((out.predicted - prob).abs() < 1e-12);

        // v = s - 1: only V itself is a hit, 1 / [4, 3]_2 = 1/15
        let p = SchemeParams::new(2, 4, 3, 6, 5, 30, 1).unwrap();
        let out = simulate_superspace_guessing(&p, 3000, 14).unwrap();
        let prob: f64 = 1.0 / 15.0;
        let sigma = (prob * (1.0 - prob) / 3000.0).sqrt();
        assert!((out.rate() - prob).abs() <= 3.0 * sigma, "{}", out.rate());
        assert!(simulate_superspace_guessing(&p, 0, 1).is_err());
    }

    #[test]
    fn ld_experiment_bounds_and_errors() {
        let p = SchemeParams::new(2, 4, 2, 4, 2, 4, 1).unwrap();
        let out = ld_rank_experiment(&p, 200, 15).unwrap();
        assert!((0.0..=1.0).contains(&out.freq_excluding()));
        assert!((0.0..=1.0).contains(&out.freq_including()));
        assert!(out.v_divides_s);
        // mδ - δ = 4 < n = 6
        let tight = SchemeParams::new(2, 3, 1, 6, 4, 2, 1).unwrap();
        assert!(matches!(ld_rank_experiment(&tight, 10, 1), Err(Error::InvalidParams(_))));
    }
}
