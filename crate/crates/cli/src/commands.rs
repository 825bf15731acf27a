use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use cpir_core::analysis::{
    build_table, download_bits, equiv_field_log2, expected_subcode_dim, format_table, gaussian_binomial,
    ld_rank_bound_f64, rate_asymptotic, rate_exact, ss_workfactor_log2, sweep_csv, sweep_v, upload_bits,
    PUBLISHED_ROWS,
};
use cpir_core::attacks::{ld_rank_experiment, simulate_superspace_guessing, subspace_attack_experiment, GuessKind};
use cpir_core::pir::{build_query_seeded, decode, respond, Database, ExposeSecret, SchemeParams};
use cpir_core::{wire, Error};

use crate::{AttackKind, CliError, Command};

type CmdResult = Result<(), CliError>;

fn read(path: &Path) -> Result<Vec<u8>, Error> {
    fs::read(path).map_err(Error::Io)
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), Error> {
    fs::write(path, bytes).map_err(Error::Io)
}

/// Prints to stdout, or writes to `out` when given.
fn emit(out: Option<&Path>, text: &str) -> Result<(), Error> {
    match out {
        Some(p) => write(p, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub(crate) fn run(cmd: Command) -> CmdResult {
    match cmd {
        Command::Analyze { params } => analyze(&params.params()?),
        Command::Table { out } => table(out.as_deref()),
        Command::Sweep { q, s, v, n, k, out } => {
            let points = sweep_v(q, s, n, k, v..=s.saturating_sub(1))?;
            Ok(emit(out.as_deref(), &sweep_csv(&points))?)
        }
        Command::MakeDb { params, seed, out } => {
            let db = Database::random(params.params()?, &mut ChaCha8Rng::seed_from_u64(seed))?;
            Ok(write(&out, &wire::encode_database(&db))?)
        }
        Command::Query { params, index, seed, out, secret } => {
            let (q, sec) = build_query_seeded(&params.params()?, index, seed)?;
            write(&out, &wire::encode_query(&q))?;
            Ok(write(&secret, &wire::encode_secret(&sec))?)
        }
        Command::Respond { db, input, out } => {
            let db = wire::decode_database(&read(&db)?)?;
            let q = wire::decode_query(&read(&input)?)?;
            if q.params().m != db.params().m {
                return Err(Error::ParamMismatch(format!(
                    "database holds m = {} files, query is for m = {}",
                    db.params().m,
                    q.params().m
                ))
                .into());
            }
            let a = respond(&db, &q)?;
            Ok(write(&out, &wire::encode_response(&a))?)
        }
        Command::Decode { input, secret, out } => {
            let a = wire::decode_response(&read(&input)?)?;
            let sec = wire::decode_secret(&read(&secret)?)?;
            let file = decode(&a, &sec)?;
            Ok(write(&out, file.data())?)
        }
        Command::Attack { kind, params, trials, seed, expose_secret, budget, out } => {
            attack(kind, &params.params()?, trials, seed, expose_secret, budget, out.as_deref())
        }
        Command::Serve { db, net } => {
            let db = wire::decode_database(&read(&db)?)?;
            let server = wire::serve(db, net.socket()?)?;
            println!("listening on {}", server.local_addr());
            let _ = std::io::stdout().flush();
            server.join();
            Ok(())
        }
        Command::Fetch { net, input, out } => {
            let q = wire::decode_query(&read(&input)?)?;
            let a = wire::fetch(net.socket()?, &q)?;
            Ok(write(&out, &wire::encode_response(&a))?)
        }
    }
}

fn analyze(p: &SchemeParams) -> CmdResult {
    let exact = rate_exact(p);
    let asym = rate_asymptotic(p);
    let mut out = String::new();
    let _ = writeln!(out, "q={}\ns={}\nv={}\nn={}\nk={}\nm={}\nL={}", p.q, p.s, p.v, p.n, p.k, p.m, p.l);
    let _ = writeln!(out, "delta={}", p.delta());
    let _ = writeln!(out, "rate_exact={}/{}", exact.numer(), exact.denom());
    let _ = writeln!(out, "rate_asymptotic={}/{}", asym.numer(), asym.denom());
    let _ = writeln!(out, "upload_bits={}", upload_bits(p));
    let _ = writeln!(out, "download_bits={}", download_bits(p));
    let _ = writeln!(out, "ss_log2={:.4}", ss_workfactor_log2(p.s, p.v, p.q));
    let _ = writeln!(out, "ld_bound={:.12}", ld_rank_bound_f64(p.q, p.s, p.n, p.k));
    let _ = writeln!(out, "equiv_field_log2={:.4}", equiv_field_log2(p.q, p.s));
    print!("{out}");
    Ok(())
}

fn table(out: Option<&Path>) -> CmdResult {
    let rows = build_table(&PUBLISHED_ROWS)?;
    let mut text = format_table(&rows);
    text.push('\n');
    for r in &rows {
        text.push_str(&r.to_kv_line());
        text.push('\n');
    }
    Ok(emit(out, &text)?)
}

fn summary(trials: u64, successes: u64, bound: f64) -> String {
    format!(
        "{{trials: {trials}, successes: {successes}, rate: {:.6}, bound: {bound:.6}}}\n",
        successes as f64 / trials as f64
    )
}

fn attack(
    kind: AttackKind,
    p: &SchemeParams,
    trials: u64,
    seed: u64,
    expose_secret: bool,
    budget: u64,
    out: Option<&Path>,
) -> CmdResult {
    let spaces = gaussian_binomial(p.s, p.v, p.q);
    if spaces > BigUint::from(budget) {
        return Err(CliError::Budget(format!(
            "{spaces} candidate {}-dimensional subspaces exceed the budget of {budget}",
            p.v
        )));
    }
    if trials == 0 {
        return Err(Error::InvalidParams("--trials must be at least 1".into()).into());
    }
    match kind {
        AttackKind::Subspace => {
            if !expose_secret {
                return Err(Error::InvalidParams("the subspace attack reads the noise space; pass --expose-secret".into()).into());
            }
            let runs = subspace_attack_experiment(p, GuessKind::TrueNoise, trials, seed, ExposeSecret::acknowledge())?;
            let mut csv = String::from("trial,target,verdict,subcode_dims...\n");
            for t in &runs {
                let verdict = t.verdict.recovered_index.map_or("none".to_string(), |l| l.to_string());
                let dims: Vec<String> = t.verdict.subcode_dims.iter().map(|d| d.to_string()).collect();
                let _ = writeln!(csv, "{},{},{},{}", t.trial, t.target, verdict, dims.join(","));
            }
            if let Some(path) = out {
                write(path, csv.as_bytes())?;
            }
            let successes = runs.iter().filter(|t| t.success()).count() as u64;
            let expected = expected_subcode_dim(p.m, p.delta(), p.n, p.s)?;
            println!("expected_subcode_dim={expected}");
            print!("{}", summary(trials, successes, if expected == 0 { 1.0 } else { 0.0 }));
        }
        AttackKind::Guess => {
            let g = simulate_superspace_guessing(p, trials, seed)?;
            print!("{}", summary(g.trials, g.hits, g.predicted));
        }
        AttackKind::Rank => {
            let r = ld_rank_experiment(p, trials, seed)?;
            if !r.v_divides_s {
                println!("note=v does not divide s; the bound is not established here");
            }
            println!("freq_including={:.6}", r.freq_including());
            print!("{}", summary(r.trials, r.full_rank_excluding, r.bound));
        }
    }
    Ok(())
}
