//! `cpir`: analysis, file-based query/respond/decode, attack experiments and
//! a small network service for the code-based PIR scheme.

mod commands;

use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cpir_core::pir::SchemeParams;
use cpir_core::Error;

#[derive(Parser, Debug)]
#[command(name = "cpir", version, about = "Code-based single-server computational PIR")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct ParamArgs {
    /// Base field order, a power of two up to 256.
    #[arg(long)]
    q: u32,
    /// Extension degree.
    #[arg(long)]
    s: usize,
    /// Dimension of the noise subspace.
    #[arg(long)]
    v: usize,
    /// Code length.
    #[arg(long)]
    n: usize,
    /// Code dimension.
    #[arg(long)]
    k: usize,
    /// Number of files.
    #[arg(long, default_value_t = 1)]
    m: usize,
    /// Rows per file.
    #[arg(long = "L", default_value_t = 1)]
    l: usize,
}

impl ParamArgs {
    fn params(&self) -> Result<SchemeParams, Error> {
        SchemeParams::new(self.q, self.s, self.v, self.n, self.k, self.m, self.l)
    }
}

#[derive(Args, Debug, Clone)]
struct NetArgs {
    #[arg(long, default_value = "127.0.0.1")]
    addr: String,
    #[arg(long, default_value_t = 7878)]
    port: u16,
}

impl NetArgs {
    fn socket(&self) -> Result<SocketAddr, CliError> {
        format!("{}:{}", self.addr, self.port)
            .parse()
            .or_else(|_| {
                use std::net::ToSocketAddrs;
                (self.addr.as_str(), self.port)
                    .to_socket_addrs()
                    .ok()
                    .and_then(|mut a| a.next())
                    .ok_or(())
            })
            .map_err(|_| CliError::Core(Error::ConnectionFailed(std::io::Error::new(
                std::io::ErrorKind::InvalidInput,
                format!("cannot resolve {}:{}", self.addr, self.port),
            ))))
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum AttackKind {
    /// White-box subspace-subcode distinguisher with the true noise space.
    Subspace,
    /// Uniform hyperplane guessing against a random noise space.
    Guess,
    /// Full-rank frequency of row selections.
    Rank,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print rate, sizes and attack estimates as key=value lines.
    Analyze {
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Print the built-in parameter table.
    Table {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// CSV of attack estimates over v (from --v, default 10, up to s-1).
    Sweep {
        #[arg(long, default_value_t = 32)]
        q: u32,
        #[arg(long, default_value_t = 32)]
        s: usize,
        #[arg(long, default_value_t = 10)]
        v: usize,
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long, default_value_t = 50)]
        k: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a random database file.
    MakeDb {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build a query for file --index (0-based); writes the query and secret.
    Query {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        index: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        secret: PathBuf,
    },
    /// Answer a query file against a database file.
    Respond {
        #[arg(long)]
        db: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Recover the requested file (raw bytes, L × δ, row-major).
    Decode {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        secret: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run an attack experiment and print the summary.
    Attack {
        #[arg(value_enum)]
        kind: AttackKind,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Required by the white-box subspace attack.
        #[arg(long)]
        expose_secret: bool,
        /// Largest number of candidate noise spaces allowed.
        #[arg(long, default_value_t = 1 << 20)]
        budget: u64,
        /// Per-trial CSV (subspace attack only).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Serve a database until killed.
    Serve {
        #[arg(long)]
        db: PathBuf,
        #[command(flatten)]
        net: NetArgs,
    },
    /// Send a query file to a server and write the response file.
    Fetch {
        #[command(flatten)]
        net: NetArgs,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug)]
enum CliError {
    Core(Error),
    Budget(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Budget(_) => 5,
            CliError::Core(e) => match e {
                Error::InvalidParams(_) | Error::IndexOutOfRange { .. } | Error::RetryLimitExceeded(_) => 2,
                Error::ConnectionFailed(_) | Error::ServerError { .. } => 4,
                _ => 3,
            },
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Budget(msg) => write!(f, "budget exceeded: {msg}"),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
