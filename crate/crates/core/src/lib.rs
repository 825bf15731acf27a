//! Code-based single-server computational private information retrieval.
//!
//! The user hides the index of the wanted file inside a matrix of noisy
//! codewords of a secret random code over `F_{q^s}`; the server answers with
//! an `F_q`-linear combination of the query rows; the user strips the
//! codeword part by erasure decoding and reads the file out of a secret
//! subspace of the noise.

pub mod analysis;
pub mod attacks;
pub mod code;
pub mod error;
pub mod gf;
pub mod linalg;
pub mod pir;
pub mod wire;

pub use error::{Error, Result};

/// Per-trial generator derived from a master seed, independent of the order
/// in which trials are executed.
pub fn trial_rng(seed: u64, trial: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}
