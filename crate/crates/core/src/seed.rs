//! Counter-based derivation of independent random streams from one master seed.
//!
//! A stream is identified by a domain label and a path of integers
//! (trial, round, player, ...). Its 32-byte ChaCha seed is the SHA-256 of the
//! master seed, the label and the path, so adding trials or rounds never
//! perturbs the streams of existing ones.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

pub type StreamRng = ChaCha8Rng;

pub fn derive_seed(master: u64, domain: &str, path: &[u64]) -> [u8; 32] {
    let mut hasher = Sha256::new();
    hasher.update(master.to_le_bytes());
    hasher.update((domain.len() as u64).to_le_bytes());
    hasher.update(domain.as_bytes());
    for step in path {
        hasher.update(step.to_le_bytes());
    }
    hasher.finalize().into()
}

pub fn stream(master: u64, domain: &str, path: &[u64]) -> StreamRng {
    ChaCha8Rng::from_seed(derive_seed(master, domain, path))
}

/// Seed of trial `index` of an experiment.
pub fn trial_seed(master: u64, index: u64) -> u64 {
    let bytes = derive_seed(master, "trial", &[index]);
    u64::from_le_bytes(bytes[..8].try_into().expect("8 bytes"))
}
