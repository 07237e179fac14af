//! Seeded random streams.
//!
//! Every random quantity in the crate is drawn from a [`ChaCha20Rng`]. A
//! stream is identified by a master seed, a purpose tag and an index; the
//! 32-byte ChaCha key is the SHA-256 digest of
//! `"gradcs-stream" || master_le || tag || 0x00 || index_le`. Streams are
//! therefore independent of thread scheduling and of the platform RNG.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use sha2::{Digest, Sha256};

pub type StreamRng = ChaCha20Rng;

/// Derives the sub-seed for `(master, tag, index)`.
pub fn derive_seed(master: u64, tag: &str, index: u64) -> [u8; 32] {
    let mut hasher = Sha256::new();
    hasher.update(b"gradcs-stream");
    hasher.update(master.to_le_bytes());
    hasher.update(tag.as_bytes());
    hasher.update([0u8]);
    hasher.update(index.to_le_bytes());
    hasher.finalize().into()
}

/// Derives a 64-bit seed, used where a child object records its own seed.
pub fn derive_u64(master: u64, tag: &str, index: u64) -> u64 {
    let bytes = derive_seed(master, tag, index);
    u64::from_le_bytes(bytes[..8].try_into().expect("digest has 32 bytes"))
}

pub fn stream(master: u64, tag: &str, index: u64) -> StreamRng {
    ChaCha20Rng::from_seed(derive_seed(master, tag, index))
}
