//! Seeded random substreams.
//!
//! Every consumer draws from its own ChaCha stream keyed by name, so adding
//! a draw in one place never shifts the numbers seen somewhere else.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const INIT: &str = "init";
pub const DROPOUT: &str = "dropout";
pub const SYNTHETIC: &str = "synthetic";
pub const SPLIT: &str = "split";

/// FNV-1a, stable across platforms and releases.
fn stream_id(name: &str) -> u64 {
    name.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

pub fn substream(seed: u64, name: &str) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream_id(name));
    rng
}
