use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Independent sub-streams of one seeded generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    /// Brownian motion driving the price.
    Price = 0,
    /// Brownian motion driving the variance.
    Variance = 1,
    /// Stable jump driver.
    Jumps = 2,
}

/// SplitMix64 mix of `(master, index)`, used to give each replication its own
/// seed independent of execution order.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn stream_rng(seed: u64, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}
