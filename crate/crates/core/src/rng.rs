//! Seeded random streams.
//!
//! Every random quantity in the crate is drawn from ChaCha20 seeded through
//! [`stream`]. Independent sub-streams (bootstrap replicates, Monte Carlo
//! trials, figure panels) get their seeds from [`derive_seed`], a
//! counter-based SplitMix64 rule: `derive_seed(root, i)` is the SplitMix64
//! output for state `root + (i + 1) * 0x9E3779B97F4A7C15`.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

pub type Stream = ChaCha20Rng;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// Deterministic generator for `seed`.
pub fn stream(seed: u64) -> Stream {
    ChaCha20Rng::seed_from_u64(seed)
}

fn splitmix64(state: u64) -> u64 {
    let mut z = state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of the `index`-th sub-stream of `root`.
pub fn derive_seed(root: u64, index: u64) -> u64 {
    splitmix64(root.wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}

/// Portable Bernoulli draw: success iff `u / 2^64 < p` for a uniform 64-bit `u`.
///
/// `p <= 0` never succeeds and `p >= 1` always does.
pub fn bernoulli_from_u64(u: u64, p: f64) -> bool {
    if p >= 1.0 {
        return true;
    }
    if p <= 0.0 || p.is_nan() {
        return false;
    }
    // p * 2^64 is exact (power-of-two scaling) and below 2^64 for p < 1
    u_below(u, p * 18_446_744_073_709_551_616.0)
}

// Exact test of u < t for a non-negative real t < 2^64 held in an f64.
fn u_below(u: u64, t: f64) -> bool {
    let floor = t.floor();
    let whole = floor as u64;
    if floor == t {
        u < whole
    } else {
        u <= whole
    }
}
