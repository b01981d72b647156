//! Deterministic seed derivation.
//!
//! Every randomized stage (scene draws, operator draws, noise, clustering
//! restarts) takes an explicit u64 seed derived from a master seed and the
//! coordinates that identify the stage. The chain is a plain splitmix64 walk,
//! so derived seeds are reproducible across platforms and releases.

pub fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Folds `parts` into `master` one splitmix64 step at a time.
pub fn derive(master: u64, parts: &[u64]) -> u64 {
    let mut s = splitmix64(master);
    for &p in parts {
        s = splitmix64(s ^ p.wrapping_mul(0x2545f4914f6cdd1d));
    }
    s
}
