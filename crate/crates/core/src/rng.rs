//! Deterministic seeded randomness with reproducible substreams.
//!
//! Every stochastic operation in the engine draws from an [`RngStream`]
//! identified by a root seed and a path of substream indices. Streams are
//! backed by the ChaCha20 counter-based generator, so a fixed
//! `(seed, path)` yields the same byte sequence on every platform and
//! independent of how work is scheduled across particles.
//!
//! Substream derivation forms a PRF tree: a child key is read from the
//! parent's keystream at nonce `index + 1`, while a node's own draws use
//! nonce 0 of its key. Distinct paths therefore never share keystream.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

/// A reproducible randomness source identified by `(seed, path)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RngStream {
    seed: u64,
    path: Vec<u64>,
    key: [u8; 32],
}

impl RngStream {
    /// Root stream for a run.
    pub fn from_seed(seed: u64) -> Self {
        let mut raw = [0u8; 32];
        raw[..8].copy_from_slice(&seed.to_le_bytes());
        // Whiten the integer seed so that nearby seeds give unrelated keys.
        let mut rng = ChaCha20Rng::from_seed(raw);
        rng.set_stream(u64::MAX);
        let mut key = [0u8; 32];
        rng.fill_bytes(&mut key);
        RngStream { seed, path: Vec::new(), key }
    }

    /// Derive the `index`-th child stream. Pure: calling twice with the same
    /// index returns identical streams.
    pub fn substream(&self, index: u64) -> Self {
        assert!(index < u64::MAX, "substream index out of range");
        let mut rng = ChaCha20Rng::from_seed(self.key);
        rng.set_stream(index + 1);
        let mut key = [0u8; 32];
        rng.fill_bytes(&mut key);
        let mut path = self.path.clone();
        path.push(index);
        RngStream { seed: self.seed, path, key }
    }

    /// Instantiate the generator for this node's own draws.
    pub fn rng(&self) -> ChaCha20Rng {
        let mut rng = ChaCha20Rng::from_seed(self.key);
        rng.set_stream(0);
        rng
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn path(&self) -> &[u64] {
        &self.path
    }
}
