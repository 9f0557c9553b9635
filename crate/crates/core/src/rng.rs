use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Seed plus substream index for a [`ChaCha8Rng`].
///
/// The key is expanded from `seed` with `seed_from_u64`, and `stream` selects
/// the ChaCha stream, so `(seed, 0)`, `(seed, 1)`, ... are independent
/// sequences under the same key. Monte-Carlo trial `k` uses stream `k`.
/// Draws are reproducible within a build; bit-exactness across versions of
/// `rand`/`rand_chacha` is not promised.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngSeed {
    pub seed: u64,
    pub stream: u64,
}

impl RngSeed {
    pub fn new(seed: u64) -> Self {
        RngSeed { seed, stream: 0 }
    }

    pub fn with_stream(self, stream: u64) -> Self {
        RngSeed { stream, ..self }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

impl From<u64> for RngSeed {
    fn from(seed: u64) -> Self {
        RngSeed::new(seed)
    }
}
