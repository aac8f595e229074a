//! Seeded random streams.
//!
//! Every stochastic component draws from a ChaCha stream derived from a
//! master seed and a task index, so results never depend on thread count
//! or scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// Default master seed for command-line runs.
pub const DEFAULT_SEED: u64 = 42;

/// Independent stream `stream` of the generator seeded with `seed`.
pub fn stream(seed: u64, stream: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Mean that reproduces a constant input exactly.
pub(crate) fn stable_mean(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut iter = values.into_iter();
    let Some(first) = iter.next() else {
        return f64::NAN;
    };
    let mut n = 1.0;
    let mut acc = 0.0;
    for v in iter {
        acc += v - first;
        n += 1.0;
    }
    first + acc / n
}
