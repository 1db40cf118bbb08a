//! Seeded random streams for Monte Carlo trials.
//!
//! Each trial draws from its own ChaCha8 stream selected by a counter, so the
//! numbers a trial sees depend only on `(seed, tag, trial)` and never on how
//! trials are scheduled across threads. Results are collected in trial order
//! before any reduction.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub type TrialRng = ChaCha8Rng;

/// Distinguishes independent sub-experiments that share a seed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StreamTag(pub u32);

pub fn trial_rng(seed: u64, tag: StreamTag, trial: u64) -> TrialRng {
    assert!(trial < 1 << 40, "trial index exceeds the stream counter range");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((u64::from(tag.0) << 40) | trial);
    rng
}

/// Runs `trials` independent trials, possibly in parallel, returning their
/// results in trial order.
pub fn run_trials<T, F>(trials: usize, seed: u64, tag: StreamTag, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, &mut TrialRng) -> T + Sync + Send,
{
    (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, tag, i as u64);
            f(i, &mut rng)
        })
        .collect()
}

/// Sample mean and standard error of the mean.
pub fn mean_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}
