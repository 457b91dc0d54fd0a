//! Monte Carlo simulation of the shuffling process at a numeric `q`.
//!
//! Each trial replays the model procedurally: at time `k` the new maximum
//! keeps swapping left while independent Bernoulli(`q`) draws succeed, up to
//! `k` swaps. That induces exactly the step distribution
//! `[1-q, q(1-q), ..., q^{k-1}(1-q), q^k]`.
//!
//! Determinism contract: the RNG is ChaCha8 seeded from the configured seed,
//! with the per-trial stream set to the trial index. Estimates are therefore
//! bit-identical for any number of workers, since merging is an
//! order-insensitive sum of indicator counts.

use std::num::NonZeroUsize;
use std::thread;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::pattern::Pattern;
use crate::qseries::NumericQ;
use crate::shuffle::Shuffle;

/// Simulation parameters. Worker count is deliberately not part of the
/// configuration: it must not affect the estimate.
#[derive(Debug, Clone, Copy)]
pub struct McConfig {
    q: NumericQ,
    horizon: usize,
    trials: u64,
    seed: u64,
}

impl McConfig {
    pub fn new(q: NumericQ, horizon: usize, trials: u64, seed: u64) -> Result<Self> {
        if trials == 0 || horizon == 0 {
            return Err(Error::InvalidMcConfig);
        }
        Ok(McConfig {
            q,
            horizon,
            trials,
            seed,
        })
    }

    pub fn q(&self) -> NumericQ {
        self.q
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn trials(&self) -> u64 {
        self.trials
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// An estimated event probability with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub p_hat: f64,
    /// `sqrt(p_hat (1 - p_hat) / trials)`.
    pub stderr: f64,
    pub trials: u64,
}

/// The RNG for one trial: ChaCha8 keyed by the seed, stream = trial index.
pub fn trial_rng(seed: u64, trial_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial_index);
    rng
}

/// Draws the swap count at the given time by sequential Bernoulli(`q`)
/// swaps: keep jumping left while the draws succeed, stopping at the front.
pub fn sample_swap_count<R: Rng + ?Sized>(rng: &mut R, time: usize, q: NumericQ) -> usize {
    let q = q.value();
    let mut swap_count = 0;
    while swap_count < time && rng.random_bool(q) {
        swap_count += 1;
    }
    swap_count
}

/// Runs the Markov process from `(0)` up to the configured horizon.
pub fn sample_trajectory<R: Rng + ?Sized>(cfg: &McConfig, rng: &mut R) -> Shuffle {
    let mut entries = Vec::with_capacity(cfg.horizon + 1);
    entries.push(0);
    for time in 1..=cfg.horizon {
        let swap_count = sample_swap_count(rng, time, cfg.q);
        entries.insert(time - swap_count, time);
    }
    Shuffle::from_trusted(entries)
}

/// Estimates the probability of an event as the member fraction over
/// independent trials, using every available core.
pub fn estimate_event(cfg: &McConfig, pattern: &Pattern) -> Result<McEstimate> {
    let workers = thread::available_parallelism().unwrap_or(NonZeroUsize::MIN);
    estimate_event_with_workers(cfg, pattern, workers)
}

/// Same estimate with an explicit worker count. The result is bit-identical
/// for every choice of `workers`.
pub fn estimate_event_with_workers(
    cfg: &McConfig,
    pattern: &Pattern,
    workers: NonZeroUsize,
) -> Result<McEstimate> {
    pattern.require_within(cfg.horizon)?;
    let workers = workers.get().min(cfg.trials.max(1) as usize);
    let hits: u64 = if workers <= 1 {
        count_hits(cfg, pattern, 0..cfg.trials)
    } else {
        let chunk = cfg.trials.div_ceil(workers as u64);
        thread::scope(|scope| {
            let handles: Vec<_> = (0..workers as u64)
                .map(|worker| {
                    let lo = worker * chunk;
                    let hi = (lo + chunk).min(cfg.trials);
                    scope.spawn(move || count_hits(cfg, pattern, lo..hi))
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("worker panicked")).sum()
        })
    };
    let p_hat = hits as f64 / cfg.trials as f64;
    let stderr = (p_hat * (1.0 - p_hat) / cfg.trials as f64).sqrt();
    Ok(McEstimate {
        p_hat,
        stderr,
        trials: cfg.trials,
    })
}

fn count_hits(cfg: &McConfig, pattern: &Pattern, trial_range: std::ops::Range<u64>) -> u64 {
    trial_range
        .filter(|&trial| {
            let mut rng = trial_rng(cfg.seed, trial);
            pattern.contains(&sample_trajectory(cfg, &mut rng))
        })
        .count() as u64
}
