//! The insertion-shuffling Markov model at finite horizon.
//!
//! The process starts from the sequence `(0)`. At time `k` it appends `k` on
//! the right and lets it jump left over `i` neighbours with probability
//! `q^i (1-q)` for `i < k`, or all the way to the front with probability
//! `q^k`. A state at time `K` is a shuffle (permutation written as a
//! sequence) of `[0, K]`, and removing its maximum recovers the unique
//! time-`K-1` state, so every shuffle decodes to a unique trajectory of swap
//! counts and its probability is the product of the step probabilities.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::qseries::TruncatedSeries;

/// A shuffle of `[0, k]`: a sequence containing each of `0..=k` exactly once.
///
/// "Shuffle" here means a permutation written as a sequence, not a riffle
/// shuffle.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Shuffle {
    entries: Vec<usize>,
}

impl Shuffle {
    /// Validates that `entries` is a permutation of `0..entries.len()`.
    pub fn new(entries: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; entries.len()];
        for &entry in &entries {
            if entry >= entries.len() || seen[entry] {
                return Err(Error::InvalidShuffle { entries });
            }
            seen[entry] = true;
        }
        if entries.is_empty() {
            return Err(Error::InvalidShuffle { entries });
        }
        Ok(Shuffle { entries })
    }

    /// The time-0 state `(0)`.
    pub fn initial() -> Self {
        Shuffle { entries: vec![0] }
    }

    // For callers that build entries by valid insertions and skip the O(n)
    // permutation check.
    pub(crate) fn from_trusted(entries: Vec<usize>) -> Self {
        debug_assert!(Shuffle::new(entries.clone()).is_ok());
        Shuffle { entries }
    }

    /// The identity shuffle `(0, 1, ..., k)`.
    pub fn identity(horizon: usize) -> Self {
        Shuffle {
            entries: (0..=horizon).collect(),
        }
    }

    /// The reversal `(k, k-1, ..., 0)`.
    pub fn reversal(horizon: usize) -> Self {
        Shuffle {
            entries: (0..=horizon).rev().collect(),
        }
    }

    /// The time this shuffle belongs to: a shuffle of `[0, K]` has horizon `K`.
    pub fn horizon(&self) -> usize {
        self.entries.len() - 1
    }

    pub fn entries(&self) -> &[usize] {
        &self.entries
    }

    /// Extends a shuffle of `[0, k-1]` by inserting `k` with the given swap
    /// count: `k` jumps over `swap_count` neighbours and lands at index
    /// `k - swap_count`.
    ///
    /// Panics if `swap_count > k`.
    pub fn apply_insertion(&self, swap_count: usize) -> Shuffle {
        let inserted = self.entries.len();
        assert!(
            swap_count <= inserted,
            "swap count {swap_count} exceeds time {inserted}"
        );
        let mut entries = self.entries.clone();
        entries.insert(inserted - swap_count, inserted);
        Shuffle { entries }
    }

    /// Removes the maximum and returns the time-`k-1` state together with the
    /// swap count that produced this shuffle. Exact inverse of
    /// [`apply_insertion`](Self::apply_insertion).
    ///
    /// Panics on the time-0 state.
    pub fn predecessor(&self) -> (Shuffle, usize) {
        let horizon = self.horizon();
        assert!(horizon >= 1, "the time-0 state (0) has no predecessor");
        let index = self
            .entries
            .iter()
            .position(|&entry| entry == horizon)
            .expect("a shuffle always contains its maximum");
        let mut entries = self.entries.clone();
        entries.remove(index);
        (Shuffle { entries }, horizon - index)
    }

    /// The unique swap-count sequence `(i_1, ..., i_K)` that produces this
    /// shuffle, recovered by repeated predecessor steps.
    pub fn decode_trajectory(&self) -> Vec<usize> {
        let mut swap_counts = vec![0; self.horizon()];
        let mut state = self.clone();
        while state.horizon() >= 1 {
            let time = state.horizon();
            let (previous, swap_count) = state.predecessor();
            swap_counts[time - 1] = swap_count;
            state = previous;
        }
        swap_counts
    }

    /// Exact probability of this shuffle in the time-`K` model: the product
    /// of the step probabilities along the decoded trajectory.
    ///
    /// Requires `order > K(K+1)/2` so that no computed exponent is truncated
    /// away; panics otherwise.
    pub fn trajectory_probability(&self, order: usize) -> TruncatedSeries {
        let horizon = self.horizon();
        let max_exponent = horizon * (horizon + 1) / 2;
        assert!(
            order > max_exponent,
            "order {order} loses information: trajectories at horizon {horizon} \
             reach exponent {max_exponent}"
        );
        let mut probability = TruncatedSeries::one(order);
        for (index, &swap_count) in self.decode_trajectory().iter().enumerate() {
            let time = index + 1;
            probability = if swap_count == time {
                probability.scale_shift(1, time)
            } else {
                // q^i (1-q) = q^i - q^{i+1}
                &probability.scale_shift(1, swap_count) - &probability.scale_shift(1, swap_count + 1)
            };
        }
        probability
    }
}

/// All `(K+1)!` shuffles of `[0, K]`, generated by the insertion recursion,
/// in lexicographic order.
pub fn all_shuffles(horizon: usize) -> Vec<Shuffle> {
    let mut level = vec![Shuffle::initial()];
    for _ in 1..=horizon {
        let mut next = Vec::with_capacity(level.len() * (level[0].entries.len() + 1));
        for shuffle in &level {
            for swap_count in 0..=shuffle.entries.len() {
                next.push(shuffle.apply_insertion(swap_count));
            }
        }
        level = next;
    }
    level.sort();
    level
}

/// Text form `(2,0,3,1)`.
impl fmt::Display for Shuffle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (index, entry) in self.entries.iter().enumerate() {
            if index > 0 {
                write!(f, ",")?;
            }
            write!(f, "{entry}")?;
        }
        write!(f, ")")
    }
}

impl FromStr for Shuffle {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let trimmed = text.trim();
        let inner = trimmed
            .strip_prefix('(')
            .and_then(|rest| rest.strip_suffix(')'))
            .ok_or_else(|| Error::ShuffleParse {
                text: text.to_owned(),
            })?;
        let entries = inner
            .split(',')
            .map(|part| part.trim().parse::<usize>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| Error::ShuffleParse {
                text: text.to_owned(),
            })?;
        Shuffle::new(entries)
    }
}

/// The step distribution at time `k`: probabilities of the `k+1` possible
/// swap counts, as exact polynomials.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepDistribution {
    time: usize,
    probs: Vec<TruncatedSeries>,
}

impl StepDistribution {
    /// Builds `[1-q, q(1-q), ..., q^{k-1}(1-q), q^k]` at the given order.
    ///
    /// Panics if `time == 0` (Time 0 has no step) or `order <= time` (the
    /// leftmost probability `q^k` would be truncated away).
    pub fn new(time: usize, order: usize) -> Self {
        assert!(time >= 1, "Time 0 has no shuffling step");
        assert!(
            order > time,
            "order {order} truncates the leftmost probability q^{time}"
        );
        let probs = (0..=time)
            .map(|swap_count| {
                if swap_count == time {
                    TruncatedSeries::monomial(order, 1, time)
                } else {
                    &TruncatedSeries::monomial(order, 1, swap_count)
                        - &TruncatedSeries::monomial(order, 1, swap_count + 1)
                }
            })
            .collect();
        StepDistribution { time, probs }
    }

    pub fn time(&self) -> usize {
        self.time
    }

    /// Probability polynomial of the given swap count.
    pub fn prob(&self, swap_count: usize) -> &TruncatedSeries {
        &self.probs[swap_count]
    }

    pub fn probs(&self) -> &[TruncatedSeries] {
        &self.probs
    }

    /// Sum of all entries; equals the constant polynomial 1.
    pub fn total(&self) -> TruncatedSeries {
        self.probs
            .iter()
            .fold(TruncatedSeries::zero(self.probs[0].order()), |acc, p| &acc + p)
    }
}
