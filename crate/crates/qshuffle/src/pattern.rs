//! Restricted event spaces of the shuffling model.
//!
//! A pattern names the event space of trajectories that are *leftmost* at
//! every time in `I` (the inserted maximum reaches the front, swap count
//! `i_k = k`) and *anti-leftmost* at every time in `J` (it does not,
//! `i_k < k`); all other times are free. `I` and `J` are disjoint finite
//! sets of positive times, with an optional flag extending `J` by every
//! remaining time up to the evaluation horizon — the finite-horizon reading
//! of an anti-leftmost constraint on all of `[1, oo)`.
//!
//! The probability of such an event is the product
//! `prod_{i in I} q^i * prod_{j in J} (1 - q^j)`, independent of the state
//! the process is in when each constraint applies.

use std::collections::BTreeSet;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::qseries::{NumericQ, TruncatedSeries};
use crate::shuffle::Shuffle;

/// Constraint placed on a single time step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mark {
    /// `▷` — the inserted maximum must reach the front.
    Leftmost,
    /// `◁` — the inserted maximum must not reach the front.
    AntiLeftmost,
    /// `◊` — no restriction.
    Free,
}

impl std::fmt::Display for Mark {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mark::Leftmost => "▷",
            Mark::AntiLeftmost => "◁",
            Mark::Free => "◊",
        })
    }
}

/// A pair of disjoint time sets `(I, J)` naming an event space, plus the
/// horizon-extension convention for `J`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pattern {
    leftmost: BTreeSet<usize>,
    anti_leftmost: BTreeSet<usize>,
    j_to_horizon: bool,
}

impl Pattern {
    /// Builds a pattern from leftmost times `I` and anti-leftmost times `J`.
    ///
    /// Times must be positive (Time 0 has no step) and the sets disjoint.
    /// With `j_to_horizon`, `J` is read as `J ∪ [max(I ∪ J)+1, K]` at every
    /// evaluation horizon `K`; the extension starts past all explicit times,
    /// so it can never collide with `I`.
    pub fn new(
        leftmost: impl IntoIterator<Item = usize>,
        anti_leftmost: impl IntoIterator<Item = usize>,
        j_to_horizon: bool,
    ) -> Result<Self> {
        let leftmost: BTreeSet<usize> = leftmost.into_iter().collect();
        let anti_leftmost: BTreeSet<usize> = anti_leftmost.into_iter().collect();
        if leftmost.contains(&0) || anti_leftmost.contains(&0) {
            return Err(Error::PatternTimeZero);
        }
        if let Some(&time) = leftmost.intersection(&anti_leftmost).next() {
            return Err(Error::PatternOverlap { time });
        }
        Ok(Pattern {
            leftmost,
            anti_leftmost,
            j_to_horizon,
        })
    }

    /// The unrestricted pattern `(∅, ∅)`: the whole sample space.
    pub fn free() -> Self {
        Pattern {
            leftmost: BTreeSet::new(),
            anti_leftmost: BTreeSet::new(),
            j_to_horizon: false,
        }
    }

    /// The event "no time is ever leftmost": `(∅, [1, K])` at every horizon.
    pub fn never_leftmost() -> Self {
        Pattern {
            leftmost: BTreeSet::new(),
            anti_leftmost: BTreeSet::new(),
            j_to_horizon: true,
        }
    }

    pub fn leftmost_times(&self) -> &BTreeSet<usize> {
        &self.leftmost
    }

    pub fn anti_leftmost_times(&self) -> &BTreeSet<usize> {
        &self.anti_leftmost
    }

    pub fn extends_to_horizon(&self) -> bool {
        self.j_to_horizon
    }

    /// Largest explicitly constrained time (0 when both sets are empty).
    pub fn max_explicit_time(&self) -> usize {
        let max_left = self.leftmost.iter().next_back().copied().unwrap_or(0);
        let max_anti = self.anti_leftmost.iter().next_back().copied().unwrap_or(0);
        max_left.max(max_anti)
    }

    /// First time covered by the horizon extension (when enabled).
    pub fn extension_start(&self) -> usize {
        self.max_explicit_time() + 1
    }

    /// Checks that every explicit time fits below the horizon.
    pub fn require_within(&self, horizon: usize) -> Result<()> {
        let time = self.max_explicit_time();
        if time > horizon {
            Err(Error::BeyondHorizon { time, horizon })
        } else {
            Ok(())
        }
    }

    // Anti-leftmost times effective at the given horizon, extension included.
    fn effective_anti_leftmost(&self, horizon: usize) -> impl Iterator<Item = usize> + '_ {
        let extension_start = if self.j_to_horizon {
            self.extension_start()
        } else {
            horizon + 1 // empty extension
        };
        self.anti_leftmost
            .iter()
            .copied()
            .chain(extension_start..=horizon)
    }

    // Membership of a time in J, extension read as unbounded.
    fn is_anti_leftmost_time(&self, time: usize) -> bool {
        self.anti_leftmost.contains(&time)
            || (self.j_to_horizon && time >= self.extension_start())
    }

    /// The per-time marks `(□_1, ..., □_K)` this pattern induces.
    pub fn marks(&self, horizon: usize) -> Result<Vec<Mark>> {
        self.require_within(horizon)?;
        Ok((1..=horizon)
            .map(|time| {
                if self.leftmost.contains(&time) {
                    Mark::Leftmost
                } else if self.is_anti_leftmost_time(time) {
                    Mark::AntiLeftmost
                } else {
                    Mark::Free
                }
            })
            .collect())
    }

    /// Event membership: decodes the trajectory and demands `i_t = t` at
    /// every leftmost time and `i_t < t` at every anti-leftmost time.
    ///
    /// Panics if the pattern constrains a time past the shuffle's horizon.
    pub fn contains(&self, shuffle: &Shuffle) -> bool {
        let horizon = shuffle.horizon();
        self.require_within(horizon)
            .expect("pattern constrains a time beyond the shuffle's horizon");
        let swap_counts = shuffle.decode_trajectory();
        for &time in &self.leftmost {
            if swap_counts[time - 1] != time {
                return false;
            }
        }
        for time in self.effective_anti_leftmost(horizon) {
            if swap_counts[time - 1] >= time {
                return false;
            }
        }
        true
    }

    /// The product-form probability `prod_{i in I} q^i * prod_{j in J} (1-q^j)`
    /// at the given horizon, exact modulo `q^order`.
    pub fn event_probability(&self, horizon: usize, order: usize) -> TruncatedSeries {
        self.require_within(horizon)
            .expect("pattern constrains a time beyond the horizon");
        let leftmost_weight: usize = self.leftmost.iter().sum();
        let mut probability = TruncatedSeries::monomial(order, 1, leftmost_weight);
        for time in self.effective_anti_leftmost(horizon) {
            if time >= order {
                continue; // factor is 1 modulo q^order
            }
            probability = &probability - &probability.scale_shift(1, time);
        }
        probability
    }

    /// The same product evaluated at a numeric `q`.
    pub fn numeric_probability(&self, horizon: usize, q: NumericQ) -> f64 {
        self.require_within(horizon)
            .expect("pattern constrains a time beyond the horizon");
        let q = q.value();
        let from_leftmost: f64 = self
            .leftmost
            .iter()
            .map(|&time| q.powi(time as i32))
            .product();
        let from_anti: f64 = self
            .effective_anti_leftmost(horizon)
            .map(|time| 1.0 - q.powi(time as i32))
            .product();
        from_leftmost * from_anti
    }

    /// Splits the event over a set of free times: every way of marking each
    /// split time leftmost or anti-leftmost, `2^n` patterns in total. They
    /// partition this pattern's event space.
    pub fn split(&self, times: &BTreeSet<usize>) -> Result<Vec<Pattern>> {
        for &time in times {
            if time == 0 {
                return Err(Error::PatternTimeZero);
            }
            let taken = self.leftmost.contains(&time)
                || self.is_anti_leftmost_time(time);
            if taken {
                return Err(Error::SplitOverlap { time });
            }
        }
        let ordered: Vec<usize> = times.iter().copied().collect();
        let mut parts = Vec::with_capacity(1 << ordered.len());
        for assignment in 0u64..(1 << ordered.len()) {
            let mut part = self.clone();
            for (bit, &time) in ordered.iter().enumerate() {
                if assignment & (1 << bit) != 0 {
                    part.leftmost.insert(time);
                } else {
                    part.anti_leftmost.insert(time);
                }
            }
            parts.push(part);
        }
        Ok(parts)
    }
}

/// Sufficient condition for two event spaces to be disjoint: some time is
/// leftmost in one pattern and anti-leftmost in the other.
///
/// One-sided: a `false` does not certify that the events overlap.
pub fn patterns_disjoint(a: &Pattern, b: &Pattern) -> bool {
    let conflict = |left: &Pattern, right: &Pattern| {
        left.leftmost
            .iter()
            .any(|&time| right.is_anti_leftmost_time(time))
    };
    conflict(a, b) || conflict(b, a)
}

/// Whether two leftmost sets carry the same total weight `sum_{i in I} i`,
/// given a common `J` disjoint from both. Equal weights force equal event
/// probabilities, since the `I`-part contributes the single monomial
/// `q^{sum I}`.
pub fn equal_index_sums(
    first: &BTreeSet<usize>,
    second: &BTreeSet<usize>,
    common_anti: &BTreeSet<usize>,
) -> Result<bool> {
    for set in [first, second] {
        if let Some(&time) = set.intersection(common_anti).next() {
            return Err(Error::PatternOverlap { time });
        }
    }
    Ok(first.iter().sum::<usize>() == second.iter().sum::<usize>())
}

// JSON form: {"I": [..], "J": [..], "J_to_horizon": bool}.
#[derive(Serialize, Deserialize)]
struct PatternRepr {
    #[serde(rename = "I")]
    leftmost: Vec<usize>,
    #[serde(rename = "J")]
    anti_leftmost: Vec<usize>,
    #[serde(rename = "J_to_horizon", default)]
    j_to_horizon: bool,
}

impl Serialize for Pattern {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        PatternRepr {
            leftmost: self.leftmost.iter().copied().collect(),
            anti_leftmost: self.anti_leftmost.iter().copied().collect(),
            j_to_horizon: self.j_to_horizon,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Pattern {
    fn deserialize<D: Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let repr = PatternRepr::deserialize(deserializer)?;
        Pattern::new(repr.leftmost, repr.anti_leftmost, repr.j_to_horizon)
            .map_err(serde::de::Error::custom)
    }
}
