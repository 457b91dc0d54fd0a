//! Brute-force ground truth for small horizons.
//!
//! [`DistributionTable`] enumerates every shuffle of `[0, K]` together with
//! its exact probability polynomial by unrolling the Markov recursion level
//! by level. Summing member rows gives an event probability computed with no
//! reference to the product formula, which is what makes it an oracle.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::pattern::Pattern;
use crate::qseries::TruncatedSeries;
use crate::shuffle::{all_shuffles, Shuffle, StepDistribution};

/// Default ceiling for full enumeration; `(K+1)!` rows grow fast.
pub const DEFAULT_ENUMERATION_CAP: usize = 8;

fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

/// The complete distribution of the time-`K` model: every shuffle of
/// `[0, K]` mapped to its exact probability polynomial.
#[derive(Debug, Clone)]
pub struct DistributionTable {
    horizon: usize,
    order: usize,
    rows: BTreeMap<Shuffle, TruncatedSeries>,
}

impl DistributionTable {
    /// Enumerates the full distribution at the default cap.
    pub fn enumerate(horizon: usize, order: usize) -> Result<Self> {
        Self::enumerate_with_cap(horizon, order, DEFAULT_ENUMERATION_CAP)
    }

    /// Enumerates with an explicit cap for callers who accept the cost.
    pub fn enumerate_with_cap(horizon: usize, order: usize, cap: usize) -> Result<Self> {
        if horizon > cap {
            return Err(Error::EnumerationCap {
                horizon,
                cap,
                rows: factorial(horizon + 1),
            });
        }
        let needed = horizon * (horizon + 1) / 2;
        if order <= needed {
            return Err(Error::OrderTooSmall { order, needed });
        }
        let mut level: Vec<(Shuffle, TruncatedSeries)> =
            vec![(Shuffle::initial(), TruncatedSeries::one(order))];
        for time in 1..=horizon {
            let step = StepDistribution::new(time, order);
            let mut next = Vec::with_capacity(level.len() * (time + 1));
            for (shuffle, probability) in &level {
                for swap_count in 0..=time {
                    next.push((
                        shuffle.apply_insertion(swap_count),
                        probability * step.prob(swap_count),
                    ));
                }
            }
            level = next;
        }
        Ok(DistributionTable {
            horizon,
            order,
            rows: level.into_iter().collect(),
        })
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Number of rows, always `(K+1)!`.
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Rows in lexicographic shuffle order.
    pub fn rows(&self) -> impl Iterator<Item = (&Shuffle, &TruncatedSeries)> {
        self.rows.iter()
    }

    pub fn probability(&self, shuffle: &Shuffle) -> Option<&TruncatedSeries> {
        self.rows.get(shuffle)
    }

    /// Sum of every row; the unit polynomial when the table is consistent.
    pub fn total_probability(&self) -> TruncatedSeries {
        self.rows
            .values()
            .fold(TruncatedSeries::zero(self.order), |acc, p| &acc + p)
    }

    /// Oracle event probability: the sum of the member rows. Independent of
    /// the product formula by construction.
    pub fn event_probability(&self, pattern: &Pattern) -> Result<TruncatedSeries> {
        pattern.require_within(self.horizon)?;
        Ok(self
            .rows
            .iter()
            .filter(|(shuffle, _)| pattern.contains(shuffle))
            .fold(TruncatedSeries::zero(self.order), |acc, (_, p)| &acc + p))
    }

    /// The member shuffles of an event, in lexicographic order.
    pub fn event_set(&self, pattern: &Pattern) -> Result<Vec<&Shuffle>> {
        pattern.require_within(self.horizon)?;
        Ok(self
            .rows
            .keys()
            .filter(|shuffle| pattern.contains(shuffle))
            .collect())
    }
}

/// Verifies the base-case partition of the sample space: every shuffle of
/// `[0, K]` lies in exactly one of `(∅, [1, K])` and `({k}, [1, k-1])` for
/// `k = 1..=K`, the "first leftmost time" decomposition.
pub fn check_base_case_partition(horizon: usize) -> bool {
    let mut parts = vec![Pattern::never_leftmost()];
    for time in 1..=horizon {
        parts.push(Pattern::new([time], 1..time, false).expect("disjoint by construction"));
    }
    all_shuffles(horizon).iter().all(|shuffle| {
        parts.iter().filter(|part| part.contains(shuffle)).count() == 1
    })
}
