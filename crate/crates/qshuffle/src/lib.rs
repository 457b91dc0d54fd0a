//! Exact verification of Euler's pentagonal number theorem through an
//! insertion-shuffling Markov model.
//!
//! The model builds a random permutation one element at a time: at time `k`
//! the new maximum is appended on the right and repeatedly swaps left with
//! probability `q`, stopping at the first failed swap or at the front. Every
//! probability in sight is then an integer polynomial in `q`, so the whole
//! theory can be checked *exactly*, modulo `q^T`:
//!
//! - [`qseries`] is the truncated power-series ring over arbitrary-precision
//!   integers, with the q-Pochhammer products and the pentagonal sum;
//! - [`shuffle`] is the Markov model itself — step distributions, insertion,
//!   predecessor recovery, trajectory decoding and probabilities;
//! - [`pattern`] names the restricted events "leftmost at all times in `I`,
//!   never leftmost at any time in `J`" and carries their product-form
//!   probabilities;
//! - [`oracle`] enumerates the complete distribution at small horizons as a
//!   brute-force ground truth;
//! - [`identities`] checks the recursion chain that proves the theorem, in
//!   both its event-probability and pure q-series forms;
//! - [`montecarlo`] cross-validates the exact formulas by simulating the
//!   process at a numeric `q`.
//!
//! All values are immutable after construction and all operations are pure
//! functions, so everything here is safe to share across threads.

pub mod error;
pub mod identities;
pub mod montecarlo;
pub mod oracle;
pub mod pattern;
pub mod qseries;
pub mod shuffle;

pub use error::{Error, Result};
pub use identities::{
    check_euler_induction, check_pnt, check_prob_induction, lhs_prob_induction,
    rhs_euler_induction, rhs_prob_induction, tail_term, IdentityReport,
};
pub use montecarlo::{
    estimate_event, estimate_event_with_workers, sample_trajectory, trial_rng, McConfig,
    McEstimate,
};
pub use oracle::{check_base_case_partition, DistributionTable, DEFAULT_ENUMERATION_CAP};
pub use pattern::{equal_index_sums, patterns_disjoint, Mark, Pattern};
pub use qseries::{
    eval_euler_function, EulerEval, NumericQ, PochhammerLength, TruncatedSeries,
};
pub use shuffle::{all_shuffles, Shuffle, StepDistribution};
