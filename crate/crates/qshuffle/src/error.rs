//! Error type shared by the library.

use thiserror::Error;

/// Errors produced by fallible constructors and enumeration routines.
///
/// Precondition violations in the pure arithmetic layer (order mismatches,
/// out-of-range swap counts) panic instead; see the individual operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The entries are not a permutation of `0..=k`.
    #[error("entries {entries:?} are not a shuffle of [0,{}]", .entries.len().saturating_sub(1))]
    InvalidShuffle { entries: Vec<usize> },

    /// Text that could not be parsed as a shuffle.
    #[error("cannot parse {text:?} as a shuffle; expected e.g. \"(2,0,3,1)\"")]
    ShuffleParse { text: String },

    /// A time appears in both the leftmost and anti-leftmost sets.
    #[error("time {time} appears in both I and J; the sets must be disjoint")]
    PatternOverlap { time: usize },

    /// Pattern times must be positive (Time 0 carries no shuffling step).
    #[error("pattern times must be >= 1, got 0")]
    PatternTimeZero,

    /// A constrained time exceeds the horizon it is evaluated at.
    #[error("pattern constrains time {time} but the horizon is {horizon}")]
    BeyondHorizon { time: usize, horizon: usize },

    /// A split set collides with the pattern's constrained times.
    #[error("split time {time} is not free in the pattern")]
    SplitOverlap { time: usize },

    /// Full enumeration grows as (K+1)!; refuse past the cap.
    #[error(
        "enumeration horizon {horizon} exceeds cap {cap}: the table has (K+1)! rows \
         ({rows} at K={horizon}); raise the cap explicitly if you mean it"
    )]
    EnumerationCap { horizon: usize, cap: usize, rows: u128 },

    /// The truncation order is too small to hold every computed exponent.
    #[error("truncation order {order} too small; this computation needs order > {needed}")]
    OrderTooSmall { order: usize, needed: usize },

    /// A numeric q outside the open interval (0, 1).
    #[error("q must satisfy 0 < q < 1, got {value}")]
    NumericQOutOfRange { value: f64 },

    /// Monte Carlo configuration with no trials or an empty horizon.
    #[error("Monte Carlo config requires trials >= 1 and horizon >= 1")]
    InvalidMcConfig,

    /// The two routes to a tail term disagree; this signals an implementation bug.
    #[error(
        "tail term (depth {depth}, k {k}) mismatch at q^{exponent}: \
         product form {product_coeff}, closed form {closed_coeff}"
    )]
    TailTermMismatch {
        depth: usize,
        k: usize,
        exponent: usize,
        product_coeff: String,
        closed_coeff: String,
    },
}

/// Library-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
