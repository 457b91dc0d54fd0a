//! The identity chain behind the pentagonal number theorem, verified exactly
//! modulo `q^T`.
//!
//! Three layers are checked against each other:
//!
//! 1. the truncated recursion: for every depth `N`, the never-leftmost
//!    probability `prod_{j>=1}(1-q^j)` equals a signed partial sum of
//!    pentagonal-weight event probabilities minus a tail of event
//!    probabilities over `k >= 1`;
//! 2. the same recursion written purely in q-series language, with the tail
//!    terms in the closed form `q^{(1+N)(2k+2+3N)/2} (q^{1+N}; q)_k`;
//! 3. the pentagonal number theorem itself, `(q;q)_inf` against the
//!    bilateral pentagonal sum.
//!
//! The two tail routes (event-probability product vs. closed form) are kept
//! independent so [`tail_term`] can cross-check them coefficient by
//! coefficient.

use std::fmt;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::pattern::Pattern;
use crate::qseries::{PochhammerLength, TruncatedSeries};

/// First coefficient where two sides of an identity disagree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoefficientMismatch {
    pub exponent: usize,
    pub lhs: BigInt,
    pub rhs: BigInt,
}

/// Outcome of one identity check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityReport {
    pub name: String,
    /// Induction depth `N`, when the identity is indexed by one.
    pub depth: Option<usize>,
    /// Truncation order `T` the comparison ran at.
    pub order: usize,
    pub holds: bool,
    /// Only the first mismatch is kept, to bound the output.
    pub first_mismatch: Option<CoefficientMismatch>,
    pub runtime: Duration,
}

impl fmt::Display for IdentityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)?;
        if let Some(depth) = self.depth {
            write!(f, " N={depth}")?;
        }
        write!(f, " T={}: ", self.order)?;
        match &self.first_mismatch {
            None => write!(f, "holds")?,
            Some(m) => write!(
                f,
                "FAILS at q^{} (lhs {}, rhs {})",
                m.exponent, m.lhs, m.rhs
            )?,
        }
        write!(f, " ({} ms)", self.runtime.as_millis())
    }
}

// JSON form: {"name":..., "N":..., "T":..., "holds":..., "first_mismatch":
// {"exponent":..., "lhs":"...", "rhs":"..."} | null, "runtime_ms":...}
impl Serialize for IdentityReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct MismatchRepr {
            exponent: usize,
            lhs: String,
            rhs: String,
        }
        let mut state = serializer.serialize_struct("IdentityReport", 6)?;
        state.serialize_field("name", &self.name)?;
        state.serialize_field("N", &self.depth)?;
        state.serialize_field("T", &self.order)?;
        state.serialize_field("holds", &self.holds)?;
        let mismatch = self.first_mismatch.as_ref().map(|m| MismatchRepr {
            exponent: m.exponent,
            lhs: m.lhs.to_string(),
            rhs: m.rhs.to_string(),
        });
        state.serialize_field("first_mismatch", &mismatch)?;
        state.serialize_field("runtime_ms", &(self.runtime.as_millis() as u64))?;
        state.end()
    }
}

/// Compares two series coefficient-wise and reports the first mismatch.
pub fn compare_identity(
    name: &str,
    depth: Option<usize>,
    lhs: &TruncatedSeries,
    rhs: &TruncatedSeries,
    started: Instant,
) -> IdentityReport {
    assert_eq!(lhs.order(), rhs.order(), "identity sides must share an order");
    let first_mismatch = lhs
        .coeffs()
        .iter()
        .zip(rhs.coeffs())
        .enumerate()
        .find(|(_, (a, b))| a != b)
        .map(|(exponent, (a, b))| CoefficientMismatch {
            exponent,
            lhs: a.clone(),
            rhs: b.clone(),
        });
    IdentityReport {
        name: name.to_owned(),
        depth,
        order: lhs.order(),
        holds: first_mismatch.is_none(),
        first_mismatch,
        runtime: started.elapsed(),
    }
}

/// Left side of the recursion: the never-leftmost probability, whose finite
/// shadow modulo `q^T` is `prod_{j=1}^{T-1} (1 - q^j) = (q;q)_inf`.
pub fn lhs_prob_induction(order: usize) -> TruncatedSeries {
    TruncatedSeries::pochhammer(1, PochhammerLength::Infinite, order)
}

// Minimal exponent contributed by the depth-N tail term at index k: the
// leftmost weight sum_{i=k+1+N}^{k+1+2N} i = (1+N)(2k+2+3N)/2. Terms with
// this at or above the order vanish modulo q^T, which cuts the k-sum.
fn tail_min_exponent(depth: usize, k: usize) -> usize {
    (1 + depth) * (2 * k + 2 + 3 * depth) / 2
}

// Signed accumulation: even parity adds, odd subtracts.
fn accumulate_signed(acc: &TruncatedSeries, term: &TruncatedSeries, parity: usize) -> TruncatedSeries {
    if parity.is_multiple_of(2) {
        acc + term
    } else {
        acc - term
    }
}

/// Right side of the recursion at depth `N`, built from event probabilities:
///
/// `sum_{n=0}^{N} (-1)^n (P([n+1,2n], ∅) - P([n+1,2n+1], ∅))
///  - (-1)^N sum_{k>=1} P([k+1+N, k+1+2N], [1+N, k+N])`
///
/// The `k`-sum stops once its minimal exponent reaches the order.
pub fn rhs_prob_induction(depth: usize, order: usize) -> TruncatedSeries {
    let mut rhs = TruncatedSeries::zero(order);
    for n in 0..=depth {
        let shallow = Pattern::new(n + 1..=2 * n, [], false).expect("ranges are disjoint");
        let deep = Pattern::new(n + 1..=2 * n + 1, [], false).expect("ranges are disjoint");
        let horizon = 2 * n + 1;
        let term = &shallow.event_probability(horizon, order)
            - &deep.event_probability(horizon, order);
        rhs = accumulate_signed(&rhs, &term, n);
    }
    let mut k = 1;
    while tail_min_exponent(depth, k) < order {
        let pattern = Pattern::new(k + 1 + depth..=k + 1 + 2 * depth, 1 + depth..=k + depth, false)
            .expect("tail index sets are disjoint");
        let term = pattern.event_probability(k + 1 + 2 * depth, order);
        // subtracting (-1)^N times the tail
        rhs = accumulate_signed(&rhs, &term, depth + 1);
        k += 1;
    }
    rhs
}

/// Right side of the recursion at depth `N` in pure q-series form:
///
/// `sum_{n=0}^{N} (-1)^n (q^{n(3n+1)/2} - q^{(n+1)(3n+2)/2})
///  - (-1)^N sum_{k>=1} q^{(1+N)(2k+2+3N)/2} (q^{1+N}; q)_k`
pub fn rhs_euler_induction(depth: usize, order: usize) -> TruncatedSeries {
    let mut rhs = TruncatedSeries::zero(order);
    for n in 0..=depth {
        let term = &TruncatedSeries::monomial(order, 1, n * (3 * n + 1) / 2)
            - &TruncatedSeries::monomial(order, 1, (n + 1) * (3 * n + 2) / 2);
        rhs = accumulate_signed(&rhs, &term, n);
    }
    // (q^{1+N}; q)_k grows one factor per k, so build it incrementally.
    let mut pochhammer = TruncatedSeries::one(order);
    let mut k = 1;
    while tail_min_exponent(depth, k) < order {
        let factor = &TruncatedSeries::one(order)
            - &TruncatedSeries::monomial(order, 1, depth + k);
        pochhammer = &pochhammer * &factor;
        let term = pochhammer.scale_shift(1, tail_min_exponent(depth, k));
        rhs = accumulate_signed(&rhs, &term, depth + 1);
        k += 1;
    }
    rhs
}

/// One tail term, computed along both routes and cross-checked: the event
/// probability of `([k+1+N, k+1+2N], [1+N, k+N])` against the closed form
/// `q^{(1+N)(2k+2+3N)/2} (q^{1+N}; q)_k`.
///
/// A disagreement is an implementation bug and comes back as an error.
pub fn tail_term(depth: usize, k: usize, order: usize) -> Result<TruncatedSeries> {
    assert!(k >= 1, "tail terms are indexed from k = 1");
    let pattern = Pattern::new(k + 1 + depth..=k + 1 + 2 * depth, 1 + depth..=k + depth, false)
        .expect("tail index sets are disjoint");
    let from_product = pattern.event_probability(k + 1 + 2 * depth, order);
    let from_closed_form = TruncatedSeries::pochhammer(1 + depth, PochhammerLength::Finite(k), order)
        .scale_shift(1, tail_min_exponent(depth, k));
    if let Some((exponent, (lhs, rhs))) = from_product
        .coeffs()
        .iter()
        .zip(from_closed_form.coeffs())
        .enumerate()
        .find(|(_, (a, b))| a != b)
    {
        return Err(Error::TailTermMismatch {
            depth,
            k,
            exponent,
            product_coeff: lhs.to_string(),
            closed_coeff: rhs.to_string(),
        });
    }
    Ok(from_product)
}

/// Checks the pentagonal number theorem at the given order:
/// `prod_{j>=1}(1-q^j)` against `sum_{n in Z} (-1)^n q^{n(3n+1)/2}`.
pub fn check_pnt(order: usize) -> IdentityReport {
    let started = Instant::now();
    let product = TruncatedSeries::euler_function(order);
    let sum = TruncatedSeries::pentagonal_sum(order);
    compare_identity("pentagonal-number-theorem", None, &product, &sum, started)
}

/// Checks the probabilistic recursion for every depth `N = 0..=max_depth`.
pub fn check_prob_induction(max_depth: usize, order: usize) -> Vec<IdentityReport> {
    (0..=max_depth)
        .map(|depth| {
            let started = Instant::now();
            let lhs = lhs_prob_induction(order);
            let rhs = rhs_prob_induction(depth, order);
            compare_identity("prob-induction", Some(depth), &lhs, &rhs, started)
        })
        .collect()
}

/// Checks the q-series recursion for every depth, and additionally that it
/// matches the event-probability route coefficient-wise at each depth.
pub fn check_euler_induction(max_depth: usize, order: usize) -> Vec<IdentityReport> {
    let mut reports = Vec::with_capacity(2 * (max_depth + 1));
    for depth in 0..=max_depth {
        let started = Instant::now();
        let lhs = TruncatedSeries::euler_function(order);
        let rhs = rhs_euler_induction(depth, order);
        reports.push(compare_identity(
            "euler-induction",
            Some(depth),
            &lhs,
            &rhs,
            started,
        ));

        let started = Instant::now();
        let from_events = rhs_prob_induction(depth, order);
        let from_series = rhs_euler_induction(depth, order);
        reports.push(compare_identity(
            "euler-vs-prob-induction",
            Some(depth),
            &from_series,
            &from_events,
            started,
        ));
    }
    reports
}
