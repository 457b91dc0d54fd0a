//! Exact truncated power series in `q` over the integers.
//!
//! Every identity in this crate lives in the ring `Z[[q]] / q^T`: a series is
//! known modulo `q^T` and carries exactly `T` arbitrary-precision integer
//! coefficients. Arithmetic is exact — infinite products and sums are cut by
//! dropping factors/terms whose lowest-degree contribution is `>= T`, which
//! loses nothing modulo `q^T`.
//!
//! The module also provides the named series the identities are built from
//! (q-Pochhammer products, the pentagonal sum) and a floating-point evaluator
//! of the infinite Euler product for the Monte Carlo cross-checks.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A power series in `q` with exact integer coefficients, known modulo `q^T`.
///
/// The truncation order `T` is fixed per value. Mixing orders in arithmetic
/// is a bug, not a request for re-truncation, and panics.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TruncatedSeries {
    order: usize,
    coeffs: Vec<BigInt>,
}

impl TruncatedSeries {
    /// The zero series of the given order.
    pub fn zero(order: usize) -> Self {
        assert!(order >= 1, "truncation order must be >= 1");
        TruncatedSeries {
            order,
            coeffs: vec![BigInt::zero(); order],
        }
    }

    /// The multiplicative identity `1` of the given order.
    pub fn one(order: usize) -> Self {
        let mut series = TruncatedSeries::zero(order);
        series.coeffs[0] = BigInt::one();
        series
    }

    /// The monomial `c * q^e`, truncated (zero if `exponent >= order`).
    pub fn monomial<C: Into<BigInt>>(order: usize, coeff: C, exponent: usize) -> Self {
        let mut series = TruncatedSeries::zero(order);
        if exponent < order {
            series.coeffs[exponent] = coeff.into();
        }
        series
    }

    /// Builds a series from explicit coefficients; the order is their count.
    pub fn from_coeffs(coeffs: Vec<BigInt>) -> Self {
        assert!(!coeffs.is_empty(), "truncation order must be >= 1");
        TruncatedSeries {
            order: coeffs.len(),
            coeffs,
        }
    }

    /// Convenience constructor from machine integers, mostly for tests.
    pub fn from_i64_coeffs(coeffs: &[i64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// The truncation order `T`.
    pub fn order(&self) -> usize {
        self.order
    }

    /// The coefficient of `q^n`; panics for `n >= order` (unknown mod `q^T`).
    pub fn coeff(&self, n: usize) -> &BigInt {
        assert!(
            n < self.order,
            "coefficient of q^{n} is unknown modulo q^{}",
            self.order
        );
        &self.coeffs[n]
    }

    /// All `T` coefficients, constant term first.
    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Reduces to a smaller order by dropping high coefficients.
    ///
    /// Truncation is a ring homomorphism, so a single high-order computation
    /// certifies the identity at every smaller order.
    pub fn truncated(&self, new_order: usize) -> Self {
        assert!(
            new_order >= 1 && new_order <= self.order,
            "cannot truncate order {} to {}",
            self.order,
            new_order
        );
        TruncatedSeries {
            order: new_order,
            coeffs: self.coeffs[..new_order].to_vec(),
        }
    }

    /// Multiplies by the monomial `c * q^e`: `result_n = c * a_{n-e}`.
    pub fn scale_shift<C: Into<BigInt>>(&self, scale: C, shift: usize) -> Self {
        let scale = scale.into();
        let mut coeffs = vec![BigInt::zero(); self.order];
        if shift < self.order {
            for (target, source) in coeffs[shift..].iter_mut().zip(&self.coeffs) {
                *target = &scale * source;
            }
        }
        TruncatedSeries {
            order: self.order,
            coeffs,
        }
    }

    // In-place multiply by (1 - q^m). Sparse: O(T) instead of the O(T^2)
    // Cauchy product, which is what keeps the order-1000 runs fast.
    fn mul_one_minus_q_pow(&mut self, m: usize) {
        if m == 0 {
            // (1 - q^0) = 0
            for c in &mut self.coeffs {
                c.set_zero();
            }
            return;
        }
        if m >= self.order {
            return; // factor is 1 modulo q^T
        }
        for n in (m..self.order).rev() {
            let delta = self.coeffs[n - m].clone();
            self.coeffs[n] -= delta;
        }
    }

    /// The q-Pochhammer symbol `(q^a; q)_n = prod_{j=0}^{n-1} (1 - q^{a+j})`,
    /// modulo `q^T`.
    ///
    /// With `PochhammerLength::Infinite` the product runs over every factor
    /// whose exponent is below the order; later factors are `1` mod `q^T`.
    /// Only monomial arguments `q^a` with `a >= 1` arise here, so `a = 0`
    /// (which would zero the whole product) is rejected with a panic.
    pub fn pochhammer(base_exponent: usize, length: PochhammerLength, order: usize) -> Self {
        assert!(base_exponent >= 1, "pochhammer base exponent must be >= 1");
        let mut series = TruncatedSeries::one(order);
        let factors: Box<dyn Iterator<Item = usize>> = match length {
            PochhammerLength::Finite(n) => Box::new((0..n).map(|j| base_exponent + j)),
            PochhammerLength::Infinite => Box::new(base_exponent..order),
        };
        for exponent in factors {
            if exponent >= order {
                continue;
            }
            series.mul_one_minus_q_pow(exponent);
        }
        series
    }

    /// The Euler function `(q; q)_inf` modulo `q^T`.
    pub fn euler_function(order: usize) -> Self {
        Self::pochhammer(1, PochhammerLength::Infinite, order)
    }

    /// The bilateral pentagonal sum `sum_{n in Z} (-1)^n q^{n(3n+1)/2}`,
    /// modulo `q^T`.
    ///
    /// Both signs of `n` contribute: the exponents are the generalized
    /// pentagonal numbers 0, 1, 2, 5, 7, 12, 15, ...
    pub fn pentagonal_sum(order: usize) -> Self {
        let mut series = TruncatedSeries::zero(order);
        series.coeffs[0] = BigInt::one(); // n = 0
        let mut n: usize = 1;
        loop {
            let from_positive = n * (3 * n + 1) / 2;
            let from_negative = n * (3 * n - 1) / 2;
            if from_negative >= order {
                break;
            }
            let sign = if n.is_multiple_of(2) {
                BigInt::one()
            } else {
                -BigInt::one()
            };
            series.coeffs[from_negative] = sign.clone();
            if from_positive < order {
                series.coeffs[from_positive] = sign;
            }
            n += 1;
        }
        series
    }
}

/// Number of factors in a q-Pochhammer product.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PochhammerLength {
    Finite(usize),
    Infinite,
}

fn assert_same_order(a: &TruncatedSeries, b: &TruncatedSeries) {
    assert_eq!(
        a.order, b.order,
        "series order mismatch: {} vs {} (re-truncate explicitly if intended)",
        a.order, b.order
    );
}

impl Add for &TruncatedSeries {
    type Output = TruncatedSeries;

    fn add(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        assert_same_order(self, rhs);
        let coeffs = self
            .coeffs
            .iter()
            .zip(&rhs.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        TruncatedSeries {
            order: self.order,
            coeffs,
        }
    }
}

impl Sub for &TruncatedSeries {
    type Output = TruncatedSeries;

    fn sub(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        assert_same_order(self, rhs);
        let coeffs = self
            .coeffs
            .iter()
            .zip(&rhs.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        TruncatedSeries {
            order: self.order,
            coeffs,
        }
    }
}

impl Mul for &TruncatedSeries {
    type Output = TruncatedSeries;

    /// Cauchy product truncated at `T`: `c_n = sum_{i+j=n} a_i b_j`.
    fn mul(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        assert_same_order(self, rhs);
        let mut coeffs = vec![BigInt::zero(); self.order];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().take(self.order - i).enumerate() {
                if !b.is_zero() {
                    coeffs[i + j] += a * b;
                }
            }
        }
        TruncatedSeries {
            order: self.order,
            coeffs,
        }
    }
}

impl Neg for &TruncatedSeries {
    type Output = TruncatedSeries;

    fn neg(self) -> TruncatedSeries {
        TruncatedSeries {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

/// Canonical text form: `1 - q - q^2 + q^5 + O(q^8)`.
impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote_term = false;
        for (exponent, coeff) in self.coeffs.iter().enumerate() {
            if coeff.is_zero() {
                continue;
            }
            let magnitude = coeff.abs();
            if wrote_term {
                write!(f, " {} ", if coeff.is_negative() { "-" } else { "+" })?;
            } else if coeff.is_negative() {
                write!(f, "-")?;
            }
            let unit = magnitude.is_one();
            match (exponent, unit) {
                (0, _) => write!(f, "{magnitude}")?,
                (1, true) => write!(f, "q")?,
                (1, false) => write!(f, "{magnitude}*q")?,
                (_, true) => write!(f, "q^{exponent}")?,
                (_, false) => write!(f, "{magnitude}*q^{exponent}")?,
            }
            wrote_term = true;
        }
        if !wrote_term {
            write!(f, "0")?;
        }
        write!(f, " + O(q^{})", self.order)
    }
}

// JSON form: {"order": T, "coeffs": ["c0", "c1", ...]} with coefficients as
// decimal strings so arbitrary precision survives transport.
#[derive(Serialize, Deserialize)]
struct SeriesRepr {
    order: usize,
    coeffs: Vec<String>,
}

impl Serialize for TruncatedSeries {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        SeriesRepr {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| c.to_string()).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for TruncatedSeries {
    fn deserialize<D: Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let repr = SeriesRepr::deserialize(deserializer)?;
        if repr.order == 0 || repr.coeffs.len() != repr.order {
            return Err(D::Error::custom(format!(
                "series needs exactly `order` coefficients, got {} for order {}",
                repr.coeffs.len(),
                repr.order
            )));
        }
        let coeffs = repr
            .coeffs
            .iter()
            .map(|s| s.parse::<BigInt>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| D::Error::custom(format!("bad coefficient: {e}")))?;
        Ok(TruncatedSeries::from_coeffs(coeffs))
    }
}

/// A real `q` with `0 < q < 1`, the standing assumption of the numeric model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericQ(f64);

impl NumericQ {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && value > 0.0 && value < 1.0 {
            Ok(NumericQ(value))
        } else {
            Err(Error::NumericQOutOfRange { value })
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Result of evaluating the infinite Euler product at a numeric `q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerEval {
    /// The partial product `prod_{j=1}^{J} (1 - q^j)`.
    pub value: f64,
    /// Rigorous bound on `|log(value) - log(true product)|`.
    pub log_tail_bound: f64,
    /// Number of factors multiplied before the tail fell below `eps`.
    pub factors: usize,
}

/// Evaluates `prod_{j>=1} (1 - q^j)` at a numeric `q`.
///
/// Factors are multiplied until `q^j / (1-q) < eps`. The dropped tail then
/// satisfies `sum_{m>=j} -log(1 - q^m) <= q^j / (1-q)^2 < eps / (1-q)`,
/// which is reported as `log_tail_bound`.
pub fn eval_euler_function(q: NumericQ, eps: f64) -> EulerEval {
    assert!(eps > 0.0 && eps.is_finite(), "eps must be a positive real");
    let q = q.value();
    let one_minus_q = 1.0 - q;
    let mut value = 1.0;
    let mut q_pow = q;
    let mut factors = 0usize;
    while q_pow / one_minus_q >= eps {
        value *= 1.0 - q_pow;
        q_pow *= q;
        factors += 1;
    }
    EulerEval {
        value,
        log_tail_bound: q_pow / (one_minus_q * one_minus_q),
        factors,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(coeffs: &[i64]) -> TruncatedSeries {
        TruncatedSeries::from_i64_coeffs(coeffs)
    }

    #[test]
    fn one_has_unit_constant_term() {
        assert_eq!(TruncatedSeries::one(1), series(&[1]));
        assert_eq!(TruncatedSeries::one(3), series(&[1, 0, 0]));
    }

    #[test]
    fn one_is_multiplicative_identity() {
        let s = series(&[3, -1, 0, 7]);
        assert_eq!(&TruncatedSeries::one(4) * &s, s);
        assert_eq!(&s * &TruncatedSeries::one(4), s);
    }

    #[test]
    #[should_panic(expected = "order must be >= 1")]
    fn zero_order_rejected() {
        let _ = TruncatedSeries::one(0);
    }

    #[test]
    fn add_is_coefficientwise() {
        assert_eq!(&series(&[1, -1]) + &series(&[0, 1]), series(&[1, 0]));
        let a = series(&[2, 5, -3]);
        assert_eq!(&a + &TruncatedSeries::zero(3), a);
    }

    #[test]
    fn add_truncates_consistently() {
        // (1 - q) + (q - q^2) at T=2: the q^2 term is already gone mod q^2.
        let one_minus_q = series(&[1, -1]);
        let q_minus_q2 = &TruncatedSeries::monomial(2, 1, 1) - &TruncatedSeries::monomial(2, 1, 2);
        assert_eq!(&one_minus_q + &q_minus_q2, series(&[1, 0]));
    }

    #[test]
    #[should_panic(expected = "order mismatch")]
    fn add_rejects_order_mismatch() {
        let _ = &series(&[1, 0]) + &series(&[1, 0, 0]);
    }

    #[test]
    fn mul_expands_products() {
        // (1-q)(1-q^2) = 1 - q - q^2 + q^3
        let lhs = &series(&[1, -1, 0, 0]) * &series(&[1, 0, -1, 0]);
        assert_eq!(lhs, series(&[1, -1, -1, 1]));
        // telescoping: (1-q)(1+q+q^2+q^3) = 1 - q^4 = 1 mod q^4
        let telescoped = &series(&[1, -1, 0, 0]) * &series(&[1, 1, 1, 1]);
        assert_eq!(telescoped, series(&[1, 0, 0, 0]));
    }

    #[test]
    #[should_panic(expected = "order mismatch")]
    fn mul_rejects_order_mismatch() {
        let _ = &series(&[1]) * &series(&[1, 0]);
    }

    #[test]
    fn scale_shift_moves_and_scales() {
        assert_eq!(series(&[1, 1]).scale_shift(-1, 1), series(&[0, -1]));
        let a = series(&[4, 0, -2]);
        assert_eq!(a.scale_shift(1, 0), a);
        assert_eq!(a.scale_shift(7, 3), TruncatedSeries::zero(3));
        assert_eq!(a.scale_shift(7, 99), TruncatedSeries::zero(3));
    }

    #[test]
    fn pochhammer_single_factor() {
        assert_eq!(
            TruncatedSeries::pochhammer(1, PochhammerLength::Finite(1), 4),
            series(&[1, -1, 0, 0])
        );
    }

    #[test]
    fn pochhammer_two_factors_from_q_squared() {
        // (q^2; q)_2 = (1-q^2)(1-q^3) = 1 - q^2 - q^3 + q^5
        assert_eq!(
            TruncatedSeries::pochhammer(2, PochhammerLength::Finite(2), 6),
            series(&[1, 0, -1, -1, 0, 1])
        );
    }

    #[test]
    fn pochhammer_infinite_matches_brute_force_fold() {
        // Oracle: expand prod_{j=1}^{7} (1 - q^j) with the generic Cauchy
        // product, entirely independent of the sparse update path.
        let mut oracle = TruncatedSeries::one(8);
        for j in 1..8 {
            let factor = &TruncatedSeries::one(8) - &TruncatedSeries::monomial(8, 1, j);
            oracle = &oracle * &factor;
        }
        assert_eq!(oracle, series(&[1, -1, -1, 0, 0, 1, 0, 1]));
        assert_eq!(
            TruncatedSeries::pochhammer(1, PochhammerLength::Infinite, 8),
            oracle
        );
    }

    #[test]
    fn pochhammer_skips_factors_beyond_order() {
        // (q;q)_50 and (q;q)_inf agree mod q^8: factors past q^7 are 1.
        assert_eq!(
            TruncatedSeries::pochhammer(1, PochhammerLength::Finite(50), 8),
            TruncatedSeries::pochhammer(1, PochhammerLength::Infinite, 8)
        );
    }

    #[test]
    #[should_panic(expected = "base exponent must be >= 1")]
    fn pochhammer_rejects_constant_argument() {
        let _ = TruncatedSeries::pochhammer(0, PochhammerLength::Finite(1), 4);
    }

    #[test]
    fn pentagonal_exponents_enumerate_both_signs() {
        // n(3n+1)/2 for n = 0, 1, -1, 2, -2, 3, -3
        let exponent = |n: i64| (n * (3 * n + 1) / 2) as usize;
        assert_eq!(
            [0, 1, -1, 2, -2, 3, -3].map(exponent),
            [0, 2, 1, 7, 5, 15, 12]
        );
    }

    #[test]
    fn pentagonal_sum_first_terms() {
        // 1 - q - q^2 + q^5 + q^7 - q^12
        assert_eq!(
            TruncatedSeries::pentagonal_sum(13),
            series(&[1, -1, -1, 0, 0, 1, 0, 1, 0, 0, 0, 0, -1])
        );
    }

    #[test]
    fn pentagonal_sum_support_is_exactly_pentagonal() {
        // Brute-force oracle: enumerate n directly and record sign by parity.
        let order = 10_000;
        let mut expected = vec![0i64; order];
        for n in 1.. {
            let lo = n * (3 * n - 1) / 2;
            if lo >= order {
                break;
            }
            let hi = n * (3 * n + 1) / 2;
            let sign = if n % 2 == 0 { 1 } else { -1 };
            expected[lo] = sign;
            if hi < order {
                expected[hi] = sign;
            }
        }
        expected[0] = 1;
        let sum = TruncatedSeries::pentagonal_sum(order);
        for (n, coeff) in sum.coeffs().iter().enumerate() {
            assert_eq!(coeff, &BigInt::from(expected[n]), "coefficient of q^{n}");
        }
    }

    #[test]
    fn display_matches_canonical_form() {
        assert_eq!(
            TruncatedSeries::pochhammer(1, PochhammerLength::Infinite, 8).to_string(),
            "1 - q - q^2 + q^5 + q^7 + O(q^8)"
        );
        assert_eq!(TruncatedSeries::zero(3).to_string(), "0 + O(q^3)");
        assert_eq!(series(&[1, -2, 1]).to_string(), "1 - 2*q + q^2 + O(q^3)");
        assert_eq!(series(&[0, -1]).to_string(), "-q + O(q^2)");
        assert_eq!(series(&[0, 0, 3]).to_string(), "3*q^2 + O(q^3)");
    }

    #[test]
    fn json_round_trips_with_big_coefficients() {
        let big: BigInt = "123456789012345678901234567890".parse().unwrap();
        let s = TruncatedSeries::from_coeffs(vec![BigInt::from(-1), big, BigInt::zero()]);
        let json = serde_json::to_string(&s).unwrap();
        assert!(json.contains("\"123456789012345678901234567890\""));
        let back: TruncatedSeries = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn json_rejects_length_mismatch() {
        let bad = r#"{"order": 3, "coeffs": ["1", "0"]}"#;
        assert!(serde_json::from_str::<TruncatedSeries>(bad).is_err());
    }

    #[test]
    fn numeric_q_requires_open_unit_interval() {
        assert!(NumericQ::new(0.5).is_ok());
        for bad in [0.0, 1.0, -0.3, 1.5, f64::NAN] {
            assert!(NumericQ::new(bad).is_err());
        }
    }

    // Independent oracle for the numeric product: multiply a fixed, generous
    // number of factors with no stopping rule.
    fn euler_product_oracle(q: f64) -> f64 {
        (1..=200).fold(1.0, |acc, j| acc * (1.0 - q.powi(j)))
    }

    #[test]
    fn euler_eval_at_half() {
        let eval = eval_euler_function(NumericQ::new(0.5).unwrap(), 1e-12);
        let oracle = euler_product_oracle(0.5);
        assert!((eval.value - oracle).abs() < 1e-12, "got {}", eval.value);
        assert!((eval.value - 0.288_788_095_1).abs() < 1e-9);
    }

    #[test]
    fn euler_eval_near_zero_q_tends_to_one() {
        let eval = eval_euler_function(NumericQ::new(1e-12).unwrap(), 1e-15);
        assert!((eval.value - (1.0 - 1e-12)).abs() < 1e-14);
    }

    #[test]
    fn euler_eval_tail_bound_holds_against_tighter_run() {
        for q in [0.1, 0.5, 0.9, 1f64.tanh()] {
            let coarse = eval_euler_function(NumericQ::new(q).unwrap(), 1e-6);
            let fine = eval_euler_function(NumericQ::new(q).unwrap(), 1e-7);
            let log_gap = (coarse.value.ln() - fine.value.ln()).abs();
            assert!(
                log_gap <= coarse.log_tail_bound + fine.log_tail_bound,
                "q={q}: gap {log_gap} exceeds bound {}",
                coarse.log_tail_bound
            );
        }
    }

    #[test]
    fn dedication_quantity_is_86() {
        // floor(1 / (tanh 1; tanh 1)_inf), confirmed against the fixed-factor
        // oracle before freezing the golden value.
        let q = 1f64.tanh();
        let oracle = euler_product_oracle(q);
        assert_eq!((1.0 / oracle).floor() as u64, 86);

        let eval = eval_euler_function(NumericQ::new(q).unwrap(), 1e-13);
        assert!(eval.log_tail_bound <= 1e-12);
        assert_eq!((1.0 / eval.value).floor() as u64, 86);
        assert!((eval.value - oracle).abs() < 1e-12);
    }
}
