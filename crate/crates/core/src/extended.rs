//! Arithmetic on the extended half-line `[0, +inf]`.
//!
//! Every Phi-function maps into this set, so comparisons and the few
//! arithmetic operations the checkers need are centralized here. Values are
//! never NaN and never negative, which makes the ordering total.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul};

/// A nonnegative real or `+inf`.
#[derive(Clone, Copy, PartialEq)]
pub struct ExtendedValue(f64);

impl ExtendedValue {
    pub const ZERO: ExtendedValue = ExtendedValue(0.0);
    pub const INFINITY: ExtendedValue = ExtendedValue(f64::INFINITY);

    /// Wraps a nonnegative float; `f64::INFINITY` is allowed, NaN and
    /// negative values are not.
    pub fn new(v: f64) -> ExtendedValue {
        assert!(!v.is_nan(), "ExtendedValue cannot be NaN");
        assert!(v >= 0.0, "ExtendedValue cannot be negative: {v}");
        ExtendedValue(v)
    }

    /// Wraps a finite nonnegative float.
    pub fn finite(v: f64) -> ExtendedValue {
        assert!(v.is_finite(), "expected a finite value, got {v}");
        Self::new(v)
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }

    /// The underlying float; `f64::INFINITY` for the infinite element.
    pub fn as_f64(self) -> f64 {
        self.0
    }

    pub fn to_finite(self) -> Option<f64> {
        self.is_finite().then_some(self.0)
    }

    pub fn min(self, other: ExtendedValue) -> ExtendedValue {
        ExtendedValue(self.0.min(other.0))
    }

    pub fn max(self, other: ExtendedValue) -> ExtendedValue {
        ExtendedValue(self.0.max(other.0))
    }

    /// Quotient with the conventions the growth estimators need:
    /// `0 / y = 0` for `y > 0`, `x / 0 = +inf` for `x > 0`, and
    /// `inf / finite = +inf`. `0/0` and `inf/inf` are indeterminate and
    /// return `None` so callers can count skipped samples.
    pub fn checked_div(self, other: ExtendedValue) -> Option<ExtendedValue> {
        match (self.0 == 0.0, other.0 == 0.0, self.is_infinite(), other.is_infinite()) {
            (true, true, _, _) => None,
            (_, _, true, true) => None,
            (true, _, _, _) => Some(ExtendedValue::ZERO),
            (_, true, _, _) => Some(ExtendedValue::INFINITY),
            (_, _, true, _) => Some(ExtendedValue::INFINITY),
            (_, _, _, true) => Some(ExtendedValue::ZERO),
            _ => Some(ExtendedValue(self.0 / other.0)),
        }
    }
}

impl Eq for ExtendedValue {}

impl Ord for ExtendedValue {
    fn cmp(&self, other: &Self) -> Ordering {
        // total because NaN is banned at construction
        self.0.partial_cmp(&other.0).expect("ExtendedValue is never NaN")
    }
}

impl PartialOrd for ExtendedValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for ExtendedValue {
    type Output = ExtendedValue;
    fn add(self, rhs: ExtendedValue) -> ExtendedValue {
        ExtendedValue(self.0 + rhs.0)
    }
}

impl Mul for ExtendedValue {
    type Output = ExtendedValue;
    fn mul(self, rhs: ExtendedValue) -> ExtendedValue {
        // 0 * inf = 0, so phi(x, 0) = 0 composes safely with weights
        if self.0 == 0.0 || rhs.0 == 0.0 {
            return ExtendedValue::ZERO;
        }
        ExtendedValue(self.0 * rhs.0)
    }
}

impl Mul<f64> for ExtendedValue {
    type Output = ExtendedValue;
    fn mul(self, rhs: f64) -> ExtendedValue {
        assert!(rhs >= 0.0 && !rhs.is_nan(), "scalar must be nonnegative");
        self * ExtendedValue::new(rhs)
    }
}

impl fmt::Debug for ExtendedValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            write!(f, "inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl fmt::Display for ExtendedValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}
