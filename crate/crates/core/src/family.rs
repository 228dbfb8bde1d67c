//! The Phi-family abstraction: a spatially parametrized function
//! `phi(x, t)` on `Omega x [0, inf)` with values in `[0, inf]`, together
//! with its declared growth constants.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::domain::{Point, SpatialDomain};
use crate::extended::ExtendedValue;

#[derive(Debug, Error)]
pub enum FamilyError {
    #[error("point {0} is in the exceptional set of the domain")]
    ExcludedPoint(Point),
    #[error("point {0} lies outside the domain")]
    OutOfDomain(Point),
    #[error("negative argument t = {0}")]
    NegativeArgument(f64),
}

/// Declared structural strength of a family.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strength {
    /// Increasing in t, vanishing at 0, blowing up at infinity, with
    /// `phi(x,t)/t` almost increasing.
    Weak,
    /// Additionally convex and continuous into `[0, inf]` in t.
    Strong,
}

impl fmt::Display for Strength {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Strength::Weak => write!(f, "weak"),
            Strength::Strong => write!(f, "strong"),
        }
    }
}

type Evaluator = Arc<dyn Fn(&Point, f64) -> ExtendedValue + Send + Sync>;

/// A spatially parametrized Phi-function.
///
/// Immutable after construction; evaluation is pure, so families may be
/// shared freely across threads.
#[derive(Clone)]
pub struct PhiFamily {
    name: String,
    evaluator: Evaluator,
    domain: SpatialDomain,
    /// Constant of almost-increasingness of `t -> phi(x,t)/t`, uniform in x.
    ainc_constant: f64,
    /// Declared (p, a_p) for which `phi(x,t)/t^p` is a_p-almost increasing.
    declared_ainc: Option<(f64, f64)>,
    /// Declared (q, a_q) for which `phi(x,t)/t^q` is a_q-almost decreasing.
    declared_adec: Option<(f64, f64)>,
    strength: Strength,
}

impl PhiFamily {
    pub fn new(
        name: impl Into<String>,
        domain: SpatialDomain,
        strength: Strength,
        ainc_constant: f64,
        evaluator: impl Fn(&Point, f64) -> ExtendedValue + Send + Sync + 'static,
    ) -> PhiFamily {
        assert!(ainc_constant >= 1.0, "almost-increasing constant must be >= 1");
        PhiFamily {
            name: name.into(),
            evaluator: Arc::new(evaluator),
            domain,
            ainc_constant,
            declared_ainc: None,
            declared_adec: None,
            strength,
        }
    }

    pub fn with_declared_ainc(mut self, p: f64, a_p: f64) -> PhiFamily {
        assert!(p > 0.0 && a_p >= 1.0);
        self.declared_ainc = Some((p, a_p));
        self
    }

    pub fn with_declared_adec(mut self, q: f64, a_q: f64) -> PhiFamily {
        assert!(q > 0.0 && a_q >= 1.0);
        self.declared_adec = Some((q, a_q));
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain(&self) -> &SpatialDomain {
        &self.domain
    }

    pub fn ainc_constant(&self) -> f64 {
        self.ainc_constant
    }

    pub fn declared_ainc(&self) -> Option<(f64, f64)> {
        self.declared_ainc
    }

    pub fn declared_adec(&self) -> Option<(f64, f64)> {
        self.declared_adec
    }

    pub fn strength(&self) -> Strength {
        self.strength
    }

    /// Evaluates `phi(x, t)` after validating the sample point.
    ///
    /// An excluded or out-of-domain x signals that the caller sampled the
    /// exceptional set, which is an error, not a value.
    pub fn evaluate(&self, x: &Point, t: f64) -> Result<ExtendedValue, FamilyError> {
        if t.is_nan() || t < 0.0 {
            return Err(FamilyError::NegativeArgument(t));
        }
        if self.domain.is_excluded(x) {
            return Err(FamilyError::ExcludedPoint(x.clone()));
        }
        if !self.domain.contains(x) {
            return Err(FamilyError::OutOfDomain(x.clone()));
        }
        Ok(self.eval_raw(x, t))
    }

    /// Evaluation without the domain check, for sweeps over pre-validated
    /// sample plans.
    pub fn eval_raw(&self, x: &Point, t: f64) -> ExtendedValue {
        debug_assert!(t >= 0.0);
        if t == 0.0 {
            // phi(x, 0) = 0 by definition of a weak Phi-function
            return ExtendedValue::ZERO;
        }
        (self.evaluator)(x, t)
    }
}

impl fmt::Debug for PhiFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PhiFamily")
            .field("name", &self.name)
            .field("strength", &self.strength)
            .field("ainc_constant", &self.ainc_constant)
            .finish()
    }
}
