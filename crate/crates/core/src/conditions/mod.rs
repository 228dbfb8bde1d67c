//! Checkers for the nondegeneracy condition (A0), the local condition
//! (A1), and the decay condition (A2) in its equivalent formulations,
//! together with the constructive witness transformations between them and
//! a counterexample search.
//!
//! The (A2)-type conditions come in four shapes, named by what they do to
//! the inequality:
//!
//! * shifted  - `beta phi^{-1}(x,tau) <= phi^{-1}(y, tau + h(x) + h(y))`
//!   for `tau in [0, sigma]`;
//! * interval - `beta phi^{-1}(x,tau) <= phi^{-1}(y,tau)` only for
//!   `tau in [h(x)+h(y), sigma]`, which can be vacuously true;
//! * direct   - `phi(x, beta t) <= phi(y, t) + h(x) + h(y)` whenever
//!   `phi(y,t) <= sigma`;
//! * max      - both inverse arguments replaced by `max{tau, h(x)+h(y)}`.

mod checks;
mod search;
mod suite;
mod transform;

pub use checks::{
    check_a0, check_a1, check_a2_direct, check_a2_interval, check_a2_max, check_a2_shifted,
    search_witness, A0Outcome, A1Outcome,
};
pub use search::{counterexample_search, SearchConfig, SearchOutcome};
pub use suite::{implication_suite, ArrowCheck, SuiteOutcome};
pub use transform::{construct_bounded_witness, transform_witness, TransformContext};

use std::fmt;

use thiserror::Error;

use crate::domain::{Point, SpatialDomain};
use crate::inversion::InverseError;

/// Relative slack granted to the right-hand side of every condition
/// inequality; all quantities pass through bisections with far tighter
/// tolerances.
pub const CONDITION_REL_SLACK: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum ConditionError {
    #[error("invalid witness: {0}")]
    InvalidWitness(String),
    #[error("domain must be bounded for this construction")]
    UnboundedDomain,
    #[error("unsupported transformation arrow: {from} -> {to}")]
    UnsupportedArrow { from: FormulationId, to: FormulationId },
    #[error("missing context for this arrow: {0}")]
    MissingContext(&'static str),
    #[error(transparent)]
    Inverse(#[from] InverseError),
}

/// Identifier of a checkable condition.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConditionId {
    A0,
    A1,
    A2Shifted,
    A2Interval,
    A2Direct,
    A2Max,
    AIncP,
    ADecQ,
}

impl fmt::Display for ConditionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ConditionId::A0 => "A0",
            ConditionId::A1 => "A1",
            ConditionId::A2Shifted => "A2-shifted",
            ConditionId::A2Interval => "A2-interval",
            ConditionId::A2Direct => "A2-direct",
            ConditionId::A2Max => "A2-max",
            ConditionId::AIncP => "aInc_p",
            ConditionId::ADecQ => "aDec_q",
        };
        write!(f, "{s}")
    }
}

/// The formulations related by the equivalence proposition. The two
/// interval entries share a checker but differ in what they assume:
/// `IntervalSmallH` restricts `||h||_inf <= sigma/2`, `IntervalWithA0`
/// pairs an unrestricted h with the condition (A0).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FormulationId {
    Shifted,
    Direct,
    MaxForm,
    IntervalSmallH,
    IntervalWithA0,
    A0,
    A1,
}

impl fmt::Display for FormulationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FormulationId::Shifted => "shifted",
            FormulationId::Direct => "direct",
            FormulationId::MaxForm => "max-form",
            FormulationId::IntervalSmallH => "interval-small-h",
            FormulationId::IntervalWithA0 => "interval-with-A0",
            FormulationId::A0 => "A0",
            FormulationId::A1 => "A1",
        };
        write!(f, "{s}")
    }
}

/// The perturbation function h of a witness, restricted to the parametric
/// shapes the witness constructions use, with declared L-infinity and L1 bounds.
#[derive(Clone, Debug)]
pub struct HFunction {
    kind: HKind,
    sup_bound: f64,
    l1_bound: f64,
}

#[derive(Clone, Debug)]
enum HKind {
    Zero,
    /// `level * chi_Omega` on a bounded domain.
    ConstIndicator { level: f64 },
    /// `min{ level * min{1, |x|^-(n+1)}, cap }`, integrable on unbounded
    /// domains. The pointwise cap keeps `min{h, c}` inside the shape.
    Decay { level: f64, dimension: usize, cap: f64 },
}

impl HFunction {
    pub fn zero() -> HFunction {
        HFunction { kind: HKind::Zero, sup_bound: 0.0, l1_bound: 0.0 }
    }

    /// `level * chi_Omega`; the L1 bound is exactly `level * |Omega|` on a
    /// bounded domain.
    pub fn const_indicator(level: f64, domain: &SpatialDomain) -> Result<HFunction, ConditionError> {
        if !(level >= 0.0 && level.is_finite()) {
            return Err(ConditionError::InvalidWitness(format!("indicator level {level}")));
        }
        if !domain.is_bounded() {
            return Err(ConditionError::UnboundedDomain);
        }
        if level == 0.0 {
            return Ok(HFunction::zero());
        }
        Ok(HFunction {
            kind: HKind::ConstIndicator { level },
            sup_bound: level,
            l1_bound: level * domain.measure(),
        })
    }

    /// `level * min{1, |x|^-(n+1)}`. Its integral over R^n is
    /// `level * (v_n + n v_n)` with `v_n` the unit-ball volume; the L1
    /// bound is declared from that closed form, not from quadrature.
    pub fn decay(level: f64, dimension: usize) -> Result<HFunction, ConditionError> {
        if !(level >= 0.0 && level.is_finite()) {
            return Err(ConditionError::InvalidWitness(format!("decay level {level}")));
        }
        if level == 0.0 {
            return Ok(HFunction::zero());
        }
        let vn = crate::domain::unit_ball_volume(dimension);
        Ok(HFunction {
            kind: HKind::Decay { level, dimension, cap: f64::INFINITY },
            sup_bound: level,
            l1_bound: level * vn * (1.0 + dimension as f64),
        })
    }

    pub fn eval(&self, x: &Point) -> f64 {
        match &self.kind {
            HKind::Zero => 0.0,
            HKind::ConstIndicator { level } => *level,
            HKind::Decay { level, dimension, cap } => {
                (level * x.norm().powi(-(*dimension as i32 + 1)).min(1.0)).min(*cap)
            }
        }
    }

    pub fn sup_bound(&self) -> f64 {
        self.sup_bound
    }

    pub fn l1_bound(&self) -> f64 {
        self.l1_bound
    }

    /// Pointwise scaling by a factor in [0, 1]; both bounds scale with it.
    pub fn scale(&self, factor: f64) -> HFunction {
        assert!((0.0..=1.0).contains(&factor));
        if factor == 0.0 {
            return HFunction::zero();
        }
        let kind = match &self.kind {
            HKind::Zero => HKind::Zero,
            HKind::ConstIndicator { level } => HKind::ConstIndicator { level: level * factor },
            HKind::Decay { level, dimension, cap } => HKind::Decay {
                level: level * factor,
                dimension: *dimension,
                cap: cap * factor,
            },
        };
        HFunction { kind, sup_bound: self.sup_bound * factor, l1_bound: self.l1_bound * factor }
    }

    /// Pointwise `min{h, cap}`, exact for every shape.
    pub fn cap(&self, cap: f64) -> HFunction {
        assert!(cap >= 0.0);
        if self.sup_bound <= cap {
            return self.clone();
        }
        match &self.kind {
            HKind::Zero => HFunction::zero(),
            HKind::ConstIndicator { .. } => HFunction {
                kind: HKind::ConstIndicator { level: cap },
                sup_bound: cap,
                l1_bound: self.l1_bound * cap / self.sup_bound,
            },
            HKind::Decay { level, dimension, cap: old_cap } => HFunction {
                kind: HKind::Decay { level: *level, dimension: *dimension, cap: old_cap.min(cap) },
                sup_bound: self.sup_bound.min(cap),
                l1_bound: self.l1_bound,
            },
        }
    }

    /// A short stable description for reports.
    pub fn describe(&self) -> String {
        match &self.kind {
            HKind::Zero => "zero".to_string(),
            HKind::ConstIndicator { level } => format!("const:{level}"),
            HKind::Decay { level, cap, .. } => {
                if cap.is_finite() {
                    format!("decay:{level}@cap{cap}")
                } else {
                    format!("decay:{level}")
                }
            }
        }
    }
}

/// A concrete (beta, h) pair instantiating the existential quantifiers of
/// a condition at level sigma.
#[derive(Clone, Debug)]
pub struct Witness {
    pub beta: f64,
    pub h: HFunction,
    pub sigma: f64,
}

impl Witness {
    pub fn new(beta: f64, h: HFunction, sigma: f64) -> Result<Witness, ConditionError> {
        if !(beta > 0.0 && beta <= 1.0) {
            return Err(ConditionError::InvalidWitness(format!("beta = {beta} not in (0, 1]")));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(ConditionError::InvalidWitness(format!("sigma = {sigma}")));
        }
        Ok(Witness { beta, h, sigma })
    }

    pub fn describe(&self) -> String {
        format!("beta={} h={} sigma={}", self.beta, self.h.describe(), self.sigma)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    HoldsOnSamples {
        /// Set when the condition held because no sampled tuple was
        /// constrained at all (the interval form with a large h).
        vacuous: bool,
    },
    Violated,
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::HoldsOnSamples { .. })
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::HoldsOnSamples { vacuous: false } => write!(f, "holds_on_samples"),
            Verdict::HoldsOnSamples { vacuous: true } => write!(f, "holds_on_samples (vacuous)"),
            Verdict::Violated => write!(f, "violated"),
        }
    }
}

/// The tuple at which a condition inequality failed, with both sides.
#[derive(Clone, Debug)]
pub struct ViolationCertificate {
    pub x: Point,
    pub y: Option<Point>,
    /// tau or t, depending on the condition.
    pub argument: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
}

impl fmt::Display for ViolationCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x={}", self.x)?;
        if let Some(y) = &self.y {
            write!(f, " y={y}")?;
        }
        write!(
            f,
            " arg={} lhs={} rhs={} residual={}",
            self.argument, self.lhs, self.rhs, self.residual
        )
    }
}

#[derive(Clone, Debug)]
pub struct ConditionReport {
    pub condition: ConditionId,
    pub verdict: Verdict,
    /// The witness the check ran with, if any.
    pub witness: Option<Witness>,
    /// The best constant observed: the largest beta that would pass with
    /// the same h, or the (A0)/(A1) constant.
    pub best_beta: Option<f64>,
    pub violation: Option<ViolationCertificate>,
    pub tuples_checked: usize,
    pub skipped: usize,
}

impl ConditionReport {
    pub fn holds(&self) -> bool {
        self.verdict.holds()
    }
}
