//! The generalized left-inverse `phi^{-1}(x, tau) = inf{t >= 0 :
//! phi(x,t) >= tau}` for monotone, possibly discontinuous, possibly
//! infinite-valued families, plus the inverse identities the condition
//! checkers rely on.
//!
//! The inverse is computed by predicate bisection rather than
//! interpolation: the infimum definition is robust to jumps and infinite
//! values, interpolation is not. Ties (phi constant equal to tau on an
//! interval) resolve to the left endpoint, per the infimum.

use thiserror::Error;

use crate::domain::Point;
use crate::extended::ExtendedValue;
use crate::family::{FamilyError, PhiFamily, Strength};
use crate::plan::SamplePlan;

pub const DEFAULT_ABS_TOL: f64 = 1e-12;
pub const DEFAULT_REL_TOL: f64 = 1e-10;
pub const DEFAULT_BRACKET_CAP: f64 = 1e12;

#[derive(Debug, Error)]
pub enum InverseError {
    /// The predicate `phi(x,t) >= tau` never fired below the bracket cap,
    /// so the family fails `lim_{t->inf} phi = inf` numerically.
    #[error("phi(x, t) < {tau} for every t up to the bracket cap {cap}")]
    Unbounded { tau: f64, cap: f64 },
    #[error(transparent)]
    Domain(#[from] FamilyError),
    #[error("family must be tagged strong for this operation")]
    NotStrong,
}

/// One left-inverse evaluation request.
#[derive(Clone)]
pub struct InverseQuery<'a> {
    pub family: &'a PhiFamily,
    pub x: &'a Point,
    pub tau: ExtendedValue,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub bracket_cap: f64,
}

impl<'a> InverseQuery<'a> {
    pub fn new(family: &'a PhiFamily, x: &'a Point, tau: ExtendedValue) -> InverseQuery<'a> {
        InverseQuery {
            family,
            x,
            tau,
            abs_tol: DEFAULT_ABS_TOL,
            rel_tol: DEFAULT_REL_TOL,
            bracket_cap: DEFAULT_BRACKET_CAP,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InverseResult {
    pub value: f64,
    /// Set when tau = +inf was answered by the guarded bracket-cap
    /// extension instead of an actual infimum.
    pub unbounded: bool,
}

/// Computes the left-inverse by exponential bracketing followed by
/// monotone bisection on the predicate `phi(x, t) >= tau`.
pub fn left_inverse(q: &InverseQuery) -> Result<InverseResult, InverseError> {
    q.family.evaluate(q.x, 0.0)?; // validates the sample point
    if q.tau == ExtendedValue::ZERO {
        // inf over all t >= 0, since phi(x, 0) = 0 >= 0
        return Ok(InverseResult { value: 0.0, unbounded: false });
    }
    if q.tau.is_infinite() {
        return Ok(InverseResult { value: q.bracket_cap, unbounded: true });
    }
    let hit = |t: f64| q.family.eval_raw(q.x, t) >= q.tau;

    let (mut lo, mut hi);
    if hit(1.0) {
        hi = 1.0;
        lo = 0.5;
        while hit(lo) {
            hi = lo;
            lo /= 2.0;
            if lo < 1e-280 {
                return Ok(InverseResult { value: lo, unbounded: false });
            }
        }
    } else {
        lo = 1.0;
        hi = 2.0;
        while !hit(hi) {
            lo = hi;
            hi *= 2.0;
            if hi > q.bracket_cap {
                return Err(InverseError::Unbounded {
                    tau: q.tau.as_f64(),
                    cap: q.bracket_cap,
                });
            }
        }
    }
    // converge to the stricter of the two tolerances: the absolute one
    // alone would leave O(abs_tol) error on tiny inverses, which the
    // round-trip identities amplify
    for _ in 0..200 {
        if hi - lo <= q.abs_tol.min(q.rel_tol * hi) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if hit(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(InverseResult { value: hi, unbounded: false })
}

/// Left-inverse at a finite tau with the default tolerances.
pub fn inverse_at(family: &PhiFamily, x: &Point, tau: f64) -> Result<f64, InverseError> {
    let q = InverseQuery::new(family, x, ExtendedValue::new(tau));
    Ok(left_inverse(&q)?.value)
}

/// The zero plateau `t0 = max{s >= 0 : phi(x, s) = 0}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZeroPlateau {
    pub t0: f64,
}

pub fn zero_plateau(family: &PhiFamily, x: &Point) -> Result<ZeroPlateau, InverseError> {
    family.evaluate(x, 0.0)?;
    let positive = |t: f64| family.eval_raw(x, t) > ExtendedValue::ZERO;

    let (mut lo, mut hi);
    if positive(1.0) {
        hi = 1.0;
        lo = 0.5;
        while positive(lo) {
            hi = lo;
            lo /= 2.0;
            if lo < 1e-14 {
                return Ok(ZeroPlateau { t0: 0.0 });
            }
        }
    } else {
        lo = 1.0;
        hi = 2.0;
        while !positive(hi) {
            lo = hi;
            hi *= 2.0;
            if hi > DEFAULT_BRACKET_CAP {
                return Ok(ZeroPlateau { t0: DEFAULT_BRACKET_CAP });
            }
        }
    }
    for _ in 0..200 {
        if hi - lo <= DEFAULT_ABS_TOL + DEFAULT_REL_TOL * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if positive(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(ZeroPlateau { t0: lo })
}

/// Residuals of the strong-family identities `phi(x, phi^{-1}(x,tau)) =
/// tau` and `phi^{-1}(x, phi(x,t)) = t` (the latter only where
/// `phi(x,t)` is finite and positive).
#[derive(Clone, Debug, Default)]
pub struct IdentityReport {
    pub max_forward_residual: f64,
    pub max_backward_residual: f64,
    pub forward_checked: usize,
    pub backward_checked: usize,
    pub skipped: usize,
}

pub fn verify_inverse_identities(
    family: &PhiFamily,
    plan: &SamplePlan,
) -> Result<IdentityReport, InverseError> {
    if family.strength() != Strength::Strong {
        return Err(InverseError::NotStrong);
    }
    let mut report = IdentityReport::default();
    for x in &plan.x_points {
        for &tau in plan.tau_grid.iter().filter(|&&tau| tau > 0.0) {
            let t = inverse_at(family, x, tau)?;
            match family.eval_raw(x, t).to_finite() {
                Some(v) => {
                    report.forward_checked += 1;
                    report.max_forward_residual =
                        report.max_forward_residual.max((v - tau).abs() / tau);
                }
                None => report.skipped += 1,
            }
        }
        for &t in plan.t_grid.iter().filter(|&&t| t > 0.0) {
            match family.eval_raw(x, t).to_finite() {
                // phi(x,t) in (0, inf) is the identity's precondition:
                // inside the zero plateau the round trip lands on the
                // plateau edge, not on t
                Some(v) if v > 0.0 => {
                    let r = inverse_at(family, x, v)?;
                    report.backward_checked += 1;
                    report.max_backward_residual =
                        report.max_backward_residual.max((r - t).abs() / t);
                }
                _ => report.skipped += 1,
            }
        }
    }
    Ok(report)
}

/// Check that `tau -> phi^{-1}(x,tau)/tau` is almost decreasing, and the
/// doubling form `phi^{-1}(x, 2 tau) <= 2a phi^{-1}(x, tau)`.
#[derive(Clone, Debug)]
pub struct Adec1Report {
    /// Estimated almost-decreasing constant of the inverse-over-tau ratio.
    pub constant: f64,
    /// Max of `phi^{-1}(2 tau) / phi^{-1}(tau)` over the grid.
    pub max_doubling_ratio: f64,
    /// The claimed bound 2a.
    pub doubling_bound: f64,
    pub holds: bool,
}

pub fn inverse_adec1_check(family: &PhiFamily, plan: &SamplePlan) -> Result<Adec1Report, InverseError> {
    let a = family.ainc_constant();
    let mut constant = 1.0f64;
    let mut max_doubling = 0.0f64;
    for x in &plan.x_points {
        let mut min_ratio = f64::INFINITY;
        for &tau in plan.tau_grid.iter().filter(|&&tau| tau > 0.0) {
            let inv = inverse_at(family, x, tau)?;
            let inv2 = inverse_at(family, x, 2.0 * tau)?;
            if inv > 0.0 {
                max_doubling = max_doubling.max(inv2 / inv);
            }
            let ratio = inv / tau;
            if ratio > 0.0 {
                constant = constant.max(ratio / min_ratio);
                min_ratio = min_ratio.min(ratio);
            }
        }
    }
    let doubling_bound = 2.0 * a;
    Ok(Adec1Report {
        constant,
        max_doubling_ratio: max_doubling,
        doubling_bound,
        holds: max_doubling <= doubling_bound * (1.0 + 1e-9),
    })
}
