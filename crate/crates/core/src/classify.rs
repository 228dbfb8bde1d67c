//! Structural classification of a family against the weak and strong
//! Phi-function axioms, by grid scan over a sample plan.

use std::fmt;

use crate::domain::Point;
use crate::extended::ExtendedValue;
use crate::family::PhiFamily;
use crate::plan::SamplePlan;

/// Relative tolerance of the midpoint convexity test.
pub const CONVEXITY_REL_TOL: f64 = 1e-9;
/// Relative slack granted to almost-monotonicity comparisons.
pub const RATIO_REL_SLACK: f64 = 1e-9;
/// `phi(x, t_min)` must stay below this for the t -> 0 limit axiom.
const VANISH_THRESHOLD: f64 = 1e-4;
/// `phi(x, t_max)` must exceed this for the t -> inf limit axiom.
const BLOWUP_THRESHOLD: f64 = 1e6;
/// A family that becomes infinite is continuous into [0, inf] only if its
/// finite values blow up before the jump; this is the surrogate threshold.
const CONTINUITY_BOUNDARY_THRESHOLD: f64 = 1e12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axiom {
    IncreasingInT,
    ZeroAtZero,
    VanishesNearZero,
    BlowsUpAtInfinity,
    AlmostIncreasingRatio,
    MidpointConvexity,
    ContinuousIntoExtended,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Axiom::IncreasingInT => "increasing-in-t",
            Axiom::ZeroAtZero => "zero-at-zero",
            Axiom::VanishesNearZero => "vanishes-near-zero",
            Axiom::BlowsUpAtInfinity => "blows-up-at-infinity",
            Axiom::AlmostIncreasingRatio => "almost-increasing-ratio",
            Axiom::MidpointConvexity => "midpoint-convexity",
            Axiom::ContinuousIntoExtended => "continuous-into-extended",
        };
        write!(f, "{s}")
    }
}

#[derive(Clone, Debug)]
pub struct AxiomViolation {
    pub x: Point,
    pub t: f64,
    pub axiom: Axiom,
    pub lhs: ExtendedValue,
    pub rhs: ExtendedValue,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClassifiedStrength {
    Strong,
    Weak,
    /// At least one weak axiom is violated on the samples.
    NotPhi,
}

impl fmt::Display for ClassifiedStrength {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassifiedStrength::Strong => write!(f, "strong"),
            ClassifiedStrength::Weak => write!(f, "weak"),
            ClassifiedStrength::NotPhi => write!(f, "not-phi"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Classification {
    pub strength: ClassifiedStrength,
    pub violations: Vec<AxiomViolation>,
}

/// Scans the weak axioms on every sampled (x, t); when they all pass, also
/// runs the midpoint-convexity and continuity checks that separate strong
/// from weak.
pub fn classify(family: &PhiFamily, plan: &SamplePlan) -> Classification {
    assert!(!plan.x_points.is_empty() && plan.t_grid.len() >= 3, "plan must be nonempty");
    let a = ExtendedValue::finite(family.ainc_constant() * (1.0 + RATIO_REL_SLACK));
    let mut violations = Vec::new();
    let mut convex = true;
    let mut continuous = true;

    for x in &plan.x_points {
        let values: Vec<ExtendedValue> =
            plan.t_grid.iter().map(|&t| family.eval_raw(x, t)).collect();

        if values[0] != ExtendedValue::ZERO {
            violations.push(AxiomViolation {
                x: x.clone(),
                t: 0.0,
                axiom: Axiom::ZeroAtZero,
                lhs: values[0],
                rhs: ExtendedValue::ZERO,
            });
        }
        for w in 1..values.len() {
            if values[w] < values[w - 1] {
                violations.push(AxiomViolation {
                    x: x.clone(),
                    t: plan.t_grid[w],
                    axiom: Axiom::IncreasingInT,
                    lhs: values[w - 1],
                    rhs: values[w],
                });
                break;
            }
        }
        let near_zero = values[1];
        if near_zero > ExtendedValue::finite(VANISH_THRESHOLD) {
            violations.push(AxiomViolation {
                x: x.clone(),
                t: plan.t_grid[1],
                axiom: Axiom::VanishesNearZero,
                lhs: near_zero,
                rhs: ExtendedValue::finite(VANISH_THRESHOLD),
            });
        }
        let at_end = *values.last().unwrap();
        if at_end < ExtendedValue::finite(BLOWUP_THRESHOLD) {
            violations.push(AxiomViolation {
                x: x.clone(),
                t: *plan.t_grid.last().unwrap(),
                axiom: Axiom::BlowsUpAtInfinity,
                lhs: at_end,
                rhs: ExtendedValue::finite(BLOWUP_THRESHOLD),
            });
        }

        // phi(x,t)/t must be a-almost increasing: running max of the ratio
        // may never exceed a times the current ratio.
        let mut max_finite_ratio = ExtendedValue::ZERO;
        let mut seen_infinite = false;
        for (i, &t) in plan.t_grid.iter().enumerate().skip(1) {
            let ratio = match values[i].checked_div(ExtendedValue::finite(t)) {
                Some(r) => r,
                None => continue,
            };
            if ratio.is_infinite() {
                seen_infinite = true;
                continue;
            }
            if seen_infinite || max_finite_ratio > a * ratio {
                violations.push(AxiomViolation {
                    x: x.clone(),
                    t,
                    axiom: Axiom::AlmostIncreasingRatio,
                    lhs: if seen_infinite { ExtendedValue::INFINITY } else { max_finite_ratio },
                    rhs: a * ratio,
                });
                break;
            }
            max_finite_ratio = max_finite_ratio.max(ratio);
        }

        convex &= midpoint_convex(family, x, &plan.t_grid, &values);
        continuous &= continuous_into_extended(&values);
    }

    let strength = if !violations.is_empty() {
        ClassifiedStrength::NotPhi
    } else if convex && continuous {
        ClassifiedStrength::Strong
    } else {
        ClassifiedStrength::Weak
    };
    Classification { strength, violations }
}

fn midpoint_convex(family: &PhiFamily, x: &Point, grid: &[f64], values: &[ExtendedValue]) -> bool {
    // strides probe convexity at several scales of the log grid
    for stride in [1usize, 3, 10] {
        for i in 1..values.len().saturating_sub(stride) {
            let j = i + stride;
            let (lo, hi) = (values[i], values[j]);
            if hi.is_infinite() {
                continue;
            }
            let mid = family.eval_raw(x, 0.5 * (grid[i] + grid[j]));
            let bound = (lo.as_f64() + hi.as_f64()) * 0.5 * (1.0 + CONVEXITY_REL_TOL);
            if mid.as_f64() > bound {
                return false;
            }
        }
    }
    true
}

/// True when the sampled values either stay finite or grow beyond the
/// continuity threshold before jumping to infinity.
fn continuous_into_extended(values: &[ExtendedValue]) -> bool {
    let first_inf = match values.iter().position(|v| v.is_infinite()) {
        None => return true,
        Some(i) => i,
    };
    if first_inf == 0 {
        return false;
    }
    values[first_inf - 1] >= ExtendedValue::finite(CONTINUITY_BOUNDARY_THRESHOLD)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::SpatialDomain;
    use crate::gallery;

    fn plan_1d() -> SamplePlan {
        SamplePlan::default_for(&SpatialDomain::unit_ball(1))
    }

    #[test]
    fn square_is_strong() {
        let phi = gallery::orlicz_power(2.0, SpatialDomain::unit_ball(1));
        let c = classify(&phi, &plan_1d());
        assert_eq!(c.strength, ClassifiedStrength::Strong);
        assert!(c.violations.is_empty());
    }

    #[test]
    fn punctured_example_is_strong() {
        let phi = gallery::punctured_ball_example(2);
        let plan = SamplePlan::default_for(phi.domain());
        let c = classify(&phi, &plan);
        assert_eq!(c.strength, ClassifiedStrength::Strong);
        assert!(c.violations.is_empty());
    }

    #[test]
    fn sqrt_violates_the_ratio_axiom() {
        // phi(t) = sqrt(t): the ratio phi(t)/t = t^{-1/2} is decreasing
        let phi = crate::family::PhiFamily::new(
            "sqrt",
            SpatialDomain::unit_ball(1),
            crate::family::Strength::Weak,
            1.0,
            |_x, t| ExtendedValue::new(t.sqrt()),
        );
        let c = classify(&phi, &plan_1d());
        assert_eq!(c.strength, ClassifiedStrength::NotPhi);
        assert!(c.violations.iter().any(|v| v.axiom == Axiom::AlmostIncreasingRatio));
    }

    #[test]
    fn step_is_weak_not_strong() {
        let phi = gallery::step(SpatialDomain::unit_ball(1));
        let c = classify(&phi, &plan_1d());
        assert_eq!(c.strength, ClassifiedStrength::Weak);
        assert!(c.violations.is_empty());
    }

    #[test]
    fn double_phase_is_strong() {
        let phi = gallery::double_phase(2.0, 4.0, SpatialDomain::unit_ball(1));
        let c = classify(&phi, &plan_1d());
        assert_eq!(c.strength, ClassifiedStrength::Strong);
    }

    #[test]
    fn variable_exponent_is_strong() {
        let phi = gallery::variable_exponent(SpatialDomain::unit_ball(1));
        let c = classify(&phi, &plan_1d());
        assert_eq!(c.strength, ClassifiedStrength::Strong);
    }
}
