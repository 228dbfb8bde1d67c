//! The equivalence relations between Phi-functions: valuewise
//! comparability up to a constant, and comparability up to rescaling the
//! argument. Conditions on families are invariant under the second.

use std::fmt;

use crate::domain::Point;
use crate::extended::ExtendedValue;
use crate::family::PhiFamily;
use crate::plan::SamplePlan;

/// Constants above this are not certified; on a finite grid every pair of
/// finite positive functions is trivially comparable with some enormous
/// constant, so a cap is what makes failure observable. Distinct powers
/// over the default span need an argument rescaling of about 1e4, so the
/// cap must sit below that.
pub const EQUIVALENCE_CONSTANT_CAP: f64 = 1e3;

const REL_SLACK: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EquivalenceKind {
    /// `(1/c) phi <= psi <= c phi` pointwise.
    Valuewise,
    /// `phi(x, t/c) <= psi(x, t) <= phi(x, c t)`.
    Argumentwise,
}

impl fmt::Display for EquivalenceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EquivalenceKind::Valuewise => write!(f, "valuewise"),
            EquivalenceKind::Argumentwise => write!(f, "argumentwise"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct EquivalenceCertificate {
    pub kind: EquivalenceKind,
    /// Smallest constant c >= 1 satisfying the two-sided inequality on the
    /// sampled (x, t).
    pub constant: f64,
    pub samples: usize,
}

#[derive(Clone, Debug)]
pub struct EquivalenceViolation {
    pub kind: EquivalenceKind,
    pub x: Point,
    pub t: f64,
    pub phi: ExtendedValue,
    pub psi: ExtendedValue,
}

/// Finds the smallest constant certifying `phi ~ psi` on the plan, or the
/// violating sample.
pub fn check_equivalence(
    phi: &PhiFamily,
    psi: &PhiFamily,
    kind: EquivalenceKind,
    plan: &SamplePlan,
) -> Result<EquivalenceCertificate, EquivalenceViolation> {
    match kind {
        EquivalenceKind::Valuewise => valuewise(phi, psi, plan),
        EquivalenceKind::Argumentwise => argumentwise(phi, psi, plan),
    }
}

fn valuewise(
    phi: &PhiFamily,
    psi: &PhiFamily,
    plan: &SamplePlan,
) -> Result<EquivalenceCertificate, EquivalenceViolation> {
    let mut c = 1.0f64;
    let mut samples = 0usize;
    for x in &plan.x_points {
        for &t in &plan.t_grid {
            let (a, b) = (phi.eval_raw(x, t), psi.eval_raw(x, t));
            samples += 1;
            match (a.to_finite(), b.to_finite()) {
                (Some(0.0), Some(0.0)) => {}
                (None, None) => {}
                (Some(av), Some(bv)) if av > 0.0 && bv > 0.0 => {
                    c = c.max(av / bv).max(bv / av);
                }
                // one side 0 or infinite while the other is not: no constant works
                _ => {
                    return Err(EquivalenceViolation {
                        kind: EquivalenceKind::Valuewise,
                        x: x.clone(),
                        t,
                        phi: a,
                        psi: b,
                    })
                }
            }
        }
    }
    if c > EQUIVALENCE_CONSTANT_CAP {
        let (x, t) = worst_valuewise(phi, psi, plan);
        return Err(EquivalenceViolation {
            kind: EquivalenceKind::Valuewise,
            phi: phi.eval_raw(&x, t),
            psi: psi.eval_raw(&x, t),
            x,
            t,
        });
    }
    Ok(EquivalenceCertificate { kind: EquivalenceKind::Valuewise, constant: c, samples })
}

fn worst_valuewise(phi: &PhiFamily, psi: &PhiFamily, plan: &SamplePlan) -> (Point, f64) {
    let mut worst = (plan.x_points[0].clone(), plan.t_grid[1]);
    let mut worst_ratio = 0.0f64;
    for x in &plan.x_points {
        for &t in &plan.t_grid {
            if let (Some(av), Some(bv)) =
                (phi.eval_raw(x, t).to_finite(), psi.eval_raw(x, t).to_finite())
            {
                if av > 0.0 && bv > 0.0 {
                    let r = (av / bv).max(bv / av);
                    // ties resolve to the later (larger) t
                    if r >= worst_ratio {
                        worst_ratio = r;
                        worst = (x.clone(), t);
                    }
                }
            }
        }
    }
    worst
}

fn argumentwise(
    phi: &PhiFamily,
    psi: &PhiFamily,
    plan: &SamplePlan,
) -> Result<EquivalenceCertificate, EquivalenceViolation> {
    let ok = |c: f64| -> bool {
        plan.x_points.iter().all(|x| {
            plan.t_grid.iter().all(|&t| {
                let mid = psi.eval_raw(x, t);
                leq(phi.eval_raw(x, t / c), mid) && leq(mid, phi.eval_raw(x, c * t))
            })
        })
    };

    let samples = plan.x_points.len() * plan.t_grid.len();
    if !ok(EQUIVALENCE_CONSTANT_CAP) {
        let (x, t) = worst_argumentwise(phi, psi, plan, EQUIVALENCE_CONSTANT_CAP);
        return Err(EquivalenceViolation {
            kind: EquivalenceKind::Argumentwise,
            phi: phi.eval_raw(&x, t),
            psi: psi.eval_raw(&x, t),
            x,
            t,
        });
    }
    if ok(1.0) {
        return Ok(EquivalenceCertificate {
            kind: EquivalenceKind::Argumentwise,
            constant: 1.0,
            samples,
        });
    }
    let (mut lo, mut hi) = (1.0f64, EQUIVALENCE_CONSTANT_CAP);
    for _ in 0..64 {
        let mid = (lo * hi).sqrt();
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(EquivalenceCertificate { kind: EquivalenceKind::Argumentwise, constant: hi, samples })
}

/// The sample where the two-sided inequality at constant `c` is most
/// violated (ties resolve to the later t).
fn worst_argumentwise(phi: &PhiFamily, psi: &PhiFamily, plan: &SamplePlan, c: f64) -> (Point, f64) {
    let severity = |num: ExtendedValue, den: ExtendedValue| -> f64 {
        match (num.to_finite(), den.to_finite()) {
            (None, Some(_)) => f64::INFINITY,
            (Some(n), Some(d)) if d > 0.0 => n / d,
            (Some(n), Some(_)) if n > 0.0 => f64::INFINITY,
            _ => 0.0,
        }
    };
    let mut worst = (plan.x_points[0].clone(), plan.t_grid[1]);
    let mut worst_severity = 0.0f64;
    for x in &plan.x_points {
        for &t in &plan.t_grid {
            let mid = psi.eval_raw(x, t);
            let s = severity(phi.eval_raw(x, t / c), mid).max(severity(mid, phi.eval_raw(x, c * t)));
            if s >= worst_severity {
                worst_severity = s;
                worst = (x.clone(), t);
            }
        }
    }
    worst
}

/// `a <= b` with relative slack on the right-hand side.
fn leq(a: ExtendedValue, b: ExtendedValue) -> bool {
    if b.is_infinite() {
        return true;
    }
    if a.is_infinite() {
        return false;
    }
    a.as_f64() <= b.as_f64() * (1.0 + REL_SLACK)
}
