//! Adversarial counterexample search: find a tuple that violates a
//! condition for EVERY beta above a floor and every h below a sup cap.
//!
//! By monotonicity it suffices to break the inequality at beta = floor
//! with h replaced by whatever the defender would best choose under the
//! cap. Candidate x-points approach the excluded points and the domain
//! boundary geometrically (ratio 1/2); a violation is declared only when
//! the residual has grown through five consecutive depths, which separates
//! genuine blow-up from rounding.

use crate::domain::{Point, SpatialDomain};
use crate::family::PhiFamily;
use crate::growth::estimate_growth;
use crate::inversion::{inverse_at, InverseError};
use crate::plan::SamplePlan;

use super::{ConditionId, ViolationCertificate, CONDITION_REL_SLACK};

#[derive(Clone, Copy, Debug)]
pub struct SearchConfig {
    pub beta_floor: f64,
    pub h_sup_cap: f64,
    pub sigma: f64,
    pub max_depth: u32,
    /// Consecutive depths of residual growth required for a verdict.
    pub growth_run: u32,
}

impl SearchConfig {
    pub fn new(beta_floor: f64, h_sup_cap: f64, sigma: f64) -> SearchConfig {
        assert!(beta_floor > 0.0 && beta_floor <= 1.0);
        assert!(h_sup_cap.is_finite() && h_sup_cap >= 0.0);
        assert!(sigma > 0.0);
        SearchConfig { beta_floor, h_sup_cap, sigma, max_depth: 60, growth_run: 5 }
    }
}

#[derive(Clone, Debug)]
pub enum SearchOutcome {
    /// A tuple violating the condition for every admissible (beta, h).
    Violation { certificate: ViolationCertificate, depth: u32 },
    /// No such tuple was found within the search budget.
    Exhausted { max_residual: f64 },
}

impl SearchOutcome {
    pub fn is_violation(&self) -> bool {
        matches!(self, SearchOutcome::Violation { .. })
    }
}

/// Candidate attack points at a given approach depth: around every
/// excluded point and just inside the domain boundary.
fn attack_points(domain: &SpatialDomain, depth: u32) -> Vec<Point> {
    let dim = domain.dimension();
    let scale = domain.characteristic_length() / 2.0;
    let step = scale * 0.5f64.powi(depth as i32);
    let mut dirs = Vec::new();
    for axis in 0..dim {
        for sign in [1.0, -1.0] {
            let mut d = vec![0.0; dim];
            d[axis] = sign;
            dirs.push(d);
        }
    }
    let mut pts = Vec::new();
    for e in domain.excluded_points() {
        for dir in &dirs {
            pts.push(e.offset(dir, step));
        }
    }
    if domain.is_bounded() {
        let (lo, hi) = domain.bounding_box();
        let center = Point::new(lo.iter().zip(hi.iter()).map(|(a, b)| (a + b) / 2.0).collect());
        for dir in &dirs {
            pts.push(center.offset(dir, 2.0 * scale * (1.0 - 0.5f64.powi(depth as i32))));
        }
    }
    pts.retain(|p| domain.contains(p));
    pts
}

/// A modest fixed set of defender-side points and arguments.
fn defender_points(plan: &SamplePlan) -> Vec<Point> {
    plan.x_points.iter().take(16).cloned().collect()
}

fn saturating_inverse(family: &PhiFamily, x: &Point, tau: f64) -> f64 {
    match inverse_at(family, x, tau) {
        Ok(v) => v,
        Err(InverseError::Unbounded { cap, .. }) => cap,
        Err(_) => f64::NAN,
    }
}

/// Searches for a certificate that `condition` fails for every
/// `beta >= beta_floor` and every h with `||h||_inf <= h_sup_cap`.
pub fn counterexample_search(
    family: &PhiFamily,
    condition: ConditionId,
    cfg: &SearchConfig,
    plan: &SamplePlan,
) -> SearchOutcome {
    // The interval form is not violable when the defender can empty the
    // interval [h(x)+h(y), sigma] entirely.
    if condition == ConditionId::A2Interval && 2.0 * cfg.h_sup_cap >= cfg.sigma {
        return SearchOutcome::Exhausted { max_residual: f64::NEG_INFINITY };
    }
    if matches!(condition, ConditionId::AIncP | ConditionId::ADecQ) {
        return growth_search(family, condition, cfg, plan);
    }

    let defenders = defender_points(plan);
    // coarse argument grids keep each depth cheap
    let taus: Vec<f64> = plan
        .taus_in(0.0, cfg.sigma)
        .into_iter()
        .step_by(1 + plan.tau_grid.len() / 40)
        .collect();

    let mut best: Option<(f64, ViolationCertificate, u32)> = None;
    let mut residual_history: Vec<f64> = Vec::new();
    let mut max_residual_seen = f64::NEG_INFINITY;

    for depth in 1..=cfg.max_depth {
        let attackers = attack_points(family.domain(), depth);
        if attackers.is_empty() {
            residual_history.push(f64::NEG_INFINITY);
            continue;
        }
        let mut depth_best: Option<(f64, ViolationCertificate)> = None;
        for attacker in &attackers {
            for defender in &defenders {
                // the blow-up point can sit on either side of the
                // inequality depending on the family, so try both roles
                for (x, y) in [(attacker, defender), (defender, attacker)] {
                    let tuple_best = match condition {
                        ConditionId::A2Direct => direct_residual(family, cfg, x, y, plan),
                        ConditionId::A2Shifted => shifted_residual(family, cfg, x, y, &taus),
                        ConditionId::A2Interval => interval_residual(family, cfg, x, y, plan),
                        ConditionId::A2Max => max_form_residual(family, cfg, x, y, &taus),
                        ConditionId::A0 => a0_residual(family, cfg, attacker),
                        ConditionId::A1 => a1_residual(family, cfg, x, y, plan),
                        ConditionId::AIncP | ConditionId::ADecQ => unreachable!(),
                    };
                    if let Some((r, cert)) = tuple_best {
                        if depth_best.as_ref().is_none_or(|(b, _)| r > *b) {
                            depth_best = Some((r, cert));
                        }
                    }
                    if condition == ConditionId::A0 {
                        break;
                    }
                }
                if condition == ConditionId::A0 {
                    break; // no pair structure in the (A0) inequality
                }
            }
        }

        let depth_residual = depth_best.as_ref().map_or(f64::NEG_INFINITY, |(r, _)| *r);
        max_residual_seen = max_residual_seen.max(depth_residual);
        if let Some((r, cert)) = depth_best {
            if r.is_infinite() && r > 0.0 {
                return SearchOutcome::Violation { certificate: cert, depth };
            }
            if best.as_ref().is_none_or(|(b, _, _)| r > *b) {
                best = Some((r, cert, depth));
            }
        }
        residual_history.push(depth_residual);

        // positive residual growing through `growth_run` consecutive depths
        let n = residual_history.len();
        let run = cfg.growth_run as usize;
        if n >= run && depth_residual > 0.0 {
            let window = &residual_history[n - run..];
            if window.windows(2).all(|w| w[1] > w[0]) {
                let (_, cert, d) = best.expect("positive residual recorded");
                return SearchOutcome::Violation { certificate: cert, depth: d };
            }
        }
    }

    SearchOutcome::Exhausted { max_residual: max_residual_seen }
}

/// Residual of the direct form at (x, y): the defender plays h = cap at
/// both points, the attacker plays beta = floor and the best t with
/// `phi(y, t) <= sigma`.
fn direct_residual(
    family: &PhiFamily,
    cfg: &SearchConfig,
    x: &Point,
    y: &Point,
    plan: &SamplePlan,
) -> Option<(f64, ViolationCertificate)> {
    let slack = 1.0 + CONDITION_REL_SLACK;
    let mut best: Option<(f64, ViolationCertificate)> = None;
    for &t in plan.t_grid.iter().step_by(1 + plan.t_grid.len() / 60) {
        let phi_y = match family.eval_raw(y, t).to_finite() {
            Some(v) if v <= cfg.sigma => v,
            _ => continue,
        };
        let rhs = phi_y + 2.0 * cfg.h_sup_cap;
        let lhs = family.eval_raw(x, cfg.beta_floor * t).as_f64();
        let residual = if lhs.is_finite() { lhs - rhs * slack } else { f64::INFINITY };
        if best.as_ref().is_none_or(|(b, _)| residual > *b) {
            best = Some((
                residual,
                ViolationCertificate { x: x.clone(), y: Some(y.clone()), argument: t, lhs, rhs, residual },
            ));
        }
    }
    best
}

fn shifted_residual(
    family: &PhiFamily,
    cfg: &SearchConfig,
    x: &Point,
    y: &Point,
    taus: &[f64],
) -> Option<(f64, ViolationCertificate)> {
    let slack = 1.0 + CONDITION_REL_SLACK;
    let mut best: Option<(f64, ViolationCertificate)> = None;
    for &tau in taus {
        let lhs = cfg.beta_floor * saturating_inverse(family, x, tau);
        let rhs = saturating_inverse(family, y, tau + 2.0 * cfg.h_sup_cap);
        if lhs.is_nan() || rhs.is_nan() {
            continue;
        }
        let residual = lhs - rhs * slack;
        if best.as_ref().is_none_or(|(b, _)| residual > *b) {
            best = Some((
                residual,
                ViolationCertificate {
                    x: x.clone(),
                    y: Some(y.clone()),
                    argument: tau,
                    lhs,
                    rhs,
                    residual,
                },
            ));
        }
    }
    best
}

/// Interval form with `2 h_sup_cap < sigma`: the smallest interval the
/// defender can leave is `[2 cap, sigma]`.
fn interval_residual(
    family: &PhiFamily,
    cfg: &SearchConfig,
    x: &Point,
    y: &Point,
    plan: &SamplePlan,
) -> Option<(f64, ViolationCertificate)> {
    let slack = 1.0 + CONDITION_REL_SLACK;
    let mut best: Option<(f64, ViolationCertificate)> = None;
    for tau in plan.taus_in(2.0 * cfg.h_sup_cap, cfg.sigma) {
        let lhs = cfg.beta_floor * saturating_inverse(family, x, tau);
        let rhs = saturating_inverse(family, y, tau);
        if lhs.is_nan() || rhs.is_nan() {
            continue;
        }
        let residual = lhs - rhs * slack;
        if best.as_ref().is_none_or(|(b, _)| residual > *b) {
            best = Some((
                residual,
                ViolationCertificate {
                    x: x.clone(),
                    y: Some(y.clone()),
                    argument: tau,
                    lhs,
                    rhs,
                    residual,
                },
            ));
        }
    }
    best
}

/// Max form: the violation must hold for every value v = h(x)+h(y) in
/// [0, 2 cap] the defender could realize, so the tuple's residual is the
/// minimum over sampled v.
fn max_form_residual(
    family: &PhiFamily,
    cfg: &SearchConfig,
    x: &Point,
    y: &Point,
    taus: &[f64],
) -> Option<(f64, ViolationCertificate)> {
    let slack = 1.0 + CONDITION_REL_SLACK;
    let mut best: Option<(f64, ViolationCertificate)> = None;
    for &tau in taus {
        let mut tuple_min: Option<(f64, ViolationCertificate)> = None;
        for k in 0..=8 {
            let v = 2.0 * cfg.h_sup_cap * k as f64 / 8.0;
            let m = tau.max(v);
            let lhs = cfg.beta_floor * saturating_inverse(family, x, m);
            let rhs = saturating_inverse(family, y, m);
            if lhs.is_nan() || rhs.is_nan() {
                tuple_min = None;
                break;
            }
            let residual = lhs - rhs * slack;
            if tuple_min.as_ref().is_none_or(|(b, _)| residual < *b) {
                tuple_min = Some((
                    residual,
                    ViolationCertificate {
                        x: x.clone(),
                        y: Some(y.clone()),
                        argument: tau,
                        lhs,
                        rhs,
                        residual,
                    },
                ));
            }
        }
        if let Some((r, cert)) = tuple_min {
            if best.as_ref().is_none_or(|(b, _)| r > *b) {
                best = Some((r, cert));
            }
        }
    }
    best
}

/// (A0) fails for every beta >= floor iff some sample has
/// `phi^{-1}(x,1) < floor` or `> 1/floor`.
fn a0_residual(
    family: &PhiFamily,
    cfg: &SearchConfig,
    x: &Point,
) -> Option<(f64, ViolationCertificate)> {
    let inv = saturating_inverse(family, x, 1.0);
    if inv.is_nan() {
        return None;
    }
    let residual = (cfg.beta_floor - inv).max(inv - 1.0 / cfg.beta_floor);
    Some((
        residual,
        ViolationCertificate { x: x.clone(), y: None, argument: 1.0, lhs: inv, rhs: cfg.beta_floor, residual },
    ))
}

fn a1_residual(
    family: &PhiFamily,
    cfg: &SearchConfig,
    x: &Point,
    y: &Point,
    plan: &SamplePlan,
) -> Option<(f64, ViolationCertificate)> {
    let slack = 1.0 + CONDITION_REL_SLACK;
    let dim = family.domain().dimension();
    let mut best: Option<(f64, ViolationCertificate)> = None;
    for ball in &plan.ball_family {
        if !(ball.contains(x) && ball.contains(y)) {
            continue;
        }
        for tau in plan.taus_in(1.0, 1.0 / ball.volume(dim)) {
            let lhs = cfg.beta_floor * saturating_inverse(family, x, tau);
            let rhs = saturating_inverse(family, y, tau);
            if lhs.is_nan() || rhs.is_nan() {
                continue;
            }
            let residual = lhs - rhs * slack;
            if best.as_ref().is_none_or(|(b, _)| residual > *b) {
                best = Some((
                    residual,
                    ViolationCertificate {
                        x: x.clone(),
                        y: Some(y.clone()),
                        argument: tau,
                        lhs,
                        rhs,
                        residual,
                    },
                ));
            }
        }
    }
    best
}

/// Growth conditions: the cap plays the role of the largest credible
/// constant; the search declares a violation when the estimated constant
/// keeps growing past it on attack points of increasing depth.
fn growth_search(
    family: &PhiFamily,
    condition: ConditionId,
    cfg: &SearchConfig,
    plan: &SamplePlan,
) -> SearchOutcome {
    let (p, q) = match condition {
        ConditionId::AIncP => (family.declared_ainc().map_or(1.0, |(p, _)| p), 1.0),
        _ => (1.0, family.declared_adec().map_or(1.0, |(q, _)| q)),
    };
    let mut history = Vec::new();
    let mut max_residual = f64::NEG_INFINITY;
    for depth in 1..=cfg.max_depth.min(20) {
        let attackers = attack_points(family.domain(), depth);
        if attackers.is_empty() {
            history.push(f64::NEG_INFINITY);
            continue;
        }
        let sub = SamplePlan { x_points: attackers.clone(), ..plan.clone() };
        let report = estimate_growth(family, p, q, &sub);
        let est = match condition {
            ConditionId::AIncP => report.ainc.constant,
            _ => report.adec.constant,
        };
        let residual = est.as_f64() - cfg.h_sup_cap;
        max_residual = max_residual.max(residual);
        if residual.is_infinite() && residual > 0.0 {
            return SearchOutcome::Violation {
                certificate: ViolationCertificate {
                    x: attackers[0].clone(),
                    y: None,
                    argument: if condition == ConditionId::AIncP { p } else { q },
                    lhs: est.as_f64(),
                    rhs: cfg.h_sup_cap,
                    residual,
                },
                depth,
            };
        }
        history.push(residual);
        let run = cfg.growth_run as usize;
        if history.len() >= run && residual > 0.0 {
            let window = &history[history.len() - run..];
            if window.windows(2).all(|w| w[1] > w[0]) {
                return SearchOutcome::Violation {
                    certificate: ViolationCertificate {
                        x: attackers[0].clone(),
                        y: None,
                        argument: if condition == ConditionId::AIncP { p } else { q },
                        lhs: est.as_f64(),
                        rhs: cfg.h_sup_cap,
                        residual,
                    },
                    depth,
                };
            }
        }
    }
    SearchOutcome::Exhausted { max_residual }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::SpatialDomain;
    use crate::gallery;

    #[test]
    fn punctured_direct_form_yields_a_certificate() {
        let phi = gallery::punctured_ball_example(1);
        let plan = SamplePlan::default_for(phi.domain());
        let cfg = SearchConfig::new(1e-3, 10.0, 1.0);
        match counterexample_search(&phi, ConditionId::A2Direct, &cfg, &plan) {
            SearchOutcome::Violation { certificate, .. } => {
                let y = certificate.y.as_ref().unwrap();
                let t = certificate.argument;
                let bound = cfg.beta_floor * cfg.beta_floor * t * t
                    / (t * t / y.norm() + 2.0 * cfg.h_sup_cap);
                assert!(
                    certificate.x.norm() < bound,
                    "|x| = {} vs analytic bound {bound}",
                    certificate.x.norm()
                );
            }
            other => panic!("expected a violation, got {other:?}"),
        }
    }

    #[test]
    fn x_independent_family_exhausts() {
        let phi = gallery::orlicz_power(2.0, SpatialDomain::unit_ball(1));
        let plan = SamplePlan::default_for(phi.domain());
        let cfg = SearchConfig::new(1e-3, 10.0, 1.0);
        for condition in
            [ConditionId::A2Direct, ConditionId::A2Shifted, ConditionId::A2Max, ConditionId::A0]
        {
            let out = counterexample_search(&phi, condition, &cfg, &plan);
            assert!(!out.is_violation(), "{condition} should be exhausted");
        }
    }

    #[test]
    fn interval_form_with_large_h_allowed_is_not_violable() {
        let phi = gallery::punctured_ball_example(1);
        let plan = SamplePlan::default_for(phi.domain());
        // h up to sigma empties the interval, so the search must exhaust
        let cfg = SearchConfig::new(1e-3, 1.0, 1.0);
        let out = counterexample_search(&phi, ConditionId::A2Interval, &cfg, &plan);
        assert!(!out.is_violation());
    }

    #[test]
    fn punctured_a0_and_a1_are_violated() {
        let phi = gallery::punctured_ball_example(1);
        let plan = SamplePlan::default_for(phi.domain());
        let cfg = SearchConfig::new(1e-2, 10.0, 1.0);
        assert!(counterexample_search(&phi, ConditionId::A0, &cfg, &plan).is_violation());
        assert!(counterexample_search(&phi, ConditionId::A1, &cfg, &plan).is_violation());
    }

    #[test]
    fn punctured_shifted_form_is_violated_for_any_small_witness() {
        // beta phi^{-1}(x, tau) <= phi^{-1}(y, tau + 2 cap) breaks with the
        // blow-up point in the y slot
        let phi = gallery::punctured_ball_example(1);
        let plan = SamplePlan::default_for(phi.domain());
        let cfg = SearchConfig::new(1e-2, 1.0, 1.0);
        assert!(counterexample_search(&phi, ConditionId::A2Shifted, &cfg, &plan).is_violation());
    }
}
