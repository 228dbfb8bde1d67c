//! The numerical Legendre--Fenchel conjugate `phi*(x,t) = sup{s t -
//! phi(x,s) : s >= 0}` and the inverse-product identity linking
//! `phi^{-1}` with `(phi*)^{-1}`.
//!
//! The sup is taken over a log-spaced grid followed by local ternary
//! refinement around the best cell. Refinement is exact when `phi(x,.)`
//! is convex (the objective is then concave) and best-effort otherwise,
//! mirroring the reduction to strong families in the theory.

use crate::domain::Point;
use crate::extended::ExtendedValue;
use crate::family::{PhiFamily, Strength};
use crate::inversion::{inverse_at, InverseError};
use crate::plan::{log_grid, SamplePlan};

/// Objective values beyond this, still increasing at the search frontier,
/// are declared genuinely infinite (phi linear at infinity).
pub const DIVERGENCE_THRESHOLD: f64 = 1e16;

/// The product `(phi*)^{-1} phi^{-1} / tau` is declared unbounded when its
/// certifying constant exceeds this.
pub const PRODUCT_CONSTANT_CAP: f64 = 1e3;

/// How far past the grid the divergence walk may double before giving up.
const WALK_CAP: f64 = 1e44;

#[derive(Clone)]
pub struct ConjugateQuery<'a> {
    pub family: &'a PhiFamily,
    pub x: &'a Point,
    pub t: f64,
    pub s_grid: &'a [f64],
    pub refine_steps: u32,
}

/// The default search grid over s: log-spaced on [1e-8, 1e8] plus 0.
pub fn default_s_grid() -> Vec<f64> {
    log_grid(1e-8, 1e8, 240)
}

impl<'a> ConjugateQuery<'a> {
    pub fn new(family: &'a PhiFamily, x: &'a Point, t: f64, s_grid: &'a [f64]) -> Self {
        ConjugateQuery { family, x, t, s_grid, refine_steps: 40 }
    }
}

/// Evaluates the conjugate at one (x, t).
pub fn conjugate(q: &ConjugateQuery) -> ExtendedValue {
    assert!(q.t >= 0.0, "conjugate argument must be nonnegative");
    let obj = |s: f64| -> f64 {
        match q.family.eval_raw(q.x, s).to_finite() {
            Some(v) => s * q.t - v,
            None => f64::NEG_INFINITY,
        }
    };

    let mut best_i = 0usize;
    let mut best = 0.0f64; // s = 0 gives exactly 0
    for (i, &s) in q.s_grid.iter().enumerate() {
        let g = obj(s);
        if g > best {
            best = g;
            best_i = i;
        }
    }

    let last = q.s_grid.len() - 1;
    let (mut lo, mut hi);
    if best_i == last {
        // Still climbing at the end of the grid: walk outward by doubling
        // until the objective crests. A genuinely infinite conjugate never
        // crests, so hitting the walk cap past the divergence threshold is
        // the "exceeds 1e16 and still increasing" signal.
        let mut s = q.s_grid[last];
        let mut g = best;
        loop {
            let s2 = s * 2.0;
            if s2 > WALK_CAP {
                if g > DIVERGENCE_THRESHOLD {
                    return ExtendedValue::INFINITY;
                }
                break;
            }
            let g2 = obj(s2);
            if g2 <= g {
                break;
            }
            s = s2;
            g = g2;
        }
        best = g;
        lo = s / 2.0;
        hi = s * 2.0;
    } else if best_i == 0 {
        // The whole positive grid may sit past the maximizer (tiny t with
        // a superlinear family): walk inward by halving until the
        // objective turns positive and crests.
        let mut s = q.s_grid[1];
        let mut best_s = s;
        for _ in 0..140 {
            s /= 2.0;
            if s < 1e-300 {
                break;
            }
            let g = obj(s);
            if g > best {
                best = g;
                best_s = s;
            } else if best > 0.0 {
                break; // past the crest of a concave objective
            }
        }
        lo = best_s / 2.0;
        hi = best_s * 2.0;
    } else {
        lo = q.s_grid[best_i - 1];
        hi = q.s_grid[best_i + 1];
    }

    for _ in 0..q.refine_steps {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if obj(m1) < obj(m2) {
            lo = m1;
        } else {
            hi = m2;
        }
    }
    best = best.max(obj(0.5 * (lo + hi))).max(0.0);
    ExtendedValue::new(best)
}

/// Conjugate at one point with the default search grid.
pub fn conjugate_at(family: &PhiFamily, x: &Point, t: f64) -> ExtendedValue {
    let grid = default_s_grid();
    conjugate(&ConjugateQuery::new(family, x, t, &grid))
}

/// Wraps the conjugate as a new family on the same domain.
///
/// The conjugate of any family is convex with value 0 at 0, so its ratio
/// `phi*(x,t)/t` is increasing exactly and the almost-increasing constant
/// is 1. The tag stays weak: conjugates may jump to infinity.
pub fn conjugate_family(family: &PhiFamily) -> PhiFamily {
    let inner = family.clone();
    let grid = default_s_grid();
    PhiFamily::new(
        format!("{}*", family.name()),
        family.domain().clone(),
        Strength::Weak,
        1.0,
        move |x, t| conjugate(&ConjugateQuery::new(&inner, x, t, &grid)),
    )
}

/// Result of scanning `(phi*)^{-1}(x,tau) phi^{-1}(x,tau) / tau` over a
/// plan: the smallest constant c with `1/c <= product/tau <= c`.
#[derive(Clone, Debug)]
pub struct ProductCheck {
    pub constant: f64,
    pub refined_constant: f64,
    pub stable: bool,
    pub samples: usize,
}

/// The factor by which the constant may move under one grid refinement
/// before the verdict flips to unstable.
pub const PRODUCT_STABILITY_FACTOR: f64 = 1.2;

pub fn inverse_product_check(
    family: &PhiFamily,
    plan: &SamplePlan,
) -> Result<ProductCheck, InverseError> {
    let star = conjugate_family(family);
    let scan = |taus: &[f64]| -> Result<(f64, usize), InverseError> {
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        let mut n = 0usize;
        for x in &plan.x_points {
            for &tau in taus.iter().filter(|&&tau| tau > 0.0) {
                let p = inverse_at(family, x, tau)? * inverse_at(&star, x, tau)? / tau;
                lo = lo.min(p);
                hi = hi.max(p);
                n += 1;
            }
        }
        if n == 0 || lo <= 0.0 {
            return Ok((f64::INFINITY, n));
        }
        Ok((hi.max(1.0 / lo).max(1.0), n))
    };

    let (constant, samples) = scan(&plan.tau_grid)?;
    let denser = plan.with_denser_grids();
    let (refined_constant, _) = scan(&denser.tau_grid)?;
    let stable = constant.is_finite()
        && constant <= PRODUCT_CONSTANT_CAP
        && refined_constant <= constant * PRODUCT_STABILITY_FACTOR
        && constant <= refined_constant * PRODUCT_STABILITY_FACTOR;
    Ok(ProductCheck { constant, refined_constant, stable, samples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::SpatialDomain;
    use crate::family::Strength;
    use crate::gallery;
    use crate::plan::SamplePlan;

    fn family_fn(
        name: &str,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> PhiFamily {
        PhiFamily::new(name, SpatialDomain::unit_ball(1), Strength::Strong, 1.0, move |_x, t| {
            ExtendedValue::new(f(t))
        })
    }

    #[test]
    fn half_square_is_self_conjugate() {
        let phi = family_fn("s2/2", |s| s * s / 2.0);
        let v = conjugate_at(&phi, &Point::of(0.1), 3.0);
        assert!((v.as_f64() - 4.5).abs() < 1e-8, "got {v}");
    }

    #[test]
    fn linear_conjugate_is_the_indicator() {
        let phi = family_fn("s", |s| s);
        let x = Point::of(0.1);
        assert_eq!(conjugate_at(&phi, &x, 0.5), ExtendedValue::ZERO);
        assert!(conjugate_at(&phi, &x, 2.0).is_infinite());
    }

    #[test]
    fn quartic_conjugate_closed_form() {
        // (s^4/4)* = (3/4) t^{4/3}
        let phi = family_fn("s4/4", |s| s.powi(4) / 4.0);
        let x = Point::of(0.1);
        let v = conjugate_at(&phi, &x, 1.0);
        assert!((v.as_f64() - 0.75).abs() < 1e-8, "got {v}");
        let v = conjugate_at(&phi, &x, 2.5);
        let expected = 0.75 * 2.5f64.powf(4.0 / 3.0);
        assert!((v.as_f64() - expected).abs() < 1e-7 * expected, "got {v}");
    }

    #[test]
    fn punctured_example_conjugate_closed_form() {
        // (t^2/|x|)* = |x| t^2 / 4
        let phi = gallery::punctured_ball_example(1);
        let x = Point::of(0.4);
        for t in [0.3, 1.0, 7.0] {
            let v = conjugate_at(&phi, &x, t).as_f64();
            let expected = 0.4 * t * t / 4.0;
            assert!((v - expected).abs() < 1e-8 * (1.0 + expected), "t={t}: {v} vs {expected}");
        }
    }

    #[test]
    fn step_conjugate_is_linear() {
        let phi = gallery::step(SpatialDomain::unit_ball(1));
        let x = Point::of(0.2);
        for t in [0.5, 1.0, 3.0] {
            let v = conjugate_at(&phi, &x, t).as_f64();
            assert!((v - t).abs() < 1e-7 * (1.0 + t), "t={t}: got {v}");
        }
    }

    #[test]
    fn conjugate_is_monotone_in_t() {
        let phi = gallery::double_phase(2.0, 4.0, SpatialDomain::unit_ball(1));
        let x = Point::of(0.6);
        let mut prev = ExtendedValue::ZERO;
        for t in [0.0, 0.1, 0.5, 1.0, 4.0, 20.0] {
            let v = conjugate_at(&phi, &x, t);
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn square_product_constant_is_two() {
        // phi = t^2: phi^{-1} = sqrt(tau), phi* = t^2/4, (phi*)^{-1} =
        // 2 sqrt(tau), so the product over tau is exactly 2.
        let phi = gallery::orlicz_power(2.0, SpatialDomain::unit_ball(1));
        let plan = SamplePlan::compact_for(phi.domain());
        let r = inverse_product_check(&phi, &plan).unwrap();
        assert!((r.constant - 2.0).abs() < 1e-6, "constant {}", r.constant);
        assert!(r.stable);
    }

    #[test]
    fn linear_product_constant_is_finite() {
        let phi = gallery::orlicz_power(1.0, SpatialDomain::unit_ball(1));
        let plan = SamplePlan::compact_for(phi.domain());
        let r = inverse_product_check(&phi, &plan).unwrap();
        assert!(r.constant.is_finite() && r.constant <= PRODUCT_CONSTANT_CAP);
        assert!(r.stable);
    }

    #[test]
    fn conjugate_inverse_vanishes_at_zero() {
        // the degenerate endpoint of the product bound: (phi*)^{-1}(x, 0) = 0
        let phi = gallery::orlicz_power(2.0, SpatialDomain::unit_ball(1));
        let star = conjugate_family(&phi);
        let v = crate::inversion::inverse_at(&star, &Point::of(0.2), 0.0).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn biconjugate_of_strong_family_matches() {
        use crate::equivalence::{check_equivalence, EquivalenceKind};
        let phi = gallery::orlicz_power(2.0, SpatialDomain::unit_ball(1));
        let bi = conjugate_family(&conjugate_family(&phi));
        let plan = SamplePlan::compact_for(phi.domain());
        let cert = check_equivalence(&phi, &bi, EquivalenceKind::Valuewise, &plan).unwrap();
        assert!(cert.constant <= 1.0 + 1e-6, "c = {}", cert.constant);
    }
}
