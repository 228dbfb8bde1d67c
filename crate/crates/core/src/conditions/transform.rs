//! Constructive witness transformations between the equivalent
//! formulations of the decay condition, with the explicit constants the
//! equivalence arguments produce. Soundness is tested, not assumed: whenever
//! a source checker passes with w, the target checker must pass with the
//! transformed witness.

use crate::family::PhiFamily;

use super::{ConditionError, FormulationId, HFunction, Witness};

/// Constants the arrows may need beyond the witness itself.
#[derive(Clone, Copy, Debug, Default)]
pub struct TransformContext {
    /// The almost-increasing constant a of the family (the inverse is then
    /// a-almost decreasing over tau, which several arrows use).
    pub ainc_constant: f64,
    /// The (A0) constant, for the arrow out of `IntervalWithA0`.
    pub a0_beta: Option<f64>,
    /// The observed range of `phi^{-1}(., 1)`, for the arrow into A0.
    pub inv_range_at_one: Option<(f64, f64)>,
}

impl TransformContext {
    pub fn for_family(family: &PhiFamily) -> TransformContext {
        TransformContext { ainc_constant: family.ainc_constant(), ..Default::default() }
    }

    pub fn with_a0_beta(mut self, beta: f64) -> TransformContext {
        self.a0_beta = Some(beta);
        self
    }

    pub fn with_inv_range(mut self, range: (f64, f64)) -> TransformContext {
        self.inv_range_at_one = Some(range);
        self
    }
}

/// Transforms a witness along one proved arrow of the equivalence web.
///
/// Supported arrows and their constants:
///
/// * shifted <-> direct: unchanged (the iff argument preserves (beta, h));
/// * shifted -> max-form: `beta' = min{ beta/(2a), beta sigma/(4 a^2 ||h||_inf) }`,
///   h unchanged (the two pieces of the max need different reductions);
/// * max-form -> interval-small-h: unchanged when `||h||_inf <= sigma/2`,
///   otherwise `h' = (sigma / 2||h||_inf) h` and
///   `beta' = beta sigma / (2 a ||h||_inf)`;
/// * interval-with-A0 -> interval-small-h: `h' = min{h, sigma/2}` and
///   `beta' = min{ beta, a0^2 / (max{1, a sigma} max{1, 2a/sigma}) }`;
/// * interval-small-h -> A0: `beta' = beta min{ M, 1/m }` for the observed
///   range `[m, M]` of `phi^{-1}(., 1)`;
/// * interval-small-h -> direct: unchanged (the non-empty interval makes
///   the classical argument go through).
pub fn transform_witness(
    from: FormulationId,
    to: FormulationId,
    w: &Witness,
    ctx: &TransformContext,
) -> Result<Witness, ConditionError> {
    let a = ctx.ainc_constant.max(1.0);
    match (from, to) {
        (FormulationId::Shifted, FormulationId::Direct)
        | (FormulationId::Direct, FormulationId::Shifted)
        | (FormulationId::IntervalSmallH, FormulationId::Direct) => Ok(w.clone()),

        (FormulationId::Shifted, FormulationId::MaxForm) => {
            let sup = w.h.sup_bound();
            if sup == 0.0 {
                // h = 0 makes the max form literally the shifted form
                return Ok(w.clone());
            }
            let beta = (w.beta / (2.0 * a)).min(w.beta * w.sigma / (4.0 * a * a * sup));
            Witness::new(beta.min(1.0), w.h.clone(), w.sigma)
        }

        (FormulationId::MaxForm, FormulationId::IntervalSmallH) => {
            let sup = w.h.sup_bound();
            if sup <= w.sigma / 2.0 {
                // nothing to prove: the witness already qualifies
                return Ok(w.clone());
            }
            let factor = w.sigma / (2.0 * sup);
            let beta = w.beta * w.sigma / (2.0 * a * sup);
            Witness::new(beta.min(1.0), w.h.scale(factor), w.sigma)
        }

        (FormulationId::IntervalWithA0, FormulationId::IntervalSmallH) => {
            let a0 = ctx.a0_beta.ok_or(ConditionError::MissingContext("a0_beta"))?;
            let denom = (a * w.sigma).max(1.0) * (2.0 * a / w.sigma).max(1.0);
            let beta = w.beta.min(a0 * a0 / denom);
            Witness::new(beta.min(1.0), w.h.cap(w.sigma / 2.0), w.sigma)
        }

        (FormulationId::IntervalSmallH, FormulationId::A0) => {
            let (m, big) = ctx
                .inv_range_at_one
                .ok_or(ConditionError::MissingContext("inv_range_at_one"))?;
            if !(m > 0.0 && big >= m && big.is_finite()) {
                return Err(ConditionError::InvalidWitness(format!(
                    "degenerate inverse range [{m}, {big}]"
                )));
            }
            let beta = w.beta * big.min(1.0 / m);
            Witness::new(beta.min(1.0), HFunction::zero(), w.sigma)
        }

        (from, to) => Err(ConditionError::UnsupportedArrow { from, to }),
    }
}

/// The bounded-domain witness: on a bounded domain, a family with (A0) at
/// constant `a0_beta` satisfies the shifted condition with `h = chi_Omega`
/// and `beta = a0_beta^2 / max{1, a sigma}`.
pub fn construct_bounded_witness(
    family: &PhiFamily,
    sigma: f64,
    a0_beta: f64,
    a: f64,
) -> Result<Witness, ConditionError> {
    if !family.domain().is_bounded() {
        return Err(ConditionError::UnboundedDomain);
    }
    if !(a0_beta > 0.0 && a0_beta <= 1.0) {
        return Err(ConditionError::InvalidWitness(format!(
            "a0_beta = {a0_beta} is not a valid (A0) constant"
        )));
    }
    let h = HFunction::const_indicator(1.0, family.domain())?;
    let beta = a0_beta * a0_beta / (a * sigma).max(1.0);
    Witness::new(beta, h, sigma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conditions::checks::{check_a0, check_a2_shifted};
    use crate::domain::SpatialDomain;
    use crate::gallery;
    use crate::plan::SamplePlan;

    fn base_witness(beta: f64, level: f64, sigma: f64) -> Witness {
        let omega = SpatialDomain::unit_ball(1);
        let h = if level == 0.0 {
            HFunction::zero()
        } else {
            HFunction::const_indicator(level, &omega).unwrap()
        };
        Witness::new(beta, h, sigma).unwrap()
    }

    #[test]
    fn max_to_interval_scales_h_and_beta() {
        // beta = 1, sigma = 1, a = 1, ||h||_inf = 1: h' = h/2, beta' = 1/2
        let w = base_witness(1.0, 1.0, 1.0);
        let ctx = TransformContext { ainc_constant: 1.0, ..Default::default() };
        let t = transform_witness(FormulationId::MaxForm, FormulationId::IntervalSmallH, &w, &ctx)
            .unwrap();
        assert_eq!(t.beta, 0.5);
        assert_eq!(t.h.sup_bound(), 0.5);
    }

    #[test]
    fn max_to_interval_is_identity_for_small_h() {
        let w = base_witness(0.7, 0.4, 1.0);
        let ctx = TransformContext { ainc_constant: 1.0, ..Default::default() };
        let t = transform_witness(FormulationId::MaxForm, FormulationId::IntervalSmallH, &w, &ctx)
            .unwrap();
        assert_eq!(t.beta, 0.7);
        assert_eq!(t.h.sup_bound(), 0.4);
    }

    #[test]
    fn interval_with_a0_to_small_h() {
        // beta = 1, a = 1, sigma = 2: h' = min{h, 1},
        // beta' = 1 / (max{1,2} max{1,1}) = 1/2
        let w = base_witness(1.0, 2.0, 2.0);
        let ctx =
            TransformContext { ainc_constant: 1.0, a0_beta: Some(1.0), ..Default::default() };
        let t = transform_witness(
            FormulationId::IntervalWithA0,
            FormulationId::IntervalSmallH,
            &w,
            &ctx,
        )
        .unwrap();
        assert_eq!(t.beta, 0.5);
        assert_eq!(t.h.sup_bound(), 1.0);
    }

    #[test]
    fn zero_h_makes_shifted_to_max_the_identity() {
        let w = base_witness(0.8, 0.0, 1.0);
        let ctx = TransformContext { ainc_constant: 1.0, ..Default::default() };
        let t =
            transform_witness(FormulationId::Shifted, FormulationId::MaxForm, &w, &ctx).unwrap();
        assert_eq!(t.beta, 0.8);
    }

    #[test]
    fn unsupported_arrows_error() {
        let w = base_witness(1.0, 0.0, 1.0);
        let ctx = TransformContext::default();
        assert!(matches!(
            transform_witness(FormulationId::A0, FormulationId::Shifted, &w, &ctx),
            Err(ConditionError::UnsupportedArrow { .. })
        ));
    }

    #[test]
    fn bounded_witness_formula_and_checker() {
        let phi = gallery::variable_exponent(SpatialDomain::unit_ball(1));
        let plan = SamplePlan::default_for(phi.domain());
        let a0 = check_a0(&phi, &plan);
        let beta0 = a0.report.best_beta.unwrap();

        for sigma in [0.5, 1.0, 4.0] {
            let w = construct_bounded_witness(&phi, sigma, beta0, phi.ainc_constant()).unwrap();
            assert_eq!(w.beta, beta0 * beta0 / (phi.ainc_constant() * sigma).max(1.0));
            let r = check_a2_shifted(&phi, &w, &plan);
            assert!(r.holds(), "sigma = {sigma}: {:?}", r.violation);
        }
    }

    #[test]
    fn bounded_witness_rejects_unbounded_domains() {
        let line = SpatialDomain::new_box(vec![f64::NEG_INFINITY], vec![f64::INFINITY]).unwrap();
        let phi = gallery::orlicz_power(2.0, line);
        assert!(matches!(
            construct_bounded_witness(&phi, 1.0, 1.0, 1.0),
            Err(ConditionError::UnboundedDomain)
        ));
    }

    #[test]
    fn bounded_witness_rejects_invalid_a0_constant() {
        let phi = gallery::punctured_ball_example(1);
        // a violated (A0) has no usable constant; 0 must be rejected
        assert!(construct_bounded_witness(&phi, 1.0, 0.0, 1.0).is_err());
    }
}
