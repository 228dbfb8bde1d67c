//! Cross-module invariants: soundness of every witness transformation on
//! the gallery, invariance of the decay condition under argument
//! rescaling, and its transfer to the conjugate family.

use orlicz_core::conjugation::{conjugate_family, inverse_product_check};
use orlicz_core::domain::{Point, SpatialDomain};
use orlicz_core::equivalence::{check_equivalence, EquivalenceKind};
use orlicz_core::extended::ExtendedValue;
use orlicz_core::family::{PhiFamily, Strength};
use orlicz_core::gallery;
use orlicz_core::plan::SamplePlan;
use orlicz_core::{
    check_a0, check_a2_direct, check_a2_interval, check_a2_max, check_a2_shifted,
    construct_bounded_witness, transform_witness, FormulationId, TransformContext,
    Witness,
};

fn certified_families() -> Vec<PhiFamily> {
    vec![
        gallery::orlicz_power(2.0, SpatialDomain::unit_ball(1)),
        gallery::variable_exponent(SpatialDomain::unit_ball(1)),
        gallery::double_phase(2.0, 4.0, SpatialDomain::unit_ball(1)),
        gallery::step(SpatialDomain::unit_ball(1)),
    ]
}

/// Every proved arrow, quantified over the certified gallery: if the
/// source checker passes with w, the target checker passes with the
/// transformed witness on the same plan.
#[test]
fn transforms_are_sound_on_the_gallery() {
    for phi in certified_families() {
        let plan = SamplePlan::default_for(phi.domain());
        let a0 = check_a0(&phi, &plan);
        assert!(a0.report.holds(), "{} should satisfy the nondegeneracy condition", phi.name());
        let beta0 = a0.report.best_beta.unwrap();
        let a = phi.ainc_constant();
        let ctx = TransformContext::for_family(&phi)
            .with_a0_beta(beta0)
            .with_inv_range(a0.inv_range);

        let w1 = construct_bounded_witness(&phi, 1.0, beta0, a).unwrap();
        let r1 = check_a2_shifted(&phi, &w1, &plan);
        assert!(r1.holds(), "{}: shifted failed: {:?}", phi.name(), r1.violation);

        let w2 = transform_witness(FormulationId::Shifted, FormulationId::Direct, &w1, &ctx).unwrap();
        let r2 = check_a2_direct(&phi, &w2, &plan);
        assert!(r2.holds(), "{}: direct failed: {:?}", phi.name(), r2.violation);

        let w3 = transform_witness(FormulationId::Shifted, FormulationId::MaxForm, &w1, &ctx).unwrap();
        let r3 = check_a2_max(&phi, &w3, &plan);
        assert!(r3.holds(), "{}: max failed: {:?}", phi.name(), r3.violation);

        let w4 =
            transform_witness(FormulationId::MaxForm, FormulationId::IntervalSmallH, &w3, &ctx)
                .unwrap();
        assert!(w4.h.sup_bound() <= w4.sigma / 2.0);
        let r4 = check_a2_interval(&phi, &w4, &plan);
        assert!(r4.holds(), "{}: interval failed: {:?}", phi.name(), r4.violation);

        // interval + A0 back down to a small-h interval witness
        let w5 = transform_witness(
            FormulationId::IntervalWithA0,
            FormulationId::IntervalSmallH,
            &w1,
            &ctx,
        )
        .unwrap();
        let r5 = check_a2_interval(&phi, &w5, &plan);
        assert!(r5.holds(), "{}: interval (from A0 arrow) failed: {:?}", phi.name(), r5.violation);

        // and the arrow into (A0): the predicted constant is attained
        let wa0 =
            transform_witness(FormulationId::IntervalSmallH, FormulationId::A0, &w4, &ctx).unwrap();
        assert!(
            beta0 >= wa0.beta * (1.0 - 1e-9),
            "{}: achieved (A0) constant {beta0} below predicted {}",
            phi.name(),
            wa0.beta
        );
    }
}

/// Argument rescaling invariance: for psi(x, t) = phi(x, t/L), certified
/// equivalent with constant L, the shifted-condition verdict transports
/// with beta adjusted by L^2.
#[test]
fn shifted_condition_is_invariant_under_rescaling() {
    let l = std::f64::consts::SQRT_2;
    let phi = gallery::variable_exponent(SpatialDomain::unit_ball(1));
    let inner = phi.clone();
    let psi = PhiFamily::new(
        "variable_exponent_rescaled",
        phi.domain().clone(),
        Strength::Strong,
        1.0,
        move |x, t| inner.eval_raw(x, t / l),
    );
    let plan = SamplePlan::default_for(phi.domain());

    let cert = check_equivalence(&phi, &psi, EquivalenceKind::Argumentwise, &plan).unwrap();
    assert!(cert.constant <= l * (1.0 + 1e-6), "certified constant {}", cert.constant);

    let a0 = check_a0(&phi, &plan);
    let w = construct_bounded_witness(&phi, 1.0, a0.report.best_beta.unwrap(), 1.0).unwrap();
    assert!(check_a2_shifted(&phi, &w, &plan).holds());

    let adjusted = Witness::new(w.beta / (l * l), w.h.clone(), w.sigma).unwrap();
    let r = check_a2_shifted(&psi, &adjusted, &plan);
    assert!(r.holds(), "rescaled family failed with adjusted beta: {:?}", r.violation);
}

/// Conjugate transfer: a family passing the shifted condition hands a
/// witness to its conjugate, with beta divided by the square of the
/// inverse-product constant and the h-cap transformation applied.
#[test]
fn shifted_condition_transfers_to_the_conjugate() {
    for phi in certified_families() {
        let plan = SamplePlan::default_for(phi.domain());
        let compact = SamplePlan::compact_for(phi.domain());

        let a0 = check_a0(&phi, &plan);
        let w = construct_bounded_witness(&phi, 1.0, a0.report.best_beta.unwrap(), 1.0).unwrap();
        assert!(check_a2_shifted(&phi, &w, &plan).holds());

        let product = inverse_product_check(&phi, &compact).unwrap();
        assert!(product.stable, "{}: product constant unstable", phi.name());
        let c = product.constant;

        // phi's max-form constant divides by c^2 to give the conjugate's
        // max-form witness; the h-cap arrow turns that into a small-h
        // interval witness, and from there the walk back to the shifted
        // form leaves the witness unchanged
        let star = conjugate_family(&phi);
        let ctx_phi = TransformContext::for_family(&phi);
        let w_max_phi =
            transform_witness(FormulationId::Shifted, FormulationId::MaxForm, &w, &ctx_phi)
                .unwrap();
        let w_max_star =
            Witness::new((w_max_phi.beta / (c * c)).min(1.0), w_max_phi.h.clone(), w.sigma)
                .unwrap();
        let ctx_star = TransformContext { ainc_constant: 1.0, ..Default::default() };
        let w_star = transform_witness(
            FormulationId::MaxForm,
            FormulationId::IntervalSmallH,
            &w_max_star,
            &ctx_star,
        )
        .unwrap();
        let r = check_a2_shifted(&star, &w_star, &compact);
        assert!(r.holds(), "{}: conjugate failed: {:?}", phi.name(), r.violation);
    }
}

/// The biconjugate of a strong family is valuewise equivalent to it.
#[test]
fn biconjugate_matches_strong_families() {
    for phi in [
        gallery::orlicz_power(2.0, SpatialDomain::unit_ball(1)),
        gallery::variable_exponent(SpatialDomain::unit_ball(1)),
        gallery::double_phase(2.0, 4.0, SpatialDomain::unit_ball(1)),
        gallery::punctured_ball_example(1),
    ] {
        let plan = SamplePlan::compact_for(phi.domain());
        let bi = conjugate_family(&conjugate_family(&phi));
        let cert = check_equivalence(&phi, &bi, EquivalenceKind::Valuewise, &plan).unwrap();
        assert!(cert.constant <= 1.02, "{}: c = {}", phi.name(), cert.constant);
    }
}

/// The conjugate of the punctured example has the closed form
/// |x| t^2 / 4, and the wrapped conjugate passes classification as a
/// Phi-family on the default plan.
#[test]
fn conjugate_family_classifies_weak() {
    use orlicz_core::classify::{classify, ClassifiedStrength};
    let phi = gallery::punctured_ball_example(1);
    let star = conjugate_family(&phi);
    let x = Point::of(0.35);
    for t in [0.5, 2.0] {
        let got = star.eval_raw(&x, t).as_f64();
        let expected = 0.35 * t * t / 4.0;
        assert!((got - expected).abs() <= 1e-8 * (1.0 + expected));
    }
    let plan = SamplePlan::default_for(phi.domain());
    let c = classify(&star, &plan);
    assert_ne!(c.strength, ClassifiedStrength::NotPhi, "violations: {:?}", c.violations);
}

/// Equivalent families produce equal growth verdicts; sanity-check the
/// valuewise certificate too.
#[test]
fn valuewise_equivalence_certifies_scaled_family() {
    let phi = gallery::double_phase(2.0, 4.0, SpatialDomain::unit_ball(1));
    let inner = phi.clone();
    let psi = PhiFamily::new(
        "double_phase_scaled",
        phi.domain().clone(),
        Strength::Strong,
        1.0,
        move |x, t| inner.eval_raw(x, t) * ExtendedValue::finite(3.0),
    );
    let plan = SamplePlan::default_for(phi.domain());
    let cert = check_equivalence(&phi, &psi, EquivalenceKind::Valuewise, &plan).unwrap();
    assert!((cert.constant - 3.0).abs() < 1e-9);
}
