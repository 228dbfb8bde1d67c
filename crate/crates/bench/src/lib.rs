//! Shared fixtures for the benchmarks.

use orlicz_core::domain::SpatialDomain;
use orlicz_core::gallery;
use orlicz_core::modular::{bump, SampledFunction};
use orlicz_core::plan::{PlanParams, SamplePlan};
use orlicz_core::PhiFamily;

pub fn double_phase_1d() -> PhiFamily {
    gallery::double_phase(2.0, 4.0, SpatialDomain::unit_ball(1))
}

pub fn variable_exponent_1d() -> PhiFamily {
    gallery::variable_exponent(SpatialDomain::unit_ball(1))
}

/// A trimmed plan: sweeps stay in the millisecond range.
pub fn bench_plan(family: &PhiFamily) -> SamplePlan {
    SamplePlan::with_params(
        family.domain(),
        PlanParams { x_per_axis: 6, grid_points: 100, refinement_depth: 4, ..PlanParams::default() },
    )
}

pub fn bump_function(n: usize) -> SampledFunction {
    SampledFunction::from_fn(&[-2.0], &[2.0], n, bump(0.5))
}
