//! Numerical calculus for generalized Orlicz (Musielak--Orlicz) weak
//! Phi-functions.
//!
//! The crate computes generalized left-inverses and Legendre--Fenchel
//! conjugates of spatially parametrized Phi-functions, checks the
//! harmonic-analysis conditions (A0), (A1) and the decay condition (A2) in
//! its equivalent formulations, applies the constructive witness
//! transformations between those formulations, and provides the integral
//! modular, the Luxemburg norm and a mollification-convergence experiment.
//!
//! Everything operates at desk scale: almost-everywhere quantifiers are
//! modeled by finite sample plans with explicit exceptional-point exclusion
//! lists, so verdicts are always `holds_on_samples` or `violated`, never
//! proofs.

pub mod classify;
pub mod conditions;
pub mod conjugation;
pub mod domain;
pub mod equivalence;
pub mod extended;
pub mod family;
pub mod gallery;
pub mod growth;
pub mod inversion;
pub mod modular;
pub mod plan;

pub use conditions::{
    check_a0, check_a1, check_a2_direct, check_a2_interval, check_a2_max, check_a2_shifted,
    construct_bounded_witness, counterexample_search, implication_suite, search_witness,
    transform_witness, ConditionId, ConditionReport, FormulationId, HFunction, SearchConfig,
    SearchOutcome, TransformContext, Verdict, ViolationCertificate, Witness,
};
pub use domain::{Point, Shape, SpatialDomain};
pub use extended::ExtendedValue;
pub use family::{PhiFamily, Strength};
pub use plan::{Ball, SamplePlan};
