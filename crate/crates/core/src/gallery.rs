//! Named Phi-families used by the checkers, the CLI and the tests.

use crate::domain::{Point, SpatialDomain};
use crate::extended::ExtendedValue;
use crate::family::{PhiFamily, Strength};

/// `phi(x, t) = t^p`, x-independent.
pub fn orlicz_power(p: f64, domain: SpatialDomain) -> PhiFamily {
    assert!(p >= 1.0, "orlicz_power needs p >= 1");
    PhiFamily::new(format!("orlicz_power(p={p})"), domain, Strength::Strong, 1.0, move |_x, t| {
        ExtendedValue::new(t.powf(p))
    })
    .with_declared_ainc(p, 1.0)
    .with_declared_adec(p, 1.0)
}

/// The exponent function of [`variable_exponent`]: Lipschitz, with values
/// in `[2, 4]`.
pub fn variable_exponent_p(x: &Point) -> f64 {
    (3.0 + x.coords()[0]).clamp(2.0, 4.0)
}

/// `phi(x, t) = t^{p(x)}` with `p(x) = 3 + x_1` clamped to `[2, 4]`.
pub fn variable_exponent(domain: SpatialDomain) -> PhiFamily {
    PhiFamily::new("variable_exponent", domain, Strength::Strong, 1.0, |x, t| {
        ExtendedValue::new(t.powf(variable_exponent_p(x)))
    })
    .with_declared_ainc(2.0, 1.0)
    .with_declared_adec(4.0, 1.0)
}

/// The weight of [`double_phase`]: `a(x) = min(|x|, 1)`.
pub fn double_phase_weight(x: &Point) -> f64 {
    x.norm().min(1.0)
}

/// `phi(x, t) = t^p + a(x) t^q` with the weight `a(x) = min(|x|, 1)`.
pub fn double_phase(p: f64, q: f64, domain: SpatialDomain) -> PhiFamily {
    assert!(1.0 <= p && p <= q);
    PhiFamily::new(
        format!("double_phase(p={p},q={q})"),
        domain,
        Strength::Strong,
        1.0,
        move |x, t| ExtendedValue::new(t.powf(p) + double_phase_weight(x) * t.powf(q)),
    )
    .with_declared_ainc(p, 1.0)
    .with_declared_adec(q, 1.0)
}

/// `phi(x, t) = t^2 / |x|` on the punctured unit ball `B(0,1) \ {0}`.
///
/// The weight blows up toward the puncture, so (A0), (A1) and the direct
/// form of (A2) all fail near 0 while the interval form holds vacuously
/// with `h = sigma` on the whole domain.
pub fn punctured_ball_example(dimension: usize) -> PhiFamily {
    let domain = SpatialDomain::unit_ball(dimension)
        .exclude(Point::new(vec![0.0; dimension]))
        .expect("origin lies in the unit ball");
    PhiFamily::new("example_1_1", domain, Strength::Strong, 1.0, |x, t| {
        ExtendedValue::new(t * t / x.norm())
    })
    .with_declared_ainc(2.0, 1.0)
}

/// `phi(x, t) = 0` for `t <= 1` and `+inf` for `t > 1` (the L-infinity
/// generator). Weak but not strong: it jumps from 0 to infinity.
pub fn step(domain: SpatialDomain) -> PhiFamily {
    PhiFamily::new("step", domain, Strength::Weak, 1.0, |_x, t| {
        if t <= 1.0 {
            ExtendedValue::ZERO
        } else {
            ExtendedValue::INFINITY
        }
    })
}

/// The gallery entries constructible by name, with the parameters each one
/// accepts. Used by the CLI.
pub fn catalog() -> Vec<(&'static str, &'static str)> {
    vec![
        ("orlicz_power", "t^p (params: p; default p=2)"),
        ("variable_exponent", "t^{p(x)}, p(x) = 3 + x_1 clamped to [2,4]"),
        ("double_phase", "t^p + a(x) t^q, a(x) = min(|x|,1) (params: p, q; defaults 2, 4)"),
        ("example_1_1", "t^2/|x| on the punctured unit ball"),
        ("step", "0 for t <= 1, +inf for t > 1"),
    ]
}

/// Constructs a gallery family by its catalog name.
pub fn by_name(
    name: &str,
    p: f64,
    q: f64,
    domain: SpatialDomain,
) -> Result<PhiFamily, String> {
    match name {
        "orlicz_power" => Ok(orlicz_power(p, domain)),
        "variable_exponent" => Ok(variable_exponent(domain)),
        "double_phase" => Ok(double_phase(p, q, domain)),
        "example_1_1" => Ok(punctured_ball_example(domain.dimension())),
        "step" => Ok(step(domain)),
        other => Err(format!("unknown family '{other}'")),
    }
}
