//! Finite sample plans standing in for the "a.e. x, y in Omega" and
//! "every t" quantifiers of the conditions.
//!
//! A plan fixes spatial sample points (including geometric approach
//! sequences toward excluded points and the domain boundary, where the
//! interesting blow-ups live), log-spaced t and tau grids, and a family of
//! small balls for the local condition (A1). Plans are deterministic: the
//! same parameters always produce the same samples.

use crate::domain::{Point, SpatialDomain};

/// A ball used by the local condition (A1).
#[derive(Clone, Debug)]
pub struct Ball {
    pub center: Point,
    pub radius: f64,
}

impl Ball {
    pub fn volume(&self, dimension: usize) -> f64 {
        crate::domain::unit_ball_volume(dimension) * self.radius.powi(dimension as i32)
    }

    pub fn contains(&self, p: &Point) -> bool {
        p.dist(&self.center) < self.radius
    }
}

/// Parameters from which a plan is derived; kept so plans can be refined.
#[derive(Clone, Copy, Debug)]
pub struct PlanParams {
    /// Lattice density per axis for the spatial samples.
    pub x_per_axis: usize,
    /// Number of log-spaced grid points (0 is always added on top).
    pub grid_points: usize,
    /// Span of the log grids.
    pub grid_span: (f64, f64),
    /// Depth of the geometric approach toward excluded points / boundary.
    pub refinement_depth: u32,
    /// Dyadic ball radii 2^-k for k in 1..=ball_scales.
    pub ball_scales: u32,
}

impl Default for PlanParams {
    fn default() -> PlanParams {
        PlanParams {
            // dense enough that even a single-tau interval sweep clears
            // 1e4 pair tuples together with its refinement
            x_per_axis: 24,
            grid_points: 400,
            grid_span: (1e-8, 1e8),
            refinement_depth: 12,
            ball_scales: 4,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SamplePlan {
    pub x_points: Vec<Point>,
    /// Strictly increasing, contains 0 and values >= 1e6.
    pub t_grid: Vec<f64>,
    pub tau_grid: Vec<f64>,
    pub ball_family: Vec<Ball>,
    pub params: PlanParams,
}

/// `n` log-spaced values over `[lo, hi]`, with 0 prepended.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && n >= 2);
    let (llo, lhi) = (lo.log10(), hi.log10());
    let mut g = Vec::with_capacity(n + 1);
    g.push(0.0);
    for i in 0..n {
        g.push(10f64.powf(llo + (lhi - llo) * i as f64 / (n - 1) as f64));
    }
    g
}

impl SamplePlan {
    /// The default plan for a domain; the per-axis lattice density drops
    /// in higher dimensions to keep pair sweeps at desk scale.
    pub fn default_for(domain: &SpatialDomain) -> SamplePlan {
        let mut params = PlanParams::default();
        if domain.dimension() > 1 {
            params.x_per_axis = 6;
        }
        SamplePlan::with_params(domain, params)
    }

    pub fn with_params(domain: &SpatialDomain, params: PlanParams) -> SamplePlan {
        let grid = log_grid(params.grid_span.0, params.grid_span.1, params.grid_points);
        SamplePlan {
            x_points: spatial_samples(domain, &params),
            t_grid: grid.clone(),
            tau_grid: grid,
            ball_family: ball_family(domain, &params),
            params,
        }
    }

    /// One refinement step: doubled lattice and grid densities, doubled
    /// approach depth (capped at 60).
    pub fn refine(&self, domain: &SpatialDomain) -> SamplePlan {
        let params = PlanParams {
            x_per_axis: self.params.x_per_axis * 2,
            grid_points: self.params.grid_points * 2,
            refinement_depth: (self.params.refinement_depth * 2).min(60),
            ..self.params
        };
        SamplePlan::with_params(domain, params)
    }

    /// Same spatial samples and balls, denser t/tau grids.
    pub fn with_denser_grids(&self) -> SamplePlan {
        let params = PlanParams { grid_points: self.params.grid_points * 2, ..self.params };
        let grid = log_grid(params.grid_span.0, params.grid_span.1, params.grid_points);
        SamplePlan {
            x_points: self.x_points.clone(),
            t_grid: grid.clone(),
            tau_grid: grid,
            ball_family: self.ball_family.clone(),
            params,
        }
    }

    /// A plan with coarser grids and fewer points, for sweeps over
    /// expensive wrapped families (numerical conjugates).
    pub fn compact_for(domain: &SpatialDomain) -> SamplePlan {
        SamplePlan::with_params(
            domain,
            PlanParams { x_per_axis: 3, grid_points: 48, refinement_depth: 4, ..PlanParams::default() },
        )
    }

    /// Tau samples restricted to `[lo, hi]`, with the interval endpoints
    /// always included. The log grids contain no round values (1.0 is
    /// off-grid), so interval sweeps must add the endpoints themselves or
    /// single-point intervals would never be sampled.
    pub fn taus_in(&self, lo: f64, hi: f64) -> Vec<f64> {
        if lo > hi {
            return Vec::new();
        }
        let mut taus: Vec<f64> =
            self.tau_grid.iter().copied().filter(|&t| t > lo && t < hi).collect();
        taus.insert(0, lo);
        if hi > lo {
            taus.push(hi);
        }
        taus
    }
}

fn axis_directions(dimension: usize) -> Vec<Vec<f64>> {
    let mut dirs = Vec::with_capacity(2 * dimension);
    for axis in 0..dimension {
        for sign in [1.0, -1.0] {
            let mut d = vec![0.0; dimension];
            d[axis] = sign;
            dirs.push(d);
        }
    }
    dirs
}

/// Lattice samples plus geometric approach sequences toward every excluded
/// point and toward the boundary.
fn spatial_samples(domain: &SpatialDomain, params: &PlanParams) -> Vec<Point> {
    let dim = domain.dimension();
    let (lo, hi) = domain.bounding_box();
    // Unbounded sides get a finite sampling window.
    let lo: Vec<f64> = lo.iter().map(|&c| if c.is_finite() { c } else { -8.0 }).collect();
    let hi: Vec<f64> = hi.iter().map(|&c| if c.is_finite() { c } else { 8.0 }).collect();

    let k = params.x_per_axis;
    let mut points = Vec::new();
    let mut index = vec![0usize; dim];
    loop {
        let coords: Vec<f64> = (0..dim)
            .map(|a| lo[a] + (index[a] as f64 + 0.5) / k as f64 * (hi[a] - lo[a]))
            .collect();
        points.push(Point::new(coords));
        // odometer increment
        let mut axis = 0;
        loop {
            index[axis] += 1;
            if index[axis] < k {
                break;
            }
            index[axis] = 0;
            axis += 1;
            if axis == dim {
                break;
            }
        }
        if axis == dim {
            break;
        }
    }

    let scale = domain.characteristic_length() / 2.0;
    let dirs = axis_directions(dim);
    for e in domain.excluded_points() {
        for d in 1..=params.refinement_depth {
            let step = scale * 0.5f64.powi(d as i32);
            for dir in &dirs {
                points.push(e.offset(dir, step));
            }
        }
    }
    // boundary approach, from the center of the bounding box outward
    let center = Point::new(lo.iter().zip(hi.iter()).map(|(a, b)| (a + b) / 2.0).collect());
    if domain.is_bounded() {
        for d in 1..=params.refinement_depth {
            let frac = 1.0 - 0.5f64.powi(d as i32);
            for dir in &dirs {
                points.push(center.offset(dir, scale * 2.0 * frac));
            }
        }
    }

    points.retain(|p| domain.contains(p));
    points
}

/// Balls with centers on a lattice and dyadic radii, all with volume <= 1
/// so that the tau range `[1, 1/|B|]` of (A1) is nonempty.
fn ball_family(domain: &SpatialDomain, params: &PlanParams) -> Vec<Ball> {
    let dim = domain.dimension();
    let unit_vol = crate::domain::unit_ball_volume(dim);
    let centers = spatial_samples(
        domain,
        &PlanParams { x_per_axis: 3, refinement_depth: 2, ..*params },
    );
    let mut balls = Vec::new();
    for k in 1..=params.ball_scales {
        let radius = 0.5f64.powi(k as i32);
        if unit_vol * radius.powi(dim as i32) > 1.0 {
            continue;
        }
        for c in &centers {
            balls.push(Ball { center: c.clone(), radius });
        }
    }
    // balls around excluded points: the interesting ones for blow-up
    for e in domain.excluded_points() {
        for k in 1..=params.ball_scales {
            let radius = 0.5f64.powi(k as i32);
            if unit_vol * radius.powi(dim as i32) > 1.0 {
                continue;
            }
            balls.push(Ball { center: e.clone(), radius });
        }
    }
    balls
}

/// Deterministic sample points inside `Omega intersect B`: the center, and
/// offsets at a few fractions of the radius in every axis direction,
/// plus approach points toward any excluded point inside the ball.
pub fn ball_samples(domain: &SpatialDomain, ball: &Ball, depth: u32) -> Vec<Point> {
    let dirs = axis_directions(domain.dimension());
    let mut pts = vec![ball.center.clone()];
    for frac in [0.2, 0.5, 0.8] {
        for dir in &dirs {
            pts.push(ball.center.offset(dir, frac * ball.radius));
        }
    }
    for e in domain.excluded_points() {
        if ball.contains(e) {
            for d in 1..=depth {
                let step = ball.radius * 0.5f64.powi(d as i32);
                for dir in &dirs {
                    pts.push(e.offset(dir, step));
                }
            }
        }
    }
    pts.retain(|p| domain.contains(p) && ball.contains(p));
    pts
}
