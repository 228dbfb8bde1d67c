//! Spatial domains: axis-aligned boxes and balls with an explicit list of
//! excluded exceptional points (the finite stand-in for measure-zero sets).

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum DomainError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("excluded point {0} lies outside the domain shape")]
    ExcludedOutsideShape(Point),
    #[error("invalid shape parameter: {0}")]
    InvalidShape(String),
}

/// A point in `R^n`.
#[derive(Clone, PartialEq)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Point {
        assert!(!coords.is_empty(), "points need at least one coordinate");
        assert!(coords.iter().all(|c| c.is_finite()), "point coordinates must be finite");
        Point(coords)
    }

    /// One-dimensional point.
    pub fn of(x: f64) -> Point {
        Point::new(vec![x])
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Euclidean norm |x|.
    pub fn norm(&self) -> f64 {
        self.0.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn dist(&self, other: &Point) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    /// `self + scale * dir`, coordinatewise.
    pub fn offset(&self, dir: &[f64], scale: f64) -> Point {
        Point::new(
            self.0
                .iter()
                .zip(dir.iter())
                .map(|(a, d)| a + scale * d)
                .collect(),
        )
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Shape of a domain. Boxes may have infinite sides, which models
/// unbounded domains such as the whole space.
#[derive(Clone, Debug)]
pub enum Shape {
    /// Axis-aligned box `[lo_1, hi_1] x ... x [lo_n, hi_n]`.
    Box { lo: Vec<f64>, hi: Vec<f64> },
    /// Open ball `{ |x - center| < radius }`.
    Ball { center: Point, radius: f64 },
}

/// A spatial domain `Omega` together with its exceptional points.
#[derive(Clone, Debug)]
pub struct SpatialDomain {
    shape: Shape,
    dimension: usize,
    excluded: Vec<Point>,
    bounded: bool,
    /// Lebesgue volume of the shape; `f64::INFINITY` when unbounded.
    measure: f64,
}

/// Volume of the n-dimensional unit ball, v_n = v_{n-2} * 2 pi / n.
pub fn unit_ball_volume(n: usize) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0,
        _ => unit_ball_volume(n - 2) * 2.0 * std::f64::consts::PI / n as f64,
    }
}

impl SpatialDomain {
    pub fn new_box(lo: Vec<f64>, hi: Vec<f64>) -> Result<SpatialDomain, DomainError> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(DomainError::InvalidShape(
                "box corners must have equal, positive dimension".into(),
            ));
        }
        if lo.iter().zip(hi.iter()).any(|(a, b)| a >= b) {
            return Err(DomainError::InvalidShape("box sides must have positive length".into()));
        }
        let dimension = lo.len();
        let bounded = lo.iter().chain(hi.iter()).all(|c| c.is_finite());
        let measure = if bounded {
            lo.iter().zip(hi.iter()).map(|(a, b)| b - a).product()
        } else {
            f64::INFINITY
        };
        Ok(SpatialDomain {
            shape: Shape::Box { lo, hi },
            dimension,
            excluded: Vec::new(),
            bounded,
            measure,
        })
    }

    pub fn new_ball(center: Point, radius: f64) -> Result<SpatialDomain, DomainError> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(DomainError::InvalidShape(format!("ball radius must be positive: {radius}")));
        }
        let dimension = center.dim();
        let measure = unit_ball_volume(dimension) * radius.powi(dimension as i32);
        Ok(SpatialDomain {
            shape: Shape::Ball { center, radius },
            dimension,
            excluded: Vec::new(),
            bounded: true,
            measure,
        })
    }

    /// The open unit ball centered at the origin.
    pub fn unit_ball(dimension: usize) -> SpatialDomain {
        SpatialDomain::new_ball(Point::new(vec![0.0; dimension]), 1.0)
            .expect("unit ball is a valid shape")
    }

    /// Adds an exceptional point; it must lie inside the shape.
    pub fn exclude(mut self, p: Point) -> Result<SpatialDomain, DomainError> {
        if p.dim() != self.dimension {
            return Err(DomainError::DimensionMismatch { expected: self.dimension, got: p.dim() });
        }
        if !self.shape_contains(&p) {
            return Err(DomainError::ExcludedOutsideShape(p));
        }
        self.excluded.push(p);
        Ok(self)
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn excluded_points(&self) -> &[Point] {
        &self.excluded
    }

    pub fn is_bounded(&self) -> bool {
        self.bounded
    }

    pub fn measure(&self) -> f64 {
        self.measure
    }

    fn shape_contains(&self, p: &Point) -> bool {
        match &self.shape {
            Shape::Box { lo, hi } => p
                .coords()
                .iter()
                .zip(lo.iter().zip(hi.iter()))
                .all(|(c, (a, b))| a <= c && c <= b),
            Shape::Ball { center, radius } => p.dist(center) < *radius,
        }
    }

    /// True when `p` is an admissible sample: inside the shape and not an
    /// exceptional point.
    pub fn contains(&self, p: &Point) -> bool {
        p.dim() == self.dimension && self.shape_contains(p) && !self.is_excluded(p)
    }

    /// Exact-coordinate membership in the exceptional list.
    pub fn is_excluded(&self, p: &Point) -> bool {
        self.excluded.iter().any(|e| e == p)
    }

    /// A bounding box `[lo, hi]` of the shape (finite only when bounded).
    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        match &self.shape {
            Shape::Box { lo, hi } => (lo.clone(), hi.clone()),
            Shape::Ball { center, radius } => (
                center.coords().iter().map(|c| c - radius).collect(),
                center.coords().iter().map(|c| c + radius).collect(),
            ),
        }
    }

    /// Half of the shortest side of the bounding box; a scale for sampling
    /// offsets. Falls back to 1 for unbounded domains.
    pub fn characteristic_length(&self) -> f64 {
        let (lo, hi) = self.bounding_box();
        let side = lo
            .iter()
            .zip(hi.iter())
            .map(|(a, b)| b - a)
            .fold(f64::INFINITY, f64::min);
        if side.is_finite() {
            side / 2.0
        } else {
            1.0
        }
    }
}
