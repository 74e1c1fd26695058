//! Points, balls, and box domains in n dimensions.
//!
//! Everything here is dimension-generic (n >= 2). Geometric predicates use a
//! relative tolerance of [`GEOM_REL_TOL`] so that packings assembled from
//! touching balls do not report spurious overlaps.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance for geometric predicates (disjointness, containment).
pub const GEOM_REL_TOL: f64 = 1e-12;

/// A point in R^n.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Point(pub DVector<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Point(DVector::from_vec(coords))
    }

    pub fn zeros(dim: usize) -> Self {
        Point(DVector::zeros(dim))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &DVector<f64> {
        &self.0
    }

    pub fn dist(&self, other: &Point) -> f64 {
        (&self.0 - &other.0).norm()
    }

    pub(crate) fn check_dim(&self, expected: usize) -> Result<()> {
        if self.dim() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                got: self.dim(),
            });
        }
        Ok(())
    }
}

impl From<Vec<f64>> for Point {
    fn from(v: Vec<f64>) -> Self {
        Point::new(v)
    }
}

/// An open ball B(center, radius).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Point,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: Point, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "ball radius must be positive and finite, got {radius}"
            )));
        }
        Ok(Ball { center, radius })
    }

    pub fn dim(&self) -> usize {
        self.center.dim()
    }

    /// The concentric ball aB with 0 < a < 1.
    pub fn scaled(&self, a: f64) -> Ball {
        Ball {
            center: self.center.clone(),
            radius: a * self.radius,
        }
    }

    pub fn contains(&self, x: &Point) -> bool {
        self.center.dist(x) <= self.radius
    }

    /// Volume of the n-ball.
    pub fn volume(&self) -> f64 {
        unit_ball_volume(self.dim()) * self.radius.powi(self.dim() as i32)
    }

    /// Disjointness up to the relative tolerance: centers at least
    /// (r1 + r2)(1 - tol) apart. Touching balls count as disjoint.
    pub fn disjoint_from(&self, other: &Ball) -> bool {
        let rsum = self.radius + other.radius;
        self.center.dist(&other.center) >= rsum * (1.0 - GEOM_REL_TOL)
    }
}

/// An axis-aligned box domain [lower, upper].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxDomain {
    pub lower: Point,
    pub upper: Point,
}

impl BoxDomain {
    pub fn new(lower: Point, upper: Point) -> Result<Self> {
        lower.check_dim(upper.dim())?;
        for i in 0..lower.dim() {
            if !(upper.0[i] > lower.0[i]) {
                return Err(Error::InvalidParameter(format!(
                    "box domain needs upper > lower componentwise; component {i}: {} vs {}",
                    lower.0[i], upper.0[i]
                )));
            }
        }
        Ok(BoxDomain { lower, upper })
    }

    pub fn unit_cube(dim: usize) -> BoxDomain {
        BoxDomain {
            lower: Point(DVector::zeros(dim)),
            upper: Point(DVector::from_element(dim, 1.0)),
        }
    }

    pub fn dim(&self) -> usize {
        self.lower.dim()
    }

    pub fn volume(&self) -> f64 {
        (0..self.dim()).map(|i| self.upper.0[i] - self.lower.0[i]).product()
    }

    pub fn center(&self) -> Point {
        Point((&self.lower.0 + &self.upper.0) * 0.5)
    }

    /// Half the smallest edge length.
    pub fn inradius(&self) -> f64 {
        (0..self.dim())
            .map(|i| 0.5 * (self.upper.0[i] - self.lower.0[i]))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn diameter(&self) -> f64 {
        (&self.upper.0 - &self.lower.0).norm()
    }

    pub fn contains(&self, x: &Point) -> bool {
        (0..self.dim()).all(|i| x.0[i] >= self.lower.0[i] && x.0[i] <= self.upper.0[i])
    }
}

/// A packing parent: either a ball or a box domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Region {
    Ball(Ball),
    Box(BoxDomain),
}

impl Region {
    pub fn dim(&self) -> usize {
        match self {
            Region::Ball(b) => b.dim(),
            Region::Box(d) => d.dim(),
        }
    }

    pub fn volume(&self) -> f64 {
        match self {
            Region::Ball(b) => b.volume(),
            Region::Box(d) => d.volume(),
        }
    }

    pub fn center(&self) -> Point {
        match self {
            Region::Ball(b) => b.center.clone(),
            Region::Box(d) => d.center(),
        }
    }

    pub fn inradius(&self) -> f64 {
        match self {
            Region::Ball(b) => b.radius,
            Region::Box(d) => d.inradius(),
        }
    }

    pub fn contains_point(&self, x: &Point) -> bool {
        match self {
            Region::Ball(b) => b.contains(x),
            Region::Box(d) => d.contains(x),
        }
    }

    /// Distance from x to the complement of the region (0 outside).
    pub fn boundary_clearance(&self, x: &Point) -> f64 {
        self.boundary_clearance_slice(x.coords().as_slice())
    }

    pub(crate) fn boundary_clearance_slice(&self, x: &[f64]) -> f64 {
        match self {
            Region::Ball(b) => {
                let c = b.center.coords().as_slice();
                let d2: f64 = x.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum();
                (b.radius - d2.sqrt()).max(0.0)
            }
            Region::Box(d) => {
                let mut c = f64::INFINITY;
                for i in 0..d.dim() {
                    c = c.min(x[i] - d.lower.0[i]).min(d.upper.0[i] - x[i]);
                }
                c.max(0.0)
            }
        }
    }

    /// Distance from x to the region (0 inside).
    pub(crate) fn exterior_clearance_slice(&self, x: &[f64]) -> f64 {
        match self {
            Region::Ball(b) => {
                let c = b.center.coords().as_slice();
                let d2: f64 = x.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum();
                (d2.sqrt() - b.radius).max(0.0)
            }
            Region::Box(d) => {
                let mut s = 0.0;
                for i in 0..d.dim() {
                    let lo = d.lower.0[i] - x[i];
                    let hi = x[i] - d.upper.0[i];
                    let g = lo.max(hi).max(0.0);
                    s += g * g;
                }
                s.sqrt()
            }
        }
    }

    /// Whether B(center, radius) sits inside the region, shrunk by the
    /// relative tolerance.
    pub fn contains_ball(&self, ball: &Ball) -> bool {
        let slack = ball.radius * (1.0 - GEOM_REL_TOL);
        self.boundary_clearance(&ball.center) >= slack
    }

    /// Axis-aligned bounding box.
    pub fn bounding_box(&self) -> (Point, Point) {
        match self {
            Region::Ball(b) => {
                let r = DVector::from_element(b.dim(), b.radius);
                (Point(&b.center.0 - &r), Point(&b.center.0 + &r))
            }
            Region::Box(d) => (d.lower.clone(), d.upper.clone()),
        }
    }
}

/// Volume of the unit n-ball, pi^{n/2} / Gamma(n/2 + 1).
pub fn unit_ball_volume(n: usize) -> f64 {
    std::f64::consts::PI.powf(n as f64 / 2.0) / gamma_half_integer(n + 2)
}

/// Surface measure of the unit sphere S^{n-1}, 2 pi^{n/2} / Gamma(n/2).
pub fn unit_sphere_area(n: usize) -> f64 {
    2.0 * std::f64::consts::PI.powf(n as f64 / 2.0) / gamma_half_integer(n)
}

/// Gamma(m/2) for integer m >= 1, exact recurrence from Gamma(1/2) = sqrt(pi)
/// and Gamma(1) = 1.
fn gamma_half_integer(m: usize) -> f64 {
    assert!(m >= 1);
    if m == 1 {
        return std::f64::consts::PI.sqrt();
    }
    if m == 2 {
        return 1.0;
    }
    (m as f64 / 2.0 - 1.0) * gamma_half_integer(m - 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn ball_volume_matches_closed_forms() {
        let b2 = Ball::new(Point::new(vec![0.0, 0.0]), 2.0).unwrap();
        assert_relative_eq!(b2.volume(), std::f64::consts::PI * 4.0, max_relative = 1e-14);
        let b3 = Ball::new(Point::new(vec![0.0, 0.0, 0.0]), 1.0).unwrap();
        assert_relative_eq!(
            b3.volume(),
            4.0 / 3.0 * std::f64::consts::PI,
            max_relative = 1e-14
        );
    }

    #[test]
    fn sphere_area_small_dims() {
        assert_relative_eq!(unit_sphere_area(2), 2.0 * std::f64::consts::PI, max_relative = 1e-14);
        assert_relative_eq!(unit_sphere_area(3), 4.0 * std::f64::consts::PI, max_relative = 1e-14);
        assert_relative_eq!(
            unit_sphere_area(4),
            2.0 * std::f64::consts::PI * std::f64::consts::PI,
            max_relative = 1e-14
        );
    }

    #[test]
    fn box_inradius_and_clearance() {
        let d = BoxDomain::unit_cube(3);
        assert_eq!(d.inradius(), 0.5);
        let r = Region::Box(d);
        assert_relative_eq!(
            r.boundary_clearance(&Point::new(vec![0.5, 0.5, 0.5])),
            0.5
        );
        assert_eq!(r.boundary_clearance(&Point::new(vec![2.0, 0.5, 0.5])), 0.0);
    }

    #[test]
    fn touching_balls_are_disjoint() {
        let b1 = Ball::new(Point::new(vec![0.0, 0.0, 0.0]), 1.0).unwrap();
        let b2 = Ball::new(Point::new(vec![2.0, 0.0, 0.0]), 1.0).unwrap();
        assert!(b1.disjoint_from(&b2));
        let b3 = Ball::new(Point::new(vec![1.9, 0.0, 0.0]), 1.0).unwrap();
        assert!(!b1.disjoint_from(&b3));
    }

    #[test]
    fn dimension_mismatch_detected() {
        let p = Point::new(vec![0.0, 0.0]);
        assert!(p.check_dim(3).is_err());
    }
}
