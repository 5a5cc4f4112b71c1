//! Planar vector and line primitives shared by all controllers.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sine tolerance below which two line directions count as parallel.
pub const PARALLEL_TOL: f64 = 1e-12;

/// A point or displacement in the plane, metres.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !x.is_finite() || !y.is_finite() {
            return Err(Error::NonFinite("Vec2"));
        }
        Ok(Self { x, y })
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Vec2) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl std::ops::Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2 { x: self.x + rhs.x, y: self.y + rhs.y }
    }
}

impl std::ops::Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2 { x: self.x - rhs.x, y: self.y - rhs.y }
    }
}

impl std::ops::Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, s: f64) -> Vec2 {
        Vec2 { x: self.x * s, y: self.y * s }
    }
}

/// Unit vector at angle `gamma` measured counter-clockwise from the x-axis.
pub fn unit_vector(gamma: f64) -> Result<Vec2> {
    if !gamma.is_finite() {
        return Err(Error::NonFinite("unit_vector angle"));
    }
    Ok(Vec2 { x: gamma.cos(), y: gamma.sin() })
}

/// Signed coordinate of `point` along a line of direction `theta`:
/// `[sin(theta), -cos(theta)] . point`.
pub fn project_scalar(point: Vec2, theta: f64) -> f64 {
    theta.sin() * point.x - theta.cos() * point.y
}

/// A line `{ p : u(angle)^T p = offset }`, stored by its unit-normal angle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineSpec {
    normal_angle: f64,
    offset: f64,
}

impl LineSpec {
    /// Line whose unit normal points at `angle`.
    pub fn from_normal(angle: f64, offset: f64) -> Result<Self> {
        if !angle.is_finite() || !offset.is_finite() {
            return Err(Error::NonFinite("LineSpec"));
        }
        Ok(Self { normal_angle: angle.rem_euclid(TAU), offset })
    }

    /// Line running along `angle` (normal is `angle - pi/2`).
    pub fn from_direction(angle: f64, offset: f64) -> Result<Self> {
        Self::from_normal(angle - std::f64::consts::FRAC_PI_2, offset)
    }

    pub fn normal_angle(&self) -> f64 {
        self.normal_angle
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn normal(&self) -> Vec2 {
        Vec2 { x: self.normal_angle.cos(), y: self.normal_angle.sin() }
    }

    /// Signed residual `u^T p - offset`; zero on the line, positive on the
    /// side the normal points to.
    pub fn signed_residual(&self, p: Vec2) -> f64 {
        self.normal().dot(p) - self.offset
    }

    /// Orthogonal projection of `p` onto the line.
    pub fn project_point(&self, p: Vec2) -> Vec2 {
        let r = self.signed_residual(p);
        p - self.normal() * r
    }
}

/// Intersection point of two non-parallel lines.
pub fn line_intersection(a: &LineSpec, b: &LineSpec) -> Result<Vec2> {
    let det = (b.normal_angle - a.normal_angle).sin();
    if det.abs() <= PARALLEL_TOL {
        return Err(Error::NoIntersection);
    }
    // Cramer on [cos a, sin a; cos b, sin b] [x y]^T = [ca cb]^T.
    let (sa, ca) = a.normal_angle.sin_cos();
    let (sb, cb) = b.normal_angle.sin_cos();
    let x = (a.offset * sb - b.offset * sa) / det;
    let y = (b.offset * ca - a.offset * cb) / det;
    Ok(Vec2 { x, y })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    #[test]
    fn unit_vector_axes() {
        let e = unit_vector(0.0).unwrap();
        assert_eq!((e.x, e.y), (1.0, 0.0));
        let n = unit_vector(FRAC_PI_2).unwrap();
        assert!(n.x.abs() < 1e-15 && (n.y - 1.0).abs() < 1e-15);
        let d = unit_vector(FRAC_PI_4).unwrap();
        assert!((d.x - 0.70710678).abs() < 5e-9);
        assert!((d.y - 0.70710678).abs() < 5e-9);
    }

    #[test]
    fn unit_vector_rejects_non_finite() {
        assert!(unit_vector(f64::NAN).is_err());
        assert!(unit_vector(f64::INFINITY).is_err());
    }

    #[test]
    fn projection_examples() {
        assert_eq!(project_scalar(Vec2 { x: 1.0, y: 0.0 }, 0.0), 0.0);
        assert_eq!(project_scalar(Vec2 { x: 0.0, y: 1.0 }, 0.0), -1.0);
        let q = project_scalar(Vec2 { x: 2.0, y: 3.0 }, FRAC_PI_2);
        assert!((q - 2.0).abs() < 1e-12);
    }

    #[test]
    fn intersection_of_axes() {
        // x-axis: normal along y; y-axis: normal along x.
        let x_axis = LineSpec::from_normal(FRAC_PI_2, 0.0).unwrap();
        let y_axis = LineSpec::from_normal(0.0, 0.0).unwrap();
        let p = line_intersection(&x_axis, &y_axis).unwrap();
        assert!(p.norm() < 1e-12);
    }

    #[test]
    fn intersection_solves_both_equations() {
        let a = LineSpec::from_normal(0.0, 1.0).unwrap();
        let b = LineSpec::from_normal(FRAC_PI_2, 2.0).unwrap();
        let p = line_intersection(&a, &b).unwrap();
        assert!((p.x - 1.0).abs() < 1e-10 && (p.y - 2.0).abs() < 1e-10);
        assert!(a.signed_residual(p).abs() < 1e-10);
        assert!(b.signed_residual(p).abs() < 1e-10);
    }

    #[test]
    fn parallel_lines_do_not_intersect() {
        let a = LineSpec::from_normal(0.3, 1.0).unwrap();
        let b = LineSpec::from_normal(0.3 + PI, 2.0).unwrap();
        assert!(matches!(line_intersection(&a, &b), Err(Error::NoIntersection)));
    }

    #[test]
    fn normal_angle_wraps() {
        let l = LineSpec::from_normal(-FRAC_PI_2, 0.0).unwrap();
        assert!((l.normal_angle() - 3.0 * FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn from_direction_matches_normal_shift() {
        let l = LineSpec::from_direction(FRAC_PI_2, 2.5).unwrap();
        assert!(l.normal_angle().abs() < 1e-12);
        assert_eq!(l.offset(), 2.5);
    }
}
