//! Bounded convex domains in the plane and in space, queried by ray casting.
//!
//! Every domain answers the same question: standing at an interior point
//! `x₀` and looking along a unit direction, how far away is the boundary?
//! Disks, balls, polygons and polytopes answer in closed form. The
//! star-shaped [`RadialDomain2`] exists for the non-convex comparison
//! domains used by the annulus bounds.

mod hausdorff;
mod polygon;
mod polytope;
mod radial;
mod round;
mod spec;

use std::f64::consts::PI;

use nalgebra::{Rotation2, Rotation3};

pub use hausdorff::hausdorff2;
pub use polygon::ConvexPolygon;
pub use polytope::{HalfSpace, Polytope3};
pub use radial::{RadialDomain2, RadialFn};
pub use round::{Ball3, Disk2};
pub use spec::{Domain, DomainSpec, HalfSpaceSpec};

use crate::error::{Error, Result};
use crate::quadrature;

pub type Point2 = nalgebra::Vector2<f64>;
pub type Point3 = nalgebra::Vector3<f64>;

/// Containment tests require the point to clear the boundary by this much.
pub const MEMBERSHIP_SLACK: f64 = 1e-12;

/// `(cos φ, sin φ)`.
pub fn unit2(phi: f64) -> Point2 {
    let (s, c) = phi.sin_cos();
    Point2::new(c, s)
}

/// A direction on the unit sphere in polar coordinates about the +x axis:
/// `(φ, θ) ↦ (cos φ, sin φ cos θ, sin φ sin θ)`, so `(0, 0)` is `(1, 0, 0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction3 {
    pub phi: f64,
    pub theta: f64,
}

impl Direction3 {
    pub fn new(phi: f64, theta: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&phi) {
            return Err(Error::OutOfDomain {
                what: "polar angle",
                value: phi,
            });
        }
        if !(0.0..2.0 * PI).contains(&theta) {
            return Err(Error::OutOfDomain {
                what: "azimuth",
                value: theta,
            });
        }
        Ok(Direction3 { phi, theta })
    }

    pub fn to_vector(self) -> Point3 {
        let (sp, cp) = self.phi.sin_cos();
        let (st, ct) = self.theta.sin_cos();
        Point3::new(cp, sp * ct, sp * st)
    }

    pub fn from_vector(v: &Point3) -> Result<Self> {
        let n = v.norm();
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::InvalidGeometry(format!("cannot take direction of {v:?}")));
        }
        let u = v / n;
        let phi = u.x.clamp(-1.0, 1.0).acos();
        let theta = u.z.atan2(u.y).rem_euclid(2.0 * PI);
        // rem_euclid can round up to exactly 2π
        let theta = if theta >= 2.0 * PI { 0.0 } else { theta };
        Ok(Direction3 { phi, theta })
    }
}

/// A planar domain.
#[derive(Debug, Clone)]
pub enum ConvexDomain2 {
    Polygon(ConvexPolygon),
    Disk(Disk2),
    /// Star-shaped comparison domain; not necessarily convex.
    Radial(RadialDomain2),
}

impl From<ConvexPolygon> for ConvexDomain2 {
    fn from(p: ConvexPolygon) -> Self {
        ConvexDomain2::Polygon(p)
    }
}

impl From<Disk2> for ConvexDomain2 {
    fn from(d: Disk2) -> Self {
        ConvexDomain2::Disk(d)
    }
}

impl From<RadialDomain2> for ConvexDomain2 {
    fn from(d: RadialDomain2) -> Self {
        ConvexDomain2::Radial(d)
    }
}

impl ConvexDomain2 {
    /// Signed distance-like clearance; positive inside.
    pub fn clearance(&self, x: &Point2) -> f64 {
        match self {
            ConvexDomain2::Polygon(p) => p.clearance(x),
            ConvexDomain2::Disk(d) => d.clearance(x),
            ConvexDomain2::Radial(r) => r.clearance(x),
        }
    }

    pub fn contains(&self, x: &Point2) -> bool {
        match self {
            ConvexDomain2::Polygon(p) => p.contains(x),
            ConvexDomain2::Disk(d) => d.contains(x),
            ConvexDomain2::Radial(r) => r.contains(x),
        }
    }

    pub fn check_interior(&self, x: &Point2) -> Result<()> {
        self.check_clearance(x, MEMBERSHIP_SLACK)
    }

    pub(crate) fn check_clearance(&self, x: &Point2, min: f64) -> Result<()> {
        let c = self.clearance(x);
        if c > min && self.contains(x) {
            Ok(())
        } else {
            Err(Error::not_interior(x.as_slice(), c))
        }
    }

    /// Unchecked ray cast along the unit vector `u`.
    pub fn chord(&self, x: &Point2, u: &Point2) -> f64 {
        match self {
            ConvexDomain2::Polygon(p) => p.chord(x, u),
            ConvexDomain2::Disk(d) => d.chord(x, u),
            ConvexDomain2::Radial(r) => r.chord(x, u),
        }
    }

    /// `d(x, φ)`, the distance from `x` to the boundary in direction `φ`,
    /// without the interior check.
    pub fn chord_at(&self, x: &Point2, phi: f64) -> f64 {
        self.chord(x, &unit2(phi))
    }

    /// Distance from an interior point to the boundary along angle `phi`.
    pub fn ray_distance(&self, x0: &Point2, phi: f64) -> Result<f64> {
        self.check_interior(x0)?;
        Ok(self.chord_at(x0, phi))
    }

    pub fn area(&self) -> f64 {
        match self {
            ConvexDomain2::Polygon(p) => p.area(),
            ConvexDomain2::Disk(d) => PI * d.radius * d.radius,
            ConvexDomain2::Radial(r) => {
                let breaks = r.breaks();
                let half_sq = |phi: f64| 0.5 * r.rho(phi).powi(2);
                if breaks.is_empty() {
                    quadrature::periodic_trapezoid(4096, half_sq).value
                } else {
                    let mut b = breaks.to_vec();
                    b.push(breaks[0] + 2.0 * PI);
                    quadrature::integrate_panels_scalar(&b, 4096, half_sq).value
                }
            }
        }
    }

    pub fn diameter(&self) -> f64 {
        match self {
            ConvexDomain2::Polygon(p) => p.diameter(),
            ConvexDomain2::Disk(d) => 2.0 * d.radius,
            ConvexDomain2::Radial(r) => r.diameter(),
        }
    }

    /// Angles in `[0, 2π)` seen from `x` where `φ ↦ d(x, φ)` is not smooth.
    /// Empty when the integrand is smooth and periodic.
    pub fn angular_breaks(&self, x: &Point2) -> Vec<f64> {
        match self {
            ConvexDomain2::Polygon(p) => p.vertex_angles(x),
            ConvexDomain2::Disk(_) => Vec::new(),
            ConvexDomain2::Radial(r) => {
                if (x - r.anchor()).norm() <= 1e-15 {
                    r.breaks().to_vec()
                } else {
                    Vec::new()
                }
            }
        }
    }

    /// True for the star-shaped comparison domain.
    pub fn is_comparison_only(&self) -> bool {
        matches!(self, ConvexDomain2::Radial(_))
    }

    /// Area centroid for polygons, the centre for disks, the anchor for
    /// radial domains.
    pub fn start_point(&self) -> Point2 {
        match self {
            ConvexDomain2::Polygon(p) => p.centroid(),
            ConvexDomain2::Disk(d) => d.center,
            ConvexDomain2::Radial(r) => r.anchor(),
        }
    }

    /// A nearest boundary point. At a disk centre every boundary point is
    /// nearest and the one along +x is returned.
    pub fn nearest_boundary(&self, x: &Point2) -> Result<Point2> {
        match self {
            ConvexDomain2::Polygon(p) => Ok(p.nearest_boundary(x)),
            ConvexDomain2::Disk(d) => {
                let off = x - d.center;
                let n = off.norm();
                let dir = if n <= 1e-15 * d.radius { Point2::x() } else { off / n };
                Ok(d.center + d.radius * dir)
            }
            ConvexDomain2::Radial(_) => Err(Error::Unsupported("nearest boundary point of a radial domain")),
        }
    }

    /// Image under `x ↦ scale · R(angle) x + shift`.
    pub fn transformed(&self, angle: f64, scale: f64, shift: &Point2) -> Result<Self> {
        let rot = Rotation2::new(angle);
        let map = |p: &Point2| scale * (rot * p) + shift;
        Ok(match self {
            ConvexDomain2::Polygon(p) => ConvexDomain2::Polygon(p.map_vertices(map)?),
            ConvexDomain2::Disk(d) => ConvexDomain2::Disk(Disk2::new(map(&d.center), scale * d.radius)?),
            ConvexDomain2::Radial(_) => return Err(Error::Unsupported("transforming a radial domain")),
        })
    }
}

/// A solid domain.
#[derive(Debug, Clone)]
pub enum ConvexDomain3 {
    Ball(Ball3),
    Polytope(Polytope3),
}

impl From<Ball3> for ConvexDomain3 {
    fn from(b: Ball3) -> Self {
        ConvexDomain3::Ball(b)
    }
}

impl From<Polytope3> for ConvexDomain3 {
    fn from(p: Polytope3) -> Self {
        ConvexDomain3::Polytope(p)
    }
}

impl ConvexDomain3 {
    pub fn clearance(&self, x: &Point3) -> f64 {
        match self {
            ConvexDomain3::Ball(b) => b.clearance(x),
            ConvexDomain3::Polytope(p) => p.clearance(x),
        }
    }

    pub fn contains(&self, x: &Point3) -> bool {
        self.clearance(x) > MEMBERSHIP_SLACK
    }

    pub fn check_interior(&self, x: &Point3) -> Result<()> {
        self.check_clearance(x, MEMBERSHIP_SLACK)
    }

    pub(crate) fn check_clearance(&self, x: &Point3, min: f64) -> Result<()> {
        let c = self.clearance(x);
        if c > min {
            Ok(())
        } else {
            Err(Error::not_interior(x.as_slice(), c))
        }
    }

    pub fn chord(&self, x: &Point3, u: &Point3) -> f64 {
        match self {
            ConvexDomain3::Ball(b) => b.chord(x, u),
            ConvexDomain3::Polytope(p) => p.chord(x, u),
        }
    }

    pub fn ray_distance(&self, x0: &Point3, dir: Direction3) -> Result<f64> {
        self.check_interior(x0)?;
        Ok(self.chord(x0, &dir.to_vector()))
    }

    pub fn diameter(&self) -> f64 {
        match self {
            ConvexDomain3::Ball(b) => 2.0 * b.radius,
            ConvexDomain3::Polytope(p) => p.diameter(),
        }
    }

    pub fn start_point(&self) -> Point3 {
        match self {
            ConvexDomain3::Ball(b) => b.center,
            ConvexDomain3::Polytope(p) => p.vertex_centroid(),
        }
    }

    pub fn nearest_boundary(&self, x: &Point3) -> Point3 {
        match self {
            ConvexDomain3::Ball(b) => {
                let off = x - b.center;
                let n = off.norm();
                let dir = if n <= 1e-15 * b.radius { Point3::x() } else { off / n };
                b.center + b.radius * dir
            }
            ConvexDomain3::Polytope(p) => p.nearest_boundary(x),
        }
    }

    /// Image under `x ↦ scale · R x + shift`.
    pub fn transformed(&self, rotation: &Rotation3<f64>, scale: f64, shift: &Point3) -> Result<Self> {
        Ok(match self {
            ConvexDomain3::Ball(b) => ConvexDomain3::Ball(Ball3::new(scale * (rotation * b.center) + shift, scale * b.radius)?),
            ConvexDomain3::Polytope(p) => ConvexDomain3::Polytope(p.transformed(rotation, scale, shift)?),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn direction_convention() {
        let d = Direction3::new(0.0, 0.0).unwrap();
        assert_relative_eq!(d.to_vector(), Point3::x());
        let back = Direction3::from_vector(&Point3::new(0.0, 0.0, 2.0)).unwrap();
        assert_relative_eq!(back.phi, PI / 2.0);
        assert_relative_eq!(back.theta, PI / 2.0);
        assert!(Direction3::new(-0.1, 0.0).is_err());
        assert!(Direction3::new(0.1, 2.0 * PI).is_err());
    }

    #[test]
    fn ray_distance_examples() {
        let disk = ConvexDomain2::Disk(Disk2::unit());
        assert_relative_eq!(disk.ray_distance(&Point2::new(0.5, 0.0), 0.0).unwrap(), 0.5);
        let sq: ConvexDomain2 = ConvexPolygon::rectangle(0.0, 0.0, 1.0, 1.0).unwrap().into();
        assert_relative_eq!(
            sq.ray_distance(&Point2::new(0.5, 0.5), PI / 4.0).unwrap(),
            0.5f64.sqrt(),
            max_relative = 1e-15
        );
        assert!(matches!(
            sq.ray_distance(&Point2::new(1.0, 0.5), 0.0),
            Err(Error::NotInterior { .. })
        ));
        assert!(disk.ray_distance(&Point2::new(1.5, 0.0), 0.0).is_err());
    }

    #[test]
    fn area_and_diameter_examples() {
        let disk3: ConvexDomain2 = Disk2::new(Point2::zeros(), 3.0).unwrap().into();
        assert_relative_eq!(disk3.diameter(), 6.0);
        assert_relative_eq!(ConvexDomain2::Disk(Disk2::unit()).area(), PI);
        let circle = RadialDomain2::new(Point2::zeros(), std::sync::Arc::new(|_| 1.0), vec![]).unwrap();
        assert_relative_eq!(ConvexDomain2::Radial(circle).area(), PI, max_relative = 1e-14);
    }

    fn polygon_strategy() -> impl Strategy<Value = ConvexPolygon> {
        prop::collection::vec((0.0..2.0 * PI, 0.5..1.5f64), 5..12).prop_filter_map("degenerate hull", |pts| {
            let pts: Vec<Point2> = pts.into_iter().map(|(a, r)| r * unit2(a)).collect();
            ConvexPolygon::hull(&pts).ok().filter(|p| p.area() > 0.2)
        })
    }

    fn boundary_residual(poly: &ConvexPolygon, p: &Point2) -> f64 {
        // zero on the boundary: the point clears no edge
        poly.clearance(p).abs()
    }

    proptest! {
        #[test]
        fn hit_point_lies_on_boundary(poly in polygon_strategy(), w in prop::collection::vec(0.01..1.0f64, 12), phi in 0.0..2.0 * PI) {
            let total: f64 = w.iter().take(poly.len()).sum();
            let x0 = poly.vertices().iter().zip(&w).map(|(v, wi)| v * (*wi / total)).sum::<Point2>();
            prop_assume!(poly.contains(&x0));
            let dom = ConvexDomain2::Polygon(poly.clone());
            let t = dom.ray_distance(&x0, phi).unwrap();
            let hit = x0 + t * unit2(phi);
            prop_assert!(boundary_residual(&poly, &hit) <= 1e-10);
            // single crossing: inside just before, outside just after
            prop_assert!(poly.clearance(&(x0 + 0.999 * t * unit2(phi))) > 0.0);
            prop_assert!(poly.clearance(&(x0 + 1.001 * t * unit2(phi))) < 0.0);
        }

        #[test]
        fn isometry_and_scaling_covariance(
            poly in polygon_strategy(),
            angle in 0.0..2.0 * PI,
            scale in 0.2..5.0f64,
            sx in -3.0..3.0f64,
            sy in -3.0..3.0f64,
            phi in 0.0..2.0 * PI,
        ) {
            let dom = ConvexDomain2::Polygon(poly.clone());
            let x0 = poly.centroid();
            let shift = Point2::new(sx, sy);
            let iso = dom.transformed(angle, 1.0, &shift).unwrap();
            let fx = Rotation2::new(angle) * x0 + shift;
            let a = dom.ray_distance(&x0, phi).unwrap();
            let b = iso.ray_distance(&fx, phi + angle).unwrap();
            prop_assert!((a - b).abs() <= 1e-10);
            let dil = dom.transformed(0.0, scale, &Point2::zeros()).unwrap();
            let c = dil.ray_distance(&(scale * x0), phi).unwrap();
            prop_assert!((c - scale * a).abs() <= 1e-12 * scale.max(1.0) * a.max(1.0));
        }

        #[test]
        fn polytope_rigid_motion_covariance(
            ax in -1.0..1.0f64, ay in -1.0..1.0f64, az in -1.0..1.0f64, angle in 0.0..PI,
            phi in 0.0..PI, theta in 0.0..2.0 * PI,
        ) {
            let axis = Point3::new(ax, ay, az);
            prop_assume!(axis.norm() > 1e-3);
            let rot = Rotation3::from_axis_angle(&nalgebra::Unit::new_normalize(axis), angle);
            let shift = Point3::new(0.3, -2.0, 1.0);
            let cube: ConvexDomain3 = Polytope3::cuboid(Point3::new(-1.0, -0.5, -2.0), Point3::new(1.0, 1.5, 0.5)).unwrap().into();
            let moved = cube.transformed(&rot, 1.0, &shift).unwrap();
            let x0 = Point3::new(0.2, 0.1, -0.3);
            let u = Direction3::new(phi, theta).unwrap().to_vector();
            let a = cube.chord(&x0, &u);
            let b = moved.chord(&(rot * x0 + shift), &(rot * u));
            prop_assert!((a - b).abs() <= 1e-10);
        }
    }
}
