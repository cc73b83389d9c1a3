//! Disks and balls.

use crate::domains::{Point2, Point3, MEMBERSHIP_SLACK};
use crate::error::{Error, Result};

/// Positive root of `t² + 2bt − c = 0` with `c > 0`, without cancellation.
fn exit_root(b: f64, c: f64) -> f64 {
    let s = (b * b + c).sqrt();
    if b > 0.0 {
        c / (b + s)
    } else {
        s - b
    }
}

fn check_radius(radius: f64) -> Result<()> {
    if radius > 0.0 && radius.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidGeometry(format!("radius must be positive, got {radius}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Disk2 {
    pub center: Point2,
    pub radius: f64,
}

impl Disk2 {
    pub fn new(center: Point2, radius: f64) -> Result<Self> {
        check_radius(radius)?;
        Ok(Disk2 { center, radius })
    }

    pub fn unit() -> Self {
        Disk2 {
            center: Point2::zeros(),
            radius: 1.0,
        }
    }

    pub fn clearance(&self, x: &Point2) -> f64 {
        self.radius - (x - self.center).norm()
    }

    pub fn contains(&self, x: &Point2) -> bool {
        self.clearance(x) > MEMBERSHIP_SLACK
    }

    pub fn chord(&self, x: &Point2, u: &Point2) -> f64 {
        let p = x - self.center;
        let c = (self.radius - p.norm()) * (self.radius + p.norm());
        exit_root(p.dot(u), c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ball3 {
    pub center: Point3,
    pub radius: f64,
}

impl Ball3 {
    pub fn new(center: Point3, radius: f64) -> Result<Self> {
        check_radius(radius)?;
        Ok(Ball3 { center, radius })
    }

    pub fn unit() -> Self {
        Ball3 {
            center: Point3::zeros(),
            radius: 1.0,
        }
    }

    pub fn clearance(&self, x: &Point3) -> f64 {
        self.radius - (x - self.center).norm()
    }

    pub fn contains(&self, x: &Point3) -> bool {
        self.clearance(x) > MEMBERSHIP_SLACK
    }

    pub fn chord(&self, x: &Point3, u: &Point3) -> f64 {
        let p = x - self.center;
        let c = (self.radius - p.norm()) * (self.radius + p.norm());
        exit_root(p.dot(u), c)
    }
}
