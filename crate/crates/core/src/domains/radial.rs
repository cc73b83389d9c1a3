use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::domains::{unit2, Point2, MEMBERSHIP_SLACK};
use crate::error::{Error, Result};

const SAMPLES: usize = 4096;

pub type RadialFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A region star-shaped about `anchor`, bounded by `anchor + ρ(φ)e^{iφ}`.
///
/// Convexity is not required. Statistics computed on a radial domain are
/// only meaningful as comparison bounds.
#[derive(Clone)]
pub struct RadialDomain2 {
    anchor: Point2,
    radius: RadialFn,
    /// Angles in `[0, 2π)` where `ρ` jumps or kinks.
    breaks: Vec<f64>,
    boundary: Vec<Point2>,
    rho_min: f64,
    rho_max: f64,
}

impl fmt::Debug for RadialDomain2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialDomain2")
            .field("anchor", &self.anchor)
            .field("breaks", &self.breaks)
            .field("rho_min", &self.rho_min)
            .field("rho_max", &self.rho_max)
            .finish()
    }
}

impl RadialDomain2 {
    pub fn new(anchor: Point2, radius: RadialFn, breaks: Vec<f64>) -> Result<Self> {
        let mut boundary = Vec::with_capacity(SAMPLES);
        let (mut lo, mut hi) = (f64::INFINITY, 0.0_f64);
        for i in 0..SAMPLES {
            let phi = 2.0 * PI * i as f64 / SAMPLES as f64;
            let r = radius(phi);
            if !(r > 0.0 && r.is_finite()) {
                return Err(Error::InvalidGeometry(format!(
                    "radial function must be positive and finite, got {r} at {phi}"
                )));
            }
            lo = lo.min(r);
            hi = hi.max(r);
            boundary.push(anchor + r * unit2(phi));
        }
        let mut breaks: Vec<f64> = breaks.into_iter().map(|b| b.rem_euclid(2.0 * PI)).collect();
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();
        Ok(RadialDomain2 {
            anchor,
            radius,
            breaks,
            boundary,
            rho_min: lo,
            rho_max: hi,
        })
    }

    pub fn anchor(&self) -> Point2 {
        self.anchor
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    pub fn rho(&self, phi: f64) -> f64 {
        (self.radius)(phi.rem_euclid(2.0 * PI))
    }

    fn inside(&self, p: &Point2) -> bool {
        let d = p - self.anchor;
        let r = d.norm();
        r == 0.0 || r < self.rho(d.y.atan2(d.x))
    }

    /// Approximate signed clearance from the sampled boundary.
    pub fn clearance(&self, x: &Point2) -> f64 {
        let n = self.boundary.len();
        let dist = (0..n)
            .map(|i| super::polygon::segment_distance(x, &self.boundary[i], &self.boundary[(i + 1) % n]))
            .fold(f64::INFINITY, f64::min);
        if self.inside(x) {
            dist
        } else {
            -dist
        }
    }

    pub fn contains(&self, x: &Point2) -> bool {
        self.inside(x) && self.clearance(x) > MEMBERSHIP_SLACK
    }

    /// First exit along the ray. Exact from the anchor; elsewhere a march
    /// at `ρ_min / 256` followed by bisection.
    pub fn chord(&self, x: &Point2, u: &Point2) -> f64 {
        let d = x - self.anchor;
        if d.norm() <= 1e-15 * self.rho_max {
            return self.rho(u.y.atan2(u.x));
        }
        let step = self.rho_min / 256.0;
        let limit = 2.0 * self.rho_max + d.norm();
        let mut lo = 0.0;
        let mut hi = step;
        while self.inside(&(x + hi * u)) {
            lo = hi;
            hi += step;
            if hi > limit {
                return f64::INFINITY;
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.inside(&(x + mid * u)) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    pub fn diameter(&self) -> f64 {
        let mut best: f64 = 0.0;
        let step = 8;
        for (i, a) in self.boundary.iter().enumerate().step_by(step) {
            for b in self.boundary[i..].iter().step_by(step) {
                best = best.max((a - b).norm());
            }
        }
        best
    }
}
