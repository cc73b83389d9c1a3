//! Moments of the distance-to-boundary function and their variance.
//!
//! For an interior point `x₀`, `I_k(x₀)` is the mean of `d(x₀, σ)^k` over
//! the unit sphere of directions, and `v(x₀) = I₂ − I₁²`.
//!
//! In the plane the integrand has derivative jumps exactly at the vertex
//! directions of a polygon, so the circle is cut there and integrated with
//! Gauss–Legendre panels. Smooth boundaries use the periodic trapezoid,
//! which is spectrally accurate. In space the sphere is integrated with a
//! Gauss–Legendre × trapezoid product rule.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::domains::{ConvexDomain2, ConvexDomain3, Point2, Point3};
use crate::elliptic;
use crate::error::{Error, Result};
use crate::quadrature::{self, SphereRule};

pub const DEFAULT_NODES_2D: usize = 4096;
pub const DEFAULT_NODES_3D: usize = 512;
pub const MIN_NODES: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryStats {
    /// Mean distance to the boundary.
    pub i1: f64,
    /// Mean squared distance to the boundary.
    pub i2: f64,
    /// `max(i2 − i1², 0)`.
    pub variance: f64,
    /// `i2 − i1²` before clamping.
    pub raw_variance: f64,
    /// Integrand evaluations spent (0 for closed forms).
    pub evaluations: usize,
    /// Set when computed on a non-convex comparison domain.
    pub comparison_only: bool,
}

impl BoundaryStats {
    pub(crate) fn from_moments(i1: f64, i2: f64, evaluations: usize) -> Self {
        let raw = i2 - i1 * i1;
        BoundaryStats {
            i1,
            i2,
            variance: raw.max(0.0),
            raw_variance: raw,
            evaluations,
            comparison_only: false,
        }
    }
}

pub(crate) fn check_nodes(n: usize, min: usize) -> Result<()> {
    if n >= min {
        Ok(())
    } else {
        Err(Error::OutOfDomain {
            what: "quadrature node count",
            value: n as f64,
        })
    }
}

/// Break angles sorted and closed into a full turn starting at the first.
pub(crate) fn full_turn(mut angles: Vec<f64>) -> Vec<f64> {
    angles.sort_by(f64::total_cmp);
    angles.dedup();
    let start = angles[0];
    angles.push(start + 2.0 * PI);
    angles
}

/// `∮ f(φ, d(x₀, φ)) dφ` with the rule appropriate for the domain.
pub(crate) fn circle_integral<const N: usize>(
    domain: &ConvexDomain2,
    x0: &Point2,
    n_nodes: usize,
    f: impl Fn(f64, f64) -> [f64; N],
) -> ([f64; N], usize) {
    let breaks = domain.angular_breaks(x0);
    if breaks.is_empty() {
        let h = 2.0 * PI / n_nodes as f64;
        let mut acc = [0.0; N];
        for i in 0..n_nodes {
            let phi = i as f64 * h;
            for (s, v) in acc.iter_mut().zip(f(phi, domain.chord_at(x0, phi))) {
                *s += v;
            }
        }
        (acc.map(|s| s * h), n_nodes)
    } else {
        quadrature::integrate_panels(&full_turn(breaks), n_nodes, |phi| f(phi, domain.chord_at(x0, phi)))
    }
}

/// `I₁`, `I₂` and the variance at an interior point of a planar domain.
pub fn stats2(domain: &ConvexDomain2, x0: &Point2, n_nodes: usize) -> Result<BoundaryStats> {
    check_nodes(n_nodes, MIN_NODES)?;
    domain.check_interior(x0)?;
    let ([s1, s2], evals) = circle_integral(domain, x0, n_nodes, |_, d| [d, d * d]);
    let mut out = BoundaryStats::from_moments(s1 / (2.0 * PI), s2 / (2.0 * PI), evals);
    out.comparison_only = domain.is_comparison_only();
    Ok(out)
}

/// `∫_{S²} f(u, d(x₀, u)) dA` over the sphere with the product rule.
pub(crate) fn sphere_integral<const N: usize>(
    rule: &SphereRule,
    f: impl Fn(&Point3) -> [f64; N] + Sync,
) -> [f64; N] {
    let h = 2.0 * PI / rule.n_theta as f64;
    let rows: Vec<[f64; N]> = rule
        .polar
        .nodes
        .par_iter()
        .zip(&rule.polar.weights)
        .map(|(&t, &w)| {
            let s = (1.0 - t * t).max(0.0).sqrt();
            let mut acc = [0.0; N];
            for j in 0..rule.n_theta {
                let (st, ct) = (j as f64 * h).sin_cos();
                let u = Point3::new(t, s * ct, s * st);
                for (a, v) in acc.iter_mut().zip(f(&u)) {
                    *a += v;
                }
            }
            acc.map(|a| a * w * h)
        })
        .collect();
    let mut total = [0.0; N];
    for row in rows {
        for (t, r) in total.iter_mut().zip(row) {
            *t += r;
        }
    }
    total
}

/// `I₁`, `I₂` and the variance at an interior point of a solid domain.
pub fn stats3(domain: &ConvexDomain3, x0: &Point3, n_phi: usize, n_theta: usize) -> Result<BoundaryStats> {
    check_nodes(n_phi, MIN_NODES)?;
    check_nodes(n_theta, MIN_NODES)?;
    domain.check_interior(x0)?;
    let rule = SphereRule::new(n_phi, n_theta);
    Ok(stats3_with(domain, x0, &rule))
}

pub(crate) fn stats3_with(domain: &ConvexDomain3, x0: &Point3, rule: &SphereRule) -> BoundaryStats {
    let [s1, s2] = sphere_integral(rule, |u| {
        let d = domain.chord(x0, u);
        [d, d * d]
    });
    BoundaryStats::from_moments(s1 / (4.0 * PI), s2 / (4.0 * PI), rule.evaluations())
}

fn check_unit_radius(r: f64) -> Result<()> {
    if (0.0..1.0).contains(&r) {
        Ok(())
    } else {
        Err(Error::OutOfDomain {
            what: "radius fraction",
            value: r,
        })
    }
}

/// Variance on the unit disk at distance `r` from the centre:
/// `1 − 4E(r)²/π²`.
pub fn disk_variance_oracle(r: f64) -> Result<f64> {
    check_unit_radius(r)?;
    let e = elliptic::ellip_e(r)?;
    Ok(1.0 - 4.0 * e * e / (PI * PI))
}

/// Closed forms on the unit ball at distance `r` from the centre:
/// `I₁ = ½ + ((1−r²)/4r) ln((1+r)/(1−r))`, `I₂ = 1 − r²/3`.
pub fn ball_stats_oracle(r: f64) -> Result<BoundaryStats> {
    check_unit_radius(r)?;
    let i1 = if r == 0.0 {
        1.0
    } else {
        // ln((1+r)/(1−r)) = 2 artanh r
        0.5 + (1.0 - r * r) / (2.0 * r) * r.atanh()
    };
    let i2 = 1.0 - r * r / 3.0;
    Ok(BoundaryStats::from_moments(i1, i2, 0))
}
