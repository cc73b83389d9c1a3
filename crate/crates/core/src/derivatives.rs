//! Directional derivatives of `I₁` and `v` from their integral
//! representations.
//!
//! Planar formulas are evaluated in logarithmic form, so no derivative of
//! `d` in `φ` is needed:
//!
//! * `D_σ I₁ = (1/2π) ∮ cos(φ−σ) ln d(φ) dφ`
//! * `D²_σ I₁ = −(1/2π) ∮ (2cos²(φ−σ) − sin²(φ−σ)) / d(φ) dφ`
//! * `D_σ v = (I₁/π) ∫_{σ−π/2}^{σ+π/2} cos(φ−σ) ln(d(φ+π)/d(φ)) dφ`
//!
//! In space the point is moved to the origin and `σ` to the pole `+x`, and
//! `D_σ v = (1/4π) ∫∫ sin 2φ · G(φ, θ) dφ dθ` over the upper hemisphere with
//! `G = 2I₁ ln(d(−u)/d(u)) + d(u) − d(−u)`.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::Rotation3;
use rayon::prelude::*;

use crate::domains::{unit2, ConvexDomain2, ConvexDomain3, Direction3, Point2, Point3};
use crate::error::Result;
use crate::quadrature::{self, SphereRule};
use crate::stats::{self, check_nodes, circle_integral, sphere_integral, stats3_with};

pub const MIN_DERIVATIVE_NODES: usize = 64;

/// Points closer to the boundary than this fraction of the diameter are
/// rejected.
pub const INTERIOR_MARGIN: f64 = 1e-9;

/// Step in `φ` for the finite-difference ray derivative of the cross-check.
pub const RAY_DIFF_STEP: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    MeanDistance,
    Variance,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Direction {
    Angle(f64),
    Spherical(Direction3),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectionalDerivative {
    pub value: f64,
    pub order: u8,
    pub target: Target,
    pub direction: Direction,
    pub n_nodes: usize,
}

/// How [`d1_v_3d_with`] evaluates the surface integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Form3 {
    /// Hemisphere integral of `sin 2φ · G`.
    #[default]
    Kernel,
    /// Full-sphere integral of `sin²φ · ∂_φ d · (2I₁/d − 1)` with a centred
    /// difference for `∂_φ d`.
    RayDerivative,
}

fn check2(domain: &ConvexDomain2, z0: &Point2, n_nodes: usize) -> Result<()> {
    check_nodes(n_nodes, MIN_DERIVATIVE_NODES)?;
    domain.check_clearance(z0, INTERIOR_MARGIN * domain.diameter())
}

fn check3(domain: &ConvexDomain3, x0: &Point3, n_phi: usize, n_theta: usize) -> Result<()> {
    check_nodes(n_phi, MIN_DERIVATIVE_NODES)?;
    check_nodes(n_theta, MIN_DERIVATIVE_NODES)?;
    domain.check_clearance(x0, INTERIOR_MARGIN * domain.diameter())
}

/// `D_σ I₁(z₀)`.
pub fn d1_i1_2d(domain: &ConvexDomain2, z0: &Point2, sigma: f64, n_nodes: usize) -> Result<DirectionalDerivative> {
    check2(domain, z0, n_nodes)?;
    let ([s], _) = circle_integral(domain, z0, n_nodes, |phi, d| [(phi - sigma).cos() * d.ln()]);
    Ok(DirectionalDerivative {
        value: s / (2.0 * PI),
        order: 1,
        target: Target::MeanDistance,
        direction: Direction::Angle(sigma),
        n_nodes,
    })
}

/// `D²_σ I₁(z₀)`.
///
/// Moving the base point along `σ` changes the ray length at rate
/// `−cos(φ−σ) − sin(φ−σ) d′/d`; differentiating the first-derivative
/// integral with that and integrating by parts once gives the kernel
/// `2cos² − sin²`.
pub fn d2_i1_2d(domain: &ConvexDomain2, z0: &Point2, sigma: f64, n_nodes: usize) -> Result<DirectionalDerivative> {
    check2(domain, z0, n_nodes)?;
    let ([s], _) = circle_integral(domain, z0, n_nodes, |phi, d| {
        let (s, c) = (phi - sigma).sin_cos();
        [(2.0 * c * c - s * s) / d]
    });
    Ok(DirectionalDerivative {
        value: -s / (2.0 * PI),
        order: 2,
        target: Target::MeanDistance,
        direction: Direction::Angle(sigma),
        n_nodes,
    })
}

/// Breaks of `φ ↦ ln(d(φ+π)/d(φ))` inside `[σ−π/2, σ+π/2]`, endpoints
/// included.
fn half_range_breaks(domain: &ConvexDomain2, z0: &Point2, sigma: f64) -> Vec<f64> {
    let (lo, hi) = (sigma - FRAC_PI_2, sigma + FRAC_PI_2);
    let mut out = vec![lo, hi];
    for a in domain.angular_breaks(z0) {
        for b in [a, a - PI] {
            let shifted = lo + (b - lo).rem_euclid(2.0 * PI);
            if shifted > lo && shifted < hi {
                out.push(shifted);
            }
        }
    }
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}

/// `∫_{σ−π/2}^{σ+π/2} cos(φ−σ) ln(d(φ+π)/d(φ)) dφ`.
pub(crate) fn half_range_log_ratio(domain: &ConvexDomain2, z0: &Point2, sigma: f64, n_nodes: usize) -> f64 {
    let breaks = half_range_breaks(domain, z0, sigma);
    quadrature::integrate_panels_scalar(&breaks, n_nodes / 2, |phi| {
        let ratio = domain.chord_at(z0, phi + PI) / domain.chord_at(z0, phi);
        (phi - sigma).cos() * ratio.ln()
    })
    .value
}

/// `D_σ v(z₀)` in half-range form.
pub fn d1_v_2d(domain: &ConvexDomain2, z0: &Point2, sigma: f64, n_nodes: usize) -> Result<DirectionalDerivative> {
    check2(domain, z0, n_nodes)?;
    let i1 = stats::stats2(domain, z0, n_nodes)?.i1;
    Ok(DirectionalDerivative {
        value: i1 / PI * half_range_log_ratio(domain, z0, sigma, n_nodes),
        order: 1,
        target: Target::Variance,
        direction: Direction::Angle(sigma),
        n_nodes,
    })
}

/// `max_σ |∮ cos(φ−σ) ln d(z₀, φ) dφ|` over `n_sigma` equispaced angles.
/// Vanishes exactly at the variocentre.
pub fn variocentre_residual(domain: &ConvexDomain2, z0: &Point2, n_sigma: usize, n_nodes: usize) -> Result<f64> {
    check2(domain, z0, n_nodes)?;
    let n_sigma = n_sigma.max(1);
    let ([c, s], _) = circle_integral(domain, z0, n_nodes, |phi, d| {
        let l = d.ln();
        [phi.cos() * l, phi.sin() * l]
    });
    Ok((0..n_sigma)
        .map(|j| {
            let u = unit2(2.0 * PI * j as f64 / n_sigma as f64);
            (c * u.x + s * u.y).abs()
        })
        .fold(0.0, f64::max))
}

/// Rotation taking `sigma` to `+x`: the minimal one, or a half turn about
/// `+y` when `sigma` points along `−x`.
pub fn pole_rotation(sigma: &Point3) -> Rotation3<f64> {
    let s = sigma.normalize();
    if (s + Point3::x()).norm() <= 1e-12 {
        return Rotation3::from_axis_angle(&Point3::y_axis(), PI);
    }
    Rotation3::rotation_between(&s, &Point3::x()).unwrap_or_else(|| Rotation3::from_axis_angle(&Point3::y_axis(), PI))
}

/// `G(φ, θ)` for a fixed domain, base point and direction.
///
/// Angles are taken in the rotated frame where the direction is the pole;
/// `G` is odd under the antipodal map and vanishes when ray lengths are
/// centrally symmetric about the base point.
#[derive(Debug)]
pub struct GKernel<'a> {
    domain: &'a ConvexDomain3,
    x0: Point3,
    /// Rotated frame to world frame.
    to_world: Rotation3<f64>,
    i1: f64,
}

impl<'a> GKernel<'a> {
    pub fn new(domain: &'a ConvexDomain3, x0: Point3, sigma: Direction3, i1: f64) -> Self {
        GKernel {
            domain,
            x0,
            to_world: pole_rotation(&sigma.to_vector()).inverse(),
            i1,
        }
    }

    pub fn i1(&self) -> f64 {
        self.i1
    }

    /// `d` along the rotated-frame unit vector `u`.
    pub fn ray(&self, u: &Point3) -> f64 {
        self.domain.chord(&self.x0, &(self.to_world * u))
    }

    /// `G` at the rotated-frame unit vector `u`.
    pub fn at(&self, u: &Point3) -> f64 {
        let (fwd, back) = (self.ray(u), self.ray(&-u));
        2.0 * self.i1 * (back / fwd).ln() + fwd - back
    }

    pub fn eval(&self, phi: f64, theta: f64) -> f64 {
        self.at(&Direction3 { phi, theta }.to_vector())
    }
}

/// `D_σ v(x₀)` in kernel form.
pub fn d1_v_3d(
    domain: &ConvexDomain3,
    x0: &Point3,
    sigma: Direction3,
    n_phi: usize,
    n_theta: usize,
) -> Result<DirectionalDerivative> {
    d1_v_3d_with(domain, x0, sigma, n_phi, n_theta, Form3::Kernel)
}

pub fn d1_v_3d_with(
    domain: &ConvexDomain3,
    x0: &Point3,
    sigma: Direction3,
    n_phi: usize,
    n_theta: usize,
    form: Form3,
) -> Result<DirectionalDerivative> {
    check3(domain, x0, n_phi, n_theta)?;
    let rule = SphereRule::new(n_phi, n_theta);
    let i1 = stats3_with(domain, x0, &rule).i1;
    let kernel = GKernel::new(domain, *x0, sigma, i1);
    let value = match form {
        Form3::Kernel => kernel_integral(&kernel, &rule),
        Form3::RayDerivative => ray_derivative_integral(&kernel, &rule),
    };
    Ok(DirectionalDerivative {
        value,
        order: 1,
        target: Target::Variance,
        direction: Direction::Spherical(sigma),
        n_nodes: n_phi,
    })
}

/// `(1/4π) ∫_0^{2π} ∫_0^1 2t G dt dθ` with `t = cos φ`.
fn kernel_integral(kernel: &GKernel, rule: &SphereRule) -> f64 {
    let h = 2.0 * PI / rule.n_theta as f64;
    let rows: Vec<f64> = rule
        .polar
        .mapped(0.0, 1.0)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(t, w)| {
            let s = (1.0 - t * t).max(0.0).sqrt();
            let row: f64 = (0..rule.n_theta)
                .map(|j| {
                    let (st, ct) = (j as f64 * h).sin_cos();
                    kernel.at(&Point3::new(t, s * ct, s * st))
                })
                .sum();
            w * 2.0 * t * row * h
        })
        .collect();
    rows.iter().sum::<f64>() / (4.0 * PI)
}

/// `(1/4π) ∫∫ sin²φ ∂_φ d (2I₁/d − 1) dφ dθ` with `sin²φ dφ = sin φ dt`.
fn ray_derivative_integral(kernel: &GKernel, rule: &SphereRule) -> f64 {
    let h = RAY_DIFF_STEP;
    let i1 = kernel.i1();
    let [s] = sphere_integral(rule, |u| {
        let phi = u.x.clamp(-1.0, 1.0).acos();
        let theta = u.z.atan2(u.y);
        let at = |p: f64| {
            let (sp, cp) = p.sin_cos();
            let (st, ct) = theta.sin_cos();
            kernel.ray(&Point3::new(cp, sp * ct, sp * st))
        };
        let d = kernel.ray(u);
        let dd = (at(phi + h) - at(phi - h)) / (2.0 * h);
        [phi.sin() * dd * (2.0 * i1 / d - 1.0)]
    });
    s / (4.0 * PI)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::{Ball3, ConvexPolygon, Disk2, Polytope3};
    use crate::stats::{ball_stats_oracle, disk_variance_oracle, stats2};
    use crate::Error;

    fn disk() -> ConvexDomain2 {
        Disk2::unit().into()
    }

    fn square() -> ConvexDomain2 {
        ConvexPolygon::rectangle(0.0, 0.0, 1.0, 1.0).unwrap().into()
    }

    fn quad() -> ConvexDomain2 {
        let p = Point2::new;
        ConvexPolygon::new(vec![p(-2.0, -1.0), p(2.0, -1.0), p(1.0, 1.0), p(-1.0, 1.0)])
            .unwrap()
            .into()
    }

    fn cube() -> ConvexDomain3 {
        Polytope3::cuboid(Point3::repeat(-1.0), Point3::repeat(1.0)).unwrap().into()
    }

    #[test]
    fn symmetric_points_have_zero_first_derivatives() {
        for sigma in [0.0, 0.7, 2.0, -1.3] {
            assert_eq!(d1_i1_2d(&disk(), &Point2::zeros(), sigma, 256).unwrap().value.abs(), 0.0);
            let c = Point2::new(0.5, 0.5);
            assert!(d1_i1_2d(&square(), &c, sigma, 1024).unwrap().value.abs() < 1e-14);
            assert!(d1_v_2d(&disk(), &Point2::zeros(), sigma, 256).unwrap().value.abs() < 1e-15);
        }
    }

    #[test]
    fn disk_mean_distance_slope() {
        // I₁ = 2E(r)/π; central difference of the closed form
        let h = 1e-5;
        let i1 = |r: f64| 2.0 * crate::elliptic::ellip_e(r).unwrap() / PI;
        let fd = (i1(0.5 + h) - i1(0.5 - h)) / (2.0 * h);
        let d = d1_i1_2d(&disk(), &Point2::new(0.5, 0.0), 0.0, 4096).unwrap();
        assert!((d.value - fd).abs() < 1e-6, "{} vs {fd}", d.value);
        assert_eq!((d.order, d.target), (1, Target::MeanDistance));
    }

    #[test]
    fn second_derivative() {
        let d = d2_i1_2d(&disk(), &Point2::zeros(), 1.0, 256).unwrap();
        assert!((d.value + 0.5).abs() < 1e-14);

        let z = Point2::new(0.5, 0.0);
        let h = 1e-3;
        let i1 = |x: f64| stats2(&disk(), &Point2::new(x, 0.0), 4096).unwrap().i1;
        let fd = (i1(0.5 + h) - 2.0 * i1(0.5) + i1(0.5 - h)) / (h * h);
        let d2 = d2_i1_2d(&disk(), &z, 0.0, 4096).unwrap().value;
        assert!((d2 - fd).abs() < 1e-5, "{d2} vs {fd}");
    }

    #[test]
    fn disk_variance_slope_matches_closed_form() {
        for r in [0.3, 0.6, 0.9] {
            let h = 1e-6;
            let fd = (disk_variance_oracle(r + h).unwrap() - disk_variance_oracle(r - h).unwrap()) / (2.0 * h);
            let d = d1_v_2d(&disk(), &Point2::new(r, 0.0), 0.0, 4096).unwrap().value;
            assert!(d > 0.0);
            assert!((d - fd).abs() < 1e-6, "r={r}: {d} vs {fd}");
        }
    }

    #[test]
    fn quadrilateral_descends_downwards_at_origin() {
        let d = d1_v_2d(&quad(), &Point2::zeros(), -FRAC_PI_2, 4096).unwrap();
        assert!(d.value < 0.0, "{}", d.value);
    }

    #[test]
    fn product_identity_and_antisymmetry() {
        let q = quad();
        for (z, sigma) in [(Point2::new(0.3, -0.2), 0.4), (Point2::new(-1.1, -0.6), 2.9), (Point2::new(0.0, 0.7), -1.0)] {
            let i1 = stats2(&q, &z, 4096).unwrap().i1;
            let dv = d1_v_2d(&q, &z, sigma, 4096).unwrap().value;
            let di = d1_i1_2d(&q, &z, sigma, 4096).unwrap().value;
            assert!((dv + 2.0 * i1 * di).abs() < 1e-9, "{dv} vs {}", -2.0 * i1 * di);
            let opposite = d1_v_2d(&q, &z, sigma + PI, 4096).unwrap().value;
            assert!((dv + opposite).abs() < 1e-9);
        }
    }

    #[test]
    fn residual_examples() {
        assert!(variocentre_residual(&disk(), &Point2::zeros(), 64, 1024).unwrap() <= 1e-10);
        assert!(variocentre_residual(&square(), &Point2::new(0.5, 0.5), 64, 1024).unwrap() <= 1e-10);
        assert!(variocentre_residual(&quad(), &Point2::zeros(), 64, 4096).unwrap() > 1e-3);
    }

    #[test]
    fn rejects_points_on_or_near_the_boundary() {
        let on = Point2::new(1.0, 0.0);
        assert!(matches!(d1_v_2d(&disk(), &on, 0.0, 256), Err(Error::NotInterior { .. })));
        let near = Point2::new(1.0 - 1e-10, 0.0);
        assert!(d1_i1_2d(&disk(), &near, 0.0, 256).is_err());
        assert!(d2_i1_2d(&disk(), &Point2::zeros(), 0.0, 32).is_err());
    }

    #[test]
    fn pole_rotation_is_deterministic() {
        for v in [Point3::x(), -Point3::x(), Point3::new(0.2, -0.5, 0.9)] {
            let r = pole_rotation(&v);
            assert!((r * v.normalize() - Point3::x()).norm() < 1e-14);
        }
        let half = pole_rotation(&-Point3::x());
        assert!((half * Point3::y() - Point3::y()).norm() < 1e-14);
    }

    #[test]
    fn g_kernel_vanishes_with_central_symmetry() {
        let c = cube();
        let k = GKernel::new(&c, Point3::zeros(), Direction3::new(0.3, 1.0).unwrap(), 1.2);
        for (phi, theta) in [(0.1, 0.2), (1.0, 3.0), (1.5, 5.0)] {
            assert!(k.eval(phi, theta).abs() < 1e-14);
        }
    }

    #[test]
    fn solid_symmetric_points() {
        let sigma = Direction3::new(1.1, 0.4).unwrap();
        let ball: ConvexDomain3 = Ball3::unit().into();
        assert!(d1_v_3d(&ball, &Point3::zeros(), sigma, 64, 64).unwrap().value.abs() < 1e-14);
        assert!(d1_v_3d(&cube(), &Point3::zeros(), sigma, 128, 128).unwrap().value.abs() < 1e-12);
    }

    #[test]
    fn ball_slope_matches_closed_form() {
        let ball: ConvexDomain3 = Ball3::unit().into();
        let pole = Direction3::new(0.0, 0.0).unwrap();
        for r in [0.3, 0.6] {
            let h = 1e-5;
            let v = |r: f64| ball_stats_oracle(r).unwrap().variance;
            let fd = (v(r + h) - v(r - h)) / (2.0 * h);
            let x = Point3::new(r, 0.0, 0.0);
            let kernel = d1_v_3d(&ball, &x, pole, 512, 512).unwrap().value;
            let ray = d1_v_3d_with(&ball, &x, pole, 512, 512, Form3::RayDerivative).unwrap().value;
            assert!((kernel - fd).abs() < 1e-5, "r={r}: {kernel} vs {fd}");
            assert!((kernel - ray).abs() < 1e-6, "r={r}: {kernel} vs {ray}");
        }
    }

    #[test]
    fn ball_slope_in_other_directions() {
        let ball: ConvexDomain3 = Ball3::unit().into();
        let x = Point3::new(0.0, -0.4, 0.3);
        let sigma = Direction3::from_vector(&x).unwrap();
        let r = x.norm();
        let h = 1e-5;
        let v = |r: f64| ball_stats_oracle(r).unwrap().variance;
        let fd = (v(r + h) - v(r - h)) / (2.0 * h);
        let d = d1_v_3d(&ball, &x, sigma, 256, 256).unwrap().value;
        assert!((d - fd).abs() < 1e-6, "{d} vs {fd}");
    }
}
