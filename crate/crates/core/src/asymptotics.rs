//! Growth of the variance slope near the boundary, and the annulus
//! comparison functions behind the lower bounds.
//!
//! Approaching a boundary point `w` along `z_δ = (1−δ)w + δz₀`, the slope
//! `D_σ v(z_δ)` towards `w` grows like `ln(1/δ)`. [`near_boundary_probe_2d`]
//! and [`near_boundary_probe_3d`] tabulate the slope next to the explicit
//! lower bound it must exceed.
//!
//! `F(r, ε)` is the half-range log integral of the slope formula on the
//! star-shaped region `V` obtained by pushing the half of the unit disk in
//! front of `(r, 0)` out to radius `1 + ε`. It is negative for small `r`
//! and positive for `r` near 1; [`annulus_threshold`] finds the crossing.

use std::f64::consts::{FRAC_PI_2, LN_2, PI};
use std::sync::Arc;

use crate::derivatives::{d1_v_2d, d1_v_3d};
use crate::domains::{Direction3, Point2, Point3, RadialDomain2};
use crate::domains::{ConvexDomain2, ConvexDomain3};
use crate::elliptic::ellip_k_minus_e;
use crate::error::{Error, Result};
use crate::stats::{self, DEFAULT_NODES_2D};

/// Smallest accepted probe distance.
pub const DELTA_FLOOR: f64 = 1e-6;

/// Arguments closer to ±1 than this are rejected by [`atanh_guarded`].
pub const ATANH_GUARD: f64 = 1e-12;

/// Sample step of the sign scan in [`annulus_threshold`].
pub const THRESHOLD_GRID: f64 = 1e-3;

fn check_r(r: f64) -> Result<()> {
    if r > 0.0 && r < 1.0 {
        Ok(())
    } else {
        Err(Error::OutOfDomain { what: "r", value: r })
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if eps >= 0.0 && eps.is_finite() {
        Ok(())
    } else {
        Err(Error::OutOfDomain { what: "eps", value: eps })
    }
}

/// `F(r, ε) = ln((1−r²)/((1+ε)²−r²)) + (2/r)(K−E)(r) + (2(1+ε)/r)(K−E)(r/(1+ε))`.
///
/// At `ε = 0` this is `(4/r)(K−E)(r)`, which is positive; as `r → 0⁺` it
/// tends to `−2 ln(1+ε)`.
#[allow(non_snake_case)]
pub fn annulus_F(r: f64, eps: f64) -> Result<f64> {
    check_r(r)?;
    check_eps(eps)?;
    let kme = ellip_k_minus_e(r)?;
    if eps == 0.0 {
        return Ok(4.0 / r * kme);
    }
    let outer = 1.0 + eps;
    let log_term = (1.0 - r * r).ln() - ((outer - r) * (outer + r)).ln();
    Ok(log_term + 2.0 / r * kme + 2.0 * outer / r * ellip_k_minus_e(r / outer)?)
}

/// `4π Σ_{n=1}^{terms} a_n · n/(2n−1) · r^{2n−1}` with
/// `a_n = ((2n−1)!!/(2n)!!)²`, the power series of `F(r, 0)`.
pub fn annulus_limit_series(r: f64, terms: usize) -> Result<f64> {
    check_r(r)?;
    let r2 = r * r;
    let (mut a, mut pow, mut sum) = (1.0, 1.0 / r, 0.0);
    for n in 1..=terms {
        let nf = n as f64;
        let ratio = (2.0 * nf - 1.0) / (2.0 * nf);
        a *= ratio * ratio;
        pow *= r2;
        sum += a * nf / (2.0 * nf - 1.0) * pow;
    }
    Ok(4.0 * PI * sum)
}

/// The crossing `r(ε)` of `F(·, ε)` on `(0, 1)`.
///
/// Samples `F` on a geometric grid below the scan step and an equispaced
/// grid above it, takes the last sampled sign change below which `F` is
/// positive on every later sample, and bisects it until `|F| ≤ bracket_tol`
/// or the bracket collapses.
pub fn annulus_threshold(eps: f64, bracket_tol: f64) -> Result<f64> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::OutOfDomain { what: "eps", value: eps });
    }
    let f = |r: f64| annulus_F(r, eps);
    let mut grid: Vec<f64> = (0..=60).map(|i| 1e-12 * (THRESHOLD_GRID / 1e-12).powf(i as f64 / 60.0)).collect();
    let steps = (1.0 / THRESHOLD_GRID).round() as usize;
    grid.extend((2..steps).map(|i| i as f64 * THRESHOLD_GRID));
    let values = grid.iter().map(|&r| f(r)).collect::<Result<Vec<_>>>()?;

    if values[values.len() - 1] <= 0.0 {
        return Err(Error::NoSignChange { eps });
    }
    let Some(k) = values.iter().rposition(|&v| v <= 0.0) else {
        return Err(Error::NoSignChange { eps });
    };
    let (mut lo, mut hi) = (grid[k], grid[k + 1]);
    loop {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid)?;
        if fm.abs() <= bracket_tol || mid <= lo || mid >= hi {
            return Ok(mid);
        }
        if fm > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
}

/// `½ ln((1+x)/(1−x))`, rejecting `|x| ≥ 1 − 10⁻¹²`.
pub fn atanh_guarded(x: f64) -> Result<f64> {
    if x.abs() < 1.0 - ATANH_GUARD {
        Ok(0.5 * ((1.0 + x) / (1.0 - x)).ln())
    } else {
        Err(Error::OutOfDomain {
            what: "atanh argument",
            value: x,
        })
    }
}

/// `∫_{−π/2}^{π/2} cos φ ln(r cos φ + √(1 − r² sin²φ)) dφ
///  = ln(1−r²) + (2/r)(K−E)(r)`.
pub fn chord_log_moment_2d(r: f64) -> Result<f64> {
    check_r(r)?;
    Ok((1.0 - r * r).ln() + 2.0 / r * ellip_k_minus_e(r)?)
}

/// `∫_0^{π/2} sin 2φ ln(r cos φ + √(1 − r² sin²φ)) dφ
///  = ln√(1−r²) + ((r²+1) artanh r − r)/(2r²)`.
pub fn chord_log_moment_3d(r: f64) -> Result<f64> {
    check_r(r)?;
    let r2 = r * r;
    Ok(0.5 * (1.0 - r2).ln() + ((r2 + 1.0) * atanh_guarded(r)? - r) / (2.0 * r2))
}

/// The star-shaped region about `(r, 0)` bounded by the circle of radius
/// `1 + ε` in front (`|φ| ≤ π/2`) and the unit circle behind.
pub fn comparison_domain_v(r: f64, eps: f64) -> Result<RadialDomain2> {
    check_r(r)?;
    check_eps(eps)?;
    let outer = (1.0 + eps).powi(2);
    let radius = move |phi: f64| {
        let a = phi.rem_euclid(2.0 * PI);
        let (s, c) = a.sin_cos();
        let front = a <= FRAC_PI_2 || a >= 3.0 * FRAC_PI_2;
        let big = if front { outer } else { 1.0 };
        -r * c + (big - r * r * s * s).sqrt()
    };
    RadialDomain2::new(Point2::new(r, 0.0), Arc::new(radius), vec![FRAC_PI_2, 3.0 * FRAC_PI_2])
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlopeProbe {
    /// Boundary point approached.
    pub target: Vec<f64>,
    /// Unit vector from the base point towards the target.
    pub direction: Vec<f64>,
    pub deltas: Vec<f64>,
    /// `D_σ v(z_δ)`.
    pub slopes: Vec<f64>,
    /// `slope / ln(1/δ)`.
    pub ratios: Vec<f64>,
    /// Explicit lower bound for each slope.
    pub lower_bounds: Vec<f64>,
    /// `I₁(z_δ)`.
    pub i1: Vec<f64>,
}

fn check_deltas(deltas: &[f64]) -> Result<()> {
    for &d in deltas {
        if !(DELTA_FLOOR..1.0).contains(&d) {
            return Err(Error::OutOfDomain { what: "delta", value: d });
        }
    }
    if deltas.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidGeometry("deltas must be strictly decreasing".into()));
    }
    Ok(())
}

/// `(I₁/π)(ln 4 − 2 + ln(2−δ) + ln(1/δ))`.
pub fn planar_lower_bound(i1: f64, delta: f64) -> f64 {
    i1 / PI * (2.0 * LN_2 - 2.0 + (2.0 - delta).ln() - delta.ln())
}

/// `I₁(½ ln(2/δ − 1) − ½) − diam/2`.
pub fn solid_lower_bound(i1: f64, delta: f64, diameter: f64) -> f64 {
    i1 * (0.5 * (2.0 / delta - 1.0).ln() - 0.5) - 0.5 * diameter
}

/// Slopes of `v` approaching the boundary point nearest to `z0`.
pub fn near_boundary_probe_2d(
    domain: &ConvexDomain2,
    z0: &Point2,
    deltas: &[f64],
    n_nodes: usize,
) -> Result<SlopeProbe> {
    check_deltas(deltas)?;
    domain.check_interior(z0)?;
    let w = domain.nearest_boundary(z0)?;
    let u = (w - z0).normalize();
    let sigma = u.y.atan2(u.x);
    let mut probe = SlopeProbe {
        target: w.iter().copied().collect(),
        direction: u.iter().copied().collect(),
        deltas: deltas.to_vec(),
        slopes: Vec::new(),
        ratios: Vec::new(),
        lower_bounds: Vec::new(),
        i1: Vec::new(),
    };
    for &delta in deltas {
        let z = (1.0 - delta) * w + delta * z0;
        let i1 = stats::stats2(domain, &z, n_nodes)?.i1;
        let slope = d1_v_2d(domain, &z, sigma, n_nodes)?.value;
        probe.slopes.push(slope);
        probe.ratios.push(slope / -delta.ln());
        probe.lower_bounds.push(planar_lower_bound(i1, delta));
        probe.i1.push(i1);
    }
    Ok(probe)
}

/// Slopes of `v` approaching the boundary point nearest to `x0`.
pub fn near_boundary_probe_3d(
    domain: &ConvexDomain3,
    x0: &Point3,
    deltas: &[f64],
    n_phi: usize,
    n_theta: usize,
) -> Result<SlopeProbe> {
    check_deltas(deltas)?;
    domain.check_interior(x0)?;
    let w = domain.nearest_boundary(x0);
    let u = (w - x0).normalize();
    let sigma = Direction3::from_vector(&u)?;
    let diameter = domain.diameter();
    let mut probe = SlopeProbe {
        target: w.iter().copied().collect(),
        direction: u.iter().copied().collect(),
        deltas: deltas.to_vec(),
        slopes: Vec::new(),
        ratios: Vec::new(),
        lower_bounds: Vec::new(),
        i1: Vec::new(),
    };
    for &delta in deltas {
        let x = (1.0 - delta) * w + delta * x0;
        let i1 = stats::stats3(domain, &x, n_phi, n_theta)?.i1;
        let slope = d1_v_3d(domain, &x, sigma, n_phi, n_theta)?.value;
        probe.slopes.push(slope);
        probe.ratios.push(slope / -delta.ln());
        probe.lower_bounds.push(solid_lower_bound(i1, delta, diameter));
        probe.i1.push(i1);
    }
    Ok(probe)
}

/// [`near_boundary_probe_2d`] at the default resolution.
pub fn near_boundary_probe_2d_default(domain: &ConvexDomain2, z0: &Point2, deltas: &[f64]) -> Result<SlopeProbe> {
    near_boundary_probe_2d(domain, z0, deltas, DEFAULT_NODES_2D)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derivatives::half_range_log_ratio;
    use crate::domains::{Ball3, ConvexPolygon, Disk2, Polytope3};
    use crate::quadrature::{integrate_panels_scalar, GaussLegendre};
    use crate::stats::ball_stats_oracle;

    #[test]
    fn limit_value_and_series() {
        let f = annulus_F(0.5, 0.0).unwrap();
        assert!((f - 1.746305).abs() < 5e-7, "{f}");
        for r in [0.1, 0.3, 0.5, 0.7, 0.9] {
            let series = annulus_limit_series(r, 400).unwrap();
            assert!((annulus_F(r, 0.0).unwrap() - series).abs() < 1e-10);
        }
        assert!(annulus_F(0.0, 0.1).is_err());
        assert!(annulus_F(1.0, 0.1).is_err());
        assert!(annulus_F(0.5, -0.1).is_err());
    }

    #[test]
    fn continuity_in_eps() {
        let base = annulus_F(0.4, 0.0).unwrap();
        let gaps: Vec<f64> = [1e-2, 1e-4, 1e-6, 1e-8]
            .iter()
            .map(|&e| (annulus_F(0.4, e).unwrap() - base).abs())
            .collect();
        assert!(gaps.windows(2).all(|w| w[1] < w[0]));
        assert!(gaps[3] < 1e-6);
    }

    #[test]
    fn small_r_approaches_minus_two_log() {
        let target = -2.0 * 1.1f64.ln();
        let gaps: Vec<f64> = [1e-3, 1e-5, 1e-7]
            .iter()
            .map(|&r| (annulus_F(r, 0.1).unwrap() - target).abs())
            .collect();
        assert!(gaps.windows(2).all(|w| w[1] < w[0]));
        assert!(gaps[2] < 1e-6);
        // the leading correction is linear in r with slope π(2+ε)/(2(1+ε))
        let slope = PI * 2.1 / 2.2;
        assert!((gaps[0] - slope * 1e-3).abs() < 1e-5);
    }

    #[test]
    fn threshold_brackets_a_sign_change() {
        let r = annulus_threshold(0.01, 1e-12).unwrap();
        assert!(annulus_F(r - 1e-3, 0.01).unwrap() < 0.0);
        assert!(annulus_F(r + 1e-3, 0.01).unwrap() > 0.0);
        let small = annulus_threshold(0.001, 1e-12).unwrap();
        assert!(small < r);
        assert!(matches!(annulus_threshold(50.0, 1e-12), Err(Error::NoSignChange { .. })));
        assert!(annulus_threshold(0.0, 1e-12).is_err());
    }

    #[test]
    fn comparison_domain_shapes() {
        let v = comparison_domain_v(0.3, 0.0).unwrap();
        for k in 0..16 {
            let phi = 0.4 * k as f64;
            let chord = Disk2::unit().chord(&Point2::new(0.3, 0.0), &crate::domains::unit2(phi));
            assert!((v.rho(phi) - chord).abs() < 1e-14);
        }
        let v = comparison_domain_v(0.5, 0.1).unwrap();
        assert!((v.rho(0.0) - 0.6).abs() < 1e-15);
        assert!(comparison_domain_v(1.0, 0.1).is_err());
    }

    #[test]
    fn comparison_log_integral_is_f() {
        for (r, eps) in [(0.5, 0.1), (0.2, 0.05), (0.8, 0.3)] {
            let v: ConvexDomain2 = comparison_domain_v(r, eps).unwrap().into();
            let z = Point2::new(r, 0.0);
            let q = half_range_log_ratio(&v, &z, 0.0, 4096);
            assert!((q - annulus_F(r, eps).unwrap()).abs() < 1e-8, "{q}");
        }
    }

    #[test]
    fn log_moments() {
        for r in [0.1, 0.5, 0.9] {
            let two = integrate_panels_scalar(&[-FRAC_PI_2, 0.0, FRAC_PI_2], 512, |phi| {
                let (s, c) = phi.sin_cos();
                c * (r * c + (1.0 - r * r * s * s).sqrt()).ln()
            });
            assert!((two.value - chord_log_moment_2d(r).unwrap()).abs() < 1e-9);
            let three = integrate_panels_scalar(&[0.0, FRAC_PI_2], 512, |phi| {
                let (s, c) = phi.sin_cos();
                (2.0 * phi).sin() * (r * c + (1.0 - r * r * s * s).sqrt()).ln()
            });
            assert!((three.value - chord_log_moment_3d(r).unwrap()).abs() < 1e-9, "{r}");
        }
        let rule = GaussLegendre::new(200);
        // ∫_0^{π/2} sin 2φ ln cos φ dφ = ∫_0^1 2u ln u du
        let v = integrate_panels_scalar(&[0.0, FRAC_PI_2], 1024, |phi| (2.0 * phi).sin() * phi.cos().ln()).value;
        assert!((v + 0.5).abs() < 1e-12);
        assert!((rule.integrate(0.0, 1.0, |u| 2.0 * u * u.ln()) + 0.5).abs() < 1e-6);
    }

    #[test]
    fn guarded_atanh() {
        assert!((atanh_guarded(0.5).unwrap() - 0.5f64.atanh()).abs() < 1e-15);
        assert!(atanh_guarded(1.0 - 1e-13).is_err());
        assert!(atanh_guarded(-1.0).is_err());
    }

    #[test]
    fn disk_probe_meets_bound() {
        let d: ConvexDomain2 = Disk2::unit().into();
        let p = near_boundary_probe_2d(&d, &Point2::zeros(), &[1e-2, 1e-3, 1e-4], 4096).unwrap();
        assert_eq!(p.target, vec![1.0, 0.0]);
        for i in 0..3 {
            assert!(p.slopes[i] >= p.lower_bounds[i], "{:?}", p);
            assert!((0.1..=10.0).contains(&p.ratios[i]));
        }
    }

    #[test]
    fn square_probe_meets_bound() {
        let s: ConvexDomain2 = ConvexPolygon::rectangle(0.0, 0.0, 1.0, 1.0).unwrap().into();
        let p = near_boundary_probe_2d(&s, &Point2::new(0.5, 0.5), &[1e-2, 1e-3, 1e-4], 4096).unwrap();
        for i in 0..3 {
            assert!(p.slopes[i] >= p.lower_bounds[i], "{:?}", p);
        }
    }

    #[test]
    fn probe_rejects_bad_deltas() {
        let d: ConvexDomain2 = Disk2::unit().into();
        assert!(near_boundary_probe_2d(&d, &Point2::zeros(), &[1e-3, 1e-2], 256).is_err());
        assert!(near_boundary_probe_2d(&d, &Point2::zeros(), &[1e-7], 256).is_err());
        assert!(near_boundary_probe_2d(&d, &Point2::zeros(), &[1.0], 256).is_err());
    }

    #[test]
    fn ball_probe_matches_closed_form() {
        let b: ConvexDomain3 = Ball3::unit().into();
        let deltas = [1e-2, 1e-3];
        let p = near_boundary_probe_3d(&b, &Point3::zeros(), &deltas, 512, 512).unwrap();
        for (i, &delta) in deltas.iter().enumerate() {
            let r = 1.0 - delta;
            let h = 1e-7;
            let v = |r: f64| ball_stats_oracle(r).unwrap().variance;
            let fd = (v(r + h) - v(r - h)) / (2.0 * h);
            assert!((p.slopes[i] - fd).abs() < 1e-4, "{} vs {fd}", p.slopes[i]);
            assert!(p.slopes[i] >= p.lower_bounds[i]);
            assert!(p.slopes[i] >= p.lower_bounds[i] - 0.5 * 2.0);
        }
    }

    #[test]
    fn cube_probe_ratios_are_bounded() {
        let c: ConvexDomain3 = Polytope3::cuboid(Point3::repeat(-1.0), Point3::repeat(1.0)).unwrap().into();
        let p = near_boundary_probe_3d(&c, &Point3::zeros(), &[1e-2, 1e-3], 256, 256).unwrap();
        for i in 0..2 {
            assert!((0.05..=20.0).contains(&p.ratios[i]), "{:?}", p);
            assert!(p.slopes[i] >= p.lower_bounds[i]);
        }
    }
}
