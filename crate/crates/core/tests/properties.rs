use std::f64::consts::{FRAC_PI_2, PI};

use approx::assert_relative_eq;
use nalgebra::Rotation3;
use proptest::prelude::*;
use vario::derivatives::{d1_i1_2d, d1_v_2d, d1_v_3d};
use vario::domains::{hausdorff2, Ball3, ConvexDomain2, ConvexDomain3, ConvexPolygon, Direction3, Disk2, Point2, Point3, Polytope3};
use vario::stats::{disk_variance_oracle, stats2, stats3};
use vario::variocentre::{find_min_variance_3d, find_min_variance_3d_from, find_variocentre_2d, find_variocentre_2d_from, SearchOptions};

const NODES: usize = 4096;

fn polygon() -> impl Strategy<Value = ConvexPolygon> {
    prop::collection::vec((0.0..2.0 * PI, 0.6f64..1.4), 5..10).prop_filter_map("degenerate hull", |pts| {
        let pts: Vec<Point2> = pts.iter().map(|&(phi, rho)| rho * Point2::new(phi.cos(), phi.sin())).collect();
        let p = ConvexPolygon::hull(&pts).ok()?;
        (p.area() > 0.5).then_some(p)
    })
}

/// A point on the segment from the centroid towards a vertex.
fn inner_point(p: &ConvexPolygon, pick: usize, t: f64) -> Point2 {
    let c = p.centroid();
    let v = p.vertices()[pick % p.len()];
    c + t * (v - c)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn second_moment_is_area_over_pi(p in polygon(), pick in 0usize..16, t in 0.0f64..0.95) {
        let x = inner_point(&p, pick, t);
        let target = p.area() / PI;
        let d: ConvexDomain2 = p.into();
        prop_assert!((stats2(&d, &x, NODES).unwrap().i2 - target).abs() < 1e-10);
    }

    #[test]
    fn variance_is_rigid_motion_invariant_and_scales_quadratically(
        p in polygon(), pick in 0usize..16, t in 0.0f64..0.9,
        angle in 0.0..2.0 * PI, scale in 0.2f64..5.0, sx in -3.0f64..3.0, sy in -3.0f64..3.0,
    ) {
        let x = inner_point(&p, pick, t);
        let d: ConvexDomain2 = p.into();
        let shift = Point2::new(sx, sy);
        let moved = d.transformed(angle, scale, &shift).unwrap();
        let y = scale * (nalgebra::Rotation2::new(angle) * x) + shift;
        let v = stats2(&d, &x, NODES).unwrap().variance;
        let w = stats2(&moved, &y, NODES).unwrap().variance;
        prop_assert!((w - scale * scale * v).abs() <= 1e-10 * (1.0 + w.abs()));
    }

    #[test]
    fn planar_derivative_is_linear_in_direction(p in polygon(), pick in 0usize..16, t in 0.0f64..0.9, sigma in 0.0..2.0 * PI) {
        let x = inner_point(&p, pick, t);
        let d: ConvexDomain2 = p.into();
        let gx = d1_v_2d(&d, &x, 0.0, NODES).unwrap().value;
        let gy = d1_v_2d(&d, &x, FRAC_PI_2, NODES).unwrap().value;
        let along = d1_v_2d(&d, &x, sigma, NODES).unwrap().value;
        prop_assert!((along - (gx * sigma.cos() + gy * sigma.sin())).abs() < 1e-10);
        let i1 = stats2(&d, &x, NODES).unwrap().i1;
        let di1 = d1_i1_2d(&d, &x, sigma, NODES).unwrap().value;
        prop_assert!((along + 2.0 * i1 * di1).abs() < 1e-9);
    }

    #[test]
    fn variance_is_convex_along_segments(p in polygon(), a in 0usize..16, b in 0usize..16, s in 0.0f64..0.9, t in 0.0f64..0.9, lambda in 0.05f64..0.95) {
        let (x, y) = (inner_point(&p, a, s), inner_point(&p, b, t));
        let d: ConvexDomain2 = p.into();
        let v = |z: Point2| stats2(&d, &z, NODES).unwrap().variance;
        let mid = v(lambda * x + (1.0 - lambda) * y);
        prop_assert!(mid <= lambda * v(x) + (1.0 - lambda) * v(y) + 1e-12);
    }
}

#[test]
fn variocentre_moves_with_the_domain() {
    let p = Point2::new;
    let quad: ConvexDomain2 = ConvexPolygon::new(vec![p(-2.0, -1.0), p(2.0, -1.0), p(1.0, 1.0), p(-1.0, 1.0)])
        .unwrap()
        .into();
    let base = find_variocentre_2d(&quad, 1e-9, 500).unwrap();
    let (angle, scale, shift) = (0.7, 2.5, p(3.0, -1.0));
    let moved = quad.transformed(angle, scale, &shift).unwrap();
    let image = find_variocentre_2d(&moved, 1e-9, 500).unwrap();
    let expected = scale * (nalgebra::Rotation2::new(angle) * base.point2().unwrap()) + shift;
    assert!((image.point2().unwrap() - expected).norm() < 1e-7);
    assert_relative_eq!(image.min_variance, scale * scale * base.min_variance, max_relative = 1e-9);
}

#[test]
fn variocentre_is_a_fixed_point_and_start_independent() {
    let hex: ConvexDomain2 = ConvexPolygon::new(
        [(0.0, -1.0), (1.5, -0.6), (1.8, 0.4), (0.6, 1.2), (-0.9, 0.9), (-1.2, -0.3)]
            .iter()
            .map(|&(x, y)| Point2::new(x, y))
            .collect(),
    )
    .unwrap()
    .into();
    let opts = SearchOptions::planar(1e-8, 500);
    let found = find_variocentre_2d(&hex, 1e-8, 500).unwrap();
    let z = found.point2().unwrap();
    let again = find_variocentre_2d_from(&hex, &z, opts).unwrap();
    assert!(again.iterations <= 1);
    assert!((again.point2().unwrap() - z).norm() < 1e-8);
    for start in [Point2::new(1.4, 0.3), Point2::new(-0.8, 0.6), Point2::new(0.1, -0.8)] {
        let other = find_variocentre_2d_from(&hex, &start, opts).unwrap();
        assert!((other.point2().unwrap() - z).norm() < 1e-6, "from {start:?}");
    }
}

#[test]
fn descent_trace_never_climbs() {
    let tri: ConvexDomain2 = ConvexPolygon::new(vec![Point2::new(0.0, 0.0), Point2::new(4.0, 0.0), Point2::new(0.5, 1.0)])
        .unwrap()
        .into();
    let r = find_variocentre_2d_from(&tri, &Point2::new(3.2, 0.15), SearchOptions::planar(1e-8, 500)).unwrap();
    assert!(r.converged);
    assert_eq!(r.trace.len(), r.iterations + 1);
    for w in r.trace.windows(2) {
        assert!(w[1] <= w[0] + 64.0 * f64::EPSILON * w[0].abs(), "{w:?}");
    }
}

#[test]
fn inscribed_polygons_approach_the_disk() {
    let disk = Disk2::unit();
    let x = Point2::new(0.35, -0.2);
    let exact = disk_variance_oracle(x.norm()).unwrap();
    let circle = ConvexPolygon::regular(2048, Point2::zeros(), 1.0).unwrap();
    let mut last = (f64::INFINITY, f64::INFINITY);
    for m in [8, 16, 32, 64, 128, 256] {
        let p = ConvexPolygon::regular(m, Point2::zeros(), 1.0).unwrap();
        let gap = hausdorff2(&p, &circle);
        let err = (stats2(&p.into(), &x, NODES).unwrap().variance - exact).abs();
        assert!(gap < last.0 && err < last.1, "m = {m}: gap {gap}, error {err}");
        last = (gap, err);
    }
    assert!(last.1 < 1e-4);
    let d: ConvexDomain2 = disk.into();
    assert!((stats2(&d, &x, NODES).unwrap().variance - exact).abs() < 1e-12);
}

#[test]
fn solid_derivative_matches_gradient_components() {
    let box3: ConvexDomain3 = Polytope3::cuboid(Point3::new(-1.0, -0.7, -1.3), Point3::new(1.2, 0.9, 0.8))
        .unwrap()
        .into();
    let x = Point3::new(0.2, -0.1, 0.3);
    let u = Point3::new(0.3, -0.5, 0.81).normalize();
    // Each direction is integrated in its own polar frame, so agreement is
    // limited by the quadrature on the flat faces and improves with resolution.
    let gap = |n: usize| {
        let axis = |v: Point3| d1_v_3d(&box3, &x, Direction3::from_vector(&v).unwrap(), n, n).unwrap().value;
        let g = Point3::new(axis(Point3::x()), axis(Point3::y()), axis(Point3::z()));
        (axis(u) - g.dot(&u)).abs()
    };
    let (coarse, fine) = (gap(256), gap(512));
    assert!(coarse < 1e-5 && fine < coarse, "{coarse:e} then {fine:e}");
}

#[test]
fn solid_variance_is_rotation_invariant() {
    let cube: ConvexDomain3 = Polytope3::cuboid(Point3::repeat(-1.0), Point3::repeat(1.0)).unwrap().into();
    let rot = Rotation3::from_euler_angles(0.3, -0.5, 1.1);
    let turned = cube.transformed(&rot, 1.0, &Point3::zeros()).unwrap();
    let x = Point3::new(0.25, -0.1, 0.4);
    let v = stats3(&cube, &x, 512, 512).unwrap().variance;
    let w = stats3(&turned, &(rot * x), 512, 512).unwrap().variance;
    // Different kink placement relative to the nodes; the product rule
    // agrees to its own accuracy on polytopes.
    assert!((v - w).abs() < 1e-4, "{v} vs {w}");
    let ball: ConvexDomain3 = Ball3::unit().into();
    let b = stats3(&ball, &x, 256, 256).unwrap().variance;
    let c = stats3(&ball, &(rot * x), 256, 256).unwrap().variance;
    assert!((b - c).abs() < 1e-12);
}

#[test]
fn solid_descent_finds_the_cube_centre() {
    let cube: ConvexDomain3 = Polytope3::cuboid(Point3::repeat(-1.0), Point3::repeat(1.0)).unwrap().into();
    let shifted = cube.transformed(&Rotation3::identity(), 1.0, &Point3::new(0.5, 0.0, 0.0)).unwrap();
    let centre = Point3::new(0.5, 0.0, 0.0);
    let r = find_min_variance_3d(&shifted, 1e-7, 200).unwrap();
    assert!((r.point3().unwrap() - centre).norm() < 1e-9);
    let start = Point3::new(1.1, 0.4, -0.3);
    let r = find_min_variance_3d_from(&shifted, &start, SearchOptions::solid(1e-6, 200)).unwrap();
    assert!(r.converged);
    assert!((r.point3().unwrap() - centre).norm() < 1e-4, "{:?}", r.location);
}
