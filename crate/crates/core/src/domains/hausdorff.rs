use crate::domains::{ConvexPolygon, Point2};

const SAMPLES_PER_EDGE: usize = 64;

/// Hausdorff distance between two convex polygons, resolved to the
/// boundary sampling (vertices plus 64 points per edge).
///
/// For convex sets the supremum of `d(·, B)` over `A` is reached on the
/// boundary of `A`, so boundary samples suffice.
pub fn hausdorff2(a: &ConvexPolygon, b: &ConvexPolygon) -> f64 {
    directed(a, b).max(directed(b, a))
}

fn directed(from: &ConvexPolygon, to: &ConvexPolygon) -> f64 {
    let v = from.vertices();
    let n = v.len();
    let mut best: f64 = 0.0;
    for i in 0..n {
        let (p, q) = (v[i], v[(i + 1) % n]);
        for s in 0..SAMPLES_PER_EDGE {
            let t = s as f64 / SAMPLES_PER_EDGE as f64;
            let x: Point2 = p + t * (q - p);
            best = best.max(to.distance_to(&x));
        }
    }
    best
}
