use std::f64::consts::PI;

use crate::domains::{unit2, Point2, MEMBERSHIP_SLACK};
use crate::error::{Error, Result};

/// A strictly convex polygon with counterclockwise vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexPolygon {
    vertices: Vec<Point2>,
    /// Outward unit normal of edge `i` (from vertex `i` to `i + 1`).
    normals: Vec<Point2>,
}

impl ConvexPolygon {
    pub fn new(vertices: Vec<Point2>) -> Result<Self> {
        let n = vertices.len();
        if n < 3 {
            return Err(Error::InvalidGeometry(format!(
                "polygon needs at least 3 vertices, got {n}"
            )));
        }
        if vertices.iter().any(|v| !v.x.is_finite() || !v.y.is_finite()) {
            return Err(Error::InvalidGeometry("non-finite vertex".into()));
        }
        let mut normals = Vec::with_capacity(n);
        for i in 0..n {
            let e = vertices[(i + 1) % n] - vertices[i];
            let len = e.norm();
            if len == 0.0 {
                return Err(Error::InvalidGeometry(format!("repeated vertex at index {i}")));
            }
            normals.push(Point2::new(e.y, -e.x) / len);
        }
        for i in 0..n {
            let e0 = vertices[(i + 1) % n] - vertices[i];
            let e1 = vertices[(i + 2) % n] - vertices[(i + 1) % n];
            let turn = e0.perp(&e1) / (e0.norm() * e1.norm());
            if turn <= 1e-12 {
                return Err(Error::InvalidGeometry(format!(
                    "vertices are not strictly convex counterclockwise at index {}",
                    (i + 1) % n
                )));
            }
        }
        // A star polygon passes the local turn test but winds more than once.
        let winding: f64 = (0..n)
            .map(|i| {
                let e0 = vertices[(i + 1) % n] - vertices[i];
                let e1 = vertices[(i + 2) % n] - vertices[(i + 1) % n];
                e0.perp(&e1).atan2(e0.dot(&e1))
            })
            .sum();
        if (winding - 2.0 * PI).abs() > 1e-6 {
            return Err(Error::InvalidGeometry("polygon winds more than once".into()));
        }
        Ok(ConvexPolygon { vertices, normals })
    }

    /// Convex hull of a point set (Andrew's monotone chain), collinear
    /// points dropped.
    pub fn hull(points: &[Point2]) -> Result<Self> {
        let mut pts: Vec<Point2> = points.to_vec();
        pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
        pts.dedup();
        if pts.len() < 3 {
            return Err(Error::InvalidGeometry("hull of fewer than 3 points".into()));
        }
        let cross = |o: &Point2, a: &Point2, b: &Point2| (a - o).perp(&(b - o));
        let mut lower: Vec<Point2> = Vec::new();
        for p in &pts {
            while lower.len() >= 2 && cross(&lower[lower.len() - 2], &lower[lower.len() - 1], p) <= 0.0 {
                lower.pop();
            }
            lower.push(*p);
        }
        let mut upper: Vec<Point2> = Vec::new();
        for p in pts.iter().rev() {
            while upper.len() >= 2 && cross(&upper[upper.len() - 2], &upper[upper.len() - 1], p) <= 0.0 {
                upper.pop();
            }
            upper.push(*p);
        }
        lower.pop();
        upper.pop();
        lower.extend(upper);
        ConvexPolygon::new(lower)
    }

    /// Regular `m`-gon inscribed in the circle of `radius` about `center`,
    /// first vertex at angle 0.
    pub fn regular(m: usize, center: Point2, radius: f64) -> Result<Self> {
        let vertices = (0..m)
            .map(|i| {
                let a = 2.0 * PI * i as f64 / m as f64;
                center + radius * unit2(a)
            })
            .collect();
        ConvexPolygon::new(vertices)
    }

    /// Axis-aligned rectangle `[x0, x1] × [y0, y1]`.
    pub fn rectangle(x0: f64, y0: f64, x1: f64, y1: f64) -> Result<Self> {
        ConvexPolygon::new(vec![
            Point2::new(x0, y0),
            Point2::new(x1, y0),
            Point2::new(x1, y1),
            Point2::new(x0, y1),
        ])
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Signed distance to the nearest edge line; positive inside.
    pub fn clearance(&self, x: &Point2) -> f64 {
        self.normals
            .iter()
            .zip(&self.vertices)
            .map(|(n, v)| n.dot(&(v - x)))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn contains(&self, x: &Point2) -> bool {
        self.clearance(x) > MEMBERSHIP_SLACK
    }

    /// Exit distance along the unit vector `u`: the smallest positive
    /// `n·(v − x) / n·u` over edges facing the ray.
    pub fn chord(&self, x: &Point2, u: &Point2) -> f64 {
        let mut best = f64::INFINITY;
        for (n, v) in self.normals.iter().zip(&self.vertices) {
            let den = n.dot(u);
            if den > 0.0 {
                let t = n.dot(&(v - x)) / den;
                if t < best {
                    best = t;
                }
            }
        }
        best
    }

    /// Shoelace area.
    pub fn area(&self) -> f64 {
        let n = self.vertices.len();
        0.5 * (0..n)
            .map(|i| self.vertices[i].perp(&self.vertices[(i + 1) % n]))
            .sum::<f64>()
    }

    /// Area centroid.
    pub fn centroid(&self) -> Point2 {
        let n = self.vertices.len();
        let o = self.vertices[0];
        let mut acc = Point2::zeros();
        let mut area2 = 0.0;
        for i in 1..n - 1 {
            let a = self.vertices[i] - o;
            let b = self.vertices[i + 1] - o;
            let w = a.perp(&b);
            acc += w * (a + b) / 3.0;
            area2 += w;
        }
        o + acc / area2
    }

    pub fn diameter(&self) -> f64 {
        let mut best: f64 = 0.0;
        for (i, a) in self.vertices.iter().enumerate() {
            for b in &self.vertices[i + 1..] {
                best = best.max((a - b).norm());
            }
        }
        best
    }

    /// Directions (in `[0, 2π)`) from `x` to each vertex.
    pub fn vertex_angles(&self, x: &Point2) -> Vec<f64> {
        self.vertices
            .iter()
            .map(|v| {
                let d = v - x;
                d.y.atan2(d.x).rem_euclid(2.0 * PI)
            })
            .collect()
    }

    /// Nearest boundary point: the foot on the nearest edge line. Ties go
    /// to the lowest edge index.
    pub fn nearest_boundary(&self, x: &Point2) -> Point2 {
        let mut best = (f64::INFINITY, 0);
        for (i, (n, v)) in self.normals.iter().zip(&self.vertices).enumerate() {
            let h = n.dot(&(v - x));
            if h < best.0 {
                best = (h, i);
            }
        }
        x + best.0 * self.normals[best.1]
    }

    /// Distance from `p` to the closed polygon (zero inside).
    pub fn distance_to(&self, p: &Point2) -> f64 {
        if self.clearance(p) >= 0.0 {
            return 0.0;
        }
        let n = self.vertices.len();
        (0..n)
            .map(|i| segment_distance(p, &self.vertices[i], &self.vertices[(i + 1) % n]))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn map_vertices(&self, f: impl Fn(&Point2) -> Point2) -> Result<Self> {
        ConvexPolygon::new(self.vertices.iter().map(f).collect())
    }
}

pub(crate) fn segment_distance(p: &Point2, a: &Point2, b: &Point2) -> f64 {
    let ab = b - a;
    let t = ((p - a).dot(&ab) / ab.norm_squared()).clamp(0.0, 1.0);
    (p - (a + t * ab)).norm()
}
