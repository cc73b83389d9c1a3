use nalgebra::Matrix3;

use crate::domains::{Point3, MEMBERSHIP_SLACK};
use crate::error::{Error, Result};

/// `{x : n·x < c}` with `|n| = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfSpace {
    pub normal: Point3,
    pub offset: f64,
}

/// Bounded intersection of open half-spaces with a known interior point.
#[derive(Debug, Clone, PartialEq)]
pub struct Polytope3 {
    faces: Vec<HalfSpace>,
    witness: Point3,
    vertices: Vec<Point3>,
}

impl Polytope3 {
    /// Normals need not be unit length; each inequality is rescaled.
    pub fn new(half_spaces: &[(Point3, f64)], witness: Point3) -> Result<Self> {
        let mut faces = Vec::with_capacity(half_spaces.len());
        for (n, c) in half_spaces {
            let len = n.norm();
            if !(len > 0.0 && len.is_finite() && c.is_finite()) {
                return Err(Error::InvalidGeometry(format!("degenerate half-space {n:?}, {c}")));
            }
            faces.push(HalfSpace {
                normal: n / len,
                offset: c / len,
            });
        }
        let mut poly = Polytope3 {
            faces,
            witness,
            vertices: Vec::new(),
        };
        if !poly.contains(&witness) {
            return Err(Error::InvalidGeometry(
                "witness point does not satisfy all inequalities strictly".into(),
            ));
        }
        for dir in canonical_directions() {
            if !poly.chord(&witness, &dir).is_finite() {
                return Err(Error::InvalidGeometry(format!("unbounded in direction {dir:?}")));
            }
        }
        poly.vertices = poly.enumerate_vertices();
        Ok(poly)
    }

    /// Axis-aligned box `[lo, hi]`.
    pub fn cuboid(lo: Point3, hi: Point3) -> Result<Self> {
        let mut hs = Vec::with_capacity(6);
        for axis in 0..3 {
            let mut e = Point3::zeros();
            e[axis] = 1.0;
            hs.push((e, hi[axis]));
            hs.push((-e, -lo[axis]));
        }
        Polytope3::new(&hs, 0.5 * (lo + hi))
    }

    pub fn faces(&self) -> &[HalfSpace] {
        &self.faces
    }

    pub fn witness(&self) -> Point3 {
        self.witness
    }

    pub fn vertices(&self) -> &[Point3] {
        &self.vertices
    }

    pub fn clearance(&self, x: &Point3) -> f64 {
        self.faces
            .iter()
            .map(|f| f.offset - f.normal.dot(x))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn contains(&self, x: &Point3) -> bool {
        self.clearance(x) > MEMBERSHIP_SLACK
    }

    /// `min (c − n·x)/(n·u)` over faces with `n·u > 0`.
    pub fn chord(&self, x: &Point3, u: &Point3) -> f64 {
        let mut best = f64::INFINITY;
        for f in &self.faces {
            let den = f.normal.dot(u);
            if den > 0.0 {
                let t = (f.offset - f.normal.dot(x)) / den;
                if t < best {
                    best = t;
                }
            }
        }
        best
    }

    /// Foot of the perpendicular on the nearest face plane; ties to the
    /// lowest face index.
    pub fn nearest_boundary(&self, x: &Point3) -> Point3 {
        let mut best = (f64::INFINITY, 0);
        for (i, f) in self.faces.iter().enumerate() {
            let h = f.offset - f.normal.dot(x);
            if h < best.0 {
                best = (h, i);
            }
        }
        x + best.0 * self.faces[best.1].normal
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

    /// Mean of the vertices.
    pub fn vertex_centroid(&self) -> Point3 {
        self.vertices.iter().sum::<Point3>() / self.vertices.len() as f64
    }

    fn enumerate_vertices(&self) -> Vec<Point3> {
        let m = self.faces.len();
        let scale = self
            .faces
            .iter()
            .map(|f| f.offset.abs())
            .fold(1.0_f64, f64::max);
        let mut out: Vec<Point3> = Vec::new();
        for i in 0..m {
            for j in i + 1..m {
                for k in j + 1..m {
                    let (a, b, c) = (&self.faces[i], &self.faces[j], &self.faces[k]);
                    let mat = Matrix3::from_rows(&[
                        a.normal.transpose(),
                        b.normal.transpose(),
                        c.normal.transpose(),
                    ]);
                    if mat.determinant().abs() < 1e-12 {
                        continue;
                    }
                    let Some(inv) = mat.try_inverse() else { continue };
                    let p = inv * Point3::new(a.offset, b.offset, c.offset);
                    let feasible = self
                        .faces
                        .iter()
                        .all(|f| f.normal.dot(&p) <= f.offset + 1e-9 * scale);
                    if feasible && !out.iter().any(|q| (q - p).norm() <= 1e-9 * scale) {
                        out.push(p);
                    }
                }
            }
        }
        out
    }

    pub fn transformed(&self, rotation: &nalgebra::Rotation3<f64>, scale: f64, shift: &Point3) -> Result<Self> {
        let hs: Vec<(Point3, f64)> = self
            .faces
            .iter()
            .map(|f| {
                let n = rotation * f.normal;
                (n, scale * f.offset + n.dot(shift))
            })
            .collect();
        Polytope3::new(&hs, scale * (rotation * self.witness) + shift)
    }
}

/// The 26 directions to the neighbours of a cell in a 3×3×3 block.
fn canonical_directions() -> impl Iterator<Item = Point3> {
    (-1i32..=1)
        .flat_map(|a| (-1i32..=1).flat_map(move |b| (-1i32..=1).map(move |c| (a, b, c))))
        .filter(|&(a, b, c)| (a, b, c) != (0, 0, 0))
        .map(|(a, b, c)| Point3::new(a as f64, b as f64, c as f64).normalize())
}
