use std::fmt::Write as _;

use rayon::prelude::*;
use vario::domains::{ConvexDomain2, ConvexDomain3, Point2, Point3};
use vario::stats;

use crate::format;

/// Gray level for cells outside the domain.
pub const EXTERIOR: u8 = 128;

/// Variance sampled at cell centres of a grid laid over the bounding box.
/// Rows run from the top (largest `y`) down, columns left to right.
#[derive(Debug, Clone, PartialEq)]
pub struct Field2 {
    pub nx: usize,
    pub ny: usize,
    pub centres: Vec<Point2>,
    /// `None` outside the domain.
    pub values: Vec<Option<f64>>,
}

pub fn bounding_box2(domain: &ConvexDomain2) -> (Point2, Point2) {
    match domain {
        ConvexDomain2::Polygon(p) => {
            let mut lo = Point2::repeat(f64::INFINITY);
            let mut hi = Point2::repeat(f64::NEG_INFINITY);
            for v in p.vertices() {
                lo = lo.inf(v);
                hi = hi.sup(v);
            }
            (lo, hi)
        }
        ConvexDomain2::Disk(d) => (d.center.add_scalar(-d.radius), d.center.add_scalar(d.radius)),
        ConvexDomain2::Radial(r) => {
            let reach = r.diameter();
            (r.anchor().add_scalar(-reach), r.anchor().add_scalar(reach))
        }
    }
}

pub fn bounding_box3(domain: &ConvexDomain3) -> (Point3, Point3) {
    match domain {
        ConvexDomain3::Ball(b) => (b.center.add_scalar(-b.radius), b.center.add_scalar(b.radius)),
        ConvexDomain3::Polytope(p) => {
            let mut lo = Point3::repeat(f64::INFINITY);
            let mut hi = Point3::repeat(f64::NEG_INFINITY);
            for v in p.vertices() {
                lo = lo.inf(v);
                hi = hi.sup(v);
            }
            (lo, hi)
        }
    }
}

pub fn sample2(domain: &ConvexDomain2, nx: usize, ny: usize, n_nodes: usize) -> Field2 {
    let (lo, hi) = bounding_box2(domain);
    let (dx, dy) = ((hi.x - lo.x) / nx as f64, (hi.y - lo.y) / ny as f64);
    let centres: Vec<Point2> = (0..ny)
        .flat_map(|j| (0..nx).map(move |i| Point2::new(lo.x + (i as f64 + 0.5) * dx, hi.y - (j as f64 + 0.5) * dy)))
        .collect();
    let values = centres
        .par_iter()
        .map(|c| stats::stats2(domain, c, n_nodes).ok().map(|s| s.variance))
        .collect();
    Field2 { nx, ny, centres, values }
}

impl Field2 {
    /// `x,y,variance` for interior cells, in image order.
    pub fn csv(&self) -> String {
        let mut out = String::from("x,y,variance\n");
        for (c, v) in self.centres.iter().zip(&self.values) {
            if let Some(v) = v {
                writeln!(out, "{}", format::row(&[c.x, c.y, *v])).unwrap();
            }
        }
        out
    }

    /// Binary 8-bit graymap: the smallest variance is black, the largest
    /// white, exterior cells mid-gray. Levels round up, so only the minimum
    /// itself is black.
    pub fn pgm(&self) -> Vec<u8> {
        let interior = self.values.iter().flatten();
        let lo = interior.clone().copied().fold(f64::INFINITY, f64::min);
        let hi = interior.copied().fold(f64::NEG_INFINITY, f64::max);
        let span = hi - lo;
        let mut out = format!("P5\n{} {}\n255\n", self.nx, self.ny).into_bytes();
        out.extend(self.values.iter().map(|v| match v {
            None => EXTERIOR,
            Some(_) if span <= 0.0 => 0,
            Some(v) => ((v - lo) / span * 255.0).ceil() as u8,
        }));
        out
    }

    /// Index of the smallest interior value, first in image order on ties.
    pub fn argmin(&self) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for (i, v) in self.values.iter().enumerate() {
            if let Some(v) = *v {
                if best.is_none_or(|(_, b)| v < b) {
                    best = Some((i, v));
                }
            }
        }
        best.map(|(i, _)| i)
    }
}

/// `x,y,z,variance` at interior cell centres of a 3D grid, `z` slowest.
pub fn sample3_csv(domain: &ConvexDomain3, n: [usize; 3], n_phi: usize, n_theta: usize) -> String {
    let (lo, hi) = bounding_box3(domain);
    let step = (hi - lo).component_div(&Point3::new(n[0] as f64, n[1] as f64, n[2] as f64));
    let centres: Vec<Point3> = (0..n[2])
        .flat_map(|k| (0..n[1]).flat_map(move |j| (0..n[0]).map(move |i| (i, j, k))))
        .map(|(i, j, k)| lo + step.component_mul(&Point3::new(i as f64 + 0.5, j as f64 + 0.5, k as f64 + 0.5)))
        .collect();
    let rows: Vec<Option<String>> = centres
        .iter()
        .map(|c| {
            stats::stats3(domain, c, n_phi, n_theta)
                .ok()
                .map(|s| format::row(&[c.x, c.y, c.z, s.variance]))
        })
        .collect();
    let mut out = String::from("x,y,z,variance\n");
    for r in rows.into_iter().flatten() {
        out.push_str(&r);
        out.push('\n');
    }
    out
}
