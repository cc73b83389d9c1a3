//! Minimizing the variance of the distance to the boundary.
//!
//! In the plane `v` is strictly convex, so its minimizer (the variocentre)
//! is unique. In space no such guarantee is known and the result is only a
//! local minimizer.
//!
//! Both searches run gradient descent with a Barzilai–Borwein trial step,
//! Armijo backtracking, and a guard that never moves more than half the
//! distance to the boundary along the step.

use std::f64::consts::FRAC_PI_2;

use nalgebra::SVector;

use crate::derivatives::{d1_v_2d, d1_v_3d, variocentre_residual};
use crate::domains::{ConvexDomain2, ConvexDomain3, Direction3, Point2, Point3};
use crate::error::{Error, Result};
use crate::quadrature::SphereRule;
use crate::stats::{self, DEFAULT_NODES_2D};

pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_MAX_ITER: usize = 500;
pub const ARMIJO: f64 = 1e-4;
pub const BACKTRACK: f64 = 0.5;
pub const SAFE_FRACTION: f64 = 0.5;
/// Sphere resolution for the 3D search.
pub const DEFAULT_NODES_3D_SEARCH: usize = 256;

const RESIDUAL_DIRECTIONS: usize = 64;
const MAX_BACKTRACKS: usize = 60;
/// Relative accuracy of the product-rule variance on polytopes at search resolution.
const SOLID_VALUE_NOISE: f64 = 1e-4;

pub const LABEL_2D: &str = "variocentre (unique minimizer)";
pub const LABEL_3D: &str = "local minimizer (uniqueness not guaranteed)";

#[derive(Debug, Clone, PartialEq)]
pub struct VariocentreResult {
    pub location: Vec<f64>,
    pub min_variance: f64,
    /// In the plane, the optimality residual `max_σ |∮ cos(φ−σ) ln d|`;
    /// in space, the gradient norm.
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Variance at each accepted iterate, starting point first.
    pub trace: Vec<f64>,
    pub label: &'static str,
}

impl VariocentreResult {
    pub fn point2(&self) -> Option<Point2> {
        (self.location.len() == 2).then(|| Point2::from_column_slice(&self.location))
    }

    pub fn point3(&self) -> Option<Point3> {
        (self.location.len() == 3).then(|| Point3::from_column_slice(&self.location))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Angular nodes in the plane, polar and azimuthal nodes in space.
    pub n_nodes: usize,
}

impl SearchOptions {
    pub fn planar(tol: f64, max_iter: usize) -> Self {
        SearchOptions {
            tol,
            max_iter,
            n_nodes: DEFAULT_NODES_2D,
        }
    }

    pub fn solid(tol: f64, max_iter: usize) -> Self {
        SearchOptions {
            tol,
            max_iter,
            n_nodes: DEFAULT_NODES_3D_SEARCH,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.tol > 0.0 && self.tol.is_finite() {
            Ok(())
        } else {
            Err(Error::OutOfDomain {
                what: "tolerance",
                value: self.tol,
            })
        }
    }
}

/// The variocentre of a planar convex domain, starting from the centroid.
pub fn find_variocentre_2d(domain: &ConvexDomain2, tol: f64, max_iter: usize) -> Result<VariocentreResult> {
    find_variocentre_2d_from(domain, &domain.start_point(), SearchOptions::planar(tol, max_iter))
}

pub fn find_variocentre_2d_from(
    domain: &ConvexDomain2,
    start: &Point2,
    opts: SearchOptions,
) -> Result<VariocentreResult> {
    opts.validate()?;
    domain.check_interior(start)?;
    let n = opts.n_nodes;
    let problem = Problem {
        value: |x: &Point2| Ok(stats::stats2(domain, x, n)?.variance),
        gradient: |x: &Point2| {
            Ok(Point2::new(
                d1_v_2d(domain, x, 0.0, n)?.value,
                d1_v_2d(domain, x, FRAC_PI_2, n)?.value,
            ))
        },
        reach: |x: &Point2, u: &Point2| domain.chord(x, u),
        residual: |x: &Point2, _: &Point2| variocentre_residual(domain, x, RESIDUAL_DIRECTIONS, n),
        value_noise: 64.0 * f64::EPSILON,
        label: LABEL_2D,
    };
    problem.descend(*start, &opts)
}

/// A local minimizer of the variance on a solid convex domain.
pub fn find_min_variance_3d(domain: &ConvexDomain3, tol: f64, max_iter: usize) -> Result<VariocentreResult> {
    find_min_variance_3d_from(domain, &domain.start_point(), SearchOptions::solid(tol, max_iter))
}

pub fn find_min_variance_3d_from(
    domain: &ConvexDomain3,
    start: &Point3,
    opts: SearchOptions,
) -> Result<VariocentreResult> {
    opts.validate()?;
    domain.check_interior(start)?;
    let n = opts.n_nodes;
    let rule = SphereRule::new(n, n);
    let axes = [
        Direction3::new(0.0, 0.0)?,
        Direction3::from_vector(&Point3::y())?,
        Direction3::from_vector(&Point3::z())?,
    ];
    let problem = Problem {
        value: |x: &Point3| {
            domain.check_interior(x)?;
            Ok(stats::stats3_with(domain, x, &rule).variance)
        },
        gradient: |x: &Point3| {
            let mut g = Point3::zeros();
            for (i, axis) in axes.iter().enumerate() {
                g[i] = d1_v_3d(domain, x, *axis, n, n)?.value;
            }
            Ok(g)
        },
        reach: |x: &Point3, u: &Point3| domain.chord(x, u),
        residual: |_: &Point3, g: &Point3| Ok(g.norm()),
        value_noise: SOLID_VALUE_NOISE,
        label: LABEL_3D,
    };
    problem.descend(*start, &opts)
}

struct Problem<V, G, R, S> {
    value: V,
    gradient: G,
    reach: R,
    residual: S,
    value_noise: f64,
    label: &'static str,
}

impl<V, G, R, S> Problem<V, G, R, S> {
    fn descend<const D: usize>(&self, start: SVector<f64, D>, opts: &SearchOptions) -> Result<VariocentreResult>
    where
        V: Fn(&SVector<f64, D>) -> Result<f64>,
        G: Fn(&SVector<f64, D>) -> Result<SVector<f64, D>>,
        R: Fn(&SVector<f64, D>, &SVector<f64, D>) -> f64,
        S: Fn(&SVector<f64, D>, &SVector<f64, D>) -> Result<f64>,
    {
        let mut x = start;
        let mut v = (self.value)(&x)?;
        let mut g = (self.gradient)(&x)?;
        let mut trace = vec![v];
        let mut alpha = 1.0;
        let mut iterations = 0;

        let finish = |x: &SVector<f64, D>, v, g: &SVector<f64, D>, iterations, trace: Vec<f64>, converged| {
            Ok::<_, Error>(VariocentreResult {
                location: x.iter().copied().collect(),
                min_variance: v,
                residual: (self.residual)(x, g)?,
                iterations,
                converged,
                trace,
                label: self.label,
            })
        };

        loop {
            let gnorm = g.norm();
            if gnorm <= opts.tol || (self.residual)(&x, &g)? <= opts.tol {
                return finish(&x, v, &g, iterations, trace, true);
            }
            if iterations >= opts.max_iter {
                let best = finish(&x, v, &g, iterations, trace, false)?;
                return Err(Error::NotConverged { best: Box::new(best) });
            }
            iterations += 1;

            let dir = -g / gnorm;
            let limit = SAFE_FRACTION * (self.reach)(&x, &dir);
            let mut step = (alpha * gnorm).min(limit);
            let mut accepted = None;
            for _ in 0..MAX_BACKTRACKS {
                let trial = x + step * dir;
                let vt = (self.value)(&trial)?;
                if vt <= v - ARMIJO * step * gnorm {
                    accepted = Some((trial, vt, None));
                    break;
                }
                // At the noise floor of v the Armijo test is meaningless;
                // accept a step that does not raise v beyond that floor and
                // shrinks the gradient.
                if vt <= v + self.value_noise * v.abs().max(f64::MIN_POSITIVE) {
                    let gt = (self.gradient)(&trial)?;
                    if gt.norm() < gnorm {
                        accepted = Some((trial, vt, Some(gt)));
                        break;
                    }
                }
                step *= BACKTRACK;
            }
            let Some((next, vn, gn)) = accepted else {
                let best = finish(&x, v, &g, iterations, trace, false)?;
                return Err(Error::NotConverged { best: Box::new(best) });
            };
            let gn = match gn {
                Some(gn) => gn,
                None => (self.gradient)(&next)?,
            };
            let s = next - x;
            let y = gn - g;
            let sy = s.dot(&y);
            alpha = if sy > 0.0 { s.dot(&s) / sy } else { 2.0 * alpha };
            x = next;
            v = vn.min(v);
            g = gn;
            trace.push(vn);
        }
    }
}
