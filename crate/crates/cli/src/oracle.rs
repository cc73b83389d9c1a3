use std::f64::consts::{FRAC_PI_2, PI};

use anyhow::Result;
use clap::ValueEnum;
use vario::asymptotics::{annulus_F, annulus_limit_series, chord_log_moment_2d, chord_log_moment_3d};
use vario::domains::{Ball3, ConvexDomain2, ConvexDomain3, ConvexPolygon, Disk2, Point2, Point3};
use vario::elliptic::{ellip_e, ellip_k, ellip_k_minus_e};
use vario::quadrature::integrate_panels_scalar;
use vario::stats::{ball_stats_oracle, disk_variance_oracle, stats2, stats3};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    /// AGM against power series for K, E and K − E.
    Elliptic,
    /// Disk quadrature against 1 − 4E(r)²/π².
    Disk,
    /// Ball quadrature against the closed forms of I₁ and I₂.
    Ball,
    /// Planar I₂ against area / π.
    Area,
    /// F(r, 0) against (4/r)(K − E) and its power series.
    Annulus,
    /// Log-moment closed forms against quadrature.
    LogMoments,
}

#[derive(Debug, Clone, Copy)]
pub struct Resolution {
    pub n_nodes: usize,
    pub n_phi: usize,
    pub n_theta: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub suite: Suite,
    pub deviation: f64,
    pub tolerance: f64,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.deviation <= self.tolerance
    }
}

pub fn name(suite: Suite) -> String {
    suite.to_possible_value().expect("no skipped variants").get_name().to_string()
}

pub fn run(suite: Suite, res: Resolution) -> Result<Outcome> {
    let (deviation, tolerance) = match suite {
        Suite::Elliptic => (elliptic()?, 1e-12),
        Suite::Disk => (disk(res.n_nodes)?, 1e-8),
        Suite::Ball => (ball(res.n_phi, res.n_theta)?, 1e-7),
        Suite::Area => (area(res.n_nodes)?, 1e-8),
        Suite::Annulus => (annulus()?, 1e-10),
        Suite::LogMoments => (log_moments()?, 1e-9),
    };
    Ok(Outcome {
        suite,
        deviation,
        tolerance,
    })
}

fn grid(step: f64, count: usize) -> impl Iterator<Item = f64> {
    (0..count).map(move |i| step * i as f64)
}

/// Term-by-term power series of K, E and K − E.
fn series(k: f64) -> (f64, f64, f64) {
    let k2 = k * k;
    let (mut a, mut pow) = (1.0, 1.0);
    let (mut sk, mut se, mut sd) = (1.0, 1.0, 0.0);
    for n in 1..2000 {
        let nf = n as f64;
        let r = (2.0 * nf - 1.0) / (2.0 * nf);
        a *= r * r;
        pow *= k2;
        sk += a * pow;
        se -= a * pow / (2.0 * nf - 1.0);
        sd += a * nf / (2.0 * nf - 1.0) * pow;
        if a * pow < 1e-18 {
            break;
        }
    }
    (FRAC_PI_2 * sk, FRAC_PI_2 * se, PI * sd)
}

fn elliptic() -> Result<f64> {
    let mut worst: f64 = 0.0;
    for k in grid(0.05, 19) {
        let (sk, se, sd) = series(k);
        worst = worst
            .max((ellip_k(k)? - sk).abs() / sk)
            .max((ellip_e(k)? - se).abs() / se)
            .max((ellip_k_minus_e(k)? - sd).abs() / sd.max(f64::MIN_POSITIVE));
    }
    Ok(worst)
}

fn disk(n_nodes: usize) -> Result<f64> {
    let d: ConvexDomain2 = Disk2::unit().into();
    let mut worst: f64 = 0.0;
    for r in grid(0.1, 10) {
        let v = stats2(&d, &Point2::new(r, 0.0), n_nodes)?.variance;
        worst = worst.max((v - disk_variance_oracle(r)?).abs());
    }
    Ok(worst)
}

fn ball(n_phi: usize, n_theta: usize) -> Result<f64> {
    let b: ConvexDomain3 = Ball3::unit().into();
    let mut worst: f64 = 0.0;
    for r in grid(0.1, 10).skip(1) {
        let s = stats3(&b, &Point3::new(r, 0.0, 0.0), n_phi, n_theta)?;
        let o = ball_stats_oracle(r)?;
        worst = worst.max((s.i1 - o.i1).abs()).max((s.i2 - o.i2).abs());
    }
    Ok(worst)
}

fn area(n_nodes: usize) -> Result<f64> {
    let p = Point2::new;
    let shapes = [
        ConvexPolygon::new(vec![p(-2.0, -1.0), p(2.0, -1.0), p(1.0, 1.0), p(-1.0, 1.0)])?,
        ConvexPolygon::regular(6, p(0.3, -0.2), 1.5)?,
        ConvexPolygon::new(vec![p(0.0, 0.0), p(3.0, 0.0), p(0.2, 0.5)])?,
    ];
    let mut worst: f64 = 0.0;
    for shape in shapes {
        let target = shape.area() / PI;
        let vs = shape.vertices().to_vec();
        let centroid = shape.centroid();
        let domain: ConvexDomain2 = shape.into();
        for v in &vs {
            for t in [0.1, 0.5, 0.9] {
                let x = centroid + t * (v - centroid);
                worst = worst.max((stats2(&domain, &x, n_nodes)?.i2 - target).abs());
            }
        }
    }
    Ok(worst)
}

fn annulus() -> Result<f64> {
    let mut worst: f64 = 0.0;
    for r in grid(0.1, 10).skip(1) {
        let f = annulus_F(r, 0.0)?;
        worst = worst
            .max((f - 4.0 / r * ellip_k_minus_e(r)?).abs())
            .max((f - annulus_limit_series(r, 2000)?).abs());
    }
    Ok(worst)
}

fn log_moments() -> Result<f64> {
    let mut worst: f64 = 0.0;
    for r in grid(0.1, 10).skip(1) {
        let ray = |s: f64, c: f64| (r * c + (1.0 - r * r * s * s).sqrt()).ln();
        let two = integrate_panels_scalar(&[-FRAC_PI_2, 0.0, FRAC_PI_2], 512, |phi| {
            let (s, c) = phi.sin_cos();
            c * ray(s, c)
        })
        .value;
        let three = integrate_panels_scalar(&[0.0, FRAC_PI_2], 512, |phi| {
            let (s, c) = phi.sin_cos();
            (2.0 * phi).sin() * ray(s, c)
        })
        .value;
        worst = worst
            .max((two - chord_log_moment_2d(r)?).abs())
            .max((three - chord_log_moment_3d(r)?).abs());
    }
    Ok(worst)
}
