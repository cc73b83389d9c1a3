//! Statistics of the distance to the boundary of convex domains.
//!
//! For a bounded convex domain `U` and an interior point `x`, let `d(x, σ)`
//! be the distance from `x` to `∂U` along the unit direction `σ`. This crate
//! computes the angular moments `I₁`, `I₂` of `d`, the variance
//! `v = I₂ − I₁²`, its directional derivatives, and the point minimizing
//! `v` (the variocentre).
//!
//! ```
//! use vario::domains::{ConvexPolygon, Point2};
//! use vario::stats::stats2;
//!
//! let square = ConvexPolygon::rectangle(0.0, 0.0, 1.0, 1.0)?.into();
//! let s = stats2(&square, &Point2::new(0.25, 0.5), 4096)?;
//! // I₂ equals area / π everywhere in the plane
//! assert!((s.i2 - 1.0 / std::f64::consts::PI).abs() < 1e-12);
//! # Ok::<(), vario::Error>(())
//! ```

pub mod asymptotics;
pub mod derivatives;
pub mod domains;
pub mod elliptic;
mod error;
pub mod quadrature;
pub mod stats;
pub mod variocentre;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/domains.md")]
    mod domains {}
    #[doc = include_str!("../../../book/src/moments.md")]
    mod moments {}
    #[doc = include_str!("../../../book/src/derivatives.md")]
    mod derivatives {}
    #[doc = include_str!("../../../book/src/variocentre.md")]
    mod variocentre {}
    #[doc = include_str!("../../../book/src/asymptotics.md")]
    mod asymptotics {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
