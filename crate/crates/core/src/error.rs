use thiserror::Error;

use crate::variocentre::VariocentreResult;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument fell outside the domain of a special function or bound.
    #[error("{what} out of domain: {value}")]
    OutOfDomain { what: &'static str, value: f64 },

    #[error("point {point:?} is not interior to the domain (clearance {clearance:e})")]
    NotInterior { point: Vec<f64>, clearance: f64 },

    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("annulus function has no sign change on (0, 1) for eps = {eps}")]
    NoSignChange { eps: f64 },

    #[error("minimizer did not converge after {} iterations", best.iterations)]
    NotConverged { best: Box<VariocentreResult> },

    #[error("unsupported domain for this operation: {0}")]
    Unsupported(&'static str),

    #[error("malformed domain description: {0}")]
    Parse(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn not_interior(point: &[f64], clearance: f64) -> Self {
        Error::NotInterior {
            point: point.to_vec(),
            clearance,
        }
    }
}
