//! JSON domain descriptions.
//!
//! ```json
//! {"type": "polygon", "vertices": [[0,0],[1,0],[1,1],[0,1]]}
//! {"type": "disk", "center": [0,0], "radius": 1}
//! {"type": "ball", "center": [0,0,0], "radius": 1}
//! {"type": "polytope", "halfspaces": [{"n": [1,0,0], "c": 1}, ...], "witness": [0,0,0]}
//! ```

use serde::{Deserialize, Serialize};

use crate::domains::{Ball3, ConvexDomain2, ConvexDomain3, ConvexPolygon, Disk2, Point2, Point3, Polytope3};
use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfSpaceSpec {
    pub n: [f64; 3],
    pub c: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum DomainSpec {
    Polygon { vertices: Vec<[f64; 2]> },
    Disk { center: [f64; 2], radius: f64 },
    Ball { center: [f64; 3], radius: f64 },
    Polytope { halfspaces: Vec<HalfSpaceSpec>, witness: [f64; 3] },
}

/// A domain of either dimension, as loaded from a description file.
#[derive(Debug, Clone)]
pub enum Domain {
    Planar(ConvexDomain2),
    Solid(ConvexDomain3),
}

impl Domain {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: DomainSpec = serde_json::from_str(text)?;
        spec.build()
    }

    pub fn dimension(&self) -> usize {
        match self {
            Domain::Planar(_) => 2,
            Domain::Solid(_) => 3,
        }
    }
}

impl DomainSpec {
    pub fn build(&self) -> Result<Domain> {
        Ok(match self {
            DomainSpec::Polygon { vertices } => {
                let v = vertices.iter().map(|p| Point2::new(p[0], p[1])).collect();
                Domain::Planar(ConvexDomain2::Polygon(ConvexPolygon::new(v)?))
            }
            DomainSpec::Disk { center, radius } => {
                Domain::Planar(ConvexDomain2::Disk(Disk2::new(Point2::from(*center), *radius)?))
            }
            DomainSpec::Ball { center, radius } => {
                Domain::Solid(ConvexDomain3::Ball(Ball3::new(Point3::from(*center), *radius)?))
            }
            DomainSpec::Polytope { halfspaces, witness } => {
                let hs: Vec<(Point3, f64)> = halfspaces.iter().map(|h| (Point3::from(h.n), h.c)).collect();
                Domain::Solid(ConvexDomain3::Polytope(Polytope3::new(&hs, Point3::from(*witness))?))
            }
        })
    }
}
