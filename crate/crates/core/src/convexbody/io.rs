//! JSON representation of convex bodies.

use serde::{Deserialize, Serialize};

use super::ConvexBody;
use crate::error::{FinslerError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallSpec {
    pub center: Vec<f64>,
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EllipsoidSpec {
    pub center: Vec<f64>,
    pub axes: Vec<f64>,
}

/// On-disk body description. Exactly one of `vertices`, `support` (with
/// `grid_level`), `ball` or `ellipsoid` must be present.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BodySpec {
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_level: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ball: Option<BallSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ellipsoid: Option<EllipsoidSpec>,
}

impl BodySpec {
    pub fn to_body(&self) -> Result<ConvexBody> {
        let present = [
            self.vertices.is_some(),
            self.support.is_some(),
            self.ball.is_some(),
            self.ellipsoid.is_some(),
        ]
        .iter()
        .filter(|x| **x)
        .count();
        if present != 1 {
            return Err(FinslerError::Config(
                "body needs exactly one of vertices, support, ball, ellipsoid".into(),
            ));
        }
        if let Some(v) = &self.vertices {
            return ConvexBody::from_vertices(self.dim, v);
        }
        if let Some(s) = &self.support {
            let level = self
                .grid_level
                .ok_or_else(|| FinslerError::Config("support samples need grid_level".into()))?;
            return ConvexBody::from_support_values(self.dim, level, s.clone());
        }
        if let Some(b) = &self.ball {
            return ConvexBody::ball(self.dim, &b.center, b.radius);
        }
        let e = self.ellipsoid.as_ref().expect("checked above");
        ConvexBody::ellipsoid(self.dim, &e.center, &e.axes)
    }

    pub fn from_body(body: &ConvexBody) -> Self {
        let dim = body.dim();
        let mut spec = BodySpec {
            dim,
            vertices: None,
            grid_level: None,
            support: None,
            ball: None,
            ellipsoid: None,
        };
        match body {
            ConvexBody::Polytope(p) => spec.vertices = Some(p.vertex_list()),
            ConvexBody::Ball { center, radius, .. } => {
                spec.ball = Some(BallSpec {
                    center: center[..dim].to_vec(),
                    radius: *radius,
                })
            }
            ConvexBody::Ellipsoid { center, axes, .. } => {
                spec.ellipsoid = Some(EllipsoidSpec {
                    center: center[..dim].to_vec(),
                    axes: axes[..dim].to_vec(),
                })
            }
            ConvexBody::Sampled(s) => {
                spec.grid_level = Some(s.grid().level());
                spec.support = Some(s.values().to_vec());
            }
        }
        spec
    }
}

impl ConvexBody {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: BodySpec = serde_json::from_str(text)?;
        spec.to_body()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&BodySpec::from_body(self)).expect("serializable")
    }
}
