pub mod convexbody;
pub mod crofton;
pub mod error;
pub mod geodesic;
pub mod metricfield;
pub mod norms;
pub mod numerics;
pub mod report;
pub mod rigidity;

pub use convexbody::ConvexBody;
pub use crofton::CroftonDensity;
pub use error::{FinslerError, Result};
pub use metricfield::{Curve, MetricField, OneForm};
pub use norms::MinkowskiNorm;
