//! JSON field configuration.
//!
//! ```json
//! {"family": "busemann", "density": {"type": "poly", "coeffs": [0.25, 0.125]}}
//! {"family": "plus_one_form", "base": {"family": "round"},
//!  "form": {"type": "constant", "c": [0.0, 0.0, 0.2]}}
//! ```

use serde::{Deserialize, Serialize};

use super::{MetricField, OneForm};
use crate::convexbody::BodySpec;
use crate::crofton::{CroftonDensity, DensityKind};
use crate::error::{FinslerError, Result};
use crate::norms::MinkowskiNorm;

fn one() -> f64 {
    1.0
}

fn e3() -> Vec<f64> {
    vec![0.0, 0.0, 1.0]
}

/// Density with an optional normalization of its total mass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensitySpec {
    #[serde(flatten)]
    pub kind: DensityKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normalize_to: Option<f64>,
}

impl DensitySpec {
    pub fn build(&self) -> Result<CroftonDensity> {
        let m = CroftonDensity::new(self.kind.clone())?;
        match self.normalize_to {
            Some(t) if t > 0.0 => m.normalized_to(t),
            Some(t) => Err(FinslerError::Config(format!("normalize_to must be positive, got {t}"))),
            None => Ok(m),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum OneFormConfig {
    /// `c·dx`; on S² the differential of `x ↦ c·x`.
    Constant { c: Vec<f64> },
    /// Infinitesimal rotation about `axis` (planar charts ignore the axis).
    Rotation {
        #[serde(default = "e3")]
        axis: Vec<f64>,
        scale: f64,
    },
}

impl OneFormConfig {
    pub fn build(&self, dim: usize, on_sphere: bool) -> Result<OneForm> {
        match self {
            OneFormConfig::Constant { c } => OneForm::constant(dim, on_sphere, c),
            OneFormConfig::Rotation { axis, scale } => OneForm::rotation(dim, on_sphere, axis, *scale),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FieldConfig {
    Euclidean {
        dim: usize,
    },
    Round {
        #[serde(default = "one")]
        radius: f64,
    },
    Busemann {
        density: DensitySpec,
    },
    Funk {
        body: BodySpec,
    },
    Hilbert {
        body: BodySpec,
    },
    Randers {
        b: Vec<f64>,
        #[serde(default)]
        sphere: bool,
    },
    /// Constant norm whose unit ball is the given body.
    Minkowski {
        unit_ball: BodySpec,
    },
    PlusOneForm {
        base: Box<FieldConfig>,
        form: OneFormConfig,
    },
    Reversed {
        base: Box<FieldConfig>,
    },
    Symmetrized {
        base: Box<FieldConfig>,
    },
    Areal {
        base: Box<FieldConfig>,
    },
    Scaled {
        factor: f64,
        base: Box<FieldConfig>,
    },
    Average {
        fields: Vec<FieldConfig>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        weights: Option<Vec<f64>>,
    },
}

impl FieldConfig {
    pub fn build(&self) -> Result<MetricField> {
        match self {
            FieldConfig::Euclidean { dim } => MetricField::euclidean(*dim),
            FieldConfig::Round { radius } => MetricField::round(*radius),
            FieldConfig::Busemann { density } => Ok(MetricField::busemann(density.build()?)),
            FieldConfig::Funk { body } => Ok(MetricField::funk(interior_body(body)?)),
            FieldConfig::Hilbert { body } => Ok(MetricField::hilbert(interior_body(body)?)),
            FieldConfig::Randers { b, sphere } => MetricField::randers(b, *sphere),
            FieldConfig::Minkowski { unit_ball } => {
                let k = interior_body(unit_ball)?;
                let dim = k.dim();
                let origin = vec![0.0; dim];
                let norm = MinkowskiNorm::new(
                    dim,
                    "gauge",
                    std::sync::Arc::new(move |v: &[f64]| k.gauge_from(&origin, v)),
                )?;
                Ok(MetricField::minkowski(norm))
            }
            FieldConfig::PlusOneForm { base, form } => {
                let f = base.build()?;
                let beta = form.build(f.manifold_dim(), f.is_sphere())?;
                f.add_one_form(&beta)
            }
            FieldConfig::Reversed { base } => Ok(base.build()?.reverse()),
            FieldConfig::Symmetrized { base } => Ok(base.build()?.symmetrize()),
            FieldConfig::Areal { base } => Ok(base.build()?.areal_symmetrization()),
            FieldConfig::Scaled { factor, base } => base.build()?.scale(*factor),
            FieldConfig::Average { fields, weights } => {
                if fields.is_empty() {
                    return Err(FinslerError::Config("average of no fields".into()));
                }
                let w = match weights {
                    Some(w) if w.len() == fields.len() => w.clone(),
                    Some(w) => {
                        return Err(FinslerError::Config(format!(
                            "{} weights for {} fields",
                            w.len(),
                            fields.len()
                        )))
                    }
                    None => vec![1.0 / fields.len() as f64; fields.len()],
                };
                let parts = fields
                    .iter()
                    .zip(w)
                    .map(|(f, c)| Ok((c, f.build()?)))
                    .collect::<Result<Vec<_>>>()?;
                MetricField::combination(&parts)
            }
        }
    }
}

fn interior_body(spec: &BodySpec) -> Result<crate::convexbody::ConvexBody> {
    let k = spec.to_body()?;
    let origin = vec![0.0; k.dim()];
    let d = k.boundary_distance(&origin);
    if !(d > 0.0) {
        return Err(FinslerError::OriginNotInterior(d));
    }
    Ok(k)
}

/// Top-level configuration file: a field plus the co-disc sampling level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldSpec {
    #[serde(flatten)]
    pub field: FieldConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fiber_level: Option<u32>,
}

impl FieldSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn build(&self) -> Result<MetricField> {
        let f = self.field.build()?;
        Ok(match self.fiber_level {
            Some(l) => f.with_fiber_level(l),
            None => f,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_busemann_poly() {
        let s = FieldSpec::from_json(r#"{"family": "busemann", "density": {"type": "poly", "coeffs": [0.25, 0.125]}}"#)
            .unwrap();
        let f = s.build().unwrap();
        let m = f.as_busemann().unwrap();
        assert!((m.total_mass() - 7.0 * std::f64::consts::PI / 6.0).abs() < 1e-14);
        let back = FieldSpec::from_json(&s.to_json().unwrap()).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn parses_nested_forms() {
        let s = FieldSpec::from_json(
            r#"{"family": "plus_one_form", "base": {"family": "round"},
                "form": {"type": "rotation", "scale": 0.2}, "fiber_level": 2}"#,
        )
        .unwrap();
        let f = s.build().unwrap();
        assert_eq!(f.fiber_level(), 2);
        assert!(f.is_sphere());
    }

    #[test]
    fn rejects_unknown_family() {
        assert!(FieldSpec::from_json(r#"{"family": "teapot"}"#).is_err());
        let bad = r#"{"family": "busemann", "density": {"type": "constant", "value": -1.0}}"#;
        assert!(FieldSpec::from_json(bad).unwrap().build().is_err());
    }
}
