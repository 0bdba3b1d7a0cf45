//! Differential one-forms on charts and on S².

use std::fmt;
use std::sync::Arc;

use super::MetricField;
use crate::error::{FinslerError, Result};
use crate::norms::linear_fit_residual;
use crate::numerics::vector::{cross, dot3, tangent_frame, tangential, to3, Vec3};

pub type CovectorFn = Arc<dyn Fn(&Vec3) -> Vec3 + Send + Sync>;
pub type PotentialFn = Arc<dyn Fn(&Vec3) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum OneFormKind {
    /// `c·dx`; on S² this is the differential of the linear function `c·x`.
    Constant(Vec3),
    /// `s (axis × x)·dx`, the infinitesimal rotation (not closed).
    Rotation { axis: Vec3, scale: f64 },
    /// Arbitrary covector field with an optional known potential.
    Custom {
        covector: CovectorFn,
        potential: Option<PotentialFn>,
    },
    /// Linear part of the odd part of a field's fibers, fitted pointwise.
    FittedOddPart { field: MetricField, directions: usize },
    Combination(Vec<(f64, OneForm)>),
}

/// A one-form `β` with `β_x(v) = covector(x)·v`.
#[derive(Clone)]
pub struct OneForm {
    dim: usize,
    on_sphere: bool,
    kind: OneFormKind,
}

impl fmt::Debug for OneForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = match &self.kind {
            OneFormKind::Constant(c) => format!("constant {c:?}"),
            OneFormKind::Rotation { axis, scale } => format!("rotation {axis:?} × {scale}"),
            OneFormKind::Custom { .. } => "custom".into(),
            OneFormKind::FittedOddPart { .. } => "fitted odd part".into(),
            OneFormKind::Combination(v) => format!("combination of {}", v.len()),
        };
        write!(f, "OneForm({k}, dim {}, sphere {})", self.dim, self.on_sphere)
    }
}

impl OneForm {
    pub fn constant(dim: usize, on_sphere: bool, c: &[f64]) -> Result<Self> {
        Self::check(dim, on_sphere, c.len())?;
        Ok(Self {
            dim,
            on_sphere,
            kind: OneFormKind::Constant(to3(c)),
        })
    }

    /// Rotation form. In the plane the axis is ignored and the covector at
    /// `x` is `s(-x₂, x₁)`.
    pub fn rotation(dim: usize, on_sphere: bool, axis: &[f64], scale: f64) -> Result<Self> {
        Self::check(dim, on_sphere, if dim == 2 && !on_sphere { 2 } else { axis.len() })?;
        Ok(Self {
            dim,
            on_sphere,
            kind: OneFormKind::Rotation {
                axis: to3(axis),
                scale,
            },
        })
    }

    pub fn custom(dim: usize, on_sphere: bool, covector: CovectorFn, potential: Option<PotentialFn>) -> Result<Self> {
        Self::check(dim, on_sphere, if on_sphere { 3 } else { dim })?;
        Ok(Self {
            dim,
            on_sphere,
            kind: OneFormKind::Custom { covector, potential },
        })
    }

    /// `β = d f` for a potential with known gradient.
    pub fn exact(dim: usize, on_sphere: bool, potential: PotentialFn, gradient: CovectorFn) -> Result<Self> {
        Self::custom(dim, on_sphere, gradient, Some(potential))
    }

    pub(crate) fn fitted_odd_part(field: &MetricField, directions: usize) -> Self {
        Self {
            dim: field.manifold_dim(),
            on_sphere: field.is_sphere(),
            kind: OneFormKind::FittedOddPart {
                field: field.clone(),
                directions,
            },
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            dim: self.dim,
            on_sphere: self.on_sphere,
            kind: OneFormKind::Combination(vec![(c, self.clone())]),
        }
    }

    pub fn plus(&self, other: &OneForm) -> Result<Self> {
        if other.dim != self.dim || other.on_sphere != self.on_sphere {
            return Err(FinslerError::InvalidArgument("one-forms live on different spaces".into()));
        }
        Ok(Self {
            dim: self.dim,
            on_sphere: self.on_sphere,
            kind: OneFormKind::Combination(vec![(1.0, self.clone()), (1.0, other.clone())]),
        })
    }

    fn check(dim: usize, on_sphere: bool, len: usize) -> Result<()> {
        let ambient = if on_sphere { 3 } else { dim };
        if on_sphere && dim != 2 {
            return Err(FinslerError::UnsupportedDimension(dim));
        }
        crate::error::check_dim(dim)?;
        if len != ambient {
            return Err(FinslerError::DimensionMismatch {
                expected: ambient,
                found: len,
            });
        }
        Ok(())
    }

    pub fn kind(&self) -> &OneFormKind {
        &self.kind
    }

    pub fn is_on_sphere(&self) -> bool {
        self.on_sphere
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Ambient covector at `x`; tangential on S².
    pub fn covector(&self, x: &Vec3) -> Vec3 {
        let raw = match &self.kind {
            OneFormKind::Constant(c) => *c,
            OneFormKind::Rotation { axis, scale } => {
                if self.dim == 2 && !self.on_sphere {
                    [-scale * x[1], scale * x[0], 0.0]
                } else {
                    let r = cross(axis, x);
                    [scale * r[0], scale * r[1], scale * r[2]]
                }
            }
            OneFormKind::Custom { covector, .. } => covector(x),
            OneFormKind::FittedOddPart { field, directions } => {
                fit_odd_part(field, x, *directions).map(|f| f.0).unwrap_or([f64::NAN; 3])
            }
            OneFormKind::Combination(parts) => {
                let mut s = [0.0; 3];
                for (c, f) in parts {
                    let b = f.covector(x);
                    for k in 0..3 {
                        s[k] += c * b[k];
                    }
                }
                s
            }
        };
        if self.on_sphere {
            tangential(x, &raw)
        } else {
            raw
        }
    }

    pub fn eval(&self, x: &Vec3, v: &Vec3) -> f64 {
        dot3(&self.covector(x), v)
    }

    /// Potential `f` with `β = df`, when it is known in closed form.
    pub fn potential(&self, x: &Vec3) -> Option<f64> {
        match &self.kind {
            OneFormKind::Constant(c) => Some(dot3(c, x)),
            OneFormKind::Custom { potential, .. } => potential.as_ref().map(|p| p(x)),
            OneFormKind::Combination(parts) => {
                let mut s = 0.0;
                for (c, f) in parts {
                    s += c * f.potential(x)?;
                }
                Some(s)
            }
            _ => None,
        }
    }
}

/// Least-squares fit of the odd part of `F(x, ·)` at `x` over `k` fiber
/// directions. Returns the ambient covector and the fit residual.
pub(crate) fn fit_odd_part(field: &MetricField, x: &Vec3, k: usize) -> Result<(Vec3, f64, f64)> {
    let (e1, e2) = if field.is_sphere() {
        tangent_frame(x)
    } else {
        ([1.0, 0.0, 0.0], [0.0, 1.0, 0.0])
    };
    if !field.is_sphere() && field.manifold_dim() == 3 {
        let grid = crate::numerics::DirectionGrid::cached(3, 2)?;
        let dirs: Vec<Vec<f64>> = (0..grid.len()).map(|i| grid.node(i).to_vec()).collect();
        let vals: Vec<f64> = dirs
            .iter()
            .map(|u| {
                let u3 = to3(u);
                0.5 * (field.eval(x, &u3) - field.eval(x, &[-u3[0], -u3[1], -u3[2]]))
            })
            .collect();
        let fit = linear_fit_residual(&dirs, grid.weights(), &vals)?;
        return Ok((to3(&fit.beta), fit.residual, fit.max_deviation));
    }
    let dirs: Vec<Vec<f64>> = (0..k)
        .map(|j| {
            let t = 2.0 * std::f64::consts::PI * j as f64 / k as f64;
            vec![t.cos(), t.sin()]
        })
        .collect();
    let vals: Vec<f64> = dirs
        .iter()
        .map(|u| {
            let v = [
                u[0] * e1[0] + u[1] * e2[0],
                u[0] * e1[1] + u[1] * e2[1],
                u[0] * e1[2] + u[1] * e2[2],
            ];
            0.5 * (field.eval(x, &v) - field.eval(x, &[-v[0], -v[1], -v[2]]))
        })
        .collect();
    let fit = linear_fit_residual(&dirs, &vec![1.0; k], &vals)?;
    let b = fit.beta;
    let cov = [
        b[0] * e1[0] + b[1] * e2[0],
        b[0] * e1[1] + b[1] * e2[1],
        b[0] * e1[2] + b[1] * e2[2],
    ];
    Ok((cov, fit.residual, fit.max_deviation))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_form_on_sphere_is_tangential() {
        let b = OneForm::constant(2, true, &[0.0, 0.0, 0.3]).unwrap();
        let x = [0.0, 0.0, 1.0];
        assert_eq!(b.covector(&x), [0.0, 0.0, 0.0]);
        let y = [1.0, 0.0, 0.0];
        assert_eq!(b.eval(&y, &[0.0, 0.0, 1.0]), 0.3);
        assert_eq!(b.potential(&y), Some(0.0));
    }

    #[test]
    fn planar_rotation() {
        let r = OneForm::rotation(2, false, &[0.0, 0.0], 2.0).unwrap();
        assert_eq!(r.covector(&[1.0, 0.0, 0.0]), [0.0, 2.0, 0.0]);
        assert!(r.potential(&[1.0, 0.0, 0.0]).is_none());
    }
}
