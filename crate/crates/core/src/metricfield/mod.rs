//! Finsler metric fields over planar/spatial charts and over the round
//! sphere S², with Holmes–Thompson densities and field-level operations.
//!
//! Points and tangent vectors are passed as ambient `[f64; 3]`; on a planar
//! chart the third component is ignored, on S² fiber values depend only on
//! the tangential part of the vector.

mod config;
mod curves;
mod oneform;

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::{Arc, Mutex};

pub use config::{DensitySpec, FieldConfig, FieldSpec, OneFormConfig};
pub use curves::{Curve, PathFn};
pub(crate) use oneform::fit_odd_part;
pub use oneform::{CovectorFn, OneForm, OneFormKind, PotentialFn};

use crate::convexbody::{blaschke_body, ConvexBody, SupportFn};
use crate::crofton::CroftonDensity;
use crate::error::{check_dim, FinslerError, Result};
use crate::norms::{dual_norm, dual_norm_planar, MinkowskiNorm};
use crate::numerics::vector::{dot3, norm3, normalize3, scale3, tangent_frame, tangential, to3, Vec3};
use crate::numerics::{adaptive_simpson, unit_ball_volume, CompensatedSum, DirectionGrid, GaussLegendre};

/// Fiber evaluator `(x, v) ↦ F(x, v)`.
pub type FieldFn = Arc<dyn Fn(&Vec3, &Vec3) -> f64 + Send + Sync>;

/// Where a chart field is defined.
#[derive(Debug, Clone)]
pub enum Domain {
    Whole,
    Box { lo: Vec3, hi: Vec3 },
    /// Interior of a convex body.
    Interior(ConvexBody),
}

impl Domain {
    fn contains(&self, x: &Vec3, dim: usize) -> bool {
        match self {
            Domain::Whole => true,
            Domain::Box { lo, hi } => (0..dim).all(|i| x[i] > lo[i] && x[i] < hi[i]),
            Domain::Interior(k) => k.boundary_distance(&x[..dim]) > 0.0,
        }
    }

    fn boundary_distance(&self, x: &Vec3, dim: usize) -> f64 {
        match self {
            Domain::Whole => f64::INFINITY,
            Domain::Box { lo, hi } => (0..dim)
                .map(|i| (x[i] - lo[i]).min(hi[i] - x[i]))
                .fold(f64::INFINITY, f64::min),
            Domain::Interior(k) => k.boundary_distance(&x[..dim]),
        }
    }
}

#[derive(Debug, Clone)]
pub enum Base {
    Chart { dim: usize, domain: Domain },
    Sphere,
}

/// Construction of a field; derived families keep their inputs so that
/// closed forms (co-discs, duals) survive composition.
pub enum Family {
    Euclidean,
    Round { radius: f64 },
    /// The same Minkowski norm at every point of a chart.
    Norm(MinkowskiNorm),
    Busemann(CroftonDensity),
    Funk(ConvexBody),
    Hilbert(ConvexBody),
    PlusOneForm { base: MetricField, form: OneForm },
    Reversed(MetricField),
    Symmetrized(MetricField),
    Scaled { factor: f64, base: MetricField },
    Combination(Vec<(f64, MetricField)>),
    /// Fiberwise Blaschke body of the co-disc; fibers are cached per point.
    Areal {
        base: MetricField,
        cache: Mutex<HashMap<[u64; 3], ConvexBody>>,
    },
    Custom { label: String, eval: FieldFn },
}

/// A Finsler metric field.
#[derive(Clone)]
pub struct MetricField {
    base: Base,
    family: Arc<Family>,
    fiber_level: Option<u32>,
}

impl fmt::Debug for MetricField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MetricField({}, {:?})", self.family_name(), self.base)
    }
}

/// Dual norm at a point, with the maximizing unit vector.
#[derive(Debug, Clone, PartialEq)]
pub struct DualFiber {
    pub value: f64,
    /// Ambient tangent vector `û` with `F(x, û) = 1` and `ξ(û) = F*(x, ξ)`.
    pub argmax: Vec3,
    /// Angle of `û` from `ξ` in the fiber frame (planar fibers only); a
    /// warm start for nearby evaluations.
    pub angle: Option<f64>,
}

/// Integration region on the base.
#[derive(Debug, Clone, PartialEq)]
pub enum Region {
    Whole,
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Ball { center: Vec<f64>, radius: f64 },
}

/// Parametrized surface `(s, t) ↦ σ(s, t)` in a spatial chart.
#[derive(Clone)]
pub struct Surface {
    pub s: (f64, f64),
    pub t: (f64, f64),
    pub point: Arc<dyn Fn(f64, f64) -> Vec3 + Send + Sync>,
}

fn key(x: &Vec3) -> [u64; 3] {
    [x[0].to_bits(), x[1].to_bits(), x[2].to_bits()]
}

fn neg(v: &Vec3) -> Vec3 {
    [-v[0], -v[1], -v[2]]
}

impl MetricField {
    fn make(base: Base, family: Family) -> Self {
        Self {
            base,
            family: Arc::new(family),
            fiber_level: None,
        }
    }

    fn derived(&self, family: Family) -> Self {
        Self {
            base: self.base.clone(),
            family: Arc::new(family),
            fiber_level: self.fiber_level,
        }
    }

    /// Euclidean metric on R^dim.
    pub fn euclidean(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self::make(
            Base::Chart {
                dim,
                domain: Domain::Whole,
            },
            Family::Euclidean,
        ))
    }

    /// Round metric of the sphere of radius `r`, written on the unit sphere.
    pub fn round(radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(FinslerError::InvalidArgument(format!("radius {radius}")));
        }
        Ok(Self::make(Base::Sphere, Family::Round { radius }))
    }

    /// Constant Minkowski norm on R^dim.
    pub fn minkowski(norm: MinkowskiNorm) -> Self {
        Self::make(
            Base::Chart {
                dim: norm.dim(),
                domain: Domain::Whole,
            },
            Family::Norm(norm),
        )
    }

    pub fn busemann(m: CroftonDensity) -> Self {
        Self::make(Base::Sphere, Family::Busemann(m))
    }

    /// Funk metric of the interior of `k`.
    pub fn funk(k: ConvexBody) -> Self {
        Self::make(
            Base::Chart {
                dim: k.dim(),
                domain: Domain::Interior(k.clone()),
            },
            Family::Funk(k),
        )
    }

    /// Hilbert metric `(F + F₋)/2` of the interior of `k`.
    pub fn hilbert(k: ConvexBody) -> Self {
        Self::make(
            Base::Chart {
                dim: k.dim(),
                domain: Domain::Interior(k.clone()),
            },
            Family::Hilbert(k),
        )
    }

    /// Randers field `|v| + b·v` on R^dim (or `|v| + (P_x b)·v` on S²).
    pub fn randers(b: &[f64], on_sphere: bool) -> Result<Self> {
        let base = if on_sphere {
            Self::round(1.0)?
        } else {
            Self::euclidean(b.len())?
        };
        let form = OneForm::constant(if on_sphere { 2 } else { b.len() }, on_sphere, b)?;
        base.add_one_form(&form)
    }

    pub fn custom(base: Base, label: &str, eval: FieldFn) -> Result<Self> {
        if let Base::Chart { dim, .. } = &base {
            check_dim(*dim)?;
        }
        Ok(Self::make(
            base,
            Family::Custom {
                label: label.into(),
                eval,
            },
        ))
    }

    /// Grid level used when a fiber's co-disc has to be sampled.
    pub fn with_fiber_level(mut self, level: u32) -> Self {
        self.fiber_level = Some(level);
        self
    }

    pub fn fiber_level(&self) -> u32 {
        self.fiber_level
            .unwrap_or(if self.manifold_dim() == 2 { 1 } else { 3 })
    }

    pub fn base(&self) -> &Base {
        &self.base
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn is_sphere(&self) -> bool {
        matches!(self.base, Base::Sphere)
    }

    /// Dimension of the base manifold.
    pub fn manifold_dim(&self) -> usize {
        match &self.base {
            Base::Chart { dim, .. } => *dim,
            Base::Sphere => 2,
        }
    }

    /// Dimension of the ambient coordinates of points.
    pub fn ambient_dim(&self) -> usize {
        match &self.base {
            Base::Chart { dim, .. } => *dim,
            Base::Sphere => 3,
        }
    }

    /// Volume form densities are reported against.
    pub fn reference_form(&self) -> &'static str {
        if self.is_sphere() {
            "round area form of the unit sphere"
        } else {
            "coordinate volume form"
        }
    }

    pub fn family_name(&self) -> String {
        match &*self.family {
            Family::Euclidean => "euclidean".into(),
            Family::Round { radius } => format!("round({radius})"),
            Family::Norm(n) => format!("minkowski({})", n.label()),
            Family::Busemann(_) => "busemann".into(),
            Family::Funk(_) => "funk".into(),
            Family::Hilbert(_) => "hilbert".into(),
            Family::PlusOneForm { base, .. } => format!("plus_one_form({})", base.family_name()),
            Family::Reversed(b) => format!("reversed({})", b.family_name()),
            Family::Symmetrized(b) => format!("symmetrized({})", b.family_name()),
            Family::Scaled { factor, base } => format!("scaled({factor}, {})", base.family_name()),
            Family::Combination(parts) => format!("combination of {}", parts.len()),
            Family::Areal { base, .. } => format!("areal({})", base.family_name()),
            Family::Custom { label, .. } => format!("custom({label})"),
        }
    }

    /// Canonical description including parameters; hashed into reports.
    pub fn describe(&self) -> String {
        let body = |k: &ConvexBody| {
            serde_json::to_string(&crate::convexbody::BodySpec::from_body(k)).unwrap_or_else(|_| format!("{k:?}"))
        };
        let inner = match &*self.family {
            Family::Euclidean => format!("euclidean[{}]", self.manifold_dim()),
            Family::Round { radius } => format!("round[{radius:e}]"),
            Family::Norm(n) => format!("norm[{}]", n.label()),
            Family::Busemann(m) => format!("busemann[{:?}]", m.kind()),
            Family::Funk(k) => format!("funk[{}]", body(k)),
            Family::Hilbert(k) => format!("hilbert[{}]", body(k)),
            Family::PlusOneForm { base, form } => format!("plus[{};{form:?}]", base.describe()),
            Family::Reversed(b) => format!("reversed[{}]", b.describe()),
            Family::Symmetrized(b) => format!("symmetrized[{}]", b.describe()),
            Family::Scaled { factor, base } => format!("scaled[{factor:e};{}]", base.describe()),
            Family::Combination(parts) => {
                let p: Vec<String> = parts.iter().map(|(c, f)| format!("{c:e}*{}", f.describe())).collect();
                format!("combination[{}]", p.join(","))
            }
            Family::Areal { base, .. } => format!("areal[{}]", base.describe()),
            Family::Custom { label, .. } => format!("custom[{label}]"),
        };
        format!("{inner}@level{}", self.fiber_level())
    }

    /// False for fields whose fibers may have corners (polytopal Funk and
    /// Hilbert domains, and custom fibers).
    pub fn is_smooth(&self) -> bool {
        match &*self.family {
            Family::Funk(k) | Family::Hilbert(k) => !matches!(k, ConvexBody::Polytope(_)),
            Family::Custom { .. } | Family::Norm(_) => false,
            Family::PlusOneForm { base, .. }
            | Family::Reversed(base)
            | Family::Symmetrized(base)
            | Family::Scaled { base, .. }
            | Family::Areal { base, .. } => base.is_smooth(),
            Family::Combination(parts) => parts.iter().all(|(_, f)| f.is_smooth()),
            _ => true,
        }
    }

    /// True when `F(x, -v) = F(x, v)` holds by construction.
    pub fn is_reversible_by_construction(&self) -> bool {
        match &*self.family {
            Family::Euclidean
            | Family::Round { .. }
            | Family::Busemann(_)
            | Family::Hilbert(_)
            | Family::Symmetrized(_)
            | Family::Areal { .. } => true,
            Family::Reversed(b) | Family::Scaled { base: b, .. } => b.is_reversible_by_construction(),
            Family::Combination(parts) => parts.iter().all(|(_, f)| f.is_reversible_by_construction()),
            _ => false,
        }
    }

    /// The Crofton density when this field is (a positive multiple or sum
    /// of) Busemann fields; the round metric of radius `r` is `m ≡ r/4`.
    pub fn as_busemann(&self) -> Option<CroftonDensity> {
        match &*self.family {
            Family::Busemann(m) => Some(m.clone()),
            Family::Round { radius } => CroftonDensity::constant(radius / 4.0).ok(),
            Family::Scaled { factor, base } => base.as_busemann()?.scaled(*factor).ok(),
            Family::Reversed(b) | Family::Symmetrized(b) | Family::Areal { base: b, .. } => b.as_busemann(),
            Family::Combination(parts) => {
                let mut ds = Vec::new();
                for (c, f) in parts {
                    ds.push(f.as_busemann()?.scaled(*c).ok()?);
                }
                CroftonDensity::sum(&ds).ok()
            }
            _ => None,
        }
    }

    /// Whether `x` lies in the base.
    pub fn contains(&self, x: &Vec3) -> bool {
        match &self.base {
            Base::Sphere => (norm3(x) - 1.0).abs() < 1e-9,
            Base::Chart { dim, domain } => domain.contains(x, *dim),
        }
    }

    /// Euclidean distance to the edge of the chart domain (infinite on S²).
    pub fn boundary_distance(&self, x: &Vec3) -> f64 {
        match &self.base {
            Base::Sphere => f64::INFINITY,
            Base::Chart { dim, domain } => domain.boundary_distance(x, *dim),
        }
    }

    /// Orthonormal frame of the tangent space at `x`.
    pub fn frame(&self, x: &Vec3) -> Vec<Vec3> {
        match &self.base {
            Base::Sphere => {
                let (a, b) = tangent_frame(x);
                vec![a, b]
            }
            Base::Chart { dim, .. } => (0..*dim)
                .map(|i| {
                    let mut e = [0.0; 3];
                    e[i] = 1.0;
                    e
                })
                .collect(),
        }
    }

    fn mask(&self, v: &Vec3) -> Vec3 {
        match &self.base {
            Base::Chart { dim: 2, .. } => [v[0], v[1], 0.0],
            _ => *v,
        }
    }

    /// `F(x, v)` without validation.
    pub fn eval(&self, x: &Vec3, v: &Vec3) -> f64 {
        let dim = self.manifold_dim();
        match &*self.family {
            Family::Euclidean => norm3(&self.mask(v)),
            Family::Round { radius } => radius * norm3(&tangential(x, v)),
            Family::Norm(n) => n.eval(&v[..dim]),
            Family::Busemann(m) => m.fiber(x, v),
            Family::Funk(k) => k.gauge_from(&x[..dim], &v[..dim]),
            Family::Hilbert(k) => 0.5 * (k.gauge_from(&x[..dim], &v[..dim]) + k.gauge_from(&x[..dim], &neg(v)[..dim])),
            Family::PlusOneForm { base, form } => base.eval(x, v) + form.eval(x, &self.mask(v)),
            Family::Reversed(b) => b.eval(x, &neg(v)),
            Family::Symmetrized(b) => 0.5 * (b.eval(x, v) + b.eval(x, &neg(v))),
            Family::Scaled { factor, base } => factor * base.eval(x, v),
            Family::Combination(parts) => parts.iter().map(|(c, f)| c * f.eval(x, v)).sum(),
            Family::Areal { base, .. } => {
                if dim == 2 {
                    0.5 * (base.eval(x, v) + base.eval(x, &neg(v)))
                } else {
                    match self.areal_fiber(x) {
                        Ok(b) => b.support(&v[..dim]),
                        Err(_) => f64::NAN,
                    }
                }
            }
            Family::Custom { eval, .. } => {
                if self.is_sphere() {
                    eval(x, &tangential(x, v))
                } else {
                    eval(x, &self.mask(v))
                }
            }
        }
    }

    /// Validated `F(x, v)`.
    pub fn evaluate(&self, x: &[f64], v: &[f64]) -> Result<f64> {
        let n = self.ambient_dim();
        for a in [x, v] {
            if a.len() != n {
                return Err(FinslerError::DimensionMismatch {
                    expected: n,
                    found: a.len(),
                });
            }
            if a.iter().any(|c| !c.is_finite()) {
                return Err(FinslerError::NonFinite("field argument".into()));
            }
        }
        let x3 = to3(x);
        if !self.contains(&x3) {
            return Err(FinslerError::OutsideDomain(x.to_vec()));
        }
        let value = self.eval(&x3, &to3(v));
        if !value.is_finite() {
            return Err(FinslerError::NonFinite(format!("F at {x:?}")));
        }
        Ok(value)
    }

    /// The fiber at `x` as a norm in frame coordinates.
    pub fn fiber_norm(&self, x: &Vec3) -> Result<MinkowskiNorm> {
        let frame = self.frame(x);
        let field = self.clone();
        let x = *x;
        MinkowskiNorm::new(
            frame.len(),
            &self.family_name(),
            Arc::new(move |u: &[f64]| field.eval(&x, &combine(&frame, u))),
        )
    }

    /// `∇_v F(x, v)` as an ambient covector (tangential on S²).
    pub fn fiber_gradient(&self, x: &Vec3, v: &Vec3) -> Vec3 {
        match &*self.family {
            Family::Euclidean => {
                let w = self.mask(v);
                let r = norm3(&w);
                if r == 0.0 {
                    [0.0; 3]
                } else {
                    scale3(1.0 / r, &w)
                }
            }
            Family::Round { radius } => {
                let w = tangential(x, v);
                let r = norm3(&w);
                if r == 0.0 {
                    [0.0; 3]
                } else {
                    scale3(radius / r, &w)
                }
            }
            Family::Busemann(m) => m.fiber_gradient(x, v),
            Family::PlusOneForm { base, form } => {
                let g = base.fiber_gradient(x, v);
                let b = self.mask(&form.covector(x));
                [g[0] + b[0], g[1] + b[1], g[2] + b[2]]
            }
            Family::Reversed(b) => neg(&b.fiber_gradient(x, &neg(v))),
            Family::Symmetrized(b) => {
                let (p, q) = (b.fiber_gradient(x, v), b.fiber_gradient(x, &neg(v)));
                [0.5 * (p[0] - q[0]), 0.5 * (p[1] - q[1]), 0.5 * (p[2] - q[2])]
            }
            Family::Scaled { factor, base } => scale3(*factor, &base.fiber_gradient(x, v)),
            Family::Combination(parts) => {
                let mut g = [0.0; 3];
                for (c, f) in parts {
                    let h = f.fiber_gradient(x, v);
                    for k in 0..3 {
                        g[k] += c * h[k];
                    }
                }
                g
            }
            _ => self.fiber_gradient_fd(x, v),
        }
    }

    fn fiber_gradient_fd(&self, x: &Vec3, v: &Vec3) -> Vec3 {
        let h = 1e-6 * norm3(v).max(1e-300);
        let mut g = [0.0; 3];
        for e in self.frame(x) {
            let a = self.eval(x, &[v[0] + h * e[0], v[1] + h * e[1], v[2] + h * e[2]]);
            let b = self.eval(x, &[v[0] - h * e[0], v[1] - h * e[1], v[2] - h * e[2]]);
            let d = (a - b) / (2.0 * h);
            for k in 0..3 {
                g[k] += d * e[k];
            }
        }
        g
    }

    /// Derivative of `F(·, v)` along the base in the direction `w`, with
    /// `v` held fixed as an ambient vector (projected to the moving tangent
    /// plane on S²). Fourth-order central differences.
    pub fn base_derivative(&self, x: &Vec3, v: &Vec3, w: &Vec3) -> f64 {
        let mut h: f64 = 1e-3;
        if !self.is_sphere() {
            let d = self.boundary_distance(x);
            let wn = norm3(w).max(1e-300);
            h = h.min(0.25 * d / wn);
        }
        let at = |s: f64| {
            let y = [x[0] + s * w[0], x[1] + s * w[1], x[2] + s * w[2]];
            let y = if self.is_sphere() { normalize3(&y) } else { y };
            self.eval(&y, v)
        };
        (8.0 * (at(h) - at(-h)) - (at(2.0 * h) - at(-2.0 * h))) / (12.0 * h)
    }

    /// Dual norm `F*(x, ξ)` with its maximizer. `hint` is the angle returned
    /// by a previous evaluation at a nearby point.
    pub fn dual(&self, x: &Vec3, xi: &Vec3, hint: Option<f64>) -> Result<DualFiber> {
        let xi = if self.is_sphere() {
            tangential(x, xi)
        } else {
            self.mask(xi)
        };
        if norm3(&xi) == 0.0 {
            return Ok(DualFiber {
                value: 0.0,
                argmax: [0.0; 3],
                angle: None,
            });
        }
        if let Some(d) = self.closed_dual(x, &xi) {
            return Ok(d);
        }
        let frame = self.frame(x);
        let xc: Vec<f64> = frame.iter().map(|e| dot3(e, &xi)).collect();
        let f = |u: &[f64]| self.eval(x, &combine(&frame, u));
        if frame.len() == 3 {
            let d = dual_norm(3, &f, &xc, None)?;
            return Ok(DualFiber {
                value: d.value,
                argmax: combine(&frame, &d.argmax),
                angle: None,
            });
        }
        let (d, t) = dual_norm_planar(&f, &xc, hint)?;
        let (t, value) = match self.polish_dual(x, &frame, &xc, t) {
            Some((tp, vp)) if vp >= d.value * (1.0 - 1e-12) => (tp, vp),
            _ => (t, d.value),
        };
        let r = (xc[0] * xc[0] + xc[1] * xc[1]).sqrt();
        let (c, s) = (xc[0] / r, xc[1] / r);
        let u = [t.cos() * c - t.sin() * s, t.cos() * s + t.sin() * c];
        let ua = combine(&frame, &u);
        let fu = self.eval(x, &ua);
        Ok(DualFiber {
            value,
            argmax: scale3(1.0 / fu, &ua),
            angle: Some(t),
        })
    }

    /// Newton refinement of the maximizing angle from the stationarity
    /// condition `∇_v F(x, u) ∥ ξ`, which (unlike the flat maximum itself)
    /// has a simple root.
    fn polish_dual(&self, x: &Vec3, frame: &[Vec3], xc: &[f64], t0: f64) -> Option<(f64, f64)> {
        let r = (xc[0] * xc[0] + xc[1] * xc[1]).sqrt();
        let (c, s) = (xc[0] / r, xc[1] / r);
        let perp = combine(frame, &[-s, c]);
        let u_at = |t: f64| combine(frame, &[t.cos() * c - t.sin() * s, t.cos() * s + t.sin() * c]);
        let phi = |t: f64| dot3(&self.fiber_gradient(x, &u_at(t)), &perp);
        let mut t = t0;
        let h = 1e-6;
        for _ in 0..8 {
            let p = phi(t);
            let dp = (phi(t + h) - phi(t - h)) / (2.0 * h);
            if !(dp.abs() > 0.0) || !p.is_finite() {
                return None;
            }
            let step = p / dp;
            t -= step;
            if (t - t0).abs() > 1e-3 {
                return None;
            }
            if step.abs() < 1e-15 {
                break;
            }
        }
        let fu = self.eval(x, &u_at(t));
        Some((t, r * t.cos() / fu))
    }

    fn closed_dual(&self, x: &Vec3, xi: &Vec3) -> Option<DualFiber> {
        let r = norm3(xi);
        let make = |value: f64, argmax: Vec3| DualFiber {
            value,
            argmax,
            angle: None,
        };
        match &*self.family {
            Family::Euclidean => Some(make(r, scale3(1.0 / r, xi))),
            Family::Round { radius } => Some(make(r / radius, scale3(1.0 / (r * radius), xi))),
            Family::Scaled { factor, base } => base
                .closed_dual(x, xi)
                .map(|d| make(d.value / factor, scale3(1.0 / factor, &d.argmax))),
            Family::Reversed(b) => b.closed_dual(x, &neg(xi)).map(|d| make(d.value, neg(&d.argmax))),
            Family::PlusOneForm { base, form } => {
                let rad = match &*base.family {
                    Family::Euclidean => 1.0,
                    Family::Round { radius } => *radius,
                    _ => return None,
                };
                // F = rad (|v| + b·v) with b = β/rad
                let b = scale3(1.0 / rad, &self.mask(&form.covector(x)));
                let bb = dot3(&b, &b);
                if bb >= 1.0 {
                    return None;
                }
                let a = 1.0 - bb;
                let bx = dot3(&b, xi);
                let s = (bx * bx + a * r * r).sqrt();
                let value = (s - bx) / a;
                let grad = [
                    ((bx * b[0] + a * xi[0]) / s - b[0]) / a,
                    ((bx * b[1] + a * xi[1]) / s - b[1]) / a,
                    ((bx * b[2] + a * xi[2]) / s - b[2]) / a,
                ];
                Some(make(value / rad, scale3(1.0 / rad, &grad)))
            }
            Family::Funk(ConvexBody::Ball { center, radius, .. }) => {
                let p = [
                    center[0] + radius * xi[0] / r - x[0],
                    center[1] + radius * xi[1] / r - x[1],
                    center[2] + radius * xi[2] / r - x[2],
                ];
                let p = self.mask(&p);
                Some(make(dot3(xi, &p), p))
            }
            _ => None,
        }
    }

    /// Derivative of `F*(·, ξ)` along the base direction `w` at fixed `ξ`,
    /// by the envelope identity `∂_w F* = −F* ∂_w F(x, û)`.
    pub fn dual_base_derivative(&self, x: &Vec3, xi: &Vec3, d: &DualFiber, w: &Vec3) -> f64 {
        match &*self.family {
            Family::Euclidean | Family::Norm(_) => 0.0,
            Family::Round { .. } => 0.0,
            Family::Funk(_) if !self.is_sphere() => -dot3(&self.mask(xi), w),
            _ => -d.value * self.base_derivative(x, &d.argmax, w),
        }
    }

    /// Unit co-disc `D*_x` in the fiber frame at `x`; its support function
    /// is the fiber norm.
    pub fn codisc(&self, x: &Vec3) -> Result<ConvexBody> {
        if !self.contains(x) {
            return Err(FinslerError::OutsideDomain(x[..self.ambient_dim()].to_vec()));
        }
        let n = self.manifold_dim();
        let frame = self.frame(x);
        match &*self.family {
            Family::Euclidean => Ok(ConvexBody::unit_ball(n)),
            Family::Round { radius } => ConvexBody::ball(n, &vec![0.0; n], *radius),
            Family::PlusOneForm { base, form } => {
                let b = form.covector(x);
                let t: Vec<f64> = frame.iter().map(|e| dot3(e, &b)).collect();
                Ok(base.codisc(x)?.translate(&t))
            }
            Family::Scaled { factor, base } => base.codisc(x)?.scale(*factor),
            Family::Reversed(b) => Ok(b.codisc(x)?.reflect()),
            Family::Symmetrized(b) => b.codisc(x)?.central_symmetral(),
            Family::Combination(parts) => {
                let mut acc: Option<ConvexBody> = None;
                for (c, f) in parts {
                    let k = f.codisc(x)?.scale(*c)?;
                    acc = Some(match acc {
                        None => k,
                        Some(a) => a.minkowski_sum(&k)?,
                    });
                }
                acc.ok_or_else(|| FinslerError::Degenerate("empty combination".into()))
            }
            Family::Areal { base, .. } if n == 2 => base.codisc(x)?.central_symmetral(),
            Family::Areal { .. } => self.areal_fiber(x),
            _ => {
                let field = self.clone();
                let x = *x;
                let h: SupportFn = Arc::new(move |u: &Vec3| field.eval(&x, &combine(&frame, &u[..n])));
                ConvexBody::from_support_fn(n, self.fiber_level(), h)
            }
        }
    }

    /// Holmes–Thompson volume density `vol(D*_x)/ε_n` relative to
    /// [`reference_form`](Self::reference_form).
    pub fn ht_density(&self, x: &Vec3) -> Result<f64> {
        let n = self.manifold_dim();
        let v = self.codisc(x)?.volume()? / unit_ball_volume(n);
        if !v.is_finite() {
            return Err(FinslerError::NonFinite(format!("HT density at {x:?}")));
        }
        Ok(v)
    }

    /// HT density at every node of the sphere grid of the given level.
    pub fn ht_density_table(&self, level: u32) -> Result<Vec<(usize, Vec3, f64)>> {
        if !self.is_sphere() {
            return Err(FinslerError::WrongFamily("density tables are tabulated on S²".into()));
        }
        let grid = DirectionGrid::cached(3, level)?;
        (0..grid.len())
            .map(|i| {
                let x = grid.node3(i);
                Ok((i, x, self.ht_density(&x)?))
            })
            .collect()
    }

    /// Holmes–Thompson volume of a region. `resolution` is the sphere grid
    /// level on S² and the Gauss–Legendre order per axis on charts.
    pub fn ht_volume(&self, region: &Region, resolution: u32) -> Result<f64> {
        match (&self.base, region) {
            (Base::Sphere, Region::Whole) => {
                let grid = DirectionGrid::cached(3, resolution)?;
                let mut s = CompensatedSum::new();
                for i in 0..grid.len() {
                    s.add(grid.weight(i) * self.ht_density(&grid.node3(i))?);
                }
                Ok(s.value())
            }
            (Base::Sphere, _) => Err(FinslerError::InvalidArgument(
                "sphere volumes are computed over the whole sphere".into(),
            )),
            (Base::Chart { .. }, Region::Whole) => Err(FinslerError::InvalidArgument(
                "chart volumes need a bounded region".into(),
            )),
            (Base::Chart { dim, .. }, Region::Box { lo, hi }) => {
                let dim = *dim;
                if lo.len() != dim || hi.len() != dim {
                    return Err(FinslerError::DimensionMismatch {
                        expected: dim,
                        found: lo.len(),
                    });
                }
                for corner in 0..(1usize << dim) {
                    let c: Vec<f64> = (0..dim)
                        .map(|i| if corner >> i & 1 == 1 { hi[i] } else { lo[i] })
                        .collect();
                    if !self.contains(&to3(&c)) {
                        return Err(FinslerError::OutsideDomain(c));
                    }
                }
                let gl = GaussLegendre::new(resolution.max(2) as usize);
                let axes: Vec<Vec<(f64, f64)>> = (0..dim).map(|i| gl.mapped(lo[i], hi[i]).collect()).collect();
                let mut s = CompensatedSum::new();
                let count = gl.len().pow(dim as u32);
                for idx in 0..count {
                    let mut x = [0.0; 3];
                    let mut w = 1.0;
                    let mut k = idx;
                    for (i, ax) in axes.iter().enumerate() {
                        let (p, q) = ax[k % ax.len()];
                        k /= ax.len();
                        x[i] = p;
                        w *= q;
                    }
                    s.add(w * self.ht_density(&x)?);
                }
                Ok(s.value())
            }
            (Base::Chart { dim, .. }, Region::Ball { center, radius }) => {
                let dim = *dim;
                if center.len() != dim {
                    return Err(FinslerError::DimensionMismatch {
                        expected: dim,
                        found: center.len(),
                    });
                }
                let c = to3(center);
                let gl = GaussLegendre::new(resolution.max(2) as usize);
                let (dirs, dw): (Vec<Vec3>, Vec<f64>) = if dim == 2 {
                    let k = 4 * resolution.max(2) as usize;
                    (0..k)
                        .map(|j| {
                            let t = 2.0 * PI * j as f64 / k as f64;
                            ([t.cos(), t.sin(), 0.0], 2.0 * PI / k as f64)
                        })
                        .unzip()
                } else {
                    let g = DirectionGrid::cached(3, 2)?;
                    (0..g.len()).map(|i| (g.node3(i), g.weight(i))).unzip()
                };
                for u in &dirs {
                    let edge = [c[0] + radius * u[0], c[1] + radius * u[1], c[2] + radius * u[2]];
                    if !(self.contains(&edge) || self.boundary_distance(&edge) > -1e-12) {
                        return Err(FinslerError::OutsideDomain(edge[..dim].to_vec()));
                    }
                }
                let mut s = CompensatedSum::new();
                for (r, wr) in gl.mapped(0.0, *radius) {
                    for (u, wu) in dirs.iter().zip(&dw) {
                        let x = [c[0] + r * u[0], c[1] + r * u[1], c[2] + r * u[2]];
                        s.add(wr * wu * r.powi(dim as i32 - 1) * self.ht_density(&x)?);
                    }
                }
                Ok(s.value())
            }
        }
    }

    /// Length `∫ F(γ, γ') dt` by adaptive Simpson with tolerance 1e-8.
    pub fn curve_length(&self, curve: &Curve) -> Result<f64> {
        if curve.on_sphere != self.is_sphere() {
            return Err(FinslerError::InvalidArgument("curve and field live on different bases".into()));
        }
        let mut bad = None;
        let len = adaptive_simpson(curve.t0, curve.t1, 1e-8, |t| {
            let v = self.eval(&curve.point(t), &curve.velocity(t));
            if !v.is_finite() && bad.is_none() {
                bad = Some(t);
            }
            v
        });
        if let Some(t) = bad {
            return Err(FinslerError::NonFinite(format!("speed at t = {t}")));
        }
        Ok(len)
    }

    /// Holmes–Thompson k-area density of the parallelotope spanned by the
    /// given tangent vectors at `x`: `|v₁∧…∧v_k| vol_k(π_W D*_x) / ε_k`.
    pub fn k_area_density(&self, x: &Vec3, vectors: &[Vec3]) -> Result<f64> {
        let n = self.manifold_dim();
        let k = vectors.len();
        if k == 0 || k > n {
            return Err(FinslerError::InvalidArgument(format!("{k} vectors in dimension {n}")));
        }
        let frame = self.frame(x);
        let mut basis: Vec<Vec<f64>> = Vec::new();
        let mut wedge = 1.0;
        for v in vectors {
            let mut c: Vec<f64> = frame.iter().map(|e| dot3(e, v)).collect();
            for q in &basis {
                let p: f64 = c.iter().zip(q).map(|(a, b)| a * b).sum();
                for (ci, qi) in c.iter_mut().zip(q) {
                    *ci -= p * qi;
                }
            }
            let len = c.iter().map(|a| a * a).sum::<f64>().sqrt();
            if !(len > 1e-14) {
                return Ok(0.0);
            }
            wedge *= len;
            basis.push(c.iter().map(|a| a / len).collect());
        }
        let area = self.codisc(x)?.projection_area_k(&basis)?;
        Ok(wedge * area / unit_ball_volume(k))
    }

    /// HT area of a parametrized surface in a spatial chart, by a tensor
    /// Gauss–Legendre rule of the given order.
    pub fn surface_area(&self, surface: &Surface, order: usize) -> Result<f64> {
        if self.manifold_dim() != 3 || self.is_sphere() {
            return Err(FinslerError::UnsupportedDimension(self.manifold_dim()));
        }
        let gl = GaussLegendre::new(order.max(2));
        let h = 1e-6;
        let mut s = CompensatedSum::new();
        for (a, wa) in gl.mapped(surface.s.0, surface.s.1) {
            for (b, wb) in gl.mapped(surface.t.0, surface.t.1) {
                let p = (surface.point)(a, b);
                let (p1, p2) = ((surface.point)(a + h, b), (surface.point)(a - h, b));
                let (q1, q2) = ((surface.point)(a, b + h), (surface.point)(a, b - h));
                let ds = [(p1[0] - p2[0]) / (2.0 * h), (p1[1] - p2[1]) / (2.0 * h), (p1[2] - p2[2]) / (2.0 * h)];
                let dt = [(q1[0] - q2[0]) / (2.0 * h), (q1[1] - q2[1]) / (2.0 * h), (q1[2] - q2[2]) / (2.0 * h)];
                s.add(wa * wb * self.k_area_density(&p, &[ds, dt])?);
            }
        }
        Ok(s.value())
    }

    /// Base points used to audit fiberwise conditions.
    pub fn sample_points(&self) -> Result<Vec<Vec3>> {
        Ok(match &self.base {
            Base::Sphere => {
                let g = DirectionGrid::cached(3, 2)?;
                (0..g.len()).map(|i| g.node3(i)).collect()
            }
            Base::Chart { dim, domain } => {
                let (lo, hi, shrink) = match domain {
                    Domain::Whole => ([-1.0; 3], [1.0; 3], 1.0),
                    Domain::Box { lo, hi } => (*lo, *hi, 0.9),
                    Domain::Interior(k) => {
                        let c = to3(&k.steiner_point()?);
                        let grid = DirectionGrid::cached(*dim, if *dim == 2 { 2 } else { 1 })?;
                        let mut pts = vec![c];
                        for i in 0..grid.len() {
                            let u = grid.node3(i);
                            let g = k.gauge_from(&c[..*dim], &u[..*dim]);
                            for lam in [0.3, 0.6, 0.9] {
                                pts.push([c[0] + lam * u[0] / g, c[1] + lam * u[1] / g, c[2] + lam * u[2] / g]);
                            }
                        }
                        return Ok(pts);
                    }
                };
                let m = 5usize;
                let mut pts = Vec::new();
                for idx in 0..m.pow(*dim as u32) {
                    let mut x = [0.0; 3];
                    let mut k = idx;
                    for i in 0..*dim {
                        let j = (k % m) as f64 / (m - 1) as f64;
                        k /= m;
                        let mid = 0.5 * (lo[i] + hi[i]);
                        x[i] = mid + shrink * (lo[i] + j * (hi[i] - lo[i]) - mid);
                    }
                    if domain.contains(&x, *dim) {
                        pts.push(x);
                    }
                }
                pts
            }
        })
    }

    /// Unit tangent directions used to audit a fiber at `x`.
    pub fn sample_directions(&self, x: &Vec3) -> Result<Vec<Vec3>> {
        let frame = self.frame(x);
        Ok(if frame.len() == 2 {
            (0..64)
                .map(|j| {
                    let t = 2.0 * PI * j as f64 / 64.0;
                    combine(&frame, &[t.cos(), t.sin()])
                })
                .collect()
        } else {
            let g = DirectionGrid::cached(3, 2)?;
            (0..g.len()).map(|i| g.node3(i)).collect()
        })
    }

    /// Smallest value of `F` on unit sample directions over sample points.
    pub fn min_fiber_value(&self) -> Result<(f64, Vec3, Vec3)> {
        let mut worst = (f64::INFINITY, [0.0; 3], [0.0; 3]);
        for x in self.sample_points()? {
            for v in self.sample_directions(&x)? {
                let f = self.eval(&x, &v);
                if !(f >= worst.0) {
                    worst = (f, x, v);
                }
            }
        }
        Ok(worst)
    }

    /// `F + β`, after checking positivity on samples.
    pub fn add_one_form(&self, form: &OneForm) -> Result<Self> {
        if form.is_on_sphere() != self.is_sphere() || form.dim() != self.manifold_dim() {
            return Err(FinslerError::InvalidArgument("one-form and field live on different bases".into()));
        }
        let f = self.derived(Family::PlusOneForm {
            base: self.clone(),
            form: form.clone(),
        });
        let (value, x, v) = f.min_fiber_value()?;
        if !(value > 1e-12) {
            let n = self.ambient_dim();
            return Err(FinslerError::PositivityViolation {
                x: x[..n].to_vec(),
                v: v[..n].to_vec(),
                value,
            });
        }
        Ok(f)
    }

    /// `F₋(x, v) = F(x, −v)`.
    pub fn reverse(&self) -> Self {
        self.derived(Family::Reversed(self.clone()))
    }

    /// Central symmetrization `(F(v) + F(−v))/2`.
    pub fn symmetrize(&self) -> Self {
        self.derived(Family::Symmetrized(self.clone()))
    }

    /// `c F` for `c > 0`.
    pub fn scale(&self, c: f64) -> Result<Self> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(FinslerError::InvalidArgument(format!("scale factor {c}")));
        }
        Ok(self.derived(Family::Scaled {
            factor: c,
            base: self.clone(),
        }))
    }

    /// `Σ c_i F_i` with positive weights over a common base.
    pub fn combination(parts: &[(f64, MetricField)]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| FinslerError::InvalidArgument("empty combination".into()))?;
        for (c, f) in parts {
            if !(*c > 0.0) {
                return Err(FinslerError::InvalidArgument(format!("weight {c} must be positive")));
            }
            if f.is_sphere() != first.1.is_sphere() || f.manifold_dim() != first.1.manifold_dim() {
                return Err(FinslerError::InvalidArgument("fields live on different bases".into()));
            }
        }
        Ok(first.1.derived(Family::Combination(parts.to_vec())))
    }

    /// `(F₁ + F₂)/2`.
    pub fn average(a: &MetricField, b: &MetricField) -> Result<Self> {
        Self::combination(&[(0.5, a.clone()), (0.5, b.clone())])
    }

    /// Areal symmetrization: the fiber at `x` is the support function of
    /// the Blaschke body of `D*_x`. On surfaces this is the central
    /// symmetrization.
    pub fn areal_symmetrization(&self) -> Self {
        self.derived(Family::Areal {
            base: self.clone(),
            cache: Mutex::new(HashMap::new()),
        })
    }

    fn areal_fiber(&self, x: &Vec3) -> Result<ConvexBody> {
        let Family::Areal { base, cache } = &*self.family else {
            return Err(FinslerError::WrongFamily("not an areal symmetrization".into()));
        };
        let k = key(x);
        if let Some(b) = cache.lock().expect("areal cache").get(&k) {
            return Ok(b.clone());
        }
        let body = blaschke_body(&base.codisc(x)?).map_err(|e| match e {
            FinslerError::NonConvergence {
                solver,
                iterations,
                residual,
                history,
            } => FinslerError::NonConvergence {
                solver: format!("{solver} at x = {x:?}"),
                iterations,
                residual,
                history,
            },
            other => other,
        })?;
        cache.lock().expect("areal cache").insert(k, body.clone());
        Ok(body)
    }

    /// Fitted odd part of the fibers as a one-form (least squares over
    /// `directions` planar samples per point).
    pub fn odd_part_form(&self, directions: usize) -> OneForm {
        OneForm::fitted_odd_part(self, directions)
    }
}

/// `Σ u_i e_i`.
pub fn combine(frame: &[Vec3], u: &[f64]) -> Vec3 {
    let mut v = [0.0; 3];
    for (e, c) in frame.iter().zip(u) {
        for k in 0..3 {
            v[k] += c * e[k];
        }
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crofton::perturbed_round_density;
    use crate::norms::dual_norm;

    fn round() -> MetricField {
        MetricField::round(1.0).unwrap()
    }

    #[test]
    fn round_density_and_volume() {
        let f = round();
        let x = normalize3(&[0.3, 0.2, 0.9]);
        assert!((f.ht_density(&x).unwrap() - 1.0).abs() < 1e-14);
        let v = f.ht_volume(&Region::Whole, 3).unwrap();
        assert!((v - 4.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn sphere_fibers_ignore_normal_components() {
        let m = perturbed_round_density(&[0.0, 0.0, 1.0], 0.5, 0.2).unwrap();
        let f = MetricField::busemann(m);
        let x = normalize3(&[0.4, -0.5, 0.3]);
        let v = [0.2, 0.7, -0.1];
        let w = [v[0] + 3.0 * x[0], v[1] + 3.0 * x[1], v[2] + 3.0 * x[2]];
        assert!((f.eval(&x, &v) - f.eval(&x, &w)).abs() < 1e-10);
    }

    #[test]
    fn funk_segment_length() {
        let f = MetricField::funk(ConvexBody::unit_ball(2));
        let c = Curve::segment(&[0.0, 0.0], &[0.9, 0.0]).unwrap();
        let len = f.curve_length(&c).unwrap();
        assert!((len + (0.1f64).ln()).abs() < 1e-6, "{len}");
    }

    #[test]
    fn equator_length() {
        assert!((round().curve_length(&Curve::equator()).unwrap() - 2.0 * PI).abs() < 1e-8);
        let e = MetricField::euclidean(2).unwrap();
        let c = Curve::circle(&[0.0, 0.0], 1.0).unwrap();
        assert!((e.curve_length(&c).unwrap() - 2.0 * PI).abs() < 1e-8);
    }

    #[test]
    fn randers_codisc_is_translated_disc() {
        let f = MetricField::randers(&[0.3, -0.1], false).unwrap();
        let k = f.codisc(&[0.2, 0.1, 0.0]).unwrap();
        assert!((k.support(&[1.0, 0.0]) - 1.3).abs() < 1e-14);
        assert!((k.volume().unwrap() - PI).abs() < 1e-12);
        // support of the co-disc is the fiber; its dual value is the oracle
        let x = [0.2, 0.1, 0.0];
        let xi = [0.5, 0.8, 0.0];
        let d = f.dual(&x, &xi, None).unwrap();
        let g = |u: &[f64]| f.eval(&x, &[u[0], u[1], 0.0]);
        let o = dual_norm(2, &g, &xi[..2], None).unwrap();
        assert!((d.value - o.value).abs() < 1e-10);
    }

    #[test]
    fn funk_at_center_is_euclidean() {
        let f = MetricField::funk(ConvexBody::unit_ball(2));
        let k = f.codisc(&[0.0; 3]).unwrap();
        for t in [0.0f64, 1.0, 2.5] {
            assert!((k.support(&[t.cos(), t.sin()]) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn one_form_keeps_density() {
        let m = perturbed_round_density(&[0.0, 0.0, 1.0], 0.5, 0.2).unwrap();
        let f = MetricField::busemann(m);
        let g = f
            .add_one_form(&OneForm::rotation(2, true, &[0.0, 0.0, 1.0], 0.2).unwrap())
            .unwrap();
        for x in [[1.0, 0.0, 0.0], normalize3(&[0.3, 0.5, 0.2])] {
            let (a, b) = (f.ht_density(&x).unwrap(), g.ht_density(&x).unwrap());
            assert!((a - b).abs() < 1e-6 * a, "{a} {b}");
        }
    }

    #[test]
    fn positivity_violation_is_reported() {
        let f = MetricField::euclidean(2).unwrap();
        let bad = OneForm::constant(2, false, &[1.5, 0.0]).unwrap();
        match f.add_one_form(&bad) {
            Err(FinslerError::PositivityViolation { value, .. }) => assert!(value < 0.0),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn dual_of_busemann_fiber_matches_generic_solver() {
        let m = perturbed_round_density(&[0.0, 0.0, 1.0], 0.5, 0.2).unwrap();
        let f = MetricField::busemann(m);
        let x = normalize3(&[0.8, 0.1, 0.3]);
        let (e1, e2) = tangent_frame(&x);
        let xi = combine(&[e1, e2], &[0.3, 0.9]);
        let d = f.dual(&x, &xi, None).unwrap();
        assert!((f.eval(&x, &d.argmax) - 1.0).abs() < 1e-12);
        assert!((dot3(&xi, &d.argmax) - d.value).abs() < 1e-12);
        // stationarity: the gradient at the maximizer is parallel to ξ
        let g = f.fiber_gradient(&x, &d.argmax);
        let gc = [dot3(&g, &e1), dot3(&g, &e2)];
        assert!((gc[0] * 0.9 - gc[1] * 0.3).abs() < 1e-11);
    }

    #[test]
    fn scaling_multiplies_density() {
        let f = MetricField::randers(&[0.2, 0.1], false).unwrap().symmetrize();
        let g = f.scale(1.7).unwrap();
        let x = [0.1, 0.4, 0.0];
        let (a, b) = (f.ht_density(&x).unwrap(), g.ht_density(&x).unwrap());
        assert!((b - 1.7f64.powi(2) * a).abs() < 1e-8);
    }
}
