//! Even densities on S², the projective metrics they induce on S², and
//! Crofton lengths of curves.
//!
//! A positive even density `m` on S² defines the metric
//!
//! `F(x, v) = ∫_{p ⊥ x} |p·v| m(p) dℓ(p)`
//!
//! whose geodesics are great circles. The length of a curve is
//! `Σ_p m(p) #(γ ∩ p^⊥)` integrated over all poles `p`, and every great circle
//! has length `2∫m`. The constant `m ≡ 1/4` gives the round metric.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{FinslerError, Result};
use crate::metricfield::{Curve, MetricField};
use crate::numerics::vector::{cross, dot3, mat_vec3, norm3, normalize3, rotation_matrix, Vec3};
use crate::numerics::{adaptive_simpson, CompensatedSum, DirectionGrid, GaussLegendre};

/// Shape of an even density on S².
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum DensityKind {
    Constant { value: f64 },
    /// `Σ_k c_k (p·axis)^{2k}`.
    Poly {
        #[serde(default = "e3")]
        axis: Vec<f64>,
        coeffs: Vec<f64>,
    },
    /// `base (1 + a exp(−(1 − (p·q)²)/s²))`: bumps of width `s` at `±q`.
    Bump {
        #[serde(default = "e3")]
        center: Vec<f64>,
        amplitude: f64,
        width: f64,
        #[serde(default = "quarter")]
        base: f64,
    },
    Scaled { factor: f64, inner: Box<DensityKind> },
    Sum { parts: Vec<DensityKind> },
}

fn quarter() -> f64 {
    0.25
}

fn e3() -> Vec<f64> {
    vec![0.0, 0.0, 1.0]
}

/// An even, positive density on S² with its fiber quadrature rule.
#[derive(Debug, Clone)]
pub struct CroftonDensity {
    kind: DensityKind,
    gl: Arc<GaussLegendre>,
}

impl CroftonDensity {
    pub fn new(kind: DensityKind) -> Result<Self> {
        let nodes = quadrature_nodes(&kind)?;
        match &kind {
            DensityKind::Poly { axis, .. } => {
                to_unit(axis)?;
            }
            DensityKind::Bump { center, .. } => {
                to_unit(center)?;
            }
            _ => {}
        }
        let d = Self {
            kind,
            gl: Arc::new(GaussLegendre::new(nodes)),
        };
        d.validate()?;
        Ok(d)
    }

    pub fn constant(value: f64) -> Result<Self> {
        Self::new(DensityKind::Constant { value })
    }

    /// The round metric: `m ≡ 1/4`.
    pub fn round() -> Self {
        Self::constant(0.25).expect("constant density")
    }

    pub fn poly(axis: &[f64], coeffs: &[f64]) -> Result<Self> {
        Self::new(DensityKind::Poly {
            axis: axis.to_vec(),
            coeffs: coeffs.to_vec(),
        })
    }

    pub fn kind(&self) -> &DensityKind {
        &self.kind
    }

    pub fn eval(&self, p: &Vec3) -> f64 {
        eval_kind(&self.kind, p)
    }

    /// `c·m`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(DensityKind::Scaled {
            factor: c,
            inner: Box::new(self.kind.clone()),
        })
    }

    /// `Σ m_i`.
    pub fn sum(parts: &[CroftonDensity]) -> Result<Self> {
        Self::new(DensityKind::Sum {
            parts: parts.iter().map(|d| d.kind.clone()).collect(),
        })
    }

    /// `∫_{S²} m dσ`, from closed forms or a one-dimensional quadrature in
    /// the polar angle about the density's axis.
    pub fn total_mass(&self) -> f64 {
        mass_kind(&self.kind)
    }

    /// Rescaled copy with `∫ m = target`.
    pub fn normalized_to(&self, target: f64) -> Result<Self> {
        self.scaled(target / self.total_mass())
    }

    /// Checks evenness (to 1e-12) and positivity on the level-2 grid.
    pub fn validate(&self) -> Result<()> {
        let grid = DirectionGrid::cached(3, 2)?;
        for i in 0..grid.len() {
            let p = grid.node3(i);
            let a = self.eval(&p);
            let b = self.eval(&[-p[0], -p[1], -p[2]]);
            if !(a > 0.0) || !a.is_finite() {
                return Err(FinslerError::InadmissibleDensity(format!("m({p:?}) = {a}")));
            }
            if (a - b).abs() > 1e-12 * a.abs().max(1.0) {
                return Err(FinslerError::InadmissibleDensity(format!(
                    "not even at {p:?}: {a} vs {b}"
                )));
            }
        }
        Ok(())
    }

    /// `F(x, v) = ∫_{p ⊥ x} |p·v| m(p) dℓ`.
    ///
    /// With `e = v_t/|v_t|`, `w = x × e` and `p(θ) = cos θ e + sin θ w`, the
    /// integrand is `|v_t| |cos θ| m(p(θ))`. Evenness of `m` folds the circle
    /// onto the arc `|θ| < π/2`, where the integrand is smooth, and the arc
    /// is integrated by Gauss-Legendre.
    pub fn fiber(&self, x: &Vec3, v: &Vec3) -> f64 {
        let xv = dot3(x, v);
        let vt = [v[0] - xv * x[0], v[1] - xv * x[1], v[2] - xv * x[2]];
        let r = norm3(&vt);
        if r == 0.0 {
            return 0.0;
        }
        let e = [vt[0] / r, vt[1] / r, vt[2] / r];
        let w = cross(x, &e);
        let mut s = 0.0;
        for (t, wt) in self.gl.mapped(-0.5 * PI, 0.5 * PI) {
            let (sn, cs) = t.sin_cos();
            let p = [cs * e[0] + sn * w[0], cs * e[1] + sn * w[1], cs * e[2] + sn * w[2]];
            s += wt * cs * self.eval(&p);
        }
        2.0 * r * s
    }

    /// `∇_v F(x, v) = ∫_{p ⊥ x} sign(p·v) p m(p) dℓ`.
    pub fn fiber_gradient(&self, x: &Vec3, v: &Vec3) -> Vec3 {
        let xv = dot3(x, v);
        let vt = [v[0] - xv * x[0], v[1] - xv * x[1], v[2] - xv * x[2]];
        let r = norm3(&vt);
        if r == 0.0 {
            return [0.0; 3];
        }
        let e = [vt[0] / r, vt[1] / r, vt[2] / r];
        let w = cross(x, &e);
        let mut g = [0.0; 3];
        for (t, wt) in self.gl.mapped(-0.5 * PI, 0.5 * PI) {
            let (sn, cs) = t.sin_cos();
            let p = [cs * e[0] + sn * w[0], cs * e[1] + sn * w[1], cs * e[2] + sn * w[2]];
            let c = 2.0 * wt * self.eval(&p);
            for k in 0..3 {
                g[k] += c * p[k];
            }
        }
        g
    }
}

fn to_unit(v: &[f64]) -> Result<Vec3> {
    if v.len() != 3 {
        return Err(FinslerError::DimensionMismatch {
            expected: 3,
            found: v.len(),
        });
    }
    let a = [v[0], v[1], v[2]];
    if !(norm3(&a) > 0.0) {
        return Err(FinslerError::InvalidArgument("zero axis".into()));
    }
    Ok(normalize3(&a))
}

fn quadrature_nodes(kind: &DensityKind) -> Result<usize> {
    Ok(match kind {
        DensityKind::Constant { .. } => 8,
        DensityKind::Poly { coeffs, .. } => 16 + 2 * coeffs.len(),
        DensityKind::Bump { width, .. } => {
            if !(*width > 0.0) {
                return Err(FinslerError::InadmissibleDensity(format!("bump width {width}")));
            }
            ((13.0 / width).ceil() as usize).clamp(24, 512)
        }
        DensityKind::Scaled { inner, .. } => quadrature_nodes(inner)?,
        DensityKind::Sum { parts } => {
            let mut n = 8;
            for p in parts {
                n = n.max(quadrature_nodes(p)?);
            }
            n
        }
    })
}

fn eval_kind(kind: &DensityKind, p: &Vec3) -> f64 {
    match kind {
        DensityKind::Constant { value } => *value,
        DensityKind::Poly { axis, coeffs } => {
            let a = normalize3(&[axis[0], axis[1], axis[2]]);
            let t = dot3(&a, p);
            let t2 = t * t;
            let mut pow = 1.0;
            let mut s = 0.0;
            for c in coeffs {
                s += c * pow;
                pow *= t2;
            }
            s
        }
        DensityKind::Bump {
            center,
            amplitude,
            width,
            base,
        } => {
            let q = normalize3(&[center[0], center[1], center[2]]);
            let c = dot3(&q, p);
            base * (1.0 + amplitude * (-(1.0 - c * c) / (width * width)).exp())
        }
        DensityKind::Scaled { factor, inner } => factor * eval_kind(inner, p),
        DensityKind::Sum { parts } => parts.iter().map(|k| eval_kind(k, p)).sum(),
    }
}

fn mass_kind(kind: &DensityKind) -> f64 {
    match kind {
        DensityKind::Constant { value } => 4.0 * PI * value,
        DensityKind::Poly { coeffs, .. } => coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c * 4.0 * PI / (2 * k + 1) as f64)
            .sum(),
        DensityKind::Bump {
            amplitude,
            width,
            base,
            ..
        } => {
            // ∫ exp(−(1−t²)/s²) over S² = 2π ∫_{-1}^{1} exp(−(1−t²)/s²) dt
            let s2 = width * width;
            let g = adaptive_simpson(-1.0, 1.0, 1e-14, |t| (-(1.0 - t * t) / s2).exp());
            base * (4.0 * PI + amplitude * 2.0 * PI * g)
        }
        DensityKind::Scaled { factor, inner } => factor * mass_kind(inner),
        DensityKind::Sum { parts } => parts.iter().map(mass_kind).sum(),
    }
}

/// `m = ¼(1 + a exp(−(1 − (p·q)²)/s²))`: the round density with even bumps
/// of height `a` and angular width `s` at `±q`.
pub fn perturbed_round_density(q: &[f64], a: f64, s: f64) -> Result<CroftonDensity> {
    if !(a > -1.0) {
        return Err(FinslerError::InadmissibleDensity(format!("amplitude {a} must exceed -1")));
    }
    if !(s > 0.0) {
        return Err(FinslerError::InadmissibleDensity(format!("width {s} must be positive")));
    }
    CroftonDensity::new(DensityKind::Bump {
        center: q.to_vec(),
        amplitude: a,
        width: s,
        base: 0.25,
    })
}

/// Metric on S² induced by the density.
pub fn busemann_metric(m: &CroftonDensity) -> Result<MetricField> {
    m.validate()?;
    Ok(MetricField::busemann(m.clone()))
}

/// Great-circle crossing that was (nearly) tangential.
#[derive(Debug, Clone, PartialEq)]
pub struct Tangency {
    pub pole: Vec<f64>,
    pub parameter: f64,
    /// `|d/dt (γ(t)·p)|` at the crossing.
    pub slope: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CroftonLength {
    pub length: f64,
    /// Total number of transversal crossings found.
    pub crossings: usize,
    pub tangencies: Vec<Tangency>,
    pub samples: usize,
}

/// Samples per curve used to detect crossings.
pub const CROFTON_SAMPLES: usize = 4096;

/// Rotation applied to the pole grid so that no grid node is a pole of a
/// coordinate great circle.
pub fn generic_rotation() -> [[f64; 3]; 3] {
    rotation_matrix(&[0.3141592653589793, 0.5772156649015329, 0.7071067811865476], 0.4142135623730951)
}

/// Crofton length `Σ_i w_i m(p_i) #{t : γ(t)·p_i = 0}`.
///
/// The curve is sampled at `CROFTON_SAMPLES` parameters; sign changes of
/// `γ·p` are counted and each one is refined by bisection to report
/// crossings whose slope falls below `1e-10` as tangencies.
pub fn crofton_length(m: &CroftonDensity, curve: &Curve, grid: &DirectionGrid) -> Result<CroftonLength> {
    if grid.dim() != 3 {
        return Err(FinslerError::UnsupportedDimension(grid.dim()));
    }
    if !curve.on_sphere {
        return Err(FinslerError::InvalidArgument("Crofton length needs a spherical curve".into()));
    }
    let n = CROFTON_SAMPLES;
    let count = if curve.closed { n } else { n + 1 };
    let h = (curve.t1 - curve.t0) / n as f64;
    let pts: Vec<Vec3> = (0..count).map(|j| curve.point(curve.t0 + h * j as f64)).collect();
    let pairs = if curve.closed { n } else { n };
    let mut total = CompensatedSum::new();
    let mut crossings = 0;
    let mut tangencies = Vec::new();
    let mut dots = vec![0.0; count];
    for i in 0..grid.len() {
        let p = grid.node3(i);
        for (d, x) in dots.iter_mut().zip(&pts) {
            *d = dot3(&p, x);
        }
        let mut c = 0usize;
        for j in 0..pairs {
            let (a, b) = (dots[j], dots[(j + 1) % count]);
            if (a >= 0.0) != (b >= 0.0) {
                c += 1;
                let (mut lo, mut hi) = (curve.t0 + h * j as f64, curve.t0 + h * (j + 1) as f64);
                let g = |t: f64| dot3(&p, &curve.point(t));
                let glo = g(lo);
                for _ in 0..60 {
                    let mid = 0.5 * (lo + hi);
                    if (g(mid) >= 0.0) == (glo >= 0.0) {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                let t = 0.5 * (lo + hi);
                let slope = dot3(&p, &curve.velocity(t)).abs();
                if slope < 1e-10 {
                    tangencies.push(Tangency {
                        pole: p.to_vec(),
                        parameter: t,
                        slope,
                    });
                }
            }
        }
        crossings += c;
        total.add(grid.weight(i) * m.eval(&p) * c as f64);
    }
    Ok(CroftonLength {
        length: total.value(),
        crossings,
        tangencies,
        samples: n,
    })
}

/// Crofton length on the generically rotated grid of the given level.
pub fn crofton_length_generic(m: &CroftonDensity, curve: &Curve, level: u32) -> Result<CroftonLength> {
    let grid = DirectionGrid::cached(3, level)?.rotated(&generic_rotation());
    crofton_length(m, curve, &grid)
}

/// Rotates a density's argument: `p ↦ m(Rᵀ p)` is not needed by the
/// library, but rotating curves is; this helper rotates a point.
pub fn rotate(r: &[[f64; 3]; 3], p: &Vec3) -> Vec3 {
    mat_vec3(r, p)
}
