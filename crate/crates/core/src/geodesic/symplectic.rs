//! The Hilbert form, its differential pulled back to transversal patches,
//! and the ratio `ν` of two such pullbacks.

use std::sync::Arc;

use super::flow::{hamiltonian_vector, initial_state, integrate, GeodesicOptions};
use crate::error::{FinslerError, Result};
use crate::metricfield::MetricField;
use crate::numerics::vector::{dot3, norm3, normalize3, Vec3};

/// `α_{(x,v)} = ∇_v F(x, v)`, the Hilbert form as a covector at `x`.
pub fn hilbert_form(field: &MetricField, x: &Vec3, v: &Vec3) -> Result<Vec3> {
    if !(norm3(v) > 0.0) {
        return Err(FinslerError::InvalidArgument("Hilbert form needs a nonzero velocity".into()));
    }
    let g = field.fiber_gradient(x, v);
    if g.iter().any(|c| !c.is_finite()) {
        return Err(FinslerError::NonFinite("Hilbert form".into()));
    }
    Ok(g)
}

pub type PatchMap = Arc<dyn Fn(f64, f64) -> Result<(Vec3, Vec3)> + Send + Sync>;

/// Two-parameter family of states `(x(s₁, s₂), v(s₁, s₂))` sampled on an
/// `n1 × n2` grid of the rectangle `s1 × s2`.
#[derive(Clone)]
pub struct TransversalPatch {
    pub s1: (f64, f64),
    pub s2: (f64, f64),
    pub n1: usize,
    pub n2: usize,
    map: PatchMap,
}

impl std::fmt::Debug for TransversalPatch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "TransversalPatch({:?} × {:?}, {}×{})", self.s1, self.s2, self.n1, self.n2)
    }
}

impl TransversalPatch {
    pub fn new(s1: (f64, f64), s2: (f64, f64), n1: usize, n2: usize, map: PatchMap) -> Result<Self> {
        if n1 < 2 || n2 < 2 || !(s1.1 > s1.0) || !(s2.1 > s2.0) {
            return Err(FinslerError::InvalidArgument("patch needs a nondegenerate grid".into()));
        }
        Ok(Self { s1, s2, n1, n2, map })
    }

    /// Footpoints on the meridian `(cos s₁, 0, sin s₁)`, directions at angle
    /// `s₂` from east (`e₂`) towards north.
    pub fn meridian(half_arc: f64, directions: (f64, f64), n1: usize, n2: usize) -> Result<Self> {
        Self::new(
            (-half_arc, half_arc),
            directions,
            n1,
            n2,
            Arc::new(|a: f64, b: f64| {
                let x = [a.cos(), 0.0, a.sin()];
                let north = [-a.sin(), 0.0, a.cos()];
                let v = [b.sin() * north[0], b.cos(), b.sin() * north[2]];
                Ok((x, v))
            }),
        )
    }

    /// Planar patch: footpoints `c + s₁ e₂`, directions at angle `s₂`.
    pub fn planar(center: &[f64; 2], half_len: f64, directions: (f64, f64), n1: usize, n2: usize) -> Result<Self> {
        let c = *center;
        Self::new(
            (-half_len, half_len),
            directions,
            n1,
            n2,
            Arc::new(move |a: f64, b: f64| Ok(([c[0], c[1] + a, 0.0], [b.cos(), b.sin(), 0.0]))),
        )
    }

    pub fn state(&self, a: f64, b: f64) -> Result<(Vec3, Vec3)> {
        (self.map)(a, b)
    }

    /// Grid parameters, row-major in `s₁`.
    pub fn nodes(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::with_capacity(self.n1 * self.n2);
        for i in 0..self.n1 {
            let a = self.s1.0 + (self.s1.1 - self.s1.0) * i as f64 / (self.n1 - 1) as f64;
            for j in 0..self.n2 {
                let b = self.s2.0 + (self.s2.1 - self.s2.0) * j as f64 / (self.n2 - 1) as f64;
                out.push((a, b));
            }
        }
        out
    }

    /// Image of the patch under the geodesic flow of `field` for time `t`,
    /// integrated with a fixed step so that the map stays smooth in the
    /// parameters.
    pub fn flowed(&self, field: &MetricField, t: f64, steps: usize) -> Self {
        let inner = self.map.clone();
        let field = field.clone();
        let opts = GeodesicOptions {
            fixed_step: Some(t / steps.max(1) as f64),
            max_step: f64::INFINITY,
            ..GeodesicOptions::default()
        };
        Self {
            s1: self.s1,
            s2: self.s2,
            n1: self.n1,
            n2: self.n2,
            map: Arc::new(move |a: f64, b: f64| {
                let (x, v) = inner(a, b)?;
                let (x, _, xi) = initial_state(&field, &x[..field.ambient_dim()], &v[..field.ambient_dim()])?;
                let tr = integrate(&field, [x[0], x[1], x[2], xi[0], xi[1], xi[2]], t, &opts)?;
                let end = tr.last();
                Ok((end.x, end.v))
            }),
        }
    }
}

/// `dα` pulled back to a patch, sampled at its nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct SectionForm {
    pub nodes: Vec<(f64, f64)>,
    pub omega: Vec<f64>,
    /// Smallest angle between the flow direction and the patch tangent
    /// plane over the nodes.
    pub min_angle: f64,
}

fn fd4<F: Fn(f64) -> Result<[f64; 6]>>(f: F, s: f64, h: f64) -> Result<[f64; 6]> {
    let (p1, m1, p2, m2) = (f(s + h)?, f(s - h)?, f(s + 2.0 * h)?, f(s - 2.0 * h)?);
    let mut d = [0.0; 6];
    for k in 0..6 {
        d[k] = (8.0 * (p1[k] - m1[k]) - (p2[k] - m2[k])) / (12.0 * h);
    }
    Ok(d)
}

fn phase(field: &MetricField, patch: &TransversalPatch, a: f64, b: f64) -> Result<[f64; 6]> {
    let (x, v) = patch.state(a, b)?;
    let xi = hilbert_form(field, &x, &v)?;
    Ok([x[0], x[1], x[2], xi[0], xi[1], xi[2]])
}

fn angle_to_plane(x: &[f64; 6], a: &[f64; 6], b: &[f64; 6]) -> f64 {
    let dot = |p: &[f64; 6], q: &[f64; 6]| (0..6).map(|k| p[k] * q[k]).sum::<f64>();
    let (aa, ab, bb) = (dot(a, a), dot(a, b), dot(b, b));
    let det = aa * bb - ab * ab;
    if det <= 0.0 {
        return 0.0;
    }
    let (xa, xb) = (dot(x, a), dot(x, b));
    let ca = (xa * bb - xb * ab) / det;
    let cb = (xb * aa - xa * ab) / det;
    let mut r = [0.0; 6];
    for k in 0..6 {
        r[k] = x[k] - ca * a[k] - cb * b[k];
    }
    (dot(&r, &r).sqrt() / dot(x, x).sqrt()).clamp(0.0, 1.0).asin()
}

/// `ω = ∂₁ξ·∂₂x − ∂₂ξ·∂₁x`, the pullback of `dα = dξ ∧ dx`, at every node,
/// with fourth-order differences. Fails if the flow is within 1e-3 rad of
/// the patch tangent plane at some node.
pub fn section_symplectic_form(field: &MetricField, patch: &TransversalPatch) -> Result<SectionForm> {
    let h1 = 1e-3 * (patch.s1.1 - patch.s1.0);
    let h2 = 1e-3 * (patch.s2.1 - patch.s2.0);
    let nodes = patch.nodes();
    let mut omega = Vec::with_capacity(nodes.len());
    let mut min_angle = f64::INFINITY;
    for &(a, b) in &nodes {
        let p = phase(field, patch, a, b)?;
        let d1 = fd4(|s| phase(field, patch, s, b), a, h1)?;
        let d2 = fd4(|s| phase(field, patch, a, s), b, h2)?;
        let flow = hamiltonian_vector(field, &p)?;
        let angle = angle_to_plane(&flow, &d1, &d2);
        if angle < 1e-3 {
            return Err(FinslerError::NotTransversal { s1: a, s2: b, angle });
        }
        min_angle = min_angle.min(angle);
        let w = (0..3).map(|k| d1[3 + k] * d2[k] - d2[3 + k] * d1[k]).sum::<f64>();
        omega.push(w);
    }
    Ok(SectionForm {
        nodes,
        omega,
        min_angle,
    })
}

/// `ν = ω_{F₂} / ω_{F₁}` on a patch.
#[derive(Debug, Clone, PartialEq)]
pub struct MotionRatio {
    pub nodes: Vec<(f64, f64)>,
    pub nu: Vec<f64>,
    pub mean: f64,
    /// `(max ν − min ν) / |mean|` over the patch.
    pub spread: f64,
}

pub fn motion_integral_ratio(f1: &MetricField, f2: &MetricField, patch: &TransversalPatch) -> Result<MotionRatio> {
    if f1.manifold_dim() != 2 || f2.manifold_dim() != 2 {
        return Err(FinslerError::UnsupportedDimension(f1.manifold_dim().max(f2.manifold_dim())));
    }
    let w1 = section_symplectic_form(f1, patch)?;
    let w2 = section_symplectic_form(f2, patch)?;
    let mut nu = Vec::with_capacity(w1.omega.len());
    for ((a, b), node) in w1.omega.iter().zip(&w2.omega).zip(&w1.nodes) {
        if a.abs() < 1e-10 {
            return Err(FinslerError::Degenerate(format!("ω vanishes at patch node {node:?}")));
        }
        nu.push(b / a);
    }
    let mean = nu.iter().sum::<f64>() / nu.len() as f64;
    let (lo, hi) = nu.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| (l.min(*v), h.max(*v)));
    Ok(MotionRatio {
        nodes: w1.nodes,
        nu,
        mean,
        spread: (hi - lo) / mean.abs(),
    })
}

/// Largest relative change of `ν` at a node when the patch is moved along
/// the geodesics of `flow_field` by each of the given times.
pub fn motion_integral_flow_spread(
    f1: &MetricField,
    f2: &MetricField,
    flow_field: &MetricField,
    patch: &TransversalPatch,
    times: &[f64],
) -> Result<f64> {
    let base = motion_integral_ratio(f1, f2, patch)?;
    let mut worst: f64 = 0.0;
    for &t in times {
        let moved = patch.flowed(flow_field, t, 64);
        let r = motion_integral_ratio(f1, f2, &moved)?;
        for (a, b) in base.nu.iter().zip(&r.nu) {
            worst = worst.max((a - b).abs() / a.abs());
        }
    }
    Ok(worst)
}

/// Largest relative change of `ω` when the patch is flowed for time `t`.
pub fn flow_invariance(field: &MetricField, patch: &TransversalPatch, t: f64) -> Result<f64> {
    let w0 = section_symplectic_form(field, patch)?;
    let w1 = section_symplectic_form(field, &patch.flowed(field, t, 64))?;
    let scale = w0.omega.iter().map(|w| w.abs()).fold(0.0, f64::max);
    Ok(w0
        .omega
        .iter()
        .zip(&w1.omega)
        .map(|(a, b)| (a - b).abs() / scale)
        .fold(0.0, f64::max))
}

/// Pole `x × v / |x × v|` of the great circle through a state.
pub fn great_circle_pole(x: &Vec3, v: &Vec3) -> Vec3 {
    normalize3(&crate::numerics::vector::cross(x, v))
}

/// Euler identity defect `|α(v) − F(x, v)|`.
pub fn euler_defect(field: &MetricField, x: &Vec3, v: &Vec3) -> Result<f64> {
    Ok((dot3(&hilbert_form(field, x, v)?, v) - field.eval(x, v)).abs())
}
