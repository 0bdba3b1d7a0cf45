//! Reversibility, Santaló and Crofton checks built on the geodesic flow.

use std::f64::consts::PI;

use super::flow::{geodesic_trace, GeodesicOptions, GeodesicTrajectory};
use crate::crofton::crofton_length_generic;
use crate::error::{FinslerError, Result};
use crate::metricfield::{Curve, MetricField, Region};
use crate::numerics::brent_maximize;
use crate::numerics::vector::{dot3, norm3, scale3, sub3, tangential, Vec3};
use crate::report::{CheckReport, Verdict};

/// Tolerance on the Hausdorff distance between a geodesic and the trace of
/// its reversal.
pub const REVERSIBILITY_TOL: f64 = 1e-5;
/// Relative tolerance of the Santaló and Crofton identities.
pub const INTEGRAL_GEOMETRY_TOL: f64 = 1e-2;

impl GeodesicTrajectory {
    /// Velocity at arclength `t` from the derivative of the Hermite
    /// interpolant.
    pub fn velocity_at(&self, t: f64) -> Vec3 {
        let s = &self.samples;
        let t = t.clamp(s[0].t, self.duration());
        let j = (s.partition_point(|p| p.t <= t).max(1) - 1).min(s.len().saturating_sub(2));
        if s.len() < 2 {
            return s[0].v;
        }
        let (a, b) = (&s[j], &s[j + 1]);
        let h = b.t - a.t;
        let u = (t - a.t) / h;
        let (d00, d10, d01, d11) = (
            (6.0 * u * u - 6.0 * u) / h,
            3.0 * u * u - 4.0 * u + 1.0,
            (-6.0 * u * u + 6.0 * u) / h,
            3.0 * u * u - 2.0 * u,
        );
        let mut v = [0.0; 3];
        for k in 0..3 {
            v[k] = d00 * a.x[k] + d10 * a.v[k] + d01 * b.x[k] + d11 * b.v[k];
        }
        if self.on_sphere {
            tangential(&self.point_at(t), &v)
        } else {
            v
        }
    }

    /// `∫ F(x_t, −ẋ_t) dt`: the length of the trace run backwards.
    pub fn reversed_length(&self, field: &MetricField) -> f64 {
        let s = &self.samples;
        let mut total = 0.0;
        for w in s.windows(2) {
            let (a, b) = (&w[0], &w[1]);
            let tm = 0.5 * (a.t + b.t);
            let fm = field.eval(&self.point_at(tm), &scale3(-1.0, &self.velocity_at(tm)));
            let fa = field.eval(&a.x, &scale3(-1.0, &a.v));
            let fb = field.eval(&b.x, &scale3(-1.0, &b.v));
            total += (b.t - a.t) * (fa + 4.0 * fm + fb) / 6.0;
        }
        total
    }
}

fn distance_to_trajectory(p: &Vec3, tr: &GeodesicTrajectory) -> f64 {
    let s = &tr.samples;
    let (j, d0) = s
        .iter()
        .enumerate()
        .map(|(i, q)| (i, norm3(&sub3(&q.x, p))))
        .fold((0, f64::INFINITY), |acc, c| if c.1 < acc.1 { c } else { acc });
    let lo = s[j.saturating_sub(1)].t;
    let hi = s[(j + 1).min(s.len() - 1)].t;
    if hi <= lo {
        return d0;
    }
    let r = brent_maximize(|t| -norm3(&sub3(&tr.point_at(t), p)), lo, hi, 1e-12, 200);
    d0.min(-r.value)
}

fn dense_points(tr: &GeodesicTrajectory) -> Vec<Vec3> {
    let mut pts = Vec::with_capacity(2 * tr.samples.len());
    for w in tr.samples.windows(2) {
        pts.push(w[0].x);
        pts.push(tr.point_at(0.5 * (w[0].t + w[1].t)));
    }
    pts.push(tr.last().x);
    pts
}

/// Symmetric Hausdorff distance between two traced curves.
pub fn hausdorff_distance(a: &GeodesicTrajectory, b: &GeodesicTrajectory) -> f64 {
    let ab = dense_points(a).iter().map(|p| distance_to_trajectory(p, b)).fold(0.0, f64::max);
    let ba = dense_points(b).iter().map(|p| distance_to_trajectory(p, a)).fold(0.0, f64::max);
    ab.max(ba)
}

/// Per-sample outcome of the reversibility test.
#[derive(Debug, Clone)]
pub struct ReversalTrace {
    pub forward: GeodesicTrajectory,
    pub backward: GeodesicTrajectory,
    pub distance: f64,
}

/// Traces `(x, v)` for arclength `t`, then `(x_t, −v_t)` for the reversed
/// length of the forward arc, and measures the Hausdorff distance of the
/// two curves.
pub fn reversal_trace(field: &MetricField, x: &[f64], v: &[f64], t: f64) -> Result<ReversalTrace> {
    let opts = GeodesicOptions {
        max_step: 0.02,
        ..GeodesicOptions::default()
    };
    let n = field.ambient_dim();
    let forward = geodesic_trace(field, x, v, t, &opts)?;
    let end = forward.last();
    let back_len = forward.reversed_length(field);
    let backward = geodesic_trace(field, &end.x[..n], &scale3(-1.0, &end.v)[..n], back_len, &opts)?;
    let distance = hausdorff_distance(&forward, &backward);
    Ok(ReversalTrace {
        forward,
        backward,
        distance,
    })
}

/// Geodesic reversibility over a set of initial conditions.
pub fn reversibility_check(field: &MetricField, samples: &[(Vec<f64>, Vec<f64>)], t: f64) -> Result<CheckReport> {
    if samples.is_empty() {
        return Err(FinslerError::InvalidArgument("no initial conditions".into()));
    }
    let inputs = format!("{}|{:?}|{t}", field.describe(), samples);
    let mut worst: f64 = 0.0;
    for (x, v) in samples {
        worst = worst.max(reversal_trace(field, x, v, t)?.distance);
    }
    Ok(CheckReport::new("reversibility", &inputs)
        .value("samples", samples.len() as f64)
        .value("arclength", t)
        .residual("hausdorff", worst, REVERSIBILITY_TOL)
        .judge())
}

/// Great-circle length `ℓ` of a Busemann field, measured by counting
/// crossings with the poles of a level-`level` grid.
pub fn busemann_prime_length(field: &MetricField, level: u32) -> Result<f64> {
    let m = field
        .as_busemann()
        .ok_or_else(|| FinslerError::WrongFamily(format!("{} is not a Busemann field", field.family_name())))?;
    let curve = Curve::great_circle(&[0.0, 0.0, 1.0])?;
    Ok(crofton_length_generic(&m, &curve, level)?.length)
}

/// Santaló's formula with `f ≡ 1` on S²: `2π · vol = ℓ · ∫|ω|`, where the
/// geodesic-space mass `∫|ω| = 4 ∫ m dσ`.
pub fn santalo_check(field: &MetricField, level: u32) -> Result<CheckReport> {
    if !field.is_sphere() {
        return Err(FinslerError::WrongFamily("Santaló check needs a field on S²".into()));
    }
    let m = field
        .as_busemann()
        .ok_or_else(|| FinslerError::WrongFamily(format!("{} is not a Zoll Busemann field", field.family_name())))?;
    let volume = field.ht_volume(&Region::Whole, level)?;
    let ell = busemann_prime_length(field, level + 2)?;
    let mass = 4.0 * m.total_mass();
    let lhs = 2.0 * PI * volume;
    let rhs = ell * mass;
    let mismatch = (lhs - rhs).abs() / lhs.abs().max(rhs.abs());
    Ok(CheckReport::new("santalo", &format!("{}|{level}", field.describe()))
        .value("lhs", lhs)
        .value("rhs", rhs)
        .value("volume", volume)
        .value("prime_length", ell)
        .value("omega_mass", mass)
        .residual("relative_mismatch", mismatch, INTEGRAL_GEOMETRY_TOL)
        .judge())
}

/// Crofton formula for a curve: Finsler length against the weighted count
/// of great circles it crosses.
pub fn crofton_area_check(field: &MetricField, curve: &Curve, level: u32) -> Result<CheckReport> {
    let m = field
        .as_busemann()
        .ok_or_else(|| FinslerError::WrongFamily(format!("{} is not a Busemann field", field.family_name())))?;
    let length = field.curve_length(curve)?;
    let counted = crofton_length_generic(&m, curve, level)?;
    let mismatch = (length - counted.length).abs() / length.abs().max(counted.length.abs());
    let mut report = CheckReport::new("crofton", &format!("{}|{}|{level}", field.describe(), curve.label()))
        .value("lhs", length)
        .value("rhs", counted.length)
        .value("crossings", counted.crossings as f64)
        .value("tangencies", counted.tangencies.len() as f64)
        .residual("relative_mismatch", mismatch, INTEGRAL_GEOMETRY_TOL)
        .judge();
    if !counted.tangencies.is_empty() {
        report = report.note(&format!("{} near-tangential crossings", counted.tangencies.len()));
    }
    Ok(report)
}

/// Largest `|x_t · p₀|` along a trace, `p₀` the pole of its initial great
/// circle.
pub fn great_circle_deviation(tr: &GeodesicTrajectory) -> f64 {
    let s0 = &tr.samples[0];
    let pole = super::symplectic::great_circle_pole(&s0.x, &s0.v);
    tr.samples.iter().map(|s| dot3(&s.x, &pole).abs()).fold(0.0, f64::max)
}

/// Largest distance of a planar trace from the line through its initial
/// point and direction.
pub fn line_deviation(tr: &GeodesicTrajectory) -> f64 {
    let s0 = &tr.samples[0];
    let d = scale3(1.0 / norm3(&s0.v), &s0.v);
    tr.samples
        .iter()
        .map(|s| {
            let r = sub3(&s.x, &s0.x);
            norm3(&sub3(&r, &scale3(dot3(&r, &d), &d)))
        })
        .fold(0.0, f64::max)
}

/// Verdict helper for a set of traces that should share a property.
pub fn verdict_below(values: &[f64], tol: f64) -> Verdict {
    Verdict::all(values.iter().map(|v| Verdict::from_residual(*v, tol)))
}
