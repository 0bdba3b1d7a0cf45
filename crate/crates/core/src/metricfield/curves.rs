//! Parametrized curves on S² and in planar charts.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{FinslerError, Result};
use crate::numerics::vector::{cross, dot3, norm3, normalize3, tangent_frame, to3, Vec3};

pub type PathFn = Arc<dyn Fn(f64) -> Vec3 + Send + Sync>;

/// A `C¹` curve `γ : [t0, t1] → M` with its velocity.
#[derive(Clone)]
pub struct Curve {
    pub on_sphere: bool,
    pub closed: bool,
    pub t0: f64,
    pub t1: f64,
    point: PathFn,
    velocity: PathFn,
    label: String,
}

impl std::fmt::Debug for Curve {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Curve({})", self.label)
    }
}

impl Curve {
    pub fn new(on_sphere: bool, closed: bool, t0: f64, t1: f64, point: PathFn, velocity: PathFn, label: &str) -> Result<Self> {
        if !(t1 > t0) {
            return Err(FinslerError::InvalidArgument("curve interval must be nonempty".into()));
        }
        Ok(Self {
            on_sphere,
            closed,
            t0,
            t1,
            point,
            velocity,
            label: label.into(),
        })
    }

    /// Curve with velocity by central differences.
    pub fn from_points(on_sphere: bool, closed: bool, t0: f64, t1: f64, point: PathFn, label: &str) -> Result<Self> {
        let p = point.clone();
        let velocity: PathFn = Arc::new(move |t: f64| {
            let h = 1e-6;
            let (a, b) = (p(t + h), p(t - h));
            [(a[0] - b[0]) / (2.0 * h), (a[1] - b[1]) / (2.0 * h), (a[2] - b[2]) / (2.0 * h)]
        });
        Self::new(on_sphere, closed, t0, t1, point, velocity, label)
    }

    /// Great circle with the given pole, parametrized by arclength from the
    /// first tangent-frame axis of the pole.
    pub fn great_circle(pole: &[f64]) -> Result<Self> {
        let p = to3(pole);
        if !(norm3(&p) > 0.0) {
            return Err(FinslerError::InvalidArgument("zero pole".into()));
        }
        let p = normalize3(&p);
        let (e1, e2) = tangent_frame(&p);
        Self::new(
            true,
            true,
            0.0,
            2.0 * PI,
            Arc::new(move |t: f64| {
                let (s, c) = t.sin_cos();
                [c * e1[0] + s * e2[0], c * e1[1] + s * e2[1], c * e1[2] + s * e2[2]]
            }),
            Arc::new(move |t: f64| {
                let (s, c) = t.sin_cos();
                [-s * e1[0] + c * e2[0], -s * e1[1] + c * e2[1], -s * e1[2] + c * e2[2]]
            }),
            "great circle",
        )
    }

    pub fn equator() -> Self {
        Self::latitude(0.0).expect("equator")
    }

    /// Circle of latitude `deg` (degrees) about `e₃`.
    pub fn latitude(deg: f64) -> Result<Self> {
        if !(deg.abs() < 90.0) {
            return Err(FinslerError::InvalidArgument(format!("latitude {deg}")));
        }
        let (z, r) = (deg.to_radians().sin(), deg.to_radians().cos());
        Self::new(
            true,
            true,
            0.0,
            2.0 * PI,
            Arc::new(move |t: f64| [r * t.cos(), r * t.sin(), z]),
            Arc::new(move |t: f64| [-r * t.sin(), r * t.cos(), 0.0]),
            &format!("latitude {deg}"),
        )
    }

    /// Minimizing great-circle arc from `a` to `b` (not antipodal), on `[0, 1]`.
    pub fn arc(a: &[f64], b: &[f64]) -> Result<Self> {
        let (a, b) = (normalize3(&to3(a)), normalize3(&to3(b)));
        let c = dot3(&a, &b).clamp(-1.0, 1.0);
        if c < -1.0 + 1e-12 {
            return Err(FinslerError::InvalidArgument("antipodal arc endpoints".into()));
        }
        let theta = c.acos();
        let n = cross(&a, &b);
        let w = if norm3(&n) > 0.0 {
            normalize3(&cross(&n, &a))
        } else {
            tangent_frame(&a).0
        };
        Self::new(
            true,
            false,
            0.0,
            1.0,
            Arc::new(move |t: f64| {
                let (s, c) = (theta * t).sin_cos();
                [c * a[0] + s * w[0], c * a[1] + s * w[1], c * a[2] + s * w[2]]
            }),
            Arc::new(move |t: f64| {
                let (s, c) = (theta * t).sin_cos();
                [
                    theta * (-s * a[0] + c * w[0]),
                    theta * (-s * a[1] + c * w[1]),
                    theta * (-s * a[2] + c * w[2]),
                ]
            }),
            "arc",
        )
    }

    /// Straight segment `a → b` in a chart, on `[0, 1]`.
    pub fn segment(a: &[f64], b: &[f64]) -> Result<Self> {
        let (a, b) = (to3(a), to3(b));
        let d = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
        Self::new(
            false,
            false,
            0.0,
            1.0,
            Arc::new(move |t: f64| [a[0] + t * d[0], a[1] + t * d[1], a[2] + t * d[2]]),
            Arc::new(move |_| d),
            "segment",
        )
    }

    /// Planar circle of radius `r` about `c`, counter-clockwise.
    pub fn circle(c: &[f64], r: f64) -> Result<Self> {
        let c = to3(c);
        Self::new(
            false,
            true,
            0.0,
            2.0 * PI,
            Arc::new(move |t: f64| [c[0] + r * t.cos(), c[1] + r * t.sin(), 0.0]),
            Arc::new(move |t: f64| [-r * t.sin(), r * t.cos(), 0.0]),
            "circle",
        )
    }

    pub fn point(&self, t: f64) -> Vec3 {
        (self.point)(t)
    }

    pub fn velocity(&self, t: f64) -> Vec3 {
        (self.velocity)(t)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Parses `equator`, `latitude:<deg>` or `great_circle:x,y,z`.
    pub fn parse(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        if spec == "equator" {
            return Ok(Self::equator());
        }
        if let Some(rest) = spec.strip_prefix("latitude:") {
            let deg: f64 = rest
                .parse()
                .map_err(|_| FinslerError::Config(format!("bad latitude '{rest}'")))?;
            return Self::latitude(deg);
        }
        if let Some(rest) = spec.strip_prefix("great_circle:") {
            let v: std::result::Result<Vec<f64>, _> = rest.split(',').map(|s| s.trim().parse::<f64>()).collect();
            let v = v.map_err(|_| FinslerError::Config(format!("bad pole '{rest}'")))?;
            return Self::great_circle(&v);
        }
        Err(FinslerError::Config(format!("unknown curve '{spec}'")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arc_endpoints() {
        let c = Curve::arc(&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]).unwrap();
        let e = c.point(1.0);
        assert!((e[1] - 1.0).abs() < 1e-15);
        let v = c.velocity(0.5);
        assert!((norm3(&v) - PI / 2.0).abs() < 1e-14);
    }

    #[test]
    fn parse_specs() {
        assert!(Curve::parse("latitude:60").is_ok());
        assert!(Curve::parse("great_circle:0,0,1").is_ok());
        assert!(Curve::parse("spiral").is_err());
    }
}
