//! Convex bodies in R² and R³: support functions, polar bodies, Minkowski
//! sums, central symmetrals, volumes, brightness and the Blaschke body.

mod blaschke;
mod hull;
mod io;
mod polytope;

use std::f64::consts::PI;
use std::fmt;
use std::sync::{Arc, OnceLock};

pub use blaschke::{
    blaschke_body, blaschke_body_with_options, solve_minkowski_problem, MinkowskiOptions, MinkowskiProblem, MinkowskiSolution,
};
pub use hull::{hull2, hull3, Hull3};
pub use io::BodySpec;
pub use polytope::{polygon_area, Facet, HalfspacePolytope, Polytope};

use crate::error::{check_dim, FinslerError, Result};
use crate::numerics::vector::{add3, dot3, norm3, scale3, sub3, to3, Vec3};
use crate::numerics::{unit_ball_volume, DirectionGrid};

/// Exact support function evaluator.
pub type SupportFn = Arc<dyn Fn(&Vec3) -> f64 + Send + Sync>;

/// Default refinement level used when a smooth body has to be discretized.
pub fn default_level(dim: usize) -> u32 {
    if dim == 2 {
        2
    } else {
        3
    }
}

/// A convex body given by support samples on a direction grid.
///
/// The samples define the circumscribed polytope `{x : u_i·x ≤ h(u_i)}`,
/// which is used for volumes and facet data in R³. In R² the volume is the
/// spectral value of `½∫(h² - h'²)`. When the body was derived from an
/// exactly known support function, `support` evaluates that function.
#[derive(Clone)]
pub struct SampledBody {
    grid: Arc<DirectionGrid>,
    values: Vec<f64>,
    exact: Option<SupportFn>,
    polytope: Arc<OnceLock<std::result::Result<Polytope, FinslerError>>>,
}

impl fmt::Debug for SampledBody {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SampledBody")
            .field("dim", &self.grid.dim())
            .field("level", &self.grid.level())
            .field("exact", &self.exact.is_some())
            .finish()
    }
}

impl SampledBody {
    /// Samples `h` on `grid` and keeps `h` as the exact evaluator.
    pub fn from_fn(grid: Arc<DirectionGrid>, h: SupportFn) -> Result<Self> {
        let values = (0..grid.len())
            .map(|i| {
                let v = h(&grid.node3(i));
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(FinslerError::NonFinite("support sample".into()))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            grid,
            values,
            exact: Some(h),
            polytope: Arc::new(OnceLock::new()),
        })
    }

    /// Body known only through its samples.
    pub fn from_values(grid: Arc<DirectionGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(FinslerError::DimensionMismatch {
                expected: grid.len(),
                found: values.len(),
            });
        }
        if !values.iter().all(|v| v.is_finite()) {
            return Err(FinslerError::NonFinite("support sample".into()));
        }
        Ok(Self {
            grid,
            values,
            exact: None,
            polytope: Arc::new(OnceLock::new()),
        })
    }

    pub fn grid(&self) -> &Arc<DirectionGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn has_exact_support(&self) -> bool {
        self.exact.is_some()
    }

    fn map(&self, values: Vec<f64>, exact: Option<SupportFn>) -> Self {
        Self {
            grid: self.grid.clone(),
            values,
            exact,
            polytope: Arc::new(OnceLock::new()),
        }
    }

    /// Interior reference point: the Steiner point of the sampled support.
    fn interior_point(&self) -> Vec3 {
        let dim = self.grid.dim();
        let mut s = [0.0; 3];
        for i in 0..self.grid.len() {
            s = add3(&s, &scale3(self.grid.weight(i) * self.values[i], &self.grid.node3(i)));
        }
        scale3(1.0 / unit_ball_volume(dim), &s)
    }

    /// The circumscribed polytope defined by the samples.
    pub fn polytope(&self) -> Result<Polytope> {
        self.polytope
            .get_or_init(|| {
                let c = self.interior_point();
                let normals: Vec<Vec3> = (0..self.grid.len()).map(|i| self.grid.node3(i)).collect();
                let offsets: Vec<f64> = normals
                    .iter()
                    .zip(&self.values)
                    .map(|(u, h)| h - dot3(u, &c))
                    .collect();
                Polytope::from_halfspaces(self.grid.dim(), &normals, &offsets)
                    .map(|hp| hp.polytope.translate(&c))
            })
            .clone()
    }

    /// `½∫(h² - h'²) dθ` from the Fourier coefficients of the samples.
    fn spectral_area(&self) -> f64 {
        use rustfft::num_complex::Complex;
        let n = self.values.len();
        let mut buf: Vec<Complex<f64>> = self.values.iter().map(|&v| Complex::new(v, 0.0)).collect();
        rustfft::FftPlanner::new().plan_fft_forward(n).process(&mut buf);
        // h(θ) = a0 + Σ (a_k cos kθ + b_k sin kθ); |c_k|/n = |a_k - i b_k|/2
        let nf = n as f64;
        let a0 = buf[0].re / nf;
        let mut area = PI * a0 * a0;
        for (k, c) in buf.iter().enumerate().take(n / 2).skip(1) {
            let amp2 = 4.0 * c.norm_sqr() / (nf * nf);
            area += 0.5 * PI * (1.0 - (k * k) as f64) * amp2;
        }
        if n % 2 == 0 {
            let k = n / 2;
            let a = buf[k].re / nf;
            area += 0.5 * PI * (1.0 - (k * k) as f64) * a * a;
        }
        area
    }
}

/// A convex body in R² or R³.
#[derive(Debug, Clone)]
pub enum ConvexBody {
    Polytope(Polytope),
    Ball { dim: usize, center: Vec3, radius: f64 },
    /// Axis-aligned ellipsoid with the given semi-axes.
    Ellipsoid { dim: usize, center: Vec3, axes: Vec3 },
    Sampled(SampledBody),
}

impl ConvexBody {
    pub fn ball(dim: usize, center: &[f64], radius: f64) -> Result<Self> {
        check_dim(dim)?;
        if center.len() != dim {
            return Err(FinslerError::DimensionMismatch {
                expected: dim,
                found: center.len(),
            });
        }
        if !(radius >= 0.0) || !radius.is_finite() {
            return Err(FinslerError::InvalidArgument(format!("radius {radius}")));
        }
        Ok(ConvexBody::Ball {
            dim,
            center: to3(center),
            radius,
        })
    }

    pub fn unit_ball(dim: usize) -> Self {
        ConvexBody::Ball {
            dim,
            center: [0.0; 3],
            radius: 1.0,
        }
    }

    pub fn ellipsoid(dim: usize, center: &[f64], axes: &[f64]) -> Result<Self> {
        check_dim(dim)?;
        if center.len() != dim || axes.len() != dim {
            return Err(FinslerError::DimensionMismatch {
                expected: dim,
                found: axes.len(),
            });
        }
        if !axes.iter().all(|a| *a > 0.0 && a.is_finite()) {
            return Err(FinslerError::InvalidArgument("ellipsoid axes must be positive".into()));
        }
        let mut a = to3(axes);
        if dim == 2 {
            a[2] = 1.0;
        }
        Ok(ConvexBody::Ellipsoid {
            dim,
            center: to3(center),
            axes: a,
        })
    }

    pub fn from_vertices(dim: usize, vertices: &[Vec<f64>]) -> Result<Self> {
        Ok(ConvexBody::Polytope(Polytope::from_points(dim, vertices)?))
    }

    /// Samples the exact support function `h` on the grid of the given level.
    pub fn from_support_fn(dim: usize, level: u32, h: SupportFn) -> Result<Self> {
        let grid = DirectionGrid::cached(dim, level)?;
        Ok(ConvexBody::Sampled(SampledBody::from_fn(grid, h)?))
    }

    pub fn from_support_values(dim: usize, level: u32, values: Vec<f64>) -> Result<Self> {
        let grid = DirectionGrid::cached(dim, level)?;
        Ok(ConvexBody::Sampled(SampledBody::from_values(grid, values)?))
    }

    pub fn dim(&self) -> usize {
        match self {
            ConvexBody::Polytope(p) => p.dim(),
            ConvexBody::Ball { dim, .. } | ConvexBody::Ellipsoid { dim, .. } => *dim,
            ConvexBody::Sampled(s) => s.grid.dim(),
        }
    }

    /// `h_K(u)`, for any (not necessarily unit) `u`.
    pub fn support(&self, u: &[f64]) -> f64 {
        self.support3(&to3(u))
    }

    pub fn support3(&self, u: &Vec3) -> f64 {
        match self {
            ConvexBody::Polytope(p) => p.support(u),
            ConvexBody::Ball { center, radius, .. } => dot3(center, u) + radius * norm3(u),
            ConvexBody::Ellipsoid { center, axes, .. } => {
                dot3(center, u)
                    + ((axes[0] * u[0]).powi(2) + (axes[1] * u[1]).powi(2) + (axes[2] * u[2]).powi(2))
                        .sqrt()
            }
            ConvexBody::Sampled(s) => match &s.exact {
                Some(h) => h(u),
                None => match s.polytope() {
                    Ok(p) => p.support(u),
                    Err(_) => f64::NAN,
                },
            },
        }
    }

    /// The support function as a shareable closure.
    pub fn support_fn(&self) -> SupportFn {
        let body = self.clone();
        Arc::new(move |u: &Vec3| body.support3(u))
    }

    pub fn translate(&self, t: &[f64]) -> Self {
        let t3 = to3(t);
        match self {
            ConvexBody::Polytope(p) => ConvexBody::Polytope(p.translate(&t3)),
            ConvexBody::Ball { dim, center, radius } => ConvexBody::Ball {
                dim: *dim,
                center: add3(center, &t3),
                radius: *radius,
            },
            ConvexBody::Ellipsoid { dim, center, axes } => ConvexBody::Ellipsoid {
                dim: *dim,
                center: add3(center, &t3),
                axes: *axes,
            },
            ConvexBody::Sampled(s) => {
                let values = (0..s.grid.len())
                    .map(|i| s.values[i] + dot3(&s.grid.node3(i), &t3))
                    .collect();
                let exact = s.exact.clone().map(|h| -> SupportFn {
                    Arc::new(move |u: &Vec3| h(u) + dot3(u, &t3))
                });
                ConvexBody::Sampled(s.map(values, exact))
            }
        }
    }

    /// Dilation `cK` for `c > 0`.
    pub fn scale(&self, c: f64) -> Result<Self> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(FinslerError::InvalidArgument(format!("scale factor {c}")));
        }
        Ok(match self {
            ConvexBody::Polytope(p) => ConvexBody::Polytope(p.scale(c)),
            ConvexBody::Ball { dim, center, radius } => ConvexBody::Ball {
                dim: *dim,
                center: scale3(c, center),
                radius: c * radius,
            },
            ConvexBody::Ellipsoid { dim, center, axes } => {
                let mut a = scale3(c, axes);
                if *dim == 2 {
                    a[2] = 1.0;
                }
                ConvexBody::Ellipsoid {
                    dim: *dim,
                    center: scale3(c, center),
                    axes: a,
                }
            }
            ConvexBody::Sampled(s) => {
                let values = s.values.iter().map(|v| c * v).collect();
                let exact = s
                    .exact
                    .clone()
                    .map(|h| -> SupportFn { Arc::new(move |u: &Vec3| c * h(u)) });
                ConvexBody::Sampled(s.map(values, exact))
            }
        })
    }

    /// `-K`.
    pub fn reflect(&self) -> Self {
        match self {
            ConvexBody::Polytope(p) => ConvexBody::Polytope(p.reflect()),
            ConvexBody::Ball { dim, center, radius } => ConvexBody::Ball {
                dim: *dim,
                center: scale3(-1.0, center),
                radius: *radius,
            },
            ConvexBody::Ellipsoid { dim, center, axes } => ConvexBody::Ellipsoid {
                dim: *dim,
                center: scale3(-1.0, center),
                axes: *axes,
            },
            ConvexBody::Sampled(s) => {
                let values = (0..s.grid.len()).map(|i| s.values[s.grid.antipode(i)]).collect();
                let exact = s.exact.clone().map(|h| -> SupportFn {
                    Arc::new(move |u: &Vec3| h(&scale3(-1.0, u)))
                });
                ConvexBody::Sampled(s.map(values, exact))
            }
        }
    }

    /// Minkowski sum `K + L`.
    pub fn minkowski_sum(&self, other: &ConvexBody) -> Result<Self> {
        let dim = self.dim();
        if other.dim() != dim {
            return Err(FinslerError::DimensionMismatch {
                expected: dim,
                found: other.dim(),
            });
        }
        match (self, other) {
            (
                ConvexBody::Ball { center: c1, radius: r1, .. },
                ConvexBody::Ball { center: c2, radius: r2, .. },
            ) => Ok(ConvexBody::Ball {
                dim,
                center: add3(c1, c2),
                radius: r1 + r2,
            }),
            (ConvexBody::Ball { center, radius, .. }, body)
            | (body, ConvexBody::Ball { center, radius, .. })
                if *radius == 0.0 =>
            {
                Ok(body.translate(&center[..dim]))
            }
            (ConvexBody::Polytope(p), ConvexBody::Polytope(q)) => {
                let mut pts = Vec::with_capacity(p.vertices().len() * q.vertices().len());
                for a in p.vertices() {
                    for b in q.vertices() {
                        pts.push(add3(a, b));
                    }
                }
                Ok(ConvexBody::Polytope(Polytope::from_points3(dim, &pts)?))
            }
            _ => {
                let grid = match (self, other) {
                    (ConvexBody::Sampled(s), _) | (_, ConvexBody::Sampled(s)) => s.grid.clone(),
                    _ => DirectionGrid::cached(dim, default_level(dim))?,
                };
                let (h1, h2) = (self.support_fn(), other.support_fn());
                let h: SupportFn = Arc::new(move |u: &Vec3| h1(u) + h2(u));
                Ok(ConvexBody::Sampled(SampledBody::from_fn(grid, h)?))
            }
        }
    }

    /// Central symmetral `ΔK = ½(K - K)`.
    pub fn central_symmetral(&self) -> Result<Self> {
        Ok(match self {
            ConvexBody::Polytope(p) => {
                let v = p.vertices();
                let mut pts = Vec::with_capacity(v.len() * v.len());
                for a in v {
                    for b in v {
                        pts.push(scale3(0.5, &sub3(a, b)));
                    }
                }
                ConvexBody::Polytope(Polytope::from_points3(p.dim(), &pts)?)
            }
            ConvexBody::Ball { dim, radius, .. } => ConvexBody::Ball {
                dim: *dim,
                center: [0.0; 3],
                radius: *radius,
            },
            ConvexBody::Ellipsoid { dim, axes, .. } => ConvexBody::Ellipsoid {
                dim: *dim,
                center: [0.0; 3],
                axes: *axes,
            },
            ConvexBody::Sampled(s) => {
                let values = (0..s.grid.len())
                    .map(|i| 0.5 * (s.values[i] + s.values[s.grid.antipode(i)]))
                    .collect();
                let exact = s.exact.clone().map(|h| -> SupportFn {
                    Arc::new(move |u: &Vec3| 0.5 * (h(u) + h(&scale3(-1.0, u))))
                });
                ConvexBody::Sampled(s.map(values, exact))
            }
        })
    }

    /// Polar body with respect to the origin, which must be interior.
    pub fn polar(&self) -> Result<Self> {
        match self {
            ConvexBody::Polytope(p) => Ok(ConvexBody::Polytope(p.polar()?)),
            ConvexBody::Ball { dim, center, radius } if norm3(center) == 0.0 => {
                if !(*radius > 0.0) {
                    return Err(FinslerError::OriginNotInterior(*radius));
                }
                Ok(ConvexBody::Ball {
                    dim: *dim,
                    center: [0.0; 3],
                    radius: 1.0 / radius,
                })
            }
            ConvexBody::Ellipsoid { dim, center, axes } if norm3(center) == 0.0 => {
                let mut a = [1.0 / axes[0], 1.0 / axes[1], 1.0 / axes[2]];
                if *dim == 2 {
                    a[2] = 1.0;
                }
                Ok(ConvexBody::Ellipsoid {
                    dim: *dim,
                    center: [0.0; 3],
                    axes: a,
                })
            }
            ConvexBody::Sampled(s) => {
                let min = s.values.iter().cloned().fold(f64::INFINITY, f64::min);
                if !(min > 0.0) {
                    return Err(FinslerError::OriginNotInterior(min));
                }
                let pts: Vec<Vec3> = (0..s.grid.len())
                    .map(|i| scale3(1.0 / s.values[i], &s.grid.node3(i)))
                    .collect();
                Ok(ConvexBody::Polytope(Polytope::from_points3(s.grid.dim(), &pts)?))
            }
            _ => self.sample(None)?.polar(),
        }
    }

    /// Support samples of this body on the grid of the given level.
    pub fn sample(&self, level: Option<u32>) -> Result<Self> {
        let dim = self.dim();
        let grid = DirectionGrid::cached(dim, level.unwrap_or(default_level(dim)))?;
        Ok(ConvexBody::Sampled(SampledBody::from_fn(grid, self.support_fn())?))
    }

    /// Polytope representation: exact for polytopes, the circumscribed
    /// polytope of the support samples otherwise.
    pub fn to_polytope(&self, level: Option<u32>) -> Result<Polytope> {
        match self {
            ConvexBody::Polytope(p) => Ok(p.clone()),
            ConvexBody::Sampled(s) if level.is_none() || level == Some(s.grid.level()) => s.polytope(),
            _ => match self.sample(level)? {
                ConvexBody::Sampled(s) => s.polytope(),
                _ => unreachable!(),
            },
        }
    }

    /// n-dimensional volume.
    pub fn volume(&self) -> Result<f64> {
        let dim = self.dim();
        Ok(match self {
            ConvexBody::Polytope(p) => p.volume(),
            ConvexBody::Ball { radius, .. } => unit_ball_volume(dim) * radius.powi(dim as i32),
            ConvexBody::Ellipsoid { axes, .. } => unit_ball_volume(dim) * axes[..dim].iter().product::<f64>(),
            ConvexBody::Sampled(s) if dim == 2 => s.spectral_area(),
            ConvexBody::Sampled(s) => s.polytope()?.volume(),
        })
    }

    /// (n-1)-measure of the orthogonal projection onto `u^⊥`.
    pub fn brightness(&self, u: &[f64]) -> Result<f64> {
        let u = to3(u);
        let len = norm3(&u);
        if !(len > 0.0) {
            return Err(FinslerError::InvalidArgument("zero direction".into()));
        }
        let u = scale3(1.0 / len, &u);
        if self.dim() == 2 {
            let w = [-u[1], u[0], 0.0];
            return Ok(self.support3(&w) + self.support3(&scale3(-1.0, &w)));
        }
        Ok(match self {
            ConvexBody::Polytope(p) => p.brightness(&u),
            ConvexBody::Ball { radius, .. } => PI * radius * radius,
            ConvexBody::Ellipsoid { axes, .. } => {
                let s: f64 = (0..3).map(|i| (u[i] / axes[i]).powi(2)).sum();
                PI * axes[0] * axes[1] * axes[2] * s.sqrt()
            }
            ConvexBody::Sampled(s) => s.polytope()?.brightness(&u),
        })
    }

    /// k-volume of the orthogonal projection onto the span of an orthonormal
    /// k-frame.
    pub fn projection_area_k(&self, frame: &[Vec<f64>]) -> Result<f64> {
        let dim = self.dim();
        let k = frame.len();
        if k == 0 || k > dim {
            return Err(FinslerError::InvalidArgument(format!("frame of size {k}")));
        }
        let e: Vec<Vec3> = frame.iter().map(|v| to3(v)).collect();
        let mut defect: f64 = 0.0;
        for i in 0..k {
            if frame[i].len() != dim {
                return Err(FinslerError::DimensionMismatch {
                    expected: dim,
                    found: frame[i].len(),
                });
            }
            for j in 0..k {
                let target = if i == j { 1.0 } else { 0.0 };
                defect = defect.max((dot3(&e[i], &e[j]) - target).abs());
            }
        }
        if defect > 1e-10 {
            return Err(FinslerError::NonOrthonormalFrame(defect));
        }
        if k == dim {
            return self.volume();
        }
        if k == 1 {
            return Ok(self.support3(&e[0]) + self.support3(&scale3(-1.0, &e[0])));
        }
        // k = 2 in R³
        Ok(match self {
            ConvexBody::Ball { radius, .. } => PI * radius * radius,
            ConvexBody::Ellipsoid { axes, .. } => {
                let g = |a: &Vec3, b: &Vec3| (0..3).map(|l| axes[l] * axes[l] * a[l] * b[l]).sum::<f64>();
                let det = g(&e[0], &e[0]) * g(&e[1], &e[1]) - g(&e[0], &e[1]).powi(2);
                PI * det.sqrt()
            }
            ConvexBody::Polytope(p) => p.projected_area(&e[0], &e[1])?,
            ConvexBody::Sampled(s) => s.polytope()?.projected_area(&e[0], &e[1])?,
        })
    }

    /// Facet normals and areas (the surface area measure of the polytope
    /// representation).
    pub fn surface_area_measure(&self) -> Result<Vec<(Vec<f64>, f64)>> {
        let p = self.to_polytope(None)?;
        let dim = p.dim();
        Ok(p.facets()
            .iter()
            .filter(|f| f.area > 0.0)
            .map(|f| (f.normal[..dim].to_vec(), f.area))
            .collect())
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        let x = to3(x);
        match self {
            ConvexBody::Polytope(p) => p.contains(&x),
            ConvexBody::Ball { center, radius, .. } => norm3(&sub3(&x, center)) <= *radius,
            ConvexBody::Ellipsoid { center, axes, .. } => {
                (0..3).map(|i| ((x[i] - center[i]) / axes[i]).powi(2)).sum::<f64>() <= 1.0
            }
            ConvexBody::Sampled(s) => s.polytope().map(|p| p.contains(&x)).unwrap_or(false),
        }
    }

    /// Euclidean distance from an interior point to the boundary (negative
    /// outside for balls and polytopes).
    pub fn boundary_distance(&self, x: &[f64]) -> f64 {
        let x = to3(x);
        match self {
            ConvexBody::Polytope(p) => p.boundary_distance(&x),
            ConvexBody::Ball { center, radius, .. } => radius - norm3(&sub3(&x, center)),
            ConvexBody::Ellipsoid { dim, .. } => {
                // min over directions of h(u) - u·x
                let grid = DirectionGrid::cached(*dim, 4).expect("grid");
                (0..grid.len())
                    .map(|i| {
                        let u = grid.node3(i);
                        self.support3(&u) - dot3(&u, &x)
                    })
                    .fold(f64::INFINITY, f64::min)
            }
            ConvexBody::Sampled(s) => s
                .polytope()
                .map(|p| p.boundary_distance(&x))
                .unwrap_or(f64::NEG_INFINITY),
        }
    }

    /// Gauge of `K - x` at `v`, i.e. the least `t > 0` with `x + v/t ∈ K`.
    /// This is the Funk norm of `v` at the interior point `x`.
    pub fn gauge_from(&self, x: &[f64], v: &[f64]) -> f64 {
        let (x, v) = (to3(x), to3(v));
        let ball_gauge = |y: &Vec3, w: &Vec3| {
            let (yw, ww, yy) = (dot3(y, w), dot3(w, w), dot3(y, y));
            if ww == 0.0 {
                return 0.0;
            }
            let disc = yw * yw + ww * (1.0 - yy);
            (yw + disc.sqrt()) / (1.0 - yy)
        };
        match self {
            ConvexBody::Polytope(p) => p.gauge_from(&x, &v),
            ConvexBody::Ball { center, radius, .. } => {
                let y = scale3(1.0 / radius, &sub3(&x, center));
                ball_gauge(&y, &scale3(1.0 / radius, &v))
            }
            ConvexBody::Ellipsoid { center, axes, .. } => {
                let y = [
                    (x[0] - center[0]) / axes[0],
                    (x[1] - center[1]) / axes[1],
                    (x[2] - center[2]) / axes[2],
                ];
                let w = [v[0] / axes[0], v[1] / axes[1], v[2] / axes[2]];
                ball_gauge(&y, &w)
            }
            ConvexBody::Sampled(s) => s
                .polytope()
                .map(|p| p.gauge_from(&x, &v))
                .unwrap_or(f64::NAN),
        }
    }

    /// Steiner point. Exact for polytopes, balls and ellipsoids; for sampled
    /// bodies it is the Steiner point of the circumscribed polytope.
    pub fn steiner_point(&self) -> Result<Vec<f64>> {
        let dim = self.dim();
        let s = match self {
            ConvexBody::Polytope(p) => p.steiner_point(),
            ConvexBody::Ball { center, .. } | ConvexBody::Ellipsoid { center, .. } => *center,
            ConvexBody::Sampled(s) => s.polytope()?.steiner_point(),
        };
        Ok(s[..dim].to_vec())
    }
}
