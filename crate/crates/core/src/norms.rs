//! Asymmetric Minkowski norms on a single tangent space: evaluation, dual
//! norm, Legendre map, odd/even split and linear fits of the odd part.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use nalgebra::{Matrix2, Matrix3, SymmetricEigen};

use crate::convexbody::ConvexBody;
use crate::error::{check_dim, check_finite, FinslerError, Result};
use crate::numerics::vector::{dot, norm};
use crate::numerics::{brent_maximize, scan_and_refine, DirectionGrid};

pub type FiberFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// A positively homogeneous convex function on R² or R³, positive off zero.
#[derive(Clone)]
pub struct MinkowskiNorm {
    dim: usize,
    eval: FiberFn,
    label: String,
}

impl fmt::Debug for MinkowskiNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MinkowskiNorm({}, dim {})", self.label, self.dim)
    }
}

/// Value of the dual norm with the maximizing unit direction.
#[derive(Debug, Clone, PartialEq)]
pub struct DualValue {
    pub value: f64,
    /// Maximizer `u` of `ξ·u / F(u)`, normalized to `F(u) = 1`.
    pub argmax: Vec<f64>,
    /// Estimated bound on `value − true value`.
    pub gap: f64,
}

/// Least-squares linear fit of a function sampled on unit directions.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearFit {
    pub beta: Vec<f64>,
    /// Weighted RMS of `f(u) − β·u`.
    pub residual: f64,
    /// Largest pointwise deviation.
    pub max_deviation: f64,
}

impl MinkowskiNorm {
    pub fn new(dim: usize, label: &str, eval: FiberFn) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self {
            dim,
            eval,
            label: label.to_string(),
        })
    }

    pub fn euclidean(dim: usize) -> Result<Self> {
        Self::new(dim, "euclidean", Arc::new(norm_slice))
    }

    /// `|v| + b·v` with `|b| < 1`.
    pub fn randers(b: &[f64]) -> Result<Self> {
        if norm(b) >= 1.0 {
            return Err(FinslerError::InvalidArgument(format!(
                "Randers drift must satisfy |b| < 1, got {}",
                norm(b)
            )));
        }
        let b = b.to_vec();
        Self::new(b.len(), "randers", Arc::new(move |v: &[f64]| norm(v) + dot(&b, v)))
    }

    /// Support function of a body containing the origin in its interior.
    pub fn from_body(body: &ConvexBody) -> Result<Self> {
        let b = body.clone();
        Self::new(body.dim(), "support", Arc::new(move |v: &[f64]| b.support(v)))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn eval(&self, v: &[f64]) -> f64 {
        (self.eval)(v)
    }

    pub fn as_fn(&self) -> FiberFn {
        self.eval.clone()
    }

    /// `F(-v)`.
    pub fn reversed(&self) -> Self {
        let f = self.eval.clone();
        Self {
            dim: self.dim,
            eval: Arc::new(move |v: &[f64]| {
                let w: Vec<f64> = v.iter().map(|x| -x).collect();
                f(&w)
            }),
            label: format!("reversed {}", self.label),
        }
    }

    /// Odd part `(F(v) − F(−v))/2` and even part `(F(v) + F(−v))/2`.
    pub fn odd_even_split(&self) -> (FiberFn, MinkowskiNorm) {
        let f = self.eval.clone();
        let g = self.eval.clone();
        let odd: FiberFn = Arc::new(move |v: &[f64]| {
            let w: Vec<f64> = v.iter().map(|x| -x).collect();
            0.5 * (f(v) - f(&w))
        });
        let even = Self {
            dim: self.dim,
            eval: Arc::new(move |v: &[f64]| {
                let w: Vec<f64> = v.iter().map(|x| -x).collect();
                0.5 * (g(v) + g(&w))
            }),
            label: format!("symmetrized {}", self.label),
        };
        (odd, even)
    }

    /// Gradient of `F` at `v ≠ 0` by central differences. This is the
    /// Legendre transform of `½F²` restricted to the indicatrix, i.e. the
    /// Hilbert form evaluated at `v/F(v)`.
    pub fn gradient(&self, v: &[f64]) -> Result<Vec<f64>> {
        let n = norm(v);
        if !(n > 0.0) {
            return Err(FinslerError::InvalidArgument("gradient at zero vector".into()));
        }
        let h = 1e-6 * n;
        let mut g = vec![0.0; v.len()];
        let mut w = v.to_vec();
        for i in 0..v.len() {
            w[i] = v[i] + h;
            let fp = self.eval(&w);
            w[i] = v[i] - h;
            let fm = self.eval(&w);
            w[i] = v[i];
            g[i] = check_finite((fp - fm) / (2.0 * h), "norm gradient")?;
        }
        Ok(g)
    }

    /// Legendre map `v ↦ F(v) ∇F(v)`, the derivative of `½F²`.
    pub fn legendre(&self, v: &[f64]) -> Result<Vec<f64>> {
        let f = self.eval(v);
        Ok(self.gradient(v)?.into_iter().map(|g| f * g).collect())
    }

    /// Dual norm `F*(ξ) = max_{F(u)=1} ξ·u`.
    pub fn dual(&self, xi: &[f64]) -> Result<DualValue> {
        dual_norm(self.dim, &*self.eval, xi, None)
    }

    /// Smallest eigenvalue of the Hessian of `½F²` over the given unit
    /// directions. Positive values certify strong convexity on the sample.
    pub fn strong_convexity(&self, directions: &[Vec<f64>]) -> Result<f64> {
        let mut worst = f64::INFINITY;
        let h = 1e-4;
        let q = |v: &[f64]| 0.5 * self.eval(v).powi(2);
        for u in directions {
            let d = u.len();
            let mut hess = vec![vec![0.0; d]; d];
            for i in 0..d {
                for j in 0..d {
                    let mut w = u.clone();
                    let mut val = 0.0;
                    for (si, sj, sign) in [(1.0, 1.0, 1.0), (1.0, -1.0, -1.0), (-1.0, 1.0, -1.0), (-1.0, -1.0, 1.0)] {
                        w.copy_from_slice(u);
                        w[i] += si * h;
                        w[j] += sj * h;
                        val += sign * q(&w);
                    }
                    hess[i][j] = val / (4.0 * h * h);
                }
            }
            let min = if d == 2 {
                let m = Matrix2::new(hess[0][0], hess[0][1], hess[1][0], hess[1][1]);
                SymmetricEigen::new(m).eigenvalues.min()
            } else {
                let m = Matrix3::from_fn(|i, j| hess[i][j]);
                SymmetricEigen::new(m).eigenvalues.min()
            };
            worst = worst.min(check_finite(min, "Hessian eigenvalue")?);
        }
        Ok(worst)
    }
}

fn norm_slice(v: &[f64]) -> f64 {
    norm(v)
}

/// Dual norm of the fiber `f` on R^dim at the covector `xi`.
///
/// In the plane the maximizer of `ξ·u / F(u)` is searched over the half
/// circle `u·ξ > 0`, parametrized from `ξ/|ξ|`: 24 scan points followed by
/// Brent refinement. A `hint` angle restricts the search to a window of
/// ±0.15 rad and falls back to the full scan when the maximum lands on the
/// window edge.
pub fn dual_norm(dim: usize, f: &dyn Fn(&[f64]) -> f64, xi: &[f64], hint: Option<f64>) -> Result<DualValue> {
    check_dim(dim)?;
    if xi.len() != dim {
        return Err(FinslerError::DimensionMismatch {
            expected: dim,
            found: xi.len(),
        });
    }
    let r = norm(xi);
    if r == 0.0 {
        return Ok(DualValue {
            value: 0.0,
            argmax: vec![0.0; dim],
            gap: 0.0,
        });
    }
    if dim == 2 {
        let (s, _) = dual_norm_planar(f, xi, hint)?;
        return Ok(s);
    }
    dual_norm_spatial(f, xi)
}

/// Planar dual norm; also returns the maximizing angle relative to `ξ/|ξ|`.
pub fn dual_norm_planar(
    f: &dyn Fn(&[f64]) -> f64,
    xi: &[f64],
    hint: Option<f64>,
) -> Result<(DualValue, f64)> {
    let r = norm(xi);
    let e1 = [xi[0] / r, xi[1] / r];
    let e2 = [-e1[1], e1[0]];
    let u_at = |t: f64| [t.cos() * e1[0] + t.sin() * e2[0], t.cos() * e1[1] + t.sin() * e2[1]];
    let g = |t: f64| {
        let u = u_at(t);
        r * t.cos() / f(&u)
    };
    let half = 0.5 * PI - 1e-9;
    let tol = 1e-12;
    let mut res = None;
    if let Some(t0) = hint {
        let w = 0.15;
        let (a, b) = ((t0 - w).max(-half), (t0 + w).min(half));
        let m = brent_maximize(g, a, b, tol, 100);
        if m.converged && m.x - a > 1e-6 && b - m.x > 1e-6 {
            res = Some(m);
        }
    }
    let m = match res {
        Some(m) => m,
        None => scan_and_refine(g, -half, half, 24, tol),
    };
    if !m.value.is_finite() {
        return Err(FinslerError::NonFinite("dual norm".into()));
    }
    if !m.converged {
        return Err(FinslerError::DualNonConvergence {
            best: m.value,
            gap: gap_estimate(&g, m.x, m.bracket),
        });
    }
    let u = u_at(m.x);
    let fu = f(&u);
    Ok((
        DualValue {
            value: m.value,
            argmax: vec![u[0] / fu, u[1] / fu],
            gap: gap_estimate(&g, m.x, m.bracket),
        },
        m.x,
    ))
}

fn gap_estimate(g: &dyn Fn(f64) -> f64, x: f64, bracket: f64) -> f64 {
    let h = 1e-4;
    let curv = ((g(x + h) - 2.0 * g(x) + g(x - h)) / (h * h)).abs();
    0.5 * curv * (0.5 * bracket).powi(2)
}

fn dual_norm_spatial(f: &dyn Fn(&[f64]) -> f64, xi: &[f64]) -> Result<DualValue> {
    use crate::numerics::vector::{normalize3, tangent_frame};
    let grid = DirectionGrid::cached(3, 2)?;
    let r = norm(xi);
    let g = |u: &[f64]| dot(xi, u) / f(u);
    let mut best = (f64::NEG_INFINITY, [0.0; 3]);
    for i in 0..grid.len() {
        let u = grid.node3(i);
        if dot(&u, xi) > 0.0 {
            let v = g(&u);
            if v > best.0 {
                best = (v, u);
            }
        }
    }
    // alternating line searches along two great circles through the iterate
    let mut u = best.1;
    let mut val = best.0;
    let mut window = 0.2;
    let mut converged = false;
    for _ in 0..60 {
        let (t1, t2) = tangent_frame(&u);
        let before = val;
        for t in [t1, t2] {
            let along = |s: f64| {
                let p = normalize3(&[u[0] + s * t[0], u[1] + s * t[1], u[2] + s * t[2]]);
                g(&p)
            };
            let m = brent_maximize(along, -window, window, 1e-12, 100);
            if m.value > val {
                u = normalize3(&[u[0] + m.x * t[0], u[1] + m.x * t[1], u[2] + m.x * t[2]]);
                val = m.value;
            }
        }
        if val - before <= 1e-15 * r.max(1.0) && window < 1e-3 {
            converged = true;
            break;
        }
        window = (window * 0.5).max(1e-4);
    }
    if !converged {
        return Err(FinslerError::DualNonConvergence { best: val, gap: window * window * r });
    }
    let fu = f(&u);
    Ok(DualValue {
        value: val,
        argmax: vec![u[0] / fu, u[1] / fu, u[2] / fu],
        gap: 1e-15 * r,
    })
}

/// Weighted least-squares fit `f(u) ≈ β·u` over unit directions.
pub fn linear_fit_residual(directions: &[Vec<f64>], weights: &[f64], values: &[f64]) -> Result<LinearFit> {
    if directions.is_empty() || directions.len() != values.len() || weights.len() != values.len() {
        return Err(FinslerError::DimensionMismatch {
            expected: directions.len(),
            found: values.len(),
        });
    }
    let d = directions[0].len();
    let mut a = nalgebra::DMatrix::<f64>::zeros(d, d);
    let mut b = nalgebra::DVector::<f64>::zeros(d);
    for ((u, w), f) in directions.iter().zip(weights).zip(values) {
        for i in 0..d {
            b[i] += w * f * u[i];
            for j in 0..d {
                a[(i, j)] += w * u[i] * u[j];
            }
        }
    }
    let beta = a
        .lu()
        .solve(&b)
        .ok_or_else(|| FinslerError::Degenerate("directions do not span the space".into()))?;
    let beta: Vec<f64> = beta.iter().cloned().collect();
    let (mut ss, mut sw, mut max) = (0.0, 0.0, 0.0f64);
    for ((u, w), f) in directions.iter().zip(weights).zip(values) {
        let r = f - dot(&beta, u);
        ss += w * r * r;
        sw += w;
        max = max.max(r.abs());
    }
    Ok(LinearFit {
        beta,
        residual: (ss / sw).sqrt(),
        max_deviation: max,
    })
}

/// Fit of the odd part of a planar fiber over `k` equally spaced directions.
pub fn odd_part_fit_planar(f: &dyn Fn(&[f64]) -> f64, k: usize) -> Result<LinearFit> {
    let dirs: Vec<Vec<f64>> = (0..k)
        .map(|j| {
            let t = 2.0 * PI * j as f64 / k as f64;
            vec![t.cos(), t.sin()]
        })
        .collect();
    let values: Vec<f64> = dirs
        .iter()
        .map(|u| 0.5 * (f(u) - f(&[-u[0], -u[1]])))
        .collect();
    linear_fit_residual(&dirs, &vec![1.0; k], &values)
}
