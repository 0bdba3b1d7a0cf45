//! One-dimensional rules: Gauss-Legendre, periodic trapezoid, adaptive
//! Simpson, and central differences.

use std::f64::consts::PI;

use super::summation::CompensatedSum;
use super::vector::{axpy3, dot3, norm3, normalize3, tangent_frame, Vec3};
use crate::error::{check_finite, FinslerError, Result};

/// Gauss-Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Rule with `n` nodes, computed by Newton iteration on `P_n`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(x, w)| (c + h * x, h * w))
    }

    /// `∫_a^b f`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let mut s = CompensatedSum::new();
        for (t, w) in self.mapped(a, b) {
            s.add(w * f(t));
        }
        s.value()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Periodic trapezoid rule `Σ (2π/k) f(θ_j)` with `θ_j = 2πj/k`.
pub fn integrate_circle<F: FnMut(f64) -> f64>(k: usize, mut f: F) -> Result<f64> {
    if k == 0 {
        return Err(FinslerError::InvalidArgument("k must be positive".into()));
    }
    let h = 2.0 * PI / k as f64;
    let mut s = CompensatedSum::new();
    for j in 0..k {
        let v = check_finite(f(h * j as f64), "circle integrand")?;
        s.add(h * v);
    }
    Ok(s.value())
}

/// Integral over the great circle `{p ∈ S² : p·x = 0}` with respect to arc
/// length, by the `k`-point trapezoid rule. The circle is parametrized as
/// `cos θ e1 + sin θ e2` in the tangent frame of `x`.
pub fn integrate_circle_on_sphere<F>(x: &Vec3, k: usize, mut f: F) -> Result<f64>
where
    F: FnMut(&Vec3) -> f64,
{
    let n = norm3(x);
    if !(n > 0.0) || !n.is_finite() {
        return Err(FinslerError::InvalidArgument(
            "great-circle pole must be a nonzero finite vector".into(),
        ));
    }
    let (e1, e2) = tangent_frame(&normalize3(x));
    integrate_circle(k, |t| {
        let p = axpy3(&[0.0; 3], t.cos(), &e1);
        let p = axpy3(&p, t.sin(), &e2);
        f(&p)
    })
}

/// Central-difference derivative of `g` at `v` in direction `w`.
///
/// The default step is `1e-6 · max(1, |v|)`.
pub fn directional_derivative<G>(g: G, v: &[f64], w: &[f64], h: Option<f64>) -> Result<f64>
where
    G: Fn(&[f64]) -> f64,
{
    if v.len() != w.len() {
        return Err(FinslerError::DimensionMismatch {
            expected: v.len(),
            found: w.len(),
        });
    }
    let scale = v.iter().map(|x| x * x).sum::<f64>().sqrt().max(1.0);
    let h = h.unwrap_or(1e-6 * scale);
    let plus: Vec<f64> = v.iter().zip(w).map(|(a, b)| a + h * b).collect();
    let minus: Vec<f64> = v.iter().zip(w).map(|(a, b)| a - h * b).collect();
    let d = (g(&plus) - g(&minus)) / (2.0 * h);
    check_finite(d, "directional derivative")
}

/// Adaptive Simpson quadrature to absolute tolerance `tol`.
pub fn adaptive_simpson<F: FnMut(f64) -> f64>(a: f64, b: f64, tol: f64, mut f: F) -> f64 {
    fn step<F: FnMut(f64) -> f64>(
        f: &mut F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
                + step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(&mut f, a, b, fa, fm, fb, whole, tol, 40)
}

/// Whether `x` is a unit vector to within `tol`.
pub fn is_unit(x: &Vec3, tol: f64) -> bool {
    (dot3(x, x).sqrt() - 1.0).abs() <= tol
}
