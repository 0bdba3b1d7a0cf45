//! Hamiltonian geodesic flow `H = ½ F*(x, ξ)²` with an embedded 5(4)
//! Runge–Kutta pair.
//!
//! On S² the state is `(y, η) ∈ R³ × R³` and the Hamiltonian is extended by
//! `H̃(y, η) = ½ F*(ŷ, |y| P_ŷ η)²`, which is invariant under the cotangent
//! lift of dilations. Its flow preserves `y·η` and reduces to the flow on
//! `T*S²`; after each step the state is moved back to `|y| = 1`, `y·η = 0`
//! along the dilation orbit.

use crate::error::{FinslerError, Result};
use crate::metricfield::{DualFiber, MetricField};
use crate::numerics::vector::{dot3, norm3, normalize3, scale3, tangent_frame, tangential, to3, Vec3};

#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    pub initial_step: f64,
    pub max_step: f64,
    /// Use this constant step (no error control) instead of adaptivity.
    pub fixed_step: Option<f64>,
    /// Chart trajectories stop this close to the domain boundary.
    pub boundary_guard: f64,
}

impl Default for GeodesicOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-9,
            atol: 1e-12,
            max_steps: 200_000,
            initial_step: 1e-2,
            max_step: 0.05,
            fixed_step: None,
            boundary_guard: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectorySample {
    /// Arclength.
    pub t: f64,
    pub x: Vec3,
    pub xi: Vec3,
    /// Unit velocity `ẋ`.
    pub v: Vec3,
    /// `H(x, ξ)`.
    pub energy: f64,
}

/// Integrated geodesic.
#[derive(Debug, Clone)]
pub struct GeodesicTrajectory {
    pub samples: Vec<TrajectorySample>,
    pub on_sphere: bool,
    pub ambient_dim: usize,
    pub steps: usize,
    pub rejected: usize,
    pub max_local_error: f64,
    /// True when a chart trajectory stopped at the boundary guard.
    pub boundary_hit: bool,
}

type State = [f64; 6];

struct Hamiltonian<'a> {
    field: &'a MetricField,
    hint: Option<f64>,
}

impl<'a> Hamiltonian<'a> {
    fn dual(&mut self, x: &Vec3, xi: &Vec3) -> Result<DualFiber> {
        let d = self.field.dual(x, xi, self.hint)?;
        if d.angle.is_some() {
            self.hint = d.angle;
        }
        Ok(d)
    }

    fn rhs(&mut self, s: &State) -> Result<State> {
        let f = self.field;
        let y = [s[0], s[1], s[2]];
        let eta = [s[3], s[4], s[5]];
        if f.is_sphere() {
            let r = norm3(&y);
            let x = scale3(1.0 / r, &y);
            let zeta = scale3(r, &tangential(&x, &eta));
            let d = self.dual(&x, &zeta)?;
            let fs = d.value;
            let u = d.argmax;
            let xe = dot3(&x, &eta);
            let mut dy = [0.0; 6];
            for k in 0..3 {
                dy[k] = fs * r * u[k];
                // radial part of ∂H̃/∂y is 2H̃/|y|
                dy[3 + k] = -fs * fs / r * x[k];
            }
            let (e1, e2) = tangent_frame(&x);
            for e in [e1, e2] {
                let dual_dw = f.dual_base_derivative(&x, &zeta, &d, &e);
                let g = fs * (-xe * dot3(&u, &e) + dual_dw / r);
                for k in 0..3 {
                    dy[3 + k] -= g * e[k];
                }
            }
            Ok(dy)
        } else {
            if !f.contains(&y) {
                return Err(FinslerError::OutsideDomain(y[..f.ambient_dim()].to_vec()));
            }
            let d = self.dual(&y, &eta)?;
            let fs = d.value;
            let mut dy = [0.0; 6];
            for k in 0..3 {
                dy[k] = fs * d.argmax[k];
            }
            for e in f.frame(&y) {
                let g = fs * f.dual_base_derivative(&y, &eta, &d, &e);
                for k in 0..3 {
                    dy[3 + k] -= g * e[k];
                }
            }
            Ok(dy)
        }
    }
}

// Dormand–Prince coefficients
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

fn dp_step(ham: &mut Hamiltonian, y: &State, k1: &State, h: f64) -> Result<(State, State)> {
    let mut k = [[0.0; 6]; 7];
    k[0] = *k1;
    for i in 1..7 {
        let mut yi = *y;
        for (j, kj) in k.iter().enumerate().take(i) {
            let a = A[i][j];
            if a != 0.0 {
                for c in 0..6 {
                    yi[c] += h * a * kj[c];
                }
            }
        }
        k[i] = ham.rhs(&yi)?;
    }
    let mut y5 = *y;
    let mut err = [0.0; 6];
    for c in 0..6 {
        let mut s5 = 0.0;
        let mut s4 = 0.0;
        for i in 0..7 {
            s5 += B5[i] * k[i][c];
            s4 += B4[i] * k[i][c];
        }
        y5[c] += h * s5;
        err[c] = h * (s5 - s4);
    }
    Ok((y5, err))
}

fn project(field: &MetricField, s: &State) -> State {
    if !field.is_sphere() {
        return *s;
    }
    let y = [s[0], s[1], s[2]];
    let r = norm3(&y);
    let x = scale3(1.0 / r, &y);
    let eta = scale3(r, &tangential(&x, &[s[3], s[4], s[5]]));
    [x[0], x[1], x[2], eta[0], eta[1], eta[2]]
}

fn sample(ham: &mut Hamiltonian, t: f64, s: &State, ds: &State) -> Result<TrajectorySample> {
    let x = [s[0], s[1], s[2]];
    let xi = [s[3], s[4], s[5]];
    let d = ham.dual(&x, &xi)?;
    Ok(TrajectorySample {
        t,
        x,
        xi,
        v: [ds[0], ds[1], ds[2]],
        energy: 0.5 * d.value * d.value,
    })
}

/// Hamiltonian vector field `(ẋ, ξ̇)` at a phase-space state.
pub fn hamiltonian_vector(field: &MetricField, state: &[f64; 6]) -> Result<[f64; 6]> {
    Hamiltonian { field, hint: None }.rhs(&project(field, state))
}

/// Unit-speed initial covector `ξ₀ = ∇_v F(x₀, v₀/F(x₀, v₀))`.
pub fn initial_state(field: &MetricField, x0: &[f64], v0: &[f64]) -> Result<(Vec3, Vec3, Vec3)> {
    let n = field.ambient_dim();
    if x0.len() != n || v0.len() != n {
        return Err(FinslerError::DimensionMismatch {
            expected: n,
            found: x0.len().min(v0.len()),
        });
    }
    let mut x = to3(x0);
    let mut v = to3(v0);
    if field.is_sphere() {
        if !(norm3(&x) > 0.0) {
            return Err(FinslerError::InvalidArgument("zero base point".into()));
        }
        x = normalize3(&x);
        v = tangential(&x, &v);
    }
    if !field.contains(&x) {
        return Err(FinslerError::OutsideDomain(x0.to_vec()));
    }
    let speed = field.eval(&x, &v);
    if !(speed > 0.0) || !speed.is_finite() {
        return Err(FinslerError::InvalidArgument(format!("initial velocity has F = {speed}")));
    }
    v = scale3(1.0 / speed, &v);
    let xi = field.fiber_gradient(&x, &v);
    Ok((x, v, xi))
}

/// Traces the unit-speed geodesic from `(x0, v0)` for arclength `t_end`.
pub fn geodesic_trace(
    field: &MetricField,
    x0: &[f64],
    v0: &[f64],
    t_end: f64,
    opts: &GeodesicOptions,
) -> Result<GeodesicTrajectory> {
    if !(t_end >= 0.0) || !t_end.is_finite() {
        return Err(FinslerError::InvalidArgument(format!("arclength {t_end}")));
    }
    let (x, _, xi) = initial_state(field, x0, v0)?;
    let fiber = field.fiber_norm(&x)?;
    let dirs: Vec<Vec<f64>> = (0..16)
        .map(|j| {
            let t = std::f64::consts::PI * j as f64 / 8.0;
            let mut u = vec![0.0; fiber.dim()];
            u[0] = t.cos();
            u[1] = t.sin();
            u
        })
        .collect();
    let convexity = fiber.strong_convexity(&dirs)?;
    if !(convexity > 0.0) {
        return Err(FinslerError::InvalidArgument(format!(
            "fiber at the initial point is not strongly convex (min Hessian eigenvalue {convexity:.3e})"
        )));
    }
    integrate(field, [x[0], x[1], x[2], xi[0], xi[1], xi[2]], t_end, opts)
}

/// Integrates from a phase-space state `(x, ξ)`.
pub fn integrate(field: &MetricField, start: [f64; 6], t_end: f64, opts: &GeodesicOptions) -> Result<GeodesicTrajectory> {
    let mut ham = Hamiltonian { field, hint: None };
    let mut y = project(field, &start);
    let mut k1 = ham.rhs(&y)?;
    let mut t = 0.0;
    let mut samples = vec![sample(&mut ham, t, &y, &k1)?];
    let mut h = opts.fixed_step.unwrap_or(opts.initial_step).min(opts.max_step).min(t_end.max(1e-300));
    let mut steps = 0;
    let mut rejected = 0;
    let mut max_err: f64 = 0.0;
    let mut boundary_hit = false;
    while t < t_end - 1e-14 * t_end.max(1.0) {
        if steps + rejected >= opts.max_steps {
            return Err(FinslerError::NonConvergence {
                solver: "geodesic integrator".into(),
                iterations: steps + rejected,
                residual: t_end - t,
                history: vec![],
            });
        }
        let h_try = h.min(t_end - t);
        let result = dp_step(&mut ham, &y, &k1, h_try);
        let (y_new, err) = match result {
            Ok(v) => v,
            Err(FinslerError::OutsideDomain(_)) if !field.is_sphere() => {
                rejected += 1;
                h = 0.5 * h_try;
                if h < 1e-14 {
                    boundary_hit = true;
                    break;
                }
                continue;
            }
            Err(e) => return Err(e),
        };
        let err_norm = if opts.fixed_step.is_some() {
            0.0
        } else {
            (0..6)
                .map(|c| err[c].abs() / (opts.atol + opts.rtol * y[c].abs().max(y_new[c].abs())))
                .fold(0.0, f64::max)
        };
        if err_norm <= 1.0 || opts.fixed_step.is_some() {
            let candidate = project(field, &y_new);
            if !field.is_sphere() && field.boundary_distance(&[candidate[0], candidate[1], candidate[2]]) < opts.boundary_guard {
                if h_try > 1e-12 && opts.fixed_step.is_none() {
                    rejected += 1;
                    h = 0.5 * h_try;
                    continue;
                }
                boundary_hit = true;
                break;
            }
            t += h_try;
            y = candidate;
            steps += 1;
            max_err = max_err.max(err_norm * opts.rtol);
            k1 = match ham.rhs(&y) {
                Ok(k) => k,
                Err(FinslerError::OutsideDomain(_)) => {
                    boundary_hit = true;
                    break;
                }
                Err(e) => return Err(e),
            };
            samples.push(sample(&mut ham, t, &y, &k1)?);
            if opts.fixed_step.is_none() {
                let factor = if err_norm == 0.0 { 5.0 } else { (0.9 * err_norm.powf(-0.2)).clamp(0.2, 5.0) };
                h = (h_try * factor).min(opts.max_step);
            }
        } else {
            rejected += 1;
            h = h_try * (0.9 * err_norm.powf(-0.2)).clamp(0.1, 0.5);
        }
        if field.boundary_distance(&[y[0], y[1], y[2]]) < opts.boundary_guard {
            boundary_hit = true;
            break;
        }
    }
    Ok(GeodesicTrajectory {
        samples,
        on_sphere: field.is_sphere(),
        ambient_dim: field.ambient_dim(),
        steps,
        rejected,
        max_local_error: max_err,
        boundary_hit,
    })
}

impl GeodesicTrajectory {
    pub fn last(&self) -> &TrajectorySample {
        self.samples.last().expect("trajectory has a start sample")
    }

    pub fn duration(&self) -> f64 {
        self.last().t
    }

    /// `max |H − H₀| / H₀`.
    pub fn energy_drift(&self) -> f64 {
        let h0 = self.samples[0].energy;
        self.samples
            .iter()
            .map(|s| (s.energy - h0).abs() / h0)
            .fold(0.0, f64::max)
    }

    /// `max |F(x_t, v_t) − 1|`.
    pub fn speed_defect(&self, field: &MetricField) -> f64 {
        self.samples
            .iter()
            .map(|s| (field.eval(&s.x, &s.v) - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// `max ||x_t| − 1|` (zero for chart trajectories).
    pub fn sphere_defect(&self) -> f64 {
        if !self.on_sphere {
            return 0.0;
        }
        self.samples
            .iter()
            .map(|s| (norm3(&s.x) - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Position at arclength `t` by cubic Hermite interpolation between
    /// steps (renormalized on S²).
    pub fn point_at(&self, t: f64) -> Vec3 {
        let s = &self.samples;
        if t <= s[0].t {
            return s[0].x;
        }
        if t >= self.duration() {
            return self.last().x;
        }
        let j = s.partition_point(|p| p.t <= t).max(1) - 1;
        let (a, b) = (&s[j], &s[j + 1]);
        let h = b.t - a.t;
        let u = (t - a.t) / h;
        let (h00, h10, h01, h11) = (
            2.0 * u * u * u - 3.0 * u * u + 1.0,
            u * u * u - 2.0 * u * u + u,
            -2.0 * u * u * u + 3.0 * u * u,
            u * u * u - u * u,
        );
        let mut p = [0.0; 3];
        for k in 0..3 {
            p[k] = h00 * a.x[k] + h10 * h * a.v[k] + h01 * b.x[k] + h11 * h * b.v[k];
        }
        if self.on_sphere {
            normalize3(&p)
        } else {
            p
        }
    }

    /// CSV with columns `t, x…, v…, H`.
    pub fn to_csv(&self) -> String {
        let n = self.ambient_dim;
        let names = ["1", "2", "3"];
        let mut out = String::from("t");
        for c in names.iter().take(n) {
            out.push_str(&format!(",x{c}"));
        }
        for c in names.iter().take(n) {
            out.push_str(&format!(",v{c}"));
        }
        out.push_str(",H\n");
        for s in &self.samples {
            out.push_str(&format!("{:.17e}", s.t));
            for k in 0..n {
                out.push_str(&format!(",{:.17e}", s.x[k]));
            }
            for k in 0..n {
                out.push_str(&format!(",{:.17e}", s.v[k]));
            }
            out.push_str(&format!(",{:.17e}\n", s.energy));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convexbody::ConvexBody;
    use crate::numerics::vector::cross;

    #[test]
    fn round_great_circle_closes() {
        let f = MetricField::round(1.0).unwrap();
        let x0 = normalize3(&[0.3, -0.2, 0.9]);
        let v0 = tangential(&x0, &[1.0, 0.4, 0.0]);
        let tr = geodesic_trace(&f, &x0, &v0, 2.0 * std::f64::consts::PI, &GeodesicOptions::default()).unwrap();
        let end = tr.last().x;
        let d = norm3(&[end[0] - x0[0], end[1] - x0[1], end[2] - x0[2]]);
        assert!(d < 1e-6, "{d}");
        assert!(tr.energy_drift() < 1e-7);
        assert!(tr.speed_defect(&f) < 1e-6);
        assert!(tr.sphere_defect() < 1e-9);
        let p0 = normalize3(&cross(&x0, &v0));
        for s in &tr.samples {
            assert!(dot3(&s.x, &p0).abs() < 1e-9);
        }
    }

    #[test]
    fn funk_geodesic_is_a_chord() {
        let f = MetricField::funk(ConvexBody::unit_ball(2));
        let x0 = [-0.5, 0.0];
        let v0 = [1.0, 0.3];
        let tr = geodesic_trace(&f, &x0, &v0, 2.0, &GeodesicOptions::default()).unwrap();
        let n = normalize3(&[-0.3, 1.0, 0.0]);
        let worst = tr
            .samples
            .iter()
            .map(|s| ((s.x[0] + 0.5) * n[0] + s.x[1] * n[1]).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-6, "{worst}");
        assert!(tr.energy_drift() < 1e-7);
    }

    #[test]
    fn euclidean_lines() {
        let f = MetricField::euclidean(2).unwrap();
        let tr = geodesic_trace(&f, &[0.0, 0.0], &[3.0, 4.0], 5.0, &GeodesicOptions::default()).unwrap();
        let e = tr.last().x;
        assert!((e[0] - 3.0).abs() < 1e-10 && (e[1] - 4.0).abs() < 1e-10);
        assert!(tr.to_csv().starts_with("t,x1,x2,v1,v2,H\n"));
    }
}
