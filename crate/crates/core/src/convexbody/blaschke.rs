//! Minkowski's problem for polytopes and the Blaschke body.
//!
//! Given normals `u_j` and target facet areas `a_j` with `Σ a_j u_j = 0`, the
//! polytope `P(h) = {x : u_j·x ≤ h_j}` with facet areas proportional to `a_j`
//! minimizes the convex function
//!
//! `Φ(h) = Σ a_j h_j − β log V(h)`
//!
//! whose gradient is `a_j − β A_j(h)/V(h)`. The Hessian of `V` is assembled
//! from ridge lengths (`∂A_i/∂h_j = ℓ_ij / sin θ_ij`), which gives damped
//! Newton steps with an Armijo line search.

use nalgebra::{DMatrix, DVector};

use super::polytope::Polytope;
use super::ConvexBody;
use crate::error::{FinslerError, Result};
use crate::numerics::vector::{dot3, normalize3, norm3, scale3, to3, Vec3};

/// Discrete surface area measure to be realized by a polytope.
#[derive(Debug, Clone)]
pub struct MinkowskiProblem {
    pub dim: usize,
    pub normals: Vec<Vec3>,
    pub areas: Vec<f64>,
}

#[derive(Debug, Clone, Copy)]
pub struct MinkowskiOptions {
    /// Target for `max_j |Â_j − â_j| / â_j` on normalized areas.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for MinkowskiOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-4,
            max_iterations: 5000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct MinkowskiSolution {
    /// Solution centred at its Steiner point.
    pub polytope: Polytope,
    pub support: Vec<f64>,
    pub areas: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
    pub history: Vec<f64>,
}

impl MinkowskiProblem {
    pub fn new(dim: usize, normals: &[Vec<f64>], areas: &[f64]) -> Result<Self> {
        crate::error::check_dim(dim)?;
        if normals.len() != areas.len() {
            return Err(FinslerError::DimensionMismatch {
                expected: normals.len(),
                found: areas.len(),
            });
        }
        let mut n = Vec::with_capacity(normals.len());
        for u in normals {
            if u.len() != dim {
                return Err(FinslerError::DimensionMismatch {
                    expected: dim,
                    found: u.len(),
                });
            }
            let u3 = to3(u);
            if !(norm3(&u3) > 0.0) {
                return Err(FinslerError::InvalidArgument("zero normal".into()));
            }
            n.push(normalize3(&u3));
        }
        if areas.iter().any(|a| !(*a >= 0.0) || !a.is_finite()) {
            return Err(FinslerError::InvalidArgument("areas must be finite and nonnegative".into()));
        }
        Ok(Self {
            dim,
            normals: n,
            areas: areas.to_vec(),
        })
    }

    /// `|Σ a_j u_j| / Σ a_j`.
    pub fn closure_defect(&self) -> f64 {
        let mut s = [0.0; 3];
        for (u, a) in self.normals.iter().zip(&self.areas) {
            for k in 0..3 {
                s[k] += a * u[k];
            }
        }
        norm3(&s) / self.areas.iter().sum::<f64>()
    }
}

struct State {
    h: Vec<f64>,
    areas: Vec<f64>,
    volume: f64,
    ridges: Vec<(usize, usize, f64)>,
    polytope: Polytope,
}

fn evaluate(dim: usize, normals: &[Vec3], h: &[f64]) -> Result<State> {
    let hp = Polytope::from_halfspaces(dim, normals, h)?;
    let volume = hp.polytope.volume();
    if !(volume > 0.0) {
        return Err(FinslerError::Degenerate("empty polytope".into()));
    }
    Ok(State {
        h: h.to_vec(),
        areas: hp.areas,
        volume,
        ridges: hp.ridges,
        polytope: hp.polytope,
    })
}

/// Recentres `h` so the vertex centroid sits at the origin.
fn recentre(normals: &[Vec3], state: &State) -> Vec<f64> {
    let c = state.polytope.vertex_centroid();
    normals
        .iter()
        .zip(&state.h)
        .map(|(u, h)| h - dot3(u, &c))
        .collect()
}

/// Solves the discrete Minkowski problem.
pub fn solve_minkowski_problem(
    problem: &MinkowskiProblem,
    opts: &MinkowskiOptions,
) -> Result<MinkowskiSolution> {
    let dim = problem.dim;
    let m = problem.normals.len();
    let total: f64 = problem.areas.iter().sum();
    if !(total > 0.0) {
        return Err(FinslerError::Degenerate("zero total area".into()));
    }
    let defect = problem.closure_defect();
    if defect > 1e-6 {
        return Err(FinslerError::InvalidArgument(format!(
            "area measure is not closed (|Σ a u| / Σ a = {defect:.3e})"
        )));
    }
    let normals = &problem.normals;
    let a: Vec<f64> = problem.areas.iter().map(|x| x / total).collect();
    let beta = 1.0 / dim as f64;
    let objective = |s: &State| -> f64 {
        s.h.iter().zip(&a).map(|(h, a)| h * a).sum::<f64>() - beta * s.volume.ln()
    };
    let residual = |s: &State| -> f64 {
        let sum: f64 = s.areas.iter().sum();
        a.iter()
            .zip(&s.areas)
            .filter(|(t, _)| **t > 0.0)
            .map(|(t, got)| (got / sum - t).abs() / t)
            .fold(0.0, f64::max)
    };

    let mut state = evaluate(dim, normals, &vec![1.0; m])?;
    let mut history = Vec::new();
    let mut iterations = 0;
    loop {
        let r = residual(&state);
        history.push(r);
        if r < opts.tolerance {
            break;
        }
        if iterations >= opts.max_iterations {
            return Err(FinslerError::NonConvergence {
                solver: "Minkowski problem".into(),
                iterations,
                residual: r,
                history,
            });
        }
        iterations += 1;

        let v = state.volume;
        let grad: Vec<f64> = (0..m).map(|j| a[j] - beta * state.areas[j] / v).collect();

        // Hessian of Φ: β (A Aᵀ / V² − ∇²V / V)
        let mut hv = DMatrix::<f64>::zeros(m, m);
        for &(i, j, len) in &state.ridges {
            let c = dot3(&normals[i], &normals[j]).clamp(-1.0, 1.0);
            let s = (1.0 - c * c).sqrt().max(1e-300);
            hv[(i, j)] += len / s;
            hv[(j, i)] += len / s;
            hv[(i, i)] -= len * c / s;
            hv[(j, j)] -= len * c / s;
        }
        let mut hess = DMatrix::<f64>::zeros(m, m);
        for i in 0..m {
            for j in 0..m {
                hess[(i, j)] = beta
                    * (state.areas[i] * state.areas[j] / (v * v) - hv[(i, j)] / v);
            }
        }
        let diag_max = (0..m).map(|i| hess[(i, i)]).fold(0.0, f64::max).max(1e-300);
        for i in 0..m {
            if hess[(i, i)] < 1e-9 * diag_max {
                // constraint without a facet: curvature from its neighbours is
                // unknown, use the typical scale
                hess[(i, i)] = diag_max;
            }
            hess[(i, i)] += 1e-10 * diag_max;
        }
        let g = DVector::from_vec(grad.clone());
        let mut dir = match hess.clone().cholesky() {
            Some(ch) => -ch.solve(&g),
            None => -g.clone() / diag_max,
        };
        let mut slope = g.dot(&dir);
        if !(slope < 0.0) {
            dir = -g.clone() / diag_max;
            slope = g.dot(&dir);
        }

        let f0 = objective(&state);
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let trial: Vec<f64> = (0..m).map(|j| state.h[j] + t * dir[j]).collect();
            if trial.iter().all(|x| *x > 0.0) {
                if let Ok(s) = evaluate(dim, normals, &trial) {
                    if objective(&s) <= f0 + 1e-4 * t * slope {
                        accepted = Some(s);
                        break;
                    }
                }
            }
            t *= 0.5;
        }
        let next = match accepted {
            Some(s) => s,
            None => {
                return Err(FinslerError::NonConvergence {
                    solver: "Minkowski problem (line search)".into(),
                    iterations,
                    residual: residual(&state),
                    history,
                })
            }
        };
        let centred = recentre(normals, &next);
        state = if centred.iter().all(|x| *x > 0.0) {
            evaluate(dim, normals, &centred)?
        } else {
            next
        };
    }

    // rescale to the requested total area and centre at the Steiner point
    let sum: f64 = state.areas.iter().sum();
    let t = (total / sum).powf(1.0 / (dim as f64 - 1.0));
    let h: Vec<f64> = state.h.iter().map(|x| x * t).collect();
    let scaled = evaluate(dim, normals, &h)?;
    let s = scaled.polytope.steiner_point();
    let h: Vec<f64> = normals.iter().zip(&h).map(|(u, h)| h - dot3(u, &s)).collect();
    let fin = evaluate(dim, normals, &h)?;
    let res = residual(&fin);
    Ok(MinkowskiSolution {
        polytope: fin.polytope,
        support: h,
        areas: fin.areas,
        iterations,
        residual: res,
        history,
    })
}

/// Angular tolerance for pairing antipodal facet normals.
const ANTIPODAL_TOL: f64 = 1e-6;

/// Blaschke body `∇K`: the centred body whose surface area measure is the
/// even part of that of `K`. In the plane this is the central symmetral.
pub fn blaschke_body(body: &ConvexBody) -> Result<ConvexBody> {
    blaschke_body_with_options(body, &MinkowskiOptions::default()).map(|(b, _)| b)
}

/// Blaschke body with solver diagnostics (`None` in the plane).
pub fn blaschke_body_with_options(
    body: &ConvexBody,
    opts: &MinkowskiOptions,
) -> Result<(ConvexBody, Option<MinkowskiSolution>)> {
    if body.dim() == 2 {
        return Ok((body.central_symmetral()?, None));
    }
    let p = body.to_polytope(None)?;
    let cos_tol = ANTIPODAL_TOL.cos();
    let mut classes: Vec<(Vec3, f64)> = Vec::new();
    for f in p.facets() {
        if f.area <= 0.0 {
            continue;
        }
        match classes.iter_mut().find(|(r, _)| dot3(r, &f.normal).abs() > cos_tol) {
            Some((_, a)) => *a += f.area,
            None => classes.push((f.normal, f.area)),
        }
    }
    let mut normals = Vec::with_capacity(2 * classes.len());
    let mut areas = Vec::with_capacity(2 * classes.len());
    for (r, a) in &classes {
        normals.push(r[..3].to_vec());
        areas.push(0.5 * a);
        normals.push(scale3(-1.0, r).to_vec());
        areas.push(0.5 * a);
    }
    let problem = MinkowskiProblem::new(3, &normals, &areas)?;
    let sol = solve_minkowski_problem(&problem, opts)?;
    Ok((ConvexBody::Polytope(sol.polytope.clone()), Some(sol)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cube_areas_give_cube() {
        let normals: Vec<Vec<f64>> = vec![
            vec![1.0, 0.0, 0.0],
            vec![-1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, -1.0, 0.0],
            vec![0.0, 0.0, 1.0],
            vec![0.0, 0.0, -1.0],
        ];
        let areas = [4.0, 4.0, 1.0, 1.0, 4.0, 4.0];
        let sol = solve_minkowski_problem(
            &MinkowskiProblem::new(3, &normals, &areas).unwrap(),
            &MinkowskiOptions::default(),
        )
        .unwrap();
        // sides satisfy ly·lz = 4, lx·lz = 1, lx·ly = 4, so V = √(4·1·4)
        assert!((sol.polytope.volume() - 4.0).abs() < 1e-3);
        assert!(sol.residual < 1e-4);
        assert!(sol.iterations > 0);
    }

    #[test]
    fn open_measure_is_rejected() {
        let normals = vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![-1.0, 0.0]];
        let p = MinkowskiProblem::new(2, &normals, &[1.0, 1.0, 1.0]).unwrap();
        assert!(solve_minkowski_problem(&p, &MinkowskiOptions::default()).is_err());
    }

    #[test]
    fn triangle_from_edge_lengths() {
        let normals: Vec<Vec<f64>> = (0..3)
            .map(|k| {
                let t = std::f64::consts::PI * (0.5 + 2.0 * k as f64 / 3.0);
                vec![t.cos(), t.sin()]
            })
            .collect();
        let p = MinkowskiProblem::new(2, &normals, &[1.0, 1.0, 1.0]).unwrap();
        let sol = solve_minkowski_problem(&p, &MinkowskiOptions::default()).unwrap();
        assert!((sol.polytope.volume() - 3f64.sqrt() / 4.0).abs() < 1e-4);
        let s = sol.polytope.steiner_point();
        assert!(s[0].abs() < 1e-9 && s[1].abs() < 1e-9);
    }
}
