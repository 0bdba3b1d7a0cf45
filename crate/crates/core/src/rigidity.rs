//! Rigidity checks: reversible-plus-closed splitting, potential recovery,
//! the Zoll volume identity, Holmes–Thompson density rigidity and the
//! width/brightness test for convex bodies.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::convexbody::{solve_minkowski_problem, ConvexBody, MinkowskiOptions, MinkowskiProblem, Polytope};
use crate::error::{FinslerError, Result};
use crate::geodesic::busemann_prime_length;
use crate::metricfield::{fit_odd_part, Curve, MetricField, OneForm, Region};
use crate::norms::linear_fit_residual;
use crate::numerics::vector::{cross, dot3, norm3, normalize3, scale3, sub3, tangent_frame, to3, Vec3};
use crate::numerics::{DirectionGrid, GaussLegendre};
use crate::report::{CheckReport, Verdict};

/// Directions used for the per-node odd-part fit.
pub const FIT_DIRECTIONS: usize = 64;
/// Side of the coordinate loops used to measure closedness.
pub const LOOP_SIDE: f64 = 1e-3;
/// Closedness residual below which a fitted form counts as closed.
pub const CLOSEDNESS_BUDGET: f64 = 1e-3;
/// Tolerance of the translate+dilate verdict.
pub const CHAKERIAN_TOL: f64 = 1e-5;
/// Relative tolerance of the Zoll volume identity.
pub const ZOLL_TOL: f64 = 1e-2;
/// Largest allowed distance of `V·2π/ℓ²` from an integer.
pub const ZOLL_INTEGER_TOL: f64 = 0.05;
/// Tolerance for equal lengths and volumes, Brunn–Minkowski excess and
/// linearity of `F₂ − F₁`.
pub const DENSITY_RIGIDITY_TOL: f64 = 1e-4;

/// Outcome of [`detect_reversible_plus_closed`].
#[derive(Debug, Clone)]
pub struct RevPlusClosed {
    /// `F − β`.
    pub reversible: MetricField,
    pub beta: OneForm,
    pub nodes: Vec<Vec3>,
    /// Fitted covector at each node.
    pub covectors: Vec<Vec3>,
    /// Largest deviation of the odd part from `β_x` at each node.
    pub linearity: Vec<f64>,
    pub max_linearity: f64,
    /// `max |∮β| / area` over small loops around the nodes.
    pub closedness: f64,
    pub report: CheckReport,
}

/// Splits `F = F_rev + β` by fitting a linear form to the odd part of every
/// fiber, and measures how far `β` is from closed.
pub fn detect_reversible_plus_closed(field: &MetricField, nodes: &[Vec3]) -> Result<RevPlusClosed> {
    if nodes.is_empty() {
        return Err(FinslerError::InvalidArgument("no base nodes".into()));
    }
    let beta = field.odd_part_form(FIT_DIRECTIONS);
    let reversible = field.add_one_form(&beta.scaled(-1.0))?;
    let mut covectors = Vec::with_capacity(nodes.len());
    let mut linearity = Vec::with_capacity(nodes.len());
    let mut closedness: f64 = 0.0;
    for x in nodes {
        let x = if field.is_sphere() { normalize3(x) } else { *x };
        if !field.contains(&x) {
            return Err(FinslerError::OutsideDomain(x[..field.ambient_dim()].to_vec()));
        }
        let (c, _, dev) = fit_odd_part(field, &x, FIT_DIRECTIONS)?;
        covectors.push(c);
        linearity.push(dev);
        if field.manifold_dim() == 2 {
            closedness = closedness.max(loop_residual(field, &beta, &x, LOOP_SIDE));
        } else {
            for (i, j) in [(0, 1), (0, 2), (1, 2)] {
                closedness = closedness.max(chart_loop_residual(&beta, &x, i, j, LOOP_SIDE));
            }
        }
    }
    let max_linearity = linearity.iter().cloned().fold(0.0, f64::max);
    let report = CheckReport::new("rev-plus-closed", &format!("{}|{:?}", field.describe(), nodes))
        .value("nodes", nodes.len() as f64)
        .residual("linearity", max_linearity, 1e-6)
        .residual("closedness", closedness, 1e-4)
        .judge();
    Ok(RevPlusClosed {
        reversible,
        beta,
        nodes: nodes.to_vec(),
        covectors,
        linearity,
        max_linearity,
        closedness,
        report,
    })
}

/// `|∮β| / area` around the square of side `h` centred at `x` in the
/// coordinates `normalize(x + s e₁ + t e₂)` (sphere) or `x + s e₁ + t e₂`.
fn loop_residual(field: &MetricField, beta: &OneForm, x: &Vec3, h: f64) -> f64 {
    let (e1, e2) = if field.is_sphere() {
        tangent_frame(x)
    } else {
        ([1.0, 0.0, 0.0], [0.0, 1.0, 0.0])
    };
    let sphere = field.is_sphere();
    let point = |s: f64, t: f64| -> (Vec3, Vec3, Vec3) {
        let y = [
            x[0] + s * e1[0] + t * e2[0],
            x[1] + s * e1[1] + t * e2[1],
            x[2] + s * e1[2] + t * e2[2],
        ];
        if !sphere {
            return (y, e1, e2);
        }
        let r = norm3(&y);
        let p = scale3(1.0 / r, &y);
        let d = |e: &Vec3| scale3(1.0 / r, &sub3(e, &scale3(dot3(&p, e), &p)));
        (p, d(&e1), d(&e2))
    };
    let gl = GaussLegendre::new(8);
    let a = 0.5 * h;
    let edge = |fixed: f64, along_s: bool| -> f64 {
        gl.integrate(-a, a, |u| {
            let (p, ds, dt) = if along_s { point(u, fixed) } else { point(fixed, u) };
            beta.eval(&p, if along_s { &ds } else { &dt })
        })
    };
    // counterclockwise: bottom, right, top (reversed), left (reversed)
    let circulation = edge(-a, true) + edge(a, false) - edge(a, true) - edge(-a, false);
    let area = gl.integrate(-a, a, |s| {
        gl.integrate(-a, a, |t| {
            let (_, ds, dt) = point(s, t);
            norm3(&cross(&ds, &dt))
        })
    });
    circulation.abs() / area
}

fn chart_loop_residual(beta: &OneForm, x: &Vec3, i: usize, j: usize, h: f64) -> f64 {
    let gl = GaussLegendre::new(8);
    let a = 0.5 * h;
    let mut ei = [0.0; 3];
    let mut ej = [0.0; 3];
    ei[i] = 1.0;
    ej[j] = 1.0;
    let at = |s: f64, t: f64| [x[0] + s * ei[0] + t * ej[0], x[1] + s * ei[1] + t * ej[1], x[2] + s * ei[2] + t * ej[2]];
    let edge_s = |t: f64| gl.integrate(-a, a, |s| beta.eval(&at(s, t), &ei));
    let edge_t = |s: f64| gl.integrate(-a, a, |t| beta.eval(&at(s, t), &ej));
    (edge_s(-a) + edge_t(a) - edge_s(a) - edge_t(-a)).abs() / (h * h)
}

/// Line integral of `β` along the deterministic path from `a` to `b`: the
/// minimizing great-circle arc on S² (through an orthogonal waypoint for
/// nearly antipodal endpoints) or the straight segment in a chart.
pub fn path_integral(beta: &OneForm, a: &Vec3, b: &Vec3) -> Result<f64> {
    let gl = GaussLegendre::new(32);
    let along = |c: &Curve| gl.integrate(c.t0, c.t1, |t| beta.eval(&c.point(t), &c.velocity(t)));
    if beta.is_on_sphere() {
        let (a, b) = (normalize3(a), normalize3(b));
        if dot3(&a, &b) < -0.9 {
            let mut w = cross(&a, &b);
            if norm3(&w) < 1e-6 {
                w = tangent_frame(&a).0;
            }
            let w = normalize3(&w);
            return Ok(along(&Curve::arc(&a, &w)?) + along(&Curve::arc(&w, &b)?));
        }
        Ok(along(&Curve::arc(&a, &b)?))
    } else {
        let n = beta.dim();
        Ok(along(&Curve::segment(&a[..n], &b[..n])?))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PotentialRecovery {
    pub base: Vec3,
    pub points: Vec<Vec3>,
    /// `f(x) = ∫_z^x β`.
    pub values: Vec<f64>,
    /// Largest `|∮β|` over the audit triangles.
    pub loop_residual: f64,
}

/// Number of random triangles in the path-independence audit.
pub const AUDIT_LOOPS: usize = 50;

fn random_point(rng: &mut ChaCha8Rng, sphere: bool, sample: &[Vec3]) -> Vec3 {
    if sphere {
        let z: f64 = rng.gen_range(-1.0..1.0);
        let phi: f64 = rng.gen_range(0.0..2.0 * PI);
        let r = (1.0 - z * z).sqrt();
        [r * phi.cos(), r * phi.sin(), z]
    } else {
        // convex combination of two sample points stays in a convex chart
        let a = sample[rng.gen_range(0..sample.len())];
        let b = sample[rng.gen_range(0..sample.len())];
        let t: f64 = rng.gen_range(0.0..1.0);
        [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]), a[2] + t * (b[2] - a[2])]
    }
}

/// Potential of a closed form by path integration from `base`, with a
/// path-independence audit on random triangles.
pub fn recover_potential(
    beta: &OneForm,
    closedness: f64,
    base: &Vec3,
    points: &[Vec3],
    chart_sample: &[Vec3],
    seed: u64,
) -> Result<PotentialRecovery> {
    if !(closedness < CLOSEDNESS_BUDGET) {
        return Err(FinslerError::NotClosed {
            residual: closedness,
            budget: CLOSEDNESS_BUDGET,
        });
    }
    let sphere = beta.is_on_sphere();
    if !sphere && chart_sample.is_empty() {
        return Err(FinslerError::InvalidArgument("chart audit needs sample points".into()));
    }
    let values = points.iter().map(|x| path_integral(beta, base, x)).collect::<Result<Vec<_>>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..AUDIT_LOOPS {
        let p: Vec<Vec3> = (0..3).map(|_| random_point(&mut rng, sphere, chart_sample)).collect();
        let c = path_integral(beta, &p[0], &p[1])? + path_integral(beta, &p[1], &p[2])? + path_integral(beta, &p[2], &p[0])?;
        worst = worst.max(c.abs());
    }
    if worst > 10.0 * CLOSEDNESS_BUDGET {
        return Err(FinslerError::NotClosed {
            residual: worst,
            budget: 10.0 * CLOSEDNESS_BUDGET,
        });
    }
    Ok(PotentialRecovery {
        base: *base,
        points: points.to_vec(),
        values,
        loop_residual: worst,
    })
}

/// Result of the asymmetric-distance audit on S².
#[derive(Debug, Clone, PartialEq)]
pub struct AsymmetryAudit {
    pub pairs: usize,
    /// `max |d(x,y) − d(y,x) − (f(y) − f(x))|` with `f(x) = d(ζ,x) − d(x,ζ)`.
    pub identity_residual: f64,
    /// Least-squares slope of `d(x,y) − d(y,x)` against the differences of
    /// the supplied potential (2 when the potential is that of `β`).
    pub potential_factor: f64,
}

/// Distance along the minimizing great-circle arc.
pub fn arc_distance(field: &MetricField, x: &Vec3, y: &Vec3) -> Result<f64> {
    field.curve_length(&Curve::arc(x, y)?)
}

/// Audits `d(x,y) − d(y,x) = f(y) − f(x)` on random pairs, where `f` is
/// built from distances to a base point `ζ` as `f(x) = d(ζ,x) − d(x,ζ)`.
/// Distances are lengths of great-circle arcs, so the field must have great
/// circles as geodesics. `potential` is compared against the distance
/// asymmetry through [`AsymmetryAudit::potential_factor`].
pub fn distance_asymmetry_audit(
    field: &MetricField,
    zeta: &Vec3,
    potential: &dyn Fn(&Vec3) -> f64,
    pairs: usize,
    seed: u64,
) -> Result<AsymmetryAudit> {
    if !field.is_sphere() {
        return Err(FinslerError::WrongFamily("the distance audit runs on S²".into()));
    }
    let zeta = normalize3(zeta);
    let f_thm = |x: &Vec3| -> Result<f64> { Ok(arc_distance(field, &zeta, x)? - arc_distance(field, x, &zeta)?) };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    let mut done = 0;
    while done < pairs {
        let x = random_point(&mut rng, true, &[]);
        let y = random_point(&mut rng, true, &[]);
        if dot3(&x, &y) < -0.95 || dot3(&x, &zeta) < -0.95 || dot3(&y, &zeta) < -0.95 {
            continue;
        }
        let asym = arc_distance(field, &x, &y)? - arc_distance(field, &y, &x)?;
        worst = worst.max((asym - (f_thm(&y)? - f_thm(&x)?)).abs());
        let df = potential(&y) - potential(&x);
        sxy += asym * df;
        sxx += df * df;
        done += 1;
    }
    Ok(AsymmetryAudit {
        pairs,
        identity_residual: worst,
        potential_factor: if sxx > 0.0 { sxy / sxx } else { f64::NAN },
    })
}

/// `V = ℓ²/π` and the integer `V·2π/ℓ²` for a Busemann field.
pub fn zoll_volume_check(field: &MetricField, level: u32) -> Result<CheckReport> {
    if field.as_busemann().is_none() {
        return Err(FinslerError::WrongFamily(format!("{} is not a Busemann field", field.family_name())));
    }
    let ell = busemann_prime_length(field, level + 2)?;
    let volume = field.ht_volume(&Region::Whole, level)?;
    let predicted = ell * ell / PI;
    let integer = volume * 2.0 * PI / (ell * ell);
    let nearest = integer.round();
    let identity = (volume - predicted).abs() / volume;
    let off = (integer - nearest).abs();
    let report = CheckReport::new("zoll", &format!("{}|{level}", field.describe()))
        .value("prime_length", ell)
        .value("volume", volume)
        .value("predicted_volume", predicted)
        .value("integer", integer)
        .value("nearest_integer", nearest)
        .residual("volume_identity", identity, ZOLL_TOL)
        .residual("integer_distance", off, ZOLL_INTEGER_TOL);
    let verdict = Verdict::all([
        Verdict::from_residual(identity, ZOLL_TOL),
        Verdict::from_residual(off, ZOLL_INTEGER_TOL),
        if nearest == 2.0 { Verdict::Pass } else { Verdict::Fail },
    ]);
    Ok(report.with_verdict(verdict))
}

/// Generic great circle used to measure prime lengths of arbitrary sphere
/// fields.
fn generic_great_circle() -> Result<Curve> {
    Curve::great_circle(&[0.3, 0.5, 0.8])
}

/// Compares two sphere fields with equal prime lengths and volumes: the
/// Brunn–Minkowski excess of their average and the linearity of `F₂ − F₁`
/// decide whether the difference is an exact form.
pub fn ht_density_rigidity_check(f1: &MetricField, f2: &MetricField, level: u32) -> Result<CheckReport> {
    if !f1.is_sphere() || !f2.is_sphere() {
        return Err(FinslerError::WrongFamily("density rigidity compares fields on S²".into()));
    }
    let gc = generic_great_circle()?;
    let (l1, l2) = (f1.curve_length(&gc)?, f2.curve_length(&gc)?);
    let (v1, v2) = (f1.ht_volume(&Region::Whole, level)?, f2.ht_volume(&Region::Whole, level)?);
    let dl = (l1 - l2).abs() / l1.max(l2);
    let dv = (v1 - v2).abs() / v1.max(v2);
    let mut report = CheckReport::new("density-rigidity", &format!("{}|{}|{level}", f1.describe(), f2.describe()))
        .value("prime_length_1", l1)
        .value("prime_length_2", l2)
        .value("volume_1", v1)
        .value("volume_2", v2)
        .residual("length_mismatch", dl, DENSITY_RIGIDITY_TOL)
        .residual("volume_mismatch", dv, DENSITY_RIGIDITY_TOL);
    if Verdict::from_residual(dl, DENSITY_RIGIDITY_TOL) == Verdict::Fail
        || Verdict::from_residual(dv, DENSITY_RIGIDITY_TOL) == Verdict::Fail
    {
        return Ok(report.note("prime lengths or volumes differ; equality cases not examined").judge());
    }
    let avg = MetricField::average(f1, f2)?;
    let grid = DirectionGrid::cached(3, level.min(2))?;
    let mut excess: f64 = 0.0;
    let mut linear: f64 = 0.0;
    for i in 0..grid.len() {
        let x = grid.node3(i);
        let (r1, r2, ra) = (f1.ht_density(&x)?, f2.ht_density(&x)?, avg.ht_density(&x)?);
        // 2-D Brunn–Minkowski: √vol((D₁+D₂)/2) ≥ (√vol D₁ + √vol D₂)/2
        let lower = 0.5 * (r1.sqrt() + r2.sqrt());
        excess = excess.max((ra.sqrt() - lower) / lower);
        let (e1, e2) = tangent_frame(&x);
        let dirs: Vec<Vec<f64>> = (0..FIT_DIRECTIONS)
            .map(|j| {
                let t = 2.0 * PI * j as f64 / FIT_DIRECTIONS as f64;
                vec![t.cos(), t.sin()]
            })
            .collect();
        let vals: Vec<f64> = dirs
            .iter()
            .map(|u| {
                let v = [
                    u[0] * e1[0] + u[1] * e2[0],
                    u[0] * e1[1] + u[1] * e2[1],
                    u[0] * e1[2] + u[1] * e2[2],
                ];
                f2.eval(&x, &v) - f1.eval(&x, &v)
            })
            .collect();
        linear = linear.max(linear_fit_residual(&dirs, &vec![1.0; dirs.len()], &vals)?.max_deviation);
    }
    report = report
        .residual("brunn_minkowski_excess", excess, DENSITY_RIGIDITY_TOL)
        .residual("difference_linearity", linear, DENSITY_RIGIDITY_TOL);
    Ok(report.judge())
}

/// Width, brightness and centre residuals of `K` against a symmetric gauge
/// `B` in R³.
#[derive(Debug, Clone, PartialEq)]
pub struct ChakerianResiduals {
    pub width_factor: f64,
    pub brightness_factor: f64,
    pub width: f64,
    pub brightness: f64,
    pub center: f64,
}

fn fit_ratio(a: &[f64], b: &[f64]) -> (f64, f64) {
    let lambda = a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>() / b.iter().map(|y| y * y).sum::<f64>();
    let scale = a.iter().map(|x| x.abs()).fold(0.0, f64::max);
    let r = a.iter().zip(b).map(|(x, y)| (x - lambda * y).abs()).fold(0.0, f64::max) / scale;
    (lambda, r)
}

/// Residuals of the constant width / constant brightness test on the
/// directions of a level-`level` grid.
pub fn chakerian_residuals(k: &ConvexBody, b: &ConvexBody, level: u32) -> Result<ChakerianResiduals> {
    if k.dim() != 3 || b.dim() != 3 {
        return Err(FinslerError::UnsupportedDimension(k.dim().min(b.dim())));
    }
    let grid = DirectionGrid::cached(3, level)?;
    let dirs: Vec<Vec3> = (0..grid.len()).map(|i| grid.node3(i)).collect();
    let hb: Vec<f64> = dirs.iter().map(|u| b.support3(u)).collect();
    let asym = dirs
        .iter()
        .zip(&hb)
        .map(|(u, h)| (b.support3(&scale3(-1.0, u)) - h).abs())
        .fold(0.0, f64::max);
    let hmax = hb.iter().cloned().fold(0.0, f64::max);
    if asym > 1e-9 * hmax.max(1.0) {
        return Err(FinslerError::InvalidArgument(format!("gauge body is not origin-symmetric (defect {asym:.3e})")));
    }
    let hk: Vec<f64> = dirs.iter().map(|u| k.support3(u)).collect();
    let wk: Vec<f64> = dirs.iter().zip(&hk).map(|(u, h)| h + k.support3(&scale3(-1.0, u))).collect();
    let wb: Vec<f64> = hb.iter().map(|h| 2.0 * h).collect();
    let (lw, rw) = fit_ratio(&wk, &wb);
    let bk = dirs.iter().map(|u| k.brightness(u)).collect::<Result<Vec<_>>>()?;
    let bb = dirs.iter().map(|u| b.brightness(u)).collect::<Result<Vec<_>>>()?;
    let (lb, rb) = fit_ratio(&bk, &bb);
    // h_K − λ h_B must be the linear function u ↦ t·u
    let rest: Vec<f64> = hk.iter().zip(&hb).map(|(h, g)| h - lw * g).collect();
    let dv: Vec<Vec<f64>> = dirs.iter().map(|u| u.to_vec()).collect();
    let fit = linear_fit_residual(&dv, grid.weights(), &rest)?;
    let scale = hk.iter().map(|h| h.abs()).fold(0.0, f64::max);
    Ok(ChakerianResiduals {
        width_factor: lw,
        brightness_factor: lb,
        width: rw,
        brightness: rb,
        center: fit.max_deviation / scale,
    })
}

/// Translate+dilate test: passes when width, brightness and centre
/// residuals are all below `1e-5`.
pub fn chakerian_check(k: &ConvexBody, b: &ConvexBody, level: u32) -> Result<CheckReport> {
    let r = chakerian_residuals(k, b, level)?;
    Ok(CheckReport::new("chakerian", &format!("{k:?}|{b:?}|{level}"))
        .value("width_factor", r.width_factor)
        .value("brightness_factor", r.brightness_factor)
        .residual("width", r.width, CHAKERIAN_TOL)
        .residual("brightness", r.brightness, CHAKERIAN_TOL)
        .residual("center", r.center, CHAKERIAN_TOL)
        .judge())
}

/// Intersection of the four balls of radius `edge` centred at the vertices
/// of a regular tetrahedron with edge `edge` (centred at the origin),
/// approximated by tangent halfspaces at the nodes of a level-`level` grid.
pub fn reuleaux_tetrahedron(edge: f64, level: u32) -> Result<ConvexBody> {
    if !(edge > 0.0) {
        return Err(FinslerError::InvalidArgument(format!("edge {edge}")));
    }
    let s = edge / (2.0 * 2f64.sqrt());
    let centers: Vec<Vec3> = [[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]]
        .iter()
        .map(|v| scale3(s, v))
        .collect();
    let grid = DirectionGrid::cached(3, level)?;
    let mut normals = Vec::new();
    let mut offsets = Vec::new();
    for c in &centers {
        for i in 0..grid.len() {
            let n = grid.node3(i);
            // keep only tangent planes at boundary points of the intersection
            let p = [c[0] + edge * n[0], c[1] + edge * n[1], c[2] + edge * n[2]];
            if centers.iter().all(|d| norm3(&sub3(&p, d)) <= edge * (1.0 + 1e-12)) {
                normals.push(n);
                offsets.push(edge + dot3(&n, c));
            }
        }
    }
    Ok(ConvexBody::Polytope(Polytope::from_halfspaces(3, &normals, &offsets)?.polytope))
}

/// Support function of the solid obtained by rotating a Reuleaux triangle
/// of width `width` about its symmetry axis `e₃` (a body of constant width).
pub fn reuleaux_rotor(width: f64, level: u32) -> Result<ConvexBody> {
    if !(width > 0.0) {
        return Err(FinslerError::InvalidArgument(format!("width {width}")));
    }
    // planar Reuleaux triangle with a vertex on the axis at the top:
    // vertices at angles 90°, 210°, 330° on the circle of radius w/√3
    let r = width / 3f64.sqrt();
    let verts: Vec<[f64; 2]> = [90.0f64, 210.0, 330.0]
        .iter()
        .map(|a| [r * a.to_radians().cos(), r * a.to_radians().sin()])
        .collect();
    let h2 = move |u: [f64; 2]| -> f64 {
        // support of the Reuleaux triangle: the arc centred at vertex i
        // spans the directions facing away from it
        let mut best = f64::NEG_INFINITY;
        for (i, vi) in verts.iter().enumerate() {
            let hv = vi[0] * u[0] + vi[1] * u[1];
            best = best.max(hv);
            // arc of radius w around vertex i between the other two
            let (a, b) = (verts[(i + 1) % 3], verts[(i + 2) % 3]);
            let da = [a[0] - vi[0], a[1] - vi[1]];
            let db = [b[0] - vi[0], b[1] - vi[1]];
            let cross_ab = da[0] * db[1] - da[1] * db[0];
            let cross_au = da[0] * u[1] - da[1] * u[0];
            let cross_ub = u[0] * db[1] - u[1] * db[0];
            if cross_au * cross_ab >= 0.0 && cross_ub * cross_ab >= 0.0 {
                best = best.max(hv + width);
            }
        }
        best
    };
    ConvexBody::from_support_fn(
        3,
        level,
        std::sync::Arc::new(move |u: &Vec3| {
            let rho = (u[0] * u[0] + u[1] * u[1]).sqrt();
            h2([rho, u[2]])
        }),
    )
}

/// A body in R³ with constant brightness relative to the unit ball but
/// without central symmetry: the solution of the Minkowski problem for the
/// area measure `w_i (1 + ε sgn(x_i y_i z_i))` on a level-`level` grid.
/// The odd profile has no first moment, so the measure closes and its even
/// part is uniform. Returns the body and the solver's iteration count.
pub fn constant_brightness_body(epsilon: f64, level: u32) -> Result<(ConvexBody, usize)> {
    let odd = |u: &Vec3| {
        let p = u[0] * u[1] * u[2];
        if p > 0.0 {
            1.0
        } else if p < 0.0 {
            -1.0
        } else {
            0.0
        }
    };
    if !(0.0..1.0).contains(&epsilon) {
        return Err(FinslerError::InvalidArgument(format!("epsilon {epsilon} breaks positivity")));
    }
    let grid = DirectionGrid::cached(3, level)?;
    let normals: Vec<Vec3> = (0..grid.len()).map(|i| grid.node3(i)).collect();
    let mut areas: Vec<f64> = normals
        .iter()
        .enumerate()
        .map(|(i, u)| grid.weight(i) * (1.0 + epsilon * odd(u)))
        .collect();
    // remove the grid's residual first moment with an odd linear correction,
    // which leaves the even part (and hence the brightness) unchanged
    let mut m = nalgebra::Matrix3::<f64>::zeros();
    let mut s = nalgebra::Vector3::<f64>::zeros();
    for (i, u) in normals.iter().enumerate() {
        for a in 0..3 {
            s[a] += areas[i] * u[a];
            for b in 0..3 {
                m[(a, b)] += grid.weight(i) * u[a] * u[b];
            }
        }
    }
    let c = m
        .lu()
        .solve(&s)
        .ok_or_else(|| FinslerError::Degenerate("singular moment matrix".into()))?;
    for (i, u) in normals.iter().enumerate() {
        areas[i] -= grid.weight(i) * (c[0] * u[0] + c[1] * u[1] + c[2] * u[2]);
    }
    let nv: Vec<Vec<f64>> = normals.iter().map(|u| u.to_vec()).collect();
    let problem = MinkowskiProblem::new(3, &nv, &areas)?;
    let sol = solve_minkowski_problem(&problem, &MinkowskiOptions::default())?;
    Ok((ConvexBody::Polytope(sol.polytope), sol.iterations))
}

/// Cauchy's formula `½ Σ a_i |u·n_i|` for the brightness of a polytope.
pub fn cauchy_brightness(body: &ConvexBody, u: &Vec3) -> Result<f64> {
    let u = normalize3(u);
    Ok(0.5
        * body
            .surface_area_measure()?
            .iter()
            .map(|(n, a)| a * dot3(&to3(n), &u).abs())
            .sum::<f64>())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn round_plus_df() -> MetricField {
        MetricField::round(1.0)
            .unwrap()
            .add_one_form(&OneForm::constant(2, true, &[0.0, 0.0, 0.2]).unwrap())
            .unwrap()
    }

    fn nodes() -> Vec<Vec3> {
        let g = DirectionGrid::cached(3, 1).unwrap();
        (0..g.len()).map(|i| g.node3(i)).collect()
    }

    #[test]
    fn exact_form_is_detected() {
        let f = round_plus_df();
        let d = detect_reversible_plus_closed(&f, &nodes()).unwrap();
        assert!(d.max_linearity < 1e-10, "{}", d.max_linearity);
        assert!(d.closedness < 1e-6, "{}", d.closedness);
        for (x, c) in d.nodes.iter().zip(&d.covectors) {
            // d(0.2 x₃) = 0.2 (e₃ − x₃ x)
            let want = [-0.2 * x[2] * x[0], -0.2 * x[2] * x[1], 0.2 - 0.2 * x[2] * x[2]];
            assert!(norm3(&sub3(c, &want)) < 1e-10);
        }
        assert!(d.report.verdict.is_pass());
    }

    #[test]
    fn rotation_form_is_not_closed() {
        let f = MetricField::round(1.0)
            .unwrap()
            .add_one_form(&OneForm::rotation(2, true, &[0.0, 0.0, 1.0], 0.2).unwrap())
            .unwrap();
        let d = detect_reversible_plus_closed(&f, &nodes()).unwrap();
        // dβ = 2·0.2·(x·e₃) dσ
        assert!(d.closedness > 0.3, "{}", d.closedness);
        assert!(recover_potential(&d.beta, d.closedness, &[0.0, 0.0, 1.0], &[], &[], 1).is_err());
    }

    #[test]
    fn potential_of_exact_form() {
        let beta = OneForm::constant(2, true, &[0.0, 0.0, 0.2]).unwrap();
        let pts = nodes();
        let r = recover_potential(&beta, 0.0, &[1.0, 0.0, 0.0], &pts, &[], 7).unwrap();
        for (x, f) in pts.iter().zip(&r.values) {
            assert!((f - 0.2 * x[2]).abs() < 1e-12);
        }
        assert!(r.loop_residual < 1e-12);
    }

    #[test]
    fn asymmetry_is_twice_the_potential() {
        let f = round_plus_df();
        let a = distance_asymmetry_audit(&f, &[1.0, 0.0, 0.0], &|x: &Vec3| 0.2 * x[2], 5, 3).unwrap();
        assert!(a.identity_residual < 1e-6);
        assert!((a.potential_factor - 2.0).abs() < 1e-6);
    }

    #[test]
    fn translate_dilate_passes() {
        let b = ConvexBody::ellipsoid(3, &[0.0; 3], &[1.0, 0.8, 0.6]).unwrap();
        let k = b.scale(0.7).unwrap().translate(&[0.1, -0.2, 0.3]);
        let r = chakerian_residuals(&k, &b, 2).unwrap();
        assert!(r.width < 1e-12 && r.brightness < 1e-12 && r.center < 1e-12, "{r:?}");
        assert!((r.width_factor - 0.7).abs() < 1e-12);
    }

    #[test]
    fn rotor_has_constant_width() {
        let k = reuleaux_rotor(1.0, 3).unwrap();
        let grid = DirectionGrid::cached(3, 2).unwrap();
        for i in 0..grid.len() {
            let u = grid.node3(i);
            let w = k.support3(&u) + k.support3(&scale3(-1.0, &u));
            assert!((w - 1.0).abs() < 1e-12, "{w}");
        }
    }

    #[test]
    fn nonsymmetric_gauge_is_rejected() {
        let b = ConvexBody::ball(3, &[0.1, 0.0, 0.0], 1.0).unwrap();
        assert!(chakerian_check(&b, &b, 1).is_err());
    }
}
