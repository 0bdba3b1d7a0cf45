//! Acceptance suite. Prints one PASS/FAIL line per criterion; the process
//! fails if any criterion outside `UNATTAINABLE` fails.

use std::f64::consts::PI;
use std::time::Instant;

use finsler_core::convexbody::{blaschke_body_with_options, MinkowskiOptions};
use finsler_core::crofton::{busemann_metric, crofton_length_generic, perturbed_round_density};
use finsler_core::geodesic::{
    crofton_area_check, flow_invariance, geodesic_trace, great_circle_deviation, line_deviation,
    motion_integral_flow_spread, motion_integral_ratio, santalo_check, GeodesicOptions, TransversalPatch,
};
use finsler_core::metricfield::Region;
use finsler_core::numerics::vector::{normalize3, tangent_frame, Vec3};
use finsler_core::numerics::DirectionGrid;
use finsler_core::rigidity::{
    chakerian_residuals, constant_brightness_body, detect_reversible_plus_closed, distance_asymmetry_audit,
    recover_potential, reuleaux_tetrahedron, zoll_volume_check,
};
use finsler_core::{ConvexBody, CroftonDensity, Curve, MetricField, OneForm};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Criteria that cannot pass as stated; each one is still run and reported.
const UNATTAINABLE: &[(&str, &str)] = &[(
    "AC6",
    "the odd part of the Funk ball fiber is x·v/(1−|x|²), which is linear in v",
)];

// Tolerances, pinned.
const AC1_FIBER_TOL: f64 = 1e-6;
const AC1_LENGTH_TOL: f64 = 1e-2;
const AC1_RUNTIME: f64 = 10.0;
const AC2_TOL: f64 = 1e-2;
const AC2_RUNTIME: f64 = 120.0;
const AC2_LEVEL: u32 = 3;
const AC3_TOL: f64 = 0.05;
const AC4_CIRCLE_TOL: f64 = 1e-5;
const AC4_LINE_TOL: f64 = 1e-6;
const AC4_RUNTIME: f64 = 60.0;
const AC5_LINEARITY_TOL: f64 = 1e-6;
const AC5_CLOSED_TOL: f64 = 1e-4;
const AC5_POTENTIAL_TOL: f64 = 1e-5;
const AC5_IDENTITY_TOL: f64 = 1e-4;
const AC6_THRESHOLD: f64 = 1e-2;
const AC7_INEQ_SLACK: f64 = 1e-9;
const AC7_EQ_TOL: f64 = 1e-6;
const AC8_BRIGHTNESS_TOL: f64 = 1e-3;
const AC8_MAX_ITER: usize = 5000;
const AC8_RUNTIME: f64 = 60.0;
const AC9_PASS_TOL: f64 = 1e-5;
const AC9_FAIL_THRESHOLD: f64 = 1e-2;
const AC10_SCALE_TOL: f64 = 1e-4;
const AC10_FORM_TOL: f64 = 1e-5;
const AC10_FLOW_TOL: f64 = 1e-4;
const AC11_TOL: f64 = 1e-2;
const AC11_CLOSED_FORM_TOL: f64 = 1e-3;
const AC12_TOL: f64 = 1e-4;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn random_unit(rng: &mut ChaCha8Rng) -> Vec3 {
    let z: f64 = rng.gen_range(-1.0..1.0);
    let phi: f64 = rng.gen_range(0.0..2.0 * PI);
    let r = (1.0 - z * z).sqrt();
    [r * phi.cos(), r * phi.sin(), z]
}

fn random_tangent(rng: &mut ChaCha8Rng, x: &Vec3) -> Vec3 {
    let (e1, e2) = tangent_frame(x);
    let t: f64 = rng.gen_range(0.0..2.0 * PI);
    let (s, c) = t.sin_cos();
    [c * e1[0] + s * e2[0], c * e1[1] + s * e2[1], c * e1[2] + s * e2[2]]
}

fn poly_density() -> CroftonDensity {
    CroftonDensity::poly(&[0.0, 0.0, 1.0], &[0.25, 0.125]).unwrap()
}

fn bump_density() -> CroftonDensity {
    perturbed_round_density(&normalize3(&[1.0, 2.0, 2.0]), 0.5, 0.2).unwrap()
}

fn busemann_fields() -> Vec<(&'static str, MetricField)> {
    vec![
        ("round", busemann_metric(&CroftonDensity::round()).unwrap()),
        ("poly", busemann_metric(&poly_density()).unwrap()),
        ("bump", busemann_metric(&bump_density()).unwrap()),
    ]
}

fn ac1() -> Outcome {
    let start = Instant::now();
    let b = busemann_metric(&CroftonDensity::constant(0.25).unwrap()).unwrap();
    let r = MetricField::round(1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let x = random_unit(&mut rng);
        let v = random_tangent(&mut rng, &x);
        let s: f64 = rng.gen_range(0.2..3.0);
        let v = [s * v[0], s * v[1], s * v[2]];
        worst = worst.max((b.eval(&x, &v) - r.eval(&x, &v)).abs());
    }
    let eq = crofton_length_generic(&CroftonDensity::constant(0.25).unwrap(), &Curve::equator(), 4).unwrap();
    let rel = (eq.length - 2.0 * PI).abs() / (2.0 * PI);
    let t = start.elapsed().as_secs_f64();
    outcome(
        worst < AC1_FIBER_TOL && rel < AC1_LENGTH_TOL && t < AC1_RUNTIME,
        format!("fiber max |ΔF| = {worst:.2e}, equator crofton rel err = {rel:.2e}, {t:.1}s"),
    )
}

fn zoll_reports() -> Vec<(&'static str, finsler_core::report::CheckReport)> {
    busemann_fields()
        .into_iter()
        .map(|(name, f)| (name, zoll_volume_check(&f, AC2_LEVEL).unwrap()))
        .collect()
}

fn ac2_ac3() -> (Outcome, Outcome) {
    let start = Instant::now();
    let reports = zoll_reports();
    let t = start.elapsed().as_secs_f64();
    let mut ok2 = t < AC2_RUNTIME;
    let mut ok3 = true;
    let mut d2 = Vec::new();
    let mut d3 = Vec::new();
    for (name, r) in &reports {
        let v = r.values["volume"];
        let ell = r.values["prime_length"];
        let rel = (v - ell * ell / PI).abs() / v;
        ok2 &= rel < AC2_TOL;
        let k = r.values["integer"];
        ok3 &= (k - 2.0).abs() < AC3_TOL;
        d2.push(format!("{name}: V={v:.4} ℓ={ell:.4} rel={rel:.1e}"));
        d3.push(format!("{name}: {k:.4}"));
        if *name == "poly" {
            let rel49 = (v - 49.0 * PI / 9.0).abs() / v;
            ok2 &= rel49 < AC2_TOL;
            d2.push(format!("|V−49π/9|/V={rel49:.1e}"));
        }
    }
    d2.push(format!("{t:.1}s"));
    (outcome(ok2, d2.join(", ")), outcome(ok3, d3.join(", ")))
}

fn ac4() -> Outcome {
    let start = Instant::now();
    let opts = GeodesicOptions::default();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut parts = Vec::new();
    let mut ok = true;
    for (name, f) in busemann_fields() {
        let mut worst: f64 = 0.0;
        for _ in 0..20 {
            let x = random_unit(&mut rng);
            let v = random_tangent(&mut rng, &x);
            let tr = geodesic_trace(&f, &x, &v, 2.0 * PI, &opts).unwrap();
            worst = worst.max(great_circle_deviation(&tr));
        }
        ok &= worst < AC4_CIRCLE_TOL;
        parts.push(format!("{name} {worst:.1e}"));
    }
    let funk = MetricField::funk(ConvexBody::unit_ball(2));
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let r: f64 = rng.gen_range(0.0..0.7);
        let a: f64 = rng.gen_range(0.0..2.0 * PI);
        let b: f64 = rng.gen_range(0.0..2.0 * PI);
        let tr = geodesic_trace(&funk, &[r * a.cos(), r * a.sin()], &[b.cos(), b.sin()], 3.0, &opts).unwrap();
        worst = worst.max(line_deviation(&tr));
    }
    ok &= worst < AC4_LINE_TOL;
    parts.push(format!("funk chord {worst:.1e}"));
    let t = start.elapsed().as_secs_f64();
    ok &= t < AC4_RUNTIME;
    parts.push(format!("{t:.1}s"));
    outcome(ok, parts.join(", "))
}

fn ac5() -> Outcome {
    let f0 = |x: &Vec3| 0.2 * x[2];
    let field = MetricField::round(1.0)
        .unwrap()
        .add_one_form(&OneForm::constant(2, true, &[0.0, 0.0, 0.2]).unwrap())
        .unwrap();
    let grid = DirectionGrid::cached(3, 2).unwrap();
    let nodes: Vec<Vec3> = (0..grid.len()).map(|i| grid.node3(i)).collect();
    let d = detect_reversible_plus_closed(&field, &nodes).unwrap();
    let z = [1.0, 0.0, 0.0];
    let rec = recover_potential(&d.beta, d.closedness, &z, &nodes, &[], 5).unwrap();
    let potential_err = nodes
        .iter()
        .zip(&rec.values)
        .map(|(x, v)| (v - (f0(x) - f0(&z))).abs())
        .fold(0.0, f64::max);
    let audit = distance_asymmetry_audit(&field, &[0.0, 1.0, 0.0], &f0, 20, 5).unwrap();
    let ok = d.max_linearity < AC5_LINEARITY_TOL
        && d.closedness < AC5_CLOSED_TOL
        && potential_err < AC5_POTENTIAL_TOL
        && audit.identity_residual < AC5_IDENTITY_TOL;
    outcome(
        ok,
        format!(
            "linearity {:.1e}, closedness {:.1e}, potential err {:.1e}, identity residual {:.1e} (distance potential = {:.6}·f)",
            d.max_linearity, d.closedness, potential_err, audit.identity_residual, audit.potential_factor
        ),
    )
}

fn ac6() -> Outcome {
    let funk = MetricField::funk(ConvexBody::unit_ball(2));
    let d = detect_reversible_plus_closed(&funk, &[[0.5, 0.0, 0.0]]).unwrap();
    let r = d.max_linearity;
    outcome(
        r > AC6_THRESHOLD,
        format!("linearity residual at (0.5, 0) = {r:.2e}, required > {AC6_THRESHOLD:.0e}"),
    )
}

fn ac7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut ineq_ok = true;
    let mut eq_ok = true;
    let (mut worst_gap, mut worst_eq, mut min_strict) = (f64::INFINITY, 0.0f64, f64::INFINITY);
    for i in 0..50 {
        let dim = if i % 2 == 0 { 2 } else { 3 };
        let symmetric = i % 5 < 2;
        let axes: Vec<f64> = (0..3).map(|_| rng.gen_range(0.5..1.5)).collect();
        let shift: Vec3 = [rng.gen_range(-0.2..0.2), rng.gen_range(-0.2..0.2), if dim == 3 { rng.gen_range(-0.2..0.2) } else { 0.0 }];
        let c: Vec3 = normalize3(&[rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), if dim == 3 { rng.gen_range(-1.0..1.0) } else { 0.0 }]);
        let eps = if symmetric { 0.0 } else { rng.gen_range(0.05..0.1) };
        let h = std::sync::Arc::new(move |u: &Vec3| {
            let e = ((axes[0] * u[0]).powi(2) + (axes[1] * u[1]).powi(2) + (axes[2] * u[2]).powi(2)).sqrt();
            let n2 = u[0] * u[0] + u[1] * u[1] + u[2] * u[2];
            let cu = c[0] * u[0] + c[1] * u[1] + c[2] * u[2];
            e + shift[0] * u[0] + shift[1] * u[1] + shift[2] * u[2] + eps * cu * cu * cu / n2
        });
        let level = if dim == 2 { 6 } else { 3 };
        let k = ConvexBody::from_support_fn(dim, level, h).unwrap();
        let vk = k.volume().unwrap();
        let vd = k.central_symmetral().unwrap().volume().unwrap();
        let gap = vd - vk;
        worst_gap = worst_gap.min(gap);
        ineq_ok &= gap >= -AC7_INEQ_SLACK;
        if symmetric {
            worst_eq = worst_eq.max(gap.abs() / vk);
            eq_ok &= gap.abs() / vk < AC7_EQ_TOL;
        } else {
            min_strict = min_strict.min(gap / vk);
            eq_ok &= gap / vk >= AC7_EQ_TOL;
        }
    }
    outcome(
        ineq_ok && eq_ok,
        format!("min vol(ΔK)−vol(K) = {worst_gap:.2e}, symmetric max rel gap {worst_eq:.1e}, asymmetric min rel gap {min_strict:.1e}"),
    )
}

fn ac8() -> Outcome {
    let start = Instant::now();
    let tet = ConvexBody::from_vertices(
        3,
        &[vec![1.0, 1.0, 1.0], vec![1.0, -1.0, -1.0], vec![-1.0, 1.0, -1.0], vec![-1.0, -1.0, 1.0]],
    )
    .unwrap();
    let (b, sol) = blaschke_body_with_options(&tet, &MinkowskiOptions::default()).unwrap();
    let iterations = sol.map(|s| s.iterations).unwrap_or(0);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let u = random_unit(&mut rng);
        let bt = tet.brightness(&u).unwrap();
        worst = worst.max((b.brightness(&u).unwrap() - bt).abs() / bt);
    }
    let (vb, vt) = (b.volume().unwrap(), tet.volume().unwrap());
    let t = start.elapsed().as_secs_f64();
    outcome(
        worst < AC8_BRIGHTNESS_TOL && vb >= vt && iterations < AC8_MAX_ITER && t < AC8_RUNTIME,
        format!("brightness rel err {worst:.1e}, vol ∇K = {vb:.4} ≥ {vt:.4}, {iterations} iterations, {t:.1}s"),
    )
}

fn ac9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst_pass: f64 = 0.0;
    for i in 0..10 {
        let gauge = match i % 3 {
            0 => ConvexBody::unit_ball(3),
            1 => ConvexBody::ellipsoid(3, &[0.0; 3], &[rng.gen_range(0.5..1.5), rng.gen_range(0.5..1.5), rng.gen_range(0.5..1.5)]).unwrap(),
            _ => ConvexBody::from_vertices(
                3,
                &[
                    vec![1.0, 0.0, 0.0], vec![-1.0, 0.0, 0.0], vec![0.0, 1.2, 0.0],
                    vec![0.0, -1.2, 0.0], vec![0.0, 0.0, 0.8], vec![0.0, 0.0, -0.8],
                ],
            )
            .unwrap(),
        };
        let k = gauge
            .scale(rng.gen_range(0.3..2.0))
            .unwrap()
            .translate(&[rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]);
        let r = chakerian_residuals(&k, &gauge, 2).unwrap();
        worst_pass = worst_pass.max(r.width.max(r.brightness).max(r.center));
    }
    let ball = ConvexBody::unit_ball(3);
    let reuleaux = reuleaux_tetrahedron(1.0, 4).unwrap();
    let rr = chakerian_residuals(&reuleaux, &ball, 2).unwrap();
    let (cb, _) = constant_brightness_body(0.9, 3).unwrap();
    let rc = chakerian_residuals(&cb, &ball, 2).unwrap();
    let ok = worst_pass < AC9_PASS_TOL && rr.brightness > AC9_FAIL_THRESHOLD && rc.width > AC9_FAIL_THRESHOLD;
    outcome(
        ok,
        format!(
            "translates max residual {worst_pass:.1e}; Reuleaux r_W {:.1e} r_B {:.1e}; constant-brightness r_B {:.1e} r_W {:.1e}",
            rr.width, rr.brightness, rc.brightness, rc.width
        ),
    )
}

fn ac10() -> Outcome {
    let round = MetricField::round(1.0).unwrap();
    let patch = TransversalPatch::meridian(0.4, (0.3, 1.2), 20, 20).unwrap();
    let scaled = round.scale(1.7).unwrap();
    let nu = motion_integral_ratio(&round, &scaled, &patch).unwrap();
    let e1 = nu.nu.iter().map(|v| (v - 1.7).abs()).fold(0.0, f64::max);
    let df = round.add_one_form(&OneForm::constant(2, true, &[0.1, -0.2, 0.2]).unwrap()).unwrap();
    let nu2 = motion_integral_ratio(&round, &df, &patch).unwrap();
    let e2 = nu2.nu.iter().map(|v| (v - 1.0).abs()).fold(0.0, f64::max);
    let bump = busemann_metric(&bump_density()).unwrap();
    let small = TransversalPatch::meridian(0.3, (0.4, 1.0), 5, 5).unwrap();
    let spread = motion_integral_flow_spread(&round, &bump, &round, &small, &[0.5, 1.3]).unwrap();
    outcome(
        e1 < AC10_SCALE_TOL && e2 < AC10_FORM_TOL && spread < AC10_FLOW_TOL,
        format!("|ν−1.7| {e1:.1e}, |ν−1| {e2:.1e}, along-flow spread {spread:.1e}"),
    )
}

fn ac11() -> Outcome {
    let round = MetricField::round(1.0).unwrap();
    let bump = busemann_metric(&bump_density()).unwrap();
    let sr = santalo_check(&round, 3).unwrap();
    let sb = santalo_check(&bump, 3).unwrap();
    let target = 8.0 * PI * PI;
    let closed = (sr.values["lhs"] - target).abs().max((sr.values["rhs"] - target).abs()) / target;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let pole = random_unit(&mut rng);
    let cr = crofton_area_check(&round, &Curve::latitude(60.0).unwrap(), 5).unwrap();
    let cb = crofton_area_check(&bump, &Curve::great_circle(&pole).unwrap(), 5).unwrap();
    let m = |r: &finsler_core::report::CheckReport| r.residuals["relative_mismatch"];
    let ok = m(&sr) < AC11_TOL && m(&sb) < AC11_TOL && m(&cr) < AC11_TOL && m(&cb) < AC11_TOL && closed < AC11_CLOSED_FORM_TOL;
    outcome(
        ok,
        format!(
            "santalo round {:.1e} bump {:.1e}; crofton round {:.1e} bump {:.1e}; round vs 8π² {closed:.1e}",
            m(&sr),
            m(&sb),
            m(&cr),
            m(&cb)
        ),
    )
}

fn ac12() -> Outcome {
    let patch = TransversalPatch::meridian(0.3, (0.4, 1.0), 6, 6).unwrap();
    let round = MetricField::round(1.0).unwrap();
    let bump = busemann_metric(&bump_density()).unwrap();
    let randers = round.add_one_form(&OneForm::rotation(2, true, &[0.0, 0.0, 1.0], 0.2).unwrap()).unwrap();
    let mut parts = Vec::new();
    let mut ok = true;
    for (name, f) in [("round", &round), ("bump", &bump), ("rotation Randers", &randers)] {
        let r = flow_invariance(f, &patch, 0.7).unwrap();
        ok &= r < AC12_TOL;
        parts.push(format!("{name} {r:.1e}"));
    }
    outcome(ok, parts.join(", "))
}

fn main() {
    let _ = Region::Whole;
    let mut results: Vec<(&str, &str, Outcome)> = Vec::new();
    let mut run = |id: &'static str, name: &'static str, f: &dyn Fn() -> Outcome| {
        let o = f();
        println!("{} {id} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        results.push((id, name, o));
    };
    run("AC1", "Busemann calibration", &ac1);
    let (o2, o3) = ac2_ac3();
    println!("{} AC2 volume identity V = ℓ²/π: {}", if o2.pass { "PASS" } else { "FAIL" }, o2.detail);
    println!("{} AC3 Zoll integer: {}", if o3.pass { "PASS" } else { "FAIL" }, o3.detail);
    results.push(("AC2", "", o2));
    results.push(("AC3", "", o3));
    let mut run = |id: &'static str, name: &'static str, f: &dyn Fn() -> Outcome| {
        let o = f();
        println!("{} {id} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        results.push((id, name, o));
    };
    run("AC4", "projectivity", &ac4);
    run("AC5", "reversible plus exact", &ac5);
    run("AC6", "Funk negative control", &ac6);
    run("AC7", "fiberwise Brunn–Minkowski", &ac7);
    run("AC8", "Blaschke body of the tetrahedron", &ac8);
    run("AC9", "width/brightness test", &ac9);
    run("AC10", "integral-of-motion ratio", &ac10);
    run("AC11", "Santaló and Crofton", &ac11);
    run("AC12", "flow invariance of ω", &ac12);

    let mut unexpected = Vec::new();
    for (id, _, o) in &results {
        if o.pass {
            continue;
        }
        match UNATTAINABLE.iter().find(|(k, _)| k == id) {
            Some((_, why)) => println!("note: {id} is known to be unattainable: {why}"),
            None => unexpected.push(*id),
        }
    }
    let passed = results.iter().filter(|r| r.2.pass).count();
    println!("acceptance: {passed}/{} criteria pass", results.len());
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
