use std::f64::consts::PI;
use std::sync::Arc;

use finsler_core::crofton::{busemann_metric, crofton_length_generic, perturbed_round_density};
use finsler_core::geodesic::santalo_check;
use finsler_core::metricfield::Region;
use finsler_core::numerics::vector::Vec3;
use finsler_core::{ConvexBody, CroftonDensity, Curve, MetricField, OneForm};

fn poly() -> CroftonDensity {
    CroftonDensity::poly(&[0.0, 0.0, 1.0], &[0.25, 0.125]).unwrap()
}

#[test]
fn round_latitude_and_volume() {
    let f = MetricField::round(1.0).unwrap();
    let l = f.curve_length(&Curve::latitude(60.0).unwrap()).unwrap();
    assert!((l - PI).abs() < 1e-10);
    let v = f.ht_volume(&Region::Whole, 3).unwrap();
    assert!((v - 4.0 * PI).abs() < 1e-6);
    assert!((f.ht_density(&[0.0, 0.6, 0.8]).unwrap() - 1.0).abs() < 1e-6);
}

#[test]
fn funk_segment_distance() {
    let f = MetricField::funk(ConvexBody::unit_ball(2));
    let out = f.curve_length(&Curve::segment(&[0.0, 0.0], &[0.9, 0.0]).unwrap()).unwrap();
    assert!((out - -(0.1f64).ln()).abs() < 1e-6, "{out}");
    // back towards the centre costs ln(1.9)
    let back = f.curve_length(&Curve::segment(&[0.9, 0.0], &[0.0, 0.0]).unwrap()).unwrap();
    assert!((back - 1.9f64.ln()).abs() < 1e-6, "{back}");
    let h = MetricField::hilbert(ConvexBody::unit_ball(2));
    let hl = h.curve_length(&Curve::segment(&[0.0, 0.0], &[0.9, 0.0]).unwrap()).unwrap();
    assert!((hl - 0.5 * (out + back)).abs() < 1e-6);
}

#[test]
fn one_form_superposition_and_null_lagrangian() {
    let round = MetricField::round(1.0).unwrap();
    let c = [0.1, -0.2, 0.15];
    let field = round.add_one_form(&OneForm::constant(2, true, &c).unwrap()).unwrap();
    let (a, b): (Vec3, Vec3) = ([1.0, 0.0, 0.0], [0.0, 0.6, 0.8]);
    let arc = Curve::arc(&a, &b).unwrap();
    let diff = field.curve_length(&arc).unwrap() - round.curve_length(&arc).unwrap();
    let exact = c[0] * (b[0] - a[0]) + c[1] * (b[1] - a[1]) + c[2] * (b[2] - a[2]);
    assert!((diff - exact).abs() < 1e-10);
    let loop_ = Curve::latitude(25.0).unwrap();
    let d = field.curve_length(&loop_).unwrap() - round.curve_length(&loop_).unwrap();
    assert!(d.abs() < 1e-10);
}

#[test]
fn scale_average_and_symmetrization() {
    let r = MetricField::randers(&[0.3, 0.1], false).unwrap();
    let x = [0.2, -0.1, 0.0];
    let v = [0.6, 0.8, 0.0];
    let w = [-0.6, -0.8, 0.0];
    assert!((r.scale(2.5).unwrap().eval(&x, &v) - 2.5 * r.eval(&x, &v)).abs() < 1e-14);
    let s = r.symmetrize();
    assert!((s.eval(&x, &v) - s.eval(&x, &w)).abs() < 1e-14);
    assert!((s.eval(&x, &v) - 1.0).abs() < 1e-14);
    let avg = MetricField::average(&r, &r.reverse()).unwrap();
    assert!((avg.eval(&x, &v) - s.eval(&x, &v)).abs() < 1e-14);
}

#[test]
fn busemann_great_circles_have_constant_length() {
    let m = poly();
    let f = busemann_metric(&m).unwrap();
    let expect = 2.0 * m.total_mass();
    assert!((m.total_mass() - 7.0 * PI / 6.0).abs() < 1e-12);
    for pole in [[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.0, 0.6, 0.8]] {
        let l = f.curve_length(&Curve::great_circle(&pole).unwrap()).unwrap();
        assert!((l - expect).abs() / expect < 1e-3, "{pole:?}: {l} vs {expect}");
    }
}

#[test]
fn crofton_count_of_constant_density() {
    let c = 0.7;
    let m = CroftonDensity::constant(c).unwrap();
    let r = crofton_length_generic(&m, &Curve::great_circle(&[0.3, 0.4, 0.866]).unwrap(), 4).unwrap();
    assert!((r.length - 8.0 * PI * c).abs() / (8.0 * PI * c) < 1e-2);
}

#[test]
fn santalo_for_poly_density() {
    let f = busemann_metric(&poly()).unwrap();
    let r = santalo_check(&f, 3).unwrap();
    let want = 98.0 * PI * PI / 9.0;
    assert!((r.values["rhs"] - want).abs() / want < 1e-2, "{}", r.values["rhs"]);
    assert!((r.values["lhs"] - want).abs() / want < 1e-2, "{}", r.values["lhs"]);
    assert!(r.verdict.is_pass());
}

#[test]
fn perturbed_density_keeps_mass() {
    let q = [0.0, 0.6, 0.8];
    let m = perturbed_round_density(&q, 0.5, 0.2).unwrap();
    assert!(m.validate().is_ok());
    assert!(m.eval(&q) > m.eval(&[0.0, -0.8, 0.6]));
    let n = m.normalized_to(PI).unwrap();
    assert!((n.total_mass() - PI).abs() < 1e-9);
}

#[test]
fn custom_field_evaluates_closure() {
    let f = MetricField::custom(
        finsler_core::metricfield::Base::Chart { dim: 2, domain: finsler_core::metricfield::Domain::Whole },
        "twice",
        Arc::new(|_x: &Vec3, v: &Vec3| 2.0 * (v[0] * v[0] + v[1] * v[1]).sqrt()),
    )
    .unwrap();
    assert!((f.eval(&[0.0; 3], &[0.6, 0.8, 0.0]) - 2.0).abs() < 1e-14);
}
