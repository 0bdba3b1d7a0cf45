use std::f64::consts::PI;

use finsler_core::crofton::crofton_length_generic;
use finsler_core::geodesic::{
    geodesic_trace, motion_integral_ratio, verdict_below, GeodesicOptions, TransversalPatch,
};
use finsler_core::numerics::vector::{normalize3, Vec3};
use finsler_core::rigidity::chakerian_residuals;
use finsler_core::report::Verdict;
use finsler_core::{ConvexBody, CroftonDensity, Curve, MetricField};
use proptest::prelude::*;

fn unit() -> impl Strategy<Value = Vec3> {
    (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0)
        .prop_filter("nonzero", |(a, b, c)| a * a + b * b + c * c > 1e-2)
        .prop_map(|(a, b, c)| normalize3(&[a, b, c]))
}

fn tangent(x: &Vec3, w: &Vec3) -> Vec3 {
    let d = x[0] * w[0] + x[1] * w[1] + x[2] * w[2];
    [w[0] - d * x[0], w[1] - d * x[1], w[2] - d * x[2]]
}

fn busemann() -> MetricField {
    MetricField::busemann(CroftonDensity::poly(&[0.0, 0.6, 0.8], &[0.25, 0.125]).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn busemann_fibers_are_even_and_homogeneous(x in unit(), w in unit(), c in 0.1f64..5.0) {
        let v = tangent(&x, &w);
        prop_assume!(v.iter().map(|a| a * a).sum::<f64>() > 1e-4);
        let f = busemann();
        let a = f.eval(&x, &v);
        let b = f.eval(&x, &[-v[0], -v[1], -v[2]]);
        let s = f.eval(&x, &[c * v[0], c * v[1], c * v[2]]);
        prop_assert!((a - b).abs() <= 1e-12 * a);
        prop_assert!((s - c * a).abs() <= 1e-12 * s.max(1.0));
    }

    #[test]
    fn symmetral_is_no_smaller(r in proptest::collection::vec(0.2f64..1.0, 3..9), phase in 0.0f64..1.0) {
        // random polygon from angles with bounded jitter keeps the origin inside
        let n = r.len();
        let pts: Vec<Vec<f64>> = r
            .iter()
            .enumerate()
            .map(|(k, rk)| {
                let t = 2.0 * PI * (k as f64 + 0.4 * phase) / n as f64;
                vec![rk * t.cos(), rk * t.sin()]
            })
            .collect();
        let k = ConvexBody::from_vertices(2, &pts).unwrap();
        let d = k.central_symmetral().unwrap();
        prop_assert!(d.volume().unwrap() >= k.volume().unwrap() * (1.0 - 1e-12));
    }

    #[test]
    fn constant_density_counts_eight_pi_c(c in 0.05f64..3.0, pole in unit()) {
        let m = CroftonDensity::constant(c).unwrap();
        let r = crofton_length_generic(&m, &Curve::great_circle(&pole).unwrap(), 3).unwrap();
        prop_assert!((r.length - 8.0 * PI * c).abs() <= 3e-2 * 8.0 * PI * c);
    }

    #[test]
    fn translates_and_dilates_pass_chakerian(s in 0.3f64..2.0, tx in -1.0f64..1.0, ty in -1.0f64..1.0, tz in -1.0f64..1.0) {
        let gauge = ConvexBody::ellipsoid(3, &[0.0; 3], &[1.0, 0.7, 1.3]).unwrap();
        let k = gauge.scale(s).unwrap().translate(&[tx, ty, tz]);
        let r = chakerian_residuals(&k, &gauge, 1).unwrap();
        prop_assert!(r.width < 1e-9 && r.brightness < 1e-9 && r.center < 1e-9);
        prop_assert!((r.width_factor - s).abs() < 1e-9);
    }

    #[test]
    fn verdict_is_monotone_in_residual(a in 0.0f64..1.0, b in 0.0f64..1.0, tol in 1e-3f64..0.5) {
        let rank = |v: Verdict| match v {
            Verdict::Pass => 0,
            Verdict::Inconclusive => 1,
            Verdict::Fail => 2,
        };
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(rank(Verdict::from_residual(lo, tol)) <= rank(Verdict::from_residual(hi, tol)));
        prop_assert_eq!(verdict_below(&[lo, hi], tol), Verdict::from_residual(hi, tol));
    }

    #[test]
    fn geodesic_energy_is_conserved(x in unit(), w in unit()) {
        let v = tangent(&x, &w);
        prop_assume!(v.iter().map(|a| a * a).sum::<f64>() > 1e-2);
        let tr = geodesic_trace(&busemann(), &x, &v, 1.0, &GeodesicOptions::default()).unwrap();
        prop_assert!(tr.energy_drift() < 1e-7, "{}", tr.energy_drift());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn motion_ratio_of_scaling_is_constant(c in 0.2f64..4.0) {
        let round = MetricField::round(1.0).unwrap();
        let patch = TransversalPatch::meridian(0.3, (0.4, 1.0), 4, 4).unwrap();
        let r = motion_integral_ratio(&round, &round.scale(c).unwrap(), &patch).unwrap();
        prop_assert!(r.nu.iter().all(|v| (v - c).abs() < 1e-6 * c));
    }
}
