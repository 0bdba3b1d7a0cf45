use std::f64::consts::PI;

use finsler_core::convexbody::{blaschke_body, hull2};
use finsler_core::norms::{dual_norm, linear_fit_residual, MinkowskiNorm};
use finsler_core::ConvexBody;

fn cube() -> ConvexBody {
    let mut v = Vec::new();
    for a in [-1.0, 1.0] {
        for b in [-1.0, 1.0] {
            for c in [-1.0, 1.0] {
                v.push(vec![a, b, c]);
            }
        }
    }
    ConvexBody::from_vertices(3, &v).unwrap()
}

#[test]
fn cube_support_and_measures() {
    let c = cube();
    assert!((c.support(&[0.0, 0.0, 1.0]) - 1.0).abs() < 1e-15);
    let d = 1.0 / 3f64.sqrt();
    assert!((c.support(&[d, d, d]) - 3f64.sqrt()).abs() < 1e-14);
    assert!((c.volume().unwrap() - 8.0).abs() < 1e-12);
    assert!((c.brightness(&[0.0, 0.0, 1.0]).unwrap() - 4.0).abs() < 1e-12);
    // Cauchy: ½ Σ a_i |u·n_i| = ½ · 3 · (1/√3) · 8
    assert!((c.brightness(&[d, d, d]).unwrap() - 4.0 * 3f64.sqrt()).abs() < 1e-10);
    let sam = c.surface_area_measure().unwrap();
    assert_eq!(sam.len(), 6);
    assert!(sam.iter().all(|(_, a)| (a - 4.0).abs() < 1e-12));
    let frame = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]];
    assert!((c.projection_area_k(&frame).unwrap() - 4.0).abs() < 1e-12);
}

#[test]
fn ellipse_support_formula() {
    let e = ConvexBody::ellipsoid(2, &[0.0, 0.0], &[2.0, 1.0]).unwrap();
    for k in 0..12 {
        let t = 0.3 + k as f64;
        let want = (4.0 * t.cos().powi(2) + t.sin().powi(2)).sqrt();
        assert!((e.support(&[t.cos(), t.sin()]) - want).abs() < 1e-14);
    }
}

#[test]
fn simplex_volume_and_facets() {
    let s = ConvexBody::from_vertices(
        3,
        &[vec![-0.25; 3], vec![0.75, -0.25, -0.25], vec![-0.25, 0.75, -0.25], vec![-0.25, -0.25, 0.75]],
    )
    .unwrap();
    assert!((s.volume().unwrap() - 1.0 / 6.0).abs() < 1e-12);
    let mut areas: Vec<f64> = s.surface_area_measure().unwrap().iter().map(|(_, a)| *a).collect();
    areas.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let want = [0.5, 0.5, 0.5, 3f64.sqrt() / 2.0];
    for (a, w) in areas.iter().zip(want) {
        assert!((a - w).abs() < 1e-12);
    }
}

#[test]
fn polar_of_square_is_diamond() {
    let sq = ConvexBody::from_vertices(2, &[vec![1.0, 1.0], vec![-1.0, 1.0], vec![-1.0, -1.0], vec![1.0, -1.0]]).unwrap();
    let p = sq.polar().unwrap();
    for k in 0..16 {
        let t = 0.1 + 0.4 * k as f64;
        let (c, s) = (t.cos(), t.sin());
        assert!((p.support(&[c, s]) - c.abs().max(s.abs())).abs() < 1e-12);
    }
    let ball = ConvexBody::unit_ball(2).polar().unwrap();
    assert!((ball.support(&[0.6, 0.8]) - 1.0).abs() < 1e-12);
}

#[test]
fn square_plus_rotated_square_is_octagon() {
    let s = 0.5f64.sqrt();
    let a = ConvexBody::from_vertices(2, &[vec![1.0, 1.0], vec![-1.0, 1.0], vec![-1.0, -1.0], vec![1.0, -1.0]]).unwrap();
    let bv = [[2.0 * s, 0.0], [0.0, 2.0 * s], [-2.0 * s, 0.0], [0.0, -2.0 * s]];
    let b = ConvexBody::from_vertices(2, &bv.iter().map(|p| p.to_vec()).collect::<Vec<_>>()).unwrap();
    let sum = a.minkowski_sum(&b).unwrap();
    // oracle: hull of pairwise vertex sums
    let av = [[1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0], [1.0, -1.0]];
    let pts: Vec<[f64; 2]> = av
        .iter()
        .flat_map(|p| bv.iter().map(move |q| [p[0] + q[0], p[1] + q[1]]))
        .collect();
    let hull = hull2(&pts).unwrap();
    assert_eq!(hull.len(), 8);
    for k in 0..24 {
        let t = 0.05 + 0.26 * k as f64;
        let u = [t.cos(), t.sin()];
        let want = pts.iter().map(|p| p[0] * u[0] + p[1] * u[1]).fold(f64::NEG_INFINITY, f64::max);
        assert!((sum.support(&u) - want).abs() < 1e-12);
    }
}

#[test]
fn triangle_symmetral_is_hexagon() {
    let t = ConvexBody::from_vertices(2, &[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
    let d = t.central_symmetral().unwrap();
    for k in 0..20 {
        let a = 0.17 + 0.31 * k as f64;
        let u = [a.cos(), a.sin()];
        let want = 0.5 * (t.support(&u) + t.support(&[-u[0], -u[1]]));
        assert!((d.support(&u) - want).abs() < 1e-12);
    }
    let moved = t.translate(&[0.3, -0.7]).central_symmetral().unwrap();
    assert!((moved.support(&[0.6, 0.8]) - d.support(&[0.6, 0.8])).abs() < 1e-12);
    // vol(ΔK) = 3/2 · vol(K) for triangles
    assert!((d.volume().unwrap() - 0.75).abs() < 1e-12);
}

#[test]
fn sampled_ball_volume_and_brightness() {
    let b = ConvexBody::from_support_fn(3, 3, std::sync::Arc::new(|u: &[f64; 3]| (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]).sqrt()))
        .unwrap();
    let v = b.volume().unwrap();
    assert!((v - 4.0 * PI / 3.0).abs() / (4.0 * PI / 3.0) < 2e-2);
    let br = b.brightness(&[0.3, 0.4, 0.866]).unwrap();
    assert!((br - PI).abs() / PI < 2e-2);
}

#[test]
fn blaschke_of_symmetric_body_is_itself() {
    let c = cube();
    let b = blaschke_body(&c).unwrap();
    for u in [[1.0, 0.0, 0.0], [0.0, 0.6, 0.8], [0.5, 0.5, 0.70710678]] {
        assert!((b.brightness(&u).unwrap() - c.brightness(&u).unwrap()).abs() < 1e-4 * 8.0);
    }
}

#[test]
fn randers_dual_against_dense_sampling() {
    let b = [0.4 * 0.6, 0.4 * 0.8];
    let f = move |v: &[f64]| (v[0] * v[0] + v[1] * v[1]).sqrt() + b[0] * v[0] + b[1] * v[1];
    let xi = [0.7, -1.1];
    let d = dual_norm(2, &f, &xi, None).unwrap();
    // brute force over 10⁶ directions
    let n = 1_000_000;
    let brute = (0..n)
        .map(|j| {
            let t = 2.0 * PI * j as f64 / n as f64;
            let u = [t.cos(), t.sin()];
            (xi[0] * u[0] + xi[1] * u[1]) / f(&u)
        })
        .fold(f64::NEG_INFINITY, f64::max);
    assert!((d.value - brute).abs() < 1e-5);
}

#[test]
fn l1_dual_is_linf() {
    let f = |v: &[f64]| v[0].abs() + v[1].abs();
    for xi in [[0.3, -0.9], [1.0, 0.2], [-0.5, -0.5]] {
        let d = dual_norm(2, &f, &xi, None).unwrap();
        assert!((d.value - xi[0].abs().max(xi[1].abs())).abs() < 1e-8);
    }
}

#[test]
fn randers_legendre_and_split() {
    let n = MinkowskiNorm::randers(&[0.3, 0.0]).unwrap();
    let g = n.legendre(&[0.0, 1.0]).unwrap();
    assert!((g[0] - 0.3).abs() < 1e-8 && (g[1] - 1.0).abs() < 1e-8);
    let (odd, even) = n.odd_even_split();
    assert!((odd(&[0.6, 0.8]) - 0.18).abs() < 1e-14);
    assert!((even.eval(&[0.6, 0.8]) - 1.0).abs() < 1e-14);
}

#[test]
fn cubic_fit_matches_normal_equations() {
    let k = 36;
    let dirs: Vec<Vec<f64>> = (0..k)
        .map(|j| {
            let t = 2.0 * PI * j as f64 / k as f64 + 0.1;
            vec![t.cos(), t.sin()]
        })
        .collect();
    let vals: Vec<f64> = dirs.iter().map(|u| u[0].powi(3)).collect();
    let fit = linear_fit_residual(&dirs, &vec![1.0; k], &vals).unwrap();
    // normal equations by hand: Σ u uᵀ β = Σ f u
    let (mut a11, mut a12, mut a22, mut b1, mut b2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (u, f) in dirs.iter().zip(&vals) {
        a11 += u[0] * u[0];
        a12 += u[0] * u[1];
        a22 += u[1] * u[1];
        b1 += f * u[0];
        b2 += f * u[1];
    }
    let det = a11 * a22 - a12 * a12;
    let beta = [(b1 * a22 - b2 * a12) / det, (a11 * b2 - a12 * b1) / det];
    assert!((fit.beta[0] - beta[0]).abs() < 1e-12 && (fit.beta[1] - beta[1]).abs() < 1e-12);
    assert!(fit.residual > 0.1);
    let zero = linear_fit_residual(&dirs, &vec![1.0; k], &vec![0.0; k]).unwrap();
    assert_eq!(zero.residual, 0.0);
}
