//! Convex hulls in the plane and in space.

use qhull::Qh;

use crate::error::{FinslerError, Result};
use crate::numerics::vector::{cross, dot3, sub3, Vec3};

/// Counter-clockwise hull of planar points (Andrew's monotone chain).
/// Collinear boundary points are dropped. Returns indices into `points`.
pub fn hull2(points: &[[f64; 2]]) -> Result<Vec<usize>> {
    if points.len() < 3 {
        return Err(FinslerError::Degenerate(
            "planar hull needs at least three points".into(),
        ));
    }
    let scale = points
        .iter()
        .map(|p| p[0].abs().max(p[1].abs()))
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let eps = 1e-13 * scale * scale;
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_by(|&a, &b| {
        points[a][0]
            .total_cmp(&points[b][0])
            .then(points[a][1].total_cmp(&points[b][1]))
    });
    let turn = |o: usize, a: usize, b: usize| {
        let (o, a, b) = (points[o], points[a], points[b]);
        (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
    };
    let mut lower: Vec<usize> = Vec::new();
    for &i in &idx {
        while lower.len() >= 2 && turn(lower[lower.len() - 2], lower[lower.len() - 1], i) <= eps {
            lower.pop();
        }
        lower.push(i);
    }
    let mut upper: Vec<usize> = Vec::new();
    for &i in idx.iter().rev() {
        while upper.len() >= 2 && turn(upper[upper.len() - 2], upper[upper.len() - 1], i) <= eps {
            upper.pop();
        }
        upper.push(i);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    if lower.len() < 3 {
        return Err(FinslerError::Degenerate("points are collinear".into()));
    }
    Ok(lower)
}

/// Triangulated boundary of the convex hull of points in R³. Triangles are
/// oriented counter-clockwise when seen from outside.
#[derive(Debug, Clone)]
pub struct Hull3 {
    pub triangles: Vec<[usize; 3]>,
    /// Absolute roundoff scale of the input.
    pub eps: f64,
}

/// Convex hull in R³ by Quickhull (Qhull, triangulated output).
pub fn hull3(points: &[Vec3]) -> Result<Hull3> {
    if points.len() < 4 {
        return Err(FinslerError::Degenerate(
            "spatial hull needs at least four points".into(),
        ));
    }
    if points.iter().any(|p| !p.iter().all(|c| c.is_finite())) {
        return Err(FinslerError::NonFinite("hull input".into()));
    }
    let scale = points
        .iter()
        .map(|p| p[0].abs().max(p[1].abs()).max(p[2].abs()))
        .fold(0.0, f64::max);
    if scale == 0.0 {
        return Err(FinslerError::Degenerate("all points coincide".into()));
    }
    let qh = Qh::builder()
        .compute(true)
        .triangulate(true)
        .capture_stdout(true)
        .capture_stderr(true)
        .build_from_iter(points.iter().map(|p| *p))
        .map_err(|e| FinslerError::Degenerate(format!("hull: {e}")))?;
    let mut triangles = Vec::with_capacity(qh.num_facets());
    for f in qh.facets() {
        let ids: Vec<usize> = match f.vertices() {
            Some(vs) => vs.iter().filter_map(|v| v.index(&qh)).collect(),
            None => continue,
        };
        if ids.len() != 3 {
            continue;
        }
        let mut t = [ids[0], ids[1], ids[2]];
        let n = cross(&sub3(&points[t[1]], &points[t[0]]), &sub3(&points[t[2]], &points[t[0]]));
        let outward = match f.normal() {
            Some(q) => dot3(&n, &[q[0], q[1], q[2]]) >= 0.0,
            None => true,
        };
        if !outward {
            t.swap(1, 2);
        }
        triangles.push(t);
    }
    Ok(Hull3 {
        triangles,
        eps: 1e-12 * scale,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_with_interior_point() {
        let pts = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [0.5, 0.5], [0.5, 0.0]];
        let h = hull2(&pts).unwrap();
        assert_eq!(h.len(), 4);
        assert!(!h.contains(&4) && !h.contains(&5));
    }

    #[test]
    fn cube_hull_has_twelve_triangles() {
        let mut pts = Vec::new();
        for i in 0..8 {
            pts.push([
                (i & 1) as f64 * 2.0 - 1.0,
                ((i >> 1) & 1) as f64 * 2.0 - 1.0,
                ((i >> 2) & 1) as f64 * 2.0 - 1.0,
            ]);
        }
        pts.push([0.1, 0.2, -0.3]);
        let h = hull3(&pts).unwrap();
        assert_eq!(h.triangles.len(), 12);
        assert!(h.triangles.iter().all(|t| !t.contains(&8)));
    }

    #[test]
    fn coplanar_input_is_rejected() {
        let pts = [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [1.0, 1.0, 0.0]];
        assert!(matches!(hull3(&pts), Err(FinslerError::Degenerate(_))));
    }
}
