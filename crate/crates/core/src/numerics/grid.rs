//! Quadrature grids of unit directions on S¹ and S².

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use super::summation::CompensatedSum;
use super::vector::{cross, dot3, normalize3, tangent_frame, Vec3};
use crate::error::{check_dim, check_finite, FinslerError, Result};

/// Largest supported refinement level on S² (163 842 nodes).
pub const MAX_LEVEL_3D: u32 = 7;
/// Largest supported refinement level on S¹ (2^22 nodes).
pub const MAX_LEVEL_2D: u32 = 16;

/// A weighted set of unit directions.
///
/// On S¹ the nodes are `2^(level+6)` equally spaced angles with equal weights.
/// On S² the nodes are the vertices of a recursively subdivided icosahedron
/// (`10·4^level + 2` nodes) weighted by the areas of their spherical Voronoi
/// cells. Both grids contain `-u` with `u` and the weights are symmetrized
/// over antipodal pairs, so odd integrands integrate to zero exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionGrid {
    dim: usize,
    level: u32,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    antipodes: Vec<usize>,
}

impl DirectionGrid {
    /// Builds the grid of the given dimension and refinement level.
    pub fn build(dim: usize, level: u32) -> Result<Self> {
        check_dim(dim)?;
        match dim {
            2 => {
                if level > MAX_LEVEL_2D {
                    return Err(FinslerError::InvalidArgument(format!(
                        "circle grid level {level} exceeds {MAX_LEVEL_2D}"
                    )));
                }
                Ok(Self::circle(level))
            }
            _ => {
                if level > MAX_LEVEL_3D {
                    return Err(FinslerError::InvalidArgument(format!(
                        "sphere grid level {level} exceeds {MAX_LEVEL_3D}"
                    )));
                }
                Ok(Self::icosphere(level))
            }
        }
    }

    /// Shared, lazily built grid. Grids are immutable so they can be reused
    /// freely across threads.
    pub fn cached(dim: usize, level: u32) -> Result<Arc<Self>> {
        static CACHE: OnceLock<Mutex<HashMap<(usize, u32), Arc<DirectionGrid>>>> =
            OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(g) = cache.lock().expect("grid cache poisoned").get(&(dim, level)) {
            return Ok(g.clone());
        }
        let grid = Arc::new(Self::build(dim, level)?);
        cache
            .lock()
            .expect("grid cache poisoned")
            .insert((dim, level), grid.clone());
        Ok(grid)
    }

    fn circle(level: u32) -> Self {
        let n = 1usize << (level + 6);
        let mut nodes = Vec::with_capacity(2 * n);
        for i in 0..n {
            let t = 2.0 * PI * i as f64 / n as f64;
            nodes.push(t.cos());
            nodes.push(t.sin());
        }
        let weights = vec![2.0 * PI / n as f64; n];
        let antipodes = (0..n).map(|i| (i + n / 2) % n).collect();
        Self {
            dim: 2,
            level,
            nodes,
            weights,
            antipodes,
        }
    }

    fn icosphere(level: u32) -> Self {
        let (verts, tris) = subdivided_icosahedron(level);
        let n = verts.len();

        let mut incident: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (t, tri) in tris.iter().enumerate() {
            for &v in tri {
                incident[v].push(t);
            }
        }
        let centers: Vec<Vec3> = tris
            .iter()
            .map(|&[a, b, c]| {
                let (pa, pb, pc) = (verts[a], verts[b], verts[c]);
                let n = cross(
                    &[pb[0] - pa[0], pb[1] - pa[1], pb[2] - pa[2]],
                    &[pc[0] - pa[0], pc[1] - pa[1], pc[2] - pa[2]],
                );
                let n = normalize3(&n);
                if dot3(&n, &pa) < 0.0 {
                    [-n[0], -n[1], -n[2]]
                } else {
                    n
                }
            })
            .collect();

        let mut weights = vec![0.0; n];
        for v in 0..n {
            let p = verts[v];
            let (e1, e2) = tangent_frame(&p);
            let mut ring: Vec<(f64, Vec3)> = incident[v]
                .iter()
                .map(|&t| {
                    let c = centers[t];
                    (dot3(&c, &e2).atan2(dot3(&c, &e1)), c)
                })
                .collect();
            ring.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut area = CompensatedSum::new();
            for k in 0..ring.len() {
                let a = ring[k].1;
                let b = ring[(k + 1) % ring.len()].1;
                area.add(spherical_triangle_area(&p, &a, &b));
            }
            weights[v] = area.value();
        }

        let antipodes = antipode_map(&verts);
        let mut sym: Vec<f64> = (0..n)
            .map(|i| 0.5 * (weights[i] + weights[antipodes[i]]))
            .collect();
        let total: f64 = {
            let mut s = CompensatedSum::new();
            sym.iter().for_each(|&w| s.add(w));
            s.value()
        };
        let scale = 4.0 * PI / total;
        sym.iter_mut().for_each(|w| *w *= scale);

        let mut nodes = Vec::with_capacity(3 * n);
        for p in &verts {
            nodes.extend_from_slice(p);
        }
        Self {
            dim: 3,
            level,
            nodes,
            weights: sym,
            antipodes,
        }
    }

    /// The same grid rotated by the matrix `r` (rows act on node vectors).
    pub fn rotated(&self, r: &[[f64; 3]; 3]) -> Self {
        let mut out = self.clone();
        if self.dim == 3 {
            for i in 0..self.len() {
                let u = self.node3(i);
                let ru = super::vector::mat_vec3(r, &u);
                out.nodes[3 * i..3 * i + 3].copy_from_slice(&ru);
            }
        } else {
            let (c, s) = (r[0][0], r[1][0]);
            for i in 0..self.len() {
                let u = self.node(i);
                out.nodes[2 * i] = c * u[0] - s * u[1];
                out.nodes[2 * i + 1] = s * u[0] + c * u[1];
            }
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn node(&self, i: usize) -> &[f64] {
        &self.nodes[self.dim * i..self.dim * (i + 1)]
    }

    /// Node `i` padded to three components.
    pub fn node3(&self, i: usize) -> Vec3 {
        super::vector::to3(self.node(i))
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Index of the node `-u_i`.
    pub fn antipode(&self, i: usize) -> usize {
        self.antipodes[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[f64], f64)> + '_ {
        (0..self.len()).map(move |i| (self.node(i), self.weights[i]))
    }

    /// Total measure of the sphere, `2π` or `4π`.
    pub fn total_measure(&self) -> f64 {
        if self.dim == 2 {
            2.0 * PI
        } else {
            4.0 * PI
        }
    }

    /// `Σ w_i f(u_i)` in node order with compensated summation.
    pub fn integrate<F>(&self, f: F) -> Result<f64>
    where
        F: Fn(&[f64]) -> f64,
    {
        let mut sum = CompensatedSum::new();
        for i in 0..self.len() {
            let v = f(self.node(i));
            check_finite(v, "sphere integrand")?;
            sum.add(self.weights[i] * v);
        }
        Ok(sum.value())
    }

    /// `Σ w_i values_i`.
    pub fn integrate_values(&self, values: &[f64]) -> Result<f64> {
        if values.len() != self.len() {
            return Err(FinslerError::DimensionMismatch {
                expected: self.len(),
                found: values.len(),
            });
        }
        let mut sum = CompensatedSum::new();
        for (v, w) in values.iter().zip(&self.weights) {
            check_finite(*v, "sphere integrand")?;
            sum.add(w * v);
        }
        Ok(sum.value())
    }

    /// Position of the nearest node (largest dot product).
    pub fn nearest(&self, u: &[f64]) -> usize {
        let mut best = (f64::NEG_INFINITY, 0);
        for i in 0..self.len() {
            let d = super::vector::dot(self.node(i), u);
            if d > best.0 {
                best = (d, i);
            }
        }
        best.1
    }
}

/// Area of the spherical triangle with unit vertices `a, b, c`.
pub fn spherical_triangle_area(a: &Vec3, b: &Vec3, c: &Vec3) -> f64 {
    let num = dot3(a, &cross(b, c)).abs();
    let den = 1.0 + dot3(a, b) + dot3(b, c) + dot3(c, a);
    2.0 * num.atan2(den)
}

fn antipode_map(verts: &[Vec3]) -> Vec<usize> {
    let key = |p: &Vec3| -> (i64, i64, i64) {
        let q = |x: f64| (x * 1e9).round() as i64;
        (q(p[0]), q(p[1]), q(p[2]))
    };
    let index: HashMap<(i64, i64, i64), usize> =
        verts.iter().enumerate().map(|(i, p)| (key(p), i)).collect();
    verts
        .iter()
        .map(|p| index[&key(&[-p[0], -p[1], -p[2]])])
        .collect()
}

/// Vertices and faces of the icosahedron subdivided `level` times, projected
/// onto the unit sphere.
pub fn subdivided_icosahedron(level: u32) -> (Vec<Vec3>, Vec<[usize; 3]>) {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let raw = [
        [-1.0, phi, 0.0],
        [1.0, phi, 0.0],
        [-1.0, -phi, 0.0],
        [1.0, -phi, 0.0],
        [0.0, -1.0, phi],
        [0.0, 1.0, phi],
        [0.0, -1.0, -phi],
        [0.0, 1.0, -phi],
        [phi, 0.0, -1.0],
        [phi, 0.0, 1.0],
        [-phi, 0.0, -1.0],
        [-phi, 0.0, 1.0],
    ];
    let mut verts: Vec<Vec3> = raw.iter().map(normalize3).collect();
    let mut tris: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..level {
        let mut midpoint: HashMap<(usize, usize), usize> = HashMap::new();
        let mut next = Vec::with_capacity(tris.len() * 4);
        let mut mid = |a: usize, b: usize, verts: &mut Vec<Vec3>| -> usize {
            let key = (a.min(b), a.max(b));
            *midpoint.entry(key).or_insert_with(|| {
                let (p, q) = (verts[a], verts[b]);
                verts.push(normalize3(&[p[0] + q[0], p[1] + q[1], p[2] + q[2]]));
                verts.len() - 1
            })
        };
        for &[a, b, c] in &tris {
            let ab = mid(a, b, &mut verts);
            let bc = mid(b, c, &mut verts);
            let ca = mid(c, a, &mut verts);
            next.push([a, ab, ca]);
            next.push([b, bc, ab]);
            next.push([c, ca, bc]);
            next.push([ab, bc, ca]);
        }
        tris = next;
    }
    (verts, tris)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn node_counts() {
        for level in 0..4 {
            let g = DirectionGrid::build(3, level).unwrap();
            assert_eq!(g.len(), 10 * 4usize.pow(level) + 2);
            let c = DirectionGrid::build(2, level).unwrap();
            assert_eq!(c.len(), 1 << (level + 6));
        }
    }

    #[test]
    fn weights_sum_to_sphere_area() {
        let g = DirectionGrid::build(3, 3).unwrap();
        let total: f64 = g.weights().iter().sum();
        assert!((total - 4.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn antipodes_are_antipodal() {
        let g = DirectionGrid::build(3, 2).unwrap();
        for i in 0..g.len() {
            let (u, w) = (g.node3(i), g.node3(g.antipode(i)));
            assert!((u[0] + w[0]).abs() + (u[1] + w[1]).abs() + (u[2] + w[2]).abs() < 1e-12);
            assert_eq!(g.weight(i), g.weight(g.antipode(i)));
        }
    }

    #[test]
    fn icosahedral_rule_integrates_low_degree_polynomials_exactly() {
        // Invariance under the icosahedral group kills all harmonics of
        // degree 1..=5, so these are exact at every level.
        let g = DirectionGrid::build(3, 1).unwrap();
        let q = g.integrate(|u| u[2] * u[2]).unwrap();
        assert!((q - 4.0 * PI / 3.0).abs() < 1e-13);
        let q4 = g.integrate(|u| u[0].powi(4)).unwrap();
        assert!((q4 - 4.0 * PI / 5.0).abs() < 1e-13);
        let odd = g.integrate(|u| u[0] * u[1] * u[1] + u[2].powi(5)).unwrap();
        assert!(odd.abs() < 1e-14);
    }

    #[test]
    fn unit_integral() {
        let g = DirectionGrid::build(3, 4).unwrap();
        assert!((g.integrate(|_| 1.0).unwrap() - 4.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn abs_cos_on_circle() {
        // The kinks at ±π/2 fall on nodes, so the trapezoid rule converges
        // quadratically; level 8 gives 16384 nodes.
        let g = DirectionGrid::build(2, 8).unwrap();
        let q = g.integrate(|u| u[0].abs()).unwrap();
        assert!((q - 4.0).abs() < 1e-6, "{q}");
    }

    #[test]
    fn non_finite_integrand_is_rejected() {
        let g = DirectionGrid::build(2, 0).unwrap();
        assert!(g.integrate(|u| 1.0 / u[1]).is_err());
        assert!(g.integrate(|_| f64::NAN).is_err());
    }

    #[test]
    fn bad_dimension() {
        assert_eq!(
            DirectionGrid::build(4, 0),
            Err(FinslerError::UnsupportedDimension(4))
        );
    }
}
