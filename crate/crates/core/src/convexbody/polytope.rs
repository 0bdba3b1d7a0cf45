//! Convex polytopes in R² and R³ with explicit facets.

use std::collections::HashMap;
use std::f64::consts::PI;

use super::hull::{hull2, hull3};
use crate::error::{check_dim, FinslerError, Result};
use crate::numerics::vector::{
    add3, cross, dot3, norm3, normalize3, scale3, sub3, tangent_frame, Vec3,
};
use crate::numerics::{spherical_triangle_area, CompensatedSum};

/// A facet (an edge in the plane) with outward unit normal, support value
/// `offset = normal·x` on the facet, and (n-1)-dimensional measure `area`.
#[derive(Debug, Clone, PartialEq)]
pub struct Facet {
    pub normal: Vec3,
    pub offset: f64,
    pub area: f64,
    /// Corner indices into the polytope's vertex list, in cyclic order.
    pub vertices: Vec<usize>,
}

/// Full-dimensional convex polytope. Planar polytopes keep a zero third
/// coordinate in every vertex and normal.
#[derive(Debug, Clone, PartialEq)]
pub struct Polytope {
    dim: usize,
    vertices: Vec<Vec3>,
    facets: Vec<Facet>,
}

/// Polytope `{x : u_i·x ≤ h_i}` together with per-constraint data.
#[derive(Debug, Clone)]
pub struct HalfspacePolytope {
    pub polytope: Polytope,
    /// Facet measure of constraint `i`; zero for redundant constraints.
    pub areas: Vec<f64>,
    /// Pairs of constraints whose facets meet in a ridge, with the ridge
    /// measure (edge length in R³, 1 in R²).
    pub ridges: Vec<(usize, usize, f64)>,
}

impl Polytope {
    /// Convex hull of the given points.
    pub fn from_points(dim: usize, points: &[Vec<f64>]) -> Result<Self> {
        check_dim(dim)?;
        for p in points {
            if p.len() != dim {
                return Err(FinslerError::DimensionMismatch {
                    expected: dim,
                    found: p.len(),
                });
            }
            if !p.iter().all(|c| c.is_finite()) {
                return Err(FinslerError::NonFinite("polytope vertex".into()));
            }
        }
        let pts: Vec<Vec3> = points
            .iter()
            .map(|p| crate::numerics::vector::to3(p))
            .collect();
        Self::from_points3(dim, &pts)
    }

    pub(crate) fn from_points3(dim: usize, pts: &[Vec3]) -> Result<Self> {
        if dim == 2 {
            let planar: Vec<[f64; 2]> = pts.iter().map(|p| [p[0], p[1]]).collect();
            let ring = hull2(&planar)?;
            let vertices: Vec<Vec3> = ring.iter().map(|&i| [planar[i][0], planar[i][1], 0.0]).collect();
            let m = vertices.len();
            let facets = (0..m)
                .map(|k| {
                    let (a, b) = (vertices[k], vertices[(k + 1) % m]);
                    let d = sub3(&b, &a);
                    let len = norm3(&d);
                    let normal = [d[1] / len, -d[0] / len, 0.0];
                    Facet {
                        normal,
                        offset: dot3(&normal, &a),
                        area: len,
                        vertices: vec![k, (k + 1) % m],
                    }
                })
                .collect();
            return Ok(Self {
                dim,
                vertices,
                facets,
            });
        }
        let hull = hull3(pts)?;
        let scale = pts.iter().map(norm3).fold(0.0, f64::max);
        let groups = group_coplanar(pts, &hull.triangles, 1e-10, 1e-10 * scale);

        let mut vertex_index: HashMap<usize, usize> = HashMap::new();
        let mut vertices: Vec<Vec3> = Vec::new();
        let mut facets = Vec::with_capacity(groups.len());
        for g in groups {
            let corners = ordered_corners(pts, &g.points, &g.normal)?;
            let ids = corners
                .iter()
                .map(|&p| {
                    *vertex_index.entry(p).or_insert_with(|| {
                        vertices.push(pts[p]);
                        vertices.len() - 1
                    })
                })
                .collect();
            facets.push(Facet {
                normal: g.normal,
                offset: g.offset,
                area: g.area,
                vertices: ids,
            });
        }
        Ok(Self {
            dim,
            vertices,
            facets,
        })
    }

    /// Intersection of the halfspaces `u_i·x ≤ h_i`. Requires every `h_i > 0`
    /// (origin in the interior) and normals that positively span the space.
    pub fn from_halfspaces(dim: usize, normals: &[Vec3], offsets: &[f64]) -> Result<HalfspacePolytope> {
        check_dim(dim)?;
        if normals.len() != offsets.len() {
            return Err(FinslerError::DimensionMismatch {
                expected: normals.len(),
                found: offsets.len(),
            });
        }
        let min = offsets.iter().cloned().fold(f64::INFINITY, f64::min);
        if !(min > 0.0) {
            return Err(FinslerError::OriginNotInterior(min));
        }
        let dual: Vec<Vec3> = normals
            .iter()
            .zip(offsets)
            .map(|(u, h)| scale3(1.0 / h, &normalize3(u)))
            .collect();
        if dim == 2 {
            halfspaces2(&dual)
        } else {
            halfspaces3(&dual)
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    /// Vertices truncated to the ambient dimension.
    pub fn vertex_list(&self) -> Vec<Vec<f64>> {
        self.vertices.iter().map(|v| v[..self.dim].to_vec()).collect()
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn support(&self, u: &Vec3) -> f64 {
        self.vertices
            .iter()
            .map(|v| dot3(v, u))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn volume(&self) -> f64 {
        let mut s = CompensatedSum::new();
        for f in &self.facets {
            s.add(f.area * f.offset);
        }
        s.value() / self.dim as f64
    }

    pub fn surface_area(&self) -> f64 {
        self.facets.iter().map(|f| f.area).sum()
    }

    /// Measure of the projection onto `u^⊥` (Cauchy's formula).
    pub fn brightness(&self, u: &Vec3) -> f64 {
        0.5 * self
            .facets
            .iter()
            .map(|f| dot3(u, &f.normal).abs() * f.area)
            .sum::<f64>()
    }

    pub fn translate(&self, t: &Vec3) -> Self {
        let mut out = self.clone();
        for v in &mut out.vertices {
            *v = add3(v, t);
        }
        for f in &mut out.facets {
            f.offset += dot3(&f.normal, t);
        }
        out
    }

    /// Dilation by `c > 0`.
    pub fn scale(&self, c: f64) -> Self {
        let mut out = self.clone();
        for v in &mut out.vertices {
            *v = scale3(c, v);
        }
        let p = (self.dim - 1) as i32;
        for f in &mut out.facets {
            f.offset *= c;
            f.area *= c.powi(p);
        }
        out
    }

    /// `-P`.
    pub fn reflect(&self) -> Self {
        let mut out = self.clone();
        for v in &mut out.vertices {
            *v = scale3(-1.0, v);
        }
        for f in &mut out.facets {
            f.normal = scale3(-1.0, &f.normal);
        }
        out
    }

    pub fn vertex_centroid(&self) -> Vec3 {
        let n = self.vertices.len() as f64;
        let mut c = [0.0; 3];
        for v in &self.vertices {
            c = add3(&c, v);
        }
        scale3(1.0 / n, &c)
    }

    /// Steiner point `Σ ψ(v) v`, where `ψ(v)` is the normalized external
    /// angle (solid angle of the normal cone) at vertex `v`.
    pub fn steiner_point(&self) -> Vec3 {
        let mut incident: Vec<Vec<usize>> = vec![Vec::new(); self.vertices.len()];
        for (fi, f) in self.facets.iter().enumerate() {
            for &v in &f.vertices {
                incident[v].push(fi);
            }
        }
        let mut s = [0.0; 3];
        for (vi, inc) in incident.iter().enumerate() {
            if inc.len() < self.dim {
                continue;
            }
            let psi = if self.dim == 2 {
                let (a, b) = (self.facets[inc[0]].normal, self.facets[inc[1]].normal);
                dot3(&a, &b).clamp(-1.0, 1.0).acos() / (2.0 * PI)
            } else {
                let normals: Vec<Vec3> = inc.iter().map(|&f| self.facets[f].normal).collect();
                let mut axis = [0.0; 3];
                for n in &normals {
                    axis = add3(&axis, n);
                }
                let axis = normalize3(&axis);
                let (e1, e2) = tangent_frame(&axis);
                let mut ring: Vec<(f64, Vec3)> = normals
                    .iter()
                    .map(|n| (dot3(n, &e2).atan2(dot3(n, &e1)), *n))
                    .collect();
                ring.sort_by(|a, b| a.0.total_cmp(&b.0));
                let mut area = 0.0;
                for k in 1..ring.len() - 1 {
                    area += spherical_triangle_area(&ring[0].1, &ring[k].1, &ring[k + 1].1);
                }
                area / (4.0 * PI)
            };
            s = add3(&s, &scale3(psi, &self.vertices[vi]));
        }
        s
    }

    /// Polar body `{y : x·y ≤ 1 ∀x ∈ P}`.
    pub fn polar(&self) -> Result<Self> {
        let min = self.facets.iter().map(|f| f.offset).fold(f64::INFINITY, f64::min);
        if !(min > 0.0) {
            return Err(FinslerError::OriginNotInterior(min));
        }
        let pts: Vec<Vec3> = self
            .facets
            .iter()
            .map(|f| scale3(1.0 / f.offset, &f.normal))
            .collect();
        Self::from_points3(self.dim, &pts)
    }

    /// Smallest facet offset; positive iff the origin is interior.
    pub fn min_offset(&self) -> f64 {
        self.facets.iter().map(|f| f.offset).fold(f64::INFINITY, f64::min)
    }

    pub fn contains(&self, x: &Vec3) -> bool {
        self.facets.iter().all(|f| dot3(&f.normal, x) <= f.offset)
    }

    /// Euclidean distance from an interior point to the boundary.
    pub fn boundary_distance(&self, x: &Vec3) -> f64 {
        self.facets
            .iter()
            .map(|f| f.offset - dot3(&f.normal, x))
            .fold(f64::INFINITY, f64::min)
    }

    /// Gauge of `P - x` at `v`: the least `t > 0` with `x + v/t ∈ P`.
    pub fn gauge_from(&self, x: &Vec3, v: &Vec3) -> f64 {
        self.facets
            .iter()
            .map(|f| dot3(&f.normal, v) / (f.offset - dot3(&f.normal, x)))
            .fold(0.0, f64::max)
    }

    /// Area of the orthogonal projection onto the plane spanned by the
    /// orthonormal vectors `e1, e2`.
    pub fn projected_area(&self, e1: &Vec3, e2: &Vec3) -> Result<f64> {
        let pts: Vec<[f64; 2]> = self
            .vertices
            .iter()
            .map(|v| [dot3(v, e1), dot3(v, e2)])
            .collect();
        let ring = hull2(&pts)?;
        Ok(polygon_area(&ring.iter().map(|&i| pts[i]).collect::<Vec<_>>()))
    }
}

/// Signed area of a planar polygon given in order.
pub fn polygon_area(ring: &[[f64; 2]]) -> f64 {
    let m = ring.len();
    let mut s = CompensatedSum::new();
    for k in 0..m {
        let (a, b) = (ring[k], ring[(k + 1) % m]);
        s.add(a[0] * b[1] - a[1] * b[0]);
    }
    0.5 * s.value()
}

struct CoplanarGroup {
    normal: Vec3,
    offset: f64,
    area: f64,
    points: Vec<usize>,
}

fn group_coplanar(pts: &[Vec3], tris: &[[usize; 3]], ang_tol: f64, off_tol: f64) -> Vec<CoplanarGroup> {
    let mut groups: Vec<CoplanarGroup> = Vec::new();
    let scale = pts.iter().map(norm3).fold(0.0, f64::max);
    // slivers have unreliable normals; attach them to a plane afterwards
    let mut slivers = Vec::new();
    for t in tris {
        let n = cross(&sub3(&pts[t[1]], &pts[t[0]]), &sub3(&pts[t[2]], &pts[t[0]]));
        let len = norm3(&n);
        if len <= 1e-9 * scale * scale {
            slivers.push(*t);
            continue;
        }
        let normal = scale3(1.0 / len, &n);
        let offset = dot3(&normal, &pts[t[0]]);
        let area = 0.5 * len;
        let hit = groups.iter_mut().find(|g| {
            dot3(&g.normal, &normal) > 1.0 - ang_tol && (g.offset - offset).abs() <= off_tol
        });
        match hit {
            Some(g) => {
                // area-weighted plane keeps the merged normal well defined
                let w = g.area + area;
                g.normal = normalize3(&add3(&scale3(g.area / w, &g.normal), &scale3(area / w, &normal)));
                g.offset = (g.offset * g.area + offset * area) / w;
                g.area = w;
                for &v in t {
                    if !g.points.contains(&v) {
                        g.points.push(v);
                    }
                }
            }
            None => groups.push(CoplanarGroup {
                normal,
                offset,
                area,
                points: t.to_vec(),
            }),
        }
    }
    let plane_tol = 1e-9 * scale.max(1.0);
    for t in slivers {
        let hit = groups
            .iter_mut()
            .find(|g| t.iter().all(|&v| (dot3(&g.normal, &pts[v]) - g.offset).abs() <= plane_tol));
        if let Some(g) = hit {
            for &v in &t {
                if !g.points.contains(&v) {
                    g.points.push(v);
                }
            }
        }
    }
    groups
}

/// Corners of a planar convex point set, counter-clockwise about `normal`.
fn ordered_corners(pts: &[Vec3], ids: &[usize], normal: &Vec3) -> Result<Vec<usize>> {
    if ids.len() == 3 {
        let (a, b, c) = (pts[ids[0]], pts[ids[1]], pts[ids[2]]);
        let n = cross(&sub3(&b, &a), &sub3(&c, &a));
        return Ok(if dot3(&n, normal) >= 0.0 {
            ids.to_vec()
        } else {
            vec![ids[0], ids[2], ids[1]]
        });
    }
    let (e1, e2) = tangent_frame(normal);
    let planar: Vec<[f64; 2]> = ids.iter().map(|&i| [dot3(&pts[i], &e1), dot3(&pts[i], &e2)]).collect();
    let ring = hull2(&planar)?;
    Ok(ring.into_iter().map(|k| ids[k]).collect())
}

fn halfspaces2(dual: &[Vec3]) -> Result<HalfspacePolytope> {
    let planar: Vec<[f64; 2]> = dual.iter().map(|q| [q[0], q[1]]).collect();
    let ring = hull2(&planar)?;
    let m = ring.len();
    // dual edge k joins ring[k] and ring[k+1]; its pole is a primal vertex
    let mut verts = Vec::with_capacity(m);
    for k in 0..m {
        let (a, b) = (planar[ring[k]], planar[ring[(k + 1) % m]]);
        let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
        let n = [dy, -dx];
        let d = n[0] * a[0] + n[1] * a[1];
        if !(d > 0.0) {
            return Err(FinslerError::Degenerate(
                "normals do not positively span the plane".into(),
            ));
        }
        verts.push([n[0] / d, n[1] / d, 0.0]);
    }
    let mut areas = vec![0.0; dual.len()];
    let mut facets = Vec::with_capacity(m);
    let mut ridges = Vec::with_capacity(m);
    for k in 0..m {
        let j = ring[k];
        let prev = (k + m - 1) % m;
        let len = norm3(&sub3(&verts[k], &verts[prev]));
        areas[j] = len;
        let u = normalize3(&dual[j]);
        facets.push(Facet {
            normal: u,
            offset: 1.0 / norm3(&dual[j]),
            area: len,
            vertices: vec![prev, k],
        });
        ridges.push((j, ring[(k + 1) % m], 1.0));
    }
    Ok(HalfspacePolytope {
        polytope: Polytope {
            dim: 2,
            vertices: verts,
            facets,
        },
        areas,
        ridges,
    })
}

fn halfspaces3(dual: &[Vec3]) -> Result<HalfspacePolytope> {
    let hull = hull3(dual)?;
    let scale = dual.iter().map(norm3).fold(0.0, f64::max);
    let groups = group_coplanar(dual, &hull.triangles, 1e-12, 1e-12 * scale);

    let mut verts: Vec<Vec3> = Vec::with_capacity(groups.len());
    let mut around: Vec<Vec<usize>> = vec![Vec::new(); dual.len()];
    let mut ridge_ends: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for g in &groups {
        if !(g.offset > 0.0) {
            return Err(FinslerError::Degenerate(
                "normals do not positively span space".into(),
            ));
        }
        let vid = verts.len();
        verts.push(scale3(1.0 / g.offset, &g.normal));
        let corners = ordered_corners(dual, &g.points, &g.normal)?;
        let c = corners.len();
        for k in 0..c {
            let (a, b) = (corners[k], corners[(k + 1) % c]);
            around[a].push(vid);
            ridge_ends.entry((a.min(b), a.max(b))).or_default().push(vid);
        }
    }

    let mut areas = vec![0.0; dual.len()];
    let mut facets = Vec::new();
    for (j, ring) in around.iter_mut().enumerate() {
        if ring.len() < 3 {
            continue;
        }
        let u = normalize3(&dual[j]);
        let (e1, e2) = tangent_frame(&u);
        let c = {
            let mut c = [0.0; 3];
            for &v in ring.iter() {
                c = add3(&c, &verts[v]);
            }
            scale3(1.0 / ring.len() as f64, &c)
        };
        ring.sort_by(|&a, &b| {
            let pa = sub3(&verts[a], &c);
            let pb = sub3(&verts[b], &c);
            dot3(&pa, &e2)
                .atan2(dot3(&pa, &e1))
                .total_cmp(&dot3(&pb, &e2).atan2(dot3(&pb, &e1)))
        });
        let mut area = [0.0; 3];
        for k in 1..ring.len() - 1 {
            let a = sub3(&verts[ring[k]], &verts[ring[0]]);
            let b = sub3(&verts[ring[k + 1]], &verts[ring[0]]);
            area = add3(&area, &cross(&a, &b));
        }
        let a = 0.5 * dot3(&area, &u).abs();
        areas[j] = a;
        facets.push(Facet {
            normal: u,
            offset: 1.0 / norm3(&dual[j]),
            area: a,
            vertices: ring.clone(),
        });
    }
    let mut ridges: Vec<(usize, usize, f64)> = ridge_ends
        .into_iter()
        .filter(|(_, ends)| ends.len() == 2)
        .map(|((a, b), ends)| (a, b, norm3(&sub3(&verts[ends[0]], &verts[ends[1]]))))
        .collect();
    ridges.sort_by(|x, y| (x.0, x.1).cmp(&(y.0, y.1)));
    Ok(HalfspacePolytope {
        polytope: Polytope {
            dim: 3,
            vertices: verts,
            facets,
        },
        areas,
        ridges,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cube() -> Polytope {
        let mut pts = Vec::new();
        for i in 0..8 {
            pts.push(vec![
                (i & 1) as f64 * 2.0 - 1.0,
                ((i >> 1) & 1) as f64 * 2.0 - 1.0,
                ((i >> 2) & 1) as f64 * 2.0 - 1.0,
            ]);
        }
        Polytope::from_points(3, &pts).unwrap()
    }

    #[test]
    fn cube_measures() {
        let c = cube();
        assert_eq!(c.facets().len(), 6);
        assert_eq!(c.vertices().len(), 8);
        assert!((c.volume() - 8.0).abs() < 1e-12);
        assert!((c.brightness(&[0.0, 0.0, 1.0]) - 4.0).abs() < 1e-12);
        let u = normalize3(&[1.0, 1.0, 1.0]);
        assert!((c.brightness(&u) - 4.0 * 3f64.sqrt()).abs() < 1e-12);
        for f in c.facets() {
            assert_eq!(f.vertices.len(), 4);
        }
    }

    #[test]
    fn halfspace_cube_matches_vertex_cube() {
        let normals = [
            [1.0, 0.0, 0.0],
            [-1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, -1.0, 0.0],
            [0.0, 0.0, 1.0],
            [0.0, 0.0, -1.0],
            [0.6, 0.8, 0.0],
        ];
        let h = [1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 5.0];
        let hp = Polytope::from_halfspaces(3, &normals, &h).unwrap();
        assert!((hp.polytope.volume() - 8.0).abs() < 1e-12);
        assert_eq!(hp.areas[6], 0.0);
        assert!((hp.areas[0] - 4.0).abs() < 1e-12);
        assert_eq!(hp.ridges.len(), 12);
        for r in &hp.ridges {
            assert!((r.2 - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn polar_of_cube_is_octahedron() {
        let o = cube().polar().unwrap();
        assert_eq!(o.vertices().len(), 6);
        assert_eq!(o.facets().len(), 8);
        assert!((o.volume() - 4.0 / 3.0).abs() < 1e-12);
        let back = o.polar().unwrap();
        assert!((back.volume() - 8.0).abs() < 1e-12);
    }

    #[test]
    fn steiner_point_of_translate() {
        let t = [0.3, -1.2, 2.0];
        let s = cube().translate(&t).steiner_point();
        for k in 0..3 {
            assert!((s[k] - t[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn square_halfspaces_2d() {
        let normals = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [-1.0, 0.0, 0.0], [0.0, -1.0, 0.0]];
        let hp = Polytope::from_halfspaces(2, &normals, &[1.0, 2.0, 1.0, 2.0]).unwrap();
        assert!((hp.polytope.volume() - 8.0).abs() < 1e-12);
        assert!((hp.areas[0] - 4.0).abs() < 1e-12);
        assert!((hp.areas[1] - 2.0).abs() < 1e-12);
        let s = hp.polytope.translate(&[0.5, 0.25, 0.0]).steiner_point();
        assert!((s[0] - 0.5).abs() < 1e-12 && (s[1] - 0.25).abs() < 1e-12);
    }

    #[test]
    fn unbounded_is_rejected() {
        let normals = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [-1.0, 0.0, 0.0]];
        assert!(Polytope::from_halfspaces(3, &normals, &[1.0; 4]).is_err());
    }
}
