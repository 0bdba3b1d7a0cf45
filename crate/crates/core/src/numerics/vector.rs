//! Small dense vector helpers on slices and `[f64; 3]`.

pub type Vec3 = [f64; 3];

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn dot3(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn norm3(a: &Vec3) -> f64 {
    dot3(a, a).sqrt()
}

#[inline]
pub fn cross(a: &Vec3, b: &Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[inline]
pub fn add3(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub fn sub3(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn scale3(s: f64, a: &Vec3) -> Vec3 {
    [s * a[0], s * a[1], s * a[2]]
}

/// `a + s * b`
#[inline]
pub fn axpy3(a: &Vec3, s: f64, b: &Vec3) -> Vec3 {
    [a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2]]
}

#[inline]
pub fn normalize3(a: &Vec3) -> Vec3 {
    let n = norm3(a);
    [a[0] / n, a[1] / n, a[2] / n]
}

/// Pads a 2- or 3-vector to `[f64; 3]`.
#[inline]
pub fn to3(a: &[f64]) -> Vec3 {
    match a.len() {
        2 => [a[0], a[1], 0.0],
        3 => [a[0], a[1], a[2]],
        1 => [a[0], 0.0, 0.0],
        _ => [0.0; 3],
    }
}

/// Orthonormal basis `(e1, e2)` of the plane orthogonal to the unit vector `x`.
///
/// The seed axis is the first coordinate axis with `|x_i| < 0.9`, which is
/// then Gram-Schmidt orthogonalized against `x`; `e2 = x × e1`.
pub fn tangent_frame(x: &Vec3) -> (Vec3, Vec3) {
    let axis = (0..3).find(|&i| x[i].abs() < 0.9).unwrap_or(0);
    let mut e = [0.0; 3];
    e[axis] = 1.0;
    let e1 = normalize3(&axpy3(&e, -dot3(&e, x), x));
    let e2 = cross(x, &e1);
    (e1, e2)
}

/// Tangential part of `v` at the unit vector `x`.
#[inline]
pub fn tangential(x: &Vec3, v: &Vec3) -> Vec3 {
    axpy3(v, -dot3(x, v), x)
}

/// Rotation matrix for the rotation by `angle` about the unit vector `axis`.
pub fn rotation_matrix(axis: &Vec3, angle: f64) -> [[f64; 3]; 3] {
    let k = normalize3(axis);
    let (s, c) = angle.sin_cos();
    let t = 1.0 - c;
    [
        [
            c + k[0] * k[0] * t,
            k[0] * k[1] * t - k[2] * s,
            k[0] * k[2] * t + k[1] * s,
        ],
        [
            k[1] * k[0] * t + k[2] * s,
            c + k[1] * k[1] * t,
            k[1] * k[2] * t - k[0] * s,
        ],
        [
            k[2] * k[0] * t - k[1] * s,
            k[2] * k[1] * t + k[0] * s,
            c + k[2] * k[2] * t,
        ],
    ]
}

#[inline]
pub fn mat_vec3(m: &[[f64; 3]; 3], v: &Vec3) -> Vec3 {
    [dot3(&m[0], v), dot3(&m[1], v), dot3(&m[2], v)]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frame_is_orthonormal_and_right_handed() {
        for x in [[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], normalize3(&[0.3, -0.5, 0.8])] {
            let (e1, e2) = tangent_frame(&x);
            assert!(dot3(&e1, &x).abs() < 1e-15);
            assert!(dot3(&e2, &x).abs() < 1e-15);
            assert!(dot3(&e1, &e2).abs() < 1e-15);
            assert!((norm3(&e1) - 1.0).abs() < 1e-15);
            let c = cross(&e1, &e2);
            assert!((dot3(&c, &x) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn rotation_preserves_axis() {
        let axis = normalize3(&[1.0, 2.0, 3.0]);
        let r = rotation_matrix(&axis, 0.7);
        let image = mat_vec3(&r, &axis);
        for i in 0..3 {
            assert!((image[i] - axis[i]).abs() < 1e-15);
        }
    }
}
