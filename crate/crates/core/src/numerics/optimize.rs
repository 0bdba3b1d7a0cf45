//! Scalar maximization.

/// Result of a bracketed scalar maximization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarMax {
    pub x: f64,
    pub value: f64,
    pub iterations: usize,
    /// Final bracket width.
    pub bracket: f64,
    pub converged: bool,
}

/// Brent's method (golden section with parabolic steps) for the maximum of
/// `f` on `[a, b]`.
pub fn brent_maximize<F: FnMut(f64) -> f64>(
    mut f: F,
    mut a: f64,
    mut b: f64,
    tol: f64,
    max_iter: usize,
) -> ScalarMax {
    const CGOLD: f64 = 0.381_966_011_250_105_1;
    let mut g = |x: f64| -f(x);
    let mut x = a + CGOLD * (b - a);
    let (mut w, mut v) = (x, x);
    let mut fx = g(x);
    let (mut fw, mut fv) = (fx, fx);
    let (mut d, mut e): (f64, f64) = (0.0, 0.0);
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter {
        iterations += 1;
        let xm = 0.5 * (a + b);
        let tol1 = tol * x.abs() + 1e-14;
        let tol2 = 2.0 * tol1;
        if (x - xm).abs() <= tol2 - 0.5 * (b - a) {
            converged = true;
            break;
        }
        let mut golden = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            let etemp = e;
            e = d;
            if !(p.abs() >= (0.5 * q * etemp).abs() || p <= q * (a - x) || p >= q * (b - x)) {
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = if xm >= x { tol1 } else { -tol1 };
                }
                golden = false;
            }
        }
        if golden {
            e = if x >= xm { a - x } else { b - x };
            d = CGOLD * e;
        }
        let u = if d.abs() >= tol1 {
            x + d
        } else if d >= 0.0 {
            x + tol1
        } else {
            x - tol1
        };
        let fu = g(u);
        if fu <= fx {
            if u >= x {
                a = x;
            } else {
                b = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }
    ScalarMax {
        x,
        value: -fx,
        iterations,
        bracket: b - a,
        converged,
    }
}

/// Maximizes `f` on `[a, b]` by scanning `samples` equally spaced interior
/// points and refining the best one with Brent's method on its neighbouring
/// cell.
pub fn scan_and_refine<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    samples: usize,
    tol: f64,
) -> ScalarMax {
    let samples = samples.max(3);
    let h = (b - a) / (samples + 1) as f64;
    let mut best = (f64::NEG_INFINITY, 1usize);
    for i in 1..=samples {
        let val = f(a + h * i as f64);
        if val > best.0 {
            best = (val, i);
        }
    }
    let c = a + h * best.1 as f64;
    let r = brent_maximize(&mut f, c - h, c + h, tol, 200);
    if r.value >= best.0 {
        r
    } else {
        ScalarMax {
            x: c,
            value: best.0,
            ..r
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_parabola_peak() {
        let r = brent_maximize(|x| -(x - 0.3) * (x - 0.3) + 2.0, -1.0, 1.0, 1e-10, 100);
        assert!(r.converged);
        assert!((r.x - 0.3).abs() < 1e-8);
        assert!((r.value - 2.0).abs() < 1e-15);
    }

    #[test]
    fn scan_handles_multimodal() {
        let f = |x: f64| (3.0 * x).cos() + 0.1 * x;
        let r = scan_and_refine(f, -3.0, 3.0, 64, 1e-10);
        let brute = (0..80001)
            .map(|i| -3.0 + 6.0 * i as f64 / 80000.0)
            .map(f)
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(r.value >= brute - 1e-12);
    }
}
