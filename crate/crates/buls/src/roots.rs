//! Scalar root finding for monotone CDF inversion.

/// Brent's method on a bracket `[a, b]` with `f(a)` and `f(b)` of opposite sign.
///
/// Returns `None` when the bracket is invalid.
pub fn brent<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, xtol: f64, max_iter: usize) -> Option<f64> {
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Some(a);
    }
    if fb == 0.0 {
        return Some(b);
    }
    if fa.signum() == fb.signum() || fa.is_nan() || fb.is_nan() {
        return None;
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Some(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q) = if a == c {
                (2.0 * m * s, 1.0 - s)
            } else {
                let q = fa / fc;
                let r = fb / fc;
                (
                    s * (2.0 * m * q * (q - r) - (b - a) * (r - 1.0)),
                    (q - 1.0) * (r - 1.0) * (s - 1.0),
                )
            };
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = d;
            }
        } else {
            d = m;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b);
    }
    Some(b)
}

/// Solves `cdf(x) = p` for a nondecreasing `cdf`, expanding `[lo, hi]`
/// geometrically until it brackets the root.
pub fn invert_monotone<F: FnMut(f64) -> f64>(mut cdf: F, p: f64, mut lo: f64, mut hi: f64, xtol: f64) -> f64 {
    let mut g = |x: f64| cdf(x) - p;
    let mut step = (hi - lo).abs().max(1.0);
    for _ in 0..200 {
        if g(lo) <= 0.0 {
            break;
        }
        lo -= step;
        step *= 2.0;
    }
    let mut step = (hi - lo).abs().max(1.0);
    for _ in 0..200 {
        if g(hi) >= 0.0 {
            break;
        }
        hi += step;
        step *= 2.0;
    }
    brent(g, lo, hi, xtol, 300).unwrap_or(0.5 * (lo + hi))
}
