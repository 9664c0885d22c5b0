//! Adaptive Gauss–Kronrod (7/15) integration over finite and infinite
//! intervals, plus Gauss–Legendre rules.

use crate::error::{BulsError, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub abs_err: f64,
    pub converged: bool,
}

impl Estimate {
    /// Turns a non-converged estimate into an error carrying the achieved bound.
    pub fn into_result(self) -> Result<f64> {
        if self.converged {
            Ok(self.value)
        } else {
            Err(BulsError::Convergence { what: "adaptive quadrature", achieved: self.abs_err })
        }
    }
}

/// Tolerances for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_segments: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions { abs_tol: 1e-10, rel_tol: 1e-10, max_segments: 2000 }
    }
}

impl QuadOptions {
    pub fn tol(abs_tol: f64) -> Self {
        QuadOptions { abs_tol, rel_tol: 0.0, ..Default::default() }
    }
}

fn gk15(f: &mut dyn FnMut(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let fsum = f(c - dx) + f(c + dx);
        kron += WGK[j] * fsum;
        if j % 2 == 1 {
            gauss += WG[j / 2] * fsum;
        }
    }
    let value = kron * h;
    let err = ((kron - gauss) * h).abs();
    // raw Kronrod-Gauss difference, floored at rounding level
    let floor = 50.0 * f64::EPSILON * value.abs();
    (value, err.max(floor))
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

/// Adaptive integration of `f` over `[a, b]`; either bound may be infinite.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, opts: QuadOptions) -> Estimate {
    integrate_dyn(&mut f, a, b, opts)
}

fn integrate_dyn(f: &mut dyn FnMut(f64) -> f64, a: f64, b: f64, opts: QuadOptions) -> Estimate {
    if a == b {
        return Estimate { value: 0.0, abs_err: 0.0, converged: true };
    }
    if a > b {
        let e = integrate_dyn(f, b, a, opts);
        return Estimate { value: -e.value, ..e };
    }
    match (a.is_finite(), b.is_finite()) {
        (true, true) => adapt(f, a, b, opts),
        (true, false) => {
            let mut g = |t: f64| {
                let s = 1.0 - t;
                if s <= 0.0 {
                    return 0.0;
                }
                f(a + t / s) / (s * s)
            };
            adapt(&mut g, 0.0, 1.0, opts)
        }
        (false, true) => {
            let mut g = |t: f64| {
                let s = 1.0 - t;
                if s <= 0.0 {
                    return 0.0;
                }
                f(b - t / s) / (s * s)
            };
            adapt(&mut g, 0.0, 1.0, opts)
        }
        (false, false) => {
            let half = QuadOptions { abs_tol: 0.5 * opts.abs_tol, ..opts };
            let lo = integrate_dyn(f, f64::NEG_INFINITY, 0.0, half);
            let hi = integrate_dyn(f, 0.0, f64::INFINITY, half);
            Estimate {
                value: lo.value + hi.value,
                abs_err: lo.abs_err + hi.abs_err,
                converged: lo.converged && hi.converged,
            }
        }
    }
}

fn adapt(f: &mut dyn FnMut(f64) -> f64, a: f64, b: f64, opts: QuadOptions) -> Estimate {
    let (value, err) = gk15(f, a, b);
    let mut segs = vec![Segment { a, b, value, err }];
    let mut total = value;
    let mut total_err = err;
    loop {
        let target = opts.abs_tol.max(opts.rel_tol * total.abs());
        if total_err <= target {
            return Estimate { value: total, abs_err: total_err, converged: true };
        }
        if segs.len() >= opts.max_segments {
            return Estimate { value: total, abs_err: total_err, converged: false };
        }
        let (idx, _) = segs
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.err.total_cmp(&y.1.err))
            .expect("at least one segment");
        let seg = segs.swap_remove(idx);
        let mid = 0.5 * (seg.a + seg.b);
        if !(mid > seg.a && mid < seg.b) {
            // interval cannot be split further in floating point
            return Estimate { value: total, abs_err: total_err, converged: false };
        }
        let (v1, e1) = gk15(f, seg.a, mid);
        let (v2, e2) = gk15(f, mid, seg.b);
        total += v1 + v2 - seg.value;
        total_err += e1 + e2 - seg.err;
        segs.push(Segment { a: seg.a, b: mid, value: v1, err: e1 });
        segs.push(Segment { a: mid, b: seg.b, value: v2, err: e2 });
        if segs.len() % 64 == 0 {
            // resum to shed accumulated cancellation error
            total = segs.iter().map(|s| s.value).sum();
            total_err = segs.iter().map(|s| s.err).sum();
        }
    }
}

/// Integrates over a sequence of breakpoints, summing the pieces.
pub fn integrate_pieces<F: FnMut(f64) -> f64>(mut f: F, points: &[f64], opts: QuadOptions) -> Estimate {
    let mut out = Estimate { value: 0.0, abs_err: 0.0, converged: true };
    let n = points.len().saturating_sub(1).max(1) as f64;
    let piece = QuadOptions { abs_tol: opts.abs_tol / n, ..opts };
    for w in points.windows(2) {
        let e = integrate_dyn(&mut f, w[0], w[1], piece);
        out.value += e.value;
        out.abs_err += e.abs_err;
        out.converged &= e.converged;
    }
    out
}

/// Nodes and weights of the n-point Gauss–Legendre rule on [−1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    let nf = n as f64;
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p1 = 1.0;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = ((2.0 * jf + 1.0) * z * p2 - jf * p3) / (jf + 1.0);
            }
            dp = nf * (z * p1 - p2) / (z * z - 1.0);
            let z1 = z;
            z = z1 - p1 / dp;
            if (z - z1).abs() < 1e-15 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Applies an n-point Gauss–Legendre rule to `f` on `[a, b]`.
pub fn gauss_legendre_integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, n: usize) -> f64 {
    let (x, w) = gauss_legendre(n);
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    x.iter().zip(&w).map(|(xi, wi)| wi * f(c + h * xi)).sum::<f64>() * h
}
