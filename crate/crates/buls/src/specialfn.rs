//! Special functions: gamma family, modified Bessel functions of the second
//! kind, and the normal and Student-t distribution functions.
//!
//! Each public function validates its arguments and returns [`Result`]. The
//! `pub(crate)` kernels skip validation and are what the rest of the crate
//! calls in hot loops.

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use crate::error::{domain, BulsError, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const EPS: f64 = 1e-16;
const TINY: f64 = 1e-300;

/// Tolerance and iteration budget for iterative evaluations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Accuracy {
    pub abs_tol: f64,
    pub max_iter: usize,
}

impl Accuracy {
    pub const GAMMA: Accuracy = Accuracy { abs_tol: 1e-12, max_iter: 10_000 };
    pub const BESSEL: Accuracy = Accuracy { abs_tol: 1e-10, max_iter: 10_000 };

    pub fn new(abs_tol: f64, max_iter: usize) -> Result<Self> {
        if !(abs_tol > 0.0) || max_iter == 0 {
            return Err(BulsError::InvalidParameter(format!(
                "accuracy needs abs_tol > 0 and max_iter >= 1, got {abs_tol}, {max_iter}"
            )));
        }
        Ok(Self { abs_tol, max_iter })
    }
}

impl Default for Accuracy {
    fn default() -> Self {
        Accuracy::GAMMA
    }
}

// ---------------------------------------------------------------------------
// Gamma family
// ---------------------------------------------------------------------------

/// ln Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return domain(format!("ln_gamma requires x > 0, got {x}"));
    }
    Ok(ln_gamma_unchecked(x))
}

#[inline]
pub(crate) fn ln_gamma_unchecked(x: f64) -> f64 {
    libm::lgamma(x)
}

/// Lower incomplete gamma function γ(s, x) = ∫₀ˣ t^{s−1} e^{−t} dt.
pub fn lower_inc_gamma(s: f64, x: f64) -> Result<f64> {
    check_inc_gamma_args(s, x)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    Ok(ln_lower_inc_gamma_unchecked(s, x).exp())
}

/// Regularized lower incomplete gamma P(s, x) = γ(s, x)/Γ(s).
pub fn reg_lower_inc_gamma(s: f64, x: f64) -> Result<f64> {
    check_inc_gamma_args(s, x)?;
    Ok(reg_lower_unchecked(s, x))
}

fn check_inc_gamma_args(s: f64, x: f64) -> Result<()> {
    if !(s > 0.0) || !s.is_finite() {
        return domain(format!("incomplete gamma requires s > 0, got {s}"));
    }
    if !(x >= 0.0) {
        return domain(format!("incomplete gamma requires x >= 0, got {x}"));
    }
    Ok(())
}

/// Σ_{n≥0} xⁿ / (s(s+1)…(s+n)) · s, i.e. the series with γ(s,x) = xˢe⁻ˣ/s · sum.
fn gamma_series_sum(s: f64, x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut ap = s;
    for _ in 0..10_000 {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if term.abs() < sum.abs() * EPS {
            break;
        }
    }
    sum
}

/// Continued fraction for Γ(s,x) eˣ x^{−s} (modified Lentz).
fn gamma_cf(s: f64, x: f64) -> f64 {
    let mut b = x + 1.0 - s;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..10_000 {
        let an = -(i as f64) * (i as f64 - s);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// ln γ(s, x) for s > 0, x > 0.
pub(crate) fn ln_lower_inc_gamma_unchecked(s: f64, x: f64) -> f64 {
    if x < s + 1.0 {
        s * x.ln() - x + (gamma_series_sum(s, x) / s).ln()
    } else {
        let lg = ln_gamma_unchecked(s);
        let ln_q = s * x.ln() - x + gamma_cf(s, x).ln() - lg;
        lg + (-ln_q.exp()).ln_1p()
    }
}

pub(crate) fn reg_lower_unchecked(s: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x < s + 1.0 {
        (s * x.ln() - x - ln_gamma_unchecked(s)).exp() * gamma_series_sum(s, x) / s
    } else {
        1.0 - (s * x.ln() - x + gamma_cf(s, x).ln() - ln_gamma_unchecked(s)).exp()
    }
}

/// ln[x^{−s} γ(s, x)], finite down to x = 0 where it equals −ln s.
pub(crate) fn ln_scaled_lower_gamma(s: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return -s.ln();
    }
    if x == f64::INFINITY {
        return f64::NEG_INFINITY;
    }
    if x < s + 1.0 {
        -x + (gamma_series_sum(s, x) / s).ln()
    } else {
        ln_lower_inc_gamma_unchecked(s, x) - s * x.ln()
    }
}

// ---------------------------------------------------------------------------
// Incomplete beta
// ---------------------------------------------------------------------------

/// Regularized incomplete beta I_x(a, b).
pub fn reg_inc_beta(x: f64, a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) {
        return domain(format!("incomplete beta requires a, b > 0, got {a}, {b}"));
    }
    if !(0.0..=1.0).contains(&x) {
        return domain(format!("incomplete beta requires 0 <= x <= 1, got {x}"));
    }
    Ok(reg_inc_beta_unchecked(x, a, b))
}

pub(crate) fn reg_inc_beta_unchecked(x: f64, a: f64, b: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front = ln_gamma_unchecked(a + b) - ln_gamma_unchecked(a) - ln_gamma_unchecked(b)
        + a * x.ln()
        + b * (-x).ln_1p();
    if x < (a + 1.0) / (a + b + 2.0) {
        ln_front.exp() * beta_cf(x, a, b) / a
    } else {
        1.0 - ln_front.exp() * beta_cf(1.0 - x, b, a) / b
    }
}

fn beta_cf(x: f64, a: f64, b: f64) -> f64 {
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..10_000 {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

// ---------------------------------------------------------------------------
// Bessel K
// ---------------------------------------------------------------------------

/// Orders of K supported by [`bessel_k`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BesselOrder {
    Zero,
    Half,
    One,
    ThreeHalves,
}

impl BesselOrder {
    pub fn from_f64(order: f64) -> Result<Self> {
        match order {
            0.0 => Ok(BesselOrder::Zero),
            0.5 => Ok(BesselOrder::Half),
            1.0 => Ok(BesselOrder::One),
            1.5 => Ok(BesselOrder::ThreeHalves),
            _ => domain(format!("unsupported Bessel order {order}; expected 0, 1/2, 1 or 3/2")),
        }
    }
}

/// Modified Bessel function of the second kind K_order(x).
pub fn bessel_k(order: f64, x: f64) -> Result<f64> {
    let order = BesselOrder::from_f64(order)?;
    if !(x > 0.0) {
        return domain(format!("bessel_k requires x > 0, got {x}"));
    }
    Ok(bessel_k_scaled_unchecked(order, x) * (-x).exp())
}

/// ln K_order(x), stable for large x.
pub(crate) fn ln_bessel_k(order: BesselOrder, x: f64) -> f64 {
    bessel_k_scaled_unchecked(order, x).ln() - x
}

/// eˣ K_order(x).
pub(crate) fn bessel_k_scaled_unchecked(order: BesselOrder, x: f64) -> f64 {
    let half = (PI / (2.0 * x)).sqrt();
    match order {
        BesselOrder::Half => half,
        BesselOrder::ThreeHalves => half * (1.0 + 1.0 / x),
        BesselOrder::Zero => k01_scaled(x).0,
        BesselOrder::One => k01_scaled(x).1,
    }
}

/// (eˣK₀(x), eˣK₁(x)).
pub(crate) fn k01_scaled(x: f64) -> (f64, f64) {
    if x <= 2.0 {
        let (k0, k1) = k01_series(x);
        let e = x.exp();
        (k0 * e, k1 * e)
    } else {
        k01_steed(x)
    }
}

/// Ascending series for K₀ and K₁, accurate for 0 < x ≤ 2.
fn k01_series(x: f64) -> (f64, f64) {
    let y = 0.25 * x * x;
    let ln_half = (0.5 * x).ln();
    // K0 = -(ln(x/2) + γ) I0 + Σ_{k≥1} y^k/(k!)² H_k
    // K1 = 1/x + ln(x/2) I1 - (x/4) Σ_{k≥0} [ψ(k+1) + ψ(k+2)] y^k/(k!(k+1)!)
    let mut i0 = 0.0;
    let mut i1 = 0.0;
    let mut s0 = 0.0;
    let mut s1 = 0.0;
    let mut t0 = 1.0; // y^k/(k!)²
    let mut t1 = 1.0; // y^k/(k!(k+1)!)
    let mut harmonic = 0.0; // H_k
    for k in 0..200 {
        let kf = k as f64;
        if k > 0 {
            t0 *= y / (kf * kf);
            t1 *= y / (kf * (kf + 1.0));
            harmonic += 1.0 / kf;
        }
        i0 += t0;
        i1 += t1;
        s0 += t0 * harmonic;
        let psi_sum = 2.0 * (harmonic - EULER_GAMMA) + 1.0 / (kf + 1.0);
        s1 += t1 * psi_sum;
        if t0 < EPS * i0 && t1 < EPS * i1 && k > 2 {
            break;
        }
    }
    let i1 = 0.5 * x * i1;
    let k0 = -(ln_half + EULER_GAMMA) * i0 + s0;
    let k1 = 1.0 / x + ln_half * i1 - 0.25 * x * s1;
    (k0, k1)
}

/// Steed's continued fraction for order zero; returns scaled (K₀, K₁).
fn k01_steed(x: f64) -> (f64, f64) {
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut h = d;
    let mut delh = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let a1 = 0.25;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 2..10_000 {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        c = -a * c / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh *= b * d - 1.0;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < EPS {
            break;
        }
    }
    h *= a1;
    let k0 = (PI / (2.0 * x)).sqrt() / s;
    let k1 = k0 * (x + 0.5 - h) / x;
    (k0, k1)
}

// ---------------------------------------------------------------------------
// Normal distribution
// ---------------------------------------------------------------------------

pub(crate) const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Standard normal density.
#[inline]
pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x - LN_SQRT_2PI).exp()
}

/// Standard normal CDF Φ(x).
#[inline]
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

/// Φ⁻¹(p) for 0 < p < 1.
pub fn normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return domain(format!("normal_quantile requires 0 < p < 1, got {p}"));
    }
    Ok(normal_quantile_unchecked(p))
}

pub(crate) fn normal_quantile_unchecked(p: f64) -> f64 {
    // Acklam's rational approximation, refined with Halley steps on erfc.
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    const P_LOW: f64 = 0.024_25;
    let mut x = if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (-p).ln_1p()).sqrt();
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };
    for _ in 0..3 {
        // residual computed on the smaller tail to keep relative accuracy
        let e = if x < 0.0 {
            0.5 * libm::erfc(-x / SQRT_2) - p
        } else {
            (1.0 - p) - 0.5 * libm::erfc(x / SQRT_2)
        };
        let u = e * (2.0 * PI).sqrt() * (0.5 * x * x).exp();
        let step = u / (1.0 + 0.5 * x * u);
        x -= step;
        if step.abs() <= 1e-16 * x.abs().max(1.0) {
            break;
        }
    }
    x
}

// ---------------------------------------------------------------------------
// Student t
// ---------------------------------------------------------------------------

fn check_nu(nu: f64) -> Result<()> {
    if !(nu > 0.0) || !nu.is_finite() {
        return domain(format!("Student-t requires nu > 0, got {nu}"));
    }
    Ok(())
}

/// ln of the Student-t density with `nu` degrees of freedom.
pub(crate) fn student_t_ln_pdf(nu: f64, x: f64) -> f64 {
    ln_gamma_unchecked(0.5 * (nu + 1.0))
        - ln_gamma_unchecked(0.5 * nu)
        - 0.5 * (nu * PI).ln()
        - 0.5 * (nu + 1.0) * (x * x / nu).ln_1p()
}

pub fn student_t_pdf(nu: f64, x: f64) -> Result<f64> {
    check_nu(nu)?;
    Ok(student_t_ln_pdf(nu, x).exp())
}

/// Student-t CDF via I_{ν/(ν+x²)}(ν/2, 1/2).
pub fn student_t_cdf(nu: f64, x: f64) -> Result<f64> {
    check_nu(nu)?;
    if x.is_nan() {
        return domain("student_t_cdf received NaN");
    }
    Ok(student_t_cdf_unchecked(nu, x))
}

pub(crate) fn student_t_cdf_unchecked(nu: f64, x: f64) -> f64 {
    if x == f64::INFINITY {
        return 1.0;
    }
    if x == f64::NEG_INFINITY {
        return 0.0;
    }
    let tail = 0.5 * reg_inc_beta_unchecked(nu / (nu + x * x), 0.5 * nu, 0.5);
    if x > 0.0 {
        1.0 - tail
    } else {
        tail
    }
}

/// Inverse Student-t CDF.
pub fn student_t_quantile(nu: f64, p: f64) -> Result<f64> {
    check_nu(nu)?;
    if !(p > 0.0 && p < 1.0) {
        return domain(format!("student_t_quantile requires 0 < p < 1, got {p}"));
    }
    Ok(student_t_quantile_unchecked(nu, p))
}

pub(crate) fn student_t_quantile_unchecked(nu: f64, p: f64) -> f64 {
    if nu == 1.0 {
        return (PI * (p - 0.5)).tan();
    }
    if p == 0.5 {
        return 0.0;
    }
    // solve on the lower tail and reflect, so the cdf residual keeps precision
    let (target, sign) = if p < 0.5 { (p, -1.0) } else { (1.0 - p, 1.0) };
    let mut lo = -1.0;
    while student_t_cdf_unchecked(nu, lo) > target {
        lo *= 2.0;
        if lo < -1e300 {
            break;
        }
    }
    let mut hi = 0.0;
    let mut x = normal_quantile_unchecked(target).max(lo).min(hi);
    for _ in 0..200 {
        let f = student_t_cdf_unchecked(nu, x) - target;
        if f > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let d = student_t_ln_pdf(nu, x).exp();
        let mut next = x - f / d;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= 1e-15 * x.abs().max(1e-300) {
            x = next;
            break;
        }
        x = next;
    }
    sign * -x
}
