//! Density generators of the bivariate log-symmetric family and the
//! univariate laws they induce.
//!
//! A generator `g` defines the standardized joint density
//! `f(z1, z2) = g(z1² + z2²) / Z_g` on ℝ². From it we get the marginal law of
//! each `Z_i`, the conditional law of `Z2` given `Z1 = x`, and the law of the
//! squared radius `R² = Z1² + Z2²` (which is also the law of the squared
//! Mahalanobis distance).

use std::f64::consts::{LN_2, PI, SQRT_2};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{domain, BulsError, Result};
use crate::quadrature::{integrate, integrate_pieces, QuadOptions};
use crate::roots::{brent, invert_monotone};
use crate::specialfn::{
    k01_scaled, ln_bessel_k, ln_gamma_unchecked, ln_scaled_lower_gamma, normal_cdf, normal_quantile_unchecked,
    student_t_cdf_unchecked, student_t_ln_pdf, student_t_quantile_unchecked, BesselOrder, LN_SQRT_2PI,
};

/// The five generator families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorKind {
    Normal,
    StudentT,
    Hyperbolic,
    Laplace,
    Slash,
}

impl GeneratorKind {
    pub const ALL: [GeneratorKind; 5] = [
        GeneratorKind::Normal,
        GeneratorKind::StudentT,
        GeneratorKind::Hyperbolic,
        GeneratorKind::Laplace,
        GeneratorKind::Slash,
    ];

    /// Whether this family carries a shape parameter (ν or q).
    pub fn has_shape(self) -> bool {
        matches!(self, GeneratorKind::StudentT | GeneratorKind::Hyperbolic | GeneratorKind::Slash)
    }

    pub fn name(self) -> &'static str {
        match self {
            GeneratorKind::Normal => "normal",
            GeneratorKind::StudentT => "student",
            GeneratorKind::Hyperbolic => "hyperbolic",
            GeneratorKind::Laplace => "laplace",
            GeneratorKind::Slash => "slash",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "normal" | "gaussian" => Some(GeneratorKind::Normal),
            "student" | "student-t" | "student_t" | "t" => Some(GeneratorKind::StudentT),
            "hyperbolic" => Some(GeneratorKind::Hyperbolic),
            "laplace" => Some(GeneratorKind::Laplace),
            "slash" => Some(GeneratorKind::Slash),
            _ => None,
        }
    }
}

impl fmt::Display for GeneratorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A generator family together with its shape parameter.
///
/// The shape is ν for Student-t and hyperbolic, q for slash, and absent for
/// normal and Laplace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneratorFamily {
    kind: GeneratorKind,
    shape: Option<f64>,
}

impl GeneratorFamily {
    pub fn new(kind: GeneratorKind, shape: Option<f64>) -> Result<Self> {
        match (kind.has_shape(), shape) {
            (true, Some(s)) if s > 0.0 && s.is_finite() => Ok(Self { kind, shape }),
            (true, Some(s)) => Err(BulsError::InvalidParameter(format!("{kind} shape must be > 0, got {s}"))),
            (true, None) => Err(BulsError::InvalidParameter(format!("{kind} requires a shape parameter"))),
            (false, None) => Ok(Self { kind, shape: None }),
            (false, Some(_)) => Err(BulsError::InvalidParameter(format!("{kind} takes no shape parameter"))),
        }
    }

    pub fn normal() -> Self {
        Self { kind: GeneratorKind::Normal, shape: None }
    }

    pub fn laplace() -> Self {
        Self { kind: GeneratorKind::Laplace, shape: None }
    }

    pub fn student_t(nu: f64) -> Result<Self> {
        Self::new(GeneratorKind::StudentT, Some(nu))
    }

    pub fn hyperbolic(nu: f64) -> Result<Self> {
        Self::new(GeneratorKind::Hyperbolic, Some(nu))
    }

    pub fn slash(q: f64) -> Result<Self> {
        Self::new(GeneratorKind::Slash, Some(q))
    }

    pub fn kind(&self) -> GeneratorKind {
        self.kind
    }

    pub fn shape(&self) -> Option<f64> {
        self.shape
    }

    fn s(&self) -> f64 {
        self.shape.unwrap_or(f64::NAN)
    }

    /// ln g(x) for x ≥ 0. Laplace returns +∞ at x = 0.
    pub fn log_g(&self, x: f64) -> f64 {
        match self.kind {
            GeneratorKind::Normal => -0.5 * x,
            GeneratorKind::StudentT => {
                let nu = self.s();
                -0.5 * (nu + 2.0) * (x / nu).ln_1p()
            }
            GeneratorKind::Hyperbolic => -self.s() * (1.0 + x).sqrt(),
            GeneratorKind::Laplace => {
                if x <= 0.0 {
                    f64::INFINITY
                } else {
                    let r = (2.0 * x).sqrt();
                    ln_bessel_k(BesselOrder::Zero, r)
                }
            }
            GeneratorKind::Slash => {
                let s = 0.5 * (self.s() + 2.0);
                -s * LN_2 + ln_scaled_lower_gamma(s, 0.5 * x)
            }
        }
    }

    /// g(x) for x ≥ 0.
    pub fn g(&self, x: f64) -> Result<f64> {
        if !(x >= 0.0) {
            return domain(format!("generator argument must be >= 0, got {x}"));
        }
        Ok(self.log_g(x).exp())
    }

    /// g′(x)/g(x), the score ratio used by the likelihood equations.
    pub fn g_ratio(&self, x: f64) -> Result<f64> {
        if !(x >= 0.0) {
            return domain(format!("generator argument must be >= 0, got {x}"));
        }
        if x == 0.0 && matches!(self.kind, GeneratorKind::Laplace | GeneratorKind::Slash) {
            return domain(format!("g'/g is not defined at x = 0 for the {} generator", self.kind));
        }
        Ok(self.g_ratio_unchecked(x))
    }

    pub(crate) fn g_ratio_unchecked(&self, x: f64) -> f64 {
        match self.kind {
            GeneratorKind::Normal => -0.5,
            GeneratorKind::StudentT => {
                let nu = self.s();
                -(nu + 2.0) / (2.0 * (nu + x))
            }
            GeneratorKind::Hyperbolic => -self.s() / (2.0 * (1.0 + x).sqrt()),
            GeneratorKind::Laplace => {
                if x <= 0.0 {
                    return f64::NEG_INFINITY;
                }
                let r = (2.0 * x).sqrt();
                let (k0, k1) = k01_scaled(r);
                -k1 / (r * k0)
            }
            GeneratorKind::Slash => slash_ratio(0.5 * (self.s() + 2.0), x),
        }
    }

    /// ln Z_g, the log partition function π∫₀^∞ g(u) du.
    pub fn ln_partition(&self) -> f64 {
        match self.kind {
            GeneratorKind::Normal => (2.0 * PI).ln(),
            GeneratorKind::StudentT => {
                let nu = self.s();
                ln_gamma_unchecked(0.5 * nu) + (nu * PI).ln() - ln_gamma_unchecked(0.5 * (nu + 2.0))
            }
            GeneratorKind::Hyperbolic => {
                let nu = self.s();
                (2.0 * PI * (nu + 1.0)).ln() - nu - 2.0 * nu.ln()
            }
            GeneratorKind::Laplace => PI.ln(),
            GeneratorKind::Slash => {
                let q = self.s();
                (PI / q).ln() + 0.5 * (2.0 - q) * LN_2
            }
        }
    }

    pub fn partition(&self) -> f64 {
        self.ln_partition().exp()
    }

    /// True when g(0) is infinite, so the likelihood is unbounded at any
    /// observation placed exactly at the centre.
    pub fn singular_at_zero(&self) -> bool {
        self.kind == GeneratorKind::Laplace
    }

    /// Law of each standardized margin `Z_i`.
    pub fn z_marginal(&self) -> UnivariateLaw {
        match self.kind {
            GeneratorKind::Normal => UnivariateLaw::StdNormal,
            GeneratorKind::StudentT => UnivariateLaw::StudentT { nu: self.s(), scale: 1.0 },
            GeneratorKind::Hyperbolic => UnivariateLaw::Gh(Gh { lambda: GhOrder::ThreeHalves, alpha: self.s(), delta: 1.0 }),
            GeneratorKind::Laplace => UnivariateLaw::Laplace { scale: 1.0 / SQRT_2 },
            GeneratorKind::Slash => UnivariateLaw::Slash { q: self.s() },
        }
    }

    /// Conditional law of `Z2` given `Z1 = x`.
    pub fn z2_given_z1(&self, x: f64) -> UnivariateLaw {
        match self.kind {
            GeneratorKind::Normal => UnivariateLaw::StdNormal,
            GeneratorKind::StudentT => {
                let nu = self.s();
                UnivariateLaw::StudentT { nu: nu + 1.0, scale: ((nu + x * x) / (nu + 1.0)).sqrt() }
            }
            GeneratorKind::Hyperbolic => {
                UnivariateLaw::Gh(Gh { lambda: GhOrder::One, alpha: self.s(), delta: (1.0 + x * x).sqrt() })
            }
            GeneratorKind::Laplace => UnivariateLaw::Gh(Gh { lambda: GhOrder::Half, alpha: SQRT_2, delta: x.abs() }),
            GeneratorKind::Slash => UnivariateLaw::ExtendedSlash { a: x, q: self.s() + 1.0 },
        }
    }

    /// Law of `R² = Z1² + Z2²`, equal to the law of the squared Mahalanobis distance.
    pub fn r2_law(&self) -> R2Law {
        R2Law::new(*self)
    }
}

impl fmt::Display for GeneratorFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.shape {
            Some(s) => write!(f, "{}({s})", self.kind),
            None => write!(f, "{}", self.kind),
        }
    }
}

/// g′/g for the slash generator with s = (q+2)/2.
fn slash_ratio(s: f64, x: f64) -> f64 {
    let y = 0.5 * x;
    if y < s + 1.0 {
        // γ(s,y) = yˢe⁻ʸ Σ_{n≥0} yⁿ/(s…(s+n)); write Σ = (1 + y·T)/s
        let mut term = 1.0 / (s + 1.0);
        let mut t = term;
        let mut k = 1.0;
        loop {
            k += 1.0;
            term *= y / (s + k);
            t += term;
            if term < 1e-17 * t {
                break;
            }
        }
        -s * 0.5 * t / (1.0 + y * t)
    } else {
        ((-y - ln_scaled_lower_gamma(s, y)).exp() - s) / x
    }
}

// ---------------------------------------------------------------------------
// Univariate laws
// ---------------------------------------------------------------------------

/// Common interface of the univariate laws used across the crate.
pub trait Univariate {
    fn ln_pdf(&self, x: f64) -> f64;

    fn pdf(&self, x: f64) -> f64 {
        self.ln_pdf(x).exp()
    }

    fn cdf(&self, x: f64) -> f64;

    /// Inverse CDF; `p` must lie in (0, 1).
    fn quantile(&self, p: f64) -> Result<f64>;
}

/// GH index λ; only the values needed by the five generators are supported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GhOrder {
    Half,
    One,
    ThreeHalves,
}

impl GhOrder {
    pub fn value(self) -> f64 {
        match self {
            GhOrder::Half => 0.5,
            GhOrder::One => 1.0,
            GhOrder::ThreeHalves => 1.5,
        }
    }

    pub fn from_f64(lambda: f64) -> Result<Self> {
        match lambda {
            0.5 => Ok(GhOrder::Half),
            1.0 => Ok(GhOrder::One),
            1.5 => Ok(GhOrder::ThreeHalves),
            _ => domain(format!("GH index {lambda} is not supported (expected 1/2, 1 or 3/2)")),
        }
    }

    fn bessel(self) -> BesselOrder {
        match self {
            GhOrder::Half => BesselOrder::Half,
            GhOrder::One => BesselOrder::One,
            GhOrder::ThreeHalves => BesselOrder::ThreeHalves,
        }
    }

    /// Order of the Bessel function in the density kernel, λ − 1/2.
    fn kernel_bessel(self) -> BesselOrder {
        match self {
            GhOrder::Half => BesselOrder::Zero,
            GhOrder::One => BesselOrder::Half,
            GhOrder::ThreeHalves => BesselOrder::One,
        }
    }
}

/// Symmetric generalized hyperbolic law GH(λ, α, δ) centred at zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gh {
    pub lambda: GhOrder,
    pub alpha: f64,
    pub delta: f64,
}

/// Below this δ the GH(1/2, α, δ) density is replaced by its δ → 0 limit.
const GH_DELTA_FLOOR: f64 = 1e-10;

impl Gh {
    pub fn new(lambda: f64, alpha: f64, delta: f64) -> Result<Self> {
        let lambda = GhOrder::from_f64(lambda)?;
        if !(alpha > 0.0) || !(delta >= 0.0) || (delta == 0.0 && lambda != GhOrder::Half) {
            return Err(BulsError::InvalidParameter(format!("GH needs alpha > 0, delta > 0; got {alpha}, {delta}")));
        }
        Ok(Gh { lambda, alpha, delta })
    }

    fn ln_pdf(&self, x: f64) -> f64 {
        let (lam, a, d) = (self.lambda.value(), self.alpha, self.delta);
        if self.lambda == GhOrder::Half && d < GH_DELTA_FLOOR {
            // δ → 0: (α/π) K₀(α|x|)
            let r = a * x.abs();
            if r == 0.0 {
                return f64::INFINITY;
            }
            return (a / PI).ln() + ln_bessel_k(BesselOrder::Zero, r);
        }
        let r = (d * d + x * x).sqrt();
        lam * (a / d).ln() - LN_SQRT_2PI - ln_bessel_k(self.lambda.bessel(), d * a)
            + ln_bessel_k(self.lambda.kernel_bessel(), a * r)
            - (0.5 - lam) * (r / a).ln()
    }

    /// ∫_{−∞}^{x} for x ≤ 0.
    fn lower_tail(&self, x: f64) -> f64 {
        let opts = QuadOptions { abs_tol: 1e-14, rel_tol: 1e-12, max_segments: 4000 };
        // split near the origin, where the Laplace-type limit has a log cusp
        let cut = x.min(-1.0);
        let far = integrate(|t| self.ln_pdf(t).exp(), f64::NEG_INFINITY, cut, opts).value;
        if x <= cut {
            return far;
        }
        far + integrate(|t| self.ln_pdf(t).exp(), cut, x, opts).value
    }
}

/// The univariate laws appearing as margins or conditionals of `(Z1, Z2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum UnivariateLaw {
    StdNormal,
    /// `scale · t_ν`.
    StudentT { nu: f64, scale: f64 },
    /// Laplace(0, scale): density e^{−|x|/scale}/(2·scale).
    Laplace { scale: f64 },
    Gh(Gh),
    /// Classical slash SL(q).
    Slash { q: f64 },
    /// Extended slash ESL(a, q).
    ExtendedSlash { a: f64, q: f64 },
}

impl UnivariateLaw {
    /// P(lo < X < hi), computed on the tail closest to the interval.
    pub fn interval_prob(&self, lo: f64, hi: f64) -> f64 {
        if !(hi > lo) {
            return 0.0;
        }
        if lo >= 0.0 {
            // symmetric about zero: use lower tails of −hi, −lo
            (self.cdf(-lo) - self.cdf(-hi)).max(0.0)
        } else {
            (self.cdf(hi) - self.cdf(lo)).max(0.0)
        }
    }

    fn esl_ln_denominator(a: f64, q: f64) -> f64 {
        // ∫₀¹ u^{q−1} φ(ua) du = (1/(2√(2π))) (a²/2)^{−q/2} γ(q/2, a²/2)
        -LN_2 - LN_SQRT_2PI + ln_scaled_lower_gamma(0.5 * q, 0.5 * a * a)
    }

    fn mixture_cdf(&self, x: f64) -> f64 {
        // slash-type laws are N/T mixtures with T on (0,1); substitute u = T^q
        // and break where Φ(T·x) or the weight e^{−T²a²/2} changes regime
        let opts = QuadOptions { abs_tol: 1e-15, rel_tol: 1e-12, max_segments: 2000 };
        let (a, q) = match *self {
            UnivariateLaw::Slash { q } => (0.0, q),
            UnivariateLaw::ExtendedSlash { a, q } => (a, q),
            _ => unreachable!("mixture_cdf called on a non-slash law"),
        };
        let mut points = vec![0.0, 1.0];
        for scale in [x.abs(), a.abs()] {
            for c in [0.5, 1.0, 2.0, 4.0, 9.0] {
                let u = (c / scale).powf(q);
                if u > 0.0 && u < 1.0 {
                    points.push(u);
                }
            }
        }
        points.sort_by(f64::total_cmp);
        points.dedup();
        let t = |u: f64| u.powf(1.0 / q);
        let w = |u: f64| (-0.5 * t(u) * t(u) * a * a).exp();
        let num = integrate_pieces(|u| w(u) * normal_cdf(t(u) * x), &points, opts).value;
        if a == 0.0 {
            return num;
        }
        // ∫₀¹ e^{−t²a²/2} du = q√(2π) ∫₀¹ t^{q−1} φ(ta) dt
        let den = (q.ln() + LN_SQRT_2PI + Self::esl_ln_denominator(a, q)).exp();
        num / den
    }

    fn quantile_guess(&self, p: f64) -> f64 {
        let z = normal_quantile_unchecked(p);
        match *self {
            UnivariateLaw::StudentT { scale, .. } => z * scale,
            _ => z,
        }
    }
}

impl Univariate for UnivariateLaw {
    fn ln_pdf(&self, x: f64) -> f64 {
        match *self {
            UnivariateLaw::StdNormal => -0.5 * x * x - LN_SQRT_2PI,
            UnivariateLaw::StudentT { nu, scale } => student_t_ln_pdf(nu, x / scale) - scale.ln(),
            UnivariateLaw::Laplace { scale } => -x.abs() / scale - (2.0 * scale).ln(),
            UnivariateLaw::Gh(gh) => gh.ln_pdf(x),
            UnivariateLaw::Slash { q } => {
                // q/(2√(2π)) · (x²/2)^{−s} γ(s, x²/2), s = (q+1)/2
                q.ln() - LN_2 - LN_SQRT_2PI + ln_scaled_lower_gamma(0.5 * (q + 1.0), 0.5 * x * x)
            }
            UnivariateLaw::ExtendedSlash { a, q } => {
                // numerator (1/(4π)) c^{−(q+1)/2} γ((q+1)/2, c), c = (a² + x²)/2
                let c = 0.5 * (a * a + x * x);
                let ln_num = -(4.0 * PI).ln() + ln_scaled_lower_gamma(0.5 * (q + 1.0), c);
                ln_num - Self::esl_ln_denominator(a, q)
            }
        }
    }

    fn cdf(&self, x: f64) -> f64 {
        if x.is_nan() {
            return f64::NAN;
        }
        if x == f64::INFINITY {
            return 1.0;
        }
        if x == f64::NEG_INFINITY {
            return 0.0;
        }
        match *self {
            UnivariateLaw::StdNormal => normal_cdf(x),
            UnivariateLaw::StudentT { nu, scale } => student_t_cdf_unchecked(nu, x / scale),
            UnivariateLaw::Laplace { scale } => {
                if x < 0.0 {
                    0.5 * (x / scale).exp()
                } else {
                    1.0 - 0.5 * (-x / scale).exp()
                }
            }
            UnivariateLaw::Gh(gh) => {
                if x <= 0.0 {
                    gh.lower_tail(x)
                } else {
                    1.0 - gh.lower_tail(-x)
                }
            }
            UnivariateLaw::Slash { .. } | UnivariateLaw::ExtendedSlash { .. } => {
                if x <= 0.0 {
                    self.mixture_cdf(x)
                } else {
                    1.0 - self.mixture_cdf(-x)
                }
            }
        }
    }

    fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return domain(format!("quantile requires 0 < p < 1, got {p}"));
        }
        Ok(match *self {
            UnivariateLaw::StdNormal => normal_quantile_unchecked(p),
            UnivariateLaw::StudentT { nu, scale } => scale * student_t_quantile_unchecked(nu, p),
            UnivariateLaw::Laplace { scale } => {
                if p < 0.5 {
                    scale * (2.0 * p).ln()
                } else {
                    -scale * (2.0 * (1.0 - p)).ln()
                }
            }
            _ => {
                if p == 0.5 {
                    return Ok(0.0);
                }
                // solve on the lower tail by symmetry
                let (target, sign) = if p < 0.5 { (p, 1.0) } else { (1.0 - p, -1.0) };
                let g = self.quantile_guess(target).min(-1e-3);
                let x = invert_monotone(|x| self.cdf(x.min(0.0)), target, 2.0 * g, 0.5 * g, 1e-13);
                sign * x
            }
        })
    }
}

// ---------------------------------------------------------------------------
// Law of R²
// ---------------------------------------------------------------------------

const R2_TABLE_KNOTS: usize = 2048;

/// Law of the squared radius `R² = Z1² + Z2²`, density π g(x)/Z_g on x > 0.
///
/// The survival function has a closed form for all five generators; the
/// quantile is bracketed by an eagerly built monotone table on a log grid
/// and polished with Brent's method.
#[derive(Debug, Clone)]
pub struct R2Law {
    gen: GeneratorFamily,
    ln_const: f64,
    /// (ln x_k, cdf(x_k)), strictly increasing in both coordinates.
    table: Vec<(f64, f64)>,
}

impl R2Law {
    pub fn new(gen: GeneratorFamily) -> Self {
        let ln_const = PI.ln() - gen.ln_partition();
        let mut law = R2Law { gen, ln_const, table: Vec::new() };
        if !matches!(gen.kind(), GeneratorKind::Normal | GeneratorKind::StudentT) {
            law.build_table();
        }
        law
    }

    pub fn generator(&self) -> GeneratorFamily {
        self.gen
    }

    fn build_table(&mut self) {
        let x_lo = self.bracket_point(|s| 1.0 - s - 1e-12, 1e-6);
        let x_hi = self.bracket_point(|s| 1e-9 - s, 10.0);
        let (a, b) = (x_lo.ln(), x_hi.ln());
        let mut table = Vec::with_capacity(R2_TABLE_KNOTS);
        for k in 0..R2_TABLE_KNOTS {
            let lx = a + (b - a) * k as f64 / (R2_TABLE_KNOTS - 1) as f64;
            let c = self.cdf(lx.exp());
            if table.last().is_none_or(|&(_, prev)| c > prev) {
                table.push((lx, c));
            }
        }
        self.table = table;
    }

    /// Finds x with h(sf(x)) = 0 where h is increasing in sf... by geometric search.
    fn bracket_point(&self, h: impl Fn(f64) -> f64, start: f64) -> f64 {
        let f = |lx: f64| h(self.sf(lx.exp()));
        let mut lo = start.ln() - 1.0;
        let mut hi = start.ln() + 1.0;
        for _ in 0..200 {
            if f(lo) * f(hi) <= 0.0 {
                break;
            }
            if f(lo) < 0.0 && f(hi) < 0.0 {
                lo -= 2.0;
            } else {
                hi += 2.0;
            }
        }
        brent(f, lo, hi, 1e-12, 200).map(f64::exp).unwrap_or(start)
    }

    pub fn ln_pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return f64::NEG_INFINITY;
        }
        self.ln_const + self.gen.log_g(x)
    }

    pub fn pdf(&self, x: f64) -> f64 {
        self.ln_pdf(x).exp()
    }

    /// P(R² > x).
    pub fn sf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 1.0;
        }
        if x == f64::INFINITY {
            return 0.0;
        }
        match self.gen.kind() {
            GeneratorKind::Normal => (-0.5 * x).exp(),
            GeneratorKind::StudentT => {
                let nu = self.gen.s();
                (-0.5 * nu * (x / nu).ln_1p()).exp()
            }
            GeneratorKind::Hyperbolic => {
                let nu = self.gen.s();
                let s = (1.0 + x).sqrt();
                // e^{−ν(S−1)} (νS + 1)/(ν + 1), with S − 1 = x/(S + 1)
                (-nu * x / (s + 1.0)).exp() * (nu * s + 1.0) / (nu + 1.0)
            }
            GeneratorKind::Laplace => {
                let r = (2.0 * x).sqrt();
                let (_, k1) = k01_scaled(r);
                r * k1 * (-r).exp()
            }
            GeneratorKind::Slash => {
                let q = self.gen.s();
                0.5 * q * ln_scaled_lower_gamma(0.5 * q, 0.5 * x).exp()
            }
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        match self.gen.kind() {
            GeneratorKind::Normal => -(-0.5 * x).exp_m1(),
            GeneratorKind::StudentT => {
                let nu = self.gen.s();
                -(-0.5 * nu * (x / nu).ln_1p()).exp_m1()
            }
            _ => 1.0 - self.sf(x),
        }
    }

    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return domain(format!("quantile requires 0 < p < 1, got {p}"));
        }
        Ok(self.quantile_unchecked(p))
    }

    pub(crate) fn quantile_unchecked(&self, p: f64) -> f64 {
        match self.gen.kind() {
            GeneratorKind::Normal => -2.0 * (-p).ln_1p(),
            GeneratorKind::StudentT => {
                let nu = self.gen.s();
                nu * ((-2.0 / nu) * (-p).ln_1p()).exp_m1()
            }
            _ => {
                let t = &self.table;
                let idx = t.partition_point(|&(_, c)| c < p);
                let (lo, hi) = if idx == 0 {
                    (t[0].0 - 40.0, t[0].0)
                } else if idx >= t.len() {
                    (t[t.len() - 1].0, t[t.len() - 1].0 + 10.0)
                } else {
                    (t[idx - 1].0, t[idx].0)
                };
                // work on ln x; use the survival function in the upper half
                let f = |lx: f64| {
                    let x = lx.exp();
                    if p > 0.5 {
                        (1.0 - p) - self.sf(x)
                    } else {
                        self.cdf(x) - p
                    }
                };
                let lx = brent(f, lo, hi, 1e-14, 200)
                    .unwrap_or_else(|| invert_monotone(|lx| self.cdf(lx.exp()), p, lo, hi, 1e-14));
                lx.exp()
            }
        }
    }
}

impl Univariate for R2Law {
    fn ln_pdf(&self, x: f64) -> f64 {
        R2Law::ln_pdf(self, x)
    }

    fn cdf(&self, x: f64) -> f64 {
        R2Law::cdf(self, x)
    }

    fn quantile(&self, p: f64) -> Result<f64> {
        R2Law::quantile(self, p)
    }
}
