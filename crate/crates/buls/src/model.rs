//! The bivariate unit-log-symmetric distribution.
//!
//! A BULS vector `W` lives on the open unit square. With `T_i = −ln(1 − W_i)`
//! and `W̃_i = (ln T_i − ln η_i)/σ_i`, the pair `(W̃1, W̃2)` is a standardized
//! elliptical vector with correlation ρ and density generator `g`.

use serde::{Deserialize, Serialize};

use crate::bvn::bvn_cdf;
use crate::error::{domain, BulsError, Result};
use crate::generators::{GeneratorFamily, GeneratorKind, Univariate, UnivariateLaw};
use crate::quadrature::{integrate_pieces, QuadOptions};

/// θ = (η₁, η₂, σ₁, σ₂, ρ).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub eta1: f64,
    pub eta2: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    pub rho: f64,
}

impl ModelParams {
    pub fn new(eta1: f64, eta2: f64, sigma1: f64, sigma2: f64, rho: f64) -> Result<Self> {
        let p = ModelParams { eta1, eta2, sigma1, sigma2, rho };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("eta1", self.eta1), ("eta2", self.eta2), ("sigma1", self.sigma1), ("sigma2", self.sigma2)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(BulsError::InvalidParameter(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if !(self.rho.abs() < 1.0) {
            return Err(BulsError::InvalidParameter(format!("rho must lie in (-1, 1), got {}", self.rho)));
        }
        Ok(())
    }

    pub fn from_array(a: [f64; 5]) -> Result<Self> {
        Self::new(a[0], a[1], a[2], a[3], a[4])
    }

    pub fn to_array(&self) -> [f64; 5] {
        [self.eta1, self.eta2, self.sigma1, self.sigma2, self.rho]
    }

    /// μᵢ = ln ηᵢ.
    pub fn mu(&self, i: Margin) -> f64 {
        self.eta(i).ln()
    }

    pub fn eta(&self, i: Margin) -> f64 {
        match i {
            Margin::First => self.eta1,
            Margin::Second => self.eta2,
        }
    }

    pub fn sigma(&self, i: Margin) -> f64 {
        match i {
            Margin::First => self.sigma1,
            Margin::Second => self.sigma2,
        }
    }

    pub const NAMES: [&'static str; 5] = ["eta1", "eta2", "sigma1", "sigma2", "rho"];
}

/// Selects one of the two margins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Margin {
    First,
    Second,
}

impl Margin {
    pub fn from_index(i: usize) -> Result<Self> {
        match i {
            1 => Ok(Margin::First),
            2 => Ok(Margin::Second),
            _ => domain(format!("margin index must be 1 or 2, got {i}")),
        }
    }
}

/// A point of the open unit square.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitPoint {
    pub w1: f64,
    pub w2: f64,
}

impl UnitPoint {
    pub fn new(w1: f64, w2: f64) -> Result<Self> {
        check_unit(w1)?;
        check_unit(w2)?;
        Ok(UnitPoint { w1, w2 })
    }
}

fn check_unit(w: f64) -> Result<()> {
    if w > 0.0 && w < 1.0 {
        Ok(())
    } else {
        domain(format!("value must lie strictly inside (0, 1), got {w}"))
    }
}

/// Open subinterval (lo, hi) of [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) || !(lo < hi) {
            return domain(format!("interval requires 0 <= lo < hi <= 1, got ({lo}, {hi})"));
        }
        Ok(Interval { lo, hi })
    }

    pub fn full() -> Self {
        Interval { lo: 0.0, hi: 1.0 }
    }
}

/// T = −ln(1 − w).
#[inline]
pub fn t_of_w(w: f64) -> f64 {
    -(-w).ln_1p()
}

/// w̃ = (ln t − ln η)/σ; maps 0 → −∞ and 1 → +∞.
#[inline]
pub fn w_tilde(w: f64, eta: f64, sigma: f64) -> f64 {
    if w <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if w >= 1.0 {
        return f64::INFINITY;
    }
    (t_of_w(w).ln() - eta.ln()) / sigma
}

/// Inverse of [`w_tilde`]: w = 1 − exp(−η e^{σ z}).
#[inline]
pub fn w_of_z(z: f64, eta: f64, sigma: f64) -> f64 {
    -(-(eta * (sigma * z).exp())).exp_m1()
}

/// ln of the Jacobian dw̃/dw = 1/[(1 − w) t σ].
#[inline]
fn ln_jacobian(w: f64, sigma: f64) -> f64 {
    -((-w).ln_1p() + t_of_w(w).ln() + sigma.ln())
}

/// d² = (w̃₁² − 2ρw̃₁w̃₂ + w̃₂²)/(1 − ρ²).
pub fn mahalanobis_sq(theta: &ModelParams, p: UnitPoint) -> Result<f64> {
    check_unit(p.w1)?;
    check_unit(p.w2)?;
    let a = w_tilde(p.w1, theta.eta1, theta.sigma1);
    let b = w_tilde(p.w2, theta.eta2, theta.sigma2);
    Ok(quad_form(a, b, theta.rho))
}

#[inline]
pub(crate) fn quad_form(a: f64, b: f64, rho: f64) -> f64 {
    ((a * a - 2.0 * rho * a * b + b * b) / (1.0 - rho * rho)).max(0.0)
}

pub fn maha_pdf(gen: &GeneratorFamily, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return domain(format!("Mahalanobis density requires x > 0, got {x}"));
    }
    Ok(gen.r2_law().pdf(x))
}

pub fn maha_cdf(gen: &GeneratorFamily, x: f64) -> f64 {
    gen.r2_law().cdf(x)
}

pub fn maha_quantile(gen: &GeneratorFamily, p: f64) -> Result<f64> {
    gen.r2_law().quantile(p)
}

/// A BULS distribution: a generator together with θ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Buls {
    pub gen: GeneratorFamily,
    pub theta: ModelParams,
}

impl Buls {
    pub fn new(gen: GeneratorFamily, theta: ModelParams) -> Result<Self> {
        theta.validate()?;
        Ok(Buls { gen, theta })
    }

    fn zw(&self, w: f64, i: Margin) -> f64 {
        w_tilde(w, self.theta.eta(i), self.theta.sigma(i))
    }

    /// ln of the BULS density at `p`.
    pub fn joint_logpdf(&self, p: UnitPoint) -> Result<f64> {
        check_unit(p.w1)?;
        check_unit(p.w2)?;
        Ok(self.joint_logpdf_unchecked(p.w1, p.w2))
    }

    pub fn joint_pdf(&self, p: UnitPoint) -> Result<f64> {
        self.joint_logpdf(p).map(f64::exp)
    }

    pub(crate) fn joint_logpdf_unchecked(&self, w1: f64, w2: f64) -> f64 {
        let th = &self.theta;
        let a = self.zw(w1, Margin::First);
        let b = self.zw(w2, Margin::Second);
        let x = quad_form(a, b, th.rho);
        ln_jacobian(w1, th.sigma1) + ln_jacobian(w2, th.sigma2) - 0.5 * (-th.rho * th.rho).ln_1p()
            - self.gen.ln_partition()
            + self.gen.log_g(x)
    }

    /// P(W₁ ≤ w₁, W₂ ≤ w₂).
    pub fn joint_cdf(&self, p: UnitPoint) -> Result<f64> {
        check_unit(p.w1)?;
        check_unit(p.w2)?;
        let x1 = self.zw(p.w1, Margin::First);
        let x2 = self.zw(p.w2, Margin::Second);
        self.z_cdf(x1, x2)
    }

    /// P(W̃₁ ≤ x1, W̃₂ ≤ x2) where W̃₂ = ρZ₁ + √(1−ρ²)Z₂.
    fn z_cdf(&self, x1: f64, x2: f64) -> Result<f64> {
        let rho = self.theta.rho;
        if self.gen.kind() == GeneratorKind::Normal {
            return Ok(bvn_cdf(x1, x2, rho));
        }
        if x1 == f64::NEG_INFINITY || x2 == f64::NEG_INFINITY {
            return Ok(0.0);
        }
        let s = (1.0 - rho * rho).sqrt();
        let marg = self.gen.z_marginal();
        let integrand = |z: f64| {
            let f = marg.pdf(z);
            if f == 0.0 {
                return 0.0;
            }
            let y = (x2 - rho * z) / s;
            f * self.gen.z2_given_z1(z).cdf(y)
        };
        let mut points = vec![f64::NEG_INFINITY];
        for c in [-8.0, -2.0, 0.0, 2.0] {
            if c < x1 {
                points.push(c);
            }
        }
        points.push(x1);
        let est = integrate_pieces(integrand, &points, QuadOptions { abs_tol: 1e-8, rel_tol: 1e-10, max_segments: 400 });
        if est.abs_err > 1e-6 {
            return Err(BulsError::Convergence { what: "joint CDF quadrature", achieved: est.abs_err });
        }
        Ok(est.value.clamp(0.0, 1.0))
    }

    /// Density of Wᵢ.
    pub fn marginal_pdf(&self, i: Margin, w: f64) -> Result<f64> {
        check_unit(w)?;
        let z = self.zw(w, i);
        Ok((self.gen.z_marginal().ln_pdf(z) + ln_jacobian(w, self.theta.sigma(i))).exp())
    }

    /// P(Wᵢ ≤ w).
    pub fn marginal_cdf(&self, i: Margin, w: f64) -> f64 {
        self.gen.z_marginal().cdf(self.zw(w, i))
    }

    /// Qᵢ(p) = 1 − exp[−ηᵢ exp(σᵢ Q_Z(p))].
    pub fn marginal_quantile(&self, i: Margin, p: f64) -> Result<f64> {
        let z = self.gen.z_marginal().quantile(p)?;
        Ok(w_of_z(z, self.theta.eta(i), self.theta.sigma(i)))
    }

    /// Conditional density of W₂ at `w2` given W₁ = `w1`.
    pub fn cond_pdf_w2_given_w1(&self, w1: f64, w2: f64) -> Result<f64> {
        check_unit(w1)?;
        check_unit(w2)?;
        let rho = self.theta.rho;
        let s = (1.0 - rho * rho).sqrt();
        let a = self.zw(w1, Margin::First);
        let b = self.zw(w2, Margin::Second);
        let law = self.gen.z2_given_z1(a);
        let ln = law.ln_pdf((b - rho * a) / s) + ln_jacobian(w2, self.theta.sigma2) - s.ln();
        Ok(ln.exp())
    }

    /// Conditional density of W₁ at `w1` given W₂ ∈ B.
    pub fn cond_pdf_w1_given_w2_in(&self, w1: f64, b: Interval) -> Result<f64> {
        check_unit(w1)?;
        Interval::new(b.lo, b.hi)?;
        let rho = self.theta.rho;
        let s = (1.0 - rho * rho).sqrt();
        let a = self.zw(w1, Margin::First);
        let lo = self.zw(b.lo, Margin::Second);
        let hi = self.zw(b.hi, Margin::Second);
        let denom = self.gen.z_marginal().interval_prob(lo, hi);
        if !(denom >= 1e-300) {
            return Err(BulsError::NegligibleMass);
        }
        let shift = |e: f64| if e.is_infinite() { e } else { (e - rho * a) / s };
        let num = self.gen.z2_given_z1(a).interval_prob(shift(lo), shift(hi));
        let f1 = self.marginal_pdf(Margin::First, w1)?;
        Ok(f1 * num / denom)
    }

    /// E(Wᵢʳ) by quadrature against the law of Zᵢ.
    pub fn moment(&self, i: Margin, r: f64) -> Result<f64> {
        if !r.is_finite() {
            return domain(format!("moment order must be finite, got {r}"));
        }
        if r == 0.0 {
            return Ok(1.0);
        }
        let (eta, sigma) = (self.theta.eta(i), self.theta.sigma(i));
        let law = self.gen.z_marginal();
        let ln_integrand = |z: f64| {
            let u = eta * (sigma * z).exp();
            r * (-(-u).exp_m1()).ln() + law.ln_pdf(z)
        };
        let lo = law.quantile(1e-10)?;
        let hi = -lo;
        if r < 0.0 && ln_integrand(lo) > 1e12f64.ln() {
            return Err(BulsError::Divergence(format!("E(W^{r}) does not exist for the {} generator", self.gen)));
        }
        let mut points = vec![lo];
        for p in [1e-6, 0.01, 0.5, 0.99, 1.0 - 1e-6] {
            let q = law.quantile(p)?;
            if q > points[points.len() - 1] && q < hi {
                points.push(q);
            }
        }
        points.push(hi);
        let est = integrate_pieces(|z| ln_integrand(z).exp(), &points, QuadOptions { abs_tol: 1e-10, rel_tol: 1e-12, max_segments: 2000 });
        if !est.converged && est.abs_err > 1e-7 {
            return Err(BulsError::Convergence { what: "moment quadrature", achieved: est.abs_err });
        }
        if r > 0.0 {
            Ok(est.value.clamp(0.0, 1.0))
        } else {
            Ok(est.value)
        }
    }

    /// Law of the standardized margin Z.
    pub fn z_law(&self) -> UnivariateLaw {
        self.gen.z_marginal()
    }
}
