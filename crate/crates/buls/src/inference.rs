//! Log-likelihood, score, maximum-likelihood fitting and shape profiling.
//!
//! Fitting works in the unconstrained coordinates
//! `u = (ln η₁, ln η₂, ln σ₁, ln σ₂, atanh ρ)`.

use nalgebra::SMatrix;
use serde::{Deserialize, Serialize};

use crate::data::BivariateDataset;
use crate::error::{BulsError, Result};
use crate::generators::{GeneratorFamily, GeneratorKind};
use crate::model::{quad_form, t_of_w, w_tilde, Buls, ModelParams};
use crate::optimize::{nelder_mead, SimplexOptions};
use crate::sampling::RandomSource;

/// Number of parameters counted by AIC and BIC; a profiled shape is not counted.
pub const K_PARAMS: usize = 5;

/// Minimum sample size for fitting.
pub const MIN_FIT_N: usize = 6;

/// x_ρ below which a generator with infinite g(0) is considered to sit on a singularity.
const SINGULAR_X: f64 = 1e-8;

/// Log-times ln tᵢ of a sample with the θ-free part of the log-likelihood.
struct LogTimes {
    lt: Vec<(f64, f64)>,
    offset: f64,
}

impl LogTimes {
    fn new(data: &BivariateDataset) -> Self {
        let mut offset = 0.0;
        let lt = data
            .rows
            .iter()
            .map(|p| {
                let (l1, l2) = (t_of_w(p.w1).ln(), t_of_w(p.w2).ln());
                offset -= (-p.w1).ln_1p() + (-p.w2).ln_1p() + l1 + l2;
                (l1, l2)
            })
            .collect();
        LogTimes { lt, offset }
    }

    fn loglik(&self, gen: &GeneratorFamily, th: &ModelParams) -> Result<f64> {
        let n = self.lt.len() as f64;
        let (le1, le2) = (th.eta1.ln(), th.eta2.ln());
        let mut total = self.offset
            - n * (th.sigma1.ln() + th.sigma2.ln() + 0.5 * (-th.rho * th.rho).ln_1p() + gen.ln_partition());
        for (i, &(l1, l2)) in self.lt.iter().enumerate() {
            let x = quad_form((l1 - le1) / th.sigma1, (l2 - le2) / th.sigma2, th.rho);
            let v = gen.log_g(x);
            if !v.is_finite() {
                return Err(BulsError::NonFinite { row: i });
            }
            total += v;
        }
        Ok(total)
    }
}

/// Full BULS log-likelihood Σ ln f(w₁ᵢ, w₂ᵢ).
pub fn loglik(gen: &GeneratorFamily, theta: &ModelParams, data: &BivariateDataset) -> Result<f64> {
    Buls::new(*gen, *theta)?;
    LogTimes::new(data).loglik(gen, theta)
}

/// Log-likelihood of the log-symmetric vector `T = −ln(1 − W)`.
///
/// Differs from [`loglik`] by the data-only term Σ[ln(1 − w₁ᵢ) + ln(1 − w₂ᵢ)],
/// so both have the same maximizer. This is the scale on which published
/// fits of the UEFA and FIFA data report ℓ, AIC and BIC.
pub fn loglik_t_scale(gen: &GeneratorFamily, theta: &ModelParams, data: &BivariateDataset) -> Result<f64> {
    Ok(loglik(gen, theta, data)? + t_scale_offset(data))
}

fn t_scale_offset(data: &BivariateDataset) -> f64 {
    data.rows.iter().map(|p| (-p.w1).ln_1p() + (-p.w2).ln_1p()).sum()
}

/// Analytic gradient of [`loglik`] in (η₁, η₂, σ₁, σ₂, ρ).
pub fn score(gen: &GeneratorFamily, theta: &ModelParams, data: &BivariateDataset) -> Result<[f64; 5]> {
    theta.validate()?;
    let ModelParams { eta1, eta2, sigma1, sigma2, rho } = *theta;
    let n = data.len() as f64;
    let om = 1.0 - rho * rho;
    let mut s = [0.0; 5];
    s[2] = -n / sigma1;
    s[3] = -n / sigma2;
    s[4] = n * rho / om;
    for (i, p) in data.rows.iter().enumerate() {
        let a = w_tilde(p.w1, eta1, sigma1);
        let b = w_tilde(p.w2, eta2, sigma2);
        let x = quad_form(a, b, rho);
        let g = gen.g_ratio_unchecked(x);
        if !g.is_finite() {
            return Err(BulsError::NonFinite { row: i });
        }
        let da = 2.0 * (a - rho * b) / om;
        let db = 2.0 * (b - rho * a) / om;
        s[0] -= g * da / (sigma1 * eta1);
        s[1] -= g * db / (sigma2 * eta2);
        s[2] -= g * da * a / sigma1;
        s[3] -= g * db * b / sigma2;
        s[4] += g * (2.0 * rho * (a * a + b * b) - 2.0 * a * b * (1.0 + rho * rho)) / (om * om);
    }
    Ok(s)
}

/// Score in the unconstrained coordinates divided by n.
pub fn scaled_score(gen: &GeneratorFamily, theta: &ModelParams, data: &BivariateDataset) -> Result<[f64; 5]> {
    let s = score(gen, theta, data)?;
    let n = data.len().max(1) as f64;
    let jac = [theta.eta1, theta.eta2, theta.sigma1, theta.sigma2, 1.0 - theta.rho * theta.rho];
    Ok(std::array::from_fn(|i| s[i] * jac[i] / n))
}

pub fn to_unconstrained(theta: &ModelParams) -> [f64; 5] {
    [theta.eta1.ln(), theta.eta2.ln(), theta.sigma1.ln(), theta.sigma2.ln(), theta.rho.atanh()]
}

pub fn from_unconstrained(u: &[f64]) -> Option<ModelParams> {
    let p = ModelParams {
        eta1: u[0].exp(),
        eta2: u[1].exp(),
        sigma1: u[2].exp(),
        sigma2: u[3].exp(),
        rho: u[4].tanh(),
    };
    p.validate().ok().map(|_| p)
}

/// Options for [`fit`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    /// Random restarts after the first simplex run.
    pub restarts: usize,
    /// Simplex diameter tolerance in the unconstrained coordinates.
    pub tol: f64,
    pub max_evals: usize,
    /// Seed of the restart perturbations.
    pub seed: u64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions { restarts: 3, tol: 1e-9, max_evals: 20_000, seed: 0x5eed }
    }
}

/// Outcome of a maximum-likelihood fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub gen: GeneratorFamily,
    pub theta_hat: ModelParams,
    /// Standard errors in (η₁, η₂, σ₁, σ₂, ρ) order; NaN when the information is singular.
    pub se: [f64; 5],
    /// Log-likelihood on the `T = −ln(1 − W)` scale.
    pub loglik: f64,
    /// Full log-likelihood of the unit-square data.
    pub loglik_unit: f64,
    pub aic: f64,
    pub bic: f64,
    pub converged: bool,
    pub iterations: usize,
    pub score_norm: f64,
    pub n: usize,
    pub warnings: Vec<String>,
}

/// Moment start: mean, SD (divisor n) and Pearson correlation of ln tᵢ.
pub fn moment_start(data: &BivariateDataset) -> ModelParams {
    let n = data.len() as f64;
    let x: Vec<f64> = data.rows.iter().map(|p| t_of_w(p.w1).ln()).collect();
    let y: Vec<f64> = data.rows.iter().map(|p| t_of_w(p.w2).ln()).collect();
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx = x.iter().map(|v| (v - mx).powi(2)).sum::<f64>() / n;
    let syy = y.iter().map(|v| (v - my).powi(2)).sum::<f64>() / n;
    let sxy = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum::<f64>() / n;
    let r = if sxx > 0.0 && syy > 0.0 { sxy / (sxx * syy).sqrt() } else { 0.0 };
    ModelParams {
        eta1: mx.exp(),
        eta2: my.exp(),
        sigma1: sxx.sqrt().max(1e-3),
        sigma2: syy.sqrt().max(1e-3),
        rho: r.clamp(-0.99, 0.99),
    }
}

/// Maximum-likelihood fit of θ for a fixed generator.
pub fn fit(gen: &GeneratorFamily, data: &BivariateDataset, opts: &FitOptions) -> Result<FitResult> {
    if data.len() < MIN_FIT_N {
        return Err(BulsError::Data {
            row: None,
            msg: format!("fitting needs at least {MIN_FIT_N} observations, got {}", data.len()),
        });
    }
    let times = LogTimes::new(data);
    let objective = |u: &[f64]| match from_unconstrained(u) {
        Some(th) => times.loglik(gen, &th).map(|v| -v).unwrap_or(f64::INFINITY),
        None => f64::INFINITY,
    };
    let start = to_unconstrained(&moment_start(data));
    let sopts = SimplexOptions { diameter_tol: opts.tol, max_evals: opts.max_evals };
    let mut best = nelder_mead(objective, &start, &[0.1; 5], sopts);
    let mut evals = best.evals;
    let mut rng = RandomSource::new(opts.seed);
    for _ in 0..opts.restarts {
        let steps: Vec<f64> = (0..5).map(|_| 0.05 + 0.1 * rng.uniform()).collect();
        let r = nelder_mead(objective, &best.x, &steps, sopts);
        evals += r.evals;
        if r.value <= best.value {
            best = r;
        }
    }
    let theta_hat = from_unconstrained(&best.x).ok_or(BulsError::Convergence {
        what: "likelihood maximization",
        achieved: f64::INFINITY,
    })?;
    if !best.value.is_finite() {
        return Err(BulsError::Convergence { what: "likelihood maximization", achieved: f64::INFINITY });
    }

    let mut warnings = Vec::new();
    let loglik_unit = -best.value;
    let loglik = loglik_unit + t_scale_offset(data);
    let n = data.len();
    let score_norm = match scaled_score(gen, &theta_hat, data) {
        Ok(s) => s.iter().fold(0.0f64, |m, v| m.max(v.abs())),
        Err(_) => f64::INFINITY,
    };
    let se = standard_errors(gen, &theta_hat, data).unwrap_or_else(|| {
        warnings.push("observed information is not positive definite; standard errors unavailable".into());
        [f64::NAN; 5]
    });

    let mut converged = best.converged && score_norm < 1e-4;
    if gen.singular_at_zero() {
        let near = data.rows.iter().position(|p| {
            let a = w_tilde(p.w1, theta_hat.eta1, theta_hat.sigma1);
            let b = w_tilde(p.w2, theta_hat.eta2, theta_hat.sigma2);
            quad_form(a, b, theta_hat.rho) < SINGULAR_X
        });
        if let Some(row) = near {
            converged = false;
            warnings.push(format!(
                "unbounded likelihood: the {} generator has g(0) = +inf and the fit is centred on row {}",
                gen,
                row + 1
            ));
        } else {
            warnings.push(format!(
                "the {gen} likelihood is unbounded (g(0) = +inf); this is a local maximum away from the singularities"
            ));
        }
    }
    if !best.converged {
        warnings.push(format!("simplex did not reach diameter {:e} (achieved {:e})", opts.tol, best.diameter));
    } else if score_norm >= 1e-4 {
        warnings.push(format!("scaled score {score_norm:e} exceeds 1e-4 at the optimum"));
    }

    let k = K_PARAMS as f64;
    Ok(FitResult {
        gen: *gen,
        theta_hat,
        se,
        loglik,
        loglik_unit,
        aic: -2.0 * loglik + 2.0 * k,
        bic: -2.0 * loglik + k * (n as f64).ln(),
        converged,
        iterations: evals,
        score_norm,
        n,
        warnings,
    })
}

/// Standard errors from the numerical observed information, by the delta method.
pub fn standard_errors(gen: &GeneratorFamily, theta: &ModelParams, data: &BivariateDataset) -> Option<[f64; 5]> {
    let u0 = to_unconstrained(theta);
    let times = LogTimes::new(data);
    let f = |u: &[f64; 5]| from_unconstrained(u).and_then(|th| times.loglik(gen, &th).ok()).unwrap_or(f64::NAN);
    let h: [f64; 5] = std::array::from_fn(|i| 1e-4 * (1.0 + u0[i].abs()));
    let f0 = f(&u0);
    let shifted = |d: &[(usize, f64)]| {
        let mut u = u0;
        for &(i, s) in d {
            u[i] += s;
        }
        f(&u)
    };
    let mut hess = SMatrix::<f64, 5, 5>::zeros();
    for i in 0..5 {
        let hi = h[i];
        let d = (-shifted(&[(i, 2.0 * hi)]) + 16.0 * shifted(&[(i, hi)]) - 30.0 * f0 + 16.0 * shifted(&[(i, -hi)])
            - shifted(&[(i, -2.0 * hi)]))
            / (12.0 * hi * hi);
        hess[(i, i)] = d;
        for j in 0..i {
            let hj = h[j];
            let d = (shifted(&[(i, hi), (j, hj)]) - shifted(&[(i, hi), (j, -hj)]) - shifted(&[(i, -hi), (j, hj)])
                + shifted(&[(i, -hi), (j, -hj)]))
                / (4.0 * hi * hj);
            hess[(i, j)] = d;
            hess[(j, i)] = d;
        }
    }
    if hess.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let cov = (-hess).cholesky()?.inverse();
    let jac = [theta.eta1, theta.eta2, theta.sigma1, theta.sigma2, 1.0 - theta.rho * theta.rho];
    Some(std::array::from_fn(|i| jac[i] * cov[(i, i)].sqrt()))
}

/// Profile-likelihood result over a shape grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileResult {
    pub best: FitResult,
    pub shape: f64,
    /// (shape, T-scale log-likelihood) for every grid point that fitted.
    pub profile: Vec<(f64, f64)>,
    pub warnings: Vec<String>,
}

pub fn default_shape_grid() -> Vec<f64> {
    (1..=30).map(f64::from).collect()
}

/// Fits at every grid shape and keeps the largest likelihood (first on ties).
pub fn profile_fit(kind: GeneratorKind, data: &BivariateDataset, grid: &[f64], opts: &FitOptions) -> Result<ProfileResult> {
    if !kind.has_shape() {
        return Err(BulsError::InvalidParameter(format!("{kind} has no shape parameter to profile")));
    }
    if grid.is_empty() {
        return Err(BulsError::InvalidParameter("shape grid is empty".into()));
    }
    let run = |&s: &f64| GeneratorFamily::new(kind, Some(s)).and_then(|g| fit(&g, data, opts));
    #[cfg(feature = "parallel")]
    let fits: Vec<Result<FitResult>> = {
        use rayon::prelude::*;
        grid.par_iter().map(run).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let fits: Vec<Result<FitResult>> = grid.iter().map(run).collect();

    let mut warnings = Vec::new();
    let mut profile = Vec::new();
    let mut best: Option<(f64, FitResult)> = None;
    for (&s, r) in grid.iter().zip(fits) {
        match r {
            Ok(f) => {
                profile.push((s, f.loglik));
                if best.as_ref().is_none_or(|(_, b)| f.loglik > b.loglik) {
                    best = Some((s, f));
                }
            }
            Err(e) => warnings.push(format!("shape {s}: {e}")),
        }
    }
    let (shape, best) = best.ok_or(BulsError::Convergence { what: "profile likelihood", achieved: f64::INFINITY })?;
    Ok(ProfileResult { best, shape, profile, warnings })
}

/// Fits a generator, profiling the shape when the family has one.
pub fn fit_kind(kind: GeneratorKind, data: &BivariateDataset, grid: &[f64], opts: &FitOptions) -> Result<(FitResult, Vec<String>)> {
    if kind.has_shape() {
        let p = profile_fit(kind, data, grid, opts)?;
        Ok((p.best, p.warnings))
    } else {
        let gen = GeneratorFamily::new(kind, None)?;
        Ok((fit(&gen, data, opts)?, Vec::new()))
    }
}

/// Scans ∂ℓ/∂ρ over (−0.999, 0.999) with the other parameters fixed and
/// reports a sign-change bracket, preferring a + → − change (a maximum).
pub fn rho_root_exists(
    gen: &GeneratorFamily,
    data: &BivariateDataset,
    eta1: f64,
    eta2: f64,
    sigma1: f64,
    sigma2: f64,
) -> (bool, Option<(f64, f64)>) {
    let steps = 400;
    let d = |rho: f64| {
        ModelParams::new(eta1, eta2, sigma1, sigma2, rho)
            .and_then(|th| score(gen, &th, data))
            .map(|s| s[4])
            .unwrap_or(f64::NAN)
    };
    let grid: Vec<f64> = (0..=steps).map(|k| -0.999 + 1.998 * k as f64 / steps as f64).collect();
    let vals: Vec<f64> = grid.iter().map(|&r| d(r)).collect();
    let mut any = None;
    for k in 0..steps {
        let (a, b) = (vals[k], vals[k + 1]);
        if !(a.is_finite() && b.is_finite()) {
            continue;
        }
        if a > 0.0 && b <= 0.0 {
            return (true, Some((grid[k], grid[k + 1])));
        }
        if any.is_none() && a * b <= 0.0 {
            any = Some((grid[k], grid[k + 1]));
        }
    }
    (any.is_some(), any)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::uefa;
    use crate::model::UnitPoint;
    use crate::sampling::sample_buls;
    use approx::assert_abs_diff_eq;

    #[test]
    fn single_row_likelihood() {
        let gen = GeneratorFamily::hyperbolic(2.0).unwrap();
        let th = ModelParams::new(0.5, 0.4, 0.9, 1.1, 0.3).unwrap();
        let data = BivariateDataset::from_pairs(&[(0.3, 0.6)], None).unwrap();
        let m = Buls::new(gen, th).unwrap();
        let direct = m.joint_logpdf(UnitPoint::new(0.3, 0.6).unwrap()).unwrap();
        assert!((loglik(&gen, &th, &data).unwrap() - direct).abs() < 1e-13);
    }

    #[test]
    fn uefa_normal_loglik_at_published_estimate() {
        let th = ModelParams::new(0.5288, 0.3414, 0.8865, 1.1355, 0.4956).unwrap();
        let v = loglik_t_scale(&GeneratorFamily::normal(), &th, &uefa()).unwrap();
        assert!((v + 36.693).abs() < 0.01, "{v}");
    }

    #[test]
    fn score_matches_finite_differences() {
        let th = ModelParams::new(0.8, 1.3, 0.7, 0.5, 0.4).unwrap();
        let data = sample_buls(GeneratorFamily::normal(), &th, 60, &mut RandomSource::new(9)).unwrap();
        for gen in [
            GeneratorFamily::normal(),
            GeneratorFamily::student_t(3.0).unwrap(),
            GeneratorFamily::hyperbolic(1.5).unwrap(),
            GeneratorFamily::laplace(),
            GeneratorFamily::slash(2.5).unwrap(),
        ] {
            let s = score(&gen, &th, &data).unwrap();
            let p = th.to_array();
            for i in 0..5 {
                let h = 1e-6 * p[i].abs().max(0.1);
                let mut up = p;
                let mut dn = p;
                up[i] += h;
                dn[i] -= h;
                let fd = (loglik(&gen, &ModelParams::from_array(up).unwrap(), &data).unwrap()
                    - loglik(&gen, &ModelParams::from_array(dn).unwrap(), &data).unwrap())
                    / (2.0 * h);
                assert!((fd - s[i]).abs() <= 1e-5 * s[i].abs().max(1.0), "{gen} param {i}: fd {fd} vs {}", s[i]);
            }
        }
    }

    #[test]
    fn normal_fit_matches_closed_form_standard_errors() {
        let th = ModelParams::new(0.8, 1.3, 0.7, 0.5, 0.4).unwrap();
        let data = sample_buls(GeneratorFamily::normal(), &th, 400, &mut RandomSource::new(21)).unwrap();
        let f = fit(&GeneratorFamily::normal(), &data, &FitOptions::default()).unwrap();
        assert!(f.converged, "{:?}", f.warnings);
        let t = f.theta_hat;
        let n = data.len() as f64;
        assert_abs_diff_eq!(f.se[0], t.eta1 * t.sigma1 / n.sqrt(), epsilon = 1e-4);
        assert_abs_diff_eq!(f.se[2], t.sigma1 / (2.0 * n).sqrt(), epsilon = 1e-4);
        assert_abs_diff_eq!(f.se[4], (1.0 - t.rho * t.rho) / n.sqrt(), epsilon = 1e-4);
        assert_abs_diff_eq!(f.aic, -2.0 * f.loglik + 10.0, epsilon = 1e-12);
        assert!(f.loglik_unit >= loglik(&GeneratorFamily::normal(), &moment_start(&data), &data).unwrap());
    }

    #[test]
    fn fit_rejects_small_samples() {
        let data = BivariateDataset::from_pairs(&[(0.2, 0.3); 5], None).unwrap();
        assert!(matches!(fit(&GeneratorFamily::normal(), &data, &FitOptions::default()), Err(BulsError::Data { .. })));
    }

    #[test]
    fn rho_scan_brackets_the_truth() {
        let th = ModelParams::new(1.0, 1.0, 0.6, 0.6, 0.5).unwrap();
        let data = sample_buls(GeneratorFamily::normal(), &th, 2000, &mut RandomSource::new(4)).unwrap();
        let (ok, br) = rho_root_exists(&GeneratorFamily::normal(), &data, 1.0, 1.0, 0.6, 0.6);
        let (lo, hi) = br.unwrap();
        assert!(ok && lo < 0.56 && hi > 0.44, "({lo}, {hi})");
        let one = BivariateDataset::from_pairs(&[(0.3, 0.4)], None).unwrap();
        let _ = rho_root_exists(&GeneratorFamily::normal(), &one, 1.0, 1.0, 1.0, 1.0);
    }
}
