//! Descriptive statistics, Monte Carlo estimator studies and Mahalanobis QQ data.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::data::BivariateDataset;
use crate::error::{BulsError, Result};
use crate::generators::GeneratorFamily;
use crate::inference::{fit, FitOptions, FitResult, MIN_FIT_N};
use crate::model::{mahalanobis_sq, ModelParams};
use crate::sampling::{sample_buls, RandomSource};
use crate::specialfn::normal_quantile_unchecked;

/// Skewness and kurtosis estimators, with m_k central moments (divisor n)
/// and s the SD with divisor n − 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SkewKurtosis {
    /// b₁ = m₃/s³, b₂ = m₄/s⁴ − 3.
    #[default]
    SampleSd,
    /// g₁ = m₃/m₂^{3/2}, g₂ = m₄/m₂² − 3.
    Population,
    /// Bias-adjusted G₁, G₂.
    Adjusted,
}

/// Summary of one variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub n: usize,
    pub min: f64,
    pub median: f64,
    pub mean: f64,
    pub max: f64,
    pub sd: f64,
    /// Coefficient of variation in percent.
    pub cv: f64,
    /// Skewness; `None` for a constant column.
    pub cs: Option<f64>,
    /// Excess kurtosis; `None` for a constant column.
    pub ck: Option<f64>,
}

pub fn summarize(xs: &[f64], conv: SkewKurtosis) -> Result<Summary> {
    let n = xs.len();
    if n < 2 {
        return Err(BulsError::Data { row: None, msg: format!("summary statistics need n >= 2, got {n}") });
    }
    let nf = n as f64;
    let mut sorted = xs.to_vec();
    sorted.sort_by(f64::total_cmp);
    let median = if n % 2 == 1 { sorted[n / 2] } else { 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]) };
    let mean = xs.iter().sum::<f64>() / nf;
    let m = |k: i32| xs.iter().map(|x| (x - mean).powi(k)).sum::<f64>() / nf;
    let (m2, m3, m4) = (m(2), m(3), m(4));
    let sd = (m2 * nf / (nf - 1.0)).sqrt();
    let cv = if mean != 0.0 { 100.0 * sd / mean } else { f64::NAN };
    let (cs, ck) = if m2 > 0.0 {
        let g1 = m3 / m2.powf(1.5);
        let g2 = m4 / (m2 * m2) - 3.0;
        match conv {
            SkewKurtosis::SampleSd => (Some(m3 / sd.powi(3)), Some(m4 / sd.powi(4) - 3.0)),
            SkewKurtosis::Population => (Some(g1), Some(g2)),
            SkewKurtosis::Adjusted => {
                let s = (nf * (nf - 1.0)).sqrt() / (nf - 2.0) * g1;
                let k = ((nf + 1.0) * g2 + 6.0) * (nf - 1.0) / ((nf - 2.0) * (nf - 3.0));
                (Some(s), Some(k))
            }
        }
    } else {
        (None, None)
    };
    Ok(Summary { n, min: sorted[0], median, mean, max: sorted[n - 1], sd, cv: if sd == 0.0 { 0.0 } else { cv }, cs, ck })
}

/// Summaries of W1 and W2.
pub fn describe(data: &BivariateDataset, conv: SkewKurtosis) -> Result<[Summary; 2]> {
    Ok([summarize(&data.w1(), conv)?, summarize(&data.w2(), conv)?])
}

/// Monte Carlo study configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MCConfig {
    pub gen: GeneratorFamily,
    pub theta_true: ModelParams,
    pub sample_sizes: Vec<usize>,
    pub replications: usize,
    pub confidence: f64,
    pub base_seed: u64,
    #[serde(default)]
    pub fit: FitOptions,
}

impl MCConfig {
    pub fn validate(&self) -> Result<()> {
        self.theta_true.validate()?;
        if self.replications == 0 {
            return Err(BulsError::InvalidParameter("replications must be >= 1".into()));
        }
        if self.sample_sizes.is_empty() || self.sample_sizes.iter().any(|&n| n < MIN_FIT_N) {
            return Err(BulsError::InvalidParameter(format!("every sample size must be >= {MIN_FIT_N}")));
        }
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            return Err(BulsError::InvalidParameter(format!("confidence must lie in (0, 1), got {}", self.confidence)));
        }
        Ok(())
    }
}

/// Aggregates for one (sample size, parameter) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MCRow {
    pub n: usize,
    pub parameter: String,
    pub true_value: f64,
    pub mean_estimate: f64,
    pub bias: f64,
    pub rmse: f64,
    pub cp: f64,
    /// Binomial standard error of `cp`.
    pub cp_se: f64,
    pub successes: usize,
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MCReport {
    pub config: MCConfig,
    pub rows: Vec<MCRow>,
}

impl MCReport {
    pub fn row(&self, n: usize, parameter: &str) -> Option<&MCRow> {
        self.rows.iter().find(|r| r.n == n && r.parameter == parameter)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("n,parameter,true_value,mean_estimate,bias,rmse,cp,cp_se,successes,failures\n");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{},{:?},{:?},{:?},{:?},{:?},{:?},{},{}",
                r.n, r.parameter, r.true_value, r.mean_estimate, r.bias, r.rmse, r.cp, r.cp_se, r.successes, r.failures
            );
        }
        s
    }
}

/// Interval θ̂ ± z·SE; the ρ interval is built on the atanh scale.
fn covers(est: &ModelParams, se: &[f64; 5], truth: &ModelParams, z: f64) -> [bool; 5] {
    let e = est.to_array();
    let t = truth.to_array();
    let mut out = [false; 5];
    for i in 0..4 {
        out[i] = (e[i] - t[i]).abs() <= z * se[i];
    }
    let r = est.rho;
    let half = z * se[4] / (1.0 - r * r);
    let (lo, hi) = ((r.atanh() - half).tanh(), (r.atanh() + half).tanh());
    out[4] = lo <= truth.rho && truth.rho <= hi;
    out
}

fn replicate(cfg: &MCConfig, size_idx: usize, rep: usize) -> Option<FitResult> {
    let n = cfg.sample_sizes[size_idx];
    let mut rng = RandomSource::for_replication(cfg.base_seed ^ ((size_idx as u64) << 40), rep as u64);
    let data = sample_buls(cfg.gen, &cfg.theta_true, n, &mut rng).ok()?;
    let f = fit(&cfg.gen, &data, &cfg.fit).ok()?;
    (f.converged && f.se.iter().all(|s| s.is_finite())).then_some(f)
}

/// Simulates, fits and aggregates bias, RMSE and coverage for every sample size.
pub fn mc_study(cfg: &MCConfig) -> Result<MCReport> {
    cfg.validate()?;
    let z = normal_quantile_unchecked(0.5 + 0.5 * cfg.confidence);
    let truth = cfg.theta_true.to_array();
    let mut rows = Vec::new();
    for (k, &n) in cfg.sample_sizes.iter().enumerate() {
        #[cfg(feature = "parallel")]
        let fits: Vec<Option<FitResult>> = {
            use rayon::prelude::*;
            (0..cfg.replications).into_par_iter().map(|r| replicate(cfg, k, r)).collect()
        };
        #[cfg(not(feature = "parallel"))]
        let fits: Vec<Option<FitResult>> = (0..cfg.replications).map(|r| replicate(cfg, k, r)).collect();

        let ok: Vec<&FitResult> = fits.iter().flatten().collect();
        let failed = cfg.replications - ok.len();
        if failed as f64 > 0.2 * cfg.replications as f64 || ok.is_empty() {
            return Err(BulsError::StudyAborted { failed, total: cfg.replications });
        }
        let m = ok.len() as f64;
        for (i, name) in ModelParams::NAMES.iter().enumerate() {
            let est: Vec<f64> = ok.iter().map(|f| f.theta_hat.to_array()[i]).collect();
            let mean = est.iter().sum::<f64>() / m;
            let rmse = (est.iter().map(|e| (e - truth[i]).powi(2)).sum::<f64>() / m).sqrt();
            let hits = ok.iter().filter(|f| covers(&f.theta_hat, &f.se, &cfg.theta_true, z)[i]).count();
            let cp = hits as f64 / m;
            rows.push(MCRow {
                n,
                parameter: name.to_string(),
                true_value: truth[i],
                mean_estimate: mean,
                bias: mean - truth[i],
                rmse,
                cp,
                cp_se: (cp * (1.0 - cp) / m).sqrt(),
                successes: ok.len(),
                failures: failed,
            });
        }
    }
    Ok(MCReport { config: cfg.clone(), rows })
}

/// Theoretical against empirical quantiles of the squared Mahalanobis distance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QQSeries {
    pub gen: GeneratorFamily,
    /// (theoretical, empirical), both nondecreasing.
    pub pairs: Vec<(f64, f64)>,
}

impl QQSeries {
    /// Largest |residual|/SD of residuals of the empirical against the
    /// theoretical quantiles.
    pub fn max_studentized_residual(&self) -> f64 {
        let r: Vec<f64> = self.pairs.iter().map(|(t, e)| e - t).collect();
        let n = r.len() as f64;
        if r.len() < 2 {
            return 0.0;
        }
        let mean = r.iter().sum::<f64>() / n;
        let sd = (r.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
        r.iter().map(|v| ((v - mean) / sd).abs()).fold(0.0, f64::max)
    }

    pub fn correlation(&self) -> f64 {
        let n = self.pairs.len() as f64;
        let mx = self.pairs.iter().map(|p| p.0).sum::<f64>() / n;
        let my = self.pairs.iter().map(|p| p.1).sum::<f64>() / n;
        let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
        for &(x, y) in &self.pairs {
            sxy += (x - mx) * (y - my);
            sxx += (x - mx).powi(2);
            syy += (y - my).powi(2);
        }
        sxy / (sxx * syy).sqrt()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("theoretical,empirical\n");
        for (t, e) in &self.pairs {
            let _ = writeln!(s, "{t:?},{e:?}");
        }
        s
    }
}

/// Sorted d²ᵢ paired with the reference quantiles at (i − 0.5)/n.
pub fn qq_data(gen: &GeneratorFamily, theta_hat: &ModelParams, data: &BivariateDataset) -> Result<QQSeries> {
    let mut d2 = data.rows.iter().map(|&p| mahalanobis_sq(theta_hat, p)).collect::<Result<Vec<_>>>()?;
    d2.sort_by(f64::total_cmp);
    let law = gen.r2_law();
    let n = d2.len() as f64;
    let pairs = d2
        .into_iter()
        .enumerate()
        .map(|(i, e)| (law.quantile_unchecked((i as f64 + 0.5) / n), e))
        .collect();
    Ok(QQSeries { gen: *gen, pairs })
}
