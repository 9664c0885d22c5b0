//! Exact simulation through the stochastic representation
//! `Z1 = R·D·U1`, `Z2 = R·√(1−D²)·U2`.
//!
//! The random source is ChaCha20 (from `rand_chacha`), which produces the same
//! stream for the same seed on every platform.

use std::f64::consts::FRAC_PI_2;

use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};

use crate::data::BivariateDataset;
use crate::error::{BulsError, Result};
use crate::generators::{GeneratorFamily, GeneratorKind, R2Law};
use crate::model::{w_of_z, ModelParams, UnitPoint};
use crate::specialfn::normal_quantile_unchecked;

/// Lower and upper clamp applied to simulated coordinates.
pub const W_CLAMP: f64 = 1e-15;

/// Seedable, reproducible random stream.
#[derive(Debug, Clone)]
pub struct RandomSource {
    seed: u64,
    rng: ChaCha20Rng,
}

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        RandomSource { seed, rng: ChaCha20Rng::seed_from_u64(seed) }
    }

    /// Independent stream for replication `index` of a study seeded with `base`.
    pub fn for_replication(base: u64, index: u64) -> Self {
        Self::new(splitmix64(base ^ index))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform on the open interval (0, 1).
    pub fn uniform(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    pub fn normal(&mut self) -> f64 {
        normal_quantile_unchecked(self.uniform())
    }

    /// Exponential with unit mean.
    pub fn exponential(&mut self) -> f64 {
        -self.uniform().ln()
    }

    /// ±1 with equal probability.
    pub fn sign(&mut self) -> f64 {
        if self.next_u64() >> 63 == 0 {
            1.0
        } else {
            -1.0
        }
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// How R² is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RadiusMethod {
    /// Closed forms and mixture representations where available.
    Fast,
    /// Inversion of the R² law at a uniform draw, for every generator.
    Inversion,
}

/// Draws standardized pairs (Z1, Z2) for one generator.
///
/// Construction may build an inverse-CDF table, so reuse the sampler across draws.
#[derive(Debug, Clone)]
pub struct ZSampler {
    gen: GeneratorFamily,
    method: RadiusMethod,
    r2: Option<R2Law>,
}

impl ZSampler {
    pub fn new(gen: GeneratorFamily) -> Self {
        Self::with_method(gen, RadiusMethod::Fast)
    }

    pub fn with_method(gen: GeneratorFamily, method: RadiusMethod) -> Self {
        let needs_table = method == RadiusMethod::Inversion || gen.kind() == GeneratorKind::Hyperbolic;
        ZSampler { gen, method, r2: needs_table.then(|| gen.r2_law()) }
    }

    pub fn generator(&self) -> GeneratorFamily {
        self.gen
    }

    pub fn sample(&self, rng: &mut RandomSource) -> (f64, f64) {
        let shape = self.gen.shape().unwrap_or(f64::NAN);
        let r2 = match (self.method, self.gen.kind()) {
            (RadiusMethod::Fast, GeneratorKind::Normal) => -2.0 * rng.uniform().ln(),
            (RadiusMethod::Fast, GeneratorKind::StudentT) => {
                let u = rng.uniform();
                shape * ((-2.0 / shape) * u.ln()).exp_m1()
            }
            (RadiusMethod::Fast, GeneratorKind::Laplace) => rng.exponential() * (-2.0 * rng.uniform().ln()),
            (RadiusMethod::Fast, GeneratorKind::Slash) => {
                let t = rng.uniform().powf(1.0 / shape);
                return (rng.normal() / t, rng.normal() / t);
            }
            _ => {
                let law = self.r2.as_ref().expect("inversion table built at construction");
                law.quantile_unchecked(rng.uniform())
            }
        };
        let r = r2.sqrt();
        let d = (FRAC_PI_2 * rng.uniform()).sin();
        let u1 = rng.sign();
        let u2 = rng.sign();
        (r * d * u1, r * (1.0 - d * d).max(0.0).sqrt() * u2)
    }
}

/// One standardized pair; builds a fresh [`ZSampler`] per call.
pub fn sample_z_pair(gen: GeneratorFamily, rng: &mut RandomSource) -> (f64, f64) {
    ZSampler::new(gen).sample(rng)
}

fn clamp_w(w: f64) -> f64 {
    w.clamp(W_CLAMP, 1.0 - W_CLAMP)
}

/// Maps a standardized pair to the unit square.
pub fn to_unit(theta: &ModelParams, z1: f64, z2: f64) -> UnitPoint {
    let rho = theta.rho;
    let x2 = rho * z1 + (1.0 - rho * rho).sqrt() * z2;
    UnitPoint { w1: clamp_w(w_of_z(z1, theta.eta1, theta.sigma1)), w2: clamp_w(w_of_z(x2, theta.eta2, theta.sigma2)) }
}

/// `n` i.i.d. BULS draws.
pub fn sample_buls(gen: GeneratorFamily, theta: &ModelParams, n: usize, rng: &mut RandomSource) -> Result<BivariateDataset> {
    theta.validate()?;
    if n == 0 {
        return Err(BulsError::InvalidParameter("sample size must be at least 1".into()));
    }
    let sampler = ZSampler::new(gen);
    let rows = (0..n)
        .map(|_| {
            let (z1, z2) = sampler.sample(rng);
            to_unit(theta, z1, z2)
        })
        .collect();
    Ok(BivariateDataset { rows, label: None })
}
