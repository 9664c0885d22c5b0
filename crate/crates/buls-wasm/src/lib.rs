//! Browser bindings for the interactive demo in `www/`.

use buls::generators::{GeneratorFamily, GeneratorKind};
use buls::model::{Buls, ModelParams, UnitPoint};
use buls::sampling::{sample_buls, RandomSource};
use wasm_bindgen::prelude::*;

fn model(kind: &str, shape: f64, theta: [f64; 5]) -> Result<Buls, String> {
    let kind = GeneratorKind::parse(kind).ok_or_else(|| format!("unknown model '{kind}'"))?;
    let shape = kind.has_shape().then_some(shape);
    let gen = GeneratorFamily::new(kind, shape).map_err(|e| e.to_string())?;
    let theta = ModelParams::from_array(theta).map_err(|e| e.to_string())?;
    Buls::new(gen, theta).map_err(|e| e.to_string())
}

/// Joint density at the midpoints of a `cells × cells` grid, row-major with w2 increasing down the rows.
pub fn density_grid_impl(kind: &str, shape: f64, theta: [f64; 5], cells: usize) -> Result<Vec<f64>, String> {
    let m = model(kind, shape, theta)?;
    if cells == 0 || cells > 1024 {
        return Err("grid size must lie in 1..=1024".into());
    }
    let h = 1.0 / cells as f64;
    let mut out = Vec::with_capacity(cells * cells);
    for j in 0..cells {
        for i in 0..cells {
            let p = UnitPoint::new((i as f64 + 0.5) * h, (j as f64 + 0.5) * h).map_err(|e| e.to_string())?;
            out.push(m.joint_pdf(p).map_err(|e| e.to_string())?);
        }
    }
    Ok(out)
}

/// Density of W2 given W1 = w1 at `points` equispaced interior abscissae.
pub fn conditional_curve_impl(kind: &str, shape: f64, theta: [f64; 5], w1: f64, points: usize) -> Result<Vec<f64>, String> {
    let m = model(kind, shape, theta)?;
    (0..points)
        .map(|i| m.cond_pdf_w2_given_w1(w1, (i as f64 + 0.5) / points as f64).map_err(|e| e.to_string()))
        .collect()
}

/// `n` draws flattened as w1, w2, w1, w2, ...
pub fn sample_impl(kind: &str, shape: f64, theta: [f64; 5], n: usize, seed: u64) -> Result<Vec<f64>, String> {
    let m = model(kind, shape, theta)?;
    let d = sample_buls(m.gen, &m.theta, n, &mut RandomSource::new(seed)).map_err(|e| e.to_string())?;
    Ok(d.rows.iter().flat_map(|p| [p.w1, p.w2]).collect())
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn density_grid(kind: &str, shape: f64, eta1: f64, eta2: f64, sigma1: f64, sigma2: f64, rho: f64, cells: usize) -> Result<Vec<f64>, JsError> {
    density_grid_impl(kind, shape, [eta1, eta2, sigma1, sigma2, rho], cells).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn conditional_curve(
    kind: &str,
    shape: f64,
    eta1: f64,
    eta2: f64,
    sigma1: f64,
    sigma2: f64,
    rho: f64,
    w1: f64,
    points: usize,
) -> Result<Vec<f64>, JsError> {
    conditional_curve_impl(kind, shape, [eta1, eta2, sigma1, sigma2, rho], w1, points).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn sample(kind: &str, shape: f64, eta1: f64, eta2: f64, sigma1: f64, sigma2: f64, rho: f64, n: usize, seed: u32) -> Result<Vec<f64>, JsError> {
    sample_impl(kind, shape, [eta1, eta2, sigma1, sigma2, rho], n, u64::from(seed)).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    const TH: [f64; 5] = [0.5, 0.4, 0.9, 1.1, 0.5];

    #[test]
    fn grid_mass_is_close_to_one() {
        let g = density_grid_impl("normal", 0.0, [0.6, 0.6, 0.3, 0.3, 0.5], 200).unwrap();
        assert_eq!(g.len(), 40_000);
        let mass: f64 = g.iter().sum::<f64>() / 40_000.0;
        assert!((mass - 1.0).abs() < 1e-3, "{mass}");
    }

    #[test]
    fn conditional_curve_integrates_to_one() {
        let c = conditional_curve_impl("student", 4.0, [0.6, 0.6, 0.3, 0.3, 0.5], 0.4, 2000).unwrap();
        let mass: f64 = c.iter().sum::<f64>() / 2000.0;
        assert!((mass - 1.0).abs() < 1e-3, "{mass}");
    }

    #[test]
    fn samples_are_interleaved_and_reproducible() {
        let a = sample_impl("slash", 3.0, TH, 50, 7).unwrap();
        assert_eq!(a.len(), 100);
        assert_eq!(a, sample_impl("slash", 3.0, TH, 50, 7).unwrap());
        assert!(a.iter().all(|&w| w > 0.0 && w < 1.0));
    }

    #[test]
    fn bad_input_is_reported() {
        assert!(density_grid_impl("cauchy", 1.0, TH, 10).is_err());
        assert!(density_grid_impl("normal", 1.0, [0.5, 0.4, 0.9, 1.1, 1.0], 10).is_err());
        assert!(sample_impl("student", -1.0, TH, 5, 1).is_err());
        assert!(sample_impl("normal", 0.0, TH, 0, 1).is_err());
    }
}
