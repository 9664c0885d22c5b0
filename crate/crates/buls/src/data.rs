//! Bivariate samples on the unit square and the two embedded data sets.

use serde::{Deserialize, Serialize};

use crate::error::{BulsError, Result};
use crate::model::UnitPoint;

/// A sample of points strictly inside the unit square.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BivariateDataset {
    pub rows: Vec<UnitPoint>,
    pub label: Option<String>,
}

impl BivariateDataset {
    /// Validates every pair, reporting the first offending row.
    pub fn from_pairs(pairs: &[(f64, f64)], label: Option<&str>) -> Result<Self> {
        let mut rows = Vec::with_capacity(pairs.len());
        for (i, &(w1, w2)) in pairs.iter().enumerate() {
            let p = UnitPoint::new(w1, w2).map_err(|_| BulsError::Data {
                row: Some(i),
                msg: format!("({w1}, {w2}) is not strictly inside the unit square"),
            })?;
            rows.push(p);
        }
        Ok(BivariateDataset { rows, label: label.map(str::to_owned) })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn w1(&self) -> Vec<f64> {
        self.rows.iter().map(|p| p.w1).collect()
    }

    pub fn w2(&self) -> Vec<f64> {
        self.rows.iter().map(|p| p.w2).collect()
    }

    pub fn pairs(&self) -> Vec<(f64, f64)> {
        self.rows.iter().map(|p| (p.w1, p.w2)).collect()
    }
}

/// UEFA Champions League: minutes until the first kick goal by any team (W1)
/// and until the first goal of any type by the home team (W2).
const UEFA_MINUTES: [(u8, u8); 37] = [
    (26, 20), (63, 18), (19, 19), (66, 85), (40, 40), (49, 49), (8, 8), (69, 71), (39, 39), (82, 48),
    (72, 72), (66, 62), (25, 9), (41, 3), (16, 75), (18, 18), (22, 14), (42, 42), (2, 2), (36, 52),
    (34, 34), (53, 39), (54, 7), (51, 28), (76, 64), (64, 15), (26, 48), (16, 16), (44, 13), (25, 14),
    (55, 11), (49, 49), (24, 24), (44, 30), (42, 3), (27, 47), (28, 28),
];

/// 2022 FIFA World Cup: medium (W1) and long (W2) pass completion proportions.
const FIFA: [(f64, f64); 32] = [
    (0.888, 0.541), (0.815, 0.474), (0.907, 0.624), (0.891, 0.606), (0.827, 0.517), (0.898, 0.557),
    (0.856, 0.462), (0.861, 0.618), (0.890, 0.603), (0.860, 0.477), (0.920, 0.646), (0.894, 0.587),
    (0.913, 0.648), (0.849, 0.471), (0.781, 0.427), (0.828, 0.442), (0.864, 0.581), (0.820, 0.527),
    (0.846, 0.526), (0.879, 0.601), (0.860, 0.481), (0.885, 0.616), (0.862, 0.592), (0.769, 0.463),
    (0.845, 0.495), (0.846, 0.489), (0.931, 0.751), (0.863, 0.555), (0.856, 0.447), (0.879, 0.569),
    (0.812, 0.613), (0.841, 0.594),
];

/// UEFA data as minutes/90 (full precision).
pub fn uefa() -> BivariateDataset {
    let pairs: Vec<_> = UEFA_MINUTES.iter().map(|&(a, b)| (a as f64 / 90.0, b as f64 / 90.0)).collect();
    BivariateDataset::from_pairs(&pairs, Some("uefa")).expect("embedded data is interior")
}

/// UEFA data rounded to three decimals, exactly as tabulated.
pub fn uefa_printed() -> BivariateDataset {
    let pairs: Vec<_> = uefa().pairs().into_iter().map(|(a, b)| (round3(a), round3(b))).collect();
    BivariateDataset::from_pairs(&pairs, Some("uefa-printed")).expect("embedded data is interior")
}

pub fn fifa() -> BivariateDataset {
    BivariateDataset::from_pairs(&FIFA, Some("fifa")).expect("embedded data is interior")
}

/// Looks up an embedded data set by name.
pub fn embedded(name: &str) -> Option<BivariateDataset> {
    match name.to_ascii_lowercase().as_str() {
        "uefa" => Some(uefa()),
        "uefa-printed" => Some(uefa_printed()),
        "fifa" => Some(fifa()),
        _ => None,
    }
}

pub const EMBEDDED_NAMES: [&str; 3] = ["uefa", "uefa-printed", "fifa"];

fn round3(x: f64) -> f64 {
    (x * 1000.0).round() / 1000.0
}
