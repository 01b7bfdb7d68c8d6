//! Choosing the high-risk class weight that yields a target ratio of
//! cautious to dangerous errors.

use serde::{Deserialize, Serialize};

use super::{train_forest, ForestConfig};
use crate::data::{split_holdout, Dataset};
use crate::error::{Error, Result};
use crate::metrics::ConfusionMatrix;

/// Multipliers tried on the high-risk class weight.
pub const COST_GRID: [f64; 8] = [0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0];

/// Share of the data held out to count errors.
const HOLDOUT_FRACTION: f64 = 0.3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub multiplier: f64,
    pub class_weights: Vec<f64>,
    /// Actual high-risk rows forecast lower.
    pub dangerous: usize,
    /// Forecast high-risk rows that were actually lower.
    pub cautious: usize,
    /// `cautious / dangerous` when both are nonzero.
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub target_ratio: f64,
    pub class_weights: Vec<f64>,
    pub multiplier: f64,
    pub realized_ratio: f64,
    pub holdout_rows: usize,
    pub sweep: Vec<GridPoint>,
}

/// Sweep [`COST_GRID`] on the weight of the first (highest-risk) label,
/// training on a seeded split of `data` and counting errors on the rest.
/// Returns the weights whose ratio is nearest `target_ratio` on a log scale.
pub fn calibrate_cost_ratio(data: &Dataset, config: &ForestConfig, target_ratio: f64) -> Result<Calibration> {
    if !(target_ratio > 0.0 && target_ratio.is_finite()) {
        return Err(Error::invalid(format!("target ratio {target_ratio} must be positive")));
    }
    config.validate(data.schema().n_labels())?;
    let high = 0;
    let (train, holdout) = split_holdout(data, HOLDOUT_FRACTION, config.master_seed)?;
    let labels = &data.schema().labels;

    let mut sweep = Vec::with_capacity(COST_GRID.len());
    for multiplier in COST_GRID {
        let mut class_weights = config.class_weights.clone();
        class_weights[high] *= multiplier;
        let grid_config = ForestConfig { class_weights: class_weights.clone(), ..config.clone() };
        let forest = train_forest(&train, &grid_config)?;
        let predicted: Vec<usize> = forest.predict(&holdout)?.into_iter().map(|v| v.label).collect();
        let cm = ConfusionMatrix::from_indices(&predicted, holdout.labels(), labels)?;
        let (dangerous, cautious) = cm.cost_errors(high);
        let (dangerous, cautious) = (dangerous as usize, cautious as usize);
        let ratio = (dangerous > 0 && cautious > 0).then(|| cautious as f64 / dangerous as f64);
        sweep.push(GridPoint { multiplier, class_weights, dangerous, cautious, ratio });
    }

    let best = sweep
        .iter()
        .filter_map(|p| p.ratio.map(|r| (p, (r.ln() - target_ratio.ln()).abs())))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(p, _)| p.clone());
    let Some(best) = best else {
        let summary: Vec<String> = sweep
            .iter()
            .map(|p| format!("x{}: dangerous={} cautious={}", p.multiplier, p.dangerous, p.cautious))
            .collect();
        return Err(Error::Calibration(summary.join("; ")));
    };
    Ok(Calibration {
        target_ratio,
        class_weights: best.class_weights.clone(),
        multiplier: best.multiplier,
        realized_ratio: best.ratio.expect("filtered on ratio"),
        holdout_rows: holdout.n_rows(),
        sweep,
    })
}
