use serde::{Deserialize, Serialize};

use crate::error::RasterError;
use crate::raster::Layer;

/// Weights of the two terms of [`layer_distance`]. They should be
/// non-negative and sum to one so the distance stays in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistanceConfig {
    pub alpha_weight: f64,
    pub color_weight: f64,
}

impl Default for DistanceConfig {
    fn default() -> Self {
        Self {
            alpha_weight: 0.5,
            color_weight: 0.5,
        }
    }
}

impl DistanceConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.alpha_weight < 0.0 || self.color_weight < 0.0 {
            return Err("distance weights must be non-negative".into());
        }
        if ((self.alpha_weight + self.color_weight) - 1.0).abs() > 1e-9 {
            return Err(format!(
                "distance weights must sum to 1, got {}",
                self.alpha_weight + self.color_weight
            ));
        }
        Ok(())
    }
}

/// `Σ min(a, b) / Σ max(a, b)` over the alpha planes; 1 when both are empty.
pub fn soft_iou(pred: &Layer, gt: &Layer) -> f64 {
    let mut inter = 0.0f64;
    let mut union = 0.0f64;
    for (p, g) in pred.pixels().iter().zip(gt.pixels()) {
        let (a, b) = (p[3] as f64, g[3] as f64);
        inter += a.min(b);
        union += a.max(b);
    }
    if union == 0.0 {
        1.0
    } else {
        inter / union
    }
}

/// IoU of the `alpha > 0.5` supports; 1 when both are empty.
pub fn hard_iou(pred: &Layer, gt: &Layer) -> f64 {
    let mut inter = 0usize;
    let mut union = 0usize;
    for (p, g) in pred.pixels().iter().zip(gt.pixels()) {
        let (a, b) = (p[3] > 0.5, g[3] > 0.5);
        inter += (a && b) as usize;
        union += (a || b) as usize;
    }
    if union == 0 {
        1.0
    } else {
        inter as f64 / union as f64
    }
}

/// Mean per-channel RGB L1, weighted by the ground-truth alpha. Zero when
/// the ground truth is fully transparent.
pub fn weighted_rgb_l1(pred: &Layer, gt: &Layer) -> f64 {
    let mut num = 0.0f64;
    let mut den = 0.0f64;
    for (p, g) in pred.pixels().iter().zip(gt.pixels()) {
        let w = g[3] as f64;
        if w == 0.0 {
            continue;
        }
        let l1: f64 = (0..3).map(|c| (p[c] as f64 - g[c] as f64).abs()).sum();
        num += w * l1;
        den += w;
    }
    if den == 0.0 {
        0.0
    } else {
        num / (3.0 * den)
    }
}

/// Bounded layer distance: `w_α·(1 − softIoU) + w_c·min(1, weighted L1)`.
/// `gt` is the ground-truth side whose alpha weights the color term.
pub fn layer_distance(pred: &Layer, gt: &Layer, config: &DistanceConfig) -> Result<f64, RasterError> {
    pred.dims().ensure_same(gt.dims())?;
    Ok(config.alpha_weight * (1.0 - soft_iou(pred, gt))
        + config.color_weight * weighted_rgb_l1(pred, gt).min(1.0))
}
