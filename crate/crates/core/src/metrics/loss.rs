//! Matting losses: binary cross-entropy, soft IoU and SSIM on alpha maps.
//! Alphas are compared as-is, never binarized.

use serde::{Deserialize, Serialize};

use crate::error::RasterError;
use crate::raster::AlphaPlane;

pub const BCE_EPSILON: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossConfig {
    pub bce_weight: f64,
    pub iou_weight: f64,
    pub ssim_weight: f64,
    /// Gaussian window side, odd.
    pub window: usize,
    pub sigma: f64,
    pub c1: f64,
    pub c2: f64,
}

impl Default for LossConfig {
    fn default() -> Self {
        Self {
            bce_weight: 1.0,
            iou_weight: 1.0,
            ssim_weight: 1.0,
            window: 11,
            sigma: 1.5,
            c1: 0.01 * 0.01,
            c2: 0.03 * 0.03,
        }
    }
}

impl LossConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.bce_weight < 0.0 || self.iou_weight < 0.0 || self.ssim_weight < 0.0 {
            return Err("loss weights must be non-negative".into());
        }
        if self.window % 2 == 0 || self.window == 0 {
            return Err(format!("SSIM window must be odd, got {}", self.window));
        }
        if !(self.sigma > 0.0) {
            return Err("SSIM sigma must be positive".into());
        }
        Ok(())
    }
}

pub fn loss_bce(pred: &AlphaPlane, gt: &AlphaPlane) -> Result<f64, RasterError> {
    pred.dims().ensure_same(gt.dims())?;
    let total: f64 = pred
        .values()
        .iter()
        .zip(gt.values())
        .map(|(&p, &g)| {
            let p = (p as f64).clamp(BCE_EPSILON, 1.0 - BCE_EPSILON);
            let g = g as f64;
            -g * p.ln() - (1.0 - g) * (1.0 - p).ln()
        })
        .sum();
    Ok(total / pred.values().len() as f64)
}

/// `1 − Σ g·p / Σ (g + p − g·p)`; zero when both maps are empty.
pub fn loss_iou(pred: &AlphaPlane, gt: &AlphaPlane) -> Result<f64, RasterError> {
    pred.dims().ensure_same(gt.dims())?;
    let mut inter = 0.0f64;
    let mut union = 0.0f64;
    for (&p, &g) in pred.values().iter().zip(gt.values()) {
        let (p, g) = (p as f64, g as f64);
        inter += g * p;
        union += g + p - g * p;
    }
    Ok(if union == 0.0 { 0.0 } else { 1.0 - inter / union })
}

/// Normalized 1-D Gaussian taps.
pub fn gaussian_window(size: usize, sigma: f64) -> Vec<f64> {
    let r = (size / 2) as f64;
    let taps: Vec<f64> = (0..size)
        .map(|i| {
            let d = i as f64 - r;
            (-(d * d) / (2.0 * sigma * sigma)).exp()
        })
        .collect();
    let s: f64 = taps.iter().sum();
    taps.into_iter().map(|t| t / s).collect()
}

/// Window actually used for a canvas: the configured size, shrunk to the
/// largest odd size that fits when the canvas is smaller.
pub fn effective_window(config: &LossConfig, width: usize, height: usize) -> usize {
    let fit = width.min(height);
    let fit = if fit % 2 == 0 { fit - 1 } else { fit };
    config.window.min(fit).max(1)
}

fn filter_valid(data: &[f64], width: usize, height: usize, taps: &[f64]) -> (Vec<f64>, usize, usize) {
    let k = taps.len();
    let ow = width - k + 1;
    let oh = height - k + 1;
    let mut horiz = vec![0.0; ow * height];
    for y in 0..height {
        let row = &data[y * width..(y + 1) * width];
        for x in 0..ow {
            horiz[y * ow + x] = taps.iter().zip(&row[x..x + k]).map(|(t, v)| t * v).sum();
        }
    }
    let mut out = vec![0.0; ow * oh];
    for y in 0..oh {
        for x in 0..ow {
            out[y * ow + x] = taps
                .iter()
                .enumerate()
                .map(|(i, t)| t * horiz[(y + i) * ow + x])
                .sum();
        }
    }
    (out, ow, oh)
}

/// `1 − mean SSIM` over every fully contained Gaussian-weighted patch.
pub fn loss_ssim(pred: &AlphaPlane, gt: &AlphaPlane, config: &LossConfig) -> Result<f64, RasterError> {
    pred.dims().ensure_same(gt.dims())?;
    let dims = pred.dims();
    let win = effective_window(config, dims.width, dims.height);
    let taps = gaussian_window(win, config.sigma);
    let p: Vec<f64> = pred.values().iter().map(|&v| v as f64).collect();
    let g: Vec<f64> = gt.values().iter().map(|&v| v as f64).collect();
    let pp: Vec<f64> = p.iter().map(|v| v * v).collect();
    let gg: Vec<f64> = g.iter().map(|v| v * v).collect();
    let pg: Vec<f64> = p.iter().zip(&g).map(|(a, b)| a * b).collect();
    let (w, h) = (dims.width, dims.height);
    let (mu_p, _, _) = filter_valid(&p, w, h, &taps);
    let (mu_g, _, _) = filter_valid(&g, w, h, &taps);
    let (e_pp, _, _) = filter_valid(&pp, w, h, &taps);
    let (e_gg, _, _) = filter_valid(&gg, w, h, &taps);
    let (e_pg, _, _) = filter_valid(&pg, w, h, &taps);
    let n = mu_p.len();
    let mut total = 0.0;
    for i in 0..n {
        let (mp, mg) = (mu_p[i], mu_g[i]);
        let var_p = e_pp[i] - mp * mp;
        let var_g = e_gg[i] - mg * mg;
        let cov = e_pg[i] - mp * mg;
        total += ((2.0 * mg * mp + config.c1) * (2.0 * cov + config.c2))
            / ((mg * mg + mp * mp + config.c1) * (var_g + var_p + config.c2));
    }
    Ok(1.0 - total / n as f64)
}

pub fn loss_total(pred: &AlphaPlane, gt: &AlphaPlane, config: &LossConfig) -> Result<f64, RasterError> {
    Ok(config.bce_weight * loss_bce(pred, gt)?
        + config.iou_weight * loss_iou(pred, gt)?
        + config.ssim_weight * loss_ssim(pred, gt, config)?)
}
