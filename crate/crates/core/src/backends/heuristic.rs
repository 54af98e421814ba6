use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::BackendError;
use crate::raster::{AlphaPlane, RasterImage};

use super::MattingBackend;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeuristicMattingConfig {
    /// Color quantization step per channel.
    pub quantization_step: f32,
    /// Smallest uniform-color component kept as foreground.
    pub min_region_area: usize,
}

impl Default for HeuristicMattingConfig {
    fn default() -> Self {
        Self {
            quantization_step: 4.0 / 255.0,
            min_region_area: 16,
        }
    }
}

impl HeuristicMattingConfig {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.quantization_step > 0.0) {
            return Err("quantization_step must be positive".into());
        }
        if self.min_region_area < 1 {
            return Err("min_region_area must be at least 1".into());
        }
        Ok(())
    }
}

fn quantize(c: [f32; 3], step: f32) -> [i32; 3] {
    c.map(|v| (v / step).round() as i32)
}

/// Flat-color matting for designs made of solid shapes on a solid backdrop.
///
/// Colors are quantized by `quantization_step`; the most frequent
/// quantized color (smallest key on ties) is the background. Every
/// 4-connected run of one other quantized color with at least
/// `min_region_area` pixels gets alpha 1, everything else 0.
pub fn heuristic_flat_matting(image: &RasterImage, config: &HeuristicMattingConfig) -> AlphaPlane {
    let dims = image.dims();
    let keys: Vec<[i32; 3]> = image
        .pixels()
        .iter()
        .map(|&c| quantize(c, config.quantization_step))
        .collect();
    let mut counts: HashMap<[i32; 3], usize> = HashMap::new();
    for k in &keys {
        *counts.entry(*k).or_default() += 1;
    }
    let background = counts
        .iter()
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0)))
        .map(|(k, _)| *k)
        .expect("image has pixels");

    let mut alpha = vec![0.0f32; dims.len()];
    let mut seen = vec![false; dims.len()];
    let mut stack = Vec::new();
    let mut component = Vec::new();
    for start in 0..dims.len() {
        if seen[start] || keys[start] == background {
            continue;
        }
        let key = keys[start];
        seen[start] = true;
        stack.push(start);
        component.clear();
        while let Some(p) = stack.pop() {
            component.push(p);
            for n in dims.neighbors4(p) {
                if !seen[n] && keys[n] == key {
                    seen[n] = true;
                    stack.push(n);
                }
            }
        }
        if component.len() >= config.min_region_area {
            for &p in &component {
                alpha[p] = 1.0;
            }
        }
    }
    AlphaPlane::new(dims, alpha).expect("binary alpha")
}

#[derive(Debug, Clone, Copy, Default)]
pub struct HeuristicMatting {
    pub config: HeuristicMattingConfig,
}

impl MattingBackend for HeuristicMatting {
    fn matte(&mut self, image: &RasterImage) -> Result<AlphaPlane, BackendError> {
        Ok(heuristic_flat_matting(image, &self.config))
    }

    fn name(&self) -> String {
        "heuristic".into()
    }
}
