use serde::{Deserialize, Serialize};

use crate::error::BackendError;
use crate::raster::{Mask, RasterImage};

use super::InpaintingBackend;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HarmonicConfig {
    /// Stop once no masked value moves by more than this in a sweep.
    pub tolerance: f64,
    pub max_sweeps: usize,
}

impl Default for HarmonicConfig {
    fn default() -> Self {
        Self {
            tolerance: 1e-4,
            max_sweeps: 2000,
        }
    }
}

/// Fills the masked pixels with the discrete harmonic interpolant of the
/// unmasked ones.
///
/// Each masked pixel converges to the mean of its in-canvas 4-neighbors.
/// The fill starts from an onion-peel guess and is relaxed with
/// over-relaxed Gauss-Seidel sweeps; the result is clamped to the range of
/// the boundary values per channel. Unmasked pixels are copied bit-exact.
pub fn harmonic_inpaint(
    image: &RasterImage,
    mask: &Mask,
    config: &HarmonicConfig,
) -> Result<RasterImage, BackendError> {
    let dims = image.dims();
    dims.ensure_same(mask.dims())?;
    if mask.is_empty() {
        return Ok(image.clone());
    }
    if mask.is_full() {
        return Err(BackendError::InvalidInput(
            "mask covers the whole image, no boundary to fill from".into(),
        ));
    }

    let unknown: Vec<usize> = mask.indices().collect();
    let neighbors: Vec<Vec<usize>> = unknown.iter().map(|&p| dims.neighbors4(p).collect()).collect();

    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for p in 0..dims.len() {
        if !mask.at(p) && dims.neighbors4(p).any(|n| mask.at(n)) {
            for c in 0..3 {
                let v = image.pixels()[p][c] as f64;
                lo[c] = lo[c].min(v);
                hi[c] = hi[c].max(v);
            }
        }
    }

    let mut values: Vec<[f64; 3]> = image.pixels().iter().map(|c| c.map(f64::from)).collect();
    let mut known: Vec<bool> = (0..dims.len()).map(|p| !mask.at(p)).collect();
    let mut pending = unknown.clone();
    while !pending.is_empty() {
        let mut front = Vec::new();
        let mut rest = Vec::new();
        for &p in &pending {
            let mut sum = [0.0; 3];
            let mut n = 0usize;
            for q in dims.neighbors4(p) {
                if known[q] {
                    for c in 0..3 {
                        sum[c] += values[q][c];
                    }
                    n += 1;
                }
            }
            if n > 0 {
                front.push((p, sum.map(|s| s / n as f64)));
            } else {
                rest.push(p);
            }
        }
        for &(p, v) in &front {
            values[p] = v;
            known[p] = true;
        }
        pending = rest;
    }

    let (x0, y0, x1, y1) = bounding_box(&unknown, dims.width);
    let span = (x1 - x0).max(y1 - y0) + 2;
    let omega = 2.0 / (1.0 + (std::f64::consts::PI / span as f64).sin());
    for _ in 0..config.max_sweeps {
        let mut change = 0.0f64;
        for (s, &p) in unknown.iter().enumerate() {
            let nb = &neighbors[s];
            let mut mean = [0.0; 3];
            for &q in nb {
                for c in 0..3 {
                    mean[c] += values[q][c];
                }
            }
            for c in 0..3 {
                let target = mean[c] / nb.len() as f64;
                let delta = omega * (target - values[p][c]);
                values[p][c] += delta;
                change = change.max(delta.abs());
            }
        }
        if change < config.tolerance {
            break;
        }
    }

    let mut out = image.clone();
    for &p in &unknown {
        let v = values[p];
        out.pixels_mut()[p] = std::array::from_fn(|c| v[c].clamp(lo[c], hi[c]) as f32);
    }
    Ok(out)
}

fn bounding_box(indices: &[usize], width: usize) -> (usize, usize, usize, usize) {
    let mut b = (usize::MAX, usize::MAX, 0, 0);
    for &p in indices {
        let (x, y) = (p % width, p / width);
        b = (b.0.min(x), b.1.min(y), b.2.max(x), b.3.max(y));
    }
    b
}

#[derive(Debug, Clone, Copy, Default)]
pub struct HarmonicInpainting {
    pub config: HarmonicConfig,
}

impl InpaintingBackend for HarmonicInpainting {
    fn inpaint(&mut self, image: &RasterImage, mask: &Mask) -> Result<RasterImage, BackendError> {
        harmonic_inpaint(image, mask, &self.config)
    }

    fn name(&self) -> String {
        "harmonic".into()
    }
}
