//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Three operations are exposed: generating a synthetic design, peeling an
//! RGBA canvas into layers with the heuristic matting backend, and scoring
//! one layer stack against another.

use layerpeel::backends::{HarmonicInpainting, HeuristicMatting, HeuristicMattingConfig};
use layerpeel::io::{from_u8, to_u8};
use layerpeel::metrics::{evaluate, EvalConfig};
use layerpeel::pipeline::{decompose, PipelineConfig};
use layerpeel::synth::{generate_design, DesignSpec, EdgeModel, OverlapMode};
use layerpeel::{Dims, LayerSequence, RasterImage};
use wasm_bindgen::prelude::*;

/// A back-to-front layer stack handed to JavaScript.
#[wasm_bindgen]
pub struct LayerStack {
    seq: LayerSequence,
}

#[wasm_bindgen]
impl LayerStack {
    pub fn width(&self) -> usize {
        self.seq.dims().width
    }

    pub fn height(&self) -> usize {
        self.seq.dims().height
    }

    pub fn len(&self) -> usize {
        self.seq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seq.is_empty()
    }

    /// Straight (non-premultiplied) RGBA8 pixels of layer `index`.
    pub fn layer_rgba(&self, index: usize) -> Result<Vec<u8>, JsError> {
        let layer = self
            .seq
            .layers()
            .get(index)
            .ok_or_else(|| JsError::new(&format!("no layer {index}")))?;
        Ok(layer.pixels().iter().flat_map(|p| p.map(to_u8)).collect())
    }

    /// The rendered stack as opaque RGBA8.
    pub fn composite_rgba(&self) -> Vec<u8> {
        image_to_rgba(&self.seq.composite())
    }
}

impl LayerStack {
    pub fn new(seq: LayerSequence) -> Self {
        Self { seq }
    }

    pub fn sequence(&self) -> &LayerSequence {
        &self.seq
    }
}

fn image_to_rgba(image: &RasterImage) -> Vec<u8> {
    image
        .pixels()
        .iter()
        .flat_map(|p| [to_u8(p[0]), to_u8(p[1]), to_u8(p[2]), 255])
        .collect()
}

pub fn rgba_to_image(rgba: &[u8], width: usize, height: usize) -> Result<RasterImage, String> {
    let dims = Dims::new(width, height);
    if width == 0 || height == 0 || rgba.len() != dims.len() * 4 {
        return Err(format!(
            "expected {} bytes for a {width}x{height} canvas, got {}",
            dims.len() * 4,
            rgba.len()
        ));
    }
    let pixels = rgba
        .chunks_exact(4)
        .map(|p| [from_u8(p[0]), from_u8(p[1]), from_u8(p[2])])
        .collect();
    RasterImage::new(dims, pixels).map_err(|e| e.to_string())
}

fn overlap_mode(name: &str) -> Result<OverlapMode, String> {
    match name {
        "disjoint" => Ok(OverlapMode::Disjoint),
        "stacked" => Ok(OverlapMode::Stacked),
        "mixed" => Ok(OverlapMode::Mixed),
        other => Err(format!("unknown overlap mode {other}")),
    }
}

/// Demo knobs for a decomposition.
#[derive(Debug, Clone, Copy)]
pub struct PeelOptions {
    pub max_iterations: usize,
    pub refine_foreground: bool,
    pub refine_background: bool,
    pub quantization_step: f32,
}

pub fn synth(
    seed: u64,
    width: usize,
    height: usize,
    layers: (usize, usize),
    overlap: &str,
    antialias: bool,
) -> Result<LayerSequence, String> {
    let spec = DesignSpec {
        width,
        height,
        layer_count_range: layers,
        overlap_mode: overlap_mode(overlap)?,
        edge: if antialias { EdgeModel::Antialiased } else { EdgeModel::Hard },
        ..DesignSpec::default().with_seed(seed)
    };
    generate_design(&spec).map_err(|e| e.to_string())
}

pub fn peel(image: &RasterImage, options: PeelOptions) -> Result<LayerSequence, String> {
    let config = PipelineConfig {
        max_iterations: options.max_iterations,
        refine_foreground: options.refine_foreground,
        refine_background: options.refine_background,
        ..PipelineConfig::default()
    };
    config.validate()?;
    let matting = HeuristicMatting {
        config: HeuristicMattingConfig {
            quantization_step: options.quantization_step,
            ..HeuristicMattingConfig::default()
        },
    };
    matting.config.validate()?;
    decompose(image, &config, matting, HarmonicInpainting::default())
        .map(|d| d.sequence)
        .map_err(|e| e.to_string())
}

pub fn score(pred: &LayerSequence, gt: &LayerSequence, max_edits: usize) -> Result<String, String> {
    evaluate(pred, gt, max_edits, &EvalConfig::default())
        .map(|r| r.to_json())
        .map_err(|e| e.to_string())
}

fn js(e: String) -> JsError {
    JsError::new(&e)
}

/// Generates a seeded synthetic design. Layer counts include the background.
#[wasm_bindgen]
pub fn synth_design(
    seed: u64,
    width: usize,
    height: usize,
    min_layers: usize,
    max_layers: usize,
    overlap: &str,
    antialias: bool,
) -> Result<LayerStack, JsError> {
    synth(seed, width, height, (min_layers, max_layers), overlap, antialias)
        .map(LayerStack::new)
        .map_err(js)
}

/// Peels an RGBA8 canvas into layers with heuristic matting and harmonic
/// completion. The canvas alpha channel is ignored.
#[wasm_bindgen]
pub fn decompose_rgba(
    rgba: &[u8],
    width: usize,
    height: usize,
    max_iterations: usize,
    refine_foreground: bool,
    refine_background: bool,
    quantization_step: f32,
) -> Result<LayerStack, JsError> {
    let image = rgba_to_image(rgba, width, height).map_err(js)?;
    let options = PeelOptions {
        max_iterations,
        refine_foreground,
        refine_background,
        quantization_step,
    };
    peel(&image, options).map(LayerStack::new).map_err(js)
}

/// Scores `pred` against `gt` for edit budgets `0..=max_edits`; returns the
/// report as JSON.
#[wasm_bindgen]
pub fn evaluate_stacks(pred: &LayerStack, gt: &LayerStack, max_edits: usize) -> Result<String, JsError> {
    score(&pred.seq, &gt.seq, max_edits).map_err(js)
}
