//! Front-to-back decomposition driver.
//!
//! Each iteration mattes the current image, completes the area under the
//! matte, optionally refines both, and unblends the top layer's colors
//! against the completed backdrop. The loop then continues on the backdrop.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::backends::{check_inpainting, check_matting, InpaintingBackend, MattingBackend};
use crate::error::BackendError;
use crate::raster::{unblend, AlphaPlane, Layer, LayerSequence, Mask, RasterImage};
use crate::refine::{refine_background, refine_foreground_matching, PaletteSource, RefineConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub max_iterations: usize,
    /// Alpha above which a pixel counts as foreground.
    pub termination_alpha: f32,
    /// Stop once fewer than this fraction of pixels are foreground.
    pub termination_fraction: f64,
    /// Square dilation radius applied to the binarized matte before inpainting.
    pub inpaint_dilation: usize,
    pub refine_foreground: bool,
    pub refine_background: bool,
    pub refine: RefineConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            max_iterations: 3,
            termination_alpha: 0.5,
            termination_fraction: 5e-4,
            inpaint_dilation: 3,
            refine_foreground: true,
            refine_background: true,
            refine: RefineConfig::default(),
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.max_iterations < 1 {
            return Err("max_iterations must be at least 1".into());
        }
        if !(self.termination_alpha > 0.0 && self.termination_alpha < 1.0) {
            return Err(format!("termination_alpha must be in (0, 1), got {}", self.termination_alpha));
        }
        if !(self.termination_fraction > 0.0 && self.termination_fraction < 1.0) {
            return Err(format!(
                "termination_fraction must be in (0, 1), got {}",
                self.termination_fraction
            ));
        }
        self.refine.validate()
    }
}

pub fn should_terminate(alpha: &AlphaPlane, config: &PipelineConfig) -> bool {
    let above = alpha.count_above(config.termination_alpha) as f64;
    above / (alpha.dims().len() as f64) < config.termination_fraction
}

pub fn mask_for_inpainting(alpha: &AlphaPlane, config: &PipelineConfig) -> Mask {
    alpha.threshold(config.termination_alpha).dilate(config.inpaint_dilation)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TerminationReason {
    MaxIterations,
    EmptyMatte,
}

/// Intermediate products of one iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub raw_alpha: AlphaPlane,
    pub refined_alpha: AlphaPlane,
    pub mask: Mask,
    /// Backdrop straight from the inpainting backend.
    pub inpainted: RasterImage,
    /// Backdrop after background refinement, with every pixel the final
    /// matte leaves at zero restored from the iteration's input.
    pub backdrop: RasterImage,
    pub layer: Layer,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct DecompositionTrace {
    pub iterations: Vec<IterationRecord>,
    pub termination: Option<TerminationReason>,
}

#[derive(Debug, Error)]
#[error("iteration {iteration}: {source}")]
pub struct PipelineError {
    /// 1-based iteration that failed.
    pub iteration: usize,
    #[source]
    pub source: BackendError,
    pub trace: DecompositionTrace,
}

#[derive(Debug, Clone)]
pub struct Decomposition {
    pub sequence: LayerSequence,
    pub trace: DecompositionTrace,
}

/// Peels `image` into a back-to-front layer sequence.
///
/// Completion runs on the dilated matte so the inpainter never sees soft
/// edge pixels as boundary data, but wherever the final matte is zero the
/// backdrop keeps the input pixel, so those pixels recomposite exactly.
/// Foreground refinement never grows a matte into pixels that an earlier
/// iteration completed.
///
/// The returned sequence has at most `max_iterations + 1` layers; the final
/// backdrop becomes the opaque layer 0.
pub fn decompose(
    image: &RasterImage,
    config: &PipelineConfig,
    mut matting: impl MattingBackend,
    mut inpainting: impl InpaintingBackend,
) -> Result<Decomposition, PipelineError> {
    let mut trace = DecompositionTrace::default();
    let mut current = image.clone();
    let mut synthesized = Mask::empty(image.dims());
    let mut reason = TerminationReason::MaxIterations;

    for m in 1..=config.max_iterations {
        let step = iterate(image, &current, &synthesized, config, &mut matting, &mut inpainting);
        match step {
            Ok(None) => {
                reason = TerminationReason::EmptyMatte;
                break;
            }
            Ok(Some(record)) => {
                current = record.backdrop.clone();
                synthesized = synthesized.union(&record.refined_alpha.threshold(0.0));
                trace.iterations.push(record);
            }
            Err(source) => {
                return Err(PipelineError {
                    iteration: m,
                    source,
                    trace,
                })
            }
        }
    }
    trace.termination = Some(reason);

    let mut layers = vec![Layer::opaque(&current)];
    layers.extend(trace.iterations.iter().rev().map(|r| r.layer.clone()));
    let sequence = LayerSequence::new(layers).expect("layers share the input canvas");
    Ok(Decomposition { sequence, trace })
}

fn iterate(
    original: &RasterImage,
    current: &RasterImage,
    synthesized: &Mask,
    config: &PipelineConfig,
    matting: &mut impl MattingBackend,
    inpainting: &mut impl InpaintingBackend,
) -> Result<Option<IterationRecord>, BackendError> {
    let raw_alpha = matting.matte(current)?;
    check_matting(current, &raw_alpha)?;
    if should_terminate(&raw_alpha, config) {
        return Ok(None);
    }

    let mut mask = mask_for_inpainting(&raw_alpha, config);
    let (mut inpainted, mut backdrop) = complete(current, &mask, config, inpainting)?;

    let mut refined_alpha = raw_alpha.clone();
    if config.refine_foreground {
        let match_on = match config.refine.palette_source {
            PaletteSource::Current => current,
            PaletteSource::Original => original,
        };
        refined_alpha = refine_foreground_matching(
            current,
            &raw_alpha,
            &backdrop,
            match_on,
            Some(synthesized),
            &config.refine,
        )?;
        let grown = mask.union(&mask_for_inpainting(&refined_alpha, config));
        if grown != mask {
            mask = grown;
            (inpainted, backdrop) = complete(current, &mask, config, inpainting)?;
        }
    }

    for (i, px) in backdrop.pixels_mut().iter_mut().enumerate() {
        if refined_alpha.values()[i] == 0.0 {
            *px = current.pixels()[i];
        }
    }
    let color = unblend(current, &backdrop, &refined_alpha)?;
    let layer = Layer::from_parts(&color, &refined_alpha)?;
    Ok(Some(IterationRecord {
        raw_alpha,
        refined_alpha,
        mask,
        inpainted,
        backdrop,
        layer,
    }))
}

fn complete(
    current: &RasterImage,
    mask: &Mask,
    config: &PipelineConfig,
    inpainting: &mut impl InpaintingBackend,
) -> Result<(RasterImage, RasterImage), BackendError> {
    let inpainted = inpainting.inpaint(current, mask)?;
    check_inpainting(current, mask, &inpainted)?;
    let backdrop = if config.refine_background {
        refine_background(&inpainted, mask, &config.refine)?
    } else {
        inpainted.clone()
    };
    Ok((inpainted, backdrop))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backends::{HarmonicInpainting, NoInpainting, OracleSource};
    use crate::raster::Dims;

    struct Blank;

    impl MattingBackend for Blank {
        fn matte(&mut self, image: &RasterImage) -> Result<AlphaPlane, BackendError> {
            Ok(AlphaPlane::zeros(image.dims()))
        }

        fn name(&self) -> String {
            "blank".into()
        }
    }

    struct Broken;

    impl InpaintingBackend for Broken {
        fn inpaint(&mut self, _: &RasterImage, _: &Mask) -> Result<RasterImage, BackendError> {
            Err(BackendError::MalformedOutput("broken".into()))
        }

        fn name(&self) -> String {
            "broken".into()
        }
    }

    fn stacked() -> LayerSequence {
        let dims = Dims::new(40, 40);
        let bg = Layer::opaque(&RasterImage::filled(dims, [0.95, 0.95, 0.95]));
        let sq = |x0: usize, s: usize, c: [f32; 3]| {
            Layer::from_fn(dims, move |x, y| {
                let inside = (x0..x0 + s).contains(&x) && (x0..x0 + s).contains(&y);
                [c[0], c[1], c[2], if inside { 1.0 } else { 0.0 }]
            })
        };
        LayerSequence::new(vec![
            bg,
            sq(4, 16, [0.8, 0.1, 0.1]),
            sq(12, 16, [0.1, 0.6, 0.1]),
            sq(20, 16, [0.1, 0.1, 0.8]),
        ])
        .unwrap()
    }

    #[test]
    fn termination_is_strict() {
        let dims = Dims::new(100, 100);
        let cfg = PipelineConfig::default();
        assert!(should_terminate(&AlphaPlane::zeros(dims), &cfg));
        assert!(!should_terminate(&AlphaPlane::filled(dims, 1.0), &cfg));
        let need = (cfg.termination_fraction * dims.len() as f64).ceil() as usize;
        let at = AlphaPlane::from_fn(dims, |x, y| if y * 100 + x < need { 1.0 } else { 0.0 });
        assert!(!should_terminate(&at, &cfg));
        let below = AlphaPlane::from_fn(dims, |x, y| if y * 100 + x < need - 1 { 1.0 } else { 0.0 });
        assert!(should_terminate(&below, &cfg));
    }

    #[test]
    fn mask_is_dilated_threshold() {
        let dims = Dims::new(10, 10);
        let cfg = PipelineConfig::default();
        assert!(mask_for_inpainting(&AlphaPlane::zeros(dims), &cfg).is_empty());
        let mut a = AlphaPlane::zeros(dims);
        a.set(5, 5, 0.9);
        assert_eq!(mask_for_inpainting(&a, &cfg).count(), 49);
        a = AlphaPlane::zeros(dims);
        a.set(0, 0, 0.9);
        assert_eq!(mask_for_inpainting(&a, &cfg).count(), 16);
    }

    #[test]
    fn empty_matte_returns_input_as_background() {
        let img = stacked().composite();
        let out = decompose(&img, &PipelineConfig::default(), Blank, NoInpainting).unwrap();
        assert_eq!(out.sequence.len(), 1);
        assert_eq!(out.sequence.layers()[0].color(), img);
        assert_eq!(out.trace.termination, Some(TerminationReason::EmptyMatte));
        assert!(out.trace.iterations.is_empty());
    }

    #[test]
    fn oracle_run_reconstructs_stacked_squares() {
        let truth = stacked();
        let img = truth.composite();
        let out = decompose(
            &img,
            &PipelineConfig::default(),
            OracleSource::new(&truth),
            HarmonicInpainting::default(),
        )
        .unwrap();
        assert_eq!(out.sequence.len(), 4);
        assert!(out.sequence.composite().max_pixel_l1(&img).unwrap() <= 0.02);
    }

    #[test]
    fn iteration_cap_leaves_remainder_in_background() {
        let truth = stacked();
        let img = truth.composite();
        let cfg = PipelineConfig {
            max_iterations: 1,
            ..Default::default()
        };
        let out = decompose(&img, &cfg, OracleSource::new(&truth), HarmonicInpainting::default()).unwrap();
        assert_eq!(out.sequence.len(), 2);
        assert_eq!(out.trace.termination, Some(TerminationReason::MaxIterations));
    }

    #[test]
    fn backend_failure_keeps_partial_trace() {
        let truth = stacked();
        let img = truth.composite();
        let err = decompose(&img, &PipelineConfig::default(), OracleSource::new(&truth), Broken).unwrap_err();
        assert_eq!(err.iteration, 1);
        assert!(err.trace.iterations.is_empty());
    }
}
