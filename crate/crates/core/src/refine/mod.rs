//! Palette-based refinement of completed backgrounds and extracted mattes,
//! plus the primitives they share.
//!
//! Both refinements only act on regions that look like flat paint: a region
//! (or its surround) must have at least `flatness_threshold` of its pixels
//! with near-zero color gradient. Anything textured passes through
//! untouched.

mod background;
mod components;
mod foreground;
mod palette;

use serde::{Deserialize, Serialize};

use crate::raster::{Mask, RasterImage};

pub use background::refine_background;
pub use components::{connected_components, mask_components, ConnectedRegion};
pub use foreground::{boundary_alpha, refine_foreground, refine_foreground_matching};
pub use palette::{extract_palette, Palette, PaletteEntry};

/// Which image foreground refinement searches for palette-matched pixels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PaletteSource {
    /// The image the current iteration is decomposing.
    #[default]
    Current,
    /// The original, unmodified input.
    Original,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefineConfig {
    pub fg_max_colors: usize,
    pub bg_max_colors: usize,
    /// Minimum fraction of zero-gradient pixels for a region to count as flat.
    pub flatness_threshold: f64,
    /// Largest per-channel difference still treated as zero gradient.
    pub gradient_epsilon: f32,
    pub overlap_threshold: f64,
    pub ring_width: usize,
    /// ΔE (CIE76) within which a pixel matches a palette color.
    pub palette_match_radius: f64,
    /// Largest ΔE between a pixel and its fitted foreground/backdrop mix for
    /// an edge pixel to receive fractional alpha.
    pub soften_residual: f64,
    pub percentile_coverage: f64,
    pub palette_source: PaletteSource,
}

impl Default for RefineConfig {
    fn default() -> Self {
        Self {
            fg_max_colors: 10,
            bg_max_colors: 2,
            flatness_threshold: 0.6,
            gradient_epsilon: 2.0 / 255.0,
            overlap_threshold: 0.8,
            ring_width: 5,
            palette_match_radius: 5.0,
            soften_residual: 1.5,
            percentile_coverage: 0.95,
            palette_source: PaletteSource::Current,
        }
    }
}

impl RefineConfig {
    pub fn validate(&self) -> Result<(), String> {
        let fractions = [
            ("flatness_threshold", self.flatness_threshold),
            ("overlap_threshold", self.overlap_threshold),
            ("percentile_coverage", self.percentile_coverage),
        ];
        for (name, v) in fractions {
            if !(v > 0.0 && v <= 1.0) {
                return Err(format!("{name} must be in (0, 1], got {v}"));
            }
        }
        if self.ring_width < 1 {
            return Err("ring_width must be at least 1".into());
        }
        if self.fg_max_colors < 1 || self.bg_max_colors < 1 {
            return Err("palette sizes must be at least 1".into());
        }
        if !(self.gradient_epsilon >= 0.0) || !(self.palette_match_radius > 0.0) {
            return Err("gradient_epsilon must be >= 0 and palette_match_radius > 0".into());
        }
        if !(self.soften_residual >= 0.0) {
            return Err("soften_residual must be >= 0".into());
        }
        Ok(())
    }
}

/// Fraction of `region` pixels whose color gradient is within
/// `gradient_epsilon` on every channel.
///
/// Along each axis the forward difference is used when the next pixel is in
/// the region, otherwise the backward one; a pixel with no neighbor in the
/// region along an axis has zero gradient on that axis. An empty region has
/// flatness 0.
pub fn flatness(image: &RasterImage, region: &Mask, config: &RefineConfig) -> f64 {
    let dims = image.dims();
    let px = image.pixels();
    let eps = config.gradient_epsilon;
    let mut total = 0usize;
    let mut flat = 0usize;
    let max_diff = |a: usize, b: usize| -> f32 {
        (0..3).map(|c| (px[a][c] - px[b][c]).abs()).fold(0.0, f32::max)
    };
    for i in region.indices() {
        total += 1;
        let (x, y) = dims.coords(i);
        let mut grad = 0.0f32;
        if x + 1 < dims.width && region.at(i + 1) {
            grad = grad.max(max_diff(i, i + 1));
        } else if x > 0 && region.at(i - 1) {
            grad = grad.max(max_diff(i, i - 1));
        }
        if y + 1 < dims.height && region.at(i + dims.width) {
            grad = grad.max(max_diff(i, i + dims.width));
        } else if y > 0 && region.at(i - dims.width) {
            grad = grad.max(max_diff(i, i - dims.width));
        }
        if grad <= eps {
            flat += 1;
        }
    }
    if total == 0 {
        0.0
    } else {
        flat as f64 / total as f64
    }
}
