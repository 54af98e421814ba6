use crate::color::srgb_to_lab;
use crate::error::RasterError;
use crate::raster::{Mask, RasterImage};

use super::{extract_palette, flatness, mask_components, RefineConfig};

/// Snaps completed pixels to the surround's palette wherever the surround
/// is flat paint.
///
/// Each connected region of `mask` is judged by a ring of `ring_width`
/// pixels around it (masked pixels excluded). Pixels outside the mask are
/// returned bit-exact.
pub fn refine_background(
    completed: &RasterImage,
    mask: &Mask,
    config: &RefineConfig,
) -> Result<RasterImage, RasterError> {
    completed.dims().ensure_same(mask.dims())?;
    let dims = completed.dims();
    let mut out = completed.clone();
    for region in mask_components(mask) {
        let region_mask = region.to_mask(dims);
        let mut ring = region_mask.dilate(config.ring_width);
        for i in mask.indices() {
            ring.set_at(i, false);
        }
        if ring.is_empty() || flatness(completed, &ring, config) < config.flatness_threshold {
            continue;
        }
        let ring_colors: Vec<[f32; 3]> = ring.indices().map(|i| completed.pixels()[i]).collect();
        let palette = extract_palette(&ring_colors, config.bg_max_colors, config);
        if palette.is_empty() {
            continue;
        }
        let entries = palette.entries();
        let px = out.pixels_mut();
        for &i in &region.pixels {
            let (k, _) = palette.nearest(&srgb_to_lab(px[i]));
            px[i] = entries[k].rgb;
        }
    }
    Ok(out)
}
