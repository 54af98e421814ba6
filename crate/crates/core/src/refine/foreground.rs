use crate::color::{srgb_to_lab, LabColor};
use crate::error::RasterError;
use crate::raster::{unblend, AlphaPlane, Mask, RasterImage, UNBLEND_EPSILON};

use super::{connected_components, extract_palette, flatness, mask_components, RefineConfig};

const CORE_CUT: f32 = 0.5;

/// Least-squares alpha for `x ≈ α·f + (1−α)·b` over the three channels.
///
/// `None` when `f` and `b` coincide and the system is degenerate.
pub fn boundary_alpha(x: [f32; 3], f: [f32; 3], b: [f32; 3]) -> Option<f32> {
    let mut num = 0.0f64;
    let mut den = 0.0f64;
    for c in 0..3 {
        let fb = f[c] as f64 - b[c] as f64;
        num += (x[c] as f64 - b[c] as f64) * fb;
        den += fb * fb;
    }
    if den < 1e-10 {
        return None;
    }
    Some((num / den).clamp(0.0, 1.0) as f32)
}

/// Regrows a matte from palette-matched regions of `image`.
///
/// See [`refine_foreground_matching`]; this variant searches `image` itself.
pub fn refine_foreground(
    image: &RasterImage,
    alpha: &AlphaPlane,
    backdrop: &RasterImage,
    config: &RefineConfig,
) -> Result<AlphaPlane, RasterError> {
    refine_foreground_matching(image, alpha, backdrop, image, None, config)
}

/// Regrows a matte from palette-matched regions of `match_on`.
///
/// For every connected region of `alpha > 0` whose unblended colors are
/// flat, a palette is extracted from the region's opaque core and the
/// palette-matched pixels of `match_on` are split into 4-connected
/// components. Components overlapping the current matte (`alpha > 0.5`) by
/// at least `overlap_threshold` of their area, and touching this region,
/// form the new mask. Mask pixels the matte had missed become opaque, and
/// fully transparent pixels bordering the mask take the least-squares
/// mixing alpha between their palette color and the backdrop, provided the
/// mix reproduces the observed color within the match radius.
///
/// The matte is never lowered: pixels the palette does not explain keep
/// their original value. Pixels in `synthesized` (content made up by an
/// earlier completion rather than observed) never match and are never
/// softened.
pub fn refine_foreground_matching(
    image: &RasterImage,
    alpha: &AlphaPlane,
    backdrop: &RasterImage,
    match_on: &RasterImage,
    synthesized: Option<&Mask>,
    config: &RefineConfig,
) -> Result<AlphaPlane, RasterError> {
    let dims = image.dims();
    dims.ensure_same(alpha.dims())?;
    dims.ensure_same(backdrop.dims())?;
    dims.ensure_same(match_on.dims())?;
    if let Some(m) = synthesized {
        dims.ensure_same(m.dims())?;
    }
    let observed = |i: usize| synthesized.is_none_or(|m| !m.at(i));

    let fg = unblend(image, backdrop, alpha)?;
    let core_all = alpha.threshold(CORE_CUT);
    let a = alpha.values();
    let mut out = alpha.clone();
    let mut match_lab: Option<Vec<LabColor>> = None;

    for region in connected_components(alpha, 0.0) {
        let core_pixels: Vec<usize> = region
            .pixels
            .iter()
            .copied()
            .filter(|&i| a[i] > CORE_CUT)
            .collect();
        if core_pixels.is_empty() {
            continue;
        }
        let core = Mask::from_indices(dims, core_pixels.iter().copied());
        if flatness(&fg, &core, config) < config.flatness_threshold {
            continue;
        }
        let colors: Vec<[f32; 3]> = core_pixels.iter().map(|&i| fg.pixels()[i]).collect();
        let palette = extract_palette(&colors, config.fg_max_colors, config);
        if palette.is_empty() {
            continue;
        }

        let labs = match_lab
            .get_or_insert_with(|| match_on.pixels().iter().map(|&p| srgb_to_lab(p)).collect());
        let assigned: Vec<Option<usize>> = labs
            .iter()
            .enumerate()
            .map(|(i, lab)| {
                let (k, d) = palette.nearest(lab);
                (d <= config.palette_match_radius && observed(i)).then_some(k)
            })
            .collect();
        let matched = Mask::new(dims, assigned.iter().map(Option::is_some).collect())?;

        let mut new_mask = Mask::empty(dims);
        let mut any = false;
        for comp in mask_components(&matched) {
            let touches = comp.pixels.iter().any(|&i| core.at(i));
            if !touches {
                continue;
            }
            let overlap = comp.pixels.iter().filter(|&&i| core_all.at(i)).count();
            if (overlap as f64) < config.overlap_threshold * comp.area() as f64 {
                continue;
            }
            any = true;
            for &i in &comp.pixels {
                new_mask.set_at(i, true);
            }
        }
        if !any {
            continue;
        }

        let values = out.values_mut();
        for i in new_mask.indices() {
            if a[i] <= CORE_CUT {
                values[i] = 1.0;
            }
        }

        let entries = palette.entries();
        for i in 0..dims.len() {
            if new_mask.at(i) || a[i] != 0.0 || !observed(i) {
                continue;
            }
            let x = image.pixels()[i];
            let b = backdrop.pixels()[i];
            if srgb_to_lab(x).delta_e(&srgb_to_lab(b)) <= config.palette_match_radius {
                continue;
            }
            let mut best: Option<(f32, f64)> = None;
            for n in dims.neighbors8(i) {
                let Some(k) = assigned[n].filter(|_| new_mask.at(n)) else {
                    continue;
                };
                let f = entries[k].rgb;
                let Some(alpha_ls) = boundary_alpha(x, f, b) else {
                    continue;
                };
                let mix: [f32; 3] =
                    std::array::from_fn(|c| alpha_ls * f[c] + (1.0 - alpha_ls) * b[c]);
                let residual = srgb_to_lab(mix).delta_e(&srgb_to_lab(x));
                if best.is_none_or(|(_, r)| residual < r) {
                    best = Some((alpha_ls, residual));
                }
            }
            if let Some((alpha_ls, residual)) = best {
                if residual <= config.soften_residual && alpha_ls >= UNBLEND_EPSILON {
                    values[i] = values[i].max(alpha_ls);
                }
            }
        }
    }
    Ok(out)
}
