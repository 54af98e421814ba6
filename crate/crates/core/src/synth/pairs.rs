use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::backends::InpaintingBackend;
use crate::error::{LoadError, SynthError};
use crate::io::{write_gray_png, write_rgb_png};
use crate::metrics::{merge_members, visibility_groups, OcclusionRule};
use crate::raster::{AlphaPlane, LayerSequence, Mask, RasterImage};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairProvenance {
    Clean,
    /// The previous top layer was erased by the inpainting backend.
    InpaintedInput,
}

/// One matting training example: an image and the alpha of what is on top.
#[derive(Debug, Clone, PartialEq)]
pub struct MattingPair {
    pub input: RasterImage,
    pub target: AlphaPlane,
    /// Which peeling step the target belongs to, 0 = frontmost group.
    pub iteration: usize,
    pub provenance: PairProvenance,
}

/// Builds matting pairs by peeling `seq` one visibility group at a time.
///
/// Clean pair `k` shows the composite of everything behind the first `k`
/// groups and targets group `k`. With an inpainting backend, each step
/// also yields a pair whose input has group `k` erased by completion and
/// whose target is the next group (all zero when only the background is
/// left). Pixels where group `k` lies over another foreground layer are
/// left as they are, not completed.
pub fn make_matting_pairs(
    seq: &LayerSequence,
    mut inpainting: Option<&mut dyn InpaintingBackend>,
) -> Result<Vec<MattingPair>, SynthError> {
    let dims = seq.dims();
    let groups = visibility_groups(seq, OcclusionRule::default());
    let front_first: Vec<&Vec<usize>> = groups.iter().skip(1).rev().collect();
    let targets: Vec<AlphaPlane> = front_first
        .iter()
        .map(|members| merge_members(seq, members).alpha())
        .collect();

    let mut pairs = Vec::new();
    let mut remaining: Vec<usize> = (0..seq.len()).collect();
    for (k, members) in front_first.iter().enumerate() {
        let rest = LayerSequence::new(remaining.iter().map(|&i| seq.layers()[i].clone()).collect())?;
        let input = rest.composite();
        pairs.push(MattingPair {
            input: input.clone(),
            target: targets[k].clone(),
            iteration: k,
            provenance: PairProvenance::Clean,
        });
        remaining.retain(|i| !members.contains(i));

        if let Some(backend) = inpainting.as_deref_mut() {
            let behind: Vec<usize> = remaining.iter().copied().filter(|&i| i != 0).collect();
            let top = targets[k].threshold(0.5).dilate(3);
            let mask = Mask::from_fn(dims, |x, y| {
                top.get(x, y) && behind.iter().all(|&i| seq.layers()[i].get(x, y)[3] == 0.0)
            });
            if mask.is_empty() {
                continue;
            }
            let completed = backend.inpaint(&input, &mask)?;
            pairs.push(MattingPair {
                input: completed,
                target: targets.get(k + 1).cloned().unwrap_or_else(|| AlphaPlane::zeros(dims)),
                iteration: k + 1,
                provenance: PairProvenance::InpaintedInput,
            });
        }
    }
    Ok(pairs)
}

#[derive(Serialize)]
struct PairMeta {
    iteration: usize,
    provenance: PairProvenance,
}

/// Writes `pair_<n>_input.png`, `pair_<n>_alpha.png` and `pair_<n>.json` into `dir`.
pub fn write_pairs(pairs: &[MattingPair], dir: &Path) -> Result<(), LoadError> {
    std::fs::create_dir_all(dir).map_err(|e| LoadError::io(dir, e))?;
    for (n, pair) in pairs.iter().enumerate() {
        write_rgb_png(&pair.input, &dir.join(format!("pair_{n}_input.png")))?;
        write_gray_png(&pair.target, &dir.join(format!("pair_{n}_alpha.png")))?;
        let meta = PairMeta {
            iteration: pair.iteration,
            provenance: pair.provenance,
        };
        let path = dir.join(format!("pair_{n}.json"));
        let mut text = serde_json::to_string_pretty(&meta).expect("pair metadata serializes");
        text.push('\n');
        std::fs::write(&path, text).map_err(|e| LoadError::io(&path, e))?;
    }
    Ok(())
}
