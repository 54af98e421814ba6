//! Greedy merge edits between two aligned layer sequences.

use serde::{Deserialize, Serialize};

use crate::error::RasterError;
use crate::raster::Layer;

use super::distance::{layer_distance, DistanceConfig};
use super::dtw::{dtw_align, AlignmentPairs};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Pred,
    Gt,
}

/// A profitable merge of layers `index` and `index + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MergeCandidate {
    pub index: usize,
    /// Change in the local distance sum; always negative.
    pub gain: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edit {
    pub side: Side,
    /// Lower of the two merged layers, in the sequence as it was before the edit.
    pub index: usize,
    /// Decrease of the local distance sum that made this merge a candidate.
    pub gain: f64,
    /// Mean alignment distance after the edit.
    pub distance_after: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EditLog {
    pub edits: Vec<Edit>,
}

impl EditLog {
    pub fn edits_used(&self) -> usize {
        self.edits.len()
    }

    pub fn used_on(&self, side: Side) -> usize {
        self.edits.iter().filter(|e| e.side == side).count()
    }
}

/// Result of [`merge_edit`]: the edited sequences and their final alignment.
#[derive(Debug, Clone, PartialEq)]
pub struct MergeOutcome {
    pub alignment: AlignmentPairs,
    pub log: EditLog,
    pub pred: Vec<Layer>,
    pub gt: Vec<Layer>,
}

fn merge_at(layers: &[Layer], index: usize) -> Vec<Layer> {
    let mut out = Vec::with_capacity(layers.len() - 1);
    out.extend_from_slice(&layers[..index]);
    out.push(Layer::merge_over(&layers[index], &layers[index + 1]).expect("same canvas"));
    out.extend_from_slice(&layers[index + 2..]);
    out
}

/// Local merge gains on the `ls` side.
///
/// `dist(a, b)` measures a layer of `ls` against a layer of `gts`. For each
/// adjacent pair `(i, i+1)` the current cost of their matched ground truth
/// is compared with the best of two re-assignments after merging: every
/// matched ground-truth layer goes to the merged layer, or the ones matched
/// to `i+1` move on to the layer that was `i+2`.
pub fn find_gains_with<F>(
    ls: &[Layer],
    gts: &[Layer],
    pairs: &[(usize, usize)],
    mut dist: F,
) -> Result<Vec<MergeCandidate>, RasterError>
where
    F: FnMut(&Layer, &Layer) -> Result<f64, RasterError>,
{
    let mut out = Vec::new();
    for i in 0..ls.len().saturating_sub(1) {
        let merged = Layer::merge_over(&ls[i], &ls[i + 1])?;
        let carry = ls.get(i + 2);
        let lower: Vec<&Layer> = pairs.iter().filter(|p| p.0 == i).map(|p| &gts[p.1]).collect();
        let upper: Vec<&Layer> = pairs.iter().filter(|p| p.0 == i + 1).map(|p| &gts[p.1]).collect();

        let mut sum = |layer: &Layer, group: &[&Layer]| -> Result<f64, RasterError> {
            group.iter().map(|g| dist(layer, g)).sum()
        };
        let current = sum(&ls[i], &lower)? + sum(&ls[i + 1], &upper)?;
        let merged_lower = sum(&merged, &lower)?;
        let mut best = merged_lower + sum(&merged, &upper)?;
        if let Some(carry) = carry {
            best = best.min(merged_lower + sum(carry, &upper)?);
        }
        if best < current {
            out.push(MergeCandidate {
                index: i,
                gain: best - current,
            });
        }
    }
    Ok(out)
}

/// Merge candidates on the prediction side.
pub fn find_gains(
    pred: &[Layer],
    gt: &[Layer],
    pairs: &[(usize, usize)],
    config: &DistanceConfig,
) -> Result<Vec<MergeCandidate>, RasterError> {
    find_gains_with(pred, gt, pairs, |p, g| layer_distance(p, g, config))
}

/// Every accepted state of the greedy search, starting with the unedited one.
#[derive(Debug, Clone)]
pub struct EditHistory {
    pub states: Vec<MergeOutcome>,
}

/// Runs the greedy merge search and keeps every intermediate state.
///
/// Each round realigns both sequences, collects merge candidates on both
/// sides (a side is only merged while it has more than two layers) and
/// applies the candidate with the largest gain whose realignment strictly
/// lowers the mean distance, trying candidates in gain order. The search
/// stops at `emax` edits or when no candidate helps.
pub fn merge_edit_history(
    pred: &[Layer],
    gt: &[Layer],
    emax: usize,
    config: &DistanceConfig,
) -> Result<EditHistory, RasterError> {
    let mut ls = pred.to_vec();
    let mut gts = gt.to_vec();
    let mut alignment = dtw_align(&ls, &gts, config)?;
    let mut log = EditLog::default();
    let mut states = vec![MergeOutcome {
        alignment: alignment.clone(),
        log: log.clone(),
        pred: ls.clone(),
        gt: gts.clone(),
    }];

    while log.edits_used() < emax {
        let mut candidates: Vec<(Side, MergeCandidate)> = Vec::new();
        if ls.len() > 2 {
            candidates.extend(
                find_gains(&ls, &gts, &alignment.pairs, config)?
                    .into_iter()
                    .map(|c| (Side::Pred, c)),
            );
        }
        if gts.len() > 2 {
            let swapped: Vec<(usize, usize)> = alignment.pairs.iter().map(|&(p, g)| (g, p)).collect();
            candidates.extend(
                find_gains_with(&gts, &ls, &swapped, |g, p| layer_distance(p, g, config))?
                    .into_iter()
                    .map(|c| (Side::Gt, c)),
            );
        }
        // most negative gain first; stable sort keeps pred before gt and low indices first
        candidates.sort_by(|a, b| a.1.gain.total_cmp(&b.1.gain));

        let mut accepted = None;
        for (side, cand) in candidates {
            let (next_ls, next_gts) = match side {
                Side::Pred => (merge_at(&ls, cand.index), gts.clone()),
                Side::Gt => (ls.clone(), merge_at(&gts, cand.index)),
            };
            let next = dtw_align(&next_ls, &next_gts, config)?;
            if next.mean < alignment.mean {
                accepted = Some((side, cand, next_ls, next_gts, next));
                break;
            }
        }
        let Some((side, cand, next_ls, next_gts, next)) = accepted else {
            break;
        };
        log.edits.push(Edit {
            side,
            index: cand.index,
            gain: -cand.gain,
            distance_after: next.mean,
        });
        ls = next_ls;
        gts = next_gts;
        alignment = next;
        states.push(MergeOutcome {
            alignment: alignment.clone(),
            log: log.clone(),
            pred: ls.clone(),
            gt: gts.clone(),
        });
    }
    Ok(EditHistory { states })
}

/// Greedy merge edits with at most `emax` merges.
pub fn merge_edit(
    pred: &[Layer],
    gt: &[Layer],
    emax: usize,
    config: &DistanceConfig,
) -> Result<MergeOutcome, RasterError> {
    let mut history = merge_edit_history(pred, gt, emax, config)?;
    Ok(history.states.pop().expect("history starts with the unedited state"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::{Dims, RasterImage};

    fn region(dims: Dims, f: impl Fn(usize, usize) -> bool, color: [f32; 3]) -> Layer {
        Layer::from_fn(dims, |x, y| [color[0], color[1], color[2], if f(x, y) { 1.0 } else { 0.0 }])
    }

    const WHITE: [f32; 3] = [1.0; 3];
    const RED: [f32; 3] = [0.9, 0.1, 0.1];

    #[test]
    fn identical_sequences_have_no_candidates() {
        let dims = Dims::new(12, 12);
        let seq = vec![
            Layer::opaque(&RasterImage::filled(dims, WHITE)),
            region(dims, |x, _| x < 4, RED),
            region(dims, |_, y| y > 8, [0.1, 0.1, 0.9]),
        ];
        let pairs: Vec<(usize, usize)> = (0..3).map(|i| (i, i)).collect();
        let cfg = DistanceConfig::default();
        assert!(find_gains(&seq, &seq, &pairs, &cfg).unwrap().is_empty());
    }

    #[test]
    fn split_layer_is_a_candidate() {
        let dims = Dims::new(12, 12);
        let bg = Layer::opaque(&RasterImage::filled(dims, WHITE));
        let whole = region(dims, |x, y| (2..10).contains(&x) && (2..10).contains(&y), RED);
        let left = region(dims, |x, y| (2..6).contains(&x) && (2..10).contains(&y), RED);
        let right = region(dims, |x, y| (6..10).contains(&x) && (2..10).contains(&y), RED);
        let pred = vec![bg.clone(), left.clone(), right.clone()];
        let gt = vec![bg, whole.clone()];
        let cfg = DistanceConfig::default();
        let pairs = dtw_align(&pred, &gt, &cfg).unwrap().pairs;
        let cands = find_gains(&pred, &gt, &pairs, &cfg).unwrap();
        let at1 = cands.iter().find(|c| c.index == 1).expect("candidate at the split");
        // recompute directly: both halves matched to `whole` before, merged after
        let d = |a: &Layer| layer_distance(a, &whole, &cfg).unwrap();
        let lower_n = pairs.iter().filter(|p| p.0 == 1).count() as f64;
        let upper_n = pairs.iter().filter(|p| p.0 == 2).count() as f64;
        let merged = Layer::merge_over(&left, &right).unwrap();
        let expected = (lower_n + upper_n) * d(&merged) - (lower_n * d(&left) + upper_n * d(&right));
        assert!(at1.gain < 0.0);
        assert!((at1.gain - expected).abs() < 1e-12);
    }

    #[test]
    fn two_layer_prediction_has_one_slot() {
        let dims = Dims::new(6, 6);
        let a = region(dims, |x, _| x < 3, WHITE);
        let b = region(dims, |x, _| x >= 3, WHITE);
        let gt = vec![Layer::opaque(&RasterImage::filled(dims, WHITE))];
        let cands = find_gains(&[a, b], &gt, &[(0, 0), (1, 0)], &DistanceConfig::default()).unwrap();
        assert!(cands.iter().all(|c| c.index == 0));
        assert!(cands.len() <= 1);
    }

    #[test]
    fn zero_budget_is_plain_alignment() {
        let dims = Dims::new(8, 8);
        let pred = vec![
            region(dims, |x, _| x < 4, WHITE),
            region(dims, |x, _| x >= 4, WHITE),
            region(dims, |x, y| x == y, RED),
        ];
        let gt = vec![Layer::opaque(&RasterImage::filled(dims, WHITE)), region(dims, |x, y| x == y, RED)];
        let cfg = DistanceConfig::default();
        let out = merge_edit(&pred, &gt, 0, &cfg).unwrap();
        assert_eq!(out.log.edits_used(), 0);
        assert_eq!(out.alignment, dtw_align(&pred, &gt, &cfg).unwrap());
    }

    #[test]
    fn over_split_white_background_needs_one_merge() {
        let dims = Dims::new(16, 16);
        let diag = |x: usize, y: usize| (x + y) % 5 == 0 && x > 3;
        let pred = vec![
            region(dims, |x, _| x < 8, WHITE),
            region(dims, |x, _| x >= 8, WHITE),
            region(dims, diag, RED),
        ];
        let gt = vec![Layer::opaque(&RasterImage::filled(dims, WHITE)), region(dims, diag, RED)];
        let out = merge_edit(&pred, &gt, 5, &DistanceConfig::default()).unwrap();
        assert_eq!(out.log.edits_used(), 1);
        assert_eq!(out.log.edits[0].side, Side::Pred);
        assert_eq!(out.pred.len(), 2);
        assert_eq!(out.alignment.mean, 0.0);
    }

    #[test]
    fn length_two_prediction_is_never_merged() {
        let dims = Dims::new(8, 8);
        let pred = vec![region(dims, |x, _| x < 4, WHITE), region(dims, |x, _| x >= 4, WHITE)];
        let gt = vec![Layer::opaque(&RasterImage::filled(dims, WHITE))];
        let out = merge_edit(&pred, &gt, 10, &DistanceConfig::default()).unwrap();
        assert_eq!(out.log.edits_used(), 0);
        assert_eq!(out.pred.len(), 2);
    }
}
