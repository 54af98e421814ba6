use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::RasterError;
use crate::raster::{Layer, LayerSequence};

use super::distance::{hard_iou, soft_iou, weighted_rgb_l1, DistanceConfig};
use super::edits::{merge_edit_history, Side};
use super::grouping::{group_top_layers, OcclusionRule};

pub const DISTANCE_NOTE: &str =
    "layer distance = alpha_weight*(1-softIoU) + color_weight*min(1, gt-alpha-weighted RGB L1)";

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EvalConfig {
    pub distance: DistanceConfig,
    pub occlusion: OcclusionRule,
    /// Report IoU of binarized (`> 0.5`) alphas instead of soft IoU.
    pub hard_iou: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportHeader {
    pub distance: DistanceConfig,
    pub occlusion_cut: f32,
    pub iou: String,
    pub normalization: String,
    pub pred_layers: usize,
    pub gt_layers: usize,
    pub pred_groups: usize,
    pub gt_groups: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalRow {
    pub edits_allowed: usize,
    pub edits_used_pred: usize,
    pub edits_used_gt: usize,
    pub rgb_l1: f64,
    pub alpha_soft_iou: f64,
    pub pair_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalReport {
    pub header: ReportHeader,
    pub rows: Vec<EvalRow>,
}

impl EvalReport {
    pub fn row(&self, budget: usize) -> Option<&EvalRow> {
        self.rows.iter().find(|r| r.edits_allowed == budget)
    }

    /// Line-delimited `key=value` text: `#` header lines, then one row per budget.
    pub fn to_text(&self) -> String {
        let h = &self.header;
        let mut s = String::new();
        let _ = writeln!(s, "# {}", h.normalization);
        let _ = writeln!(
            s,
            "# alpha_weight={} color_weight={} occlusion_cut={} iou={}",
            h.distance.alpha_weight, h.distance.color_weight, h.occlusion_cut, h.iou
        );
        let _ = writeln!(
            s,
            "# pred_layers={} gt_layers={} pred_groups={} gt_groups={}",
            h.pred_layers, h.gt_layers, h.pred_groups, h.gt_groups
        );
        for r in &self.rows {
            let _ = writeln!(
                s,
                "edits_allowed={} edits_used_pred={} edits_used_gt={} rgb_l1={:.6} alpha_soft_iou={:.6} pair_count={}",
                r.edits_allowed, r.edits_used_pred, r.edits_used_gt, r.rgb_l1, r.alpha_soft_iou, r.pair_count
            );
        }
        s
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Mean of a per-pair metric over aligned pairs.
pub fn pair_mean(
    pred: &[Layer],
    gt: &[Layer],
    pairs: &[(usize, usize)],
    metric: impl Fn(&Layer, &Layer) -> f64,
) -> f64 {
    let total: f64 = pairs.iter().map(|&(k, q)| metric(&pred[k], &gt[q])).sum();
    total / pairs.len() as f64
}

/// Groups both sequences by visibility and reports RGB L1 and alpha IoU
/// over the aligned pairs for every edit budget `0..=max_edits`.
pub fn evaluate(
    pred: &LayerSequence,
    gt: &LayerSequence,
    max_edits: usize,
    config: &EvalConfig,
) -> Result<EvalReport, RasterError> {
    pred.dims().ensure_same(gt.dims())?;
    let pred_g = group_top_layers(pred, config.occlusion);
    let gt_g = group_top_layers(gt, config.occlusion);
    let history = merge_edit_history(pred_g.layers(), gt_g.layers(), max_edits, &config.distance)?;
    let iou: fn(&Layer, &Layer) -> f64 = if config.hard_iou { hard_iou } else { soft_iou };

    let rows = (0..=max_edits)
        .map(|budget| {
            let state = &history.states[budget.min(history.states.len() - 1)];
            let pairs = &state.alignment.pairs;
            EvalRow {
                edits_allowed: budget,
                edits_used_pred: state.log.used_on(Side::Pred),
                edits_used_gt: state.log.used_on(Side::Gt),
                rgb_l1: pair_mean(&state.pred, &state.gt, pairs, weighted_rgb_l1),
                alpha_soft_iou: pair_mean(&state.pred, &state.gt, pairs, iou),
                pair_count: pairs.len(),
            }
        })
        .collect();

    Ok(EvalReport {
        header: ReportHeader {
            distance: config.distance,
            occlusion_cut: config.occlusion.cut,
            iou: if config.hard_iou { "hard" } else { "soft" }.into(),
            normalization: DISTANCE_NOTE.into(),
            pred_layers: pred.len(),
            gt_layers: gt.len(),
            pred_groups: pred_g.len(),
            gt_groups: gt_g.len(),
        },
        rows,
    })
}
