//! Evaluation of a decomposition against ground truth: visibility grouping,
//! DTW layer alignment, greedy merge edits and the matting losses.

mod distance;
mod dtw;
mod edits;
mod grouping;
mod loss;
mod report;

pub use distance::{hard_iou, layer_distance, soft_iou, weighted_rgb_l1, DistanceConfig};
pub use dtw::{accumulated_costs, cost_matrix, dtw_align, dtw_from_costs, AlignmentPairs};
pub use edits::{
    find_gains, find_gains_with, merge_edit, merge_edit_history, Edit, EditHistory, EditLog,
    MergeCandidate, MergeOutcome, Side,
};
pub use grouping::{group_top_layers, visibility_groups, OcclusionRule};
pub use loss::{
    effective_window, gaussian_window, loss_bce, loss_iou, loss_ssim, loss_total, LossConfig,
    BCE_EPSILON,
};
pub use report::{evaluate, pair_mean, EvalConfig, EvalReport, EvalRow, ReportHeader, DISTANCE_NOTE};

pub(crate) use grouping::merge_members;
