use serde::{Deserialize, Serialize};

use crate::error::RasterError;
use crate::raster::Layer;

use super::distance::{layer_distance, DistanceConfig};

/// A monotone many-to-many pairing of prediction and ground-truth layers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlignmentPairs {
    /// `(pred_index, gt_index)` from `(0, 0)` to `(K, Q)`.
    pub pairs: Vec<(usize, usize)>,
    /// Cost of each pair, same order as `pairs`.
    pub distances: Vec<f64>,
    /// Mean of `distances`.
    pub mean: f64,
}

impl AlignmentPairs {
    pub fn total(&self) -> f64 {
        self.distances.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Accumulated cost matrix with the first cell left at zero.
pub fn accumulated_costs(costs: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = costs.len();
    let m = costs[0].len();
    let mut acc = vec![vec![0.0; m]; n];
    for i in 1..n {
        acc[i][0] = acc[i - 1][0] + costs[i][0];
    }
    for j in 1..m {
        acc[0][j] = acc[0][j - 1] + costs[0][j];
    }
    for i in 1..n {
        for j in 1..m {
            acc[i][j] = costs[i][j] + acc[i - 1][j].min(acc[i][j - 1]).min(acc[i - 1][j - 1]);
        }
    }
    acc
}

/// DTW over a precomputed cost matrix (`costs[pred][gt]`).
///
/// Backtracking prefers the diagonal step, then a step back in the
/// prediction, then a step back in the ground truth, each on `<=` ties.
///
/// # Panics
/// If the matrix is empty or ragged.
pub fn dtw_from_costs(costs: &[Vec<f64>]) -> AlignmentPairs {
    assert!(!costs.is_empty() && !costs[0].is_empty(), "empty cost matrix");
    let m = costs[0].len();
    assert!(costs.iter().all(|r| r.len() == m), "ragged cost matrix");
    let d = accumulated_costs(costs);

    let (mut i, mut j) = (costs.len() - 1, m - 1);
    let mut pairs = vec![(i, j)];
    loop {
        if i == 0 && j == 0 {
            break;
        } else if i == 0 {
            j -= 1;
        } else if j == 0 {
            i -= 1;
        } else {
            let (diag, up, left) = (d[i - 1][j - 1], d[i - 1][j], d[i][j - 1]);
            if diag <= up && diag <= left {
                i -= 1;
                j -= 1;
            } else if up <= diag && up <= left {
                i -= 1;
            } else {
                j -= 1;
            }
        }
        pairs.push((i, j));
    }
    pairs.reverse();
    let distances: Vec<f64> = pairs.iter().map(|&(i, j)| costs[i][j]).collect();
    let mean = distances.iter().sum::<f64>() / distances.len() as f64;
    AlignmentPairs {
        pairs,
        distances,
        mean,
    }
}

pub fn cost_matrix(
    pred: &[Layer],
    gt: &[Layer],
    config: &DistanceConfig,
) -> Result<Vec<Vec<f64>>, RasterError> {
    pred.iter()
        .map(|p| gt.iter().map(|g| layer_distance(p, g, config)).collect())
        .collect()
}

/// Aligns two (grouped, back-to-front) layer lists.
pub fn dtw_align(
    pred: &[Layer],
    gt: &[Layer],
    config: &DistanceConfig,
) -> Result<AlignmentPairs, RasterError> {
    if pred.is_empty() || gt.is_empty() {
        return Err(RasterError::EmptySequence);
    }
    Ok(dtw_from_costs(&cost_matrix(pred, gt, config)?))
}
