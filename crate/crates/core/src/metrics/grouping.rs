use serde::{Deserialize, Serialize};

use crate::raster::{Layer, LayerSequence, Mask};

/// When one layer counts as covering another.
///
/// Layer `j` occludes a lower layer `k` when some pixel has alpha above
/// `cut` in both. The default cut of 0.5 keeps 8-bit edge noise from
/// chaining unrelated layers together; [`OcclusionRule::strict`] uses any
/// nonzero alpha.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OcclusionRule {
    pub cut: f32,
}

impl Default for OcclusionRule {
    fn default() -> Self {
        Self { cut: 0.5 }
    }
}

impl OcclusionRule {
    pub fn strict() -> Self {
        Self { cut: 0.0 }
    }

    /// `occludes[j][k]`: layer `j` covers layer `k` (only meaningful for `j > k`).
    pub fn occlusion_matrix(&self, seq: &LayerSequence) -> Vec<Vec<bool>> {
        let supports: Vec<Mask> = seq
            .layers()
            .iter()
            .map(|l| l.alpha().threshold(self.cut))
            .collect();
        let n = supports.len();
        let mut m = vec![vec![false; n]; n];
        for j in 1..n {
            for k in 1..j {
                m[j][k] = supports[j].intersects(&supports[k]);
            }
        }
        m
    }
}

/// Layer indices of each visibility group, back to front. Group 0 is always
/// `[0]`, the background.
pub fn visibility_groups(seq: &LayerSequence, rule: OcclusionRule) -> Vec<Vec<usize>> {
    let occ = rule.occlusion_matrix(seq);
    let mut remaining: Vec<usize> = (1..seq.len()).collect();
    let mut front_first = Vec::new();
    while !remaining.is_empty() {
        let top: Vec<usize> = remaining
            .iter()
            .copied()
            .filter(|&k| !remaining.iter().any(|&j| j > k && occ[j][k]))
            .collect();
        remaining.retain(|k| !top.contains(k));
        front_first.push(top);
    }
    let mut groups = vec![vec![0]];
    groups.extend(front_first.into_iter().rev());
    groups
}

/// Collapses mutually non-occluding layers into single top-layers.
///
/// Repeatedly takes every layer not covered by a higher remaining layer,
/// blends that set in z order into one layer, and recurses on the rest.
/// The background stays group 0. The composite is unchanged wherever
/// layers within a group do not overlap.
pub fn group_top_layers(seq: &LayerSequence, rule: OcclusionRule) -> LayerSequence {
    let groups = visibility_groups(seq, rule);
    let layers = groups
        .iter()
        .map(|members| merge_members(seq, members))
        .collect();
    LayerSequence::new(layers).expect("groups share the canvas")
}

pub(crate) fn merge_members(seq: &LayerSequence, members: &[usize]) -> Layer {
    let layers = seq.layers();
    let mut acc = layers[members[0]].clone();
    for &k in &members[1..] {
        acc = Layer::merge_over(&acc, &layers[k]).expect("same canvas");
    }
    acc
}
