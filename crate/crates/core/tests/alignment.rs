use layerpeel::metrics::{
    accumulated_costs, cost_matrix, dtw_align, dtw_from_costs, layer_distance, DistanceConfig,
};
use layerpeel::{Dims, Layer};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Minimum path sum over every monotone path from the first to the last
/// cell, found by exhaustive recursion.
fn brute_force(costs: &[Vec<f64>], i: usize, j: usize) -> f64 {
    let (n, m) = (costs.len(), costs[0].len());
    let here = costs[i][j];
    if i == n - 1 && j == m - 1 {
        return here;
    }
    let mut best = f64::INFINITY;
    if i + 1 < n {
        best = best.min(brute_force(costs, i + 1, j));
    }
    if j + 1 < m {
        best = best.min(brute_force(costs, i, j + 1));
    }
    if i + 1 < n && j + 1 < m {
        best = best.min(brute_force(costs, i + 1, j + 1));
    }
    here + best
}

#[test]
fn dtw_total_is_the_cheapest_monotone_path() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..300 {
        let n = rng.random_range(1..6);
        let m = rng.random_range(1..6);
        let costs: Vec<Vec<f64>> = (0..n).map(|_| (0..m).map(|_| rng.random()).collect()).collect();
        let a = dtw_from_costs(&costs);
        assert!((a.total() - brute_force(&costs, 0, 0)).abs() < 1e-12);
        assert_eq!(a.pairs.first(), Some(&(0, 0)));
        assert_eq!(a.pairs.last(), Some(&(n - 1, m - 1)));
        for w in a.pairs.windows(2) {
            let (di, dj) = (w[1].0 - w[0].0, w[1].1 - w[0].1);
            assert!(di <= 1 && dj <= 1 && di + dj >= 1);
        }
        let acc = accumulated_costs(&costs);
        assert!((acc[n - 1][m - 1] + costs[0][0] - a.total()).abs() < 1e-12);
    }
}

#[test]
fn ties_take_the_diagonal() {
    let a = dtw_from_costs(&[vec![0.0, 0.0], vec![0.0, 0.0]]);
    assert_eq!(a.pairs, vec![(0, 0), (1, 1)]);
}

fn naive_distance(p: &Layer, g: &Layer, cfg: &DistanceConfig) -> f64 {
    let (mut mn, mut mx, mut num, mut den) = (0.0, 0.0, 0.0, 0.0);
    let dims = p.dims();
    for y in 0..dims.height {
        for x in 0..dims.width {
            let (a, b) = (p.get(x, y), g.get(x, y));
            mn += (a[3] as f64).min(b[3] as f64);
            mx += (a[3] as f64).max(b[3] as f64);
            for c in 0..3 {
                num += b[3] as f64 * (a[c] as f64 - b[c] as f64).abs();
            }
            den += 3.0 * b[3] as f64;
        }
    }
    let iou = if mx == 0.0 { 1.0 } else { mn / mx };
    let l1 = if den == 0.0 { 0.0 } else { num / den };
    cfg.alpha_weight * (1.0 - iou) + cfg.color_weight * l1.min(1.0)
}

#[test]
fn layer_distance_matches_pixel_loop() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let dims = Dims::new(12, 10);
    let cfg = DistanceConfig { alpha_weight: 0.3, color_weight: 0.7 };
    let mut layers = Vec::new();
    for k in 0..6 {
        layers.push(Layer::from_fn(dims, |x, y| {
            let a = if k == 0 { 0.0 } else if (x + y + k) % 3 == 0 { 1.0 } else { rng.random::<f32>() * 0.5 };
            [rng.random(), rng.random(), rng.random(), a]
        }));
    }
    let costs = cost_matrix(&layers, &layers, &cfg).unwrap();
    for (i, p) in layers.iter().enumerate() {
        for (j, g) in layers.iter().enumerate() {
            let expected = naive_distance(p, g, &cfg);
            assert!((layer_distance(p, g, &cfg).unwrap() - expected).abs() < 1e-9);
            assert!((costs[i][j] - expected).abs() < 1e-9);
            assert!((0.0..=1.0).contains(&expected));
        }
    }
    assert!(dtw_align(&layers, &[], &cfg).is_err());
}
