use layerpeel::color::srgb_to_lab;
use layerpeel::metrics::{visibility_groups, OcclusionRule};
use layerpeel::synth::{generate, generate_design, BackgroundKind, DesignSpec, EdgeModel, OverlapMode};
use layerpeel::{Dims, Layer};

fn core_pixels(l: &Layer) -> Vec<(usize, usize)> {
    let d = l.dims();
    (0..d.height)
        .flat_map(|y| (0..d.width).map(move |x| (x, y)))
        .filter(|&(x, y)| l.get(x, y)[3] > 0.5)
        .collect()
}

fn support(l: &Layer) -> Vec<(usize, usize)> {
    let d = l.dims();
    (0..d.height)
        .flat_map(|y| (0..d.width).map(move |x| (x, y)))
        .filter(|&(x, y)| l.get(x, y)[3] > 0.0)
        .collect()
}

fn chebyshev_gap(a: &[(usize, usize)], b: &[(usize, usize)]) -> usize {
    let mut best = usize::MAX;
    for p in a {
        for q in b {
            best = best.min(p.0.abs_diff(q.0).max(p.1.abs_diff(q.1)));
        }
    }
    best
}

fn check(spec: &DesignSpec) {
    let seq = generate_design(spec).unwrap();
    let n = seq.len();
    assert!((spec.layer_count_range.0..=spec.layer_count_range.1).contains(&n));
    assert_eq!(seq.dims(), Dims::new(spec.width, spec.height));
    let layers = seq.layers();
    assert!(layers[0].pixels().iter().all(|p| p[3] == 1.0));
    for (i, li) in layers.iter().enumerate().skip(1) {
        let core = core_pixels(li);
        assert!(core.len() >= 16, "seed {}: layer {i} core {}", spec.seed, core.len());
        let covered = core
            .iter()
            .filter(|&&(x, y)| layers[i + 1..].iter().any(|u| u.get(x, y)[3] > 0.5))
            .count();
        assert!(2 * covered <= core.len(), "seed {}: layer {i} mostly hidden", spec.seed);

        let (cx, cy) = core[0];
        let color = li.get(cx, cy);
        let lab = srgb_to_lab([color[0], color[1], color[2]]);
        if spec.background == BackgroundKind::Flat {
            let b = layers[0].get(0, 0);
            assert!(lab.delta_e(&srgb_to_lab([b[0], b[1], b[2]])) >= 20.0);
        }

        for lj in &layers[i + 1..] {
            let (si, sj) = (support(li), support(lj));
            let shared = core.iter().filter(|&&(x, y)| lj.get(x, y)[3] > 0.5).count();
            let gap = chebyshev_gap(&si, &sj);
            assert!(
                shared >= 4 || gap > 2,
                "seed {}: layers share {shared} core pixels with gap {gap}",
                spec.seed
            );
            if shared > 0 {
                let (qx, qy) = core_pixels(lj)[0];
                let c = lj.get(qx, qy);
                assert!(lab.delta_e(&srgb_to_lab([c[0], c[1], c[2]])) >= 20.0);
            }
        }
    }
}

#[test]
fn generated_designs_respect_placement_rules() {
    for seed in 0..30 {
        for overlap_mode in [OverlapMode::Disjoint, OverlapMode::Stacked, OverlapMode::Mixed] {
            for edge in [EdgeModel::Hard, EdgeModel::Antialiased] {
                check(&DesignSpec { overlap_mode, edge, width: 96, height: 80, ..DesignSpec::default().with_seed(seed) });
            }
        }
    }
}

#[test]
fn disjoint_layers_are_their_own_groups() {
    for seed in 0..10 {
        let spec = DesignSpec { overlap_mode: OverlapMode::Disjoint, layer_count_range: (4, 4), ..DesignSpec::default().with_seed(seed) };
        let seq = generate_design(&spec).unwrap();
        let groups = visibility_groups(&seq, OcclusionRule::default());
        // the background plus every foreground layer in one shared group
        assert_eq!(groups.len(), 2, "seed {seed}");
    }
}

#[test]
fn generation_is_a_pure_function_of_the_spec() {
    for bg in [BackgroundKind::Flat, BackgroundKind::TwoTone, BackgroundKind::LinearGradient] {
        let spec = DesignSpec { background: bg, ..DesignSpec::default().with_seed(99) };
        let a = generate(&spec).unwrap();
        let b = generate(&spec).unwrap();
        assert_eq!(a.sequence, b.sequence);
        assert_eq!(a.names, b.names);
    }
}
