use layerpeel::backends::{harmonic_inpaint, HarmonicConfig};
use layerpeel::refine::{refine_background, RefineConfig};
use layerpeel::{Dims, Mask, RasterImage};

const LEFT: [f32; 3] = [0.8, 0.1, 0.2];
const RIGHT: [f32; 3] = [0.15, 0.5, 0.9];

#[test]
fn seam_hole_snaps_each_side_to_its_color() {
    let dims = Dims::new(48, 40);
    let truth = RasterImage::from_fn(dims, |x, _| if x < 24 { LEFT } else { RIGHT });
    let mask = Mask::from_fn(dims, |x, y| x.abs_diff(24) < 8 && y.abs_diff(20) < 8);
    let fill = harmonic_inpaint(&truth, &mask, &HarmonicConfig::default()).unwrap();
    let blurred = mask.indices().filter(|&i| fill.pixels()[i] != truth.pixels()[i]).count();
    assert!(blurred > 0);

    let refined = refine_background(&fill, &mask, &RefineConfig::default()).unwrap();
    let far_from_seam_wrong = mask
        .indices()
        .filter(|&i| {
            let x = dims.coords(i).0;
            !(22..=25).contains(&x) && refined.pixels()[i] != truth.pixels()[i]
        })
        .count();
    assert_eq!(far_from_seam_wrong, 0);
    for i in 0..dims.len() {
        if !mask.at(i) {
            assert_eq!(refined.pixels()[i], fill.pixels()[i]);
        }
        assert!(refined.pixels()[i] == LEFT || refined.pixels()[i] == RIGHT);
    }
}

#[test]
fn textured_surround_is_left_alone() {
    let dims = Dims::new(32, 32);
    let image = RasterImage::from_fn(dims, |x, y| {
        let v = ((x * 37 + y * 91) % 53) as f32 / 52.0;
        [v, 1.0 - v, 0.5]
    });
    let mask = Mask::from_fn(dims, |x, y| x.abs_diff(16) < 5 && y.abs_diff(16) < 5);
    let fill = harmonic_inpaint(&image, &mask, &HarmonicConfig::default()).unwrap();
    let refined = refine_background(&fill, &mask, &RefineConfig::default()).unwrap();
    assert_eq!(refined, fill);
}
