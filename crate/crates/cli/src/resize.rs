use layerpeel::{Dims, RasterImage};

/// Target size whose shorter side is `short`, or `None` when the image is
/// already that small.
pub fn target_dims(dims: Dims, short: usize) -> Option<Dims> {
    let current = dims.width.min(dims.height);
    if short == 0 || current <= short {
        return None;
    }
    let scale = short as f64 / current as f64;
    let w = ((dims.width as f64 * scale).round() as usize).max(1);
    let h = ((dims.height as f64 * scale).round() as usize).max(1);
    Some(Dims::new(w, h))
}

/// Overlap weights of each output cell with the input cells along one axis.
fn box_weights(src: usize, dst: usize) -> Vec<Vec<(usize, f64)>> {
    let step = src as f64 / dst as f64;
    (0..dst)
        .map(|o| {
            let (a, b) = (o as f64 * step, (o + 1) as f64 * step);
            let mut w = Vec::new();
            let mut i = a.floor() as usize;
            while (i as f64) < b && i < src {
                let overlap = (b.min(i as f64 + 1.0) - a.max(i as f64)).max(0.0);
                if overlap > 0.0 {
                    w.push((i, overlap / step));
                }
                i += 1;
            }
            w
        })
        .collect()
}

/// Area-averaging resample.
pub fn resize_area(image: &RasterImage, to: Dims) -> RasterImage {
    let from = image.dims();
    let wx = box_weights(from.width, to.width);
    let wy = box_weights(from.height, to.height);
    let mut rows = vec![[0.0f64; 3]; to.width * from.height];
    for y in 0..from.height {
        for (ox, weights) in wx.iter().enumerate() {
            let mut acc = [0.0; 3];
            for &(x, w) in weights {
                let p = image.get(x, y);
                for c in 0..3 {
                    acc[c] += w * p[c] as f64;
                }
            }
            rows[y * to.width + ox] = acc;
        }
    }
    RasterImage::from_fn(to, |ox, oy| {
        let mut acc = [0.0; 3];
        for &(y, w) in &wy[oy] {
            let r = rows[y * to.width + ox];
            for c in 0..3 {
                acc[c] += w * r[c];
            }
        }
        acc.map(|v| v as f32)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn target_keeps_aspect() {
        assert_eq!(target_dims(Dims::new(1024, 768), 512), Some(Dims::new(683, 512)));
        assert_eq!(target_dims(Dims::new(100, 80), 512), None);
    }

    #[test]
    fn halving_averages_blocks() {
        let img = RasterImage::from_fn(Dims::new(4, 2), |x, _| [if x % 2 == 0 { 0.0 } else { 1.0 }; 3]);
        let out = resize_area(&img, Dims::new(2, 1));
        assert!(out.pixels().iter().all(|p| (p[0] - 0.5).abs() < 1e-6));
    }

    #[test]
    fn fractional_ratio_preserves_constants() {
        let img = RasterImage::filled(Dims::new(7, 5), [0.25, 0.5, 0.75]);
        let out = resize_area(&img, Dims::new(3, 2));
        for p in out.pixels() {
            assert!((p[0] - 0.25).abs() < 1e-6 && (p[2] - 0.75).abs() < 1e-6);
        }
    }
}
