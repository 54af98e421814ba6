use crate::raster::{AlphaPlane, Dims, Mask};

/// One 4-connected region. `pixels` are canvas indices in scanline order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConnectedRegion {
    pub pixels: Vec<usize>,
    /// Inclusive `(x0, y0, x1, y1)`.
    pub bbox: (usize, usize, usize, usize),
}

impl ConnectedRegion {
    pub fn area(&self) -> usize {
        self.pixels.len()
    }

    pub fn to_mask(&self, dims: Dims) -> Mask {
        Mask::from_indices(dims, self.pixels.iter().copied())
    }

    fn first(&self) -> usize {
        self.pixels[0]
    }
}

/// 4-connected components of `{alpha > cut}`, largest first; equal areas
/// keep scanline order of their first pixel.
pub fn connected_components(alpha: &AlphaPlane, cut: f32) -> Vec<ConnectedRegion> {
    mask_components(&alpha.threshold(cut))
}

pub fn mask_components(mask: &Mask) -> Vec<ConnectedRegion> {
    let dims = mask.dims();
    let mut seen = vec![false; dims.len()];
    let mut regions = Vec::new();
    let mut stack = Vec::new();
    for start in 0..dims.len() {
        if !mask.at(start) || seen[start] {
            continue;
        }
        seen[start] = true;
        stack.push(start);
        let mut pixels = Vec::new();
        while let Some(i) = stack.pop() {
            pixels.push(i);
            for n in dims.neighbors4(i) {
                if mask.at(n) && !seen[n] {
                    seen[n] = true;
                    stack.push(n);
                }
            }
        }
        pixels.sort_unstable();
        let (mut x0, mut y0, mut x1, mut y1) = (usize::MAX, usize::MAX, 0, 0);
        for &i in &pixels {
            let (x, y) = dims.coords(i);
            x0 = x0.min(x);
            y0 = y0.min(y);
            x1 = x1.max(x);
            y1 = y1.max(y);
        }
        regions.push(ConnectedRegion {
            pixels,
            bbox: (x0, y0, x1, y1),
        });
    }
    regions.sort_by(|a, b| b.area().cmp(&a.area()).then(a.first().cmp(&b.first())));
    regions
}
