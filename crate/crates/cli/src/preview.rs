use layerpeel::{Dims, Layer, LayerSequence, RasterImage};

const GAP: usize = 4;
const CHECK: usize = 8;

fn over_checkerboard(layer: &Layer) -> RasterImage {
    RasterImage::from_fn(layer.dims(), |x, y| {
        let bg = if (x / CHECK + y / CHECK) % 2 == 0 { 0.85 } else { 0.65 };
        let [r, g, b, a] = layer.get(x, y);
        [r * a + bg * (1.0 - a), g * a + bg * (1.0 - a), b * a + bg * (1.0 - a)]
    })
}

/// One row: input, each layer back to front over a checkerboard, recomposite.
pub fn contact_sheet(input: &RasterImage, seq: &LayerSequence) -> RasterImage {
    let mut tiles = vec![input.clone()];
    tiles.extend(seq.layers().iter().map(over_checkerboard));
    tiles.push(seq.composite());
    let (w, h) = (input.width(), input.height());
    let dims = Dims::new(tiles.len() * w + (tiles.len() - 1) * GAP, h);
    RasterImage::from_fn(dims, |x, y| {
        let (tile, dx) = (x / (w + GAP), x % (w + GAP));
        if dx < w {
            tiles[tile].get(dx, y)
        } else {
            [1.0; 3]
        }
    })
}
