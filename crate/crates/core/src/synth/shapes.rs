use rand::RngExt;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::raster::{AlphaPlane, Dims};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShapeKind {
    Rect,
    Ellipse,
    Ring,
    Bar,
    GlyphBlob,
}

impl ShapeKind {
    pub const ALL: [ShapeKind; 5] = [
        ShapeKind::Rect,
        ShapeKind::Ellipse,
        ShapeKind::Ring,
        ShapeKind::Bar,
        ShapeKind::GlyphBlob,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EdgeModel {
    #[default]
    Hard,
    /// 4×4 supersampled coverage.
    Antialiased,
}

/// A shape in continuous canvas coordinates (pixel `(x, y)` spans
/// `[x, x+1) × [y, y+1)`).
#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    Rect { x0: f64, y0: f64, x1: f64, y1: f64 },
    Ellipse { cx: f64, cy: f64, rx: f64, ry: f64 },
    Ring { cx: f64, cy: f64, rx: f64, ry: f64, thickness: f64 },
    Polygon { points: Vec<(f64, f64)> },
}

impl Shape {
    pub fn contains(&self, x: f64, y: f64) -> bool {
        match *self {
            Shape::Rect { x0, y0, x1, y1 } => x >= x0 && x < x1 && y >= y0 && y < y1,
            Shape::Ellipse { cx, cy, rx, ry } => {
                let (u, v) = ((x - cx) / rx, (y - cy) / ry);
                u * u + v * v <= 1.0
            }
            Shape::Ring { cx, cy, rx, ry, thickness } => {
                let (u, v) = ((x - cx) / rx, (y - cy) / ry);
                let (ui, vi) = ((x - cx) / (rx - thickness), (y - cy) / (ry - thickness));
                u * u + v * v <= 1.0 && ui * ui + vi * vi > 1.0
            }
            Shape::Polygon { ref points } => {
                let mut inside = false;
                let n = points.len();
                for i in 0..n {
                    let (xi, yi) = points[i];
                    let (xj, yj) = points[(i + n - 1) % n];
                    if (yi > y) != (yj > y) && x < (xj - xi) * (y - yi) / (yj - yi) + xi {
                        inside = !inside;
                    }
                }
                inside
            }
        }
    }

    pub fn rasterize(&self, dims: Dims, edge: EdgeModel) -> AlphaPlane {
        match edge {
            EdgeModel::Hard => AlphaPlane::from_fn(dims, |x, y| {
                if self.contains(x as f64 + 0.5, y as f64 + 0.5) {
                    1.0
                } else {
                    0.0
                }
            }),
            EdgeModel::Antialiased => AlphaPlane::from_fn(dims, |x, y| {
                let mut hits = 0u32;
                for sy in 0..4 {
                    for sx in 0..4 {
                        let px = x as f64 + (sx as f64 + 0.5) / 4.0;
                        let py = y as f64 + (sy as f64 + 0.5) / 4.0;
                        hits += self.contains(px, py) as u32;
                    }
                }
                hits as f32 / 16.0
            }),
        }
    }
}

/// Random shape of `kind` inside the canvas. Rectangles and bars snap to
/// whole pixels.
pub fn random_shape(kind: ShapeKind, dims: Dims, rng: &mut ChaCha8Rng) -> Shape {
    let (w, h) = (dims.width as f64, dims.height as f64);
    let short = w.min(h);
    let lo = (short / 6.0).max(6.0);
    let hi = (short / 2.5).max(lo + 1.0);
    let mut size = || rng.random_range(lo..hi);
    let (sw, sh) = (size(), size());
    match kind {
        ShapeKind::Rect | ShapeKind::Bar => {
            let (bw, bh) = if kind == ShapeKind::Bar {
                let long = (sw * 1.6).min(w - 2.0);
                let thin = (sh / 4.0).max(3.0);
                if rng.random::<bool>() {
                    (long, thin)
                } else {
                    (thin, long.min(h - 2.0))
                }
            } else {
                (sw, sh)
            };
            let (bw, bh) = (bw.round().max(2.0), bh.round().max(2.0));
            let x0 = rng.random_range(0.0..=(w - bw)).floor();
            let y0 = rng.random_range(0.0..=(h - bh)).floor();
            Shape::Rect { x0, y0, x1: x0 + bw, y1: y0 + bh }
        }
        ShapeKind::Ellipse | ShapeKind::Ring => {
            let (rx, ry) = (sw / 2.0, sh / 2.0);
            let cx = rng.random_range(rx..=(w - rx));
            let cy = rng.random_range(ry..=(h - ry));
            if kind == ShapeKind::Ellipse {
                Shape::Ellipse { cx, cy, rx, ry }
            } else {
                let thickness = (rx.min(ry) * rng.random_range(0.3..0.5)).max(3.0);
                Shape::Ring { cx, cy, rx, ry, thickness }
            }
        }
        ShapeKind::GlyphBlob => {
            let (rx, ry) = (sw / 2.0, sh / 2.0);
            let cx = rng.random_range(rx..=(w - rx));
            let cy = rng.random_range(ry..=(h - ry));
            let n = rng.random_range(5..9);
            let points = (0..n)
                .map(|i| {
                    let t = std::f64::consts::TAU * (i as f64 + rng.random_range(0.0..0.6)) / n as f64;
                    let r = rng.random_range(0.55..1.0);
                    (cx + rx * r * t.cos(), cy + ry * r * t.sin())
                })
                .collect();
            Shape::Polygon { points }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rect_is_pixel_exact_in_both_edge_models() {
        let r = Shape::Rect { x0: 2.0, y0: 3.0, x1: 7.0, y1: 5.0 };
        let dims = Dims::new(10, 10);
        let hard = r.rasterize(dims, EdgeModel::Hard);
        assert_eq!(hard, r.rasterize(dims, EdgeModel::Antialiased));
        assert_eq!(hard.count_above(0.0), 10);
        assert_eq!(hard.count_above(0.99), 10);
    }

    #[test]
    fn antialiased_ellipse_has_fractional_rim() {
        let e = Shape::Ellipse { cx: 10.0, cy: 10.0, rx: 6.3, ry: 4.7 };
        let a = e.rasterize(Dims::new(20, 20), EdgeModel::Antialiased);
        assert!(a.values().iter().any(|&v| v > 0.0 && v < 1.0));
        assert_eq!(a.get(10, 10), 1.0);
    }

    #[test]
    fn ring_has_a_hole() {
        let r = Shape::Ring { cx: 16.0, cy: 16.0, rx: 12.0, ry: 12.0, thickness: 4.0 };
        let a = r.rasterize(Dims::new(32, 32), EdgeModel::Hard);
        assert_eq!(a.get(16, 16), 0.0);
        assert_eq!(a.get(16, 5), 1.0);
    }

    #[test]
    fn polygon_winding() {
        let p = Shape::Polygon { points: vec![(0.0, 0.0), (4.0, 0.0), (4.0, 4.0), (0.0, 4.0)] };
        assert!(p.contains(2.0, 2.0));
        assert!(!p.contains(5.0, 2.0));
    }
}
