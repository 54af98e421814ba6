use crate::error::BackendError;
use crate::metrics::{merge_members, visibility_groups, OcclusionRule};
use crate::raster::{AlphaPlane, LayerSequence, RasterImage};

use super::MattingBackend;

/// Ground-truth matting: hands out the alpha of each visibility group of a
/// known layer sequence, front to back, one group per call.
#[derive(Debug, Clone)]
pub struct OracleSource {
    groups: Vec<AlphaPlane>,
    cursor: usize,
}

impl OracleSource {
    pub fn new(truth: &LayerSequence) -> Self {
        Self::with_rule(truth, OcclusionRule::default())
    }

    pub fn with_rule(truth: &LayerSequence, rule: OcclusionRule) -> Self {
        let groups = visibility_groups(truth, rule)
            .iter()
            .skip(1)
            .rev()
            .map(|members| merge_members(truth, members).alpha())
            .collect();
        Self { groups, cursor: 0 }
    }

    /// Number of top-layer groups not yet handed out.
    pub fn remaining(&self) -> usize {
        self.groups.len() - self.cursor
    }

    pub fn is_exhausted(&self) -> bool {
        self.remaining() == 0
    }
}

/// Returns the next group's alpha and advances, or `α ≡ 0` once only the
/// background remains.
pub fn oracle_matting(
    source: &mut OracleSource,
    current: &RasterImage,
) -> Result<AlphaPlane, BackendError> {
    let dims = current.dims();
    if let Some(first) = source.groups.first() {
        first.dims().ensure_same(dims)?;
    }
    match source.groups.get(source.cursor) {
        Some(alpha) => {
            source.cursor += 1;
            Ok(alpha.clone())
        }
        None => Ok(AlphaPlane::zeros(dims)),
    }
}

impl MattingBackend for OracleSource {
    fn matte(&mut self, image: &RasterImage) -> Result<AlphaPlane, BackendError> {
        oracle_matting(self, image)
    }

    fn name(&self) -> String {
        "oracle".into()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::{Dims, Layer};

    fn square(dims: Dims, x0: usize, y0: usize, s: usize) -> Layer {
        Layer::from_fn(dims, |x, y| {
            let inside = (x0..x0 + s).contains(&x) && (y0..y0 + s).contains(&y);
            [0.9, 0.2, 0.1, if inside { 1.0 } else { 0.0 }]
        })
    }

    #[test]
    fn background_only_gives_empty_matte() {
        let img = RasterImage::filled(Dims::new(8, 8), [0.3; 3]);
        let mut src = OracleSource::new(&LayerSequence::from_background(&img));
        assert!(oracle_matting(&mut src, &img).unwrap().is_zero());
    }

    #[test]
    fn disjoint_layers_come_out_together() {
        let dims = Dims::new(16, 16);
        let bg = Layer::opaque(&RasterImage::filled(dims, [1.0; 3]));
        let seq = LayerSequence::new(vec![bg, square(dims, 0, 0, 4), square(dims, 8, 8, 4)]).unwrap();
        let img = seq.composite();
        let mut src = OracleSource::new(&seq);
        let a = oracle_matting(&mut src, &img).unwrap();
        assert_eq!(a.count_above(0.5), 32);
        assert!(oracle_matting(&mut src, &img).unwrap().is_zero());
    }

    #[test]
    fn stacked_layers_come_out_one_per_call() {
        let dims = Dims::new(16, 16);
        let bg = Layer::opaque(&RasterImage::filled(dims, [1.0; 3]));
        let back = square(dims, 2, 2, 8);
        let front = square(dims, 6, 6, 8);
        let seq = LayerSequence::new(vec![bg, back.clone(), front.clone()]).unwrap();
        let img = seq.composite();
        let mut src = OracleSource::new(&seq);
        assert_eq!(src.remaining(), 2);
        assert_eq!(oracle_matting(&mut src, &img).unwrap(), front.alpha());
        assert_eq!(oracle_matting(&mut src, &img).unwrap(), back.alpha());
        assert!(src.is_exhausted());
    }

    #[test]
    fn canvas_mismatch_is_rejected() {
        let dims = Dims::new(16, 16);
        let bg = Layer::opaque(&RasterImage::filled(dims, [1.0; 3]));
        let seq = LayerSequence::new(vec![bg, square(dims, 0, 0, 4)]).unwrap();
        let mut src = OracleSource::new(&seq);
        let small = RasterImage::filled(Dims::new(8, 8), [1.0; 3]);
        assert!(oracle_matting(&mut src, &small).is_err());
    }
}
