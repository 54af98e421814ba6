//! Pixel containers and the alpha blending math everything else is built on.
//!
//! All samples are `f32` in `[0, 1]`; quantization to 8 bits only happens at
//! file boundaries (see [`crate::io`]).

use crate::error::RasterError;

/// Below this alpha, unblended color is undefined and reported as black.
pub const UNBLEND_EPSILON: f32 = 1.0 / 255.0;

/// Canvas size in pixels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dims {
    pub width: usize,
    pub height: usize,
}

impl Dims {
    pub fn new(width: usize, height: usize) -> Self {
        Self { width, height }
    }

    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, x: usize, y: usize) -> usize {
        y * self.width + x
    }

    #[inline]
    pub fn coords(&self, index: usize) -> (usize, usize) {
        (index % self.width, index / self.width)
    }

    /// 4-connected neighbors inside the canvas.
    pub fn neighbors4(&self, index: usize) -> impl Iterator<Item = usize> {
        let (x, y) = self.coords(index);
        let w = self.width;
        let h = self.height;
        [
            (x > 0).then(|| index - 1),
            (x + 1 < w).then(|| index + 1),
            (y > 0).then(|| index - w),
            (y + 1 < h).then(|| index + w),
        ]
        .into_iter()
        .flatten()
    }

    /// 8-connected neighbors inside the canvas.
    pub fn neighbors8(&self, index: usize) -> impl Iterator<Item = usize> + '_ {
        let (x, y) = self.coords(index);
        let (x, y) = (x as isize, y as isize);
        (-1isize..=1)
            .flat_map(move |dy| (-1isize..=1).map(move |dx| (dx, dy)))
            .filter(|&(dx, dy)| dx != 0 || dy != 0)
            .filter_map(move |(dx, dy)| {
                let (nx, ny) = (x + dx, y + dy);
                (nx >= 0 && ny >= 0 && (nx as usize) < self.width && (ny as usize) < self.height)
                    .then(|| ny as usize * self.width + nx as usize)
            })
    }

    pub(crate) fn ensure_same(&self, other: Dims) -> Result<(), RasterError> {
        if *self == other {
            Ok(())
        } else {
            Err(RasterError::DimensionMismatch {
                expected: (self.width, self.height),
                actual: (other.width, other.height),
            })
        }
    }
}

fn check_dims(dims: Dims) -> Result<(), RasterError> {
    if dims.width == 0 || dims.height == 0 {
        return Err(RasterError::EmptyCanvas);
    }
    Ok(())
}

fn check_samples<'a>(samples: impl Iterator<Item = &'a f32>) -> Result<(), RasterError> {
    for (i, &v) in samples.enumerate() {
        if !(0.0..=1.0).contains(&v) {
            return Err(RasterError::SampleOutOfRange { index: i, value: v });
        }
    }
    Ok(())
}

#[inline]
pub(crate) fn clamp01(v: f32) -> f32 {
    v.clamp(0.0, 1.0)
}

/// An opaque RGB raster.
#[derive(Debug, Clone, PartialEq)]
pub struct RasterImage {
    dims: Dims,
    pixels: Vec<[f32; 3]>,
}

impl RasterImage {
    pub fn new(dims: Dims, pixels: Vec<[f32; 3]>) -> Result<Self, RasterError> {
        check_dims(dims)?;
        if pixels.len() != dims.len() {
            return Err(RasterError::BufferLength {
                expected: dims.len(),
                actual: pixels.len(),
            });
        }
        check_samples(pixels.iter().flatten())?;
        Ok(Self { dims, pixels })
    }

    pub fn filled(dims: Dims, color: [f32; 3]) -> Self {
        assert!(dims.width > 0 && dims.height > 0, "empty canvas");
        Self {
            dims,
            pixels: vec![color.map(clamp01); dims.len()],
        }
    }

    pub fn from_fn(dims: Dims, mut f: impl FnMut(usize, usize) -> [f32; 3]) -> Self {
        assert!(dims.width > 0 && dims.height > 0, "empty canvas");
        let mut pixels = Vec::with_capacity(dims.len());
        for y in 0..dims.height {
            for x in 0..dims.width {
                pixels.push(f(x, y).map(clamp01));
            }
        }
        Self { dims, pixels }
    }

    /// Builds an image from already-valid pixels, clamping anything outside
    /// the unit interval.
    pub(crate) fn from_clamped(dims: Dims, mut pixels: Vec<[f32; 3]>) -> Self {
        debug_assert_eq!(pixels.len(), dims.len());
        for p in &mut pixels {
            *p = p.map(clamp01);
        }
        Self { dims, pixels }
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn width(&self) -> usize {
        self.dims.width
    }

    pub fn height(&self) -> usize {
        self.dims.height
    }

    pub fn pixels(&self) -> &[[f32; 3]] {
        &self.pixels
    }

    pub fn get(&self, x: usize, y: usize) -> [f32; 3] {
        self.pixels[self.dims.index(x, y)]
    }

    pub fn set(&mut self, x: usize, y: usize, color: [f32; 3]) {
        let i = self.dims.index(x, y);
        self.pixels[i] = color.map(clamp01);
    }

    pub(crate) fn pixels_mut(&mut self) -> &mut [[f32; 3]] {
        &mut self.pixels
    }

    /// Mean absolute difference over all samples.
    pub fn mean_abs_diff(&self, other: &RasterImage) -> Result<f64, RasterError> {
        self.dims.ensure_same(other.dims)?;
        let total: f64 = self
            .pixels
            .iter()
            .zip(&other.pixels)
            .map(|(a, b)| (0..3).map(|c| (a[c] as f64 - b[c] as f64).abs()).sum::<f64>())
            .sum();
        Ok(total / (3 * self.dims.len()) as f64)
    }

    /// Largest per-pixel L1 distance (summed over channels, divided by 3).
    pub fn max_pixel_l1(&self, other: &RasterImage) -> Result<f64, RasterError> {
        self.dims.ensure_same(other.dims)?;
        Ok(self
            .pixels
            .iter()
            .zip(&other.pixels)
            .map(|(a, b)| (0..3).map(|c| (a[c] as f64 - b[c] as f64).abs()).sum::<f64>() / 3.0)
            .fold(0.0, f64::max))
    }
}

/// A single-channel alpha map in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaPlane {
    dims: Dims,
    values: Vec<f32>,
}

impl AlphaPlane {
    pub fn new(dims: Dims, values: Vec<f32>) -> Result<Self, RasterError> {
        check_dims(dims)?;
        if values.len() != dims.len() {
            return Err(RasterError::BufferLength {
                expected: dims.len(),
                actual: values.len(),
            });
        }
        check_samples(values.iter())?;
        Ok(Self { dims, values })
    }

    pub fn zeros(dims: Dims) -> Self {
        Self::filled(dims, 0.0)
    }

    pub fn filled(dims: Dims, value: f32) -> Self {
        Self {
            dims,
            values: vec![clamp01(value); dims.len()],
        }
    }

    pub fn from_fn(dims: Dims, mut f: impl FnMut(usize, usize) -> f32) -> Self {
        let mut values = Vec::with_capacity(dims.len());
        for y in 0..dims.height {
            for x in 0..dims.width {
                values.push(clamp01(f(x, y)));
            }
        }
        Self { dims, values }
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn values(&self) -> &[f32] {
        &self.values
    }

    pub fn get(&self, x: usize, y: usize) -> f32 {
        self.values[self.dims.index(x, y)]
    }

    pub fn set(&mut self, x: usize, y: usize, value: f32) {
        let i = self.dims.index(x, y);
        self.values[i] = clamp01(value);
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f32] {
        &mut self.values
    }

    /// Pixels strictly above `cut`.
    pub fn threshold(&self, cut: f32) -> Mask {
        Mask {
            dims: self.dims,
            bits: self.values.iter().map(|&a| a > cut).collect(),
        }
    }

    pub fn count_above(&self, cut: f32) -> usize {
        self.values.iter().filter(|&&a| a > cut).count()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&a| a == 0.0)
    }
}

/// A binary mask, `true` = selected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mask {
    dims: Dims,
    bits: Vec<bool>,
}

impl Mask {
    pub fn new(dims: Dims, bits: Vec<bool>) -> Result<Self, RasterError> {
        check_dims(dims)?;
        if bits.len() != dims.len() {
            return Err(RasterError::BufferLength {
                expected: dims.len(),
                actual: bits.len(),
            });
        }
        Ok(Self { dims, bits })
    }

    pub fn empty(dims: Dims) -> Self {
        Self {
            dims,
            bits: vec![false; dims.len()],
        }
    }

    pub fn from_fn(dims: Dims, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut bits = Vec::with_capacity(dims.len());
        for y in 0..dims.height {
            for x in 0..dims.width {
                bits.push(f(x, y));
            }
        }
        Self { dims, bits }
    }

    pub fn from_indices(dims: Dims, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut mask = Self::empty(dims);
        for i in indices {
            mask.bits[i] = true;
        }
        mask
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[self.dims.index(x, y)]
    }

    #[inline]
    pub fn at(&self, index: usize) -> bool {
        self.bits[index]
    }

    pub fn set(&mut self, x: usize, y: usize, value: bool) {
        let i = self.dims.index(x, y);
        self.bits[i] = value;
    }

    pub fn set_at(&mut self, index: usize, value: bool) {
        self.bits[index] = value;
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }

    pub fn is_full(&self) -> bool {
        self.bits.iter().all(|&b| b)
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i)
    }

    pub fn union(&self, other: &Mask) -> Mask {
        Mask {
            dims: self.dims,
            bits: self.bits.iter().zip(&other.bits).map(|(a, b)| *a || *b).collect(),
        }
    }

    pub fn intersects(&self, other: &Mask) -> bool {
        self.bits.iter().zip(&other.bits).any(|(a, b)| *a && *b)
    }

    pub fn is_subset_of(&self, other: &Mask) -> bool {
        self.bits.iter().zip(&other.bits).all(|(a, b)| !*a || *b)
    }

    /// Dilation with a `(2r+1)²` square structuring element, clipped at the
    /// canvas border. Separable: a horizontal pass then a vertical pass.
    pub fn dilate(&self, radius: usize) -> Mask {
        if radius == 0 {
            return self.clone();
        }
        let Dims { width, height } = self.dims;
        let mut horizontal = vec![false; self.bits.len()];
        for y in 0..height {
            let row = &self.bits[y * width..(y + 1) * width];
            let mut last_set: Option<usize> = None;
            // distance to the nearest set pixel on the left, then on the right
            for x in 0..width {
                if row[x] {
                    last_set = Some(x);
                }
                if let Some(s) = last_set {
                    if x - s <= radius {
                        horizontal[y * width + x] = true;
                    }
                }
            }
            let mut next_set: Option<usize> = None;
            for x in (0..width).rev() {
                if row[x] {
                    next_set = Some(x);
                }
                if let Some(s) = next_set {
                    if s - x <= radius {
                        horizontal[y * width + x] = true;
                    }
                }
            }
        }
        let mut bits = vec![false; self.bits.len()];
        for x in 0..width {
            let mut last_set: Option<usize> = None;
            for y in 0..height {
                if horizontal[y * width + x] {
                    last_set = Some(y);
                }
                if let Some(s) = last_set {
                    if y - s <= radius {
                        bits[y * width + x] = true;
                    }
                }
            }
            let mut next_set: Option<usize> = None;
            for y in (0..height).rev() {
                if horizontal[y * width + x] {
                    next_set = Some(y);
                }
                if let Some(s) = next_set {
                    if s - y <= radius {
                        bits[y * width + x] = true;
                    }
                }
            }
        }
        Mask { dims: self.dims, bits }
    }

    pub fn to_alpha(&self) -> AlphaPlane {
        AlphaPlane {
            dims: self.dims,
            values: self.bits.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect(),
        }
    }
}

/// An RGBA layer with straight (non-premultiplied) alpha.
#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    dims: Dims,
    pixels: Vec<[f32; 4]>,
}

impl Layer {
    pub fn new(dims: Dims, pixels: Vec<[f32; 4]>) -> Result<Self, RasterError> {
        check_dims(dims)?;
        if pixels.len() != dims.len() {
            return Err(RasterError::BufferLength {
                expected: dims.len(),
                actual: pixels.len(),
            });
        }
        check_samples(pixels.iter().flatten())?;
        Ok(Self { dims, pixels })
    }

    pub fn transparent(dims: Dims) -> Self {
        Self {
            dims,
            pixels: vec![[0.0; 4]; dims.len()],
        }
    }

    pub fn opaque(image: &RasterImage) -> Self {
        Self::from_parts(image, &AlphaPlane::filled(image.dims(), 1.0))
            .expect("same dimensions by construction")
    }

    /// Joins color planes and an alpha plane.
    pub fn from_parts(color: &RasterImage, alpha: &AlphaPlane) -> Result<Self, RasterError> {
        color.dims().ensure_same(alpha.dims())?;
        let pixels = color
            .pixels()
            .iter()
            .zip(alpha.values())
            .map(|(c, &a)| [c[0], c[1], c[2], a])
            .collect();
        Ok(Self {
            dims: color.dims(),
            pixels,
        })
    }

    pub fn from_fn(dims: Dims, mut f: impl FnMut(usize, usize) -> [f32; 4]) -> Self {
        let mut pixels = Vec::with_capacity(dims.len());
        for y in 0..dims.height {
            for x in 0..dims.width {
                pixels.push(f(x, y).map(clamp01));
            }
        }
        Self { dims, pixels }
    }

    pub(crate) fn from_clamped(dims: Dims, mut pixels: Vec<[f32; 4]>) -> Self {
        debug_assert_eq!(pixels.len(), dims.len());
        for p in &mut pixels {
            *p = p.map(clamp01);
        }
        Self { dims, pixels }
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn width(&self) -> usize {
        self.dims.width
    }

    pub fn height(&self) -> usize {
        self.dims.height
    }

    pub fn pixels(&self) -> &[[f32; 4]] {
        &self.pixels
    }

    pub fn get(&self, x: usize, y: usize) -> [f32; 4] {
        self.pixels[self.dims.index(x, y)]
    }

    pub fn color(&self) -> RasterImage {
        RasterImage {
            dims: self.dims,
            pixels: self.pixels.iter().map(|p| [p[0], p[1], p[2]]).collect(),
        }
    }

    pub fn alpha(&self) -> AlphaPlane {
        AlphaPlane {
            dims: self.dims,
            values: self.pixels.iter().map(|p| p[3]).collect(),
        }
    }

    pub fn alpha_at(&self, index: usize) -> f32 {
        self.pixels[index][3]
    }

    pub fn is_transparent(&self) -> bool {
        self.pixels.iter().all(|p| p[3] == 0.0)
    }

    /// Straight-alpha "over": `upper` composited onto `lower`.
    ///
    /// Pixels where only one side contributes are copied verbatim, so merging
    /// layers with disjoint supports never perturbs a single bit.
    pub fn merge_over(lower: &Layer, upper: &Layer) -> Result<Layer, RasterError> {
        lower.dims.ensure_same(upper.dims)?;
        let pixels = lower
            .pixels
            .iter()
            .zip(&upper.pixels)
            .map(|(l, u)| merge_pixel(*l, *u))
            .collect();
        Ok(Layer::from_clamped(lower.dims, pixels))
    }
}

#[inline]
fn merge_pixel(lower: [f32; 4], upper: [f32; 4]) -> [f32; 4] {
    let (la, ua) = (lower[3], upper[3]);
    if ua == 0.0 {
        return lower;
    }
    if ua == 1.0 || la == 0.0 {
        return upper;
    }
    let (la, ua) = (la as f64, ua as f64);
    let a = ua + la * (1.0 - ua);
    let mut out = [0.0f32; 4];
    for c in 0..3 {
        out[c] = ((upper[c] as f64 * ua + lower[c] as f64 * la * (1.0 - ua)) / a) as f32;
    }
    out[3] = a as f32;
    out
}

/// Back-to-front layer stack on a shared canvas. Index 0 is the background.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerSequence {
    dims: Dims,
    layers: Vec<Layer>,
}

impl LayerSequence {
    pub fn new(layers: Vec<Layer>) -> Result<Self, RasterError> {
        let first = layers.first().ok_or(RasterError::EmptySequence)?;
        let dims = first.dims();
        for layer in &layers[1..] {
            dims.ensure_same(layer.dims())?;
        }
        Ok(Self { dims, layers })
    }

    pub fn from_background(background: &RasterImage) -> Self {
        Self {
            dims: background.dims(),
            layers: vec![Layer::opaque(background)],
        }
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn len(&self) -> usize {
        self.layers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.layers.is_empty()
    }

    pub fn push(&mut self, layer: Layer) -> Result<(), RasterError> {
        self.dims.ensure_same(layer.dims())?;
        self.layers.push(layer);
        Ok(())
    }

    pub fn into_layers(self) -> Vec<Layer> {
        self.layers
    }

    /// Non-fatal oddities, currently only a background that is not opaque.
    pub fn warnings(&self) -> Vec<String> {
        let translucent = self.layers[0]
            .pixels()
            .iter()
            .filter(|p| p[3] < 1.0)
            .count();
        if translucent > 0 {
            vec![format!(
                "background layer has {translucent} pixels with alpha < 1; treated as opaque"
            )]
        } else {
            Vec::new()
        }
    }

    pub fn composite(&self) -> RasterImage {
        composite(self)
    }
}

/// Alpha-blends `layer` onto `backdrop`.
pub fn blend(layer: &Layer, backdrop: &RasterImage) -> Result<RasterImage, RasterError> {
    backdrop.dims().ensure_same(layer.dims())?;
    let mut out = backdrop.clone();
    blend_in_place(&mut out, layer);
    Ok(out)
}

fn blend_in_place(backdrop: &mut RasterImage, layer: &Layer) {
    for (bg, l) in backdrop.pixels.iter_mut().zip(layer.pixels()) {
        let a = l[3];
        if a == 0.0 {
            continue;
        }
        let inv = 1.0 - a;
        for c in 0..3 {
            bg[c] = clamp01(l[c] * a + bg[c] * inv);
        }
    }
}

/// Renders a sequence back to front. The background's alpha is ignored.
pub fn composite(seq: &LayerSequence) -> RasterImage {
    let mut out = seq.layers[0].color();
    for layer in &seq.layers[1..] {
        blend_in_place(&mut out, layer);
    }
    out
}

/// Recovers foreground color from a composite, its backdrop and the alpha
/// that blended them. Pixels with alpha below [`UNBLEND_EPSILON`] come back
/// black; everything is clamped to the unit interval.
pub fn unblend(
    composited: &RasterImage,
    backdrop: &RasterImage,
    alpha: &AlphaPlane,
) -> Result<RasterImage, RasterError> {
    composited.dims().ensure_same(backdrop.dims())?;
    composited.dims().ensure_same(alpha.dims())?;
    let pixels = composited
        .pixels()
        .iter()
        .zip(backdrop.pixels())
        .zip(alpha.values())
        .map(|((x, b), &a)| unblend_pixel(*x, *b, a))
        .collect();
    Ok(RasterImage::from_clamped(composited.dims(), pixels))
}

#[inline]
pub(crate) fn unblend_pixel(x: [f32; 3], b: [f32; 3], a: f32) -> [f32; 3] {
    if a < UNBLEND_EPSILON {
        return [0.0; 3];
    }
    if a == 1.0 {
        return x;
    }
    let a = a as f64;
    let mut out = [0.0f32; 3];
    for c in 0..3 {
        let v = (x[c] as f64 - b[c] as f64 * (1.0 - a)) / a;
        out[c] = v.clamp(0.0, 1.0) as f32;
    }
    out
}
