//! Layer-sequence directories and PNG helpers.
//!
//! A sequence directory holds `manifest.json` plus one 8-bit straight-alpha
//! RGBA PNG per layer (`layer_<z>.png`). Layer order comes from the
//! manifest's `z` values, never from file names.

use std::fs;
use std::io::Cursor;
use std::path::{Path, PathBuf};

use image::{ImageBuffer, ImageFormat, Luma, Rgb, Rgba};
use serde::{Deserialize, Serialize};

use crate::error::{LoadError, RasterError};
use crate::raster::{AlphaPlane, Dims, Layer, LayerSequence, RasterImage};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Canvas {
    pub width: usize,
    pub height: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestLayer {
    pub z: i64,
    pub file: String,
    pub name: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub canvas: Canvas,
    pub layers: Vec<ManifestLayer>,
    pub generator: Option<String>,
    pub seed: Option<u64>,
    /// Original canvas when the layers were produced from a downscaled input.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resized_from: Option<Canvas>,
}

/// Optional metadata recorded alongside the layers.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SequenceMeta {
    pub generator: Option<String>,
    pub seed: Option<u64>,
    pub names: Vec<Option<String>>,
    pub resized_from: Option<(usize, usize)>,
}

#[inline]
pub fn to_u8(v: f32) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0).round() as u8
}

#[inline]
pub fn from_u8(v: u8) -> f32 {
    v as f32 / 255.0
}

/// Snaps every sample to the nearest 8-bit code value, exactly as a
/// write/read cycle would.
pub fn quantize_sequence(seq: &LayerSequence) -> LayerSequence {
    let layers = seq
        .layers()
        .iter()
        .map(|l| {
            let px = l
                .pixels()
                .iter()
                .map(|p| p.map(|v| from_u8(to_u8(v))))
                .collect();
            Layer::new(l.dims(), px).expect("quantized samples stay in range")
        })
        .collect();
    LayerSequence::new(layers).expect("same canvas")
}

pub fn quantize_image(image: &RasterImage) -> RasterImage {
    let px = image
        .pixels()
        .iter()
        .map(|p| p.map(|v| from_u8(to_u8(v))))
        .collect();
    RasterImage::new(image.dims(), px).expect("quantized samples stay in range")
}

pub fn encode_rgba_png(layer: &Layer) -> Vec<u8> {
    let raw: Vec<u8> = layer.pixels().iter().flat_map(|p| p.map(to_u8)).collect();
    let buf: ImageBuffer<Rgba<u8>, _> =
        ImageBuffer::from_raw(layer.width() as u32, layer.height() as u32, raw)
            .expect("buffer sized from layer");
    encode(buf)
}

pub fn encode_rgb_png(image: &RasterImage) -> Vec<u8> {
    let raw: Vec<u8> = image.pixels().iter().flat_map(|p| p.map(to_u8)).collect();
    let buf: ImageBuffer<Rgb<u8>, _> =
        ImageBuffer::from_raw(image.width() as u32, image.height() as u32, raw)
            .expect("buffer sized from image");
    encode(buf)
}

pub fn encode_gray_png(alpha: &AlphaPlane) -> Vec<u8> {
    let raw: Vec<u8> = alpha.values().iter().map(|&v| to_u8(v)).collect();
    let dims = alpha.dims();
    let buf: ImageBuffer<Luma<u8>, _> =
        ImageBuffer::from_raw(dims.width as u32, dims.height as u32, raw)
            .expect("buffer sized from plane");
    encode(buf)
}

fn encode<P, C>(buf: ImageBuffer<P, C>) -> Vec<u8>
where
    P: image::PixelWithColorType,
    [P::Subpixel]: image::EncodableLayout,
    C: std::ops::Deref<Target = [P::Subpixel]>,
{
    let mut out = Cursor::new(Vec::new());
    buf.write_to(&mut out, ImageFormat::Png)
        .expect("png encoding into memory");
    out.into_inner()
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), LoadError> {
    fs::write(path, bytes).map_err(|e| LoadError::io(path, e))
}

pub fn write_rgb_png(image: &RasterImage, path: &Path) -> Result<(), LoadError> {
    write_file(path, &encode_rgb_png(image))
}

pub fn write_rgba_png(layer: &Layer, path: &Path) -> Result<(), LoadError> {
    write_file(path, &encode_rgba_png(layer))
}

pub fn write_gray_png(alpha: &AlphaPlane, path: &Path) -> Result<(), LoadError> {
    write_file(path, &encode_gray_png(alpha))
}

fn decode(path: &Path) -> Result<image::DynamicImage, LoadError> {
    let bytes = fs::read(path).map_err(|e| LoadError::io(path, e))?;
    image::load_from_memory(&bytes).map_err(|e| LoadError::CorruptImage {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

/// Reads an image as opaque RGB; any alpha channel is dropped.
pub fn read_rgb_image(path: &Path) -> Result<RasterImage, LoadError> {
    let img = decode(path)?.to_rgb8();
    let dims = Dims::new(img.width() as usize, img.height() as usize);
    let px = img.pixels().map(|p| p.0.map(from_u8)).collect();
    Ok(RasterImage::new(dims, px)?)
}

pub fn read_rgba_layer(path: &Path) -> Result<Layer, LoadError> {
    let img = decode(path)?.to_rgba8();
    let dims = Dims::new(img.width() as usize, img.height() as usize);
    let px = img.pixels().map(|p| p.0.map(from_u8)).collect();
    Ok(Layer::new(dims, px)?)
}

pub fn read_gray_plane(path: &Path) -> Result<AlphaPlane, LoadError> {
    let img = decode(path)?.to_luma8();
    let dims = Dims::new(img.width() as usize, img.height() as usize);
    let v = img.pixels().map(|p| from_u8(p.0[0])).collect();
    Ok(AlphaPlane::new(dims, v)?)
}

pub fn read_manifest(dir: &Path) -> Result<Manifest, LoadError> {
    let path = dir.join(MANIFEST_FILE);
    if !path.is_file() {
        return Err(LoadError::MissingManifest(path));
    }
    let text = fs::read_to_string(&path).map_err(|e| LoadError::io(&path, e))?;
    serde_json::from_str(&text).map_err(|e| LoadError::Manifest(e.to_string()))
}

pub fn read_sequence(dir: &Path) -> Result<LayerSequence, LoadError> {
    let manifest = read_manifest(dir)?;
    let mut entries = manifest.layers.clone();
    if entries.is_empty() {
        return Err(LoadError::Raster(RasterError::EmptySequence));
    }
    let found = entries
        .iter()
        .filter(|e| dir.join(&e.file).is_file())
        .count();
    if found != entries.len() {
        return Err(LoadError::LayerCountMismatch {
            listed: entries.len(),
            found,
        });
    }
    entries.sort_by_key(|e| e.z);
    let zs: Vec<i64> = entries.iter().map(|e| e.z).collect();
    if zs.iter().enumerate().any(|(i, &z)| z != i as i64) {
        return Err(LoadError::NonContiguousZ(zs));
    }
    let expected = (manifest.canvas.width, manifest.canvas.height);
    let mut layers = Vec::with_capacity(entries.len());
    for entry in &entries {
        let layer = read_rgba_layer(&dir.join(&entry.file))?;
        let actual = (layer.width(), layer.height());
        if actual != expected {
            return Err(LoadError::CanvasMismatch {
                file: entry.file.clone(),
                expected,
                actual,
            });
        }
        layers.push(layer);
    }
    Ok(LayerSequence::new(layers)?)
}

pub fn layer_file_name(z: usize) -> String {
    format!("layer_{z}.png")
}

pub fn write_sequence(seq: &LayerSequence, dir: &Path) -> Result<PathBuf, LoadError> {
    write_sequence_with_meta(seq, dir, &SequenceMeta::default())
}

pub fn write_sequence_with_meta(
    seq: &LayerSequence,
    dir: &Path,
    meta: &SequenceMeta,
) -> Result<PathBuf, LoadError> {
    fs::create_dir_all(dir).map_err(|e| LoadError::io(dir, e))?;
    let mut entries = Vec::with_capacity(seq.len());
    for (z, layer) in seq.layers().iter().enumerate() {
        let file = layer_file_name(z);
        write_rgba_png(layer, &dir.join(&file))?;
        entries.push(ManifestLayer {
            z: z as i64,
            file,
            name: meta.names.get(z).cloned().flatten(),
        });
    }
    let manifest = Manifest {
        canvas: Canvas {
            width: seq.dims().width,
            height: seq.dims().height,
        },
        layers: entries,
        generator: meta.generator.clone(),
        seed: meta.seed,
        resized_from: meta.resized_from.map(|(width, height)| Canvas { width, height }),
    };
    let path = dir.join(MANIFEST_FILE);
    let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    text.push('\n');
    write_file(&path, text.as_bytes())?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_sequence() -> LayerSequence {
        let dims = Dims::new(6, 5);
        let bg = RasterImage::from_fn(dims, |x, y| [x as f32 / 5.0, y as f32 / 4.0, 0.3]);
        let a = Layer::from_fn(dims, |x, y| [0.9, 0.1, 0.2, if x > y { 0.77 } else { 0.0 }]);
        let b = Layer::from_fn(dims, |x, _| [0.1, 0.5, 0.9, if x == 2 { 1.0 } else { 0.013 }]);
        LayerSequence::new(vec![Layer::opaque(&bg), a, b]).unwrap()
    }

    #[test]
    fn write_then_read_within_quantization() {
        let dir = tempfile::tempdir().unwrap();
        let seq = sample_sequence();
        write_sequence(&seq, dir.path()).unwrap();
        let back = read_sequence(dir.path()).unwrap();
        assert_eq!(back.len(), 3);
        for (l, r) in seq.layers().iter().zip(back.layers()) {
            for (p, q) in l.pixels().iter().zip(r.pixels()) {
                for c in 0..4 {
                    assert!((p[c] - q[c]).abs() <= 1.0 / 255.0 + 1e-7);
                }
            }
        }
        assert_eq!(back, quantize_sequence(&seq));
    }

    #[test]
    fn missing_manifest_is_distinct_error() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(
            read_sequence(dir.path()),
            Err(LoadError::MissingManifest(_))
        ));
    }

    #[test]
    fn manifest_listing_more_layers_than_files() {
        let dir = tempfile::tempdir().unwrap();
        write_sequence(&sample_sequence(), dir.path()).unwrap();
        fs::remove_file(dir.path().join("layer_2.png")).unwrap();
        let err = read_sequence(dir.path()).unwrap_err();
        assert!(matches!(
            err,
            LoadError::LayerCountMismatch { listed: 3, found: 2 }
        ));
        assert!(err.to_string().contains("layer count mismatch"));
    }

    #[test]
    fn corrupt_image_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        write_sequence(&sample_sequence(), dir.path()).unwrap();
        fs::write(dir.path().join("layer_1.png"), b"not a png").unwrap();
        assert!(matches!(
            read_sequence(dir.path()),
            Err(LoadError::CorruptImage { .. })
        ));
    }

    #[test]
    fn permuted_manifest_orders_by_z() {
        let dir = tempfile::tempdir().unwrap();
        let seq = sample_sequence();
        write_sequence(&seq, dir.path()).unwrap();
        // Swap the roles of the two foreground files: layer_2.png becomes z=1.
        let mut manifest = read_manifest(dir.path()).unwrap();
        manifest.layers = vec![
            ManifestLayer { z: 2, file: "layer_1.png".into(), name: None },
            ManifestLayer { z: 0, file: "layer_0.png".into(), name: None },
            ManifestLayer { z: 1, file: "layer_2.png".into(), name: None },
        ];
        fs::write(
            dir.path().join(MANIFEST_FILE),
            serde_json::to_string(&manifest).unwrap(),
        )
        .unwrap();
        let back = read_sequence(dir.path()).unwrap();
        let q = quantize_sequence(&seq);
        assert_eq!(back.layers()[1], q.layers()[2]);
        assert_eq!(back.layers()[2], q.layers()[1]);
    }

    #[test]
    fn gap_in_z_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        write_sequence(&sample_sequence(), dir.path()).unwrap();
        let mut manifest = read_manifest(dir.path()).unwrap();
        manifest.layers[2].z = 5;
        fs::write(
            dir.path().join(MANIFEST_FILE),
            serde_json::to_string(&manifest).unwrap(),
        )
        .unwrap();
        assert!(matches!(
            read_sequence(dir.path()),
            Err(LoadError::NonContiguousZ(_))
        ));
    }
}
