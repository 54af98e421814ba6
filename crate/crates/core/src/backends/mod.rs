//! Matting and inpainting backends.
//!
//! A matting backend maps an image to the alpha of everything currently on
//! top; an inpainting backend completes the masked part of an image. The
//! built-ins are a ground-truth oracle, a flat-color heuristic, a harmonic
//! fill, and an adapter that talks to an external process.

mod external;
mod harmonic;
mod heuristic;
mod oracle;
pub mod protocol;

pub use external::{ExternalBackend, ExternalBackendConfig};
pub use harmonic::{harmonic_inpaint, HarmonicConfig, HarmonicInpainting};
pub use heuristic::{heuristic_flat_matting, HeuristicMatting, HeuristicMattingConfig};
pub use oracle::{oracle_matting, OracleSource};
pub use protocol::Mode;

use crate::error::BackendError;
use crate::raster::{AlphaPlane, Mask, RasterImage};

pub trait MattingBackend {
    /// Alpha of all current top layers of `image`.
    fn matte(&mut self, image: &RasterImage) -> Result<AlphaPlane, BackendError>;

    fn name(&self) -> String;
}

pub trait InpaintingBackend {
    /// `image` with the `mask` area completed. Unmasked pixels must come back
    /// unchanged.
    fn inpaint(&mut self, image: &RasterImage, mask: &Mask) -> Result<RasterImage, BackendError>;

    fn name(&self) -> String;
}

impl<T: MattingBackend + ?Sized> MattingBackend for &mut T {
    fn matte(&mut self, image: &RasterImage) -> Result<AlphaPlane, BackendError> {
        (**self).matte(image)
    }

    fn name(&self) -> String {
        (**self).name()
    }
}

impl<T: MattingBackend + ?Sized> MattingBackend for Box<T> {
    fn matte(&mut self, image: &RasterImage) -> Result<AlphaPlane, BackendError> {
        (**self).matte(image)
    }

    fn name(&self) -> String {
        (**self).name()
    }
}

impl<T: InpaintingBackend + ?Sized> InpaintingBackend for &mut T {
    fn inpaint(&mut self, image: &RasterImage, mask: &Mask) -> Result<RasterImage, BackendError> {
        (**self).inpaint(image, mask)
    }

    fn name(&self) -> String {
        (**self).name()
    }
}

impl<T: InpaintingBackend + ?Sized> InpaintingBackend for Box<T> {
    fn inpaint(&mut self, image: &RasterImage, mask: &Mask) -> Result<RasterImage, BackendError> {
        (**self).inpaint(image, mask)
    }

    fn name(&self) -> String {
        (**self).name()
    }
}

/// Inpainting that completes nothing: returns the input as is.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoInpainting;

impl InpaintingBackend for NoInpainting {
    fn inpaint(&mut self, image: &RasterImage, mask: &Mask) -> Result<RasterImage, BackendError> {
        image.dims().ensure_same(mask.dims())?;
        Ok(image.clone())
    }

    fn name(&self) -> String {
        "none".into()
    }
}

/// Checks a matting result against the backend contract.
pub fn check_matting(input: &RasterImage, alpha: &AlphaPlane) -> Result<(), BackendError> {
    if alpha.dims() != input.dims() {
        return Err(BackendError::Contract(format!(
            "alpha is {}x{}, input is {}x{}",
            alpha.dims().width,
            alpha.dims().height,
            input.width(),
            input.height()
        )));
    }
    if let Some((i, v)) = alpha
        .values()
        .iter()
        .enumerate()
        .find(|(_, v)| !(0.0..=1.0).contains(*v))
    {
        return Err(BackendError::Contract(format!("alpha sample {i} is {v}")));
    }
    Ok(())
}

/// Checks an inpainting result against the backend contract, including
/// bit-exact preservation of unmasked pixels.
pub fn check_inpainting(
    input: &RasterImage,
    mask: &Mask,
    output: &RasterImage,
) -> Result<(), BackendError> {
    if output.dims() != input.dims() {
        return Err(BackendError::Contract(format!(
            "completion is {}x{}, input is {}x{}",
            output.width(),
            output.height(),
            input.width(),
            input.height()
        )));
    }
    for (i, (o, x)) in output.pixels().iter().zip(input.pixels()).enumerate() {
        if o.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(BackendError::Contract(format!("completed pixel {i} is {o:?}")));
        }
        if !mask.at(i) && o != x {
            return Err(BackendError::Contract(format!(
                "unmasked pixel {i} changed from {x:?} to {o:?}"
            )));
        }
    }
    Ok(())
}
