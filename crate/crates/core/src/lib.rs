//! Layer decomposition of flat raster graphic designs.
//!
//! An image is peeled front to back: a matting backend estimates the alpha of
//! the current top layer, an inpainting backend completes what lies beneath,
//! palette refinement cleans both, and the loop repeats on the completed
//! backdrop. The [`metrics`] module scores any decomposition against ground
//! truth with visibility grouping, DTW alignment and greedy merge edits.

pub mod backends;
pub mod color;
pub mod error;
pub mod io;
pub mod metrics;
pub mod pipeline;
pub mod raster;
pub mod refine;
pub mod synth;

pub use error::{BackendError, LoadError, RasterError, SynthError};
pub use raster::{
    blend, composite, unblend, AlphaPlane, Dims, Layer, LayerSequence, Mask, RasterImage,
    UNBLEND_EPSILON,
};
