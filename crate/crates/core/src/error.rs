use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RasterError {
    #[error("dimension mismatch: expected {expected:?}, got {actual:?}")]
    DimensionMismatch {
        expected: (usize, usize),
        actual: (usize, usize),
    },
    #[error("buffer holds {actual} pixels, canvas needs {expected}")]
    BufferLength { expected: usize, actual: usize },
    #[error("sample {index} is {value}, outside [0, 1]")]
    SampleOutOfRange { index: usize, value: f32 },
    #[error("canvas must be at least 1x1")]
    EmptyCanvas,
    #[error("layer sequence is empty")]
    EmptySequence,
}

/// Failures reading or writing a layer-sequence directory.
#[derive(Debug, Error)]
pub enum LoadError {
    #[error("missing manifest at {0}")]
    MissingManifest(PathBuf),
    #[error("malformed manifest: {0}")]
    Manifest(String),
    #[error("layer count mismatch: manifest lists {listed} layers, {found} image files present")]
    LayerCountMismatch { listed: usize, found: usize },
    #[error("z values must be a contiguous run 0..K, got {0:?}")]
    NonContiguousZ(Vec<i64>),
    #[error("layer {file} is {actual:?}, canvas is {expected:?}")]
    CanvasMismatch {
        file: String,
        expected: (usize, usize),
        actual: (usize, usize),
    },
    #[error("corrupt image {path}: {message}")]
    CorruptImage { path: PathBuf, message: String },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Raster(#[from] RasterError),
}

impl LoadError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        LoadError::Io {
            path: path.into(),
            source,
        }
    }
}

/// Failures raised by matting or inpainting backends.
#[derive(Debug, Error)]
pub enum BackendError {
    #[error("backend timed out after {0:.1}s")]
    Timeout(f64),
    #[error("backend exited with status {code:?}: {stderr}")]
    NonZeroExit { code: Option<i32>, stderr: String },
    #[error("malformed output: {0}")]
    MalformedOutput(String),
    #[error("failed to launch backend {path}: {source}")]
    Spawn {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("backend contract violated: {0}")]
    Contract(String),
    #[error("invalid backend input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Raster(#[from] RasterError),
}

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("invalid design spec: {0}")]
    InvalidSpec(String),
    #[error("could not place {wanted} layers without violating overlap rules after {attempts} attempts")]
    Infeasible { wanted: usize, attempts: usize },
    #[error(transparent)]
    Backend(#[from] BackendError),
    #[error(transparent)]
    Raster(#[from] RasterError),
}
