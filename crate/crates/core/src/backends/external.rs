use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::{Command, Stdio};
use std::thread;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::BackendError;
use crate::raster::{AlphaPlane, Mask, RasterImage};

use super::protocol::{self, Mode};
use super::{InpaintingBackend, MattingBackend};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExternalBackendConfig {
    pub executable: PathBuf,
    /// Extra command-line arguments passed before any data is exchanged.
    #[serde(default)]
    pub args: Vec<String>,
    pub mode: Mode,
    pub timeout_secs: f64,
}

impl ExternalBackendConfig {
    pub fn new(executable: impl Into<PathBuf>, mode: Mode) -> Self {
        Self {
            executable: executable.into(),
            args: Vec::new(),
            mode,
            timeout_secs: 60.0,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(self.timeout_secs > 0.0) {
            return Err("timeout must be positive".into());
        }
        Ok(())
    }
}

/// A backend living in another process, one process per call.
#[derive(Debug, Clone)]
pub struct ExternalBackend {
    pub config: ExternalBackendConfig,
}

impl ExternalBackend {
    pub fn new(config: ExternalBackendConfig) -> Self {
        Self { config }
    }

    /// Spawns the process, feeds it `request` and returns its full stdout.
    pub fn exchange(&self, request: Vec<u8>) -> Result<Vec<u8>, BackendError> {
        let cfg = &self.config;
        let mut child = Command::new(&cfg.executable)
            .args(&cfg.args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::piped())
            .spawn()
            .map_err(|source| BackendError::Spawn {
                path: cfg.executable.clone(),
                source,
            })?;

        let mut stdin = child.stdin.take().expect("piped stdin");
        let writer = thread::spawn(move || {
            // A backend may exit without reading everything; that shows up as
            // a nonzero exit or a malformed response instead.
            let _ = stdin.write_all(&request);
        });
        let mut stdout = child.stdout.take().expect("piped stdout");
        let reader = thread::spawn(move || {
            let mut buf = Vec::new();
            let _ = stdout.read_to_end(&mut buf);
            buf
        });
        let mut stderr = child.stderr.take().expect("piped stderr");
        let err_reader = thread::spawn(move || {
            let mut buf = String::new();
            let _ = stderr.read_to_string(&mut buf);
            buf
        });

        let deadline = Instant::now() + Duration::from_secs_f64(cfg.timeout_secs);
        let status = loop {
            match child.try_wait() {
                Ok(Some(status)) => break status,
                Ok(None) if Instant::now() >= deadline => {
                    let _ = child.kill();
                    let _ = child.wait();
                    return Err(BackendError::Timeout(cfg.timeout_secs));
                }
                Ok(None) => thread::sleep(Duration::from_millis(2)),
                Err(source) => {
                    return Err(BackendError::Spawn {
                        path: cfg.executable.clone(),
                        source,
                    })
                }
            }
        };
        let _ = writer.join();
        let out = reader.join().unwrap_or_default();
        let err = err_reader.join().unwrap_or_default();
        if !status.success() {
            return Err(BackendError::NonZeroExit {
                code: status.code(),
                stderr: err.trim().to_string(),
            });
        }
        Ok(out)
    }

    fn expect_mode(&self, mode: Mode) -> Result<(), BackendError> {
        if self.config.mode != mode {
            return Err(BackendError::InvalidInput(format!(
                "backend configured for {:?}, called for {mode:?}",
                self.config.mode
            )));
        }
        Ok(())
    }
}

impl MattingBackend for ExternalBackend {
    fn matte(&mut self, image: &RasterImage) -> Result<AlphaPlane, BackendError> {
        self.expect_mode(Mode::Matting)?;
        let bytes = self.exchange(protocol::encode_request(image, None))?;
        protocol::decode_alpha_response(&bytes, image.dims())
    }

    fn name(&self) -> String {
        format!("external:{}", self.config.executable.display())
    }
}

impl InpaintingBackend for ExternalBackend {
    /// Unmasked pixels of the response are replaced by the input so the
    /// 8-bit round trip cannot disturb them.
    fn inpaint(&mut self, image: &RasterImage, mask: &Mask) -> Result<RasterImage, BackendError> {
        self.expect_mode(Mode::Inpainting)?;
        image.dims().ensure_same(mask.dims())?;
        let bytes = self.exchange(protocol::encode_request(image, Some(mask)))?;
        let mut out = protocol::decode_image_response(&bytes, image.dims())?;
        for (i, px) in out.pixels_mut().iter_mut().enumerate() {
            if !mask.at(i) {
                *px = image.pixels()[i];
            }
        }
        Ok(out)
    }

    fn name(&self) -> String {
        format!("external:{}", self.config.executable.display())
    }
}
