//! Wire format spoken with external backend processes.
//!
//! Every message starts with a 16-byte header: the magic `LDBK`, a version
//! byte, a mode byte (0 matting, 1 inpainting), width and height as
//! little-endian `u32`, and two reserved zero bytes. A request carries the
//! image as row-major RGBA8 and, for inpainting, a row-major mask byte per
//! pixel (nonzero = fill). A response carries an alpha byte per pixel
//! (matting) or RGB8 (inpainting).

use crate::error::BackendError;
use crate::io::{from_u8, to_u8};
use crate::raster::{AlphaPlane, Dims, Mask, RasterImage};

pub const MAGIC: &[u8; 4] = b"LDBK";
pub const VERSION: u8 = 1;
pub const HEADER_LEN: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Matting,
    Inpainting,
}

impl Mode {
    fn byte(self) -> u8 {
        match self {
            Mode::Matting => 0,
            Mode::Inpainting => 1,
        }
    }

    fn from_byte(b: u8) -> Option<Self> {
        match b {
            0 => Some(Mode::Matting),
            1 => Some(Mode::Inpainting),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Header {
    pub mode: Mode,
    pub dims: Dims,
}

pub fn encode_header(header: Header) -> [u8; HEADER_LEN] {
    let mut h = [0u8; HEADER_LEN];
    h[..4].copy_from_slice(MAGIC);
    h[4] = VERSION;
    h[5] = header.mode.byte();
    h[6..10].copy_from_slice(&(header.dims.width as u32).to_le_bytes());
    h[10..14].copy_from_slice(&(header.dims.height as u32).to_le_bytes());
    h
}

pub fn decode_header(bytes: &[u8]) -> Result<Header, BackendError> {
    let bad = |m: &str| BackendError::MalformedOutput(m.to_string());
    if bytes.len() < HEADER_LEN {
        return Err(bad("message shorter than the header"));
    }
    if &bytes[..4] != MAGIC {
        return Err(bad("bad magic"));
    }
    if bytes[4] != VERSION {
        return Err(BackendError::MalformedOutput(format!("unsupported version {}", bytes[4])));
    }
    let mode = Mode::from_byte(bytes[5]).ok_or_else(|| bad("unknown mode"))?;
    let width = u32::from_le_bytes(bytes[6..10].try_into().unwrap()) as usize;
    let height = u32::from_le_bytes(bytes[10..14].try_into().unwrap()) as usize;
    if width == 0 || height == 0 {
        return Err(bad("zero-sized canvas"));
    }
    Ok(Header {
        mode,
        dims: Dims::new(width, height),
    })
}

pub fn encode_request(image: &RasterImage, mask: Option<&Mask>) -> Vec<u8> {
    let dims = image.dims();
    let mode = if mask.is_some() { Mode::Inpainting } else { Mode::Matting };
    let mut out = Vec::with_capacity(HEADER_LEN + dims.len() * 5);
    out.extend_from_slice(&encode_header(Header { mode, dims }));
    for c in image.pixels() {
        out.extend_from_slice(&[to_u8(c[0]), to_u8(c[1]), to_u8(c[2]), 255]);
    }
    if let Some(mask) = mask {
        out.extend(mask.bits().iter().map(|&b| if b { 255 } else { 0 }));
    }
    out
}

/// Parsed request, as seen by a backend process.
#[derive(Debug, Clone)]
pub struct Request {
    pub mode: Mode,
    pub image: RasterImage,
    pub mask: Option<Mask>,
}

pub fn decode_request(bytes: &[u8]) -> Result<Request, BackendError> {
    let header = decode_header(bytes)?;
    let n = header.dims.len();
    let body = &bytes[HEADER_LEN..];
    let need = match header.mode {
        Mode::Matting => n * 4,
        Mode::Inpainting => n * 5,
    };
    if body.len() != need {
        return Err(BackendError::MalformedOutput(format!(
            "request body is {} bytes, expected {need}",
            body.len()
        )));
    }
    let pixels = body[..n * 4]
        .chunks_exact(4)
        .map(|p| [from_u8(p[0]), from_u8(p[1]), from_u8(p[2])])
        .collect();
    let image = RasterImage::new(header.dims, pixels)?;
    let mask = match header.mode {
        Mode::Matting => None,
        Mode::Inpainting => Some(Mask::new(
            header.dims,
            body[n * 4..].iter().map(|&b| b != 0).collect(),
        )?),
    };
    Ok(Request {
        mode: header.mode,
        image,
        mask,
    })
}

pub fn encode_alpha_response(alpha: &AlphaPlane) -> Vec<u8> {
    let mut out = encode_header(Header {
        mode: Mode::Matting,
        dims: alpha.dims(),
    })
    .to_vec();
    out.extend(alpha.values().iter().map(|&v| to_u8(v)));
    out
}

pub fn encode_image_response(image: &RasterImage) -> Vec<u8> {
    let mut out = encode_header(Header {
        mode: Mode::Inpainting,
        dims: image.dims(),
    })
    .to_vec();
    for c in image.pixels() {
        out.extend(c.iter().map(|&v| to_u8(v)));
    }
    out
}

fn expect_header(bytes: &[u8], mode: Mode, dims: Dims) -> Result<&[u8], BackendError> {
    let header = decode_header(bytes)?;
    if header.mode != mode {
        return Err(BackendError::MalformedOutput(format!(
            "response mode {:?}, expected {mode:?}",
            header.mode
        )));
    }
    if header.dims != dims {
        return Err(BackendError::MalformedOutput(format!(
            "response is {}x{}, expected {}x{}",
            header.dims.width, header.dims.height, dims.width, dims.height
        )));
    }
    let body = &bytes[HEADER_LEN..];
    let need = dims.len() * if mode == Mode::Matting { 1 } else { 3 };
    if body.len() != need {
        return Err(BackendError::MalformedOutput(format!(
            "response body is {} bytes, expected {need}",
            body.len()
        )));
    }
    Ok(body)
}

pub fn decode_alpha_response(bytes: &[u8], dims: Dims) -> Result<AlphaPlane, BackendError> {
    let body = expect_header(bytes, Mode::Matting, dims)?;
    Ok(AlphaPlane::new(dims, body.iter().map(|&b| from_u8(b)).collect())?)
}

pub fn decode_image_response(bytes: &[u8], dims: Dims) -> Result<RasterImage, BackendError> {
    let body = expect_header(bytes, Mode::Inpainting, dims)?;
    let pixels = body
        .chunks_exact(3)
        .map(|p| [from_u8(p[0]), from_u8(p[1]), from_u8(p[2])])
        .collect();
    Ok(RasterImage::new(dims, pixels)?)
}
