//! Test double for the external backend protocol.
//!
//! Usage: `ldbk_stub <behavior> [args…]`, request on stdin, response on stdout.
//!
//! * `identity` – inpainting returns the input, matting returns zeros
//! * `wrong-dims` – answers with a canvas one pixel wider
//! * `oracle <sequence-dir> <counter-file>` – matting answers with the next
//!   visibility group of a stored layer sequence
//! * `sleep <seconds>` – sleeps, then behaves like `identity`
//! * `fail` – exits with status 3

use std::io::{Read, Write};
use std::path::Path;
use std::process::ExitCode;

use layerpeel::backends::protocol::{self, Mode};
use layerpeel::backends::{oracle_matting, OracleSource};
use layerpeel::io::read_sequence;
use layerpeel::{AlphaPlane, Dims, RasterImage};

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let mut input = Vec::new();
    if std::io::stdin().read_to_end(&mut input).is_err() {
        return ExitCode::from(2);
    }
    match run(&args, &input) {
        Ok(bytes) => {
            let mut out = std::io::stdout().lock();
            if out.write_all(&bytes).and_then(|_| out.flush()).is_err() {
                return ExitCode::from(2);
            }
            ExitCode::SUCCESS
        }
        Err((code, msg)) => {
            eprintln!("{msg}");
            ExitCode::from(code)
        }
    }
}

fn identity(req: &protocol::Request) -> Vec<u8> {
    match req.mode {
        Mode::Matting => protocol::encode_alpha_response(&AlphaPlane::zeros(req.image.dims())),
        Mode::Inpainting => protocol::encode_image_response(&req.image),
    }
}

fn run(args: &[String], input: &[u8]) -> Result<Vec<u8>, (u8, String)> {
    let req = protocol::decode_request(input).map_err(|e| (2, e.to_string()))?;
    let behavior = args.first().map(String::as_str).unwrap_or("identity");
    match behavior {
        "identity" => Ok(identity(&req)),
        "wrong-dims" => {
            let d = req.image.dims();
            let wider = RasterImage::filled(Dims::new(d.width + 1, d.height), [0.0; 3]);
            Ok(match req.mode {
                Mode::Matting => protocol::encode_alpha_response(&AlphaPlane::zeros(wider.dims())),
                Mode::Inpainting => protocol::encode_image_response(&wider),
            })
        }
        "sleep" => {
            let secs: f64 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(10.0);
            std::thread::sleep(std::time::Duration::from_secs_f64(secs));
            Ok(identity(&req))
        }
        "fail" => Err((3, "stub asked to fail".into())),
        "oracle" => {
            let (Some(dir), Some(counter)) = (args.get(1), args.get(2)) else {
                return Err((2, "oracle needs <sequence-dir> <counter-file>".into()));
            };
            let seq = read_sequence(Path::new(dir)).map_err(|e| (2, e.to_string()))?;
            let calls: usize = std::fs::read_to_string(counter)
                .ok()
                .and_then(|s| s.trim().parse().ok())
                .unwrap_or(0);
            let mut source = OracleSource::new(&seq);
            let mut alpha = AlphaPlane::zeros(req.image.dims());
            for _ in 0..=calls {
                alpha = oracle_matting(&mut source, &req.image).map_err(|e| (2, e.to_string()))?;
            }
            std::fs::write(counter, format!("{}\n", calls + 1)).map_err(|e| (2, e.to_string()))?;
            Ok(protocol::encode_alpha_response(&alpha))
        }
        other => Err((2, format!("unknown behavior {other}"))),
    }
}
