use std::path::PathBuf;

use layerpeel::backends::protocol::Mode;
use layerpeel::backends::{
    check_inpainting, check_matting, ExternalBackend, ExternalBackendConfig, HarmonicInpainting,
    HeuristicMatting, InpaintingBackend, MattingBackend, NoInpainting, OracleSource,
};
use layerpeel::io::{quantize_sequence, write_sequence};
use layerpeel::pipeline::{decompose, PipelineConfig};
use layerpeel::synth::{generate_design, DesignSpec};
use layerpeel::{BackendError, Dims, Mask, RasterImage};

fn stub(args: &[&str], mode: Mode) -> ExternalBackend {
    let mut cfg = ExternalBackendConfig::new(PathBuf::from(env!("CARGO_BIN_EXE_ldbk_stub")), mode);
    cfg.args = args.iter().map(|s| s.to_string()).collect();
    cfg.timeout_secs = 10.0;
    ExternalBackend::new(cfg)
}

fn probe() -> (RasterImage, Mask) {
    let dims = Dims::new(40, 32);
    let image = RasterImage::from_fn(dims, |x, y| {
        if x > 6 && x < 13 && y > 3 && y < 10 {
            [0.9, 0.2, 0.2]
        } else {
            [x as f32 / 40.0, 0.8, (y % 2) as f32]
        }
    });
    let mask = Mask::from_fn(dims, |x, y| x > 5 && x < 14 && y > 2 && y < 11);
    (image, mask)
}

fn matting_backends() -> Vec<Box<dyn MattingBackend>> {
    let truth = generate_design(&DesignSpec { width: 40, height: 32, ..DesignSpec::default() }).unwrap();
    vec![
        Box::new(HeuristicMatting::default()),
        Box::new(OracleSource::new(&truth)),
        Box::new(stub(&["identity"], Mode::Matting)),
    ]
}

fn inpainting_backends() -> Vec<Box<dyn InpaintingBackend>> {
    vec![
        Box::new(NoInpainting),
        Box::new(HarmonicInpainting::default()),
        Box::new(stub(&["identity"], Mode::Inpainting)),
    ]
}

#[test]
fn every_builtin_backend_honors_the_contract() {
    let (image, mask) = probe();
    let quantized = layerpeel::io::quantize_image(&image);
    for mut b in matting_backends() {
        let alpha = b.matte(&quantized).unwrap();
        check_matting(&quantized, &alpha).unwrap_or_else(|e| panic!("{}: {e}", b.name()));
    }
    for mut b in inpainting_backends() {
        let out = b.inpaint(&quantized, &mask).unwrap();
        check_inpainting(&quantized, &mask, &out).unwrap_or_else(|e| panic!("{}: {e}", b.name()));
    }
}

#[test]
fn identity_stub_behaves_like_no_inpainting() {
    let (image, mask) = probe();
    let image = layerpeel::io::quantize_image(&image);
    let a = stub(&["identity"], Mode::Inpainting).inpaint(&image, &mask).unwrap();
    let b = NoInpainting.inpaint(&image, &mask).unwrap();
    assert_eq!(a, b);
}

#[test]
fn protocol_failures_map_to_errors() {
    let (image, mask) = probe();
    assert!(matches!(
        stub(&["wrong-dims"], Mode::Inpainting).inpaint(&image, &mask),
        Err(BackendError::MalformedOutput(_))
    ));
    assert!(matches!(
        stub(&["wrong-dims"], Mode::Matting).matte(&image),
        Err(BackendError::MalformedOutput(_))
    ));
    assert!(matches!(
        stub(&["fail"], Mode::Matting).matte(&image),
        Err(BackendError::NonZeroExit { code: Some(3), .. })
    ));
    let mut slow = stub(&["sleep", "5"], Mode::Matting);
    slow.config.timeout_secs = 0.3;
    assert!(matches!(slow.matte(&image), Err(BackendError::Timeout(_))));
    let missing = ExternalBackend::new(ExternalBackendConfig::new("/nonexistent/backend", Mode::Matting));
    assert!(matches!(missing.clone().matte(&image), Err(BackendError::Spawn { .. })));
}

#[test]
fn oracle_sidecar_matches_in_process_oracle() {
    let truth = generate_design(&DesignSpec { seed: 4, width: 48, height: 40, ..DesignSpec::default() }).unwrap();
    let truth = quantize_sequence(&truth);
    let dir = tempfile::tempdir().unwrap();
    let seq_dir = dir.path().join("truth");
    write_sequence(&truth, &seq_dir).unwrap();
    let counter = dir.path().join("calls");
    let image = truth.composite();
    let config = PipelineConfig::default();

    let local = decompose(&image, &config, OracleSource::new(&truth), HarmonicInpainting::default()).unwrap();
    let remote_matting = stub(
        &["oracle", seq_dir.to_str().unwrap(), counter.to_str().unwrap()],
        Mode::Matting,
    );
    let remote = decompose(&image, &config, remote_matting, HarmonicInpainting::default()).unwrap();
    assert_eq!(local.sequence, remote.sequence);
    assert_eq!(local.trace.termination, remote.trace.termination);
}
