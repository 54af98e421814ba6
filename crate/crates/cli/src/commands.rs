use std::fs;
use std::path::{Path, PathBuf};

use layerpeel::backends::{
    ExternalBackend, ExternalBackendConfig, HarmonicInpainting, HeuristicMatting,
    HeuristicMattingConfig, InpaintingBackend, MattingBackend, Mode, NoInpainting, OracleSource,
};
use layerpeel::io::{
    read_rgb_image, read_sequence, write_gray_png, write_rgb_png, write_rgba_png,
    write_sequence_with_meta, SequenceMeta,
};
use layerpeel::metrics::{evaluate as run_evaluate, DistanceConfig, EvalConfig, OcclusionRule};
use layerpeel::pipeline::{decompose as run_decompose, DecompositionTrace, PipelineConfig};
use layerpeel::synth::{generate, make_matting_pairs, write_pairs, DesignSpec};
use layerpeel::{LayerSequence, RasterImage};
use serde::Serialize;
use serde_json::json;

use crate::args::{edge_model, CompositeArgs, DecomposeArgs, EvaluateArgs, Format, SynthArgs};
use crate::preview::contact_sheet;
use crate::resize::{resize_area, target_dims};
use crate::CliError;

const TOOL: &str = "layerpeel";
const VERSION: &str = env!("CARGO_PKG_VERSION");

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    write_text(path, &text)
}

fn create_dir(path: &Path) -> Result<(), CliError> {
    fs::create_dir_all(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

enum Source {
    Image(RasterImage),
    Sequence(LayerSequence),
}

fn read_input(path: &Path) -> Result<Source, CliError> {
    if path.is_dir() {
        Ok(Source::Sequence(read_sequence(path)?))
    } else if path.exists() {
        Ok(Source::Image(read_rgb_image(path)?))
    } else {
        Err(CliError::Io(format!("{}: no such file", path.display())))
    }
}

fn external(spec: &str) -> Option<PathBuf> {
    spec.strip_prefix("external:").map(PathBuf::from)
}

fn matting_backend(
    a: &DecomposeArgs,
    truth: Option<&LayerSequence>,
) -> Result<Box<dyn MattingBackend>, CliError> {
    match a.backend.as_str() {
        "oracle" => {
            let truth = truth.ok_or_else(|| {
                CliError::Config("oracle backend needs --truth or a layer directory as input".into())
            })?;
            Ok(Box::new(OracleSource::new(truth)))
        }
        "heuristic" => {
            let config = HeuristicMattingConfig {
                quantization_step: a.heuristic.quantization_step,
                min_region_area: a.heuristic.min_region_area,
            };
            config.validate().map_err(CliError::Config)?;
            Ok(Box::new(HeuristicMatting { config }))
        }
        other => match external(other) {
            Some(path) => Ok(Box::new(external_backend(path, Mode::Matting, a.timeout)?)),
            None => Err(CliError::Config(format!("unknown matting backend {other:?}"))),
        },
    }
}

fn inpainting_backend(a: &DecomposeArgs) -> Result<Box<dyn InpaintingBackend>, CliError> {
    match a.inpaint.as_str() {
        "harmonic" => Ok(Box::new(HarmonicInpainting::default())),
        "none" => Ok(Box::new(NoInpainting)),
        other => match external(other) {
            Some(path) => Ok(Box::new(external_backend(path, Mode::Inpainting, a.timeout)?)),
            None => Err(CliError::Config(format!("unknown inpainting backend {other:?}"))),
        },
    }
}

fn external_backend(path: PathBuf, mode: Mode, timeout: f64) -> Result<ExternalBackend, CliError> {
    if !path.exists() {
        return Err(CliError::Io(format!("{}: backend executable not found", path.display())));
    }
    let config = ExternalBackendConfig {
        timeout_secs: timeout,
        ..ExternalBackendConfig::new(path, mode)
    };
    config.validate().map_err(CliError::Config)?;
    Ok(ExternalBackend::new(config))
}

fn pipeline_config(a: &DecomposeArgs) -> Result<PipelineConfig, CliError> {
    let p = &a.pipeline;
    let config = PipelineConfig {
        max_iterations: p.max_iterations,
        termination_alpha: p.termination_alpha,
        termination_fraction: p.termination_fraction,
        inpaint_dilation: p.inpaint_dilation,
        refine_foreground: !p.no_refine_fg,
        refine_background: !p.no_refine_bg,
        refine: p.refine.config(),
    };
    config.validate().map_err(CliError::Config)?;
    Ok(config)
}

fn write_trace(trace: &DecompositionTrace, dir: &Path) -> Result<(), CliError> {
    create_dir(dir)?;
    for (i, r) in trace.iterations.iter().enumerate() {
        let m = i + 1;
        write_gray_png(&r.raw_alpha, &dir.join(format!("iter_{m}_raw_alpha.png")))?;
        write_gray_png(&r.refined_alpha, &dir.join(format!("iter_{m}_alpha.png")))?;
        write_gray_png(&r.mask.to_alpha(), &dir.join(format!("iter_{m}_mask.png")))?;
        write_rgb_png(&r.inpainted, &dir.join(format!("iter_{m}_inpainted.png")))?;
        write_rgb_png(&r.backdrop, &dir.join(format!("iter_{m}_backdrop.png")))?;
        write_rgba_png(&r.layer, &dir.join(format!("iter_{m}_layer.png")))?;
    }
    write_json(
        &dir.join("trace.json"),
        &json!({ "iterations": trace.iterations.len(), "termination": trace.termination }),
    )
}

pub fn decompose(a: &DecomposeArgs) -> Result<(), CliError> {
    let config = pipeline_config(a)?;
    let (mut image, mut truth) = match read_input(&a.input)? {
        Source::Image(img) => (img, None),
        Source::Sequence(seq) => (seq.composite(), Some(seq)),
    };
    if let Some(path) = &a.truth {
        truth = Some(read_sequence(path)?);
    }
    if let Some(t) = &truth {
        if t.dims() != image.dims() {
            return Err(CliError::Config("ground truth canvas differs from the input".into()));
        }
    }

    let original = image.dims();
    let mut resized_from = None;
    if let Some(target) = a.resize_short_side.and_then(|s| target_dims(original, s)) {
        if a.backend == "oracle" {
            return Err(CliError::Config("--resize-short-side cannot be combined with the oracle backend".into()));
        }
        image = resize_area(&image, target);
        resized_from = Some((original.width, original.height));
    }

    let matting = matting_backend(a, truth.as_ref())?;
    let inpainting = inpainting_backend(a)?;
    let run = json!({
        "tool": TOOL,
        "version": VERSION,
        "command": "decompose",
        "input": a.input,
        "truth": a.truth,
        "backend": a.backend,
        "inpaint": a.inpaint,
        "timeout": a.timeout,
        "resize_short_side": a.resize_short_side,
        "heuristic": { "quantization_step": a.heuristic.quantization_step, "min_region_area": a.heuristic.min_region_area },
        "pipeline": config,
    });

    create_dir(&a.out)?;
    let result = run_decompose(&image, &config, matting, inpainting);
    let out = match result {
        Ok(out) => out,
        Err(e) => {
            write_trace(&e.trace, &a.out.join("trace"))?;
            return Err(CliError::Backend(e.to_string()));
        }
    };
    let meta = SequenceMeta {
        generator: Some(format!("{TOOL} {VERSION} decompose")),
        seed: None,
        names: (0..out.sequence.len())
            .map(|z| Some(if z == 0 { "background".to_string() } else { format!("layer-{z}") }))
            .collect(),
        resized_from,
    };
    write_sequence_with_meta(&out.sequence, &a.out, &meta)?;
    write_trace(&out.trace, &a.out.join("trace"))?;
    write_rgb_png(&contact_sheet(&image, &out.sequence), &a.out.join("preview.png"))?;
    let mut run = run;
    run["layers"] = json!(out.sequence.len());
    run["termination"] = json!(out.trace.termination);
    write_json(&a.out.join("run.json"), &run)
}

pub fn evaluate(a: &EvaluateArgs) -> Result<(), CliError> {
    let distance = DistanceConfig {
        alpha_weight: a.alpha_weight,
        color_weight: a.color_weight,
    };
    distance.validate().map_err(CliError::Config)?;
    let config = EvalConfig {
        distance,
        occlusion: if a.strict_occlusion { OcclusionRule::strict() } else { OcclusionRule::default() },
        hard_iou: a.hard_iou,
    };
    let pred = read_sequence(&a.pred)?;
    let gt = read_sequence(&a.gt)?;
    if pred.dims() != gt.dims() {
        return Err(CliError::Config(format!(
            "canvas mismatch: prediction is {}x{}, ground truth is {}x{}",
            pred.dims().width,
            pred.dims().height,
            gt.dims().width,
            gt.dims().height
        )));
    }
    let report = run_evaluate(&pred, &gt, a.max_edits, &config).map_err(|e| CliError::Config(e.to_string()))?;
    let text = match a.format {
        Format::Text => report.to_text(),
        Format::Structured => report.to_json(),
    };
    match &a.out {
        Some(path) => write_text(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn synth(a: &SynthArgs) -> Result<(), CliError> {
    let base = DesignSpec {
        seed: a.seed,
        width: a.width,
        height: a.height,
        layer_count_range: (a.min_layers, a.max_layers),
        shapes: a.shapes.iter().map(|&s| s.into()).collect(),
        palette_size: a.palette_size,
        overlap_mode: a.overlap.into(),
        background: a.background.into(),
        edge: edge_model(a.antialias),
    };
    base.validate().map_err(|e| CliError::Config(e.to_string()))?;
    create_dir(&a.out)?;
    for i in 0..a.count {
        let spec = base.clone().with_seed(a.seed.wrapping_add(i as u64));
        let design = generate(&spec).map_err(|e| CliError::Config(e.to_string()))?;
        let dir = a.out.join(format!("design_{i:03}"));
        let meta = SequenceMeta {
            generator: Some(format!("{TOOL} {VERSION} synth")),
            seed: Some(spec.seed),
            names: design.names.iter().cloned().map(Some).collect(),
            resized_from: None,
        };
        write_sequence_with_meta(&design.sequence, &dir, &meta)?;
        if a.pairs {
            let mut fill = HarmonicInpainting::default();
            let backend: Option<&mut dyn InpaintingBackend> =
                if a.pairs_inpaint { Some(&mut fill) } else { None };
            let pairs = make_matting_pairs(&design.sequence, backend)
                .map_err(|e| CliError::Backend(e.to_string()))?;
            write_pairs(&pairs, &dir.join("pairs"))?;
        }
    }
    write_json(
        &a.out.join("run.json"),
        &json!({
            "tool": TOOL,
            "version": VERSION,
            "command": "synth",
            "count": a.count,
            "spec": base,
            "pairs": a.pairs,
            "pairs_inpaint": a.pairs_inpaint,
        }),
    )
}

pub fn composite(a: &CompositeArgs) -> Result<(), CliError> {
    let seq = read_sequence(&a.dir)?;
    if let Some(parent) = a.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        create_dir(parent)?;
    }
    write_rgb_png(&seq.composite(), &a.out)?;
    Ok(())
}
