use std::path::Path;
use std::process::{Command, Output};

use layerpeel::io::write_sequence;
use layerpeel::{Dims, Layer, LayerSequence, RasterImage};
use serde_json::Value;

fn layerpeel(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_layerpeel"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

#[test]
fn exit_codes_follow_failure_class() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(&layerpeel(d, &["decompose", "missing.png", "--out", "o"])), 2);
    assert_eq!(code(&layerpeel(d, &["evaluate", "nope", "nada"])), 2);
    assert_eq!(code(&layerpeel(d, &["synth", "--out", "s", "--min-layers", "5", "--max-layers", "3"])), 4);
    assert_eq!(code(&layerpeel(d, &["evaluate", "a", "b", "--format", "xml"])), 4);

    assert_eq!(code(&layerpeel(d, &["synth", "--out", "s", "--seed", "1", "--count", "1"])), 0);
    let design = "s/design_000";
    assert_eq!(
        code(&layerpeel(d, &["decompose", design, "--out", "o", "--backend", "external:/nonexistent/tool"])),
        2
    );
    assert_eq!(code(&layerpeel(d, &["decompose", design, "--out", "o", "--backend", "external:/bin/false"])), 3);
    assert_eq!(
        code(&layerpeel(d, &["decompose", design, "--out", "o", "--backend", "oracle", "--resize-short-side", "32"])),
        4
    );
    assert_eq!(code(&layerpeel(d, &["evaluate", design, design, "--alpha-weight", "0.9"])), 4);
}

#[test]
fn oracle_decomposition_writes_a_complete_run() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert!(layerpeel(d, &["synth", "--out", "s", "--seed", "3", "--count", "1", "--overlap", "stacked"]).status.success());
    let out = layerpeel(d, &["decompose", "s/design_000", "--out", "o", "--backend", "oracle"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["manifest.json", "layer_0.png", "preview.png", "run.json", "trace/trace.json"] {
        assert!(d.join("o").join(f).is_file(), "missing {f}");
    }
    let report = layerpeel(d, &["evaluate", "o", "s/design_000", "--format", "structured", "--max-edits", "2"]);
    assert!(report.status.success());
    let json: Value = serde_json::from_slice(&report.stdout).unwrap();
    let rows = json["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert!(rows[0]["alpha_soft_iou"].as_f64().unwrap() > 0.98);

    assert!(layerpeel(d, &["composite", "o", "--out", "flat.png"]).status.success());
    assert!(d.join("flat.png").is_file());
}

#[test]
fn text_report_has_one_row_per_budget() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert!(layerpeel(d, &["synth", "--out", "s", "--seed", "8", "--count", "2"]).status.success());
    let out = layerpeel(d, &["evaluate", "s/design_000", "s/design_001", "--max-edits", "4"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().next().unwrap().starts_with("# "));
    let rows: Vec<&str> = text.lines().filter(|l| l.starts_with("edits_allowed=")).collect();
    assert_eq!(rows.len(), 5);
    for (k, row) in rows.iter().enumerate() {
        assert!(row.starts_with(&format!("edits_allowed={k} ")));
        assert!(row.contains("rgb_l1=") && row.contains("alpha_soft_iou=") && row.contains("pair_count="));
    }
}

#[test]
fn seeded_synthesis_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    for out in ["a", "b"] {
        assert!(layerpeel(d, &["synth", "--out", out, "--seed", "42", "--count", "2", "--antialias", "--pairs"]).status.success());
    }
    let mut names: Vec<_> = walk(&d.join("a"));
    names.sort();
    assert!(!names.is_empty());
    for rel in names {
        assert_eq!(std::fs::read(d.join("a").join(&rel)).unwrap(), std::fs::read(d.join("b").join(&rel)).unwrap());
    }
}

fn walk(root: &Path) -> Vec<std::path::PathBuf> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(p) = stack.pop() {
        for e in std::fs::read_dir(&p).unwrap() {
            let path = e.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                out.push(path.strip_prefix(root).unwrap().to_path_buf());
            }
        }
    }
    out
}

/// Three stacked discs, each overlapping the one below; the prediction
/// fuses the lower two.
#[test]
fn one_merge_repairs_a_fused_prediction() {
    let dims = Dims::new(48, 24);
    let white = RasterImage::filled(dims, [1.0; 3]);
    let disc = |cx: f32, color: [f32; 3]| {
        Layer::from_fn(dims, move |x, y| {
            let (dx, dy) = (x as f32 - cx, y as f32 - 12.0);
            [color[0], color[1], color[2], if dx * dx + dy * dy < 64.0 { 1.0 } else { 0.0 }]
        })
    };
    let red = disc(12.0, [0.9, 0.1, 0.1]);
    let blue = disc(22.0, [0.1, 0.1, 0.9]);
    let green = disc(32.0, [0.1, 0.8, 0.2]);
    let fused = Layer::merge_over(&red, &blue).unwrap();
    let gt = LayerSequence::new(vec![Layer::opaque(&white), red, blue, green.clone()]).unwrap();
    let pred = LayerSequence::new(vec![Layer::opaque(&white), fused, green]).unwrap();

    let dir = tempfile::tempdir().unwrap();
    write_sequence(&gt, &dir.path().join("gt")).unwrap();
    write_sequence(&pred, &dir.path().join("pred")).unwrap();
    let run = |a: &str, b: &str| -> Value {
        let out = layerpeel(dir.path(), &["evaluate", a, b, "--format", "structured", "--max-edits", "1"]);
        assert!(out.status.success());
        serde_json::from_slice(&out.stdout).unwrap()
    };
    let fused_report = run("pred", "gt");
    let identical = run("gt", "gt");
    let iou = |v: &Value, k: usize| v["rows"][k]["alpha_soft_iou"].as_f64().unwrap();
    assert!(iou(&fused_report, 0) < 0.99);
    assert!((iou(&fused_report, 1) - iou(&identical, 0)).abs() < 1e-9);
    let row = &fused_report["rows"][1];
    assert_eq!(row["edits_used_pred"].as_u64().unwrap() + row["edits_used_gt"].as_u64().unwrap(), 1);
}

#[test]
fn heuristic_decomposition_recomposites_closely() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert!(layerpeel(d, &["synth", "--out", "s", "--seed", "5", "--count", "1", "--overlap", "disjoint"]).status.success());
    assert!(layerpeel(d, &["composite", "s/design_000", "--out", "in.png"]).status.success());
    let out = layerpeel(d, &["decompose", "in.png", "--out", "o", "--backend", "heuristic"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let input = layerpeel::io::read_rgb_image(&d.join("in.png")).unwrap();
    let seq = layerpeel::io::read_sequence(&d.join("o")).unwrap();
    assert!(seq.len() >= 2);
    assert!(seq.composite().mean_abs_diff(&input).unwrap() <= 0.02);

    assert!(layerpeel(d, &["decompose", "in.png", "--out", "one", "--max-iters", "1"]).status.success());
    assert!(layerpeel::io::read_sequence(&d.join("one")).unwrap().len() <= 2);
}
