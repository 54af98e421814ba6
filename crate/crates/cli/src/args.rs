use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use layerpeel::refine::{PaletteSource, RefineConfig};
use layerpeel::synth::{BackgroundKind, EdgeModel, OverlapMode, ShapeKind};

#[derive(Debug, Parser)]
#[command(name = "layerpeel", version, about = "Peel raster graphic designs into RGBA layers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decompose an image (or the composite of a layer directory) into layers.
    Decompose(DecomposeArgs),
    /// Score a predicted layer directory against a ground-truth one.
    Evaluate(EvaluateArgs),
    /// Write seeded synthetic designs as layer directories.
    Synth(SynthArgs),
    /// Render a layer directory to a single image.
    Composite(CompositeArgs),
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    /// PNG image, or a layer-sequence directory whose composite is decomposed.
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// `oracle`, `heuristic` or `external:<path>`.
    #[arg(long, default_value = "heuristic")]
    pub backend: String,
    /// Ground-truth layer directory for the oracle backend (defaults to the
    /// input when it is a directory).
    #[arg(long)]
    pub truth: Option<PathBuf>,
    /// `harmonic`, `none` or `external:<path>`.
    #[arg(long, default_value = "harmonic")]
    pub inpaint: String,
    /// Seconds an external backend may run per call.
    #[arg(long, default_value_t = 60.0)]
    pub timeout: f64,
    /// Downscale (area averaging) so the shorter side is at most this many pixels.
    #[arg(long)]
    pub resize_short_side: Option<usize>,
    #[command(flatten)]
    pub pipeline: PipelineArgs,
    #[command(flatten)]
    pub heuristic: HeuristicArgs,
}

#[derive(Debug, Args)]
pub struct PipelineArgs {
    #[arg(long = "max-iters", default_value_t = 3)]
    pub max_iterations: usize,
    #[arg(long, default_value_t = 0.5)]
    pub termination_alpha: f32,
    #[arg(long, default_value_t = 5e-4)]
    pub termination_fraction: f64,
    #[arg(long, default_value_t = 3)]
    pub inpaint_dilation: usize,
    #[arg(long)]
    pub no_refine_fg: bool,
    #[arg(long)]
    pub no_refine_bg: bool,
    #[command(flatten)]
    pub refine: RefineArgs,
}

#[derive(Debug, Args)]
pub struct RefineArgs {
    #[arg(long, default_value_t = RefineConfig::default().fg_max_colors)]
    pub fg_max_colors: usize,
    #[arg(long, default_value_t = RefineConfig::default().bg_max_colors)]
    pub bg_max_colors: usize,
    #[arg(long, default_value_t = RefineConfig::default().flatness_threshold)]
    pub flatness_threshold: f64,
    #[arg(long, default_value_t = RefineConfig::default().gradient_epsilon)]
    pub gradient_epsilon: f32,
    #[arg(long, default_value_t = RefineConfig::default().overlap_threshold)]
    pub overlap_threshold: f64,
    #[arg(long, default_value_t = RefineConfig::default().ring_width)]
    pub ring_width: usize,
    #[arg(long, default_value_t = RefineConfig::default().palette_match_radius)]
    pub palette_match_radius: f64,
    #[arg(long, default_value_t = RefineConfig::default().soften_residual)]
    pub soften_residual: f64,
    #[arg(long, default_value_t = RefineConfig::default().percentile_coverage)]
    pub percentile_coverage: f64,
    #[arg(long, value_enum, default_value_t = SourceArg::Current)]
    pub palette_source: SourceArg,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SourceArg {
    Current,
    Original,
}

impl RefineArgs {
    pub fn config(&self) -> RefineConfig {
        RefineConfig {
            fg_max_colors: self.fg_max_colors,
            bg_max_colors: self.bg_max_colors,
            flatness_threshold: self.flatness_threshold,
            gradient_epsilon: self.gradient_epsilon,
            overlap_threshold: self.overlap_threshold,
            ring_width: self.ring_width,
            palette_match_radius: self.palette_match_radius,
            soften_residual: self.soften_residual,
            percentile_coverage: self.percentile_coverage,
            palette_source: match self.palette_source {
                SourceArg::Current => PaletteSource::Current,
                SourceArg::Original => PaletteSource::Original,
            },
        }
    }
}

#[derive(Debug, Args)]
pub struct HeuristicArgs {
    #[arg(long, default_value_t = 4.0 / 255.0)]
    pub quantization_step: f32,
    #[arg(long, default_value_t = 16)]
    pub min_region_area: usize,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    pub pred: PathBuf,
    pub gt: PathBuf,
    #[arg(long, default_value_t = 5)]
    pub max_edits: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 0.5)]
    pub alpha_weight: f64,
    #[arg(long, default_value_t = 0.5)]
    pub color_weight: f64,
    /// Occlusion test on alpha > 0 instead of alpha > 0.5.
    #[arg(long)]
    pub strict_occlusion: bool,
    /// Report IoU of alphas binarized at 0.5.
    #[arg(long)]
    pub hard_iou: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Structured,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub count: usize,
    #[arg(long, default_value_t = 128)]
    pub width: usize,
    #[arg(long, default_value_t = 128)]
    pub height: usize,
    #[arg(long, default_value_t = 3)]
    pub min_layers: usize,
    #[arg(long, default_value_t = 5)]
    pub max_layers: usize,
    #[arg(long, value_delimiter = ',', value_enum, default_values_t = [ShapeArg::Rect, ShapeArg::Ellipse, ShapeArg::Ring, ShapeArg::Bar, ShapeArg::GlyphBlob])]
    pub shapes: Vec<ShapeArg>,
    #[arg(long, default_value_t = 8)]
    pub palette_size: usize,
    #[arg(long, value_enum, default_value_t = OverlapArg::Mixed)]
    pub overlap: OverlapArg,
    #[arg(long, value_enum, default_value_t = BackgroundArg::Flat)]
    pub background: BackgroundArg,
    #[arg(long)]
    pub antialias: bool,
    /// Also write matting training pairs under `<design>/pairs/`.
    #[arg(long)]
    pub pairs: bool,
    /// Add inpainted-input pairs completed with the harmonic fill.
    #[arg(long, requires = "pairs")]
    pub pairs_inpaint: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ShapeArg {
    Rect,
    Ellipse,
    Ring,
    Bar,
    GlyphBlob,
}

impl From<ShapeArg> for ShapeKind {
    fn from(s: ShapeArg) -> Self {
        match s {
            ShapeArg::Rect => ShapeKind::Rect,
            ShapeArg::Ellipse => ShapeKind::Ellipse,
            ShapeArg::Ring => ShapeKind::Ring,
            ShapeArg::Bar => ShapeKind::Bar,
            ShapeArg::GlyphBlob => ShapeKind::GlyphBlob,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum OverlapArg {
    Disjoint,
    Stacked,
    Mixed,
}

impl From<OverlapArg> for OverlapMode {
    fn from(o: OverlapArg) -> Self {
        match o {
            OverlapArg::Disjoint => OverlapMode::Disjoint,
            OverlapArg::Stacked => OverlapMode::Stacked,
            OverlapArg::Mixed => OverlapMode::Mixed,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum BackgroundArg {
    Flat,
    TwoTone,
    LinearGradient,
}

impl From<BackgroundArg> for BackgroundKind {
    fn from(b: BackgroundArg) -> Self {
        match b {
            BackgroundArg::Flat => BackgroundKind::Flat,
            BackgroundArg::TwoTone => BackgroundKind::TwoTone,
            BackgroundArg::LinearGradient => BackgroundKind::LinearGradient,
        }
    }
}

pub fn edge_model(antialias: bool) -> EdgeModel {
    if antialias {
        EdgeModel::Antialiased
    } else {
        EdgeModel::Hard
    }
}

#[derive(Debug, Args)]
pub struct CompositeArgs {
    pub dir: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}
