//! `retina`: generate, analyze and render center-surround depthwise kernels.

mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "retina", version, about = "Center-surround kernels for depthwise convolutions")]
pub struct Cli {
    /// TOML file with [generate], [analyze] and [render] tables; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a DoG initialization bank.
    Generate(GenerateArgs),
    /// Cluster kernels into on-center, off-center and other patterns.
    Analyze(AnalyzeArgs),
    /// Draw kernel grids or proportion histograms.
    Render(RenderArgs),
    /// Run the built-in property checks.
    Selfcheck(SelfcheckArgs),
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Kernel side length (odd, >= 3).
    #[arg(long)]
    pub size: Option<usize>,
    /// Number of kernels (depthwise channels).
    #[arg(long)]
    pub channels: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub gamma_min: Option<f64>,
    #[arg(long)]
    pub gamma_max: Option<f64>,
    /// both | on | off
    #[arg(long)]
    pub polarity: Option<String>,
    /// f32 | f64
    #[arg(long)]
    pub dtype: Option<String>,
    /// Output tensor, shape [channels, 1, size, size].
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output manifest JSON.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// JSON list of {"name", "channels", "kernel_size"} for multi-layer generation.
    #[arg(long, conflicts_with_all = ["out", "manifest", "channels", "size"])]
    pub layers: Option<PathBuf>,
    /// Directory for per-layer files when --layers is given.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Kernel tensor(s), shape [N, K, K] or [N, 1, K, K]. Repeatable.
    #[arg(long = "in")]
    pub inputs: Vec<PathBuf>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Cluster each input separately instead of pooling them.
    #[arg(long)]
    pub per_layer: bool,
    /// Model tag for the CSV row (defaults to the input file stem).
    #[arg(long)]
    pub tag: Option<String>,
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    /// Kernel tensor to tile.
    #[arg(long = "in", conflicts_with = "report")]
    pub input: Option<PathBuf>,
    /// Cluster report whose cluster averages are tiled.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Grid image output (PNG for diverging, PGM for gray).
    #[arg(long)]
    pub grid: Option<PathBuf>,
    #[arg(long)]
    pub columns: Option<usize>,
    /// Cell size in pixels.
    #[arg(long)]
    pub cell: Option<usize>,
    /// diverging | gray
    #[arg(long)]
    pub colormap: Option<String>,
    /// per-kernel | global
    #[arg(long)]
    pub normalize: Option<String>,
    /// Proportion CSV to chart.
    #[arg(long)]
    pub proportions: Option<PathBuf>,
    /// SVG histogram output.
    #[arg(long)]
    pub hist: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SelfcheckArgs {
    /// Print results as JSON.
    #[arg(long)]
    pub json: bool,
    /// Test hook: run the checks against a deliberately broken build.
    #[arg(long, hide = true)]
    pub inject_fault: Option<String>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { error::code::USAGE } else { 0 });
        }
    };
    match commands::run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("retina: {e}");
            ExitCode::from(e.code)
        }
    }
}
