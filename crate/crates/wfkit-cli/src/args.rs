//! Command-line surface. All randomized commands require an explicit
//! `--seed`; there is no ambient configuration.

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "wfkit", version, about = "Wireframe toolkit: codecs, samplers, metrics")]
pub struct Cli {
    /// Cap the evaluation worker pool (default: one worker per core).
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,

    /// Write a machine-readable run report to this path.
    #[arg(long, global = true, value_name = "PATH")]
    pub json_report: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Encode ground-truth junctions into likelihood/offset grids.
    Encode {
        #[arg(long = "in", value_name = "WIREFRAME")]
        input: PathBuf,
        /// Bin grid as HxW.
        #[arg(long, default_value = "128x128", value_parser = parse_bins)]
        bins: (usize, usize),
        #[arg(long, value_name = "TENSOR")]
        out_j: PathBuf,
        #[arg(long, value_name = "TENSOR")]
        out_o: PathBuf,
    },
    /// Decode likelihood/offset grids into top-K junction candidates.
    Decode {
        #[arg(long = "j", value_name = "TENSOR")]
        j: PathBuf,
        #[arg(long = "o", value_name = "TENSOR")]
        o: PathBuf,
        #[arg(long, default_value_t = 300)]
        k: usize,
        #[arg(long, value_name = "WIREFRAME")]
        out: PathBuf,
    },
    /// Draw static (and, given predictions, dynamic) line samples.
    Sample {
        #[arg(long, value_name = "WIREFRAME")]
        gt: PathBuf,
        /// Predicted junctions (a wireframe document; edges ignored).
        #[arg(long, value_name = "WIREFRAME")]
        pred: Option<PathBuf>,
        #[arg(long)]
        seed: u64,
        #[arg(long, value_name = "JSON")]
        out: PathBuf,
        #[command(flatten)]
        sampler: SamplerArgs,
    },
    /// Pool a line of interest over a feature map and print the vector.
    Loipool {
        #[arg(long, value_name = "TENSOR")]
        fm: PathBuf,
        /// Line as x1,y1,x2,y2 in feature-map coordinates.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        line: Vec<f64>,
        #[arg(long, default_value_t = 32)]
        np: usize,
        #[arg(long, default_value_t = 4)]
        stride: usize,
    },
    /// Dataset evaluation over ground-truth/prediction directories.
    #[command(subcommand)]
    Eval(EvalCommand),
    /// Remove overlapped lines from a scored wireframe.
    Postprocess {
        #[arg(long = "in", value_name = "WIREFRAME")]
        input: PathBuf,
        #[arg(long, value_name = "WIREFRAME")]
        out: PathBuf,
        #[arg(long, default_value_t = 0.01)]
        eta_s: f64,
    },
    /// Generate a deterministic synthetic scene.
    Synth {
        #[arg(long)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = LayoutArg::Grid)]
        layout: LayoutArg,
        #[arg(long, default_value_t = 16)]
        junctions: usize,
        /// Line count; defaults to the layout's full edge set.
        #[arg(long)]
        lines: Option<usize>,
        #[arg(long, default_value_t = 8.0)]
        min_length: f64,
        #[arg(long, value_name = "WIREFRAME")]
        out: PathBuf,
    },
    /// Apply a controlled degradation to a wireframe.
    Degrade {
        #[arg(long, value_enum)]
        mode: ModeArg,
        #[arg(long = "in", value_name = "WIREFRAME")]
        input: PathBuf,
        /// Jitter sigma in grid units, or the drop/duplicate fraction.
        #[arg(long, default_value_t = 0.0)]
        param: f64,
        #[arg(long)]
        seed: u64,
        #[arg(long, value_name = "WIREFRAME")]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
pub enum EvalCommand {
    /// Structural AP over vectorized lines.
    Sap {
        #[arg(long, value_delimiter = ',', default_values_t = [5.0, 10.0, 15.0])]
        theta: Vec<f64>,
        #[arg(long, value_name = "DIR")]
        gt: PathBuf,
        #[arg(long, value_name = "DIR")]
        pred: PathBuf,
        #[arg(long, value_name = "CSV")]
        pr_out: Option<PathBuf>,
    },
    /// Mean AP over vectorized junctions.
    Jmap {
        #[arg(long, value_delimiter = ',', default_values_t = [0.5, 1.0, 2.0])]
        tau: Vec<f64>,
        #[arg(long, value_name = "DIR")]
        gt: PathBuf,
        #[arg(long, value_name = "DIR")]
        pred: PathBuf,
        #[arg(long, value_name = "CSV")]
        pr_out: Option<PathBuf>,
    },
    /// Heat-map AP and F-score over rasterized lines.
    Aph {
        #[arg(long, value_name = "DIR")]
        gt: PathBuf,
        #[arg(long, value_name = "DIR")]
        pred: PathBuf,
        #[arg(long, default_value_t = 128)]
        resolution: usize,
        /// Pixel matching tolerance; default 0.0075 x map diagonal.
        #[arg(long)]
        tolerance: Option<f64>,
        #[arg(long, value_name = "CSV")]
        pr_out: Option<PathBuf>,
    },
}

#[derive(Args)]
pub struct SamplerArgs {
    #[arg(long, default_value_t = 300)]
    pub n_s_pos: usize,
    #[arg(long, default_value_t = 40)]
    pub n_s_neg: usize,
    #[arg(long, default_value_t = 300)]
    pub n_d_pos: usize,
    #[arg(long, default_value_t = 80)]
    pub n_d_neg: usize,
    #[arg(long, default_value_t = 600)]
    pub n_d_rand: usize,
    /// Junction match threshold in grid units.
    #[arg(long, default_value_t = 1.5)]
    pub eta: f64,
    #[arg(long, default_value_t = 2000)]
    pub hard_pool_size: usize,
    #[arg(long, default_value_t = 64)]
    pub raster_size: usize,
}

impl SamplerArgs {
    pub fn to_config(&self) -> wfkit::sampler::SamplerConfig {
        wfkit::sampler::SamplerConfig {
            n_s_pos: self.n_s_pos,
            n_s_neg: self.n_s_neg,
            n_d_pos: self.n_d_pos,
            n_d_neg: self.n_d_neg,
            n_d_rand: self.n_d_rand,
            eta: self.eta,
            hard_pool_size: self.hard_pool_size,
            raster_size: self.raster_size,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
pub enum LayoutArg {
    Grid,
    Boxes,
    Random,
}

impl From<LayoutArg> for wfkit::synth::Layout {
    fn from(a: LayoutArg) -> Self {
        match a {
            LayoutArg::Grid => wfkit::synth::Layout::Grid,
            LayoutArg::Boxes => wfkit::synth::Layout::Boxes,
            LayoutArg::Random => wfkit::synth::Layout::Random,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum ModeArg {
    SplitMidpoint,
    Duplicate,
    Jitter,
    Drop,
}

impl From<ModeArg> for wfkit::synth::DegradeMode {
    fn from(a: ModeArg) -> Self {
        match a {
            ModeArg::SplitMidpoint => wfkit::synth::DegradeMode::SplitMidpoint,
            ModeArg::Duplicate => wfkit::synth::DegradeMode::Duplicate,
            ModeArg::Jitter => wfkit::synth::DegradeMode::Jitter,
            ModeArg::Drop => wfkit::synth::DegradeMode::Drop,
        }
    }
}

fn parse_bins(s: &str) -> Result<(usize, usize), String> {
    let (h, w) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected HxW, got {s:?}"))?;
    let h: usize = h.trim().parse().map_err(|_| format!("bad bin height {h:?}"))?;
    let w: usize = w.trim().parse().map_err(|_| format!("bad bin width {w:?}"))?;
    if h == 0 || w == 0 {
        return Err("bins must be positive".into());
    }
    Ok((h, w))
}
