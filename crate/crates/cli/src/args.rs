use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "lozenge", version, about = "Random lozenge tilings of sawtooth domains, HCIZ expansions and their GUE limit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw uniformly random bead arrays for a spec and write them as CSV.
    Sample(SampleArgs),
    /// Render a bead array as an SVG lozenge tiling.
    Render(RenderArgs),
    /// Run one of the built-in verifications; exit 0 iff every comparison passes.
    Verify(VerifyArgs),
    /// Compare rescaled beads on thread k against GUE eigenvalues.
    GueCompare(GueCompareArgs),
    /// Tabulate monotone and classical Hurwitz walk counts.
    Hurwitz(HurwitzArgs),
    /// Extract exact HCIZ log-series coefficients C_N(alpha, beta).
    Coeffs(CoeffsArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Exact,
    Glauber,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Check {
    KeyProp,
    Theorem2,
    CumulantIdentity,
    SamplerExactness,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    /// Spec file: {"N": int, "top": [strictly decreasing ints]}.
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Method::Exact)]
    pub method: Method,
    /// Glauber proposals per replicate [default: 10 N^3].
    #[arg(long)]
    pub glauber_steps: Option<u64>,
    /// CSV destination [default: stdout].
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write one SVG per sample next to --out.
    #[arg(long)]
    pub render: bool,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    /// Bead array as JSON rows, row 1 first: [[b11], [b21, b22], ...].
    #[arg(long)]
    pub pattern: PathBuf,
    /// SVG destination [default: stdout].
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write the tile list as JSON.
    #[arg(long)]
    pub tiles: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub which: Check,
    /// Spec file for key-prop [default: top row 2(N-1), ..., 2, 0].
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// Rank N (key-prop, theorem2) or largest random rank (sampler-exactness).
    #[arg(long)]
    pub n: Option<usize>,
    /// Thread for key-prop [default: every k <= N].
    #[arg(long)]
    pub k: Option<usize>,
    /// Degree for theorem2, largest degree for cumulant-identity.
    #[arg(long)]
    pub d: Option<u32>,
    #[arg(long, default_value_t = 3)]
    pub g_max: u32,
    /// Random moment vectors (cumulant-identity) or chi-square draws (sampler-exactness).
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Working precision in decimal digits for key-prop.
    #[arg(long, default_value_t = 30)]
    pub precision: u32,
    /// Absolute error bound for theorem2, relative bound for key-prop.
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Hurwitz table cache (JSON), read before and written after theorem2.
    #[arg(long)]
    pub cache: Option<PathBuf>,
    /// Report destination [default: stdout].
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GueCompareArgs {
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Method::Exact)]
    pub method: Method,
    #[arg(long)]
    pub glauber_steps: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct HurwitzArgs {
    /// Largest degree.
    #[arg(long)]
    pub d: u32,
    /// Largest number of steps.
    #[arg(long)]
    pub r: u32,
    #[arg(long)]
    pub cache: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CoeffsArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub d: u32,
    #[arg(long)]
    pub out: Option<PathBuf>,
}
