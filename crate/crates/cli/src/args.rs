use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "qklab", version, about = "Numerical experiments for rotational Q_k-translators")]
pub struct Cli {
    /// Directory for artifacts.
    #[arg(long, global = true, env = "QKLAB_OUTPUT_DIR", default_value = ".")]
    pub output_dir: PathBuf,

    /// Format of tabular artifacts; reports are always JSON.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Also write a gnuplot script next to each CSV profile.
    #[arg(long, global = true)]
    pub plot_script: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Integrate the profile ODE from the axis.
    Solve(SolveArgs),
    /// Fixed-point iteration on the window [0, δ].
    Picard(PicardArgs),
    /// Cross-check the curvature routes on random jets.
    Verify(VerifyArgs),
    /// Grid checks of the barrier inequalities and the sandwich.
    Barriers(BarrierArgs),
    /// First-touch demonstration against a convex candidate.
    Tangency(TangencyArgs),
    /// `solve` over a range of (n, k) in parallel.
    Sweep(SweepArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Solve(_) => "solve",
            Command::Picard(_) => "picard",
            Command::Verify(_) => "verify",
            Command::Barriers(_) => "barriers",
            Command::Tangency(_) => "tangency",
            Command::Sweep(_) => "sweep",
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Tolerances {
    #[arg(long, default_value_t = 1e-10)]
    pub rel_tol: f64,
    #[arg(long, default_value_t = 1e-12)]
    pub abs_tol: f64,
    /// Seed radius next to the axis.
    #[arg(long, default_value_t = 1e-6)]
    pub r_start: f64,
    /// Integration stops here if no blow-up is seen.
    #[arg(long, default_value_t = 4.0)]
    pub r_max: f64,
    /// Slope magnitude treated as blow-up.
    #[arg(long, default_value_t = 1e8)]
    pub v_blowup: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SolveArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    /// Write the profile on a uniform grid with this spacing instead of at
    /// the solver's steps.
    #[arg(long)]
    pub spacing: Option<f64>,
    #[command(flatten)]
    pub tol: Tolerances,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Policy {
    Enforce,
    Monitor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Start {
    /// `max(√r, min(n r, tan(nr)))`.
    Default,
    /// `n r`.
    Linear,
    /// The shooting solution sampled on the grid.
    Shooting,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PicardArgs {
    #[arg(long)]
    pub n: usize,
    /// Grid intervals (even, at least 512).
    #[arg(long, default_value_t = 1024)]
    pub nodes: usize,
    #[arg(long, value_enum, default_value_t = Policy::Enforce)]
    pub policy: Policy,
    #[arg(long, value_enum, default_value_t = Start::Default)]
    pub start: Start,
    #[arg(long, default_value_t = 1e-13)]
    pub tol: f64,
    #[arg(long, default_value_t = 200)]
    pub max_iter: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct VerifyArgs {
    #[arg(long)]
    pub n: usize,
    /// Random jets per k.
    #[arg(long, default_value_t = 500)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Allowed disagreement between routes.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BarrierArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 10_000)]
    pub points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Candidate {
    /// The k = 0 profile from the axis.
    Bowl,
    /// `c r²`.
    Paraboloid,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TangencyArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = Candidate::Bowl)]
    pub candidate: Candidate,
    /// Coefficient `c` of the paraboloid candidate.
    #[arg(long, default_value_t = 5.0)]
    pub curvature: f64,
    /// Outer radius of the candidate.
    #[arg(long, default_value_t = 2.0)]
    pub radius: f64,
    /// Samples of the paraboloid candidate.
    #[arg(long, default_value_t = 4000)]
    pub samples: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SweepArgs {
    #[arg(long, default_value_t = 2)]
    pub n_min: usize,
    #[arg(long, default_value_t = 6)]
    pub n_max: usize,
    /// Only k = n - 1 instead of every 0 <= k <= n - 1.
    #[arg(long)]
    pub extremal_only: bool,
    #[command(flatten)]
    pub tol: Tolerances,
}
