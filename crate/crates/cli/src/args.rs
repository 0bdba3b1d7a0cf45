use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "finsler", version, about = "Batch front end for Finsler metric computations and rigidity checks")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Global {
    /// Icosahedral grid level (per-command default when omitted).
    #[arg(long, global = true)]
    pub grid_level: Option<u32>,
    /// Replace every residual tolerance of the report.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads for independent trajectories (0: all cores).
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a field configuration and write its canonical form.
    Build {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Holmes–Thompson volume of a field.
    Volume {
        #[arg(long)]
        field: PathBuf,
        /// `whole`, `box:lo1,lo2:hi1,hi2` or `ball:c1,c2:r`.
        #[arg(long, default_value = "whole")]
        region: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Trace a unit-speed geodesic and export it as CSV.
    Geodesic {
        #[arg(long)]
        field: PathBuf,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        x0: Vec<f64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        v0: Vec<f64>,
        #[arg(long = "T")]
        t: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a rigidity or integral-geometry check.
    Check {
        #[arg(value_enum)]
        kind: CheckKind,
        /// Field configuration; `density-rigidity` takes two.
        #[arg(long = "field", alias = "fields", num_args = 1..)]
        fields: Vec<PathBuf>,
        #[arg(long)]
        body: Option<PathBuf>,
        #[arg(long)]
        gauge: Option<PathBuf>,
        /// Curve for the Crofton check: `equator`, `latitude:<deg>`, `great_circle:x,y,z`.
        #[arg(long, default_value = "equator")]
        curve: String,
        /// Initial conditions for the reversibility check.
        #[arg(long, default_value_t = 8)]
        samples: usize,
        /// Arclength traced by the reversibility check.
        #[arg(long = "T", default_value_t = 1.0)]
        t: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Operations on convex bodies.
    Body {
        #[arg(value_enum)]
        op: BodyOp,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CheckKind {
    Zoll,
    Santalo,
    Crofton,
    Reversibility,
    RevPlusClosed,
    Chakerian,
    DensityRigidity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BodyOp {
    Blaschke,
    Polar,
    Symmetral,
    Brightness,
}
