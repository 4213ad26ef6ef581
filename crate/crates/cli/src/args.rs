use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "twocenter", version, about = "Periods and rotation numbers of the planar two-center problem")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Write output here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    /// Relative tolerance of the period quadratures.
    #[arg(long, global = true)]
    pub rel_tol: Option<f64>,

    /// Refinement levels of the period quadratures.
    #[arg(long, global = true)]
    pub max_levels: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Period and rotation-number regions of a parameter point.
    Classify(PointArgs),
    /// Period `T_M` of one of the two separated motions.
    Period(PeriodArgs),
    /// Rotation number `W = T_{M₋}/T_{M₊}`.
    Rotation(RotationArgs),
    /// Periods and `W` along an `F̂₀` fiber.
    Scan(ScanArgs),
    /// Identity and monotonicity checks; exit 1 on violation.
    Verify {
        #[command(subcommand)]
        suite: Suite,
    },
    /// Direct orbit integration and measured periods.
    Oracle(OracleArgs),
}

/// Combined masses `M₊ = m₊ + m₋`, `M₋ = m₊ − m₋` plus either the physical
/// `(v₀, J₀, F₀)` or the normalized `(δ̂₀, F̂₀)` point.
#[derive(Debug, Clone, Args)]
pub struct PointArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub m_plus: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub m_minus: f64,
    /// Half the distance between the centers (default 1).
    #[arg(long)]
    pub v0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub j0: Option<f64>,
    #[arg(long = "f0-physical", allow_hyphen_values = true)]
    pub f0_physical: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub delta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub f: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Which {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Repr {
    Auto,
    Down,
    Up,
    Star,
    Circ,
    Jacobi,
}

#[derive(Debug, Clone, Args)]
pub struct PeriodArgs {
    #[command(flatten)]
    pub point: PointArgs,
    /// Which mass the period belongs to.
    #[arg(long, value_enum, default_value = "plus")]
    pub which: Which,
    #[arg(long, value_enum, default_value = "auto")]
    pub repr: Repr,
}

#[derive(Debug, Clone, Args)]
pub struct RotationArgs {
    #[command(flatten)]
    pub point: PointArgs,
    /// Use the extended regions instead of the physical band.
    #[arg(long)]
    pub extended: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ScanArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub m_plus: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub m_minus: f64,
    #[arg(long)]
    pub delta: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub f_min: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub f_max: f64,
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    /// Restrict `W` to the physical band.
    #[arg(long)]
    pub physical: bool,
    /// Width of the band around singular lines without derivative signs.
    #[arg(long, default_value_t = 1e-4)]
    pub exclusion: f64,
}

#[derive(Debug, Subcommand)]
pub enum Suite {
    /// Random instances of the complex elliptic-integral lemma.
    Lemma {
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Equality of the two Jacobi periods and `T_M` when `m₋ = 0`.
    Kepler {
        /// Grid size per axis.
        #[arg(long, default_value_t = 20)]
        n: usize,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// `T° = 2·Re T↓` on the triangle region.
    Corollary {
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Signs of `∂W/∂F̂₀` and `∂T/∂F̂₀` along a fiber.
    Monotonicity(ScanArgs),
}

#[derive(Debug, Clone, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub point: PointArgs,
    /// Oscillations of each coordinate to measure.
    #[arg(long, default_value_t = 10)]
    pub oscillations: usize,
    #[arg(long)]
    pub rtol: Option<f64>,
    /// Dump the trajectory as CSV.
    #[arg(long)]
    pub trajectory: Option<PathBuf>,
}
