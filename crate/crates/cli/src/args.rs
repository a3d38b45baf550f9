use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "cyclochron",
    version,
    about = "Particles as clocks: periods, ticks, phase fingerprints and recurrences",
    allow_negative_numbers = true
)]
pub struct Cli {
    /// TOML file overriding `h`, `c` and/or `electronvolt`.
    #[arg(long, global = true, value_name = "PATH")]
    pub constants: Option<PathBuf>,

    /// Particle table CSV (`name,mass_ev,charge,spin`); the built-in table otherwise.
    #[arg(long, global = true, value_name = "PATH")]
    pub particles: Option<PathBuf>,

    /// Output format. `simulate` defaults to csv, everything else to json.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Internal clock of a particle: Compton period, four-momentum, four-periodicity.
    Clock(ClockArgs),
    /// Count completed cycles of a clock over an interval.
    Ticks(TicksArgs),
    /// Encode an instant as a phase fingerprint, or decode a fingerprint back to instants.
    Decode(DecodeArgs),
    /// First return of an ensemble to its initial fingerprint.
    Recurrence(RecurrenceArgs),
    /// Run a scenario of clocks and interaction events.
    Simulate(SimulateArgs),
    /// Recover period switches from a sampled phase history.
    Detect(DetectArgs),
    /// Harmonic spectrum of a particle, optionally with a sampled phase density.
    Spectrum(SpectrumArgs),
    /// Compare the winding-sum and mode-sum propagators on a grid.
    VerifyPropagator(PropagatorArgs),
    /// Periodic or ergodic ensemble; cyclic, ergodic or chaotic scenario.
    Classify(ClassifyArgs),
}

#[derive(Debug, Args)]
pub struct MotionArgs {
    /// Velocity in units of c, `x,y,z`.
    #[arg(
        allow_hyphen_values = true,
        long,
        value_delimiter = ',',
        conflicts_with = "gamma"
    )]
    pub beta: Option<Vec<f64>>,

    /// Lorentz factor; the motion is along `--direction`.
    #[arg(long)]
    pub gamma: Option<f64>,

    /// Direction for `--gamma` (and for photons), `x,y,z`.
    #[arg(allow_hyphen_values = true, long, value_delimiter = ',')]
    pub direction: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct ClockArgs {
    pub particle: String,

    #[command(flatten)]
    pub motion: MotionArgs,

    /// Further active boost applied to the resulting state, `x,y,z`.
    #[arg(allow_hyphen_values = true, long, value_delimiter = ',')]
    pub boost: Option<Vec<f64>>,

    /// Also report the phase-harmony residual after this many seconds.
    #[arg(allow_hyphen_values = true, long)]
    pub t: Option<f64>,

    /// Photon energy in eV (massless particles only).
    #[arg(long)]
    pub energy: Option<f64>,
}

#[derive(Debug, Args)]
pub struct TicksArgs {
    /// Clock period in seconds.
    #[arg(
        long,
        conflicts_with = "particle",
        required_unless_present = "particle"
    )]
    pub period: Option<f64>,

    /// Use the internal clock of this particle.
    #[arg(long)]
    pub particle: Option<String>,

    #[command(flatten)]
    pub motion: MotionArgs,

    #[arg(allow_hyphen_values = true, long, default_value_t = 0.0)]
    pub from: f64,

    #[arg(allow_hyphen_values = true, long)]
    pub to: f64,

    /// Initial phase in cycles, `[0, 1)`.
    #[arg(long, default_value_t = 0.0)]
    pub phase0: f64,
}

#[derive(Debug, Args)]
pub struct EnsembleArgs {
    /// Clock periods in seconds; `p/q` fractions are accepted.
    #[arg(long, value_delimiter = ',', required = true)]
    pub periods: Vec<String>,

    /// Treat periods (and phases) as exact rationals.
    #[arg(long)]
    pub exact: bool,
}

#[derive(Debug, Args)]
pub struct DecodeArgs {
    #[command(flatten)]
    pub ensemble: EnsembleArgs,

    /// Observed phases in cycles, one per clock.
    #[arg(
        allow_hyphen_values = true,
        long,
        value_delimiter = ',',
        conflicts_with = "at",
        required_unless_present = "at"
    )]
    pub phases: Option<Vec<String>>,

    /// Encode: print the fingerprint at this instant instead of decoding.
    #[arg(allow_hyphen_values = true, long)]
    pub at: Option<String>,

    /// Search window `lo,hi` (half-open), seconds.
    #[arg(allow_hyphen_values = true, long, value_delimiter = ',')]
    pub window: Option<Vec<f64>>,

    /// Phase tolerance in cycles.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,

    /// Flip the helicity of these clocks (0-based indices, or `all`).
    #[arg(long, value_delimiter = ',')]
    pub invert: Option<Vec<String>>,
}

#[derive(Debug, Args)]
pub struct RecurrenceArgs {
    #[command(flatten)]
    pub ensemble: EnsembleArgs,

    /// Return radius in cycles.
    #[arg(long)]
    pub epsilon: f64,

    /// Give up after this many seconds.
    #[arg(long)]
    pub horizon: Option<f64>,

    /// Also report the distinguishability gap over a window of this length.
    #[arg(long)]
    pub gap_window: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Scenario JSON file.
    pub scenario: PathBuf,

    /// End of the sampled history, seconds.
    #[arg(long, required_unless_present = "causal_order")]
    pub until: Option<f64>,

    /// Sampling step, seconds.
    #[arg(long, required_unless_present = "causal_order")]
    pub sample: Option<f64>,

    /// Report per-clock event arrival order instead of a phase history.
    #[arg(long)]
    pub causal_order: bool,
}

#[derive(Debug, Args)]
pub struct DetectArgs {
    /// CSV phase history with a `t` column and one column per clock.
    pub history: PathBuf,

    /// Only analyse this clock.
    #[arg(long)]
    pub clock: Option<String>,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    pub particle: String,

    /// Highest harmonic.
    #[arg(long, default_value_t = 5)]
    pub n: u32,

    #[command(flatten)]
    pub motion: MotionArgs,

    /// Also sample the phase density of the particle clock.
    #[arg(long)]
    pub density: bool,

    /// Sampling step for `--density`, seconds.
    #[arg(long, default_value_t = 1e-15)]
    pub step: f64,

    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,

    #[arg(long, default_value_t = 50)]
    pub bins: usize,
}

#[derive(Debug, Args)]
pub struct PropagatorArgs {
    /// Circumference.
    #[arg(long = "L", default_value_t = 1.0)]
    pub circumference: f64,

    /// Mass.
    #[arg(long = "m", default_value_t = 1.0)]
    pub mass: f64,

    /// Imaginary time.
    #[arg(long, default_value_t = 0.1)]
    pub beta: f64,

    /// Largest accepted relative difference.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,

    /// Grid points per axis.
    #[arg(long, default_value_t = 32)]
    pub grid: usize,

    /// Series truncation tolerance.
    #[arg(long, default_value_t = cyclochron_core::quantum::DEFAULT_TRUNCATION_TOLERANCE)]
    pub truncation: f64,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    /// Clock periods in seconds; `p/q` fractions are accepted.
    #[arg(
        long,
        value_delimiter = ',',
        conflicts_with = "scenario",
        required_unless_present = "scenario"
    )]
    pub periods: Option<Vec<String>>,

    #[arg(long)]
    pub exact: bool,

    /// Relative tolerance when rationalizing float period ratios.
    #[arg(long, default_value_t = cyclochron_core::relational_time::DEFAULT_RATIONALIZATION_TOLERANCE)]
    pub tol: f64,

    /// Classify a scenario file (cyclic, ergodic or chaotic).
    #[arg(long)]
    pub scenario: Option<PathBuf>,
}
