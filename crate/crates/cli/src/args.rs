use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "vibsim", version, about = "Qubit-encoded molecular vibrations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Lowest levels of the encoded vibrational Hamiltonian (CSV).
    Spectrum(SpectrumArgs),
    /// UVCC ansatz optimised by gradient descent (JSON).
    Vqe(VqeArgs),
    /// Mean-field product state (JSON).
    Vscf(VscfArgs),
    /// Trotterized expectation values over time (CSV).
    Dynamics(DynamicsArgs),
    /// Franck-Condon factors between two surfaces (CSV).
    FranckCondon(FranckCondonArgs),
    /// Qubit counts for a molecule of a given size (JSON).
    EncodeInfo(EncodeInfoArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    Direct,
    Compact,
}

impl SchemeArg {
    pub fn name(self) -> &'static str {
        match self {
            SchemeArg::Direct => "direct",
            SchemeArg::Compact => "compact",
        }
    }
}

#[derive(Debug, Args)]
pub struct SystemArgs {
    /// Force-field JSON path, or a bundled name (`h2o`, `so2`).
    #[arg(long)]
    pub ff: String,
    /// Levels kept per mode.
    #[arg(long, default_value_t = 4)]
    pub d: usize,
    #[arg(long, value_enum, default_value_t = SchemeArg::Compact)]
    pub scheme: SchemeArg,
    /// Highest force-field order kept (2, 3 or 4).
    #[arg(long, default_value_t = 4)]
    pub order: usize,
    /// Drop the constant zero-point term.
    #[arg(long)]
    pub no_zero_point: bool,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output file; standard output when absent.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    /// Number of levels to report (all encoded states by default).
    #[arg(long)]
    pub levels: Option<usize>,
    /// Report energies in cm^-1.
    #[arg(long)]
    pub cm1: bool,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReferenceArg {
    Harmonic,
    Vscf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OrderingArg {
    Canonical,
    Reversed,
}

#[derive(Debug, Args)]
pub struct VqeArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    /// Excitation rank (1 singles, 2 singles and doubles).
    #[arg(long, default_value_t = 2)]
    pub rank: usize,
    #[arg(long, default_value_t = 0.1)]
    pub step: f64,
    #[arg(long, default_value_t = 2000)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 1e-4)]
    pub grad_eps: f64,
    /// Half width of the random initial parameters.
    #[arg(long, default_value_t = 0.01)]
    pub perturbation: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Keep every step (no halving on an energy increase).
    #[arg(long)]
    pub pure_gd: bool,
    #[arg(long, value_enum, default_value_t = ReferenceArg::Harmonic)]
    pub reference: ReferenceArg,
    #[arg(long, value_enum, default_value_t = OrderingArg::Canonical)]
    pub ordering: OrderingArg,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct VscfArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, default_value_t = 200)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 0.0)]
    pub damping: f64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct DynamicsArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    /// Final time (atomic units).
    #[arg(long)]
    pub time: f64,
    /// Number of equally spaced sample times, including zero.
    #[arg(long, default_value_t = 101)]
    pub points: usize,
    /// Trotter steps per unit time.
    #[arg(long, default_value_t = 1.0)]
    pub steps_per_unit: f64,
    /// Initial occupations, comma separated (ground state by default).
    #[arg(long, value_delimiter = ',')]
    pub initial: Option<Vec<usize>>,
    /// JSON square matrix of localized modes in terms of normal modes.
    #[arg(long)]
    pub localize: Option<PathBuf>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Dense,
    Trotter,
}

#[derive(Debug, Args)]
pub struct FranckCondonArgs {
    /// Initial-state force field (path or bundled name).
    #[arg(long)]
    pub ff_initial: String,
    /// Final-state force field (path or bundled name).
    #[arg(long)]
    pub ff_final: String,
    /// JSON file `{"U": [[..]], "d": [..]}`.
    #[arg(long)]
    pub duschinsky: PathBuf,
    #[arg(long, default_value_t = 8)]
    pub d: usize,
    #[arg(long, value_enum, default_value_t = SchemeArg::Compact)]
    pub scheme: SchemeArg,
    #[arg(long, value_enum, default_value_t = MethodArg::Dense)]
    pub method: MethodArg,
    #[arg(long, default_value_t = 64)]
    pub trotter_steps: usize,
    /// Squeeze reference frequency (geometric mean of all frequencies by default).
    #[arg(long)]
    pub omega_ref: Option<f64>,
    /// Initial states with at most this many total quanta.
    #[arg(long, default_value_t = 0)]
    pub max_initial_quanta: usize,
    /// Sample a SWAP test with this many shots instead of exact overlaps.
    #[arg(long)]
    pub shots: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct EncodeInfoArgs {
    #[arg(long)]
    pub atoms: usize,
    #[arg(long)]
    pub d: usize,
    /// Linear molecule (3N - 5 modes).
    #[arg(long)]
    pub linear: bool,
    #[command(flatten)]
    pub out: OutputArgs,
}
