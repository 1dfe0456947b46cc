//! `hvlab`: runs hidden-variable experiments and writes plot-ready tables.

mod commands;
mod config;
mod error;
mod expr;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hvlab::algebra::SwapRegime;
use hvlab::bell::SamplingSemantics;
use hvlab::hv::Discipline;
use hvlab::BellState;

use crate::config::{AngleValue, Settings};

#[derive(Debug, Parser)]
#[command(name = "hvlab", version, about = "Hidden-variable Bell, Malus and Hong-Ou-Mandel experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct Common {
    /// Seed of the random streams. Required except for `accept`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Read the seed from HVLAB_SEED when --seed is absent.
    #[arg(long, global = true)]
    allow_env_seed: bool,
    /// Concurrent partitions; defaults to the available cores.
    #[arg(long, global = true)]
    partitions: Option<usize>,
    /// TOML settings file or a manifest from an earlier run. Flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file; the table goes to stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Write JSON instead of CSV.
    #[arg(long, global = true)]
    json: bool,
    /// Manifest path; defaults to `<out>.manifest.toml` when --out is set.
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    /// Intervals per point (draws for `gram`).
    #[arg(long, global = true)]
    n: Option<u64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Coincidence table of the vector model, at one setting or over a Δ grid.
    Bell(BellArgs),
    /// CHSH statistic for the vector model, its naive control and the Boolean model.
    Chsh(ChshArgs),
    /// Two-analyzer transmission of a single beam.
    Malus(MalusArgs),
    /// Coincidence table of the Boolean comparator model.
    Boolean(BooleanArgs),
    /// Averaged inner products of the four Bell vectors.
    Gram(GramArgs),
    /// Beam-splitter outputs and the Ψ⁻ classifier.
    Hom(HomArgs),
    /// Coefficient report of the four-party swapping identity.
    Swap(SwapArgs),
    /// Runs the acceptance suite.
    Accept(AcceptArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Bell(_) => "bell",
            Command::Chsh(_) => "chsh",
            Command::Malus(_) => "malus",
            Command::Boolean(_) => "boolean",
            Command::Gram(_) => "gram",
            Command::Hom(_) => "hom",
            Command::Swap(_) => "swap",
            Command::Accept(_) => "accept",
        }
    }

    fn settings(&self) -> Settings {
        let angle = |a: Option<f64>| a.map(AngleValue::Radians);
        match self {
            Command::Bell(a) => Settings {
                state: a.state,
                semantics: a.semantics,
                discipline: a.discipline,
                alpha: angle(a.angles.alpha),
                beta: angle(a.angles.beta),
                delta_grid: a.angles.delta_grid.clone(),
                ..a.generator.settings()
            },
            Command::Chsh(a) => Settings {
                state: a.state,
                discipline: a.discipline,
                a: angle(a.a),
                a_prime: angle(a.a_prime),
                b: angle(a.b),
                b_prime: angle(a.b_prime),
                ..a.generator.settings()
            },
            Command::Malus(a) => Settings {
                semantics: a.semantics,
                discipline: a.discipline,
                alpha: angle(a.angles.alpha),
                beta: angle(a.angles.beta),
                delta_grid: a.angles.delta_grid.clone(),
                ..a.generator.settings()
            },
            Command::Boolean(a) => Settings {
                state: a.state,
                alpha: angle(a.angles.alpha),
                beta: angle(a.angles.beta),
                delta_grid: a.angles.delta_grid.clone(),
                ..Settings::default()
            },
            Command::Gram(a) => Settings {
                modulus_lo: a.modulus_range.map(|r| r.0),
                modulus_hi: a.modulus_range.map(|r| r.1),
                ..Settings::default()
            },
            Command::Hom(a) => Settings {
                state: a.state,
                discipline: a.discipline,
                routing: a.no_routing.then_some(false),
                ..a.generator.settings()
            },
            Command::Swap(a) => Settings {
                regime: a.regime,
                draws: a.draws,
                ..Settings::default()
            },
            Command::Accept(a) => Settings {
                criteria: (!a.criteria.is_empty()).then(|| a.criteria.clone()),
                ..Settings::default()
            },
        }
    }
}

fn angle_arg(s: &str) -> Result<f64, String> {
    expr::parse_angle(s)
}

fn range_arg(s: &str) -> Result<(f64, f64), String> {
    expr::parse_range(s)
}

fn grid_arg(s: &str) -> Result<String, String> {
    expr::parse_grid(s).map(|_| s.to_owned())
}

fn state_arg(s: &str) -> Result<BellState, String> {
    s.parse().map_err(|e: hvlab::Error| e.to_string())
}

fn semantics_arg(s: &str) -> Result<SamplingSemantics, String> {
    s.parse().map_err(|e: hvlab::Error| e.to_string())
}

fn discipline_arg(s: &str) -> Result<Discipline, String> {
    match s {
        "accumulator" => Ok(Discipline::Accumulator),
        "bernoulli" => Ok(Discipline::Bernoulli),
        other => Err(format!("unknown discipline `{other}` (accumulator, bernoulli)")),
    }
}

fn regime_arg(s: &str) -> Result<SwapRegime, String> {
    s.parse().map_err(|e: hvlab::Error| e.to_string())
}

#[derive(Debug, Args)]
struct AngleArgs {
    /// Station-A analyzer angle: radians or an expression such as `pi/8`.
    #[arg(long, value_parser = angle_arg, allow_hyphen_values = true)]
    alpha: Option<f64>,
    /// Station-B analyzer angle (ignored with --delta-grid).
    #[arg(long, value_parser = angle_arg, allow_hyphen_values = true, conflicts_with = "delta_grid")]
    beta: Option<f64>,
    /// Sweep `start:end:step` of Δ = α − β, end inclusive.
    #[arg(long, value_parser = grid_arg, allow_hyphen_values = true)]
    delta_grid: Option<String>,
}

#[derive(Debug, Args)]
struct GeneratorArgs {
    /// Samples per interval.
    #[arg(long)]
    samples: Option<usize>,
    /// Harmonic waveform with this many cycles per interval.
    #[arg(long)]
    cycles: Option<u32>,
    /// Per-interval integral drawn uniformly from `lo:hi` (mean one).
    #[arg(long, value_parser = range_arg)]
    modulus_range: Option<(f64, f64)>,
}

impl GeneratorArgs {
    fn settings(&self) -> Settings {
        Settings {
            samples: self.samples,
            cycles: self.cycles,
            modulus_lo: self.modulus_range.map(|r| r.0),
            modulus_hi: self.modulus_range.map(|r| r.1),
            ..Settings::default()
        }
    }
}

#[derive(Debug, Args)]
struct BellArgs {
    #[arg(long, value_parser = state_arg)]
    state: Option<BellState>,
    /// `projection` or `naive-uniform`.
    #[arg(long, value_parser = semantics_arg)]
    semantics: Option<SamplingSemantics>,
    /// `accumulator` or `bernoulli`.
    #[arg(long, value_parser = discipline_arg)]
    discipline: Option<Discipline>,
    #[command(flatten)]
    angles: AngleArgs,
    #[command(flatten)]
    generator: GeneratorArgs,
}

#[derive(Debug, Args)]
struct ChshArgs {
    #[arg(long, value_parser = state_arg)]
    state: Option<BellState>,
    #[arg(long, value_parser = discipline_arg)]
    discipline: Option<Discipline>,
    /// Custom settings need all four of --a, --a-prime, --b, --b-prime.
    #[arg(long, value_parser = angle_arg, allow_hyphen_values = true, requires_all = ["a_prime", "b", "b_prime"])]
    a: Option<f64>,
    #[arg(long, value_parser = angle_arg, allow_hyphen_values = true, requires_all = ["a", "b", "b_prime"])]
    a_prime: Option<f64>,
    #[arg(long, value_parser = angle_arg, allow_hyphen_values = true, requires_all = ["a", "a_prime", "b_prime"])]
    b: Option<f64>,
    #[arg(long, value_parser = angle_arg, allow_hyphen_values = true, requires_all = ["a", "a_prime", "b"])]
    b_prime: Option<f64>,
    #[command(flatten)]
    generator: GeneratorArgs,
}

#[derive(Debug, Args)]
struct MalusArgs {
    #[arg(long, value_parser = semantics_arg)]
    semantics: Option<SamplingSemantics>,
    #[arg(long, value_parser = discipline_arg)]
    discipline: Option<Discipline>,
    #[command(flatten)]
    angles: AngleArgs,
    #[command(flatten)]
    generator: GeneratorArgs,
}

#[derive(Debug, Args)]
struct BooleanArgs {
    #[arg(long, value_parser = state_arg)]
    state: Option<BellState>,
    #[command(flatten)]
    angles: AngleArgs,
}

#[derive(Debug, Args)]
struct GramArgs {
    /// Squared modulus drawn uniformly from `lo:hi` (mean one).
    #[arg(long, value_parser = range_arg)]
    modulus_range: Option<(f64, f64)>,
}

#[derive(Debug, Args)]
struct HomArgs {
    /// Single state; all four when absent.
    #[arg(long, value_parser = state_arg)]
    state: Option<BellState>,
    #[arg(long, value_parser = discipline_arg)]
    discipline: Option<Discipline>,
    /// Leave the Φ⁻ and Ψ⁺ outputs unrouted.
    #[arg(long)]
    no_routing: bool,
    #[command(flatten)]
    generator: GeneratorArgs,
}

#[derive(Debug, Args)]
struct SwapArgs {
    /// `unconstrained`, `psi-minus-partner` or `shared-source`; all when absent.
    #[arg(long, value_parser = regime_arg)]
    regime: Option<SwapRegime>,
    /// Random draws per regime.
    #[arg(long)]
    draws: Option<usize>,
}

#[derive(Debug, Args)]
struct AcceptArgs {
    /// Comma-separated criterion numbers; all when absent.
    #[arg(long, value_delimiter = ',')]
    criteria: Vec<u8>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command.name(), cli.command.settings(), &cli.common) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("hvlab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
