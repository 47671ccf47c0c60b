//! `satfront`: critical speeds, wave profiles and vanishing-diffusion sweeps
//! for bistable reaction-diffusion equations with saturating diffusion.

mod commands;
mod config;
mod svg;

use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "satfront", version, about = "Traveling fronts with saturating diffusion")]
pub struct Cli {
    /// TOML file with reaction, flux, tolerances and output settings.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Directory for output files [default: config file, then
    /// $SATFRONT_OUT_DIR, then ./satfront-out].
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,

    /// Also write an SVG plot.
    #[arg(long, global = true)]
    pub plot: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Critical speed c* (bistable) or c⁺ (monostable).
    Speed(SpeedArgs),
    /// Front profiles, critical or at a given speed.
    Front(FrontArgs),
    /// Zero-speed steady state with a jump.
    Steady(SteadyArgs),
    /// Nonmonotone wave glued from alternating shots.
    Nonmonotone(NonmonotoneArgs),
    /// Front of the inviscid equation c v' = f(v).
    Inviscid(InviscidArgs),
    /// Vanishing-diffusion experiment along a grid of ε.
    Sweep(SweepArgs),
    /// A single reduced trajectory y(v).
    Trajectory(TrajectoryArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Bistable,
    Monostable,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum MonostableMethod {
    Linearized,
    RequireIpof,
    Shooting,
}

#[derive(Args, Debug)]
pub struct SpeedArgs {
    #[arg(long, value_enum)]
    pub kind: Family,
    #[arg(long, required = true, num_args = 1.., value_delimiter = ',')]
    pub eps: Vec<f64>,
    /// Bisection tolerance on the speed (relative for monostable shooting).
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, value_enum, default_value = "linearized")]
    pub method: MonostableMethod,
}

#[derive(Args, Debug)]
#[command(group(clap::ArgGroup::new("speed").required(true).args(["critical", "c"])))]
pub struct FrontArgs {
    /// One or more ε; several are overlaid in the plot.
    #[arg(long, required = true, num_args = 1.., value_delimiter = ',')]
    pub eps: Vec<f64>,
    /// Critical front of this family.
    #[arg(long, value_enum)]
    pub critical: Option<Family>,
    /// Monostable front at this speed.
    #[arg(long)]
    pub c: Option<f64>,
    /// Half-width of the plotted z range.
    #[arg(long, default_value_t = 5.0)]
    pub zmax: f64,
}

#[derive(Args, Debug)]
pub struct SteadyArgs {
    #[arg(long, required = true, num_args = 1.., value_delimiter = ',')]
    pub eps: Vec<f64>,
    #[arg(long, default_value_t = 2.0)]
    pub zmax: f64,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Start {
    One,
    Zero,
}

#[derive(Args, Debug)]
pub struct NonmonotoneArgs {
    #[arg(long)]
    pub eps: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub c: f64,
    #[arg(long, default_value_t = 6)]
    pub turns: usize,
    /// Equilibrium the wave leaves from; defaults to `zero` when c = 0 and
    /// `one` otherwise.
    #[arg(long, value_enum)]
    pub start: Option<Start>,
}

#[derive(Args, Debug)]
pub struct InviscidArgs {
    #[arg(long, required = true, num_args = 1.., value_delimiter = ',')]
    pub c: Vec<f64>,
    #[arg(long, default_value_t = 5.0)]
    pub zmax: f64,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepMetric {
    Speed,
    Step,
    Pairing,
    Fixed,
    Energy,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub metric: SweepMetric,
    #[arg(long, value_enum, default_value = "bistable")]
    pub which: Family,
    /// `a,b,c`, `hi:lo:log`, `hi:lo:n:log` or `hi:lo:n:lin` (decreasing).
    #[arg(long)]
    pub eps_grid: Option<String>,
    /// Half-width of the excluded neighborhood of 0.
    #[arg(long, default_value_t = 0.5)]
    pub i0: f64,
    /// Speed for the fixed-speed and energy metrics.
    #[arg(long, default_value_t = 0.2)]
    pub c: f64,
    /// Width of the test bump for pairings.
    #[arg(long, default_value_t = 1.0)]
    pub bump_width: f64,
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dir {
    Forward,
    Backward,
}

#[derive(Args, Debug)]
pub struct TrajectoryArgs {
    #[arg(long)]
    pub eps: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub c: f64,
    /// Starting value of v (an equilibrium or a zero of y).
    #[arg(long)]
    pub anchor: f64,
    #[arg(long, value_enum)]
    pub direction: Dir,
    /// Where to stop; defaults to 1 forward and 0 backward.
    #[arg(long)]
    pub stop: Option<f64>,
}

fn error_kind(err: &anyhow::Error) -> &'static str {
    if let Some(e) = err.downcast_ref::<satfront::Error>() {
        e.kind()
    } else if err.downcast_ref::<std::io::Error>().is_some() {
        "io"
    } else if err.downcast_ref::<toml::de::Error>().is_some() {
        "config"
    } else {
        "usage"
    }
}

fn report(kind: &str, message: String) {
    let body = serde_json::json!({ "error": kind, "message": message });
    eprintln!("{body}");
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            report("usage", e.to_string().trim_end().to_string());
            return ExitCode::from(2);
        }
    };
    match commands::run(&cli) {
        Ok(summary) => {
            // a closed stdout (e.g. piped into `head`) is not a failure
            let _ = writeln!(std::io::stdout(), "{summary}");
            ExitCode::SUCCESS
        }
        Err(err) => {
            report(error_kind(&err), format!("{err:#}"));
            ExitCode::FAILURE
        }
    }
}
