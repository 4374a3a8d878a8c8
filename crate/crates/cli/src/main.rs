mod commands;
mod config;
mod table;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use slide_core::nn::{Activation, Precision};

#[derive(Parser, Debug)]
#[command(name = "slide", version, about = "Sliding-window neural surrogates for damped dynamic systems")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalArgs {
    /// Run configuration (TOML).
    #[arg(long, global = true, value_name = "FILE", conflicts_with = "preset")]
    pub config: Option<PathBuf>,
    /// Built-in configuration: linear_oscillator, duffing, slider_crank_lumped or two_mass_constrained.
    #[arg(long, global = true, value_name = "NAME")]
    pub preset: Option<String>,
    /// Base seed for trajectories, initialization and shuffling.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(0..=i64::MAX as u64))]
    pub seed: Option<u64>,
    /// More log output (repeat for debug messages).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Simulate one trajectory and write it as CSV.
    Simulate(commands::SimulateArgs),
    /// Generate training and validation window datasets.
    Gen(commands::GenArgs),
    /// Linearize along trajectories and tabulate eigenvalues and decay times.
    Eigen(commands::EigenArgs),
    /// Train a surrogate network.
    Train(commands::TrainArgs),
    /// Train an error estimator for a surrogate.
    TrainEe(commands::TrainEeArgs),
    /// Slide a surrogate over a long input sequence.
    Infer(commands::InferArgs),
    /// Time simulation against surrogate inference.
    Bench(commands::BenchArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum PrecisionArg {
    F32,
    F64,
}

impl From<PrecisionArg> for Precision {
    fn from(p: PrecisionArg) -> Self {
        match p {
            PrecisionArg::F32 => Precision::F32,
            PrecisionArg::F64 => Precision::F64,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum ActivationArg {
    Relu,
    Elu,
    Tanh,
    Identity,
}

impl From<ActivationArg> for Activation {
    fn from(a: ActivationArg) -> Self {
        match a {
            ActivationArg::Relu => Activation::Relu,
            ActivationArg::Elu => Activation::Elu,
            ActivationArg::Tanh => Activation::Tanh,
            ActivationArg::Identity => Activation::Identity,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let level = match cli.global.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).parse_default_env().init();

    let g = &cli.global;
    let result = match cli.command {
        Command::Simulate(a) => commands::simulate(g, a),
        Command::Gen(a) => commands::gen(g, a),
        Command::Eigen(a) => commands::eigen(g, a),
        Command::Train(a) => commands::train(g, a),
        Command::TrainEe(a) => commands::train_ee(g, a),
        Command::Infer(a) => commands::infer(g, a),
        Command::Bench(a) => commands::bench(g, a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
