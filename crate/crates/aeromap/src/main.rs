use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use aeromap::cli::{self, Command, Invocation};

/// Scenario-driven simulation, learning, and planning for UAV-aided
/// wireless networks.
#[derive(Parser)]
#[command(name = "aeromap", version, about)]
struct Args {
    #[command(subcommand)]
    command: Cmd,

    /// Scenario configuration (JSON).
    #[arg(long, global = true, default_value = "scenario.json")]
    config: PathBuf,

    /// Master seed override.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Artifact output directory.
    #[arg(long, global = true, default_value = "out")]
    out_dir: PathBuf,

    /// Dotted-path config patches, e.g. --override harvest.l_max_m=800.
    #[arg(long = "override", value_name = "KEY=VALUE", global = true)]
    overrides: Vec<String>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Synthesize a city raster and write it to the out directory.
    GenCity,
    /// Sample RSSI measurements over the scenario city.
    Simulate,
    /// Joint segment classification and pathloss fitting.
    FitChannel,
    /// Direct vs model-based radio-map reconstruction for one node.
    Reconstruct,
    /// Building-height bounds from classified links, with refinement.
    #[command(name = "infer-3d")]
    Infer3d,
    /// Per-node logistic LoS models distilled from the city.
    Compress,
    /// Relay placement: nested-segment search plus exhaustive oracle.
    PlanRelay,
    /// Data-harvesting trajectory under a length budget.
    PlanIot,
    /// Active-learning localization of one node.
    Localize,
    /// Harvesting planner comparison over a length-budget sweep.
    Sweep,
}

impl From<&Cmd> for Command {
    fn from(c: &Cmd) -> Command {
        match c {
            Cmd::GenCity => Command::GenCity,
            Cmd::Simulate => Command::Simulate,
            Cmd::FitChannel => Command::FitChannel,
            Cmd::Reconstruct => Command::Reconstruct,
            Cmd::Infer3d => Command::Infer3d,
            Cmd::Compress => Command::Compress,
            Cmd::PlanRelay => Command::PlanRelay,
            Cmd::PlanIot => Command::PlanIot,
            Cmd::Localize => Command::Localize,
            Cmd::Sweep => Command::Sweep,
        }
    }
}

fn main() -> ExitCode {
    let args = Args::parse();

    let mut overrides = Vec::new();
    for raw in &args.overrides {
        match raw.split_once('=') {
            Some((k, v)) => overrides.push((k.to_string(), v.to_string())),
            None => {
                eprintln!("error: --override expects KEY=VALUE, got {raw:?}");
                return ExitCode::from(1);
            }
        }
    }

    let invocation = Invocation {
        command: Command::from(&args.command),
        config_path: args.config,
        seed: args.seed,
        out_dir: args.out_dir,
        overrides,
    };

    match cli::run(&invocation) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
