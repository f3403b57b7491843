use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use actor_risk::harness::{
    cmd_casestudy, cmd_oracle, cmd_run, default_lattice, read_scenario, OperatorChoice, RunConfig,
};
use actor_risk::planner::Maneuver;
use actor_risk::scenario::{generate_case_study, CaseStudyParams};
use actor_risk::{Error, Result};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(version, about = "Per-actor risk scoring for driving scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-loop replay with per-replan risk records.
    Run(RunArgs),
    /// Exact lattice risk table at one tick.
    Oracle(OracleArgs),
    /// Write the highway case study as a scenario file.
    Casestudy(CasestudyArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(
        long,
        conflicts_with = "casestudy_defaults",
        required_unless_present = "casestudy_defaults"
    )]
    scenario: Option<PathBuf>,
    #[arg(long)]
    casestudy_defaults: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 60)]
    horizon: usize,
    #[arg(long, default_value_t = 15)]
    replan_every: usize,
    /// Monte-Carlo sample count; statistics are reported from 2 upwards.
    #[arg(long, default_value_t = 1)]
    samples: usize,
    #[arg(long, default_value_t = 0.0)]
    noise_accel: f64,
    #[arg(long, default_value_t = 0.0)]
    noise_yawrate: f64,
    #[arg(long, default_value = "both")]
    operator: OperatorChoice,
    #[arg(long)]
    exact_lattice: bool,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long)]
    t: usize,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 3)]
    steps: usize,
    /// Comma-separated maneuver names.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "keep,shift_left,shift_right,brake,accelerate"
    )]
    maneuvers: Vec<Maneuver>,
}

#[derive(Args)]
struct CasestudyArgs {
    #[arg(long)]
    out: PathBuf,
    /// Stop after the second steady phase.
    #[arg(long)]
    no_brake: bool,
    #[arg(long)]
    brake_decel: Option<f64>,
    #[arg(long)]
    steady_ticks: Option<usize>,
    #[arg(long)]
    steady2_ticks: Option<usize>,
    #[arg(long)]
    lane_change_duration: Option<f64>,
    #[arg(long)]
    horizon_ticks: Option<usize>,
}

fn run(args: RunArgs) -> Result<()> {
    let scenario = match &args.scenario {
        Some(path) => read_scenario(path)?,
        None => generate_case_study(&CaseStudyParams::default())?,
    };
    let mut cfg = RunConfig {
        seed: args.seed,
        horizon: args.horizon,
        replan_every: args.replan_every,
        lattice: default_lattice(args.horizon),
        operator: args.operator,
        exact_lattice: args.exact_lattice,
        ..RunConfig::default()
    };
    cfg.prediction.sample_count = args.samples;
    cfg.prediction.noise_accel_sigma = args.noise_accel;
    cfg.prediction.noise_yawrate_sigma = args.noise_yawrate;
    cfg.prediction.seed = args.seed;
    let output = cmd_run(&scenario, &cfg, &args.out)?;
    eprintln!(
        "{} records written to {}",
        output.records.len(),
        args.out.display()
    );
    Ok(())
}

fn oracle(args: OracleArgs) -> Result<()> {
    let scenario = read_scenario(&args.scenario)?;
    let mut buf = Vec::new();
    cmd_oracle(
        &scenario,
        args.t,
        args.k,
        args.steps,
        &args.maneuvers,
        &mut buf,
    )?;
    std::io::stdout().write_all(&buf)?;
    Ok(())
}

fn casestudy(args: CasestudyArgs) -> Result<()> {
    let mut p = CaseStudyParams {
        include_braking: !args.no_brake,
        ..CaseStudyParams::default()
    };
    if let Some(v) = args.brake_decel {
        p.brake_decel = v;
    }
    if let Some(v) = args.steady_ticks {
        p.steady_ticks = v;
    }
    if let Some(v) = args.steady2_ticks {
        p.steady2_ticks = v;
    }
    if let Some(v) = args.lane_change_duration {
        p.lane_change_duration = v;
    }
    if let Some(v) = args.horizon_ticks {
        p.horizon_ticks = v;
    }
    cmd_casestudy(&p, &args.out)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => run(a),
        Command::Oracle(a) => oracle(a),
        Command::Casestudy(a) => casestudy(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_byte(&e))
        }
    }
}

fn exit_byte(e: &Error) -> u8 {
    u8::try_from(e.exit_code()).unwrap_or(1)
}
