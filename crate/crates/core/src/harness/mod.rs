//! Replay harness: closed-loop runs over a scenario, exact-oracle tables and
//! case-study generation, with CSV and SVG artifacts.

mod sim;
mod summary;
mod svg;

use std::fs;
use std::io::Write;
use std::path::Path;

pub use sim::{replan_ticks, simulate, DriverConfig, OperatorChoice, RunOutput, StepRecord};
pub use summary::{quantile, summarize, PhaseActorSummary, Quartiles};

use crate::error::{Error, Result};
use crate::planner::{LatticeConfig, Maneuver, PlannerConfig};
use crate::prediction::PredictionConfig;
use crate::risk::{exact_risks, EgoFrame};
use crate::scenario::{
    generate_case_study, load_scenario, save_scenario, CaseStudyParams, Scenario,
};

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    /// Prediction and planning horizon in ticks.
    pub horizon: usize,
    pub replan_every: usize,
    /// Monte-Carlo statistics are computed when `sample_count >= 2`.
    pub prediction: PredictionConfig,
    pub planner: PlannerConfig,
    /// Lattice used by the KL operator and the exact oracle. Its horizon must
    /// equal `horizon`.
    pub lattice: LatticeConfig,
    pub operator: OperatorChoice,
    pub exact_lattice: bool,
    pub driver: DriverConfig,
}

pub const DEFAULT_LATTICE_STEPS: usize = 3;

impl Default for RunConfig {
    fn default() -> Self {
        let horizon = 60;
        RunConfig {
            seed: 0,
            horizon,
            replan_every: 15,
            prediction: PredictionConfig::default(),
            // Plans aim above the cruise speed, so they press against
            // slower leaders and look for gaps in adjacent lanes.
            planner: PlannerConfig {
                target_speed: Some(18.0),
                ..PlannerConfig::default()
            },
            lattice: default_lattice(horizon),
            operator: OperatorChoice::Both,
            exact_lattice: false,
            driver: DriverConfig::default(),
        }
    }
}

/// Full five-maneuver lattice with `DEFAULT_LATTICE_STEPS` steps spread over
/// `horizon` (rounded down to whole ticks per step).
pub fn default_lattice(horizon: usize) -> LatticeConfig {
    LatticeConfig::new(
        DEFAULT_LATTICE_STEPS,
        (horizon / DEFAULT_LATTICE_STEPS).max(1),
        &[
            Maneuver::Keep,
            Maneuver::ShiftLeft,
            Maneuver::ShiftRight,
            Maneuver::Brake,
            Maneuver::Accelerate,
        ],
    )
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.replan_every < 1 {
            return Err(Error::InvalidConfig("replan_every must be >= 1".into()));
        }
        if self.horizon < self.replan_every {
            return Err(Error::InvalidConfig(format!(
                "horizon ({}) must be >= replan_every ({})",
                self.horizon, self.replan_every
            )));
        }
        self.prediction.validate()?;
        self.planner.validate()
    }
}

/// Runs the closed loop and writes `run.csv`, `phase_summary.csv`,
/// `scatter.svg` and `risk_timeline.svg` into `out_dir`.
pub fn cmd_run(scenario: &Scenario, cfg: &RunConfig, out_dir: &Path) -> Result<RunOutput> {
    let output = simulate(scenario, cfg)?;
    write_artifacts(out_dir, scenario, &output)?;
    Ok(output)
}

pub fn write_artifacts(out_dir: &Path, scenario: &Scenario, output: &RunOutput) -> Result<()> {
    fs::create_dir_all(out_dir)?;
    fs::write(out_dir.join("run.csv"), run_csv(&output.records)?)?;
    let mut w = csv::Writer::from_path(out_dir.join("phase_summary.csv"))?;
    for s in summarize(&output.records) {
        w.serialize(s.row())?;
    }
    w.flush()?;
    fs::write(out_dir.join("scatter.svg"), svg::scatter(&output.records))?;
    fs::write(
        out_dir.join("risk_timeline.svg"),
        svg::timeline(&output.records, &scenario.phases, scenario.horizon_ticks),
    )?;
    Ok(())
}

/// Serializes records with the fixed `run.csv` header.
pub fn run_csv(records: &[StepRecord]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in records {
        w.serialize(r)?;
    }
    if records.is_empty() {
        w.write_record([
            "tick",
            "phase",
            "actor_id",
            "gamma_euclid",
            "gamma_kl",
            "rho_exact",
            "mean_gamma",
            "var_gamma",
            "prediction_error",
            "ego_lane",
            "plan_partial",
        ])?;
    }
    w.into_inner()
        .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))
}

/// Exact lattice counts at tick `t` with the Ego at its initial state,
/// written as two CSV tables: the totals, then one row per actor.
pub fn cmd_oracle(
    scenario: &Scenario,
    t: usize,
    k: usize,
    steps: usize,
    maneuvers: &[Maneuver],
    out: &mut impl Write,
) -> Result<()> {
    if steps == 0 || !k.is_multiple_of(steps) {
        return Err(Error::InvalidConfig(format!(
            "horizon {k} is not divisible into {steps} decision steps"
        )));
    }
    let lattice = LatticeConfig::new(steps, k / steps, maneuvers);
    let world = scenario.slice_world(t, k)?;
    let r = exact_risks(&EgoFrame::from_scenario(scenario, t, k), &world, &lattice)?;
    writeln!(out, "quantity,value")?;
    writeln!(out, "empty_count,{}", r.empty_count)?;
    writeln!(out, "full_count,{}", r.full_count)?;
    writeln!(out, "total_rho,{}", r.total)?;
    writeln!(out)?;
    writeln!(out, "actor_id,without_count,rho")?;
    for (id, (without, rho)) in &r.per_actor {
        writeln!(out, "{id},{without},{rho}")?;
    }
    Ok(())
}

/// Generates the case study and writes it as a scenario document.
pub fn cmd_casestudy(params: &CaseStudyParams, out: &Path) -> Result<Scenario> {
    let s = generate_case_study(params)?;
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(out, save_scenario(&s)?)?;
    Ok(s)
}

pub fn read_scenario(path: &Path) -> Result<Scenario> {
    load_scenario(&fs::read_to_string(path)?)
}
