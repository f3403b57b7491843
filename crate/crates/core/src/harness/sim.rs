//! Closed-loop replay: the Ego drives through a scripted scenario, replanning
//! on a fixed cadence, while every replan tick is scored.

use serde::Serialize;

use super::RunConfig;
use crate::error::{Error, Result};
use crate::planner::{Footprints, Plan};
use crate::prediction::{predict_linear, prediction_error, stream_key};
use crate::risk::{
    euclid_importances, exact_risks, expected_importances, kl_importances, EgoFrame, Operator,
};
use crate::scenario::{ActorId, ActorState, Scenario, Trajectory, World};

/// Longitudinal Ego controller: intelligent-driver model towards a desired
/// speed, following the nearest actor ahead in its corridor.
#[derive(Clone, Debug, PartialEq)]
pub struct DriverConfig {
    pub desired_speed: f64,
    pub max_accel: f64,
    pub comfort_decel: f64,
    pub max_decel: f64,
    pub min_gap: f64,
    pub time_headway: f64,
    pub max_lateral_speed: f64,
    /// How many ticks of a fresh plan are scanned for a lane departure.
    pub lane_lookahead: usize,
    /// Free distance needed ahead of and behind the Ego in the target lane
    /// before it starts a lane change (m).
    pub merge_gap: f64,
    /// The Ego only considers leaving its lane when the leader there is at
    /// least this much slower than the mean traffic speed (m/s).
    pub change_incentive: f64,
}

impl Default for DriverConfig {
    fn default() -> Self {
        DriverConfig {
            desired_speed: 16.0,
            max_accel: 1.5,
            comfort_decel: 3.0,
            max_decel: 9.0,
            min_gap: 2.0,
            time_headway: 1.0,
            max_lateral_speed: 2.0,
            lane_lookahead: 60,
            merge_gap: 15.0,
            change_incentive: 1.0,
        }
    }
}

/// One row of the per-replan table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StepRecord {
    pub tick: usize,
    pub phase: String,
    pub actor_id: ActorId,
    pub gamma_euclid: Option<f64>,
    pub gamma_kl: Option<f64>,
    pub rho_exact: Option<f64>,
    pub mean_gamma: Option<f64>,
    pub var_gamma: Option<f64>,
    pub prediction_error: Option<f64>,
    pub ego_lane: usize,
    pub plan_partial: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunOutput {
    pub records: Vec<StepRecord>,
    /// Realized Ego states, one per tick.
    pub ego_track: Trajectory,
}

fn idm_accel(cfg: &DriverConfig, v: f64, lead: Option<(f64, f64)>) -> f64 {
    let free = 1.0 - (v / cfg.desired_speed).powi(4);
    let interaction = match lead {
        Some((gap, lead_v)) => {
            let s_star = cfg.min_gap
                + (v * cfg.time_headway
                    + v * (v - lead_v) / (2.0 * (cfg.max_accel * cfg.comfort_decel).sqrt()))
                .max(0.0);
            (s_star / gap.max(0.1)).powi(2)
        }
        None => 0.0,
    };
    (cfg.max_accel * (free - interaction)).clamp(-cfg.max_decel, cfg.max_accel)
}

struct Ego<'a> {
    state: ActorState,
    lane: usize,
    desired_lane: usize,
    cfg: &'a DriverConfig,
}

impl Ego<'_> {
    /// Takes the first lane the plan leaves into within the lookahead, or
    /// stays put when the plan keeps the current lane that long.
    fn adopt(&mut self, s: &Scenario, tick: usize, plan: &Trajectory) {
        let speeds: Vec<f64> = s
            .npc_trajectories
            .values()
            .filter_map(|tr| tr.state_at(tick).map(|st| st.speed))
            .collect();
        let flow = speeds.iter().sum::<f64>() / speeds.len().max(1) as f64;
        let slow_leader = self
            .leader(s, tick)
            .is_some_and(|(_, v)| v < flow - self.cfg.change_incentive);
        if !slow_leader {
            self.desired_lane = self.lane;
            return;
        }
        self.desired_lane = plan
            .states
            .iter()
            .take(self.cfg.lane_lookahead + 1)
            .map(|st| s.map.lane_of(st.y))
            .find(|&l| l != self.lane)
            .unwrap_or(self.lane);
    }

    fn gap_clear(&self, s: &Scenario, tick: usize, lane: usize) -> bool {
        s.npc_trajectories
            .values()
            .all(|tr| match tr.state_at(tick) {
                Some(st) => {
                    s.map.lane_of(st.y) != lane || (st.x - self.state.x).abs() >= self.cfg.merge_gap
                }
                None => true,
            })
    }

    /// Bumper gap and speed of the nearest actor ahead in the Ego's corridor.
    fn leader(&self, s: &Scenario, tick: usize) -> Option<(f64, f64)> {
        let e = self.state;
        let corridor = s.map.lane_width * 0.8;
        s.npc_trajectories
            .iter()
            .filter_map(|(id, tr)| tr.state_at(tick).map(|st| (id, st)))
            .filter(|(_, st)| st.x > e.x && (st.y - e.y).abs() < corridor)
            .map(|(id, st)| (st.x - e.x - s.ego_radius - s.radii.of(id), st.speed))
            .min_by(|a, b| a.0.total_cmp(&b.0))
    }

    fn step(&mut self, s: &Scenario, tick: usize) {
        if self.desired_lane != self.lane {
            let next = if self.desired_lane > self.lane {
                self.lane + 1
            } else {
                self.lane - 1
            };
            if self.gap_clear(s, tick, next) {
                self.lane = next;
            }
        }
        let dt = s.dt;
        let e = self.state;
        let a = idm_accel(self.cfg, e.speed, self.leader(s, tick));
        let v = (e.speed + a * dt).max(0.0);
        let x = e.x + 0.5 * (e.speed + v) * dt;
        let max_dy = self.cfg.max_lateral_speed * dt;
        let y = e.y + (s.map.lane_center(self.lane) - e.y).clamp(-max_dy, max_dy);
        let heading = if x > e.x {
            (y - e.y).atan2(x - e.x)
        } else {
            0.0
        };
        self.state = ActorState::new(x, y, heading, v);
    }
}

/// Ticks at which the Ego replans.
pub fn replan_ticks(horizon_ticks: usize, every: usize) -> impl Iterator<Item = usize> {
    (0..horizon_ticks).step_by(every.max(1))
}

pub fn simulate(s: &Scenario, cfg: &RunConfig) -> Result<RunOutput> {
    cfg.validate()?;
    let k = cfg.horizon;
    let big_t = s.horizon_ticks;
    let footprints = Footprints {
        ego_radius: s.ego_radius,
        radii: s.radii.clone(),
    };
    let wants_lattice = cfg.operator != OperatorChoice::Euclid || cfg.exact_lattice;
    if wants_lattice {
        cfg.lattice.validate(k)?;
    }
    let start_lane = s.map.lane_of(s.ego_initial.y);
    let mut ego = Ego {
        state: s.ego_initial,
        lane: start_lane,
        desired_lane: start_lane,
        cfg: &cfg.driver,
    };
    let mut track = vec![ego.state];
    let mut records = Vec::new();

    for tick in 0..big_t {
        if tick % cfg.replan_every == 0 {
            let histories = s.slice_world(tick, 0)?;
            let mut predicted = World::new();
            for h in histories.iter() {
                predicted.insert(predict_linear(h, k)?);
            }
            let frame = EgoFrame {
                map: s.map,
                ego: ego.state,
                t: tick,
                k,
                dt: s.dt,
                footprints: footprints.clone(),
            };
            let mut planner = cfg.planner.clone();
            planner.seed = stream_key(cfg.seed, &ActorId::ego(), tick, 0);
            planner.target_speed.get_or_insert(cfg.driver.desired_speed);
            // A pending lane change steers the plan towards the target lane.
            planner.preferred_lane.get_or_insert(ego.desired_lane);

            let (plan, euclid): (Option<Plan>, _) = if cfg.operator != OperatorChoice::Kl {
                let (p, g) = euclid_importances(&frame, &predicted, &planner)?;
                (p, Some(g))
            } else {
                let p = match crate::planner::plan_sampling(
                    &s.map,
                    &ego.state,
                    tick,
                    k,
                    s.dt,
                    &predicted,
                    &planner,
                    &footprints,
                ) {
                    Ok(p) => Some(p),
                    Err(Error::NoFeasiblePlan) => None,
                    Err(e) => return Err(e),
                };
                (p, None)
            };
            let kl = if cfg.operator != OperatorChoice::Euclid {
                Some(kl_importances(&frame, &predicted, &cfg.lattice)?)
            } else {
                None
            };
            let exact = if cfg.exact_lattice && tick + k <= big_t {
                Some(exact_risks(&frame, &s.slice_world(tick, k)?, &cfg.lattice)?)
            } else {
                None
            };
            let mc = if cfg.prediction.sample_count >= 2 {
                let op = if cfg.operator == OperatorChoice::Kl {
                    Operator::Kl
                } else {
                    Operator::Euclid
                };
                Some(expected_importances(
                    &frame,
                    &histories,
                    &cfg.prediction,
                    &planner,
                    op,
                    Some(&cfg.lattice),
                )?)
            } else {
                None
            };
            let errors: Vec<Option<f64>> = histories
                .iter()
                .map(|h| {
                    if tick + k > big_t {
                        return Ok(None);
                    }
                    let truth = s.npc_trajectories[&h.actor_id].window(tick, k)?;
                    Ok(Some(prediction_error(
                        &predicted.trajectories[&h.actor_id],
                        &truth,
                    )?))
                })
                .collect::<Result<_>>()?;

            let phase = s
                .phase_at(tick)
                .map(|p| p.as_str().to_string())
                .unwrap_or_default();
            let partial = plan.as_ref().is_none_or(|p| p.partial);
            let lane = s.map.lane_of(ego.state.y);
            for (h, err) in histories.iter().zip(errors) {
                let id = &h.actor_id;
                records.push(StepRecord {
                    tick,
                    phase: phase.clone(),
                    actor_id: id.clone(),
                    gamma_euclid: euclid.as_ref().map(|g| g[id]),
                    gamma_kl: kl.as_ref().map(|g| g[id]),
                    rho_exact: exact.as_ref().map(|e| e.per_actor[id].1),
                    mean_gamma: mc.as_ref().map(|m| m[id].0),
                    var_gamma: mc.as_ref().map(|m| m[id].1),
                    prediction_error: err,
                    ego_lane: lane,
                    plan_partial: partial,
                });
            }
            if let Some(p) = &plan {
                ego.adopt(s, tick, &p.trajectory);
            }
        }
        ego.step(s, tick);
        track.push(ego.state);
    }
    Ok(RunOutput {
        records,
        ego_track: Trajectory::new(ActorId::ego(), 0, s.dt, track),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OperatorChoice {
    Euclid,
    Kl,
    Both,
}

impl std::str::FromStr for OperatorChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "euclid" => Ok(OperatorChoice::Euclid),
            "kl" => Ok(OperatorChoice::Kl),
            "both" => Ok(OperatorChoice::Both),
            other => Err(Error::InvalidConfig(format!(
                "unknown operator `{other}` (expected euclid, kl or both)"
            ))),
        }
    }
}
