//! Event-triggered phase scripting and the five-phase case-study generator.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{ActorId, ActorState, PhaseName, PhaseSpan, Radii, RoadMap, Scenario, Trajectory};
use crate::error::{Error, Result};
use crate::scenario::SCENARIO_VERSION;

/// Condition that ends a phase and starts the next one.
#[derive(Clone, Debug, PartialEq)]
pub enum Trigger {
    /// Fires once the phase has run for the given number of ticks.
    AfterTicks(usize),
    /// Fires once every actor is within `tolerance` m/s of its target speed.
    AllAtTargetSpeed { tolerance: f64 },
    /// Fires once the actor has finished its lateral ramp and is within
    /// `tolerance` m/s of its target speed.
    ManeuverComplete { actor: ActorId, tolerance: f64 },
    /// Never fires; the phase runs to the scenario horizon.
    Horizon,
}

/// Command issued to one actor when a phase begins.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseCommand {
    pub actor: ActorId,
    /// New cruise target and the rate (m/s²) used to reach it.
    pub target_speed: Option<(f64, f64)>,
    /// Lane to move into and the lateral ramp duration in seconds.
    pub target_lane: Option<(usize, f64)>,
    /// Constant deceleration (m/s²) applied until standstill.
    pub deceleration: Option<f64>,
}

impl PhaseCommand {
    pub fn new(actor: ActorId) -> Self {
        PhaseCommand {
            actor,
            target_speed: None,
            target_lane: None,
            deceleration: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PhaseSpec {
    pub name: PhaseName,
    pub end: Trigger,
    pub commands: Vec<PhaseCommand>,
}

/// Totally ordered list of phases.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct PhaseScript {
    pub phases: Vec<PhaseSpec>,
}

/// Initial placement of one scripted actor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NpcSpec {
    pub id: ActorId,
    pub lane: usize,
    pub x: f64,
    pub cruise_speed: f64,
}

impl NpcSpec {
    pub fn new(id: &str, lane: usize, x: f64, cruise_speed: f64) -> Self {
        NpcSpec {
            id: ActorId::new(id),
            lane,
            x,
            cruise_speed,
        }
    }
}

/// Parameters of the five-phase highway case study.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseStudyParams {
    pub map: RoadMap,
    pub dt: f64,
    pub horizon_ticks: usize,
    pub actor_radius: f64,
    pub ego_radius: f64,
    pub ego_lane: usize,
    pub ego_x: f64,
    pub ego_speed: f64,
    pub npcs: Vec<NpcSpec>,
    /// Acceleration used by every actor during initialization (m/s²).
    pub init_accel: f64,
    pub speed_tolerance: f64,
    pub steady_ticks: usize,
    pub lane_change_actor: ActorId,
    pub lane_change_target_lane: usize,
    pub lane_change_duration: f64,
    pub lane_change_speed: f64,
    pub lane_change_speed_rate: f64,
    pub steady2_ticks: usize,
    pub include_braking: bool,
    pub brake_decel: f64,
    /// The two adjacent-lane actors the Ego may choose to follow.
    pub follow_candidates: [ActorId; 2],
}

impl Default for CaseStudyParams {
    fn default() -> Self {
        CaseStudyParams {
            map: RoadMap::default(),
            dt: super::DEFAULT_DT,
            horizon_ticks: 1905,
            actor_radius: super::DEFAULT_ACTOR_RADIUS,
            ego_radius: super::DEFAULT_ACTOR_RADIUS,
            ego_lane: 0,
            ego_x: 0.0,
            ego_speed: 0.0,
            npcs: vec![
                NpcSpec::new("207", 2, -90.0, 12.0),
                NpcSpec::new("208", 1, 12.0, 12.0),
                NpcSpec::new("209", 1, -5.0, 12.0),
                NpcSpec::new("210", 1, 4.0, 12.0),
                NpcSpec::new("211", 0, 24.0, 12.0),
                NpcSpec::new("212", 2, 90.0, 12.0),
            ],
            init_accel: 0.32,
            speed_tolerance: 0.05,
            steady_ticks: 420,
            lane_change_actor: ActorId::new("208"),
            lane_change_target_lane: 0,
            lane_change_duration: 3.0,
            lane_change_speed: 10.0,
            lane_change_speed_rate: 0.08125,
            steady2_ticks: 180,
            include_braking: true,
            brake_decel: 6.0,
            follow_candidates: [ActorId::new("209"), ActorId::new("210")],
        }
    }
}

impl CaseStudyParams {
    fn validate(&self) -> Result<()> {
        self.map.validate()?;
        if self.dt.is_nan() || self.dt <= 0.0 || self.horizon_ticks == 0 {
            return Err(Error::InvalidConfig(
                "dt and horizon_ticks must be > 0".into(),
            ));
        }
        if self.ego_lane >= self.map.lane_count {
            return Err(Error::InfeasibleParams {
                actor: ActorId::ego(),
                reason: format!("lane {} does not exist", self.ego_lane),
            });
        }
        let mut seen = BTreeSet::new();
        for n in &self.npcs {
            let bad = |reason: String| Error::InfeasibleParams {
                actor: n.id.clone(),
                reason,
            };
            if n.id.is_ego() || !seen.insert(n.id.clone()) {
                return Err(bad("duplicate or reserved id".into()));
            }
            if n.lane >= self.map.lane_count {
                return Err(bad(format!("lane {} does not exist", n.lane)));
            }
            if n.cruise_speed > self.map.speed_limit || n.cruise_speed < 0.0 {
                return Err(bad(format!(
                    "target speed {} outside [0, speed limit {}]",
                    n.cruise_speed, self.map.speed_limit
                )));
            }
        }
        let lc = &self.lane_change_actor;
        let bad = |reason: String| Error::InfeasibleParams {
            actor: lc.clone(),
            reason,
        };
        if !seen.contains(lc) {
            return Err(bad("lane-change actor is not among the npcs".into()));
        }
        if self.lane_change_target_lane >= self.map.lane_count {
            return Err(bad(format!(
                "lane change into nonexistent lane {}",
                self.lane_change_target_lane
            )));
        }
        if self.lane_change_speed > self.map.speed_limit || self.lane_change_speed < 0.0 {
            return Err(bad(format!(
                "target speed {} outside [0, speed limit {}]",
                self.lane_change_speed, self.map.speed_limit
            )));
        }
        if self.brake_decel < 0.0
            || self.lane_change_duration.is_nan()
            || self.lane_change_duration <= 0.0
        {
            return Err(bad(
                "braking deceleration and lane-change duration must be positive".into(),
            ));
        }
        Ok(())
    }

    /// The phase script these parameters describe.
    pub fn script(&self) -> PhaseScript {
        let tol = self.speed_tolerance;
        let init_cmds = self
            .npcs
            .iter()
            .map(|n| PhaseCommand {
                target_speed: Some((n.cruise_speed, self.init_accel)),
                ..PhaseCommand::new(n.id.clone())
            })
            .collect();
        let lc = PhaseCommand {
            target_speed: Some((self.lane_change_speed, self.lane_change_speed_rate)),
            target_lane: Some((self.lane_change_target_lane, self.lane_change_duration)),
            ..PhaseCommand::new(self.lane_change_actor.clone())
        };
        let mut phases = vec![
            PhaseSpec {
                name: PhaseName::Init,
                end: Trigger::AllAtTargetSpeed { tolerance: tol },
                commands: init_cmds,
            },
            PhaseSpec {
                name: PhaseName::Steady,
                end: Trigger::AfterTicks(self.steady_ticks),
                commands: Vec::new(),
            },
            PhaseSpec {
                name: PhaseName::LaneChange,
                end: Trigger::ManeuverComplete {
                    actor: self.lane_change_actor.clone(),
                    tolerance: tol,
                },
                commands: vec![lc],
            },
            PhaseSpec {
                name: PhaseName::Steady2,
                end: if self.include_braking {
                    Trigger::AfterTicks(self.steady2_ticks)
                } else {
                    Trigger::Horizon
                },
                commands: Vec::new(),
            },
        ];
        if self.include_braking {
            phases.push(PhaseSpec {
                name: PhaseName::Brake,
                end: Trigger::Horizon,
                commands: vec![PhaseCommand {
                    deceleration: Some(self.brake_decel),
                    ..PhaseCommand::new(self.lane_change_actor.clone())
                }],
            });
        }
        PhaseScript { phases }
    }
}

#[derive(Clone, Debug)]
struct Ramp {
    start_tick: usize,
    ticks: f64,
    from: f64,
    to: f64,
}

#[derive(Clone, Debug)]
struct Agent {
    x: f64,
    y: f64,
    v: f64,
    target_v: f64,
    rate: f64,
    decel: Option<f64>,
    ramp: Option<Ramp>,
}

impl Agent {
    fn ramp_done(&self, tick: usize) -> bool {
        self.ramp
            .as_ref()
            .is_none_or(|r| (tick - r.start_tick) as f64 >= r.ticks)
    }

    fn lateral(&self, tick: usize) -> f64 {
        match &self.ramp {
            Some(r) => {
                let u = ((tick - r.start_tick) as f64 / r.ticks).clamp(0.0, 1.0);
                r.from + (r.to - r.from) * 0.5 * (1.0 - (PI * u).cos())
            }
            None => self.y,
        }
    }

    fn step(&mut self, tick: usize, dt: f64) -> ActorState {
        let v0 = self.v;
        let v1 = match self.decel {
            Some(a) => (v0 - a * dt).max(0.0),
            None if v0 < self.target_v => (v0 + self.rate * dt).min(self.target_v),
            None => (v0 - self.rate * dt).max(self.target_v),
        };
        let dx = 0.5 * (v0 + v1) * dt;
        let y_next = self.lateral(tick + 1);
        let dy = y_next - self.y;
        self.x += dx;
        self.y = y_next;
        self.v = v1;
        self.state(dt, dy)
    }

    fn state(&self, dt: f64, dy: f64) -> ActorState {
        if dy == 0.0 {
            ActorState::new(self.x, self.y, 0.0, self.v)
        } else {
            let vy = dy / dt;
            ActorState::new(self.x, self.y, vy.atan2(self.v), self.v.hypot(vy))
        }
    }
}

struct Runner<'a> {
    dt: f64,
    map: &'a RoadMap,
    agents: BTreeMap<ActorId, Agent>,
}

impl Runner<'_> {
    fn apply(&mut self, cmd: &PhaseCommand, tick: usize) -> Result<()> {
        let map = self.map;
        let dt = self.dt;
        let a = self
            .agents
            .get_mut(&cmd.actor)
            .ok_or_else(|| Error::UnknownActor(cmd.actor.clone()))?;
        if let Some((v, rate)) = cmd.target_speed {
            a.target_v = v;
            a.rate = rate;
        }
        if let Some((lane, secs)) = cmd.target_lane {
            a.ramp = Some(Ramp {
                start_tick: tick,
                ticks: (secs / dt).round().max(1.0),
                from: a.y,
                to: map.lane_center(lane),
            });
        }
        if let Some(d) = cmd.deceleration {
            a.decel = Some(d);
        }
        Ok(())
    }

    fn fired(&self, trigger: &Trigger, tick: usize, phase_start: usize) -> bool {
        match trigger {
            Trigger::AfterTicks(n) => tick - phase_start >= *n,
            Trigger::AllAtTargetSpeed { tolerance } => self
                .agents
                .values()
                .all(|a| (a.v - a.target_v).abs() <= *tolerance),
            Trigger::ManeuverComplete { actor, tolerance } => self
                .agents
                .get(actor)
                .is_none_or(|a| a.ramp_done(tick) && (a.v - a.target_v).abs() <= *tolerance),
            Trigger::Horizon => false,
        }
    }
}

/// Runs `script` forward from the given initial placements. Returns one
/// trajectory per actor over `[0, horizon_ticks]` and the realized phase spans.
pub fn run_script(
    map: &RoadMap,
    dt: f64,
    horizon_ticks: usize,
    initial: &BTreeMap<ActorId, ActorState>,
    script: &PhaseScript,
) -> Result<(BTreeMap<ActorId, Trajectory>, Vec<PhaseSpan>)> {
    let mut runner = Runner {
        dt,
        map,
        agents: initial
            .iter()
            .map(|(id, s)| {
                (
                    id.clone(),
                    Agent {
                        x: s.x,
                        y: s.y,
                        v: s.speed,
                        target_v: s.speed,
                        rate: 0.0,
                        decel: None,
                        ramp: None,
                    },
                )
            })
            .collect(),
    };
    let mut trajs: BTreeMap<ActorId, Vec<ActorState>> = initial
        .iter()
        .map(|(id, s)| {
            let mut v = Vec::with_capacity(horizon_ticks + 1);
            v.push(ActorState::new(s.x, s.y, 0.0, s.speed));
            (id.clone(), v)
        })
        .collect();

    let mut spans = Vec::new();
    let mut phase_idx = 0;
    let mut phase_start = 0;
    if let Some(first) = script.phases.first() {
        for c in &first.commands {
            runner.apply(c, 0)?;
        }
    }
    for tick in 0..horizon_ticks {
        // Check for phase transitions before integrating this tick.
        while phase_idx < script.phases.len() {
            let spec = &script.phases[phase_idx];
            if !runner.fired(&spec.end, tick, phase_start) || phase_idx + 1 == script.phases.len() {
                break;
            }
            spans.push(PhaseSpan {
                name: spec.name,
                start_tick: phase_start,
                end_tick: tick,
            });
            phase_idx += 1;
            phase_start = tick;
            for c in &script.phases[phase_idx].commands {
                runner.apply(c, tick)?;
            }
        }
        for (id, agent) in runner.agents.iter_mut() {
            let s = agent.step(tick, dt);
            trajs.get_mut(id).expect("agent has a trajectory").push(s);
        }
    }
    if let Some(spec) = script.phases.get(phase_idx) {
        spans.push(PhaseSpan {
            name: spec.name,
            start_tick: phase_start,
            end_tick: horizon_ticks,
        });
    }
    let trajs = trajs
        .into_iter()
        .map(|(id, states)| (id.clone(), Trajectory::new(id, 0, dt, states)))
        .collect();
    Ok((trajs, spans))
}

/// Builds the five-phase case study: every npc accelerates to its cruise
/// speed, holds it, one actor changes lanes, all hold again, and the same
/// actor brakes to a standstill.
pub fn generate_case_study(params: &CaseStudyParams) -> Result<Scenario> {
    params.validate()?;
    let map = &params.map;
    let initial: BTreeMap<ActorId, ActorState> = params
        .npcs
        .iter()
        .map(|n| {
            (
                n.id.clone(),
                ActorState::new(n.x, map.lane_center(n.lane), 0.0, 0.0),
            )
        })
        .collect();
    let (trajs, phases) = run_script(
        map,
        params.dt,
        params.horizon_ticks,
        &initial,
        &params.script(),
    )?;
    let radii = Radii {
        default: params.actor_radius,
        per_actor: trajs
            .keys()
            .map(|id| (id.clone(), params.actor_radius))
            .collect(),
    };
    let scenario = Scenario {
        version: SCENARIO_VERSION,
        map: *map,
        dt: params.dt,
        horizon_ticks: params.horizon_ticks,
        ego_initial: ActorState::new(
            params.ego_x,
            map.lane_center(params.ego_lane),
            0.0,
            params.ego_speed,
        ),
        ego_radius: params.ego_radius,
        npc_trajectories: trajs,
        radii,
        phases,
    };
    scenario.validate()?;
    Ok(scenario)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn phase(s: &Scenario, name: PhaseName) -> PhaseSpan {
        *s.phase_span(name).unwrap()
    }

    #[test]
    fn default_case_study_topology() {
        let p = CaseStudyParams::default();
        let s = generate_case_study(&p).unwrap();
        assert_eq!(s.npc_trajectories.len(), 6);
        let names: Vec<_> = s.phases.iter().map(|p| p.name).collect();
        assert_eq!(names, PhaseName::ALL.to_vec());
        // Boundaries land near the reported 375 / 795 / 1035 / 1215 / 1905.
        let expect = [
            (0, 375),
            (375, 795),
            (795, 1035),
            (1035, 1215),
            (1215, 1905),
        ];
        for (span, (a, b)) in s.phases.iter().zip(expect) {
            assert!((span.start_tick as i64 - a as i64).abs() <= 5, "{span:?}");
            assert!((span.end_tick as i64 - b as i64).abs() <= 5, "{span:?}");
        }
    }

    #[test]
    fn steady_phases_hold_speed() {
        let s = generate_case_study(&CaseStudyParams::default()).unwrap();
        for name in [PhaseName::Steady, PhaseName::Steady2] {
            let span = phase(&s, name);
            for (id, tr) in &s.npc_trajectories {
                if name == PhaseName::Steady2 && id.as_str() == "208" {
                    continue;
                }
                let v0 = tr.states[span.start_tick + 1].speed;
                for t in span.start_tick + 1..span.end_tick {
                    assert!((tr.states[t].speed - v0).abs() < 1e-9, "{id} at {t}");
                    let dx = tr.states[t + 1].x - tr.states[t].x;
                    assert!((dx - v0 * s.dt).abs() < 1e-6);
                }
            }
        }
    }

    #[test]
    fn generation_is_bit_identical() {
        let p = CaseStudyParams::default();
        assert_eq!(
            generate_case_study(&p).unwrap(),
            generate_case_study(&p).unwrap()
        );
    }

    #[test]
    fn zero_braking_continues_at_constant_speed() {
        let p = CaseStudyParams {
            brake_decel: 0.0,
            ..Default::default()
        };
        let s = generate_case_study(&p).unwrap();
        let span = phase(&s, PhaseName::Brake);
        let tr = &s.npc_trajectories[&p.lane_change_actor];
        let v = tr.states[span.start_tick].speed;
        let x0 = tr.states[span.start_tick].x;
        for t in span.start_tick..=span.end_tick {
            assert_eq!(tr.states[t].speed, v);
            let expect = x0 + v * s.dt * (t - span.start_tick) as f64;
            assert!((tr.states[t].x - expect).abs() < 1e-6);
        }
    }

    fn stop_ticks(speed: f64, decel: f64) -> usize {
        let p = CaseStudyParams {
            lane_change_speed: speed,
            lane_change_speed_rate: 1.0,
            brake_decel: decel,
            ..Default::default()
        };
        let s = generate_case_study(&p).unwrap();
        let span = phase(&s, PhaseName::Brake);
        let tr = &s.npc_trajectories[&p.lane_change_actor];
        assert!((tr.states[span.start_tick].speed - speed).abs() < 1e-9);
        (span.start_tick..)
            .find(|&t| tr.states[t].speed == 0.0)
            .unwrap()
            - span.start_tick
    }

    #[test]
    fn braking_matches_closed_form_stopping_time() {
        for (v, a) in [(2.78f64, 6.0f64), (10.0, 6.0), (7.3, 4.5)] {
            let expect = (v / (a * 0.1)).ceil() as usize;
            assert_eq!(stop_ticks(v, a), expect, "v={v} a={a}");
        }
    }

    #[test]
    fn no_braking_gives_four_phases() {
        let p = CaseStudyParams {
            include_braking: false,
            ..Default::default()
        };
        let s = generate_case_study(&p).unwrap();
        assert_eq!(s.phases.len(), 4);
        assert_eq!(s.phases.last().unwrap().end_tick, p.horizon_ticks);
    }

    #[test]
    fn infeasible_params_name_the_actor() {
        let p = CaseStudyParams {
            lane_change_target_lane: 7,
            ..Default::default()
        };
        match generate_case_study(&p) {
            Err(Error::InfeasibleParams { actor, .. }) => assert_eq!(actor.as_str(), "208"),
            other => panic!("{other:?}"),
        }
        let mut p = CaseStudyParams::default();
        p.npcs[2].cruise_speed = 99.0;
        match generate_case_study(&p) {
            Err(Error::InfeasibleParams { actor, .. }) => assert_eq!(actor.as_str(), "209"),
            other => panic!("{other:?}"),
        }
    }
}
