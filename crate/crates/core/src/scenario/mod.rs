//! World model: road, actors, scripted scenario phases, and the scenario
//! document format.

mod io;
mod script;
mod types;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use io::{load_scenario, save_scenario, SCENARIO_VERSION};
pub use script::{
    generate_case_study, CaseStudyParams, NpcSpec, PhaseCommand, PhaseScript, PhaseSpec, Trigger,
};
pub use types::{wrap_angle, ActorId, ActorState, Radii, RoadMap, Trajectory, World};

use crate::error::{Error, Result};

pub const DEFAULT_DT: f64 = 0.1;
pub const DEFAULT_ACTOR_RADIUS: f64 = 1.2;

/// The five scripted stages of the case study.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseName {
    Init,
    Steady,
    LaneChange,
    Steady2,
    Brake,
}

impl PhaseName {
    pub const ALL: [PhaseName; 5] = [
        PhaseName::Init,
        PhaseName::Steady,
        PhaseName::LaneChange,
        PhaseName::Steady2,
        PhaseName::Brake,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PhaseName::Init => "init",
            PhaseName::Steady => "steady",
            PhaseName::LaneChange => "lane_change",
            PhaseName::Steady2 => "steady2",
            PhaseName::Brake => "brake",
        }
    }
}

impl fmt::Display for PhaseName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PhaseName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PhaseName::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| Error::InvalidScenario(format!("unknown phase name `{s}`")))
    }
}

/// Tick span of one realized phase. `end_tick` is exclusive except for the
/// final phase, which also owns the horizon tick.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseSpan {
    pub name: PhaseName,
    pub start_tick: usize,
    pub end_tick: usize,
}

/// A driving scenario: map, scripted non-Ego trajectories over `[0, T]`, and
/// the Ego's initial state.
#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub version: u32,
    pub map: RoadMap,
    pub dt: f64,
    pub horizon_ticks: usize,
    pub ego_initial: ActorState,
    pub ego_radius: f64,
    pub npc_trajectories: BTreeMap<ActorId, Trajectory>,
    pub radii: Radii,
    pub phases: Vec<PhaseSpan>,
}

impl Scenario {
    /// Scenario with no other actors.
    pub fn empty(map: RoadMap, ego: ActorState, horizon_ticks: usize, dt: f64) -> Self {
        Scenario {
            version: SCENARIO_VERSION,
            map,
            dt,
            horizon_ticks,
            ego_initial: ego,
            ego_radius: DEFAULT_ACTOR_RADIUS,
            npc_trajectories: BTreeMap::new(),
            radii: Radii::default(),
            phases: Vec::new(),
        }
    }

    /// Adds a scripted actor. The trajectory must cover `[0, T]`.
    pub fn with_actor(mut self, traj: Trajectory, radius: f64) -> Self {
        self.radii.per_actor.insert(traj.actor_id.clone(), radius);
        self.npc_trajectories.insert(traj.actor_id.clone(), traj);
        self
    }

    pub fn actor_ids(&self) -> impl Iterator<Item = &ActorId> {
        self.npc_trajectories.keys()
    }

    pub fn validate(&self) -> Result<()> {
        self.map.validate()?;
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidScenario("dt must be > 0".into()));
        }
        self.ego_initial
            .validate()
            .map_err(|e| Error::InvalidScenario(format!("ego.state: {e}")))?;
        if !self.map.on_road(self.ego_initial.y) {
            return Err(Error::InvalidScenario(
                "ego.state: Ego starts off-road".into(),
            ));
        }
        if self.ego_radius.is_nan() || self.ego_radius <= 0.0 {
            return Err(Error::InvalidScenario("ego.radius must be > 0".into()));
        }
        for (id, tr) in &self.npc_trajectories {
            if id.is_ego() {
                return Err(Error::InvalidScenario(format!(
                    "actors[{id}]: id `{}` is reserved for the Ego",
                    ActorId::EGO
                )));
            }
            if tr.start_tick != 0 || tr.len() != self.horizon_ticks + 1 {
                return Err(Error::InvalidScenario(format!(
                    "actors[{id}].states: expected {} states covering ticks 0..={}, found {}",
                    self.horizon_ticks + 1,
                    self.horizon_ticks,
                    tr.len()
                )));
            }
            for (i, s) in tr.states.iter().enumerate() {
                s.validate().map_err(|e| {
                    Error::InvalidScenario(format!("actors[{id}].states[{i}]: {e}"))
                })?;
            }
            tr.check_kinematics()?;
            if self.radii.of(id).is_nan() || self.radii.of(id) <= 0.0 {
                return Err(Error::InvalidScenario(format!(
                    "actors[{id}].radius must be > 0"
                )));
            }
        }
        let mut prev = 0;
        for (i, p) in self.phases.iter().enumerate() {
            if p.start_tick < prev || p.end_tick < p.start_tick || p.end_tick > self.horizon_ticks {
                return Err(Error::InvalidScenario(format!(
                    "phase_metadata[{i}]: span {}..{} is not ordered within the horizon",
                    p.start_tick, p.end_tick
                )));
            }
            prev = p.end_tick;
        }
        Ok(())
    }

    /// Every npc trajectory restricted to `[t, t + k]`.
    pub fn slice_world(&self, t: usize, k: usize) -> Result<World> {
        if t + k > self.horizon_ticks {
            return Err(Error::WindowOutOfRange {
                t,
                k,
                horizon: self.horizon_ticks,
            });
        }
        let mut world = World::new();
        for tr in self.npc_trajectories.values() {
            world.insert(tr.window(t, k)?);
        }
        Ok(world)
    }

    /// Current ground-truth state of every npc.
    pub fn states_at(&self, tick: usize) -> BTreeMap<ActorId, ActorState> {
        self.npc_trajectories
            .iter()
            .filter_map(|(id, tr)| tr.state_at(tick).map(|s| (id.clone(), *s)))
            .collect()
    }

    /// Phase active at `tick`.
    pub fn phase_at(&self, tick: usize) -> Option<PhaseName> {
        let n = self.phases.len();
        self.phases
            .iter()
            .enumerate()
            .find(|(i, p)| {
                p.start_tick <= tick && (tick < p.end_tick || (*i == n - 1 && tick <= p.end_tick))
            })
            .map(|(_, p)| p.name)
    }

    pub fn phase_span(&self, name: PhaseName) -> Option<&PhaseSpan> {
        self.phases.iter().find(|p| p.name == name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn straight(id: &str, x0: f64, lane_y: f64, v: f64, ticks: usize) -> Trajectory {
        let states = (0..=ticks)
            .map(|j| ActorState::new(x0 + v * DEFAULT_DT * j as f64, lane_y, 0.0, v))
            .collect();
        Trajectory::new(ActorId::new(id), 0, DEFAULT_DT, states)
    }

    fn small() -> Scenario {
        let map = RoadMap::default();
        Scenario::empty(map, ActorState::new(0.0, 5.25, 0.0, 10.0), 50, DEFAULT_DT)
            .with_actor(straight("a", 20.0, 5.25, 10.0, 50), 1.2)
            .with_actor(straight("b", 40.0, 1.75, 12.0, 50), 1.0)
    }

    #[test]
    fn identity_window() {
        let s = small();
        let w = s.slice_world(0, 50).unwrap();
        for (id, tr) in &s.npc_trajectories {
            assert_eq!(&w.trajectories[id], tr);
        }
    }

    #[test]
    fn zero_horizon_window() {
        let s = small();
        let w = s.slice_world(17, 0).unwrap();
        for tr in w.iter() {
            assert_eq!(tr.len(), 1);
            assert_eq!(tr.start_tick, 17);
            assert_eq!(tr.states[0], s.npc_trajectories[&tr.actor_id].states[17]);
        }
    }

    #[test]
    fn out_of_range_window() {
        let s = small();
        assert!(matches!(
            s.slice_world(40, 11),
            Err(Error::WindowOutOfRange { .. })
        ));
    }

    #[test]
    fn ego_id_reserved() {
        let s = small().with_actor(straight("ego", 0.0, 1.75, 5.0, 50), 1.0);
        assert!(s.validate().is_err());
    }

    #[test]
    fn phase_lookup() {
        let mut s = small();
        s.phases = vec![
            PhaseSpan {
                name: PhaseName::Init,
                start_tick: 0,
                end_tick: 10,
            },
            PhaseSpan {
                name: PhaseName::Steady,
                start_tick: 10,
                end_tick: 50,
            },
        ];
        assert_eq!(s.phase_at(9), Some(PhaseName::Init));
        assert_eq!(s.phase_at(10), Some(PhaseName::Steady));
        assert_eq!(s.phase_at(50), Some(PhaseName::Steady));
        assert_eq!(s.phase_at(51), None);
    }
}
