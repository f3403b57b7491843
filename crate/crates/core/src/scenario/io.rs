//! Scenario document: versioned TOML.
//!
//! ```toml
//! version = 1
//! dt = 0.1
//! horizon_ticks = 1905
//!
//! [map]
//! lane_count = 3
//! lane_width = 3.5
//! road_length = 3000.0
//! speed_limit = 25.0
//!
//! [ego]
//! state = [0.0, 5.25, 0.0, 0.0]   # x, y, heading, speed
//! radius = 1.2
//!
//! [[actors]]
//! id = "208"
//! radius = 1.2
//! states = [[22.0, 1.75, 0.0, 0.0], ...]
//!
//! [[phase_metadata]]
//! name = "init"
//! start_tick = 0
//! end_tick = 374
//! ```

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{ActorId, ActorState, PhaseSpan, Radii, RoadMap, Scenario, Trajectory};
use crate::error::{Error, Result};

pub const SCENARIO_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    version: u32,
    dt: f64,
    horizon_ticks: usize,
    map: RoadMap,
    ego: EgoDoc,
    #[serde(default)]
    actors: Vec<ActorDoc>,
    #[serde(default)]
    phase_metadata: Vec<PhaseSpan>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EgoDoc {
    state: [f64; 4],
    radius: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ActorDoc {
    id: ActorId,
    radius: f64,
    states: Vec<[f64; 4]>,
}

pub fn save_scenario(s: &Scenario) -> Result<String> {
    let doc = Document {
        version: s.version,
        dt: s.dt,
        horizon_ticks: s.horizon_ticks,
        map: s.map,
        ego: EgoDoc {
            state: s.ego_initial.to_array(),
            radius: s.ego_radius,
        },
        actors: s
            .npc_trajectories
            .iter()
            .map(|(id, tr)| ActorDoc {
                id: id.clone(),
                radius: s.radii.of(id),
                states: tr.states.iter().map(|st| st.to_array()).collect(),
            })
            .collect(),
        phase_metadata: s.phases.clone(),
    };
    Ok(toml::to_string(&doc)?)
}

pub fn load_scenario(text: &str) -> Result<Scenario> {
    let doc: Document = toml::from_str(text)?;
    if doc.version == 0 || doc.version > SCENARIO_VERSION {
        return Err(Error::InvalidScenario(format!(
            "version: unsupported document version {}",
            doc.version
        )));
    }
    let mut seen = BTreeSet::new();
    let mut trajs = BTreeMap::new();
    let mut per_actor = BTreeMap::new();
    for (i, a) in doc.actors.into_iter().enumerate() {
        if !seen.insert(a.id.clone()) {
            return Err(Error::InvalidScenario(format!(
                "actors[{i}].id: duplicate actor id `{}`",
                a.id
            )));
        }
        if a.states.len() != doc.horizon_ticks + 1 {
            return Err(Error::InvalidScenario(format!(
                "actors[{i}].states: actor `{}` has {} states but horizon_ticks = {} requires {}",
                a.id,
                a.states.len(),
                doc.horizon_ticks,
                doc.horizon_ticks + 1
            )));
        }
        let states = a.states.into_iter().map(ActorState::from_array).collect();
        per_actor.insert(a.id.clone(), a.radius);
        trajs.insert(a.id.clone(), Trajectory::new(a.id, 0, doc.dt, states));
    }
    let scenario = Scenario {
        version: doc.version,
        map: doc.map,
        dt: doc.dt,
        horizon_ticks: doc.horizon_ticks,
        ego_initial: ActorState::from_array(doc.ego.state),
        ego_radius: doc.ego.radius,
        npc_trajectories: trajs,
        radii: Radii {
            default: super::DEFAULT_ACTOR_RADIUS,
            per_actor,
        },
        phases: doc.phase_metadata,
    };
    scenario.validate()?;
    Ok(scenario)
}
