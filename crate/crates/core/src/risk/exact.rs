//! Set-reduction risk over an enumerable lattice.

use std::collections::BTreeMap;

use super::EgoFrame;
use crate::error::{Error, Result};
use crate::planner::{colliding_actors, enumerate_plans, LatticeConfig, Plan};
use crate::scenario::{ActorId, Scenario, World};

/// The lattice universe together with the actors each member collides with.
/// Every feasible set of interest (full world, world minus one actor) is a
/// filter over this one evaluation.
#[derive(Clone, Debug)]
pub struct LatticeEvaluation {
    pub universe: Vec<Plan>,
    pub blockers: Vec<Vec<ActorId>>,
}

impl LatticeEvaluation {
    pub fn universe_size(&self) -> usize {
        self.universe.len()
    }

    /// Plans feasible when `ignored` (if any) is removed from the world.
    pub fn feasible_mask(&self, ignored: Option<&ActorId>) -> Vec<bool> {
        self.blockers
            .iter()
            .map(|b| match ignored {
                None => b.is_empty(),
                Some(i) => b.iter().all(|a| a == i),
            })
            .collect()
    }

    pub fn feasible_count(&self, ignored: Option<&ActorId>) -> usize {
        self.feasible_mask(ignored)
            .into_iter()
            .filter(|&f| f)
            .count()
    }

    /// `(|Z_empty| - |Z|) / |Z_empty|`.
    pub fn total_risk(&self) -> Result<f64> {
        let n = self.nonzero_universe()?;
        Ok((n - self.feasible_count(None)) as f64 / n as f64)
    }

    /// `(|Z without i| - |Z|) / |Z_empty|`.
    pub fn actor_risk(&self, i: &ActorId) -> Result<f64> {
        let n = self.nonzero_universe()?;
        let gained = self.feasible_count(Some(i)) - self.feasible_count(None);
        Ok(gained as f64 / n as f64)
    }

    fn nonzero_universe(&self) -> Result<usize> {
        match self.universe.len() {
            0 => Err(Error::DegenerateScenario),
            n => Ok(n),
        }
    }
}

/// Enumerates the navigable universe from `frame` and records which actors of
/// `world` block each member.
pub fn evaluate_lattice(
    frame: &EgoFrame,
    world: &World,
    lattice: &LatticeConfig,
) -> Result<LatticeEvaluation> {
    let universe = enumerate_plans(
        &frame.map,
        &frame.ego,
        frame.t,
        frame.k,
        frame.dt,
        lattice,
        None,
        &frame.footprints,
    )?
    .plans;
    let blockers = universe
        .iter()
        .map(|p| colliding_actors(&p.trajectory, world, &frame.footprints, lattice.margin))
        .collect::<Result<_>>()?;
    Ok(LatticeEvaluation { universe, blockers })
}

/// Total set-reduction risk of the ground truth over `[t, t + k]`, with the
/// Ego at its initial state.
pub fn total_risk_exact(s: &Scenario, t: usize, k: usize, lattice: &LatticeConfig) -> Result<f64> {
    let world = s.slice_world(t, k)?;
    evaluate_lattice(&EgoFrame::from_scenario(s, t, k), &world, lattice)?.total_risk()
}

/// Plans that actor `i` alone removes, as a fraction of the universe.
pub fn actor_risk_exact(
    s: &Scenario,
    i: &ActorId,
    t: usize,
    k: usize,
    lattice: &LatticeConfig,
) -> Result<f64> {
    if !s.npc_trajectories.contains_key(i) {
        return Err(Error::UnknownActor(i.clone()));
    }
    let world = s.slice_world(t, k)?;
    evaluate_lattice(&EgoFrame::from_scenario(s, t, k), &world, lattice)?.actor_risk(i)
}

/// Set sizes and risks for every actor from one enumeration.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactRisks {
    pub empty_count: usize,
    pub full_count: usize,
    pub total: f64,
    /// Per actor: `|Z without i|` and the actor risk.
    pub per_actor: BTreeMap<ActorId, (usize, f64)>,
}

pub fn exact_risks(frame: &EgoFrame, world: &World, lattice: &LatticeConfig) -> Result<ExactRisks> {
    let eval = evaluate_lattice(frame, world, lattice)?;
    let per_actor = world
        .ids()
        .map(|id| {
            Ok((
                id.clone(),
                (eval.feasible_count(Some(id)), eval.actor_risk(id)?),
            ))
        })
        .collect::<Result<_>>()?;
    Ok(ExactRisks {
        empty_count: eval.universe_size(),
        full_count: eval.feasible_count(None),
        total: eval.total_risk()?,
        per_actor,
    })
}
