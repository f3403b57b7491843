//! Leave-one-out actor importance.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use super::exact::evaluate_lattice;
use super::operators::{
    plan_divergence_kl, traj_difference_euclidean, PlanDistribution, KL_EPSILON,
};
use super::EgoFrame;
use crate::error::{Error, Result};
use crate::planner::{plan_sampling, plan_sampling_traced, LatticeConfig, Plan, PlannerConfig};
use crate::scenario::{ActorId, World};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Operator {
    /// Mean waypoint displacement between the two sampled plans.
    Euclid,
    /// KL divergence between lattice plan distributions.
    Kl,
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Operator::Euclid => "euclid",
            Operator::Kl => "kl",
        })
    }
}

impl FromStr for Operator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "euclid" => Ok(Operator::Euclid),
            "kl" => Ok(Operator::Kl),
            other => Err(Error::InvalidConfig(format!("unknown operator `{other}`"))),
        }
    }
}

/// Value reported for the Euclidean operator when exactly one of the two
/// worlds admits a plan: the road length spread over the horizon.
pub fn euclid_saturation(frame: &EgoFrame) -> f64 {
    frame.map.road_length / frame.k.max(1) as f64
}

fn plan_or_none(r: Result<Plan>) -> Result<Option<Plan>> {
    match r {
        Ok(p) => Ok(Some(p)),
        Err(Error::NoFeasiblePlan) => Ok(None),
        Err(e) => Err(e),
    }
}

fn euclid_gap(frame: &EgoFrame, full: &Option<Plan>, ablated: &Option<Plan>) -> f64 {
    match (full, ablated) {
        (Some(a), Some(b)) => traj_difference_euclidean(&a.trajectory, &b.trajectory),
        (None, None) => 0.0,
        _ => euclid_saturation(frame),
    }
}

/// Importance of actor `i`: how much the Ego's plan changes when `i` is
/// removed from `world`. Both runs share the planner seed.
pub fn actor_importance(
    frame: &EgoFrame,
    world: &World,
    i: &ActorId,
    planner: &PlannerConfig,
    operator: Operator,
    lattice: Option<&LatticeConfig>,
) -> Result<f64> {
    if !world.contains(i) {
        return Err(Error::UnknownActor(i.clone()));
    }
    match operator {
        Operator::Euclid => {
            let run = |w: &World| {
                plan_or_none(plan_sampling(
                    &frame.map,
                    &frame.ego,
                    frame.t,
                    frame.k,
                    frame.dt,
                    w,
                    planner,
                    &frame.footprints,
                ))
            };
            let full = run(world)?;
            let ablated = run(&world.without(i))?;
            Ok(euclid_gap(frame, &full, &ablated))
        }
        Operator::Kl => {
            let lattice = lattice.ok_or_else(|| {
                Error::InvalidConfig("the kl operator needs a lattice configuration".into())
            })?;
            Ok(kl_importances(frame, world, lattice)?[i])
        }
    }
}

/// Euclidean importance of every actor in `world`. The full world is planned
/// once; actors that never blocked a checked edge get exactly zero without a
/// second run, since removing them cannot change any collision answer.
pub fn euclid_importances(
    frame: &EgoFrame,
    world: &World,
    planner: &PlannerConfig,
) -> Result<(Option<Plan>, BTreeMap<ActorId, f64>)> {
    let traced = match plan_sampling_traced(
        &frame.map,
        &frame.ego,
        frame.t,
        frame.k,
        frame.dt,
        world,
        planner,
        &frame.footprints,
    ) {
        Ok(o) => Some(o),
        Err(Error::NoFeasiblePlan) => None,
        Err(e) => return Err(e),
    };
    let full = traced.as_ref().map(|o| o.plan.clone());
    let mut out = BTreeMap::new();
    for id in world.ids() {
        let skip = traced.as_ref().is_some_and(|o| !o.touched.contains(id));
        let gamma = if skip {
            0.0
        } else {
            let ablated = plan_or_none(plan_sampling(
                &frame.map,
                &frame.ego,
                frame.t,
                frame.k,
                frame.dt,
                &world.without(id),
                planner,
                &frame.footprints,
            ))?;
            euclid_gap(frame, &full, &ablated)
        };
        out.insert(id.clone(), gamma);
    }
    Ok((full, out))
}

/// Value reported for the KL operator when the full world admits no plan
/// but the ablated one does: KL of the ablated distribution against the bare
/// floor mass `epsilon / |universe|`. It exceeds every unsaturated value.
pub fn kl_saturation(ablated: &PlanDistribution) -> f64 {
    let floor = KL_EPSILON / ablated.universe_size() as f64;
    ablated
        .probabilities()
        .iter()
        .map(|&q| q * (q / floor).ln())
        .sum()
}

/// KL importance of every actor: `KL(P_full || P_without_i)` over the floored
/// lattice distributions, or `kl_saturation` when only the ablated world is
/// feasible.
pub fn kl_importances(
    frame: &EgoFrame,
    world: &World,
    lattice: &LatticeConfig,
) -> Result<BTreeMap<ActorId, f64>> {
    let eval = evaluate_lattice(frame, world, lattice)?;
    if eval.universe_size() == 0 {
        return Err(Error::DegenerateScenario);
    }
    let full_infeasible = eval.feasible_count(None) == 0;
    let full = PlanDistribution::from_feasible(&eval.feasible_mask(None), KL_EPSILON);
    world
        .ids()
        .map(|id| {
            let mask = eval.feasible_mask(Some(id));
            let q = PlanDistribution::from_feasible(&mask, KL_EPSILON);
            let gamma = if full_infeasible && mask.contains(&true) {
                kl_saturation(&q)
            } else {
                plan_divergence_kl(&full, &q)?
            };
            Ok((id.clone(), gamma))
        })
        .collect()
}
