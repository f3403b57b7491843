//! Risk quantities: exact set-reduction risk over a lattice, leave-one-out
//! importance, Monte-Carlo expectation and a risk-aware plan selector.

mod exact;
mod importance;
mod mitigation;
mod monte_carlo;
mod operators;

use std::collections::BTreeMap;

pub use exact::{
    actor_risk_exact, evaluate_lattice, exact_risks, total_risk_exact, ExactRisks,
    LatticeEvaluation,
};
pub use importance::{
    actor_importance, euclid_importances, euclid_saturation, kl_importances, kl_saturation,
    Operator,
};
pub use mitigation::{select_min_risk_plan, Selection};
pub use monte_carlo::{
    expected_actor_risk, expected_importances, monte_carlo_importance, RunningStats,
};
pub use operators::{plan_divergence_kl, traj_difference_euclidean, PlanDistribution, KL_EPSILON};

use crate::planner::Footprints;
use crate::scenario::{ActorId, ActorState, RoadMap, Scenario};

/// Everything about the Ego that a risk query needs besides the world.
#[derive(Clone, Debug, PartialEq)]
pub struct EgoFrame {
    pub map: RoadMap,
    pub ego: ActorState,
    pub t: usize,
    pub k: usize,
    pub dt: f64,
    pub footprints: Footprints,
}

impl EgoFrame {
    /// Frame with the Ego at the scenario's initial state, re-timed to `t`.
    pub fn from_scenario(s: &Scenario, t: usize, k: usize) -> Self {
        EgoFrame {
            map: s.map,
            ego: s.ego_initial,
            t,
            k,
            dt: s.dt,
            footprints: Footprints {
                ego_radius: s.ego_radius,
                radii: s.radii.clone(),
            },
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ActorRisk {
    pub gamma_euclid: Option<f64>,
    pub gamma_kl: Option<f64>,
    pub rho_exact: Option<f64>,
    pub mean_gamma: Option<f64>,
    pub var_gamma: Option<f64>,
    /// Known only once the realized future is available.
    pub prediction_error: Option<f64>,
}

/// Risk of every actor at one planning step.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RiskReport {
    pub t: usize,
    pub k: usize,
    pub per_actor: BTreeMap<ActorId, ActorRisk>,
    pub total_rho: Option<f64>,
}
