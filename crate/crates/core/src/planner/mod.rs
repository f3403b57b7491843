//! Ego planners: an exhaustive maneuver lattice for exact counting and a
//! budgeted sampling planner for per-tick replanning.

mod collision;
pub mod lattice;
pub mod sampling;

pub use collision::{colliding_actors, collision_check, Footprints};
pub use lattice::{enumerate_plans, render_sequence, LatticeConfig, Maneuver};
pub use sampling::{plan_sampling, plan_sampling_traced, PlannerConfig, SamplingOutcome};

use crate::scenario::Trajectory;

/// Cost added per lane boundary crossed.
pub const LANE_CHANGE_PENALTY: f64 = 2.0;
/// Cost per m/s of commanded speed change.
pub const SPEED_CHANGE_WEIGHT: f64 = 0.5;

#[derive(Clone, Debug, PartialEq)]
pub struct Plan {
    pub trajectory: Trajectory,
    pub cost: f64,
    /// Set for lattice plans.
    pub maneuver_seq: Option<Vec<Maneuver>>,
    /// True when the sampling planner did not reach the goal region.
    pub partial: bool,
}

/// Plans that survived collision filtering plus the size of the unfiltered
/// universe they were drawn from.
#[derive(Clone, Debug, PartialEq)]
pub struct PlanSet {
    pub plans: Vec<Plan>,
    pub universe_size: usize,
}

impl PlanSet {
    pub fn len(&self) -> usize {
        self.plans.len()
    }

    pub fn is_empty(&self) -> bool {
        self.plans.is_empty()
    }
}
