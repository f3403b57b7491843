//! Risk-aware choice among candidate plans.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::planner::{collision_check, Footprints, Plan, PlanSet};
use crate::scenario::World;

#[derive(Clone, Debug, PartialEq)]
pub struct Selection {
    pub plan: Plan,
    /// Index of the plan within the candidate set.
    pub index: usize,
    /// Fraction of sampled worlds in which the plan collides.
    pub collision_frequency: f64,
    /// Every candidate collided in every sampled world.
    pub all_collide: bool,
}

/// Picks the candidate with the lowest collision frequency over `worlds`.
/// Ties go to the cheaper plan, then to the lexicographically smaller maneuver
/// sequence.
pub fn select_min_risk_plan(
    candidates: &PlanSet,
    worlds: &[World],
    footprints: &Footprints,
    margin: f64,
) -> Result<Selection> {
    if candidates.is_empty() || worlds.is_empty() {
        return Err(Error::InvalidConfig(
            "plan selection needs at least one candidate and one sampled world".into(),
        ));
    }
    let mut freq = Vec::with_capacity(candidates.len());
    for p in &candidates.plans {
        let mut hits = 0usize;
        for w in worlds {
            hits += collision_check(&p.trajectory, w, footprints, margin)? as usize;
        }
        freq.push(hits as f64 / worlds.len() as f64);
    }
    let order = |a: usize, b: usize| {
        let (pa, pb) = (&candidates.plans[a], &candidates.plans[b]);
        freq[a]
            .total_cmp(&freq[b])
            .then(pa.cost.total_cmp(&pb.cost))
            .then_with(|| pa.maneuver_seq.cmp(&pb.maneuver_seq))
            .then(a.cmp(&b))
    };
    let best = (1..candidates.len()).fold(0, |best, j| {
        if order(j, best) == Ordering::Less {
            j
        } else {
            best
        }
    });
    Ok(Selection {
        plan: candidates.plans[best].clone(),
        index: best,
        collision_frequency: freq[best],
        all_collide: freq.iter().all(|&f| f == 1.0),
    })
}
