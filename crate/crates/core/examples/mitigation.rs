//! Risk-aware plan selection.
//!
//! The Ego follows a car that may brake hard. Candidate plans are scored by
//! how often they collide across sampled futures; the selector avoids the
//! follow plan and the choice is then checked against the realized braking.
//!
//! cargo run --example mitigation

use actor_risk::planner::{
    collision_check, render_sequence, Footprints, LatticeConfig, Maneuver, Plan, PlanSet,
};
use actor_risk::risk::select_min_risk_plan;
use actor_risk::scenario::{ActorId, ActorState, RoadMap, Trajectory, World};

const DT: f64 = 0.1;

fn lead(map: &RoadMap, k: usize, decel: f64) -> World {
    let mut s = ActorState::new(14.0, map.lane_center(1), 0.0, 10.0);
    let mut states = vec![s];
    for _ in 0..k {
        let v = (s.speed - decel * DT).max(0.0);
        s = ActorState::new(s.x + 0.5 * (s.speed + v) * DT, s.y, 0.0, v);
        states.push(s);
    }
    World::from_trajectories([Trajectory::new(ActorId::new("lead"), 0, DT, states)])
}

fn main() -> actor_risk::Result<()> {
    let map = RoadMap::default();
    let ego = ActorState::new(0.0, map.lane_center(1), 0.0, 10.0);
    let lattice = LatticeConfig::new(2, 20, &[Maneuver::Keep, Maneuver::ShiftLeft]);
    let k = lattice.horizon();
    let footprints = Footprints::default();

    let mut plans = Vec::new();
    for seq in [
        [Maneuver::Keep, Maneuver::Keep],
        [Maneuver::ShiftLeft, Maneuver::Keep],
    ] {
        let (trajectory, cost) =
            render_sequence(&map, &ego, 0, DT, &lattice, &seq).expect("stays on the road");
        plans.push(Plan {
            trajectory,
            cost,
            maneuver_seq: Some(seq.to_vec()),
            partial: false,
        });
    }
    let candidates = PlanSet {
        universe_size: plans.len(),
        plans,
    };

    // Half the sampled futures keep speed, half brake at 6 m/s².
    let worlds: Vec<World> = (0..20)
        .map(|j| lead(&map, k, if j % 2 == 0 { 0.0 } else { 6.0 }))
        .collect();
    let choice = select_min_risk_plan(&candidates, &worlds, &footprints, 0.0)?;
    println!(
        "selected plan {} {:?} (collision frequency {:.2})",
        choice.index, choice.plan.maneuver_seq, choice.collision_frequency
    );

    let truth = lead(&map, k, 6.0);
    for (i, p) in candidates.plans.iter().enumerate() {
        let hit = collision_check(&p.trajectory, &truth, &footprints, 0.0)?;
        println!(
            "plan {i} {:?}: collides with the realized braking = {hit}",
            p.maneuver_seq
        );
    }
    Ok(())
}
