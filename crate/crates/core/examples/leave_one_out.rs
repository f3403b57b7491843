//! Leave-one-out importance under both difference operators.
//!
//! A stopped car ahead in the Ego's lane forces a lane change, so removing it
//! changes the plan a lot. A car far down the road never interacts with the
//! planner and scores exactly zero.
//!
//! cargo run --release --example leave_one_out

use actor_risk::harness::default_lattice;
use actor_risk::planner::{Footprints, PlannerConfig};
use actor_risk::risk::{actor_importance, EgoFrame, Operator};
use actor_risk::scenario::{ActorId, ActorState, RoadMap, Trajectory, World};

fn main() -> actor_risk::Result<()> {
    let map = RoadMap::default();
    let k = 60;
    let dt = 0.1;
    let ego = ActorState::new(0.0, map.lane_center(1), 0.0, 10.0);
    let frame = EgoFrame {
        map,
        ego,
        t: 0,
        k,
        dt,
        footprints: Footprints::default(),
    };
    let stopped = ActorState::new(30.0, map.lane_center(1), 0.0, 0.0);
    let distant = ActorState::new(2900.0, map.lane_center(0), 0.0, 0.0);
    let world = World::from_trajectories([
        Trajectory::new(ActorId::new("stopped"), 0, dt, vec![stopped; k + 1]),
        Trajectory::new(ActorId::new("distant"), 0, dt, vec![distant; k + 1]),
    ]);
    let planner = PlannerConfig {
        seed: 7,
        ..PlannerConfig::default()
    };
    let lattice = default_lattice(k);

    println!("{:>8} {:>12} {:>12}", "actor", "euclid (m)", "kl (nats)");
    for id in world.ids() {
        let euclid = actor_importance(&frame, &world, id, &planner, Operator::Euclid, None)?;
        let kl = actor_importance(&frame, &world, id, &planner, Operator::Kl, Some(&lattice))?;
        println!("{id:>8} {euclid:>12.3} {kl:>12.4}");
    }
    Ok(())
}
