//! Exact set-reduction risk on a small maneuver lattice.
//!
//! The Ego sits in the middle of a three-lane road. A car abreast in the
//! left lane removes every plan that ever enters that lane; two cars stacked
//! in the same lane show how leave-one-out ablation can mask redundant
//! blockers.
//!
//! cargo run --example exact_oracle

use actor_risk::planner::{Footprints, LatticeConfig};
use actor_risk::risk::{exact_risks, EgoFrame};
use actor_risk::scenario::{ActorId, ActorState, RoadMap, Trajectory, World};

fn parked(id: &str, x: f64, lane: usize, k: usize) -> Trajectory {
    let map = RoadMap::default();
    let st = ActorState::new(x, map.lane_center(lane), 0.0, 0.0);
    Trajectory::new(ActorId::new(id), 0, 0.1, vec![st; k + 1])
}

fn report(
    title: &str,
    frame: &EgoFrame,
    world: &World,
    lattice: &LatticeConfig,
) -> actor_risk::Result<()> {
    let r = exact_risks(frame, world, lattice)?;
    println!("{title}");
    println!(
        "  |Z_empty| = {}, |Z| = {}, total rho = {:.4}",
        r.empty_count, r.full_count, r.total
    );
    for (id, (without, rho)) in &r.per_actor {
        println!("  actor {id:>8}: |Z without| = {without:>2}, rho = {rho:.4}");
    }
    Ok(())
}

fn main() -> actor_risk::Result<()> {
    let map = RoadMap::default();
    let k = 30;
    let frame = EgoFrame {
        map,
        ego: ActorState::new(0.0, map.lane_center(1), 0.0, 0.0),
        t: 0,
        k,
        dt: 0.1,
        footprints: Footprints::default(),
    };
    // Three decisions of one second each, lateral moves only.
    let lattice = LatticeConfig::lateral(3, 10);

    report("empty road", &frame, &World::new(), &lattice)?;

    let world =
        World::from_trajectories([parked("blocker", 0.0, 2, k), parked("far", 2500.0, 0, k)]);
    report(
        "\nblocker abreast in lane 2, one actor far away",
        &frame,
        &world,
        &lattice,
    )?;

    let world = World::from_trajectories([parked("a", 0.0, 2, k), parked("b", 0.5, 2, k)]);
    report("\ntwo redundant blockers", &frame, &world, &lattice)?;
    Ok(())
}
