use actor_risk::planner::{
    collision_check, enumerate_plans, plan_sampling, Footprints, LatticeConfig, Maneuver,
    PlannerConfig,
};
use actor_risk::scenario::{ActorId, ActorState, RoadMap, Trajectory, World};
use actor_risk::Error;
use proptest::prelude::*;

const DT: f64 = 0.1;

fn world_from(actors: &[(f64, usize, f64)], k: usize) -> World {
    let map = RoadMap::default();
    World::from_trajectories(actors.iter().enumerate().map(|(i, &(x, lane, v))| {
        let states = (0..=k)
            .map(|j| ActorState::new(x + v * DT * j as f64, map.lane_center(lane), 0.0, v))
            .collect();
        Trajectory::new(ActorId::new(format!("n{i}")), 0, DT, states)
    }))
}

fn actors() -> impl Strategy<Value = Vec<(f64, usize, f64)>> {
    prop::collection::vec((-10.0f64..60.0, 0usize..3, 0.0f64..12.0), 0..4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn lattice_plans_avoid_the_world(ego_lane in 0usize..3, v in 0.0f64..12.0, actors in actors()) {
        let map = RoadMap::default();
        let lattice = LatticeConfig::new(3, 10, &[
            Maneuver::Keep, Maneuver::ShiftLeft, Maneuver::ShiftRight, Maneuver::Brake, Maneuver::Accelerate,
        ]);
        let k = lattice.horizon();
        let ego = ActorState::new(0.0, map.lane_center(ego_lane), 0.0, v);
        let world = world_from(&actors, k);
        let fp = Footprints::default();
        let all = enumerate_plans(&map, &ego, 0, k, DT, &lattice, None, &fp).unwrap();
        let free = enumerate_plans(&map, &ego, 0, k, DT, &lattice, Some(&world), &fp).unwrap();
        prop_assert_eq!(all.universe_size, free.universe_size);
        prop_assert!(free.len() <= all.len());
        for p in &free.plans {
            prop_assert!(!collision_check(&p.trajectory, &world, &fp, lattice.margin).unwrap());
            prop_assert_eq!(p.trajectory.len(), k + 1);
            prop_assert!(p.trajectory.states.iter().all(|s| map.on_road(s.y) && s.speed <= map.speed_limit + 1e-9));
        }
    }

    #[test]
    fn sampled_plans_are_feasible_and_reproducible(
        ego_lane in 0usize..3,
        v in 2.0f64..12.0,
        seed in any::<u64>(),
        actors in actors(),
    ) {
        let map = RoadMap::default();
        let k = 40;
        let ego = ActorState::new(0.0, map.lane_center(ego_lane), 0.0, v);
        let world = world_from(&actors, k);
        let fp = Footprints::default();
        let cfg = PlannerConfig { seed, iteration_budget: 300, ..PlannerConfig::default() };
        match plan_sampling(&map, &ego, 0, k, DT, &world, &cfg, &fp) {
            Ok(plan) => {
                let tr = &plan.trajectory;
                prop_assert_eq!(tr.len(), k + 1);
                prop_assert_eq!(tr.start_tick, 0);
                prop_assert_eq!(tr.states[0].x, ego.x);
                prop_assert!(!collision_check(tr, &world, &fp, 0.0).unwrap());
                prop_assert!(tr.states.windows(2).all(|w| w[1].x >= w[0].x - 1e-9));
                prop_assert!(tr.states.iter().all(|s| map.on_road(s.y)));
                let again = plan_sampling(&map, &ego, 0, k, DT, &world, &cfg, &fp).unwrap();
                prop_assert_eq!(again, plan);
            }
            Err(Error::NoFeasiblePlan) => {}
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }
}
