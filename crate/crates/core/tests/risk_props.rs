use actor_risk::planner::{Footprints, LatticeConfig, Maneuver, PlannerConfig};
use actor_risk::risk::{
    euclid_importances, euclid_saturation, exact_risks, kl_importances, EgoFrame, RunningStats,
};
use actor_risk::scenario::{ActorId, ActorState, RoadMap, Trajectory, World};
use approx::assert_relative_eq;
use proptest::prelude::*;

const DT: f64 = 0.1;

fn frame(lane: usize, v: f64, k: usize) -> EgoFrame {
    let map = RoadMap::default();
    EgoFrame {
        map,
        ego: ActorState::new(0.0, map.lane_center(lane), 0.0, v),
        t: 0,
        k,
        dt: DT,
        footprints: Footprints::default(),
    }
}

fn world_from(map: &RoadMap, actors: &[(f64, usize, f64)], k: usize) -> World {
    World::from_trajectories(actors.iter().enumerate().map(|(i, &(x, lane, v))| {
        let states = (0..=k)
            .map(|j| ActorState::new(x + v * DT * j as f64, map.lane_center(lane), 0.0, v))
            .collect();
        Trajectory::new(ActorId::new(format!("n{i}")), 0, DT, states)
    }))
}

fn actors() -> impl Strategy<Value = Vec<(f64, usize, f64)>> {
    prop::collection::vec((-10.0f64..60.0, 0usize..3, 0.0f64..12.0), 0..5)
}

fn lattice() -> LatticeConfig {
    LatticeConfig::new(
        3,
        10,
        &[
            Maneuver::Keep,
            Maneuver::ShiftLeft,
            Maneuver::ShiftRight,
            Maneuver::Brake,
            Maneuver::Accelerate,
        ],
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exact_risks_are_ordered(lane in 0usize..3, v in 0.0f64..12.0, actors in actors()) {
        let f = frame(lane, v, 30);
        let world = world_from(&f.map, &actors, 30);
        let r = exact_risks(&f, &world, &lattice()).unwrap();
        prop_assert!(r.full_count <= r.empty_count);
        prop_assert!((0.0..=1.0).contains(&r.total));
        for (without, rho) in r.per_actor.values() {
            prop_assert!(r.full_count <= *without && *without <= r.empty_count);
            prop_assert!(*rho >= 0.0 && *rho <= r.total + 1e-12);
        }
    }

    #[test]
    fn kl_vanishes_exactly_for_non_blockers(lane in 0usize..3, v in 0.0f64..12.0, actors in actors()) {
        let f = frame(lane, v, 30);
        let world = world_from(&f.map, &actors, 30);
        let r = exact_risks(&f, &world, &lattice()).unwrap();
        let kl = kl_importances(&f, &world, &lattice()).unwrap();
        for (id, (without, _)) in &r.per_actor {
            prop_assert!(kl[id] >= 0.0);
            prop_assert_eq!(kl[id] == 0.0, *without == r.full_count);
            if r.full_count == 0 && *without > 0 {
                // Saturated: above any unsaturated divergence on this universe.
                prop_assert!(kl[id] > (r.empty_count as f64).ln());
            }
        }
    }

    #[test]
    fn euclid_importance_is_bounded(lane in 0usize..3, v in 2.0f64..12.0, seed in any::<u64>(), actors in actors()) {
        let f = frame(lane, v, 30);
        let world = world_from(&f.map, &actors, 30);
        let cfg = PlannerConfig { seed, iteration_budget: 200, ..PlannerConfig::default() };
        let (_, gammas) = euclid_importances(&f, &world, &cfg).unwrap();
        let cap = euclid_saturation(&f);
        prop_assert_eq!(gammas.len(), world.len());
        for g in gammas.values() {
            prop_assert!(*g >= 0.0 && *g <= cap + 1e-9);
        }
    }

    #[test]
    fn running_stats_match_two_pass(xs in prop::collection::vec(-1e3f64..1e3, 2..200)) {
        let mut s = RunningStats::default();
        xs.iter().for_each(|&x| s.push(x));
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        assert_relative_eq!(s.mean(), mean, epsilon = 1e-9, max_relative = 1e-9);
        assert_relative_eq!(s.variance(), var, epsilon = 1e-6, max_relative = 1e-9);
    }
}
