//! Expected importance under noisy behavior prediction.
//!
//! Each Monte-Carlo sample perturbs every actor's predicted future with
//! Gaussian acceleration and yaw-rate noise, replans, and scores the actor.
//! With the noise switched off all samples agree and the variance is zero.
//!
//! cargo run --release --example monte_carlo_risk -- [samples]

use actor_risk::planner::{Footprints, PlannerConfig};
use actor_risk::prediction::PredictionConfig;
use actor_risk::risk::{expected_importances, EgoFrame, Operator};
use actor_risk::scenario::{ActorId, ActorState, RoadMap, Trajectory, World};

fn history(id: &str, x0: f64, lane: usize, speed: f64, ticks: usize) -> Trajectory {
    let map = RoadMap::default();
    let states = (0..=ticks)
        .map(|i| {
            ActorState::new(
                x0 + speed * 0.1 * i as f64,
                map.lane_center(lane),
                0.0,
                speed,
            )
        })
        .collect();
    Trajectory::new(ActorId::new(id), 0, 0.1, states)
}

fn main() -> actor_risk::Result<()> {
    let samples: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(32);
    let map = RoadMap::default();
    let t = 10;
    let k = 60;
    // Histories over ticks 0..=t; the Ego is at x = 20 by then.
    let histories = World::from_trajectories([
        history("lead", 35.0, 1, 8.0, t),
        history("left", 15.0, 2, 11.0, t),
    ]);
    let frame = EgoFrame {
        map,
        ego: ActorState::new(20.0, map.lane_center(1), 0.0, 10.0),
        t,
        k,
        dt: 0.1,
        footprints: Footprints::default(),
    };
    let planner = PlannerConfig {
        seed: 11,
        target_speed: Some(12.0),
        ..PlannerConfig::default()
    };

    for (label, sigma) in [("noiseless", 0.0), ("noisy", 1.0)] {
        let prediction = PredictionConfig {
            noise_accel_sigma: sigma,
            noise_yawrate_sigma: 0.1 * sigma,
            sample_count: samples,
            seed: 3,
        };
        let stats = expected_importances(
            &frame,
            &histories,
            &prediction,
            &planner,
            Operator::Euclid,
            None,
        )?;
        println!("{label} ({samples} samples)");
        for (id, (mean, var)) in stats {
            println!("  {id:>5}: mean {mean:.3}  variance {var:.4}");
        }
    }
    Ok(())
}
