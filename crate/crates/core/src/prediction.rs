//! Linear behavior prediction, Gaussian-perturbed future sampling and
//! prediction-error measurement.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::scenario::{wrap_angle, ActorId, ActorState, Trajectory, World};

/// Noise model for sampled futures: independent per-tick Gaussian
/// perturbations on longitudinal acceleration and heading rate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PredictionConfig {
    pub noise_accel_sigma: f64,
    pub noise_yawrate_sigma: f64,
    pub sample_count: usize,
    pub seed: u64,
}

impl Default for PredictionConfig {
    fn default() -> Self {
        PredictionConfig {
            noise_accel_sigma: 0.0,
            noise_yawrate_sigma: 0.0,
            sample_count: 1,
            seed: 0,
        }
    }
}

impl PredictionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.noise_accel_sigma >= 0.0 && self.noise_yawrate_sigma >= 0.0) {
            return Err(Error::InvalidConfig("noise sigmas must be >= 0".into()));
        }
        if self.sample_count < 1 {
            return Err(Error::InvalidConfig("sample_count must be >= 1".into()));
        }
        Ok(())
    }

    pub fn is_noiseless(&self) -> bool {
        self.noise_accel_sigma == 0.0 && self.noise_yawrate_sigma == 0.0
    }
}

/// Predictions for every npc over `[t, t + k]`.
#[derive(Clone, Debug, PartialEq)]
pub enum PredictedWorld {
    Deterministic {
        t: usize,
        k: usize,
        predictions: World,
    },
    Sampled {
        t: usize,
        k: usize,
        predictions: BTreeMap<ActorId, Vec<Trajectory>>,
    },
}

impl PredictedWorld {
    /// Joint world formed by taking sample `j` of every actor. For a
    /// deterministic prediction every index yields the same world.
    pub fn joint_sample(&self, j: usize) -> World {
        match self {
            PredictedWorld::Deterministic { predictions, .. } => predictions.clone(),
            PredictedWorld::Sampled { predictions, .. } => World::from_trajectories(
                predictions.values().map(|v| v[j.min(v.len() - 1)].clone()),
            ),
        }
    }
}

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stream key for `(seed, actor, tick, sample)`. Independent of which other
/// actors are present, so ablated worlds reuse identical draws.
pub fn stream_key(seed: u64, actor: &ActorId, t: usize, sample: usize) -> u64 {
    // FNV-1a over the id bytes keeps the key stable across runs and platforms.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in actor.as_str().bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    mix(mix(mix(seed ^ h) ^ t as u64) ^ sample as u64)
}

fn integrate(
    start: ActorState,
    actor: ActorId,
    t: usize,
    dt: f64,
    k: usize,
    mut noise: impl FnMut() -> (f64, f64),
) -> Trajectory {
    let mut states = Vec::with_capacity(k + 1);
    let mut s = start;
    states.push(s);
    for _ in 0..k {
        let (accel, yawrate) = noise();
        let v = (s.speed + accel * dt).max(0.0);
        let h = wrap_angle(s.heading + yawrate * dt);
        s = ActorState {
            x: s.x + v * h.cos() * dt,
            y: s.y + v * h.sin() * dt,
            heading: h,
            speed: v,
        };
        states.push(s);
    }
    Trajectory::new(actor, t, dt, states)
}

/// Constant-velocity, constant-heading extrapolation of the last state of
/// `history` over `k` ticks.
pub fn predict_linear(history: &Trajectory, k: usize) -> Result<Trajectory> {
    let last = *history.last().ok_or(Error::EmptyHistory)?;
    Ok(integrate(
        last,
        history.actor_id.clone(),
        history.end_tick(),
        history.dt,
        k,
        || (0.0, 0.0),
    ))
}

/// Perturbed future number `sample` of `history`'s last state, drawn from the
/// stream keyed by `(seed, actor_id, t, sample)`.
pub fn sample_prediction(
    history: &Trajectory,
    k: usize,
    cfg: &PredictionConfig,
    sample: usize,
) -> Result<Trajectory> {
    let last = *history.last().ok_or(Error::EmptyHistory)?;
    let t = history.end_tick();
    let mut rng = ChaCha8Rng::seed_from_u64(stream_key(cfg.seed, &history.actor_id, t, sample));
    Ok(integrate(
        last,
        history.actor_id.clone(),
        t,
        history.dt,
        k,
        || {
            let za: f64 = StandardNormal.sample(&mut rng);
            let zy: f64 = StandardNormal.sample(&mut rng);
            (za * cfg.noise_accel_sigma, zy * cfg.noise_yawrate_sigma)
        },
    ))
}

/// `cfg.sample_count` perturbed futures of `history`'s last state.
pub fn sample_predictions(
    history: &Trajectory,
    k: usize,
    cfg: &PredictionConfig,
) -> Result<Vec<Trajectory>> {
    cfg.validate()?;
    (0..cfg.sample_count)
        .map(|j| sample_prediction(history, k, cfg, j))
        .collect()
}

/// Joint world made of sample `j` of every actor in `histories`.
pub fn sample_joint_world(
    histories: &World,
    k: usize,
    cfg: &PredictionConfig,
    sample: usize,
) -> Result<World> {
    let mut out = World::new();
    for h in histories.iter() {
        out.insert(sample_prediction(h, k, cfg, sample)?);
    }
    Ok(out)
}

/// Deterministic linear predictions for every actor.
pub fn predict_world(histories: &World, k: usize) -> Result<PredictedWorld> {
    let mut out = World::new();
    let mut t = 0;
    for h in histories.iter() {
        let p = predict_linear(h, k)?;
        t = p.start_tick;
        out.insert(p);
    }
    Ok(PredictedWorld::Deterministic {
        t,
        k,
        predictions: out,
    })
}

/// Sampled predictions for every actor.
pub fn sample_world(histories: &World, k: usize, cfg: &PredictionConfig) -> Result<PredictedWorld> {
    let mut out = BTreeMap::new();
    let mut t = 0;
    for h in histories.iter() {
        let p = sample_predictions(h, k, cfg)?;
        t = h.end_tick();
        out.insert(h.actor_id.clone(), p);
    }
    Ok(PredictedWorld::Sampled {
        t,
        k,
        predictions: out,
    })
}

/// Mean Euclidean position displacement over aligned waypoints.
pub fn prediction_error(predicted: &Trajectory, realized: &Trajectory) -> Result<f64> {
    if predicted.start_tick != realized.start_tick || predicted.len() != realized.len() {
        return Err(Error::WindowMismatch(format!(
            "predicted covers {}..={}, realized covers {}..={}",
            predicted.start_tick,
            predicted.end_tick(),
            realized.start_tick,
            realized.end_tick()
        )));
    }
    if predicted.is_empty() {
        return Ok(0.0);
    }
    let sum: f64 = predicted
        .states
        .iter()
        .zip(&realized.states)
        .map(|(a, b)| a.distance_to(b))
        .sum();
    Ok(sum / predicted.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hist(x: f64, y: f64, h: f64, v: f64) -> Trajectory {
        Trajectory::new(
            ActorId::new("a"),
            10,
            0.1,
            vec![ActorState::new(x, y, h, v)],
        )
    }

    #[test]
    fn linear_closed_form() {
        let p = predict_linear(&hist(0.0, 0.0, 0.0, 10.0), 30).unwrap();
        assert_eq!(p.start_tick, 10);
        assert_eq!(p.len(), 31);
        for (j, s) in p.states.iter().enumerate() {
            assert!((s.x - j as f64 * 0.1 * 10.0).abs() < 1e-9);
            assert_eq!(s.y, 0.0);
            assert_eq!(s.speed, 10.0);
            assert_eq!(s.heading, 0.0);
        }
    }

    #[test]
    fn empty_history_errors() {
        let h = Trajectory::new(ActorId::new("a"), 0, 0.1, vec![]);
        assert!(matches!(predict_linear(&h, 5), Err(Error::EmptyHistory)));
    }

    #[test]
    fn zero_noise_samples_equal_linear() {
        let h = hist(3.0, 1.0, 0.2, 8.0);
        let cfg = PredictionConfig {
            sample_count: 4,
            seed: 9,
            ..Default::default()
        };
        let lin = predict_linear(&h, 20).unwrap();
        for s in sample_predictions(&h, 20, &cfg).unwrap() {
            assert_eq!(s, lin);
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let h = hist(0.0, 0.0, 0.0, 10.0);
        let cfg = PredictionConfig {
            noise_accel_sigma: 1.0,
            noise_yawrate_sigma: 0.1,
            sample_count: 5,
            seed: 42,
        };
        let a = sample_predictions(&h, 15, &cfg).unwrap();
        assert_eq!(a, sample_predictions(&h, 15, &cfg).unwrap());
        assert_ne!(a[0], a[1]);
    }

    #[test]
    fn decelerating_truth_error_closed_form() {
        // Truth brakes at `a` from 10 m/s; the linear model holds 10 m/s. The
        // gap at step j is a/2 (j dt)^2 while the truth is still moving.
        let (a, dt, k) = (2.0, 0.1, 20usize);
        let truth: Vec<_> = (0..=k)
            .map(|j| {
                let tj = j as f64 * dt;
                ActorState::new(10.0 * tj - 0.5 * a * tj * tj, 0.0, 0.0, 10.0 - a * tj)
            })
            .collect();
        let truth = Trajectory::new(ActorId::new("a"), 0, dt, truth);
        let pred = predict_linear(&truth.window(0, 0).unwrap(), k).unwrap();
        let expect: f64 = (0..=k)
            .map(|j| 0.5 * a * (j as f64 * dt).powi(2))
            .sum::<f64>()
            / (k + 1) as f64;
        assert!((prediction_error(&pred, &truth).unwrap() - expect).abs() < 1e-6);
    }

    #[test]
    fn constant_offset_error() {
        let a = predict_linear(&hist(0.0, 0.0, 0.0, 5.0), 10).unwrap();
        let mut b = a.clone();
        for s in &mut b.states {
            s.y += 1.0;
        }
        assert!((prediction_error(&a, &b).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(prediction_error(&a, &a).unwrap(), 0.0);
        let short = a.window(10, 3).unwrap();
        assert!(prediction_error(&short, &b).is_err());
    }
}
