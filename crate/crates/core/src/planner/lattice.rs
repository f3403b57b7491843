//! Exhaustive maneuver-lattice enumeration.
//!
//! The horizon is split into `decision_steps` macro-steps. Each step applies
//! one maneuver: hold the lane, shift one lane left or right along a cosine
//! ramp, or change speed by `speed_step`. Enumerating every sequence gives a
//! finite, countable stand-in for the set of navigable Ego futures.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use super::{Footprints, Plan, PlanSet, LANE_CHANGE_PENALTY, SPEED_CHANGE_WEIGHT};
use crate::error::{Error, Result};
use crate::planner::collision::collision_check;
use crate::scenario::{ActorId, ActorState, RoadMap, Trajectory, World};

pub const DEFAULT_UNIVERSE_CAP: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Maneuver {
    Keep,
    ShiftLeft,
    ShiftRight,
    Brake,
    Accelerate,
}

impl Maneuver {
    pub fn as_str(self) -> &'static str {
        match self {
            Maneuver::Keep => "keep",
            Maneuver::ShiftLeft => "shift_left",
            Maneuver::ShiftRight => "shift_right",
            Maneuver::Brake => "brake",
            Maneuver::Accelerate => "accelerate",
        }
    }

    pub fn lane_delta(self) -> isize {
        match self {
            Maneuver::ShiftLeft => 1,
            Maneuver::ShiftRight => -1,
            _ => 0,
        }
    }

    pub fn speed_delta(self, step: f64) -> f64 {
        match self {
            Maneuver::Brake => -step,
            Maneuver::Accelerate => step,
            _ => 0.0,
        }
    }
}

impl fmt::Display for Maneuver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Maneuver {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "keep" => Ok(Maneuver::Keep),
            "shift_left" | "left" => Ok(Maneuver::ShiftLeft),
            "shift_right" | "right" => Ok(Maneuver::ShiftRight),
            "brake" => Ok(Maneuver::Brake),
            "accelerate" | "accel" => Ok(Maneuver::Accelerate),
            other => Err(Error::InvalidConfig(format!("unknown maneuver `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LatticeConfig {
    pub decision_steps: usize,
    pub ticks_per_step: usize,
    pub maneuvers: Vec<Maneuver>,
    /// Speed change applied by one brake or accelerate step (m/s).
    pub speed_step: f64,
    pub margin: f64,
    pub universe_cap: u64,
}

impl LatticeConfig {
    pub fn new(decision_steps: usize, ticks_per_step: usize, maneuvers: &[Maneuver]) -> Self {
        LatticeConfig {
            decision_steps,
            ticks_per_step,
            maneuvers: maneuvers.to_vec(),
            speed_step: 2.0,
            margin: 0.5,
            universe_cap: DEFAULT_UNIVERSE_CAP,
        }
    }

    /// Lateral-only lattice: keep, shift left, shift right.
    pub fn lateral(decision_steps: usize, ticks_per_step: usize) -> Self {
        Self::new(
            decision_steps,
            ticks_per_step,
            &[Maneuver::Keep, Maneuver::ShiftLeft, Maneuver::ShiftRight],
        )
    }

    pub fn horizon(&self) -> usize {
        self.decision_steps * self.ticks_per_step
    }

    /// Sorted, deduplicated maneuver alphabet.
    fn alphabet(&self) -> Vec<Maneuver> {
        let mut m = self.maneuvers.clone();
        m.sort();
        m.dedup();
        m
    }

    pub fn sequence_count(&self) -> u128 {
        (self.alphabet().len() as u128).saturating_pow(self.decision_steps as u32)
    }

    pub fn validate(&self, k: usize) -> Result<()> {
        if self.decision_steps < 1 || self.ticks_per_step < 1 || self.maneuvers.is_empty() {
            return Err(Error::InvalidConfig(
                "lattice needs >= 1 decision step, >= 1 tick per step and a maneuver".into(),
            ));
        }
        if self.horizon() != k {
            return Err(Error::InvalidConfig(format!(
                "lattice covers {} ticks ({} steps x {}) but the horizon is {k}",
                self.horizon(),
                self.decision_steps,
                self.ticks_per_step
            )));
        }
        let size = self.sequence_count();
        if size > self.universe_cap as u128 {
            return Err(Error::LatticeTooLarge {
                size,
                cap: self.universe_cap,
            });
        }
        Ok(())
    }
}

/// Renders one maneuver sequence from `ego` at tick `t`. Returns `None` when
/// the sequence leaves the road, exceeds the speed limit or would reverse.
pub fn render_sequence(
    map: &RoadMap,
    ego: &ActorState,
    t: usize,
    dt: f64,
    lattice: &LatticeConfig,
    seq: &[Maneuver],
) -> Option<(Trajectory, f64)> {
    let n = lattice.ticks_per_step;
    let mut states = Vec::with_capacity(seq.len() * n + 1);
    states.push(*ego);
    let mut lane = map.lane_of(ego.y) as isize;
    let (mut x, mut y, mut v) = (ego.x, ego.y, ego.speed);
    let mut length = 0.0;
    let mut lane_changes = 0usize;
    let mut speed_change = 0.0;
    for m in seq {
        let next_lane = lane + m.lane_delta();
        if next_lane < 0 || next_lane >= map.lane_count as isize {
            return None;
        }
        let v_to = v + m.speed_delta(lattice.speed_step);
        if v_to < 0.0 || v_to > map.speed_limit {
            return None;
        }
        lane_changes += (next_lane != lane) as usize;
        speed_change += (v_to - v).abs();
        let (y_from, y_to, v_from) = (y, map.lane_center(next_lane as usize), v);
        for j in 1..=n {
            let u = j as f64 / n as f64;
            let y_next = y_from + (y_to - y_from) * 0.5 * (1.0 - (PI * u).cos());
            let v_next = v_from + (v_to - v_from) * u;
            let dx = 0.5 * (v + v_next) * dt;
            let dy = y_next - y;
            length += dx.hypot(dy);
            x += dx;
            y = y_next;
            v = v_next;
            let vy = dy / dt;
            let heading = if dy == 0.0 { 0.0 } else { vy.atan2(v) };
            states.push(ActorState::new(x, y, heading, v.hypot(vy)));
        }
        lane = next_lane;
    }
    let cost =
        length + LANE_CHANGE_PENALTY * lane_changes as f64 + SPEED_CHANGE_WEIGHT * speed_change;
    Some((Trajectory::new(ActorId::ego(), t, dt, states), cost))
}

/// Enumerates every maneuver sequence in lexicographic order. Without a world
/// the result is the navigable universe; with a world, colliding plans are
/// removed. `universe_size` always counts in-bounds sequences.
#[allow(clippy::too_many_arguments)]
pub fn enumerate_plans(
    map: &RoadMap,
    ego: &ActorState,
    t: usize,
    k: usize,
    dt: f64,
    lattice: &LatticeConfig,
    world: Option<&World>,
    footprints: &Footprints,
) -> Result<PlanSet> {
    lattice.validate(k)?;
    if !map.on_road(ego.y) {
        return Err(Error::InvalidConfig("Ego is off-road".into()));
    }
    let alphabet = lattice.alphabet();
    let steps = lattice.decision_steps;
    let mut plans = Vec::new();
    let mut universe_size = 0;
    let mut idx = vec![0usize; steps];
    loop {
        let seq: Vec<Maneuver> = idx.iter().map(|&i| alphabet[i]).collect();
        if let Some((traj, cost)) = render_sequence(map, ego, t, dt, lattice, &seq) {
            universe_size += 1;
            let keep = match world {
                Some(w) => !collision_check(&traj, w, footprints, lattice.margin)?,
                None => true,
            };
            if keep {
                plans.push(Plan {
                    trajectory: traj,
                    cost,
                    maneuver_seq: Some(seq),
                    partial: false,
                });
            }
        }
        // Odometer increment, last position fastest.
        let mut pos = steps;
        loop {
            if pos == 0 {
                return Ok(PlanSet {
                    plans,
                    universe_size,
                });
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < alphabet.len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}
