use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Opaque actor identifier. The Ego uses the reserved id [`ActorId::EGO`].
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ActorId(pub String);

impl ActorId {
    pub const EGO: &'static str = "ego";

    pub fn new(id: impl Into<String>) -> Self {
        ActorId(id.into())
    }

    pub fn ego() -> Self {
        ActorId(Self::EGO.to_string())
    }

    pub fn is_ego(&self) -> bool {
        self.0 == Self::EGO
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ActorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for ActorId {
    fn from(s: &str) -> Self {
        ActorId(s.to_string())
    }
}

/// Wraps an angle into (-pi, pi].
pub fn wrap_angle(a: f64) -> f64 {
    let mut w = a.rem_euclid(2.0 * PI);
    if w > PI {
        w -= 2.0 * PI;
    }
    w
}

/// Kinematic state of one actor at one tick.
///
/// `x` runs along the road axis, `y` is lateral with 0 at the right road edge.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct ActorState {
    pub x: f64,
    pub y: f64,
    pub heading: f64,
    pub speed: f64,
}

impl ActorState {
    pub fn new(x: f64, y: f64, heading: f64, speed: f64) -> Self {
        ActorState {
            x,
            y,
            heading: wrap_angle(heading),
            speed,
        }
    }

    pub fn distance_to(&self, other: &ActorState) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.x, self.y, self.heading, self.speed]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidScenario("non-finite state component".into()));
        }
        if self.speed < 0.0 {
            return Err(Error::InvalidScenario(format!(
                "negative speed {}",
                self.speed
            )));
        }
        if !(self.heading > -PI && self.heading <= PI) {
            return Err(Error::InvalidScenario(format!(
                "heading {} outside (-pi, pi]",
                self.heading
            )));
        }
        Ok(())
    }

    pub(crate) fn to_array(self) -> [f64; 4] {
        [self.x, self.y, self.heading, self.speed]
    }

    pub(crate) fn from_array(a: [f64; 4]) -> Self {
        ActorState {
            x: a[0],
            y: a[1],
            heading: a[2],
            speed: a[3],
        }
    }
}

/// Timestamped trace of one actor's states at uniform `dt` spacing.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub actor_id: ActorId,
    pub start_tick: usize,
    pub dt: f64,
    pub states: Vec<ActorState>,
}

impl Trajectory {
    pub fn new(actor_id: ActorId, start_tick: usize, dt: f64, states: Vec<ActorState>) -> Self {
        Trajectory {
            actor_id,
            start_tick,
            dt,
            states,
        }
    }

    /// Last tick covered (inclusive).
    pub fn end_tick(&self) -> usize {
        self.start_tick + self.states.len().saturating_sub(1)
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn first(&self) -> Option<&ActorState> {
        self.states.first()
    }

    pub fn last(&self) -> Option<&ActorState> {
        self.states.last()
    }

    pub fn state_at(&self, tick: usize) -> Option<&ActorState> {
        tick.checked_sub(self.start_tick)
            .and_then(|i| self.states.get(i))
    }

    pub fn covers(&self, t: usize, k: usize) -> bool {
        !self.states.is_empty() && self.start_tick <= t && self.end_tick() >= t + k
    }

    /// Restricts the trajectory to ticks `[t, t + k]`.
    pub fn window(&self, t: usize, k: usize) -> Result<Trajectory> {
        if !self.covers(t, k) {
            return Err(Error::WindowOutOfRange {
                t,
                k,
                horizon: self.end_tick(),
            });
        }
        let lo = t - self.start_tick;
        Ok(Trajectory {
            actor_id: self.actor_id.clone(),
            start_tick: t,
            dt: self.dt,
            states: self.states[lo..=lo + k].to_vec(),
        })
    }

    /// Position at a fractional tick offset from `start_tick`. Interpolates
    /// linearly between stored states and extrapolates at constant velocity
    /// past the end.
    pub fn position_at(&self, offset: f64) -> (f64, f64) {
        let n = self.states.len();
        debug_assert!(n > 0);
        if offset <= 0.0 {
            let s = &self.states[0];
            return (s.x, s.y);
        }
        let last = (n - 1) as f64;
        if offset >= last {
            let s = &self.states[n - 1];
            let d = s.speed * self.dt * (offset - last);
            return (s.x + d * s.heading.cos(), s.y + d * s.heading.sin());
        }
        let i = offset.floor() as usize;
        let f = offset - i as f64;
        let a = &self.states[i];
        let b = &self.states[i + 1];
        (a.x + (b.x - a.x) * f, a.y + (b.y - a.y) * f)
    }

    /// Checks that the displacement between consecutive states agrees with the
    /// stored speeds: `|dp|/dt` within 20% of the speed midpoint.
    pub fn check_kinematics(&self) -> Result<()> {
        for (i, w) in self.states.windows(2).enumerate() {
            let implied = w[0].distance_to(&w[1]) / self.dt;
            let mid = 0.5 * (w[0].speed + w[1].speed);
            if (implied - mid).abs() > 0.2 * mid + 1e-6 {
                return Err(Error::InvalidScenario(format!(
                    "actors[{}].states[{}]: implied speed {:.4} m/s disagrees with stored speed {:.4} m/s",
                    self.actor_id,
                    i + 1,
                    implied,
                    mid
                )));
            }
        }
        Ok(())
    }
}

/// Straight multi-lane one-way road segment. Lane 0 is the rightmost lane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoadMap {
    pub lane_count: usize,
    pub lane_width: f64,
    pub road_length: f64,
    pub speed_limit: f64,
}

impl Default for RoadMap {
    fn default() -> Self {
        RoadMap {
            lane_count: 3,
            lane_width: 3.5,
            road_length: 3000.0,
            speed_limit: 25.0,
        }
    }
}

impl RoadMap {
    pub fn validate(&self) -> Result<()> {
        if self.lane_count < 1 {
            return Err(Error::InvalidScenario("map.lane_count must be >= 1".into()));
        }
        for (name, v) in [
            ("lane_width", self.lane_width),
            ("road_length", self.road_length),
            ("speed_limit", self.speed_limit),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidScenario(format!("map.{name} must be > 0")));
            }
        }
        Ok(())
    }

    pub fn width(&self) -> f64 {
        self.lane_count as f64 * self.lane_width
    }

    pub fn lane_center(&self, lane: usize) -> f64 {
        (lane as f64 + 0.5) * self.lane_width
    }

    /// Lane index containing lateral position `y`, clamped to the road.
    pub fn lane_of(&self, y: f64) -> usize {
        let l = (y / self.lane_width).floor();
        if l < 0.0 {
            0
        } else {
            (l as usize).min(self.lane_count - 1)
        }
    }

    pub fn on_road(&self, y: f64) -> bool {
        (0.0..=self.width()).contains(&y)
    }
}

/// Collision footprint radii keyed by actor, with a fallback default.
#[derive(Clone, Debug, PartialEq)]
pub struct Radii {
    pub default: f64,
    pub per_actor: BTreeMap<ActorId, f64>,
}

impl Default for Radii {
    fn default() -> Self {
        Radii {
            default: crate::scenario::DEFAULT_ACTOR_RADIUS,
            per_actor: BTreeMap::new(),
        }
    }
}

impl Radii {
    pub fn uniform(r: f64) -> Self {
        Radii {
            default: r,
            per_actor: BTreeMap::new(),
        }
    }

    pub fn of(&self, id: &ActorId) -> f64 {
        self.per_actor.get(id).copied().unwrap_or(self.default)
    }
}

/// Joint set of non-Ego trajectories over one tick window.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct World {
    pub trajectories: BTreeMap<ActorId, Trajectory>,
}

impl World {
    pub fn new() -> Self {
        World::default()
    }

    pub fn from_trajectories(trajs: impl IntoIterator<Item = Trajectory>) -> Self {
        World {
            trajectories: trajs.into_iter().map(|t| (t.actor_id.clone(), t)).collect(),
        }
    }

    pub fn insert(&mut self, traj: Trajectory) {
        self.trajectories.insert(traj.actor_id.clone(), traj);
    }

    pub fn contains(&self, id: &ActorId) -> bool {
        self.trajectories.contains_key(id)
    }

    pub fn ids(&self) -> impl Iterator<Item = &ActorId> {
        self.trajectories.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Trajectory> {
        self.trajectories.values()
    }

    pub fn len(&self) -> usize {
        self.trajectories.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trajectories.is_empty()
    }

    /// The same world with actor `id` ablated.
    pub fn without(&self, id: &ActorId) -> World {
        let mut w = self.clone();
        w.trajectories.remove(id);
        w
    }
}
