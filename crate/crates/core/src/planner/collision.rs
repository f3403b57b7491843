use crate::error::{Error, Result};
use crate::scenario::{ActorId, Radii, Trajectory, World};

/// Disc footprints of the Ego and every other actor.
#[derive(Clone, Debug, PartialEq)]
pub struct Footprints {
    pub ego_radius: f64,
    pub radii: Radii,
}

impl Default for Footprints {
    fn default() -> Self {
        Footprints {
            ego_radius: crate::scenario::DEFAULT_ACTOR_RADIUS,
            radii: Radii::default(),
        }
    }
}

impl Footprints {
    /// Center distance below which the Ego and `id` collide.
    pub fn clearance(&self, id: &ActorId, margin: f64) -> f64 {
        self.ego_radius + self.radii.of(id) + margin
    }
}

fn check_window(ego: &Trajectory, other: &Trajectory) -> Result<()> {
    if ego.start_tick != other.start_tick || ego.len() != other.len() {
        return Err(Error::WindowMismatch(format!(
            "ego covers {}..={}, actor {} covers {}..={}",
            ego.start_tick,
            ego.end_tick(),
            other.actor_id,
            other.start_tick,
            other.end_tick()
        )));
    }
    Ok(())
}

/// True iff at some tick the Ego's center is strictly closer than
/// `ego_radius + actor_radius + margin` to some actor. Touching is not a
/// collision.
pub fn collision_check(
    ego: &Trajectory,
    world: &World,
    footprints: &Footprints,
    margin: f64,
) -> Result<bool> {
    Ok(!colliding_actors(ego, world, footprints, margin)?.is_empty())
}

/// Every actor the Ego trajectory collides with.
pub fn colliding_actors(
    ego: &Trajectory,
    world: &World,
    footprints: &Footprints,
    margin: f64,
) -> Result<Vec<ActorId>> {
    let mut hits = Vec::new();
    for other in world.iter() {
        check_window(ego, other)?;
        let c = footprints.clearance(&other.actor_id, margin);
        if ego
            .states
            .iter()
            .zip(&other.states)
            .any(|(a, b)| a.distance_to(b) < c)
        {
            hits.push(other.actor_id.clone());
        }
    }
    Ok(hits)
}

/// Obstacle set used by the sampling planner: continuous-time position
/// queries with per-actor hit bookkeeping.
pub(crate) struct Obstacles<'a> {
    entries: Vec<(&'a Trajectory, f64)>,
    pub(crate) touched: Vec<bool>,
}

impl<'a> Obstacles<'a> {
    pub(crate) fn new(world: &'a World, footprints: &Footprints, margin: f64) -> Self {
        let entries: Vec<_> = world
            .iter()
            .map(|tr| (tr, footprints.clearance(&tr.actor_id, margin)))
            .collect();
        let touched = vec![false; entries.len()];
        Obstacles { entries, touched }
    }

    pub(crate) fn ids(&self) -> impl Iterator<Item = &ActorId> {
        self.entries.iter().map(|(tr, _)| &tr.actor_id)
    }

    /// Tests the Ego center `(x, y)` at tick offset `tau` against every
    /// obstacle. Every obstacle is evaluated so the hit bookkeeping does not
    /// depend on iteration order.
    pub(crate) fn point_collides(&mut self, x: f64, y: f64, tau: f64) -> bool {
        let mut hit = false;
        for (i, (tr, c)) in self.entries.iter().enumerate() {
            let (ox, oy) = tr.position_at(tau);
            if (x - ox).hypot(y - oy) < *c {
                self.touched[i] = true;
                hit = true;
            }
        }
        hit
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::ActorState;

    fn line(id: &str, x0: f64, y: f64, v: f64, n: usize) -> Trajectory {
        Trajectory::new(
            ActorId::new(id),
            0,
            0.1,
            (0..=n)
                .map(|j| ActorState::new(x0 + v * 0.1 * j as f64, y, 0.0, v))
                .collect(),
        )
    }

    fn fp() -> Footprints {
        Footprints {
            ego_radius: 1.2,
            radii: Radii::uniform(1.2),
        }
    }

    #[test]
    fn disjoint_lanes_do_not_collide() {
        let ego = line("ego", 0.0, 1.75, 10.0, 20);
        let w = World::from_trajectories([line("a", 0.0, 5.25, 10.0, 20)]);
        assert!(!collision_check(&ego, &w, &fp(), 0.5).unwrap());
    }

    #[test]
    fn coincident_positions_collide() {
        let ego = line("ego", 0.0, 1.75, 10.0, 20);
        let w = World::from_trajectories([line("a", 10.0, 1.75, 0.0, 20)]);
        assert!(collision_check(&ego, &w, &fp(), 0.5).unwrap());
    }

    #[test]
    fn exact_boundary_is_not_a_collision() {
        // Lateral offset of exactly 1.2 + 1.2 + 0.5 = 2.9 m at every tick.
        let ego = line("ego", 0.0, 1.0, 10.0, 20);
        let w = World::from_trajectories([line("a", 0.0, 3.9, 10.0, 20)]);
        let d = ego.states[0].distance_to(&w.trajectories[&ActorId::new("a")].states[0]);
        assert_eq!(d, 2.9);
        assert!(!collision_check(&ego, &w, &fp(), 0.5).unwrap());
        let w = World::from_trajectories([line("a", 0.0, 3.899, 10.0, 20)]);
        assert!(collision_check(&ego, &w, &fp(), 0.5).unwrap());
    }

    #[test]
    fn window_mismatch_is_an_error() {
        let ego = line("ego", 0.0, 1.75, 10.0, 20);
        let w = World::from_trajectories([line("a", 0.0, 5.25, 10.0, 10)]);
        assert!(matches!(
            collision_check(&ego, &w, &fp(), 0.5),
            Err(Error::WindowMismatch(_))
        ));
    }
}
