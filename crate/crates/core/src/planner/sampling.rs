//! Budgeted space-time RRT*.
//!
//! The tree grows in `(x, y)`; every node also carries the tick offset at which
//! the Ego reaches it when driving the tree path at the plan speed. Edges are
//! checked against obstacle positions interpolated at the traversal times.
//! The sample stream is derived from the seed alone, so two runs over worlds
//! that differ only in an actor that never blocks an edge grow identical
//! trees.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::collision::Obstacles;
use super::{Footprints, Plan, LANE_CHANGE_PENALTY};
use crate::error::{Error, Result};
use crate::scenario::{ActorId, ActorState, RoadMap, Trajectory, World};

#[derive(Clone, Debug, PartialEq)]
pub struct PlannerConfig {
    pub iteration_budget: usize,
    pub seed: u64,
    /// Longitudinal advance of the goal. Defaults to the distance covered at
    /// plan speed over the horizon.
    pub goal_advance: Option<f64>,
    /// Defaults to the Ego's current lane.
    pub preferred_lane: Option<usize>,
    pub steer_step: f64,
    pub goal_tolerance: f64,
    pub safety_margin: f64,
    /// Speed used to time-parameterize paths. Defaults to the Ego's speed.
    pub target_speed: Option<f64>,
    pub goal_bias: f64,
    /// Largest heading magnitude of a tree edge (radians).
    pub max_heading: f64,
    pub rewire_radius: f64,
    /// Cost per meter traveled per meter of offset from the nearest lane
    /// center.
    pub lane_center_weight: f64,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        PlannerConfig {
            iteration_budget: 2000,
            seed: 0,
            goal_advance: None,
            preferred_lane: None,
            steer_step: 2.0,
            goal_tolerance: 2.0,
            safety_margin: 0.5,
            target_speed: None,
            goal_bias: 0.1,
            max_heading: 0.4,
            rewire_radius: 5.0,
            lane_center_weight: 0.5,
        }
    }
}

impl PlannerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.iteration_budget < 1 {
            return Err(Error::InvalidConfig("iteration_budget must be >= 1".into()));
        }
        if !(self.steer_step > 0.0 && self.goal_tolerance > 0.0 && self.safety_margin >= 0.0) {
            return Err(Error::InvalidConfig(
                "steer_step and goal_tolerance must be > 0, safety_margin >= 0".into(),
            ));
        }
        if self.lane_center_weight.is_nan() || self.lane_center_weight < 0.0 {
            return Err(Error::InvalidConfig(
                "lane_center_weight must be >= 0".into(),
            ));
        }
        if !(self.max_heading > 0.0 && self.max_heading < std::f64::consts::FRAC_PI_2) {
            return Err(Error::InvalidConfig(
                "max_heading must lie in (0, pi/2)".into(),
            ));
        }
        Ok(())
    }

    pub fn plan_speed(&self, map: &RoadMap, ego: &ActorState) -> f64 {
        self.target_speed
            .unwrap_or(ego.speed)
            .min(map.speed_limit)
            .max(MIN_PLAN_SPEED)
    }
}

const MIN_PLAN_SPEED: f64 = 0.5;
const EDGE_RESOLUTION: f64 = 0.5;
const NO_PARENT: usize = usize::MAX;

#[derive(Clone, Debug)]
struct Node {
    x: f64,
    y: f64,
    /// Arrival time as a tick offset from the plan start.
    tau: f64,
    cost: f64,
    parent: usize,
    lane: usize,
}

/// Result of one sampling run together with the actors that blocked at least
/// one checked edge or state.
#[derive(Clone, Debug, PartialEq)]
pub struct SamplingOutcome {
    pub plan: Plan,
    pub touched: BTreeSet<ActorId>,
    pub tree_size: usize,
}

struct Tree<'a> {
    map: &'a RoadMap,
    nodes: Vec<Node>,
    children: Vec<Vec<usize>>,
    obstacles: Obstacles<'a>,
    ticks_per_meter: f64,
    tan_max: f64,
    lane_center_weight: f64,
    y_lo: f64,
    y_hi: f64,
}

impl Tree<'_> {
    fn geometry_ok(&self, ax: f64, ay: f64, bx: f64, by: f64) -> bool {
        let dx = bx - ax;
        dx > 1e-9 && (by - ay).abs() <= dx * self.tan_max + 1e-12
    }

    fn edge_cost(&self, a: &Node, bx: f64, by: f64) -> (f64, f64) {
        let len = (bx - a.x).hypot(by - a.y);
        let lanes = self.map.lane_of(by).abs_diff(a.lane) as f64;
        let offset = 0.5 * (self.center_offset(a.y) + self.center_offset(by));
        (
            len,
            len * (1.0 + self.lane_center_weight * offset) + LANE_CHANGE_PENALTY * lanes,
        )
    }

    fn center_offset(&self, y: f64) -> f64 {
        (y - self.map.lane_center(self.map.lane_of(y))).abs()
    }

    /// Collision test for the straight edge from `(ax, ay)` at `tau_a` to
    /// `(bx, by)`. Checks every integer tick crossed plus sub-steps of at most
    /// `EDGE_RESOLUTION` meters.
    fn edge_collides(&mut self, ax: f64, ay: f64, tau_a: f64, bx: f64, by: f64) -> bool {
        let len = (bx - ax).hypot(by - ay);
        let tau_b = tau_a + len * self.ticks_per_meter;
        let mut hit = false;
        let subs = (len / EDGE_RESOLUTION).ceil().max(1.0) as usize;
        for i in 1..=subs {
            let s = i as f64 / subs as f64;
            hit |= self.obstacles.point_collides(
                ax + (bx - ax) * s,
                ay + (by - ay) * s,
                tau_a + (tau_b - tau_a) * s,
            );
            if hit {
                return true;
            }
        }
        let mut tick = tau_a.floor() + 1.0;
        while tick < tau_b {
            let s = (tick - tau_a) / (tau_b - tau_a);
            if self
                .obstacles
                .point_collides(ax + (bx - ax) * s, ay + (by - ay) * s, tick)
            {
                return true;
            }
            tick += 1.0;
        }
        false
    }

    /// Whether the Ego can stand still at node `i` from its arrival until
    /// tick offset `k`.
    fn hold_ok(&mut self, i: usize, k: usize) -> bool {
        let (x, y, tau) = (self.nodes[i].x, self.nodes[i].y, self.nodes[i].tau);
        let mut tick = tau.ceil();
        while tick <= k as f64 {
            if self.obstacles.point_collides(x, y, tick) {
                return false;
            }
            tick += 1.0;
        }
        true
    }

    fn subtree(&self, root: usize) -> Vec<usize> {
        let mut out = vec![root];
        let mut i = 0;
        while i < out.len() {
            out.extend_from_slice(&self.children[out[i]]);
            i += 1;
        }
        out
    }

    /// Re-parents `m` under `new_parent` if the edge and every descendant
    /// edge stay collision-free under the shifted arrival times.
    fn try_rewire(&mut self, m: usize, new_parent: usize, edge_len: f64, new_cost: f64) -> bool {
        let p = self.nodes[new_parent].clone();
        let (mx, my) = (self.nodes[m].x, self.nodes[m].y);
        if self.edge_collides(p.x, p.y, p.tau, mx, my) {
            return false;
        }
        let shift = p.tau + edge_len * self.ticks_per_meter - self.nodes[m].tau;
        let sub = self.subtree(m);
        for &d in &sub[1..] {
            let par = &self.nodes[self.nodes[d].parent];
            let (px, py, ptau) = (par.x, par.y, par.tau + shift);
            let (dx, dy) = (self.nodes[d].x, self.nodes[d].y);
            if self.edge_collides(px, py, ptau, dx, dy) {
                return false;
            }
        }
        let delta = new_cost - self.nodes[m].cost;
        for &d in &sub {
            self.nodes[d].tau += shift;
            self.nodes[d].cost += delta;
        }
        let old = self.nodes[m].parent;
        self.children[old].retain(|&c| c != m);
        self.children[new_parent].push(m);
        self.nodes[m].parent = new_parent;
        true
    }
}

/// Plans a single trajectory over `[t, t + k]`. See [`plan_sampling_traced`].
#[allow(clippy::too_many_arguments)]
pub fn plan_sampling(
    map: &RoadMap,
    ego: &ActorState,
    t: usize,
    k: usize,
    dt: f64,
    world: &World,
    cfg: &PlannerConfig,
    footprints: &Footprints,
) -> Result<Plan> {
    plan_sampling_traced(map, ego, t, k, dt, world, cfg, footprints).map(|o| o.plan)
}

/// Grows a rewiring space-time tree for exactly `cfg.iteration_budget`
/// iterations and returns the cheapest collision-free path into the goal
/// region, or the most promising partial path when the region is not reached.
#[allow(clippy::too_many_arguments)]
pub fn plan_sampling_traced(
    map: &RoadMap,
    ego: &ActorState,
    t: usize,
    k: usize,
    dt: f64,
    world: &World,
    cfg: &PlannerConfig,
    footprints: &Footprints,
) -> Result<SamplingOutcome> {
    cfg.validate()?;
    if !map.on_road(ego.y) {
        return Err(Error::InvalidConfig("Ego is off-road".into()));
    }
    let speed = cfg.plan_speed(map, ego);
    let advance = cfg.goal_advance.unwrap_or(speed * k as f64 * dt);
    let preferred = cfg
        .preferred_lane
        .unwrap_or_else(|| map.lane_of(ego.y))
        .min(map.lane_count - 1);
    let goal = (ego.x + advance, map.lane_center(preferred));
    let x_hi = goal.0 + cfg.goal_tolerance;
    let r = footprints.ego_radius;
    let (y_lo, y_hi) = (r.min(ego.y), (map.width() - r).max(ego.y));

    let mut tree = Tree {
        map,
        nodes: vec![Node {
            x: ego.x,
            y: ego.y,
            tau: 0.0,
            cost: 0.0,
            parent: NO_PARENT,
            lane: map.lane_of(ego.y),
        }],
        children: vec![Vec::new()],
        obstacles: Obstacles::new(world, footprints, cfg.safety_margin),
        ticks_per_meter: 1.0 / (speed * dt),
        tan_max: cfg.max_heading.tan(),
        lane_center_weight: cfg.lane_center_weight,
        y_lo,
        y_hi,
    };

    let finish = |tree: &Tree, plan: Option<Plan>| -> Result<SamplingOutcome> {
        let touched = tree
            .obstacles
            .ids()
            .zip(&tree.obstacles.touched)
            .filter(|(_, &hit)| hit)
            .map(|(id, _)| id.clone())
            .collect();
        match plan {
            Some(plan) => Ok(SamplingOutcome {
                plan,
                touched,
                tree_size: tree.nodes.len(),
            }),
            None => Err(Error::NoFeasiblePlan),
        }
    };

    if tree.obstacles.point_collides(ego.x, ego.y, 0.0) {
        return finish(&tree, None);
    }

    // The sample stream depends on the seed only.
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut near = Vec::new();
    for _ in 0..cfg.iteration_budget {
        let (u0, u1, u2): (f64, f64, f64) = (rng.random(), rng.random(), rng.random());
        let sample = if u0 < cfg.goal_bias {
            goal
        } else {
            (
                ego.x + u1 * (x_hi - ego.x),
                tree.y_lo + u2 * (tree.y_hi - tree.y_lo),
            )
        };

        let nearest = nearest_node(&tree.nodes, sample);
        let n = &tree.nodes[nearest];
        let (dx, dy) = (sample.0 - n.x, sample.1 - n.y);
        if dx <= 0.0 {
            continue;
        }
        let theta = dy.atan2(dx).clamp(-cfg.max_heading, cfg.max_heading);
        let step = cfg.steer_step.min(dx.hypot(dy));
        let nx = n.x + step * theta.cos();
        let ny = n.y + step * theta.sin();
        if nx > x_hi || ny < tree.y_lo || ny > tree.y_hi {
            continue;
        }

        near.clear();
        let r2 = cfg.rewire_radius * cfg.rewire_radius;
        near.extend(
            tree.nodes
                .iter()
                .enumerate()
                .filter(|(_, m)| (m.x - nx).powi(2) + (m.y - ny).powi(2) <= r2)
                .map(|(i, _)| i),
        );
        if !near.contains(&nearest) {
            near.push(nearest);
        }

        // Cheapest feasible parent, ties to the smallest index.
        let mut candidates: Vec<(f64, f64, usize)> = near
            .iter()
            .filter(|&&i| tree.geometry_ok(tree.nodes[i].x, tree.nodes[i].y, nx, ny))
            .map(|&i| {
                let (len, c) = tree.edge_cost(&tree.nodes[i], nx, ny);
                (tree.nodes[i].cost + c, len, i)
            })
            .collect();
        candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.2.cmp(&b.2)));
        let mut chosen = None;
        for &(cost, len, i) in &candidates {
            let p = &tree.nodes[i];
            let (px, py, ptau) = (p.x, p.y, p.tau);
            if !tree.edge_collides(px, py, ptau, nx, ny) {
                chosen = Some((cost, len, i));
                break;
            }
        }
        let Some((cost, len, parent)) = chosen else {
            continue;
        };
        let new = tree.nodes.len();
        tree.nodes.push(Node {
            x: nx,
            y: ny,
            tau: tree.nodes[parent].tau + len * tree.ticks_per_meter,
            cost,
            parent,
            lane: map.lane_of(ny),
        });
        tree.children.push(Vec::new());
        tree.children[parent].push(new);

        for &m in &near {
            if m == parent || m == 0 {
                continue;
            }
            let (mx, my) = (tree.nodes[m].x, tree.nodes[m].y);
            if !tree.geometry_ok(nx, ny, mx, my) {
                continue;
            }
            let (len, c) = tree.edge_cost(&tree.nodes[new], mx, my);
            let new_cost = tree.nodes[new].cost + c;
            if new_cost < tree.nodes[m].cost - 1e-9 {
                tree.try_rewire(m, new, len, new_cost);
            }
        }
    }

    // Goal region: within tolerance of the goal point or of its counterpart
    // on another lane's center line; off-preference lanes pay the
    // lane-change penalty.
    let mut reached: Vec<(f64, usize)> = tree
        .nodes
        .iter()
        .enumerate()
        .filter(|(_, n)| (n.x - goal.0).hypot(n.y - map.lane_center(n.lane)) <= cfg.goal_tolerance)
        .map(|(i, n)| {
            let off = n.lane.abs_diff(preferred) as f64;
            (n.cost + LANE_CHANGE_PENALTY * off, i)
        })
        .collect();
    reached.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut best = None;
    for &(_, i) in &reached {
        if tree.hold_ok(i, k) {
            best = Some((i, false));
            break;
        }
    }
    if best.is_none() {
        let mut partial: Vec<(f64, usize)> = tree
            .nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (n.cost + (goal.0 - n.x).hypot(goal.1 - n.y), i))
            .collect();
        partial.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        for &(_, i) in &partial {
            if tree.hold_ok(i, k) {
                best = Some((i, true));
                break;
            }
        }
    }
    let plan = best.map(|(i, partial)| {
        let mut path = vec![i];
        while tree.nodes[*path.last().unwrap()].parent != NO_PARENT {
            path.push(tree.nodes[*path.last().unwrap()].parent);
        }
        path.reverse();
        let pts: Vec<(f64, f64)> = path
            .iter()
            .map(|&j| (tree.nodes[j].x, tree.nodes[j].y))
            .collect();
        Plan {
            trajectory: time_parameterize(&pts, speed, t, k, dt),
            cost: tree.nodes[i].cost,
            maneuver_seq: None,
            partial,
        }
    });
    finish(&tree, plan)
}

fn nearest_node(nodes: &[Node], p: (f64, f64)) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (i, n) in nodes.iter().enumerate() {
        let d = (n.x - p.0).powi(2) + (n.y - p.1).powi(2);
        if d < best_d {
            best_d = d;
            best = i;
        }
    }
    best
}

/// Samples a polyline at constant `speed` for ticks `0..=k`; past the end of
/// the path the Ego holds its final position at rest.
pub fn time_parameterize(
    pts: &[(f64, f64)],
    speed: f64,
    t: usize,
    k: usize,
    dt: f64,
) -> Trajectory {
    let mut states = Vec::with_capacity(k + 1);
    let mut seg = 0;
    let mut seg_start = 0.0;
    let seg_len = |i: usize| (pts[i + 1].0 - pts[i].0).hypot(pts[i + 1].1 - pts[i].1);
    let heading = |i: usize| {
        if i + 1 < pts.len() {
            (pts[i + 1].1 - pts[i].1).atan2(pts[i + 1].0 - pts[i].0)
        } else {
            0.0
        }
    };
    for j in 0..=k {
        let s = speed * dt * j as f64;
        while seg + 1 < pts.len() && s > seg_start + seg_len(seg) {
            seg_start += seg_len(seg);
            seg += 1;
        }
        if seg + 1 >= pts.len() {
            let (x, y) = *pts.last().unwrap();
            let h = if pts.len() > 1 {
                heading(pts.len() - 2)
            } else {
                0.0
            };
            states.push(ActorState::new(x, y, h, 0.0));
            continue;
        }
        let l = seg_len(seg);
        let f = if l > 0.0 { (s - seg_start) / l } else { 0.0 };
        let (a, b) = (pts[seg], pts[seg + 1]);
        states.push(ActorState::new(
            a.0 + (b.0 - a.0) * f,
            a.1 + (b.1 - a.1) * f,
            heading(seg),
            speed,
        ));
    }
    Trajectory::new(ActorId::ego(), t, dt, states)
}
