//! Difference operators between plans.

use crate::error::{Error, Result};
use crate::scenario::Trajectory;

/// Probability floor mixed into every plan distribution so KL stays finite
/// when ablation changes the feasible support.
pub const KL_EPSILON: f64 = 1e-6;

/// Mean Euclidean distance between aligned waypoints. The shorter trajectory
/// is padded by holding its last state.
pub fn traj_difference_euclidean(a: &Trajectory, b: &Trajectory) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let n = a.len().max(b.len());
    let at = |tr: &Trajectory, j: usize| tr.states[j.min(tr.len() - 1)];
    let sum: f64 = (0..n).map(|j| at(a, j).distance_to(&at(b, j))).sum();
    sum / n as f64
}

/// Distribution over a lattice universe: uniform over the feasible plans,
/// mixed with a uniform floor.
#[derive(Clone, Debug, PartialEq)]
pub struct PlanDistribution {
    probabilities: Vec<f64>,
}

impl PlanDistribution {
    /// `feasible[j]` marks universe member `j` as feasible. With no feasible
    /// member the distribution is uniform over the whole universe.
    pub fn from_feasible(feasible: &[bool], epsilon: f64) -> Self {
        let n = feasible.len();
        let count = feasible.iter().filter(|&&f| f).count();
        let floor = 1.0 / n as f64;
        let probabilities = if count == 0 {
            vec![floor; n]
        } else {
            let mass = 1.0 / count as f64;
            feasible
                .iter()
                .map(|&f| (1.0 - epsilon) * if f { mass } else { 0.0 } + epsilon * floor)
                .collect()
        };
        PlanDistribution { probabilities }
    }

    pub fn uniform(n: usize) -> Self {
        PlanDistribution {
            probabilities: vec![1.0 / n as f64; n],
        }
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn universe_size(&self) -> usize {
        self.probabilities.len()
    }
}

/// `KL(p || q)` in nats.
pub fn plan_divergence_kl(p: &PlanDistribution, q: &PlanDistribution) -> Result<f64> {
    if p.universe_size() != q.universe_size() {
        return Err(Error::UniverseMismatch);
    }
    let kl: f64 = p
        .probabilities
        .iter()
        .zip(&q.probabilities)
        .filter(|(&pi, _)| pi > 0.0)
        .map(|(&pi, &qi)| pi * (pi / qi).ln())
        .sum();
    // Rounding can leave tiny negative sums when p == q.
    Ok(kl.max(0.0))
}
