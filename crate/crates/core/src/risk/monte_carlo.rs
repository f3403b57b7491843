//! Expected importance and its variance under sampled predictions.

use std::collections::BTreeMap;

use rayon::prelude::*;

use super::importance::{actor_importance, euclid_importances, kl_importances, Operator};
use super::EgoFrame;
use crate::error::{Error, Result};
use crate::planner::{LatticeConfig, PlannerConfig};
use crate::prediction::{sample_joint_world, PredictionConfig};
use crate::scenario::{ActorId, World};

/// Welford accumulator for mean and unbiased variance.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct RunningStats {
    n: usize,
    mean: f64,
    m2: f64,
}

impl RunningStats {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn count(&self) -> usize {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance; zero with fewer than two samples.
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            (self.m2 / (self.n - 1) as f64).max(0.0)
        }
    }
}

impl FromIterator<f64> for RunningStats {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = RunningStats::default();
        iter.into_iter().for_each(|x| s.push(x));
        s
    }
}

fn annotate<T>(index: usize, r: Result<T>) -> Result<T> {
    r.map_err(|e| Error::Sample {
        index,
        source: Box::new(e),
    })
}

/// Mean and variance of `gamma` over `n` worlds drawn by `sample_world`.
/// Samples are evaluated in parallel and reduced in index order, so the
/// result does not depend on the thread count.
pub fn monte_carlo_importance<S, F>(n: usize, sample_world: S, gamma: F) -> Result<(f64, f64)>
where
    S: Fn(usize) -> Result<World> + Sync,
    F: Fn(&World) -> Result<f64> + Sync,
{
    if n == 0 {
        return Err(Error::InvalidConfig("sample count must be >= 1".into()));
    }
    let values: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|j| annotate(j, sample_world(j).and_then(|w| gamma(&w))))
        .collect::<Result<_>>()?;
    let stats: RunningStats = values.into_iter().collect();
    Ok((stats.mean(), stats.variance()))
}

/// Expected importance of actor `i` over joint worlds sampled from the last
/// state of every history. The planner seed is shared by all samples.
#[allow(clippy::too_many_arguments)]
pub fn expected_actor_risk(
    frame: &EgoFrame,
    histories: &World,
    i: &ActorId,
    prediction: &PredictionConfig,
    planner: &PlannerConfig,
    operator: Operator,
    lattice: Option<&LatticeConfig>,
) -> Result<(f64, f64)> {
    prediction.validate()?;
    if !histories.contains(i) {
        return Err(Error::UnknownActor(i.clone()));
    }
    monte_carlo_importance(
        prediction.sample_count,
        |j| sample_joint_world(histories, frame.k, prediction, j),
        |w| actor_importance(frame, w, i, planner, operator, lattice),
    )
}

/// Expected importance of every actor, one joint world per sample.
pub fn expected_importances(
    frame: &EgoFrame,
    histories: &World,
    prediction: &PredictionConfig,
    planner: &PlannerConfig,
    operator: Operator,
    lattice: Option<&LatticeConfig>,
) -> Result<BTreeMap<ActorId, (f64, f64)>> {
    prediction.validate()?;
    let per_sample: Vec<BTreeMap<ActorId, f64>> = (0..prediction.sample_count)
        .into_par_iter()
        .map(|j| {
            annotate(
                j,
                sample_joint_world(histories, frame.k, prediction, j).and_then(
                    |w| match operator {
                        Operator::Euclid => euclid_importances(frame, &w, planner).map(|r| r.1),
                        Operator::Kl => {
                            let lattice = lattice.ok_or_else(|| {
                                Error::InvalidConfig(
                                    "the kl operator needs a lattice configuration".into(),
                                )
                            })?;
                            kl_importances(frame, &w, lattice)
                        }
                    },
                ),
            )
        })
        .collect::<Result<_>>()?;
    Ok(histories
        .ids()
        .map(|id| {
            let s: RunningStats = per_sample.iter().map(|m| m[id]).collect();
            (id.clone(), (s.mean(), s.variance()))
        })
        .collect())
}
