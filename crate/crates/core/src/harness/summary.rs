//! Per-phase aggregation of step records.

use std::collections::BTreeMap;

use serde::Serialize;

use super::StepRecord;
use crate::scenario::ActorId;

/// Linear-interpolation quantile of sorted data.
pub fn quantile(sorted: &[f64], q: f64) -> Option<f64> {
    if sorted.is_empty() {
        return None;
    }
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    Some(sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Quartiles {
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
}

impl Quartiles {
    pub fn of(values: impl IntoIterator<Item = f64>) -> Option<Self> {
        let mut v: Vec<f64> = values.into_iter().collect();
        v.sort_by(f64::total_cmp);
        Some(Quartiles {
            q1: quantile(&v, 0.25)?,
            median: quantile(&v, 0.5)?,
            q3: quantile(&v, 0.75)?,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PhaseActorSummary {
    pub phase: String,
    pub actor_id: ActorId,
    pub replans: usize,
    pub gamma: Option<Quartiles>,
    pub gamma_kl: Option<Quartiles>,
    pub prediction_error: Option<Quartiles>,
}

#[derive(Serialize)]
pub(crate) struct SummaryRow<'a> {
    phase: &'a str,
    actor_id: &'a ActorId,
    replans: usize,
    gamma_q1: Option<f64>,
    gamma_median: Option<f64>,
    gamma_q3: Option<f64>,
    gamma_kl_median: Option<f64>,
    error_q1: Option<f64>,
    error_median: Option<f64>,
    error_q3: Option<f64>,
}

impl PhaseActorSummary {
    pub(crate) fn row(&self) -> SummaryRow<'_> {
        SummaryRow {
            phase: &self.phase,
            actor_id: &self.actor_id,
            replans: self.replans,
            gamma_q1: self.gamma.map(|q| q.q1),
            gamma_median: self.gamma.map(|q| q.median),
            gamma_q3: self.gamma.map(|q| q.q3),
            gamma_kl_median: self.gamma_kl.map(|q| q.median),
            error_q1: self.prediction_error.map(|q| q.q1),
            error_median: self.prediction_error.map(|q| q.median),
            error_q3: self.prediction_error.map(|q| q.q3),
        }
    }
}

/// Groups records by phase (in order of first appearance) and actor.
pub fn summarize(records: &[StepRecord]) -> Vec<PhaseActorSummary> {
    let mut phase_order: Vec<&str> = Vec::new();
    let mut groups: BTreeMap<(usize, &ActorId), Vec<&StepRecord>> = BTreeMap::new();
    for r in records {
        let idx = match phase_order.iter().position(|p| *p == r.phase) {
            Some(i) => i,
            None => {
                phase_order.push(&r.phase);
                phase_order.len() - 1
            }
        };
        groups.entry((idx, &r.actor_id)).or_default().push(r);
    }
    groups
        .into_iter()
        .map(|((idx, id), rs)| PhaseActorSummary {
            phase: phase_order[idx].to_string(),
            actor_id: id.clone(),
            replans: rs.len(),
            gamma: Quartiles::of(rs.iter().filter_map(|r| r.gamma_euclid)),
            gamma_kl: Quartiles::of(rs.iter().filter_map(|r| r.gamma_kl)),
            prediction_error: Quartiles::of(rs.iter().filter_map(|r| r.prediction_error)),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantiles_interpolate() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile(&v, 0.5), Some(2.5));
        assert_eq!(quantile(&v, 0.25), Some(1.75));
        assert_eq!(quantile(&[], 0.5), None);
        let q = Quartiles::of([3.0, 1.0, 2.0]).unwrap();
        assert_eq!((q.q1, q.median, q.q3), (1.5, 2.0, 2.5));
    }
}
