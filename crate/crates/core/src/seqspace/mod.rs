//! The product space of `n`-roll sequences under the uniform measure:
//! exact conditioning on sums, Monte Carlo conditioning on mean windows, and
//! the induced distribution of evidence values.

mod evidence;
pub mod rng;
mod sampling;
mod sumtable;

use serde::Serialize;

pub use evidence::{
    evidence_histogram_sequences, evidence_histogram_simplex, EvidenceSample, EvidenceSource, DEFAULT_SAMPLES,
    DEFAULT_SEQUENCE_LENGTH,
};
pub use sampling::{
    rejection_conditioner, tilted_conditioner, ConditionerEstimate, FaceSampler, MIN_EFFECTIVE_SAMPLE_SIZE,
};
pub use sumtable::{
    conditional_face_distribution, mean_window_probability, sum_distribution, window_conditional_face_distribution,
    SumTable, MAX_TABLE_ENTRIES,
};

use crate::dist::Support;
use crate::error::{Error, Result};
use crate::maxent::solve_for_expectation;
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergencePoint<T = f64> {
    pub n: usize,
    pub target_sum: i64,
    /// Total variation between the exact conditional and the MaxEnt solution.
    pub tv: T,
}

/// Distance between exact conditioning on `sum = round(n * target)` and the
/// maximum-entropy solution at `target`, for each `n`.
pub fn convergence_curve<T: Real>(target: T, ns: &[usize], support: &Support<T>) -> Result<Vec<ConvergencePoint<T>>> {
    if ns.contains(&0) {
        return Err(Error::InvalidArgument("sequence lengths must be at least 1".into()));
    }
    let maxent = solve_for_expectation(target, support, T::from(1e-12).expect("tol"))?;
    let mut order: Vec<usize> = (0..ns.len()).collect();
    order.sort_by_key(|&i| ns[i]);
    let mut results = vec![None; ns.len()];
    let mut prefix = SumTable::empty(support)?;
    let target_f = target.to_f64().expect("finite target");
    for i in order {
        let n = ns[i];
        while prefix.n() + 1 < n {
            prefix = prefix.step();
        }
        let full = prefix.step();
        let target_sum =
            full.nearest_attainable_sum(target_f).ok_or(Error::EmptyConditioningEvent { n, target_sum: 0 })?;
        let conditional = prefix.conditional_next_face(target_sum)?;
        results[i] = Some(ConvergencePoint { n, target_sum, tv: conditional.tv_distance(&maxent.distribution)? });
    }
    Ok(results.into_iter().map(|r| r.expect("filled")).collect())
}
