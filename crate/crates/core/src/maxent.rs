//! Maximum-entropy distributions under a single expectation constraint.
//!
//! The solution always has the Gibbs form `p_i ∝ exp(-beta * v_i)`. Targets
//! above the uniform mean need `beta < 0`. The tilt is found by bracketing
//! followed by bisection on the strictly decreasing map `beta -> E_beta[X]`;
//! a Newton step is tried inside the bracket first and discarded if it leaves
//! the bracket, so the bracket (not Newton) decides termination.

use serde::Serialize;

use crate::dist::{Distribution, Support};
use crate::error::{Error, Result};
use crate::scalar::Real;

pub const DEFAULT_TOLERANCE: f64 = 1e-10;

const MAX_ITERATIONS: usize = 500;
const MAX_ABS_BETA: f64 = 1e8;

/// Which end of the support a degenerate solution sits on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Min,
    Max,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GibbsSolution<T = f64> {
    /// Tilt. `+inf` / `-inf` for the boundary point masses.
    pub beta: T,
    pub distribution: Distribution<T>,
    /// Expectation actually achieved.
    pub epsilon: T,
    pub iterations: usize,
    pub boundary: Option<Boundary>,
}

impl<T: Real> GibbsSolution<T> {
    pub fn is_boundary(&self) -> bool {
        self.boundary.is_some()
    }
}

/// `p_i = exp(-beta v_i) / Z`, shifted by the largest exponent first.
pub fn gibbs_distribution<T: Real>(beta: T, support: &Support<T>) -> Result<Distribution<T>> {
    if !beta.is_finite() {
        return Err(Error::InvalidArgument(format!("beta must be finite, got {beta}")));
    }
    Ok(Distribution::normalized(support.clone(), gibbs_weights(beta, support))
        .expect("exponential weights are positive"))
}

fn gibbs_weights<T: Real>(beta: T, support: &Support<T>) -> Vec<T> {
    // exp(-beta v) is largest at min(v) for beta >= 0, at max(v) otherwise.
    let shift = if beta >= T::zero() { *support.min() } else { *support.max() };
    support.values().iter().map(|&v| (-beta * (v - shift)).exp()).collect()
}

/// Mean and variance of the Gibbs distribution.
fn moments<T: Real>(beta: T, support: &Support<T>) -> (T, T) {
    let w = gibbs_weights(beta, support);
    let z = w.iter().fold(T::zero(), |a, &b| a + b);
    let mean = w.iter().zip(support.values()).fold(T::zero(), |a, (&w, &v)| a + w * v) / z;
    let var = w.iter().zip(support.values()).fold(T::zero(), |a, (&w, &v)| a + w * (v - mean) * (v - mean)) / z;
    (mean, var)
}

/// Expectation of the Gibbs distribution; strictly decreasing in `beta`.
pub fn epsilon_of_beta<T: Real>(beta: T, support: &Support<T>) -> T {
    moments(beta, support).0
}

/// Maximum-entropy distribution with expectation `epsilon` (within `tol`).
pub fn solve_for_expectation<T: Real>(epsilon: T, support: &Support<T>, tol: T) -> Result<GibbsSolution<T>> {
    if !(tol > T::zero()) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let (lo_v, hi_v) = (*support.min(), *support.max());
    if !epsilon.is_finite() || epsilon < lo_v || epsilon > hi_v {
        return Err(Error::ConstraintInfeasible {
            epsilon: epsilon.to_f64().unwrap_or(f64::NAN),
            min: lo_v.to_f64().unwrap_or(f64::NAN),
            max: hi_v.to_f64().unwrap_or(f64::NAN),
        });
    }
    if epsilon == lo_v || epsilon == hi_v {
        let (index, beta, boundary) = if epsilon == lo_v {
            (0, T::infinity(), Boundary::Min)
        } else {
            (support.len() - 1, T::neg_infinity(), Boundary::Max)
        };
        return Ok(GibbsSolution {
            beta,
            distribution: Distribution::point_mass(support.clone(), index)?,
            epsilon,
            iterations: 0,
            boundary: Some(boundary),
        });
    }
    if epsilon == support.mean() {
        return Ok(GibbsSolution {
            beta: T::zero(),
            distribution: Distribution::uniform(support.clone()),
            epsilon,
            iterations: 0,
            boundary: None,
        });
    }

    let two = T::one() + T::one();
    let limit = T::from(MAX_ABS_BETA).expect("beta limit");
    // f(beta) = E_beta - epsilon is decreasing: f(lo) > 0 > f(hi).
    let f = |b: T| epsilon_of_beta(b, support) - epsilon;
    let mut iterations = 0usize;
    // Walk outward from beta = 0, doubling, until the sign flips; the last
    // probe that did not flip is the other end of the bracket.
    let (mut lo, mut hi) = if f(T::zero()) > T::zero() {
        let (mut inner, mut outer) = (T::zero(), T::one());
        while f(outer) > T::zero() {
            inner = outer;
            outer = outer * two;
            iterations += 1;
            if outer > limit {
                return Err(Error::numerical(format!("no bracket for epsilon = {epsilon}")));
            }
        }
        (inner, outer)
    } else {
        let (mut inner, mut outer) = (T::zero(), -T::one());
        while f(outer) < T::zero() {
            inner = outer;
            outer = outer * two;
            iterations += 1;
            if outer < -limit {
                return Err(Error::numerical(format!("no bracket for epsilon = {epsilon}")));
            }
        }
        (outer, inner)
    };

    let mut beta = (lo + hi) / two;
    loop {
        iterations += 1;
        let (mean, var) = moments(beta, support);
        let residual = mean - epsilon;
        if residual.abs() <= tol {
            break;
        }
        if residual > T::zero() {
            lo = beta;
        } else {
            hi = beta;
        }
        if iterations >= MAX_ITERATIONS || !(hi - lo > T::epsilon() * (T::one() + beta.abs())) {
            return Err(Error::NumericalFailure {
                message: format!("tilt search stalled at beta = {beta}, residual {residual}"),
                trace: vec![format!("bracket [{lo}, {hi}] after {iterations} iterations")],
            });
        }
        // d(mean)/d(beta) = -var
        let newton = beta + residual / var;
        beta = if var > T::zero() && newton > lo && newton < hi { newton } else { (lo + hi) / two };
    }

    Ok(GibbsSolution {
        beta,
        distribution: gibbs_distribution(beta, support)?,
        epsilon: epsilon_of_beta(beta, support),
        iterations,
        boundary: None,
    })
}
