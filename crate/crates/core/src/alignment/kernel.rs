//! Update rules as kernels: column `g` is the posterior an agent adopts on
//! learning that the expectation is `grid[g]`.

use rayon::prelude::*;
use serde::Serialize;

use super::grid::EvidenceGrid;
use crate::dist::{Distribution, Support};
use crate::error::{Error, Result};
use crate::maxent::solve_for_expectation;
use crate::scalar::{Real, Scalar};

/// How the two-point interpolation rule treats evidence equal to the prior
/// mean.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AtomPolicy {
    /// Evidence at the prior mean leaves the prior unchanged (uniform column).
    #[default]
    UniformAtom,
    /// The two-point rule applies at the prior mean as everywhere else.
    NoException,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Kernel<T = f64> {
    grid: EvidenceGrid<T>,
    support: Support<T>,
    columns: Vec<Distribution<T>>,
    prior: Distribution<T>,
}

impl<T: Scalar> Kernel<T> {
    /// Columns must be valid distributions on `support`; the prior is uniform.
    pub fn new(grid: EvidenceGrid<T>, support: Support<T>, columns: Vec<Distribution<T>>) -> Result<Self> {
        if columns.len() != grid.len() {
            return Err(Error::InvalidArgument(format!("{} columns for {} grid points", columns.len(), grid.len())));
        }
        if columns.iter().any(|c| c.support() != &support) {
            return Err(Error::SupportMismatch);
        }
        let prior = Distribution::uniform(support.clone());
        Ok(Kernel { grid, support, columns, prior })
    }

    pub fn grid(&self) -> &EvidenceGrid<T> {
        &self.grid
    }

    pub fn support(&self) -> &Support<T> {
        &self.support
    }

    pub fn columns(&self) -> &[Distribution<T>] {
        &self.columns
    }

    pub fn prior(&self) -> &Distribution<T> {
        &self.prior
    }

    /// `P(face | grid[g])`
    pub fn entry(&self, face: usize, g: usize) -> &T {
        &self.columns[g].probs()[face]
    }

    /// Largest `|E[column g] - grid[g]|`.
    pub fn max_constraint_error(&self) -> T {
        self.columns
            .iter()
            .zip(self.grid.points())
            .map(|(c, e)| (c.expectation() - e.clone()).abs())
            .fold(T::zero(), |a, b| if b > a { b } else { a })
    }
}

/// MaxEnt posterior for every grid point. Grid points on the support's ends
/// get the boundary point masses.
pub fn maxent_kernel<T: Real>(grid: &EvidenceGrid<T>, support: &Support<T>) -> Result<Kernel<T>> {
    let tol = T::from(1e-12).expect("tolerance").max(T::epsilon() * T::from(64).expect("64"));
    let columns = grid
        .points()
        .par_iter()
        .map(|&e| solve_for_expectation(e, support, tol).map(|s| s.distribution))
        .collect::<Result<Vec<_>>>()?;
    Kernel::new(grid.clone(), support.clone(), columns)
}

/// The two-point rule: evidence `e` splits mass between `floor(e)` and
/// `ceil(e)` so that the expectation is `e`. Needs consecutive integer
/// outcomes and a grid inside their range.
pub fn piecewise_linear_kernel<T: Scalar>(
    grid: &EvidenceGrid<T>,
    support: &Support<T>,
    policy: AtomPolicy,
) -> Result<Kernel<T>> {
    if !support.is_consecutive_integers() {
        return Err(Error::InvalidSupport("two-point rule needs consecutive integer outcomes".into()));
    }
    let (lo, hi) = (support.min().clone(), support.max().clone());
    if grid.points().iter().any(|p| *p < lo || *p > hi) {
        return Err(Error::InvalidArgument("grid leaves the support range".into()));
    }
    let prior_mean = support.mean();
    let columns = grid
        .points()
        .iter()
        .map(|e| {
            if policy == AtomPolicy::UniformAtom && *e == prior_mean {
                return Ok(Distribution::uniform(support.clone()));
            }
            let floor = floor_of(e);
            let floor_t = T::from_int(floor);
            let base = support.index_of(&floor_t).expect("floor inside support");
            let frac = e.clone() - floor_t;
            let mut probs = vec![T::zero(); support.len()];
            probs[base] = T::one() - frac.clone();
            if !frac.is_zero() {
                probs[base + 1] = frac;
            }
            Distribution::normalized(support.clone(), probs)
        })
        .collect::<Result<Vec<_>>>()?;
    Kernel::new(grid.clone(), support.clone(), columns)
}

/// Every column equal to the prior: any evidence measure aligns.
pub fn uniform_kernel<T: Scalar>(grid: &EvidenceGrid<T>, support: &Support<T>) -> Result<Kernel<T>> {
    let columns = vec![Distribution::uniform(support.clone()); grid.len()];
    Kernel::new(grid.clone(), support.clone(), columns)
}

fn floor_of<T: Scalar>(x: &T) -> i64 {
    let mut f = x.to_f64_lossy().floor() as i64;
    while T::from_int(f) > *x {
        f -= 1;
    }
    while T::from_int(f + 1) <= *x {
        f += 1;
    }
    f
}
