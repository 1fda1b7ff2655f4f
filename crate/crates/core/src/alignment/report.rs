//! Summaries of the alignment analyses, as consumed by the command line and
//! the acceptance suite.

use serde::Serialize;

use super::feasibility::{bound_functional, convexity_witness, solve_evidence_measure};
use super::grid::EvidenceGrid;
use super::kernel::{maxent_kernel, piecewise_linear_kernel, AtomPolicy, Kernel};
use super::measure::{cdf_coefficients, trapezoid_cdf_integral_coefficients};
use crate::dist::Support;
use crate::error::Result;

/// Published point values of the evidence CDF for the two-point rule, keyed by
/// threshold.
pub const PUBLISHED_CDF_VALUES: [(i64, f64); 4] = [(2, 0.4294), (3, 0.6636), (4, 0.7751), (5, 0.8931)];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelKind {
    Maxent,
    Piecewise,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AlignmentReport {
    pub kernel: KernelKind,
    pub atom_policy: Option<AtomPolicy>,
    pub grid_points: usize,
    pub grid_step: f64,
    pub residual: f64,
    pub feasible: bool,
    pub concentration: f64,
    pub atom_mass: f64,
    pub atom_mass_range: Option<(f64, f64)>,
    pub dispersion_range: Option<(f64, f64)>,
    pub non_unique: bool,
    /// Minimum second difference of the mixed MaxEnt posterior (MaxEnt kernel only).
    pub convexity_witness: Option<f64>,
    pub lp_iterations: usize,
    /// Non-zero weights of the returned measure as `(grid point, weight)`.
    pub support_of_measure: Vec<(f64, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ForcedIntegral {
    pub k: i64,
    pub expected: f64,
    pub lo: f64,
    pub hi: f64,
    pub tolerance: f64,
    pub within_tolerance: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CdfBound {
    pub atom_policy: AtomPolicy,
    pub threshold: i64,
    pub lo: f64,
    pub hi: f64,
    pub published: f64,
    pub contains_published: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TwoPointReport {
    pub grid_points: usize,
    pub grid_step: f64,
    /// Bounds on the trapezoid approximation of `∫_k^{k+1} F`, two-point rule
    /// without the atom exception.
    pub forced_integrals: Vec<ForcedIntegral>,
    pub cdf_bounds: Vec<CdfBound>,
}

impl TwoPointReport {
    pub fn forced_integrals_hold(&self) -> bool {
        self.forced_integrals.iter().all(|f| f.within_tolerance)
    }

    /// Whether every published value lies inside its feasible interval for
    /// `policy`.
    pub fn published_values_feasible(&self, policy: AtomPolicy) -> bool {
        self.cdf_bounds.iter().filter(|b| b.atom_policy == policy).all(|b| b.contains_published)
    }
}

fn die_grid(grid_points: usize) -> Result<(Support, EvidenceGrid)> {
    let support = Support::die();
    let grid = EvidenceGrid::default_for(&support, grid_points)?;
    Ok((support, grid))
}

/// Builds the kernel on the default grid and solves the alignment system.
pub fn alignment_report(kind: KernelKind, grid_points: usize, policy: AtomPolicy, tol: f64) -> Result<AlignmentReport> {
    let (support, grid) = die_grid(grid_points)?;
    let kernel: Kernel = match kind {
        KernelKind::Maxent => maxent_kernel(&grid, &support)?,
        KernelKind::Piecewise => piecewise_linear_kernel(&grid, &support, policy)?,
    };
    let result = solve_evidence_measure(&kernel, tol)?;
    let convexity = match kind {
        KernelKind::Maxent => Some(convexity_witness(&result.measure, &support)?),
        KernelKind::Piecewise => None,
    };
    let support_of_measure =
        grid.points().iter().zip(result.measure.weights()).filter(|(_, w)| **w > 0.0).map(|(p, w)| (*p, *w)).collect();
    Ok(AlignmentReport {
        kernel: kind,
        atom_policy: (kind == KernelKind::Piecewise).then_some(policy),
        grid_points: grid.len(),
        grid_step: grid.step(),
        residual: result.residual,
        feasible: result.feasible,
        concentration: result.concentration,
        atom_mass: result.atom_mass,
        atom_mass_range: result.atom_mass_range,
        dispersion_range: result.dispersion_range,
        non_unique: result.non_unique,
        convexity_witness: convexity,
        lp_iterations: result.iterations,
        support_of_measure,
    })
}

/// Forced integrals and feasible CDF intervals of the two-point rule.
pub fn two_point_report(grid_points: usize) -> Result<TwoPointReport> {
    let (support, grid) = die_grid(grid_points)?;
    let step = grid.step();
    let plain = piecewise_linear_kernel(&grid, &support, AtomPolicy::NoException)?;
    let with_atom = piecewise_linear_kernel(&grid, &support, AtomPolicy::UniformAtom)?;

    let forced_integrals = (1..=5)
        .map(|k| {
            let c = trapezoid_cdf_integral_coefficients(&grid, &(k as f64), &(k as f64 + 1.0));
            let (lo, hi) = bound_functional(&plain, &c)?;
            let expected = k as f64 / 6.0;
            let tolerance = 2.0 * step;
            let within_tolerance =
                (lo - expected).abs() <= tolerance && (hi - expected).abs() <= tolerance && hi - lo <= tolerance;
            Ok(ForcedIntegral { k, expected, lo, hi, tolerance, within_tolerance })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut cdf_bounds = Vec::new();
    for (policy, kernel) in [(AtomPolicy::NoException, &plain), (AtomPolicy::UniformAtom, &with_atom)] {
        for (threshold, published) in PUBLISHED_CDF_VALUES {
            let (lo, hi) = bound_functional(kernel, &cdf_coefficients(&grid, &(threshold as f64)))?;
            let contains_published = lo <= published && published <= hi;
            cdf_bounds.push(CdfBound { atom_policy: policy, threshold, lo, hi, published, contains_published });
        }
    }
    Ok(TwoPointReport { grid_points: grid.len(), grid_step: step, forced_integrals, cdf_bounds })
}
