//! The total-expectation alignment system: an update rule (kernel) and a
//! prior over evidence (measure) are aligned when averaging the posteriors
//! under the measure returns the prior.

pub mod feasibility;
pub mod grid;
pub mod kernel;
pub mod lp;
pub mod measure;
pub mod report;

pub use feasibility::{
    bound_functional, convexity_witness, solve_evidence_measure, total_expectation_residual, FeasibilityResult,
};
pub use grid::{EvidenceGrid, DEFAULT_GRID_MARGIN, DEFAULT_GRID_POINTS};
pub use kernel::{maxent_kernel, piecewise_linear_kernel, uniform_kernel, AtomPolicy, Kernel};
pub use measure::{
    cdf_coefficients, exact_cdf_integral_coefficients, trapezoid_cdf_integral_coefficients, EvidenceMeasure,
};
pub use report::{
    alignment_report, two_point_report, AlignmentReport, CdfBound, ForcedIntegral, KernelKind, TwoPointReport,
    PUBLISHED_CDF_VALUES,
};
