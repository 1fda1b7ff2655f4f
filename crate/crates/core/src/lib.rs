//! Maximum-entropy updating on finite supports, exact and Monte Carlo
//! conditioning in the product space of roll sequences, and the
//! total-expectation alignment system between the two.
//!
//! Core types are generic over the scalar: see [`scalar`]. The aliases below
//! fix the common instantiations.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod alignment;
pub mod dist;
pub mod error;
pub mod histogram;
pub mod maxent;
pub mod scalar;
pub mod seqspace;

pub use dist::{entropy, expectation, kl_divergence, tv_distance, Distribution, Support};
pub use error::{Error, Result};
pub use histogram::{Histogram, DEFAULT_BIN_WIDTH};
pub use maxent::{epsilon_of_beta, gibbs_distribution, solve_for_expectation, Boundary, GibbsSolution};
pub use scalar::{Rational, Real, Scalar};

pub type Distribution64 = Distribution<f64>;
pub type Distribution32 = Distribution<f32>;
pub type ExactDistribution = Distribution<Rational>;
pub type ExactSupport = Support<Rational>;
pub type SumTable64 = seqspace::SumTable<f64>;
pub type ExactSumTable = seqspace::SumTable<Rational>;
pub type GibbsSolution64 = GibbsSolution<f64>;
pub type GibbsSolution32 = GibbsSolution<f32>;
