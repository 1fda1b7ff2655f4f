use serde::Serialize;

use crate::dist::Support;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Default number of grid points.
pub const DEFAULT_GRID_POINTS: usize = 501;
/// Gap kept between the grid and the ends of the support, so that every
/// MaxEnt column has a finite tilt.
pub const DEFAULT_GRID_MARGIN: f64 = 0.02;

/// Strictly increasing evidence values; always contains the prior mean exactly.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvidenceGrid<T = f64> {
    points: Vec<T>,
    center: usize,
}

impl<T: Scalar> EvidenceGrid<T> {
    pub fn new(points: Vec<T>, prior_mean: &T) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidArgument("evidence grid is empty".into()));
        }
        if points.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidArgument("grid points must be strictly increasing".into()));
        }
        let center = points
            .iter()
            .position(|p| p == prior_mean)
            .ok_or_else(|| Error::InvalidArgument(format!("grid does not contain the prior mean {prior_mean}")))?;
        Ok(EvidenceGrid { points, center })
    }

    /// `count` evenly spaced points on `[lo, hi]`; the point nearest
    /// `prior_mean` is replaced by it when within a millionth of a step,
    /// otherwise `prior_mean` is inserted.
    pub fn uniform(lo: T, hi: T, count: usize, prior_mean: T) -> Result<Self> {
        if count < 2 || !(lo < hi) {
            return Err(Error::InvalidArgument(format!(
                "need count >= 2 and lo < hi, got {count} points on [{lo}, {hi}]"
            )));
        }
        let span = hi.clone() - lo.clone();
        let denom = T::from_usize(count - 1).expect("count");
        let mut points: Vec<T> =
            (0..count).map(|i| lo.clone() + span.clone() * T::from_usize(i).expect("index") / denom.clone()).collect();
        let step = span / denom;
        let snap = step / T::from_int(1_000_000);
        let nearest = (0..count)
            .min_by(|&a, &b| {
                let da = (points[a].clone() - prior_mean.clone()).abs();
                let db = (points[b].clone() - prior_mean.clone()).abs();
                da.partial_cmp(&db).expect("ordered")
            })
            .expect("non-empty");
        if (points[nearest].clone() - prior_mean.clone()).abs() <= snap {
            points[nearest] = prior_mean.clone();
        } else {
            let at = points.partition_point(|p| *p < prior_mean);
            points.insert(at, prior_mean.clone());
        }
        Self::new(points, &prior_mean)
    }

    /// [`DEFAULT_GRID_POINTS`] points on `[min + margin, max - margin]` plus
    /// the uniform mean of `support`.
    pub fn default_for(support: &Support<T>, count: usize) -> Result<Self> {
        let margin = T::from_f64_lossy(DEFAULT_GRID_MARGIN);
        Self::uniform(support.min().clone() + margin.clone(), support.max().clone() - margin, count, support.mean())
    }

    pub fn points(&self) -> &[T] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Index of the prior mean.
    pub fn center_index(&self) -> usize {
        self.center
    }

    pub fn center(&self) -> &T {
        &self.points[self.center]
    }

    /// Largest gap between neighbours (zero for a single point).
    pub fn step(&self) -> T {
        self.points.windows(2).map(|w| w[1].clone() - w[0].clone()).fold(T::zero(), |a, b| if b > a { b } else { a })
    }

    pub fn index_of(&self, value: &T) -> Option<usize> {
        self.points.iter().position(|p| p == value)
    }

    pub fn to_f64(&self) -> EvidenceGrid<f64> {
        EvidenceGrid { points: self.points.iter().map(Scalar::to_f64_lossy).collect(), center: self.center }
    }
}
