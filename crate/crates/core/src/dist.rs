//! Finite outcome spaces, probability vectors and the information measures
//! defined on them. All logarithms are natural.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{Real, Scalar};

/// Ordered, strictly increasing outcome values.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Support<T = f64> {
    values: Vec<T>,
}

impl<T: Scalar> Support<T> {
    pub fn new(values: Vec<T>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidSupport(format!("need at least two outcomes, got {}", values.len())));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite_value()) {
            return Err(Error::InvalidSupport(format!("non-finite value {v}")));
        }
        if values.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidSupport("values must be strictly increasing".into()));
        }
        Ok(Support { values })
    }

    /// Faces of a six-sided die, `{1, ..., 6}`.
    pub fn die() -> Self {
        Self::integer_range(1, 6).expect("die support")
    }

    /// Consecutive integers `lo..=hi`.
    pub fn integer_range(lo: i64, hi: i64) -> Result<Self> {
        Self::new((lo..=hi).map(T::from_int).collect())
    }

    pub fn from_f64s(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| T::from_f64_lossy(v)).collect())
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn min(&self) -> &T {
        &self.values[0]
    }

    pub fn max(&self) -> &T {
        &self.values[self.values.len() - 1]
    }

    /// Expectation under the uniform distribution.
    pub fn mean(&self) -> T {
        let total = self.values.iter().cloned().fold(T::zero(), |a, b| a + b);
        total / T::from_usize(self.len()).expect("length")
    }

    pub fn index_of(&self, value: &T) -> Option<usize> {
        self.values.iter().position(|v| v == value)
    }

    /// The values as integers, if every one of them is integral.
    pub fn integer_values(&self) -> Option<Vec<i64>> {
        self.values
            .iter()
            .map(|v| {
                let f = v.to_f64_lossy();
                let i = f.round() as i64;
                (T::from_int(i) == *v).then_some(i)
            })
            .collect()
    }

    /// Whether the values are `lo, lo + 1, ..., hi`.
    pub fn is_consecutive_integers(&self) -> bool {
        self.integer_values().map(|v| v.windows(2).all(|w| w[1] == w[0] + 1)).unwrap_or(false)
    }

    pub fn to_f64(&self) -> Support<f64> {
        Support { values: self.values.iter().map(Scalar::to_f64_lossy).collect() }
    }
}

impl<'de, T: Scalar + Deserialize<'de>> Deserialize<'de> for Support<T> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let values = Vec::<T>::deserialize(d)?;
        Support::new(values).map_err(serde::de::Error::custom)
    }
}

/// Probability vector over a [`Support`].
///
/// Construction never renormalizes silently: [`Distribution::new`] rejects
/// vectors that do not already sum to one, [`Distribution::normalized`] is the
/// explicit opt-in.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Distribution<T = f64> {
    support: Support<T>,
    probs: Vec<T>,
}

#[derive(Deserialize)]
struct RawDistribution<T> {
    support: Vec<T>,
    probs: Vec<T>,
}

impl<'de, T: Scalar + Deserialize<'de>> Deserialize<'de> for Distribution<T> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawDistribution::<T>::deserialize(d)?;
        let support = Support::new(raw.support).map_err(serde::de::Error::custom)?;
        Distribution::new(support, raw.probs).map_err(serde::de::Error::custom)
    }
}

impl<T: Scalar> Distribution<T> {
    pub fn new(support: Support<T>, probs: Vec<T>) -> Result<Self> {
        Self::with_tolerance(support, probs, T::probability_tolerance())
    }

    /// Like [`Distribution::new`] with a caller-chosen slack on the total.
    pub fn with_tolerance(support: Support<T>, probs: Vec<T>, tol: T) -> Result<Self> {
        Self::check_entries(&support, &probs)?;
        let total = probs.iter().cloned().fold(T::zero(), |a, b| a + b);
        if (total.clone() - T::one()).abs() > tol {
            return Err(Error::InvalidDistribution(format!("entries sum to {total}, not 1")));
        }
        Ok(Distribution { support, probs })
    }

    /// Divide non-negative weights by their total.
    pub fn normalized(support: Support<T>, weights: Vec<T>) -> Result<Self> {
        Self::check_entries(&support, &weights)?;
        let total = weights.iter().cloned().fold(T::zero(), |a, b| a + b);
        if !(total > T::zero()) {
            return Err(Error::InvalidDistribution("weights have zero total".into()));
        }
        let probs = weights.into_iter().map(|w| w / total.clone()).collect();
        Ok(Distribution { support, probs })
    }

    fn check_entries(support: &Support<T>, probs: &[T]) -> Result<()> {
        if probs.len() != support.len() {
            return Err(Error::InvalidDistribution(format!(
                "{} probabilities for {} outcomes",
                probs.len(),
                support.len()
            )));
        }
        if let Some((i, p)) = probs.iter().enumerate().find(|(_, p)| p.is_negative() || !p.is_finite_value()) {
            return Err(Error::InvalidDistribution(format!("entry {i} is {p}")));
        }
        Ok(())
    }

    pub fn uniform(support: Support<T>) -> Self {
        let k = T::from_usize(support.len()).expect("length");
        let probs = vec![T::one() / k; support.len()];
        Distribution { support, probs }
    }

    pub fn point_mass(support: Support<T>, index: usize) -> Result<Self> {
        if index >= support.len() {
            return Err(Error::InvalidArgument(format!("index {index} out of range for {} outcomes", support.len())));
        }
        let mut probs = vec![T::zero(); support.len()];
        probs[index] = T::one();
        Ok(Distribution { support, probs })
    }

    pub fn support(&self) -> &Support<T> {
        &self.support
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn prob_of(&self, value: &T) -> Option<&T> {
        self.support.index_of(value).map(|i| &self.probs[i])
    }

    pub fn expectation(&self) -> T {
        self.probs.iter().zip(self.support.values()).fold(T::zero(), |acc, (p, v)| acc + p.clone() * v.clone())
    }

    /// Half the L1 distance.
    pub fn tv_distance(&self, other: &Self) -> Result<T> {
        self.same_support(other)?;
        let l1 = self.probs.iter().zip(&other.probs).fold(T::zero(), |acc, (p, q)| acc + (p.clone() - q.clone()).abs());
        Ok(l1 / T::from_int(2))
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<T> {
        self.same_support(other)?;
        Ok(self.probs.iter().zip(&other.probs).map(|(p, q)| (p.clone() - q.clone()).abs()).fold(T::zero(), |a, b| {
            if b > a {
                b
            } else {
                a
            }
        }))
    }

    fn same_support(&self, other: &Self) -> Result<()> {
        if self.support != other.support {
            return Err(Error::SupportMismatch);
        }
        Ok(())
    }

    pub fn to_f64(&self) -> Distribution<f64> {
        Distribution { support: self.support.to_f64(), probs: self.probs.iter().map(Scalar::to_f64_lossy).collect() }
    }

    /// One `value,prob` row per outcome, header included.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("value,prob\n");
        for (v, p) in self.support.values().iter().zip(&self.probs) {
            out.push_str(&format!("{v},{p}\n"));
        }
        out
    }
}

impl<T: Real> Distribution<T> {
    /// Shannon entropy in nats, with `0 log 0 = 0`.
    pub fn entropy(&self) -> T {
        -self.probs.iter().filter(|p| **p > T::zero()).fold(T::zero(), |acc, &p| acc + p * p.ln())
    }

    /// Relative entropy `D(self || reference)` in nats.
    pub fn kl_divergence(&self, reference: &Self) -> Result<T> {
        self.same_support(reference)?;
        let mut total = T::zero();
        for (i, (&p, &q)) in self.probs.iter().zip(&reference.probs).enumerate() {
            if p > T::zero() {
                if q <= T::zero() {
                    return Err(Error::AbsoluteContinuity { index: i });
                }
                total = total + p * (p / q).ln();
            }
        }
        // Rounding can leave a -1e-17 for p == q.
        Ok(total.max(T::zero()))
    }
}

impl<T: Scalar> fmt::Display for Distribution<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (v, p)) in self.support.values().iter().zip(&self.probs).enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}: {p}")?;
        }
        write!(f, "}}")
    }
}

/// Free-function forms of the metrics.
pub fn expectation<T: Scalar>(d: &Distribution<T>) -> T {
    d.expectation()
}

pub fn entropy<T: Real>(d: &Distribution<T>) -> T {
    d.entropy()
}

pub fn kl_divergence<T: Real>(p: &Distribution<T>, q: &Distribution<T>) -> Result<T> {
    p.kl_divergence(q)
}

pub fn tv_distance<T: Scalar>(p: &Distribution<T>, q: &Distribution<T>) -> Result<T> {
    p.tv_distance(q)
}
