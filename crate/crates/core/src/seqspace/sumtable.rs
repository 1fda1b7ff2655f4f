//! Exact law of the sum of `n` independent uniform draws from an integer
//! support, by repeated convolution in probability space.

use num_traits::Zero;
use serde::Serialize;

use crate::dist::{Distribution, Support};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Largest table the builder will allocate.
pub const MAX_TABLE_ENTRIES: usize = 1 << 27;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SumTable<T = f64> {
    n: usize,
    support: Support<T>,
    #[serde(skip)]
    faces: Vec<i64>,
    min_sum: i64,
    mass: Vec<T>,
}

impl<T: Scalar> SumTable<T> {
    /// The empty sequence: all mass on sum 0.
    pub fn empty(support: &Support<T>) -> Result<Self> {
        let faces = support
            .integer_values()
            .ok_or_else(|| Error::InvalidSupport("exact sum tables need integer outcome values".into()))?;
        Ok(SumTable { n: 0, support: support.clone(), faces, min_sum: 0, mass: vec![T::one()] })
    }

    pub fn new(n: usize, support: &Support<T>) -> Result<Self> {
        let table = Self::empty(support)?;
        let range = (table.faces[table.faces.len() - 1] - table.faces[0]) as usize;
        let entries = n.saturating_mul(range).saturating_add(1);
        if entries > MAX_TABLE_ENTRIES {
            return Err(Error::TableTooLarge { n, entries });
        }
        (0..n).try_fold(table, |t, _| Ok(t.step()))
    }

    /// Table for `n + 1` draws.
    pub fn step(&self) -> Self {
        let lo = self.faces[0];
        let width = (self.faces[self.faces.len() - 1] - lo) as usize;
        let k = T::from_usize(self.faces.len()).expect("face count");
        let mut next = vec![T::zero(); self.mass.len() + width];
        let offsets: Vec<usize> = self.faces.iter().map(|&f| (f - lo) as usize).collect();
        for (i, m) in self.mass.iter().enumerate() {
            if m.is_zero() {
                continue;
            }
            let share = m.clone() / k.clone();
            for &d in &offsets {
                next[i + d] = next[i + d].clone() + share.clone();
            }
        }
        if !T::is_exact() {
            let total = next.iter().cloned().fold(T::zero(), |a, b| a + b);
            if !total.is_one() {
                for m in &mut next {
                    *m = m.clone() / total.clone();
                }
            }
        }
        SumTable {
            n: self.n + 1,
            support: self.support.clone(),
            faces: self.faces.clone(),
            min_sum: self.min_sum + lo,
            mass: next,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn support(&self) -> &Support<T> {
        &self.support
    }

    pub fn min_sum(&self) -> i64 {
        self.min_sum
    }

    pub fn max_sum(&self) -> i64 {
        self.min_sum + self.mass.len() as i64 - 1
    }

    pub fn mass(&self) -> &[T] {
        &self.mass
    }

    /// `P(sum = s)`, zero outside the table.
    pub fn mass_at(&self, sum: i64) -> T {
        if sum < self.min_sum || sum > self.max_sum() {
            return T::zero();
        }
        self.mass[(sum - self.min_sum) as usize].clone()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &T)> {
        self.mass.iter().enumerate().map(move |(i, m)| (self.min_sum + i as i64, m))
    }

    /// Law of the first draw given the sum of `self.n() + 1` draws equals
    /// `target_sum`. By exchangeability this is also the expected empirical
    /// face frequency among the surviving sequences.
    pub fn conditional_next_face(&self, target_sum: i64) -> Result<Distribution<T>> {
        let weights: Vec<T> = self.faces.iter().map(|&f| self.mass_at(target_sum - f)).collect();
        if weights.iter().all(Zero::is_zero) {
            return Err(Error::EmptyConditioningEvent { n: self.n + 1, target_sum });
        }
        Distribution::normalized(self.support.clone(), weights)
    }

    /// Face law of a sequence of `self.n() + 1` draws conditioned on the
    /// mean falling in `(center - halfwidth, center + halfwidth)`.
    pub fn conditional_next_face_in_window(&self, center: f64, halfwidth: f64) -> Result<Distribution<T>> {
        let n = self.n + 1;
        let lo = self.min_sum + self.faces[0];
        let hi = self.max_sum() + self.faces[self.faces.len() - 1];
        let mut weights = vec![T::zero(); self.faces.len()];
        for s in (lo..=hi).filter(|&s| in_window(s, n, center, halfwidth)) {
            for (w, &f) in weights.iter_mut().zip(&self.faces) {
                *w = w.clone() + self.mass_at(s - f);
            }
        }
        if weights.iter().all(Zero::is_zero) {
            return Err(Error::EmptyConditioningEvent { n, target_sum: (center * n as f64).round() as i64 });
        }
        Distribution::normalized(self.support.clone(), weights)
    }

    /// `P(|sum/n - center| < halfwidth)`.
    pub fn window_probability(&self, center: f64, halfwidth: f64) -> T {
        self.iter()
            .filter(|(s, _)| in_window(*s, self.n, center, halfwidth))
            .fold(T::zero(), |acc, (_, m)| acc + m.clone())
    }

    /// Attainable sum (positive mass) nearest to `n * mean`; ties go toward
    /// the uniform mean.
    pub fn nearest_attainable_sum(&self, mean: f64) -> Option<i64> {
        let target = mean * self.n as f64;
        let prior = self.support.mean().to_f64_lossy() * self.n as f64;
        self.iter().filter(|(_, m)| !m.is_zero()).map(|(s, _)| s).min_by(|&a, &b| {
            let (da, db) = ((a as f64 - target).abs(), (b as f64 - target).abs());
            da.partial_cmp(&db).unwrap().then_with(|| {
                let (pa, pb) = ((a as f64 - prior).abs(), (b as f64 - prior).abs());
                pa.partial_cmp(&pb).unwrap()
            })
        })
    }
}

fn in_window(sum: i64, n: usize, center: f64, halfwidth: f64) -> bool {
    (sum as f64 - center * n as f64).abs() < halfwidth * n as f64
}

/// Exact law of the sum of `n >= 1` uniform draws.
pub fn sum_distribution<T: Scalar>(n: usize, support: &Support<T>) -> Result<SumTable<T>> {
    if n == 0 {
        return Err(Error::InvalidArgument("sequence length must be at least 1".into()));
    }
    SumTable::new(n, support)
}

/// Face law given the sum of `n` draws equals `target_sum`.
pub fn conditional_face_distribution<T: Scalar>(
    n: usize,
    target_sum: i64,
    support: &Support<T>,
) -> Result<Distribution<T>> {
    if n == 0 {
        return Err(Error::InvalidArgument("sequence length must be at least 1".into()));
    }
    SumTable::new(n - 1, support)?.conditional_next_face(target_sum)
}

/// Face law given the mean of `n` draws is within `halfwidth` of `center`.
pub fn window_conditional_face_distribution<T: Scalar>(
    n: usize,
    center: f64,
    halfwidth: f64,
    support: &Support<T>,
) -> Result<Distribution<T>> {
    if n == 0 {
        return Err(Error::InvalidArgument("sequence length must be at least 1".into()));
    }
    SumTable::new(n - 1, support)?.conditional_next_face_in_window(center, halfwidth)
}

/// Probability that the mean of `n` draws lies strictly within `halfwidth`
/// of `center`.
pub fn mean_window_probability<T: Scalar>(n: usize, center: f64, halfwidth: f64, support: &Support<T>) -> Result<T> {
    if !(halfwidth >= 0.0) {
        return Err(Error::InvalidArgument(format!("halfwidth {halfwidth} must be >= 0")));
    }
    Ok(sum_distribution(n, support)?.window_probability(center, halfwidth))
}
