//! Fixed-width histograms with half-open bins `[origin + k w, origin + (k+1) w)`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default bin width for evidence histograms.
pub const DEFAULT_BIN_WIDTH: f64 = 0.002;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    bin_width: f64,
    origin: f64,
    counts: BTreeMap<i64, u64>,
    total: u64,
}

impl Histogram {
    pub fn new(bin_width: f64, origin: f64) -> Result<Self> {
        if !(bin_width > 0.0 && bin_width.is_finite()) {
            return Err(Error::InvalidArgument(format!("bin width {bin_width} must be positive")));
        }
        if !origin.is_finite() {
            return Err(Error::InvalidArgument("origin must be finite".into()));
        }
        Ok(Histogram { bin_width, origin, counts: BTreeMap::new(), total: 0 })
    }

    pub fn bin_width(&self) -> f64 {
        self.bin_width
    }

    pub fn origin(&self) -> f64 {
        self.origin
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn counts(&self) -> &BTreeMap<i64, u64> {
        &self.counts
    }

    pub fn left_edge(&self, bin: i64) -> f64 {
        self.origin + bin as f64 * self.bin_width
    }

    pub fn right_edge(&self, bin: i64) -> f64 {
        self.left_edge(bin + 1)
    }

    /// Bin holding `x`, consistent with [`Histogram::left_edge`] even when
    /// `(x - origin) / width` rounds across an edge.
    pub fn bin_of(&self, x: f64) -> i64 {
        let mut k = ((x - self.origin) / self.bin_width).floor() as i64;
        while self.left_edge(k + 1) <= x {
            k += 1;
        }
        while self.left_edge(k) > x {
            k -= 1;
        }
        k
    }

    pub fn add(&mut self, x: f64) {
        self.add_count(self.bin_of(x), 1);
    }

    fn add_count(&mut self, bin: i64, count: u64) {
        if count > 0 {
            *self.counts.entry(bin).or_insert(0) += count;
            self.total += count;
        }
    }

    /// Fold another histogram with identical binning into this one.
    pub fn merge(&mut self, other: &Histogram) -> Result<()> {
        if self.bin_width != other.bin_width || self.origin != other.origin {
            return Err(Error::InvalidArgument("histograms use different bins".into()));
        }
        for (&bin, &count) in &other.counts {
            self.add_count(bin, count);
        }
        Ok(())
    }

    pub fn frequency(&self, bin: i64) -> f64 {
        if self.total == 0 {
            return 0.0;
        }
        self.counts.get(&bin).copied().unwrap_or(0) as f64 / self.total as f64
    }

    /// Fraction of samples in bins lying entirely inside `[lo, hi]`.
    pub fn mass_within(&self, lo: f64, hi: f64) -> f64 {
        if self.total == 0 {
            return 0.0;
        }
        let slack = 1e-9 * self.bin_width;
        let inside: u64 = self
            .counts
            .iter()
            .filter(|(&b, _)| self.left_edge(b) >= lo - slack && self.right_edge(b) <= hi + slack)
            .map(|(_, &c)| c)
            .sum();
        inside as f64 / self.total as f64
    }

    /// Mean of bin midpoints.
    pub fn binned_mean(&self) -> f64 {
        let sum: f64 =
            self.counts.iter().map(|(&b, &c)| c as f64 * 0.5 * (self.left_edge(b) + self.right_edge(b))).sum();
        sum / self.total as f64
    }

    /// Reflection asymmetry about a bin edge: mass strictly right minus mass
    /// strictly left, and its standard error under exact symmetry.
    pub fn symmetry_defect(&self, center: f64) -> Result<(f64, f64)> {
        let edge = self.bin_of(center);
        if (self.left_edge(edge) - center).abs() > 1e-9 * self.bin_width {
            return Err(Error::InvalidArgument(format!("{center} is not a bin edge")));
        }
        let (mut left, mut right) = (0u64, 0u64);
        for (&b, &c) in &self.counts {
            if b >= edge {
                right += c;
            } else {
                left += c;
            }
        }
        let n = self.total as f64;
        Ok(((right as f64 - left as f64) / n, 1.0 / n.sqrt()))
    }

    /// `bin_left,bin_right,count,frequency` rows with a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("bin_left,bin_right,count,frequency\n");
        for (&b, &c) in &self.counts {
            out.push_str(&format!("{},{},{},{}\n", self.left_edge(b), self.right_edge(b), c, self.frequency(b)));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_width() {
        assert!(Histogram::new(0.0, 0.0).is_err());
        assert!(Histogram::new(-1.0, 0.0).is_err());
        assert!(Histogram::new(f64::NAN, 0.0).is_err());
    }

    #[test]
    fn bins_are_half_open() {
        let h = Histogram::new(DEFAULT_BIN_WIDTH, 0.0).unwrap();
        for face in 1..=6 {
            let x = face as f64;
            let b = h.bin_of(x);
            assert!(h.left_edge(b) <= x && x < h.right_edge(b), "face {face}");
        }
        let h = Histogram::new(0.5, 1.0).unwrap();
        assert_eq!(h.bin_of(1.0), 0);
        assert_eq!(h.bin_of(1.4999), 0);
        assert_eq!(h.bin_of(1.5), 1);
        assert_eq!(h.bin_of(0.99), -1);
    }

    #[test]
    fn counts_sum_to_total_and_merge() {
        let mut a = Histogram::new(0.25, 0.0).unwrap();
        let mut b = a.clone();
        for x in [0.1, 0.2, 0.3, 1.0] {
            a.add(x);
        }
        b.add(0.1);
        a.merge(&b).unwrap();
        assert_eq!(a.total(), 5);
        assert_eq!(a.counts().values().sum::<u64>(), 5);
        assert_eq!(a.frequency(0), 0.6);
        let other = Histogram::new(0.5, 0.0).unwrap();
        assert!(a.merge(&other).is_err());
    }

    #[test]
    fn mass_within_and_symmetry() {
        let mut h = Histogram::new(0.5, 0.0).unwrap();
        for x in [1.2, 1.7, 2.2, 2.6] {
            h.add(x);
        }
        assert_eq!(h.mass_within(1.0, 2.0), 0.5);
        assert_eq!(h.mass_within(1.0, 3.0), 1.0);
        let (defect, se) = h.symmetry_defect(2.0).unwrap();
        assert_eq!(defect, 0.0);
        assert_eq!(se, 0.5);
        assert!(h.symmetry_defect(1.9).is_err());
        assert_eq!(h.binned_mean(), 2.0);
    }

    #[test]
    fn csv_and_json_shape() {
        let mut h = Histogram::new(0.5, 0.0).unwrap();
        h.add(0.75);
        assert_eq!(h.to_csv(), "bin_left,bin_right,count,frequency\n0.5,1,1,1\n");
        let json = serde_json::to_value(&h).unwrap();
        assert_eq!(json["bin_width"], 0.5);
        assert_eq!(json["counts"]["1"], 1);
        let back: Histogram = serde_json::from_value(json).unwrap();
        assert_eq!(back, h);
    }
}
