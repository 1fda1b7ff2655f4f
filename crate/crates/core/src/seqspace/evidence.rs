//! Histograms of the evidence value (an expectation) induced by two extended
//! spaces: the means of uniform `n`-roll sequences, and the expectations of
//! distributions drawn uniformly from the probability simplex.

use rand::Rng;
use rand_distr::Exp1;
use serde::Serialize;

use super::rng::map_chunks;
use crate::dist::Support;
use crate::error::{Error, Result};
use crate::histogram::Histogram;

/// Desk-scale defaults for the sequence-space experiment.
pub const DEFAULT_SEQUENCE_LENGTH: usize = 10_000;
pub const DEFAULT_SAMPLES: u64 = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EvidenceSource {
    SequenceSpace,
    SimplexSpace,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvidenceSample {
    pub source: EvidenceSource,
    /// Sequence length; `None` for the simplex space.
    pub n: Option<usize>,
    pub means: Histogram,
    pub sample_mean: f64,
    pub sample_sd: f64,
}

impl EvidenceSample {
    pub fn samples(&self) -> u64 {
        self.means.total()
    }

    /// Standard error of `sample_mean`.
    pub fn standard_error(&self) -> f64 {
        self.sample_sd / (self.samples() as f64).sqrt()
    }
}

#[derive(Clone)]
struct Moments {
    hist: Histogram,
    count: u64,
    // deviations from a fixed reference, to keep the variance well conditioned
    sum: f64,
    sum_sq: f64,
}

fn collect(
    chunks: Vec<Moments>,
    bin_width: f64,
    reference: f64,
    source: EvidenceSource,
    n: Option<usize>,
) -> Result<EvidenceSample> {
    let mut hist = Histogram::new(bin_width, 0.0)?;
    let (mut count, mut sum, mut sum_sq) = (0u64, 0.0, 0.0);
    for c in &chunks {
        hist.merge(&c.hist)?;
        count += c.count;
        sum += c.sum;
        sum_sq += c.sum_sq;
    }
    let mean_dev = sum / count as f64;
    let var =
        if count > 1 { ((sum_sq - count as f64 * mean_dev * mean_dev) / (count - 1) as f64).max(0.0) } else { 0.0 };
    Ok(EvidenceSample { source, n, means: hist, sample_mean: reference + mean_dev, sample_sd: var.sqrt() })
}

/// Means of `samples` sequences of `n` uniform draws from `support`.
pub fn evidence_histogram_sequences(
    support: &Support,
    n: usize,
    samples: u64,
    bin_width: f64,
    seed: u64,
) -> Result<EvidenceSample> {
    if n == 0 || samples == 0 {
        return Err(Error::InvalidArgument("need n >= 1 and samples >= 1".into()));
    }
    let empty = Histogram::new(bin_width, 0.0)?;
    let values = support.values();
    let k = values.len();
    let reference = support.mean();
    // keep chunks around a million draws
    let chunk = (1_000_000 / n as u64).clamp(1, 4096);
    let chunks = map_chunks(samples, chunk, seed, |rng, items| {
        let mut m = Moments { hist: empty.clone(), count: 0, sum: 0.0, sum_sq: 0.0 };
        for _ in 0..items {
            let mut total = 0.0;
            for _ in 0..n {
                total += values[rng.random_range(0..k)];
            }
            let mean = total / n as f64;
            m.hist.add(mean);
            let d = mean - reference;
            m.count += 1;
            m.sum += d;
            m.sum_sq += d * d;
        }
        m
    });
    collect(chunks, bin_width, reference, EvidenceSource::SequenceSpace, Some(n))
}

/// Expectations `sum_i v_i p_i` of `samples` points drawn uniformly from the
/// probability simplex over `support` (flat Dirichlet via normalized
/// standard exponentials).
pub fn evidence_histogram_simplex(
    support: &Support,
    samples: u64,
    bin_width: f64,
    seed: u64,
) -> Result<EvidenceSample> {
    if samples == 0 {
        return Err(Error::InvalidArgument("need samples >= 1".into()));
    }
    let empty = Histogram::new(bin_width, 0.0)?;
    let values = support.values();
    let reference = support.mean();
    let chunks = map_chunks(samples, 8192, seed, |rng, items| {
        let mut m = Moments { hist: empty.clone(), count: 0, sum: 0.0, sum_sq: 0.0 };
        for _ in 0..items {
            let (mut total, mut weighted) = (0.0, 0.0);
            for &v in values {
                let e: f64 = rng.sample(Exp1);
                total += e;
                weighted += e * v;
            }
            let mean = weighted / total;
            m.hist.add(mean);
            let d = mean - reference;
            m.count += 1;
            m.sum += d;
            m.sum_sq += d * d;
        }
        m
    });
    collect(chunks, bin_width, reference, EvidenceSource::SimplexSpace, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::histogram::DEFAULT_BIN_WIDTH;

    #[test]
    fn single_roll_means_are_faces() {
        let e = evidence_histogram_sequences(&Support::die(), 1, 600_000, DEFAULT_BIN_WIDTH, 3).unwrap();
        assert_eq!(e.samples(), 600_000);
        assert_eq!(e.means.counts().len(), 6);
        for face in 1..=6 {
            let f = e.means.frequency(e.means.bin_of(face as f64));
            assert!((f - 1.0 / 6.0).abs() < 0.01, "face {face}: {f}");
        }
        let sd = (35.0f64 / 12.0).sqrt();
        assert!((e.sample_mean - 3.5).abs() < 3.0 * sd / 600_000f64.sqrt());
        assert!((e.sample_sd - sd).abs() < 0.01);
    }

    #[test]
    fn simplex_expectations_stay_in_range() {
        let e = evidence_histogram_simplex(&Support::die(), 50_000, DEFAULT_BIN_WIDTH, 1).unwrap();
        assert_eq!(e.samples(), 50_000);
        let lo = e.means.bin_of(1.0);
        let hi = e.means.bin_of(6.0);
        assert!(e.means.counts().keys().all(|&b| b >= lo && b <= hi));
        assert!((e.sample_mean - 3.5).abs() < 4.0 * e.standard_error());
        assert!(e.n.is_none());
    }

    #[test]
    fn seeded_and_reproducible() {
        let a = evidence_histogram_sequences(&Support::die(), 20, 1000, 0.01, 9).unwrap();
        let b = evidence_histogram_sequences(&Support::die(), 20, 1000, 0.01, 9).unwrap();
        assert_eq!(a, b);
        assert!(evidence_histogram_sequences(&Support::die(), 0, 10, 0.01, 9).is_err());
        assert!(evidence_histogram_simplex(&Support::die(), 0, 0.01, 9).is_err());
        assert!(evidence_histogram_simplex(&Support::die(), 10, 0.0, 9).is_err());
    }
}
