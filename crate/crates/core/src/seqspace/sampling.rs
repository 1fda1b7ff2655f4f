//! Monte Carlo conditioning on the sample-mean window
//! `|mean - epsilon| < delta` in the space of `n`-roll sequences.

use rand::Rng;
use serde::Serialize;

use super::rng::{map_chunks, StreamRng};
use crate::dist::{Distribution, Support};
use crate::error::{Error, Result};
use crate::maxent::{solve_for_expectation, DEFAULT_TOLERANCE};

const CHUNK_SEQUENCES: u64 = 1024;

/// Smallest effective sample size the tilted estimator will report.
pub const MIN_EFFECTIVE_SAMPLE_SIZE: f64 = 10.0;

/// Inverse-CDF sampler over support indices.
#[derive(Clone, Debug)]
pub struct FaceSampler {
    cdf: Vec<f64>,
}

impl FaceSampler {
    pub fn new(d: &Distribution) -> Self {
        let mut acc = 0.0;
        let mut cdf: Vec<f64> = d
            .probs()
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        *cdf.last_mut().expect("non-empty") = f64::INFINITY;
        FaceSampler { cdf }
    }

    pub fn sample(&self, rng: &mut impl Rng) -> usize {
        let u: f64 = rng.random();
        self.cdf.iter().position(|&c| u < c).expect("last entry is infinite")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionerEstimate {
    /// Weighted pooled face frequencies of the surviving sequences.
    pub distribution: Distribution,
    /// Per-face standard error of the self-normalized estimate.
    pub standard_errors: Vec<f64>,
    pub draws: u64,
    pub survivors: u64,
    pub acceptance_rate: f64,
    pub effective_sample_size: f64,
    /// Tilt of the proposal (zero for plain rejection).
    pub beta: f64,
}

#[derive(Clone, Debug)]
struct Accumulator {
    survivors: u64,
    sum_w: f64,
    sum_w2: f64,
    sum_wf: Vec<f64>,
    sum_w2f: Vec<f64>,
    sum_w2f2: Vec<f64>,
}

impl Accumulator {
    fn new(k: usize) -> Self {
        Accumulator {
            survivors: 0,
            sum_w: 0.0,
            sum_w2: 0.0,
            sum_wf: vec![0.0; k],
            sum_w2f: vec![0.0; k],
            sum_w2f2: vec![0.0; k],
        }
    }

    fn push(&mut self, w: f64, counts: &[u32], n: usize) {
        self.survivors += 1;
        self.sum_w += w;
        self.sum_w2 += w * w;
        for (j, &c) in counts.iter().enumerate() {
            let f = c as f64 / n as f64;
            self.sum_wf[j] += w * f;
            self.sum_w2f[j] += w * w * f;
            self.sum_w2f2[j] += w * w * f * f;
        }
    }

    fn merge(&mut self, other: &Accumulator) {
        self.survivors += other.survivors;
        self.sum_w += other.sum_w;
        self.sum_w2 += other.sum_w2;
        for j in 0..self.sum_wf.len() {
            self.sum_wf[j] += other.sum_wf[j];
            self.sum_w2f[j] += other.sum_w2f[j];
            self.sum_w2f2[j] += other.sum_w2f2[j];
        }
    }
}

struct WindowRun<'a> {
    support: &'a Support,
    n: usize,
    epsilon: f64,
    delta: f64,
    proposal: &'a Distribution,
    beta: f64,
}

impl WindowRun<'_> {
    fn run(&self, draws: u64, seed: u64) -> Accumulator {
        let sampler = FaceSampler::new(self.proposal);
        let k = self.support.len();
        let values = self.support.values();
        let reference = self.epsilon * self.n as f64;
        let chunks = map_chunks(draws, CHUNK_SEQUENCES, seed, |rng: &mut StreamRng, items| {
            let mut acc = Accumulator::new(k);
            let mut counts = vec![0u32; k];
            for _ in 0..items {
                counts.iter_mut().for_each(|c| *c = 0);
                let mut sum = 0.0;
                for _ in 0..self.n {
                    let j = sampler.sample(rng);
                    counts[j] += 1;
                    sum += values[j];
                }
                if (sum / self.n as f64 - self.epsilon).abs() < self.delta {
                    // uniform / tilted likelihood ratio, up to a constant
                    let w = if self.beta == 0.0 { 1.0 } else { (self.beta * (sum - reference)).exp() };
                    acc.push(w, &counts, self.n);
                }
            }
            acc
        });
        chunks.iter().fold(Accumulator::new(k), |mut a, c| {
            a.merge(c);
            a
        })
    }

    fn estimate(&self, acc: Accumulator, draws: u64) -> Result<ConditionerEstimate> {
        if !acc.sum_w.is_finite() || !acc.sum_w2.is_finite() {
            return Err(Error::numerical("importance weights overflowed"));
        }
        let distribution = Distribution::normalized(self.support.clone(), acc.sum_wf.clone())?;
        let standard_errors = distribution
            .probs()
            .iter()
            .enumerate()
            .map(|(j, &p)| {
                let v = acc.sum_w2f2[j] - 2.0 * p * acc.sum_w2f[j] + p * p * acc.sum_w2;
                v.max(0.0).sqrt() / acc.sum_w
            })
            .collect();
        Ok(ConditionerEstimate {
            distribution,
            standard_errors,
            draws,
            survivors: acc.survivors,
            acceptance_rate: acc.survivors as f64 / draws as f64,
            effective_sample_size: acc.sum_w * acc.sum_w / acc.sum_w2,
            beta: self.beta,
        })
    }
}

fn check_common(n: usize, delta: f64, draws: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("sequence length must be at least 1".into()));
    }
    if !(delta > 0.0) {
        return Err(Error::InvalidArgument(format!("window halfwidth {delta} must be positive")));
    }
    if draws == 0 {
        return Err(Error::InvalidArgument("need at least one draw".into()));
    }
    Ok(())
}

/// Draw uniform sequences and keep those whose mean is within `delta` of
/// `epsilon`. Errors with [`Error::NoSurvivors`] when none are kept.
pub fn rejection_conditioner(
    support: &Support,
    n: usize,
    epsilon: f64,
    delta: f64,
    max_draws: u64,
    seed: u64,
) -> Result<ConditionerEstimate> {
    check_common(n, delta, max_draws)?;
    let uniform = Distribution::uniform(support.clone());
    let run = WindowRun { support, n, epsilon, delta, proposal: &uniform, beta: 0.0 };
    let acc = run.run(max_draws, seed);
    if acc.survivors == 0 {
        return Err(Error::NoSurvivors { draws: max_draws });
    }
    run.estimate(acc, max_draws)
}

/// Importance sampler: propose from the Gibbs distribution whose mean is
/// `epsilon`, reweight survivors by the uniform/tilted likelihood ratio.
pub fn tilted_conditioner(
    support: &Support,
    n: usize,
    epsilon: f64,
    delta: f64,
    draws: u64,
    seed: u64,
) -> Result<ConditionerEstimate> {
    check_common(n, delta, draws)?;
    if !(epsilon > *support.min() && epsilon < *support.max()) {
        return Err(Error::ConstraintInfeasible { epsilon, min: *support.min(), max: *support.max() });
    }
    let tilt = solve_for_expectation(epsilon, support, DEFAULT_TOLERANCE)?;
    let run = WindowRun { support, n, epsilon, delta, proposal: &tilt.distribution, beta: tilt.beta };
    let acc = run.run(draws, seed);
    let ess = if acc.sum_w2 > 0.0 { acc.sum_w * acc.sum_w / acc.sum_w2 } else { 0.0 };
    if !(ess >= MIN_EFFECTIVE_SAMPLE_SIZE) {
        return Err(Error::UnstableEstimate { ess, min: MIN_EFFECTIVE_SAMPLE_SIZE });
    }
    run.estimate(acc, draws)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seqspace::window_conditional_face_distribution;

    fn die() -> Support {
        Support::die()
    }

    #[test]
    fn face_sampler_frequencies() {
        let d = Distribution::new(die(), vec![0.5, 0.0, 0.25, 0.0, 0.0, 0.25]).unwrap();
        let s = FaceSampler::new(&d);
        let mut rng = super::super::rng::chunk_rng(3, 0);
        let mut counts = [0u32; 6];
        for _ in 0..40_000 {
            counts[s.sample(&mut rng)] += 1;
        }
        assert_eq!(counts[1] + counts[3] + counts[4], 0);
        assert!((counts[0] as f64 / 40_000.0 - 0.5).abs() < 0.01);
    }

    #[test]
    fn rejection_near_prior_mean() {
        let est = rejection_conditioner(&die(), 10, 3.5, 0.5, 100_000, 11).unwrap();
        assert!(est.acceptance_rate > 0.5);
        let exact = window_conditional_face_distribution(10, 3.5, 0.5, &die()).unwrap();
        assert!(est.distribution.tv_distance(&exact).unwrap() < 0.05);
        assert_eq!(est.effective_sample_size, est.survivors as f64);
    }

    #[test]
    fn rejection_single_roll() {
        let est = rejection_conditioner(&die(), 1, 4.0, 0.5, 100_000, 5).unwrap();
        assert_eq!(est.distribution, Distribution::point_mass(die(), 3).unwrap());
    }

    #[test]
    fn rejection_rare_event_has_no_survivors() {
        let err = rejection_conditioner(&die(), 200, 5.0, 0.05, 100_000, 1).unwrap_err();
        assert_eq!(err, Error::NoSurvivors { draws: 100_000 });
        assert!(err.to_string().contains("tilted"));
    }

    #[test]
    fn zero_tilt_is_rejection() {
        let a = rejection_conditioner(&die(), 12, 3.5, 0.3, 20_000, 9).unwrap();
        let b = tilted_conditioner(&die(), 12, 3.5, 0.3, 20_000, 9).unwrap();
        assert_eq!(b.beta, 0.0);
        assert_eq!(a, b);
    }

    #[test]
    fn tilt_makes_rare_window_typical() {
        let est = tilted_conditioner(&die(), 50, 5.0, 0.1, 10_000, 4).unwrap();
        assert!(est.acceptance_rate > 0.1, "{}", est.acceptance_rate);
        assert!(est.beta < 0.0);
        let plain = rejection_conditioner(&die(), 50, 5.0, 0.1, 10_000, 4);
        match plain {
            Err(Error::NoSurvivors { .. }) => {}
            Ok(e) => assert!(e.acceptance_rate < 0.01),
            Err(e) => panic!("{e}"),
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let a = tilted_conditioner(&die(), 30, 4.5, 0.1, 5_000, 77).unwrap();
        let b = tilted_conditioner(&die(), 30, 4.5, 0.1, 5_000, 77).unwrap();
        let c = tilted_conditioner(&die(), 30, 4.5, 0.1, 5_000, 78).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn argument_errors() {
        assert!(rejection_conditioner(&die(), 0, 3.5, 0.1, 10, 0).is_err());
        assert!(rejection_conditioner(&die(), 5, 3.5, 0.0, 10, 0).is_err());
        assert!(rejection_conditioner(&die(), 5, 3.5, 0.1, 0, 0).is_err());
        assert!(matches!(tilted_conditioner(&die(), 5, 6.0, 0.1, 10, 0), Err(Error::ConstraintInfeasible { .. })));
        assert!(matches!(tilted_conditioner(&die(), 200, 5.0, 1e-4, 20, 0), Err(Error::UnstableEstimate { .. })));
    }
}
