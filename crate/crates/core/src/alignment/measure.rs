use serde::Serialize;

use super::grid::EvidenceGrid;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Prior probability of each piece of evidence on a grid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvidenceMeasure<T = f64> {
    grid: EvidenceGrid<T>,
    weights: Vec<T>,
}

impl<T: Scalar> EvidenceMeasure<T> {
    /// Weights must be non-negative and sum to one (within 1e-9 for floating
    /// scalars, exactly for exact ones).
    pub fn new(grid: EvidenceGrid<T>, weights: Vec<T>) -> Result<Self> {
        if weights.len() != grid.len() {
            return Err(Error::InvalidArgument(format!("{} weights for {} grid points", weights.len(), grid.len())));
        }
        if let Some(i) = weights.iter().position(|w| w.is_negative() || !w.is_finite_value()) {
            return Err(Error::InvalidDistribution(format!("weight {i} is {}", weights[i])));
        }
        let total = weights.iter().fold(T::zero(), |a, w| a + w.clone());
        if (total.clone() - T::one()).abs() > sum_tolerance::<T>() {
            return Err(Error::InvalidDistribution(format!("weights sum to {total}")));
        }
        Ok(EvidenceMeasure { grid, weights })
    }

    pub fn point_mass(grid: EvidenceGrid<T>, index: usize) -> Result<Self> {
        if index >= grid.len() {
            return Err(Error::InvalidArgument(format!("index {index} outside a grid of {}", grid.len())));
        }
        let mut weights = vec![T::zero(); grid.len()];
        weights[index] = T::one();
        Ok(EvidenceMeasure { grid, weights })
    }

    pub fn uniform(grid: EvidenceGrid<T>) -> Self {
        let w = T::one() / T::from_usize(grid.len()).expect("grid size");
        let weights = vec![w; grid.len()];
        EvidenceMeasure { grid, weights }
    }

    pub fn grid(&self) -> &EvidenceGrid<T> {
        &self.grid
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// `F(x)`: mass on grid points `<= x`.
    pub fn cdf(&self, x: &T) -> T {
        self.grid.points().iter().zip(&self.weights).filter(|(p, _)| *p <= x).fold(T::zero(), |a, (_, w)| a + w.clone())
    }

    /// Mass on the prior-mean grid point.
    pub fn atom_mass(&self) -> T {
        self.weights[self.grid.center_index()].clone()
    }

    /// Mass on grid points within `radius` of the prior mean.
    pub fn mass_near_center(&self, radius: &T) -> T {
        let c = self.grid.center();
        self.grid
            .points()
            .iter()
            .zip(&self.weights)
            .filter(|(p, _)| ((*p).clone() - c.clone()).abs() <= *radius)
            .fold(T::zero(), |a, (_, w)| a + w.clone())
    }

    /// Mass within one grid step of the prior mean.
    pub fn concentration(&self) -> T {
        self.mass_near_center(&self.grid.step())
    }

    /// `Σ c_g w_g`
    pub fn functional(&self, coeffs: &[T]) -> Result<T> {
        if coeffs.len() != self.weights.len() {
            return Err(Error::InvalidArgument(format!(
                "{} coefficients for {} grid points",
                coeffs.len(),
                self.weights.len()
            )));
        }
        Ok(coeffs.iter().zip(&self.weights).fold(T::zero(), |a, (c, w)| a + c.clone() * w.clone()))
    }

    pub fn to_f64(&self) -> EvidenceMeasure<f64> {
        EvidenceMeasure { grid: self.grid.to_f64(), weights: self.weights.iter().map(Scalar::to_f64_lossy).collect() }
    }
}

fn sum_tolerance<T: Scalar>() -> T {
    if T::is_exact() {
        T::zero()
    } else {
        let floor = T::from_f64_lossy(1e-9);
        let p = T::probability_tolerance();
        if p > floor {
            p
        } else {
            floor
        }
    }
}

/// `c_g = 1` when `grid[g] <= threshold`, so that `Σ c_g w_g = F(threshold)`.
pub fn cdf_coefficients<T: Scalar>(grid: &EvidenceGrid<T>, threshold: &T) -> Vec<T> {
    grid.points().iter().map(|p| if p <= threshold { T::one() } else { T::zero() }).collect()
}

/// Coefficients of the trapezoid rule for `∫_a^b F(x) dx`, with `F` read off
/// the grid as a right-continuous step function. Nodes are `a`, `b` and the
/// grid points strictly between them.
pub fn trapezoid_cdf_integral_coefficients<T: Scalar>(grid: &EvidenceGrid<T>, a: &T, b: &T) -> Vec<T> {
    let mut nodes = vec![a.clone()];
    nodes.extend(grid.points().iter().filter(|p| *p > a && *p < b).cloned());
    nodes.push(b.clone());
    let two = T::from_int(2);
    // Node weights of the trapezoid rule.
    let mut node_weights = vec![T::zero(); nodes.len()];
    for (i, w) in nodes.windows(2).enumerate() {
        let half = (w[1].clone() - w[0].clone()) / two.clone();
        node_weights[i] = node_weights[i].clone() + half.clone();
        node_weights[i + 1] = node_weights[i + 1].clone() + half;
    }
    // F(node) = Σ_{g: grid[g] <= node} w_g, so coefficient g collects every
    // node at or beyond grid[g].
    grid.points()
        .iter()
        .map(|p| {
            nodes.iter().zip(&node_weights).filter(|(x, _)| p <= *x).fold(T::zero(), |acc, (_, nw)| acc + nw.clone())
        })
        .collect()
}

/// Coefficients of the exact integral `∫_a^b F(x) dx` of the step CDF:
/// `c_g = clamp(b - grid[g], 0, b - a)`.
pub fn exact_cdf_integral_coefficients<T: Scalar>(grid: &EvidenceGrid<T>, a: &T, b: &T) -> Vec<T> {
    let width = b.clone() - a.clone();
    grid.points()
        .iter()
        .map(|p| {
            let v = b.clone() - p.clone();
            if v.is_negative() {
                T::zero()
            } else if v > width {
                width.clone()
            } else {
                v
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn grid() -> EvidenceGrid {
        EvidenceGrid::new(vec![1.0, 2.0, 3.5, 4.0, 5.5], &3.5).unwrap()
    }

    #[test]
    fn validation() {
        assert!(EvidenceMeasure::new(grid(), vec![0.2; 5]).is_ok());
        assert!(EvidenceMeasure::new(grid(), vec![0.2; 4]).is_err());
        assert!(EvidenceMeasure::new(grid(), vec![0.3, 0.3, 0.3, 0.3, -0.2]).is_err());
        assert!(EvidenceMeasure::new(grid(), vec![0.21; 5]).is_err());
        assert!(EvidenceMeasure::point_mass(grid(), 5).is_err());
    }

    #[test]
    fn cdf_and_concentration() {
        let m = EvidenceMeasure::new(grid(), vec![0.1, 0.2, 0.3, 0.25, 0.15]).unwrap();
        assert!((m.cdf(&2.0) - 0.3).abs() < 1e-15);
        assert_eq!(m.cdf(&0.5), 0.0);
        assert!((m.cdf(&9.0) - 1.0).abs() < 1e-15);
        assert_eq!(m.atom_mass(), 0.3);
        // step is 1.5: everything from 2.0 to 5.0
        assert!((m.concentration() - 0.75).abs() < 1e-15);
        let c = cdf_coefficients(m.grid(), &3.5);
        assert!((m.functional(&c).unwrap() - m.cdf(&3.5)).abs() < 1e-15);
    }

    #[test]
    fn integral_coefficients_agree_with_direct_integration() {
        let m = EvidenceMeasure::new(grid(), vec![0.1, 0.2, 0.3, 0.25, 0.15]).unwrap();
        // F is 0.1 on [1,2), 0.3 on [2,3.5), 0.6 on [3.5,4), 0.85 on [4,5.5)
        let exact = 0.1 * 1.0 + 0.3 * 1.5 + 0.6 * 0.5 + 0.85 * 0.5;
        let c = exact_cdf_integral_coefficients(m.grid(), &1.0, &4.5);
        assert!((m.functional(&c).unwrap() - exact).abs() < 1e-14);
        // trapezoid on nodes 1, 2, 3.5, 4, 4.5 with F(node)
        let f = [0.1, 0.3, 0.6, 0.85, 0.85];
        let x = [1.0, 2.0, 3.5, 4.0, 4.5];
        let trap: f64 = (0..4).map(|i| (x[i + 1] - x[i]) * (f[i] + f[i + 1]) / 2.0).sum();
        let c = trapezoid_cdf_integral_coefficients(m.grid(), &1.0, &4.5);
        assert!((m.functional(&c).unwrap() - trap).abs() < 1e-14);
    }

    #[test]
    fn exact_measure() {
        let q = |a: i64, b: i64| Rational::new(a.into(), b.into());
        let g = EvidenceGrid::new(vec![q(3, 1), q(7, 2), q(4, 1)], &q(7, 2)).unwrap();
        assert!(EvidenceMeasure::new(g.clone(), vec![q(1, 3), q(1, 3), q(1, 3)]).is_ok());
        assert!(EvidenceMeasure::new(g.clone(), vec![q(1, 3), q(1, 3), q(1, 4)]).is_err());
        assert_eq!(EvidenceMeasure::uniform(g).cdf(&q(7, 2)), q(2, 3));
    }
}
