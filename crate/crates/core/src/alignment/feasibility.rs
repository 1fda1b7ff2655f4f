use serde::Serialize;

use super::kernel::Kernel;
use super::lp::{LinearProgram, LpOutcome, Relation};
use super::measure::EvidenceMeasure;
use crate::dist::Support;
use crate::error::{Error, Result};
use crate::maxent::solve_for_expectation;
use crate::scalar::{Real, Scalar};

/// Spread of a bounded functional above which the feasible set is reported
/// as containing more than one measure.
pub const NON_UNIQUE_SPREAD: f64 = 1e-7;

/// Points on the mesh used by [`convexity_witness`].
pub const CONVEXITY_MESH_POINTS: usize = 1001;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FeasibilityResult<T = f64> {
    pub measure: EvidenceMeasure<T>,
    /// Largest violation of the marginal constraints by `measure`.
    pub residual: T,
    /// Mass within one grid step of the prior mean.
    pub concentration: T,
    /// Mass on the prior-mean grid point itself.
    pub atom_mass: T,
    /// `residual <= tol`.
    pub feasible: bool,
    /// Range of the atom mass over the exact feasible set, when it is nonempty.
    pub atom_mass_range: Option<(T, T)>,
    /// Range of `Σ w_g (ε_g - prior mean)²` over the exact feasible set.
    pub dispersion_range: Option<(T, T)>,
    /// One of the ranges above has positive width.
    pub non_unique: bool,
    pub iterations: usize,
}

/// `max_i |Σ_g w_g K[i][g] - prior_i|`
pub fn total_expectation_residual<T: Scalar>(k: &Kernel<T>, m: &EvidenceMeasure<T>) -> Result<T> {
    if k.grid() != m.grid() {
        return Err(Error::GridMismatch);
    }
    let mut worst = T::zero();
    for (i, target) in k.prior().probs().iter().enumerate() {
        let marginal =
            k.columns().iter().zip(m.weights()).fold(T::zero(), |a, (c, w)| a + c.probs()[i].clone() * w.clone());
        let v = (marginal - target.clone()).abs();
        if v > worst {
            worst = v;
        }
    }
    Ok(worst)
}

/// Minimizes the largest marginal violation over evidence measures. The
/// returned measure is a vertex of the optimal set; `atom_mass_range` and
/// `dispersion_range` describe the whole feasible set when `residual <= tol`.
pub fn solve_evidence_measure<T: Scalar>(k: &Kernel<T>, tol: T) -> Result<FeasibilityResult<T>> {
    let g = k.grid().len();
    if g == 0 {
        return Err(Error::InvalidArgument("empty grid".into()));
    }
    // Variables: w_0..w_{g-1}, t. Minimize t.
    let mut objective = vec![T::zero(); g + 1];
    objective[g] = T::one();
    let mut lp = LinearProgram::minimize(objective);
    for (i, target) in k.prior().probs().iter().enumerate() {
        let row: Vec<T> = k.columns().iter().map(|c| c.probs()[i].clone()).collect();
        let mut upper = row.clone();
        upper.push(-T::one());
        lp.add_constraint(upper, Relation::Le, target.clone());
        let mut lower = row;
        lower.push(T::one());
        lp.add_constraint(lower, Relation::Ge, target.clone());
    }
    let mut total = vec![T::one(); g];
    total.push(T::zero());
    lp.add_constraint(total, Relation::Eq, T::one());

    let solution = match lp.solve()? {
        LpOutcome::Optimal(s) => s,
        other => {
            return Err(Error::NumericalFailure {
                message: "minimax program has no optimum".into(),
                trace: vec![format!("{other:?}")],
            })
        }
    };
    let mut weights: Vec<T> =
        solution.x[..g].iter().map(|w| if w.is_negative() { T::zero() } else { w.clone() }).collect();
    let sum = weights.iter().fold(T::zero(), |a, w| a + w.clone());
    if !sum.is_positive() {
        return Err(Error::numerical("minimax program returned zero weights"));
    }
    for w in &mut weights {
        *w = w.clone() / sum.clone();
    }
    let measure = EvidenceMeasure::new(k.grid().clone(), weights)?;
    let residual = total_expectation_residual(k, &measure)?;
    let feasible = residual <= tol;

    let (atom_mass_range, dispersion_range) = if feasible {
        let center = k.grid().center_index();
        let atom: Vec<T> = (0..g).map(|i| if i == center { T::one() } else { T::zero() }).collect();
        let mean = k.grid().center().clone();
        let dispersion: Vec<T> =
            k.grid().points().iter().map(|p| (p.clone() - mean.clone()) * (p.clone() - mean.clone())).collect();
        match (bound_functional(k, &atom), bound_functional(k, &dispersion)) {
            (Ok(a), Ok(d)) => (Some(a), Some(d)),
            // The tolerance admits the minimax vertex while the exact system is
            // empty; leave the ranges unknown.
            (Err(Error::Infeasible { .. }), _) | (_, Err(Error::Infeasible { .. })) => (None, None),
            (Err(e), _) | (_, Err(e)) => return Err(e),
        }
    } else {
        (None, None)
    };
    let spread = T::from_f64_lossy(NON_UNIQUE_SPREAD);
    let wide = |r: &Option<(T, T)>| r.as_ref().is_some_and(|(lo, hi)| hi.clone() - lo.clone() > spread);
    let non_unique = wide(&atom_mass_range) || wide(&dispersion_range);

    Ok(FeasibilityResult {
        concentration: measure.concentration(),
        atom_mass: measure.atom_mass(),
        measure,
        residual,
        feasible,
        atom_mass_range,
        dispersion_range,
        non_unique,
        iterations: solution.iterations,
    })
}

/// Minimum and maximum of `Σ_g c_g w_g` over evidence measures that satisfy
/// the marginal constraints exactly (up to the LP tolerance for floating
/// scalars). An empty feasible set yields [`Error::Infeasible`] with a Farkas
/// certificate: multipliers on the face rows followed by the row `Σ w = 1`.
pub fn bound_functional<T: Scalar>(k: &Kernel<T>, c: &[T]) -> Result<(T, T)> {
    let g = k.grid().len();
    if c.len() != g {
        return Err(Error::InvalidArgument(format!("{} coefficients for {g} grid points", c.len())));
    }
    let build = |lp: &mut LinearProgram<T>| {
        for (i, target) in k.prior().probs().iter().enumerate() {
            let row: Vec<T> = k.columns().iter().map(|col| col.probs()[i].clone()).collect();
            lp.add_constraint(row, Relation::Eq, target.clone());
        }
        lp.add_constraint(vec![T::one(); g], Relation::Eq, T::one());
    };
    let mut lo = LinearProgram::minimize(c.to_vec());
    build(&mut lo);
    let mut hi = LinearProgram::maximize(c.to_vec());
    build(&mut hi);
    let value = |outcome: LpOutcome<T>| match outcome {
        LpOutcome::Optimal(s) => Ok(s.objective),
        LpOutcome::Infeasible { residual, certificate } => Err(Error::Infeasible {
            residual: residual.to_f64_lossy(),
            certificate: certificate.iter().map(Scalar::to_f64_lossy).collect(),
        }),
        LpOutcome::Unbounded => Err(Error::numerical("bounded functional reported unbounded")),
    };
    Ok((value(lo.solve()?)?, value(hi.solve()?)?))
}

/// Minimum over an interior mesh of `[min, max]` of the second difference
/// (divided by the squared mesh step) of `x ↦ Σ_g w_g e^{-β_g x} / Z(β_g)`,
/// where `β_g` is the MaxEnt multiplier whose expectation is `grid[g]`.
///
/// Each term's second difference is evaluated in closed form,
/// `w·e^{-βx}/Z·4 sinh²(βh/2)/h²`, so the result is exactly zero when all
/// mass sits at `β = 0` and strictly positive as soon as any mass leaves it.
/// Grid points on the ends of the support (infinite β) contribute nothing at
/// interior mesh points.
pub fn convexity_witness<T: Real>(m: &EvidenceMeasure<T>, s: &Support<T>) -> Result<T> {
    let tol = T::from(1e-12).expect("tolerance").max(T::epsilon() * T::from(64).expect("64"));
    let mut terms = Vec::new();
    for (e, w) in m.grid().points().iter().zip(m.weights()) {
        if w.is_zero() {
            continue;
        }
        let sol = solve_for_expectation(*e, s, tol)?;
        if sol.is_boundary() || sol.beta.is_zero() {
            continue;
        }
        terms.push((*w, sol.beta));
    }
    let (lo, hi) = (*s.min(), *s.max());
    let n = CONVEXITY_MESH_POINTS - 1;
    let h = (hi - lo) / T::from(n).expect("mesh");
    let two = T::from(2).expect("2");
    let four = T::from(4).expect("4");
    let mut best = T::infinity();
    for j in 1..n {
        let x = lo + h * T::from(j).expect("mesh index");
        let mut value = T::zero();
        for &(w, beta) in &terms {
            // e^{-βx}/Z computed relative to the support point that dominates Z.
            let anchor = if beta > T::zero() { lo } else { hi };
            let z = s.values().iter().fold(T::zero(), |a, &v| a + (-beta * (v - anchor)).exp());
            let density = (-beta * (x - anchor)).exp() / z;
            let sh = (beta * h / two).sinh();
            value = value + w * density * four * sh * sh / (h * h);
        }
        best = best.min(value);
    }
    Ok(best)
}
