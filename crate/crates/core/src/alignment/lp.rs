//! Dense two-phase simplex over any [`Scalar`].
//!
//! Sized for the alignment systems (a dozen rows, a few hundred columns).
//! Entering variables follow Dantzig's rule and fall back to Bland's rule
//! after a run of degenerate pivots, which rules out cycling. With an exact
//! scalar every comparison is exact and the answer is a certificate.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Debug)]
struct Row<T> {
    coeffs: Vec<T>,
    relation: Relation,
    rhs: T,
}

/// `minimize c·x` subject to linear rows and `x >= 0`.
#[derive(Clone, Debug)]
pub struct LinearProgram<T> {
    /// Minimization costs (negated for a maximization).
    objective: Vec<T>,
    maximize: bool,
    rows: Vec<Row<T>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution<T> {
    pub x: Vec<T>,
    /// Objective value in the sense of the program (the maximum for
    /// [`LinearProgram::maximize`]).
    pub objective: T,
    pub iterations: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome<T> {
    Optimal(LpSolution<T>),
    /// Phase one could not drive the artificials to zero. `certificate` holds
    /// row multipliers `y` with `y·A_j <= 0` for every column and `y·b > 0`
    /// (a Farkas certificate for the equality form).
    Infeasible {
        residual: T,
        certificate: Vec<T>,
    },
    Unbounded,
}

#[derive(Clone, Debug)]
pub struct LpOptions<T> {
    pub pivot_tolerance: T,
    pub feasibility_tolerance: T,
    pub max_iterations: usize,
}

impl<T: Scalar> Default for LpOptions<T> {
    fn default() -> Self {
        let tol = T::tolerance();
        LpOptions {
            feasibility_tolerance: tol.clone() * T::from_int(1000),
            pivot_tolerance: tol,
            max_iterations: 50_000,
        }
    }
}

impl<T: Scalar> LinearProgram<T> {
    pub fn minimize(objective: Vec<T>) -> Self {
        LinearProgram { objective, maximize: false, rows: Vec::new() }
    }

    pub fn maximize(objective: Vec<T>) -> Self {
        LinearProgram { objective: objective.into_iter().map(|c| -c).collect(), maximize: true, rows: Vec::new() }
    }

    pub fn n_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add_constraint(&mut self, coeffs: Vec<T>, relation: Relation, rhs: T) -> &mut Self {
        assert_eq!(coeffs.len(), self.n_vars(), "constraint width");
        self.rows.push(Row { coeffs, relation, rhs });
        self
    }

    pub fn solve(&self) -> Result<LpOutcome<T>> {
        self.solve_with(&LpOptions::default())
    }

    pub fn solve_with(&self, options: &LpOptions<T>) -> Result<LpOutcome<T>> {
        Tableau::build(self).run(self, options)
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum ColumnKind {
    Original,
    Slack,
    Artificial,
}

struct Tableau<T> {
    /// `rows × (cols + 1)`, last entry is the right-hand side.
    a: Vec<Vec<T>>,
    kinds: Vec<ColumnKind>,
    basis: Vec<usize>,
    /// Row sign applied while making right-hand sides non-negative.
    signs: Vec<T>,
    /// Column that started as the identity column of each row.
    identity: Vec<usize>,
    n_orig: usize,
    iterations: usize,
    trace: Vec<String>,
}

impl<T: Scalar> Tableau<T> {
    fn build(lp: &LinearProgram<T>) -> Self {
        let m = lp.rows.len();
        let n = lp.n_vars();
        let mut kinds = vec![ColumnKind::Original; n];
        let mut signs = Vec::with_capacity(m);
        let mut rows = Vec::with_capacity(m);
        for row in &lp.rows {
            let flip = row.rhs.is_negative();
            let sign = if flip { -T::one() } else { T::one() };
            let relation = match (row.relation, flip) {
                (Relation::Le, true) => Relation::Ge,
                (Relation::Ge, true) => Relation::Le,
                (r, _) => r,
            };
            let coeffs: Vec<T> = row.coeffs.iter().map(|c| c.clone() * sign.clone()).collect();
            rows.push((coeffs, relation, row.rhs.clone() * sign.clone()));
            signs.push(sign);
        }
        let slack_count = rows.iter().filter(|r| r.1 != Relation::Eq).count();
        let art_count = rows.iter().filter(|r| r.1 != Relation::Le).count();
        let cols = n + slack_count + art_count;
        let mut a = vec![vec![T::zero(); cols + 1]; m];
        let mut basis = vec![0; m];
        let mut identity = vec![0; m];
        let (mut next_slack, mut next_art) = (n, n + slack_count);
        kinds.extend(std::iter::repeat_n(ColumnKind::Slack, slack_count));
        kinds.extend(std::iter::repeat_n(ColumnKind::Artificial, art_count));
        for (i, (coeffs, relation, rhs)) in rows.into_iter().enumerate() {
            a[i][..n].clone_from_slice(&coeffs);
            a[i][cols] = rhs;
            match relation {
                Relation::Le => {
                    a[i][next_slack] = T::one();
                    basis[i] = next_slack;
                    identity[i] = next_slack;
                    next_slack += 1;
                }
                Relation::Ge => {
                    a[i][next_slack] = -T::one();
                    next_slack += 1;
                    a[i][next_art] = T::one();
                    basis[i] = next_art;
                    identity[i] = next_art;
                    next_art += 1;
                }
                Relation::Eq => {
                    a[i][next_art] = T::one();
                    basis[i] = next_art;
                    identity[i] = next_art;
                    next_art += 1;
                }
            }
        }
        Tableau { a, kinds, basis, signs, identity, n_orig: n, iterations: 0, trace: Vec::new() }
    }

    fn cols(&self) -> usize {
        self.kinds.len()
    }

    /// Reduced-cost row for `cost`; last entry is minus the objective value.
    fn objective_row(&self, cost: &[T]) -> Vec<T> {
        let mut d: Vec<T> = cost.to_vec();
        d.push(T::zero());
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = cost[b].clone();
            if cb.is_zero() {
                continue;
            }
            for (dj, aij) in d.iter_mut().zip(&self.a[i]) {
                *dj = dj.clone() - cb.clone() * aij.clone();
            }
        }
        d
    }

    fn pivot(&mut self, r: usize, c: usize, obj: &mut [T]) {
        let p = self.a[r][c].clone();
        for v in self.a[r].iter_mut() {
            *v = v.clone() / p.clone();
        }
        let pivot_row = self.a[r].clone();
        let eliminate = |row: &mut [T]| {
            let f = row[c].clone();
            if f.is_zero() {
                return;
            }
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v = v.clone() - f.clone() * pv.clone();
                }
            }
        };
        for (i, row) in self.a.iter_mut().enumerate() {
            if i != r {
                eliminate(row);
            }
        }
        eliminate(obj);
        self.basis[r] = c;
        self.iterations += 1;
    }

    /// Optimize with the given reduced-cost row. Returns false if unbounded.
    fn optimize(&mut self, obj: &mut [T], allowed: &[bool], options: &LpOptions<T>, phase: u8) -> Result<bool> {
        let tol = options.pivot_tolerance.clone();
        let neg_tol = -tol.clone();
        let rhs = self.cols();
        let mut degenerate_run = 0usize;
        loop {
            if self.iterations >= options.max_iterations {
                return Err(Error::NumericalFailure {
                    message: format!("simplex hit {} iterations in phase {phase}", options.max_iterations),
                    trace: std::mem::take(&mut self.trace),
                });
            }
            let bland = degenerate_run > 50;
            let mut entering = None;
            for j in (0..self.cols()).filter(|&j| allowed[j]) {
                if obj[j] < neg_tol {
                    match entering {
                        None => entering = Some(j),
                        Some(e) if !bland && obj[j] < obj[e] => entering = Some(j),
                        _ => {}
                    }
                    if bland {
                        break;
                    }
                }
            }
            let Some(c) = entering else { return Ok(true) };
            let mut leaving: Option<(usize, T)> = None;
            for (i, row) in self.a.iter().enumerate() {
                if row[c] > tol {
                    let ratio = row[rhs].clone() / row[c].clone();
                    let better = match &leaving {
                        None => true,
                        Some((l, best)) => ratio < *best || (ratio == *best && self.basis[i] < self.basis[*l]),
                    };
                    if better {
                        leaving = Some((i, ratio));
                    }
                }
            }
            let Some((r, ratio)) = leaving else { return Ok(false) };
            degenerate_run = if ratio.abs() <= tol { degenerate_run + 1 } else { 0 };
            self.pivot(r, c, obj);
            if self.trace.len() >= 32 {
                self.trace.remove(0);
            }
            self.trace.push(format!(
                "phase {phase} iter {}: enter {c} leave row {r} objective {}",
                self.iterations,
                -obj[rhs].clone()
            ));
        }
    }

    fn run(mut self, lp: &LinearProgram<T>, options: &LpOptions<T>) -> Result<LpOutcome<T>> {
        let rhs = self.cols();
        // Phase one: minimize the sum of artificials.
        let phase1_cost: Vec<T> =
            self.kinds.iter().map(|k| if *k == ColumnKind::Artificial { T::one() } else { T::zero() }).collect();
        let mut obj = self.objective_row(&phase1_cost);
        let all = vec![true; self.cols()];
        self.optimize(&mut obj, &all, options, 1)?;
        let infeasibility = -obj[rhs].clone();
        if infeasibility > options.feasibility_tolerance {
            let certificate = (0..self.a.len())
                .map(|i| {
                    let col = self.identity[i];
                    (phase1_cost[col].clone() - obj[col].clone()) * self.signs[i].clone()
                })
                .collect();
            return Ok(LpOutcome::Infeasible { residual: infeasibility, certificate });
        }

        // Drive artificials out of the basis; rows that cannot be pivoted are
        // redundant and dropped.
        let mut i = 0;
        while i < self.a.len() {
            if self.kinds[self.basis[i]] == ColumnKind::Artificial {
                let col = (0..rhs)
                    .filter(|&j| self.kinds[j] != ColumnKind::Artificial)
                    .max_by(|&x, &y| self.a[i][x].abs().partial_cmp(&self.a[i][y].abs()).expect("ordered"))
                    .filter(|&j| self.a[i][j].abs() > options.pivot_tolerance);
                match col {
                    Some(c) => self.pivot(i, c, &mut obj),
                    None => {
                        self.a.remove(i);
                        self.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }

        // Phase two.
        let mut cost = vec![T::zero(); self.cols()];
        cost[..self.n_orig].clone_from_slice(&lp.objective);
        let mut obj = self.objective_row(&cost);
        let allowed: Vec<bool> = self.kinds.iter().map(|k| *k != ColumnKind::Artificial).collect();
        if !self.optimize(&mut obj, &allowed, options, 2)? {
            return Ok(LpOutcome::Unbounded);
        }
        let mut x = vec![T::zero(); self.n_orig];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < self.n_orig {
                x[b] = self.a[i][rhs].clone();
            }
        }
        let objective = x.iter().zip(&lp.objective).fold(T::zero(), |acc, (xi, ci)| acc + xi.clone() * ci.clone());
        let objective = if lp.maximize && !objective.is_zero() { -objective } else { objective };
        Ok(LpOutcome::Optimal(LpSolution { x, objective, iterations: self.iterations }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn q(a: i64, b: i64) -> Rational {
        Rational::new(a.into(), b.into())
    }

    fn optimal<T: Scalar>(o: LpOutcome<T>) -> LpSolution<T> {
        match o {
            LpOutcome::Optimal(s) => s,
            other => panic!("expected optimum, got {other:?}"),
        }
    }

    #[test]
    fn textbook_maximum() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> (2, 6), 36
        let mut lp = LinearProgram::maximize(vec![3.0, 5.0]);
        lp.add_constraint(vec![1.0, 0.0], Relation::Le, 4.0)
            .add_constraint(vec![0.0, 2.0], Relation::Le, 12.0)
            .add_constraint(vec![3.0, 2.0], Relation::Le, 18.0);
        let s = optimal(lp.solve().unwrap());
        assert!((s.x[0] - 2.0f64).abs() < 1e-12 && (s.x[1] - 6.0f64).abs() < 1e-12);
        assert!((s.objective - 36.0f64).abs() < 1e-12);
    }

    #[test]
    fn equality_and_ge_rows_exact() {
        // min x + 2y + 3z, x + y + z = 1, y + 2z >= 1/2, -x <= -1/10
        let mut lp = LinearProgram::minimize(vec![q(1, 1), q(2, 1), q(3, 1)]);
        lp.add_constraint(vec![q(1, 1), q(1, 1), q(1, 1)], Relation::Eq, q(1, 1))
            .add_constraint(vec![q(0, 1), q(1, 1), q(2, 1)], Relation::Ge, q(1, 2))
            .add_constraint(vec![q(-1, 1), q(0, 1), q(0, 1)], Relation::Le, q(-1, 10));
        let s = optimal(lp.solve().unwrap());
        // z = 1/4, x = 3/4 costs 3/4 + 3/4 = 3/2; y = 1/2, x = 1/2 costs 1/2 + 1 = 3/2.
        assert_eq!(s.objective, q(3, 2));
        let x = &s.x;
        assert_eq!(x[0].clone() + x[1].clone() + x[2].clone(), q(1, 1));
    }

    #[test]
    fn infeasible_with_certificate() {
        // x + y = 1, x + y = 2
        let mut lp = LinearProgram::minimize(vec![q(0, 1), q(0, 1)]);
        lp.add_constraint(vec![q(1, 1), q(1, 1)], Relation::Eq, q(1, 1)).add_constraint(
            vec![q(1, 1), q(1, 1)],
            Relation::Eq,
            q(2, 1),
        );
        match lp.solve().unwrap() {
            LpOutcome::Infeasible { residual, certificate } => {
                assert_eq!(residual, q(1, 1));
                let yb = certificate[0].clone() + certificate[1].clone() * q(2, 1);
                assert!(yb > q(0, 1));
                let ya = certificate[0].clone() + certificate[1].clone();
                assert!(ya <= q(0, 1));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn negative_rhs_certificate_signs() {
        // -x = 1 has no x >= 0 solution
        let mut lp = LinearProgram::minimize(vec![0.0]);
        lp.add_constraint(vec![-1.0], Relation::Eq, 1.0);
        match lp.solve().unwrap() {
            LpOutcome::Infeasible { certificate, .. } => {
                assert!(certificate[0] * 1.0 > 0.0);
                assert!(-certificate[0] <= 0.0);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unbounded() {
        let mut lp = LinearProgram::minimize(vec![-1.0, 0.0]);
        lp.add_constraint(vec![1.0, -1.0], Relation::Le, 1.0);
        assert_eq!(lp.solve().unwrap(), LpOutcome::Unbounded);
    }

    #[test]
    fn redundant_rows_are_dropped() {
        let mut lp = LinearProgram::minimize(vec![q(1, 1), q(0, 1)]);
        lp.add_constraint(vec![q(1, 1), q(1, 1)], Relation::Eq, q(1, 1)).add_constraint(
            vec![q(2, 1), q(2, 1)],
            Relation::Eq,
            q(2, 1),
        );
        let s = optimal(lp.solve().unwrap());
        assert_eq!(s.x, vec![q(0, 1), q(1, 1)]);
    }

    #[test]
    fn degenerate_problem_terminates() {
        // Classic cycling example (Beale) under Dantzig's rule.
        let mut lp = LinearProgram::minimize(vec![-0.75, 150.0, -0.02, 6.0]);
        lp.add_constraint(vec![0.25, -60.0, -0.04, 9.0], Relation::Le, 0.0)
            .add_constraint(vec![0.5, -90.0, -0.02, 3.0], Relation::Le, 0.0)
            .add_constraint(vec![0.0, 0.0, 1.0, 0.0], Relation::Le, 1.0);
        let s = optimal(lp.solve().unwrap());
        assert!((s.objective + 0.05f64).abs() < 1e-12);
    }
}
