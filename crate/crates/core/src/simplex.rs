//! Dense two-phase simplex over exact rationals with Bland's anti-cycling rule.
//!
//! Variables are implicitly nonnegative. The solver maximizes.

use num_traits::{Signed, Zero};

use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

impl Relation {
    fn flipped(self) -> Self {
        match self {
            Relation::Le => Relation::Ge,
            Relation::Ge => Relation::Le,
            Relation::Eq => Relation::Eq,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LpError {
    #[error("linear program is infeasible")]
    Infeasible,
    #[error("linear program is unbounded")]
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpSolution {
    pub values: Vec<Rational>,
    pub objective: Rational,
}

#[derive(Debug, Clone)]
pub struct LinearProgram {
    objective: Vec<Rational>,
    rows: Vec<(Vec<Rational>, Relation, Rational)>,
}

impl LinearProgram {
    pub fn maximize(objective: Vec<Rational>) -> Self {
        LinearProgram { objective, rows: Vec::new() }
    }

    pub fn add_constraint(&mut self, coefficients: Vec<Rational>, relation: Relation, rhs: Rational) {
        assert_eq!(coefficients.len(), self.objective.len(), "constraint width");
        self.rows.push((coefficients, relation, rhs));
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn solve(&self) -> Result<LpSolution, LpError> {
        Tableau::build(self).run(&self.objective)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Column {
    Original,
    Slack,
    Artificial,
}

struct Tableau {
    /// `rows[i]` has one entry per column followed by the right-hand side.
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    kinds: Vec<Column>,
    num_original: usize,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Self {
        let n = lp.num_vars();
        let normalized: Vec<(Vec<Rational>, Relation, Rational)> = lp
            .rows
            .iter()
            .map(|(coef, rel, rhs)| {
                // A `>= 0` row flipped to `<= 0` starts with its slack basic
                // and needs no artificial.
                if rhs.is_negative() || (rhs.is_zero() && *rel == Relation::Ge) {
                    (coef.iter().map(|c| -c).collect(), rel.flipped(), -rhs)
                } else {
                    (coef.clone(), *rel, rhs.clone())
                }
            })
            .collect();

        let mut kinds = vec![Column::Original; n];
        let slack_cols: Vec<Option<usize>> = normalized
            .iter()
            .map(|(_, rel, _)| match rel {
                Relation::Eq => None,
                _ => {
                    kinds.push(Column::Slack);
                    Some(kinds.len() - 1)
                }
            })
            .collect();
        let art_cols: Vec<Option<usize>> = normalized
            .iter()
            .map(|(_, rel, _)| match rel {
                Relation::Le => None,
                _ => {
                    kinds.push(Column::Artificial);
                    Some(kinds.len() - 1)
                }
            })
            .collect();

        let width = kinds.len();
        let mut rows = Vec::with_capacity(normalized.len());
        let mut basis = Vec::with_capacity(normalized.len());
        for (i, (coef, rel, rhs)) in normalized.into_iter().enumerate() {
            let mut row = coef;
            row.resize(width + 1, Rational::zero());
            if let Some(s) = slack_cols[i] {
                row[s] = if rel == Relation::Le {
                    Rational::from_integer(1.into())
                } else {
                    Rational::from_integer((-1).into())
                };
            }
            if let Some(a) = art_cols[i] {
                row[a] = Rational::from_integer(1.into());
                basis.push(a);
            } else {
                basis.push(slack_cols[i].expect("<= rows carry a slack"));
            }
            row[width] = rhs;
            rows.push(row);
        }
        Tableau { rows, basis, kinds, num_original: n }
    }

    fn width(&self) -> usize {
        self.kinds.len()
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let pivot = self.rows[row][col].clone();
        for v in self.rows[row].iter_mut() {
            *v = &*v / &pivot;
        }
        let pivot_row = self.rows[row].clone();
        for (i, r) in self.rows.iter_mut().enumerate() {
            if i == row || r[col].is_zero() {
                continue;
            }
            let factor = r[col].clone();
            for (v, p) in r.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &factor * p;
                }
            }
        }
        self.basis[row] = col;
    }

    /// Reduced costs `c_j − c_B·B⁻¹A_j` for the given cost vector.
    fn reduced_costs(&self, cost: &[Rational]) -> Vec<Rational> {
        (0..self.width())
            .map(|j| {
                let mut r = cost[j].clone();
                for (i, row) in self.rows.iter().enumerate() {
                    let cb = &cost[self.basis[i]];
                    if !cb.is_zero() && !row[j].is_zero() {
                        r -= cb * &row[j];
                    }
                }
                r
            })
            .collect()
    }

    /// Bland-rule simplex iterations maximizing `cost`. Columns for which
    /// `allowed` is false never enter.
    fn optimize(&mut self, cost: &[Rational], allowed: impl Fn(usize) -> bool) -> Result<(), LpError> {
        let mut reduced = self.reduced_costs(cost);
        loop {
            let Some(enter) = (0..self.width()).find(|&j| allowed(j) && reduced[j].is_positive()) else {
                return Ok(());
            };
            let rhs = self.width();
            let mut leave: Option<(usize, Rational)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if !row[enter].is_positive() {
                    continue;
                }
                let ratio = &row[rhs] / &row[enter];
                let better = match &leave {
                    None => true,
                    Some((li, best)) => ratio < *best || (ratio == *best && self.basis[i] < self.basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((row, _)) = leave else {
                return Err(LpError::Unbounded);
            };
            self.pivot(row, enter);
            let factor = reduced[enter].clone();
            for (r, p) in reduced.iter_mut().zip(&self.rows[row]) {
                if !p.is_zero() {
                    *r -= &factor * p;
                }
            }
        }
    }

    fn run(mut self, objective: &[Rational]) -> Result<LpSolution, LpError> {
        let width = self.width();
        if self.kinds.contains(&Column::Artificial) {
            let phase1: Vec<Rational> = self
                .kinds
                .iter()
                .map(|k| if *k == Column::Artificial { Rational::from_integer((-1).into()) } else { Rational::zero() })
                .collect();
            self.optimize(&phase1, |_| true)?;
            let infeasibility: Rational = self
                .basis
                .iter()
                .zip(&self.rows)
                .filter(|(b, _)| self.kinds[**b] == Column::Artificial)
                .map(|(_, row)| row[width].clone())
                .sum();
            if infeasibility.is_positive() {
                return Err(LpError::Infeasible);
            }
            self.expel_artificials();
        }

        let mut cost = objective.to_vec();
        cost.resize(width, Rational::zero());
        let kinds = self.kinds.clone();
        self.optimize(&cost, |j| kinds[j] != Column::Artificial)?;

        let mut values = vec![Rational::zero(); self.num_original];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < self.num_original {
                values[b] = self.rows[i][width].clone();
            }
        }
        let objective_value = values.iter().zip(objective).map(|(x, c)| x * c).sum();
        Ok(LpSolution { values, objective: objective_value })
    }

    /// Pivots zero-valued artificial variables out of the basis, dropping
    /// rows that turn out to be redundant.
    fn expel_artificials(&mut self) {
        let mut i = 0;
        while i < self.rows.len() {
            if self.kinds[self.basis[i]] != Column::Artificial {
                i += 1;
                continue;
            }
            let replacement =
                (0..self.width()).find(|&j| self.kinds[j] != Column::Artificial && !self.rows[i][j].is_zero());
            match replacement {
                Some(j) => {
                    self.pivot(i, j);
                    i += 1;
                }
                None => {
                    self.rows.remove(i);
                    self.basis.remove(i);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn v(xs: &[i64]) -> Vec<Rational> {
        xs.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn textbook_maximum() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18  ->  (2, 6), 36
        let mut lp = LinearProgram::maximize(v(&[3, 5]));
        lp.add_constraint(v(&[1, 0]), Relation::Le, int(4));
        lp.add_constraint(v(&[0, 2]), Relation::Le, int(12));
        lp.add_constraint(v(&[3, 2]), Relation::Le, int(18));
        let s = lp.solve().unwrap();
        assert_eq!(s.values, v(&[2, 6]));
        assert_eq!(s.objective, int(36));
    }

    #[test]
    fn equality_and_ge_rows() {
        // max x - y, x + y = 1, x - 2y >= -1/2, y >= 1/4  ->  x = 3/4, y = 1/4
        let mut lp = LinearProgram::maximize(v(&[1, -1]));
        lp.add_constraint(v(&[1, 1]), Relation::Eq, int(1));
        lp.add_constraint(v(&[1, -2]), Relation::Ge, ratio(-1, 2));
        lp.add_constraint(v(&[0, 1]), Relation::Ge, ratio(1, 4));
        let s = lp.solve().unwrap();
        assert_eq!(s.values, vec![ratio(3, 4), ratio(1, 4)]);
    }

    #[test]
    fn detects_infeasible_and_unbounded() {
        let mut lp = LinearProgram::maximize(v(&[1]));
        lp.add_constraint(v(&[1]), Relation::Ge, int(2));
        lp.add_constraint(v(&[1]), Relation::Le, int(1));
        assert_eq!(lp.solve(), Err(LpError::Infeasible));

        let mut lp = LinearProgram::maximize(v(&[1, 0]));
        lp.add_constraint(v(&[1, -1]), Relation::Le, int(1));
        assert_eq!(lp.solve(), Err(LpError::Unbounded));
    }

    #[test]
    fn redundant_equalities() {
        let mut lp = LinearProgram::maximize(v(&[0, 1]));
        lp.add_constraint(v(&[1, 1]), Relation::Eq, int(1));
        lp.add_constraint(v(&[2, 2]), Relation::Eq, int(2));
        let s = lp.solve().unwrap();
        assert_eq!(s.values, v(&[0, 1]));
    }

    #[test]
    fn degenerate_cycling_example_terminates() {
        // Beale's example, which cycles under the largest-coefficient rule.
        let mut lp = LinearProgram::maximize(vec![ratio(3, 4), int(-150), ratio(1, 50), int(-6)]);
        lp.add_constraint(vec![ratio(1, 4), int(-60), ratio(-1, 25), int(9)], Relation::Le, int(0));
        lp.add_constraint(vec![ratio(1, 2), int(-90), ratio(-1, 50), int(3)], Relation::Le, int(0));
        lp.add_constraint(v(&[0, 0, 1, 0]), Relation::Le, int(1));
        let s = lp.solve().unwrap();
        assert_eq!(s.objective, ratio(1, 20));
    }
}
