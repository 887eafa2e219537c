//! Exact bounded-variable primal simplex.
//!
//! The solver works on a dense tableau over [`Rat`]. Variables are shifted so
//! that every lower bound is zero, rows are sign-normalized, and phase 1 starts
//! from an all-artificial basis with unit costs. Entering and leaving variables
//! follow Bland's rule (smallest index), which keeps the pivot sequence
//! deterministic and finite.

use crate::error::{Error, Result};
use crate::linalg::{is_nonsingular, RatMatrix};
use crate::rational::{dot, Rat};

/// `min objective·x  s.t.  a x = rhs, lower <= x <= upper`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearProgram {
    pub a: RatMatrix,
    pub rhs: Vec<Rat>,
    pub lower: Vec<Rat>,
    pub upper: Vec<Rat>,
    pub objective: Vec<Rat>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexSolution {
    pub status: LpStatus,
    /// Empty unless `status` is optimal.
    pub values: Vec<Rat>,
    /// Structural variables that are basic at the optimum, ascending.
    pub basis: Vec<usize>,
    pub objective_value: Rat,
    pub pivots: u64,
}

impl LinearProgram {
    pub fn num_vars(&self) -> usize {
        self.a.cols()
    }

    pub fn num_rows(&self) -> usize {
        self.a.rows()
    }

    fn check(&self) -> Result<()> {
        let (r, c) = (self.a.rows(), self.a.cols());
        if self.rhs.len() != r {
            return Err(Error::DimensionMismatch(format!("rhs has length {}, expected {r}", self.rhs.len())));
        }
        for (name, len) in [("lower", self.lower.len()), ("upper", self.upper.len()), ("objective", self.objective.len())] {
            if len != c {
                return Err(Error::DimensionMismatch(format!("{name} has length {len}, expected {c}")));
            }
        }
        Ok(())
    }
}

/// Indices of entries that are not integers.
pub fn nonintegral_support(values: &[Rat]) -> Vec<usize> {
    values.iter().enumerate().filter(|(_, v)| !v.is_integer()).map(|(j, _)| j).collect()
}

/// Variables strictly between their bounds.
pub fn interior_columns(lp: &LinearProgram, values: &[Rat]) -> Vec<usize> {
    (0..values.len())
        .filter(|&j| values[j] > lp.lower[j] && values[j] < lp.upper[j])
        .collect()
}

/// Checks the vertex structure of an optimal solution: every variable not at
/// a bound belongs to a set of linearly independent columns.
pub fn vertex_structure_holds(lp: &LinearProgram, sol: &VertexSolution) -> bool {
    let interior = interior_columns(lp, &sol.values);
    is_nonsingular(&lp.a.select_columns(&interior))
}

struct Tableau {
    /// `B^{-1} [A | I]`, one vector per row.
    t: Vec<Vec<Rat>>,
    beta: Vec<Rat>,
    basis: Vec<usize>,
    is_basic: Vec<bool>,
    at_upper: Vec<bool>,
    /// Upper bound of the shifted variable; `None` is unbounded.
    ub: Vec<Option<Rat>>,
    d: Vec<Rat>,
    pivots: u64,
}

enum Step {
    Optimal,
    Unbounded,
    Moved,
}

impl Tableau {
    fn nonbasic_value(&self, j: usize) -> Rat {
        if self.at_upper[j] {
            self.ub[j].clone().expect("variable at an infinite upper bound")
        } else {
            Rat::zero()
        }
    }

    fn reset_costs(&mut self, cost: &[Rat]) {
        let cols = cost.len();
        let mut d = cost.to_vec();
        for (i, &b) in self.basis.iter().enumerate() {
            if cost[b].is_zero() {
                continue;
            }
            for j in 0..cols {
                if !self.t[i][j].is_zero() {
                    d[j] -= &cost[b] * &self.t[i][j];
                }
            }
        }
        self.d = d;
    }

    fn pivot(&mut self, p: usize, q: usize) {
        let piv = self.t[p][q].clone();
        if piv != Rat::one() {
            for v in self.t[p].iter_mut().filter(|v| !v.is_zero()) {
                *v /= &piv;
            }
        }
        let nz: Vec<usize> = (0..self.t[p].len()).filter(|&j| !self.t[p][j].is_zero()).collect();
        let prow = std::mem::take(&mut self.t[p]);
        for (i, row) in self.t.iter_mut().enumerate() {
            if i == p || row[q].is_zero() {
                continue;
            }
            let f = row[q].clone();
            for &j in &nz {
                row[j] -= &f * &prow[j];
            }
        }
        if !self.d[q].is_zero() {
            let f = self.d[q].clone();
            for &j in &nz {
                self.d[j] -= &f * &prow[j];
            }
        }
        self.t[p] = prow;
        let leaving = self.basis[p];
        self.is_basic[leaving] = false;
        self.is_basic[q] = true;
        self.basis[p] = q;
        self.pivots += 1;
    }

    /// One iteration of Bland's rule restricted to columns `< allowed`.
    fn step(&mut self, allowed: usize) -> Step {
        let entering = (0..allowed).find(|&j| {
            if self.is_basic[j] || self.ub[j].as_ref().is_some_and(Rat::is_zero) {
                return false;
            }
            if self.at_upper[j] {
                self.d[j].is_positive()
            } else {
                self.d[j].is_negative()
            }
        });
        let Some(q) = entering else {
            return Step::Optimal;
        };
        let increasing = !self.at_upper[q];
        // Basic variable i moves at rate `rate_i` per unit step of the entering one.
        let mut best: Option<(Rat, usize, usize, bool)> = None; // (step, var, row, leaves_at_upper)
        for i in 0..self.t.len() {
            let tiq = &self.t[i][q];
            if tiq.is_zero() {
                continue;
            }
            let rate = if increasing { -tiq } else { tiq.clone() };
            let var = self.basis[i];
            let cand = if rate.is_negative() {
                Some((&self.beta[i] / &(-&rate), false))
            } else {
                self.ub[var].as_ref().map(|u| (&(u - &self.beta[i]) / &rate, true))
            };
            if let Some((theta, up)) = cand {
                let better = match &best {
                    None => true,
                    Some((bt, bv, _, _)) => theta < *bt || (theta == *bt && var < *bv),
                };
                if better {
                    best = Some((theta, var, i, up));
                }
            }
        }
        let flip = match (&self.ub[q], &best) {
            (Some(u), Some((bt, ..))) => u <= bt,
            (Some(_), None) => true,
            (None, _) => false,
        };
        if !flip && best.is_none() {
            return Step::Unbounded;
        }
        let theta = if flip { self.ub[q].clone().unwrap() } else { best.as_ref().unwrap().0.clone() };
        if !theta.is_zero() {
            for i in 0..self.t.len() {
                let tiq = &self.t[i][q];
                if tiq.is_zero() {
                    continue;
                }
                let delta = &theta * tiq;
                if increasing {
                    self.beta[i] -= delta;
                } else {
                    self.beta[i] += delta;
                }
            }
        }
        if flip {
            self.at_upper[q] = !self.at_upper[q];
            return Step::Moved;
        }
        let (_, _, p, leaves_up) = best.unwrap();
        let entering_value = if increasing {
            &self.nonbasic_value(q) + &theta
        } else {
            &self.nonbasic_value(q) - &theta
        };
        let leaving = self.basis[p];
        self.pivot(p, q);
        self.at_upper[leaving] = leaves_up;
        self.at_upper[q] = false;
        self.beta[p] = entering_value;
        Step::Moved
    }

    fn run(&mut self, allowed: usize) -> Step {
        loop {
            match self.step(allowed) {
                Step::Moved => continue,
                other => return other,
            }
        }
    }
}

/// Solves `lp` to an optimal basic solution.
pub fn solve_lp_vertex(lp: &LinearProgram) -> Result<VertexSolution> {
    lp.check()?;
    let (rows, cols) = (lp.num_rows(), lp.num_vars());
    let infeasible = |pivots| VertexSolution {
        status: LpStatus::Infeasible,
        values: Vec::new(),
        basis: Vec::new(),
        objective_value: Rat::zero(),
        pivots,
    };
    if (0..cols).any(|j| lp.lower[j] > lp.upper[j]) {
        return Ok(infeasible(0));
    }
    // Shift to zero lower bounds and make the right-hand side nonnegative.
    let shifted = lp.a.mul_vec(&lp.lower);
    let mut t = Vec::with_capacity(rows);
    let mut beta = Vec::with_capacity(rows);
    for i in 0..rows {
        let mut r = &lp.rhs[i] - &shifted[i];
        let mut row: Vec<Rat> = lp.a.row(i).to_vec();
        if r.is_negative() {
            r = -r;
            for v in row.iter_mut() {
                *v = -&*v;
            }
        }
        row.extend((0..rows).map(|k| if k == i { Rat::one() } else { Rat::zero() }));
        t.push(row);
        beta.push(r);
    }
    let total = cols + rows;
    let mut ub: Vec<Option<Rat>> = (0..cols).map(|j| Some(&lp.upper[j] - &lp.lower[j])).collect();
    ub.extend((0..rows).map(|_| None));
    let mut tab = Tableau {
        t,
        beta,
        basis: (cols..total).collect(),
        is_basic: (0..total).map(|j| j >= cols).collect(),
        at_upper: vec![false; total],
        ub,
        d: Vec::new(),
        pivots: 0,
    };

    // Phase 1.
    let phase1: Vec<Rat> = (0..total).map(|j| if j >= cols { Rat::one() } else { Rat::zero() }).collect();
    tab.reset_costs(&phase1);
    if let Step::Unbounded = tab.run(total) {
        return Err(Error::Internal("phase-1 problem reported unbounded".into()));
    }
    let infeasibility: Rat = tab
        .basis
        .iter()
        .zip(&tab.beta)
        .filter(|(&b, _)| b >= cols)
        .map(|(_, v)| v.clone())
        .sum();
    if infeasibility.is_positive() {
        return Ok(infeasible(tab.pivots));
    }
    // Freeze artificials at zero and pivot basic ones out where possible.
    for j in cols..total {
        tab.ub[j] = Some(Rat::zero());
    }
    for p in 0..rows {
        if tab.basis[p] < cols {
            continue;
        }
        if let Some(q) = (0..cols).find(|&j| !tab.is_basic[j] && !tab.t[p][j].is_zero()) {
            let value = tab.nonbasic_value(q);
            let leaving = tab.basis[p];
            tab.pivot(p, q);
            tab.at_upper[leaving] = false;
            tab.at_upper[q] = false;
            tab.beta[p] = value;
        }
    }

    // Phase 2.
    let mut cost = lp.objective.clone();
    cost.extend((0..rows).map(|_| Rat::zero()));
    tab.reset_costs(&cost);
    if let Step::Unbounded = tab.run(cols) {
        return Ok(VertexSolution {
            status: LpStatus::Unbounded,
            values: Vec::new(),
            basis: Vec::new(),
            objective_value: Rat::zero(),
            pivots: tab.pivots,
        });
    }

    let mut values: Vec<Rat> = (0..cols).map(|j| &lp.lower[j] + &tab.nonbasic_value(j)).collect();
    for (i, &b) in tab.basis.iter().enumerate() {
        if b < cols {
            values[b] = &lp.lower[b] + &tab.beta[i];
        } else if !tab.beta[i].is_zero() {
            return Err(Error::Internal("artificial variable left nonzero in the basis".into()));
        }
    }
    if lp.a.mul_vec(&values) != lp.rhs
        || (0..cols).any(|j| values[j] < lp.lower[j] || values[j] > lp.upper[j])
    {
        return Err(Error::Internal("simplex produced a point violating the constraints".into()));
    }
    let mut basis: Vec<usize> = tab.basis.iter().copied().filter(|&b| b < cols).collect();
    basis.sort_unstable();
    Ok(VertexSolution {
        status: LpStatus::Optimal,
        objective_value: dot(&lp.objective, &values),
        values,
        basis,
        pivots: tab.pivots,
    })
}
