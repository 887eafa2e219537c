//! Exact depth-first branch-and-bound for mixed-integer models.
//!
//! Every node is an LP relaxation solved to an exact vertex; pruning compares
//! exact rationals, so the returned optimum is the true mixed-integer optimum.

use crate::error::{Error, Result};
use crate::linalg::RatMatrix;
use crate::rational::Rat;
use crate::simplex::{solve_lp_vertex, vertex_structure_holds, LinearProgram, LpStatus};

pub const DEFAULT_NODE_LIMIT: u64 = 1_000_000;

/// A linear program in which the listed variables must take integer values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MixedModel {
    pub lp: LinearProgram,
    pub integer_vars: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MipStatus {
    Optimal,
    Infeasible,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MixedSolution {
    pub status: MipStatus,
    pub values: Vec<Rat>,
    pub objective_value: Rat,
    /// Optimal value of the root relaxation, if it was feasible.
    pub root_bound: Option<Rat>,
    pub nodes: u64,
    pub lp_pivots: u64,
    /// Optimal node relaxations whose vertex structure was checked.
    pub vertex_checks: u64,
    pub vertex_failures: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MipOptions {
    pub node_limit: u64,
    /// Check the vertex structure of every optimal node relaxation.
    pub audit: bool,
}

impl Default for MipOptions {
    fn default() -> Self {
        MipOptions { node_limit: DEFAULT_NODE_LIMIT, audit: false }
    }
}

impl MixedModel {
    fn check(&self) -> Result<()> {
        let c = self.lp.num_vars();
        for &j in &self.integer_vars {
            if j >= c {
                return Err(Error::DimensionMismatch(format!("integer variable {j} out of range 0..{c}")));
            }
            if !self.lp.lower[j].is_integer() || !self.lp.upper[j].is_integer() {
                return Err(Error::InvalidInstance(vec![format!(
                    "integer variable {j} has non-integral bounds [{}, {}]",
                    self.lp.lower[j], self.lp.upper[j]
                )]));
            }
        }
        Ok(())
    }
}

/// Column-wise construction of a [`MixedModel`].
#[derive(Debug, Clone, Default)]
pub struct ModelBuilder {
    rhs: Vec<Rat>,
    columns: Vec<Vec<(usize, Rat)>>,
    lower: Vec<Rat>,
    upper: Vec<Rat>,
    cost: Vec<Rat>,
    integer: Vec<usize>,
}

impl ModelBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_row(&mut self, rhs: Rat) -> usize {
        self.rhs.push(rhs);
        self.rhs.len() - 1
    }

    pub fn add_column(&mut self, entries: Vec<(usize, Rat)>, lower: Rat, upper: Rat, cost: Rat, integer: bool) -> usize {
        let j = self.columns.len();
        self.columns.push(entries);
        self.lower.push(lower);
        self.upper.push(upper);
        self.cost.push(cost);
        if integer {
            self.integer.push(j);
        }
        j
    }

    pub fn build(self) -> MixedModel {
        let mut a = RatMatrix::zeros(self.rhs.len(), self.columns.len());
        for (j, col) in self.columns.into_iter().enumerate() {
            for (r, v) in col {
                a[(r, j)] += v;
            }
        }
        MixedModel {
            lp: LinearProgram { a, rhs: self.rhs, lower: self.lower, upper: self.upper, objective: self.cost },
            integer_vars: self.integer,
        }
    }
}

/// Integer variable whose value is farthest from an integer, smallest index on ties.
fn branching_var(integer_vars: &[usize], values: &[Rat]) -> Option<usize> {
    let mut best: Option<(Rat, usize)> = None;
    for &j in integer_vars {
        let f = values[j].fract();
        if f.is_zero() {
            continue;
        }
        let dist = f.clone().min(&Rat::one() - &f);
        let better = match &best {
            None => true,
            Some((bd, bj)) => dist > *bd || (dist == *bd && j < *bj),
        };
        if better {
            best = Some((dist, j));
        }
    }
    best.map(|(_, j)| j)
}

pub fn solve_mip(model: &MixedModel, opts: &MipOptions) -> Result<MixedSolution> {
    model.check()?;
    let mut out = MixedSolution {
        status: MipStatus::Infeasible,
        values: Vec::new(),
        objective_value: Rat::zero(),
        root_bound: None,
        nodes: 0,
        lp_pivots: 0,
        vertex_checks: 0,
        vertex_failures: 0,
    };
    let mut incumbent: Option<(Rat, Vec<Rat>)> = None;
    let mut stack: Vec<(Vec<Rat>, Vec<Rat>)> = vec![(model.lp.lower.clone(), model.lp.upper.clone())];
    let mut node_lp = model.lp.clone();
    while let Some((lower, upper)) = stack.pop() {
        if out.nodes >= opts.node_limit {
            return Err(Error::NodeLimit(opts.node_limit));
        }
        out.nodes += 1;
        node_lp.lower = lower;
        node_lp.upper = upper;
        let sol = solve_lp_vertex(&node_lp)?;
        out.lp_pivots += sol.pivots;
        match sol.status {
            LpStatus::Optimal => {}
            LpStatus::Infeasible => continue,
            LpStatus::Unbounded => {
                return Err(Error::Internal("relaxation unbounded despite finite bounds".into()))
            }
        }
        if opts.audit {
            out.vertex_checks += 1;
            if !vertex_structure_holds(&node_lp, &sol) {
                out.vertex_failures += 1;
            }
        }
        if out.nodes == 1 {
            out.root_bound = Some(sol.objective_value.clone());
        }
        if incumbent.as_ref().is_some_and(|(best, _)| sol.objective_value >= *best) {
            continue;
        }
        match branching_var(&model.integer_vars, &sol.values) {
            None => incumbent = Some((sol.objective_value, sol.values)),
            Some(j) => {
                let v = &sol.values[j];
                let mut up_lower = node_lp.lower.clone();
                up_lower[j] = v.ceil();
                let mut down_upper = node_lp.upper.clone();
                down_upper[j] = v.floor();
                // Pushed last, explored first.
                stack.push((up_lower, node_lp.upper.clone()));
                stack.push((node_lp.lower.clone(), down_upper));
            }
        }
    }
    if let Some((obj, values)) = incumbent {
        out.status = MipStatus::Optimal;
        out.objective_value = obj;
        out.values = values;
    }
    Ok(out)
}
