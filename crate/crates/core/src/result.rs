//! Pipeline results, solve statistics and the audit trace.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::{ApproxParams, ViolationReport};
use crate::mip::{solve_mip, MipOptions, MixedModel, MixedSolution};
use crate::rational::Rat;
use crate::simplex::{solve_lp_vertex, vertex_structure_holds, LinearProgram, LpStatus, VertexSolution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    /// A solution within the permitted violation was found.
    Solved,
    /// The best solution found violates the permitted bound; its exact report is attached.
    NearFeasibilityUnattainable,
    /// No integer point exists at all (empty bound box or configuration set).
    Infeasible,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SolveStats {
    pub lp_pivots: u64,
    pub bb_nodes: u64,
}

/// Fractional support of a vertex solution against its proven bound.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SupportCheck {
    pub stage: String,
    pub nonintegral: usize,
    pub bound: usize,
}

/// Rank of one type group's assignment submatrix on the fractional support.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RankCheck {
    pub stage: String,
    pub type_group: usize,
    pub fractional_entries: usize,
    pub rank: usize,
    pub nullity: usize,
    pub bound: usize,
}

/// Outcome of one totally unimodular re-solve.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TuCheck {
    pub stage: String,
    pub entries: usize,
    pub integral: bool,
    pub marginals_preserved: bool,
    pub objective_not_increased: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Trace {
    /// Optimal LP vertices whose interior columns were checked for independence.
    pub vertex_checks: u64,
    pub vertex_failures: u64,
    pub support: Vec<SupportCheck>,
    pub ranks: Vec<RankCheck>,
    pub tu: Vec<TuCheck>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ApproxResult {
    pub status: Status,
    /// Integer solution; n-fold solutions are the block vectors concatenated.
    pub solution: Option<Vec<i64>>,
    /// For configuration instances, the chosen index into each block's original list.
    pub choices: Option<Vec<usize>>,
    pub report: Option<ViolationReport>,
    /// Set when the relaxed model was infeasible, which proves the original
    /// has no exact solution; the objective comparison is then vacuous.
    pub original_infeasible: bool,
    pub delta_used: Option<Rat>,
    pub refinements: u32,
    pub stats: SolveStats,
    pub trace: Trace,
    pub notes: Vec<String>,
}

impl ApproxResult {
    pub(crate) fn empty(status: Status) -> Self {
        ApproxResult {
            status,
            solution: None,
            choices: None,
            report: None,
            original_infeasible: false,
            delta_used: None,
            refinements: 0,
            stats: SolveStats::default(),
            trace: Trace::default(),
            notes: Vec::new(),
        }
    }

    pub fn objective(&self) -> Option<&Rat> {
        self.report.as_ref().map(|r| &r.objective)
    }
}

/// Solver context threaded through a pipeline run: limits plus accumulated
/// statistics and audit records.
pub(crate) struct Ctx {
    pub opts: MipOptions,
    pub stats: SolveStats,
    pub trace: Trace,
    pub notes: Vec<String>,
}

impl Ctx {
    pub fn new(params: &ApproxParams) -> Self {
        Ctx {
            opts: MipOptions { node_limit: params.node_limit, audit: params.audit },
            stats: SolveStats::default(),
            trace: Trace::default(),
            notes: Vec::new(),
        }
    }

    pub fn mip(&mut self, model: &MixedModel) -> Result<MixedSolution> {
        let sol = solve_mip(model, &self.opts)?;
        self.stats.bb_nodes += sol.nodes;
        self.stats.lp_pivots += sol.lp_pivots;
        self.trace.vertex_checks += sol.vertex_checks;
        self.trace.vertex_failures += sol.vertex_failures;
        Ok(sol)
    }

    /// Solves an LP that must be feasible and returns its optimal vertex.
    pub fn vertex(&mut self, lp: &LinearProgram, what: &str) -> Result<VertexSolution> {
        let sol = solve_lp_vertex(lp)?;
        self.stats.lp_pivots += sol.pivots;
        if sol.status != LpStatus::Optimal {
            return Err(Error::Internal(format!("{what} is {:?} although a feasible point is known", sol.status)));
        }
        self.trace.vertex_checks += 1;
        if !vertex_structure_holds(lp, &sol) {
            self.trace.vertex_failures += 1;
            return Err(Error::Internal(format!("{what}: interior columns of the vertex are dependent")));
        }
        Ok(sol)
    }

    pub fn support(&mut self, stage: &str, nonintegral: usize, bound: usize) -> Result<()> {
        self.trace.support.push(SupportCheck { stage: stage.to_string(), nonintegral, bound });
        if nonintegral > bound {
            return Err(Error::Internal(format!(
                "{stage}: vertex has {nonintegral} fractional entries, bound is {bound}"
            )));
        }
        Ok(())
    }

    pub fn finish(self, mut result: ApproxResult) -> ApproxResult {
        result.stats = self.stats;
        result.trace = self.trace;
        result.notes.extend(self.notes);
        result
    }
}
