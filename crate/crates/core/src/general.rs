//! Near-feasible solutions for general integer programs with few rows.
//!
//! Columns are grouped by grid cell; a mixed model keeps one integer
//! variable per occupied cell (the group total) and relaxes the individual
//! variables. With group totals fixed, an optimal vertex of the remaining LP
//! has at most `2m` fractional entries, and rounding them inside each group by
//! weight keeps group totals, never raises the objective and moves each row by
//! at most `2m·δ·Δ`.

use crate::boxing::{partition_columns, BoxPartition};
use crate::error::{Error, Result};
use crate::fallback::{Outcome, SoftSystem};
use crate::instance::{ApproxParams, GeneralIp, Tolerance};
use crate::linalg::RatMatrix;
use crate::mip::{MipStatus, MixedModel, MixedSolution};
use crate::rational::{dot, dot_int, Rat};
use crate::result::{ApproxResult, Ctx, Status};
use crate::simplex::{nonintegral_support, LinearProgram, VertexSolution};

/// Rounding data for one group of a fractional vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupRoundingPlan {
    /// Member variable indices sorted by weight, then index.
    pub members: Vec<usize>,
    pub floors: Vec<i64>,
    pub fractions: Vec<Rat>,
    pub weights: Vec<Rat>,
    /// Sum of the fractional parts.
    pub gamma: Rat,
}

impl GroupRoundingPlan {
    pub fn new(members: &[usize], values: &[Rat], weights: &[Rat]) -> Self {
        let mut order = members.to_vec();
        order.sort_by(|&a, &b| weights[a].cmp(&weights[b]).then(a.cmp(&b)));
        let floors: Vec<i64> = order.iter().map(|&j| values[j].floor_i64().expect("value fits in i64")).collect();
        let fractions: Vec<Rat> = order.iter().map(|&j| values[j].fract()).collect();
        let gamma = fractions.iter().sum();
        GroupRoundingPlan {
            weights: order.iter().map(|&j| weights[j].clone()).collect(),
            members: order,
            floors,
            fractions,
            gamma,
        }
    }
}

/// Rounds up the `gamma` lightest fractional members and rounds the rest
/// down; the result is aligned with `plan.members`.
pub fn greedy_group_round(plan: &GroupRoundingPlan) -> Result<Vec<i64>> {
    let Some(mut gamma) = plan.gamma.to_i64() else {
        return Err(Error::Internal(format!("group fractional mass {} is not an integer", plan.gamma)));
    };
    let mut out = plan.floors.clone();
    for (k, f) in plan.fractions.iter().enumerate() {
        if gamma > 0 && !f.is_zero() {
            out[k] += 1;
            gamma -= 1;
        }
    }
    if gamma != 0 {
        return Err(Error::Internal("fewer fractional members than the group mass".into()));
    }
    Ok(out)
}

/// The mixed model: individual variables first, then one integer group total
/// per occupied cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupedModel {
    pub model: MixedModel,
    pub groups: Vec<Vec<usize>>,
}

pub fn build_box_model(inst: &GeneralIp, part: &BoxPartition) -> GroupedModel {
    let (m, n) = (inst.m(), inst.n());
    let groups: Vec<Vec<usize>> = part.groups.values().cloned().collect();
    let canon: Vec<&Vec<Rat>> = part.canonicals.values().collect();
    let g = groups.len();
    let cols = n + g;
    let mut rows = Vec::with_capacity(m + g);
    for i in 0..m {
        let mut row = vec![Rat::zero(); cols];
        for j in 0..n {
            row[j] = part.residuals[j][i].clone();
        }
        for k in 0..g {
            row[n + k] = canon[k][i].clone();
        }
        rows.push(row);
    }
    for (k, members) in groups.iter().enumerate() {
        let mut row = vec![Rat::zero(); cols];
        for &j in members {
            row[j] = Rat::one();
        }
        row[n + k] = Rat::from_int(-1);
        rows.push(row);
    }
    let mut rhs = inst.b.clone();
    rhs.extend((0..g).map(|_| Rat::zero()));
    let mut lower: Vec<Rat> = inst.l.iter().map(|&v| Rat::from_int(v)).collect();
    let mut upper: Vec<Rat> = inst.u.iter().map(|&v| Rat::from_int(v)).collect();
    for members in &groups {
        lower.push(Rat::from_int(members.iter().map(|&j| inst.l[j]).sum()));
        upper.push(Rat::from_int(members.iter().map(|&j| inst.u[j]).sum()));
    }
    let mut objective = inst.w.clone();
    objective.extend((0..g).map(|_| Rat::zero()));
    GroupedModel {
        model: MixedModel {
            lp: LinearProgram { a: RatMatrix::from_rows_with_cols(rows, cols), rhs, lower, upper, objective },
            integer_vars: (n..cols).collect(),
        },
        groups,
    }
}

/// LP over the individual variables with the residual rows and group totals
/// fixed to the values attained by the mixed optimum.
pub fn restricted_lp(inst: &GeneralIp, part: &BoxPartition, grouped: &GroupedModel, mixed: &MixedSolution) -> LinearProgram {
    let (m, n) = (inst.m(), inst.n());
    let x = &mixed.values[..n];
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for i in 0..m {
        let row: Vec<Rat> = (0..n).map(|j| part.residuals[j][i].clone()).collect();
        rhs.push(dot(&row, x));
        rows.push(row);
    }
    for members in &grouped.groups {
        let mut row = vec![Rat::zero(); n];
        for &j in members {
            row[j] = Rat::one();
        }
        rhs.push(members.iter().map(|&j| &x[j]).sum());
        rows.push(row);
    }
    LinearProgram {
        a: RatMatrix::from_rows_with_cols(rows, n),
        rhs,
        lower: inst.l.iter().map(|&v| Rat::from_int(v)).collect(),
        upper: inst.u.iter().map(|&v| Rat::from_int(v)).collect(),
        objective: inst.w.clone(),
    }
}

/// At most `2m` fractional entries.
pub fn claim1_check(sol: &VertexSolution, m: usize) -> bool {
    nonintegral_support(&sol.values).len() <= 2 * m
}

/// Initial grid width `ε / (2m)`.
pub fn initial_delta(epsilon: &Rat, m: usize) -> Rat {
    epsilon / &Rat::from_int(2 * m as i64)
}

fn fallback(inst: &GeneralIp, tolerance: Tolerance, mut ctx: Ctx, proven_infeasible: bool) -> Result<ApproxResult> {
    let Tolerance::Additive(bound) = &tolerance else {
        unreachable!("general instances use additive tolerance")
    };
    let sys = SoftSystem {
        hard: RatMatrix::zeros(0, inst.n()),
        hard_rhs: Vec::new(),
        soft: inst.h.clone(),
        soft_rhs: inst.b.clone(),
        allowance: vec![bound.clone(); inst.m()],
        lower: inst.l.clone(),
        upper: inst.u.clone(),
        objective: inst.w.clone(),
    };
    let (status, x) = match sys.search(&mut ctx)? {
        Outcome::Within(x) => (Status::Solved, x),
        Outcome::Closest(x) => (Status::NearFeasibilityUnattainable, x),
        Outcome::Empty => return Ok(ctx.finish(ApproxResult::empty(Status::Infeasible))),
    };
    if proven_infeasible {
        ctx.notes.push("relaxed model infeasible: the original has no exact solution, objective comparison is vacuous".into());
    }
    let mut result = ApproxResult::empty(status);
    result.report = Some(inst.violation_report(&x, tolerance)?);
    result.solution = Some(x);
    result.original_infeasible = proven_infeasible;
    Ok(ctx.finish(result))
}

pub fn solve_general(inst: &GeneralIp, params: &ApproxParams) -> Result<ApproxResult> {
    params.check()?;
    let delta_h = inst.validate().map_err(Error::InvalidInstance)?;
    let tolerance = Tolerance::Additive(&params.epsilon * &delta_h);
    let mut ctx = Ctx::new(params);
    let (m, n) = (inst.m(), inst.n());
    if delta_h.is_zero() {
        ctx.notes.push("zero constraint matrix: solved exactly without discretization".into());
        let proven = inst.b.iter().any(|v| !v.is_zero());
        return fallback(inst, tolerance, ctx, proven);
    }
    let mut delta = params.delta_override.clone().unwrap_or_else(|| initial_delta(&params.epsilon, m));
    for attempt in 0..=params.refinement_limit {
        let part = partition_columns(&inst.h, &delta);
        let grouped = build_box_model(inst, &part);
        let mixed = ctx.mip(&grouped.model)?;
        if mixed.status == MipStatus::Infeasible {
            return fallback(inst, tolerance, ctx, true);
        }
        let restricted = restricted_lp(inst, &part, &grouped, &mixed);
        let vertex = ctx.vertex(&restricted, "restricted LP")?;
        let fractional = nonintegral_support(&vertex.values).len();
        ctx.support("restricted LP", fractional, 2 * m)?;

        let mut x = vec![0i64; n];
        for (k, members) in grouped.groups.iter().enumerate() {
            let plan = GroupRoundingPlan::new(members, &vertex.values, &inst.w);
            let rounded = greedy_group_round(&plan)?;
            for (&j, v) in plan.members.iter().zip(rounded) {
                x[j] = v;
            }
            let total: i64 = members.iter().map(|&j| x[j]).sum();
            if Rat::from_int(total) != mixed.values[n + k] {
                return Err(Error::Internal(format!("group {k} total changed by rounding")));
            }
        }
        let objective = dot_int(&inst.w, &x);
        if objective > vertex.objective_value || vertex.objective_value > mixed.objective_value {
            return Err(Error::Internal("objective increased along the rounding chain".into()));
        }
        let report = inst.violation_report(&x, tolerance.clone())?;
        if report.within_bound {
            let mut result = ApproxResult::empty(Status::Solved);
            result.report = Some(report);
            result.solution = Some(x);
            result.delta_used = Some(part.delta);
            result.refinements = attempt;
            return Ok(ctx.finish(result));
        }
        ctx.notes.push(format!(
            "width {} gave violation {} above {}; halving",
            part.delta, report.max_abs_residual, report.bound
        ));
        delta = &part.delta / &Rat::from_int(2);
    }
    Err(Error::RefinementExhausted(params.refinement_limit))
}
