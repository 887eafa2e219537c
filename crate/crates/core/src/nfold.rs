//! Near-feasible solutions for n-fold programs with nonnegative blocks.
//!
//! Each block's local rows are scaled to right-hand side 1. A column is big
//! when one of its scaled entries reaches `ψ = ε/(4t)`; a small column is
//! split as `x = major + minor`, where the major part moves in steps of `λ`
//! (chosen so `λ·column` is big) and the minor part is below `λ`, so minor
//! parts can only add `ε/2` to any local row. Major parts are enumerated as
//! explicit configurations whose local rows lie in `[1 - ε/2, 1 + ε/2]`, and
//! the coupling rows are handled by a mixed model with grid-grouped
//! configuration counts and grid-grouped minor totals.
//!
//! When every column is big the configurations are exactly the solutions of
//! the local rows and the configuration pipeline is reused directly.

use crate::boxing::{partition_config_columns_scaled, partition_vectors, BoxPartition, ConfigBoxPartition};
use crate::config::{
    add_config_part, config_scale, normalize_configs, round_choices, solve_core, CoreOutcome,
    NormalizedConfigs,
};
use crate::error::{Error, Result};
use crate::fallback::{Outcome, SoftSystem};
use crate::general::{greedy_group_round, GroupRoundingPlan};
use crate::instance::{
    ApproxParams, ConfigBlock, NFoldConfigInstance, NFoldNonnegInstance, Tolerance, ViolationReport,
};
use crate::linalg::RatMatrix;
use crate::mip::{MipStatus, MixedModel, MixedSolution, ModelBuilder};
use crate::rational::Rat;
use crate::result::{ApproxResult, Ctx, Status};
use crate::simplex::nonintegral_support;

/// A block after local rows with right-hand side zero have been resolved
/// and the rest scaled to right-hand side one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScaledBlock {
    pub a: RatMatrix,
    /// Original row index of every surviving row.
    pub row_map: Vec<usize>,
    /// Variables forced to zero by a local row with right-hand side zero.
    pub fixed_zero: Vec<usize>,
    pub d: RatMatrix,
    /// Upper bounds, zero for every fixed variable.
    pub u: Vec<i64>,
    pub w: Vec<Rat>,
}

pub fn normalize_block(a: &RatMatrix, bi: &[Rat], d: &RatMatrix, u: &[i64], w: &[Rat]) -> ScaledBlock {
    let t = a.cols();
    let mut fixed = vec![false; t];
    let mut rows = Vec::new();
    let mut row_map = Vec::new();
    for (r, b) in bi.iter().enumerate() {
        if b.is_zero() {
            for j in 0..t {
                if !a[(r, j)].is_zero() {
                    fixed[j] = true;
                }
            }
        } else {
            rows.push(a.row(r).iter().map(|v| v / b).collect::<Vec<Rat>>());
            row_map.push(r);
        }
    }
    let fixed_zero: Vec<usize> = (0..t).filter(|&j| fixed[j]).collect();
    ScaledBlock {
        a: RatMatrix::from_rows_with_cols(rows, t),
        row_map,
        u: (0..t).map(|j| if fixed[j] { 0 } else { u[j] }).collect(),
        fixed_zero,
        d: d.clone(),
        w: w.to_vec(),
    }
}

pub fn normalize_blocks(inst: &NFoldNonnegInstance) -> Vec<ScaledBlock> {
    inst.blocks.iter().map(|b| normalize_block(&b.a, &b.bi, &b.d, &b.u, &b.w)).collect()
}

/// Fixes every variable that feeds a coupling row whose target is zero;
/// with nonnegative data such a variable is zero in every feasible solution.
/// Returns the number of newly fixed variables.
fn fix_by_coupling(blocks: &mut [ScaledBlock], b0: &[Rat]) -> usize {
    let mut count = 0;
    for blk in blocks.iter_mut() {
        for j in 0..blk.u.len() {
            if blk.u[j] > 0 && (0..b0.len()).any(|r| b0[r].is_zero() && !blk.d[(r, j)].is_zero()) {
                blk.u[j] = 0;
                if !blk.fixed_zero.contains(&j) {
                    blk.fixed_zero.push(j);
                }
                count += 1;
            }
        }
        blk.fixed_zero.sort_unstable();
    }
    count
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnKind {
    Big,
    Small,
    /// Forced to zero; takes no part in the split.
    Fixed,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnSplit {
    pub kind: Vec<ColumnKind>,
    /// Step of the major part (1 for big and fixed columns).
    pub lambda: Vec<i64>,
    /// `⌊u/λ⌋`: number of major steps.
    pub major_bound: Vec<i64>,
    /// `min(λ - 1, u)`.
    pub minor_bound: Vec<i64>,
}

pub fn classify_and_split(block: &ScaledBlock, psi: &Rat, block_index: usize) -> Result<ColumnSplit> {
    let t = block.u.len();
    let mut split = ColumnSplit {
        kind: Vec::with_capacity(t),
        lambda: Vec::with_capacity(t),
        major_bound: Vec::with_capacity(t),
        minor_bound: Vec::with_capacity(t),
    };
    for j in 0..t {
        if block.u[j] == 0 {
            split.kind.push(ColumnKind::Fixed);
            split.lambda.push(1);
            split.major_bound.push(0);
            split.minor_bound.push(0);
            continue;
        }
        let top = block.a.column(j).into_iter().max().unwrap_or_else(Rat::zero);
        if top.is_zero() {
            return Err(Error::ZeroColumnUnsupported { block: block_index, column: j });
        }
        let (kind, lambda) = if top >= *psi {
            (ColumnKind::Big, 1)
        } else {
            (ColumnKind::Small, (psi / &top).ceil_i64().expect("step fits in i64"))
        };
        split.kind.push(kind);
        split.lambda.push(lambda);
        split.major_bound.push(block.u[j] / lambda);
        split.minor_bound.push((lambda - 1).min(block.u[j]));
    }
    Ok(split)
}

/// Values the major part of a column may take. Together with a minor part in
/// `[0, min(λ-1, u)]` they cover every integer in `[0, u]` and never exceed `u`:
/// multiples `0, λ, …, λ(K-1)` plus the top value `u - λ + 1`, where `K = ⌊u/λ⌋`.
pub fn major_values(u: i64, lambda: i64) -> Vec<i64> {
    let k = u / lambda;
    if k == 0 {
        return vec![0];
    }
    let mut out: Vec<i64> = (0..k).map(|q| q * lambda).collect();
    out.push(u - lambda + 1);
    out
}

/// All major vectors whose scaled local rows lie in `[lo, hi]`, in
/// lexicographic order of their value indices.
pub fn enumerate_major_configs(
    block: &ScaledBlock,
    split: &ColumnSplit,
    lo: &Rat,
    hi: &Rat,
    cap: u64,
) -> Result<Vec<Vec<i64>>> {
    let t = split.kind.len();
    let rows = block.a.rows();
    let values: Vec<Vec<i64>> = (0..t)
        .map(|j| match split.kind[j] {
            ColumnKind::Fixed => vec![0],
            _ => major_values(block.u[j], split.lambda[j]),
        })
        .collect();
    let mut out = Vec::new();
    let mut current = vec![0i64; t];
    let mut sums = vec![vec![Rat::zero(); rows]; t + 1];
    let mut visited = 0u64;
    fn rec(
        j: usize,
        block: &ScaledBlock,
        values: &[Vec<i64>],
        lo: &Rat,
        hi: &Rat,
        cap: u64,
        current: &mut Vec<i64>,
        sums: &mut Vec<Vec<Rat>>,
        visited: &mut u64,
        out: &mut Vec<Vec<i64>>,
    ) -> Result<()> {
        *visited += 1;
        if *visited > cap {
            return Err(Error::EnumerationCap { cap, what: "major configurations".into() });
        }
        let rows = sums[0].len();
        if j == values.len() {
            if sums[j].iter().all(|v| v >= lo && v <= hi) {
                out.push(current.clone());
            }
            return Ok(());
        }
        for &v in &values[j] {
            let next: Vec<Rat> = (0..rows).map(|r| &sums[j][r] + &(&block.a[(r, j)] * &Rat::from_int(v))).collect();
            // Entries are nonnegative and values increase, so sums only grow.
            if next.iter().any(|x| x > hi) {
                break;
            }
            current[j] = v;
            sums[j + 1] = next;
            rec(j + 1, block, values, lo, hi, cap, current, sums, visited, out)?;
        }
        current[j] = 0;
        Ok(())
    }
    rec(0, block, &values, lo, hi, cap, &mut current, &mut sums, &mut visited, &mut out)?;
    Ok(out)
}

/// A minor variable: block, column, upper bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MinorVar {
    pub block: usize,
    pub column: usize,
    pub bound: i64,
}

/// The combined mixed model and where its columns live.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitModel {
    pub model: MixedModel,
    pub z_col: Vec<Vec<usize>>,
    pub y_col: Vec<Vec<usize>>,
    pub minor_col: Vec<usize>,
    /// Minor groups (indices into the minor list) with their integer total column.
    pub minor_groups: Vec<(Vec<usize>, usize)>,
}

pub fn build_split_model(
    norm: &NormalizedConfigs,
    config_part: &ConfigBoxPartition,
    minors: &[MinorVar],
    minor_part: &BoxPartition,
    weights: &[Vec<Rat>],
    b0: &[Rat],
) -> SplitModel {
    let mut builder = ModelBuilder::new();
    let coupling: Vec<usize> = b0.iter().map(|b| builder.add_row(b.clone())).collect();
    let (z_col, y_col) = add_config_part(&mut builder, norm, config_part, &coupling);
    let group_rows: Vec<usize> = minor_part.groups.values().map(|_| builder.add_row(Rat::zero())).collect();
    let mut group_of = vec![0usize; minors.len()];
    for (g, members) in minor_part.groups.values().enumerate() {
        for &q in members {
            group_of[q] = g;
        }
    }
    let minor_col: Vec<usize> = minors
        .iter()
        .enumerate()
        .map(|(q, mv)| {
            let mut entries: Vec<(usize, Rat)> = coupling
                .iter()
                .enumerate()
                .map(|(r, &row)| (row, minor_part.residuals[q][r].clone()))
                .filter(|(_, v)| !v.is_zero())
                .collect();
            entries.push((group_rows[group_of[q]], Rat::one()));
            builder.add_column(
                entries,
                Rat::zero(),
                Rat::from_int(mv.bound),
                weights[mv.block][mv.column].clone(),
                false,
            )
        })
        .collect();
    let minor_groups = minor_part
        .ordered_groups()
        .into_iter()
        .enumerate()
        .map(|(g, (canon, members))| {
            let mut entries: Vec<(usize, Rat)> = coupling
                .iter()
                .enumerate()
                .map(|(r, &row)| (row, canon[r].clone()))
                .filter(|(_, v)| !v.is_zero())
                .collect();
            entries.push((group_rows[g], Rat::from_int(-1)));
            let total: i64 = members.iter().map(|&q| minors[q].bound).sum();
            let col = builder.add_column(entries, Rat::zero(), Rat::from_int(total), Rat::zero(), true);
            (members.clone(), col)
        })
        .collect();
    SplitModel { model: builder.build(), z_col, y_col, minor_col, minor_groups }
}

/// Smallest positive entry of `b0`, or one if there is none.
fn smallest_positive(b0: &[Rat]) -> Rat {
    b0.iter().filter(|v| v.is_positive()).cloned().min().unwrap_or_else(Rat::one)
}

fn nonzero_or_one(r: Rat) -> Rat {
    if r.is_zero() {
        Rat::one()
    } else {
        r
    }
}

/// Exact search over the original variables once a relaxation is infeasible.
fn nonneg_fallback(inst: &NFoldNonnegInstance, tolerance: Tolerance, mut ctx: Ctx) -> Result<ApproxResult> {
    let Tolerance::Multiplicative(eps) = &tolerance else { unreachable!() };
    let (n, t, sd) = (inst.n(), inst.t(), inst.s_d());
    let sa = inst.s_a();
    let vars = n * t;
    let rows = sd + n * sa;
    let mut soft = RatMatrix::zeros(rows, vars);
    let mut targets = inst.b0.clone();
    for (i, blk) in inst.blocks.iter().enumerate() {
        for j in 0..t {
            for r in 0..sd {
                soft[(r, i * t + j)] = blk.d[(r, j)].clone();
            }
            for r in 0..sa {
                soft[(sd + i * sa + r, i * t + j)] = blk.a[(r, j)].clone();
            }
        }
        targets.extend(blk.bi.iter().cloned());
    }
    let sys = SoftSystem {
        hard: RatMatrix::zeros(0, vars),
        hard_rhs: vec![],
        soft,
        allowance: targets.iter().map(|b| eps * &b.abs()).collect(),
        soft_rhs: targets,
        lower: vec![0; vars],
        upper: inst.blocks.iter().flat_map(|b| b.u.iter().copied()).collect(),
        objective: inst.blocks.iter().flat_map(|b| b.w.iter().cloned()).collect(),
    };
    let (status, x) = match sys.search(&mut ctx)? {
        Outcome::Within(x) => (Status::Solved, x),
        Outcome::Closest(x) => (Status::NearFeasibilityUnattainable, x),
        Outcome::Empty => return Ok(ctx.finish(ApproxResult::empty(Status::Infeasible))),
    };
    ctx.notes.push("relaxed model infeasible: the original has no exact solution, objective comparison is vacuous".into());
    let mut result = ApproxResult::empty(status);
    result.report = Some(inst.violation_report(&x, tolerance)?);
    result.solution = Some(x);
    result.original_infeasible = true;
    Ok(ctx.finish(result))
}

fn config_instance(blocks: &[ScaledBlock], configs: Vec<Vec<Vec<i64>>>, b0: &[Rat]) -> NFoldConfigInstance {
    NFoldConfigInstance {
        blocks: blocks
            .iter()
            .zip(configs)
            .map(|(b, c)| ConfigBlock { d: b.d.clone(), configs: c, weights: b.w.clone() })
            .collect(),
        b0: b0.to_vec(),
    }
}

pub fn solve_nfold(inst: &NFoldNonnegInstance, params: &ApproxParams) -> Result<ApproxResult> {
    params.check()?;
    inst.validate().map_err(Error::InvalidInstance)?;
    let eps = &params.epsilon;
    let tolerance = Tolerance::Multiplicative(eps.clone());
    let mut ctx = Ctx::new(params);
    let t = inst.t();
    let sd = inst.s_d();
    let judge = |x: &[i64]| inst.violation_report(x, tolerance.clone());

    let mut blocks = normalize_blocks(inst);
    let extra = fix_by_coupling(&mut blocks, &inst.b0);
    if extra > 0 {
        ctx.notes.push(format!("{extra} variables fixed to zero by coupling rows with target zero"));
    }
    let psi = eps / &Rat::from_int(4 * t.max(1) as i64);
    let splits: Vec<ColumnSplit> =
        blocks.iter().enumerate().map(|(i, b)| classify_and_split(b, &psi, i)).collect::<Result<_>>()?;
    let all_big = splits.iter().all(|s| s.kind.iter().all(|k| *k != ColumnKind::Small));
    let beta = smallest_positive(&inst.b0);

    if all_big {
        ctx.notes.push("all columns big: configurations are the exact local solutions".into());
        let one = Rat::one();
        let configs = blocks
            .iter()
            .zip(&splits)
            .map(|(b, s)| enumerate_major_configs(b, s, &one, &one, params.config_cap))
            .collect::<Result<Vec<_>>>()?;
        let cinst = config_instance(&blocks, configs, &inst.b0);
        let Some(norm) = normalize_configs(&cinst) else {
            return nonneg_fallback(inst, tolerance, ctx);
        };
        let scale = config_scale(&norm);
        let delta = params.delta_override.clone().unwrap_or_else(|| {
            &(eps * &beta) / &(&scale * &Rat::from_int(sd.max(1) as i64 * (2 * norm.tau as i64 + 1)))
        });
        let judge_slots = |slots: &[usize]| judge(&norm.flatten(slots));
        return match solve_core(&norm, &inst.b0, delta, params, &mut ctx, &judge_slots)? {
            CoreOutcome::Found { slots, report, delta, refinements } => {
                let mut r = ApproxResult::empty(Status::Solved);
                r.solution = Some(norm.flatten(&slots));
                r.report = Some(report);
                r.delta_used = Some(delta);
                r.refinements = refinements;
                Ok(ctx.finish(r))
            }
            CoreOutcome::RelaxationInfeasible => nonneg_fallback(inst, tolerance, ctx),
        };
    }

    ctx.notes.push("small columns present: major/minor decomposition".into());
    let half = eps / &Rat::from_int(2);
    let (lo, hi) = (&Rat::one() - &half, &Rat::one() + &half);
    let mut configs = Vec::with_capacity(blocks.len());
    for (i, (b, s)) in blocks.iter().zip(&splits).enumerate() {
        // The minor parts together stay within ε/2 on every local row.
        for r in 0..b.a.rows() {
            let load: Rat = (0..t).map(|j| &b.a[(r, j)] * &Rat::from_int(s.minor_bound[j])).sum();
            if load > half {
                return Err(Error::Internal(format!("block {i}: minor parts may add {load} > ε/2 to row {r}")));
            }
        }
        configs.push(enumerate_major_configs(b, s, &lo, &hi, params.config_cap)?);
    }
    let cinst = config_instance(&blocks, configs, &inst.b0);
    let Some(norm) = normalize_configs(&cinst) else {
        return nonneg_fallback(inst, tolerance, ctx);
    };
    let minors: Vec<MinorVar> = splits
        .iter()
        .enumerate()
        .flat_map(|(i, s)| {
            (0..t)
                .filter(move |&j| s.minor_bound[j] > 0)
                .map(move |j| MinorVar { block: i, column: j, bound: s.minor_bound[j] })
        })
        .collect();
    let minor_cols: Vec<Vec<Rat>> = minors.iter().map(|mv| blocks[mv.block].d.column(mv.column)).collect();
    let scale1 = config_scale(&norm);
    let scale2 = nonzero_or_one(minor_cols.iter().flatten().map(Rat::abs).max().unwrap_or_else(Rat::zero));
    let sdr = Rat::from_int(sd.max(1) as i64);
    let tau = norm.tau;
    let mut delta1 = params.delta_override.clone().unwrap_or_else(|| {
        &(eps * &beta) / &(&(&Rat::from_int(2 * (2 * tau as i64 + 1)) * &sdr) * &scale1)
    });
    let mut delta2 = params.delta_override.clone().unwrap_or_else(|| {
        &(eps * &beta) / &(&(&Rat::from_int(4) * &sdr) * &scale2)
    });
    let weights: Vec<Vec<Rat>> = blocks.iter().map(|b| b.w.clone()).collect();

    for attempt in 0..=params.refinement_limit {
        let part1 = partition_config_columns_scaled(&norm.dcal, &delta1, &scale1);
        let part2 = partition_vectors(&minor_cols, &delta2, &scale2)?;
        let split_model = build_split_model(&norm, &part1, &minors, &part2, &weights, &inst.b0);
        let mixed = ctx.mip(&split_model.model)?;
        if mixed.status == MipStatus::Infeasible {
            return nonneg_fallback(inst, tolerance, ctx);
        }
        let (slots, config_lp) = round_choices(&norm, &part1, &split_model.z_col, &split_model.y_col, &mixed, sd, &mut ctx, "configuration LP")?;
        let (minor_values, minor_lp) = round_minors(&minors, &part2, &split_model, &mixed, &weights, sd, &mut ctx)?;

        let mut x = norm.flatten(&slots);
        for (mv, v) in minors.iter().zip(&minor_values) {
            x[mv.block * t + mv.column] += v;
        }
        for (i, b) in blocks.iter().enumerate() {
            for j in 0..t {
                if x[i * t + j] > b.u[j] {
                    return Err(Error::Internal(format!("block {i} column {j} exceeds its bound after recombination")));
                }
            }
        }
        let objective = inst.objective(&x);
        if objective > &config_lp + &minor_lp || &config_lp + &minor_lp > mixed.objective_value {
            return Err(Error::Internal("objective increased along the rounding chain".into()));
        }
        let report = judge(&x)?;
        if report.within_bound {
            let mut r = ApproxResult::empty(Status::Solved);
            r.solution = Some(x);
            r.report = Some(report);
            r.delta_used = Some(part1.delta.clone().max(part2.delta.clone()));
            r.refinements = attempt;
            ctx.notes.push(format!("configuration width {}, minor width {}", part1.delta, part2.delta));
            return Ok(ctx.finish(r));
        }
        ctx.notes.push(format!("widths {} / {} missed the bound; halving", part1.delta, part2.delta));
        delta1 = &part1.delta / &Rat::from_int(2);
        delta2 = &part2.delta / &Rat::from_int(2);
    }
    Err(Error::RefinementExhausted(params.refinement_limit))
}

/// Solves the minor LP with group totals and coupling contributions fixed,
/// then rounds each group by weight. Returns the rounded minor values and the LP optimum.
fn round_minors(
    minors: &[MinorVar],
    part: &BoxPartition,
    split_model: &SplitModel,
    mixed: &MixedSolution,
    weights: &[Vec<Rat>],
    sd: usize,
    ctx: &mut Ctx,
) -> Result<(Vec<i64>, Rat)> {
    if minors.is_empty() {
        return Ok((vec![], Rat::zero()));
    }
    let star: Vec<Rat> = split_model.minor_col.iter().map(|&c| mixed.values[c].clone()).collect();
    let mut builder = ModelBuilder::new();
    let coupling: Vec<usize> = (0..sd)
        .map(|r| builder.add_row((0..minors.len()).map(|q| &part.residuals[q][r] * &star[q]).sum()))
        .collect();
    let mut group_of = vec![0usize; minors.len()];
    let mut group_rows = Vec::new();
    for (g, (members, col)) in split_model.minor_groups.iter().enumerate() {
        group_rows.push(builder.add_row(mixed.values[*col].clone()));
        for &q in members {
            group_of[q] = g;
        }
    }
    let costs: Vec<Rat> = minors.iter().map(|mv| weights[mv.block][mv.column].clone()).collect();
    for (q, mv) in minors.iter().enumerate() {
        let mut entries: Vec<(usize, Rat)> = coupling
            .iter()
            .enumerate()
            .map(|(r, &row)| (row, part.residuals[q][r].clone()))
            .filter(|(_, v)| !v.is_zero())
            .collect();
        entries.push((group_rows[group_of[q]], Rat::one()));
        builder.add_column(entries, Rat::zero(), Rat::from_int(mv.bound), costs[q].clone(), false);
    }
    let lp = builder.build().lp;
    let vertex = ctx.vertex(&lp, "minor LP")?;
    ctx.support("minor LP", nonintegral_support(&vertex.values).len(), 2 * sd)?;
    let mut out = vec![0i64; minors.len()];
    for (members, col) in &split_model.minor_groups {
        let plan = GroupRoundingPlan::new(members, &vertex.values, &costs);
        let rounded = greedy_group_round(&plan)?;
        for (&q, v) in plan.members.iter().zip(rounded) {
            out[q] = v;
        }
        let total: i64 = members.iter().map(|&q| out[q]).sum();
        if Rat::from_int(total) != mixed.values[*col] {
            return Err(Error::Internal("minor group total changed by rounding".into()));
        }
    }
    Ok((out, vertex.objective_value))
}

/// Exact report for a solution of the nonnegative instance.
pub fn nfold_report(inst: &NFoldNonnegInstance, x: &[i64], epsilon: &Rat) -> Result<ViolationReport> {
    inst.violation_report(x, Tolerance::Multiplicative(epsilon.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::NonnegBlock;
    use crate::rational::rat;

    fn r(v: i64) -> Rat {
        Rat::from_int(v)
    }

    fn rats(v: &[i64]) -> Vec<Rat> {
        v.iter().map(|&x| r(x)).collect()
    }

    #[test]
    fn normalization_cases() {
        let a = RatMatrix::from_int_rows(&[vec![1, 1], vec![0, 3]]);
        let d = RatMatrix::from_int_rows(&[vec![1, 1]]);
        let b = normalize_block(&a, &rats(&[2, 0]), &d, &[1, 1], &rats(&[0, 0]));
        assert_eq!(b.fixed_zero, vec![1]);
        assert_eq!(b.a, RatMatrix::from_rows(vec![vec![rat(1, 2), rat(1, 2)]]));
        assert_eq!(b.u, vec![1, 0]);

        let a = RatMatrix::from_int_rows(&[vec![1, 0], vec![0, 0]]);
        let b = normalize_block(&a, &rats(&[1, 0]), &d, &[1, 1], &rats(&[0, 0]));
        assert!(b.fixed_zero.is_empty());
        assert_eq!(b.row_map, vec![0]);

        let a = RatMatrix::from_int_rows(&[vec![3]]);
        let d1 = RatMatrix::from_int_rows(&[vec![1]]);
        let b = normalize_block(&a, &rats(&[3]), &d1, &[1], &rats(&[0]));
        assert_eq!(b.a, RatMatrix::from_int_rows(&[vec![1]]));
    }

    fn scaled(cols: Vec<Vec<Rat>>, u: Vec<i64>) -> ScaledBlock {
        let rows = cols[0].len();
        let t = cols.len();
        ScaledBlock {
            a: RatMatrix::from_columns(&cols, rows),
            row_map: (0..rows).collect(),
            fixed_zero: vec![],
            d: RatMatrix::zeros(1, t),
            u,
            w: vec![Rat::zero(); t],
        }
    }

    #[test]
    fn classification() {
        let psi = rat(1, 4);
        let b = scaled(vec![vec![rat(1, 5), rat(1, 10)]], vec![3]);
        let s = classify_and_split(&b, &psi, 0).unwrap();
        assert_eq!(s.kind, vec![ColumnKind::Small]);
        assert_eq!(s.lambda, vec![2]);
        assert_eq!(s.major_bound, vec![1]);
        assert_eq!(s.minor_bound, vec![1]);

        let b = scaled(vec![vec![rat(1, 2), r(0)]], vec![1]);
        let s = classify_and_split(&b, &psi, 0).unwrap();
        assert_eq!(s.kind, vec![ColumnKind::Big]);
        assert_eq!(s.lambda, vec![1]);

        let b = scaled(vec![vec![r(0), r(0)]], vec![1]);
        assert_eq!(classify_and_split(&b, &psi, 3), Err(Error::ZeroColumnUnsupported { block: 3, column: 0 }));
    }

    #[test]
    fn major_values_cover_the_range() {
        for u in 0..12 {
            for lambda in 1..6 {
                let majors = major_values(u, lambda);
                let minor = (lambda - 1).min(u);
                for x in 0..=u {
                    assert!(majors.iter().any(|&m| m <= x && x - m <= minor), "u={u} λ={lambda} x={x}");
                }
                assert!(majors.iter().all(|&m| m + minor <= u.max(m)));
                assert!(majors.iter().all(|&m| m <= u));
            }
        }
    }

    #[test]
    fn window_enumeration() {
        let b = scaled(vec![vec![rat(1, 2)]], vec![5]);
        let s = classify_and_split(&b, &rat(1, 8), 0).unwrap();
        let got = enumerate_major_configs(&b, &s, &rat(3, 4), &rat(5, 4), 1000).unwrap();
        assert_eq!(got, vec![vec![2]]);
        let none = enumerate_major_configs(&b, &s, &rat(1, 8), &rat(1, 4), 1000).unwrap();
        assert!(none.is_empty());
    }

    fn block(a: &[Vec<i64>], d: &[Vec<i64>], bi: &[i64], u: &[i64], w: &[i64]) -> NonnegBlock {
        NonnegBlock {
            a: RatMatrix::from_int_rows(a),
            d: RatMatrix::from_int_rows(d),
            bi: rats(bi),
            u: u.to_vec(),
            w: rats(w),
        }
    }

    #[test]
    fn single_block_gap() {
        let inst = NFoldNonnegInstance { blocks: vec![block(&[vec![1]], &[vec![1]], &[1], &[5], &[1])], b0: rats(&[2]) };
        let res = solve_nfold(&inst, &ApproxParams::new(rat(1, 2))).unwrap();
        assert!(res.original_infeasible);
        let rep = res.report.unwrap();
        assert_eq!(rep.residual[0], r(-1));
    }

    #[test]
    fn two_blocks_exact() {
        let b = block(&[vec![1]], &[vec![1]], &[1], &[5], &[1]);
        let inst = NFoldNonnegInstance { blocks: vec![b.clone(), b], b0: rats(&[2]) };
        let res = solve_nfold(&inst, &ApproxParams::new(rat(1, 2)).with_audit()).unwrap();
        assert_eq!(res.status, Status::Solved);
        assert_eq!(res.solution, Some(vec![1, 1]));
        let rep = res.report.unwrap();
        assert_eq!(rep.objective, r(2));
        assert_eq!(rep.max_abs_residual, r(0));
    }

    #[test]
    fn threshold_column_is_big() {
        let b = NonnegBlock {
            a: RatMatrix::from_rows(vec![vec![rat(1, 10), r(1)]]),
            d: RatMatrix::from_int_rows(&[vec![1, 1]]),
            bi: rats(&[1]),
            u: vec![10, 1],
            w: rats(&[1, 1]),
        };
        let blocks = normalize_blocks(&NFoldNonnegInstance { blocks: vec![b], b0: rats(&[1]) });
        let s = classify_and_split(&blocks[0], &(&rat(4, 5) / &r(8)), 0).unwrap();
        assert_eq!(s.kind, vec![ColumnKind::Big, ColumnKind::Big]);
    }

    #[test]
    fn small_columns_pipeline() {
        // One block, local row x1/10 + x2 = 1, coupling x1 + x2 = 10.
        let b = NonnegBlock {
            a: RatMatrix::from_rows(vec![vec![rat(1, 10), r(1)]]),
            d: RatMatrix::from_int_rows(&[vec![1, 1]]),
            bi: rats(&[1]),
            u: vec![10, 1],
            w: rats(&[1, 3]),
        };
        let inst = NFoldNonnegInstance { blocks: vec![b], b0: rats(&[10]) };
        let res = solve_nfold(&inst, &ApproxParams::new(rat(1, 2)).with_audit()).unwrap();
        assert_eq!(res.status, Status::Solved);
        let rep = res.report.unwrap();
        assert!(rep.within_bound);
        assert!(rep.objective <= r(10));
    }
}
