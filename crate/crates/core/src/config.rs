//! Near-feasible solutions for n-fold programs given by explicit
//! configuration sets.
//!
//! Every block picks one configuration. Blocks whose configuration matrices
//! land in the same grid cells form a type; the mixed model keeps integer
//! counts per (type, configuration) and relaxes the individual choices. With
//! the counts fixed, an optimal vertex has few fractional choices, and an
//! exact re-solve over the bipartite block/count system (totally unimodular)
//! makes them integral without touching either family of marginals.

use std::collections::BTreeMap;

use crate::boxing::{partition_config_columns_scaled, ConfigBoxPartition};
use crate::error::{Error, Result};
use crate::fallback::{Outcome, SoftSystem};
use crate::instance::{ApproxParams, NFoldConfigInstance, Tolerance, ViolationReport};
use crate::linalg::{rank_exact, RatMatrix};
use crate::mip::{MipStatus, MixedModel, ModelBuilder, MixedSolution};
use crate::rational::{dot_int, Rat};
use crate::result::{ApproxResult, Ctx, RankCheck, Status, TuCheck};
use crate::simplex::{nonintegral_support, solve_lp_vertex, LinearProgram, LpStatus};

/// Configuration sets after removing duplicates and padding to a common size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizedConfigs {
    pub tau: usize,
    /// Per block, `tau` configurations.
    pub configs: Vec<Vec<Vec<i64>>>,
    /// Per block and padded slot, the index in the block's original list.
    pub origin: Vec<Vec<usize>>,
    /// Per block, the `s × tau` matrix whose columns are `D p` for each configuration.
    pub dcal: Vec<RatMatrix>,
    /// Per block and slot, the cost `w · p`.
    pub costs: Vec<Vec<Rat>>,
}

impl NormalizedConfigs {
    pub fn n(&self) -> usize {
        self.configs.len()
    }

    /// Original configuration index chosen for each block.
    pub fn decode(&self, slots: &[usize]) -> Vec<usize> {
        slots.iter().enumerate().map(|(i, &phi)| self.origin[i][phi]).collect()
    }

    pub fn flatten(&self, slots: &[usize]) -> Vec<i64> {
        slots.iter().enumerate().flat_map(|(i, &phi)| self.configs[i][phi].iter().copied()).collect()
    }
}

/// Deduplicates and pads every configuration set; `None` if some set is empty.
pub fn normalize_configs(inst: &NFoldConfigInstance) -> Option<NormalizedConfigs> {
    let mut deduped: Vec<Vec<(usize, &Vec<i64>)>> = Vec::with_capacity(inst.n());
    for blk in &inst.blocks {
        let mut seen: Vec<(usize, &Vec<i64>)> = Vec::new();
        for (idx, c) in blk.configs.iter().enumerate() {
            if !seen.iter().any(|(_, p)| *p == c) {
                seen.push((idx, c));
            }
        }
        if seen.is_empty() {
            return None;
        }
        deduped.push(seen);
    }
    let tau = deduped.iter().map(Vec::len).max().unwrap_or(1);
    let mut out = NormalizedConfigs { tau, configs: vec![], origin: vec![], dcal: vec![], costs: vec![] };
    for (blk, list) in inst.blocks.iter().zip(deduped) {
        let mut configs: Vec<Vec<i64>> = list.iter().map(|(_, p)| (*p).clone()).collect();
        let mut origin: Vec<usize> = list.iter().map(|(i, _)| *i).collect();
        while configs.len() < tau {
            configs.push(configs[0].clone());
            origin.push(origin[0]);
        }
        let cols: Vec<Vec<Rat>> = configs.iter().map(|p| blk.d.mul_int_vec(p)).collect();
        out.dcal.push(RatMatrix::from_columns(&cols, blk.d.rows()));
        out.costs.push(configs.iter().map(|p| dot_int(&blk.weights, p)).collect());
        out.configs.push(configs);
        out.origin.push(origin);
    }
    Some(out)
}

/// Column indices of the configuration part of a mixed model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigModel {
    pub tau: usize,
    /// `z_col[i][phi]`: fraction of block `i` using slot `phi`.
    pub z_col: Vec<Vec<usize>>,
    /// `y_col[k][phi]`: number of type-`k` blocks using slot `phi` (integer).
    pub y_col: Vec<Vec<usize>>,
    pub type_groups: Vec<Vec<usize>>,
    pub model: MixedModel,
}

/// Adds choice and count columns plus linking and selection rows; the
/// configuration columns contribute to the given coupling rows.
pub(crate) fn add_config_part(
    builder: &mut ModelBuilder,
    norm: &NormalizedConfigs,
    part: &ConfigBoxPartition,
    coupling_rows: &[usize],
) -> (Vec<Vec<usize>>, Vec<Vec<usize>>) {
    let tau = norm.tau;
    let link_rows: Vec<Vec<usize>> = part
        .type_groups
        .iter()
        .map(|_| (0..tau).map(|_| builder.add_row(Rat::zero())).collect())
        .collect();
    let select_rows: Vec<usize> = (0..norm.n()).map(|_| builder.add_row(Rat::one())).collect();
    let mut z_col = Vec::with_capacity(norm.n());
    for i in 0..norm.n() {
        let k = part.block_type[i];
        let cols = (0..tau)
            .map(|phi| {
                let mut entries: Vec<(usize, Rat)> = coupling_rows
                    .iter()
                    .enumerate()
                    .filter(|(r, _)| !part.residual_matrices[i][phi][*r].is_zero())
                    .map(|(r, &row)| (row, part.residual_matrices[i][phi][r].clone()))
                    .collect();
                entries.push((link_rows[k][phi], Rat::from_int(-1)));
                entries.push((select_rows[i], Rat::one()));
                builder.add_column(entries, Rat::zero(), Rat::one(), norm.costs[i][phi].clone(), false)
            })
            .collect();
        z_col.push(cols);
    }
    let mut y_col = Vec::with_capacity(part.type_groups.len());
    for (k, members) in part.type_groups.iter().enumerate() {
        let cols = (0..tau)
            .map(|phi| {
                let mut entries: Vec<(usize, Rat)> = coupling_rows
                    .iter()
                    .enumerate()
                    .filter(|(r, _)| !part.canonical_matrices[k][phi][*r].is_zero())
                    .map(|(r, &row)| (row, part.canonical_matrices[k][phi][r].clone()))
                    .collect();
                entries.push((link_rows[k][phi], Rat::one()));
                builder.add_column(entries, Rat::zero(), Rat::from_int(members.len() as i64), Rat::zero(), true)
            })
            .collect();
        y_col.push(cols);
    }
    (z_col, y_col)
}

pub fn build_box_model(norm: &NormalizedConfigs, b0: &[Rat], part: &ConfigBoxPartition) -> ConfigModel {
    let mut builder = ModelBuilder::new();
    let coupling: Vec<usize> = b0.iter().map(|b| builder.add_row(b.clone())).collect();
    let (z_col, y_col) = add_config_part(&mut builder, norm, part, &coupling);
    ConfigModel { tau: norm.tau, z_col, y_col, type_groups: part.type_groups.clone(), model: builder.build() }
}

/// The bipartite system on fractional choices: every entry belongs to one
/// block row and one (type, slot) row, all right-hand sides integral.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssignmentRestriction {
    /// `(block row id, column row id)` per entry.
    pub entries: Vec<(usize, usize)>,
    pub block_rhs: BTreeMap<usize, Rat>,
    pub column_rhs: BTreeMap<usize, Rat>,
    pub costs: Vec<Rat>,
    /// Current fractional values.
    pub values: Vec<Rat>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TuRounding {
    pub assignment: Vec<i64>,
    pub check: TuCheck,
    pub pivots: u64,
}

impl AssignmentRestriction {
    fn marginals(&self, x: &[Rat]) -> (BTreeMap<usize, Rat>, BTreeMap<usize, Rat>) {
        let mut b: BTreeMap<usize, Rat> = self.block_rhs.keys().map(|&k| (k, Rat::zero())).collect();
        let mut c: BTreeMap<usize, Rat> = self.column_rhs.keys().map(|&k| (k, Rat::zero())).collect();
        for (e, &(bi, ci)) in self.entries.iter().enumerate() {
            *b.get_mut(&bi).expect("block row") += &x[e];
            *c.get_mut(&ci).expect("column row") += &x[e];
        }
        (b, c)
    }
}

/// Re-solves the restriction exactly; its vertices are integral.
pub fn tu_round(restr: &AssignmentRestriction, stage: &str) -> Result<TuRounding> {
    if let Some(v) = restr.block_rhs.values().chain(restr.column_rhs.values()).find(|v| !v.is_integer()) {
        return Err(Error::Internal(format!("assignment restriction has non-integral marginal {v}")));
    }
    let e = restr.entries.len();
    if e == 0 {
        let check = TuCheck {
            stage: stage.to_string(),
            entries: 0,
            integral: true,
            marginals_preserved: true,
            objective_not_increased: true,
        };
        return Ok(TuRounding { assignment: vec![], check, pivots: 0 });
    }
    let block_ids: Vec<usize> = restr.block_rhs.keys().copied().collect();
    let column_ids: Vec<usize> = restr.column_rhs.keys().copied().collect();
    let row_of_block: BTreeMap<usize, usize> = block_ids.iter().enumerate().map(|(r, &k)| (k, r)).collect();
    let row_of_column: BTreeMap<usize, usize> =
        column_ids.iter().enumerate().map(|(r, &k)| (k, block_ids.len() + r)).collect();
    let mut a = RatMatrix::zeros(block_ids.len() + column_ids.len(), e);
    for (j, &(bi, ci)) in restr.entries.iter().enumerate() {
        a[(row_of_block[&bi], j)] = Rat::one();
        a[(row_of_column[&ci], j)] = Rat::one();
    }
    let mut rhs: Vec<Rat> = restr.block_rhs.values().cloned().collect();
    rhs.extend(restr.column_rhs.values().cloned());
    let lp = LinearProgram { a, rhs, lower: vec![Rat::zero(); e], upper: vec![Rat::one(); e], objective: restr.costs.clone() };
    let sol = solve_lp_vertex(&lp)?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::Internal("assignment restriction infeasible although its fractional point is feasible".into()));
    }
    let integral = sol.values.iter().all(Rat::is_integer);
    let (bm, cm) = restr.marginals(&sol.values);
    let marginals_preserved = bm == restr.block_rhs && cm == restr.column_rhs;
    let frac_obj: Rat = restr.costs.iter().zip(&restr.values).map(|(c, v)| c * v).sum();
    let objective_not_increased = sol.objective_value <= frac_obj;
    let check = TuCheck {
        stage: stage.to_string(),
        entries: e,
        integral,
        marginals_preserved,
        objective_not_increased,
    };
    if !(integral && marginals_preserved && objective_not_increased) {
        return Err(Error::Internal(format!("assignment re-solve failed its checks: {check:?}")));
    }
    let assignment = sol.values.iter().map(|v| v.to_i64().expect("0/1 entry")).collect();
    Ok(TuRounding { assignment, check, pivots: sol.pivots })
}

/// LP over the choice variables only, with counts fixed and the coupling
/// rows fixed to what the mixed solution's choices attain.
pub(crate) fn fixed_count_lp(
    norm: &NormalizedConfigs,
    part: &ConfigBoxPartition,
    z: &[Vec<Rat>],
    counts: &[Vec<Rat>],
) -> (LinearProgram, Vec<Vec<usize>>) {
    let (n, tau) = (norm.n(), norm.tau);
    let s = part.residual_matrices.first().and_then(|m| m.first()).map_or(0, Vec::len);
    let mut builder = ModelBuilder::new();
    let coupling: Vec<usize> = (0..s)
        .map(|r| {
            let v: Rat = (0..n)
                .flat_map(|i| (0..tau).map(move |phi| (i, phi)))
                .map(|(i, phi)| &part.residual_matrices[i][phi][r] * &z[i][phi])
                .sum();
            builder.add_row(v)
        })
        .collect();
    let link: Vec<Vec<usize>> = counts.iter().map(|row| row.iter().map(|c| builder.add_row(c.clone())).collect()).collect();
    let select: Vec<usize> = (0..n).map(|_| builder.add_row(Rat::one())).collect();
    let mut cols = Vec::with_capacity(n);
    for i in 0..n {
        let k = part.block_type[i];
        cols.push(
            (0..tau)
                .map(|phi| {
                    let mut entries: Vec<(usize, Rat)> = coupling
                        .iter()
                        .enumerate()
                        .map(|(r, &row)| (row, part.residual_matrices[i][phi][r].clone()))
                        .filter(|(_, v)| !v.is_zero())
                        .collect();
                    entries.push((link[k][phi], Rat::one()));
                    entries.push((select[i], Rat::one()));
                    builder.add_column(entries, Rat::zero(), Rat::one(), norm.costs[i][phi].clone(), false)
                })
                .collect(),
        );
    }
    (builder.build().lp, cols)
}

/// Rank of each type group's linking/selection submatrix on the fractional entries.
pub(crate) fn group_rank_checks(part: &ConfigBoxPartition, tau: usize, z: &[Vec<Rat>], stage: &str) -> Vec<RankCheck> {
    let mut out = Vec::new();
    for (k, members) in part.type_groups.iter().enumerate() {
        let frac: Vec<(usize, usize)> = members
            .iter()
            .flat_map(|&i| (0..tau).map(move |phi| (i, phi)))
            .filter(|&(i, phi)| !z[i][phi].is_integer())
            .collect();
        if frac.is_empty() {
            continue;
        }
        let mut m = RatMatrix::zeros(tau + members.len(), frac.len());
        for (c, &(i, phi)) in frac.iter().enumerate() {
            m[(phi, c)] = Rat::one();
            let pos = members.iter().position(|&b| b == i).expect("member");
            m[(tau + pos, c)] = Rat::one();
        }
        let rank = rank_exact(&m);
        out.push(RankCheck {
            stage: stage.to_string(),
            type_group: k,
            fractional_entries: frac.len(),
            rank,
            nullity: frac.len() - rank,
            bound: 2 * tau,
        });
    }
    out
}

/// Builds the restriction on the fractional entries of `z` with the given
/// (integral) count targets.
pub(crate) fn restriction_from(
    part: &ConfigBoxPartition,
    norm: &NormalizedConfigs,
    z: &[Vec<Rat>],
    counts: &[Vec<Rat>],
) -> (AssignmentRestriction, Vec<(usize, usize)>) {
    let tau = norm.tau;
    let mut restr = AssignmentRestriction {
        entries: vec![],
        block_rhs: BTreeMap::new(),
        column_rhs: BTreeMap::new(),
        costs: vec![],
        values: vec![],
    };
    let mut where_ = Vec::new();
    for i in 0..norm.n() {
        let k = part.block_type[i];
        for phi in 0..tau {
            if z[i][phi].is_integer() {
                continue;
            }
            restr.entries.push((i, k * tau + phi));
            restr.costs.push(norm.costs[i][phi].clone());
            restr.values.push(z[i][phi].clone());
            restr.block_rhs.insert(i, Rat::one());
            restr.column_rhs.entry(k * tau + phi).or_insert_with(|| counts[k][phi].clone());
            where_.push((i, phi));
        }
    }
    // Remove the integral mass already placed in each (type, slot).
    for i in 0..norm.n() {
        let k = part.block_type[i];
        for phi in 0..tau {
            if z[i][phi].is_integer() {
                if let Some(v) = restr.column_rhs.get_mut(&(k * tau + phi)) {
                    *v -= &z[i][phi];
                }
            }
        }
    }
    (restr, where_)
}

#[allow(clippy::large_enum_variant)]
pub(crate) enum CoreOutcome {
    Found { slots: Vec<usize>, report: ViolationReport, delta: Rat, refinements: u32 },
    RelaxationInfeasible,
}

/// Verify-and-refine loop shared by the configuration pipeline and the
/// all-big case of the nonnegative pipeline.
pub(crate) fn solve_core(
    norm: &NormalizedConfigs,
    b0: &[Rat],
    mut delta: Rat,
    params: &ApproxParams,
    ctx: &mut Ctx,
    judge: &dyn Fn(&[usize]) -> Result<ViolationReport>,
) -> Result<CoreOutcome> {
    let s = b0.len();
    let scale = config_scale(norm);
    for attempt in 0..=params.refinement_limit {
        let part = partition_config_columns_scaled(&norm.dcal, &delta, &scale);
        let cm = build_box_model(norm, b0, &part);
        let mixed = ctx.mip(&cm.model)?;
        if mixed.status == MipStatus::Infeasible {
            return Ok(CoreOutcome::RelaxationInfeasible);
        }
        let (slots, lp_objective) = round_choices(norm, &part, &cm.z_col, &cm.y_col, &mixed, s, ctx, "fixed-count LP")?;
        let objective: Rat = slots.iter().enumerate().map(|(i, &phi)| norm.costs[i][phi].clone()).sum();
        if objective > lp_objective || lp_objective > mixed.objective_value {
            return Err(Error::Internal("objective increased along the rounding chain".into()));
        }
        let report = judge(&slots)?;
        if report.within_bound {
            return Ok(CoreOutcome::Found { slots, report, delta: part.delta, refinements: attempt });
        }
        ctx.notes.push(format!(
            "width {} gave violation {} (bound {}); halving",
            part.delta, report.max_abs_residual, report.bound
        ));
        delta = &part.delta / &Rat::from_int(2);
    }
    Err(Error::RefinementExhausted(params.refinement_limit))
}

pub(crate) fn config_scale(norm: &NormalizedConfigs) -> Rat {
    let s = norm.dcal.iter().map(RatMatrix::inf_norm).max().unwrap_or_else(Rat::zero);
    if s.is_zero() {
        Rat::one()
    } else {
        s
    }
}

fn column_values(values: &[Rat], cols: &[Vec<usize>]) -> Vec<Vec<Rat>> {
    cols.iter().map(|row| row.iter().map(|&c| values[c].clone()).collect()).collect()
}

/// Fixed-count vertex, support and rank audits, then the exact re-solve.
/// Returns the chosen slot per block and the fixed-count LP optimum.
pub(crate) fn round_choices(
    norm: &NormalizedConfigs,
    part: &ConfigBoxPartition,
    z_col: &[Vec<usize>],
    y_col: &[Vec<usize>],
    mixed: &MixedSolution,
    s: usize,
    ctx: &mut Ctx,
    stage: &str,
) -> Result<(Vec<usize>, Rat)> {
    let tau = norm.tau;
    let z_star = column_values(&mixed.values, z_col);
    let counts = column_values(&mixed.values, y_col);
    let (lp, cols) = fixed_count_lp(norm, part, &z_star, &counts);
    let vertex = ctx.vertex(&lp, stage)?;
    let fractional = nonintegral_support(&vertex.values).len();
    ctx.support(stage, fractional, s * (2 * tau + 1))?;
    let z = column_values(&vertex.values, &cols);
    let ranks = group_rank_checks(part, tau, &z, stage);
    ctx.trace.ranks.extend(ranks);
    let (restr, where_) = restriction_from(part, norm, &z, &counts);
    let rounding = tu_round(&restr, stage)?;
    ctx.stats.lp_pivots += rounding.pivots;
    ctx.trace.tu.push(rounding.check);
    let mut zr: Vec<Vec<i64>> = z
        .iter()
        .map(|row| row.iter().map(|v| if v.is_integer() { v.to_i64().expect("0/1") } else { 0 }).collect())
        .collect();
    for (&(i, phi), v) in where_.iter().zip(&rounding.assignment) {
        zr[i][phi] = *v;
    }
    let mut slots = Vec::with_capacity(norm.n());
    for (i, row) in zr.iter().enumerate() {
        let chosen: Vec<usize> = (0..tau).filter(|&phi| row[phi] == 1).collect();
        if chosen.len() != 1 || row.iter().any(|&v| v != 0 && v != 1) {
            return Err(Error::Internal(format!("block {i} does not select exactly one configuration")));
        }
        slots.push(chosen[0]);
    }
    for (k, members) in part.type_groups.iter().enumerate() {
        for phi in 0..tau {
            let total = members.iter().filter(|&&i| slots[i] == phi).count() as i64;
            if Rat::from_int(total) != counts[k][phi] {
                return Err(Error::Internal(format!("count of type {k}, slot {phi} changed by rounding")));
            }
        }
    }
    Ok((slots, vertex.objective_value))
}

/// Initial width `ε / (s (2τ+1) κ t)`, each factor at least one.
pub fn initial_delta(epsilon: &Rat, s: usize, tau: usize, kappa: i64, t: usize) -> Rat {
    let denom = s.max(1) as i64 * (2 * tau as i64 + 1) * kappa.max(1) * t.max(1) as i64;
    epsilon / &Rat::from_int(denom)
}

/// Exact search over binary choice variables once the relaxation is infeasible.
pub(crate) fn choice_fallback(
    norm: &NormalizedConfigs,
    inst_d: &[&RatMatrix],
    b0: &[Rat],
    allowance: Vec<Rat>,
    ctx: &mut Ctx,
) -> Result<Option<(Vec<usize>, bool)>> {
    let (n, tau) = (norm.n(), norm.tau);
    let vars = n * tau;
    let s = b0.len();
    let mut hard = RatMatrix::zeros(n, vars);
    let mut soft = RatMatrix::zeros(s, vars);
    let mut objective = Vec::with_capacity(vars);
    for i in 0..n {
        for phi in 0..tau {
            let v = i * tau + phi;
            hard[(i, v)] = Rat::one();
            let col = inst_d[i].mul_int_vec(&norm.configs[i][phi]);
            for r in 0..s {
                soft[(r, v)] = col[r].clone();
            }
            objective.push(norm.costs[i][phi].clone());
        }
    }
    let sys = SoftSystem {
        hard,
        hard_rhs: vec![Rat::one(); n],
        soft,
        soft_rhs: b0.to_vec(),
        allowance,
        lower: vec![0; vars],
        upper: vec![1; vars],
        objective,
    };
    let (x, within) = match sys.search(ctx)? {
        Outcome::Within(x) => (x, true),
        Outcome::Closest(x) => (x, false),
        Outcome::Empty => return Ok(None),
    };
    let slots = (0..n)
        .map(|i| (0..tau).find(|&phi| x[i * tau + phi] == 1).expect("one slot per block"))
        .collect();
    Ok(Some((slots, within)))
}

pub fn solve_nfold_config(inst: &NFoldConfigInstance, params: &ApproxParams) -> Result<ApproxResult> {
    params.check()?;
    let delta_d = inst.validate().map_err(Error::InvalidInstance)?;
    let tolerance = Tolerance::Additive(&params.epsilon * &delta_d);
    let mut ctx = Ctx::new(params);
    let Some(norm) = normalize_configs(inst) else {
        ctx.notes.push("some block has an empty configuration set".into());
        return Ok(ctx.finish(ApproxResult::empty(Status::Infeasible)));
    };
    let delta = params.delta_override.clone().unwrap_or_else(|| {
        initial_delta(&params.epsilon, inst.s(), norm.tau, inst.kappa(), inst.t())
    });
    let judge = |slots: &[usize]| inst.violation_report(&norm.flatten(slots), tolerance.clone());
    let outcome = solve_core(&norm, &inst.b0, delta, params, &mut ctx, &judge)?;
    let result = match outcome {
        CoreOutcome::Found { slots, report, delta, refinements } => {
            let mut r = ApproxResult::empty(Status::Solved);
            r.solution = Some(norm.flatten(&slots));
            r.choices = Some(norm.decode(&slots));
            r.report = Some(report);
            r.delta_used = Some(delta);
            r.refinements = refinements;
            r
        }
        CoreOutcome::RelaxationInfeasible => {
            let Tolerance::Additive(bound) = &tolerance else { unreachable!() };
            let ds: Vec<&RatMatrix> = inst.blocks.iter().map(|b| &b.d).collect();
            match choice_fallback(&norm, &ds, &inst.b0, vec![bound.clone(); inst.s()], &mut ctx)? {
                None => ApproxResult::empty(Status::Infeasible),
                Some((slots, within)) => {
                    ctx.notes.push("relaxed model infeasible: the original has no exact solution, objective comparison is vacuous".into());
                    let status = if within { Status::Solved } else { Status::NearFeasibilityUnattainable };
                    let mut r = ApproxResult::empty(status);
                    r.report = Some(judge(&slots)?);
                    r.solution = Some(norm.flatten(&slots));
                    r.choices = Some(norm.decode(&slots));
                    r.original_infeasible = true;
                    r
                }
            }
        }
    };
    Ok(ctx.finish(result))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boxing::partition_config_columns;
    use crate::instance::ConfigBlock;
    use crate::rational::rat;

    fn r(v: i64) -> Rat {
        Rat::from_int(v)
    }

    fn block(d: &[Vec<i64>], configs: &[Vec<i64>], w: &[i64]) -> ConfigBlock {
        ConfigBlock {
            d: RatMatrix::from_int_rows(d),
            configs: configs.to_vec(),
            weights: w.iter().map(|&v| r(v)).collect(),
        }
    }

    #[test]
    fn normalization() {
        let inst = NFoldConfigInstance {
            blocks: vec![
                block(&[vec![1, 2]], &[vec![1, 1], vec![0, 1], vec![1, 1]], &[1, 1]),
                block(&[vec![1, 2]], &[vec![2, 0]], &[1, 1]),
            ],
            b0: vec![r(3)],
        };
        let n = normalize_configs(&inst).unwrap();
        assert_eq!(n.tau, 2);
        assert_eq!(n.configs[0], vec![vec![1, 1], vec![0, 1]]);
        assert_eq!(n.configs[1], vec![vec![2, 0], vec![2, 0]]);
        assert_eq!(n.origin[1], vec![0, 0]);
        assert_eq!(n.dcal[0].column(0), vec![r(3)]);
    }

    #[test]
    fn single_block_model() {
        let inst = NFoldConfigInstance { blocks: vec![block(&[vec![1]], &[vec![0]], &[1])], b0: vec![r(0)] };
        let norm = normalize_configs(&inst).unwrap();
        let part = partition_config_columns(&norm.dcal, &rat(1, 2));
        let cm = build_box_model(&norm, &inst.b0, &part);
        let s = crate::mip::solve_mip(&cm.model, &Default::default()).unwrap();
        assert_eq!(s.values[cm.z_col[0][0]], r(1));
        assert_eq!(s.values[cm.y_col[0][0]], r(1));
    }

    #[test]
    fn identical_blocks_share_one_type() {
        let b = block(&[vec![1]], &[vec![0], vec![1]], &[1]);
        let inst = NFoldConfigInstance { blocks: vec![b.clone(), b], b0: vec![r(1)] };
        let norm = normalize_configs(&inst).unwrap();
        let part = partition_config_columns(&norm.dcal, &rat(1, 2));
        let cm = build_box_model(&norm, &inst.b0, &part);
        // coupling + tau linking + 2 selection rows
        assert_eq!(cm.model.lp.num_rows(), 1 + 2 + 2);
        assert_eq!(cm.model.integer_vars.len(), 2);
    }

    #[test]
    fn tu_round_examples() {
        let restr = AssignmentRestriction {
            entries: vec![(0, 0), (0, 1), (1, 0), (1, 1)],
            block_rhs: [(0, r(1)), (1, r(1))].into_iter().collect(),
            column_rhs: [(0, r(1)), (1, r(1))].into_iter().collect(),
            costs: vec![r(1), r(2), r(2), r(1)],
            values: vec![rat(1, 2); 4],
        };
        let out = tu_round(&restr, "test").unwrap();
        assert_eq!(out.assignment, vec![1, 0, 0, 1]);

        let restr = AssignmentRestriction {
            entries: vec![(0, 0), (0, 1)],
            block_rhs: [(0, r(1))].into_iter().collect(),
            column_rhs: [(0, r(0)), (1, r(1))].into_iter().collect(),
            costs: vec![r(5), r(3)],
            values: vec![rat(1, 2); 2],
        };
        assert_eq!(tu_round(&restr, "test").unwrap().assignment, vec![0, 1]);

        let empty = AssignmentRestriction {
            entries: vec![],
            block_rhs: BTreeMap::new(),
            column_rhs: BTreeMap::new(),
            costs: vec![],
            values: vec![],
        };
        assert!(tu_round(&empty, "test").unwrap().assignment.is_empty());
    }

    #[test]
    fn two_block_example() {
        let inst = NFoldConfigInstance {
            blocks: vec![block(&[vec![1]], &[vec![0], vec![1]], &[1]), block(&[vec![1]], &[vec![0], vec![1]], &[5])],
            b0: vec![r(1)],
        };
        let res = solve_nfold_config(&inst, &ApproxParams::new(rat(1, 2)).with_audit()).unwrap();
        assert_eq!(res.status, Status::Solved);
        assert_eq!(res.solution, Some(vec![1, 0]));
        let rep = res.report.unwrap();
        assert_eq!(rep.objective, r(1));
        assert_eq!(rep.max_abs_residual, r(0));
    }

    #[test]
    fn trivial_zero_block() {
        let inst = NFoldConfigInstance { blocks: vec![block(&[vec![1]], &[vec![0]], &[1])], b0: vec![r(0)] };
        let res = solve_nfold_config(&inst, &ApproxParams::new(rat(1, 2))).unwrap();
        assert_eq!(res.solution, Some(vec![0]));
        assert_eq!(res.report.unwrap().max_abs_residual, r(0));
    }

    #[test]
    fn large_gap_is_unattainable() {
        let inst = NFoldConfigInstance { blocks: vec![block(&[vec![1]], &[vec![0]], &[1])], b0: vec![r(10)] };
        let res = solve_nfold_config(&inst, &ApproxParams::new(rat(1, 10))).unwrap();
        assert_eq!(res.status, Status::NearFeasibilityUnattainable);
        let rep = res.report.unwrap();
        assert_eq!(rep.max_abs_residual, r(10));
        assert!(!rep.within_bound);
    }

    #[test]
    fn empty_config_set_is_infeasible() {
        let inst = NFoldConfigInstance { blocks: vec![block(&[vec![1]], &[], &[1])], b0: vec![r(0)] };
        assert_eq!(solve_nfold_config(&inst, &ApproxParams::new(r(1))).unwrap().status, Status::Infeasible);
    }
}
