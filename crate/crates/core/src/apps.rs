//! Reductions from knapsack and machine scheduling to the instance types,
//! with decoders back to the application's terms.

use serde::Serialize;

use crate::config::solve_nfold_config;
use crate::error::{Error, Result};
use crate::instance::{ApproxParams, ConfigBlock, GeneralIp, NFoldConfigInstance, ScheduleInstance};
use crate::linalg::RatMatrix;
use crate::rational::{common_denominator, Rat};
use crate::result::ApproxResult;

/// Maps a solution of the reduced program back to item multiplicities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnapsackDecoder {
    pub items: usize,
}

impl KnapsackDecoder {
    /// Drops the slack variables.
    pub fn decode(&self, x: &[i64]) -> Vec<i64> {
        x[..self.items].to_vec()
    }
}

/// Multidimensional 0/1 knapsack as an equality program: `weights` is
/// `dims × items`, each row gets one slack, and profits are negated so the
/// program minimizes. Rows are scaled by the common denominator of their
/// data so slacks can be integers.
pub fn knapsack_to_general(profits: &[Rat], weights: &RatMatrix, capacities: &[Rat]) -> Result<(GeneralIp, KnapsackDecoder)> {
    let (m, n) = (weights.rows(), weights.cols());
    if profits.len() != n || capacities.len() != m {
        return Err(Error::DimensionMismatch(format!(
            "{} profits and {} capacities for a {m}x{n} weight matrix",
            profits.len(),
            capacities.len()
        )));
    }
    let negative = profits.iter().chain(weights.entries()).chain(capacities).any(Rat::is_negative);
    if negative {
        return Err(Error::InvalidInstance(vec!["knapsack data must be nonnegative".into()]));
    }
    let mut rows = Vec::with_capacity(m);
    let mut b = Vec::with_capacity(m);
    let mut slack_bounds = Vec::with_capacity(m);
    for r in 0..m {
        let factor = Rat::from_bigint(common_denominator(weights.row(r).iter().chain([&capacities[r]])));
        let mut row: Vec<Rat> = weights.row(r).iter().map(|v| v * &factor).collect();
        row.extend((0..m).map(|k| if k == r { Rat::one() } else { Rat::zero() }));
        rows.push(row);
        let cap = &capacities[r] * &factor;
        slack_bounds.push(cap.to_i64().ok_or_else(|| Error::Internal("capacity does not fit in i64".into()))?);
        b.push(cap);
    }
    let h = RatMatrix::from_rows_with_cols(rows, n + m);
    let mut w: Vec<Rat> = profits.iter().map(|p| -p).collect();
    w.extend(std::iter::repeat_n(Rat::zero(), m));
    let mut u = vec![1; n];
    u.extend(slack_bounds);
    Ok((GeneralIp { h, b, w, l: vec![0; n + m], u }, KnapsackDecoder { items: n }))
}

pub fn validate_schedule(s: &ScheduleInstance) -> std::result::Result<(), Vec<String>> {
    let mut issues = Vec::new();
    if s.jobs.is_empty() {
        issues.push("schedule has no jobs".to_string());
    }
    let m = s.jobs.first().map_or(0, Vec::len);
    if m == 0 {
        issues.push("schedule has no machines".to_string());
    }
    for (i, row) in s.jobs.iter().enumerate() {
        if row.len() != m {
            issues.push(format!("dimension mismatch: job {i} has {} processing times, expected {m}", row.len()));
        }
        if row.iter().any(Rat::is_negative) {
            issues.push(format!("job {i} has a negative processing time"));
        }
    }
    if s.cmax.is_negative() {
        issues.push("cmax is negative".to_string());
    }
    if let Some(costs) = &s.costs {
        if costs.len() != s.jobs.len() || costs.iter().any(|c| c.len() != m) {
            issues.push("dimension mismatch: costs must have the same shape as jobs".to_string());
        }
        if costs.iter().flatten().any(Rat::is_negative) {
            issues.push("costs must be nonnegative".to_string());
        }
    }
    if issues.is_empty() {
        Ok(())
    } else {
        Err(issues)
    }
}

/// Maps configuration solutions back to machine assignments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScheduleDecoder {
    pub jobs: Vec<Vec<Rat>>,
    pub costs: Option<Vec<Vec<Rat>>>,
    pub machines: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Schedule {
    /// Machine of every job.
    pub assignment: Vec<usize>,
    pub loads: Vec<Rat>,
    pub makespan: Rat,
    pub cost: Rat,
}

impl ScheduleDecoder {
    /// Reads each job block's unit vector; slack blocks are ignored.
    pub fn decode(&self, x: &[i64]) -> Result<Schedule> {
        let m = self.machines;
        let mut assignment = Vec::with_capacity(self.jobs.len());
        for (i, chunk) in x.chunks(m).take(self.jobs.len()).enumerate() {
            let machine = chunk
                .iter()
                .position(|&v| v == 1)
                .filter(|_| chunk.iter().sum::<i64>() == 1)
                .ok_or_else(|| Error::Internal(format!("job {i} is not assigned to exactly one machine")))?;
            assignment.push(machine);
        }
        if assignment.len() != self.jobs.len() {
            return Err(Error::DimensionMismatch("solution too short for the schedule".into()));
        }
        Ok(self.schedule(assignment))
    }

    pub fn schedule(&self, assignment: Vec<usize>) -> Schedule {
        let mut loads = vec![Rat::zero(); self.machines];
        let mut cost = Rat::zero();
        for (i, &h) in assignment.iter().enumerate() {
            loads[h] += &self.jobs[i][h];
            if let Some(c) = &self.costs {
                cost += &c[i][h];
            }
        }
        let makespan = loads.iter().cloned().max().unwrap_or_else(Rat::zero);
        Schedule { assignment, loads, makespan, cost }
    }

    /// Re-encodes an assignment as a configuration solution of the reduced
    /// instance, filling machine slack with the binary slack blocks.
    pub fn encode(&self, inst: &NFoldConfigInstance, assignment: &[usize]) -> Vec<i64> {
        let m = self.machines;
        let mut x = Vec::with_capacity(inst.n() * m);
        for &h in assignment {
            x.extend((0..m).map(|k| i64::from(k == h)));
        }
        let mut load = vec![Rat::zero(); m];
        for (blk, xi) in inst.blocks.iter().zip(x.chunks(m)) {
            for (acc, v) in load.iter_mut().zip(blk.d.mul_int_vec(xi)) {
                *acc += v;
            }
        }
        let mut slack: Vec<i64> =
            (0..m).map(|h| (&inst.b0[h] - &load[h]).to_i64().unwrap_or(0).max(0)).collect();
        for blk in &inst.blocks[assignment.len()..] {
            let (h, size) = slack_block_shape(blk);
            if slack[h] & size != 0 {
                slack[h] -= size;
                x.extend(blk.configs[1].iter());
            } else {
                x.extend(blk.configs[0].iter());
            }
        }
        x
    }
}

fn slack_block_shape(blk: &ConfigBlock) -> (usize, i64) {
    let cfg = &blk.configs[1];
    let h = cfg.iter().position(|&v| v != 0).expect("nonzero slack configuration");
    (h, cfg[h])
}

/// `Rm||Cmax` feasibility at makespan `cmax`, or its cost variant when costs
/// are given. Processing times are scaled to integers; each machine's slack
/// `⌊C'⌋ - load` is written in binary by one block per bit with
/// configurations `{0, 2^k e_h}`, which turns `load ≤ cmax` into an equality.
pub fn scheduling_to_config(inst: &ScheduleInstance) -> Result<(NFoldConfigInstance, ScheduleDecoder)> {
    validate_schedule(inst).map_err(Error::InvalidInstance)?;
    let m = inst.jobs[0].len();
    let factor = Rat::from_bigint(common_denominator(inst.jobs.iter().flatten().chain([&inst.cmax])));
    let capacity = (&inst.cmax * &factor).floor_i64().ok_or_else(|| Error::Internal("cmax does not fit in i64".into()))?;
    let mut blocks = Vec::new();
    let units: Vec<Vec<i64>> = (0..m).map(|h| (0..m).map(|k| i64::from(k == h)).collect()).collect();
    for (i, p) in inst.jobs.iter().enumerate() {
        let mut d = RatMatrix::zeros(m, m);
        for h in 0..m {
            d[(h, h)] = &p[h] * &factor;
        }
        let weights = match &inst.costs {
            Some(c) => c[i].clone(),
            None => vec![Rat::zero(); m],
        };
        blocks.push(ConfigBlock { d, configs: units.clone(), weights });
    }
    let identity = RatMatrix::from_int_rows(&units);
    let bits = (64 - capacity.leading_zeros()) as usize;
    for h in 0..m {
        for k in 0..bits {
            let mut on = vec![0; m];
            on[h] = 1i64 << k;
            blocks.push(ConfigBlock { d: identity.clone(), configs: vec![vec![0; m], on], weights: vec![Rat::zero(); m] });
        }
    }
    let decoder = ScheduleDecoder { jobs: inst.jobs.clone(), costs: inst.costs.clone(), machines: m };
    Ok((NFoldConfigInstance { blocks, b0: vec![Rat::from_int(capacity); m] }, decoder))
}

/// The cost variant; the budget is reported against the decoded cost.
pub fn gap_to_config(inst: &ScheduleInstance) -> Result<(NFoldConfigInstance, ScheduleDecoder)> {
    if inst.costs.is_none() {
        return Err(Error::InvalidInstance(vec!["assignment costs are required".into()]));
    }
    scheduling_to_config(inst)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScheduleOutcome {
    pub result: ApproxResult,
    pub schedule: Option<Schedule>,
    /// `cmax + ε·max p`.
    pub makespan_bound: Rat,
    pub within_makespan_bound: bool,
    pub within_budget: Option<bool>,
}

pub fn solve_schedule(inst: &ScheduleInstance, params: &ApproxParams) -> Result<ScheduleOutcome> {
    let (cinst, decoder) = scheduling_to_config(inst)?;
    let result = solve_nfold_config(&cinst, params)?;
    let pmax = inst.jobs.iter().flatten().cloned().max().unwrap_or_else(Rat::zero);
    let makespan_bound = &inst.cmax + &(&params.epsilon * &pmax);
    let schedule = match &result.solution {
        Some(x) => Some(decoder.decode(x)?),
        None => None,
    };
    let within_makespan_bound = schedule.as_ref().is_some_and(|s| s.makespan <= makespan_bound);
    let within_budget = match (&inst.budget, &schedule) {
        (Some(b), Some(s)) => Some(s.cost <= *b),
        _ => None,
    };
    Ok(ScheduleOutcome { result, schedule, makespan_bound, within_makespan_bound, within_budget })
}
