//! Brute-force exact solvers used as ground truth.
//!
//! All three enumerate a product of per-digit option lists in lexicographic
//! order. Rows and costs are scaled to integers once so the inner loop is
//! plain `i128` arithmetic; ties are broken by the lexicographically first
//! choice, so results do not depend on the worker count.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::{GeneralIp, NFoldConfigInstance, NFoldNonnegInstance};
use crate::rational::{common_denominator, Rat};

pub const DEFAULT_ORACLE_CAP: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum OracleResult {
    /// `witness` is the solution vector (block vectors concatenated for n-fold
    /// instances); `choices` holds the configuration indices when applicable.
    Optimal { value: Rat, witness: Vec<i64>, choices: Option<Vec<usize>> },
    Infeasible,
}

impl OracleResult {
    pub fn value(&self) -> Option<&Rat> {
        match self {
            OracleResult::Optimal { value, .. } => Some(value),
            OracleResult::Infeasible => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleOptions {
    pub cap: u64,
    /// Threads sharing the first digit; 0 and 1 both mean single-threaded.
    pub workers: usize,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions { cap: DEFAULT_ORACLE_CAP, workers: 1 }
    }
}

struct Digits {
    /// `options[d][k]` = (row contributions, scaled cost).
    options: Vec<Vec<(Vec<i128>, i128)>>,
    target: Vec<i128>,
}

fn to_i128(v: &BigInt) -> Result<i128> {
    v.to_i128().ok_or_else(|| Error::Internal("oracle scaling overflows i128".into()))
}

fn scaled(v: &Rat, factor: &BigInt) -> Result<i128> {
    let s = v.to_big() * BigRational::from_integer(factor.clone());
    debug_assert!(s.is_integer());
    to_i128(&s.to_integer())
}

/// Row scaling: one common denominator per row, taken over every value that
/// can contribute to that row.
fn row_factors(rows: usize, values: impl Fn(usize) -> Vec<Rat>) -> Vec<BigInt> {
    (0..rows).map(|r| common_denominator(values(r).iter())).collect()
}

fn best(a: Option<(i128, Vec<usize>)>, b: Option<(i128, Vec<usize>)>) -> Option<(i128, Vec<usize>)> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(x), Some(y)) => Some(if (y.0, &y.1) < (x.0, &x.1) { y } else { x }),
    }
}

impl Digits {
    fn count(&self) -> u128 {
        self.options.iter().fold(1u128, |acc, o| acc.saturating_mul(o.len() as u128))
    }

    fn search_from(&self, first: std::ops::Range<usize>) -> Option<(i128, Vec<usize>)> {
        let depth = self.options.len();
        let rows = self.target.len();
        if depth == 0 {
            return (self.target.iter().all(|&v| v == 0)).then(|| (0, vec![]));
        }
        let mut incumbent: Option<(i128, Vec<usize>)> = None;
        let mut choice = vec![0usize; depth];
        let mut sums = vec![vec![0i128; rows]; depth + 1];
        let mut costs = vec![0i128; depth + 1];
        // Iterative odometer: level `d` is about to try option `choice[d]`.
        let mut d = 0usize;
        choice[0] = first.start;
        loop {
            let limit = if d == 0 { first.end } else { self.options[d].len() };
            if choice[d] >= limit {
                if d == 0 {
                    break;
                }
                d -= 1;
                choice[d] += 1;
                continue;
            }
            let (contrib, cost) = &self.options[d][choice[d]];
            for r in 0..rows {
                sums[d + 1][r] = sums[d][r] + contrib[r];
            }
            costs[d + 1] = costs[d] + cost;
            if d + 1 == depth {
                if sums[depth] == self.target && incumbent.as_ref().is_none_or(|(c, _)| costs[depth] < *c) {
                    incumbent = Some((costs[depth], choice.clone()));
                }
                choice[d] += 1;
            } else {
                d += 1;
                choice[d] = 0;
            }
        }
        incumbent
    }

    fn search(&self, opts: &OracleOptions) -> Result<Option<(i128, Vec<usize>)>> {
        let total = self.count();
        if total > opts.cap as u128 {
            return Err(Error::EnumerationCap { cap: opts.cap, what: format!("oracle search space of {total} points") });
        }
        let first_len = self.options.first().map_or(0, Vec::len);
        let workers = opts.workers.max(1).min(first_len.max(1));
        if workers <= 1 || self.options.is_empty() {
            return Ok(self.search_from(0..first_len));
        }
        let chunk = first_len.div_ceil(workers);
        let found = std::thread::scope(|scope| {
            let handles: Vec<_> = (0..workers)
                .map(|w| {
                    let range = (w * chunk).min(first_len)..((w + 1) * chunk).min(first_len);
                    scope.spawn(move || self.search_from(range))
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("oracle worker panicked")).fold(None, best)
        });
        Ok(found)
    }
}

fn unscale(cost: i128, factor: &BigInt) -> Rat {
    Rat::from_big(BigRational::new(BigInt::from(cost), factor.clone()))
}

pub fn brute_force_general(inst: &GeneralIp, opts: &OracleOptions) -> Result<OracleResult> {
    inst.validate().map_err(Error::InvalidInstance)?;
    let (m, n) = (inst.m(), inst.n());
    let factors = row_factors(m, |r| {
        let mut v = inst.h.row(r).to_vec();
        v.push(inst.b[r].clone());
        v
    });
    let cost_factor = common_denominator(inst.w.iter());
    let mut options = Vec::with_capacity(n);
    for j in 0..n {
        let mut list = Vec::new();
        for v in inst.l[j]..=inst.u[j] {
            let rv = Rat::from_int(v);
            let contrib = (0..m).map(|r| scaled(&(&inst.h[(r, j)] * &rv), &factors[r])).collect::<Result<_>>()?;
            list.push((contrib, scaled(&(&inst.w[j] * &rv), &cost_factor)?));
        }
        options.push(list);
    }
    let target = (0..m).map(|r| scaled(&inst.b[r], &factors[r])).collect::<Result<_>>()?;
    let digits = Digits { options, target };
    Ok(match digits.search(opts)? {
        None => OracleResult::Infeasible,
        Some((cost, choice)) => OracleResult::Optimal {
            value: unscale(cost, &cost_factor),
            witness: choice.iter().enumerate().map(|(j, &k)| inst.l[j] + k as i64).collect(),
            choices: None,
        },
    })
}

pub fn brute_force_config(inst: &NFoldConfigInstance, opts: &OracleOptions) -> Result<OracleResult> {
    inst.validate().map_err(Error::InvalidInstance)?;
    let s = inst.s();
    let contributions: Vec<Vec<Vec<Rat>>> =
        inst.blocks.iter().map(|b| b.configs.iter().map(|p| b.d.mul_int_vec(p)).collect()).collect();
    let costs: Vec<Vec<Rat>> = inst
        .blocks
        .iter()
        .map(|b| b.configs.iter().map(|p| crate::rational::dot_int(&b.weights, p)).collect())
        .collect();
    let factors = row_factors(s, |r| {
        let mut v: Vec<Rat> = contributions.iter().flatten().map(|c| c[r].clone()).collect();
        v.push(inst.b0[r].clone());
        v
    });
    let cost_factor = common_denominator(costs.iter().flatten());
    let mut options = Vec::with_capacity(inst.n());
    for (contrib, cost) in contributions.iter().zip(&costs) {
        let mut list = Vec::new();
        for (c, w) in contrib.iter().zip(cost) {
            let v = (0..s).map(|r| scaled(&c[r], &factors[r])).collect::<Result<_>>()?;
            list.push((v, scaled(w, &cost_factor)?));
        }
        options.push(list);
    }
    let target = (0..s).map(|r| scaled(&inst.b0[r], &factors[r])).collect::<Result<_>>()?;
    let digits = Digits { options, target };
    Ok(match digits.search(opts)? {
        None => OracleResult::Infeasible,
        Some((cost, choice)) => OracleResult::Optimal {
            value: unscale(cost, &cost_factor),
            witness: choice.iter().enumerate().flat_map(|(i, &k)| inst.blocks[i].configs[k].clone()).collect(),
            choices: Some(choice),
        },
    })
}

/// Exhausts the full integer box of a nonnegative n-fold instance. Every
/// variable is one digit; local rows are part of the target, so the search
/// space is `Π (u + 1)` regardless of how many points satisfy the local rows.
pub fn brute_force_nfold(inst: &NFoldNonnegInstance, opts: &OracleOptions) -> Result<OracleResult> {
    inst.validate().map_err(Error::InvalidInstance)?;
    let (n, t, sd, sa) = (inst.n(), inst.t(), inst.s_d(), inst.s_a());
    let rows = sd + n * sa;
    // Row r's coefficient for variable (i, j), in the order of `NFoldNonnegInstance::rows`.
    let coef = |r: usize, i: usize, j: usize| -> Rat {
        let b = &inst.blocks[i];
        if r < sd {
            b.d[(r, j)].clone()
        } else if (r - sd) / sa.max(1) == i {
            b.a[((r - sd) % sa, j)].clone()
        } else {
            Rat::zero()
        }
    };
    let target_rat: Vec<Rat> =
        inst.b0.iter().cloned().chain(inst.blocks.iter().flat_map(|b| b.bi.iter().cloned())).collect();
    let factors = row_factors(rows, |r| {
        let mut v: Vec<Rat> = (0..n).flat_map(|i| (0..t).map(move |j| (i, j))).map(|(i, j)| coef(r, i, j)).collect();
        v.push(target_rat[r].clone());
        v
    });
    let cost_factor = common_denominator(inst.blocks.iter().flat_map(|b| b.w.iter()));
    let mut options = Vec::with_capacity(n * t);
    for i in 0..n {
        for j in 0..t {
            let mut list = Vec::new();
            for v in 0..=inst.blocks[i].u[j] {
                let rv = Rat::from_int(v);
                let contrib = (0..rows).map(|r| scaled(&(&coef(r, i, j) * &rv), &factors[r])).collect::<Result<_>>()?;
                list.push((contrib, scaled(&(&inst.blocks[i].w[j] * &rv), &cost_factor)?));
            }
            options.push(list);
        }
    }
    let target = (0..rows).map(|r| scaled(&target_rat[r], &factors[r])).collect::<Result<_>>()?;
    let digits = Digits { options, target };
    Ok(match digits.search(opts)? {
        None => OracleResult::Infeasible,
        Some((cost, choice)) => OracleResult::Optimal {
            value: unscale(cost, &cost_factor),
            witness: choice.iter().map(|&k| k as i64).collect(),
            choices: None,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{ConfigBlock, NonnegBlock};
    use crate::linalg::RatMatrix;
    use crate::rational::rat;

    fn r(v: i64) -> Rat {
        Rat::from_int(v)
    }

    fn rats(v: &[i64]) -> Vec<Rat> {
        v.iter().map(|&x| r(x)).collect()
    }

    fn general(h: &[Vec<i64>], b: &[i64], w: &[i64], l: &[i64], u: &[i64]) -> GeneralIp {
        GeneralIp { h: RatMatrix::from_int_rows(h), b: rats(b), w: rats(w), l: l.to_vec(), u: u.to_vec() }
    }

    #[test]
    fn general_examples() {
        let g = general(&[vec![2, 3, 5]], &[10], &[1, 1, 1], &[0, 0, 0], &[3, 3, 2]);
        let res = brute_force_general(&g, &OracleOptions::default()).unwrap();
        assert_eq!(res.value(), Some(&r(2)));

        let g = general(&[vec![2]], &[3], &[1], &[0], &[5]);
        assert_eq!(brute_force_general(&g, &OracleOptions::default()).unwrap(), OracleResult::Infeasible);

        let g = general(&[vec![1, 1]], &[3], &[2, 5], &[1, 2], &[1, 2]);
        let res = brute_force_general(&g, &OracleOptions::default()).unwrap();
        assert_eq!(res.value(), Some(&r(12)));
    }

    #[test]
    fn fractional_data_and_workers_agree() {
        let g = GeneralIp {
            h: RatMatrix::from_rows(vec![vec![rat(1, 2), rat(1, 3), r(1)]]),
            b: vec![rat(7, 6)],
            w: vec![rat(-1, 4), r(1), rat(1, 2)],
            l: vec![0, 0, 0],
            u: vec![4, 4, 4],
        };
        let one = brute_force_general(&g, &OracleOptions::default()).unwrap();
        let many = brute_force_general(&g, &OracleOptions { workers: 3, ..Default::default() }).unwrap();
        assert_eq!(one, many);
        assert!(matches!(one, OracleResult::Optimal { .. }));
    }

    #[test]
    fn cap_is_enforced() {
        let g = general(&[vec![1, 1]], &[3], &[1, 1], &[0, 0], &[9, 9]);
        let opts = OracleOptions { cap: 99, workers: 1 };
        assert!(matches!(brute_force_general(&g, &opts), Err(Error::EnumerationCap { cap: 99, .. })));
    }

    #[test]
    fn config_examples() {
        let d = RatMatrix::from_int_rows(&[vec![1, 0], vec![0, 1]]);
        let block = |w: &[i64]| ConfigBlock { d: d.clone(), configs: vec![vec![1, 0], vec![0, 1]], weights: rats(w) };
        let inst = NFoldConfigInstance { blocks: vec![block(&[1, 2]), block(&[2, 0])], b0: rats(&[1, 1]) };
        let res = brute_force_config(&inst, &OracleOptions::default()).unwrap();
        assert_eq!(res.value(), Some(&r(1)));

        let single = |b0: &[i64]| NFoldConfigInstance {
            blocks: vec![ConfigBlock { d: RatMatrix::from_int_rows(&[vec![2]]), configs: vec![vec![1]], weights: rats(&[3]) }],
            b0: rats(b0),
        };
        assert_eq!(brute_force_config(&single(&[2]), &OracleOptions::default()).unwrap().value(), Some(&r(3)));
        assert_eq!(brute_force_config(&single(&[1]), &OracleOptions::default()).unwrap(), OracleResult::Infeasible);
    }

    fn nn(u: i64, bi: i64) -> NonnegBlock {
        NonnegBlock {
            a: RatMatrix::from_int_rows(&[vec![1]]),
            d: RatMatrix::from_int_rows(&[vec![1]]),
            bi: rats(&[bi]),
            u: vec![u],
            w: rats(&[1]),
        }
    }

    #[test]
    fn nfold_examples() {
        let inst = NFoldNonnegInstance { blocks: vec![nn(5, 1), nn(5, 1)], b0: rats(&[2]) };
        let res = brute_force_nfold(&inst, &OracleOptions::default()).unwrap();
        assert_eq!(res.value(), Some(&r(2)));

        let zero = NFoldNonnegInstance { blocks: vec![nn(0, 0), nn(0, 0)], b0: rats(&[0]) };
        assert_eq!(brute_force_nfold(&zero, &OracleOptions::default()).unwrap().value(), Some(&r(0)));

        let bad = NFoldNonnegInstance { blocks: vec![nn(0, 0)], b0: rats(&[1]) };
        assert_eq!(brute_force_nfold(&bad, &OracleOptions::default()).unwrap(), OracleResult::Infeasible);
    }
}
