//! Seeded random instance generators.
//!
//! Every generator plants a solution and derives the right-hand sides from
//! it, so generated instances are feasible. The same seed always yields the
//! same instance.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::instance::{ConfigBlock, GeneralIp, NFoldConfigInstance, NFoldNonnegInstance, NonnegBlock, ScheduleInstance};
use crate::linalg::RatMatrix;
use crate::mip::{MixedModel, ModelBuilder};
use crate::rational::Rat;

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn int_matrix(rng: &mut impl Rng, rows: usize, cols: usize, lo: i64, hi: i64) -> RatMatrix {
    let data: Vec<Vec<i64>> = (0..rows).map(|_| (0..cols).map(|_| rng.gen_range(lo..=hi)).collect()).collect();
    let mut m = RatMatrix::from_int_rows(&data);
    if rows == 0 {
        m = RatMatrix::zeros(0, cols);
    }
    m
}

/// `m × n` program with entries in `[-delta_max, delta_max]`, bounds inside
/// `[-bound_max, bound_max]` and weights in `[-5, 5]`.
pub fn random_general(rng: &mut impl Rng, m: usize, n: usize, delta_max: i64, bound_max: i64) -> GeneralIp {
    let mut h = int_matrix(rng, m, n, -delta_max, delta_max);
    // Keep at least one nonzero entry so Δ > 0.
    if m > 0 && n > 0 && h.entries().all(Rat::is_zero) {
        h[(rng.gen_range(0..m), rng.gen_range(0..n))] = Rat::from_int(delta_max.max(1));
    }
    let mut l = Vec::with_capacity(n);
    let mut u = Vec::with_capacity(n);
    let mut x = Vec::with_capacity(n);
    for _ in 0..n {
        let a = rng.gen_range(-bound_max..=bound_max);
        let b = rng.gen_range(-bound_max..=bound_max);
        let (lo, hi) = (a.min(b), a.max(b));
        l.push(lo);
        u.push(hi);
        x.push(rng.gen_range(lo..=hi));
    }
    let w = (0..n).map(|_| Rat::from_int(rng.gen_range(-5..=5))).collect();
    GeneralIp { b: h.mul_int_vec(&x), h, w, l, u }
}

/// Configuration instance with `n` blocks, `s` coupling rows, `t` columns,
/// entries of `D` in `[-delta_max, delta_max]`, configurations in `[0, kappa]`
/// and between one and `max_configs` distinct configurations per block.
pub fn random_config(
    rng: &mut impl Rng,
    n: usize,
    s: usize,
    t: usize,
    kappa: i64,
    max_configs: usize,
    delta_max: i64,
) -> NFoldConfigInstance {
    let mut blocks = Vec::with_capacity(n);
    let mut b0 = vec![Rat::zero(); s];
    for _ in 0..n {
        let d = int_matrix(rng, s, t, -delta_max, delta_max);
        let want = rng.gen_range(1..=max_configs.max(1));
        let mut configs: Vec<Vec<i64>> = Vec::new();
        for _ in 0..4 * want {
            let c: Vec<i64> = (0..t).map(|_| rng.gen_range(0..=kappa)).collect();
            if !configs.contains(&c) {
                configs.push(c);
            }
            if configs.len() == want {
                break;
            }
        }
        let chosen = configs.choose(rng).expect("at least one configuration");
        for (acc, v) in b0.iter_mut().zip(d.mul_int_vec(chosen)) {
            *acc += v;
        }
        let weights = (0..t).map(|_| Rat::from_int(rng.gen_range(-5..=5))).collect();
        blocks.push(ConfigBlock { d, configs, weights });
    }
    NFoldConfigInstance { blocks, b0 }
}

/// Nonnegative n-fold instance with entries in `[0, delta_max]` and every
/// column of `A` nonzero.
pub fn random_nfold(
    rng: &mut impl Rng,
    n: usize,
    s_a: usize,
    s_d: usize,
    t: usize,
    u_max: i64,
    delta_max: i64,
) -> NFoldNonnegInstance {
    let mut blocks = Vec::with_capacity(n);
    let mut b0 = vec![Rat::zero(); s_d];
    for _ in 0..n {
        let mut a = int_matrix(rng, s_a, t, 0, delta_max);
        for j in 0..t {
            if s_a > 0 && (0..s_a).all(|r| a[(r, j)].is_zero()) {
                a[(rng.gen_range(0..s_a), j)] = Rat::from_int(rng.gen_range(1..=delta_max.max(1)));
            }
        }
        let d = int_matrix(rng, s_d, t, 0, delta_max);
        let u: Vec<i64> = (0..t).map(|_| rng.gen_range(0..=u_max)).collect();
        let x: Vec<i64> = u.iter().map(|&ub| rng.gen_range(0..=ub)).collect();
        for (acc, v) in b0.iter_mut().zip(d.mul_int_vec(&x)) {
            *acc += v;
        }
        let w = (0..t).map(|_| Rat::from_int(rng.gen_range(-5..=5))).collect();
        blocks.push(NonnegBlock { bi: a.mul_int_vec(&x), a, d, u, w });
    }
    NFoldNonnegInstance { blocks, b0 }
}

/// Nonnegative instance with two columns per block: a light column with
/// local entries in `[1, 2]` and a heavy one with entries in `[30, 60]`.
/// The heavy column is planted at least once, so the light column is small
/// relative to the right-hand side for moderate `ε`.
pub fn random_nfold_mixed_scale(rng: &mut impl Rng, n: usize, s_a: usize, s_d: usize) -> NFoldNonnegInstance {
    let mut blocks = Vec::with_capacity(n);
    let mut b0 = vec![Rat::zero(); s_d];
    for _ in 0..n {
        let rows: Vec<Vec<i64>> = (0..s_a).map(|_| vec![rng.gen_range(1..=2), rng.gen_range(30..=60)]).collect();
        let a = RatMatrix::from_int_rows(&rows);
        let d = int_matrix(rng, s_d, 2, 0, 3);
        let u = vec![3, rng.gen_range(1..=3)];
        let x = vec![rng.gen_range(0..=3), rng.gen_range(1..=u[1])];
        for (acc, v) in b0.iter_mut().zip(d.mul_int_vec(&x)) {
            *acc += v;
        }
        let w = (0..2).map(|_| Rat::from_int(rng.gen_range(-5..=5))).collect();
        blocks.push(NonnegBlock { bi: a.mul_int_vec(&x), a, d, u, w });
    }
    NFoldNonnegInstance { blocks, b0 }
}

/// Configuration instance whose blocks are copies of two templates with
/// `D` perturbed entrywise by up to 2, so coarse grids put several blocks
/// into one type.
pub fn random_config_clustered(rng: &mut impl Rng, n: usize, s: usize, t: usize, kappa: i64) -> NFoldConfigInstance {
    let templates: Vec<NFoldConfigInstance> = (0..2).map(|_| random_config(rng, 1, s, t, kappa, 4, 3)).collect();
    let mut blocks = Vec::with_capacity(n);
    let mut b0 = vec![Rat::zero(); s];
    for _ in 0..n {
        let mut blk = templates[rng.gen_range(0..2)].blocks[0].clone();
        for r in 0..s {
            for c in 0..t {
                blk.d[(r, c)] += Rat::from_int(rng.gen_range(0..=2));
            }
        }
        blk.weights = (0..t).map(|_| Rat::from_int(rng.gen_range(-5..=5))).collect();
        let chosen = blk.configs.choose(rng).expect("at least one configuration").clone();
        for (acc, v) in b0.iter_mut().zip(blk.d.mul_int_vec(&chosen)) {
            *acc += v;
        }
        blocks.push(blk);
    }
    NFoldConfigInstance { blocks, b0 }
}

/// `n` jobs on `m` machines with integer times in `[1, p_max]`; `cmax` is the
/// makespan of a random assignment.
pub fn random_schedule(rng: &mut impl Rng, n: usize, m: usize, p_max: i64) -> ScheduleInstance {
    let jobs: Vec<Vec<Rat>> =
        (0..n).map(|_| (0..m).map(|_| Rat::from_int(rng.gen_range(1..=p_max))).collect()).collect();
    let mut loads = vec![Rat::zero(); m];
    for job in &jobs {
        let h = rng.gen_range(0..m);
        loads[h] += &job[h];
    }
    let cmax = loads.into_iter().max().unwrap_or_else(Rat::zero);
    ScheduleInstance { jobs, cmax, costs: None, budget: None }
}

/// Small mixed model: up to `ints` integer variables with ranges up to
/// `range`, two continuous variables, and `rows` equality rows built around
/// a planted point so the model is feasible.
pub fn random_mixed_model(rng: &mut impl Rng, ints: usize, range: i64, rows: usize) -> MixedModel {
    let mut builder = ModelBuilder::new();
    let vars = ints + 2;
    let coefs: Vec<Vec<i64>> = (0..rows).map(|_| (0..vars).map(|_| rng.gen_range(-3..=3)).collect()).collect();
    let mut point = Vec::with_capacity(vars);
    let mut bounds = Vec::with_capacity(vars);
    for j in 0..vars {
        let hi = rng.gen_range(0..=range);
        bounds.push(hi);
        let v = Rat::from_int(rng.gen_range(0..=hi));
        // Continuous variables sit at a half-integer to force fractional relaxations.
        point.push(if j >= ints && hi > 0 { &v / &Rat::from_int(2) } else { v });
    }
    for row in &coefs {
        let rhs: Rat = row.iter().zip(&point).map(|(&c, v)| &Rat::from_int(c) * v).sum();
        builder.add_row(rhs);
    }
    for j in 0..vars {
        let entries = (0..rows).map(|r| (r, Rat::from_int(coefs[r][j]))).collect();
        let cost = Rat::from_int(rng.gen_range(-4..=4));
        builder.add_column(entries, Rat::zero(), Rat::from_int(bounds[j]), cost, j < ints);
    }
    builder.build()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_instance() {
        let a = random_general(&mut rng_from_seed(7), 2, 6, 5, 5);
        let b = random_general(&mut rng_from_seed(7), 2, 6, 5, 5);
        assert_eq!(a, b);
        assert!(a.validate().is_ok());
    }

    #[test]
    fn generated_instances_validate() {
        let mut rng = rng_from_seed(1);
        for _ in 0..20 {
            assert!(random_config(&mut rng, 4, 2, 2, 2, 4, 3).validate().is_ok());
            assert!(random_nfold(&mut rng, 3, 2, 2, 2, 3, 3).validate().is_ok());
            assert!(crate::apps::validate_schedule(&random_schedule(&mut rng, 4, 3, 5)).is_ok());
        }
    }
}
