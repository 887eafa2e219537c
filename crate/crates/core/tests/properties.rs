use proptest::prelude::*;

use ipapprox::apps::{knapsack_to_general, scheduling_to_config};
use ipapprox::general::solve_general;
use ipapprox::generate::{random_config, random_general, random_nfold, random_schedule, rng_from_seed};
use ipapprox::instance::{NFoldConfigInstance, Tolerance};
use ipapprox::linalg::RatMatrix;
use ipapprox::nfold::{classify_and_split, enumerate_major_configs, major_values, normalize_block, ColumnKind};
use ipapprox::oracle::{brute_force_config, brute_force_general, brute_force_nfold, OracleOptions, OracleResult};
use ipapprox::{ApproxParams, Rat, Status};

fn r(v: i64) -> Rat {
    Rat::from_int(v)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn general_pipeline_beats_oracle(seed in 0u64..10_000, m in 1usize..=2, n in 1usize..=5, e in 0usize..3) {
        let g = random_general(&mut rng_from_seed(seed), m, n, 4, 3);
        let eps = [r(1), Rat::new(1, 2), Rat::new(1, 5)][e].clone();
        let OracleResult::Optimal { value, .. } = brute_force_general(&g, &OracleOptions::default()).unwrap() else {
            panic!("planted instance is feasible");
        };
        let res = solve_general(&g, &ApproxParams::new(eps.clone())).unwrap();
        prop_assert_eq!(res.status, Status::Solved);
        let rep = res.report.unwrap();
        prop_assert!(rep.objective <= value);
        prop_assert!(rep.max_abs_residual <= &eps * &g.delta());
    }

    #[test]
    fn oracle_ignores_worker_count(seed in 0u64..10_000, workers in 2usize..5) {
        let g = random_general(&mut rng_from_seed(seed), 2, 5, 4, 3);
        let one = brute_force_general(&g, &OracleOptions::default()).unwrap();
        let many = brute_force_general(&g, &OracleOptions { workers, ..Default::default() }).unwrap();
        prop_assert_eq!(one, many);

        let c = random_config(&mut rng_from_seed(seed), 4, 2, 2, 2, 4, 3);
        let one = brute_force_config(&c, &OracleOptions::default()).unwrap();
        let many = brute_force_config(&c, &OracleOptions { workers, ..Default::default() }).unwrap();
        prop_assert_eq!(one, many);
    }

    #[test]
    fn major_and_minor_parts_cover_every_value(u in 0i64..40, lambda in 1i64..12) {
        let majors = major_values(u, lambda);
        let minor = (lambda - 1).min(u);
        for x in 0..=u {
            prop_assert!(majors.iter().any(|&p| p <= x && x - p <= minor));
        }
        prop_assert!(majors.iter().all(|&p| (0..=u).contains(&p)));
        // The plain quotient/remainder split is covered too.
        for x in 0..=u {
            let q = lambda * (x / lambda);
            prop_assert_eq!(q + x % lambda, x);
        }
    }

    #[test]
    fn split_is_minimal_and_minor_load_is_small(
        entries in proptest::collection::vec((1i64..50, 0i64..3), 1..4),
        b in 20i64..200,
        e in 0usize..3,
    ) {
        let eps = [r(1), Rat::new(1, 2), Rat::new(1, 5)][e].clone();
        let t = entries.len();
        let a = RatMatrix::from_int_rows(&[entries.iter().map(|p| p.0).collect()]);
        let d = RatMatrix::zeros(1, t);
        let u: Vec<i64> = entries.iter().map(|p| 2 + p.1).collect();
        let blk = normalize_block(&a, &[r(b)], &d, &u, &vec![Rat::zero(); t]);
        let psi = &eps / &r(4 * t as i64);
        let split = classify_and_split(&blk, &psi, 0).unwrap();
        let mut minor_load = Rat::zero();
        for j in 0..t {
            let top = blk.a[(0, j)].clone();
            match split.kind[j] {
                ColumnKind::Big => prop_assert!(top >= psi && split.lambda[j] == 1),
                ColumnKind::Small => {
                    let lambda = r(split.lambda[j]);
                    prop_assert!(&lambda * &top >= psi);
                    prop_assert!(&(&lambda - &r(1)) * &top < psi);
                    prop_assert!(&lambda * &top <= &r(2) * &psi);
                }
                ColumnKind::Fixed => prop_assert!(false, "no column is fixed here"),
            }
            minor_load += &top * &r(split.minor_bound[j]);
        }
        prop_assert!(minor_load <= &eps / &r(2));
    }

    #[test]
    fn exact_window_recovers_local_solutions(seed in 0u64..10_000) {
        let inst = random_nfold(&mut rng_from_seed(seed), 1, 2, 1, 2, 3, 3);
        let b = &inst.blocks[0];
        let blk = normalize_block(&b.a, &b.bi, &b.d, &b.u, &b.w);
        let split = classify_and_split(&blk, &Rat::new(1, 10_000), 0).unwrap();
        prop_assume!(split.kind.iter().all(|k| *k != ColumnKind::Small));
        let got = enumerate_major_configs(&blk, &split, &r(1), &r(1), 1_000_000).unwrap();
        let mut direct = Vec::new();
        for x0 in 0..=b.u[0] {
            for x1 in 0..=b.u[1] {
                if b.a.mul_int_vec(&[x0, x1]) == b.bi {
                    direct.push(vec![x0, x1]);
                }
            }
        }
        prop_assert_eq!(got, direct);
    }

    #[test]
    fn knapsack_slacks_close_every_row(weights in proptest::collection::vec(0i64..6, 1..5), cap in 0i64..12) {
        let n = weights.len();
        let (g, dec) = knapsack_to_general(&vec![r(1); n], &RatMatrix::from_int_rows(std::slice::from_ref(&weights)), &[r(cap)]).unwrap();
        let res = brute_force_general(&g, &OracleOptions::default()).unwrap();
        let OracleResult::Optimal { witness, value, .. } = res else { panic!("empty selection is feasible") };
        let items = dec.decode(&witness);
        let used: i64 = items.iter().zip(&weights).map(|(x, w)| x * w).sum();
        prop_assert!(used <= cap);
        prop_assert_eq!(value, r(-items.iter().sum::<i64>()));
    }

    #[test]
    fn schedule_encoding_round_trips(seed in 0u64..10_000) {
        let s = random_schedule(&mut rng_from_seed(seed), 4, 2, 5);
        let (inst, dec): (NFoldConfigInstance, _) = scheduling_to_config(&s).unwrap();
        let OracleResult::Optimal { witness, .. } = brute_force_config(&inst, &OracleOptions::default()).unwrap() else {
            panic!("the planted assignment fits");
        };
        let schedule = dec.decode(&witness).unwrap();
        prop_assert!(schedule.makespan <= s.cmax);
        let again = dec.encode(&inst, &schedule.assignment);
        let tol = Tolerance::Additive(Rat::zero());
        prop_assert_eq!(
            inst.violation_report(&witness, tol.clone()).unwrap().residual,
            inst.violation_report(&again, tol).unwrap().residual
        );
    }

    #[test]
    fn nfold_oracle_witness_is_feasible(seed in 0u64..10_000) {
        let inst = random_nfold(&mut rng_from_seed(seed), 2, 1, 1, 2, 2, 3);
        let OracleResult::Optimal { witness, value, .. } = brute_force_nfold(&inst, &OracleOptions::default()).unwrap() else {
            panic!("planted instance is feasible");
        };
        let rep = inst.violation_report(&witness, Tolerance::Additive(Rat::zero())).unwrap();
        prop_assert!(rep.max_abs_residual.is_zero());
        prop_assert_eq!(rep.objective, value);
    }
}
