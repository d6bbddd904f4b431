mod common;

use std::collections::BTreeSet;
use std::time::Duration;

use lns2e::destroy_repair::{close_satellite, destroy_routine, open_all_satellites, repair, routed_customers};
use lns2e::instance::{NodeId, Variant};
use lns2e::lns::{rebuild_first_level, solve};
use lns2e::local_search::{local_search, Granular};
use lns2e::oracle::{exact_solve, set_partitions};
use lns2e::solution::{check_feasibility, delta_insert, delta_new_route, delta_remove, evaluate, Route};
use lns2e::{Instance, Params, Solution};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn instance(seed: u64, lrp: bool, n_sat: usize, n_cust: usize) -> Instance {
    let variant = if lrp { Variant::TwoELrpSd } else { Variant::TwoEVrp };
    common::random_tiny(&mut ChaCha8Rng::seed_from_u64(seed), variant, n_sat, n_cust)
}

fn initial(inst: &Instance) -> Option<Solution> {
    let params = Params {
        time_max: Duration::ZERO,
        ..Params::default()
    };
    solve(inst, &params).ok().map(|(s, _)| s)
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn operators_preserve_feasibility_and_partition(
        seed in any::<u64>(), lrp in any::<bool>(), n_sat in 1usize..=3, n_cust in 3usize..=9,
    ) {
        let inst = instance(seed, lrp, n_sat, n_cust);
        let Some(mut sol) = initial(&inst) else { return Ok(()) };
        prop_assert!(check_feasibility(&inst, &sol).is_empty());
        let params = Params { p5_hat: 0.5, ..Params::default() };
        let gran = Granular::new(&inst, params.tau);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let all: BTreeSet<NodeId> = inst.customer_nodes().collect();
        for _ in 0..20 {
            let mut temp = sol.clone();
            temp.level1_routes.clear();
            let mut pool = Vec::new();
            destroy_routine(&inst, &mut temp, &mut pool, &params, &mut rng);
            if rng.gen_bool(0.3) && !close_satellite(&inst, &mut temp, &mut pool, &params, &mut rng) {
                open_all_satellites(&mut temp, &params, &mut rng);
            }
            let routed: BTreeSet<NodeId> = routed_customers(&temp).into_iter().collect();
            let pooled: BTreeSet<NodeId> = pool.iter().copied().collect();
            prop_assert_eq!(pooled.len(), pool.len());
            prop_assert!(routed.is_disjoint(&pooled));
            prop_assert_eq!(routed.union(&pooled).copied().collect::<BTreeSet<_>>(), all.clone());
            if repair(&inst, &mut temp, &mut pool, &mut rng).is_err() {
                continue;
            }
            prop_assert!(pool.is_empty());
            local_search(&inst, &mut temp, &params, &gran);
            if rebuild_first_level(&inst, &mut temp, &mut rng).is_err() {
                continue;
            }
            let v = check_feasibility(&inst, &temp);
            prop_assert!(v.is_empty(), "{:?}", v);
            sol = temp;
        }
    }

    #[test]
    fn deltas_match_recomputation(
        seed in any::<u64>(), lrp in any::<bool>(), n_sat in 1usize..=3, n_cust in 3usize..=9, picks in prop::collection::vec(any::<u64>(), 1..12),
    ) {
        let inst = instance(seed, lrp, n_sat, n_cust);
        let Some(mut sol) = initial(&inst) else { return Ok(()) };
        for pick in picks {
            let customers = routed_customers(&sol);
            let c = customers[(pick % customers.len() as u64) as usize];
            let before = evaluate(&inst, &sol);
            let d = delta_remove(&inst, &sol, c).unwrap();
            sol.remove_customer(&inst, c).unwrap();
            let after = evaluate(&inst, &sol);
            prop_assert!(close(after - before, d), "remove: {} vs {}", after - before, d);

            let before = after;
            let n_routes = sol.level2_routes.len() as u64;
            let choice = (pick >> 8) % (n_routes + 1);
            let d = if choice == n_routes {
                let s = inst.satellite_nodes().nth(((pick >> 16) % inst.n_satellites() as u64) as usize).unwrap();
                let d = delta_new_route(&inst, &sol, c, s).unwrap();
                sol.insert_new_route(&inst, c, s);
                d
            } else {
                let r = choice as usize;
                let pos = ((pick >> 16) % (sol.level2_routes[r].visits.len() as u64 + 1)) as usize;
                let d = delta_insert(&inst, &sol, c, r, pos).unwrap();
                sol.insert_customer(&inst, c, r, pos).unwrap();
                d
            };
            let after = evaluate(&inst, &sol);
            prop_assert!(close(after - before, d), "insert: {} vs {}", after - before, d);
            let mut cached = sol.clone();
            prop_assert_eq!(cached.cost(&inst), after);
        }
    }

    #[test]
    fn route_reversal_keeps_cost(seed in any::<u64>(), lrp in any::<bool>(), n_cust in 3usize..=9) {
        let inst = instance(seed, lrp, 2, n_cust);
        let Some(sol) = initial(&inst) else { return Ok(()) };
        let base = evaluate(&inst, &sol);
        for r in 0..sol.level2_routes.len() {
            let mut rev = sol.clone();
            rev.level2_routes[r].visits.reverse();
            prop_assert!(close(evaluate(&inst, &rev), base));
        }
        for r in 0..sol.level1_routes.len() {
            let mut rev = sol.clone();
            rev.level1_routes[r].visits.reverse();
            rev.level1_routes[r].deliveries.reverse();
            prop_assert!(close(evaluate(&inst, &rev), base));
            prop_assert!(check_feasibility(&inst, &rev).is_empty());
        }
    }

    #[test]
    fn seeded_runs_are_identical(seed in any::<u64>(), lrp in any::<bool>(), n_cust in 3usize..=9) {
        let inst = instance(seed, lrp, 2, n_cust);
        let params = Params { seed, max_iterations: Some(150), time_max: Duration::from_secs(60), ..Params::default() };
        let Ok((a, ra)) = solve(&inst, &params) else { return Ok(()) };
        let (b, rb) = solve(&inst, &params).unwrap();
        prop_assert_eq!(a.level1_routes, b.level1_routes);
        prop_assert_eq!(a.level2_routes, b.level2_routes);
        prop_assert_eq!(a.open_satellites, b.open_satellites);
        prop_assert_eq!(ra.cost.to_bits(), rb.cost.to_bits());
        prop_assert_eq!(ra.best_trace.len(), rb.best_trace.len());
    }

    #[test]
    fn best_is_monotone_and_grace_period_holds(
        seed in any::<u64>(), lrp in any::<bool>(), g_max in 1u64..8, i_max in 5u64..40,
    ) {
        let inst = instance(seed, lrp, 3, 7);
        let params = Params {
            seed, g_max, i_max, p5_hat: 1.0,
            max_iterations: Some(400), time_max: Duration::from_secs(60), ..Params::default()
        };
        let Ok((sol, report)) = solve(&inst, &params) else { return Ok(()) };
        prop_assert!(check_feasibility(&inst, &sol).is_empty());
        prop_assert!(close(evaluate(&inst, &sol), report.cost));
        for w in report.mask_change_iterations.windows(2) {
            prop_assert!(w[1] - w[0] > g_max, "{:?}", report.mask_change_iterations);
        }
        if let Some(&first) = report.mask_change_iterations.first() {
            prop_assert!(first > g_max);
        }
        for w in report.best_trace.windows(2) {
            prop_assert!(w[1].2 < w[0].2 && w[1].1 >= w[0].1 && w[1].0 > w[0].0);
        }
        prop_assert_eq!(report.best_trace.last().unwrap().2, report.cost);
    }

    #[test]
    fn oracle_bounds_the_solver(seed in any::<u64>(), lrp in any::<bool>(), n_cust in 2usize..=6) {
        let inst = instance(seed, lrp, 2, n_cust);
        let Ok((opt, opt_sol)) = exact_solve(&inst) else { return Ok(()) };
        prop_assert!(check_feasibility(&inst, &opt_sol).is_empty());
        prop_assert!(close(evaluate(&inst, &opt_sol), opt));
        let params = Params { seed, max_iterations: Some(300), time_max: Duration::from_secs(60), ..Params::default() };
        let (_, report) = solve(&inst, &params).unwrap();
        prop_assert!(report.cost >= opt - 1e-9 * opt.max(1.0), "{} < {}", report.cost, opt);
    }

    /// Every partition of four customers into routes, at every satellite
    /// assignment, is labelled by the checker exactly as a direct count of
    /// loads, fleet sizes and satellite capacities says.
    #[test]
    fn feasibility_labels_match_enumeration(seed in any::<u64>(), lrp in any::<bool>(), per_sat in any::<bool>()) {
        let mut inst = instance(seed, lrp, 2, 4).into_data();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        inst.fleet.level1_count = lns2e::instance::Limit::Unbounded;
        inst.fleet.level1_capacity = 1000;
        inst.fleet.level2_count = lns2e::instance::Limit::Finite(rng.gen_range(1..=4));
        inst.per_satellite_cf_limit_active = per_sat;
        for s in &mut inst.satellites {
            s.max_city_freighters = lns2e::instance::Limit::Finite(rng.gen_range(1..=3));
            if lrp {
                s.capacity = lns2e::instance::Limit::Finite(rng.gen_range(5..=40));
            }
        }
        let inst = Instance::new(inst).unwrap();
        let customers: Vec<NodeId> = inst.customer_nodes().collect();
        let q2 = inst.fleet.level2_capacity;
        let mut labelled = 0;
        for part in set_partitions(customers.len()) {
            for code in 0..(1usize << part.len()) {
                let homes: Vec<NodeId> = (0..part.len()).map(|b| 1 + (code >> b & 1)).collect();
                let mut sol = Solution::empty(&inst);
                for (block, &home) in part.iter().zip(&homes) {
                    sol.level2_routes.push(Route::level2(&inst, home, block.iter().map(|&i| customers[i]).collect()));
                }
                let mut through = [0u64; 2];
                let mut count = [0u64; 2];
                for r in &sol.level2_routes {
                    through[r.home - 1] += r.load;
                    count[r.home - 1] += 1;
                }
                for s in 1..=2 {
                    if count[s - 1] > 0 {
                        sol.level1_routes.push(Route::level1(vec![s], vec![through[s - 1]]));
                    }
                }
                let v2 = inst.fleet.level2_count.finite().unwrap();
                let expected = sol.level2_routes.iter().all(|r| r.load <= q2)
                    && sol.level2_routes.len() as u64 <= v2
                    && (1..=2).all(|s| {
                        let sat = inst.satellite(s);
                        (!per_sat || sat.max_city_freighters.allows(count[s - 1]))
                            && (!lrp || sat.capacity.allows(through[s - 1]))
                    });
                prop_assert_eq!(check_feasibility(&inst, &sol).is_empty(), expected, "{:?}", sol.level2_routes);
                labelled += 1;
            }
        }
        prop_assert_eq!(labelled, 2 + 7 * 4 + 6 * 8 + 16);
    }
}
