//! The main search loop and the first-level reconstruction.

use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::destroy_repair::{close_satellite, destroy_routine, open_all_satellites, repair};
use crate::error::{Error, Result};
use crate::instance::{Instance, NodeId, Severity, Variant, DEPOT};
use crate::local_search::{improvement_eps, local_search, two_opt, Granular};
use crate::params::{Params, Toggle};
use crate::scalar::Scalar;
use crate::solution::{satellite_throughput, Route, Solution};

/// Level-1 demand items derived from the satellite throughputs: the
/// full-truckload shuttles and the residual quantities still to be routed.
pub fn first_level_items<T: Scalar>(inst: &Instance<T>, sol: &Solution<T>) -> (Vec<Route>, Vec<(NodeId, u64)>) {
    let through = satellite_throughput(inst, sol);
    let q1 = inst.fleet.level1_capacity;
    let mut shuttles = Vec::new();
    let mut items = Vec::new();
    for s in inst.satellite_nodes() {
        let d = through[s - 1];
        match inst.variant {
            Variant::TwoEVrp => {
                for _ in 0..d / q1 {
                    shuttles.push(Route::level1(vec![s], vec![q1]));
                }
                if !d.is_multiple_of(q1) {
                    items.push((s, d % q1));
                }
            }
            Variant::TwoELrpSd => {
                if sol.level2_routes.iter().any(|r| r.home == s) {
                    items.push((s, d));
                }
            }
        }
    }
    (shuttles, items)
}

fn l1_cost<T: Scalar>(inst: &Instance<T>, visits: &[NodeId]) -> T {
    if visits.is_empty() {
        return T::zero();
    }
    let mut prev = DEPOT;
    let mut dist = T::zero();
    for &v in visits {
        dist += inst.d1(prev, v);
        prev = v;
    }
    dist += inst.d1(prev, DEPOT);
    inst.fleet.level1_fixed_cost + inst.fleet.level1_dist_multiplier * dist
}

fn insert_items<T: Scalar>(
    inst: &Instance<T>,
    routes: &mut Vec<Route>,
    items: &[(NodeId, u64)],
) -> bool {
    let q1 = inst.fleet.level1_capacity;
    for &(s, q) in items {
        let mut best: Option<(usize, usize, T)> = None;
        for (ri, r) in routes.iter().enumerate() {
            if r.load + q > q1 || r.visits.contains(&s) {
                continue;
            }
            let mut prev = DEPOT;
            for p in 0..=r.visits.len() {
                let next = r.visits.get(p).copied().unwrap_or(DEPOT);
                let delta = inst.c1(prev, s) + inst.c1(s, next) - inst.c1(prev, next);
                if best.is_none_or(|b| delta < b.2) {
                    best = Some((ri, p, delta));
                }
                prev = next;
            }
        }
        if inst.fleet.level1_count.allows(routes.len() as u64 + 1) {
            let delta = l1_cost(inst, &[s]);
            if best.is_none_or(|b| delta < b.2) {
                best = Some((routes.len(), 0, delta));
            }
        }
        match best {
            Some((ri, _, _)) if ri == routes.len() => routes.push(Route::level1(vec![s], vec![q])),
            Some((ri, p, _)) => {
                let r = &mut routes[ri];
                r.visits.insert(p, s);
                r.deliveries.insert(p, q);
                r.load += q;
            }
            None => return false,
        }
    }
    true
}

/// Fills trucks one after another with the satellites in polar order around
/// the depot, splitting a satellite's quantity across consecutive trucks.
fn next_fit<T: Scalar>(inst: &Instance<T>, through: &[u64]) -> Option<Vec<Route>> {
    let q1 = inst.fleet.level1_capacity;
    let mut sats: Vec<NodeId> = inst.satellite_nodes().filter(|&s| through[s - 1] > 0).collect();
    let angle = |s: NodeId| {
        let c = inst.coord(s);
        (c.y - inst.depot.y).atan2(c.x - inst.depot.x).as_f64()
    };
    sats.sort_by(|&a, &b| angle(a).total_cmp(&angle(b)).then(a.cmp(&b)));
    let mut routes: Vec<Route> = Vec::new();
    let mut current = Route::level1(vec![], vec![]);
    for s in sats {
        let mut left = through[s - 1];
        while left > 0 {
            let take = left.min(q1 - current.load);
            current.visits.push(s);
            current.deliveries.push(take);
            current.load += take;
            left -= take;
            if current.load == q1 {
                routes.push(std::mem::replace(&mut current, Route::level1(vec![], vec![])));
            }
        }
    }
    if !current.visits.is_empty() {
        routes.push(current);
    }
    inst.fleet
        .level1_count
        .allows(routes.len() as u64)
        .then_some(routes)
}

/// Relocate and swap of level-1 visits between trucks, first improvement.
fn improve_first_level<T: Scalar>(inst: &Instance<T>, routes: &mut Vec<Route>, eps: T) {
    let q1 = inst.fleet.level1_capacity;
    loop {
        let mut improved = false;
        for r in routes.iter_mut() {
            improved |= two_opt(inst, r);
        }
        'scan: for a in 0..routes.len() {
            for pa in 0..routes[a].visits.len() {
                let (s, q) = (routes[a].visits[pa], routes[a].deliveries[pa]);
                let mut wa = routes[a].visits.clone();
                wa.remove(pa);
                let old_a = l1_cost(inst, &routes[a].visits);
                let new_a = l1_cost(inst, &wa);
                for b in 0..routes.len() {
                    if b == a {
                        continue;
                    }
                    let rb = &routes[b];
                    let old_b = l1_cost(inst, &rb.visits);
                    // relocate
                    if rb.load + q <= q1 && !rb.visits.contains(&s) {
                        for pb in 0..=rb.visits.len() {
                            let mut wb = rb.visits.clone();
                            wb.insert(pb, s);
                            let delta = new_a + l1_cost(inst, &wb) - old_a - old_b;
                            if delta < -eps {
                                let rb = &mut routes[b];
                                rb.visits.insert(pb, s);
                                rb.deliveries.insert(pb, q);
                                rb.load += q;
                                let ra = &mut routes[a];
                                ra.visits.remove(pa);
                                ra.deliveries.remove(pa);
                                ra.load -= q;
                                routes.retain(|r| !r.visits.is_empty());
                                improved = true;
                                break 'scan;
                            }
                        }
                    }
                    // swap
                    for pb in 0..rb.visits.len() {
                        let (t, qt) = (rb.visits[pb], rb.deliveries[pb]);
                        if routes[a].load - q + qt > q1 || rb.load - qt + q > q1 {
                            continue;
                        }
                        if t == s || routes[a].visits.contains(&t) || rb.visits.contains(&s) {
                            continue;
                        }
                        let mut va = routes[a].visits.clone();
                        va[pa] = t;
                        let mut vb = rb.visits.clone();
                        vb[pb] = s;
                        let delta = l1_cost(inst, &va) + l1_cost(inst, &vb) - old_a - old_b;
                        if delta < -eps {
                            routes[a].visits[pa] = t;
                            routes[a].deliveries[pa] = qt;
                            routes[a].load = routes[a].load - q + qt;
                            routes[b].visits[pb] = s;
                            routes[b].deliveries[pb] = q;
                            routes[b].load = routes[b].load - qt + q;
                            improved = true;
                            break 'scan;
                        }
                    }
                }
            }
        }
        if !improved {
            return;
        }
    }
}

/// Rebuilds all level-1 routes from the current satellite throughputs.
///
/// Throughput above a truckload becomes dedicated full-load shuttles; the
/// residuals are inserted in random order at their cheapest position, then
/// improved with 2-opt, relocate and swap. If the trucks run out, the
/// residuals are retried by decreasing quantity, and finally packed with a
/// split next-fit.
pub fn rebuild_first_level<T: Scalar, R: Rng + ?Sized>(
    inst: &Instance<T>,
    sol: &mut Solution<T>,
    rng: &mut R,
) -> Result<()> {
    let eps = improvement_eps(inst);
    let (shuttles, mut items) = first_level_items(inst, sol);
    if !inst.fleet.level1_count.allows(shuttles.len() as u64) {
        return Err(Error::LevelOneInfeasible);
    }
    items.shuffle(rng);
    let mut routes = shuttles.clone();
    if !insert_items(inst, &mut routes, &items) {
        items.sort_by_key(|&(s, q)| (std::cmp::Reverse(q), s));
        routes = shuttles;
        if !insert_items(inst, &mut routes, &items) {
            if inst.variant == Variant::TwoELrpSd {
                return Err(Error::LevelOneInfeasible);
            }
            routes = next_fit(inst, &satellite_throughput(inst, sol)).ok_or(Error::LevelOneInfeasible)?;
        }
    }
    improve_first_level(inst, &mut routes, eps);
    sol.level1_routes = routes;
    sol.invalidate();
    Ok(())
}

/// Outcome of one solver run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub seed: u64,
    pub cost: f64,
    /// Seconds for the whole call, preprocessing included.
    pub wall_time: f64,
    /// Seconds until the returned solution was first found.
    pub time_to_best: f64,
    pub iterations: u64,
    pub restarts: u64,
    pub unrepairable: u64,
    /// Iterations at which a satellite operator fired.
    pub mask_change_iterations: Vec<u64>,
    /// `(iteration, seconds, cost)` each time the best solution improved.
    pub best_trace: Vec<(u64, f64, f64)>,
    pub params: Params,
}

fn construct<T: Scalar, R: Rng + ?Sized>(
    inst: &Instance<T>,
    params: &Params,
    gran: &Granular,
    rng: &mut R,
) -> Result<Solution<T>> {
    let mut last = Error::InfeasibleInstance("no attempt made".into());
    for _ in 0..20 {
        let mut sol = Solution::empty(inst);
        let mut pool: Vec<NodeId> = inst.customer_nodes().collect();
        if let Err(e) = repair(inst, &mut sol, &mut pool, rng) {
            last = e;
            continue;
        }
        local_search(inst, &mut sol, params, gran);
        match rebuild_first_level(inst, &mut sol, rng) {
            Ok(()) => {
                sol.cost(inst);
                return Ok(sol);
            }
            Err(e) => last = e,
        }
    }
    Err(Error::InfeasibleInstance(format!("no initial solution: {last}")))
}

/// One destroy / repair / improve / rebuild step on a copy of `current`.
/// Returns the candidate, or `None` if it could not be repaired, plus
/// whether a satellite operator fired.
fn iterate<T: Scalar, R: Rng + ?Sized>(
    inst: &Instance<T>,
    current: &Solution<T>,
    params: &Params,
    gran: &Granular,
    gated: bool,
    rng: &mut R,
) -> (Option<Solution<T>>, bool) {
    let mut temp = current.clone();
    temp.level1_routes.clear();
    temp.invalidate();
    let mut pool = Vec::new();
    destroy_routine(inst, &mut temp, &mut pool, params, rng);
    let mut fired = false;
    if gated {
        if params.enabled(Toggle::Close) {
            fired = close_satellite(inst, &mut temp, &mut pool, params, rng);
        }
        if !fired && params.enabled(Toggle::Open) {
            fired = open_all_satellites(&mut temp, params, rng);
        }
    }
    if repair(inst, &mut temp, &mut pool, rng).is_err() {
        return (None, fired);
    }
    local_search(inst, &mut temp, params, gran);
    if rebuild_first_level(inst, &mut temp, rng).is_err() {
        return (None, fired);
    }
    temp.cost(inst);
    (Some(temp), fired)
}

/// Runs the search until the time budget (or the optional iteration cap)
/// is exhausted and returns the best solution found.
pub fn solve<T: Scalar>(inst: &Instance<T>, params: &Params) -> Result<(Solution<T>, RunReport)> {
    let start = Instant::now();
    params.validate()?;
    let errors: Vec<String> = inst
        .validate()
        .into_iter()
        .filter(|d| d.severity == Severity::Error)
        .map(|d| d.message)
        .collect();
    if !errors.is_empty() {
        return Err(Error::InfeasibleInstance(errors.join("; ")));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let gran = Granular::new(inst, params.tau);
    let tol = improvement_eps(inst) / inst.objective_scale;

    let mut current = construct(inst, params, &gran, &mut rng)?;
    let mut best = current.clone();
    let mut best_cost = best.cost(inst);
    let mut report = RunReport {
        seed: params.seed,
        cost: best_cost.as_f64(),
        wall_time: 0.0,
        time_to_best: start.elapsed().as_secs_f64(),
        iterations: 0,
        restarts: 0,
        unrepairable: 0,
        mask_change_iterations: Vec::new(),
        best_trace: vec![(0, start.elapsed().as_secs_f64(), best_cost.as_f64())],
        params: params.clone(),
    };

    let out_of_budget = |it: u64| {
        start.elapsed() >= params.time_max || params.max_iterations.is_some_and(|m| it >= m)
    };
    let mut g: u64 = 0;
    'outer: while !out_of_budget(report.iterations) {
        let best_at_start = best_cost;
        let mut i: u64 = 0;
        while i < params.i_max {
            if out_of_budget(report.iterations) {
                break 'outer;
            }
            report.iterations += 1;
            let (temp, fired) = iterate(inst, &current, params, &gran, g > params.g_max, &mut rng);
            if fired {
                g = 0;
                report.mask_change_iterations.push(report.iterations);
            }
            match temp {
                Some(mut temp) => {
                    let c = temp.cost(inst);
                    if c < current.cost(inst) - tol {
                        current = temp;
                        i = 0;
                        if c < best_cost - tol {
                            best = current.clone();
                            best_cost = c;
                            let now = start.elapsed().as_secs_f64();
                            report.time_to_best = now;
                            report.best_trace.push((report.iterations, now, c.as_f64()));
                        }
                    } else {
                        i += 1;
                    }
                }
                None => {
                    report.unrepairable += 1;
                    i += 1;
                }
            }
            g += 1;
        }
        if best_cost >= best_at_start && params.enabled(Toggle::Restart) {
            current = construct(inst, params, &gran, &mut rng)?;
            report.restarts += 1;
        }
    }

    report.cost = best_cost.as_f64();
    report.wall_time = start.elapsed().as_secs_f64();
    Ok((best, report))
}

/// Convenience wrapper with an explicit budget and seed.
pub fn solve_for<T: Scalar>(
    inst: &Instance<T>,
    time: Duration,
    seed: u64,
) -> Result<(Solution<T>, RunReport)> {
    let params = Params {
        time_max: time,
        seed,
        ..Params::default()
    };
    solve(inst, &params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{Customer, DistanceConvention, Fleet, InstanceData, Limit, Point, Satellite};
    use crate::solution::{check_feasibility, evaluate};

    fn one_sat(demands: &[u64], q1: u64, v1: u64) -> Instance<f64> {
        Instance::new(InstanceData {
            name: "lns".into(),
            variant: Variant::TwoEVrp,
            depot: Point::new(0.0, 0.0),
            satellites: vec![Satellite {
                coord: Point::new(3.0, 4.0),
                handling_cost: 0.0,
                opening_cost: 0.0,
                capacity: Limit::Unbounded,
                max_city_freighters: Limit::Unbounded,
            }],
            customers: demands
                .iter()
                .enumerate()
                .map(|(i, &d)| Customer {
                    coord: Point::new(3.0 + i as f64, 5.0),
                    demand: d,
                })
                .collect(),
            fleet: Fleet {
                level1_count: Limit::Finite(v1),
                level1_capacity: q1,
                level1_fixed_cost: 0.0,
                level1_dist_multiplier: 1.0,
                level2_count: Limit::Finite(10),
                level2_capacity: 500,
                level2_fixed_cost: 0.0,
            },
            distance: DistanceConvention::EUCLIDEAN,
            per_satellite_cf_limit_active: false,
            objective_scale: 1.0,
            notes: vec![],
        })
        .unwrap()
    }

    #[test]
    fn virtual_duplication() {
        let inst = one_sat(&[300, 300, 300], 400, 3);
        let mut sol = Solution::empty(&inst);
        sol.level2_routes.push(Route::level2(&inst, 1, vec![2, 3, 4]));
        let (shuttles, items) = first_level_items(&inst, &sol);
        assert_eq!(shuttles.len(), 2);
        assert!(shuttles.iter().all(|r| r.load == 400));
        assert_eq!(items, vec![(1, 100)]);

        let inst = one_sat(&[200, 200], 400, 3);
        let mut sol = Solution::empty(&inst);
        sol.level2_routes.push(Route::level2(&inst, 1, vec![2, 3]));
        let (shuttles, items) = first_level_items(&inst, &sol);
        assert_eq!(shuttles.len(), 1);
        assert!(items.is_empty());
    }

    #[test]
    fn rebuild_is_feasible() {
        let inst = one_sat(&[300, 300, 300], 400, 3);
        let mut sol = Solution::empty(&inst);
        sol.level2_routes.push(Route::level2(&inst, 1, vec![2]));
        sol.level2_routes.push(Route::level2(&inst, 1, vec![3]));
        sol.level2_routes.push(Route::level2(&inst, 1, vec![4]));
        rebuild_first_level(&inst, &mut sol, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert!(check_feasibility(&inst, &sol).is_empty());
        assert_eq!(sol.level1_routes.len(), 3);
    }

    #[test]
    fn rebuild_fails_without_trucks() {
        let inst = one_sat(&[300, 300, 300], 400, 2);
        let mut sol = Solution::empty(&inst);
        sol.level2_routes.push(Route::level2(&inst, 1, vec![2, 3, 4]));
        assert!(matches!(
            rebuild_first_level(&inst, &mut sol, &mut ChaCha8Rng::seed_from_u64(0)),
            Err(Error::LevelOneInfeasible)
        ));
    }

    #[test]
    fn zero_budget_returns_initial() {
        let inst = one_sat(&[10, 20, 30], 400, 2);
        let params = Params {
            time_max: Duration::ZERO,
            ..Params::default()
        };
        let (sol, report) = solve(&inst, &params).unwrap();
        assert_eq!(report.iterations, 0);
        assert!(check_feasibility(&inst, &sol).is_empty());
        assert_eq!(report.cost, evaluate(&inst, &sol));
    }

    #[test]
    fn single_customer_closed_form() {
        let inst = one_sat(&[10], 400, 1);
        let (sol, report) = solve_for(&inst, Duration::from_millis(50), 1).unwrap();
        // 2·|depot, satellite| + 2·|satellite, customer|
        assert!((report.cost - (2.0 * 5.0 + 2.0 * 1.0)).abs() < 1e-9);
        assert!(check_feasibility(&inst, &sol).is_empty());
    }

    #[test]
    fn seeded_runs_repeat() {
        let inst = one_sat(&[10, 20, 30, 40, 50, 60, 70], 100, 5);
        let params = Params {
            max_iterations: Some(300),
            time_max: Duration::from_secs(30),
            seed: 7,
            ..Params::default()
        };
        let (a, ra) = solve(&inst, &params).unwrap();
        let (b, rb) = solve(&inst, &params).unwrap();
        assert_eq!(a.level2_routes, b.level2_routes);
        assert_eq!(a.level1_routes, b.level1_routes);
        assert_eq!(ra.cost, rb.cost);
        assert_eq!(ra.iterations, 300);
    }
}
