//! Second-level destroy operators and the randomised cheapest-insertion repair.
//!
//! Every destroy operator moves customers from `sol` into `pool`; [`repair`]
//! puts them back.

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::{index, SliceRandom};
use rand::Rng;

use crate::error::{Error, Result};
use crate::instance::{Instance, Limit, NodeId};
use crate::params::Params;
use crate::scalar::Scalar;
use crate::solution::{Route, Solution};

/// Customers currently in routes, in route order.
pub fn routed_customers<T: Scalar>(sol: &Solution<T>) -> Vec<NodeId> {
    sol.level2_routes
        .iter()
        .flat_map(|r| r.visits.iter().copied())
        .collect()
}

/// Removes the listed customers, drops emptied routes and appends the
/// customers to `pool` in list order.
pub fn remove_customers<T: Scalar>(
    inst: &Instance<T>,
    sol: &mut Solution<T>,
    pool: &mut Vec<NodeId>,
    customers: &[NodeId],
) {
    if customers.is_empty() {
        return;
    }
    let mut mark = vec![false; inst.n_nodes()];
    for &c in customers {
        mark[c] = true;
    }
    for r in &mut sol.level2_routes {
        r.visits.retain(|&c| !mark[c]);
        r.load = r.visits.iter().map(|&c| inst.demand(c)).sum();
    }
    sol.level2_routes.retain(|r| !r.visits.is_empty());
    sol.invalidate();
    pool.extend_from_slice(customers);
}

fn remove_routes<T: Scalar>(sol: &mut Solution<T>, pool: &mut Vec<NodeId>, mut which: Vec<usize>) {
    which.sort_unstable();
    let mut taken: Vec<Route> = which
        .iter()
        .rev()
        .map(|&r| sol.level2_routes.remove(r))
        .collect();
    taken.reverse();
    pool.extend(taken.into_iter().flat_map(|r| r.visits));
    sol.invalidate();
}

/// Upper bound on the related-removal count.
pub fn related_max<T: Scalar>(inst: &Instance<T>, p1: f64) -> usize {
    ((p1 * inst.n_customers() as f64).ceil() as usize).max(1)
}

/// Removes a random seed customer and its Euclidean-nearest routed
/// customers, `U[1, ⌈p1·|C|⌉]` customers in total.
pub fn related_node_removal<T: Scalar, R: Rng + ?Sized>(
    inst: &Instance<T>,
    sol: &mut Solution<T>,
    pool: &mut Vec<NodeId>,
    params: &Params,
    rng: &mut R,
) -> usize {
    let mut routed = routed_customers(sol);
    if routed.is_empty() {
        return 0;
    }
    let count = rng.gen_range(1..=related_max(inst, params.p1)).min(routed.len());
    let seed = routed[rng.gen_range(0..routed.len())];
    routed.sort_by(|&a, &b| {
        inst.euclid(seed, a)
            .partial_cmp(&inst.euclid(seed, b))
            .unwrap_or(std::cmp::Ordering::Equal)
            .then((a != seed).cmp(&(b != seed)))
            .then(a.cmp(&b))
    });
    let chosen: Vec<NodeId> = routed.into_iter().take(count).collect();
    remove_customers(inst, sol, pool, &chosen);
    count
}

/// Removal gain of every routed customer: `c_ij + c_jk - c_ik`.
pub fn removal_gains<T: Scalar>(inst: &Instance<T>, sol: &Solution<T>) -> Vec<(NodeId, f64)> {
    let mut out = Vec::with_capacity(sol.routed_customers());
    for r in &sol.level2_routes {
        for (p, &c) in r.visits.iter().enumerate() {
            let prev = if p == 0 { r.home } else { r.visits[p - 1] };
            let next = r.visits.get(p + 1).copied().unwrap_or(r.home);
            let gain = inst.d2(prev, c) + inst.d2(c, next) - inst.d2(prev, next);
            out.push((c, gain.as_f64().max(0.0)));
        }
    }
    out
}

/// Picks an index with probability proportional to its weight; uniform when
/// all weights vanish.
pub fn weighted_pick<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    match WeightedIndex::new(weights) {
        Ok(dist) => dist.sample(rng),
        Err(_) => rng.gen_range(0..weights.len()),
    }
}

/// Removes `⌊u·|C|⌋` customers, `u ~ U[0, p2]`, each drawn with probability
/// proportional to its current removal gain.
pub fn biased_node_removal<T: Scalar, R: Rng + ?Sized>(
    inst: &Instance<T>,
    sol: &mut Solution<T>,
    pool: &mut Vec<NodeId>,
    params: &Params,
    rng: &mut R,
) -> usize {
    let u: f64 = if params.p2 > 0.0 {
        rng.gen_range(0.0..=params.p2)
    } else {
        0.0
    };
    let count = (u * inst.n_customers() as f64).floor() as usize;
    let mut removed = 0;
    while removed < count {
        let gains = removal_gains(inst, sol);
        if gains.is_empty() {
            break;
        }
        let weights: Vec<f64> = gains.iter().map(|g| g.1).collect();
        let c = gains[weighted_pick(&weights, rng)].0;
        remove_customers(inst, sol, pool, &[c]);
        removed += 1;
    }
    removed
}

/// Upper end of the route-removal interval, `⌈p3·Σd/Q²⌉`.
pub fn route_removal_max<T: Scalar>(inst: &Instance<T>, p3: f64) -> usize {
    (p3 * inst.total_demand() as f64 / inst.fleet.level2_capacity as f64).ceil() as usize
}

/// Removes `min(k, #routes)` random routes, `k ~ U{0..⌈p3·Σd/Q²⌉}`.
pub fn random_route_removal<T: Scalar, R: Rng + ?Sized>(
    inst: &Instance<T>,
    sol: &mut Solution<T>,
    pool: &mut Vec<NodeId>,
    params: &Params,
    rng: &mut R,
) -> usize {
    let k = rng.gen_range(0..=route_removal_max(inst, params.p3));
    let k = k.min(sol.level2_routes.len());
    if k == 0 {
        return 0;
    }
    let which = index::sample(rng, sol.level2_routes.len(), k).into_vec();
    remove_routes(sol, pool, which);
    k
}

/// With probability `p̂4`, removes every single-customer route.
pub fn remove_single_node_routes<T: Scalar, R: Rng + ?Sized>(
    sol: &mut Solution<T>,
    pool: &mut Vec<NodeId>,
    params: &Params,
    rng: &mut R,
) -> usize {
    if !rng.gen_bool(params.p4_hat) {
        return 0;
    }
    let which: Vec<usize> = (0..sol.level2_routes.len())
        .filter(|&r| sol.level2_routes[r].visits.len() == 1)
        .collect();
    let n = which.len();
    remove_routes(sol, pool, which);
    n
}

/// Whether the open satellites other than `s` can still absorb all demand.
pub fn can_close<T: Scalar>(inst: &Instance<T>, sol: &Solution<T>, s: NodeId) -> bool {
    let others: Vec<NodeId> = sol.open_satellite_nodes().filter(|&o| o != s).collect();
    if others.is_empty() {
        return false;
    }
    let cap = others
        .iter()
        .map(|&o| match inst.variant {
            crate::instance::Variant::TwoEVrp => inst.cf_limit(o).times(inst.fleet.level2_capacity),
            crate::instance::Variant::TwoELrpSd => inst.satellite_capacity(o).times(1),
        })
        .fold(0u64, u64::saturating_add);
    cap >= inst.total_demand()
}

/// With probability `p̂5`, closes a random open satellite and pools its
/// customers. Returns whether a satellite was closed. The caller gates this
/// on the grace period.
pub fn close_satellite<T: Scalar, R: Rng + ?Sized>(
    inst: &Instance<T>,
    sol: &mut Solution<T>,
    pool: &mut Vec<NodeId>,
    params: &Params,
    rng: &mut R,
) -> bool {
    if !rng.gen_bool(params.p5_hat) {
        return false;
    }
    let open: Vec<NodeId> = sol.open_satellite_nodes().collect();
    let Some(&s) = open.choose(rng) else {
        return false;
    };
    if !can_close(inst, sol, s) {
        return false;
    }
    sol.open_satellites[s - 1] = false;
    let which: Vec<usize> = (0..sol.level2_routes.len())
        .filter(|&r| sol.level2_routes[r].home == s)
        .collect();
    remove_routes(sol, pool, which);
    sol.level1_routes.retain(|r| !r.visits.contains(&s));
    true
}

/// With probability `p̂5/|S|`, marks every satellite open. Returns whether
/// the operator fired.
pub fn open_all_satellites<T: Scalar, R: Rng + ?Sized>(
    sol: &mut Solution<T>,
    params: &Params,
    rng: &mut R,
) -> bool {
    let p = params.p5_hat / sol.open_satellites.len().max(1) as f64;
    if !rng.gen_bool(p.clamp(0.0, 1.0)) {
        return false;
    }
    sol.open_satellites.iter_mut().for_each(|o| *o = true);
    sol.invalidate();
    true
}

/// Where a customer goes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InsertionPoint {
    Existing { route: usize, position: usize },
    NewRoute { satellite: NodeId },
}

/// Per-satellite bookkeeping for fast feasibility checks during insertion.
struct Slack {
    through: Vec<u64>,
    count: Vec<u64>,
    l1_visited: Vec<bool>,
    routes: u64,
}

impl Slack {
    fn new<T: Scalar>(inst: &Instance<T>, sol: &Solution<T>) -> Self {
        let n = inst.n_satellites();
        let mut s = Slack {
            through: vec![0; n],
            count: vec![0; n],
            l1_visited: vec![false; n],
            routes: sol.level2_routes.len() as u64,
        };
        for r in &sol.level2_routes {
            s.through[r.home - 1] += r.load;
            s.count[r.home - 1] += 1;
        }
        for r in &sol.level1_routes {
            for &v in &r.visits {
                s.l1_visited[v - 1] = true;
            }
        }
        s
    }

    fn fits_satellite<T: Scalar>(&self, inst: &Instance<T>, s: NodeId, extra: u64) -> bool {
        match inst.satellite_capacity(s) {
            Limit::Unbounded => true,
            Limit::Finite(k) => self.through[s - 1] + extra <= k,
        }
    }

    fn can_open_route<T: Scalar>(&self, inst: &Instance<T>, s: NodeId) -> bool {
        inst.fleet.level2_count.allows(self.routes + 1) && inst.cf_limit(s).allows(self.count[s - 1] + 1)
    }
}

fn best_insertion_with<T: Scalar>(
    inst: &Instance<T>,
    sol: &Solution<T>,
    slack: &Slack,
    c: NodeId,
) -> Option<(InsertionPoint, T)> {
    let d = inst.demand(c);
    let q2 = inst.fleet.level2_capacity;
    let mut best: Option<(InsertionPoint, T)> = None;
    let mut offer = |p: InsertionPoint, cost: T| {
        if best.is_none_or(|(_, b)| cost < b) {
            best = Some((p, cost));
        }
    };
    for (ri, r) in sol.level2_routes.iter().enumerate() {
        if !sol.is_open(r.home) || r.load + d > q2 || !slack.fits_satellite(inst, r.home, d) {
            continue;
        }
        let handling = inst.satellite(r.home).handling_cost * T::of_u64(d);
        let mut prev = r.home;
        for p in 0..=r.visits.len() {
            let next = r.visits.get(p).copied().unwrap_or(r.home);
            let delta = inst.d2(prev, c) + inst.d2(c, next) - inst.d2(prev, next) + handling;
            offer(
                InsertionPoint::Existing {
                    route: ri,
                    position: p,
                },
                delta,
            );
            prev = next;
        }
    }
    if d <= q2 {
        for s in sol.open_satellite_nodes() {
            if !slack.can_open_route(inst, s) || !slack.fits_satellite(inst, s, d) {
                continue;
            }
            let sat = inst.satellite(s);
            let mut delta = inst.fleet.level2_fixed_cost
                + inst.d2(s, c)
                + inst.d2(c, s)
                + sat.handling_cost * T::of_u64(d);
            if slack.count[s - 1] == 0 && !slack.l1_visited[s - 1] {
                delta += sat.opening_cost;
            }
            offer(InsertionPoint::NewRoute { satellite: s }, delta);
        }
    }
    best
}

/// Cheapest feasible insertion of `c` over all routes at open satellites
/// and all new routes the fleet limits allow. Ties go to the first
/// candidate in scan order (routes, then positions, then new routes).
pub fn best_insertion<T: Scalar>(
    inst: &Instance<T>,
    sol: &Solution<T>,
    c: NodeId,
) -> Option<(InsertionPoint, T)> {
    best_insertion_with(inst, sol, &Slack::new(inst, sol), c)
}

fn insert_in_order<T: Scalar>(
    inst: &Instance<T>,
    sol: &mut Solution<T>,
    order: &[NodeId],
) -> std::result::Result<(), NodeId> {
    let mut slack = Slack::new(inst, sol);
    for &c in order {
        let (point, _) = best_insertion_with(inst, sol, &slack, c).ok_or(c)?;
        let d = inst.demand(c);
        match point {
            InsertionPoint::Existing { route, position } => {
                let r = &mut sol.level2_routes[route];
                r.visits.insert(position, c);
                r.load += d;
                slack.through[r.home - 1] += d;
            }
            InsertionPoint::NewRoute { satellite } => {
                sol.level2_routes.push(Route::level2(inst, satellite, vec![c]));
                slack.through[satellite - 1] += d;
                slack.count[satellite - 1] += 1;
                slack.routes += 1;
            }
        }
    }
    Ok(())
}

/// Reinserts every pooled customer at its cheapest feasible position, in
/// random order. If some customer cannot be placed, the whole repair is
/// redone from the destroyed state with the pool sorted by decreasing
/// demand. Repair never reopens closed satellites.
pub fn repair<T: Scalar, R: Rng + ?Sized>(
    inst: &Instance<T>,
    sol: &mut Solution<T>,
    pool: &mut Vec<NodeId>,
    rng: &mut R,
) -> Result<()> {
    if pool.is_empty() {
        return Ok(());
    }
    sol.invalidate();
    let destroyed = sol.level2_routes.clone();
    pool.shuffle(rng);
    if insert_in_order(inst, sol, pool).is_ok() {
        pool.clear();
        return Ok(());
    }
    sol.level2_routes = destroyed;
    pool.sort_by_key(|&c| std::cmp::Reverse(inst.demand(c)));
    match insert_in_order(inst, sol, pool) {
        Ok(()) => {
            pool.clear();
            Ok(())
        }
        Err(customer) => Err(Error::Unrepairable { customer }),
    }
}

/// Runs the per-iteration destroy operators in their fixed order, honouring
/// the toggles. Satellite operators are left to the caller.
pub fn destroy_routine<T: Scalar, R: Rng + ?Sized>(
    inst: &Instance<T>,
    sol: &mut Solution<T>,
    pool: &mut Vec<NodeId>,
    params: &Params,
    rng: &mut R,
) {
    use crate::params::Toggle;
    if params.enabled(Toggle::Related) {
        related_node_removal(inst, sol, pool, params, rng);
    }
    if params.enabled(Toggle::Biased) {
        biased_node_removal(inst, sol, pool, params, rng);
    }
    if params.enabled(Toggle::Route) {
        random_route_removal(inst, sol, pool, params, rng);
    }
    if params.enabled(Toggle::Single) {
        remove_single_node_routes(sol, pool, params, rng);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{Customer, DistanceConvention, Fleet, InstanceData, Point, Satellite, Variant};
    use crate::solution::{check_feasibility, ViolationKind};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn line_instance(n: usize, sats: usize) -> Instance<f64> {
        Instance::new(InstanceData {
            name: "line".into(),
            variant: Variant::TwoEVrp,
            depot: Point::new(0.0, 0.0),
            satellites: (0..sats)
                .map(|i| Satellite {
                    coord: Point::new(10.0 * i as f64, 1.0),
                    handling_cost: 0.0,
                    opening_cost: 0.0,
                    capacity: Limit::Unbounded,
                    max_city_freighters: Limit::Unbounded,
                })
                .collect(),
            customers: (0..n)
                .map(|i| Customer {
                    coord: Point::new(i as f64, 2.0 + (i % 3) as f64),
                    demand: 1 + (i as u64 % 4),
                })
                .collect(),
            fleet: Fleet {
                level1_count: Limit::Finite(10),
                level1_capacity: 100,
                level1_fixed_cost: 0.0,
                level1_dist_multiplier: 1.0,
                level2_count: Limit::Finite(10),
                level2_capacity: 10,
                level2_fixed_cost: 0.0,
            },
            distance: DistanceConvention::EUCLIDEAN,
            per_satellite_cf_limit_active: false,
            objective_scale: 1.0,
            notes: vec![],
        })
        .unwrap()
    }

    fn constructed(inst: &Instance<f64>, seed: u64) -> Solution<f64> {
        let mut sol = Solution::empty(inst);
        let mut pool: Vec<NodeId> = inst.customer_nodes().collect();
        repair(inst, &mut sol, &mut pool, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        sol
    }

    #[test]
    fn empty_pool_is_noop() {
        let inst = line_instance(5, 1);
        let mut sol = constructed(&inst, 1);
        let before = sol.level2_routes.clone();
        repair(&inst, &mut sol, &mut vec![], &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert_eq!(before, sol.level2_routes);
    }

    #[test]
    fn single_customer_gets_a_new_route() {
        let inst = line_instance(1, 1);
        let sol = constructed(&inst, 3);
        assert_eq!(sol.level2_routes, vec![Route::level2(&inst, 1, vec![2])]);
    }

    #[test]
    fn repair_covers_everyone() {
        let inst = line_instance(12, 2);
        for seed in 0..20 {
            let sol = constructed(&inst, seed);
            let v = check_feasibility(&inst, &sol);
            assert!(v.iter().all(|v| v.kind == ViolationKind::FlowBalance), "{v:?}");
        }
    }

    #[test]
    fn related_count_bounds() {
        let inst = line_instance(21, 1);
        let base = constructed(&inst, 0);
        let params = Params::default();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut seen = [false; 6];
        for _ in 0..2000 {
            let mut sol = base.clone();
            let mut pool = vec![];
            let n = related_node_removal(&inst, &mut sol, &mut pool, &params, &mut rng);
            assert!((1..=5).contains(&n));
            assert_eq!(pool.len(), n);
            seen[n] = true;
        }
        assert!(seen[1..=5].iter().all(|&s| s));

        let zero = Params { p1: 0.0, ..Params::default() };
        let mut sol = base.clone();
        let mut pool = vec![];
        assert_eq!(related_node_removal(&inst, &mut sol, &mut pool, &zero, &mut rng), 1);
    }

    #[test]
    fn related_removes_nearest() {
        let inst = line_instance(10, 1);
        let base = constructed(&inst, 0);
        let params = Params { p1: 1.0, ..Params::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let mut sol = base.clone();
            let mut pool = vec![];
            related_node_removal(&inst, &mut sol, &mut pool, &params, &mut rng);
            let seed = pool[0];
            let far = pool.iter().map(|&c| inst.euclid(seed, c)).fold(0.0, f64::max);
            for c in routed_customers(&sol) {
                assert!(inst.euclid(seed, c) >= far);
            }
        }
    }

    #[test]
    fn degenerate_weights() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            assert_eq!(weighted_pick(&[0.0, 0.0, 4.0], &mut rng), 2);
        }
        let mut hits = [0usize; 3];
        for _ in 0..3000 {
            hits[weighted_pick(&[0.0, 0.0, 0.0], &mut rng)] += 1;
        }
        assert!(hits.iter().all(|&h| h > 800));
    }

    #[test]
    fn route_removal_interval() {
        let mut inst = line_instance(3, 1).into_data();
        inst.customers[0].demand = 20206 - 2;
        inst.customers[1].demand = 1;
        inst.customers[2].demand = 1;
        inst.fleet.level2_capacity = 5000;
        let inst = Instance::new(inst).unwrap();
        assert_eq!(route_removal_max(&inst, 0.25), 2);
    }

    #[test]
    fn single_route_removal() {
        let inst = line_instance(4, 1);
        let mut sol = Solution::empty(&inst);
        sol.level2_routes.push(Route::level2(&inst, 1, (2..6).collect()));
        let params = Params { p3: 1.0, ..Params::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        loop {
            let mut s = sol.clone();
            let mut pool = vec![];
            if random_route_removal(&inst, &mut s, &mut pool, &params, &mut rng) > 0 {
                assert!(s.level2_routes.is_empty());
                assert_eq!(pool, vec![2, 3, 4, 5]);
                break;
            }
        }
    }

    #[test]
    fn singletons() {
        let inst = line_instance(4, 1);
        let mut sol = Solution::empty(&inst);
        sol.level2_routes.push(Route::level2(&inst, 1, vec![2]));
        sol.level2_routes.push(Route::level2(&inst, 1, vec![3, 4]));
        sol.level2_routes.push(Route::level2(&inst, 1, vec![5]));
        let always = Params { p4_hat: 1.0, ..Params::default() };
        let mut pool = vec![];
        let n = remove_single_node_routes(&mut sol, &mut pool, &always, &mut ChaCha8Rng::seed_from_u64(0));
        assert_eq!(n, 2);
        assert_eq!(pool, vec![2, 5]);
        assert_eq!(sol.level2_routes.len(), 1);
    }

    #[test]
    fn close_then_open() {
        let inst = line_instance(6, 2);
        let base = constructed(&inst, 4);
        let always = Params { p5_hat: 1.0, ..Params::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut sol = base.clone();
        let mut pool = vec![];
        assert!(close_satellite(&inst, &mut sol, &mut pool, &always, &mut rng));
        let closed = sol.open_satellites.iter().position(|&o| !o).unwrap() + 1;
        assert!(sol.level2_routes.iter().all(|r| r.home != closed));
        assert_eq!(pool.len() + sol.routed_customers(), 6);
        // last open satellite cannot be closed
        assert!(!close_satellite(&inst, &mut sol, &mut pool, &always, &mut rng));
        let all = Params { p5_hat: 1.0, ..Params::default() };
        let mut fired = false;
        for _ in 0..100 {
            fired |= open_all_satellites(&mut sol, &all, &mut rng);
        }
        assert!(fired);
        assert!(sol.open_satellites.iter().all(|&o| o));
    }
}
