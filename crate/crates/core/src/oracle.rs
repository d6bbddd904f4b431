//! Exhaustive solver for tiny instances.
//!
//! Every partition of the customers into freighter routes is enumerated
//! together with every satellite assignment of the routes; each route is
//! sequenced by brute force. The first level is solved exactly within the
//! shape the heuristic builds: full-truckload shuttles plus one residual
//! delivery per satellite, with the residuals partitioned over trucks. When
//! no such partition fits the truck fleet, the split next-fit packing is
//! used instead, as in the heuristic.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::instance::{Instance, NodeId, Variant, DEPOT};
use crate::scalar::Scalar;
use crate::solution::{evaluate, Route, Solution};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TinyLimit {
    pub max_customers: usize,
    pub max_satellites: usize,
}

impl Default for TinyLimit {
    fn default() -> Self {
        TinyLimit {
            max_customers: 7,
            max_satellites: 3,
        }
    }
}

/// Shortest closed tour from `home` through all of `nodes`.
///
/// Tours are enumerated with the first visit smaller than the last, which
/// is lossless for symmetric distances.
pub fn best_tour<T: Scalar>(home: NodeId, nodes: &[NodeId], d: impl Fn(NodeId, NodeId) -> T) -> (T, Vec<NodeId>) {
    fn rec<T: Scalar>(
        home: NodeId,
        perm: &mut Vec<NodeId>,
        k: usize,
        d: &dyn Fn(NodeId, NodeId) -> T,
        best: &mut Option<(T, Vec<NodeId>)>,
    ) {
        let n = perm.len();
        if k == n {
            if n >= 2 && perm[0] > perm[n - 1] {
                return;
            }
            let mut prev = home;
            let mut len = T::zero();
            for &v in perm.iter() {
                len += d(prev, v);
                prev = v;
            }
            len += d(prev, home);
            if best.as_ref().is_none_or(|b| len < b.0) {
                *best = Some((len, perm.clone()));
            }
            return;
        }
        for i in k..n {
            perm.swap(k, i);
            rec(home, perm, k + 1, d, best);
            perm.swap(k, i);
        }
    }
    let mut perm = nodes.to_vec();
    perm.sort_unstable();
    let mut best = None;
    rec(home, &mut perm, 0, &d, &mut best);
    best.unwrap_or((T::zero(), Vec::new()))
}

/// All set partitions of `0..n`, as lists of blocks.
pub fn set_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    fn rec(i: usize, n: usize, blocks: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
        if i == n {
            out.push(blocks.clone());
            return;
        }
        for b in 0..blocks.len() {
            blocks[b].push(i);
            rec(i + 1, n, blocks, out);
            blocks[b].pop();
        }
        blocks.push(vec![i]);
        rec(i + 1, n, blocks, out);
        blocks.pop();
    }
    let mut out = Vec::new();
    rec(0, n, &mut Vec::new(), &mut out);
    out
}

fn truck_cost<T: Scalar>(inst: &Instance<T>, visits: &[NodeId]) -> T {
    let mut prev = DEPOT;
    let mut dist = T::zero();
    for &v in visits.iter().chain([&DEPOT]) {
        dist += inst.d1(prev, v);
        prev = v;
    }
    inst.fleet.level1_fixed_cost + inst.fleet.level1_dist_multiplier * dist
}

/// Trucks filled in turn with satellites sorted by polar angle around the
/// depot, a satellite's quantity spilling into the next truck.
fn split_packing<T: Scalar>(inst: &Instance<T>, through: &[u64]) -> Option<Vec<Route>> {
    let q1 = inst.fleet.level1_capacity;
    let angle = |s: NodeId| {
        let c = inst.coord(s);
        (c.y - inst.depot.y).atan2(c.x - inst.depot.x).as_f64()
    };
    let mut sats: Vec<NodeId> = inst.satellite_nodes().filter(|&s| through[s - 1] > 0).collect();
    sats.sort_by(|&a, &b| angle(a).total_cmp(&angle(b)).then(a.cmp(&b)));
    let mut trucks: Vec<(Vec<NodeId>, Vec<u64>)> = vec![(Vec::new(), Vec::new())];
    let mut room = q1;
    for s in sats {
        let mut left = through[s - 1];
        while left > 0 {
            if room == 0 {
                trucks.push((Vec::new(), Vec::new()));
                room = q1;
            }
            let take = left.min(room);
            let t = trucks.last_mut().expect("at least one truck");
            t.0.push(s);
            t.1.push(take);
            room -= take;
            left -= take;
        }
    }
    trucks.retain(|t| !t.0.is_empty());
    inst.fleet
        .level1_count
        .allows(trucks.len() as u64)
        .then(|| trucks.into_iter().map(|(v, q)| Route::level1(v, q)).collect())
}

/// Cheapest level-1 plan for given per-satellite throughputs and usage.
fn first_level<T: Scalar>(inst: &Instance<T>, through: &[u64], used: &[bool]) -> Option<(T, Vec<Route>)> {
    let q1 = inst.fleet.level1_capacity;
    let mut shuttles = Vec::new();
    let mut items: Vec<(NodeId, u64)> = Vec::new();
    for s in inst.satellite_nodes() {
        let d = through[s - 1];
        match inst.variant {
            Variant::TwoEVrp => {
                shuttles.extend((0..d / q1).map(|_| Route::level1(vec![s], vec![q1])));
                if !d.is_multiple_of(q1) {
                    items.push((s, d % q1));
                }
            }
            Variant::TwoELrpSd => {
                if used[s - 1] {
                    if d > q1 {
                        return None;
                    }
                    items.push((s, d));
                }
            }
        }
    }
    let base: T = shuttles.iter().fold(T::zero(), |acc, r| acc + truck_cost(inst, &r.visits));
    let mut best: Option<(T, Vec<Route>)> = None;
    for part in set_partitions(items.len()) {
        if !inst.fleet.level1_count.allows((shuttles.len() + part.len()) as u64) {
            continue;
        }
        if part.iter().any(|b| b.iter().map(|&i| items[i].1).sum::<u64>() > q1) {
            continue;
        }
        let mut cost = base;
        let mut routes = shuttles.clone();
        for block in &part {
            let sats: Vec<NodeId> = block.iter().map(|&i| items[i].0).collect();
            let (_, order) = best_tour(DEPOT, &sats, |a, b| inst.d1(a, b));
            cost += truck_cost(inst, &order);
            let q = order
                .iter()
                .map(|s| items.iter().find(|it| it.0 == *s).map_or(0, |it| it.1))
                .collect();
            routes.push(Route::level1(order, q));
        }
        if best.as_ref().is_none_or(|b| cost < b.0) {
            best = Some((cost, routes));
        }
    }
    if best.is_none() && inst.variant == Variant::TwoEVrp {
        let routes = split_packing(inst, through)?;
        let cost = routes.iter().fold(T::zero(), |acc, r| acc + truck_cost(inst, &r.visits));
        best = Some((cost, routes));
    }
    best
}

type Tour<T> = (T, Vec<NodeId>);
type Plan<T> = (T, Vec<Route>);
type PlanKey = (Vec<u64>, Vec<bool>);
type Incumbent<T> = (T, Vec<(usize, NodeId)>, Vec<Route>);

struct Search<'a, T: Scalar> {
    inst: &'a Instance<T>,
    /// `tours[mask][s - 1]`: best freighter tour over the customer subset.
    tours: Vec<Vec<Option<Tour<T>>>>,
    /// First-level plan keyed by satellite throughput and usage.
    l1: HashMap<PlanKey, Option<Plan<T>>>,
    /// Cost, block homes and first-level routes of the incumbent.
    best: Option<Incumbent<T>>,
}

impl<'a, T: Scalar> Search<'a, T> {
    fn leaf(&mut self, blocks: &[(usize, NodeId, u64)]) {
        let inst = self.inst;
        let ns = inst.n_satellites();
        let mut through = vec![0u64; ns];
        let mut used = vec![false; ns];
        let mut cost = T::zero();
        for &(mask, s, load) in blocks {
            let Some((len, _)) = &self.tours[mask][s - 1] else {
                return;
            };
            cost += inst.fleet.level2_fixed_cost + *len;
            through[s - 1] += load;
            used[s - 1] = true;
        }
        for s in inst.satellite_nodes() {
            if !inst.satellite_capacity(s).allows(through[s - 1]) {
                return;
            }
            let sat = inst.satellite(s);
            cost += sat.handling_cost * T::of_u64(through[s - 1]);
            if used[s - 1] {
                cost += sat.opening_cost;
            }
        }
        if let Some(b) = &self.best {
            if cost >= b.0 {
                return;
            }
        }
        let l1 = self
            .l1
            .entry((through.clone(), used.clone()))
            .or_insert_with(|| first_level(inst, &through, &used));
        let Some((l1_cost, l1_routes)) = l1 else {
            return;
        };
        let total = cost + *l1_cost;
        if self.best.as_ref().is_none_or(|b| total < b.0) {
            let assignment = blocks.iter().map(|&(m, s, _)| (m, s)).collect();
            self.best = Some((total, assignment, l1_routes.clone()));
        }
    }

    /// Places customer `i` into an existing block or a new block at some
    /// satellite; blocks are `(customer mask, satellite, load)`.
    fn rec(&mut self, i: usize, blocks: &mut Vec<(usize, NodeId, u64)>, per_sat: &mut [u64]) {
        let inst = self.inst;
        if i == inst.n_customers() {
            self.leaf(blocks);
            return;
        }
        let c = inst.customer_node(i);
        let d = inst.demand(c);
        for b in 0..blocks.len() {
            if blocks[b].2 + d > inst.fleet.level2_capacity {
                continue;
            }
            blocks[b].0 |= 1 << i;
            blocks[b].2 += d;
            self.rec(i + 1, blocks, per_sat);
            blocks[b].0 &= !(1 << i);
            blocks[b].2 -= d;
        }
        if d > inst.fleet.level2_capacity || !inst.fleet.level2_count.allows(blocks.len() as u64 + 1) {
            return;
        }
        for s in inst.satellite_nodes() {
            if !inst.cf_limit(s).allows(per_sat[s - 1] + 1) {
                continue;
            }
            per_sat[s - 1] += 1;
            blocks.push((1 << i, s, d));
            self.rec(i + 1, blocks, per_sat);
            blocks.pop();
            per_sat[s - 1] -= 1;
        }
    }
}

/// Optimal cost and one optimal solution, within [`TinyLimit::default`].
pub fn exact_solve<T: Scalar>(inst: &Instance<T>) -> Result<(T, Solution<T>)> {
    exact_solve_within(inst, TinyLimit::default())
}

pub fn exact_solve_within<T: Scalar>(inst: &Instance<T>, limit: TinyLimit) -> Result<(T, Solution<T>)> {
    let (m, ns) = (inst.n_customers(), inst.n_satellites());
    if m > limit.max_customers || ns > limit.max_satellites {
        return Err(Error::TooLarge(format!(
            "{m} customers and {ns} satellites exceed {} and {}",
            limit.max_customers, limit.max_satellites
        )));
    }
    let mut tours = vec![vec![None; ns]; 1 << m];
    for (mask, row) in tours.iter_mut().enumerate().skip(1) {
        let nodes: Vec<NodeId> = (0..m).filter(|i| mask >> i & 1 == 1).map(|i| inst.customer_node(i)).collect();
        let load: u64 = nodes.iter().map(|&c| inst.demand(c)).sum();
        if load > inst.fleet.level2_capacity {
            continue;
        }
        for s in inst.satellite_nodes() {
            row[s - 1] = Some(best_tour(s, &nodes, |a, b| inst.d2(a, b)));
        }
    }
    let mut search = Search {
        inst,
        tours,
        l1: HashMap::new(),
        best: None,
    };
    search.rec(0, &mut Vec::new(), &mut vec![0; ns]);
    let Some((_, assignment, l1_routes)) = search.best.take() else {
        return Err(Error::InfeasibleInstance("no feasible solution exists".into()));
    };

    let mut sol = Solution::empty(inst);
    for (mask, s) in assignment {
        let (_, order) = search.tours[mask][s - 1].clone().expect("assigned tours exist");
        sol.level2_routes.push(Route::level2(inst, s, order));
    }
    sol.level1_routes = l1_routes;
    sol.open_satellites = inst.satellite_nodes().map(|s| sol.is_used(s)).collect();
    let cost = evaluate(inst, &sol);
    Ok((cost, sol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{Customer, DistanceConvention, Fleet, InstanceData, Limit, Point, Satellite};
    use crate::solution::check_feasibility;

    fn sat(x: f64, y: f64, f: f64) -> Satellite<f64> {
        Satellite {
            coord: Point::new(x, y),
            handling_cost: 0.0,
            opening_cost: f,
            capacity: Limit::Unbounded,
            max_city_freighters: Limit::Unbounded,
        }
    }

    fn build(variant: Variant, sats: Vec<Satellite<f64>>, cust: &[(f64, f64, u64)], q2: u64, v2: u64) -> Instance<f64> {
        Instance::new(InstanceData {
            name: "tiny".into(),
            variant,
            depot: Point::new(0.0, 0.0),
            satellites: sats,
            customers: cust
                .iter()
                .map(|&(x, y, d)| Customer {
                    coord: Point::new(x, y),
                    demand: d,
                })
                .collect(),
            fleet: Fleet {
                level1_count: Limit::Unbounded,
                level1_capacity: 100,
                level1_fixed_cost: 0.0,
                level1_dist_multiplier: 1.0,
                level2_count: Limit::Finite(v2),
                level2_capacity: q2,
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
    fn collinear_single_customer() {
        let inst = build(Variant::TwoEVrp, vec![sat(1.0, 0.0, 0.0)], &[(2.0, 0.0, 1)], 10, 1);
        let (cost, sol) = exact_solve(&inst).unwrap();
        assert!((cost - 4.0).abs() < 1e-12);
        assert!(check_feasibility(&inst, &sol).is_empty());
    }

    #[test]
    fn far_satellite_stays_closed() {
        let inst = build(
            Variant::TwoELrpSd,
            vec![sat(1.0, 0.0, 5.0), sat(40.0, 40.0, 5.0)],
            &[(1.0, 1.0, 1), (2.0, 1.0, 1), (2.0, -1.0, 1), (0.0, 2.0, 1), (35.0, 38.0, 1)],
            10,
            5,
        );
        let (cost, sol) = exact_solve(&inst).unwrap();
        assert!(check_feasibility(&inst, &sol).is_empty());
        assert!((cost - evaluate(&inst, &sol)).abs() < 1e-9);
        assert_eq!(sol.open_satellite_nodes().count(), 1);
    }

    #[test]
    fn infeasible_and_too_large() {
        let inst = build(Variant::TwoEVrp, vec![sat(1.0, 0.0, 0.0)], &[(2.0, 0.0, 8), (3.0, 0.0, 8)], 10, 1);
        assert!(matches!(exact_solve(&inst), Err(Error::InfeasibleInstance(_))));
        let cust: Vec<_> = (0..8).map(|i| (i as f64, 1.0, 1)).collect();
        let inst = build(Variant::TwoEVrp, vec![sat(1.0, 0.0, 0.0)], &cust, 10, 8);
        assert!(matches!(exact_solve(&inst), Err(Error::TooLarge(_))));
    }

    #[test]
    fn partitions_are_bell_numbers() {
        let bell: Vec<usize> = (0..=6).map(|n| set_partitions(n).len()).collect();
        assert_eq!(bell, vec![1, 1, 2, 5, 15, 52, 203]);
    }

    #[test]
    fn tour_matches_square() {
        let pts: [(f64, f64); 4] = [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)];
        let d = |a: usize, b: usize| {
            let (p, q) = (pts[a], pts[b]);
            ((p.0 - q.0) * (p.0 - q.0) + (p.1 - q.1) * (p.1 - q.1)).sqrt()
        };
        let (len, order) = best_tour(0, &[1, 2, 3], d);
        assert!((len - 4.0).abs() < 1e-12);
        assert_eq!(order, vec![1, 3, 2]);
    }
}
