//! Routes on both levels, objective evaluation and feasibility checking.

mod io;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{Instance, Limit, NodeId, Variant, DEPOT};
use crate::scalar::Scalar;

pub use io::{parse_solution, write_solution};

/// One vehicle itinerary. The home node is implicit at both ends.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Route {
    pub level: u8,
    pub home: NodeId,
    pub visits: Vec<NodeId>,
    pub load: u64,
    /// Level 1 only: freight dropped at each visited satellite, parallel to
    /// `visits`.
    pub deliveries: Vec<u64>,
}

impl Route {
    pub fn level2<T: Scalar>(inst: &Instance<T>, home: NodeId, visits: Vec<NodeId>) -> Route {
        let load = visits.iter().map(|&c| inst.demand(c)).sum();
        Route {
            level: 2,
            home,
            visits,
            load,
            deliveries: Vec::new(),
        }
    }

    pub fn level1(visits: Vec<NodeId>, deliveries: Vec<u64>) -> Route {
        Route {
            level: 1,
            home: DEPOT,
            load: deliveries.iter().sum(),
            visits,
            deliveries,
        }
    }

    /// Freight this level-1 route drops at satellite `s`.
    pub fn delivered_to(&self, s: NodeId) -> u64 {
        self.visits
            .iter()
            .zip(&self.deliveries)
            .filter(|(&v, _)| v == s)
            .map(|(_, &q)| q)
            .sum()
    }

    /// Travel distance of the closed tour, without fixed costs or multipliers.
    pub fn distance<T: Scalar>(&self, inst: &Instance<T>) -> T {
        let d = |a, b| {
            if self.level == 1 {
                inst.d1(a, b)
            } else {
                inst.d2(a, b)
            }
        };
        let mut prev = self.home;
        let mut total = T::zero();
        for &v in &self.visits {
            total += d(prev, v);
            prev = v;
        }
        total + d(prev, self.home)
    }

    /// Route cost including the vehicle fixed cost and, on level 1, the
    /// distance multiplier.
    pub fn cost<T: Scalar>(&self, inst: &Instance<T>) -> T {
        if self.level == 1 {
            inst.fleet.level1_fixed_cost + inst.fleet.level1_dist_multiplier * self.distance(inst)
        } else {
            inst.fleet.level2_fixed_cost + self.distance(inst)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution<T> {
    pub instance_name: String,
    pub level1_routes: Vec<Route>,
    pub level2_routes: Vec<Route>,
    /// Satellites available to the search, indexed by satellite index.
    pub open_satellites: Vec<bool>,
    cached_cost: Option<T>,
}

impl<T: Scalar> Solution<T> {
    /// No routes, every satellite open.
    pub fn empty(inst: &Instance<T>) -> Self {
        Solution {
            instance_name: inst.name.clone(),
            level1_routes: Vec::new(),
            level2_routes: Vec::new(),
            open_satellites: vec![true; inst.n_satellites()],
            cached_cost: None,
        }
    }

    pub fn is_open(&self, s: NodeId) -> bool {
        self.open_satellites[s - 1]
    }

    pub fn open_satellite_nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.open_satellites
            .iter()
            .enumerate()
            .filter(|(_, &o)| o)
            .map(|(i, _)| i + 1)
    }

    /// Objective value, memoised until the next call to [`Solution::invalidate`].
    pub fn cost(&mut self, inst: &Instance<T>) -> T {
        match self.cached_cost {
            Some(c) => c,
            None => {
                let c = evaluate(inst, self);
                self.cached_cost = Some(c);
                c
            }
        }
    }

    pub fn cached_cost(&self) -> Option<T> {
        self.cached_cost
    }

    pub fn invalidate(&mut self) {
        self.cached_cost = None;
    }

    /// Route index and position of a routed customer.
    pub fn locate(&self, customer: NodeId) -> Option<(usize, usize)> {
        self.level2_routes.iter().enumerate().find_map(|(r, route)| {
            route
                .visits
                .iter()
                .position(|&v| v == customer)
                .map(|p| (r, p))
        })
    }

    pub fn routes_at(&self, s: NodeId) -> usize {
        self.level2_routes.iter().filter(|r| r.home == s).count()
    }

    /// Whether the satellite carries an opening cost: it hosts a level-2
    /// route or is visited by a truck.
    pub fn is_used(&self, s: NodeId) -> bool {
        self.level2_routes.iter().any(|r| r.home == s)
            || self.level1_routes.iter().any(|r| r.visits.contains(&s))
    }

    pub fn routed_customers(&self) -> usize {
        self.level2_routes.iter().map(|r| r.visits.len()).sum()
    }

    /// Removes a customer from its route, dropping the route if it empties.
    pub fn remove_customer(&mut self, inst: &Instance<T>, customer: NodeId) -> Result<(usize, usize)> {
        let (r, p) = self.locate(customer).ok_or(Error::NotRouted(customer))?;
        self.remove_at(r, p, inst.demand(customer));
        Ok((r, p))
    }

    pub(crate) fn remove_at(&mut self, r: usize, p: usize, demand: u64) {
        let route = &mut self.level2_routes[r];
        route.visits.remove(p);
        route.load -= demand;
        if route.visits.is_empty() {
            self.level2_routes.remove(r);
        }
        self.cached_cost = None;
    }

    pub fn insert_customer(
        &mut self,
        inst: &Instance<T>,
        customer: NodeId,
        route: usize,
        position: usize,
    ) -> Result<()> {
        let len = self
            .level2_routes
            .get(route)
            .ok_or(Error::IllegalPosition { route, position })?
            .visits
            .len();
        if position > len {
            return Err(Error::IllegalPosition { route, position });
        }
        if self.locate(customer).is_some() {
            return Err(Error::AlreadyRouted(customer));
        }
        let r = &mut self.level2_routes[route];
        r.visits.insert(position, customer);
        r.load += inst.demand(customer);
        self.cached_cost = None;
        Ok(())
    }

    pub fn insert_new_route(&mut self, inst: &Instance<T>, customer: NodeId, satellite: NodeId) {
        self.level2_routes
            .push(Route::level2(inst, satellite, vec![customer]));
        self.cached_cost = None;
    }
}

/// Freight moved through each satellite (indexed by satellite index), taken
/// from the level-2 routes homed there.
pub fn satellite_throughput<T: Scalar>(inst: &Instance<T>, sol: &Solution<T>) -> Vec<u64> {
    let mut out = vec![0u64; inst.n_satellites()];
    for r in &sol.level2_routes {
        if inst.is_satellite(r.home) {
            out[r.home - 1] += r.visits.iter().map(|&c| inst.demand(c)).sum::<u64>();
        }
    }
    out
}

/// Full objective: vehicle fixed costs, travel costs on both levels,
/// handling costs and opening costs of used satellites, divided by the
/// instance objective scale.
pub fn evaluate<T: Scalar>(inst: &Instance<T>, sol: &Solution<T>) -> T {
    let mut total = T::zero();
    for r in sol.level1_routes.iter().chain(&sol.level2_routes) {
        total += r.cost(inst);
    }
    let throughput = satellite_throughput(inst, sol);
    for (i, s) in inst.satellites.iter().enumerate() {
        total += s.handling_cost * T::of_u64(throughput[i]);
        if sol.is_used(i + 1) {
            total += s.opening_cost;
        }
    }
    total / inst.objective_scale
}

/// Objective change from removing `customer` from its route.
pub fn delta_remove<T: Scalar>(inst: &Instance<T>, sol: &Solution<T>, customer: NodeId) -> Result<T> {
    let (r, p) = sol.locate(customer).ok_or(Error::NotRouted(customer))?;
    let route = &sol.level2_routes[r];
    let home = route.home;
    let prev = if p == 0 { home } else { route.visits[p - 1] };
    let next = route.visits.get(p + 1).copied().unwrap_or(home);
    let mut delta = inst.d2(prev, next) - inst.d2(prev, customer) - inst.d2(customer, next);
    delta -= inst.satellite(home).handling_cost * T::of_u64(inst.demand(customer));
    if route.visits.len() == 1 {
        delta -= inst.fleet.level2_fixed_cost;
        if sol.routes_at(home) == 1 && !sol.level1_routes.iter().any(|l| l.visits.contains(&home)) {
            delta -= inst.satellite(home).opening_cost;
        }
    }
    Ok(delta / inst.objective_scale)
}

/// Objective change from inserting `customer` into route `route` before
/// position `position` (`position == len` appends).
pub fn delta_insert<T: Scalar>(
    inst: &Instance<T>,
    sol: &Solution<T>,
    customer: NodeId,
    route: usize,
    position: usize,
) -> Result<T> {
    let r = sol
        .level2_routes
        .get(route)
        .ok_or(Error::IllegalPosition { route, position })?;
    if position > r.visits.len() {
        return Err(Error::IllegalPosition { route, position });
    }
    if !inst.is_customer(customer) {
        return Err(Error::IllegalPair {
            a: r.home,
            b: customer,
            level: 2,
        });
    }
    if sol.locate(customer).is_some() {
        return Err(Error::AlreadyRouted(customer));
    }
    let prev = if position == 0 { r.home } else { r.visits[position - 1] };
    let next = r.visits.get(position).copied().unwrap_or(r.home);
    let delta = inst.d2(prev, customer) + inst.d2(customer, next) - inst.d2(prev, next)
        + inst.satellite(r.home).handling_cost * T::of_u64(inst.demand(customer));
    Ok(delta / inst.objective_scale)
}

/// Objective change from serving `customer` with a new route from `satellite`.
pub fn delta_new_route<T: Scalar>(
    inst: &Instance<T>,
    sol: &Solution<T>,
    customer: NodeId,
    satellite: NodeId,
) -> Result<T> {
    if !inst.is_satellite(satellite) || !inst.is_customer(customer) {
        return Err(Error::IllegalPair {
            a: satellite,
            b: customer,
            level: 2,
        });
    }
    if sol.locate(customer).is_some() {
        return Err(Error::AlreadyRouted(customer));
    }
    let sat = inst.satellite(satellite);
    let mut delta = inst.fleet.level2_fixed_cost
        + inst.d2(satellite, customer)
        + inst.d2(customer, satellite)
        + sat.handling_cost * T::of_u64(inst.demand(customer));
    if !sol.is_used(satellite) {
        delta += sat.opening_cost;
    }
    Ok(delta / inst.objective_scale)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ViolationKind {
    CustomerCoverage,
    VehicleCountL1,
    VehicleCountL2,
    PerSatelliteCF,
    CapacityL1,
    CapacityL2,
    FlowBalance,
    SatelliteCapacity,
    ClosedSatelliteUsed,
    /// A location-routing satellite not served by exactly one truck.
    SplitDeliveryL2,
    /// Structural problems: bad node ids, wrong home, empty or repeated
    /// visits, stale load fields.
    MalformedRoute,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub detail: String,
    pub node: Option<NodeId>,
    pub route: Option<(u8, usize)>,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}: {}", self.kind, self.detail)
    }
}

/// Lists every constraint the solution breaks; empty iff feasible.
pub fn check_feasibility<T: Scalar>(inst: &Instance<T>, sol: &Solution<T>) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut push = |kind, detail: String, node: Option<NodeId>, route: Option<(u8, usize)>| {
        out.push(Violation {
            kind,
            detail,
            node,
            route,
        })
    };
    let fleet = &inst.fleet;
    let n_sat = inst.n_satellites();

    if sol.open_satellites.len() != n_sat {
        push(
            ViolationKind::MalformedRoute,
            format!("open mask has {} entries for {n_sat} satellites", sol.open_satellites.len()),
            None,
            None,
        );
        return out;
    }

    let mut seen = vec![0usize; inst.n_nodes()];
    let mut l2_per_sat = vec![0u64; n_sat];
    for (ri, r) in sol.level2_routes.iter().enumerate() {
        let id = Some((2, ri));
        if r.level != 2 || !inst.is_satellite(r.home) {
            push(
                ViolationKind::MalformedRoute,
                format!("level-2 route {ri} must be homed at a satellite"),
                Some(r.home),
                id,
            );
            continue;
        }
        if r.visits.is_empty() {
            push(ViolationKind::MalformedRoute, format!("level-2 route {ri} is empty"), None, id);
        }
        let mut load = 0u64;
        for &c in &r.visits {
            if !inst.is_customer(c) {
                push(
                    ViolationKind::MalformedRoute,
                    format!("level-2 route {ri} visits non-customer node {c}"),
                    Some(c),
                    id,
                );
                continue;
            }
            seen[c] += 1;
            load += inst.demand(c);
        }
        if load != r.load {
            push(
                ViolationKind::MalformedRoute,
                format!("level-2 route {ri} records load {} but carries {load}", r.load),
                None,
                id,
            );
        }
        if load > fleet.level2_capacity {
            push(
                ViolationKind::CapacityL2,
                format!("level-2 route {ri} carries {load} > Q² = {}", fleet.level2_capacity),
                None,
                id,
            );
        }
        if !sol.is_open(r.home) {
            push(
                ViolationKind::ClosedSatelliteUsed,
                format!("level-2 route {ri} leaves closed satellite {}", r.home),
                Some(r.home),
                id,
            );
        }
        l2_per_sat[r.home - 1] += 1;
    }
    for c in inst.customer_nodes() {
        if seen[c] != 1 {
            push(
                ViolationKind::CustomerCoverage,
                format!("customer {c} is visited {} times", seen[c]),
                Some(c),
                None,
            );
        }
    }

    if !fleet.level2_count.allows(sol.level2_routes.len() as u64) {
        push(
            ViolationKind::VehicleCountL2,
            format!("{} city freighters used, {} available", sol.level2_routes.len(), fleet.level2_count),
            None,
            None,
        );
    }
    if inst.per_satellite_cf_limit_active {
        for s in inst.satellite_nodes() {
            let limit = inst.cf_limit(s);
            if !limit.allows(l2_per_sat[s - 1]) {
                push(
                    ViolationKind::PerSatelliteCF,
                    format!("satellite {s} hosts {} city freighters, limit {limit}", l2_per_sat[s - 1]),
                    Some(s),
                    None,
                );
            }
        }
    }

    let mut delivered = vec![0u64; n_sat];
    let mut trucks_at = vec![0u64; n_sat];
    for (ri, r) in sol.level1_routes.iter().enumerate() {
        let id = Some((1, ri));
        if r.level != 1 || r.home != DEPOT || r.visits.len() != r.deliveries.len() {
            push(
                ViolationKind::MalformedRoute,
                format!("level-1 route {ri} must start at the depot with one delivery per visit"),
                None,
                id,
            );
            continue;
        }
        if r.visits.is_empty() {
            push(ViolationKind::MalformedRoute, format!("level-1 route {ri} is empty"), None, id);
        }
        let mut load = 0u64;
        for (k, (&s, &q)) in r.visits.iter().zip(&r.deliveries).enumerate() {
            if !inst.is_satellite(s) {
                push(
                    ViolationKind::MalformedRoute,
                    format!("level-1 route {ri} visits non-satellite node {s}"),
                    Some(s),
                    id,
                );
                continue;
            }
            if r.visits[..k].contains(&s) {
                push(
                    ViolationKind::MalformedRoute,
                    format!("level-1 route {ri} visits satellite {s} twice"),
                    Some(s),
                    id,
                );
            }
            if !sol.is_open(s) {
                push(
                    ViolationKind::ClosedSatelliteUsed,
                    format!("level-1 route {ri} serves closed satellite {s}"),
                    Some(s),
                    id,
                );
            }
            delivered[s - 1] += q;
            trucks_at[s - 1] += 1;
            load += q;
        }
        if load != r.load {
            push(
                ViolationKind::MalformedRoute,
                format!("level-1 route {ri} records load {} but carries {load}", r.load),
                None,
                id,
            );
        }
        if load > fleet.level1_capacity {
            push(
                ViolationKind::CapacityL1,
                format!("level-1 route {ri} carries {load} > Q¹ = {}", fleet.level1_capacity),
                None,
                id,
            );
        }
    }
    if !fleet.level1_count.allows(sol.level1_routes.len() as u64) {
        push(
            ViolationKind::VehicleCountL1,
            format!("{} trucks used, {} available", sol.level1_routes.len(), fleet.level1_count),
            None,
            None,
        );
    }

    let throughput = satellite_throughput(inst, sol);
    for s in inst.satellite_nodes() {
        let i = s - 1;
        if delivered[i] != throughput[i] {
            push(
                ViolationKind::FlowBalance,
                format!(
                    "satellite {s} receives {} but ships {}",
                    delivered[i], throughput[i]
                ),
                Some(s),
                None,
            );
        }
        if inst.variant == Variant::TwoELrpSd {
            if let Limit::Finite(k) = inst.satellites[i].capacity {
                if throughput[i] > k {
                    push(
                        ViolationKind::SatelliteCapacity,
                        format!("satellite {s} ships {} > capacity {k}", throughput[i]),
                        Some(s),
                        None,
                    );
                }
            }
            let used = l2_per_sat[i] > 0 || trucks_at[i] > 0;
            if used && trucks_at[i] != 1 {
                push(
                    ViolationKind::SplitDeliveryL2,
                    format!("satellite {s} is served by {} trucks, expected exactly one", trucks_at[i]),
                    Some(s),
                    None,
                );
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{
        Customer, DistanceConvention, Fleet, InstanceData, Point, Satellite,
    };
    use approx::assert_relative_eq;

    fn instance(depot: (f64, f64), sats: &[(f64, f64)], custs: &[(f64, f64, u64)]) -> Instance<f64> {
        Instance::new(InstanceData {
            name: "t".into(),
            variant: Variant::TwoEVrp,
            depot: Point::new(depot.0, depot.1),
            satellites: sats
                .iter()
                .map(|&(x, y)| Satellite {
                    coord: Point::new(x, y),
                    handling_cost: 0.0,
                    opening_cost: 0.0,
                    capacity: Limit::Unbounded,
                    max_city_freighters: Limit::Unbounded,
                })
                .collect(),
            customers: custs
                .iter()
                .map(|&(x, y, d)| Customer {
                    coord: Point::new(x, y),
                    demand: d,
                })
                .collect(),
            fleet: Fleet {
                level1_count: Limit::Finite(2),
                level1_capacity: 100,
                level1_fixed_cost: 0.0,
                level1_dist_multiplier: 1.0,
                level2_count: Limit::Finite(3),
                level2_capacity: 50,
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
    fn co_located_costs_nothing() {
        let inst = instance((0.0, 0.0), &[(0.0, 0.0)], &[(0.0, 0.0, 5)]);
        let mut sol = Solution::empty(&inst);
        sol.level2_routes.push(Route::level2(&inst, 1, vec![2]));
        sol.level1_routes.push(Route::level1(vec![1], vec![5]));
        assert_eq!(evaluate(&inst, &sol), 0.0);
        assert!(check_feasibility(&inst, &sol).is_empty());
    }

    #[test]
    fn forced_geometry() {
        let inst = instance((0.0, 0.0), &[(0.0, 0.0)], &[(3.0, 4.0, 5)]);
        let mut sol = Solution::empty(&inst);
        sol.level2_routes.push(Route::level2(&inst, 1, vec![2]));
        sol.level1_routes.push(Route::level1(vec![1], vec![5]));
        assert_eq!(sol.cost(&inst), 10.0);
        assert_eq!(sol.cached_cost(), Some(10.0));
    }

    #[test]
    fn throughput_sums_routes() {
        let inst = instance(
            (0.0, 0.0),
            &[(1.0, 0.0), (2.0, 0.0)],
            &[(1.0, 1.0, 30), (1.0, 2.0, 50)],
        );
        let mut sol = Solution::empty(&inst);
        sol.level2_routes.push(Route::level2(&inst, 1, vec![3]));
        sol.level2_routes.push(Route::level2(&inst, 1, vec![4]));
        assert_eq!(satellite_throughput(&inst, &sol), vec![80, 0]);
        let empty = Solution::empty(&inst);
        assert_eq!(satellite_throughput(&inst, &empty), vec![0, 0]);
    }

    #[test]
    fn removal_deltas() {
        let inst = instance((0.0, 0.0), &[(0.0, 0.0)], &[(1.0, 0.0, 1), (2.0, 0.0, 1)]);
        let mut sol = Solution::empty(&inst);
        // satellite(0,0) -> (1,0) -> (2,0): removing (1,0) is free
        sol.level2_routes.push(Route::level2(&inst, 1, vec![2, 3]));
        assert_eq!(delta_remove(&inst, &sol, 2).unwrap(), 0.0);

        let inst = instance((5.0, 5.0), &[(0.0, 0.0)], &[(0.0, 1.0, 1), (2.0, 0.0, 1)]);
        let mut sol = Solution::empty(&inst);
        sol.level2_routes.push(Route::level2(&inst, 1, vec![2, 3]));
        assert_relative_eq!(
            delta_remove(&inst, &sol, 2).unwrap(),
            2.0 - 1.0 - 5f64.sqrt(),
            max_relative = 1e-12
        );
        assert_relative_eq!(delta_remove(&inst, &sol, 2).unwrap(), -1.2360679774997898);
    }

    #[test]
    fn insert_then_remove_cancels() {
        let inst = instance((5.0, 5.0), &[(0.0, 0.0)], &[(0.0, 1.0, 1), (2.0, 0.0, 1), (3.0, 3.0, 2)]);
        let mut sol = Solution::empty(&inst);
        sol.level2_routes.push(Route::level2(&inst, 1, vec![2, 3]));
        let before = evaluate(&inst, &sol);
        let di = delta_insert(&inst, &sol, 4, 0, 1).unwrap();
        sol.insert_customer(&inst, 4, 0, 1).unwrap();
        let dr = delta_remove(&inst, &sol, 4).unwrap();
        assert_relative_eq!(di + dr, 0.0, epsilon = 1e-12);
        assert_relative_eq!(evaluate(&inst, &sol), before + di, max_relative = 1e-12);
        assert!(matches!(
            delta_insert(&inst, &sol, 4, 0, 0),
            Err(Error::AlreadyRouted(4))
        ));
        sol.remove_customer(&inst, 4).unwrap();
        assert!(matches!(
            delta_insert(&inst, &sol, 4, 0, 3),
            Err(Error::IllegalPosition { .. })
        ));
        assert!(matches!(delta_remove(&inst, &sol, 4), Err(Error::NotRouted(4))));
    }

    #[test]
    fn feasibility_violations() {
        let inst = instance((0.0, 0.0), &[(0.0, 0.0)], &[(1.0, 0.0, 30), (2.0, 0.0, 21)]);
        let mut sol = Solution::empty(&inst);
        sol.level2_routes.push(Route::level2(&inst, 1, vec![2]));
        sol.level1_routes.push(Route::level1(vec![1], vec![30]));
        let kinds: Vec<_> = check_feasibility(&inst, &sol).into_iter().map(|v| v.kind).collect();
        assert_eq!(kinds, vec![ViolationKind::CustomerCoverage]);

        sol.level2_routes[0] = Route::level2(&inst, 1, vec![2, 3]);
        sol.level1_routes[0] = Route::level1(vec![1], vec![51]);
        let kinds: Vec<_> = check_feasibility(&inst, &sol).into_iter().map(|v| v.kind).collect();
        assert_eq!(kinds, vec![ViolationKind::CapacityL2]);

        sol.level2_routes = vec![Route::level2(&inst, 1, vec![2]), Route::level2(&inst, 1, vec![3])];
        sol.level1_routes[0] = Route::level1(vec![1], vec![50]);
        let kinds: Vec<_> = check_feasibility(&inst, &sol).into_iter().map(|v| v.kind).collect();
        assert_eq!(kinds, vec![ViolationKind::FlowBalance]);

        sol.level1_routes[0] = Route::level1(vec![1], vec![51]);
        assert!(check_feasibility(&inst, &sol).is_empty());
        sol.open_satellites[0] = false;
        assert!(check_feasibility(&inst, &sol)
            .iter()
            .all(|v| v.kind == ViolationKind::ClosedSatelliteUsed));
    }

    #[test]
    fn reversal_invariance() {
        let inst = instance((5.0, 5.0), &[(0.0, 0.0)], &[(0.0, 1.0, 1), (2.0, 0.0, 1), (3.0, 3.0, 2)]);
        let mut sol = Solution::empty(&inst);
        sol.level2_routes.push(Route::level2(&inst, 1, vec![2, 3, 4]));
        let a = evaluate(&inst, &sol);
        sol.level2_routes[0].visits.reverse();
        assert_relative_eq!(a, evaluate(&inst, &sol), max_relative = 1e-12);
    }
}
