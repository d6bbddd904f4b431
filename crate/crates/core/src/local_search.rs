//! Second-level improvement: 2-opt, 2-opt* within a satellite, and granular
//! relocate / swap (1-1) / swap (2-1) moves, all first improvement.

use crate::instance::{Instance, Limit, NodeId, DEPOT};
use crate::params::{Params, Toggle};
use crate::scalar::Scalar;
use crate::solution::{Route, Solution};

/// For every node, its τ Euclidean-closest satellites and customers.
#[derive(Debug, Clone)]
pub struct Granular {
    n: usize,
    lists: Vec<Vec<NodeId>>,
    candidates: Vec<Vec<NodeId>>,
    near: Vec<bool>,
}

impl Granular {
    pub fn new<T: Scalar>(inst: &Instance<T>, tau: usize) -> Self {
        let n = inst.n_nodes();
        let mut lists = vec![Vec::new(); n];
        let mut near = vec![false; n * n];
        for a in 1..n {
            let mut others: Vec<NodeId> = (1..n).filter(|&b| b != a).collect();
            others.sort_by(|&x, &y| {
                inst.euclid(a, x)
                    .partial_cmp(&inst.euclid(a, y))
                    .unwrap_or(std::cmp::Ordering::Equal)
                    .then(x.cmp(&y))
            });
            others.truncate(tau);
            for &b in &others {
                near[a * n + b] = true;
                near[b * n + a] = true;
            }
            lists[a] = others;
        }
        let mut candidates = vec![Vec::new(); n];
        for a in 1..n {
            let mut c: Vec<NodeId> = (1..n).filter(|&b| near[a * n + b]).collect();
            c.sort_by(|&x, &y| {
                inst.euclid(a, x)
                    .partial_cmp(&inst.euclid(a, y))
                    .unwrap_or(std::cmp::Ordering::Equal)
                    .then(x.cmp(&y))
            });
            candidates[a] = c;
        }
        Granular {
            n,
            lists,
            candidates,
            near,
        }
    }

    /// The τ closest nodes to `node`, nearest first.
    pub fn list(&self, node: NodeId) -> &[NodeId] {
        &self.lists[node]
    }

    /// Nodes `b` such that either is in the other's list.
    pub fn candidates(&self, node: NodeId) -> &[NodeId] {
        &self.candidates[node]
    }

    pub fn eligible(&self, a: NodeId, b: NodeId) -> bool {
        a != DEPOT && b != DEPOT && self.near[a * self.n + b]
    }
}

/// Tolerance below which a cost change is treated as zero.
pub fn improvement_eps<T: Scalar>(inst: &Instance<T>) -> T {
    let (mut lo, mut hi) = (inst.depot, inst.depot);
    for p in inst
        .satellites
        .iter()
        .map(|s| s.coord)
        .chain(inst.customers.iter().map(|c| c.coord))
    {
        lo.x = lo.x.min(p.x);
        lo.y = lo.y.min(p.y);
        hi.x = hi.x.max(p.x);
        hi.y = hi.y.max(p.y);
    }
    let diag = inst.distance.cost(lo.euclid(&hi), 1) + inst.distance.cost(lo.euclid(&hi), 2);
    let mut scale = inst.fleet.level2_fixed_cost + inst.fleet.level1_fixed_cost + T::one();
    for s in &inst.satellites {
        scale += s.opening_cost;
    }
    (scale + diag * T::of_u64(4)) * T::epsilon() * T::of_u64(64)
}

/// Reverses segments of a closed tour from `home` while that shortens it.
/// Returns the total gain (non-negative).
pub fn two_opt_seq<T: Scalar>(
    home: NodeId,
    visits: &mut [NodeId],
    d: impl Fn(NodeId, NodeId) -> T,
    eps: T,
) -> T {
    let n = visits.len();
    let mut gain = T::zero();
    if n < 2 {
        return gain;
    }
    loop {
        let mut improved = false;
        for i in 0..n - 1 {
            for j in i + 1..n {
                let a = if i == 0 { home } else { visits[i - 1] };
                let b = visits[i];
                let c = visits[j];
                let e = if j + 1 == n { home } else { visits[j + 1] };
                let delta = d(a, c) + d(b, e) - d(a, b) - d(c, e);
                if delta < -eps {
                    visits[i..=j].reverse();
                    gain -= delta;
                    improved = true;
                }
            }
        }
        if !improved {
            return gain;
        }
    }
}

/// 2-opt on one route of either level.
pub fn two_opt<T: Scalar>(inst: &Instance<T>, route: &mut Route) -> bool {
    let eps = improvement_eps(inst);
    let gain = if route.level == 1 {
        // work on visit indices so deliveries follow their satellites
        const HOME: usize = usize::MAX;
        let node = |k: usize| if k == HOME { route.home } else { route.visits[k] };
        let mut order: Vec<usize> = (0..route.visits.len()).collect();
        let g = two_opt_seq(HOME, &mut order, |a, b| inst.d1(node(a), node(b)), eps);
        route.visits = order.iter().map(|&k| route.visits[k]).collect();
        route.deliveries = order.iter().map(|&k| route.deliveries[k]).collect();
        g
    } else {
        two_opt_seq(route.home, &mut route.visits, |a, b| inst.d2(a, b), eps)
    };
    gain > T::zero()
}

fn prefix_loads<T: Scalar>(inst: &Instance<T>, visits: &[NodeId]) -> Vec<u64> {
    let mut out = Vec::with_capacity(visits.len() + 1);
    let mut acc = 0;
    out.push(0);
    for &c in visits {
        acc += inst.demand(c);
        out.push(acc);
    }
    out
}

/// Finds and applies the first improving tail exchange among the given
/// routes, all homed at the same satellite. Emptied routes are dropped.
fn two_opt_star_step<T: Scalar>(inst: &Instance<T>, routes: &mut Vec<Route>, eps: T) -> Option<T> {
    let q2 = inst.fleet.level2_capacity;
    let f2 = inst.fleet.level2_fixed_cost;
    for x in 0..routes.len() {
        for y in x + 1..routes.len() {
            let (a, b) = (&routes[x], &routes[y]);
            let s = a.home;
            if s != b.home {
                continue;
            }
            let (la, lb) = (a.visits.len(), b.visits.len());
            let pa = prefix_loads(inst, &a.visits);
            let pb = prefix_loads(inst, &b.visits);
            for i in 0..=la {
                for j in 0..=lb {
                    if (i == 0 && j == 0) || (i == la && j == lb) {
                        continue;
                    }
                    let new_a = pa[i] + (pb[lb] - pb[j]);
                    let new_b = pb[j] + (pa[la] - pa[i]);
                    if new_a > q2 || new_b > q2 {
                        continue;
                    }
                    let a_prev = if i == 0 { s } else { a.visits[i - 1] };
                    let a_next = if i == la { s } else { a.visits[i] };
                    let b_prev = if j == 0 { s } else { b.visits[j - 1] };
                    let b_next = if j == lb { s } else { b.visits[j] };
                    let mut delta = inst.d2(a_prev, b_next) + inst.d2(b_prev, a_next)
                        - inst.d2(a_prev, a_next)
                        - inst.d2(b_prev, b_next);
                    let empties = (i == 0 && j == lb) || (j == 0 && i == la);
                    if empties {
                        delta -= f2;
                    }
                    if delta < -eps {
                        let mut va: Vec<NodeId> = a.visits[..i].to_vec();
                        va.extend_from_slice(&b.visits[j..]);
                        let mut vb: Vec<NodeId> = b.visits[..j].to_vec();
                        vb.extend_from_slice(&a.visits[i..]);
                        routes[x] = Route::level2(inst, s, va);
                        routes[y] = Route::level2(inst, s, vb);
                        routes.retain(|r| !r.visits.is_empty());
                        return Some(delta);
                    }
                }
            }
        }
    }
    None
}

/// 2-opt* between routes of the same home satellite, until no improving
/// tail exchange remains. Routes emptied by an exchange are dropped.
pub fn two_opt_star<T: Scalar>(inst: &Instance<T>, routes: &mut Vec<Route>) -> bool {
    let eps = improvement_eps(inst);
    let mut any = false;
    while two_opt_star_step(inst, routes, eps).is_some() {
        any = true;
    }
    any
}

type Observer<'o> = &'o mut dyn FnMut(&[Route], f64);

struct State<'a, 'o, T> {
    inst: &'a Instance<T>,
    gran: &'a Granular,
    routes: Vec<Route>,
    open: Vec<bool>,
    route_of: Vec<usize>,
    pos_of: Vec<usize>,
    through: Vec<u64>,
    count: Vec<u64>,
    l1_visited: Vec<bool>,
    eps: T,
    observer: Option<Observer<'o>>,
}

impl<'a, 'o, T: Scalar> State<'a, 'o, T> {
    fn new(
        inst: &'a Instance<T>,
        sol: &Solution<T>,
        gran: &'a Granular,
        observer: Option<Observer<'o>>,
    ) -> Self {
        let n_sat = inst.n_satellites();
        let mut st = State {
            inst,
            gran,
            routes: sol.level2_routes.clone(),
            open: sol.open_satellites.clone(),
            route_of: vec![usize::MAX; inst.n_nodes()],
            pos_of: vec![0; inst.n_nodes()],
            through: vec![0; n_sat],
            count: vec![0; n_sat],
            l1_visited: vec![false; n_sat],
            eps: improvement_eps(inst),
            observer,
        };
        for r in &sol.level1_routes {
            for &v in &r.visits {
                st.l1_visited[v - 1] = true;
            }
        }
        st.rebuild_all();
        st
    }

    fn rebuild_all(&mut self) {
        self.through.iter_mut().for_each(|x| *x = 0);
        self.count.iter_mut().for_each(|x| *x = 0);
        for r in 0..self.routes.len() {
            self.reindex(r);
            let route = &self.routes[r];
            self.through[route.home - 1] += route.load;
            self.count[route.home - 1] += 1;
        }
    }

    fn reindex(&mut self, r: usize) {
        for (p, &c) in self.routes[r].visits.iter().enumerate() {
            self.route_of[c] = r;
            self.pos_of[c] = p;
        }
    }

    fn d(&self, a: NodeId, b: NodeId) -> T {
        self.inst.d2(a, b)
    }

    fn prev(&self, r: usize, p: usize) -> NodeId {
        if p == 0 {
            self.routes[r].home
        } else {
            self.routes[r].visits[p - 1]
        }
    }

    fn next(&self, r: usize, p: usize) -> NodeId {
        self.routes[r]
            .visits
            .get(p + 1)
            .copied()
            .unwrap_or(self.routes[r].home)
    }

    fn h(&self, s: NodeId) -> T {
        self.inst.satellite(s).handling_cost
    }

    fn fits(&self, s: NodeId, through: u64) -> bool {
        match self.inst.satellite_capacity(s) {
            Limit::Unbounded => true,
            Limit::Finite(k) => through <= k,
        }
    }

    fn opening_cost_if_unused(&self, s: NodeId, count_after: u64) -> T {
        if count_after == 0 && !self.l1_visited[s - 1] {
            self.inst.satellite(s).opening_cost
        } else {
            T::zero()
        }
    }

    fn notify(&mut self, delta: T) {
        if let Some(obs) = self.observer.as_mut() {
            let scaled = (delta / self.inst.objective_scale).as_f64();
            obs(&self.routes, scaled);
        }
    }

    /// Applies new visit lists, drops emptied routes and refreshes the
    /// indices.
    fn commit(&mut self, changes: &[(usize, Vec<NodeId>)]) {
        for (r, visits) in changes {
            let home = self.routes[*r].home;
            self.routes[*r] = Route::level2(self.inst, home, visits.clone());
        }
        self.routes.retain(|r| !r.visits.is_empty());
        self.rebuild_all();
    }

    fn run_two_opt(&mut self) -> bool {
        let mut any = false;
        for r in 0..self.routes.len() {
            let inst = self.inst;
            let home = self.routes[r].home;
            let gain = two_opt_seq(home, &mut self.routes[r].visits, |a, b| inst.d2(a, b), self.eps);
            if gain > T::zero() {
                any = true;
                self.reindex(r);
                self.notify(-gain);
            }
        }
        any
    }

    fn run_two_opt_star(&mut self) -> bool {
        let mut any = false;
        for s in self.inst.satellite_nodes() {
            if self.count[s - 1] < 2 {
                continue;
            }
            loop {
                let idx: Vec<usize> = (0..self.routes.len())
                    .filter(|&r| self.routes[r].home == s)
                    .collect();
                let mut group: Vec<Route> = idx.iter().map(|&r| self.routes[r].clone()).collect();
                let Some(delta) = two_opt_star_step(self.inst, &mut group, self.eps) else {
                    break;
                };
                any = true;
                let mut others: Vec<Route> = Vec::with_capacity(self.routes.len());
                let mut k = 0;
                for (r, route) in self.routes.drain(..).enumerate() {
                    if idx.contains(&r) {
                        if k < group.len() {
                            others.push(group[k].clone());
                            k += 1;
                        }
                    } else {
                        others.push(route);
                    }
                }
                self.routes = others;
                self.rebuild_all();
                self.notify(delta);
            }
        }
        any
    }

    /// Cost change of taking `u` out of its route, including the freighter
    /// and opening costs saved if the route empties, and handling.
    fn removal(&self, u: NodeId) -> (T, bool) {
        let r = self.route_of[u];
        let p = self.pos_of[u];
        let route = &self.routes[r];
        let (pa, na) = (self.prev(r, p), self.next(r, p));
        let d = T::of_u64(self.inst.demand(u));
        let mut delta = self.d(pa, na) - self.d(pa, u) - self.d(u, na) - self.h(route.home) * d;
        let empties = route.visits.len() == 1;
        if empties {
            delta -= self.inst.fleet.level2_fixed_cost;
            delta -= self.opening_cost_if_unused(route.home, self.count[route.home - 1] - 1);
        }
        (delta, empties)
    }

    fn try_relocate(&mut self, u: NodeId) -> bool {
        let inst = self.inst;
        let a = self.route_of[u];
        let pu = self.pos_of[u];
        let sa = self.routes[a].home;
        let du = inst.demand(u);
        let (rem, empties) = self.removal(u);
        let q2 = inst.fleet.level2_capacity;

        for &v in self.gran.candidates(u) {
            if inst.is_customer(v) {
                let b = self.route_of[v];
                if b == usize::MAX {
                    continue;
                }
                let pv = self.pos_of[v];
                let sb = self.routes[b].home;
                if b == a {
                    let rem_dist = rem + self.h(sa) * T::of_u64(du);
                    let mut w = self.routes[a].visits.clone();
                    w.remove(pu);
                    let pv2 = if pu < pv { pv - 1 } else { pv };
                    for q in [pv2, pv2 + 1] {
                        if q == pu {
                            continue;
                        }
                        let p = if q == 0 { sa } else { w[q - 1] };
                        let n = w.get(q).copied().unwrap_or(sa);
                        let delta = rem_dist + self.d(p, u) + self.d(u, n) - self.d(p, n);
                        if delta < -self.eps {
                            w.insert(q, u);
                            self.commit(&[(a, w)]);
                            self.notify(delta);
                            return true;
                        }
                    }
                } else {
                    if self.routes[b].load + du > q2 {
                        continue;
                    }
                    if sb != sa && !self.fits(sb, self.through[sb - 1] + du) {
                        continue;
                    }
                    for q in [pv, pv + 1] {
                        let p = if q == 0 { sb } else { self.routes[b].visits[q - 1] };
                        let n = self.routes[b].visits.get(q).copied().unwrap_or(sb);
                        let delta = rem + self.d(p, u) + self.d(u, n) - self.d(p, n)
                            + self.h(sb) * T::of_u64(du);
                        if delta < -self.eps {
                            let mut wa = self.routes[a].visits.clone();
                            wa.remove(pu);
                            let mut wb = self.routes[b].visits.clone();
                            wb.insert(q, u);
                            self.commit(&[(a, wa), (b, wb)]);
                            self.notify(delta);
                            return true;
                        }
                    }
                }
            } else if inst.is_satellite(v) && self.open[v - 1] {
                let s = v;
                // start or end of an existing route at s
                for b in 0..self.routes.len() {
                    if self.routes[b].home != s {
                        continue;
                    }
                    if b == a {
                        let len = self.routes[a].visits.len();
                        if len < 2 {
                            continue;
                        }
                        let rem_dist = rem + self.h(sa) * T::of_u64(du);
                        let mut w = self.routes[a].visits.clone();
                        w.remove(pu);
                        for q in [0, len - 1] {
                            if q == pu {
                                continue;
                            }
                            let p = if q == 0 { sa } else { w[q - 1] };
                            let n = w.get(q).copied().unwrap_or(sa);
                            let delta = rem_dist + self.d(p, u) + self.d(u, n) - self.d(p, n);
                            if delta < -self.eps {
                                w.insert(q, u);
                                self.commit(&[(a, w)]);
                                self.notify(delta);
                                return true;
                            }
                        }
                        continue;
                    }
                    if self.routes[b].load + du > q2 {
                        continue;
                    }
                    if s != sa && !self.fits(s, self.through[s - 1] + du) {
                        continue;
                    }
                    let lb = self.routes[b].visits.len();
                    for q in [0, lb] {
                        let p = if q == 0 { s } else { self.routes[b].visits[q - 1] };
                        let n = self.routes[b].visits.get(q).copied().unwrap_or(s);
                        let delta = rem + self.d(p, u) + self.d(u, n) - self.d(p, n)
                            + self.h(s) * T::of_u64(du);
                        if delta < -self.eps {
                            let mut wa = self.routes[a].visits.clone();
                            wa.remove(pu);
                            let mut wb = self.routes[b].visits.clone();
                            wb.insert(q, u);
                            self.commit(&[(a, wa), (b, wb)]);
                            self.notify(delta);
                            return true;
                        }
                    }
                }
                // a new route at s
                if empties && s == sa {
                    continue;
                }
                let routes_after = self.routes.len() as u64 - empties as u64 + 1;
                let count_after = self.count[s - 1] - (empties && s == sa) as u64;
                if !inst.fleet.level2_count.allows(routes_after)
                    || !inst.cf_limit(s).allows(count_after + 1)
                {
                    continue;
                }
                if s != sa && !self.fits(s, self.through[s - 1] + du) {
                    continue;
                }
                let delta = rem
                    + inst.fleet.level2_fixed_cost
                    + self.d(s, u)
                    + self.d(u, s)
                    + self.h(s) * T::of_u64(du)
                    + self.opening_cost_if_unused(s, count_after);
                if delta < -self.eps {
                    let mut wa = self.routes[a].visits.clone();
                    wa.remove(pu);
                    self.routes.push(Route::level2(inst, s, vec![u]));
                    self.commit(&[(a, wa)]);
                    self.notify(delta);
                    return true;
                }
            }
        }
        false
    }

    fn try_swap(&mut self, u: NodeId) -> bool {
        let inst = self.inst;
        let q2 = inst.fleet.level2_capacity;
        let a = self.route_of[u];
        let pu = self.pos_of[u];
        let sa = self.routes[a].home;
        let du = inst.demand(u);
        for &v in self.gran.candidates(u) {
            if v <= u || !inst.is_customer(v) {
                continue;
            }
            let b = self.route_of[v];
            if b == usize::MAX || b == a {
                continue;
            }
            let pv = self.pos_of[v];
            let sb = self.routes[b].home;
            let dv = inst.demand(v);
            if self.routes[a].load - du + dv > q2 || self.routes[b].load - dv + du > q2 {
                continue;
            }
            if sa != sb
                && (!self.fits(sa, self.through[sa - 1] - du + dv)
                    || !self.fits(sb, self.through[sb - 1] - dv + du))
            {
                continue;
            }
            let (pa, na) = (self.prev(a, pu), self.next(a, pu));
            let (pb, nb) = (self.prev(b, pv), self.next(b, pv));
            let diff = T::of_u64(dv) - T::of_u64(du);
            let delta = self.d(pa, v) + self.d(v, na) - self.d(pa, u) - self.d(u, na)
                + self.d(pb, u)
                + self.d(u, nb)
                - self.d(pb, v)
                - self.d(v, nb)
                + (self.h(sa) - self.h(sb)) * diff;
            if delta < -self.eps {
                let mut wa = self.routes[a].visits.clone();
                let mut wb = self.routes[b].visits.clone();
                wa[pu] = v;
                wb[pv] = u;
                self.commit(&[(a, wa), (b, wb)]);
                self.notify(delta);
                return true;
            }
        }
        false
    }

    fn try_swap2(&mut self, u: NodeId) -> bool {
        let inst = self.inst;
        let q2 = inst.fleet.level2_capacity;
        let a = self.route_of[u];
        let pu = self.pos_of[u];
        if pu + 1 >= self.routes[a].visits.len() {
            return false;
        }
        let u2 = self.routes[a].visits[pu + 1];
        let sa = self.routes[a].home;
        let duu = inst.demand(u) + inst.demand(u2);
        let pa = self.prev(a, pu);
        let na = self.next(a, pu + 1);
        let cands: Vec<NodeId> = self
            .gran
            .candidates(u)
            .iter()
            .chain(self.gran.candidates(u2))
            .copied()
            .collect();
        for v in cands {
            if !inst.is_customer(v) {
                continue;
            }
            let b = self.route_of[v];
            if b == usize::MAX || b == a {
                continue;
            }
            let pv = self.pos_of[v];
            let sb = self.routes[b].home;
            let dv = inst.demand(v);
            if self.routes[a].load + dv - duu > q2 || self.routes[b].load + duu - dv > q2 {
                continue;
            }
            if sa != sb
                && (!self.fits(sa, self.through[sa - 1] + dv - duu)
                    || !self.fits(sb, self.through[sb - 1] + duu - dv))
            {
                continue;
            }
            let (pb, nb) = (self.prev(b, pv), self.next(b, pv));
            let da = self.d(pa, v) + self.d(v, na) - self.d(pa, u) - self.d(u, u2) - self.d(u2, na);
            let keep = self.d(pb, u) + self.d(u2, nb);
            let flip = self.d(pb, u2) + self.d(u, nb);
            let flipped = flip < keep;
            let db = keep.min(flip) + self.d(u, u2) - self.d(pb, v) - self.d(v, nb);
            let diff = T::of_u64(dv) - T::of_u64(duu);
            let delta = da + db + (self.h(sa) - self.h(sb)) * diff;
            if delta < -self.eps {
                let mut wa = self.routes[a].visits.clone();
                wa.splice(pu..pu + 2, [v]);
                let mut wb = self.routes[b].visits.clone();
                let pair = if flipped { [u2, u] } else { [u, u2] };
                wb.splice(pv..pv + 1, pair);
                self.commit(&[(a, wa), (b, wb)]);
                self.notify(delta);
                return true;
            }
        }
        false
    }

    fn run(&mut self, params: &Params) {
        let customers: Vec<NodeId> = self.inst.customer_nodes().collect();
        loop {
            let mut improved = false;
            if params.enabled(Toggle::TwoOpt) {
                improved |= self.run_two_opt();
            }
            if params.enabled(Toggle::TwoOptStar) {
                improved |= self.run_two_opt_star();
            }
            loop {
                let mut round = false;
                for &u in &customers {
                    if self.route_of[u] == usize::MAX {
                        continue;
                    }
                    if params.enabled(Toggle::Relocate) && self.try_relocate(u) {
                        round = true;
                        continue;
                    }
                    if params.enabled(Toggle::Swap) && self.try_swap(u) {
                        round = true;
                        continue;
                    }
                    if params.enabled(Toggle::Swap2) && self.try_swap2(u) {
                        round = true;
                    }
                }
                if !round {
                    break;
                }
                improved = true;
            }
            if !improved {
                break;
            }
        }
    }
}

fn finish<T: Scalar>(sol: &mut Solution<T>, routes: Vec<Route>) {
    sol.level2_routes = routes;
    sol.invalidate();
}

/// Runs the full second-level local search to a local optimum.
pub fn local_search<T: Scalar>(
    inst: &Instance<T>,
    sol: &mut Solution<T>,
    params: &Params,
    gran: &Granular,
) {
    let mut st = State::new(inst, sol, gran, None);
    st.run(params);
    let routes = std::mem::take(&mut st.routes);
    finish(sol, routes);
}

/// As [`local_search`], calling `observer` after every accepted move with
/// the current routes and the predicted objective change.
pub fn local_search_observed<T: Scalar>(
    inst: &Instance<T>,
    sol: &mut Solution<T>,
    params: &Params,
    gran: &Granular,
    observer: &mut dyn FnMut(&[Route], f64),
) {
    let mut st = State::new(inst, sol, gran, Some(observer));
    st.run(params);
    let routes = std::mem::take(&mut st.routes);
    finish(sol, routes);
}

fn only(t: Toggle) -> Params {
    Params {
        disabled: Toggle::ALL.into_iter().filter(|&x| x != t).collect(),
        ..Params::default()
    }
}

/// Granular relocate moves only, to a local optimum.
pub fn relocate<T: Scalar>(inst: &Instance<T>, sol: &mut Solution<T>, gran: &Granular) {
    local_search(inst, sol, &only(Toggle::Relocate), gran);
}

/// Granular 1-1 swaps only, to a local optimum.
pub fn swap_1_1<T: Scalar>(inst: &Instance<T>, sol: &mut Solution<T>, gran: &Granular) {
    local_search(inst, sol, &only(Toggle::Swap), gran);
}

/// Granular 2-1 swaps only, to a local optimum.
pub fn swap_2_1<T: Scalar>(inst: &Instance<T>, sol: &mut Solution<T>, gran: &Granular) {
    local_search(inst, sol, &only(Toggle::Swap2), gran);
}
