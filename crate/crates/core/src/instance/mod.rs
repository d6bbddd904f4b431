//! Problem data: depot, satellites, customers, fleets and distance conventions.
//!
//! Nodes share one index space: `0` is the depot, `1..=|S|` are satellites
//! and `|S|+1..=|S|+|C|` are customers.

mod canonical;
mod parse;

use std::fmt;
use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub use canonical::write_canonical;
pub use parse::{load_instance, parse_instance, parse_instance_with, Dialect, ParseOptions};

pub type NodeId = usize;

pub const DEPOT: NodeId = 0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Variant {
    TwoEVrp,
    TwoELrpSd,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::TwoEVrp => "2EVRP",
            Variant::TwoELrpSd => "2ELRPSD",
        })
    }
}

/// A count or capacity that may be unlimited.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Limit {
    Finite(u64),
    Unbounded,
}

impl Limit {
    pub fn allows(self, n: u64) -> bool {
        match self {
            Limit::Finite(cap) => n <= cap,
            Limit::Unbounded => true,
        }
    }

    pub fn finite(self) -> Option<u64> {
        match self {
            Limit::Finite(v) => Some(v),
            Limit::Unbounded => None,
        }
    }

    pub fn min(self, other: Limit) -> Limit {
        match (self, other) {
            (Limit::Finite(a), Limit::Finite(b)) => Limit::Finite(a.min(b)),
            (Limit::Finite(a), Limit::Unbounded) | (Limit::Unbounded, Limit::Finite(a)) => {
                Limit::Finite(a)
            }
            (Limit::Unbounded, Limit::Unbounded) => Limit::Unbounded,
        }
    }

    /// `self * factor`, saturating to `u64::MAX` for unbounded values.
    pub fn times(self, factor: u64) -> u64 {
        match self {
            Limit::Finite(v) => v.saturating_mul(factor),
            Limit::Unbounded => u64::MAX,
        }
    }
}

impl fmt::Display for Limit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Limit::Finite(v) => write!(f, "{v}"),
            Limit::Unbounded => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point<T> {
    pub x: T,
    pub y: T,
}

impl<T: Scalar> Point<T> {
    pub fn new(x: T, y: T) -> Self {
        Point { x, y }
    }

    pub fn euclid(&self, other: &Point<T>) -> T {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Satellite<T> {
    pub coord: Point<T>,
    /// Cost per freight unit moved through the satellite.
    pub handling_cost: T,
    /// Opening cost (location-routing instances only).
    pub opening_cost: T,
    pub capacity: Limit,
    pub max_city_freighters: Limit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Customer<T> {
    pub coord: Point<T>,
    pub demand: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fleet<T> {
    pub level1_count: Limit,
    pub level1_capacity: u64,
    pub level1_fixed_cost: T,
    pub level1_dist_multiplier: T,
    pub level2_count: Limit,
    pub level2_capacity: u64,
    pub level2_fixed_cost: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DistanceKind {
    EuclideanExact,
    CeilScaled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DistanceConvention {
    pub kind: DistanceKind,
    pub scale: u32,
    pub level1_factor: u32,
}

impl DistanceConvention {
    pub const EUCLIDEAN: DistanceConvention = DistanceConvention {
        kind: DistanceKind::EuclideanExact,
        scale: 1,
        level1_factor: 1,
    };

    pub fn ceil_scaled(scale: u32, level1_factor: u32) -> Self {
        DistanceConvention {
            kind: DistanceKind::CeilScaled,
            scale,
            level1_factor,
        }
    }

    /// Cost of an edge of Euclidean length `euclid` on the given level.
    ///
    /// The ceiling is taken after the full multiplication, so a level-1 edge
    /// is generally not exactly twice its level-2 counterpart.
    pub fn cost<T: Scalar>(&self, euclid: T, level: u8) -> T {
        match self.kind {
            DistanceKind::EuclideanExact => euclid,
            DistanceKind::CeilScaled => {
                let factor = if level == 1 { self.level1_factor } else { 1 };
                (euclid * T::of_u64(u64::from(self.scale) * u64::from(factor))).ceil()
            }
        }
    }
}

/// The raw description of an instance, as read from a file.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceData<T> {
    pub name: String,
    pub variant: Variant,
    pub depot: Point<T>,
    pub satellites: Vec<Satellite<T>>,
    pub customers: Vec<Customer<T>>,
    pub fleet: Fleet<T>,
    pub distance: DistanceConvention,
    /// Set 4a style limit on city freighters per satellite. When off, every
    /// satellite may host up to `v²` freighters.
    pub per_satellite_cf_limit_active: bool,
    /// Reported objectives are divided by this factor (100 for rescaled Set 4
    /// coordinates, 1 otherwise).
    pub objective_scale: T,
    /// Corrections applied while parsing.
    pub notes: Vec<String>,
}

/// An immutable instance with precomputed distance matrices.
///
/// Dereferences to [`InstanceData`] for field access.
#[derive(Debug, Clone)]
pub struct Instance<T> {
    data: InstanceData<T>,
    n_nodes: usize,
    level1: Vec<T>,
    level2: Vec<T>,
    euclid: Vec<T>,
}

impl<T> Deref for Instance<T> {
    type Target = InstanceData<T>;

    fn deref(&self) -> &InstanceData<T> {
        &self.data
    }
}

impl<T: Scalar> PartialEq for Instance<T> {
    fn eq(&self, other: &Self) -> bool {
        self.data == other.data
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.severity {
            Severity::Warning => "warning",
            Severity::Error => "error",
        };
        write!(f, "{tag}: {}", self.message)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Depot,
    Satellite(usize),
    Customer(usize),
}

impl<T: Scalar> Instance<T> {
    pub fn new(mut data: InstanceData<T>) -> Result<Self> {
        if data.satellites.is_empty() || data.customers.is_empty() {
            return Err(Error::InfeasibleInstance(
                "an instance needs at least one satellite and one customer".into(),
            ));
        }
        if !data.per_satellite_cf_limit_active {
            for s in &mut data.satellites {
                s.max_city_freighters = Limit::Unbounded;
            }
        }
        let coords: Vec<Point<T>> = std::iter::once(data.depot)
            .chain(data.satellites.iter().map(|s| s.coord))
            .chain(data.customers.iter().map(|c| c.coord))
            .collect();
        let n = coords.len();
        let mut euclid = vec![T::zero(); n * n];
        let mut level2 = vec![T::zero(); n * n];
        for i in 0..n {
            for j in 0..n {
                let e = coords[i].euclid(&coords[j]);
                euclid[i * n + j] = e;
                level2[i * n + j] = data.distance.cost(e, 2);
            }
        }
        let m = 1 + data.satellites.len();
        let mut level1 = vec![T::zero(); m * m];
        for i in 0..m {
            for j in 0..m {
                level1[i * m + j] = data.distance.cost(euclid[i * n + j], 1);
            }
        }
        Ok(Instance {
            data,
            n_nodes: n,
            level1,
            level2,
            euclid,
        })
    }

    pub fn data(&self) -> &InstanceData<T> {
        &self.data
    }

    pub fn into_data(self) -> InstanceData<T> {
        self.data
    }

    pub fn n_satellites(&self) -> usize {
        self.satellites.len()
    }

    pub fn n_customers(&self) -> usize {
        self.customers.len()
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn satellite_node(&self, s: usize) -> NodeId {
        1 + s
    }

    pub fn customer_node(&self, c: usize) -> NodeId {
        1 + self.satellites.len() + c
    }

    pub fn satellite_nodes(&self) -> std::ops::RangeInclusive<NodeId> {
        1..=self.satellites.len()
    }

    pub fn customer_nodes(&self) -> std::ops::Range<NodeId> {
        1 + self.satellites.len()..self.n_nodes
    }

    pub fn kind(&self, node: NodeId) -> NodeKind {
        let s = self.satellites.len();
        if node == DEPOT {
            NodeKind::Depot
        } else if node <= s {
            NodeKind::Satellite(node - 1)
        } else {
            NodeKind::Customer(node - 1 - s)
        }
    }

    pub fn is_satellite(&self, node: NodeId) -> bool {
        node >= 1 && node <= self.satellites.len()
    }

    pub fn is_customer(&self, node: NodeId) -> bool {
        node > self.satellites.len() && node < self.n_nodes
    }

    pub fn satellite(&self, node: NodeId) -> &Satellite<T> {
        &self.satellites[node - 1]
    }

    /// Demand of a customer node; zero for the depot and satellites.
    pub fn demand(&self, node: NodeId) -> u64 {
        if self.is_customer(node) {
            self.customers[node - 1 - self.satellites.len()].demand
        } else {
            0
        }
    }

    pub fn total_demand(&self) -> u64 {
        self.customers.iter().map(|c| c.demand).sum()
    }

    pub fn coord(&self, node: NodeId) -> Point<T> {
        match self.kind(node) {
            NodeKind::Depot => self.depot,
            NodeKind::Satellite(s) => self.satellites[s].coord,
            NodeKind::Customer(c) => self.customers[c].coord,
        }
    }

    /// Edge cost under the instance's distance convention.
    ///
    /// Level 1 connects the depot and satellites; level 2 connects
    /// satellites to customers and customers among themselves.
    pub fn distance(&self, a: NodeId, b: NodeId, level: u8) -> Result<T> {
        let legal = match level {
            1 => a <= self.satellites.len() && b <= self.satellites.len(),
            2 => {
                a != DEPOT
                    && b != DEPOT
                    && a < self.n_nodes
                    && b < self.n_nodes
                    && !(self.is_satellite(a) && self.is_satellite(b))
            }
            _ => false,
        };
        if !legal {
            return Err(Error::IllegalPair { a, b, level });
        }
        Ok(if level == 1 { self.d1(a, b) } else { self.d2(a, b) })
    }

    /// Unchecked level-1 distance between depot/satellite nodes.
    #[inline]
    pub fn d1(&self, a: NodeId, b: NodeId) -> T {
        self.level1[a * (1 + self.satellites.len()) + b]
    }

    /// Level-1 travel cost including the truck cost multiplier.
    #[inline]
    pub fn c1(&self, a: NodeId, b: NodeId) -> T {
        self.fleet.level1_dist_multiplier * self.d1(a, b)
    }

    /// Unchecked level-2 distance.
    #[inline]
    pub fn d2(&self, a: NodeId, b: NodeId) -> T {
        self.level2[a * self.n_nodes + b]
    }

    /// Plain Euclidean distance between two nodes, before any scaling.
    #[inline]
    pub fn euclid(&self, a: NodeId, b: NodeId) -> T {
        self.euclid[a * self.n_nodes + b]
    }

    /// Effective limit on city freighters homed at satellite node `s`.
    pub fn cf_limit(&self, s: NodeId) -> Limit {
        if self.per_satellite_cf_limit_active {
            self.satellite(s).max_city_freighters.min(self.fleet.level2_count)
        } else {
            self.fleet.level2_count
        }
    }

    /// Freight a satellite may receive: its capacity for location-routing
    /// instances (also bounded by one truckload since deliveries cannot be
    /// split), unbounded otherwise.
    pub fn satellite_capacity(&self, s: NodeId) -> Limit {
        match self.variant {
            Variant::TwoEVrp => Limit::Unbounded,
            Variant::TwoELrpSd => self
                .satellite(s)
                .capacity
                .min(Limit::Finite(self.fleet.level1_capacity)),
        }
    }

    /// First-level trucks may split a satellite's delivery.
    pub fn allows_split_delivery(&self) -> bool {
        self.variant == Variant::TwoEVrp
    }

    pub fn validate(&self) -> Vec<Diagnostic> {
        validate_instance(self)
    }
}

/// Checks the instance invariants; returns one diagnostic per violation.
pub fn validate_instance<T: Scalar>(inst: &Instance<T>) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mut err = |m: String| {
        out.push(Diagnostic {
            severity: Severity::Error,
            message: m,
        })
    };
    let fleet = &inst.fleet;
    let total = inst.total_demand();

    if fleet.level1_capacity == 0 {
        err("level-1 capacity Q¹ must be positive".into());
    }
    if fleet.level2_capacity == 0 {
        err("level-2 capacity Q² must be positive".into());
    }
    if fleet.level1_count == Limit::Finite(0) {
        err("no level-1 vehicles available".into());
    }
    if fleet.level2_count == Limit::Finite(0) {
        err("no level-2 vehicles available".into());
    }
    if fleet.level1_fixed_cost < T::zero() || fleet.level2_fixed_cost < T::zero() {
        err("vehicle fixed costs must be non-negative".into());
    }
    if fleet.level1_dist_multiplier < T::zero() {
        err("level-1 cost multiplier must be non-negative".into());
    }
    if inst.objective_scale <= T::zero() {
        err("objective scale must be positive".into());
    }
    match inst.distance.kind {
        DistanceKind::EuclideanExact => {
            if inst.distance.scale != 1 || inst.distance.level1_factor != 1 {
                err("exact Euclidean distances take scale 1 and level-1 factor 1".into());
            }
        }
        DistanceKind::CeilScaled => {
            if inst.distance.scale == 0 || inst.distance.level1_factor == 0 {
                err("ceil-scaled distances need positive scale and factor".into());
            }
        }
    }
    for (i, s) in inst.satellites.iter().enumerate() {
        if s.handling_cost < T::zero() || s.opening_cost < T::zero() {
            err(format!("satellite {} has a negative cost", i + 1));
        }
        if s.capacity == Limit::Finite(0) {
            err(format!("satellite {} has zero capacity", i + 1));
        }
        if !(s.coord.x.is_finite() && s.coord.y.is_finite()) {
            err(format!("satellite {} has non-finite coordinates", i + 1));
        }
    }
    for (i, c) in inst.customers.iter().enumerate() {
        if c.demand > fleet.level2_capacity {
            err(format!(
                "customer {} demand {} exceeds Q² = {}",
                inst.customer_node(i),
                c.demand,
                fleet.level2_capacity
            ));
        }
        if !(c.coord.x.is_finite() && c.coord.y.is_finite()) {
            err(format!("customer {} has non-finite coordinates", inst.customer_node(i)));
        }
    }
    match inst.variant {
        Variant::TwoEVrp => {
            if fleet.level1_count.times(fleet.level1_capacity) < total {
                err(format!(
                    "total demand {total} exceeds v¹·Q¹ = {}",
                    fleet.level1_count.times(fleet.level1_capacity)
                ));
            }
            if fleet.level2_count.times(fleet.level2_capacity) < total {
                err(format!(
                    "total demand {total} exceeds v²·Q² = {}",
                    fleet.level2_count.times(fleet.level2_capacity)
                ));
            }
            if inst.per_satellite_cf_limit_active {
                let cap: u64 = inst
                    .satellite_nodes()
                    .map(|s| inst.cf_limit(s).times(fleet.level2_capacity))
                    .fold(0u64, |a, b| a.saturating_add(b));
                if cap < total {
                    err(format!(
                        "total demand {total} exceeds the per-satellite freighter capacity {cap}"
                    ));
                }
            }
            if fleet.level1_capacity < fleet.level2_capacity {
                out.push(Diagnostic {
                    severity: Severity::Warning,
                    message: format!(
                        "Q¹ = {} is smaller than Q² = {}",
                        fleet.level1_capacity, fleet.level2_capacity
                    ),
                });
            }
        }
        Variant::TwoELrpSd => {
            let cap: u64 = inst
                .satellite_nodes()
                .map(|s| inst.satellite_capacity(s).times(1))
                .fold(0u64, |a, b| a.saturating_add(b));
            if cap < total {
                err(format!("total demand {total} exceeds total satellite capacity {cap}"));
            }
        }
    }
    out
}
