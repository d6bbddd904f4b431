#![allow(dead_code)]

use lns2e::instance::{
    Customer, DistanceConvention, Fleet, InstanceData, Limit, Point, Satellite, Variant,
};
use lns2e::Instance;
use rand::Rng;

/// Random instance with `n_sat` satellites and `n_cust` customers.
pub fn random_tiny<R: Rng>(rng: &mut R, variant: Variant, n_sat: usize, n_cust: usize) -> Instance {
    let pt = |rng: &mut R| Point::new(rng.gen_range(0..=100) as f64, rng.gen_range(0..=100) as f64);
    let lrp = variant == Variant::TwoELrpSd;
    let customers: Vec<Customer<f64>> = (0..n_cust)
        .map(|_| Customer {
            coord: pt(rng),
            demand: rng.gen_range(1..=10),
        })
        .collect();
    let total: u64 = customers.iter().map(|c| c.demand).sum();
    let q1 = rng.gen_range(20..=50);
    let satellites = (0..n_sat)
        .map(|_| Satellite {
            coord: pt(rng),
            handling_cost: if lrp { 0.0 } else { rng.gen_range(0..=2) as f64 },
            opening_cost: if lrp { rng.gen_range(0..=300) as f64 } else { 0.0 },
            capacity: if lrp { Limit::Finite(rng.gen_range(total / 2 + 1..=total + 10)) } else { Limit::Unbounded },
            max_city_freighters: Limit::Unbounded,
        })
        .collect();
    Instance::new(InstanceData {
        name: "tiny".into(),
        variant,
        depot: pt(rng),
        satellites,
        customers,
        fleet: Fleet {
            level1_count: Limit::Unbounded,
            level1_capacity: if lrp { q1.max(total + 10) } else { q1 },
            level1_fixed_cost: if lrp { rng.gen_range(0..=100) as f64 } else { 0.0 },
            level1_dist_multiplier: if lrp { 2.0 } else { 1.0 },
            level2_count: Limit::Finite(n_cust as u64),
            level2_capacity: rng.gen_range(10..=25),
            level2_fixed_cost: if lrp { rng.gen_range(0..=100) as f64 } else { 0.0 },
        },
        distance: if lrp { DistanceConvention::ceil_scaled(100, 1) } else { DistanceConvention::EUCLIDEAN },
        per_satellite_cf_limit_active: false,
        objective_scale: 1.0,
        notes: vec![],
    })
    .expect("generated instance is well formed")
}
