use std::path::PathBuf;

use lns2e::instance::{load_instance, write_canonical, Dialect, DistanceKind, Limit, Variant};
use lns2e::solution::{check_feasibility, evaluate, parse_solution};
use lns2e::Instance;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

#[test]
fn swapped_capacities_are_restored() {
    let inst: Instance = load_instance(fixture("swapped-2c.dat"), None, None).unwrap();
    assert_eq!(inst.name, "swapped-2c");
    assert_eq!(inst.variant, Variant::TwoEVrp);
    assert_eq!((inst.fleet.level1_capacity, inst.fleet.level2_capacity), (400, 160));
    assert_eq!(inst.fleet.level1_count, Limit::Finite(3));
    assert_eq!(inst.fleet.level2_count, Limit::Finite(4));
    assert!(inst.notes.iter().any(|n| n.contains("swapped")));
    assert_eq!(inst.total_demand(), 1300);
}

#[test]
fn missing_truck_capacity_defaults() {
    let inst: Instance = load_instance(fixture("12-2-3b.dat"), None, None).unwrap();
    assert_eq!(inst.variant, Variant::TwoELrpSd);
    assert_eq!(inst.fleet.level1_capacity, 5000);
    assert_eq!(inst.fleet.level2_capacity, 70);
    assert_eq!(inst.satellites[1].capacity, Limit::Finite(400));
    assert_eq!(inst.satellites[0].opening_cost, 1200.0);
    assert_eq!((inst.fleet.level1_fixed_cost, inst.fleet.level2_fixed_cost), (100.0, 50.0));
    assert_eq!(inst.customers.iter().map(|c| c.demand).collect::<Vec<_>>(), vec![10, 20, 30]);
    assert!(inst.notes.iter().any(|n| n.contains("5000")));
    assert_eq!(inst.distance.kind, DistanceKind::CeilScaled);
    // depot (0,0) to satellite (3,4)
    assert_eq!(inst.distance(0, 1, 1).unwrap(), 1000.0);
    // satellite (3,4) to customer (1,1): ceil(100·√13)
    assert_eq!(inst.distance(1, 3, 2).unwrap(), 361.0);
}

#[test]
fn nguyen_names_select_the_coarser_scale() {
    let inst: Instance = load_instance(fixture("12-2N.dat"), None, None).unwrap();
    assert_eq!(inst.distance(0, 1, 1).unwrap(), 100.0);
    assert_eq!(inst.distance(1, 3, 2).unwrap(), 37.0);
    let forced: Instance = load_instance(fixture("12-2N.dat"), Some(Dialect::Prodhon), None).unwrap();
    assert_eq!(forced.distance(1, 3, 2).unwrap(), 361.0);
}

#[test]
fn canonical_round_trip_through_disk() {
    let inst: Instance = load_instance(fixture("tiny.2evrp"), None, None).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tiny.2evrp");
    std::fs::write(&path, write_canonical(&inst)).unwrap();
    let again: Instance = load_instance(&path, None, None).unwrap();
    assert_eq!(inst, again);

    let lrp: Instance = load_instance(fixture("12-2-3b.dat"), None, None).unwrap();
    let path = dir.path().join("lrp.txt");
    std::fs::write(&path, write_canonical(&lrp)).unwrap();
    let again: Instance = load_instance(&path, Some(Dialect::Canonical), None).unwrap();
    assert_eq!(lrp, again);
}

#[test]
fn solution_file_golden() {
    let inst: Instance = load_instance(fixture("tiny.2evrp"), None, None).unwrap();
    let text = std::fs::read_to_string(fixture("tiny.sol")).unwrap();
    let (sol, stated) = parse_solution(&inst, &text).unwrap();
    assert!(check_feasibility(&inst, &sol).is_empty());
    // 2·5 + 2·1 + (3,4)→(7,8)→(6,9)→(3,4): 4√2 + √2 + √34
    let expected = 12.0 + 5.0 * 2f64.sqrt() + 34f64.sqrt();
    assert!((evaluate(&inst, &sol) - expected).abs() < 1e-12);
    assert!((stated.unwrap() - expected).abs() < 0.005);
}
