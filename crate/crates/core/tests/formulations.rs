use std::collections::BTreeMap;
use std::time::Duration;

use pdsvrp_core::formulations::{decode_solution, encode_solution, ConstraintKind, VarTag};
use pdsvrp_core::gen::{random_min_cost, random_min_time, GenParams};
use pdsvrp_core::io::{parse_native, parse_solution};
use pdsvrp_core::model::{objective_value, validate_solution, InstanceMeta, InstanceParts, Matrix};
use pdsvrp_core::*;

const EXAMPLE: &str = include_str!("../data/example8.pdsvrp");
const EXAMPLE_SOL: &str = include_str!("../data/example8.sol");

fn three_customers(trucks: usize, drones: usize) -> Instance {
    Instance::new(InstanceParts {
        meta: InstanceMeta::default(),
        truck_count: trucks,
        drone_count: drones,
        truck_time: Matrix::from_fn(4, |i, j| if i == j { 0 } else { 10 + (i * 3 + j) as i64 }),
        drone_time: BTreeMap::from([(1, 15), (2, 25)]),
        min_cost: None,
    })
    .unwrap()
}

#[test]
fn three_index_counts() {
    let inst = three_customers(1, 1);
    let m = build_model(ModelKind::Mt3Idx, &inst, &BuildOptions::default()).unwrap();
    assert_eq!(m.boolean_count(), 16 + 2);
    assert_eq!(m.count_constraints(ConstraintKind::Circuit), 1);
    assert_eq!(m.count_constraints(ConstraintKind::ExactlyOne), 3);
    assert_eq!(m.count_constraints(ConstraintKind::MaxBound), 2);

    let forced = build_model(ModelKind::Mt3Idx, &inst, &BuildOptions { force_truck_use: true }).unwrap();
    assert_eq!(forced.boolean_count(), 15 + 2);
}

#[test]
fn giant_tour_counts() {
    let inst = three_customers(1, 1);
    let m = build_model(ModelKind::Mt2Idx, &inst, &BuildOptions::default()).unwrap();
    assert_eq!(m.boolean_count(), 15 + 2);
    assert_eq!(m.count_tag(|t| matches!(t, VarTag::Makespan)), 1);
    assert_eq!(m.integer_count(), 4 + 1);
}

#[test]
fn closed_form_boolean_counts() {
    for seed in 0..20 {
        let p = GenParams::new(2 + seed as usize % 5, 1 + seed as usize % 3, seed as usize % 3);
        for inst in [random_min_time(&p, seed), random_min_cost(&p, seed)] {
            let (n, t, d, e) = (inst.customers(), inst.truck_count(), inst.drone_count(), inst.eligible().len());
            let [three, two] = ModelKind::for_variant(inst.variant());
            let m3 = build_model(three, &inst, &BuildOptions::default()).unwrap();
            let m3f = build_model(three, &inst, &BuildOptions { force_truck_use: true }).unwrap();
            let m2 = build_model(two, &inst, &BuildOptions::default()).unwrap();
            assert_eq!(m3.boolean_count(), t * (n + 1).pow(2) + d * e);
            assert_eq!(m3f.boolean_count(), t * (n + 1).pow(2) - t + d * e);
            assert_eq!(m2.boolean_count(), (n + 1).pow(2) - 1 + d * e);
        }
    }
}

#[test]
fn variant_mismatch_is_rejected() {
    let inst = three_customers(1, 1);
    assert!(matches!(
        build_model(ModelKind::Mc3Idx, &inst, &BuildOptions::default()),
        Err(BuildError::VariantMismatch { .. })
    ));
}

#[test]
fn worked_example_files() {
    let inst = parse_native(EXAMPLE).unwrap();
    let sol = parse_solution(EXAMPLE_SOL).unwrap();
    assert!(validate_solution(&inst, &sol).unwrap().feasible());
    let m = build_model(ModelKind::Mt3Idx, &inst, &BuildOptions::default()).unwrap();
    assert_eq!(m.count_constraints(ConstraintKind::Circuit), 2);
    assert_eq!(m.count_constraints(ConstraintKind::ExactlyOne), 8);
    assert_eq!(m.count_constraints(ConstraintKind::MaxBound), 4);
    for kind in ModelKind::for_variant(inst.variant()) {
        let m = build_model(kind, &inst, &BuildOptions::default()).unwrap();
        let a = encode_solution(&m, &sol, &inst).unwrap();
        assert_eq!(m.first_violation(&a), None, "{kind}");
        let back = decode_solution(&m, &a, &inst).unwrap();
        assert_eq!(back.truck_tours, vec![vec![0, 2, 3, 0], vec![0, 6, 7, 0]]);
        assert_eq!(back.drone_missions, vec![vec![1, 8], vec![4, 5]]);
        assert_eq!(m.evaluate_objective(&a), objective_value(&inst, &sol).unwrap());
    }
}

#[test]
fn engine_solutions_round_trip_through_every_model() {
    let cfg = SearchConfig {
        time_budget: Duration::from_secs(20),
        ..Default::default()
    };
    for seed in 0..12 {
        let p = GenParams::new(5, 2, 1);
        for inst in [random_min_time(&p, seed), random_min_cost(&p, seed)] {
            for kind in ModelKind::for_variant(inst.variant()) {
                let m = build_model(kind, &inst, &BuildOptions::default()).unwrap();
                let out = solve(&m, &inst, &cfg).unwrap();
                let Some(sol) = out.incumbent else { continue };
                let report = validate_solution(&inst, &sol).unwrap();
                assert!(report.feasible(), "seed {seed} {kind}: {report:?}");
                let value = objective_value(&inst, &sol).unwrap();
                assert_eq!(Some(value), out.upper_bound);
                // decoding a re-encoded solution reproduces it
                let a = encode_solution(&m, &sol, &inst).unwrap();
                assert_eq!(m.first_violation(&a), None);
                assert_eq!(m.evaluate_objective(&a), value);
                let back = decode_solution(&m, &a, &inst).unwrap();
                assert_eq!(objective_value(&inst, &back).unwrap(), value);
            }
        }
    }
}
