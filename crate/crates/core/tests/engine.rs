use std::collections::BTreeMap;
use std::time::Duration;

use proptest::prelude::*;

use pdsvrp_core::engine::{Branching, IncumbentSource, RestartPolicy};
use pdsvrp_core::gen::{random_min_cost, random_min_time, GenParams};
use pdsvrp_core::model::{objective_value, validate_solution, InstanceMeta, InstanceParts, Matrix, MinCostParts};
use pdsvrp_core::oracle::brute_force;
use pdsvrp_core::*;

fn config() -> SearchConfig {
    SearchConfig {
        time_budget: Duration::from_secs(60),
        ..Default::default()
    }
}

fn run(kind: ModelKind, inst: &Instance, cfg: &SearchConfig) -> SolveOutcome {
    let m = build_model(kind, inst, &BuildOptions::default()).unwrap();
    solve(&m, inst, cfg).unwrap()
}

fn check_outcome(inst: &Instance, out: &SolveOutcome) {
    let mut last_lb = i64::MIN;
    let mut last_ub = None::<i64>;
    for p in &out.trace {
        assert!(p.lower_bound >= last_lb, "lower bound went down");
        if let (Some(a), Some(b)) = (last_ub, p.upper_bound) {
            assert!(b <= a, "upper bound went up");
        }
        assert!(last_ub.is_none() || p.upper_bound.is_some());
        if let Some(ub) = p.upper_bound {
            assert!(p.lower_bound <= ub);
        }
        last_lb = p.lower_bound;
        last_ub = p.upper_bound;
    }
    if let Some(sol) = &out.incumbent {
        assert!(validate_solution(inst, sol).unwrap().feasible());
        assert_eq!(Some(objective_value(inst, sol).unwrap()), out.upper_bound);
    }
}

fn mt(times: Vec<Vec<i64>>, drones: &[(usize, i64)], trucks: usize, drone_count: usize) -> Instance {
    Instance::new(InstanceParts {
        meta: InstanceMeta::default(),
        truck_count: trucks,
        drone_count,
        truck_time: Matrix::from_rows(times).unwrap(),
        drone_time: drones.iter().copied().collect(),
        min_cost: None,
    })
    .unwrap()
}

#[test]
fn single_customer_drone_wins() {
    let inst = mt(vec![vec![0, 5], vec![5, 0]], &[(1, 6)], 1, 1);
    for kind in ModelKind::for_variant(Variant::MinTime) {
        let out = run(kind, &inst, &config());
        assert_eq!((out.status, out.upper_bound, out.lower_bound), (Status::Optimal, Some(6), 6));
    }
}

fn min_cost(weights: Vec<i64>, capacity: i64, trucks: usize, eligible: &[usize]) -> Instance {
    let n = weights.len();
    let times = Matrix::from_fn(n + 1, |i, j| if i == j { 0 } else { 10 + (i + 2 * j) as i64 });
    let drone_time: BTreeMap<usize, i64> = eligible.iter().map(|&c| (c, 30)).collect();
    let mut weight = vec![0];
    weight.extend(weights);
    Instance::new(InstanceParts {
        meta: InstanceMeta::default(),
        truck_count: trucks,
        drone_count: 1,
        truck_time: times.clone(),
        drone_time: drone_time.clone(),
        min_cost: Some(MinCostParts {
            truck_cost: times,
            drone_cost: drone_time,
            weight,
            truck_capacity: capacity,
            truck_time_limit: 1000,
            drone_time_limit: 1000,
        }),
    })
    .unwrap()
}

#[test]
fn overweight_truck_only_customer_is_infeasible() {
    let inst = min_cost(vec![3, 12], 10, 2, &[1]);
    assert!(brute_force(&inst).unwrap().is_infeasible());
    for kind in ModelKind::for_variant(Variant::MinCost) {
        let out = run(kind, &inst, &config());
        assert_eq!(out.status, Status::Infeasible, "{kind}");
        assert_eq!(out.incumbent, None);
    }
}

#[test]
fn capacity_splits_tours() {
    // weights 5 each, capacity 9: every tour carries one customer
    let inst = min_cost(vec![5, 5, 5], 9, 2, &[1, 2, 3]);
    let oracle = brute_force(&inst).unwrap();
    for w in &oracle.witnesses {
        assert!(w.truck_tours.iter().all(|t| t.len() <= 3));
    }
    for kind in ModelKind::for_variant(Variant::MinCost) {
        let out = run(kind, &inst, &config());
        assert_eq!(out.upper_bound, oracle.optimum, "{kind}");
        let sol = out.incumbent.unwrap();
        assert!(sol.truck_tours.iter().all(|t| t.len() <= 3));
    }
}

#[test]
fn random_six_customers_match_oracle() {
    for seed in 0..10 {
        let inst = random_min_time(&GenParams::new(6, 2, 2), seed);
        let opt = brute_force(&inst).unwrap().optimum;
        for kind in ModelKind::for_variant(Variant::MinTime) {
            let out = run(kind, &inst, &config());
            assert_eq!((out.status, out.upper_bound), (Status::Optimal, opt), "seed {seed} {kind}");
            assert_eq!(out.lower_bound, opt.unwrap());
            check_outcome(&inst, &out);
        }
    }
}

#[test]
fn search_options_do_not_change_optimum() {
    let variants = [
        SearchConfig { workers: 3, ..config() },
        SearchConfig { branching: Branching::CostRegret, ..config() },
        SearchConfig {
            restarts: RestartPolicy::Luby { base: 16 },
            incumbent_source: IncumbentSource::Heuristics,
            ..config()
        },
        SearchConfig { incumbent_source: IncumbentSource::Heuristics, workers: 2, seed: 7, ..config() },
    ];
    for seed in 0..8 {
        let p = GenParams::new(6, 2, 2);
        for inst in [random_min_time(&p, seed), random_min_cost(&p, seed)] {
            let opt = brute_force(&inst).unwrap().optimum;
            for cfg in &variants {
                for kind in ModelKind::for_variant(inst.variant()) {
                    let out = run(kind, &inst, cfg);
                    assert_eq!(out.upper_bound, opt, "seed {seed} {kind} {cfg:?}");
                    let expected = if opt.is_some() { Status::Optimal } else { Status::Infeasible };
                    assert_eq!(out.status, expected);
                    check_outcome(&inst, &out);
                }
            }
        }
    }
}

#[test]
fn node_limit_truncates_deterministically() {
    let inst = random_min_cost(&GenParams::new(12, 2, 2), 3);
    let cfg = SearchConfig { node_limit: Some(3000), ..config() };
    for kind in ModelKind::for_variant(inst.variant()) {
        let a = run(kind, &inst, &cfg);
        let b = run(kind, &inst, &cfg);
        assert!(a.stats.nodes <= 3000 + 1);
        assert_eq!(a.without_timing(), b.without_timing());
        check_outcome(&inst, &a);
    }
}

#[test]
fn anytime_contract_on_mid_size() {
    let cfg = SearchConfig {
        time_budget: Duration::from_millis(400),
        incumbent_source: IncumbentSource::Heuristics,
        ..Default::default()
    };
    for seed in 0..3 {
        let p = GenParams::new(12, 2, 2);
        for inst in [random_min_time(&p, seed), random_min_cost(&p, seed)] {
            for kind in ModelKind::for_variant(inst.variant()) {
                let out = run(kind, &inst, &cfg);
                check_outcome(&inst, &out);
                if let Some(ub) = out.upper_bound {
                    assert!(out.lower_bound <= ub);
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn every_bound_is_admissible(seed in 0u64..1_000_000, n in 1usize..=6, trucks in 1usize..=2, drones in 0usize..=2, cost in any::<bool>(), limit in 1u64..200) {
        let p = GenParams::new(n, trucks, drones);
        let inst = if cost { random_min_cost(&p, seed) } else { random_min_time(&p, seed) };
        let opt = brute_force(&inst).unwrap().optimum;
        let cfg = SearchConfig { node_limit: Some(limit), ..config() };
        for kind in ModelKind::for_variant(inst.variant()) {
            let out = run(kind, &inst, &cfg);
            check_outcome(&inst, &out);
            match opt {
                Some(v) => {
                    prop_assert!(out.trace.iter().all(|p| p.lower_bound <= v));
                    prop_assert!(out.lower_bound <= v);
                    prop_assert!(out.upper_bound.map_or(true, |ub| ub >= v));
                }
                None => prop_assert_eq!(out.upper_bound, None),
            }
        }
    }

    #[test]
    fn complete_runs_agree_across_models(seed in 0u64..1_000_000, n in 1usize..=7, cost in any::<bool>()) {
        let p = GenParams::new(n, 2, 1);
        let inst = if cost { random_min_cost(&p, seed) } else { random_min_time(&p, seed) };
        let [a, b] = ModelKind::for_variant(inst.variant()).map(|k| run(k, &inst, &config()));
        prop_assert!(a.status != Status::Unknown && b.status != Status::Unknown);
        prop_assert_eq!(a.status, b.status);
        prop_assert_eq!(a.upper_bound, b.upper_bound);
    }

    #[test]
    fn single_worker_runs_repeat(seed in 0u64..1_000_000, cost in any::<bool>(), heur in any::<bool>()) {
        let p = GenParams::new(6, 2, 2);
        let inst = if cost { random_min_cost(&p, seed) } else { random_min_time(&p, seed) };
        let cfg = SearchConfig {
            seed,
            incumbent_source: if heur { IncumbentSource::Heuristics } else { IncumbentSource::None },
            ..config()
        };
        for kind in ModelKind::for_variant(inst.variant()) {
            prop_assert_eq!(run(kind, &inst, &cfg).without_timing(), run(kind, &inst, &cfg).without_timing());
        }
    }
}
