use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pdsvrp_core::gen::{random_min_cost, random_min_time, GenParams};
use pdsvrp_core::io::{convert_coordinates, ConverterParams, Rounding};
use pdsvrp_core::model::{objective_value, validate_solution, ViolationKind};
use pdsvrp_core::{Instance, Solution};

/// Random assignment of customers to vehicles. With `sloppy` it may also drop
/// or duplicate a customer and put ineligible ones on drones.
fn random_solution(inst: &Instance, rng: &mut ChaCha8Rng, sloppy: bool) -> Solution {
    let mut routes = vec![Vec::new(); inst.truck_count()];
    let mut missions = vec![Vec::new(); inst.drone_count()];
    let mut customers: Vec<usize> = (1..=inst.customers()).collect();
    customers.shuffle(rng);
    if sloppy && rng.gen_bool(0.3) {
        if rng.gen_bool(0.5) {
            customers.pop();
        } else {
            let c = customers[0];
            customers.push(c);
        }
    }
    for c in customers {
        let drone_ok = inst.drone_count() > 0 && (inst.is_eligible(c) || (sloppy && rng.gen_bool(0.1)));
        if drone_ok && rng.gen_bool(0.4) {
            let d = rng.gen_range(0..inst.drone_count());
            missions[d].push(c);
        } else {
            let k = rng.gen_range(0..inst.truck_count());
            routes[k].push(c);
        }
    }
    Solution::from_routes(&routes, &missions)
}

fn well_formed(tour: &[usize]) -> bool {
    let c = Solution::tour_customers(tour);
    (0..c.len()).all(|i| !c[i + 1..].contains(&c[i]))
}

fn instance(seed: u64, n: usize, t: usize, d: usize, cost: bool) -> Instance {
    let p = GenParams::new(n, t, d);
    if cost {
        random_min_cost(&p, seed)
    } else {
        random_min_time(&p, seed)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn validator_matches_recount(seed in any::<u64>(), n in 1usize..=9, t in 1usize..=3, d in 0usize..=3, cost in any::<bool>()) {
        let inst = instance(seed, n, t, d, cost);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let sol = random_solution(&inst, &mut rng, true);
        let report = validate_solution(&inst, &sol).unwrap();

        let mut seen = vec![0usize; n + 1];
        for t in &sol.truck_tours {
            for &c in Solution::tour_customers(t) {
                seen[c] += 1;
            }
        }
        for m in &sol.drone_missions {
            for &c in m {
                seen[c] += 1;
            }
        }
        let coverage_ok = seen[1..].iter().all(|&k| k == 1);
        let eligibility_ok = sol.drone_missions.iter().flatten().all(|&c| inst.is_eligible(c));
        let (mut capacity_ok, mut truck_time_ok, mut drone_time_ok) = (true, true, true);
        if let Some(mc) = inst.min_cost() {
            // limits are only judged on well-formed tours
            for t in sol.truck_tours.iter().filter(|t| well_formed(t)) {
                let load: i64 = Solution::tour_customers(t).iter().map(|&c| mc.weight(c)).sum();
                let time: i64 = t.windows(2).map(|w| inst.truck_times().get(w[0], w[1])).sum();
                capacity_ok &= load <= mc.truck_capacity();
                truck_time_ok &= time <= mc.truck_time_limit();
            }
            for m in &sol.drone_missions {
                let time: i64 = m.iter().filter_map(|&c| inst.drone_time(c)).sum();
                drone_time_ok &= time <= mc.drone_time_limit();
            }
        }
        prop_assert_eq!(report.count(ViolationKind::Coverage) == 0, coverage_ok);
        prop_assert_eq!(report.count(ViolationKind::Eligibility) == 0, eligibility_ok);
        prop_assert_eq!(report.count(ViolationKind::Capacity) == 0, capacity_ok);
        prop_assert_eq!(report.count(ViolationKind::TruckTimeLimit) == 0, truck_time_ok);
        prop_assert_eq!(report.count(ViolationKind::DroneTimeLimit) == 0, drone_time_ok);
        let shape_ok = sol.truck_tours.iter().all(|t| well_formed(t));
        prop_assert_eq!(report.count(ViolationKind::TourShape) == 0, shape_ok);
        prop_assert_eq!(report.feasible(), shape_ok && coverage_ok && eligibility_ok && capacity_ok && truck_time_ok && drone_time_ok);
    }

    #[test]
    fn min_time_objective_is_the_slowest_vehicle(seed in any::<u64>(), n in 1usize..=9, t in 1usize..=3, d in 0usize..=3) {
        let inst = instance(seed, n, t, d, false);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sol = random_solution(&inst, &mut rng, false);
        let trucks = sol.truck_tours.iter().map(|t| t.windows(2).map(|w| inst.truck_time(w[0], w[1])).sum::<i64>());
        let drones = sol.drone_missions.iter().map(|m| m.iter().map(|&c| inst.drone_time(c).unwrap()).sum::<i64>());
        let expected = trucks.chain(drones).max().unwrap_or(0);
        prop_assert_eq!(objective_value(&inst, &sol).unwrap(), expected);
    }

    #[test]
    fn objective_ignores_canonical_form_and_tour_direction(seed in any::<u64>(), n in 1usize..=9, cost in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts: Vec<(f64, f64)> = (0..=n).map(|_| (rng.gen_range(0.0..50.0), rng.gen_range(0.0..50.0))).collect();
        let params = ConverterParams { trucks: 2, drones: 2, seed, rounding: Rounding::ExactScaled, ..Default::default() };
        let inst = convert_coordinates(&pts, &params).unwrap();
        let inst = if cost { random_min_cost(&GenParams::new(n, 2, 2), seed) } else { inst };
        let sol = random_solution(&inst, &mut rng, false);
        let v = objective_value(&inst, &sol);
        prop_assert_eq!(objective_value(&inst, &sol.canonicalize()), v.clone());
        let symmetric = inst.truck_times().is_symmetric()
            && inst.min_cost().map_or(true, |mc| mc.truck_cost().is_symmetric());
        if symmetric {
            for k in 0..sol.truck_tours.len() {
                let mut r = sol.clone();
                r.truck_tours[k].reverse();
                prop_assert_eq!(objective_value(&inst, &r), v.clone());
            }
        }
    }
}
