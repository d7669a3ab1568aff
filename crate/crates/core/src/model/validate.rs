use std::fmt;

use thiserror::Error;

use super::{Instance, Solution, Variant};

/// The solution does not even have the fleet shape of the instance.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructuralError {
    #[error("solution has {found} truck tours, instance has {expected} trucks")]
    TruckCount { expected: usize, found: usize },
    #[error("solution has {found} drone mission lists, instance has {expected} drones")]
    DroneCount { expected: usize, found: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ObjectiveError {
    #[error(transparent)]
    Structural(#[from] StructuralError),
    #[error("objective is undefined for an infeasible solution ({0} violations)")]
    Infeasible(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ViolationKind {
    Coverage,
    Eligibility,
    Capacity,
    TruckTimeLimit,
    DroneTimeLimit,
    TourShape,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Vehicle {
    Truck(usize),
    Drone(usize),
}

impl fmt::Display for Vehicle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Vehicle::Truck(k) => write!(f, "truck {k}"),
            Vehicle::Drone(d) => write!(f, "drone {d}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub kind: ViolationKind,
    /// `None` for fleet-wide findings such as an unserved customer.
    pub vehicle: Option<Vehicle>,
    pub detail: String,
    /// By how much the constraint is exceeded, in fixed-point units (counts for
    /// coverage and shape findings).
    pub magnitude: i64,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.kind)?;
        if let Some(v) = self.vehicle {
            write!(f, " [{v}]")?;
        }
        write!(f, ": {} (magnitude {})", self.detail, self.magnitude)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FeasibilityReport {
    pub violations: Vec<Violation>,
}

impl FeasibilityReport {
    pub fn feasible(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn count(&self, kind: ViolationKind) -> usize {
        self.violations.iter().filter(|v| v.kind == kind).count()
    }
}

fn check_fleet(instance: &Instance, solution: &Solution) -> Result<(), StructuralError> {
    if solution.truck_tours.len() != instance.truck_count() {
        return Err(StructuralError::TruckCount {
            expected: instance.truck_count(),
            found: solution.truck_tours.len(),
        });
    }
    if solution.drone_missions.len() != instance.drone_count() {
        return Err(StructuralError::DroneCount {
            expected: instance.drone_count(),
            found: solution.drone_missions.len(),
        });
    }
    Ok(())
}

/// Sum of truck travel times along a tour (zero for an empty tour).
pub fn tour_time(instance: &Instance, tour: &[usize]) -> i64 {
    tour.windows(2).map(|w| instance.truck_time(w[0], w[1])).sum()
}

/// Sum of truck travel costs along a tour. Panics on min-time instances.
pub fn tour_cost(instance: &Instance, tour: &[usize]) -> i64 {
    let mc = instance.min_cost().expect("tour cost needs a min-cost instance");
    tour.windows(2).map(|w| mc.truck_cost().get(w[0], w[1])).sum()
}

/// Total round-trip time of a drone's missions. Ineligible customers count zero.
pub fn drone_workload(instance: &Instance, missions: &[usize]) -> i64 {
    missions.iter().filter_map(|&c| instance.drone_time(c)).sum()
}

/// Checks every coverage, eligibility and tour-shape rule and, for min-cost
/// instances, the capacity and working-time limits.
pub fn validate_solution(
    instance: &Instance,
    solution: &Solution,
) -> Result<FeasibilityReport, StructuralError> {
    check_fleet(instance, solution)?;
    let n = instance.customers();
    let mut violations = Vec::new();
    let mut served = vec![0usize; n + 1];

    for (k, tour) in solution.truck_tours.iter().enumerate() {
        let vehicle = Some(Vehicle::Truck(k));
        if tour.is_empty() {
            continue;
        }
        let mut shape_ok = true;
        if tour.len() < 3 || tour[0] != 0 || tour[tour.len() - 1] != 0 {
            violations.push(Violation {
                kind: ViolationKind::TourShape,
                vehicle,
                detail: format!("tour {tour:?} must leave and return to the depot and visit a customer"),
                magnitude: 1,
            });
            shape_ok = false;
        }
        let mut seen = vec![false; n + 1];
        for &c in Solution::tour_customers(tour) {
            if c == 0 || c > n {
                violations.push(Violation {
                    kind: ViolationKind::TourShape,
                    vehicle,
                    detail: format!("node {c} is not a customer"),
                    magnitude: 1,
                });
                shape_ok = false;
                continue;
            }
            if seen[c] {
                violations.push(Violation {
                    kind: ViolationKind::TourShape,
                    vehicle,
                    detail: format!("customer {c} repeats within the tour"),
                    magnitude: 1,
                });
                shape_ok = false;
            }
            seen[c] = true;
            served[c] += 1;
        }
        if !shape_ok {
            continue;
        }
        if let Some(mc) = instance.min_cost() {
            let load: i64 = Solution::tour_customers(tour).iter().map(|&c| mc.weight(c)).sum();
            if load > mc.truck_capacity() {
                violations.push(Violation {
                    kind: ViolationKind::Capacity,
                    vehicle,
                    detail: format!("load {load} exceeds capacity {}", mc.truck_capacity()),
                    magnitude: load - mc.truck_capacity(),
                });
            }
            let time = tour_time(instance, tour);
            if time > mc.truck_time_limit() {
                violations.push(Violation {
                    kind: ViolationKind::TruckTimeLimit,
                    vehicle,
                    detail: format!("tour time {time} exceeds limit {}", mc.truck_time_limit()),
                    magnitude: time - mc.truck_time_limit(),
                });
            }
        }
    }

    for (d, missions) in solution.drone_missions.iter().enumerate() {
        let vehicle = Some(Vehicle::Drone(d));
        for &c in missions {
            if c == 0 || c > n {
                violations.push(Violation {
                    kind: ViolationKind::TourShape,
                    vehicle,
                    detail: format!("node {c} is not a customer"),
                    magnitude: 1,
                });
                continue;
            }
            served[c] += 1;
            if !instance.is_eligible(c) {
                violations.push(Violation {
                    kind: ViolationKind::Eligibility,
                    vehicle,
                    detail: format!("customer {c} is not drone-eligible"),
                    magnitude: 1,
                });
            }
        }
        if let Some(mc) = instance.min_cost() {
            let time = drone_workload(instance, missions);
            if time > mc.drone_time_limit() {
                violations.push(Violation {
                    kind: ViolationKind::DroneTimeLimit,
                    vehicle,
                    detail: format!("mission time {time} exceeds limit {}", mc.drone_time_limit()),
                    magnitude: time - mc.drone_time_limit(),
                });
            }
        }
    }

    for (c, &count) in served.iter().enumerate().skip(1) {
        if count != 1 {
            violations.push(Violation {
                kind: ViolationKind::Coverage,
                vehicle: None,
                detail: format!("customer {c} served {count} times"),
                magnitude: (count as i64 - 1).abs(),
            });
        }
    }

    Ok(FeasibilityReport { violations })
}

/// Objective of a feasible solution: the makespan over all vehicles for
/// min-time instances, total truck arc cost plus drone mission cost for
/// min-cost instances.
pub fn objective_value(instance: &Instance, solution: &Solution) -> Result<i64, ObjectiveError> {
    let report = validate_solution(instance, solution)?;
    if !report.feasible() {
        return Err(ObjectiveError::Infeasible(report.violations.len()));
    }
    Ok(objective_unchecked(instance, solution))
}

/// Objective evaluation without the feasibility check.
pub fn objective_unchecked(instance: &Instance, solution: &Solution) -> i64 {
    match instance.variant() {
        Variant::MinTime => {
            let trucks = solution.truck_tours.iter().map(|t| tour_time(instance, t));
            let drones = solution
                .drone_missions
                .iter()
                .map(|m| drone_workload(instance, m));
            trucks.chain(drones).max().unwrap_or(0)
        }
        Variant::MinCost => {
            let mc = instance.min_cost().expect("min-cost data");
            let trucks: i64 = solution.truck_tours.iter().map(|t| tour_cost(instance, t)).sum();
            let drones: i64 = solution
                .drone_missions
                .iter()
                .flatten()
                .filter_map(|&c| mc.drone_cost(c))
                .sum();
            trucks + drones
        }
    }
}
