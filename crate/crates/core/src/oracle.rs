//! Exhaustive enumeration for tiny instances, used as ground truth in tests.

use thiserror::Error;

use crate::model::{objective_unchecked, validate_solution, Instance, Solution};

pub const MAX_CUSTOMERS: usize = 9;
pub const MAX_TRUCKS: usize = 3;
pub const MAX_DRONES: usize = 3;
pub const WITNESS_CAP: usize = 100;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("instance too large for exhaustive search ({customers} customers, {trucks} trucks, {drones} drones; limits {MAX_CUSTOMERS}, {MAX_TRUCKS}, {MAX_DRONES})")]
pub struct OracleError {
    pub customers: usize,
    pub trucks: usize,
    pub drones: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    /// `None` when no feasible solution exists.
    pub optimum: Option<i64>,
    /// Optimal canonical solutions, at most [`WITNESS_CAP`].
    pub witnesses: Vec<Solution>,
}

impl OracleResult {
    pub fn is_infeasible(&self) -> bool {
        self.optimum.is_none()
    }
}

fn guard(instance: &Instance) -> Result<(), OracleError> {
    if instance.customers() > MAX_CUSTOMERS
        || instance.truck_count() > MAX_TRUCKS
        || instance.drone_count() > MAX_DRONES
    {
        return Err(OracleError {
            customers: instance.customers(),
            trucks: instance.truck_count(),
            drones: instance.drone_count(),
        });
    }
    Ok(())
}

/// Calls `visit` with every feasible canonical solution.
///
/// Customers are placed one at a time, either on a drone or at any position
/// of any truck tour, which generates every labelled solution exactly once.
/// Only labelled solutions that are already canonical are reported, so each
/// canonical solution is seen once. Capacity and drone working time only grow
/// as customers are added and are used to prune; everything else is checked
/// by the validator on complete solutions.
fn enumerate(instance: &Instance, mut visit: impl FnMut(&Solution, i64)) {
    let mut routes = vec![Vec::new(); instance.truck_count()];
    let mut missions = vec![Vec::new(); instance.drone_count()];
    let mut loads = vec![0i64; instance.truck_count()];
    let mut drone_time = vec![0i64; instance.drone_count()];
    place(instance, 1, &mut routes, &mut missions, &mut loads, &mut drone_time, &mut visit);
}

#[allow(clippy::too_many_arguments)]
fn place(
    inst: &Instance,
    c: usize,
    routes: &mut Vec<Vec<usize>>,
    missions: &mut Vec<Vec<usize>>,
    loads: &mut Vec<i64>,
    drone_time: &mut Vec<i64>,
    visit: &mut impl FnMut(&Solution, i64),
) {
    if c > inst.customers() {
        let sol = Solution::from_routes(routes, missions);
        if !sol.is_canonical() {
            return;
        }
        let report = validate_solution(inst, &sol).expect("fleet sizes match");
        if report.feasible() {
            visit(&sol, objective_unchecked(inst, &sol));
        }
        return;
    }
    let mc = inst.min_cost();
    if let Some(t) = inst.drone_time(c) {
        for d in 0..missions.len() {
            if mc.is_some_and(|m| drone_time[d] + t > m.drone_time_limit()) {
                continue;
            }
            missions[d].push(c);
            drone_time[d] += t;
            place(inst, c + 1, routes, missions, loads, drone_time, visit);
            drone_time[d] -= t;
            missions[d].pop();
        }
    }
    let w = mc.map_or(0, |m| m.weight(c));
    for k in 0..routes.len() {
        if mc.is_some_and(|m| loads[k] + w > m.truck_capacity()) {
            continue;
        }
        loads[k] += w;
        for pos in 0..=routes[k].len() {
            routes[k].insert(pos, c);
            place(inst, c + 1, routes, missions, loads, drone_time, visit);
            routes[k].remove(pos);
        }
        loads[k] -= w;
    }
}

/// Exact optimum by enumerating every assignment of customers to trucks
/// (in every order) and drones. Idle trucks are allowed.
pub fn brute_force(instance: &Instance) -> Result<OracleResult, OracleError> {
    guard(instance)?;
    let mut optimum: Option<i64> = None;
    let mut witnesses = Vec::new();
    enumerate(instance, |sol, value| match optimum {
        Some(best) if value > best => {}
        Some(best) if value == best => {
            if witnesses.len() < WITNESS_CAP {
                witnesses.push(sol.clone());
            }
        }
        _ => {
            optimum = Some(value);
            witnesses.clear();
            witnesses.push(sol.clone());
        }
    });
    Ok(OracleResult { optimum, witnesses })
}

/// Number of distinct canonical feasible solutions.
pub fn count_feasible(instance: &Instance) -> Result<u64, OracleError> {
    guard(instance)?;
    let mut count = 0;
    enumerate(instance, |_, _| count += 1);
    Ok(count)
}
