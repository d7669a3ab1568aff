//! Greedy construction and strict-improvement local search used to warm
//! start the engine.

use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{validate_solution, Instance, Solution, Variant};

/// Vehicle a customer is served by.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Carrier {
    Truck(usize),
    Drone(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MoveKind {
    RelocateCustomer,
    SwapCustomers,
    TwoOptWithinTour,
    TruckToDrone,
    DroneToTruck,
    RuinRecreate(usize),
}

/// A change to a solution. `vehicles` and `customers` name what is touched;
/// `positions` gives tour indices where the kind needs them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeighborhoodMove {
    pub kind: MoveKind,
    pub vehicles: Vec<Carrier>,
    pub customers: Vec<usize>,
    pub positions: Vec<usize>,
}

/// Working form: customer sequences without depot endpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Plan {
    routes: Vec<Vec<usize>>,
    missions: Vec<Vec<usize>>,
}

impl Plan {
    fn from_solution(s: &Solution) -> Self {
        Self {
            routes: s
                .truck_tours
                .iter()
                .map(|t| Solution::tour_customers(t).to_vec())
                .collect(),
            missions: s.drone_missions.clone(),
        }
    }

    fn to_solution(&self) -> Solution {
        Solution::from_routes(&self.routes, &self.missions)
    }

    fn locate(&self, c: usize) -> Option<(Carrier, usize)> {
        for (k, r) in self.routes.iter().enumerate() {
            if let Some(p) = r.iter().position(|&x| x == c) {
                return Some((Carrier::Truck(k), p));
            }
        }
        for (d, m) in self.missions.iter().enumerate() {
            if let Some(p) = m.iter().position(|&x| x == c) {
                return Some((Carrier::Drone(d), p));
            }
        }
        None
    }

    fn remove(&mut self, c: usize) {
        if let Some((carrier, p)) = self.locate(c) {
            match carrier {
                Carrier::Truck(k) => self.routes[k].remove(p),
                Carrier::Drone(d) => self.missions[d].remove(p),
            };
        }
    }

    fn insert(&mut self, c: usize, carrier: Carrier, pos: usize) {
        match carrier {
            Carrier::Truck(k) => self.routes[k].insert(pos, c),
            Carrier::Drone(d) => {
                let m = &mut self.missions[d];
                let at = m.partition_point(|&x| x < c);
                m.insert(at, c);
            }
        }
    }
}

/// Objective and total vehicle time of a plan, or `None` if a limit is broken.
fn evaluate(inst: &Instance, p: &Plan) -> Option<(i64, i64)> {
    let mut total = 0;
    let mut obj = 0;
    let mc = inst.min_cost();
    for r in &p.routes {
        if r.is_empty() {
            continue;
        }
        let mut time = 0;
        let mut cost = 0;
        let mut weight = 0;
        let mut prev = 0;
        for &c in r.iter().chain(std::iter::once(&0)) {
            time += inst.truck_time(prev, c);
            if let Some(m) = mc {
                cost += m.truck_cost().get(prev, c);
                weight += m.weight(c);
            }
            prev = c;
        }
        if let Some(m) = mc {
            if time > m.truck_time_limit() || weight > m.truck_capacity() {
                return None;
            }
            obj += cost;
        } else {
            obj = obj.max(time);
        }
        total += time;
    }
    for m in &p.missions {
        let mut time = 0;
        let mut cost = 0;
        for &c in m {
            time += inst.drone_time(c)?;
            cost += mc.map_or(0, |x| x.drone_cost(c).unwrap_or(0));
        }
        match mc {
            Some(x) => {
                if time > x.drone_time_limit() {
                    return None;
                }
                obj += cost;
            }
            None => obj = obj.max(time),
        }
        total += time;
    }
    Some((obj, total))
}

/// Cheapest feasible insertion of `c`, by resulting `(objective, total)`.
fn best_insertion(inst: &Instance, p: &Plan, c: usize) -> Option<(Carrier, usize, (i64, i64))> {
    let mut best: Option<(Carrier, usize, (i64, i64))> = None;
    let mut trial = p.clone();
    let mut consider = |carrier: Carrier, pos: usize, trial: &mut Plan| {
        trial.insert(c, carrier, pos);
        if let Some(key) = evaluate(inst, trial) {
            if best.as_ref().map_or(true, |b| key < b.2) {
                best = Some((carrier, pos, key));
            }
        }
        trial.remove(c);
    };
    if inst.is_eligible(c) {
        for d in 0..p.missions.len() {
            consider(Carrier::Drone(d), 0, &mut trial);
        }
    }
    for k in 0..p.routes.len() {
        for pos in 0..=p.routes[k].len() {
            consider(Carrier::Truck(k), pos, &mut trial);
        }
    }
    best
}

fn greedy(inst: &Instance, order: &[usize]) -> Option<Plan> {
    let mut p = Plan {
        routes: vec![Vec::new(); inst.truck_count()],
        missions: vec![Vec::new(); inst.drone_count()],
    };
    for &c in order {
        let (carrier, pos, _) = best_insertion(inst, &p, c)?;
        p.insert(c, carrier, pos);
    }
    Some(p)
}

/// Greedy starting solution: each customer goes where it raises the
/// objective least (makespan for min-time, cost for min-cost), with cheapest
/// insertion into truck tours. Several customer orders are tried; `None` when
/// none of them respects the min-cost limits, which does not prove
/// infeasibility.
pub fn construct_initial(instance: &Instance) -> Option<Solution> {
    let n = instance.customers();
    let customers: Vec<usize> = (1..=n).collect();
    let round_trip = |c: usize| instance.truck_time(0, c) + instance.truck_time(c, 0);
    let mut orders = Vec::new();

    // truck-only customers first, farthest first
    let mut o = customers.clone();
    o.sort_by_key(|&c| (instance.is_eligible(c), std::cmp::Reverse(round_trip(c)), c));
    orders.push(o);
    if instance.variant() == Variant::MinCost {
        let mc = instance.min_cost().expect("min-cost data");
        let mut o = customers.clone();
        o.sort_by_key(|&c| (std::cmp::Reverse(mc.weight(c)), c));
        orders.push(o);
        let mut o = customers.clone();
        o.sort_by_key(|&c| (instance.is_eligible(c), std::cmp::Reverse(mc.weight(c)), c));
        orders.push(o);
        orders.push(customers.clone());
    }

    let mut best: Option<(Plan, (i64, i64))> = None;
    for order in &orders {
        if let Some(p) = greedy(instance, order) {
            let key = evaluate(instance, &p).expect("greedy keeps limits");
            if best.as_ref().map_or(true, |b| key < b.1) {
                best = Some((p, key));
            }
        }
    }
    let sol = best?.0.to_solution();
    debug_assert!(validate_solution(instance, &sol).is_ok_and(|r| r.feasible()));
    Some(sol)
}

/// Applies a move; `None` if it does not fit the plan or breaks a limit.
fn apply(inst: &Instance, p: &Plan, mv: &NeighborhoodMove) -> Option<Plan> {
    let mut q = p.clone();
    match mv.kind {
        MoveKind::RelocateCustomer | MoveKind::TruckToDrone | MoveKind::DroneToTruck => {
            let c = mv.customers[0];
            let to = mv.vehicles[0];
            if matches!(to, Carrier::Drone(_)) && !inst.is_eligible(c) {
                return None;
            }
            q.remove(c);
            if let Carrier::Truck(k) = to {
                if mv.positions[0] > q.routes[k].len() {
                    return None;
                }
            }
            q.insert(c, to, mv.positions[0]);
        }
        MoveKind::SwapCustomers => {
            let (a, b) = (mv.customers[0], mv.customers[1]);
            let (ca, pa) = q.locate(a)?;
            let (cb, pb) = q.locate(b)?;
            if (matches!(cb, Carrier::Drone(_)) && !inst.is_eligible(a))
                || (matches!(ca, Carrier::Drone(_)) && !inst.is_eligible(b))
            {
                return None;
            }
            let slot = |q: &mut Plan, c: Carrier, p: usize, v: usize| match c {
                Carrier::Truck(k) => q.routes[k][p] = v,
                Carrier::Drone(d) => q.missions[d][p] = v,
            };
            slot(&mut q, ca, pa, b);
            slot(&mut q, cb, pb, a);
            for m in &mut q.missions {
                m.sort_unstable();
            }
        }
        MoveKind::TwoOptWithinTour => {
            let Carrier::Truck(k) = mv.vehicles[0] else { return None };
            let (i, j) = (mv.positions[0], mv.positions[1]);
            if i >= j || j >= q.routes[k].len() {
                return None;
            }
            q.routes[k][i..=j].reverse();
        }
        MoveKind::RuinRecreate(_) => {
            for &c in &mv.customers {
                q.remove(c);
            }
            for &c in &mv.customers {
                let (carrier, pos, _) = best_insertion(inst, &q, c)?;
                q.insert(c, carrier, pos);
            }
        }
    }
    evaluate(inst, &q).map(|_| q)
}

/// Every relocate, swap and 2-opt move of `p`, in a fixed order.
fn neighborhood(inst: &Instance, p: &Plan) -> Vec<NeighborhoodMove> {
    let mut moves = Vec::new();
    let n = inst.customers();
    for c in 1..=n {
        let Some((from, _)) = p.locate(c) else { continue };
        for k in 0..p.routes.len() {
            let len = p.routes[k].len() - usize::from(from == Carrier::Truck(k));
            for pos in 0..=len {
                let kind = if matches!(from, Carrier::Drone(_)) {
                    MoveKind::DroneToTruck
                } else {
                    MoveKind::RelocateCustomer
                };
                moves.push(NeighborhoodMove {
                    kind,
                    vehicles: vec![Carrier::Truck(k)],
                    customers: vec![c],
                    positions: vec![pos],
                });
            }
        }
        if inst.is_eligible(c) {
            for d in 0..p.missions.len() {
                if from == Carrier::Drone(d) {
                    continue;
                }
                let kind = if matches!(from, Carrier::Truck(_)) {
                    MoveKind::TruckToDrone
                } else {
                    MoveKind::RelocateCustomer
                };
                moves.push(NeighborhoodMove {
                    kind,
                    vehicles: vec![Carrier::Drone(d)],
                    customers: vec![c],
                    positions: vec![0],
                });
            }
        }
    }
    for a in 1..=n {
        for b in a + 1..=n {
            moves.push(NeighborhoodMove {
                kind: MoveKind::SwapCustomers,
                vehicles: Vec::new(),
                customers: vec![a, b],
                positions: Vec::new(),
            });
        }
    }
    for (k, r) in p.routes.iter().enumerate() {
        for i in 0..r.len() {
            for j in i + 1..r.len() {
                moves.push(NeighborhoodMove {
                    kind: MoveKind::TwoOptWithinTour,
                    vehicles: vec![Carrier::Truck(k)],
                    customers: Vec::new(),
                    positions: vec![i, j],
                });
            }
        }
    }
    moves
}

struct Search<'a, F: FnMut(&Solution, &NeighborhoodMove)> {
    inst: &'a Instance,
    deadline: Instant,
    observer: F,
}

impl<F: FnMut(&Solution, &NeighborhoodMove)> Search<'_, F> {
    /// First-improvement descent to a local optimum.
    fn descend(&mut self, p: &mut Plan, key: &mut (i64, i64), report: bool) {
        'restart: loop {
            if Instant::now() >= self.deadline {
                return;
            }
            for mv in neighborhood(self.inst, p) {
                if let Some(q) = apply(self.inst, p, &mv) {
                    let k = evaluate(self.inst, &q).expect("applied move is feasible");
                    if k < *key {
                        *p = q;
                        *key = k;
                        if report {
                            (self.observer)(&p.to_solution(), &mv);
                        }
                        continue 'restart;
                    }
                }
            }
            return;
        }
    }
}

/// Local search from a feasible `start`: relocate, swap, 2-opt and
/// truck/drone transfers to a local optimum, then ruin-and-recreate
/// perturbations kept only on strict improvement of (objective, total
/// vehicle time). Deterministic for a given seed unless `budget` runs out.
pub fn improve(instance: &Instance, start: &Solution, budget: Duration, seed: u64) -> Solution {
    improve_with(instance, start, budget, seed, |_, _| {})
}

/// [`improve`] calling `observer` with every accepted solution and the move
/// that produced it.
pub fn improve_with(
    instance: &Instance,
    start: &Solution,
    budget: Duration,
    seed: u64,
    observer: impl FnMut(&Solution, &NeighborhoodMove),
) -> Solution {
    if budget.is_zero() {
        return start.clone();
    }
    let mut cur = Plan::from_solution(start);
    let Some(mut key) = evaluate(instance, &cur) else {
        return start.clone();
    };
    if cur.to_solution().truck_tours != start.truck_tours {
        // start was not in the expected shape; leave it alone
        return start.clone();
    }
    let initial_key = key;
    let mut s = Search {
        inst: instance,
        deadline: Instant::now() + budget,
        observer,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = instance.customers();
    let ruin = (n / 10).max(2).min(n);
    s.descend(&mut cur, &mut key, true);
    let rounds = 30 + 5 * n;
    for _ in 0..rounds {
        if Instant::now() >= s.deadline || n == 0 {
            break;
        }
        let mut customers: Vec<usize> = (1..=n).collect();
        customers.shuffle(&mut rng);
        customers.truncate(ruin);
        if rng.gen_bool(0.5) {
            // related removal: nearest neighbours of the first pick
            let seed_c = customers[0];
            let mut near: Vec<usize> = (1..=n).collect();
            near.sort_by_key(|&c| (instance.truck_time(seed_c, c), c));
            customers = near.into_iter().take(ruin).collect();
            customers.shuffle(&mut rng);
        }
        let mv = NeighborhoodMove {
            kind: MoveKind::RuinRecreate(ruin),
            vehicles: Vec::new(),
            customers,
            positions: Vec::new(),
        };
        let Some(mut q) = apply(instance, &cur, &mv) else { continue };
        let mut k = evaluate(instance, &q).expect("applied move is feasible");
        s.descend(&mut q, &mut k, false);
        if k < key {
            cur = q;
            key = k;
            (s.observer)(&cur.to_solution(), &mv);
        }
    }
    debug_assert!(key <= initial_key);
    cur.to_solution()
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::model::{objective_value, InstanceMeta, InstanceParts, Matrix};

    fn inst(times: Vec<Vec<i64>>, drones: &[(usize, i64)], trucks: usize, drone_count: usize) -> Instance {
        Instance::new(InstanceParts {
            meta: InstanceMeta::default(),
            truck_count: trucks,
            drone_count,
            truck_time: Matrix::from_rows(times).unwrap(),
            drone_time: drones.iter().copied().collect::<BTreeMap<_, _>>(),
            min_cost: None,
        })
        .unwrap()
    }

    #[test]
    fn drone_takes_single_customer() {
        let i = inst(vec![vec![0, 5], vec![5, 0]], &[(1, 6)], 1, 1);
        let s = construct_initial(&i).unwrap();
        assert_eq!(s, Solution::new(vec![vec![]], vec![vec![1]]));
        assert_eq!(objective_value(&i, &s).unwrap(), 6);
    }

    #[test]
    fn truck_only_single_tour() {
        let t = Matrix::from_fn(4, |i, j| (i as i64 - j as i64).abs());
        let rows = (0..4).map(|i| t.row(i).to_vec()).collect();
        let i = inst(rows, &[], 1, 1);
        let s = construct_initial(&i).unwrap();
        assert_eq!(s.truck_tours.len(), 1);
        let mut visited = Solution::tour_customers(&s.truck_tours[0]).to_vec();
        visited.sort_unstable();
        assert_eq!(visited, vec![1, 2, 3]);
    }

    #[test]
    fn zero_budget_is_identity() {
        let i = inst(vec![vec![0, 5], vec![5, 0]], &[(1, 6)], 1, 1);
        let start = Solution::new(vec![vec![0, 1, 0]], vec![vec![]]);
        assert_eq!(improve(&i, &start, Duration::ZERO, 3), start);
    }

    #[test]
    fn improve_moves_customer_to_drone() {
        let i = inst(vec![vec![0, 5], vec![5, 0]], &[(1, 6)], 1, 1);
        let start = Solution::new(vec![vec![0, 1, 0]], vec![vec![]]);
        let mut seen = Vec::new();
        let out = improve_with(&i, &start, Duration::from_secs(1), 0, |s, m| {
            seen.push((s.clone(), m.kind));
        });
        assert_eq!(objective_value(&i, &out).unwrap(), 6);
        assert_eq!(seen.len(), 1);
        assert_eq!(seen[0].1, MoveKind::TruckToDrone);
    }
}
