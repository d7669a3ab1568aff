use thiserror::Error;

use super::ir::*;
use crate::model::{objective_unchecked, Instance, Solution};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("assignment has {found} values, model has {expected} variables")]
    Length { expected: usize, found: usize },
    #[error("customer {0} lies on a cycle that misses the depot")]
    Subtour(usize),
    #[error("customer {0} is not served")]
    Uncovered(usize),
    #[error("customer {0} is served more than once")]
    Duplicate(usize),
    #[error("node {0} has an inconsistent successor")]
    BrokenTour(usize),
    #[error("{found} depot loops but only {trucks} trucks")]
    TooManyTours { found: usize, trucks: usize },
    #[error("solution has the wrong fleet size for this model")]
    Fleet,
    #[error("truck {0} is idle but the model forces truck use")]
    IdleTruck(usize),
    #[error("customer {0} cannot be served by a drone")]
    Ineligible(usize),
}

fn successor(layer: &ArcLayer, a: &Assignment, from: usize) -> Option<usize> {
    (0..layer.nodes()).find(|&to| {
        to != from && layer.get(from, to).is_some_and(|v| a.get(v) == 1)
    })
}

/// Follows arcs from the depot through `first` back to the depot.
fn follow(layer: &ArcLayer, a: &Assignment, first: usize, seen: &mut [bool]) -> Result<Vec<usize>, DecodeError> {
    let mut tour = vec![0];
    let mut cur = first;
    while cur != 0 {
        if seen[cur] {
            return Err(DecodeError::BrokenTour(cur));
        }
        seen[cur] = true;
        tour.push(cur);
        cur = successor(layer, a, cur).ok_or(DecodeError::BrokenTour(cur))?;
    }
    tour.push(0);
    Ok(tour)
}

/// Rebuilds truck tours and drone missions from a satisfying assignment.
///
/// Three-index models yield one tour per truck layer. Giant-tour models split
/// the depot loops in the order of their first customer and hand them to
/// trucks in that order; leftover trucks stay idle.
pub fn decode_solution(
    model: &ConstraintModel,
    assignment: &Assignment,
    instance: &Instance,
) -> Result<Solution, DecodeError> {
    if assignment.values.len() != model.vars.len() {
        return Err(DecodeError::Length {
            expected: model.vars.len(),
            found: assignment.values.len(),
        });
    }
    let nodes = model.node_count;
    let mut seen = vec![false; nodes];
    let mut tours = Vec::with_capacity(model.truck_count);

    if model.kind.is_three_index() {
        for layer in &model.key.arc_layers {
            match successor(layer, assignment, 0) {
                None => tours.push(Vec::new()),
                Some(first) => tours.push(follow(layer, assignment, first, &mut seen)?),
            }
        }
    } else {
        let layer = &model.key.arc_layers[0];
        for first in 1..nodes {
            if layer.get(0, first).is_some_and(|v| assignment.get(v) == 1) {
                tours.push(follow(layer, assignment, first, &mut seen)?);
            }
        }
        if tours.len() > model.truck_count {
            return Err(DecodeError::TooManyTours {
                found: tours.len(),
                trucks: model.truck_count,
            });
        }
        tours.resize(model.truck_count, Vec::new());
    }

    // A customer that is not self-looped in some layer but was not reached
    // from the depot sits on a detached cycle.
    for layer in &model.key.arc_layers {
        for i in 1..nodes {
            let skipped = layer.get(i, i).is_some_and(|v| assignment.get(v) == 1);
            if !skipped && !seen[i] {
                return Err(DecodeError::Subtour(i));
            }
        }
    }

    let mut missions = Vec::with_capacity(model.drone_count);
    for row in &model.key.drone_vars {
        let mut m = Vec::new();
        for (i, v) in row.iter().enumerate() {
            if v.is_some_and(|v| assignment.get(v) == 1) {
                if seen[i] {
                    return Err(DecodeError::Duplicate(i));
                }
                seen[i] = true;
                m.push(i);
            }
        }
        missions.push(m);
    }
    if let Some(i) = (1..nodes).find(|&i| !seen[i]) {
        return Err(DecodeError::Uncovered(i));
    }
    debug_assert_eq!(nodes, instance.node_count());
    Ok(Solution::new(tours, missions))
}

/// Inverse of [`decode_solution`]: the assignment that encodes `solution`,
/// with accumulators set along each tour and the makespan set to the
/// solution's objective. Giant-tour models need tours whose first customers
/// appear in ascending order for the round trip to be exact.
pub fn encode_solution(
    model: &ConstraintModel,
    solution: &Solution,
    instance: &Instance,
) -> Result<Assignment, DecodeError> {
    if solution.truck_tours.len() != model.truck_count
        || solution.drone_missions.len() != model.drone_count
    {
        return Err(DecodeError::Fleet);
    }
    let nodes = model.node_count;
    let mut a = Assignment::zeros(model.vars.len());
    let mut on_truck = vec![false; nodes];

    let set_arc = |a: &mut Assignment, layer: &ArcLayer, i: usize, j: usize| -> Result<(), DecodeError> {
        let v = layer.get(i, j).ok_or(DecodeError::BrokenTour(i))?;
        a.set(v, 1);
        Ok(())
    };

    if model.kind.is_three_index() {
        for (k, (layer, tour)) in model.key.arc_layers.iter().zip(&solution.truck_tours).enumerate() {
            let mut visited = vec![false; nodes];
            for w in tour.windows(2) {
                set_arc(&mut a, layer, w[0], w[1])?;
                visited[w[1]] = true;
                on_truck[w[1]] = true;
            }
            if tour.is_empty() {
                match layer.get(0, 0) {
                    Some(v) => a.set(v, 1),
                    None => return Err(DecodeError::IdleTruck(k)),
                }
            }
            for i in 1..nodes {
                if !visited[i] {
                    set_arc(&mut a, layer, i, i)?;
                }
            }
        }
    } else {
        let layer = &model.key.arc_layers[0];
        for tour in &solution.truck_tours {
            for w in tour.windows(2) {
                set_arc(&mut a, layer, w[0], w[1])?;
                on_truck[w[1]] = true;
            }
        }
        for i in 1..nodes {
            if !on_truck[i] {
                set_arc(&mut a, layer, i, i)?;
            }
        }
        let mc = instance.min_cost();
        for tour in &solution.truck_tours {
            let mut time = 0;
            let mut weight = 0;
            for w in tour.windows(2) {
                if w[1] == 0 {
                    break;
                }
                time += instance.truck_time(w[0], w[1]);
                weight += mc.map_or(0, |m| m.weight(w[1]));
                if let Some(&v) = model.key.arrival.get(w[1]) {
                    a.set(v, time);
                }
                if let Some(&v) = model.key.load.get(w[1]) {
                    a.set(v, weight);
                }
            }
        }
    }

    for (row, missions) in model.key.drone_vars.iter().zip(&solution.drone_missions) {
        for &i in missions {
            let v = row.get(i).copied().flatten().ok_or(DecodeError::Ineligible(i))?;
            a.set(v, 1);
        }
    }
    if let Some(alpha) = model.key.makespan {
        a.set(alpha, objective_unchecked(instance, solution));
    }
    Ok(a)
}
