use thiserror::Error;

use super::ir::*;
use crate::model::{Instance, Variant};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BuildError {
    #[error("model {model} needs a {expected:?} instance, got {found:?}")]
    VariantMismatch {
        model: ModelKind,
        expected: Variant,
        found: Variant,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BuildOptions {
    /// Drop the depot self-loop from three-index circuits so every truck has
    /// to serve at least one customer. Off by default: idle trucks allowed.
    pub force_truck_use: bool,
}

struct Builder {
    vars: Vec<VarDecl>,
    constraints: Vec<Constraint>,
}

impl Builder {
    fn new() -> Self {
        Self {
            vars: Vec::new(),
            constraints: Vec::new(),
        }
    }

    fn boolean(&mut self, tag: VarTag) -> VarId {
        self.int(tag, 0, 1)
    }

    fn int(&mut self, tag: VarTag, lo: i64, hi: i64) -> VarId {
        let id = VarId(self.vars.len() as u32);
        self.vars.push(VarDecl { tag, lo, hi });
        id
    }

    fn post(&mut self, c: Constraint) {
        self.constraints.push(c);
    }
}

fn check_variant(kind: ModelKind, instance: &Instance) -> Result<(), BuildError> {
    if instance.variant() != kind.variant() {
        return Err(BuildError::VariantMismatch {
            model: kind,
            expected: kind.variant(),
            found: instance.variant(),
        });
    }
    Ok(())
}

/// Upper bound on the duration of any single truck tour.
fn longest_tour_bound(instance: &Instance) -> i64 {
    let m = instance.truck_times();
    (0..m.size())
        .map(|i| m.row(i).iter().copied().max().unwrap_or(0))
        .sum()
}

fn drone_vars(b: &mut Builder, instance: &Instance) -> Vec<Vec<Option<VarId>>> {
    let nodes = instance.node_count();
    (0..instance.drone_count())
        .map(|d| {
            let mut row = vec![None; nodes];
            for &i in instance.eligible() {
                row[i] = Some(b.boolean(VarTag::DroneVisit {
                    drone: d,
                    customer: i,
                }));
            }
            row
        })
        .collect()
}

/// Circuit arc variables for one truck; `with_depot_loop` declares `z[k][0][0]`.
fn truck_layer(b: &mut Builder, truck: usize, nodes: usize, with_depot_loop: bool) -> ArcLayer {
    let mut layer = ArcLayer::new(nodes);
    for from in 0..nodes {
        for to in 0..nodes {
            if from == 0 && to == 0 && !with_depot_loop {
                continue;
            }
            layer.set(from, to, b.boolean(VarTag::TruckArc { truck, from, to }));
        }
    }
    layer
}

fn giant_layer(b: &mut Builder, nodes: usize) -> ArcLayer {
    let mut layer = ArcLayer::new(nodes);
    for from in 0..nodes {
        for to in 0..nodes {
            if from == 0 && to == 0 {
                continue;
            }
            layer.set(from, to, b.boolean(VarTag::Arc { from, to }));
        }
    }
    layer
}

fn circuit_arcs(layer: &ArcLayer) -> CircuitArcs {
    let nodes = layer.nodes();
    let mut arcs = Vec::new();
    for from in 0..nodes {
        for to in 0..nodes {
            if let Some(v) = layer.get(from, to) {
                arcs.push(ArcLit {
                    from,
                    to,
                    lit: Lit::pos(v),
                });
            }
        }
    }
    CircuitArcs { nodes, arcs }
}

/// One coverage constraint per customer: exactly one of its drone literals or
/// truck visit indicators (negated self-loops) holds.
fn post_coverage(
    b: &mut Builder,
    instance: &Instance,
    layers: &[ArcLayer],
    drones: &[Vec<Option<VarId>>],
) {
    for i in 1..instance.node_count() {
        let mut lits: Vec<Lit> = drones
            .iter()
            .filter_map(|row| row[i])
            .map(Lit::pos)
            .collect();
        lits.extend(
            layers
                .iter()
                .map(|l| Lit::neg(l.get(i, i).expect("customer self-loop"))),
        );
        b.post(Constraint::ExactlyOne(lits));
    }
}

/// `sum t_ij * arc_ij` over the non-loop arcs of a layer.
fn arc_sum(layer: &ArcLayer, weight: impl Fn(usize, usize) -> i64) -> LinExpr {
    let mut e = LinExpr::new();
    for from in 0..layer.nodes() {
        for to in 0..layer.nodes() {
            if from == to {
                continue;
            }
            if let Some(v) = layer.get(from, to) {
                e.add(weight(from, to), Lit::pos(v));
            }
        }
    }
    e
}

fn drone_sum(row: &[Option<VarId>], weight: impl Fn(usize) -> i64) -> LinExpr {
    let mut e = LinExpr::new();
    for (i, v) in row.iter().enumerate() {
        if let Some(v) = v {
            e.add(weight(i), Lit::pos(*v));
        }
    }
    e
}

fn finish(
    b: Builder,
    kind: ModelKind,
    instance: &Instance,
    objective: Objective,
    key: DecodeKey,
) -> ConstraintModel {
    ConstraintModel {
        kind,
        vars: b.vars,
        constraints: b.constraints,
        objective,
        key,
        node_count: instance.node_count(),
        truck_count: instance.truck_count(),
        drone_count: instance.drone_count(),
    }
}

/// Min-time model with one circuit per truck.
pub fn build_mt_3idx(instance: &Instance, options: &BuildOptions) -> Result<ConstraintModel, BuildError> {
    check_variant(ModelKind::Mt3Idx, instance)?;
    let nodes = instance.node_count();
    let mut b = Builder::new();
    let layers: Vec<ArcLayer> = (0..instance.truck_count())
        .map(|k| truck_layer(&mut b, k, nodes, !options.force_truck_use))
        .collect();
    let drones = drone_vars(&mut b, instance);
    let drone_total: i64 = instance.eligible().iter().filter_map(|&i| instance.drone_time(i)).sum();
    let alpha = b.int(
        VarTag::Makespan,
        0,
        longest_tour_bound(instance).max(drone_total),
    );

    for layer in &layers {
        b.post(Constraint::Circuit(circuit_arcs(layer)));
    }
    post_coverage(&mut b, instance, &layers, &drones);
    for layer in &layers {
        let expr = arc_sum(layer, |i, j| instance.truck_time(i, j));
        b.post(Constraint::MaxBound { bound: alpha, expr });
    }
    for row in &drones {
        let expr = drone_sum(row, |i| instance.drone_time(i).unwrap_or(0));
        b.post(Constraint::MaxBound { bound: alpha, expr });
    }

    let key = DecodeKey {
        arc_layers: layers,
        drone_vars: drones,
        makespan: Some(alpha),
        arrival: Vec::new(),
        load: Vec::new(),
    };
    Ok(finish(b, ModelKind::Mt3Idx, instance, Objective::MinimizeVar(alpha), key))
}

/// Posts `gamma_0 = 0` and `y_ij => gamma_j = gamma_i + t_ij` for `j != 0`.
fn post_accumulator(
    b: &mut Builder,
    layer: &ArcLayer,
    acc: &[VarId],
    step: impl Fn(usize, usize) -> i64,
) {
    b.post(Constraint::Linear(Relation::eq(LinExpr::var(acc[0]), 0)));
    for i in 0..layer.nodes() {
        for j in 1..layer.nodes() {
            if i == j {
                continue;
            }
            let arc = layer.get(i, j).expect("giant-tour arc");
            let expr = LinExpr::new()
                .with(1, Lit::pos(acc[j]))
                .with(-1, Lit::pos(acc[i]));
            b.post(Constraint::Implication {
                premise: Lit::pos(arc),
                relation: Relation::eq(expr, step(i, j)),
            });
        }
    }
}

/// Min-time giant-tour model with arrival-time accumulators.
pub fn build_mt_2idx(instance: &Instance, _options: &BuildOptions) -> Result<ConstraintModel, BuildError> {
    check_variant(ModelKind::Mt2Idx, instance)?;
    let nodes = instance.node_count();
    let mut b = Builder::new();
    let layer = giant_layer(&mut b, nodes);
    let drones = drone_vars(&mut b, instance);
    let tour_bound = longest_tour_bound(instance);
    let arrival: Vec<VarId> = (0..nodes)
        .map(|i| b.int(VarTag::Arrival(i), 0, tour_bound))
        .collect();
    let drone_total: i64 = instance.eligible().iter().filter_map(|&i| instance.drone_time(i)).sum();
    let alpha = b.int(VarTag::Makespan, 0, tour_bound.max(drone_total));

    b.post(Constraint::MultipleCircuit {
        arcs: circuit_arcs(&layer),
        max_departures: instance.truck_count(),
    });
    post_coverage(&mut b, instance, std::slice::from_ref(&layer), &drones);
    post_accumulator(&mut b, &layer, &arrival, |i, j| instance.truck_time(i, j));
    for i in 1..nodes {
        let back = layer.get(i, 0).expect("return arc");
        let expr = LinExpr::new()
            .with(1, Lit::pos(arrival[i]))
            .with(-1, Lit::pos(alpha));
        b.post(Constraint::Implication {
            premise: Lit::pos(back),
            relation: Relation::le(expr, -instance.truck_time(i, 0)),
        });
    }
    for row in &drones {
        let expr = drone_sum(row, |i| instance.drone_time(i).unwrap_or(0));
        b.post(Constraint::MaxBound { bound: alpha, expr });
    }

    let key = DecodeKey {
        arc_layers: vec![layer],
        drone_vars: drones,
        makespan: Some(alpha),
        arrival,
        load: Vec::new(),
    };
    Ok(finish(b, ModelKind::Mt2Idx, instance, Objective::MinimizeVar(alpha), key))
}

/// Min-cost model with one circuit per truck plus time and capacity limits.
pub fn build_mc_3idx(instance: &Instance, options: &BuildOptions) -> Result<ConstraintModel, BuildError> {
    check_variant(ModelKind::Mc3Idx, instance)?;
    let mc = instance.min_cost().expect("min-cost data");
    let nodes = instance.node_count();
    let mut b = Builder::new();
    let layers: Vec<ArcLayer> = (0..instance.truck_count())
        .map(|k| truck_layer(&mut b, k, nodes, !options.force_truck_use))
        .collect();
    let drones = drone_vars(&mut b, instance);

    for layer in &layers {
        b.post(Constraint::Circuit(circuit_arcs(layer)));
    }
    post_coverage(&mut b, instance, &layers, &drones);
    for layer in &layers {
        let expr = arc_sum(layer, |i, j| instance.truck_time(i, j));
        b.post(Constraint::Linear(Relation::le(expr, mc.truck_time_limit())));
    }
    for row in &drones {
        let expr = drone_sum(row, |i| instance.drone_time(i).unwrap_or(0));
        b.post(Constraint::Linear(Relation::le(expr, mc.drone_time_limit())));
    }
    for layer in &layers {
        // sum_j w_j * (1 - z_kjj) <= Q
        let mut expr = LinExpr::new();
        for j in 1..nodes {
            expr.add(mc.weight(j), Lit::neg(layer.get(j, j).expect("self-loop")));
        }
        b.post(Constraint::Linear(Relation::le(expr, mc.truck_capacity())));
    }

    let mut cost = LinExpr::new();
    for layer in &layers {
        cost.terms
            .extend(arc_sum(layer, |i, j| mc.truck_cost().get(i, j)).terms);
    }
    for row in &drones {
        cost.terms
            .extend(drone_sum(row, |i| mc.drone_cost(i).unwrap_or(0)).terms);
    }

    let key = DecodeKey {
        arc_layers: layers,
        drone_vars: drones,
        makespan: None,
        arrival: Vec::new(),
        load: Vec::new(),
    };
    Ok(finish(b, ModelKind::Mc3Idx, instance, Objective::MinimizeLinear(cost), key))
}

/// Min-cost giant-tour model with arrival-time and load accumulators.
pub fn build_mc_2idx(instance: &Instance, _options: &BuildOptions) -> Result<ConstraintModel, BuildError> {
    check_variant(ModelKind::Mc2Idx, instance)?;
    let mc = instance.min_cost().expect("min-cost data");
    let nodes = instance.node_count();
    let mut b = Builder::new();
    let layer = giant_layer(&mut b, nodes);
    let drones = drone_vars(&mut b, instance);
    let arrival: Vec<VarId> = (0..nodes)
        .map(|i| b.int(VarTag::Arrival(i), 0, mc.truck_time_limit()))
        .collect();
    let load: Vec<VarId> = (0..nodes)
        .map(|i| b.int(VarTag::Load(i), 0, mc.truck_capacity()))
        .collect();

    b.post(Constraint::MultipleCircuit {
        arcs: circuit_arcs(&layer),
        max_departures: instance.truck_count(),
    });
    post_coverage(&mut b, instance, std::slice::from_ref(&layer), &drones);
    for row in &drones {
        let expr = drone_sum(row, |i| instance.drone_time(i).unwrap_or(0));
        b.post(Constraint::Linear(Relation::le(expr, mc.drone_time_limit())));
    }
    post_accumulator(&mut b, &layer, &load, |_, j| mc.weight(j));
    post_accumulator(&mut b, &layer, &arrival, |i, j| instance.truck_time(i, j));
    for i in 1..nodes {
        let back = layer.get(i, 0).expect("return arc");
        b.post(Constraint::Implication {
            premise: Lit::pos(back),
            relation: Relation::le(
                LinExpr::var(arrival[i]),
                mc.truck_time_limit() - instance.truck_time(i, 0),
            ),
        });
    }

    let mut cost = arc_sum(&layer, |i, j| mc.truck_cost().get(i, j));
    for row in &drones {
        cost.terms
            .extend(drone_sum(row, |i| mc.drone_cost(i).unwrap_or(0)).terms);
    }

    let key = DecodeKey {
        arc_layers: vec![layer],
        drone_vars: drones,
        makespan: None,
        arrival,
        load,
    };
    Ok(finish(b, ModelKind::Mc2Idx, instance, Objective::MinimizeLinear(cost), key))
}

pub fn build_model(
    kind: ModelKind,
    instance: &Instance,
    options: &BuildOptions,
) -> Result<ConstraintModel, BuildError> {
    match kind {
        ModelKind::Mt3Idx => build_mt_3idx(instance, options),
        ModelKind::Mt2Idx => build_mt_2idx(instance, options),
        ModelKind::Mc3Idx => build_mc_3idx(instance, options),
        ModelKind::Mc2Idx => build_mc_2idx(instance, options),
    }
}
