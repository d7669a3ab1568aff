use super::store::Store;
use crate::formulations::ir::{ArcLayer, ConstraintModel, Lit, VarId};
use crate::model::{Instance, Variant};

const INF: i64 = i64::MAX / 4;

/// Model layout and instance weights the bound and the brancher work from.
#[derive(Debug, Clone)]
pub struct Layout {
    pub(crate) variant: Variant,
    pub(crate) three_index: bool,
    pub(crate) nodes: usize,
    pub(crate) trucks: usize,
    pub(crate) layers: Vec<ArcLayer>,
    pub(crate) drone_vars: Vec<Vec<Option<VarId>>>,
    pub(crate) makespan: Option<VarId>,
    pub(crate) arrival: Vec<VarId>,
    /// `arc_w[i * nodes + j]`: time for min-time, cost for min-cost.
    pub(crate) arc_w: Vec<i64>,
    pub(crate) drone_w: Vec<i64>,
    /// Per customer, the literals that assign it to a vehicle with a cost hint.
    pub(crate) coverage: Vec<Vec<(Lit, i64)>>,
}

impl Layout {
    pub fn new(model: &ConstraintModel, instance: &Instance) -> Self {
        let nodes = model.node_count;
        let mut arc_w = vec![0; nodes * nodes];
        for i in 0..nodes {
            for j in 0..nodes {
                if i != j {
                    arc_w[i * nodes + j] = instance.arc_weight(i, j);
                }
            }
        }
        let drone_w: Vec<i64> = (0..nodes).map(|i| instance.drone_weight(i).unwrap_or(0)).collect();
        let mut coverage = vec![Vec::new(); nodes];
        for (i, group) in coverage.iter_mut().enumerate().skip(1) {
            for row in &model.key.drone_vars {
                if let Some(v) = row[i] {
                    group.push((Lit::pos(v), drone_w[i]));
                }
            }
            let round_trip = arc_w[i] + arc_w[i * nodes];
            for layer in &model.key.arc_layers {
                if let Some(v) = layer.get(i, i) {
                    group.push((Lit::neg(v), round_trip));
                }
            }
        }
        Self {
            variant: model.kind.variant(),
            three_index: model.kind.is_three_index(),
            nodes,
            trucks: model.truck_count,
            layers: model.key.arc_layers.clone(),
            drone_vars: model.key.drone_vars.clone(),
            makespan: model.key.makespan,
            arrival: model.key.arrival.clone(),
            arc_w,
            drone_w,
            coverage,
        }
    }

    #[inline]
    pub(crate) fn w(&self, i: usize, j: usize) -> i64 {
        self.arc_w[i * self.nodes + j]
    }

    fn arc_possible(&self, s: &Store, layer: &ArcLayer, i: usize, j: usize) -> bool {
        layer.get(i, j).is_some_and(|v| s.hi(v) == 1)
    }

    /// Customer `i` (or the depot) is known to be on a tour of `layer`.
    pub(crate) fn active(&self, s: &Store, layer: &ArcLayer, i: usize) -> bool {
        match layer.get(i, i) {
            Some(v) => s.hi(v) == 0,
            None => i != 0 || (1..self.nodes).any(|c| self.active(s, layer, c)),
        }
    }

    /// Cheapest possible non-loop arc out of and into `i`.
    fn min_arcs(&self, s: &Store, layer: &ArcLayer, i: usize) -> (i64, i64) {
        let (mut out, mut inn) = (INF, INF);
        for j in 0..self.nodes {
            if j == i {
                continue;
            }
            if self.arc_possible(s, layer, i, j) {
                out = out.min(self.w(i, j));
            }
            if self.arc_possible(s, layer, j, i) {
                inn = inn.min(self.w(j, i));
            }
        }
        (out, inn)
    }

    fn drone_state(&self, s: &Store) -> (Vec<i64>, Vec<bool>) {
        let mut loads = vec![0; self.drone_vars.len()];
        let mut on_drone = vec![false; self.nodes];
        for (d, row) in self.drone_vars.iter().enumerate() {
            for (i, v) in row.iter().enumerate() {
                if let Some(v) = v {
                    if s.lo(*v) == 1 {
                        loads[d] += self.drone_w[i];
                        on_drone[i] = true;
                    }
                }
            }
        }
        (loads, on_drone)
    }

    /// Admissible lower bound on the objective of any completion of `s`.
    pub fn lower_bound(&self, s: &Store) -> i64 {
        let lb = match self.variant {
            Variant::MinTime => self.min_time_bound(s),
            Variant::MinCost => self.min_cost_bound(s),
        };
        lb.min(INF)
    }

    fn min_time_bound(&self, s: &Store) -> i64 {
        let n = self.nodes;
        let mut lb = self.makespan.map_or(0, |a| s.lo(a));
        let (loads, on_drone) = self.drone_state(s);
        let mut work: i64 = loads.iter().sum();
        lb = lb.max(loads.iter().copied().max().unwrap_or(0));

        let mut assigned = on_drone;
        let mut layer_min = Vec::with_capacity(self.layers.len());
        let mut layer_sums = Vec::with_capacity(self.layers.len());
        for layer in &self.layers {
            let mins: Vec<(i64, i64)> = (0..n).map(|i| self.min_arcs(s, layer, i)).collect();
            let active: Vec<bool> = (1..n).map(|i| self.active(s, layer, i)).collect();
            let any = active.iter().any(|&a| a);
            let depot_active = any
                || layer.get(0, 0).map_or(self.three_index, |v| s.hi(v) == 0);
            let (mut out_sum, mut in_sum) = (0, 0);
            if depot_active {
                out_sum += mins[0].0;
                in_sum += mins[0].1;
            }
            for i in 1..n {
                if active[i - 1] {
                    assigned[i] = true;
                    out_sum += mins[i].0;
                    in_sum += mins[i].1;
                    if !self.three_index {
                        if let Some(&g) = self.arrival.get(i) {
                            lb = lb.max(s.lo(g) + mins[i].0);
                        }
                    }
                }
            }
            if self.three_index {
                lb = lb.max(out_sum.max(in_sum));
            }
            work += out_sum;
            layer_sums.push((out_sum, in_sum, depot_active));
            layer_min.push(mins);
        }

        for i in 1..n {
            if assigned[i] {
                continue;
            }
            let mut best = INF;
            let mut cheapest = INF;
            for (d, row) in self.drone_vars.iter().enumerate() {
                if row[i].is_some_and(|v| s.hi(v) == 1) {
                    best = best.min(loads[d] + self.drone_w[i]);
                    cheapest = cheapest.min(self.drone_w[i]);
                }
            }
            for (k, layer) in self.layers.iter().enumerate() {
                if !layer.get(i, i).map_or(true, |v| s.lo(v) == 0) {
                    continue;
                }
                let (out, inn) = layer_min[k][i];
                if out >= INF || inn >= INF {
                    continue;
                }
                let mut option = out + inn;
                if self.three_index {
                    let (out_sum, in_sum, depot_active) = layer_sums[k];
                    let (d_out, d_in) = if depot_active { (0, 0) } else { layer_min[k][0] };
                    option = option.max((out_sum + out + d_out).max(in_sum + inn + d_in));
                }
                best = best.min(option);
                cheapest = cheapest.min(out);
            }
            lb = lb.max(best);
            work = work.saturating_add(cheapest);
        }

        let vehicles = (self.trucks + self.drone_vars.len()) as i64;
        if work < INF {
            lb = lb.max((work + vehicles - 1) / vehicles);
        }
        lb
    }

    fn min_cost_bound(&self, s: &Store) -> i64 {
        let n = self.nodes;
        let (loads, on_drone) = self.drone_state(s);
        let mut lb: i64 = loads.iter().sum();
        let mut assigned = on_drone;
        let mut truck_option = vec![INF; n];

        for layer in &self.layers {
            let mut any_active = false;
            for i in 0..n {
                let (out, _) = self.min_arcs(s, layer, i);
                let can_skip = layer.get(i, i).is_some_and(|v| s.hi(v) == 1);
                if i > 0 {
                    if self.active(s, layer, i) {
                        assigned[i] = true;
                        any_active = true;
                        lb = lb.saturating_add(out);
                    } else if can_skip {
                        truck_option[i] = truck_option[i].min(out);
                    }
                } else if self.three_index && !can_skip {
                    lb = lb.saturating_add(out);
                }
            }
            if !self.three_index {
                // the depot may open several tours
                let mut committed = 0;
                let mut opened = false;
                for j in 1..n {
                    if layer.get(0, j).is_some_and(|v| s.lo(v) == 1) {
                        committed += self.w(0, j);
                        opened = true;
                    }
                }
                lb = lb.saturating_add(committed);
                if any_active && !opened {
                    lb = lb.saturating_add(self.min_arcs(s, layer, 0).0);
                }
            } else if any_active {
                // depot skip was still possible, but a customer is on board
                if layer.get(0, 0).is_some_and(|v| s.hi(v) == 1) {
                    lb = lb.saturating_add(self.min_arcs(s, layer, 0).0);
                }
            }
        }

        for i in 1..n {
            if assigned[i] {
                continue;
            }
            let mut best = truck_option[i];
            for row in &self.drone_vars {
                if row[i].is_some_and(|v| s.hi(v) == 1) {
                    best = best.min(self.drone_w[i]);
                }
            }
            lb = lb.saturating_add(best);
        }
        lb
    }
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::engine::{Propagation, Propagator};
    use crate::formulations::{build_model, encode_solution, BuildOptions, ModelKind};
    use crate::model::{objective_value, InstanceMeta, InstanceParts, Matrix, Solution};

    fn single() -> Instance {
        Instance::new(InstanceParts {
            meta: InstanceMeta::default(),
            truck_count: 1,
            drone_count: 1,
            truck_time: Matrix::from_rows(vec![vec![0, 5], vec![5, 0]]).unwrap(),
            drone_time: BTreeMap::from([(1, 6)]),
            min_cost: None,
        })
        .unwrap()
    }

    #[test]
    fn root_bound_is_admissible_on_single_customer() {
        let inst = single();
        for kind in [ModelKind::Mt3Idx, ModelKind::Mt2Idx] {
            let model = build_model(kind, &inst, &BuildOptions::default()).unwrap();
            let mut s = Store::new(&model);
            let mut p = Propagator::new(&model);
            assert_eq!(p.propagate_all(&mut s), Propagation::Fixpoint);
            let lb = Layout::new(&model, &inst).lower_bound(&s);
            assert!(lb <= 6, "{kind}: {lb}");
            assert!(lb >= 5, "{kind}: {lb}");
        }
    }

    #[test]
    fn fixed_state_bound_is_exact() {
        let inst = single();
        let sol = Solution::new(vec![vec![0, 1, 0]], vec![vec![]]);
        let value = objective_value(&inst, &sol).unwrap();
        for kind in [ModelKind::Mt3Idx, ModelKind::Mt2Idx] {
            let model = build_model(kind, &inst, &BuildOptions::default()).unwrap();
            let a = encode_solution(&model, &sol, &inst).unwrap();
            let mut s = Store::new(&model);
            for (i, &v) in a.values().iter().enumerate() {
                s.fix(model_var(i), v).unwrap();
            }
            assert_eq!(Layout::new(&model, &inst).lower_bound(&s), value);
        }
    }

    fn model_var(i: usize) -> VarId {
        VarId(i as u32)
    }
}
