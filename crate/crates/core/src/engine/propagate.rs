use std::collections::VecDeque;

use super::circuit::{circuit_filter, ArcState, ArcTable, CircuitMode};
use super::store::{Conflict, Store};
use crate::formulations::ir::{CircuitArcs, Cmp, Constraint, ConstraintModel, LinExpr, Lit, Relation};

/// Result of running propagation to a fixpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Propagation {
    Fixpoint,
    Conflict,
}

/// `sum(coef * lit) <= rhs`, constant folded in.
#[derive(Debug, Clone)]
struct LeRow {
    terms: Vec<(i64, Lit)>,
    rhs: i64,
}

impl LeRow {
    fn from_expr(expr: &LinExpr, rhs: i64) -> Self {
        Self {
            terms: expr.terms.clone(),
            rhs: rhs - expr.constant,
        }
    }

    fn negated(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|&(c, l)| (-c, l)).collect(),
            rhs: -self.rhs,
        }
    }

    fn min_sum(&self, s: &Store) -> i64 {
        self.terms.iter().map(|&(c, l)| term_min(s, c, l)).sum()
    }

    fn propagate(&self, s: &mut Store) -> Result<(), Conflict> {
        let min = self.min_sum(s);
        if min > self.rhs {
            return Err(Conflict);
        }
        for &(c, l) in &self.terms {
            let (lo, hi) = s.lit_bounds(l);
            if lo == hi {
                continue;
            }
            let slack = self.rhs - (min - term_min(s, c, l));
            if c > 0 {
                let cap = slack.div_euclid(c);
                if cap < hi {
                    s.set_lit_hi(l, cap)?;
                }
            } else {
                let floor = -slack.div_euclid(-c);
                if floor > lo {
                    s.set_lit_lo(l, floor)?;
                }
            }
        }
        Ok(())
    }
}

#[inline]
fn term_min(s: &Store, c: i64, l: Lit) -> i64 {
    let (lo, hi) = s.lit_bounds(l);
    if c > 0 {
        c * lo
    } else {
        c * hi
    }
}

fn rows_of(r: &Relation) -> Vec<LeRow> {
    let le = LeRow::from_expr(&r.expr, r.rhs);
    match r.cmp {
        Cmp::Le => vec![le],
        Cmp::Eq => {
            let ge = le.negated();
            vec![le, ge]
        }
    }
}

#[derive(Debug, Clone)]
enum Prop {
    ExactlyOne(Vec<Lit>),
    Rows(Vec<LeRow>),
    Implication { premise: Lit, rows: Vec<LeRow> },
    Circuit {
        nodes: usize,
        arcs: Vec<(usize, usize, Lit)>,
        mode: CircuitMode,
    },
}

impl Prop {
    fn expensive(&self) -> bool {
        matches!(self, Prop::Circuit { .. })
    }
}

/// Domain filtering for every constraint of a model plus an objective cutoff.
#[derive(Debug, Clone)]
pub struct Propagator {
    props: Vec<Prop>,
    watches: Vec<Vec<u32>>,
    cutoff: Option<i64>,
    objective_constant: i64,
    cutoff_dirty: bool,
    queued: Vec<bool>,
    cheap: VecDeque<u32>,
    heavy: VecDeque<u32>,
    changed: Vec<u32>,
    table: ArcTable,
}

impl Propagator {
    pub fn new(model: &ConstraintModel) -> Self {
        let mut props = Vec::with_capacity(model.constraints.len() + 1);
        let mut max_nodes = 0;
        for c in &model.constraints {
            props.push(match c {
                Constraint::ExactlyOne(lits) => Prop::ExactlyOne(lits.clone()),
                Constraint::Linear(r) => Prop::Rows(rows_of(r)),
                Constraint::Implication { premise, relation } => Prop::Implication {
                    premise: *premise,
                    rows: rows_of(relation),
                },
                Constraint::MaxBound { bound, expr } => {
                    let e = expr.clone().with(-1, Lit::pos(*bound));
                    Prop::Rows(vec![LeRow::from_expr(&e, 0)])
                }
                Constraint::Circuit(c) => {
                    max_nodes = max_nodes.max(c.nodes);
                    circuit_prop(c, CircuitMode::Single)
                }
                Constraint::MultipleCircuit { arcs, max_departures } => {
                    max_nodes = max_nodes.max(arcs.nodes);
                    circuit_prop(arcs, CircuitMode::Multiple { max_departures: *max_departures })
                }
            });
        }
        let objective = model.objective.expr();
        let objective_constant = objective.constant;
        props.push(Prop::Rows(vec![LeRow {
            terms: objective.terms,
            rhs: i64::MAX,
        }]));

        let mut watches = vec![Vec::new(); model.vars.len()];
        for (i, p) in props.iter().enumerate() {
            let mut vars: Vec<usize> = match p {
                Prop::ExactlyOne(lits) => lits.iter().map(|l| l.var().index()).collect(),
                Prop::Rows(rows) => rows.iter().flat_map(|r| r.terms.iter().map(|t| t.1.var().index())).collect(),
                Prop::Implication { premise, rows } => std::iter::once(premise.var().index())
                    .chain(rows.iter().flat_map(|r| r.terms.iter().map(|t| t.1.var().index())))
                    .collect(),
                Prop::Circuit { arcs, .. } => arcs.iter().map(|a| a.2.var().index()).collect(),
            };
            vars.sort_unstable();
            vars.dedup();
            for v in vars {
                watches[v].push(i as u32);
            }
        }
        let n = props.len();
        Self {
            props,
            watches,
            cutoff: None,
            objective_constant,
            cutoff_dirty: false,
            queued: vec![false; n],
            cheap: VecDeque::new(),
            heavy: VecDeque::new(),
            changed: Vec::new(),
            table: ArcTable::new(max_nodes),
        }
    }

    /// Requires the objective to be at most `bound`.
    pub fn set_cutoff(&mut self, bound: Option<i64>) {
        let rhs = bound.map_or(i64::MAX, |b| b - self.objective_constant);
        let last = self.props.len() - 1;
        if let Prop::Rows(rows) = &mut self.props[last] {
            rows[0].rhs = rhs;
        }
        self.cutoff = bound;
        self.cutoff_dirty = bound.is_some();
    }

    pub fn cutoff(&self) -> Option<i64> {
        self.cutoff
    }

    fn enqueue(&mut self, i: u32) {
        if self.queued[i as usize] {
            return;
        }
        self.queued[i as usize] = true;
        if self.props[i as usize].expensive() {
            self.heavy.push_back(i);
        } else {
            self.cheap.push_back(i);
        }
    }

    fn enqueue_changed(&mut self, store: &mut Store) {
        store.take_changed(&mut self.changed);
        let changed = std::mem::take(&mut self.changed);
        let cutoff_idx = (self.props.len() - 1) as u32;
        for &v in &changed {
            for k in 0..self.watches[v as usize].len() {
                let c = self.watches[v as usize][k];
                if c == cutoff_idx && self.cutoff.is_none() {
                    continue;
                }
                self.enqueue(c);
            }
        }
        self.changed = changed;
    }

    fn reset_queue(&mut self) {
        for i in self.cheap.drain(..).chain(self.heavy.drain(..)) {
            self.queued[i as usize] = false;
        }
    }

    /// Runs every propagator once, then to a fixpoint.
    pub fn propagate_all(&mut self, store: &mut Store) -> Propagation {
        for i in 0..self.props.len() as u32 {
            self.enqueue(i);
        }
        self.cutoff_dirty = false;
        self.run(store)
    }

    /// Propagates the consequences of domain changes made since the last call.
    pub fn propagate(&mut self, store: &mut Store) -> Propagation {
        if self.cutoff_dirty {
            self.enqueue((self.props.len() - 1) as u32);
            self.cutoff_dirty = false;
        }
        self.run(store)
    }

    fn run(&mut self, store: &mut Store) -> Propagation {
        self.enqueue_changed(store);
        loop {
            let next = match self.cheap.pop_front() {
                Some(i) => Some(i),
                None => self.heavy.pop_front(),
            };
            let Some(i) = next else {
                return Propagation::Fixpoint;
            };
            self.queued[i as usize] = false;
            if self.apply(i as usize, store).is_err() {
                self.reset_queue();
                store.clear_changed();
                return Propagation::Conflict;
            }
            self.enqueue_changed(store);
        }
    }

    fn apply(&mut self, i: usize, store: &mut Store) -> Result<(), Conflict> {
        match &self.props[i] {
            Prop::ExactlyOne(lits) => exactly_one(lits, store),
            Prop::Rows(rows) => rows.iter().try_for_each(|r| r.propagate(store)),
            Prop::Implication { premise, rows } => match store.lit_value(*premise) {
                Some(false) => Ok(()),
                Some(true) => rows.iter().try_for_each(|r| r.propagate(store)),
                None => {
                    if rows.iter().any(|r| r.min_sum(store) > r.rhs) {
                        store.set_lit(*premise, false).map(|_| ())
                    } else {
                        Ok(())
                    }
                }
            },
            Prop::Circuit { nodes, arcs, mode } => {
                let table = &mut self.table;
                *table = ArcTable::new(*nodes);
                for &(a, b, l) in arcs {
                    let st = match store.lit_value(l) {
                        Some(true) => ArcState::True,
                        Some(false) => ArcState::False,
                        None => ArcState::Free,
                    };
                    table.set(a, b, st);
                }
                circuit_filter(*mode, table)?;
                for &(a, b, l) in arcs {
                    match table.get(a, b) {
                        ArcState::True => {
                            store.set_lit(l, true)?;
                        }
                        ArcState::False => {
                            store.set_lit(l, false)?;
                        }
                        _ => {}
                    }
                }
                Ok(())
            }
        }
    }
}

fn circuit_prop(c: &CircuitArcs, mode: CircuitMode) -> Prop {
    Prop::Circuit {
        nodes: c.nodes,
        arcs: c.arcs.iter().map(|a| (a.from, a.to, a.lit)).collect(),
        mode,
    }
}

fn exactly_one(lits: &[Lit], s: &mut Store) -> Result<(), Conflict> {
    let mut true_at = None;
    let mut free = 0;
    let mut last_free = None;
    for (k, &l) in lits.iter().enumerate() {
        match s.lit_value(l) {
            Some(true) => {
                if true_at.is_some() {
                    return Err(Conflict);
                }
                true_at = Some(k);
            }
            None => {
                free += 1;
                last_free = Some(l);
            }
            Some(false) => {}
        }
    }
    match (true_at, free) {
        (Some(k), f) if f > 0 => {
            for (j, &l) in lits.iter().enumerate() {
                if j != k {
                    s.set_lit(l, false)?;
                }
            }
            Ok(())
        }
        (Some(_), _) => Ok(()),
        (None, 0) => Err(Conflict),
        (None, 1) => s.set_lit(last_free.expect("free literal"), true).map(|_| ()),
        (None, _) => Ok(()),
    }
}
