//! A small routing-flavoured constraint language: boolean and bounded integer
//! variables, linear relations, implications, coverage and circuit globals.

use std::fmt;
use std::ops::Not;
use std::str::FromStr;

use crate::model::Variant;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub(crate) u32);

impl VarId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A variable, or for booleans possibly its negation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Lit {
    var: VarId,
    negated: bool,
}

impl Lit {
    #[inline]
    pub fn pos(var: VarId) -> Self {
        Self {
            var,
            negated: false,
        }
    }

    #[inline]
    pub fn neg(var: VarId) -> Self {
        Self { var, negated: true }
    }

    #[inline]
    pub fn var(self) -> VarId {
        self.var
    }

    #[inline]
    pub fn is_negated(self) -> bool {
        self.negated
    }

    /// Value of the literal given the value of its variable.
    #[inline]
    pub fn apply(self, value: i64) -> i64 {
        if self.negated {
            1 - value
        } else {
            value
        }
    }
}

impl Not for Lit {
    type Output = Lit;
    fn not(self) -> Lit {
        Lit {
            var: self.var,
            negated: !self.negated,
        }
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            write!(f, "!v{}", self.var.0)
        } else {
            write!(f, "v{}", self.var.0)
        }
    }
}

/// What a variable stands for in the routing model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarTag {
    /// Truck `truck` goes from `from` to `to`; a self-loop means it skips `from`.
    TruckArc { truck: usize, from: usize, to: usize },
    /// Some truck goes from `from` to `to`; a self-loop means no truck visits it.
    Arc { from: usize, to: usize },
    /// Drone `drone` serves `customer`.
    DroneVisit { drone: usize, customer: usize },
    Makespan,
    /// Time at which the serving truck reaches the node.
    Arrival(usize),
    /// Weight accumulated by the serving truck up to the node.
    Load(usize),
}

impl VarTag {
    pub fn is_boolean(self) -> bool {
        matches!(
            self,
            VarTag::TruckArc { .. } | VarTag::Arc { .. } | VarTag::DroneVisit { .. }
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VarDecl {
    pub tag: VarTag,
    pub lo: i64,
    pub hi: i64,
}

/// `constant + sum(coef * lit)`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LinExpr {
    pub terms: Vec<(i64, Lit)>,
    pub constant: i64,
}

impl LinExpr {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn var(var: VarId) -> Self {
        Self {
            terms: vec![(1, Lit::pos(var))],
            constant: 0,
        }
    }

    pub fn add(&mut self, coef: i64, lit: Lit) -> &mut Self {
        if coef != 0 {
            self.terms.push((coef, lit));
        }
        self
    }

    pub fn with(mut self, coef: i64, lit: Lit) -> Self {
        self.add(coef, lit);
        self
    }

    pub fn plus(mut self, constant: i64) -> Self {
        self.constant += constant;
        self
    }

    pub fn eval(&self, assignment: &Assignment) -> i64 {
        self.constant
            + self
                .terms
                .iter()
                .map(|&(c, l)| c * assignment.lit(l))
                .sum::<i64>()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cmp {
    Le,
    Eq,
}

/// `expr <= rhs` or `expr == rhs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    pub expr: LinExpr,
    pub cmp: Cmp,
    pub rhs: i64,
}

impl Relation {
    pub fn le(expr: LinExpr, rhs: i64) -> Self {
        Self {
            expr,
            cmp: Cmp::Le,
            rhs,
        }
    }

    pub fn eq(expr: LinExpr, rhs: i64) -> Self {
        Self {
            expr,
            cmp: Cmp::Eq,
            rhs,
        }
    }

    pub fn holds(&self, assignment: &Assignment) -> bool {
        let v = self.expr.eval(assignment);
        match self.cmp {
            Cmp::Le => v <= self.rhs,
            Cmp::Eq => v == self.rhs,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ArcLit {
    pub from: usize,
    pub to: usize,
    pub lit: Lit,
}

/// Arc literals over nodes `0..nodes`; node 0 is the depot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CircuitArcs {
    pub nodes: usize,
    pub arcs: Vec<ArcLit>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Constraint {
    ExactlyOne(Vec<Lit>),
    Linear(Relation),
    /// One cycle through the depot, every other node on it or self-looped.
    /// When the depot self-loop is declared and true, every node self-loops.
    Circuit(CircuitArcs),
    /// Vertex-disjoint cycles that all pass through the depot; customers off
    /// the cycles self-loop. At most `max_departures` arcs leave the depot.
    MultipleCircuit {
        arcs: CircuitArcs,
        max_departures: usize,
    },
    Implication {
        premise: Lit,
        relation: Relation,
    },
    /// `bound >= expr`.
    MaxBound {
        bound: VarId,
        expr: LinExpr,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConstraintKind {
    ExactlyOne,
    LinearLe,
    LinearEq,
    Circuit,
    MultipleCircuit,
    Implication,
    MaxBound,
}

impl Constraint {
    pub fn kind(&self) -> ConstraintKind {
        match self {
            Constraint::ExactlyOne(_) => ConstraintKind::ExactlyOne,
            Constraint::Linear(r) => match r.cmp {
                Cmp::Le => ConstraintKind::LinearLe,
                Cmp::Eq => ConstraintKind::LinearEq,
            },
            Constraint::Circuit(_) => ConstraintKind::Circuit,
            Constraint::MultipleCircuit { .. } => ConstraintKind::MultipleCircuit,
            Constraint::Implication { .. } => ConstraintKind::Implication,
            Constraint::MaxBound { .. } => ConstraintKind::MaxBound,
        }
    }

    /// Every variable the constraint reads.
    pub fn vars(&self) -> Vec<VarId> {
        let mut out = Vec::new();
        match self {
            Constraint::ExactlyOne(lits) => out.extend(lits.iter().map(|l| l.var())),
            Constraint::Linear(r) => out.extend(r.expr.terms.iter().map(|t| t.1.var())),
            Constraint::Circuit(c) | Constraint::MultipleCircuit { arcs: c, .. } => {
                out.extend(c.arcs.iter().map(|a| a.lit.var()))
            }
            Constraint::Implication { premise, relation } => {
                out.push(premise.var());
                out.extend(relation.expr.terms.iter().map(|t| t.1.var()));
            }
            Constraint::MaxBound { bound, expr } => {
                out.push(*bound);
                out.extend(expr.terms.iter().map(|t| t.1.var()));
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Whether a complete assignment satisfies the constraint.
    pub fn holds(&self, a: &Assignment) -> bool {
        match self {
            Constraint::ExactlyOne(lits) => lits.iter().filter(|&&l| a.lit(l) == 1).count() == 1,
            Constraint::Linear(r) => r.holds(a),
            Constraint::Circuit(c) => circuit_holds(c, a, None),
            Constraint::MultipleCircuit {
                arcs,
                max_departures,
            } => circuit_holds(arcs, a, Some(*max_departures)),
            Constraint::Implication { premise, relation } => {
                a.lit(*premise) == 0 || relation.holds(a)
            }
            Constraint::MaxBound { bound, expr } => a.get(*bound) >= expr.eval(a),
        }
    }
}

fn circuit_holds(c: &CircuitArcs, a: &Assignment, multiple: Option<usize>) -> bool {
    let n = c.nodes;
    let mut out_deg = vec![0usize; n];
    let mut in_deg = vec![0usize; n];
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut self_loop = vec![false; n];
    for arc in &c.arcs {
        if a.lit(arc.lit) != 1 {
            continue;
        }
        out_deg[arc.from] += 1;
        in_deg[arc.to] += 1;
        if arc.from == arc.to {
            self_loop[arc.from] = true;
        } else {
            succ[arc.from].push(arc.to);
        }
    }
    match multiple {
        None => {
            if (0..n).any(|i| out_deg[i] != 1 || in_deg[i] != 1) {
                return false;
            }
            if self_loop[0] {
                return self_loop.iter().all(|&s| s);
            }
            let mut on_cycle = vec![false; n];
            let mut cur = 0;
            loop {
                if on_cycle[cur] {
                    return false;
                }
                on_cycle[cur] = true;
                cur = succ[cur][0];
                if cur == 0 {
                    break;
                }
            }
            (0..n).all(|i| on_cycle[i] || self_loop[i])
        }
        Some(max_departures) => {
            if (1..n).any(|i| out_deg[i] != 1 || in_deg[i] != 1) {
                return false;
            }
            if out_deg[0] != in_deg[0] || self_loop[0] || succ[0].len() > max_departures {
                return false;
            }
            let mut visited = vec![false; n];
            for &start in &succ[0] {
                let mut cur = start;
                while cur != 0 {
                    if visited[cur] {
                        return false;
                    }
                    visited[cur] = true;
                    cur = succ[cur][0];
                }
            }
            (1..n).all(|i| visited[i] || self_loop[i])
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Objective {
    MinimizeVar(VarId),
    MinimizeLinear(LinExpr),
}

impl Objective {
    pub fn expr(&self) -> LinExpr {
        match self {
            Objective::MinimizeVar(v) => LinExpr::var(*v),
            Objective::MinimizeLinear(e) => e.clone(),
        }
    }
}

/// The four routing formulations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModelKind {
    Mt3Idx,
    Mt2Idx,
    Mc3Idx,
    Mc2Idx,
}

impl ModelKind {
    pub const ALL: [ModelKind; 4] = [
        ModelKind::Mt3Idx,
        ModelKind::Mt2Idx,
        ModelKind::Mc3Idx,
        ModelKind::Mc2Idx,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Mt3Idx => "mt-3idx",
            ModelKind::Mt2Idx => "mt-2idx",
            ModelKind::Mc3Idx => "mc-3idx",
            ModelKind::Mc2Idx => "mc-2idx",
        }
    }

    pub fn variant(self) -> Variant {
        match self {
            ModelKind::Mt3Idx | ModelKind::Mt2Idx => Variant::MinTime,
            ModelKind::Mc3Idx | ModelKind::Mc2Idx => Variant::MinCost,
        }
    }

    pub fn is_three_index(self) -> bool {
        matches!(self, ModelKind::Mt3Idx | ModelKind::Mc3Idx)
    }

    pub fn for_variant(variant: Variant) -> [ModelKind; 2] {
        match variant {
            Variant::MinTime => [ModelKind::Mt3Idx, ModelKind::Mt2Idx],
            Variant::MinCost => [ModelKind::Mc3Idx, ModelKind::Mc2Idx],
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ModelKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown model '{s}' (expected mt-3idx, mt-2idx, mc-3idx or mc-2idx)"))
    }
}

/// Arc variables of one routing layer, indexed by `(from, to)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArcLayer {
    nodes: usize,
    vars: Vec<Option<VarId>>,
}

impl ArcLayer {
    pub(crate) fn new(nodes: usize) -> Self {
        Self {
            nodes,
            vars: vec![None; nodes * nodes],
        }
    }

    pub(crate) fn set(&mut self, from: usize, to: usize, var: VarId) {
        self.vars[from * self.nodes + to] = Some(var);
    }

    #[inline]
    pub fn get(&self, from: usize, to: usize) -> Option<VarId> {
        self.vars[from * self.nodes + to]
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }
}

/// Where tours and missions live in the variable vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeKey {
    /// One layer per truck for three-index models, a single giant-tour layer
    /// otherwise.
    pub arc_layers: Vec<ArcLayer>,
    /// `drone_vars[d][i]` is the variable for drone `d` serving node `i`.
    pub drone_vars: Vec<Vec<Option<VarId>>>,
    pub makespan: Option<VarId>,
    pub arrival: Vec<VarId>,
    pub load: Vec<VarId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintModel {
    pub kind: ModelKind,
    pub vars: Vec<VarDecl>,
    pub constraints: Vec<Constraint>,
    pub objective: Objective,
    pub key: DecodeKey,
    pub node_count: usize,
    pub truck_count: usize,
    pub drone_count: usize,
}

impl ConstraintModel {
    pub fn boolean_count(&self) -> usize {
        self.vars.iter().filter(|v| v.tag.is_boolean()).count()
    }

    pub fn integer_count(&self) -> usize {
        self.vars.len() - self.boolean_count()
    }

    pub fn count_tag(&self, pred: impl Fn(VarTag) -> bool) -> usize {
        self.vars.iter().filter(|v| pred(v.tag)).count()
    }

    pub fn count_constraints(&self, kind: ConstraintKind) -> usize {
        self.constraints.iter().filter(|c| c.kind() == kind).count()
    }

    /// First constraint violated by a complete assignment, if any. Domain
    /// bounds count as constraints too.
    pub fn first_violation(&self, a: &Assignment) -> Option<Violated> {
        for (i, v) in self.vars.iter().enumerate() {
            let x = a.values[i];
            if x < v.lo || x > v.hi {
                return Some(Violated::Domain(VarId(i as u32)));
            }
        }
        self.constraints
            .iter()
            .position(|c| !c.holds(a))
            .map(Violated::Constraint)
    }

    pub fn evaluate_objective(&self, a: &Assignment) -> i64 {
        self.objective.expr().eval(a)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Violated {
    Domain(VarId),
    Constraint(usize),
}

/// A value for every variable of a model.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Assignment {
    pub(crate) values: Vec<i64>,
}

impl Assignment {
    pub fn new(values: Vec<i64>) -> Self {
        Self { values }
    }

    pub fn zeros(len: usize) -> Self {
        Self {
            values: vec![0; len],
        }
    }

    #[inline]
    pub fn get(&self, var: VarId) -> i64 {
        self.values[var.index()]
    }

    pub fn set(&mut self, var: VarId, value: i64) {
        self.values[var.index()] = value;
    }

    #[inline]
    pub fn lit(&self, lit: Lit) -> i64 {
        lit.apply(self.get(lit.var()))
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }
}
