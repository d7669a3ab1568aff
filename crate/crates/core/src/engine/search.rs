use std::collections::VecDeque;
use std::fmt;
use std::sync::atomic::{AtomicBool, AtomicI64, AtomicU64, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use thiserror::Error;

use super::bound::Layout;
use super::branch::{Branch, Brancher, Branching};
use super::propagate::{Propagation, Propagator};
use super::store::Store;
use crate::formulations::ir::{Assignment, ConstraintModel, VarId};
use crate::formulations::decode_solution;
use crate::heuristics;
use crate::model::{objective_value, validate_solution, Instance, Solution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RestartPolicy {
    #[default]
    None,
    /// Restart after `base * luby(run)` failed nodes.
    Luby { base: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IncumbentSource {
    #[default]
    None,
    /// Warm start from the construction and local search heuristics.
    Heuristics,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchConfig {
    pub time_budget: Duration,
    pub workers: usize,
    pub seed: u64,
    pub branching: Branching,
    pub restarts: RestartPolicy,
    pub incumbent_source: IncumbentSource,
    /// Stop after this many search nodes; unlike the time budget this keeps
    /// truncated runs reproducible.
    pub node_limit: Option<u64>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            time_budget: Duration::from_secs(10),
            workers: 1,
            seed: 0,
            branching: Branching::default(),
            restarts: RestartPolicy::default(),
            incumbent_source: IncumbentSource::default(),
            node_limit: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Optimal,
    Feasible,
    Infeasible,
    Unknown,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Optimal => "optimal",
            Status::Feasible => "feasible",
            Status::Infeasible => "infeasible",
            Status::Unknown => "unknown",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TracePoint {
    pub elapsed: Duration,
    pub nodes: u64,
    pub lower_bound: i64,
    pub upper_bound: Option<i64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SearchStats {
    pub nodes: u64,
    pub propagations: u64,
    pub conflicts: u64,
    pub restarts: u64,
}

/// Result of [`solve`]. An infeasible outcome carries `i64::MAX` as its bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveOutcome {
    pub status: Status,
    pub incumbent: Option<Solution>,
    pub upper_bound: Option<i64>,
    pub lower_bound: i64,
    pub trace: Vec<TracePoint>,
    pub stats: SearchStats,
}

impl SolveOutcome {
    /// Copy with wall-clock fields zeroed, for comparing runs.
    pub fn without_timing(&self) -> Self {
        let mut out = self.clone();
        for p in &mut out.trace {
            p.elapsed = Duration::ZERO;
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("invalid search configuration: {0}")]
    Config(String),
    #[error("model does not match the instance: {0}")]
    Structural(String),
}

fn check(model: &ConstraintModel, instance: &Instance, config: &SearchConfig) -> Result<(), SolveError> {
    if config.time_budget.is_zero() {
        return Err(SolveError::Config("time budget must be positive".into()));
    }
    if config.workers == 0 {
        return Err(SolveError::Config("need at least one worker".into()));
    }
    if model.kind.variant() != instance.variant() {
        return Err(SolveError::Structural(format!(
            "{} is a {:?} model, instance is {:?}",
            model.kind,
            model.kind.variant(),
            instance.variant()
        )));
    }
    if model.node_count != instance.node_count()
        || model.truck_count != instance.truck_count()
        || model.drone_count != instance.drone_count()
    {
        return Err(SolveError::Structural(format!(
            "model has {} nodes, {} trucks, {} drones; instance has {}, {}, {}",
            model.node_count,
            model.truck_count,
            model.drone_count,
            instance.node_count(),
            instance.truck_count(),
            instance.drone_count()
        )));
    }
    Ok(())
}

/// Luby sequence 1, 1, 2, 1, 1, 2, 4, ... (1-based).
pub fn luby(i: u64) -> u64 {
    let mut i = i.max(1);
    loop {
        let mut k = 1u32;
        while (1u64 << k) - 1 < i {
            k += 1;
        }
        if i == (1u64 << k) - 1 {
            return 1u64 << (k - 1);
        }
        i -= (1u64 << (k - 1)) - 1;
    }
}

const NO_BOUND: i64 = i64::MAX;

/// Unexplored part of the tree: decisions from the root plus a bound.
#[derive(Debug, Clone)]
struct Sub {
    path: Vec<(Branch, bool)>,
    bound: i64,
}

struct TraceState {
    points: Vec<TracePoint>,
    lb: i64,
    ub: Option<i64>,
}

struct Shared<'a> {
    model: &'a ConstraintModel,
    instance: &'a Instance,
    layout: &'a Layout,
    start: Instant,
    deadline: Instant,
    node_limit: Option<u64>,
    nodes: AtomicU64,
    stop: AtomicBool,
    ub: AtomicI64,
    best: Mutex<Option<Solution>>,
    trace: Mutex<TraceState>,
    queue: Mutex<VecDeque<Sub>>,
    slots: Vec<AtomicI64>,
}

impl Shared<'_> {
    fn ub(&self) -> i64 {
        self.ub.load(Ordering::SeqCst)
    }

    fn out_of_budget(&self) -> bool {
        if self.stop.load(Ordering::Relaxed) {
            return true;
        }
        if Instant::now() >= self.deadline {
            self.stop.store(true, Ordering::Relaxed);
            return true;
        }
        false
    }

    fn node_limit_hit(&self) -> bool {
        let hit = self
            .node_limit
            .is_some_and(|l| self.nodes.load(Ordering::Relaxed) >= l);
        if hit {
            self.stop.store(true, Ordering::Relaxed);
        }
        hit
    }

    /// Minimum over queued subtrees and worker slots; callers hold the queue lock.
    fn open_bound(&self, queue: &VecDeque<Sub>) -> i64 {
        let q = queue.iter().map(|s| s.bound).min().unwrap_or(NO_BOUND);
        let w = self
            .slots
            .iter()
            .map(|s| s.load(Ordering::SeqCst))
            .min()
            .unwrap_or(NO_BOUND);
        q.min(w)
    }

    fn record(&self, lb: i64) {
        let ub = self.ub();
        let mut t = self.trace.lock().expect("trace lock");
        let lb = t.lb.max(lb.min(ub));
        let ub = (ub != NO_BOUND).then_some(ub);
        if t.points.is_empty() || lb != t.lb || ub != t.ub {
            t.lb = lb;
            t.ub = ub;
            t.points.push(TracePoint {
                elapsed: self.start.elapsed(),
                nodes: self.nodes.load(Ordering::SeqCst),
                lower_bound: lb,
                upper_bound: ub,
            });
        }
    }

    fn refresh_lb(&self) {
        let q = self.queue.lock().expect("queue lock");
        let lb = self.open_bound(&q);
        drop(q);
        self.record(lb);
    }

    /// Installs a validated solution if it beats the incumbent.
    fn offer(&self, solution: Solution) -> bool {
        let Ok(report) = validate_solution(self.instance, &solution) else {
            return false;
        };
        if !report.feasible() {
            debug_assert!(false, "engine produced an infeasible solution");
            return false;
        }
        let Ok(value) = objective_value(self.instance, &solution) else {
            return false;
        };
        let mut best = self.best.lock().expect("incumbent lock");
        if value >= self.ub() {
            return false;
        }
        self.ub.store(value, Ordering::SeqCst);
        *best = Some(solution);
        drop(best);
        let t = self.trace.lock().expect("trace lock");
        let lb = t.lb;
        drop(t);
        self.record(lb);
        true
    }
}

enum NodeResult {
    Prune,
    Branch(Branch, i64),
}

enum SubResult {
    Exhausted,
    Stopped,
    Restart,
}

struct Worker<'a, 'b> {
    sh: &'b Shared<'a>,
    slot: usize,
    root: &'b Store,
    store: Store,
    prop: Propagator,
    brancher: Brancher,
    makespan: Option<VarId>,
    stats: SearchStats,
}

impl<'a, 'b> Worker<'a, 'b> {
    fn sync_cutoff(&mut self) {
        let ub = self.sh.ub();
        let want = (ub != NO_BOUND).then(|| ub - 1);
        if want.is_some() && self.prop.cutoff() != want {
            self.prop.set_cutoff(want);
        }
    }

    fn propagate(&mut self) -> bool {
        self.stats.propagations += 1;
        self.prop.propagate(&mut self.store) == Propagation::Fixpoint
    }

    /// Resets the store to `sub`'s root; false when it is already dead.
    fn enter(&mut self, sub: &Sub) -> bool {
        self.store = self.root.clone();
        self.store.clear_changed();
        for &(b, first) in &sub.path {
            if b.apply(&mut self.store, first).is_err() {
                return false;
            }
        }
        true
    }

    fn node(&mut self) -> NodeResult {
        self.sh.nodes.fetch_add(1, Ordering::SeqCst);
        self.stats.nodes += 1;
        self.sync_cutoff();
        if !self.propagate() {
            self.stats.conflicts += 1;
            return NodeResult::Prune;
        }
        let lb = loop {
            let lb = self.sh.layout.lower_bound(&self.store);
            if lb >= self.sh.ub() {
                self.stats.conflicts += 1;
                return NodeResult::Prune;
            }
            match self.makespan {
                Some(a) if lb > self.store.lo(a) => {
                    if self.store.set_lo(a, lb).is_err() || !self.propagate() {
                        self.stats.conflicts += 1;
                        return NodeResult::Prune;
                    }
                }
                _ => break lb,
            }
        };
        match self.brancher.choose(self.sh.layout, &self.store) {
            Some(b) => NodeResult::Branch(b, lb),
            None => {
                self.leaf();
                NodeResult::Prune
            }
        }
    }

    fn leaf(&mut self) {
        let a = Assignment::new(self.store.lower_values());
        if let Some(v) = self.sh.model.first_violation(&a) {
            debug_assert!(false, "propagation fixpoint violates {v:?}");
            return;
        }
        match decode_solution(self.sh.model, &a, self.sh.instance) {
            Ok(sol) => {
                self.sh.offer(sol);
            }
            Err(e) => debug_assert!(false, "decode failed: {e}"),
        }
    }

    fn open_local(&self, stack: &[Frame], sub_bound: i64) -> i64 {
        let pending = stack
            .iter()
            .filter(|f| !f.second_done)
            .map(|f| f.bound)
            .min()
            .unwrap_or(NO_BOUND);
        let current = stack.last().map_or(sub_bound, |f| f.bound);
        pending.min(current)
    }

    /// Depth-first search below `sub`.
    fn explore(&mut self, sub: &Sub, fail_limit: Option<u64>) -> SubResult {
        if !self.enter(sub) {
            return SubResult::Exhausted;
        }
        let mut stack: Vec<Frame> = Vec::new();
        let mut fails = 0u64;
        let mut since_check = 0u32;
        'node: loop {
            since_check += 1;
            if since_check % 64 == 0 {
                let local = self.open_local(&stack, sub.bound);
                self.sh.slots[self.slot].store(local, Ordering::SeqCst);
                self.sh.refresh_lb();
            }
            if self.sh.node_limit_hit() || (since_check % 256 == 0 && self.sh.out_of_budget())
                || self.sh.stop.load(Ordering::Relaxed)
            {
                let local = self.open_local(&stack, sub.bound);
                self.sh.slots[self.slot].store(local, Ordering::SeqCst);
                return SubResult::Stopped;
            }
            if let NodeResult::Branch(b, lb) = self.node() {
                stack.push(Frame {
                    branch: b,
                    bound: lb,
                    second_done: false,
                });
                self.store.push_level();
                if b.apply(&mut self.store, true).is_ok() {
                    continue 'node;
                }
            } else {
                fails += 1;
                if fail_limit.is_some_and(|l| fails >= l) {
                    return SubResult::Restart;
                }
            }
            loop {
                let Some(f) = stack.last_mut() else {
                    return SubResult::Exhausted;
                };
                self.store.pop_level();
                if f.second_done {
                    stack.pop();
                    continue;
                }
                f.second_done = true;
                let b = f.branch;
                self.store.push_level();
                if b.apply(&mut self.store, false).is_ok() {
                    continue 'node;
                }
            }
        }
    }

    /// One node of breadth-first expansion: children of `sub`, if any.
    fn expand(&mut self, sub: &Sub) -> Vec<Sub> {
        if !self.enter(sub) {
            return Vec::new();
        }
        match self.node() {
            NodeResult::Prune => Vec::new(),
            NodeResult::Branch(b, lb) => [true, false]
                .into_iter()
                .map(|first| {
                    let mut path = sub.path.clone();
                    path.push((b, first));
                    Sub { path, bound: lb }
                })
                .collect(),
        }
    }

    /// Pulls subtrees from the shared queue until it is empty or time is up.
    fn run(&mut self, restarts: Option<u64>, seed: u64) -> bool {
        loop {
            let sub = {
                let mut q = self.sh.queue.lock().expect("queue lock");
                let Some(sub) = q.pop_front() else {
                    self.sh.slots[self.slot].store(NO_BOUND, Ordering::SeqCst);
                    return true;
                };
                self.sh.slots[self.slot].store(sub.bound, Ordering::SeqCst);
                sub
            };
            let mut run = 0u64;
            loop {
                let limit = restarts.map(|base| base * luby(run + 1));
                match self.explore(&sub, limit) {
                    SubResult::Exhausted => break,
                    SubResult::Stopped => return false,
                    SubResult::Restart => {
                        run += 1;
                        self.stats.restarts += 1;
                        self.brancher.jitter(seed, run);
                    }
                }
            }
            let q = self.sh.queue.lock().expect("queue lock");
            self.sh.slots[self.slot].store(NO_BOUND, Ordering::SeqCst);
            let lb = self.sh.open_bound(&q);
            drop(q);
            self.sh.record(lb);
        }
    }
}

struct Frame {
    branch: Branch,
    bound: i64,
    second_done: bool,
}

/// Branch and bound over `model` within the configured budget.
pub fn solve(model: &ConstraintModel, instance: &Instance, config: &SearchConfig) -> Result<SolveOutcome, SolveError> {
    check(model, instance, config)?;
    let start = Instant::now();
    let layout = Layout::new(model, instance);
    let shared = Shared {
        model,
        instance,
        layout: &layout,
        start,
        deadline: start + config.time_budget,
        node_limit: config.node_limit,
        nodes: AtomicU64::new(0),
        stop: AtomicBool::new(false),
        ub: AtomicI64::new(NO_BOUND),
        best: Mutex::new(None),
        trace: Mutex::new(TraceState {
            points: Vec::new(),
            lb: 0,
            ub: None,
        }),
        queue: Mutex::new(VecDeque::new()),
        slots: (0..config.workers).map(|_| AtomicI64::new(NO_BOUND)).collect(),
    };

    if config.incumbent_source == IncumbentSource::Heuristics {
        if let Some(initial) = heuristics::construct_initial(instance) {
            let budget = (config.time_budget / 10).min(Duration::from_secs(2));
            let improved = heuristics::improve(instance, &initial, budget, config.seed);
            shared.offer(improved);
        }
    }

    let mut root = Store::new(model);
    let mut prop = Propagator::new(model);
    let mut stats = SearchStats::default();
    let ub = shared.ub();
    if ub != NO_BOUND {
        prop.set_cutoff(Some(ub - 1));
    }
    stats.propagations += 1;
    let mut exhausted = true;
    if prop.propagate_all(&mut root) == Propagation::Fixpoint {
        let root_lb = layout.lower_bound(&root);
        shared.record(root_lb);
        shared
            .queue
            .lock()
            .expect("queue lock")
            .push_back(Sub { path: Vec::new(), bound: root_lb });

        let booleans: Vec<VarId> = (0..model.vars.len())
            .filter(|&i| model.vars[i].tag.is_boolean())
            .map(|i| VarId(i as u32))
            .collect();
        let integers: Vec<VarId> = (0..model.vars.len())
            .filter(|&i| !model.vars[i].tag.is_boolean())
            .map(|i| VarId(i as u32))
            .collect();
        let brancher = Brancher::new(config.branching, &layout, booleans, integers);
        let make_worker = |slot: usize| Worker {
            sh: &shared,
            slot,
            root: &root,
            store: root.clone(),
            prop: prop.clone(),
            brancher: brancher.clone(),
            makespan: model.key.makespan,
            stats: SearchStats::default(),
        };

        if config.workers == 1 {
            let restarts = match config.restarts {
                RestartPolicy::Luby { base } if shared.ub() != NO_BOUND => Some(base.max(1)),
                _ => None,
            };
            let mut w = make_worker(0);
            exhausted = w.run(restarts, config.seed);
            add_stats(&mut stats, &w.stats);
        } else {
            // Split the top of the tree breadth-first, then share the pieces.
            let mut w = make_worker(0);
            let target = 2 * config.workers;
            let mut expansions = 0;
            loop {
                let mut q = shared.queue.lock().expect("queue lock");
                if q.is_empty() || q.len() >= target || expansions >= 64 * config.workers {
                    break;
                }
                let sub = q.pop_front().expect("non-empty queue");
                shared.slots[0].store(sub.bound, Ordering::SeqCst);
                drop(q);
                let children = w.expand(&sub);
                let mut q = shared.queue.lock().expect("queue lock");
                q.extend(children);
                shared.slots[0].store(NO_BOUND, Ordering::SeqCst);
                drop(q);
                expansions += 1;
                if shared.out_of_budget() || shared.node_limit_hit() {
                    break;
                }
            }
            add_stats(&mut stats, &w.stats);
            let results: Vec<(bool, SearchStats)> = std::thread::scope(|scope| {
                let handles: Vec<_> = (0..config.workers)
                    .map(|slot| {
                        let mut w = make_worker(slot);
                        scope.spawn(move || {
                            let done = w.run(None, config.seed);
                            (done, w.stats)
                        })
                    })
                    .collect();
                handles
                    .into_iter()
                    .map(|h| h.join().expect("worker panicked"))
                    .collect()
            });
            for (done, s) in &results {
                exhausted &= *done;
                add_stats(&mut stats, s);
            }
            exhausted &= shared.queue.lock().expect("queue lock").is_empty();
        }
    } else {
        stats.conflicts += 1;
    }
    stats.nodes = shared.nodes.load(Ordering::SeqCst);

    let ub = shared.ub();
    let incumbent = shared.best.lock().expect("incumbent lock").take();
    let (status, lower_bound) = if exhausted {
        if incumbent.is_some() {
            (Status::Optimal, ub)
        } else {
            (Status::Infeasible, NO_BOUND)
        }
    } else {
        let q = shared.queue.lock().expect("queue lock");
        let open = shared.open_bound(&q);
        drop(q);
        let lb = shared.trace.lock().expect("trace lock").lb.max(open.min(ub));
        match &incumbent {
            Some(_) if lb >= ub => (Status::Optimal, ub),
            Some(_) => (Status::Feasible, lb),
            None => (Status::Unknown, lb),
        }
    };
    shared.record(lower_bound);
    let trace = shared.trace.into_inner().expect("trace lock").points;
    Ok(SolveOutcome {
        status,
        upper_bound: incumbent.as_ref().map(|_| ub),
        incumbent,
        lower_bound,
        trace,
        stats,
    })
}

fn add_stats(into: &mut SearchStats, s: &SearchStats) {
    into.propagations += s.propagations;
    into.conflicts += s.conflicts;
    into.restarts += s.restarts;
}
