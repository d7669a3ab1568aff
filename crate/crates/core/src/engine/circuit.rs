//! Filtering for the depot-anchored `Circuit` and `MultipleCircuit`
//! constraints: degree rules, premature-cycle removal and reachability from
//! the depot, iterated until nothing changes.

use super::store::Conflict;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ArcState {
    /// No literal declared for this arc.
    Absent,
    Free,
    True,
    False,
}

impl ArcState {
    #[inline]
    fn possible(self) -> bool {
        matches!(self, ArcState::Free | ArcState::True)
    }
}

/// Current state of every arc of one circuit constraint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArcTable {
    nodes: usize,
    states: Vec<ArcState>,
}

impl ArcTable {
    pub fn new(nodes: usize) -> Self {
        Self {
            nodes,
            states: vec![ArcState::Absent; nodes * nodes],
        }
    }

    /// Complete digraph with every arc free, self-loops included.
    pub fn complete(nodes: usize) -> Self {
        Self {
            nodes,
            states: vec![ArcState::Free; nodes * nodes],
        }
    }

    #[inline]
    pub fn nodes(&self) -> usize {
        self.nodes
    }

    #[inline]
    pub fn get(&self, from: usize, to: usize) -> ArcState {
        self.states[from * self.nodes + to]
    }

    #[inline]
    pub fn set(&mut self, from: usize, to: usize, state: ArcState) {
        self.states[from * self.nodes + to] = state;
    }

    /// Fixes a declared arc; `Ok(true)` when it was free.
    fn fix(&mut self, from: usize, to: usize, value: bool) -> Result<bool, Conflict> {
        let target = if value { ArcState::True } else { ArcState::False };
        match self.get(from, to) {
            ArcState::Absent if value => Err(Conflict),
            ArcState::Absent => Ok(false),
            ArcState::Free => {
                self.set(from, to, target);
                Ok(true)
            }
            s if s == target => Ok(false),
            _ => Err(Conflict),
        }
    }

    fn can_skip(&self, node: usize) -> bool {
        self.get(node, node).possible()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CircuitMode {
    /// One cycle through the depot (node 0), others self-looped.
    Single,
    /// Several cycles, each through the depot.
    Multiple { max_departures: usize },
}

/// Filters `table` in place to a fixpoint of the circuit rules.
pub fn circuit_filter(mode: CircuitMode, table: &mut ArcTable) -> Result<(), Conflict> {
    let mut scratch = Scratch::new(table.nodes());
    loop {
        let mut changed = degree_pass(mode, table)?;
        if mode == CircuitMode::Single {
            changed |= idle_depot_pass(table)?;
        }
        changed |= chain_pass(mode, table, &mut scratch)?;
        changed |= reach_pass(mode, table, &mut scratch)?;
        if !changed {
            return Ok(());
        }
    }
}

struct Scratch {
    succ: Vec<Option<usize>>,
    pred: Vec<Option<usize>>,
    mark: Vec<bool>,
    fwd: Vec<bool>,
    bwd: Vec<bool>,
    stack: Vec<usize>,
}

impl Scratch {
    fn new(n: usize) -> Self {
        Self {
            succ: vec![None; n],
            pred: vec![None; n],
            mark: vec![false; n],
            fwd: vec![false; n],
            bwd: vec![false; n],
            stack: Vec::with_capacity(n),
        }
    }
}

/// Exactly one outgoing and one incoming arc per node (self-loop counting for
/// both); in multiple mode the depot instead balances in and out degree.
fn degree_pass(mode: CircuitMode, t: &mut ArcTable) -> Result<bool, Conflict> {
    let n = t.nodes();
    let mut changed = false;
    let first = match mode {
        CircuitMode::Single => 0,
        CircuitMode::Multiple { .. } => 1,
    };
    for i in first..n {
        for outgoing in [true, false] {
            let arc = |j: usize| if outgoing { (i, j) } else { (j, i) };
            let (mut n_true, mut n_free, mut last_free) = (0, 0, 0);
            for j in 0..n {
                let (a, b) = arc(j);
                match t.get(a, b) {
                    ArcState::True => n_true += 1,
                    ArcState::Free => {
                        n_free += 1;
                        last_free = j;
                    }
                    _ => {}
                }
            }
            if n_true > 1 || (n_true == 0 && n_free == 0) {
                return Err(Conflict);
            }
            if n_true == 1 && n_free > 0 {
                for j in 0..n {
                    let (a, b) = arc(j);
                    if t.get(a, b) == ArcState::Free {
                        t.set(a, b, ArcState::False);
                    }
                }
                changed = true;
            } else if n_true == 0 && n_free == 1 {
                let (a, b) = arc(last_free);
                t.set(a, b, ArcState::True);
                changed = true;
            }
        }
    }

    if let CircuitMode::Multiple { max_departures } = mode {
        changed |= t.fix(0, 0, false)?;
        let count = |t: &ArcTable, outgoing: bool| {
            let (mut tr, mut fr) = (0usize, 0usize);
            for j in 1..n {
                let s = if outgoing { t.get(0, j) } else { t.get(j, 0) };
                match s {
                    ArcState::True => tr += 1,
                    ArcState::Free => fr += 1,
                    _ => {}
                }
            }
            (tr, fr)
        };
        let set_free = |t: &mut ArcTable, outgoing: bool, value: ArcState| {
            for j in 1..n {
                let (a, b) = if outgoing { (0, j) } else { (j, 0) };
                if t.get(a, b) == ArcState::Free {
                    t.set(a, b, value);
                }
            }
        };
        let (o, of) = count(t, true);
        let (i, inf) = count(t, false);
        let out_cap = max_departures.min(i + inf);
        let in_cap = max_departures.min(o + of);
        if o > out_cap || i > in_cap {
            return Err(Conflict);
        }
        if of > 0 && o == out_cap {
            set_free(t, true, ArcState::False);
            return Ok(true);
        }
        if inf > 0 && i == in_cap {
            set_free(t, false, ArcState::False);
            return Ok(true);
        }
        if of > 0 && o + of == i {
            set_free(t, true, ArcState::True);
            return Ok(true);
        }
        if inf > 0 && i + inf == o {
            set_free(t, false, ArcState::True);
            return Ok(true);
        }
    }
    Ok(changed)
}

/// An idle depot (true self-loop) idles every node; any active node makes the
/// depot active.
fn idle_depot_pass(t: &mut ArcTable) -> Result<bool, Conflict> {
    let n = t.nodes();
    let mut changed = false;
    match t.get(0, 0) {
        ArcState::True => {
            for i in 1..n {
                changed |= t.fix(i, i, true)?;
            }
        }
        ArcState::Free => {
            if (1..n).any(|i| !t.can_skip(i)) {
                changed |= t.fix(0, 0, false)?;
            }
        }
        _ => {}
    }
    Ok(changed)
}

/// Removes arcs that would close a cycle of fixed arcs too early, and checks
/// cycles already closed.
fn chain_pass(mode: CircuitMode, t: &mut ArcTable, s: &mut Scratch) -> Result<bool, Conflict> {
    let n = t.nodes();
    let multiple = matches!(mode, CircuitMode::Multiple { .. });
    s.succ.iter_mut().for_each(|x| *x = None);
    s.pred.iter_mut().for_each(|x| *x = None);
    s.mark.iter_mut().for_each(|x| *x = false);
    for i in 0..n {
        for j in 0..n {
            if i == j || t.get(i, j) != ArcState::True {
                continue;
            }
            // The depot joins tours in multiple mode; chains stop there.
            if multiple && (i == 0 || j == 0) {
                continue;
            }
            // a later degree fix may have given a node a second arc
            if s.succ[i].is_some() || s.pred[j].is_some() {
                return Err(Conflict);
            }
            s.succ[i] = Some(j);
            s.pred[j] = Some(i);
        }
    }

    let mut changed = false;
    // Open chains, walked from their heads.
    for head in 0..n {
        if s.pred[head].is_some() || s.succ[head].is_none() {
            continue;
        }
        let mut has_depot = head == 0;
        let mut cur = head;
        s.mark[cur] = true;
        while let Some(next) = s.succ[cur] {
            cur = next;
            s.mark[cur] = true;
            has_depot |= cur == 0;
        }
        let tail = cur;
        if t.get(tail, head) != ArcState::Free {
            continue;
        }
        let closable = !multiple
            && has_depot
            && (0..n).all(|v| s.mark_on_chain(head, v) || t.can_skip(v));
        if !closable {
            t.set(tail, head, ArcState::False);
            changed = true;
        }
    }
    // Whatever has a successor but was not reached lies on a closed cycle.
    for start in 0..n {
        if s.mark[start] || s.succ[start].is_none() {
            continue;
        }
        let mut has_depot = false;
        let mut cur = start;
        loop {
            s.mark[cur] = true;
            has_depot |= cur == 0;
            cur = s.succ[cur].expect("cycle successor");
            if cur == start {
                break;
            }
        }
        if multiple || !has_depot {
            return Err(Conflict);
        }
        // The depot cycle is complete: everything else self-loops.
        for v in 0..n {
            let on_cycle = {
                let mut c = start;
                let mut found = false;
                loop {
                    if c == v {
                        found = true;
                        break;
                    }
                    c = s.succ[c].expect("cycle successor");
                    if c == start {
                        break;
                    }
                }
                found
            };
            if !on_cycle {
                changed |= t.fix(v, v, true)?;
            }
        }
    }
    Ok(changed)
}

impl Scratch {
    /// Whether `v` is on the chain that starts at `head`.
    fn mark_on_chain(&self, head: usize, v: usize) -> bool {
        let mut cur = head;
        loop {
            if cur == v {
                return true;
            }
            match self.succ[cur] {
                Some(next) => cur = next,
                None => return false,
            }
        }
    }
}

/// Nodes that cannot lie on a depot cycle must self-loop.
fn reach_pass(mode: CircuitMode, t: &mut ArcTable, s: &mut Scratch) -> Result<bool, Conflict> {
    let n = t.nodes();
    if mode == CircuitMode::Single && t.get(0, 0) == ArcState::True {
        return Ok(false);
    }
    for (seen, forward) in [(&mut s.fwd, true), (&mut s.bwd, false)] {
        seen.iter_mut().for_each(|x| *x = false);
        seen[0] = true;
        s.stack.clear();
        s.stack.push(0);
        while let Some(u) = s.stack.pop() {
            for v in 0..n {
                if v == u || seen[v] {
                    continue;
                }
                let st = if forward { t.get(u, v) } else { t.get(v, u) };
                if st.possible() {
                    seen[v] = true;
                    s.stack.push(v);
                }
            }
        }
    }
    let mut changed = false;
    for v in 1..n {
        if !(s.fwd[v] && s.bwd[v]) {
            changed |= t.fix(v, v, true)?;
        }
    }
    Ok(changed)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn forced(n: usize, arcs: &[(usize, usize)], with_loops: bool) -> ArcTable {
        let mut t = ArcTable::complete(n);
        if !with_loops {
            for i in 0..n {
                t.set(i, i, ArcState::Absent);
            }
        }
        for &(i, j) in arcs {
            t.set(i, j, ArcState::True);
        }
        t
    }

    #[test]
    fn premature_cycle_in_single_mode() {
        // three must-visit customers plus the depot, no self-loops
        let mut t = forced(4, &[(1, 2), (2, 1)], false);
        assert_eq!(circuit_filter(CircuitMode::Single, &mut t), Err(Conflict));
    }

    #[test]
    fn depot_loops_only_in_multiple_mode() {
        let mode = CircuitMode::Multiple { max_departures: 2 };
        let mut t = forced(4, &[(1, 2), (2, 1)], true);
        t.set(0, 0, ArcState::Absent);
        assert_eq!(circuit_filter(mode, &mut t), Err(Conflict));

        let mut t = forced(4, &[(0, 1), (1, 0)], true);
        t.set(0, 0, ArcState::Absent);
        assert_eq!(circuit_filter(mode, &mut t), Ok(()));
        assert_eq!(t.get(1, 1), ArcState::False);
    }

    #[test]
    fn closing_arc_is_removed() {
        let mut t = forced(4, &[(1, 2)], false);
        circuit_filter(CircuitMode::Single, &mut t).unwrap();
        assert_eq!(t.get(2, 1), ArcState::False);
        assert_eq!(t.get(0, 2), ArcState::False);
        assert_eq!(t.get(1, 0), ArcState::False);
    }

    #[test]
    fn idle_depot_idles_everything() {
        let mut t = ArcTable::complete(3);
        t.set(0, 0, ArcState::True);
        circuit_filter(CircuitMode::Single, &mut t).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { ArcState::True } else { ArcState::False };
                assert_eq!(t.get(i, j), expect);
            }
        }
    }

    #[test]
    fn departure_cap() {
        let mode = CircuitMode::Multiple { max_departures: 1 };
        let mut t = forced(4, &[(0, 1)], true);
        t.set(0, 0, ArcState::Absent);
        circuit_filter(mode, &mut t).unwrap();
        assert_eq!(t.get(0, 2), ArcState::False);
        assert_eq!(t.get(0, 3), ArcState::False);

        let mut t = forced(4, &[(0, 1), (0, 2)], true);
        t.set(0, 0, ArcState::Absent);
        assert_eq!(circuit_filter(mode, &mut t), Err(Conflict));
    }

    #[test]
    fn unreachable_node_must_skip() {
        let mut t = ArcTable::complete(3);
        t.set(0, 2, ArcState::False);
        t.set(1, 2, ArcState::False);
        circuit_filter(CircuitMode::Single, &mut t).unwrap();
        assert_eq!(t.get(2, 2), ArcState::True);
    }

    /// Arc sets satisfying the circuit rules, by enumerating successors.
    fn extensions(mode: CircuitMode, t: &ArcTable) -> Vec<Vec<(usize, usize)>> {
        let n = t.nodes();
        let mut out = Vec::new();
        let mut succ = vec![0; n];
        let first = if mode == CircuitMode::Single { 0 } else { 1 };
        enumerate(first, mode, t, &mut succ, &mut out);
        out
    }

    fn enumerate(i: usize, mode: CircuitMode, t: &ArcTable, succ: &mut Vec<usize>, out: &mut Vec<Vec<(usize, usize)>>) {
        let n = t.nodes();
        if i == n {
            if let Some(arcs) = arcs_of(mode, succ) {
                if arcs.iter().all(|&(a, b)| t.get(a, b).possible())
                    && (0..n).all(|a| (0..n).all(|b| t.get(a, b) != ArcState::True || arcs.contains(&(a, b))))
                {
                    out.push(arcs);
                }
            }
            return;
        }
        for j in 0..n {
            if t.get(i, j).possible() || (i == 0 && mode != CircuitMode::Single) {
                succ[i] = j;
                enumerate(i + 1, mode, t, succ, out);
            }
        }
    }

    fn arcs_of(mode: CircuitMode, succ: &[usize]) -> Option<Vec<(usize, usize)>> {
        let n = succ.len();
        let mut arcs = Vec::new();
        match mode {
            CircuitMode::Single => {
                let mut seen = vec![false; n];
                let mut cur = 0;
                while !seen[cur] {
                    seen[cur] = true;
                    cur = succ[cur];
                }
                if cur != 0 || !(0..n).all(|v| seen[v] || succ[v] == v) {
                    return None;
                }
                arcs.extend((0..n).map(|v| (v, succ[v])));
            }
            CircuitMode::Multiple { max_departures } => {
                let mut indeg = vec![0; n];
                for v in 1..n {
                    if succ[v] != v && succ[v] != 0 {
                        indeg[succ[v]] += 1;
                    }
                }
                if indeg.iter().any(|&d| d > 1) || (1..n).any(|v| succ[v] == v && indeg[v] > 0) {
                    return None;
                }
                // every active customer must reach the depot
                for v in 1..n {
                    let mut cur = v;
                    for _ in 0..n {
                        if cur == 0 || succ[cur] == cur {
                            break;
                        }
                        cur = succ[cur];
                    }
                    if cur != 0 && succ[v] != v {
                        return None;
                    }
                }
                let heads: Vec<usize> = (1..n).filter(|&v| succ[v] != v && indeg[v] == 0).collect();
                if heads.len() > max_departures {
                    return None;
                }
                arcs.extend(heads.iter().map(|&v| (0, v)));
                arcs.extend((1..n).map(|v| (v, succ[v])));
                arcs.sort_unstable();
            }
        }
        Some(arcs)
    }

    fn random_table(rng: &mut impl rand::Rng, n: usize, loops_at_depot: bool) -> ArcTable {
        let mut t = ArcTable::complete(n);
        for i in 0..n {
            for j in 0..n {
                let r: f64 = rng.gen();
                if r < 0.25 {
                    t.set(i, j, ArcState::False);
                } else if r < 0.3 {
                    t.set(i, j, ArcState::True);
                }
            }
        }
        if !loops_at_depot {
            t.set(0, 0, ArcState::Absent);
        }
        t
    }

    fn check_sound(mode: CircuitMode, seed: u64) {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let n = 5;
        for _ in 0..3000 {
            let t = random_table(&mut rng, n, mode == CircuitMode::Single);
            let before = extensions(mode, &t);
            let mut f = t.clone();
            match circuit_filter(mode, &mut f) {
                Err(_) => assert!(before.is_empty(), "{t:?}"),
                Ok(()) => {
                    let after = extensions(mode, &f);
                    assert_eq!(before, after, "{t:?}");
                    if f.states.iter().all(|s| *s != ArcState::Free) {
                        assert_eq!(after.len(), 1, "{f:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn single_mode_is_sound() {
        check_sound(CircuitMode::Single, 7);
    }

    #[test]
    fn multiple_mode_is_sound() {
        check_sound(CircuitMode::Multiple { max_departures: 2 }, 11);
    }
}
