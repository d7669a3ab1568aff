use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::bound::Layout;
use super::store::{Conflict, Store};
use crate::formulations::ir::{Lit, VarId};

/// Variable selection strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Branching {
    /// Fewest remaining options first, cheapest option tried first.
    #[default]
    MinDomainArc,
    /// Largest gap between the two cheapest options first.
    CostRegret,
}

/// A binary split: the first child takes the literal (or `var <= value`),
/// the second its negation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Branch {
    Lit(Lit),
    Le(VarId, i64),
}

impl Branch {
    pub(crate) fn apply(self, s: &mut Store, first: bool) -> Result<bool, Conflict> {
        match (self, first) {
            (Branch::Lit(l), v) => s.set_lit(l, v),
            (Branch::Le(x, v), true) => s.set_hi(x, v),
            (Branch::Le(x, v), false) => s.set_lo(x, v + 1),
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Brancher {
    rule: Branching,
    /// Tie-break rank per node; identity unless jittered.
    rank: Vec<u32>,
    booleans: Vec<VarId>,
    integers: Vec<VarId>,
}

/// Candidate scoring: lower `key` wins.
fn better(key: (i64, u32, usize), best: &Option<((i64, u32, usize), Branch)>) -> bool {
    best.as_ref().map_or(true, |(k, _)| key < *k)
}

impl Brancher {
    pub(crate) fn new(rule: Branching, layout: &Layout, booleans: Vec<VarId>, integers: Vec<VarId>) -> Self {
        Self {
            rule,
            rank: (0..layout.nodes as u32).collect(),
            booleans,
            integers,
        }
    }

    /// Shuffles node tie-breaking; run 0 keeps the natural order.
    pub(crate) fn jitter(&mut self, seed: u64, run: u64) {
        self.rank = (0..self.rank.len() as u32).collect();
        if run > 0 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(run));
            self.rank.shuffle(&mut rng);
        }
    }

    fn score(&self, options: &mut [i64]) -> i64 {
        match self.rule {
            Branching::MinDomainArc => options.len() as i64,
            Branching::CostRegret => {
                options.sort_unstable();
                -(options[1] - options[0])
            }
        }
    }

    pub(crate) fn choose(&self, layout: &Layout, s: &Store) -> Option<Branch> {
        self.coverage(layout, s)
            .or_else(|| self.routing(layout, s))
            .or_else(|| {
                self.booleans
                    .iter()
                    .find(|&&v| !s.is_fixed(v))
                    .map(|&v| Branch::Lit(Lit::pos(v)))
            })
            .or_else(|| {
                self.integers
                    .iter()
                    .find(|&&v| !s.is_fixed(v))
                    .map(|&v| Branch::Le(v, s.lo(v)))
            })
    }

    /// Assign an undecided customer to a vehicle.
    fn coverage(&self, layout: &Layout, s: &Store) -> Option<Branch> {
        let mut best = None;
        let mut costs = Vec::new();
        for (i, group) in layout.coverage.iter().enumerate().skip(1) {
            if group.iter().any(|&(l, _)| s.lit_value(l) == Some(true)) {
                continue;
            }
            costs.clear();
            let mut cheapest: Option<(i64, Lit)> = None;
            for &(l, c) in group {
                if s.lit_value(l).is_none() {
                    costs.push(c);
                    if cheapest.map_or(true, |(bc, _)| c < bc) {
                        cheapest = Some((c, l));
                    }
                }
            }
            if costs.len() < 2 {
                continue;
            }
            let key = (self.score(&mut costs), self.rank[i], 0);
            if better(key, &best) {
                best = Some((key, Branch::Lit(cheapest.expect("free literal").1)));
            }
        }
        best.map(|(_, b)| b)
    }

    /// Pick a successor for an active node without one.
    fn routing(&self, layout: &Layout, s: &Store) -> Option<Branch> {
        let n = layout.nodes;
        let mut best = None;
        let mut costs = Vec::new();
        for (k, layer) in layout.layers.iter().enumerate() {
            let first = if layout.three_index { 0 } else { 1 };
            for i in first..n {
                if !layout.active(s, layer, i) {
                    continue;
                }
                costs.clear();
                let mut cheapest: Option<(i64, VarId)> = None;
                let mut decided = false;
                for j in 0..n {
                    if j == i {
                        continue;
                    }
                    let Some(v) = layer.get(i, j) else { continue };
                    if s.lo(v) == 1 {
                        decided = true;
                        break;
                    }
                    if s.hi(v) == 1 {
                        let c = layout.w(i, j);
                        costs.push(c);
                        if cheapest.map_or(true, |(bc, _)| c < bc) {
                            cheapest = Some((c, v));
                        }
                    }
                }
                if decided || costs.len() < 2 {
                    continue;
                }
                let key = (self.score(&mut costs), self.rank[i], k);
                if better(key, &best) {
                    best = Some((key, Branch::Lit(Lit::pos(cheapest.expect("free arc").1))));
                }
            }
        }
        best.map(|(_, b)| b)
    }
}
