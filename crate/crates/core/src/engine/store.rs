use crate::formulations::ir::{ConstraintModel, Lit, VarId};

/// Some constraint has no support left.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Conflict;

/// Interval domains for every model variable, with a trail for backtracking.
#[derive(Debug, Clone)]
pub struct Store {
    lo: Vec<i64>,
    hi: Vec<i64>,
    trail: Vec<(u32, i64, i64)>,
    levels: Vec<usize>,
    changed: Vec<u32>,
}

impl Store {
    pub fn new(model: &ConstraintModel) -> Self {
        Self {
            lo: model.vars.iter().map(|v| v.lo).collect(),
            hi: model.vars.iter().map(|v| v.hi).collect(),
            trail: Vec::new(),
            levels: Vec::new(),
            changed: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.lo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lo.is_empty()
    }

    #[inline]
    pub fn lo(&self, v: VarId) -> i64 {
        self.lo[v.index()]
    }

    #[inline]
    pub fn hi(&self, v: VarId) -> i64 {
        self.hi[v.index()]
    }

    #[inline]
    pub fn is_fixed(&self, v: VarId) -> bool {
        self.lo[v.index()] == self.hi[v.index()]
    }

    /// Bounds of a literal's value.
    #[inline]
    pub fn lit_bounds(&self, l: Lit) -> (i64, i64) {
        let (lo, hi) = (self.lo(l.var()), self.hi(l.var()));
        if l.is_negated() {
            (1 - hi, 1 - lo)
        } else {
            (lo, hi)
        }
    }

    #[inline]
    pub fn lit_value(&self, l: Lit) -> Option<bool> {
        match self.lit_bounds(l) {
            (1, 1) => Some(true),
            (0, 0) => Some(false),
            _ => None,
        }
    }

    fn save(&mut self, i: usize) {
        self.trail.push((i as u32, self.lo[i], self.hi[i]));
        self.changed.push(i as u32);
    }

    /// Raises the lower bound; `Ok(true)` when the domain shrank.
    pub fn set_lo(&mut self, v: VarId, value: i64) -> Result<bool, Conflict> {
        let i = v.index();
        if value <= self.lo[i] {
            return Ok(false);
        }
        if value > self.hi[i] {
            return Err(Conflict);
        }
        self.save(i);
        self.lo[i] = value;
        Ok(true)
    }

    pub fn set_hi(&mut self, v: VarId, value: i64) -> Result<bool, Conflict> {
        let i = v.index();
        if value >= self.hi[i] {
            return Ok(false);
        }
        if value < self.lo[i] {
            return Err(Conflict);
        }
        self.save(i);
        self.hi[i] = value;
        Ok(true)
    }

    pub fn fix(&mut self, v: VarId, value: i64) -> Result<bool, Conflict> {
        let a = self.set_lo(v, value)?;
        let b = self.set_hi(v, value)?;
        Ok(a || b)
    }

    pub fn set_lit_lo(&mut self, l: Lit, value: i64) -> Result<bool, Conflict> {
        if l.is_negated() {
            self.set_hi(l.var(), 1 - value)
        } else {
            self.set_lo(l.var(), value)
        }
    }

    pub fn set_lit_hi(&mut self, l: Lit, value: i64) -> Result<bool, Conflict> {
        if l.is_negated() {
            self.set_lo(l.var(), 1 - value)
        } else {
            self.set_hi(l.var(), value)
        }
    }

    pub fn set_lit(&mut self, l: Lit, value: bool) -> Result<bool, Conflict> {
        let v = i64::from(value);
        let a = self.set_lit_lo(l, v)?;
        let b = self.set_lit_hi(l, v)?;
        Ok(a || b)
    }

    pub fn push_level(&mut self) {
        self.levels.push(self.trail.len());
    }

    /// Undoes every change since the matching [`Store::push_level`].
    pub fn pop_level(&mut self) {
        let mark = self.levels.pop().expect("pop_level without push_level");
        while self.trail.len() > mark {
            let (i, lo, hi) = self.trail.pop().expect("trail entry");
            self.lo[i as usize] = lo;
            self.hi[i as usize] = hi;
        }
        self.changed.clear();
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub(crate) fn take_changed(&mut self, into: &mut Vec<u32>) {
        into.clear();
        std::mem::swap(into, &mut self.changed);
    }

    pub(crate) fn clear_changed(&mut self) {
        self.changed.clear();
    }

    /// Lower bounds of every variable, which is the assignment once all are fixed.
    pub fn lower_values(&self) -> Vec<i64> {
        self.lo.clone()
    }

    pub fn all_fixed(&self) -> bool {
        self.lo.iter().zip(&self.hi).all(|(a, b)| a == b)
    }
}
