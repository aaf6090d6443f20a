//! Decision heuristics: conflict-driven variable activity and polarity choice.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::cnf::{Lit, Var};

pub const DEFAULT_VAR_DECAY: f64 = 0.95;
pub const RESCALE_THRESHOLD: f64 = 1e100;
pub const RESCALE_FACTOR: f64 = 1e-100;
/// Upper bound (exclusive) of the seed-derived initial activity jitter.
pub const JITTER_BOUND: f64 = 1e-6;

/// How the value of a decision variable is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum PolarityMode {
    /// Always branch on false.
    Negative,
    /// Reuse the value the variable last held; false if it never had one.
    #[default]
    PhaseSaving,
    /// Prefer the sign with the larger per-polarity conflict counter.
    ActivitySign,
}

impl fmt::Display for PolarityMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PolarityMode::Negative => "negative",
            PolarityMode::PhaseSaving => "saving",
            PolarityMode::ActivitySign => "activity",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown polarity mode {0:?} (expected negative, saving or activity)")]
pub struct UnknownPolarity(pub String);

impl FromStr for PolarityMode {
    type Err = UnknownPolarity;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "negative" | "neg" => Ok(PolarityMode::Negative),
            "saving" | "phase-saving" | "phase" => Ok(PolarityMode::PhaseSaving),
            "activity" | "activity-sign" => Ok(PolarityMode::ActivitySign),
            _ => Err(UnknownPolarity(s.to_string())),
        }
    }
}

/// Per-variable activity scores kept in a max-heap, plus per-polarity
/// conflict counters.
///
/// The heap orders by score and breaks ties by the lower variable index.
/// Variables stay in the heap after they are assigned and are skipped lazily
/// by [`ActivityTable::pick_branch_variable`]; the solver re-inserts them on
/// unassignment.
#[derive(Debug, Clone)]
pub struct ActivityTable {
    scores: Vec<f64>,
    bump: f64,
    decay: f64,
    pos_count: Vec<u64>,
    neg_count: Vec<u64>,
    heap: Vec<Var>,
    // Position of each variable in `heap`, usize::MAX when absent.
    slot: Vec<usize>,
}

const ABSENT: usize = usize::MAX;

impl ActivityTable {
    pub fn new(num_vars: usize, decay: f64) -> ActivityTable {
        assert!(decay > 0.0 && decay < 1.0, "decay must lie in (0, 1)");
        let mut table = ActivityTable {
            scores: vec![0.0; num_vars],
            bump: 1.0,
            decay,
            pos_count: vec![0; num_vars],
            neg_count: vec![0; num_vars],
            heap: Vec::with_capacity(num_vars),
            slot: vec![ABSENT; num_vars],
        };
        for v in 0..num_vars {
            table.insert(Var::from_index(v));
        }
        table
    }

    pub fn num_vars(&self) -> usize {
        self.scores.len()
    }

    #[inline]
    pub fn score(&self, var: Var) -> f64 {
        self.scores[var.index()]
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn bump_amount(&self) -> f64 {
        self.bump
    }

    /// Conflict counters `(true, false)` of a variable.
    pub fn polarity_counts(&self, var: Var) -> (u64, u64) {
        (self.pos_count[var.index()], self.neg_count[var.index()])
    }

    /// Sets the initial scores to distinct-looking values in `[0, 1e-6)`
    /// drawn from a ChaCha8 stream keyed by `seed`. Must be called before the
    /// first conflict.
    pub fn seed_perturbation(&mut self, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for s in self.scores.iter_mut() {
            *s = rng.gen::<f64>() * JITTER_BOUND;
        }
        self.rebuild_heap();
    }

    /// Records one conflict.
    ///
    /// Every distinct variable of `lits` gets the current bump added to its
    /// score, and each distinct literal increments the counter of its sign.
    /// The bump then grows by `1 / decay`.
    pub fn bump_and_decay(&mut self, lits: &[Lit]) {
        let mut bumped: Vec<Var> = Vec::with_capacity(lits.len());
        for &lit in lits {
            let v = lit.var().index();
            if lit.is_positive() {
                self.pos_count[v] += 1;
            } else {
                self.neg_count[v] += 1;
            }
            bumped.push(lit.var());
        }
        bumped.sort_unstable();
        bumped.dedup();
        let mut rescale = false;
        for v in bumped {
            self.scores[v.index()] += self.bump;
            rescale |= self.scores[v.index()] > RESCALE_THRESHOLD;
            if self.slot[v.index()] != ABSENT {
                self.sift_up(self.slot[v.index()]);
            }
        }
        self.bump /= self.decay;
        if rescale || self.bump > RESCALE_THRESHOLD {
            self.rescale();
        }
    }

    /// Multiplies every score and the bump by the same constant.
    pub fn rescale(&mut self) {
        for s in self.scores.iter_mut() {
            *s *= RESCALE_FACTOR;
        }
        self.bump *= RESCALE_FACTOR;
    }

    /// An unassigned variable of maximal score, lowest index on ties.
    pub fn pick_branch_variable(&mut self, is_assigned: impl Fn(Var) -> bool) -> Option<Var> {
        while let Some(&top) = self.heap.first() {
            if !is_assigned(top) {
                return Some(top);
            }
            self.pop();
        }
        None
    }

    /// Puts a variable back in the decision heap if it is not there.
    pub fn insert(&mut self, var: Var) {
        if self.slot[var.index()] != ABSENT {
            return;
        }
        self.slot[var.index()] = self.heap.len();
        self.heap.push(var);
        self.sift_up(self.heap.len() - 1);
    }

    pub fn contains(&self, var: Var) -> bool {
        self.slot[var.index()] != ABSENT
    }

    fn pop(&mut self) -> Option<Var> {
        let top = *self.heap.first()?;
        let last = self.heap.pop().expect("non-empty");
        self.slot[top.index()] = ABSENT;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.slot[last.index()] = 0;
            self.sift_down(0);
        }
        Some(top)
    }

    fn rebuild_heap(&mut self) {
        let vars: Vec<Var> = self.heap.drain(..).collect();
        for &v in &vars {
            self.slot[v.index()] = ABSENT;
        }
        for v in vars {
            self.insert(v);
        }
    }

    #[inline]
    fn before(&self, a: Var, b: Var) -> bool {
        let (sa, sb) = (self.scores[a.index()], self.scores[b.index()]);
        sa > sb || (sa == sb && a < b)
    }

    fn sift_up(&mut self, mut pos: usize) {
        let var = self.heap[pos];
        while pos > 0 {
            let parent = (pos - 1) / 2;
            if !self.before(var, self.heap[parent]) {
                break;
            }
            self.heap[pos] = self.heap[parent];
            self.slot[self.heap[pos].index()] = pos;
            pos = parent;
        }
        self.heap[pos] = var;
        self.slot[var.index()] = pos;
    }

    fn sift_down(&mut self, mut pos: usize) {
        let var = self.heap[pos];
        let len = self.heap.len();
        loop {
            let left = 2 * pos + 1;
            if left >= len {
                break;
            }
            let right = left + 1;
            let child = if right < len && self.before(self.heap[right], self.heap[left]) {
                right
            } else {
                left
            };
            if !self.before(self.heap[child], var) {
                break;
            }
            self.heap[pos] = self.heap[child];
            self.slot[self.heap[pos].index()] = pos;
            pos = child;
        }
        self.heap[pos] = var;
        self.slot[var.index()] = pos;
    }
}

/// Last value held by each variable.
#[derive(Debug, Clone)]
pub struct PhaseStore {
    saved: Vec<bool>,
    has_saved: Vec<bool>,
}

impl PhaseStore {
    pub fn new(num_vars: usize) -> PhaseStore {
        PhaseStore {
            saved: vec![false; num_vars],
            has_saved: vec![false; num_vars],
        }
    }

    #[inline]
    pub fn save_phase(&mut self, var: Var, value: bool) {
        self.saved[var.index()] = value;
        self.has_saved[var.index()] = true;
    }

    #[inline]
    pub fn saved(&self, var: Var) -> Option<bool> {
        self.has_saved[var.index()].then(|| self.saved[var.index()])
    }
}

/// Chooses the branching value of `var`.
pub fn pick_polarity(var: Var, mode: PolarityMode, phases: &PhaseStore, activity: &ActivityTable) -> bool {
    match mode {
        PolarityMode::Negative => false,
        PolarityMode::PhaseSaving => phases.saved(var).unwrap_or(false),
        PolarityMode::ActivitySign => {
            let (pos, neg) = activity.polarity_counts(var);
            pos > neg
        }
    }
}
