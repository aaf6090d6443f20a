//! The CDCL search engine.
//!
//! Two-watched-literal propagation, first-UIP conflict analysis with
//! recursive learned-clause minimization, non-chronological backjumping,
//! activity-based learned-clause deletion and a top-level loop driven by a
//! [`RestartPolicy`].
//!
//! Clauses live in a single arena addressed by [`ClauseRef`]. For every
//! clause of length two or more, the literals at positions 0 and 1 are the
//! watched ones, and a clause is listed in the watch list of each of them.
//! The literal implied by a reason clause always sits at position 0.

use std::fmt::{self, Write as _};
use std::time::{Duration, Instant};

use crate::cnf::{evaluate, Formula, FullAssignment, Lit, Var};
use crate::heuristics::{pick_polarity, ActivityTable, PhaseStore, PolarityMode, DEFAULT_VAR_DECAY};
use crate::restarts::{should_restart, RestartPolicy, RestartState};

/// Depth bound of the recursive redundancy test used by minimization.
pub const MINIMIZE_DEPTH_LIMIT: usize = 1000;
/// Wall-clock budget is polled every this many conflicts.
pub const TIMEOUT_POLL_CONFLICTS: u64 = 1024;
// Secondary poll on decisions, for runs that rarely conflict.
const TIMEOUT_POLL_DECISIONS: u64 = 1 << 14;
const CLAUSE_RESCALE_THRESHOLD: f64 = 1e20;

/// Index of a clause in the solver's clause arena.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClauseRef(u32);

impl ClauseRef {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone)]
struct Clause {
    lits: Vec<Lit>,
    learnt: bool,
    deleted: bool,
    activity: f64,
}

/// Solver parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub restart: RestartPolicy,
    pub polarity: PolarityMode,
    /// Drives the initial activity jitter and nothing else.
    pub seed: u64,
    pub var_decay: f64,
    pub clause_decay: f64,
    pub minimize: bool,
    /// Activity-based deletion of learned clauses.
    pub reduce: bool,
    /// Initial learned-store limit; `None` means `max(1000, clauses / 3)`.
    pub learned_limit: Option<usize>,
    pub limit_growth: f64,
    /// Assert the watched-literal invariant at every propagation fixpoint.
    /// Costs a full clause sweep per decision.
    pub check_invariants: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            restart: RestartPolicy::default(),
            polarity: PolarityMode::default(),
            seed: 0,
            var_decay: DEFAULT_VAR_DECAY,
            clause_decay: 0.999,
            minimize: true,
            reduce: true,
            learned_limit: None,
            limit_growth: 1.1,
            check_invariants: false,
        }
    }
}

impl SolverConfig {
    pub fn new(restart: RestartPolicy, polarity: PolarityMode, seed: u64) -> Self {
        SolverConfig {
            restart,
            polarity,
            seed,
            ..SolverConfig::default()
        }
    }
}

/// Resource limits of one solve call. A `None` field is unbounded.
///
/// The conflict cap is checked before the wall-clock timeout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Budget {
    pub timeout: Option<Duration>,
    pub conflicts: Option<u64>,
}

impl Budget {
    pub fn unbounded() -> Budget {
        Budget::default()
    }

    pub fn conflicts(cap: u64) -> Budget {
        Budget {
            timeout: None,
            conflicts: Some(cap),
        }
    }

    pub fn timeout(limit: Duration) -> Budget {
        Budget {
            timeout: Some(limit),
            conflicts: None,
        }
    }

    pub fn is_bounded(&self) -> bool {
        self.timeout.is_some() || self.conflicts.is_some()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Sat,
    Unsat,
    Unknown,
}

impl Status {
    pub fn is_solved(self) -> bool {
        self != Status::Unknown
    }

    /// SAT-competition exit code: 10, 20, or 0.
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Sat => 10,
            Status::Unsat => 20,
            Status::Unknown => 0,
        }
    }

    pub fn competition_line(self) -> &'static str {
        match self {
            Status::Sat => "s SATISFIABLE",
            Status::Unsat => "s UNSATISFIABLE",
            Status::Unknown => "s UNKNOWN",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Sat => "SAT",
            Status::Unsat => "UNSAT",
            Status::Unknown => "UNKNOWN",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SolverStats {
    pub conflicts: u64,
    pub decisions: u64,
    pub propagations: u64,
    pub restarts: u64,
    pub learned_literals_before: u64,
    pub learned_literals_after: u64,
    pub reductions: u64,
    /// Local-search periods; zero for CDCL runs.
    pub periods: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub status: Status,
    /// Present exactly when `status` is [`Status::Sat`].
    pub model: Option<FullAssignment>,
    pub stats: SolverStats,
}

impl Outcome {
    /// Result in SAT-competition output format: an `s` line, followed by a
    /// `v` line holding the model for satisfiable instances.
    pub fn competition_output(&self) -> String {
        let mut out = String::new();
        out.push_str(self.status.competition_line());
        out.push('\n');
        if let Some(model) = &self.model {
            out.push('v');
            for lit in model.literals() {
                let _ = write!(out, " {lit}");
            }
            out.push_str(" 0\n");
        }
        out
    }
}

/// Result of conflict analysis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Analysis {
    /// First-UIP clause; the asserting literal is at position 0 and, when
    /// there is more than one literal, a literal of the backjump level is at
    /// position 1.
    pub learned: Vec<Lit>,
    pub backjump_level: u32,
    /// Every distinct literal of the clauses resolved during analysis.
    pub involved: Vec<Lit>,
}

/// Hooks into the search, used for instrumentation.
pub trait SearchObserver {
    fn on_decision(&mut self, _lit: Lit) {}
    /// Literals of every clause taking part in the conflict derivation.
    fn on_conflict(&mut self, _involved: &[Lit]) {}
    /// First-UIP clause and its minimized form, asserting literal first in both.
    fn on_minimized(&mut self, _original: &[Lit], _minimized: &[Lit]) {}
    /// The clause about to be added, after minimization.
    fn on_learned(&mut self, _clause: &[Lit]) {}
    /// Literals removed from the trail, latest first.
    fn on_backjump(&mut self, _level: u32, _unassigned: &[Lit], _restart: bool) {}
}

impl SearchObserver for () {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mark {
    None,
    Source,
    Removable,
    Failed,
}

/// A CDCL solver over one formula.
///
/// Single-threaded; it may be moved between threads between runs.
#[derive(Debug, Clone)]
pub struct Solver {
    config: SolverConfig,
    num_vars: usize,
    clauses: Vec<Clause>,
    num_original: usize,
    learnts: Vec<ClauseRef>,
    watches: Vec<Vec<ClauseRef>>,
    assigns: Vec<Option<bool>>,
    levels: Vec<u32>,
    reasons: Vec<Option<ClauseRef>>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    activity: ActivityTable,
    phases: PhaseStore,
    restart_state: RestartState,
    clause_inc: f64,
    learned_limit: f64,
    stats: SolverStats,
    ok: bool,
    seen: Vec<bool>,
    marks: Vec<Mark>,
}

impl Solver {
    pub fn new(formula: &Formula, config: SolverConfig) -> Solver {
        let n = formula.num_vars();
        let mut activity = ActivityTable::new(n, config.var_decay);
        activity.seed_perturbation(config.seed);
        let learned_limit = config
            .learned_limit
            .unwrap_or_else(|| (formula.num_clauses() / 3).max(1000)) as f64;
        let mut solver = Solver {
            restart_state: config.restart.start(),
            config,
            num_vars: n,
            clauses: Vec::with_capacity(formula.num_clauses()),
            num_original: 0,
            learnts: Vec::new(),
            watches: vec![Vec::new(); 2 * n],
            assigns: vec![None; n],
            levels: vec![0; n],
            reasons: vec![None; n],
            trail: Vec::with_capacity(n),
            trail_lim: Vec::new(),
            qhead: 0,
            activity,
            phases: PhaseStore::new(n),
            clause_inc: 1.0,
            learned_limit,
            stats: SolverStats::default(),
            ok: true,
            seen: vec![false; 2 * n],
            marks: vec![Mark::None; n],
        };
        for clause in formula.clauses() {
            solver.add_original(clause);
        }
        solver.num_original = solver.clauses.len();
        solver
    }

    fn add_original(&mut self, lits: &[Lit]) {
        let cref = self.push_clause(lits.to_vec(), false);
        match lits.len() {
            0 => self.ok = false,
            1 => match self.value(lits[0]) {
                Some(true) => {}
                Some(false) => self.ok = false,
                None => self.enqueue(lits[0], Some(cref)),
            },
            _ => self.attach(cref),
        }
    }

    fn push_clause(&mut self, lits: Vec<Lit>, learnt: bool) -> ClauseRef {
        let cref = ClauseRef(self.clauses.len() as u32);
        self.clauses.push(Clause {
            lits,
            learnt,
            deleted: false,
            activity: 0.0,
        });
        cref
    }

    fn attach(&mut self, cref: ClauseRef) {
        let c = &self.clauses[cref.index()].lits;
        debug_assert!(c.len() >= 2);
        let (a, b) = (c[0], c[1]);
        self.watches[a.code()].push(cref);
        self.watches[b.code()].push(cref);
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    pub fn stats(&self) -> &SolverStats {
        &self.stats
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    #[inline]
    pub fn value(&self, lit: Lit) -> Option<bool> {
        self.assigns[lit.var().index()].map(|v| v == lit.is_positive())
    }

    #[inline]
    pub fn var_value(&self, var: Var) -> Option<bool> {
        self.assigns[var.index()]
    }

    pub fn level_of(&self, var: Var) -> Option<u32> {
        self.assigns[var.index()].map(|_| self.levels[var.index()])
    }

    /// Reason clause of an assigned variable; `None` for decisions and
    /// unassigned variables.
    pub fn reason_of(&self, var: Var) -> Option<ClauseRef> {
        self.assigns[var.index()].and(self.reasons[var.index()])
    }

    pub fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    pub fn trail(&self) -> &[Lit] {
        &self.trail
    }

    pub fn clause(&self, cref: ClauseRef) -> &[Lit] {
        &self.clauses[cref.index()].lits
    }

    pub fn is_learnt(&self, cref: ClauseRef) -> bool {
        self.clauses[cref.index()].learnt
    }

    /// Live learned clauses of length two or more.
    pub fn learned_clauses(&self) -> &[ClauseRef] {
        &self.learnts
    }

    pub fn learned_limit(&self) -> f64 {
        self.learned_limit
    }

    pub fn activity(&self) -> &ActivityTable {
        &self.activity
    }

    pub fn phases(&self) -> &PhaseStore {
        &self.phases
    }

    /// False once the formula is known to be unsatisfiable at level 0.
    pub fn is_ok(&self) -> bool {
        self.ok
    }

    /// Assigns `lit` at the current decision level.
    ///
    /// # Panics
    /// Panics if the variable is already assigned.
    pub fn enqueue(&mut self, lit: Lit, reason: Option<ClauseRef>) {
        let v = lit.var();
        assert!(
            self.assigns[v.index()].is_none(),
            "enqueue of already assigned variable {v}"
        );
        self.assigns[v.index()] = Some(lit.is_positive());
        self.levels[v.index()] = self.decision_level();
        self.reasons[v.index()] = reason;
        self.phases.save_phase(v, lit.is_positive());
        self.trail.push(lit);
    }

    /// Opens a new decision level and assigns `lit` as its decision.
    pub fn decide(&mut self, lit: Lit) {
        self.trail_lim.push(self.trail.len());
        self.enqueue(lit, None);
    }

    /// Unit propagation over the pending part of the trail.
    ///
    /// Returns the first clause found falsified, if any.
    pub fn propagate(&mut self) -> Option<ClauseRef> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            let false_lit = !p;
            let mut watchers = std::mem::take(&mut self.watches[false_lit.code()]);
            let mut kept = 0;
            let mut i = 0;
            let mut conflict = None;
            while i < watchers.len() {
                let cref = watchers[i];
                i += 1;
                let lits = &mut self.clauses[cref.index()].lits;
                if lits[0] == false_lit {
                    lits.swap(0, 1);
                }
                let first = lits[0];
                let first_value = self.assigns[first.var().index()].map(|v| v == first.is_positive());
                if first_value == Some(true) {
                    watchers[kept] = cref;
                    kept += 1;
                    continue;
                }
                let mut moved = false;
                for k in 2..lits.len() {
                    let l = lits[k];
                    if self.assigns[l.var().index()].map(|v| v == l.is_positive()) != Some(false) {
                        lits.swap(1, k);
                        self.watches[l.code()].push(cref);
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                watchers[kept] = cref;
                kept += 1;
                if first_value == Some(false) {
                    conflict = Some(cref);
                    while i < watchers.len() {
                        watchers[kept] = watchers[i];
                        kept += 1;
                        i += 1;
                    }
                } else {
                    self.enqueue(first, Some(cref));
                    self.stats.propagations += 1;
                }
            }
            watchers.truncate(kept);
            self.watches[false_lit.code()] = watchers;
            if conflict.is_some() {
                self.qhead = self.trail.len();
                return conflict;
            }
        }
        None
    }

    /// First-UIP conflict analysis.
    ///
    /// # Panics
    /// Panics if called at decision level 0 or if `conflict` is not falsified.
    pub fn analyze(&mut self, conflict: ClauseRef) -> Analysis {
        let current = self.decision_level();
        assert!(current > 0, "conflict at level 0 means UNSAT; nothing to analyze");
        let mut learned = vec![Lit::from_code(0)];
        let mut involved = Vec::new();
        let mut seen_vars: Vec<Var> = Vec::new();
        let mut pending = 0usize;
        let mut index = self.trail.len();
        let mut reason = Some(conflict);
        let mut asserted: Option<Lit> = None;

        loop {
            let cref = reason.expect("implied literal without reason clause");
            self.bump_clause(cref);
            let len = self.clauses[cref.index()].lits.len();
            for k in 0..len {
                let q = self.clauses[cref.index()].lits[k];
                if !self.seen[q.code()] {
                    self.seen[q.code()] = true;
                    involved.push(q);
                }
                if Some(q) == asserted {
                    continue;
                }
                debug_assert_eq!(self.value(q), Some(false));
                let v = q.var();
                if self.marks[v.index()] == Mark::None && self.levels[v.index()] > 0 {
                    self.marks[v.index()] = Mark::Source;
                    seen_vars.push(v);
                    if self.levels[v.index()] == current {
                        pending += 1;
                    } else {
                        learned.push(q);
                    }
                }
            }
            let p = loop {
                index -= 1;
                let l = self.trail[index];
                if self.marks[l.var().index()] == Mark::Source {
                    break l;
                }
            };
            self.marks[p.var().index()] = Mark::None;
            pending -= 1;
            if pending == 0 {
                learned[0] = !p;
                break;
            }
            reason = self.reasons[p.var().index()];
            asserted = Some(p);
        }

        for v in seen_vars {
            self.marks[v.index()] = Mark::None;
        }
        for l in &involved {
            self.seen[l.code()] = false;
        }
        let backjump_level = self.place_backjump_literal(&mut learned);
        Analysis {
            learned,
            backjump_level,
            involved,
        }
    }

    // Moves a literal of the highest level among learned[1..] to position 1
    // and returns that level (0 for unit clauses).
    fn place_backjump_literal(&self, learned: &mut [Lit]) -> u32 {
        if learned.len() < 2 {
            return 0;
        }
        let mut best = 1;
        for k in 2..learned.len() {
            if self.levels[learned[k].var().index()] > self.levels[learned[best].var().index()] {
                best = k;
            }
        }
        learned.swap(1, best);
        self.levels[learned[1].var().index()]
    }

    /// Removes literals of `learned` that are implied by the remaining ones
    /// through reason clauses. The literal at position 0 is always kept and
    /// the relative order of kept literals is preserved.
    ///
    /// All literals of `learned` must be false under the current trail.
    pub fn minimize(&mut self, learned: &[Lit]) -> Vec<Lit> {
        let mut touched: Vec<Var> = Vec::with_capacity(learned.len());
        for l in learned {
            self.marks[l.var().index()] = Mark::Source;
            touched.push(l.var());
        }
        let mut out = Vec::with_capacity(learned.len());
        for (k, &lit) in learned.iter().enumerate() {
            if k == 0 || !self.literal_redundant(lit, 0, &mut touched) {
                out.push(lit);
            }
        }
        for v in touched {
            self.marks[v.index()] = Mark::None;
        }
        out
    }

    fn literal_redundant(&mut self, lit: Lit, depth: usize, touched: &mut Vec<Var>) -> bool {
        let Some(cref) = self.reasons[lit.var().index()] else {
            return false;
        };
        if depth >= MINIMIZE_DEPTH_LIMIT {
            return false;
        }
        let len = self.clauses[cref.index()].lits.len();
        for k in 0..len {
            let q = self.clauses[cref.index()].lits[k];
            let v = q.var();
            if v == lit.var() || self.levels[v.index()] == 0 {
                continue;
            }
            match self.marks[v.index()] {
                Mark::Source | Mark::Removable => continue,
                Mark::Failed => return false,
                Mark::None => {}
            }
            let redundant = self.literal_redundant(q, depth + 1, touched);
            touched.push(v);
            if redundant {
                self.marks[v.index()] = Mark::Removable;
            } else {
                // A depth cut-off is not a proof of irredundancy; only mark
                // failures found below the limit.
                if depth + 1 < MINIMIZE_DEPTH_LIMIT {
                    self.marks[v.index()] = Mark::Failed;
                }
                return false;
            }
        }
        true
    }

    /// Undoes every assignment above `level`, saving each variable's value
    /// as its phase. No-op if `level` is not below the current level.
    pub fn backjump(&mut self, level: u32) {
        self.backjump_observed(level, false, &mut ());
    }

    fn backjump_observed<O: SearchObserver>(&mut self, level: u32, restart: bool, obs: &mut O) {
        if self.decision_level() <= level {
            return;
        }
        let start = self.trail_lim[level as usize];
        for k in (start..self.trail.len()).rev() {
            let lit = self.trail[k];
            let v = lit.var();
            self.phases.save_phase(v, lit.is_positive());
            self.assigns[v.index()] = None;
            self.reasons[v.index()] = None;
            self.activity.insert(v);
        }
        if start < self.trail.len() {
            let removed: Vec<Lit> = self.trail[start..].iter().rev().copied().collect();
            obs.on_backjump(level, &removed, restart);
        }
        self.trail.truncate(start);
        self.trail_lim.truncate(level as usize);
        self.qhead = self.trail.len();
    }

    fn learn(&mut self, learned: Vec<Lit>) {
        let asserting = learned[0];
        let unit = learned.len() == 1;
        let cref = self.push_clause(learned, true);
        if !unit {
            self.attach(cref);
            self.learnts.push(cref);
            self.bump_clause(cref);
        }
        self.enqueue(asserting, Some(cref));
    }

    fn bump_clause(&mut self, cref: ClauseRef) {
        let c = &mut self.clauses[cref.index()];
        if !c.learnt {
            return;
        }
        c.activity += self.clause_inc;
        if c.activity > CLAUSE_RESCALE_THRESHOLD {
            for &r in &self.learnts {
                self.clauses[r.index()].activity *= 1.0 / CLAUSE_RESCALE_THRESHOLD;
            }
            self.clause_inc *= 1.0 / CLAUSE_RESCALE_THRESHOLD;
        }
    }

    fn locked(&self, cref: ClauseRef) -> bool {
        let first = self.clauses[cref.index()].lits[0];
        self.value(first) == Some(true) && self.reasons[first.var().index()] == Some(cref)
    }

    /// Deletes the less active half of the deletable learned clauses once
    /// the store has reached its limit, then grows the limit.
    ///
    /// Clauses that are the reason of a current assignment and binary
    /// clauses are never deleted.
    pub fn reduce_learned_store(&mut self) {
        if (self.learnts.len() as f64) < self.learned_limit {
            return;
        }
        let mut deletable: Vec<ClauseRef> = self
            .learnts
            .iter()
            .copied()
            .filter(|&c| self.clauses[c.index()].lits.len() > 2 && !self.locked(c))
            .collect();
        deletable.sort_by(|&a, &b| {
            self.clauses[a.index()]
                .activity
                .total_cmp(&self.clauses[b.index()].activity)
                .then(a.cmp(&b))
        });
        let remove = deletable.len() / 2;
        for &c in &deletable[..remove] {
            let clause = &mut self.clauses[c.index()];
            clause.deleted = true;
            clause.lits = Vec::new();
        }
        if remove > 0 {
            let clauses = &self.clauses;
            self.learnts.retain(|c| !clauses[c.index()].deleted);
            for list in &mut self.watches {
                list.retain(|c| !clauses[c.index()].deleted);
            }
        }
        self.learned_limit *= self.config.limit_growth;
        self.stats.reductions += 1;
    }

    /// Checks that every live clause of length two or more is watched by
    /// exactly its first two literals and, when nothing is pending on the
    /// trail, that a false watched literal is always paired with a true one.
    pub fn check_watch_invariant(&self) -> Result<(), String> {
        let mut count = vec![0u8; self.clauses.len()];
        for (code, list) in self.watches.iter().enumerate() {
            let lit = Lit::from_code(code);
            for &cref in list {
                let c = &self.clauses[cref.index()];
                if c.deleted {
                    return Err(format!("deleted clause {} still watched", cref.index()));
                }
                if c.lits[0] != lit && c.lits[1] != lit {
                    return Err(format!(
                        "clause {} watched by non-watch literal {lit}",
                        cref.index()
                    ));
                }
                count[cref.index()] += 1;
            }
        }
        let fixpoint = self.qhead == self.trail.len();
        for (idx, c) in self.clauses.iter().enumerate() {
            if c.deleted || c.lits.len() < 2 {
                continue;
            }
            if count[idx] != 2 || c.lits[0] == c.lits[1] {
                return Err(format!("clause {idx} has {} watchers", count[idx]));
            }
            if !fixpoint {
                continue;
            }
            let (a, b) = (self.value(c.lits[0]), self.value(c.lits[1]));
            if (a == Some(false) && b != Some(true)) || (b == Some(false) && a != Some(true)) {
                return Err(format!(
                    "clause {idx} {:?} violates the watch invariant",
                    c.lits.iter().map(|l| l.to_dimacs()).collect::<Vec<_>>()
                ));
            }
        }
        Ok(())
    }

    pub fn solve(&mut self, budget: &Budget) -> Outcome {
        self.solve_with(budget, &mut ())
    }

    /// Runs the search until it finds a model, refutes the formula, or the
    /// budget runs out.
    pub fn solve_with<O: SearchObserver>(&mut self, budget: &Budget, obs: &mut O) -> Outcome {
        let start = Instant::now();
        let timed_out = |start: &Instant| budget.timeout.is_some_and(|t| start.elapsed() >= t);
        self.backjump_observed(0, false, obs);
        if !self.ok {
            return self.finish(Status::Unsat);
        }
        let mut limit = self.restart_state.next_limit();
        let mut since_restart = 0u64;

        loop {
            if let Some(conflict) = self.propagate() {
                if self.decision_level() == 0 {
                    self.ok = false;
                    return self.finish(Status::Unsat);
                }
                self.stats.conflicts += 1;
                since_restart += 1;

                let analysis = self.analyze(conflict);
                obs.on_conflict(&analysis.involved);
                self.activity.bump_and_decay(&analysis.involved);
                let mut learned = analysis.learned;
                self.stats.learned_literals_before += learned.len() as u64;
                if self.config.minimize {
                    let minimized = self.minimize(&learned);
                    obs.on_minimized(&learned, &minimized);
                    learned = minimized;
                }
                self.stats.learned_literals_after += learned.len() as u64;
                let level = self.place_backjump_literal(&mut learned);
                obs.on_learned(&learned);
                self.backjump_observed(level, false, obs);
                self.learn(learned);
                self.clause_inc /= self.config.clause_decay;

                if budget.conflicts.is_some_and(|cap| self.stats.conflicts >= cap) {
                    return self.finish(Status::Unknown);
                }
                if self.stats.conflicts.is_multiple_of(TIMEOUT_POLL_CONFLICTS) && timed_out(&start) {
                    return self.finish(Status::Unknown);
                }
            } else {
                if self.config.check_invariants {
                    if let Err(e) = self.check_watch_invariant() {
                        panic!("{e}");
                    }
                }
                if should_restart(since_restart, limit) {
                    self.backjump_observed(0, true, obs);
                    self.stats.restarts += 1;
                    limit = self.restart_state.next_limit();
                    since_restart = 0;
                }
                if self.config.reduce && self.learnts.len() as f64 >= self.learned_limit {
                    self.reduce_learned_store();
                }
                if self.stats.decisions % TIMEOUT_POLL_DECISIONS == TIMEOUT_POLL_DECISIONS - 1
                    && timed_out(&start)
                {
                    return self.finish(Status::Unknown);
                }
                let assigns = &self.assigns;
                let next = self
                    .activity
                    .pick_branch_variable(|v| assigns[v.index()].is_some());
                let Some(var) = next else {
                    return self.finish(Status::Sat);
                };
                let value = pick_polarity(var, self.config.polarity, &self.phases, &self.activity);
                let lit = var.lit(value);
                self.stats.decisions += 1;
                obs.on_decision(lit);
                self.decide(lit);
            }
        }
    }

    fn finish(&self, status: Status) -> Outcome {
        let model = (status == Status::Sat).then(|| {
            let values = self.assigns.iter().map(|v| v.unwrap_or(false)).collect();
            FullAssignment::new(values)
        });
        if let Some(model) = &model {
            let sound = self.clauses[..self.num_original]
                .iter()
                .all(|c| c.lits.iter().any(|&l| model.satisfies(l)));
            assert!(sound, "model does not satisfy the input clauses");
        }
        Outcome {
            status,
            model,
            stats: self.stats,
        }
    }
}

/// Solves `formula` with a fresh solver.
///
/// A satisfiable outcome's model is checked against the formula before it is
/// returned.
pub fn solve(formula: &Formula, config: SolverConfig, budget: &Budget) -> Outcome {
    let outcome = Solver::new(formula, config).solve(budget);
    if let Some(model) = &outcome.model {
        assert!(evaluate(formula, model));
    }
    outcome
}
