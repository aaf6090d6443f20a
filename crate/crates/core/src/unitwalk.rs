//! UnitWalk-style local search.
//!
//! A full assignment is kept between periods. Each period draws a fresh
//! random variable order, then repeatedly decides the first free variable
//! with its value from the full assignment and runs unit propagation on the
//! partial assignment, copying every implied value back into the full one.
//!
//! When propagation hits an empty clause, the rest of the propagation queue
//! is dropped, the full-assignment value of the variable whose decision led
//! to the conflict is flipped, and the period continues with the next free
//! variable.
//!
//! Randomness comes from a ChaCha8 stream (`rand_chacha::ChaCha8Rng`)
//! seeded with the caller's seed, so runs are bit-reproducible.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cnf::{evaluate, Formula, FullAssignment, Lit, Var};
use crate::engine::{Outcome, SolverStats, Status};

/// State carried across periods.
#[derive(Debug, Clone)]
pub struct WalkState {
    pub full: FullAssignment,
    pub order: Vec<Var>,
    rng: ChaCha8Rng,
    /// Full-assignment values changed during the last period.
    pub flips_this_period: u64,
}

impl WalkState {
    /// Random initial full assignment drawn from `seed`.
    pub fn new(num_vars: usize, seed: u64) -> WalkState {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = (0..num_vars).map(|_| rng.gen::<bool>()).collect();
        WalkState {
            full: FullAssignment::new(values),
            order: (0..num_vars).map(Var::from_index).collect(),
            rng,
            flips_this_period: 0,
        }
    }

    /// Starts from a given full assignment.
    pub fn with_assignment(full: FullAssignment, seed: u64) -> WalkState {
        let n = full.len();
        WalkState {
            full,
            order: (0..n).map(Var::from_index).collect(),
            rng: ChaCha8Rng::seed_from_u64(seed),
            flips_this_period: 0,
        }
    }
}

/// Per-period instrumentation.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PeriodTrace {
    /// `(variable, value)` of each decision, value read from the full
    /// assignment at decision time.
    pub decisions: Vec<(Var, bool)>,
    /// Values copied into the full assignment, each implied by propagation.
    pub copies: Vec<Lit>,
    /// Variables flipped in the full assignment after a conflict.
    pub conflict_flips: Vec<Var>,
    pub conflicts: u64,
}

/// Occurrence lists for propagation over a partial assignment.
#[derive(Debug, Clone)]
pub struct Occurrences {
    by_lit: Vec<Vec<u32>>,
}

impl Occurrences {
    pub fn new(formula: &Formula) -> Occurrences {
        let mut by_lit = vec![Vec::new(); 2 * formula.num_vars()];
        for (idx, clause) in formula.clauses().iter().enumerate() {
            for lit in clause {
                by_lit[lit.code()].push(idx as u32);
            }
        }
        Occurrences { by_lit }
    }
}

enum ClauseState {
    Satisfied,
    Unit(Lit),
    Empty,
    Open,
}

fn clause_state(clause: &[Lit], partial: &[Option<bool>]) -> ClauseState {
    let mut free = None;
    let mut free_count = 0;
    for &l in clause {
        match partial[l.var().index()] {
            Some(v) if v == l.is_positive() => return ClauseState::Satisfied,
            Some(_) => {}
            None => {
                free_count += 1;
                free = Some(l);
            }
        }
    }
    match free_count {
        0 => ClauseState::Empty,
        1 => ClauseState::Unit(free.expect("one free literal")),
        _ => ClauseState::Open,
    }
}

struct Period<'a> {
    formula: &'a Formula,
    occ: &'a Occurrences,
    partial: Vec<Option<bool>>,
    queue: Vec<Lit>,
}

impl Period<'_> {
    fn assign(&mut self, lit: Lit) {
        self.partial[lit.var().index()] = Some(lit.is_positive());
        self.queue.push(lit);
    }

    // Propagates the queue; every implied literal is copied into `full`.
    // Returns false on an empty clause, leaving the queue cleared.
    fn propagate(&mut self, state: &mut WalkState, trace: &mut PeriodTrace) -> bool {
        let mut head = 0;
        while head < self.queue.len() {
            let p = self.queue[head];
            head += 1;
            for &ci in &self.occ.by_lit[(!p).code()] {
                let clause = &self.formula.clauses()[ci as usize];
                match clause_state(clause, &self.partial) {
                    ClauseState::Satisfied | ClauseState::Open => {}
                    ClauseState::Empty => {
                        self.queue.clear();
                        return false;
                    }
                    ClauseState::Unit(l) => {
                        self.partial[l.var().index()] = Some(l.is_positive());
                        self.queue.push(l);
                        if !state.full.satisfies(l) {
                            state.flips_this_period += 1;
                        }
                        state.full.set(l.var(), l.is_positive());
                        trace.copies.push(l);
                    }
                }
            }
        }
        self.queue.clear();
        true
    }

    // Clauses that are unit or empty before any decision.
    fn initial_units(&mut self, state: &mut WalkState, trace: &mut PeriodTrace) -> bool {
        for clause in self.formula.clauses() {
            match clause_state(clause, &self.partial) {
                ClauseState::Empty => return false,
                ClauseState::Unit(l) => {
                    if !state.full.satisfies(l) {
                        state.flips_this_period += 1;
                    }
                    state.full.set(l.var(), l.is_positive());
                    trace.copies.push(l);
                    self.assign(l);
                    if !self.propagate(state, trace) {
                        return false;
                    }
                }
                _ => {}
            }
        }
        true
    }
}

/// Runs one period and reports whether the full assignment satisfies the
/// formula afterwards.
pub fn walk_period(formula: &Formula, occ: &Occurrences, state: &mut WalkState) -> bool {
    walk_period_traced(formula, occ, state, &mut PeriodTrace::default())
}

/// [`walk_period`] with instrumentation.
pub fn walk_period_traced(
    formula: &Formula,
    occ: &Occurrences,
    state: &mut WalkState,
    trace: &mut PeriodTrace,
) -> bool {
    state.flips_this_period = 0;
    let mut order = std::mem::take(&mut state.order);
    order.shuffle(&mut state.rng);
    let mut period = Period {
        formula,
        occ,
        partial: vec![None; formula.num_vars()],
        queue: Vec::new(),
    };
    if !period.initial_units(state, trace) {
        // An empty clause at the root: nothing can satisfy the formula.
        trace.conflicts += 1;
        state.order = order;
        return false;
    }
    for &v in &order {
        if period.partial[v.index()].is_some() {
            continue;
        }
        let value = state.full.value(v);
        trace.decisions.push((v, value));
        period.assign(v.lit(value));
        if !period.propagate(state, trace) {
            trace.conflicts += 1;
            trace.conflict_flips.push(v);
            state.full.flip(v);
            state.flips_this_period += 1;
        }
    }
    state.order = order;
    evaluate(formula, &state.full)
}

/// Local search for up to `max_periods` periods.
///
/// Returns SAT with the satisfying full assignment, or UNKNOWN. Never UNSAT.
pub fn walk_solve(formula: &Formula, seed: u64, max_periods: u64) -> Outcome {
    let mut state = WalkState::new(formula.num_vars(), seed);
    let occ = Occurrences::new(formula);
    let mut stats = SolverStats::default();
    if evaluate(formula, &state.full) {
        return Outcome {
            status: Status::Sat,
            model: Some(state.full),
            stats,
        };
    }
    for _ in 0..max_periods {
        let mut trace = PeriodTrace::default();
        let satisfied = walk_period_traced(formula, &occ, &mut state, &mut trace);
        stats.periods += 1;
        stats.decisions += trace.decisions.len() as u64;
        stats.propagations += trace.copies.len() as u64;
        stats.conflicts += trace.conflicts;
        if satisfied {
            return Outcome {
                status: Status::Sat,
                model: Some(state.full),
                stats,
            };
        }
    }
    Outcome {
        status: Status::Unknown,
        model: None,
        stats,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn formula(n: usize, clauses: &[&[i32]]) -> Formula {
        let clauses: Vec<Vec<i32>> = clauses.iter().map(|c| c.to_vec()).collect();
        Formula::from_dimacs_clauses(n, &clauses).unwrap()
    }

    #[test]
    fn unit_clause_is_copied() {
        let f = formula(1, &[&[1]]);
        let occ = Occurrences::new(&f);
        let mut state = WalkState::with_assignment(FullAssignment::new(vec![false]), 0);
        assert!(walk_period(&f, &occ, &mut state));
        assert!(state.full.value(Var::from_dimacs(1)));
        assert_eq!(state.flips_this_period, 1);
    }

    #[test]
    fn satisfying_assignment_is_kept() {
        let f = formula(3, &[&[1, 2], &[-2, 3]]);
        let occ = Occurrences::new(&f);
        let start = FullAssignment::new(vec![true, true, true]);
        for seed in 0..10 {
            let mut state = WalkState::with_assignment(start.clone(), seed);
            assert!(walk_period(&f, &occ, &mut state));
            assert_eq!(state.full, start);
            assert_eq!(state.flips_this_period, 0);
        }
    }

    #[test]
    fn implications_are_copied_into_full() {
        let f = formula(3, &[&[-1, 2], &[-2, 3]]);
        let occ = Occurrences::new(&f);
        let mut state = WalkState::with_assignment(FullAssignment::new(vec![true, false, false]), 0);
        // Find a seed whose order puts x1 first so the chain is implied.
        let mut seed = 0;
        loop {
            let mut probe = WalkState::with_assignment(state.full.clone(), seed);
            let mut order = probe.order.clone();
            order.shuffle(&mut probe.rng);
            if order[0] == Var::from_dimacs(1) {
                break;
            }
            seed += 1;
        }
        state.rng = ChaCha8Rng::seed_from_u64(seed);
        let mut trace = PeriodTrace::default();
        assert!(walk_period_traced(&f, &occ, &mut state, &mut trace));
        assert_eq!(state.full.values(), &[true, true, true]);
        assert_eq!(
            trace.copies,
            vec![Var::from_dimacs(2).positive(), Var::from_dimacs(3).positive()]
        );
        assert_eq!(trace.decisions, vec![(Var::from_dimacs(1), true)]);
    }

    #[test]
    fn contradiction_stays_unknown() {
        let f = formula(1, &[&[1], &[-1]]);
        let out = walk_solve(&f, 3, 50);
        assert_eq!(out.status, Status::Unknown);
        assert_eq!(out.stats.periods, 50);
        assert!(out.model.is_none());
    }

    #[test]
    fn deterministic_per_seed() {
        let f = crate::generators::random_3sat_ratio(20, 3.0, 11);
        assert_eq!(walk_solve(&f, 5, 1000), walk_solve(&f, 5, 1000));
    }
}
