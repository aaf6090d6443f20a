mod common;

use common::{brute_force_sat, entails, implication_closure};
use lubysat::engine::SearchObserver;
use lubysat::generators::{pigeonhole, random_3sat_ratio, random_ksat};
use lubysat::{
    evaluate, Budget, Formula, Lit, PolarityMode, RestartPolicy, Solver, SolverConfig, Status, Var,
};
use proptest::prelude::*;

fn lit(x: i32) -> Lit {
    Lit::from_dimacs(x)
}

fn formula(n: usize, clauses: &[&[i32]]) -> Formula {
    let clauses: Vec<Vec<i32>> = clauses.iter().map(|c| c.to_vec()).collect();
    Formula::from_dimacs_clauses(n, &clauses).unwrap()
}

#[derive(Default)]
struct Learned(Vec<Vec<Lit>>);

impl SearchObserver for Learned {
    fn on_learned(&mut self, clause: &[Lit]) {
        self.0.push(clause.to_vec());
    }
}

#[test]
fn propagation_matches_implication_oracle() {
    let f = formula(2, &[&[1, 2], &[1, -2]]);
    let mut s = Solver::new(&f, SolverConfig::default());
    s.decide(lit(-1));
    assert!(s.propagate().is_some());
    assert_eq!(implication_closure(&f, &[lit(-1)]), None);

    let chain = formula(4, &[&[-1, 2], &[-2, 3], &[-3, 4]]);
    let mut s = Solver::new(&chain, SolverConfig::default());
    s.decide(lit(1));
    assert_eq!(s.propagate(), None);
    let closure = implication_closure(&chain, &[lit(1)]).unwrap();
    for v in chain.vars() {
        assert_eq!(s.var_value(v), closure[v.index()]);
    }
}

#[test]
fn propagation_agrees_with_oracle_on_random_decisions() {
    for seed in 0..200 {
        let f = random_3sat_ratio(12, 2.5, seed);
        let mut s = Solver::new(&f, SolverConfig::default());
        if s.propagate().is_some() {
            continue;
        }
        let mut decided = Vec::new();
        for v in 0..4 {
            let l = Var::from_index(v * 3).lit(seed % 2 == 0);
            if s.value(l).is_some() {
                continue;
            }
            s.decide(l);
            decided.push(l);
            let conflict = s.propagate();
            let oracle = implication_closure(&f, &decided);
            match (conflict, oracle) {
                (Some(c), _) => {
                    assert!(s.clause(c).iter().all(|&l| s.value(l) == Some(false)));
                    // a falsified clause means the decisions have no extension
                    let mut with_units = decided.clone();
                    with_units.extend(s.trail().iter().copied());
                    assert!(implication_closure(&f, &with_units).is_none());
                    break;
                }
                (None, None) => panic!("oracle found a conflict the solver missed (seed {seed})"),
                (None, Some(values)) => {
                    s.check_watch_invariant().unwrap();
                    for var in f.vars() {
                        assert_eq!(s.var_value(var), values[var.index()], "seed {seed} var {var}");
                    }
                }
            }
        }
    }
}

#[test]
fn analyze_on_pigeonhole_is_entailed() {
    // PHP(2,1): two pigeons, one hole, plus two spare variables.
    let f = formula(4, &[&[1], &[2], &[-1, -2], &[3, 4]]);
    let out = Solver::new(&f, SolverConfig::default()).solve(&Budget::unbounded());
    assert_eq!(out.status, Status::Unsat);

    // with the units hidden behind decisions the solver must learn
    let f = formula(4, &[&[1, 3], &[2, 4], &[-1, -2], &[-3, -4], &[-3, -2], &[-4, -1]]);
    let mut obs = Learned::default();
    let out = Solver::new(&f, SolverConfig::default()).solve_with(&Budget::unbounded(), &mut obs);
    assert_eq!(out.status == Status::Sat, brute_force_sat(&f));
    for c in &obs.0 {
        assert!(entails(&f, c), "learned {c:?} not entailed");
    }
}

#[test]
fn analyze_asserts_uip_distinct_from_decision() {
    // level 1: x5. level 2: decide x1 -> x2 -> x3 (UIP), x3 -> x4, x3 & x5 -> -x4
    let f = formula(5, &[&[-1, 2], &[-2, 3], &[-3, 4], &[-3, -5, -4]]);
    let mut s = Solver::new(&f, SolverConfig::default());
    s.decide(lit(5));
    assert_eq!(s.propagate(), None);
    s.decide(lit(1));
    let conflict = s.propagate().unwrap();
    let a = s.analyze(conflict);
    assert_eq!(a.learned[0], lit(-3));
    assert_eq!(a.backjump_level, 1);
    let current: Vec<_> = a
        .learned
        .iter()
        .filter(|l| s.level_of(l.var()) == Some(2))
        .collect();
    assert_eq!(current.len(), 1);
    assert!(entails(&f, &a.learned));
}

#[test]
fn solve_matches_brute_force_on_18_variables() {
    let mut sat = 0;
    for i in 0..100u64 {
        let ratio = [3.8, 4.26, 4.6][i as usize % 3];
        let f = random_3sat_ratio(18, ratio, 1000 + i);
        let expected = brute_force_sat(&f);
        sat += expected as usize;
        for seed in 0..3 {
            let config = SolverConfig::new(RestartPolicy::luby(8), PolarityMode::PhaseSaving, seed);
            let out = lubysat::solve(&f, config, &Budget::unbounded());
            assert_eq!(out.status == Status::Sat, expected, "instance {i} seed {seed}");
            assert_ne!(out.status, Status::Unknown);
            if let Some(m) = &out.model {
                assert!(evaluate(&f, m));
            }
        }
    }
    assert!(sat > 10 && sat < 90, "unbalanced sample: {sat} satisfiable");
}

#[test]
fn learned_clauses_are_entailed_and_minimization_keeps_asserting_literal() {
    struct Check<'a> {
        formula: &'a Formula,
        count: usize,
    }
    impl SearchObserver for Check<'_> {
        fn on_learned(&mut self, clause: &[Lit]) {
            assert!(entails(self.formula, clause), "learned {clause:?}");
            self.count += 1;
        }
    }
    let mut learned = 0;
    let mut shrunk = 0;
    for i in 0..60 {
        let f = random_3sat_ratio(16, 4.5, 77 + i);
        let mut check = Check {
            formula: &f,
            count: 0,
        };
        let mut s = Solver::new(
            &f,
            SolverConfig::new(RestartPolicy::luby(2), PolarityMode::PhaseSaving, i),
        );
        let out = s.solve_with(&Budget::unbounded(), &mut check);
        learned += check.count;
        shrunk += (out.stats.learned_literals_after < out.stats.learned_literals_before) as usize;
        assert!(out.stats.learned_literals_after <= out.stats.learned_literals_before);
    }
    assert!(learned > 100);
    assert!(shrunk > 0, "minimization never removed a literal");
}

#[test]
fn minimize_output_is_entailed_subset() {
    // instrument analyze + minimize directly at each conflict
    for i in 0..40 {
        let f = random_3sat_ratio(14, 4.5, 300 + i);
        let mut s = Solver::new(&f, SolverConfig::default());
        if s.propagate().is_some() {
            continue;
        }
        let mut next_var = 0;
        while next_var < f.num_vars() {
            let v = Var::from_index(next_var);
            next_var += 1;
            if s.var_value(v).is_some() {
                continue;
            }
            s.decide(v.negative());
            if let Some(c) = s.propagate() {
                let a = s.analyze(c);
                let m = s.minimize(&a.learned);
                assert_eq!(m[0], a.learned[0]);
                assert!(m.iter().all(|l| a.learned.contains(l)));
                assert!(m.len() <= a.learned.len());
                assert!(entails(&f, &a.learned));
                assert!(entails(&f, &m));
                break;
            }
        }
    }
}

#[test]
fn watch_invariant_survives_random_backjumps() {
    for i in 0..50 {
        let f = random_3sat_ratio(30, 4.0, 500 + i);
        let mut s = Solver::new(&f, SolverConfig::default());
        if s.propagate().is_some() {
            continue;
        }
        let mut v = 0;
        while v < 30 {
            let var = Var::from_index((v * 7 + i as usize) % 30);
            v += 1;
            if s.var_value(var).is_some() {
                continue;
            }
            s.decide(var.lit(v % 2 == 0));
            if s.propagate().is_some() {
                break;
            }
            s.check_watch_invariant().unwrap();
            if v % 4 == 0 {
                let target = s.decision_level() / 2;
                let before: Vec<(Lit, u32)> = s
                    .trail()
                    .iter()
                    .map(|&l| (l, s.level_of(l.var()).unwrap()))
                    .collect();
                s.backjump(target);
                s.check_watch_invariant().unwrap();
                for (l, level) in before {
                    if level > target {
                        assert_eq!(s.value(l), None);
                        assert_eq!(s.phases().saved(l.var()), Some(l.is_positive()));
                    } else {
                        assert_eq!(s.value(l), Some(true));
                    }
                }
            }
        }
    }
}

#[test]
fn invariant_checking_solver_runs_clean() {
    for i in 0..30 {
        let f = random_3sat_ratio(20, 4.26, 900 + i);
        let config = SolverConfig {
            check_invariants: true,
            learned_limit: Some(20),
            ..SolverConfig::new(RestartPolicy::luby(1), PolarityMode::PhaseSaving, i)
        };
        let out = lubysat::solve(&f, config, &Budget::unbounded());
        assert_eq!(out.status == Status::Sat, brute_force_sat(&f));
    }
}

#[test]
fn reduction_does_not_change_answers() {
    for i in 0..60 {
        let f = random_3sat_ratio(20, 4.3, 4000 + i);
        let expected = brute_force_sat(&f);
        for reduce in [false, true] {
            let config = SolverConfig {
                reduce,
                learned_limit: Some(8),
                ..SolverConfig::new(RestartPolicy::luby(4), PolarityMode::Negative, i)
            };
            let out = lubysat::solve(&f, config, &Budget::unbounded());
            assert_eq!(out.status == Status::Sat, expected);
            if reduce && out.stats.conflicts > 50 {
                assert!(out.stats.reductions > 0);
            }
        }
    }
}

#[test]
fn identical_inputs_give_identical_outcomes() {
    let f = random_ksat(60, 255, 3, 8);
    for polarity in [
        PolarityMode::Negative,
        PolarityMode::PhaseSaving,
        PolarityMode::ActivitySign,
    ] {
        let config = SolverConfig::new(RestartPolicy::luby(6), polarity, 3);
        let a = lubysat::solve(&f, config.clone(), &Budget::unbounded());
        let b = lubysat::solve(&f, config, &Budget::unbounded());
        assert_eq!(a, b);
    }
}

#[test]
fn seeds_change_the_search() {
    let f = random_ksat(80, 340, 3, 21);
    let stats: Vec<_> = (0..4)
        .map(|seed| {
            lubysat::solve(
                &f,
                SolverConfig::new(RestartPolicy::luby(6), PolarityMode::PhaseSaving, seed),
                &Budget::unbounded(),
            )
            .stats
        })
        .collect();
    assert!(stats.windows(2).any(|w| w[0] != w[1]));
}

#[test]
fn conflict_budget_gives_unknown() {
    let f = pigeonhole(7, 6);
    let out = lubysat::solve(&f, SolverConfig::default(), &Budget::conflicts(10));
    assert_eq!(out.status, Status::Unknown);
    assert_eq!(out.stats.conflicts, 10);
    assert!(out.model.is_none());

    let timed = lubysat::solve(
        &pigeonhole(11, 10),
        SolverConfig::default(),
        &Budget::timeout(std::time::Duration::from_millis(50)),
    );
    assert_eq!(timed.status, Status::Unknown);
}

#[test]
fn restart_count_matches_policy_firings() {
    let f = pigeonhole(6, 5);
    let out = lubysat::solve(
        &f,
        SolverConfig::new(RestartPolicy::fixed(10), PolarityMode::PhaseSaving, 0),
        &Budget::unbounded(),
    );
    assert_eq!(out.status, Status::Unsat);
    // fixed:10 fires once per 10 conflicts, checked at the next fixpoint
    assert!(out.stats.restarts <= out.stats.conflicts / 10);
    assert!(out.stats.restarts + 1 >= out.stats.conflicts / 10 / 2);

    #[derive(Default)]
    struct Restarts(u64);
    impl SearchObserver for Restarts {
        fn on_backjump(&mut self, _: u32, _: &[Lit], restart: bool) {
            self.0 += restart as u64;
        }
    }
    let mut obs = Restarts::default();
    let out = Solver::new(
        &f,
        SolverConfig::new(RestartPolicy::luby(1), PolarityMode::PhaseSaving, 0),
    )
    .solve_with(&Budget::unbounded(), &mut obs);
    assert!(obs.0 <= out.stats.restarts);
    assert!(out.stats.restarts > 0);
}

#[test]
fn ultra_rapid_restarts_stay_complete() {
    let out = lubysat::solve(
        &pigeonhole(5, 4),
        SolverConfig::new(RestartPolicy::luby(1), PolarityMode::PhaseSaving, 0),
        &Budget::conflicts(1_000_000),
    );
    assert_eq!(out.status, Status::Unsat);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn solver_agrees_with_enumeration(
        n in 1usize..=10,
        clauses in prop::collection::vec(prop::collection::vec((1i32..=10, any::<bool>()), 0..=4), 0..40),
        seed in 0u64..5,
        polarity in prop_oneof![Just(PolarityMode::Negative), Just(PolarityMode::PhaseSaving), Just(PolarityMode::ActivitySign)],
    ) {
        let clauses: Vec<Vec<i32>> = clauses
            .into_iter()
            .map(|c| c.into_iter().map(|(v, s)| { let v = (v - 1) % n as i32 + 1; if s { v } else { -v } }).collect())
            .collect();
        let f = Formula::from_dimacs_clauses(n, &clauses).unwrap();
        let config = SolverConfig { check_invariants: true, ..SolverConfig::new(RestartPolicy::luby(1), polarity, seed) };
        let out = lubysat::solve(&f, config, &Budget::unbounded());
        prop_assert_eq!(out.status == Status::Sat, brute_force_sat(&f));
        prop_assert_ne!(out.status, Status::Unknown);
    }
}
