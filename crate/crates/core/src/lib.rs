//! A CDCL SAT solver with pluggable restart policies and polarity
//! heuristics, a UnitWalk-style local search, and a batch harness for
//! restart-strategy sweeps.
//!
//! ```
//! use lubysat::{solve, Budget, Formula, PolarityMode, RestartPolicy, SolverConfig, Status};
//!
//! let f = Formula::from_dimacs_clauses(2, &[vec![1, 2], vec![-1, 2], vec![1, -2]]).unwrap();
//! let config = SolverConfig::new(RestartPolicy::luby(6), PolarityMode::PhaseSaving, 0);
//! let outcome = solve(&f, config, &Budget::unbounded());
//! assert_eq!(outcome.status, Status::Sat);
//! ```

pub mod cnf;
pub mod engine;
pub mod generators;
pub mod harness;
pub mod heuristics;
pub mod restarts;
pub mod unitwalk;

pub use cnf::{evaluate, parse_dimacs, write_dimacs, Formula, FullAssignment, Lit, ParseError, Var};
pub use engine::{solve, Budget, Outcome, SearchObserver, Solver, SolverConfig, SolverStats, Status};
pub use heuristics::PolarityMode;
pub use restarts::{luby_term, RestartPolicy};
pub use unitwalk::walk_solve;
