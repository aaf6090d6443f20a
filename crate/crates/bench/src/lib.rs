//! Fixtures shared by the criterion benchmarks.

use lubysat::generators::{pigeonhole, random_ksat, THRESHOLD_RATIO_3SAT};
use lubysat::Formula;

/// Random 3-SAT instances near the satisfiability threshold.
pub fn threshold_instances(num_vars: usize, count: u64) -> Vec<Formula> {
    let clauses = (num_vars as f64 * THRESHOLD_RATIO_3SAT).round() as usize;
    (0..count)
        .map(|seed| random_ksat(num_vars, clauses, 3, seed))
        .collect()
}

/// Pigeonhole instance with `holes + 1` pigeons.
pub fn php(holes: usize) -> Formula {
    pigeonhole(holes + 1, holes)
}
