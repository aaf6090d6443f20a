//! Brute-force oracles shared by the integration tests. None of this code
//! goes through the solver.

#![allow(dead_code)]

use lubysat::cnf::{Formula, Lit};

/// Clause as bit masks over variable indices.
#[derive(Clone, Copy)]
pub struct MaskClause {
    pos: u64,
    neg: u64,
}

pub fn masks(clauses: &[Vec<Lit>]) -> Vec<MaskClause> {
    clauses
        .iter()
        .map(|c| {
            let mut m = MaskClause { pos: 0, neg: 0 };
            for l in c {
                let bit = 1u64 << l.var().index();
                if l.is_positive() {
                    m.pos |= bit;
                } else {
                    m.neg |= bit;
                }
            }
            m
        })
        .collect()
}

#[inline]
fn satisfied(clauses: &[MaskClause], bits: u64) -> bool {
    clauses.iter().all(|c| (bits & c.pos) | (!bits & c.neg) != 0)
}

/// Some model of the formula as a bit vector, or `None` if unsatisfiable.
pub fn brute_force_model(formula: &Formula) -> Option<u64> {
    assert!(formula.num_vars() <= 24, "brute force is for small formulas");
    let clauses = masks(formula.clauses());
    (0..1u64 << formula.num_vars()).find(|&bits| satisfied(&clauses, bits))
}

pub fn brute_force_sat(formula: &Formula) -> bool {
    brute_force_model(formula).is_some()
}

/// Whether every model of `formula` satisfies `clause`: enumerates the
/// assignments falsifying `clause` and checks none satisfies the formula.
pub fn entails(formula: &Formula, clause: &[Lit]) -> bool {
    let n = formula.num_vars();
    assert!(n <= 24);
    let clauses = masks(formula.clauses());
    let mut fixed_mask = 0u64;
    let mut fixed_bits = 0u64;
    for l in clause {
        let bit = 1u64 << l.var().index();
        if fixed_mask & bit != 0 {
            if (fixed_bits & bit != 0) == l.is_positive() {
                // x and -x both in clause: tautology
                return true;
            }
            continue;
        }
        fixed_mask |= bit;
        // falsify l
        if !l.is_positive() {
            fixed_bits |= bit;
        }
    }
    let free: Vec<u64> = (0..n)
        .map(|i| 1u64 << i)
        .filter(|b| fixed_mask & b == 0)
        .collect();
    (0..1u64 << free.len()).all(|sub| {
        let mut bits = fixed_bits;
        for (k, b) in free.iter().enumerate() {
            if sub >> k & 1 == 1 {
                bits |= b;
            }
        }
        !satisfied(&clauses, bits)
    })
}

/// Literal transcription of the Luby recurrence.
pub fn luby_oracle(i: u64) -> u64 {
    assert!(i >= 1);
    let mut k = 1;
    while (1u64 << k) - 1 < i {
        k += 1;
    }
    if i == (1u64 << k) - 1 {
        1u64 << (k - 1)
    } else {
        luby_oracle(i - (1u64 << (k - 1)) + 1)
    }
}

/// Unit-propagation closure of `assumptions` by repeated clause scans.
/// Returns `None` on a falsified clause.
pub fn implication_closure(formula: &Formula, assumptions: &[Lit]) -> Option<Vec<Option<bool>>> {
    let mut values: Vec<Option<bool>> = vec![None; formula.num_vars()];
    for l in assumptions {
        values[l.var().index()] = Some(l.is_positive());
    }
    loop {
        let mut changed = false;
        for c in formula.clauses() {
            let mut free = Vec::new();
            let mut sat = false;
            for l in c {
                match values[l.var().index()] {
                    Some(v) if v == l.is_positive() => sat = true,
                    Some(_) => {}
                    None => free.push(*l),
                }
            }
            if sat {
                continue;
            }
            match free.len() {
                0 => return None,
                1 => {
                    values[free[0].var().index()] = Some(free[0].is_positive());
                    changed = true;
                }
                _ => {}
            }
        }
        if !changed {
            return Some(values);
        }
    }
}
