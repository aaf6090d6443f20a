//! Instance generators for tests, benchmarks and the bundled corpus.
//!
//! All generators are deterministic in their seed (ChaCha8).

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cnf::{Formula, Lit, Var};

/// Clause-to-variable ratio of the random 3-SAT phase transition.
pub const THRESHOLD_RATIO_3SAT: f64 = 4.26;

/// Uniform random k-SAT: every clause has `k` distinct variables with
/// independent random signs.
///
/// # Panics
/// Panics if `k > num_vars`.
pub fn random_ksat(num_vars: usize, num_clauses: usize, k: usize, seed: u64) -> Formula {
    assert!(k <= num_vars, "clause width {k} exceeds {num_vars} variables");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let clauses: Vec<Vec<Lit>> = (0..num_clauses)
        .map(|_| {
            sample(&mut rng, num_vars, k)
                .into_iter()
                .map(|v| Var::from_index(v).lit(rng.gen()))
                .collect()
        })
        .collect();
    Formula::new(num_vars, clauses).expect("generated literals are in range")
}

/// Random 3-SAT with `round(ratio * num_vars)` clauses.
pub fn random_3sat_ratio(num_vars: usize, ratio: f64, seed: u64) -> Formula {
    random_ksat(num_vars, (ratio * num_vars as f64).round() as usize, 3, seed)
}

/// Pigeonhole principle PHP(pigeons, holes): unsatisfiable iff
/// `pigeons > holes`. Variable `p * holes + h` means pigeon `p` sits in
/// hole `h`.
pub fn pigeonhole(pigeons: usize, holes: usize) -> Formula {
    let var = |p: usize, h: usize| Var::from_index(p * holes + h);
    let mut clauses = Vec::new();
    for p in 0..pigeons {
        clauses.push((0..holes).map(|h| var(p, h).positive()).collect::<Vec<_>>());
    }
    for h in 0..holes {
        for p in 0..pigeons {
            for q in p + 1..pigeons {
                clauses.push(vec![var(p, h).negative(), var(q, h).negative()]);
            }
        }
    }
    Formula::new(pigeons * holes, clauses).expect("in range")
}

/// XOR of all `num_vars` variables equals `parity`, chained through
/// auxiliary variables: `t1 = x1 ^ x2`, `t2 = t1 ^ x3`, ... Two chains with
/// opposite parity over the same inputs give an unsatisfiable formula.
pub fn parity_chain(num_vars: usize, parity: bool) -> Formula {
    let mut b = ParityBuilder::new(num_vars);
    let out = b.chain(&(0..num_vars).map(Var::from_index).collect::<Vec<_>>());
    b.clauses.push(vec![out.lit(parity)]);
    b.finish()
}

/// Two XOR chains over the same inputs, one shuffled, asserting different
/// parities. Always unsatisfiable.
pub fn parity_contradiction(num_vars: usize, seed: u64) -> Formula {
    use rand::seq::SliceRandom;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = ParityBuilder::new(num_vars);
    let inputs: Vec<Var> = (0..num_vars).map(Var::from_index).collect();
    let mut shuffled = inputs.clone();
    shuffled.shuffle(&mut rng);
    let a = b.chain(&inputs);
    let c = b.chain(&shuffled);
    b.clauses.push(vec![a.positive()]);
    b.clauses.push(vec![c.negative()]);
    b.finish()
}

struct ParityBuilder {
    next: usize,
    clauses: Vec<Vec<Lit>>,
}

impl ParityBuilder {
    fn new(inputs: usize) -> Self {
        ParityBuilder {
            next: inputs,
            clauses: Vec::new(),
        }
    }

    fn fresh(&mut self) -> Var {
        self.next += 1;
        Var::from_index(self.next - 1)
    }

    fn chain(&mut self, vars: &[Var]) -> Var {
        let mut acc = vars[0];
        for &x in &vars[1..] {
            let t = self.fresh();
            // t <-> acc xor x
            let (a, b) = (acc, x);
            self.clauses.push(vec![t.negative(), a.positive(), b.positive()]);
            self.clauses.push(vec![t.negative(), a.negative(), b.negative()]);
            self.clauses.push(vec![t.positive(), a.negative(), b.positive()]);
            self.clauses.push(vec![t.positive(), a.positive(), b.negative()]);
            acc = t;
        }
        acc
    }

    fn finish(self) -> Formula {
        Formula::new(self.next, self.clauses).expect("in range")
    }
}

/// The desk-scale benchmark corpus shipped under `corpus/`: random 3-SAT at
/// the threshold ratio (20 to 175 variables, three seeds per size) plus
/// pigeonhole and parity instances. Names sort in generation order.
pub fn bundled_corpus() -> Vec<(String, Formula)> {
    let mut out = Vec::new();
    for n in [20, 30, 40, 50, 60, 75, 100, 150, 175] {
        for seed in 0..3u64 {
            let f = random_3sat_ratio(n, THRESHOLD_RATIO_3SAT, 10_000 + 100 * n as u64 + seed);
            out.push((format!("uf3-n{n:03}-s{seed}.cnf"), f));
        }
    }
    for holes in [3, 4, 5, 6] {
        out.push((
            format!("php-{}-{holes}.cnf", holes + 1),
            pigeonhole(holes + 1, holes),
        ));
    }
    for n in [6, 8] {
        out.push((
            format!("parity-unsat-{n:02}.cnf"),
            parity_contradiction(n, n as u64),
        ));
    }
    out.push(("parity-sat-10.cnf".to_string(), parity_chain(10, true)));
    out
}
