mod common;

use lubysat::generators::random_ksat;
use lubysat::{evaluate, parse_dimacs, write_dimacs, Formula, FullAssignment, Lit};
use proptest::prelude::*;

fn arb_formula() -> impl Strategy<Value = Formula> {
    (1usize..=20).prop_flat_map(|n| {
        prop::collection::vec(prop::collection::vec((1..=n as i32, any::<bool>()), 0..=5), 0..30).prop_map(
            move |clauses| {
                let clauses: Vec<Vec<i32>> = clauses
                    .into_iter()
                    .map(|c| c.into_iter().map(|(v, s)| if s { v } else { -v }).collect())
                    .collect();
                Formula::from_dimacs_clauses(n, &clauses).unwrap()
            },
        )
    })
}

fn normalized(f: &Formula) -> bool {
    f.clauses().iter().all(|c| {
        let mut lits: Vec<Lit> = c.clone();
        lits.sort();
        let unique = lits.windows(2).all(|w| w[0] != w[1]);
        let tautology = c.iter().any(|l| c.contains(&!*l));
        let in_range = c.iter().all(|l| l.var().index() < f.num_vars());
        unique && !tautology && in_range
    })
}

#[test]
fn random_3sat_round_trips() {
    for seed in 0..20 {
        let f = random_ksat(50, 213, 3, seed);
        let parsed = parse_dimacs(write_dimacs(&f).as_bytes()).unwrap();
        assert_eq!(parsed.formula, f);
        assert!(parsed.warnings.is_empty());
    }
}

#[test]
fn published_style_uf20_instance_has_a_model() {
    // SATLIB-style file with its trailer; the model below was found by
    // enumeration and is checked both ways.
    let text = "c uf20-style\np cnf 20 10\n 4 -18 19 0\n3 18 -5 0\n-5 -8 -15 0\n-20 7 -16 0\n10 -13 -7 0\n\
                -12 -9 17 0\n17 19 5 0\n-16 9 15 0\n11 -5 -14 0\n18 -10 13 0\n%\n0\n";
    let f = parse_dimacs(text.as_bytes()).unwrap().formula;
    let bits = common::brute_force_model(&f).expect("satisfiable");
    let model = FullAssignment::from_bits(20, bits);
    assert!(evaluate(&f, &model));
    let solved = lubysat::solve(&f, Default::default(), &lubysat::Budget::unbounded());
    assert!(evaluate(&f, solved.model.as_ref().unwrap()));
}

proptest! {
    #[test]
    fn write_then_parse_is_identity(f in arb_formula()) {
        let parsed = parse_dimacs(write_dimacs(&f).as_bytes()).unwrap();
        prop_assert_eq!(parsed.formula, f);
    }

    #[test]
    fn evaluate_agrees_with_clause_scan(f in arb_formula(), bits in any::<u64>()) {
        let a = FullAssignment::from_bits(f.num_vars(), bits);
        let mut expected = true;
        for c in f.clauses() {
            let mut sat = false;
            for l in c {
                let value = (bits >> l.var().index()) & 1 == 1;
                if value == l.is_positive() {
                    sat = true;
                }
            }
            expected &= sat;
        }
        prop_assert_eq!(evaluate(&f, &a), expected);
    }

    #[test]
    fn parser_only_yields_normalized_formulas(
        vars in 0usize..6,
        tokens in prop::collection::vec(-8i64..=8, 0..40),
    ) {
        let mut text = format!("p cnf {vars} 3\n");
        for t in &tokens {
            text.push_str(&t.to_string());
            text.push(' ');
        }
        if let Ok(parsed) = parse_dimacs(text.as_bytes()) {
            prop_assert_eq!(parsed.formula.num_vars(), vars);
            prop_assert!(normalized(&parsed.formula));
            prop_assert!(tokens.iter().all(|t| t.unsigned_abs() as usize <= vars));
        }
    }
}
