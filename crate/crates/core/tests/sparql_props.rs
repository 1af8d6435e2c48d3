#[path = "support/sparql_gen.rs"]
mod gen;

use gen::*;
use hyq_core::rdf::Term;
use hyq_core::sparql::{eval_bgp, eval_select, Projection, SparqlQuery};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn bgp_matches_brute_force(g in graph(), patterns in bgp()) {
        check_bgp(&g, &patterns)?;
    }

    #[test]
    fn pattern_order_does_not_change_solutions(g in graph(), patterns in bgp(), seed in 0..6usize) {
        let mut permuted = patterns.clone();
        let n = permuted.len();
        permuted.rotate_left(seed % n);
        if seed >= 3 {
            permuted.reverse();
        }
        let a = eval_bgp(&g, &patterns);
        let b = eval_bgp(&g, &permuted);
        let vars = a.variables.clone();
        prop_assert_eq!(rows_as_set(&a, &vars), rows_as_set(&b, &vars));
    }

    #[test]
    fn projected_rows_extend_to_bgp_rows(g in graph(), patterns in bgp(), keep in 0..3usize) {
        let full = eval_bgp(&g, &patterns);
        let selected: Vec<String> = full.variables.iter().take(keep + 1).cloned().collect();
        let q = SparqlQuery {
            prefixes: Default::default(),
            projection: Projection::Vars(selected.clone()),
            patterns: patterns.clone(),
            order_by: Vec::new(),
        };
        let projected = eval_select(&g, &q);
        let all = rows_as_set(&full, &full.variables);
        for i in 0..projected.len() {
            let row: Vec<&Term> = selected.iter().map(|v| projected.get(i, v).unwrap()).collect();
            let found = all.iter().any(|full_row| {
                selected.iter().zip(&row).all(|(v, t)| {
                    let c = full.column(v).unwrap();
                    &&full_row[c] == t
                })
            });
            prop_assert!(found);
        }
    }
}
