#![allow(dead_code)]

use std::collections::BTreeSet;

use hyq_core::rdf::{RdfGraph, Term, Triple};
use hyq_core::sparql::{eval_bgp, PatternTerm, TriplePattern};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

pub const VARS: [&str; 3] = ["x", "y", "z"];

pub fn iri(i: usize) -> Term {
    Term::iri(format!("urn:n{i}"))
}

pub fn pred(i: usize) -> Term {
    Term::iri(format!("urn:p{i}"))
}

pub fn object() -> impl Strategy<Value = Term> {
    prop_oneof![(0..5usize).prop_map(iri), (0..3usize).prop_map(|i| Term::literal(format!("l{i}")))]
}

pub fn graph() -> impl Strategy<Value = RdfGraph> {
    prop::collection::vec((0..5usize, 0..3usize, object()), 0..=50).prop_map(|ts| {
        RdfGraph::from_triples(
            "urn:g",
            ts.into_iter().map(|(s, p, o)| {
                let Term::Iri(s) = iri(s) else { unreachable!() };
                let Term::Iri(p) = pred(p) else { unreachable!() };
                Triple { subject: s, predicate: p, object: o }
            }),
        )
    })
}

pub fn var() -> impl Strategy<Value = PatternTerm> {
    (0..3usize).prop_map(|i| PatternTerm::Var(VARS[i].to_string()))
}

pub fn pattern() -> impl Strategy<Value = TriplePattern> {
    (
        prop_oneof![var(), (0..5usize).prop_map(|i| PatternTerm::Term(iri(i)))],
        prop_oneof![var(), (0..3usize).prop_map(|i| PatternTerm::Term(pred(i)))],
        prop_oneof![var(), object().prop_map(PatternTerm::Term)],
    )
        .prop_map(|(s, p, o)| TriplePattern::new(s, p, o))
}

pub fn bgp() -> impl Strategy<Value = Vec<TriplePattern>> {
    prop::collection::vec(pattern(), 1..=3)
}

pub fn substitute(pos: &PatternTerm, vars: &[String], assignment: &[Term]) -> Term {
    match pos {
        PatternTerm::Var(v) => assignment[vars.iter().position(|x| x == v).unwrap()].clone(),
        PatternTerm::Term(t) => t.clone(),
        PatternTerm::Label(_) => unreachable!(),
    }
}

/// Every assignment of graph terms to the pattern variables that turns
/// every pattern into a member triple.
pub fn brute_force(g: &RdfGraph, patterns: &[TriplePattern], vars: &[String]) -> BTreeSet<Vec<Term>> {
    let terms = g.terms();
    let mut out = BTreeSet::new();
    if terms.is_empty() && !vars.is_empty() {
        return out;
    }
    let total = terms.len().pow(vars.len() as u32);
    for mut code in 0..total {
        let assignment: Vec<Term> = (0..vars.len())
            .map(|_| {
                let t = terms[code % terms.len()].clone();
                code /= terms.len();
                t
            })
            .collect();
        let ok = patterns.iter().all(|p| {
            let [s, pr, o] = p.positions().map(|pos| substitute(pos, vars, &assignment));
            match (s, pr) {
                (Term::Iri(s), Term::Iri(pr)) => g.contains(&Triple { subject: s, predicate: pr, object: o }),
                _ => false,
            }
        });
        if ok {
            out.insert(assignment);
        }
    }
    out
}

pub fn rows_as_set(t: &hyq_core::rdf::SolutionTable, vars: &[String]) -> BTreeSet<Vec<Term>> {
    (0..t.len()).map(|i| vars.iter().map(|v| t.get(i, v).cloned().expect("bound")).collect()).collect()
}

pub fn check_bgp(g: &RdfGraph, patterns: &[TriplePattern]) -> Result<(), TestCaseError> {
    let table = eval_bgp(g, patterns);
    let vars = table.variables.clone();
    let got = rows_as_set(&table, &vars);
    prop_assert_eq!(got.len(), table.len());
    prop_assert_eq!(got, brute_force(g, patterns, &vars));
    Ok(())
}
