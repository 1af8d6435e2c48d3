use std::cmp::Ordering;
use std::collections::HashSet;

use super::{pattern_variables, Direction, PatternTerm, SparqlQuery, TriplePattern};
use crate::rdf::{graph_match, Iri, RdfGraph, SolutionTable, Term};

fn label_iri(graph: &RdfGraph, label: &str) -> Term {
    let base = graph.base();
    let base = base.split('#').next().unwrap_or(base);
    Term::Iri(Iri::new(format!("{base}#{label}")))
}

/// Solutions of a basic graph pattern. Columns follow the first appearance
/// of each variable; rows are distinct and sorted by their terms.
pub fn eval_bgp(graph: &RdfGraph, patterns: &[TriplePattern]) -> SolutionTable {
    let variables = pattern_variables(patterns);
    let col = |v: &str| variables.iter().position(|x| x == v).expect("pattern variable");
    let mut rows: Vec<Vec<Option<Term>>> = vec![vec![None; variables.len()]];
    for pattern in patterns {
        let mut next = Vec::new();
        for row in &rows {
            let fixed: Vec<Option<Term>> = pattern
                .positions()
                .iter()
                .map(|pos| match pos {
                    PatternTerm::Var(v) => row[col(v)].clone(),
                    PatternTerm::Term(t) => Some(t.clone()),
                    PatternTerm::Label(l) => Some(label_iri(graph, l)),
                })
                .collect();
            'triples: for triple in graph_match(graph, fixed[0].as_ref(), fixed[1].as_ref(), fixed[2].as_ref()) {
                let values =
                    [Term::Iri(triple.subject.clone()), Term::Iri(triple.predicate.clone()), triple.object.clone()];
                let mut extended = row.clone();
                for (pos, value) in pattern.positions().iter().zip(values) {
                    if let PatternTerm::Var(v) = pos {
                        let slot = &mut extended[col(v)];
                        match slot {
                            Some(bound) if *bound != value => continue 'triples,
                            Some(_) => {}
                            None => *slot = Some(value),
                        }
                    }
                }
                next.push(extended);
            }
        }
        rows = next;
        if rows.is_empty() {
            break;
        }
    }
    rows.sort();
    rows.dedup();
    SolutionTable { variables, rows }
}

/// Unbound sorts first, then IRIs by code point, then literals by lexical form.
fn order_key_cmp(a: &Option<Term>, b: &Option<Term>) -> Ordering {
    match (a, b) {
        (None, None) => Ordering::Equal,
        (None, Some(_)) => Ordering::Less,
        (Some(_), None) => Ordering::Greater,
        (Some(Term::Iri(x)), Some(Term::Iri(y))) => x.as_str().cmp(y.as_str()),
        (Some(Term::Iri(_)), Some(Term::Literal(_))) => Ordering::Less,
        (Some(Term::Literal(_)), Some(Term::Iri(_))) => Ordering::Greater,
        (Some(Term::Literal(x)), Some(Term::Literal(y))) => x.lexical.cmp(&y.lexical),
    }
}

/// Evaluates a SELECT query: BGP, projection with duplicate removal, then a
/// stable sort on the ORDER BY keys.
pub fn eval_select(graph: &RdfGraph, query: &SparqlQuery) -> SolutionTable {
    let bgp = eval_bgp(graph, &query.patterns);
    let selected = query.selected();
    let cols: Vec<Option<usize>> = selected.iter().map(|v| bgp.column(v)).collect();
    let mut seen = HashSet::new();
    let mut rows = Vec::new();
    // Order keys are kept next to the projected row so they may use
    // variables that are not selected.
    for row in &bgp.rows {
        let projected: Vec<Option<Term>> = cols.iter().map(|c| c.and_then(|c| row[c].clone())).collect();
        if seen.insert(projected.clone()) {
            let keys: Vec<Option<Term>> =
                query.order_by.iter().map(|(v, _)| bgp.column(v).and_then(|c| row[c].clone())).collect();
            rows.push((keys, projected));
        }
    }
    rows.sort_by(|(ka, _), (kb, _)| {
        for ((a, b), (_, dir)) in ka.iter().zip(kb).zip(&query.order_by) {
            let o = order_key_cmp(a, b);
            let o = if *dir == Direction::Desc { o.reverse() } else { o };
            if o != Ordering::Equal {
                return o;
            }
        }
        Ordering::Equal
    });
    SolutionTable { variables: selected, rows: rows.into_iter().map(|(_, r)| r).collect() }
}
