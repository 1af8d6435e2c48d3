use std::collections::HashMap;

use super::{Iri, Term, Triple};

/// A set of triples with subject, predicate and object indexes.
///
/// Triples are kept sorted, and every index bucket lists positions in
/// ascending order, so lookups return triples in term order.
#[derive(Debug, Clone, Default)]
pub struct RdfGraph {
    base: String,
    triples: Vec<Triple>,
    by_subject: HashMap<Iri, Vec<usize>>,
    by_predicate: HashMap<Iri, Vec<usize>>,
    by_object: HashMap<Term, Vec<usize>>,
}

impl RdfGraph {
    pub fn empty(base: impl Into<String>) -> Self {
        RdfGraph { base: base.into(), ..Default::default() }
    }

    pub fn from_triples(base: impl Into<String>, triples: impl IntoIterator<Item = Triple>) -> Self {
        let mut triples: Vec<Triple> = triples.into_iter().collect();
        triples.sort();
        triples.dedup();
        let mut g = RdfGraph { base: base.into(), triples, ..Default::default() };
        for (i, t) in g.triples.iter().enumerate() {
            g.by_subject.entry(t.subject.clone()).or_default().push(i);
            g.by_predicate.entry(t.predicate.clone()).or_default().push(i);
            g.by_object.entry(t.object.clone()).or_default().push(i);
        }
        g
    }

    pub fn base(&self) -> &str {
        &self.base
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn triples(&self) -> &[Triple] {
        &self.triples
    }

    pub fn contains(&self, t: &Triple) -> bool {
        self.triples.binary_search(t).is_ok()
    }

    /// Every term that occurs in some triple, in term order.
    pub fn terms(&self) -> Vec<Term> {
        let mut out: Vec<Term> = self
            .triples
            .iter()
            .flat_map(|t| [Term::Iri(t.subject.clone()), Term::Iri(t.predicate.clone()), t.object.clone()])
            .collect();
        out.sort();
        out.dedup();
        out
    }

    /// Triples matching the bound positions (`None` is a wildcard), in term order.
    pub fn matching(&self, s: Option<&Iri>, p: Option<&Iri>, o: Option<&Term>) -> Vec<&Triple> {
        let buckets =
            [s.map(|s| self.by_subject.get(s)), p.map(|p| self.by_predicate.get(p)), o.map(|o| self.by_object.get(o))];
        let mut candidates: Option<&[usize]> = None;
        for bucket in buckets.into_iter().flatten() {
            let bucket = bucket.map_or(&[][..], Vec::as_slice);
            if bucket.is_empty() {
                return Vec::new();
            }
            if candidates.is_none_or(|c| bucket.len() < c.len()) {
                candidates = Some(bucket);
            }
        }
        let keep = |t: &Triple| {
            s.is_none_or(|s| &t.subject == s) && p.is_none_or(|p| &t.predicate == p) && o.is_none_or(|o| &t.object == o)
        };
        match candidates {
            Some(idx) => idx.iter().map(|&i| &self.triples[i]).filter(|t| keep(t)).collect(),
            None => self.triples.iter().collect(),
        }
    }
}

/// Triples matching a pattern where each position is a term or a wildcard.
pub fn graph_match<'g>(graph: &'g RdfGraph, s: Option<&Term>, p: Option<&Term>, o: Option<&Term>) -> Vec<&'g Triple> {
    // Literal subjects or predicates can never match.
    let s = match s {
        Some(Term::Iri(i)) => Some(i),
        Some(Term::Literal(_)) => return Vec::new(),
        None => None,
    };
    let p = match p {
        Some(Term::Iri(i)) => Some(i),
        Some(Term::Literal(_)) => return Vec::new(),
        None => None,
    };
    graph.matching(s, p, o)
}
