//! SPARQL SELECT over basic graph patterns.
//!
//! The accepted language is `PREFIX* SELECT (var+ | *) WHERE? { triples }
//! (ORDER BY key+)?`. Triples support `;` and `,` abbreviations and the `a`
//! keyword. FILTER, OPTIONAL, UNION and solution modifiers other than
//! ORDER BY are rejected as unsupported.
//!
//! Evaluation uses simple entailment: only asserted triples match.

mod eval;
mod parser;

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::rdf::Term;

pub use eval::{eval_bgp, eval_select};
pub use parser::parse_sparql;

#[derive(Debug, Error, PartialEq)]
pub enum SparqlError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown prefix '{prefix}:' at offset {offset}")]
    UnknownPrefix { offset: usize, prefix: String },
    #[error("unsupported SPARQL feature at offset {offset}: {feature}")]
    Unsupported { offset: usize, feature: String },
    #[error("variable ?{0} does not occur in any triple pattern")]
    UnusedVariable(String),
}

/// One position of a triple pattern.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PatternTerm {
    Var(String),
    Term(Term),
    /// `_:name`, read as the IRI `<graph base>#name` when evaluated.
    Label(String),
}

impl fmt::Display for PatternTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PatternTerm::Var(v) => write!(f, "?{v}"),
            PatternTerm::Term(t) => write!(f, "{t}"),
            PatternTerm::Label(l) => write!(f, "_:{l}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TriplePattern {
    pub subject: PatternTerm,
    pub predicate: PatternTerm,
    pub object: PatternTerm,
}

impl TriplePattern {
    pub fn new(subject: PatternTerm, predicate: PatternTerm, object: PatternTerm) -> Self {
        TriplePattern { subject, predicate, object }
    }

    pub fn positions(&self) -> [&PatternTerm; 3] {
        [&self.subject, &self.predicate, &self.object]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Asc,
    Desc,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Projection {
    All,
    Vars(Vec<String>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SparqlQuery {
    pub prefixes: BTreeMap<String, String>,
    pub projection: Projection,
    pub patterns: Vec<TriplePattern>,
    pub order_by: Vec<(String, Direction)>,
}

impl SparqlQuery {
    /// Pattern variables in order of first appearance.
    pub fn pattern_variables(&self) -> Vec<String> {
        pattern_variables(&self.patterns)
    }

    /// The projected variables, expanding `*`.
    pub fn selected(&self) -> Vec<String> {
        match &self.projection {
            Projection::All => self.pattern_variables(),
            Projection::Vars(v) => v.clone(),
        }
    }
}

pub(crate) fn pattern_variables(patterns: &[TriplePattern]) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for p in patterns {
        for pos in p.positions() {
            if let PatternTerm::Var(v) = pos {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
        }
    }
    out
}
