use std::sync::Arc;

use super::Term;
use crate::xml::{ElementBuf, QName, XmlDocument, XML_NS};

pub const SPARQL_RESULTS_NS: &str = "http://www.w3.org/2005/sparql-results#";

/// Ordered solutions of a SELECT query. `rows[i][j]` is the binding of
/// `variables[j]` in row `i`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SolutionTable {
    pub variables: Vec<String>,
    pub rows: Vec<Vec<Option<Term>>>,
}

impl SolutionTable {
    pub fn new(variables: Vec<String>) -> Self {
        SolutionTable { variables, rows: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column(&self, var: &str) -> Option<usize> {
        self.variables.iter().position(|v| v == var)
    }

    /// Binding of `var` in row `row`, if any.
    pub fn get(&self, row: usize, var: &str) -> Option<&Term> {
        let col = self.column(var)?;
        self.rows.get(row)?.get(col)?.as_ref()
    }
}

fn el(local: &str) -> ElementBuf {
    ElementBuf::new(QName::new(Some(SPARQL_RESULTS_NS), local, None).expect("valid name"))
}

/// Renders a table in the W3C SPARQL query results XML format.
pub fn write_sparql_results(table: &SolutionTable) -> Arc<XmlDocument> {
    let mut head = el("head");
    for v in &table.variables {
        head = head.child(el("variable").attr(QName::local("name"), v.clone()));
    }
    let mut results = el("results");
    for row in &table.rows {
        let mut result = el("result");
        for (var, term) in table.variables.iter().zip(row) {
            let Some(term) = term else { continue };
            let value = match term {
                Term::Iri(i) => el("uri").text(i.as_str()),
                Term::Literal(l) => {
                    let mut lit = el("literal");
                    if let Some(lang) = &l.language {
                        lit = lit.attr(QName::ns(XML_NS, "xml", "lang"), lang.clone());
                    }
                    if let Some(dt) = &l.datatype {
                        lit = lit.attr(QName::local("datatype"), dt.as_str());
                    }
                    lit.text(l.lexical.clone())
                }
            };
            result = result.child(el("binding").attr(QName::local("name"), var.clone()).child(value));
        }
        results = results.child(result);
    }
    let root = el("sparql").declare(None, SPARQL_RESULTS_NS).child(head).child(results);
    XmlDocument::from_root(root, None)
}
