//! RDF terms, an indexed in-memory graph, RDF/XML ingestion and the
//! SPARQL query results XML writer.

mod graph;
mod rdfxml;
mod results;

use std::borrow::Borrow;
use std::fmt;

use thiserror::Error;

use crate::xml::XmlError;

pub use graph::{graph_match, RdfGraph};
pub use rdfxml::{parse_rdfxml, parse_rdfxml_document, SKOLEM_PREFIX};
pub use results::{write_sparql_results, SolutionTable, SPARQL_RESULTS_NS};

pub mod vocab {
    pub const RDF: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
    pub const RDFS: &str = "http://www.w3.org/2000/01/rdf-schema#";
    pub const OWL: &str = "http://www.w3.org/2002/07/owl#";
    pub const XSD: &str = "http://www.w3.org/2001/XMLSchema#";

    pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
    pub const RDF_FIRST: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#first";
    pub const RDF_REST: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#rest";
    pub const RDF_NIL: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#nil";
}

#[derive(Debug, Error)]
pub enum RdfError {
    #[error(transparent)]
    Xml(#[from] XmlError),
    #[error("unsupported RDF/XML feature: {0}")]
    Unsupported(String),
    #[error("invalid RDF/XML: {0}")]
    Syntax(String),
}

/// An absolute IRI.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Iri(String);

impl Iri {
    pub fn new(s: impl Into<String>) -> Self {
        Iri(s.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// The part after the last `#`, or after the last `/` when there is no `#`.
    pub fn fragment(&self) -> &str {
        let s = self.0.as_str();
        match s.rfind('#') {
            Some(i) => &s[i + 1..],
            None => s.rsplit('/').next().unwrap_or(s),
        }
    }

    /// Namespace part matching [`Iri::fragment`].
    pub fn namespace(&self) -> &str {
        let s = self.0.as_str();
        &s[..s.len() - self.fragment().len()]
    }
}

impl fmt::Debug for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.0)
    }
}

impl fmt::Display for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Iri {
    fn from(s: &str) -> Self {
        Iri(s.to_string())
    }
}

impl From<String> for Iri {
    fn from(s: String) -> Self {
        Iri(s)
    }
}

impl Borrow<str> for Iri {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl AsRef<str> for Iri {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

/// A literal; plain literals have neither datatype nor language.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub lexical: String,
    pub datatype: Option<Iri>,
    pub language: Option<String>,
}

impl Literal {
    pub fn plain(lexical: impl Into<String>) -> Self {
        Literal { lexical: lexical.into(), datatype: None, language: None }
    }

    pub fn typed(lexical: impl Into<String>, datatype: impl Into<Iri>) -> Self {
        Literal { lexical: lexical.into(), datatype: Some(datatype.into()), language: None }
    }

    pub fn lang(lexical: impl Into<String>, language: impl Into<String>) -> Self {
        Literal { lexical: lexical.into(), datatype: None, language: Some(language.into()) }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.lexical)?;
        if let Some(l) = &self.language {
            write!(f, "@{l}")?;
        }
        if let Some(d) = &self.datatype {
            write!(f, "^^<{d}>")?;
        }
        Ok(())
    }
}

/// IRIs order before literals; within a kind the order is lexicographic.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Iri(Iri),
    Literal(Literal),
}

impl Term {
    pub fn iri(s: impl Into<Iri>) -> Self {
        Term::Iri(s.into())
    }

    pub fn literal(s: impl Into<String>) -> Self {
        Term::Literal(Literal::plain(s))
    }

    pub fn as_iri(&self) -> Option<&Iri> {
        match self {
            Term::Iri(i) => Some(i),
            Term::Literal(_) => None,
        }
    }

    pub fn as_literal(&self) -> Option<&Literal> {
        match self {
            Term::Literal(l) => Some(l),
            Term::Iri(_) => None,
        }
    }

    /// IRI text or literal lexical form.
    pub fn value(&self) -> &str {
        match self {
            Term::Iri(i) => i.as_str(),
            Term::Literal(l) => &l.lexical,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Iri(i) => write!(f, "<{i}>"),
            Term::Literal(l) => write!(f, "{l}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triple {
    pub subject: Iri,
    pub predicate: Iri,
    pub object: Term,
}

impl Triple {
    pub fn new(subject: impl Into<Iri>, predicate: impl Into<Iri>, object: Term) -> Self {
        Triple { subject: subject.into(), predicate: predicate.into(), object }
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}> <{}> {} .", self.subject, self.predicate, self.object)
    }
}

/// Resolves `reference` against `base`. Absolute references are kept,
/// `#frag` replaces the base fragment, other relative references replace
/// the last path segment.
pub fn resolve_iri(base: &str, reference: &str) -> String {
    if has_scheme(reference) {
        return reference.to_string();
    }
    let base_no_frag = base.split('#').next().unwrap_or(base);
    if reference.is_empty() {
        return base_no_frag.to_string();
    }
    if reference.starts_with('#') {
        return format!("{base_no_frag}{reference}");
    }
    match base_no_frag.rfind('/') {
        Some(i) if i + 1 > base_no_frag.find("//").map_or(0, |j| j + 2) => {
            format!("{}{}", &base_no_frag[..=i], reference)
        }
        _ => format!("{base_no_frag}/{reference}"),
    }
}

pub(crate) fn has_scheme(s: &str) -> bool {
    match s.find(':') {
        Some(i) if i > 0 => {
            let scheme = &s[..i];
            scheme.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
                && scheme.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.'))
        }
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relative_resolution() {
        assert_eq!(resolve_iri("http://relations.org", "#b1"), "http://relations.org#b1");
        assert_eq!(resolve_iri("http://a.org/x#y", "#b"), "http://a.org/x#b");
        assert_eq!(resolve_iri("http://a.org/dir/f.owl", "g.owl"), "http://a.org/dir/g.owl");
        assert_eq!(resolve_iri("http://a.org", "g"), "http://a.org/g");
        assert_eq!(resolve_iri("http://a.org/x", "urn:abs"), "urn:abs");
        assert_eq!(resolve_iri("file:///tmp/r.rdf", "#b4"), "file:///tmp/r.rdf#b4");
    }

    #[test]
    fn iri_fragment_split() {
        let i = Iri::from("http://www.semanticweb.org/socialnetwork.owl#jesus");
        assert_eq!(i.fragment(), "jesus");
        assert_eq!(i.namespace(), "http://www.semanticweb.org/socialnetwork.owl#");
        assert_eq!(Iri::from("http://xmlns.com/foaf/0.1/name").fragment(), "name");
    }

    #[test]
    fn literal_equality_is_componentwise() {
        assert_eq!(Literal::plain("a"), Literal::plain("a"));
        assert_ne!(Literal::plain("a"), Literal::typed("a", format!("{}string", vocab::XSD)));
        assert_ne!(Literal::lang("a", "en"), Literal::lang("a", "es"));
        assert!(Term::iri("z") < Term::literal("a"));
    }
}
