//! Hybrid XML/RDF query engine.
//!
//! Programs written in a small FLWOR language ([`host`]) navigate XML trees
//! ([`xml`]), run SPARQL SELECT queries over RDF graphs ([`sparql`], [`rdf`])
//! and ask a Horn description-logic reasoner ([`reasoner`]) about OWL
//! ontologies ([`owl`]). Every result comes back as XML, so query output can
//! be reshaped with the same path and constructor syntax used for documents.

pub mod host;
pub mod owl;
pub mod rdf;
pub mod reasoner;
pub mod sparql;
pub mod xml;
