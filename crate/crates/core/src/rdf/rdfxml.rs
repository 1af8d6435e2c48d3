//! RDF/XML reader for the subset used by ontology and data files.
//!
//! Blank nodes are not part of the data model. Anonymous node elements
//! (restrictions, collection cells, `parseType="Resource"` objects) get
//! document-local skolem IRIs under [`SKOLEM_PREFIX`]; an explicit
//! `rdf:nodeID` is rejected.

use super::vocab::{RDF, RDF_FIRST, RDF_NIL, RDF_REST, RDF_TYPE};
use super::{resolve_iri, Iri, Literal, RdfError, RdfGraph, Term, Triple};
use crate::xml::{parse_xml_with_uri, NodeKind, NodeRef, QName, XML_NS};

/// Prefix of the IRIs minted for anonymous node elements.
pub const SKOLEM_PREFIX: &str = "urn:x-skolem:";

/// Parses RDF/XML text. `base` is used when the document carries no `xml:base`.
pub fn parse_rdfxml(text: &str, base: &str) -> Result<RdfGraph, RdfError> {
    let doc = parse_xml_with_uri(text, Some(base.to_string()))?;
    parse_rdfxml_document(&NodeRef::root_of(&doc), base)
}

/// Reads triples from an already parsed tree. The node may be a document,
/// an `rdf:RDF` element or a single node element.
pub fn parse_rdfxml_document(node: &NodeRef, base: &str) -> Result<RdfGraph, RdfError> {
    let top = if node.is_document() {
        node.element_children().next().ok_or_else(|| RdfError::Syntax("document has no element".into()))?
    } else {
        node.clone()
    };
    let base = top.attribute(Some(XML_NS), "base").unwrap_or_else(|| base.to_string());
    let mut reader = Reader { triples: Vec::new(), next_skolem: 0 };
    let scope = Scope { base: base.clone(), lang: None };
    if is_rdf(&top, "RDF") {
        let scope = scope.enter(&top);
        for attr in top.attributes() {
            if let NodeKind::Attribute(name, _) = attr.kind() {
                if name.namespace() == Some(RDF) {
                    return Err(unknown_attr(name));
                }
            }
        }
        for child in top.children() {
            match child.kind() {
                NodeKind::Element(_) => {
                    reader.node_element(&child, &scope)?;
                }
                NodeKind::Text(t) if !t.trim().is_empty() => {
                    return Err(RdfError::Syntax(format!("unexpected text {:?} in rdf:RDF", t.trim())));
                }
                _ => {}
            }
        }
    } else {
        reader.node_element(&top, &scope)?;
    }
    Ok(RdfGraph::from_triples(base, reader.triples))
}

#[derive(Clone)]
struct Scope {
    base: String,
    lang: Option<String>,
}

impl Scope {
    fn enter(&self, el: &NodeRef) -> Scope {
        let mut s = self.clone();
        if let Some(b) = el.attribute(Some(XML_NS), "base") {
            s.base = resolve_iri(&self.base, &b);
        }
        if let Some(l) = el.attribute(Some(XML_NS), "lang") {
            s.lang = if l.is_empty() { None } else { Some(l) };
        }
        s
    }

    fn name_iri(&self, name: &QName) -> Iri {
        match name.namespace() {
            Some(ns) => Iri::new(format!("{ns}{}", name.local_name())),
            None => Iri::new(resolve_iri(&self.base, &format!("#{}", name.local_name()))),
        }
    }
}

struct Reader {
    triples: Vec<Triple>,
    next_skolem: usize,
}

fn is_rdf(el: &NodeRef, local: &str) -> bool {
    el.name().is_some_and(|n| n.matches(Some(RDF), local))
}

fn unknown_attr(name: &QName) -> RdfError {
    RdfError::Syntax(format!("unknown attribute rdf:{}", name.local_name()))
}

fn node_id_error() -> RdfError {
    RdfError::Unsupported("rdf:nodeID (blank nodes are not supported; use rdf:about)".into())
}

fn attrs(el: &NodeRef) -> Vec<(QName, String)> {
    el.attributes()
        .filter_map(|a| match a.kind() {
            NodeKind::Attribute(n, v) => Some((n.clone(), v.clone())),
            _ => None,
        })
        .collect()
}

impl Reader {
    fn skolem(&mut self) -> Iri {
        self.next_skolem += 1;
        Iri::new(format!("{SKOLEM_PREFIX}{}", self.next_skolem))
    }

    fn push(&mut self, s: &Iri, p: Iri, o: Term) {
        self.triples.push(Triple { subject: s.clone(), predicate: p, object: o });
    }

    fn node_element(&mut self, el: &NodeRef, outer: &Scope) -> Result<Iri, RdfError> {
        let scope = outer.enter(el);
        let name = el.name().expect("node element").clone();
        if name.namespace() == Some(RDF)
            && !matches!(name.local_name(), "Description" | "List" | "Statement" | "Property" | "Bag" | "Seq" | "Alt")
        {
            return Err(RdfError::Syntax(format!("rdf:{} cannot be a node element", name.local_name())));
        }
        let mut subject = None;
        let mut props = Vec::new();
        for (aname, value) in attrs(el) {
            match aname.namespace() {
                Some(XML_NS) => {}
                Some(RDF) => match aname.local_name() {
                    "about" => subject = Some(Iri::new(resolve_iri(&scope.base, &value))),
                    "ID" => subject = Some(Iri::new(resolve_iri(&scope.base, &format!("#{value}")))),
                    "nodeID" => return Err(node_id_error()),
                    "type" => props.push((Iri::new(RDF_TYPE), Term::Iri(Iri::new(resolve_iri(&scope.base, &value))))),
                    _ => return Err(unknown_attr(&aname)),
                },
                _ => props.push((scope.name_iri(&aname), self.literal(value, None, &scope))),
            }
        }
        let subject = match subject {
            Some(s) => s,
            None => self.skolem(),
        };
        if !name.matches(Some(RDF), "Description") {
            self.push(&subject, Iri::new(RDF_TYPE), Term::Iri(scope.name_iri(&name)));
        }
        for (p, o) in props {
            self.push(&subject, p, o);
        }
        self.property_elements(el, &subject, &scope)?;
        Ok(subject)
    }

    fn literal(&self, lexical: String, datatype: Option<Iri>, scope: &Scope) -> Term {
        Term::Literal(match datatype {
            Some(d) => Literal::typed(lexical, d),
            None => match &scope.lang {
                Some(l) => Literal::lang(lexical, l.clone()),
                None => Literal::plain(lexical),
            },
        })
    }

    fn property_elements(&mut self, el: &NodeRef, subject: &Iri, scope: &Scope) -> Result<(), RdfError> {
        for child in el.children() {
            match child.kind() {
                NodeKind::Element(_) => self.property_element(&child, subject, scope)?,
                NodeKind::Text(t) if !t.trim().is_empty() => {
                    return Err(RdfError::Syntax(format!("unexpected text {:?} inside node element", t.trim())));
                }
                _ => {}
            }
        }
        Ok(())
    }

    fn property_element(&mut self, el: &NodeRef, subject: &Iri, outer: &Scope) -> Result<(), RdfError> {
        let scope = outer.enter(el);
        let name = el.name().expect("property element").clone();
        if name.namespace() == Some(RDF) && matches!(name.local_name(), "li" | "Description" | "RDF") {
            return Err(RdfError::Unsupported(format!("rdf:{} as a property element", name.local_name())));
        }
        let predicate = scope.name_iri(&name);
        let mut resource = None;
        let mut datatype = None;
        let mut parse_type = None;
        let mut props = Vec::new();
        for (aname, value) in attrs(el) {
            match aname.namespace() {
                Some(XML_NS) => {}
                Some(RDF) => match aname.local_name() {
                    "resource" => resource = Some(Iri::new(resolve_iri(&scope.base, &value))),
                    "datatype" => datatype = Some(Iri::new(resolve_iri(&scope.base, &value))),
                    "parseType" => parse_type = Some(value),
                    "nodeID" => return Err(node_id_error()),
                    "ID" => return Err(RdfError::Unsupported("reification via rdf:ID on a property element".into())),
                    "type" => props.push((Iri::new(RDF_TYPE), Term::Iri(Iri::new(resolve_iri(&scope.base, &value))))),
                    _ => return Err(unknown_attr(&aname)),
                },
                _ => props.push((scope.name_iri(&aname), self.literal(value, None, &scope))),
            }
        }
        let elements: Vec<NodeRef> = el.element_children().collect();
        let text: String = el
            .children()
            .filter_map(|c| match c.kind() {
                NodeKind::Text(t) => Some(t.clone()),
                _ => None,
            })
            .collect();

        match parse_type.as_deref() {
            Some("Resource") => {
                let object = self.skolem();
                self.push(subject, predicate, Term::Iri(object.clone()));
                for (p, o) in props {
                    self.push(&object, p, o);
                }
                return self.property_elements(el, &object, &scope);
            }
            Some("Collection") => {
                let mut items = Vec::new();
                for item in &elements {
                    items.push(self.node_element(item, &scope)?);
                }
                let head = self.collection(items);
                self.push(subject, predicate, Term::Iri(head));
                return Ok(());
            }
            Some(other) => return Err(RdfError::Unsupported(format!("rdf:parseType=\"{other}\""))),
            None => {}
        }

        if !elements.is_empty() {
            if elements.len() > 1 || resource.is_some() || datatype.is_some() || !props.is_empty() {
                return Err(RdfError::Syntax(format!(
                    "property element {} must contain exactly one node element",
                    name
                )));
            }
            if !text.trim().is_empty() {
                return Err(RdfError::Syntax(format!("mixed content in property element {name}")));
            }
            let object = self.node_element(&elements[0], &scope)?;
            self.push(subject, predicate, Term::Iri(object));
            return Ok(());
        }

        if resource.is_some() || !props.is_empty() {
            if !text.is_empty() || datatype.is_some() {
                return Err(RdfError::Syntax(format!("property element {name} mixes a resource with literal content")));
            }
            let object = match resource {
                Some(r) => r,
                None => self.skolem(),
            };
            self.push(subject, predicate, Term::Iri(object.clone()));
            for (p, o) in props {
                self.push(&object, p, o);
            }
            return Ok(());
        }

        let object = self.literal(text, datatype, &scope);
        self.push(subject, predicate, object);
        Ok(())
    }

    fn collection(&mut self, items: Vec<Iri>) -> Iri {
        let mut rest = Iri::new(RDF_NIL);
        for item in items.into_iter().rev() {
            let cell = self.skolem();
            self.push(&cell, Iri::new(RDF_FIRST), Term::Iri(item));
            self.push(&cell, Iri::new(RDF_REST), Term::Iri(rest));
            rest = cell;
        }
        rest
    }
}
