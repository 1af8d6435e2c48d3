use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use super::{Assertion, Axiom, ClassExpr, Ontology, OwlError, RoleExpr};
use crate::rdf::vocab::{OWL, RDF, RDFS, XSD};
use crate::rdf::Iri;
use crate::xml::{is_ncname, ElementBuf, NodeRef, QName, XmlDocument, XML_NS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Kind {
    ObjectProperty,
    DatatypeProperty,
    Class,
    NamedIndividual,
}

impl Kind {
    fn element(self) -> ElementBuf {
        ElementBuf::new(owl(match self {
            Kind::ObjectProperty => "ObjectProperty",
            Kind::DatatypeProperty => "DatatypeProperty",
            Kind::Class => "Class",
            Kind::NamedIndividual => "NamedIndividual",
        }))
    }
}

fn owl(local: &str) -> QName {
    QName::ns(OWL, "owl", local)
}

fn rdf(local: &str) -> QName {
    QName::ns(RDF, "rdf", local)
}

fn rdfs(local: &str) -> QName {
    QName::ns(RDFS, "rdfs", local)
}

fn about(el: ElementBuf, iri: &Iri) -> ElementBuf {
    el.attr(rdf("about"), iri.as_str())
}

fn resource(name: QName, iri: &Iri) -> ElementBuf {
    ElementBuf::new(name).attr(rdf("resource"), iri.as_str())
}

fn named_iri(ce: &ClassExpr) -> Option<Iri> {
    match ce {
        ClassExpr::Thing => Some(super::owl_thing()),
        ClassExpr::Nothing => Some(super::owl_nothing()),
        ClassExpr::Named(i) => Some(i.clone()),
        _ => None,
    }
}

/// Property element pointing at a class expression.
fn class_child(name: QName, ce: &ClassExpr) -> ElementBuf {
    match named_iri(ce) {
        Some(i) => resource(name, &i),
        None => ElementBuf::new(name).child(class_element(ce)),
    }
}

fn role_child(name: QName, role: &RoleExpr) -> ElementBuf {
    match role {
        RoleExpr::Named(i) => resource(name, i),
        RoleExpr::Inverse(i) => ElementBuf::new(name).child(inverse_description(i)),
    }
}

fn inverse_description(i: &Iri) -> ElementBuf {
    ElementBuf::new(rdf("Description")).child(resource(owl("inverseOf"), i))
}

fn typed(name: QName, value: String, datatype: &str) -> ElementBuf {
    ElementBuf::new(name).attr(rdf("datatype"), format!("{XSD}{datatype}")).text(value)
}

/// Node element for a class expression.
fn class_element(ce: &ClassExpr) -> ElementBuf {
    let restriction = |role: &RoleExpr| ElementBuf::new(owl("Restriction")).child(role_child(owl("onProperty"), role));
    match ce {
        ClassExpr::Thing | ClassExpr::Nothing | ClassExpr::Named(_) => {
            about(ElementBuf::new(rdf("Description")), &named_iri(ce).unwrap())
        }
        ClassExpr::And(parts) => {
            let mut list = ElementBuf::new(owl("intersectionOf")).attr(rdf("parseType"), "Collection");
            for p in parts {
                list = list.child(class_element(p));
            }
            ElementBuf::new(owl("Class")).child(list)
        }
        ClassExpr::Exists(r, c) => restriction(r).child(class_child(owl("someValuesFrom"), c)),
        ClassExpr::Forall(r, c) => restriction(r).child(class_child(owl("allValuesFrom"), c)),
        ClassExpr::ExistsSelf(r) => restriction(r).child(typed(owl("hasSelf"), "true".into(), "boolean")),
        ClassExpr::MaxCard(n, r, c) if **c == ClassExpr::Thing => {
            restriction(r).child(typed(owl("maxCardinality"), n.to_string(), "nonNegativeInteger"))
        }
        ClassExpr::MaxCard(n, r, c) => restriction(r)
            .child(typed(owl("maxQualifiedCardinality"), n.to_string(), "nonNegativeInteger"))
            .child(class_child(owl("onClass"), c)),
    }
}

fn property_name(iri: &Iri) -> Result<QName, OwlError> {
    let (ns, local) = (iri.namespace(), iri.fragment());
    if ns.is_empty() || !is_ncname(local) {
        return Err(OwlError::Unsupported(format!("property {iri} cannot be written as an XML element name")));
    }
    let prefix =
        [(OWL, "owl"), (RDF, "rdf"), (RDFS, "rdfs"), (XSD, "xsd")].iter().find(|(n, _)| *n == ns).map(|(_, p)| *p);
    QName::new(Some(ns), local, prefix).map_err(|e| OwlError::Unsupported(e.to_string()))
}

/// Where a rendered axiom goes: under an entity element, or as a
/// free-standing node element.
enum Placement {
    Entity(Kind, Iri, ElementBuf),
    Standalone(ElementBuf),
}

struct Renderer<'o> {
    ont: &'o Ontology,
}

impl Renderer<'_> {
    fn role_kind(&self, i: &Iri) -> Kind {
        if self.ont.data_properties.contains(i) {
            Kind::DatatypeProperty
        } else {
            Kind::ObjectProperty
        }
    }

    /// Renders an axiom. With a perspective, only axioms where that entity
    /// is a top-level operand are rendered, and they are hung under it.
    fn axiom(&self, ax: &Axiom, perspective: Option<&Iri>) -> Option<Placement> {
        use ClassExpr as C;
        use Placement::*;
        use RoleExpr as R;
        let is = |i: &Iri| perspective.is_none_or(|p| p == i);
        let placed = match ax {
            Axiom::SubClassOf(C::Thing, C::MaxCard(1, R::Named(r), c)) if **c == C::Thing => Entity(
                Kind::ObjectProperty,
                r.clone(),
                resource(rdf("type"), &Iri::new(format!("{OWL}FunctionalProperty"))),
            ),
            Axiom::SubClassOf(C::ExistsSelf(R::Named(r)), C::Nothing) => Entity(
                Kind::ObjectProperty,
                r.clone(),
                resource(rdf("type"), &Iri::new(format!("{OWL}IrreflexiveProperty"))),
            ),
            Axiom::SubClassOf(C::Named(a), d) => Entity(Kind::Class, a.clone(), class_child(rdfs("subClassOf"), d)),
            Axiom::SubClassOf(c, d) => Standalone(class_element(c).child(class_child(rdfs("subClassOf"), d))),
            Axiom::EquivalentClasses(a, b) | Axiom::DisjointClasses(a, b) => {
                let pred = if matches!(ax, Axiom::EquivalentClasses(..)) {
                    owl("equivalentClass")
                } else {
                    owl("disjointWith")
                };
                match (a.as_named(), b.as_named()) {
                    (_, Some(nb)) if perspective == Some(nb) => Entity(Kind::Class, nb.clone(), class_child(pred, a)),
                    (Some(na), _) => Entity(Kind::Class, na.clone(), class_child(pred, b)),
                    (None, Some(nb)) => Entity(Kind::Class, nb.clone(), class_child(pred, a)),
                    (None, None) => Standalone(class_element(a).child(class_child(pred, b))),
                }
            }
            Axiom::SubRoleOf(R::Inverse(r), R::Named(s)) if r == s => Entity(
                Kind::ObjectProperty,
                r.clone(),
                resource(rdf("type"), &Iri::new(format!("{OWL}SymmetricProperty"))),
            ),
            Axiom::SubRoleOf(R::Named(r), s) => {
                Entity(Kind::ObjectProperty, r.clone(), role_child(rdfs("subPropertyOf"), s))
            }
            Axiom::SubRoleOf(R::Inverse(r), s) => {
                Standalone(inverse_description(r).child(role_child(rdfs("subPropertyOf"), s)))
            }
            Axiom::RoleChain { first, second, sup } => {
                let item = |r: &RoleExpr| match r {
                    R::Named(i) => about(ElementBuf::new(rdf("Description")), i),
                    R::Inverse(i) => inverse_description(i),
                };
                let chain = ElementBuf::new(owl("propertyChainAxiom"))
                    .attr(rdf("parseType"), "Collection")
                    .child(item(first))
                    .child(item(second));
                match sup {
                    R::Named(t) => Entity(Kind::ObjectProperty, t.clone(), chain),
                    R::Inverse(t) => Standalone(inverse_description(t).child(chain)),
                }
            }
            Axiom::InverseRoles(a, b) | Axiom::DisjointRoles(a, b) => {
                let pred =
                    if matches!(ax, Axiom::InverseRoles(..)) { owl("inverseOf") } else { owl("propertyDisjointWith") };
                if perspective == Some(b) && a != b {
                    Entity(Kind::ObjectProperty, b.clone(), resource(pred, a))
                } else {
                    Entity(Kind::ObjectProperty, a.clone(), resource(pred, b))
                }
            }
            Axiom::Domain(r, c) | Axiom::Range(r, c) => {
                let pred = if matches!(ax, Axiom::Domain(..)) { rdfs("domain") } else { rdfs("range") };
                match r {
                    R::Named(i) => Entity(Kind::ObjectProperty, i.clone(), class_child(pred, c)),
                    R::Inverse(i) => Standalone(inverse_description(i).child(class_child(pred, c))),
                }
            }
            Axiom::DataDomain(p, c) => Entity(Kind::DatatypeProperty, p.clone(), class_child(rdfs("domain"), c)),
            Axiom::DataRange(p, d) => Entity(Kind::DatatypeProperty, p.clone(), resource(rdfs("range"), d)),
        };
        match placed {
            Entity(_, ref host, _) if is(host) => Some(placed),
            Standalone(_) if perspective.is_none() => Some(placed),
            _ => None,
        }
    }

    fn assertion(&self, a: &Assertion) -> Result<(Iri, ElementBuf), OwlError> {
        Ok(match a {
            Assertion::Class(i, c) => (i.clone(), class_child(rdf("type"), c)),
            Assertion::Role(i, r, b) => (i.clone(), resource(property_name(r)?, b)),
            Assertion::Data(i, p, l) => {
                let mut el = ElementBuf::new(property_name(p)?);
                if let Some(dt) = &l.datatype {
                    el = el.attr(rdf("datatype"), dt.as_str());
                }
                if let Some(lang) = &l.language {
                    el = el.attr(QName::ns(XML_NS, "xml", "lang"), lang.clone());
                }
                (i.clone(), el.text(l.lexical.clone()))
            }
        })
    }

    /// Entities named by an axiom or assertion, with their kinds.
    fn references(&self, ax: Option<&Axiom>, asr: Option<&Assertion>) -> Vec<(Kind, Iri)> {
        let mut classes = BTreeSet::new();
        let mut roles = BTreeSet::new();
        let mut out = Vec::new();
        if let Some(ax) = ax {
            let mut tmp = Ontology::default();
            tmp.add_axiom(ax.clone());
            classes.extend(tmp.classes);
            roles.extend(tmp.object_properties);
            roles.extend(tmp.data_properties);
        }
        if let Some(a) = asr {
            let mut tmp = Ontology::default();
            tmp.add_assertion(a.clone());
            classes.extend(tmp.classes);
            roles.extend(tmp.object_properties);
            roles.extend(tmp.data_properties);
            out.extend(tmp.individuals.into_iter().map(|i| (Kind::NamedIndividual, i)));
        }
        out.extend(classes.into_iter().map(|c| (Kind::Class, c)));
        out.extend(roles.into_iter().map(|r| (self.role_kind(&r), r)));
        out
    }
}

/// Renders the ontology as RDF/XML, grouped per entity and sorted by kind
/// (object properties, data properties, classes, individuals) then IRI.
///
/// With `subject`, only the axioms in which that entity is a top-level
/// operand are rendered, plus bare declarations of every other entity they
/// mention.
pub fn axioms_to_xml(ont: &Ontology, subject: Option<&Iri>) -> Result<Arc<XmlDocument>, OwlError> {
    let r = Renderer { ont };
    let mut entities: BTreeMap<(Kind, Iri), Vec<ElementBuf>> = BTreeMap::new();
    let mut standalone = Vec::new();
    let mut refs: BTreeSet<(Kind, Iri)> = BTreeSet::new();

    if subject.is_none() {
        for (kind, set) in [
            (Kind::ObjectProperty, &ont.object_properties),
            (Kind::DatatypeProperty, &ont.data_properties),
            (Kind::Class, &ont.classes),
            (Kind::NamedIndividual, &ont.individuals),
        ] {
            for i in set {
                entities.entry((kind, i.clone())).or_default();
            }
        }
    }
    for ax in &ont.tbox {
        match r.axiom(ax, subject) {
            Some(Placement::Entity(kind, host, el)) => {
                entities.entry((kind, host)).or_default().push(el);
                refs.extend(r.references(Some(ax), None));
            }
            Some(Placement::Standalone(el)) => standalone.push(el),
            None => {}
        }
    }
    for a in &ont.abox {
        let (host, el) = r.assertion(a)?;
        if subject.is_none_or(|s| *s == host) {
            entities.entry((Kind::NamedIndividual, host)).or_default().push(el);
            refs.extend(r.references(None, Some(a)));
        }
    }
    if let Some(s) = subject {
        for (kind, i) in refs {
            if i != *s {
                entities.entry((kind, i)).or_default();
            }
        }
    }

    let default_ns =
        if ont.iri.as_str().ends_with(['#', '/']) { ont.iri.as_str().to_string() } else { format!("{}#", ont.iri) };
    let mut root = ElementBuf::new(rdf("RDF"))
        .declare(None, &default_ns)
        .declare(Some("rdf"), RDF)
        .declare(Some("rdfs"), RDFS)
        .declare(Some("owl"), OWL)
        .declare(Some("xsd"), XSD);
    if subject.is_none() && !ont.iri.as_str().is_empty() {
        root = root.child(about(ElementBuf::new(owl("Ontology")), &ont.iri));
    }
    for ((kind, iri), children) in entities {
        let mut el = about(kind.element(), &iri);
        for c in children {
            el = el.child(c);
        }
        root = root.child(el);
    }
    for el in standalone {
        root = root.child(el);
    }
    Ok(XmlDocument::from_root(root, None))
}

/// One `item` element per IRI, in input order, each holding the full IRI.
/// The items share a `wrapper` parent so they stay siblings in document order.
pub fn entities_to_xml(iris: &[Iri], wrapper: QName, item: QName) -> Vec<NodeRef> {
    if iris.is_empty() {
        return Vec::new();
    }
    let mut w = ElementBuf::new(wrapper);
    for i in iris {
        w = w.child(ElementBuf::new(item.clone()).text(i.as_str()));
    }
    let doc = XmlDocument::from_element(w);
    NodeRef::root_of(&doc).element_children().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::owl::load_ontology;
    use crate::rdf::{parse_rdfxml, Literal};
    use crate::xml::{serialize_xml, Canonical, NodeKind};

    fn iri(l: &str) -> Iri {
        Iri::new(format!("http://ex.org/o#{l}"))
    }

    fn named(l: &str) -> ClassExpr {
        ClassExpr::Named(iri(l))
    }

    fn sample() -> Ontology {
        let mut o = Ontology::new("http://ex.org/o");
        let r = |l: &str| RoleExpr::Named(iri(l));
        for ax in [
            Axiom::SubClassOf(named("event"), named("activity")),
            Axiom::SubClassOf(named("message"), named("activity")),
            Axiom::DisjointClasses(named("event"), named("message")),
            Axiom::SubRoleOf(r("added_by"), r("created_by")),
            Axiom::Domain(r("added_by"), named("event")),
            Axiom::Range(r("added_by"), named("user")),
            Axiom::SubRoleOf(r("friend_of").inverse(), r("friend_of")),
            Axiom::SubClassOf(ClassExpr::ExistsSelf(r("friend_of")), ClassExpr::Nothing),
            Axiom::SubClassOf(ClassExpr::Thing, ClassExpr::max_card(1, r("belongs_to"), ClassExpr::Thing)),
            Axiom::RoleChain { first: r("friend_of"), second: r("friend_of"), sup: r("rec") },
            Axiom::InverseRoles(iri("attends_to"), iri("confirmed_by")),
            Axiom::DisjointRoles(iri("manuscript"), iri("referee")),
            Axiom::EquivalentClasses(
                named("pe"),
                ClassExpr::and(vec![named("event"), ClassExpr::exists(r("confirmed_by"), named("user"))]),
            ),
            Axiom::SubClassOf(named("activity"), ClassExpr::max_card(1, r("created_by"), named("user"))),
            Axiom::SubClassOf(
                ClassExpr::and(vec![named("event"), ClassExpr::exists(r("liked_by"), named("user"))]),
                named("popular"),
            ),
            Axiom::Domain(r("x").inverse(), named("user")),
            Axiom::DataDomain(iri("nick"), named("user")),
            Axiom::DataRange(iri("nick"), Iri::new(format!("{XSD}string"))),
        ] {
            o.add_axiom(ax);
        }
        o.add_assertion(Assertion::Class(iri("jesus"), named("user")));
        o.add_assertion(Assertion::Role(iri("jesus"), iri("friend_of"), iri("luis")));
        o.add_assertion(Assertion::Data(iri("jesus"), iri("nick"), Literal::plain("jalmen")));
        o
    }

    fn reload(doc: &Arc<XmlDocument>) -> Ontology {
        let text = serialize_xml(doc, true);
        load_ontology(&parse_rdfxml(&text, "urn:x").unwrap()).unwrap()
    }

    #[test]
    fn full_rendering_round_trips() {
        let o = sample();
        let doc = axioms_to_xml(&o, None).unwrap();
        let back = reload(&doc);
        assert_eq!(back.tbox, o.tbox);
        assert_eq!(back.abox, o.abox);
        assert_eq!(back.iri, o.iri);
    }

    fn top_elements(doc: &Arc<XmlDocument>) -> Vec<NodeRef> {
        NodeRef::root_of(doc).document_element().unwrap().element_children().collect()
    }

    #[test]
    fn subject_rendering_shape() {
        let o = sample();
        let doc = axioms_to_xml(&o, Some(&iri("event"))).unwrap();
        let els = top_elements(&doc);
        let abouts: Vec<String> = els.iter().map(|e| e.attribute(Some(RDF), "about").unwrap()).collect();
        assert_eq!(abouts, vec![iri("activity").to_string(), iri("event").to_string(), iri("message").to_string()]);
        let event = &els[1];
        let kids: Vec<(String, String)> = event
            .element_children()
            .map(|c| (c.name().unwrap().local_name().to_string(), c.attribute(Some(RDF), "resource").unwrap()))
            .collect();
        assert_eq!(
            kids,
            vec![
                ("subClassOf".into(), iri("activity").to_string()),
                ("disjointWith".into(), iri("message").to_string())
            ]
        );
        assert_eq!(els[0].element_children().count(), 0);

        // From the other side of a disjointness the axiom hangs under the subject.
        let doc = axioms_to_xml(&o, Some(&iri("message"))).unwrap();
        let msg = top_elements(&doc)
            .into_iter()
            .find(|e| e.attribute(Some(RDF), "about").unwrap() == iri("message").as_str())
            .unwrap();
        assert!(msg.element_children().any(|c| c.attribute(Some(RDF), "resource") == Some(iri("event").to_string())));
    }

    #[test]
    fn property_subject_shape() {
        let o = sample();
        let doc = axioms_to_xml(&o, Some(&iri("added_by"))).unwrap();
        let els = top_elements(&doc);
        let added = els.iter().find(|e| e.attribute(Some(RDF), "about") == Some(iri("added_by").to_string())).unwrap();
        assert_eq!(added.name().unwrap().local_name(), "ObjectProperty");
        let names: BTreeSet<String> =
            added.element_children().map(|c| c.name().unwrap().local_name().to_string()).collect();
        assert_eq!(names, ["domain", "range", "subPropertyOf"].iter().map(|s| s.to_string()).collect());
    }

    #[test]
    fn empty_ontology_renders_empty_rdf() {
        let doc = axioms_to_xml(&Ontology::new(""), None).unwrap();
        assert!(top_elements(&doc).is_empty());
        let other = axioms_to_xml(&Ontology::new(""), None).unwrap();
        assert_eq!(Canonical::of_document(&doc), Canonical::of_document(&other));
    }

    #[test]
    fn entity_items_keep_order() {
        let items = entities_to_xml(&[iri("b"), iri("a")], QName::local("instances"), QName::local("instance"));
        let texts: Vec<String> = items.iter().map(|n| n.string_value()).collect();
        assert_eq!(texts, vec![iri("b").to_string(), iri("a").to_string()]);
        assert!(matches!(items[0].kind(), NodeKind::Element(_)));
        assert!(entities_to_xml(&[], QName::local("w"), QName::local("i")).is_empty());
    }
}
