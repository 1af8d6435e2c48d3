use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};

use super::{Assertion, Axiom, ClassExpr, Ontology, OwlError, RoleExpr};
use crate::rdf::vocab::{OWL, RDF, RDFS, RDF_FIRST, RDF_NIL, RDF_REST, RDF_TYPE};
use crate::rdf::{Iri, Literal, RdfGraph, Term, Triple, SKOLEM_PREFIX};

fn owl(local: &str) -> String {
    format!("{OWL}{local}")
}

fn rdfs(local: &str) -> String {
    format!("{RDFS}{local}")
}

fn is_skolem(i: &Iri) -> bool {
    i.as_str().starts_with(SKOLEM_PREFIX)
}

fn in_vocab(i: &str) -> bool {
    i.starts_with(OWL) || i.starts_with(RDF) || i.starts_with(RDFS)
}

/// Predicates carrying annotations only.
const ANNOTATIONS: &[&str] = &[
    "http://www.w3.org/2000/01/rdf-schema#label",
    "http://www.w3.org/2000/01/rdf-schema#comment",
    "http://www.w3.org/2000/01/rdf-schema#seeAlso",
    "http://www.w3.org/2000/01/rdf-schema#isDefinedBy",
    "http://www.w3.org/2002/07/owl#versionInfo",
];

/// Type objects that only declare something the model does not track.
const IGNORED_TYPES: &[&str] = &[
    "http://www.w3.org/2002/07/owl#AnnotationProperty",
    "http://www.w3.org/2000/01/rdf-schema#Datatype",
    "http://www.w3.org/2002/07/owl#Thing",
];

struct Loader<'g> {
    graph: &'g RdfGraph,
    by_subject: BTreeMap<&'g Iri, Vec<&'g Triple>>,
    consumed: RefCell<BTreeSet<Iri>>,
    ont: Ontology,
}

/// Builds an ontology from an RDF graph in the OWL RDF/XML vocabulary.
///
/// Anonymous class expressions, inverse roles and lists arrive as skolem
/// nodes and are folded into the axioms that use them. A skolem node that
/// no supported construct uses is reported as unsupported.
pub fn load_ontology(graph: &RdfGraph) -> Result<Ontology, OwlError> {
    let mut by_subject: BTreeMap<&Iri, Vec<&Triple>> = BTreeMap::new();
    for t in graph.triples() {
        by_subject.entry(&t.subject).or_default().push(t);
    }
    let base = graph.base();
    let base = base.split('#').next().unwrap_or(base);
    let mut loader = Loader { graph, by_subject, consumed: RefCell::new(BTreeSet::new()), ont: Ontology::new(base) };
    loader.declarations()?;
    loader.axioms()?;
    let consumed = loader.consumed.borrow();
    if let Some(orphan) = loader.by_subject.keys().find(|s| is_skolem(s) && !consumed.contains(*s as &Iri)) {
        let types: Vec<String> = loader.objects(orphan, RDF_TYPE).iter().map(|t| t.value().to_string()).collect();
        return Err(OwlError::Unsupported(format!(
            "anonymous resource {orphan} (types: {}) is not part of any supported axiom",
            if types.is_empty() { "none".to_string() } else { types.join(", ") }
        )));
    }
    drop(consumed);
    Ok(loader.ont)
}

impl<'g> Loader<'g> {
    fn objects(&self, s: &Iri, p: &str) -> Vec<&'g Term> {
        self.by_subject
            .get(s)
            .map(|ts| ts.iter().filter(|t| t.predicate.as_str() == p).map(|t| &t.object).collect())
            .unwrap_or_default()
    }

    fn one(&self, s: &Iri, p: &str) -> Result<Option<&'g Term>, OwlError> {
        let objs = self.objects(s, p);
        match objs.len() {
            0 => Ok(None),
            1 => Ok(Some(objs[0])),
            _ => Err(OwlError::Malformed(format!("{s} has several values for {p}"))),
        }
    }

    fn has_type(&self, s: &Iri, ty: &str) -> bool {
        self.objects(s, RDF_TYPE).iter().any(|t| t.value() == ty)
    }

    fn consume(&self, i: &Iri) {
        if is_skolem(i) {
            self.consumed.borrow_mut().insert(i.clone());
        }
    }

    fn declarations(&mut self) -> Result<(), OwlError> {
        for t in self.graph.triples() {
            if t.predicate.as_str() != RDF_TYPE || is_skolem(&t.subject) {
                continue;
            }
            let Term::Iri(ty) = &t.object else {
                return Err(OwlError::Malformed(format!("rdf:type of {} is a literal", t.subject)));
            };
            let s = t.subject.clone();
            match ty.as_str() {
                x if x == owl("Ontology") => self.ont.iri = s,
                x if x == owl("Class") || x == rdfs("Class") => {
                    self.ont.classes.insert(s);
                }
                x if x == owl("ObjectProperty") => {
                    self.ont.object_properties.insert(s);
                }
                x if x == owl("DatatypeProperty") => {
                    self.ont.data_properties.insert(s);
                }
                x if x == owl("NamedIndividual") => {
                    self.ont.individuals.insert(s);
                }
                x if x == owl("SymmetricProperty")
                    || x == owl("IrreflexiveProperty")
                    || x == owl("FunctionalProperty") =>
                {
                    self.ont.object_properties.insert(s);
                }
                x if IGNORED_TYPES.contains(&x) => {}
                x if in_vocab(x) => {
                    return Err(OwlError::Unsupported(format!("{} (on {s})", short(x))));
                }
                _ => {
                    self.ont.individuals.insert(s);
                    self.ont.classes.insert(ty.clone());
                }
            }
        }
        if self.ont.object_properties.intersection(&self.ont.data_properties).next().is_some() {
            return Err(OwlError::Malformed("a property is declared both object and data property".into()));
        }
        Ok(())
    }

    fn axioms(&mut self) -> Result<(), OwlError> {
        let subjects: Vec<&'g Iri> = self.by_subject.keys().copied().collect();
        for s in subjects {
            for t in self.by_subject[s].clone() {
                self.triple(s, t)?;
            }
        }
        Ok(())
    }

    fn triple(&mut self, s: &'g Iri, t: &'g Triple) -> Result<(), OwlError> {
        let p = t.predicate.as_str();
        let skolem = is_skolem(s);
        if ANNOTATIONS.contains(&p) {
            return Ok(());
        }
        let obj_iri =
            || t.object.as_iri().ok_or_else(|| OwlError::Malformed(format!("{} of {s} must be a resource", short(p))));
        let is_data = |i: &Iri| self.ont.data_properties.contains(i);
        let axiom = match p {
            RDF_TYPE => {
                let ty = obj_iri()?;
                if skolem {
                    return Ok(());
                }
                match ty.as_str() {
                    x if x == owl("SymmetricProperty") => {
                        Axiom::SubRoleOf(RoleExpr::Inverse(s.clone()), RoleExpr::Named(s.clone()))
                    }
                    x if x == owl("FunctionalProperty") => Axiom::SubClassOf(
                        ClassExpr::Thing,
                        ClassExpr::max_card(1, RoleExpr::Named(s.clone()), ClassExpr::Thing),
                    ),
                    x if x == owl("IrreflexiveProperty") => {
                        Axiom::SubClassOf(ClassExpr::ExistsSelf(RoleExpr::Named(s.clone())), ClassExpr::Nothing)
                    }
                    x if in_vocab(x) => return Ok(()),
                    _ => {
                        let c = self.class_expr(&t.object)?;
                        self.ont.add_assertion(Assertion::Class(s.clone(), c));
                        return Ok(());
                    }
                }
            }
            x if x == rdfs("subClassOf") => {
                Axiom::SubClassOf(self.class_expr(&Term::Iri(s.clone()))?, self.class_expr(&t.object)?)
            }
            x if x == owl("equivalentClass") => {
                Axiom::EquivalentClasses(self.class_expr(&Term::Iri(s.clone()))?, self.class_expr(&t.object)?)
            }
            x if x == owl("disjointWith") => {
                Axiom::DisjointClasses(self.class_expr(&Term::Iri(s.clone()))?, self.class_expr(&t.object)?)
            }
            x if x == rdfs("subPropertyOf") => {
                if is_data(s) {
                    return Err(OwlError::Unsupported(format!("rdfs:subPropertyOf on data property {s}")));
                }
                Axiom::SubRoleOf(self.role(s)?, self.role(obj_iri()?)?)
            }
            x if x == rdfs("domain") => {
                if is_data(s) {
                    Axiom::DataDomain(s.clone(), self.class_expr(&t.object)?)
                } else {
                    Axiom::Domain(self.role(s)?, self.class_expr(&t.object)?)
                }
            }
            x if x == rdfs("range") => {
                if is_data(s) {
                    Axiom::DataRange(s.clone(), obj_iri()?.clone())
                } else {
                    Axiom::Range(self.role(s)?, self.class_expr(&t.object)?)
                }
            }
            x if x == owl("inverseOf") => {
                if skolem {
                    // An inverse role expression, read where it is used.
                    return Ok(());
                }
                let o = obj_iri()?;
                if is_skolem(o) {
                    return Err(OwlError::Unsupported("owl:inverseOf an anonymous role".into()));
                }
                Axiom::InverseRoles(s.clone(), o.clone())
            }
            x if x == owl("propertyDisjointWith") => {
                let o = obj_iri()?;
                if skolem || is_skolem(o) {
                    return Err(OwlError::Unsupported("owl:propertyDisjointWith on an inverse role".into()));
                }
                Axiom::DisjointRoles(s.clone(), o.clone())
            }
            x if x == owl("propertyChainAxiom") => {
                let chain = self.list(obj_iri()?)?;
                if chain.len() != 2 {
                    return Err(OwlError::Unsupported(format!(
                        "owl:propertyChainAxiom of length {} (only 2 is supported)",
                        chain.len()
                    )));
                }
                let roles = chain
                    .iter()
                    .map(|t| match t {
                        Term::Iri(i) => self.role(i),
                        Term::Literal(_) => Err(OwlError::Malformed("literal in a property chain".into())),
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Axiom::RoleChain { first: roles[0].clone(), second: roles[1].clone(), sup: self.role(s)? }
            }
            x if x == RDF_FIRST || x == RDF_REST => return Ok(()),
            x if skolem && is_restriction_part(x) => return Ok(()),
            x if x == owl("intersectionOf") && skolem => return Ok(()),
            x if x == owl("imports") => return Err(OwlError::Unsupported("owl:imports".into())),
            x if in_vocab(x) => return Err(OwlError::Unsupported(short(x))),
            _ => {
                self.assertion(s, t)?;
                return Ok(());
            }
        };
        self.ont.add_axiom(axiom);
        Ok(())
    }

    fn assertion(&mut self, s: &Iri, t: &Triple) -> Result<(), OwlError> {
        if is_skolem(s) {
            return Err(OwlError::Unsupported(format!("property {} on an anonymous individual", t.predicate)));
        }
        let p = &t.predicate;
        if (self.ont.classes.contains(s)
            || self.ont.object_properties.contains(s)
            || self.ont.data_properties.contains(s))
            && !self.ont.individuals.contains(s)
        {
            return Err(OwlError::Unsupported(format!("annotation {p} on entity {s}")));
        }
        match &t.object {
            Term::Iri(o) => {
                if self.ont.data_properties.contains(p) {
                    return Err(OwlError::Malformed(format!("data property {p} has resource value {o}")));
                }
                if is_skolem(o) {
                    return Err(OwlError::Unsupported(format!("{p} pointing to an anonymous individual")));
                }
                self.ont.add_assertion(Assertion::Role(s.clone(), p.clone(), o.clone()));
            }
            Term::Literal(l) => {
                if self.ont.object_properties.contains(p) {
                    return Err(OwlError::Malformed(format!("object property {p} has literal value")));
                }
                self.ont.add_assertion(Assertion::Data(s.clone(), p.clone(), l.clone()));
            }
        }
        Ok(())
    }

    fn list(&self, head: &Iri) -> Result<Vec<&'g Term>, OwlError> {
        let mut out = Vec::new();
        let mut cur = head.clone();
        let mut seen = BTreeSet::new();
        while cur.as_str() != RDF_NIL {
            if !seen.insert(cur.clone()) {
                return Err(OwlError::Malformed("cyclic rdf:List".into()));
            }
            self.consume(&cur);
            let first = self
                .one(&cur, RDF_FIRST)?
                .ok_or_else(|| OwlError::Malformed(format!("list cell {cur} has no rdf:first")))?;
            out.push(first);
            cur = match self.one(&cur, RDF_REST)? {
                Some(Term::Iri(r)) => r.clone(),
                _ => return Err(OwlError::Malformed("list cell without rdf:rest".into())),
            };
        }
        Ok(out)
    }

    fn role(&mut self, i: &Iri) -> Result<RoleExpr, OwlError> {
        if !is_skolem(i) {
            if self.ont.data_properties.contains(i) {
                return Err(OwlError::Unsupported(format!("data property {i} used as an object property")));
            }
            self.ont.object_properties.insert(i.clone());
            return Ok(RoleExpr::Named(i.clone()));
        }
        self.consume(i);
        match self.one(i, &owl("inverseOf"))? {
            Some(Term::Iri(inner)) => {
                let inner = inner.clone();
                Ok(self.role(&inner)?.inverse())
            }
            _ => Err(OwlError::Unsupported(format!("anonymous property {i}"))),
        }
    }

    fn class_expr(&mut self, t: &Term) -> Result<ClassExpr, OwlError> {
        let Term::Iri(i) = t else {
            return Err(OwlError::Malformed(format!("literal {t} used as a class")));
        };
        if !is_skolem(i) {
            let c = ClassExpr::named(i.clone());
            if let ClassExpr::Named(n) = &c {
                if in_vocab(n.as_str()) {
                    return Err(OwlError::Unsupported(format!("{} used as a class", short(n.as_str()))));
                }
                self.ont.classes.insert(n.clone());
            }
            return Ok(c);
        }
        self.consume(i);
        for unsupported in [
            "unionOf",
            "complementOf",
            "oneOf",
            "hasValue",
            "minCardinality",
            "cardinality",
            "minQualifiedCardinality",
            "qualifiedCardinality",
            "allValuesFrom",
        ] {
            if !self.objects(i, &owl(unsupported)).is_empty() {
                return Err(OwlError::Unsupported(format!("owl:{unsupported}")));
            }
        }
        if let Some(list) = self.one(i, &owl("intersectionOf"))? {
            let head = list.as_iri().ok_or_else(|| OwlError::Malformed("owl:intersectionOf literal".into()))?;
            let members = self.list(head)?;
            let parts = members.into_iter().map(|m| self.class_expr(m)).collect::<Result<Vec<_>, _>>()?;
            if parts.len() < 2 {
                return Err(OwlError::Malformed("owl:intersectionOf needs at least two classes".into()));
            }
            return Ok(ClassExpr::and(parts));
        }
        if self.has_type(i, &owl("Restriction")) || !self.objects(i, &owl("onProperty")).is_empty() {
            let prop = match self.one(i, &owl("onProperty"))? {
                Some(Term::Iri(p)) => p.clone(),
                _ => return Err(OwlError::Malformed(format!("restriction {i} has no owl:onProperty"))),
            };
            if self.ont.data_properties.contains(&prop) {
                return Err(OwlError::Unsupported(format!("restriction on data property {prop}")));
            }
            let role = self.role(&prop)?;
            if let Some(filler) = self.one(i, &owl("someValuesFrom"))? {
                let filler = self.class_expr(filler)?;
                return Ok(ClassExpr::exists(role, filler));
            }
            if let Some(v) = self.one(i, &owl("hasSelf"))? {
                return match v.as_literal().map(|l| l.lexical.trim()) {
                    Some("true" | "1") => Ok(ClassExpr::ExistsSelf(role)),
                    _ => Err(OwlError::Malformed("owl:hasSelf must be true".into())),
                };
            }
            if let Some(n) = self.one(i, &owl("maxQualifiedCardinality"))? {
                let n = cardinality(n)?;
                let filler = match self.one(i, &owl("onClass"))? {
                    Some(c) => self.class_expr(c)?,
                    None => return Err(OwlError::Malformed("owl:maxQualifiedCardinality without owl:onClass".into())),
                };
                return Ok(ClassExpr::max_card(n, role, filler));
            }
            if let Some(n) = self.one(i, &owl("maxCardinality"))? {
                return Ok(ClassExpr::max_card(cardinality(n)?, role, ClassExpr::Thing));
            }
            return Err(OwlError::Unsupported(format!("restriction {i} of an unsupported kind")));
        }
        Err(OwlError::Unsupported(format!("anonymous class {i}")))
    }
}

fn is_restriction_part(p: &str) -> bool {
    [
        "onProperty",
        "someValuesFrom",
        "allValuesFrom",
        "hasSelf",
        "maxQualifiedCardinality",
        "maxCardinality",
        "onClass",
        "unionOf",
        "complementOf",
        "oneOf",
        "hasValue",
        "minCardinality",
        "cardinality",
        "minQualifiedCardinality",
        "qualifiedCardinality",
    ]
    .iter()
    .any(|l| p == owl(l))
}

fn cardinality(t: &Term) -> Result<u32, OwlError> {
    t.as_literal()
        .and_then(|l: &Literal| l.lexical.trim().parse().ok())
        .ok_or_else(|| OwlError::Malformed(format!("cardinality {t} is not a non-negative integer")))
}

fn short(iri: &str) -> String {
    for (ns, p) in [(OWL, "owl"), (RDFS, "rdfs"), (RDF, "rdf")] {
        if let Some(l) = iri.strip_prefix(ns) {
            return format!("{p}:{l}");
        }
    }
    iri.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::parse_rdfxml;

    fn load(body: &str) -> Result<Ontology, OwlError> {
        let text = format!(
            r#"<rdf:RDF xmlns:rdf="http://www.w3.org/1999/02/22-rdf-syntax-ns#"
                xmlns:rdfs="http://www.w3.org/2000/01/rdf-schema#"
                xmlns:owl="http://www.w3.org/2002/07/owl#"
                xml:base="http://ex.org/o">{body}</rdf:RDF>"#
        );
        load_ontology(&parse_rdfxml(&text, "urn:unused").unwrap())
    }

    fn iri(l: &str) -> Iri {
        Iri::new(format!("http://ex.org/o#{l}"))
    }

    #[test]
    fn empty_graph_gives_empty_ontology() {
        let o = load("").unwrap();
        assert!(o.tbox.is_empty() && o.abox.is_empty());
        assert_eq!(o.iri.as_str(), "http://ex.org/o");
    }

    #[test]
    fn inverse_of_becomes_inverse_roles() {
        let o = load(r##"<owl:ObjectProperty rdf:about="#r"><owl:inverseOf rdf:resource="#s"/></owl:ObjectProperty>"##)
            .unwrap();
        assert!(o.tbox.contains(&Axiom::InverseRoles(iri("r"), iri("s"))));
        assert!(o.object_properties.contains(&iri("s")));
    }

    #[test]
    fn characteristics_use_their_encodings() {
        let o = load(
            r##"<owl:ObjectProperty rdf:about="#f">
                  <rdf:type rdf:resource="http://www.w3.org/2002/07/owl#SymmetricProperty"/>
                  <rdf:type rdf:resource="http://www.w3.org/2002/07/owl#IrreflexiveProperty"/>
                  <rdf:type rdf:resource="http://www.w3.org/2002/07/owl#FunctionalProperty"/>
                </owl:ObjectProperty>"##,
        )
        .unwrap();
        let f = RoleExpr::Named(iri("f"));
        assert!(o.tbox.contains(&Axiom::SubRoleOf(f.inverse(), f.clone())));
        assert!(o.tbox.contains(&Axiom::SubClassOf(ClassExpr::ExistsSelf(f.clone()), ClassExpr::Nothing)));
        assert!(o.tbox.contains(&Axiom::SubClassOf(ClassExpr::Thing, ClassExpr::max_card(1, f, ClassExpr::Thing))));
        assert_eq!(o.tbox.len(), 3);
    }

    #[test]
    fn equivalence_with_intersection_and_restriction() {
        let o = load(
            r##"<owl:Class rdf:about="#pe"><owl:equivalentClass><owl:Class><owl:intersectionOf rdf:parseType="Collection">
                  <rdf:Description rdf:about="#event"/>
                  <owl:Restriction><owl:onProperty rdf:resource="#cb"/><owl:someValuesFrom rdf:resource="#user"/></owl:Restriction>
                </owl:intersectionOf></owl:Class></owl:equivalentClass></owl:Class>"##,
        )
        .unwrap();
        let expected = ClassExpr::and(vec![
            ClassExpr::Named(iri("event")),
            ClassExpr::exists(RoleExpr::Named(iri("cb")), ClassExpr::Named(iri("user"))),
        ]);
        assert!(o.tbox.contains(&Axiom::EquivalentClasses(ClassExpr::Named(iri("pe")), expected)));
        assert!(o.classes.contains(&iri("user")));
    }

    #[test]
    fn chains_and_qualified_cardinality() {
        let o = load(
            r##"<owl:ObjectProperty rdf:about="#rf"><owl:propertyChainAxiom rdf:parseType="Collection">
                  <rdf:Description rdf:about="#f"/><rdf:Description rdf:about="#f"/></owl:propertyChainAxiom></owl:ObjectProperty>
                <owl:Class rdf:about="#a"><rdfs:subClassOf><owl:Restriction><owl:onProperty rdf:resource="#cb"/>
                  <owl:maxQualifiedCardinality rdf:datatype="http://www.w3.org/2001/XMLSchema#nonNegativeInteger">1</owl:maxQualifiedCardinality>
                  <owl:onClass rdf:resource="#user"/></owl:Restriction></rdfs:subClassOf></owl:Class>"##,
        )
        .unwrap();
        assert!(o.tbox.contains(&Axiom::RoleChain {
            first: RoleExpr::Named(iri("f")),
            second: RoleExpr::Named(iri("f")),
            sup: RoleExpr::Named(iri("rf")),
        }));
        assert!(o.tbox.contains(&Axiom::SubClassOf(
            ClassExpr::Named(iri("a")),
            ClassExpr::max_card(1, RoleExpr::Named(iri("cb")), ClassExpr::Named(iri("user")))
        )));
    }

    #[test]
    fn individuals_and_data_properties() {
        let o = load(
            r##"<owl:DatatypeProperty rdf:about="#nick"><rdfs:domain rdf:resource="#user"/>
                  <rdfs:range rdf:resource="http://www.w3.org/2001/XMLSchema#string"/></owl:DatatypeProperty>
                <owl:NamedIndividual rdf:about="#jesus"><rdf:type rdf:resource="#user"/>
                  <nick>jalmen</nick><friend_of rdf:resource="#luis"/></owl:NamedIndividual>"##,
        )
        .unwrap();
        assert!(o.tbox.contains(&Axiom::DataDomain(iri("nick"), ClassExpr::Named(iri("user")))));
        assert!(o.abox.contains(&Assertion::Class(iri("jesus"), ClassExpr::Named(iri("user")))));
        assert!(o.abox.contains(&Assertion::Data(iri("jesus"), iri("nick"), Literal::plain("jalmen"))));
        assert!(o.abox.contains(&Assertion::Role(iri("jesus"), iri("friend_of"), iri("luis"))));
        assert!(o.individuals.contains(&iri("luis")));
    }

    #[test]
    fn unsupported_constructs_are_named() {
        let e = load(r##"<owl:Class rdf:about="#a"><owl:unionOf rdf:parseType="Collection"><rdf:Description rdf:about="#b"/></owl:unionOf></owl:Class>"##)
            .unwrap_err();
        assert!(e.to_string().contains("unionOf"), "{e}");
        let e = load(r##"<owl:TransitiveProperty rdf:about="#t"/>"##).unwrap_err();
        assert!(e.to_string().contains("owl:TransitiveProperty"), "{e}");
        let e = load(r##"<owl:Class rdf:about="#a"><rdfs:subClassOf><owl:Restriction><owl:onProperty rdf:resource="#r"/><owl:allValuesFrom rdf:resource="#b"/></owl:Restriction></rdfs:subClassOf></owl:Class>"##)
            .unwrap_err();
        assert!(e.to_string().contains("allValuesFrom"), "{e}");
        let e = load(r##"<owl:AllDisjointClasses/>"##).unwrap_err();
        assert!(matches!(e, OwlError::Unsupported(_)), "{e}");
    }

    #[test]
    fn loading_is_deterministic() {
        let body = r##"<owl:Class rdf:about="#a"><rdfs:subClassOf rdf:resource="#b"/><owl:disjointWith rdf:resource="#c"/></owl:Class>"##;
        assert_eq!(load(body).unwrap(), load(body).unwrap());
    }
}
