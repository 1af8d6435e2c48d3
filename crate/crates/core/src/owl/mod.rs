//! Ontologies in a Horn fragment of OWL: the data model, the loader from
//! RDF graphs and the RDF/XML renderer.
//!
//! Property characteristics have no axiom of their own. A symmetric role
//! `r` is stored as `SubRoleOf(r⁻, r)`, a functional one as
//! `SubClassOf(⊤, ≤1 r.⊤)` and an irreflexive one as `SubClassOf(∃r.Self, ⊥)`.

mod loader;
mod render;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::rdf::vocab::OWL;
use crate::rdf::{Iri, Literal, RdfError};

pub use loader::load_ontology;
pub use render::{axioms_to_xml, entities_to_xml};

#[derive(Debug, Error)]
pub enum OwlError {
    #[error(transparent)]
    Rdf(#[from] RdfError),
    #[error("unsupported OWL construct: {0}")]
    Unsupported(String),
    #[error("malformed ontology: {0}")]
    Malformed(String),
}

pub fn owl_thing() -> Iri {
    Iri::new(format!("{OWL}Thing"))
}

pub fn owl_nothing() -> Iri {
    Iri::new(format!("{OWL}Nothing"))
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RoleExpr {
    Named(Iri),
    Inverse(Iri),
}

impl RoleExpr {
    pub fn named(iri: impl Into<Iri>) -> Self {
        RoleExpr::Named(iri.into())
    }

    pub fn iri(&self) -> &Iri {
        match self {
            RoleExpr::Named(i) | RoleExpr::Inverse(i) => i,
        }
    }

    /// The inverse role; inverting twice gives the named role back.
    pub fn inverse(&self) -> RoleExpr {
        match self {
            RoleExpr::Named(i) => RoleExpr::Inverse(i.clone()),
            RoleExpr::Inverse(i) => RoleExpr::Named(i.clone()),
        }
    }
}

impl fmt::Display for RoleExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RoleExpr::Named(i) => write!(f, "{}", i.fragment()),
            RoleExpr::Inverse(i) => write!(f, "{}⁻", i.fragment()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClassExpr {
    Thing,
    Nothing,
    Named(Iri),
    /// At least two conjuncts; build with [`ClassExpr::and`].
    And(Vec<ClassExpr>),
    Exists(RoleExpr, Box<ClassExpr>),
    ExistsSelf(RoleExpr),
    Forall(RoleExpr, Box<ClassExpr>),
    MaxCard(u32, RoleExpr, Box<ClassExpr>),
}

impl ClassExpr {
    /// Named class, mapping `owl:Thing` and `owl:Nothing` to their variants.
    pub fn named(iri: impl Into<Iri>) -> Self {
        let iri = iri.into();
        if iri == owl_thing() {
            ClassExpr::Thing
        } else if iri == owl_nothing() {
            ClassExpr::Nothing
        } else {
            ClassExpr::Named(iri)
        }
    }

    /// Conjunction with nested conjunctions flattened. One conjunct is
    /// returned as is; none gives `Thing`.
    pub fn and(parts: Vec<ClassExpr>) -> Self {
        let mut flat = Vec::new();
        for p in parts {
            match p {
                ClassExpr::And(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        match flat.len() {
            0 => ClassExpr::Thing,
            1 => flat.pop().unwrap(),
            _ => ClassExpr::And(flat),
        }
    }

    pub fn exists(role: RoleExpr, filler: ClassExpr) -> Self {
        ClassExpr::Exists(role, Box::new(filler))
    }

    pub fn max_card(n: u32, role: RoleExpr, filler: ClassExpr) -> Self {
        ClassExpr::MaxCard(n, role, Box::new(filler))
    }

    pub fn as_named(&self) -> Option<&Iri> {
        match self {
            ClassExpr::Named(i) => Some(i),
            _ => None,
        }
    }

    /// Named classes and roles occurring anywhere in the expression.
    pub fn signature(&self, classes: &mut BTreeSet<Iri>, roles: &mut BTreeSet<Iri>) {
        match self {
            ClassExpr::Thing | ClassExpr::Nothing => {}
            ClassExpr::Named(i) => {
                classes.insert(i.clone());
            }
            ClassExpr::And(parts) => parts.iter().for_each(|p| p.signature(classes, roles)),
            ClassExpr::Exists(r, c) | ClassExpr::Forall(r, c) | ClassExpr::MaxCard(_, r, c) => {
                roles.insert(r.iri().clone());
                c.signature(classes, roles);
            }
            ClassExpr::ExistsSelf(r) => {
                roles.insert(r.iri().clone());
            }
        }
    }
}

impl fmt::Display for ClassExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassExpr::Thing => write!(f, "⊤"),
            ClassExpr::Nothing => write!(f, "⊥"),
            ClassExpr::Named(i) => write!(f, "{}", i.fragment()),
            ClassExpr::And(parts) => {
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ⊓ ")?;
                    }
                    write!(f, "{p}")?;
                }
                Ok(())
            }
            ClassExpr::Exists(r, c) => write!(f, "∃{r}.({c})"),
            ClassExpr::ExistsSelf(r) => write!(f, "∃{r}.Self"),
            ClassExpr::Forall(r, c) => write!(f, "∀{r}.({c})"),
            ClassExpr::MaxCard(n, r, c) => write!(f, "≤{n} {r}.({c})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axiom {
    SubClassOf(ClassExpr, ClassExpr),
    EquivalentClasses(ClassExpr, ClassExpr),
    DisjointClasses(ClassExpr, ClassExpr),
    SubRoleOf(RoleExpr, RoleExpr),
    /// `first · second ⊑ sup`.
    RoleChain {
        first: RoleExpr,
        second: RoleExpr,
        sup: RoleExpr,
    },
    InverseRoles(Iri, Iri),
    DisjointRoles(Iri, Iri),
    Domain(RoleExpr, ClassExpr),
    Range(RoleExpr, ClassExpr),
    DataDomain(Iri, ClassExpr),
    DataRange(Iri, Iri),
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Axiom::SubClassOf(a, b) => write!(f, "{a} ⊑ {b}"),
            Axiom::EquivalentClasses(a, b) => write!(f, "{a} ≡ {b}"),
            Axiom::DisjointClasses(a, b) => write!(f, "{a} ⊓ {b} ⊑ ⊥"),
            Axiom::SubRoleOf(r, s) => write!(f, "{r} ⊑ {s}"),
            Axiom::RoleChain { first, second, sup } => write!(f, "{first} · {second} ⊑ {sup}"),
            Axiom::InverseRoles(r, s) => write!(f, "{}⁻ ≡ {}", r.fragment(), s.fragment()),
            Axiom::DisjointRoles(r, s) => write!(f, "Disjoint({}, {})", r.fragment(), s.fragment()),
            Axiom::Domain(r, c) => write!(f, "domain({r}) = {c}"),
            Axiom::Range(r, c) => write!(f, "range({r}) = {c}"),
            Axiom::DataDomain(p, c) => write!(f, "domain({}) = {c}", p.fragment()),
            Axiom::DataRange(p, d) => write!(f, "range({}) = {}", p.fragment(), d.fragment()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Assertion {
    Class(Iri, ClassExpr),
    Role(Iri, Iri, Iri),
    Data(Iri, Iri, Literal),
}

impl fmt::Display for Assertion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Assertion::Class(a, c) => write!(f, "{c}({})", a.fragment()),
            Assertion::Role(a, r, b) => write!(f, "{}({}, {})", r.fragment(), a.fragment(), b.fragment()),
            Assertion::Data(a, p, v) => write!(f, "{}({}, {})", p.fragment(), a.fragment(), v),
        }
    }
}

/// TBox, ABox and declared signature. The signature also contains every
/// entity mentioned by an axiom or assertion.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Ontology {
    pub iri: Iri,
    pub tbox: BTreeSet<Axiom>,
    pub abox: BTreeSet<Assertion>,
    pub classes: BTreeSet<Iri>,
    pub object_properties: BTreeSet<Iri>,
    pub data_properties: BTreeSet<Iri>,
    pub individuals: BTreeSet<Iri>,
}

impl Ontology {
    pub fn new(iri: impl Into<Iri>) -> Self {
        Ontology { iri: iri.into(), ..Default::default() }
    }

    /// Adds an axiom and its signature.
    pub fn add_axiom(&mut self, axiom: Axiom) {
        let mut classes = BTreeSet::new();
        let mut roles = BTreeSet::new();
        match &axiom {
            Axiom::SubClassOf(a, b) | Axiom::EquivalentClasses(a, b) | Axiom::DisjointClasses(a, b) => {
                a.signature(&mut classes, &mut roles);
                b.signature(&mut classes, &mut roles);
            }
            Axiom::SubRoleOf(r, s) => {
                roles.insert(r.iri().clone());
                roles.insert(s.iri().clone());
            }
            Axiom::RoleChain { first, second, sup } => {
                roles.extend([first.iri().clone(), second.iri().clone(), sup.iri().clone()]);
            }
            Axiom::InverseRoles(r, s) | Axiom::DisjointRoles(r, s) => {
                roles.extend([r.clone(), s.clone()]);
            }
            Axiom::Domain(r, c) | Axiom::Range(r, c) => {
                roles.insert(r.iri().clone());
                c.signature(&mut classes, &mut roles);
            }
            Axiom::DataDomain(p, c) => {
                self.data_properties.insert(p.clone());
                c.signature(&mut classes, &mut roles);
            }
            Axiom::DataRange(p, _) => {
                self.data_properties.insert(p.clone());
            }
        }
        self.classes.extend(classes);
        self.object_properties.extend(roles);
        self.tbox.insert(axiom);
    }

    /// Adds an assertion and its signature.
    pub fn add_assertion(&mut self, assertion: Assertion) {
        match &assertion {
            Assertion::Class(a, c) => {
                self.individuals.insert(a.clone());
                let mut roles = BTreeSet::new();
                c.signature(&mut self.classes, &mut roles);
                self.object_properties.extend(roles);
            }
            Assertion::Role(a, r, b) => {
                self.individuals.extend([a.clone(), b.clone()]);
                self.object_properties.insert(r.clone());
            }
            Assertion::Data(a, p, _) => {
                self.individuals.insert(a.clone());
                self.data_properties.insert(p.clone());
            }
        }
        self.abox.insert(assertion);
    }

    /// Resolves a user-supplied entity name: absolute IRIs are kept, `#x`
    /// and bare names are taken relative to the ontology IRI, and `Thing`
    /// and `Nothing` name the OWL built-ins.
    pub fn resolve_name(&self, name: &str) -> Iri {
        let name = name.trim();
        if crate::rdf::has_scheme(name) {
            return Iri::new(name);
        }
        match name {
            "Thing" | "owl:Thing" => return owl_thing(),
            "Nothing" | "owl:Nothing" => return owl_nothing(),
            _ => {}
        }
        let local = name.strip_prefix('#').unwrap_or(name);
        let base = self.iri.as_str();
        let base = base.strip_suffix('#').unwrap_or(base);
        Iri::new(format!("{base}#{local}"))
    }
}
