//! Forward-chaining reasoner for the Horn fragment of the ontology model.
//!
//! The ABox is saturated under the TBox rules and inspected for clashes.
//! Subsumption is decided on the canonical model of the subclass. Named
//! individuals obey the unique name assumption, so two distinct named fillers
//! of a role bounded by `≤1` are a clash rather than a merge.

mod saturate;

use std::collections::BTreeSet;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use thiserror::Error;

use crate::owl::{owl_nothing, ClassExpr, Ontology, RoleExpr};
use crate::rdf::{Iri, Literal};

pub use saturate::{saturate, ClashKind, ClashReport, SaturatedAbox};
use saturate::{subsumed, Rules};

#[derive(Debug, Error)]
pub enum ReasonerError {
    #[error("ontology is inconsistent ({0})")]
    Inconsistent(ClashReport),
    #[error("unknown reasoner profile '{0}' (expected hermit, pellet or fact)")]
    UnknownProfile(String),
}

/// Reasoner names accepted for compatibility. They all run the same engine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Profile {
    #[default]
    Hermit,
    Pellet,
    Fact,
}

impl FromStr for Profile {
    type Err = ReasonerError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "hermit" => Ok(Profile::Hermit),
            "pellet" => Ok(Profile::Pellet),
            "fact" | "fact++" => Ok(Profile::Fact),
            _ => Err(ReasonerError::UnknownProfile(s.to_string())),
        }
    }
}

impl Profile {
    pub fn name(self) -> &'static str {
        match self {
            Profile::Hermit => "hermit",
            Profile::Pellet => "pellet",
            Profile::Fact => "fact",
        }
    }
}

/// A reasoner bound to one ontology. The saturation is computed on first
/// use and shared by every later query.
#[derive(Debug)]
pub struct Reasoner {
    ontology: Arc<Ontology>,
    profile: Profile,
    rules: Rules,
    saturation: OnceLock<SaturatedAbox>,
}

impl Reasoner {
    pub fn new(ontology: Arc<Ontology>, profile: Profile) -> Self {
        let rules = Rules::compile(&ontology);
        Reasoner { ontology, profile, rules, saturation: OnceLock::new() }
    }

    pub fn ontology(&self) -> &Arc<Ontology> {
        &self.ontology
    }

    pub fn profile(&self) -> Profile {
        self.profile
    }

    pub fn saturation(&self) -> &SaturatedAbox {
        self.saturation.get_or_init(|| saturate::saturate_with(&self.ontology, &self.rules))
    }

    pub fn is_consistent(&self) -> bool {
        self.saturation().clash().is_none()
    }

    pub fn clashes(&self) -> &[ClashReport] {
        self.saturation().clashes()
    }

    fn consistent(&self) -> Result<&SaturatedAbox, ReasonerError> {
        let s = self.saturation();
        match s.clash() {
            Some(c) => Err(ReasonerError::Inconsistent(c.clone())),
            None => Ok(s),
        }
    }

    /// Named individuals that are instances of `c`.
    pub fn instances(&self, c: &ClassExpr) -> Result<BTreeSet<Iri>, ReasonerError> {
        let s = self.consistent()?;
        Ok(s.named_individuals().filter(|(_, a)| s.satisfies_iri(a, c)).map(|(_, a)| a.clone()).collect())
    }

    pub fn is_instance_of(&self, a: &Iri, c: &ClassExpr) -> Result<bool, ReasonerError> {
        Ok(self.consistent()?.satisfies_iri(a, c))
    }

    pub fn holds(&self, a: &Iri, r: &Iri, b: &Iri) -> Result<bool, ReasonerError> {
        Ok(self.consistent()?.holds(a, r, b))
    }

    /// Named individuals related to `a` by `r`.
    pub fn property_values(&self, a: &Iri, r: &Iri) -> Result<BTreeSet<Iri>, ReasonerError> {
        Ok(self.consistent()?.fillers(a, &RoleExpr::Named(r.clone())))
    }

    pub fn data_values(&self, a: &Iri, p: &Iri) -> Result<Vec<Literal>, ReasonerError> {
        Ok(self.consistent()?.data_values(a, p))
    }

    pub fn is_subsumed(&self, c: &ClassExpr, d: &ClassExpr) -> bool {
        subsumed(&self.rules, c, d)
    }

    /// Named classes (and ⊥) subsumed by `c`, excluding `c` itself. With
    /// `direct`, only the immediate children in the strict hierarchy.
    pub fn subclasses(&self, c: &ClassExpr, direct: bool) -> BTreeSet<Iri> {
        let nothing = owl_nothing();
        let mut candidates: Vec<Iri> = self.ontology.classes.iter().cloned().collect();
        candidates.push(nothing.clone());
        let all: BTreeSet<Iri> = candidates
            .into_iter()
            .filter(|d| c.as_named() != Some(d) && !(*c == ClassExpr::Nothing && *d == nothing))
            .filter(|d| self.is_subsumed(&ClassExpr::named(d.clone()), c))
            .collect();
        if !direct {
            return all;
        }
        // Classes equivalent to `c` are not strict children.
        let strict: BTreeSet<Iri> =
            all.iter().filter(|d| !self.is_subsumed(c, &ClassExpr::named((*d).clone()))).cloned().collect();
        let below = |d: &Iri, e: &Iri| {
            let (d, e) = (ClassExpr::named(d.clone()), ClassExpr::named(e.clone()));
            self.is_subsumed(&d, &e) && !self.is_subsumed(&e, &d)
        };
        strict.iter().filter(|d| !strict.iter().any(|e| e != *d && below(d, e))).cloned().collect()
    }

    /// Checks that the cached saturation is a fixpoint of the rules.
    pub fn is_closed(&self) -> bool {
        self.saturation().is_closed_under(&self.rules)
    }

    /// Upper bound on witnesses: named individuals times existential heads.
    pub fn witness_bound(&self) -> usize {
        let named = self.saturation().named_individuals().count();
        named * self.rules.exists_heads()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::owl::{Assertion, Axiom};

    fn iri(l: &str) -> Iri {
        Iri::new(format!("urn:t#{l}"))
    }

    fn c(l: &str) -> ClassExpr {
        ClassExpr::Named(iri(l))
    }

    fn r(l: &str) -> RoleExpr {
        RoleExpr::Named(iri(l))
    }

    fn reasoner(axioms: Vec<Axiom>, abox: Vec<Assertion>) -> Reasoner {
        let mut o = Ontology::new("urn:t");
        axioms.into_iter().for_each(|a| o.add_axiom(a));
        abox.into_iter().for_each(|a| o.add_assertion(a));
        Reasoner::new(Arc::new(o), Profile::Hermit)
    }

    fn set(names: &[&str]) -> BTreeSet<Iri> {
        names.iter().map(|n| iri(n)).collect()
    }

    #[test]
    fn empty_ontology() {
        let rs = reasoner(vec![], vec![]);
        assert!(rs.is_consistent());
        assert!(rs.saturation().class_facts().is_empty());
        assert!(rs.saturation().role_facts().is_empty());
        assert!(rs.instances(&ClassExpr::Thing).unwrap().is_empty());
    }

    #[test]
    fn subclass_and_subrole() {
        let rs = reasoner(
            vec![Axiom::SubClassOf(c("message"), c("activity")), Axiom::SubRoleOf(r("sent_by"), r("created_by"))],
            vec![Assertion::Class(iri("m"), c("message")), Assertion::Role(iri("m"), iri("sent_by"), iri("j"))],
        );
        assert_eq!(rs.instances(&c("activity")).unwrap(), set(&["m"]));
        assert!(rs.holds(&iri("m"), &iri("created_by"), &iri("j")).unwrap());
        assert!(rs.is_closed());
    }

    #[test]
    fn symmetric_inverse_and_chain() {
        let rs = reasoner(
            vec![
                Axiom::SubRoleOf(r("f").inverse(), r("f")),
                Axiom::InverseRoles(iri("attends"), iri("confirmed")),
                Axiom::RoleChain { first: r("f"), second: r("f"), sup: r("rec") },
            ],
            vec![
                Assertion::Role(iri("a"), iri("f"), iri("b")),
                Assertion::Role(iri("b"), iri("f"), iri("c")),
                Assertion::Role(iri("b"), iri("attends"), iri("e")),
            ],
        );
        assert!(rs.holds(&iri("b"), &iri("f"), &iri("a")).unwrap());
        assert!(rs.holds(&iri("e"), &iri("confirmed"), &iri("b")).unwrap());
        assert_eq!(rs.property_values(&iri("a"), &iri("rec")).unwrap(), set(&["a", "c"]));
    }

    #[test]
    fn equivalence_with_existential() {
        let pe = ClassExpr::and(vec![c("event"), ClassExpr::exists(r("confirmed"), c("user"))]);
        let rs = reasoner(
            vec![
                Axiom::EquivalentClasses(c("popular_event"), pe),
                Axiom::SubClassOf(c("popular_event"), c("popular")),
                Axiom::SubClassOf(c("event"), c("activity")),
            ],
            vec![
                Assertion::Class(iri("e1"), c("event")),
                Assertion::Class(iri("e2"), c("event")),
                Assertion::Class(iri("v"), c("user")),
                Assertion::Role(iri("e1"), iri("confirmed"), iri("v")),
                Assertion::Class(iri("p"), c("popular_event")),
            ],
        );
        assert_eq!(rs.instances(&c("popular")).unwrap(), set(&["e1", "p"]));
        // p's witness makes it an event with a confirming user, but stays hidden.
        assert_eq!(rs.instances(&c("user")).unwrap(), set(&["v"]));
        assert_eq!(rs.saturation().fresh_individuals().len(), 2);
        assert!(rs.saturation().fresh_individuals().len() <= rs.witness_bound());
        assert!(rs.is_subsumed(&c("popular_event"), &c("activity")));
        assert!(!rs.is_subsumed(&c("event"), &c("popular")));
        assert_eq!(
            rs.subclasses(&c("activity"), false),
            [iri("event"), iri("popular_event"), owl_nothing()].into_iter().collect()
        );
        assert_eq!(rs.subclasses(&c("activity"), true), set(&["event"]));
    }

    #[test]
    fn clash_kinds() {
        let irreflexive = Axiom::SubClassOf(ClassExpr::ExistsSelf(r("f")), ClassExpr::Nothing);
        let rs = reasoner(vec![irreflexive], vec![Assertion::Role(iri("a"), iri("f"), iri("a"))]);
        assert_eq!(rs.saturation().clash().unwrap().kind, ClashKind::Irreflexive);
        assert_eq!(rs.clashes().len(), 1);
        assert!(matches!(rs.instances(&ClassExpr::Thing), Err(ReasonerError::Inconsistent(_))));

        let card = Axiom::SubClassOf(c("activity"), ClassExpr::max_card(1, r("by"), c("user")));
        let abox = vec![
            Assertion::Class(iri("m"), c("activity")),
            Assertion::Class(iri("u1"), c("user")),
            Assertion::Class(iri("u2"), c("user")),
            Assertion::Role(iri("m"), iri("by"), iri("u1")),
        ];
        assert!(reasoner(vec![card.clone()], abox.clone()).is_consistent());
        let mut more = abox;
        more.push(Assertion::Role(iri("m"), iri("by"), iri("u2")));
        let rs = reasoner(vec![card], more);
        let clash = rs.saturation().clash().unwrap();
        assert_eq!(clash.kind, ClashKind::MaxCardinality);
        assert_eq!(clash.culprits[..2], [iri("m"), iri("by")]);

        let rs = reasoner(
            vec![Axiom::DisjointRoles(iri("manuscript"), iri("referee"))],
            vec![
                Assertion::Role(iri("a"), iri("manuscript"), iri("p")),
                Assertion::Role(iri("a"), iri("referee"), iri("p")),
            ],
        );
        assert_eq!(rs.saturation().clash().unwrap().kind, ClashKind::DisjointRoles);

        let rs = reasoner(
            vec![Axiom::DisjointClasses(c("student"), c("reviewer"))],
            vec![Assertion::Class(iri("b"), c("student")), Assertion::Class(iri("b"), c("reviewer"))],
        );
        assert_eq!(rs.saturation().clash().unwrap().culprits, vec![iri("b"), iri("student"), iri("reviewer")]);

        let rs = reasoner(vec![], vec![Assertion::Class(iri("z"), ClassExpr::Nothing)]);
        assert_eq!(rs.saturation().clash().unwrap().kind, ClashKind::NothingMembership);
    }

    #[test]
    fn domain_range_and_data_domain() {
        let rs = reasoner(
            vec![
                Axiom::Domain(r("by"), c("activity")),
                Axiom::Range(r("by"), c("user")),
                Axiom::DataDomain(iri("nick"), c("user")),
            ],
            vec![
                Assertion::Role(iri("m"), iri("by"), iri("j")),
                Assertion::Data(iri("l"), iri("nick"), Literal::plain("luis")),
            ],
        );
        assert_eq!(rs.instances(&c("user")).unwrap(), set(&["j", "l"]));
        assert_eq!(rs.instances(&c("activity")).unwrap(), set(&["m"]));
        assert_eq!(rs.data_values(&iri("l"), &iri("nick")).unwrap(), vec![Literal::plain("luis")]);
    }

    #[test]
    fn subsumption_bounds() {
        let rs = reasoner(vec![Axiom::SubClassOf(c("a"), c("b"))], vec![]);
        assert!(rs.is_subsumed(&ClassExpr::Nothing, &c("a")));
        assert!(rs.is_subsumed(&c("a"), &ClassExpr::Thing));
        assert!(rs.is_subsumed(&c("a"), &c("a")));
        assert!(!rs.is_subsumed(&c("b"), &c("a")));
        assert!(rs.subclasses(&ClassExpr::Nothing, false).is_empty());
        assert!(rs.subclasses(&ClassExpr::Thing, false).is_superset(&set(&["a", "b"])));
    }

    #[test]
    fn profiles_parse() {
        assert_eq!("HermiT".parse::<Profile>().unwrap(), Profile::Hermit);
        assert_eq!("pellet".parse::<Profile>().unwrap(), Profile::Pellet);
        assert!("racer".parse::<Profile>().is_err());
    }
}
