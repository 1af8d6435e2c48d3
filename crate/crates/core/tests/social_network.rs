use std::collections::BTreeSet;
use std::sync::Arc;

use hyq_core::owl::{load_ontology, owl_nothing, Assertion, Axiom, ClassExpr, Ontology, RoleExpr};
use hyq_core::rdf::{parse_rdfxml, Iri};
use hyq_core::reasoner::{ClashKind, Profile, Reasoner};

const SN: &str = "http://www.semanticweb.org/socialnetwork.owl#";

fn sn(local: &str) -> Iri {
    Iri::new(format!("{SN}{local}"))
}

fn fixture() -> Ontology {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures/socialnetwork.owl");
    let text = std::fs::read_to_string(path).unwrap();
    load_ontology(&parse_rdfxml(&text, "file:///socialnetwork.owl").unwrap()).unwrap()
}

fn reasoner(o: Ontology) -> Reasoner {
    Reasoner::new(Arc::new(o), Profile::Hermit)
}

fn set(names: &[&str]) -> BTreeSet<Iri> {
    names.iter().map(|n| sn(n)).collect()
}

fn class(l: &str) -> ClassExpr {
    ClassExpr::Named(sn(l))
}

#[test]
fn abox_matches_individual_table() {
    let o = fixture();
    let count = |c: &str| o.abox.iter().filter(|a| matches!(a, Assertion::Class(_, k) if *k == class(c))).count();
    assert_eq!((count("user"), count("event"), count("message"), count("wall")), (3, 2, 2, 3));
    assert_eq!(o.iri.as_str(), "http://www.semanticweb.org/socialnetwork.owl");
}

#[test]
fn property_characteristic_encodings() {
    let o = fixture();
    let chains = o.tbox.iter().filter(|a| matches!(a, Axiom::RoleChain { .. })).count();
    assert_eq!(chains, 1);
    for r in ["friend_of", "replies_to"] {
        let ax = Axiom::SubClassOf(ClassExpr::ExistsSelf(RoleExpr::Named(sn(r))), ClassExpr::Nothing);
        assert!(o.tbox.contains(&ax), "{r}");
    }
    for r in ["belongs_to", "written_in"] {
        let ax = Axiom::SubClassOf(ClassExpr::Thing, ClassExpr::max_card(1, RoleExpr::Named(sn(r)), ClassExpr::Thing));
        assert!(o.tbox.contains(&ax), "{r}");
    }
    let created =
        Axiom::SubClassOf(class("activity"), ClassExpr::max_card(1, RoleExpr::Named(sn("created_by")), class("user")));
    assert!(o.tbox.contains(&created));
    assert!(o.tbox.contains(&Axiom::SubRoleOf(RoleExpr::Inverse(sn("friend_of")), RoleExpr::Named(sn("friend_of")))));
    assert!(o.tbox.contains(&Axiom::InverseRoles(sn("attends_to"), sn("confirmed_by"))));
}

#[test]
fn derived_facts() {
    let rs = reasoner(fixture());
    assert!(rs.is_consistent());
    let s = rs.saturation();
    assert!(s.holds(&sn("message1"), &sn("created_by"), &sn("jesus")));
    assert!(s.holds(&sn("event1"), &sn("created_by"), &sn("luis")));
    assert!(s.holds(&sn("luis"), &sn("friend_of"), &sn("jesus")));
    assert!(s.holds(&sn("event1"), &sn("confirmed_by"), &sn("vicente")));
    assert!(s.holds(&sn("jesus"), &sn("recommended_friend_of"), &sn("vicente")));
    assert!(s.has_type(&sn("event1"), &sn("popular")));
    assert!(!s.has_type(&sn("jesus"), &sn("popular")));
    assert!(rs.is_closed());
    assert!(s.fresh_individuals().len() <= rs.witness_bound());
}

#[test]
fn retrieval() {
    let rs = reasoner(fixture());
    assert_eq!(rs.instances(&class("activity")).unwrap(), set(&["message1", "message2", "event1", "event2"]));
    assert_eq!(rs.instances(&class("user")).unwrap(), set(&["jesus", "vicente", "luis"]));
    assert_eq!(rs.instances(&class("popular")).unwrap(), set(&["event1", "message2"]));
    assert!(rs.is_instance_of(&sn("wall_jesus"), &class("user_item")).unwrap());
    assert!(!rs.is_instance_of(&sn("event1"), &class("message")).unwrap());
    assert!(rs.is_instance_of(&sn("jesus"), &ClassExpr::Thing).unwrap());
    assert!(!rs.holds(&sn("jesus"), &sn("friend_of"), &sn("jesus")).unwrap());
    assert_eq!(rs.property_values(&sn("jesus"), &sn("recommended_friend_of")).unwrap(), set(&["jesus", "vicente"]));
    assert_eq!(rs.property_values(&sn("event1"), &sn("confirmed_by")).unwrap(), set(&["vicente"]));
    assert_eq!(rs.property_values(&sn("message1"), &sn("created_by")).unwrap(), set(&["jesus"]));
    assert!(rs.property_values(&sn("event2"), &sn("created_by")).unwrap().is_empty());
}

#[test]
fn subsumption() {
    let rs = reasoner(fixture());
    let mut expected = set(&["popular_message", "event", "popular_event", "message"]);
    expected.insert(owl_nothing());
    assert_eq!(rs.subclasses(&class("activity"), false), expected);
    assert!(rs.is_subsumed(&class("message"), &class("activity")));
    assert!(rs.is_subsumed(&class("popular_event"), &class("activity")));
    assert!(!rs.is_subsumed(&class("message"), &class("event")));
    assert_eq!(rs.subclasses(&class("activity"), true), set(&["event", "message"]));
}

fn mutated(extra: Assertion) -> Reasoner {
    let mut o = fixture();
    o.add_assertion(extra);
    reasoner(o)
}

#[test]
fn mutations_are_inconsistent() {
    let cases = [
        (Assertion::Role(sn("jesus"), sn("friend_of"), sn("jesus")), ClashKind::Irreflexive),
        (Assertion::Role(sn("message1"), sn("sent_by"), sn("luis")), ClashKind::MaxCardinality),
        (Assertion::Role(sn("message1"), sn("replies_to"), sn("message1")), ClashKind::Irreflexive),
    ];
    for (extra, kind) in cases {
        let rs = mutated(extra.clone());
        assert!(!rs.is_consistent(), "{extra}");
        assert_eq!(rs.saturation().clash().unwrap().kind, kind, "{extra}");
    }
    let created = mutated(Assertion::Role(sn("message1"), sn("sent_by"), sn("luis")));
    assert_eq!(created.saturation().clash().unwrap().culprits[1], sn("created_by"));
}
