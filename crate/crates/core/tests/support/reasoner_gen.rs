#![allow(dead_code)]

use std::collections::BTreeSet;
use std::sync::Arc;

use hyq_core::owl::{Assertion, Axiom, ClassExpr, Ontology, RoleExpr};
use hyq_core::rdf::Iri;
use hyq_core::reasoner::{Profile, Reasoner};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

pub fn ind(i: usize) -> Iri {
    Iri::new(format!("urn:t#i{i}"))
}

pub fn cls(i: usize) -> ClassExpr {
    ClassExpr::Named(Iri::new(format!("urn:t#C{i}")))
}

pub fn role_iri(i: usize) -> Iri {
    Iri::new(format!("urn:t#r{i}"))
}

pub fn role(i: usize) -> RoleExpr {
    RoleExpr::Named(role_iri(i))
}

pub fn axiom() -> impl Strategy<Value = Axiom> {
    prop_oneof![
        (0..4usize, 0..4usize).prop_map(|(a, b)| Axiom::SubClassOf(cls(a), cls(b))),
        (0..4usize, 0..3usize, 0..4usize)
            .prop_map(|(a, r, b)| Axiom::SubClassOf(ClassExpr::exists(role(r), cls(a)), cls(b))),
        (0..4usize, 0..4usize, 0..3usize, 0..4usize).prop_map(|(a, b, r, c)| {
            Axiom::EquivalentClasses(cls(a), ClassExpr::and(vec![cls(b), ClassExpr::exists(role(r), cls(c))]))
        }),
        (0..3usize, 0..3usize).prop_map(|(r, s)| Axiom::SubRoleOf(role(r), role(s))),
        (0..3usize).prop_map(|r| Axiom::SubRoleOf(role(r).inverse(), role(r))),
        (0..3usize, 0..3usize).prop_map(|(r, s)| Axiom::InverseRoles(role_iri(r), role_iri(s))),
        (0..3usize, 0..3usize, 0..3usize).prop_map(|(r, s, t)| Axiom::RoleChain {
            first: role(r),
            second: role(s),
            sup: role(t)
        }),
        (0..3usize, 0..4usize).prop_map(|(r, c)| Axiom::Domain(role(r), cls(c))),
        (0..3usize, 0..4usize).prop_map(|(r, c)| Axiom::Range(role(r), cls(c))),
    ]
}

pub fn assertion() -> impl Strategy<Value = Assertion> {
    prop_oneof![
        (0..5usize, 0..4usize).prop_map(|(a, c)| Assertion::Class(ind(a), cls(c))),
        (0..5usize, 0..3usize, 0..5usize).prop_map(|(a, r, b)| Assertion::Role(ind(a), role_iri(r), ind(b))),
    ]
}

pub fn ontology(tbox: &[Axiom], abox: &[Assertion]) -> Ontology {
    let mut o = Ontology::new("urn:t");
    tbox.iter().cloned().for_each(|a| o.add_axiom(a));
    abox.iter().cloned().for_each(|a| o.add_assertion(a));
    o
}

pub fn reasoner(o: Ontology) -> Reasoner {
    Reasoner::new(Arc::new(o), Profile::Hermit)
}

pub type Facts = (BTreeSet<(Iri, Iri)>, BTreeSet<(Iri, Iri, Iri)>);

pub fn named_facts(rs: &Reasoner) -> Facts {
    let s = rs.saturation();
    let classes = s.class_facts().into_iter().filter(|(a, _)| !s.is_fresh(a)).collect();
    let roles = s.role_facts().into_iter().filter(|(a, _, b)| !s.is_fresh(a) && !s.is_fresh(b)).collect();
    (classes, roles)
}

pub fn check_fixpoint(tbox: &[Axiom], abox: &[Assertion]) -> Result<(), TestCaseError> {
    let rs = reasoner(ontology(tbox, abox));
    prop_assert!(rs.is_closed());
    prop_assert!(rs.saturation().fresh_individuals().len() <= rs.witness_bound());
    let (classes, roles) = named_facts(&rs);
    for a in abox {
        match a {
            Assertion::Class(i, ClassExpr::Named(c)) => prop_assert!(classes.contains(&(i.clone(), c.clone()))),
            Assertion::Role(s, r, o) => prop_assert!(roles.contains(&(s.clone(), r.clone(), o.clone()))),
            _ => {}
        }
    }
    Ok(())
}

pub fn check_symmetric_inverse(tbox: &[Axiom], abox: &[Assertion]) -> Result<(), TestCaseError> {
    let mut tbox = tbox.to_vec();
    tbox.push(Axiom::SubRoleOf(role(0).inverse(), role(0)));
    tbox.push(Axiom::InverseRoles(role_iri(1), role_iri(2)));
    let rs = reasoner(ontology(&tbox, abox));
    let facts = rs.saturation().role_facts();
    for (a, r, b) in &facts {
        if *r == role_iri(0) {
            prop_assert!(facts.contains(&(b.clone(), r.clone(), a.clone())));
        }
        if *r == role_iri(1) {
            prop_assert!(facts.contains(&(b.clone(), role_iri(2), a.clone())));
        }
        if *r == role_iri(2) {
            prop_assert!(facts.contains(&(b.clone(), role_iri(1), a.clone())));
        }
    }
    Ok(())
}

pub fn check_chain(edges: &[(usize, usize)]) -> Result<(), TestCaseError> {
    let tbox = vec![Axiom::RoleChain { first: role(0), second: role(0), sup: role(1) }];
    let abox: Vec<Assertion> = edges.iter().map(|&(a, b)| Assertion::Role(ind(a), role_iri(0), ind(b))).collect();
    let rs = reasoner(ontology(&tbox, &abox));
    let got: BTreeSet<(Iri, Iri)> = rs
        .saturation()
        .role_facts()
        .into_iter()
        .filter(|(_, r, _)| *r == role_iri(1))
        .map(|(a, _, b)| (a, b))
        .collect();
    let mut expected = BTreeSet::new();
    for &(a, b) in edges {
        for &(c, d) in edges {
            if b == c {
                expected.insert((ind(a), ind(d)));
            }
        }
    }
    prop_assert_eq!(got, expected);
    Ok(())
}

pub fn check_monotone(tbox: &[Axiom], abox: &[Assertion], extra: &[Assertion]) -> Result<(), TestCaseError> {
    let small = named_facts(&reasoner(ontology(tbox, abox)));
    let mut bigger = abox.to_vec();
    bigger.extend_from_slice(extra);
    let large = named_facts(&reasoner(ontology(tbox, &bigger)));
    prop_assert!(small.0.is_subset(&large.0));
    prop_assert!(small.1.is_subset(&large.1));
    Ok(())
}
