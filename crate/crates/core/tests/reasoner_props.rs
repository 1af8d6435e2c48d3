#[path = "support/reasoner_gen.rs"]
mod gen;

use gen::*;
use hyq_core::owl::ClassExpr;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn saturation_is_a_fixpoint(tbox in prop::collection::vec(axiom(), 0..8), abox in prop::collection::vec(assertion(), 0..12)) {
        check_fixpoint(&tbox, &abox)?;
    }

    #[test]
    fn symmetric_and_inverse_closure(tbox in prop::collection::vec(axiom(), 0..6), abox in prop::collection::vec(assertion(), 0..12)) {
        check_symmetric_inverse(&tbox, &abox)?;
    }

    #[test]
    fn chain_equals_composition(edges in prop::collection::vec((0..5usize, 0..5usize), 0..15)) {
        check_chain(&edges)?;
    }

    #[test]
    fn saturation_is_monotone(
        tbox in prop::collection::vec(axiom(), 0..8),
        abox in prop::collection::vec(assertion(), 0..10),
        extra in prop::collection::vec(assertion(), 0..5),
    ) {
        check_monotone(&tbox, &abox, &extra)?;
    }
    #[test]
    fn subsumption_is_a_preorder_and_coherent(tbox in prop::collection::vec(axiom(), 0..8), abox in prop::collection::vec(assertion(), 0..10)) {
        let rs = reasoner(ontology(&tbox, &abox));
        let classes: Vec<ClassExpr> = (0..4).map(cls).collect();
        for c in &classes {
            prop_assert!(rs.is_subsumed(c, c));
            prop_assert!(rs.is_subsumed(&ClassExpr::Nothing, c));
            prop_assert!(rs.is_subsumed(c, &ClassExpr::Thing));
            for d in &classes {
                for e in &classes {
                    if rs.is_subsumed(c, d) && rs.is_subsumed(d, e) {
                        prop_assert!(rs.is_subsumed(c, e));
                    }
                }
                if rs.is_consistent() && rs.is_subsumed(c, d) {
                    prop_assert!(rs.instances(c).unwrap().is_subset(&rs.instances(d).unwrap()));
                }
            }
        }
    }
}
