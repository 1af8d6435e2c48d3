//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero when any fails.

#[path = "../../core/tests/support/reasoner_gen.rs"]
mod reasoner_gen;
#[path = "../../core/tests/support/sparql_gen.rs"]
mod sparql_gen;

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use hyq_core::owl::{axioms_to_xml, load_ontology, Assertion, ClassExpr, Ontology};
use hyq_core::rdf::{parse_rdfxml, Iri};
use hyq_core::reasoner::{ClashKind, Profile, Reasoner};
use hyq_core::xml::{parse_xml, serialize_xml, Canonical, NodeRef};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

const SN: &str = "http://www.semanticweb.org/socialnetwork.owl#";
const GOLDEN_LIMIT: Duration = Duration::from_secs(1);

type Check = Result<(), String>;
/// Name, check, and whether the one-second golden limit applies.
type Criterion = (&'static str, fn() -> Check, bool);

fn fixtures() -> PathBuf {
    PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures"))
}

fn sn(local: &str) -> Iri {
    Iri::new(format!("{SN}{local}"))
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn hyq(args: &[&str]) -> Result<String, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_hyq"))
        .args(args)
        .current_dir(fixtures())
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("hyq {args:?} exited {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr)));
    }
    String::from_utf8(out.stdout).map_err(|e| e.to_string())
}

fn social_network() -> Ontology {
    let path = fixtures().join("socialnetwork.owl");
    let text = std::fs::read_to_string(&path).unwrap();
    load_ontology(&parse_rdfxml(&text, "file:///socialnetwork.owl").unwrap()).unwrap()
}

fn reasoner(o: Ontology) -> Reasoner {
    Reasoner::new(Arc::new(o), Profile::Hermit)
}

fn fragments(iris: impl IntoIterator<Item = Iri>) -> BTreeSet<String> {
    iris.into_iter().map(|i| i.fragment().to_string()).collect()
}

fn names(list: &[&str]) -> BTreeSet<String> {
    list.iter().map(|s| s.to_string()).collect()
}

/// Canonical forms of the top-level elements of a serialized sequence.
fn element_set(xml: &str) -> Result<BTreeSet<String>, String> {
    let doc = parse_xml(&format!("<wrapper>{xml}</wrapper>")).map_err(|e| e.to_string())?;
    let root = NodeRef::root_of(&doc).document_element().unwrap();
    Ok(root.element_children().map(|n| format!("{:?}", Canonical::of(&n))).collect())
}

fn example1() -> Check {
    let out = hyq(&["run", "example1.xq", "--format", "text"])?;
    let lines: Vec<&str> = out.lines().collect();
    ensure(lines.len() == 5, || format!("expected 5 lines, got {lines:?}"))?;
    let users: BTreeSet<String> = lines[..3].iter().map(|s| s.to_string()).collect();
    let events: BTreeSet<String> = lines[3..].iter().map(|s| s.to_string()).collect();
    let full = |l: &[&str]| l.iter().map(|s| format!("{SN}{s}")).collect::<BTreeSet<_>>();
    ensure(users == full(&["vicente", "jesus", "luis"]), || format!("users {users:?}"))?;
    ensure(events == full(&["event2", "event1"]), || format!("events {events:?}"))
}

fn lowering() -> Check {
    let out = hyq(&["run", "lowering.xq"])?;
    let got = parse_xml(&out).map_err(|e| e.to_string())?;
    let target = parse_xml(
        r#"<relations>
<person name="Alice">
<knows> Bob </knows>
<knows> Charles </knows>
</person>
<person name="Bob">
<knows> Charles </knows>
</person>
<person name="Charles" />
</relations>"#,
    )
    .unwrap();
    ensure(Canonical::of_document(&got) == Canonical::of_document(&target), || format!("got {out}"))
}

fn axiom_rendering() -> Check {
    let out = hyq(&["run", "example4.xq"])?;
    let got = element_set(&out)?;
    let expected = element_set(&format!(
        r#"<Class xmlns="http://www.w3.org/2002/07/owl#" xmlns:rdf="http://www.w3.org/1999/02/22-rdf-syntax-ns#" rdf:about="{SN}user_item"/>
           <Class xmlns="http://www.w3.org/2002/07/owl#" xmlns:rdf="http://www.w3.org/1999/02/22-rdf-syntax-ns#"
                  xmlns:rdfs="http://www.w3.org/2000/01/rdf-schema#" rdf:about="{SN}wall">
             <rdfs:subClassOf rdf:resource="{SN}user_item"/>
           </Class>
           <Class xmlns="http://www.w3.org/2002/07/owl#" xmlns:rdf="http://www.w3.org/1999/02/22-rdf-syntax-ns#" rdf:about="{SN}activity"/>
           <Class xmlns="http://www.w3.org/2002/07/owl#" xmlns:rdf="http://www.w3.org/1999/02/22-rdf-syntax-ns#"
                  xmlns:rdfs="http://www.w3.org/2000/01/rdf-schema#" rdf:about="{SN}event">
             <rdfs:subClassOf rdf:resource="{SN}activity"/>
             <disjointWith rdf:resource="{SN}message"/>
           </Class>
           <Class xmlns="http://www.w3.org/2002/07/owl#" xmlns:rdf="http://www.w3.org/1999/02/22-rdf-syntax-ns#" rdf:about="{SN}message"/>"#
    ))?;
    ensure(got == expected, || format!("got {out}"))
}

fn consistency() -> Check {
    let verdict = hyq(&["reason", "consistent", "socialnetwork.owl"])?;
    ensure(verdict.trim() == "true", || format!("fixture: {verdict}"))?;
    let cases = [
        (Assertion::Role(sn("jesus"), sn("friend_of"), sn("jesus")), ClashKind::Irreflexive),
        (Assertion::Role(sn("message1"), sn("sent_by"), sn("luis")), ClashKind::MaxCardinality),
        (Assertion::Role(sn("message1"), sn("replies_to"), sn("message1")), ClashKind::Irreflexive),
    ];
    for (extra, kind) in cases {
        let mut o = social_network();
        o.add_assertion(extra.clone());
        let r = reasoner(o);
        ensure(!r.is_consistent(), || format!("{extra} left the ontology consistent"))?;
        let got = r.saturation().clash().map(|c| c.kind);
        ensure(got == Some(kind), || format!("{extra}: clash {got:?}, expected {kind:?}"))?;
    }
    Ok(())
}

fn instances() -> Check {
    let r = reasoner(social_network());
    let cases: [(&str, &[&str]); 3] = [
        ("activity", &["message1", "message2", "event1", "event2"]),
        ("user", &["jesus", "vicente", "luis"]),
        ("popular", &["event1", "message2"]),
    ];
    for (class, expected) in cases {
        let got = fragments(r.instances(&ClassExpr::Named(sn(class))).map_err(|e| e.to_string())?);
        ensure(got == names(expected), || format!("{class}: {got:?}"))?;
    }
    let out = hyq(&["run", "example6.xq"])?;
    ensure(out.matches("<instance>").count() == 7, || format!("example6 output {out}"))
}

fn subclasses() -> Check {
    let r = reasoner(social_network());
    let got = fragments(r.subclasses(&ClassExpr::Named(sn("activity")), false));
    let expected = names(&["popular_message", "event", "Nothing", "popular_event", "message"]);
    ensure(got == expected, || format!("{got:?}"))?;
    let out = hyq(&["run", "example7.xq", "--format", "text"])?;
    let via_program: BTreeSet<String> = out.lines().map(|l| l.trim().to_string()).collect();
    ensure(via_program == expected, || format!("example7 output {out}"))
}

fn fillers() -> Check {
    let r = reasoner(social_network());
    let cases: [(&str, &str, &[&str]); 3] = [
        ("jesus", "recommended_friend_of", &["jesus", "vicente"]),
        ("event1", "confirmed_by", &["vicente"]),
        ("message1", "created_by", &["jesus"]),
    ];
    for (a, p, expected) in cases {
        let got = fragments(r.property_values(&sn(a), &sn(p)).map_err(|e| e.to_string())?);
        ensure(got == names(expected), || format!("{p}({a}): {got:?}"))?;
    }
    Ok(())
}

fn pipeline() -> Check {
    let out = hyq(&["check", "--data", "conference.xml"])?;
    let mut lines = out.lines();
    ensure(lines.next() == Some("consistent: false"), || format!("conference.xml: {out}"))?;
    let mut roles = BTreeSet::new();
    let mut classes = BTreeSet::new();
    for line in lines {
        let rest = line.strip_prefix("clash ").ok_or_else(|| format!("unexpected line {line}"))?;
        let (kind, culprits) = rest.split_once(": ").ok_or_else(|| format!("unexpected line {line}"))?;
        let parts: Vec<&str> = culprits.split(' ').collect();
        match kind {
            "disjoint-roles" => roles.insert(parts[0].to_string()),
            "disjoint-classes" if parts[1..] == ["Student", "Reviewer"] || parts[1..] == ["Reviewer", "Student"] => {
                classes.insert(parts[0].to_string())
            }
            _ => false,
        };
    }
    ensure(roles == names(&["a", "e"]), || format!("disjoint-roles culprits {roles:?}"))?;
    ensure(classes == names(&["b", "d"]), || format!("Student/Reviewer culprits {classes:?}"))?;
    let repaired = hyq(&["check", "--data", "conference_repaired.xml"])?;
    ensure(repaired.trim() == "consistent: true", || format!("repaired: {repaired}"))
}

fn run_property<S: Strategy>(cases: u32, strategy: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Check {
    let mut runner = TestRunner::new(Config { cases, failure_persistence: None, ..Config::default() });
    runner.run(&strategy, test).map_err(|e| e.to_string())
}

fn properties() -> Check {
    use prop::collection::vec;
    use reasoner_gen::{assertion, axiom};
    run_property(200, (sparql_gen::graph(), sparql_gen::bgp()), |(g, p)| sparql_gen::check_bgp(&g, &p))
        .map_err(|e| format!("bgp oracle: {e}"))?;
    run_property(100, (vec(axiom(), 0..8), vec(assertion(), 0..12)), |(t, a)| reasoner_gen::check_fixpoint(&t, &a))
        .map_err(|e| format!("fixpoint: {e}"))?;
    run_property(100, (vec(axiom(), 0..6), vec(assertion(), 0..12)), |(t, a)| {
        reasoner_gen::check_symmetric_inverse(&t, &a)
    })
    .map_err(|e| format!("symmetry/inverse: {e}"))?;
    run_property(100, vec((0..5usize, 0..5usize), 0..15), |edges| reasoner_gen::check_chain(&edges))
        .map_err(|e| format!("chain: {e}"))?;
    run_property(100, (vec(axiom(), 0..8), vec(assertion(), 0..10), vec(assertion(), 0..5)), |(t, a, x)| {
        reasoner_gen::check_monotone(&t, &a, &x)
    })
    .map_err(|e| format!("monotonicity: {e}"))
}

fn round_trips() -> Check {
    for entry in std::fs::read_dir(fixtures()).map_err(|e| e.to_string())? {
        let path = entry.map_err(|e| e.to_string())?.path();
        let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
        if !matches!(ext, "xml" | "owl" | "rdf") {
            continue;
        }
        let text = std::fs::read_to_string(&path).map_err(|e| e.to_string())?;
        let first = parse_xml(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        let once = serialize_xml(&first, true);
        let second = parse_xml(&once).map_err(|e| format!("{}: reparse: {e}", path.display()))?;
        ensure(Canonical::of_document(&first) == Canonical::of_document(&second), || {
            format!("{}: tree changed", path.display())
        })?;
        ensure(serialize_xml(&second, true) == once, || format!("{}: serialization unstable", path.display()))?;
    }
    let o = social_network();
    let doc = axioms_to_xml(&o, None).map_err(|e| e.to_string())?;
    let text = serialize_xml(&doc, true);
    let back = load_ontology(&parse_rdfxml(&text, "file:///rendered.owl").map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    ensure(back.tbox == o.tbox, || {
        let missing: Vec<String> = o.tbox.iter().filter(|a| !back.tbox.contains(a)).map(|a| format!("{a:?}")).collect();
        format!("tbox differs; missing {missing:?}")
    })?;
    ensure(back.abox == o.abox, || "abox differs".into())
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("example 1 reproduction", example1, true),
        ("lowering reproduction", lowering, true),
        ("axiom rendering", axiom_rendering, true),
        ("consistency golden tests", consistency, true),
        ("instance retrieval", instances, true),
        ("subclass retrieval", subclasses, true),
        ("property fillers", fillers, true),
        ("conference pipeline", pipeline, true),
        ("property-based", properties, false),
        ("round-trips", round_trips, true),
    ];
    let suite = Instant::now();
    let mut failed = 0;
    for (n, (name, check, golden)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut result = check();
        let elapsed = start.elapsed();
        if result.is_ok() && *golden && elapsed > GOLDEN_LIMIT {
            result = Err(format!("took {elapsed:?}, limit {GOLDEN_LIMIT:?}"));
        }
        match result {
            Ok(()) => println!("PASS {:>2} {name} ({:.0?})", n + 1, elapsed),
            Err(e) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {e}", n + 1);
            }
        }
    }
    let total = suite.elapsed();
    if total > Duration::from_secs(60) {
        failed += 1;
        println!("FAIL suite took {total:?}");
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
