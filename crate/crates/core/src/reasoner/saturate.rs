use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use crate::owl::{owl_nothing, Assertion, Axiom, ClassExpr, Ontology, RoleExpr};
use crate::rdf::{Iri, Literal};

pub(crate) const WITNESS_PREFIX: &str = "urn:x-witness:";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClashKind {
    DisjointClasses,
    DisjointRoles,
    Irreflexive,
    MaxCardinality,
    NothingMembership,
}

impl ClashKind {
    pub fn name(self) -> &'static str {
        match self {
            ClashKind::DisjointClasses => "disjoint-classes",
            ClashKind::DisjointRoles => "disjoint-roles",
            ClashKind::Irreflexive => "irreflexive",
            ClashKind::MaxCardinality => "max-cardinality",
            ClashKind::NothingMembership => "nothing-membership",
        }
    }
}

impl fmt::Display for ClashKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A derived contradiction. The culprits depend on the kind:
///
/// - disjoint-classes: individual, class, class
/// - disjoint-roles: subject, object, role, role
/// - irreflexive: individual, role
/// - max-cardinality: subject, role, first filler, second filler
/// - nothing-membership: individual
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClashReport {
    pub kind: ClashKind,
    pub culprits: Vec<Iri>,
}

impl fmt::Display for ClashReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.kind)?;
        for c in &self.culprits {
            write!(f, " {}", c.fragment())?;
        }
        Ok(())
    }
}

/// Rules compiled from a TBox.
#[derive(Debug, Clone, Default)]
pub(crate) struct Rules {
    /// `lhs ⊑ rhs`, including both directions of equivalences and the
    /// domain/range axioms read as `∃r.⊤ ⊑ C` and `∃r⁻.⊤ ⊑ C`.
    class: Vec<(ClassExpr, ClassExpr)>,
    disjoint_classes: Vec<(ClassExpr, ClassExpr)>,
    sub_roles: Vec<(RoleExpr, RoleExpr)>,
    chains: Vec<(RoleExpr, RoleExpr, RoleExpr)>,
    disjoint_roles: Vec<(Iri, Iri)>,
    irreflexive: Vec<Iri>,
    data_domain: Vec<(Iri, ClassExpr)>,
}

impl Rules {
    pub(crate) fn compile(ont: &Ontology) -> Rules {
        let mut rules = Rules::default();
        let top = |r: &RoleExpr| ClassExpr::exists(r.clone(), ClassExpr::Thing);
        for ax in &ont.tbox {
            match ax {
                Axiom::SubClassOf(ClassExpr::ExistsSelf(RoleExpr::Named(r)), ClassExpr::Nothing) => {
                    rules.irreflexive.push(r.clone());
                    rules.class.push((ClassExpr::ExistsSelf(RoleExpr::Named(r.clone())), ClassExpr::Nothing));
                }
                Axiom::SubClassOf(c, d) => rules.class.push((c.clone(), d.clone())),
                Axiom::EquivalentClasses(c, d) => {
                    rules.class.push((c.clone(), d.clone()));
                    rules.class.push((d.clone(), c.clone()));
                }
                Axiom::DisjointClasses(c, d) => rules.disjoint_classes.push((c.clone(), d.clone())),
                Axiom::SubRoleOf(r, s) => rules.sub_roles.push((r.clone(), s.clone())),
                Axiom::RoleChain { first, second, sup } => {
                    rules.chains.push((first.clone(), second.clone(), sup.clone()))
                }
                Axiom::InverseRoles(r, s) => {
                    rules.sub_roles.push((RoleExpr::Named(r.clone()), RoleExpr::Inverse(s.clone())));
                    rules.sub_roles.push((RoleExpr::Named(s.clone()), RoleExpr::Inverse(r.clone())));
                }
                Axiom::DisjointRoles(r, s) => rules.disjoint_roles.push((r.clone(), s.clone())),
                Axiom::Domain(r, c) => rules.class.push((top(r), c.clone())),
                Axiom::Range(r, c) => rules.class.push((top(&r.inverse()), c.clone())),
                Axiom::DataDomain(p, c) => rules.data_domain.push((p.clone(), c.clone())),
                Axiom::DataRange(..) => {}
            }
        }
        rules
    }

    /// Number of distinct existential heads on the right of class rules.
    pub(crate) fn exists_heads(&self) -> usize {
        fn count(c: &ClassExpr, out: &mut BTreeSet<ClassExpr>) {
            match c {
                ClassExpr::Exists(..) => {
                    out.insert(c.clone());
                }
                ClassExpr::And(parts) => parts.iter().for_each(|p| count(p, out)),
                _ => {}
            }
        }
        let mut heads = BTreeSet::new();
        for (_, rhs) in &self.class {
            count(rhs, &mut heads);
        }
        heads.len()
    }
}

/// The closure of an ABox under the rules of its TBox.
///
/// Individuals are numbered; named ones come first. Witnesses for
/// existentials on the right of a rule are only introduced for named
/// individuals, at most one per (individual, existential), which bounds the
/// model and guarantees termination.
#[derive(Debug, Clone, Default)]
pub struct SaturatedAbox {
    names: Vec<Iri>,
    index: HashMap<Iri, usize>,
    named: Vec<bool>,
    types: Vec<BTreeSet<Iri>>,
    roles: BTreeMap<Iri, BTreeSet<(usize, usize)>>,
    succ: HashMap<(Iri, usize), BTreeSet<usize>>,
    pred: HashMap<(Iri, usize), BTreeSet<usize>>,
    data: BTreeSet<(usize, Iri, Literal)>,
    max_card: BTreeSet<(usize, u32, RoleExpr, ClassExpr)>,
    witnesses: BTreeMap<(usize, ClassExpr), usize>,
    clashes: Vec<ClashReport>,
}

impl SaturatedAbox {
    fn individual(&mut self, iri: &Iri, named: bool) -> usize {
        if let Some(&i) = self.index.get(iri) {
            return i;
        }
        let i = self.names.len();
        self.names.push(iri.clone());
        self.index.insert(iri.clone(), i);
        self.named.push(named);
        self.types.push(BTreeSet::new());
        i
    }

    fn size(&self) -> usize {
        self.types.iter().map(BTreeSet::len).sum::<usize>()
            + self.roles.values().map(BTreeSet::len).sum::<usize>()
            + self.max_card.len()
            + self.witnesses.len()
    }

    fn add_role(&mut self, role: &RoleExpr, a: usize, b: usize) {
        let (r, a, b) = match role {
            RoleExpr::Named(r) => (r, a, b),
            RoleExpr::Inverse(r) => (r, b, a),
        };
        if self.roles.entry(r.clone()).or_default().insert((a, b)) {
            self.succ.entry((r.clone(), a)).or_default().insert(b);
            self.pred.entry((r.clone(), b)).or_default().insert(a);
        }
    }

    fn successors(&self, role: &RoleExpr, a: usize) -> Vec<usize> {
        let map = match role {
            RoleExpr::Named(_) => &self.succ,
            RoleExpr::Inverse(_) => &self.pred,
        };
        map.get(&(role.iri().clone(), a)).map(|s| s.iter().copied().collect()).unwrap_or_default()
    }

    fn pairs(&self, role: &RoleExpr) -> Vec<(usize, usize)> {
        let Some(set) = self.roles.get(role.iri()) else {
            return Vec::new();
        };
        match role {
            RoleExpr::Named(_) => set.iter().copied().collect(),
            RoleExpr::Inverse(_) => set.iter().map(|&(a, b)| (b, a)).collect(),
        }
    }

    fn has_pair(&self, role: &RoleExpr, a: usize, b: usize) -> bool {
        let (a, b) = match role {
            RoleExpr::Named(_) => (a, b),
            RoleExpr::Inverse(_) => (b, a),
        };
        self.roles.get(role.iri()).is_some_and(|s| s.contains(&(a, b)))
    }

    /// Whether `a` satisfies `c` against the current facts. Universal and
    /// cardinality restrictions are not Horn on the left and never hold.
    fn satisfies(&self, a: usize, c: &ClassExpr) -> bool {
        match c {
            ClassExpr::Thing => true,
            ClassExpr::Nothing => self.types[a].contains(&owl_nothing()),
            ClassExpr::Named(n) => self.types[a].contains(n),
            ClassExpr::And(parts) => parts.iter().all(|p| self.satisfies(a, p)),
            ClassExpr::Exists(r, d) => self.successors(r, a).into_iter().any(|b| self.satisfies(b, d)),
            ClassExpr::ExistsSelf(r) => self.has_pair(r, a, a),
            ClassExpr::Forall(..) | ClassExpr::MaxCard(..) => false,
        }
    }

    /// Makes `a` an instance of `c`.
    fn apply(&mut self, a: usize, c: &ClassExpr) {
        match c {
            ClassExpr::Thing => {}
            ClassExpr::Nothing => {
                self.types[a].insert(owl_nothing());
            }
            ClassExpr::Named(n) => {
                self.types[a].insert(n.clone());
            }
            ClassExpr::And(parts) => parts.iter().for_each(|p| self.apply(a, p)),
            ClassExpr::Exists(r, d) => {
                if !self.named[a] {
                    return;
                }
                let key = (a, c.clone());
                let w = match self.witnesses.get(&key) {
                    Some(&w) => w,
                    None => {
                        let iri = Iri::new(format!("{WITNESS_PREFIX}{}", self.witnesses.len()));
                        let w = self.individual(&iri, false);
                        self.witnesses.insert(key, w);
                        w
                    }
                };
                self.add_role(r, a, w);
                self.apply(w, d);
            }
            ClassExpr::ExistsSelf(r) => self.add_role(r, a, a),
            ClassExpr::Forall(r, d) => {
                for b in self.successors(r, a) {
                    self.apply(b, d);
                }
            }
            ClassExpr::MaxCard(n, r, d) => {
                self.max_card.insert((a, *n, r.clone(), (**d).clone()));
            }
        }
    }

    /// One pass of every rule over every individual.
    fn round(&mut self, rules: &Rules) {
        for (lhs, rhs) in &rules.class {
            let mut a = 0;
            while a < self.names.len() {
                if self.satisfies(a, lhs) {
                    self.apply(a, rhs);
                }
                a += 1;
            }
        }
        for (sub, sup) in &rules.sub_roles {
            for (a, b) in self.pairs(sub) {
                self.add_role(sup, a, b);
            }
        }
        for (first, second, sup) in &rules.chains {
            for (a, b) in self.pairs(first) {
                for c in self.successors(second, b) {
                    self.add_role(sup, a, c);
                }
            }
        }
        for (p, c) in &rules.data_domain {
            let subjects: BTreeSet<usize> = self.data.iter().filter(|(_, q, _)| q == p).map(|(a, _, _)| *a).collect();
            for a in subjects {
                self.apply(a, c);
            }
        }
    }

    fn run(&mut self, rules: &Rules) {
        loop {
            let before = self.size();
            self.round(rules);
            if self.size() == before {
                break;
            }
        }
        self.clashes = self.find_clashes(rules);
    }

    fn find_clashes(&self, rules: &Rules) -> Vec<ClashReport> {
        let mut out = BTreeSet::new();
        let name = |i: usize| self.names[i].clone();
        let class_iri = |c: &ClassExpr| Iri::new(c.to_string());
        for r in &rules.irreflexive {
            for (a, b) in self.pairs(&RoleExpr::Named(r.clone())) {
                if a == b {
                    out.insert(ClashReport { kind: ClashKind::Irreflexive, culprits: vec![name(a), r.clone()] });
                }
            }
        }
        for (c, d) in &rules.disjoint_classes {
            for a in 0..self.names.len() {
                if self.satisfies(a, c) && self.satisfies(a, d) {
                    let culprits = vec![
                        name(a),
                        c.as_named().cloned().unwrap_or_else(|| class_iri(c)),
                        d.as_named().cloned().unwrap_or_else(|| class_iri(d)),
                    ];
                    out.insert(ClashReport { kind: ClashKind::DisjointClasses, culprits });
                }
            }
        }
        for (r, s) in &rules.disjoint_roles {
            let s_pairs: BTreeSet<(usize, usize)> = self.pairs(&RoleExpr::Named(s.clone())).into_iter().collect();
            for (a, b) in self.pairs(&RoleExpr::Named(r.clone())) {
                if s_pairs.contains(&(a, b)) {
                    out.insert(ClashReport {
                        kind: ClashKind::DisjointRoles,
                        culprits: vec![name(a), name(b), r.clone(), s.clone()],
                    });
                }
            }
        }
        for (a, n, r, d) in &self.max_card {
            let fillers: Vec<usize> =
                self.successors(r, *a).into_iter().filter(|&b| self.named[b] && self.satisfies(b, d)).collect();
            if fillers.len() > *n as usize {
                out.insert(ClashReport {
                    kind: ClashKind::MaxCardinality,
                    culprits: vec![name(*a), r.iri().clone(), name(fillers[0]), name(fillers[1])],
                });
            }
        }
        let nothing = owl_nothing();
        let explained: BTreeSet<&Iri> =
            out.iter().filter(|c| c.kind == ClashKind::Irreflexive).map(|c| &c.culprits[0]).collect();
        let mut rest = Vec::new();
        for (a, types) in self.types.iter().enumerate() {
            if types.contains(&nothing) && !explained.contains(&self.names[a]) {
                rest.push(ClashReport { kind: ClashKind::NothingMembership, culprits: vec![name(a)] });
            }
        }
        out.into_iter().chain(rest).collect()
    }

    /// Checks that one more pass of every rule adds nothing.
    pub(crate) fn is_closed_under(&self, rules: &Rules) -> bool {
        let mut copy = self.clone();
        copy.round(rules);
        copy.size() == self.size()
    }

    pub(crate) fn index_of(&self, iri: &Iri) -> Option<usize> {
        self.index.get(iri).copied()
    }

    pub(crate) fn satisfies_iri(&self, a: &Iri, c: &ClassExpr) -> bool {
        match self.index_of(a) {
            Some(i) => self.satisfies(i, c),
            None => matches!(c, ClassExpr::Thing),
        }
    }

    pub(crate) fn named_individuals(&self) -> impl Iterator<Item = (usize, &Iri)> {
        self.names.iter().enumerate().filter(|(i, _)| self.named[*i])
    }

    /// Every clash, most specific kinds first. Membership in ⊥ is only
    /// reported when no irreflexivity clash explains it.
    pub fn clashes(&self) -> &[ClashReport] {
        &self.clashes
    }

    pub fn clash(&self) -> Option<&ClashReport> {
        self.clashes.first()
    }

    pub fn is_fresh(&self, iri: &Iri) -> bool {
        self.index_of(iri).is_some_and(|i| !self.named[i])
    }

    pub fn fresh_individuals(&self) -> BTreeSet<Iri> {
        self.names.iter().enumerate().filter(|(i, _)| !self.named[*i]).map(|(_, n)| n.clone()).collect()
    }

    /// (individual, class) pairs, including ⊥ memberships.
    pub fn class_facts(&self) -> BTreeSet<(Iri, Iri)> {
        self.types
            .iter()
            .enumerate()
            .flat_map(|(a, ts)| ts.iter().map(move |c| (self.names[a].clone(), c.clone())))
            .collect()
    }

    /// (subject, role, object) triples.
    pub fn role_facts(&self) -> BTreeSet<(Iri, Iri, Iri)> {
        self.roles
            .iter()
            .flat_map(|(r, pairs)| {
                pairs.iter().map(move |&(a, b)| (self.names[a].clone(), r.clone(), self.names[b].clone()))
            })
            .collect()
    }

    pub fn has_type(&self, a: &Iri, c: &Iri) -> bool {
        self.index_of(a).is_some_and(|i| self.types[i].contains(c))
    }

    pub fn holds(&self, a: &Iri, r: &Iri, b: &Iri) -> bool {
        match (self.index_of(a), self.index_of(b)) {
            (Some(a), Some(b)) => self.has_pair(&RoleExpr::Named(r.clone()), a, b),
            _ => false,
        }
    }

    /// Named fillers of `r` for `a`.
    pub fn fillers(&self, a: &Iri, r: &RoleExpr) -> BTreeSet<Iri> {
        let Some(i) = self.index_of(a) else {
            return BTreeSet::new();
        };
        self.successors(r, i).into_iter().filter(|&b| self.named[b]).map(|b| self.names[b].clone()).collect()
    }

    pub fn data_values(&self, a: &Iri, p: &Iri) -> Vec<Literal> {
        let Some(i) = self.index_of(a) else {
            return Vec::new();
        };
        self.data.iter().filter(|(s, q, _)| *s == i && q == p).map(|(_, _, l)| l.clone()).collect()
    }
}

/// Saturates the ABox of `ont` under its TBox.
pub fn saturate(ont: &Ontology) -> SaturatedAbox {
    saturate_with(ont, &Rules::compile(ont))
}

pub(crate) fn saturate_with(ont: &Ontology, rules: &Rules) -> SaturatedAbox {
    let mut abox = SaturatedAbox::default();
    for i in &ont.individuals {
        abox.individual(i, true);
    }
    for a in &ont.abox {
        match a {
            Assertion::Class(i, c) => {
                let i = abox.individual(i, true);
                abox.apply(i, c);
            }
            Assertion::Role(s, r, o) => {
                let (s, o) = (abox.individual(s, true), abox.individual(o, true));
                abox.add_role(&RoleExpr::Named(r.clone()), s, o);
            }
            Assertion::Data(s, p, v) => {
                let s = abox.individual(s, true);
                abox.data.insert((s, p.clone(), v.clone()));
            }
        }
    }
    abox.run(rules);
    abox
}

/// Canonical model of `c`: a single probe individual asserted into `c` and
/// saturated under the TBox alone.
pub(crate) fn canonical_model(rules: &Rules, c: &ClassExpr) -> (SaturatedAbox, usize) {
    let mut abox = SaturatedAbox::default();
    let x = abox.individual(&Iri::new("urn:x-probe"), true);
    abox.apply(x, c);
    abox.run(rules);
    (abox, x)
}

/// Whether `c ⊑ d` holds in the canonical model of `c`.
pub(crate) fn subsumed(rules: &Rules, c: &ClassExpr, d: &ClassExpr) -> bool {
    let (model, x) = canonical_model(rules, c);
    !model.clashes.is_empty() || model.satisfies(x, d)
}
