//! Path expressions over the child, attribute and self axes.
//!
//! ```text
//! Path      ::= "/"? Step ("/" Step)*
//! Step      ::= (QName | "*" | "@" QName | "@*" | "text()" | "node()" | ".") Predicate*
//! Predicate ::= "[" ("@" QName "=" StringLit | QName) "]"
//! ```
//! Explicit `child::`, `attribute::` and `self::` axis prefixes are accepted.

use super::{NodeKind, NodeRef, XmlError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathExpr {
    pub absolute: bool,
    pub steps: Vec<Step>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Child,
    Attribute,
    SelfAxis,
}

/// A possibly prefixed name, resolved against a [`NamespaceEnv`] at evaluation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NameTest {
    pub prefix: Option<String>,
    pub local: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NodeTest {
    Name(NameTest),
    Wildcard,
    Text,
    AnyNode,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Predicate {
    AttributeEquals(NameTest, String),
    HasChild(NameTest),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub axis: Axis,
    pub test: NodeTest,
    pub predicates: Vec<Predicate>,
}

/// Statically known namespace bindings for name tests.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NamespaceEnv {
    bindings: Vec<(String, String)>,
    default_element: Option<String>,
}

impl NamespaceEnv {
    pub fn new() -> Self {
        let mut env = NamespaceEnv::default();
        env.bind("xml", super::XML_NS);
        env
    }

    pub fn bind(&mut self, prefix: &str, namespace: &str) {
        self.bindings.push((prefix.to_string(), namespace.to_string()));
    }

    pub fn with(mut self, prefix: &str, namespace: &str) -> Self {
        self.bind(prefix, namespace);
        self
    }

    pub fn set_default_element(&mut self, namespace: Option<&str>) {
        self.default_element = namespace.filter(|s| !s.is_empty()).map(str::to_string);
    }

    pub fn default_element(&self) -> Option<&str> {
        self.default_element.as_deref()
    }

    pub fn lookup(&self, prefix: &str) -> Option<&str> {
        self.bindings.iter().rev().find(|(p, _)| p == prefix).map(|(_, ns)| ns.as_str())
    }

    /// Resolves a name test to its namespace. Unprefixed element names take
    /// the default element namespace; unprefixed attribute names take none.
    pub fn resolve(&self, test: &NameTest, is_attribute: bool) -> Result<Option<String>, XmlError> {
        match &test.prefix {
            Some(p) => self.lookup(p).map(|ns| Some(ns.to_string())).ok_or_else(|| XmlError::Namespace(p.clone())),
            None if is_attribute => Ok(None),
            None => Ok(self.default_element.clone()),
        }
    }
}

pub fn parse_path(text: &str) -> Result<PathExpr, XmlError> {
    let mut p = PathParser { src: text, pos: 0 };
    let path = p.path()?;
    p.ws();
    if p.pos != text.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(path)
}

struct PathParser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> PathParser<'a> {
    fn error(&self, message: &str) -> XmlError {
        XmlError::Path { offset: self.pos, message: message.to_string() }
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn ws(&mut self) {
        while self.rest().starts_with(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, s: &str) -> bool {
        self.ws();
        if self.rest().starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn path(&mut self) -> Result<PathExpr, XmlError> {
        let absolute = self.eat("/");
        let mut steps = Vec::new();
        self.ws();
        if absolute && self.rest().is_empty() {
            return Ok(PathExpr { absolute, steps });
        }
        steps.push(self.step()?);
        while self.eat("/") {
            if self.rest().starts_with('/') {
                return Err(self.error("`//` is not supported"));
            }
            steps.push(self.step()?);
        }
        Ok(PathExpr { absolute, steps })
    }

    fn name_test(&mut self) -> Result<NameTest, XmlError> {
        self.ws();
        let start = self.pos;
        let end = self
            .rest()
            .find(|c: char| !(c.is_alphanumeric() || matches!(c, '_' | '-' | '.' | ':')))
            .map_or(self.src.len(), |i| self.pos + i);
        let raw = &self.src[start..end];
        let (prefix, local) = match raw.split_once(':') {
            Some((p, l)) => (Some(p), l),
            None => (None, raw),
        };
        if !super::is_ncname(local) || prefix.is_some_and(|p| !super::is_ncname(p)) {
            return Err(self.error("expected a name"));
        }
        self.pos = end;
        Ok(NameTest { prefix: prefix.map(str::to_string), local: local.to_string() })
    }

    fn step(&mut self) -> Result<Step, XmlError> {
        self.ws();
        let mut axis = Axis::Child;
        if self.eat("child::") {
        } else if self.eat("attribute::") || self.eat("@") {
            axis = Axis::Attribute;
        } else if self.eat("self::") {
            axis = Axis::SelfAxis;
        } else if self.eat(".") {
            return Ok(Step { axis: Axis::SelfAxis, test: NodeTest::AnyNode, predicates: self.predicates()? });
        }
        let test = if self.eat("*") {
            NodeTest::Wildcard
        } else if self.eat("text()") {
            NodeTest::Text
        } else if self.eat("node()") {
            NodeTest::AnyNode
        } else {
            NodeTest::Name(self.name_test()?)
        };
        Ok(Step { axis, test, predicates: self.predicates()? })
    }

    fn predicates(&mut self) -> Result<Vec<Predicate>, XmlError> {
        let mut preds = Vec::new();
        while self.eat("[") {
            let pred = if self.eat("@") {
                let name = self.name_test()?;
                if !self.eat("=") {
                    return Err(self.error("expected `=` in attribute predicate"));
                }
                self.ws();
                let quote = match self.rest().chars().next() {
                    Some(q @ ('"' | '\'')) => q,
                    _ => return Err(self.error("expected string literal")),
                };
                self.pos += 1;
                let end = self.rest().find(quote).ok_or_else(|| self.error("unterminated string literal"))?;
                let value = self.rest()[..end].to_string();
                self.pos += end + 1;
                Predicate::AttributeEquals(name, value)
            } else {
                Predicate::HasChild(self.name_test()?)
            };
            if !self.eat("]") {
                return Err(self.error("expected `]`"));
            }
            preds.push(pred);
        }
        Ok(preds)
    }
}

fn name_matches(node: &NodeRef, ns: &Option<String>, local: &str) -> bool {
    node.name().is_some_and(|n| n.matches(ns.as_deref(), local))
}

fn test_matches(node: &NodeRef, axis: Axis, test: &NodeTest, env: &NamespaceEnv) -> Result<bool, XmlError> {
    let is_attr = matches!(node.kind(), NodeKind::Attribute(..));
    Ok(match test {
        NodeTest::AnyNode => true,
        NodeTest::Text => matches!(node.kind(), NodeKind::Text(_)),
        NodeTest::Wildcard => match axis {
            Axis::Attribute => is_attr,
            _ => node.is_element(),
        },
        NodeTest::Name(nt) => {
            let principal = match axis {
                Axis::Attribute => is_attr,
                _ => node.is_element(),
            };
            principal && name_matches(node, &env.resolve(nt, axis == Axis::Attribute)?, &nt.local)
        }
    })
}

fn predicate_holds(node: &NodeRef, pred: &Predicate, env: &NamespaceEnv) -> Result<bool, XmlError> {
    match pred {
        Predicate::AttributeEquals(name, value) => {
            let ns = env.resolve(name, true)?;
            Ok(node.attribute(ns.as_deref(), &name.local).as_deref() == Some(value.as_str()))
        }
        Predicate::HasChild(name) => {
            let ns = env.resolve(name, false)?;
            Ok(node.element_children().any(|c| name_matches(&c, &ns, &name.local)))
        }
    }
}

/// Applies one step to every node of `input`, returning the union in
/// document order without duplicates (per document, documents kept in
/// first-seen order).
pub fn apply_step(input: &[NodeRef], step: &Step, env: &NamespaceEnv) -> Result<Vec<NodeRef>, XmlError> {
    let mut out = Vec::new();
    for node in input {
        let candidates: Vec<NodeRef> = match step.axis {
            Axis::Child => node.children().collect(),
            Axis::Attribute => node.attributes().collect(),
            Axis::SelfAxis => vec![node.clone()],
        };
        'cand: for c in candidates {
            if !test_matches(&c, step.axis, &step.test, env)? {
                continue;
            }
            for pred in &step.predicates {
                if !predicate_holds(&c, pred, env)? {
                    continue 'cand;
                }
            }
            out.push(c);
        }
    }
    Ok(document_order(out))
}

/// Sorts nodes into document order and removes duplicates. Nodes from
/// different trees keep the relative order in which their trees first appear.
pub fn document_order(nodes: Vec<NodeRef>) -> Vec<NodeRef> {
    let mut groups: Vec<Vec<NodeRef>> = Vec::new();
    for n in nodes {
        match groups.iter_mut().find(|g| g[0].same_document(&n)) {
            Some(g) => g.push(n),
            None => groups.push(vec![n]),
        }
    }
    let mut out = Vec::new();
    for mut g in groups {
        g.sort_by_key(NodeRef::id);
        g.dedup();
        out.extend(g);
    }
    out
}

pub fn eval_path(context: &NodeRef, path: &PathExpr, env: &NamespaceEnv) -> Result<Vec<NodeRef>, XmlError> {
    let mut current = vec![if path.absolute { context.root() } else { context.clone() }];
    for step in &path.steps {
        current = apply_step(&current, step, env)?;
    }
    Ok(current)
}
