use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use super::ast::{AttrPart, CompareOp, Content, ElemCtor, Expr, Program};
use super::{builtins, Environment, HostError, Item, Sequence};
use crate::owl::Ontology;
use crate::rdf::RdfGraph;
use crate::xml::{apply_step, document_order, ElementBuf, Fragment, NodeKind, NodeRef, XmlDocument};

/// Evaluates a parsed program. Declared variables are bound in order, each
/// seeing the ones before it, unless the environment supplies a value.
pub fn evaluate(program: &Program, env: &Environment) -> Result<Sequence, HostError> {
    let mut ev = Evaluator::new(env);
    for (name, init) in &program.variables {
        let value = match env.external.iter().find(|(n, _)| n == name) {
            Some((_, v)) => v.clone(),
            None => ev.eval(init)?,
        };
        ev.vars.push((name.clone(), value));
    }
    ev.eval(&program.body)
}

pub(crate) struct Evaluator<'e> {
    pub(crate) env: &'e Environment,
    vars: Vec<(String, Sequence)>,
    pub(crate) docs: HashMap<PathBuf, Arc<XmlDocument>>,
    pub(crate) graphs: HashMap<PathBuf, Arc<RdfGraph>>,
    pub(crate) ontologies: HashMap<PathBuf, Arc<Ontology>>,
    pub(crate) temp: Option<tempfile::TempDir>,
    pub(crate) temp_count: usize,
}

impl<'e> Evaluator<'e> {
    fn new(env: &'e Environment) -> Self {
        Evaluator {
            env,
            vars: Vec::new(),
            docs: HashMap::new(),
            graphs: HashMap::new(),
            ontologies: HashMap::new(),
            temp: None,
            temp_count: 0,
        }
    }

    /// Resolves a file name against the base directory. `file://` URIs are
    /// accepted.
    pub(crate) fn resolve_path(&self, name: &str) -> PathBuf {
        let name = name.strip_prefix("file://").unwrap_or(name);
        let path = Path::new(name);
        let joined = if path.is_absolute() { path.to_path_buf() } else { self.env.base_dir.join(path) };
        if joined.is_absolute() {
            joined
        } else {
            std::env::current_dir().map(|d| d.join(&joined)).unwrap_or(joined)
        }
    }

    fn lookup(&self, name: &str) -> Result<Sequence, HostError> {
        self.vars
            .iter()
            .rev()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.clone())
            .ok_or_else(|| HostError::UnboundVariable(name.to_string()))
    }

    fn context(&self) -> Result<NodeRef, HostError> {
        self.env.context.clone().ok_or_else(|| HostError::Type("no context item is defined".into()))
    }

    fn with_var<T>(&mut self, name: &str, value: Sequence, f: impl FnOnce(&mut Self) -> T) -> T {
        self.vars.push((name.to_string(), value));
        let out = f(self);
        self.vars.pop();
        out
    }

    pub(crate) fn eval(&mut self, e: &Expr) -> Result<Sequence, HostError> {
        match e {
            Expr::StringLit(s) => Ok(vec![Item::String(s.clone())]),
            Expr::NumLit(n) => Ok(vec![Item::Number(*n)]),
            Expr::VarRef(v) => self.lookup(v),
            Expr::ContextItem => Ok(vec![Item::Node(self.context()?)]),
            Expr::Root => Ok(vec![Item::Node(self.context()?.root())]),
            Expr::Sequence(items) => {
                let mut out = Vec::new();
                for i in items {
                    out.extend(self.eval(i)?);
                }
                Ok(out)
            }
            Expr::Let { var, value, body } => {
                let v = self.eval(value)?;
                self.with_var(var, v, |ev| ev.eval(body))
            }
            Expr::For { var, input, body } => {
                let mut out = Vec::new();
                for item in self.eval(input)? {
                    out.extend(self.with_var(var, vec![item], |ev| ev.eval(body))?);
                }
                Ok(out)
            }
            Expr::If { cond, then, otherwise } => {
                let c = self.eval(cond)?;
                if effective_boolean(&c)? {
                    self.eval(then)
                } else {
                    self.eval(otherwise)
                }
            }
            Expr::Path { start, steps, env } => {
                let mut nodes = Vec::new();
                for item in self.eval(start)? {
                    match item {
                        Item::Node(n) => nodes.push(n),
                        other => {
                            return Err(HostError::Type(format!("path step applied to the non-node value {other:?}")))
                        }
                    }
                }
                for step in steps {
                    nodes = apply_step(&nodes, step, env).map_err(|e| HostError::Type(e.to_string()))?;
                }
                Ok(nodes.into_iter().map(Item::Node).collect())
            }
            Expr::ElemCtor(c) => {
                let el = self.construct(c)?;
                Ok(vec![Item::Node(NodeRef::root_of(&XmlDocument::from_element(el)))])
            }
            Expr::DocCtor(content) => {
                let seq = self.eval(content)?;
                let mut holder = ElementBuf::new(crate::xml::QName::local("document"));
                add_content(&mut holder, seq, "document constructor")?;
                if !holder.attributes.is_empty() {
                    return Err(HostError::Type("attributes cannot be children of a document".into()));
                }
                let doc = XmlDocument::document_from_content(holder.children, None)
                    .map_err(|e| HostError::Type(e.to_string()))?;
                Ok(vec![Item::Node(NodeRef::root_of(&doc))])
            }
            Expr::FnCall { name, args } => {
                let mut values = Vec::with_capacity(args.len());
                for a in args {
                    values.push(self.eval(a)?);
                }
                builtins::call(self, name, values)
            }
            Expr::Union(l, r) => {
                let mut out = self.eval(l)?;
                out.extend(self.eval(r)?);
                let nodes: Option<Vec<NodeRef>> = out.iter().map(|i| i.as_node().cloned()).collect();
                match nodes {
                    Some(nodes) if nodes.windows(2).all(|w| w[0].same_document(&w[1])) => {
                        Ok(document_order(nodes).into_iter().map(Item::Node).collect())
                    }
                    _ => Ok(out),
                }
            }
            Expr::Compare(op, l, r) => {
                let (l, r) = (self.eval(l)?, self.eval(r)?);
                Ok(vec![Item::Boolean(general_compare(*op, &l, &r))])
            }
            Expr::And(l, r) => {
                let v = effective_boolean(&self.eval(l)?)? && effective_boolean(&self.eval(r)?)?;
                Ok(vec![Item::Boolean(v)])
            }
            Expr::Or(l, r) => {
                let v = effective_boolean(&self.eval(l)?)? || effective_boolean(&self.eval(r)?)?;
                Ok(vec![Item::Boolean(v)])
            }
        }
    }

    fn construct(&mut self, c: &ElemCtor) -> Result<ElementBuf, HostError> {
        let mut el = ElementBuf::new(c.name.clone());
        el.namespaces = c.namespaces.clone();
        for (name, parts) in &c.attributes {
            let mut value = String::new();
            for part in parts {
                match part {
                    AttrPart::Text(t) => value.push_str(t),
                    AttrPart::Expr(e) => {
                        let atoms: Vec<String> = self.eval(e)?.iter().map(Item::string_value).collect();
                        value.push_str(&atoms.join(" "));
                    }
                }
            }
            el.attributes.push((name.clone(), value));
        }
        for part in &c.content {
            match part {
                Content::Text(t) => push_text(&mut el, t),
                Content::Elem(inner) => {
                    let child = self.construct(inner)?;
                    el.push(Fragment::Element(child));
                }
                Content::Expr(e) => {
                    let seq = self.eval(e)?;
                    add_content(&mut el, seq, "element constructor")?;
                }
            }
        }
        Ok(el)
    }
}

fn push_text(el: &mut ElementBuf, text: &str) {
    if text.is_empty() {
        return;
    }
    if let Some(Fragment::Text(prev)) = el.children.last_mut() {
        prev.push_str(text);
    } else {
        el.push(Fragment::Text(text.to_string()));
    }
}

/// Adds the items of one enclosed expression: nodes are copied, adjacent
/// atomic values are joined by single spaces, attribute nodes become
/// attributes.
fn add_content(el: &mut ElementBuf, seq: Sequence, what: &str) -> Result<(), HostError> {
    let mut previous_atomic = false;
    for item in seq {
        match item {
            Item::Node(n) => {
                previous_atomic = false;
                match n.kind() {
                    NodeKind::Attribute(name, value) => {
                        el.attributes.retain(|(a, _)| a != name);
                        el.attributes.push((name.clone(), value.clone()));
                    }
                    NodeKind::Text(t) => push_text(el, t),
                    _ => {
                        for frag in n.to_fragments() {
                            match frag {
                                Fragment::Text(t) => push_text(el, &t),
                                f => el.push(f),
                            }
                        }
                    }
                }
            }
            Item::Ontology(_) | Item::Reasoner(_) => {
                return Err(HostError::Type(format!("{what}: handles cannot be used as content")));
            }
            atomic => {
                if previous_atomic {
                    push_text(el, " ");
                }
                push_text(el, &atomic.string_value());
                previous_atomic = true;
            }
        }
    }
    Ok(())
}

pub(crate) fn effective_boolean(seq: &[Item]) -> Result<bool, HostError> {
    match seq {
        [] => Ok(false),
        [Item::Node(_), ..] => Ok(true),
        [Item::Boolean(b)] => Ok(*b),
        [Item::String(s)] => Ok(!s.is_empty()),
        [Item::Number(n)] => Ok(*n != 0.0 && !n.is_nan()),
        [Item::Ontology(_) | Item::Reasoner(_)] => Ok(true),
        _ => Err(HostError::Type("effective boolean value of a sequence of several atomic values".into())),
    }
}

fn atoms_equal(a: &Item, b: &Item) -> bool {
    match (a, b) {
        (Item::Number(x), Item::Number(y)) => x == y,
        (Item::Boolean(x), Item::Boolean(y)) => x == y,
        _ => a.string_value() == b.string_value(),
    }
}

/// Existential comparison over the atomized operands.
fn general_compare(op: CompareOp, l: &[Item], r: &[Item]) -> bool {
    l.iter().any(|a| {
        r.iter().any(|b| match op {
            CompareOp::Eq => atoms_equal(a, b),
            CompareOp::Ne => !atoms_equal(a, b),
        })
    })
}
