use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::{NodeKind, NodeRef, QName, XmlDocument, XML_NS};

/// Serializes a whole document (or constructed tree) starting at its root.
pub fn serialize_xml(doc: &std::sync::Arc<XmlDocument>, indent: bool) -> String {
    serialize_node(&NodeRef::root_of(doc), indent)
}

/// Serializes any node. Namespace declarations needed by the subtree are
/// synthesized, so a node lifted out of a larger document stays well formed.
pub fn serialize_node(node: &NodeRef, indent: bool) -> String {
    let mut w = Writer { out: String::new(), indent, scopes: Vec::new(), generated: 0 };
    match node.kind() {
        NodeKind::Document => {
            for child in node.children() {
                w.node(&child, 0);
            }
        }
        NodeKind::Attribute(name, value) => {
            let _ = write!(w.out, "{}=\"{}\"", name, escape_attr(value));
        }
        _ => {
            // Bindings declared by ancestors are not visible to a detached
            // subtree; declarations are re-synthesized as needed.
            w.node(node, 0);
        }
    }
    w.out
}

struct Writer {
    out: String,
    indent: bool,
    scopes: Vec<(Option<String>, String)>,
    generated: usize,
}

impl Writer {
    fn lookup(&self, prefix: Option<&str>) -> Option<&str> {
        self.scopes.iter().rev().find(|(p, _)| p.as_deref() == prefix).map(|(_, ns)| ns.as_str())
    }

    fn prefix_for(&self, ns: &str) -> Option<String> {
        // Innermost binding wins; the prefix must not be shadowed later.
        for (p, bound) in self.scopes.iter().rev() {
            if let Some(p) = p {
                if bound == ns && self.lookup(Some(p)) == Some(ns) {
                    return Some(p.clone());
                }
            }
        }
        None
    }

    fn fresh_prefix(&mut self) -> String {
        loop {
            let p = format!("ns{}", self.generated);
            self.generated += 1;
            if self.lookup(Some(&p)).is_none() {
                return p;
            }
        }
    }

    fn node(&mut self, node: &NodeRef, depth: usize) {
        match node.kind() {
            NodeKind::Text(t) => self.out.push_str(&escape_text(t)),
            NodeKind::Element(_) => self.element(node, depth),
            NodeKind::Document => {
                for c in node.children() {
                    self.node(&c, depth);
                }
            }
            NodeKind::Attribute(..) => {}
        }
    }

    fn bind(&mut self, decls: &mut Vec<(Option<String>, String)>, prefix: Option<String>, ns: String) {
        if let Some(existing) = decls.iter_mut().find(|(p, _)| *p == prefix) {
            existing.1 = ns.clone();
        } else {
            decls.push((prefix.clone(), ns.clone()));
        }
        self.scopes.push((prefix, ns));
    }

    fn element_name(&mut self, name: &QName, decls: &mut Vec<(Option<String>, String)>) -> String {
        match name.namespace() {
            None => {
                if self.lookup(None).is_some_and(|d| !d.is_empty()) {
                    self.bind(decls, None, String::new());
                }
                name.local_name().to_string()
            }
            Some(ns) => {
                if let Some(p) = name.prefix() {
                    if self.lookup(Some(p)) == Some(ns) {
                        return format!("{p}:{}", name.local_name());
                    }
                    let taken_here = decls.iter().any(|(dp, dns)| dp.as_deref() == Some(p) && dns != ns);
                    if !taken_here {
                        self.bind(decls, Some(p.to_string()), ns.to_string());
                        return format!("{p}:{}", name.local_name());
                    }
                }
                if self.lookup(None) == Some(ns) {
                    return name.local_name().to_string();
                }
                if name.prefix().is_none() && !decls.iter().any(|(p, _)| p.is_none()) {
                    self.bind(decls, None, ns.to_string());
                    return name.local_name().to_string();
                }
                let p = self.prefix_for(ns).unwrap_or_else(|| {
                    let p = self.fresh_prefix();
                    self.bind(decls, Some(p.clone()), ns.to_string());
                    p
                });
                format!("{p}:{}", name.local_name())
            }
        }
    }

    fn attribute_name(&mut self, name: &QName, decls: &mut Vec<(Option<String>, String)>) -> String {
        match name.namespace() {
            None => name.local_name().to_string(),
            Some(XML_NS) => format!("xml:{}", name.local_name()),
            Some(ns) => {
                if let Some(p) = name.prefix() {
                    if self.lookup(Some(p)) == Some(ns) {
                        return format!("{p}:{}", name.local_name());
                    }
                    if !decls.iter().any(|(dp, _)| dp.as_deref() == Some(p)) {
                        self.bind(decls, Some(p.to_string()), ns.to_string());
                        return format!("{p}:{}", name.local_name());
                    }
                }
                let p = self.prefix_for(ns).unwrap_or_else(|| {
                    let p = self.fresh_prefix();
                    self.bind(decls, Some(p.clone()), ns.to_string());
                    p
                });
                format!("{p}:{}", name.local_name())
            }
        }
    }

    fn element(&mut self, node: &NodeRef, depth: usize) {
        let NodeKind::Element(name) = node.kind() else {
            return;
        };
        let mark = self.scopes.len();
        let mut decls: Vec<(Option<String>, String)> = Vec::new();
        for (p, ns) in node.document().namespace_decls(node.id()) {
            if self.lookup(p.as_deref()) != Some(ns.as_str()) {
                self.bind(&mut decls, p.clone(), ns.clone());
            }
        }
        let tag = self.element_name(name, &mut decls);
        let mut attrs = Vec::new();
        for a in node.attributes() {
            if let NodeKind::Attribute(an, v) = a.kind() {
                let an = self.attribute_name(an, &mut decls);
                attrs.push((an, v.clone()));
            }
        }

        self.out.push('<');
        self.out.push_str(&tag);
        for (p, ns) in &decls {
            match p {
                Some(p) => {
                    let _ = write!(self.out, " xmlns:{p}=\"{}\"", escape_attr(ns));
                }
                None => {
                    let _ = write!(self.out, " xmlns=\"{}\"", escape_attr(ns));
                }
            }
        }
        for (an, v) in &attrs {
            let _ = write!(self.out, " {an}=\"{}\"", escape_attr(v));
        }

        let children: Vec<NodeRef> =
            node.children().filter(|c| !matches!(c.kind(), NodeKind::Text(t) if t.is_empty())).collect();
        if children.is_empty() {
            self.out.push_str("/>");
        } else {
            self.out.push('>');
            let element_only = children.iter().any(NodeRef::is_element)
                && children
                    .iter()
                    .all(|c| c.is_element() || matches!(c.kind(), NodeKind::Text(t) if t.trim().is_empty()));
            if self.indent && element_only {
                for c in children.iter().filter(|c| c.is_element()) {
                    self.out.push('\n');
                    self.out.push_str(&"  ".repeat(depth + 1));
                    self.element(c, depth + 1);
                }
                self.out.push('\n');
                self.out.push_str(&"  ".repeat(depth));
            } else {
                for c in &children {
                    self.node(c, depth + 1);
                }
            }
            let _ = write!(self.out, "</{tag}>");
        }
        self.scopes.truncate(mark);
    }
}

fn escape_text(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '\r' => out.push_str("&#13;"),
            c => out.push(c),
        }
    }
    out
}

fn escape_attr(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '"' => out.push_str("&quot;"),
            '\n' => out.push_str("&#10;"),
            '\r' => out.push_str("&#13;"),
            '\t' => out.push_str("&#9;"),
            c => out.push(c),
        }
    }
    out
}

type ExpandedName = (Option<String>, String);

/// Structural form used to compare trees: attribute order is ignored, text is
/// trimmed, whitespace-only text is dropped and adjacent text merged.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Canonical {
    Element { name: ExpandedName, attributes: BTreeMap<ExpandedName, String>, children: Vec<Canonical> },
    Text(String),
}

impl Canonical {
    pub fn of(node: &NodeRef) -> Canonical {
        match node.kind() {
            NodeKind::Document => match node.element_children().next() {
                Some(e) => Canonical::of(&e),
                None => Canonical::Text(String::new()),
            },
            NodeKind::Text(t) | NodeKind::Attribute(_, t) => Canonical::Text(t.trim().to_string()),
            NodeKind::Element(name) => {
                let attributes = node
                    .attributes()
                    .filter_map(|a| match a.kind() {
                        NodeKind::Attribute(n, v) => Some((expanded(n), v.clone())),
                        _ => None,
                    })
                    .collect();
                let mut children = Vec::new();
                let mut pending = String::new();
                for c in node.children() {
                    match c.kind() {
                        NodeKind::Text(t) => pending.push_str(t),
                        _ => {
                            flush(&mut pending, &mut children);
                            children.push(Canonical::of(&c));
                        }
                    }
                }
                flush(&mut pending, &mut children);
                Canonical::Element { name: expanded(name), attributes, children }
            }
        }
    }

    pub fn of_document(doc: &std::sync::Arc<XmlDocument>) -> Canonical {
        Canonical::of(&NodeRef::root_of(doc))
    }
}

fn flush(pending: &mut String, children: &mut Vec<Canonical>) {
    let t = pending.trim();
    if !t.is_empty() {
        children.push(Canonical::Text(t.to_string()));
    }
    pending.clear();
}

fn expanded(name: &QName) -> ExpandedName {
    (name.namespace().map(str::to_string), name.local_name().to_string())
}
