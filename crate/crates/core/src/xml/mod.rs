//! XML data model: an arena-backed, immutable document tree.
//!
//! Nodes are stored in a `Vec` in document order (pre-order, with an
//! element's attributes placed right after the element itself), so a node's
//! arena index doubles as its document-order key. Trees are assembled from an
//! owned [`ElementBuf`] and frozen into an [`XmlDocument`]; nothing mutates a
//! document after that.

mod parser;
mod path;
mod serialize;

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

pub use parser::{parse_xml, parse_xml_with_uri};
pub use path::{
    apply_step, document_order, eval_path, parse_path, Axis, NameTest, NamespaceEnv, NodeTest, PathExpr, Predicate,
    Step,
};
pub use serialize::{serialize_node, serialize_xml, Canonical};

pub const XML_NS: &str = "http://www.w3.org/XML/1998/namespace";
pub const XMLNS_NS: &str = "http://www.w3.org/2000/xmlns/";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum XmlError {
    #[error("XML parse error at {line}:{column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("undeclared namespace prefix `{0}`")]
    Namespace(String),
    #[error("invalid path expression at offset {offset}: {message}")]
    Path { offset: usize, message: String },
    #[error("invalid name `{0}`")]
    InvalidName(String),
    #[error("a document node must have exactly one element child, found {0}")]
    DocumentShape(usize),
}

/// Returns true when `s` matches the NCName production (a name without colons).
pub fn is_ncname(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c == '_' || c.is_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c == '_' || c == '-' || c == '.' || c.is_alphanumeric() || c == '\u{B7}')
}

/// Expanded XML name. Equality and hashing look at the namespace and the
/// local part only; the prefix is a serialization hint.
#[derive(Clone)]
pub struct QName {
    namespace: Option<String>,
    local: String,
    prefix: Option<String>,
}

impl QName {
    pub fn new(namespace: Option<&str>, local: &str, prefix: Option<&str>) -> Result<Self, XmlError> {
        if !is_ncname(local) {
            return Err(XmlError::InvalidName(local.to_string()));
        }
        if let Some(p) = prefix {
            if !is_ncname(p) {
                return Err(XmlError::InvalidName(p.to_string()));
            }
        }
        Ok(QName {
            namespace: namespace.filter(|ns| !ns.is_empty()).map(str::to_string),
            local: local.to_string(),
            prefix: prefix.map(str::to_string),
        })
    }

    /// A name in no namespace. Panics if `local` is not an NCName.
    pub fn local(local: &str) -> Self {
        QName::new(None, local, None).expect("local name must be an NCName")
    }

    /// A namespaced name with a prefix hint. Panics if either part is not an NCName.
    pub fn ns(namespace: &str, prefix: &str, local: &str) -> Self {
        QName::new(Some(namespace), local, Some(prefix)).expect("names must be NCNames")
    }

    pub fn namespace(&self) -> Option<&str> {
        self.namespace.as_deref()
    }

    pub fn local_name(&self) -> &str {
        &self.local
    }

    pub fn prefix(&self) -> Option<&str> {
        self.prefix.as_deref()
    }

    pub fn with_prefix(mut self, prefix: Option<&str>) -> Self {
        self.prefix = prefix.map(str::to_string);
        self
    }

    pub fn matches(&self, namespace: Option<&str>, local: &str) -> bool {
        self.namespace.as_deref() == namespace && self.local == local
    }

    /// Namespace IRI concatenated with the local name.
    pub fn expanded(&self) -> String {
        match &self.namespace {
            Some(ns) => format!("{ns}{}", self.local),
            None => self.local.clone(),
        }
    }
}

impl PartialEq for QName {
    fn eq(&self, other: &Self) -> bool {
        self.namespace == other.namespace && self.local == other.local
    }
}

impl Eq for QName {}

impl std::hash::Hash for QName {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.namespace.hash(state);
        self.local.hash(state);
    }
}

impl PartialOrd for QName {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QName {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (&self.namespace, &self.local).cmp(&(&other.namespace, &other.local))
    }
}

impl fmt::Debug for QName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.namespace {
            Some(ns) => write!(f, "{{{ns}}}{}", self.local),
            None => write!(f, "{}", self.local),
        }
    }
}

impl fmt::Display for QName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.prefix {
            Some(p) => write!(f, "{p}:{}", self.local),
            None => write!(f, "{}", self.local),
        }
    }
}

/// Index of a node inside its document's arena.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(usize);

impl NodeId {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum NodeKind {
    Document,
    Element(QName),
    Attribute(QName, String),
    Text(String),
}

#[derive(Debug, Clone)]
struct NodeData {
    kind: NodeKind,
    parent: Option<NodeId>,
    children: Vec<NodeId>,
    attributes: Vec<NodeId>,
    /// Namespace declarations written on this element (prefix, IRI).
    namespaces: Vec<(Option<String>, String)>,
}

/// An immutable XML tree. The root is either a document node (with exactly
/// one element child) or a parentless element produced by a constructor.
#[derive(Debug)]
pub struct XmlDocument {
    nodes: Vec<NodeData>,
    uri: Option<String>,
}

impl XmlDocument {
    /// Wraps `root` in a document node.
    pub fn from_root(root: ElementBuf, uri: Option<String>) -> Arc<XmlDocument> {
        let mut doc = XmlDocument {
            nodes: vec![NodeData {
                kind: NodeKind::Document,
                parent: None,
                children: Vec::new(),
                attributes: Vec::new(),
                namespaces: Vec::new(),
            }],
            uri,
        };
        let child = doc.push_element(root, Some(NodeId(0)));
        doc.nodes[0].children.push(child);
        Arc::new(doc)
    }

    /// Builds a tree whose root is the element itself (no document node).
    pub fn from_element(root: ElementBuf) -> Arc<XmlDocument> {
        let mut doc = XmlDocument { nodes: Vec::new(), uri: None };
        doc.push_element(root, None);
        Arc::new(doc)
    }

    /// Builds a document node from arbitrary content; the content must hold
    /// exactly one element, and whitespace-only text around it is dropped.
    pub fn document_from_content(content: Vec<Fragment>, uri: Option<String>) -> Result<Arc<XmlDocument>, XmlError> {
        let mut elements = Vec::new();
        let mut others = 0;
        for frag in content {
            match frag {
                Fragment::Element(e) => elements.push(e),
                Fragment::Text(t) if t.trim().is_empty() => {}
                Fragment::Text(_) => others += 1,
            }
        }
        if elements.len() != 1 || others != 0 {
            return Err(XmlError::DocumentShape(elements.len() + others));
        }
        Ok(XmlDocument::from_root(elements.pop().unwrap(), uri))
    }

    fn push_element(&mut self, el: ElementBuf, parent: Option<NodeId>) -> NodeId {
        let id = NodeId(self.nodes.len());
        self.nodes.push(NodeData {
            kind: NodeKind::Element(el.name),
            parent,
            children: Vec::new(),
            attributes: Vec::new(),
            namespaces: el.namespaces,
        });
        for (name, value) in el.attributes {
            let aid = NodeId(self.nodes.len());
            self.nodes.push(NodeData {
                kind: NodeKind::Attribute(name, value),
                parent: Some(id),
                children: Vec::new(),
                attributes: Vec::new(),
                namespaces: Vec::new(),
            });
            self.nodes[id.0].attributes.push(aid);
        }
        for child in el.children {
            let cid = match child {
                Fragment::Element(e) => self.push_element(e, Some(id)),
                Fragment::Text(t) => {
                    let tid = NodeId(self.nodes.len());
                    self.nodes.push(NodeData {
                        kind: NodeKind::Text(t),
                        parent: Some(id),
                        children: Vec::new(),
                        attributes: Vec::new(),
                        namespaces: Vec::new(),
                    });
                    tid
                }
            };
            self.nodes[id.0].children.push(cid);
        }
        id
    }

    pub fn uri(&self) -> Option<&str> {
        self.uri.as_deref()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn root_id(&self) -> NodeId {
        NodeId(0)
    }

    pub fn kind(&self, id: NodeId) -> &NodeKind {
        &self.nodes[id.0].kind
    }

    pub fn parent(&self, id: NodeId) -> Option<NodeId> {
        self.nodes[id.0].parent
    }

    pub fn children(&self, id: NodeId) -> &[NodeId] {
        &self.nodes[id.0].children
    }

    pub fn attributes(&self, id: NodeId) -> &[NodeId] {
        &self.nodes[id.0].attributes
    }

    pub fn namespace_decls(&self, id: NodeId) -> &[(Option<String>, String)] {
        &self.nodes[id.0].namespaces
    }
}

/// A handle on one node of a shared document.
#[derive(Clone)]
pub struct NodeRef {
    doc: Arc<XmlDocument>,
    id: NodeId,
}

impl PartialEq for NodeRef {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.doc, &other.doc) && self.id == other.id
    }
}

impl Eq for NodeRef {}

impl fmt::Debug for NodeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NodeRef({:?}, {:?})", self.id, self.kind())
    }
}

impl NodeRef {
    pub fn new(doc: Arc<XmlDocument>, id: NodeId) -> Self {
        NodeRef { doc, id }
    }

    pub fn root_of(doc: &Arc<XmlDocument>) -> Self {
        NodeRef { doc: Arc::clone(doc), id: NodeId(0) }
    }

    pub fn document(&self) -> &Arc<XmlDocument> {
        &self.doc
    }

    pub fn id(&self) -> NodeId {
        self.id
    }

    pub fn same_document(&self, other: &NodeRef) -> bool {
        Arc::ptr_eq(&self.doc, &other.doc)
    }

    pub fn kind(&self) -> &NodeKind {
        self.doc.kind(self.id)
    }

    pub fn is_document(&self) -> bool {
        matches!(self.kind(), NodeKind::Document)
    }

    pub fn is_element(&self) -> bool {
        matches!(self.kind(), NodeKind::Element(_))
    }

    pub fn name(&self) -> Option<&QName> {
        match self.kind() {
            NodeKind::Element(n) | NodeKind::Attribute(n, _) => Some(n),
            _ => None,
        }
    }

    fn wrap(&self, id: NodeId) -> NodeRef {
        NodeRef { doc: Arc::clone(&self.doc), id }
    }

    pub fn parent(&self) -> Option<NodeRef> {
        self.doc.parent(self.id).map(|p| self.wrap(p))
    }

    pub fn root(&self) -> NodeRef {
        self.wrap(NodeId(0))
    }

    pub fn children(&self) -> impl Iterator<Item = NodeRef> + '_ {
        self.doc.children(self.id).iter().map(|&c| self.wrap(c))
    }

    pub fn attributes(&self) -> impl Iterator<Item = NodeRef> + '_ {
        self.doc.attributes(self.id).iter().map(|&c| self.wrap(c))
    }

    pub fn element_children(&self) -> impl Iterator<Item = NodeRef> + '_ {
        self.children().filter(NodeRef::is_element)
    }

    /// Value of the attribute with the given expanded name.
    pub fn attribute(&self, namespace: Option<&str>, local: &str) -> Option<String> {
        self.attributes().find_map(|a| match a.kind() {
            NodeKind::Attribute(n, v) if n.matches(namespace, local) => Some(v.clone()),
            _ => None,
        })
    }

    /// First element child for the given document root, skipping the document node.
    pub fn document_element(&self) -> Option<NodeRef> {
        let root = self.root();
        if root.is_document() {
            root.element_children().next()
        } else {
            Some(root)
        }
    }

    /// Concatenated descendant text (XPath string value).
    pub fn string_value(&self) -> String {
        match self.kind() {
            NodeKind::Text(t) | NodeKind::Attribute(_, t) => t.clone(),
            NodeKind::Element(_) | NodeKind::Document => {
                let mut out = String::new();
                self.collect_text(&mut out);
                out
            }
        }
    }

    fn collect_text(&self, out: &mut String) {
        for child in self.children() {
            match child.kind() {
                NodeKind::Text(t) => out.push_str(t),
                NodeKind::Element(_) => child.collect_text(out),
                _ => {}
            }
        }
    }

    /// Namespace bindings in scope at this node, innermost last.
    pub fn in_scope_namespaces(&self) -> Vec<(Option<String>, String)> {
        let mut chain = Vec::new();
        let mut cur = Some(self.clone());
        while let Some(n) = cur {
            chain.push(n.clone());
            cur = n.parent();
        }
        let mut out = Vec::new();
        for n in chain.iter().rev() {
            out.extend(n.doc.namespace_decls(n.id).iter().cloned());
        }
        out
    }

    /// Deep copy into an owned fragment. Document nodes copy as their content.
    pub fn to_fragments(&self) -> Vec<Fragment> {
        match self.kind() {
            NodeKind::Document => self.children().flat_map(|c| c.to_fragments()).collect(),
            NodeKind::Text(t) => vec![Fragment::Text(t.clone())],
            NodeKind::Attribute(..) => Vec::new(),
            NodeKind::Element(_) => vec![Fragment::Element(self.to_element_buf())],
        }
    }

    /// Deep copy of an element node. Panics on non-elements.
    pub fn to_element_buf(&self) -> ElementBuf {
        let NodeKind::Element(name) = self.kind() else {
            panic!("to_element_buf called on a non-element node");
        };
        ElementBuf {
            name: name.clone(),
            namespaces: self.doc.namespace_decls(self.id).to_vec(),
            attributes: self
                .attributes()
                .filter_map(|a| match a.kind() {
                    NodeKind::Attribute(n, v) => Some((n.clone(), v.clone())),
                    _ => None,
                })
                .collect(),
            children: self.children().flat_map(|c| c.to_fragments()).collect(),
        }
    }
}

/// Owned element used to assemble trees before freezing them.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementBuf {
    pub name: QName,
    pub namespaces: Vec<(Option<String>, String)>,
    pub attributes: Vec<(QName, String)>,
    pub children: Vec<Fragment>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Fragment {
    Element(ElementBuf),
    Text(String),
}

impl ElementBuf {
    pub fn new(name: QName) -> Self {
        ElementBuf { name, namespaces: Vec::new(), attributes: Vec::new(), children: Vec::new() }
    }

    pub fn attr(mut self, name: QName, value: impl Into<String>) -> Self {
        self.attributes.push((name, value.into()));
        self
    }

    pub fn child(mut self, child: ElementBuf) -> Self {
        self.children.push(Fragment::Element(child));
        self
    }

    pub fn text(mut self, text: impl Into<String>) -> Self {
        let text = text.into();
        if !text.is_empty() {
            self.children.push(Fragment::Text(text));
        }
        self
    }

    pub fn declare(mut self, prefix: Option<&str>, namespace: &str) -> Self {
        self.namespaces.push((prefix.map(str::to_string), namespace.to_string()));
        self
    }

    pub fn push(&mut self, child: Fragment) {
        self.children.push(child);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qname_equality_ignores_prefix() {
        let a = QName::ns("urn:x", "a", "n");
        let b = QName::ns("urn:x", "b", "n");
        assert_eq!(a, b);
        assert_ne!(a, QName::local("n"));
    }

    #[test]
    fn ncname_rules() {
        assert!(is_ncname("friend_of"));
        assert!(is_ncname("_x1.y-z"));
        assert!(!is_ncname("1abc"));
        assert!(!is_ncname("a:b"));
        assert!(!is_ncname(""));
        assert!(QName::new(None, "2x", None).is_err());
    }

    #[test]
    fn arena_is_in_document_order() {
        let root = ElementBuf::new(QName::local("a"))
            .attr(QName::local("k"), "v")
            .child(ElementBuf::new(QName::local("b")).text("t"))
            .child(ElementBuf::new(QName::local("c")));
        let doc = XmlDocument::from_root(root, None);
        let kinds: Vec<_> = (0..doc.len()).map(|i| doc.kind(NodeId(i)).clone()).collect();
        assert!(matches!(kinds[0], NodeKind::Document));
        assert!(matches!(&kinds[1], NodeKind::Element(n) if n.local_name() == "a"));
        assert!(matches!(&kinds[2], NodeKind::Attribute(n, v) if n.local_name() == "k" && v == "v"));
        assert!(matches!(&kinds[3], NodeKind::Element(n) if n.local_name() == "b"));
        assert!(matches!(&kinds[4], NodeKind::Text(t) if t == "t"));
        assert!(matches!(&kinds[5], NodeKind::Element(n) if n.local_name() == "c"));
        let root = NodeRef::root_of(&doc);
        assert_eq!(root.string_value(), "t");
        let b = root.document_element().unwrap().element_children().next().unwrap();
        assert_eq!(b.parent().unwrap().name().unwrap().local_name(), "a");
    }

    #[test]
    fn document_content_must_have_one_element() {
        let e = ElementBuf::new(QName::local("a"));
        assert!(XmlDocument::document_from_content(
            vec![Fragment::Text("  ".into()), Fragment::Element(e.clone())],
            None
        )
        .is_ok());
        assert_eq!(
            XmlDocument::document_from_content(vec![Fragment::Element(e.clone()), Fragment::Element(e)], None)
                .unwrap_err(),
            XmlError::DocumentShape(2)
        );
    }
}
