use std::path::Path;
use std::sync::Arc;

use super::ast::FnName;
use super::eval::{effective_boolean, Evaluator};
use super::parser::{FN_NS, FUNCTX_NS, SW_NS, XQOWL_NS};
use super::{HostError, Item, Sequence};
use crate::owl::{axioms_to_xml, entities_to_xml, load_ontology, ClassExpr, Ontology};
use crate::rdf::vocab::{OWL, RDF, XSD};
use crate::rdf::{parse_rdfxml, parse_rdfxml_document, write_sparql_results, Iri, RdfGraph};
use crate::reasoner::{Profile, Reasoner};
use crate::sparql::{eval_select, parse_sparql};
use crate::xml::{
    is_ncname, parse_xml_with_uri, serialize_node, serialize_xml, ElementBuf, NodeRef, QName, XmlDocument,
};

const MANY: usize = usize::MAX;

const SIGNATURES: &[(&str, &str, usize, usize)] = &[
    (FN_NS, "concat", 1, MANY),
    (FN_NS, "substring-after", 2, 2),
    (FN_NS, "substring-before", 2, 2),
    (FN_NS, "contains", 2, 2),
    (FN_NS, "starts-with", 2, 2),
    (FN_NS, "ends-with", 2, 2),
    (FN_NS, "data", 1, 1),
    (FN_NS, "string", 1, 1),
    (FN_NS, "normalize-space", 1, 1),
    (FN_NS, "string-join", 2, 2),
    (FN_NS, "count", 1, 1),
    (FN_NS, "empty", 1, 1),
    (FN_NS, "exists", 1, 1),
    (FN_NS, "not", 1, 1),
    (FN_NS, "boolean", 1, 1),
    (FN_NS, "true", 0, 0),
    (FN_NS, "false", 0, 0),
    (FN_NS, "doc", 1, 1),
    (FN_NS, "put", 2, 2),
    (FUNCTX_NS, "fragment-from-uri", 1, 1),
    (SW_NS, "ID", 1, 1),
    (SW_NS, "toClassFiller", 2, 2),
    (SW_NS, "toDataFiller", 4, 4),
    (SW_NS, "toObjectFiller", 3, 3),
    (XQOWL_NS, "sparql", 2, 2),
    (XQOWL_NS, "load", 1, 1),
    (XQOWL_NS, "reasoner", 1, 2),
    (XQOWL_NS, "consistent", 1, 1),
    (XQOWL_NS, "clashes", 1, 1),
    (XQOWL_NS, "instances", 2, 2),
    (XQOWL_NS, "subclasses", 2, 3),
    (XQOWL_NS, "property-values", 3, 3),
    (XQOWL_NS, "instance-of", 3, 3),
    (XQOWL_NS, "holds", 4, 4),
    (XQOWL_NS, "subsumed", 3, 3),
    (XQOWL_NS, "axioms", 1, 1),
    (XQOWL_NS, "class-axioms", 2, 2),
    (XQOWL_NS, "dispose", 1, 1),
];

pub(crate) fn exists(namespace: &str, local: &str, arity: usize) -> bool {
    SIGNATURES.iter().any(|(ns, l, min, max)| *ns == namespace && *l == local && (*min..=*max).contains(&arity))
}

fn err(name: &FnName, message: impl Into<String>) -> HostError {
    HostError::Builtin { name: name.lexical.clone(), message: message.into() }
}

/// Zero or one atomized string.
fn opt_string(name: &FnName, seq: &[Item]) -> Result<Option<String>, HostError> {
    match seq {
        [] => Ok(None),
        [item] => match item {
            Item::Ontology(_) | Item::Reasoner(_) => Err(err(name, "expected a string, got a handle")),
            _ => Ok(Some(item.string_value())),
        },
        _ => Err(err(name, format!("expected at most one value, got {}", seq.len()))),
    }
}

fn string(name: &FnName, seq: &[Item]) -> Result<String, HostError> {
    Ok(opt_string(name, seq)?.unwrap_or_default())
}

fn required(name: &FnName, seq: &[Item]) -> Result<String, HostError> {
    opt_string(name, seq)?.ok_or_else(|| err(name, "missing argument value"))
}

fn ontology_arg(name: &FnName, seq: &[Item]) -> Result<Arc<Ontology>, HostError> {
    match seq {
        [Item::Ontology(o)] => Ok(o.clone()),
        [Item::Reasoner(r)] => Ok(r.ontology().clone()),
        _ => Err(err(name, "expected an ontology handle")),
    }
}

fn reasoner_arg(name: &FnName, seq: &[Item]) -> Result<Arc<Reasoner>, HostError> {
    match seq {
        [Item::Reasoner(r)] => Ok(r.clone()),
        _ => Err(err(name, "expected a reasoner handle")),
    }
}

fn node(doc: Arc<XmlDocument>) -> Item {
    Item::Node(NodeRef::root_of(&doc))
}

fn element(el: ElementBuf) -> Item {
    node(XmlDocument::from_element(el))
}

fn entity_items(iris: impl IntoIterator<Item = Iri>, wrapper: &str, item: &str) -> Sequence {
    let iris: Vec<Iri> = iris.into_iter().collect();
    entities_to_xml(&iris, QName::local(wrapper), QName::local(item)).into_iter().map(Item::Node).collect()
}

fn owl_name(local: &str) -> QName {
    QName::ns(OWL, "owl", local)
}

fn rdf_name(local: &str) -> QName {
    QName::ns(RDF, "rdf", local)
}

/// Property element name for a filler: bare names stay unqualified and so
/// resolve against the base of the enclosing RDF/XML document.
fn property_name(name: &FnName, prop: &str) -> Result<QName, HostError> {
    let prop = prop.strip_prefix('#').unwrap_or(prop);
    if is_ncname(prop) {
        return Ok(QName::local(prop));
    }
    let iri = Iri::new(prop);
    let (ns, local) = (iri.namespace(), iri.fragment());
    if !ns.is_empty() && is_ncname(local) {
        QName::new(Some(ns), local, Some("p")).map_err(|e| err(name, e.to_string()))
    } else {
        Err(err(name, format!("`{prop}` cannot name a property element")))
    }
}

fn individual(id: &str) -> ElementBuf {
    ElementBuf::new(owl_name("NamedIndividual")).attr(rdf_name("about"), id)
}

impl Evaluator<'_> {
    fn load_doc(&mut self, name: &FnName, file: &str) -> Result<Arc<XmlDocument>, HostError> {
        let path = self.resolve_path(file);
        if let Some(d) = self.docs.get(&path) {
            return Ok(d.clone());
        }
        let text = read(&path)?;
        let uri = format!("file://{}", path.display());
        let doc = parse_xml_with_uri(&text, Some(uri)).map_err(|e| err(name, format!("{}: {e}", path.display())))?;
        self.docs.insert(path, doc.clone());
        Ok(doc)
    }

    fn load_graph(&mut self, name: &FnName, source: &Item) -> Result<Arc<RdfGraph>, HostError> {
        match source {
            Item::Node(n) => {
                let base = n.document().uri().unwrap_or("urn:x-document").to_string();
                let graph = parse_rdfxml_document(n, &base).map_err(|e| err(name, e.to_string()))?;
                Ok(Arc::new(graph))
            }
            Item::String(file) => {
                let path = self.resolve_path(file);
                if let Some(g) = self.graphs.get(&path) {
                    return Ok(g.clone());
                }
                let text = read(&path)?;
                let base = format!("file://{}", path.display());
                let graph =
                    Arc::new(parse_rdfxml(&text, &base).map_err(|e| err(name, format!("{}: {e}", path.display())))?);
                self.graphs.insert(path, graph.clone());
                Ok(graph)
            }
            _ => Err(err(name, "expected a file name or a document")),
        }
    }

    fn load_ont(&mut self, name: &FnName, source: &Item) -> Result<Arc<Ontology>, HostError> {
        let key = match source {
            Item::String(file) => Some(self.resolve_path(file)),
            _ => None,
        };
        if let Some(o) = key.as_ref().and_then(|k| self.ontologies.get(k)) {
            return Ok(o.clone());
        }
        let graph = self.load_graph(name, source)?;
        let ont = Arc::new(load_ontology(&graph).map_err(|e| err(name, e.to_string()))?);
        if let Some(k) = key {
            self.ontologies.insert(k, ont.clone());
        }
        Ok(ont)
    }

    /// A document result, or the path of a temporary copy in temp-file mode.
    fn output(&mut self, name: &FnName, doc: Arc<XmlDocument>) -> Result<Item, HostError> {
        if !self.env.temp_files {
            return Ok(node(doc));
        }
        if self.temp.is_none() {
            self.temp = Some(tempfile::tempdir().map_err(|e| err(name, e.to_string()))?);
        }
        self.temp_count += 1;
        let path = self.temp.as_ref().unwrap().path().join(format!("result{}.xml", self.temp_count));
        write(&path, &serialize_xml(&doc, true))?;
        Ok(Item::String(path.display().to_string()))
    }
}

fn read(path: &Path) -> Result<String, HostError> {
    std::fs::read_to_string(path)
        .map_err(|e| HostError::Io { path: path.display().to_string(), message: e.to_string() })
}

fn write(path: &Path, text: &str) -> Result<(), HostError> {
    std::fs::write(path, text).map_err(|e| HostError::Io { path: path.display().to_string(), message: e.to_string() })
}

pub(crate) fn call(ev: &mut Evaluator<'_>, name: &FnName, args: Vec<Sequence>) -> Result<Sequence, HostError> {
    let a = &args;
    let one = |v: Item| Ok(vec![v]);
    let text = |s: String| Ok(vec![Item::String(s)]);
    let boolean = |b: bool| Ok(vec![Item::Boolean(b)]);
    match (name.namespace.as_str(), name.local.as_str()) {
        (FN_NS, "concat") => {
            let mut out = String::new();
            for arg in a {
                out.push_str(&string(name, arg)?);
            }
            text(out)
        }
        (FN_NS, "substring-after") => {
            let (s, pat) = (string(name, &a[0])?, string(name, &a[1])?);
            text(s.find(&pat).map(|i| s[i + pat.len()..].to_string()).unwrap_or_default())
        }
        (FN_NS, "substring-before") => {
            let (s, pat) = (string(name, &a[0])?, string(name, &a[1])?);
            text(s.find(&pat).map(|i| s[..i].to_string()).unwrap_or_default())
        }
        (FN_NS, "contains") => boolean(string(name, &a[0])?.contains(&string(name, &a[1])?)),
        (FN_NS, "starts-with") => boolean(string(name, &a[0])?.starts_with(&string(name, &a[1])?)),
        (FN_NS, "ends-with") => boolean(string(name, &a[0])?.ends_with(&string(name, &a[1])?)),
        (FN_NS, "data") => Ok(a[0]
            .iter()
            .map(|i| match i {
                Item::Node(n) => Item::String(n.string_value()),
                other => other.clone(),
            })
            .collect()),
        (FN_NS, "string") => text(string(name, &a[0])?),
        (FN_NS, "normalize-space") => text(string(name, &a[0])?.split_whitespace().collect::<Vec<_>>().join(" ")),
        (FN_NS, "string-join") => {
            let parts: Vec<String> = a[0].iter().map(Item::string_value).collect();
            text(parts.join(&string(name, &a[1])?))
        }
        (FN_NS, "count") => one(Item::Number(a[0].len() as f64)),
        (FN_NS, "empty") => boolean(a[0].is_empty()),
        (FN_NS, "exists") => boolean(!a[0].is_empty()),
        (FN_NS, "not") => boolean(!effective_boolean(&a[0])?),
        (FN_NS, "boolean") => boolean(effective_boolean(&a[0])?),
        (FN_NS, "true") => boolean(true),
        (FN_NS, "false") => boolean(false),
        (FN_NS, "doc") => match a[0].as_slice() {
            [] => Ok(vec![]),
            [Item::Node(n)] => one(Item::Node(n.root())),
            [item] => {
                let file = item.string_value();
                one(node(ev.load_doc(name, &file)?))
            }
            _ => Err(err(name, "expected one file name")),
        },
        (FN_NS, "put") => {
            // Either argument order: put(file, node) or put(node, file).
            let (target, file) = match (a[0].as_slice(), a[1].as_slice()) {
                ([Item::Node(n)], f) | (f, [Item::Node(n)]) => (n.clone(), required(name, f)?),
                _ => return Err(err(name, "expected a file name and a single node")),
            };
            let path = ev.resolve_path(&file);
            let out = if target.is_document() {
                serialize_xml(target.document(), true)
            } else {
                serialize_node(&target, true)
            };
            write(&path, &out)?;
            ev.docs.remove(&path);
            ev.graphs.remove(&path);
            ev.ontologies.remove(&path);
            Ok(vec![])
        }
        (FUNCTX_NS, "fragment-from-uri") => match opt_string(name, &a[0])? {
            None => Ok(vec![]),
            Some(s) => text(s.rsplit_once('#').map(|(_, f)| f.to_string()).unwrap_or_default()),
        },
        (SW_NS, "ID") => match opt_string(name, &a[0])? {
            None => Ok(vec![]),
            Some(s) => text(format!("#{s}")),
        },
        (SW_NS, "toClassFiller") => {
            let (Some(id), Some(class)) = (opt_string(name, &a[0])?, opt_string(name, &a[1])?) else {
                return Ok(vec![]);
            };
            let el = individual(&id).child(ElementBuf::new(rdf_name("type")).attr(rdf_name("resource"), &class));
            one(element(el))
        }
        (SW_NS, "toDataFiller") => {
            let (Some(id), Some(prop), Some(value)) =
                (opt_string(name, &a[0])?, opt_string(name, &a[1])?, opt_string(name, &a[2])?)
            else {
                return Ok(vec![]);
            };
            let datatype = string(name, &a[3])?;
            let datatype = if datatype.contains(':') { datatype } else { format!("{XSD}{datatype}") };
            let prop =
                ElementBuf::new(property_name(name, &prop)?).attr(rdf_name("datatype"), &datatype).text(value.trim());
            one(element(individual(&id).child(prop)))
        }
        (SW_NS, "toObjectFiller") => {
            let (Some(id), Some(prop), Some(target)) =
                (opt_string(name, &a[0])?, opt_string(name, &a[1])?, opt_string(name, &a[2])?)
            else {
                return Ok(vec![]);
            };
            let prop = ElementBuf::new(property_name(name, &prop)?).attr(rdf_name("resource"), &target);
            one(element(individual(&id).child(prop)))
        }
        (XQOWL_NS, "sparql") => {
            let source = match a[0].as_slice() {
                [item] => item.clone(),
                _ => return Err(err(name, "expected one file name or document")),
            };
            let graph = ev.load_graph(name, &source)?;
            let query = parse_sparql(&required(name, &a[1])?).map_err(|e| err(name, e.to_string()))?;
            let doc = write_sparql_results(&eval_select(&graph, &query));
            Ok(vec![ev.output(name, doc)?])
        }
        (XQOWL_NS, "load") => match a[0].as_slice() {
            [item @ (Item::String(_) | Item::Node(_))] => one(Item::Ontology(ev.load_ont(name, item)?)),
            _ => Err(err(name, "expected one file name or document")),
        },
        (XQOWL_NS, "reasoner") => {
            let ont = ontology_arg(name, &a[0])?;
            let profile = match a.get(1) {
                Some(p) => required(name, p)?.parse::<Profile>().map_err(|e| err(name, e.to_string()))?,
                None => Profile::Hermit,
            };
            one(Item::Reasoner(Arc::new(Reasoner::new(ont, profile))))
        }
        (XQOWL_NS, "consistent") => boolean(reasoner_arg(name, &a[0])?.is_consistent()),
        (XQOWL_NS, "clashes") => {
            let r = reasoner_arg(name, &a[0])?;
            let mut out = Vec::new();
            for c in r.clashes() {
                let mut el = ElementBuf::new(QName::local("clash")).attr(QName::local("kind"), c.kind.name());
                for culprit in &c.culprits {
                    el = el.child(ElementBuf::new(QName::local("culprit")).text(culprit.as_str()));
                }
                out.push(element(el));
            }
            Ok(out)
        }
        (XQOWL_NS, "instances") => {
            let r = reasoner_arg(name, &a[0])?;
            let class = ClassExpr::named(r.ontology().resolve_name(&required(name, &a[1])?));
            let found = r.instances(&class).map_err(|e| err(name, e.to_string()))?;
            Ok(entity_items(found, "instances", "instance"))
        }
        (XQOWL_NS, "subclasses") => {
            let r = reasoner_arg(name, &a[0])?;
            let class = ClassExpr::named(r.ontology().resolve_name(&required(name, &a[1])?));
            let direct = match a.get(2) {
                Some(d) => effective_boolean(d)?,
                None => false,
            };
            Ok(entity_items(r.subclasses(&class, direct), "classes", "class"))
        }
        (XQOWL_NS, "property-values") => {
            let r = reasoner_arg(name, &a[0])?;
            let ind = r.ontology().resolve_name(&required(name, &a[1])?);
            let prop = r.ontology().resolve_name(&required(name, &a[2])?);
            let found = r.property_values(&ind, &prop).map_err(|e| err(name, e.to_string()))?;
            Ok(entity_items(found, "values", "value"))
        }
        (XQOWL_NS, "instance-of") => {
            let r = reasoner_arg(name, &a[0])?;
            let ind = r.ontology().resolve_name(&required(name, &a[1])?);
            let class = ClassExpr::named(r.ontology().resolve_name(&required(name, &a[2])?));
            boolean(r.is_instance_of(&ind, &class).map_err(|e| err(name, e.to_string()))?)
        }
        (XQOWL_NS, "holds") => {
            let r = reasoner_arg(name, &a[0])?;
            let ont = r.ontology().clone();
            let (s, p, o) = (
                ont.resolve_name(&required(name, &a[1])?),
                ont.resolve_name(&required(name, &a[2])?),
                ont.resolve_name(&required(name, &a[3])?),
            );
            boolean(r.holds(&s, &p, &o).map_err(|e| err(name, e.to_string()))?)
        }
        (XQOWL_NS, "subsumed") => {
            let r = reasoner_arg(name, &a[0])?;
            let c = ClassExpr::named(r.ontology().resolve_name(&required(name, &a[1])?));
            let d = ClassExpr::named(r.ontology().resolve_name(&required(name, &a[2])?));
            boolean(r.is_subsumed(&c, &d))
        }
        (XQOWL_NS, "axioms") => {
            let ont = ontology_arg(name, &a[0])?;
            let doc = axioms_to_xml(&ont, None).map_err(|e| err(name, e.to_string()))?;
            Ok(vec![ev.output(name, doc)?])
        }
        (XQOWL_NS, "class-axioms") => {
            let ont = ontology_arg(name, &a[0])?;
            let subject = ont.resolve_name(&required(name, &a[1])?);
            let doc = axioms_to_xml(&ont, Some(&subject)).map_err(|e| err(name, e.to_string()))?;
            Ok(vec![ev.output(name, doc)?])
        }
        (XQOWL_NS, "dispose") => Ok(vec![]),
        _ => Err(err(name, "unknown function")),
    }
}
