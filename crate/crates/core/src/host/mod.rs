//! The host language: a FLWOR subset with XML constructors and paths, plus
//! builtins that run SPARQL queries, load ontologies and call the reasoner.
//!
//! Builtins return values rather than file names. With
//! [`Environment::temp_files`] set, the document-returning builtins instead
//! write their result to a temporary file and return its path, which
//! `doc()` then reads back.

mod ast;
mod builtins;
mod eval;
mod parser;

use std::fmt;
use std::path::PathBuf;
use std::sync::Arc;

use thiserror::Error;

use crate::owl::Ontology;
use crate::reasoner::Reasoner;
use crate::xml::{serialize_node, NodeKind, NodeRef};

pub use ast::{AttrPart, CompareOp, Content, ElemCtor, Expr, FnName, Program};
pub use eval::evaluate;
pub use parser::{parse_program, FN_NS, FUNCTX_NS, SW_NS, XQOWL_NS};

#[derive(Debug, Error)]
pub enum HostError {
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("undeclared namespace prefix `{prefix}` at {line}:{column}")]
    Namespace { prefix: String, line: usize, column: usize },
    #[error("unbound variable ${0}")]
    UnboundVariable(String),
    #[error("type error: {0}")]
    Type(String),
    #[error("{name}: {message}")]
    Builtin { name: String, message: String },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

/// One item of a sequence.
#[derive(Clone)]
pub enum Item {
    String(String),
    Number(f64),
    Boolean(bool),
    Node(NodeRef),
    Ontology(Arc<Ontology>),
    Reasoner(Arc<Reasoner>),
}

pub type Sequence = Vec<Item>;

pub(crate) fn format_number(n: f64) -> String {
    if n.fract() == 0.0 && n.abs() < 1e15 {
        format!("{}", n as i64)
    } else {
        format!("{n}")
    }
}

impl Item {
    /// Atomized string form. Handles have no string value and print a tag.
    pub fn string_value(&self) -> String {
        match self {
            Item::String(s) => s.clone(),
            Item::Number(n) => format_number(*n),
            Item::Boolean(b) => b.to_string(),
            Item::Node(n) => n.string_value(),
            Item::Ontology(o) => format!("[ontology {}]", o.iri),
            Item::Reasoner(r) => format!("[reasoner {}]", r.profile().name()),
        }
    }

    pub fn as_node(&self) -> Option<&NodeRef> {
        match self {
            Item::Node(n) => Some(n),
            _ => None,
        }
    }
}

impl fmt::Debug for Item {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Item::String(s) => write!(f, "{s:?}"),
            Item::Number(n) => write!(f, "{}", format_number(*n)),
            Item::Boolean(b) => write!(f, "{b}()"),
            Item::Node(n) => write!(f, "{n:?}"),
            Item::Ontology(_) | Item::Reasoner(_) => f.write_str(&self.string_value()),
        }
    }
}

/// Evaluation context: where relative file names resolve, the initial
/// context item, and values for declared variables supplied from outside.
#[derive(Debug, Clone, Default)]
pub struct Environment {
    pub base_dir: PathBuf,
    pub context: Option<NodeRef>,
    /// Overrides the initializer of a `declare variable` with the same name.
    pub external: Vec<(String, Sequence)>,
    pub temp_files: bool,
}

impl Environment {
    pub fn new(base_dir: impl Into<PathBuf>) -> Self {
        Environment { base_dir: base_dir.into(), ..Default::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Xml,
    Text,
}

/// One line (or block) per item. Text format prints string values only.
pub fn render_sequence(seq: &[Item], format: OutputFormat) -> String {
    let mut lines = Vec::new();
    for item in seq {
        lines.push(match (item, format) {
            (Item::Node(n), OutputFormat::Xml) if !matches!(n.kind(), NodeKind::Text(_) | NodeKind::Attribute(..)) => {
                serialize_node(n, true).trim_end().to_string()
            }
            _ => item.string_value(),
        });
    }
    let mut out = lines.join("\n");
    if !out.is_empty() {
        out.push('\n');
    }
    out
}

/// Parses and evaluates a program in one go.
pub fn run_program(text: &str, env: &Environment) -> Result<Sequence, HostError> {
    evaluate(&parse_program(text)?, env)
}
