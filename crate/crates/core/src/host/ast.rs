use std::sync::Arc;

use crate::xml::{NamespaceEnv, QName, Step};

#[derive(Debug, Clone, PartialEq)]
pub struct Program {
    pub namespaces: Vec<(String, String)>,
    pub variables: Vec<(String, Expr)>,
    pub body: Expr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompareOp {
    Eq,
    Ne,
}

/// Expanded function name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FnName {
    pub namespace: String,
    pub local: String,
    /// As written, for messages.
    pub lexical: String,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    StringLit(String),
    NumLit(f64),
    VarRef(String),
    ContextItem,
    /// Root of the tree holding the context item.
    Root,
    Sequence(Vec<Expr>),
    Let {
        var: String,
        value: Box<Expr>,
        body: Box<Expr>,
    },
    For {
        var: String,
        input: Box<Expr>,
        body: Box<Expr>,
    },
    If {
        cond: Box<Expr>,
        then: Box<Expr>,
        otherwise: Box<Expr>,
    },
    Path {
        start: Box<Expr>,
        steps: Vec<Step>,
        env: Arc<NamespaceEnv>,
    },
    ElemCtor(ElemCtor),
    DocCtor(Box<Expr>),
    FnCall {
        name: FnName,
        args: Vec<Expr>,
    },
    Union(Box<Expr>, Box<Expr>),
    Compare(CompareOp, Box<Expr>, Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ElemCtor {
    pub name: QName,
    pub namespaces: Vec<(Option<String>, String)>,
    pub attributes: Vec<(QName, Vec<AttrPart>)>,
    pub content: Vec<Content>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum AttrPart {
    Text(String),
    Expr(Expr),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Content {
    Text(String),
    Expr(Expr),
    Elem(ElemCtor),
}
