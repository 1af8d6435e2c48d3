//! Recursive-descent parser for host programs.
//!
//! ```text
//! Program   ::= (Decl ";")* Expr
//! Decl      ::= "declare" "namespace" NCName "=" String
//!             | "declare" "variable" "$" Name ":=" ExprSingle
//! Expr      ::= ExprSingle ("," ExprSingle)*
//! ExprSingle::= FLWOR | If | Or
//! FLWOR     ::= (For | Let)+ ("where" ExprSingle)? "return" ExprSingle
//! For       ::= "for" "$" Name "in" ExprSingle ("," "$" Name "in" ExprSingle)*
//! Let       ::= "let" "$" Name ":=" ExprSingle ("," "$" Name ":=" ExprSingle)*
//! If        ::= "if" "(" Expr ")" "then" ExprSingle "else" ExprSingle
//! Or        ::= And ("or" And)*
//! And       ::= Compare ("and" Compare)*
//! Compare   ::= Union (("=" | "!=") Union)?
//! Union     ::= Path (("union" | "|") Path)*
//! Path      ::= "/" Steps? | Primary ("/" Step)* | Steps
//! Primary   ::= String | Number | "$" Name | "(" Expr? ")" | "." | QName "(" Args ")"
//!             | "document" "{" Expr "}" | DirectElement
//! ```

use std::sync::Arc;

use super::ast::{AttrPart, CompareOp, Content, ElemCtor, Expr, FnName, Program};
use super::builtins;
use super::HostError;
use crate::xml::{Axis, NameTest, NamespaceEnv, NodeTest, Predicate, QName, Step, XML_NS};

pub const FN_NS: &str = "http://www.w3.org/2005/xpath-functions";
pub const XQOWL_NS: &str = "urn:hyq:xqowl";
pub const SW_NS: &str = "urn:hyq:sw";
pub const FUNCTX_NS: &str = "http://www.functx.com";
const XS_NS: &str = "http://www.w3.org/2001/XMLSchema";

pub fn parse_program(text: &str) -> Result<Program, HostError> {
    let mut p = Parser {
        src: text,
        pos: 0,
        scope: vec![
            ("xml".into(), XML_NS.into()),
            ("xs".into(), XS_NS.into()),
            ("fn".into(), FN_NS.into()),
            ("xqowl".into(), XQOWL_NS.into()),
            ("sw".into(), SW_NS.into()),
            ("functx".into(), FUNCTX_NS.into()),
        ],
        default_ns: vec![None],
    };
    let mut namespaces = Vec::new();
    let mut variables = Vec::new();
    loop {
        p.ws()?;
        let save = p.pos;
        if !p.keyword("declare") {
            break;
        }
        p.ws()?;
        if p.keyword("namespace") {
            p.ws()?;
            let prefix = p.ncname()?;
            p.ws()?;
            p.expect("=")?;
            p.ws()?;
            let ns = p.string_lit()?;
            p.scope.push((prefix.clone(), ns.clone()));
            namespaces.push((prefix, ns));
        } else if p.keyword("variable") {
            p.ws()?;
            let name = p.var_name()?;
            p.ws()?;
            p.expect(":=")?;
            let value = p.expr_single()?;
            variables.push((name, value));
        } else {
            p.pos = save;
            return Err(p.error("expected `namespace` or `variable` after `declare`"));
        }
        p.ws()?;
        p.expect(";")?;
    }
    let body = p.expr()?;
    p.ws()?;
    if p.pos != text.len() {
        return Err(p.error("unexpected input after expression"));
    }
    Ok(Program { namespaces, variables, body })
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    /// Prefix bindings, innermost last.
    scope: Vec<(String, String)>,
    /// Default element namespace of each enclosing constructor.
    default_ns: Vec<Option<String>>,
}

const KEYWORDS: [&str; 10] = ["return", "in", "then", "else", "where", "union", "and", "or", "for", "let"];

impl<'a> Parser<'a> {
    fn position(&self, at: usize) -> (usize, usize) {
        let before = &self.src[..at.min(self.src.len())];
        let line = before.matches('\n').count() + 1;
        let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        (line, column)
    }

    fn error_at(&self, at: usize, message: impl Into<String>) -> HostError {
        let (line, column) = self.position(at);
        HostError::Syntax { line, column, message: message.into() }
    }

    fn error(&self, message: impl Into<String>) -> HostError {
        self.error_at(self.pos, message)
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn peek2(&self) -> Option<char> {
        self.rest().chars().nth(1)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn eat(&mut self, s: &str) -> bool {
        if self.rest().starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> Result<(), HostError> {
        if self.eat(s) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{s}`")))
        }
    }

    /// Skips whitespace and `(: … :)` comments, which nest.
    fn ws(&mut self) -> Result<(), HostError> {
        loop {
            let start = self.pos;
            while self.peek().is_some_and(char::is_whitespace) {
                self.bump();
            }
            if self.rest().starts_with("(:") {
                let open = self.pos;
                let mut depth = 0;
                loop {
                    if self.eat("(:") {
                        depth += 1;
                    } else if self.eat(":)") {
                        depth -= 1;
                        if depth == 0 {
                            break;
                        }
                    } else if self.bump().is_none() {
                        return Err(self.error_at(open, "unterminated comment"));
                    }
                }
            }
            if self.pos == start {
                return Ok(());
            }
        }
    }

    fn at_name_char(&self, at: usize) -> bool {
        self.src[at..].chars().next().is_some_and(|c| c.is_alphanumeric() || matches!(c, '_' | '-' | '.'))
    }

    /// Consumes `word` when it is not the prefix of a longer name.
    fn keyword(&mut self, word: &str) -> bool {
        if self.rest().starts_with(word) && !self.at_name_char(self.pos + word.len()) {
            self.pos += word.len();
            true
        } else {
            false
        }
    }

    fn looking_at_keyword(&self, word: &str) -> bool {
        self.rest().starts_with(word) && !self.at_name_char(self.pos + word.len())
    }

    fn ncname(&mut self) -> Result<String, HostError> {
        let start = self.pos;
        match self.peek() {
            Some(c) if c.is_alphabetic() || c == '_' => {
                self.bump();
            }
            _ => return Err(self.error("expected a name")),
        }
        while self.peek().is_some_and(|c| c.is_alphanumeric() || matches!(c, '_' | '-' | '.')) {
            self.bump();
        }
        Ok(self.src[start..self.pos].to_string())
    }

    /// NCName, optionally followed by `:` NCName (not `:=` or `::`).
    fn qname(&mut self) -> Result<(Option<String>, String), HostError> {
        let first = self.ncname()?;
        if self.peek() == Some(':') && self.peek2().is_some_and(|c| c.is_alphabetic() || c == '_') {
            self.bump();
            let local = self.ncname()?;
            Ok((Some(first), local))
        } else {
            Ok((None, first))
        }
    }

    fn var_name(&mut self) -> Result<String, HostError> {
        self.expect("$")?;
        let (prefix, local) = self.qname()?;
        Ok(match prefix {
            Some(p) => format!("{p}:{local}"),
            None => local,
        })
    }

    fn lookup(&self, prefix: &str) -> Option<&str> {
        self.scope.iter().rev().find(|(p, _)| p == prefix).map(|(_, ns)| ns.as_str())
    }

    fn resolve_prefix(&self, prefix: &str, at: usize) -> Result<String, HostError> {
        self.lookup(prefix).map(str::to_string).ok_or_else(|| {
            let (line, column) = self.position(at);
            HostError::Namespace { prefix: prefix.to_string(), line, column }
        })
    }

    fn path_env(&self) -> Arc<NamespaceEnv> {
        let mut env = NamespaceEnv::new();
        for (p, ns) in &self.scope {
            env.bind(p, ns);
        }
        Arc::new(env)
    }

    fn string_lit(&mut self) -> Result<String, HostError> {
        let quote = match self.peek() {
            Some(q @ ('"' | '\'')) => q,
            _ => return Err(self.error("expected a string literal")),
        };
        let open = self.pos;
        self.bump();
        let mut out = String::new();
        loop {
            match self.peek() {
                None => return Err(self.error_at(open, "unterminated string literal")),
                Some(c) if c == quote => {
                    self.bump();
                    if self.peek() == Some(quote) {
                        self.bump();
                        out.push(quote);
                    } else {
                        return Ok(out);
                    }
                }
                Some('&') => out.push(self.reference()?),
                Some(c) => {
                    self.bump();
                    out.push(c);
                }
            }
        }
    }

    fn reference(&mut self) -> Result<char, HostError> {
        let start = self.pos;
        self.expect("&")?;
        let end = self.rest().find(';').ok_or_else(|| self.error_at(start, "unterminated character reference"))?;
        let body = &self.rest()[..end];
        let c = match body {
            "lt" => Some('<'),
            "gt" => Some('>'),
            "amp" => Some('&'),
            "quot" => Some('"'),
            "apos" => Some('\''),
            _ if body.starts_with("#x") => u32::from_str_radix(&body[2..], 16).ok().and_then(char::from_u32),
            _ if body.starts_with('#') => body[1..].parse().ok().and_then(char::from_u32),
            _ => None,
        };
        let c = c.ok_or_else(|| self.error_at(start, format!("unknown reference `&{body};`")))?;
        self.pos += end + 1;
        Ok(c)
    }

    fn expr(&mut self) -> Result<Expr, HostError> {
        let first = self.expr_single()?;
        let mut items = vec![first];
        loop {
            self.ws()?;
            if !self.eat(",") {
                break;
            }
            items.push(self.expr_single()?);
        }
        Ok(if items.len() == 1 { items.pop().unwrap() } else { Expr::Sequence(items) })
    }

    fn expr_single(&mut self) -> Result<Expr, HostError> {
        self.ws()?;
        let save = self.pos;
        if self.keyword("for") || self.keyword("let") {
            self.ws()?;
            let is_clause = self.peek() == Some('$');
            self.pos = save;
            if is_clause {
                return self.flwor();
            }
        }
        if self.keyword("if") {
            self.ws()?;
            if self.peek() == Some('(') {
                return self.if_expr();
            }
            self.pos = save;
        }
        self.or_expr()
    }

    fn flwor(&mut self) -> Result<Expr, HostError> {
        enum Clause {
            For(String, Expr),
            Let(String, Expr),
        }
        let mut clauses = Vec::new();
        loop {
            self.ws()?;
            let is_for = if self.keyword("for") {
                true
            } else if self.keyword("let") {
                false
            } else {
                break;
            };
            loop {
                self.ws()?;
                let var = self.var_name()?;
                self.ws()?;
                if is_for {
                    if !self.keyword("in") {
                        return Err(self.error("expected `in`"));
                    }
                    clauses.push(Clause::For(var, self.expr_single()?));
                } else {
                    self.expect(":=")?;
                    clauses.push(Clause::Let(var, self.expr_single()?));
                }
                self.ws()?;
                if !self.eat(",") {
                    break;
                }
            }
        }
        self.ws()?;
        let filter = if self.keyword("where") { Some(self.expr_single()?) } else { None };
        self.ws()?;
        if !self.keyword("return") {
            return Err(self.error("expected `return`"));
        }
        let mut body = self.expr_single()?;
        if let Some(cond) = filter {
            body = Expr::If {
                cond: Box::new(cond),
                then: Box::new(body),
                otherwise: Box::new(Expr::Sequence(Vec::new())),
            };
        }
        for clause in clauses.into_iter().rev() {
            body = match clause {
                Clause::For(var, input) => Expr::For { var, input: Box::new(input), body: Box::new(body) },
                Clause::Let(var, value) => Expr::Let { var, value: Box::new(value), body: Box::new(body) },
            };
        }
        Ok(body)
    }

    fn if_expr(&mut self) -> Result<Expr, HostError> {
        self.expect("(")?;
        let cond = self.expr()?;
        self.ws()?;
        self.expect(")")?;
        self.ws()?;
        if !self.keyword("then") {
            return Err(self.error("expected `then`"));
        }
        let then = self.expr_single()?;
        self.ws()?;
        if !self.keyword("else") {
            return Err(self.error("expected `else`"));
        }
        let otherwise = self.expr_single()?;
        Ok(Expr::If { cond: Box::new(cond), then: Box::new(then), otherwise: Box::new(otherwise) })
    }

    fn or_expr(&mut self) -> Result<Expr, HostError> {
        let mut left = self.and_expr()?;
        loop {
            self.ws()?;
            if !self.keyword("or") {
                return Ok(left);
            }
            left = Expr::Or(Box::new(left), Box::new(self.and_expr()?));
        }
    }

    fn and_expr(&mut self) -> Result<Expr, HostError> {
        let mut left = self.compare_expr()?;
        loop {
            self.ws()?;
            if !self.keyword("and") {
                return Ok(left);
            }
            left = Expr::And(Box::new(left), Box::new(self.compare_expr()?));
        }
    }

    fn compare_expr(&mut self) -> Result<Expr, HostError> {
        let left = self.union_expr()?;
        self.ws()?;
        let op = if self.eat("!=") {
            CompareOp::Ne
        } else if self.peek() == Some('=') {
            self.bump();
            CompareOp::Eq
        } else {
            return Ok(left);
        };
        let right = self.union_expr()?;
        Ok(Expr::Compare(op, Box::new(left), Box::new(right)))
    }

    fn union_expr(&mut self) -> Result<Expr, HostError> {
        let mut left = self.path_expr()?;
        loop {
            self.ws()?;
            if !(self.keyword("union") || self.eat("|")) {
                return Ok(left);
            }
            left = Expr::Union(Box::new(left), Box::new(self.path_expr()?));
        }
    }

    fn path_expr(&mut self) -> Result<Expr, HostError> {
        self.ws()?;
        let (start, mut steps) = if self.peek() == Some('/') {
            self.bump();
            if self.peek() == Some('/') {
                return Err(self.error("the descendant axis `//` is not supported"));
            }
            self.ws()?;
            let mut steps = Vec::new();
            if self.starts_step() {
                steps.push(self.step()?);
            }
            (Expr::Root, steps)
        } else if self.starts_relative_step() {
            (Expr::ContextItem, vec![self.step()?])
        } else {
            (self.primary()?, Vec::new())
        };
        loop {
            let save = self.pos;
            self.ws()?;
            if self.peek() != Some('/') {
                self.pos = save;
                break;
            }
            self.bump();
            if self.peek() == Some('/') {
                return Err(self.error("the descendant axis `//` is not supported"));
            }
            self.ws()?;
            steps.push(self.step()?);
        }
        if steps.is_empty() {
            return Ok(start);
        }
        Ok(Expr::Path { start: Box::new(start), steps, env: self.path_env() })
    }

    fn starts_step(&self) -> bool {
        match self.peek() {
            Some('@' | '*') => true,
            Some('.') => self.peek2() != Some('.'),
            Some(c) => c.is_alphabetic() || c == '_',
            None => false,
        }
    }

    /// A bare name (not a keyword, not a call) or `@`/`*` starts a path
    /// relative to the context item.
    fn starts_relative_step(&self) -> bool {
        match self.peek() {
            Some('@' | '*') => true,
            Some(c) if c.is_alphabetic() || c == '_' => {
                if KEYWORDS.iter().any(|k| self.looking_at_keyword(k)) || self.looking_at_keyword("document") {
                    return false;
                }
                let mut probe = Parser { src: self.src, pos: self.pos, scope: Vec::new(), default_ns: Vec::new() };
                if probe.qname().is_err() {
                    return false;
                }
                let _ = probe.ws();
                let name = &self.src[self.pos..probe.pos];
                probe.peek() != Some('(') || matches!(name.trim(), "text" | "node")
            }
            _ => false,
        }
    }

    fn name_test(&mut self) -> Result<NameTest, HostError> {
        let at = self.pos;
        let (prefix, local) = self.qname()?;
        if let Some(p) = &prefix {
            self.resolve_prefix(p, at)?;
        }
        Ok(NameTest { prefix, local })
    }

    /// `text()` or `node()`, allowing whitespace before the parentheses.
    fn kind_test(&mut self, word: &str) -> Result<bool, HostError> {
        let save = self.pos;
        if !self.keyword(word) {
            return Ok(false);
        }
        self.ws()?;
        if !self.eat("(") {
            self.pos = save;
            return Ok(false);
        }
        self.ws()?;
        self.expect(")")?;
        Ok(true)
    }

    fn step(&mut self) -> Result<Step, HostError> {
        let mut axis = Axis::Child;
        if self.eat("child::") {
        } else if self.eat("attribute::") {
            axis = Axis::Attribute;
        } else if self.eat("self::") {
            axis = Axis::SelfAxis;
        } else if self.eat("@") {
            axis = Axis::Attribute;
        }
        let test = if self.eat("*") {
            NodeTest::Wildcard
        } else if self.peek() == Some('.') {
            if self.peek2() == Some('.') {
                return Err(self.error("the parent axis `..` is not supported"));
            }
            self.bump();
            axis = Axis::SelfAxis;
            NodeTest::AnyNode
        } else if self.kind_test("text")? {
            NodeTest::Text
        } else if self.kind_test("node")? {
            NodeTest::AnyNode
        } else {
            NodeTest::Name(self.name_test()?)
        };
        let mut predicates = Vec::new();
        loop {
            let save = self.pos;
            self.ws()?;
            if !self.eat("[") {
                self.pos = save;
                break;
            }
            self.ws()?;
            if self.eat("@") {
                let name = self.name_test()?;
                self.ws()?;
                self.expect("=")?;
                self.ws()?;
                let value = self.string_lit()?;
                predicates.push(Predicate::AttributeEquals(name, value));
            } else if self.peek().is_some_and(|c| c.is_alphabetic() || c == '_') {
                predicates.push(Predicate::HasChild(self.name_test()?));
            } else {
                return Err(self.error("only [@name = \"value\"] and [name] predicates are supported"));
            }
            self.ws()?;
            self.expect("]")?;
        }
        Ok(Step { axis, test, predicates })
    }

    fn primary(&mut self) -> Result<Expr, HostError> {
        self.ws()?;
        let at = self.pos;
        match self.peek() {
            None => Err(self.error("unexpected end of input")),
            Some('"' | '\'') => Ok(Expr::StringLit(self.string_lit()?)),
            Some(c) if c.is_ascii_digit() => self.number(),
            Some('$') => Ok(Expr::VarRef(self.var_name()?)),
            Some('(') => {
                self.bump();
                self.ws()?;
                if self.eat(")") {
                    return Ok(Expr::Sequence(Vec::new()));
                }
                let e = self.expr()?;
                self.ws()?;
                self.expect(")")?;
                Ok(e)
            }
            Some('.') => {
                self.bump();
                Ok(Expr::ContextItem)
            }
            Some('<') => Ok(Expr::ElemCtor(self.element()?)),
            Some(c) if c.is_alphabetic() || c == '_' => {
                if self.keyword("document") {
                    self.ws()?;
                    if self.eat("{") {
                        let e = self.expr()?;
                        self.ws()?;
                        self.expect("}")?;
                        return Ok(Expr::DocCtor(Box::new(e)));
                    }
                    self.pos = at;
                }
                let (prefix, local) = self.qname()?;
                self.ws()?;
                if self.peek() != Some('(') {
                    return Err(self.error_at(at, "expected an expression"));
                }
                self.bump();
                let mut args = Vec::new();
                self.ws()?;
                if !self.eat(")") {
                    loop {
                        args.push(self.expr_single()?);
                        self.ws()?;
                        if self.eat(")") {
                            break;
                        }
                        self.expect(",")?;
                    }
                }
                let namespace = match &prefix {
                    Some(p) => self.resolve_prefix(p, at)?,
                    None => FN_NS.to_string(),
                };
                let lexical = match &prefix {
                    Some(p) => format!("{p}:{local}"),
                    None => local.clone(),
                };
                if !builtins::exists(&namespace, &local, args.len()) {
                    return Err(self.error_at(at, format!("unknown function {lexical}#{}", args.len())));
                }
                Ok(Expr::FnCall { name: FnName { namespace, local, lexical }, args })
            }
            Some(c) => Err(self.error(format!("unexpected character `{c}`"))),
        }
    }

    fn number(&mut self) -> Result<Expr, HostError> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.bump();
        }
        if self.peek() == Some('.') && self.peek2().is_some_and(|c| c.is_ascii_digit()) {
            self.bump();
            while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                self.bump();
            }
        }
        let text = &self.src[start..self.pos];
        text.parse().map(Expr::NumLit).map_err(|_| self.error_at(start, "invalid number"))
    }

    /// Direct element constructor, starting at `<`.
    fn element(&mut self) -> Result<ElemCtor, HostError> {
        let open = self.pos;
        self.expect("<")?;
        let name_at = self.pos;
        let (prefix, local) = self.qname()?;
        let mut raw_attrs = Vec::new();
        loop {
            let had_ws = self.peek().is_some_and(char::is_whitespace);
            while self.peek().is_some_and(char::is_whitespace) {
                self.bump();
            }
            if self.eat("/>") || self.peek() == Some('>') {
                break;
            }
            if !had_ws {
                return Err(self.error("expected whitespace before attribute"));
            }
            let attr_at = self.pos;
            let name = self.qname()?;
            while self.peek().is_some_and(char::is_whitespace) {
                self.bump();
            }
            self.expect("=")?;
            while self.peek().is_some_and(char::is_whitespace) {
                self.bump();
            }
            let value = self.attr_value()?;
            raw_attrs.push((attr_at, name, value));
        }
        let empty = self.src[..self.pos].ends_with("/>");

        let mut namespaces = Vec::new();
        let mut default = self.default_ns.last().cloned().flatten();
        let scope_len = self.scope.len();
        let mut attrs = Vec::new();
        for (at, (p, l), value) in raw_attrs {
            let literal = || -> Option<String> {
                value
                    .iter()
                    .map(|part| match part {
                        AttrPart::Text(t) => Some(t.clone()),
                        AttrPart::Expr(_) => None,
                    })
                    .collect()
            };
            match (p.as_deref(), l.as_str()) {
                (None, "xmlns") => {
                    let ns = literal().ok_or_else(|| self.error_at(at, "namespace declarations must be literal"))?;
                    default = Some(ns.clone()).filter(|s| !s.is_empty());
                    namespaces.push((None, ns));
                }
                (Some("xmlns"), prefix) => {
                    let ns = literal().ok_or_else(|| self.error_at(at, "namespace declarations must be literal"))?;
                    self.scope.push((prefix.to_string(), ns.clone()));
                    namespaces.push((Some(prefix.to_string()), ns));
                }
                _ => attrs.push((at, p, l, value)),
            }
        }
        let resolve =
            |this: &Self, p: &Option<String>, l: &str, at: usize, is_attr: bool| -> Result<QName, HostError> {
                let ns = match p {
                    Some(p) => Some(this.resolve_prefix(p, at)?),
                    None if is_attr => None,
                    None => default.clone(),
                };
                QName::new(ns.as_deref(), l, p.as_deref()).map_err(|_| this.error_at(at, format!("invalid name `{l}`")))
            };
        let name = resolve(self, &prefix, &local, name_at, false)?;
        let mut attributes = Vec::new();
        for (at, p, l, value) in attrs {
            attributes.push((resolve(self, &p, &l, at, true)?, value));
        }

        let mut content = Vec::new();
        if !empty {
            self.expect(">")?;
            self.default_ns.push(default.clone());
            let result = self.element_content(&mut content);
            self.default_ns.pop();
            result?;
            let close_at = self.pos;
            let (cp, cl) = self.qname()?;
            if cp != prefix || cl != local {
                return Err(self.error_at(
                    close_at,
                    format!("end tag does not match start tag opened at {:?}", self.position(open)),
                ));
            }
            while self.peek().is_some_and(char::is_whitespace) {
                self.bump();
            }
            self.expect(">")?;
        }
        self.scope.truncate(scope_len);
        Ok(ElemCtor { name, namespaces, attributes, content })
    }

    /// Content up to and including `</`.
    fn element_content(&mut self, content: &mut Vec<Content>) -> Result<(), HostError> {
        let mut text = String::new();
        let mut literal = false;
        let flush = |text: &mut String, literal: &mut bool, content: &mut Vec<Content>| {
            if *literal || !text.trim().is_empty() {
                content.push(Content::Text(std::mem::take(text)));
            }
            text.clear();
            *literal = false;
        };
        loop {
            if self.eat("</") {
                flush(&mut text, &mut literal, content);
                return Ok(());
            }
            if self.rest().starts_with("<!--") {
                let end = self.rest().find("-->").ok_or_else(|| self.error("unterminated comment"))?;
                self.pos += end + 3;
                continue;
            }
            match self.peek() {
                None => return Err(self.error("unexpected end of input inside element")),
                Some('<') => {
                    flush(&mut text, &mut literal, content);
                    content.push(Content::Elem(self.element()?));
                }
                Some('{') if self.rest().starts_with("{{") => {
                    self.pos += 2;
                    text.push('{');
                    literal = true;
                }
                Some('}') if self.rest().starts_with("}}") => {
                    self.pos += 2;
                    text.push('}');
                    literal = true;
                }
                Some('{') => {
                    flush(&mut text, &mut literal, content);
                    self.bump();
                    self.ws()?;
                    if self.eat("}") {
                        continue;
                    }
                    let e = self.expr()?;
                    self.ws()?;
                    self.expect("}")?;
                    content.push(Content::Expr(e));
                }
                Some('}') => return Err(self.error("unescaped `}` in element content")),
                Some('&') => {
                    text.push(self.reference()?);
                    literal = true;
                }
                Some(c) => {
                    self.bump();
                    text.push(c);
                }
            }
        }
    }

    fn attr_value(&mut self) -> Result<Vec<AttrPart>, HostError> {
        let quote = match self.peek() {
            Some(q @ ('"' | '\'')) => q,
            _ => return Err(self.error("expected a quoted attribute value")),
        };
        let open = self.pos;
        self.bump();
        let mut parts = Vec::new();
        let mut text = String::new();
        loop {
            match self.peek() {
                None => return Err(self.error_at(open, "unterminated attribute value")),
                Some(c) if c == quote => {
                    self.bump();
                    if self.peek() == Some(quote) {
                        self.bump();
                        text.push(quote);
                        continue;
                    }
                    break;
                }
                Some('{') if self.rest().starts_with("{{") => {
                    self.pos += 2;
                    text.push('{');
                }
                Some('}') if self.rest().starts_with("}}") => {
                    self.pos += 2;
                    text.push('}');
                }
                Some('{') => {
                    if !text.is_empty() {
                        parts.push(AttrPart::Text(std::mem::take(&mut text)));
                    }
                    self.bump();
                    let e = self.expr()?;
                    self.ws()?;
                    self.expect("}")?;
                    parts.push(AttrPart::Expr(e));
                }
                Some('}') => return Err(self.error("unescaped `}` in attribute value")),
                Some('&') => text.push(self.reference()?),
                Some('<') => return Err(self.error("`<` is not allowed in attribute values")),
                Some(c) => {
                    self.bump();
                    text.push(c);
                }
            }
        }
        if !text.is_empty() || parts.is_empty() {
            parts.push(AttrPart::Text(text));
        }
        Ok(parts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn body(text: &str) -> Expr {
        parse_program(text).unwrap().body
    }

    #[test]
    fn let_return() {
        assert_eq!(
            body("let $x := 1 return $x"),
            Expr::Let { var: "x".into(), value: Box::new(Expr::NumLit(1.0)), body: Box::new(Expr::VarRef("x".into())) }
        );
    }

    #[test]
    fn incomplete_for_is_an_error() {
        let err = parse_program("for $x in").unwrap_err();
        assert!(matches!(err, HostError::Syntax { line: 1, .. }), "{err}");
    }

    #[test]
    fn multi_let_nests_in_order() {
        let Expr::Let { var, body, .. } = body("let $a := 1, $b := $a return $b") else { panic!() };
        assert_eq!(var, "a");
        assert!(matches!(*body, Expr::Let { ref var, .. } if var == "b"));
    }

    #[test]
    fn where_becomes_conditional() {
        let Expr::For { body, .. } = body("for $x in (1, 2) where $x = '1' return $x") else { panic!() };
        assert!(matches!(*body, Expr::If { .. }));
    }

    #[test]
    fn paths_with_prefixes_and_predicates() {
        let e = body(
            "declare namespace spql=\"http://www.w3.org/2005/sparql-results#\";
             $b/spql:binding[@name=\"Name\"]/spql:literal/text()",
        );
        let Expr::Path { steps, .. } = e else { panic!("{e:?}") };
        assert_eq!(steps.len(), 3);
        assert_eq!(steps[0].predicates.len(), 1);
        assert_eq!(steps[2].test, NodeTest::Text);
    }

    #[test]
    fn undeclared_prefix_is_reported_with_position() {
        let err = parse_program("\n  $x/spql:result").unwrap_err();
        assert!(matches!(err, HostError::Namespace { ref prefix, line: 2, column: 6 } if prefix == "spql"), "{err}");
    }

    #[test]
    fn absolute_and_relative_paths() {
        assert!(matches!(body("/conference/papers"), Expr::Path { start, .. } if *start == Expr::Root));
        assert!(matches!(body("papers/paper"), Expr::Path { start, .. } if *start == Expr::ContextItem));
    }

    #[test]
    fn constructors_with_enclosed_expressions() {
        let Expr::ElemCtor(el) = body("<person name=\"{$n}!\">\n  <knows>{$f}</knows>\n  {{x}}</person>") else {
            panic!()
        };
        assert_eq!(el.name, QName::local("person"));
        assert_eq!(el.attributes[0].1.len(), 2);
        assert_eq!(el.content.len(), 2);
        assert!(matches!(&el.content[1], Content::Text(t) if t.trim() == "{x}"));
    }

    #[test]
    fn constructor_namespaces_scope() {
        let Expr::ElemCtor(el) = body("<r:RDF xmlns:r=\"urn:r\" xml:base=\"urn:b\"><r:x/></r:RDF>") else { panic!() };
        assert_eq!(el.name.namespace(), Some("urn:r"));
        assert_eq!(el.attributes[0].0.namespace(), Some(XML_NS));
        assert!(parse_program("<a><r:x/></a>").is_err());
    }

    #[test]
    fn unknown_function() {
        let err = parse_program("nope(1)").unwrap_err();
        assert!(err.to_string().contains("unknown function nope#1"), "{err}");
    }

    #[test]
    fn comments_are_skipped() {
        assert_eq!(body("(: a (: nested :) comment :) 'x'"), Expr::StringLit("x".into()));
    }

    #[test]
    fn document_constructor_and_union() {
        let e = body("document { <a/> } union <b/>");
        assert!(matches!(e, Expr::Union(l, _) if matches!(*l, Expr::DocCtor(_))));
    }
}
