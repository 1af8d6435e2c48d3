use std::collections::BTreeMap;

use super::{Direction, PatternTerm, Projection, SparqlError, SparqlQuery, TriplePattern};
use crate::rdf::vocab::{RDF_TYPE, XSD};
use crate::rdf::{Literal, Term};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Iri(String),
    PName(String, String),
    Var(String),
    Label(String),
    Str(String),
    LangTag(String),
    Carets,
    Number(String, &'static str),
    Word(String),
    Punct(char),
    Eof,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '-'
}

impl<'a> Lexer<'a> {
    fn err(&self, offset: usize, message: impl Into<String>) -> SparqlError {
        SparqlError::Syntax { offset, message: message.into() }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn take_while(&mut self, f: impl Fn(char) -> bool) -> &'a str {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if !f(c) {
                break;
            }
            self.pos += c.len_utf8();
        }
        &self.src[start..self.pos]
    }

    fn skip_ws(&mut self) {
        loop {
            self.take_while(char::is_whitespace);
            if self.peek() == Some('#') {
                self.take_while(|c| c != '\n');
            } else {
                return;
            }
        }
    }

    /// Local part of a prefixed name. A trailing `.` ends the triple, not the name.
    fn local_name(&mut self) -> String {
        let start = self.pos;
        self.take_while(|c| is_name_char(c) || c == '.');
        while self.src[start..self.pos].ends_with('.') {
            self.pos -= 1;
        }
        self.src[start..self.pos].to_string()
    }

    fn string(&mut self, quote: char, start: usize) -> Result<String, SparqlError> {
        let long = self.src[self.pos..].starts_with(&format!("{quote}{quote}"));
        if long {
            self.pos += 2;
        }
        let mut out = String::new();
        loop {
            let Some(c) = self.bump() else {
                return Err(self.err(start, "unterminated string"));
            };
            match c {
                '\\' => {
                    let e = self.bump().ok_or_else(|| self.err(start, "unterminated string"))?;
                    out.push(match e {
                        'n' => '\n',
                        't' => '\t',
                        'r' => '\r',
                        'b' => '\u{8}',
                        'f' => '\u{c}',
                        '"' | '\'' | '\\' => e,
                        _ => return Err(self.err(self.pos - 2, format!("invalid escape \\{e}"))),
                    });
                }
                c if c == quote => {
                    if !long {
                        return Ok(out);
                    }
                    let q2 = format!("{quote}{quote}");
                    if self.src[self.pos..].starts_with(&q2) {
                        self.pos += 2;
                        return Ok(out);
                    }
                    out.push(c);
                }
                '\n' | '\r' if !long => return Err(self.err(start, "newline in short string")),
                c => out.push(c),
            }
        }
    }

    fn next(&mut self) -> Result<(Tok, usize), SparqlError> {
        self.skip_ws();
        let start = self.pos;
        let Some(c) = self.peek() else {
            return Ok((Tok::Eof, start));
        };
        let tok = match c {
            '<' => {
                self.bump();
                let iri = self.take_while(|c| c != '>' && !c.is_whitespace()).to_string();
                if self.bump() != Some('>') {
                    return Err(self.err(start, "unterminated IRI"));
                }
                Tok::Iri(iri)
            }
            '?' | '$' => {
                self.bump();
                let name = self.take_while(|c| c.is_alphanumeric() || c == '_');
                if name.is_empty() {
                    return Err(self.err(start, "empty variable name"));
                }
                Tok::Var(name.to_string())
            }
            '"' | '\'' => {
                self.bump();
                Tok::Str(self.string(c, start)?)
            }
            '@' => {
                self.bump();
                let tag = self.take_while(|c| c.is_ascii_alphanumeric() || c == '-');
                if tag.is_empty() {
                    return Err(self.err(start, "empty language tag"));
                }
                Tok::LangTag(tag.to_string())
            }
            '^' => {
                self.bump();
                if self.bump() != Some('^') {
                    return Err(self.err(start, "expected '^^'"));
                }
                Tok::Carets
            }
            '_' if self.src[self.pos..].starts_with("_:") => {
                self.pos += 2;
                let name = self.local_name();
                if name.is_empty() {
                    return Err(self.err(start, "empty blank node label"));
                }
                Tok::Label(name)
            }
            ':' => {
                self.bump();
                Tok::PName(String::new(), self.local_name())
            }
            c if c.is_ascii_digit()
                || ((c == '+' || c == '-') && self.src[self.pos + 1..].starts_with(|d: char| d.is_ascii_digit())) =>
            {
                self.bump();
                self.take_while(|c| c.is_ascii_digit());
                let mut kind = "integer";
                if self.peek() == Some('.') && self.src[self.pos + 1..].starts_with(|d: char| d.is_ascii_digit()) {
                    self.bump();
                    self.take_while(|c| c.is_ascii_digit());
                    kind = "decimal";
                }
                if matches!(self.peek(), Some('e' | 'E')) {
                    self.bump();
                    if matches!(self.peek(), Some('+' | '-')) {
                        self.bump();
                    }
                    if self.take_while(|c| c.is_ascii_digit()).is_empty() {
                        return Err(self.err(start, "malformed exponent"));
                    }
                    kind = "double";
                }
                Tok::Number(self.src[start..self.pos].to_string(), kind)
            }
            c if c.is_alphabetic() || c == '_' => {
                let word = self.take_while(is_name_char).to_string();
                if self.peek() == Some(':') {
                    self.bump();
                    Tok::PName(word, self.local_name())
                } else {
                    Tok::Word(word)
                }
            }
            '{' | '}' | '.' | ';' | ',' | '(' | ')' | '*' | '[' | ']' => {
                self.bump();
                Tok::Punct(c)
            }
            _ => return Err(self.err(start, format!("unexpected character {c:?}"))),
        };
        Ok((tok, start))
    }
}

const UNSUPPORTED_IN_GROUP: &[&str] = &["FILTER", "OPTIONAL", "UNION", "MINUS", "BIND", "VALUES", "GRAPH", "SERVICE"];
const UNSUPPORTED_MODIFIERS: &[&str] = &["LIMIT", "OFFSET", "GROUP", "HAVING", "VALUES"];
const UNSUPPORTED_FORMS: &[&str] = &["CONSTRUCT", "ASK", "DESCRIBE", "BASE", "FROM"];

struct Parser<'a> {
    lexer: Lexer<'a>,
    tok: Tok,
    offset: usize,
    prefixes: BTreeMap<String, String>,
}

impl<'a> Parser<'a> {
    fn advance(&mut self) -> Result<(), SparqlError> {
        let (tok, offset) = self.lexer.next()?;
        self.tok = tok;
        self.offset = offset;
        Ok(())
    }

    fn err(&self, message: impl Into<String>) -> SparqlError {
        SparqlError::Syntax { offset: self.offset, message: message.into() }
    }

    fn unsupported(&self, feature: impl Into<String>) -> SparqlError {
        SparqlError::Unsupported { offset: self.offset, feature: feature.into() }
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(&self.tok, Tok::Word(x) if x.eq_ignore_ascii_case(w))
    }

    fn word_in(&self, set: &[&str]) -> Option<String> {
        match &self.tok {
            Tok::Word(x) if set.iter().any(|w| x.eq_ignore_ascii_case(w)) => Some(x.to_ascii_uppercase()),
            _ => None,
        }
    }

    fn expect_punct(&mut self, c: char, what: &str) -> Result<(), SparqlError> {
        if self.tok == Tok::Punct(c) {
            self.advance()
        } else {
            Err(self.err(format!("expected {what}, found {}", describe(&self.tok))))
        }
    }

    fn expand(&self, prefix: &str, local: &str) -> Result<String, SparqlError> {
        match self.prefixes.get(prefix) {
            Some(ns) => Ok(format!("{ns}{local}")),
            None => Err(SparqlError::UnknownPrefix { offset: self.offset, prefix: prefix.to_string() }),
        }
    }

    fn query(&mut self) -> Result<SparqlQuery, SparqlError> {
        while self.is_word("PREFIX") {
            self.advance()?;
            let Tok::PName(prefix, local) = self.tok.clone() else {
                return Err(self.err("expected prefix name after PREFIX"));
            };
            if !local.is_empty() {
                return Err(self.err("prefix declaration must end with ':'"));
            }
            self.advance()?;
            let Tok::Iri(iri) = self.tok.clone() else {
                return Err(self.err("expected <IRI> in PREFIX declaration"));
            };
            self.prefixes.insert(prefix, iri);
            self.advance()?;
        }
        if let Some(w) = self.word_in(UNSUPPORTED_FORMS) {
            return Err(self.unsupported(w));
        }
        if !self.is_word("SELECT") {
            return Err(self.err(format!("expected SELECT, found {}", describe(&self.tok))));
        }
        self.advance()?;
        if self.is_word("DISTINCT") || self.is_word("REDUCED") {
            self.advance()?;
        }
        let projection = if self.tok == Tok::Punct('*') {
            self.advance()?;
            Projection::All
        } else {
            let mut vars = Vec::new();
            while let Tok::Var(v) = &self.tok {
                vars.push(v.clone());
                self.advance()?;
            }
            if vars.is_empty() {
                if self.tok == Tok::Punct('(') {
                    return Err(self.unsupported("projection expressions"));
                }
                return Err(self.err("expected variables or '*' after SELECT"));
            }
            Projection::Vars(vars)
        };
        if let Some(w) = self.word_in(UNSUPPORTED_FORMS) {
            return Err(self.unsupported(w));
        }
        if self.is_word("WHERE") {
            self.advance()?;
        }
        if self.tok != Tok::Punct('{') {
            return Err(self.err(format!("expected '{{' to open the group pattern, found {}", describe(&self.tok))));
        }
        self.advance()?;
        let patterns = self.group()?;
        let mut order_by = Vec::new();
        if self.is_word("ORDER") {
            self.advance()?;
            if !self.is_word("BY") {
                return Err(self.err("expected BY after ORDER"));
            }
            self.advance()?;
            loop {
                match self.tok.clone() {
                    Tok::Var(v) => {
                        order_by.push((v, Direction::Asc));
                        self.advance()?;
                    }
                    Tok::Word(w) if w.eq_ignore_ascii_case("ASC") || w.eq_ignore_ascii_case("DESC") => {
                        let dir = if w.eq_ignore_ascii_case("ASC") { Direction::Asc } else { Direction::Desc };
                        self.advance()?;
                        self.expect_punct('(', "'('")?;
                        let Tok::Var(v) = self.tok.clone() else {
                            return Err(self.unsupported("ORDER BY on expressions"));
                        };
                        self.advance()?;
                        self.expect_punct(')', "')'")?;
                        order_by.push((v, dir));
                    }
                    Tok::Punct('(') => return Err(self.unsupported("ORDER BY on expressions")),
                    _ => break,
                }
            }
            if order_by.is_empty() {
                return Err(self.err("expected an ORDER BY key"));
            }
        }
        if let Some(w) = self.word_in(UNSUPPORTED_MODIFIERS) {
            return Err(self.unsupported(w));
        }
        if self.tok != Tok::Eof {
            return Err(self.err(format!("unexpected {} after query", describe(&self.tok))));
        }
        let query = SparqlQuery { prefixes: std::mem::take(&mut self.prefixes), projection, patterns, order_by };
        let vars = query.pattern_variables();
        let mut mentioned: Vec<&String> = query.order_by.iter().map(|(v, _)| v).collect();
        if let Projection::Vars(vs) = &query.projection {
            mentioned.extend(vs);
        }
        if let Some(v) = mentioned.into_iter().find(|v| !vars.contains(v)) {
            return Err(SparqlError::UnusedVariable(v.clone()));
        }
        Ok(query)
    }

    fn group(&mut self) -> Result<Vec<TriplePattern>, SparqlError> {
        let mut patterns = Vec::new();
        loop {
            if self.tok == Tok::Punct('}') {
                self.advance()?;
                return Ok(patterns);
            }
            if let Some(w) = self.word_in(UNSUPPORTED_IN_GROUP) {
                return Err(self.unsupported(w));
            }
            if self.tok == Tok::Punct('{') {
                return Err(self.unsupported("nested group patterns"));
            }
            if self.tok == Tok::Eof {
                return Err(self.err("unterminated group pattern"));
            }
            let subject = self.subject()?;
            self.property_list(&subject, &mut patterns)?;
            if self.tok == Tok::Punct('.') {
                self.advance()?;
            } else if let Some(w) = self.word_in(UNSUPPORTED_IN_GROUP) {
                return Err(self.unsupported(w));
            } else if self.tok != Tok::Punct('}') {
                return Err(self.err(format!("expected '.' or '}}', found {}", describe(&self.tok))));
            }
        }
    }

    fn property_list(&mut self, subject: &PatternTerm, out: &mut Vec<TriplePattern>) -> Result<(), SparqlError> {
        loop {
            let verb = self.verb()?;
            loop {
                let object = self.object()?;
                out.push(TriplePattern::new(subject.clone(), verb.clone(), object));
                if self.tok == Tok::Punct(',') {
                    self.advance()?;
                } else {
                    break;
                }
            }
            if self.tok != Tok::Punct(';') {
                return Ok(());
            }
            while self.tok == Tok::Punct(';') {
                self.advance()?;
            }
            if matches!(self.tok, Tok::Punct('.') | Tok::Punct('}')) {
                return Ok(());
            }
        }
    }

    fn iri_like(&mut self) -> Result<Option<PatternTerm>, SparqlError> {
        let t = match self.tok.clone() {
            Tok::Var(v) => PatternTerm::Var(v),
            Tok::Iri(i) => PatternTerm::Term(Term::iri(i)),
            Tok::PName(p, l) => PatternTerm::Term(Term::iri(self.expand(&p, &l)?)),
            _ => return Ok(None),
        };
        self.advance()?;
        Ok(Some(t))
    }

    fn subject(&mut self) -> Result<PatternTerm, SparqlError> {
        if let Tok::Label(l) = self.tok.clone() {
            self.advance()?;
            return Ok(PatternTerm::Label(l));
        }
        match self.iri_like()? {
            Some(t) => Ok(t),
            None if self.tok == Tok::Punct('[') => Err(self.unsupported("anonymous blank nodes")),
            None => Err(self.err(format!("expected a subject, found {}", describe(&self.tok)))),
        }
    }

    fn verb(&mut self) -> Result<PatternTerm, SparqlError> {
        if matches!(&self.tok, Tok::Word(w) if w == "a") {
            self.advance()?;
            return Ok(PatternTerm::Term(Term::iri(RDF_TYPE)));
        }
        match self.iri_like()? {
            Some(t) => Ok(t),
            None => Err(self.err(format!("expected a predicate, found {}", describe(&self.tok)))),
        }
    }

    fn object(&mut self) -> Result<PatternTerm, SparqlError> {
        if let Some(t) = self.iri_like()? {
            return Ok(t);
        }
        match self.tok.clone() {
            Tok::Label(l) => {
                self.advance()?;
                Ok(PatternTerm::Label(l))
            }
            Tok::Str(s) => {
                self.advance()?;
                let lit = match self.tok.clone() {
                    Tok::LangTag(tag) => {
                        self.advance()?;
                        Literal::lang(s, tag)
                    }
                    Tok::Carets => {
                        self.advance()?;
                        let dt = match self.tok.clone() {
                            Tok::Iri(i) => i,
                            Tok::PName(p, l) => self.expand(&p, &l)?,
                            _ => return Err(self.err("expected a datatype IRI after '^^'")),
                        };
                        self.advance()?;
                        Literal::typed(s, dt)
                    }
                    _ => Literal::plain(s),
                };
                Ok(PatternTerm::Term(Term::Literal(lit)))
            }
            Tok::Number(n, kind) => {
                self.advance()?;
                Ok(PatternTerm::Term(Term::Literal(Literal::typed(n, format!("{XSD}{kind}")))))
            }
            Tok::Word(w) if w == "true" || w == "false" => {
                self.advance()?;
                Ok(PatternTerm::Term(Term::Literal(Literal::typed(w, format!("{XSD}boolean")))))
            }
            _ => Err(self.err(format!("expected an object, found {}", describe(&self.tok)))),
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Iri(i) => format!("<{i}>"),
        Tok::PName(p, l) => format!("{p}:{l}"),
        Tok::Var(v) => format!("?{v}"),
        Tok::Label(l) => format!("_:{l}"),
        Tok::Str(s) => format!("{s:?}"),
        Tok::LangTag(l) => format!("@{l}"),
        Tok::Carets => "'^^'".into(),
        Tok::Number(n, _) => n.clone(),
        Tok::Word(w) => format!("'{w}'"),
        Tok::Punct(c) => format!("'{c}'"),
        Tok::Eof => "end of query".into(),
    }
}

/// Parses a query, expanding every prefixed name.
pub fn parse_sparql(text: &str) -> Result<SparqlQuery, SparqlError> {
    let mut p = Parser { lexer: Lexer { src: text, pos: 0 }, tok: Tok::Eof, offset: 0, prefixes: BTreeMap::new() };
    p.advance()?;
    p.query()
}
