//! Recursive descent parser for the supported XML subset.
//!
//! Handles elements, attributes, text, namespace declarations, the XML
//! declaration, comments and processing instructions (both skipped), the
//! five predefined entities and numeric character references. DTDs and
//! CDATA sections are rejected.

use std::sync::Arc;

use super::{ElementBuf, Fragment, QName, XmlDocument, XmlError, XML_NS};

pub fn parse_xml(text: &str) -> Result<Arc<XmlDocument>, XmlError> {
    parse_xml_with_uri(text, None)
}

/// Parses `text`, recording `uri` as the document URI (used as the default
/// base for RDF/XML ingestion).
pub fn parse_xml_with_uri(text: &str, uri: Option<String>) -> Result<Arc<XmlDocument>, XmlError> {
    let mut p = Parser { src: text, pos: 0, scopes: vec![(Some("xml".to_string()), XML_NS.to_string())] };
    p.skip_bom();
    p.skip_misc(true)?;
    if !p.starts_with("<") {
        return Err(p.error("expected root element"));
    }
    let root = p.element()?;
    p.skip_misc(false)?;
    if p.pos < p.src.len() {
        return Err(p.error("content after root element"));
    }
    Ok(XmlDocument::from_root(root, uri))
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    /// In-scope namespace bindings, innermost last.
    scopes: Vec<(Option<String>, String)>,
}

impl<'a> Parser<'a> {
    fn error(&self, message: impl Into<String>) -> XmlError {
        self.error_at(self.pos, message)
    }

    fn error_at(&self, pos: usize, message: impl Into<String>) -> XmlError {
        let before = &self.src[..pos.min(self.src.len())];
        let line = before.matches('\n').count() + 1;
        let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        XmlError::Parse { line, column, message: message.into() }
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn starts_with(&self, s: &str) -> bool {
        self.rest().starts_with(s)
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn expect(&mut self, s: &str) -> Result<(), XmlError> {
        if self.starts_with(s) {
            self.pos += s.len();
            Ok(())
        } else {
            Err(self.error(format!("expected `{s}`")))
        }
    }

    fn skip_bom(&mut self) {
        if self.starts_with("\u{FEFF}") {
            self.pos += 3;
        }
    }

    fn skip_ws(&mut self) -> bool {
        let start = self.pos;
        while matches!(self.peek(), Some(' ' | '\t' | '\r' | '\n')) {
            self.pos += 1;
        }
        self.pos > start
    }

    /// Skips whitespace, comments and processing instructions outside the root.
    fn skip_misc(&mut self, prolog: bool) -> Result<(), XmlError> {
        loop {
            self.skip_ws();
            if self.starts_with("<!--") {
                self.comment()?;
            } else if self.starts_with("<?") {
                self.processing_instruction()?;
            } else if self.starts_with("<!DOCTYPE") {
                return Err(self.error("DTDs are not supported"));
            } else {
                return Ok(());
            }
            if !prolog && self.pos >= self.src.len() {
                return Ok(());
            }
        }
    }

    fn comment(&mut self) -> Result<(), XmlError> {
        let start = self.pos;
        self.pos += 4;
        match self.rest().find("-->") {
            Some(i) => {
                self.pos += i + 3;
                Ok(())
            }
            None => Err(self.error_at(start, "unterminated comment")),
        }
    }

    fn processing_instruction(&mut self) -> Result<(), XmlError> {
        let start = self.pos;
        match self.rest().find("?>") {
            Some(i) => {
                self.pos += i + 2;
                Ok(())
            }
            None => Err(self.error_at(start, "unterminated processing instruction")),
        }
    }

    fn name(&mut self) -> Result<&'a str, XmlError> {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_alphanumeric() || matches!(c, '_' | '-' | '.' | ':' | '\u{B7}') {
                self.bump();
            } else {
                break;
            }
        }
        if start == self.pos {
            return Err(self.error("expected a name"));
        }
        Ok(&self.src[start..self.pos])
    }

    fn split_name(&self, raw: &str, at: usize) -> Result<(Option<String>, String), XmlError> {
        let (prefix, local) = match raw.split_once(':') {
            Some((p, l)) => (Some(p), l),
            None => (None, raw),
        };
        if !super::is_ncname(local) || prefix.is_some_and(|p| !super::is_ncname(p)) {
            return Err(self.error_at(at, format!("invalid name `{raw}`")));
        }
        Ok((prefix.map(str::to_string), local.to_string()))
    }

    fn lookup(&self, prefix: Option<&str>) -> Option<&str> {
        self.scopes.iter().rev().find(|(p, _)| p.as_deref() == prefix).map(|(_, ns)| ns.as_str())
    }

    fn resolve(&self, prefix: Option<String>, local: String, is_attribute: bool) -> Result<QName, XmlError> {
        let namespace = match prefix.as_deref() {
            None if is_attribute => None,
            None => self.lookup(None).filter(|ns| !ns.is_empty()),
            Some(p) => Some(
                self.lookup(Some(p)).filter(|ns| !ns.is_empty()).ok_or_else(|| XmlError::Namespace(p.to_string()))?,
            ),
        };
        QName::new(namespace, &local, prefix.as_deref())
    }

    fn element(&mut self) -> Result<ElementBuf, XmlError> {
        let open_at = self.pos;
        self.expect("<")?;
        let raw_name = self.name()?;
        let (prefix, local) = self.split_name(raw_name, open_at + 1)?;

        let mut raw_attrs = Vec::new();
        let mut decls = Vec::new();
        loop {
            let had_ws = self.skip_ws();
            if self.starts_with("/>") || self.starts_with(">") {
                break;
            }
            if !had_ws {
                return Err(self.error("expected whitespace before attribute"));
            }
            let attr_at = self.pos;
            let attr_name = self.name()?;
            self.skip_ws();
            self.expect("=")?;
            self.skip_ws();
            let value = self.attribute_value()?;
            if attr_name == "xmlns" {
                decls.push((None, value));
            } else if let Some(p) = attr_name.strip_prefix("xmlns:") {
                if !super::is_ncname(p) {
                    return Err(self.error_at(attr_at, format!("invalid prefix `{p}`")));
                }
                if value.is_empty() {
                    return Err(self.error_at(attr_at, "prefix bound to empty namespace"));
                }
                decls.push((Some(p.to_string()), value));
            } else {
                raw_attrs.push((attr_at, attr_name, value));
            }
        }

        let mark = self.scopes.len();
        self.scopes.extend(decls.iter().cloned());
        let name = self.resolve(prefix, local, false)?;
        let mut attributes: Vec<(QName, String)> = Vec::new();
        for (at, raw, value) in raw_attrs {
            let (p, l) = self.split_name(raw, at)?;
            let qn = self.resolve(p, l, true)?;
            if attributes.iter().any(|(n, _)| *n == qn) {
                return Err(self.error_at(at, format!("duplicate attribute `{raw}`")));
            }
            attributes.push((qn, value));
        }
        let mut el = ElementBuf { name, namespaces: decls, attributes, children: Vec::new() };

        if self.starts_with("/>") {
            self.pos += 2;
        } else {
            self.pos += 1;
            self.content(&mut el)?;
            let close_at = self.pos;
            self.expect("</")?;
            let close = self.name()?;
            if close != raw_name {
                return Err(self
                    .error_at(close_at, format!("mismatched end tag: expected `</{raw_name}>`, found `</{close}>`")));
            }
            self.skip_ws();
            self.expect(">")?;
        }
        self.scopes.truncate(mark);
        Ok(el)
    }

    fn content(&mut self, el: &mut ElementBuf) -> Result<(), XmlError> {
        let mut text = String::new();
        loop {
            if self.pos >= self.src.len() {
                return Err(self.error(format!("unclosed element `{}`", el.name)));
            }
            if self.starts_with("</") {
                break;
            } else if self.starts_with("<!--") {
                self.comment()?;
            } else if self.starts_with("<![CDATA[") {
                return Err(self.error("CDATA sections are not supported"));
            } else if self.starts_with("<?") {
                self.processing_instruction()?;
            } else if self.starts_with("<") {
                if !text.is_empty() {
                    el.children.push(Fragment::Text(std::mem::take(&mut text)));
                }
                let child = self.element()?;
                el.children.push(Fragment::Element(child));
            } else if self.starts_with("&") {
                text.push(self.reference()?);
            } else {
                let c = self.bump().unwrap();
                text.push(c);
            }
        }
        if !text.is_empty() {
            el.children.push(Fragment::Text(text));
        }
        Ok(())
    }

    fn attribute_value(&mut self) -> Result<String, XmlError> {
        let quote = match self.peek() {
            Some(q @ ('"' | '\'')) => q,
            _ => return Err(self.error("expected quoted attribute value")),
        };
        self.bump();
        let mut value = String::new();
        loop {
            match self.peek() {
                None => return Err(self.error("unterminated attribute value")),
                Some(c) if c == quote => {
                    self.bump();
                    return Ok(value);
                }
                Some('<') => return Err(self.error("`<` in attribute value")),
                Some('&') => value.push(self.reference()?),
                Some('\t' | '\n' | '\r') => {
                    self.bump();
                    value.push(' ');
                }
                Some(c) => {
                    self.bump();
                    value.push(c);
                }
            }
        }
    }

    fn reference(&mut self) -> Result<char, XmlError> {
        let start = self.pos;
        self.expect("&")?;
        let end = self.rest().find(';').ok_or_else(|| self.error_at(start, "unterminated entity reference"))?;
        let body = &self.rest()[..end];
        self.pos += end + 1;
        let c = match body {
            "lt" => '<',
            "gt" => '>',
            "amp" => '&',
            "quot" => '"',
            "apos" => '\'',
            _ => {
                let code = if let Some(hex) = body.strip_prefix("#x") {
                    u32::from_str_radix(hex, 16).ok()
                } else if let Some(dec) = body.strip_prefix('#') {
                    dec.parse().ok()
                } else {
                    None
                };
                code.and_then(char::from_u32)
                    .ok_or_else(|| self.error_at(start, format!("unknown entity `&{body};`")))?
            }
        };
        Ok(c)
    }
}
