//! Minimal XML reader for the document subset used here: elements,
//! attributes, character data with the five predefined entities plus
//! numeric references, comments, processing instructions and a DOCTYPE
//! line. Whitespace-only text between elements is dropped.

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XmlError {
    pub line: u32,
    pub column: u32,
    pub message: String,
}

impl fmt::Display for XmlError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Element {
    pub name: String,
    pub attrs: Vec<(String, String)>,
    pub children: Vec<XmlNode>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum XmlNode {
    Element(Element),
    Text(String),
}

impl Element {
    pub fn attr(&self, name: &str) -> Option<&str> {
        self.attrs
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_str())
    }

    pub fn child_elements(&self) -> impl Iterator<Item = &Element> {
        self.children.iter().filter_map(|n| match n {
            XmlNode::Element(e) => Some(e),
            XmlNode::Text(_) => None,
        })
    }

    /// Concatenated text content (for #PCDATA elements).
    pub fn text(&self) -> String {
        let mut out = String::new();
        for n in &self.children {
            if let XmlNode::Text(t) = n {
                out.push_str(t);
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XmlDocument {
    /// Raw content of the DOCTYPE declaration, if any.
    pub doctype: Option<String>,
    pub root: Element,
}

struct Reader<'a> {
    text: &'a [u8],
    pos: usize,
    line: u32,
    column: u32,
}

impl<'a> Reader<'a> {
    fn new(text: &'a str) -> Self {
        Reader {
            text: text.as_bytes(),
            pos: 0,
            line: 1,
            column: 1,
        }
    }

    fn err(&self, message: impl Into<String>) -> XmlError {
        XmlError {
            line: self.line,
            column: self.column,
            message: message.into(),
        }
    }

    fn peek(&self) -> Option<u8> {
        self.text.get(self.pos).copied()
    }

    fn starts_with(&self, s: &str) -> bool {
        self.text[self.pos..].starts_with(s.as_bytes())
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.text.get(self.pos).copied()?;
        self.pos += 1;
        if c == b'\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn eat(&mut self, s: &str) -> Result<(), XmlError> {
        if self.starts_with(s) {
            for _ in 0..s.len() {
                self.bump();
            }
            Ok(())
        } else {
            Err(self.err(format!("expected '{s}'")))
        }
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b' ' | b'\t' | b'\r' | b'\n')) {
            self.bump();
        }
    }

    fn skip_until(&mut self, s: &str) -> Result<(), XmlError> {
        while !self.starts_with(s) {
            if self.bump().is_none() {
                return Err(self.err(format!("unterminated construct, expected '{s}'")));
            }
        }
        self.eat(s)
    }

    fn name(&mut self) -> Result<String, XmlError> {
        let start = self.pos;
        while let Some(c) = self.peek() {
            let ok = c.is_ascii_alphanumeric() || matches!(c, b'_' | b'-' | b'.' | b':');
            if !ok {
                break;
            }
            self.bump();
        }
        if self.pos == start {
            return Err(self.err("expected a name"));
        }
        Ok(String::from_utf8_lossy(&self.text[start..self.pos]).into_owned())
    }

    /// Comments, PIs and whitespace between markup.
    fn skip_misc(&mut self) -> Result<(), XmlError> {
        loop {
            self.skip_ws();
            if self.starts_with("<!--") {
                self.eat("<!--")?;
                self.skip_until("-->")?;
            } else if self.starts_with("<?") {
                self.eat("<?")?;
                self.skip_until("?>")?;
            } else {
                return Ok(());
            }
        }
    }

    fn decode_text(&mut self, raw_end: impl Fn(&Reader) -> bool) -> Result<String, XmlError> {
        let mut out = String::new();
        while let Some(c) = self.peek() {
            if raw_end(self) {
                break;
            }
            if c == b'&' {
                self.bump();
                let start = self.pos;
                while self.peek() != Some(b';') {
                    if self.bump().is_none() {
                        return Err(self.err("unterminated entity reference"));
                    }
                }
                let ent = String::from_utf8_lossy(&self.text[start..self.pos]).into_owned();
                self.bump(); // ;
                match ent.as_str() {
                    "amp" => out.push('&'),
                    "lt" => out.push('<'),
                    "gt" => out.push('>'),
                    "quot" => out.push('"'),
                    "apos" => out.push('\''),
                    _ => {
                        let cp = if let Some(hex) = ent.strip_prefix("#x") {
                            u32::from_str_radix(hex, 16).ok()
                        } else if let Some(dec) = ent.strip_prefix('#') {
                            dec.parse::<u32>().ok()
                        } else {
                            None
                        };
                        match cp.and_then(char::from_u32) {
                            Some(ch) => out.push(ch),
                            None => return Err(self.err(format!("unknown entity &{ent};"))),
                        }
                    }
                }
            } else {
                // Decode UTF-8 sequences by length.
                let len = utf8_len(c);
                let bytes = &self.text[self.pos..self.pos + len.min(self.text.len() - self.pos)];
                match std::str::from_utf8(bytes) {
                    Ok(s) => {
                        out.push_str(s);
                        for _ in 0..len {
                            self.bump();
                        }
                    }
                    Err(_) => return Err(self.err("invalid UTF-8")),
                }
            }
        }
        Ok(out)
    }

    fn attribute_value(&mut self) -> Result<String, XmlError> {
        let quote = match self.bump() {
            Some(q @ (b'"' | b'\'')) => q,
            _ => return Err(self.err("expected a quoted attribute value")),
        };
        let v = self.decode_text(|r| r.peek() == Some(quote))?;
        self.eat(if quote == b'"' { "\"" } else { "'" })?;
        Ok(v)
    }

    fn element(&mut self) -> Result<Element, XmlError> {
        self.eat("<")?;
        let name = self.name()?;
        let mut attrs = Vec::new();
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'/') => {
                    self.eat("/>")?;
                    return Ok(Element {
                        name,
                        attrs,
                        children: vec![],
                    });
                }
                Some(b'>') => {
                    self.bump();
                    break;
                }
                Some(_) => {
                    let an = self.name()?;
                    self.skip_ws();
                    self.eat("=")?;
                    self.skip_ws();
                    let av = self.attribute_value()?;
                    if attrs.iter().any(|(n, _)| *n == an) {
                        return Err(self.err(format!("duplicate attribute {an}")));
                    }
                    attrs.push((an, av));
                }
                None => return Err(self.err("unterminated start tag")),
            }
        }
        let mut children = Vec::new();
        loop {
            if self.starts_with("</") {
                self.eat("</")?;
                let close = self.name()?;
                if close != name {
                    return Err(self.err(format!("mismatched close tag {close}, expected {name}")));
                }
                self.skip_ws();
                self.eat(">")?;
                return Ok(Element {
                    name,
                    attrs,
                    children,
                });
            }
            if self.starts_with("<!--") {
                self.eat("<!--")?;
                self.skip_until("-->")?;
                continue;
            }
            if self.starts_with("<?") {
                self.eat("<?")?;
                self.skip_until("?>")?;
                continue;
            }
            if self.starts_with("<![") {
                return Err(self.err("CDATA sections are not supported"));
            }
            match self.peek() {
                Some(b'<') => children.push(XmlNode::Element(self.element()?)),
                Some(_) => {
                    let t = self.decode_text(|r| r.peek() == Some(b'<'))?;
                    if !t.chars().all(char::is_whitespace) {
                        children.push(XmlNode::Text(t));
                    }
                }
                None => return Err(self.err(format!("unterminated element {name}"))),
            }
        }
    }
}

fn utf8_len(first: u8) -> usize {
    match first {
        0x00..=0x7f => 1,
        0xc0..=0xdf => 2,
        0xe0..=0xef => 3,
        _ => 4,
    }
}

pub fn parse_xml(text: &str) -> Result<XmlDocument, XmlError> {
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    let mut r = Reader::new(text);
    r.skip_misc()?;
    let mut doctype = None;
    if r.starts_with("<!DOCTYPE") {
        r.eat("<!DOCTYPE")?;
        let start = r.pos;
        let mut depth = 0i32;
        loop {
            match r.peek() {
                Some(b'[') => {
                    depth += 1;
                    r.bump();
                }
                Some(b']') => {
                    depth -= 1;
                    r.bump();
                }
                Some(b'>') if depth == 0 => break,
                Some(_) => {
                    r.bump();
                }
                None => return Err(r.err("unterminated DOCTYPE")),
            }
        }
        doctype = Some(
            String::from_utf8_lossy(&r.text[start..r.pos])
                .trim()
                .to_string(),
        );
        r.eat(">")?;
        r.skip_misc()?;
    }
    let root = r.element()?;
    r.skip_misc()?;
    if r.peek().is_some() {
        return Err(r.err("content after the document element"));
    }
    Ok(XmlDocument { doctype, root })
}

/// Escapes character data for element content.
pub fn escape_text(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            _ => out.push(c),
        }
    }
    out
}

/// Escapes an attribute value (double-quoted).
pub fn escape_attr(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '"' => out.push_str("&quot;"),
            _ => out.push(c),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_prolog_doctype_and_pi() {
        let doc = parse_xml(
            "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n\
             <!DOCTYPE main SYSTEM \"Vernacular.dtd\">\n\
             <?xml-stylesheet href=\"x.xsl\" type=\"text/xsl\"?>\n\
             <main><a x=\"1\"/><b>t &amp; u</b></main>",
        )
        .unwrap();
        assert_eq!(doc.doctype.as_deref(), Some("main SYSTEM \"Vernacular.dtd\""));
        assert_eq!(doc.root.name, "main");
        let kids: Vec<&Element> = doc.root.child_elements().collect();
        assert_eq!(kids.len(), 2);
        assert_eq!(kids[0].attr("x"), Some("1"));
        assert_eq!(kids[1].text(), "t & u");
    }

    #[test]
    fn entity_round_trip() {
        let text = "a<b&\"c'>d";
        let xml = format!("<r a=\"{}\">{}</r>", escape_attr(text), escape_text(text));
        let doc = parse_xml(&xml).unwrap();
        assert_eq!(doc.root.attr("a"), Some(text));
        assert_eq!(doc.root.text(), text);
    }

    #[test]
    fn mismatched_tags_rejected() {
        assert!(parse_xml("<a><b></a></b>").is_err());
    }

    #[test]
    fn namespaced_names_allowed() {
        let doc = parse_xml(
            "<main><xi:include href=\"f.xml\" parse=\"xml\" \
             xmlns:xi=\"http://www.w3.org/2003/XInclude\"/></main>",
        )
        .unwrap();
        let inc = doc.root.child_elements().next().unwrap();
        assert_eq!(inc.name, "xi:include");
        assert_eq!(inc.attr("href"), Some("f.xml"));
    }
}
