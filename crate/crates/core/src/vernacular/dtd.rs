//! DTD-driven validation: parses ELEMENT/ATTLIST declarations (the subset
//! the bundled schema uses — sequence, choice, ?, *, +, EMPTY, #PCDATA)
//! and checks an element tree against them. Multiple ATTLIST declarations
//! for one element merge, as in XML proper.

use std::collections::BTreeMap;

use super::xml::{Element, XmlNode};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ContentModel {
    Empty,
    PcData,
    Children(Cm),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Cm {
    Name(String),
    Seq(Vec<Cm>),
    Choice(Vec<Cm>),
    Star(Box<Cm>),
    Plus(Box<Cm>),
    Opt(Box<Cm>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AttType {
    CData,
    Enum(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AttDefault {
    Required,
    Implied,
    Value(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttDef {
    pub name: String,
    pub ty: AttType,
    pub default: AttDefault,
}

#[derive(Debug, Clone, Default)]
pub struct Dtd {
    pub elements: BTreeMap<String, ContentModel>,
    pub attlists: BTreeMap<String, Vec<AttDef>>,
}

pub fn parse_dtd(text: &str) -> Result<Dtd, String> {
    let mut dtd = Dtd::default();
    let mut rest = text;
    loop {
        rest = rest.trim_start();
        if rest.is_empty() {
            return Ok(dtd);
        }
        if let Some(after) = rest.strip_prefix("<!--") {
            rest = after
                .split_once("-->")
                .ok_or("unterminated comment")?
                .1;
            continue;
        }
        if let Some(after) = rest.strip_prefix("<!ELEMENT") {
            let (decl, tail) = after.split_once('>').ok_or("unterminated ELEMENT")?;
            rest = tail;
            let decl = decl.trim();
            let (name, model) = decl
                .split_once(char::is_whitespace)
                .ok_or_else(|| format!("malformed ELEMENT declaration: {decl}"))?;
            let model = model.trim();
            let cm = if model == "EMPTY" {
                ContentModel::Empty
            } else if model == "(#PCDATA)" {
                ContentModel::PcData
            } else {
                ContentModel::Children(parse_cm(model)?.0)
            };
            dtd.elements.insert(name.to_string(), cm);
            continue;
        }
        if let Some(after) = rest.strip_prefix("<!ATTLIST") {
            let (decl, tail) = after.split_once('>').ok_or("unterminated ATTLIST")?;
            rest = tail;
            let mut toks = tokenize(decl);
            let element = toks
                .next()
                .ok_or_else(|| format!("malformed ATTLIST: {decl}"))?;
            let defs = dtd.attlists.entry(element).or_default();
            while let Some(name) = toks.next() {
                let ty_tok = toks.next().ok_or("attribute without a type")?;
                let ty = if ty_tok == "CDATA" {
                    AttType::CData
                } else if ty_tok.starts_with('(') {
                    let inner = ty_tok.trim_start_matches('(').trim_end_matches(')');
                    AttType::Enum(inner.split('|').map(|s| s.trim().to_string()).collect())
                } else {
                    return Err(format!("unsupported attribute type {ty_tok}"));
                };
                let def_tok = toks.next().ok_or("attribute without a default")?;
                let default = match def_tok.as_str() {
                    "#REQUIRED" => AttDefault::Required,
                    "#IMPLIED" => AttDefault::Implied,
                    quoted if quoted.starts_with('"') => {
                        AttDefault::Value(quoted.trim_matches('"').to_string())
                    }
                    other => return Err(format!("unsupported attribute default {other}")),
                };
                if !defs.iter().any(|d| d.name == name) {
                    defs.push(AttDef { name, ty, default });
                }
            }
            continue;
        }
        return Err(format!(
            "unsupported DTD construct near: {}",
            &rest[..rest.len().min(40)]
        ));
    }
}

/// ATTLIST tokens: names, parenthesized enumerations, quoted defaults.
fn tokenize(s: &str) -> impl Iterator<Item = String> + '_ {
    let mut chars = s.chars().peekable();
    std::iter::from_fn(move || {
        while matches!(chars.peek(), Some(c) if c.is_whitespace()) {
            chars.next();
        }
        let first = *chars.peek()?;
        let mut tok = String::new();
        if first == '(' {
            for c in chars.by_ref() {
                tok.push(c);
                if c == ')' {
                    break;
                }
            }
        } else if first == '"' {
            tok.push(chars.next().unwrap());
            for c in chars.by_ref() {
                tok.push(c);
                if c == '"' {
                    break;
                }
            }
        } else {
            while let Some(&c) = chars.peek() {
                if c.is_whitespace() {
                    break;
                }
                tok.push(c);
                chars.next();
            }
        }
        Some(tok)
    })
}

/// Parses a parenthesized content-model group starting at `s`; returns the
/// model and the unconsumed tail.
fn parse_cm(s: &str) -> Result<(Cm, &str), String> {
    let s = s.trim_start();
    let Some(rest) = s.strip_prefix('(') else {
        return Err(format!("expected '(' in content model near {s}"));
    };
    let mut items = Vec::new();
    let mut sep: Option<char> = None;
    let mut rest = rest;
    loop {
        rest = rest.trim_start();
        let (item, tail) = if rest.starts_with('(') {
            parse_cm(rest)?
        } else {
            let end = rest
                .find(|c: char| "?*+,|)".contains(c) || c.is_whitespace())
                .unwrap_or(rest.len());
            if end == 0 {
                return Err(format!("expected a name in content model near {rest}"));
            }
            (Cm::Name(rest[..end].to_string()), &rest[end..])
        };
        let mut tail = tail.trim_start();
        let item = match tail.chars().next() {
            Some('?') => {
                tail = &tail[1..];
                Cm::Opt(Box::new(item))
            }
            Some('*') => {
                tail = &tail[1..];
                Cm::Star(Box::new(item))
            }
            Some('+') => {
                tail = &tail[1..];
                Cm::Plus(Box::new(item))
            }
            _ => item,
        };
        items.push(item);
        let tail2 = tail.trim_start();
        match tail2.chars().next() {
            Some(',') => {
                if sep == Some('|') {
                    return Err("mixed ',' and '|' in one group".into());
                }
                sep = Some(',');
                rest = &tail2[1..];
            }
            Some('|') => {
                if sep == Some(',') {
                    return Err("mixed ',' and '|' in one group".into());
                }
                sep = Some('|');
                rest = &tail2[1..];
            }
            Some(')') => {
                let mut after = &tail2[1..];
                let group = match sep {
                    Some('|') => Cm::Choice(items),
                    _ if items.len() == 1 => items.pop().unwrap(),
                    _ => Cm::Seq(items),
                };
                let group = match after.trim_start().chars().next() {
                    Some('?') => {
                        after = &after.trim_start()[1..];
                        Cm::Opt(Box::new(group))
                    }
                    Some('*') => {
                        after = &after.trim_start()[1..];
                        Cm::Star(Box::new(group))
                    }
                    Some('+') => {
                        after = &after.trim_start()[1..];
                        Cm::Plus(Box::new(group))
                    }
                    _ => group,
                };
                return Ok((group, after));
            }
            other => return Err(format!("unexpected {other:?} in content model")),
        }
    }
}

/// End positions reachable by matching `cm` against `names[pos..]`.
fn match_cm(cm: &Cm, names: &[&str], pos: usize) -> Vec<usize> {
    match cm {
        Cm::Name(n) => {
            if pos < names.len() && names[pos] == n {
                vec![pos + 1]
            } else {
                vec![]
            }
        }
        Cm::Seq(items) => {
            let mut fronts = vec![pos];
            for item in items {
                let mut next = Vec::new();
                for &f in &fronts {
                    for e in match_cm(item, names, f) {
                        if !next.contains(&e) {
                            next.push(e);
                        }
                    }
                }
                fronts = next;
                if fronts.is_empty() {
                    break;
                }
            }
            fronts
        }
        Cm::Choice(items) => {
            let mut out = Vec::new();
            for item in items {
                for e in match_cm(item, names, pos) {
                    if !out.contains(&e) {
                        out.push(e);
                    }
                }
            }
            out
        }
        Cm::Opt(inner) => {
            let mut out = vec![pos];
            for e in match_cm(inner, names, pos) {
                if !out.contains(&e) {
                    out.push(e);
                }
            }
            out
        }
        Cm::Star(inner) => {
            let mut out = vec![pos];
            let mut frontier = vec![pos];
            while let Some(f) = frontier.pop() {
                for e in match_cm(inner, names, f) {
                    if e > f && !out.contains(&e) {
                        out.push(e);
                        frontier.push(e);
                    }
                }
            }
            out
        }
        Cm::Plus(inner) => {
            let star = Cm::Star(inner.clone());
            let mut out = Vec::new();
            for e in match_cm(inner, names, pos) {
                for e2 in match_cm(&star, names, e) {
                    if !out.contains(&e2) {
                        out.push(e2);
                    }
                }
            }
            out
        }
    }
}

/// Validates `root` against the DTD; an empty list means valid.
pub fn validate(dtd: &Dtd, root: &Element) -> Vec<String> {
    let mut out = Vec::new();
    walk(dtd, root, root.name.clone(), &mut out);
    out
}

fn walk(dtd: &Dtd, e: &Element, path: String, out: &mut Vec<String>) {
    // xmlns declarations are not attributes in the DTD sense.
    let attrs: Vec<&(String, String)> = e
        .attrs
        .iter()
        .filter(|(n, _)| n != "xmlns" && !n.starts_with("xmlns:"))
        .collect();
    match dtd.attlists.get(&e.name) {
        Some(defs) => {
            for (n, v) in &attrs {
                match defs.iter().find(|d| d.name == *n) {
                    None => out.push(format!("{path}: undeclared attribute {n}")),
                    Some(d) => {
                        if let AttType::Enum(vals) = &d.ty {
                            if !vals.iter().any(|x| x == v) {
                                out.push(format!(
                                    "{path}: attribute {n} has value {v}, expected one of {}",
                                    vals.join("|")
                                ));
                            }
                        }
                    }
                }
            }
            for d in defs {
                if d.default == AttDefault::Required && !attrs.iter().any(|(n, _)| *n == d.name) {
                    out.push(format!("{path}: missing required attribute {}", d.name));
                }
            }
        }
        None => {
            if !attrs.is_empty() {
                out.push(format!("{path}: element declares no attributes"));
            }
        }
    }

    let Some(model) = dtd.elements.get(&e.name) else {
        out.push(format!("{path}: undeclared element {}", e.name));
        return;
    };
    let child_names: Vec<&str> = e
        .child_elements()
        .map(|c| c.name.as_str())
        .collect();
    let has_text = e
        .children
        .iter()
        .any(|n| matches!(n, XmlNode::Text(t) if !t.chars().all(char::is_whitespace)));
    match model {
        ContentModel::Empty => {
            if !e.children.is_empty() {
                out.push(format!("{path}: element {} must be empty", e.name));
            }
        }
        ContentModel::PcData => {
            if !child_names.is_empty() {
                out.push(format!("{path}: element {} allows text only", e.name));
            }
        }
        ContentModel::Children(cm) => {
            if has_text {
                out.push(format!("{path}: unexpected text content in {}", e.name));
            }
            let ends = match_cm(cm, &child_names, 0);
            if !ends.contains(&child_names.len()) {
                out.push(format!(
                    "{path}: children ({}) do not match the content model of {}",
                    child_names.join(", "),
                    e.name
                ));
            }
        }
    }
    let mut counters: BTreeMap<&str, usize> = BTreeMap::new();
    for c in e.child_elements() {
        let k = counters.entry(c.name.as_str()).or_insert(0);
        let sub = format!("{path}/{}[{}]", c.name, k);
        *k += 1;
        walk(dtd, c, sub, out);
    }
}
