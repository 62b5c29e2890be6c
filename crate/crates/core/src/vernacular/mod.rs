//! The interchange document: frontpage metadata, a theory, and chapters of
//! theorems (with proofs) or conjectures. Documents serialize to XML
//! conforming to the bundled Vernacular.dtd, parse back structurally equal,
//! and re-serialize byte-identically. Frontpage and theory can be emitted
//! as separate files referenced through xi:include.

mod dtd;
mod xml;

pub use dtd::{parse_dtd, Dtd};
pub use xml::{parse_xml, Element, XmlDocument, XmlNode};

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::logic::{
    Atom, Binding, CoherentFormula, Constant, Disjunct, NamedFormula, PredicateSymbol, Role,
    Signature, Term, Theory, Variable,
};
use crate::proof::{
    check_proof, CheckResult, ClosingKind, Outcome, ProofClosing, ProofStep, ProofTree, StepKind,
};

/// The schema file this module serializes against, embedded verbatim.
pub fn bundled_dtd() -> &'static str {
    include_str!("../../assets/Vernacular.dtd")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frontpage {
    pub author: String,
    pub prover: String,
    pub date: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChapterItem {
    /// Role Theorem when proofs are present, Conjecture otherwise.
    pub formula: NamedFormula,
    pub proofs: Vec<ProofTree>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chapter {
    pub name: String,
    pub items: Vec<ChapterItem>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VernacularDocument {
    pub frontpage: Frontpage,
    pub theory: Theory,
    pub chapters: Vec<Chapter>,
}

#[derive(Debug, Error)]
pub enum DocumentError {
    #[error("xml error: {0}")]
    Xml(String),
    #[error("schema violations:\n{}", .0.join("\n"))]
    Schema(Vec<String>),
    #[error("cannot include {href}: {message}")]
    Include { href: String, message: String },
    #[error("include cycle through {0}")]
    IncludeCycle(String),
    #[error("{context}: reference to unknown name {name}")]
    DanglingReference { context: String, name: String },
    #[error("malformed document: {0}")]
    Malformed(String),
}

/// Supplies the text of an xi:include target.
pub trait HrefResolver {
    fn resolve(&self, href: &str) -> Result<String, String>;
}

/// Map-backed resolver for tests and in-memory use.
pub struct MapHrefResolver(pub HashMap<String, String>);

impl HrefResolver for MapHrefResolver {
    fn resolve(&self, href: &str) -> Result<String, String> {
        self.0
            .get(href)
            .cloned()
            .ok_or_else(|| format!("no such file {href}"))
    }
}

/// Resolver that refuses every include (for self-contained documents).
pub struct NoIncludes;

impl HrefResolver for NoIncludes {
    fn resolve(&self, href: &str) -> Result<String, String> {
        Err(format!("document must be self-contained (tried {href})"))
    }
}

impl VernacularDocument {
    /// Formula lookup across theory axioms and chapter theorems.
    pub fn formula_named(&self, name: &str) -> Option<&CoherentFormula> {
        if let Some(a) = self.theory.axiom(name) {
            return Some(&a.formula);
        }
        for ch in &self.chapters {
            for item in &ch.items {
                if item.formula.name == name {
                    return Some(&item.formula.formula);
                }
            }
        }
        None
    }

    /// Replays every proof with the independent checker; theorems proved
    /// earlier in the document are available as axioms to later ones.
    pub fn check(&self) -> Vec<(String, CheckResult)> {
        let mut out = Vec::new();
        let mut theory = self.theory.clone();
        for ch in &self.chapters {
            for item in &ch.items {
                for proof in &item.proofs {
                    out.push((
                        item.formula.name.clone(),
                        check_proof(&theory, &item.formula, proof),
                    ));
                }
                if !item.proofs.is_empty() {
                    theory.axioms.push(NamedFormula {
                        name: item.formula.name.clone(),
                        role: Role::Theorem,
                        formula: item.formula.formula.clone(),
                    });
                }
            }
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Serialization

const XML_HEADER: &str = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n\
                          <!DOCTYPE main SYSTEM \"Vernacular.dtd\">\n";

pub fn serialize_document(d: &VernacularDocument) -> String {
    let mut out = String::new();
    out.push_str(XML_HEADER);
    out.push_str("<main>\n");
    write_frontpage(&mut out, &d.frontpage);
    write_theory(&mut out, &d.theory);
    write_chapters(&mut out, d);
    out.push_str("</main>\n");
    out
}

pub struct SplitDocument {
    pub main: String,
    pub frontpage: String,
    pub theory: String,
}

/// Emits the document as three files, the main one referencing the shared
/// frontpage and theory through xi:include.
pub fn serialize_document_split(
    d: &VernacularDocument,
    frontpage_href: &str,
    theory_href: &str,
) -> SplitDocument {
    let mut main = String::new();
    main.push_str(XML_HEADER);
    main.push_str("<main>\n");
    for href in [frontpage_href, theory_href] {
        let _ = writeln!(
            main,
            "<xi:include href=\"{}\" parse=\"xml\" xmlns:xi=\"http://www.w3.org/2003/XInclude\"/>",
            xml::escape_attr(href)
        );
    }
    write_chapters(&mut main, d);
    main.push_str("</main>\n");

    let mut frontpage = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    write_frontpage(&mut frontpage, &d.frontpage);
    let mut theory = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    write_theory(&mut theory, &d.theory);
    SplitDocument {
        main,
        frontpage,
        theory,
    }
}

fn write_chapters(out: &mut String, d: &VernacularDocument) {
    let witness_sorts = WitnessSorts::build(d);
    for ch in &d.chapters {
        let _ = writeln!(out, "<chapter name=\"{}\">", xml::escape_attr(&ch.name));
        for item in &ch.items {
            if item.proofs.is_empty() {
                out.push_str("<conjecture>\n");
                let _ = writeln!(out, "<name>{}</name>", xml::escape_text(&item.formula.name));
                write_formula(out, &item.formula.formula);
                out.push_str("</conjecture>\n");
            } else {
                out.push_str("<theorem>\n");
                let _ = writeln!(
                    out,
                    "<theorem_name>{}</theorem_name>",
                    xml::escape_text(&item.formula.name)
                );
                write_formula(out, &item.formula.formula);
                for proof in &item.proofs {
                    write_proof(out, proof, &witness_sorts);
                }
                out.push_str("</theorem>\n");
            }
        }
        out.push_str("</chapter>\n");
    }
}

fn write_frontpage(out: &mut String, f: &Frontpage) {
    out.push_str("<frontpage>\n");
    let _ = writeln!(out, "<author>{}</author>", xml::escape_text(&f.author));
    let _ = writeln!(
        out,
        "<prover_name>{}</prover_name>",
        xml::escape_text(&f.prover)
    );
    let _ = writeln!(out, "<date>{}</date>", xml::escape_text(&f.date));
    out.push_str("</frontpage>\n");
}

fn write_theory(out: &mut String, t: &Theory) {
    out.push_str("<theory>\n");
    let _ = writeln!(out, "<theory_name>{}</theory_name>", xml::escape_text(&t.name));
    out.push_str("<signature>\n");
    for s in &t.signature.sorts {
        let _ = writeln!(out, "<type>{}</type>", xml::escape_text(s));
    }
    for p in &t.signature.predicates {
        let mut attrs = format!(" name=\"{}\"", xml::escape_attr(&p.name));
        if p.is_equality {
            attrs.push_str(" equality=\"true\"");
        }
        if let Some(q) = &p.negated_partner {
            let _ = write!(attrs, " negation_of=\"{}\"", xml::escape_attr(q));
        }
        let types: String = p
            .arg_sorts
            .iter()
            .map(|s| format!("<type>{}</type>", xml::escape_text(s)))
            .collect();
        let _ = writeln!(out, "<relation_symbol{attrs}>{types}</relation_symbol>");
    }
    for c in &t.signature.constants {
        let _ = writeln!(
            out,
            "<constant name=\"{}\"><type>{}</type></constant>",
            xml::escape_attr(&c.name),
            xml::escape_text(&c.sort)
        );
    }
    out.push_str("</signature>\n");
    for a in &t.axioms {
        let role = match a.role {
            Role::Axiom => String::new(),
            other => format!(" role=\"{}\"", other.as_str()),
        };
        let _ = writeln!(out, "<axiom name=\"{}\"{role}>", xml::escape_attr(&a.name));
        write_formula(out, &a.formula);
        out.push_str("</axiom>\n");
    }
    out.push_str("</theory>\n");
}

fn atom_inline(a: &Atom) -> String {
    debug_assert!(!a.negated, "document atoms carry no negation markers");
    let mut s = format!("<atom predicate=\"{}\">", xml::escape_attr(&a.predicate));
    for t in &a.args {
        let (kind, name) = match t {
            Term::Constant(n) => ("constant", n),
            Term::Variable(n) => ("variable", n),
        };
        let _ = write!(s, "<arg kind=\"{kind}\" name=\"{}\"/>", xml::escape_attr(name));
    }
    s.push_str("</atom>");
    s
}

fn write_formula(out: &mut String, f: &CoherentFormula) {
    out.push_str("<cl_formula>\n");
    for v in &f.universal_vars {
        let _ = writeln!(
            out,
            "<universal_variable name=\"{}\" type=\"{}\"/>",
            xml::escape_attr(&v.name),
            xml::escape_attr(&v.sort)
        );
    }
    out.push_str("<premise>\n");
    for a in &f.premises {
        let _ = writeln!(out, "{}", atom_inline(a));
    }
    out.push_str("</premise>\n");
    out.push_str("<conclusion>\n");
    for d in &f.conclusion {
        write_disjunct(out, d);
    }
    out.push_str("</conclusion>\n");
    out.push_str("</cl_formula>\n");
}

fn write_disjunct(out: &mut String, d: &Disjunct) {
    out.push_str("<disjunct>\n");
    for v in &d.existential_vars {
        let _ = writeln!(
            out,
            "<existential_variable name=\"{}\" type=\"{}\"/>",
            xml::escape_attr(&v.name),
            xml::escape_attr(&v.sort)
        );
    }
    for a in &d.conjuncts {
        let _ = writeln!(out, "{}", atom_inline(a));
    }
    out.push_str("</disjunct>\n");
}

fn write_ground_disjunct(out: &mut String, conjuncts: &[Atom]) {
    out.push_str("<disjunct>\n");
    for a in conjuncts {
        let _ = writeln!(out, "{}", atom_inline(a));
    }
    out.push_str("</disjunct>\n");
}

/// Sort lookup for witness constants: maps each theorem/axiom name to the
/// sorts of its conclusion existentials, in introduction order.
struct WitnessSorts(HashMap<String, Vec<String>>);

impl WitnessSorts {
    fn build(d: &VernacularDocument) -> Self {
        let mut map = HashMap::new();
        let mut add = |nf: &NamedFormula| {
            let sorts: Vec<String> = nf
                .formula
                .conclusion
                .iter()
                .flat_map(|dj| dj.existential_vars.iter().map(|v| v.sort.clone()))
                .collect();
            map.insert(nf.name.clone(), sorts);
        };
        for a in &d.theory.axioms {
            add(a);
        }
        for ch in &d.chapters {
            for item in &ch.items {
                add(&item.formula);
            }
        }
        WitnessSorts(map)
    }

    fn sort_of(&self, axiom: &str, index: usize) -> Option<&str> {
        self.0
            .get(axiom)
            .and_then(|v| v.get(index))
            .map(String::as_str)
    }
}

fn write_proof(out: &mut String, p: &ProofTree, ws: &WitnessSorts) {
    out.push_str("<proof>\n");
    for s in &p.steps {
        write_step(out, s, ws);
    }
    write_closing(out, &p.closing, ws);
    if let Some(name) = &p.name {
        let _ = writeln!(out, "<proof_name name=\"{}\"/>", xml::escape_attr(name));
    }
    out.push_str("</proof>\n");
}

fn write_step(out: &mut String, s: &ProofStep, ws: &WitnessSorts) {
    out.push_str("<proof_step>\n");
    let _ = writeln!(out, "<indentation>{}</indentation>", s.indentation);
    match &s.kind {
        StepKind::ModusPonens {
            axiom,
            binding,
            premises,
            derived,
            witnesses,
        } => {
            let _ = writeln!(out, "<modus_ponens axiom=\"{}\">", xml::escape_attr(axiom));
            for (v, c) in binding {
                let _ = writeln!(
                    out,
                    "<instantiation variable=\"{}\" constant=\"{}\"/>",
                    xml::escape_attr(v),
                    xml::escape_attr(c)
                );
            }
            for a in premises {
                let _ = writeln!(out, "<from_fact>{}</from_fact>", atom_inline(a));
            }
            out.push_str("<derived>\n");
            for dj in derived {
                write_ground_disjunct(out, dj);
            }
            out.push_str("</derived>\n");
            for (i, w) in witnesses.iter().enumerate() {
                let ty = ws
                    .sort_of(axiom, i)
                    .map(|s| format!(" type=\"{}\"", xml::escape_attr(s)))
                    .unwrap_or_default();
                let _ = writeln!(out, "<witness name=\"{}\"{ty}/>", xml::escape_attr(w));
            }
            out.push_str("</modus_ponens>\n");
        }
        StepKind::EqualitySubstitution {
            source,
            equations,
            derived,
            display_order,
        } => {
            out.push_str("<modus_ponens kind=\"equality_substitution\">\n");
            for &role in display_order {
                let (attr, atom) = if role == 0 {
                    ("source", source)
                } else {
                    ("equation", &equations[role - 1])
                };
                let _ = writeln!(
                    out,
                    "<from_fact role=\"{attr}\">{}</from_fact>",
                    atom_inline(atom)
                );
            }
            out.push_str("<derived>\n");
            write_ground_disjunct(out, std::slice::from_ref(derived));
            out.push_str("</derived>\n");
            out.push_str("</modus_ponens>\n");
        }
    }
    out.push_str("</proof_step>\n");
}

fn write_closing(out: &mut String, c: &ProofClosing, ws: &WitnessSorts) {
    out.push_str("<proof_closing>\n");
    let _ = writeln!(out, "<indentation>{}</indentation>", c.indentation);
    match &c.kind {
        ClosingKind::CaseSplit {
            disjunction,
            branches,
        } => {
            out.push_str("<case_split>\n");
            for dj in disjunction {
                write_ground_disjunct(out, dj);
            }
            for b in branches {
                write_proof(out, b, ws);
            }
            out.push_str("</case_split>\n");
        }
        ClosingKind::From {
            facts,
            disjunct_index,
            witness_binding,
        } => {
            let _ = writeln!(out, "<from disjunct_index=\"{disjunct_index}\">");
            for a in facts {
                let _ = writeln!(out, "<from_fact>{}</from_fact>", atom_inline(a));
            }
            for (v, w) in witness_binding {
                let _ = writeln!(
                    out,
                    "<witness_binding variable=\"{}\" constant=\"{}\"/>",
                    xml::escape_attr(v),
                    xml::escape_attr(w)
                );
            }
            out.push_str("</from>\n");
        }
        ClosingKind::Efq { facts } => {
            out.push_str("<efq>\n");
            for a in facts {
                let _ = writeln!(out, "<from_fact>{}</from_fact>", atom_inline(a));
            }
            out.push_str("</efq>\n");
        }
    }
    let tag = match c.outcome {
        Outcome::GoalReachedThesis => "goal_reached_thesis",
        Outcome::GoalReachedContradiction => "goal_reached_contradiction",
    };
    let _ = writeln!(out, "<{tag}/>");
    out.push_str("</proof_closing>\n");
}

// ---------------------------------------------------------------------------
// Validation and parsing

/// Pure schema check against the bundled DTD; an empty list means valid.
/// Includes are not resolved (xi:include is part of the schema).
pub fn validate_document(xml_text: &str) -> Vec<String> {
    let doc = match parse_xml(xml_text) {
        Ok(d) => d,
        Err(e) => return vec![format!("not well-formed: {e}")],
    };
    let dtd = parse_dtd(bundled_dtd()).expect("bundled DTD parses");
    dtd::validate(&dtd, &doc.root)
}

/// Parses a document, resolving xi:include references, validating against
/// the schema, and rebuilding the domain structures.
pub fn parse_document(
    xml_text: &str,
    resolver: &dyn HrefResolver,
) -> Result<VernacularDocument, DocumentError> {
    let doc = parse_xml(xml_text).map_err(|e| DocumentError::Xml(e.to_string()))?;
    let mut root = doc.root;
    let mut stack: Vec<String> = Vec::new();
    resolve_includes(&mut root, resolver, &mut stack)?;
    let dtd = parse_dtd(bundled_dtd()).expect("bundled DTD parses");
    let violations = dtd::validate(&dtd, &root);
    if !violations.is_empty() {
        return Err(DocumentError::Schema(violations));
    }
    convert_document(&root)
}

fn resolve_includes(
    e: &mut Element,
    resolver: &dyn HrefResolver,
    stack: &mut Vec<String>,
) -> Result<(), DocumentError> {
    for node in &mut e.children {
        let XmlNode::Element(child) = node else { continue };
        if child.name == "xi:include" {
            let href = child
                .attr("href")
                .ok_or_else(|| DocumentError::Malformed("xi:include without href".into()))?
                .to_string();
            if stack.contains(&href) {
                return Err(DocumentError::IncludeCycle(href));
            }
            let text = resolver
                .resolve(&href)
                .map_err(|message| DocumentError::Include {
                    href: href.clone(),
                    message,
                })?;
            let parsed = parse_xml(&text).map_err(|err| DocumentError::Include {
                href: href.clone(),
                message: err.to_string(),
            })?;
            let mut replacement = parsed.root;
            stack.push(href);
            resolve_includes(&mut replacement, resolver, stack)?;
            stack.pop();
            *node = XmlNode::Element(replacement);
        } else {
            resolve_includes(child, resolver, stack)?;
        }
    }
    Ok(())
}

struct Conv;

impl Conv {
    fn err<T>(path: &str, message: impl Into<String>) -> Result<T, DocumentError> {
        Err(DocumentError::Malformed(format!("{path}: {}", message.into())))
    }

    fn required<'a>(e: &'a Element, name: &str, path: &str) -> Result<&'a Element, DocumentError> {
        e.child_elements()
            .find(|c| c.name == name)
            .ok_or_else(|| DocumentError::Malformed(format!("{path}: missing {name}")))
    }

    fn attr(e: &Element, name: &str, path: &str) -> Result<String, DocumentError> {
        e.attr(name)
            .map(str::to_string)
            .ok_or_else(|| DocumentError::Malformed(format!("{path}: missing attribute {name}")))
    }
}

fn convert_document(root: &Element) -> Result<VernacularDocument, DocumentError> {
    if root.name != "main" {
        return Conv::err("/", format!("document element is {}, expected main", root.name));
    }
    let fp = Conv::required(root, "frontpage", "main")?;
    let frontpage = Frontpage {
        author: Conv::required(fp, "author", "frontpage")?.text(),
        prover: Conv::required(fp, "prover_name", "frontpage")?.text(),
        date: Conv::required(fp, "date", "frontpage")?.text(),
    };
    let theory = convert_theory(Conv::required(root, "theory", "main")?)?;
    let mut chapters = Vec::new();
    for ch in root.child_elements().filter(|c| c.name == "chapter") {
        let name = Conv::attr(ch, "name", "chapter")?;
        let mut items = Vec::new();
        for item in ch.child_elements() {
            match item.name.as_str() {
                "theorem" => {
                    let tname = Conv::required(item, "theorem_name", "theorem")?.text();
                    let formula =
                        convert_formula(Conv::required(item, "cl_formula", "theorem")?)?;
                    let proofs = item
                        .child_elements()
                        .filter(|c| c.name == "proof")
                        .map(convert_proof)
                        .collect::<Result<Vec<_>, _>>()?;
                    items.push(ChapterItem {
                        formula: NamedFormula {
                            name: tname,
                            role: Role::Theorem,
                            formula,
                        },
                        proofs,
                    });
                }
                "conjecture" => {
                    let cname = Conv::required(item, "name", "conjecture")?.text();
                    let formula =
                        convert_formula(Conv::required(item, "cl_formula", "conjecture")?)?;
                    items.push(ChapterItem {
                        formula: NamedFormula {
                            name: cname,
                            role: Role::Conjecture,
                            formula,
                        },
                        proofs: vec![],
                    });
                }
                other => return Conv::err("chapter", format!("unexpected element {other}")),
            }
        }
        chapters.push(Chapter { name, items });
    }
    let doc = VernacularDocument {
        frontpage,
        theory,
        chapters,
    };
    check_references(&doc)?;
    Ok(doc)
}

fn convert_theory(e: &Element) -> Result<Theory, DocumentError> {
    let name = Conv::required(e, "theory_name", "theory")?.text();
    let sig_el = Conv::required(e, "signature", "theory")?;
    let mut signature = Signature::default();
    for c in sig_el.child_elements() {
        match c.name.as_str() {
            "type" => signature.sorts.push(c.text()),
            "relation_symbol" => {
                let pname = Conv::attr(c, "name", "relation_symbol")?;
                signature.predicates.push(PredicateSymbol {
                    name: pname,
                    arg_sorts: c
                        .child_elements()
                        .filter(|t| t.name == "type")
                        .map(|t| t.text())
                        .collect(),
                    is_equality: c.attr("equality") == Some("true"),
                    negated_partner: c.attr("negation_of").map(str::to_string),
                });
            }
            "constant" => {
                signature.constants.push(Constant {
                    name: Conv::attr(c, "name", "constant")?,
                    sort: Conv::required(c, "type", "constant")?.text(),
                });
            }
            other => return Conv::err("signature", format!("unexpected element {other}")),
        }
    }
    let mut axioms = Vec::new();
    for a in e.child_elements().filter(|c| c.name == "axiom") {
        let aname = Conv::attr(a, "name", "axiom")?;
        let role = match a.attr("role") {
            None | Some("axiom") => Role::Axiom,
            Some("definition") => Role::Definition,
            Some("theorem") => Role::Theorem,
            Some(other) => return Conv::err("axiom", format!("unexpected role {other}")),
        };
        axioms.push(NamedFormula {
            name: aname,
            role,
            formula: convert_formula(Conv::required(a, "cl_formula", "axiom")?)?,
        });
    }
    Ok(Theory {
        name,
        signature,
        axioms,
    })
}

fn convert_atom(e: &Element) -> Result<Atom, DocumentError> {
    let predicate = Conv::attr(e, "predicate", "atom")?;
    let mut args = Vec::new();
    for arg in e.child_elements().filter(|c| c.name == "arg") {
        let name = Conv::attr(arg, "name", "arg")?;
        match arg.attr("kind") {
            Some("constant") => args.push(Term::Constant(name)),
            Some("variable") => args.push(Term::Variable(name)),
            other => return Conv::err("arg", format!("unexpected kind {other:?}")),
        }
    }
    Ok(Atom {
        predicate,
        args,
        negated: false,
    })
}

fn convert_var(e: &Element) -> Result<Variable, DocumentError> {
    Ok(Variable {
        name: Conv::attr(e, "name", "variable")?,
        sort: e.attr("type").unwrap_or("point").to_string(),
    })
}

fn convert_disjunct(e: &Element) -> Result<Disjunct, DocumentError> {
    let mut existential_vars = Vec::new();
    let mut conjuncts = Vec::new();
    for c in e.child_elements() {
        match c.name.as_str() {
            "existential_variable" => existential_vars.push(convert_var(c)?),
            "atom" => conjuncts.push(convert_atom(c)?),
            other => return Conv::err("disjunct", format!("unexpected element {other}")),
        }
    }
    Ok(Disjunct {
        existential_vars,
        conjuncts,
    })
}

fn convert_formula(e: &Element) -> Result<CoherentFormula, DocumentError> {
    let universal_vars = e
        .child_elements()
        .filter(|c| c.name == "universal_variable")
        .map(convert_var)
        .collect::<Result<Vec<_>, _>>()?;
    let premises = Conv::required(e, "premise", "cl_formula")?
        .child_elements()
        .map(convert_atom)
        .collect::<Result<Vec<_>, _>>()?;
    let conclusion = Conv::required(e, "conclusion", "cl_formula")?
        .child_elements()
        .map(convert_disjunct)
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CoherentFormula {
        universal_vars,
        premises,
        conclusion,
    })
}

fn convert_ground_disjunct(e: &Element) -> Result<Vec<Atom>, DocumentError> {
    e.child_elements()
        .filter(|c| c.name == "atom")
        .map(convert_atom)
        .collect()
}

fn parse_indentation(e: &Element, path: &str) -> Result<u32, DocumentError> {
    let text = Conv::required(e, "indentation", path)?.text();
    text.trim()
        .parse()
        .map_err(|_| DocumentError::Malformed(format!("{path}: bad indentation {text}")))
}

fn convert_proof(e: &Element) -> Result<ProofTree, DocumentError> {
    let mut steps = Vec::new();
    let mut closing = None;
    let mut name = None;
    for c in e.child_elements() {
        match c.name.as_str() {
            "proof_step" => steps.push(convert_step(c)?),
            "proof_closing" => closing = Some(convert_closing(c)?),
            "proof_name" => name = Some(Conv::attr(c, "name", "proof_name")?),
            other => return Conv::err("proof", format!("unexpected element {other}")),
        }
    }
    Ok(ProofTree {
        steps,
        closing: closing
            .ok_or_else(|| DocumentError::Malformed("proof: missing proof_closing".into()))?,
        name,
    })
}

fn convert_step(e: &Element) -> Result<ProofStep, DocumentError> {
    let indentation = parse_indentation(e, "proof_step")?;
    let mp = Conv::required(e, "modus_ponens", "proof_step")?;
    let derived_el = Conv::required(mp, "derived", "modus_ponens")?;
    let derived: Vec<Vec<Atom>> = derived_el
        .child_elements()
        .filter(|c| c.name == "disjunct")
        .map(convert_ground_disjunct)
        .collect::<Result<_, _>>()?;
    let kind = match mp.attr("kind") {
        None | Some("axiom_application") => {
            let axiom = Conv::attr(mp, "axiom", "modus_ponens")?;
            let mut binding = Binding::new();
            for i in mp.child_elements().filter(|c| c.name == "instantiation") {
                binding.insert(
                    Conv::attr(i, "variable", "instantiation")?,
                    Conv::attr(i, "constant", "instantiation")?,
                );
            }
            let premises = mp
                .child_elements()
                .filter(|c| c.name == "from_fact")
                .map(|f| convert_atom(Conv::required(f, "atom", "from_fact")?))
                .collect::<Result<Vec<_>, _>>()?;
            let witnesses = mp
                .child_elements()
                .filter(|c| c.name == "witness")
                .map(|w| Conv::attr(w, "name", "witness"))
                .collect::<Result<Vec<_>, _>>()?;
            StepKind::ModusPonens {
                axiom,
                binding,
                premises,
                derived,
                witnesses,
            }
        }
        Some("equality_substitution") => {
            let mut source = None;
            let mut equations = Vec::new();
            let mut display_order = Vec::new();
            for f in mp.child_elements().filter(|c| c.name == "from_fact") {
                let atom = convert_atom(Conv::required(f, "atom", "from_fact")?)?;
                match f.attr("role") {
                    Some("source") => {
                        if source.is_some() {
                            return Conv::err("modus_ponens", "two source facts");
                        }
                        display_order.push(0);
                        source = Some(atom);
                    }
                    Some("equation") => {
                        equations.push(atom);
                        display_order.push(equations.len());
                    }
                    other => {
                        return Conv::err(
                            "modus_ponens",
                            format!("substitution from_fact needs role source|equation, got {other:?}"),
                        )
                    }
                }
            }
            let source = source.ok_or_else(|| {
                DocumentError::Malformed("modus_ponens: substitution without a source".into())
            })?;
            if derived.len() != 1 || derived[0].len() != 1 {
                return Conv::err("modus_ponens", "substitution derives exactly one atom");
            }
            StepKind::EqualitySubstitution {
                source,
                equations,
                derived: derived[0][0].clone(),
                display_order,
            }
        }
        Some(other) => return Conv::err("modus_ponens", format!("unexpected kind {other}")),
    };
    Ok(ProofStep { kind, indentation })
}

fn convert_closing(e: &Element) -> Result<ProofClosing, DocumentError> {
    let indentation = parse_indentation(e, "proof_closing")?;
    let outcome = if e.child_elements().any(|c| c.name == "goal_reached_thesis") {
        Outcome::GoalReachedThesis
    } else if e
        .child_elements()
        .any(|c| c.name == "goal_reached_contradiction")
    {
        Outcome::GoalReachedContradiction
    } else {
        return Conv::err("proof_closing", "missing goal_reached marker");
    };
    let kind = if let Some(cs) = e.child_elements().find(|c| c.name == "case_split") {
        let disjunction = cs
            .child_elements()
            .filter(|c| c.name == "disjunct")
            .map(convert_ground_disjunct)
            .collect::<Result<Vec<_>, _>>()?;
        let branches = cs
            .child_elements()
            .filter(|c| c.name == "proof")
            .map(convert_proof)
            .collect::<Result<Vec<_>, _>>()?;
        ClosingKind::CaseSplit {
            disjunction,
            branches,
        }
    } else if let Some(fr) = e.child_elements().find(|c| c.name == "from") {
        let idx_text = Conv::attr(fr, "disjunct_index", "from")?;
        let disjunct_index = idx_text
            .parse()
            .map_err(|_| DocumentError::Malformed(format!("from: bad index {idx_text}")))?;
        let facts = fr
            .child_elements()
            .filter(|c| c.name == "from_fact")
            .map(|f| convert_atom(Conv::required(f, "atom", "from_fact")?))
            .collect::<Result<Vec<_>, _>>()?;
        let mut witness_binding = Binding::new();
        for wb in fr.child_elements().filter(|c| c.name == "witness_binding") {
            witness_binding.insert(
                Conv::attr(wb, "variable", "witness_binding")?,
                Conv::attr(wb, "constant", "witness_binding")?,
            );
        }
        ClosingKind::From {
            facts,
            disjunct_index,
            witness_binding,
        }
    } else if let Some(efq) = e.child_elements().find(|c| c.name == "efq") {
        let facts = efq
            .child_elements()
            .filter(|c| c.name == "from_fact")
            .map(|f| convert_atom(Conv::required(f, "atom", "from_fact")?))
            .collect::<Result<Vec<_>, _>>()?;
        ClosingKind::Efq { facts }
    } else {
        return Conv::err("proof_closing", "missing case_split, efq or from");
    };
    Ok(ProofClosing {
        kind,
        outcome,
        indentation,
    })
}

/// Every axiom name cited by a proof step must resolve to a theory axiom or
/// an earlier theorem.
fn check_references(d: &VernacularDocument) -> Result<(), DocumentError> {
    let mut known: Vec<&str> = d.theory.axioms.iter().map(|a| a.name.as_str()).collect();
    fn walk(
        p: &ProofTree,
        known: &[&str],
        item: &str,
    ) -> Result<(), DocumentError> {
        for s in &p.steps {
            if let StepKind::ModusPonens { axiom, .. } = &s.kind {
                if !known.contains(&axiom.as_str()) {
                    return Err(DocumentError::DanglingReference {
                        context: format!("proof of {item}"),
                        name: axiom.clone(),
                    });
                }
            }
        }
        if let ClosingKind::CaseSplit { branches, .. } = &p.closing.kind {
            for b in branches {
                walk(b, known, item)?;
            }
        }
        Ok(())
    }
    for ch in &d.chapters {
        for it in &ch.items {
            for proof in &it.proofs {
                walk(proof, &known, &it.formula.name)?;
            }
            if !it.proofs.is_empty() {
                known.push(it.formula.name.as_str());
            }
        }
    }
    Ok(())
}
