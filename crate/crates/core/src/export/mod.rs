//! Text backends over vernacular documents: Isabelle/Isar theories, Coq
//! vernacular files (loading a static tactic prelude), and natural-language
//! renderings in LaTeX, HTML and plain text with configurable predicate
//! notation. All backends are pure functions of (document, config).

mod coq;
mod isar;
mod natural;

pub use coq::export_coq;
pub use isar::export_isar;
pub use natural::{export_natural_language, NlTarget};

use thiserror::Error;

use crate::logic::{is_equality_decidability, Atom, CoherentFormula, Signature};
use crate::vernacular::VernacularDocument;

#[derive(Debug, Error)]
pub enum ExportError {
    #[error("proof references missing item {0}")]
    MissingItem(String),
    #[error("layout error: {0}")]
    Layout(String),
}

/// One rendered backend output plus any companion files it relies on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenderedArtifact {
    pub main_file: String,
    /// (file name, content), e.g. the Coq tactic prelude.
    pub auxiliary_files: Vec<(String, String)>,
}

/// Per-predicate notation directive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Directive {
    Functional,
    /// Binary infix: `A sym B`.
    Infix,
    /// Arguments grouped (sizes summing to the arity), groups joined by the
    /// symbol; single-letter groups print juxtaposed (`AB ≅ CD`), longer
    /// names as tuples (`(p1,p2) ≅ (q1,q2)`).
    PairInfix(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SymbolSpec {
    pub default: String,
    pub latex: Option<String>,
    pub html: Option<String>,
    pub plain: Option<String>,
}

impl SymbolSpec {
    pub fn for_target(&self, target: NlTarget) -> &str {
        let over = match target {
            NlTarget::Latex => self.latex.as_deref(),
            NlTarget::Html => self.html.as_deref(),
            NlTarget::Plain => self.plain.as_deref(),
        };
        over.unwrap_or(&self.default)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayoutEntry {
    pub predicate: String,
    pub arity: usize,
    pub directive: Directive,
    pub symbols: SymbolSpec,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LayoutConfig {
    pub entries: Vec<LayoutEntry>,
}

impl LayoutConfig {
    /// Line format: `predicate/arity directive [symbol] [backend=symbol]...`
    /// with directives functional, infix and pairinfix(g1,g2,...);
    /// '#' starts a comment.
    pub fn parse(text: &str) -> Result<LayoutConfig, ExportError> {
        let mut entries = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |m: String| ExportError::Layout(format!("line {}: {m}", lineno + 1));
            let mut tokens = line.split_whitespace();
            let head = tokens.next().unwrap();
            let (predicate, arity) = head
                .split_once('/')
                .ok_or_else(|| err(format!("expected predicate/arity, got {head}")))?;
            let arity: usize = arity
                .parse()
                .map_err(|_| err(format!("bad arity in {head}")))?;
            let dir_tok = tokens
                .next()
                .ok_or_else(|| err("missing directive".into()))?;
            let directive = if dir_tok == "functional" {
                Directive::Functional
            } else if dir_tok == "infix" {
                Directive::Infix
            } else if let Some(groups) = dir_tok
                .strip_prefix("pairinfix(")
                .and_then(|s| s.strip_suffix(')'))
            {
                let sizes = groups
                    .split(',')
                    .map(|s| s.trim().parse::<usize>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|_| err(format!("bad group sizes in {dir_tok}")))?;
                Directive::PairInfix(sizes)
            } else {
                return Err(err(format!("unknown directive {dir_tok}")));
            };
            let mut symbols = SymbolSpec::default();
            for tok in tokens {
                match tok.split_once('=') {
                    Some(("latex", s)) => symbols.latex = Some(s.to_string()),
                    Some(("html", s)) => symbols.html = Some(s.to_string()),
                    Some(("plain", s)) => symbols.plain = Some(s.to_string()),
                    // Anything else (including bare "=") is the symbol itself.
                    _ => symbols.default = tok.to_string(),
                }
            }
            match &directive {
                Directive::Infix | Directive::PairInfix(_) if symbols.default.is_empty() => {
                    return Err(err("infix directives need a symbol".into()))
                }
                Directive::Infix if arity != 2 => {
                    return Err(err("infix needs arity 2".into()))
                }
                Directive::PairInfix(sizes) if sizes.iter().sum::<usize>() != arity => {
                    return Err(err(format!(
                        "group sizes of {predicate}/{arity} sum to {}",
                        sizes.iter().sum::<usize>()
                    )))
                }
                _ => {}
            }
            entries.push(LayoutEntry {
                predicate: predicate.to_string(),
                arity,
                directive,
                symbols,
            });
        }
        Ok(LayoutConfig { entries })
    }

    pub fn entry_for(&self, predicate: &str, arity: usize) -> Option<&LayoutEntry> {
        self.entries
            .iter()
            .find(|e| e.predicate == predicate && e.arity == arity)
    }

    /// Directives must reference declared predicates of the right arity.
    pub fn validate_against(&self, sig: &Signature) -> Result<(), ExportError> {
        for e in &self.entries {
            match sig.predicate(&e.predicate) {
                None => {
                    return Err(ExportError::Layout(format!(
                        "directive for undeclared predicate {}",
                        e.predicate
                    )))
                }
                Some(p) if p.arity() != e.arity => {
                    return Err(ExportError::Layout(format!(
                        "directive for {}/{} but the predicate has arity {}",
                        e.predicate,
                        e.arity,
                        p.arity()
                    )))
                }
                Some(_) => {}
            }
        }
        Ok(())
    }
}

/// Shared helpers the concrete backends build on.
pub(crate) struct DocContext<'a> {
    pub doc: &'a VernacularDocument,
}

impl<'a> DocContext<'a> {
    pub fn new(doc: &'a VernacularDocument) -> Self {
        DocContext { doc }
    }

    pub fn sig(&self) -> &Signature {
        &self.doc.theory.signature
    }

    pub fn formula(&self, name: &str) -> Result<&CoherentFormula, ExportError> {
        self.doc
            .formula_named(name)
            .ok_or_else(|| ExportError::MissingItem(name.to_string()))
    }

    /// Binding values in the axiom's binder order (for `applying (ax A B)`).
    pub fn binding_values(
        &self,
        axiom: &str,
        binding: &crate::logic::Binding,
    ) -> Result<Vec<String>, ExportError> {
        let f = self.formula(axiom)?;
        Ok(f.universal_vars
            .iter()
            .map(|v| binding.get(&v.name).cloned().unwrap_or_else(|| v.name.clone()))
            .collect())
    }

    /// True for the lazily applied excluded-middle axioms over equality;
    /// natural language omits their "(using …)" clause and Isar proves
    /// them natively.
    pub fn is_decidability_axiom(&self, name: &str) -> bool {
        self.doc
            .formula_named(name)
            .is_some_and(|f| is_equality_decidability(f, self.sig()))
    }

    /// For a predicate standing for a negation, the positive partner whose
    /// native negation renders it (disequality is handled separately).
    pub fn negation_of(&self, predicate: &str) -> Option<&str> {
        let p = self.sig().predicate(predicate)?;
        let partner = p.negated_partner.as_deref()?;
        if predicate == format!("{partner}_bar") {
            Some(partner)
        } else {
            None
        }
    }

    pub fn is_eq(&self, a: &Atom) -> bool {
        self.sig().is_equality(&a.predicate)
    }

    pub fn is_neq(&self, a: &Atom) -> bool {
        self.sig().is_disequality(&a.predicate)
    }
}
