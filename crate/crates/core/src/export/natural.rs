//! Natural-language rendering: "From the fact(s) … it holds that …" lines
//! in LaTeX (one \proofstep per line), HTML (nested lists) and plain text.
//! Layout directives give predicates infix or pair-infix notation; equality
//! and disequality always print infix; a predicate standing for a negation
//! prints as the negation of its partner.

use std::fmt::Write as _;

use crate::logic::{Atom, CoherentFormula, Disjunct};
use crate::proof::{ClosingKind, ProofStep, ProofTree, StepKind};
use crate::vernacular::VernacularDocument;

use super::{Directive, DocContext, ExportError, LayoutConfig, RenderedArtifact};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NlTarget {
    Latex,
    Html,
    Plain,
}

pub fn export_natural_language(
    doc: &VernacularDocument,
    cfg: &LayoutConfig,
    target: NlTarget,
) -> Result<RenderedArtifact, ExportError> {
    cfg.validate_against(&doc.theory.signature)?;
    let ctx = DocContext::new(doc);
    let r = Renderer { ctx, cfg, target };
    match target {
        NlTarget::Latex => r.latex(),
        NlTarget::Plain => r.plain(),
        NlTarget::Html => r.html(),
    }
}

struct Renderer<'a> {
    ctx: DocContext<'a>,
    cfg: &'a LayoutConfig,
    target: NlTarget,
}

impl<'a> Renderer<'a> {
    // ---- atom and formula rendering -------------------------------------

    fn term_list(names: &[&str]) -> String {
        names.join(", ")
    }

    /// A group of a pair-infix layout: single-letter names juxtapose.
    fn group(names: &[&str]) -> String {
        if names.iter().all(|n| n.chars().count() == 1) {
            names.concat()
        } else {
            format!("({})", names.join(","))
        }
    }

    fn atom(&self, a: &Atom) -> String {
        let names: Vec<&str> = a.args.iter().map(|t| t.name()).collect();
        if self.ctx.is_eq(a) {
            return format!("{} = {}", names[0], names[1]);
        }
        if self.ctx.is_neq(a) {
            let neq = match self.target {
                NlTarget::Latex => "\\neq",
                _ => "\u{2260}",
            };
            return format!("{} {neq} {}", names[0], names[1]);
        }
        if let Some(pos) = self.ctx.negation_of(&a.predicate) {
            let inner = self.atom(&Atom {
                predicate: pos.to_string(),
                args: a.args.clone(),
                negated: false,
            });
            return match self.target {
                NlTarget::Latex => format!("\\neg {inner}"),
                NlTarget::Html => format!("\u{00ac}{inner}"),
                NlTarget::Plain => format!("~{inner}"),
            };
        }
        match self.cfg.entry_for(&a.predicate, a.args.len()) {
            Some(e) => match &e.directive {
                Directive::Functional => self.functional(&a.predicate, &names),
                Directive::Infix => {
                    let sym = e.symbols.for_target(self.target);
                    format!("{} {sym} {}", names[0], names[1])
                }
                Directive::PairInfix(sizes) => {
                    let sym = e.symbols.for_target(self.target);
                    let mut groups = Vec::new();
                    let mut at = 0;
                    for &s in sizes {
                        groups.push(Self::group(&names[at..at + s]));
                        at += s;
                    }
                    groups.join(&format!(" {sym} "))
                }
            },
            None => self.functional(&a.predicate, &names),
        }
    }

    fn functional(&self, pred: &str, names: &[&str]) -> String {
        if names.is_empty() {
            pred.to_string()
        } else {
            format!("{pred}({})", Self::term_list(names))
        }
    }

    /// Atom embedded in a sentence: LaTeX wraps it in math mode.
    fn fact(&self, a: &Atom) -> String {
        match self.target {
            NlTarget::Latex => format!("${}$", self.atom(a)),
            NlTarget::Html => html_escape(&self.atom(a)),
            NlTarget::Plain => self.atom(a),
        }
    }

    fn fact_list(&self, atoms: &[Atom]) -> String {
        atoms
            .iter()
            .map(|a| self.fact(a))
            .collect::<Vec<_>>()
            .join(" and ")
    }

    fn name(&self, n: &str) -> String {
        match self.target {
            NlTarget::Latex => format!("${}$", n.replace('_', "\\_")),
            NlTarget::Html => html_escape(n),
            NlTarget::Plain => n.to_string(),
        }
    }

    fn clause(&self, disjuncts: &[Vec<Atom>]) -> String {
        disjuncts
            .iter()
            .map(|c| self.fact_list(c))
            .collect::<Vec<_>>()
            .join(" or ")
    }

    fn goal_disjunct(&self, d: &Disjunct) -> String {
        let body = self.fact_list(&d.conjuncts);
        if d.existential_vars.is_empty() {
            body
        } else {
            let vars = d
                .existential_vars
                .iter()
                .map(|v| match self.target {
                    NlTarget::Latex => format!("${}$", v.name),
                    _ => v.name.clone(),
                })
                .collect::<Vec<_>>()
                .join(", ");
            format!("there exists {vars} such that {body}")
        }
    }

    /// "Assuming that … it holds that …" (the theorem statement sentence).
    fn statement(&self, f: &CoherentFormula) -> String {
        let concl = if f.conclusion.is_empty() {
            "we get a contradiction".to_string()
        } else {
            format!(
                "it holds that {}",
                f.conclusion
                    .iter()
                    .map(|d| self.goal_disjunct(d))
                    .collect::<Vec<_>>()
                    .join(" or ")
            )
        };
        if f.premises.is_empty() {
            let mut c = concl;
            if let Some(first) = c.get(..1) {
                let up = first.to_uppercase();
                c.replace_range(..1, &up);
            }
            format!("{c}.")
        } else {
            format!("Assuming that {} {concl}.", self.fact_list(&f.premises))
        }
    }

    // ---- proof lines -----------------------------------------------------

    fn step_sentence(&self, s: &ProofStep) -> String {
        match &s.kind {
            StepKind::ModusPonens {
                axiom,
                premises,
                derived,
                ..
            } => {
                let using = if self.ctx.is_decidability_axiom(axiom) {
                    String::new()
                } else {
                    format!(" (using {})", self.name(axiom))
                };
                if premises.is_empty() {
                    format!("It holds that {}{using}.", self.clause(derived))
                } else {
                    format!(
                        "From the fact(s) {} it holds that {}{using}.",
                        self.fact_list(premises),
                        self.clause(derived)
                    )
                }
            }
            StepKind::EqualitySubstitution {
                source,
                equations,
                derived,
                display_order,
            } => {
                let facts: Vec<Atom> = display_order
                    .iter()
                    .map(|&r| {
                        if r == 0 {
                            source.clone()
                        } else {
                            equations[r - 1].clone()
                        }
                    })
                    .collect();
                format!(
                    "From the fact(s) {} it holds that {}.",
                    self.fact_list(&facts),
                    self.fact(derived)
                )
            }
        }
    }

    /// Printed lines (level, sentence); steps of a proof under d splits sit
    /// at level 6d, branch headers at 6d+3.
    fn proof_lines(&self, tree: &ProofTree, depth: u32, out: &mut Vec<(u32, String)>) {
        let level = 6 * depth;
        for s in &tree.steps {
            out.push((level, self.step_sentence(s)));
        }
        match &tree.closing.kind {
            ClosingKind::From { facts, .. } => out.push((
                level,
                format!(
                    "The conclusion follows from the fact(s) {}.",
                    self.fact_list(facts)
                ),
            )),
            ClosingKind::Efq { facts } => out.push((
                level,
                format!("From the fact(s) {} we get contradiction.", self.fact_list(facts)),
            )),
            ClosingKind::CaseSplit {
                disjunction,
                branches,
            } => {
                for (disjunct, branch) in disjunction.iter().zip(branches) {
                    out.push((level + 3, format!("Assume that: {}.", self.fact_list(disjunct))));
                    self.proof_lines(branch, depth + 1, out);
                }
                out.push((level, "The conclusion follows in all cases.".to_string()));
            }
        }
    }

    // ---- whole-document assembly ------------------------------------------

    fn latex(&self) -> Result<RenderedArtifact, ExportError> {
        let mut out = String::new();
        out.push_str("% Natural-language proof export; requires clv_preamble.tex.\n");
        out.push_str("\\documentclass{article}\n\\input{clv_preamble}\n\\begin{document}\n");
        for ch in &self.ctx.doc.chapters {
            let _ = writeln!(out, "\n\\section*{{{}}}", ch.name.replace('_', "\\_"));
            for item in &ch.items {
                let env = if item.proofs.is_empty() { "conjecture" } else { "theorem" };
                let _ = writeln!(
                    out,
                    "\n\\begin{{{env}}}[{}]",
                    item.formula.name.replace('_', "\\_")
                );
                let _ = writeln!(out, "{}", self.statement(&item.formula.formula));
                let _ = writeln!(out, "\\end{{{env}}}");
                if let Some(proof) = item.proofs.first() {
                    out.push_str("\n{\\em Proof:}\n\n");
                    let mut lines = Vec::new();
                    self.proof_lines(proof, 0, &mut lines);
                    for (level, text) in lines {
                        let _ = writeln!(out, "\\proofstep{{{level}}} {{{text}}}");
                    }
                    out.push_str("\nQED\n");
                    if item.proofs.len() > 1 {
                        let _ = writeln!(
                            out,
                            "% {} alternative proof(s) not shown",
                            item.proofs.len() - 1
                        );
                    }
                }
            }
        }
        out.push_str("\n\\end{document}\n");
        Ok(RenderedArtifact {
            main_file: out,
            auxiliary_files: vec![(
                "clv_preamble.tex".to_string(),
                include_str!("../../assets/clv_preamble.tex").to_string(),
            )],
        })
    }

    fn plain(&self) -> Result<RenderedArtifact, ExportError> {
        let mut out = String::new();
        let mut first = true;
        for ch in &self.ctx.doc.chapters {
            for item in &ch.items {
                if !first {
                    out.push('\n');
                }
                first = false;
                let kind = if item.proofs.is_empty() { "Conjecture" } else { "Theorem" };
                let _ = writeln!(
                    out,
                    "{kind} {}: {}",
                    item.formula.name,
                    self.statement(&item.formula.formula)
                );
                if let Some(proof) = item.proofs.first() {
                    let mut lines = Vec::new();
                    self.proof_lines(proof, 0, &mut lines);
                    for (level, text) in lines {
                        let _ = writeln!(out, "{:indent$}{text}", "", indent = level as usize);
                    }
                }
            }
        }
        Ok(RenderedArtifact {
            main_file: out,
            auxiliary_files: vec![],
        })
    }

    fn html(&self) -> Result<RenderedArtifact, ExportError> {
        let mut out = String::new();
        out.push_str("<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\">\n");
        let _ = writeln!(out, "<title>{}</title>", html_escape(&self.ctx.doc.theory.name));
        out.push_str("</head>\n<body>\n");
        for ch in &self.ctx.doc.chapters {
            let _ = writeln!(out, "<h1>{}</h1>", html_escape(&ch.name));
            for item in &ch.items {
                let kind = if item.proofs.is_empty() { "Conjecture" } else { "Theorem" };
                let _ = writeln!(
                    out,
                    "<div class=\"theorem\"><b>{kind}</b> ({}). {}</div>",
                    html_escape(&item.formula.name),
                    self.statement(&item.formula.formula)
                );
                if let Some(proof) = item.proofs.first() {
                    out.push_str("<p><em>Proof:</em></p>\n");
                    self.html_proof(&mut out, proof);
                    out.push_str("<p>QED</p>\n");
                    if item.proofs.len() > 1 {
                        let _ = writeln!(
                            out,
                            "<!-- {} alternative proof(s) not shown -->",
                            item.proofs.len() - 1
                        );
                    }
                }
            }
        }
        out.push_str("</body>\n</html>\n");
        Ok(RenderedArtifact {
            main_file: out,
            auxiliary_files: vec![],
        })
    }

    fn html_proof(&self, out: &mut String, tree: &ProofTree) {
        out.push_str("<ul>\n");
        for s in &tree.steps {
            let _ = writeln!(out, "<li>{}</li>", self.step_sentence(s));
        }
        match &tree.closing.kind {
            ClosingKind::From { facts, .. } => {
                let _ = writeln!(
                    out,
                    "<li>The conclusion follows from the fact(s) {}.</li>",
                    self.fact_list(facts)
                );
            }
            ClosingKind::Efq { facts } => {
                let _ = writeln!(
                    out,
                    "<li>From the fact(s) {} we get contradiction.</li>",
                    self.fact_list(facts)
                );
            }
            ClosingKind::CaseSplit {
                disjunction,
                branches,
            } => {
                for (disjunct, branch) in disjunction.iter().zip(branches) {
                    let _ = writeln!(out, "<li>Assume that: {}.", self.fact_list(disjunct));
                    self.html_proof(out, branch);
                    out.push_str("</li>\n");
                }
                out.push_str("<li>The conclusion follows in all cases.</li>\n");
            }
        }
        out.push_str("</ul>\n");
    }
}

fn html_escape(s: &str) -> String {
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
