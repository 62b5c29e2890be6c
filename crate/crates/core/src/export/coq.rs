//! Coq backend: one Theorem per proved item with a universally quantified
//! statement over a conjunctive hypothesis; forward steps as assert … by
//! applying (name args), equality substitutions by (substitution), splits
//! as by cases on (…) with brace-wrapped bullets. Assumptions are referred
//! to by their statement, never by name; the tactics live in ClTactics.v.

use std::fmt::Write as _;

use crate::logic::{Atom, CoherentFormula};
use crate::proof::{ClosingKind, ProofTree, StepKind};
use crate::vernacular::VernacularDocument;

use super::{DocContext, ExportError, RenderedArtifact};

pub fn export_coq(doc: &VernacularDocument, _stem: &str) -> Result<RenderedArtifact, ExportError> {
    let ctx = DocContext::new(doc);
    let mut out = String::new();
    out.push_str("(* Coq export; ClTactics.v provides the proof-step tactics. *)\n");
    out.push_str("Require Import ClTactics.\n\n");
    let sig = ctx.sig();
    for sort in &sig.sorts {
        let _ = writeln!(out, "Parameter {sort} : Set.");
    }
    for p in &sig.predicates {
        if sig.is_symmetric_binary(&p.name) || ctx.negation_of(&p.name).is_some() {
            continue; // native equality / native negation
        }
        let ty = p
            .arg_sorts
            .iter()
            .map(String::as_str)
            .chain(std::iter::once("Prop"))
            .collect::<Vec<_>>()
            .join(" -> ");
        let _ = writeln!(out, "Parameter {} : {ty}.", p.name);
    }
    out.push('\n');
    for a in &doc.theory.axioms {
        let _ = writeln!(out, "Axiom {} : {}.", a.name, axiom_formula(&ctx, &a.formula));
    }

    let mut fresh_hyp = 0usize;
    for ch in &doc.chapters {
        for item in &ch.items {
            out.push('\n');
            if item.proofs.is_empty() {
                let _ = writeln!(
                    out,
                    "Conjecture {} : {}.",
                    item.formula.name,
                    theorem_formula(&ctx, &item.formula.formula)
                );
                continue;
            }
            let _ = writeln!(
                out,
                "Theorem {} : {}.",
                item.formula.name,
                theorem_formula(&ctx, &item.formula.formula)
            );
            out.push_str("Proof.\n");
            out.push_str("intros.\n");
            proof_body(&mut out, &ctx, &item.proofs[0], 0, &mut fresh_hyp)?;
            out.push_str("Qed.\n");
            if item.proofs.len() > 1 {
                let _ = writeln!(
                    out,
                    "(* {} alternative proof(s) not shown *)",
                    item.proofs.len() - 1
                );
            }
        }
    }
    Ok(RenderedArtifact {
        main_file: out,
        auxiliary_files: vec![(
            "ClTactics.v".to_string(),
            include_str!("../../assets/ClTactics.v").to_string(),
        )],
    })
}

fn atom(ctx: &DocContext, a: &Atom) -> String {
    let names: Vec<&str> = a.args.iter().map(|t| t.name()).collect();
    if ctx.is_eq(a) {
        return format!("{} = {}", names[0], names[1]);
    }
    if ctx.is_neq(a) {
        return format!("{} <> {}", names[0], names[1]);
    }
    if let Some(pos) = ctx.negation_of(&a.predicate) {
        return format!("~ {pos} {}", names.join(" "));
    }
    if names.is_empty() {
        a.predicate.clone()
    } else {
        format!("{} {}", a.predicate, names.join(" "))
    }
}

fn conclusion(ctx: &DocContext, f: &CoherentFormula) -> String {
    if f.conclusion.is_empty() {
        return "False".to_string();
    }
    f.conclusion
        .iter()
        .map(|d| {
            let conj = d
                .conjuncts
                .iter()
                .map(|a| atom(ctx, a))
                .collect::<Vec<_>>()
                .join(" /\\ ");
            let body = if d.conjuncts.len() > 1 && f.conclusion.len() > 1 {
                format!("({conj})")
            } else {
                conj
            };
            if d.existential_vars.is_empty() {
                body
            } else {
                let vars = d
                    .existential_vars
                    .iter()
                    .map(|v| v.name.as_str())
                    .collect::<Vec<_>>()
                    .join(" ");
                format!("(exists {vars}, {body})")
            }
        })
        .collect::<Vec<_>>()
        .join(" \\/ ")
}

fn quantifiers(f: &CoherentFormula) -> String {
    if f.universal_vars.is_empty() {
        return String::new();
    }
    let binders = f
        .universal_vars
        .iter()
        .map(|v| format!("({}:{})", v.name, v.sort))
        .collect::<Vec<_>>()
        .join(" ");
    format!("forall {binders}, ")
}

/// Theorem shape: quantified conjunction of hypotheses implying the goal.
fn theorem_formula(ctx: &DocContext, f: &CoherentFormula) -> String {
    let concl = conclusion(ctx, f);
    let body = match f.premises.len() {
        0 => concl,
        1 => format!("{} -> {concl}", atom(ctx, &f.premises[0])),
        _ => {
            let ps = f
                .premises
                .iter()
                .map(|a| atom(ctx, a))
                .collect::<Vec<_>>()
                .join(" /\\ ");
            format!("({ps}) -> {concl}")
        }
    };
    format!("{}{body}", quantifiers(f))
}

/// Axiom shape: curried premises, so `applying` can discharge them one by
/// one from hypotheses.
fn axiom_formula(ctx: &DocContext, f: &CoherentFormula) -> String {
    let mut body = conclusion(ctx, f);
    for p in f.premises.iter().rev() {
        body = format!("{} -> {body}", atom(ctx, p));
    }
    format!("{}{body}", quantifiers(f))
}

fn clause(ctx: &DocContext, derived: &[Vec<Atom>]) -> String {
    derived
        .iter()
        .map(|conjs| {
            let conj = conjs
                .iter()
                .map(|a| atom(ctx, a))
                .collect::<Vec<_>>()
                .join(" /\\ ");
            if conjs.len() > 1 && derived.len() > 1 {
                format!("({conj})")
            } else {
                conj
            }
        })
        .collect::<Vec<_>>()
        .join(" \\/ ")
}

/// Intro pattern naming k witnesses and the hypotheses of m conjuncts.
fn destruct_pattern(witnesses: &[String], conjuncts: usize, fresh: &mut usize) -> String {
    let mut hyps: Vec<String> = (0..conjuncts)
        .map(|_| {
            *fresh += 1;
            format!("H{fresh}")
        })
        .collect();
    let mut pat = hyps.pop().unwrap_or_else(|| "H".to_string());
    while let Some(h) = hyps.pop() {
        pat = format!("[ {h} {pat} ]");
    }
    for w in witnesses.iter().rev() {
        pat = format!("[ {w} {pat} ]");
    }
    pat
}

fn proof_body(
    out: &mut String,
    ctx: &DocContext,
    tree: &ProofTree,
    depth: usize,
    fresh_hyp: &mut usize,
) -> Result<(), ExportError> {
    let _ = depth;
    for s in &tree.steps {
        match &s.kind {
            StepKind::ModusPonens {
                axiom: ax,
                binding,
                derived,
                witnesses,
                ..
            } => {
                let vals = ctx.binding_values(ax, binding)?;
                let applied = if vals.is_empty() {
                    format!("({ax} )")
                } else {
                    format!("({ax} {} )", vals.join(" "))
                };
                if witnesses.is_empty() {
                    let _ = writeln!(
                        out,
                        "assert ({}) by applying {applied} .",
                        clause(ctx, derived)
                    );
                } else {
                    // The step introduces witnesses: assert the existential
                    // form, then name the witnesses by destructuring it.
                    let conj = derived[0]
                        .iter()
                        .map(|a| atom(ctx, a))
                        .collect::<Vec<_>>()
                        .join(" /\\ ");
                    let ex = format!("exists {}, ({conj})", witnesses.join(" "));
                    let _ = writeln!(out, "assert ({ex}) by applying {applied} .");
                    let pat = destruct_pattern(witnesses, derived[0].len(), fresh_hyp);
                    let _ = writeln!(out, "by destruct on ({ex}) as [ {pat} ] .");
                }
            }
            StepKind::EqualitySubstitution { derived, .. } => {
                let _ = writeln!(out, "assert ({}) by (substitution).", atom(ctx, derived));
            }
        }
    }
    match &tree.closing.kind {
        ClosingKind::From { .. } => {
            out.push_str("conclude.\n");
        }
        ClosingKind::Efq { facts } => {
            let pairish = match facts.len() {
                1 => ctx.is_neq(&facts[0]),
                2 => ctx.is_eq(&facts[0]) || ctx.is_neq(&facts[0]),
                _ => false,
            };
            if pairish {
                out.push_str("assert (False) by (substitution).\n");
            }
            out.push_str("contradict.\n");
        }
        ClosingKind::CaseSplit {
            disjunction,
            branches,
        } => {
            let d = clause(ctx, disjunction);
            let _ = writeln!(out, "by cases on ({d}).");
            for branch in branches {
                out.push_str("- {\n");
                proof_body(out, ctx, branch, depth + 1, fresh_hyp)?;
                out.push_str("}\n");
            }
        }
    }
    Ok(())
}
