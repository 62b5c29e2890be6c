//! Isabelle/Isar backend: one lemma per theorem, forward steps as
//! from … have … by (rule name), equality substitutions by simp (pure
//! orientation flips by sym/not_sym), equality case splits through native
//! excluded middle, and assumptions referenced by backquoted statement.

use std::fmt::Write as _;

use crate::logic::{Atom, CoherentFormula};
use crate::proof::{ClosingKind, ProofTree, StepKind};
use crate::vernacular::VernacularDocument;

use super::{DocContext, ExportError, RenderedArtifact};

pub fn export_isar(
    doc: &VernacularDocument,
    stem: &str,
) -> Result<RenderedArtifact, ExportError> {
    let ctx = DocContext::new(doc);
    let mut out = String::new();
    let _ = writeln!(out, "theory {stem}\nimports Main\nbegin");
    out.push('\n');
    for sort in &doc.theory.signature.sorts {
        let _ = writeln!(out, "typedecl {sort}");
    }
    out.push('\n');
    write_axiomatization(&mut out, &ctx);

    for ch in &doc.chapters {
        for item in &ch.items {
            out.push('\n');
            if item.proofs.is_empty() {
                let _ = writeln!(
                    out,
                    "(* conjecture {} : {} *)",
                    item.formula.name,
                    statement(&ctx, &item.formula.formula)
                );
                continue;
            }
            let _ = writeln!(
                out,
                "lemma {} : {}",
                item.formula.name,
                statement(&ctx, &item.formula.formula)
            );
            out.push_str("proof -\n");
            proof_body(&mut out, &ctx, &item.proofs[0], 0)?;
            out.push_str("qed\n");
            if item.proofs.len() > 1 {
                let _ = writeln!(
                    out,
                    "(* {} alternative proof(s) not shown *)",
                    item.proofs.len() - 1
                );
            }
        }
    }
    out.push_str("\nend\n");
    Ok(RenderedArtifact {
        main_file: out,
        auxiliary_files: vec![],
    })
}

/// Equality is native and a predicate standing for a negation renders as
/// the negation of its partner, so neither is declared.
fn write_axiomatization(out: &mut String, ctx: &DocContext) {
    let sig = ctx.sig();
    let consts: Vec<_> = sig
        .predicates
        .iter()
        .filter(|p| !sig.is_symmetric_binary(&p.name) && ctx.negation_of(&p.name).is_none())
        .collect();
    let axioms: Vec<_> = ctx
        .doc
        .theory
        .axioms
        .iter()
        .filter(|a| !ctx.is_decidability_axiom(&a.name))
        .collect();
    if consts.is_empty() && axioms.is_empty() {
        return;
    }
    out.push_str("axiomatization");
    for (i, p) in consts.iter().enumerate() {
        let ty: Vec<&str> = p.arg_sorts.iter().map(String::as_str).collect();
        let mut sig_str = ty.join(" => ");
        if !sig_str.is_empty() {
            sig_str.push_str(" => ");
        }
        sig_str.push_str("bool");
        let sep = if i + 1 < consts.len() { " and" } else { "" };
        let _ = write!(out, "\n  {} :: \"{sig_str}\"{sep}", p.name);
    }
    if !axioms.is_empty() {
        out.push_str("\nwhere");
        for (i, a) in axioms.iter().enumerate() {
            let sep = if i + 1 < axioms.len() { " and" } else { "" };
            let _ = write!(out, "\n  {} : \"{}\"{sep}", a.name, axiom_formula(ctx, &a.formula));
        }
    }
    out.push_str("\n\n");
}

fn atom(ctx: &DocContext, a: &Atom) -> String {
    let names: Vec<&str> = a.args.iter().map(|t| t.name()).collect();
    if ctx.is_eq(a) {
        return format!("{} = {}", names[0], names[1]);
    }
    if ctx.is_neq(a) {
        return format!("{} ~= {}", names[0], names[1]);
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
                .join(" \\<and> ");
            if d.existential_vars.is_empty() {
                if d.conjuncts.len() > 1 && f.conclusion.len() > 1 {
                    format!("({conj})")
                } else {
                    conj
                }
            } else {
                let vars = d
                    .existential_vars
                    .iter()
                    .map(|v| v.name.as_str())
                    .collect::<Vec<_>>()
                    .join(" ");
                format!("(\\<exists> {vars}. {conj})")
            }
        })
        .collect::<Vec<_>>()
        .join(" \\<or> ")
}

fn statement(ctx: &DocContext, f: &CoherentFormula) -> String {
    let shows = format!("shows \"({})\"", conclusion(ctx, f));
    if f.premises.is_empty() {
        shows
    } else {
        let assumes = f
            .premises
            .iter()
            .map(|a| format!("\"{}\"", atom(ctx, a)))
            .collect::<Vec<_>>()
            .join(" and ");
        format!("assumes {assumes} {shows}")
    }
}

/// Axiomatization form: premises as meta-implication antecedents.
fn axiom_formula(ctx: &DocContext, f: &CoherentFormula) -> String {
    let concl = conclusion(ctx, f);
    match f.premises.len() {
        0 => concl,
        1 => format!("{} ==> {concl}", atom(ctx, &f.premises[0])),
        _ => {
            let ps = f
                .premises
                .iter()
                .map(|a| atom(ctx, a))
                .collect::<Vec<_>>()
                .join("; ");
            format!("[| {ps} |] ==> {concl}")
        }
    }
}

fn quoted(ctx: &DocContext, atoms: &[Atom]) -> String {
    atoms
        .iter()
        .map(|a| format!("`{}`", atom(ctx, a)))
        .collect::<Vec<_>>()
        .join(" and ")
}

fn clause(ctx: &DocContext, derived: &[Vec<Atom>]) -> String {
    derived
        .iter()
        .map(|conjs| {
            conjs
                .iter()
                .map(|a| atom(ctx, a))
                .collect::<Vec<_>>()
                .join(" \\<and> ")
        })
        .collect::<Vec<_>>()
        .join(" \\<or> ")
}

/// [eq(x,y)], [neq(x,y)] over the same pair: rendered with proof(cases).
fn equality_split(ctx: &DocContext, disjunction: &[Vec<Atom>]) -> Option<String> {
    if disjunction.len() != 2 || disjunction[0].len() != 1 || disjunction[1].len() != 1 {
        return None;
    }
    let (a, b) = (&disjunction[0][0], &disjunction[1][0]);
    if ctx.is_eq(a) && ctx.is_neq(b) && a.args == b.args {
        Some(atom(ctx, a))
    } else {
        None
    }
}

fn proof_body(
    out: &mut String,
    ctx: &DocContext,
    tree: &ProofTree,
    depth: usize,
) -> Result<(), ExportError> {
    let pad = "  ".repeat(depth);
    for s in &tree.steps {
        match &s.kind {
            StepKind::ModusPonens {
                axiom: ax,
                premises,
                derived,
                witnesses,
                ..
            } => {
                ctx.formula(ax)?;
                let stmt = clause(ctx, derived);
                if !witnesses.is_empty() {
                    let ws = witnesses.join(" ");
                    if premises.is_empty() {
                        let _ = writeln!(out, "{pad}obtain {ws} where \"{stmt}\" by (rule {ax})");
                    } else {
                        let _ = writeln!(
                            out,
                            "{pad}from {} obtain {ws} where \"{stmt}\" by (rule {ax})",
                            quoted(ctx, premises)
                        );
                    }
                } else if ctx.is_decidability_axiom(ax) {
                    let _ = writeln!(
                        out,
                        "{pad}have \"{stmt}\" by (subst disj_commute, rule excluded_middle)"
                    );
                } else if premises.is_empty() {
                    let _ = writeln!(out, "{pad}have \"{stmt}\" by (rule {ax})");
                } else {
                    let _ = writeln!(
                        out,
                        "{pad}from {} have \"{stmt}\" by (rule {ax})",
                        quoted(ctx, premises)
                    );
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
                let method = if equations.is_empty() {
                    if ctx.is_neq(source) {
                        "(rule not_sym)"
                    } else {
                        "(rule sym)"
                    }
                } else {
                    "simp"
                };
                let _ = writeln!(
                    out,
                    "{pad}from {} have \"{}\" by {method}",
                    quoted(ctx, &facts),
                    atom(ctx, derived)
                );
            }
        }
    }
    match &tree.closing.kind {
        ClosingKind::From { facts, witness_binding, .. } => {
            let method = if witness_binding.is_empty() { "assumption" } else { "blast" };
            if facts.is_empty() {
                let _ = writeln!(out, "{pad}show ?thesis by simp");
            } else {
                let _ = writeln!(
                    out,
                    "{pad}from {} show ?thesis by {method}",
                    quoted(ctx, facts)
                );
            }
        }
        ClosingKind::Efq { facts } => {
            match facts.len() {
                2 => {
                    let _ = writeln!(
                        out,
                        "{pad}from {} have \"False\" by (rule notE)",
                        quoted(ctx, facts)
                    );
                }
                0 => {
                    let _ = writeln!(out, "{pad}have \"False\" by blast");
                }
                _ => {
                    let _ = writeln!(
                        out,
                        "{pad}from {} have \"False\" by simp",
                        quoted(ctx, facts)
                    );
                }
            }
            let _ = writeln!(out, "{pad}from this show ?thesis by (rule FalseE)");
        }
        ClosingKind::CaseSplit {
            disjunction,
            branches,
        } => {
            if let Some(eq) = equality_split(ctx, disjunction) {
                let _ = writeln!(out, "{pad}show ?thesis");
                let _ = writeln!(out, "{pad}proof(cases \"{eq}\")");
                for (i, branch) in branches.iter().enumerate() {
                    if i > 0 {
                        let _ = writeln!(out, "{pad}next");
                    }
                    let _ = writeln!(out, "{pad}case {}", if i == 0 { "True" } else { "False" });
                    proof_body(out, ctx, branch, depth + 1)?;
                }
                let _ = writeln!(out, "{pad}qed");
            } else {
                let _ = writeln!(
                    out,
                    "{pad}from `{}` show ?thesis",
                    clause(ctx, disjunction)
                );
                let _ = writeln!(out, "{pad}proof (elim disjE)");
                for (i, (disjunct, branch)) in disjunction.iter().zip(branches).enumerate() {
                    if i > 0 {
                        let _ = writeln!(out, "{pad}next");
                    }
                    let assumed = disjunct
                        .iter()
                        .map(|a| format!("\"{}\"", atom(ctx, a)))
                        .collect::<Vec<_>>()
                        .join(" and ");
                    let _ = writeln!(out, "{pad}assume {assumed}");
                    proof_body(out, ctx, branch, depth + 1)?;
                }
                let _ = writeln!(out, "{pad}qed");
            }
        }
    }
    Ok(())
}
