//! Batch runs: prove a manifest of problems in book order, make each proved
//! theorem available to later items, and write one combined document
//! (frontpage and theory shared through includes) plus a summary table.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};

use clv_core::engine::{prove, ProveResult};
use clv_core::logic::{NamedFormula, Role, Signature, Theory};
use clv_core::proof::ProofTree;
use clv_core::vernacular::{serialize_document_split, Chapter, ChapterItem, VernacularDocument};

use crate::commands::{frontpage_from, limits_from, load_problem, read_hints, stem_of};
use crate::{FrontpageArgs, SearchArgs};

struct ItemResult {
    name: String,
    status: String,
    millis: u128,
    proof_size: Option<usize>,
    /// Theory contributed by the item, a proved tree, or an error message.
    payload: Option<(Theory, NamedFormula, Option<ProofTree>)>,
}

pub fn cmd_batch(
    manifest: &str,
    output_dir: &str,
    jobs: usize,
    search: &SearchArgs,
    frontpage: &FrontpageArgs,
) -> Result<ExitCode> {
    let manifest_text =
        std::fs::read_to_string(manifest).with_context(|| format!("cannot read {manifest}"))?;
    let base = Path::new(manifest)
        .parent()
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."));
    let items: Vec<PathBuf> = manifest_text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(|l| base.join(l))
        .collect();

    let limits = limits_from(search);
    let mut master = Theory {
        name: stem_of(manifest),
        signature: Signature {
            sorts: vec!["point".to_string()],
            predicates: vec![],
            constants: vec![],
        },
        axioms: vec![],
    };
    let mut carried: Vec<NamedFormula> = Vec::new();
    let mut chapters: Vec<Chapter> = Vec::new();
    let mut summary: Vec<ItemResult> = Vec::new();

    // Waves of up to `jobs` consecutive items; an item sees the theorems of
    // earlier waves only, so statuses do not depend on scheduling.
    for wave in items.chunks(jobs) {
        let results: Vec<ItemResult> = std::thread::scope(|scope| {
            let handles: Vec<_> = wave
                .iter()
                .map(|path| {
                    let master = &master;
                    let carried = &carried;
                    let limits = &limits;
                    scope.spawn(move || run_item(path, master, carried, limits))
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("item thread")).collect()
        });
        for r in results {
            if let Some((theory, conjecture, proof)) = &r.payload {
                if let Err(e) = merge_theory(&mut master, theory) {
                    summary.push(ItemResult {
                        name: r.name.clone(),
                        status: format!("ERROR merge: {e}"),
                        millis: r.millis,
                        proof_size: None,
                        payload: None,
                    });
                    continue;
                }
                chapters.push(Chapter {
                    name: conjecture.name.clone(),
                    items: vec![ChapterItem {
                        formula: NamedFormula {
                            name: conjecture.name.clone(),
                            role: if proof.is_some() { Role::Theorem } else { Role::Conjecture },
                            formula: conjecture.formula.clone(),
                        },
                        proofs: proof.clone().into_iter().collect(),
                    }],
                });
                if proof.is_some() {
                    carried.push(NamedFormula {
                        name: conjecture.name.clone(),
                        role: Role::Theorem,
                        formula: conjecture.formula.clone(),
                    });
                }
            }
            println!("{} {}", r.status, r.name);
            summary.push(r);
        }
    }

    let doc = VernacularDocument {
        frontpage: frontpage_from(frontpage),
        theory: master,
        chapters,
    };
    let out = PathBuf::from(output_dir);
    std::fs::create_dir_all(&out)?;
    let theory_file = format!("theory_{}.xml", doc.theory.name);
    let split = serialize_document_split(&doc, "frontpage.xml", &theory_file);
    std::fs::write(out.join("main.xml"), &split.main)?;
    std::fs::write(out.join("frontpage.xml"), &split.frontpage)?;
    std::fs::write(out.join(&theory_file), &split.theory)?;
    std::fs::write(out.join("Vernacular.dtd"), clv_core::vernacular::bundled_dtd())?;

    let mut table = String::from("# name status time_ms proof_size\n");
    for r in &summary {
        let size = r
            .proof_size
            .map(|s| s.to_string())
            .unwrap_or_else(|| "-".to_string());
        table.push_str(&format!("{} {} {} {}\n", r.name, r.status, r.millis, size));
    }
    std::fs::write(out.join("summary.txt"), table)?;
    println!(
        "batch complete: {} item(s), combined document in {}",
        summary.len(),
        out.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn run_item(
    path: &Path,
    master: &Theory,
    carried: &[NamedFormula],
    limits: &clv_core::engine::SearchLimits,
) -> ItemResult {
    let started = Instant::now();
    let name = stem_of(&path.display().to_string());
    let fail = |status: String, millis: u128| ItemResult {
        name: name.clone(),
        status,
        millis,
        proof_size: None,
        payload: None,
    };
    let (theory, conjectures) =
        match load_problem(&path.display().to_string(), true, &master.name) {
            Ok(x) => x,
            Err(e) => return fail(format!("ERROR {e:#}"), started.elapsed().as_millis()),
        };
    let Some(conjecture) = conjectures.first() else {
        return fail("ERROR no conjecture".into(), started.elapsed().as_millis());
    };
    if carried.iter().any(|c| c.name == conjecture.name)
        || master.axiom(&conjecture.name).is_some()
    {
        return fail("ERROR duplicate name".into(), started.elapsed().as_millis());
    }

    // A sidecar hints file (item.hints next to item.p) restricts and
    // orders the axioms the search may use, as in the book workflow.
    let hints = match path.with_extension("hints") {
        p if p.is_file() => match read_hints(&p.display().to_string()) {
            Ok(h) => Some(h),
            Err(e) => return fail(format!("ERROR {e:#}"), started.elapsed().as_millis()),
        },
        _ => None,
    };

    // The proving theory: the item's own axioms plus everything carried.
    let mut prove_theory = theory.clone();
    for nf in carried {
        if prove_theory.axiom(&nf.name).is_none() {
            if let Err(e) = ensure_symbols(&mut prove_theory.signature, &nf.formula) {
                return fail(format!("ERROR {e}"), started.elapsed().as_millis());
            }
            prove_theory.axioms.push(nf.clone());
        }
    }
    match prove(&prove_theory, conjecture, limits, hints.as_deref()) {
        Ok(ProveResult::Proved(tree, stats)) => ItemResult {
            name,
            status: "PROVED".into(),
            millis: started.elapsed().as_millis(),
            proof_size: Some(stats.proof_size),
            payload: Some((theory, conjecture.clone(), Some(*tree))),
        },
        Ok(ProveResult::Exhausted { .. }) => ItemResult {
            name,
            status: "EXHAUSTED".into(),
            millis: started.elapsed().as_millis(),
            proof_size: None,
            payload: Some((theory, conjecture.clone(), None)),
        },
        Ok(ProveResult::Timeout { .. }) => ItemResult {
            name,
            status: "TIMEOUT".into(),
            millis: started.elapsed().as_millis(),
            proof_size: None,
            payload: Some((theory, conjecture.clone(), None)),
        },
        Err(e) => fail(format!("ERROR {e}"), started.elapsed().as_millis()),
    }
}

/// Adds the item's sorts, predicates, constants and axioms to the combined
/// theory; same-name axioms must agree.
fn merge_theory(master: &mut Theory, item: &Theory) -> Result<(), String> {
    for s in &item.signature.sorts {
        if !master.signature.sorts.contains(s) {
            master.signature.sorts.push(s.clone());
        }
    }
    for p in &item.signature.predicates {
        match master.signature.predicate(&p.name) {
            None => master.signature.predicates.push(p.clone()),
            Some(q) if q == p => {}
            Some(q) => {
                return Err(format!(
                    "predicate {} declared with arity {} and {}",
                    p.name,
                    q.arity(),
                    p.arity()
                ))
            }
        }
    }
    for c in &item.signature.constants {
        if master.signature.constant(&c.name).is_none() {
            master.signature.constants.push(c.clone());
        }
    }
    for a in &item.axioms {
        match master.axiom(&a.name) {
            None => master.axioms.push(a.clone()),
            Some(b) if b.formula == a.formula => {}
            Some(_) => return Err(format!("axiom {} redeclared with a different formula", a.name)),
        }
    }
    Ok(())
}

/// Declares any symbol a carried theorem uses that the item's own signature
/// does not know yet.
fn ensure_symbols(
    sig: &mut Signature,
    f: &clv_core::logic::CoherentFormula,
) -> Result<(), String> {
    let note = |atom: &clv_core::logic::Atom, sig: &mut Signature| -> Result<(), String> {
        match sig.predicate(&atom.predicate) {
            Some(p) if p.arity() == atom.args.len() => Ok(()),
            Some(p) => Err(format!(
                "carried theorem uses {} with arity {}, declared {}",
                atom.predicate,
                atom.args.len(),
                p.arity()
            )),
            None => {
                if atom.predicate == "eq" || atom.predicate == "neq" {
                    sig.ensure_equality("point");
                } else {
                    sig.predicates.push(clv_core::logic::PredicateSymbol {
                        name: atom.predicate.clone(),
                        arg_sorts: vec!["point".to_string(); atom.args.len()],
                        is_equality: false,
                        negated_partner: None,
                    });
                }
                Ok(())
            }
        }
    };
    for a in &f.premises {
        note(a, sig)?;
    }
    for d in &f.conclusion {
        for a in &d.conjuncts {
            note(a, sig)?;
        }
    }
    Ok(())
}
