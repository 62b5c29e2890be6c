//! Shape normalization into the coherent fragment. Only the following
//! rewrites are applied, anything else is rejected with a reason:
//! implicit universal closure, currying `A ⇒ (B ⇒ C) ↦ A ∧ B ⇒ C`,
//! negation markers on premise- and conclusion-side atoms, associative
//! flattening of ∧/∨, distribution of a conclusion-side ∃ over ∨ (with
//! renaming), and ⊤/⊥ simplification.

use crate::logic::{Atom, CoherentFormula, Disjunct, Term, Variable};

use super::{Fof, RawTerm, DEFAULT_SORT};

pub fn to_coherent(f: &Fof) -> Result<CoherentFormula, String> {
    check_no_shadowing(f, &mut Vec::new())?;

    // Explicit leading binders first, then implicit closure of free vars.
    let mut body = f;
    let mut universal: Vec<String> = Vec::new();
    while let Fof::Forall(vars, inner) = body {
        for v in vars {
            if universal.contains(v) {
                return Err(format!("variable {v} bound twice"));
            }
            universal.push(v.clone());
        }
        body = inner;
    }
    for v in fof_free_vars(body) {
        if !universal.contains(&v) {
            universal.push(v);
        }
    }

    let (premise_parts, conclusion) = split_implications(body)?;
    let mut premises = Vec::new();
    for part in premise_parts {
        for leaf in flatten_and(part) {
            if let Some(a) = premise_atom(leaf)? {
                premises.push(a);
            } // ⊤ premises are dropped
        }
    }

    let mut used_names: Vec<String> = universal.clone();
    collect_var_names(body, &mut used_names);
    let conclusion = normalize_conclusion(conclusion, &mut used_names)?;

    let var = |n: &str| Variable {
        name: n.to_string(),
        sort: DEFAULT_SORT.to_string(),
    };
    Ok(CoherentFormula {
        universal_vars: universal.iter().map(|v| var(v)).collect(),
        premises,
        conclusion,
    })
}

/// Splits nested implications, currying the premises:
/// `A ⇒ (B ⇒ C)` contributes premises from both A and B.
fn split_implications(f: &Fof) -> Result<(Vec<&Fof>, &Fof), String> {
    let mut premises = Vec::new();
    let mut cur = f;
    while let Fof::Implies(lhs, rhs) = cur {
        premises.push(lhs.as_ref());
        cur = rhs;
    }
    Ok((premises, cur))
}

fn flatten_and(f: &Fof) -> Vec<&Fof> {
    match f {
        Fof::And(parts) => parts.iter().flat_map(flatten_and).collect(),
        other => vec![other],
    }
}

fn flatten_or(f: &Fof) -> Vec<&Fof> {
    match f {
        Fof::Or(parts) => parts.iter().flat_map(flatten_or).collect(),
        other => vec![other],
    }
}

fn term(t: &RawTerm) -> Term {
    match t {
        RawTerm::Variable(v) => Term::Variable(v.clone()),
        RawTerm::Constant(c) => Term::Constant(c.clone()),
    }
}

/// An atom, a (dis)equality, or a negated one of those; `None` for ⊤.
fn premise_atom(f: &Fof) -> Result<Option<Atom>, String> {
    match f {
        Fof::True => Ok(None),
        Fof::False => Err("falsum is not allowed as a premise".into()),
        Fof::Or(_) => Err("disjunctive premises are outside the coherent fragment".into()),
        Fof::Exists(..) => Err("existential premises are outside the coherent fragment".into()),
        Fof::Forall(..) => Err("universal quantifier below the top level".into()),
        Fof::Implies(..) => Err("implication nested in a premise".into()),
        other => plain_atom(other).map(Some),
    }
}

/// Atom / equality / disequality, with `~` producing a negation marker.
fn plain_atom(f: &Fof) -> Result<Atom, String> {
    match f {
        Fof::Atom { predicate, args } => Ok(Atom::new(
            predicate.clone(),
            args.iter().map(term).collect(),
        )),
        Fof::Eq(a, b) => Ok(Atom::new("eq", vec![term(a), term(b)])),
        Fof::Neq(a, b) => {
            let mut at = Atom::new("eq", vec![term(a), term(b)]);
            at.negated = true;
            Ok(at)
        }
        Fof::Not(inner) => match inner.as_ref() {
            Fof::Atom { .. } | Fof::Eq(..) => {
                let mut at = plain_atom(inner)?;
                if at.negated {
                    return Err("double negation is not accepted".into());
                }
                at.negated = true;
                Ok(at)
            }
            Fof::Neq(..) | Fof::Not(_) => Err("double negation is not accepted".into()),
            _ => Err("negation over a non-atom is outside the coherent fragment".into()),
        },
        Fof::True | Fof::False => Err("boolean constant where an atom is required".into()),
        Fof::And(_) => Err("conjunction nested where an atom is required".into()),
        Fof::Or(_) => Err("disjunction nested where an atom is required".into()),
        Fof::Implies(..) => Err("implication nested where an atom is required".into()),
        Fof::Forall(..) => Err("universal quantifier below the top level".into()),
        Fof::Exists(..) => Err("existential quantifier nested where an atom is required".into()),
    }
}

fn normalize_conclusion(f: &Fof, used_names: &mut Vec<String>) -> Result<Vec<Disjunct>, String> {
    if let Fof::False = f {
        return Ok(vec![]);
    }
    let mut disjuncts = Vec::new();
    for leaf in flatten_or(f) {
        match leaf {
            Fof::False => {} // ⊥ disjunct dropped
            Fof::True => return Err("conclusion is trivially true".into()),
            other => disjuncts.extend(leaf_disjuncts(other, used_names)?),
        }
    }
    Ok(disjuncts)
}

/// One ∨-leaf of the conclusion: either `∃vars. conj`, a conjunction, or a
/// single atom. An ∃ whose body is itself a disjunction is distributed,
/// renaming its binders in every disjunct after the first.
fn leaf_disjuncts(f: &Fof, used_names: &mut Vec<String>) -> Result<Vec<Disjunct>, String> {
    match f {
        Fof::Exists(vars, body) => {
            let inner = flatten_or(body);
            if inner.len() == 1 {
                let mut ds = leaf_disjuncts(inner[0], used_names)?;
                if ds.len() != 1 {
                    return Err("unexpected disjunction under an existential".into());
                }
                let mut d = ds.pop().unwrap();
                let mut exvars: Vec<Variable> = vars
                    .iter()
                    .map(|v| Variable {
                        name: v.clone(),
                        sort: DEFAULT_SORT.to_string(),
                    })
                    .collect();
                exvars.extend(d.existential_vars);
                d.existential_vars = exvars;
                check_existentials_used(&d)?;
                Ok(vec![d])
            } else {
                // ∃y (B1 ∨ B2) ↦ ∃y B1 ∨ ∃y' B2, fresh names per extra copy.
                let mut out = Vec::new();
                for (i, sub) in inner.iter().enumerate() {
                    let mut sub_f = (*sub).clone();
                    let mut names = vars.clone();
                    if i > 0 {
                        for v in &mut names {
                            let fresh = fresh_name(v, used_names);
                            sub_f = rename_var(&sub_f, v, &fresh);
                            *v = fresh;
                        }
                    }
                    let rebuilt = Fof::Exists(names, Box::new(sub_f));
                    out.extend(leaf_disjuncts(&rebuilt, used_names)?);
                }
                Ok(out)
            }
        }
        Fof::And(_) => {
            let mut conjuncts = Vec::new();
            for part in flatten_and(f) {
                match part {
                    Fof::True => {}
                    other => conjuncts.push(plain_atom(other)?),
                }
            }
            if conjuncts.is_empty() {
                return Err("conclusion disjunct is trivially true".into());
            }
            Ok(vec![Disjunct {
                existential_vars: vec![],
                conjuncts,
            }])
        }
        Fof::Implies(..) => Err("implication nested in a conclusion".into()),
        Fof::Forall(..) => Err("universal quantifier below the top level".into()),
        other => Ok(vec![Disjunct {
            existential_vars: vec![],
            conjuncts: vec![plain_atom(other)?],
        }]),
    }
}

fn check_existentials_used(d: &Disjunct) -> Result<(), String> {
    for v in &d.existential_vars {
        let used = d
            .conjuncts
            .iter()
            .any(|a| a.args.iter().any(|t| matches!(t, Term::Variable(n) if *n == v.name)));
        if !used {
            return Err(format!("existential variable {} occurs in no conjunct", v.name));
        }
    }
    Ok(())
}

fn check_no_shadowing(f: &Fof, bound: &mut Vec<String>) -> Result<(), String> {
    match f {
        Fof::Forall(vars, body) | Fof::Exists(vars, body) => {
            for v in vars {
                if bound.contains(v) {
                    return Err(format!("variable {v} bound twice (shadowing)"));
                }
                bound.push(v.clone());
            }
            check_no_shadowing(body, bound)
        }
        Fof::Not(g) => check_no_shadowing(g, bound),
        Fof::And(parts) | Fof::Or(parts) => {
            for p in parts {
                check_no_shadowing(p, bound)?;
            }
            Ok(())
        }
        Fof::Implies(a, b) => {
            check_no_shadowing(a, bound)?;
            check_no_shadowing(b, bound)
        }
        _ => Ok(()),
    }
}

fn fof_free_vars(f: &Fof) -> Vec<String> {
    fn walk(f: &Fof, bound: &mut Vec<String>, out: &mut Vec<String>) {
        match f {
            Fof::Atom { args, .. } => {
                for t in args {
                    if let RawTerm::Variable(v) = t {
                        if !bound.contains(v) && !out.contains(v) {
                            out.push(v.clone());
                        }
                    }
                }
            }
            Fof::Eq(a, b) | Fof::Neq(a, b) => {
                for t in [a, b] {
                    if let RawTerm::Variable(v) = t {
                        if !bound.contains(v) && !out.contains(v) {
                            out.push(v.clone());
                        }
                    }
                }
            }
            Fof::Not(g) => walk(g, bound, out),
            Fof::And(ps) | Fof::Or(ps) => ps.iter().for_each(|p| walk(p, bound, out)),
            Fof::Implies(a, b) => {
                walk(a, bound, out);
                walk(b, bound, out);
            }
            Fof::Forall(vars, body) | Fof::Exists(vars, body) => {
                let n = bound.len();
                bound.extend(vars.iter().cloned());
                walk(body, bound, out);
                bound.truncate(n);
            }
            Fof::True | Fof::False => {}
        }
    }
    let mut out = Vec::new();
    walk(f, &mut Vec::new(), &mut out);
    out
}

fn collect_var_names(f: &Fof, out: &mut Vec<String>) {
    match f {
        Fof::Atom { args, .. } => {
            for t in args {
                if let RawTerm::Variable(v) = t {
                    if !out.contains(v) {
                        out.push(v.clone());
                    }
                }
            }
        }
        Fof::Eq(a, b) | Fof::Neq(a, b) => {
            for t in [a, b] {
                if let RawTerm::Variable(v) = t {
                    if !out.contains(v) {
                        out.push(v.clone());
                    }
                }
            }
        }
        Fof::Not(g) => collect_var_names(g, out),
        Fof::And(ps) | Fof::Or(ps) => ps.iter().for_each(|p| collect_var_names(p, out)),
        Fof::Implies(a, b) => {
            collect_var_names(a, out);
            collect_var_names(b, out);
        }
        Fof::Forall(vars, body) | Fof::Exists(vars, body) => {
            for v in vars {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            collect_var_names(body, out);
        }
        Fof::True | Fof::False => {}
    }
}

fn fresh_name(base: &str, used: &mut Vec<String>) -> String {
    let mut n = 1;
    loop {
        let cand = format!("{base}{n}");
        if !used.contains(&cand) {
            used.push(cand.clone());
            return cand;
        }
        n += 1;
    }
}

fn rename_var(f: &Fof, old: &str, new: &str) -> Fof {
    let rt = |t: &RawTerm| match t {
        RawTerm::Variable(v) if v == old => RawTerm::Variable(new.to_string()),
        other => other.clone(),
    };
    match f {
        Fof::Atom { predicate, args } => Fof::Atom {
            predicate: predicate.clone(),
            args: args.iter().map(rt).collect(),
        },
        Fof::Eq(a, b) => Fof::Eq(rt(a), rt(b)),
        Fof::Neq(a, b) => Fof::Neq(rt(a), rt(b)),
        Fof::Not(g) => Fof::Not(Box::new(rename_var(g, old, new))),
        Fof::And(ps) => Fof::And(ps.iter().map(|p| rename_var(p, old, new)).collect()),
        Fof::Or(ps) => Fof::Or(ps.iter().map(|p| rename_var(p, old, new)).collect()),
        Fof::Implies(a, b) => Fof::Implies(
            Box::new(rename_var(a, old, new)),
            Box::new(rename_var(b, old, new)),
        ),
        Fof::Forall(vars, body) => Fof::Forall(vars.clone(), Box::new(rename_var(body, old, new))),
        Fof::Exists(vars, body) => {
            if vars.iter().any(|v| v == old) {
                f.clone()
            } else {
                Fof::Exists(vars.clone(), Box::new(rename_var(body, old, new)))
            }
        }
        Fof::True => Fof::True,
        Fof::False => Fof::False,
    }
}
