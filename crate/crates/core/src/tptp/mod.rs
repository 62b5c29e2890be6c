//! Frontend for TPTP-style first-order problem files: the accepted grammar
//! is the FOF subset over ∀, ∃, ∧, ∨, ⇒, ¬, atoms, = and ≠, with variables
//! and arity-0 constants only. `%` starts a line comment; `include('path').`
//! pulls in another file relative to the including one.

mod normalize;
mod parser;

pub use normalize::to_coherent;

pub use crate::logic::{equality_decidability_formula, is_equality_decidability};
pub use parser::print_problem;

use parser::parse_problem_text;

use std::collections::HashMap;

use thiserror::Error;

use crate::logic::{encode_negation, CoherentFormula, NamedFormula, Role, Signature, Term, Theory};
use crate::logic::{Atom, Constant, PredicateSymbol};

/// Default sort assigned to every term of an unsorted input problem.
pub const DEFAULT_SORT: &str = "point";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TptpError {
    #[error("{file}:{line}:{column}: syntax error: {message}")]
    Syntax {
        file: String,
        line: u32,
        column: u32,
        message: String,
    },
    #[error("include cycle through {0}")]
    IncludeCycle(String),
    #[error("cannot include {path}: {message}")]
    Include { path: String, message: String },
    #[error("duplicate formula name {0}")]
    DuplicateName(String),
    #[error("formula {name} is not coherent: {reason}")]
    NotCoherent { name: String, reason: String },
    #[error("predicate {predicate} used with arities {first} and {second}")]
    ArityConflict {
        predicate: String,
        first: usize,
        second: usize,
    },
}

/// First-order terms of the accepted fragment.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RawTerm {
    Variable(String),
    Constant(String),
}

/// First-order formulas of the accepted fragment, as parsed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Fof {
    True,
    False,
    Atom { predicate: String, args: Vec<RawTerm> },
    Eq(RawTerm, RawTerm),
    Neq(RawTerm, RawTerm),
    Not(Box<Fof>),
    And(Vec<Fof>),
    Or(Vec<Fof>),
    Implies(Box<Fof>, Box<Fof>),
    Forall(Vec<String>, Box<Fof>),
    Exists(Vec<String>, Box<Fof>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotatedFormula {
    pub name: String,
    pub role: Role,
    pub formula: Fof,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SourceProblem {
    pub formulas: Vec<AnnotatedFormula>,
    /// Raw include paths, in order of appearance (already resolved).
    pub includes: Vec<String>,
}

/// Supplies the text of an included file. `from` is the id of the including
/// file, `path` the literal include argument; the returned id is used for
/// cycle detection and must be stable (e.g. a canonical path).
pub trait IncludeResolver {
    fn resolve(&self, from: &str, path: &str) -> Result<(String, String), String>;
}

/// Resolver for tests and in-memory use: a map from path to content, with
/// includes resolved against the map keys directly.
pub struct MapResolver(pub HashMap<String, String>);

impl IncludeResolver for MapResolver {
    fn resolve(&self, _from: &str, path: &str) -> Result<(String, String), String> {
        self.0
            .get(path)
            .map(|t| (path.to_string(), t.clone()))
            .ok_or_else(|| format!("no such file {path}"))
    }
}

/// Parses `text`, resolving includes transitively; duplicate formula names
/// are rejected after resolution.
pub fn parse_problem(
    text: &str,
    file_id: &str,
    resolver: &dyn IncludeResolver,
) -> Result<SourceProblem, TptpError> {
    let mut problem = SourceProblem::default();
    let mut stack = vec![file_id.to_string()];
    parse_into(text, file_id, resolver, &mut problem, &mut stack)?;
    let mut seen: Vec<&str> = Vec::new();
    for f in &problem.formulas {
        if seen.contains(&f.name.as_str()) {
            return Err(TptpError::DuplicateName(f.name.clone()));
        }
        seen.push(&f.name);
    }
    Ok(problem)
}

fn parse_into(
    text: &str,
    file_id: &str,
    resolver: &dyn IncludeResolver,
    out: &mut SourceProblem,
    stack: &mut Vec<String>,
) -> Result<(), TptpError> {
    let units = parse_problem_text(text, file_id)?;
    for unit in units {
        match unit {
            parser::Unit::Formula(f) => out.formulas.push(f),
            parser::Unit::Include(path) => {
                let (id, content) = resolver.resolve(file_id, &path).map_err(|message| {
                    TptpError::Include {
                        path: path.clone(),
                        message,
                    }
                })?;
                if stack.contains(&id) {
                    return Err(TptpError::IncludeCycle(id));
                }
                out.includes.push(id.clone());
                stack.push(id.clone());
                parse_into(&content, &id, resolver, out, stack)?;
                stack.pop();
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct AssembleOptions {
    pub theory_name: String,
    /// Adds, per sort, the axiom `∀x,y (x = y ∨ x ≠ y)` (named ax_g1 for
    /// single-sorted problems). On by default: case splits on equalities
    /// carry most geometry proofs.
    pub add_equality_decidability: bool,
}

impl Default for AssembleOptions {
    fn default() -> Self {
        AssembleOptions {
            theory_name: "theory".into(),
            add_equality_decidability: true,
        }
    }
}

/// Builds a theory (signature inferred from usage, negation encoded) plus
/// the list of conjectures to prove. Formulas with role axiom, definition or
/// theorem become theory axioms in declaration order.
pub fn assemble_theory(
    problem: &SourceProblem,
    options: &AssembleOptions,
) -> Result<(Theory, Vec<NamedFormula>), TptpError> {
    let mut axioms: Vec<NamedFormula> = Vec::new();
    let mut conjectures: Vec<NamedFormula> = Vec::new();
    let mut uses_equality = false;
    for af in &problem.formulas {
        let formula = to_coherent(&af.formula).map_err(|reason| TptpError::NotCoherent {
            name: af.name.clone(),
            reason,
        })?;
        if formula_uses_equality(&formula) {
            uses_equality = true;
        }
        let nf = NamedFormula {
            name: af.name.clone(),
            role: af.role,
            formula,
        };
        match af.role {
            Role::Conjecture => conjectures.push(nf),
            _ => axioms.push(nf),
        }
    }

    let mut sig = infer_signature(&axioms, &conjectures)?;
    if uses_equality || options.add_equality_decidability {
        sig.ensure_equality(DEFAULT_SORT);
    }

    let theory = Theory {
        name: options.theory_name.clone(),
        signature: sig,
        axioms,
    };
    let mut theory = encode_negation(&theory);

    if options.add_equality_decidability {
        let sorts = theory.signature.sorts.clone();
        let single = sorts.len() == 1;
        for sort in sorts {
            let (eq, neq) = theory.signature.ensure_equality(&sort);
            let name = if single { "ax_g1".to_string() } else { format!("ax_g1_{sort}") };
            if theory.axiom(&name).is_some() {
                continue;
            }
            theory.axioms.push(NamedFormula {
                name,
                role: Role::Axiom,
                formula: equality_decidability_formula(&eq, &neq, &sort),
            });
        }
    }

    let conjectures = conjectures
        .iter()
        .map(|c| NamedFormula {
            name: c.name.clone(),
            role: c.role,
            formula: crate::logic::rewrite_negations(&c.formula, &theory.signature),
        })
        .collect();
    Ok((theory, conjectures))
}

fn formula_uses_equality(f: &CoherentFormula) -> bool {
    let eq_atom = |a: &Atom| a.predicate == "eq";
    f.premises.iter().any(eq_atom)
        || f.conclusion
            .iter()
            .any(|d| d.conjuncts.iter().any(eq_atom))
}

fn infer_signature(
    axioms: &[NamedFormula],
    conjectures: &[NamedFormula],
) -> Result<Signature, TptpError> {
    let mut sig = Signature {
        sorts: vec![DEFAULT_SORT.to_string()],
        predicates: Vec::new(),
        constants: Vec::new(),
    };
    let note_atom = |sig: &mut Signature, a: &Atom| -> Result<(), TptpError> {
        if a.predicate == "eq" {
            // Declared by ensure_equality with its partner.
            if a.args.len() != 2 {
                return Err(TptpError::ArityConflict {
                    predicate: "eq".into(),
                    first: 2,
                    second: a.args.len(),
                });
            }
        } else {
            match sig.predicates.iter().find(|p| p.name == a.predicate) {
                Some(p) if p.arity() != a.args.len() => {
                    return Err(TptpError::ArityConflict {
                        predicate: a.predicate.clone(),
                        first: p.arity(),
                        second: a.args.len(),
                    })
                }
                Some(_) => {}
                None => sig.predicates.push(PredicateSymbol {
                    name: a.predicate.clone(),
                    arg_sorts: vec![DEFAULT_SORT.to_string(); a.args.len()],
                    is_equality: false,
                    negated_partner: None,
                }),
            }
        }
        for t in &a.args {
            if let Term::Constant(n) = t {
                if sig.constant(n).is_none() {
                    sig.constants.push(Constant {
                        name: n.clone(),
                        sort: DEFAULT_SORT.to_string(),
                    });
                }
            }
        }
        Ok(())
    };
    for nf in axioms.iter().chain(conjectures) {
        for a in &nf.formula.premises {
            note_atom(&mut sig, a)?;
        }
        for d in &nf.formula.conclusion {
            for a in &d.conjuncts {
                note_atom(&mut sig, a)?;
            }
        }
    }
    Ok(sig)
}
