//! Abstract syntax for the coherent fragment: signatures, formulas of the
//! shape `A1 ∧ … ∧ An ⇒ ∃y (B1 ∨ … ∨ Bm)`, substitution, and the encoding
//! of negation through partner predicates.
//!
//! Everything here is immutable after construction; operations return new
//! values. Collections keep declaration order so downstream output is
//! reproducible byte for byte.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LogicError {
    #[error("unbound variable {0}")]
    UnboundVariable(String),
    #[error("sort mismatch: {0}")]
    SortMismatch(String),
    #[error("ill-formed: {0}")]
    IllFormed(String),
}

/// A typed constant symbol (arity-0 function). Compound terms are not
/// representable: the fragment handled here has no function symbols of
/// arity above zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Constant {
    pub name: String,
    pub sort: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Variable {
    pub name: String,
    pub sort: String,
}

/// Argument position of an atom: either a constant or a variable,
/// referenced by name. Which is which is fixed by the enclosing context
/// (signature constants vs. the formula's binders).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Constant(String),
    Variable(String),
}

impl Term {
    pub fn name(&self) -> &str {
        match self {
            Term::Constant(n) | Term::Variable(n) => n,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PredicateSymbol {
    pub name: String,
    pub arg_sorts: Vec<String>,
    /// Exactly one built-in equality predicate per sort.
    pub is_equality: bool,
    /// Name of the predicate standing for this one's negation, when present.
    /// Partner links are symmetric; equality's partner is disequality.
    pub negated_partner: Option<String>,
}

impl PredicateSymbol {
    pub fn arity(&self) -> usize {
        self.arg_sorts.len()
    }
}

/// An atomic formula, possibly carrying a transient negation marker set by
/// the frontend. `encode_negation` removes every marker.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub predicate: String,
    pub args: Vec<Term>,
    pub negated: bool,
}

impl Atom {
    pub fn new(predicate: impl Into<String>, args: Vec<Term>) -> Self {
        Atom {
            predicate: predicate.into(),
            args,
            negated: false,
        }
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(|t| matches!(t, Term::Constant(_)))
    }
}

/// One disjunct of a conclusion: an existentially closed conjunction.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Disjunct {
    pub existential_vars: Vec<Variable>,
    pub conjuncts: Vec<Atom>,
}

/// `∀x (A1 ∧ … ∧ An ⇒ ∃y(B1) ∨ … ∨ ∃y(Bm))`. The empty premise list is ⊤,
/// the empty conclusion list is ⊥ (the empty disjunction).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CoherentFormula {
    pub universal_vars: Vec<Variable>,
    pub premises: Vec<Atom>,
    pub conclusion: Vec<Disjunct>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    Axiom,
    Definition,
    Theorem,
    Conjecture,
}

impl Role {
    pub fn as_str(&self) -> &'static str {
        match self {
            Role::Axiom => "axiom",
            Role::Definition => "definition",
            Role::Theorem => "theorem",
            Role::Conjecture => "conjecture",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedFormula {
    pub name: String,
    pub role: Role,
    pub formula: CoherentFormula,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Signature {
    pub sorts: Vec<String>,
    pub predicates: Vec<PredicateSymbol>,
    pub constants: Vec<Constant>,
}

impl Signature {
    pub fn predicate(&self, name: &str) -> Option<&PredicateSymbol> {
        self.predicates.iter().find(|p| p.name == name)
    }

    pub fn constant(&self, name: &str) -> Option<&Constant> {
        self.constants.iter().find(|c| c.name == name)
    }

    pub fn equality_for_sort(&self, sort: &str) -> Option<&PredicateSymbol> {
        self.predicates
            .iter()
            .find(|p| p.is_equality && p.arg_sorts.first().map(String::as_str) == Some(sort))
    }

    /// True when `name` is a built-in equality predicate.
    pub fn is_equality(&self, name: &str) -> bool {
        self.predicate(name).is_some_and(|p| p.is_equality)
    }

    /// True when `name` is the negated partner of an equality predicate.
    pub fn is_disequality(&self, name: &str) -> bool {
        self.predicate(name).is_some_and(|p| {
            p.negated_partner
                .as_deref()
                .is_some_and(|q| self.is_equality(q))
        })
    }

    /// Equality or disequality: the two predicates the checker and the
    /// engine treat as interpreted (symmetric, subject to substitution).
    pub fn is_symmetric_binary(&self, name: &str) -> bool {
        self.is_equality(name) || self.is_disequality(name)
    }

    /// Declares the built-in equality and disequality predicates for
    /// `sort` if they are not present yet; returns their names.
    pub fn ensure_equality(&mut self, sort: &str) -> (String, String) {
        if let Some(eq) = self.equality_for_sort(sort) {
            let eq_name = eq.name.clone();
            let neq_name = eq.negated_partner.clone().expect("equality has a partner");
            return (eq_name, neq_name);
        }
        let (eq_name, neq_name) = if self.sorts.len() <= 1 {
            ("eq".to_string(), "neq".to_string())
        } else {
            (format!("eq_{sort}"), format!("neq_{sort}"))
        };
        self.predicates.push(PredicateSymbol {
            name: eq_name.clone(),
            arg_sorts: vec![sort.to_string(), sort.to_string()],
            is_equality: true,
            negated_partner: Some(neq_name.clone()),
        });
        self.predicates.push(PredicateSymbol {
            name: neq_name.clone(),
            arg_sorts: vec![sort.to_string(), sort.to_string()],
            is_equality: false,
            negated_partner: Some(eq_name.clone()),
        });
        (eq_name, neq_name)
    }

    pub fn validate(&self) -> Result<(), LogicError> {
        if self.sorts.is_empty() {
            return Err(LogicError::IllFormed("signature declares no sort".into()));
        }
        for (i, s) in self.sorts.iter().enumerate() {
            if self.sorts[..i].contains(s) {
                return Err(LogicError::IllFormed(format!("duplicate sort {s}")));
            }
        }
        for (i, p) in self.predicates.iter().enumerate() {
            if self.predicates[..i].iter().any(|q| q.name == p.name) {
                return Err(LogicError::IllFormed(format!("duplicate predicate {}", p.name)));
            }
            for s in &p.arg_sorts {
                if !self.sorts.contains(s) {
                    return Err(LogicError::IllFormed(format!(
                        "predicate {} uses undeclared sort {s}",
                        p.name
                    )));
                }
            }
            if p.is_equality
                && (p.arg_sorts.len() != 2 || p.arg_sorts[0] != p.arg_sorts[1]) {
                    return Err(LogicError::IllFormed(format!(
                        "equality predicate {} must be binary over one sort",
                        p.name
                    )));
                }
            if let Some(partner) = &p.negated_partner {
                match self.predicate(partner) {
                    None => {
                        return Err(LogicError::IllFormed(format!(
                            "partner {partner} of {} is not declared",
                            p.name
                        )))
                    }
                    Some(q) => {
                        if q.arg_sorts != p.arg_sorts {
                            return Err(LogicError::SortMismatch(format!(
                                "partners {} and {} disagree on argument sorts",
                                p.name, q.name
                            )));
                        }
                        if q.negated_partner.as_deref() != Some(p.name.as_str()) {
                            return Err(LogicError::IllFormed(format!(
                                "partner link {} ↔ {} is not symmetric",
                                p.name, q.name
                            )));
                        }
                    }
                }
            }
        }
        for (i, c) in self.constants.iter().enumerate() {
            if self.constants[..i].iter().any(|d| d.name == c.name) {
                return Err(LogicError::IllFormed(format!("duplicate constant {}", c.name)));
            }
            if !self.sorts.contains(&c.sort) {
                return Err(LogicError::IllFormed(format!(
                    "constant {} has undeclared sort {}",
                    c.name, c.sort
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Theory {
    pub name: String,
    pub signature: Signature,
    pub axioms: Vec<NamedFormula>,
}

impl Theory {
    pub fn axiom(&self, name: &str) -> Option<&NamedFormula> {
        self.axioms.iter().find(|a| a.name == name)
    }

    pub fn validate(&self) -> Result<(), LogicError> {
        self.signature.validate()?;
        for (i, a) in self.axioms.iter().enumerate() {
            if self.axioms[..i].iter().any(|b| b.name == a.name) {
                return Err(LogicError::IllFormed(format!("duplicate axiom name {}", a.name)));
            }
            validate_formula(&a.formula, &self.signature)
                .map_err(|e| LogicError::IllFormed(format!("axiom {}: {e}", a.name)))?;
        }
        Ok(())
    }
}

/// Checks the structural invariants of a formula against a signature:
/// declared symbols, matching arities and sorts, no compound terms, each
/// variable bound exactly once, free variables confined to binders.
pub fn validate_formula(f: &CoherentFormula, sig: &Signature) -> Result<(), LogicError> {
    let mut bound: Vec<&Variable> = Vec::new();
    for v in &f.universal_vars {
        if bound.iter().any(|w| w.name == v.name) {
            return Err(LogicError::IllFormed(format!("variable {} bound twice", v.name)));
        }
        if !sig.sorts.contains(&v.sort) {
            return Err(LogicError::IllFormed(format!(
                "variable {} has undeclared sort {}",
                v.name, v.sort
            )));
        }
        bound.push(v);
    }
    let scope: Vec<Variable> = f.universal_vars.clone();
    for a in &f.premises {
        validate_atom(a, sig, &scope)?;
    }
    for d in &f.conclusion {
        let mut inner = scope.clone();
        for v in &d.existential_vars {
            if bound.iter().any(|w| w.name == v.name) {
                return Err(LogicError::IllFormed(format!("variable {} bound twice", v.name)));
            }
            bound.push(v);
            inner.push(v.clone());
        }
        if d.conjuncts.is_empty() {
            return Err(LogicError::IllFormed("disjunct with no conjuncts".into()));
        }
        for a in &d.conjuncts {
            validate_atom(a, sig, &inner)?;
        }
        for v in &d.existential_vars {
            let used = d
                .conjuncts
                .iter()
                .any(|a| a.args.iter().any(|t| matches!(t, Term::Variable(n) if *n == v.name)));
            if !used {
                return Err(LogicError::IllFormed(format!(
                    "existential variable {} occurs in no conjunct",
                    v.name
                )));
            }
        }
    }
    Ok(())
}

pub fn validate_atom(a: &Atom, sig: &Signature, scope: &[Variable]) -> Result<(), LogicError> {
    let p = sig
        .predicate(&a.predicate)
        .ok_or_else(|| LogicError::IllFormed(format!("undeclared predicate {}", a.predicate)))?;
    if p.arity() != a.args.len() {
        return Err(LogicError::IllFormed(format!(
            "predicate {} used with arity {} (declared {})",
            a.predicate,
            a.args.len(),
            p.arity()
        )));
    }
    for (t, want) in a.args.iter().zip(&p.arg_sorts) {
        let got = match t {
            Term::Constant(n) => sig
                .constant(n)
                .map(|c| c.sort.clone())
                .ok_or_else(|| LogicError::IllFormed(format!("undeclared constant {n}")))?,
            Term::Variable(n) => scope
                .iter()
                .find(|v| v.name == *n)
                .map(|v| v.sort.clone())
                .ok_or_else(|| LogicError::UnboundVariable(n.clone()))?,
        };
        if got != *want {
            return Err(LogicError::SortMismatch(format!(
                "argument {} of {} has sort {got}, expected {want}",
                t.name(),
                a.predicate
            )));
        }
    }
    Ok(())
}

/// Variables occurring outside any binder of `a`.
pub fn free_vars_atom(a: &Atom) -> Vec<String> {
    let mut out = Vec::new();
    for t in &a.args {
        if let Term::Variable(n) = t {
            if !out.contains(n) {
                out.push(n.clone());
            }
        }
    }
    out
}

pub fn free_vars_disjunct(d: &Disjunct) -> Vec<String> {
    let mut out = Vec::new();
    for a in &d.conjuncts {
        for v in free_vars_atom(a) {
            if !d.existential_vars.iter().any(|e| e.name == v) && !out.contains(&v) {
                out.push(v);
            }
        }
    }
    out
}

pub fn free_vars_formula(f: &CoherentFormula) -> Vec<String> {
    let mut out = Vec::new();
    for a in &f.premises {
        for v in free_vars_atom(a) {
            if !out.contains(&v) {
                out.push(v);
            }
        }
    }
    for d in &f.conclusion {
        for v in free_vars_disjunct(d) {
            if !out.contains(&v) {
                out.push(v);
            }
        }
    }
    out.retain(|v| !f.universal_vars.iter().any(|u| u.name == *v));
    out
}

/// Binding of variable names to constant names, ordered for reproducibility.
pub type Binding = BTreeMap<String, String>;

/// Instantiates `a` under `binding`; the result is ground.
pub fn substitute_atom(a: &Atom, binding: &Binding) -> Result<Atom, LogicError> {
    let mut args = Vec::with_capacity(a.args.len());
    for t in &a.args {
        match t {
            Term::Constant(n) => args.push(Term::Constant(n.clone())),
            Term::Variable(n) => match binding.get(n) {
                Some(c) => args.push(Term::Constant(c.clone())),
                None => return Err(LogicError::UnboundVariable(n.clone())),
            },
        }
    }
    Ok(Atom {
        predicate: a.predicate.clone(),
        args,
        negated: a.negated,
    })
}

/// Instantiates a conjunction of atoms under `binding`.
pub fn substitute_conjuncts(atoms: &[Atom], binding: &Binding) -> Result<Vec<Atom>, LogicError> {
    atoms.iter().map(|a| substitute_atom(a, binding)).collect()
}

/// Rewrites every negation marker into an atom over a partner predicate and
/// postulates, for each ordinary predicate R that occurred negated, the
/// axioms `∀x (R(x) ∧ R̄(x) ⇒ ⊥)` and `∀x (⊤ ⇒ R(x) ∨ R̄(x))`. Negated
/// equality becomes the built-in disequality with no extra axioms (its
/// excluded middle is the separate decidability axiom). Idempotent.
pub fn encode_negation(theory: &Theory) -> Theory {
    let mut sig = theory.signature.clone();
    let mut negated: Vec<String> = Vec::new();
    for ax in &theory.axioms {
        collect_negated(&ax.formula, &mut negated);
    }

    let mut new_axioms: Vec<NamedFormula> = Vec::new();
    for pname in &negated {
        let p = sig.predicate(pname).expect("negated predicate declared").clone();
        if p.is_equality {
            let sort = p.arg_sorts[0].clone();
            sig.ensure_equality(&sort);
            continue;
        }
        if p.negated_partner.is_some() {
            continue; // already encoded
        }
        let partner = format!("{pname}_bar");
        sig.predicates.push(PredicateSymbol {
            name: partner.clone(),
            arg_sorts: p.arg_sorts.clone(),
            is_equality: false,
            negated_partner: Some(pname.clone()),
        });
        let idx = sig.predicates.iter().position(|q| q.name == *pname).unwrap();
        sig.predicates[idx].negated_partner = Some(partner.clone());

        let vars: Vec<Variable> = p
            .arg_sorts
            .iter()
            .enumerate()
            .map(|(i, s)| Variable {
                name: format!("X{}", i + 1),
                sort: s.clone(),
            })
            .collect();
        let args: Vec<Term> = vars.iter().map(|v| Term::Variable(v.name.clone())).collect();
        new_axioms.push(NamedFormula {
            name: format!("{pname}_bar_incompatibility"),
            role: Role::Axiom,
            formula: CoherentFormula {
                universal_vars: vars.clone(),
                premises: vec![
                    Atom::new(pname.clone(), args.clone()),
                    Atom::new(partner.clone(), args.clone()),
                ],
                conclusion: vec![],
            },
        });
        new_axioms.push(NamedFormula {
            name: format!("{pname}_bar_totality"),
            role: Role::Axiom,
            formula: CoherentFormula {
                universal_vars: vars,
                premises: vec![],
                conclusion: vec![
                    Disjunct {
                        existential_vars: vec![],
                        conjuncts: vec![Atom::new(pname.clone(), args.clone())],
                    },
                    Disjunct {
                        existential_vars: vec![],
                        conjuncts: vec![Atom::new(partner, args)],
                    },
                ],
            },
        });
    }

    let mut axioms: Vec<NamedFormula> = theory
        .axioms
        .iter()
        .map(|ax| NamedFormula {
            name: ax.name.clone(),
            role: ax.role,
            formula: rewrite_negations(&ax.formula, &sig),
        })
        .collect();
    axioms.extend(new_axioms);

    Theory {
        name: theory.name.clone(),
        signature: sig,
        axioms,
    }
}

/// Rewrites the negation markers of one formula against a signature whose
/// partner predicates already exist.
pub fn rewrite_negations(f: &CoherentFormula, sig: &Signature) -> CoherentFormula {
    let fix = |a: &Atom| -> Atom {
        if !a.negated {
            return a.clone();
        }
        let p = sig.predicate(&a.predicate).expect("declared");
        let partner = p
            .negated_partner
            .clone()
            .expect("encode_negation declared a partner for every negated predicate");
        Atom {
            predicate: partner,
            args: a.args.clone(),
            negated: false,
        }
    };
    CoherentFormula {
        universal_vars: f.universal_vars.clone(),
        premises: f.premises.iter().map(fix).collect(),
        conclusion: f
            .conclusion
            .iter()
            .map(|d| Disjunct {
                existential_vars: d.existential_vars.clone(),
                conjuncts: d.conjuncts.iter().map(fix).collect(),
            })
            .collect(),
    }
}

fn collect_negated(f: &CoherentFormula, out: &mut Vec<String>) {
    let mut push = |a: &Atom| {
        if a.negated && !out.contains(&a.predicate) {
            out.push(a.predicate.clone());
        }
    };
    f.premises.iter().for_each(&mut push);
    for d in &f.conclusion {
        d.conjuncts.iter().for_each(&mut push);
    }
}

/// `∀A,B (⊤ ⇒ A = B ∨ A ≠ B)`, the shape the engine recognizes and applies
/// lazily instead of enumerating every pair of constants.
pub fn equality_decidability_formula(eq: &str, neq: &str, sort: &str) -> CoherentFormula {
    let vars = vec![
        Variable {
            name: "A".into(),
            sort: sort.into(),
        },
        Variable {
            name: "B".into(),
            sort: sort.into(),
        },
    ];
    let args = vec![Term::Variable("A".into()), Term::Variable("B".into())];
    CoherentFormula {
        universal_vars: vars,
        premises: vec![],
        conclusion: vec![
            Disjunct {
                existential_vars: vec![],
                conjuncts: vec![Atom::new(eq, args.clone())],
            },
            Disjunct {
                existential_vars: vec![],
                conjuncts: vec![Atom::new(neq, args)],
            },
        ],
    }
}

/// True when `f` matches the decidability shape over the signature's
/// equality/disequality pair: premise-free, two single-atom disjuncts
/// `eq(x,y)` and `neq(x,y)` over the same two universal variables.
pub fn is_equality_decidability(f: &CoherentFormula, sig: &Signature) -> bool {
    if !f.premises.is_empty() || f.conclusion.len() != 2 || f.universal_vars.len() != 2 {
        return false;
    }
    let [d1, d2] = [&f.conclusion[0], &f.conclusion[1]];
    if !d1.existential_vars.is_empty()
        || !d2.existential_vars.is_empty()
        || d1.conjuncts.len() != 1
        || d2.conjuncts.len() != 1
    {
        return false;
    }
    let (a, b) = (&d1.conjuncts[0], &d2.conjuncts[0]);
    sig.is_equality(&a.predicate)
        && sig.is_disequality(&b.predicate)
        && a.args == b.args
        && a.args
            == vec![
                Term::Variable(f.universal_vars[0].name.clone()),
                Term::Variable(f.universal_vars[1].name.clone()),
            ]
}

/// The conjecture instantiation shared by the engine and the checker:
/// universal variables become fresh constants named after themselves
/// (suffixed on collision), premises become the initial fact set, and the
/// conclusion becomes the goal with the same substitution applied.
pub struct InstantiatedConjecture {
    pub constants: Vec<Constant>,
    pub premises: Vec<Atom>,
    pub goal: Vec<Disjunct>,
}

pub fn instantiate_conjecture(
    conjecture: &CoherentFormula,
    sig: &Signature,
) -> Result<InstantiatedConjecture, LogicError> {
    let mut taken: Vec<String> = sig.constants.iter().map(|c| c.name.clone()).collect();
    let mut binding = Binding::new();
    let mut constants = Vec::new();
    for v in &conjecture.universal_vars {
        let mut name = v.name.clone();
        let mut n = 0;
        while taken.contains(&name) {
            n += 1;
            name = format!("{}{}", v.name, n);
        }
        taken.push(name.clone());
        binding.insert(v.name.clone(), name.clone());
        constants.push(Constant {
            name,
            sort: v.sort.clone(),
        });
    }
    let premises = substitute_conjuncts(&conjecture.premises, &binding)?;
    let goal = conjecture
        .conclusion
        .iter()
        .map(|d| {
            let inner: Vec<Atom> = d
                .conjuncts
                .iter()
                .map(|a| {
                    // Existential variables stay variable; universals become constants.
                    let args = a
                        .args
                        .iter()
                        .map(|t| match t {
                            Term::Variable(n) => match binding.get(n) {
                                Some(c) => Term::Constant(c.clone()),
                                None => Term::Variable(n.clone()),
                            },
                            c => c.clone(),
                        })
                        .collect();
                    Atom {
                        predicate: a.predicate.clone(),
                        args,
                        negated: a.negated,
                    }
                })
                .collect();
            Disjunct {
                existential_vars: d.existential_vars.clone(),
                conjuncts: inner,
            }
        })
        .collect();
    Ok(InstantiatedConjecture {
        constants,
        premises,
        goal,
    })
}

/// Default functional rendering used by diagnostics; equality and
/// disequality print infix. Exporters apply their own layout instead.
pub fn atom_to_string(a: &Atom, sig: &Signature) -> String {
    let neg = if a.negated { "~" } else { "" };
    if sig.is_equality(&a.predicate) && a.args.len() == 2 {
        return format!("{neg}{} = {}", a.args[0].name(), a.args[1].name());
    }
    if sig.is_disequality(&a.predicate) && a.args.len() == 2 {
        return format!("{neg}{} != {}", a.args[0].name(), a.args[1].name());
    }
    if a.args.is_empty() {
        return format!("{neg}{}", a.predicate);
    }
    let args: Vec<&str> = a.args.iter().map(|t| t.name()).collect();
    format!("{neg}{}({})", a.predicate, args.join(", "))
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}
