//! Proof objects for the four-rule calculus (mp / case split / assumption /
//! ex falso) and an independent checker that replays a tree against a theory
//! and conjecture. The checker shares only the abstract syntax with the
//! prover; it keeps a literal fact context and never canonicalizes, so every
//! use of equality must be spelled out as an explicit substitution step.

use std::collections::BTreeMap;

use crate::logic::{
    instantiate_conjecture, substitute_atom, Atom, Binding, NamedFormula,
    Signature, Term, Theory,
};

/// Ground disjunction: the instantiated conclusion of an axiom. One disjunct
/// is a conjunction of ground atoms; the empty vector is ⊥.
pub type GroundClause = Vec<Vec<Atom>>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepKind {
    ModusPonens {
        axiom: String,
        /// Variable → constant, in the axiom's binder order when rendered.
        binding: Binding,
        /// Instantiated premises, in the axiom's premise order.
        premises: Vec<Atom>,
        derived: GroundClause,
        /// Fresh constants introduced for existentials, in disjunct order.
        witnesses: Vec<String>,
    },
    EqualitySubstitution {
        source: Atom,
        /// Equality facts justifying the rewrite; empty for a pure
        /// orientation (symmetry) step.
        equations: Vec<Atom>,
        derived: Atom,
        /// Rendering order of source and equations, as fact sentences.
        /// Indices: 0 = source, 1.. = equations in order.
        display_order: Vec<usize>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofStep {
    pub kind: StepKind,
    /// Stored redundantly: 3 × number of enclosing case splits.
    pub indentation: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    GoalReachedThesis,
    GoalReachedContradiction,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClosingKind {
    CaseSplit {
        disjunction: GroundClause,
        branches: Vec<ProofTree>,
    },
    From {
        facts: Vec<Atom>,
        disjunct_index: usize,
        witness_binding: Binding,
    },
    Efq {
        facts: Vec<Atom>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofClosing {
    pub kind: ClosingKind,
    pub outcome: Outcome,
    pub indentation: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofTree {
    pub steps: Vec<ProofStep>,
    pub closing: ProofClosing,
    pub name: Option<String>,
}

impl ProofTree {
    /// Total number of steps and closings, branches included.
    pub fn size(&self) -> usize {
        let mut n = self.steps.len() + 1;
        if let ClosingKind::CaseSplit { branches, .. } = &self.closing.kind {
            n += branches.iter().map(ProofTree::size).sum::<usize>();
        }
        n
    }

    /// Rewrites every stored indentation to 3 × split depth.
    pub fn renumber_indentation(&mut self, depth: u32) {
        for s in &mut self.steps {
            s.indentation = 3 * depth;
        }
        self.closing.indentation = 3 * depth;
        if let ClosingKind::CaseSplit { branches, .. } = &mut self.closing.kind {
            for b in branches {
                b.renumber_indentation(depth + 1);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CheckResult {
    Ok,
    Violation {
        /// Branch path from the root, e.g. "0.1" = second branch of the
        /// first split.
        path: String,
        rule: String,
        detail: String,
    },
}

impl CheckResult {
    pub fn is_ok(&self) -> bool {
        matches!(self, CheckResult::Ok)
    }
}

struct Checker<'a> {
    theory: &'a Theory,
    sig: &'a Signature,
    goal: Vec<crate::logic::Disjunct>,
}

struct Ctx {
    /// Literal ground atoms known on this branch.
    facts: Vec<Atom>,
    /// Ground disjunctions derived by mp steps, available for splitting.
    clauses: Vec<GroundClause>,
    /// Every constant mentioned so far (for witness freshness).
    constants: Vec<String>,
}

impl Ctx {
    fn has_fact(&self, a: &Atom, sig: &Signature) -> bool {
        // Reflexive equality is free: equality axioms are implicit.
        if sig.is_equality(&a.predicate) && a.args.len() == 2 && a.args[0] == a.args[1] {
            return true;
        }
        self.facts.contains(a)
    }

    fn note_atom(&mut self, a: &Atom) {
        for t in &a.args {
            if let Term::Constant(c) = t {
                if !self.constants.contains(c) {
                    self.constants.push(c.clone());
                }
            }
        }
    }

    fn add_fact(&mut self, a: Atom) {
        self.note_atom(&a);
        if !self.facts.contains(&a) {
            self.facts.push(a);
        }
    }
}

/// Replays `tree` against `(theory, conjecture)`. The goal is instantiated
/// once and threaded unchanged through every rule.
pub fn check_proof(theory: &Theory, conjecture: &NamedFormula, tree: &ProofTree) -> CheckResult {
    let sig = &theory.signature;
    let inst = match instantiate_conjecture(&conjecture.formula, sig) {
        Ok(i) => i,
        Err(e) => {
            return CheckResult::Violation {
                path: String::new(),
                rule: "conjecture".into(),
                detail: e.to_string(),
            }
        }
    };
    let mut ctx = Ctx {
        facts: Vec::new(),
        clauses: Vec::new(),
        constants: sig.constants.iter().map(|c| c.name.clone()).collect(),
    };
    for c in &inst.constants {
        if !ctx.constants.contains(&c.name) {
            ctx.constants.push(c.name.clone());
        }
    }
    for p in &inst.premises {
        ctx.add_fact(p.clone());
    }
    let checker = Checker {
        theory,
        sig,
        goal: inst.goal,
    };
    checker.check_tree(tree, &mut ctx, String::new(), 0)
}

impl<'a> Checker<'a> {
    fn violation(&self, path: &str, rule: &str, detail: String) -> CheckResult {
        CheckResult::Violation {
            path: path.to_string(),
            rule: rule.to_string(),
            detail,
        }
    }

    fn check_tree(&self, tree: &ProofTree, ctx: &mut Ctx, path: String, depth: u32) -> CheckResult {
        for (i, step) in tree.steps.iter().enumerate() {
            if step.indentation != 3 * depth {
                return self.violation(
                    &path,
                    "indentation",
                    format!(
                        "step {i} stores indentation {}, recomputed {}",
                        step.indentation,
                        3 * depth
                    ),
                );
            }
            let r = match &step.kind {
                StepKind::ModusPonens {
                    axiom,
                    binding,
                    premises,
                    derived,
                    witnesses,
                } => self.check_mp(ctx, &path, i, axiom, binding, premises, derived, witnesses),
                StepKind::EqualitySubstitution {
                    source,
                    equations,
                    derived,
                    ..
                } => self.check_substitution(ctx, &path, i, source, equations, derived),
            };
            if !r.is_ok() {
                return r;
            }
        }
        if tree.closing.indentation != 3 * depth {
            return self.violation(
                &path,
                "indentation",
                format!(
                    "closing stores indentation {}, recomputed {}",
                    tree.closing.indentation,
                    3 * depth
                ),
            );
        }
        match &tree.closing.kind {
            ClosingKind::CaseSplit {
                disjunction,
                branches,
            } => {
                if branches.len() < 2 {
                    return self.violation(&path, "grammar", "cs requires >= 2 branches".into());
                }
                if branches.len() != disjunction.len() {
                    return self.violation(
                        &path,
                        "cs",
                        format!(
                            "split has {} branches for {} disjuncts",
                            branches.len(),
                            disjunction.len()
                        ),
                    );
                }
                if !ctx.clauses.contains(disjunction) {
                    return self.violation(
                        &path,
                        "cs",
                        "split disjunction was not derived on this branch".into(),
                    );
                }
                for (i, (branch, disjunct)) in branches.iter().zip(disjunction).enumerate() {
                    let mut inner = Ctx {
                        facts: ctx.facts.clone(),
                        clauses: ctx.clauses.clone(),
                        constants: ctx.constants.clone(),
                    };
                    for a in disjunct {
                        inner.add_fact(a.clone());
                    }
                    let sub = format!(
                        "{}{}{}",
                        path,
                        if path.is_empty() { "" } else { "." },
                        i
                    );
                    let r = self.check_tree(branch, &mut inner, sub, depth + 1);
                    if !r.is_ok() {
                        return r;
                    }
                }
                CheckResult::Ok
            }
            ClosingKind::From {
                facts,
                disjunct_index,
                witness_binding,
            } => self.check_from(ctx, &path, facts, *disjunct_index, witness_binding),
            ClosingKind::Efq { facts } => self.check_efq(ctx, &path, facts),
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn check_mp(
        &self,
        ctx: &mut Ctx,
        path: &str,
        step: usize,
        axiom_name: &str,
        binding: &Binding,
        premises: &[Atom],
        derived: &GroundClause,
        witnesses: &[String],
    ) -> CheckResult {
        let at = format!("step {step}");
        let Some(axiom) = self.theory.axiom(axiom_name) else {
            return self.violation(path, "mp", format!("{at}: unknown axiom {axiom_name}"));
        };
        let f = &axiom.formula;
        for v in &f.universal_vars {
            if !binding.contains_key(&v.name) {
                return self.violation(
                    path,
                    "mp",
                    format!("{at}: binding misses universal variable {}", v.name),
                );
            }
        }
        let want: Vec<Atom> = match f
            .premises
            .iter()
            .map(|a| substitute_atom(a, binding))
            .collect::<Result<_, _>>()
        {
            Ok(v) => v,
            Err(e) => return self.violation(path, "mp", format!("{at}: {e}")),
        };
        if want != premises {
            return self.violation(
                path,
                "mp",
                format!("{at}: listed premises are not the axiom's instantiated premises"),
            );
        }
        for p in premises {
            if !ctx.has_fact(p, self.sig) {
                return self.violation(
                    path,
                    "mp",
                    format!("{at}: premise {} is not in the context", atom_str(p, self.sig)),
                );
            }
        }
        // Witnesses instantiate the existentials, disjunct by disjunct.
        let mut wit = witnesses.iter();
        let mut expect: GroundClause = Vec::with_capacity(f.conclusion.len());
        for d in &f.conclusion {
            let mut ext = binding.clone();
            for v in &d.existential_vars {
                match wit.next() {
                    Some(w) => {
                        if ctx.constants.contains(w) {
                            return self.violation(
                                path,
                                "freshness",
                                format!("{at}: witness {w} names an existing constant"),
                            );
                        }
                        ext.insert(v.name.clone(), w.clone());
                    }
                    None => {
                        return self.violation(
                            path,
                            "mp",
                            format!("{at}: too few witnesses for the conclusion"),
                        )
                    }
                }
            }
            match d
                .conjuncts
                .iter()
                .map(|a| substitute_atom(a, &ext))
                .collect::<Result<Vec<_>, _>>()
            {
                Ok(c) => expect.push(c),
                Err(e) => return self.violation(path, "mp", format!("{at}: {e}")),
            }
        }
        if wit.next().is_some() {
            return self.violation(path, "mp", format!("{at}: unused witnesses listed"));
        }
        // Witnesses must also be distinct among themselves.
        for (i, w) in witnesses.iter().enumerate() {
            if witnesses[..i].contains(w) {
                return self.violation(
                    path,
                    "freshness",
                    format!("{at}: witness {w} introduced twice"),
                );
            }
        }
        if expect != *derived {
            return self.violation(
                path,
                "mp",
                format!("{at}: derived clause differs from the instantiated conclusion"),
            );
        }
        if derived.is_empty() {
            return self.violation(
                path,
                "mp",
                format!("{at}: an empty conclusion closes a proof (efq), it is not a step"),
            );
        }
        for w in witnesses {
            ctx.constants.push(w.clone());
        }
        if derived.len() == 1 {
            for a in &derived[0] {
                ctx.add_fact(a.clone());
            }
        } else {
            for d in derived {
                for a in d {
                    ctx.note_atom(a);
                }
            }
            if !ctx.clauses.contains(derived) {
                ctx.clauses.push(derived.clone());
            }
        }
        CheckResult::Ok
    }

    fn check_substitution(
        &self,
        ctx: &mut Ctx,
        path: &str,
        step: usize,
        source: &Atom,
        equations: &[Atom],
        derived: &Atom,
    ) -> CheckResult {
        let at = format!("step {step}");
        if !ctx.has_fact(source, self.sig) {
            return self.violation(
                path,
                "substitution",
                format!("{at}: source {} not in context", atom_str(source, self.sig)),
            );
        }
        for e in equations {
            if !self.sig.is_equality(&e.predicate) {
                return self.violation(
                    path,
                    "substitution",
                    format!("{at}: {} is not an equality fact", atom_str(e, self.sig)),
                );
            }
            if !ctx.has_fact(e, self.sig) {
                return self.violation(
                    path,
                    "substitution",
                    format!("{at}: equation {} not in context", atom_str(e, self.sig)),
                );
            }
        }
        if !substitution_justified(source, equations, derived, self.sig) {
            return self.violation(
                path,
                "substitution",
                format!(
                    "{at}: {} does not follow from {} under the cited equations",
                    atom_str(derived, self.sig),
                    atom_str(source, self.sig)
                ),
            );
        }
        ctx.add_fact(derived.clone());
        CheckResult::Ok
    }

    fn check_from(
        &self,
        ctx: &Ctx,
        path: &str,
        facts: &[Atom],
        index: usize,
        witness_binding: &Binding,
    ) -> CheckResult {
        let Some(disjunct) = self.goal.get(index) else {
            return self.violation(
                path,
                "from",
                format!("goal has no disjunct {index} (len {})", self.goal.len()),
            );
        };
        for v in &disjunct.existential_vars {
            if !witness_binding.contains_key(&v.name) {
                return self.violation(
                    path,
                    "from",
                    format!("witness binding misses existential {}", v.name),
                );
            }
        }
        let want: Vec<Atom> = match disjunct
            .conjuncts
            .iter()
            .map(|a| substitute_atom(a, witness_binding))
            .collect::<Result<_, _>>()
        {
            Ok(v) => v,
            Err(e) => return self.violation(path, "from", e.to_string()),
        };
        if want != facts {
            return self.violation(
                path,
                "from",
                "listed facts do not instantiate the matched goal disjunct".into(),
            );
        }
        for a in facts {
            if !ctx.has_fact(a, self.sig) {
                return self.violation(
                    path,
                    "from",
                    format!("fact {} not in context", atom_str(a, self.sig)),
                );
            }
        }
        CheckResult::Ok
    }

    fn check_efq(&self, ctx: &Ctx, path: &str, facts: &[Atom]) -> CheckResult {
        for a in facts {
            if !ctx.has_fact(a, self.sig) {
                return self.violation(
                    path,
                    "efq",
                    format!("fact {} not in context", atom_str(a, self.sig)),
                );
            }
        }
        // t ≠ t alone is contradictory.
        if facts.len() == 1 {
            let a = &facts[0];
            if self.sig.is_disequality(&a.predicate) && a.args[0] == a.args[1] {
                return CheckResult::Ok;
            }
        }
        // A predicate together with its negated partner on equal arguments.
        if facts.len() == 2 && incompatible_pair(&facts[0], &facts[1], self.sig) {
            return CheckResult::Ok;
        }
        // An instance of an explicit empty-conclusion axiom.
        if self.matches_bottom_axiom(facts) {
            return CheckResult::Ok;
        }
        self.violation(path, "efq", "cited facts do not form a contradiction".into())
    }

    fn matches_bottom_axiom(&self, facts: &[Atom]) -> bool {
        'axioms: for ax in &self.theory.axioms {
            let f = &ax.formula;
            if !f.conclusion.is_empty() || f.premises.len() != facts.len() {
                continue;
            }
            let mut binding = Binding::new();
            for (pat, fact) in f.premises.iter().zip(facts) {
                if pat.predicate != fact.predicate {
                    continue 'axioms;
                }
                for (t, got) in pat.args.iter().zip(&fact.args) {
                    let Term::Constant(g) = got else { continue 'axioms };
                    match t {
                        Term::Constant(c) => {
                            if c != g {
                                continue 'axioms;
                            }
                        }
                        Term::Variable(v) => match binding.get(v) {
                            Some(prev) if prev != g => continue 'axioms,
                            Some(_) => {}
                            None => {
                                binding.insert(v.clone(), g.clone());
                            }
                        },
                    }
                }
            }
            return true;
        }
        false
    }
}

/// True when `derived` is obtainable from `source` by replacing arguments
/// with equals (per the cited equations, used in either direction), allowing
/// one argument swap when the predicate is equality or disequality.
fn substitution_justified(
    source: &Atom,
    equations: &[Atom],
    derived: &Atom,
    sig: &Signature,
) -> bool {
    if source.predicate != derived.predicate || source.args.len() != derived.args.len() {
        return false;
    }
    // Mini union-find over the constants of the equations.
    let mut parent: BTreeMap<String, String> = BTreeMap::new();
    fn find(parent: &mut BTreeMap<String, String>, x: &str) -> String {
        let p = parent.get(x).cloned();
        match p {
            None => x.to_string(),
            Some(p) if p == x => x.to_string(),
            Some(p) => {
                let r = find(parent, &p);
                parent.insert(x.to_string(), r.clone());
                r
            }
        }
    }
    for e in equations {
        if e.args.len() != 2 {
            return false;
        }
        let (a, b) = (e.args[0].name().to_string(), e.args[1].name().to_string());
        let (ra, rb) = (find(&mut parent, &a), find(&mut parent, &b));
        if ra != rb {
            parent.insert(ra, rb);
        }
    }
    let congruent = |parent: &mut BTreeMap<String, String>, xs: &[Term], ys: &[Term]| {
        xs.iter()
            .zip(ys)
            .all(|(x, y)| find(parent, x.name()) == find(parent, y.name()))
    };
    if congruent(&mut parent, &source.args, &derived.args) {
        return true;
    }
    if sig.is_symmetric_binary(&source.predicate) && source.args.len() == 2 {
        let swapped = vec![source.args[1].clone(), source.args[0].clone()];
        if congruent(&mut parent, &swapped, &derived.args) {
            return true;
        }
    }
    false
}

fn incompatible_pair(a: &Atom, b: &Atom, sig: &Signature) -> bool {
    let partner_of = |p: &str| sig.predicate(p).and_then(|q| q.negated_partner.clone());
    if partner_of(&a.predicate).as_deref() != Some(b.predicate.as_str()) {
        return false;
    }
    if a.args == b.args {
        return true;
    }
    // eq/neq may cite the pair in either orientation.
    if sig.is_symmetric_binary(&a.predicate) && a.args.len() == 2 {
        return a.args[0] == b.args[1] && a.args[1] == b.args[0];
    }
    false
}

fn atom_str(a: &Atom, sig: &Signature) -> String {
    crate::logic::atom_to_string(a, sig)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{CoherentFormula, Disjunct, PredicateSymbol, Role, Signature, Theory};

    fn v(n: &str) -> crate::logic::Variable {
        crate::logic::Variable {
            name: n.into(),
            sort: "point".into(),
        }
    }

    fn cvar(n: &str) -> Term {
        Term::Variable(n.into())
    }

    fn c(n: &str) -> Term {
        Term::Constant(n.into())
    }

    fn small_theory() -> Theory {
        let mut sig = Signature {
            sorts: vec!["point".into()],
            predicates: vec![
                PredicateSymbol {
                    name: "p".into(),
                    arg_sorts: vec!["point".into()],
                    is_equality: false,
                    negated_partner: None,
                },
                PredicateSymbol {
                    name: "q".into(),
                    arg_sorts: vec!["point".into()],
                    is_equality: false,
                    negated_partner: None,
                },
                PredicateSymbol {
                    name: "r".into(),
                    arg_sorts: vec!["point".into()],
                    is_equality: false,
                    negated_partner: None,
                },
            ],
            constants: vec![],
        };
        sig.ensure_equality("point");
        Theory {
            name: "t".into(),
            signature: sig,
            axioms: vec![
                NamedFormula {
                    name: "split".into(),
                    role: Role::Axiom,
                    formula: CoherentFormula {
                        universal_vars: vec![v("x")],
                        premises: vec![Atom::new("p", vec![cvar("x")])],
                        conclusion: vec![
                            Disjunct {
                                existential_vars: vec![],
                                conjuncts: vec![Atom::new("q", vec![cvar("x")])],
                            },
                            Disjunct {
                                existential_vars: vec![],
                                conjuncts: vec![Atom::new("r", vec![cvar("x")])],
                            },
                        ],
                    },
                },
                NamedFormula {
                    name: "q_to_r".into(),
                    role: Role::Axiom,
                    formula: CoherentFormula {
                        universal_vars: vec![v("x")],
                        premises: vec![Atom::new("q", vec![cvar("x")])],
                        conclusion: vec![Disjunct {
                            existential_vars: vec![],
                            conjuncts: vec![Atom::new("r", vec![cvar("x")])],
                        }],
                    },
                },
                NamedFormula {
                    name: "wit".into(),
                    role: Role::Axiom,
                    formula: CoherentFormula {
                        universal_vars: vec![v("x")],
                        premises: vec![Atom::new("p", vec![cvar("x")])],
                        conclusion: vec![Disjunct {
                            existential_vars: vec![v("y")],
                            conjuncts: vec![Atom::new("q", vec![cvar("y")])],
                        }],
                    },
                },
            ],
        }
    }

    fn conjecture_p_implies_r() -> NamedFormula {
        NamedFormula {
            name: "goal".into(),
            role: Role::Conjecture,
            formula: CoherentFormula {
                universal_vars: vec![v("A")],
                premises: vec![Atom::new("p", vec![cvar("A")])],
                conclusion: vec![Disjunct {
                    existential_vars: vec![],
                    conjuncts: vec![Atom::new("r", vec![cvar("A")])],
                }],
            },
        }
    }

    fn mp(axiom: &str, binding: &[(&str, &str)], premises: Vec<Atom>, derived: GroundClause) -> ProofStep {
        mp_with_witnesses(axiom, binding, premises, derived, vec![])
    }

    fn mp_with_witnesses(
        axiom: &str,
        binding: &[(&str, &str)],
        premises: Vec<Atom>,
        derived: GroundClause,
        witnesses: Vec<String>,
    ) -> ProofStep {
        ProofStep {
            kind: StepKind::ModusPonens {
                axiom: axiom.into(),
                binding: binding
                    .iter()
                    .map(|(k, w)| (k.to_string(), w.to_string()))
                    .collect(),
                premises,
                derived,
                witnesses,
            },
            indentation: 0,
        }
    }

    fn from_closing(facts: Vec<Atom>, indentation: u32) -> ProofClosing {
        ProofClosing {
            kind: ClosingKind::From {
                facts,
                disjunct_index: 0,
                witness_binding: Binding::new(),
            },
            outcome: Outcome::GoalReachedThesis,
            indentation,
        }
    }

    /// p(A) ⊢ r(A) via split on q(A) ∨ r(A).
    fn split_proof() -> ProofTree {
        let q_a = Atom::new("q", vec![c("A")]);
        let r_a = Atom::new("r", vec![c("A")]);
        let p_a = Atom::new("p", vec![c("A")]);
        let mut branch1 = ProofTree {
            steps: vec![mp(
                "q_to_r",
                &[("x", "A")],
                vec![q_a.clone()],
                vec![vec![r_a.clone()]],
            )],
            closing: from_closing(vec![r_a.clone()], 3),
            name: None,
        };
        branch1.steps[0].indentation = 3;
        let branch2 = ProofTree {
            steps: vec![],
            closing: from_closing(vec![r_a.clone()], 3),
            name: None,
        };
        ProofTree {
            steps: vec![mp(
                "split",
                &[("x", "A")],
                vec![p_a],
                vec![vec![q_a], vec![r_a]],
            )],
            closing: ProofClosing {
                kind: ClosingKind::CaseSplit {
                    disjunction: vec![
                        vec![Atom::new("q", vec![c("A")])],
                        vec![Atom::new("r", vec![c("A")])],
                    ],
                    branches: vec![branch1, branch2],
                },
                outcome: Outcome::GoalReachedThesis,
                indentation: 0,
            },
            name: None,
        }
    }

    #[test]
    fn valid_split_proof_checks() {
        let r = check_proof(&small_theory(), &conjecture_p_implies_r(), &split_proof());
        assert_eq!(r, CheckResult::Ok);
    }

    #[test]
    fn single_branch_split_rejected() {
        let mut t = split_proof();
        if let ClosingKind::CaseSplit { branches, disjunction } = &mut t.closing.kind {
            branches.truncate(1);
            disjunction.truncate(1);
        }
        let r = check_proof(&small_theory(), &conjecture_p_implies_r(), &t);
        assert!(matches!(r, CheckResult::Violation { rule, .. } if rule == "grammar"));
    }

    #[test]
    fn dropped_premise_rejected() {
        let mut t = split_proof();
        if let StepKind::ModusPonens { premises, .. } = &mut t.steps[0].kind {
            premises.clear();
        }
        let r = check_proof(&small_theory(), &conjecture_p_implies_r(), &t);
        assert!(matches!(r, CheckResult::Violation { rule, .. } if rule == "mp"));
    }

    #[test]
    fn stale_witness_rejected() {
        // wit introduces y; naming the witness "A" reuses an existing constant.
        let theory = small_theory();
        let conj = NamedFormula {
            name: "goal".into(),
            role: Role::Conjecture,
            formula: CoherentFormula {
                universal_vars: vec![v("A")],
                premises: vec![Atom::new("p", vec![cvar("A")])],
                conclusion: vec![Disjunct {
                    existential_vars: vec![v("y")],
                    conjuncts: vec![Atom::new("q", vec![cvar("y")])],
                }],
            },
        };
        let good = ProofTree {
            steps: vec![mp_with_witnesses(
                "wit",
                &[("x", "A")],
                vec![Atom::new("p", vec![c("A")])],
                vec![vec![Atom::new("q", vec![c("w1")])]],
                vec!["w1".into()],
            )],
            closing: ProofClosing {
                kind: ClosingKind::From {
                    facts: vec![Atom::new("q", vec![c("w1")])],
                    disjunct_index: 0,
                    witness_binding: [("y".to_string(), "w1".to_string())].into_iter().collect(),
                },
                outcome: Outcome::GoalReachedThesis,
                indentation: 0,
            },
            name: None,
        };
        assert_eq!(check_proof(&theory, &conj, &good), CheckResult::Ok);

        let mut bad = good.clone();
        if let StepKind::ModusPonens { witnesses, derived, .. } = &mut bad.steps[0].kind {
            witnesses[0] = "A".into();
            derived[0][0] = Atom::new("q", vec![c("A")]);
        }
        if let ClosingKind::From { facts, witness_binding, .. } = &mut bad.closing.kind {
            facts[0] = Atom::new("q", vec![c("A")]);
            witness_binding.insert("y".into(), "A".into());
        }
        let r = check_proof(&theory, &conj, &bad);
        assert!(matches!(r, CheckResult::Violation { rule, .. } if rule == "freshness"));
    }

    #[test]
    fn wrong_thesis_index_rejected() {
        let mut t = split_proof();
        fn bump(t: &mut ProofTree) {
            match &mut t.closing.kind {
                ClosingKind::From { disjunct_index, .. } => *disjunct_index += 1,
                ClosingKind::CaseSplit { branches, .. } => bump(&mut branches[0]),
                ClosingKind::Efq { .. } => {}
            }
        }
        bump(&mut t);
        let r = check_proof(&small_theory(), &conjecture_p_implies_r(), &t);
        assert!(matches!(r, CheckResult::Violation { rule, .. } if rule == "from"));
    }

    #[test]
    fn substitution_step_with_symmetry() {
        let theory = small_theory();
        // Conjecture: A ≠ C ⇒ C ≠ A, closed by one orientation step.
        let conj = NamedFormula {
            name: "sym".into(),
            role: Role::Conjecture,
            formula: CoherentFormula {
                universal_vars: vec![v("A"), v("C")],
                premises: vec![Atom::new("neq", vec![cvar("A"), cvar("C")])],
                conclusion: vec![Disjunct {
                    existential_vars: vec![],
                    conjuncts: vec![Atom::new("neq", vec![cvar("C"), cvar("A")])],
                }],
            },
        };
        let tree = ProofTree {
            steps: vec![ProofStep {
                kind: StepKind::EqualitySubstitution {
                    source: Atom::new("neq", vec![c("A"), c("C")]),
                    equations: vec![],
                    derived: Atom::new("neq", vec![c("C"), c("A")]),
                    display_order: vec![0],
                },
                indentation: 0,
            }],
            closing: from_closing(vec![Atom::new("neq", vec![c("C"), c("A")])], 0),
            name: None,
        };
        assert_eq!(check_proof(&theory, &conj, &tree), CheckResult::Ok);
    }

    #[test]
    fn substitution_requires_cited_equations() {
        let theory = small_theory();
        let conj = NamedFormula {
            name: "bad".into(),
            role: Role::Conjecture,
            formula: CoherentFormula {
                universal_vars: vec![v("A"), v("B")],
                premises: vec![Atom::new("p", vec![cvar("A")])],
                conclusion: vec![Disjunct {
                    existential_vars: vec![],
                    conjuncts: vec![Atom::new("p", vec![cvar("B")])],
                }],
            },
        };
        let tree = ProofTree {
            steps: vec![ProofStep {
                kind: StepKind::EqualitySubstitution {
                    source: Atom::new("p", vec![c("A")]),
                    equations: vec![],
                    derived: Atom::new("p", vec![c("B")]),
                    display_order: vec![0],
                },
                indentation: 0,
            }],
            closing: from_closing(vec![Atom::new("p", vec![c("B")])], 0),
            name: None,
        };
        let r = check_proof(&theory, &conj, &tree);
        assert!(matches!(r, CheckResult::Violation { rule, .. } if rule == "substitution"));
    }

    #[test]
    fn efq_accepts_eq_neq_pair_and_rejects_unrelated() {
        let theory = small_theory();
        let conj = NamedFormula {
            name: "contr".into(),
            role: Role::Conjecture,
            formula: CoherentFormula {
                universal_vars: vec![v("A"), v("B")],
                premises: vec![
                    Atom::new("eq", vec![cvar("A"), cvar("B")]),
                    Atom::new("neq", vec![cvar("A"), cvar("B")]),
                ],
                conclusion: vec![],
            },
        };
        let good = ProofTree {
            steps: vec![],
            closing: ProofClosing {
                kind: ClosingKind::Efq {
                    facts: vec![
                        Atom::new("neq", vec![c("A"), c("B")]),
                        Atom::new("eq", vec![c("A"), c("B")]),
                    ],
                },
                outcome: Outcome::GoalReachedContradiction,
                indentation: 0,
            },
            name: None,
        };
        assert_eq!(check_proof(&theory, &conj, &good), CheckResult::Ok);

        let mut bad = good;
        if let ClosingKind::Efq { facts } = &mut bad.closing.kind {
            facts.pop();
        }
        let r = check_proof(&theory, &conj, &bad);
        assert!(matches!(r, CheckResult::Violation { rule, .. } if rule == "efq"));
    }
}
