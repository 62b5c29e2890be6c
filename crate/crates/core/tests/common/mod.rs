//! Shared fixtures: the th_4_19 document (Tarski 4.19 with the seven facts
//! its book proof cites), encoded step by step after the published proof.

use clv_core::logic::{
    Atom, Binding, CoherentFormula, Disjunct, NamedFormula, PredicateSymbol, Role, Signature,
    Term, Theory, Variable,
};
use clv_core::proof::{
    ClosingKind, Outcome, ProofClosing, ProofStep, ProofTree, StepKind,
};
use clv_core::vernacular::{Chapter, ChapterItem, Frontpage, VernacularDocument};

pub fn var(n: &str) -> Variable {
    Variable {
        name: n.into(),
        sort: "point".into(),
    }
}

pub fn v(n: &str) -> Term {
    Term::Variable(n.into())
}

pub fn c(n: &str) -> Term {
    Term::Constant(n.into())
}

pub fn atom(p: &str, args: Vec<Term>) -> Atom {
    Atom::new(p, args)
}

fn single(conjunct: Atom) -> Disjunct {
    Disjunct {
        existential_vars: vec![],
        conjuncts: vec![conjunct],
    }
}

fn axiom(name: &str, vars: Vec<Variable>, premises: Vec<Atom>, conclusion: Vec<Disjunct>) -> NamedFormula {
    NamedFormula {
        name: name.into(),
        role: Role::Axiom,
        formula: CoherentFormula {
            universal_vars: vars,
            premises,
            conclusion,
        },
    }
}

pub fn tarski_signature() -> Signature {
    let p = |name: &str, arity: usize| PredicateSymbol {
        name: name.into(),
        arg_sorts: vec!["point".into(); arity],
        is_equality: false,
        negated_partner: None,
    };
    let mut sig = Signature {
        sorts: vec!["point".into()],
        predicates: vec![p("bet", 3), p("col", 3), p("cong", 4)],
        constants: vec![],
    };
    sig.ensure_equality("point");
    sig
}

pub fn th_4_19_theory() -> Theory {
    Theory {
        name: "tarski".into(),
        signature: tarski_signature(),
        axioms: vec![
            axiom(
                "th_3_1",
                vec![var("A"), var("B")],
                vec![],
                vec![single(atom("bet", vec![v("A"), v("B"), v("B")]))],
            ),
            axiom(
                "ax_4_10_3",
                vec![var("A"), var("B"), var("C")],
                vec![atom("bet", vec![v("A"), v("B"), v("C")])],
                vec![single(atom("col", vec![v("C"), v("A"), v("B")]))],
            ),
            axiom(
                "th_2_2",
                vec![var("A"), var("B"), var("C"), var("D")],
                vec![atom("cong", vec![v("A"), v("B"), v("C"), v("D")])],
                vec![single(atom("cong", vec![v("C"), v("D"), v("A"), v("B")]))],
            ),
            axiom(
                "ax_3",
                vec![var("A"), var("B"), var("C")],
                vec![atom("cong", vec![v("A"), v("B"), v("C"), v("C")])],
                vec![single(atom("eq", vec![v("A"), v("B")]))],
    ),
            axiom(
                "th_3_4",
                vec![var("A"), var("B"), var("C")],
                vec![
                    atom("bet", vec![v("A"), v("B"), v("C")]),
                    atom("bet", vec![v("B"), v("A"), v("C")]),
                ],
                vec![single(atom("eq", vec![v("A"), v("B")]))],
            ),
            axiom(
                "th_4_18",
                vec![var("A"), var("B"), var("C"), var("D")],
                vec![
                    atom("neq", vec![v("A"), v("B")]),
                    atom("col", vec![v("A"), v("B"), v("C")]),
                    atom("cong", vec![v("A"), v("C"), v("A"), v("D")]),
                    atom("cong", vec![v("B"), v("C"), v("B"), v("D")]),
                ],
                vec![single(atom("eq", vec![v("C"), v("D")]))],
            ),
            axiom(
                "ax_g1",
                vec![var("A"), var("B")],
                vec![],
                vec![
                    single(atom("eq", vec![v("A"), v("B")])),
                    single(atom("neq", vec![v("A"), v("B")])),
                ],
            ),
        ],
    }
}

pub fn th_4_19_conjecture() -> NamedFormula {
    NamedFormula {
        name: "th_4_19".into(),
        role: Role::Theorem,
        formula: CoherentFormula {
            universal_vars: vec![var("A"), var("B"), var("C"), var("D")],
            premises: vec![
                atom("bet", vec![v("A"), v("B"), v("C")]),
                atom("cong", vec![v("A"), v("B"), v("A"), v("D")]),
                atom("cong", vec![v("C"), v("B"), v("C"), v("D")]),
            ],
            conclusion: vec![single(atom("eq", vec![v("B"), v("D")]))],
        },
    }
}

fn binding(pairs: &[(&str, &str)]) -> Binding {
    pairs
        .iter()
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .collect()
}

fn mp(
    ind: u32,
    ax: &str,
    bind: &[(&str, &str)],
    premises: Vec<Atom>,
    derived: Vec<Vec<Atom>>,
) -> ProofStep {
    ProofStep {
        kind: StepKind::ModusPonens {
            axiom: ax.into(),
            binding: binding(bind),
            premises,
            derived,
            witnesses: vec![],
        },
        indentation: ind,
    }
}

fn subst(ind: u32, source: Atom, equations: Vec<Atom>, derived: Atom, display: Vec<usize>) -> ProofStep {
    ProofStep {
        kind: StepKind::EqualitySubstitution {
            source,
            equations,
            derived,
            display_order: display,
        },
        indentation: ind,
    }
}

fn from_closing(ind: u32, facts: Vec<Atom>) -> ProofClosing {
    ProofClosing {
        kind: ClosingKind::From {
            facts,
            disjunct_index: 0,
            witness_binding: Binding::new(),
        },
        outcome: Outcome::GoalReachedThesis,
        indentation: ind,
    }
}

/// The published proof of th_4_19, as a proof object: a split on A = B with
/// a nested split on A = C inside the unequal branch.
pub fn th_4_19_proof() -> ProofTree {
    let eq = |x: &str, y: &str| atom("eq", vec![c(x), c(y)]);
    let neq = |x: &str, y: &str| atom("neq", vec![c(x), c(y)]);
    let bet = |x: &str, y: &str, z: &str| atom("bet", vec![c(x), c(y), c(z)]);
    let col = |x: &str, y: &str, z: &str| atom("col", vec![c(x), c(y), c(z)]);
    let cong =
        |x: &str, y: &str, z: &str, w: &str| atom("cong", vec![c(x), c(y), c(z), c(w)]);

    let branch_a_eq_b = ProofTree {
        steps: vec![
            subst(3, cong("A", "D", "A", "B"), vec![eq("A", "B")], cong("A", "D", "A", "A"), vec![0, 1]),
            mp(3, "ax_3", &[("A", "A"), ("B", "D"), ("C", "A")], vec![cong("A", "D", "A", "A")], vec![vec![eq("A", "D")]]),
            subst(3, eq("A", "D"), vec![eq("A", "B")], eq("B", "D"), vec![1, 0]),
        ],
        closing: from_closing(3, vec![eq("B", "D")]),
        name: None,
    };

    let branch_a_eq_c = ProofTree {
        steps: vec![
            subst(6, bet("A", "B", "C"), vec![eq("A", "C")], bet("A", "B", "A"), vec![0, 1]),
            mp(6, "th_3_4", &[("A", "A"), ("B", "B"), ("C", "A")],
               vec![bet("A", "B", "A"), bet("B", "A", "A")], vec![vec![eq("A", "B")]]),
        ],
        closing: ProofClosing {
            kind: ClosingKind::Efq {
                facts: vec![neq("A", "B"), eq("A", "B")],
            },
            outcome: Outcome::GoalReachedContradiction,
            indentation: 6,
        },
        name: None,
    };

    let branch_a_neq_c = ProofTree {
        steps: vec![
            subst(6, neq("A", "C"), vec![], neq("C", "A"), vec![0]),
            mp(6, "th_4_18", &[("A", "C"), ("B", "A"), ("C", "B"), ("D", "D")],
               vec![neq("C", "A"), col("C", "A", "B"), cong("C", "B", "C", "D"), cong("A", "B", "A", "D")],
               vec![vec![eq("B", "D")]]),
        ],
        closing: from_closing(6, vec![eq("B", "D")]),
        name: None,
    };

    let branch_a_neq_b = ProofTree {
        steps: vec![mp(3, "ax_g1", &[("A", "A"), ("B", "C")], vec![],
                       vec![vec![eq("A", "C")], vec![neq("A", "C")]])],
        closing: ProofClosing {
            kind: ClosingKind::CaseSplit {
                disjunction: vec![vec![eq("A", "C")], vec![neq("A", "C")]],
                branches: vec![branch_a_eq_c, branch_a_neq_c],
            },
            outcome: Outcome::GoalReachedThesis,
            indentation: 3,
        },
        name: None,
    };

    ProofTree {
        steps: vec![
            mp(0, "th_3_1", &[("A", "B"), ("B", "A")], vec![], vec![vec![bet("B", "A", "A")]]),
            mp(0, "ax_4_10_3", &[("A", "A"), ("B", "B"), ("C", "C")],
               vec![bet("A", "B", "C")], vec![vec![col("C", "A", "B")]]),
            mp(0, "th_2_2", &[("A", "A"), ("B", "B"), ("C", "A"), ("D", "D")],
               vec![cong("A", "B", "A", "D")], vec![vec![cong("A", "D", "A", "B")]]),
            mp(0, "ax_g1", &[("A", "A"), ("B", "B")], vec![],
               vec![vec![eq("A", "B")], vec![neq("A", "B")]]),
        ],
        closing: ProofClosing {
            kind: ClosingKind::CaseSplit {
                disjunction: vec![vec![eq("A", "B")], vec![neq("A", "B")]],
                branches: vec![branch_a_eq_b, branch_a_neq_b],
            },
            outcome: Outcome::GoalReachedThesis,
            indentation: 0,
        },
        name: None,
    }
}

pub fn golden_document() -> VernacularDocument {
    VernacularDocument {
        frontpage: Frontpage {
            author: "clv".into(),
            prover: "clv 0.1.0".into(),
            date: "2024-01-01".into(),
        },
        theory: th_4_19_theory(),
        chapters: vec![Chapter {
            name: "th_4_19".into(),
            items: vec![ChapterItem {
                formula: th_4_19_conjecture(),
                proofs: vec![th_4_19_proof()],
            }],
        }],
    }
}

/// Lines with whitespace runs collapsed, empties dropped: the comparison
/// the golden tests use ("modulo whitespace").
pub fn normalize(text: &str) -> Vec<String> {
    text.lines()
        .map(|l| l.split_whitespace().collect::<Vec<_>>().join(" "))
        .filter(|l| !l.is_empty())
        .collect()
}
