//! Seeded generator of structurally valid (not logically checked) proof
//! documents for the serialization round-trip tests.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use clv_core::logic::{
    Atom, Binding, CoherentFormula, Constant, Disjunct, NamedFormula, Role, Signature, Term,
    Theory, Variable,
};
use clv_core::proof::{
    ClosingKind, Outcome, ProofClosing, ProofStep, ProofTree, StepKind,
};
use clv_core::vernacular::{Chapter, ChapterItem, Frontpage, VernacularDocument};

struct Gen {
    rng: StdRng,
    preds: Vec<(String, usize)>,
    consts: Vec<String>,
    witness_counter: usize,
}

impl Gen {
    fn pred(&mut self) -> (String, usize) {
        let i = self.rng.gen_range(0..self.preds.len());
        self.preds[i].clone()
    }

    fn constant(&mut self) -> String {
        let i = self.rng.gen_range(0..self.consts.len());
        self.consts[i].clone()
    }

    fn ground_atom(&mut self) -> Atom {
        let (p, arity) = self.pred();
        let args = (0..arity).map(|_| Term::Constant(self.constant())).collect();
        Atom::new(p, args)
    }

    fn ground_eq(&mut self) -> Atom {
        Atom::new(
            "eq",
            vec![
                Term::Constant(self.constant()),
                Term::Constant(self.constant()),
            ],
        )
    }

    fn formula(&mut self) -> CoherentFormula {
        let n_vars = self.rng.gen_range(0..=2);
        let vars: Vec<Variable> = (0..n_vars)
            .map(|i| Variable {
                name: format!("X{i}"),
                sort: "point".into(),
            })
            .collect();
        let term = |g: &mut Gen, scope: &[Variable]| -> Term {
            if !scope.is_empty() && g.rng.gen_bool(0.5) {
                Term::Variable(scope[g.rng.gen_range(0..scope.len())].name.clone())
            } else {
                Term::Constant(g.constant())
            }
        };
        let atom_over = |g: &mut Gen, scope: &[Variable]| -> Atom {
            let (p, arity) = g.pred();
            let args = (0..arity).map(|_| term(g, scope)).collect();
            Atom::new(p, args)
        };
        let n_prem = self.rng.gen_range(0..=2);
        let premises: Vec<Atom> = (0..n_prem).map(|_| atom_over(self, &vars)).collect();
        let n_disj = self.rng.gen_range(0..=2);
        let mut ex_counter = 0;
        let conclusion: Vec<Disjunct> = (0..n_disj)
            .map(|_| {
                let n_conj = self.rng.gen_range(1..=2);
                let mut conjuncts: Vec<Atom> =
                    (0..n_conj).map(|_| atom_over(self, &vars)).collect();
                // Optionally bind one argument position existentially.
                let mut existential_vars = Vec::new();
                if self.rng.gen_bool(0.3) {
                    if let Some(a) = conjuncts.iter_mut().find(|a| !a.args.is_empty()) {
                        let y = Variable {
                            name: format!("Y{ex_counter}"),
                            sort: "point".into(),
                        };
                        ex_counter += 1;
                        a.args[0] = Term::Variable(y.name.clone());
                        existential_vars.push(y);
                    }
                }
                Disjunct {
                    existential_vars,
                    conjuncts,
                }
            })
            .collect();
        // Universal variables that ended up unused are fine; unused
        // existential binders are not representable, handled above.
        CoherentFormula {
            universal_vars: vars,
            premises,
            conclusion,
        }
    }

    fn tree(&mut self, axioms: &[NamedFormula], depth: u32) -> ProofTree {
        let n_steps = self.rng.gen_range(0..=2);
        let steps = (0..n_steps)
            .map(|_| {
                if self.rng.gen_bool(0.5) && !axioms.is_empty() {
                    let ax = &axioms[self.rng.gen_range(0..axioms.len())];
                    let mut binding = Binding::new();
                    for v in &ax.formula.universal_vars {
                        binding.insert(v.name.clone(), self.constant());
                    }
                    let witnesses = if self.rng.gen_bool(0.3) {
                        self.witness_counter += 1;
                        vec![format!("w{}", self.witness_counter)]
                    } else {
                        vec![]
                    };
                    let n_prem = self.rng.gen_range(0..=2);
                    let n_disj = self.rng.gen_range(1..=2);
                    StepKind::ModusPonens {
                        axiom: ax.name.clone(),
                        binding,
                        premises: (0..n_prem).map(|_| self.ground_atom()).collect(),
                        derived: (0..n_disj)
                            .map(|_| {
                                let n = self.rng.gen_range(1..=2);
                                (0..n).map(|_| self.ground_atom()).collect()
                            })
                            .collect(),
                        witnesses,
                    }
                } else {
                    let n_eq = self.rng.gen_range(0..=1);
                    let equations: Vec<Atom> = (0..n_eq).map(|_| self.ground_eq()).collect();
                    let display_order = if equations.is_empty() {
                        vec![0]
                    } else if self.rng.gen_bool(0.5) {
                        vec![0, 1]
                    } else {
                        vec![1, 0]
                    };
                    StepKind::EqualitySubstitution {
                        source: self.ground_atom(),
                        equations,
                        derived: self.ground_atom(),
                        display_order,
                    }
                }
            })
            .map(|kind| ProofStep { kind, indentation: 0 })
            .collect();

        let closing = match self.rng.gen_range(0..if depth == 0 { 3 } else { 2 }) {
            0 => ClosingKind::From {
                facts: (0..self.rng.gen_range(0..=2)).map(|_| self.ground_atom()).collect(),
                disjunct_index: self.rng.gen_range(0..=1),
                witness_binding: if self.rng.gen_bool(0.3) {
                    let mut b = Binding::new();
                    b.insert("Y0".into(), self.constant());
                    b
                } else {
                    Binding::new()
                },
            },
            1 => ClosingKind::Efq {
                facts: (0..self.rng.gen_range(1..=2)).map(|_| self.ground_atom()).collect(),
            },
            _ => {
                let n = self.rng.gen_range(2..=3);
                ClosingKind::CaseSplit {
                    disjunction: (0..n)
                        .map(|_| {
                            let k = self.rng.gen_range(1..=2);
                            (0..k).map(|_| self.ground_atom()).collect()
                        })
                        .collect(),
                    branches: (0..n).map(|_| self.tree(axioms, depth + 1)).collect(),
                }
            }
        };
        let outcome = if closing_kind_tag(&closing) == 1 {
            Outcome::GoalReachedContradiction
        } else {
            Outcome::GoalReachedThesis
        };
        ProofTree {
            steps,
            closing: ProofClosing {
                kind: closing,
                outcome,
                indentation: 0,
            },
            name: if self.rng.gen_bool(0.2) {
                Some("alternative".into())
            } else {
                None
            },
        }
    }
}

fn closing_kind_tag(c: &ClosingKind) -> u8 {
    match c {
        ClosingKind::From { .. } => 0,
        ClosingKind::Efq { .. } => 1,
        ClosingKind::CaseSplit { .. } => 2,
    }
}

pub fn random_document(seed: u64) -> VernacularDocument {
    let mut rng = StdRng::seed_from_u64(0x5eed_0000 + seed);
    let n_preds = rng.gen_range(2..=4);
    let preds: Vec<(String, usize)> = (0..n_preds)
        .map(|i| (format!("p{i}"), rng.gen_range(0..=3)))
        .collect();
    let n_consts = rng.gen_range(2..=4);
    let consts: Vec<String> = (0..n_consts).map(|i| format!("c{i}")).collect();

    let mut sig = Signature {
        sorts: vec!["point".into()],
        predicates: preds
            .iter()
            .map(|(n, k)| clv_core::logic::PredicateSymbol {
                name: n.clone(),
                arg_sorts: vec!["point".into(); *k],
                is_equality: false,
                negated_partner: None,
            })
            .collect(),
        constants: consts
            .iter()
            .map(|n| Constant {
                name: n.clone(),
                sort: "point".into(),
            })
            .collect(),
    };
    sig.ensure_equality("point");

    let mut g = Gen {
        rng,
        preds,
        consts,
        witness_counter: 0,
    };
    let n_axioms = g.rng.gen_range(1..=3);
    let axioms: Vec<NamedFormula> = (0..n_axioms)
        .map(|i| NamedFormula {
            name: format!("a{i}"),
            role: if g.rng.gen_bool(0.2) { Role::Definition } else { Role::Axiom },
            formula: g.formula(),
        })
        .collect();
    let theory = Theory {
        name: "random".into(),
        signature: sig,
        axioms: axioms.clone(),
    };

    let n_chapters = g.rng.gen_range(1..=2);
    let mut item_counter = 0;
    let chapters = (0..n_chapters)
        .map(|i| {
            let n_items = g.rng.gen_range(0..=2);
            Chapter {
                name: format!("ch{i}"),
                items: (0..n_items)
                    .map(|_| {
                        item_counter += 1;
                        let with_proof = g.rng.gen_bool(0.7);
                        let proofs = if with_proof {
                            let mut t = g.tree(&axioms, 0);
                            t.renumber_indentation(0);
                            vec![t]
                        } else {
                            vec![]
                        };
                        ChapterItem {
                            formula: NamedFormula {
                                name: format!("t{item_counter}"),
                                role: if proofs.is_empty() {
                                    Role::Conjecture
                                } else {
                                    Role::Theorem
                                },
                                formula: g.formula(),
                            },
                            proofs,
                        }
                    })
                    .collect(),
            }
        })
        .collect();

    VernacularDocument {
        frontpage: Frontpage {
            author: "generator".into(),
            prover: format!("clv seed {seed}"),
            date: "2024-01-01".into(),
        },
        theory,
        chapters,
    }
}
