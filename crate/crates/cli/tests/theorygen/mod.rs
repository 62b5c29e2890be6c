//! Seeded problem generators plus the brute-force ground-saturation oracle
//! the prover is compared against.

use std::collections::BTreeSet;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use clv_core::logic::{Atom, Binding, NamedFormula, Theory};

struct Gen {
    rng: StdRng,
    preds: Vec<(String, usize)>,
    consts: Vec<String>,
}

impl Gen {
    fn new(seed: u64) -> Gen {
        let mut rng = StdRng::seed_from_u64(seed);
        let n_preds = rng.gen_range(2..=4);
        let preds = (0..n_preds)
            .map(|i| (format!("p{i}"), rng.gen_range(1..=3)))
            .collect();
        let n_consts = rng.gen_range(2..=6);
        let consts = (0..n_consts).map(|i| format!("c{i}")).collect();
        Gen { rng, preds, consts }
    }

    fn constant(&mut self) -> String {
        self.consts[self.rng.gen_range(0..self.consts.len())].clone()
    }

    fn atom_text(&mut self, vars: &[String], var_chance: f64) -> String {
        let (p, arity) = self.preds[self.rng.gen_range(0..self.preds.len())].clone();
        let args: Vec<String> = (0..arity)
            .map(|_| {
                if !vars.is_empty() && self.rng.gen_bool(var_chance) {
                    vars[self.rng.gen_range(0..vars.len())].clone()
                } else {
                    self.constant()
                }
            })
            .collect();
        format!("{p}({})", args.join(","))
    }

    fn ground_atom_text(&mut self) -> String {
        self.atom_text(&[], 0.0)
    }
}

/// A theory with no existentials, no disjunctions and no equality, plus one
/// ground conjecture: the class where saturation is a decision procedure.
pub fn datalog_problem(seed: u64) -> String {
    let mut g = Gen::new(0xda7a_0000 + seed);
    let mut out = String::new();
    let n_axioms = g.rng.gen_range(1..=8);
    for i in 0..n_axioms {
        let n_vars = g.rng.gen_range(0..=3);
        let vars: Vec<String> = (0..n_vars).map(|v| format!("X{v}")).collect();
        let n_prem = g.rng.gen_range(0..=3);
        let premises: Vec<String> = (0..n_prem).map(|_| g.atom_text(&vars, 0.6)).collect();
        let n_concl = g.rng.gen_range(1..=2);
        let conclusion: Vec<String> = (0..n_concl).map(|_| g.atom_text(&vars, 0.6)).collect();
        let body = if premises.is_empty() {
            conclusion.join(" & ")
        } else {
            format!("{} => ({})", premises.join(" & "), conclusion.join(" & "))
        };
        // Quantify only the variables that actually occur.
        let used: Vec<&String> = vars
            .iter()
            .filter(|v| premises.iter().chain(&conclusion).any(|a| a.contains(*v)))
            .collect();
        if used.is_empty() {
            out.push_str(&format!("fof(a{i}, axiom, {body}).\n"));
        } else {
            let q: Vec<&str> = used.iter().map(|s| s.as_str()).collect();
            out.push_str(&format!("fof(a{i}, axiom, ![{}]: ({body})).\n", q.join(",")));
        }
    }
    let n_prem = g.rng.gen_range(0..=2);
    let premises: Vec<String> = (0..n_prem).map(|_| g.ground_atom_text()).collect();
    let goal = g.ground_atom_text();
    if premises.is_empty() {
        out.push_str(&format!("fof(goal, conjecture, {goal}).\n"));
    } else {
        out.push_str(&format!(
            "fof(goal, conjecture, {} => {goal}).\n",
            premises.join(" & ")
        ));
    }
    out
}

/// A theory that also uses disjunctive conclusions, existentials, equality
/// and negated premises.
pub fn coherent_problem(seed: u64) -> String {
    let mut g = Gen::new(0xc0_0000 + seed);
    let mut out = String::new();
    let n_axioms = g.rng.gen_range(1..=6);
    for i in 0..n_axioms {
        let n_vars = g.rng.gen_range(0..=2);
        let vars: Vec<String> = (0..n_vars).map(|v| format!("X{v}")).collect();
        let n_prem = g.rng.gen_range(0..=2);
        let mut premises: Vec<String> = (0..n_prem).map(|_| g.atom_text(&vars, 0.6)).collect();
        if !vars.is_empty() && g.rng.gen_bool(0.2) {
            premises.push(format!("{} != {}", vars[0], g.constant()));
        }
        let n_disj = g.rng.gen_range(1..=2);
        let mut ex_counter = 0;
        let disjuncts: Vec<String> = (0..n_disj)
            .map(|_| {
                if g.rng.gen_bool(0.3) {
                    let y = format!("Y{ex_counter}");
                    ex_counter += 1;
                    let mut scope = vars.clone();
                    scope.push(y.clone());
                    // Make sure the bound variable occurs.
                    let (p, arity) =
                        g.preds[g.rng.gen_range(0..g.preds.len())].clone();
                    let mut args = vec![y.clone()];
                    for _ in 1..arity {
                        args.push(if g.rng.gen_bool(0.5) && !vars.is_empty() {
                            vars[g.rng.gen_range(0..vars.len())].clone()
                        } else {
                            g.constant()
                        });
                    }
                    format!("?[{y}]: ({p}({}))", args.join(","))
                } else if g.rng.gen_bool(0.25) {
                    let lhs = if vars.is_empty() {
                        g.constant()
                    } else {
                        vars[g.rng.gen_range(0..vars.len())].clone()
                    };
                    format!("{lhs} = {}", g.constant())
                } else {
                    g.atom_text(&vars, 0.6)
                }
            })
            .collect();
        let concl = disjuncts.join(" | ");
        let body = if premises.is_empty() {
            format!("({concl})")
        } else {
            format!("{} => ({concl})", premises.join(" & "))
        };
        let all = format!("{} {}", premises.join(" "), concl);
        let used: Vec<&String> = vars.iter().filter(|v| all.contains(*v)).collect();
        if used.is_empty() {
            out.push_str(&format!("fof(a{i}, axiom, {body}).\n"));
        } else {
            let q: Vec<&str> = used.iter().map(|s| s.as_str()).collect();
            out.push_str(&format!("fof(a{i}, axiom, ![{}]: ({body})).\n", q.join(",")));
        }
    }
    let n_prem = g.rng.gen_range(1..=2);
    let premises: Vec<String> = (0..n_prem).map(|_| g.ground_atom_text()).collect();
    let goal = if g.rng.gen_bool(0.2) {
        format!("{} = {}", g.constant(), g.constant())
    } else {
        g.ground_atom_text()
    };
    out.push_str(&format!(
        "fof(goal, conjecture, {} => {goal}).\n",
        premises.join(" & ")
    ));
    out
}

/// Brute-force oracle: instantiate every axiom over every constant tuple to
/// a fixpoint and test the conjecture's conclusion. Only sound for theories
/// with single-disjunct, existential-free conclusions and no equality.
pub fn oracle_provable(theory: &Theory, conjecture: &NamedFormula) -> bool {
    let consts: Vec<String> = theory
        .signature
        .constants
        .iter()
        .map(|c| c.name.clone())
        .collect();
    let ground = |a: &Atom, b: &Binding| -> Atom {
        clv_core::logic::substitute_atom(a, b).expect("oracle instantiation")
    };

    let mut facts: BTreeSet<Atom> = conjecture
        .formula
        .premises
        .iter()
        .cloned()
        .collect();
    loop {
        let mut added = false;
        for ax in &theory.axioms {
            let f = &ax.formula;
            assert!(f.conclusion.len() <= 1, "oracle: disjunction-free only");
            let vars: Vec<&str> = f.universal_vars.iter().map(|v| v.name.as_str()).collect();
            let mut bindings: Vec<Binding> = vec![Binding::new()];
            for v in &vars {
                let mut next = Vec::new();
                for b in &bindings {
                    for c in &consts {
                        let mut b2 = b.clone();
                        b2.insert(v.to_string(), c.clone());
                        next.push(b2);
                    }
                }
                bindings = next;
            }
            for b in &bindings {
                if f.premises.iter().all(|p| facts.contains(&ground(p, b))) {
                    if let Some(d) = f.conclusion.first() {
                        assert!(d.existential_vars.is_empty(), "oracle: existential-free only");
                        for conj in &d.conjuncts {
                            if facts.insert(ground(conj, b)) {
                                added = true;
                            }
                        }
                    }
                }
            }
        }
        if !added {
            break;
        }
    }
    let goal = &conjecture.formula.conclusion;
    assert_eq!(goal.len(), 1, "oracle conjecture shape");
    let empty = Binding::new();
    goal[0]
        .conjuncts
        .iter()
        .all(|a| facts.contains(&ground(a, &empty)))
}
