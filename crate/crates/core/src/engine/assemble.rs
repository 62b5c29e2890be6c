//! Turns a closed search trace into a proof tree the independent checker
//! accepts. The trace is pruned backwards from each closing: only facts
//! transitively needed remain as steps, in derivation order. Where a step
//! cites a fact whose context literal differs from the form the step needs
//! (equality orientation, or arguments rewritten by merges), an explicit
//! equality-substitution step is materialized from the union-find's proof
//! forest.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use crate::logic::{Atom, Binding, Term};
use crate::proof::{
    ClosingKind, Outcome, ProofClosing, ProofStep, ProofTree, StepKind,
};

use super::{
    BottomInfo, Compiled, GAtom, GoalDisjunct, Just, LitSource, Node, NodeClosing, PremRef, State,
};

#[derive(Debug, Clone)]
struct SubstPlan {
    source: usize,
    equations: Vec<usize>,
    derived: GAtom,
}

pub(super) fn assemble(root: &Node, comp: &Compiled, goal: &[GoalDisjunct]) -> ProofTree {
    let _ = goal;
    let (tree, _, _) = build(root, comp);
    tree
}

fn build(node: &Node, comp: &Compiled) -> (ProofTree, BTreeSet<usize>, BTreeSet<usize>) {
    let st = &node.state;

    let mut needed_facts: BTreeSet<usize> = BTreeSet::new();
    let mut up_facts: BTreeSet<usize> = BTreeSet::new();
    let mut needed_disjs: BTreeSet<usize> = BTreeSet::new();
    let mut up_disjs: BTreeSet<usize> = BTreeSet::new();
    let mut deriv_plans: BTreeMap<usize, Vec<SubstPlan>> = BTreeMap::new();
    let mut rewrite_plans: BTreeMap<usize, Option<SubstPlan>> = BTreeMap::new();
    let mut closing_plans: Vec<SubstPlan> = Vec::new();
    let mut worklist: Vec<usize> = Vec::new();
    let mut disj_worklist: Vec<usize> = Vec::new();

    // Children first: their unresolved needs route into this scope.
    let mut child_trees: Vec<ProofTree> = Vec::new();
    for child in &node.children {
        let (tree, cf, cd) = build(child, comp);
        child_trees.push(tree);
        worklist.extend(cf);
        disj_worklist.extend(cd);
    }

    // Closing requirements.
    let closing_kind: ClosingKind;
    let outcome: Outcome;
    match &node.closing {
        NodeClosing::From(info) => {
            let mut facts = Vec::new();
            for (lit, src) in info.literals.iter().zip(&info.sources) {
                facts.push(to_atom(st, comp, lit));
                match src {
                    LitSource::Fact(fid) => {
                        let (plan, deps) = resolve_cite(st, comp, *fid, lit);
                        worklist.extend(deps);
                        if let Some(p) = plan {
                            closing_plans.push(p);
                        }
                    }
                    LitSource::EqByUf => {
                        if let Some((plan, deps)) = cite_equality(st, lit) {
                            worklist.extend(deps);
                            if let Some(p) = plan {
                                closing_plans.push(p);
                            }
                        }
                    }
                }
            }
            closing_kind = ClosingKind::From {
                facts,
                disjunct_index: info.disjunct_index,
                witness_binding: info
                    .witness_binding
                    .iter()
                    .map(|(n, c)| (n.clone(), st.consts[*c].0.clone()))
                    .collect(),
            };
            outcome = Outcome::GoalReachedThesis;
        }
        NodeClosing::Efq(BottomInfo::Mp { deriv }) => {
            let d = &st.derivs[*deriv];
            let mut facts = Vec::new();
            for (premref, lit) in d.premises.iter().zip(&d.premise_literals) {
                facts.push(to_atom(st, comp, lit));
                if let PremRef::Fact(fid) = premref {
                    let (plan, deps) = resolve_cite(st, comp, *fid, lit);
                    worklist.extend(deps);
                    if let Some(p) = plan {
                        closing_plans.push(p);
                    }
                }
            }
            closing_kind = ClosingKind::Efq { facts };
            outcome = Outcome::GoalReachedContradiction;
        }
        NodeClosing::Efq(BottomInfo::Neq { neq_fact }) => {
            let lit = st.facts[*neq_fact].literal.clone();
            worklist.push(*neq_fact);
            let mut facts = vec![to_atom(st, comp, &lit)];
            if lit.args[0] != lit.args[1] {
                let eq_pred = comp.partner[lit.pred].expect("disequality has a partner");
                let eq_lit = GAtom {
                    pred: eq_pred,
                    args: lit.args.clone(),
                };
                facts.push(to_atom(st, comp, &eq_lit));
                if let Some((plan, deps)) = cite_equality(st, &eq_lit) {
                    worklist.extend(deps);
                    if let Some(p) = plan {
                        closing_plans.push(p);
                    }
                }
            }
            closing_kind = ClosingKind::Efq { facts };
            outcome = Outcome::GoalReachedContradiction;
        }
        NodeClosing::Split { disj } => {
            disj_worklist.push(*disj);
            let d = &st.derivs[st.disjs[*disj].deriv];
            closing_kind = ClosingKind::CaseSplit {
                disjunction: d
                    .derived
                    .iter()
                    .map(|conjs| conjs.iter().map(|l| to_atom(st, comp, l)).collect())
                    .collect(),
                branches: child_trees,
            };
            child_trees = Vec::new();
            outcome = Outcome::GoalReachedThesis;
        }
    }
    debug_assert!(child_trees.is_empty(), "children belong to a split closing");

    // Transitive need-marking over this node's own events.
    let plan_deriv = |st: &State,
                          comp: &Compiled,
                          deriv: usize,
                          deriv_plans: &mut BTreeMap<usize, Vec<SubstPlan>>,
                          worklist: &mut Vec<usize>| {
        if deriv_plans.contains_key(&deriv) {
            return;
        }
        let mut plans = Vec::new();
        let d = &st.derivs[deriv];
        for (premref, lit) in d.premises.iter().zip(&d.premise_literals) {
            if let PremRef::Fact(fid) = premref {
                let (plan, deps) = resolve_cite(st, comp, *fid, lit);
                worklist.extend(deps);
                if let Some(p) = plan {
                    plans.push(p);
                }
            }
        }
        deriv_plans.insert(deriv, plans);
    };

    loop {
        if let Some(id) = worklist.pop() {
            if id < node.base_facts {
                up_facts.insert(id);
                continue;
            }
            if !needed_facts.insert(id) {
                continue;
            }
            match &st.facts[id].just {
                Just::Initial | Just::Assumption => {}
                Just::Mp { deriv } => {
                    plan_deriv(st, comp, *deriv, &mut deriv_plans, &mut worklist);
                }
                Just::Rewrite { source } => {
                    let (plan, deps) = resolve_cite(st, comp, *source, &st.facts[id].literal);
                    worklist.extend(deps);
                    rewrite_plans.insert(id, plan);
                }
            }
            continue;
        }
        if let Some(d) = disj_worklist.pop() {
            if d < node.base_disjs {
                up_disjs.insert(d);
                continue;
            }
            if !needed_disjs.insert(d) {
                continue;
            }
            plan_deriv(st, comp, st.disjs[d].deriv, &mut deriv_plans, &mut worklist);
            continue;
        }
        break;
    }

    // Emission in derivation order.
    let mut steps: Vec<ProofStep> = Vec::new();
    let mut emitted_derivs: BTreeSet<usize> = BTreeSet::new();
    let mut materialized: HashSet<GAtom> = HashSet::new();
    let emit_plans = |plans: &[SubstPlan],
                          steps: &mut Vec<ProofStep>,
                          materialized: &mut HashSet<GAtom>| {
        for p in plans {
            if !materialized.insert(p.derived.clone()) {
                continue;
            }
            steps.push(subst_step(st, comp, p));
        }
    };

    for ev in &st.events[node.base_events..] {
        match *ev {
            super::Ev::Fact(id) => {
                if !needed_facts.contains(&id) {
                    continue;
                }
                match &st.facts[id].just {
                    Just::Initial | Just::Assumption => {}
                    Just::Mp { deriv } => {
                        if emitted_derivs.insert(*deriv) {
                            if let Some(plans) = deriv_plans.get(deriv) {
                                emit_plans(plans, &mut steps, &mut materialized);
                            }
                            steps.push(mp_step(st, comp, *deriv));
                        }
                    }
                    Just::Rewrite { .. } => {
                        if let Some(plan) = rewrite_plans.get(&id).and_then(|p| p.as_ref()) {
                            if materialized.insert(plan.derived.clone()) {
                                steps.push(subst_step(st, comp, plan));
                            }
                        }
                    }
                }
            }
            super::Ev::Disj(d) => {
                if !needed_disjs.contains(&d) {
                    continue;
                }
                let deriv = st.disjs[d].deriv;
                if emitted_derivs.insert(deriv) {
                    if let Some(plans) = deriv_plans.get(&deriv) {
                        emit_plans(plans, &mut steps, &mut materialized);
                    }
                    steps.push(mp_step(st, comp, deriv));
                }
            }
        }
    }
    emit_plans(&closing_plans, &mut steps, &mut materialized);

    let tree = ProofTree {
        steps,
        closing: ProofClosing {
            kind: closing_kind,
            outcome,
            indentation: 0,
        },
        name: None,
    };
    (tree, up_facts, up_disjs)
}

fn to_atom(st: &State, comp: &Compiled, g: &GAtom) -> Atom {
    Atom {
        predicate: comp.pred_names[g.pred].clone(),
        args: g
            .args
            .iter()
            .map(|&c| Term::Constant(st.consts[c].0.clone()))
            .collect(),
        negated: false,
    }
}

fn mp_step(st: &State, comp: &Compiled, deriv: usize) -> ProofStep {
    let d = &st.derivs[deriv];
    let axiom = &comp.axioms[d.axiom];
    let mut binding = Binding::new();
    for ((name, _), &c) in axiom.vars.iter().zip(&d.binding) {
        binding.insert(name.clone(), st.consts[c].0.clone());
    }
    ProofStep {
        kind: StepKind::ModusPonens {
            axiom: comp.theory.axioms[axiom.source].name.clone(),
            binding,
            premises: d.premise_literals.iter().map(|l| to_atom(st, comp, l)).collect(),
            derived: d
                .derived
                .iter()
                .map(|conjs| conjs.iter().map(|l| to_atom(st, comp, l)).collect())
                .collect(),
            witnesses: d.witnesses.iter().map(|&c| st.consts[c].0.clone()).collect(),
        },
        indentation: 0,
    }
}

fn subst_step(st: &State, comp: &Compiled, plan: &SubstPlan) -> ProofStep {
    // Facts print in derivation order; remember where the source sits.
    let mut order: Vec<(usize, usize)> = Vec::new();
    order.push((plan.source, 0));
    for (i, &e) in plan.equations.iter().enumerate() {
        order.push((e, i + 1));
    }
    order.sort_unstable();
    ProofStep {
        kind: StepKind::EqualitySubstitution {
            source: to_atom(st, comp, &st.facts[plan.source].literal),
            equations: plan
                .equations
                .iter()
                .map(|&e| to_atom(st, comp, &st.facts[e].literal))
                .collect(),
            derived: to_atom(st, comp, &plan.derived),
            display_order: order.into_iter().map(|(_, role)| role).collect(),
        },
        indentation: 0,
    }
}

/// How to place `literal` in the replayed context given that fact `fid`
/// carries a possibly different literal for the same canonical atom:
/// either cite it directly, or bridge with one substitution step justified
/// by the union-find's explanation of each differing argument.
fn resolve_cite(
    st: &State,
    comp: &Compiled,
    fid: usize,
    literal: &GAtom,
) -> (Option<SubstPlan>, Vec<usize>) {
    let flit = st.facts[fid].literal.clone();
    if flit == *literal {
        return (None, vec![fid]);
    }
    let symmetric = (comp.is_eq[literal.pred] || comp.is_neq[literal.pred]) && literal.args.len() == 2;
    let alignment = |src: &[usize]| -> Option<BTreeSet<usize>> {
        let mut eqs = BTreeSet::new();
        for (&a, &b) in src.iter().zip(&literal.args) {
            if a == b {
                continue;
            }
            if st.uf.find(a) != st.uf.find(b) {
                return None;
            }
            eqs.extend(st.uf.explain(a, b));
        }
        Some(eqs)
    };
    let direct = alignment(&flit.args);
    let swapped = if symmetric {
        let sw: Vec<usize> = flit.args.iter().rev().copied().collect();
        alignment(&sw)
    } else {
        None
    };
    let eqs = match (direct, swapped) {
        (Some(d), Some(s)) => {
            if s.len() < d.len() {
                s
            } else {
                d
            }
        }
        (Some(d), None) => d,
        (None, Some(s)) => s,
        (None, None) => unreachable!("cited fact is not congruent to the needed literal"),
    };
    let mut deps = vec![fid];
    deps.extend(eqs.iter().copied());
    (
        Some(SubstPlan {
            source: fid,
            equations: eqs.into_iter().collect(),
            derived: literal.clone(),
        }),
        deps,
    )
}

/// Places an equality literal that holds in the union-find: nothing for a
/// reflexive one, a direct citation when one merging fact already has the
/// exact literal, otherwise a substitution step over the explaining chain.
fn cite_equality(st: &State, lit: &GAtom) -> Option<(Option<SubstPlan>, Vec<usize>)> {
    let (a, b) = (lit.args[0], lit.args[1]);
    if a == b {
        return None;
    }
    let path = st.uf.explain(a, b);
    debug_assert!(!path.is_empty());
    if path.len() == 1 && st.facts[path[0]].literal == *lit {
        return Some((None, path));
    }
    let &source = path.iter().max().unwrap();
    let equations: Vec<usize> = path.iter().copied().filter(|&f| f != source).collect();
    let mut deps = path.clone();
    deps.push(source);
    Some((
        Some(SubstPlan {
            source,
            equations,
            derived: lit.clone(),
        }),
        deps,
    ))
}
