//! Forward-chaining saturation prover: ground facts over a growing constant
//! set, union-find equality with eager rewriting, case splits over derived
//! disjunctions, lazy excluded-middle instances for equality, iterative
//! deepening, and extraction of a checkable proof tree from the search trace.

mod assemble;
mod unionfind;

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::logic::{
    instantiate_conjecture, is_equality_decidability, NamedFormula, Term, Theory,
};
use crate::proof::ProofTree;

use unionfind::UnionFind;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("hint names unknown axiom {0}")]
    UnknownHint(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

#[derive(Debug, Clone)]
pub struct SearchLimits {
    /// Ceiling for mp applications along one root-to-leaf branch.
    pub max_steps: u64,
    /// Ceiling for case-split nesting depth.
    pub max_splits: u32,
    pub wall_clock: Duration,
    /// Explicit deepening schedule; when None, rounds double the step
    /// budget and add one split level: (8·2^k, k) clipped to the ceilings.
    pub schedule: Option<Vec<(u64, u32)>>,
    /// Per-round cap on premise-match attempts, a safety net against
    /// join blowup on flooded fact sets.
    pub attempt_cap: u64,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            max_steps: 4096,
            max_splits: 8,
            wall_clock: Duration::from_secs(60),
            schedule: None,
            attempt_cap: 5_000_000,
        }
    }
}

impl SearchLimits {
    fn rounds(&self) -> Vec<(u64, u32)> {
        if let Some(s) = &self.schedule {
            return s.clone();
        }
        let mut out = Vec::new();
        let mut k = 0u32;
        loop {
            let steps = (8u64 << k).min(self.max_steps);
            let splits = k.min(self.max_splits);
            if out.last() != Some(&(steps, splits)) {
                out.push((steps, splits));
            }
            if steps == self.max_steps && splits == self.max_splits {
                return out;
            }
            k += 1;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stats {
    /// Steps plus closings of the returned proof.
    pub proof_size: usize,
    pub rounds: usize,
    pub elapsed: Duration,
}

#[derive(Debug)]
pub enum ProveResult {
    Proved(Box<ProofTree>, Stats),
    /// The search space was exhausted: either a genuine fixpoint (the
    /// conjecture is not provable from the axioms) or the end of the
    /// deepening schedule.
    Exhausted { definitive: bool, rounds: usize },
    Timeout { elapsed: Duration },
}

/// Ground atom over interned predicate and constant indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct GAtom {
    pub pred: usize,
    pub args: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum PatArg {
    Const(usize),
    /// Index into the axiom's variable table (universals first, then the
    /// current disjunct's existentials).
    Var(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Pattern {
    pub pred: usize,
    pub args: Vec<PatArg>,
}

#[derive(Debug, Clone)]
pub(crate) struct CompiledDisjunct {
    /// (name, sort) of each existential, numbered after the universals.
    pub exvars: Vec<(String, String)>,
    pub conjuncts: Vec<Pattern>,
}

#[derive(Debug, Clone)]
pub(crate) struct CompiledAxiom {
    /// Index into theory.axioms.
    pub source: usize,
    pub vars: Vec<(String, String)>,
    pub premises: Vec<Pattern>,
    pub conclusion: Vec<CompiledDisjunct>,
    pub decides_equality: bool,
}

pub(crate) struct Compiled<'a> {
    pub theory: &'a Theory,
    pub pred_names: Vec<String>,
    pub is_eq: Vec<bool>,
    pub is_neq: Vec<bool>,
    pub partner: Vec<Option<usize>>,
    pub axioms: Vec<CompiledAxiom>,
    /// Per sort name, the compiled-axiom index of its decidability axiom.
    pub decidability: Vec<(String, usize)>,
}

impl<'a> Compiled<'a> {
    fn pred_index(&self, name: &str) -> Option<usize> {
        self.pred_names.iter().position(|n| n == name)
    }
}

fn compile<'a>(theory: &'a Theory, hints: Option<&[String]>) -> Result<Compiled<'a>, EngineError> {
    let sig = &theory.signature;
    let pred_names: Vec<String> = sig.predicates.iter().map(|p| p.name.clone()).collect();
    let idx_of = |name: &str| -> Result<usize, EngineError> {
        pred_names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| EngineError::InvalidInput(format!("undeclared predicate {name}")))
    };
    let is_eq: Vec<bool> = sig.predicates.iter().map(|p| p.is_equality).collect();
    let is_neq: Vec<bool> = sig
        .predicates
        .iter()
        .map(|p| sig.is_disequality(&p.name))
        .collect();
    let partner: Vec<Option<usize>> = sig
        .predicates
        .iter()
        .map(|p| p.negated_partner.as_deref().and_then(|q| pred_names.iter().position(|n| n == q)))
        .collect();

    let order: Vec<usize> = match hints {
        None => (0..theory.axioms.len()).collect(),
        Some(names) => {
            let mut out = Vec::new();
            for n in names {
                let i = theory
                    .axioms
                    .iter()
                    .position(|a| &a.name == n)
                    .ok_or_else(|| EngineError::UnknownHint(n.clone()))?;
                out.push(i);
            }
            out
        }
    };

    let const_idx: HashMap<&str, usize> = sig
        .constants
        .iter()
        .enumerate()
        .map(|(i, c)| (c.name.as_str(), i))
        .collect();

    let mut axioms = Vec::new();
    let mut decidability = Vec::new();
    for source in order {
        let nf = &theory.axioms[source];
        let f = &nf.formula;
        let vars: Vec<(String, String)> = f
            .universal_vars
            .iter()
            .map(|v| (v.name.clone(), v.sort.clone()))
            .collect();
        let var_pos = |disjunct_exvars: &[(String, String)], name: &str| -> Option<usize> {
            if let Some(i) = vars.iter().position(|(n, _)| n == name) {
                return Some(i);
            }
            disjunct_exvars
                .iter()
                .position(|(n, _)| n == name)
                .map(|i| vars.len() + i)
        };
        let pattern = |exvars: &[(String, String)], a: &crate::logic::Atom| -> Result<Pattern, EngineError> {
            let pred = idx_of(&a.predicate)?;
            let mut args = Vec::with_capacity(a.args.len());
            for t in &a.args {
                match t {
                    Term::Constant(c) => {
                        let i = *const_idx.get(c.as_str()).ok_or_else(|| {
                            EngineError::InvalidInput(format!("undeclared constant {c}"))
                        })?;
                        args.push(PatArg::Const(i));
                    }
                    Term::Variable(v) => {
                        let i = var_pos(exvars, v).ok_or_else(|| {
                            EngineError::InvalidInput(format!("unbound variable {v}"))
                        })?;
                        args.push(PatArg::Var(i));
                    }
                }
            }
            Ok(Pattern { pred, args })
        };
        let premises: Vec<Pattern> = f
            .premises
            .iter()
            .map(|a| pattern(&[], a))
            .collect::<Result<_, _>>()?;
        let mut conclusion = Vec::new();
        for d in &f.conclusion {
            let exvars: Vec<(String, String)> = d
                .existential_vars
                .iter()
                .map(|v| (v.name.clone(), v.sort.clone()))
                .collect();
            let conjuncts = d
                .conjuncts
                .iter()
                .map(|a| pattern(&exvars, a))
                .collect::<Result<_, _>>()?;
            conclusion.push(CompiledDisjunct { exvars, conjuncts });
        }
        let decides = is_equality_decidability(f, sig);
        if decides {
            let sort = f.universal_vars[0].sort.clone();
            if !decidability.iter().any(|(s, _)| *s == sort) {
                decidability.push((sort, axioms.len()));
            }
        }
        axioms.push(CompiledAxiom {
            source,
            vars,
            premises,
            conclusion,
            decides_equality: decides,
        });
    }

    Ok(Compiled {
        theory,
        pred_names,
        is_eq,
        is_neq,
        partner,
        axioms,
        decidability,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Ev {
    Fact(usize),
    Disj(usize),
}

#[derive(Debug, Clone)]
pub(crate) enum Just {
    Initial,
    Mp { deriv: usize },
    Assumption,
    Rewrite { source: usize },
}

#[derive(Debug, Clone)]
pub(crate) struct FactRec {
    /// The literal form this fact has in the replayed proof context.
    pub literal: GAtom,
    /// Canonical form at creation time (current while the fact is live).
    pub canon: GAtom,
    pub just: Just,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum PremRef {
    Fact(usize),
    /// A reflexive equality t = t; needs no fact.
    Reflexive,
}

#[derive(Debug, Clone)]
pub(crate) struct Derivation {
    pub axiom: usize,
    /// Constant per universal variable.
    pub binding: Vec<usize>,
    pub premises: Vec<PremRef>,
    pub premise_literals: Vec<GAtom>,
    /// Fresh constants for existentials, across disjuncts in order.
    pub witnesses: Vec<usize>,
    /// Ground literal disjunction (conclusion instance).
    pub derived: Vec<Vec<GAtom>>,
}

#[derive(Debug, Clone)]
pub(crate) struct DisjRec {
    pub deriv: usize,
}

#[derive(Debug, Clone)]
pub(crate) enum BottomInfo {
    /// An empty-conclusion axiom fired.
    Mp { deriv: usize },
    /// A disequality collapsed to t ≠ t (directly asserted or by a merge).
    Neq { neq_fact: usize },
}

/// How one goal conjunct was satisfied, for the From closing.
#[derive(Debug, Clone)]
pub(crate) enum LitSource {
    Fact(usize),
    /// Equality holding in the union-find (possibly reflexive).
    EqByUf,
}

#[derive(Debug, Clone)]
pub(crate) struct FromInfo {
    pub disjunct_index: usize,
    /// (existential name, chosen constant).
    pub witness_binding: Vec<(String, usize)>,
    pub literals: Vec<GAtom>,
    pub sources: Vec<LitSource>,
}

#[derive(Debug, Clone)]
pub(crate) struct GoalDisjunct {
    pub exvars: Vec<(String, String)>,
    pub conjuncts: Vec<Pattern>,
}

#[derive(Debug, Clone)]
pub(crate) struct State {
    /// (name, sort); index order is constant age.
    pub consts: Vec<(String, String)>,
    pub uf: UnionFind,
    pub facts: Vec<FactRec>,
    pub derivs: Vec<Derivation>,
    pub disjs: Vec<DisjRec>,
    pub events: Vec<Ev>,
    live: HashMap<GAtom, usize>,
    by_pred: Vec<Vec<usize>>,
    pending: VecDeque<usize>,
    applied: HashSet<(usize, Vec<usize>)>,
    generated_pairs: BTreeSet<(usize, usize)>,
}

impl State {
    fn new(n_preds: usize) -> State {
        State {
            consts: Vec::new(),
            uf: UnionFind::default(),
            facts: Vec::new(),
            derivs: Vec::new(),
            disjs: Vec::new(),
            events: Vec::new(),
            live: HashMap::new(),
            by_pred: vec![Vec::new(); n_preds],
            pending: VecDeque::new(),
            applied: HashSet::new(),
            generated_pairs: BTreeSet::new(),
        }
    }

    fn add_const(&mut self, name: String, sort: String) -> usize {
        self.consts.push((name, sort));
        self.uf.add()
    }

    fn const_named(&self, name: &str) -> Option<usize> {
        self.consts.iter().position(|(n, _)| n == name)
    }

    pub(crate) fn canonicalize(&self, a: &GAtom, comp: &Compiled) -> GAtom {
        let mut args: Vec<usize> = a.args.iter().map(|&c| self.uf.find(c)).collect();
        if (comp.is_eq[a.pred] || comp.is_neq[a.pred]) && args.len() == 2 && args[0] > args[1] {
            args.swap(0, 1);
        }
        GAtom { pred: a.pred, args }
    }

    /// Class representatives in age order.
    fn reps(&self) -> Vec<usize> {
        (0..self.consts.len())
            .filter(|&c| self.uf.find(c) == c)
            .collect()
    }

    /// Stores a literal fact, canonicalizing for the index; equalities merge
    /// classes (with eager rewriting of every affected live fact), and a
    /// disequality over one class is a contradiction.
    fn add_fact(&mut self, literal: GAtom, just: Just, comp: &Compiled) -> Result<Option<usize>, BottomInfo> {
        let canon = self.canonicalize(&literal, comp);
        if comp.is_eq[literal.pred] {
            if canon.args[0] == canon.args[1] {
                return Ok(None);
            }
            let id = self.push_fact(literal.clone(), canon, just);
            self.merge(literal.args[0], literal.args[1], id, comp)?;
            return Ok(Some(id));
        }
        if comp.is_neq[literal.pred] && canon.args[0] == canon.args[1] {
            let id = self.push_fact(literal, canon, just);
            return Err(BottomInfo::Neq { neq_fact: id });
        }
        if self.live.contains_key(&canon) {
            return Ok(None);
        }
        Ok(Some(self.push_fact(literal, canon, just)))
    }

    fn push_fact(&mut self, literal: GAtom, canon: GAtom, just: Just) -> usize {
        let id = self.facts.len();
        self.by_pred[canon.pred].push(id);
        self.live.insert(canon.clone(), id);
        self.facts.push(FactRec { literal, canon, just });
        self.events.push(Ev::Fact(id));
        id
    }

    /// Merges the classes of `a` and `b` (justified by fact `fid`) and
    /// rewrites every live fact that mentioned the retired representative,
    /// recording each rewrite as a new fact.
    fn merge(&mut self, a: usize, b: usize, fid: usize, comp: &Compiled) -> Result<(), BottomInfo> {
        let Some((_kept, retired)) = self.uf.union(a, b, fid) else {
            return Ok(());
        };
        let mut affected: Vec<usize> = Vec::new();
        for list in &self.by_pred {
            for &id in list {
                if self.facts[id].canon.args.contains(&retired) {
                    affected.push(id);
                }
            }
        }
        affected.sort_unstable();
        for old_id in affected {
            let old_canon = self.facts[old_id].canon.clone();
            let new_canon = self.canonicalize(&old_canon, comp);
            self.live.remove(&old_canon);
            self.by_pred[old_canon.pred].retain(|&i| i != old_id);
            if comp.is_eq[new_canon.pred] && new_canon.args[0] == new_canon.args[1] {
                continue; // equality collapsed into its own merge
            }
            if comp.is_neq[new_canon.pred] && new_canon.args[0] == new_canon.args[1] {
                return Err(BottomInfo::Neq { neq_fact: old_id });
            }
            if self.live.contains_key(&new_canon) {
                continue;
            }
            self.push_fact(
                new_canon.clone(),
                new_canon,
                Just::Rewrite { source: old_id },
            );
        }
        Ok(())
    }

    /// True when the instantiated conclusion is already satisfied: some
    /// disjunct has an extension of `binding` over existing constants with
    /// every conjunct present.
    fn instance_satisfied(&self, axiom: &CompiledAxiom, binding: &[usize], comp: &Compiled) -> bool {
        axiom.conclusion.iter().any(|d| {
            let mut ext: Vec<Option<usize>> =
                binding.iter().map(|&c| Some(c)).collect();
            ext.resize(axiom.vars.len() + d.exvars.len(), None);
            self.disjunct_satisfiable(&d.conjuncts, &mut ext, 0, comp)
        })
    }

    fn pat_value(&self, p: PatArg, ext: &[Option<usize>]) -> Option<usize> {
        match p {
            PatArg::Const(c) => Some(self.uf.find(c)),
            PatArg::Var(v) => ext[v].map(|c| self.uf.find(c)),
        }
    }

    fn disjunct_satisfiable(
        &self,
        conjuncts: &[Pattern],
        ext: &mut Vec<Option<usize>>,
        i: usize,
        comp: &Compiled,
    ) -> bool {
        if i == conjuncts.len() {
            return true;
        }
        let pat = &conjuncts[i];
        let vals: Vec<Option<usize>> = pat.args.iter().map(|&p| self.pat_value(p, ext)).collect();
        if vals.iter().all(Option::is_some) {
            let args: Vec<usize> = vals.into_iter().map(Option::unwrap).collect();
            let present = if comp.is_eq[pat.pred] {
                args[0] == args[1]
            } else {
                let mut c = GAtom { pred: pat.pred, args };
                if comp.is_neq[pat.pred] && c.args[0] > c.args[1] {
                    c.args.swap(0, 1);
                }
                self.live.contains_key(&c)
            };
            return present && self.disjunct_satisfiable(conjuncts, ext, i + 1, comp);
        }
        // Unbound existentials: bind from candidate facts (or, for an
        // equality conjunct, from the class of the bound side).
        if comp.is_eq[pat.pred] {
            let (bound, unbound_var) = match (vals[0], &pat.args[1]) {
                (Some(b), &PatArg::Var(v)) if ext[v].is_none() => (Some(b), v),
                _ => match (vals[1], &pat.args[0]) {
                    (Some(b), &PatArg::Var(v)) if ext[v].is_none() => (Some(b), v),
                    _ => (None, usize::MAX),
                },
            };
            if let Some(b) = bound {
                ext[unbound_var] = Some(b);
                let ok = self.disjunct_satisfiable(conjuncts, ext, i + 1, comp);
                ext[unbound_var] = None;
                if ok {
                    return true;
                }
                return false;
            }
            // Both sides unbound: any representative equals itself.
            if let (PatArg::Var(v1), PatArg::Var(v2)) = (pat.args[0], pat.args[1]) {
                for r in self.reps() {
                    ext[v1] = Some(r);
                    ext[v2] = Some(r);
                    if self.disjunct_satisfiable(conjuncts, ext, i + 1, comp) {
                        ext[v1] = None;
                        ext[v2] = None;
                        return true;
                    }
                    ext[v1] = None;
                    ext[v2] = None;
                }
            }
            return false;
        }
        for &fid in &self.by_pred[pat.pred] {
            let atom = &self.facts[fid].canon;
            let orientations: &[bool] = if comp.is_neq[pat.pred] { &[false, true] } else { &[false] };
            for &swap in orientations {
                let mut trial: Vec<(usize, usize)> = Vec::new();
                let mut ok = true;
                for (j, &p) in pat.args.iter().enumerate() {
                    let aj = if swap { atom.args[atom.args.len() - 1 - j] } else { atom.args[j] };
                    match self.pat_value(p, ext) {
                        Some(v) => {
                            if v != aj {
                                ok = false;
                                break;
                            }
                        }
                        None => {
                            if let PatArg::Var(v) = p {
                                if let Some((_, prev)) = trial.iter().find(|(tv, _)| *tv == v) {
                                    if *prev != aj {
                                        ok = false;
                                        break;
                                    }
                                } else {
                                    trial.push((v, aj));
                                }
                            }
                        }
                    }
                }
                if !ok {
                    continue;
                }
                for &(v, c) in &trial {
                    ext[v] = Some(c);
                }
                if self.disjunct_satisfiable(conjuncts, ext, i + 1, comp) {
                    for &(v, _) in &trial {
                        ext[v] = None;
                    }
                    return true;
                }
                for &(v, _) in &trial {
                    ext[v] = None;
                }
            }
        }
        false
    }

    /// Instantiates a pattern: constants stay as written, variables come
    /// from the binding table (universals then existentials-by-witness).
    fn instantiate(&self, pat: &Pattern, table: &[usize]) -> GAtom {
        GAtom {
            pred: pat.pred,
            args: pat
                .args
                .iter()
                .map(|&p| match p {
                    PatArg::Const(c) => c,
                    PatArg::Var(v) => table[v],
                })
                .collect(),
        }
    }

    /// Checks each goal disjunct for satisfaction under the current state;
    /// returns the instantiated literals, witnesses and fact sources needed
    /// by a From closing.
    fn check_goal(&self, goal: &[GoalDisjunct], comp: &Compiled) -> Option<FromInfo> {
        'disjuncts: for (i, d) in goal.iter().enumerate() {
            let mut ext: Vec<Option<usize>> = vec![None; d.exvars.len()];
            if !self.goal_disjunct_match(&d.conjuncts, &mut ext, 0, comp) {
                continue 'disjuncts;
            }
            let table: Vec<usize> = ext.iter().map(|o| o.unwrap()).collect();
            let mut literals = Vec::new();
            let mut sources = Vec::new();
            for pat in &d.conjuncts {
                let lit = self.instantiate(pat, &table);
                let src = if comp.is_eq[pat.pred] {
                    LitSource::EqByUf
                } else {
                    let canon = self.canonicalize(&lit, comp);
                    match self.live.get(&canon) {
                        Some(&fid) => LitSource::Fact(fid),
                        None => continue 'disjuncts, // raced, should not happen
                    }
                };
                literals.push(lit);
                sources.push(src);
            }
            return Some(FromInfo {
                disjunct_index: i,
                witness_binding: d
                    .exvars
                    .iter()
                    .zip(&table)
                    .map(|((n, _), &c)| (n.clone(), c))
                    .collect(),
                literals,
                sources,
            });
        }
        None
    }

    fn goal_disjunct_match(
        &self,
        conjuncts: &[Pattern],
        ext: &mut Vec<Option<usize>>,
        i: usize,
        comp: &Compiled,
    ) -> bool {
        // Goal variables are numbered from 0 (no universals remain).
        self.disjunct_satisfiable(conjuncts, ext, i, comp);
        // disjunct_satisfiable resets bindings on success; redo capturing.
        self.goal_match_capture(conjuncts, ext, i, comp)
    }

    fn goal_match_capture(
        &self,
        conjuncts: &[Pattern],
        ext: &mut Vec<Option<usize>>,
        i: usize,
        comp: &Compiled,
    ) -> bool {
        if i == conjuncts.len() {
            return true;
        }
        let pat = &conjuncts[i];
        let vals: Vec<Option<usize>> = pat.args.iter().map(|&p| self.pat_value(p, ext)).collect();
        if vals.iter().all(Option::is_some) {
            let args: Vec<usize> = vals.into_iter().map(Option::unwrap).collect();
            let present = if comp.is_eq[pat.pred] {
                args[0] == args[1]
            } else {
                let mut c = GAtom { pred: pat.pred, args };
                if comp.is_neq[pat.pred] && c.args[0] > c.args[1] {
                    c.args.swap(0, 1);
                }
                self.live.contains_key(&c)
            };
            return present && self.goal_match_capture(conjuncts, ext, i + 1, comp);
        }
        if comp.is_eq[pat.pred] {
            let (bound, unbound_var) = match (vals[0], &pat.args[1]) {
                (Some(b), &PatArg::Var(v)) if ext[v].is_none() => (Some(b), v),
                _ => match (vals[1], &pat.args[0]) {
                    (Some(b), &PatArg::Var(v)) if ext[v].is_none() => (Some(b), v),
                    _ => (None, usize::MAX),
                },
            };
            if let Some(b) = bound {
                ext[unbound_var] = Some(b);
                if self.goal_match_capture(conjuncts, ext, i + 1, comp) {
                    return true;
                }
                ext[unbound_var] = None;
                return false;
            }
            if let (PatArg::Var(v1), PatArg::Var(v2)) = (pat.args[0], pat.args[1]) {
                for r in self.reps() {
                    ext[v1] = Some(r);
                    ext[v2] = Some(r);
                    if self.goal_match_capture(conjuncts, ext, i + 1, comp) {
                        return true;
                    }
                    ext[v1] = None;
                    ext[v2] = None;
                }
            }
            return false;
        }
        for &fid in &self.by_pred[pat.pred] {
            let atom = self.facts[fid].canon.clone();
            let orientations: &[bool] = if comp.is_neq[pat.pred] { &[false, true] } else { &[false] };
            for &swap in orientations {
                let mut trial: Vec<(usize, usize)> = Vec::new();
                let mut ok = true;
                for (j, &p) in pat.args.iter().enumerate() {
                    let aj = if swap { atom.args[atom.args.len() - 1 - j] } else { atom.args[j] };
                    match self.pat_value(p, ext) {
                        Some(v) => {
                            if v != aj {
                                ok = false;
                                break;
                            }
                        }
                        None => {
                            if let PatArg::Var(v) = p {
                                if let Some((_, prev)) = trial.iter().find(|(tv, _)| *tv == v) {
                                    if *prev != aj {
                                        ok = false;
                                        break;
                                    }
                                } else {
                                    trial.push((v, aj));
                                }
                            }
                        }
                    }
                }
                if !ok {
                    continue;
                }
                for &(v, c) in &trial {
                    ext[v] = Some(c);
                }
                if self.goal_match_capture(conjuncts, ext, i + 1, comp) {
                    return true;
                }
                for &(v, _) in &trial {
                    ext[v] = None;
                }
            }
        }
        false
    }
}

pub(crate) struct SearchCtx<'a> {
    comp: &'a Compiled<'a>,
    goal: Vec<GoalDisjunct>,
    deadline: Instant,
    max_steps: u64,
    max_splits: u32,
    attempts_left: u64,
}

pub(crate) struct Node {
    pub state: State,
    pub closing: NodeClosing,
    pub children: Vec<Node>,
    pub base_facts: usize,
    pub base_disjs: usize,
    pub base_events: usize,
}

pub(crate) enum NodeClosing {
    From(FromInfo),
    Efq(BottomInfo),
    Split { disj: usize },
}

enum SOutcome {
    Closed(Box<Node>),
    Fail { definitive: bool },
    TimedOut,
}

enum SweepEvent {
    Done,
    Bottom(BottomInfo),
    Goal(FromInfo),
    Budget,
    Attempts,
    TimedOut,
}

/// One saturation pass over a single axiom: enumerate premise matches
/// against a snapshot of the live index and apply each one immediately.
fn saturate_axiom(
    st: &mut State,
    ax_idx: usize,
    ctx: &mut SearchCtx,
    used: &mut u64,
    wit: &mut usize,
) -> SweepEvent {
    let comp = ctx.comp;
    let axiom = &comp.axioms[ax_idx];
    // Snapshot candidate fact ids per premise and the representative set;
    // facts appended during this pass are picked up by the next sweep.
    let cand: Vec<Vec<usize>> = axiom
        .premises
        .iter()
        .map(|p| st.by_pred[p.pred].clone())
        .collect();
    let reps = st.reps();

    // Iterative enumeration: per premise a (candidate index, orientation)
    // cursor; after the premises, unconstrained variables run over reps.
    struct Frame {
        cursor: usize,
        bound_here: Vec<usize>,
    }
    let n_prem = axiom.premises.len();
    let mut binding: Vec<Option<usize>> = vec![None; axiom.vars.len()];
    let mut prems: Vec<PremRef> = Vec::with_capacity(n_prem);
    let mut lits: Vec<GAtom> = Vec::with_capacity(n_prem);
    let mut frames: Vec<Frame> = vec![Frame { cursor: 0, bound_here: vec![] }];

    // Unconstrained-variable tail: computed lazily at the leaf.
    loop {
        if Instant::now() > ctx.deadline {
            return SweepEvent::TimedOut;
        }
        let depth = frames.len() - 1;
        if depth == n_prem {
            // Premises matched: enumerate any still-unbound universals.
            let unbound: Vec<usize> = (0..axiom.vars.len()).filter(|&v| binding[v].is_none()).collect();
            let mut tail = vec![0usize; unbound.len()];
            'tail: loop {
                if ctx.attempts_left == 0 {
                    return SweepEvent::Attempts;
                }
                ctx.attempts_left -= 1;
                if reps.is_empty() && !unbound.is_empty() {
                    break 'tail;
                }
                for (k, &v) in unbound.iter().enumerate() {
                    binding[v] = Some(reps[tail[k]]);
                }
                let full: Vec<usize> = binding.iter().map(|o| o.unwrap()).collect();
                match apply_mp(st, ax_idx, full, prems.clone(), lits.clone(), ctx, wit) {
                    MpOutcome::Redundant => {}
                    MpOutcome::Applied | MpOutcome::AppliedDisj => {
                        *used += 1;
                        if *used > ctx.max_steps {
                            return SweepEvent::Budget;
                        }
                        if let Some(f) = st.check_goal(&ctx.goal, ctx.comp) {
                            return SweepEvent::Goal(f);
                        }
                        // progress noted by caller through used counter
                    }
                    MpOutcome::Bottom(b) => return SweepEvent::Bottom(b),
                }
                for &v in &unbound {
                    binding[v] = None;
                }
                // advance tail
                let mut k = unbound.len();
                loop {
                    if k == 0 {
                        break 'tail;
                    }
                    k -= 1;
                    tail[k] += 1;
                    if tail[k] < reps.len() {
                        break;
                    }
                    tail[k] = 0;
                    if k == 0 {
                        break 'tail;
                    }
                }
                if unbound.is_empty() {
                    break 'tail;
                }
            }
            // backtrack out of the leaf
            let f = frames.pop().unwrap();
            for v in f.bound_here {
                binding[v] = None;
            }
            prems.pop();
            lits.pop();
            if frames.is_empty() {
                return SweepEvent::Done;
            }
            continue;
        }

        // Try the next candidate for premise `depth`.
        let pat = &axiom.premises[depth];
        let symmetric = comp.is_eq[pat.pred] || comp.is_neq[pat.pred];
        let per_fact = if symmetric { 2 } else { 1 };
        let reflexive_base = cand[depth].len() * per_fact;
        let total = reflexive_base
            + if comp.is_eq[pat.pred] { reps.len() } else { 0 };

        let cursor = frames.last().unwrap().cursor;
        if cursor >= total {
            let f = frames.pop().unwrap();
            for v in f.bound_here {
                binding[v] = None;
            }
            prems.pop();
            lits.pop();
            if frames.is_empty() {
                return SweepEvent::Done;
            }
            continue;
        }
        frames.last_mut().unwrap().cursor += 1;
        if ctx.attempts_left == 0 {
            return SweepEvent::Attempts;
        }
        ctx.attempts_left -= 1;

        let (atom_args, premref): (Vec<usize>, PremRef) = if cursor < reflexive_base {
            let fid = cand[depth][cursor / per_fact];
            let swap = cursor % per_fact == 1;
            let atom = &st.facts[fid].canon;
            let mut args = atom.args.clone();
            if swap {
                args.reverse();
            }
            (args, PremRef::Fact(fid))
        } else {
            let r = reps[cursor - reflexive_base];
            (vec![r, r], PremRef::Reflexive)
        };

        // Bind pattern args against the candidate tuple.
        let mut bound_here = Vec::new();
        let mut ok = true;
        for (j, &p) in pat.args.iter().enumerate() {
            let aj = atom_args[j];
            match p {
                PatArg::Const(c) => {
                    if st.uf.find(c) != st.uf.find(aj) {
                        ok = false;
                        break;
                    }
                }
                PatArg::Var(v) => match binding[v] {
                    Some(b) => {
                        if st.uf.find(b) != st.uf.find(aj) {
                            ok = false;
                            break;
                        }
                    }
                    None => {
                        binding[v] = Some(aj);
                        bound_here.push(v);
                    }
                },
            }
        }
        if !ok {
            for v in bound_here {
                binding[v] = None;
            }
            continue;
        }
        // Premise literal: constants as written in the axiom, vars bound.
        let lit = GAtom {
            pred: pat.pred,
            args: pat
                .args
                .iter()
                .map(|&p| match p {
                    PatArg::Const(c) => c,
                    PatArg::Var(v) => binding[v].unwrap(),
                })
                .collect(),
        };
        prems.push(premref);
        lits.push(lit);
        frames.push(Frame { cursor: 0, bound_here });
    }
}

enum MpOutcome {
    Applied,
    AppliedDisj,
    Bottom(BottomInfo),
    Redundant,
}

fn apply_mp(
    st: &mut State,
    ax_idx: usize,
    binding: Vec<usize>,
    premises: Vec<PremRef>,
    premise_literals: Vec<GAtom>,
    ctx: &SearchCtx,
    wit: &mut usize,
) -> MpOutcome {
    let comp = ctx.comp;
    let axiom = &comp.axioms[ax_idx];
    let key = (ax_idx, binding.clone());
    if st.applied.contains(&key) {
        return MpOutcome::Redundant;
    }
    if st.instance_satisfied(axiom, &binding, comp) {
        st.applied.insert(key);
        return MpOutcome::Redundant;
    }
    st.applied.insert(key);

    let mut witnesses = Vec::new();
    let mut derived: Vec<Vec<GAtom>> = Vec::new();
    for d in &axiom.conclusion {
        let mut table = binding.clone();
        for (name, sort) in &d.exvars {
            let _ = name;
            let c = fresh_witness(st, sort, wit);
            witnesses.push(c);
            table.push(c);
        }
        derived.push(d.conjuncts.iter().map(|p| st.instantiate(p, &table)).collect());
    }
    let deriv = st.derivs.len();
    st.derivs.push(Derivation {
        axiom: ax_idx,
        binding,
        premises,
        premise_literals,
        witnesses,
        derived: derived.clone(),
    });

    if derived.is_empty() {
        return MpOutcome::Bottom(BottomInfo::Mp { deriv });
    }
    if derived.len() == 1 {
        for lit in &derived[0] {
            match st.add_fact(lit.clone(), Just::Mp { deriv }, comp) {
                Ok(_) => {}
                Err(b) => return MpOutcome::Bottom(b),
            }
        }
        MpOutcome::Applied
    } else {
        let disj = st.disjs.len();
        st.disjs.push(DisjRec { deriv });
        st.pending.push_back(disj);
        st.events.push(Ev::Disj(disj));
        MpOutcome::AppliedDisj
    }
}

fn fresh_witness(st: &mut State, sort: &str, wit: &mut usize) -> usize {
    loop {
        *wit += 1;
        let name = format!("w{wit}");
        if st.const_named(&name).is_none() {
            return st.add_const(name, sort.to_string());
        }
    }
}

/// Asserts one branch of a split disjunction; equality assumptions merge.
fn assert_assumption(
    st: &mut State,
    disj: usize,
    branch: usize,
    comp: &Compiled,
) -> Result<(), BottomInfo> {
    let lits = st.derivs[st.disjs[disj].deriv].derived[branch].clone();
    let _ = (disj, branch);
    for lit in lits {
        st.add_fact(lit, Just::Assumption, comp)?;
    }
    Ok(())
}

/// A split disjunction is spent when some disjunct is wholly satisfied.
fn disjunction_satisfied(st: &State, disj: usize, comp: &Compiled) -> bool {
    let deriv = &st.derivs[st.disjs[disj].deriv];
    deriv.derived.iter().any(|conjs| {
        conjs.iter().all(|lit| {
            if comp.is_eq[lit.pred] {
                st.uf.find(lit.args[0]) == st.uf.find(lit.args[1])
            } else {
                let canon = st.canonicalize(lit, comp);
                st.live.contains_key(&canon)
            }
        })
    })
}

/// The next undecided equality pair for a lazy excluded-middle split:
/// constants co-occurring in a live fact or goal atom, in age-lexicographic
/// order, whose classes are distinct and not known disequal.
fn next_equality_pair(st: &State, ctx: &SearchCtx) -> Option<(usize, usize, usize)> {
    let comp = ctx.comp;
    if comp.decidability.is_empty() {
        return None;
    }
    let mut pairs: BTreeSet<(usize, usize)> = BTreeSet::new();
    let note_args = |st: &State, args: &[usize], pairs: &mut BTreeSet<(usize, usize)>| {
        for (i, &a) in args.iter().enumerate() {
            for &b in &args[i + 1..] {
                let (ra, rb) = (st.uf.find(a), st.uf.find(b));
                if ra != rb {
                    pairs.insert((ra.min(rb), ra.max(rb)));
                }
            }
        }
    };
    for list in &st.by_pred {
        for &fid in list {
            note_args(st, &st.facts[fid].canon.args, &mut pairs);
        }
    }
    for d in &ctx.goal {
        for pat in &d.conjuncts {
            let consts: Vec<usize> = pat
                .args
                .iter()
                .filter_map(|&p| match p {
                    PatArg::Const(c) => Some(c),
                    PatArg::Var(_) => None,
                })
                .collect();
            note_args(st, &consts, &mut pairs);
        }
    }
    for (a, b) in pairs {
        if st.generated_pairs.contains(&(a, b)) {
            continue;
        }
        let sort = &st.consts[a].1;
        let Some(&(_, ax_idx)) = comp
            .decidability
            .iter()
            .find(|(s, _)| s == sort)
        else {
            continue;
        };
        if st.consts[b].1 != *sort {
            continue;
        }
        // Known disequal already?
        let neq_pred = {
            let eq_pat = &comp.axioms[ax_idx].conclusion[1].conjuncts[0];
            eq_pat.pred
        };
        let neq_atom = GAtom {
            pred: neq_pred,
            args: vec![a, b],
        };
        if st.live.contains_key(&neq_atom) {
            continue;
        }
        return Some((ax_idx, a, b));
    }
    None
}

fn search(
    mut st: State,
    base: (usize, usize, usize),
    assume: Option<(usize, usize)>,
    depth: u32,
    mut used: u64,
    ctx: &mut SearchCtx,
    wit: &mut usize,
) -> SOutcome {
    let closed = |st: State, closing: NodeClosing, children: Vec<Node>| -> SOutcome {
        SOutcome::Closed(Box::new(Node {
            state: st,
            closing,
            children,
            base_facts: base.0,
            base_disjs: base.1,
            base_events: base.2,
        }))
    };

    if let Some((disj, branch)) = assume {
        if let Err(b) = assert_assumption(&mut st, disj, branch, ctx.comp) {
            return closed(st, NodeClosing::Efq(b), vec![]);
        }
    }
    if let Some(f) = st.check_goal(&ctx.goal, ctx.comp) {
        return closed(st, NodeClosing::From(f), vec![]);
    }

    loop {
        // Saturate by mp until a fixpoint.
        loop {
            let before = used;
            for ax_idx in 0..ctx.comp.axioms.len() {
                if ctx.comp.axioms[ax_idx].decides_equality {
                    continue; // applied lazily at stalls
                }
                match saturate_axiom(&mut st, ax_idx, ctx, &mut used, wit) {
                    SweepEvent::Done => {}
                    SweepEvent::Bottom(b) => return closed(st, NodeClosing::Efq(b), vec![]),
                    SweepEvent::Goal(f) => return closed(st, NodeClosing::From(f), vec![]),
                    SweepEvent::Budget | SweepEvent::Attempts => {
                        return SOutcome::Fail { definitive: false }
                    }
                    SweepEvent::TimedOut => return SOutcome::TimedOut,
                }
            }
            if used == before {
                break;
            }
        }

        // Stalled: split the oldest pending disjunction, else generate the
        // next lazy equality split, else this branch is saturated.
        let split_target = loop {
            match st.pending.pop_front() {
                Some(d) => {
                    if disjunction_satisfied(&st, d, ctx.comp) {
                        continue;
                    }
                    break Some(d);
                }
                None => break None,
            }
        };
        let disj = match split_target {
            Some(d) => d,
            None => match next_equality_pair(&st, ctx) {
                Some((ax_idx, a, b)) => {
                    st.generated_pairs.insert((a, b));
                    let binding = vec![a, b];
                    match apply_mp(&mut st, ax_idx, binding, vec![], vec![], ctx, wit) {
                        MpOutcome::AppliedDisj => {
                            used += 1;
                            if used > ctx.max_steps {
                                return SOutcome::Fail { definitive: false };
                            }
                            st.pending.pop_back().expect("just enqueued")
                        }
                        MpOutcome::Redundant => continue,
                        _ => unreachable!("decidability axioms derive a 2-disjunct clause"),
                    }
                }
                None => return SOutcome::Fail { definitive: true },
            },
        };

        if depth == ctx.max_splits {
            return SOutcome::Fail { definitive: false };
        }
        let n_branches = st.derivs[st.disjs[disj].deriv].derived.len();
        let mut children = Vec::with_capacity(n_branches);
        let mut definitive_fail = None;
        for branch in 0..n_branches {
            let child = st.clone();
            let child_base = (st.facts.len(), st.disjs.len(), st.events.len());
            match search(child, child_base, Some((disj, branch)), depth + 1, used, ctx, wit) {
                SOutcome::Closed(node) => children.push(*node),
                SOutcome::Fail { definitive } => {
                    definitive_fail = Some(definitive);
                    break;
                }
                SOutcome::TimedOut => return SOutcome::TimedOut,
            }
        }
        return match definitive_fail {
            None => closed(st, NodeClosing::Split { disj }, children),
            Some(d) => SOutcome::Fail { definitive: d },
        };
    }
}

/// Proves `conjecture` from `theory` under `limits`. With `hints`, the
/// search considers only the named axioms, in the given order.
pub fn prove(
    theory: &Theory,
    conjecture: &NamedFormula,
    limits: &SearchLimits,
    hints: Option<&[String]>,
) -> Result<ProveResult, EngineError> {
    let start = Instant::now();
    let comp = compile(theory, hints)?;
    let deadline = start + limits.wall_clock;

    // Shared initial state: theory constants, conjecture constants, premises.
    let inst = instantiate_conjecture(&conjecture.formula, &theory.signature)
        .map_err(|e| EngineError::InvalidInput(e.to_string()))?;
    let mut init = State::new(comp.pred_names.len());
    for c in &theory.signature.constants {
        init.add_const(c.name.clone(), c.sort.clone());
    }
    for c in &inst.constants {
        init.add_const(c.name.clone(), c.sort.clone());
    }
    let to_gatom = |st: &State, a: &crate::logic::Atom| -> Result<GAtom, EngineError> {
        let pred = comp
            .pred_index(&a.predicate)
            .ok_or_else(|| EngineError::InvalidInput(format!("undeclared predicate {}", a.predicate)))?;
        let mut args = Vec::new();
        for t in &a.args {
            match t {
                Term::Constant(n) => args.push(st.const_named(n).ok_or_else(|| {
                    EngineError::InvalidInput(format!("undeclared constant {n}"))
                })?),
                Term::Variable(v) => {
                    return Err(EngineError::InvalidInput(format!(
                        "unexpected variable {v} in an instantiated premise"
                    )))
                }
            }
        }
        Ok(GAtom { pred, args })
    };

    let mut initial_bottom = None;
    for p in &inst.premises {
        let lit = to_gatom(&init, p)?;
        if let Err(b) = init.add_fact(lit, Just::Initial, &comp) {
            initial_bottom = Some(b);
            break;
        }
    }

    // Goal disjuncts compiled over the instantiated constants.
    let mut goal = Vec::new();
    for d in &inst.goal {
        let exvars: Vec<(String, String)> = d
            .existential_vars
            .iter()
            .map(|v| (v.name.clone(), v.sort.clone()))
            .collect();
        let mut conjuncts = Vec::new();
        for a in &d.conjuncts {
            let pred = comp.pred_index(&a.predicate).ok_or_else(|| {
                EngineError::InvalidInput(format!("undeclared predicate {}", a.predicate))
            })?;
            let mut args = Vec::new();
            for t in &a.args {
                match t {
                    Term::Constant(n) => args.push(PatArg::Const(init.const_named(n).ok_or_else(
                        || EngineError::InvalidInput(format!("undeclared constant {n}")),
                    )?)),
                    Term::Variable(v) => {
                        let i = exvars
                            .iter()
                            .position(|(n, _)| n == v)
                            .ok_or_else(|| EngineError::InvalidInput(format!("unbound {v}")))?;
                        args.push(PatArg::Var(i));
                    }
                }
            }
            conjuncts.push(Pattern { pred, args });
        }
        goal.push(GoalDisjunct { exvars, conjuncts });
    }

    let rounds = limits.rounds();
    let n_rounds = rounds.len();
    for (round, (max_steps, max_splits)) in rounds.into_iter().enumerate() {
        if Instant::now() > deadline {
            return Ok(ProveResult::Timeout {
                elapsed: start.elapsed(),
            });
        }
        let mut ctx = SearchCtx {
            comp: &comp,
            goal: goal.clone(),
            deadline,
            max_steps,
            max_splits,
            attempts_left: limits.attempt_cap,
        };
        let mut wit = 0usize;
        let outcome = if let Some(b) = initial_bottom.clone() {
            let st = init.clone();
            SOutcome::Closed(Box::new(Node {
                state: st,
                closing: NodeClosing::Efq(b),
                children: vec![],
                base_facts: 0,
                base_disjs: 0,
                base_events: 0,
            }))
        } else {
            search(init.clone(), (0, 0, 0), None, 0, 0, &mut ctx, &mut wit)
        };
        match outcome {
            SOutcome::Closed(node) => {
                let mut tree = assemble::assemble(&node, &comp, &goal);
                tree.renumber_indentation(0);
                tree.name = Some(conjecture.name.clone());
                let stats = Stats {
                    proof_size: tree.size(),
                    rounds: round + 1,
                    elapsed: start.elapsed(),
                };
                return Ok(ProveResult::Proved(Box::new(tree), stats));
            }
            SOutcome::Fail { definitive: true } => {
                return Ok(ProveResult::Exhausted {
                    definitive: true,
                    rounds: round + 1,
                })
            }
            SOutcome::Fail { definitive: false } => continue,
            SOutcome::TimedOut => {
                return Ok(ProveResult::Timeout {
                    elapsed: start.elapsed(),
                })
            }
        }
    }
    Ok(ProveResult::Exhausted {
        definitive: false,
        rounds: n_rounds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    
    use crate::proof::{check_proof, CheckResult, ClosingKind, StepKind};
    use crate::tptp::{assemble_theory, parse_problem, AssembleOptions, MapResolver};

    fn setup(text: &str) -> (Theory, Vec<NamedFormula>) {
        let p = parse_problem(text, "t.p", &MapResolver(Default::default())).unwrap();
        assemble_theory(&p, &AssembleOptions::default()).unwrap()
    }

    fn setup_no_g1(text: &str) -> (Theory, Vec<NamedFormula>) {
        let p = parse_problem(text, "t.p", &MapResolver(Default::default())).unwrap();
        assemble_theory(
            &p,
            &AssembleOptions {
                add_equality_decidability: false,
                ..Default::default()
            },
        )
        .unwrap()
    }

    fn prove_one(theory: &Theory, conj: &NamedFormula) -> ProveResult {
        prove(theory, conj, &SearchLimits::default(), None).unwrap()
    }

    fn proved(theory: &Theory, conj: &NamedFormula) -> ProofTree {
        match prove_one(theory, conj) {
            ProveResult::Proved(tree, _) => {
                assert_eq!(
                    check_proof(theory, conj, &tree),
                    CheckResult::Ok,
                    "engine proof must pass the checker"
                );
                *tree
            }
            other => panic!("expected Proved, got {other:?}"),
        }
    }

    #[test]
    fn trivial_identity_closes_with_from_and_no_steps() {
        let (theory, conjs) = setup_no_g1("fof(g, conjecture, ![X]: (p(X) => p(X))).");
        let tree = proved(&theory, &conjs[0]);
        assert!(tree.steps.is_empty());
        assert!(matches!(tree.closing.kind, ClosingKind::From { .. }));
    }

    #[test]
    fn premise_free_conjecture_starts_empty() {
        let (theory, conjs) = setup_no_g1(
            "fof(a1, axiom, p(c)).\nfof(g, conjecture, p(c)).",
        );
        let tree = proved(&theory, &conjs[0]);
        assert_eq!(tree.steps.len(), 1, "one mp deriving p(c)");
    }

    #[test]
    fn matching_joins_premises_left_to_right() {
        // Facts p(a), p(b), q(b); the only instance of p(x)∧q(x)⇒r(x) is x→b.
        let (theory, conjs) = setup_no_g1(
            "fof(ax, axiom, ![X]: (p(X) & q(X) => r(X))).\n\
             fof(g, conjecture, (p(a) & p(b) & q(b)) => r(b)).",
        );
        let tree = proved(&theory, &conjs[0]);
        assert_eq!(tree.steps.len(), 1);
        match &tree.steps[0].kind {
            StepKind::ModusPonens { binding, .. } => {
                assert_eq!(binding.get("X").map(String::as_str), Some("b"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn split_example_from_disjunctive_axiom() {
        // ⊤⇒p(c)∨q(c); p(x)⇒r(x); q(x)⇒r(x) ⊢ r(c): one mp, a 2-way split,
        // each branch one mp then From.
        let (theory, conjs) = setup_no_g1(
            "fof(a1, axiom, p(c) | q(c)).\n\
             fof(a2, axiom, ![X]: (p(X) => r(X))).\n\
             fof(a3, axiom, ![X]: (q(X) => r(X))).\n\
             fof(g, conjecture, r(c)).",
        );
        let tree = proved(&theory, &conjs[0]);
        assert_eq!(tree.steps.len(), 1);
        match &tree.closing.kind {
            ClosingKind::CaseSplit { branches, disjunction } => {
                assert_eq!(branches.len(), 2);
                assert_eq!(disjunction.len(), 2);
                for b in branches {
                    assert_eq!(b.steps.len(), 1);
                    assert!(matches!(b.closing.kind, ClosingKind::From { .. }));
                }
            }
            other => panic!("expected split, got {other:?}"),
        }
    }

    #[test]
    fn witnesses_are_fresh_and_named_sequentially() {
        let (theory, conjs) = setup_no_g1(
            "fof(a1, axiom, ![X]: (p(X) => ?[Y]: q(X,Y))).\n\
             fof(a2, axiom, ![X,Y]: (q(X,Y) => r(X))).\n\
             fof(g, conjecture, ![A]: (p(A) => r(A))).",
        );
        let tree = proved(&theory, &conjs[0]);
        let witness_step = tree
            .steps
            .iter()
            .find_map(|s| match &s.kind {
                StepKind::ModusPonens { witnesses, .. } if !witnesses.is_empty() => {
                    Some(witnesses.clone())
                }
                _ => None,
            })
            .expect("a witness-introducing step");
        assert_eq!(witness_step, vec!["w1".to_string()]);
    }

    #[test]
    fn equality_rewrite_surfaces_as_substitution_step() {
        // Premises cong(A,D,A,B) and A = B; goal cong(A,D,A,A).
        let (theory, conjs) = setup_no_g1(
            "fof(g, conjecture, ![A,B,D]: (cong(A,D,A,B) & A = B => cong(A,D,A,A))).",
        );
        let tree = proved(&theory, &conjs[0]);
        assert_eq!(tree.steps.len(), 1);
        match &tree.steps[0].kind {
            StepKind::EqualitySubstitution { source, derived, .. } => {
                let names = |a: &crate::logic::Atom| -> Vec<String> {
                    a.args.iter().map(|t| t.name().to_string()).collect()
                };
                assert_eq!(names(source), ["A", "D", "A", "B"]);
                assert_eq!(names(derived), ["A", "D", "A", "A"]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn disequality_of_identified_constants_is_bottom() {
        let (theory, conjs) = setup_no_g1(
            "fof(g, conjecture, ![A,B]: (A != B & A = B => $false)).",
        );
        let tree = proved(&theory, &conjs[0]);
        assert!(matches!(tree.closing.kind, ClosingKind::Efq { .. }));
    }

    #[test]
    fn exhausted_is_definitive_on_saturated_theories() {
        let (theory, conjs) = setup_no_g1(
            "fof(a1, axiom, ![X]: (p(X) => q(X))).\nfof(g, conjecture, q(c) => p(c)).",
        );
        match prove_one(&theory, &conjs[0]) {
            ProveResult::Exhausted { definitive, .. } => assert!(definitive),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn th_4_19_proof_structure_matches_the_book_proof() {
        let text = "\
fof(th_3_1, axiom, ![A,B]: bet(A,B,B)).
fof(ax_4_10_3, axiom, ![A,B,C]: (bet(A,B,C) => col(C,A,B))).
fof(th_2_2, axiom, ![A,B,C,D]: (cong(A,B,C,D) => cong(C,D,A,B))).
fof(ax_3, axiom, ![A,B,C]: (cong(A,B,C,C) => A = B)).
fof(th_3_4, axiom, ![A,B,C]: (bet(A,B,C) & bet(B,A,C) => A = B)).
fof(th_4_18, axiom, ![A,B,C,D]: (A != B & col(A,B,C) & cong(A,C,A,D) & cong(B,C,B,D) => C = D)).
fof(th_4_19, conjecture, ![A,B,C,D]: (bet(A,B,C) & cong(A,B,A,D) & cong(C,B,C,D) => B = D)).
";
        let (theory, conjs) = setup(text);
        let tree = proved(&theory, &conjs[0]);

        // Top level: four steps closed by a split on A = B.
        let eq_pair = |c: &ClosingKind| -> Option<(String, String)> {
            if let ClosingKind::CaseSplit { disjunction, .. } = c {
                let a = &disjunction[0][0];
                Some((a.args[0].name().to_string(), a.args[1].name().to_string()))
            } else {
                None
            }
        };
        assert_eq!(eq_pair(&tree.closing.kind), Some(("A".into(), "B".into())));
        let ClosingKind::CaseSplit { branches, .. } = &tree.closing.kind else {
            unreachable!()
        };
        assert_eq!(branches.len(), 2);
        // Nested split on A = C inside the A ≠ B branch.
        assert_eq!(
            eq_pair(&branches[1].closing.kind),
            Some(("A".into(), "C".into()))
        );
        let ClosingKind::CaseSplit { branches: inner, .. } = &branches[1].closing.kind else {
            unreachable!()
        };
        assert!(matches!(inner[0].closing.kind, ClosingKind::Efq { .. }));
        assert!(matches!(inner[1].closing.kind, ClosingKind::From { .. }));

        // Shape: 4 top steps, 3 in the A = B branch, the nested
        // disjunction in the A ≠ B branch, then 3 and 2 in the leaves (the
        // A = C leaf carries one orientation step next to the book's two).
        assert_eq!(tree.steps.len(), 4);
        assert_eq!(branches[0].steps.len(), 3);
        assert_eq!(branches[1].steps.len(), 1);
        assert_eq!(inner[0].steps.len(), 3);
        assert_eq!(inner[1].steps.len(), 2);
        assert_eq!(tree.size(), 18);
    }

    #[test]
    fn canonical_forms_are_idempotent_after_merges() {
        // Premises chain three equalities; every live fact must already be
        // fully canonical (re-canonicalizing changes nothing).
        let (theory, conjs) = setup_no_g1(
            "fof(g, conjecture, ![A,B,C,D]: (p(D) & A = B & B = C & C = D => p(A))).",
        );
        let tree = proved(&theory, &conjs[0]);
        // The goal p(A) is reached by rewriting p(D) through the merges.
        let derived: Vec<String> = tree
            .steps
            .iter()
            .filter_map(|s| match &s.kind {
                StepKind::EqualitySubstitution { derived, .. } => {
                    Some(crate::logic::atom_to_string(derived, &theory.signature))
                }
                _ => None,
            })
            .collect();
        assert!(derived.iter().any(|d| d == "p(A)"), "{derived:?}");
    }

    #[test]
    fn proofs_are_deterministic() {
        let text = "\
fof(a1, axiom, ![X]: (p(X) => q(X) | r(X))).
fof(a2, axiom, ![X]: (q(X) => s(X))).
fof(a3, axiom, ![X]: (r(X) => s(X))).
fof(g, conjecture, p(c) => s(c)).
";
        let (theory, conjs) = setup_no_g1(text);
        let t1 = proved(&theory, &conjs[0]);
        let t2 = proved(&theory, &conjs[0]);
        assert_eq!(t1, t2);
    }
}
