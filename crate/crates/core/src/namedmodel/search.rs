//! Bounded search for named models.
//!
//! For each carrier size `n` the problem becomes a propositional formula:
//! every state `t` gets a fresh nominal `c_t`, each formula of interest gets
//! one variable per state, pure axioms are instantiated over the `c_t`, and
//! the original nominals get exactly-one placement variables. Kripke and
//! multigraph successor structure is encoded directly (multiplicities in
//! unary). For the other functors modal variables are left open and each
//! candidate assignment is checked state by state with the one-step solver;
//! a failing state contributes a blocking clause over its modal variables
//! and the non-empty cells of their arguments.

use std::collections::{BTreeMap, HashMap};

use varisat::{ExtendFormula, Lit, Solver};

use super::problem::NamedModelProblem;
use super::verify::verify_with_labels;
use crate::coalgebra::{Functor, HybridModel, Lifting, StateSet, TxElem, MAX_STATES};
use crate::error::{Error, Result};
use crate::onestep::{solve, Atom, BExpr, OneStepOutcome};
use crate::syntax::{fresh_nominals, substitute, Formula, Nominal, Substitution};

/// A model found by [`named_model_search`], with its designated state and
/// the truth value the encoding assigned to every formula it introduced at
/// every state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedModel {
    pub model: HybridModel,
    pub designated: usize,
    pub labels: Vec<BTreeMap<Formula, bool>>,
}

impl NamedModel {
    /// The ABox `{ @c phi | phi true in the label of the state named c }`
    /// over the state nominals.
    pub fn abox(&self) -> super::ABoxLabel {
        let mut k = super::ABoxLabel::default();
        for (c, label) in self.labels.iter().enumerate() {
            let c_name = Nominal::new(self.model.states[c].as_str());
            for (f, &v) in label {
                if v {
                    k.insert(Formula::at(c_name.clone(), f.clone())).expect("@-formula");
                }
            }
        }
        k
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[allow(clippy::large_enum_variant)]
pub enum SearchOutcome {
    Found(NamedModel),
    /// No model with at most `max_states` states exists.
    Exhausted,
}

impl SearchOutcome {
    pub fn model(&self) -> Option<&NamedModel> {
        match self {
            SearchOutcome::Found(m) => Some(m),
            SearchOutcome::Exhausted => None,
        }
    }
}

/// Looks for a named model of `prob` with `1..=max_states` states, smallest
/// first. The designated state is always state 0. Every model returned has
/// been re-checked by [`super::verify_with_labels`].
///
/// Errors with `ResourceBound` when `max_states` is zero, when the
/// multiplicity cap is below what a graded operator of the problem can
/// distinguish and no model was found, when a one-step problem could not
/// be decided within the bounds and no model was found, or when the number
/// of refinement rounds exceeds `max_nodes`.
pub fn named_model_search(prob: &NamedModelProblem) -> Result<SearchOutcome> {
    prob.validate()?;
    let bounds = prob.bounds;
    if bounds.max_states == 0 {
        return Err(Error::ResourceBound("no states allowed".into()));
    }
    let max_n = bounds.max_states.min(MAX_STATES);
    let need = multiplicity_needed(prob)?;
    let cap = match prob.functor {
        Functor::Multigraph => need.min(bounds.max_multiplicity).max(1),
        _ => 1,
    };
    let capped = prob.functor == Functor::Multigraph && cap < need;
    let mut undecided = false;
    for n in 1..=max_n {
        let (found, skipped) = Encoding::new(prob, n, cap)?.run()?;
        undecided |= skipped;
        if let Some(found) = found {
            let report = verify_with_labels(&found.model, found.designated, prob, Some(&found.labels));
            if !report.passed() {
                return Err(Error::Config(format!("internal: search produced a model that does not verify\n{report}")));
            }
            return Ok(SearchOutcome::Found(found));
        }
    }
    if capped {
        return Err(Error::ResourceBound(format!("multiplicities capped at {cap}, the problem distinguishes up to {need}")));
    }
    if undecided {
        return Err(Error::ResourceBound("some one-step problems were beyond the search bounds".into()));
    }
    Ok(SearchOutcome::Exhausted)
}

/// Largest multiplicity a counting operator of the problem can tell apart
/// from larger ones.
fn multiplicity_needed(prob: &NamedModelProblem) -> Result<u64> {
    let mut need = 1u64;
    for f in prob.axioms.iter().chain(&prob.tbox).chain(&prob.goal) {
        for op in f.operators() {
            match Lifting::new(&prob.functor, &op)? {
                Lifting::KripkeGraded(k) | Lifting::MultGraded(k) => need = need.max(k + 1),
                Lifting::KripkePresburger(_, k) | Lifting::MultPresburger(_, k) => need = need.max(k),
                _ => {}
            }
        }
    }
    Ok(need)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum L {
    Const(bool),
    Var(Lit),
}

impl std::ops::Not for L {
    type Output = L;
    fn not(self) -> L {
        match self {
            L::Const(b) => L::Const(!b),
            L::Var(l) => L::Var(!l),
        }
    }
}

struct ModalVar {
    lift: Lifting,
    args: Vec<Vec<L>>,
    var: L,
}

struct Encoding<'p> {
    prob: &'p NamedModelProblem,
    sat: Solver<'static>,
    n: usize,
    eager: bool,
    state_noms: Vec<Nominal>,
    state_of: HashMap<Nominal, usize>,
    placement: BTreeMap<Nominal, Vec<L>>,
    memo: HashMap<(Formula, usize), L>,
    labels: Vec<Vec<(Formula, L)>>,
    modal: Vec<Vec<ModalVar>>,
    // units[s][t][c]: at least c+1 edges from s to t
    units: Vec<Vec<Vec<L>>>,
    gates: HashMap<Vec<L>, L>,
    // some state was excluded without a one-step verdict
    undecided: std::cell::Cell<bool>,
}

impl<'p> Encoding<'p> {
    fn new(prob: &'p NamedModelProblem, n: usize, cap: u64) -> Result<Self> {
        let eager = matches!(prob.functor, Functor::Kripke | Functor::Multigraph);
        let state_noms = fresh_nominals(&prob.all_nominals(), n);
        let state_of = state_noms.iter().cloned().enumerate().map(|(t, c)| (c, t)).collect();
        let mut enc = Encoding {
            prob,
            sat: Solver::new(),
            n,
            eager,
            state_noms,
            state_of,
            placement: BTreeMap::new(),
            memo: HashMap::new(),
            labels: vec![Vec::new(); n],
            modal: (0..n).map(|_| Vec::new()).collect(),
            units: Vec::new(),
            gates: HashMap::new(),
            undecided: std::cell::Cell::new(false),
        };
        if eager {
            for _s in 0..n {
                let mut row = Vec::with_capacity(n);
                for _t in 0..n {
                    let us: Vec<L> = (0..cap).map(|_| L::Var(enc.sat.new_lit())).collect();
                    for w in us.windows(2) {
                        enc.clause(&[!w[1], w[0]]);
                    }
                    row.push(us);
                }
                enc.units.push(row);
            }
        }
        for i in prob.nominals() {
            let places: Vec<L> = (0..n).map(|_| L::Var(enc.sat.new_lit())).collect();
            enc.clause(&places);
            for a in 0..n {
                for b in a + 1..n {
                    enc.clause(&[!places[a], !places[b]]);
                }
            }
            enc.placement.insert(i, places);
        }
        enc.assert_problem()?;
        Ok(enc)
    }

    fn assert_problem(&mut self) -> Result<()> {
        let prob = self.prob;
        let n = self.n;
        for f in &prob.goal {
            let l = self.lit(f, 0)?;
            self.clause(&[l]);
        }
        for f in &prob.tbox {
            for s in 0..n {
                let l = self.lit(f, s)?;
                self.clause(&[l]);
            }
        }
        for a in &prob.axioms {
            let noms: Vec<Nominal> = a.free_nominals().into_iter().collect();
            let count = (n as u128).saturating_pow(noms.len() as u32 + 1);
            if count > prob.bounds.max_nodes as u128 {
                return Err(Error::ResourceBound(format!("{count} instances of axiom `{a}` over {n} states")));
            }
            let mut digits = vec![0usize; noms.len()];
            loop {
                let mut sigma = Substitution::new();
                for (i, &d) in noms.iter().zip(&digits) {
                    sigma = sigma.with_nom(i.clone(), self.state_noms[d].clone());
                }
                let inst = substitute(a, &sigma);
                for s in 0..n {
                    let l = self.lit(&inst, s)?;
                    self.clause(&[l]);
                }
                if !advance(&mut digits, n) {
                    break;
                }
            }
        }
        Ok(())
    }

    fn clause(&mut self, lits: &[L]) {
        let mut out = Vec::with_capacity(lits.len());
        for l in lits {
            match l {
                L::Const(true) => return,
                L::Const(false) => {}
                L::Var(v) => out.push(*v),
            }
        }
        self.sat.add_clause(&out);
    }

    fn and(&mut self, xs: &[L]) -> L {
        let mut ins = Vec::with_capacity(xs.len());
        for &x in xs {
            match x {
                L::Const(false) => return L::Const(false),
                L::Const(true) => {}
                v => ins.push(v),
            }
        }
        ins.sort_by_key(|l| match l {
            L::Var(v) => v.code(),
            L::Const(_) => 0,
        });
        ins.dedup();
        match ins.len() {
            0 => return L::Const(true),
            1 => return ins[0],
            _ => {}
        }
        if let Some(&g) = self.gates.get(&ins) {
            return g;
        }
        let g = L::Var(self.sat.new_lit());
        let mut back = vec![g];
        for &x in &ins {
            self.clause(&[!g, x]);
            back.push(!x);
        }
        self.clause(&back);
        self.gates.insert(ins, g);
        g
    }

    fn or(&mut self, xs: &[L]) -> L {
        let negated: Vec<L> = xs.iter().map(|&x| !x).collect();
        !self.and(&negated)
    }

    /// At least `k` of `ws` hold, by a sequential counter.
    fn at_least(&mut self, k: u64, ws: &[L]) -> L {
        let mut k = k as usize;
        let mut open = Vec::new();
        for &w in ws {
            match w {
                L::Const(true) => k = k.saturating_sub(1),
                L::Const(false) => {}
                v => open.push(v),
            }
        }
        if k == 0 {
            return L::Const(true);
        }
        if open.len() < k {
            return L::Const(false);
        }
        if k == 1 {
            return self.or(&open);
        }
        // prev[j]: at least j of the inputs seen so far hold
        let mut prev = vec![L::Const(false); k + 1];
        prev[0] = L::Const(true);
        for w in open {
            let mut cur = prev.clone();
            for j in 1..=k {
                let step = self.and(&[prev[j - 1], w]);
                cur[j] = self.or(&[prev[j], step]);
            }
            prev = cur;
        }
        prev[k]
    }

    fn lit(&mut self, f: &Formula, s: usize) -> Result<L> {
        let key = (f.alpha_normal(), s);
        if let Some(&l) = self.memo.get(&key) {
            return Ok(l);
        }
        let l = match f {
            Formula::Top => L::Const(true),
            Formula::Prop(_) => L::Var(self.sat.new_lit()),
            Formula::Nom(i) => self.nominal_at(i, s)?,
            Formula::Not(a) => !self.lit(a, s)?,
            Formula::And(a, b) => {
                let x = self.lit(a, s)?;
                let y = self.lit(b, s)?;
                self.and(&[x, y])
            }
            Formula::At(i, a) => {
                if let Some(&t) = self.state_of.get(i) {
                    self.lit(a, t)?
                } else {
                    let mut options = Vec::with_capacity(self.n);
                    for t in 0..self.n {
                        let here = self.nominal_at(i, t)?;
                        let body = self.lit(a, t)?;
                        options.push(self.and(&[here, body]));
                    }
                    self.or(&options)
                }
            }
            Formula::Down(j, a) => {
                let body = substitute(a, &Substitution::rename(j.clone(), self.state_noms[s].clone()));
                self.lit(&body, s)?
            }
            Formula::Modal(op, args) => self.modal_lit(op, args, s)?,
        };
        self.memo.insert(key, l);
        self.labels[s].push((f.clone(), l));
        Ok(l)
    }

    fn nominal_at(&self, i: &Nominal, s: usize) -> Result<L> {
        if let Some(&t) = self.state_of.get(i) {
            return Ok(L::Const(t == s));
        }
        self.placement.get(i).map(|p| p[s]).ok_or_else(|| Error::UnboundNominal(i.clone()))
    }

    fn modal_lit(&mut self, op: &str, args: &[Formula], s: usize) -> Result<L> {
        let lift = Lifting::new(&self.prob.functor, op)?;
        let mut argl = Vec::with_capacity(args.len());
        for a in args {
            let mut row = Vec::with_capacity(self.n);
            for t in 0..self.n {
                row.push(self.lit(a, t)?);
            }
            argl.push(row);
        }
        if !self.eager {
            let var = L::Var(self.sat.new_lit());
            self.modal[s].push(ModalVar { lift, args: argl, var });
            return Ok(var);
        }
        let n = self.n;
        Ok(match &lift {
            Lifting::KripkeBox | Lifting::MultBox => {
                let mut escapes = Vec::with_capacity(n);
                for t in 0..n {
                    let edge = self.units[s][t][0];
                    escapes.push(self.and(&[edge, !argl[0][t]]));
                }
                !self.or(&escapes)
            }
            Lifting::KripkeGraded(k) | Lifting::MultGraded(k) => {
                let ws = self.weighted(s, &[1], &argl);
                self.at_least(k + 1, &ws)
            }
            Lifting::KripkePresburger(cs, k) | Lifting::MultPresburger(cs, k) => {
                let ws = self.weighted(s, cs, &argl);
                self.at_least(*k, &ws)
            }
            other => unreachable!("{other:?} over an eager functor"),
        })
    }

    /// One input per unit edge into each argument, repeated by coefficient.
    fn weighted(&mut self, s: usize, coeffs: &[u64], argl: &[Vec<L>]) -> Vec<L> {
        let mut ws = Vec::new();
        for (r, &c) in coeffs.iter().enumerate() {
            for t in 0..self.n {
                for u in 0..self.units[s][t].len() {
                    let w = self.and(&[self.units[s][t][u], argl[r][t]]);
                    for _ in 0..c {
                        ws.push(w);
                    }
                }
            }
        }
        ws
    }

    /// A model, or `None` together with whether some candidate was skipped
    /// because the one-step solver ran out of resources.
    fn run(mut self) -> Result<(Option<NamedModel>, bool)> {
        let mut rounds = 0u64;
        loop {
            if !self.sat.solve().map_err(|e| Error::Config(format!("SAT solver: {e}")))? {
                return Ok((None, self.undecided.get()));
            }
            let model = self.sat.model().expect("satisfiable");
            let mut vals = vec![false; model.iter().map(|l| l.index() + 1).max().unwrap_or(0)];
            for l in &model {
                vals[l.index()] = l.is_positive();
            }
            let val = |l: L| match l {
                L::Const(b) => b,
                L::Var(v) => vals.get(v.index()).copied().unwrap_or(false) ^ v.is_negative(),
            };
            let gamma = if self.eager {
                self.read_edges(&val)
            } else {
                match self.theory_check(&val)? {
                    Ok(gamma) => gamma,
                    Err((s, keep)) => {
                        let blocking = self.blocking_clause(s, &keep, &val);
                        self.clause(&blocking);
                        rounds += 1;
                        if rounds > self.prob.bounds.max_nodes {
                            return Err(Error::ResourceBound(format!("more than {rounds} refinement rounds")));
                        }
                        continue;
                    }
                }
            };
            return Ok((Some(self.build(gamma, &val)), false));
        }
    }

    fn read_edges(&self, val: &impl Fn(L) -> bool) -> Vec<TxElem> {
        (0..self.n)
            .map(|s| match self.prob.functor {
                Functor::Kripke => TxElem::Set(StateSet::from_states((0..self.n).filter(|&t| val(self.units[s][t][0])))),
                _ => TxElem::Mult((0..self.n).map(|t| self.units[s][t].iter().filter(|&&u| val(u)).count() as u64).collect()),
            })
            .collect()
    }

    /// One-step witnesses for every state, or a state and a set of its
    /// modal variables whose current values have no witness.
    fn theory_check(&self, val: &impl Fn(L) -> bool) -> Result<std::result::Result<Vec<TxElem>, (usize, Vec<usize>)>> {
        let mut gamma = Vec::with_capacity(self.n);
        for s in 0..self.n {
            let vars = &self.modal[s];
            let all: Vec<usize> = (0..vars.len()).collect();
            match self.one_step(vars, &all, val) {
                Ok(OneStepOutcome::Sat(t)) => gamma.push(t),
                Err(e) if e.is_resource_bound() => {
                    self.undecided.set(true);
                    return Ok(Err((s, all)));
                }
                Err(e) => return Err(e),
                Ok(OneStepOutcome::Unsat) => {
                    // drop literals while the rest stays inconsistent
                    let mut keep = all;
                    let mut i = 0;
                    while i < keep.len() {
                        let mut trial = keep.clone();
                        trial.remove(i);
                        match self.one_step(vars, &trial, val) {
                            Ok(OneStepOutcome::Unsat) => keep = trial,
                            _ => i += 1,
                        }
                    }
                    return Ok(Err((s, keep)));
                }
            }
        }
        Ok(Ok(gamma))
    }

    /// Clause excluding the current values of the chosen modal variables at
    /// `s` together with the current pattern of non-empty cells of their
    /// arguments. By naturality of the liftings, one-step satisfiability
    /// only depends on that pattern, so the clause is valid for every
    /// assignment.
    fn blocking_clause(&mut self, s: usize, keep: &[usize], val: &impl Fn(L) -> bool) -> Vec<L> {
        let mut out = Vec::new();
        let mut rows: Vec<Vec<L>> = Vec::new();
        for &k in keep {
            let mv = &self.modal[s][k];
            out.push(if val(mv.var) { !mv.var } else { mv.var });
            for row in &mv.args {
                if !rows.contains(row) {
                    rows.push(row.clone());
                }
            }
        }
        if rows.len() > 10 {
            for row in rows {
                for b in row {
                    out.push(if val(b) { !b } else { b });
                }
            }
            return out;
        }
        for pattern in 0u32..(1 << rows.len()) {
            let inside = |r: usize| pattern & (1 << r) != 0;
            let nonempty_now = (0..self.n).any(|t| rows.iter().enumerate().all(|(r, row)| val(row[t]) == inside(r)));
            let mut members = Vec::with_capacity(self.n);
            for t in 0..self.n {
                let lits: Vec<L> = rows.iter().enumerate().map(|(r, row)| if inside(r) { row[t] } else { !row[t] }).collect();
                members.push(self.and(&lits));
            }
            let nonempty = self.or(&members);
            out.push(if nonempty_now { !nonempty } else { nonempty });
        }
        out
    }

    fn one_step(&self, vars: &[ModalVar], which: &[usize], val: &impl Fn(L) -> bool) -> Result<OneStepOutcome> {
        let mut atoms = Vec::with_capacity(which.len());
        let mut parts = Vec::with_capacity(which.len());
        for (idx, &k) in which.iter().enumerate() {
            let mv = &vars[k];
            let args = mv
                .args
                .iter()
                .map(|row| StateSet::from_states((0..self.n).filter(|&t| val(row[t]))))
                .collect();
            atoms.push(Atom { lift: mv.lift.clone(), args });
            let a = BExpr::Atom(idx);
            parts.push(if val(mv.var) { a } else { BExpr::Not(Box::new(a)) });
        }
        solve(&self.prob.functor, self.n, &atoms, &BExpr::And(parts), &self.prob.bounds)
    }

    fn build(&self, gamma: Vec<TxElem>, val: &impl Fn(L) -> bool) -> NamedModel {
        let mut m = HybridModel::new(self.prob.functor.clone(), self.state_noms.iter().map(|c| c.name().to_string()).collect());
        for (s, t) in gamma.into_iter().enumerate() {
            m.set_gamma(s, t);
        }
        let mut props: BTreeMap<String, StateSet> = self.prob.props().into_iter().map(|p| (p, StateSet::empty())).collect();
        for (s, label) in self.labels.iter().enumerate() {
            for (f, l) in label {
                if let Formula::Prop(p) = f {
                    if val(*l) {
                        let e = props.entry(p.clone()).or_default();
                        *e = e.with(s);
                    }
                }
            }
        }
        m.props = props;
        for (t, c) in self.state_noms.iter().enumerate() {
            m.set_nominal(c.clone(), t);
        }
        for (i, places) in &self.placement {
            let t = places.iter().position(|&p| val(p)).expect("exactly one placement");
            m.set_nominal(i.clone(), t);
        }
        let labels = self
            .labels
            .iter()
            .map(|label| label.iter().map(|(f, l)| (f.clone(), val(*l))).collect::<BTreeMap<_, _>>())
            .collect();
        NamedModel { model: m, designated: 0, labels }
    }
}

fn advance(digits: &mut [usize], base: usize) -> bool {
    for d in digits.iter_mut() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}
