use std::collections::{BTreeMap, HashMap};

use super::functor::{Functor, Lifting, TxElem};
use super::stateset::{StateSet, MAX_STATES};
use crate::error::{Error, Result};
use crate::syntax::{Formula, Nominal};

/// A finite hybrid `T`-model `(C, gamma, V)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HybridModel {
    pub functor: Functor,
    pub states: Vec<String>,
    pub gamma: Vec<TxElem>,
    pub props: BTreeMap<String, StateSet>,
    pub noms: BTreeMap<Nominal, usize>,
}

impl HybridModel {
    /// A model with the given state names, every `gamma(c)` set to
    /// [`TxElem::empty`] and an empty valuation.
    pub fn new(functor: Functor, states: Vec<String>) -> Self {
        assert!(states.len() <= MAX_STATES, "at most {MAX_STATES} states are supported");
        let gamma = vec![TxElem::empty(&functor, states.len()); states.len()];
        HybridModel { functor, states, gamma, props: BTreeMap::new(), noms: BTreeMap::new() }
    }

    /// States named `s0, s1, ...`.
    pub fn with_size(functor: Functor, n: usize) -> Self {
        HybridModel::new(functor, (0..n).map(|i| format!("s{i}")).collect())
    }

    pub fn n(&self) -> usize {
        self.states.len()
    }

    pub fn all(&self) -> StateSet {
        StateSet::full(self.n())
    }

    pub fn set_gamma(&mut self, c: usize, t: TxElem) {
        self.gamma[c] = t;
    }

    pub fn set_prop(&mut self, p: impl Into<String>, s: StateSet) {
        self.props.insert(p.into(), s);
    }

    pub fn set_nominal(&mut self, i: impl Into<Nominal>, c: usize) {
        self.noms.insert(i.into(), c);
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    /// Every state is the value of some nominal.
    pub fn is_named(&self) -> bool {
        let named = StateSet::from_states(self.noms.values().copied());
        named == self.all()
    }

    /// Checks the structural invariants: `gamma` total and well-typed,
    /// valuation within the carrier.
    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        if self.gamma.len() != n {
            return Err(Error::Config("gamma must be defined on every state".into()));
        }
        for (c, t) in self.gamma.iter().enumerate() {
            t.validate(&self.functor, n).map_err(|m| Error::Config(format!("state {}: {m}", self.states[c])))?;
        }
        for (p, s) in &self.props {
            if !s.is_subset(self.all()) {
                return Err(Error::Config(format!("valuation of {p} out of range")));
            }
        }
        for (i, &c) in &self.noms {
            if c >= n {
                return Err(Error::Config(format!("nominal {i} denotes no state")));
            }
        }
        Ok(())
    }

    pub fn truth_set(&self, f: &Formula) -> Result<StateSet> {
        Eval::new(self).truth(f)
    }

    /// Truth set with some nominals reassigned.
    pub fn truth_set_under(&self, f: &Formula, assignment: &BTreeMap<Nominal, usize>) -> Result<StateSet> {
        let mut ev = Eval::new(self);
        ev.env.extend(assignment.iter().map(|(i, &c)| (i.clone(), c)));
        ev.truth(f)
    }

    pub fn satisfies(&self, c: usize, f: &Formula) -> Result<bool> {
        Ok(self.truth_set(f)?.contains(c))
    }

    pub fn satisfies_globally<'a>(&self, fs: impl IntoIterator<Item = &'a Formula>) -> Result<bool> {
        Ok(self.global_failure(fs)?.is_none())
    }

    /// First formula (by position) and state where a global assumption fails.
    pub fn global_failure<'a>(&self, fs: impl IntoIterator<Item = &'a Formula>) -> Result<Option<(usize, usize)>> {
        let mut ev = Eval::new(self);
        for (k, f) in fs.into_iter().enumerate() {
            let missing = self.all().minus(ev.truth(f)?);
            if let Some(c) = missing.first() {
                return Ok(Some((k, c)));
            }
        }
        Ok(None)
    }
}

/// Free functions mirroring the model methods.
pub fn satisfies(m: &HybridModel, c: usize, f: &Formula) -> Result<bool> {
    m.satisfies(c, f)
}

pub fn truth_set(m: &HybridModel, f: &Formula) -> Result<StateSet> {
    m.truth_set(f)
}

pub fn model_satisfies_globally(m: &HybridModel, fs: &[Formula]) -> Result<bool> {
    m.satisfies_globally(fs)
}

struct Eval<'m> {
    m: &'m HybridModel,
    lifts: HashMap<String, Lifting>,
    env: Vec<(Nominal, usize)>,
}

impl<'m> Eval<'m> {
    fn new(m: &'m HybridModel) -> Self {
        Eval { m, lifts: HashMap::new(), env: Vec::new() }
    }

    fn nominal(&self, i: &Nominal) -> Result<usize> {
        if let Some((_, c)) = self.env.iter().rev().find(|(j, _)| j == i) {
            return Ok(*c);
        }
        self.m.noms.get(i).copied().ok_or_else(|| Error::UnboundNominal(i.clone()))
    }

    fn truth(&mut self, f: &Formula) -> Result<StateSet> {
        let all = self.m.all();
        Ok(match f {
            Formula::Top => all,
            Formula::Prop(p) => self.m.props.get(p).copied().unwrap_or_default(),
            Formula::Nom(i) => StateSet::singleton(self.nominal(i)?),
            Formula::Not(a) => self.truth(a)?.complement(self.m.n()),
            Formula::And(a, b) => self.truth(a)?.inter(self.truth(b)?),
            Formula::At(i, a) => {
                let c = self.nominal(i)?;
                if self.truth(a)?.contains(c) {
                    all
                } else {
                    StateSet::empty()
                }
            }
            Formula::Down(x, a) => {
                let mut out = StateSet::empty();
                for c in 0..self.m.n() {
                    self.env.push((x.clone(), c));
                    let t = self.truth(a);
                    self.env.pop();
                    if t?.contains(c) {
                        out = out.with(c);
                    }
                }
                out
            }
            Formula::Modal(op, args) => {
                if !self.lifts.contains_key(op) {
                    let l = Lifting::new(&self.m.functor, op)?;
                    self.lifts.insert(op.clone(), l);
                }
                let mut sets = Vec::with_capacity(args.len());
                for a in args {
                    sets.push(self.truth(a)?);
                }
                let lift = &self.lifts[op];
                if lift.arity() != sets.len() {
                    return Err(Error::Config(format!("operator `{op}` applied to {} arguments", sets.len())));
                }
                let n = self.m.n();
                StateSet::from_states((0..n).filter(|&c| lift.member(&self.m.gamma[c], &sets, n)))
            }
        })
    }
}

/// Witness that a frame does not validate a pure axiom.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrameCounterexample {
    pub axiom: usize,
    pub assignment: BTreeMap<Nominal, usize>,
    pub state: usize,
}

/// Checks the frame `(C, gamma)` of `frame` against pure axioms, quantifying
/// over all assignments of each axiom's free nominals. The valuation stored
/// in `frame` is ignored.
pub fn frame_check(frame: &HybridModel, axioms: &[Formula]) -> Result<Option<FrameCounterexample>> {
    for a in axioms {
        if !a.is_pure() {
            return Err(Error::NotPure(a.clone()));
        }
    }
    let mut bare = frame.clone();
    bare.props.clear();
    bare.noms.clear();
    let n = bare.n();
    for (k, a) in axioms.iter().enumerate() {
        let noms: Vec<Nominal> = a.free_nominals().into_iter().collect();
        if n == 0 {
            continue;
        }
        let mut digits = vec![0usize; noms.len()];
        loop {
            let assignment: BTreeMap<Nominal, usize> = noms.iter().cloned().zip(digits.iter().copied()).collect();
            let t = bare.truth_set_under(a, &assignment)?;
            if let Some(state) = bare.all().minus(t).first() {
                return Ok(Some(FrameCounterexample { axiom: k, assignment, state }));
            }
            let mut i = 0;
            while i < digits.len() {
                digits[i] += 1;
                if digits[i] < n {
                    break;
                }
                digits[i] = 0;
                i += 1;
            }
            if i == digits.len() {
                break;
            }
        }
    }
    Ok(None)
}

pub fn frame_satisfies_pure(frame: &HybridModel, axioms: &[Formula]) -> Result<bool> {
    Ok(frame_check(frame, axioms)?.is_none())
}

/// The multigraph with 0/1 multiplicities given by the Kripke relation.
pub fn kripke_to_multigraph(m: &HybridModel) -> Result<HybridModel> {
    if m.functor != Functor::Kripke {
        return Err(Error::Config(format!("expected a Kripke model, got {}", m.functor)));
    }
    let n = m.n();
    let gamma = m
        .gamma
        .iter()
        .map(|t| match t {
            TxElem::Set(s) => TxElem::Mult((0..n).map(|x| s.contains(x) as u64).collect()),
            other => unreachable!("validated Kripke model holds {other:?}"),
        })
        .collect();
    Ok(HybridModel { functor: Functor::Multigraph, gamma, ..m.clone() })
}
