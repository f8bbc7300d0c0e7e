//! Search for an element of `TX` satisfying a boolean constraint over
//! lifting atoms.

use std::collections::{BTreeMap, HashMap};

use crate::coalgebra::{upward_closure, Functor, GameElem, Lifting, SearchBounds, Selection, StateSet, TxElem};
use crate::error::{Error, Result};
use crate::prop;
use crate::syntax::Formula;

/// `lift(args)` as a predicate on `TX`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Atom {
    pub lift: Lifting,
    pub args: Vec<StateSet>,
}

/// Boolean combination of atoms (by index).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BExpr {
    Const(bool),
    Atom(usize),
    Not(Box<BExpr>),
    And(Vec<BExpr>),
    Or(Vec<BExpr>),
}

impl BExpr {
    pub fn eval3(&self, atoms: &[Option<bool>]) -> Option<bool> {
        match self {
            BExpr::Const(b) => Some(*b),
            BExpr::Atom(i) => atoms[*i],
            BExpr::Not(a) => a.eval3(atoms).map(|b| !b),
            BExpr::And(xs) => {
                let mut unknown = false;
                for x in xs {
                    match x.eval3(atoms) {
                        Some(false) => return Some(false),
                        None => unknown = true,
                        Some(true) => {}
                    }
                }
                (!unknown).then_some(true)
            }
            BExpr::Or(xs) => {
                let mut unknown = false;
                for x in xs {
                    match x.eval3(atoms) {
                        Some(true) => return Some(true),
                        None => unknown = true,
                        Some(false) => {}
                    }
                }
                (!unknown).then_some(false)
            }
        }
    }

    fn to_formula(&self) -> Formula {
        match self {
            BExpr::Const(true) => Formula::top(),
            BExpr::Const(false) => Formula::bot(),
            BExpr::Atom(i) => Formula::prop(format!("x{i}")),
            BExpr::Not(a) => Formula::not(a.to_formula()),
            BExpr::And(xs) => Formula::conj(xs.iter().map(BExpr::to_formula)),
            BExpr::Or(xs) => Formula::disj(xs.iter().map(BExpr::to_formula)),
        }
    }
}

/// Interns atoms while translating constraints.
#[derive(Default)]
pub struct AtomTable {
    pub atoms: Vec<Atom>,
    index: HashMap<Atom, usize>,
}

impl AtomTable {
    pub fn intern(&mut self, a: Atom) -> usize {
        if let Some(&i) = self.index.get(&a) {
            return i;
        }
        self.atoms.push(a.clone());
        self.index.insert(a, self.atoms.len() - 1);
        self.atoms.len() - 1
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OneStepOutcome {
    Sat(TxElem),
    Unsat,
}

impl OneStepOutcome {
    pub fn is_sat(&self) -> bool {
        matches!(self, OneStepOutcome::Sat(_))
    }

    pub fn witness(&self) -> Option<&TxElem> {
        match self {
            OneStepOutcome::Sat(t) => Some(t),
            OneStepOutcome::Unsat => None,
        }
    }
}

/// Finds `t` in `T{0..n-1}` with `constraint` true when each atom is read as
/// `t in lift(args)`. Unsat is only reported when the search space is
/// complete for the constraint; otherwise exhaustion is a `ResourceBound`.
pub fn solve(functor: &Functor, n: usize, atoms: &[Atom], constraint: &BExpr, bounds: &SearchBounds) -> Result<OneStepOutcome> {
    if !prop::is_satisfiable([&constraint.to_formula()]) {
        return Ok(OneStepOutcome::Unsat);
    }
    let found = match functor {
        Functor::Kripke | Functor::Multigraph => counting(functor, n, atoms, constraint, bounds)?,
        Functor::Neighborhood | Functor::Monotone => neighbourhood(functor, n, atoms, constraint, bounds)?,
        Functor::Selection => selection(n, atoms, constraint, bounds)?,
        Functor::Game { agents } => game(agents.len(), n, atoms, constraint, bounds)?,
    };
    match found {
        Some(t) => {
            let vals: Vec<Option<bool>> = atoms.iter().map(|a| Some(a.lift.member(&t, &a.args, n))).collect();
            if constraint.eval3(&vals) != Some(true) || t.validate(functor, n).is_err() {
                return Err(Error::Config(format!("internal: one-step witness {t:?} does not verify")));
            }
            Ok(OneStepOutcome::Sat(t))
        }
        None => Ok(OneStepOutcome::Unsat),
    }
}

/// Depth-first search over coordinates with finite domains, pruning with
/// three-valued evaluation of the constraint.
struct Search<'a> {
    domains: Vec<usize>,
    atom_eval: &'a dyn Fn(usize, &[Option<usize>]) -> Option<bool>,
    natoms: usize,
    constraint: &'a BExpr,
    compatible: &'a dyn Fn(&[Option<usize>], usize) -> bool,
    nodes: u64,
    budget: u64,
}

impl Search<'_> {
    fn run(&mut self, assign: &mut Vec<Option<usize>>, i: usize) -> Result<bool> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::ResourceBound(format!("one-step search exceeded {} nodes", self.budget)));
        }
        let vals: Vec<Option<bool>> = (0..self.natoms).map(|a| (self.atom_eval)(a, assign)).collect();
        match self.constraint.eval3(&vals) {
            Some(false) => return Ok(false),
            Some(true) => return Ok(true),
            None => {}
        }
        if i == self.domains.len() {
            return Ok(false);
        }
        for v in 0..self.domains[i] {
            assign[i] = Some(v);
            if (self.compatible)(assign, i) && self.run(assign, i + 1)? {
                return Ok(true);
            }
        }
        assign[i] = None;
        Ok(false)
    }

    /// Runs the search; unassigned coordinates of a solution default to 0.
    fn solve(mut self) -> Result<Option<Vec<usize>>> {
        let mut assign = vec![None; self.domains.len()];
        if self.run(&mut assign, 0)? {
            Ok(Some(assign.into_iter().map(|v| v.unwrap_or(0)).collect()))
        } else {
            Ok(None)
        }
    }
}

/// Partition of `{0..n-1}` by membership in each of `sets`.
fn cells(n: usize, sets: impl IntoIterator<Item = StateSet>) -> Vec<StateSet> {
    let mut parts = vec![StateSet::full(n)];
    for s in sets {
        parts = parts.into_iter().flat_map(|p| [p.inter(s), p.minus(s)]).filter(|p| !p.is_empty()).collect();
    }
    parts
}

/// Linear threshold atom `(sum w_c * count_c >= threshold) xor negate`.
struct Linear {
    weights: Vec<(usize, u64)>,
    threshold: u64,
    negate: bool,
}

fn counting(functor: &Functor, n: usize, atoms: &[Atom], constraint: &BExpr, bounds: &SearchBounds) -> Result<Option<TxElem>> {
    let parts = cells(n, atoms.iter().flat_map(|a| a.args.iter().copied()));
    let weight = |a: StateSet| -> Vec<(usize, u64)> {
        parts.iter().enumerate().filter(|(_, c)| c.is_subset(a)).map(|(i, _)| (i, 1)).collect()
    };
    let mut lin = Vec::new();
    let mut need = 1u64;
    for a in atoms {
        let l = match &a.lift {
            Lifting::KripkeBox | Lifting::MultBox => Linear {
                weights: parts.iter().enumerate().filter(|(_, c)| !c.is_subset(a.args[0])).map(|(i, _)| (i, 1)).collect(),
                threshold: 1,
                negate: true,
            },
            Lifting::KripkeGraded(k) | Lifting::MultGraded(k) => {
                Linear { weights: weight(a.args[0]), threshold: k + 1, negate: false }
            }
            Lifting::KripkePresburger(cs, k) | Lifting::MultPresburger(cs, k) => {
                let mut w = vec![0u64; parts.len()];
                for (c, arg) in cs.iter().zip(&a.args) {
                    for (i, _) in weight(*arg) {
                        w[i] += c;
                    }
                }
                Linear { weights: w.into_iter().enumerate().filter(|(_, x)| *x > 0).collect(), threshold: *k, negate: false }
            }
            other => return Err(Error::Config(format!("lifting {other:?} used with {functor}"))),
        };
        need = need.max(l.threshold);
        lin.push(l);
    }
    let mut complete = true;
    let domains: Vec<usize> = parts
        .iter()
        .map(|c| {
            let room = match functor {
                Functor::Kripke => c.len() as u64,
                _ => (c.len() as u64).saturating_mul(bounds.max_multiplicity),
            };
            if room < need && *functor == Functor::Multigraph {
                complete = false;
            }
            room.min(need) as usize + 1
        })
        .collect();
    let eval = |ai: usize, assign: &[Option<usize>]| -> Option<bool> {
        let l = &lin[ai];
        let mut lo = 0u64;
        let mut hi = 0u64;
        for &(c, w) in &l.weights {
            match assign[c] {
                Some(v) => {
                    lo += w * v as u64;
                    hi += w * v as u64;
                }
                None => hi += w * (domains[c] as u64 - 1),
            }
        }
        if lo >= l.threshold {
            Some(!l.negate)
        } else if hi < l.threshold {
            Some(l.negate)
        } else {
            None
        }
    };
    let search = Search {
        domains: domains.clone(),
        atom_eval: &eval,
        natoms: atoms.len(),
        constraint,
        compatible: &|_, _| true,
        nodes: 0,
        budget: bounds.max_nodes,
    };
    let Some(counts) = search.solve()? else {
        if complete {
            return Ok(None);
        }
        return Err(Error::ResourceBound(format!(
            "multiplicity cap {} too small for grade {need}",
            bounds.max_multiplicity
        )));
    };
    Ok(Some(match functor {
        Functor::Kripke => {
            let mut t = StateSet::empty();
            for (c, &k) in parts.iter().zip(&counts) {
                for x in c.iter().take(k) {
                    t = t.with(x);
                }
            }
            TxElem::Set(t)
        }
        _ => {
            let mut m = vec![0u64; n];
            for (c, &k) in parts.iter().zip(&counts) {
                let mut left = k as u64;
                for x in c.iter() {
                    let put = left.min(bounds.max_multiplicity);
                    m[x] = put;
                    left -= put;
                }
            }
            TxElem::Mult(m)
        }
    }))
}

fn neighbourhood(functor: &Functor, n: usize, atoms: &[Atom], constraint: &BExpr, bounds: &SearchBounds) -> Result<Option<TxElem>> {
    // coordinate = membership of a relevant set in the collection
    let mut sets: Vec<StateSet> = Vec::new();
    let mut atom_coord = Vec::new();
    for a in atoms {
        let (set, want) = match a.lift {
            Lifting::NbhdBox => (a.args[0], 1),
            Lifting::NbhdDia => (a.args[0].complement(n), 0),
            ref other => return Err(Error::Config(format!("lifting {other:?} used with {functor}"))),
        };
        let idx = sets.iter().position(|s| *s == set).unwrap_or_else(|| {
            sets.push(set);
            sets.len() - 1
        });
        atom_coord.push((idx, want));
    }
    let monotone = *functor == Functor::Monotone;
    if monotone && n > 20 {
        return Err(Error::ResourceBound(format!("upward closure over {n} states")));
    }
    let eval = |ai: usize, assign: &[Option<usize>]| -> Option<bool> {
        let (c, want) = atom_coord[ai];
        assign[c].map(|v| v == want)
    };
    let compatible = |assign: &[Option<usize>], i: usize| -> bool {
        if !monotone {
            return true;
        }
        let v = assign[i].unwrap();
        assign.iter().enumerate().all(|(j, w)| match (v, w) {
            (1, Some(0)) => !sets[i].is_subset(sets[j]),
            (0, Some(1)) => !sets[j].is_subset(sets[i]),
            _ => true,
        })
    };
    let search = Search {
        domains: vec![2; sets.len()],
        atom_eval: &eval,
        natoms: atoms.len(),
        constraint,
        compatible: &compatible,
        nodes: 0,
        budget: bounds.max_nodes,
    };
    let Some(vals) = search.solve()? else { return Ok(None) };
    let ins = sets.iter().zip(&vals).filter(|(_, &v)| v == 1).map(|(s, _)| *s);
    Ok(Some(TxElem::Nbhd(if monotone { upward_closure(ins, n) } else { ins.collect() })))
}

fn selection(n: usize, atoms: &[Atom], constraint: &BExpr, bounds: &SearchBounds) -> Result<Option<TxElem>> {
    // coordinate = value of the selection function at a relevant first
    // argument, chosen as a union of cells of the second arguments
    let mut firsts: Vec<StateSet> = Vec::new();
    for a in atoms {
        match a.lift {
            Lifting::SelImplies | Lifting::SelWould => {}
            ref other => return Err(Error::Config(format!("lifting {other:?} used with selection"))),
        }
        if !firsts.contains(&a.args[0]) {
            firsts.push(a.args[0]);
        }
    }
    let parts: Vec<Vec<StateSet>> = firsts
        .iter()
        .map(|f| cells(n, atoms.iter().filter(|a| a.args[0] == *f).map(|a| a.args[1])))
        .collect();
    if parts.iter().any(|p| p.len() > 20) {
        return Err(Error::ResourceBound("too many cells for a selection entry".into()));
    }
    let value = |c: usize, v: usize| -> StateSet {
        parts[c].iter().enumerate().filter(|(i, _)| v & (1 << i) != 0).fold(StateSet::empty(), |acc, (_, p)| acc.union(*p))
    };
    let coord: Vec<usize> = atoms.iter().map(|a| firsts.iter().position(|f| *f == a.args[0]).unwrap()).collect();
    let eval = |ai: usize, assign: &[Option<usize>]| -> Option<bool> {
        let a = &atoms[ai];
        let fa = value(coord[ai], assign[coord[ai]]?);
        Some(match a.lift {
            Lifting::SelImplies => fa.is_subset(a.args[1]),
            _ => !fa.inter(a.args[1]).is_empty(),
        })
    };
    let search = Search {
        domains: parts.iter().map(|p| 1 << p.len()).collect(),
        atom_eval: &eval,
        natoms: atoms.len(),
        constraint,
        compatible: &|_, _| true,
        nodes: 0,
        budget: bounds.max_nodes,
    };
    let Some(vals) = search.solve()? else { return Ok(None) };
    let table: BTreeMap<StateSet, StateSet> = firsts.iter().enumerate().map(|(c, f)| (*f, value(c, vals[c]))).collect();
    Ok(Some(TxElem::Sel(Selection { table, default: StateSet::empty() })))
}

fn game(nagents: usize, n: usize, atoms: &[Atom], constraint: &BExpr, bounds: &SearchBounds) -> Result<Option<TxElem>> {
    if n == 0 {
        return Ok(None);
    }
    for a in atoms {
        if !matches!(a.lift, Lifting::Coalition(_)) {
            return Err(Error::Config(format!("lifting {:?} used with game frames", a.lift)));
        }
    }
    let reps: Vec<usize> = cells(n, atoms.iter().map(|a| a.args[0])).iter().filter_map(|c| c.first()).collect();
    let mut nodes = 0u64;
    let mut strategies = vec![1usize; nagents];
    loop {
        let profiles = GameElem::profile_count(&strategies);
        let mut digits = vec![0usize; profiles];
        loop {
            nodes += 1;
            if nodes > bounds.max_nodes {
                return Err(Error::ResourceBound(format!("game search exceeded {} nodes", bounds.max_nodes)));
            }
            let t = TxElem::Game(GameElem { strategies: strategies.clone(), outcome: digits.iter().map(|&d| reps[d]).collect() });
            let vals: Vec<Option<bool>> = atoms.iter().map(|a| Some(a.lift.member(&t, &a.args, n))).collect();
            if constraint.eval3(&vals) == Some(true) {
                return Ok(Some(t));
            }
            let mut i = 0;
            while i < profiles {
                digits[i] += 1;
                if digits[i] < reps.len() {
                    break;
                }
                digits[i] = 0;
                i += 1;
            }
            if i == profiles {
                break;
            }
        }
        let mut i = 0;
        while i < nagents && strategies[i] == bounds.max_strategies {
            strategies[i] = 1;
            i += 1;
        }
        if i == nagents {
            break;
        }
        strategies[i] += 1;
    }
    Err(Error::ResourceBound(format!("no game with at most {} strategies per agent", bounds.max_strategies)))
}
