use std::collections::{BTreeMap, BTreeSet};

use crate::coalgebra::SearchBounds;
use crate::error::{Error, Result};
use crate::syntax::{fresh_nominals, Formula, Nominal, Signature};

/// A finite set of `@`-formulas. Membership is up to renaming of bound
/// nominals.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ABoxLabel {
    // alpha-normal form -> formula as inserted
    formulas: BTreeMap<Formula, Formula>,
}

impl ABoxLabel {
    pub fn new<I: IntoIterator<Item = Formula>>(fs: I) -> Result<Self> {
        let mut k = ABoxLabel::default();
        for f in fs {
            k.insert(f)?;
        }
        Ok(k)
    }

    /// Adds `f`; returns whether it was new.
    pub fn insert(&mut self, f: Formula) -> Result<bool> {
        if !matches!(f, Formula::At(..)) {
            return Err(Error::Config(format!("`{f}` is not an @-formula")));
        }
        let key = f.alpha_normal();
        if self.formulas.contains_key(&key) {
            return Ok(false);
        }
        self.formulas.insert(key, f);
        Ok(true)
    }

    pub fn contains(&self, f: &Formula) -> bool {
        self.formulas.contains_key(&f.alpha_normal())
    }

    pub fn len(&self) -> usize {
        self.formulas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.formulas.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Formula> {
        self.formulas.values()
    }

    /// Nominals with a free occurrence in some member.
    pub fn nominals(&self) -> BTreeSet<Nominal> {
        self.iter().flat_map(Formula::free_nominals).collect()
    }

    /// `K_i = { phi | @i phi in K }`.
    pub fn label(&self, i: &Nominal) -> Vec<Formula> {
        self.iter()
            .filter_map(|f| match f {
                Formula::At(j, body) if j == i => Some((**body).clone()),
                _ => None,
            })
            .collect()
    }

    /// `i -> K_i` for every nominal that is the subject of some member.
    pub fn nominal_index(&self) -> BTreeMap<Nominal, Vec<Formula>> {
        let mut out: BTreeMap<Nominal, Vec<Formula>> = BTreeMap::new();
        for f in self.iter() {
            if let Formula::At(i, body) = f {
                out.entry(i.clone()).or_default().push((**body).clone());
            }
        }
        out
    }

    /// Bodies of all members.
    fn bodies(&self) -> Vec<Formula> {
        self.iter()
            .filter_map(|f| match f {
                Formula::At(_, b) => Some((**b).clone()),
                _ => None,
            })
            .collect()
    }
}

/// Subformulas of `fs`, without duplicates up to renaming of bound
/// nominals, in first-visit order.
pub fn subformula_closure<'a>(fs: impl IntoIterator<Item = &'a Formula>) -> Vec<Formula> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for f in fs {
        f.visit(&mut |g| {
            if seen.insert(g.alpha_normal()) {
                out.push(g.clone());
            }
        });
    }
    out
}

/// `j1 | .. | jk` as the list of its nominals; `false` is the empty
/// disjunction.
fn nominal_disjuncts(f: &Formula) -> Option<Vec<Nominal>> {
    if *f == Formula::bot() {
        return Some(Vec::new());
    }
    match f {
        Formula::Nom(j) => Some(vec![j.clone()]),
        _ => {
            let (a, b) = f.as_disjunction()?;
            let mut xs = nominal_disjuncts(a)?;
            xs.extend(nominal_disjuncts(b)?);
            Some(xs)
        }
    }
}

/// `@j phi` is in `K`, or follows from `@j j` because `phi` is a disjunction
/// of nominals containing `j`.
fn holds_at(k: &ABoxLabel, j: &Nominal, phi: &Formula) -> bool {
    if nominal_disjuncts(phi).is_some_and(|ds| ds.contains(j)) {
        return true;
    }
    k.contains(&Formula::at(j.clone(), phi.clone()))
}

fn witnessed(k: &ABoxLabel, i: &Nominal, op: &str, args: &[Formula], pos: usize, bound: u32) -> bool {
    let phi = &args[pos];
    k.iter().any(|g| {
        let Formula::At(i2, body) = g else { return false };
        let Formula::Modal(op2, args2) = body.as_ref() else { return false };
        if i2 != i || op2 != op || args2.len() != args.len() {
            return false;
        }
        let others_match = args.iter().zip(args2).enumerate().all(|(r, (a, b))| r == pos || a.alpha_eq(b));
        if !others_match {
            return false;
        }
        let Some(mut ds) = nominal_disjuncts(&args2[pos]) else { return false };
        ds.sort();
        ds.dedup();
        ds.len() <= bound as usize && ds.iter().all(|j| holds_at(k, j, phi))
    })
}

/// Checks that every `@i op(..phi..)` in `K` with `op` bounded in the
/// position of `phi` has witnesses `@j1 phi, .., @jk phi` together with
/// `@i op(..j1 | .. | jk..)`. Returns whether `K` is 1-pasted and the
/// members lacking witnesses.
pub fn is_one_pasted(k: &ABoxLabel, sig: &Signature) -> Result<(bool, Vec<Formula>)> {
    let mut missing = Vec::new();
    for f in k.iter() {
        let Formula::At(i, body) = f else { continue };
        let Formula::Modal(op, args) = body.as_ref() else { continue };
        let decl = sig.get(op).ok_or_else(|| Error::Config(format!("operator `{op}` is not declared")))?;
        let (pos, bound) = decl.pasted_argument().ok_or_else(|| Error::UnboundedOperator(op.clone()))?;
        if !witnessed(k, i, op, args, pos, bound) {
            missing.push(f.clone());
        }
    }
    Ok((missing.is_empty(), missing))
}

fn modal_formulas(closure: &[Formula]) -> Vec<&Formula> {
    closure.iter().filter(|f| matches!(f, Formula::Modal(..))).collect()
}

fn quantified_nominals(k: &ABoxLabel, closure: &[Formula]) -> BTreeSet<Nominal> {
    let mut noms = k.nominals();
    for f in closure {
        noms.extend(f.free_nominals());
    }
    noms
}

/// Members `@i (op(phis) <-> op(psis))` required by 0-pastedness and absent
/// from `K`.
fn zero_paste_missing(k: &ABoxLabel, closure: &[Formula]) -> Vec<Formula> {
    let noms = quantified_nominals(k, closure);
    let modal = modal_formulas(closure);
    let mut out = Vec::new();
    for m1 in &modal {
        for m2 in &modal {
            let (Formula::Modal(o1, a1), Formula::Modal(o2, a2)) = (m1, m2) else { unreachable!() };
            if o1 != o2 || a1.len() != a2.len() {
                continue;
            }
            let premise = a1.iter().zip(a2).all(|(phi, psi)| {
                noms.iter().all(|j| k.contains(&Formula::at(j.clone(), Formula::iff(phi.clone(), psi.clone()))))
            });
            if !premise {
                continue;
            }
            for i in &noms {
                let f = Formula::at(i.clone(), Formula::iff((*m1).clone(), (*m2).clone()));
                if !k.contains(&f) && !out.contains(&f) {
                    out.push(f);
                }
            }
        }
    }
    out
}

/// Whether `K` is 0-pasted relative to `closure`: whenever `@j (phi <-> psi)`
/// is in `K` for every nominal `j` of `K` and `closure`, so is
/// `@i (op(phi) <-> op(psi))` for every such `i` and every pair of modal
/// formulas of the closure.
pub fn is_zero_pasted(k: &ABoxLabel, closure: &[Formula]) -> bool {
    zero_paste_missing(k, closure).is_empty()
}

/// Discharges 1-paste obligations whose modal formula lies in the
/// subformula closure of `K` by adding fresh witnesses, then adds the
/// consequences demanded by 0-pastedness, until neither adds anything.
/// At most `bounds.max_states` fresh nominals are introduced.
pub fn saturate(k: &ABoxLabel, sig: &Signature, bounds: &SearchBounds) -> Result<ABoxLabel> {
    let closure = subformula_closure(&k.bodies());
    let mut avoid: BTreeSet<Nominal> = k.iter().flat_map(Formula::all_nominals).collect();
    for f in &closure {
        avoid.extend(f.all_nominals());
    }
    let in_closure = |f: &Formula| closure.iter().any(|g| g.alpha_eq(f));
    let mut out = k.clone();
    let mut used = 0usize;
    loop {
        let mut changed = false;
        let (_, obligations) = is_one_pasted(&out, sig)?;
        for ob in obligations {
            let Formula::At(i, body) = &ob else { unreachable!() };
            let Formula::Modal(op, args) = body.as_ref() else { unreachable!() };
            if !in_closure(body) {
                continue;
            }
            let (pos, bound) = sig.get(op).and_then(|d| d.pasted_argument()).expect("checked by is_one_pasted");
            let need = bound as usize;
            if used + need > bounds.max_states {
                return Err(Error::ResourceBound(format!(
                    "pasting `{ob}` needs {need} fresh nominals, {} left",
                    bounds.max_states - used
                )));
            }
            let js = fresh_nominals(&avoid, need);
            avoid.extend(js.iter().cloned());
            used += need;
            for j in &js {
                out.insert(Formula::at(j.clone(), args[pos].clone()))?;
            }
            let mut witness_args = args.clone();
            witness_args[pos] = Formula::disj(js.iter().cloned().map(Formula::nom));
            out.insert(Formula::at(i.clone(), Formula::modal(op.clone(), witness_args)))?;
            changed = true;
        }
        for f in zero_paste_missing(&out, &closure) {
            changed |= out.insert(f)?;
        }
        if !changed {
            return Ok(out);
        }
    }
}
