use std::collections::BTreeMap;
use std::ops::ControlFlow;

use super::problem::{eval_prop, OneStepProblem};
use super::{one_step_sat, OneStepOutcome};
use crate::coalgebra::{for_each_tx, Functor, Lifting, SearchBounds, StateSet, TxElem};
use crate::error::{Error, Result};
use crate::hilbert::{OneStepRule, RuleSet};
use crate::prop::Encoder;
use crate::syntax::{substitute, Formula, Substitution};

/// Formulas standing for each element of the boolean subalgebra of `P(X)`
/// generated by the values of `tau`: a normal form over the variables, plus
/// every argument of `xi` (and every variable) denoting that set.
fn candidates(p: &OneStepProblem) -> Result<BTreeMap<StateSet, Vec<Formula>>> {
    let n = p.n();
    let vars: Vec<(&String, StateSet)> = p.tau.iter().map(|(v, s)| (v, *s)).collect();
    // atoms of the subalgebra, keyed by membership pattern
    let mut pattern: BTreeMap<Vec<bool>, StateSet> = BTreeMap::new();
    for x in 0..n {
        let key: Vec<bool> = vars.iter().map(|(_, s)| s.contains(x)).collect();
        let e = pattern.entry(key).or_default();
        *e = e.with(x);
    }
    let cells: Vec<(Formula, StateSet)> = pattern
        .into_iter()
        .map(|(key, s)| {
            let lits = vars
                .iter()
                .zip(key)
                .map(|((v, _), inside)| if inside { Formula::prop(*v) } else { Formula::not(Formula::prop(*v)) });
            (Formula::conj(lits), s)
        })
        .collect();
    if cells.len() > 16 {
        return Err(Error::ResourceBound(format!("subalgebra with {} atoms", cells.len())));
    }
    let mut out: BTreeMap<StateSet, Vec<Formula>> = BTreeMap::new();
    for mask in 0u32..(1 << cells.len()) {
        let chosen: Vec<&(Formula, StateSet)> = cells.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, c)| c).collect();
        let set = chosen.iter().fold(StateSet::empty(), |acc, (_, s)| acc.union(*s));
        let rep = if set == StateSet::full(n) {
            Formula::top()
        } else if chosen.is_empty() {
            Formula::bot()
        } else {
            Formula::disj(chosen.iter().map(|(f, _)| f.clone()))
        };
        out.entry(set).or_default().push(rep);
    }
    let mut push = |f: &Formula| -> Result<()> {
        let s = eval_prop(f, &p.tau, n)?;
        let list = out.entry(s).or_default();
        if !list.contains(f) {
            list.push(f.clone());
        }
        Ok(())
    };
    for v in p.tau.keys() {
        push(&Formula::prop(v))?;
    }
    for f in &p.xi {
        let mut args = Vec::new();
        f.visit(&mut |g| {
            if let Formula::Modal(_, xs) = g {
                args.extend(xs.iter().cloned());
            }
        });
        for a in &args {
            push(a)?;
        }
    }
    Ok(out)
}

/// Whether `xi` together with every rule conclusion `psi.sigma` whose premise
/// `phi.sigma` holds everywhere on `X` under `tau` is propositionally
/// consistent. Substitutions range over the candidates of each element of
/// the subalgebra generated by `tau`.
pub fn one_step_consistent(p: &OneStepProblem, rules: &RuleSet, bounds: &SearchBounds) -> Result<bool> {
    p.validate()?;
    let n = p.n();
    let cands = candidates(p)?;
    let pool: Vec<(StateSet, &Formula)> = cands.iter().flat_map(|(s, fs)| fs.iter().map(move |f| (*s, f))).collect();
    let mut enc = Encoder::new();
    for f in &p.xi {
        enc.assert(f);
    }
    let mut visited = 0u64;
    for rule in &rules.rules {
        let vars: Vec<String> = rule.vars().into_iter().collect();
        let total = (pool.len() as u128).saturating_pow(vars.len() as u32);
        visited = visited.saturating_add(total.min(u64::MAX as u128) as u64);
        if visited > bounds.max_nodes {
            return Err(Error::ResourceBound(format!("more than {} rule instances", bounds.max_nodes)));
        }
        let mut digits = vec![0usize; vars.len()];
        loop {
            let tau: BTreeMap<String, StateSet> = vars.iter().zip(&digits).map(|(v, &d)| (v.clone(), pool[d].0)).collect();
            if eval_prop(&rule.premise, &tau, n)? == StateSet::full(n) {
                let mut sigma = Substitution::new();
                for (v, &d) in vars.iter().zip(&digits) {
                    sigma = sigma.with_prop(v.clone(), pool[d].1.clone());
                }
                enc.assert(&substitute(&rule.conclusion, &sigma));
            }
            let mut i = 0;
            while i < digits.len() {
                digits[i] += 1;
                if digits[i] < pool.len() {
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
    Ok(enc.solve())
}

/// Truth of a one-step formula at `t` under `tau`.
pub(crate) fn eval_one_step(
    f: &Formula,
    functor: &Functor,
    t: &TxElem,
    tau: &BTreeMap<String, StateSet>,
    n: usize,
) -> Result<bool> {
    Ok(match f {
        Formula::Top => true,
        Formula::Not(a) => !eval_one_step(a, functor, t, tau, n)?,
        Formula::And(a, b) => eval_one_step(a, functor, t, tau, n)? && eval_one_step(b, functor, t, tau, n)?,
        Formula::Modal(op, args) => {
            let lift = Lifting::new(functor, op)?;
            let sets = args.iter().map(|a| eval_prop(a, tau, n)).collect::<Result<Vec<_>>>()?;
            lift.member(t, &sets, n)
        }
        other => return Err(Error::Config(format!("`{other}` is not a one-step formula"))),
    })
}

/// Checks by enumeration that the conclusion of `rule` holds at every
/// element of `TX` (within `bounds`) for every valuation of its variables
/// over `X = {0..n-1}` that makes the premise hold everywhere.
pub fn verify_one_step_soundness(rule: &OneStepRule, functor: &Functor, n: usize, bounds: &SearchBounds) -> Result<bool> {
    let vars: Vec<String> = rule.vars().into_iter().collect();
    let subsets: Vec<StateSet> = StateSet::all_subsets(n).collect();
    let mut digits = vec![0usize; vars.len()];
    loop {
        let tau: BTreeMap<String, StateSet> = vars.iter().zip(&digits).map(|(v, &d)| (v.clone(), subsets[d])).collect();
        if eval_prop(&rule.premise, &tau, n)? == StateSet::full(n) {
            let mut err = None;
            let mut sound = true;
            let _ = for_each_tx(functor, n, bounds, |t| match eval_one_step(&rule.conclusion, functor, t, &tau, n) {
                Ok(true) => ControlFlow::Continue(()),
                Ok(false) => {
                    sound = false;
                    ControlFlow::Break(())
                }
                Err(e) => {
                    err = Some(e);
                    ControlFlow::Break(())
                }
            })?;
            if let Some(e) = err {
                return Err(e);
            }
            if !sound {
                return Ok(false);
            }
        }
        let mut i = 0;
        while i < digits.len() {
            digits[i] += 1;
            if digits[i] < subsets.len() {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
        if i == digits.len() {
            return Ok(true);
        }
    }
}

/// Verdicts of the consistency and satisfiability engines on one problem.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AgreementReport {
    pub consistent: bool,
    pub satisfiable: bool,
    pub witness: Option<TxElem>,
}

impl AgreementReport {
    pub fn agree(&self) -> bool {
        self.consistent == self.satisfiable
    }
}

pub fn agreement_check(p: &OneStepProblem, functor: &Functor, rules: &RuleSet, bounds: &SearchBounds) -> Result<AgreementReport> {
    let consistent = one_step_consistent(p, rules, bounds)?;
    let out = one_step_sat(p, functor, bounds)?;
    let witness = match out {
        OneStepOutcome::Sat(t) => Some(t),
        OneStepOutcome::Unsat => None,
    };
    Ok(AgreementReport { consistent, satisfiable: witness.is_some(), witness })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse, Signature};

    fn problem(n: usize, tau: &[(&str, StateSet)], xi: &[&str]) -> OneStepProblem {
        let sig = Signature::hybrid_k();
        OneStepProblem::with_size(
            n,
            tau.iter().map(|(v, s)| (v.to_string(), *s)).collect(),
            xi.iter().map(|s| parse(s, &sig).unwrap()).collect(),
        )
    }

    #[test]
    fn k_consistency_examples() {
        let b = SearchBounds::default();
        let k = RuleSet::k();
        let x = StateSet::full(2);
        assert!(one_step_consistent(&problem(2, &[("a", x)], &["box a"]), &k, &b).unwrap());
        let same = StateSet::singleton(0);
        let p = problem(2, &[("a", same), ("b", same)], &["box a", "~ box b"]);
        assert!(!one_step_consistent(&p, &k, &b).unwrap());
        assert!(one_step_consistent(&problem(2, &[], &[]), &k, &b).unwrap());
    }

    #[test]
    fn k_rules_are_sound_and_bogus_rule_is_not() {
        let b = SearchBounds::default();
        for r in &RuleSet::k().rules {
            assert!(verify_one_step_soundness(r, &Functor::Kripke, 2, &b).unwrap());
        }
        let sig = Signature::hybrid_k();
        let bogus = OneStepRule::parse("a / dia a", &sig).unwrap();
        assert!(!verify_one_step_soundness(&bogus, &Functor::Kripke, 1, &b).unwrap());
    }

    #[test]
    fn agreement_on_simple_cases() {
        let b = SearchBounds::default();
        let a = StateSet::singleton(0);
        let r = agreement_check(&problem(2, &[("a", a)], &["box a"]), &Functor::Kripke, &RuleSet::k(), &b).unwrap();
        assert!(r.agree() && r.satisfiable);
        let r = agreement_check(&problem(2, &[("a", a)], &["box a", "~ box a"]), &Functor::Kripke, &RuleSet::k(), &b).unwrap();
        assert!(r.agree() && !r.satisfiable);
    }
}
