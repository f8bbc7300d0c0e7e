use std::collections::BTreeMap;

use super::solver::{Atom, AtomTable, BExpr};
use crate::coalgebra::{Functor, Lifting, StateSet};
use crate::error::{Error, Result};
use crate::hilbert::{is_one_step, RuleSet};
use crate::syntax::{parse, Formula, Signature};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OneStepProblem {
    pub base: Vec<String>,
    pub tau: BTreeMap<String, StateSet>,
    pub xi: Vec<Formula>,
}

impl OneStepProblem {
    pub fn new(base: Vec<String>, tau: BTreeMap<String, StateSet>, xi: Vec<Formula>) -> Self {
        OneStepProblem { base, tau, xi }
    }

    /// Base set `x0, .., x{n-1}`.
    pub fn with_size(n: usize, tau: BTreeMap<String, StateSet>, xi: Vec<Formula>) -> Self {
        OneStepProblem::new((0..n).map(|i| format!("x{i}")).collect(), tau, xi)
    }

    pub fn n(&self) -> usize {
        self.base.len()
    }

    pub fn validate(&self) -> Result<()> {
        for f in &self.xi {
            if !is_one_step(f) {
                return Err(Error::Config(format!("`{f}` is not a one-step formula")));
            }
            for v in f.props() {
                if !self.tau.contains_key(&v) {
                    return Err(Error::Config(format!("variable {v} has no value")));
                }
            }
        }
        let full = StateSet::full(self.n());
        if self.tau.values().any(|s| !s.is_subset(full)) {
            return Err(Error::Config("valuation out of range".into()));
        }
        Ok(())
    }

    /// Value of a propositional formula under `tau`.
    pub fn eval_prop(&self, f: &Formula) -> Result<StateSet> {
        eval_prop(f, &self.tau, self.n())
    }

    /// Translates `xi` into lifting atoms and their boolean combination.
    pub fn compile(&self, functor: &Functor) -> Result<(Vec<Atom>, BExpr)> {
        let mut table = AtomTable::default();
        let mut parts = Vec::new();
        for f in &self.xi {
            parts.push(compile(f, functor, &self.tau, self.n(), &mut table)?);
        }
        Ok((table.atoms, BExpr::And(parts)))
    }
}

pub(crate) fn eval_prop(f: &Formula, tau: &BTreeMap<String, StateSet>, n: usize) -> Result<StateSet> {
    Ok(match f {
        Formula::Top => StateSet::full(n),
        Formula::Prop(p) => *tau.get(p).ok_or_else(|| Error::Config(format!("variable {p} has no value")))?,
        Formula::Not(a) => eval_prop(a, tau, n)?.complement(n),
        Formula::And(a, b) => eval_prop(a, tau, n)?.inter(eval_prop(b, tau, n)?),
        other => return Err(Error::Config(format!("`{other}` is not propositional"))),
    })
}

pub(crate) fn compile(
    f: &Formula,
    functor: &Functor,
    tau: &BTreeMap<String, StateSet>,
    n: usize,
    table: &mut AtomTable,
) -> Result<BExpr> {
    Ok(match f {
        Formula::Top => BExpr::Const(true),
        Formula::Not(a) => BExpr::Not(Box::new(compile(a, functor, tau, n, table)?)),
        Formula::And(a, b) => BExpr::And(vec![compile(a, functor, tau, n, table)?, compile(b, functor, tau, n, table)?]),
        Formula::Modal(op, args) => {
            let lift = Lifting::new(functor, op)?;
            let mut sets = Vec::new();
            for a in args {
                sets.push(eval_prop(a, tau, n)?);
            }
            BExpr::Atom(table.intern(Atom { lift, args: sets }))
        }
        other => return Err(Error::Config(format!("`{other}` is not a one-step formula"))),
    })
}

/// A one-step problem file:
///
/// ```text
/// functor: kripke
/// rules: K
/// base: x0 x1
/// tau a: x0
/// constraint: (box a & ~ dia b)
/// ```
///
/// `functor`, `agents`, `sig` and `rules` are optional.
#[derive(Clone, Debug)]
pub struct OneStepFile {
    pub problem: OneStepProblem,
    pub functor: Option<Functor>,
    pub sig: Option<Signature>,
    pub rules: Option<RuleSet>,
}

impl OneStepFile {
    /// `sig` overrides the signature implied by the file.
    pub fn parse(text: &str, sig: Option<&Signature>) -> Result<Self> {
        let mut functor = None;
        let mut file_sig = None;
        let mut rules_name = None;
        let mut base: Option<Vec<String>> = None;
        let mut tau_lines = Vec::new();
        let mut constraints = Vec::new();
        for (ln, raw) in text.lines().enumerate() {
            let ln = ln + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (head, rest) = line.split_once(':').ok_or_else(|| Error::format(ln, "expected `key: ...`"))?;
            let rest = rest.trim();
            let words: Vec<&str> = head.split_whitespace().collect();
            match words.as_slice() {
                ["functor"] => {
                    let f = Functor::from_name(rest).ok_or_else(|| Error::format(ln, format!("unknown functor `{rest}`")))?;
                    functor = Some(match (f, functor.take()) {
                        (Functor::Game { .. }, Some(Functor::Game { agents })) => Functor::Game { agents },
                        (f, _) => f,
                    });
                }
                ["agents"] => {
                    let agents = rest.split_whitespace().map(str::to_string).collect();
                    functor = Some(Functor::Game { agents });
                }
                ["sig"] => {
                    file_sig = Some(Signature::named(rest).ok_or_else(|| Error::format(ln, format!("unknown signature `{rest}`")))?)
                }
                ["rules"] => rules_name = Some((ln, rest.to_string())),
                ["base"] => base = Some(rest.split_whitespace().map(str::to_string).collect()),
                ["tau", var] => tau_lines.push((ln, var.to_string(), rest.to_string())),
                ["constraint"] => constraints.push((ln, rest.to_string())),
                _ => return Err(Error::format(ln, format!("unknown line `{head}`"))),
            }
        }
        let base = base.ok_or_else(|| Error::format(0, "missing `base:` line"))?;
        let mut tau = BTreeMap::new();
        for (ln, var, rest) in tau_lines {
            let mut s = StateSet::empty();
            for w in rest.split_whitespace() {
                let i = base.iter().position(|b| b == w).ok_or_else(|| Error::format(ln, format!("unknown element `{w}`")))?;
                s = s.with(i);
            }
            tau.insert(var, s);
        }
        let sig = sig
            .cloned()
            .or(file_sig)
            .or_else(|| functor.as_ref().map(Functor::signature))
            .unwrap_or_else(Signature::hybrid_k);
        let mut xi = Vec::new();
        for (ln, text) in constraints {
            xi.push(parse(&text, &sig).map_err(|e| Error::format(ln, e.to_string()))?);
        }
        let rules = match rules_name {
            Some((ln, name)) => Some(RuleSet::named(&name).ok_or_else(|| Error::format(ln, format!("unknown rule set `{name}`")))?),
            None => None,
        };
        let problem = OneStepProblem::new(base, tau, xi);
        problem.validate()?;
        Ok(OneStepFile { problem, functor, sig: Some(sig), rules })
    }
}
