use std::collections::BTreeMap;
use std::fmt;

use super::problem::NamedModelProblem;
use crate::coalgebra::{frame_check, HybridModel};
use crate::syntax::Formula;

/// Outcome of re-checking a model against a problem. Each flag is one
/// condition; `failures` explains every flag that is false.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckReport {
    /// `gamma` total and well typed, designated state in range, functor as
    /// in the problem.
    pub well_formed: bool,
    /// Every state is the value of some nominal.
    pub named: bool,
    /// The goal holds at the designated state.
    pub goal: bool,
    /// The TBox holds at every state.
    pub tbox: bool,
    /// The frame validates every pure axiom.
    pub axioms: bool,
    /// A formula belongs to a state's label iff it is true there. `None`
    /// when no labels were supplied.
    pub truth_lemma: Option<bool>,
    pub failures: Vec<String>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.well_formed && self.named && self.goal && self.tbox && self.axioms && self.truth_lemma != Some(false)
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let flag = |b: bool| if b { "ok" } else { "FAILED" };
        writeln!(f, "well-formed: {}", flag(self.well_formed))?;
        writeln!(f, "named: {}", flag(self.named))?;
        writeln!(f, "goal: {}", flag(self.goal))?;
        writeln!(f, "tbox: {}", flag(self.tbox))?;
        writeln!(f, "axioms: {}", flag(self.axioms))?;
        match self.truth_lemma {
            Some(b) => writeln!(f, "truth lemma: {}", flag(b))?,
            None => writeln!(f, "truth lemma: not checked")?,
        }
        for m in &self.failures {
            writeln!(f, "  {m}")?;
        }
        Ok(())
    }
}

/// Re-checks `m` against `prob` with the model checker alone.
pub fn verify_named_model(m: &HybridModel, designated: usize, prob: &NamedModelProblem) -> CheckReport {
    verify_with_labels(m, designated, prob, None)
}

/// Like [`verify_named_model`], and also compares each state's label (a map
/// from formulas to claimed truth values) with the model.
pub fn verify_with_labels(
    m: &HybridModel,
    designated: usize,
    prob: &NamedModelProblem,
    labels: Option<&[BTreeMap<Formula, bool>]>,
) -> CheckReport {
    let mut failures = Vec::new();
    let mut well_formed = true;
    if let Err(e) = m.validate() {
        well_formed = false;
        failures.push(format!("model: {e}"));
    }
    if m.functor != prob.functor {
        well_formed = false;
        failures.push(format!("model is over {}, problem over {}", m.functor, prob.functor));
    }
    if designated >= m.n() {
        well_formed = false;
        failures.push(format!("designated state {designated} out of range"));
    }
    let named = m.is_named();
    if !named {
        for (c, name) in m.states.iter().enumerate() {
            if !m.noms.values().any(|&x| x == c) {
                failures.push(format!("state {name} is not named"));
            }
        }
    }
    if !well_formed {
        return CheckReport { well_formed, named, goal: false, tbox: false, axioms: false, truth_lemma: labels.map(|_| false), failures };
    }

    let mut goal = true;
    for f in &prob.goal {
        match m.satisfies(designated, f) {
            Ok(true) => {}
            Ok(false) => {
                goal = false;
                failures.push(format!("goal `{f}` fails at {}", m.states[designated]));
            }
            Err(e) => {
                goal = false;
                failures.push(format!("goal `{f}`: {e}"));
            }
        }
    }

    let tbox = match m.global_failure(&prob.tbox) {
        Ok(None) => true,
        Ok(Some((k, c))) => {
            failures.push(format!("tbox `{}` fails at {}", prob.tbox[k], m.states[c]));
            false
        }
        Err(e) => {
            failures.push(format!("tbox: {e}"));
            false
        }
    };

    let axioms = match frame_check(m, &prob.axioms) {
        Ok(None) => true,
        Ok(Some(cx)) => {
            let assignment: Vec<String> = cx.assignment.iter().map(|(i, c)| format!("{i}={}", m.states[*c])).collect();
            failures.push(format!(
                "axiom `{}` fails at {} under {{{}}}",
                prob.axioms[cx.axiom],
                m.states[cx.state],
                assignment.join(", ")
            ));
            false
        }
        Err(e) => {
            failures.push(format!("axioms: {e}"));
            false
        }
    };

    let truth_lemma = labels.map(|labels| {
        let mut ok = labels.len() == m.n();
        if !ok {
            failures.push(format!("{} labels for {} states", labels.len(), m.n()));
        }
        for (c, label) in labels.iter().enumerate().take(m.n()) {
            for (f, &claimed) in label {
                match m.satisfies(c, f) {
                    Ok(actual) if actual == claimed => {}
                    Ok(actual) => {
                        ok = false;
                        failures.push(format!("label of {} says `{f}` is {claimed}, model says {actual}", m.states[c]));
                    }
                    Err(e) => {
                        ok = false;
                        failures.push(format!("label formula `{f}`: {e}"));
                    }
                }
            }
        }
        ok
    });

    CheckReport { well_formed, named, goal, tbox, axioms, truth_lemma, failures }
}
