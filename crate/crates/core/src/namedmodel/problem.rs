use std::collections::BTreeSet;

use super::abox::subformula_closure;
use crate::coalgebra::{Functor, Lifting, SearchBounds};
use crate::error::{Error, Result};
use crate::hilbert::RuleSet;
use crate::syntax::{parse, Formula, Nominal, Signature};

/// Input of the named-model search: find a model over `functor` whose frame
/// validates `axioms`, where `tbox` holds everywhere and `goal` holds at a
/// designated state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedModelProblem {
    pub functor: Functor,
    pub sig: Signature,
    pub rules: RuleSet,
    pub axioms: Vec<Formula>,
    pub tbox: Vec<Formula>,
    pub goal: Vec<Formula>,
    pub bounds: SearchBounds,
}

const SECTIONS: [&str; 8] = ["functor", "agents", "sig", "rules", "axioms", "tbox", "goal", "bounds"];

impl NamedModelProblem {
    /// A problem over the functor's own signature and no rules.
    pub fn new(functor: Functor, axioms: Vec<Formula>, tbox: Vec<Formula>, goal: Vec<Formula>, bounds: SearchBounds) -> Self {
        let sig = functor.signature();
        NamedModelProblem { functor, sig, rules: RuleSet::default(), axioms, tbox, goal, bounds }
    }

    /// Every operator has a lifting and every axiom is pure.
    pub fn validate(&self) -> Result<()> {
        for a in &self.axioms {
            if !a.is_pure() {
                return Err(Error::NotPure(a.clone()));
            }
        }
        for f in self.formulas() {
            for op in f.operators() {
                Lifting::new(&self.functor, &op)?;
            }
        }
        Ok(())
    }

    fn formulas(&self) -> impl Iterator<Item = &Formula> {
        self.axioms.iter().chain(&self.tbox).chain(&self.goal)
    }

    /// Nominals with a free occurrence in the TBox or the goal. Free
    /// nominals of axioms are schematic.
    pub fn nominals(&self) -> BTreeSet<Nominal> {
        self.tbox.iter().chain(&self.goal).flat_map(Formula::free_nominals).collect()
    }

    /// Every nominal written anywhere in the problem, bound ones included.
    pub fn all_nominals(&self) -> BTreeSet<Nominal> {
        self.formulas().flat_map(Formula::all_nominals).collect()
    }

    pub fn props(&self) -> BTreeSet<String> {
        self.formulas().flat_map(Formula::props).collect()
    }

    /// Subformulas of axioms, TBox and goal, closed under single negation,
    /// plus `@i phi` for the nominals `i` of the problem.
    pub fn closure(&self) -> Vec<Formula> {
        let base = subformula_closure(self.formulas());
        let mut out = base.clone();
        for f in &base {
            if !matches!(f, Formula::Not(_)) {
                out.push(Formula::not(f.clone()));
            }
        }
        let noms = self.nominals();
        let mut ats = Vec::new();
        for i in &noms {
            for f in &out {
                ats.push(Formula::at(i.clone(), f.clone()));
            }
        }
        out.extend(ats);
        subformula_closure(&out)
    }

    /// Parses the problem file format:
    ///
    /// ```text
    /// functor: kripke
    /// axioms:
    ///   (dia dia i' -> dia i')
    /// tbox:
    /// goal: (dia dia j' & ~ dia j')
    /// bounds: max_states=4 max_mult=2
    /// ```
    ///
    /// A section header may carry one formula on its own line; further
    /// formulas follow one per line. `sig:` and `rules:` take shipped names
    /// and default to the functor's signature and no rules; `agents:` names
    /// the players of a game functor. Bounds not given keep `defaults`.
    pub fn parse(text: &str, defaults: SearchBounds) -> Result<Self> {
        let mut functor = None;
        let mut agents: Option<Vec<String>> = None;
        let mut sig = None;
        let mut rules = None;
        let mut bounds = defaults;
        let mut lists: [Vec<(usize, String)>; 3] = Default::default();
        let mut current: Option<usize> = None;
        for (ln, raw) in text.lines().enumerate() {
            let ln = ln + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let header = line.split_once(':').filter(|(k, _)| SECTIONS.contains(&k.trim()));
            let Some((key, rest)) = header else {
                let slot = current.ok_or_else(|| Error::format(ln, "formula outside a section"))?;
                lists[slot].push((ln, line.to_string()));
                continue;
            };
            let rest = rest.trim();
            current = None;
            match key.trim() {
                "functor" => {
                    functor = Some(Functor::from_name(rest).ok_or_else(|| Error::format(ln, format!("unknown functor `{rest}`")))?)
                }
                "agents" => agents = Some(rest.split_whitespace().map(str::to_string).collect()),
                "sig" => {
                    sig = Some(Signature::named(rest).ok_or_else(|| Error::format(ln, format!("unknown signature `{rest}`")))?)
                }
                "rules" => {
                    rules = Some(RuleSet::named(rest).ok_or_else(|| Error::format(ln, format!("unknown rule set `{rest}`")))?)
                }
                "bounds" => bounds = parse_bounds(rest, bounds).map_err(|m| Error::format(ln, m))?,
                list => {
                    let slot = ["axioms", "tbox", "goal"].iter().position(|k| *k == list).expect("section name");
                    current = Some(slot);
                    if !rest.is_empty() {
                        lists[slot].push((ln, rest.to_string()));
                    }
                }
            }
        }
        let mut functor = functor.ok_or_else(|| Error::format(0, "missing `functor:` line"))?;
        if let (Functor::Game { agents: a }, Some(names)) = (&mut functor, agents) {
            *a = names;
        }
        let sig = sig.unwrap_or_else(|| functor.signature());
        let [axioms, tbox, goal] = lists.map(|items| {
            items
                .into_iter()
                .map(|(ln, s)| parse(&s, &sig).map_err(|e| Error::format(ln, e.to_string())))
                .collect::<Result<Vec<_>>>()
        });
        let prob = NamedModelProblem {
            functor,
            sig,
            rules: rules.unwrap_or_default(),
            axioms: axioms?,
            tbox: tbox?,
            goal: goal?,
            bounds,
        };
        prob.validate()?;
        Ok(prob)
    }
}

/// Reads `key=value` pairs over `base`. Keys: `max_states`, `max_mult`,
/// `max_strategies`, `max_nodes`.
pub fn parse_bounds(text: &str, base: SearchBounds) -> std::result::Result<SearchBounds, String> {
    let mut b = base;
    for item in text.split(|c: char| c.is_whitespace() || c == ',').filter(|s| !s.is_empty()) {
        let (k, v) = item.split_once('=').ok_or_else(|| format!("expected key=value, got `{item}`"))?;
        let num: u64 = v.trim().parse().map_err(|_| format!("`{v}` is not a number"))?;
        match k.trim() {
            "max_states" => b.max_states = num as usize,
            "max_mult" | "max_multiplicity" => b.max_multiplicity = num,
            "max_strategies" => b.max_strategies = num as usize,
            "max_nodes" => b.max_nodes = num,
            other => return Err(format!("unknown bound `{other}`")),
        }
    }
    Ok(b)
}
