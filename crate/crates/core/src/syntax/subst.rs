use std::collections::{BTreeMap, BTreeSet};

use super::formula::{fresh_nominal, Formula, Nominal};

/// Simultaneous substitution of formulas for propositional variables and of
/// nominals for (free) nominals.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Substitution {
    pub props: BTreeMap<String, Formula>,
    pub noms: BTreeMap<Nominal, Nominal>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_prop(mut self, p: impl Into<String>, f: Formula) -> Self {
        self.props.insert(p.into(), f);
        self
    }

    pub fn with_nom(mut self, from: impl Into<Nominal>, to: impl Into<Nominal>) -> Self {
        self.noms.insert(from.into(), to.into());
        self
    }

    /// The single nominal renaming `[to/from]`.
    pub fn rename(from: impl Into<Nominal>, to: impl Into<Nominal>) -> Self {
        Substitution::new().with_nom(from, to)
    }

    pub fn is_empty(&self) -> bool {
        self.props.is_empty() && self.noms.is_empty()
    }

    pub fn apply(&self, f: &Formula) -> Formula {
        substitute(f, self)
    }

    /// `self` followed by `then`: `φ(self;then) = (φ self) then`, computed
    /// on the propositional part.
    pub fn compose(&self, then: &Substitution) -> Substitution {
        let mut props: BTreeMap<String, Formula> =
            self.props.iter().map(|(p, f)| (p.clone(), then.apply(f))).collect();
        for (p, f) in &then.props {
            props.entry(p.clone()).or_insert_with(|| f.clone());
        }
        let mut noms: BTreeMap<Nominal, Nominal> = self
            .noms
            .iter()
            .map(|(i, j)| (i.clone(), then.noms.get(j).cloned().unwrap_or_else(|| j.clone())))
            .collect();
        for (i, j) in &then.noms {
            noms.entry(i.clone()).or_insert_with(|| j.clone());
        }
        Substitution { props, noms }
    }
}

/// Capture-avoiding simultaneous substitution. Bound nominals are never
/// replaced; a binder is renamed to a fresh nominal when a substituted term
/// would otherwise be captured by it.
pub fn substitute(f: &Formula, sigma: &Substitution) -> Formula {
    if sigma.is_empty() {
        return f.clone();
    }
    go(f, &sigma.props, &sigma.noms)
}

fn go(f: &Formula, props: &BTreeMap<String, Formula>, noms: &BTreeMap<Nominal, Nominal>) -> Formula {
    let nom = |n: &Nominal| noms.get(n).cloned().unwrap_or_else(|| n.clone());
    match f {
        Formula::Top => Formula::Top,
        Formula::Prop(p) => props.get(p).cloned().unwrap_or_else(|| f.clone()),
        Formula::Nom(n) => Formula::Nom(nom(n)),
        Formula::Not(a) => Formula::not(go(a, props, noms)),
        Formula::And(a, b) => Formula::and(go(a, props, noms), go(b, props, noms)),
        Formula::Modal(op, args) => Formula::Modal(op.clone(), args.iter().map(|a| go(a, props, noms)).collect()),
        Formula::At(n, a) => Formula::At(nom(n), Box::new(go(a, props, noms))),
        Formula::Down(j, body) => {
            let mut inner_noms = noms.clone();
            inner_noms.remove(j);
            // Nominals that substitution could introduce under this binder.
            let mut introduced: BTreeSet<Nominal> = BTreeSet::new();
            for p in body.props() {
                if let Some(img) = props.get(&p) {
                    introduced.extend(img.free_nominals());
                }
            }
            for n in body.free_nominals() {
                if let Some(img) = inner_noms.get(&n) {
                    introduced.insert(img.clone());
                }
            }
            if introduced.contains(j) {
                let mut avoid = introduced;
                avoid.extend(body.all_nominals());
                avoid.extend(inner_noms.keys().cloned());
                avoid.extend(inner_noms.values().cloned());
                for img in props.values() {
                    avoid.extend(img.all_nominals());
                }
                avoid.insert(j.clone());
                let fresh = fresh_nominal(&avoid);
                let renamed = go(body, &BTreeMap::new(), &BTreeMap::from([(j.clone(), fresh.clone())]));
                Formula::Down(fresh, Box::new(go(&renamed, props, &inner_noms)))
            } else {
                Formula::Down(j.clone(), Box::new(go(body, props, &inner_noms)))
            }
        }
    }
}
