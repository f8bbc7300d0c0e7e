use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::syntax::{parse, Formula, Signature};

/// A one-step rule `premise / conclusion`: the premise is propositional,
/// the conclusion a boolean combination of modal operators applied to
/// propositional formulas.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OneStepRule {
    pub premise: Formula,
    pub conclusion: Formula,
}

/// Propositional over variables only.
pub fn is_propositional(f: &Formula) -> bool {
    match f {
        Formula::Top | Formula::Prop(_) => true,
        Formula::Not(a) => is_propositional(a),
        Formula::And(a, b) => is_propositional(a) && is_propositional(b),
        _ => false,
    }
}

/// In `Prop(Lambda(Prop(P)))`: one modal layer over propositional arguments.
pub fn is_one_step(f: &Formula) -> bool {
    match f {
        Formula::Top => true,
        Formula::Not(a) => is_one_step(a),
        Formula::And(a, b) => is_one_step(a) && is_one_step(b),
        Formula::Modal(_, args) => args.iter().all(is_propositional),
        _ => false,
    }
}

impl OneStepRule {
    pub fn new(premise: Formula, conclusion: Formula) -> Result<Self> {
        if !is_propositional(&premise) {
            return Err(Error::Config(format!("rule premise `{premise}` is not propositional")));
        }
        if !is_one_step(&conclusion) {
            return Err(Error::Config(format!("rule conclusion `{conclusion}` is not a one-step formula")));
        }
        Ok(OneStepRule { premise, conclusion })
    }

    /// Parses `premise / conclusion`.
    pub fn parse(text: &str, sig: &Signature) -> Result<Self> {
        let (p, c) = text.split_once('/').ok_or_else(|| Error::Config(format!("rule `{text}` has no `/`")))?;
        OneStepRule::new(parse(p, sig)?, parse(c, sig)?)
    }

    pub fn vars(&self) -> BTreeSet<String> {
        let mut v = self.premise.props();
        v.extend(self.conclusion.props());
        v
    }

    pub fn to_text(&self) -> String {
        format!("{} / {}", self.premise, self.conclusion)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleSet {
    pub name: String,
    pub rules: Vec<OneStepRule>,
}

/// The empty rule set, named `none`.
impl Default for RuleSet {
    fn default() -> Self {
        RuleSet { name: "none".into(), rules: Vec::new() }
    }
}

fn p(s: &str) -> Formula {
    Formula::prop(s)
}

fn m(op: &str, a: Formula) -> Formula {
    Formula::modal(op, vec![a])
}

impl RuleSet {
    /// Rule file: one `premise / conclusion` per line, `#` comments.
    pub fn parse(name: &str, text: &str, sig: &Signature) -> Result<Self> {
        let mut rules = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            rules.push(OneStepRule::parse(line, sig).map_err(|e| Error::format(ln + 1, e.to_string()))?);
        }
        Ok(RuleSet { name: name.into(), rules })
    }

    pub fn to_text(&self) -> String {
        self.rules.iter().map(|r| r.to_text() + "\n").collect()
    }

    /// Hybrid K: `a / box a`, `(a & b -> c) / (box a & box b -> box c)`, and
    /// the duality `(a <-> ~ b) / (dia a <-> ~ box b)` since `dia` is a
    /// primitive operator here.
    pub fn k() -> Self {
        let (a, b, c) = (p("a"), p("b"), p("c"));
        RuleSet {
            name: "K".into(),
            rules: vec![
                OneStepRule { premise: a.clone(), conclusion: m("box", a.clone()) },
                OneStepRule {
                    premise: Formula::implies(Formula::and(a.clone(), b.clone()), c.clone()),
                    conclusion: Formula::implies(Formula::and(m("box", a.clone()), m("box", b.clone())), m("box", c)),
                },
                duality("dia", "box"),
            ],
        }
    }

    /// Graded rules: for `n + m <= 3` and grades up to 2,
    /// `sum_i [a_i] <= sum_j [b_j]` pointwise yields
    /// `/\ <k_i> a_i -> \/ <l_j> b_j` whenever `sum (k_i + 1) >= 1 + sum l_j`.
    /// Plus the links of `dia` and `box` with `<0>`.
    pub fn graded() -> Self {
        let mut rules = Vec::new();
        for n in 1..=3usize {
            for mm in 0..=(3 - n) {
                let a: Vec<Formula> = (1..=n).map(|i| p(&format!("a{i}"))).collect();
                let b: Vec<Formula> = (1..=mm).map(|j| p(&format!("b{j}"))).collect();
                let premise = counting_premise(&a, &b);
                for_each_grades(n + mm, 2, |g| {
                    let (ks, ls) = g.split_at(n);
                    let lhs: u32 = ks.iter().map(|k| k + 1).sum();
                    let rhs: u32 = 1 + ls.iter().sum::<u32>();
                    if lhs < rhs {
                        return;
                    }
                    let ante = Formula::conj(a.iter().zip(ks).map(|(x, k)| m(&format!("<{k}>"), x.clone())));
                    let cons = Formula::disj(b.iter().zip(ls).map(|(x, l)| m(&format!("<{l}>"), x.clone())));
                    rules.push(OneStepRule { premise: premise.clone(), conclusion: Formula::implies(ante, cons) });
                });
            }
        }
        rules.push(OneStepRule {
            premise: Formula::iff(p("a"), p("b")),
            conclusion: Formula::iff(m("dia", p("a")), m("<0>", p("b"))),
        });
        rules.push(duality("<0>", "box"));
        RuleSet { name: "graded".into(), rules }
    }

    /// Conditional logic CK for `n <= 2`:
    /// `(a0 <-> a_i for all i) & (b1 & .. & bn -> b0)` yields
    /// `/\ (a_i => b_i) -> (a0 => b0)`, plus
    /// `(a0 <-> a1) & (b0 <-> ~ b1) / ((a0 > b0) <-> ~ (a1 => b1))`.
    pub fn ck() -> Self {
        let mut rules = Vec::new();
        let imp = |a: Formula, b: Formula| Formula::modal("=>", vec![a, b]);
        for n in 0..=2usize {
            let a: Vec<Formula> = (0..=n).map(|i| p(&format!("a{i}"))).collect();
            let b: Vec<Formula> = (0..=n).map(|i| p(&format!("b{i}"))).collect();
            let mut prem: Vec<Formula> = (1..=n).map(|i| Formula::iff(a[0].clone(), a[i].clone())).collect();
            prem.push(Formula::implies(Formula::conj(b[1..].iter().cloned()), b[0].clone()));
            let ante = Formula::conj((1..=n).map(|i| imp(a[i].clone(), b[i].clone())));
            rules.push(OneStepRule {
                premise: Formula::conj(prem),
                conclusion: Formula::implies(ante, imp(a[0].clone(), b[0].clone())),
            });
        }
        rules.push(OneStepRule {
            premise: Formula::and(Formula::iff(p("a0"), p("a1")), Formula::iff(p("b0"), Formula::not(p("b1")))),
            conclusion: Formula::iff(
                Formula::modal(">", vec![p("a0"), p("b0")]),
                Formula::not(imp(p("a1"), p("b1"))),
            ),
        });
        RuleSet { name: "CK".into(), rules }
    }

    /// Classical (neighbourhood) logic E: congruence and duality.
    pub fn e() -> Self {
        RuleSet {
            name: "E".into(),
            rules: vec![
                OneStepRule {
                    premise: Formula::iff(p("a"), p("b")),
                    conclusion: Formula::iff(m("box", p("a")), m("box", p("b"))),
                },
                duality("dia", "box"),
            ],
        }
    }

    /// Monotone logic M: monotony and duality.
    pub fn m() -> Self {
        RuleSet {
            name: "M".into(),
            rules: vec![
                OneStepRule {
                    premise: Formula::implies(p("a"), p("b")),
                    conclusion: Formula::implies(m("box", p("a")), m("box", p("b"))),
                },
                duality("dia", "box"),
            ],
        }
    }

    /// `K`, `graded`, `CK`, `E` or `M`.
    pub fn named(name: &str) -> Option<Self> {
        match name {
            "K" | "kripke" => Some(RuleSet::k()),
            "graded" | "multigraph" => Some(RuleSet::graded()),
            "CK" | "conditional" | "selection" => Some(RuleSet::ck()),
            "E" | "neighborhood" => Some(RuleSet::e()),
            "M" | "monotone" => Some(RuleSet::m()),
            _ => None,
        }
    }
}

/// `(a <-> ~ b) / (dia a <-> ~ box b)` for the given operator names.
fn duality(dia: &str, boxop: &str) -> OneStepRule {
    OneStepRule {
        premise: Formula::iff(p("a"), Formula::not(p("b"))),
        conclusion: Formula::iff(m(dia, p("a")), Formula::not(m(boxop, p("b")))),
    }
}

/// Pointwise `#{i | a_i} <= #{j | b_j}` as a propositional formula.
fn counting_premise(a: &[Formula], b: &[Formula]) -> Formula {
    let vars: Vec<&Formula> = a.iter().chain(b).collect();
    let mut forbidden = Vec::new();
    for mask in 0u32..(1 << vars.len()) {
        let na = (0..a.len()).filter(|i| mask & (1 << i) != 0).count();
        let nb = (a.len()..vars.len()).filter(|i| mask & (1 << i) != 0).count();
        if na > nb {
            let cell = Formula::conj(
                vars.iter()
                    .enumerate()
                    .map(|(i, v)| if mask & (1 << i) != 0 { (*v).clone() } else { Formula::not((*v).clone()) }),
            );
            forbidden.push(Formula::not(cell));
        }
    }
    Formula::conj(forbidden)
}

fn for_each_grades(len: usize, max: u32, mut visit: impl FnMut(&[u32])) {
    let mut g = vec![0u32; len];
    loop {
        visit(&g);
        let mut i = 0;
        while i < len && g[i] == max {
            g[i] = 0;
            i += 1;
        }
        if i == len {
            return;
        }
        g[i] += 1;
    }
}
