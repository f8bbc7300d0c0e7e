use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::script::{Justification, ProofScript};
use super::{axiom_scheme, da_instance};
use crate::prop;
use crate::syntax::{substitute, Formula, Nominal};

/// Outcome of checking a script.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// The last line is justified; `global` tells whether it depends on
    /// local assumptions.
    Accepted { formula: Formula, global: bool },
    Rejected(Reject),
}

impl Verdict {
    pub fn is_accepted(&self) -> bool {
        matches!(self, Verdict::Accepted { .. })
    }
}

/// The earliest failing line (0 for problems with the script as a whole).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reject {
    pub line: usize,
    pub reason: RejectReason,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RejectReason {
    EmptyScript,
    ImpureAxiom(usize),
    BadReference(usize),
    IndexOutOfRange(String),
    LocalPremise(usize),
    NotTautology,
    UnknownAxiom(String),
    Mismatch { expected: Formula },
    MpMismatch,
    NameShape,
    SideCondition(String),
    UnknownOperator(String),
    NotBounded(String),
    PasteShape,
    BadSubstitution(String),
}

impl RejectReason {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            RejectReason::EmptyScript => "empty-script",
            RejectReason::ImpureAxiom(_) => "impure-axiom",
            RejectReason::BadReference(_) => "bad-reference",
            RejectReason::IndexOutOfRange(_) => "index-out-of-range",
            RejectReason::LocalPremise(_) => "local-premise",
            RejectReason::NotTautology => "not-tautology",
            RejectReason::UnknownAxiom(_) => "unknown-axiom",
            RejectReason::Mismatch { .. } => "mismatch",
            RejectReason::MpMismatch => "mp-mismatch",
            RejectReason::NameShape => "name-shape",
            RejectReason::SideCondition(_) => "side-condition",
            RejectReason::UnknownOperator(_) => "unknown-operator",
            RejectReason::NotBounded(_) => "not-bounded",
            RejectReason::PasteShape => "paste-shape",
            RejectReason::BadSubstitution(_) => "bad-substitution",
        }
    }
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RejectReason::EmptyScript => write!(f, "the script has no lines"),
            RejectReason::ImpureAxiom(k) => write!(f, "axiom {k} contains propositional variables"),
            RejectReason::BadReference(m) => write!(f, "line {m} does not precede this line"),
            RejectReason::IndexOutOfRange(what) => write!(f, "no {what}"),
            RejectReason::LocalPremise(m) => write!(f, "line {m} depends on local assumptions"),
            RejectReason::NotTautology => write!(f, "not a propositional tautology"),
            RejectReason::UnknownAxiom(n) => write!(f, "unknown axiom `{n}`"),
            RejectReason::Mismatch { expected } => write!(f, "expected `{expected}`"),
            RejectReason::MpMismatch => write!(f, "modus ponens premises do not match"),
            RejectReason::NameShape => write!(f, "premise is not of the form `i -> phi`"),
            RejectReason::SideCondition(m) => write!(f, "side condition violated: {m}"),
            RejectReason::UnknownOperator(op) => write!(f, "unknown operator `{op}`"),
            RejectReason::NotBounded(m) => write!(f, "{m}"),
            RejectReason::PasteShape => write!(f, "line is not of the form `@i op(phi) -> psi`"),
            RejectReason::BadSubstitution(m) => write!(f, "{m}"),
        }
    }
}

impl fmt::Display for Reject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {} ({})", self.line, self.reason, self.reason.code())
    }
}

/// `@j1 phi & .. & @jk phi & @i op(.., j1 | .. | jk, ..) -> psi`, where the
/// pasted argument `arg` of `args` is `phi`.
pub fn paste_premise(i: &Nominal, op: &str, args: &[Formula], arg: usize, noms: &[Nominal], psi: &Formula) -> Formula {
    let phi = &args[arg];
    let mut parts: Vec<Formula> = noms.iter().map(|j| Formula::at(j.clone(), phi.clone())).collect();
    let mut new_args = args.to_vec();
    new_args[arg] = Formula::disj(noms.iter().map(|j| Formula::nom(j.clone())));
    parts.push(Formula::at(i.clone(), Formula::modal(op, new_args)));
    Formula::implies(Formula::conj(parts), psi.clone())
}

struct Checker<'a> {
    script: &'a ProofScript,
    /// line number -> (formula, global)
    done: BTreeMap<usize, (&'a Formula, bool)>,
    context: BTreeSet<Nominal>,
}

impl<'a> Checker<'a> {
    fn get(&self, m: usize) -> Result<(&'a Formula, bool), RejectReason> {
        self.done.get(&m).copied().ok_or(RejectReason::BadReference(m))
    }

    fn global(&self, m: usize) -> Result<&'a Formula, RejectReason> {
        match self.get(m)? {
            (f, true) => Ok(f),
            _ => Err(RejectReason::LocalPremise(m)),
        }
    }

    fn expect(f: &Formula, expected: Formula) -> Result<(), RejectReason> {
        if f.alpha_eq(&expected) {
            Ok(())
        } else {
            Err(RejectReason::Mismatch { expected })
        }
    }

    fn index<'b, T>(list: &'b [T], k: usize, what: &str) -> Result<&'b T, RejectReason> {
        k.checked_sub(1).and_then(|i| list.get(i)).ok_or_else(|| RejectReason::IndexOutOfRange(format!("{what} {k}")))
    }

    fn line(&self, f: &Formula, just: &Justification) -> Result<bool, RejectReason> {
        let s = self.script;
        match just {
            Justification::Taut => {
                if prop::is_tautology(f) {
                    Ok(true)
                } else {
                    Err(RejectReason::NotTautology)
                }
            }
            Justification::Axiom { name, sub } => {
                let scheme = axiom_scheme(name, &s.sig).ok_or_else(|| RejectReason::UnknownAxiom(name.clone()))?;
                Self::expect(f, substitute(&scheme, sub))?;
                Ok(true)
            }
            Justification::Pure { index, sub } => {
                let ax = Self::index(&s.axioms, *index, "pure axiom")?;
                if !sub.props.is_empty() {
                    return Err(RejectReason::BadSubstitution("pure axioms only take nominal substitutions".into()));
                }
                Self::expect(f, substitute(ax, sub))?;
                Ok(true)
            }
            Justification::TBox(k) => {
                Self::expect(f, Self::index(&s.tbox, *k, "TBox formula")?.clone())?;
                Ok(true)
            }
            Justification::Local(k) => {
                Self::expect(f, Self::index(&s.local, *k, "local assumption")?.clone())?;
                Ok(false)
            }
            Justification::Mp(m, n) => {
                let (a, ga) = self.get(*m)?;
                let (b, gb) = self.get(*n)?;
                let fits = |imp: &Formula, ante: &Formula| {
                    imp.as_implication().is_some_and(|(l, r)| l.alpha_eq(ante) && r.alpha_eq(f))
                };
                if fits(b, a) || fits(a, b) {
                    Ok(ga && gb)
                } else {
                    Err(RejectReason::MpMismatch)
                }
            }
            Justification::AtGen(m, i) => {
                let g = self.global(*m)?;
                Self::expect(f, Formula::at(i.clone(), g.clone()))?;
                Ok(true)
            }
            Justification::Rule { index, sub, from } => {
                let rule = Self::index(&s.rules.rules, *index, "rule")?;
                let prem = self.global(*from)?;
                let want = substitute(&rule.premise, sub);
                if !prem.alpha_eq(&want) {
                    return Err(RejectReason::Mismatch { expected: want });
                }
                Self::expect(f, substitute(&rule.conclusion, sub))?;
                Ok(true)
            }
            Justification::Name(m, i) => {
                let g = self.global(*m)?;
                let (l, r) = g.as_implication().ok_or(RejectReason::NameShape)?;
                if *l != Formula::Nom(i.clone()) {
                    return Err(RejectReason::NameShape);
                }
                Self::expect(f, r.clone())?;
                if r.free_nominals().contains(i) {
                    return Err(RejectReason::SideCondition(format!("{i} occurs in the conclusion")));
                }
                if self.context.contains(i) {
                    return Err(RejectReason::SideCondition(format!("{i} occurs in the assumptions or axioms")));
                }
                Ok(true)
            }
            Justification::Paste { op, k, from, noms } => {
                let decl = s.sig.get(op).ok_or_else(|| RejectReason::UnknownOperator(op.clone()))?;
                let (arg, bound) = decl
                    .pasted_argument()
                    .ok_or_else(|| RejectReason::NotBounded(format!("`{op}` has no bounded argument to paste")))?;
                if bound as usize != *k {
                    return Err(RejectReason::NotBounded(format!("`{op}` is declared {bound}-bounded, not {k}-bounded")));
                }
                if noms.len() != *k {
                    return Err(RejectReason::SideCondition(format!("expected {k} nominals, found {}", noms.len())));
                }
                let (lhs, psi) = f.as_implication().ok_or(RejectReason::PasteShape)?;
                let Formula::At(i, inner) = lhs else { return Err(RejectReason::PasteShape) };
                let Formula::Modal(name, args) = inner.as_ref() else { return Err(RejectReason::PasteShape) };
                if name != op {
                    return Err(RejectReason::PasteShape);
                }
                let distinct: BTreeSet<&Nominal> = noms.iter().collect();
                if distinct.len() != noms.len() {
                    return Err(RejectReason::SideCondition("nominals are not pairwise distinct".into()));
                }
                let used = f.all_nominals();
                if let Some(j) = noms.iter().find(|j| used.contains(*j) || self.context.contains(*j)) {
                    return Err(RejectReason::SideCondition(format!("{j} is not fresh")));
                }
                let prem = self.global(*from)?;
                let want = paste_premise(i, op, args, arg, noms, psi);
                if !prem.alpha_eq(&want) {
                    return Err(RejectReason::Mismatch { expected: want });
                }
                Ok(true)
            }
            Justification::Da { i, j, body } => {
                Self::expect(f, da_instance(i, j, body))?;
                Ok(true)
            }
        }
    }
}

/// Checks every line of `script` in order and reports the first failure.
pub fn check_proof(script: &ProofScript) -> Verdict {
    let reject = |line, reason| Verdict::Rejected(Reject { line, reason });
    if let Some(k) = script.axioms.iter().position(|a| !a.is_pure()) {
        return reject(0, RejectReason::ImpureAxiom(k + 1));
    }
    let mut context = BTreeSet::new();
    for f in script.axioms.iter().chain(&script.tbox).chain(&script.local) {
        context.extend(f.all_nominals());
    }
    let mut c = Checker { script, done: BTreeMap::new(), context };
    let mut last = None;
    for line in &script.lines {
        if c.done.keys().next_back().is_some_and(|&n| n >= line.number) {
            return reject(line.number, RejectReason::BadReference(line.number));
        }
        match c.line(&line.formula, &line.just) {
            Ok(global) => {
                c.done.insert(line.number, (&line.formula, global));
                last = Some((&line.formula, global));
            }
            Err(reason) => return reject(line.number, reason),
        }
    }
    match last {
        Some((f, global)) => Verdict::Accepted { formula: f.clone(), global },
        None => reject(0, RejectReason::EmptyScript),
    }
}

fn conjuncts(f: &Formula, out: &mut Vec<Formula>) {
    match f {
        Formula::And(a, b) => {
            conjuncts(a, out);
            conjuncts(b, out);
        }
        other => out.push(other.clone()),
    }
}

/// Whether `script` witnesses `tbox; local |- goal`: it must only use the
/// given assumptions, be accepted, and end in `goal` (possibly relying on
/// local lines) or in `psi1 & .. & psin -> goal` with every `psi` local.
pub fn check_derives(tbox: &[Formula], local: &[Formula], goal: &Formula, script: &ProofScript) -> bool {
    let within = |used: &[Formula], allowed: &[Formula]| used.iter().all(|u| allowed.iter().any(|a| a.alpha_eq(u)));
    if !within(&script.tbox, tbox) || !within(&script.local, local) {
        return false;
    }
    let Verdict::Accepted { formula, global } = check_proof(script) else { return false };
    if formula.alpha_eq(goal) {
        return true;
    }
    if !global {
        return false;
    }
    let Some((ante, cons)) = formula.as_implication() else { return false };
    if !cons.alpha_eq(goal) {
        return false;
    }
    let mut parts = Vec::new();
    conjuncts(ante, &mut parts);
    within(&parts, local)
}
