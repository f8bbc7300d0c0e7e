//! Hilbert-style proof scripts and their checker.
//!
//! The calculus has propositional tautologies, the hybrid axioms, modus
//! ponens, `@`-generalization, instances of one-step rules, pure axioms,
//! the `Name` rule, the `Paste` rule for bounded operators and the `DA`
//! axiom for the `dn` binder. Lines are either *global* (valid in every
//! model of the TBox) or *local* (true wherever the local assumptions
//! hold); rules that generalize over states only accept global premises.

mod check;
mod fixtures;
mod rules;
mod script;

pub use check::{check_derives, check_proof, paste_premise, Reject, RejectReason, Verdict};
pub use fixtures::{derived_rule_fixtures, Fixture};
pub use rules::{is_one_step, is_propositional, OneStepRule, RuleSet};
pub use script::{Justification, ProofLine, ProofScript};

use crate::syntax::{Formula, Nominal, Signature};

/// Names of the hybrid axiom schemes. `mob` is parametric in the operator
/// and written `mob:<op>`.
pub const AXIOM_NAMES: [&str; 8] = ["atintro", "mob", "nobot", "atneg", "atand", "refl", "sym", "nom"];

fn p(s: &str) -> Formula {
    Formula::prop(s)
}

fn nom(s: &str) -> Formula {
    Formula::nom(Nominal::new(s))
}

fn at(i: &str, f: Formula) -> Formula {
    Formula::at(Nominal::new(i), f)
}

/// The scheme behind an axiom name, over variables `p`, `q`, `q1..qn` and
/// nominals `i`, `j`.
///
/// * `atintro`: `(i' & p) -> @i' p`
/// * `mob:<op>`: `@i' p -> (op(q1..qn) <-> op((@i' p & q1)..(@i' p & qn)))`
/// * `nobot`: `~ @i' false`
/// * `atneg`: `~ @i' p <-> @i' ~ p`
/// * `atand`: `@i' (p & q) <-> (@i' p & @i' q)`
/// * `refl`: `@i' i'`
/// * `sym`: `@i' j' <-> @j' i'`
/// * `nom`: `(@i' j' & @j' p) -> @i' p`
pub fn axiom_scheme(name: &str, sig: &Signature) -> Option<Formula> {
    Some(match name {
        "atintro" => Formula::implies(Formula::and(nom("i"), p("p")), at("i", p("p"))),
        "nobot" => Formula::not(at("i", Formula::bot())),
        "atneg" => Formula::iff(Formula::not(at("i", p("p"))), at("i", Formula::not(p("p")))),
        "atand" => Formula::iff(at("i", Formula::and(p("p"), p("q"))), Formula::and(at("i", p("p")), at("i", p("q")))),
        "refl" => at("i", nom("i")),
        "sym" => Formula::iff(at("i", nom("j")), at("j", nom("i"))),
        "nom" => Formula::implies(Formula::and(at("i", nom("j")), at("j", p("p"))), at("i", p("p"))),
        _ => {
            let op = name.strip_prefix("mob:")?;
            let decl = sig.get(op)?;
            let qs: Vec<Formula> = (1..=decl.arity).map(|k| p(&format!("q{k}"))).collect();
            let guarded = qs.iter().map(|q| Formula::and(at("i", p("p")), q.clone())).collect();
            Formula::implies(
                at("i", p("p")),
                Formula::iff(Formula::modal(op, qs), Formula::modal(op, guarded)),
            )
        }
    })
}

/// Every axiom scheme for the operators of `sig`.
pub fn all_axiom_schemes(sig: &Signature) -> Vec<(String, Formula)> {
    let mut out = Vec::new();
    for name in AXIOM_NAMES {
        if name == "mob" {
            for op in sig.ops() {
                let full = format!("mob:{}", op.name);
                let f = axiom_scheme(&full, sig).expect("declared operator");
                out.push((full, f));
            }
        } else {
            out.push((name.to_string(), axiom_scheme(name, sig).expect("known axiom")));
        }
    }
    out
}

/// `@i ((dn j. phi) <-> phi[i/j])`.
pub fn da_instance(i: &Nominal, j: &Nominal, phi: &Formula) -> Formula {
    let renamed = crate::syntax::substitute(phi, &crate::syntax::Substitution::rename(j.clone(), i.clone()));
    Formula::at(i.clone(), Formula::iff(Formula::down(j.clone(), phi.clone()), renamed))
}
