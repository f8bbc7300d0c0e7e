use std::collections::BTreeSet;
use std::fmt;

/// A nominal, stored without the trailing `'` of the surface syntax.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Nominal(String);

impl Nominal {
    pub fn new(name: impl Into<String>) -> Self {
        Nominal(name.into())
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Nominal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}'", self.0)
    }
}

impl From<&str> for Nominal {
    fn from(s: &str) -> Self {
        Nominal(s.trim_end_matches('\'').to_string())
    }
}

/// Hybrid formulas over a modal similarity type.
///
/// Only `Top`, negation and conjunction are primitive among the boolean
/// connectives; `false`, `|`, `->` and `<->` are built by the helper
/// constructors below and re-sugared by the printer.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Top,
    Prop(String),
    Nom(Nominal),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Modal(String, Vec<Formula>),
    At(Nominal, Box<Formula>),
    Down(Nominal, Box<Formula>),
}

impl Formula {
    pub fn top() -> Self {
        Formula::Top
    }

    pub fn bot() -> Self {
        Formula::Not(Box::new(Formula::Top))
    }

    pub fn prop(name: impl Into<String>) -> Self {
        Formula::Prop(name.into())
    }

    pub fn nom(n: impl Into<Nominal>) -> Self {
        Formula::Nom(n.into())
    }

    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::not(Formula::and(Formula::not(a), Formula::not(b)))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::not(Formula::and(a, Formula::not(b)))
    }

    pub fn iff(a: Formula, b: Formula) -> Self {
        Formula::and(
            Formula::implies(a.clone(), b.clone()),
            Formula::implies(b, a),
        )
    }

    pub fn modal(op: impl Into<String>, args: Vec<Formula>) -> Self {
        Formula::Modal(op.into(), args)
    }

    pub fn at(i: impl Into<Nominal>, f: Formula) -> Self {
        Formula::At(i.into(), Box::new(f))
    }

    pub fn down(i: impl Into<Nominal>, f: Formula) -> Self {
        Formula::Down(i.into(), Box::new(f))
    }

    /// Left-nested conjunction; the empty conjunction is `true`.
    pub fn conj<I: IntoIterator<Item = Formula>>(items: I) -> Self {
        let mut it = items.into_iter();
        match it.next() {
            None => Formula::Top,
            Some(first) => it.fold(first, Formula::and),
        }
    }

    /// Left-nested disjunction; the empty disjunction is `false`.
    pub fn disj<I: IntoIterator<Item = Formula>>(items: I) -> Self {
        let mut it = items.into_iter();
        match it.next() {
            None => Formula::bot(),
            Some(first) => it.fold(first, Formula::or),
        }
    }

    /// Splits `a -> b` (i.e. `~(a & ~b)`) into its two sides.
    pub fn as_implication(&self) -> Option<(&Formula, &Formula)> {
        match self {
            Formula::Not(inner) => match inner.as_ref() {
                Formula::And(a, nb) => match nb.as_ref() {
                    Formula::Not(b) => Some((a, b)),
                    _ => None,
                },
                _ => None,
            },
            _ => None,
        }
    }

    /// Splits `a <-> b` into its two sides.
    pub fn as_iff(&self) -> Option<(&Formula, &Formula)> {
        match self {
            Formula::And(l, r) => {
                let (a, b) = l.as_implication()?;
                let (b2, a2) = r.as_implication()?;
                (a == a2 && b == b2).then_some((a, b))
            }
            _ => None,
        }
    }

    /// Splits `a | b` (i.e. `~(~a & ~b)`) into its two sides.
    pub fn as_disjunction(&self) -> Option<(&Formula, &Formula)> {
        let (na, b) = self.as_implication()?;
        match na {
            Formula::Not(a) => Some((a, b)),
            _ => None,
        }
    }

    /// Propositional variables, propositional constants and nominals.
    pub fn is_atomic(&self) -> bool {
        matches!(self, Formula::Top | Formula::Prop(_) | Formula::Nom(_)) || *self == Formula::bot()
    }

    /// True iff no propositional variable occurs.
    pub fn is_pure(&self) -> bool {
        match self {
            Formula::Top | Formula::Nom(_) => true,
            Formula::Prop(_) => false,
            Formula::Not(a) | Formula::At(_, a) | Formula::Down(_, a) => a.is_pure(),
            Formula::And(a, b) => a.is_pure() && b.is_pure(),
            Formula::Modal(_, args) => args.iter().all(Formula::is_pure),
        }
    }

    pub fn free_nominals(&self) -> BTreeSet<Nominal> {
        let mut out = BTreeSet::new();
        let mut bound = Vec::new();
        self.collect_free(&mut bound, &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Nominal>, out: &mut BTreeSet<Nominal>) {
        match self {
            Formula::Top | Formula::Prop(_) => {}
            Formula::Nom(n) => {
                if !bound.contains(n) {
                    out.insert(n.clone());
                }
            }
            Formula::Not(a) => a.collect_free(bound, out),
            Formula::And(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Modal(_, args) => args.iter().for_each(|a| a.collect_free(bound, out)),
            Formula::At(n, a) => {
                if !bound.contains(n) {
                    out.insert(n.clone());
                }
                a.collect_free(bound, out);
            }
            Formula::Down(n, a) => {
                bound.push(n.clone());
                a.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// Every nominal occurring anywhere, bound or free.
    pub fn all_nominals(&self) -> BTreeSet<Nominal> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| match f {
            Formula::Nom(n) | Formula::At(n, _) | Formula::Down(n, _) => {
                out.insert(n.clone());
            }
            _ => {}
        });
        out
    }

    pub fn props(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let Formula::Prop(p) = f {
                out.insert(p.clone());
            }
        });
        out
    }

    /// Names of modal operators used.
    pub fn operators(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let Formula::Modal(op, _) = f {
                out.insert(op.clone());
            }
        });
        out
    }

    /// Pre-order traversal.
    pub fn visit<F: FnMut(&Formula)>(&self, f: &mut F) {
        f(self);
        match self {
            Formula::Top | Formula::Prop(_) | Formula::Nom(_) => {}
            Formula::Not(a) | Formula::At(_, a) | Formula::Down(_, a) => a.visit(f),
            Formula::And(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            Formula::Modal(_, args) => args.iter().for_each(|a| a.visit(f)),
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |_| n += 1);
        n
    }

    /// Maximal nesting of modal operators.
    pub fn modal_depth(&self) -> usize {
        match self {
            Formula::Top | Formula::Prop(_) | Formula::Nom(_) => 0,
            Formula::Not(a) | Formula::At(_, a) | Formula::Down(_, a) => a.modal_depth(),
            Formula::And(a, b) => a.modal_depth().max(b.modal_depth()),
            Formula::Modal(_, args) => 1 + args.iter().map(Formula::modal_depth).max().unwrap_or(0),
        }
    }

    /// Immediate subformulas.
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Top | Formula::Prop(_) | Formula::Nom(_) => vec![],
            Formula::Not(a) | Formula::At(_, a) | Formula::Down(_, a) => vec![a],
            Formula::And(a, b) => vec![a, b],
            Formula::Modal(_, args) => args.iter().collect(),
        }
    }

    /// Structural equality up to renaming of `dn`-bound nominals.
    pub fn alpha_eq(&self, other: &Formula) -> bool {
        fn lookup(stack: &[Nominal], n: &Nominal) -> Option<usize> {
            stack.iter().rposition(|m| m == n)
        }
        fn same_nominal(sa: &[Nominal], a: &Nominal, sb: &[Nominal], b: &Nominal) -> bool {
            match (lookup(sa, a), lookup(sb, b)) {
                (Some(x), Some(y)) => x == y,
                (None, None) => a == b,
                _ => false,
            }
        }
        fn go(a: &Formula, sa: &mut Vec<Nominal>, b: &Formula, sb: &mut Vec<Nominal>) -> bool {
            match (a, b) {
                (Formula::Top, Formula::Top) => true,
                (Formula::Prop(p), Formula::Prop(q)) => p == q,
                (Formula::Nom(x), Formula::Nom(y)) => same_nominal(sa, x, sb, y),
                (Formula::Not(x), Formula::Not(y)) => go(x, sa, y, sb),
                (Formula::And(x1, x2), Formula::And(y1, y2)) => go(x1, sa, y1, sb) && go(x2, sa, y2, sb),
                (Formula::Modal(o1, xs), Formula::Modal(o2, ys)) => {
                    o1 == o2 && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| go(x, sa, y, sb))
                }
                (Formula::At(i, x), Formula::At(j, y)) => same_nominal(sa, i, sb, j) && go(x, sa, y, sb),
                (Formula::Down(i, x), Formula::Down(j, y)) => {
                    sa.push(i.clone());
                    sb.push(j.clone());
                    let r = go(x, sa, y, sb);
                    sa.pop();
                    sb.pop();
                    r
                }
                _ => false,
            }
        }
        go(self, &mut Vec::new(), other, &mut Vec::new())
    }

    /// Renames every bound nominal to a canonical de Bruijn-style name that
    /// cannot be written in the surface syntax, so that α-equivalent formulas
    /// become structurally equal.
    pub fn alpha_normal(&self) -> Formula {
        fn go(f: &Formula, stack: &mut Vec<Nominal>) -> Formula {
            let rename = |n: &Nominal, stack: &Vec<Nominal>| match stack.iter().rposition(|m| m == n) {
                Some(k) => Nominal::new(format!("#{k}")),
                None => n.clone(),
            };
            match f {
                Formula::Top | Formula::Prop(_) => f.clone(),
                Formula::Nom(n) => Formula::Nom(rename(n, stack)),
                Formula::Not(a) => Formula::not(go(a, stack)),
                Formula::And(a, b) => Formula::and(go(a, stack), go(b, stack)),
                Formula::Modal(op, args) => Formula::Modal(op.clone(), args.iter().map(|a| go(a, stack)).collect()),
                Formula::At(n, a) => Formula::At(rename(n, stack), Box::new(go(a, stack))),
                Formula::Down(n, a) => {
                    let depth = stack.len();
                    stack.push(n.clone());
                    let body = go(a, stack);
                    stack.pop();
                    Formula::Down(Nominal::new(format!("#{depth}")), Box::new(body))
                }
            }
        }
        go(self, &mut Vec::new())
    }
}

impl From<String> for Nominal {
    fn from(s: String) -> Self {
        Nominal(s)
    }
}

/// Lowest-index nominal `i0, i1, ...` not in `avoid`.
pub fn fresh_nominal<'a, I>(avoid: I) -> Nominal
where
    I: IntoIterator<Item = &'a Nominal>,
{
    let taken: BTreeSet<&str> = avoid.into_iter().map(Nominal::name).collect();
    (0u64..)
        .map(|k| format!("i{k}"))
        .find(|name| !taken.contains(name.as_str()))
        .map(Nominal)
        .expect("countably many candidates")
}

/// `k` pairwise distinct fresh nominals, in increasing index order.
pub fn fresh_nominals(avoid: &BTreeSet<Nominal>, k: usize) -> Vec<Nominal> {
    let mut taken = avoid.clone();
    let mut out = Vec::with_capacity(k);
    for _ in 0..k {
        let n = fresh_nominal(&taken);
        taken.insert(n.clone());
        out.push(n);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dia(f: Formula) -> Formula {
        Formula::modal("dia", vec![f])
    }

    #[test]
    fn fresh_nominal_scheme() {
        assert_eq!(fresh_nominal(&[]), Nominal::new("i0"));
        assert_eq!(fresh_nominal(&[Nominal::new("i0")]), Nominal::new("i1"));
        let avoid = [Nominal::new("i0"), Nominal::new("i1"), Nominal::new("i2")];
        assert_eq!(fresh_nominal(&avoid), Nominal::new("i3"));
        assert_eq!(fresh_nominal(&[Nominal::new("i1")]), Nominal::new("i0"));
    }

    #[test]
    fn free_nominals_examples() {
        let i = || Formula::nom("i");
        let j = || Formula::nom("j");
        assert_eq!(dia(dia(i())).free_nominals(), BTreeSet::from([Nominal::new("i")]));
        let bound = Formula::down("i", Formula::at("i", Formula::prop("p")));
        assert!(bound.free_nominals().is_empty());
        let sym = Formula::implies(
            Formula::and(i(), Formula::modal("<2>", vec![j()])),
            Formula::at("j", Formula::modal("<2>", vec![i()])),
        );
        assert_eq!(sym.free_nominals(), BTreeSet::from([Nominal::new("i"), Nominal::new("j")]));
    }

    #[test]
    fn purity() {
        let trans = Formula::implies(dia(dia(Formula::nom("i"))), dia(Formula::nom("i")));
        assert!(trans.is_pure());
        assert!(!Formula::at("i", Formula::prop("p")).is_pure());
        let p = Formula::prop("p");
        let would = |a: Formula, b: Formula| Formula::modal(">", vec![a, b]);
        let cond = Formula::implies(
            would(p.clone(), would(p.clone(), Formula::nom("i"))),
            would(p, Formula::nom("i")),
        );
        assert!(!cond.is_pure());
    }

    #[test]
    fn alpha_equivalence() {
        let a = Formula::down("j", dia(Formula::nom("j")));
        let b = Formula::down("k", dia(Formula::nom("k")));
        let c = Formula::down("k", dia(Formula::nom("j")));
        assert!(a.alpha_eq(&b));
        assert!(!a.alpha_eq(&c));
        assert_eq!(a.alpha_normal(), b.alpha_normal());
        assert_ne!(a.alpha_normal(), c.alpha_normal());
    }

    #[test]
    fn sugar_roundtrip() {
        let (p, q) = (Formula::prop("p"), Formula::prop("q"));
        let imp = Formula::implies(p.clone(), q.clone());
        assert_eq!(imp.as_implication(), Some((&p, &q)));
        let iff = Formula::iff(p.clone(), q.clone());
        assert_eq!(iff.as_iff(), Some((&p, &q)));
        let or = Formula::or(p.clone(), q.clone());
        assert_eq!(or.as_disjunction(), Some((&p, &q)));
    }
}
