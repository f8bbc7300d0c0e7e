//! Exhaustive checks of naturality and boundedness of liftings.

use std::collections::BTreeMap;
use std::ops::ControlFlow;

use super::functor::{for_each_tx, map_t, Functor, Lifting, SearchBounds, Selection, TxElem, INF};
use super::stateset::StateSet;
use crate::error::{Error, Result};

/// Visits the elements of `TX` that matter for evaluating `lift` with the
/// given first argument. For selection functions only the entry at that
/// argument is observable, so single-entry tables cover all cases; for
/// multigraphs infinite multiplicity is included as well.
fn for_each_relevant(
    functor: &Functor,
    n: usize,
    first_arg: StateSet,
    bounds: &SearchBounds,
    with_inf: bool,
    mut visit: impl FnMut(&TxElem) -> ControlFlow<()>,
) -> Result<ControlFlow<()>> {
    match functor {
        Functor::Selection => {
            for v in StateSet::all_subsets(n) {
                let t = TxElem::Sel(Selection { table: BTreeMap::from([(first_arg, v)]), default: StateSet::empty() });
                if visit(&t).is_break() {
                    return Ok(ControlFlow::Break(()));
                }
            }
            Ok(ControlFlow::Continue(()))
        }
        Functor::Multigraph if with_inf => {
            let base = bounds.max_multiplicity as usize + 2;
            if (base as u128).saturating_pow(n as u32) > bounds.max_nodes as u128 {
                return Err(Error::ResourceBound("multigraph enumeration".into()));
            }
            let mut d = vec![0usize; n];
            loop {
                let m = d.iter().map(|&v| if v == base - 1 { INF } else { v as u64 }).collect();
                if visit(&TxElem::Mult(m)).is_break() {
                    return Ok(ControlFlow::Break(()));
                }
                let mut i = 0;
                while i < n {
                    d[i] += 1;
                    if d[i] < base {
                        break;
                    }
                    d[i] = 0;
                    i += 1;
                }
                if i == n {
                    return Ok(ControlFlow::Continue(()));
                }
            }
        }
        _ => for_each_tx(functor, n, bounds, visit),
    }
}

fn for_each_tuple(n: usize, arity: usize, mut visit: impl FnMut(&[StateSet]) -> ControlFlow<()>) -> ControlFlow<()> {
    let m = 1u64 << n;
    let mut d = vec![0u64; arity];
    loop {
        let args: Vec<StateSet> = d.iter().map(|&v| StateSet(v)).collect();
        visit(&args)?;
        let mut i = 0;
        while i < arity {
            d[i] += 1;
            if d[i] < m {
                break;
            }
            d[i] = 0;
            i += 1;
        }
        if i == arity {
            return ControlFlow::Continue(());
        }
    }
}

/// A failure of the naturality square.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NaturalityFailure {
    pub f: Vec<usize>,
    pub t: TxElem,
    pub args: Vec<StateSet>,
}

/// Checks `lift_Y(args)` against `(Tf)^-1` of `lift_X(f^-1 args)` for every
/// `f: X -> Y` with `|X| = nx`, `|Y| = ny`, every enumerated `t` and every
/// argument tuple.
pub fn check_naturality(
    functor: &Functor,
    op: &str,
    nx: usize,
    ny: usize,
    bounds: &SearchBounds,
) -> Result<Option<NaturalityFailure>> {
    let lift = Lifting::new(functor, op)?;
    let arity = lift.arity();
    let mut failure = None;
    let mut f = vec![0usize; nx];
    if ny == 0 && nx > 0 {
        return Ok(None);
    }
    loop {
        let mut err = None;
        let flow = for_each_tuple(ny, arity, |args| {
            let pre: Vec<StateSet> = args.iter().map(|a| a.preimage(&f)).collect();
            let first = pre.first().copied().unwrap_or_default();
            let r = for_each_relevant(functor, nx, first, bounds, true, |t| {
                let lhs = lift.member(&map_t(&f, ny, t), args, ny);
                let rhs = lift.member(t, &pre, nx);
                if lhs != rhs {
                    failure = Some(NaturalityFailure { f: f.clone(), t: t.clone(), args: args.to_vec() });
                    return ControlFlow::Break(());
                }
                ControlFlow::Continue(())
            });
            match r {
                Ok(c) => c,
                Err(e) => {
                    err = Some(e);
                    ControlFlow::Break(())
                }
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
        if flow.is_break() {
            return Ok(failure);
        }
        let mut i = 0;
        while i < nx {
            f[i] += 1;
            if f[i] < ny {
                break;
            }
            f[i] = 0;
            i += 1;
        }
        if i == nx {
            return Ok(None);
        }
    }
}

/// A failure of `k`-boundedness: the lifting holds at `args` but at no
/// tuple obtained by shrinking the designated argument to at most `k`
/// elements, or vice versa.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundednessFailure {
    pub t: TxElem,
    pub args: Vec<StateSet>,
}

/// Checks that `op` is `k`-bounded over `n` states. Binary operators are
/// checked in their second argument.
pub fn check_bounded(functor: &Functor, op: &str, k: usize, n: usize, bounds: &SearchBounds) -> Result<bool> {
    Ok(bounded_failure(functor, op, k, n, bounds)?.is_none())
}

pub fn bounded_failure(
    functor: &Functor,
    op: &str,
    k: usize,
    n: usize,
    bounds: &SearchBounds,
) -> Result<Option<BoundednessFailure>> {
    let lift = Lifting::new(functor, op)?;
    let arity = lift.arity();
    let designated = arity - 1;
    let mut failure = None;
    let mut err = None;
    let _ = for_each_tuple(n, arity, |args| {
        let small: Vec<StateSet> = args[designated].subsets().filter(|b| b.len() <= k).collect();
        let r = for_each_relevant(functor, n, args[0], bounds, false, |t| {
            let lhs = lift.member(t, args, n);
            let rhs = small.iter().any(|&b| {
                let mut shrunk = args.to_vec();
                shrunk[designated] = b;
                lift.member(t, &shrunk, n)
            });
            if lhs != rhs {
                failure = Some(BoundednessFailure { t: t.clone(), args: args.to_vec() });
                return ControlFlow::Break(());
            }
            ControlFlow::Continue(())
        });
        match r {
            Ok(c) => c,
            Err(e) => {
                err = Some(e);
                ControlFlow::Break(())
            }
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(failure),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dia_is_one_bounded_box_is_not() {
        let b = SearchBounds::default();
        assert!(check_bounded(&Functor::Kripke, "dia", 1, 3, &b).unwrap());
        assert!(!check_bounded(&Functor::Kripke, "box", 1, 2, &b).unwrap());
        assert!(!check_bounded(&Functor::Kripke, "<1>", 1, 3, &b).unwrap());
    }

    #[test]
    fn graded_bound() {
        let b = SearchBounds { max_multiplicity: 3, ..SearchBounds::default() };
        assert!(check_bounded(&Functor::Multigraph, "<1>", 2, 3, &b).unwrap());
        assert!(!check_bounded(&Functor::Multigraph, "<1>", 1, 3, &b).unwrap());
    }

    #[test]
    fn would_is_one_bounded_in_second_argument() {
        let b = SearchBounds::default();
        assert!(check_bounded(&Functor::Selection, ">", 1, 2, &b).unwrap());
        assert!(!check_bounded(&Functor::Selection, "=>", 1, 2, &b).unwrap());
    }

    #[test]
    fn monotone_dia_is_not_bounded() {
        // {{0},{1},{0,1}} is upward closed; dia {0,1} holds but neither
        // dia {0} nor dia {1} does.
        let fail = bounded_failure(&Functor::Monotone, "dia", 1, 2, &SearchBounds::default()).unwrap();
        assert!(fail.is_some());
    }

    #[test]
    fn counting_over_sets_is_not_natural() {
        // merging two successors into one lowers the count
        let fail = check_naturality(&Functor::Kripke, "<1>", 2, 1, &SearchBounds::default()).unwrap();
        assert!(fail.is_some());
    }

    #[test]
    fn naturality_small() {
        let b = SearchBounds { max_multiplicity: 2, ..SearchBounds::default() };
        for (f, op) in [(Functor::Kripke, "box"), (Functor::Multigraph, "<1>"), (Functor::Selection, "=>"), (Functor::Neighborhood, "dia")] {
            assert_eq!(check_naturality(&f, op, 2, 2, &b).unwrap(), None, "{f} {op}");
        }
    }
}
