use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::ControlFlow;

use super::stateset::StateSet;
use crate::error::{Error, Result};
use crate::syntax::{OpShape, Signature};

/// Infinite multiplicity in a multigraph.
pub const INF: u64 = u64::MAX;

/// The shipped set functors.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Functor {
    Kripke,
    Multigraph,
    Neighborhood,
    Monotone,
    Selection,
    Game { agents: Vec<String> },
}

impl Functor {
    pub fn name(&self) -> &'static str {
        match self {
            Functor::Kripke => "kripke",
            Functor::Multigraph => "multigraph",
            Functor::Neighborhood => "neighborhood",
            Functor::Monotone => "monotone",
            Functor::Selection => "selection",
            Functor::Game { .. } => "game",
        }
    }

    /// Parses a functor name. Game frames start without agents.
    pub fn from_name(name: &str) -> Option<Functor> {
        Some(match name {
            "kripke" => Functor::Kripke,
            "multigraph" => Functor::Multigraph,
            "neighborhood" => Functor::Neighborhood,
            "monotone" => Functor::Monotone,
            "selection" => Functor::Selection,
            "game" => Functor::Game { agents: vec![] },
            _ => return None,
        })
    }

    pub fn all_names() -> [&'static str; 6] {
        ["kripke", "multigraph", "neighborhood", "monotone", "selection", "game"]
    }

    /// The signature shipped with this functor.
    pub fn signature(&self) -> Signature {
        match self {
            Functor::Kripke => Signature::hybrid_k(),
            Functor::Multigraph => Signature::graded(9),
            Functor::Neighborhood | Functor::Monotone => Signature::neighborhood(),
            Functor::Selection => Signature::conditional(),
            Functor::Game { agents } => Signature::coalition(agents),
        }
    }

    pub fn agents(&self) -> &[String] {
        match self {
            Functor::Game { agents } => agents,
            _ => &[],
        }
    }
}

impl fmt::Display for Functor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A selection function `P(X) -> P(X)`: listed entries plus a default for
/// every argument not in the table.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Selection {
    pub table: BTreeMap<StateSet, StateSet>,
    pub default: StateSet,
}

impl Selection {
    pub fn apply(&self, a: StateSet) -> StateSet {
        self.table.get(&a).copied().unwrap_or(self.default)
    }
}

/// One-shot game: finite nonempty strategy sets per agent and an outcome for
/// every strategy profile. Profiles are indexed in mixed radix with the
/// first agent least significant; strategies are 0-based here.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GameElem {
    pub strategies: Vec<usize>,
    pub outcome: Vec<usize>,
}

impl GameElem {
    pub fn profile_count(strategies: &[usize]) -> usize {
        strategies.iter().product()
    }

    pub fn decode(&self, mut idx: usize) -> Vec<usize> {
        self.strategies
            .iter()
            .map(|&s| {
                let d = idx % s;
                idx /= s;
                d
            })
            .collect()
    }

    pub fn encode(&self, profile: &[usize]) -> usize {
        profile.iter().zip(&self.strategies).rev().fold(0, |acc, (&d, &s)| acc * s + d)
    }

    /// Whether the agents in `coalition` (bitmask over agent indices) can
    /// force the outcome into `a`.
    pub fn effective(&self, coalition: StateSet, a: StateSet) -> bool {
        let sizes: Vec<usize> = (0..self.strategies.len())
            .map(|i| if coalition.contains(i) { self.strategies[i] } else { 1 })
            .collect();
        let mut good = vec![true; sizes.iter().product()];
        for (idx, &o) in self.outcome.iter().enumerate() {
            if a.contains(o) {
                continue;
            }
            let prof = self.decode(idx);
            let key = prof.iter().zip(&sizes).rev().fold(0, |acc, (&d, &s)| acc * s + if s == 1 { 0 } else { d });
            good[key] = false;
        }
        good.into_iter().any(|g| g)
    }
}

/// An element of `TX` for one of the shipped functors.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TxElem {
    /// Kripke: the successor set.
    Set(StateSet),
    /// Multigraph: multiplicity per state, [`INF`] allowed.
    Mult(Vec<u64>),
    /// Neighbourhood and monotone frames: the neighbourhood collection.
    Nbhd(BTreeSet<StateSet>),
    Sel(Selection),
    Game(GameElem),
}

impl TxElem {
    /// The least informative element: no successors, empty collections,
    /// one strategy per agent leading to state 0.
    pub fn empty(functor: &Functor, n: usize) -> TxElem {
        match functor {
            Functor::Kripke => TxElem::Set(StateSet::empty()),
            Functor::Multigraph => TxElem::Mult(vec![0; n]),
            Functor::Neighborhood | Functor::Monotone => TxElem::Nbhd(BTreeSet::new()),
            Functor::Selection => TxElem::Sel(Selection::default()),
            Functor::Game { agents } => TxElem::Game(GameElem { strategies: vec![1; agents.len()], outcome: vec![0] }),
        }
    }

    /// Checks that the element belongs to `T{0..n-1}` for `functor`.
    pub fn validate(&self, functor: &Functor, n: usize) -> std::result::Result<(), String> {
        let full = StateSet::full(n);
        match (functor, self) {
            (Functor::Kripke, TxElem::Set(s)) => s.is_subset(full).then_some(()).ok_or("successor out of range".into()),
            (Functor::Multigraph, TxElem::Mult(m)) => {
                (m.len() == n).then_some(()).ok_or(format!("expected {n} multiplicities, found {}", m.len()))
            }
            (Functor::Neighborhood, TxElem::Nbhd(s)) => {
                s.iter().all(|a| a.is_subset(full)).then_some(()).ok_or("neighbourhood out of range".into())
            }
            (Functor::Monotone, TxElem::Nbhd(s)) => {
                if !s.iter().all(|a| a.is_subset(full)) {
                    return Err("neighbourhood out of range".into());
                }
                if upward_closure(s.iter().copied(), n) != *s {
                    return Err("neighbourhood collection is not upward closed".into());
                }
                Ok(())
            }
            (Functor::Selection, TxElem::Sel(sel)) => {
                let ok = sel.default.is_subset(full) && sel.table.iter().all(|(a, b)| a.is_subset(full) && b.is_subset(full));
                ok.then_some(()).ok_or("selection entry out of range".into())
            }
            (Functor::Game { agents }, TxElem::Game(g)) => {
                if g.strategies.len() != agents.len() {
                    return Err(format!("expected strategy counts for {} agents", agents.len()));
                }
                if g.strategies.contains(&0) {
                    return Err("strategy sets must be nonempty".into());
                }
                if g.outcome.len() != GameElem::profile_count(&g.strategies) {
                    return Err("outcome table does not cover all strategy profiles".into());
                }
                g.outcome.iter().all(|&o| o < n).then_some(()).ok_or("outcome out of range".into())
            }
            _ => Err(format!("element kind does not match functor {functor}")),
        }
    }
}

/// All subsets of `{0..n-1}` containing one of `gens`.
pub fn upward_closure(gens: impl IntoIterator<Item = StateSet>, n: usize) -> BTreeSet<StateSet> {
    let gens: Vec<StateSet> = gens.into_iter().collect();
    StateSet::all_subsets(n).filter(|b| gens.iter().any(|g| g.is_subset(*b))).collect()
}

/// A predicate lifting, resolved for a functor and an operator name.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Lifting {
    KripkeBox,
    /// `dia` is `KripkeGraded(0)`. Higher grades count successors in the
    /// set, which is not natural in `X`; the Kripke signature does not
    /// declare them.
    KripkeGraded(u64),
    KripkePresburger(Vec<u64>, u64),
    MultBox,
    MultGraded(u64),
    MultPresburger(Vec<u64>, u64),
    NbhdBox,
    NbhdDia,
    SelImplies,
    SelWould,
    /// Coalition as a bitmask over agent indices.
    Coalition(StateSet),
}

impl Lifting {
    pub fn new(functor: &Functor, op: &str) -> Result<Lifting> {
        let unsupported = || Error::UnsupportedOperator { functor: functor.name().into(), op: op.into() };
        let shape = OpShape::of(op).map_err(|_| unsupported())?;
        let lift = match (functor, shape) {
            (Functor::Kripke, OpShape::Box) => Lifting::KripkeBox,
            (Functor::Kripke, OpShape::Dia) => Lifting::KripkeGraded(0),
            (Functor::Kripke, OpShape::Graded(k)) => Lifting::KripkeGraded(k as u64),
            (Functor::Kripke, OpShape::Presburger { coeffs, threshold }) => {
                Lifting::KripkePresburger(coeffs.iter().map(|&c| c as u64).collect(), threshold as u64)
            }
            (Functor::Multigraph, OpShape::Box) => Lifting::MultBox,
            (Functor::Multigraph, OpShape::Dia) => Lifting::MultGraded(0),
            (Functor::Multigraph, OpShape::Graded(k)) => Lifting::MultGraded(k as u64),
            (Functor::Multigraph, OpShape::Presburger { coeffs, threshold }) => {
                Lifting::MultPresburger(coeffs.iter().map(|&c| c as u64).collect(), threshold as u64)
            }
            (Functor::Neighborhood | Functor::Monotone, OpShape::Box) => Lifting::NbhdBox,
            (Functor::Neighborhood | Functor::Monotone, OpShape::Dia) => Lifting::NbhdDia,
            (Functor::Selection, OpShape::Implies) => Lifting::SelImplies,
            (Functor::Selection, OpShape::Would) => Lifting::SelWould,
            (Functor::Game { agents }, OpShape::Coalition(members)) => {
                let mut mask = StateSet::empty();
                for m in &members {
                    let idx = agents.iter().position(|a| a == m).ok_or_else(unsupported)?;
                    mask = mask.with(idx);
                }
                Lifting::Coalition(mask)
            }
            _ => return Err(unsupported()),
        };
        Ok(lift)
    }

    pub fn arity(&self) -> usize {
        match self {
            Lifting::KripkePresburger(c, _) | Lifting::MultPresburger(c, _) => c.len(),
            Lifting::SelImplies | Lifting::SelWould => 2,
            _ => 1,
        }
    }

    /// Whether `t` lies in the lifting applied to `args` (subsets of
    /// `{0..n-1}`).
    pub fn member(&self, t: &TxElem, args: &[StateSet], n: usize) -> bool {
        match (self, t) {
            (Lifting::KripkeBox, TxElem::Set(s)) => s.is_subset(args[0]),
            (Lifting::KripkeGraded(k), TxElem::Set(s)) => s.inter(args[0]).len() as u64 > *k,
            (Lifting::KripkePresburger(c, k), TxElem::Set(s)) => {
                c.iter().zip(args).map(|(a, arg)| a * s.inter(*arg).len() as u64).sum::<u64>() >= *k
            }
            (Lifting::MultBox, TxElem::Mult(m)) => m.iter().enumerate().all(|(x, &v)| v == 0 || args[0].contains(x)),
            (Lifting::MultGraded(k), TxElem::Mult(m)) => mass(m, args[0]) > *k,
            (Lifting::MultPresburger(c, k), TxElem::Mult(m)) => {
                c.iter().zip(args).fold(0u64, |acc, (a, arg)| acc.saturating_add(a.saturating_mul(mass(m, *arg)))) >= *k
            }
            (Lifting::NbhdBox, TxElem::Nbhd(s)) => s.contains(&args[0]),
            (Lifting::NbhdDia, TxElem::Nbhd(s)) => !s.contains(&args[0].complement(n)),
            (Lifting::SelImplies, TxElem::Sel(f)) => f.apply(args[0]).is_subset(args[1]),
            (Lifting::SelWould, TxElem::Sel(f)) => !f.apply(args[0]).inter(args[1]).is_empty(),
            (Lifting::Coalition(c), TxElem::Game(g)) => g.effective(*c, args[0]),
            (l, t) => panic!("lifting {l:?} applied to mismatched element {t:?}"),
        }
    }
}

fn mass(m: &[u64], a: StateSet) -> u64 {
    a.iter().filter(|&x| x < m.len()).fold(0u64, |acc, x| acc.saturating_add(m[x]))
}

/// `T f` for `f: {0..nx-1} -> {0..ny-1}` given as a table.
pub fn map_t(f: &[usize], ny: usize, t: &TxElem) -> TxElem {
    match t {
        TxElem::Set(s) => TxElem::Set(s.image(f)),
        TxElem::Mult(m) => {
            let mut out = vec![0u64; ny];
            for (x, &v) in m.iter().enumerate() {
                out[f[x]] = out[f[x]].saturating_add(v);
            }
            TxElem::Mult(out)
        }
        TxElem::Nbhd(s) => TxElem::Nbhd(StateSet::all_subsets(ny).filter(|b| s.contains(&b.preimage(f))).collect()),
        TxElem::Sel(sel) => TxElem::Sel(Selection {
            table: StateSet::all_subsets(ny).map(|b| (b, sel.apply(b.preimage(f)).image(f))).collect(),
            default: StateSet::empty(),
        }),
        TxElem::Game(g) => TxElem::Game(GameElem { strategies: g.strategies.clone(), outcome: g.outcome.iter().map(|&o| f[o]).collect() }),
    }
}

/// Finite caps on the search spaces.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBounds {
    pub max_states: usize,
    pub max_multiplicity: u64,
    pub max_strategies: usize,
    /// Budget on enumerated elements or search nodes.
    pub max_nodes: u64,
}

impl Default for SearchBounds {
    fn default() -> Self {
        SearchBounds { max_states: 8, max_multiplicity: 3, max_strategies: 2, max_nodes: 5_000_000 }
    }
}

/// Number of elements [`for_each_tx`] visits, saturating.
pub fn tx_count(functor: &Functor, n: usize, bounds: &SearchBounds) -> u128 {
    let pow = |b: u128, e: u128| -> u128 {
        let mut acc: u128 = 1;
        for _ in 0..e {
            acc = acc.saturating_mul(b);
            if acc == u128::MAX {
                break;
            }
        }
        acc
    };
    let subsets = if n >= 64 { u128::MAX } else { 1u128 << n };
    match functor {
        Functor::Kripke => subsets,
        Functor::Multigraph => pow(bounds.max_multiplicity as u128 + 1, n as u128),
        Functor::Neighborhood | Functor::Monotone => pow(2, subsets),
        Functor::Selection => pow(subsets, subsets),
        Functor::Game { agents } => {
            let mut total: u128 = 0;
            for_each_strategy_vector(agents.len(), bounds.max_strategies, |s| {
                total = total.saturating_add(pow(n as u128, GameElem::profile_count(s) as u128));
            });
            total
        }
    }
}

fn for_each_strategy_vector(agents: usize, max: usize, mut visit: impl FnMut(&[usize])) {
    let mut s = vec![1; agents];
    loop {
        visit(&s);
        let mut i = 0;
        while i < agents && s[i] == max {
            s[i] = 1;
            i += 1;
        }
        if i == agents {
            return;
        }
        s[i] += 1;
    }
}

/// Advances an odometer with digits below `base`; false after the last.
fn odometer(digits: &mut [usize], base: usize) -> bool {
    for d in digits.iter_mut() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}

/// Visits every element of `T{0..n-1}` within `bounds` (multiplicities up
/// to `max_multiplicity`, at most `max_strategies` strategies per agent).
/// Fails with `ResourceBound` when there are more than `max_nodes`.
pub fn for_each_tx(
    functor: &Functor,
    n: usize,
    bounds: &SearchBounds,
    mut visit: impl FnMut(&TxElem) -> ControlFlow<()>,
) -> Result<ControlFlow<()>> {
    let count = tx_count(functor, n, bounds);
    if count > bounds.max_nodes as u128 {
        return Err(Error::ResourceBound(format!("{count} elements of T over {n} states for {functor}")));
    }
    macro_rules! emit {
        ($e:expr) => {
            if visit(&$e).is_break() {
                return Ok(ControlFlow::Break(()));
            }
        };
    }
    match functor {
        Functor::Kripke => {
            for s in StateSet::all_subsets(n) {
                emit!(TxElem::Set(s));
            }
        }
        Functor::Multigraph => {
            let base = bounds.max_multiplicity as usize + 1;
            let mut d = vec![0usize; n];
            loop {
                emit!(TxElem::Mult(d.iter().map(|&v| v as u64).collect()));
                if !odometer(&mut d, base) {
                    break;
                }
            }
        }
        Functor::Neighborhood | Functor::Monotone => {
            let subsets: Vec<StateSet> = StateSet::all_subsets(n).collect();
            for mask in 0u64..(1u64 << subsets.len()) {
                let coll: BTreeSet<StateSet> =
                    subsets.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, s)| *s).collect();
                if *functor == Functor::Monotone && upward_closure(coll.iter().copied(), n) != coll {
                    continue;
                }
                emit!(TxElem::Nbhd(coll));
            }
        }
        Functor::Selection => {
            let m = 1usize << n;
            let mut d = vec![0usize; m];
            loop {
                let table = d.iter().enumerate().map(|(a, &b)| (StateSet(a as u64), StateSet(b as u64))).collect();
                emit!(TxElem::Sel(Selection { table, default: StateSet::empty() }));
                if !odometer(&mut d, m) {
                    break;
                }
            }
        }
        Functor::Game { agents } => {
            let mut stop = false;
            let mut vectors = Vec::new();
            for_each_strategy_vector(agents.len(), bounds.max_strategies, |s| vectors.push(s.to_vec()));
            for s in vectors {
                let mut d = vec![0usize; GameElem::profile_count(&s)];
                loop {
                    let g = TxElem::Game(GameElem { strategies: s.clone(), outcome: d.clone() });
                    if visit(&g).is_break() {
                        stop = true;
                        break;
                    }
                    if n == 0 || !odometer(&mut d, n) {
                        break;
                    }
                }
                if stop {
                    return Ok(ControlFlow::Break(()));
                }
            }
        }
    }
    Ok(ControlFlow::Continue(()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kripke_and_multigraph_liftings() {
        let t = TxElem::Set(StateSet::from_states([0, 1]));
        let a = StateSet::singleton(1);
        assert!(Lifting::KripkeGraded(0).member(&t, &[a], 2));
        assert!(!Lifting::KripkeBox.member(&t, &[a], 2));
        let m = TxElem::Mult(vec![0, 2]);
        assert!(Lifting::MultGraded(1).member(&m, &[a], 2));
        assert!(!Lifting::MultGraded(2).member(&m, &[a], 2));
        assert!(Lifting::MultBox.member(&m, &[a], 2));
        assert!(Lifting::MultGraded(5).member(&TxElem::Mult(vec![0, INF]), &[a], 2));
    }

    #[test]
    fn game_effectivity() {
        // Agent 0 picks the outcome, agent 1 is a dummy with two strategies.
        let g = GameElem { strategies: vec![2, 2], outcome: vec![0, 1, 0, 1] };
        let t = TxElem::Game(g.clone());
        assert_eq!(g.decode(1), vec![1, 0]);
        assert_eq!(g.encode(&[1, 1]), 3);
        let a0 = Lifting::Coalition(StateSet::singleton(0));
        let a1 = Lifting::Coalition(StateSet::singleton(1));
        assert!(a0.member(&t, &[StateSet::singleton(1)], 2));
        assert!(!a1.member(&t, &[StateSet::singleton(1)], 2));
        assert!(a1.member(&t, &[StateSet::full(2)], 2));
    }

    #[test]
    fn enumeration_counts() {
        let b = SearchBounds { max_multiplicity: 2, ..SearchBounds::default() };
        let count = |f: &Functor, n| {
            let mut c = 0u128;
            let _ = for_each_tx(f, n, &b, |_| {
                c += 1;
                ControlFlow::Continue(())
            })
            .unwrap();
            c
        };
        assert_eq!(count(&Functor::Kripke, 3), 8);
        assert_eq!(count(&Functor::Multigraph, 2), 9);
        assert_eq!(count(&Functor::Neighborhood, 2), 16);
        // Upward-closed families over two points: the 6 elements of the free
        // distributive lattice on two generators.
        assert_eq!(count(&Functor::Monotone, 2), 6);
        assert_eq!(count(&Functor::Selection, 1), 4);
        let game = Functor::Game { agents: vec!["a".into()] };
        assert_eq!(count(&game, 2), 2 + 4);
        assert_eq!(tx_count(&game, 2, &b), 6);
    }

    #[test]
    fn monotone_elements_are_upward_closed() {
        let _ = for_each_tx(&Functor::Monotone, 3, &SearchBounds::default(), |t| {
            assert!(t.validate(&Functor::Monotone, 3).is_ok());
            ControlFlow::Continue(())
        })
        .unwrap();
    }
}
