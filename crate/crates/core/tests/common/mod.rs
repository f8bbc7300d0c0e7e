//! Test oracles shared by the integration suites. Nothing here calls the
//! library's evaluators; formulas are interpreted directly over bitmasks.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use hycoa::coalgebra::{Functor, GameElem, HybridModel, Selection, StateSet, TxElem};
use hycoa::syntax::{print, Formula, Nominal};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random formula over `p`, `q`, nominals `i`, `j`, `box`, `dia`, `@` and
/// the boolean connectives, with modal depth at most `depth`.
pub fn random_formula(r: &mut ChaCha8Rng, depth: usize, budget: usize) -> Formula {
    let atom = |r: &mut ChaCha8Rng| match r.gen_range(0..5) {
        0 => Formula::prop("p"),
        1 => Formula::prop("q"),
        2 => Formula::nom("i"),
        3 => Formula::nom("j"),
        _ => {
            if r.gen_bool(0.5) {
                Formula::top()
            } else {
                Formula::bot()
            }
        }
    };
    if budget <= 1 {
        return atom(r);
    }
    match r.gen_range(0..10) {
        0 | 1 => atom(r),
        2 => Formula::not(random_formula(r, depth, budget - 1)),
        3 | 4 => {
            let k = r.gen_range(1..budget);
            let a = random_formula(r, depth, k);
            let b = random_formula(r, depth, budget - k);
            match r.gen_range(0..4) {
                0 | 1 => Formula::and(a, b),
                2 => Formula::or(a, b),
                _ => Formula::implies(a, b),
            }
        }
        5 | 6 if depth > 0 => Formula::modal("dia", vec![random_formula(r, depth - 1, budget - 1)]),
        7 if depth > 0 => Formula::modal("box", vec![random_formula(r, depth - 1, budget - 1)]),
        8 => {
            let i = if r.gen_bool(0.5) { "i" } else { "j" };
            Formula::at(Nominal::new(i), random_formula(r, depth, budget - 1))
        }
        _ => Formula::not(random_formula(r, depth, budget - 1)),
    }
}

/// `count` pairwise distinct (by canonical form) formulas of modal depth at
/// most 2 over two variables and two nominals.
pub fn corpus(seed: u64, count: usize) -> Vec<Formula> {
    let mut r = rng(seed);
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    while out.len() < count {
        let budget = r.gen_range(2..9);
        let f = random_formula(&mut r, 2, budget);
        if seen.insert(print(&f.alpha_normal())) {
            out.push(f);
        }
    }
    out
}

/// Truth set of `f` in a Kripke model given by successor masks.
pub fn kripke_eval(f: &Formula, succ: &[u8], val: &BTreeMap<String, u8>, noms: &BTreeMap<Nominal, usize>) -> u8 {
    let n = succ.len();
    let full: u8 = ((1u16 << n) - 1) as u8;
    match f {
        Formula::Top => full,
        Formula::Prop(p) => val.get(p).copied().unwrap_or(0),
        Formula::Nom(i) => 1 << noms[i],
        Formula::Not(a) => full & !kripke_eval(a, succ, val, noms),
        Formula::And(a, b) => kripke_eval(a, succ, val, noms) & kripke_eval(b, succ, val, noms),
        Formula::At(i, a) => {
            if kripke_eval(a, succ, val, noms) & (1 << noms[i]) != 0 {
                full
            } else {
                0
            }
        }
        Formula::Modal(op, args) => {
            let a = kripke_eval(&args[0], succ, val, noms);
            let mut out = 0u8;
            for (s, &m) in succ.iter().enumerate() {
                let holds = match op.as_str() {
                    "box" => m & !a == 0,
                    "dia" => m & a != 0,
                    g => {
                        // <k> read over the support of the relation
                        let k: u32 = g.trim_start_matches('<').trim_end_matches('>').parse().expect("graded op");
                        (m & a).count_ones() > k
                    }
                };
                if holds {
                    out |= 1 << s;
                }
            }
            out
        }
        Formula::Down(..) => panic!("oracle does not interpret dn"),
    }
}

/// Smallest `n <= max_n` such that some Kripke model with `n` states
/// satisfies `f` somewhere.
pub fn kripke_brute_force(f: &Formula, max_n: usize) -> Option<usize> {
    let props: Vec<String> = f.props().into_iter().collect();
    let noms: Vec<Nominal> = f.free_nominals().into_iter().collect();
    for n in 1..=max_n {
        let cells = n * n;
        for frame in 0u32..(1 << cells) {
            let succ: Vec<u8> = (0..n).map(|s| ((frame >> (s * n)) & ((1 << n) - 1)) as u8).collect();
            for vbits in 0u32..(1 << (n * props.len())) {
                let val: BTreeMap<String, u8> = props
                    .iter()
                    .enumerate()
                    .map(|(k, p)| (p.clone(), ((vbits >> (k * n)) & ((1 << n) - 1)) as u8))
                    .collect();
                let mut place = vec![0usize; noms.len()];
                loop {
                    let assign: BTreeMap<Nominal, usize> = noms.iter().cloned().zip(place.iter().copied()).collect();
                    if kripke_eval(f, &succ, &val, &assign) != 0 {
                        return Some(n);
                    }
                    let mut k = 0;
                    while k < place.len() {
                        place[k] += 1;
                        if place[k] < n {
                            break;
                        }
                        place[k] = 0;
                        k += 1;
                    }
                    if k == place.len() {
                        break;
                    }
                }
            }
        }
    }
    None
}

/// `box a` as `~ <0> ~ a` and `dia a` as `<0> a`.
pub fn to_graded(f: &Formula) -> Formula {
    match f {
        Formula::Top | Formula::Prop(_) | Formula::Nom(_) => f.clone(),
        Formula::Not(a) => Formula::not(to_graded(a)),
        Formula::And(a, b) => Formula::and(to_graded(a), to_graded(b)),
        Formula::At(i, a) => Formula::at(i.clone(), to_graded(a)),
        Formula::Down(i, a) => Formula::down(i.clone(), to_graded(a)),
        Formula::Modal(op, args) => {
            let a = to_graded(&args[0]);
            match op.as_str() {
                "box" => Formula::not(Formula::modal("<0>", vec![Formula::not(a)])),
                "dia" => Formula::modal("<0>", vec![a]),
                other => Formula::modal(other, vec![a]),
            }
        }
    }
}

fn random_set(r: &mut ChaCha8Rng, n: usize) -> StateSet {
    StateSet::from_states((0..n).filter(|_| r.gen_bool(0.5)))
}

/// A random element of `T{0..n-1}`.
pub fn random_tx(r: &mut ChaCha8Rng, functor: &Functor, n: usize) -> TxElem {
    match functor {
        Functor::Kripke => TxElem::Set(random_set(r, n)),
        Functor::Multigraph => TxElem::Mult((0..n).map(|_| r.gen_range(0..4)).collect()),
        Functor::Neighborhood => {
            TxElem::Nbhd(StateSet::all_subsets(n).filter(|_| r.gen_bool(0.4)).collect())
        }
        Functor::Monotone => {
            let gens: Vec<StateSet> = (0..r.gen_range(0..3)).map(|_| random_set(r, n)).collect();
            TxElem::Nbhd(
                StateSet::all_subsets(n).filter(|s| gens.iter().any(|g| g.is_subset(*s))).collect(),
            )
        }
        Functor::Selection => TxElem::Sel(Selection {
            table: StateSet::all_subsets(n).map(|a| (a, random_set(r, n))).collect(),
            default: StateSet::empty(),
        }),
        Functor::Game { agents } => {
            let strategies: Vec<usize> = agents.iter().map(|_| r.gen_range(1..=2)).collect();
            let outcome = (0..GameElem::profile_count(&strategies)).map(|_| r.gen_range(0..n)).collect();
            TxElem::Game(GameElem { strategies, outcome })
        }
    }
}

/// A random model with `n` states, valuation for `props` and every nominal
/// of `noms` placed somewhere.
pub fn random_model(r: &mut ChaCha8Rng, functor: &Functor, n: usize, props: &[&str], noms: &[&str]) -> HybridModel {
    let mut m = HybridModel::with_size(functor.clone(), n);
    for c in 0..n {
        m.set_gamma(c, random_tx(r, functor, n));
    }
    for p in props {
        m.set_prop(*p, random_set(r, n));
    }
    for i in noms {
        m.set_nominal(*i, r.gen_range(0..n));
    }
    m
}

pub fn pick<'a, T>(r: &mut ChaCha8Rng, xs: &'a [T]) -> &'a T {
    xs.choose(r).expect("nonempty")
}

fn mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

fn bits(s: StateSet) -> u64 {
    s.0
}

/// Strategy profile of `idx` in mixed radix, first agent least significant.
pub fn profile(strategies: &[usize], mut idx: usize) -> Vec<usize> {
    strategies
        .iter()
        .map(|&s| {
            let d = idx % s;
            idx /= s;
            d
        })
        .collect()
}

fn grade(op: &str) -> Option<u64> {
    op.strip_prefix('<')?.strip_suffix('>')?.parse().ok()
}

/// Whether `t` lies in the lifting of `op` at `args`, read directly off the
/// definitions of the shipped functors.
pub fn oracle_member(functor: &Functor, op: &str, t: &TxElem, args: &[u64], n: usize) -> bool {
    let full = mask(n);
    match t {
        TxElem::Set(s) => {
            let s = bits(*s);
            match op {
                "box" => s & !args[0] == 0,
                "dia" => s & args[0] != 0,
                g => (s & args[0]).count_ones() as u64 > grade(g).expect("graded operator"),
            }
        }
        TxElem::Mult(m) => {
            let weight = |a: u64| -> u64 { (0..n).filter(|x| a >> x & 1 == 1).map(|x| m[x]).fold(0, u64::saturating_add) };
            if let Some(rest) = op.strip_prefix("sum{") {
                // sum{c1*#,..,cn*#}>=k
                let (terms, k) = rest.split_once("}>=").expect("presburger operator");
                let total = terms
                    .split(',')
                    .zip(args)
                    .map(|(t, &a)| t.trim().trim_end_matches("*#").parse::<u64>().unwrap().saturating_mul(weight(a)))
                    .fold(0, u64::saturating_add);
                return total >= k.parse().unwrap();
            }
            match op {
                "box" => (0..n).all(|x| m[x] == 0 || args[0] >> x & 1 == 1),
                "dia" => weight(args[0]) > 0,
                g => weight(args[0]) > grade(g).expect("graded operator"),
            }
        }
        TxElem::Nbhd(ns) => {
            let has = |a: u64| ns.iter().any(|s| bits(*s) == a);
            match op {
                "box" => has(args[0]),
                "dia" => !has(full & !args[0]),
                _ => panic!("no operator {op} for {functor}"),
            }
        }
        TxElem::Sel(sel) => {
            let fa = sel.table.iter().find(|(k, _)| bits(**k) == args[0]).map(|(_, v)| bits(*v)).unwrap_or(bits(sel.default));
            match op {
                "=>" => fa & !args[1] == 0,
                ">" => fa & args[1] != 0,
                _ => panic!("no operator {op} for {functor}"),
            }
        }
        TxElem::Game(g) => {
            let inner = op.strip_prefix('[').and_then(|s| s.strip_suffix(']')).expect("coalition operator");
            let members: Vec<usize> = inner
                .split(',')
                .map(str::trim)
                .filter(|a| !a.is_empty())
                .map(|a| functor.agents().iter().position(|x| x == a).expect("known agent"))
                .collect();
            // exists a choice of the members such that every completion lands in A
            let count: usize = g.strategies.iter().product();
            let profiles: Vec<Vec<usize>> = (0..count).map(|i| profile(&g.strategies, i)).collect();
            profiles.iter().any(|choice| {
                profiles
                    .iter()
                    .enumerate()
                    .filter(|(_, p)| members.iter().all(|&a| p[a] == choice[a]))
                    .all(|(i, _)| args[0] >> g.outcome[i] & 1 == 1)
            })
        }
    }
}

/// Truth set of `f` in `m` with nominals looked up in `asg` first, then in
/// the model.
pub fn eval(m: &HybridModel, f: &Formula, asg: &BTreeMap<Nominal, usize>) -> u64 {
    let n = m.n();
    let full = mask(n);
    let place = |i: &Nominal| -> usize { *asg.get(i).or_else(|| m.noms.get(i)).unwrap_or_else(|| panic!("nominal {i} unplaced")) };
    match f {
        Formula::Top => full,
        Formula::Prop(p) => m.props.get(p).map(|s| bits(*s)).unwrap_or(0),
        Formula::Nom(i) => 1 << place(i),
        Formula::Not(a) => full & !eval(m, a, asg),
        Formula::And(a, b) => eval(m, a, asg) & eval(m, b, asg),
        Formula::At(i, a) => {
            if eval(m, a, asg) >> place(i) & 1 == 1 {
                full
            } else {
                0
            }
        }
        Formula::Down(i, a) => {
            let mut out = 0;
            for c in 0..n {
                let mut inner = asg.clone();
                inner.insert(i.clone(), c);
                if eval(m, a, &inner) >> c & 1 == 1 {
                    out |= 1 << c;
                }
            }
            out
        }
        Formula::Modal(op, args) => {
            let sets: Vec<u64> = args.iter().map(|a| eval(m, a, asg)).collect();
            (0..n).filter(|&c| oracle_member(&m.functor, op, &m.gamma[c], &sets, n)).fold(0, |acc, c| acc | 1 << c)
        }
    }
}

pub fn valid_in(m: &HybridModel, f: &Formula) -> bool {
    eval(m, f, &BTreeMap::new()) == mask(m.n())
}

/// A random formula over the operators `ops` (name, arity), the given
/// variables and nominals, optionally with `dn`.
pub fn random_sig_formula(
    r: &mut ChaCha8Rng,
    ops: &[(String, usize)],
    props: &[&str],
    noms: &[&str],
    budget: usize,
    down: bool,
) -> Formula {
    let atom = |r: &mut ChaCha8Rng| -> Formula {
        match r.gen_range(0..6) {
            0..=2 => Formula::prop(*pick(r, props)),
            3 | 4 if !noms.is_empty() => Formula::nom(Nominal::new(*pick(r, noms))),
            _ => {
                if r.gen_bool(0.5) {
                    Formula::top()
                } else {
                    Formula::bot()
                }
            }
        }
    };
    if budget <= 1 {
        return atom(r);
    }
    match r.gen_range(0..10) {
        0 => atom(r),
        1 | 2 => Formula::not(random_sig_formula(r, ops, props, noms, budget - 1, down)),
        3 | 4 => {
            let k = r.gen_range(1..budget);
            let a = random_sig_formula(r, ops, props, noms, k, down);
            let b = random_sig_formula(r, ops, props, noms, budget - k, down);
            if r.gen_bool(0.7) {
                Formula::and(a, b)
            } else {
                Formula::or(a, b)
            }
        }
        5..=7 => {
            let (op, arity) = pick(r, ops).clone();
            let each = ((budget - 1) / arity).max(1);
            Formula::modal(op, (0..arity).map(|_| random_sig_formula(r, ops, props, noms, each, down)).collect())
        }
        8 if !noms.is_empty() => Formula::at(Nominal::new(*pick(r, noms)), random_sig_formula(r, ops, props, noms, budget - 1, down)),
        9 if down && !noms.is_empty() => {
            Formula::down(Nominal::new(*pick(r, noms)), random_sig_formula(r, ops, props, noms, budget - 1, down))
        }
        _ => atom(r),
    }
}

/// Every element of `T{0..n-1}`, enumerated independently of the library:
/// multiplicities up to `max_mult`, up to `max_strat` strategies per agent,
/// selection functions as full tables.
pub fn all_tx(functor: &Functor, n: usize, max_mult: u64, max_strat: usize) -> Vec<TxElem> {
    let subsets: Vec<u64> = (0..1u64 << n).collect();
    let set = |b: u64| StateSet(b);
    match functor {
        Functor::Kripke => subsets.iter().map(|&b| TxElem::Set(set(b))).collect(),
        Functor::Multigraph => {
            let mut out = vec![vec![]];
            for _ in 0..n {
                out = out.into_iter().flat_map(|v: Vec<u64>| (0..=max_mult).map(move |k| [v.clone(), vec![k]].concat())).collect();
            }
            out.into_iter().map(TxElem::Mult).collect()
        }
        Functor::Neighborhood | Functor::Monotone => {
            let k = subsets.len();
            (0u64..1 << k)
                .map(|c| subsets.iter().filter(|&&s| c >> s & 1 == 1).map(|&s| set(s)).collect::<BTreeSet<_>>())
                .filter(|coll| {
                    *functor == Functor::Neighborhood
                        || coll.iter().all(|a| subsets.iter().all(|&b| bits(*a) & !b != 0 || coll.contains(&set(b))))
                })
                .map(TxElem::Nbhd)
                .collect()
        }
        Functor::Selection => {
            let k = subsets.len();
            let mut out = Vec::new();
            let total = (k as u64).pow(k as u32);
            for mut code in 0..total {
                let mut table = BTreeMap::new();
                for &a in &subsets {
                    table.insert(set(a), set(code % k as u64));
                    code /= k as u64;
                }
                out.push(TxElem::Sel(Selection { table, default: StateSet::empty() }));
            }
            out
        }
        Functor::Game { agents } => {
            let mut shapes = vec![vec![]];
            for _ in agents {
                shapes = shapes.into_iter().flat_map(|v: Vec<usize>| (1..=max_strat).map(move |k| [v.clone(), vec![k]].concat())).collect();
            }
            let mut out = Vec::new();
            for strategies in shapes {
                let count: usize = strategies.iter().product();
                for mut code in 0..n.pow(count as u32) {
                    let outcome = (0..count)
                        .map(|_| {
                            let o = code % n;
                            code /= n;
                            o
                        })
                        .collect();
                    out.push(TxElem::Game(GameElem { strategies: strategies.clone(), outcome }));
                }
            }
            out
        }
    }
}

/// `(T f)(t)` for `f: {0..nx-1} -> {0..ny-1}`.
pub fn push_forward(f: &[usize], ny: usize, t: &TxElem) -> TxElem {
    let pre = |b: u64| -> u64 { f.iter().enumerate().filter(|(_, &y)| b >> y & 1 == 1).fold(0, |acc, (x, _)| acc | 1 << x) };
    let img = |a: u64| -> u64 { f.iter().enumerate().filter(|(x, _)| a >> x & 1 == 1).fold(0, |acc, (_, &y)| acc | 1 << y) };
    match t {
        TxElem::Set(s) => TxElem::Set(StateSet(img(bits(*s)))),
        TxElem::Mult(m) => {
            let mut out = vec![0u64; ny];
            for (x, &y) in f.iter().enumerate() {
                out[y] = out[y].saturating_add(m[x]);
            }
            TxElem::Mult(out)
        }
        TxElem::Nbhd(ns) => TxElem::Nbhd(
            (0..1u64 << ny).filter(|&b| ns.iter().any(|s| bits(*s) == pre(b))).map(StateSet).collect(),
        ),
        TxElem::Sel(sel) => {
            let table = (0..1u64 << ny)
                .map(|b| {
                    let a = pre(b);
                    let v = sel.table.iter().find(|(k, _)| bits(**k) == a).map(|(_, v)| bits(*v)).unwrap_or(bits(sel.default));
                    (StateSet(b), StateSet(img(v)))
                })
                .collect();
            TxElem::Sel(Selection { table, default: StateSet::empty() })
        }
        TxElem::Game(g) => TxElem::Game(GameElem { strategies: g.strategies.clone(), outcome: g.outcome.iter().map(|&o| f[o]).collect() }),
    }
}

/// Every function `{0..nx-1} -> {0..ny-1}` as a table.
pub fn all_maps(nx: usize, ny: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..nx {
        out = out.into_iter().flat_map(|v: Vec<usize>| (0..ny).map(move |y| [v.clone(), vec![y]].concat())).collect();
    }
    out
}

/// Proptest strategy for formulas over `ops`, variables `p q r` and nominals
/// `i j k`, with modal depth at most 6.
pub fn arb_formula(ops: Vec<(String, usize)>, down: bool) -> impl proptest::strategy::Strategy<Value = Formula> {
    use proptest::prelude::*;
    let leaf = prop_oneof![
        Just(Formula::top()),
        Just(Formula::bot()),
        prop::sample::select(vec!["p", "q", "r"]).prop_map(Formula::prop),
        prop::sample::select(vec!["i", "j", "k"]).prop_map(|n| Formula::nom(Nominal::new(n))),
    ];
    leaf.prop_recursive(6, 48, 3, move |inner| {
        let ops = ops.clone();
        let nom = prop::sample::select(vec!["i", "j", "k"]);
        let mut choices = vec![
            inner.clone().prop_map(Formula::not).boxed(),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)).boxed(),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)).boxed(),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)).boxed(),
            (prop::sample::select(ops), prop::collection::vec(inner.clone(), 2))
                .prop_map(|((op, arity), args)| Formula::modal(op, args[..arity].to_vec()))
                .boxed(),
            (nom.clone(), inner.clone()).prop_map(|(i, a)| Formula::at(Nominal::new(i), a)).boxed(),
        ];
        if down {
            choices.push((nom, inner).prop_map(|(i, a)| Formula::down(Nominal::new(i), a)).boxed());
        }
        proptest::strategy::Union::new(choices)
    })
}

pub fn sig_ops(sig: &hycoa::syntax::Signature) -> Vec<(String, usize)> {
    sig.ops().iter().map(|o| (o.name.clone(), o.arity)).collect()
}
