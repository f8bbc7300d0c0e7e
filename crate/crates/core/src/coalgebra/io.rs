//! The line-oriented model file format.
//!
//! ```text
//! functor: kripke
//! states: s0 s1
//! succ s0: s0 s1
//! val p: s1
//! name i': s0
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use super::functor::{upward_closure, Functor, GameElem, Selection, TxElem, INF};
use super::model::HybridModel;
use super::stateset::{StateSet, MAX_STATES};
use crate::error::{Error, Result};
use crate::syntax::Nominal;

struct Pending {
    functor: Option<Functor>,
    states: Option<Vec<String>>,
    gamma: Vec<Option<TxElem>>,
    strat: BTreeMap<(usize, usize), usize>,
    out: BTreeMap<usize, Vec<(Vec<usize>, usize)>>,
}

pub fn parse_model(text: &str) -> Result<HybridModel> {
    let mut p = Pending { functor: None, states: None, gamma: vec![], strat: BTreeMap::new(), out: BTreeMap::new() };
    let mut props = BTreeMap::new();
    let mut noms = BTreeMap::new();
    for (ln, raw) in text.lines().enumerate() {
        let ln = ln + 1;
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let (head, rest) = line.split_once(':').ok_or_else(|| Error::format(ln, "expected `key: ...`"))?;
        let rest = rest.trim();
        let words: Vec<&str> = head.split_whitespace().collect();
        match words.as_slice() {
            ["functor"] => {
                let f = Functor::from_name(rest).ok_or_else(|| Error::format(ln, format!("unknown functor `{rest}`")))?;
                p.functor = Some(match (f, p.functor.take()) {
                    (Functor::Game { .. }, Some(Functor::Game { agents })) => Functor::Game { agents },
                    (f, _) => f,
                });
            }
            ["states"] => {
                let states: Vec<String> = rest.split_whitespace().map(str::to_string).collect();
                if states.len() > MAX_STATES {
                    return Err(Error::format(ln, format!("at most {MAX_STATES} states are supported")));
                }
                let distinct: BTreeSet<&String> = states.iter().collect();
                if distinct.len() != states.len() {
                    return Err(Error::format(ln, "duplicate state name"));
                }
                p.gamma = vec![None; states.len()];
                p.states = Some(states);
            }
            ["agents"] => match &mut p.functor {
                Some(Functor::Game { agents }) => *agents = rest.split_whitespace().map(str::to_string).collect(),
                None => p.functor = Some(Functor::Game { agents: rest.split_whitespace().map(str::to_string).collect() }),
                Some(f) => return Err(Error::format(ln, format!("agents given for functor {f}"))),
            },
            ["val", prop] => {
                let set = state_list(&p, ln, rest)?;
                props.insert(prop.to_string(), set);
            }
            ["name", nom] => {
                let s = state(&p, ln, rest)?;
                noms.insert(Nominal::from(*nom), s);
            }
            ["succ", s] => {
                let c = state(&p, ln, s)?;
                let set = state_list(&p, ln, rest)?;
                set_gamma(&mut p, ln, c, TxElem::Set(set))?;
            }
            ["mult", s] => {
                let c = state(&p, ln, s)?;
                let n = p.gamma.len();
                let mut m = vec![0u64; n];
                for item in rest.split_whitespace() {
                    let (d, v) = item.split_once('=').ok_or_else(|| Error::format(ln, format!("expected state=count, found `{item}`")))?;
                    let v = if v == "inf" { INF } else { v.parse().map_err(|_| Error::format(ln, format!("bad multiplicity `{v}`")))? };
                    m[state(&p, ln, d)?] = v;
                }
                set_gamma(&mut p, ln, c, TxElem::Mult(m))?;
            }
            ["nbhd", s] => {
                let c = state(&p, ln, s)?;
                let mut coll = BTreeSet::new();
                for group in braces(ln, rest)? {
                    coll.insert(state_list(&p, ln, group)?);
                }
                if p.functor == Some(Functor::Monotone) {
                    coll = upward_closure(coll, p.gamma.len());
                }
                set_gamma(&mut p, ln, c, TxElem::Nbhd(coll))?;
            }
            ["sel", s] => {
                let c = state(&p, ln, s)?;
                let (arg, val) = rest.split_once("->").ok_or_else(|| Error::format(ln, "expected `{..} -> {..}`"))?;
                let val = one_brace(ln, val)?;
                let val = state_list(&p, ln, val)?;
                let mut sel = match p.gamma[c].take() {
                    Some(TxElem::Sel(sel)) => sel,
                    None => Selection::default(),
                    Some(_) => return Err(Error::format(ln, "mixed element kinds")),
                };
                if arg.trim() == "default" {
                    sel.default = val;
                } else {
                    let arg = state_list(&p, ln, one_brace(ln, arg)?)?;
                    sel.table.insert(arg, val);
                }
                p.gamma[c] = Some(TxElem::Sel(sel));
            }
            ["strat", s, agent] => {
                let c = state(&p, ln, s)?;
                let a = agent_index(&p, ln, agent)?;
                let k: usize = rest.parse().map_err(|_| Error::format(ln, format!("bad strategy count `{rest}`")))?;
                if k == 0 {
                    return Err(Error::format(ln, "strategy sets must be nonempty"));
                }
                p.strat.insert((c, a), k);
            }
            ["out", s] => {
                let c = state(&p, ln, s)?;
                let entries = outcomes(&p, ln, rest)?;
                p.out.entry(c).or_default().extend(entries);
            }
            _ => return Err(Error::format(ln, format!("unknown line `{head}`"))),
        }
    }
    let functor = p.functor.clone().ok_or_else(|| Error::format(0, "missing `functor:` line"))?;
    let states = p.states.clone().ok_or_else(|| Error::format(0, "missing `states:` line"))?;
    let n = states.len();
    let mut m = HybridModel::new(functor.clone(), states);
    for (c, t) in p.gamma.iter().enumerate() {
        if let Some(t) = t {
            m.gamma[c] = t.clone();
        }
    }
    if let Functor::Game { agents } = &functor {
        if n == 0 {
            return Err(Error::format(0, "game frames need at least one state"));
        }
        for c in 0..n {
            let strategies: Vec<usize> = (0..agents.len()).map(|a| p.strat.get(&(c, a)).copied().unwrap_or(1)).collect();
            let total = GameElem::profile_count(&strategies);
            let mut g = GameElem { strategies, outcome: vec![usize::MAX; total] };
            for (profile, o) in p.out.get(&c).into_iter().flatten() {
                if profile.len() != agents.len() || profile.iter().zip(&g.strategies).any(|(&d, &s)| d >= s) {
                    return Err(Error::format(0, format!("state {}: profile out of range", m.states[c])));
                }
                let idx = g.encode(profile);
                g.outcome[idx] = *o;
            }
            if g.outcome.contains(&usize::MAX) {
                if total == 1 && p.out.get(&c).is_none() {
                    g.outcome[0] = c;
                } else {
                    return Err(Error::format(0, format!("state {}: outcome table incomplete", m.states[c])));
                }
            }
            m.gamma[c] = TxElem::Game(g);
        }
    }
    m.props = props;
    m.noms = noms;
    m.validate()?;
    Ok(m)
}

fn set_gamma(p: &mut Pending, ln: usize, c: usize, t: TxElem) -> Result<()> {
    if p.gamma[c].is_some() {
        return Err(Error::format(ln, "transition given twice"));
    }
    p.gamma[c] = Some(t);
    Ok(())
}

fn state(p: &Pending, ln: usize, name: &str) -> Result<usize> {
    let states = p.states.as_ref().ok_or_else(|| Error::format(ln, "`states:` must come first"))?;
    let name = name.trim();
    states.iter().position(|s| s == name).ok_or_else(|| Error::format(ln, format!("unknown state `{name}`")))
}

fn state_list(p: &Pending, ln: usize, text: &str) -> Result<StateSet> {
    let mut s = StateSet::empty();
    for w in text.split_whitespace() {
        s = s.with(state(p, ln, w)?);
    }
    Ok(s)
}

fn agent_index(p: &Pending, ln: usize, agent: &str) -> Result<usize> {
    match &p.functor {
        Some(Functor::Game { agents }) => {
            agents.iter().position(|a| a == agent).ok_or_else(|| Error::format(ln, format!("unknown agent `{agent}`")))
        }
        _ => Err(Error::format(ln, "strategies need `functor: game` and `agents:`")),
    }
}

fn braces(ln: usize, text: &str) -> Result<Vec<&str>> {
    let mut out = Vec::new();
    let mut rest = text.trim();
    while !rest.is_empty() {
        let inner = rest.strip_prefix('{').ok_or_else(|| Error::format(ln, "expected `{`"))?;
        let close = inner.find('}').ok_or_else(|| Error::format(ln, "missing `}`"))?;
        out.push(&inner[..close]);
        rest = inner[close + 1..].trim_start();
    }
    Ok(out)
}

fn one_brace(ln: usize, text: &str) -> Result<&str> {
    match braces(ln, text)?.as_slice() {
        [one] => Ok(one),
        _ => Err(Error::format(ln, "expected exactly one `{..}` set")),
    }
}

fn outcomes(p: &Pending, ln: usize, text: &str) -> Result<Vec<(Vec<usize>, usize)>> {
    let mut out = Vec::new();
    let mut rest = text.trim();
    while !rest.is_empty() {
        let inner = rest.strip_prefix('(').ok_or_else(|| Error::format(ln, "expected `(`"))?;
        let close = inner.find(')').ok_or_else(|| Error::format(ln, "missing `)`"))?;
        let mut profile = Vec::new();
        for d in inner[..close].split(',') {
            let d: usize = d.trim().parse().map_err(|_| Error::format(ln, format!("bad strategy `{d}`")))?;
            if d == 0 {
                return Err(Error::format(ln, "strategies are numbered from 1"));
            }
            profile.push(d - 1);
        }
        let after = inner[close + 1..].trim_start();
        let after = after.strip_prefix("->").ok_or_else(|| Error::format(ln, "expected `->`"))?.trim_start();
        let end = after.find(char::is_whitespace).unwrap_or(after.len());
        out.push((profile, state(p, ln, &after[..end])?));
        rest = after[end..].trim_start();
    }
    Ok(out)
}

/// Writes `m` in the model file format; [`parse_model`] reads it back.
pub fn write_model(m: &HybridModel) -> String {
    let mut s = String::new();
    let name = |c: usize| m.states[c].as_str();
    let list = |set: StateSet| set.iter().map(name).collect::<Vec<_>>().join(" ");
    writeln!(s, "functor: {}", m.functor.name()).unwrap();
    if let Functor::Game { agents } = &m.functor {
        writeln!(s, "agents: {}", agents.join(" ")).unwrap();
    }
    writeln!(s, "states: {}", m.states.join(" ")).unwrap();
    for (c, t) in m.gamma.iter().enumerate() {
        match t {
            TxElem::Set(set) => writeln!(s, "succ {}: {}", name(c), list(*set)).unwrap(),
            TxElem::Mult(v) => {
                let items: Vec<String> = v
                    .iter()
                    .enumerate()
                    .filter(|(_, &k)| k != 0)
                    .map(|(d, &k)| if k == INF { format!("{}=inf", name(d)) } else { format!("{}={k}", name(d)) })
                    .collect();
                writeln!(s, "mult {}: {}", name(c), items.join(" ")).unwrap();
            }
            TxElem::Nbhd(coll) => {
                let items: Vec<String> = coll.iter().map(|a| format!("{{{}}}", list(*a))).collect();
                writeln!(s, "nbhd {}: {}", name(c), items.join(" ")).unwrap();
            }
            TxElem::Sel(sel) => {
                for (a, b) in &sel.table {
                    writeln!(s, "sel {}: {{{}}} -> {{{}}}", name(c), list(*a), list(*b)).unwrap();
                }
                writeln!(s, "sel {}: default -> {{{}}}", name(c), list(sel.default)).unwrap();
            }
            TxElem::Game(g) => {
                for (a, agent) in m.functor.agents().iter().enumerate() {
                    writeln!(s, "strat {} {}: {}", name(c), agent, g.strategies[a]).unwrap();
                }
                let items: Vec<String> = g
                    .outcome
                    .iter()
                    .enumerate()
                    .map(|(idx, &o)| {
                        let prof: Vec<String> = g.decode(idx).iter().map(|d| (d + 1).to_string()).collect();
                        format!("({})->{}", prof.join(","), name(o))
                    })
                    .collect();
                writeln!(s, "out {}: {}", name(c), items.join(" ")).unwrap();
            }
        }
    }
    for (p, set) in &m.props {
        writeln!(s, "val {p}: {}", list(*set)).unwrap();
    }
    for (i, c) in &m.noms {
        writeln!(s, "name {i}: {}", name(*c)).unwrap();
    }
    s
}
