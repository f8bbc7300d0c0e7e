use std::fmt;

use super::rules::RuleSet;
use crate::error::{Error, Result};
use crate::syntax::{parse, parse_prefix, Formula, Nominal, Signature, Substitution};

/// Why a proof line holds. Line references are line numbers as written in
/// the script; TBox, local, pure-axiom and rule indices are 1-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Justification {
    Taut,
    Axiom { name: String, sub: Substitution },
    Pure { index: usize, sub: Substitution },
    TBox(usize),
    Local(usize),
    Mp(usize, usize),
    AtGen(usize, Nominal),
    Rule { index: usize, sub: Substitution, from: usize },
    Name(usize, Nominal),
    Paste { op: String, k: usize, from: usize, noms: Vec<Nominal> },
    Da { i: Nominal, j: Nominal, body: Formula },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofLine {
    pub number: usize,
    pub formula: Formula,
    pub just: Justification,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofScript {
    pub sig: Signature,
    pub rules: RuleSet,
    pub axioms: Vec<Formula>,
    pub tbox: Vec<Formula>,
    pub local: Vec<Formula>,
    pub lines: Vec<ProofLine>,
}

impl ProofScript {
    pub fn new(sig: Signature, rules: RuleSet) -> Self {
        ProofScript { sig, rules, axioms: Vec::new(), tbox: Vec::new(), local: Vec::new(), lines: Vec::new() }
    }

    /// Appends a line numbered one past the last.
    pub fn push(&mut self, formula: Formula, just: Justification) -> usize {
        let number = self.lines.last().map_or(1, |l| l.number + 1);
        self.lines.push(ProofLine { number, formula, just });
        number
    }

    /// Parses a line given as text, e.g. `(p -> p) BY taut`.
    pub fn push_text(&mut self, text: &str) -> Result<usize> {
        let number = self.lines.last().map_or(1, |l| l.number + 1);
        let line = parse_line(&format!("{number}. {text}"), &self.sig)?;
        self.lines.push(line);
        Ok(number)
    }

    /// Reads a proof file. Header lines come first:
    ///
    /// ```text
    /// sig: K
    /// rules: K
    /// axioms: { dia dia i' -> dia i' }
    /// tbox: tbox.txt
    /// local: { p ; q }
    /// 1. (p -> p) BY taut
    /// ```
    ///
    /// A header value in braces is an inline list separated by `;`;
    /// otherwise it names a file, read through `load`. `sig` and `rules`
    /// also accept the names of the shipped signatures and rule sets.
    pub fn parse(text: &str, load: &dyn Fn(&str) -> Result<String>) -> Result<Self> {
        let mut sig = None;
        let mut rules_spec = None;
        let mut lists: [(&str, Option<(usize, String)>); 3] = [("axioms", None), ("tbox", None), ("local", None)];
        let mut body = Vec::new();
        for (ln, raw) in text.lines().enumerate() {
            let ln = ln + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if line.starts_with(|c: char| c.is_ascii_digit()) {
                body.push((ln, line));
                continue;
            }
            if !body.is_empty() {
                return Err(Error::format(ln, "header after proof lines"));
            }
            let (key, value) = line.split_once(':').ok_or_else(|| Error::format(ln, "expected `key: value`"))?;
            let value = value.trim().to_string();
            match key.trim() {
                "sig" => {
                    sig = Some(match Signature::named(&value) {
                        Some(s) => s,
                        None => Signature::parse(&load(&value)?).map_err(|e| Error::format(ln, e.to_string()))?,
                    })
                }
                "rules" => rules_spec = Some((ln, value)),
                k => {
                    let slot = lists
                        .iter_mut()
                        .find(|(name, _)| *name == k)
                        .ok_or_else(|| Error::format(ln, format!("unknown header `{k}`")))?;
                    slot.1 = Some((ln, value));
                }
            }
        }
        let sig = sig.unwrap_or_else(Signature::hybrid_k);
        let rules = match rules_spec {
            None => RuleSet::default(),
            Some((ln, v)) => match RuleSet::named(&v) {
                Some(r) => r,
                None => RuleSet::parse(&v, &load(&v)?, &sig).map_err(|e| Error::format(ln, e.to_string()))?,
            },
        };
        let mut script = ProofScript::new(sig, rules);
        for (name, spec) in lists {
            let Some((ln, v)) = spec else { continue };
            let fs = formula_list(&v, &script.sig, load).map_err(|e| match e {
                Error::Format { .. } | Error::Io(_) => e,
                other => Error::format(ln, other.to_string()),
            })?;
            match name {
                "axioms" => script.axioms = fs,
                "tbox" => script.tbox = fs,
                _ => script.local = fs,
            }
        }
        for (ln, line) in body {
            let parsed = parse_line(line, &script.sig).map_err(|e| match e {
                Error::Format { msg, .. } => Error::format(ln, msg),
                other => Error::format(ln, other.to_string()),
            })?;
            if script.lines.last().is_some_and(|l| l.number >= parsed.number) {
                return Err(Error::format(ln, "line numbers must increase"));
            }
            script.lines.push(parsed);
        }
        Ok(script)
    }

    /// Renders the script in the file format with inline header lists.
    /// The `sig` and `rules` headers are left to the caller.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let list = |fs: &[Formula]| fs.iter().map(|f| f.to_string()).collect::<Vec<_>>().join(" ; ");
        if !self.axioms.is_empty() {
            out.push_str(&format!("axioms: {{ {} }}\n", list(&self.axioms)));
        }
        if !self.tbox.is_empty() {
            out.push_str(&format!("tbox: {{ {} }}\n", list(&self.tbox)));
        }
        if !self.local.is_empty() {
            out.push_str(&format!("local: {{ {} }}\n", list(&self.local)));
        }
        for l in &self.lines {
            out.push_str(&format!("{}. {} BY {}\n", l.number, l.formula, l.just));
        }
        out
    }

    /// The body of [`ProofScript::to_text`] without headers.
    pub fn lines_text(&self) -> String {
        self.lines.iter().map(|l| format!("{}. {} BY {}\n", l.number, l.formula, l.just)).collect()
    }
}

fn formula_list(v: &str, sig: &Signature, load: &dyn Fn(&str) -> Result<String>) -> Result<Vec<Formula>> {
    if let Some(inner) = v.strip_prefix('{').and_then(|s| s.strip_suffix('}')) {
        return inner
            .split(';')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| parse(s, sig).map_err(Error::from))
            .collect();
    }
    let text = load(v)?;
    let mut out = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        out.push(parse(line, sig).map_err(|e| Error::format(ln + 1, format!("{v}: {e}")))?);
    }
    Ok(out)
}

/// Parses `n. <formula> BY <justification>`.
pub(crate) fn parse_line(line: &str, sig: &Signature) -> Result<ProofLine> {
    let (num, rest) = line.split_once('.').ok_or_else(|| Error::format(0, "expected `n.`"))?;
    let number: usize = num.trim().parse().map_err(|_| Error::format(0, format!("bad line number `{num}`")))?;
    let (ftext, jtext) = rest.rsplit_once(" BY ").ok_or_else(|| Error::format(0, "missing ` BY `"))?;
    let formula = parse(ftext.trim(), sig)?;
    let just = parse_justification(jtext.trim(), sig)?;
    Ok(ProofLine { number, formula, just })
}

struct Cursor<'a> {
    rest: &'a str,
    sig: &'a Signature,
}

impl<'a> Cursor<'a> {
    fn skip_ws(&mut self) {
        self.rest = self.rest.trim_start();
    }

    fn word(&mut self) -> Result<&'a str> {
        self.skip_ws();
        let end = self.rest.find(|c: char| c.is_whitespace()).unwrap_or(self.rest.len());
        if end == 0 {
            return Err(Error::format(0, "unexpected end of justification"));
        }
        let (w, r) = self.rest.split_at(end);
        self.rest = r;
        Ok(w)
    }

    fn number(&mut self) -> Result<usize> {
        let w = self.word()?;
        w.parse().map_err(|_| Error::format(0, format!("expected a number, found `{w}`")))
    }

    fn nominal(&mut self) -> Result<Nominal> {
        let w = self.word()?;
        nominal(w)
    }

    fn formula(&mut self) -> Result<Formula> {
        let (f, used) = parse_prefix(self.rest, self.sig)?;
        self.rest = &self.rest[used..];
        Ok(f)
    }

    fn eat(&mut self, s: &str) -> bool {
        self.skip_ws();
        match self.rest.strip_prefix(s) {
            Some(r) => {
                self.rest = r;
                true
            }
            None => false,
        }
    }

    fn expect(&mut self, s: &str) -> Result<()> {
        if self.eat(s) {
            Ok(())
        } else {
            Err(Error::format(0, format!("expected `{s}` at `{}`", self.rest)))
        }
    }

    fn done(&mut self) -> Result<()> {
        self.skip_ws();
        if self.rest.is_empty() {
            Ok(())
        } else {
            Err(Error::format(0, format!("trailing `{}`", self.rest)))
        }
    }

    /// `sub{p:=f,...;i':=j',...}`, optional.
    fn substitution(&mut self) -> Result<Substitution> {
        let mut sub = Substitution::new();
        if !self.eat("sub{") {
            return Ok(sub);
        }
        loop {
            while self.eat(";") || self.eat(",") {}
            if self.eat("}") {
                return Ok(sub);
            }
            let end = self.rest.find(":=").ok_or_else(|| Error::format(0, "expected `:=` in substitution"))?;
            let key = self.rest[..end].trim().to_string();
            self.rest = &self.rest[end + 2..];
            if key.ends_with('\'') {
                let to = self.word_until(&[',', ';', '}'])?;
                sub = sub.with_nom(nominal(&key)?, nominal(to)?);
            } else {
                if key.is_empty() || !key.chars().all(|c| c.is_alphanumeric() || c == '_') {
                    return Err(Error::format(0, format!("bad variable `{key}` in substitution")));
                }
                sub = sub.with_prop(key, self.formula()?);
            }
            if !(self.eat(",") || self.eat(";")) {
                self.expect("}")?;
                return Ok(sub);
            }
        }
    }

    fn word_until(&mut self, stops: &[char]) -> Result<&'a str> {
        self.skip_ws();
        let end = self.rest.find(|c: char| stops.contains(&c) || c.is_whitespace()).unwrap_or(self.rest.len());
        let (w, r) = self.rest.split_at(end);
        self.rest = r;
        Ok(w)
    }
}

fn nominal(w: &str) -> Result<Nominal> {
    match w.strip_suffix('\'') {
        Some(name) if !name.is_empty() => Ok(Nominal::new(name)),
        _ => Err(Error::format(0, format!("expected a nominal, found `{w}`"))),
    }
}

fn parse_justification(text: &str, sig: &Signature) -> Result<Justification> {
    let mut c = Cursor { rest: text, sig };
    let head = c.word_until(&[' ', '\t'])?;
    let just = if head == "taut" {
        Justification::Taut
    } else if let Some(name) = head.strip_prefix("ax:") {
        Justification::Axiom { name: name.to_string(), sub: c.substitution()? }
    } else if let Some(k) = head.strip_prefix("pure:") {
        let index = k.parse().map_err(|_| Error::format(0, format!("bad index in `{head}`")))?;
        Justification::Pure { index, sub: c.substitution()? }
    } else if let Some(k) = head.strip_prefix("rule:") {
        let index = k.parse().map_err(|_| Error::format(0, format!("bad index in `{head}`")))?;
        let sub = c.substitution()?;
        c.expect("from")?;
        Justification::Rule { index, sub, from: c.number()? }
    } else if let Some(k) = head.strip_prefix("tbox:") {
        Justification::TBox(k.parse().map_err(|_| Error::format(0, format!("bad index in `{head}`")))?)
    } else if let Some(k) = head.strip_prefix("local:") {
        Justification::Local(k.parse().map_err(|_| Error::format(0, format!("bad index in `{head}`")))?)
    } else if head == "mp" {
        Justification::Mp(c.number()?, c.number()?)
    } else if head == "atgen" {
        Justification::AtGen(c.number()?, c.nominal()?)
    } else if head == "name" {
        Justification::Name(c.number()?, c.nominal()?)
    } else if let Some(spec) = head.strip_prefix("paste:") {
        let (op, k) = spec.rsplit_once(':').ok_or_else(|| Error::format(0, "expected `paste:<op>:<k>`"))?;
        let k = k.parse().map_err(|_| Error::format(0, format!("bad bound in `{head}`")))?;
        let from = c.number()?;
        let mut noms = Vec::new();
        if c.eat("with") {
            c.skip_ws();
            let list = c.rest;
            c.rest = "";
            for w in list.split(',').map(str::trim).filter(|w| !w.is_empty()) {
                noms.push(nominal(w)?);
            }
        }
        Justification::Paste { op: op.to_string(), k, from, noms }
    } else if head == "da" {
        let i = c.nominal()?;
        let j = c.nominal()?;
        c.skip_ws();
        Justification::Da { i, j, body: c.formula()? }
    } else {
        return Err(Error::format(0, format!("unknown justification `{head}`")));
    };
    c.done()?;
    Ok(just)
}

fn sub_text(s: &Substitution) -> String {
    if s.is_empty() {
        return String::new();
    }
    let props: Vec<String> = s.props.iter().map(|(p, f)| format!("{p}:={f}")).collect();
    let noms: Vec<String> = s.noms.iter().map(|(i, j)| format!("{i}:={j}")).collect();
    format!(" sub{{{};{}}}", props.join(","), noms.join(","))
}

impl fmt::Display for Justification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Justification::Taut => write!(f, "taut"),
            Justification::Axiom { name, sub } => write!(f, "ax:{name}{}", sub_text(sub)),
            Justification::Pure { index, sub } => write!(f, "pure:{index}{}", sub_text(sub)),
            Justification::TBox(k) => write!(f, "tbox:{k}"),
            Justification::Local(k) => write!(f, "local:{k}"),
            Justification::Mp(m, n) => write!(f, "mp {m} {n}"),
            Justification::AtGen(m, i) => write!(f, "atgen {m} {i}"),
            Justification::Rule { index, sub, from } => write!(f, "rule:{index}{} from {from}", sub_text(sub)),
            Justification::Name(m, i) => write!(f, "name {m} {i}"),
            Justification::Paste { op, k, from, noms } => {
                let ns: Vec<String> = noms.iter().map(Nominal::to_string).collect();
                write!(f, "paste:{op}:{k} {from} with {}", ns.join(","))
            }
            Justification::Da { i, j, body } => write!(f, "da {i} {j} {body}"),
        }
    }
}
