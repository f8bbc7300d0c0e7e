use thiserror::Error;

use super::formula::{Formula, Nominal};
use super::signature::{is_infix_name, Signature};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at byte {pos}: {kind}")]
pub struct ParseError {
    pub pos: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("unexpected {0}")]
    Unexpected(String),
    #[error("unexpected end of input")]
    Eof,
    #[error("unknown operator `{0}`")]
    UnknownOperator(String),
    #[error("operator `{op}` takes {expected} argument(s), found {found}")]
    ArityMismatch { op: String, expected: usize, found: usize },
    #[error("mixing `{0}` and `{1}` needs parentheses")]
    Ambiguous(String, String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Nom(String),
    Tilde,
    Amp,
    Bar,
    Arrow,
    DArrow,
    LParen,
    RParen,
    Comma,
    At,
    Dot,
    Op(String),
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Nom(s) => format!("nominal `{s}'`"),
            Tok::Op(s) => format!("operator `{s}`"),
            Tok::Tilde => "`~`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Bar => "`|`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::DArrow => "`<->`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::At => "`@`".into(),
            Tok::Dot => "`.`".into(),
        }
    }
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn err(&self, pos: usize, kind: ParseErrorKind) -> ParseError {
        ParseError { pos, kind }
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    /// Returns (start, end, token).
    fn next(&mut self) -> Result<Option<(usize, usize, Tok)>, ParseError> {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
        let start = self.pos;
        let mut chars = trimmed.chars();
        let Some(c) = chars.next() else { return Ok(None) };
        let simple = |len: usize, t: Tok| Ok(Some((start, start + len, t)));
        let tok = match c {
            '~' => simple(1, Tok::Tilde),
            '&' => simple(1, Tok::Amp),
            '|' => simple(1, Tok::Bar),
            '(' => simple(1, Tok::LParen),
            ')' => simple(1, Tok::RParen),
            ',' => simple(1, Tok::Comma),
            '@' => simple(1, Tok::At),
            '.' => simple(1, Tok::Dot),
            '-' if trimmed.starts_with("->") => simple(2, Tok::Arrow),
            '=' if trimmed.starts_with("=>") => simple(2, Tok::Op("=>".into())),
            '>' => simple(1, Tok::Op(">".into())),
            '<' if trimmed.starts_with("<->") => simple(3, Tok::DArrow),
            '<' => {
                let close = trimmed.find('>').ok_or_else(|| self.err(start, ParseErrorKind::Unexpected("`<`".into())))?;
                let inner = &trimmed[1..close];
                if inner.is_empty() || !inner.bytes().all(|b| b.is_ascii_digit()) {
                    return Err(self.err(start, ParseErrorKind::Unexpected(format!("`{}`", &trimmed[..=close]))));
                }
                simple(close + 1, Tok::Op(trimmed[..=close].to_string()))
            }
            '[' => {
                let close = trimmed.find(']').ok_or_else(|| self.err(start, ParseErrorKind::Unexpected("unclosed `[`".into())))?;
                let agents: Vec<&str> = trimmed[1..close].split(',').map(str::trim).filter(|a| !a.is_empty()).collect();
                simple(close + 1, Tok::Op(format!("[{}]", agents.join(","))))
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let len = trimmed
                    .find(|ch: char| !(ch.is_ascii_alphanumeric() || ch == '_'))
                    .unwrap_or(trimmed.len());
                let word = &trimmed[..len];
                if word == "sum" && trimmed[len..].starts_with('{') {
                    // sum{a1*#,...}>=k
                    let close = trimmed.find('}').ok_or_else(|| self.err(start, ParseErrorKind::Unexpected("unclosed `sum{`".into())))?;
                    let after = &trimmed[close + 1..];
                    let after = after.strip_prefix(">=").ok_or_else(|| self.err(start + close + 1, ParseErrorKind::Unexpected("expected `>=`".into())))?;
                    let digits = after.find(|ch: char| !ch.is_ascii_digit()).unwrap_or(after.len());
                    if digits == 0 {
                        return Err(self.err(start + close + 3, ParseErrorKind::Unexpected("expected threshold".into())));
                    }
                    let total = close + 3 + digits;
                    let name: String = trimmed[..total].chars().filter(|c| !c.is_whitespace()).collect();
                    simple(total, Tok::Op(name))
                } else if trimmed[len..].starts_with('\'') {
                    simple(len + 1, Tok::Nom(word.to_string()))
                } else {
                    simple(len, Tok::Ident(word.to_string()))
                }
            }
            other => Err(self.err(start, ParseErrorKind::Unexpected(format!("character `{other}`")))),
        };
        if let Ok(Some((_, end, _))) = &tok {
            self.pos = *end;
        }
        tok
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    peeked: Option<Option<(usize, usize, Tok)>>,
    last_end: usize,
    sig: &'a Signature,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Bin {
    And,
    Or,
    Imp,
    Iff,
}

impl<'a> Parser<'a> {
    fn bump(&mut self) -> Result<Option<(usize, Tok)>, ParseError> {
        let t = match self.peeked.take() {
            Some(t) => t,
            None => self.lexer.next()?,
        };
        Ok(t.map(|(s, e, tok)| {
            self.last_end = e;
            (s, tok)
        }))
    }

    fn eof(&self) -> ParseError {
        ParseError { pos: self.lexer.src.len(), kind: ParseErrorKind::Eof }
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        match self.bump()? {
            Some((_, t)) if t == want => Ok(()),
            Some((pos, t)) => Err(ParseError { pos, kind: ParseErrorKind::Unexpected(format!("{}, expected {}", t.describe(), want.describe())) }),
            None => Err(self.eof()),
        }
    }

    fn nominal(&mut self) -> Result<Nominal, ParseError> {
        match self.bump()? {
            Some((_, Tok::Nom(n))) => Ok(Nominal::new(n)),
            Some((pos, t)) => Err(ParseError { pos, kind: ParseErrorKind::Unexpected(format!("{}, expected a nominal", t.describe())) }),
            None => Err(self.eof()),
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let Some((pos, tok)) = self.bump()? else { return Err(self.eof()) };
        match tok {
            Tok::Ident(w) if w == "true" => Ok(Formula::Top),
            Tok::Ident(w) if w == "false" => Ok(Formula::bot()),
            Tok::Ident(w) if w == "dn" => {
                let n = self.nominal()?;
                self.expect(Tok::Dot)?;
                Ok(Formula::down(n, self.formula()?))
            }
            Tok::Ident(w) => {
                if self.sig.get(&w).is_some() {
                    self.application(pos, w)
                } else {
                    Ok(Formula::Prop(w))
                }
            }
            Tok::Nom(n) => Ok(Formula::Nom(Nominal::new(n))),
            Tok::Tilde => Ok(Formula::not(self.formula()?)),
            Tok::At => {
                let n = self.nominal()?;
                Ok(Formula::at(n, self.formula()?))
            }
            Tok::Op(name) if is_infix_name(&name) => Err(ParseError {
                pos,
                kind: ParseErrorKind::Unexpected(format!("infix operator `{name}` outside parentheses")),
            }),
            Tok::Op(name) => self.application(pos, name),
            Tok::LParen => self.group(),
            other => Err(ParseError { pos, kind: ParseErrorKind::Unexpected(other.describe()) }),
        }
    }

    fn application(&mut self, pos: usize, name: String) -> Result<Formula, ParseError> {
        let decl = self
            .sig
            .get(&name)
            .ok_or_else(|| ParseError { pos, kind: ParseErrorKind::UnknownOperator(name.clone()) })?;
        let arity = decl.arity;
        if decl.is_infix() {
            return Err(ParseError { pos, kind: ParseErrorKind::Unexpected(format!("infix operator `{name}` outside parentheses")) });
        }
        match arity {
            0 => Ok(Formula::Modal(name, vec![])),
            1 => Ok(Formula::Modal(name, vec![self.formula()?])),
            n => {
                self.expect(Tok::LParen)?;
                let mut args = vec![self.formula()?];
                loop {
                    match self.bump()? {
                        Some((_, Tok::Comma)) => args.push(self.formula()?),
                        Some((_, Tok::RParen)) => break,
                        Some((p, t)) => return Err(ParseError { pos: p, kind: ParseErrorKind::Unexpected(t.describe()) }),
                        None => return Err(self.eof()),
                    }
                }
                if args.len() != n {
                    return Err(ParseError { pos, kind: ParseErrorKind::ArityMismatch { op: name, expected: n, found: args.len() } });
                }
                Ok(Formula::Modal(name, args))
            }
        }
    }

    /// After `(`: a parenthesised formula or a binary combination.
    fn group(&mut self) -> Result<Formula, ParseError> {
        let first = self.formula()?;
        let Some((pos, tok)) = self.bump()? else { return Err(self.eof()) };
        let bin = match tok {
            Tok::RParen => return Ok(first),
            Tok::Amp => Bin::And,
            Tok::Bar => Bin::Or,
            Tok::Arrow => Bin::Imp,
            Tok::DArrow => Bin::Iff,
            Tok::Op(name) if is_infix_name(&name) => {
                let decl = self
                    .sig
                    .get(&name)
                    .ok_or_else(|| ParseError { pos, kind: ParseErrorKind::UnknownOperator(name.clone()) })?;
                if decl.arity != 2 {
                    return Err(ParseError { pos, kind: ParseErrorKind::ArityMismatch { op: name, expected: decl.arity, found: 2 } });
                }
                let second = self.formula()?;
                self.expect(Tok::RParen)?;
                return Ok(Formula::Modal(name, vec![first, second]));
            }
            other => return Err(ParseError { pos, kind: ParseErrorKind::Unexpected(format!("{}, expected a connective or `)`", other.describe())) }),
        };
        let mut acc = combine(bin, first, self.formula()?);
        loop {
            let Some((pos, tok)) = self.bump()? else { return Err(self.eof()) };
            let next = match tok {
                Tok::RParen => return Ok(acc),
                Tok::Amp => Bin::And,
                Tok::Bar => Bin::Or,
                Tok::Arrow => Bin::Imp,
                Tok::DArrow => Bin::Iff,
                other => return Err(ParseError { pos, kind: ParseErrorKind::Unexpected(other.describe()) }),
            };
            // Only `&` and `|` chain, and only with themselves.
            if next != bin || matches!(bin, Bin::Imp | Bin::Iff) {
                return Err(ParseError { pos, kind: ParseErrorKind::Ambiguous(bin_name(bin).into(), bin_name(next).into()) });
            }
            acc = combine(bin, acc, self.formula()?);
        }
    }
}

fn bin_name(b: Bin) -> &'static str {
    match b {
        Bin::And => "&",
        Bin::Or => "|",
        Bin::Imp => "->",
        Bin::Iff => "<->",
    }
}

fn combine(b: Bin, l: Formula, r: Formula) -> Formula {
    match b {
        Bin::And => Formula::and(l, r),
        Bin::Or => Formula::or(l, r),
        Bin::Imp => Formula::implies(l, r),
        Bin::Iff => Formula::iff(l, r),
    }
}

/// Parses a complete formula.
pub fn parse(text: &str, sig: &Signature) -> Result<Formula, ParseError> {
    let mut p = Parser { lexer: Lexer { src: text, pos: 0 }, peeked: None, last_end: 0, sig };
    let f = p.formula()?;
    match p.bump()? {
        None => Ok(f),
        Some((pos, t)) => Err(ParseError { pos, kind: ParseErrorKind::Unexpected(format!("trailing {}", t.describe())) }),
    }
}

/// Parses the longest formula at the start of `text`, returning it together
/// with the byte offset just past it. Used by the proof-file reader, where
/// formulas are embedded in justification syntax.
pub fn parse_prefix(text: &str, sig: &Signature) -> Result<(Formula, usize), ParseError> {
    let mut p = Parser { lexer: Lexer { src: text, pos: 0 }, peeked: None, last_end: 0, sig };
    let f = p.formula()?;
    Ok((f, p.last_end))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k() -> Signature {
        Signature::hybrid_k()
    }

    #[test]
    fn grammar_examples() {
        let f = parse("@i' (dia p)", &k()).unwrap();
        assert_eq!(f, Formula::at("i", Formula::modal("dia", vec![Formula::prop("p")])));

        let g = parse("~ <1> i'", &Signature::graded(3)).unwrap();
        assert_eq!(g, Formula::not(Formula::modal("<1>", vec![Formula::nom("i")])));

        let h = parse("dn x'. @x' (dia x')", &k()).unwrap();
        assert_eq!(h, Formula::down("x", Formula::at("x", Formula::modal("dia", vec![Formula::nom("x")]))));
    }

    #[test]
    fn derived_connectives_desugar() {
        let sig = k();
        let (p, q) = (Formula::prop("p"), Formula::prop("q"));
        assert_eq!(parse("(p -> q)", &sig).unwrap(), Formula::implies(p.clone(), q.clone()));
        assert_eq!(parse("(p <-> q)", &sig).unwrap(), Formula::iff(p.clone(), q.clone()));
        assert_eq!(parse("(p | q)", &sig).unwrap(), Formula::or(p.clone(), q.clone()));
        assert_eq!(parse("false", &sig).unwrap(), Formula::bot());
        assert_eq!(
            parse("(p & q & p)", &sig).unwrap(),
            Formula::and(Formula::and(p.clone(), q.clone()), p)
        );
    }

    #[test]
    fn infix_and_nary_operators() {
        let ck = Signature::conditional();
        let f = parse("((a => b) -> (a > ~ b))", &ck).unwrap();
        assert_eq!(
            f,
            Formula::implies(
                Formula::modal("=>", vec![Formula::prop("a"), Formula::prop("b")]),
                Formula::modal(">", vec![Formula::prop("a"), Formula::not(Formula::prop("b"))]),
            )
        );
        let pres = Signature::parse("op sum{3*#,1*#}>=37 arity=2 bound=37,37").unwrap();
        let g = parse("(sum{3*#,1*#}>=37 (win, draw) -> ~ relegated)", &pres).unwrap();
        assert_eq!(g.as_implication().unwrap().0, &Formula::modal("sum{3*#,1*#}>=37", vec![Formula::prop("win"), Formula::prop("draw")]));
        let game = Signature::named("coalition:a,b").unwrap();
        assert_eq!(parse("[a, b] p", &game).unwrap(), Formula::modal("[a,b]", vec![Formula::prop("p")]));
    }

    #[test]
    fn errors_carry_positions() {
        let sig = k();
        let e = parse("(p & ", &sig).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Eof);
        let e = parse("<3> p", &sig).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UnknownOperator("<3>".into()));
        assert_eq!(e.pos, 0);
        let e = parse("(p & q | r)", &sig).unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Ambiguous(..)));
        let pres = Signature::parse("op sum{1*#,1*#}>=2 arity=2 bound=2,2").unwrap();
        let e = parse("sum{1*#,1*#}>=2 (p)", &pres).unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::ArityMismatch { expected: 2, found: 1, .. }));
        let e = parse("p q", &sig).unwrap_err();
        assert_eq!(e.pos, 2);
    }

    #[test]
    fn prefix_parsing_stops_at_separators() {
        let (f, end) = parse_prefix("dia p, q:=r}", &k()).unwrap();
        assert_eq!(f, Formula::modal("dia", vec![Formula::prop("p")]));
        assert_eq!(end, 5);
    }
}
