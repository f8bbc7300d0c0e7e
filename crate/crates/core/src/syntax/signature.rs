use std::fmt;

use thiserror::Error;

/// Per-argument boundedness annotation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Bound {
    Bounded(u32),
    Unbounded,
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Bounded(k) => write!(f, "{k}"),
            Bound::Unbounded => write!(f, "unbounded"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpDecl {
    pub name: String,
    pub arity: usize,
    pub bounds: Vec<Bound>,
}

impl OpDecl {
    pub fn new(name: impl Into<String>, arity: usize, bounds: Vec<Bound>) -> Self {
        OpDecl { name: name.into(), arity, bounds }
    }

    /// Symbolic binary operators (`=>`, `>`) are written infix.
    pub fn is_infix(&self) -> bool {
        self.arity == 2 && is_infix_name(&self.name)
    }

    /// The single bounded argument and its bound, if exactly one argument
    /// carries a bound. This is the argument the Paste rule works on.
    pub fn pasted_argument(&self) -> Option<(usize, u32)> {
        let bounded: Vec<(usize, u32)> = self
            .bounds
            .iter()
            .enumerate()
            .filter_map(|(i, b)| match b {
                Bound::Bounded(k) => Some((i, *k)),
                Bound::Unbounded => None,
            })
            .collect();
        match bounded.as_slice() {
            [single] => Some(*single),
            _ => None,
        }
    }
}

pub(crate) fn is_infix_name(name: &str) -> bool {
    name == "=>" || name == ">"
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SignatureError {
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("operator `{0}` declared twice")]
    Duplicate(String),
    #[error("operator `{name}`: {msg}")]
    Invalid { name: String, msg: String },
}

/// Shape of an operator name as far as the shipped semantics care.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OpShape {
    Box,
    Dia,
    Graded(u32),
    Presburger { coeffs: Vec<u32>, threshold: u32 },
    Implies,
    Would,
    Coalition(Vec<String>),
    Other,
}

impl OpShape {
    pub fn of(name: &str) -> Result<OpShape, String> {
        if name == "box" {
            return Ok(OpShape::Box);
        }
        if name == "dia" {
            return Ok(OpShape::Dia);
        }
        if name == "=>" {
            return Ok(OpShape::Implies);
        }
        if name == ">" {
            return Ok(OpShape::Would);
        }
        if let Some(inner) = name.strip_prefix('<').and_then(|s| s.strip_suffix('>')) {
            return inner
                .parse::<u32>()
                .map(OpShape::Graded)
                .map_err(|_| format!("bad grade in `{name}`"));
        }
        if let Some(inner) = name.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            let agents: Vec<String> = if inner.trim().is_empty() {
                vec![]
            } else {
                inner.split(',').map(|a| a.trim().to_string()).collect()
            };
            return Ok(OpShape::Coalition(agents));
        }
        if let Some(rest) = name.strip_prefix("sum{") {
            let (terms, threshold) = rest
                .split_once("}>=")
                .ok_or_else(|| format!("malformed Presburger operator `{name}`"))?;
            let threshold = threshold
                .parse::<u32>()
                .map_err(|_| format!("bad threshold in `{name}`"))?;
            let mut coeffs = Vec::new();
            for term in terms.split(',') {
                let c = term
                    .trim()
                    .strip_suffix("*#")
                    .ok_or_else(|| format!("term `{term}` is not of the form a*#"))?;
                let c: i64 = c.parse().map_err(|_| format!("bad coefficient `{c}`"))?;
                if c <= 0 {
                    return Err(format!("coefficient {c} is not positive (only positive Presburger is supported)"));
                }
                coeffs.push(c as u32);
            }
            return Ok(OpShape::Presburger { coeffs, threshold });
        }
        Ok(OpShape::Other)
    }
}

/// A modal similarity type: operator names with arities and boundedness.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    ops: Vec<OpDecl>,
}

impl Signature {
    pub fn new(ops: Vec<OpDecl>) -> Result<Self, SignatureError> {
        let mut sig = Signature::default();
        for op in ops {
            sig.add(op)?;
        }
        Ok(sig)
    }

    pub fn add(&mut self, op: OpDecl) -> Result<(), SignatureError> {
        if self.get(&op.name).is_some() {
            return Err(SignatureError::Duplicate(op.name));
        }
        validate(&op)?;
        self.ops.push(op);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&OpDecl> {
        self.ops.iter().find(|o| o.name == name)
    }

    pub fn ops(&self) -> &[OpDecl] {
        &self.ops
    }

    /// `box` and `dia` with `dia` 1-bounded.
    pub fn hybrid_k() -> Self {
        Signature {
            ops: vec![
                OpDecl::new("box", 1, vec![Bound::Unbounded]),
                OpDecl::new("dia", 1, vec![Bound::Bounded(1)]),
            ],
        }
    }

    /// Graded operators `<0>` .. `<max_grade>` plus `box`/`dia`.
    pub fn graded(max_grade: u32) -> Self {
        let mut sig = Signature::hybrid_k();
        for k in 0..=max_grade {
            sig.ops.push(OpDecl::new(format!("<{k}>"), 1, vec![Bound::Bounded(k + 1)]));
        }
        sig
    }

    /// Neighbourhood and monotone logics: neither operator is bounded.
    pub fn neighborhood() -> Self {
        Signature {
            ops: vec![
                OpDecl::new("box", 1, vec![Bound::Unbounded]),
                OpDecl::new("dia", 1, vec![Bound::Unbounded]),
            ],
        }
    }

    /// Conditional logic: `=>` and the derived `>` which is 1-bounded in its
    /// second argument.
    pub fn conditional() -> Self {
        Signature {
            ops: vec![
                OpDecl::new("=>", 2, vec![Bound::Unbounded, Bound::Unbounded]),
                OpDecl::new(">", 2, vec![Bound::Unbounded, Bound::Bounded(1)]),
            ],
        }
    }

    /// One operator `[C]` for every coalition `C` of the given agents.
    pub fn coalition(agents: &[String]) -> Self {
        let n = agents.len();
        let ops = (0u32..(1 << n))
            .map(|mask| {
                let members: Vec<&str> = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| agents[i].as_str()).collect();
                OpDecl::new(format!("[{}]", members.join(",")), 1, vec![Bound::Unbounded])
            })
            .collect();
        Signature { ops }
    }

    /// Resolves a shipped signature name: `K`, `graded`, `neighborhood`,
    /// `monotone`, `CK`, or `coalition:a,b,...`.
    pub fn named(name: &str) -> Option<Self> {
        match name {
            "K" | "kripke" => Some(Signature::hybrid_k()),
            "graded" | "multigraph" => Some(Signature::graded(9)),
            "neighborhood" | "monotone" => Some(Signature::neighborhood()),
            "CK" | "conditional" | "selection" => Some(Signature::conditional()),
            _ => {
                let agents = name.strip_prefix("coalition:").or_else(|| name.strip_prefix("game:"))?;
                let agents: Vec<String> = agents.split(',').map(|a| a.trim().to_string()).filter(|a| !a.is_empty()).collect();
                Some(Signature::coalition(&agents))
            }
        }
    }

    /// Parses the line format `op <name> arity=<n> bound=<k|unbounded>[,...]`.
    /// Blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Result<Self, SignatureError> {
        let mut sig = Signature::default();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            // Presburger names contain `#`, so only whole-line comments exist.
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |msg: &str| SignatureError::Malformed { line: line_no, msg: msg.to_string() };
            let mut words = line.split_whitespace();
            if words.next() != Some("op") {
                return Err(bad("expected `op`"));
            }
            let name = words.next().ok_or_else(|| bad("missing operator name"))?;
            let mut arity = None;
            let mut bounds = None;
            for w in words {
                if let Some(a) = w.strip_prefix("arity=") {
                    arity = Some(a.parse::<usize>().map_err(|_| bad("bad arity"))?);
                } else if let Some(b) = w.strip_prefix("bound=") {
                    let parsed: Result<Vec<Bound>, _> = b
                        .split(',')
                        .map(|s| match s {
                            "unbounded" => Ok(Bound::Unbounded),
                            k => k.parse::<u32>().map(Bound::Bounded).map_err(|_| bad("bad bound")),
                        })
                        .collect();
                    bounds = Some(parsed?);
                } else {
                    return Err(bad(&format!("unexpected `{w}`")));
                }
            }
            let arity = arity.ok_or_else(|| bad("missing arity="))?;
            let mut bounds = bounds.unwrap_or_else(|| vec![Bound::Unbounded; arity]);
            if bounds.len() == 1 && arity > 1 {
                bounds = vec![bounds[0]; arity];
            }
            if bounds.len() != arity {
                return Err(bad("number of bounds does not match arity"));
            }
            sig.add(OpDecl::new(name, arity, bounds))?;
        }
        Ok(sig)
    }

    /// Inverse of [`Signature::parse`].
    pub fn to_text(&self) -> String {
        self.ops
            .iter()
            .map(|o| {
                let b: Vec<String> = o.bounds.iter().map(Bound::to_string).collect();
                format!("op {} arity={} bound={}\n", o.name, o.arity, b.join(","))
            })
            .collect()
    }
}

fn validate(op: &OpDecl) -> Result<(), SignatureError> {
    let invalid = |msg: String| SignatureError::Invalid { name: op.name.clone(), msg };
    if op.bounds.len() != op.arity {
        return Err(invalid("number of bounds does not match arity".into()));
    }
    let shape = OpShape::of(&op.name).map_err(invalid)?;
    let want_arity = match &shape {
        OpShape::Box | OpShape::Dia | OpShape::Graded(_) | OpShape::Coalition(_) => Some(1),
        OpShape::Implies | OpShape::Would => Some(2),
        OpShape::Presburger { coeffs, .. } => Some(coeffs.len()),
        OpShape::Other => None,
    };
    if let Some(a) = want_arity {
        if a != op.arity {
            return Err(invalid(format!("expected arity {a}")));
        }
    }
    // Declared bounds must be the operator's actual bound (or `unbounded`);
    // anything else would make the Paste rule unsound.
    let expected: Option<Vec<Option<u32>>> = match &shape {
        OpShape::Box | OpShape::Implies | OpShape::Coalition(_) => Some(vec![None; op.arity]),
        OpShape::Dia => Some(vec![Some(1)]),
        OpShape::Graded(k) => Some(vec![Some(k + 1)]),
        OpShape::Presburger { threshold, coeffs } => Some(vec![Some(*threshold); coeffs.len()]),
        OpShape::Would => Some(vec![None, Some(1)]),
        OpShape::Other => None,
    };
    if let Some(expected) = expected {
        for (i, (declared, allowed)) in op.bounds.iter().zip(expected).enumerate() {
            if let Bound::Bounded(k) = declared {
                if allowed != Some(*k) {
                    return Err(invalid(format!(
                        "argument {} cannot be declared {k}-bounded{}",
                        i + 1,
                        allowed.map(|a| format!(" (its bound is {a})")).unwrap_or_default()
                    )));
                }
            }
        }
    }
    Ok(())
}
