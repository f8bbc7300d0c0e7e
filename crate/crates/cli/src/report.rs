use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Valid,
    Invalid,
    Sat,
    UnsatWithinBounds,
    Accepted,
    Rejected,
    Error,
}

impl Verdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Valid | Verdict::Sat | Verdict::Accepted => 0,
            Verdict::Invalid | Verdict::UnsatWithinBounds | Verdict::Rejected => 1,
            Verdict::Error => 2,
        }
    }

    fn word(self) -> &'static str {
        match self {
            Verdict::Valid => "valid",
            Verdict::Invalid => "invalid",
            Verdict::Sat => "sat",
            Verdict::UnsatWithinBounds => "unsat-within-bounds",
            Verdict::Accepted => "accepted",
            Verdict::Rejected => "rejected",
            Verdict::Error => "error",
        }
    }
}

/// One run's result. `witness` is present exactly for verdicts that carry
/// one; `details` holds everything else worth reporting.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
    #[serde(skip_serializing_if = "serde_json::Map::is_empty")]
    pub details: serde_json::Map<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Report {
    pub fn new(command: &str, verdict: Verdict) -> Self {
        Report { command: command.to_string(), verdict, witness: None, details: serde_json::Map::new(), error: None }
    }

    pub fn error(command: &str, message: String) -> Self {
        Report { error: Some(message), ..Report::new(command, Verdict::Error) }
    }

    pub fn with_witness(mut self, w: Value) -> Self {
        self.witness = Some(w);
        self
    }

    pub fn detail(mut self, key: &str, v: impl Into<Value>) -> Self {
        self.details.insert(key.to_string(), v.into());
        self
    }

    pub fn machine(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize") + "\n"
    }

    pub fn human(&self) -> String {
        let mut s = String::new();
        writeln!(s, "{}: {}", self.command, self.verdict.word()).unwrap();
        if let Some(e) = &self.error {
            writeln!(s, "error: {e}").unwrap();
        }
        if let Some(w) = &self.witness {
            render(&mut s, "witness", w, 0);
        }
        for (k, v) in &self.details {
            render(&mut s, k, v, 0);
        }
        s
    }
}

fn render(s: &mut String, key: &str, v: &Value, indent: usize) {
    let pad = " ".repeat(indent);
    match v {
        Value::Object(map) => {
            writeln!(s, "{pad}{key}:").unwrap();
            for (k, x) in map {
                render(s, k, x, indent + 2);
            }
        }
        Value::String(text) if text.contains('\n') => {
            writeln!(s, "{pad}{key}:").unwrap();
            for line in text.lines() {
                writeln!(s, "{pad}  {line}").unwrap();
            }
        }
        Value::String(text) => writeln!(s, "{pad}{key}: {text}").unwrap(),
        Value::Array(xs) if xs.iter().all(|x| !x.is_object()) => {
            let items: Vec<String> = xs.iter().map(|x| x.as_str().map(str::to_string).unwrap_or_else(|| x.to_string())).collect();
            writeln!(s, "{pad}{key}: [{}]", items.join(", ")).unwrap();
        }
        Value::Array(xs) => {
            writeln!(s, "{pad}{key}:").unwrap();
            for (i, x) in xs.iter().enumerate() {
                render(s, &i.to_string(), x, indent + 2);
            }
        }
        other => writeln!(s, "{pad}{key}: {other}").unwrap(),
    }
}
