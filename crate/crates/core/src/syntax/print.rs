use std::fmt;

use super::formula::Formula;
use super::signature::is_infix_name;

/// Prints in the surface syntax accepted by [`parse`](super::parse).
/// Implication, bi-implication, disjunction and `false` are re-sugared.
pub fn print(f: &Formula) -> String {
    let mut out = String::new();
    write_formula(&mut out, f);
    out
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print(self))
    }
}

/// Whether the printed form is self-delimiting (atom or parenthesised).
fn is_closed(f: &Formula) -> bool {
    if f.is_atomic() || f.as_iff().is_some() || f.as_disjunction().is_some() || f.as_implication().is_some() {
        return true;
    }
    match f {
        Formula::And(..) => true,
        Formula::Modal(op, args) => args.is_empty() || (args.len() == 2 && is_infix_name(op)),
        _ => false,
    }
}

fn write_wrapped(out: &mut String, f: &Formula) {
    if is_closed(f) {
        write_formula(out, f);
    } else {
        out.push('(');
        write_formula(out, f);
        out.push(')');
    }
}

fn write_binary(out: &mut String, a: &Formula, sym: &str, b: &Formula) {
    out.push('(');
    write_formula(out, a);
    out.push(' ');
    out.push_str(sym);
    out.push(' ');
    write_formula(out, b);
    out.push(')');
}

fn write_formula(out: &mut String, f: &Formula) {
    if *f == Formula::bot() {
        out.push_str("false");
        return;
    }
    if let Some((a, b)) = f.as_iff() {
        return write_binary(out, a, "<->", b);
    }
    if let Some((a, b)) = f.as_disjunction() {
        return write_binary(out, a, "|", b);
    }
    if let Some((a, b)) = f.as_implication() {
        return write_binary(out, a, "->", b);
    }
    match f {
        Formula::Top => out.push_str("true"),
        Formula::Prop(p) => out.push_str(p),
        Formula::Nom(n) => out.push_str(&n.to_string()),
        Formula::Not(a) => {
            out.push_str("~ ");
            write_wrapped(out, a);
        }
        Formula::And(a, b) => write_binary(out, a, "&", b),
        Formula::Modal(op, args) => match args.as_slice() {
            [] => out.push_str(op),
            [a, b] if is_infix_name(op) => write_binary(out, a, op, b),
            [a] => {
                out.push_str(op);
                out.push(' ');
                write_wrapped(out, a);
            }
            many => {
                out.push_str(op);
                out.push_str(" (");
                for (k, a) in many.iter().enumerate() {
                    if k > 0 {
                        out.push_str(", ");
                    }
                    write_formula(out, a);
                }
                out.push(')');
            }
        },
        Formula::At(i, a) => {
            out.push_str(&format!("@{i} "));
            write_wrapped(out, a);
        }
        Formula::Down(i, a) => {
            out.push_str(&format!("dn {i}. "));
            write_wrapped(out, a);
        }
    }
}
