//! Formulas, similarity types, parsing, printing and substitution.

mod formula;
mod parse;
mod print;
mod signature;
mod subst;

pub use formula::{fresh_nominal, fresh_nominals, Formula, Nominal};
pub use parse::{parse, parse_prefix, ParseError, ParseErrorKind};
pub use print::print;
pub use signature::{Bound, OpDecl, OpShape, Signature, SignatureError};
pub use subst::{substitute, Substitution};
