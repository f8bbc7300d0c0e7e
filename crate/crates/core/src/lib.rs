//! A workbench for coalgebraic hybrid logic.
//!
//! The crate covers the whole pipeline from text to models:
//!
//! * [`syntax`]: hybrid formulas with nominals, `@` and the `dn` binder,
//!   modal similarity types, a parser and printer, capture-avoiding
//!   substitution.
//! * [`coalgebra`]: finite coalgebraic models for Kripke frames, multigraphs,
//!   neighbourhood and monotone frames, selection functions and game frames,
//!   together with the satisfaction relation and frame checking.
//! * [`hilbert`]: a checker for Hilbert-style proof scripts with the
//!   `Name`, `Paste` and `DA` rules.
//! * [`onestep`]: one-step satisfiability and one-step consistency.
//! * [`namedmodel`]: pastedness of ABoxes and a bounded search for named
//!   models.
//!
//! ```
//! use hycoa::syntax::{parse, Signature};
//! use hycoa::coalgebra::{Functor, HybridModel, TxElem, StateSet};
//!
//! let sig = Signature::hybrid_k();
//! let f = parse("@i' (dia p)", &sig).unwrap();
//! let mut m = HybridModel::new(Functor::Kripke, vec!["s0".into(), "s1".into()]);
//! m.set_gamma(0, TxElem::Set(StateSet::from_states([0, 1])));
//! m.set_gamma(1, TxElem::Set(StateSet::empty()));
//! m.set_prop("p", StateSet::singleton(1));
//! m.set_nominal("i", 0);
//! assert!(m.satisfies(1, &f).unwrap());
//! ```

pub mod coalgebra;
pub mod hilbert;
pub mod namedmodel;
pub mod onestep;
pub mod prop;
pub mod syntax;

mod error;
pub use error::{Error, Result};


#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/syntax.md")]
    mod syntax {}
    #[doc = include_str!("../../../book/src/models.md")]
    mod models {}
    #[doc = include_str!("../../../book/src/proofs.md")]
    mod proofs {}
    #[doc = include_str!("../../../book/src/onestep.md")]
    mod onestep {}
    #[doc = include_str!("../../../book/src/named-models.md")]
    mod named_models {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
