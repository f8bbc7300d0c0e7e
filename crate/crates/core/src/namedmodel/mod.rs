//! Named models: pastedness of ABoxes and a bounded search for models in
//! which every state is the value of a nominal.

mod abox;
mod problem;
mod search;
mod verify;

pub use abox::{is_one_pasted, is_zero_pasted, saturate, subformula_closure, ABoxLabel};
pub use problem::{parse_bounds, NamedModelProblem};
pub use search::{named_model_search, NamedModel, SearchOutcome};
pub use verify::{verify_named_model, verify_with_labels, CheckReport};
