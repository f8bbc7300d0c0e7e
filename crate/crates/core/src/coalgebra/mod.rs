//! Finite coalgebraic models and their predicate liftings.

mod functor;
mod io;
mod laws;
mod model;
mod stateset;

pub use functor::{
    for_each_tx, map_t, tx_count, upward_closure, Functor, GameElem, Lifting, SearchBounds, Selection, TxElem, INF,
};
pub use io::{parse_model, write_model};
pub use laws::{bounded_failure, check_bounded, check_naturality, BoundednessFailure, NaturalityFailure};
pub use model::{
    frame_check, frame_satisfies_pure, kripke_to_multigraph, model_satisfies_globally, satisfies, truth_set,
    FrameCounterexample, HybridModel,
};
pub use stateset::{StateSet, MAX_STATES};
