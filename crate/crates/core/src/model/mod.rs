//! Kripke structures with agent depths.

mod io;
mod kripke;
mod unionfind;

pub use io::{load_model, model_to_value, save_model, Loaded, ModelFileError, DEPTH_CAP};
pub use kripke::{
    connected_component, is_unambiguous, validate, Mode, Model, ModelError, PointedModel, Property,
    Relation, StateId, Successors, Violation,
};
pub use unionfind::UnionFind;
