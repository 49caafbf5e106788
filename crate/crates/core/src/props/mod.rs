//! Axiom schemas, random generators and empirical soundness suites.

mod axioms;
mod random;
mod suite;

pub use axioms::{instantiate_axiom, random_instance, AxiomSchema, AxiomTable, Instance};
pub use random::{random_formula, random_model, random_model_with, RandomSpec};
pub use suite::{
    amnesia_instance, amnesia_suite, find_composition_counterexample, kp_ta_case, kp_ta_suite,
    kp_top_case, minimize, schema_suite, soundness_suite, KpTaCase, KpTaReport, KpTaVariant,
    SoundnessReport, SuiteError, SuiteSize, Violation,
};
