//! Small hand-built models used by tests, examples and the CLI.

use std::collections::BTreeSet;

use crate::model::{Mode, Model, Relation};

/// Three worlds `0, 1, 2` and agents `a = 0`, `b = 1`, `c = 2`.
///
/// `a` and `c` see only the actual world; `b` links `0–1` and `1–2` but not
/// `0–2`, so the model is reflexive-mode only. Depths: `a` is 1 everywhere,
/// `b` is 0, 2, 0 and `c` is 2 everywhere. `p0` holds in worlds 0 and 1.
///
/// At world 1 under ADPAL, `[K[2] K[2] p0]K[0] K[1] p0` holds although
/// `K[0] K[1] p0` does not: `a` learns from an announcement it is too shallow
/// to perceive.
pub fn three_world_model() -> Model {
    let names = vec!["0".to_string(), "1".to_string(), "2".to_string()];
    let p0: BTreeSet<String> = ["p0".to_string()].into();
    let val = vec![p0.clone(), p0, BTreeSet::new()];
    let rel = vec![
        Relation::identity(3),
        Relation::from_pairs(3, [(0, 1), (1, 0), (1, 2), (2, 1)]),
        Relation::identity(3),
    ];
    let depth = vec![vec![1, 1, 1], vec![0, 2, 0], vec![2, 2, 2]];
    Model::new(names, val, rel, depth, Mode::Reflexive).expect("fixture is well formed")
}

/// A single state with one agent per entry of `depths` and no true atoms.
pub fn single_state(depths: &[i64]) -> Model {
    Model::new(
        vec!["s".into()],
        vec![BTreeSet::new()],
        depths.iter().map(|_| Relation::identity(1)).collect(),
        depths.iter().map(|&d| vec![d]).collect(),
        Mode::Equivalence,
    )
    .expect("single state is well formed")
}
