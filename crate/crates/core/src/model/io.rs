//! JSON model files.
//!
//! ```json
//! {
//!   "agents": 2,
//!   "depth": { "0": { "s": 1, "t": 0 }, "1": { "s": 2, "t": 2 } },
//!   "mode": "equivalence",
//!   "rel": { "0": [["s", "t"], ["t", "s"]], "1": [] },
//!   "states": ["s", "t"],
//!   "val": { "s": ["p"], "t": [] }
//! }
//! ```
//!
//! Reflexive pairs are implicit. In equivalence mode the symmetric and
//! transitive closure of the listed pairs is taken on load, with a warning
//! when that adds pairs. Saving is canonical: top-level keys sorted, states
//! in declaration order, every non-reflexive pair listed in state order.

use std::collections::{BTreeMap, BTreeSet};

use serde::Deserialize;
use serde_json::{json, Map, Value};
use thiserror::Error;

use super::kripke::{validate, Mode, Model, ModelError, Relation};

/// Largest depth magnitude accepted in a model file.
pub const DEPTH_CAP: i64 = (1 << 31) - 1;

#[derive(Debug, Error)]
pub enum ModelFileError {
    #[error("malformed model file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unknown state `{0}` in {1}")]
    UnknownState(String, &'static str),
    #[error("agent key `{0}` is not an agent of this model")]
    UnknownAgent(String),
    #[error("depth {0} exceeds the file format cap of 2^31-1")]
    DepthOutOfRange(i64),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    agents: usize,
    states: Vec<String>,
    #[serde(default)]
    val: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    rel: BTreeMap<String, Vec<(String, String)>>,
    #[serde(default)]
    depth: BTreeMap<String, BTreeMap<String, i64>>,
    #[serde(default = "default_mode")]
    mode: Mode,
}

fn default_mode() -> Mode {
    Mode::Equivalence
}

/// A parsed model plus any warnings raised while loading it.
#[derive(Debug)]
pub struct Loaded {
    pub model: Model,
    pub warnings: Vec<String>,
}

fn agent_key(key: &str, agents: usize) -> Result<usize, ModelFileError> {
    key.parse::<usize>()
        .ok()
        .filter(|&a| a < agents)
        .ok_or_else(|| ModelFileError::UnknownAgent(key.to_string()))
}

pub fn load_model(text: &str) -> Result<Loaded, ModelFileError> {
    let raw: RawModel = serde_json::from_str(text)?;
    let n = raw.states.len();
    let index: BTreeMap<&str, usize> = raw
        .states
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_str(), i))
        .collect();
    if index.len() != n {
        let dup = raw
            .states
            .iter()
            .enumerate()
            .find(|(i, s)| index[s.as_str()] != *i)
            .map(|(_, s)| s.clone())
            .unwrap_or_default();
        return Err(ModelError::DuplicateState(dup).into());
    }
    let lookup = |name: &str, ctx: &'static str| {
        index
            .get(name)
            .copied()
            .ok_or_else(|| ModelFileError::UnknownState(name.to_string(), ctx))
    };

    let mut val = vec![BTreeSet::new(); n];
    for (state, atoms) in &raw.val {
        val[lookup(state, "val")?] = atoms.iter().cloned().collect();
    }

    let mut pairs = vec![Vec::new(); raw.agents];
    for (key, list) in &raw.rel {
        let a = agent_key(key, raw.agents)?;
        for (s, t) in list {
            pairs[a].push((lookup(s, "rel")?, lookup(t, "rel")?));
        }
    }

    let mut depth = vec![vec![0i64; n]; raw.agents];
    for (key, per_state) in &raw.depth {
        let a = agent_key(key, raw.agents)?;
        for (state, &d) in per_state {
            if d.abs() > DEPTH_CAP {
                return Err(ModelFileError::DepthOutOfRange(d));
            }
            depth[a][lookup(state, "depth")?] = d;
        }
    }

    let mut warnings = Vec::new();
    let rel: Vec<Relation> = pairs
        .into_iter()
        .map(|p| Relation::from_pairs(n, p))
        .collect();
    let rel = match raw.mode {
        Mode::Reflexive => rel,
        Mode::Equivalence => {
            let probe = Model::new(
                raw.states.clone(),
                val.clone(),
                rel.clone(),
                depth.clone(),
                Mode::Reflexive,
            )?;
            if let Err(v) = validate(&probe, Mode::Equivalence) {
                let msg = format!("relations closed under symmetry and transitivity ({v})");
                log::warn!("{msg}");
                warnings.push(msg);
            }
            rel.iter().map(Relation::closure).collect()
        }
    };
    let model = Model::new(raw.states, val, rel, depth, raw.mode)?;
    Ok(Loaded { model, warnings })
}

/// Canonical JSON document for a model.
pub fn model_to_value(m: &Model) -> Value {
    let mut val = Map::new();
    for s in m.states() {
        val.insert(m.name(s).to_string(), json!(m.valuation(s)));
    }
    let mut rel = Map::new();
    let mut depth = Map::new();
    for (a, r) in m.relations().iter().enumerate() {
        let mut list = Vec::new();
        for s in m.states() {
            let mut succ: Vec<usize> = r.successors(s).filter(|&t| t != s).collect();
            succ.sort_unstable();
            for t in succ {
                list.push(json!([m.name(s), m.name(t)]));
            }
        }
        rel.insert(a.to_string(), Value::Array(list));
        let mut per_state = Map::new();
        for s in m.states() {
            per_state.insert(m.name(s).to_string(), json!(m.depths()[a][s]));
        }
        depth.insert(a.to_string(), Value::Object(per_state));
    }
    let mut doc = Map::new();
    doc.insert("agents".into(), json!(m.agents()));
    doc.insert("depth".into(), Value::Object(depth));
    doc.insert("mode".into(), json!(m.mode()));
    doc.insert("rel".into(), Value::Object(rel));
    doc.insert("states".into(), json!(m.names()));
    doc.insert("val".into(), Value::Object(val));
    Value::Object(doc)
}

/// Canonical serialization, newline terminated.
pub fn save_model(m: &Model) -> String {
    let mut text = serde_json::to_string_pretty(&model_to_value(m)).expect("JSON values serialize");
    text.push('\n');
    text
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::AgentId;

    const SAMPLE: &str = r#"{
        "agents": 2,
        "states": ["s", "t", "u"],
        "val": {"s": ["p"], "u": ["p", "q"]},
        "rel": {"0": [["s", "t"]], "1": [["t", "u"], ["u", "t"]]},
        "depth": {"0": {"s": 1, "t": 1, "u": 0}, "1": {"s": 2}},
        "mode": "equivalence"
    }"#;

    #[test]
    fn load_closes_and_warns() {
        let loaded = load_model(SAMPLE).unwrap();
        assert_eq!(loaded.warnings.len(), 1);
        let m = loaded.model;
        assert!(m.relation(AgentId(0)).related(1, 0));
        assert!(m.relation(AgentId(1)).related(2, 1));
        assert_eq!(m.depth(AgentId(1), 1), 0);
        assert!(m.holds(2, "q"));
    }

    #[test]
    fn canonical_round_trip() {
        let m = load_model(SAMPLE).unwrap().model;
        let text = save_model(&m);
        let again = load_model(&text).unwrap();
        assert!(again.warnings.is_empty());
        assert_eq!(again.model, m);
        assert_eq!(save_model(&again.model), text);
        let keys: Vec<&str> = text
            .lines()
            .filter(|l| l.starts_with("  \""))
            .map(|l| l.trim().split('"').nth(1).unwrap())
            .collect();
        assert_eq!(keys, ["agents", "depth", "mode", "rel", "states", "val"]);
    }

    #[test]
    fn reflexive_mode_keeps_pairs() {
        let text = r#"{"agents":1,"states":["a","b"],"rel":{"0":[["a","b"]]},"mode":"reflexive"}"#;
        let m = load_model(text).unwrap().model;
        assert!(m.relation(AgentId(0)).related(0, 1));
        assert!(!m.relation(AgentId(0)).related(1, 0));
    }

    #[test]
    fn errors() {
        assert!(matches!(
            load_model(r#"{"agents":1,"states":["a"],"val":{"b":[]}}"#),
            Err(ModelFileError::UnknownState(..))
        ));
        assert!(matches!(
            load_model(r#"{"agents":1,"states":["a"],"depth":{"3":{"a":1}}}"#),
            Err(ModelFileError::UnknownAgent(..))
        ));
        assert!(matches!(
            load_model(r#"{"agents":1,"states":["a"],"depth":{"0":{"a":4294967296}}}"#),
            Err(ModelFileError::DepthOutOfRange(_))
        ));
        assert!(matches!(load_model("{"), Err(ModelFileError::Json(_))));
        assert!(matches!(
            load_model(r#"{"agents":0,"states":["a","a"]}"#),
            Err(ModelFileError::Model(ModelError::DuplicateState(_)))
        ));
    }
}
