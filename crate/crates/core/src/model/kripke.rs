use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::unionfind::UnionFind;
use crate::syntax::{AgentId, TOP_ATOM};

/// Index of a state within its model.
pub type StateId = usize;

/// Which closure properties the accessibility relations must satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Every relation is an equivalence relation.
    Equivalence,
    /// Relations are only reflexive.
    Reflexive,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Equivalence => "equivalence",
            Mode::Reflexive => "reflexive",
        })
    }
}

/// One agent's accessibility relation. Reflexive loops are never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Relation {
    /// Equivalence classes: `class_of[s]` is numbered by first occurrence.
    Partition {
        class_of: Vec<usize>,
        members: Vec<Vec<StateId>>,
    },
    /// Explicit successor sets, excluding `s` itself.
    Pairs(Vec<BTreeSet<StateId>>),
}

impl Relation {
    /// Builds a partition from any class labelling.
    pub fn partition(labels: &[usize]) -> Relation {
        let mut uf = UnionFind::new(labels.len());
        let mut first_with_label = std::collections::HashMap::new();
        for (s, &l) in labels.iter().enumerate() {
            if let Some(&t) = first_with_label.get(&l) {
                uf.union(s, t);
            } else {
                first_with_label.insert(l, s);
            }
        }
        Relation::from_union_find(&mut uf)
    }

    pub(crate) fn from_union_find(uf: &mut UnionFind) -> Relation {
        let class_of = uf.labels();
        let classes = class_of.iter().copied().max().map_or(0, |m| m + 1);
        let mut members = vec![Vec::new(); classes];
        for (s, &c) in class_of.iter().enumerate() {
            members[c].push(s);
        }
        Relation::Partition { class_of, members }
    }

    /// The identity relation over `n` states.
    pub fn identity(n: usize) -> Relation {
        Relation::partition(&(0..n).collect::<Vec<_>>())
    }

    /// The complete relation over `n` states.
    pub fn complete(n: usize) -> Relation {
        Relation::partition(&vec![0; n])
    }

    /// Explicit pairs; reflexive loops in the input are dropped.
    pub fn from_pairs(n: usize, pairs: impl IntoIterator<Item = (StateId, StateId)>) -> Relation {
        let mut succ = vec![BTreeSet::new(); n];
        for (s, t) in pairs {
            if s != t {
                succ[s].insert(t);
            }
        }
        Relation::Pairs(succ)
    }

    fn state_count(&self) -> usize {
        match self {
            Relation::Partition { class_of, .. } => class_of.len(),
            Relation::Pairs(succ) => succ.len(),
        }
    }

    pub fn related(&self, s: StateId, t: StateId) -> bool {
        match self {
            Relation::Partition { class_of, .. } => class_of[s] == class_of[t],
            Relation::Pairs(succ) => s == t || succ[s].contains(&t),
        }
    }

    pub fn successors(&self, s: StateId) -> Successors<'_> {
        match self {
            Relation::Partition { class_of, members } => {
                Successors::Class(members[class_of[s]].iter())
            }
            Relation::Pairs(succ) => {
                Successors::Pairs(std::iter::once(s).chain(succ[s].iter().copied()))
            }
        }
    }

    /// Materializes explicit pairs.
    pub fn to_pairs(&self) -> Relation {
        match self {
            Relation::Pairs(_) => self.clone(),
            Relation::Partition { class_of, members } => Relation::Pairs(
                class_of
                    .iter()
                    .enumerate()
                    .map(|(s, &c)| members[c].iter().copied().filter(|&t| t != s).collect())
                    .collect(),
            ),
        }
    }

    /// Symmetric and transitive closure as a partition.
    pub fn closure(&self) -> Relation {
        match self {
            Relation::Partition { .. } => self.clone(),
            Relation::Pairs(succ) => {
                let mut uf = UnionFind::new(succ.len());
                for (s, ts) in succ.iter().enumerate() {
                    for &t in ts {
                        uf.union(s, t);
                    }
                }
                Relation::from_union_find(&mut uf)
            }
        }
    }

    /// Number of pairs including the implicit reflexive ones.
    pub fn pair_count(&self) -> usize {
        match self {
            Relation::Partition { members, .. } => members.iter().map(|m| m.len() * m.len()).sum(),
            Relation::Pairs(succ) => succ.iter().map(|s| s.len() + 1).sum(),
        }
    }

    fn restrict(&self, new_index: &[Option<StateId>], kept: usize) -> Relation {
        match self {
            Relation::Partition { class_of, .. } => {
                let labels: Vec<usize> = class_of
                    .iter()
                    .zip(new_index)
                    .filter_map(|(&c, idx)| idx.map(|_| c))
                    .collect();
                Relation::partition(&labels)
            }
            Relation::Pairs(succ) => {
                let mut out = vec![BTreeSet::new(); kept];
                for (s, ts) in succ.iter().enumerate() {
                    if let Some(ns) = new_index[s] {
                        out[ns] = ts.iter().filter_map(|&t| new_index[t]).collect();
                    }
                }
                Relation::Pairs(out)
            }
        }
    }
}

pub enum Successors<'a> {
    Class(std::slice::Iter<'a, StateId>),
    Pairs(
        std::iter::Chain<
            std::iter::Once<StateId>,
            std::iter::Copied<std::collections::btree_set::Iter<'a, StateId>>,
        >,
    ),
}

impl Iterator for Successors<'_> {
    type Item = StateId;

    fn next(&mut self) -> Option<StateId> {
        match self {
            Successors::Class(it) => it.next().copied(),
            Successors::Pairs(it) => it.next(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("model has {states} states but {what} has length {len}")]
    Dimension {
        what: String,
        states: usize,
        len: usize,
    },
    #[error("model declares {declared} agents but {what} covers {found}")]
    AgentCount {
        what: String,
        declared: usize,
        found: usize,
    },
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("state index {0} out of range")]
    StateOutOfRange(StateId),
    #[error("unknown agent {0}")]
    UnknownAgent(AgentId),
    #[error("duplicate state name `{0}`")]
    DuplicateState(String),
    #[error("atom `{0}` is reserved")]
    ReservedAtom(String),
    #[error("relation of agent {agent} is not an equivalence: {violation}")]
    NotEquivalence {
        agent: AgentId,
        violation: Violation,
    },
}

/// A closure property of an accessibility relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Property {
    Reflexivity,
    Symmetry,
    Transitivity,
}

/// First violated closure property, with the missing pair as witness.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub agent: AgentId,
    pub property: Property,
    /// The pair that should be present but is not.
    pub missing: (StateId, StateId),
    /// For transitivity, the intermediate state.
    pub via: Option<StateId>,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (s, t) = self.missing;
        match (self.property, self.via) {
            (Property::Transitivity, Some(v)) => write!(
                f,
                "agent {}: transitivity, ({s},{v}) and ({v},{t}) but not ({s},{t})",
                self.agent
            ),
            (Property::Symmetry, _) => {
                write!(
                    f,
                    "agent {}: symmetry, ({t},{s}) but not ({s},{t})",
                    self.agent
                )
            }
            (p, _) => write!(f, "agent {}: {p:?}, missing ({s},{t})", self.agent),
        }
    }
}

/// A finite Kripke structure with per-agent, per-state depths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    agents: usize,
    names: Vec<String>,
    val: Vec<BTreeSet<String>>,
    rel: Vec<Relation>,
    /// `depth[agent][state]`
    depth: Vec<Vec<i64>>,
    mode: Mode,
}

impl Model {
    /// Builds a model and checks that dimensions agree. In equivalence mode
    /// explicit pair relations must already be equivalence relations.
    pub fn new(
        names: Vec<String>,
        val: Vec<BTreeSet<String>>,
        rel: Vec<Relation>,
        depth: Vec<Vec<i64>>,
        mode: Mode,
    ) -> Result<Model, ModelError> {
        let n = names.len();
        let agents = rel.len();
        let mut seen = BTreeSet::new();
        for name in &names {
            if !seen.insert(name) {
                return Err(ModelError::DuplicateState(name.clone()));
            }
        }
        if val.len() != n {
            return Err(ModelError::Dimension {
                what: "valuation".into(),
                states: n,
                len: val.len(),
            });
        }
        if let Some(atom) = val.iter().flatten().find(|a| *a == TOP_ATOM) {
            return Err(ModelError::ReservedAtom(atom.clone()));
        }
        if depth.len() != agents {
            return Err(ModelError::AgentCount {
                what: "depth".into(),
                declared: agents,
                found: depth.len(),
            });
        }
        for (a, r) in rel.iter().enumerate() {
            if r.state_count() != n {
                return Err(ModelError::Dimension {
                    what: format!("relation of agent {a}"),
                    states: n,
                    len: r.state_count(),
                });
            }
            if depth[a].len() != n {
                return Err(ModelError::Dimension {
                    what: format!("depths of agent {a}"),
                    states: n,
                    len: depth[a].len(),
                });
            }
            if let Relation::Pairs(succ) = r {
                if let Some(&t) = succ.iter().flatten().find(|&&t| t >= n) {
                    return Err(ModelError::StateOutOfRange(t));
                }
            }
        }
        let model = Model {
            agents,
            names,
            val,
            rel,
            depth,
            mode,
        };
        if mode == Mode::Equivalence {
            if let Err(violation) = validate(&model, Mode::Equivalence) {
                return Err(ModelError::NotEquivalence {
                    agent: violation.agent,
                    violation,
                });
            }
        }
        Ok(model)
    }

    pub fn agents(&self) -> usize {
        self.agents
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn states(&self) -> std::ops::Range<StateId> {
        0..self.names.len()
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, s: StateId) -> &str {
        &self.names[s]
    }

    pub fn state_index(&self, name: &str) -> Option<StateId> {
        self.names.iter().position(|n| n == name)
    }

    pub fn valuation(&self, s: StateId) -> &BTreeSet<String> {
        &self.val[s]
    }

    pub fn holds(&self, s: StateId, atom: &str) -> bool {
        atom == TOP_ATOM || self.val[s].contains(atom)
    }

    pub fn relation(&self, agent: AgentId) -> &Relation {
        &self.rel[agent.0]
    }

    pub fn relations(&self) -> &[Relation] {
        &self.rel
    }

    pub fn depth(&self, agent: AgentId, s: StateId) -> i64 {
        self.depth[agent.0][s]
    }

    pub fn depths(&self) -> &[Vec<i64>] {
        &self.depth
    }

    pub fn successors(&self, agent: AgentId, s: StateId) -> Successors<'_> {
        self.rel[agent.0].successors(s)
    }

    /// `‖M‖`: states plus related pairs, counting `k²` pairs for an
    /// equivalence class of size `k`.
    pub fn size(&self) -> usize {
        self.len() + self.rel.iter().map(Relation::pair_count).sum::<usize>()
    }

    /// Same model in reflexive mode with explicit pairs.
    pub fn demote(&self) -> Model {
        Model {
            rel: self.rel.iter().map(Relation::to_pairs).collect(),
            mode: Mode::Reflexive,
            ..self.clone()
        }
    }

    /// Keeps the states marked in `keep`, returning the new index of every
    /// old state.
    pub fn restrict(&self, keep: &[bool]) -> (Model, Vec<Option<StateId>>) {
        let mut new_index = Vec::with_capacity(self.len());
        let mut next = 0;
        for &k in keep {
            new_index.push(k.then(|| {
                next += 1;
                next - 1
            }));
        }
        let pick = |v: &Vec<i64>| {
            v.iter()
                .zip(keep)
                .filter_map(|(d, &k)| k.then_some(*d))
                .collect::<Vec<_>>()
        };
        let model = Model {
            agents: self.agents,
            names: self
                .names
                .iter()
                .zip(keep)
                .filter(|(_, &k)| k)
                .map(|(n, _)| n.clone())
                .collect(),
            val: self
                .val
                .iter()
                .zip(keep)
                .filter(|(_, &k)| k)
                .map(|(v, _)| v.clone())
                .collect(),
            rel: self
                .rel
                .iter()
                .map(|r| r.restrict(&new_index, next))
                .collect(),
            depth: self.depth.iter().map(pick).collect(),
            mode: self.mode,
        };
        (model, new_index)
    }

    /// Replaces the depth table. Dimensions must match.
    pub fn with_depths(&self, depth: Vec<Vec<i64>>) -> Result<Model, ModelError> {
        Model::new(
            self.names.clone(),
            self.val.clone(),
            self.rel.clone(),
            depth,
            self.mode,
        )
    }

    /// Unchecked constructor for the update operations.
    pub(crate) fn from_parts(
        names: Vec<String>,
        val: Vec<BTreeSet<String>>,
        rel: Vec<Relation>,
        depth: Vec<Vec<i64>>,
        mode: Mode,
    ) -> Model {
        debug_assert!(rel.iter().all(|r| r.state_count() == names.len()));
        Model {
            agents: rel.len(),
            names,
            val,
            rel,
            depth,
            mode,
        }
    }
}

/// A model together with a designated state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointedModel {
    pub model: Model,
    pub state: StateId,
}

impl PointedModel {
    pub fn new(model: Model, state: StateId) -> Result<Self, ModelError> {
        if state >= model.len() {
            return Err(ModelError::StateOutOfRange(state));
        }
        Ok(PointedModel { model, state })
    }
}

/// Checks every relation against the closure properties required by `mode`.
///
/// Reflexivity always holds since loops are implicit; in equivalence mode the
/// first missing symmetric or transitive pair is reported.
pub fn validate(m: &Model, mode: Mode) -> Result<(), Violation> {
    if mode == Mode::Reflexive {
        return Ok(());
    }
    for (a, r) in m.rel.iter().enumerate() {
        let Relation::Pairs(succ) = r else { continue };
        let agent = AgentId(a);
        for (s, ts) in succ.iter().enumerate() {
            for &t in ts {
                if !r.related(t, s) {
                    return Err(Violation {
                        agent,
                        property: Property::Symmetry,
                        missing: (t, s),
                        via: None,
                    });
                }
            }
        }
        for (s, ts) in succ.iter().enumerate() {
            for &t in ts {
                for &u in &succ[t] {
                    if !r.related(s, u) {
                        return Err(Violation {
                            agent,
                            property: Property::Transitivity,
                            missing: (s, u),
                            via: Some(t),
                        });
                    }
                }
            }
        }
    }
    Ok(())
}

/// Whether every agent's depth is constant along its own relation.
pub fn is_unambiguous(m: &Model) -> bool {
    (0..m.agents).all(|a| {
        let agent = AgentId(a);
        m.states().all(|s| {
            m.successors(agent, s)
                .all(|t| m.depth(agent, s) == m.depth(agent, t))
        })
    })
}

/// The equivalence class of `s` (equivalence mode) or the set of states
/// reachable from `s` (reflexive mode).
pub fn connected_component(
    m: &Model,
    s: StateId,
    agent: AgentId,
) -> Result<BTreeSet<StateId>, ModelError> {
    if s >= m.len() {
        return Err(ModelError::StateOutOfRange(s));
    }
    if agent.0 >= m.agents {
        return Err(ModelError::UnknownAgent(agent));
    }
    let mut seen = BTreeSet::from([s]);
    let mut queue = VecDeque::from([s]);
    while let Some(x) = queue.pop_front() {
        for y in m.successors(agent, x) {
            if seen.insert(y) {
                queue.push_back(y);
            }
        }
    }
    Ok(seen)
}
