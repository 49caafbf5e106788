//! Model updates after a public announcement.
//!
//! Each update takes the truth value of the announced formula at every
//! state and its modal depth, and returns the new model together with the
//! state that continues each old state when the announcement held there.

use std::collections::BTreeSet;

use crate::model::{Mode, Model, Relation, StateId, UnionFind};
use crate::syntax::AgentId;

use super::kind::SemanticsKind;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Update {
    pub model: Model,
    /// For each old state where the announcement holds, the state of the
    /// new model at which evaluation continues.
    pub point: Vec<Option<StateId>>,
}

/// Dispatches to the update for `kind`. DBEL has no update and is treated as
/// DPAL would be; callers reject announcements under DBEL beforehand.
pub fn update_with(kind: SemanticsKind, m: &Model, truth: &[bool], depth: usize) -> Update {
    match kind {
        SemanticsKind::Dbel | SemanticsKind::Dpal => dpal(m, truth, depth),
        SemanticsKind::Edpal => edpal(m, truth, depth),
        SemanticsKind::Adpal => adpal(m, truth, depth),
    }
}

/// Positive copy: depth decremented only when it covers the announcement.
fn perceived(d: i64, announced: i64) -> i64 {
    if d < announced {
        d
    } else {
        d - announced
    }
}

/// World-duplicating update.
///
/// States are every `(0, s)` followed by `(1, s)` for each `s` where the
/// announcement holds, named `0.s` and `1.s`. Within each copy an agent
/// relates what it related before; `(1, s)` and `(0, s)` are linked for
/// agents too shallow at `s` to perceive the announcement. The relation is
/// the symmetric transitive closure of these links.
pub fn dpal(m: &Model, truth: &[bool], depth: usize) -> Update {
    let n = m.len();
    let announced = depth as i64;
    let mut positive = vec![None; n];
    let mut next = n;
    for s in m.states() {
        if truth[s] {
            positive[s] = Some(next);
            next += 1;
        }
    }
    let total = next;

    let mut names: Vec<String> = m.names().iter().map(|s| format!("0.{s}")).collect();
    let mut val: Vec<BTreeSet<String>> = m.states().map(|s| m.valuation(s).clone()).collect();
    for s in m.states().filter(|&s| truth[s]) {
        names.push(format!("1.{}", m.name(s)));
        val.push(m.valuation(s).clone());
    }

    let mut rel = Vec::with_capacity(m.agents());
    let mut depths = Vec::with_capacity(m.agents());
    for a in 0..m.agents() {
        let agent = AgentId(a);
        let mut uf = UnionFind::new(total);
        for s in m.states() {
            for t in m.successors(agent, s) {
                uf.union(s, t);
                if let (Some(ps), Some(pt)) = (positive[s], positive[t]) {
                    uf.union(ps, pt);
                }
            }
            if let Some(ps) = positive[s] {
                if m.depth(agent, s) < announced {
                    uf.union(ps, s);
                }
            }
        }
        rel.push(Relation::from_union_find(&mut uf));

        let mut d: Vec<i64> = m.depths()[a].clone();
        d.extend(
            m.states()
                .filter(|&s| truth[s])
                .map(|s| perceived(m.depth(agent, s), announced)),
        );
        depths.push(d);
    }
    Update {
        model: Model::from_parts(names, val, rel, depths, Mode::Equivalence),
        point: positive,
    }
}

/// Eager update: keep the states where the announcement holds and lower
/// every depth by the announcement's depth.
pub fn edpal(m: &Model, truth: &[bool], depth: usize) -> Update {
    let (restricted, point) = m.restrict(truth);
    let depths = restricted
        .depths()
        .iter()
        .map(|row| row.iter().map(|d| d - depth as i64).collect())
        .collect();
    let model = Model::from_parts(
        restricted.names().to_vec(),
        restricted
            .states()
            .map(|s| restricted.valuation(s).clone())
            .collect(),
        restricted.relations().to_vec(),
        depths,
        restricted.mode(),
    );
    Update { model, point }
}

/// Asymmetric update: at states where an agent is deep enough, its links to
/// states that disagree on the announcement are cut. The result is only
/// reflexive in general.
pub fn adpal(m: &Model, truth: &[bool], depth: usize) -> Update {
    let announced = depth as i64;
    let mut rel = Vec::with_capacity(m.agents());
    let mut depths = Vec::with_capacity(m.agents());
    for a in 0..m.agents() {
        let agent = AgentId(a);
        let succ = m
            .states()
            .map(|s| {
                let deep = m.depth(agent, s) >= announced;
                m.successors(agent, s)
                    .filter(|&t| t != s && !(deep && truth[s] != truth[t]))
                    .collect()
            })
            .collect();
        rel.push(Relation::Pairs(succ));
        depths.push(
            m.states()
                .map(|s| perceived(m.depth(agent, s), announced))
                .collect(),
        );
    }
    let model = Model::from_parts(
        m.names().to_vec(),
        m.states().map(|s| m.valuation(s).clone()).collect(),
        rel,
        depths,
        Mode::Reflexive,
    );
    let point = truth
        .iter()
        .enumerate()
        .map(|(s, &t)| t.then_some(s))
        .collect();
    Update { model, point }
}
