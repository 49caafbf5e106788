//! Bottom-up labelling model checker.

use std::collections::HashMap;

use crate::model::{Model, Relation, StateId};
use crate::syntax::{AgentId, Formula};

use super::kind::{preflight, CheckError, SemanticsKind};
use super::update::update_with;

/// One model produced while checking, with the announcement that produced
/// it from its parent.
#[derive(Debug, Clone)]
pub struct Step {
    pub model: Model,
    pub parent: Option<(usize, Formula)>,
    pub point: Vec<Option<StateId>>,
}

/// Truth vectors of every subformula, on every model reached by an update.
///
/// Model `0` is the input model.
#[derive(Debug, Clone)]
pub struct Labeling {
    kind: SemanticsKind,
    steps: Vec<Step>,
    truth: HashMap<(usize, Formula), Vec<bool>>,
    root: Vec<bool>,
}

impl Labeling {
    pub fn kind(&self) -> SemanticsKind {
        self.kind
    }

    /// Truth of the checked formula at each state of the input model.
    pub fn root(&self) -> &[bool] {
        &self.root
    }

    /// Truth vector of `f` on model `step`, if it was evaluated there.
    pub fn truth(&self, step: usize, f: &Formula) -> Option<&[bool]> {
        self.truth.get(&(step, f.clone())).map(Vec::as_slice)
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    /// Number of `(subformula, model)` entries.
    pub fn len(&self) -> usize {
        self.truth.len()
    }

    pub fn is_empty(&self) -> bool {
        self.truth.is_empty()
    }
}

struct Builder<'f> {
    kind: SemanticsKind,
    steps: Vec<Step>,
    memo: HashMap<(usize, &'f Formula), Vec<bool>>,
    updates: HashMap<(usize, &'f Formula), usize>,
}

impl<'f> Builder<'f> {
    fn label(&mut self, step: usize, f: &'f Formula) -> Vec<bool> {
        if let Some(v) = self.memo.get(&(step, f)) {
            return v.clone();
        }
        let v = self.compute(step, f);
        self.memo.insert((step, f), v.clone());
        v
    }

    fn compute(&mut self, step: usize, f: &'f Formula) -> Vec<bool> {
        match f {
            Formula::Atom(p) => {
                let m = &self.steps[step].model;
                m.states().map(|s| m.holds(s, p)).collect()
            }
            Formula::DepthExact(a, d) => {
                let m = &self.steps[step].model;
                m.states().map(|s| m.depth(*a, s) == *d).collect()
            }
            Formula::DepthAtLeast(a, d) => {
                let m = &self.steps[step].model;
                m.states().map(|s| m.depth(*a, s) >= *d).collect()
            }
            Formula::Not(g) => self.label(step, g).into_iter().map(|b| !b).collect(),
            Formula::And(l, r) => {
                let lv = self.label(step, l);
                let rv = self.label(step, r);
                lv.into_iter().zip(rv).map(|(a, b)| a && b).collect()
            }
            Formula::KnowInf(a, g) => {
                let body = self.label(step, g);
                box_over(&self.steps[step].model, *a, &body)
            }
            Formula::Know(a, g) => {
                let body = self.label(step, g);
                let m = &self.steps[step].model;
                let need = g.modal_depth() as i64;
                box_over(m, *a, &body)
                    .into_iter()
                    .enumerate()
                    .map(|(s, b)| b && m.depth(*a, s) >= need)
                    .collect()
            }
            Formula::Announce(phi, psi) => {
                let pre = self.label(step, phi);
                if !pre.iter().any(|&b| b) {
                    return vec![true; pre.len()];
                }
                let next = match self.updates.get(&(step, &**phi)) {
                    Some(&i) => i,
                    None => {
                        let up = update_with(
                            self.kind,
                            &self.steps[step].model,
                            &pre,
                            phi.modal_depth(),
                        );
                        self.steps.push(Step {
                            model: up.model,
                            parent: Some((step, (**phi).clone())),
                            point: up.point,
                        });
                        let i = self.steps.len() - 1;
                        self.updates.insert((step, &**phi), i);
                        i
                    }
                };
                let post = self.label(next, psi);
                let point = &self.steps[next].point;
                pre.iter()
                    .enumerate()
                    .map(|(s, &b)| !b || post[point[s].expect("announcement held")])
                    .collect()
            }
        }
    }
}

/// `s` satisfies the box iff every successor of `s` satisfies the body.
fn box_over(m: &Model, a: AgentId, body: &[bool]) -> Vec<bool> {
    match m.relation(a) {
        Relation::Partition { class_of, members } => {
            let class_ok: Vec<bool> = members.iter().map(|c| c.iter().all(|&t| body[t])).collect();
            class_of.iter().map(|&c| class_ok[c]).collect()
        }
        rel @ Relation::Pairs(_) => m
            .states()
            .map(|s| rel.successors(s).all(|t| body[t]))
            .collect(),
    }
}

/// Labels every subformula of `f` bottom-up on `m` and on every model an
/// announcement in `f` produces.
pub fn check_labeling(m: &Model, f: &Formula, kind: SemanticsKind) -> Result<Labeling, CheckError> {
    preflight(m, f, kind)?;
    let mut b = Builder {
        kind,
        steps: vec![Step {
            model: m.clone(),
            parent: None,
            point: m.states().map(Some).collect(),
        }],
        memo: HashMap::new(),
        updates: HashMap::new(),
    };
    let root = b.label(0, f);
    let truth = b
        .memo
        .into_iter()
        .map(|((i, g), v)| ((i, g.clone()), v))
        .collect();
    Ok(Labeling {
        kind,
        steps: b.steps,
        truth,
        root,
    })
}

/// Truth of `f` at state `s` of `m`.
pub fn check(m: &Model, s: StateId, f: &Formula, kind: SemanticsKind) -> Result<bool, CheckError> {
    if s >= m.len() {
        return Err(CheckError::StateOutOfRange(s));
    }
    Ok(check_labeling(m, f, kind)?.root[s])
}

/// Truth of `f` at every state of `m`.
pub fn check_all(m: &Model, f: &Formula, kind: SemanticsKind) -> Result<Vec<bool>, CheckError> {
    Ok(check_labeling(m, f, kind)?.root)
}

/// The chain of models produced by the leading announcements of `f`,
/// evaluated from `s`: `[φ1][φ2]…ψ` gives `M`, `M|φ1`, `M|φ1|φ2`, … for as
/// long as each announcement holds at the current point. Each entry carries
/// the designated state in that model.
pub fn update_sequence(
    m: &Model,
    s: StateId,
    f: &Formula,
    kind: SemanticsKind,
) -> Result<Vec<(Model, StateId)>, CheckError> {
    preflight(m, f, kind)?;
    if s >= m.len() {
        return Err(CheckError::StateOutOfRange(s));
    }
    let mut out = vec![(m.clone(), s)];
    let mut cur = f;
    while let Some((phi, psi)) = leading_announcement(cur) {
        let (model, point) = out.last().expect("non-empty").clone();
        let pre = check_all(&model, phi, kind)?;
        if !pre[point] {
            break;
        }
        let up = update_with(kind, &model, &pre, phi.modal_depth());
        let next = up.point[point].expect("announcement held");
        out.push((up.model, next));
        cur = psi;
    }
    Ok(out)
}

/// Splits `[φ]ψ` and `⟨φ⟩ψ` into `(φ, ψ)`.
fn leading_announcement(f: &Formula) -> Option<(&Formula, &Formula)> {
    match f {
        Formula::Announce(phi, psi) => Some((phi, psi)),
        Formula::Not(inner) => match &**inner {
            Formula::Announce(phi, body) => match &**body {
                Formula::Not(psi) => Some((phi, psi)),
                _ => None,
            },
            _ => None,
        },
        _ => None,
    }
}
