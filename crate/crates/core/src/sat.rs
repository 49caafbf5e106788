//! Depth-aware types over a subformula closure, and a bounded brute-force
//! satisfiability search.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::model::{Mode, Model, PointedModel, Relation};
use crate::semantics::{check_all, CheckError, SemanticsKind};
use crate::syntax::{AgentId, Formula};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SatError {
    #[error("closure input must not contain `{0}`; translate it first")]
    Fragment(Formula),
    #[error("at most {MAX_STATES} states can be enumerated, asked for {0}")]
    TooManyStates(usize),
    #[error("search space of about {0} models exceeds the limit of {SEARCH_LIMIT}")]
    SearchTooLarge(u128),
    #[error(transparent)]
    Check(#[from] CheckError),
}

/// Subformulas of the input closed under single negation, in formula order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Closure {
    formulas: BTreeSet<Formula>,
}

impl Closure {
    pub fn formulas(&self) -> &BTreeSet<Formula> {
        &self.formulas
    }

    pub fn contains(&self, f: &Formula) -> bool {
        self.formulas.contains(f)
    }

    pub fn len(&self) -> usize {
        self.formulas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.formulas.is_empty()
    }

    /// Members that are not negations. A type is fixed by which of these it
    /// contains.
    pub fn positives(&self) -> impl Iterator<Item = &Formula> {
        self.formulas
            .iter()
            .filter(|f| !matches!(f, Formula::Not(_)))
    }

    /// Members whose membership in a type is not forced by rules 1 and 2:
    /// atoms, depth atoms and `K∞` formulas.
    pub fn free(&self) -> Vec<&Formula> {
        self.positives()
            .filter(|f| !matches!(f, Formula::And(..)))
            .collect()
    }

    pub fn agents(&self) -> BTreeSet<AgentId> {
        self.formulas.iter().flat_map(Formula::agents).collect()
    }
}

/// `cl(Γ)`. Inputs may use atoms, depth atoms, `¬`, `∧` and `K∞`.
pub fn closure<'a>(gamma: impl IntoIterator<Item = &'a Formula>) -> Result<Closure, SatError> {
    let mut formulas = BTreeSet::new();
    for g in gamma {
        for sub in g.subformulas() {
            match sub {
                Formula::Know(..) | Formula::Announce(..) => {
                    return Err(SatError::Fragment(sub.clone()))
                }
                Formula::Not(_) => {}
                _ => {
                    formulas.insert(sub.clone().not());
                }
            }
            formulas.insert(sub.clone());
        }
    }
    Ok(Closure { formulas })
}

/// The first rule a candidate type breaks, with the formulas involved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeViolation {
    pub rule: u8,
    pub witness: Vec<Formula>,
}

impl fmt::Display for TypeViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rule {} violated by", self.rule)?;
        for (i, w) in self.witness.iter().enumerate() {
            write!(f, "{} {w}", if i == 0 { "" } else { "," })?;
        }
        Ok(())
    }
}

/// Depth literals of one agent that a set of formulas contains.
#[derive(Debug, Default, Clone)]
struct DepthLiterals {
    exact: BTreeSet<i64>,
    not_exact: BTreeSet<i64>,
    at_least: BTreeSet<i64>,
    below: BTreeSet<i64>,
}

fn depth_literals(gamma: &BTreeSet<Formula>) -> BTreeMap<AgentId, DepthLiterals> {
    let mut out: BTreeMap<AgentId, DepthLiterals> = BTreeMap::new();
    for f in gamma {
        match f {
            Formula::DepthExact(a, d) => {
                out.entry(*a).or_default().exact.insert(*d);
            }
            Formula::DepthAtLeast(a, d) => {
                out.entry(*a).or_default().at_least.insert(*d);
            }
            Formula::Not(inner) => match &**inner {
                Formula::DepthExact(a, d) => {
                    out.entry(*a).or_default().not_exact.insert(*d);
                }
                Formula::DepthAtLeast(a, d) => {
                    out.entry(*a).or_default().below.insert(*d);
                }
                _ => {}
            },
            _ => {}
        }
    }
    out
}

fn violation(rule: u8, witness: Vec<Formula>) -> Result<(), TypeViolation> {
    Err(TypeViolation { rule, witness })
}

/// Checks the seven type rules and reports the lowest-numbered one broken.
///
/// Rules 5 and 6 are applied in the form the consistency argument needs:
/// `E_a^d` excludes `¬P_a^{d'}` for `d' ≤ d`, and `¬P_a^d` requires a depth
/// `d'` between every lower bound and `d` whose `¬E_a^{d'}` is absent.
/// `E_a^d` with negative `d` and `¬P_a^d` with `d ≤ 0` are unsatisfiable and
/// reported under rule 7.
pub fn is_type(gamma: &BTreeSet<Formula>, cl: &Closure) -> Result<(), TypeViolation> {
    if let Some(extra) = gamma.iter().find(|f| !cl.contains(f)) {
        return violation(1, vec![extra.clone()]);
    }
    for psi in cl.positives() {
        let neg = psi.clone().not();
        if gamma.contains(psi) == gamma.contains(&neg) {
            return violation(1, vec![psi.clone(), neg]);
        }
    }
    for f in cl.formulas() {
        if let Formula::And(l, r) = f {
            if gamma.contains(f) != (gamma.contains(l) && gamma.contains(r)) {
                return violation(2, vec![f.clone()]);
            }
        }
    }
    for f in gamma {
        if let Formula::KnowInf(_, body) = f {
            if !gamma.contains(body) {
                return violation(3, vec![f.clone()]);
            }
        }
    }
    let lits = depth_literals(gamma);
    for (&a, l) in &lits {
        for &d in &l.at_least {
            if let Some(&x) = l.below.range(..d).next() {
                return violation(
                    4,
                    vec![Formula::at_least(a, d), Formula::at_least(a, x).not()],
                );
            }
            if let Some(&x) = l.exact.range(..d).next() {
                return violation(4, vec![Formula::at_least(a, d), Formula::exact(a, x)]);
            }
        }
    }
    for (&a, l) in &lits {
        for &d in &l.exact {
            if let Some(&x) = l.exact.iter().find(|&&x| x != d) {
                return violation(5, vec![Formula::exact(a, d), Formula::exact(a, x)]);
            }
            if let Some(&x) = l.below.range(..=d).next() {
                return violation(5, vec![Formula::exact(a, d), Formula::at_least(a, x).not()]);
            }
        }
    }
    for (&a, l) in &lits {
        if !l.exact.is_empty() {
            continue;
        }
        // `¬P_a^d` with `d ≤ 0` is left to rule 7.
        if let Some(&hi) = l.below.iter().next().filter(|&&hi| hi > 0) {
            let lo = l.at_least.iter().next_back().copied().unwrap_or(0).max(0);
            if !(lo..hi).any(|d| !l.not_exact.contains(&d)) {
                return violation(6, vec![Formula::at_least(a, hi).not()]);
            }
        }
    }
    for (&a, l) in &lits {
        if let Some(&d) = l.below.iter().next().filter(|&&d| d <= 0) {
            return violation(7, vec![Formula::at_least(a, d).not()]);
        }
        if let Some(&d) = l.exact.iter().next().filter(|&&d| d < 0) {
            return violation(7, vec![Formula::exact(a, d)]);
        }
    }
    Ok(())
}

/// A type together with the depth resolved for each agent it mentions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DepthType {
    pub gamma: BTreeSet<Formula>,
    pub depths: BTreeMap<AgentId, Option<i64>>,
}

impl DepthType {
    /// Validates `gamma` and resolves depths for every agent of `cl`.
    pub fn new(gamma: BTreeSet<Formula>, cl: &Closure) -> Result<Self, TypeViolation> {
        is_type(&gamma, cl)?;
        let assigned = assign_depths(&gamma);
        let depths = cl
            .agents()
            .into_iter()
            .map(|a| (a, Some(assigned.get(&a).copied().unwrap_or(0))))
            .collect();
        Ok(DepthType { gamma, depths })
    }
}

/// A depth for every agent with depth literals in `gamma`, satisfying all of
/// them when `gamma` is a type.
///
/// * `E_a^d` present: `d`.
/// * some `P_a^{d'}` present: the least `d ≥ max d'` without `¬E_a^d`.
/// * otherwise some `¬P_a^{d'}`: the greatest `d < min d'` without `¬E_a^d`.
/// * only `¬E_a` literals: the least `d ≥ 0` without `¬E_a^d`.
pub fn assign_depths(gamma: &BTreeSet<Formula>) -> BTreeMap<AgentId, i64> {
    depth_literals(gamma)
        .into_iter()
        .map(|(a, l)| {
            let free = |d: &i64| !l.not_exact.contains(d);
            let d = if let Some(&e) = l.exact.iter().next() {
                e
            } else if let Some(&p) = l.at_least.iter().next_back() {
                (p.max(0)..).find(free).expect("finitely many exclusions")
            } else if let Some(&hi) = l.below.iter().next() {
                (0..hi).rev().find(free).unwrap_or(0)
            } else {
                (0..).find(free).expect("finitely many exclusions")
            };
            (a, d)
        })
        .collect()
}

/// Whether `depths` makes exactly the depth atoms of `cl` that lie in
/// `gamma` true. Agents missing from `depths` count as depth 0.
pub fn satisfies_depth_literals(
    gamma: &BTreeSet<Formula>,
    cl: &Closure,
    depths: &BTreeMap<AgentId, i64>,
) -> bool {
    cl.formulas().iter().all(|f| {
        let holds = match f {
            Formula::DepthExact(a, d) => depths.get(a).copied().unwrap_or(0) == *d,
            Formula::DepthAtLeast(a, d) => depths.get(a).copied().unwrap_or(0) >= *d,
            _ => return true,
        };
        holds == gamma.contains(f)
    })
}

/// The members of `cl` true at `s`.
pub fn type_at(m: &Model, s: usize, cl: &Closure) -> Result<BTreeSet<Formula>, CheckError> {
    let mut out = BTreeSet::new();
    for f in cl.formulas() {
        if check_all(m, f, SemanticsKind::Dbel)?[s] {
            out.insert(f.clone());
        }
    }
    Ok(out)
}

/// Largest model size [`sat_bruteforce`] enumerates.
pub const MAX_STATES: usize = 5;
/// Largest number of candidate models [`sat_bruteforce`] will try.
pub const SEARCH_LIMIT: u128 = 200_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bounds {
    pub max_states: usize,
    pub max_depth: i64,
}

impl Bounds {
    /// Three states and depths up to one more than the formula's modal depth.
    pub fn for_formula(f: &Formula) -> Self {
        Bounds {
            max_states: 3,
            max_depth: f.modal_depth() as i64 + 1,
        }
    }
}

/// Set partitions of `0..n` as restricted growth strings.
pub fn partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, n: usize, max: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        let limit = if prefix.is_empty() { 0 } else { max + 1 };
        for c in 0..=limit {
            prefix.push(c);
            go(prefix, n, max.max(c), out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::with_capacity(n), n, 0, &mut out);
    out
}

/// Decodes `index` into `len` digits of base `base`, least significant first.
fn digits(mut index: u64, base: u64, len: usize) -> Vec<u64> {
    (0..len)
        .map(|_| {
            let d = index % base;
            index /= base;
            d
        })
        .collect()
}

/// Searches models up to `bounds` for a state satisfying `f` under `kind`.
///
/// Models are enumerated by size, then by one partition per agent, then
/// valuations over the atoms of `f`, then depths in `0..=max_depth`.
/// `Ok(None)` only means nothing was found within the bounds.
pub fn sat_bruteforce(
    f: &Formula,
    kind: SemanticsKind,
    bounds: Bounds,
) -> Result<Option<PointedModel>, SatError> {
    if bounds.max_states > MAX_STATES {
        return Err(SatError::TooManyStates(bounds.max_states));
    }
    if kind == SemanticsKind::Dbel && f.contains_announcement() {
        return Err(CheckError::AnnouncementInDbel.into());
    }
    let agents = f.agents().iter().next_back().map_or(0, |a| a.0 + 1);
    let atoms: Vec<String> = f.atoms().into_iter().collect();
    let max_depth = bounds.max_depth.max(0);

    let mut total: u128 = 0;
    for n in 1..=bounds.max_states {
        let parts = partitions(n).len() as u128;
        total += parts.pow(agents as u32)
            * 2u128.pow((atoms.len() * n) as u32)
            * (max_depth as u128 + 1).pow((agents * n) as u32);
    }
    if total > SEARCH_LIMIT {
        return Err(SatError::SearchTooLarge(total));
    }

    for n in 1..=bounds.max_states {
        let parts = partitions(n);
        let names: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
        let rel_choices = (parts.len() as u64).pow(agents as u32);
        let val_choices = 1u64 << (atoms.len() * n);
        let depth_choices = (max_depth as u64 + 1).pow((agents * n) as u32);
        let found = (0..rel_choices)
            .into_par_iter()
            .map(|ri| -> Result<Option<PointedModel>, SatError> {
                let rel: Vec<Relation> = digits(ri, parts.len() as u64, agents)
                    .into_iter()
                    .map(|p| Relation::partition(&parts[p as usize]))
                    .collect();
                for vi in 0..val_choices {
                    let val = (0..n)
                        .map(|s| {
                            atoms
                                .iter()
                                .enumerate()
                                .filter(|(j, _)| vi >> (s * atoms.len() + j) & 1 == 1)
                                .map(|(_, p)| p.clone())
                                .collect()
                        })
                        .collect::<Vec<BTreeSet<String>>>();
                    for di in 0..depth_choices {
                        let flat = digits(di, max_depth as u64 + 1, agents * n);
                        let depth = (0..agents)
                            .map(|a| (0..n).map(|s| flat[a * n + s] as i64).collect())
                            .collect();
                        let m = Model::new(
                            names.clone(),
                            val.clone(),
                            rel.clone(),
                            depth,
                            Mode::Equivalence,
                        )
                        .expect("enumerated models are well formed");
                        let truth = check_all(&m, f, kind)?;
                        if let Some(s) = truth.iter().position(|&b| b) {
                            return Ok(Some(PointedModel { model: m, state: s }));
                        }
                    }
                }
                Ok(None)
            })
            .find_map_first(|r| match r {
                Ok(None) => None,
                other => Some(other),
            });
        if let Some(result) = found {
            return result;
        }
    }
    Ok(None)
}
