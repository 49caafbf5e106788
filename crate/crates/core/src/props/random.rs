use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::model::{Mode, Model, Relation};
use crate::syntax::{AgentId, Formula, Fragment};

/// Parameters for random formulas and models. Everything drawn from the
/// same spec and seed is identical across runs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RandomSpec {
    /// Node budget for generated formulas.
    pub max_size: usize,
    pub agents: usize,
    /// Largest depth constant in formulas and largest depth in models.
    pub max_depth: i64,
    pub max_states: usize,
    /// Atoms used by formulas and valuations.
    pub atoms: Vec<String>,
    pub seed: u64,
    /// Force each agent's depth to be constant on its own classes.
    pub unambiguous: bool,
    /// Allow `E` and `P` atoms in formulas.
    pub depth_atoms: bool,
}

impl Default for RandomSpec {
    fn default() -> Self {
        RandomSpec {
            max_size: 8,
            agents: 2,
            max_depth: 3,
            max_states: 5,
            atoms: vec!["p".into(), "q".into()],
            seed: 0,
            unambiguous: false,
            depth_atoms: true,
        }
    }
}

impl RandomSpec {
    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        RandomSpec {
            seed,
            ..self.clone()
        }
    }
}

/// A random equivalence-mode model.
pub fn random_model(spec: &RandomSpec) -> Model {
    random_model_with(&mut spec.rng(), spec)
}

pub fn random_model_with(rng: &mut impl Rng, spec: &RandomSpec) -> Model {
    let n = rng.gen_range(1..=spec.max_states.max(1));
    let names = (0..n).map(|i| format!("s{i}")).collect();
    let val = (0..n)
        .map(|_| {
            spec.atoms
                .iter()
                .filter(|_| rng.gen_bool(0.5))
                .cloned()
                .collect::<BTreeSet<_>>()
        })
        .collect();
    let mut rel = Vec::with_capacity(spec.agents);
    let mut depth = Vec::with_capacity(spec.agents);
    for _ in 0..spec.agents {
        let classes = rng.gen_range(1..=n);
        let labels: Vec<usize> = (0..n).map(|_| rng.gen_range(0..classes)).collect();
        let r = Relation::partition(&labels);
        let d: Vec<i64> = if spec.unambiguous {
            let per_class: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=spec.max_depth)).collect();
            match &r {
                Relation::Partition { class_of, .. } => {
                    class_of.iter().map(|&c| per_class[c]).collect()
                }
                Relation::Pairs(_) => unreachable!("partition built above"),
            }
        } else {
            (0..n).map(|_| rng.gen_range(0..=spec.max_depth)).collect()
        };
        rel.push(r);
        depth.push(d);
    }
    Model::new(names, val, rel, depth, Mode::Equivalence).expect("random models are well formed")
}

/// A random formula of at most `spec.max_size` nodes within `fragment`.
pub fn random_formula(rng: &mut impl Rng, spec: &RandomSpec, fragment: Fragment) -> Formula {
    let size = rng.gen_range(1..=spec.max_size.max(1));
    gen(rng, spec, fragment, size)
}

fn agent_for(rng: &mut impl Rng, spec: &RandomSpec, fragment: Fragment) -> AgentId {
    match fragment {
        Fragment::La(a) => a,
        _ => AgentId(rng.gen_range(0..spec.agents.max(1))),
    }
}

fn leaf(rng: &mut impl Rng, spec: &RandomSpec, fragment: Fragment) -> Formula {
    // Atoms weigh 20 against 15 for depth atoms.
    let depth_allowed = spec.depth_atoms && !matches!(fragment, Fragment::La(_));
    if depth_allowed && rng.gen_range(0..35) >= 20 {
        let a = agent_for(rng, spec, fragment);
        let d = rng.gen_range(0..=spec.max_depth);
        if rng.gen_bool(0.5) {
            Formula::exact(a, d)
        } else {
            Formula::at_least(a, d)
        }
    } else {
        match spec.atoms.choose(rng) {
            Some(p) => Formula::atom(p.clone()),
            None => Formula::top(),
        }
    }
}

fn gen(rng: &mut impl Rng, spec: &RandomSpec, fragment: Fragment, size: usize) -> Formula {
    if size <= 1 {
        return leaf(rng, spec, fragment);
    }
    let inf = matches!(fragment, Fragment::LInf | Fragment::HInf | Fragment::La(_));
    let announce = matches!(fragment, Fragment::L | Fragment::LInf);
    // 40 connective, 25 modal, 35 leaf.
    let roll = rng.gen_range(0..100);
    if roll < 40 {
        // Node cost of the connective itself once desugared.
        let (op, cost) = *[(0u8, 1usize), (1, 4), (2, 3)]
            .choose(rng)
            .expect("non-empty");
        if size >= cost + 2 && rng.gen_bool(0.6) {
            let budget = size - cost;
            let left = rng.gen_range(1..budget);
            let l = gen(rng, spec, fragment, left);
            let r = gen(rng, spec, fragment, budget - left);
            match op {
                0 => l.and(r),
                1 => l.or(r),
                _ => l.implies(r),
            }
        } else {
            gen(rng, spec, fragment, size - 1).not()
        }
    } else if roll < 65 {
        let mut ops = vec![0u8];
        if inf {
            ops.push(1);
        }
        if announce && size >= 3 {
            ops.push(2);
        }
        match *ops.choose(rng).expect("non-empty") {
            0 => {
                let a = agent_for(rng, spec, fragment);
                Formula::know(a, gen(rng, spec, fragment, size - 1))
            }
            1 => {
                let a = agent_for(rng, spec, fragment);
                Formula::know_inf(a, gen(rng, spec, fragment, size - 1))
            }
            _ => {
                let left = rng.gen_range(1..size - 1);
                let l = gen(rng, spec, fragment, left);
                let r = gen(rng, spec, fragment, size - 1 - left);
                Formula::announce(l, r)
            }
        }
    } else {
        leaf(rng, spec, fragment)
    }
}
