use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::fixtures::single_state;
use crate::model::{is_unambiguous, Model, StateId};
use crate::semantics::{check_all, check_naive, CheckError, SemanticsKind};
use crate::syntax::{f_transform, AgentId, Formula, Fragment};

use super::axioms::{random_instance, AxiomSchema, AxiomTable, Instance};
use super::random::{random_formula, random_model_with, RandomSpec};

type Hit = Result<Option<(usize, usize, StateId)>, CheckError>;

/// Violations beyond this many are reported but not minimized.
const MINIMIZE_LIMIT: usize = 16;

#[derive(Debug, Error)]
pub enum SuiteError {
    #[error("table {table} is stated for {expected}, not {kind}")]
    TableMismatch {
        table: AxiomTable,
        expected: SemanticsKind,
        kind: SemanticsKind,
    },
    #[error("formula {0} is outside the single-agent fragment")]
    NotSingleAgent(Formula),
    #[error("model depths are not constant on the agents' classes")]
    AmbiguousDepths,
    #[error(transparent)]
    Check(#[from] CheckError),
}

/// How many instances and models a suite draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SuiteSize {
    pub instances: usize,
    pub models: usize,
}

impl Default for SuiteSize {
    fn default() -> Self {
        SuiteSize {
            instances: 300,
            models: 50,
        }
    }
}

/// A schema instance that fails at a state of a model.
#[derive(Debug, Clone, Serialize)]
pub struct Violation {
    pub instance: Instance,
    #[serde(serialize_with = "ser_display")]
    pub formula: Formula,
    #[serde(serialize_with = "ser_model")]
    pub model: Model,
    pub state: StateId,
    pub minimized: bool,
}

fn ser_display<S: serde::Serializer, T: std::fmt::Display>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

fn ser_model<S: serde::Serializer>(m: &Model, s: S) -> Result<S::Ok, S::Error> {
    use serde::Serialize;
    crate::model::model_to_value(m).serialize(s)
}

#[derive(Debug, Clone, Serialize)]
pub struct SoundnessReport {
    pub kind: SemanticsKind,
    pub schemas: Vec<AxiomSchema>,
    pub instances: usize,
    pub models: usize,
    /// Pointed checks performed: instances times states over all models.
    pub checks: usize,
    pub violations: Vec<Violation>,
    /// Violations the naive checker did not confirm. Always a checker bug.
    pub oracle_mismatches: usize,
}

impl SoundnessReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty() && self.oracle_mismatches == 0
    }

    pub fn violations_of(&self, schema: AxiomSchema) -> usize {
        self.violations
            .iter()
            .filter(|v| v.instance.schema == schema)
            .count()
    }
}

/// Checks random instances of every schema of `table` on random models.
pub fn soundness_suite(
    table: AxiomTable,
    kind: SemanticsKind,
    spec: &RandomSpec,
    size: SuiteSize,
) -> Result<SoundnessReport, SuiteError> {
    if table.semantics() != kind {
        return Err(SuiteError::TableMismatch {
            table,
            expected: table.semantics(),
            kind,
        });
    }
    schema_suite(&table.schemas(), table.fragment(), kind, spec, size)
}

/// Checks random instances of `schemas`, cycling through them, with
/// parameters drawn from `fragment`.
pub fn schema_suite(
    schemas: &[AxiomSchema],
    fragment: Fragment,
    kind: SemanticsKind,
    spec: &RandomSpec,
    size: SuiteSize,
) -> Result<SoundnessReport, SuiteError> {
    let mut rng = spec.rng();
    let instances: Vec<Instance> = (0..size.instances)
        .map(|i| {
            random_instance(
                &mut rng,
                schemas[i % schemas.len()],
                spec,
                fragment,
                schemas,
            )
        })
        .collect();
    let mut model_rng = spec.with_seed(spec.seed.wrapping_add(1)).rng();
    let models: Vec<Model> = (0..size.models)
        .map(|_| random_model_with(&mut model_rng, spec))
        .collect();
    let checks = instances.len() * models.iter().map(Model::len).sum::<usize>();

    let found: Vec<Hit> = (0..instances.len())
        .into_par_iter()
        .flat_map_iter(|i| (0..models.len()).map(move |j| (i, j)))
        .map(|(i, j)| {
            let truth = check_all(&models[j], &instances[i].formula(), kind)?;
            Ok(truth.iter().position(|b| !b).map(|s| (i, j, s)))
        })
        .collect();

    let mut violations = Vec::new();
    let mut oracle_mismatches = 0;
    for r in found {
        let Some((i, j, s)) = r? else { continue };
        let formula = instances[i].formula();
        if check_naive(&models[j], s, &formula, kind)? {
            oracle_mismatches += 1;
            log::error!("labeling and naive checkers disagree on {formula} at state {s}");
            continue;
        }
        let mut v = Violation {
            instance: instances[i].clone(),
            formula,
            model: models[j].clone(),
            state: s,
            minimized: false,
        };
        if violations.len() < MINIMIZE_LIMIT {
            minimize(&mut v, kind)?;
        }
        violations.push(v);
    }
    Ok(SoundnessReport {
        kind,
        schemas: schemas.to_vec(),
        instances: instances.len(),
        models: models.len(),
        checks,
        violations,
        oracle_mismatches,
    })
}

fn fails(
    m: &Model,
    s: StateId,
    instance: &Instance,
    kind: SemanticsKind,
) -> Result<bool, CheckError> {
    Ok(!check_all(m, &instance.formula(), kind)?[s])
}

/// Greedily drops states and shrinks formula parameters while the instance
/// still fails.
pub fn minimize(v: &mut Violation, kind: SemanticsKind) -> Result<(), CheckError> {
    loop {
        let mut progress = false;
        for drop in 0..v.model.len() {
            if drop == v.state || v.model.len() == 1 {
                continue;
            }
            let keep: Vec<bool> = v.model.states().map(|t| t != drop).collect();
            let (smaller, index) = v.model.restrict(&keep);
            let s = index[v.state].expect("point kept");
            if fails(&smaller, s, &v.instance, kind)? {
                v.model = smaller;
                v.state = s;
                progress = true;
                break;
            }
        }
        if progress {
            continue;
        }
        'outer: for k in 0..v.instance.formulas.len() {
            let current = v.instance.formulas[k].clone();
            let mut candidates: Vec<Formula> = current.children().into_iter().cloned().collect();
            if !current.is_top() {
                candidates.push(Formula::top());
            }
            for c in candidates {
                let mut trial = v.instance.clone();
                trial.formulas[k] = c;
                if fails(&v.model, v.state, &trial, kind)? {
                    v.instance = trial;
                    progress = true;
                    break 'outer;
                }
            }
        }
        if !progress {
            break;
        }
    }
    v.formula = v.instance.formula();
    v.minimized = true;
    Ok(())
}

/// The four knowledge-preservation and traditional-announcement variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum KpTaVariant {
    /// Shallow agents keep their knowledge of single-agent formulas, on
    /// unambiguous models.
    Kp,
    /// Deep agents learn the announcement, on unambiguous models.
    Ta,
    /// Knowledge preservation guarded by the `F_φ` transform.
    KpGeneral,
    /// Traditional announcements guarded by every successor perceiving.
    TaGeneral,
}

impl KpTaVariant {
    pub const ALL: [KpTaVariant; 4] = [
        KpTaVariant::Kp,
        KpTaVariant::Ta,
        KpTaVariant::KpGeneral,
        KpTaVariant::TaGeneral,
    ];

    pub fn needs_unambiguous(self) -> bool {
        matches!(self, KpTaVariant::Kp | KpTaVariant::Ta)
    }

    /// The guard under which the biconditional is claimed.
    pub fn precondition(self, agent: AgentId, phi: &Formula, psi: &Formula) -> Formula {
        let d = phi.modal_depth() as i64;
        match self {
            KpTaVariant::Kp => Formula::at_least(agent, d).not(),
            KpTaVariant::Ta => Formula::at_least(agent, d),
            KpTaVariant::KpGeneral => f_transform(phi, &Formula::know(agent, psi.clone())),
            KpTaVariant::TaGeneral => {
                Formula::know_inf(agent, phi.clone().implies(Formula::at_least(agent, d)))
            }
        }
    }

    /// Right-hand side of the biconditional, under `φ →`.
    pub fn rhs(self, agent: AgentId, phi: &Formula, psi: &Formula) -> Formula {
        match self {
            KpTaVariant::Kp | KpTaVariant::KpGeneral => Formula::know(agent, psi.clone()),
            KpTaVariant::Ta | KpTaVariant::TaGeneral => {
                Formula::know(agent, Formula::announce(phi.clone(), psi.clone()))
            }
        }
    }
}

impl std::fmt::Display for KpTaVariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            KpTaVariant::Kp => "kp",
            KpTaVariant::Ta => "ta",
            KpTaVariant::KpGeneral => "kp-general",
            KpTaVariant::TaGeneral => "ta-general",
        })
    }
}

impl std::str::FromStr for KpTaVariant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "kp" => Ok(KpTaVariant::Kp),
            "ta" => Ok(KpTaVariant::Ta),
            "kp-general" | "kpp" => Ok(KpTaVariant::KpGeneral),
            "ta-general" | "tap" => Ok(KpTaVariant::TaGeneral),
            _ => Err(format!("unknown variant `{s}`")),
        }
    }
}

/// One `(model, agent, φ, ψ)` case and the states where each direction of
/// the biconditional fails.
#[derive(Debug, Clone, Serialize)]
pub struct KpTaCase {
    #[serde(serialize_with = "ser_model")]
    pub model: Model,
    pub agent: AgentId,
    #[serde(serialize_with = "ser_display")]
    pub phi: Formula,
    #[serde(serialize_with = "ser_display")]
    pub psi: Formula,
    /// States where the guard and `φ` hold.
    pub applicable: Vec<StateId>,
    /// `[φ]K_a ψ` holds but the right-hand side does not.
    pub forward: Vec<StateId>,
    /// The right-hand side holds but `[φ]K_a ψ` does not.
    pub reverse: Vec<StateId>,
}

/// Evaluates one case, rejecting inputs outside the variant's hypotheses.
pub fn kp_ta_case(
    kind: SemanticsKind,
    variant: KpTaVariant,
    model: &Model,
    agent: AgentId,
    phi: &Formula,
    psi: &Formula,
) -> Result<KpTaCase, SuiteError> {
    if variant == KpTaVariant::Kp && !psi.in_fragment(Fragment::La(agent)) {
        return Err(SuiteError::NotSingleAgent(psi.clone()));
    }
    if variant.needs_unambiguous() && !is_unambiguous(model) {
        return Err(SuiteError::AmbiguousDepths);
    }
    let pre = check_all(model, &variant.precondition(agent, phi, psi), kind)?;
    let holds = check_all(model, phi, kind)?;
    let lhs = check_all(
        model,
        &Formula::announce(phi.clone(), Formula::know(agent, psi.clone())),
        kind,
    )?;
    let rhs = check_all(model, &variant.rhs(agent, phi, psi), kind)?;
    let applicable: Vec<StateId> = model.states().filter(|&s| pre[s] && holds[s]).collect();
    let forward = applicable
        .iter()
        .copied()
        .filter(|&s| lhs[s] && !rhs[s])
        .collect();
    let reverse = applicable
        .iter()
        .copied()
        .filter(|&s| rhs[s] && !lhs[s])
        .collect();
    Ok(KpTaCase {
        model: model.clone(),
        agent,
        phi: phi.clone(),
        psi: psi.clone(),
        applicable,
        forward,
        reverse,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct KpTaReport {
    pub kind: SemanticsKind,
    pub variant: KpTaVariant,
    pub cases: usize,
    /// Pointed cases where the guard and the announcement hold.
    pub applicable: usize,
    pub forward: Vec<KpTaCase>,
    pub reverse: Vec<KpTaCase>,
}

impl KpTaReport {
    pub fn forward_violations(&self) -> usize {
        self.forward.iter().map(|c| c.forward.len()).sum()
    }

    pub fn reverse_violations(&self) -> usize {
        self.reverse.iter().map(|c| c.reverse.len()).sum()
    }
}

fn draw_case(
    rng: &mut impl Rng,
    variant: KpTaVariant,
    spec: &RandomSpec,
) -> (Model, AgentId, Formula, Formula) {
    let model_spec = RandomSpec {
        unambiguous: spec.unambiguous || variant.needs_unambiguous(),
        ..spec.clone()
    };
    let model = random_model_with(rng, &model_spec);
    let agent = AgentId(rng.gen_range(0..spec.agents.max(1)));
    let phi = random_formula(rng, spec, Fragment::L);
    let psi = match variant {
        KpTaVariant::Kp => random_formula(rng, spec, Fragment::La(agent)),
        // The guard maps depth atoms to ⊤, but announcements move other
        // agents' depths; see `kp_general_misses_depth_atoms`.
        KpTaVariant::KpGeneral => {
            let plain = RandomSpec {
                depth_atoms: false,
                ..spec.clone()
            };
            random_formula(rng, &plain, Fragment::L)
        }
        _ => random_formula(rng, spec, Fragment::L),
    };
    (model, agent, phi, psi)
}

/// Checks `cases` random cases of the variant.
pub fn kp_ta_suite(
    kind: SemanticsKind,
    variant: KpTaVariant,
    spec: &RandomSpec,
    cases: usize,
) -> Result<KpTaReport, SuiteError> {
    let mut rng = spec.rng();
    let drawn: Vec<_> = (0..cases)
        .map(|_| draw_case(&mut rng, variant, spec))
        .collect();
    let results: Vec<KpTaCase> = drawn
        .par_iter()
        .map(|(m, a, phi, psi)| kp_ta_case(kind, variant, m, *a, phi, psi))
        .collect::<Result<_, _>>()?;
    let applicable = results.iter().map(|c| c.applicable.len()).sum();
    let forward = results
        .iter()
        .filter(|c| !c.forward.is_empty())
        .cloned()
        .collect();
    let reverse = results
        .iter()
        .filter(|c| !c.reverse.is_empty())
        .cloned()
        .collect();
    Ok(KpTaReport {
        kind,
        variant,
        cases,
        applicable,
        forward,
        reverse,
    })
}

/// Announcing `K_a ⊤` to an agent of depth 0: under the eager semantics the
/// agent loses even `K_a ⊤`, so the reverse direction of knowledge
/// preservation fails.
pub fn kp_top_case(kind: SemanticsKind) -> Result<KpTaCase, SuiteError> {
    let phi = Formula::know(0, Formula::top());
    kp_ta_case(
        kind,
        KpTaVariant::Kp,
        &single_state(&[0]),
        AgentId(0),
        &phi,
        &Formula::top(),
    )
}

/// `¬P_a^{d(φ)} → [φ]¬K_a ψ`.
pub fn amnesia_instance(agent: AgentId, phi: Formula, psi: Formula) -> Formula {
    Instance::new(AxiomSchema::Amnesia, agent, vec![phi, psi], vec![]).formula()
}

/// Checks the amnesia schema on `cases` random `(model, instance)` pairs,
/// returning the number of pointed failures.
pub fn amnesia_suite(
    kind: SemanticsKind,
    spec: &RandomSpec,
    cases: usize,
) -> Result<usize, SuiteError> {
    let mut rng = spec.rng();
    let drawn: Vec<(Model, Formula)> = (0..cases)
        .map(|_| {
            let m = random_model_with(&mut rng, spec);
            let a = AgentId(rng.gen_range(0..spec.agents.max(1)));
            let phi = random_formula(&mut rng, spec, Fragment::L);
            let psi = random_formula(&mut rng, spec, Fragment::L);
            (m, amnesia_instance(a, phi, psi))
        })
        .collect();
    let failures: Vec<usize> = drawn
        .par_iter()
        .map(|(m, f)| Ok(check_all(m, f, kind)?.iter().filter(|b| !**b).count()))
        .collect::<Result<_, CheckError>>()?;
    Ok(failures.into_iter().sum())
}

/// Announced formulas tried by [`find_composition_counterexample`]: one or
/// two knowledge operators over an atom or `⊤`.
fn composition_announcements(spec: &RandomSpec) -> Vec<Formula> {
    let agents: Vec<AgentId> = (0..spec.agents.max(1)).map(AgentId).collect();
    let mut bodies = vec![Formula::top()];
    for p in &spec.atoms {
        bodies.push(Formula::atom(p.clone()));
        bodies.push(Formula::atom(p.clone()).not());
    }
    let mut out = Vec::new();
    for &a in &agents {
        for b in &bodies {
            out.push(Formula::know(a, b.clone()));
        }
        for &b in &agents {
            out.push(Formula::know(a, Formula::know(b, Formula::top())));
        }
    }
    out
}

/// Bodies tried by [`find_composition_counterexample`].
fn composition_bodies(spec: &RandomSpec) -> Vec<Formula> {
    let mut out: Vec<Formula> = spec
        .atoms
        .iter()
        .map(|p| Formula::atom(p.clone()))
        .collect();
    for a in (0..spec.agents.max(1)).map(AgentId) {
        for d in 0..=spec.max_depth {
            out.push(Formula::exact(a, d));
            out.push(Formula::at_least(a, d));
        }
        for p in &spec.atoms {
            out.push(Formula::know(a, Formula::atom(p.clone())));
        }
    }
    out
}

/// Searches for a failing composition instance: small announcements and
/// bodies are enumerated against `models` random models of at most
/// `max_states` states. Returns the first failure in enumeration order,
/// minimized.
pub fn find_composition_counterexample(
    kind: SemanticsKind,
    spec: &RandomSpec,
    max_states: usize,
    models: usize,
) -> Result<Option<Violation>, SuiteError> {
    let search_spec = RandomSpec {
        max_states,
        ..spec.clone()
    };
    let mut rng = search_spec.rng();
    let drawn: Vec<Model> = (0..models)
        .map(|_| random_model_with(&mut rng, &search_spec))
        .collect();
    let announcements = composition_announcements(spec);
    let bodies = composition_bodies(spec);
    let mut instances = Vec::new();
    for phi in &announcements {
        for psi in &announcements {
            for chi in &bodies {
                let agent = AgentId(0);
                instances.push(Instance::new(
                    AxiomSchema::Composition,
                    agent,
                    vec![phi.clone(), psi.clone(), chi.clone()],
                    vec![],
                ));
            }
        }
    }
    let hit = drawn
        .par_iter()
        .enumerate()
        .flat_map_iter(|(j, _)| (0..instances.len()).map(move |i| (j, i)))
        .map(|(j, i)| -> Hit {
            let truth = check_all(&drawn[j], &instances[i].formula(), kind)?;
            Ok(truth.iter().position(|b| !b).map(|s| (j, i, s)))
        })
        .find_map_first(|r| match r {
            Ok(None) => None,
            other => Some(other),
        });
    let Some(hit) = hit else { return Ok(None) };
    let (j, i, s) = hit?.expect("only hits are kept");
    let mut v = Violation {
        instance: instances[i].clone(),
        formula: instances[i].formula(),
        model: drawn[j].clone(),
        state: s,
        minimized: false,
    };
    minimize(&mut v, kind)?;
    Ok(Some(v))
}
