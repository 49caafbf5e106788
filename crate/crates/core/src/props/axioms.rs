use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::Serialize;

use crate::semantics::SemanticsKind;
use crate::syntax::{f_transform, AgentId, Formula, Fragment};

use super::random::{random_formula, RandomSpec};

/// Axiom schemas of the depth-bounded logics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum AxiomSchema {
    /// An instance of a propositional tautology template.
    Tautology,
    /// `(K_a φ ∧ K_a(φ → ψ)) → K_a ψ`
    Deduction,
    /// `K_a φ → φ`
    Truth,
    /// `(K_a φ ∧ P_a^{d(φ)+1}) → K_a(P_a^{d(φ)} → K_a φ)`
    PositiveIntrospection,
    /// `(¬K_a φ ∧ P_a^{d(φ)+1}) → K_a ¬K_a φ`
    NegativeIntrospection,
    /// `P_a^d → P_a^{d-1}`
    DepthMonotonicity,
    /// `P_a^d ↔ ¬(E_a^0 ∨ ⋯ ∨ E_a^{d-1})`
    ExactDepths,
    /// `¬(E_a^{d1} ∧ E_a^{d2})` for `d1 ≠ d2`
    UniqueDepth,
    /// `K_a φ → P_a^{d(φ)}`
    DepthDeduction,
    /// `P_a^{d(θ)} → K_a θ` for an instance `θ` of another schema.
    Necessitation,
    /// `(K∞_a φ ∧ K∞_a(φ → ψ)) → K∞_a ψ`
    DeductionInf,
    /// `K∞_a φ → φ`
    TruthInf,
    /// `K∞_a φ → K∞_a K∞_a φ`
    PositiveIntrospectionInf,
    /// `¬K∞_a φ → K∞_a ¬K∞_a φ`
    NegativeIntrospectionInf,
    /// `K_a φ ↔ P_a^{d(φ)} ∧ K∞_a φ`
    BoundedKnowledge,
    /// `K∞_a θ` for an instance `θ` of another schema.
    NecessitationInf,
    /// `[φ]p ↔ (φ → p)`
    AtomicPermanence,
    /// `[φ]E_a^d ↔ (φ → E_a^{d(φ)+d})`, any integer `d`.
    DepthAdjustment,
    /// `[φ]E_a^d ↔ (φ → ((P_a^{d(φ)} ∧ E_a^{d+d(φ)}) ∨ (¬P_a^{d(φ)} ∧ E_a^d)))`, `d ≥ 0`.
    DepthAdjustmentDpal,
    /// `[φ]¬ψ ↔ (φ → ¬[φ]ψ)`
    NegationAnnouncement,
    /// `[φ](ψ ∧ χ) ↔ ([φ]ψ ∧ [φ]χ)`
    ConjunctionAnnouncement,
    /// `[φ](P_a^{d(ψ)} → K_a ψ) ↔ (φ → P_a^{d(φ)+d(ψ)} → K_a[φ]ψ)`
    KnowledgeAnnouncement,
    /// `[φ]K∞_a ψ ↔ (φ → K∞_a[φ]ψ)`
    KnowledgeAnnouncementInf,
    /// `[φ][ψ]χ ↔ [φ ∧ [φ]ψ]χ`
    Composition,
    /// `F_φ(K_a ψ) → ([φ]K_a ψ ↔ (φ → K_a ψ))`
    KnowledgePreservationGeneral,
    /// `K∞_a(φ → P_a^{d(φ)}) → ([φ]K_a ψ ↔ (φ → K_a[φ]ψ))`
    TraditionalAnnouncementsGeneral,
    /// `¬P_a^{d(φ)} → [φ]¬K_a ψ`
    Amnesia,
}

impl AxiomSchema {
    pub fn name(self) -> &'static str {
        match self {
            AxiomSchema::Tautology => "tautology",
            AxiomSchema::Deduction => "deduction",
            AxiomSchema::Truth => "truth",
            AxiomSchema::PositiveIntrospection => "positive-introspection",
            AxiomSchema::NegativeIntrospection => "negative-introspection",
            AxiomSchema::DepthMonotonicity => "depth-monotonicity",
            AxiomSchema::ExactDepths => "exact-depths",
            AxiomSchema::UniqueDepth => "unique-depth",
            AxiomSchema::DepthDeduction => "depth-deduction",
            AxiomSchema::Necessitation => "necessitation",
            AxiomSchema::DeductionInf => "deduction-inf",
            AxiomSchema::TruthInf => "truth-inf",
            AxiomSchema::PositiveIntrospectionInf => "positive-introspection-inf",
            AxiomSchema::NegativeIntrospectionInf => "negative-introspection-inf",
            AxiomSchema::BoundedKnowledge => "bounded-knowledge",
            AxiomSchema::NecessitationInf => "necessitation-inf",
            AxiomSchema::AtomicPermanence => "atomic-permanence",
            AxiomSchema::DepthAdjustment => "depth-adjustment",
            AxiomSchema::DepthAdjustmentDpal => "depth-adjustment-dpal",
            AxiomSchema::NegationAnnouncement => "negation-announcement",
            AxiomSchema::ConjunctionAnnouncement => "conjunction-announcement",
            AxiomSchema::KnowledgeAnnouncement => "knowledge-announcement",
            AxiomSchema::KnowledgeAnnouncementInf => "knowledge-announcement-inf",
            AxiomSchema::Composition => "composition",
            AxiomSchema::KnowledgePreservationGeneral => "kp-general",
            AxiomSchema::TraditionalAnnouncementsGeneral => "ta-general",
            AxiomSchema::Amnesia => "amnesia",
        }
    }

    /// How many formula and depth parameters an instance takes.
    fn arity(self) -> (usize, usize) {
        use AxiomSchema::*;
        match self {
            Tautology => (3, 1),
            Deduction
            | DeductionInf
            | KnowledgeAnnouncement
            | KnowledgeAnnouncementInf
            | NegationAnnouncement
            | KnowledgePreservationGeneral
            | TraditionalAnnouncementsGeneral
            | Amnesia => (2, 0),
            ConjunctionAnnouncement | Composition => (3, 0),
            Truth
            | PositiveIntrospection
            | NegativeIntrospection
            | DepthDeduction
            | TruthInf
            | PositiveIntrospectionInf
            | NegativeIntrospectionInf
            | BoundedKnowledge => (1, 0),
            DepthMonotonicity | ExactDepths => (0, 1),
            UniqueDepth => (0, 2),
            AtomicPermanence => (1, 0),
            DepthAdjustment | DepthAdjustmentDpal => (1, 1),
            Necessitation | NecessitationInf => (1, 0),
        }
    }
}

impl fmt::Display for AxiomSchema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Propositional tautology templates over `a`, `b`, `c`, selected by index.
fn tautology(index: i64, a: Formula, b: Formula, c: Formula) -> Formula {
    match index.rem_euclid(8) {
        0 => a.clone().implies(a),
        1 => a.clone().implies(b.implies(a)),
        2 => a
            .clone()
            .implies(b.clone().implies(c.clone()))
            .implies(a.clone().implies(b).implies(a.implies(c))),
        3 => a.clone().not().not().iff(a),
        4 => a
            .clone()
            .not()
            .implies(b.clone().not())
            .implies(b.implies(a)),
        5 => a.clone().and(b).implies(a),
        6 => a.clone().or(a.not()),
        _ => a
            .clone()
            .and(b.clone().or(c.clone()))
            .iff(a.clone().and(b).or(a.and(c))),
    }
}

/// A concrete instantiation of a schema.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Instance {
    pub schema: AxiomSchema,
    pub agent: AgentId,
    #[serde(serialize_with = "ser_formulas")]
    pub formulas: Vec<Formula>,
    pub depths: Vec<i64>,
}

fn ser_formulas<S: serde::Serializer>(fs: &[Formula], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(fs.iter().map(|f| f.to_string()))
}

impl Instance {
    pub fn new(
        schema: AxiomSchema,
        agent: impl Into<AgentId>,
        formulas: Vec<Formula>,
        depths: Vec<i64>,
    ) -> Self {
        Instance {
            schema,
            agent: agent.into(),
            formulas,
            depths,
        }
    }

    /// The instantiated formula.
    pub fn formula(&self) -> Formula {
        use AxiomSchema::*;
        let a = self.agent;
        let f = |i: usize| self.formulas[i].clone();
        let d = |i: usize| self.depths[i];
        let depth_of = |i: usize| self.formulas[i].modal_depth() as i64;
        match self.schema {
            Tautology => tautology(d(0), f(0), f(1), f(2)),
            Deduction => Formula::know(a, f(0))
                .and(Formula::know(a, f(0).implies(f(1))))
                .implies(Formula::know(a, f(1))),
            Truth => Formula::know(a, f(0)).implies(f(0)),
            PositiveIntrospection => Formula::know(a, f(0))
                .and(Formula::at_least(a, depth_of(0) + 1))
                .implies(Formula::know(
                    a,
                    Formula::at_least(a, depth_of(0)).implies(Formula::know(a, f(0))),
                )),
            NegativeIntrospection => Formula::know(a, f(0))
                .not()
                .and(Formula::at_least(a, depth_of(0) + 1))
                .implies(Formula::know(a, Formula::know(a, f(0)).not())),
            DepthMonotonicity => Formula::at_least(a, d(0)).implies(Formula::at_least(a, d(0) - 1)),
            ExactDepths => Formula::at_least(a, d(0))
                .iff(Formula::disj((0..d(0)).map(|x| Formula::exact(a, x))).not()),
            UniqueDepth => Formula::exact(a, d(0)).and(Formula::exact(a, d(1))).not(),
            DepthDeduction => Formula::know(a, f(0)).implies(Formula::at_least(a, depth_of(0))),
            Necessitation => Formula::at_least(a, depth_of(0)).implies(Formula::know(a, f(0))),
            DeductionInf => Formula::know_inf(a, f(0))
                .and(Formula::know_inf(a, f(0).implies(f(1))))
                .implies(Formula::know_inf(a, f(1))),
            TruthInf => Formula::know_inf(a, f(0)).implies(f(0)),
            PositiveIntrospectionInf => {
                Formula::know_inf(a, f(0)).implies(Formula::know_inf(a, Formula::know_inf(a, f(0))))
            }
            NegativeIntrospectionInf => Formula::know_inf(a, f(0))
                .not()
                .implies(Formula::know_inf(a, Formula::know_inf(a, f(0)).not())),
            BoundedKnowledge => Formula::know(a, f(0))
                .iff(Formula::at_least(a, depth_of(0)).and(Formula::know_inf(a, f(0)))),
            NecessitationInf => Formula::know_inf(a, f(0)),
            AtomicPermanence => {
                let p = Formula::atom(format!("p{}", d_or(&self.depths, 0, 0).rem_euclid(2)));
                Formula::announce(f(0), p.clone()).iff(f(0).implies(p))
            }
            DepthAdjustment => Formula::announce(f(0), Formula::exact(a, d(0)))
                .iff(f(0).implies(Formula::exact(a, depth_of(0) + d(0)))),
            DepthAdjustmentDpal => {
                let dp = depth_of(0);
                let perceived = Formula::at_least(a, dp).and(Formula::exact(a, d(0) + dp));
                let unperceived = Formula::at_least(a, dp).not().and(Formula::exact(a, d(0)));
                Formula::announce(f(0), Formula::exact(a, d(0)))
                    .iff(f(0).implies(perceived.or(unperceived)))
            }
            NegationAnnouncement => Formula::announce(f(0), f(1).not())
                .iff(f(0).implies(Formula::announce(f(0), f(1)).not())),
            ConjunctionAnnouncement => Formula::announce(f(0), f(1).and(f(2)))
                .iff(Formula::announce(f(0), f(1)).and(Formula::announce(f(0), f(2)))),
            KnowledgeAnnouncement => Formula::announce(
                f(0),
                Formula::at_least(a, depth_of(1)).implies(Formula::know(a, f(1))),
            )
            .iff(
                f(0).implies(
                    Formula::at_least(a, depth_of(0) + depth_of(1))
                        .implies(Formula::know(a, Formula::announce(f(0), f(1)))),
                ),
            ),
            KnowledgeAnnouncementInf => Formula::announce(f(0), Formula::know_inf(a, f(1)))
                .iff(f(0).implies(Formula::know_inf(a, Formula::announce(f(0), f(1))))),
            Composition => Formula::announce(f(0), Formula::announce(f(1), f(2))).iff(
                Formula::announce(f(0).and(Formula::announce(f(0), f(1))), f(2)),
            ),
            KnowledgePreservationGeneral => {
                let k = Formula::know(a, f(1));
                f_transform(&f(0), &k)
                    .implies(Formula::announce(f(0), k.clone()).iff(f(0).implies(k)))
            }
            TraditionalAnnouncementsGeneral => {
                Formula::know_inf(a, f(0).implies(Formula::at_least(a, depth_of(0)))).implies(
                    Formula::announce(f(0), Formula::know(a, f(1)))
                        .iff(f(0).implies(Formula::know(a, Formula::announce(f(0), f(1))))),
                )
            }
            Amnesia => Formula::at_least(a, depth_of(0))
                .not()
                .implies(Formula::announce(f(0), Formula::know(a, f(1)).not())),
        }
    }
}

fn d_or(depths: &[i64], i: usize, default: i64) -> i64 {
    depths.get(i).copied().unwrap_or(default)
}

/// The axiom sets checked by [`soundness_suite`](super::soundness_suite).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum AxiomTable {
    /// Depth-bounded epistemic logic over the fragment without `K∞` and
    /// announcements.
    Dbel,
    /// The `K∞` presentation of the same logic.
    DbelInf,
    /// The eager announcement logic: everything in [`AxiomTable::Dbel`] and
    /// [`AxiomTable::DbelInf`] plus the reduction axioms, including
    /// announcement composition.
    Edpal,
    /// The sound set for the world-duplicating semantics: [`AxiomTable::Dbel`]
    /// plus atomic permanence, the adjusted depth axiom, negation and
    /// conjunction announcement, and the general knowledge-preservation and
    /// traditional-announcement schemas.
    DpalSound,
}

impl AxiomTable {
    pub const ALL: [AxiomTable; 4] = [
        AxiomTable::Dbel,
        AxiomTable::DbelInf,
        AxiomTable::Edpal,
        AxiomTable::DpalSound,
    ];

    pub fn schemas(self) -> Vec<AxiomSchema> {
        use AxiomSchema::*;
        let dbel = [
            Tautology,
            Deduction,
            Truth,
            PositiveIntrospection,
            NegativeIntrospection,
            DepthMonotonicity,
            ExactDepths,
            UniqueDepth,
            DepthDeduction,
            Necessitation,
        ];
        let inf = [
            DeductionInf,
            TruthInf,
            PositiveIntrospectionInf,
            NegativeIntrospectionInf,
            BoundedKnowledge,
            NecessitationInf,
        ];
        match self {
            AxiomTable::Dbel => dbel.to_vec(),
            AxiomTable::DbelInf => {
                let mut v = vec![Tautology, DepthMonotonicity, ExactDepths, UniqueDepth];
                v.extend(inf);
                v
            }
            AxiomTable::Edpal => {
                let mut v = dbel.to_vec();
                v.extend(inf);
                v.extend([
                    AtomicPermanence,
                    DepthAdjustment,
                    NegationAnnouncement,
                    ConjunctionAnnouncement,
                    KnowledgeAnnouncement,
                    KnowledgeAnnouncementInf,
                    Composition,
                ]);
                v
            }
            AxiomTable::DpalSound => {
                let mut v = dbel.to_vec();
                v.extend([
                    AtomicPermanence,
                    DepthAdjustmentDpal,
                    NegationAnnouncement,
                    ConjunctionAnnouncement,
                    KnowledgePreservationGeneral,
                    TraditionalAnnouncementsGeneral,
                ]);
                v
            }
        }
    }

    /// Fragment the schema parameters are drawn from.
    pub fn fragment(self) -> Fragment {
        match self {
            AxiomTable::Dbel => Fragment::H,
            AxiomTable::DbelInf => Fragment::HInf,
            AxiomTable::Edpal => Fragment::LInf,
            AxiomTable::DpalSound => Fragment::L,
        }
    }

    /// The semantics the table is stated for.
    pub fn semantics(self) -> SemanticsKind {
        match self {
            AxiomTable::Dbel | AxiomTable::DbelInf => SemanticsKind::Dbel,
            AxiomTable::Edpal => SemanticsKind::Edpal,
            AxiomTable::DpalSound => SemanticsKind::Dpal,
        }
    }
}

impl fmt::Display for AxiomTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AxiomTable::Dbel => "dbel",
            AxiomTable::DbelInf => "dbel-inf",
            AxiomTable::Edpal => "edpal",
            AxiomTable::DpalSound => "dpal-sound",
        })
    }
}

impl FromStr for AxiomTable {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "dbel" => Ok(AxiomTable::Dbel),
            "dbel-inf" => Ok(AxiomTable::DbelInf),
            "edpal" => Ok(AxiomTable::Edpal),
            "dpal-sound" | "dpal" => Ok(AxiomTable::DpalSound),
            _ => Err(format!(
                "unknown axiom table `{s}` (expected dbel, dbel-inf, edpal or dpal-sound)"
            )),
        }
    }
}

/// Draws a random instance of `schema` with parameters from `fragment`.
///
/// Necessitation instances wrap an instance of a randomly chosen schema from
/// `pool`.
pub fn random_instance(
    rng: &mut impl Rng,
    schema: AxiomSchema,
    spec: &RandomSpec,
    fragment: Fragment,
    pool: &[AxiomSchema],
) -> Instance {
    let agent = AgentId(rng.gen_range(0..spec.agents.max(1)));
    let (formulas, depths) = schema.arity();
    if matches!(
        schema,
        AxiomSchema::Necessitation | AxiomSchema::NecessitationInf
    ) {
        let inner_pool: Vec<AxiomSchema> = pool
            .iter()
            .copied()
            .filter(|s| {
                !matches!(
                    s,
                    AxiomSchema::Necessitation | AxiomSchema::NecessitationInf
                )
            })
            .collect();
        let inner = inner_pool[rng.gen_range(0..inner_pool.len())];
        let theta = random_instance(rng, inner, spec, fragment, pool).formula();
        return Instance::new(schema, agent, vec![theta], vec![]);
    }
    let formulas = (0..formulas)
        .map(|_| random_formula(rng, spec, fragment))
        .collect();
    let max = spec.max_depth;
    let depths = match schema {
        AxiomSchema::DepthMonotonicity => vec![rng.gen_range(1..=max + 1)],
        AxiomSchema::ExactDepths => vec![rng.gen_range(0..=max + 1)],
        AxiomSchema::UniqueDepth => {
            let d1 = rng.gen_range(0..=max);
            let mut d2 = rng.gen_range(0..=max);
            if d2 == d1 {
                d2 = d1 + 1;
            }
            vec![d1, d2]
        }
        AxiomSchema::DepthAdjustment => vec![rng.gen_range(-max..=max)],
        AxiomSchema::Tautology => vec![rng.gen_range(0..8)],
        _ => (0..depths).map(|_| rng.gen_range(0..=max)).collect(),
    };
    Instance::new(schema, agent, formulas, depths)
}

/// A random instance of `schema`, determined by `spec.seed`.
pub fn instantiate_axiom(schema: AxiomSchema, spec: &RandomSpec) -> Formula {
    let fragment = if matches!(
        schema,
        AxiomSchema::DeductionInf
            | AxiomSchema::TruthInf
            | AxiomSchema::PositiveIntrospectionInf
            | AxiomSchema::NegativeIntrospectionInf
            | AxiomSchema::BoundedKnowledge
            | AxiomSchema::NecessitationInf
            | AxiomSchema::KnowledgeAnnouncementInf
    ) {
        Fragment::LInf
    } else {
        Fragment::L
    };
    let pool = AxiomTable::Edpal.schemas();
    random_instance(&mut spec.rng(), schema, spec, fragment, &pool).formula()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    #[test]
    fn truth_instance() {
        let i = Instance::new(AxiomSchema::Truth, 0, vec![parse("p").unwrap()], vec![]);
        assert_eq!(i.formula(), parse("K[0] p -> p").unwrap());
    }

    #[test]
    fn unique_depth_instance() {
        let i = Instance::new(AxiomSchema::UniqueDepth, 0, vec![], vec![1, 2]);
        assert_eq!(i.formula(), parse("!(E[0,1] & E[0,2])").unwrap());
    }

    #[test]
    fn depth_adjustment_instance() {
        let i = Instance::new(
            AxiomSchema::DepthAdjustment,
            0,
            vec![parse("K[0] p").unwrap()],
            vec![-1],
        );
        let expected = Formula::announce(parse("K[0] p").unwrap(), Formula::exact(0, -1))
            .iff(parse("K[0] p -> E[0,0]").unwrap());
        assert_eq!(i.formula(), expected);
    }

    #[test]
    fn exact_depths_zero_is_trivial() {
        let i = Instance::new(AxiomSchema::ExactDepths, 1, vec![], vec![0]);
        assert_eq!(i.formula(), parse("P[1,0] <-> !false").unwrap());
    }

    #[test]
    fn table_fragments() {
        let spec = RandomSpec::default();
        let mut rng = spec.rng();
        for table in AxiomTable::ALL {
            let pool = table.schemas();
            for schema in &pool {
                for _ in 0..20 {
                    let f = random_instance(&mut rng, *schema, &spec, table.fragment(), &pool)
                        .formula();
                    if table == AxiomTable::Dbel {
                        assert!(f.in_fragment(Fragment::H), "{schema}: {f}");
                    }
                    if table == AxiomTable::DbelInf {
                        assert!(f.in_fragment(Fragment::HInf), "{schema}: {f}");
                    }
                }
            }
        }
    }

    #[test]
    fn instantiation_is_deterministic() {
        let spec = RandomSpec::default().with_seed(5);
        for schema in AxiomTable::Edpal.schemas() {
            assert_eq!(
                instantiate_axiom(schema, &spec),
                instantiate_axiom(schema, &spec)
            );
        }
    }
}
