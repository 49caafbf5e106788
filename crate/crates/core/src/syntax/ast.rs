use std::collections::BTreeSet;
use std::fmt;

/// Reserved atom that holds in every state of every model.
pub const TOP_ATOM: &str = "true";

/// An agent, identified by a small non-negative integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize)]
#[serde(transparent)]
pub struct AgentId(pub usize);

impl AgentId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<usize> for AgentId {
    fn from(id: usize) -> Self {
        AgentId(id)
    }
}

/// Formulas of the depth-bounded language.
///
/// Only the primitive connectives are stored. Disjunction, implication,
/// equivalence, the constants and the dual announcement are built by the
/// constructor helpers below and are therefore always desugared.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Atom(String),
    /// `E_a^d`: the agent has depth exactly `d`.
    DepthExact(AgentId, i64),
    /// `P_a^d`: the agent has depth at least `d`.
    DepthAtLeast(AgentId, i64),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    /// Depth-bounded knowledge `K_a`.
    Know(AgentId, Box<Formula>),
    /// Unbounded knowledge `K∞_a`.
    KnowInf(AgentId, Box<Formula>),
    /// `[announced] body`.
    Announce(Box<Formula>, Box<Formula>),
}

/// Syntactic fragments of the language.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Fragment {
    /// No `K∞`.
    L,
    /// Everything.
    LInf,
    /// No `K∞`, no announcements.
    H,
    /// No announcements.
    HInf,
    /// No depth atoms and no modal operator for any agent other than the given one.
    La(AgentId),
}

impl Formula {
    pub fn atom(name: impl Into<String>) -> Self {
        Formula::Atom(name.into())
    }

    pub fn top() -> Self {
        Formula::Atom(TOP_ATOM.to_string())
    }

    pub fn bottom() -> Self {
        Formula::top().not()
    }

    pub fn exact(agent: impl Into<AgentId>, d: i64) -> Self {
        Formula::DepthExact(agent.into(), d)
    }

    pub fn at_least(agent: impl Into<AgentId>, d: i64) -> Self {
        Formula::DepthAtLeast(agent.into(), d)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Self {
        Formula::Not(Box::new(self))
    }

    pub fn and(self, other: Formula) -> Self {
        Formula::And(Box::new(self), Box::new(other))
    }

    /// `a ∨ b := ¬(¬a ∧ ¬b)`
    pub fn or(self, other: Formula) -> Self {
        self.not().and(other.not()).not()
    }

    /// `a → b := ¬(a ∧ ¬b)`
    pub fn implies(self, other: Formula) -> Self {
        self.and(other.not()).not()
    }

    /// `a ↔ b := (a → b) ∧ (b → a)`
    pub fn iff(self, other: Formula) -> Self {
        self.clone().implies(other.clone()).and(other.implies(self))
    }

    pub fn know(agent: impl Into<AgentId>, body: Formula) -> Self {
        Formula::Know(agent.into(), Box::new(body))
    }

    pub fn know_inf(agent: impl Into<AgentId>, body: Formula) -> Self {
        Formula::KnowInf(agent.into(), Box::new(body))
    }

    pub fn announce(announced: Formula, body: Formula) -> Self {
        Formula::Announce(Box::new(announced), Box::new(body))
    }

    /// `⟨φ⟩ψ := ¬[φ]¬ψ`
    pub fn dual_announce(announced: Formula, body: Formula) -> Self {
        Formula::announce(announced, body.not()).not()
    }

    /// Left-nested conjunction; `⊤` when empty.
    pub fn conj(items: impl IntoIterator<Item = Formula>) -> Self {
        items
            .into_iter()
            .reduce(Formula::and)
            .unwrap_or_else(Formula::top)
    }

    /// Left-nested disjunction; `⊥` when empty.
    pub fn disj(items: impl IntoIterator<Item = Formula>) -> Self {
        items
            .into_iter()
            .reduce(Formula::or)
            .unwrap_or_else(Formula::bottom)
    }

    /// `K_a` applied `times` times to `body`.
    pub fn know_iter(agent: impl Into<AgentId>, times: usize, body: Formula) -> Self {
        let agent = agent.into();
        (0..times).fold(body, |acc, _| Formula::know(agent, acc))
    }

    pub fn is_top(&self) -> bool {
        matches!(self, Formula::Atom(name) if name == TOP_ATOM)
    }

    /// Modal depth: atoms are 0, negation preserves, conjunction takes the
    /// max, both knowledge operators add one and an announcement adds the
    /// depths of its two sides.
    pub fn modal_depth(&self) -> usize {
        match self {
            Formula::Atom(_) | Formula::DepthExact(..) | Formula::DepthAtLeast(..) => 0,
            Formula::Not(inner) => inner.modal_depth(),
            Formula::And(l, r) => l.modal_depth().max(r.modal_depth()),
            Formula::Know(_, inner) | Formula::KnowInf(_, inner) => 1 + inner.modal_depth(),
            Formula::Announce(announced, body) => announced.modal_depth() + body.modal_depth(),
        }
    }

    /// Number of nodes in the syntax tree.
    pub fn size(&self) -> usize {
        match self {
            Formula::Atom(_) | Formula::DepthExact(..) | Formula::DepthAtLeast(..) => 1,
            Formula::Not(inner) | Formula::Know(_, inner) | Formula::KnowInf(_, inner) => {
                1 + inner.size()
            }
            Formula::And(l, r) | Formula::Announce(l, r) => 1 + l.size() + r.size(),
        }
    }

    /// Immediate subformulas, left to right.
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Atom(_) | Formula::DepthExact(..) | Formula::DepthAtLeast(..) => vec![],
            Formula::Not(inner) | Formula::Know(_, inner) | Formula::KnowInf(_, inner) => {
                vec![inner]
            }
            Formula::And(l, r) | Formula::Announce(l, r) => vec![l, r],
        }
    }

    /// All subformulas including `self`, in pre-order.
    pub fn subformulas(&self) -> Vec<&Formula> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(f) = stack.pop() {
            out.push(f);
            for child in f.children().into_iter().rev() {
                stack.push(child);
            }
        }
        out
    }

    /// Propositional atoms occurring in the formula, excluding `⊤`.
    pub fn atoms(&self) -> BTreeSet<String> {
        self.subformulas()
            .into_iter()
            .filter_map(|f| match f {
                Formula::Atom(name) if name != TOP_ATOM => Some(name.clone()),
                _ => None,
            })
            .collect()
    }

    /// Agents mentioned by a depth atom or modal operator.
    pub fn agents(&self) -> BTreeSet<AgentId> {
        self.subformulas()
            .into_iter()
            .filter_map(|f| match f {
                Formula::DepthExact(a, _)
                | Formula::DepthAtLeast(a, _)
                | Formula::Know(a, _)
                | Formula::KnowInf(a, _) => Some(*a),
                _ => None,
            })
            .collect()
    }

    /// Largest depth constant in a depth atom, or 0.
    pub fn max_depth_constant(&self) -> i64 {
        self.subformulas()
            .into_iter()
            .filter_map(|f| match f {
                Formula::DepthExact(_, d) | Formula::DepthAtLeast(_, d) => Some(*d),
                _ => None,
            })
            .max()
            .unwrap_or(0)
            .max(0)
    }

    pub fn contains_announcement(&self) -> bool {
        self.subformulas()
            .iter()
            .any(|f| matches!(f, Formula::Announce(..)))
    }

    pub fn contains_know_inf(&self) -> bool {
        self.subformulas()
            .iter()
            .any(|f| matches!(f, Formula::KnowInf(..)))
    }

    pub fn in_fragment(&self, fragment: Fragment) -> bool {
        match fragment {
            Fragment::LInf => true,
            Fragment::L => !self.contains_know_inf(),
            Fragment::HInf => !self.contains_announcement(),
            Fragment::H => !self.contains_announcement() && !self.contains_know_inf(),
            Fragment::La(agent) => self.subformulas().iter().all(|f| match f {
                Formula::DepthExact(..) | Formula::DepthAtLeast(..) => false,
                Formula::Know(b, _) | Formula::KnowInf(b, _) => *b == agent,
                _ => true,
            }),
        }
    }
}
