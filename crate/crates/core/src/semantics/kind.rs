use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::model::{Mode, Model, StateId};
use crate::syntax::{AgentId, Formula};

/// The four semantics: static depth-bounded logic and the three ways of
/// updating a model after a public announcement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum SemanticsKind {
    /// No announcements.
    Dbel,
    /// World-duplicating update with union-find closure.
    Dpal,
    /// Eager update: restriction plus unconditional depth decrement.
    Edpal,
    /// Asymmetric update: per-state relation cuts.
    Adpal,
}

impl SemanticsKind {
    pub const ALL: [SemanticsKind; 4] = [
        SemanticsKind::Dbel,
        SemanticsKind::Dpal,
        SemanticsKind::Edpal,
        SemanticsKind::Adpal,
    ];

    /// The announcement semantics.
    pub const UPDATES: [SemanticsKind; 3] = [
        SemanticsKind::Dpal,
        SemanticsKind::Edpal,
        SemanticsKind::Adpal,
    ];

    pub fn accepts_mode(self, mode: Mode) -> bool {
        match self {
            SemanticsKind::Adpal => true,
            _ => mode == Mode::Equivalence,
        }
    }
}

impl fmt::Display for SemanticsKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SemanticsKind::Dbel => "DBEL",
            SemanticsKind::Dpal => "DPAL",
            SemanticsKind::Edpal => "EDPAL",
            SemanticsKind::Adpal => "ADPAL",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown semantics `{0}` (expected dbel, dpal, edpal or adpal)")]
pub struct UnknownSemantics(pub String);

impl FromStr for SemanticsKind {
    type Err = UnknownSemantics;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "dbel" => Ok(SemanticsKind::Dbel),
            "dpal" => Ok(SemanticsKind::Dpal),
            "edpal" => Ok(SemanticsKind::Edpal),
            "adpal" => Ok(SemanticsKind::Adpal),
            _ => Err(UnknownSemantics(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error("DBEL formulas may not contain announcements")]
    AnnouncementInDbel,
    #[error("{kind} requires an equivalence-mode model, got {mode} mode")]
    ModeMismatch { kind: SemanticsKind, mode: Mode },
    #[error("formula mentions agent {agent} but the model has {agents} agents")]
    UnknownAgent { agent: AgentId, agents: usize },
    #[error("state index {0} out of range")]
    StateOutOfRange(StateId),
}

/// Rejects formula/model/semantics combinations the checker cannot evaluate.
pub fn preflight(m: &Model, f: &Formula, kind: SemanticsKind) -> Result<(), CheckError> {
    if kind == SemanticsKind::Dbel && f.contains_announcement() {
        return Err(CheckError::AnnouncementInDbel);
    }
    if !kind.accepts_mode(m.mode()) {
        return Err(CheckError::ModeMismatch {
            kind,
            mode: m.mode(),
        });
    }
    if let Some(agent) = f.agents().into_iter().find(|a| a.0 >= m.agents()) {
        return Err(CheckError::UnknownAgent {
            agent,
            agents: m.agents(),
        });
    }
    Ok(())
}
