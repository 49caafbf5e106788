//! Model checking under DBEL and the three announcement semantics.

mod kind;
mod labeling;
mod naive;
mod update;

pub use kind::{preflight, CheckError, SemanticsKind, UnknownSemantics};
pub use labeling::{check, check_all, check_labeling, update_sequence, Labeling, Step};
pub use naive::check_naive;
pub use update::{update_with, Update};

use crate::model::{Mode, Model};
use crate::syntax::Formula;

fn announce_truth(
    m: &Model,
    announced: &Formula,
    kind: SemanticsKind,
) -> Result<Vec<bool>, CheckError> {
    check_all(m, announced, kind)
}

/// `M|φ` under DPAL.
pub fn update_dpal(m: &Model, announced: &Formula) -> Result<Update, CheckError> {
    let truth = announce_truth(m, announced, SemanticsKind::Dpal)?;
    Ok(update::dpal(m, &truth, announced.modal_depth()))
}

/// `M|φ` under EDPAL.
pub fn update_edpal(m: &Model, announced: &Formula) -> Result<Update, CheckError> {
    let truth = announce_truth(m, announced, SemanticsKind::Edpal)?;
    Ok(update::edpal(m, &truth, announced.modal_depth()))
}

/// `M|φ` under ADPAL. Equivalence-mode input is demoted first.
pub fn update_adpal(m: &Model, announced: &Formula) -> Result<Update, CheckError> {
    let truth = announce_truth(m, announced, SemanticsKind::Adpal)?;
    let base = if m.mode() == Mode::Equivalence {
        m.demote()
    } else {
        m.clone()
    };
    Ok(update::adpal(&base, &truth, announced.modal_depth()))
}

/// Dispatches to the update for `kind`.
pub fn update(m: &Model, announced: &Formula, kind: SemanticsKind) -> Result<Update, CheckError> {
    match kind {
        SemanticsKind::Dbel => Err(CheckError::AnnouncementInDbel),
        SemanticsKind::Dpal => update_dpal(m, announced),
        SemanticsKind::Edpal => update_edpal(m, announced),
        SemanticsKind::Adpal => update_adpal(m, announced),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::three_world_model;
    use crate::model::{validate, Relation};
    use crate::syntax::{parse, AgentId};
    use std::collections::BTreeSet;

    fn single(depth: i64) -> Model {
        Model::new(
            vec!["s".into()],
            vec![BTreeSet::new()],
            vec![Relation::identity(1)],
            vec![vec![depth]],
            Mode::Equivalence,
        )
        .unwrap()
    }

    #[test]
    fn depth_gate() {
        let m = single(0);
        for kind in SemanticsKind::ALL {
            assert!(check(&m, 0, &parse("K[0] true").unwrap(), kind).unwrap());
            assert!(!check(&m, 0, &parse("K[0] K[0] true").unwrap(), kind).unwrap());
        }
    }

    #[test]
    fn rejects_bad_combinations() {
        let m = single(0);
        let f = parse("[p]q").unwrap();
        assert_eq!(
            check(&m, 0, &f, SemanticsKind::Dbel),
            Err(CheckError::AnnouncementInDbel)
        );
        let r = m.demote();
        assert!(matches!(
            check(&r, 0, &parse("p").unwrap(), SemanticsKind::Dpal),
            Err(CheckError::ModeMismatch { .. })
        ));
        assert!(check(&r, 0, &parse("p").unwrap(), SemanticsKind::Adpal).is_ok());
        assert!(matches!(
            check(&m, 0, &parse("K[3] p").unwrap(), SemanticsKind::Dbel),
            Err(CheckError::UnknownAgent { .. })
        ));
        assert_eq!(
            check(&m, 4, &parse("p").unwrap(), SemanticsKind::Dbel),
            Err(CheckError::StateOutOfRange(4))
        );
    }

    #[test]
    fn three_world_leakage_under_adpal_only() {
        let m = three_world_model();
        let plain = parse("K[0] K[1] p0").unwrap();
        let announced = parse("[K[2] K[2] p0]K[0] K[1] p0").unwrap();
        assert!(!check(&m, 1, &plain, SemanticsKind::Adpal).unwrap());
        assert!(check(&m, 1, &announced, SemanticsKind::Adpal).unwrap());
        assert!(check_naive(&m, 1, &announced, SemanticsKind::Adpal).unwrap());
    }

    #[test]
    fn three_world_adpal_cuts_only_at_deep_state() {
        let m = three_world_model();
        let up = update_adpal(&m, &parse("K[2] K[2] p0").unwrap()).unwrap();
        let b = up.model.relation(AgentId(1));
        // b has depth 2 only at state 1, where p0 holds; state 2 disagrees.
        assert!(!b.related(1, 2));
        assert!(b.related(2, 1));
        assert!(b.related(1, 0));
        assert!(validate(&up.model, Mode::Reflexive).is_ok());
        assert_eq!(up.model.depth(AgentId(1), 1), 0);
        assert_eq!(up.model.depth(AgentId(1), 0), 0);
    }

    #[test]
    fn top_updates_are_trivial() {
        let m = crate::muddy::build_muddy(3, 3, &[1, 0, 2]).unwrap().model;
        let top = Formula::top();
        let d = update_dpal(&m, &top).unwrap();
        assert_eq!(d.model.len(), 2 * m.len());
        for s in m.states() {
            let p = d.point[s].unwrap();
            for a in 0..3 {
                let a = AgentId(a);
                assert!(!d.model.relation(a).related(s, p));
                assert_eq!(d.model.depth(a, p), m.depth(a, s));
                for t in m.states() {
                    assert_eq!(
                        d.model.relation(a).related(p, d.point[t].unwrap()),
                        m.relation(a).related(s, t)
                    );
                }
            }
        }
        assert_eq!(update_edpal(&m, &top).unwrap().model, m);
        let a = update_adpal(&m, &top).unwrap().model;
        assert_eq!(a, m.demote());
    }

    #[test]
    fn edpal_depth_goes_negative() {
        let m = single(0);
        let up = update_edpal(&m, &parse("K[0] true").unwrap()).unwrap();
        assert_eq!(up.model.depth(AgentId(0), 0), -1);
        let body = Formula::conj([
            Formula::know(0, Formula::top()).not(),
            Formula::exact(0, -1),
            Formula::at_least(0, 0).not(),
        ]);
        let f = Formula::announce(parse("K[0] true").unwrap(), body);
        assert!(check(&m, 0, &f, SemanticsKind::Edpal).unwrap());
    }

    #[test]
    fn failed_precondition_short_circuits() {
        let m = single(0);
        assert!(check(&m, 0, &parse("[p]false").unwrap(), SemanticsKind::Dpal).unwrap());
        assert!(!check(&m, 0, &parse("<p>true").unwrap(), SemanticsKind::Edpal).unwrap());
    }

    #[test]
    fn labeling_matches_valuation() {
        let m = crate::muddy::build_muddy(2, 2, &[0, 0]).unwrap().model;
        let f = parse("m0").unwrap();
        let lab = check_labeling(&m, &f, SemanticsKind::Dbel).unwrap();
        let expect: Vec<bool> = m.states().map(|s| m.holds(s, "m0")).collect();
        assert_eq!(lab.root(), expect.as_slice());
        assert_eq!(lab.truth(0, &f), Some(expect.as_slice()));
    }

    #[test]
    fn dpal_state_names() {
        let m = single(0);
        let up = update_dpal(&m, &Formula::top()).unwrap();
        assert_eq!(up.model.names(), ["0.s", "1.s"]);
    }

    #[test]
    fn update_sequence_follows_announcements() {
        let inst = crate::muddy::build_muddy(3, 3, &[2, 1, 0]).unwrap();
        let f = crate::muddy::amnesia_formula();
        let seq = update_sequence(&inst.model, inst.initial, &f, SemanticsKind::Dpal).unwrap();
        assert_eq!(seq.len(), 3);
    }
}
