//! Formula-to-formula rewrites.

use super::ast::{AgentId, Formula};

/// Removes every double negation.
pub fn simplify(f: &Formula) -> Formula {
    match f {
        Formula::Atom(_) | Formula::DepthExact(..) | Formula::DepthAtLeast(..) => f.clone(),
        Formula::Not(inner) => match inner.as_ref() {
            Formula::Not(innermost) => simplify(innermost),
            other => {
                let s = simplify(other);
                match s {
                    // simplification of the child may itself expose a negation
                    Formula::Not(x) => *x,
                    s => s.not(),
                }
            }
        },
        Formula::And(l, r) => simplify(l).and(simplify(r)),
        Formula::Know(a, inner) => Formula::know(*a, simplify(inner)),
        Formula::KnowInf(a, inner) => Formula::know_inf(*a, simplify(inner)),
        Formula::Announce(announced, body) => {
            Formula::announce(simplify(announced), simplify(body))
        }
    }
}

/// The precondition transform `F_φ` under which an announcement of
/// `announced` leaves knowledge of a formula unchanged for agents too shallow
/// to perceive it.
pub fn f_transform(announced: &Formula, f: &Formula) -> Formula {
    let d_phi = announced.modal_depth() as i64;
    // ¬K∞_a(φ → P_a^{d(φ)})
    let not_all_perceive = |a: AgentId| {
        Formula::know_inf(a, announced.clone().implies(Formula::at_least(a, d_phi))).not()
    };
    match f {
        Formula::Atom(_) | Formula::DepthExact(..) | Formula::DepthAtLeast(..) => Formula::top(),
        Formula::Not(inner) => f_transform(announced, inner),
        Formula::And(l, r) => f_transform(announced, l).and(f_transform(announced, r)),
        Formula::Know(a, inner) => {
            let d_psi = inner.modal_depth() as i64;
            let depth_guard = Formula::know_inf(
                *a,
                announced.clone().implies(
                    Formula::at_least(*a, d_phi)
                        .not()
                        .or(Formula::at_least(*a, d_phi + d_psi)),
                ),
            );
            not_all_perceive(*a)
                .and(depth_guard)
                .and(Formula::know_inf(*a, f_transform(announced, inner)))
        }
        Formula::KnowInf(a, inner) => {
            not_all_perceive(*a).and(Formula::know_inf(*a, f_transform(announced, inner)))
        }
        Formula::Announce(first, second) => {
            f_transform(announced, first).and(f_transform(announced, second))
        }
    }
}

/// Translates a formula into an equivalent one (under the eager semantics,
/// on models with non-negative depths) that uses only atoms, exact depth
/// atoms, negation, conjunction and `K∞`.
///
/// `K_a ψ` becomes `P_a^{d(ψ)} ∧ K∞_a ψ`; announcements are pushed inward
/// with atomic permanence, depth adjustment, the negation and conjunction
/// rules and the `K∞` announcement rule; finally each `P_a^d` becomes
/// `¬(E_a^0 ∨ … ∨ E_a^{d-1})`.
///
/// `P` atoms survive until the last step because models reached after an
/// announcement may carry negative depths, where the exact-depth expansion
/// is not valid. Under an announcement of depth `n`, `P_a^d` turns into
/// `P_a^{d+n}` exactly like `E_a^d` turns into `E_a^{d+n}`.
pub fn translate_edpal(f: &Formula) -> Formula {
    expand_at_least(&eliminate(f))
}

/// Removes `K` and announcements, keeping `P` atoms.
fn eliminate(f: &Formula) -> Formula {
    match f {
        Formula::Atom(_) | Formula::DepthExact(..) | Formula::DepthAtLeast(..) => f.clone(),
        Formula::Not(inner) => eliminate(inner).not(),
        Formula::And(l, r) => eliminate(l).and(eliminate(r)),
        Formula::Know(a, inner) => Formula::at_least(*a, inner.modal_depth() as i64)
            .and(Formula::know_inf(*a, eliminate(inner))),
        Formula::KnowInf(a, inner) => Formula::know_inf(*a, eliminate(inner)),
        Formula::Announce(announced, body) => {
            let shift = announced.modal_depth() as i64;
            push_announcement(shift, &eliminate(announced), &eliminate(body))
        }
    }
}

/// Rewrites `[φ]χ` for announcement-free `φ'` (equivalent to `φ`) and `χ`,
/// where `shift = d(φ)` of the original announced formula.
fn push_announcement(shift: i64, announced: &Formula, body: &Formula) -> Formula {
    let guard = |consequent: Formula| announced.clone().implies(consequent);
    match body {
        Formula::Atom(_) => guard(body.clone()),
        Formula::DepthExact(a, d) => guard(Formula::DepthExact(*a, d + shift)),
        Formula::DepthAtLeast(a, d) => guard(Formula::DepthAtLeast(*a, d + shift)),
        Formula::Not(inner) => guard(push_announcement(shift, announced, inner).not()),
        Formula::And(l, r) => {
            push_announcement(shift, announced, l).and(push_announcement(shift, announced, r))
        }
        Formula::KnowInf(a, inner) => guard(Formula::know_inf(
            *a,
            push_announcement(shift, announced, inner),
        )),
        Formula::Know(..) | Formula::Announce(..) => {
            unreachable!("body is already free of K and announcements")
        }
    }
}

fn expand_at_least(f: &Formula) -> Formula {
    match f {
        Formula::DepthAtLeast(a, d) => {
            Formula::disj((0..*d).map(|i| Formula::DepthExact(*a, i))).not()
        }
        Formula::Atom(_) | Formula::DepthExact(..) => f.clone(),
        Formula::Not(inner) => expand_at_least(inner).not(),
        Formula::And(l, r) => expand_at_least(l).and(expand_at_least(r)),
        Formula::KnowInf(a, inner) => Formula::know_inf(*a, expand_at_least(inner)),
        Formula::Know(..) | Formula::Announce(..) => {
            unreachable!("K and announcements are eliminated first")
        }
    }
}
