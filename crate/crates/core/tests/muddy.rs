use dpal::muddy::*;
use dpal::semantics::{check, check_naive, SemanticsKind};

fn canonical(k: usize) -> MuddyInstance {
    let depths: Vec<i64> = (0..k).map(|i| (k - 1 - i) as i64).collect();
    build_muddy(k, k, &depths).unwrap()
}

#[test]
fn upper_bound_holds_for_canonical_depths() {
    for k in 2..=4 {
        let inst = canonical(k);
        for kind in SemanticsKind::UPDATES {
            let hyp = check(&inst.model, inst.initial, &upper_bound_hypothesis(k), kind).unwrap();
            let imp = check(&inst.model, inst.initial, &upper_bound_formula(k), kind).unwrap();
            assert!(hyp, "hypothesis k={k} {kind}");
            assert!(imp, "implication k={k} {kind}");
        }
    }
}

#[test]
fn upper_bound_vacuous_when_child_zero_is_shallow() {
    let k = 3;
    let inst = build_muddy(k, k, &[1, 1, 0]).unwrap();
    let hyp = upper_bound_hypothesis(k);
    assert!(!check(&inst.model, inst.initial, &hyp, SemanticsKind::Dpal).unwrap());
    assert!(check(
        &inst.model,
        inst.initial,
        &upper_bound_formula(k),
        SemanticsKind::Dpal
    )
    .unwrap());
}

#[test]
fn lower_bound_sweeps() {
    for k in 2..=3 {
        let report = lower_bound_check(k, 3).unwrap();
        assert_eq!(report.cases, 4usize.pow(k as u32));
        assert!(report.violations.is_empty(), "{report:?}");
        assert!(report.witness_failures.is_empty(), "{report:?}");
    }
}

#[test]
fn lower_bound_witness_two_children() {
    let inst = build_muddy(2, 2, &[0, 0]).unwrap();
    assert!(!check(&inst.model, inst.initial, &phi_k(2), SemanticsKind::Dpal).unwrap());
}

#[test]
fn amnesia_and_leakage_matrix() {
    let inst = build_muddy(3, 3, &[2, 1, 0]).unwrap();
    let s = inst.initial;
    let amnesia = amnesia_formula();
    let leakage = leakage_formula();
    for (kind, am, lk) in [
        (SemanticsKind::Dpal, false, false),
        (SemanticsKind::Edpal, true, false),
        (SemanticsKind::Adpal, false, true),
    ] {
        assert_eq!(
            check(&inst.model, s, &amnesia, kind).unwrap(),
            am,
            "amnesia {kind}"
        );
        assert_eq!(
            check(&inst.model, s, &leakage, kind).unwrap(),
            lk,
            "leakage {kind}"
        );
        assert_eq!(check_naive(&inst.model, s, &amnesia, kind).unwrap(), am);
        assert_eq!(check_naive(&inst.model, s, &leakage, kind).unwrap(), lk);
    }
    let demoted = build_muddy(3, 3, &[1, 1, 0]).unwrap();
    assert!(!check(
        &demoted.model,
        demoted.initial,
        &leakage_direct_formula(),
        SemanticsKind::Adpal
    )
    .unwrap());
}
