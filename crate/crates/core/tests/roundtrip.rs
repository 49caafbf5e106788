use proptest::prelude::*;

use dpal::syntax::{parse, AgentId, Formula};

fn leaf() -> impl Strategy<Value = Formula> {
    prop_oneof![
        4 => prop::sample::select(vec!["p", "q", "m0", "x_1"]).prop_map(Formula::atom),
        1 => Just(Formula::top()),
        2 => (0usize..3, 0i64..5).prop_map(|(a, d)| Formula::exact(a, d)),
        2 => (0usize..3, 0i64..5).prop_map(|(a, d)| Formula::at_least(a, d)),
    ]
}

fn formula() -> impl Strategy<Value = Formula> {
    leaf().prop_recursive(6, 40, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| l.and(r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| l.or(r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| l.implies(r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| l.iff(r)),
            (0usize..3, inner.clone()).prop_map(|(a, f)| Formula::know(AgentId(a), f)),
            (0usize..3, inner.clone()).prop_map(|(a, f)| Formula::know_inf(AgentId(a), f)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::announce(l, r)),
            (inner.clone(), inner).prop_map(|(l, r)| Formula::dual_announce(l, r)),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn print_then_parse_is_identity(f in formula().prop_filter("size", |f| f.size() <= 40)) {
        let text = f.to_string();
        let back = parse(&text).map_err(|e| TestCaseError::fail(format!("{text}: {e}")))?;
        prop_assert_eq!(back, f);
    }

    #[test]
    fn printing_is_stable(f in formula()) {
        let once = f.to_string();
        prop_assert_eq!(parse(&once).unwrap().to_string(), once);
    }
}
