//! Checks shared by the acceptance target and the property tests. Each
//! returns a summary line and whether the property held.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use rand::Rng;
use rayon::prelude::*;

use dpal::bench::{bench_3sat, fit_c};
use dpal::fixtures::three_world_model;
use dpal::model::{load_model, Model};
use dpal::muddy::{
    all_clauses, amnesia_formula, build_muddy, for_each_clause_set, leakage_formula,
    lower_bound_check, reduction_holds, upper_bound_formula, ThreeSatInstance,
};
use dpal::props::{
    amnesia_suite, find_composition_counterexample, kp_ta_suite, kp_top_case, random_formula,
    random_model_with, soundness_suite, AxiomSchema, AxiomTable, Instance, KpTaVariant, RandomSpec,
    SuiteSize,
};
use dpal::sat::{assign_depths, closure, is_type, satisfies_depth_literals, type_at, Closure};
use dpal::semantics::{check, check_all, check_naive, update_dpal, update_edpal, SemanticsKind};
use dpal::syntax::{f_transform, parse, translate_edpal, AgentId, Formula, Fragment};

pub struct Outcome {
    pub pass: bool,
    pub detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome {
            pass,
            detail: detail.into(),
        }
    }
}

pub fn spec() -> RandomSpec {
    RandomSpec::default()
}

pub fn axiom_soundness() -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    for (table, kind) in [
        (AxiomTable::Dbel, SemanticsKind::Dbel),
        (AxiomTable::DbelInf, SemanticsKind::Dbel),
        (AxiomTable::Edpal, SemanticsKind::Edpal),
        (AxiomTable::DpalSound, SemanticsKind::Dpal),
    ] {
        let r = soundness_suite(table, kind, &spec(), SuiteSize::default()).unwrap();
        pass &= r.is_clean() && r.instances >= 300 && r.models >= 50;
        parts.push(format!(
            "{table}/{kind} {}x{} violations={}",
            r.instances,
            r.models,
            r.violations.len() + r.oracle_mismatches
        ));
    }
    Outcome::new(pass, parts.join(", "))
}

pub fn kp_ta_dpal() -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    for variant in KpTaVariant::ALL {
        let r = kp_ta_suite(SemanticsKind::Dpal, variant, &spec(), 3000).unwrap();
        let bad = r.forward_violations() + r.reverse_violations();
        pass &= bad == 0 && r.applicable >= 200;
        parts.push(format!(
            "{variant} applicable={} violations={bad}",
            r.applicable
        ));
    }
    Outcome::new(pass, parts.join(", "))
}

pub fn composition_fixture_path() -> PathBuf {
    [
        env!("CARGO_MANIFEST_DIR"),
        "tests",
        "fixtures",
        "dpal_composition.json",
    ]
    .iter()
    .collect()
}

/// The stored composition counterexample: model, state and the instance.
pub fn composition_fixture() -> (Model, usize, Formula) {
    let text = std::fs::read_to_string(composition_fixture_path()).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let model = load_model(&v["model"].to_string()).unwrap().model;
    let state = model.state_index(v["state"].as_str().unwrap()).unwrap();
    let f = |k: &str| parse(v[k].as_str().unwrap()).unwrap();
    let inst = Instance::new(
        AxiomSchema::Composition,
        0,
        vec![f("phi"), f("psi"), f("chi")],
        vec![],
    );
    (model, state, inst.formula())
}

pub fn negative_witnesses() -> Outcome {
    // (a) amnesia and the top counterexample under the eager semantics
    let amnesia_failures = amnesia_suite(SemanticsKind::Edpal, &spec(), 100).unwrap();
    let top = kp_top_case(SemanticsKind::Edpal).unwrap();
    let a = amnesia_failures == 0 && top.reverse == vec![0] && top.forward.is_empty();

    // (b) leakage on the three-world fixture
    let m = three_world_model();
    let phi = parse("K[2] K[2] p0").unwrap();
    let k_psi = parse("K[0] K[1] p0").unwrap();
    let announced = Formula::announce(phi.clone(), k_psi.clone());
    let after = check(&m, 1, &announced, SemanticsKind::Adpal).unwrap();
    let before = check(&m, 1, &k_psi, SemanticsKind::Adpal).unwrap();
    let guard = check(&m, 1, &f_transform(&phi, &k_psi), SemanticsKind::Adpal).unwrap();
    let b = after && !before && guard;

    // (c) composition fails under DPAL on a model of at most three states
    let found = find_composition_counterexample(SemanticsKind::Dpal, &spec(), 3, 20).unwrap();
    let (fm, fs, ff) = composition_fixture();
    let c = found.as_ref().is_some_and(|v| v.model.len() <= 3)
        && fm.len() <= 3
        && !check(&fm, fs, &ff, SemanticsKind::Dpal).unwrap()
        && check(&fm, fs, &ff, SemanticsKind::Edpal).unwrap();

    Outcome::new(
        a && b && c,
        format!(
            "amnesia failures={amnesia_failures} top-reverse={:?}; leakage after={after} before={before} guard={guard}; composition found={}",
            top.reverse,
            found.map(|v| v.formula.to_string()).unwrap_or_else(|| "none".into())
        ),
    )
}

pub fn muddy_children() -> Outcome {
    let mut upper = true;
    for k in 2..=4 {
        let depths: Vec<i64> = (0..k).map(|i| (k - 1 - i) as i64).collect();
        let inst = build_muddy(k, k, &depths).unwrap();
        for kind in SemanticsKind::UPDATES {
            upper &= check(&inst.model, inst.initial, &upper_bound_formula(k), kind).unwrap();
        }
    }
    let mut lower = true;
    let mut cases = 0;
    for k in 2..=3 {
        let r = lower_bound_check(k, 3).unwrap();
        cases += r.cases;
        lower &= r.violations.is_empty() && r.witness_failures.is_empty();
    }
    let inst = build_muddy(3, 3, &[2, 1, 0]).unwrap();
    let mut matrix = true;
    for (kind, am, lk) in [
        (SemanticsKind::Dpal, false, false),
        (SemanticsKind::Edpal, true, false),
        (SemanticsKind::Adpal, false, true),
    ] {
        matrix &= check(&inst.model, inst.initial, &amnesia_formula(), kind).unwrap() == am;
        matrix &= check(&inst.model, inst.initial, &leakage_formula(), kind).unwrap() == lk;
    }
    Outcome::new(
        upper && lower && matrix,
        format!("upper k=2..4: {upper}; lower sweep {cases} cases: {lower}; amnesia/leakage matrix: {matrix}"),
    )
}

pub fn complexity_bounds() -> Outcome {
    let spec = spec();
    let mut rng = spec.with_seed(101).rng();
    let mut worst = 0f64;
    let mut dpal_ok = true;
    let mut edpal_ok = true;
    for _ in 0..100 {
        let m = random_model_with(&mut rng, &spec);
        let phi = random_formula(&mut rng, &spec, Fragment::L);
        let d = update_dpal(&m, &phi).unwrap().model;
        dpal_ok &= d.size() <= 4 * m.size();
        worst = worst.max(d.size() as f64 / m.size() as f64);
        let e = update_edpal(&m, &phi).unwrap().model;
        edpal_ok &= e.len() <= m.len();
    }
    let rows = bench_3sat(1..=4, 0).unwrap();
    let c = fit_c(&rows);
    let growth_ok = rows.iter().all(|r| r.growth <= 4.0);
    Outcome::new(
        dpal_ok && edpal_ok && growth_ok && c.is_finite() && c > 0.0,
        format!("worst DPAL growth={worst:.3}, EDPAL never grows={edpal_ok}, 3-SAT family fitted c={c:e}"),
    )
}

pub fn reduction_exhaustive() -> Outcome {
    let clauses = all_clauses(3);
    let mut sets = Vec::new();
    for_each_clause_set(clauses.len(), 4, |s| sets.push(s.to_vec()));
    let mismatches: usize = sets
        .par_iter()
        .map(|s| {
            let inst = ThreeSatInstance::new(3, s.iter().map(|&i| clauses[i]).collect()).unwrap();
            usize::from(reduction_holds(&inst).unwrap() != inst.satisfiable())
        })
        .sum();
    Outcome::new(
        mismatches == 0,
        format!("{} instances, {mismatches} mismatches", sets.len()),
    )
}

/// Replaces `K_a` by `K∞_a`, giving a formula the closure accepts.
pub fn unbounded(f: &Formula) -> Formula {
    match f {
        Formula::Atom(_) | Formula::DepthExact(..) | Formula::DepthAtLeast(..) => f.clone(),
        Formula::Not(g) => unbounded(g).not(),
        Formula::And(l, r) => unbounded(l).and(unbounded(r)),
        Formula::Know(a, g) | Formula::KnowInf(a, g) => Formula::know_inf(*a, unbounded(g)),
        Formula::Announce(l, r) => Formula::announce(unbounded(l), unbounded(r)),
    }
}

/// Candidate types of `cl`: every assignment to the free members, closed
/// propositionally.
pub fn candidate_types(cl: &Closure) -> Vec<BTreeSet<Formula>> {
    let free: Vec<&Formula> = cl.free();
    let mut out = Vec::new();
    for mask in 0u64..1 << free.len() {
        let chosen: BTreeMap<&Formula, bool> = free
            .iter()
            .enumerate()
            .map(|(i, f)| (*f, mask >> i & 1 == 1))
            .collect();
        fn eval(f: &Formula, chosen: &BTreeMap<&Formula, bool>) -> bool {
            match f {
                Formula::Not(g) => !eval(g, chosen),
                Formula::And(l, r) => eval(l, chosen) && eval(r, chosen),
                other => chosen[other],
            }
        }
        out.push(
            cl.formulas()
                .iter()
                .filter(|f| eval(f, &chosen))
                .cloned()
                .collect(),
        );
    }
    out
}

pub fn translation_and_types() -> Outcome {
    let spec = RandomSpec {
        max_size: 10,
        ..spec()
    };
    let mut rng = spec.with_seed(202).rng();
    let mut mismatches = 0;
    for _ in 0..500 {
        let m = random_model_with(&mut rng, &spec);
        let f = random_formula(&mut rng, &spec, Fragment::LInf);
        let t = translate_edpal(&f);
        if check_all(&m, &f, SemanticsKind::Edpal).unwrap()
            != check_all(&m, &t, SemanticsKind::Edpal).unwrap()
        {
            mismatches += 1;
        }
    }

    let type_spec = RandomSpec {
        max_size: 7,
        ..spec.clone()
    };
    let mut closures = 0;
    let mut accepted = 0;
    let mut failures = 0;
    while closures < 200 {
        let f = unbounded(&random_formula(&mut rng, &type_spec, Fragment::HInf));
        let cl = closure([&f]).unwrap();
        if cl.free().len() > 12 {
            continue;
        }
        closures += 1;
        let m = random_model_with(&mut rng, &spec);
        let mut types = candidate_types(&cl);
        types.extend(m.states().map(|s| type_at(&m, s, &cl).unwrap()));
        for gamma in types {
            if is_type(&gamma, &cl).is_ok() {
                accepted += 1;
                if !satisfies_depth_literals(&gamma, &cl, &assign_depths(&gamma)) {
                    failures += 1;
                }
            }
        }
    }
    Outcome::new(
        mismatches == 0 && failures == 0,
        format!("translation 500 pairs, {mismatches} mismatches; {closures} closures, {accepted} accepted types, {failures} assignment failures"),
    )
}

pub fn oracle_cross_check() -> Outcome {
    let spec = RandomSpec {
        max_size: 10,
        ..spec()
    };
    let mut rng = spec.with_seed(303).rng();
    let mut mismatches = 0;
    let mut triples = 0;
    for _ in 0..600 {
        let kind = SemanticsKind::ALL[rng.gen_range(0..4)];
        let fragment = if kind == SemanticsKind::Dbel {
            Fragment::HInf
        } else {
            Fragment::LInf
        };
        let mut m = random_model_with(&mut rng, &spec);
        if kind == SemanticsKind::Adpal && rng.gen_bool(0.5) {
            m = m.demote();
        }
        let f = random_formula(&mut rng, &spec, fragment);
        let fast = check_all(&m, &f, kind).unwrap();
        for s in m.states() {
            if check_naive(&m, s, &f, kind).unwrap() != fast[s] {
                mismatches += 1;
            }
        }
        triples += 1;
    }
    let fixture = three_world_model();
    for f in [
        "[K[2] K[2] p0]K[0] K[1] p0",
        "<K[1] p0>K[0] !K[2] p0",
        "[p0][K[1] p0]K[0] p0",
    ] {
        let f = parse(f).unwrap();
        let fast = check_all(&fixture, &f, SemanticsKind::Adpal).unwrap();
        for s in fixture.states() {
            if check_naive(&fixture, s, &f, SemanticsKind::Adpal).unwrap() != fast[s] {
                mismatches += 1;
            }
        }
        triples += 1;
    }
    Outcome::new(
        mismatches == 0,
        format!("{triples} triples, {mismatches} mismatches"),
    )
}

pub fn agent(i: usize) -> AgentId {
    AgentId(i)
}
