//! Timing of DPAL updates and of checking the 3-SAT reduction family.

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::model::Model;
use crate::muddy::{reduce_3sat, Literal, ThreeSatInstance};
use crate::props::{random_formula, random_model_with, RandomSpec};
use crate::semantics::{check, update_dpal, update_sequence, CheckError, SemanticsKind};
use crate::syntax::Fragment;

/// One CSV row.
#[derive(Debug, Clone, Serialize)]
pub struct BenchRow {
    /// `dpal-update` or `3sat`.
    pub family: &'static str,
    /// Case index within `dpal-update`, variable count within `3sat`.
    pub n: usize,
    /// `|φ|`: nodes of the announced (or checked) formula.
    pub formula_size: usize,
    /// `‖M‖` of the input model.
    pub model_size: usize,
    /// Announcement step; 0 is the input model.
    pub step: usize,
    /// `‖M‖` of the model at this step.
    pub step_size: usize,
    /// `step_size` over the previous step's size.
    pub growth: f64,
    /// Update time for `dpal-update`, total check time for `3sat`.
    pub wall_ns: u128,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    /// Smallest `c` with `wall_ns ≤ c · 2^{2|φ|} · ‖M‖` on every `3sat` row.
    pub fitted_c: f64,
    /// Largest `growth` seen on any DPAL step.
    pub max_growth: f64,
}

/// A random 3-SAT instance with `vars` variables and `clauses` clauses.
pub fn random_3sat(rng: &mut impl Rng, vars: usize, clauses: usize) -> ThreeSatInstance {
    let vars = vars.max(1);
    let clauses = (0..clauses)
        .map(|_| {
            let mut vs: Vec<usize> = (0..vars).collect();
            vs.shuffle(rng);
            let lit = |v: usize, rng: &mut dyn rand::RngCore| {
                if rng.gen_bool(0.5) {
                    Literal::pos(v)
                } else {
                    Literal::neg(v)
                }
            };
            [
                lit(vs[0], rng),
                lit(vs[1 % vars], rng),
                lit(vs[2 % vars], rng),
            ]
        })
        .collect();
    ThreeSatInstance::new(vars, clauses).expect("variables in range")
}

/// Times `cases` DPAL updates of random models by random announcements.
pub fn bench_updates(spec: &RandomSpec, cases: usize) -> Result<Vec<BenchRow>, CheckError> {
    let mut rng = spec.rng();
    let mut rows = Vec::with_capacity(cases);
    for n in 0..cases {
        let m: Model = random_model_with(&mut rng, spec);
        let phi = random_formula(&mut rng, spec, Fragment::L);
        let start = Instant::now();
        let up = update_dpal(&m, &phi)?;
        let wall_ns = start.elapsed().as_nanos();
        rows.push(BenchRow {
            family: "dpal-update",
            n,
            formula_size: phi.size(),
            model_size: m.size(),
            step: 1,
            step_size: up.model.size(),
            growth: up.model.size() as f64 / m.size() as f64,
            wall_ns,
        });
    }
    Ok(rows)
}

/// Checks the reduction of a random instance with `n` variables and `2n`
/// clauses for each `n` in `vars`, one row per announcement step.
pub fn bench_3sat(
    vars: impl IntoIterator<Item = usize>,
    seed: u64,
) -> Result<Vec<BenchRow>, CheckError> {
    let mut rng = RandomSpec::default().with_seed(seed).rng();
    let mut rows = Vec::new();
    for n in vars {
        let inst = random_3sat(&mut rng, n, 2 * n);
        let (m, omega) = reduce_3sat(&inst);
        let start = Instant::now();
        check(&m, 0, &omega, SemanticsKind::Dpal)?;
        let wall_ns = start.elapsed().as_nanos();
        let steps = update_sequence(&m, 0, &omega, SemanticsKind::Dpal)?;
        let mut prev = m.size();
        for (step, (model, _)) in steps.iter().enumerate() {
            rows.push(BenchRow {
                family: "3sat",
                n,
                formula_size: omega.size(),
                model_size: m.size(),
                step,
                step_size: model.size(),
                growth: model.size() as f64 / prev as f64,
                wall_ns,
            });
            prev = model.size();
        }
    }
    Ok(rows)
}

/// Both families plus the fitted constant.
pub fn run_bench(
    spec: &RandomSpec,
    update_cases: usize,
    max_vars: usize,
) -> Result<BenchReport, CheckError> {
    let mut rows = bench_updates(spec, update_cases)?;
    rows.extend(bench_3sat(1..=max_vars, spec.seed)?);
    Ok(BenchReport {
        fitted_c: fit_c(&rows),
        max_growth: rows.iter().map(|r| r.growth).fold(0.0, f64::max),
        rows,
    })
}

/// `max wall_ns / (2^{2|φ|} · ‖M‖)` over the `3sat` rows.
pub fn fit_c(rows: &[BenchRow]) -> f64 {
    rows.iter()
        .filter(|r| r.family == "3sat")
        .map(|r| r.wall_ns as f64 / (2f64.powi(2 * r.formula_size as i32) * r.model_size as f64))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn update_growth_is_at_most_four() {
        let rows = bench_updates(&RandomSpec::default(), 50).unwrap();
        assert!(rows.iter().all(|r| r.step_size <= 4 * r.model_size));
    }

    #[test]
    fn three_sat_rows_per_step() {
        let rows = bench_3sat([2], 0).unwrap();
        // ω for n = 2 announces twice.
        assert_eq!(rows.len(), 3);
        assert!(rows.iter().all(|r| r.growth <= 4.0));
        assert!(fit_c(&rows) > 0.0);
    }

    #[test]
    fn random_3sat_uses_distinct_variables() {
        let mut rng = RandomSpec::default().rng();
        let inst = random_3sat(&mut rng, 3, 6);
        for c in &inst.clauses {
            assert!(c[0].var != c[1].var && c[1].var != c[2].var && c[0].var != c[2].var);
        }
    }
}
