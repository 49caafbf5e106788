//! `dpal`: check formulas, apply announcements, search for models, run the
//! muddy children experiments and the soundness suites, benchmark updates
//! and export Graphviz drawings.
//!
//! Exit status: 0 on success, 1 when a property suite reports unexpected
//! violations, 2 when a formula, model file or argument cannot be parsed, 3
//! when parsed input is rejected (invalid model, wrong semantics for the
//! model, unknown agent or state).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use dpal::bench::run_bench;
use dpal::dot::sequence_to_dot;
use dpal::model::{load_model, model_to_value, save_model, ModelFileError};
use dpal::muddy::{
    amnesia_formula, build_muddy, leakage_formula, lower_bound_check, parse_depths,
    upper_bound_formula, upper_bound_hypothesis, MuddyError,
};
use dpal::props::{
    kp_ta_suite, soundness_suite, AxiomTable, KpTaVariant, RandomSpec, SuiteError, SuiteSize,
};
use dpal::sat::{sat_bruteforce, Bounds, SatError};
use dpal::semantics::{check_all, update, update_sequence, CheckError, SemanticsKind};
use dpal::syntax::{parse, Formula};
use dpal::{Model, StateId};

#[derive(Debug, Parser)]
#[command(
    name = "dpal",
    version,
    about = "Depth-bounded epistemic logic and announcements"
)]
struct Cli {
    /// Worker threads for the parallel suites and sweeps.
    #[arg(long, global = true, env = "DPAL_WORKERS")]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct FormulaArg {
    /// Formula text.
    #[arg(long, short = 'f', conflicts_with = "formula_file")]
    formula: Option<String>,
    /// File holding the formula text.
    #[arg(long)]
    formula_file: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print whether a formula holds at a state.
    Check {
        #[arg(long, short = 'm')]
        model: PathBuf,
        /// State name or index. Without it every state is printed.
        #[arg(long, short = 's')]
        state: Option<String>,
        #[command(flatten)]
        formula: FormulaArg,
        #[arg(long, short = 'k', default_value = "dpal")]
        semantics: SemanticsKind,
    },
    /// Write the model produced by announcing a formula.
    Update {
        #[arg(long, short = 'm')]
        model: PathBuf,
        #[command(flatten)]
        formula: FormulaArg,
        #[arg(long, short = 'k', default_value = "dpal")]
        semantics: SemanticsKind,
        /// Output file; stdout when absent.
        #[arg(long, short = 'o')]
        output: Option<PathBuf>,
    },
    /// Search small models for one satisfying a formula.
    Sat {
        #[command(flatten)]
        formula: FormulaArg,
        #[arg(long, short = 'k', default_value = "dpal")]
        semantics: SemanticsKind,
        #[arg(long)]
        max_states: Option<usize>,
        #[arg(long)]
        max_depth: Option<i64>,
    },
    /// Muddy children models and experiments.
    Muddy {
        #[command(subcommand)]
        action: MuddyCommand,
    },
    /// Run an axiom soundness suite or a knowledge preservation suite.
    Axioms {
        /// dbel, dbel-inf, edpal or dpal-sound.
        #[arg(long, short = 't', default_value = "dbel")]
        table: AxiomTable,
        /// Semantics to check against; defaults to the table's own.
        #[arg(long, short = 'k')]
        semantics: Option<SemanticsKind>,
        /// Run a knowledge preservation variant instead of a table:
        /// kp, ta, kp-general or ta-general.
        #[arg(long)]
        variant: Option<KpTaVariant>,
        #[arg(long, default_value_t = 300)]
        cases: usize,
        #[arg(long, default_value_t = 50)]
        models: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        unambiguous: bool,
        /// Print the full report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Time DPAL updates and the 3-SAT reduction family; writes CSV.
    Bench {
        #[arg(long, short = 'o')]
        output: Option<PathBuf>,
        #[arg(long, default_value_t = 100)]
        cases: usize,
        #[arg(long, default_value_t = 4)]
        max_vars: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Draw a model, or the models produced by a formula's leading
    /// announcements, in Graphviz format.
    ExportDot {
        #[arg(long, short = 'm')]
        model: PathBuf,
        #[arg(long, short = 's', default_value = "0")]
        state: String,
        #[command(flatten)]
        formula: FormulaArg,
        #[arg(long, short = 'k', default_value = "dpal")]
        semantics: SemanticsKind,
        #[arg(long, short = 'o')]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
enum MuddyCommand {
    /// Write a muddy children model file.
    Model {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        /// Depth list `2,1,0`, a constant, or an expression over n, k, i.
        #[arg(long, default_value = "n-1-i")]
        depths: String,
        #[arg(long, short = 'o')]
        output: Option<PathBuf>,
    },
    /// Check the sufficient depth condition at the initial state.
    Upper {
        #[arg(long)]
        k: usize,
        #[arg(long, default_value = "k-1-i")]
        depths: String,
    },
    /// Sweep constant depths for the necessary depth condition under DPAL.
    Lower {
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 3)]
        max_depth: i64,
    },
    /// Amnesia and leakage formulas on three children under each semantics.
    Matrix {
        #[arg(long, default_value = "2-i")]
        depths: String,
    },
}

/// An error and the exit status it maps to.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl Failure {
    fn parse(error: impl Into<anyhow::Error>) -> Self {
        Failure {
            code: 2,
            error: error.into(),
        }
    }

    fn invalid(error: impl Into<anyhow::Error>) -> Self {
        Failure {
            code: 3,
            error: error.into(),
        }
    }

    fn violations(error: anyhow::Error) -> Self {
        Failure { code: 1, error }
    }
}

impl From<CheckError> for Failure {
    fn from(e: CheckError) -> Self {
        Failure::invalid(e)
    }
}

impl From<MuddyError> for Failure {
    fn from(e: MuddyError) -> Self {
        Failure::invalid(e)
    }
}

impl From<SuiteError> for Failure {
    fn from(e: SuiteError) -> Self {
        Failure::invalid(e)
    }
}

impl From<SatError> for Failure {
    fn from(e: SatError) -> Self {
        match e {
            SatError::Fragment(_) => Failure::parse(e),
            _ => Failure::invalid(e),
        }
    }
}

type Outcome = Result<(), Failure>;

fn read_model(path: &Path) -> Result<Model, Failure> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(Failure::parse)?;
    match load_model(&text) {
        Ok(loaded) => {
            for w in &loaded.warnings {
                log::warn!("{}: {w}", path.display());
            }
            Ok(loaded.model)
        }
        Err(e @ ModelFileError::Json(_)) => Err(Failure::parse(e)),
        Err(e) => Err(Failure::invalid(e)),
    }
}

fn read_formula(arg: &FormulaArg) -> Result<Formula, Failure> {
    let text = match (&arg.formula, &arg.formula_file) {
        (Some(text), _) => text.clone(),
        (None, Some(path)) => fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))
            .map_err(Failure::parse)?,
        (None, None) => return Err(Failure::parse(anyhow!("pass --formula or --formula-file"))),
    };
    parse(text.trim()).map_err(Failure::parse)
}

fn resolve_state(m: &Model, state: &str) -> Result<StateId, Failure> {
    if let Some(s) = m.state_index(state) {
        return Ok(s);
    }
    match state.parse::<usize>() {
        Ok(s) if s < m.len() => Ok(s),
        Ok(s) => Err(Failure::invalid(CheckError::StateOutOfRange(s))),
        Err(_) => Err(Failure::invalid(anyhow!("no state named `{state}`"))),
    }
}

fn write_output(output: Option<&Path>, text: &str) -> Outcome {
    match output {
        Some(path) => fs::write(path, text)
            .with_context(|| format!("writing {}", path.display()))
            .map_err(Failure::invalid),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run_check(model: &Path, state: Option<&str>, f: &FormulaArg, kind: SemanticsKind) -> Outcome {
    let m = read_model(model)?;
    let f = read_formula(f)?;
    let state = state.map(|s| resolve_state(&m, s)).transpose()?;
    let truth = check_all(&m, &f, kind)?;
    match state {
        Some(s) => println!("{}", truth[s]),
        None => {
            for s in m.states() {
                println!("{}\t{}", m.name(s), truth[s]);
            }
        }
    }
    Ok(())
}

fn run_update(model: &Path, f: &FormulaArg, kind: SemanticsKind, output: Option<&Path>) -> Outcome {
    let m = read_model(model)?;
    let f = read_formula(f)?;
    let up = update(&m, &f, kind)?;
    write_output(output, &save_model(&up.model))
}

fn run_sat(
    f: &FormulaArg,
    kind: SemanticsKind,
    max_states: Option<usize>,
    max_depth: Option<i64>,
) -> Outcome {
    let f = read_formula(f)?;
    let mut bounds = Bounds::for_formula(&f);
    if let Some(n) = max_states {
        bounds.max_states = n;
    }
    if let Some(d) = max_depth {
        bounds.max_depth = d;
    }
    match sat_bruteforce(&f, kind, bounds)? {
        Some(pm) => {
            println!("satisfiable at state {}", pm.model.name(pm.state));
            print!("{}", save_model(&pm.model));
        }
        None => println!(
            "unsatisfiable within {} states and depths up to {}",
            bounds.max_states, bounds.max_depth
        ),
    }
    Ok(())
}

fn run_muddy(action: &MuddyCommand) -> Outcome {
    match action {
        MuddyCommand::Model {
            n,
            k,
            depths,
            output,
        } => {
            let d = parse_depths(depths, *n, *k).map_err(|e| Failure::parse(anyhow!(e)))?;
            let inst = build_muddy(*n, *k, &d)?;
            log::info!("initial state {}", inst.model.name(inst.initial));
            write_output(output.as_deref(), &save_model(&inst.model))
        }
        MuddyCommand::Upper { k, depths } => {
            let d = parse_depths(depths, *k, *k).map_err(|e| Failure::parse(anyhow!(e)))?;
            let inst = build_muddy(*k, *k, &d)?;
            println!("semantics\thypothesis\timplication");
            let mut failed = false;
            for kind in SemanticsKind::UPDATES {
                let s = inst.initial;
                let hyp = check_all(&inst.model, &upper_bound_hypothesis(*k), kind)?[s];
                let imp = check_all(&inst.model, &upper_bound_formula(*k), kind)?[s];
                failed |= !imp;
                println!("{kind}\t{hyp}\t{imp}");
            }
            if failed {
                return Err(Failure::violations(anyhow!("implication failed")));
            }
            Ok(())
        }
        MuddyCommand::Lower { k, max_depth } => {
            let r = lower_bound_check(*k, *max_depth)?;
            println!(
                "k={} cases={} violations={} witness_failures={}",
                r.k,
                r.cases,
                r.violations.len(),
                r.witness_failures.len()
            );
            for d in &r.violations {
                println!("violation at depths {d:?}");
            }
            if !r.violations.is_empty() || !r.witness_failures.is_empty() {
                return Err(Failure::violations(anyhow!("lower bound sweep failed")));
            }
            Ok(())
        }
        MuddyCommand::Matrix { depths } => {
            let d = parse_depths(depths, 3, 3).map_err(|e| Failure::parse(anyhow!(e)))?;
            let inst = build_muddy(3, 3, &d)?;
            println!("semantics\tamnesia\tleakage");
            for kind in SemanticsKind::UPDATES {
                let s = inst.initial;
                let am = check_all(&inst.model, &amnesia_formula(), kind)?[s];
                let lk = check_all(&inst.model, &leakage_formula(), kind)?[s];
                println!("{kind}\t{am}\t{lk}");
            }
            Ok(())
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn run_axioms(
    table: AxiomTable,
    semantics: Option<SemanticsKind>,
    variant: Option<KpTaVariant>,
    cases: usize,
    models: usize,
    seed: u64,
    unambiguous: bool,
    as_json: bool,
) -> Outcome {
    let spec = RandomSpec {
        seed,
        unambiguous,
        ..RandomSpec::default()
    };
    if let Some(variant) = variant {
        let kind = semantics.unwrap_or(SemanticsKind::Dpal);
        let r = kp_ta_suite(kind, variant, &spec, cases)?;
        if as_json {
            println!(
                "{}",
                serde_json::to_string_pretty(&r).map_err(Failure::invalid)?
            );
        }
        println!(
            "{variant} under {kind}: cases={} applicable={} forward={} reverse={}",
            r.cases,
            r.applicable,
            r.forward_violations(),
            r.reverse_violations()
        );
        // Only DPAL is claimed to satisfy every variant in both directions.
        if kind == SemanticsKind::Dpal && (r.forward_violations() + r.reverse_violations()) > 0 {
            return Err(Failure::violations(anyhow!("unexpected violations")));
        }
        return Ok(());
    }
    let kind = semantics.unwrap_or(table.semantics());
    let r = soundness_suite(
        table,
        kind,
        &spec,
        SuiteSize {
            instances: cases,
            models,
        },
    )?;
    if as_json {
        println!(
            "{}",
            serde_json::to_string_pretty(&r).map_err(Failure::invalid)?
        );
    }
    println!(
        "table {table} under {kind}: instances={} models={} checks={} violations={} oracle_mismatches={}",
        r.instances,
        r.models,
        r.checks,
        r.violations.len(),
        r.oracle_mismatches
    );
    for v in &r.violations {
        println!(
            "violation: {} {} at state {} of {}",
            v.instance.schema,
            v.formula,
            v.model.name(v.state),
            json!(model_to_value(&v.model))
        );
    }
    if !r.is_clean() {
        return Err(Failure::violations(anyhow!("unexpected violations")));
    }
    Ok(())
}

fn run_bench_cmd(output: Option<&Path>, cases: usize, max_vars: usize, seed: u64) -> Outcome {
    let spec = RandomSpec {
        seed,
        ..RandomSpec::default()
    };
    let report = run_bench(&spec, cases, max_vars)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in &report.rows {
        w.serialize(row).map_err(Failure::invalid)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Failure::invalid(anyhow!("{e}")))?;
    write_output(output, &String::from_utf8_lossy(&bytes))?;
    eprintln!("fitted c = {:e}", report.fitted_c);
    eprintln!("max growth per DPAL step = {}", report.max_growth);
    Ok(())
}

fn run_dot(
    model: &Path,
    state: &str,
    f: &FormulaArg,
    kind: SemanticsKind,
    output: Option<&Path>,
) -> Outcome {
    let m = read_model(model)?;
    let s = resolve_state(&m, state)?;
    let (steps, labels) = if f.formula.is_some() || f.formula_file.is_some() {
        let f = read_formula(f)?;
        let steps = update_sequence(&m, s, &f, kind)?;
        (steps, announcement_labels(&f))
    } else {
        (vec![(m, s)], Vec::new())
    };
    write_output(output, &sequence_to_dot(&steps, &labels, kind))
}

fn announcement_labels(f: &Formula) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = f;
    loop {
        match cur {
            Formula::Announce(phi, psi) => {
                out.push(phi.to_string());
                cur = psi;
            }
            Formula::Not(inner) => match &**inner {
                Formula::Announce(phi, body) => match &**body {
                    Formula::Not(psi) => {
                        out.push(phi.to_string());
                        cur = psi;
                    }
                    _ => break,
                },
                _ => break,
            },
            _ => break,
        }
    }
    out
}

fn run(cli: Cli) -> Outcome {
    if let Some(n) = cli.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(Failure::invalid)?;
    }
    match cli.command {
        Command::Check {
            model,
            state,
            formula,
            semantics,
        } => run_check(&model, state.as_deref(), &formula, semantics),
        Command::Update {
            model,
            formula,
            semantics,
            output,
        } => run_update(&model, &formula, semantics, output.as_deref()),
        Command::Sat {
            formula,
            semantics,
            max_states,
            max_depth,
        } => run_sat(&formula, semantics, max_states, max_depth),
        Command::Muddy { action } => run_muddy(&action),
        Command::Axioms {
            table,
            semantics,
            variant,
            cases,
            models,
            seed,
            unambiguous,
            json,
        } => run_axioms(
            table,
            semantics,
            variant,
            cases,
            models,
            seed,
            unambiguous,
            json,
        ),
        Command::Bench {
            output,
            cases,
            max_vars,
            seed,
        } => run_bench_cmd(output.as_deref(), cases, max_vars, seed),
        Command::ExportDot {
            model,
            state,
            formula,
            semantics,
            output,
        } => run_dot(&model, &state, &formula, semantics, output.as_deref()),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure { code, error }) => {
            eprintln!("error: {error:#}");
            ExitCode::from(code)
        }
    }
}
