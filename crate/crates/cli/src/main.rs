//! `probemin`: run probing policies, oracles, verification suites and
//! parameter sweeps on small stochastic minimization instances.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or input error,
//! 3 resource cap exceeded.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use probemin_core::gen;
use probemin_core::metamin::{MetaMin, SumOfK};
use probemin_core::model::{parse_instance, sample_realization};
use probemin_core::objective::RankKind;
use probemin_core::oracle::{
    knapsack_budget, opt_adaptive_expectation, opt_adaptive_mtrank_cardinality, opt_adaptive_rank_knapsack,
    opt_adaptive_rank_matroid, opt_nonadaptive, NonAdaptiveTarget, OptimalRankSolver,
};
use probemin_core::policy::{
    exact_expected_objective, exact_success_probability, execute, monte_carlo_trials, summarize, Policy,
};
use probemin_core::rational::{self, ExactValue};
use probemin_core::solvers::{
    AdapMGreedySolver, BinSolver, DensitySolver, ExtGreedySolver, MGreedySolver, RankKnapsackSolver,
    ThresholdSolver,
};
use probemin_core::verify::{gap_example, gap_monte_carlo, run_suite, CheckLine, SuiteOptions, SUITES};
use probemin_core::{ConstraintSpec, Error, Instance, Objective, ObjectiveSpec};
use rand::SeedableRng;
use rayon::prelude::*;
use serde_json::{json, Value};

const SCHEMA: &str = "probemin/1";

#[derive(Parser, Debug)]
#[command(name = "probemin", version, about = "Adaptive stochastic minimization under probing constraints")]
struct Cli {
    /// Instance JSON file.
    #[arg(long, global = true)]
    instance: Option<PathBuf>,

    /// Seed for sampling and instance generation.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Evaluate exactly by enumerating every outcome (the default).
    #[arg(long, global = true, conflicts_with = "mc")]
    exact: bool,

    /// Estimate by Monte Carlo with this many trials.
    #[arg(long, global = true)]
    mc: Option<u64>,

    /// Write the primary output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Output format (default depends on the command).
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one algorithm on an instance.
    Solve(SolveArgs),
    /// Compute an exact optimum.
    Oracle(OracleArgs),
    /// Run a verification suite.
    Verify(VerifyArgs),
    /// Exact values on the three-element adaptivity-gap instance.
    Gap {
        #[arg(long = "N", default_value_t = 10)]
        big_n: u32,
    },
    /// Run an algorithm over a grid of generated instances.
    Sweep(SweepArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Algo {
    Density,
    Extgreedy,
    Bin,
    RankKnapsack,
    Mgreedy,
    AdapMgreedy,
    Optimal,
    Metamin,
}

#[derive(clap::Args, Debug, Clone)]
struct AlgoArgs {
    #[arg(long, value_enum)]
    algo: Algo,

    /// Threshold for the threshold solvers.
    #[arg(long, default_value_t = 0)]
    t: u32,

    /// Heads target / objective index for the rank solvers.
    #[arg(long, default_value_t = 1)]
    i: usize,

    /// Threshold solver used inside metamin.
    #[arg(long, value_enum, default_value = "density")]
    inner: Algo,

    /// Probe the binning set first and hand the remaining target to the
    /// extended greedy (rank-knapsack only).
    #[arg(long)]
    handoff: bool,

    /// Evaluate metamin threshold tests on the running union.
    #[arg(long)]
    test_on_union: bool,
}

#[derive(clap::Args, Debug)]
struct SolveArgs {
    #[command(flatten)]
    algo: AlgoArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OracleKind {
    /// Optimal adaptive expected objective.
    Expectation,
    /// Best non-adaptive expected objective.
    Nonadaptive,
    /// Best non-adaptive `P(min > t)`.
    Threshold,
    /// Optimal adaptive `P(trank ≥ i)` under the knapsack/cardinality budget.
    RankKnapsack,
    /// Optimal adaptive `P(trank ≥ i)` under the matroid constraint.
    RankMatroid,
    /// Optimal adaptive `P(Mtrank ≥ i)` under the cardinality budget.
    Mtrank,
}

#[derive(clap::Args, Debug)]
struct OracleArgs {
    #[arg(long, value_enum, default_value = "expectation")]
    kind: OracleKind,
    #[arg(long, default_value_t = 0)]
    t: u32,
    #[arg(long, default_value_t = 1)]
    i: usize,
}

#[derive(clap::Args, Debug)]
struct VerifyArgs {
    /// Suite name.
    suite: String,
    /// Generated cases (default: the suite's own size)
    #[arg(long)]
    trials: Option<usize>,
    /// Largest instance size.
    #[arg(long)]
    n: Option<usize>,
    /// `N` of the gap instance.
    #[arg(long = "N")]
    big_n: Option<u32>,
}

#[derive(clap::Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    algo: AlgoArgs,
    /// Grid as `name=v1,v2,…` with name one of m, n, i, t.
    #[arg(long)]
    param: String,
    /// Generated instances per grid point.
    #[arg(long, default_value_t = 20)]
    trials: usize,
    /// Instance size when not swept.
    #[arg(long, default_value_t = 6)]
    size: usize,
    /// Value bound when not swept.
    #[arg(long, default_value_t = 15)]
    m: u32,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Cap(String),
    Failed(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::CapExceeded { .. } | Error::TooLarge(_) => CliError::Cap(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Failed(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Cap(msg)) => {
            eprintln!("resource cap: {msg}");
            ExitCode::from(3)
        }
    }
}

fn run(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Solve(args) => solve(cli, &args.algo),
        Command::Oracle(args) => oracle(cli, args),
        Command::Verify(args) => verify(cli, args),
        Command::Gap { big_n } => gap(cli, *big_n),
        Command::Sweep(args) => sweep(cli, args),
    }
}

fn load_instance(cli: &Cli) -> CliResult<Instance> {
    let path = cli
        .instance
        .as_ref()
        .ok_or_else(|| CliError::Usage("--instance is required".into()))?;
    let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    Ok(parse_instance(&text)?)
}

fn emit(cli: &Cli, bytes: &[u8]) -> CliResult<()> {
    match &cli.out {
        Some(path) => fs::write(path, bytes)?,
        None => io::stdout().write_all(bytes)?,
    }
    Ok(())
}

fn emit_json(cli: &Cli, value: &Value) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).expect("JSON values serialize");
    text.push('\n');
    emit(cli, text.as_bytes())
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new().flexible(true).from_writer(Vec::new())
}

fn finish_csv(cli: &Cli, w: csv::Writer<Vec<u8>>) -> CliResult<()> {
    let bytes = w.into_inner().map_err(|e| CliError::Usage(e.to_string()))?;
    emit(cli, &bytes)
}

fn exact(r: &rational::Rational) -> Value {
    serde_json::to_value(ExactValue::from(r)).expect("exact values serialize")
}

fn solver(algo: Algo, handoff: bool) -> CliResult<Arc<dyn ThresholdSolver>> {
    Ok(match algo {
        Algo::Density => Arc::new(DensitySolver),
        Algo::Extgreedy => Arc::new(ExtGreedySolver),
        Algo::Bin => Arc::new(BinSolver),
        Algo::RankKnapsack => Arc::new(RankKnapsackSolver { handoff }),
        Algo::Mgreedy => Arc::new(MGreedySolver),
        Algo::AdapMgreedy => Arc::new(AdapMGreedySolver),
        Algo::Optimal => Arc::new(OptimalRankSolver::new()),
        Algo::Metamin => return Err(CliError::Usage("metamin cannot be its own inner solver".into())),
    })
}

fn build_policy(inst: &Instance, args: &AlgoArgs) -> CliResult<Box<dyn Policy + Send + Sync>> {
    if args.algo == Algo::Metamin {
        let inner = solver(args.inner, args.handoff)?;
        let obj = Objective::from_instance(inst);
        if obj.k() > 1 {
            return Ok(Box::new(SumOfK::new(inner, obj, inst.m as u64)));
        }
        let mut pol = MetaMin::new(inner, obj.clone(), obj.bound());
        pol.test_on_union = args.test_on_union;
        return Ok(Box::new(pol));
    }
    if args.i == 0 {
        return Err(CliError::Usage("--i must be at least 1".into()));
    }
    Ok(solver(args.algo, args.handoff)?.policy_for(inst, args.i, args.t)?)
}

fn rank_kind(inst: &Instance, algo: Algo) -> RankKind {
    match (algo, inst.inner_matroid()) {
        (Algo::AdapMgreedy, Some(inner)) => RankKind::Mtrank(inner.clone()),
        _ => RankKind::Trank,
    }
}

fn solve(cli: &Cli, args: &AlgoArgs) -> CliResult<()> {
    let inst = load_instance(cli)?;
    let policy = build_policy(&inst, args)?;
    let obj = Objective::from_instance(&inst);
    if let Some(trials) = cli.mc {
        if trials == 0 {
            return Err(CliError::Usage("--mc needs at least one trial".into()));
        }
        let rows = monte_carlo_trials(&*policy, &inst, &obj, trials, cli.seed)?;
        let summary = summarize(&rows, cli.seed);
        return match cli.format.unwrap_or(Format::Csv) {
            Format::Csv => {
                let mut w = csv_writer();
                w.write_record(["schema", SCHEMA, "monte-carlo"])?;
                w.write_record(["record", "trial", "objective", "cost", "feasible_set_count", "mean", "half_width_95"])?;
                for r in &rows {
                    w.write_record([
                        "trial".to_string(),
                        r.trial.to_string(),
                        r.objective.to_string(),
                        r.cost.to_string(),
                        r.feasible_set_count.to_string(),
                        String::new(),
                        String::new(),
                    ])?;
                }
                w.write_record([
                    "summary".to_string(),
                    summary.trials.to_string(),
                    String::new(),
                    String::new(),
                    String::new(),
                    summary.mean.to_string(),
                    summary.half_width_95.to_string(),
                ])?;
                finish_csv(cli, w)
            }
            Format::Json => emit_json(
                cli,
                &json!({
                    "schema": SCHEMA,
                    "command": "solve",
                    "policy": policy.name(),
                    "mode": "monte-carlo",
                    "rows": rows,
                    "summary": summary,
                }),
            ),
        };
    }
    let eval = exact_expected_objective(&*policy, &inst, &obj)?;
    let sample = execute(&*policy, &inst, &sample_realization(&inst, cli.seed, 0), &obj)?;
    let mut report = json!({
        "schema": SCHEMA,
        "command": "solve",
        "policy": policy.name(),
        "objective": obj.name(),
        "mode": "exact",
        "expectation": exact(&eval.expectation),
        "outcomes": eval.outcomes,
        "max_calls": eval.max_calls,
        "max_feasible_sets": eval.max_feasible_sets,
        "sample_run": sample,
    });
    if let Some(ub) = &eval.ub_expectation {
        report["ub_expectation"] = exact(ub);
    }
    if args.algo != Algo::Metamin {
        let p = exact_success_probability(&*policy, &inst, args.t, args.i, &rank_kind(&inst, args.algo))?;
        report["t"] = json!(args.t);
        report["i"] = json!(args.i);
        report["success_probability"] = exact(&p);
    }
    match cli.format.unwrap_or(Format::Json) {
        Format::Json => emit_json(cli, &report),
        Format::Csv => {
            let mut w = csv_writer();
            w.write_record(["schema", SCHEMA, "solve"])?;
            w.write_record(["policy", "expectation", "expectation_float", "ub_expectation", "max_calls", "max_feasible_sets"])?;
            w.write_record([
                policy.name(),
                rational::to_string(&eval.expectation),
                rational::to_f64(&eval.expectation).to_string(),
                eval.ub_expectation.as_ref().map(rational::to_string).unwrap_or_default(),
                eval.max_calls.to_string(),
                eval.max_feasible_sets.to_string(),
            ])?;
            finish_csv(cli, w)
        }
    }
}

fn oracle(cli: &Cli, args: &OracleArgs) -> CliResult<()> {
    let inst = load_instance(cli)?;
    let obj = Objective::from_instance(&inst);
    let start = Instant::now();
    let (value, states, set) = match args.kind {
        OracleKind::Expectation => {
            let v = opt_adaptive_expectation(&inst, &obj)?;
            (v.value, v.states_visited, None)
        }
        OracleKind::Nonadaptive => {
            let v = opt_nonadaptive(&inst, &NonAdaptiveTarget::Expectation(obj))?;
            (v.value, v.sets_examined, Some(v.set))
        }
        OracleKind::Threshold => {
            let v = opt_nonadaptive(&inst, &NonAdaptiveTarget::Threshold { t: args.t })?;
            (v.value, v.sets_examined, Some(v.set))
        }
        OracleKind::RankKnapsack => {
            let v = opt_adaptive_rank_knapsack(&inst, &knapsack_budget(&inst)?, args.i, args.t)?;
            (v.value, v.states_visited, None)
        }
        OracleKind::RankMatroid => {
            let mat = inst
                .outer_matroid()
                .ok_or_else(|| CliError::Usage("instance has no matroid constraint".into()))?;
            let v = opt_adaptive_rank_matroid(&inst, mat, args.i, args.t)?;
            (v.value, v.states_visited, None)
        }
        OracleKind::Mtrank => {
            let inner = inst
                .inner_matroid()
                .ok_or_else(|| CliError::Usage("instance has no inner matroid".into()))?;
            let ConstraintSpec::Cardinality { budget } = inst.constraint else {
                return Err(CliError::Usage("mtrank oracle needs a cardinality constraint".into()));
            };
            let v = opt_adaptive_mtrank_cardinality(&inst, inner, budget, args.i, args.t)?;
            (v.value, v.states_visited, None)
        }
    };
    // timing goes to stderr so that the primary output stays reproducible
    eprintln!("oracle time: {:.3} ms", start.elapsed().as_secs_f64() * 1e3);
    let kind = args.kind.to_possible_value().expect("no skipped variants");
    match cli.format.unwrap_or(Format::Json) {
        Format::Json => {
            let mut report = json!({
                "schema": SCHEMA,
                "command": "oracle",
                "kind": kind.get_name(),
                "value": exact(&value),
                "states_visited": states,
            });
            if let Some(s) = set {
                report["set"] = json!(s);
            }
            emit_json(cli, &report)
        }
        Format::Csv => {
            let mut w = csv_writer();
            w.write_record(["schema", SCHEMA, "oracle"])?;
            w.write_record(["kind", "value", "value_float", "states_visited"])?;
            w.write_record([
                kind.get_name().to_string(),
                rational::to_string(&value),
                rational::to_f64(&value).to_string(),
                states.to_string(),
            ])?;
            finish_csv(cli, w)
        }
    }
}

fn emit_checks(cli: &Cli, suite: &str, checks: &[CheckLine]) -> CliResult<()> {
    match cli.format.unwrap_or(Format::Csv) {
        Format::Json => emit_json(
            cli,
            &json!({
                "schema": SCHEMA,
                "suite": suite,
                "passed": checks.iter().all(|c| c.passed),
                "checks": checks,
            }),
        ),
        Format::Csv => {
            let mut w = csv_writer();
            w.write_record(["schema", SCHEMA, "verify"])?;
            w.write_record(["suite", "case", "check", "result", "detail", "claim"])?;
            for c in checks {
                w.write_record([
                    suite,
                    &c.case.to_string(),
                    &c.check,
                    if c.passed { "PASS" } else { "FAIL" },
                    &c.detail,
                    c.claim,
                ])?;
            }
            finish_csv(cli, w)
        }
    }
}

fn verify(cli: &Cli, args: &VerifyArgs) -> CliResult<()> {
    if !SUITES.contains(&args.suite.as_str()) {
        return Err(CliError::Usage(format!(
            "unknown suite {:?}; known suites: {}",
            args.suite,
            SUITES.join(", ")
        )));
    }
    let report = run_suite(
        &args.suite,
        &SuiteOptions {
            trials: args.trials,
            n: args.n,
            seed: cli.seed,
            big_n: args.big_n,
        },
    )?;
    emit_checks(cli, &report.suite, &report.checks)?;
    let failed = report.failures().count();
    eprintln!("{}: {}/{} checks passed", report.suite, report.checks.len() - failed, report.checks.len());
    if failed > 0 {
        return Err(CliError::Failed(format!("{failed} checks failed in {}", report.suite)));
    }
    Ok(())
}

fn gap(cli: &Cli, big_n: u32) -> CliResult<()> {
    let mut checks = gap_example(big_n)?;
    if let Some(trials) = cli.mc {
        if trials == 0 {
            return Err(CliError::Usage("--mc needs at least one trial".into()));
        }
        checks.push(gap_monte_carlo(big_n, trials, cli.seed)?);
    }
    emit_checks(cli, "gap-example", &checks)?;
    if checks.iter().any(|c| !c.passed) {
        return Err(CliError::Failed("gap instance checks failed".into()));
    }
    Ok(())
}

fn sweep(cli: &Cli, args: &SweepArgs) -> CliResult<()> {
    let (name, values) = args
        .param
        .split_once('=')
        .ok_or_else(|| CliError::Usage("--param must look like name=v1,v2,…".into()))?;
    let values: Vec<u64> = values
        .split(',')
        .map(|v| v.trim().parse::<u64>())
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Usage(format!("bad --param value: {e}")))?;
    if !["m", "n", "i", "t"].contains(&name) {
        return Err(CliError::Usage(format!("cannot sweep {name:?}; use m, n, i or t")));
    }
    let jobs: Vec<(usize, u64, usize)> = values
        .iter()
        .enumerate()
        .flat_map(|(g, &v)| (0..args.trials).map(move |trial| (g, v, trial)))
        .collect();
    let rows: Vec<Vec<String>> = jobs
        .par_iter()
        .map(|&(g, v, trial)| -> CliResult<Vec<String>> {
            let mut a = args.algo.clone();
            let (mut n, mut m) = (args.size, args.m);
            match name {
                "m" => m = v as u32,
                "n" => n = v as usize,
                "i" => a.i = v as usize,
                _ => a.t = v as u32,
            }
            if n == 0 || m == 0 {
                return Err(CliError::Usage("swept sizes must be positive".into()));
            }
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(cli.seed);
            rng.set_stream((g * args.trials + trial) as u64);
            let inst = gen::knapsack_instance(&mut rng, n, m, ObjectiveSpec::MinElement);
            let policy = build_policy(&inst, &a)?;
            let obj = Objective::from_instance(&inst);
            let x = sample_realization(&inst, cli.seed, trial as u64);
            let rep = execute(&*policy, &inst, &x, &obj)?;
            Ok(vec![
                name.to_string(),
                v.to_string(),
                trial.to_string(),
                n.to_string(),
                m.to_string(),
                rep.objective_value.to_string(),
                rep.ub_value.map(|u| u.to_string()).unwrap_or_default(),
                rep.call_log.len().to_string(),
                rep.feasible_set_count.to_string(),
                rational::to_f64(&rep.total_cost()).to_string(),
            ])
        })
        .collect::<CliResult<_>>()?;
    let header = ["param", "value", "trial", "n", "m", "objective", "ub", "calls", "feasible_set_count", "cost"];
    match cli.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut w = csv_writer();
            w.write_record(["schema", SCHEMA, "sweep"])?;
            w.write_record(header)?;
            for r in &rows {
                w.write_record(r)?;
            }
            finish_csv(cli, w)
        }
        Format::Json => {
            let rows: Vec<Value> = rows
                .iter()
                .map(|r| Value::Object(header.iter().zip(r).map(|(h, v)| (h.to_string(), json!(v))).collect()))
                .collect();
            emit_json(cli, &json!({"schema": SCHEMA, "command": "sweep", "rows": rows}))
        }
    }
}
