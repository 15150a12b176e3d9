//! `cloudsched` — run online algorithms, the offline oracle, the tentative
//! solver, instance generators and benchmark sweeps from the shell.
//!
//! Exit status: 0 ok, 1 infeasible result, 2 input error.
//! `SCHED_TIME_QUANTUM` (a positive rational such as `1/4`) makes every input
//! time a required multiple of that quantum.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand};
use cloudsched::algorithms::AlgorithmSpec;
use cloudsched::bench::{rows_to_csv, run_bench, BenchConfig};
use cloudsched::harness::{run_online, SimError};
use cloudsched::io::{instance_to_json, parse_instance, parse_quantum, parse_schedule, schedule_to_json};
use cloudsched::model::{Instance, Schedule};
use cloudsched::oracle::{best_witness, brute_force_opt, AdversaryParams, Family, OracleError, DEFAULT_ORACLE_LIMIT};
use cloudsched::rational::{format_fixed, format_q, Q};
use cloudsched::tentative::{generate_candidate_intervals, solve_exact, solve_firstfit, Restrictions, TentativeError};
use cloudsched::validate::{validate, ValidationReport};
use serde_json::json;

const QUANTUM_VAR: &str = "SCHED_TIME_QUANTUM";

#[derive(Parser)]
#[command(name = "cloudsched", version, about = "Online scheduling on rented cloud machines")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an online algorithm (`a1`, `greedyfit[:policy]`, `bd:<eps>`) on an instance.
    Run {
        instance: PathBuf,
        algorithm: String,
        /// Write the schedule here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print the full report as JSON.
        #[arg(long)]
        json: bool,
        /// Also compute the ratio against the oracle (or a witness above the oracle limit).
        #[arg(long)]
        ratio: bool,
    },
    /// Exact offline optimum of a small instance.
    Opt {
        instance: PathBuf,
        #[arg(long, default_value_t = DEFAULT_ORACLE_LIMIT)]
        limit: usize,
        /// Write the optimal schedule here.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Solve the tentative problem of one batch (same file format as an instance).
    Tentative {
        batch: PathBuf,
        /// Use the first-fit heuristic instead of branch and bound.
        #[arg(long)]
        firstfit: bool,
    },
    /// Generate an instance: `gen lb-mid epsilon=1/2 t=4`.
    Gen {
        family: Family,
        /// `key=value` overrides of the family preset.
        params: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a benchmark sweep described by a TOML file and print CSV.
    Bench {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Fill the `ms` column (makes output nondeterministic).
        #[arg(long)]
        timing: bool,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Check a schedule against an instance.
    Validate {
        instance: PathBuf,
        schedule: PathBuf,
        #[arg(long)]
        json: bool,
    },
}

/// Non-error outcome of a command.
enum Outcome {
    Ok,
    Infeasible,
}

/// An error meaning the run produced no usable result (exit 1). Every other
/// error is treated as bad input (exit 2).
#[derive(Debug)]
struct Failure(String);

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Failure {}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Infeasible) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<Failure>().is_some() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}

fn quantum() -> Result<Option<Q>> {
    match std::env::var(QUANTUM_VAR) {
        Ok(v) => Ok(Some(parse_quantum(&v).with_context(|| format!("${QUANTUM_VAR}"))?)),
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(anyhow!("${QUANTUM_VAR}: {e}")),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_instance(path: &Path) -> Result<Instance> {
    parse_instance(&read(path)?, quantum()?).with_context(|| format!("{}", path.display()))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

/// Writes the schedule, reads it back and validates what landed on disk.
fn write_schedule(path: &Path, schedule: &Schedule, instance: &Instance) -> Result<ValidationReport> {
    fs::write(path, schedule_to_json(schedule)).with_context(|| format!("writing {}", path.display()))?;
    let back = parse_schedule(&read(path)?, None)?;
    Ok(validate(&back, instance))
}

fn print_violations(report: &ValidationReport) {
    for v in &report.violations {
        println!("  {v}");
    }
}

fn dispatch(cmd: Command) -> Result<Outcome> {
    match cmd {
        Command::Run {
            instance,
            algorithm,
            out,
            json,
            ratio,
        } => cmd_run(&instance, &algorithm, out.as_deref(), json, ratio),
        Command::Opt {
            instance,
            limit,
            out,
            json,
        } => cmd_opt(&instance, limit, out.as_deref(), json),
        Command::Tentative { batch, firstfit } => cmd_tentative(&batch, firstfit),
        Command::Gen { family, params, out } => cmd_gen(family, &params, out.as_deref()),
        Command::Bench {
            config,
            out,
            timing,
            workers,
        } => cmd_bench(&config, out.as_deref(), timing, workers),
        Command::Validate {
            instance,
            schedule,
            json,
        } => cmd_validate(&instance, &schedule, json),
    }
}

fn cmd_run(path: &Path, algorithm: &str, out: Option<&Path>, as_json: bool, ratio: bool) -> Result<Outcome> {
    let instance = load_instance(path)?;
    let spec: AlgorithmSpec = algorithm.parse()?;
    let mut report = match run_online(spec.build().as_mut(), &instance) {
        Ok(r) => r,
        Err(e @ SimError::Parameter(_)) => return Err(e.into()),
        Err(e) => return Err(Failure(format!("{spec} failed: {e}")).into()),
    };
    let opt = if ratio {
        if instance.len() <= DEFAULT_ORACLE_LIMIT {
            brute_force_opt(&instance, DEFAULT_ORACLE_LIMIT).ok().map(|r| r.cost)
        } else {
            best_witness(&instance).map(|(c, _)| c)
        }
    } else {
        None
    };
    if let Some(o) = opt {
        let _ = report.attach_opt(o);
    }
    let mut feasible = report.is_feasible() && report.infeasible_jobs.is_empty();
    if let Some(p) = out {
        feasible &= write_schedule(p, &report.schedule, &instance)?.is_empty();
    }
    if as_json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        println!("algorithm: {}", report.algorithm);
        println!("cost: {}", format_q(&report.cost));
        println!("rentals: {}", report.schedule.rentals.len());
        if let (Some(o), Some(r)) = (opt, &report.ratio) {
            println!("reference: {}", format_q(&o));
            println!("ratio: {}", format_fixed(&r.0, 6));
        }
        for j in &report.infeasible_jobs {
            println!("infeasible job {}: {}", j.job, j.reason);
        }
        if report.validation.is_empty() {
            println!("validation: ok");
        } else {
            println!("validation: {} violation(s)", report.validation.violations.len());
            print_violations(&report.validation);
        }
        if let Some(p) = out {
            println!("schedule: {}", p.display());
        }
    }
    Ok(if feasible { Outcome::Ok } else { Outcome::Infeasible })
}

fn cmd_opt(path: &Path, limit: usize, out: Option<&Path>, as_json: bool) -> Result<Outcome> {
    let instance = load_instance(path)?;
    let res = match brute_force_opt(&instance, limit) {
        Ok(r) => r,
        Err(OracleError::Infeasible) => {
            eprintln!("no feasible schedule exists");
            return Ok(Outcome::Infeasible);
        }
        Err(e) => return Err(e.into()),
    };
    if let Some(p) = out {
        let rep = write_schedule(p, &res.schedule, &instance)?;
        if !rep.is_empty() {
            return Err(Failure(format!("oracle schedule does not validate: {}", rep.violations[0])).into());
        }
    }
    if as_json {
        println!("{}", serde_json::to_string_pretty(&res)?);
    } else {
        println!("cost: {}", format_q(&res.cost));
        println!("rentals: {}", res.schedule.rentals.len());
        println!("partitions examined: {}", res.partitions_examined);
        println!("orders examined: {}", res.orders_examined);
        if let Some(p) = out {
            println!("schedule: {}", p.display());
        }
    }
    Ok(Outcome::Ok)
}

fn cmd_tentative(path: &Path, firstfit: bool) -> Result<Outcome> {
    let instance = load_instance(path)?;
    let problem = match generate_candidate_intervals(instance.jobs(), instance.params(), &Restrictions::new()) {
        Ok(p) => p,
        Err(TentativeError::Infeasible(job)) => {
            eprintln!("job {job} has no candidate interval");
            return Ok(Outcome::Infeasible);
        }
        Err(e) => return Err(e.into()),
    };
    let sol = if firstfit {
        solve_firstfit(&problem)
    } else {
        solve_exact(&problem)
    };
    let intervals: Vec<_> = sol.chosen(&problem).collect();
    let slots: serde_json::Map<String, serde_json::Value> =
        sol.z_slots.iter().map(|(k, v)| (format!("A{k}"), json!(v))).collect();
    let doc = json!({
        "solver": if firstfit { "firstfit" } else { "exact" },
        "objective": format_q(&sol.objective),
        "machines": { "B": sol.z_b, "A": slots },
        "candidates": problem.candidate_count(),
        "nodes": sol.nodes,
        "intervals": intervals,
    });
    println!("{}", serde_json::to_string_pretty(&doc)?);
    Ok(Outcome::Ok)
}

fn cmd_gen(family: Family, params: &[String], out: Option<&Path>) -> Result<Outcome> {
    let mut p = AdversaryParams::preset(family);
    for kv in params {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| anyhow!("expected key=value, got {kv:?}"))?;
        p.set(k.trim(), v.trim())?;
    }
    let instance = p.generate()?;
    emit(out, &instance_to_json(&instance))?;
    Ok(Outcome::Ok)
}

fn cmd_bench(path: &Path, out: Option<&Path>, timing: bool, workers: Option<usize>) -> Result<Outcome> {
    let mut cfg = BenchConfig::from_toml(&read(path)?).with_context(|| format!("{}", path.display()))?;
    cfg.timing |= timing;
    if workers.is_some() {
        cfg.workers = workers;
    }
    let rows = run_bench(&cfg)?;
    let csv = rows_to_csv(&rows)?;
    match out {
        Some(p) => fs::write(p, csv).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{csv}"),
    }
    Ok(Outcome::Ok)
}

fn cmd_validate(instance: &Path, schedule: &Path, as_json: bool) -> Result<Outcome> {
    let inst = load_instance(instance)?;
    let sched = parse_schedule(&read(schedule)?, quantum()?).with_context(|| format!("{}", schedule.display()))?;
    let report = validate(&sched, &inst);
    if as_json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else if report.is_empty() {
        println!(
            "feasible, cost {}",
            format_q(&cloudsched::total_cost(&sched, inst.params()))
        );
    } else {
        println!("{} violation(s)", report.violations.len());
        print_violations(&report);
    }
    Ok(if report.is_empty() {
        Outcome::Ok
    } else {
        Outcome::Infeasible
    })
}
