//! Benchmark sweeps: generate instances, run algorithms, compare with the
//! oracle (or a witness when the instance is too large), emit CSV.
//!
//! ```toml
//! workers = 4
//! oracle_limit = 8
//!
//! [[sweep]]
//! name = "lb-mid"
//! family = "lb-mid"
//! algorithms = ["a1", "greedyfit", "bd:1"]
//! params = { s = 4, c = 1, t = 4, delta = "1/8" }
//! vary = { epsilon = ["1", "1/2", "1/4"] }
//! ```
//!
//! `vary` takes the cartesian product of its lists (keys in alphabetical
//! order). Rows come out in sweep, instance, algorithm order whatever the
//! worker count, and the `ms` column stays empty unless `timing = true`, so
//! reruns are byte-identical.

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algorithms::AlgorithmSpec;
use crate::harness::run_online;
use crate::model::{min_slack, Instance};
use crate::oracle::{best_witness, brute_force_opt, AdversaryParams, Family, GenError, DEFAULT_ORACLE_LIMIT};
use crate::rational::{format_fixed, format_q, Q};

pub const CSV_HEADER: [&str; 10] = [
    "instance", "algo", "epsilon", "beta", "n", "cost", "opt", "ratio", "feasible", "ms",
];

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("bench config: {0}")]
    Config(String),
    #[error("sweep {sweep}: {source}")]
    Generator { sweep: String, source: GenError },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchConfig {
    #[serde(default)]
    pub workers: Option<usize>,
    #[serde(default = "default_limit")]
    pub oracle_limit: usize,
    #[serde(default)]
    pub timing: bool,
    #[serde(default)]
    pub sweep: Vec<Sweep>,
}

fn default_limit() -> usize {
    DEFAULT_ORACLE_LIMIT
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub name: String,
    pub family: Family,
    pub algorithms: Vec<String>,
    #[serde(default)]
    pub params: BTreeMap<String, toml::Value>,
    #[serde(default)]
    pub vary: BTreeMap<String, Vec<toml::Value>>,
}

impl BenchConfig {
    pub fn from_toml(text: &str) -> Result<Self, BenchError> {
        toml::from_str(text).map_err(|e| BenchError::Config(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BenchRow {
    pub instance: String,
    pub algo: String,
    pub epsilon: Option<String>,
    pub beta: String,
    pub n: usize,
    pub cost: Option<String>,
    pub opt: Option<String>,
    pub ratio: Option<String>,
    pub feasible: bool,
    pub ms: Option<String>,
}

fn value_text(v: &toml::Value) -> String {
    match v {
        toml::Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

struct Job {
    id: String,
    instance: Instance,
    family_epsilon: Option<Q>,
    algorithms: Vec<AlgorithmSpec>,
}

fn expand(sweep: &Sweep) -> Result<Vec<Job>, BenchError> {
    let gen_err = |source| BenchError::Generator {
        sweep: sweep.name.clone(),
        source,
    };
    let algorithms = sweep
        .algorithms
        .iter()
        .map(|a| {
            a.parse()
                .map_err(|e| BenchError::Config(format!("sweep {}: {e}", sweep.name)))
        })
        .collect::<Result<Vec<AlgorithmSpec>, _>>()?;
    let mut base = AdversaryParams::preset(sweep.family);
    for (k, v) in &sweep.params {
        base.set(k, &value_text(v)).map_err(gen_err)?;
    }

    let mut combos: Vec<Vec<(String, String)>> = vec![Vec::new()];
    for (k, values) in &sweep.vary {
        combos = combos
            .into_iter()
            .flat_map(|c| {
                values.iter().map(move |v| {
                    let mut c = c.clone();
                    c.push((k.clone(), value_text(v)));
                    c
                })
            })
            .collect();
    }

    combos
        .into_iter()
        .map(|combo| {
            let mut p = base.clone();
            for (k, v) in &combo {
                p.set(k, v).map_err(gen_err)?;
            }
            let instance = p.generate().map_err(gen_err)?;
            let mut id = sweep.name.clone();
            if !combo.is_empty() {
                let parts: Vec<String> = combo.iter().map(|(k, v)| format!("{k}={v}")).collect();
                id = format!("{id}/{}", parts.join(";"));
            }
            let family_epsilon =
                matches!(p.family, Family::LbMid | Family::LbSmallA | Family::LbSmallB).then_some(p.epsilon);
            Ok(Job {
                id,
                instance,
                family_epsilon,
                algorithms: algorithms.clone(),
            })
        })
        .collect()
}

fn reference_cost(instance: &Instance, limit: usize) -> Option<Q> {
    if instance.len() <= limit {
        brute_force_opt(instance, limit).ok().map(|r| r.cost)
    } else {
        best_witness(instance).map(|(c, _)| c)
    }
}

fn rows_for(job: &Job, config: &BenchConfig) -> Vec<BenchRow> {
    let opt = reference_cost(&job.instance, config.oracle_limit);
    let beta = min_slack(&job.instance).map(|b| format_q(&b)).unwrap_or_default();
    job.algorithms
        .iter()
        .map(|spec| {
            let started = Instant::now();
            let report = run_online(spec.build().as_mut(), &job.instance);
            let ms = config
                .timing
                .then(|| format!("{:.3}", started.elapsed().as_secs_f64() * 1000.0));
            let (cost, feasible) = match &report {
                Ok(r) => (Some(r.cost), r.is_feasible()),
                Err(_) => (None, false),
            };
            let ratio = match (cost, opt) {
                (Some(c), Some(o)) if o > Q::from_integer(0) => Some(format_fixed(&(c / o), 6)),
                _ => None,
            };
            BenchRow {
                instance: job.id.clone(),
                algo: spec.to_string(),
                epsilon: spec.epsilon().or(job.family_epsilon).map(|e| format_q(&e)),
                beta: beta.clone(),
                n: job.instance.len(),
                cost: cost.map(|c| format_q(&c)),
                opt: opt.map(|o| format_q(&o)),
                ratio,
                feasible,
                ms,
            }
        })
        .collect()
}

/// Runs every sweep; rows in deterministic order.
pub fn run_bench(config: &BenchConfig) -> Result<Vec<BenchRow>, BenchError> {
    let mut jobs = Vec::new();
    for sweep in &config.sweep {
        jobs.extend(expand(sweep)?);
    }
    let work = || -> Vec<BenchRow> { jobs.par_iter().flat_map_iter(|j| rows_for(j, config)).collect() };
    match config.workers {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| BenchError::Config(e.to_string()))?;
            Ok(pool.install(work))
        }
        None => Ok(work()),
    }
}

pub fn rows_to_csv(rows: &[BenchRow]) -> Result<String, BenchError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            r.instance.as_str(),
            r.algo.as_str(),
            r.epsilon.as_deref().unwrap_or(""),
            r.beta.as_str(),
            &r.n.to_string(),
            r.cost.as_deref().unwrap_or(""),
            r.opt.as_deref().unwrap_or(""),
            r.ratio.as_deref().unwrap_or(""),
            if r.feasible { "true" } else { "false" },
            r.ms.as_deref().unwrap_or(""),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| BenchError::Config(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}
