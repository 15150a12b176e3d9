//! JSON files for instances and schedules.
//!
//! ```json
//! {
//!   "params": { "s_A": "1", "s_B": "4", "c": "2" },
//!   "jobs": [ { "id": "j0", "release": "0", "deadline": "12", "p_A": "3", "p_B": "1" } ]
//! }
//! ```
//!
//! Times may be strings (`"3/2"`, `"0.25"`) or plain JSON numbers. With a
//! time quantum `q`, every time and duration must be an integer multiple of
//! `q`; anything else is rejected instead of rounded.

use serde::{Deserialize, Serialize};

use crate::model::{Instance, Job, MachineParams, ModelError, Schedule};
use crate::rational::{format_q, parse_q, serde_q, Q};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IoError {
    #[error("{path}: {message} at line {line} column {column}")]
    Json {
        path: String,
        message: String,
        line: usize,
        column: usize,
    },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("{field} = {value} is not a multiple of the time quantum {quantum}")]
    OffQuantum {
        field: String,
        value: String,
        quantum: String,
    },
    #[error("invalid time quantum {0:?}: must be a positive rational")]
    BadQuantum(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsFile {
    #[serde(rename = "s_A", with = "serde_q")]
    pub setup_a: Q,
    #[serde(rename = "s_B", with = "serde_q")]
    pub setup_b: Q,
    #[serde(with = "serde_q")]
    pub c: Q,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub params: ParamsFile,
    pub jobs: Vec<Job>,
}

impl From<&Instance> for InstanceFile {
    fn from(i: &Instance) -> Self {
        let p = i.params();
        Self {
            params: ParamsFile {
                setup_a: p.setup_a(),
                setup_b: p.setup_b(),
                c: p.cost_b(),
            },
            jobs: i.jobs().to_vec(),
        }
    }
}

/// Parses `SCHED_TIME_QUANTUM`-style text: a positive rational.
pub fn parse_quantum(text: &str) -> Result<Q, IoError> {
    match parse_q(text.trim()) {
        Ok(q) if q > Q::from_integer(0) => Ok(q),
        _ => Err(IoError::BadQuantum(text.into())),
    }
}

fn on_quantum(field: impl FnOnce() -> String, value: Q, quantum: Option<Q>) -> Result<(), IoError> {
    match quantum {
        Some(q) if !(value / q).is_integer() => Err(IoError::OffQuantum {
            field: field(),
            value: format_q(&value),
            quantum: format_q(&q),
        }),
        _ => Ok(()),
    }
}

fn from_json<'de, T: Deserialize<'de>>(text: &'de str) -> Result<T, IoError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        let mut message = inner.to_string();
        let suffix = format!(" at line {} column {}", inner.line(), inner.column());
        if let Some(stripped) = message.strip_suffix(&suffix) {
            message = stripped.to_string();
        }
        IoError::Json {
            path,
            message,
            line: inner.line(),
            column: inner.column(),
        }
    })
}

pub fn parse_instance(text: &str, quantum: Option<Q>) -> Result<Instance, IoError> {
    let file: InstanceFile = from_json(text)?;
    let p = &file.params;
    for (name, v) in [("params.s_A", p.setup_a), ("params.s_B", p.setup_b)] {
        on_quantum(|| name.into(), v, quantum)?;
    }
    for (k, j) in file.jobs.iter().enumerate() {
        for (name, v) in [
            ("release", j.release),
            ("deadline", j.deadline),
            ("p_A", j.size_a),
            ("p_B", j.size_b),
        ] {
            on_quantum(|| format!("jobs[{k}].{name}"), v, quantum)?;
        }
    }
    let params = MachineParams::new(p.setup_a, p.setup_b, p.c)?;
    Ok(Instance::new(params, file.jobs)?)
}

pub fn parse_schedule(text: &str, quantum: Option<Q>) -> Result<Schedule, IoError> {
    let s: Schedule = from_json(text)?;
    for (k, r) in s.rentals.iter().enumerate() {
        on_quantum(|| format!("rentals[{k}].open"), r.open_at, quantum)?;
        on_quantum(|| format!("rentals[{k}].close"), r.close_at, quantum)?;
    }
    for (k, a) in s.assignments.iter().enumerate() {
        on_quantum(|| format!("assignments[{k}].start"), a.start, quantum)?;
    }
    Ok(s)
}

pub fn instance_to_json(instance: &Instance) -> String {
    serde_json::to_string_pretty(&InstanceFile::from(instance)).expect("instance serializes")
}

pub fn schedule_to_json(schedule: &Schedule) -> String {
    serde_json::to_string_pretty(schedule).expect("schedule serializes")
}
