//! Problem data: machine types, jobs, instances and schedules.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::rational::{format_q, serde_q, Q};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("invalid machine parameters: {0}")]
    InvalidParams(String),
    #[error("invalid job `{id}`: {reason}")]
    InvalidJob { id: JobId, reason: String },
    #[error("duplicate job id `{0}`")]
    DuplicateJobId(JobId),
    #[error("empty instance")]
    EmptyInstance,
    #[error("rental shorter than setup (rental {0})")]
    RentalShorterThanSetup(RentalId),
}

/// The two rentable machine types. Type `A` has unit cost rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum MachineType {
    A,
    B,
}

impl MachineType {
    pub const ALL: [MachineType; 2] = [MachineType::A, MachineType::B];

    pub fn other(self) -> MachineType {
        match self {
            MachineType::A => MachineType::B,
            MachineType::B => MachineType::A,
        }
    }
}

impl fmt::Display for MachineType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MachineType::A => "A",
            MachineType::B => "B",
        })
    }
}

/// Setup times and cost rates of the two machine types.
///
/// `A` always costs 1 per time unit; `B` costs `cost_b >= 1`. Setup of `B` is
/// at least as long as setup of `A`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MachineParams {
    setup_a: Q,
    setup_b: Q,
    cost_b: Q,
}

impl MachineParams {
    pub fn new(setup_a: Q, setup_b: Q, cost_b: Q) -> Result<Self, ModelError> {
        if !setup_a.is_positive() {
            return Err(ModelError::InvalidParams(format!(
                "setup of A must be positive, got {}",
                format_q(&setup_a)
            )));
        }
        if setup_b < setup_a {
            return Err(ModelError::InvalidParams(format!(
                "setup of B ({}) must be at least setup of A ({})",
                format_q(&setup_b),
                format_q(&setup_a)
            )));
        }
        if cost_b < Q::one() {
            return Err(ModelError::InvalidParams(format!(
                "cost rate of B must be at least 1, got {}",
                format_q(&cost_b)
            )));
        }
        Ok(Self {
            setup_a,
            setup_b,
            cost_b,
        })
    }

    pub fn setup_a(&self) -> Q {
        self.setup_a
    }

    pub fn setup_b(&self) -> Q {
        self.setup_b
    }

    /// Cost rate of type `B` (the `c` of the model).
    pub fn cost_b(&self) -> Q {
        self.cost_b
    }

    pub fn setup(&self, ty: MachineType) -> Q {
        match ty {
            MachineType::A => self.setup_a,
            MachineType::B => self.setup_b,
        }
    }

    pub fn cost(&self, ty: MachineType) -> Q {
        match ty {
            MachineType::A => Q::one(),
            MachineType::B => self.cost_b,
        }
    }

    /// Cost of an exclusive machine of type `ty` for a job of the given size.
    pub fn exclusive_cost(&self, ty: MachineType, size: Q) -> Q {
        self.cost(ty) * (self.setup(ty) + size)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct JobId(pub String);

impl fmt::Display for JobId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for JobId {
    fn from(s: &str) -> Self {
        JobId(s.to_string())
    }
}

impl From<String> for JobId {
    fn from(s: String) -> Self {
        JobId(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Job {
    pub id: JobId,
    #[serde(with = "serde_q")]
    pub release: Q,
    #[serde(with = "serde_q")]
    pub deadline: Q,
    #[serde(rename = "p_A", with = "serde_q")]
    pub size_a: Q,
    #[serde(rename = "p_B", with = "serde_q")]
    pub size_b: Q,
}

impl Job {
    pub fn new(id: impl Into<JobId>, release: Q, deadline: Q, size_a: Q, size_b: Q) -> Result<Self, ModelError> {
        let job = Job {
            id: id.into(),
            release,
            deadline,
            size_a,
            size_b,
        };
        job.check()?;
        Ok(job)
    }

    fn check(&self) -> Result<(), ModelError> {
        let bad = |reason: String| ModelError::InvalidJob {
            id: self.id.clone(),
            reason,
        };
        if self.release.is_negative() {
            return Err(bad("release must be non-negative".into()));
        }
        if self.deadline <= self.release {
            return Err(bad("deadline must be after release".into()));
        }
        if self.size_a < Q::one() || self.size_b < Q::one() {
            return Err(bad("sizes must be at least 1".into()));
        }
        Ok(())
    }

    pub fn size(&self, ty: MachineType) -> Q {
        match ty {
            MachineType::A => self.size_a,
            MachineType::B => self.size_b,
        }
    }

    /// `d_j - r_j - p_{j,ty}`; negative when the job cannot run on `ty` at all.
    pub fn slack(&self, ty: MachineType) -> Q {
        slack(self, ty)
    }

    pub fn max_slack(&self) -> Q {
        self.slack(MachineType::A).max(self.slack(MachineType::B))
    }
}

/// How far `job` can be shifted inside its window on a machine of type `ty`.
pub fn slack(job: &Job, ty: MachineType) -> Q {
    job.deadline - job.release - job.size(ty)
}

/// Minimum over jobs of the larger of the two per-type slacks.
pub fn min_slack(instance: &Instance) -> Result<Q, ModelError> {
    instance
        .jobs()
        .iter()
        .map(Job::max_slack)
        .min()
        .ok_or(ModelError::EmptyInstance)
}

/// Machine parameters plus jobs in canonical order (release, then id).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    params: MachineParams,
    jobs: Vec<Job>,
    index: BTreeMap<JobId, usize>,
}

impl Instance {
    pub fn new(params: MachineParams, mut jobs: Vec<Job>) -> Result<Self, ModelError> {
        for job in &jobs {
            job.check()?;
        }
        jobs.sort_by(|a, b| a.release.cmp(&b.release).then_with(|| a.id.cmp(&b.id)));
        let mut index = BTreeMap::new();
        for (i, job) in jobs.iter().enumerate() {
            if index.insert(job.id.clone(), i).is_some() {
                return Err(ModelError::DuplicateJobId(job.id.clone()));
            }
        }
        Ok(Self { params, jobs, index })
    }

    pub fn params(&self) -> &MachineParams {
        &self.params
    }

    pub fn jobs(&self) -> &[Job] {
        &self.jobs
    }

    pub fn job(&self, id: &JobId) -> Option<&Job> {
        self.index.get(id).map(|&i| &self.jobs[i])
    }

    pub fn len(&self) -> usize {
        self.jobs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.jobs.is_empty()
    }

    /// Same jobs under different machine parameters.
    pub fn with_params(&self, params: MachineParams) -> Instance {
        Instance {
            params,
            jobs: self.jobs.clone(),
            index: self.index.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RentalId(pub u32);

impl fmt::Display for RentalId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "M{}", self.0)
    }
}

/// One rented machine, open on `[open_at, close_at]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rental {
    pub id: RentalId,
    #[serde(rename = "type")]
    pub machine_type: MachineType,
    #[serde(rename = "open", with = "serde_q")]
    pub open_at: Q,
    #[serde(rename = "close", with = "serde_q")]
    pub close_at: Q,
}

impl Rental {
    /// First instant at which the machine can process, `open_at + s_type`.
    pub fn ready_at(&self, params: &MachineParams) -> Q {
        self.open_at + params.setup(self.machine_type)
    }
}

/// Job `job_id` runs on `rental_id` during `[start, start + p]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Assignment {
    #[serde(rename = "job")]
    pub job_id: JobId,
    #[serde(rename = "rental")]
    pub rental_id: RentalId,
    #[serde(with = "serde_q")]
    pub start: Q,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schedule {
    pub rentals: Vec<Rental>,
    pub assignments: Vec<Assignment>,
}

impl Schedule {
    pub fn rental(&self, id: RentalId) -> Option<&Rental> {
        self.rentals.iter().find(|r| r.id == id)
    }

    pub fn is_empty(&self) -> bool {
        self.rentals.is_empty() && self.assignments.is_empty()
    }

    /// Next unused rental id.
    pub fn next_rental_id(&self) -> RentalId {
        RentalId(self.rentals.iter().map(|r| r.id.0 + 1).max().unwrap_or(0))
    }
}
