//! Tentative schedules: setups cost money but take no time.
//!
//! A tentative schedule assigns every job of a batch to a processing interval
//! that finishes at least `s_B` before the job's deadline. Machines are
//! modelled in two ways:
//!
//! * a job that is *big* on a type (`p_τ >= s_τ`) runs on an exclusive machine
//!   and only its processing cost `c_τ p_τ` is charged;
//! * *small* jobs share pooled machines, each open for five setup lengths.
//!   There is one pool of `B` machines and one pool of `A` machines per
//!   `A`-interval ("slot") of release times. A pool with `z` machines costs
//!   `5 c_τ s_τ z`, and `z` must cover the number of chosen intervals that
//!   overlap at every left endpoint of a candidate in the pool.
//!
//! [`generate_candidate_intervals`] builds the finite candidate sets,
//! [`solve_exact`] finds the optimum over them by branch and bound and
//! [`solve_firstfit`] is the cheap fallback for larger batches.

mod candidates;
mod solve;

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::model::{Job, JobId, MachineParams, MachineType};
use crate::rational::{format_q, serde_q, Q};

pub use candidates::{generate_candidate_intervals, POOL_SPAN};
pub use solve::{evaluate, solve_exact, solve_firstfit};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TentativeError {
    #[error("setup of B ({setup_b}) must be an integer multiple of setup of A ({setup_a})")]
    SetupRatio { setup_a: String, setup_b: String },
    #[error("batch releases span more than one B-interval")]
    SpansBIntervals,
    #[error("infeasible tentative problem: job {0} has no candidate interval")]
    Infeasible(JobId),
}

/// Number of `A` slots per `B`-interval, `s_B / s_A`, or an error when that is
/// not an integer.
pub fn slots_per_b_interval(params: &MachineParams) -> Result<u32, TentativeError> {
    let ratio = params.setup_b() / params.setup_a();
    if !ratio.is_integer() {
        return Err(TentativeError::SetupRatio {
            setup_a: format_q(&params.setup_a()),
            setup_b: format_q(&params.setup_b()),
        });
    }
    Ok(ratio.to_integer() as u32)
}

/// Size of a job relative to the setup times.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum SizeClass {
    /// `p_A >= s_A` and `p_B >= s_B`.
    BigBoth,
    /// `p_A < s_A` and `p_B < s_B`.
    SmallBoth,
    /// `p_A >= s_A` and `p_B < s_B`.
    MixedA,
    /// `p_A < s_A` and `p_B >= s_B`.
    MixedB,
}

pub fn size_classify(job: &Job, params: &MachineParams) -> SizeClass {
    let big_a = job.size_a >= params.setup_a();
    let big_b = job.size_b >= params.setup_b();
    match (big_a, big_b) {
        (true, true) => SizeClass::BigBoth,
        (false, false) => SizeClass::SmallBoth,
        (true, false) => SizeClass::MixedA,
        (false, true) => SizeClass::MixedB,
    }
}

/// A pool of interchangeable non-exclusive machines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Pool {
    B,
    /// `A` machines serving jobs released in the `i`-th `A`-interval of the
    /// batch's `B`-interval, `i` starting at 1.
    ASlot(u32),
}

impl Pool {
    pub fn machine_type(self) -> MachineType {
        match self {
            Pool::B => MachineType::B,
            Pool::ASlot(_) => MachineType::A,
        }
    }
}

impl fmt::Display for Pool {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Pool::B => f.write_str("B"),
            Pool::ASlot(i) => write!(f, "A{i}"),
        }
    }
}

/// One way to process a job: `[start, end]` on a machine of `machine_type`.
///
/// `pool` is `None` for exclusive intervals. `cost` is the fixed cost the
/// interval contributes on its own: `c_τ p_τ` for an exclusive interval of a
/// big job, `c_τ (s_τ + p_τ)` for the exclusive fallback of a small job, and 0
/// for pooled intervals (their machines are paid through the pool size).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CandidateInterval {
    pub job_id: JobId,
    pub machine_type: MachineType,
    #[serde(with = "serde_q")]
    pub start: Q,
    #[serde(with = "serde_q")]
    pub end: Q,
    pub exclusive: bool,
    pub pool: Option<Pool>,
    #[serde(with = "serde_q")]
    pub cost: Q,
}

/// Per-job limits imposed by the caller.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JobRestriction {
    pub allow_a: bool,
    pub allow_b: bool,
    pub earliest_start_a: Option<Q>,
    pub earliest_start_b: Option<Q>,
}

impl Default for JobRestriction {
    fn default() -> Self {
        Self {
            allow_a: true,
            allow_b: true,
            earliest_start_a: None,
            earliest_start_b: None,
        }
    }
}

impl JobRestriction {
    pub fn allows(&self, ty: MachineType) -> bool {
        match ty {
            MachineType::A => self.allow_a,
            MachineType::B => self.allow_b,
        }
    }

    pub fn earliest_start(&self, ty: MachineType) -> Option<Q> {
        match ty {
            MachineType::A => self.earliest_start_a,
            MachineType::B => self.earliest_start_b,
        }
    }

    /// Only `ty` allowed.
    pub fn only(ty: MachineType) -> Self {
        Self {
            allow_a: ty == MachineType::A,
            allow_b: ty == MachineType::B,
            ..Self::default()
        }
    }

    /// Every start on every type at or after `t`.
    pub fn not_before(mut self, t: Q) -> Self {
        self.earliest_start_a = Some(t);
        self.earliest_start_b = Some(t);
        self
    }
}

pub type Restrictions = BTreeMap<JobId, JobRestriction>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TentativeProblem {
    pub params: MachineParams,
    /// Batch jobs in id order; `candidates[k]` belongs to `jobs[k]`.
    pub jobs: Vec<Job>,
    pub candidates: Vec<Vec<CandidateInterval>>,
    /// Left endpoints of all pooled `B` candidates, sorted.
    pub l_b: Vec<Q>,
    /// Left endpoints of pooled `A` candidates per slot, sorted.
    pub l_slots: BTreeMap<u32, Vec<Q>>,
}

impl TentativeProblem {
    pub fn empty(params: MachineParams) -> Self {
        Self {
            params,
            jobs: Vec::new(),
            candidates: Vec::new(),
            l_b: Vec::new(),
            l_slots: BTreeMap::new(),
        }
    }

    pub fn candidate_count(&self) -> usize {
        self.candidates.iter().map(Vec::len).sum()
    }

    /// Cost of one machine of the pool, open for five setup lengths.
    pub fn pool_unit_cost(&self, pool: Pool) -> Q {
        let ty = pool.machine_type();
        Q::from_integer(5) * self.params.cost(ty) * self.params.setup(ty)
    }

    /// Constraint points of the pool.
    pub fn points(&self, pool: Pool) -> &[Q] {
        match pool {
            Pool::B => &self.l_b,
            Pool::ASlot(i) => self.l_slots.get(&i).map(Vec::as_slice).unwrap_or(&[]),
        }
    }

    pub fn pools(&self) -> Vec<Pool> {
        let mut out = vec![Pool::B];
        out.extend(self.l_slots.keys().map(|&i| Pool::ASlot(i)));
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TentativeSolution {
    /// Index into `problem.candidates[k]` for every job `k`.
    pub choice: Vec<usize>,
    pub z_b: u32,
    pub z_slots: BTreeMap<u32, u32>,
    pub objective: Q,
    /// Search nodes visited (1 for first-fit).
    pub nodes: u64,
}

impl TentativeSolution {
    pub fn chosen<'p>(&'p self, problem: &'p TentativeProblem) -> impl Iterator<Item = &'p CandidateInterval> + 'p {
        self.choice
            .iter()
            .enumerate()
            .map(move |(k, &c)| &problem.candidates[k][c])
    }
}
