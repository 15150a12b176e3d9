//! Deterministic discrete-event simulation of the online setting.
//!
//! The harness replays job releases in time order and delivers wake-ups that
//! the algorithm requested. Algorithms never see the instance directly: they
//! learn about jobs through [`EventKind::JobsReleased`] and act through the
//! [`Dispatcher`], which rejects anything that would rewrite the past.
//!
//! At equal times, releases are delivered before wake-ups.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::cost::total_cost;
use crate::model::{Assignment, Instance, Job, JobId, MachineParams, MachineType, Rental, RentalId, Schedule};
use crate::rational::{format_q, Num, Q};
use crate::validate::{validate, ValidationReport, Violation};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SimError {
    #[error("causality violation: {action} at time {at} is before current time {now}")]
    Causality {
        action: &'static str,
        at: String,
        now: String,
    },
    #[error("unknown rental {0}")]
    UnknownRental(RentalId),
    #[error("rental {0} is already closed")]
    ClosedRental(RentalId),
    #[error("job {job} would start at {start} on rental {rental} before its setup completes at {ready}")]
    BeforeSetup {
        job: JobId,
        rental: RentalId,
        start: String,
        ready: String,
    },
    #[error("rental {rental} cannot close at {at}: it must stay open until {until}")]
    EarlyClose {
        rental: RentalId,
        at: String,
        until: String,
    },
    #[error("rental {0} was never closed")]
    UnclosedRental(RentalId),
    #[error("invalid algorithm parameters: {0}")]
    Parameter(String),
    #[error("{0}")]
    Algorithm(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EventKind {
    JobsReleased(Vec<Job>),
    WakeUp(u64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OnlineEvent {
    pub time: Q,
    pub kind: EventKind,
}

/// Every call an algorithm makes on the [`Dispatcher`], in order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "action", rename_all = "snake_case")]
pub enum AlgorithmAction {
    OpenMachine {
        rental: RentalId,
        machine_type: MachineType,
        at: Num,
    },
    CloseMachine {
        rental: RentalId,
        at: Num,
    },
    AssignJob {
        job: JobId,
        rental: RentalId,
        start: Num,
    },
    RequestWakeUp {
        at: Num,
        tag: u64,
    },
    DeclareInfeasible {
        job: JobId,
        reason: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceEntry {
    pub now: Num,
    #[serde(flatten)]
    pub action: AlgorithmAction,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InfeasibleJob {
    pub job: JobId,
    pub reason: String,
}

/// What the dispatcher knows about one rental during a run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RentalState {
    pub id: RentalId,
    pub machine_type: MachineType,
    pub open_at: Q,
    pub ready_at: Q,
    pub close_at: Option<Q>,
    /// Completion time of the latest committed job, or `ready_at` if none.
    pub busy_until: Q,
    pub jobs: usize,
}

impl RentalState {
    pub fn is_closed(&self) -> bool {
        self.close_at.is_some()
    }
}

/// The only channel through which an online algorithm acts.
pub struct Dispatcher<'a> {
    params: &'a MachineParams,
    now: Q,
    released: BTreeMap<JobId, Job>,
    rentals: Vec<RentalState>,
    assignments: Vec<Assignment>,
    wakeups: Vec<(Q, u64)>,
    trace: Vec<TraceEntry>,
    rejected: Vec<Violation>,
    infeasible: Vec<InfeasibleJob>,
}

impl<'a> Dispatcher<'a> {
    fn new(params: &'a MachineParams) -> Self {
        Self {
            params,
            now: Q::zero(),
            released: BTreeMap::new(),
            rentals: Vec::new(),
            assignments: Vec::new(),
            wakeups: Vec::new(),
            trace: Vec::new(),
            rejected: Vec::new(),
            infeasible: Vec::new(),
        }
    }

    pub fn now(&self) -> Q {
        self.now
    }

    pub fn params(&self) -> &MachineParams {
        self.params
    }

    /// A job released so far.
    pub fn job(&self, id: &JobId) -> Option<&Job> {
        self.released.get(id)
    }

    pub fn rental(&self, id: RentalId) -> Option<&RentalState> {
        self.rentals.get(id.0 as usize)
    }

    /// Rentals not yet closed, in id order.
    pub fn open_rentals(&self) -> impl Iterator<Item = &RentalState> {
        self.rentals.iter().filter(|r| !r.is_closed())
    }

    pub fn rentals(&self) -> &[RentalState] {
        &self.rentals
    }

    fn not_before_now(&self, action: &'static str, at: Q) -> Result<(), SimError> {
        if at < self.now {
            return Err(SimError::Causality {
                action,
                at: format_q(&at),
                now: format_q(&self.now),
            });
        }
        Ok(())
    }

    fn log(&mut self, action: AlgorithmAction) {
        self.trace.push(TraceEntry {
            now: Num(self.now),
            action,
        });
    }

    pub fn open(&mut self, machine_type: MachineType, at: Q) -> Result<RentalId, SimError> {
        self.not_before_now("open", at)?;
        let id = RentalId(self.rentals.len() as u32);
        let ready_at = at + self.params.setup(machine_type);
        self.rentals.push(RentalState {
            id,
            machine_type,
            open_at: at,
            ready_at,
            close_at: None,
            busy_until: ready_at,
            jobs: 0,
        });
        self.log(AlgorithmAction::OpenMachine {
            rental: id,
            machine_type,
            at: Num(at),
        });
        Ok(id)
    }

    pub fn close(&mut self, rental: RentalId, at: Q) -> Result<(), SimError> {
        self.not_before_now("close", at)?;
        let state = self
            .rentals
            .get_mut(rental.0 as usize)
            .ok_or(SimError::UnknownRental(rental))?;
        if state.is_closed() {
            return Err(SimError::ClosedRental(rental));
        }
        if at < state.busy_until {
            return Err(SimError::EarlyClose {
                rental,
                at: format_q(&at),
                until: format_q(&state.busy_until),
            });
        }
        state.close_at = Some(at);
        self.log(AlgorithmAction::CloseMachine { rental, at: Num(at) });
        Ok(())
    }

    /// Commits `job` to run on `rental` from `start`. Irrevocable.
    ///
    /// A reference to a job that has not been released is not an error: it is
    /// recorded as a violation in the final report and otherwise ignored.
    pub fn assign(&mut self, job: &JobId, rental: RentalId, start: Q) -> Result<(), SimError> {
        self.not_before_now("assign", start)?;
        let Some(size_job) = self.released.get(job) else {
            self.rejected.push(Violation::UnreleasedJob {
                job: job.clone(),
                at: format_q(&self.now),
            });
            return Ok(());
        };
        let state = self
            .rentals
            .get_mut(rental.0 as usize)
            .ok_or(SimError::UnknownRental(rental))?;
        if state.is_closed() {
            return Err(SimError::ClosedRental(rental));
        }
        if start < state.ready_at {
            return Err(SimError::BeforeSetup {
                job: job.clone(),
                rental,
                start: format_q(&start),
                ready: format_q(&state.ready_at),
            });
        }
        let end = start + size_job.size(state.machine_type);
        state.busy_until = state.busy_until.max(end);
        state.jobs += 1;
        self.assignments.push(Assignment {
            job_id: job.clone(),
            rental_id: rental,
            start,
        });
        self.log(AlgorithmAction::AssignJob {
            job: job.clone(),
            rental,
            start: Num(start),
        });
        Ok(())
    }

    pub fn wake_up(&mut self, at: Q, tag: u64) -> Result<(), SimError> {
        self.not_before_now("wake-up", at)?;
        self.wakeups.push((at, tag));
        self.log(AlgorithmAction::RequestWakeUp { at: Num(at), tag });
        Ok(())
    }

    /// Gives up on a job, for instance when no machine can meet its deadline.
    pub fn declare_infeasible(&mut self, job: &JobId, reason: impl Into<String>) {
        let reason = reason.into();
        self.infeasible.push(InfeasibleJob {
            job: job.clone(),
            reason: reason.clone(),
        });
        self.log(AlgorithmAction::DeclareInfeasible {
            job: job.clone(),
            reason,
        });
    }
}

pub trait OnlineAlgorithm {
    fn name(&self) -> String;

    fn on_event(&mut self, event: &OnlineEvent, ctx: &mut Dispatcher<'_>) -> Result<(), SimError>;

    /// Called once after the last event, with the clock at the last event
    /// time. Rentals still open afterwards make the run fail.
    fn on_finish(&mut self, _ctx: &mut Dispatcher<'_>) -> Result<(), SimError> {
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunReport {
    pub algorithm: String,
    pub schedule: Schedule,
    #[serde(with = "crate::rational::serde_q")]
    pub cost: Q,
    pub validation: ValidationReport,
    pub infeasible_jobs: Vec<InfeasibleJob>,
    pub ratio: Option<Num>,
    #[serde(skip)]
    pub trace: Vec<TraceEntry>,
}

impl RunReport {
    pub fn is_feasible(&self) -> bool {
        self.validation.is_empty()
    }

    /// Records the ratio against an offline cost. Fails when `opt_cost <= 0`.
    pub fn attach_opt(&mut self, opt_cost: Q) -> Result<Q, RatioError> {
        let r = competitive_ratio(self.cost, opt_cost)?;
        self.ratio = Some(Num(r));
        Ok(r)
    }

    pub fn trace_json(&self) -> String {
        serde_json::to_string_pretty(&self.trace).expect("trace serializes")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("optimal cost must be positive, got {0}")]
pub struct RatioError(pub String);

/// `report_cost / opt_cost`, exactly.
pub fn competitive_ratio(report_cost: Q, opt_cost: Q) -> Result<Q, RatioError> {
    if !opt_cost.is_positive() {
        return Err(RatioError(format_q(&opt_cost)));
    }
    Ok(report_cost / opt_cost)
}

#[derive(PartialEq, Eq, PartialOrd, Ord)]
struct QueueKey {
    time: Q,
    // 0 = release, 1 = wake-up
    rank: u8,
    seq: u64,
}

pub fn run_online(algorithm: &mut dyn OnlineAlgorithm, instance: &Instance) -> Result<RunReport, SimError> {
    let mut ctx = Dispatcher::new(instance.params());
    let mut queue: BinaryHeap<Reverse<QueueKey>> = BinaryHeap::new();
    let mut payloads: Vec<EventKind> = Vec::new();

    let mut groups: BTreeMap<Q, Vec<Job>> = BTreeMap::new();
    for job in instance.jobs() {
        groups.entry(job.release).or_default().push(job.clone());
    }
    for (time, jobs) in groups {
        let seq = payloads.len() as u64;
        payloads.push(EventKind::JobsReleased(jobs));
        queue.push(Reverse(QueueKey { time, rank: 0, seq }));
    }

    while let Some(Reverse(key)) = queue.pop() {
        ctx.now = key.time;
        let kind = payloads[key.seq as usize].clone();
        if let EventKind::JobsReleased(jobs) = &kind {
            for j in jobs {
                ctx.released.insert(j.id.clone(), j.clone());
            }
        }
        let event = OnlineEvent { time: key.time, kind };
        algorithm.on_event(&event, &mut ctx)?;
        for (time, tag) in ctx.wakeups.drain(..) {
            let seq = payloads.len() as u64;
            payloads.push(EventKind::WakeUp(tag));
            queue.push(Reverse(QueueKey { time, rank: 1, seq }));
        }
    }
    algorithm.on_finish(&mut ctx)?;
    if !ctx.wakeups.is_empty() {
        return Err(SimError::Algorithm("wake-up requested after the run finished".into()));
    }

    let mut rentals = Vec::with_capacity(ctx.rentals.len());
    for r in &ctx.rentals {
        let close_at = r.close_at.ok_or(SimError::UnclosedRental(r.id))?;
        rentals.push(Rental {
            id: r.id,
            machine_type: r.machine_type,
            open_at: r.open_at,
            close_at,
        });
    }
    let schedule = Schedule {
        rentals,
        assignments: ctx.assignments,
    };
    let mut validation = validate(&schedule, instance);
    validation.violations.extend(ctx.rejected);
    let cost = total_cost(&schedule, instance.params());
    Ok(RunReport {
        algorithm: algorithm.name(),
        schedule,
        cost,
        validation,
        infeasible_jobs: ctx.infeasible,
        ratio: None,
        trace: ctx.trace,
    })
}
