use std::fmt;
use std::str::FromStr;

use crate::algorithms::a1_choose_type;
use crate::harness::{Dispatcher, EventKind, OnlineAlgorithm, OnlineEvent, RentalState, SimError};
use crate::model::{Job, MachineParams, MachineType, RentalId};
use crate::rational::Q;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JobOrder {
    /// Ascending job id.
    Id,
    /// Earliest deadline first, ties by id.
    Deadline,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OpenChoice {
    /// The type A1 would pick for the job.
    A1Type,
    /// Cheapest exclusive machine among the types that meet the deadline.
    Cheapest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitChoice {
    /// Lowest rental id.
    FirstFit,
    /// Smallest idle gap before the job, then latest busy time, then id.
    BestFit,
}

/// The free choices of a GreedyFit heuristic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GreedyFitPolicy {
    pub order: JobOrder,
    pub open_choice: OpenChoice,
    pub fit_choice: FitChoice,
    pub close_on_idle: bool,
}

impl Default for GreedyFitPolicy {
    fn default() -> Self {
        Self {
            order: JobOrder::Id,
            open_choice: OpenChoice::A1Type,
            fit_choice: FitChoice::FirstFit,
            close_on_idle: true,
        }
    }
}

impl fmt::Display for GreedyFitPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let order = match self.order {
            JobOrder::Id => "id",
            JobOrder::Deadline => "deadline",
        };
        let open = match self.open_choice {
            OpenChoice::A1Type => "a1",
            OpenChoice::Cheapest => "cheapest",
        };
        let fit = match self.fit_choice {
            FitChoice::FirstFit => "first",
            FitChoice::BestFit => "best",
        };
        let close = if self.close_on_idle { "idle" } else { "never" };
        write!(f, "order={order},open={open},fit={fit},close={close}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("bad greedyfit policy `{0}`: expected `default` or comma-separated order=id|deadline, open=a1|cheapest, fit=first|best, close=idle|never")]
pub struct PolicyParseError(pub String);

impl FromStr for GreedyFitPolicy {
    type Err = PolicyParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut policy = GreedyFitPolicy::default();
        let s = s.trim();
        if s.is_empty() || s == "default" {
            return Ok(policy);
        }
        let bad = || PolicyParseError(s.to_string());
        for part in s.split(',') {
            let (key, value) = part.split_once('=').ok_or_else(bad)?;
            match (key.trim(), value.trim()) {
                ("order", "id") => policy.order = JobOrder::Id,
                ("order", "deadline") => policy.order = JobOrder::Deadline,
                ("open", "a1") => policy.open_choice = OpenChoice::A1Type,
                ("open", "cheapest") => policy.open_choice = OpenChoice::Cheapest,
                ("fit", "first") => policy.fit_choice = FitChoice::FirstFit,
                ("fit", "best") => policy.fit_choice = FitChoice::BestFit,
                ("close", "idle") => policy.close_on_idle = true,
                ("close", "never") => policy.close_on_idle = false,
                _ => return Err(bad()),
            }
        }
        Ok(policy)
    }
}

fn earliest_start(job: &Job, rental: &RentalState, now: Q) -> Q {
    now.max(rental.busy_until).max(rental.ready_at).max(job.release)
}

/// Whether `job` can reasonably go on the already open `rental`: it meets its
/// deadline when queued behind the committed work, and its processing cost
/// there is no more than an exclusive machine of either type would cost.
pub fn greedyfit_reasonable(job: &Job, rental: &RentalState, now: Q, params: &MachineParams) -> bool {
    let ty = rental.machine_type;
    let finish = earliest_start(job, rental, now) + job.size(ty);
    if finish > job.deadline {
        return false;
    }
    let here = params.cost(ty) * job.size(ty);
    let fresh = MachineType::ALL
        .iter()
        .map(|&t| params.exclusive_cost(t, job.size(t)))
        .min()
        .expect("two machine types");
    here <= fresh
}

/// An online heuristic of the GreedyFit family.
#[derive(Debug, Clone)]
pub struct GreedyFit {
    policy: GreedyFitPolicy,
}

impl GreedyFit {
    pub fn new(policy: GreedyFitPolicy) -> Self {
        Self { policy }
    }

    pub fn policy(&self) -> GreedyFitPolicy {
        self.policy
    }

    fn new_machine_type(&self, job: &Job, now: Q, params: &MachineParams) -> Option<MachineType> {
        let meets = |ty: MachineType| now + params.setup(ty) + job.size(ty) <= job.deadline;
        match self.policy.open_choice {
            OpenChoice::A1Type => Some(a1_choose_type(job, params)).filter(|&ty| meets(ty)),
            OpenChoice::Cheapest => MachineType::ALL
                .into_iter()
                .filter(|&ty| meets(ty))
                .min_by_key(|&ty| params.exclusive_cost(ty, job.size(ty))),
        }
    }

    fn pick(&self, job: &Job, ctx: &Dispatcher<'_>) -> Option<RentalId> {
        let now = ctx.now();
        let mut fitting = ctx
            .open_rentals()
            .filter(|r| greedyfit_reasonable(job, r, now, ctx.params()));
        match self.policy.fit_choice {
            FitChoice::FirstFit => fitting.next().map(|r| r.id),
            FitChoice::BestFit => fitting
                .min_by(|a, b| {
                    let gap_a = earliest_start(job, a, now) - a.busy_until;
                    let gap_b = earliest_start(job, b, now) - b.busy_until;
                    gap_a
                        .cmp(&gap_b)
                        .then_with(|| b.busy_until.cmp(&a.busy_until))
                        .then_with(|| a.id.cmp(&b.id))
                })
                .map(|r| r.id),
        }
    }

    fn place(&mut self, job: &Job, ctx: &mut Dispatcher<'_>) -> Result<(), SimError> {
        let now = ctx.now();
        let rental = match self.pick(job, ctx) {
            Some(id) => id,
            None => match self.new_machine_type(job, now, ctx.params()) {
                Some(ty) => ctx.open(ty, now)?,
                None => {
                    ctx.declare_infeasible(&job.id, "no new machine can meet the deadline");
                    return Ok(());
                }
            },
        };
        let state = ctx.rental(rental).expect("rental exists").clone();
        let start = earliest_start(job, &state, now);
        ctx.assign(&job.id, rental, start)?;
        if self.policy.close_on_idle {
            let until = ctx.rental(rental).expect("rental exists").busy_until;
            ctx.wake_up(until, rental.0 as u64)?;
        }
        Ok(())
    }
}

impl OnlineAlgorithm for GreedyFit {
    fn name(&self) -> String {
        if self.policy == GreedyFitPolicy::default() {
            "greedyfit".into()
        } else {
            format!("greedyfit:{}", self.policy)
        }
    }

    fn on_event(&mut self, event: &OnlineEvent, ctx: &mut Dispatcher<'_>) -> Result<(), SimError> {
        match &event.kind {
            EventKind::JobsReleased(jobs) => {
                let mut jobs: Vec<&Job> = jobs.iter().collect();
                match self.policy.order {
                    JobOrder::Id => jobs.sort_by(|a, b| a.id.cmp(&b.id)),
                    JobOrder::Deadline => {
                        jobs.sort_by(|a, b| a.deadline.cmp(&b.deadline).then_with(|| a.id.cmp(&b.id)))
                    }
                }
                for job in jobs {
                    self.place(job, ctx)?;
                }
            }
            EventKind::WakeUp(tag) => {
                let id = RentalId(*tag as u32);
                let now = ctx.now();
                if let Some(state) = ctx.rental(id) {
                    if !state.is_closed() && state.busy_until <= now {
                        ctx.close(id, now)?;
                    }
                }
            }
        }
        Ok(())
    }

    fn on_finish(&mut self, ctx: &mut Dispatcher<'_>) -> Result<(), SimError> {
        let now = ctx.now();
        let open: Vec<(RentalId, Q)> = ctx.open_rentals().map(|r| (r.id, r.busy_until)).collect();
        for (id, until) in open {
            ctx.close(id, until.max(now))?;
        }
        Ok(())
    }
}
