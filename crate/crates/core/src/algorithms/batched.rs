use std::collections::BTreeMap;

use serde::Serialize;

use crate::harness::{Dispatcher, EventKind, OnlineAlgorithm, OnlineEvent, SimError};
use crate::model::{Job, JobId, MachineParams, MachineType, RentalId};
use crate::rational::{floor_div, format_q, Q};
use crate::tentative::{
    generate_candidate_intervals, slots_per_b_interval, solve_exact, solve_firstfit, JobRestriction, Restrictions,
    TentativeError,
};

/// Batches up to this many jobs are solved exactly, larger ones first-fit.
pub const EXACT_BATCH_LIMIT: usize = 8;

/// Slack class of a job, computed on its reduced deadline `d_j - s_B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum SlackClass {
    /// Enough slack on `B`, and on `A` too unless `p_A <= Δ`.
    J1,
    /// Enough slack on `B` only; may start early on `A`.
    J2_1,
    /// Enough slack on `B` only, and cheap on `B` (only when C fails).
    J2_2,
    /// Enough slack on `A` only.
    J3,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("job {job} is unclassifiable: both reduced slacks are below {two_delta}")]
pub struct Unclassifiable {
    pub job: JobId,
    pub two_delta: String,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("epsilon must lie in (0, 1], got {0}")]
pub struct EpsilonError(pub String);

/// Phase length `Δ = ε s_B / 2`.
pub fn phase_length(epsilon: Q, params: &MachineParams) -> Q {
    epsilon * params.setup_b() / Q::from_integer(2)
}

/// `s_B >= s_A + Δ` and `s_A / c > Δ`.
pub fn condition_c(params: &MachineParams, delta: Q) -> bool {
    params.setup_b() >= params.setup_a() + delta && params.setup_a() / params.cost_b() > delta
}

/// Classifies a job whose deadline has already been reduced by `s_B`.
pub fn bd_classify(job: &Job, params: &MachineParams, delta: Q, c: bool) -> Result<SlackClass, Unclassifiable> {
    let two = delta * Q::from_integer(2);
    let (sa, sb) = (job.slack(MachineType::A), job.slack(MachineType::B));
    if sb >= two && (sa >= two || job.size_a <= delta) {
        Ok(SlackClass::J1)
    } else if sb >= two {
        if c || params.cost_b() * job.size_b > params.setup_a() {
            Ok(SlackClass::J2_1)
        } else {
            Ok(SlackClass::J2_2)
        }
    } else if sa >= two {
        Ok(SlackClass::J3)
    } else {
        Err(Unclassifiable {
            job: job.id.clone(),
            two_delta: format_q(&two),
        })
    }
}

/// Jobs released in `[(i-1)Δ, iΔ)`, waiting for the phase end.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PhaseState {
    pub index: u64,
    /// Jobs with their original deadlines.
    pub buffered: BTreeMap<SlackClass, Vec<Job>>,
    /// Type-`A` rentals opened at release for `J2_1` jobs when C fails.
    pub precautionary: BTreeMap<JobId, RentalId>,
}

/// One tentative problem solved at a phase end.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PhaseRecord {
    pub phase: u64,
    pub class: SlackClass,
    pub jobs: usize,
    pub exact: bool,
    #[serde(with = "crate::rational::serde_q")]
    pub objective: Q,
    pub nodes: u64,
}

#[derive(Debug, Clone, Copy)]
struct Derived {
    delta: Q,
    c: bool,
}

/// Buffers jobs per phase of length `Δ`, solves one tentative problem per
/// slack class at the phase end and realizes it by delaying starts by the
/// setup times, with all setups starting at the phase end.
#[derive(Debug, Clone)]
pub struct BatchedDispatch {
    epsilon: Q,
    derived: Option<Derived>,
    phases: BTreeMap<u64, PhaseState>,
    log: Vec<PhaseRecord>,
}

impl BatchedDispatch {
    pub fn new(epsilon: Q) -> Result<Self, EpsilonError> {
        if epsilon <= Q::from_integer(0) || epsilon > Q::from_integer(1) {
            return Err(EpsilonError(format_q(&epsilon)));
        }
        Ok(Self {
            epsilon,
            derived: None,
            phases: BTreeMap::new(),
            log: Vec::new(),
        })
    }

    pub fn epsilon(&self) -> Q {
        self.epsilon
    }

    pub fn phase_log(&self) -> &[PhaseRecord] {
        &self.log
    }

    fn derive(&mut self, params: &MachineParams) -> Result<Derived, SimError> {
        if let Some(d) = self.derived {
            return Ok(d);
        }
        if self.epsilon * params.setup_b() < Q::from_integer(1) {
            return Err(SimError::Parameter(format!(
                "epsilon {} is below 1/s_B",
                format_q(&self.epsilon)
            )));
        }
        slots_per_b_interval(params).map_err(|e| SimError::Parameter(e.to_string()))?;
        let delta = phase_length(self.epsilon, params);
        let d = Derived {
            delta,
            c: condition_c(params, delta),
        };
        self.derived = Some(d);
        Ok(d)
    }

    fn release(&mut self, jobs: &[Job], d: Derived, ctx: &mut Dispatcher<'_>) -> Result<(), SimError> {
        let params = ctx.params().clone();
        let mut jobs: Vec<&Job> = jobs.iter().collect();
        jobs.sort_by(|a, b| a.id.cmp(&b.id));
        for job in jobs {
            let mut reduced = job.clone();
            reduced.deadline -= params.setup_b();
            let class = match bd_classify(&reduced, &params, d.delta, d.c) {
                Ok(class) => class,
                Err(e) => {
                    ctx.declare_infeasible(&job.id, e.to_string());
                    continue;
                }
            };
            let index = (floor_div(&job.release, &d.delta) + 1) as u64;
            if !self.phases.contains_key(&index) {
                ctx.wake_up(d.delta * Q::from_integer(index as i128), index)?;
            }
            let phase = self.phases.entry(index).or_insert_with(|| PhaseState {
                index,
                ..PhaseState::default()
            });
            if class == SlackClass::J2_1 && !d.c {
                let m = ctx.open(MachineType::A, ctx.now())?;
                phase.precautionary.insert(job.id.clone(), m);
            }
            phase.buffered.entry(class).or_default().push(job.clone());
        }
        Ok(())
    }

    fn dispatch(&mut self, phase: PhaseState, d: Derived, ctx: &mut Dispatcher<'_>) -> Result<(), SimError> {
        let params = ctx.params().clone();
        let now = ctx.now();
        let mut unused = phase.precautionary.clone();
        // (start, job, type, end) of every job realized on a fresh rental
        let mut realized: Vec<(Q, JobId, MachineType, Q)> = Vec::new();

        for (&class, jobs) in &phase.buffered {
            let mut by_interval: BTreeMap<i128, Vec<Job>> = BTreeMap::new();
            for j in jobs {
                by_interval
                    .entry(floor_div(&j.release, &params.setup_b()))
                    .or_default()
                    .push(j.clone());
            }
            for batch in by_interval.into_values() {
                let restriction = match class {
                    SlackClass::J1 => JobRestriction::default().not_before(now),
                    SlackClass::J2_1 => JobRestriction {
                        earliest_start_b: Some(now),
                        ..JobRestriction::default()
                    },
                    SlackClass::J2_2 => JobRestriction::only(MachineType::B).not_before(now),
                    SlackClass::J3 => JobRestriction::only(MachineType::A).not_before(now),
                };
                let restrictions: Restrictions = batch.iter().map(|j| (j.id.clone(), restriction.clone())).collect();
                let problem = match generate_candidate_intervals(&batch, &params, &restrictions) {
                    Ok(p) => p,
                    Err(TentativeError::Infeasible(job)) => {
                        for j in &batch {
                            ctx.declare_infeasible(
                                &j.id,
                                format!("infeasible phase {}: job {job} has no candidate", phase.index),
                            );
                        }
                        continue;
                    }
                    Err(e) => return Err(SimError::Parameter(e.to_string())),
                };
                let exact = problem.jobs.len() <= EXACT_BATCH_LIMIT;
                let sol = if exact {
                    solve_exact(&problem)
                } else {
                    solve_firstfit(&problem)
                };
                self.log.push(PhaseRecord {
                    phase: phase.index,
                    class,
                    jobs: problem.jobs.len(),
                    exact,
                    objective: sol.objective,
                    nodes: sol.nodes,
                });

                for cand in sol.chosen(&problem) {
                    let ty = cand.machine_type;
                    if class == SlackClass::J2_1 && ty == MachineType::A && !d.c {
                        let m = unused.remove(&cand.job_id).expect("precautionary rental for J2_1 job");
                        let start = (cand.start + params.setup_a()).max(now);
                        ctx.assign(&cand.job_id, m, start)?;
                        ctx.close(m, start + (cand.end - cand.start))?;
                        continue;
                    }
                    let shift = match (class, ty) {
                        (SlackClass::J2_1, MachineType::A) => params.setup_a() + d.delta,
                        (SlackClass::J2_2, _) => params.setup_b(),
                        (SlackClass::J3, _) => params.setup_a(),
                        _ => params.setup(ty),
                    };
                    let start = cand.start + shift;
                    realized.push((start, cand.job_id.clone(), ty, start + (cand.end - cand.start)));
                }
            }
        }

        for (_, m) in unused {
            let ready = ctx.rental(m).expect("own rental").ready_at;
            ctx.close(m, ready.max(now))?;
        }

        // interval colouring per type; every rental starts its setup now
        realized.sort();
        let mut machines: Vec<(MachineType, RentalId, Q)> = Vec::new();
        for (start, job, ty, end) in realized {
            let slot = machines.iter_mut().find(|(t, _, busy)| *t == ty && *busy <= start);
            let m = match slot {
                Some((_, m, busy)) => {
                    *busy = end;
                    *m
                }
                None => {
                    let m = ctx.open(ty, now)?;
                    machines.push((ty, m, end));
                    m
                }
            };
            ctx.assign(&job, m, start)?;
        }
        for (_, m, busy) in machines {
            ctx.close(m, busy)?;
        }
        Ok(())
    }
}

impl OnlineAlgorithm for BatchedDispatch {
    fn name(&self) -> String {
        format!("bd:{}", format_q(&self.epsilon))
    }

    fn on_event(&mut self, event: &OnlineEvent, ctx: &mut Dispatcher<'_>) -> Result<(), SimError> {
        let d = self.derive(ctx.params())?;
        match &event.kind {
            EventKind::JobsReleased(jobs) => self.release(jobs, d, ctx),
            EventKind::WakeUp(index) => match self.phases.remove(index) {
                Some(phase) => self.dispatch(phase, d, ctx),
                None => Ok(()),
            },
        }
    }
}
