use std::collections::{BTreeMap, BTreeSet};

use super::{
    slots_per_b_interval, CandidateInterval, JobRestriction, Pool, Restrictions, TentativeError, TentativeProblem,
};
use crate::model::{Job, MachineParams, MachineType};
use crate::rational::{floor_div, Q};

/// Length, in setup units of its type, of the window a pooled interval must
/// fit in. A pooled job of type `τ` released in `[k s_τ, (k+1) s_τ)` must run
/// inside `[k s_τ, (k + POOL_SPAN) s_τ]`.
pub const POOL_SPAN: i128 = 4;

struct Pooled<'a> {
    job: &'a Job,
    est: Q,
    end: Q,
}

/// Builds the candidate sets for one batch.
///
/// All releases must fall in the same `B`-interval `[K s_B, (K+1) s_B)`. Jobs
/// are pooled on a type where they are small and exclusive where they are
/// big; a small job with no pooled candidate falls back to a paid exclusive
/// interval. Pooled starts are the job's earliest start plus the breakpoints
/// of an earliest-finish packing of the pool's jobs on one virtual machine.
pub fn generate_candidate_intervals(
    batch: &[Job],
    params: &MachineParams,
    restrictions: &Restrictions,
) -> Result<TentativeProblem, TentativeError> {
    slots_per_b_interval(params)?;
    if batch.is_empty() {
        return Ok(TentativeProblem::empty(params.clone()));
    }
    let (s_a, s_b) = (params.setup_a(), params.setup_b());
    let k_b = floor_div(&batch[0].release, &s_b);
    if batch.iter().any(|j| floor_div(&j.release, &s_b) != k_b) {
        return Err(TentativeError::SpansBIntervals);
    }
    let origin = s_b * Q::from_integer(k_b);
    let span = Q::from_integer(POOL_SPAN);

    let mut jobs = batch.to_vec();
    jobs.sort_by(|a, b| a.id.cmp(&b.id));
    let free = JobRestriction::default();

    let slot_of = |job: &Job| (floor_div(&(job.release - origin), &s_a) + 1) as u32;
    let pool_of = |job: &Job, ty| match ty {
        MachineType::B => Pool::B,
        MachineType::A => Pool::ASlot(slot_of(job)),
    };

    // pooled windows, per pool
    let mut members: BTreeMap<Pool, Vec<Pooled>> = BTreeMap::new();
    for job in &jobs {
        let restr = restrictions.get(&job.id).unwrap_or(&free);
        for ty in MachineType::ALL {
            if !restr.allows(ty) || job.size(ty) >= params.setup(ty) {
                continue;
            }
            let s = params.setup(ty);
            let est = restr.earliest_start(ty).map_or(job.release, |t| t.max(job.release));
            let end = (job.deadline - s_b).min(s * (Q::from_integer(floor_div(&job.release, &s)) + span));
            members
                .entry(pool_of(job, ty))
                .or_default()
                .push(Pooled { job, est, end });
        }
    }

    let mut breakpoints: BTreeMap<Pool, BTreeSet<Q>> = BTreeMap::new();
    for (&pool, m) in &members {
        let (w0, w1) = match pool {
            Pool::B => (origin, origin + span * s_b),
            Pool::ASlot(i) => {
                let lo = origin + s_a * Q::from_integer(i as i128 - 1);
                (lo, lo + span * s_a)
            }
        };
        breakpoints.insert(pool, virtual_machine_points(m, pool.machine_type(), w0, w1));
    }

    let mut candidates = Vec::with_capacity(jobs.len());
    let mut l_b = BTreeSet::new();
    let mut l_slots: BTreeMap<u32, BTreeSet<Q>> = BTreeMap::new();
    for job in &jobs {
        let restr = restrictions.get(&job.id).unwrap_or(&free);
        let mut cands = Vec::new();
        for ty in MachineType::ALL {
            if !restr.allows(ty) {
                continue;
            }
            let s = params.setup(ty);
            let p = job.size(ty);
            let est = restr.earliest_start(ty).map_or(job.release, |t| t.max(job.release));
            let latest_end = job.deadline - s_b;
            let exclusive = |cost| CandidateInterval {
                job_id: job.id.clone(),
                machine_type: ty,
                start: est,
                end: est + p,
                exclusive: true,
                pool: None,
                cost,
            };
            if p >= s {
                if est + p <= latest_end {
                    cands.push(exclusive(params.cost(ty) * p));
                }
                continue;
            }
            let pool = pool_of(job, ty);
            let window_end = members[&pool]
                .iter()
                .find(|m| m.job.id == job.id)
                .map(|m| m.end)
                .expect("pooled job registered");
            let lst = window_end - p;
            let before = cands.len();
            if est <= lst {
                let starts =
                    std::iter::once(est).chain(breakpoints[&pool].range(est..=lst).copied().filter(|&t| t > est));
                for t in starts {
                    cands.push(CandidateInterval {
                        job_id: job.id.clone(),
                        machine_type: ty,
                        start: t,
                        end: t + p,
                        exclusive: false,
                        pool: Some(pool),
                        cost: Q::from_integer(0),
                    });
                    match pool {
                        Pool::B => l_b.insert(t),
                        Pool::ASlot(i) => l_slots.entry(i).or_default().insert(t),
                    };
                }
            }
            if cands.len() == before && est + p <= latest_end {
                cands.push(exclusive(params.exclusive_cost(ty, p)));
            }
        }
        if cands.is_empty() {
            return Err(TentativeError::Infeasible(job.id.clone()));
        }
        candidates.push(cands);
    }

    Ok(TentativeProblem {
        params: params.clone(),
        jobs,
        candidates,
        l_b: l_b.into_iter().collect(),
        l_slots: l_slots.into_iter().map(|(i, s)| (i, s.into_iter().collect())).collect(),
    })
}

/// Earliest-finish packing of the pool's jobs on one machine available in
/// `[w0, w1]`: completion times of packed jobs plus the window ends of the
/// jobs left over.
fn virtual_machine_points(members: &[Pooled], ty: MachineType, w0: Q, w1: Q) -> BTreeSet<Q> {
    let mut points = BTreeSet::new();
    let mut left: Vec<&Pooled> = members.iter().collect();
    let mut t = w0;
    loop {
        let next = left
            .iter()
            .enumerate()
            .filter_map(|(k, m)| {
                let s = t.max(m.est);
                let e = s + m.job.size(ty);
                (e <= m.end.min(w1)).then_some((e, &m.job.id, k))
            })
            .min();
        let Some((e, _, k)) = next else { break };
        left.swap_remove(k);
        points.insert(e);
        t = e;
    }
    for m in left {
        points.insert(m.est);
        points.insert(m.end);
    }
    points
}
