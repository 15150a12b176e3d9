//! Cheap feasible schedules for instances too large for the oracle.
//!
//! Their costs upper-bound the optimum, so ratios against them
//! under-estimate the true competitive ratio.

use std::collections::BTreeMap;

use crate::cost::total_cost;
use crate::model::{Assignment, Instance, Job, MachineType, Rental, RentalId, Schedule};
use crate::rational::Q;

fn push_machine(
    schedule: &mut Schedule,
    ty: MachineType,
    open: Q,
    jobs: &[(&Job, Q)],
    params_size: impl Fn(&Job) -> Q,
) {
    let id = RentalId(schedule.rentals.len() as u32);
    let close = jobs.iter().map(|(j, t)| *t + params_size(j)).max().unwrap_or(open);
    schedule.rentals.push(Rental {
        id,
        machine_type: ty,
        open_at: open,
        close_at: close,
    });
    for (j, t) in jobs {
        schedule.assignments.push(Assignment {
            job_id: j.id.clone(),
            rental_id: id,
            start: *t,
        });
    }
}

/// All jobs on one machine of type `ty`, in release order, each as early as
/// possible. `None` if some deadline is missed.
pub fn single_machine_witness(instance: &Instance, ty: MachineType) -> Option<Schedule> {
    let params = instance.params();
    let first = instance.jobs().first()?;
    let s = params.setup(ty);
    let open = (first.release - s).max(Q::from_integer(0));
    let mut t = open + s;
    let mut placed = Vec::new();
    for job in instance.jobs() {
        t = t.max(job.release);
        if t + job.size(ty) > job.deadline {
            return None;
        }
        placed.push((job, t));
        t += job.size(ty);
    }
    let mut schedule = Schedule::default();
    push_machine(&mut schedule, ty, open, &placed, |j| j.size(ty));
    Some(schedule)
}

/// Jobs with equal release, deadline and sizes are packed back to back on
/// machines opened so that their setups end at the release (or at `s_τ` if
/// the release is earlier), mixing types in the cheapest proportion.
pub fn group_witness(instance: &Instance) -> Option<Schedule> {
    let params = instance.params();
    let mut groups: BTreeMap<(Q, Q, Q, Q), Vec<&Job>> = BTreeMap::new();
    for j in instance.jobs() {
        groups
            .entry((j.release, j.deadline, j.size_a, j.size_b))
            .or_default()
            .push(j);
    }

    let mut schedule = Schedule::default();
    for ((r, d, _, _), jobs) in groups {
        let n = jobs.len();
        let plan = |ty: MachineType| {
            let s = params.setup(ty);
            let open = (r - s).max(Q::from_integer(0));
            let ready = open + s;
            let p = jobs[0].size(ty);
            let cap = if ready + p > d {
                0
            } else {
                ((d - ready) / p).floor().to_integer() as usize
            };
            (open, ready, p, cap)
        };
        let (a, b) = (plan(MachineType::A), plan(MachineType::B));
        let cost_of = |ty: MachineType, (_, _, p, cap): (Q, Q, Q, usize), count: usize| -> Q {
            let full = count / cap;
            let part = count % cap;
            let one = |k: usize| params.cost(ty) * (params.setup(ty) + p * Q::from_integer(k as i128));
            let mut c = one(cap) * Q::from_integer(full as i128);
            if part > 0 {
                c += one(part);
            }
            c
        };
        let mut best: Option<(Q, usize)> = None;
        let max_a = if a.3 == 0 { 0 } else { n.div_ceil(a.3) };
        for machines_a in 0..=max_a {
            let on_a = (machines_a * a.3).min(n);
            let on_b = n - on_a;
            if on_b > 0 && b.3 == 0 {
                continue;
            }
            let mut c = Q::from_integer(0);
            if on_a > 0 {
                c += cost_of(MachineType::A, a, on_a);
            }
            if on_b > 0 {
                c += cost_of(MachineType::B, b, on_b);
            }
            if best.is_none_or(|(bc, _)| c < bc) {
                best = Some((c, on_a));
            }
        }
        let (_, on_a) = best?;
        for (ty, (open, ready, p, cap), slice) in
            [(MachineType::A, a, &jobs[..on_a]), (MachineType::B, b, &jobs[on_a..])]
        {
            for chunk in slice.chunks(cap.max(1)) {
                let placed: Vec<(&Job, Q)> = chunk
                    .iter()
                    .enumerate()
                    .map(|(k, j)| (*j, ready + p * Q::from_integer(k as i128)))
                    .collect();
                push_machine(&mut schedule, ty, open, &placed, |j| j.size(ty));
            }
        }
    }
    Some(schedule)
}

/// Cheapest of the witnesses above, with its cost.
pub fn best_witness(instance: &Instance) -> Option<(Q, Schedule)> {
    [
        group_witness(instance),
        single_machine_witness(instance, MachineType::A),
        single_machine_witness(instance, MachineType::B),
    ]
    .into_iter()
    .flatten()
    .map(|s| (total_cost(&s, instance.params()), s))
    .min_by(|x, y| x.0.cmp(&y.0))
}
