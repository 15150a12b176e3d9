use crate::harness::{Dispatcher, EventKind, OnlineAlgorithm, OnlineEvent, SimError};
use crate::model::{Job, MachineParams, MachineType};

/// Machine type A1 rents for `job`.
///
/// Type `A` when it is no more expensive than `B` as an exclusive machine and
/// the job can wait out an `A` setup, or when the job cannot wait out a `B`
/// setup. Otherwise `B`.
pub fn a1_choose_type(job: &Job, params: &MachineParams) -> MachineType {
    let cheap_a = params.setup_a() + job.size_a <= params.cost_b() * (params.setup_b() + job.size_b);
    let a_fits = job.slack(MachineType::A) >= params.setup_a();
    let b_too_tight = job.slack(MachineType::B) < params.setup_b();
    if (cheap_a && a_fits) || b_too_tight {
        MachineType::A
    } else {
        MachineType::B
    }
}

/// Every job on its own exclusive machine, opened at its release.
#[derive(Debug, Clone, Default)]
pub struct A1;

impl OnlineAlgorithm for A1 {
    fn name(&self) -> String {
        "a1".into()
    }

    fn on_event(&mut self, event: &OnlineEvent, ctx: &mut Dispatcher<'_>) -> Result<(), SimError> {
        let EventKind::JobsReleased(jobs) = &event.kind else {
            return Ok(());
        };
        let mut jobs: Vec<&Job> = jobs.iter().collect();
        jobs.sort_by(|a, b| a.id.cmp(&b.id));
        for job in jobs {
            let ty = a1_choose_type(job, ctx.params());
            let start = event.time + ctx.params().setup(ty);
            let end = start + job.size(ty);
            if end > job.deadline {
                ctx.declare_infeasible(
                    &job.id,
                    format!("type {ty} machine opened at release misses the deadline"),
                );
                continue;
            }
            let m = ctx.open(ty, event.time)?;
            ctx.assign(&job.id, m, start)?;
            ctx.close(m, end)?;
        }
        Ok(())
    }
}
