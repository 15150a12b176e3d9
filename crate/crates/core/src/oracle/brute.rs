use itertools::Itertools;
use rayon::prelude::*;
use serde::Serialize;

use crate::cost::total_cost;
use crate::model::{Assignment, Instance, MachineType, Rental, RentalId, Schedule};
use crate::rational::{serde_q, Q};

/// Largest instance [`brute_force_opt`] accepts by default.
pub const DEFAULT_ORACLE_LIMIT: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("instance too large for oracle: {n} jobs, limit {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("infeasible instance")]
    Infeasible,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OptResult {
    #[serde(with = "serde_q")]
    pub cost: Q,
    pub schedule: Schedule,
    /// Block splits considered by the partition recursion.
    pub partitions_examined: u64,
    /// Job orders packed over all blocks and types.
    pub orders_examined: u64,
}

/// Cheapest single machine for one block of jobs.
#[derive(Debug, Clone)]
struct Block {
    cost: Q,
    machine_type: MachineType,
    open: Q,
    close: Q,
    /// (job index, start)
    starts: Vec<(usize, Q)>,
}

/// Exact offline optimum of a small instance.
///
/// Every block of a partition of the jobs gets its own machine. For a block,
/// a type and an order of its jobs, the machine is opened `s_τ` before the
/// first start and closed at the last completion; given the first start, the
/// earliest-start forward packing minimises the span, and the span shrinks
/// as the first start moves later, so the first start is set to the latest
/// value that keeps every deadline. Minimising over orders, types and
/// partitions gives the optimum.
pub fn brute_force_opt(instance: &Instance, limit: usize) -> Result<OptResult, OracleError> {
    let n = instance.len();
    if n > limit {
        return Err(OracleError::TooLarge { n, limit });
    }
    if n == 0 {
        return Ok(OptResult {
            cost: Q::from_integer(0),
            schedule: Schedule::default(),
            partitions_examined: 0,
            orders_examined: 0,
        });
    }

    let full = (1usize << n) - 1;
    let blocks: Vec<(Option<Block>, u64)> = (0..=full)
        .into_par_iter()
        .map(|mask| {
            if mask == 0 {
                (None, 0)
            } else {
                best_block(instance, mask)
            }
        })
        .collect();
    let orders_examined = blocks.iter().map(|b| b.1).sum();

    // best[mask]: cheapest cover of `mask`, split off the block holding its lowest job
    let mut best: Vec<Option<(Q, usize)>> = vec![None; full + 1];
    best[0] = Some((Q::from_integer(0), 0));
    let mut partitions_examined = 0u64;
    for mask in 1..=full {
        let low = mask & mask.wrapping_neg();
        let rest = mask ^ low;
        // every sub of `rest`, including empty
        let mut sub = rest;
        loop {
            let block = sub | low;
            partitions_examined += 1;
            if let (Some(b), Some((c, _))) = (&blocks[block].0, &best[mask ^ block]) {
                let total = b.cost + c;
                if best[mask].as_ref().is_none_or(|(cur, _)| total < *cur) {
                    best[mask] = Some((total, block));
                }
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
    }

    let (cost, _) = best[full].ok_or(OracleError::Infeasible)?;
    let mut schedule = Schedule::default();
    let mut mask = full;
    while mask != 0 {
        let (_, block) = best[mask].expect("reconstructable");
        let b = blocks[block].0.as_ref().expect("feasible block");
        let id = RentalId(schedule.rentals.len() as u32);
        schedule.rentals.push(Rental {
            id,
            machine_type: b.machine_type,
            open_at: b.open,
            close_at: b.close,
        });
        for &(j, start) in &b.starts {
            schedule.assignments.push(Assignment {
                job_id: instance.jobs()[j].id.clone(),
                rental_id: id,
                start,
            });
        }
        mask ^= block;
    }
    debug_assert_eq!(total_cost(&schedule, instance.params()), cost);
    Ok(OptResult {
        cost,
        schedule,
        partitions_examined,
        orders_examined,
    })
}

fn best_block(instance: &Instance, mask: usize) -> (Option<Block>, u64) {
    let params = instance.params();
    let members: Vec<usize> = (0..instance.len()).filter(|k| mask >> k & 1 == 1).collect();
    let mut best: Option<Block> = None;
    let mut tried = 0;
    for ty in MachineType::ALL {
        let s = params.setup(ty);
        for order in members.iter().copied().permutations(members.len()) {
            tried += 1;
            let jobs: Vec<_> = order.iter().map(|&k| &instance.jobs()[k]).collect();
            // latest start of each position that still lets the tail finish
            let mut latest = vec![Q::from_integer(0); jobs.len()];
            let mut bound: Option<Q> = None;
            for (pos, job) in jobs.iter().enumerate().rev() {
                let own = job.deadline - job.size(ty);
                let l = bound.map_or(own, |b| own.min(b - job.size(ty)));
                latest[pos] = l;
                bound = Some(l);
            }
            if jobs.iter().zip(&latest).any(|(j, l)| j.release > *l) || latest[0] < s {
                continue;
            }
            let mut t = latest[0];
            let mut starts = Vec::with_capacity(jobs.len());
            for (pos, job) in jobs.iter().enumerate() {
                if pos > 0 {
                    t = t.max(job.release);
                }
                starts.push((order[pos], t));
                t += job.size(ty);
            }
            let open = latest[0] - s;
            let cost = params.cost(ty) * (t - open);
            if best.as_ref().is_none_or(|b| cost < b.cost) {
                best = Some(Block {
                    cost,
                    machine_type: ty,
                    open,
                    close: t,
                    starts,
                });
            }
        }
    }
    (best, tried)
}
