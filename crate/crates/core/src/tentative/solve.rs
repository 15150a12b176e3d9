use std::collections::BTreeMap;

use super::{Pool, TentativeProblem, TentativeSolution};
use crate::rational::Q;

/// Where a candidate lands: pool index and the range of constraint points it
/// covers. Intervals count at points in `[start, end)`, so touching intervals
/// can share a machine.
#[derive(Clone, Copy)]
struct Footprint {
    pool: usize,
    lo: usize,
    hi: usize,
}

struct Compiled {
    pools: Vec<Pool>,
    unit: Vec<Q>,
    points: Vec<usize>,
    foot: Vec<Vec<Option<Footprint>>>,
    fixed: Vec<Vec<Q>>,
}

impl Compiled {
    fn new(problem: &TentativeProblem) -> Self {
        let pools = problem.pools();
        let index: BTreeMap<Pool, usize> = pools.iter().enumerate().map(|(k, &p)| (p, k)).collect();
        let foot = problem
            .candidates
            .iter()
            .map(|cands| {
                cands
                    .iter()
                    .map(|c| {
                        c.pool.map(|pool| {
                            let pts = problem.points(pool);
                            Footprint {
                                pool: index[&pool],
                                lo: pts.partition_point(|&x| x < c.start),
                                hi: pts.partition_point(|&x| x < c.end),
                            }
                        })
                    })
                    .collect()
            })
            .collect();
        Self {
            unit: pools.iter().map(|&p| problem.pool_unit_cost(p)).collect(),
            points: pools.iter().map(|&p| problem.points(p).len()).collect(),
            fixed: problem
                .candidates
                .iter()
                .map(|cs| cs.iter().map(|c| c.cost).collect())
                .collect(),
            pools,
            foot,
        }
    }
}

/// Overlap counts at every constraint point, with the running maxima.
struct Load {
    counts: Vec<Vec<u32>>,
    z: Vec<u32>,
}

impl Load {
    fn new(c: &Compiled) -> Self {
        Self {
            counts: c.points.iter().map(|&n| vec![0; n]).collect(),
            z: vec![0; c.pools.len()],
        }
    }

    /// Pool growth caused by adding `f`, without adding it.
    fn growth(&self, f: &Footprint) -> u32 {
        let peak = self.counts[f.pool][f.lo..f.hi].iter().max().map_or(0, |m| m + 1);
        peak.saturating_sub(self.z[f.pool])
    }

    fn add(&mut self, f: &Footprint) -> u32 {
        let old = self.z[f.pool];
        for x in &mut self.counts[f.pool][f.lo..f.hi] {
            *x += 1;
            self.z[f.pool] = self.z[f.pool].max(*x);
        }
        old
    }

    fn remove(&mut self, f: &Footprint, old_z: u32) {
        for x in &mut self.counts[f.pool][f.lo..f.hi] {
            *x -= 1;
        }
        self.z[f.pool] = old_z;
    }
}

fn delta(c: &Compiled, load: &Load, job: usize, cand: usize) -> Q {
    let mut d = c.fixed[job][cand];
    if let Some(f) = &c.foot[job][cand] {
        d += c.unit[f.pool] * Q::from_integer(load.growth(f) as i128);
    }
    d
}

fn solution(c: &Compiled, choice: Vec<usize>, nodes: u64) -> TentativeSolution {
    let mut load = Load::new(c);
    let mut objective = Q::from_integer(0);
    for (j, &k) in choice.iter().enumerate() {
        objective += c.fixed[j][k];
        if let Some(f) = &c.foot[j][k] {
            load.add(f);
        }
    }
    let mut z_b = 0;
    let mut z_slots = BTreeMap::new();
    for (k, &pool) in c.pools.iter().enumerate() {
        objective += c.unit[k] * Q::from_integer(load.z[k] as i128);
        match pool {
            Pool::B => z_b = load.z[k],
            Pool::ASlot(i) => {
                z_slots.insert(i, load.z[k]);
            }
        }
    }
    TentativeSolution {
        choice,
        z_b,
        z_slots,
        objective,
        nodes,
    }
}

/// Objective and pool sizes of a given choice of candidates.
///
/// Panics if `choice` does not pick one valid candidate per job.
pub fn evaluate(problem: &TentativeProblem, choice: &[usize]) -> TentativeSolution {
    assert_eq!(choice.len(), problem.jobs.len(), "one candidate per job");
    solution(&Compiled::new(problem), choice.to_vec(), 0)
}

/// Jobs by deadline, each on the candidate that raises the objective least
/// (earliest start on ties).
pub fn solve_firstfit(problem: &TentativeProblem) -> TentativeSolution {
    let c = Compiled::new(problem);
    firstfit(&c, problem)
}

fn firstfit(c: &Compiled, problem: &TentativeProblem) -> TentativeSolution {
    let mut order: Vec<usize> = (0..problem.jobs.len()).collect();
    order.sort_by(|&a, &b| {
        let (ja, jb) = (&problem.jobs[a], &problem.jobs[b]);
        (ja.deadline, &ja.id).cmp(&(jb.deadline, &jb.id))
    });
    let mut load = Load::new(c);
    let mut choice = vec![0; problem.jobs.len()];
    for j in order {
        let best = (0..problem.candidates[j].len())
            .min_by_key(|&k| (delta(c, &load, j, k), problem.candidates[j][k].start, k))
            .expect("every job has a candidate");
        if let Some(f) = &c.foot[j][best] {
            load.add(f);
        }
        choice[j] = best;
    }
    solution(c, choice, 1)
}

/// Optimum over the candidate sets by depth-first branch and bound.
///
/// Pooled candidates whose covered constraint points are a superset of
/// another candidate of the same job in the same pool are skipped: swapping
/// to the smaller footprint never raises any count.
pub fn solve_exact(problem: &TentativeProblem) -> TentativeSolution {
    let c = Compiled::new(problem);
    let n = problem.jobs.len();
    let incumbent = firstfit(&c, problem);
    if n == 0 {
        return incumbent;
    }

    let options: Vec<Vec<usize>> = (0..n)
        .map(|j| {
            let m = problem.candidates[j].len();
            (0..m)
                .filter(|&k| {
                    let Some(f) = c.foot[j][k] else { return true };
                    !(0..m).any(|o| {
                        let Some(g) = c.foot[j][o] else { return false };
                        let inside = g.pool == f.pool && g.lo >= f.lo && g.hi <= f.hi;
                        let strictly = g.lo > f.lo || g.hi < f.hi;
                        inside && (strictly || o < k)
                    })
                })
                .collect()
        })
        .collect();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&j| (options[j].len(), problem.jobs[j].id.clone()));
    let min_fixed: Vec<Q> = (0..n)
        .map(|j| options[j].iter().map(|&k| c.fixed[j][k]).min().unwrap())
        .collect();

    let mut search = Search {
        c: &c,
        options: &options,
        order: &order,
        min_fixed: &min_fixed,
        load: Load::new(&c),
        choice: vec![0; n],
        best: incumbent.objective,
        best_choice: incumbent.choice.clone(),
        nodes: 0,
    };
    search.dfs(0, Q::from_integer(0));
    let (best_choice, nodes) = (search.best_choice, search.nodes);
    solution(&c, best_choice, nodes)
}

struct Search<'a> {
    c: &'a Compiled,
    options: &'a [Vec<usize>],
    order: &'a [usize],
    min_fixed: &'a [Q],
    load: Load,
    choice: Vec<usize>,
    best: Q,
    best_choice: Vec<usize>,
    nodes: u64,
}

impl Search<'_> {
    /// Lower bound on the cost still to come: fixed costs add up, and every
    /// remaining job alone costs at least its cheapest increment.
    fn bound(&self, depth: usize) -> Q {
        let rest = &self.order[depth..];
        let fixed: Q = rest.iter().map(|&j| self.min_fixed[j]).sum();
        let single = rest
            .iter()
            .map(|&j| {
                self.options[j]
                    .iter()
                    .map(|&k| delta(self.c, &self.load, j, k))
                    .min()
                    .unwrap()
            })
            .max()
            .unwrap_or_default();
        fixed.max(single)
    }

    fn dfs(&mut self, depth: usize, cost: Q) {
        self.nodes += 1;
        if cost + self.bound(depth) >= self.best {
            return;
        }
        if depth == self.order.len() {
            self.best = cost;
            self.best_choice = self.choice.clone();
            return;
        }
        let j = self.order[depth];
        let mut branches: Vec<(Q, usize)> = self.options[j]
            .iter()
            .map(|&k| (delta(self.c, &self.load, j, k), k))
            .collect();
        branches.sort();
        for (d, k) in branches {
            if cost + d >= self.best {
                break;
            }
            let foot = self.c.foot[j][k];
            let old = foot.as_ref().map(|f| self.load.add(f));
            self.choice[j] = k;
            self.dfs(depth + 1, cost + d);
            if let (Some(f), Some(old)) = (foot.as_ref(), old) {
                self.load.remove(f, old);
            }
        }
    }
}
