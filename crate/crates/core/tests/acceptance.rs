//! End-to-end checks, one `PASS`/`FAIL` line per criterion. Runs without the
//! libtest harness so the lines always show up in `cargo test` output.
//!
//! Tolerances are exact (rational arithmetic) unless stated on the line.

use std::collections::BTreeSet;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use cloudsched::algorithms::{AlgorithmSpec, A1};
use cloudsched::bench::{rows_to_csv, run_bench, BenchConfig};
use cloudsched::harness::run_online;
use cloudsched::model::{Assignment, Instance, Job, MachineParams, MachineType, Rental, RentalId, Schedule};
use cloudsched::oracle::{
    best_witness, brute_force_opt, gen_greedyfit_adv, gen_lb_mid_eps, gen_random, gen_stacked_b, DEFAULT_ORACLE_LIMIT,
};
use cloudsched::rational::{format_fixed, format_q, frac, q, Q};
use cloudsched::tentative::{generate_candidate_intervals, solve_exact, Restrictions, TentativeProblem};
use cloudsched::validate::{validate, ViolationClass};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    ok: bool,
    what: String,
    budget: Duration,
}

fn outcome(ok: bool, what: impl Into<String>, budget_secs: u64) -> Outcome {
    Outcome {
        ok,
        what: what.into(),
        budget: Duration::from_secs(budget_secs),
    }
}

// ---------------------------------------------------------------- 1

/// Jobs with a shared wide window; each on its own exclusive `A` machine.
fn mutation_base(seed: u64) -> (Instance, Schedule) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let params = MachineParams::new(q(1), q(3), q(2)).unwrap();
    let n = rng.gen_range(2..=6);
    let mut jobs = Vec::new();
    let mut sched = Schedule::default();
    for k in 0..n {
        let r = q(rng.gen_range(0..=5));
        let pa = q(rng.gen_range(1..=4));
        let pb = q(rng.gen_range(1..=4));
        jobs.push(Job::new(format!("j{k}"), r, r + q(20), pa, pb).unwrap());
        sched.rentals.push(Rental {
            id: RentalId(k),
            machine_type: MachineType::A,
            open_at: r,
            close_at: r + q(1) + pa,
        });
        sched.assignments.push(Assignment {
            job_id: format!("j{k}").into(),
            rental_id: RentalId(k),
            start: r + q(1),
        });
    }
    (Instance::new(params, jobs).unwrap(), sched)
}

fn mutate(class: ViolationClass, inst: &Instance, s: &mut Schedule, rng: &mut ChaCha8Rng) {
    let n = s.assignments.len();
    let k = rng.gen_range(0..n);
    let job = inst.job(&s.assignments[k].job_id).unwrap().clone();
    match class {
        ViolationClass::Assignment => {
            if rng.gen_bool(0.5) {
                s.assignments.remove(k);
            } else {
                let dup = s.assignments[k].clone();
                s.assignments.push(dup);
            }
        }
        ViolationClass::Window => {
            // past the deadline, rental stretched along
            let shift = job.deadline - job.release + q(1);
            s.assignments[k].start += shift;
            s.rentals[k].close_at += shift;
        }
        ViolationClass::Setup => {
            if rng.gen_bool(0.5) {
                s.rentals[k].open_at += frac(1, 2);
            } else {
                s.rentals[k].close_at -= frac(1, 2);
            }
        }
        ViolationClass::Overlap => {
            // a job released no later than another joins the other's rental
            let mut idx: Vec<usize> = (0..n).collect();
            idx.sort_by_key(|&i| inst.job(&s.assignments[i].job_id).unwrap().release);
            let (early, late) = (idx[0], idx[n - 1]);
            let at = s.assignments[late].start;
            let p = inst.job(&s.assignments[early].job_id).unwrap().size_a;
            s.assignments[early].rental_id = RentalId(late as u32);
            s.assignments[early].start = at;
            let close = &mut s.rentals[late].close_at;
            *close = (*close).max(at + p);
        }
        ViolationClass::DanglingRental => s.assignments[k].rental_id = RentalId(999),
        ViolationClass::Causality => unreachable!(),
    }
}

fn criterion_1_validator_mutations() -> Outcome {
    let mut ok = true;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut count = 0;
    for class in ViolationClass::SCHEDULE_CLASSES {
        for seed in 0..20 {
            let (inst, mut s) = mutation_base(seed);
            ok &= validate(&s, &inst).is_empty();
            mutate(class, &inst, &mut s, &mut rng);
            let got = validate(&s, &inst).classes();
            if got != BTreeSet::from([class]) {
                eprintln!("{class:?} seed {seed}: got {got:?}");
                ok = false;
            }
            count += 1;
        }
    }
    outcome(ok, format!("{count} mutations, each exactly its class"), 1)
}

// ---------------------------------------------------------------- 2 and 8

struct OracleRun {
    instance: String,
    c: Q,
    opt: Q,
    /// (algorithm, cost, feasible)
    runs: Vec<(String, Q, bool)>,
}

fn oracle_corpus() -> &'static [OracleRun] {
    static CORPUS: OnceLock<Vec<OracleRun>> = OnceLock::new();
    CORPUS.get_or_init(|| {
        let specs: Vec<AlgorithmSpec> = ["a1", "greedyfit", "bd:1"].iter().map(|s| s.parse().unwrap()).collect();
        let mut out = Vec::new();
        for seed in 0..300u64 {
            let setups = [(1, 2), (1, 4), (2, 4)];
            let (sa, sb) = setups[seed as usize % 3];
            let c = q(1 + (seed as i128 / 3) % 3);
            let params = MachineParams::new(q(sa), q(sb), c).unwrap();
            let n = 1 + (seed as usize % 6);
            // bd:1 needs beta >= 2 s_B
            let inst = gen_random(seed, n, &params, q(2 * sb)).unwrap();
            let opt = brute_force_opt(&inst, DEFAULT_ORACLE_LIMIT).unwrap().cost;
            let runs = specs
                .iter()
                .map(|spec| {
                    let r = run_online(spec.build().as_mut(), &inst).unwrap();
                    (spec.to_string(), r.cost, r.is_feasible())
                })
                .collect();
            out.push(OracleRun {
                instance: format!("random/seed={seed};n={n};s_A={sa};s_B={sb};c={}", format_q(&c)),
                c,
                opt,
                runs,
            });
        }
        out
    })
}

fn criterion_2_online_costs_dominate_oracle() -> Outcome {
    let corpus = oracle_corpus();
    let mut ok = corpus.len() == 300;
    let mut checked = 0;
    for run in corpus {
        for (algo, cost, feasible) in &run.runs {
            if *feasible {
                checked += 1;
                if *cost < run.opt {
                    eprintln!("{} {algo}: {} < {}", run.instance, format_q(cost), format_q(&run.opt));
                    ok = false;
                }
            }
        }
    }
    outcome(
        ok,
        format!(
            "{checked} feasible runs on {} instances, cost >= oracle (tolerance 0)",
            corpus.len()
        ),
        300,
    )
}

fn criterion_8_bd_ratio_envelope() -> Outcome {
    let corpus = oracle_corpus();
    let mut csv = String::from("instance,c,opt,bd_cost,ratio,bound\n");
    let mut ok = true;
    let mut worst = q(0);
    for run in corpus {
        let (_, cost, feasible) = run.runs.iter().find(|r| r.0 == "bd:1").unwrap();
        ok &= *feasible;
        let ratio = *cost / run.opt;
        let bound = q(50) * (run.c + q(1));
        ok &= ratio <= bound;
        worst = worst.max(ratio);
        csv += &format!(
            "{},{},{},{},{},{}\n",
            run.instance,
            format_q(&run.c),
            format_q(&run.opt),
            format_q(cost),
            format_fixed(&ratio, 6),
            format_q(&bound)
        );
    }
    let path = std::path::Path::new(env!("CARGO_TARGET_TMPDIR")).join("bd_ratio_envelope.csv");
    std::fs::write(&path, csv).unwrap();
    outcome(
        ok,
        format!(
            "bd:1 ratio <= 50(c+1) on all instances, max {} (log: {})",
            format_fixed(&worst, 3),
            path.display()
        ),
        300,
    )
}

// ---------------------------------------------------------------- 3

/// Objective recomputed from scratch for one choice.
fn objective_of(p: &TentativeProblem, choice: &[usize]) -> Q {
    let chosen: Vec<_> = choice.iter().enumerate().map(|(k, &c)| &p.candidates[k][c]).collect();
    let mut total: Q = chosen.iter().map(|c| c.cost).sum();
    for pool in p.pools() {
        let z = p
            .points(pool)
            .iter()
            .map(|&x| {
                chosen
                    .iter()
                    .filter(|c| c.pool == Some(pool) && c.start <= x && x < c.end)
                    .count()
            })
            .max()
            .unwrap_or(0);
        let ty = pool.machine_type();
        total += q(5) * p.params.cost(ty) * p.params.setup(ty) * q(z as i128);
    }
    total
}

fn brute_tentative(p: &TentativeProblem) -> Q {
    let sizes: Vec<usize> = p.candidates.iter().map(Vec::len).collect();
    let mut choice = vec![0; sizes.len()];
    let mut best = objective_of(p, &choice);
    'outer: loop {
        for k in 0..choice.len() {
            choice[k] += 1;
            if choice[k] < sizes[k] {
                best = best.min(objective_of(p, &choice));
                continue 'outer;
            }
            choice[k] = 0;
        }
        return best;
    }
}

fn criterion_3_tentative_exact_solver() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut ok = true;
    let mut batches = 0;
    let mut max_cands = 0;
    while batches < 200 {
        let (sa, sb) = [(1, 4), (2, 4), (1, 2), (2, 8)][batches % 4];
        let params = MachineParams::new(q(sa), q(sb), q(rng.gen_range(1..=3))).unwrap();
        let n = rng.gen_range(1..=6);
        let base = q(sb * rng.gen_range(0..3));
        let jobs: Vec<Job> = (0..n)
            .map(|k| {
                let r = base + frac(rng.gen_range(0..2 * sb), 2);
                let pa = q(rng.gen_range(1..=2 * sb));
                let pb = q(rng.gen_range(1..=2 * sb));
                let d = r + pa.min(pb) + q(sb) + q(rng.gen_range(0..=3 * sb));
                Job::new(format!("j{k}"), r, d, pa, pb).unwrap()
            })
            .collect();
        let p = generate_candidate_intervals(&jobs, &params, &Restrictions::new()).unwrap();
        let n = p.jobs.len();
        if p.candidate_count() > 8 * n * n {
            eprintln!("batch {batches}: {} candidates for {n} jobs", p.candidate_count());
            ok = false;
        }
        max_cands = max_cands.max(p.candidate_count());
        let exact = solve_exact(&p);
        let brute = brute_tentative(&p);
        if exact.objective != brute || objective_of(&p, &exact.choice) != exact.objective {
            eprintln!(
                "batch {batches}: exact {} brute {}",
                format_q(&exact.objective),
                format_q(&brute)
            );
            ok = false;
        }
        batches += 1;
    }
    outcome(
        ok,
        format!("{batches} batches, exact == enumeration (tolerance 0), candidates <= 8n^2 (max {max_cands})"),
        300,
    )
}

// ---------------------------------------------------------------- 4

fn criterion_4_batched_dispatch_feasible() -> Outcome {
    let mut ok = true;
    let mut runs = 0;
    let mut realized = 0;
    for seed in 0..1000u64 {
        let sb: i128 = if seed % 2 == 0 { 4 } else { 8 };
        let sa = [1, 2, sb][(seed as usize / 2) % 3];
        let eps = [q(1), frac(1, 2), frac(1, 4), frac(1, sb)][(seed as usize / 6) % 4];
        let params = MachineParams::new(q(sa), q(sb), q(1 + (seed as i128 % 5))).unwrap();
        let n = 1 + (seed as usize % 12);
        let beta = (q(1) + eps) * q(sb);
        let inst = gen_random(seed, n, &params, beta).unwrap();
        let spec = AlgorithmSpec::Batched(eps);
        let rep = run_online(spec.build().as_mut(), &inst).unwrap();
        let on_time = rep.schedule.assignments.iter().all(|a| {
            let job = inst.job(&a.job_id).unwrap();
            let ty = rep.schedule.rental(a.rental_id).unwrap().machine_type;
            a.start + job.size(ty) <= job.deadline
        });
        if !rep.is_feasible() || !rep.infeasible_jobs.is_empty() || !on_time {
            eprintln!("seed {seed} eps {}: {:?}", format_q(&eps), rep.validation.violations);
            ok = false;
        }
        realized += rep.schedule.assignments.len();
        runs += 1;
    }
    outcome(
        ok,
        format!("{runs} runs, {realized} jobs realized, all valid and by their original deadlines"),
        600,
    )
}

// ---------------------------------------------------------------- 5

fn criterion_5_stacked_b_tightness() -> Outcome {
    let params = MachineParams::new(q(1), q(8), q(2)).unwrap();
    let inst = gen_stacked_b(&params, 16).unwrap();
    let a1 = run_online(&mut A1, &inst).unwrap();
    let (witness, ws) = best_witness(&inst).unwrap();
    let ratio = a1.cost / witness;
    // every a1 machine is an exclusive B machine of 8 + 1; the witness is one B machine on [0, 24]
    let ok = a1.is_feasible()
        && validate(&ws, &inst).is_empty()
        && a1.cost == q(288)
        && witness == q(48)
        && ratio == q(6)
        && ratio >= q(4);
    outcome(
        ok,
        format!(
            "a1 {} / witness {} = {} >= s_B/2 = 4 (exact)",
            format_q(&a1.cost),
            format_q(&witness),
            format_q(&ratio)
        ),
        1,
    )
}

// ---------------------------------------------------------------- 6

fn reference(inst: &Instance) -> Q {
    if inst.len() <= DEFAULT_ORACLE_LIMIT {
        brute_force_opt(inst, DEFAULT_ORACLE_LIMIT).unwrap().cost
    } else {
        best_witness(inst).unwrap().0
    }
}

fn criterion_6_lb_mid_trend() -> Outcome {
    let mut ratios = Vec::new();
    for eps in [q(1), frac(1, 2), frac(1, 4)] {
        let inst = gen_lb_mid_eps(eps, q(4), q(1), q(4), frac(1, 8)).unwrap();
        let a1 = run_online(&mut A1, &inst).unwrap();
        assert!(a1.is_feasible());
        ratios.push(a1.cost / reference(&inst));
    }
    let ok = ratios.windows(2).all(|w| w[0] < w[1]);
    let shown: Vec<String> = ratios.iter().map(|r| format_fixed(r, 3)).collect();
    outcome(
        ok,
        format!("a1 ratio at eps 1, 1/2, 1/4 strictly increasing: {}", shown.join(" < ")),
        60,
    )
}

// ---------------------------------------------------------------- 7

fn criterion_7_greedyfit_adversary() -> Outcome {
    let mut ok = true;
    let mut ratios = Vec::new();
    let mut line = Vec::new();
    for sb in [4, 6, 8] {
        let inst = gen_greedyfit_adv(sb, q(2), frac(1, 8)).unwrap();
        let spec: AlgorithmSpec = "greedyfit".parse().unwrap();
        let g = run_online(spec.build().as_mut(), &inst).unwrap();
        let opt = brute_force_opt(&inst, DEFAULT_ORACLE_LIMIT).unwrap().cost;
        ok &= g.is_feasible();
        if sb == 4 {
            ok &= g.cost >= q(17) && opt < q(16) && g.cost / opt > frac(106, 100);
        }
        ratios.push(g.cost / opt);
        line.push(format!("s_B={sb}: {}/{}", format_q(&g.cost), format_q(&opt)));
    }
    ok &= ratios.windows(2).all(|w| w[0] < w[1]);
    outcome(
        ok,
        format!(
            "greedyfit/oracle {} (cost >= 17, oracle < 16 at s_B=4; growing)",
            line.join(", ")
        ),
        60,
    )
}

// ---------------------------------------------------------------- 9

const FULL_BENCH: &str = r#"
workers = 4

[[sweep]]
name = "lb-mid"
family = "lb-mid"
algorithms = ["a1", "greedyfit", "bd:1"]
params = { s = 4, c = 1, t = 4, delta = "1/8" }
vary = { epsilon = ["1", "1/2", "1/4"] }

[[sweep]]
name = "greedyfit-adv"
family = "greedyfit"
algorithms = ["a1", "greedyfit", "greedyfit:order=deadline,fit=best", "bd:1"]
params = { x = 2 }
vary = { s_b = [4, 6, 8] }

[[sweep]]
name = "stacked"
family = "stacked-b"
algorithms = ["a1", "greedyfit"]
params = { s_b = 8, c = 2, n = 16 }

[[sweep]]
name = "random"
family = "random"
algorithms = ["a1", "greedyfit", "bd:1", "bd:1/2"]
params = { s_a = 1, s_b = 4, c = 2, n = 6, beta = 12 }
vary = { seed = [1, 2, 3, 4, 5, 6, 7, 8] }
"#;

fn criterion_9_bench_determinism() -> Outcome {
    let cfg = BenchConfig::from_toml(FULL_BENCH).unwrap();
    let first = rows_to_csv(&run_bench(&cfg).unwrap()).unwrap();
    let second = rows_to_csv(&run_bench(&cfg).unwrap()).unwrap();
    let serial = BenchConfig {
        workers: Some(1),
        ..cfg.clone()
    };
    let third = rows_to_csv(&run_bench(&serial).unwrap()).unwrap();
    let rows = first.lines().count() - 1;
    let ok = first == second && first == third && rows > 0;
    outcome(
        ok,
        format!("{rows} rows, byte-identical across reruns and worker counts"),
        60,
    )
}

fn main() {
    let criteria: [(u32, fn() -> Outcome); 9] = [
        (1, criterion_1_validator_mutations),
        (2, criterion_2_online_costs_dominate_oracle),
        (3, criterion_3_tentative_exact_solver),
        (4, criterion_4_batched_dispatch_feasible),
        (5, criterion_5_stacked_b_tightness),
        (6, criterion_6_lb_mid_trend),
        (7, criterion_7_greedyfit_adversary),
        (8, criterion_8_bd_ratio_envelope),
        (9, criterion_9_bench_determinism),
    ];
    let mut failed = 0;
    for (n, f) in criteria {
        let t0 = Instant::now();
        let res = std::panic::catch_unwind(f);
        let elapsed = t0.elapsed();
        let (ok, what, budget) = match res {
            Ok(o) => (o.ok && elapsed <= o.budget, o.what, Some(o.budget)),
            Err(_) => (false, "panicked".to_string(), None),
        };
        let budget = budget.map_or(String::new(), |b| format!(", budget {}s", b.as_secs()));
        println!(
            "criterion {n}: {} {what} ({:.2}s{budget})",
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
        failed += usize::from(!ok);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
