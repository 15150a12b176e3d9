//! Feasibility checking of schedules.
//!
//! A schedule is feasible iff every job of the instance is assigned exactly
//! once, every processing interval `[t_j, t_j + p]` lies inside the job's
//! window `[r_j, d_j]` and inside `[a_M + s, b_M]` of its rental, and jobs on
//! the same rental have disjoint interiors. Containment is closed on both
//! ends, so back-to-back jobs may touch.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::Signed;
use serde::Serialize;

use crate::model::{Instance, JobId, RentalId, Schedule};
use crate::rational::{format_q, Q};

/// Coarse grouping of violations. The first five come from [`validate`];
/// `Causality` is only ever added by the online harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum ViolationClass {
    Assignment,
    Window,
    Setup,
    Overlap,
    DanglingRental,
    Causality,
}

impl ViolationClass {
    pub const SCHEDULE_CLASSES: [ViolationClass; 5] = [
        ViolationClass::Assignment,
        ViolationClass::Window,
        ViolationClass::Setup,
        ViolationClass::Overlap,
        ViolationClass::DanglingRental,
    ];
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    MissingAssignment {
        job: JobId,
    },
    DuplicateAssignment {
        job: JobId,
        count: usize,
    },
    UnknownJob {
        job: JobId,
    },
    Window {
        job: JobId,
        start: String,
        end: String,
    },
    Setup {
        job: JobId,
        rental: RentalId,
    },
    MalformedRental {
        rental: RentalId,
    },
    DuplicateRentalId {
        rental: RentalId,
    },
    Overlap {
        rental: RentalId,
        first: JobId,
        second: JobId,
    },
    DanglingRental {
        job: JobId,
        rental: RentalId,
    },
    UnreleasedJob {
        job: JobId,
        at: String,
    },
}

impl Violation {
    pub fn class(&self) -> ViolationClass {
        use Violation::*;
        match self {
            MissingAssignment { .. } | DuplicateAssignment { .. } | UnknownJob { .. } => ViolationClass::Assignment,
            Window { .. } => ViolationClass::Window,
            Setup { .. } | MalformedRental { .. } => ViolationClass::Setup,
            Overlap { .. } => ViolationClass::Overlap,
            DanglingRental { .. } | DuplicateRentalId { .. } => ViolationClass::DanglingRental,
            UnreleasedJob { .. } => ViolationClass::Causality,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Violation::*;
        match self {
            MissingAssignment { job } => write!(f, "job {job} has no assignment"),
            DuplicateAssignment { job, count } => write!(f, "job {job} assigned {count} times"),
            UnknownJob { job } => write!(f, "assignment for unknown job {job}"),
            Window { job, start, end } => {
                write!(f, "job {job} processed in [{start}, {end}] outside its window")
            }
            Setup { job, rental } => {
                write!(f, "job {job} not inside the processing span of rental {rental}")
            }
            MalformedRental { rental } => {
                write!(f, "rental {rental} opens before 0 or closes before its setup ends")
            }
            DuplicateRentalId { rental } => write!(f, "rental id {rental} used twice"),
            Overlap { rental, first, second } => {
                write!(f, "jobs {first} and {second} overlap on rental {rental}")
            }
            DanglingRental { job, rental } => {
                write!(f, "job {job} refers to missing rental {rental}")
            }
            UnreleasedJob { job, at } => {
                write!(f, "action at time {at} referenced job {job} before its release")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn classes(&self) -> BTreeSet<ViolationClass> {
        self.violations.iter().map(Violation::class).collect()
    }
}

pub fn validate(schedule: &Schedule, instance: &Instance) -> ValidationReport {
    let params = instance.params();
    let mut out = Vec::new();

    let mut rentals = BTreeMap::new();
    for r in &schedule.rentals {
        if rentals.insert(r.id, r).is_some() {
            out.push(Violation::DuplicateRentalId { rental: r.id });
        }
        if r.open_at.is_negative() || r.close_at < r.ready_at(params) {
            out.push(Violation::MalformedRental { rental: r.id });
        }
    }

    let mut counts: BTreeMap<&JobId, usize> = BTreeMap::new();
    // rental -> (start, end, job) of the first assignment of each job
    let mut per_rental: BTreeMap<RentalId, Vec<(Q, Q, &JobId)>> = BTreeMap::new();
    for a in &schedule.assignments {
        let Some(job) = instance.job(&a.job_id) else {
            out.push(Violation::UnknownJob { job: a.job_id.clone() });
            continue;
        };
        let seen = counts.entry(&a.job_id).or_insert(0);
        *seen += 1;
        let first = *seen == 1;
        let Some(rental) = rentals.get(&a.rental_id) else {
            out.push(Violation::DanglingRental {
                job: a.job_id.clone(),
                rental: a.rental_id,
            });
            continue;
        };
        let end = a.start + job.size(rental.machine_type);
        if a.start < job.release || end > job.deadline {
            out.push(Violation::Window {
                job: a.job_id.clone(),
                start: format_q(&a.start),
                end: format_q(&end),
            });
        }
        if a.start < rental.ready_at(params) || end > rental.close_at {
            out.push(Violation::Setup {
                job: a.job_id.clone(),
                rental: rental.id,
            });
        }
        if first {
            per_rental.entry(rental.id).or_default().push((a.start, end, &a.job_id));
        }
    }

    for job in instance.jobs() {
        match counts.get(&job.id).copied().unwrap_or(0) {
            0 => out.push(Violation::MissingAssignment { job: job.id.clone() }),
            1 => {}
            n => out.push(Violation::DuplicateAssignment {
                job: job.id.clone(),
                count: n,
            }),
        }
    }

    for (rental, mut ivs) in per_rental {
        ivs.sort();
        for i in 0..ivs.len() {
            for k in i + 1..ivs.len() {
                let (s1, e1, j1) = ivs[i];
                let (s2, e2, j2) = ivs[k];
                if s2 >= e1 {
                    break;
                }
                if s1 < e2 && s2 < e1 {
                    out.push(Violation::Overlap {
                        rental,
                        first: j1.clone(),
                        second: j2.clone(),
                    });
                }
            }
        }
    }

    ValidationReport { violations: out }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Assignment, Job, MachineParams, MachineType, Rental};
    use crate::rational::q;

    fn instance(jobs: Vec<Job>) -> Instance {
        Instance::new(MachineParams::new(q(1), q(2), q(2)).unwrap(), jobs).unwrap()
    }

    fn a_rental(id: u32, open: i128, close: i128) -> Rental {
        Rental {
            id: RentalId(id),
            machine_type: MachineType::A,
            open_at: q(open),
            close_at: q(close),
        }
    }

    fn assign(job: &str, rental: u32, start: i128) -> Assignment {
        Assignment {
            job_id: job.into(),
            rental_id: RentalId(rental),
            start: q(start),
        }
    }

    #[test]
    fn feasible_single_job() {
        let inst = instance(vec![Job::new("j", q(0), q(10), q(2), q(2)).unwrap()]);
        let s = Schedule {
            rentals: vec![a_rental(0, 0, 3)],
            assignments: vec![assign("j", 0, 1)],
        };
        assert!(validate(&s, &inst).is_empty());
    }

    #[test]
    fn start_at_release_without_setup_gap() {
        let inst = instance(vec![Job::new("j", q(4), q(10), q(2), q(2)).unwrap()]);
        let s = Schedule {
            rentals: vec![a_rental(0, 4, 6)],
            assignments: vec![assign("j", 0, 4)],
        };
        let rep = validate(&s, &inst);
        assert_eq!(rep.classes(), BTreeSet::from([ViolationClass::Setup]));
    }

    #[test]
    fn overlapping_jobs_on_one_rental() {
        let inst = instance(vec![
            Job::new("x", q(0), q(20), q(2), q(2)).unwrap(),
            Job::new("y", q(0), q(20), q(2), q(2)).unwrap(),
        ]);
        let s = Schedule {
            rentals: vec![a_rental(0, 0, 10)],
            assignments: vec![assign("x", 0, 3), assign("y", 0, 4)],
        };
        let rep = validate(&s, &inst);
        assert_eq!(
            rep.violations,
            vec![Violation::Overlap {
                rental: RentalId(0),
                first: "x".into(),
                second: "y".into()
            }]
        );
    }

    #[test]
    fn touching_jobs_do_not_overlap() {
        let inst = instance(vec![
            Job::new("x", q(0), q(20), q(2), q(2)).unwrap(),
            Job::new("y", q(0), q(20), q(2), q(2)).unwrap(),
        ]);
        let s = Schedule {
            rentals: vec![a_rental(0, 0, 5)],
            assignments: vec![assign("x", 0, 1), assign("y", 0, 3)],
        };
        assert!(validate(&s, &inst).is_empty());
    }

    #[test]
    fn missing_duplicate_and_dangling() {
        let inst = instance(vec![
            Job::new("x", q(0), q(20), q(2), q(2)).unwrap(),
            Job::new("y", q(0), q(20), q(2), q(2)).unwrap(),
        ]);
        let s = Schedule {
            rentals: vec![a_rental(0, 0, 5)],
            assignments: vec![assign("x", 0, 1), assign("x", 0, 1)],
        };
        let rep = validate(&s, &inst);
        assert_eq!(rep.classes(), BTreeSet::from([ViolationClass::Assignment]));
        assert_eq!(rep.violations.len(), 2);

        let s = Schedule {
            rentals: vec![a_rental(0, 0, 5)],
            assignments: vec![assign("x", 0, 1), assign("y", 7, 3)],
        };
        assert_eq!(
            validate(&s, &inst).violations,
            vec![Violation::DanglingRental {
                job: "y".into(),
                rental: RentalId(7)
            }]
        );
    }

    #[test]
    fn finishing_exactly_at_close_and_deadline_is_allowed() {
        let inst = instance(vec![Job::new("j", q(0), q(5), q(2), q(2)).unwrap()]);
        let s = Schedule {
            rentals: vec![a_rental(0, 2, 5)],
            assignments: vec![assign("j", 0, 3)],
        };
        assert!(validate(&s, &inst).is_empty());
    }
}
