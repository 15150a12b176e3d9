//! Scheduling jobs with deadlines on machines rented from the cloud.
//!
//! Two machine types `A` and `B` can be rented for arbitrary durations. A
//! machine of type `τ` needs a setup of `s_τ` time units before it can process
//! anything and costs `c_τ` per time unit while open (`c_A = 1`, `c_B = c`).
//! Jobs arrive online with a release time, a deadline and a size per type.
//!
//! The crate contains the data model and feasibility validator, an online
//! simulation harness, the online algorithms A1, GreedyFit and
//! BatchedDispatch, the tentative-schedule integer program used by
//! BatchedDispatch, an exact offline optimum for small instances, and
//! generators for the adversarial instance families.

pub mod algorithms;
pub mod bench;
pub mod cost;
pub mod harness;
pub mod io;
pub mod model;
pub mod oracle;
pub mod rational;
pub mod tentative;
pub mod validate;

pub use cost::{rental_cost, total_cost};
pub use model::{
    min_slack, slack, Assignment, Instance, Job, JobId, MachineParams, MachineType, ModelError, Rental, RentalId,
    Schedule,
};
pub use rational::{frac, q, Q};
pub use validate::{validate, ValidationReport, Violation, ViolationClass};
