//! Exact offline optimum for small instances, adversarial generators and
//! cheap witnesses for instances beyond the oracle's reach.

mod brute;
mod generators;
mod witness;

pub use brute::{brute_force_opt, OptResult, OracleError, DEFAULT_ORACLE_LIMIT};
pub use generators::{
    gen_greedyfit_adv, gen_lb_mid_eps, gen_lb_small_eps_a, gen_lb_small_eps_b, gen_prop1, gen_random, gen_stacked_b,
    lb_mid_k, lb_small_k, AdversaryParams, Family, GenError,
};
pub use witness::{best_witness, group_witness, single_machine_witness};
