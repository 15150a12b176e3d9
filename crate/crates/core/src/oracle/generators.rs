//! Instance families from the lower-bound constructions, plus random
//! instances. All generators are pure functions of their arguments.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::model::{Instance, Job, MachineParams, ModelError};
use crate::rational::{format_q, Q};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GenError {
    #[error("invalid generator parameters: {0}")]
    Parameter(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), GenError> {
    if ok {
        Ok(())
    } else {
        Err(GenError::Parameter(msg()))
    }
}

fn int(n: i128) -> Q {
    Q::from_integer(n)
}

fn ceil(v: Q) -> i128 {
    v.ceil().to_integer()
}

/// Job released at 0 with unit sizes that every family starts with.
fn seed_job(setup_b: Q, beta: Q) -> Result<Job, ModelError> {
    Job::new("seed", int(0), setup_b + int(1) + beta, int(1), int(1))
}

fn burst(count: i128, t: Q, deadline: Q, size_a: Q, size_b: Q) -> Result<Vec<Job>, ModelError> {
    (0..count)
        .map(|k| Job::new(format!("b{k:03}"), t, deadline, size_a, size_b))
        .collect()
}

/// Two-stage instance with minimum slack `beta < s_B`.
///
/// Job 1 at 0 fits only on `B`. If `t` is given, job 2 at `t` has
/// `d = t + p_B + beta` and is too big for `A`, so an online algorithm
/// without an open `B` machine at `t` misses it.
pub fn gen_prop1(params: &MachineParams, beta: Q, t: Option<Q>) -> Result<Instance, GenError> {
    check(beta >= int(0) && beta < params.setup_b(), || {
        format!("beta must lie in [0, s_B), got {}", format_q(&beta))
    })?;
    let (s_b, one) = (params.setup_b(), int(1));
    let mut jobs = vec![Job::new("j1", int(0), s_b + one + beta, s_b + beta + int(2), one)?];
    if let Some(t) = t {
        check(t > int(0), || "t must be positive".into())?;
        jobs.push(Job::new("j2", t, t + one + beta, one + beta + one, one)?);
    }
    Ok(Instance::new(params.clone(), jobs)?)
}

/// `k = (1+2ε)s / (2εs + δ)`.
pub fn lb_mid_k(epsilon: Q, s: Q, delta: Q) -> Q {
    (int(1) + int(2) * epsilon) * s / (int(2) * epsilon * s + delta)
}

/// `k = (s+1) / (1 + εs + δ)`.
pub fn lb_small_k(epsilon: Q, s: Q, delta: Q) -> Q {
    (s + int(1)) / (int(1) + epsilon * s + delta)
}

fn burst_count(c: Q, t: Q, k: Q) -> Result<i128, GenError> {
    let n = c * t * int(ceil(k));
    check(n.is_integer(), || {
        format!("c·t·⌈k⌉ = {} is not an integer", format_q(&n))
    })?;
    Ok(n.to_integer())
}

/// `s_A = s_B = s`, `β = (1+ε)s`, `1/s ≤ ε ≤ 1`: a seed job, then at `t`
/// `c·t·⌈k⌉` jobs with `p_B = εs`, `p_A = 2εs + δ` sharing the deadline
/// `t + (1+2ε)s`. Two of them fit on a `B` machine opened at `t`, none on `A`.
pub fn gen_lb_mid_eps(epsilon: Q, s: Q, c: Q, t: Q, delta: Q) -> Result<Instance, GenError> {
    check(epsilon * s >= int(1) && epsilon <= int(1), || {
        format!("epsilon must lie in [1/s, 1], got {}", format_q(&epsilon))
    })?;
    check(delta > int(0) && t > int(0), || "delta and t must be positive".into())?;
    let params = MachineParams::new(s, s, c)?;
    let beta = (int(1) + epsilon) * s;
    let n = burst_count(c, t, lb_mid_k(epsilon, s, delta))?;
    let p_b = epsilon * s;
    let mut jobs = vec![seed_job(s, beta)?];
    jobs.extend(burst(n, t, t + p_b + beta, int(2) * epsilon * s + delta, p_b)?);
    Ok(Instance::new(params, jobs)?)
}

/// `s_A = s_B = s`, `β = (1+ε)s`, `0 ≤ ε < 1/s`: a seed job, then at `t`
/// `c·t·⌈k⌉` jobs with `p_B = 1`, `p_A = 1 + εs + δ`, `d = t + 1 + β`.
pub fn gen_lb_small_eps_a(epsilon: Q, s: Q, c: Q, t: Q, delta: Q) -> Result<Instance, GenError> {
    check(epsilon >= int(0) && epsilon * s < int(1), || {
        format!("epsilon must lie in [0, 1/s), got {}", format_q(&epsilon))
    })?;
    check(delta > int(0) && t > int(0), || "delta and t must be positive".into())?;
    let params = MachineParams::new(s, s, c)?;
    let beta = (int(1) + epsilon) * s;
    let n = burst_count(c, t, lb_small_k(epsilon, s, delta))?;
    let mut jobs = vec![seed_job(s, beta)?];
    jobs.extend(burst(n, t, t + int(1) + beta, int(1) + epsilon * s + delta, int(1))?);
    Ok(Instance::new(params, jobs)?)
}

/// Arbitrary setups, `β = (1+ε)s_B` with `0 ≤ ε < 1/s_B`: a seed job, then
/// `t` jobs at time `t` with `p_B = 1`, `p_A = s_B + 3`, `d = t + 1 + β`.
pub fn gen_lb_small_eps_b(params: &MachineParams, epsilon: Q, t: i128) -> Result<Instance, GenError> {
    let s_b = params.setup_b();
    check(epsilon >= int(0) && epsilon * s_b < int(1), || {
        format!("epsilon must lie in [0, 1/s_B), got {}", format_q(&epsilon))
    })?;
    check(t > 0, || "t must be positive".into())?;
    let beta = (int(1) + epsilon) * s_b;
    let mut jobs = vec![seed_job(s_b, beta)?];
    jobs.extend(burst(t, int(t), int(t) + int(1) + beta, s_b + int(3), int(1))?);
    Ok(Instance::new(params.clone(), jobs)?)
}

/// `s_A = 1`, `c = 1`: `j0` at 0 with `p_A = s_B`, `p_B = x`, `d = s_B²`,
/// then `s_B − 1` jobs at `offset` with `p_A = s_B`, `p_B = 1`, same deadline.
///
/// `offset` is a small positive release time for the followers.
pub fn gen_greedyfit_adv(setup_b: i128, x: Q, offset: Q) -> Result<Instance, GenError> {
    check(setup_b >= 2, || "s_B must be at least 2".into())?;
    check(x >= int(1), || "x must be at least 1".into())?;
    check(offset > int(0) && offset < int(1), || {
        "offset must lie in (0, 1)".into()
    })?;
    let s = int(setup_b);
    let d = s * s;
    let params = MachineParams::new(int(1), s, int(1))?;
    let mut jobs = vec![Job::new("j0", int(0), d, s, x)?];
    for k in 1..setup_b {
        jobs.push(Job::new(format!("j{k}"), offset, d, s, int(1))?);
    }
    Ok(Instance::new(params, jobs)?)
}

/// `n` jobs, job `k` released at `k` with `p_B = 1`, `p_A = 1 + s_B` and
/// `d = k + 1 + s_B`: exclusive machines must be `B`, yet one `B` machine
/// opened at 0 serves them all.
pub fn gen_stacked_b(params: &MachineParams, n: usize) -> Result<Instance, GenError> {
    let s_b = params.setup_b();
    let jobs = (0..n as i128)
        .map(|k| Job::new(format!("j{k:03}"), int(k), int(k) + int(1) + s_b, int(1) + s_b, int(1)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Instance::new(params.clone(), jobs)?)
}

/// Seeded random instance whose minimum slack is exactly `beta`.
///
/// Integer sizes in `[1, 2s_B]`, releases in `[0, 4s_B]`. Every job gets slack
/// `beta` plus a random integer in `[0, 2s_B]` on its shorter type, except one
/// job that is pinned at exactly `beta`.
pub fn gen_random(seed: u64, n: usize, params: &MachineParams, beta: Q) -> Result<Instance, GenError> {
    check(beta >= int(0), || "beta must be non-negative".into())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let size_max = (int(2) * params.setup_b()).floor().to_integer().max(1);
    let release_max = (int(4) * params.setup_b()).floor().to_integer();
    let pinned = if n == 0 { 0 } else { rng.gen_range(0..n) };
    let mut jobs = Vec::with_capacity(n);
    for k in 0..n {
        let r = int(rng.gen_range(0..=release_max));
        let pa = int(rng.gen_range(1..=size_max));
        let pb = int(rng.gen_range(1..=size_max));
        let extra = if k == pinned { 0 } else { rng.gen_range(0..=size_max) };
        jobs.push(Job::new(
            format!("j{k}"),
            r,
            r + pa.min(pb) + beta + int(extra),
            pa,
            pb,
        )?);
    }
    Ok(Instance::new(params.clone(), jobs)?)
}

/// Which construction an [`AdversaryParams`] describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Prop1,
    LbMid,
    LbSmallA,
    LbSmallB,
    Greedyfit,
    StackedB,
    Random,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::Prop1,
        Family::LbMid,
        Family::LbSmallA,
        Family::LbSmallB,
        Family::Greedyfit,
        Family::StackedB,
        Family::Random,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Prop1 => "prop1",
            Family::LbMid => "lb-mid",
            Family::LbSmallA => "lb-small-a",
            Family::LbSmallB => "lb-small-b",
            Family::Greedyfit => "greedyfit",
            Family::StackedB => "stacked-b",
            Family::Random => "random",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = GenError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| GenError::Parameter(format!("unknown family {s:?}")))
    }
}

/// Every knob of every family; each generator reads the ones it needs.
///
/// `t` is the adversary's delay (or the job count for `lb-small-b`), `n` the
/// job count for `stacked-b` and `random`, `x` the probe size of `greedyfit`,
/// and `beta` is only read by `prop1` and `random`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdversaryParams {
    pub family: Family,
    #[serde(with = "crate::rational::serde_q")]
    pub epsilon: Q,
    #[serde(with = "crate::rational::serde_q")]
    pub delta: Q,
    #[serde(with = "crate::rational::serde_q")]
    pub setup_a: Q,
    #[serde(with = "crate::rational::serde_q")]
    pub setup_b: Q,
    #[serde(with = "crate::rational::serde_q")]
    pub cost_b: Q,
    #[serde(with = "crate::rational::serde_q")]
    pub t: Q,
    pub n: usize,
    #[serde(with = "crate::rational::serde_q")]
    pub x: Q,
    #[serde(with = "crate::rational::serde_q")]
    pub beta: Q,
    pub seed: u64,
}

impl AdversaryParams {
    /// Preset for `family`: `s_A = 1`, `s_B = 4`, `c = 1`, `ε = 1`,
    /// `δ = 1/8`, `t = 4`.
    pub fn preset(family: Family) -> Self {
        let mut p = Self {
            family,
            epsilon: int(1),
            delta: Q::new(1, 8),
            setup_a: int(1),
            setup_b: int(4),
            cost_b: int(1),
            t: int(4),
            n: 6,
            x: int(1),
            beta: int(8),
            seed: 0,
        };
        match family {
            Family::Prop1 => p.beta = int(0),
            Family::LbMid => p.setup_a = p.setup_b,
            Family::LbSmallA => {
                p.setup_a = p.setup_b;
                p.epsilon = int(0);
            }
            Family::LbSmallB => {
                p.epsilon = int(0);
                p.t = int(3);
            }
            Family::StackedB => p.n = 8,
            Family::Greedyfit | Family::Random => {}
        }
        p
    }

    pub fn machine_params(&self) -> Result<MachineParams, GenError> {
        Ok(MachineParams::new(self.setup_a, self.setup_b, self.cost_b)?)
    }

    /// Sets one field from its textual value, as in `epsilon=1/2`.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), GenError> {
        let bad = |e: &dyn fmt::Display| GenError::Parameter(format!("{key}: {e}"));
        let rational = || crate::rational::parse_q(value).map_err(|e| bad(&e));
        match key {
            "epsilon" | "eps" => self.epsilon = rational()?,
            "delta" => self.delta = rational()?,
            "s_a" | "setup_a" => self.setup_a = rational()?,
            "s_b" | "setup_b" | "s" => {
                self.setup_b = rational()?;
                if key == "s" {
                    self.setup_a = self.setup_b;
                }
            }
            "c" | "cost_b" => self.cost_b = rational()?,
            "t" => self.t = rational()?,
            "x" => self.x = rational()?,
            "beta" => self.beta = rational()?,
            "n" => self.n = value.parse().map_err(|e| bad(&e))?,
            "seed" => self.seed = value.parse().map_err(|e| bad(&e))?,
            _ => return Err(GenError::Parameter(format!("unknown parameter {key:?}"))),
        }
        Ok(())
    }

    pub fn generate(&self) -> Result<Instance, GenError> {
        let integral = |v: Q, what: &str| -> Result<i128, GenError> {
            check(v.is_integer(), || format!("{what} must be an integer"))?;
            Ok(v.to_integer())
        };
        match self.family {
            Family::Prop1 => {
                let t = (self.t > int(0)).then_some(self.t);
                gen_prop1(&self.machine_params()?, self.beta, t)
            }
            Family::LbMid => gen_lb_mid_eps(self.epsilon, self.setup_b, self.cost_b, self.t, self.delta),
            Family::LbSmallA => gen_lb_small_eps_a(self.epsilon, self.setup_b, self.cost_b, self.t, self.delta),
            Family::LbSmallB => gen_lb_small_eps_b(&self.machine_params()?, self.epsilon, integral(self.t, "t")?),
            Family::Greedyfit => gen_greedyfit_adv(integral(self.setup_b, "s_B")?, self.x, self.delta),
            Family::StackedB => gen_stacked_b(&self.machine_params()?, self.n),
            Family::Random => gen_random(self.seed, self.n, &self.machine_params()?, self.beta),
        }
    }

    /// The minimum slack the construction is meant to have.
    pub fn intended_beta(&self) -> Q {
        match self.family {
            Family::Prop1 | Family::Random => self.beta,
            // the followers, released at the offset
            Family::Greedyfit => self.setup_b * self.setup_b - int(1) - self.delta,
            Family::StackedB => self.setup_b,
            Family::LbMid | Family::LbSmallA | Family::LbSmallB => (int(1) + self.epsilon) * self.setup_b,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::min_slack;
    use crate::rational::{frac, q};

    #[test]
    fn prop1_formulas() {
        let p = MachineParams::new(q(1), q(4), q(1)).unwrap();
        let i = gen_prop1(&p, q(0), Some(q(100))).unwrap();
        let j2 = i.job(&"j2".into()).unwrap();
        assert_eq!((j2.deadline, j2.size_b), (q(101), q(1)));
        assert!(j2.size_a > q(1));
        assert_eq!(min_slack(&i).unwrap(), q(0));
        assert!(gen_prop1(&p, q(4), None).is_err());
    }

    #[test]
    fn lb_mid_shape() {
        assert_eq!(lb_mid_k(q(1), q(4), frac(1, 2)), frac(12, 17) * q(2));
        assert_eq!(lb_mid_k(q(1), q(4), frac(1, 2)).ceil(), q(2));
        let i = gen_lb_mid_eps(q(1), q(4), q(1), q(4), frac(1, 2)).unwrap();
        assert_eq!(i.len(), 1 + 8);
        assert!(i
            .jobs()
            .iter()
            .filter(|j| j.release == q(4))
            .all(|j| j.deadline == q(4 + 12)));
        assert_eq!(min_slack(&i).unwrap(), q(8));
        assert!(gen_lb_mid_eps(frac(1, 8), q(4), q(1), q(4), frac(1, 8)).is_err());
    }

    #[test]
    fn lb_small_shapes() {
        assert_eq!(lb_small_k(q(0), q(4), frac(1, 2)), frac(10, 3));
        let i = gen_lb_small_eps_a(q(0), q(4), q(1), q(2), frac(1, 2)).unwrap();
        assert_eq!(i.len(), 1 + 2 * 4);
        assert_eq!(min_slack(&i).unwrap(), q(4));
        let p = MachineParams::new(q(1), q(2), q(1)).unwrap();
        let i = gen_lb_small_eps_b(&p, q(0), 3).unwrap();
        assert!(i.jobs().iter().filter(|j| j.id.0 != "seed").all(|j| j.size_a > q(4)));
        assert_eq!(min_slack(&i).unwrap(), q(2));
    }

    #[test]
    fn greedyfit_and_stacked() {
        let i = gen_greedyfit_adv(4, q(2), frac(1, 8)).unwrap();
        assert_eq!(i.len(), 4);
        assert!(i.jobs().iter().all(|j| j.deadline == q(16)));
        let p = MachineParams::new(q(1), q(8), q(2)).unwrap();
        let i = gen_stacked_b(&p, 16).unwrap();
        assert_eq!(min_slack(&i).unwrap(), q(8));
    }

    #[test]
    fn random_is_seeded_and_pinned() {
        let p = MachineParams::new(q(2), q(4), q(3)).unwrap();
        let a = gen_random(7, 6, &p, q(6)).unwrap();
        assert_eq!(a, gen_random(7, 6, &p, q(6)).unwrap());
        assert_ne!(a, gen_random(8, 6, &p, q(6)).unwrap());
        assert_eq!(min_slack(&a).unwrap(), q(6));
        assert!(gen_random(1, 0, &p, q(6)).unwrap().is_empty());
    }

    #[test]
    fn presets_match_intended_beta() {
        for f in Family::ALL {
            let p = AdversaryParams::preset(f);
            let i = p.generate().unwrap();
            assert_eq!(min_slack(&i).unwrap(), p.intended_beta(), "{f}");
            assert_eq!(f.name().parse::<Family>().unwrap(), f);
        }
    }
}
