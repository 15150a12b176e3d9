//! Online algorithms.

mod a1;
mod batched;
mod greedyfit;

pub use a1::{a1_choose_type, A1};
pub use batched::{
    bd_classify, condition_c, phase_length, BatchedDispatch, EpsilonError, PhaseRecord, PhaseState, SlackClass,
    Unclassifiable, EXACT_BATCH_LIMIT,
};
pub use greedyfit::{
    greedyfit_reasonable, FitChoice, GreedyFit, GreedyFitPolicy, JobOrder, OpenChoice, PolicyParseError,
};

use std::fmt;
use std::str::FromStr;

use crate::harness::OnlineAlgorithm;
use crate::rational::{format_q, parse_q, Q};

/// An algorithm picked by name: `a1`, `greedyfit[:<policy>]` or `bd:<ε>`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AlgorithmSpec {
    A1,
    GreedyFit(GreedyFitPolicy),
    Batched(Q),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlgorithmSpecError {
    #[error("unknown algorithm `{0}`: expected a1, greedyfit[:<policy>] or bd:<epsilon>")]
    Unknown(String),
    #[error(transparent)]
    Policy(#[from] PolicyParseError),
    #[error("bad epsilon in `{0}`")]
    Epsilon(String),
    #[error(transparent)]
    EpsilonRange(#[from] EpsilonError),
}

impl AlgorithmSpec {
    pub fn build(&self) -> Box<dyn OnlineAlgorithm + Send> {
        match self {
            AlgorithmSpec::A1 => Box::new(A1),
            AlgorithmSpec::GreedyFit(p) => Box::new(GreedyFit::new(*p)),
            AlgorithmSpec::Batched(eps) => Box::new(BatchedDispatch::new(*eps).expect("epsilon checked when parsed")),
        }
    }

    pub fn epsilon(&self) -> Option<Q> {
        match self {
            AlgorithmSpec::Batched(eps) => Some(*eps),
            _ => None,
        }
    }
}

impl fmt::Display for AlgorithmSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgorithmSpec::A1 => f.write_str("a1"),
            AlgorithmSpec::GreedyFit(p) if *p == GreedyFitPolicy::default() => f.write_str("greedyfit"),
            AlgorithmSpec::GreedyFit(p) => write!(f, "greedyfit:{p}"),
            AlgorithmSpec::Batched(eps) => write!(f, "bd:{}", format_q(eps)),
        }
    }
}

impl FromStr for AlgorithmSpec {
    type Err = AlgorithmSpecError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s, None),
        };
        match (name, arg) {
            ("a1", None) => Ok(AlgorithmSpec::A1),
            ("greedyfit", arg) => Ok(AlgorithmSpec::GreedyFit(arg.unwrap_or("default").parse()?)),
            ("bd", Some(eps)) => {
                let eps = parse_q(eps).map_err(|_| AlgorithmSpecError::Epsilon(s.into()))?;
                BatchedDispatch::new(eps)?;
                Ok(AlgorithmSpec::Batched(eps))
            }
            _ => Err(AlgorithmSpecError::Unknown(s.into())),
        }
    }
}
