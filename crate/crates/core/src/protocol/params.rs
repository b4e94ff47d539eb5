use serde::{Deserialize, Serialize};

use super::ProtocolError;
use crate::time::SimDuration;
use crate::zkp::DEFAULT_ROUNDS;

/// Network-wide constants every legitimate node agrees on.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkParams {
    /// Longest tolerated off-line stretch, and proof-of-life cadence.
    #[serde(default = "default_period", alias = "T")]
    pub period: SimDuration,
    #[serde(default = "default_rounds", alias = "l")]
    pub rounds: usize,
    /// Neighbor declarations contributed per node (`2m/n`).
    #[serde(default = "default_degree")]
    pub degree: usize,
    #[serde(default = "default_threshold")]
    pub termination_threshold: usize,
}

fn default_period() -> SimDuration {
    SimDuration::from_secs(10)
}
fn default_rounds() -> usize {
    DEFAULT_ROUNDS
}
fn default_degree() -> usize {
    6
}
fn default_threshold() -> usize {
    3
}

impl Default for NetworkParams {
    fn default() -> Self {
        Self {
            period: default_period(),
            rounds: default_rounds(),
            degree: default_degree(),
            termination_threshold: default_threshold(),
        }
    }
}

impl NetworkParams {
    pub fn validate(&self) -> Result<(), ProtocolError> {
        if self.period == SimDuration::ZERO {
            return Err(ProtocolError::BadParams("period must be positive".into()));
        }
        if self.rounds == 0 {
            return Err(ProtocolError::BadParams("at least one zkp round is required".into()));
        }
        if self.degree < 3 {
            return Err(ProtocolError::BadParams(format!(
                "degree {} is below 3",
                self.degree
            )));
        }
        Ok(())
    }

    /// Target initial edge count `m` for `n` nodes.
    pub fn target_edges(&self, n: usize) -> usize {
        n * self.degree / 2
    }
}
