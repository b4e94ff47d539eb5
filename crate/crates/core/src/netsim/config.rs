use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::channel::ChannelModel;
use super::SimError;
use crate::graph::NodeId;
use crate::protocol::NetworkParams;
use crate::time::{SimDuration, SimTime};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub name: String,
    pub n: usize,
    #[serde(default)]
    pub params: NetworkParams,
    #[serde(default)]
    pub channel: ChannelModel,
    /// Dealer cycle over `0..n`, random when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_cycle: Option<Vec<u32>>,
    #[serde(default)]
    pub positions: Vec<Placement>,
    /// Nodes broadcast proofs of life on their own when their clock runs out.
    #[serde(default = "yes")]
    pub auto_proof_of_life: bool,
    #[serde(default = "one_second")]
    pub tick: SimDuration,
    pub duration: SimDuration,
    #[serde(default)]
    pub churn: ChurnConfig,
    #[serde(default)]
    pub schedule: Vec<Directive>,
}

fn yes() -> bool {
    true
}
fn one_second() -> SimDuration {
    SimDuration::from_secs(1)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Placement {
    pub node: NodeId,
    pub x: f64,
    pub y: f64,
}

/// Per-second probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChurnConfig {
    #[serde(default)]
    pub p_off: f64,
    #[serde(default)]
    pub p_on: f64,
    /// A new device asks to join.
    #[serde(default)]
    pub p_insert: f64,
}

impl ChurnConfig {
    pub fn is_active(&self) -> bool {
        self.p_off > 0.0 || self.p_on > 0.0 || self.p_insert > 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttackKind {
    Replay,
    Sybil,
    Spoof,
    Eavesdrop,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SybilMode {
    DuplicateAccess,
    DuplicateInsert,
    MultiPol,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "action", rename_all = "snake_case", deny_unknown_fields)]
pub enum Directive {
    Insert {
        at: SimTime,
        #[serde(default)]
        authenticator: Option<NodeId>,
        #[serde(default)]
        force_id: Option<NodeId>,
        #[serde(default)]
        between: Option<[NodeId; 2]>,
        #[serde(default = "yes")]
        vetted: bool,
    },
    NodeOff {
        at: SimTime,
        node: NodeId,
        /// Leave without a trace row.
        #[serde(default)]
        silent: bool,
    },
    NodeOn {
        at: SimTime,
        node: NodeId,
        #[serde(default)]
        authenticator: Option<NodeId>,
    },
    /// Identifier handed to the next insertion.
    ForceId { at: SimTime, id: NodeId },
    ProofOfLife { at: SimTime, node: NodeId },
    Move { at: SimTime, node: NodeId, x: f64, y: f64 },
    Attack {
        at: SimTime,
        kind: AttackKind,
        #[serde(default)]
        mode: Option<SybilMode>,
        #[serde(default)]
        target: Option<NodeId>,
        #[serde(default)]
        authenticator: Option<NodeId>,
        /// Legitimate node the adversary operates from.
        #[serde(default)]
        via: Option<NodeId>,
        #[serde(default = "one")]
        trials: usize,
    },
}

fn one() -> usize {
    1
}

impl Directive {
    pub fn at(&self) -> SimTime {
        match self {
            Directive::Insert { at, .. }
            | Directive::NodeOff { at, .. }
            | Directive::NodeOn { at, .. }
            | Directive::ForceId { at, .. }
            | Directive::ProofOfLife { at, .. }
            | Directive::Move { at, .. }
            | Directive::Attack { at, .. } => *at,
        }
    }
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self, SimError> {
        let cfg: ScenarioConfig =
            serde_json::from_str(text).map_err(|e| SimError::ConfigInvalid(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |m: String| Err(SimError::ConfigInvalid(m));
        self.params
            .validate()
            .map_err(|e| SimError::ConfigInvalid(e.to_string()))?;
        if self.n < 3 {
            return bad(format!("{} nodes cannot carry a cycle", self.n));
        }
        if self.params.degree > self.n {
            return bad(format!("degree {} exceeds {} nodes", self.params.degree, self.n));
        }
        if let Some(hc) = &self.initial_cycle {
            let ids: BTreeSet<u32> = hc.iter().copied().collect();
            if hc.len() != self.n || ids != (0..self.n as u32).collect() {
                return bad("initial_cycle must order 0..n".into());
            }
        }
        for (name, p) in [
            ("p_off", self.churn.p_off),
            ("p_on", self.churn.p_on),
            ("p_insert", self.churn.p_insert),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("{name} = {p} is not a probability"));
            }
        }
        if self.tick == SimDuration::ZERO {
            return bad("tick must be positive".into());
        }
        if self.channel.latency == SimDuration::ZERO {
            return bad("latency must be positive".into());
        }
        if !(self.channel.open_range >= 0.0 && self.channel.secure_range >= 0.0) {
            return bad("ranges must be non-negative".into());
        }
        let start = SimTime::ZERO + self.channel.latency;
        for d in &self.schedule {
            if d.at() < start {
                return bad(format!("directive at {} precedes initialization at {start}", d.at()));
            }
            if let Directive::Attack {
                kind: AttackKind::Sybil,
                mode: None,
                ..
            } = d
            {
                return bad("sybil attack without a mode".into());
            }
        }
        Ok(())
    }
}
