//! Deterministic discrete-event simulator for the membership protocol.
//!
//! All randomness comes from one seed split into independent streams, so a
//! scenario and a seed fully determine the trace and the metrics.

mod channel;
mod churn;
mod config;
mod engine;
mod metrics;
pub mod scenarios;
mod trace;

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::Path;

use thiserror::Error;

use crate::attacks::CapturedSession;
use crate::graph::NodeId;
use crate::protocol::{NodeState, ProtocolError};
use crate::time::SimTime;

pub use channel::{ChannelModel, Position};
pub use churn::{churn_step, ChurnEvent};
pub use config::{AttackKind, ChurnConfig, Directive, Placement, ScenarioConfig, SybilMode};
pub use engine::{Engine, RunOptions};
pub use metrics::{summarize_csv, Metrics, ShareSummary};
pub use trace::{hc_matches, match_golden, normalize_event, parse_golden, GoldenRow, TraceLog, TraceRow};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("invalid scenario: {0}")]
    ConfigInvalid(String),
    #[error("invariant violated after event {event_index} at {time}: {detail}")]
    InvariantViolation {
        event_index: u64,
        time: SimTime,
        detail: String,
    },
    #[error("node {0} cannot broadcast while off-line")]
    SenderOffline(NodeId),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub trace: TraceLog,
    pub metrics: Metrics,
    pub states: BTreeMap<NodeId, NodeState>,
    /// Honest access sessions as seen on the open channel.
    pub archive: Vec<CapturedSession>,
    pub attacks: Vec<String>,
    pub terminated: bool,
    pub events: u64,
}

pub fn run_scenario(config: &ScenarioConfig, seed: u64) -> Result<RunOutput, SimError> {
    run_scenario_with(config, RunOptions::seeded(seed))
}

pub fn run_scenario_with(config: &ScenarioConfig, opts: RunOptions) -> Result<RunOutput, SimError> {
    Engine::new(config.clone(), opts).run()
}

impl RunOutput {
    pub fn attack_report(&self) -> String {
        let mut out = String::new();
        for line in &self.attacks {
            out.push_str(line);
            out.push('\n');
        }
        out
    }
}

/// Writes `trace.tsv`, `metrics.csv`, `events.csv` and `attacks.txt`.
pub fn write_outputs(out: &RunOutput, dir: &Path) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("trace.tsv"), out.trace.to_tsv())?;
    fs::write(dir.join("metrics.csv"), out.metrics.to_csv())?;
    fs::write(dir.join("events.csv"), out.metrics.events_csv())?;
    fs::write(dir.join("attacks.txt"), out.attack_report())?;
    Ok(())
}
