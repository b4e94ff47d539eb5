use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use super::channel::Position;
use super::churn::{churn_step, ChurnEvent};
use super::config::{AttackKind, Directive, ScenarioConfig, SybilMode};
use super::metrics::Metrics;
use super::trace::TraceLog;
use super::{RunOutput, SimError};
use crate::attacks::{conflicting_device, eavesdrop_analysis, replay_attack, CapturedSession};
use crate::graph::{splice_delete, HamiltonianCycle, NodeId};
use crate::protocol::{
    access_control, apply_deletion, apply_insertion, begin_insertion, complete_insertion,
    emit_proof_of_life, grant_access, handle_pol_quorum, initialize_network,
    initialize_with_cycle, record_echo, run_deletion_sweep, AccessClaim, AccessError, Category,
    DeviceId, InsertionAnnounce, NodeState, PolDecision, ProtocolError, ProtocolMessage,
};
use crate::time::{SimDuration, SimTime};
use crate::zkp::{
    CheatingProver, HonestProver, RandomChallenger, Transcript, ZkProver, HASH_ID,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    pub seed: u64,
    pub check_invariants: bool,
}

impl RunOptions {
    pub fn seeded(seed: u64) -> Self {
        Self {
            seed,
            check_invariants: true,
        }
    }
}

#[derive(Debug, Clone)]
struct Node {
    state: NodeState,
    pos: Position,
    /// The last departure produced a trace row.
    off_logged: bool,
    timer_gen: u64,
    /// The device re-entered under another identifier.
    ghost: bool,
}

/// Where an off-line device's record lives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Slot {
    Member(NodeId),
    Detached(DeviceId),
}

#[derive(Debug, Clone)]
struct PendingInsertion {
    announce: InsertionAnnounce,
    between: Option<(NodeId, NodeId)>,
    requested: SimTime,
    reached: BTreeSet<NodeId>,
    acks: usize,
}

#[derive(Debug, Clone)]
enum Event {
    Init,
    Directive(Directive),
    InsertCollect(PendingInsertion),
    InsertApply(PendingInsertion),
    PolClose {
        initiator: NodeId,
        reached: BTreeSet<NodeId>,
    },
    Timer {
        node: NodeId,
        gen: u64,
        force: bool,
    },
    ChurnTick,
}

fn stream(seed: u64, k: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(k);
    r
}

fn id_list(ids: impl IntoIterator<Item = NodeId>) -> String {
    ids.into_iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

pub struct Engine {
    cfg: ScenarioConfig,
    opts: RunOptions,
    now: SimTime,
    queue: BTreeMap<(SimTime, u64), Event>,
    seq: u64,
    nodes: BTreeMap<NodeId, Node>,
    detached: BTreeMap<DeviceId, Node>,
    reserved: BTreeSet<NodeId>,
    reentering: BTreeSet<DeviceId>,
    pending_force: Option<NodeId>,
    pol_open: BTreeSet<NodeId>,
    next_device: u64,
    rng_init: ChaCha8Rng,
    rng_churn: ChaCha8Rng,
    rng_protocol: ChaCha8Rng,
    rng_prover: ChaCha8Rng,
    rng_attack: ChaCha8Rng,
    challenger: RandomChallenger<ChaCha8Rng>,
    trace: TraceLog,
    metrics: Metrics,
    archive: Vec<CapturedSession>,
    attacks: Vec<String>,
    terminated: bool,
    initialized: bool,
    #[cfg(test)]
    sabotage_at: Option<u64>,
}

impl Engine {
    pub fn new(cfg: ScenarioConfig, opts: RunOptions) -> Self {
        let seed = opts.seed;
        let digest = hex::encode(Sha256::digest(
            serde_json::to_vec(&cfg).expect("config serializes"),
        ));
        let trace = TraceLog {
            header: vec![
                ("hash".into(), HASH_ID.into()),
                ("seed".into(), seed.to_string()),
                ("config".into(), digest),
            ],
            rows: Vec::new(),
        };
        Self {
            cfg,
            opts,
            now: SimTime::ZERO,
            queue: BTreeMap::new(),
            seq: 0,
            nodes: BTreeMap::new(),
            detached: BTreeMap::new(),
            reserved: BTreeSet::new(),
            reentering: BTreeSet::new(),
            pending_force: None,
            pol_open: BTreeSet::new(),
            next_device: 0,
            rng_init: stream(seed, 1),
            rng_churn: stream(seed, 2),
            rng_protocol: stream(seed, 3),
            rng_prover: stream(seed, 4),
            challenger: RandomChallenger::new(stream(seed, 5)),
            rng_attack: stream(seed, 6),
            trace,
            metrics: Metrics::default(),
            archive: Vec::new(),
            attacks: Vec::new(),
            terminated: false,
            initialized: false,
            #[cfg(test)]
            sabotage_at: None,
        }
    }

    fn period(&self) -> SimDuration {
        self.cfg.params.period
    }

    fn latency(&self) -> SimDuration {
        self.cfg.channel.latency
    }

    fn schedule(&mut self, at: SimTime, ev: Event) {
        debug_assert!(at >= self.now, "event scheduled in the past");
        self.queue.insert((at.max(self.now), self.seq), ev);
        self.seq += 1;
    }

    fn row(&mut self, event: impl Into<String>, hc: Option<String>) {
        self.trace.push(self.now, event, hc);
    }

    fn account(&mut self, msg: &ProtocolMessage, copies: usize) {
        self.metrics.record(msg.category(), msg.encoded_len(), copies);
    }

    fn account_as(&mut self, category: Category, msg: &ProtocolMessage, copies: usize) {
        self.metrics.record(category, msg.encoded_len(), copies);
    }

    fn account_zkp(&mut self, t: &Transcript) {
        let messages: usize = t
            .rounds
            .iter()
            .map(|r| 2 + usize::from(r.opening.is_some()))
            .sum();
        self.metrics.add(Category::Zkp, t.wire_len(), messages);
    }

    fn is_online(&self, v: NodeId) -> bool {
        self.nodes.get(&v).is_some_and(|n| n.state.online)
    }

    fn online_ids(&self) -> BTreeSet<NodeId> {
        self.nodes
            .iter()
            .filter(|(_, n)| n.state.online)
            .map(|(&v, _)| v)
            .collect()
    }

    fn state(&self, v: NodeId) -> &NodeState {
        &self.nodes[&v].state
    }

    fn state_mut(&mut self, v: NodeId) -> &mut NodeState {
        &mut self.nodes.get_mut(&v).expect("known node").state
    }

    fn render_hc(&self, v: NodeId) -> String {
        self.state(v).cycle.render()
    }

    /// On-line nodes a flood from `from` reaches.
    fn broadcast(&self, from: NodeId) -> Result<BTreeSet<NodeId>, SimError> {
        if !self.is_online(from) {
            return Err(SimError::SenderOffline(from));
        }
        let positions: BTreeMap<NodeId, Position> = self
            .nodes
            .iter()
            .filter(|(_, n)| n.state.online)
            .map(|(&v, n)| (v, n.pos))
            .collect();
        Ok(self.cfg.channel.flood(from, &positions))
    }

    fn rearm(&mut self, v: NodeId) {
        let Some(n) = self.nodes.get_mut(&v) else {
            return;
        };
        n.timer_gen += 1;
        if !self.cfg.auto_proof_of_life || !n.state.online {
            return;
        }
        let gen = n.timer_gen;
        let at = n.state.clock_origin + self.cfg.params.period + SimDuration::from_millis(1);
        let at = at.max(self.now);
        self.schedule(
            at,
            Event::Timer {
                node: v,
                gen,
                force: false,
            },
        );
    }

    fn take_offline(&mut self, v: NodeId, logged: bool) {
        let now = self.now;
        let n = self.nodes.get_mut(&v).expect("known node");
        n.state.go_offline(now);
        n.off_logged = logged;
        n.timer_gen += 1;
        self.metrics.count_event("node_off");
    }

    /// On-line members a membership broadcast missed fall out of the network.
    fn evict_unreached(&mut self, origin: NodeId, reached: &BTreeSet<NodeId>) {
        let missed: Vec<NodeId> = self
            .online_ids()
            .into_iter()
            .filter(|v| *v != origin && !reached.contains(v))
            .collect();
        for v in missed {
            self.take_offline(v, true);
            self.row(format!("Node {v} is out of coverage"), None);
        }
    }

    pub fn run(mut self) -> Result<RunOutput, SimError> {
        self.cfg.validate()?;
        let start = SimTime::ZERO + self.latency();
        self.schedule(start, Event::Init);
        for d in self.cfg.schedule.clone() {
            self.schedule(d.at(), Event::Directive(d));
        }
        let end = SimTime::ZERO + self.cfg.duration;
        let mut index: u64 = 0;
        while let Some(((t, _), ev)) = self.queue.pop_first() {
            if t > end || self.terminated {
                break;
            }
            self.now = t;
            self.handle(ev)?;
            #[cfg(test)]
            if self.sabotage_at == Some(index) {
                if let Some(n) = self.nodes.values_mut().find(|n| n.state.online) {
                    n.state.stage += 1;
                }
            }
            if self.initialized && !self.terminated {
                let online = self.online_ids().len();
                if online < self.cfg.params.termination_threshold {
                    self.row(format!("Network terminated with {online} on-line nodes"), None);
                    self.terminated = true;
                }
            }
            if self.opts.check_invariants && !self.terminated {
                self.check_invariants()
                    .map_err(|detail| SimError::InvariantViolation {
                        event_index: index,
                        time: t,
                        detail,
                    })?;
            }
            index += 1;
        }
        let states = self
            .nodes
            .into_iter()
            .map(|(v, n)| (v, n.state))
            .collect();
        Ok(RunOutput {
            trace: self.trace,
            metrics: self.metrics,
            states,
            archive: self.archive,
            attacks: self.attacks,
            terminated: self.terminated,
            events: index,
        })
    }

    fn check_invariants(&self) -> Result<(), String> {
        let members: BTreeSet<NodeId> = self.nodes.keys().copied().collect();
        if let Some(v) = self.reserved.iter().find(|v| members.contains(v)) {
            return Err(format!("reserved identifier {v} is a member"));
        }
        let mut reference: Option<(NodeId, Vec<u8>)> = None;
        for (&v, n) in &self.nodes {
            if !n.state.online {
                continue;
            }
            if !n.state.is_consistent() {
                return Err(format!("node {v} holds a cycle that is not Hamiltonian"));
            }
            if n.state.graph.vertex_set() != members {
                return Err(format!("node {v} disagrees with the live membership"));
            }
            let view = n.state.shared_view();
            match &reference {
                None => reference = Some((v, view)),
                Some((r, rv)) if *rv != view => {
                    return Err(format!("nodes {r} and {v} hold different views"));
                }
                Some(_) => {}
            }
        }
        Ok(())
    }

    fn handle(&mut self, ev: Event) -> Result<(), SimError> {
        match ev {
            Event::Init => self.init(),
            _ if !self.initialized => Ok(()),
            Event::Directive(d) => self.directive(d),
            Event::InsertCollect(p) => self.insert_collect(p),
            Event::InsertApply(p) => self.insert_apply(p),
            Event::PolClose { initiator, reached } => self.pol_close(initiator, reached),
            Event::Timer { node, gen, force } => self.timer(node, gen, force),
            Event::ChurnTick => self.churn_tick(),
        }
    }

    fn init(&mut self) -> Result<(), SimError> {
        let params = self.cfg.params.clone();
        let setup = match &self.cfg.initial_cycle {
            Some(order) => initialize_with_cycle(
                HamiltonianCycle::from_ids(order.iter().copied()),
                &params,
                &mut self.rng_init,
            ),
            None => initialize_network(self.cfg.n, &params, &mut self.rng_init),
        }
        .map_err(|e| SimError::ConfigInvalid(e.to_string()))?;
        let now = self.now;
        let members: Vec<NodeId> = setup.graph.vertices().collect();
        let positions: BTreeMap<NodeId, Position> = self
            .cfg
            .positions
            .iter()
            .map(|p| (p.node, (p.x, p.y)))
            .collect();
        for mut st in setup.states {
            st.clock_origin = now;
            for &v in &members {
                st.record_proof(v, now);
            }
            let pos = positions.get(&st.id).copied().unwrap_or((0.0, 0.0));
            self.nodes.insert(
                st.id,
                Node {
                    state: st,
                    pos,
                    off_logged: false,
                    timer_gen: 0,
                    ghost: false,
                },
            );
        }
        self.next_device = members.len() as u64;
        let n = members.len();
        self.account_as(Category::Other, &ProtocolMessage::GraphDelivery(setup.graph), n);
        self.account_as(Category::Other, &ProtocolMessage::CycleDelivery(setup.cycle.clone()), n);
        self.row(format!("{} are legitimate", id_list(members.iter().copied())), Some(setup.cycle.render()));
        self.initialized = true;
        if self.cfg.auto_proof_of_life {
            let period = self.period().as_millis();
            for &v in &members {
                let offset = self.rng_init.gen_range(1..=period);
                self.schedule(
                    now + SimDuration::from_millis(offset),
                    Event::Timer {
                        node: v,
                        gen: 0,
                        force: true,
                    },
                );
            }
        }
        if self.cfg.churn.is_active() {
            let tick = self.cfg.tick;
            self.schedule(now + tick, Event::ChurnTick);
        }
        Ok(())
    }

    fn directive(&mut self, d: Directive) -> Result<(), SimError> {
        match d {
            Directive::Insert {
                authenticator,
                force_id,
                between,
                vetted,
                ..
            } => {
                let device = self.fresh_device();
                let auth = self.pick_online(authenticator);
                if let Some(a) = auth {
                    if !vetted {
                        self.row(format!("Node {a} refuses an unvetted supplicant"), None);
                        return Ok(());
                    }
                }
                let _ = self.start_insertion(auth, force_id, between.map(|[a, b]| (a, b)), device)?;
            }
            Directive::NodeOff { node, silent, .. } => {
                if self.is_online(node) {
                    self.take_offline(node, !silent);
                    if !silent {
                        self.row(format!("Node {node} turns off"), None);
                    }
                }
            }
            Directive::NodeOn {
                node,
                authenticator,
                ..
            } => {
                if let Some(slot) = self.find_offline(node) {
                    self.attempt_access(slot, authenticator)?;
                }
            }
            Directive::ForceId { id, .. } => self.pending_force = Some(id),
            Directive::ProofOfLife { node, .. } => {
                let wait = SimDuration(self.latency().as_millis() * 3);
                self.start_pol(node, true, wait)?;
            }
            Directive::Move { node, x, y, .. } => {
                if let Some(n) = self.nodes.get_mut(&node) {
                    n.pos = (x, y);
                }
            }
            Directive::Attack {
                kind,
                mode,
                target,
                authenticator,
                via,
                trials,
                ..
            } => self.attack(kind, mode, target, authenticator, via, trials)?,
        }
        Ok(())
    }

    fn fresh_device(&mut self) -> DeviceId {
        let d = DeviceId(self.next_device);
        self.next_device += 1;
        d
    }

    /// `wanted` if it is on-line, else a random on-line member.
    fn pick_online(&mut self, wanted: Option<NodeId>) -> Option<NodeId> {
        if let Some(v) = wanted.filter(|&v| self.is_online(v)) {
            return Some(v);
        }
        let online: Vec<NodeId> = self.online_ids().into_iter().collect();
        online.choose(&mut self.rng_protocol).copied()
    }

    fn find_offline(&self, v: NodeId) -> Option<Slot> {
        if let Some(n) = self.nodes.get(&v) {
            return (!n.state.online && !n.ghost && !self.reentering.contains(&n.state.device))
                .then_some(Slot::Member(v));
        }
        self.detached
            .iter()
            .filter(|(d, n)| n.state.id == v && !self.reentering.contains(d))
            .max_by_key(|(_, n)| n.state.offline_since)
            .map(|(&d, _)| Slot::Detached(d))
    }

    fn slot_node(&self, slot: Slot) -> &Node {
        match slot {
            Slot::Member(v) => &self.nodes[&v],
            Slot::Detached(d) => &self.detached[&d],
        }
    }

    fn start_pol(&mut self, v: NodeId, log_start: bool, wait: SimDuration) -> Result<(), SimError> {
        if !self.is_online(v) || self.pol_open.contains(&v) {
            return Ok(());
        }
        if log_start {
            self.row(format!("Proof of life started by Node {v}"), None);
        }
        let msg = ProtocolMessage::ProofOfLife {
            sender: v,
            device: self.state(v).device,
        };
        let reached = self.broadcast(v)?;
        self.account(&msg, reached.len());
        self.metrics.count_event("proof_of_life");
        self.pol_open.insert(v);
        self.schedule(self.now + wait, Event::PolClose { initiator: v, reached });
        Ok(())
    }

    fn timer(&mut self, v: NodeId, gen: u64, force: bool) -> Result<(), SimError> {
        let Some(n) = self.nodes.get(&v) else {
            return Ok(());
        };
        if !n.state.online || n.timer_gen != gen {
            return Ok(());
        }
        if !force && emit_proof_of_life(&n.state, self.now, self.period()).is_none() {
            self.rearm(v);
            return Ok(());
        }
        let wait = SimDuration(self.latency().as_millis() * 3);
        self.start_pol(v, true, wait)
    }

    fn pol_close(&mut self, initiator: NodeId, reached: BTreeSet<NodeId>) -> Result<(), SimError> {
        self.pol_open.remove(&initiator);
        if !self.is_online(initiator) {
            return Ok(());
        }
        let now = self.now;
        let period = self.period();
        let online = self.online_ids();
        let answers: BTreeSet<NodeId> = reached
            .iter()
            .copied()
            .filter(|v| *v != initiator && online.contains(v))
            .collect();
        let sample = ProtocolMessage::ProofOfLife {
            sender: initiator,
            device: DeviceId(0),
        };
        self.account(&sample, answers.len());
        let silent: Vec<NodeId> = self
            .state(initiator)
            .graph
            .vertices()
            .filter(|v| *v != initiator && !answers.contains(v))
            .collect();
        match silent.as_slice() {
            [] => {}
            [one] => self.row(format!("Node {one} does not answer to proof of life"), None),
            many => self.row(format!("Nodes {} do not answer to proof of life", id_list(many.iter().copied())), None),
        }
        let echo = match handle_pol_quorum(self.state(initiator), &answers) {
            PolDecision::Withdraw => {
                self.row(format!("Node {initiator} withdraws its proof of life"), None);
                self.metrics.count_event("proof_of_life_withdrawn");
                if self.cfg.auto_proof_of_life {
                    let gen = self.nodes[&initiator].timer_gen;
                    let tick = self.cfg.tick;
                    self.schedule(now + tick, Event::Timer { node: initiator, gen, force: false });
                }
                return Ok(());
            }
            PolDecision::Echo(e) => e,
        };
        let reached = self.broadcast(initiator)?;
        let msg = ProtocolMessage::ProofOfLifeEcho {
            initiator,
            senders: echo.senders.clone(),
        };
        self.account(&msg, reached.len());
        for &v in reached.iter().chain([&initiator]) {
            let st = self.state_mut(v);
            record_echo(st, &echo, now, period);
            st.prune_history(now, period);
        }
        let mut shown = self.state(initiator).cycle.clone();
        let notices = match run_deletion_sweep(self.state_mut(initiator), now, period) {
            Ok(n) => n,
            Err(ProtocolError::NetworkTermination { members }) => {
                self.row(format!("Network terminated with {members} members"), None);
                self.terminated = true;
                return Ok(());
            }
            Err(e) => return Err(SimError::Protocol(e)),
        };
        if !notices.is_empty() {
            self.evict_unreached(initiator, &reached);
        }
        for notice in notices {
            let d = notice.deleted;
            let msg = ProtocolMessage::DeletionNotice {
                initiator,
                deleted: d,
            };
            self.account(&msg, reached.len());
            for &v in &reached {
                if v == d || !self.is_online(v) {
                    continue;
                }
                apply_deletion(self.state_mut(v), d, now).map_err(|e| SimError::InvariantViolation {
                    event_index: u64::MAX,
                    time: now,
                    detail: format!("node {v} cannot apply deletion of {d}: {e}"),
                })?;
            }
            if let Some(mut gone) = self.nodes.remove(&d) {
                if gone.state.online {
                    gone.state.go_offline(now);
                    gone.off_logged = true;
                }
                gone.timer_gen += 1;
                if !gone.ghost {
                    self.detached.insert(gone.state.device, gone);
                }
            }
            self.metrics.count_event("deletion");
            shown = splice_delete(&shown, d).map_err(ProtocolError::Graph)?.0;
            self.row(format!("Node {d} is deleted"), Some(shown.render()));
        }
        self.rearm(initiator);
        Ok(())
    }

    /// Announces an insertion. `Ok(false)` when it was refused outright.
    fn start_insertion(
        &mut self,
        auth: Option<NodeId>,
        force_id: Option<NodeId>,
        between: Option<(NodeId, NodeId)>,
        device: DeviceId,
    ) -> Result<bool, SimError> {
        let Some(a) = auth else {
            self.row("No on-line node can authenticate the supplicant", None);
            return Ok(false);
        };
        let forced = force_id.or_else(|| self.pending_force.take());
        let announce = match begin_insertion(self.state(a), device, &self.reserved, forced) {
            Ok(ann) => ann,
            Err(ProtocolError::DuplicateId(v)) => {
                self.metrics.count_event("insertion_denied");
                self.row(format!("Insertion of Node {v} is denied by Node {a}: identifier in use"), None);
                return Ok(false);
            }
            Err(e) => return Err(SimError::Protocol(e)),
        };
        self.reserved.insert(announce.new_id);
        self.reentering.insert(device);
        let reached = self.broadcast(a)?;
        let msg = ProtocolMessage::InsertionAnnounce {
            authenticator: a,
            new_id: announce.new_id,
            device,
        };
        self.account(&msg, reached.len());
        let at = self.now + SimDuration(self.latency().as_millis() * 2);
        self.schedule(
            at,
            Event::InsertCollect(PendingInsertion {
                announce,
                between,
                requested: self.now,
                reached,
                acks: 0,
            }),
        );
        Ok(true)
    }

    fn abort_insertion(&mut self, p: &PendingInsertion, why: String) {
        self.reserved.remove(&p.announce.new_id);
        self.reentering.remove(&p.announce.device);
        self.metrics.count_event("insertion_aborted");
        self.row(format!("Insertion of Node {} is aborted: {why}", p.announce.new_id), None);
    }

    fn insert_collect(&mut self, mut p: PendingInsertion) -> Result<(), SimError> {
        let a = p.announce.authenticator;
        if !self.is_online(a) {
            self.abort_insertion(&p, format!("Node {a} is off-line"));
            return Ok(());
        }
        let online = self.online_ids();
        p.acks = p.reached.iter().filter(|v| online.contains(v)).count();
        let ack = ProtocolMessage::InsertionAck {
            from: a,
            new_id: p.announce.new_id,
        };
        self.account(&ack, p.acks);
        let members = self.state(a).graph.vertex_count();
        if p.acks * 2 < members {
            let why = format!("{} of {members} members answered", p.acks);
            self.abort_insertion(&p, why);
            return Ok(());
        }
        self.schedule(self.now + self.latency(), Event::InsertApply(p));
        Ok(())
    }

    fn insert_apply(&mut self, p: PendingInsertion) -> Result<(), SimError> {
        let a = p.announce.authenticator;
        let now = self.now;
        if !self.is_online(a) {
            self.abort_insertion(&p, format!("Node {a} is off-line"));
            return Ok(());
        }
        let degree = self.cfg.params.degree;
        let bc = match complete_insertion(
            &self.nodes[&a].state,
            &p.announce,
            p.acks,
            degree,
            p.between,
            &mut self.rng_protocol,
        ) {
            Ok(bc) => bc,
            Err(e) => {
                self.abort_insertion(&p, e.to_string());
                return Ok(());
            }
        };
        let reached = self.broadcast(a)?;
        let msg = ProtocolMessage::NeighborSetBroadcast {
            authenticator: a,
            new_id: bc.new_id,
            neighbors: bc.neighbors.clone(),
            device: bc.device,
        };
        self.account(&msg, reached.len());
        for &v in reached.iter().chain([&a]) {
            apply_insertion(self.state_mut(v), &bc, now).map_err(|e| SimError::InvariantViolation {
                event_index: u64::MAX,
                time: now,
                detail: format!("node {v} cannot apply insertion of {}: {e}", bc.new_id),
            })?;
        }
        self.evict_unreached(a, &reached);
        let v = bc.new_id;
        let device = bc.device;
        let mut st = self.state(a).clone();
        st.id = v;
        st.device = device;
        st.online = true;
        st.offline_since = None;
        st.clock_origin = now;
        st.last_online_stage = st.stage;
        let pos = self.nodes[&a].pos;
        self.account(&ProtocolMessage::GraphDelivery(st.graph.clone()), 1);
        self.account(&ProtocolMessage::CycleDelivery(st.cycle.clone()), 1);
        self.detached.remove(&device);
        for n in self.nodes.values_mut() {
            if n.state.device == device && !n.state.online {
                n.ghost = true;
            }
        }
        self.nodes.insert(
            v,
            Node {
                state: st,
                pos,
                off_logged: false,
                timer_gen: 0,
                ghost: false,
            },
        );
        self.reserved.remove(&v);
        self.reentering.remove(&device);
        self.metrics.count_event("insertion");
        self.metrics
            .insertion_latencies_ms
            .push(now.since(p.requested).as_millis());
        let hc = self.render_hc(a);
        self.row(format!("Insertion of Node {v} is broadcast by Node {a}"), Some(hc));
        self.state_mut(a).clock_origin = now;
        self.rearm(a);
        self.rearm(v);
        let wait = self.latency();
        self.start_pol(a, false, wait)
    }

    fn secure_candidates(&self, pos: Position) -> Vec<NodeId> {
        self.nodes
            .iter()
            .filter(|(_, n)| n.state.online && self.cfg.channel.in_secure_range(n.pos, pos))
            .map(|(&v, _)| v)
            .collect()
    }

    fn attempt_access(&mut self, slot: Slot, wanted: Option<NodeId>) -> Result<(), SimError> {
        let node = self.slot_node(slot).clone();
        let s = node.state.id;
        let candidates = self.secure_candidates(node.pos);
        let auth = match wanted.filter(|w| candidates.contains(w)) {
            Some(w) => w,
            None => match candidates.choose(&mut self.rng_protocol) {
                Some(&w) => w,
                None => {
                    self.row(format!("Node {s} finds no authenticator in range"), None);
                    return Ok(());
                }
            },
        };
        let logged = node.off_logged;
        let claimed_stage = node.state.last_online_stage;
        if logged {
            self.row(format!("Node {s} turns on and Node {auth} is chosen for ZKP"), None);
        }
        let claim = AccessClaim::of(&node.state);
        let request = ProtocolMessage::AccessRequest {
            supplicant: s,
            stage: claim.stage,
            graph: node.state.graph.clone(),
        };
        self.account(&request, 1);
        let mut prover = HonestProver::new(node.state.graph.clone(), node.state.cycle.clone())
            .expect("stored views stay consistent");
        let online = self.online_ids();
        let auth_state = self.state(auth).clone();
        let result = access_control(
            &auth_state,
            claim,
            &mut prover,
            self.now,
            &self.cfg.params,
            &online,
            &mut self.rng_prover,
            &mut self.challenger,
        );
        let now = self.now;
        match result {
            Ok(out) => {
                self.account_zkp(&out.transcript);
                let mut node = node;
                grant_access(&auth_state, &mut node.state, now);
                node.off_logged = false;
                match slot {
                    Slot::Member(_) => {
                        self.nodes.insert(s, node);
                    }
                    Slot::Detached(d) => {
                        self.detached.remove(&d);
                        self.nodes.insert(s, node);
                    }
                }
                let grant = ProtocolMessage::AccessGrant {
                    supplicant: s,
                    stage: auth_state.stage,
                    graph: auth_state.graph.clone(),
                    cycle: auth_state.cycle.clone(),
                };
                self.account(&grant, 1);
                let reached = self.broadcast(auth)?;
                let notice = ProtocolMessage::AccessNotice {
                    authenticator: auth,
                    supplicant: s,
                };
                self.account(&notice, reached.len());
                let device = self.state(s).device;
                for &v in reached.iter().chain([&auth]) {
                    let st = self.state_mut(v);
                    st.record_proof(auth, now);
                    st.record_proof(s, now);
                    st.observed_devices.insert(s, device);
                }
                self.state_mut(auth).clock_origin = now;
                self.rearm(auth);
                self.rearm(s);
                self.metrics.count_event("access_granted");
                if !logged {
                    self.row(format!("Node {s} is re-inserted by ZKP with Node {auth}"), None);
                }
                if out.stale_stage {
                    self.row(format!("Node {s} proved knowledge of superseded stage {claimed_stage}"), None);
                }
                self.archive.push(CapturedSession {
                    supplicant: s,
                    graph: request_graph(request),
                    transcript: out.transcript,
                });
            }
            Err(e @ (AccessError::Expired(_) | AccessError::NotAMember(_) | AccessError::UnknownStage(_))) => {
                self.metrics.count_event("access_refused");
                self.row(format!("Node {auth} refuses Node {s}: {e}"), None);
                let device = node.state.device;
                if !self.reentering.contains(&device) {
                    self.start_insertion(Some(auth), None, None, device)?;
                }
            }
            Err(AccessError::ZkpFailed(t)) => {
                self.account_zkp(&t);
                self.isolate(s, auth)?;
            }
            Err(e) => {
                self.row(format!("Node {auth} refuses Node {s}: {e}"), None);
            }
        }
        Ok(())
    }

    fn isolate(&mut self, claimed: NodeId, auth: NodeId) -> Result<(), SimError> {
        self.metrics.count_event("isolation");
        let reached = self.broadcast(auth)?;
        self.account(&ProtocolMessage::IsolationNotice { node: claimed }, reached.len());
        self.row(format!("Supplicant claiming Node {claimed} is isolated"), None);
        Ok(())
    }

    fn churn_tick(&mut self) -> Result<(), SimError> {
        let churn = self.cfg.churn;
        let online: Vec<Slot> = self.online_ids().into_iter().map(Slot::Member).collect();
        let mut offline: Vec<Slot> = self
            .nodes
            .iter()
            .filter(|(_, n)| !n.state.online && !n.ghost && !self.reentering.contains(&n.state.device))
            .map(|(&v, _)| Slot::Member(v))
            .collect();
        offline.extend(
            self.detached
                .keys()
                .filter(|d| !self.reentering.contains(d))
                .map(|&d| Slot::Detached(d)),
        );
        let events = churn_step(&mut self.rng_churn, churn.p_off, churn.p_on, &online, &offline);
        for ev in &events {
            if let ChurnEvent::Off(Slot::Member(v)) = *ev {
                if self.is_online(v) {
                    self.take_offline(v, true);
                    self.row(format!("Node {v} turns off"), None);
                }
            }
        }
        for ev in events {
            if let ChurnEvent::On(slot) = ev {
                let still_there = match slot {
                    Slot::Member(v) => self.nodes.get(&v).is_some_and(|n| !n.state.online && !n.ghost),
                    Slot::Detached(d) => self.detached.contains_key(&d),
                };
                let device = self.slot_node_opt(slot).map(|n| n.state.device);
                if still_there && device.is_some_and(|d| !self.reentering.contains(&d)) {
                    self.attempt_access(slot, None)?;
                }
            }
        }
        if churn.p_insert > 0.0 && self.rng_churn.gen_bool(churn.p_insert) {
            let device = self.fresh_device();
            let online: Vec<NodeId> = self.online_ids().into_iter().collect();
            let auth = online.choose(&mut self.rng_churn).copied();
            self.start_insertion(auth, None, None, device)?;
        }
        let next = self.now + self.cfg.tick;
        if next <= SimTime::ZERO + self.cfg.duration {
            self.schedule(next, Event::ChurnTick);
        }
        Ok(())
    }

    fn slot_node_opt(&self, slot: Slot) -> Option<&Node> {
        match slot {
            Slot::Member(v) => self.nodes.get(&v),
            Slot::Detached(d) => self.detached.get(&d),
        }
    }

    fn report(&mut self, line: String) {
        self.attacks.push(line);
    }

    fn attack(
        &mut self,
        kind: AttackKind,
        mode: Option<SybilMode>,
        target: Option<NodeId>,
        authenticator: Option<NodeId>,
        via: Option<NodeId>,
        trials: usize,
    ) -> Result<(), SimError> {
        self.metrics.count_event("attack");
        match kind {
            AttackKind::Replay => self.attack_replay(target, authenticator, trials),
            AttackKind::Spoof => self.attack_spoof(target, authenticator, trials),
            AttackKind::Eavesdrop => {
                self.attack_eavesdrop();
                Ok(())
            }
            AttackKind::Sybil => match mode.expect("validated with the config") {
                SybilMode::DuplicateAccess => self.sybil_duplicate_access(target, authenticator),
                SybilMode::DuplicateInsert => self.sybil_duplicate_insert(target, authenticator),
                SybilMode::MultiPol => self.sybil_multi_pol(target, via),
            },
        }
    }

    fn attack_replay(&mut self, target: Option<NodeId>, authenticator: Option<NodeId>, trials: usize) -> Result<(), SimError> {
        let captured = self
            .archive
            .iter()
            .rev()
            .find(|c| target.is_none_or(|t| c.supplicant == t))
            .cloned();
        let (Some(captured), Some(auth)) = (captured, self.pick_online(authenticator)) else {
            self.row("Replay attack finds nothing to replay", None);
            self.report("replay skipped=nothing captured".into());
            return Ok(());
        };
        let graph = self.state(auth).graph.clone();
        let rounds = self.cfg.params.rounds;
        let mut accepted = 0;
        for _ in 0..trials {
            let t = replay_attack(&captured.transcript, &graph, rounds, &mut self.challenger);
            self.account_zkp(&t);
            if t.accepted() {
                accepted += 1;
            }
        }
        let s = captured.supplicant;
        if accepted == 0 {
            self.row(format!("Replayed proof of Node {s} is rejected by Node {auth}"), None);
        } else {
            self.row(format!("Replayed proof of Node {s} passes Node {auth} in {accepted} of {trials} trials"), None);
        }
        self.report(format!("replay target={s} authenticator={auth} trials={trials} accepted={accepted}"));
        Ok(())
    }

    fn attack_spoof(&mut self, target: Option<NodeId>, authenticator: Option<NodeId>, trials: usize) -> Result<(), SimError> {
        let target = target.or_else(|| {
            self.nodes
                .iter()
                .find(|(_, n)| !n.state.online)
                .map(|(&v, _)| v)
        });
        let (Some(x), Some(auth)) = (target, self.pick_online(authenticator)) else {
            self.row("Spoofing attack finds no off-line identity", None);
            self.report("spoof skipped=no off-line identity".into());
            return Ok(());
        };
        let auth_state = self.state(auth).clone();
        let online = self.online_ids();
        let mut accepted = 0;
        let mut denied = 0;
        for _ in 0..trials {
            let mut prover = CheatingProver::new(auth_state.graph.clone());
            let claim = AccessClaim {
                id: x,
                stage: auth_state.stage,
                graph: &auth_state.graph,
                offline_since: None,
            };
            match access_control(
                &auth_state,
                claim,
                &mut prover as &mut dyn ZkProver,
                self.now,
                &self.cfg.params,
                &online,
                &mut self.rng_attack,
                &mut self.challenger,
            ) {
                Ok(out) => {
                    self.account_zkp(&out.transcript);
                    accepted += 1;
                }
                Err(AccessError::ZkpFailed(t)) => {
                    self.account_zkp(&t);
                    denied += 1;
                }
                Err(_) => denied += 1,
            }
        }
        if accepted == 0 {
            self.row(format!("Spoofed access as Node {x} is rejected by Node {auth}"), None);
            self.isolate(x, auth)?;
        } else {
            self.row(format!("Spoofed access as Node {x} passes Node {auth} in {accepted} of {trials} trials"), None);
        }
        self.report(format!("spoof target={x} authenticator={auth} trials={trials} accepted={accepted} rejected={denied}"));
        Ok(())
    }

    fn sybil_duplicate_access(&mut self, target: Option<NodeId>, authenticator: Option<NodeId>) -> Result<(), SimError> {
        let Some(auth) = self.pick_online(authenticator) else {
            self.report("sybil mode=duplicate_access skipped=no authenticator".into());
            return Ok(());
        };
        let target = target.filter(|&t| self.is_online(t)).or_else(|| {
            self.online_ids().into_iter().find(|&v| v != auth)
        });
        let Some(x) = target else {
            self.report("sybil mode=duplicate_access skipped=no on-line identity".into());
            return Ok(());
        };
        let auth_state = self.state(auth).clone();
        let online = self.online_ids();
        let mut prover = CheatingProver::new(auth_state.graph.clone());
        let claim = AccessClaim {
            id: x,
            stage: auth_state.stage,
            graph: &auth_state.graph,
            offline_since: None,
        };
        let outcome = access_control(
            &auth_state,
            claim,
            &mut prover,
            self.now,
            &self.cfg.params,
            &online,
            &mut self.rng_attack,
            &mut self.challenger,
        );
        let verdict = match outcome {
            Err(AccessError::DuplicateOnline(_)) => {
                self.row(format!("Access as on-line Node {x} is denied by Node {auth}"), None);
                self.isolate(x, auth)?;
                "denied,isolated"
            }
            Err(AccessError::ZkpFailed(t)) => {
                self.account_zkp(&t);
                self.isolate(x, auth)?;
                "isolated"
            }
            Err(_) => "denied",
            Ok(_) => "accepted",
        };
        self.report(format!("sybil mode=duplicate_access target={x} authenticator={auth} outcome={verdict}"));
        Ok(())
    }

    fn sybil_duplicate_insert(&mut self, target: Option<NodeId>, authenticator: Option<NodeId>) -> Result<(), SimError> {
        let auth = self.pick_online(authenticator);
        let x = target.or_else(|| self.nodes.keys().next().copied());
        let device = self.fresh_device();
        let started = self.start_insertion(auth, x, None, device)?;
        let verdict = if started { "announced" } else { "denied" };
        let x = x.map_or("none".to_string(), |v| v.to_string());
        self.report(format!("sybil mode=duplicate_insert target={x} outcome={verdict}"));
        Ok(())
    }

    fn sybil_multi_pol(&mut self, target: Option<NodeId>, via: Option<NodeId>) -> Result<(), SimError> {
        let Some(x) = self.pick_online(via) else {
            self.report("sybil mode=multi_pol skipped=no on-line node".into());
            return Ok(());
        };
        let z = target
            .filter(|&t| t != x && self.nodes.contains_key(&t))
            .or_else(|| self.nodes.keys().copied().find(|&v| v != x));
        let Some(z) = z else {
            self.report("sybil mode=multi_pol skipped=no second identity".into());
            return Ok(());
        };
        let device = self.state(x).device;
        let reached = self.broadcast(x)?;
        for sender in [x, z] {
            self.account(&ProtocolMessage::ProofOfLife { sender, device }, reached.len());
        }
        let witness = reached.iter().copied().find_map(|w| {
            conflicting_device(self.state(w), z, device).map(|bound| (w, bound.unwrap_or(x)))
        });
        match witness {
            Some((w, bound)) => {
                let (lo, hi) = (bound.min(z), bound.max(z));
                self.metrics.count_event("sybil_detected");
                self.row(format!("Node {w} detects proofs of life for Nodes {lo}, {hi} from one device"), None);
                self.report(format!("sybil mode=multi_pol via={x} target={z} detected_by={w}"));
            }
            None => {
                self.row(format!("Forged proof of life for Node {z} goes unnoticed"), None);
                self.report(format!("sybil mode=multi_pol via={x} target={z} detected_by=none"));
            }
        }
        Ok(())
    }

    fn attack_eavesdrop(&mut self) {
        match eavesdrop_analysis(&self.archive, &mut self.rng_attack) {
            Ok(r) => {
                let tv = r.stats.iter().map(|s| s.tv_distance).fold(0.0, f64::max);
                if r.indistinguishable {
                    self.row(format!("Eavesdropper learns nothing from {} captured rounds", r.rounds), None);
                } else {
                    self.row(format!("Eavesdropper tells {} captured rounds from simulations", r.rounds), None);
                }
                self.report(format!(
                    "eavesdrop rounds={} max_tv={tv:.4} indistinguishable={} leak=none",
                    r.rounds, r.indistinguishable
                ));
            }
            Err(e) => {
                self.row(format!("Eavesdropper finds a {e}"), None);
                self.report(format!("eavesdrop {e}"));
            }
        }
    }
}

fn request_graph(msg: ProtocolMessage) -> crate::graph::Graph {
    match msg {
        ProtocolMessage::AccessRequest { graph, .. } => graph,
        _ => unreachable!("built as an access request"),
    }
}
