//! Quantum broker: feasibility checks, node selection, time accounting, and
//! the broker entity that drives dispatch inside a simulation.

use std::any::Any;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::domain::{
    execution_cost, quantum_time, DatacenterCharacteristics, QDatacenter, QNode, Qulet, QuletStatus,
};
use crate::kernel::{Context, Entity, EntityId, EventTag, SimError, SimEvent};
use crate::mapping::{find_embedding, QubitMapping};
use crate::message::{NodeDone, Payload, Submission};
use crate::node::{NodeJob, NodeScheduler};

/// Five-term decomposition of a qulet's turnaround time.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TimeBreakdown {
    /// Network transmission.
    pub t_n: f64,
    /// Classical compilation.
    pub t_c: f64,
    /// Scheduling (broker dispatch latency).
    pub t_s: f64,
    /// Waiting at the node.
    pub t_w: f64,
    /// Quantum execution.
    pub t_q: f64,
    pub total: f64,
}

impl TimeBreakdown {
    pub fn new(t_n: f64, t_c: f64, t_s: f64, t_w: f64, t_q: f64) -> Self {
        Self {
            t_n,
            t_c,
            t_s,
            t_w,
            t_q,
            total: t_n + t_c + t_s + t_w + t_q,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PolicyKind {
    #[default]
    FirstFeasible,
    RoundRobin,
    MinCompletion,
}

impl PolicyKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::FirstFeasible => "first-feasible",
            Self::RoundRobin => "round-robin",
            Self::MinCompletion => "min-completion",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PlacementPolicy {
    kind: PolicyKind,
    cursor: usize,
}

impl PlacementPolicy {
    pub fn new(kind: PolicyKind) -> Self {
        Self { kind, cursor: 0 }
    }

    pub fn kind(&self) -> PolicyKind {
        self.kind
    }

    pub fn cursor(&self) -> usize {
        self.cursor
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BrokerConfig {
    pub policy: PolicyKind,
    /// Dispatch latency between a qulet reaching the broker and being sent.
    pub epsilon: f64,
    /// Classical compile time charged to every qulet.
    pub compile_time: f64,
    /// Accept unsupported gates at a depth penalty instead of rejecting.
    pub soft_gate_mode: bool,
    pub depth_multiplier: f64,
    /// Require `quantum_volume >= 2^min(depth, width)`.
    pub qv_check: bool,
}

impl Default for BrokerConfig {
    fn default() -> Self {
        Self {
            policy: PolicyKind::FirstFeasible,
            epsilon: 0.01,
            compile_time: 0.0,
            soft_gate_mode: false,
            depth_multiplier: 1.5,
            qv_check: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityReport {
    pub qubit_ok: bool,
    pub gates_ok: bool,
    /// Unsupported gates were accepted with a depth penalty.
    pub gate_penalty: bool,
    pub topology_ok: bool,
    pub mapping: Option<QubitMapping>,
    pub qos_ok: bool,
    pub feasible: bool,
}

impl FeasibilityReport {
    /// Fails only the QoS constraint.
    pub fn only_qos_failed(&self) -> bool {
        self.qubit_ok && self.gates_ok && self.topology_ok && !self.qos_ok
    }
}

impl fmt::Display for FeasibilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut failed = Vec::new();
        if !self.qubit_ok {
            failed.push("qubits");
        }
        if !self.gates_ok {
            failed.push("gates");
        }
        if !self.topology_ok {
            failed.push("topology");
        }
        if !self.qos_ok {
            failed.push("qos");
        }
        if failed.is_empty() {
            write!(f, "feasible")
        } else {
            write!(f, "fails {}", failed.join("+"))
        }
    }
}

/// Depth after soft-mode gate decomposition on `node`.
pub fn effective_depth(qulet: &Qulet, node: &QNode, config: &BrokerConfig) -> f64 {
    let depth = qulet.depth as f64;
    if config.soft_gate_mode && !qulet.gates.is_subset(&node.gate_set) {
        depth * config.depth_multiplier
    } else {
        depth
    }
}

/// Quantum execution time of `qulet` on `node`, soft-mode penalty included.
pub fn execution_time(qulet: &Qulet, node: &QNode, config: &BrokerConfig) -> f64 {
    quantum_time(effective_depth(qulet, node, config), qulet.shots, node.clops)
}

pub fn node_job(qulet: &Qulet, node: &QNode, config: &BrokerConfig) -> NodeJob {
    NodeJob {
        qulet_id: qulet.id,
        work: effective_depth(qulet, node, config) * qulet.shots as f64,
        circuit: qulet.circuit_graph(),
    }
}

/// Evaluates the four placement constraints. `predicted_total` is the
/// turnaround the broker expects on this node; it feeds the deadline check.
pub fn check_feasibility(qulet: &Qulet, node: &QNode, config: &BrokerConfig, predicted_total: f64) -> FeasibilityReport {
    let qubit_ok = node.qubits >= qulet.width;
    let supported = qulet.gates.is_subset(&node.gate_set);
    let gates_ok = supported || config.soft_gate_mode;
    let mapping = find_embedding(&qulet.circuit_graph(), &node.topology, &BTreeSet::new());
    let topology_ok = mapping.is_some();
    let deadline_ok = qulet.deadline.is_none_or(|d| predicted_total <= d);
    let error_ok = qulet.error_tolerance.is_none_or(|tol| node.max_error() <= tol);
    let qv_ok = !config.qv_check || qv_sufficient(qulet, node);
    let qos_ok = deadline_ok && error_ok && qv_ok;
    FeasibilityReport {
        qubit_ok,
        gates_ok,
        gate_penalty: gates_ok && !supported,
        topology_ok,
        mapping,
        qos_ok,
        feasible: qubit_ok && gates_ok && topology_ok && qos_ok,
    }
}

fn qv_sufficient(qulet: &Qulet, node: &QNode) -> bool {
    let k = qulet.depth.min(qulet.width as u64);
    k < 64 && node.quantum_volume >= 1u64 << k
}

/// Splits a completed (or predicted) run into the five time components.
/// `start_time` is when execution began at the node, `enqueue_time` when
/// the qulet reached it.
pub fn compute_breakdown(
    qulet: &Qulet,
    node: &QNode,
    characteristics: &DatacenterCharacteristics,
    config: &BrokerConfig,
    enqueue_time: f64,
    start_time: f64,
) -> TimeBreakdown {
    TimeBreakdown::new(
        characteristics.base_network_delay,
        config.compile_time,
        config.epsilon,
        (start_time - enqueue_time).max(0.0),
        execution_time(qulet, node, config),
    )
}

/// A node as the broker sees it while choosing a target.
#[derive(Debug, Clone, Copy)]
pub struct NodeView<'a> {
    pub node: &'a QNode,
    pub characteristics: &'a DatacenterCharacteristics,
    pub state: &'a NodeScheduler,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlacementDecision {
    pub qulet_id: u32,
    pub node_id: u32,
    pub mapping: QubitMapping,
    /// Predicted at decision time.
    pub breakdown: TimeBreakdown,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PlacementError {
    #[error("no quantum nodes available")]
    NoNodes,
    #[error("qulet {qulet_id}: no feasible node ({})", summarize(.reports))]
    NoFeasibleNode {
        qulet_id: u32,
        reports: Vec<(u32, FeasibilityReport)>,
    },
    #[error("qulet {qulet_id}: deadline cannot be met on any node")]
    DeadlineInfeasible {
        qulet_id: u32,
        reports: Vec<(u32, FeasibilityReport)>,
    },
}

fn summarize(reports: &[(u32, FeasibilityReport)]) -> String {
    reports
        .iter()
        .map(|(id, r)| format!("node {id}: {r}"))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Predicted breakdown of `qulet` dispatched at `now` to the node in `view`.
pub fn predict_breakdown(qulet: &Qulet, view: &NodeView<'_>, config: &BrokerConfig, now: f64) -> TimeBreakdown {
    let enqueue = now + config.compile_time + view.characteristics.base_network_delay;
    let job = node_job(qulet, view.node, config);
    match view.state.predict(job, enqueue) {
        Ok(p) => {
            let start = effective_start(view.state.policy(), p.start, p.completion, execution_time(qulet, view.node, config), enqueue);
            compute_breakdown(qulet, view.node, view.characteristics, config, enqueue, start)
        }
        Err(_) => TimeBreakdown {
            total: f64::INFINITY,
            ..TimeBreakdown::default()
        },
    }
}

/// Under processor sharing the stretch beyond standalone execution counts as
/// waiting, so the start is taken as `completion - t_q`.
pub(crate) fn effective_start(
    policy: crate::domain::SharingPolicy,
    start: f64,
    completion: f64,
    t_q: f64,
    enqueue: f64,
) -> f64 {
    match policy {
        crate::domain::SharingPolicy::TimeShared => (completion - t_q).max(enqueue),
        _ => start,
    }
}

/// Chooses a node for `qulet` among `views` according to `policy`.
pub fn select_node(
    qulet: &Qulet,
    views: &[NodeView<'_>],
    policy: &mut PlacementPolicy,
    config: &BrokerConfig,
    now: f64,
) -> Result<PlacementDecision, PlacementError> {
    if views.is_empty() {
        return Err(PlacementError::NoNodes);
    }
    let mut order: Vec<usize> = (0..views.len()).collect();
    order.sort_by_key(|&i| views[i].node.id);

    let need_prediction = qulet.deadline.is_some() || policy.kind == PolicyKind::MinCompletion;
    let mut evaluated: Vec<(usize, FeasibilityReport, TimeBreakdown)> = Vec::with_capacity(order.len());
    for &i in &order {
        let view = &views[i];
        let breakdown = if need_prediction {
            predict_breakdown(qulet, view, config, now)
        } else {
            TimeBreakdown::default()
        };
        let report = check_feasibility(qulet, view.node, config, breakdown.total);
        evaluated.push((i, report, breakdown));
    }

    let feasible_positions: Vec<usize> = (0..evaluated.len()).filter(|&p| evaluated[p].1.feasible).collect();
    if feasible_positions.is_empty() {
        let only_deadline = evaluated.iter().all(|(_, r, _)| r.only_qos_failed()) && qulet.deadline.is_some();
        let reports = evaluated
            .into_iter()
            .map(|(i, r, _)| (views[i].node.id, r))
            .collect();
        return Err(if only_deadline {
            PlacementError::DeadlineInfeasible {
                qulet_id: qulet.id,
                reports,
            }
        } else {
            PlacementError::NoFeasibleNode {
                qulet_id: qulet.id,
                reports,
            }
        });
    }

    let chosen = match policy.kind {
        PolicyKind::FirstFeasible => feasible_positions[0],
        PolicyKind::RoundRobin => {
            let n = evaluated.len();
            let pick = (0..n)
                .map(|k| (policy.cursor + k) % n)
                .find(|p| evaluated[*p].1.feasible)
                .expect("at least one feasible node");
            policy.cursor = (pick + 1) % n;
            pick
        }
        PolicyKind::MinCompletion => {
            let mut best = feasible_positions[0];
            for &p in &feasible_positions[1..] {
                if evaluated[p].2.total < evaluated[best].2.total {
                    best = p;
                }
            }
            best
        }
    };

    let (i, report, predicted) = evaluated.swap_remove(chosen);
    let view = &views[i];
    let breakdown = if need_prediction {
        predicted
    } else {
        predict_breakdown(qulet, view, config, now)
    };
    Ok(PlacementDecision {
        qulet_id: qulet.id,
        node_id: view.node.id,
        mapping: report.mapping.unwrap_or_default(),
        breakdown,
    })
}

/// Outcome of one qulet, as exported in the results file.
#[derive(Debug, Clone, PartialEq)]
pub struct QuletResult {
    pub qulet_id: u32,
    pub status: QuletStatus,
    pub node_id: Option<u32>,
    pub breakdown: TimeBreakdown,
    pub cost: f64,
    pub arrival: f64,
    pub completion: Option<f64>,
    /// Why the qulet failed, if it did.
    pub reason: Option<String>,
}

impl QuletResult {
    fn unresolved(q: &Qulet) -> Self {
        Self {
            qulet_id: q.id,
            status: q.status,
            node_id: None,
            breakdown: TimeBreakdown::default(),
            cost: 0.0,
            arrival: q.arrival,
            completion: None,
            reason: None,
        }
    }
}

struct Tracked {
    qulet: Qulet,
    /// Entity to notify on completion (hybrid orchestrator), if any.
    submitter: Option<EntityId>,
    node: Option<(usize, usize)>,
    result: QuletResult,
}

/// The broker entity.
pub struct QBroker {
    name: String,
    config: BrokerConfig,
    policy: PlacementPolicy,
    datacenter_ids: Vec<EntityId>,
    datacenters: Vec<Option<QDatacenter>>,
    shadows: Vec<Vec<NodeScheduler>>,
    tracked: BTreeMap<u32, Tracked>,
    initial: Vec<u32>,
    external_expected: usize,
    pending_external: Vec<u32>,
    resolved: usize,
    ready: bool,
    finished: bool,
}

impl QBroker {
    pub fn new(
        name: impl Into<String>,
        config: BrokerConfig,
        datacenter_ids: Vec<EntityId>,
        qulets: Vec<Qulet>,
        external_expected: usize,
    ) -> Self {
        let mut tracked = BTreeMap::new();
        let mut initial: Vec<(f64, u32)> = Vec::new();
        for q in qulets {
            initial.push((q.arrival, q.id));
            tracked.insert(
                q.id,
                Tracked {
                    result: QuletResult::unresolved(&q),
                    qulet: q,
                    submitter: None,
                    node: None,
                },
            );
        }
        initial.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let n = datacenter_ids.len();
        Self {
            name: name.into(),
            policy: PlacementPolicy::new(config.policy),
            config,
            datacenter_ids,
            datacenters: vec![None; n],
            shadows: vec![Vec::new(); n],
            tracked,
            initial: initial.into_iter().map(|(_, id)| id).collect(),
            external_expected,
            pending_external: Vec::new(),
            resolved: 0,
            ready: false,
            finished: false,
        }
    }

    pub fn results(&self) -> Vec<QuletResult> {
        self.tracked.values().map(|t| t.result.clone()).collect()
    }

    pub fn qulets(&self) -> impl Iterator<Item = &Qulet> {
        self.tracked.values().map(|t| &t.qulet)
    }

    pub fn finished(&self) -> bool {
        self.finished
    }

    fn check_finished(&mut self, ctx: &mut Context<'_, Payload>) {
        if self.ready && !self.finished && self.resolved == self.initial.len() + self.external_expected {
            self.finished = true;
            ctx.log("All Qulets executed. Finishing");
        }
    }

    fn resolve(&mut self, id: u32, ctx: &mut Context<'_, Payload>) -> Result<(), SimError> {
        self.resolved += 1;
        let t = &self.tracked[&id];
        if let Some(dest) = t.submitter {
            ctx.send(dest, 0.0, EventTag::QuletResult, Payload::QuletResult(Box::new(t.result.clone())))?;
        }
        self.check_finished(ctx);
        Ok(())
    }

    fn dispatch(&mut self, id: u32, ctx: &mut Context<'_, Payload>) -> Result<(), SimError> {
        let now = ctx.now();
        let mut views = Vec::new();
        let mut index = Vec::new();
        for (d, dc) in self.datacenters.iter().enumerate() {
            let Some(dc) = dc else { continue };
            for (k, node) in dc.nodes.iter().enumerate() {
                views.push(NodeView {
                    node,
                    characteristics: &dc.characteristics,
                    state: &self.shadows[d][k],
                });
                index.push((d, k));
            }
        }
        let tracked = self.tracked.get_mut(&id).expect("dispatching a tracked qulet");
        tracked.qulet.status = QuletStatus::Submitted;
        let decision = select_node(&tracked.qulet, &views, &mut self.policy, &self.config, now);
        drop(views);
        match decision {
            Ok(decision) => {
                let pos = index
                    .iter()
                    .position(|&(d, k)| {
                        self.datacenters[d].as_ref().map(|dc| dc.nodes[k].id) == Some(decision.node_id)
                    })
                    .expect("decision refers to a known node");
                let (d, k) = index[pos];
                let dc = self.datacenters[d].as_ref().expect("datacenter known");
                let node = &dc.nodes[k];
                let job = node_job(&tracked.qulet, node, &self.config);
                let delay = self.config.compile_time + dc.characteristics.base_network_delay;
                let enqueue = now + delay;
                self.shadows[d][k]
                    .admit(job.clone(), enqueue)
                    .map_err(|e| SimError::Entity(e.to_string()))?;
                tracked.node = Some((d, k));
                tracked.result.node_id = Some(node.id);
                ctx.log(format!("Sending Qulet {} to QNode #{}", id, node.id));
                ctx.send_at(
                    self.datacenter_ids[d],
                    enqueue,
                    EventTag::QuletSubmit,
                    Payload::Submit(Box::new(Submission { node_id: node.id, job })),
                )?;
                Ok(())
            }
            Err(err) => {
                tracked.qulet.status = QuletStatus::Failed;
                tracked.result.status = QuletStatus::Failed;
                tracked.result.reason = Some(err.to_string());
                ctx.log(format!("Qulet {id} failed: {}", failure_reason(&err)));
                self.resolve(id, ctx)
            }
        }
    }

    fn on_done(&mut self, done: &NodeDone, ctx: &mut Context<'_, Payload>) -> Result<(), SimError> {
        let id = done.completion.qulet_id;
        let Some(tracked) = self.tracked.get_mut(&id) else {
            return Err(SimError::Entity(format!("result for unknown qulet {id}")));
        };
        let (d, k) = tracked.node.expect("completed qulet was dispatched");
        let dc = self.datacenters[d].as_ref().expect("datacenter known");
        let node = &dc.nodes[k];
        let c = &done.completion;
        let t_q = execution_time(&tracked.qulet, node, &self.config);
        let start = effective_start(node.policy, c.started, c.completed, t_q, c.admitted);
        let breakdown = compute_breakdown(&tracked.qulet, node, &dc.characteristics, &self.config, c.admitted, start);
        tracked.qulet.status = QuletStatus::Success;
        tracked.qulet.times = Some(breakdown);
        tracked.result = QuletResult {
            qulet_id: id,
            status: QuletStatus::Success,
            node_id: Some(node.id),
            breakdown,
            cost: execution_cost(&tracked.qulet, t_q, &dc.characteristics),
            arrival: tracked.qulet.arrival,
            completion: Some(c.completed),
            reason: None,
        };
        ctx.log(format!("Qulet {id} result received"));
        self.resolve(id, ctx)
    }
}

fn failure_reason(err: &PlacementError) -> &'static str {
    match err {
        PlacementError::NoNodes => "no quantum nodes",
        PlacementError::NoFeasibleNode { .. } => "no feasible node",
        PlacementError::DeadlineInfeasible { .. } => "deadline cannot be met",
    }
}

impl Entity<Payload> for QBroker {
    fn name(&self) -> &str {
        &self.name
    }

    fn handle(&mut self, event: SimEvent<Payload>, ctx: &mut Context<'_, Payload>) -> Result<(), SimError> {
        match (event.tag, event.payload) {
            (EventTag::Start, _) => {
                for &dc in &self.datacenter_ids {
                    ctx.send(dc, 0.0, EventTag::ResourceListRequest, Payload::None)?;
                }
                if self.datacenter_ids.is_empty() {
                    ctx.log("Cloud Resource List received with 0 resource(s)");
                    ctx.send(ctx.id(), self.config.epsilon, EventTag::StartScheduling, Payload::None)?;
                }
            }
            (EventTag::ResourceList, Payload::ResourceList(dc)) => {
                let pos = self
                    .datacenter_ids
                    .iter()
                    .position(|&id| id == event.source)
                    .ok_or_else(|| SimError::Entity("resource list from unknown datacenter".into()))?;
                self.shadows[pos] = dc.nodes.iter().map(NodeScheduler::new).collect();
                self.datacenters[pos] = Some(*dc);
                if self.datacenters.iter().all(Option::is_some) {
                    ctx.log(format!(
                        "Cloud Resource List received with {} resource(s)",
                        self.datacenters.len()
                    ));
                    ctx.send(ctx.id(), self.config.epsilon, EventTag::StartScheduling, Payload::None)?;
                }
            }
            (EventTag::StartScheduling, _) => {
                let names: Vec<&str> = self.datacenters.iter().flatten().map(|d| d.name.as_str()).collect();
                ctx.log(format!("Started scheduling all Qulets to {}", names.join(", ")));
                self.ready = true;
                let now = ctx.now();
                for id in self.initial.clone() {
                    let arrival = self.tracked[&id].qulet.arrival;
                    let at = (arrival + self.config.epsilon).max(now);
                    ctx.send_at(ctx.id(), at, EventTag::Dispatch, Payload::Dispatch(id))?;
                }
                for id in std::mem::take(&mut self.pending_external) {
                    let arrival = self.tracked[&id].qulet.arrival;
                    let at = (arrival + self.config.epsilon).max(now);
                    ctx.send_at(ctx.id(), at, EventTag::Dispatch, Payload::Dispatch(id))?;
                }
                self.check_finished(ctx);
            }
            (EventTag::Dispatch, Payload::Dispatch(id)) => self.dispatch(id, ctx)?,
            (EventTag::QuletDone, Payload::Done(done)) => self.on_done(&done, ctx)?,
            (EventTag::QuletSubmit, Payload::HybridSubmit(q)) => {
                let mut q = *q;
                q.arrival = ctx.now();
                q.status = QuletStatus::Created;
                let id = q.id;
                self.tracked.insert(
                    id,
                    Tracked {
                        result: QuletResult::unresolved(&q),
                        qulet: q,
                        submitter: Some(event.source),
                        node: None,
                    },
                );
                if self.ready {
                    ctx.send(ctx.id(), self.config.epsilon, EventTag::Dispatch, Payload::Dispatch(id))?;
                } else {
                    self.pending_external.push(id);
                }
            }
            (EventTag::QuletSkipped, Payload::QuletSkipped(id)) => {
                let q = Qulet {
                    status: QuletStatus::Skipped,
                    ..self.tracked.get(&id).map(|t| t.qulet.clone()).unwrap_or_else(|| placeholder(id))
                };
                let mut result = QuletResult::unresolved(&q);
                result.status = QuletStatus::Skipped;
                self.tracked.insert(
                    id,
                    Tracked {
                        qulet: q,
                        submitter: None,
                        node: None,
                        result,
                    },
                );
                self.resolved += 1;
                self.check_finished(ctx);
            }
            (tag, _) => {
                return Err(SimError::Entity(format!("broker cannot handle {tag:?}")));
            }
        }
        Ok(())
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}

fn placeholder(id: u32) -> Qulet {
    Qulet {
        id,
        arrival: 0.0,
        width: 0,
        depth: 0,
        shots: 0,
        gates: Default::default(),
        topology: crate::domain::QubitTopology::empty(),
        deadline: None,
        error_tolerance: None,
        status: QuletStatus::Skipped,
        times: None,
    }
}
