//! Hybrid quantum-classical applications as task DAGs.
//!
//! Classical tasks (cloudlets) run on MIPS-rated classical nodes, quantum
//! tasks go through the broker. A task is ready once every predecessor has
//! finished and the per-edge transfer time has elapsed.

use std::any::Any;
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::domain::{QuletStatus, Qulet};
use crate::kernel::{Context, Entity, EntityId, EventTag, SimError, SimEvent};
use crate::message::Payload;

pub type TaskId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TaskStatus {
    #[default]
    Pending,
    Running,
    Done,
    Failed,
    Skipped,
}

impl TaskStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Pending => "pending",
            Self::Running => "running",
            Self::Done => "done",
            Self::Failed => "failed",
            Self::Skipped => "skipped",
        }
    }
}

/// A classical task measured in million instructions.
#[derive(Debug, Clone, PartialEq)]
pub struct Cloudlet {
    pub id: TaskId,
    pub length: f64,
    pub arrival: f64,
    pub status: TaskStatus,
    pub finish_time: Option<f64>,
}

impl Cloudlet {
    pub fn new(id: TaskId, length: f64) -> Self {
        Self {
            id,
            length,
            arrival: 0.0,
            status: TaskStatus::Pending,
            finish_time: None,
        }
    }

    pub fn with_arrival(mut self, arrival: f64) -> Self {
        self.arrival = arrival;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalNode {
    pub id: u32,
    pub mips: f64,
    pub busy_until: f64,
}

impl ClassicalNode {
    pub fn new(id: u32, mips: f64) -> Self {
        Self {
            id,
            mips,
            busy_until: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Task {
    Classical(Cloudlet),
    Quantum(Qulet),
}

impl Task {
    pub fn id(&self) -> TaskId {
        match self {
            Task::Classical(c) => c.id,
            Task::Quantum(q) => q.id,
        }
    }

    pub fn arrival(&self) -> f64 {
        match self {
            Task::Classical(c) => c.arrival,
            Task::Quantum(q) => q.arrival,
        }
    }

    pub fn kind(&self) -> TaskKind {
        match self {
            Task::Classical(_) => TaskKind::Classical,
            Task::Quantum(_) => TaskKind::Quantum,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TaskKind {
    Classical,
    Quantum,
}

impl TaskKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Classical => "classical",
            Self::Quantum => "quantum",
        }
    }
}

/// Precedence `from -> to`, with an optional data-transfer delay.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DagEdge {
    pub from: TaskId,
    pub to: TaskId,
    pub transfer: f64,
}

impl DagEdge {
    pub fn new(from: TaskId, to: TaskId) -> Self {
        Self { from, to, transfer: 0.0 }
    }

    pub fn with_transfer(mut self, transfer: f64) -> Self {
        self.transfer = transfer;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct HybridDag {
    pub tasks: Vec<Task>,
    pub edges: Vec<DagEdge>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DagError {
    #[error("duplicate task id {0}")]
    DuplicateTask(TaskId),
    #[error("edge {from}->{to} references an unknown task")]
    UnknownTask { from: TaskId, to: TaskId },
    #[error("edge {from}->{to} has an invalid transfer time {transfer}")]
    InvalidTransfer { from: TaskId, to: TaskId, transfer: f64 },
    #[error("task {id}: {reason}")]
    InvalidTask { id: TaskId, reason: String },
    #[error("cycle through tasks {}", fmt_cycle(.0))]
    Cycle(Vec<TaskId>),
}

fn fmt_cycle(ids: &[TaskId]) -> String {
    ids.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" -> ")
}

impl HybridDag {
    pub fn new(tasks: Vec<Task>, edges: Vec<DagEdge>) -> Self {
        Self { tasks, edges }
    }

    pub fn is_empty(&self) -> bool {
        self.tasks.is_empty()
    }

    pub fn task(&self, id: TaskId) -> Option<&Task> {
        self.tasks.iter().find(|t| t.id() == id)
    }

    pub fn predecessors(&self, id: TaskId) -> Vec<TaskId> {
        self.edges.iter().filter(|e| e.to == id).map(|e| e.from).collect()
    }

    pub fn successors(&self, id: TaskId) -> Vec<TaskId> {
        self.edges.iter().filter(|e| e.from == id).map(|e| e.to).collect()
    }

    pub fn quantum_count(&self) -> usize {
        self.tasks.iter().filter(|t| matches!(t, Task::Quantum(_))).count()
    }

    /// Task ids in a topological order (ties by id), if acyclic.
    pub fn topological_order(&self) -> Result<Vec<TaskId>, DagError> {
        validate_dag(self)?;
        let mut indegree: BTreeMap<TaskId, usize> = self.tasks.iter().map(|t| (t.id(), 0)).collect();
        for e in &self.edges {
            *indegree.get_mut(&e.to).expect("validated") += 1;
        }
        let mut ready: BTreeSet<TaskId> = indegree.iter().filter(|(_, d)| **d == 0).map(|(id, _)| *id).collect();
        let mut order = Vec::with_capacity(self.tasks.len());
        while let Some(id) = ready.pop_first() {
            order.push(id);
            for e in self.edges.iter().filter(|e| e.from == id) {
                let d = indegree.get_mut(&e.to).expect("validated");
                *d -= 1;
                if *d == 0 {
                    ready.insert(e.to);
                }
            }
        }
        Ok(order)
    }
}

/// Checks ids, edge endpoints and acyclicity. A cycle is reported as the
/// list of tasks along it, starting from the smallest id reached first.
pub fn validate_dag(dag: &HybridDag) -> Result<(), DagError> {
    let mut ids = BTreeSet::new();
    for t in &dag.tasks {
        if !ids.insert(t.id()) {
            return Err(DagError::DuplicateTask(t.id()));
        }
        if let Task::Classical(c) = t {
            if !(c.length.is_finite() && c.length >= 0.0) {
                return Err(DagError::InvalidTask {
                    id: c.id,
                    reason: format!("length must be non-negative, got {}", c.length),
                });
            }
            if !(c.arrival.is_finite() && c.arrival >= 0.0) {
                return Err(DagError::InvalidTask {
                    id: c.id,
                    reason: format!("arrival must be non-negative, got {}", c.arrival),
                });
            }
        }
    }
    let mut adjacency: BTreeMap<TaskId, Vec<TaskId>> = ids.iter().map(|&id| (id, Vec::new())).collect();
    for e in &dag.edges {
        if !ids.contains(&e.from) || !ids.contains(&e.to) {
            return Err(DagError::UnknownTask { from: e.from, to: e.to });
        }
        if !(e.transfer.is_finite() && e.transfer >= 0.0) {
            return Err(DagError::InvalidTransfer {
                from: e.from,
                to: e.to,
                transfer: e.transfer,
            });
        }
        adjacency.get_mut(&e.from).expect("checked").push(e.to);
    }
    for succ in adjacency.values_mut() {
        succ.sort_unstable();
    }

    #[derive(Clone, Copy, PartialEq)]
    enum Colour {
        White,
        Grey,
        Black,
    }
    let mut colour: BTreeMap<TaskId, Colour> = ids.iter().map(|&id| (id, Colour::White)).collect();
    for &root in &ids {
        if colour[&root] != Colour::White {
            continue;
        }
        let mut path = vec![root];
        let mut cursor = vec![0usize];
        colour.insert(root, Colour::Grey);
        while let Some(&node) = path.last() {
            let i = cursor.last_mut().expect("parallel stacks");
            if let Some(&next) = adjacency[&node].get(*i) {
                *i += 1;
                match colour[&next] {
                    Colour::White => {
                        colour.insert(next, Colour::Grey);
                        path.push(next);
                        cursor.push(0);
                    }
                    Colour::Grey => {
                        let from = path.iter().position(|&p| p == next).expect("grey nodes are on the path");
                        return Err(DagError::Cycle(path[from..].to_vec()));
                    }
                    Colour::Black => {}
                }
            } else {
                colour.insert(node, Colour::Black);
                path.pop();
                cursor.pop();
            }
        }
    }
    Ok(())
}

/// Outcome of one DAG task.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskRecord {
    pub id: TaskId,
    pub kind: TaskKind,
    pub status: TaskStatus,
    pub ready: Option<f64>,
    pub start: Option<f64>,
    pub finish: Option<f64>,
    /// Classical node id, or quantum node id for qulets.
    pub node: Option<u32>,
}

impl fmt::Display for TaskRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "task {} ({}) {}", self.id, self.kind.as_str(), self.status.as_str())
    }
}

/// Simulation entity that releases DAG tasks as their dependencies resolve.
pub struct Orchestrator {
    name: String,
    dag: HybridDag,
    nodes: Vec<ClassicalNode>,
    broker: EntityId,
    index: BTreeMap<TaskId, usize>,
    successors: Vec<Vec<(usize, f64)>>,
    preds_left: Vec<usize>,
    ready_at: Vec<f64>,
    records: Vec<TaskRecord>,
    pending: Vec<(f64, TaskId)>,
}

impl Orchestrator {
    /// `dag` must already be valid.
    pub fn new(name: impl Into<String>, dag: HybridDag, mut nodes: Vec<ClassicalNode>, broker: EntityId) -> Self {
        nodes.sort_by_key(|n| n.id);
        let index: BTreeMap<TaskId, usize> = dag.tasks.iter().enumerate().map(|(i, t)| (t.id(), i)).collect();
        let mut successors = vec![Vec::new(); dag.tasks.len()];
        let mut preds_left = vec![0; dag.tasks.len()];
        for e in &dag.edges {
            successors[index[&e.from]].push((index[&e.to], e.transfer));
            preds_left[index[&e.to]] += 1;
        }
        let records = dag
            .tasks
            .iter()
            .map(|t| TaskRecord {
                id: t.id(),
                kind: t.kind(),
                status: TaskStatus::Pending,
                ready: None,
                start: None,
                finish: None,
                node: None,
            })
            .collect();
        let ready_at = dag.tasks.iter().map(Task::arrival).collect();
        Self {
            name: name.into(),
            dag,
            nodes,
            broker,
            index,
            successors,
            preds_left,
            ready_at,
            records,
            pending: Vec::new(),
        }
    }

    pub fn records(&self) -> &[TaskRecord] {
        &self.records
    }

    pub fn classical_nodes(&self) -> &[ClassicalNode] {
        &self.nodes
    }

    /// Latest finish time over completed tasks.
    pub fn makespan(&self) -> f64 {
        self.records.iter().filter_map(|r| r.finish).fold(0.0, f64::max)
    }

    fn make_ready(&mut self, i: usize, ctx: &mut Context<'_, Payload>) -> Result<(), SimError> {
        let ready = self.ready_at[i].max(ctx.now());
        self.records[i].ready = Some(ready);
        self.pending.push((ready, self.records[i].id));
        ctx.send_at(ctx.id(), ready, EventTag::TaskReady, Payload::None)?;
        Ok(())
    }

    fn dispatch_ready(&mut self, ctx: &mut Context<'_, Payload>) -> Result<(), SimError> {
        let now = ctx.now();
        let mut due: Vec<(f64, TaskId)> = Vec::new();
        self.pending.retain(|&(t, id)| {
            if t <= now {
                due.push((t, id));
                false
            } else {
                true
            }
        });
        due.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        for (_, id) in due {
            let i = self.index[&id];
            match &self.dag.tasks[i] {
                Task::Classical(c) => {
                    let Some(node) = self
                        .nodes
                        .iter_mut()
                        .min_by(|a, b| a.busy_until.total_cmp(&b.busy_until).then(a.id.cmp(&b.id)))
                    else {
                        ctx.log(format!("Cloudlet {id} failed: no classical node"));
                        self.records[i].status = TaskStatus::Failed;
                        self.skip_successors(i, ctx)?;
                        continue;
                    };
                    let start = now.max(node.busy_until);
                    let finish = start + c.length / node.mips;
                    node.busy_until = finish;
                    let rec = &mut self.records[i];
                    rec.status = TaskStatus::Running;
                    rec.start = Some(start);
                    rec.node = Some(node.id);
                    ctx.debug(format!("Cloudlet {id} assigned to Node #{}", node.id));
                    ctx.send_at(ctx.id(), finish, EventTag::TaskDone, Payload::TaskDone(id))?;
                }
                Task::Quantum(q) => {
                    let rec = &mut self.records[i];
                    rec.status = TaskStatus::Running;
                    rec.start = Some(now);
                    ctx.send(self.broker, 0.0, EventTag::QuletSubmit, Payload::HybridSubmit(Box::new(q.clone())))?;
                }
            }
        }
        Ok(())
    }

    fn finish(&mut self, i: usize, at: f64, ctx: &mut Context<'_, Payload>) -> Result<(), SimError> {
        self.records[i].status = TaskStatus::Done;
        self.records[i].finish = Some(at);
        for k in 0..self.successors[i].len() {
            let (s, transfer) = self.successors[i][k];
            self.ready_at[s] = self.ready_at[s].max(at + transfer);
            self.preds_left[s] -= 1;
            if self.preds_left[s] == 0 && self.records[s].status == TaskStatus::Pending {
                self.make_ready(s, ctx)?;
            }
        }
        Ok(())
    }

    fn skip_successors(&mut self, i: usize, ctx: &mut Context<'_, Payload>) -> Result<(), SimError> {
        let mut queue: VecDeque<usize> = self.successors[i].iter().map(|&(s, _)| s).collect();
        while let Some(s) = queue.pop_front() {
            if self.records[s].status != TaskStatus::Pending {
                continue;
            }
            self.records[s].status = TaskStatus::Skipped;
            let id = self.records[s].id;
            ctx.log(format!("Task {id} skipped"));
            if self.records[s].kind == TaskKind::Quantum {
                ctx.send(self.broker, 0.0, EventTag::QuletSkipped, Payload::QuletSkipped(id))?;
            }
            queue.extend(self.successors[s].iter().map(|&(n, _)| n));
        }
        Ok(())
    }
}

impl Entity<Payload> for Orchestrator {
    fn name(&self) -> &str {
        &self.name
    }

    fn handle(&mut self, event: SimEvent<Payload>, ctx: &mut Context<'_, Payload>) -> Result<(), SimError> {
        match (event.tag, event.payload) {
            (EventTag::Start, _) => {
                for i in 0..self.dag.tasks.len() {
                    if self.preds_left[i] == 0 {
                        self.make_ready(i, ctx)?;
                    }
                }
            }
            (EventTag::TaskReady, _) => self.dispatch_ready(ctx)?,
            (EventTag::TaskDone, Payload::TaskDone(id)) => {
                let i = self.index[&id];
                ctx.log(format!("Cloudlet {id} finished"));
                self.finish(i, ctx.now(), ctx)?;
            }
            (EventTag::QuletResult, Payload::QuletResult(result)) => {
                let i = *self
                    .index
                    .get(&result.qulet_id)
                    .ok_or_else(|| SimError::Entity(format!("result for unknown task {}", result.qulet_id)))?;
                self.records[i].node = result.node_id;
                if result.status == QuletStatus::Success {
                    self.finish(i, result.completion.unwrap_or(ctx.now()), ctx)?;
                } else {
                    self.records[i].status = TaskStatus::Failed;
                    self.skip_successors(i, ctx)?;
                }
            }
            (tag, _) => return Err(SimError::Entity(format!("orchestrator cannot handle {tag:?}"))),
        }
        Ok(())
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}
