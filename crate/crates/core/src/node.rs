//! Per-node sharing policies.
//!
//! A qulet's work is measured in layer-executions (depth times shots). A node
//! processes `clops` layer-executions per second:
//!
//! * space-shared: one qulet at a time, FCFS;
//! * time-shared: processor sharing, `k` resident qulets each get `clops / k`;
//! * spatial-shared: qulets run side by side on disjoint qubit regions, each at
//!   the full rate, while the head of the FCFS queue waits until it fits.
//!
//! Nothing is ever preempted or migrated.

use std::collections::{BTreeSet, VecDeque};

use thiserror::Error;

use crate::domain::{QNode, QubitTopology, SharingPolicy};
use crate::mapping::{find_embedding, QubitMapping};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NodeError {
    #[error("qulet {qulet_id} cannot be mapped onto node {node_id}")]
    Unembeddable { qulet_id: u32, node_id: u32 },
    #[error("admission at t={now} precedes the node clock {clock}")]
    TimeWentBackwards { now: f64, clock: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeJob {
    pub qulet_id: u32,
    /// Layer-executions to perform.
    pub work: f64,
    pub circuit: QubitTopology,
}

#[derive(Debug, Clone, PartialEq)]
pub enum NodeEvent {
    Started {
        qulet_id: u32,
        time: f64,
        mapping: QubitMapping,
    },
    Completed(Completion),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Completion {
    pub qulet_id: u32,
    pub admitted: f64,
    pub started: f64,
    pub completed: f64,
    pub work: f64,
    pub mapping: QubitMapping,
}

#[derive(Debug, Clone, PartialEq)]
struct Running {
    job: NodeJob,
    admitted: f64,
    started: f64,
    mapping: QubitMapping,
    /// Space/spatial sharing: absolute completion time.
    /// Time sharing: attained-service level at which the job is done.
    finish: f64,
    order: u64,
}

#[derive(Debug, Clone, PartialEq)]
struct Waiting {
    job: NodeJob,
    admitted: f64,
    order: u64,
}

/// Snapshot of a node's queue, as seen at `last_update`.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeWorkState {
    pub running: Vec<(u32, f64, QubitMapping)>,
    pub waiting: Vec<u32>,
    pub busy_until: f64,
    pub last_update: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub start: f64,
    pub completion: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeScheduler {
    node_id: u32,
    policy: SharingPolicy,
    clops: f64,
    topology: QubitTopology,
    running: Vec<Running>,
    waiting: VecDeque<Waiting>,
    last_update: f64,
    /// Attained service per resident job under time sharing.
    service: f64,
    next_order: u64,
    admitted_work: f64,
    completed_work: f64,
}

impl NodeScheduler {
    pub fn new(node: &QNode) -> Self {
        Self::with_policy(node, node.policy)
    }

    pub fn with_policy(node: &QNode, policy: SharingPolicy) -> Self {
        Self {
            node_id: node.id,
            policy,
            clops: node.clops,
            topology: node.topology.clone(),
            running: Vec::new(),
            waiting: VecDeque::new(),
            last_update: 0.0,
            service: 0.0,
            next_order: 0,
            admitted_work: 0.0,
            completed_work: 0.0,
        }
    }

    pub fn policy(&self) -> SharingPolicy {
        self.policy
    }

    pub fn node_id(&self) -> u32 {
        self.node_id
    }

    pub fn last_update(&self) -> f64 {
        self.last_update
    }

    pub fn is_idle(&self) -> bool {
        self.running.is_empty() && self.waiting.is_empty()
    }

    pub fn admitted_work(&self) -> f64 {
        self.admitted_work
    }

    pub fn completed_work(&self) -> f64 {
        self.completed_work
    }

    /// Time of the next completion if no further qulets arrive.
    pub fn next_completion(&self) -> Option<f64> {
        match self.policy {
            SharingPolicy::TimeShared => {
                let min = self.running.iter().map(|r| r.finish).min_by(f64::total_cmp)?;
                let rate = self.clops / self.running.len() as f64;
                Some(self.last_update + (min - self.service).max(0.0) / rate)
            }
            _ => self.running.iter().map(|r| r.finish).min_by(f64::total_cmp),
        }
    }

    /// Admits a qulet at `now`. Completions due at or before `now` are
    /// processed first and are part of the returned events.
    pub fn admit(&mut self, job: NodeJob, now: f64) -> Result<Vec<NodeEvent>, NodeError> {
        if now < self.last_update {
            return Err(NodeError::TimeWentBackwards {
                now,
                clock: self.last_update,
            });
        }
        let solo = find_embedding(&job.circuit, &self.topology, &BTreeSet::new()).ok_or(NodeError::Unembeddable {
            qulet_id: job.qulet_id,
            node_id: self.node_id,
        })?;
        let mut events = self.advance(now);
        self.admitted_work += job.work;
        let order = self.next_order;
        self.next_order += 1;
        match self.policy {
            SharingPolicy::TimeShared => {
                events.push(NodeEvent::Started {
                    qulet_id: job.qulet_id,
                    time: now,
                    mapping: solo.clone(),
                });
                self.running.push(Running {
                    admitted: now,
                    started: now,
                    finish: self.service + job.work,
                    mapping: solo,
                    job,
                    order,
                });
            }
            SharingPolicy::SpaceShared | SharingPolicy::SpatialShared => {
                self.waiting.push_back(Waiting {
                    job,
                    admitted: now,
                    order,
                });
                self.start_waiting(now, &mut events);
            }
        }
        Ok(events)
    }

    /// Processes every completion due at or before `now` and moves the node
    /// clock to `now`.
    pub fn advance(&mut self, now: f64) -> Vec<NodeEvent> {
        let mut events = Vec::new();
        while let Some(t) = self.next_completion() {
            if t > now {
                break;
            }
            self.complete_at(t, &mut events);
        }
        if now > self.last_update {
            if self.policy == SharingPolicy::TimeShared && !self.running.is_empty() {
                let rate = self.clops / self.running.len() as f64;
                let min = self.running.iter().map(|r| r.finish).min_by(f64::total_cmp).unwrap_or(0.0);
                self.service = (self.service + (now - self.last_update) * rate).min(min);
            }
            self.last_update = now;
        }
        events
    }

    fn complete_at(&mut self, t: f64, events: &mut Vec<NodeEvent>) {
        let level = match self.policy {
            SharingPolicy::TimeShared => {
                let min = self.running.iter().map(|r| r.finish).min_by(f64::total_cmp).unwrap_or(0.0);
                self.service = min;
                min
            }
            _ => t,
        };
        self.last_update = self.last_update.max(t);
        let mut done: Vec<Running> = Vec::new();
        let mut i = 0;
        while i < self.running.len() {
            if self.running[i].finish <= level {
                done.push(self.running.remove(i));
            } else {
                i += 1;
            }
        }
        done.sort_by_key(|r| r.order);
        for r in done {
            self.completed_work += r.job.work;
            events.push(NodeEvent::Completed(Completion {
                qulet_id: r.job.qulet_id,
                admitted: r.admitted,
                started: r.started,
                completed: t,
                work: r.job.work,
                mapping: r.mapping,
            }));
        }
        if self.policy == SharingPolicy::TimeShared && self.running.is_empty() {
            self.service = 0.0;
        }
        self.start_waiting(t, events);
    }

    fn start_waiting(&mut self, now: f64, events: &mut Vec<NodeEvent>) {
        loop {
            let Some(head) = self.waiting.front() else {
                return;
            };
            let mapping = match self.policy {
                SharingPolicy::SpaceShared => {
                    if !self.running.is_empty() {
                        return;
                    }
                    find_embedding(&head.job.circuit, &self.topology, &BTreeSet::new())
                }
                SharingPolicy::SpatialShared => {
                    let occupied: BTreeSet<usize> =
                        self.running.iter().flat_map(|r| r.mapping.node_qubits()).collect();
                    find_embedding(&head.job.circuit, &self.topology, &occupied)
                }
                SharingPolicy::TimeShared => return,
            };
            let Some(mapping) = mapping else {
                return;
            };
            let w = self.waiting.pop_front().expect("head exists");
            let finish = now + w.job.work / self.clops;
            events.push(NodeEvent::Started {
                qulet_id: w.job.qulet_id,
                time: now,
                mapping: mapping.clone(),
            });
            self.running.push(Running {
                job: w.job,
                admitted: w.admitted,
                started: now,
                mapping,
                finish,
                order: w.order,
            });
        }
    }

    /// Start and completion of `job` if it were admitted at `now` and no other
    /// qulet arrived afterwards.
    pub fn predict(&self, job: NodeJob, now: f64) -> Result<Prediction, NodeError> {
        let id = job.qulet_id;
        let mut sim = self.clone();
        let mut start = None;
        let mut pending = sim.admit(job, now.max(self.last_update))?;
        loop {
            for ev in pending.drain(..) {
                match ev {
                    NodeEvent::Started { qulet_id, time, .. } if qulet_id == id => start = Some(time),
                    NodeEvent::Completed(c) if c.qulet_id == id => {
                        return Ok(Prediction {
                            start: start.unwrap_or(c.started),
                            completion: c.completed,
                        })
                    }
                    _ => {}
                }
            }
            let t = sim
                .next_completion()
                .expect("an admitted qulet always completes eventually");
            pending = sim.advance(t);
        }
    }

    /// Time at which the node would drain if nothing else arrived.
    pub fn drain_time(&self) -> f64 {
        let mut sim = self.clone();
        let mut t = self.last_update;
        while let Some(next) = sim.next_completion() {
            sim.advance(next);
            t = next;
        }
        t
    }

    pub fn state(&self) -> NodeWorkState {
        let running = self
            .running
            .iter()
            .map(|r| {
                let remaining = match self.policy {
                    SharingPolicy::TimeShared => r.finish - self.service,
                    _ => (r.finish - self.last_update).max(0.0) * self.clops,
                };
                (r.job.qulet_id, remaining.max(0.0), r.mapping.clone())
            })
            .collect();
        NodeWorkState {
            running,
            waiting: self.waiting.iter().map(|w| w.job.qulet_id).collect(),
            busy_until: self.drain_time(),
            last_update: self.last_update,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::GateSet;

    const EPS: f64 = 0.01;

    fn oslo(policy: SharingPolicy) -> QNode {
        QNode::new(
            0,
            "ibmq_oslo",
            32,
            2600.0,
            GateSet::new(["CX", "ID", "RZ", "SX", "X"]).unwrap(),
            QubitTopology::new(7, &[(0, 1), (1, 2), (1, 3), (3, 5), (4, 5), (5, 6)]).unwrap(),
            None,
            policy,
        )
        .unwrap()
    }

    fn job(id: u32, depth: u64, shots: u64, circuit: QubitTopology) -> NodeJob {
        NodeJob {
            qulet_id: id,
            work: depth as f64 * shots as f64,
            circuit,
        }
    }

    fn claw() -> QubitTopology {
        QubitTopology::new(4, &[(0, 1), (1, 2), (1, 3)]).unwrap()
    }

    fn run_all(s: &mut NodeScheduler, mut events: Vec<NodeEvent>) -> Vec<Completion> {
        let mut out = Vec::new();
        loop {
            for e in events.drain(..) {
                if let NodeEvent::Completed(c) = e {
                    out.push(c);
                }
            }
            match s.next_completion() {
                Some(t) => events = s.advance(t),
                None => return out,
            }
        }
    }

    fn admit_all(s: &mut NodeScheduler, jobs: Vec<NodeJob>, now: f64) -> Vec<Completion> {
        let mut events = Vec::new();
        for j in jobs {
            events.extend(s.admit(j, now).unwrap());
        }
        run_all(s, events)
    }

    fn sample_pair() -> Vec<NodeJob> {
        vec![
            job(0, 100, 4000, claw().widened(5)),
            job(1, 50, 1000, QubitTopology::path(3)),
        ]
    }

    #[test]
    fn space_shared_sample_pair() {
        let mut s = NodeScheduler::new(&oslo(SharingPolicy::SpaceShared));
        let done = admit_all(&mut s, sample_pair(), EPS);
        assert_eq!(done.len(), 2);
        assert_eq!(crate::kernel::format_log_time(done[0].completed), "153.86");
        assert_eq!(crate::kernel::format_log_time(done[1].completed), "173.09");
        assert_eq!(done[1].started, done[0].completed);
    }

    #[test]
    fn space_shared_single_and_third() {
        let mut s = NodeScheduler::new(&oslo(SharingPolicy::SpaceShared));
        let done = admit_all(&mut s, vec![job(0, 10, 260, QubitTopology::path(2))], 3.0);
        assert_eq!(done[0].completed, 3.0 + 1.0);

        let mut s = NodeScheduler::new(&oslo(SharingPolicy::SpaceShared));
        let mut jobs = sample_pair();
        jobs.push(job(2, 10, 260, QubitTopology::path(2)));
        let done = admit_all(&mut s, jobs, EPS);
        // FCFS sum by hand: 0.01 + 153.84615 + 19.23077 + 1.0
        assert!((done[2].completed - 174.086_923).abs() < 1e-5);
        assert_eq!(crate::kernel::format_log_time(done[2].completed), "174.09");
    }

    #[test]
    fn time_shared_sample_pair() {
        let mut s = NodeScheduler::new(&oslo(SharingPolicy::TimeShared));
        let done = admit_all(&mut s, sample_pair(), EPS);
        // Fluid model: both at 1300/s until 50000 units are served,
        // then the remaining 350000 at 2600/s.
        let first = 50_000.0 / 1300.0;
        let second = first + 350_000.0 / 2600.0;
        assert_eq!(done[0].qulet_id, 1);
        assert!((done[0].completed - (EPS + first)).abs() < 1e-9);
        assert!((done[1].completed - (EPS + second)).abs() < 1e-9);
        assert_eq!(crate::kernel::format_log_time(done[0].completed), "38.47");
        assert_eq!(crate::kernel::format_log_time(done[1].completed), "173.09");
    }

    #[test]
    fn time_shared_identical_pair_finishes_together() {
        let mut s = NodeScheduler::new(&oslo(SharingPolicy::TimeShared));
        let w = 10 * 2600;
        let done = admit_all(
            &mut s,
            vec![job(0, 10, 2600, QubitTopology::path(2)), job(1, 10, 2600, QubitTopology::path(2))],
            0.0,
        );
        assert_eq!(done.len(), 2);
        for c in &done {
            assert!((c.completed - 2.0 * w as f64 / 2600.0).abs() < 1e-12);
        }
    }

    #[test]
    fn single_qulet_same_under_every_policy() {
        let mut results = Vec::new();
        for p in [SharingPolicy::SpaceShared, SharingPolicy::TimeShared, SharingPolicy::SpatialShared] {
            let mut s = NodeScheduler::new(&oslo(p));
            let done = admit_all(&mut s, vec![job(0, 100, 4000, claw())], 0.5);
            results.push(done[0].completed);
        }
        assert_eq!(results[0], results[1]);
        assert_eq!(results[0], results[2]);
    }

    #[test]
    fn spatial_runs_disjoint_edges_concurrently() {
        let mut s = NodeScheduler::new(&oslo(SharingPolicy::SpatialShared));
        let done = admit_all(
            &mut s,
            vec![job(0, 100, 4000, QubitTopology::path(2)), job(1, 50, 1000, QubitTopology::path(2))],
            EPS,
        );
        assert_eq!(done[0].qulet_id, 1);
        assert_eq!(done[0].started, EPS);
        assert_eq!(done[1].started, EPS);
        assert_eq!(crate::kernel::format_log_time(done[1].completed), "153.86");
        assert_eq!(done[0].mapping.assignment(), &[3, 5]);
    }

    #[test]
    fn spatial_claws_serialise() {
        let star = QubitTopology::star(4);
        let mut s = NodeScheduler::new(&oslo(SharingPolicy::SpatialShared));
        let done = admit_all(&mut s, vec![job(0, 100, 4000, star.clone()), job(1, 50, 1000, star)], EPS);
        assert_eq!(done[1].started, done[0].completed);
        assert_eq!(crate::kernel::format_log_time(done[1].completed), "173.09");
    }

    #[test]
    fn unembeddable_job_rejected() {
        let tri = QubitTopology::complete(3);
        let mut s = NodeScheduler::new(&oslo(SharingPolicy::SpatialShared));
        assert_eq!(
            s.admit(job(9, 1, 1, tri), 0.0),
            Err(NodeError::Unembeddable { qulet_id: 9, node_id: 0 })
        );
        assert!(s.is_idle());
    }

    #[test]
    fn prediction_matches_actual_space_shared() {
        let mut s = NodeScheduler::new(&oslo(SharingPolicy::SpaceShared));
        s.admit(job(0, 100, 4000, claw()), EPS).unwrap();
        let p = s.predict(job(1, 50, 1000, QubitTopology::path(3)), EPS).unwrap();
        let done = admit_all(&mut s, vec![job(1, 50, 1000, QubitTopology::path(3))], EPS);
        assert_eq!(p.completion, done[1].completed);
        assert_eq!(p.start, done[1].started);
    }

    #[test]
    fn state_snapshot() {
        let mut s = NodeScheduler::new(&oslo(SharingPolicy::SpaceShared));
        s.admit(job(0, 100, 4000, claw()), 0.0).unwrap();
        s.admit(job(1, 50, 1000, claw()), 0.0).unwrap();
        let st = s.state();
        assert_eq!(st.running.len(), 1);
        assert_eq!(st.running[0].1, 400_000.0);
        assert_eq!(st.waiting, vec![1]);
        assert!((st.busy_until - 450_000.0 / 2600.0).abs() < 1e-9);

        let mut s = NodeScheduler::new(&oslo(SharingPolicy::TimeShared));
        s.admit(job(0, 100, 4000, claw()), 0.0).unwrap();
        s.admit(job(1, 50, 1000, claw()), 0.0).unwrap();
        s.advance(10.0);
        let st = s.state();
        assert!((st.running[0].1 - (400_000.0 - 13_000.0)).abs() < 1e-6);
        assert!((st.running[1].1 - (50_000.0 - 13_000.0)).abs() < 1e-6);
    }

    #[test]
    fn admission_into_the_past_rejected() {
        let mut s = NodeScheduler::new(&oslo(SharingPolicy::SpaceShared));
        s.admit(job(0, 1, 1, claw()), 5.0).unwrap();
        assert!(matches!(
            s.admit(job(1, 1, 1, claw()), 4.0),
            Err(NodeError::TimeWentBackwards { .. })
        ));
    }
}
