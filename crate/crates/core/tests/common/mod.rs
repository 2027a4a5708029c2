#![allow(dead_code)]

use qcloudsim::domain::{DatacenterCharacteristics, Layer};
use qcloudsim::{BrokerConfig, GateSet, QDatacenter, QNode, QubitTopology, Qulet, Scenario, SharingPolicy};

pub const SAMPLE: &str = include_str!("../../scenarios/sample.toml");

pub const OSLO_EDGES: [(usize, usize); 6] = [(0, 1), (1, 2), (1, 3), (3, 5), (4, 5), (5, 6)];

pub fn gates(names: &[&str]) -> GateSet {
    GateSet::new(names).unwrap()
}

pub fn oslo_gates() -> GateSet {
    gates(&["CX", "ID", "RZ", "SX", "X"])
}

pub fn oslo_topology() -> QubitTopology {
    QubitTopology::new(7, &OSLO_EDGES).unwrap()
}

pub fn oslo(id: u32, policy: SharingPolicy) -> QNode {
    QNode::new(id, format!("oslo{id}"), 32, 2600.0, oslo_gates(), oslo_topology(), None, policy).unwrap()
}

pub fn qulet(id: u32, width: usize, depth: u64, shots: u64, edges: &[(usize, usize)]) -> Qulet {
    Qulet::new(
        id,
        width,
        depth,
        shots,
        gates(&["CX", "RZ", "X"]),
        QubitTopology::new(width, edges).unwrap(),
    )
    .unwrap()
}

/// The two reference qulets: a claw on 5 qubits and a 3-qubit path.
pub fn reference_qulets() -> Vec<Qulet> {
    vec![
        qulet(0, 5, 100, 4000, &[(0, 1), (1, 2), (1, 3)]),
        qulet(1, 3, 50, 1000, &[(0, 1), (1, 2)]),
    ]
}

pub fn datacenter(name: &str, nodes: Vec<QNode>) -> QDatacenter {
    QDatacenter::new(name, Layer::Cloud, nodes, DatacenterCharacteristics::default()).unwrap()
}

pub fn scenario(nodes: Vec<QNode>, qulets: Vec<Qulet>, broker: BrokerConfig) -> Scenario {
    Scenario {
        broker,
        datacenters: vec![datacenter("QDatacenter", nodes)],
        qulets,
        ..Scenario::default()
    }
}

/// Injective maps from `k` circuit qubits into `n` node qubits, all of them.
pub fn for_each_injection(k: usize, n: usize, visit: &mut dyn FnMut(&[usize]) -> bool) -> bool {
    fn rec(k: usize, n: usize, cur: &mut Vec<usize>, used: &mut [bool], visit: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        if cur.len() == k {
            return visit(cur);
        }
        for v in 0..n {
            if !used[v] {
                used[v] = true;
                cur.push(v);
                let stop = rec(k, n, cur, used, visit);
                cur.pop();
                used[v] = false;
                if stop {
                    return true;
                }
            }
        }
        false
    }
    if k > n {
        return false;
    }
    rec(k, n, &mut Vec::new(), &mut vec![false; n], visit)
}

/// Exhaustive existence check: some injection maps every circuit edge onto a node edge.
pub fn embedding_exists(circuit_n: usize, circuit_edges: &[(usize, usize)], node_n: usize, node_edges: &[(usize, usize)]) -> bool {
    let has = |a: usize, b: usize| node_edges.iter().any(|&(x, y)| (x == a && y == b) || (x == b && y == a));
    for_each_injection(circuit_n, node_n, &mut |m| circuit_edges.iter().all(|&(a, b)| has(m[a], m[b])))
}

/// Independent soundness check of a returned assignment.
pub fn mapping_is_sound(assignment: &[usize], circuit_n: usize, circuit_edges: &[(usize, usize)], node_n: usize, node_edges: &[(usize, usize)]) -> bool {
    if assignment.len() != circuit_n || assignment.iter().any(|&v| v >= node_n) {
        return false;
    }
    let mut seen = vec![false; node_n];
    for &v in assignment {
        if std::mem::replace(&mut seen[v], true) {
            return false;
        }
    }
    let has = |a: usize, b: usize| node_edges.iter().any(|&(x, y)| (x == a && y == b) || (x == b && y == a));
    circuit_edges.iter().all(|&(a, b)| has(assignment[a], assignment[b]))
}

/// A DAG task as seen by the reference schedulers below.
#[derive(Debug, Clone)]
pub struct RefTask {
    pub arrival: f64,
    /// Execution time: `length / mips` or `depth * shots / clops`.
    pub duration: f64,
    pub quantum: bool,
}

/// Reference list scheduler: tasks are released in (ready time, index)
/// order; classical tasks take the classical node that frees up first
/// (lowest index on ties), quantum tasks queue FCFS on a single quantum node
/// after a dispatch latency `eps`. Returns (start, finish) per task.
pub fn list_schedule(tasks: &[RefTask], edges: &[(usize, usize, f64)], classical: usize, eps: f64) -> Vec<(f64, f64)> {
    let n = tasks.len();
    let mut done: Vec<Option<(f64, f64)>> = vec![None; n];
    let mut free = vec![0.0f64; classical];
    let mut quantum_free = 0.0f64;
    for _ in 0..n {
        let mut pick: Option<(f64, usize)> = None;
        for v in 0..n {
            if done[v].is_some() {
                continue;
            }
            let mut ready = tasks[v].arrival;
            let mut blocked = false;
            for &(a, b, w) in edges {
                if b == v {
                    match done[a] {
                        Some((_, f)) => ready = ready.max(f + w),
                        None => blocked = true,
                    }
                }
            }
            if blocked {
                continue;
            }
            if pick.is_none_or(|(r, _)| ready < r) {
                pick = Some((ready, v));
            }
        }
        let (ready, v) = pick.expect("acyclic graphs always have a released task");
        let t = &tasks[v];
        if t.quantum {
            let admit = ready + eps;
            let start = admit.max(quantum_free);
            let finish = start + t.duration;
            quantum_free = finish;
            done[v] = Some((ready, finish));
        } else {
            let k = (0..classical)
                .min_by(|&a, &b| free[a].total_cmp(&free[b]).then(a.cmp(&b)))
                .expect("at least one classical node");
            let start = ready.max(free[k]);
            let finish = start + t.duration;
            free[k] = finish;
            done[v] = Some((start, finish));
        }
    }
    done.into_iter().map(|d| d.unwrap()).collect()
}

/// Makespan with unlimited resources: the heaviest path, found by walking
/// every path from every task. Quantum tasks carry the extra `eps`.
pub fn longest_path(tasks: &[RefTask], edges: &[(usize, usize, f64)], eps: f64) -> f64 {
    fn walk(v: usize, start: f64, tasks: &[RefTask], edges: &[(usize, usize, f64)], eps: f64, best: &mut f64) {
        let t = &tasks[v];
        let begin = start.max(t.arrival);
        let finish = begin + t.duration + if t.quantum { eps } else { 0.0 };
        *best = best.max(finish);
        for &(a, b, w) in edges {
            if a == v {
                walk(b, finish + w, tasks, edges, eps, best);
            }
        }
    }
    let mut best = 0.0;
    for v in 0..tasks.len() {
        walk(v, 0.0, tasks, edges, eps, &mut best);
    }
    best
}

pub const MIPS: f64 = 500.0;

#[derive(Debug, Clone)]
pub enum DagItem {
    Classical { length: f64, arrival: f64 },
    Quantum { depth: u64, shots: u64, arrival: f64 },
}

/// Random hybrid DAG description; task ids are indices and edges always go
/// from a lower to a higher index.
#[derive(Debug, Clone)]
pub struct DagSpec {
    pub items: Vec<DagItem>,
    pub edges: Vec<(usize, usize, f64)>,
}

impl DagSpec {
    pub fn random<R: rand::Rng>(rng: &mut R, max_n: usize) -> Self {
        let n = rng.random_range(1..=max_n);
        let items = (0..n)
            .map(|_| {
                let arrival = if rng.random_bool(0.2) { rng.random_range(0.0..5.0) } else { 0.0 };
                if rng.random_bool(0.4) {
                    DagItem::Quantum {
                        depth: rng.random_range(1..=60),
                        shots: rng.random_range(10..=500),
                        arrival,
                    }
                } else {
                    DagItem::Classical {
                        length: rng.random_range(50.0..3000.0),
                        arrival,
                    }
                }
            })
            .collect();
        let mut edges = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                if rng.random_bool(0.3) {
                    let w = if rng.random_bool(0.5) { 0.0 } else { rng.random_range(0.0..2.0) };
                    edges.push((a, b, w));
                }
            }
        }
        Self { items, edges }
    }

    pub fn ref_tasks(&self) -> Vec<RefTask> {
        self.items
            .iter()
            .map(|it| match *it {
                DagItem::Classical { length, arrival } => RefTask {
                    arrival,
                    duration: length / MIPS,
                    quantum: false,
                },
                DagItem::Quantum { depth, shots, arrival } => RefTask {
                    arrival,
                    duration: depth as f64 * shots as f64 / 2600.0,
                    quantum: true,
                },
            })
            .collect()
    }

    pub fn dag(&self) -> qcloudsim::HybridDag {
        use qcloudsim::{Cloudlet, DagEdge, Task};
        let tasks = self
            .items
            .iter()
            .enumerate()
            .map(|(i, it)| match *it {
                DagItem::Classical { length, arrival } => Task::Classical(Cloudlet::new(i as u32, length).with_arrival(arrival)),
                DagItem::Quantum { depth, shots, arrival } => {
                    Task::Quantum(qulet(i as u32, 2, depth, shots, &[(0, 1)]).with_arrival(arrival))
                }
            })
            .collect();
        let edges = self
            .edges
            .iter()
            .map(|&(a, b, w)| DagEdge::new(a as u32, b as u32).with_transfer(w))
            .collect();
        qcloudsim::HybridDag::new(tasks, edges)
    }

    /// Scenario with `classical` classical nodes and `quantum` identical
    /// space-shared quantum nodes.
    pub fn scenario(&self, classical: usize, quantum: usize, policy: qcloudsim::PolicyKind) -> Scenario {
        let nodes = (0..quantum).map(|i| oslo(i as u32, SharingPolicy::SpaceShared)).collect();
        let mut s = scenario(
            nodes,
            vec![],
            BrokerConfig {
                policy,
                ..BrokerConfig::default()
            },
        );
        s.classical_nodes = (0..classical).map(|i| qcloudsim::ClassicalNode::new(i as u32, MIPS)).collect();
        s.dag = Some(self.dag());
        s
    }
}
