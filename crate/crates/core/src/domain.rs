//! Quantum resources, quantum tasks and the benchmarking formulas that relate
//! them (quantum volume, CLOPS, execution-time and cost estimates).

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::broker::TimeBreakdown;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DomainError {
    #[error("{0}")]
    OutOfDomain(String),
    #[error("invalid topology: {}", join_violations(.0))]
    Topology(Vec<TopologyViolation>),
    #[error("gate name must not be empty")]
    EmptyGateName,
}

fn join_violations(v: &[TopologyViolation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

fn out_of_domain(msg: impl Into<String>) -> DomainError {
    DomainError::OutOfDomain(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TopologyViolation {
    EndpointOutOfRange { edge: (usize, usize), num_qubits: usize },
    SelfLoop(usize),
    Duplicate((usize, usize)),
}

impl fmt::Display for TopologyViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::EndpointOutOfRange { edge, num_qubits } => write!(
                f,
                "edge ({}, {}) has an endpoint outside 0..{}",
                edge.0, edge.1, num_qubits
            ),
            Self::SelfLoop(q) => write!(f, "self-loop on qubit {q}"),
            Self::Duplicate((a, b)) => write!(f, "duplicate edge ({a}, {b})"),
        }
    }
}

/// Lists every invariant violation of a raw edge list over `num_qubits`
/// vertices. An empty result means the list describes a valid topology.
pub fn validate_topology(num_qubits: usize, edges: &[(usize, usize)]) -> Vec<TopologyViolation> {
    let mut violations = Vec::new();
    let mut seen = BTreeSet::new();
    for &(a, b) in edges {
        if a >= num_qubits || b >= num_qubits {
            violations.push(TopologyViolation::EndpointOutOfRange {
                edge: (a, b),
                num_qubits,
            });
            continue;
        }
        if a == b {
            violations.push(TopologyViolation::SelfLoop(a));
            continue;
        }
        let key = (a.min(b), a.max(b));
        if !seen.insert(key) {
            violations.push(TopologyViolation::Duplicate(key));
        }
    }
    violations
}

/// Undirected coupling graph over qubits `0..num_qubits`.
///
/// Edges are stored canonically as `(min, max)` pairs in ascending order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QubitTopology {
    num_qubits: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

impl QubitTopology {
    pub fn new(num_qubits: usize, edges: &[(usize, usize)]) -> Result<Self, DomainError> {
        let violations = validate_topology(num_qubits, edges);
        if !violations.is_empty() {
            return Err(DomainError::Topology(violations));
        }
        let mut canon: Vec<(usize, usize)> = edges.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
        canon.sort_unstable();
        Ok(Self::from_canonical(num_qubits, canon))
    }

    fn from_canonical(num_qubits: usize, edges: Vec<(usize, usize)>) -> Self {
        let mut adjacency = vec![Vec::new(); num_qubits];
        for &(a, b) in &edges {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Self {
            num_qubits,
            edges,
            adjacency,
        }
    }

    /// Graph with no vertices.
    pub fn empty() -> Self {
        Self::from_canonical(0, Vec::new())
    }

    /// `n` isolated qubits.
    pub fn isolated(n: usize) -> Self {
        Self::from_canonical(n, Vec::new())
    }

    pub fn path(n: usize) -> Self {
        Self::from_canonical(n, (1..n).map(|i| (i - 1, i)).collect())
    }

    /// Star with centre 0.
    pub fn star(n: usize) -> Self {
        Self::from_canonical(n, (1..n).map(|i| (0, i)).collect())
    }

    pub fn complete(n: usize) -> Self {
        let mut edges = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                edges.push((a, b));
            }
        }
        Self::from_canonical(n, edges)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, q: usize) -> &[usize] {
        &self.adjacency[q]
    }

    pub fn degree(&self, q: usize) -> usize {
        self.adjacency[q].len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        a < self.num_qubits && self.adjacency[a].binary_search(&b).is_ok()
    }

    /// Same edges over `width` vertices; extra vertices are isolated.
    /// Never shrinks the vertex set.
    pub fn widened(&self, width: usize) -> Self {
        if width <= self.num_qubits {
            return self.clone();
        }
        Self::from_canonical(width, self.edges.clone())
    }
}

/// Set of gate names, normalised to upper case.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GateSet {
    gates: BTreeSet<String>,
}

impl GateSet {
    pub fn new<I, S>(names: I) -> Result<Self, DomainError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut gates = BTreeSet::new();
        for name in names {
            let name = name.as_ref().trim();
            if name.is_empty() {
                return Err(DomainError::EmptyGateName);
            }
            gates.insert(name.to_uppercase());
        }
        Ok(Self { gates })
    }

    pub fn contains(&self, gate: &str) -> bool {
        self.gates.contains(&gate.to_uppercase())
    }

    pub fn is_subset(&self, other: &GateSet) -> bool {
        self.gates.is_subset(&other.gates)
    }

    /// Gates of `self` that `supported` lacks.
    pub fn missing_from(&self, supported: &GateSet) -> Vec<&str> {
        self.gates.iter().filter(|g| !supported.gates.contains(*g)).map(String::as_str).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.gates.iter().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorRates {
    pub readout_error: f64,
    pub cnot_error: f64,
}

impl ErrorRates {
    pub fn max(&self) -> f64 {
        self.readout_error.max(self.cnot_error)
    }
}

/// Resource-sharing policy of a quantum node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SharingPolicy {
    #[default]
    SpaceShared,
    TimeShared,
    SpatialShared,
}

impl SharingPolicy {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::SpaceShared => "space-shared",
            Self::TimeShared => "time-shared",
            Self::SpatialShared => "spatial-shared",
        }
    }
}

/// A physical gate-based quantum computer.
#[derive(Debug, Clone, PartialEq)]
pub struct QNode {
    pub id: u32,
    pub name: String,
    pub qubits: usize,
    pub quantum_volume: u64,
    pub clops: f64,
    pub gate_set: GateSet,
    pub topology: QubitTopology,
    pub error: Option<ErrorRates>,
    pub policy: SharingPolicy,
}

impl QNode {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        id: u32,
        name: impl Into<String>,
        quantum_volume: u64,
        clops: f64,
        gate_set: GateSet,
        topology: QubitTopology,
        error: Option<ErrorRates>,
        policy: SharingPolicy,
    ) -> Result<Self, DomainError> {
        let node = Self {
            id,
            name: name.into(),
            qubits: topology.num_qubits(),
            quantum_volume,
            clops,
            gate_set,
            topology,
            error,
            policy,
        };
        node.validate()?;
        Ok(node)
    }

    pub fn validate(&self) -> Result<(), DomainError> {
        if self.topology.num_qubits() != self.qubits {
            return Err(out_of_domain(format!(
                "node {}: topology spans {} qubits but the node has {}",
                self.id,
                self.topology.num_qubits(),
                self.qubits
            )));
        }
        if self.quantum_volume < 2 || !self.quantum_volume.is_power_of_two() {
            return Err(out_of_domain(format!(
                "node {}: quantum volume {} is not a power of two >= 2",
                self.id, self.quantum_volume
            )));
        }
        if !(self.clops.is_finite() && self.clops > 0.0) {
            return Err(out_of_domain(format!(
                "node {}: clops must be positive, got {}",
                self.id, self.clops
            )));
        }
        if let Some(e) = self.error {
            for (what, p) in [("readout_error", e.readout_error), ("cnot_error", e.cnot_error)] {
                if !(0.0..=1.0).contains(&p) {
                    return Err(out_of_domain(format!(
                        "node {}: {what} {p} is not a probability",
                        self.id
                    )));
                }
            }
        }
        Ok(())
    }

    /// Largest error rate, zero when the node carries none.
    pub fn max_error(&self) -> f64 {
        self.error.map_or(0.0, |e| e.max())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum QuletStatus {
    #[default]
    Created,
    Submitted,
    Queued,
    Running,
    Success,
    Failed,
    Skipped,
}

impl QuletStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Created => "Created",
            Self::Submitted => "Submitted",
            Self::Queued => "Queued",
            Self::Running => "Running",
            Self::Success => "Success",
            Self::Failed => "Failed",
            Self::Skipped => "Skipped",
        }
    }

    pub fn is_final(&self) -> bool {
        matches!(self, Self::Success | Self::Failed | Self::Skipped)
    }
}

impl std::str::FromStr for QuletStatus {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "Created" => Self::Created,
            "Submitted" => Self::Submitted,
            "Queued" => Self::Queued,
            "Running" => Self::Running,
            "Success" => Self::Success,
            "Failed" => Self::Failed,
            "Skipped" => Self::Skipped,
            other => return Err(format!("unknown status `{other}`")),
        })
    }
}

/// A quantum task.
#[derive(Debug, Clone, PartialEq)]
pub struct Qulet {
    pub id: u32,
    pub arrival: f64,
    pub width: usize,
    pub depth: u64,
    pub shots: u64,
    pub gates: GateSet,
    pub topology: QubitTopology,
    /// Expected completion time declared by the user.
    pub deadline: Option<f64>,
    pub error_tolerance: Option<f64>,
    pub status: QuletStatus,
    pub times: Option<TimeBreakdown>,
}

impl Qulet {
    pub fn new(
        id: u32,
        width: usize,
        depth: u64,
        shots: u64,
        gates: GateSet,
        topology: QubitTopology,
    ) -> Result<Self, DomainError> {
        let q = Self {
            id,
            arrival: 0.0,
            width,
            depth,
            shots,
            gates,
            topology,
            deadline: None,
            error_tolerance: None,
            status: QuletStatus::Created,
            times: None,
        };
        q.validate()?;
        Ok(q)
    }

    pub fn with_arrival(mut self, arrival: f64) -> Self {
        self.arrival = arrival;
        self
    }

    pub fn with_deadline(mut self, deadline: f64) -> Self {
        self.deadline = Some(deadline);
        self
    }

    pub fn with_error_tolerance(mut self, tolerance: f64) -> Self {
        self.error_tolerance = Some(tolerance);
        self
    }

    pub fn validate(&self) -> Result<(), DomainError> {
        if self.topology.num_qubits() > self.width {
            return Err(out_of_domain(format!(
                "qulet {}: topology spans {} qubits but width is {}",
                self.id,
                self.topology.num_qubits(),
                self.width
            )));
        }
        if !(self.arrival.is_finite() && self.arrival >= 0.0) {
            return Err(out_of_domain(format!(
                "qulet {}: arrival must be a non-negative time",
                self.id
            )));
        }
        if let Some(d) = self.deadline {
            if !(d.is_finite() && d >= 0.0) {
                return Err(out_of_domain(format!("qulet {}: invalid deadline {d}", self.id)));
            }
        }
        if let Some(p) = self.error_tolerance {
            if !(0.0..=1.0).contains(&p) {
                return Err(out_of_domain(format!(
                    "qulet {}: error tolerance {p} is not a probability",
                    self.id
                )));
            }
        }
        Ok(())
    }

    /// Circuit coupling graph over all `width` qubits.
    pub fn circuit_graph(&self) -> QubitTopology {
        self.topology.widened(self.width)
    }

    /// Layer-executions needed: depth times shots.
    pub fn work(&self) -> f64 {
        self.depth as f64 * self.shots as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Layer {
    #[default]
    Cloud,
    Edge,
}

impl Layer {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Cloud => "cloud",
            Self::Edge => "edge",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DatacenterCharacteristics {
    pub time_zone: f64,
    pub cost_per_sec: f64,
    pub cost_per_shot: f64,
    pub base_network_delay: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QDatacenter {
    pub name: String,
    pub layer: Layer,
    pub nodes: Vec<QNode>,
    pub characteristics: DatacenterCharacteristics,
}

impl QDatacenter {
    pub fn new(
        name: impl Into<String>,
        layer: Layer,
        nodes: Vec<QNode>,
        characteristics: DatacenterCharacteristics,
    ) -> Result<Self, DomainError> {
        let dc = Self {
            name: name.into(),
            layer,
            nodes,
            characteristics,
        };
        dc.validate()?;
        Ok(dc)
    }

    pub fn validate(&self) -> Result<(), DomainError> {
        let mut ids = BTreeSet::new();
        for node in &self.nodes {
            node.validate()?;
            if !ids.insert(node.id) {
                return Err(out_of_domain(format!(
                    "datacenter {}: duplicate node id {}",
                    self.name, node.id
                )));
            }
        }
        let c = &self.characteristics;
        for (what, v) in [
            ("cost_per_sec", c.cost_per_sec),
            ("cost_per_shot", c.cost_per_shot),
            ("network_delay", c.base_network_delay),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(out_of_domain(format!(
                    "datacenter {}: {what} must be non-negative, got {v}",
                    self.name
                )));
            }
        }
        Ok(())
    }
}

/// Quantum volume `2^min(depth, width)` of a square-ish model circuit.
pub fn quantum_volume(depth: u32, width: u32) -> Result<u64, DomainError> {
    if depth < 1 || width < 1 {
        return Err(out_of_domain("quantum volume needs depth and width >= 1"));
    }
    let k = depth.min(width);
    if k >= 64 {
        return Err(out_of_domain(format!("quantum volume 2^{k} overflows")));
    }
    Ok(1u64 << k)
}

/// Template, parameter-update and shot counts of the CLOPS benchmark.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClopsParams {
    pub templates: u64,
    pub updates: u64,
    pub shots: u64,
}

impl Default for ClopsParams {
    fn default() -> Self {
        Self {
            templates: 100,
            updates: 10,
            shots: 100,
        }
    }
}

/// Circuit layer operations per second measured over `time_taken` seconds.
pub fn clops(quantum_volume: u64, time_taken: f64, params: ClopsParams) -> Result<f64, DomainError> {
    if quantum_volume < 2 || !quantum_volume.is_power_of_two() {
        return Err(out_of_domain(format!(
            "quantum volume {quantum_volume} is not a power of two >= 2"
        )));
    }
    if !(time_taken.is_finite() && time_taken > 0.0) {
        return Err(out_of_domain(format!("time taken must be positive, got {time_taken}")));
    }
    let layers = quantum_volume.trailing_zeros() as u64;
    let numerator = (params.templates * params.updates * params.shots * layers) as f64;
    Ok(numerator / time_taken)
}

/// Execution time of `depth` layers repeated `shots` times at `clops`.
pub fn quantum_time(depth: f64, shots: u64, clops: f64) -> f64 {
    depth * shots as f64 / clops
}

pub fn estimate_quantum_time(qulet: &Qulet, node: &QNode) -> f64 {
    quantum_time(qulet.depth as f64, qulet.shots, node.clops)
}

/// Linear price: per second of quantum execution plus per shot.
pub fn execution_cost(qulet: &Qulet, t_q: f64, characteristics: &DatacenterCharacteristics) -> f64 {
    characteristics.cost_per_sec * t_q + characteristics.cost_per_shot * qulet.shots as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn oslo_edges() -> Vec<(usize, usize)> {
        vec![(0, 1), (1, 2), (1, 3), (3, 5), (4, 5), (5, 6)]
    }

    fn gates(names: &[&str]) -> GateSet {
        GateSet::new(names).unwrap()
    }

    fn oslo() -> QNode {
        QNode::new(
            0,
            "ibmq_oslo",
            32,
            2600.0,
            gates(&["CX", "ID", "RZ", "SX", "X"]),
            QubitTopology::new(7, &oslo_edges()).unwrap(),
            None,
            SharingPolicy::SpaceShared,
        )
        .unwrap()
    }

    #[test]
    fn quantum_volume_examples() {
        assert_eq!(quantum_volume(5, 5).unwrap(), 32);
        assert_eq!(quantum_volume(1, 1).unwrap(), 2);
        assert_eq!(quantum_volume(3, 7).unwrap(), 8);
        assert!(quantum_volume(0, 4).is_err());
        assert!(quantum_volume(4, 0).is_err());
        assert!(quantum_volume(64, 64).is_err());
        assert_eq!(quantum_volume(63, 70).unwrap(), 1 << 63);
    }

    #[test]
    fn clops_examples() {
        let p = ClopsParams::default();
        // 100 * 10 * 100 * 5 / 192.3077 by hand: 500000 / 192.3077 = 2599.99958...
        assert!((clops(32, 192.3077, p).unwrap() - 2600.0).abs() < 0.01);
        assert_eq!(clops(2, 100_000.0, p).unwrap(), 1.0);
        assert_eq!(clops(64, 600_000.0, p).unwrap(), 1.0);
        assert!(clops(48, 1.0, p).is_err());
        assert!(clops(1, 1.0, p).is_err());
        assert!(clops(32, 0.0, p).is_err());
        assert!(clops(32, -1.0, p).is_err());
    }

    #[test]
    fn quantum_time_examples() {
        let node = oslo();
        let q0 = Qulet::new(0, 5, 100, 4000, gates(&["CX"]), QubitTopology::isolated(4)).unwrap();
        let q1 = Qulet::new(1, 3, 50, 1000, gates(&["CX"]), QubitTopology::isolated(3)).unwrap();
        let q2 = Qulet::new(2, 3, 77, 0, gates(&["CX"]), QubitTopology::isolated(3)).unwrap();
        assert!((estimate_quantum_time(&q0, &node) - 153.8462).abs() < 1e-4);
        assert!((estimate_quantum_time(&q1, &node) - 19.2308).abs() < 1e-4);
        assert_eq!(estimate_quantum_time(&q2, &node), 0.0);
        assert_eq!(crate::kernel::format_log_time(estimate_quantum_time(&q0, &node)), "153.85");
        assert_eq!(crate::kernel::format_log_time(estimate_quantum_time(&q1, &node)), "19.23");
    }

    #[test]
    fn validate_topology_examples() {
        assert!(validate_topology(7, &oslo_edges()).is_empty());
        assert_eq!(
            validate_topology(3, &[(0, 3)]),
            vec![TopologyViolation::EndpointOutOfRange {
                edge: (0, 3),
                num_qubits: 3
            }]
        );
        assert_eq!(validate_topology(2, &[(1, 1)]), vec![TopologyViolation::SelfLoop(1)]);
        assert_eq!(
            validate_topology(3, &[(0, 1), (1, 0)]),
            vec![TopologyViolation::Duplicate((0, 1))]
        );
    }

    #[test]
    fn topology_is_canonical() {
        let t = QubitTopology::new(4, &[(3, 2), (1, 0)]).unwrap();
        assert_eq!(t.edges(), &[(0, 1), (2, 3)]);
        assert!(t.has_edge(1, 0));
        assert!(!t.has_edge(1, 2));
        assert_eq!(t.widened(6).num_qubits(), 6);
        assert_eq!(t.widened(2).num_qubits(), 4);
    }

    #[test]
    fn gate_names_normalised() {
        let g = GateSet::new(["cx", "CX", " rz "]).unwrap();
        assert_eq!(g.len(), 2);
        assert!(g.contains("Rz"));
        assert_eq!(GateSet::new([""]), Err(DomainError::EmptyGateName));
        let node = gates(&["CX", "ID", "RZ", "SX", "X"]);
        assert!(gates(&["cx", "rz", "x"]).is_subset(&node));
        assert_eq!(gates(&["H", "CX"]).missing_from(&node), vec!["H"]);
    }

    #[test]
    fn node_invariants() {
        let mut n = oslo();
        n.quantum_volume = 24;
        assert!(n.validate().is_err());
        let mut n = oslo();
        n.clops = 0.0;
        assert!(n.validate().is_err());
        let mut n = oslo();
        n.qubits = 8;
        assert!(n.validate().is_err());
        let mut n = oslo();
        n.error = Some(ErrorRates {
            readout_error: 1.5,
            cnot_error: 0.0,
        });
        assert!(n.validate().is_err());
    }

    #[test]
    fn qulet_allows_isolated_qubits_but_not_overflow() {
        let t = QubitTopology::new(4, &[(0, 1), (1, 2), (1, 3)]).unwrap();
        let q = Qulet::new(0, 5, 100, 4000, gates(&["CX"]), t.clone()).unwrap();
        assert_eq!(q.circuit_graph().num_qubits(), 5);
        assert!(Qulet::new(0, 3, 100, 4000, gates(&["CX"]), t).is_err());
    }

    #[test]
    fn datacenter_rejects_duplicate_nodes_and_negative_costs() {
        let c = DatacenterCharacteristics::default();
        assert!(QDatacenter::new("dc", Layer::Cloud, vec![oslo(), oslo()], c).is_err());
        let bad = DatacenterCharacteristics {
            cost_per_sec: -1.0,
            ..c
        };
        assert!(QDatacenter::new("dc", Layer::Cloud, vec![oslo()], bad).is_err());
    }

    #[test]
    fn cost_examples() {
        let q = Qulet::new(0, 1, 1, 0, GateSet::default(), QubitTopology::isolated(1)).unwrap();
        let per_sec = DatacenterCharacteristics {
            cost_per_sec: 3.0,
            ..Default::default()
        };
        assert!((execution_cost(&q, 153.85, &per_sec) - 461.55).abs() < 1e-9);
        assert_eq!(execution_cost(&q, 0.0, &per_sec), 0.0);
        let mut q = q;
        q.shots = 1000;
        let per_shot = DatacenterCharacteristics {
            cost_per_shot: 0.001,
            ..Default::default()
        };
        assert!((execution_cost(&q, 10.0, &per_shot) - 1.0).abs() < 1e-12);
    }

    /// Independent check of the topology invariants, written directly from
    /// their definition.
    fn naive_valid(n: usize, edges: &[(usize, usize)]) -> bool {
        for (i, &(a, b)) in edges.iter().enumerate() {
            if a >= n || b >= n || a == b {
                return false;
            }
            for &(c, d) in &edges[..i] {
                if (a == c && b == d) || (a == d && b == c) {
                    return false;
                }
            }
        }
        true
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn validate_matches_naive(n in 0usize..=10, raw in proptest::collection::vec((0usize..12, 0usize..12), 0..20)) {
                prop_assert_eq!(validate_topology(n, &raw).is_empty(), naive_valid(n, &raw));
            }

            #[test]
            fn quantum_volume_symmetric_and_monotone(a in 1u32..40, b in 1u32..40) {
                let v = quantum_volume(a, b).unwrap();
                prop_assert_eq!(v, quantum_volume(b, a).unwrap());
                prop_assert!(quantum_volume(a + 1, b).unwrap() >= v);
                prop_assert!(quantum_volume(a, b + 1).unwrap() >= v);
            }

            #[test]
            fn quantum_time_scales_inverse_with_clops(depth in 1u64..10_000, shots in 0u64..100_000, clops in 1.0f64..1e5, c in 0.5f64..8.0) {
                let t = quantum_time(depth as f64, shots, clops);
                let scaled = quantum_time(depth as f64, shots, clops * c);
                prop_assert!((scaled * c - t).abs() <= 1e-12 * t.max(1.0));
            }
        }
    }
}
