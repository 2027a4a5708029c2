//! Scenario documents (TOML, version "1").
//!
//! Parsing happens in three stages, each with its own error class: TOML
//! syntax, document shape (missing or mistyped fields), and domain
//! invariants (topologies, ids, references).

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::broker::{BrokerConfig, PolicyKind};
use crate::domain::{
    DatacenterCharacteristics, ErrorRates, GateSet, Layer, QDatacenter, QNode, QubitTopology, Qulet, SharingPolicy,
};
use crate::hybrid::{validate_dag, ClassicalNode, Cloudlet, DagEdge, HybridDag, Task};
use crate::workload::{ArrivalModel, EdgeModel, GeneratorParams};

pub const FORMAT_VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("semantic error: {0}")]
    Semantic(String),
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Scenario {
    pub seed: u64,
    pub broker: BrokerConfig,
    pub datacenters: Vec<QDatacenter>,
    pub qulets: Vec<Qulet>,
    pub dag: Option<HybridDag>,
    pub classical_nodes: Vec<ClassicalNode>,
    /// Synthetic qulets added at run time from the scenario seed.
    pub workload: Option<GeneratorParams>,
}

impl Scenario {
    pub fn node_count(&self) -> usize {
        self.datacenters.iter().map(|d| d.nodes.len()).sum()
    }

    pub fn nodes(&self) -> impl Iterator<Item = &QNode> {
        self.datacenters.iter().flat_map(|d| d.nodes.iter())
    }

    /// Smallest id not used by any qulet or DAG task.
    pub fn next_free_id(&self) -> u32 {
        let qulets = self.qulets.iter().map(|q| q.id);
        let tasks = self.dag.iter().flat_map(|d| d.tasks.iter().map(Task::id));
        qulets.chain(tasks).max().map_or(0, |m| m + 1)
    }

    pub fn to_toml(&self) -> String {
        let doc = ScenarioDoc::from(self);
        toml::to_string(&doc).expect("scenario documents always serialize")
    }
}

pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let doc: ScenarioDoc = parse_document(text)?;
    if doc.version != FORMAT_VERSION {
        return Err(ScenarioError::Schema(format!(
            "unsupported version \"{}\" (expected \"{FORMAT_VERSION}\")",
            doc.version
        )));
    }
    doc.into_scenario()
}

/// Parses a generated qulet list (`[[qulets]]` entries only).
pub fn parse_qulet_fragment(text: &str) -> Result<Vec<Qulet>, ScenarioError> {
    let doc: FragmentDoc = parse_document(text)?;
    let qulets = doc
        .qulets
        .into_iter()
        .enumerate()
        .map(|(i, q)| q.into_qulet(&format!("qulets[{i}]")))
        .collect::<Result<Vec<_>, _>>()?;
    check_unique(qulets.iter().map(|q| q.id), "qulet")?;
    Ok(qulets)
}

pub fn qulet_fragment_to_toml(qulets: &[Qulet]) -> String {
    let doc = FragmentDoc {
        qulets: qulets.iter().map(QuletDoc::from).collect(),
    };
    toml::to_string(&doc).expect("fragments always serialize")
}

pub fn parse_generator_params(text: &str) -> Result<(GeneratorParams, Option<u64>), ScenarioError> {
    let doc: GeneratorFileDoc = parse_document(text)?;
    let params = doc.params.into_params(0)?;
    Ok((params, doc.seed.map(|s| s.0)))
}

fn parse_document<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T, ScenarioError> {
    if text.trim().is_empty() {
        return Err(ScenarioError::Syntax("empty document".into()));
    }
    if let Err(e) = text.parse::<toml::Table>() {
        return Err(ScenarioError::Syntax(describe(text, &e)));
    }
    toml::from_str(text).map_err(|e| ScenarioError::Schema(describe(text, &e)))
}

fn describe(text: &str, e: &toml::de::Error) -> String {
    let message = e.message().trim().to_string();
    match e.span() {
        Some(span) => {
            let before = &text[..span.start.min(text.len())];
            let line = before.matches('\n').count() + 1;
            let column = before.len() - before.rfind('\n').map_or(0, |p| p + 1) + 1;
            format!("line {line}, column {column}: {message}")
        }
        None => message,
    }
}

fn semantic(context: &str, msg: impl std::fmt::Display) -> ScenarioError {
    ScenarioError::Semantic(format!("{context}: {msg}"))
}

fn check_unique(ids: impl Iterator<Item = u32>, what: &str) -> Result<(), ScenarioError> {
    let mut seen = BTreeSet::new();
    for id in ids {
        if !seen.insert(id) {
            return Err(ScenarioError::Semantic(format!("duplicate {what} id {id}")));
        }
    }
    Ok(())
}

fn non_negative(context: &str, name: &str, v: f64) -> Result<(), ScenarioError> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(semantic(context, format!("{name} must be non-negative, got {v}")))
    }
}

/// TOML integers are signed, so seeds above `i64::MAX` are written as
/// decimal strings. Both forms are accepted on input.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct SeedDoc(u64);

impl Serialize for SeedDoc {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match i64::try_from(self.0) {
            Ok(v) => serializer.serialize_i64(v),
            Err(_) => serializer.serialize_str(&self.0.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for SeedDoc {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Int(i64),
            Text(String),
        }
        let invalid = |shown: &dyn std::fmt::Display| {
            serde::de::Error::custom(format!("seed must be an integer in 0..=18446744073709551615, got {shown}"))
        };
        match Repr::deserialize(deserializer)? {
            Repr::Int(v) => u64::try_from(v).map(SeedDoc).map_err(|_| invalid(&v)),
            Repr::Text(t) => t.trim().parse().map(SeedDoc).map_err(|_| invalid(&format!("\"{t}\""))),
        }
    }
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct ScenarioDoc {
    version: String,
    #[serde(default)]
    seed: SeedDoc,
    #[serde(default)]
    broker: BrokerDoc,
    #[serde(default)]
    datacenters: Vec<DatacenterDoc>,
    #[serde(default)]
    qulets: Vec<QuletDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    classical_nodes: Vec<ClassicalNodeDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dag: Option<DagDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    workload: Option<GeneratorDoc>,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct FragmentDoc {
    #[serde(default)]
    qulets: Vec<QuletDoc>,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct GeneratorFileDoc {
    #[serde(default)]
    seed: Option<SeedDoc>,
    #[serde(flatten)]
    params: GeneratorDoc,
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize, PartialEq, Eq, Default)]
#[serde(rename_all = "kebab-case")]
enum PolicyDoc {
    #[default]
    FirstFeasible,
    RoundRobin,
    MinCompletion,
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize, Default)]
#[serde(rename_all = "kebab-case")]
#[allow(clippy::enum_variant_names)]
enum SharingDoc {
    #[default]
    SpaceShared,
    TimeShared,
    SpatialShared,
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize, Default)]
#[serde(rename_all = "kebab-case")]
enum LayerDoc {
    #[default]
    Cloud,
    Edge,
}

fn default_epsilon() -> f64 {
    BrokerConfig::default().epsilon
}

fn default_multiplier() -> f64 {
    BrokerConfig::default().depth_multiplier
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct BrokerDoc {
    #[serde(default)]
    policy: PolicyDoc,
    #[serde(default = "default_epsilon")]
    epsilon: f64,
    #[serde(default)]
    compile_time: f64,
    #[serde(default)]
    soft_gate_mode: bool,
    #[serde(default = "default_multiplier")]
    depth_multiplier: f64,
    #[serde(default)]
    qv_check: bool,
}

impl Default for BrokerDoc {
    fn default() -> Self {
        BrokerDoc::from(&BrokerConfig::default())
    }
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct DatacenterDoc {
    name: String,
    #[serde(default)]
    layer: LayerDoc,
    #[serde(default)]
    time_zone: f64,
    #[serde(default)]
    cost_per_sec: f64,
    #[serde(default)]
    cost_per_shot: f64,
    #[serde(default)]
    network_delay: f64,
    #[serde(default)]
    nodes: Vec<NodeDoc>,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct NodeDoc {
    id: u32,
    name: String,
    qubits: usize,
    edges: Vec<[usize; 2]>,
    quantum_volume: u64,
    clops: f64,
    gates: Vec<String>,
    #[serde(default)]
    policy: SharingDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    readout_error: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cnot_error: Option<f64>,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct QuletDoc {
    id: u32,
    #[serde(default)]
    arrival: f64,
    width: usize,
    depth: u64,
    shots: u64,
    gates: Vec<String>,
    #[serde(default)]
    edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    deadline: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    error_tolerance: Option<f64>,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct ClassicalNodeDoc {
    id: u32,
    mips: f64,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct DagDoc {
    #[serde(default)]
    cloudlets: Vec<CloudletDoc>,
    #[serde(default)]
    qulets: Vec<QuletDoc>,
    #[serde(default)]
    edges: Vec<EdgeDoc>,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct CloudletDoc {
    id: u32,
    length: f64,
    #[serde(default)]
    arrival: f64,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct EdgeDoc {
    from: u32,
    to: u32,
    #[serde(default)]
    transfer: f64,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(tag = "model", rename_all = "kebab-case", deny_unknown_fields)]
enum EdgeModelDoc {
    Path,
    Star,
    ErdosRenyi { p: f64 },
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(tag = "model", rename_all = "kebab-case", deny_unknown_fields)]
enum ArrivalDoc {
    Batch {
        #[serde(default)]
        t0: f64,
    },
    Poisson {
        rate: f64,
    },
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct GeneratorDoc {
    count: usize,
    width: [usize; 2],
    depth: [u64; 2],
    shots: [u64; 2],
    gates: Vec<String>,
    edges: EdgeModelDoc,
    arrivals: ArrivalDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    first_id: Option<u32>,
}

impl GeneratorDoc {
    fn into_params(self, default_first_id: u32) -> Result<GeneratorParams, ScenarioError> {
        let context = "workload";
        let params = GeneratorParams {
            count: self.count,
            width_range: (self.width[0], self.width[1]),
            depth_range: (self.depth[0], self.depth[1]),
            shots_range: (self.shots[0], self.shots[1]),
            edge_model: match self.edges {
                EdgeModelDoc::Path => EdgeModel::Path,
                EdgeModelDoc::Star => EdgeModel::Star,
                EdgeModelDoc::ErdosRenyi { p } => EdgeModel::ErdosRenyi(p),
            },
            gate_pool: GateSet::new(&self.gates).map_err(|e| semantic(context, e))?,
            arrival_model: match self.arrivals {
                ArrivalDoc::Batch { t0 } => ArrivalModel::Batch(t0),
                ArrivalDoc::Poisson { rate } => ArrivalModel::Poisson(rate),
            },
            first_id: self.first_id.unwrap_or(default_first_id),
        };
        params.validate().map_err(|e| semantic(context, e))?;
        Ok(params)
    }
}

impl From<&GeneratorParams> for GeneratorDoc {
    fn from(p: &GeneratorParams) -> Self {
        Self {
            count: p.count,
            width: [p.width_range.0, p.width_range.1],
            depth: [p.depth_range.0, p.depth_range.1],
            shots: [p.shots_range.0, p.shots_range.1],
            gates: p.gate_pool.iter().map(str::to_string).collect(),
            edges: match p.edge_model {
                EdgeModel::Path => EdgeModelDoc::Path,
                EdgeModel::Star => EdgeModelDoc::Star,
                EdgeModel::ErdosRenyi(p) => EdgeModelDoc::ErdosRenyi { p },
            },
            arrivals: match p.arrival_model {
                ArrivalModel::Batch(t0) => ArrivalDoc::Batch { t0 },
                ArrivalModel::Poisson(rate) => ArrivalDoc::Poisson { rate },
            },
            first_id: Some(p.first_id),
        }
    }
}

fn edges(list: &[[usize; 2]]) -> Vec<(usize, usize)> {
    list.iter().map(|e| (e[0], e[1])).collect()
}

fn edge_list(t: &QubitTopology) -> Vec<[usize; 2]> {
    t.edges().iter().map(|&(a, b)| [a, b]).collect()
}

impl QuletDoc {
    fn into_qulet(self, context: &str) -> Result<Qulet, ScenarioError> {
        let context = format!("{context} (qulet {})", self.id);
        let topology = QubitTopology::new(self.width, &edges(&self.edges)).map_err(|e| semantic(&context, e))?;
        let gates = GateSet::new(&self.gates).map_err(|e| semantic(&context, e))?;
        let mut q = Qulet::new(self.id, self.width, self.depth, self.shots, gates, topology)
            .map_err(|e| semantic(&context, e))?
            .with_arrival(self.arrival);
        q.deadline = self.deadline;
        q.error_tolerance = self.error_tolerance;
        q.validate().map_err(|e| semantic(&context, e))?;
        Ok(q)
    }
}

impl From<&Qulet> for QuletDoc {
    fn from(q: &Qulet) -> Self {
        Self {
            id: q.id,
            arrival: q.arrival,
            width: q.width,
            depth: q.depth,
            shots: q.shots,
            gates: q.gates.iter().map(str::to_string).collect(),
            edges: edge_list(&q.topology),
            deadline: q.deadline,
            error_tolerance: q.error_tolerance,
        }
    }
}

impl From<&BrokerConfig> for BrokerDoc {
    fn from(c: &BrokerConfig) -> Self {
        Self {
            policy: match c.policy {
                PolicyKind::FirstFeasible => PolicyDoc::FirstFeasible,
                PolicyKind::RoundRobin => PolicyDoc::RoundRobin,
                PolicyKind::MinCompletion => PolicyDoc::MinCompletion,
            },
            epsilon: c.epsilon,
            compile_time: c.compile_time,
            soft_gate_mode: c.soft_gate_mode,
            depth_multiplier: c.depth_multiplier,
            qv_check: c.qv_check,
        }
    }
}

impl BrokerDoc {
    fn into_config(self) -> Result<BrokerConfig, ScenarioError> {
        non_negative("broker", "epsilon", self.epsilon)?;
        non_negative("broker", "compile_time", self.compile_time)?;
        if !(self.depth_multiplier.is_finite() && self.depth_multiplier >= 1.0) {
            return Err(semantic(
                "broker",
                format!("depth_multiplier must be >= 1, got {}", self.depth_multiplier),
            ));
        }
        Ok(BrokerConfig {
            policy: match self.policy {
                PolicyDoc::FirstFeasible => PolicyKind::FirstFeasible,
                PolicyDoc::RoundRobin => PolicyKind::RoundRobin,
                PolicyDoc::MinCompletion => PolicyKind::MinCompletion,
            },
            epsilon: self.epsilon,
            compile_time: self.compile_time,
            soft_gate_mode: self.soft_gate_mode,
            depth_multiplier: self.depth_multiplier,
            qv_check: self.qv_check,
        })
    }
}

impl NodeDoc {
    fn into_node(self, context: &str) -> Result<QNode, ScenarioError> {
        let context = format!("{context} (node {})", self.id);
        let topology = QubitTopology::new(self.qubits, &edges(&self.edges)).map_err(|e| semantic(&context, e))?;
        let gates = GateSet::new(&self.gates).map_err(|e| semantic(&context, e))?;
        let error = match (self.readout_error, self.cnot_error) {
            (None, None) => None,
            (r, c) => Some(ErrorRates {
                readout_error: r.unwrap_or(0.0),
                cnot_error: c.unwrap_or(0.0),
            }),
        };
        let policy = match self.policy {
            SharingDoc::SpaceShared => SharingPolicy::SpaceShared,
            SharingDoc::TimeShared => SharingPolicy::TimeShared,
            SharingDoc::SpatialShared => SharingPolicy::SpatialShared,
        };
        QNode::new(self.id, self.name, self.quantum_volume, self.clops, gates, topology, error, policy)
            .map_err(|e| semantic(&context, e))
    }
}

impl From<&QNode> for NodeDoc {
    fn from(n: &QNode) -> Self {
        Self {
            id: n.id,
            name: n.name.clone(),
            qubits: n.qubits,
            edges: edge_list(&n.topology),
            quantum_volume: n.quantum_volume,
            clops: n.clops,
            gates: n.gate_set.iter().map(str::to_string).collect(),
            policy: match n.policy {
                SharingPolicy::SpaceShared => SharingDoc::SpaceShared,
                SharingPolicy::TimeShared => SharingDoc::TimeShared,
                SharingPolicy::SpatialShared => SharingDoc::SpatialShared,
            },
            readout_error: n.error.map(|e| e.readout_error),
            cnot_error: n.error.map(|e| e.cnot_error),
        }
    }
}

impl DatacenterDoc {
    fn into_datacenter(self, context: &str) -> Result<QDatacenter, ScenarioError> {
        let context = format!("{context} ({})", self.name);
        let nodes = self
            .nodes
            .into_iter()
            .enumerate()
            .map(|(i, n)| n.into_node(&format!("{context}.nodes[{i}]")))
            .collect::<Result<Vec<_>, _>>()?;
        let layer = match self.layer {
            LayerDoc::Cloud => Layer::Cloud,
            LayerDoc::Edge => Layer::Edge,
        };
        let characteristics = DatacenterCharacteristics {
            time_zone: self.time_zone,
            cost_per_sec: self.cost_per_sec,
            cost_per_shot: self.cost_per_shot,
            base_network_delay: self.network_delay,
        };
        QDatacenter::new(self.name, layer, nodes, characteristics).map_err(|e| semantic(&context, e))
    }
}

impl From<&QDatacenter> for DatacenterDoc {
    fn from(d: &QDatacenter) -> Self {
        Self {
            name: d.name.clone(),
            layer: match d.layer {
                Layer::Cloud => LayerDoc::Cloud,
                Layer::Edge => LayerDoc::Edge,
            },
            time_zone: d.characteristics.time_zone,
            cost_per_sec: d.characteristics.cost_per_sec,
            cost_per_shot: d.characteristics.cost_per_shot,
            network_delay: d.characteristics.base_network_delay,
            nodes: d.nodes.iter().map(NodeDoc::from).collect(),
        }
    }
}

impl ScenarioDoc {
    fn into_scenario(self) -> Result<Scenario, ScenarioError> {
        let broker = self.broker.into_config()?;
        let datacenters = self
            .datacenters
            .into_iter()
            .enumerate()
            .map(|(i, d)| d.into_datacenter(&format!("datacenters[{i}]")))
            .collect::<Result<Vec<_>, _>>()?;
        check_unique(datacenters.iter().flat_map(|d| d.nodes.iter().map(|n| n.id)), "node")?;
        let mut names = BTreeSet::new();
        for d in &datacenters {
            if !names.insert(d.name.as_str()) {
                return Err(ScenarioError::Semantic(format!("duplicate datacenter name {}", d.name)));
            }
        }
        let qulets = self
            .qulets
            .into_iter()
            .enumerate()
            .map(|(i, q)| q.into_qulet(&format!("qulets[{i}]")))
            .collect::<Result<Vec<_>, _>>()?;

        let classical_nodes = self
            .classical_nodes
            .into_iter()
            .enumerate()
            .map(|(i, n)| {
                if n.mips.is_finite() && n.mips > 0.0 {
                    Ok(ClassicalNode::new(n.id, n.mips))
                } else {
                    Err(semantic(&format!("classical_nodes[{i}] (node {})", n.id), format!("mips must be positive, got {}", n.mips)))
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        check_unique(classical_nodes.iter().map(|n| n.id), "classical node")?;

        let dag = match self.dag {
            None => None,
            Some(doc) => {
                let mut tasks: Vec<Task> = doc
                    .cloudlets
                    .into_iter()
                    .map(|c| Task::Classical(Cloudlet::new(c.id, c.length).with_arrival(c.arrival)))
                    .collect();
                for (i, q) in doc.qulets.into_iter().enumerate() {
                    tasks.push(Task::Quantum(q.into_qulet(&format!("dag.qulets[{i}]"))?));
                }
                let edges = doc
                    .edges
                    .into_iter()
                    .map(|e| DagEdge::new(e.from, e.to).with_transfer(e.transfer))
                    .collect();
                let dag = HybridDag::new(tasks, edges);
                validate_dag(&dag).map_err(|e| semantic("dag", e))?;
                let has_classical = dag.tasks.iter().any(|t| matches!(t, Task::Classical(_)));
                if has_classical && classical_nodes.is_empty() {
                    return Err(semantic("dag", "classical tasks need at least one classical node"));
                }
                Some(dag)
            }
        };
        let dag_ids = dag.iter().flat_map(|d| d.tasks.iter().map(Task::id));
        check_unique(qulets.iter().map(|q| q.id).chain(dag_ids), "qulet/task")?;

        let mut scenario = Scenario {
            seed: self.seed.0,
            broker,
            datacenters,
            qulets,
            dag,
            classical_nodes,
            workload: None,
        };
        if let Some(w) = self.workload {
            scenario.workload = Some(w.into_params(scenario.next_free_id())?);
        }
        Ok(scenario)
    }
}

impl From<&Scenario> for ScenarioDoc {
    fn from(s: &Scenario) -> Self {
        let dag = s.dag.as_ref().map(|d| {
            let mut cloudlets = Vec::new();
            let mut qulets = Vec::new();
            for t in &d.tasks {
                match t {
                    Task::Classical(c) => cloudlets.push(CloudletDoc {
                        id: c.id,
                        length: c.length,
                        arrival: c.arrival,
                    }),
                    Task::Quantum(q) => qulets.push(QuletDoc::from(q)),
                }
            }
            DagDoc {
                cloudlets,
                qulets,
                edges: d
                    .edges
                    .iter()
                    .map(|e| EdgeDoc {
                        from: e.from,
                        to: e.to,
                        transfer: e.transfer,
                    })
                    .collect(),
            }
        });
        Self {
            version: FORMAT_VERSION.to_string(),
            seed: SeedDoc(s.seed),
            broker: BrokerDoc::from(&s.broker),
            datacenters: s.datacenters.iter().map(DatacenterDoc::from).collect(),
            qulets: s.qulets.iter().map(QuletDoc::from).collect(),
            classical_nodes: s
                .classical_nodes
                .iter()
                .map(|n| ClassicalNodeDoc { id: n.id, mips: n.mips })
                .collect(),
            dag,
            workload: s.workload.as_ref().map(GeneratorDoc::from),
        }
    }
}
