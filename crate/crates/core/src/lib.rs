//! Discrete-event simulation of quantum cloud and edge environments.
//!
//! A [`broker::QBroker`] places qulets (quantum tasks) on the nodes of one or
//! more quantum datacenters, subject to qubit count, gate set, connectivity
//! and QoS constraints. Nodes run qulets under space-, time- or
//! spatial-sharing policies. Hybrid applications are task DAGs mixing
//! classical cloudlets and qulets.
//!
//! ```
//! use qcloudsim::{parse_scenario, run_scenario};
//!
//! let scenario = parse_scenario(include_str!("../scenarios/sample.toml")).unwrap();
//! let report = run_scenario(&scenario, None).unwrap();
//! assert_eq!(report.success_count(), 2);
//! assert!((report.makespan - 173.0869).abs() < 1e-4);
//! ```

pub mod broker;
pub mod datacenter;
pub mod domain;
pub mod hybrid;
pub mod kernel;
pub mod mapping;
pub mod message;
pub mod node;
pub mod results;
pub mod runner;
pub mod scenario;
pub mod workload;

pub use broker::{
    check_feasibility, compute_breakdown, select_node, BrokerConfig, FeasibilityReport, NodeView, PlacementDecision,
    PlacementError, PlacementPolicy, PolicyKind, QuletResult, TimeBreakdown,
};
pub use domain::{
    clops, estimate_quantum_time, quantum_volume, ClopsParams, DatacenterCharacteristics, DomainError, GateSet,
    Layer, QDatacenter, QNode, QubitTopology, Qulet, QuletStatus, SharingPolicy,
};
pub use hybrid::{validate_dag, ClassicalNode, Cloudlet, DagEdge, DagError, HybridDag, Task, TaskId};
pub use kernel::{EventLog, LogLevel, SimError, Simulation};
pub use mapping::{find_disjoint_embeddings, find_embedding, is_valid_mapping, QubitMapping};
pub use node::{NodeJob, NodeScheduler};
pub use results::{parse_results, results_to_string, write_results, RESULTS_HEADER};
pub use runner::{run_scenario, RunError, RunReport};
pub use scenario::{parse_scenario, Scenario, ScenarioError};
pub use workload::{generate_workload, ArrivalModel, EdgeModel, GeneratorParams};
