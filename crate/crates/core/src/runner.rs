//! Wires a scenario into a simulation and collects the outcome.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::broker::{QBroker, QuletResult};
use crate::datacenter::QDatacenterEntity;
use crate::domain::QuletStatus;
use crate::hybrid::{Orchestrator, TaskRecord};
use crate::kernel::{EventLog, EventTag, SimError, Simulation};
use crate::message::Payload;
use crate::scenario::Scenario;
use crate::workload::{generate_workload, GeneratorError};

pub const BROKER_NAME: &str = "QBroker";
pub const ORCHESTRATOR_NAME: &str = "Orchestrator";

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Simulation(#[from] SimError),
    #[error("workload generation failed: {0}")]
    Workload(#[from] GeneratorError),
    #[error("generated qulet id {0} collides with an existing id")]
    IdCollision(u32),
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub seed: u64,
    pub log: EventLog,
    /// One entry per qulet, ordered by id.
    pub results: Vec<QuletResult>,
    pub tasks: Vec<TaskRecord>,
    pub makespan: f64,
    /// Busy time (sum of execution times) per quantum node id, for every node.
    pub node_busy: BTreeMap<u32, f64>,
    pub final_clock: f64,
}

impl RunReport {
    pub fn success_count(&self) -> usize {
        self.results.iter().filter(|r| r.status == QuletStatus::Success).count()
    }

    pub fn failed(&self) -> impl Iterator<Item = &QuletResult> {
        self.results.iter().filter(|r| r.status == QuletStatus::Failed)
    }

    pub fn total_cost(&self) -> f64 {
        self.results.iter().fold(0.0, |acc, r| acc + r.cost)
    }

    /// Busy time over makespan, zero for an empty run.
    pub fn utilization(&self) -> BTreeMap<u32, f64> {
        self.node_busy
            .iter()
            .map(|(&id, &busy)| (id, if self.makespan > 0.0 { busy / self.makespan } else { 0.0 }))
            .collect()
    }
}

/// Runs `scenario`; `seed` overrides the scenario's seed when given.
pub fn run_scenario(scenario: &Scenario, seed: Option<u64>) -> Result<RunReport, RunError> {
    let seed = seed.unwrap_or(scenario.seed);
    let mut qulets = scenario.qulets.clone();
    if let Some(params) = &scenario.workload {
        let taken: std::collections::BTreeSet<u32> = qulets
            .iter()
            .map(|q| q.id)
            .chain(scenario.dag.iter().flat_map(|d| d.tasks.iter().map(|t| t.id())))
            .collect();
        for q in generate_workload(params, seed)? {
            if taken.contains(&q.id) {
                return Err(RunError::IdCollision(q.id));
            }
            qulets.push(q);
        }
    }

    let mut sim: Simulation<Payload> = Simulation::new();
    let broker_id = sim.next_id();
    let dc_ids: Vec<usize> = (0..scenario.datacenters.len()).map(|i| broker_id + 1 + i).collect();
    let external = scenario.dag.as_ref().map_or(0, |d| d.quantum_count());
    sim.register(Box::new(QBroker::new(
        BROKER_NAME,
        scenario.broker.clone(),
        dc_ids.clone(),
        qulets,
        external,
    )));
    for dc in &scenario.datacenters {
        sim.register(Box::new(QDatacenterEntity::new(dc.clone(), broker_id)));
    }
    let orchestrator = scenario.dag.as_ref().map(|dag| {
        sim.register(Box::new(Orchestrator::new(
            ORCHESTRATOR_NAME,
            dag.clone(),
            scenario.classical_nodes.clone(),
            broker_id,
        )))
    });

    sim.inject(broker_id, 0.0, EventTag::Start, Payload::None)?;
    if let Some(id) = orchestrator {
        sim.inject(id, 0.0, EventTag::Start, Payload::None)?;
    }
    let final_clock = sim.run()?;

    let broker = sim.entity_as::<QBroker>(broker_id).expect("broker registered");
    let results = broker.results();
    let tasks = orchestrator
        .and_then(|id| sim.entity_as::<Orchestrator>(id))
        .map(|o| o.records().to_vec())
        .unwrap_or_default();

    let mut node_busy: BTreeMap<u32, f64> = scenario.nodes().map(|n| (n.id, 0.0)).collect();
    for r in results.iter().filter(|r| r.status == QuletStatus::Success) {
        if let Some(node) = r.node_id {
            *node_busy.entry(node).or_default() += r.breakdown.t_q;
        }
    }
    let makespan = results
        .iter()
        .filter_map(|r| r.completion)
        .chain(tasks.iter().filter_map(|t| t.finish))
        .fold(0.0, f64::max);

    Ok(RunReport {
        seed,
        log: sim.take_log(),
        results,
        tasks,
        makespan,
        node_busy,
        final_clock,
    })
}
