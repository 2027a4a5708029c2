//! Seeded synthetic qulet workloads.
//!
//! Every qulet draws from its own ChaCha8 stream: the generator is seeded with
//! the workload seed and switched to stream `i` for the qulet at index `i`, so
//! a qulet's attributes do not depend on how many others were generated.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use thiserror::Error;

use crate::domain::{GateSet, QubitTopology, Qulet};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EdgeModel {
    Path,
    Star,
    ErdosRenyi(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ArrivalModel {
    Batch(f64),
    Poisson(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorParams {
    pub count: usize,
    pub width_range: (usize, usize),
    pub depth_range: (u64, u64),
    pub shots_range: (u64, u64),
    pub edge_model: EdgeModel,
    pub gate_pool: GateSet,
    pub arrival_model: ArrivalModel,
    /// Id of the first generated qulet; the rest follow consecutively.
    pub first_id: u32,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeneratorError {
    #[error("{name} range [{lo}, {hi}] is empty")]
    EmptyRange { name: &'static str, lo: u64, hi: u64 },
    #[error("widths must be at least 1")]
    ZeroWidth,
    #[error("edge probability {0} is outside [0, 1]")]
    Probability(f64),
    #[error("poisson rate must be positive, got {0}")]
    Rate(f64),
    #[error("batch arrival time must be a non-negative time, got {0}")]
    BatchTime(f64),
    #[error("gate pool is empty")]
    EmptyGatePool,
    #[error("qulet ids overflow")]
    IdOverflow,
}

impl GeneratorParams {
    pub fn validate(&self) -> Result<(), GeneratorError> {
        let ranges = [
            ("width", self.width_range.0 as u64, self.width_range.1 as u64),
            ("depth", self.depth_range.0, self.depth_range.1),
            ("shots", self.shots_range.0, self.shots_range.1),
        ];
        for (name, lo, hi) in ranges {
            if lo > hi {
                return Err(GeneratorError::EmptyRange { name, lo, hi });
            }
        }
        if self.width_range.0 == 0 {
            return Err(GeneratorError::ZeroWidth);
        }
        if let EdgeModel::ErdosRenyi(p) = self.edge_model {
            if !(0.0..=1.0).contains(&p) {
                return Err(GeneratorError::Probability(p));
            }
        }
        match self.arrival_model {
            ArrivalModel::Poisson(rate) if !(rate.is_finite() && rate > 0.0) => return Err(GeneratorError::Rate(rate)),
            ArrivalModel::Batch(t) if !(t.is_finite() && t >= 0.0) => return Err(GeneratorError::BatchTime(t)),
            _ => {}
        }
        if self.gate_pool.is_empty() {
            return Err(GeneratorError::EmptyGatePool);
        }
        if self.count > 0 && self.first_id.checked_add((self.count - 1) as u32).is_none() {
            return Err(GeneratorError::IdOverflow);
        }
        Ok(())
    }
}

/// Coupling graph of `width` qubits under `model`.
pub fn generate_topology<R: Rng>(model: EdgeModel, width: usize, rng: &mut R) -> QubitTopology {
    match model {
        EdgeModel::Path => QubitTopology::path(width),
        EdgeModel::Star => QubitTopology::star(width),
        EdgeModel::ErdosRenyi(p) => {
            let mut edges = Vec::new();
            for a in 0..width {
                for b in a + 1..width {
                    if rng.random_bool(p) {
                        edges.push((a, b));
                    }
                }
            }
            QubitTopology::new(width, &edges).expect("generated edges are in range and distinct")
        }
    }
}

fn draw_gates<R: Rng>(pool: &GateSet, rng: &mut R) -> GateSet {
    let names: Vec<&str> = pool.iter().collect();
    let mut chosen: Vec<&str> = names.iter().copied().filter(|_| rng.random_bool(0.5)).collect();
    if chosen.is_empty() {
        chosen.push(names[rng.random_range(0..names.len())]);
    }
    GateSet::new(chosen).expect("pool gates are valid names")
}

pub fn generate_workload(params: &GeneratorParams, seed: u64) -> Result<Vec<Qulet>, GeneratorError> {
    params.validate()?;
    let mut qulets = Vec::with_capacity(params.count);
    let mut clock = 0.0;
    for i in 0..params.count {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        let width = rng.random_range(params.width_range.0..=params.width_range.1);
        let depth = rng.random_range(params.depth_range.0..=params.depth_range.1);
        let shots = rng.random_range(params.shots_range.0..=params.shots_range.1);
        let topology = generate_topology(params.edge_model, width, &mut rng);
        let gates = draw_gates(&params.gate_pool, &mut rng);
        let arrival = match params.arrival_model {
            ArrivalModel::Batch(t0) => t0,
            ArrivalModel::Poisson(rate) => {
                let gap = Exp::new(rate).expect("rate validated").sample(&mut rng);
                clock += gap;
                clock
            }
        };
        let id = params.first_id + i as u32;
        let q = Qulet::new(id, width, depth, shots, gates, topology)
            .expect("generated qulets satisfy their invariants")
            .with_arrival(arrival);
        qulets.push(q);
    }
    Ok(qulets)
}
