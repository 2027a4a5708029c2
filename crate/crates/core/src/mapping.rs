//! Qubit mapping: embedding a circuit's coupling graph into a node's qubit
//! topology as a subgraph monomorphism.
//!
//! The search is a plain backtracking matcher. Circuit vertices that carry at
//! least one edge are matched first in ascending index order, each trying node
//! qubits in ascending order, so the first mapping found is the least one in
//! that order. Isolated circuit qubits are then placed on the smallest free
//! node qubits.

use std::collections::BTreeSet;

use crate::domain::QubitTopology;

/// Injective assignment of circuit qubits to node qubits; index is the
/// circuit qubit.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct QubitMapping {
    assignment: Vec<usize>,
}

impl QubitMapping {
    pub fn new(assignment: Vec<usize>) -> Self {
        Self { assignment }
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn get(&self, circuit_qubit: usize) -> Option<usize> {
        self.assignment.get(circuit_qubit).copied()
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    /// Node qubits occupied by this mapping.
    pub fn node_qubits(&self) -> impl Iterator<Item = usize> + '_ {
        self.assignment.iter().copied()
    }
}

/// Checks the mapping invariants: every circuit qubit mapped, injective, in
/// range, and every circuit edge landing on a node edge.
pub fn is_valid_mapping(circuit: &QubitTopology, node: &QubitTopology, mapping: &QubitMapping) -> bool {
    let a = mapping.assignment();
    if a.len() != circuit.num_qubits() {
        return false;
    }
    let mut seen = BTreeSet::new();
    for &q in a {
        if q >= node.num_qubits() || !seen.insert(q) {
            return false;
        }
    }
    circuit.edges().iter().all(|&(u, v)| node.has_edge(a[u], a[v]))
}

/// True when the circuit fits the node without relabelling any qubit.
pub fn is_identity_subset(circuit: &QubitTopology, node: &QubitTopology) -> bool {
    circuit.num_qubits() <= node.num_qubits()
        && circuit.edges().iter().all(|&(a, b)| node.has_edge(a, b))
}

const UNMAPPED: usize = usize::MAX;

struct Matcher<'a> {
    circuit: &'a QubitTopology,
    node: &'a QubitTopology,
    /// Circuit vertices with at least one edge, ascending.
    order: Vec<usize>,
    blocked: &'a [bool],
    used: Vec<bool>,
    map: Vec<usize>,
}

impl<'a> Matcher<'a> {
    fn new(circuit: &'a QubitTopology, node: &'a QubitTopology, blocked: &'a [bool]) -> Self {
        let order = (0..circuit.num_qubits()).filter(|&u| circuit.degree(u) > 0).collect();
        Self {
            circuit,
            node,
            order,
            blocked,
            used: vec![false; node.num_qubits()],
            map: vec![UNMAPPED; circuit.num_qubits()],
        }
    }

    fn free_degree(&self, c: usize) -> usize {
        self.node.neighbors(c).iter().filter(|&&n| !self.blocked[n]).count()
    }

    fn fits(&self, u: usize, c: usize) -> bool {
        if self.blocked[c] || self.used[c] || self.free_degree(c) < self.circuit.degree(u) {
            return false;
        }
        self.circuit.neighbors(u).iter().all(|&w| {
            let img = self.map[w];
            img == UNMAPPED || self.node.has_edge(c, img)
        })
    }

    /// Visits every edge-respecting assignment of the non-isolated circuit
    /// vertices in search order. The visitor returns `true` to stop.
    fn each(&mut self, depth: usize, visit: &mut dyn FnMut(&[usize], &[bool]) -> bool) -> bool {
        if depth == self.order.len() {
            return visit(&self.map, &self.used);
        }
        let u = self.order[depth];
        let anchor = self
            .circuit
            .neighbors(u)
            .iter()
            .map(|&w| self.map[w])
            .find(|&img| img != UNMAPPED);
        let candidates: Vec<usize> = match anchor {
            Some(img) => self.node.neighbors(img).to_vec(),
            None => (0..self.node.num_qubits()).collect(),
        };
        for c in candidates {
            if !self.fits(u, c) {
                continue;
            }
            self.map[u] = c;
            self.used[c] = true;
            let stop = self.each(depth + 1, visit);
            self.used[c] = false;
            self.map[u] = UNMAPPED;
            if stop {
                return true;
            }
        }
        false
    }
}

fn fill_isolated(partial: &[usize], taken: &[bool]) -> Option<Vec<usize>> {
    let mut free = (0..taken.len()).filter(|&q| !taken[q]);
    partial
        .iter()
        .map(|&img| if img == UNMAPPED { free.next() } else { Some(img) })
        .collect()
}

/// Finds the least embedding of `circuit` into `node` that avoids the
/// `forbidden` node qubits, or `None` if there is none.
pub fn find_embedding(
    circuit: &QubitTopology,
    node: &QubitTopology,
    forbidden: &BTreeSet<usize>,
) -> Option<QubitMapping> {
    let mut blocked = vec![false; node.num_qubits()];
    for &f in forbidden {
        if f < blocked.len() {
            blocked[f] = true;
        }
    }
    let available = blocked.iter().filter(|b| !**b).count();
    if circuit.num_qubits() > available {
        return None;
    }
    let mut found = None;
    let mut matcher = Matcher::new(circuit, node, &blocked);
    matcher.each(0, &mut |map, used| {
        let taken: Vec<bool> = used.iter().zip(&blocked).map(|(u, b)| *u || *b).collect();
        found = fill_isolated(map, &taken);
        found.is_some()
    });
    found.map(QubitMapping::new)
}

/// Finds vertex-disjoint embeddings for all `circuits` at once. When circuit
/// `k` cannot be placed next to the choices made for circuits `0..k`, the
/// search backs up and tries the next alternative for circuit `k - 1`.
pub fn find_disjoint_embeddings(circuits: &[QubitTopology], node: &QubitTopology) -> Option<Vec<QubitMapping>> {
    let total: usize = circuits.iter().map(QubitTopology::num_qubits).sum();
    if total > node.num_qubits() {
        return None;
    }
    let isolated: usize = circuits
        .iter()
        .map(|c| (0..c.num_qubits()).filter(|&u| c.degree(u) == 0).count())
        .sum();
    let mut partials: Vec<Vec<usize>> = Vec::with_capacity(circuits.len());
    let blocked = vec![false; node.num_qubits()];
    if !pack(circuits, node, blocked, isolated, &mut partials) {
        return None;
    }
    // Edge-bearing vertices are fixed; hand out the remaining qubits in
    // circuit order.
    let mut taken = vec![false; node.num_qubits()];
    for p in &partials {
        for &img in p.iter().filter(|&&i| i != UNMAPPED) {
            taken[img] = true;
        }
    }
    let mut out = Vec::with_capacity(partials.len());
    for p in &partials {
        let full = fill_isolated(p, &taken)?;
        for &q in &full {
            taken[q] = true;
        }
        out.push(QubitMapping::new(full));
    }
    Some(out)
}

fn pack(
    circuits: &[QubitTopology],
    node: &QubitTopology,
    blocked: Vec<bool>,
    isolated: usize,
    partials: &mut Vec<Vec<usize>>,
) -> bool {
    let k = partials.len();
    if k == circuits.len() {
        return blocked.iter().filter(|b| !**b).count() >= isolated;
    }
    let mut matcher = Matcher::new(&circuits[k], node, &blocked);
    let mut solved = false;
    matcher.each(0, &mut |map, used| {
        let next: Vec<bool> = used.iter().zip(&blocked).map(|(u, b)| *u || *b).collect();
        partials.push(map.to_vec());
        if pack(circuits, node, next, isolated, partials) {
            solved = true;
            return true;
        }
        partials.pop();
        false
    });
    solved
}
