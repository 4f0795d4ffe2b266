use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::optimizer::SolverConfig;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransportNode<C> {
    pub id: String,
    #[serde(default)]
    pub lsr_candidate: bool,
    pub lsr_install_cost: C,
    /// Switching capacity of an LSR installed here; absent means unbounded.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub throughput_limit: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransportLink<C> {
    pub a: String,
    pub b: String,
    pub fixed_cost: C,
    pub module_size: u64,
    pub module_cost: C,
    pub max_modules: u64,
}

/// A multicast flow from `source` to every node in `sinks`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Demand {
    pub id: String,
    pub source: String,
    pub sinks: Vec<String>,
    pub bandwidth: u64,
}

impl Demand {
    /// Source followed by the sinks.
    pub fn endpoints(&self) -> impl Iterator<Item = &str> {
        std::iter::once(self.source.as_str()).chain(self.sinks.iter().map(String::as_str))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case", deny_unknown_fields)]
pub enum LogicalEdgeRule {
    FullMesh,
    /// Only LSR pairs at most `hop_bound` transport hops apart.
    DistanceLimited { hop_bound: u32 },
}

/// Bounds the redundancy of the synthesized logical layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CandidatePolicy {
    pub k_paths: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_logical_degree: Option<u32>,
    #[serde(default = "full_mesh")]
    pub logical_edges: LogicalEdgeRule,
}

fn full_mesh() -> LogicalEdgeRule {
    LogicalEdgeRule::FullMesh
}

impl Default for CandidatePolicy {
    fn default() -> Self {
        CandidatePolicy { k_paths: 2, max_logical_degree: None, logical_edges: LogicalEdgeRule::FullMesh }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance<C> {
    pub name: String,
    pub transport_nodes: Vec<TransportNode<C>>,
    pub transport_links: Vec<TransportLink<C>>,
    pub demands: Vec<Demand>,
    pub policy: CandidatePolicy,
    /// Solver defaults carried by the instance file.
    pub solver: SolverConfig,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("{field}: {message}")]
    Field { field: String, message: String },
    #[error("transport network is disconnected: node {unreachable:?} is unreachable from {from:?}")]
    Disconnected { from: String, unreachable: String },
    #[error("no LSR candidate node")]
    NoLsrCandidate,
}

fn field_err(field: impl Into<String>, message: impl Into<String>) -> InstanceError {
    InstanceError::Field { field: field.into(), message: message.into() }
}

impl<C: Scalar> Instance<C> {
    pub fn node(&self, id: &str) -> Option<&TransportNode<C>> {
        self.transport_nodes.iter().find(|n| n.id == id)
    }

    pub fn lsr_candidates(&self) -> impl Iterator<Item = &TransportNode<C>> {
        self.transport_nodes.iter().filter(|n| n.lsr_candidate)
    }

    /// Checks every instance invariant; returns the first failure.
    pub fn validate(&self) -> Result<(), InstanceError> {
        let mut ids = HashMap::new();
        for (i, n) in self.transport_nodes.iter().enumerate() {
            let f = format!("nodes[{i}] ({})", n.id);
            if n.id.is_empty() {
                return Err(field_err(f, "empty id"));
            }
            if ids.insert(n.id.as_str(), n).is_some() {
                return Err(field_err(f, "duplicate node id"));
            }
            if n.lsr_install_cost.is_negative() {
                return Err(field_err(f, "negative lsr_install_cost"));
            }
        }
        let mut pairs = HashSet::new();
        for (i, l) in self.transport_links.iter().enumerate() {
            let f = format!("links[{i}] ({}-{})", l.a, l.b);
            for end in [&l.a, &l.b] {
                if !ids.contains_key(end.as_str()) {
                    return Err(field_err(f, format!("unknown node {end:?}")));
                }
            }
            if l.a == l.b {
                return Err(field_err(f, "self-loop"));
            }
            let key = if l.a < l.b { (&l.a, &l.b) } else { (&l.b, &l.a) };
            if !pairs.insert(key) {
                return Err(field_err(f, "parallel link"));
            }
            if l.module_size == 0 {
                return Err(field_err(f, "module_size must be positive"));
            }
            if l.fixed_cost.is_negative() || l.module_cost.is_negative() {
                return Err(field_err(f, "negative cost"));
            }
        }
        if self.policy.k_paths == 0 {
            return Err(field_err("policy.k_paths", "must be at least 1"));
        }
        if self.lsr_candidates().next().is_none() {
            return Err(InstanceError::NoLsrCandidate);
        }
        self.check_connected()?;

        let mut demand_ids = HashSet::new();
        for (i, d) in self.demands.iter().enumerate() {
            let f = format!("demands[{i}] ({})", d.id);
            if !demand_ids.insert(d.id.as_str()) {
                return Err(field_err(f, "duplicate demand id"));
            }
            if d.bandwidth == 0 {
                return Err(field_err(f, "bandwidth must be positive"));
            }
            if d.sinks.is_empty() {
                return Err(field_err(f, "no sinks"));
            }
            if d.sinks.contains(&d.source) {
                return Err(field_err(f, format!("source {:?} is also a sink", d.source)));
            }
            let distinct: BTreeSet<&String> = d.sinks.iter().collect();
            if distinct.len() != d.sinks.len() {
                return Err(field_err(f, "repeated sink"));
            }
            for end in d.endpoints() {
                match ids.get(end) {
                    None => return Err(field_err(f, format!("unknown node {end:?}"))),
                    Some(n) if !n.lsr_candidate => {
                        return Err(field_err(f, format!("endpoint {end:?} is not an LSR candidate")))
                    }
                    Some(_) => {}
                }
            }
        }
        Ok(())
    }

    fn check_connected(&self) -> Result<(), InstanceError> {
        let Some(first) = self.transport_nodes.first() else {
            return Ok(());
        };
        let mut adj: HashMap<&str, Vec<&str>> = HashMap::new();
        for l in &self.transport_links {
            adj.entry(&l.a).or_default().push(&l.b);
            adj.entry(&l.b).or_default().push(&l.a);
        }
        let mut seen = HashSet::from([first.id.as_str()]);
        let mut queue = VecDeque::from([first.id.as_str()]);
        while let Some(v) = queue.pop_front() {
            for &w in adj.get(v).into_iter().flatten() {
                if seen.insert(w) {
                    queue.push_back(w);
                }
            }
        }
        match self.transport_nodes.iter().find(|n| !seen.contains(n.id.as_str())) {
            Some(n) => Err(InstanceError::Disconnected { from: first.id.clone(), unreachable: n.id.clone() }),
            None => Ok(()),
        }
    }

    /// Applies `f` to every money field.
    pub fn map_costs<D: Scalar>(&self, f: impl Fn(C) -> D) -> Instance<D> {
        Instance {
            name: self.name.clone(),
            transport_nodes: self
                .transport_nodes
                .iter()
                .map(|n| TransportNode {
                    id: n.id.clone(),
                    lsr_candidate: n.lsr_candidate,
                    lsr_install_cost: f(n.lsr_install_cost),
                    throughput_limit: n.throughput_limit,
                })
                .collect(),
            transport_links: self
                .transport_links
                .iter()
                .map(|l| TransportLink {
                    a: l.a.clone(),
                    b: l.b.clone(),
                    fixed_cost: f(l.fixed_cost),
                    module_size: l.module_size,
                    module_cost: f(l.module_cost),
                    max_modules: l.max_modules,
                })
                .collect(),
            demands: self.demands.clone(),
            policy: self.policy,
            solver: self.solver.clone(),
        }
    }
}
