//! Multicast routing over the logical layer and the mapping of logical usage
//! down to transport load.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};
use std::fmt;
use std::ops::AddAssign;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mlg::{EdgeId, LayerId, LayerView, MultiLayerGraph, VertexId};
use crate::scalar::{Ordered, Scalar};
use crate::synthesis::Demand;

/// The route of one demand: a logical tree plus, for each tree edge, the index
/// of the candidate transport path that realizes it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MulticastRoute {
    pub demand_id: String,
    pub logical_tree: BTreeSet<EdgeId>,
    pub path_choice: BTreeMap<EdgeId, usize>,
}

/// Bandwidth consumed per transport link, per logical edge, and switched per LSR.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoadMap {
    pub transport: BTreeMap<EdgeId, u64>,
    pub logical: BTreeMap<EdgeId, u64>,
    pub lsr: BTreeMap<VertexId, u64>,
}

impl LoadMap {
    pub fn is_empty(&self) -> bool {
        self.transport.values().chain(self.logical.values()).chain(self.lsr.values()).all(|&x| x == 0)
    }

    pub fn total_transport(&self) -> u64 {
        self.transport.values().sum()
    }
}

impl AddAssign<&LoadMap> for LoadMap {
    fn add_assign(&mut self, rhs: &LoadMap) {
        for (k, v) in &rhs.transport {
            *self.transport.entry(*k).or_default() += v;
        }
        for (k, v) in &rhs.logical {
            *self.logical.entry(*k).or_default() += v;
        }
        for (k, v) in &rhs.lsr {
            *self.lsr.entry(*k).or_default() += v;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RoutingError {
    #[error("no terminals given")]
    NoTerminals,
    #[error("terminal {0} is not in the routing graph")]
    TerminalNotInView(VertexId),
    #[error("terminal {0} cannot be connected to the tree")]
    Unreachable(VertexId),
    #[error("edge {0} is not a logical edge")]
    NotLogical(EdgeId),
    #[error("edge {edge} has no candidate path {index}")]
    InvalidPathIndex { edge: EdgeId, index: usize },
    #[error("edge {0} has no path choice")]
    MissingPathChoice(EdgeId),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SteinerTree<C> {
    pub edges: BTreeSet<EdgeId>,
    /// Sum of edge lengths plus vertex costs of every tree vertex.
    pub cost: C,
}

/// Edge-weighted Steiner tree by the Takahashi–Matsuyama heuristic, grown from
/// the smallest terminal id. Edges whose length is `None` are unusable.
pub fn steiner_tree<C: Scalar>(
    view: &LayerView,
    terminals: &[VertexId],
    edge_length: impl Fn(EdgeId) -> Option<C>,
) -> Result<SteinerTree<C>, RoutingError> {
    takahashi_matsuyama(view, terminals, None, edge_length, |_| C::zero())
}

/// Takahashi–Matsuyama with optional vertex costs: starting from `root` (or
/// the smallest terminal id), repeatedly attach the terminal nearest to the
/// current tree by a shortest path. Entering a vertex not yet in the tree
/// costs `vertex_cost`. Ties go to the smaller vertex id.
pub fn takahashi_matsuyama<C: Scalar>(
    view: &LayerView,
    terminals: &[VertexId],
    root: Option<VertexId>,
    edge_length: impl Fn(EdgeId) -> Option<C>,
    vertex_cost: impl Fn(VertexId) -> C,
) -> Result<SteinerTree<C>, RoutingError> {
    let mut terms: Vec<VertexId> = terminals.to_vec();
    terms.sort();
    terms.dedup();
    let &first = terms.first().ok_or(RoutingError::NoTerminals)?;
    for &t in &terms {
        if !view.contains(t) {
            return Err(RoutingError::TerminalNotInView(t));
        }
    }
    let root = root.unwrap_or(first);
    let root_pos = view.position(root).ok_or(RoutingError::TerminalNotInView(root))?;

    let n = view.vertices().len();
    let mut in_tree = vec![false; n];
    in_tree[root_pos] = true;
    let mut cost = vertex_cost(root);
    let mut edges = BTreeSet::new();
    let mut remaining: BTreeSet<VertexId> = terms.iter().copied().filter(|&t| t != root).collect();

    while !remaining.is_empty() {
        let mut dist: Vec<Option<C>> = vec![None; n];
        let mut pred: Vec<Option<(usize, EdgeId)>> = vec![None; n];
        let mut done = vec![false; n];
        let mut heap = BinaryHeap::new();
        for i in (0..n).filter(|&i| in_tree[i]) {
            dist[i] = Some(C::zero());
            heap.push(Reverse((Ordered(C::zero()), view.vertex_at(i), i)));
        }
        let mut reached = None;
        while let Some(Reverse((Ordered(d), v, i))) = heap.pop() {
            if done[i] {
                continue;
            }
            done[i] = true;
            if remaining.contains(&v) {
                reached = Some((i, d));
                break;
            }
            for &(j, e) in view.adjacent(i) {
                if done[j] {
                    continue;
                }
                let Some(len) = edge_length(e) else { continue };
                let nd = d + len + if in_tree[j] { C::zero() } else { vertex_cost(view.vertex_at(j)) };
                if dist[j].is_none_or(|cur| nd < cur) {
                    dist[j] = Some(nd);
                    pred[j] = Some((i, e));
                    heap.push(Reverse((Ordered(nd), view.vertex_at(j), j)));
                }
            }
        }
        let Some((target, d)) = reached else {
            return Err(RoutingError::Unreachable(*remaining.iter().next().unwrap()));
        };
        cost = cost + d;
        let mut cur = target;
        while let Some((prev, e)) = pred[cur] {
            in_tree[cur] = true;
            edges.insert(e);
            remaining.remove(&view.vertex_at(cur));
            cur = prev;
        }
    }
    Ok(SteinerTree { edges, cost })
}

/// Load added by routing `demand` along `route`: the demand bandwidth on every
/// transport link of every chosen path, on every tree edge, and
/// `degree * bandwidth` switched at every LSR the tree touches.
pub fn map_down<C: Scalar>(
    route: &MulticastRoute,
    mlg: &MultiLayerGraph<C>,
    demand: &Demand,
) -> Result<LoadMap, RoutingError> {
    let bw = demand.bandwidth;
    let mut load = LoadMap::default();
    for &e in &route.logical_tree {
        let edge = mlg.edge(e).map_err(|_| RoutingError::NotLogical(e))?;
        if !edge.is_intra(LayerId::LOGICAL) {
            return Err(RoutingError::NotLogical(e));
        }
        let &index = route.path_choice.get(&e).ok_or(RoutingError::MissingPathChoice(e))?;
        let path = edge.candidate_paths.get(index).ok_or(RoutingError::InvalidPathIndex { edge: e, index })?;
        for &t in &path.edges {
            *load.transport.entry(t).or_default() += bw;
        }
        *load.logical.entry(e).or_default() += bw;
        *load.lsr.entry(edge.endpoints.0).or_default() += bw;
        *load.lsr.entry(edge.endpoints.1).or_default() += bw;
    }
    Ok(load)
}

/// Smallest module counts carrying `load`: `ceil(load / module_size)` per
/// loaded transport link. Not clamped to the module maximum.
pub fn minimal_dimensioning<C: Scalar>(load: &LoadMap, mlg: &MultiLayerGraph<C>) -> BTreeMap<EdgeId, u64> {
    load.transport
        .iter()
        .filter(|&(_, &l)| l > 0)
        .filter_map(|(&e, &l)| {
            let size = mlg.edge(e).ok()?.modules?.size;
            Some((e, l.div_ceil(size)))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CapacityViolation {
    LinkOverload { edge: EdgeId, load: u64, capacity: u64 },
    ModulesExceeded { edge: EdgeId, modules: u64, max: u64 },
    ThroughputExceeded { vertex: VertexId, throughput: u64, limit: u64 },
    NotATransportLink { edge: EdgeId },
}

impl fmt::Display for CapacityViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::LinkOverload { edge, load, capacity } => write!(f, "link {edge}: load {load} > capacity {capacity}"),
            Self::ModulesExceeded { edge, modules, max } => write!(f, "link {edge}: {modules} modules > max {max}"),
            Self::ThroughputExceeded { vertex, throughput, limit } => {
                write!(f, "LSR {vertex}: throughput {throughput} > limit {limit}")
            }
            Self::NotATransportLink { edge } => write!(f, "edge {edge} is not a transport link"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CapacityReport {
    pub violations: Vec<CapacityViolation>,
}

impl CapacityReport {
    pub fn is_feasible(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Lists every overloaded link, every link dimensioned past its module
/// maximum, and every LSR switching more than its throughput limit.
pub fn check_capacity<C: Scalar>(
    load: &LoadMap,
    mlg: &MultiLayerGraph<C>,
    dimensioning: &BTreeMap<EdgeId, u64>,
) -> CapacityReport {
    let mut violations = Vec::new();
    let modules_of = |e: EdgeId| mlg.edge(e).ok().and_then(|edge| edge.modules);
    for (&edge, &l) in load.transport.iter().filter(|(_, &l)| l > 0) {
        match modules_of(edge) {
            None => violations.push(CapacityViolation::NotATransportLink { edge }),
            Some(spec) => {
                let capacity = dimensioning.get(&edge).copied().unwrap_or(0).saturating_mul(spec.size);
                if l > capacity {
                    violations.push(CapacityViolation::LinkOverload { edge, load: l, capacity });
                }
            }
        }
    }
    for (&edge, &modules) in dimensioning {
        match modules_of(edge) {
            None => violations.push(CapacityViolation::NotATransportLink { edge }),
            Some(spec) if modules > spec.max => {
                violations.push(CapacityViolation::ModulesExceeded { edge, modules, max: spec.max })
            }
            Some(_) => {}
        }
    }
    for (&vertex, &throughput) in &load.lsr {
        if let Some(limit) = mlg.vertex(vertex).ok().and_then(|v| v.throughput_limit) {
            if throughput > limit {
                violations.push(CapacityViolation::ThroughputExceeded { vertex, throughput, limit });
            }
        }
    }
    violations.sort();
    violations.dedup();
    CapacityReport { violations }
}
