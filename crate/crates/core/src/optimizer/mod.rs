//! Search for the minimum-cost design over a synthesized multilayer graph.
//!
//! Three modes share one cost model: [`greedy_construct`] routes demands one
//! by one on marginal costs, [`local_search`] improves a feasible design with
//! three neighbourhood moves, and [`exact_bruteforce`] enumerates the whole
//! candidate space of small instances.

mod exact;
mod local_search;
mod problem;

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use exact::{exact_bruteforce, ExactLimits, SizeReport};
pub use local_search::local_search;

use crate::mlg::{
    descend, total_weight, validate_selection, EdgeId, LayerId, MultiLayerGraph, Selection, ValidationReport,
};
use crate::routing::{check_capacity, map_down, CapacityReport, LoadMap, MulticastRoute, RoutingError};
use crate::scalar::Scalar;
use crate::synthesis::Instance;
use problem::Problem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub enum SolverMode {
    #[serde(rename = "greedy")]
    Greedy,
    #[default]
    #[serde(rename = "ls")]
    GreedyPlusLocalSearch,
    #[serde(rename = "exact")]
    ExactBruteForce,
}

impl SolverMode {
    pub fn name(self) -> &'static str {
        match self {
            SolverMode::Greedy => "greedy",
            SolverMode::GreedyPlusLocalSearch => "ls",
            SolverMode::ExactBruteForce => "exact",
        }
    }
}

impl fmt::Display for SolverMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(default)]
    pub mode: SolverMode,
    #[serde(default = "default_budget")]
    pub local_search_budget: u64,
    #[serde(default)]
    pub rng_seed: u64,
    /// Wall-clock limit in seconds. Results depend on timing when set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_limit: Option<f64>,
}

fn default_budget() -> u64 {
    1000
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            mode: SolverMode::default(),
            local_search_budget: default_budget(),
            rng_seed: 0,
            time_limit: None,
        }
    }
}

/// A selected subgraph with one route per demand and module counts per used
/// transport link.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Design<C> {
    pub selection: Selection,
    pub routes: Vec<MulticastRoute>,
    pub dimensioning: BTreeMap<EdgeId, u64>,
    pub cost: C,
}

impl<C: Scalar> Design<C> {
    pub fn empty() -> Self {
        Design { selection: Selection::default(), routes: Vec::new(), dimensioning: BTreeMap::new(), cost: C::zero() }
    }

    /// Path choice of every logical edge used by any route.
    pub fn path_choices(&self) -> BTreeMap<EdgeId, usize> {
        self.routes.iter().flat_map(|r| r.path_choice.iter().map(|(&e, &p)| (e, p))).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum InfeasibilityCertificate {
    /// No transport path between the two nodes has capacity for the demand.
    BottleneckCut { demand: String, from: String, to: String, widest: u64, bandwidth: u64 },
    /// A demand endpoint cannot switch even one copy of the demand.
    ThroughputTooLow { demand: String, node: String, limit: u64, bandwidth: u64 },
    /// The solver could not route this demand on top of the ones before it.
    DemandUnroutable { demand: String },
    /// Exhaustive search found no capacity-feasible combination.
    NoFeasibleCombination { demands: Vec<String> },
}

impl fmt::Display for InfeasibilityCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::BottleneckCut { demand, from, to, widest, bandwidth } => write!(
                f,
                "demand {demand}: widest transport path {from}->{to} carries {widest} < bandwidth {bandwidth}"
            ),
            Self::ThroughputTooLow { demand, node, limit, bandwidth } => {
                write!(f, "demand {demand}: LSR {node} throughput limit {limit} < bandwidth {bandwidth}")
            }
            Self::DemandUnroutable { demand } => write!(f, "demand {demand} could not be routed"),
            Self::NoFeasibleCombination { demands } => {
                write!(f, "no capacity-feasible routing exists for demands {}", demands.join(", "))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("infeasible: {0}")]
    Infeasible(InfeasibilityCertificate),
    #[error("instance exceeds exact-search limits: {0}")]
    LimitsExceeded(SizeReport),
    #[error("graph does not match instance: {0}")]
    Model(String),
    #[error(transparent)]
    Design(#[from] DesignError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DesignError {
    #[error("selection is invalid:\n{0}")]
    InvalidSelection(ValidationReport),
    #[error("dimensioned edge {0} is not a transport link")]
    NotATransportLink(EdgeId),
    #[error("dimensioned link {0} is not selected")]
    UnselectedLink(EdgeId),
    #[error("expected {expected} routes, found {found}")]
    RouteCount { expected: usize, found: usize },
    #[error("no route for demand {0}")]
    MissingRoute(String),
    #[error("edge {0} is not a logical edge")]
    NotLogical(EdgeId),
    #[error("edge {0} has no path choice")]
    MissingPathChoice(EdgeId),
    #[error("edge {edge} has no candidate path {index}")]
    InvalidPathIndex { edge: EdgeId, index: usize },
    #[error("edge {0} uses different paths in different routes")]
    InconsistentPathChoice(EdgeId),
    #[error("route of demand {demand} is not a tree spanning its endpoints: {reason}")]
    NotASpanningTree { demand: String, reason: String },
    #[error("element {0} used by a route is not selected")]
    UnselectedRouteElement(String),
    #[error("logical edge {0}: chosen path does not connect the realizations of its endpoints")]
    LayerMapping(EdgeId),
    #[error("stated cost {stated} differs from objective {computed}")]
    CostMismatch { stated: String, computed: String },
    #[error(transparent)]
    Routing(#[from] RoutingError),
}

/// Equipment cost of the selected LSRs plus, for each selected transport link,
/// its fixed cost and its module cost.
pub fn objective<C: Scalar>(mlg: &MultiLayerGraph<C>, design: &Design<C>) -> Result<C, DesignError> {
    let report = validate_selection(mlg, &design.selection);
    if !report.is_valid() {
        return Err(DesignError::InvalidSelection(report));
    }
    let mut cost = total_weight(mlg, &design.selection).map_err(|e| {
        DesignError::InvalidSelection(ValidationReport {
            violations: vec![crate::mlg::Violation { element: crate::mlg::Element::Graph, message: e.to_string() }],
        })
    })?;
    for (&e, &m) in &design.dimensioning {
        let edge = mlg.edge(e).map_err(|_| DesignError::NotATransportLink(e))?;
        let spec = edge.modules.ok_or(DesignError::NotATransportLink(e))?;
        if !design.selection.chosen_edges.contains(&e) {
            return Err(DesignError::UnselectedLink(e));
        }
        cost = cost + C::from_count(m) * spec.cost;
    }
    Ok(cost)
}

/// Result of a full structural audit of a design.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignAudit<C> {
    pub load: LoadMap,
    pub capacity: CapacityReport,
    pub objective: C,
}

/// Checks everything a returned design must satisfy apart from capacity:
/// one spanning tree per demand, consistent valid path choices, every used
/// element selected, each logical edge realized by a path between the
/// realizations of its endpoints, and the stated cost equal to the
/// objective. Capacity is reported in the audit.
pub fn audit_design<C: Scalar>(
    mlg: &MultiLayerGraph<C>,
    instance: &Instance<C>,
    design: &Design<C>,
) -> Result<DesignAudit<C>, DesignError> {
    let objective = objective(mlg, design)?;
    if objective.total_cmp(&design.cost) != std::cmp::Ordering::Equal {
        return Err(DesignError::CostMismatch { stated: design.cost.to_string(), computed: objective.to_string() });
    }
    if design.routes.len() != instance.demands.len() {
        return Err(DesignError::RouteCount { expected: instance.demands.len(), found: design.routes.len() });
    }
    let sel = &design.selection;
    let mut choices: BTreeMap<EdgeId, usize> = BTreeMap::new();
    let mut load = LoadMap::default();
    for (demand, route) in instance.demands.iter().zip(&design.routes) {
        if route.demand_id != demand.id {
            return Err(DesignError::MissingRoute(demand.id.clone()));
        }
        let tree_err = |reason: &str| DesignError::NotASpanningTree { demand: demand.id.clone(), reason: reason.into() };
        let mut adj: BTreeMap<crate::mlg::VertexId, Vec<crate::mlg::VertexId>> = BTreeMap::new();
        for &e in &route.logical_tree {
            let edge = mlg.edge(e).map_err(|_| DesignError::NotLogical(e))?;
            if !edge.is_intra(LayerId::LOGICAL) {
                return Err(DesignError::NotLogical(e));
            }
            if !sel.chosen_edges.contains(&e) {
                return Err(DesignError::UnselectedRouteElement(e.to_string()));
            }
            let &p = route.path_choice.get(&e).ok_or(DesignError::MissingPathChoice(e))?;
            if *choices.entry(e).or_insert(p) != p {
                return Err(DesignError::InconsistentPathChoice(e));
            }
            let path = edge.candidate_paths.get(p).ok_or(DesignError::InvalidPathIndex { edge: e, index: p })?;
            let (a, b) = edge.endpoints;
            let ends = (descend(mlg, a).ok(), descend(mlg, b).ok());
            let (first, last) = (path.vertices.first().copied(), path.vertices.last().copied());
            if (first, last) != ends && (last, first) != ends {
                return Err(DesignError::LayerMapping(e));
            }
            if let Some(t) = path.edges.iter().find(|t| !sel.chosen_edges.contains(t)) {
                return Err(DesignError::UnselectedRouteElement(t.to_string()));
            }
            adj.entry(a).or_default().push(b);
            adj.entry(b).or_default().push(a);
        }
        if route.path_choice.len() != route.logical_tree.len() {
            return Err(tree_err("path choices for edges outside the tree"));
        }
        let terminals: Vec<_> = demand
            .endpoints()
            .map(|n| mlg.find_vertex(LayerId::LOGICAL, n).ok_or_else(|| tree_err("endpoint has no LSR vertex")))
            .collect::<Result<_, _>>()?;
        for t in &terminals {
            if !sel.chosen_vertices.contains(t) {
                return Err(DesignError::UnselectedRouteElement(t.to_string()));
            }
        }
        // connected + |E| = |V| - 1
        let start = terminals[0];
        let mut seen = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &w in adj.get(&v).into_iter().flatten() {
                if seen.insert(w) {
                    queue.push_back(w);
                }
            }
        }
        if terminals.iter().any(|t| !seen.contains(t)) {
            return Err(tree_err("does not reach every endpoint"));
        }
        let vertex_count = adj.len().max(1);
        if seen.len() != vertex_count || route.logical_tree.len() + 1 != vertex_count {
            return Err(tree_err("contains a cycle or a detached component"));
        }
        load += &map_down(route, mlg, demand)?;
    }
    let capacity = check_capacity(&load, mlg, &design.dimensioning);
    Ok(DesignAudit { load, capacity, objective })
}

/// Provable infeasibility checks that need no search: a demand whose
/// bandwidth exceeds the widest transport path between two of its endpoints,
/// or an endpoint whose LSR cannot switch the demand at all.
pub fn find_certificate<C: Scalar>(instance: &Instance<C>) -> Option<InfeasibilityCertificate> {
    for d in &instance.demands {
        for end in d.endpoints() {
            if let Some(limit) = instance.node(end).and_then(|n| n.throughput_limit) {
                if limit < d.bandwidth {
                    return Some(InfeasibilityCertificate::ThroughputTooLow {
                        demand: d.id.clone(),
                        node: end.to_string(),
                        limit,
                        bandwidth: d.bandwidth,
                    });
                }
            }
        }
        for sink in &d.sinks {
            let widest = widest_path(instance, &d.source, sink);
            if widest < d.bandwidth {
                return Some(InfeasibilityCertificate::BottleneckCut {
                    demand: d.id.clone(),
                    from: d.source.clone(),
                    to: sink.clone(),
                    widest,
                    bandwidth: d.bandwidth,
                });
            }
        }
    }
    None
}

/// Largest bottleneck capacity (`max_modules * module_size`) over all
/// transport paths from `s` to `t`.
fn widest_path<C: Scalar>(instance: &Instance<C>, s: &str, t: &str) -> u64 {
    let mut best: BTreeMap<&str, u64> = BTreeMap::from([(s, u64::MAX)]);
    let mut done: BTreeSet<&str> = BTreeSet::new();
    loop {
        let Some((&v, &w)) = best.iter().filter(|(v, _)| !done.contains(*v)).max_by_key(|(_, &w)| w) else {
            return 0;
        };
        if v == t {
            return w;
        }
        done.insert(v);
        for l in &instance.transport_links {
            let other = if l.a == v {
                l.b.as_str()
            } else if l.b == v {
                l.a.as_str()
            } else {
                continue;
            };
            let cap = w.min(l.max_modules.saturating_mul(l.module_size));
            let slot = best.entry(other).or_insert(0);
            if !done.contains(other) && cap > *slot {
                *slot = cap;
            }
        }
    }
}

/// Routes demands in descending bandwidth order on marginal costs, installing
/// LSRs and links lazily, then dimensions every link minimally.
pub fn greedy_construct<C: Scalar>(mlg: &MultiLayerGraph<C>, instance: &Instance<C>) -> Result<Design<C>, SolveError> {
    let problem = Problem::new(mlg, instance)?;
    let mut plan = problem.empty_plan();
    for &d in &problem.order {
        if !problem.route_demand(&mut plan, d, None, None) {
            let cert = find_certificate(instance)
                .unwrap_or_else(|| InfeasibilityCertificate::DemandUnroutable { demand: problem.demands[d].id.clone() });
            return Err(SolveError::Infeasible(cert));
        }
        log::debug!("greedy routed {} with {} logical edges", problem.demands[d].id, plan.trees[d].len());
    }
    Ok(problem.to_design(&plan))
}

/// Solves `instance` over `mlg` (which must be `synthesize(instance)`) in the
/// configured mode.
pub fn solve<C: Scalar>(
    mlg: &MultiLayerGraph<C>,
    instance: &Instance<C>,
    cfg: &SolverConfig,
) -> Result<Design<C>, SolveError> {
    if let Some(cert) = find_certificate(instance) {
        return Err(SolveError::Infeasible(cert));
    }
    let design = match cfg.mode {
        SolverMode::Greedy => greedy_construct(mlg, instance)?,
        SolverMode::GreedyPlusLocalSearch => {
            let seed = greedy_construct(mlg, instance)?;
            local_search::local_search_timed(
                mlg,
                instance,
                &seed,
                cfg.local_search_budget,
                cfg.rng_seed,
                cfg.time_limit,
            )?
        }
        SolverMode::ExactBruteForce => {
            let limits = ExactLimits { time_limit: cfg.time_limit, ..ExactLimits::default() };
            exact_bruteforce(mlg, instance, &limits)?
        }
    };
    log::info!("{} design for {}: cost {}", cfg.mode, instance.name, design.cost);
    Ok(design)
}

#[cfg(test)]
mod tests;
