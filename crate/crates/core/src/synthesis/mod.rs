//! Construction of the initial redundant multilayer graph from an [`Instance`].
//!
//! Layer 0 mirrors the transport topology, layer 1 holds one vertex per LSR
//! candidate with logical edges chosen by the [`CandidatePolicy`], and layer
//! `2 + i` holds the endpoints of demand `i`. Element ids follow construction
//! order, so identical instances produce identical graphs.

mod instance;
mod paths;

use std::collections::BTreeMap;

use thiserror::Error;

pub use instance::{CandidatePolicy, Demand, Instance, InstanceError, LogicalEdgeRule, TransportLink, TransportNode};
pub use paths::{candidate_paths, hop_distance, PathError};

use crate::mlg::{
    layer_subgraph, validate, LayerId, MlgBuilder, ModuleSpec, MultiLayerGraph, TransportPath, ValidationReport,
    VertexId, VertexKind,
};
use crate::scalar::{self, Ordered, Scalar};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SynthesisError {
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error("synthesized graph failed validation:\n{0}")]
    Invalid(ValidationReport),
}

/// Layer label of the demand layers; the demand id follows the colon.
pub const DEMAND_LAYER_PREFIX: &str = "demand:";

pub fn synthesize<C: Scalar>(instance: &Instance<C>) -> Result<MultiLayerGraph<C>, SynthesisError> {
    instance.validate()?;

    let mut b = MlgBuilder::new();
    let l0 = b.add_layer("transport");
    let mut transport: BTreeMap<&str, VertexId> = BTreeMap::new();
    for n in &instance.transport_nodes {
        let v = b.add_vertex(l0, n.id.clone(), VertexKind::TransportNode, C::zero(), None);
        transport.insert(&n.id, v);
    }
    for l in &instance.transport_links {
        let modules = ModuleSpec { size: l.module_size, cost: l.module_cost, max: l.max_modules };
        b.add_transport_link(transport[l.a.as_str()], transport[l.b.as_str()], l.fixed_cost, modules);
    }
    let transport_only = b.clone().build();
    let view = layer_subgraph(&transport_only, l0).expect("transport layer exists");

    let l1 = b.add_layer("mpls");
    let mut lsrs: Vec<(&str, VertexId, VertexId)> = Vec::new();
    for n in instance.lsr_candidates() {
        let v = b.add_vertex(l1, n.id.clone(), VertexKind::LsrCandidate, n.lsr_install_cost, n.throughput_limit);
        let t = transport[n.id.as_str()];
        b.add_inter_layer_edge(v, t);
        lsrs.push((&n.id, v, t));
    }

    let k = instance.policy.k_paths as usize;
    let mut pairs: Vec<(usize, usize, Vec<TransportPath>)> = Vec::new();
    for i in 0..lsrs.len() {
        for j in i + 1..lsrs.len() {
            let (s, t) = (lsrs[i].2, lsrs[j].2);
            if let LogicalEdgeRule::DistanceLimited { hop_bound } = instance.policy.logical_edges {
                if hop_distance(&view, s, t).is_none_or(|h| h > hop_bound as usize) {
                    continue;
                }
            }
            let paths = candidate_paths(&transport_only, &view, s, t, k).expect("distinct transport vertices");
            if !paths.is_empty() {
                pairs.push((i, j, paths));
            }
        }
    }
    if let Some(max_degree) = instance.policy.max_logical_degree {
        pairs = limit_degree(&transport_only, pairs, lsrs.len(), max_degree as usize);
    }

    let mut logical: BTreeMap<(usize, usize), ()> = BTreeMap::new();
    for (i, j, paths) in pairs {
        b.add_logical_edge(lsrs[i].1, lsrs[j].1, paths);
        logical.insert((i, j), ());
    }

    let lsr_pos: BTreeMap<&str, usize> = lsrs.iter().enumerate().map(|(i, l)| (l.0, i)).collect();
    for (d_index, d) in instance.demands.iter().enumerate() {
        let layer = b.add_layer(format!("{DEMAND_LAYER_PREFIX}{}", d.id));
        debug_assert_eq!(layer, LayerId::demand(d_index));
        let mut endpoints = Vec::new();
        for name in d.endpoints() {
            let pos = lsr_pos[name];
            let v = b.add_vertex(layer, name, VertexKind::FlowEndpoint, C::zero(), None);
            b.add_inter_layer_edge(v, lsrs[pos].1);
            endpoints.push((pos, v));
        }
        for x in 0..endpoints.len() {
            for y in x + 1..endpoints.len() {
                let (p, q) = (endpoints[x].0.min(endpoints[y].0), endpoints[x].0.max(endpoints[y].0));
                if logical.contains_key(&(p, q)) {
                    b.add_edge(endpoints[x].1, endpoints[y].1, C::zero(), None);
                }
            }
        }
    }

    let mlg = b.build();
    let report = validate(&mlg);
    if !report.is_valid() {
        return Err(SynthesisError::Invalid(report));
    }
    log::debug!(
        "synthesized {}: {} layers, {} vertices, {} edges",
        instance.name,
        mlg.layers().len(),
        mlg.vertices().len(),
        mlg.edges().len()
    );
    Ok(mlg)
}

/// Keeps the cheapest pairs (by best path cost, hops, then pair order) while
/// both endpoints stay within `max_degree`. Output keeps pair order.
fn limit_degree<C: Scalar>(
    mlg: &MultiLayerGraph<C>,
    pairs: Vec<(usize, usize, Vec<TransportPath>)>,
    n: usize,
    max_degree: usize,
) -> Vec<(usize, usize, Vec<TransportPath>)> {
    let best = |p: &TransportPath| {
        let cost = scalar::sum(p.edges.iter().map(|e| mlg.edges()[e.index()].weight));
        (Ordered(cost), p.hops())
    };
    let mut order: Vec<usize> = (0..pairs.len()).collect();
    order.sort_by_key(|&i| (best(&pairs[i].2[0]), pairs[i].0, pairs[i].1));
    let mut degree = vec![0usize; n];
    let mut keep = vec![false; pairs.len()];
    for i in order {
        let (a, b) = (pairs[i].0, pairs[i].1);
        if degree[a] < max_degree && degree[b] < max_degree {
            degree[a] += 1;
            degree[b] += 1;
            keep[i] = true;
        }
    }
    pairs.into_iter().zip(keep).filter_map(|(p, k)| k.then_some(p)).collect()
}
