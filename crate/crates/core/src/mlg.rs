//! The multilayer graph: ordered layers, per-layer vertices and edges, and
//! inter-layer edges that record which lower-layer element realizes an
//! upper-layer one.
//!
//! Layer 0 is the transport network, layer 1 the MPLS (logical) network and
//! every layer above holds the endpoints of exactly one multicast demand.
//! A [`MultiLayerGraph`] is immutable once built; [`MlgBuilder`] is the only
//! way to assemble one and accepts anything, leaving [`validate`] to report
//! what is wrong.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{self, Scalar};

/// Layer ordinal. 0 = transport, 1 = logical, 2.. = one per demand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LayerId(pub u16);

impl LayerId {
    pub const TRANSPORT: LayerId = LayerId(0);
    pub const LOGICAL: LayerId = LayerId(1);

    /// Layer holding the endpoints of the `index`-th demand.
    pub fn demand(index: usize) -> LayerId {
        LayerId(u16::try_from(index + 2).expect("too many demand layers"))
    }

    /// The layer this one is realized on. Demand layers all sit directly on
    /// the logical layer.
    pub fn below(self) -> Option<LayerId> {
        match self.0 {
            0 => None,
            1 => Some(LayerId::TRANSPORT),
            _ => Some(LayerId::LOGICAL),
        }
    }
}

impl fmt::Display for LayerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "L{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub u32);

impl VertexId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgeId(pub u32);

impl EdgeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VertexKind {
    TransportNode,
    LsrCandidate,
    FlowEndpoint,
}

impl VertexKind {
    fn expected_for(layer: LayerId) -> VertexKind {
        match layer.0 {
            0 => VertexKind::TransportNode,
            1 => VertexKind::LsrCandidate,
            _ => VertexKind::FlowEndpoint,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Vertex<C> {
    pub id: VertexId,
    /// Unique within the vertex's layer.
    pub name: String,
    pub layer: LayerId,
    pub kind: VertexKind,
    pub node_cost: C,
    /// `None` is unbounded.
    pub throughput_limit: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeKind {
    IntraLayer(LayerId),
    /// Joins a vertex of `upper` to its realization on `upper - 1`.
    InterLayer { upper: LayerId },
}

/// Modular capacity of a transport link: `max` modules of `size` units,
/// each costing `cost`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModuleSpec<C> {
    pub size: u64,
    pub cost: C,
    pub max: u64,
}

/// A simple path on the transport layer.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TransportPath {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<EdgeId>,
}

impl TransportPath {
    pub fn hops(&self) -> usize {
        self.edges.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge<C> {
    pub id: EdgeId,
    pub endpoints: (VertexId, VertexId),
    pub kind: EdgeKind,
    pub weight: C,
    /// `None` is unbounded. Inter-layer edges carry `Some(0)`.
    pub capacity: Option<u64>,
    /// Present on transport links only.
    pub modules: Option<ModuleSpec<C>>,
    /// Present on logical edges only: the transport paths that may realize it.
    pub candidate_paths: Vec<TransportPath>,
}

impl<C> Edge<C> {
    pub fn other(&self, v: VertexId) -> VertexId {
        if self.endpoints.0 == v {
            self.endpoints.1
        } else {
            self.endpoints.0
        }
    }

    pub fn is_intra(&self, layer: LayerId) -> bool {
        self.kind == EdgeKind::IntraLayer(layer)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layer {
    pub id: LayerId,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultiLayerGraph<C> {
    layers: Vec<Layer>,
    vertices: Vec<Vertex<C>>,
    edges: Vec<Edge<C>>,
    incidence: Vec<Vec<EdgeId>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MlgError {
    #[error("no such layer {0}")]
    NoSuchLayer(LayerId),
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("unknown edge {0}")]
    UnknownEdge(EdgeId),
    #[error("vertex {0} is on the transport layer and has no layer below")]
    BottomLayer(VertexId),
    #[error("vertex {vertex} has {found} downward inter-layer edges, expected exactly one")]
    Descend { vertex: VertexId, found: usize },
}

impl<C: Scalar> MultiLayerGraph<C> {
    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn vertices(&self) -> &[Vertex<C>] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge<C>] {
        &self.edges
    }

    pub fn vertex(&self, id: VertexId) -> Result<&Vertex<C>, MlgError> {
        self.vertices.get(id.index()).ok_or(MlgError::UnknownVertex(id))
    }

    pub fn edge(&self, id: EdgeId) -> Result<&Edge<C>, MlgError> {
        self.edges.get(id.index()).ok_or(MlgError::UnknownEdge(id))
    }

    pub fn has_layer(&self, layer: LayerId) -> bool {
        self.layers.iter().any(|l| l.id == layer)
    }

    /// Edges incident to `v` (intra- and inter-layer), in id order.
    pub fn incident(&self, v: VertexId) -> &[EdgeId] {
        self.incidence.get(v.index()).map_or(&[], Vec::as_slice)
    }

    pub fn vertices_on(&self, layer: LayerId) -> impl Iterator<Item = &Vertex<C>> + '_ {
        self.vertices.iter().filter(move |v| v.layer == layer)
    }

    pub fn edges_on(&self, layer: LayerId) -> impl Iterator<Item = &Edge<C>> + '_ {
        self.edges.iter().filter(move |e| e.is_intra(layer))
    }

    pub fn inter_layer_edges(&self) -> impl Iterator<Item = &Edge<C>> + '_ {
        self.edges.iter().filter(|e| matches!(e.kind, EdgeKind::InterLayer { .. }))
    }

    pub fn find_vertex(&self, layer: LayerId, name: &str) -> Option<VertexId> {
        self.vertices.iter().find(|v| v.layer == layer && v.name == name).map(|v| v.id)
    }

    /// The intra-layer edge joining `a` and `b`, if any.
    pub fn edge_between(&self, a: VertexId, b: VertexId) -> Option<EdgeId> {
        self.incident(a).iter().copied().find(|&e| {
            let edge = &self.edges[e.index()];
            matches!(edge.kind, EdgeKind::IntraLayer(_)) && edge.other(a) == b
        })
    }
}

/// Returns the unique vertex one layer down that realizes `v`.
pub fn descend<C: Scalar>(mlg: &MultiLayerGraph<C>, v: VertexId) -> Result<VertexId, MlgError> {
    let vertex = mlg.vertex(v)?;
    if vertex.layer.0 == 0 {
        return Err(MlgError::BottomLayer(v));
    }
    let down: Vec<VertexId> = mlg
        .incident(v)
        .iter()
        .map(|&e| &mlg.edges[e.index()])
        .filter(|e| e.kind == EdgeKind::InterLayer { upper: vertex.layer })
        .map(|e| e.other(v))
        .filter(|&w| mlg.vertices.get(w.index()).is_some_and(|w| Some(w.layer) == vertex.layer.below()))
        .collect();
    match down.as_slice() {
        [only] => Ok(*only),
        _ => Err(MlgError::Descend { vertex: v, found: down.len() }),
    }
}

/// Single-use builder. Performs no checking beyond id assignment.
#[derive(Debug, Clone)]
pub struct MlgBuilder<C> {
    layers: Vec<Layer>,
    vertices: Vec<Vertex<C>>,
    edges: Vec<Edge<C>>,
}

impl<C: Scalar> Default for MlgBuilder<C> {
    fn default() -> Self {
        Self::new()
    }
}

impl<C: Scalar> MlgBuilder<C> {
    pub fn new() -> Self {
        MlgBuilder { layers: Vec::new(), vertices: Vec::new(), edges: Vec::new() }
    }

    /// Appends the next layer ordinal.
    pub fn add_layer(&mut self, label: impl Into<String>) -> LayerId {
        let id = LayerId(self.layers.iter().map(|l| l.id.0 + 1).max().unwrap_or(0));
        self.add_layer_with_id(id, label);
        id
    }

    /// Adds a layer with an explicit ordinal (may leave gaps).
    pub fn add_layer_with_id(&mut self, id: LayerId, label: impl Into<String>) {
        self.layers.push(Layer { id, label: label.into() });
    }

    pub fn add_vertex(
        &mut self,
        layer: LayerId,
        name: impl Into<String>,
        kind: VertexKind,
        node_cost: C,
        throughput_limit: Option<u64>,
    ) -> VertexId {
        let id = VertexId(self.vertices.len() as u32);
        self.vertices.push(Vertex { id, name: name.into(), layer, kind, node_cost, throughput_limit });
        id
    }

    /// Adds an intra-layer edge on the layer of `a`.
    pub fn add_edge(&mut self, a: VertexId, b: VertexId, weight: C, capacity: Option<u64>) -> EdgeId {
        let layer = self.vertices.get(a.index()).map_or(LayerId(u16::MAX), |v| v.layer);
        self.push_edge(a, b, EdgeKind::IntraLayer(layer), weight, capacity)
    }

    /// Adds a transport link with modular capacity `size * max`.
    pub fn add_transport_link(&mut self, a: VertexId, b: VertexId, fixed_cost: C, modules: ModuleSpec<C>) -> EdgeId {
        let id = self.add_edge(a, b, fixed_cost, Some(modules.size.saturating_mul(modules.max)));
        self.edges[id.index()].modules = Some(modules);
        id
    }

    /// Adds a zero-weight, unbounded logical edge realized by `paths`.
    pub fn add_logical_edge(&mut self, a: VertexId, b: VertexId, paths: Vec<TransportPath>) -> EdgeId {
        let id = self.add_edge(a, b, C::zero(), None);
        self.edges[id.index()].candidate_paths = paths;
        id
    }

    /// Links `upper` to the vertex `lower` that realizes it. The layer pair is
    /// taken from `upper`.
    pub fn add_inter_layer_edge(&mut self, upper: VertexId, lower: VertexId) -> EdgeId {
        let layer = self.vertices.get(upper.index()).map_or(LayerId(u16::MAX), |v| v.layer);
        self.push_edge(upper, lower, EdgeKind::InterLayer { upper: layer }, C::zero(), Some(0))
    }

    /// Escape hatch for arbitrary edges (used to exercise validation).
    pub fn push_edge(
        &mut self,
        a: VertexId,
        b: VertexId,
        kind: EdgeKind,
        weight: C,
        capacity: Option<u64>,
    ) -> EdgeId {
        let id = EdgeId(self.edges.len() as u32);
        self.edges.push(Edge {
            id,
            endpoints: (a, b),
            kind,
            weight,
            capacity,
            modules: None,
            candidate_paths: Vec::new(),
        });
        id
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn build(self) -> MultiLayerGraph<C> {
        let mut incidence = vec![Vec::new(); self.vertices.len()];
        for e in &self.edges {
            let (a, b) = e.endpoints;
            if let Some(list) = incidence.get_mut(a.index()) {
                list.push(e.id);
            }
            if a != b {
                if let Some(list) = incidence.get_mut(b.index()) {
                    list.push(e.id);
                }
            }
        }
        MultiLayerGraph { layers: self.layers, vertices: self.vertices, edges: self.edges, incidence }
    }
}

/// The graph element a violation is attached to. Orders graph-level first,
/// then layers, vertices and edges by id.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Element {
    Graph,
    Layer(LayerId),
    Vertex(VertexId),
    Edge(EdgeId),
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Element::Graph => f.write_str("graph"),
            Element::Layer(l) => write!(f, "layer {l}"),
            Element::Vertex(v) => write!(f, "vertex {v}"),
            Element::Edge(e) => write!(f, "edge {e}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Violation {
    pub element: Element,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.element, self.message)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, element: Element, message: impl Into<String>) {
        self.violations.push(Violation { element, message: message.into() });
    }

    fn finish(mut self) -> Self {
        self.violations.sort();
        self.violations.dedup();
        self
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("valid");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("\n")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Checks every structural invariant of the model and returns all violations,
/// sorted by element.
pub fn validate<C: Scalar>(mlg: &MultiLayerGraph<C>) -> ValidationReport {
    let mut report = ValidationReport::default();
    if !mlg.has_layer(LayerId::TRANSPORT) {
        report.push(Element::Graph, "missing layer 0");
        if mlg.layers.is_empty() {
            return report.finish();
        }
    }

    let mut seen_layers = BTreeSet::new();
    for layer in &mlg.layers {
        if !seen_layers.insert(layer.id) {
            report.push(Element::Layer(layer.id), "duplicate layer");
        }
    }
    for (expected, actual) in seen_layers.iter().enumerate() {
        if actual.0 as usize != expected {
            report.push(Element::Layer(*actual), "non-contiguous layers");
            break;
        }
    }

    let mut names: HashSet<(LayerId, &str)> = HashSet::new();
    for v in &mlg.vertices {
        let el = Element::Vertex(v.id);
        if !seen_layers.contains(&v.layer) {
            report.push(el, format!("on unknown layer {}", v.layer));
            continue;
        }
        if !names.insert((v.layer, v.name.as_str())) {
            report.push(el, format!("duplicate name {:?} on layer {}", v.name, v.layer));
        }
        let expected = VertexKind::expected_for(v.layer);
        if v.kind != expected {
            let msg = match v.kind {
                VertexKind::LsrCandidate => "LSR candidate off layer 1",
                VertexKind::FlowEndpoint => "flow endpoint below layer 2",
                VertexKind::TransportNode => "transport node off layer 0",
            };
            report.push(el, msg);
        }
        if v.node_cost.is_negative() {
            report.push(el, "negative node cost");
        }
        if v.layer.0 >= 1 {
            match descend(mlg, v.id) {
                Ok(_) => {}
                Err(MlgError::Descend { found, .. }) => {
                    report.push(el, format!("{found} downward inter-layer edges, expected exactly one"))
                }
                Err(e) => report.push(el, e.to_string()),
            }
        }
    }

    let mut pairs: HashMap<(VertexId, VertexId), EdgeId> = HashMap::new();
    for e in &mlg.edges {
        let el = Element::Edge(e.id);
        let (a, b) = e.endpoints;
        let (va, vb) = match (mlg.vertices.get(a.index()), mlg.vertices.get(b.index())) {
            (Some(va), Some(vb)) => (va, vb),
            _ => {
                report.push(el, "unknown endpoint");
                continue;
            }
        };
        if a == b {
            report.push(el, "self-loop");
        }
        if e.weight.is_negative() {
            report.push(el, "negative weight");
        }
        match e.kind {
            EdgeKind::IntraLayer(layer) => {
                if va.layer != vb.layer {
                    report.push(el, "intra-layer edge joins different layers");
                } else if va.layer != layer {
                    report.push(el, format!("intra-layer edge tagged {layer} but lies on {}", va.layer));
                }
                let key = (a.min(b), a.max(b));
                if a != b && pairs.insert(key, e.id).is_some() {
                    report.push(el, "parallel intra-layer edge");
                }
                if let Some(m) = &e.modules {
                    if layer != LayerId::TRANSPORT {
                        report.push(el, "capacity modules off the transport layer");
                    }
                    if m.size == 0 {
                        report.push(el, "zero module size");
                    }
                    if m.cost.is_negative() {
                        report.push(el, "negative module cost");
                    }
                }
                if !e.candidate_paths.is_empty() {
                    if layer != LayerId::LOGICAL {
                        report.push(el, "candidate paths on a non-logical edge");
                    } else {
                        check_candidate_paths(mlg, e, &mut report);
                    }
                }
            }
            EdgeKind::InterLayer { upper } => {
                let (hi, lo) = if va.layer.0 >= vb.layer.0 { (va, vb) } else { (vb, va) };
                if hi.layer.below() != Some(lo.layer) {
                    report.push(el, "non-adjacent layers");
                } else if hi.layer != upper {
                    report.push(el, format!("inter-layer edge tagged {upper} but spans {}-{}", lo.layer, hi.layer));
                }
                if !e.weight.is_zero() {
                    report.push(el, "inter-layer edge with nonzero weight");
                }
                if e.capacity != Some(0) {
                    report.push(el, "inter-layer edge with nonzero capacity");
                }
            }
        }
    }

    if mlg.has_layer(LayerId::TRANSPORT) && !is_connected(mlg, LayerId::TRANSPORT) {
        report.push(Element::Layer(LayerId::TRANSPORT), "transport layer is disconnected");
    }
    report.finish()
}

fn check_candidate_paths<C: Scalar>(mlg: &MultiLayerGraph<C>, e: &Edge<C>, report: &mut ValidationReport) {
    let el = Element::Edge(e.id);
    let ends = match (descend(mlg, e.endpoints.0), descend(mlg, e.endpoints.1)) {
        (Ok(a), Ok(b)) => (a, b),
        _ => {
            report.push(el, "candidate paths on an edge whose endpoints do not descend");
            return;
        }
    };
    for (i, path) in e.candidate_paths.iter().enumerate() {
        let bad = |what: &str| format!("candidate path {i}: {what}");
        if path.vertices.len() != path.edges.len() + 1 || path.edges.is_empty() {
            report.push(el, bad("malformed"));
            continue;
        }
        let first = path.vertices[0];
        let last = *path.vertices.last().unwrap();
        if (first, last) != ends && (last, first) != ends {
            report.push(el, bad("endpoints are not the descend-images of the logical endpoints"));
        }
        let distinct: HashSet<_> = path.vertices.iter().collect();
        if distinct.len() != path.vertices.len() {
            report.push(el, bad("not simple"));
        }
        for (k, &te) in path.edges.iter().enumerate() {
            let ok = mlg.edges.get(te.index()).is_some_and(|t| {
                t.is_intra(LayerId::TRANSPORT) && {
                    let (x, y) = t.endpoints;
                    let (p, q) = (path.vertices[k], path.vertices[k + 1]);
                    (x, y) == (p, q) || (x, y) == (q, p)
                }
            });
            if !ok {
                report.push(el, bad("does not follow transport links"));
                break;
            }
        }
    }
}

fn is_connected<C: Scalar>(mlg: &MultiLayerGraph<C>, layer: LayerId) -> bool {
    let members: Vec<VertexId> = mlg.vertices_on(layer).map(|v| v.id).collect();
    let Some(&start) = members.first() else {
        return true;
    };
    let mut seen = HashSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some(v) = queue.pop_front() {
        for &e in mlg.incident(v) {
            let edge = &mlg.edges[e.index()];
            if edge.is_intra(layer) {
                let w = edge.other(v);
                if mlg.vertices.get(w.index()).is_some_and(|x| x.layer == layer) && seen.insert(w) {
                    queue.push_back(w);
                }
            }
        }
    }
    seen.len() == members.len()
}

/// A single layer as a plain undirected graph with dense local indices.
#[derive(Debug, Clone)]
pub struct LayerView {
    pub layer: LayerId,
    vertices: Vec<VertexId>,
    position: HashMap<VertexId, usize>,
    edges: Vec<(EdgeId, usize, usize)>,
    adjacency: Vec<Vec<(usize, EdgeId)>>,
}

impl LayerView {
    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    /// `(edge, endpoint, endpoint)` in edge-id order.
    pub fn edges(&self) -> impl Iterator<Item = (EdgeId, VertexId, VertexId)> + '_ {
        self.edges.iter().map(|&(e, a, b)| (e, self.vertices[a], self.vertices[b]))
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.position.contains_key(&v)
    }

    pub(crate) fn position(&self, v: VertexId) -> Option<usize> {
        self.position.get(&v).copied()
    }

    pub(crate) fn vertex_at(&self, i: usize) -> VertexId {
        self.vertices[i]
    }

    /// Neighbours of local index `i` as `(local index, edge)`, sorted by
    /// neighbour vertex id.
    pub(crate) fn adjacent(&self, i: usize) -> &[(usize, EdgeId)] {
        &self.adjacency[i]
    }

    pub fn neighbours(&self, v: VertexId) -> impl Iterator<Item = (VertexId, EdgeId)> + '_ {
        self.position(v)
            .into_iter()
            .flat_map(move |i| self.adjacency[i].iter().map(move |&(j, e)| (self.vertices[j], e)))
    }
}

/// Extracts one layer's vertices and intra-layer edges.
pub fn layer_subgraph<C: Scalar>(mlg: &MultiLayerGraph<C>, layer: LayerId) -> Result<LayerView, MlgError> {
    if !mlg.has_layer(layer) {
        return Err(MlgError::NoSuchLayer(layer));
    }
    let vertices: Vec<VertexId> = mlg.vertices_on(layer).map(|v| v.id).collect();
    let position: HashMap<VertexId, usize> = vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut edges = Vec::new();
    let mut adjacency = vec![Vec::new(); vertices.len()];
    for e in mlg.edges_on(layer) {
        if let (Some(&a), Some(&b)) = (position.get(&e.endpoints.0), position.get(&e.endpoints.1)) {
            edges.push((e.id, a, b));
            adjacency[a].push((b, e.id));
            adjacency[b].push((a, e.id));
        }
    }
    for list in &mut adjacency {
        list.sort_by_key(|&(j, e)| (vertices[j], e));
    }
    Ok(LayerView { layer, vertices, position, edges, adjacency })
}

/// A candidate subgraph `MLG' ⊂ MLG`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Selection {
    pub chosen_vertices: BTreeSet<VertexId>,
    pub chosen_edges: BTreeSet<EdgeId>,
}

impl Selection {
    pub fn is_empty(&self) -> bool {
        self.chosen_vertices.is_empty() && self.chosen_edges.is_empty()
    }

    pub fn union(&self, other: &Selection) -> Selection {
        Selection {
            chosen_vertices: self.chosen_vertices.union(&other.chosen_vertices).copied().collect(),
            chosen_edges: self.chosen_edges.union(&other.chosen_edges).copied().collect(),
        }
    }

    pub fn is_disjoint(&self, other: &Selection) -> bool {
        self.chosen_vertices.is_disjoint(&other.chosen_vertices) && self.chosen_edges.is_disjoint(&other.chosen_edges)
    }

    /// Adds `e` together with both of its endpoints.
    pub fn insert_edge<C: Scalar>(&mut self, mlg: &MultiLayerGraph<C>, e: EdgeId) -> Result<(), MlgError> {
        let edge = mlg.edge(e)?;
        self.chosen_edges.insert(e);
        self.chosen_vertices.insert(edge.endpoints.0);
        self.chosen_vertices.insert(edge.endpoints.1);
        Ok(())
    }
}

/// Reports unknown ids and incidence-closure failures of `sel` against `mlg`.
pub fn validate_selection<C: Scalar>(mlg: &MultiLayerGraph<C>, sel: &Selection) -> ValidationReport {
    let mut report = ValidationReport::default();
    for &v in &sel.chosen_vertices {
        if mlg.vertex(v).is_err() {
            report.push(Element::Vertex(v), "unknown vertex in selection");
        }
    }
    for &e in &sel.chosen_edges {
        match mlg.edge(e) {
            Err(_) => report.push(Element::Edge(e), "unknown edge in selection"),
            Ok(edge) => {
                let (a, b) = edge.endpoints;
                if !sel.chosen_vertices.contains(&a) || !sel.chosen_vertices.contains(&b) {
                    report.push(Element::Edge(e), "chosen edge has an unchosen endpoint");
                }
            }
        }
    }
    report.finish()
}

/// Sum of chosen vertex costs plus chosen edge weights.
pub fn total_weight<C: Scalar>(mlg: &MultiLayerGraph<C>, sel: &Selection) -> Result<C, MlgError> {
    let vertices = sel.chosen_vertices.iter().map(|&v| mlg.vertex(v).map(|v| v.node_cost));
    let edges = sel.chosen_edges.iter().map(|&e| mlg.edge(e).map(|e| e.weight));
    let costs = vertices.chain(edges).collect::<Result<Vec<C>, _>>()?;
    Ok(scalar::sum(costs))
}

/// Per-layer element counts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LayerStats {
    pub layer: LayerId,
    pub label: String,
    pub vertices: usize,
    pub edges: usize,
}

pub fn layer_stats<C: Scalar>(mlg: &MultiLayerGraph<C>) -> Vec<LayerStats> {
    let mut vertices: BTreeMap<LayerId, usize> = BTreeMap::new();
    let mut edges: BTreeMap<LayerId, usize> = BTreeMap::new();
    for v in mlg.vertices() {
        *vertices.entry(v.layer).or_default() += 1;
    }
    for e in mlg.edges() {
        if let EdgeKind::IntraLayer(l) = e.kind {
            *edges.entry(l).or_default() += 1;
        }
    }
    mlg.layers()
        .iter()
        .map(|l| LayerStats {
            layer: l.id,
            label: l.label.clone(),
            vertices: vertices.get(&l.id).copied().unwrap_or(0),
            edges: edges.get(&l.id).copied().unwrap_or(0),
        })
        .collect()
}
