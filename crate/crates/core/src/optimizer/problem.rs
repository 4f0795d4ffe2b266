//! Dense, index-based view of a synthesized graph used by all solver modes.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::mlg::{EdgeId, EdgeKind, LayerId, LayerView, MultiLayerGraph, Selection, VertexId};
use crate::routing::{takahashi_matsuyama, MulticastRoute};
use crate::scalar::Scalar;
use crate::synthesis::Instance;

use super::{Design, DesignError, SolveError};

#[derive(Debug, Clone)]
pub(crate) struct Lsr<C> {
    pub vertex: VertexId,
    pub mapping: EdgeId,
    pub install: C,
    pub limit: Option<u64>,
}

#[derive(Debug, Clone)]
pub(crate) struct Link<C> {
    pub edge: EdgeId,
    pub fixed: C,
    pub size: u64,
    pub module_cost: C,
    pub max: u64,
}

impl<C: Scalar> Link<C> {
    pub fn modules(&self, load: u64) -> u64 {
        load.div_ceil(self.size)
    }

    /// Cost of carrying `load`; `None` past the module maximum.
    pub fn cost(&self, load: u64) -> Option<C> {
        if load == 0 {
            return Some(C::zero());
        }
        let m = self.modules(load);
        (m <= self.max).then(|| self.fixed + C::from_count(m) * self.module_cost)
    }
}

#[derive(Debug, Clone)]
pub(crate) struct LogicalEdge {
    pub edge: EdgeId,
    pub ends: (usize, usize),
    /// Candidate paths as link indices.
    pub paths: Vec<Vec<usize>>,
}

#[derive(Debug, Clone)]
pub(crate) struct DemandInfo {
    pub id: String,
    pub bandwidth: u64,
    pub layer: LayerId,
    /// LSR indices, source first.
    pub terminals: Vec<usize>,
}

/// Which tree each demand uses and which path each used logical edge takes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Plan {
    /// Sorted logical edge indices per demand; empty while unrouted.
    pub trees: Vec<Vec<usize>>,
    /// Path index per logical edge; `Some` exactly for used edges.
    pub choice: Vec<Option<usize>>,
    /// LSRs installed without carrying any tree.
    pub extra: Vec<bool>,
}

#[derive(Debug, Clone)]
pub(crate) struct Usage {
    pub link_load: Vec<u64>,
    pub lsr_through: Vec<u64>,
    pub lsr_degree: Vec<u32>,
    pub edge_use: Vec<u32>,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Eval<C> {
    pub cost: C,
    pub feasible: bool,
}

pub(crate) struct Problem<'a, C> {
    pub mlg: &'a MultiLayerGraph<C>,
    pub view: LayerView,
    pub lsrs: Vec<Lsr<C>>,
    pub links: Vec<Link<C>>,
    pub ledges: Vec<LogicalEdge>,
    pub ledge_of: HashMap<EdgeId, usize>,
    pub demands: Vec<DemandInfo>,
    /// Demand indices by descending bandwidth, then id.
    pub order: Vec<usize>,
}

fn model_err(msg: impl Into<String>) -> SolveError {
    SolveError::Model(msg.into())
}

impl<'a, C: Scalar> Problem<'a, C> {
    pub fn new(mlg: &'a MultiLayerGraph<C>, instance: &Instance<C>) -> Result<Self, SolveError> {
        let view = crate::mlg::layer_subgraph(mlg, LayerId::LOGICAL).map_err(|e| model_err(e.to_string()))?;
        let mut lsrs = Vec::new();
        let mut lsr_of = HashMap::new();
        for &v in view.vertices() {
            let vertex = &mlg.vertices()[v.index()];
            let mapping = mlg
                .incident(v)
                .iter()
                .copied()
                .find(|e| mlg.edges()[e.index()].kind == EdgeKind::InterLayer { upper: LayerId::LOGICAL })
                .ok_or_else(|| model_err(format!("LSR {} has no transport mapping", vertex.name)))?;
            lsr_of.insert(v, lsrs.len());
            lsrs.push(Lsr {
                vertex: v,
                mapping,
                install: vertex.node_cost,
                limit: vertex.throughput_limit,
            });
        }
        let mut links = Vec::new();
        let mut link_of = HashMap::new();
        for e in mlg.edges_on(LayerId::TRANSPORT) {
            let m = e.modules.ok_or_else(|| model_err(format!("transport edge {} has no modules", e.id)))?;
            link_of.insert(e.id, links.len());
            links.push(Link { edge: e.id, fixed: e.weight, size: m.size, module_cost: m.cost, max: m.max });
        }
        let mut ledges = Vec::new();
        let mut ledge_of = HashMap::new();
        for (id, a, b) in view.edges() {
            let edge = &mlg.edges()[id.index()];
            let paths = edge
                .candidate_paths
                .iter()
                .map(|p| p.edges.iter().map(|t| link_of.get(t).copied()).collect::<Option<Vec<_>>>())
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| model_err(format!("logical edge {id} has a path off the transport layer")))?;
            ledge_of.insert(id, ledges.len());
            ledges.push(LogicalEdge { edge: id, ends: (lsr_of[&a], lsr_of[&b]), paths });
        }
        let mut demands = Vec::new();
        for (i, d) in instance.demands.iter().enumerate() {
            let layer = LayerId::demand(i);
            let label = format!("{}{}", crate::synthesis::DEMAND_LAYER_PREFIX, d.id);
            if !mlg.layers().iter().any(|l| l.id == layer && l.label == label) {
                return Err(model_err(format!("graph has no layer for demand {}", d.id)));
            }
            let terminals = d
                .endpoints()
                .map(|n| {
                    mlg.find_vertex(LayerId::LOGICAL, n)
                        .map(|v| lsr_of[&v])
                        .ok_or_else(|| model_err(format!("demand {} endpoint {n} has no LSR vertex", d.id)))
                })
                .collect::<Result<Vec<_>, _>>()?;
            demands.push(DemandInfo { id: d.id.clone(), bandwidth: d.bandwidth, layer, terminals });
        }
        let mut order: Vec<usize> = (0..demands.len()).collect();
        order.sort_by(|&a, &b| {
            demands[b].bandwidth.cmp(&demands[a].bandwidth).then_with(|| demands[a].id.cmp(&demands[b].id))
        });
        Ok(Problem { mlg, view, lsrs, links, ledges, ledge_of, demands, order })
    }

    pub fn empty_plan(&self) -> Plan {
        Plan {
            trees: vec![Vec::new(); self.demands.len()],
            choice: vec![None; self.ledges.len()],
            extra: vec![false; self.lsrs.len()],
        }
    }

    pub fn usage(&self, plan: &Plan) -> Usage {
        let mut u = Usage {
            link_load: vec![0; self.links.len()],
            lsr_through: vec![0; self.lsrs.len()],
            lsr_degree: vec![0; self.lsrs.len()],
            edge_use: vec![0; self.ledges.len()],
        };
        for (d, tree) in plan.trees.iter().enumerate() {
            let bw = self.demands[d].bandwidth;
            for &li in tree {
                let le = &self.ledges[li];
                u.edge_use[li] += 1;
                for end in [le.ends.0, le.ends.1] {
                    u.lsr_through[end] += bw;
                    u.lsr_degree[end] += 1;
                }
                if let Some(p) = plan.choice[li] {
                    for &l in &le.paths[p] {
                        u.link_load[l] += bw;
                    }
                }
            }
        }
        u
    }

    pub fn installed(&self, plan: &Plan, usage: &Usage, v: usize) -> bool {
        plan.extra[v] || usage.lsr_degree[v] > 0
    }

    pub fn evaluate(&self, plan: &Plan) -> Eval<C> {
        let usage = self.usage(plan);
        self.evaluate_usage(plan, &usage)
    }

    pub fn evaluate_usage(&self, plan: &Plan, usage: &Usage) -> Eval<C> {
        let mut cost = C::zero();
        let mut feasible = true;
        for (v, lsr) in self.lsrs.iter().enumerate() {
            if self.installed(plan, usage, v) {
                cost = cost + lsr.install;
            }
            if lsr.limit.is_some_and(|lim| usage.lsr_through[v] > lim) {
                feasible = false;
            }
        }
        for (l, link) in self.links.iter().enumerate() {
            let load = usage.link_load[l];
            if load == 0 {
                continue;
            }
            let m = link.modules(load);
            if m > link.max {
                feasible = false;
            }
            cost = cost + link.fixed + C::from_count(m) * link.module_cost;
        }
        Eval { cost, feasible }
    }

    /// Drops path choices of logical edges no tree uses.
    pub fn normalize(&self, plan: &mut Plan) {
        let mut used = vec![false; self.ledges.len()];
        for tree in &plan.trees {
            for &li in tree {
                used[li] = true;
            }
        }
        for (li, c) in plan.choice.iter_mut().enumerate() {
            if !used[li] {
                *c = None;
            }
        }
    }

    /// Extra cost of pushing `bw` more along path `p` of logical edge `li`.
    fn path_increment(&self, usage: &Usage, li: usize, p: usize, bw: u64) -> Option<C> {
        let mut total = C::zero();
        for &l in &self.ledges[li].paths[p] {
            let link = &self.links[l];
            let now = usage.link_load[l];
            let after = link.cost(now + bw)?;
            let before = link.cost(now)?;
            total = total + (after - before);
        }
        Some(total)
    }

    /// Cheapest admissible path for `li` under current usage, first index on ties.
    fn best_path(&self, usage: &Usage, li: usize, bw: u64) -> Option<(usize, C)> {
        let mut best: Option<(usize, C)> = None;
        for p in 0..self.ledges[li].paths.len() {
            if let Some(c) = self.path_increment(usage, li, p, bw) {
                if best.is_none_or(|(_, b)| c < b) {
                    best = Some((p, c));
                }
            }
        }
        best
    }

    /// Routes demand `d` (currently unrouted in `plan`) on marginal costs:
    /// logical edges are priced at the extra transport cost of their chosen
    /// (or cheapest free) path and LSRs at their install cost unless already
    /// installed. Retries without offending edges when the combined tree
    /// overruns a capacity. Returns `false` when no tree is found.
    pub fn route_demand(&self, plan: &mut Plan, d: usize, root: Option<usize>, forbidden_lsr: Option<usize>) -> bool {
        debug_assert!(plan.trees[d].is_empty());
        let bw = self.demands[d].bandwidth;
        let terminals: Vec<VertexId> = self.demands[d].terminals.iter().map(|&t| self.lsrs[t].vertex).collect();
        let root = root.map(|t| self.lsrs[t].vertex);
        let usage = self.usage(plan);
        let mut banned = vec![false; self.ledges.len()];

        for _ in 0..=self.ledges.len() {
            let length = |e: EdgeId| -> Option<C> {
                let li = *self.ledge_of.get(&e)?;
                let (a, b) = self.ledges[li].ends;
                if banned[li] || forbidden_lsr.is_some_and(|f| f == a || f == b) {
                    return None;
                }
                for end in [a, b] {
                    if self.lsrs[end].limit.is_some_and(|lim| usage.lsr_through[end] + bw > lim) {
                        return None;
                    }
                }
                match plan.choice[li] {
                    Some(p) => self.path_increment(&usage, li, p, bw),
                    None => self.best_path(&usage, li, bw).map(|(_, c)| c),
                }
            };
            let vertex_cost = |v: VertexId| -> C {
                let i = self.view.position(v).expect("logical vertex");
                if self.installed(plan, &usage, i) {
                    C::zero()
                } else {
                    self.lsrs[i].install
                }
            };
            let Ok(tree) = takahashi_matsuyama(&self.view, &terminals, root, length, vertex_cost) else {
                return false;
            };

            let mut attempt = plan.clone();
            let mut edges: Vec<usize> = tree.edges.iter().map(|e| self.ledge_of[e]).collect();
            edges.sort_unstable();
            for &li in &edges {
                if attempt.choice[li].is_none() {
                    attempt.choice[li] = self.best_path(&usage, li, bw).map(|(p, _)| p);
                }
            }
            attempt.trees[d] = edges.clone();
            let after = self.usage(&attempt);
            let offending: Vec<usize> = edges
                .iter()
                .copied()
                .filter(|&li| {
                    let le = &self.ledges[li];
                    let link_over = attempt.choice[li].is_some_and(|p| {
                        le.paths[p].iter().any(|&l| self.links[l].modules(after.link_load[l]) > self.links[l].max)
                    });
                    let lsr_over = [le.ends.0, le.ends.1]
                        .iter()
                        .any(|&v| self.lsrs[v].limit.is_some_and(|lim| after.lsr_through[v] > lim));
                    link_over || lsr_over
                })
                .collect();
            if offending.is_empty() {
                *plan = attempt;
                return true;
            }
            for li in offending {
                banned[li] = true;
            }
        }
        false
    }

    /// Canonical encoding used for lexicographic tie-breaking.
    pub fn encoding(&self, plan: &Plan) -> (Vec<Vec<EdgeId>>, Vec<(EdgeId, usize)>) {
        let trees = plan.trees.iter().map(|t| t.iter().map(|&li| self.ledges[li].edge).collect()).collect();
        let choices =
            plan.choice.iter().enumerate().filter_map(|(li, c)| c.map(|p| (self.ledges[li].edge, p))).collect();
        (trees, choices)
    }

    pub fn to_design(&self, plan: &Plan) -> Design<C> {
        let usage = self.usage(plan);
        let eval = self.evaluate_usage(plan, &usage);
        let mlg = self.mlg;
        let mut sel = Selection::default();
        let insert = |sel: &mut Selection, e: EdgeId| sel.insert_edge(mlg, e).expect("edge of this graph");

        for (v, lsr) in self.lsrs.iter().enumerate() {
            if self.installed(plan, &usage, v) {
                insert(&mut sel, lsr.mapping);
            }
        }
        let mut routes = Vec::with_capacity(self.demands.len());
        for (d, tree) in plan.trees.iter().enumerate() {
            let info = &self.demands[d];
            let mut logical_tree = BTreeSet::new();
            let mut path_choice = BTreeMap::new();
            for &li in tree {
                let le = &self.ledges[li];
                let p = plan.choice[li].expect("used edge has a path");
                logical_tree.insert(le.edge);
                path_choice.insert(le.edge, p);
                insert(&mut sel, le.edge);
                for &l in &le.paths[p] {
                    insert(&mut sel, self.links[l].edge);
                }
            }
            // flow layer: endpoints, their mappings, and projected tree edges
            let flow: Vec<(VertexId, usize)> = info
                .terminals
                .iter()
                .map(|&t| {
                    let name = &mlg.vertices()[self.lsrs[t].vertex.index()].name;
                    (mlg.find_vertex(info.layer, name).expect("flow endpoint"), t)
                })
                .collect();
            for &(fv, _) in &flow {
                let map = mlg
                    .incident(fv)
                    .iter()
                    .copied()
                    .find(|e| matches!(mlg.edges()[e.index()].kind, EdgeKind::InterLayer { .. }))
                    .expect("flow endpoint mapping");
                insert(&mut sel, map);
            }
            for x in 0..flow.len() {
                for y in x + 1..flow.len() {
                    let (a, b) = (self.lsrs[flow[x].1].vertex, self.lsrs[flow[y].1].vertex);
                    let in_tree = mlg.edge_between(a, b).is_some_and(|e| logical_tree.contains(&e));
                    if let (true, Some(fe)) = (in_tree, mlg.edge_between(flow[x].0, flow[y].0)) {
                        insert(&mut sel, fe);
                    }
                }
            }
            routes.push(MulticastRoute { demand_id: info.id.clone(), logical_tree, path_choice });
        }
        let dimensioning = self
            .links
            .iter()
            .enumerate()
            .filter(|&(l, _)| usage.link_load[l] > 0)
            .map(|(l, link)| (link.edge, link.modules(usage.link_load[l])))
            .collect();
        Design { selection: sel, routes, dimensioning, cost: eval.cost }
    }

    pub fn plan_from_design(&self, design: &Design<C>) -> Result<Plan, DesignError> {
        let mut plan = self.empty_plan();
        if design.routes.len() != self.demands.len() {
            return Err(DesignError::RouteCount { expected: self.demands.len(), found: design.routes.len() });
        }
        for (d, route) in design.routes.iter().enumerate() {
            if route.demand_id != self.demands[d].id {
                return Err(DesignError::MissingRoute(self.demands[d].id.clone()));
            }
            let mut tree = Vec::new();
            for e in &route.logical_tree {
                let &li = self.ledge_of.get(e).ok_or(DesignError::NotLogical(*e))?;
                let &p = route.path_choice.get(e).ok_or(DesignError::MissingPathChoice(*e))?;
                if p >= self.ledges[li].paths.len() {
                    return Err(DesignError::InvalidPathIndex { edge: *e, index: p });
                }
                match plan.choice[li] {
                    Some(q) if q != p => return Err(DesignError::InconsistentPathChoice(*e)),
                    _ => plan.choice[li] = Some(p),
                }
                tree.push(li);
            }
            tree.sort_unstable();
            plan.trees[d] = tree;
        }
        let usage = self.usage(&plan);
        for (v, lsr) in self.lsrs.iter().enumerate() {
            if usage.lsr_degree[v] == 0 && design.selection.chosen_vertices.contains(&lsr.vertex) {
                plan.extra[v] = true;
            }
        }
        Ok(plan)
    }
}
