//! Design reports: structured (JSON), human-readable text, and DOT.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::mlg::{LayerId, MultiLayerGraph};
use crate::optimizer::{audit_design, Design, DesignError, SolverMode};
use crate::scalar::Scalar;
use crate::synthesis::Instance;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Text,
    Structured,
    Dot,
}

/// How the design was obtained.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportMeta<C> {
    pub mode: SolverMode,
    pub rng_seed: u64,
    pub local_search_budget: u64,
    /// Optimal cost, when the exact search ran.
    pub exact_cost: Option<C>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverInfo {
    pub mode: SolverMode,
    pub rng_seed: u64,
    pub local_search_budget: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LsrReport<C> {
    pub node: String,
    pub install_cost: C,
    pub throughput: u64,
    pub throughput_limit: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogicalLinkReport {
    pub a: String,
    pub b: String,
    pub path_index: usize,
    pub transport_path: Vec<String>,
    pub load: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RouteReport {
    pub demand: String,
    pub source: String,
    pub sinks: Vec<String>,
    pub bandwidth: u64,
    pub tree: Vec<[String; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkReport<C> {
    pub a: String,
    pub b: String,
    pub modules: u64,
    pub module_size: u64,
    pub max_modules: u64,
    pub capacity: u64,
    pub load: u64,
    pub utilization_pct: f64,
    pub fixed_cost: C,
    pub module_cost: C,
    pub cost: C,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostBreakdown<C> {
    pub equipment: C,
    pub transport_fixed: C,
    pub transport_modules: C,
    pub transport: C,
    pub total: C,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GapReport<C> {
    pub exact_cost: C,
    pub gap_pct: f64,
}

/// Everything the design decides, on both network levels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignReport<C> {
    pub instance: String,
    pub solver: SolverInfo,
    pub installed_lsrs: Vec<LsrReport<C>>,
    pub logical_topology: Vec<LogicalLinkReport>,
    pub routes: Vec<RouteReport>,
    pub links: Vec<LinkReport<C>>,
    pub cost: CostBreakdown<C>,
    pub optimality_gap: Option<GapReport<C>>,
}

impl<C: Scalar> CostBreakdown<C> {
    pub fn is_consistent(&self) -> bool {
        self.transport == self.transport_fixed + self.transport_modules && self.total == self.equipment + self.transport
    }
}

pub fn build_report<C: Scalar>(
    mlg: &MultiLayerGraph<C>,
    instance: &Instance<C>,
    design: &Design<C>,
    meta: &ReportMeta<C>,
) -> Result<DesignReport<C>, DesignError> {
    let audit = audit_design(mlg, instance, design)?;
    let name = |v: crate::mlg::VertexId| mlg.vertices()[v.index()].name.clone();

    let mut equipment = C::zero();
    let mut installed_lsrs = Vec::new();
    for &v in &design.selection.chosen_vertices {
        let vertex = &mlg.vertices()[v.index()];
        if vertex.layer == LayerId::LOGICAL {
            equipment = equipment + vertex.node_cost;
            installed_lsrs.push(LsrReport {
                node: vertex.name.clone(),
                install_cost: vertex.node_cost,
                throughput: audit.load.lsr.get(&v).copied().unwrap_or(0),
                throughput_limit: vertex.throughput_limit,
            });
        }
    }

    let logical_topology = design
        .path_choices()
        .into_iter()
        .map(|(e, p)| {
            let edge = &mlg.edges()[e.index()];
            LogicalLinkReport {
                a: name(edge.endpoints.0),
                b: name(edge.endpoints.1),
                path_index: p,
                transport_path: edge.candidate_paths[p].vertices.iter().map(|&v| name(v)).collect(),
                load: audit.load.logical.get(&e).copied().unwrap_or(0),
            }
        })
        .collect();

    let routes = instance
        .demands
        .iter()
        .zip(&design.routes)
        .map(|(d, r)| RouteReport {
            demand: d.id.clone(),
            source: d.source.clone(),
            sinks: d.sinks.clone(),
            bandwidth: d.bandwidth,
            tree: r
                .logical_tree
                .iter()
                .map(|&e| {
                    let (a, b) = mlg.edges()[e.index()].endpoints;
                    [name(a), name(b)]
                })
                .collect(),
        })
        .collect();

    let mut transport_fixed = C::zero();
    let mut transport_modules = C::zero();
    let mut links = Vec::new();
    for &e in &design.selection.chosen_edges {
        let edge = &mlg.edges()[e.index()];
        let Some(spec) = edge.modules else { continue };
        let modules = design.dimensioning.get(&e).copied().unwrap_or(0);
        let load = audit.load.transport.get(&e).copied().unwrap_or(0);
        let capacity = modules * spec.size;
        let module_total = C::from_count(modules) * spec.cost;
        transport_fixed = transport_fixed + edge.weight;
        transport_modules = transport_modules + module_total;
        links.push(LinkReport {
            a: name(edge.endpoints.0),
            b: name(edge.endpoints.1),
            modules,
            module_size: spec.size,
            max_modules: spec.max,
            capacity,
            load,
            utilization_pct: if capacity == 0 { 0.0 } else { load as f64 * 100.0 / capacity as f64 },
            fixed_cost: edge.weight,
            module_cost: spec.cost,
            cost: edge.weight + module_total,
        });
    }
    let transport = transport_fixed + transport_modules;
    let cost = CostBreakdown { equipment, transport_fixed, transport_modules, transport, total: equipment + transport };

    let optimality_gap = meta.exact_cost.map(|exact| {
        let gap_pct = if exact.is_zero() {
            0.0
        } else {
            (design.cost - exact).to_f64() * 100.0 / exact.to_f64()
        };
        GapReport { exact_cost: exact, gap_pct }
    });

    Ok(DesignReport {
        instance: instance.name.clone(),
        solver: SolverInfo { mode: meta.mode, rng_seed: meta.rng_seed, local_search_budget: meta.local_search_budget },
        installed_lsrs,
        logical_topology,
        routes,
        links,
        cost,
        optimality_gap,
    })
}

/// Renders the design in the requested format.
pub fn emit_report<C: Scalar + Serialize>(
    mlg: &MultiLayerGraph<C>,
    instance: &Instance<C>,
    design: &Design<C>,
    meta: &ReportMeta<C>,
    format: ReportFormat,
) -> Result<String, DesignError> {
    let report = build_report(mlg, instance, design, meta)?;
    Ok(match format {
        ReportFormat::Structured => {
            let mut s = serde_json::to_string_pretty(&report).expect("report serializes");
            s.push('\n');
            s
        }
        ReportFormat::Text => render_text(&report),
        ReportFormat::Dot => super::dot::render_dot(mlg, instance, design),
    })
}

pub fn parse_report<C: Scalar + DeserializeOwned>(bytes: &[u8]) -> Result<DesignReport<C>, serde_json::Error> {
    serde_json::from_slice(bytes)
}

fn render_text<C: Scalar>(r: &DesignReport<C>) -> String {
    let mut out = String::new();
    let w = &mut out;
    let _ = writeln!(w, "design for {} (mode {}, seed {})", r.instance, r.solver.mode, r.solver.rng_seed);
    let _ = writeln!(w, "\ntotal cost {}", r.cost.total);
    let _ = writeln!(w, "  equipment {}", r.cost.equipment);
    let _ = writeln!(
        w,
        "  transport {} (fixed {}, modules {})",
        r.cost.transport, r.cost.transport_fixed, r.cost.transport_modules
    );
    if let Some(g) = &r.optimality_gap {
        let _ = writeln!(w, "  optimum {} (gap {:.2}%)", g.exact_cost, g.gap_pct);
    }

    let _ = writeln!(w, "\nLSR nodes ({})", r.installed_lsrs.len());
    for l in &r.installed_lsrs {
        let limit = l.throughput_limit.map_or_else(|| "unbounded".to_string(), |x| x.to_string());
        let _ = writeln!(w, "  {:<12} cost {:<8} throughput {} / {}", l.node, l.install_cost, l.throughput, limit);
    }

    let _ = writeln!(w, "\nMPLS links ({})", r.logical_topology.len());
    for l in &r.logical_topology {
        let _ = writeln!(w, "  {} - {}  via {}  load {}", l.a, l.b, l.transport_path.join(" > "), l.load);
    }

    let _ = writeln!(w, "\nmulticast routes ({})", r.routes.len());
    for route in &r.routes {
        let tree: Vec<String> = route.tree.iter().map(|[a, b]| format!("{a}-{b}")).collect();
        let _ = writeln!(
            w,
            "  {} [{} -> {}] bw {}: {}",
            route.demand,
            route.source,
            route.sinks.join(","),
            route.bandwidth,
            tree.join(" ")
        );
    }

    let _ = writeln!(w, "\ntransport links ({})", r.links.len());
    for l in &r.links {
        let _ = writeln!(
            w,
            "  {} - {}  {}x{} (max {})  load {}/{} ({:.1}%)  cost {}",
            l.a, l.b, l.modules, l.module_size, l.max_modules, l.load, l.capacity, l.utilization_pct, l.cost
        );
    }
    out
}

/// Per-mode costs for a comparison table.
pub fn render_gap_table<C: Scalar>(rows: &BTreeMap<SolverMode, Option<C>>) -> String {
    let exact = rows.get(&SolverMode::ExactBruteForce).copied().flatten();
    let mut out = String::from("mode     cost        gap\n");
    for mode in [SolverMode::Greedy, SolverMode::GreedyPlusLocalSearch, SolverMode::ExactBruteForce] {
        let Some(entry) = rows.get(&mode) else { continue };
        let cost = entry.map_or_else(|| "-".to_string(), |c| c.to_string());
        let gap = match (entry, exact) {
            (Some(c), Some(x)) if !x.is_zero() => format!("{:.2}%", (*c - x).to_f64() * 100.0 / x.to_f64()),
            (Some(_), Some(_)) => "0.00%".to_string(),
            _ => "-".to_string(),
        };
        let _ = writeln!(out, "{:<8} {:<11} {}", mode.name(), cost, gap);
    }
    out
}
