use std::fmt::Write as _;

use crate::mlg::{LayerId, MultiLayerGraph};
use crate::optimizer::Design;
use crate::scalar::Scalar;
use crate::synthesis::Instance;

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Two clusters: every transport node and link, and every installed LSR with
/// the logical links in use. Each LSR is tied to its transport node by a
/// dashed edge.
pub fn render_dot<C: Scalar>(mlg: &MultiLayerGraph<C>, instance: &Instance<C>, design: &Design<C>) -> String {
    let sel = &design.selection;
    let choices = design.path_choices();
    let t = |name: &str| quote(&format!("t:{name}"));
    let m = |name: &str| quote(&format!("m:{name}"));
    let name = |v: crate::mlg::VertexId| mlg.vertices()[v.index()].name.as_str();

    let mut out = String::new();
    let _ = writeln!(out, "graph {} {{", quote(&instance.name));
    let _ = writeln!(out, "  node [shape=circle];");

    let _ = writeln!(out, "  subgraph cluster_transport {{");
    let _ = writeln!(out, "    label=\"transport\";");
    for v in mlg.vertices_on(LayerId::TRANSPORT) {
        let _ = writeln!(out, "    {} [label={}];", t(&v.name), quote(&v.name));
    }
    for e in mlg.edges_on(LayerId::TRANSPORT) {
        let (a, b) = (name(e.endpoints.0), name(e.endpoints.1));
        match design.dimensioning.get(&e.id) {
            Some(&modules) if sel.chosen_edges.contains(&e.id) => {
                let size = e.modules.map_or(0, |s| s.size);
                let _ = writeln!(out, "    {} -- {} [penwidth=2, label=\"{modules}x{size}\"];", t(a), t(b));
            }
            _ => {
                let _ = writeln!(out, "    {} -- {} [color=gray];", t(a), t(b));
            }
        }
    }
    let _ = writeln!(out, "  }}");

    let lsrs: Vec<_> =
        mlg.vertices_on(LayerId::LOGICAL).filter(|v| sel.chosen_vertices.contains(&v.id)).collect();
    let _ = writeln!(out, "  subgraph cluster_mpls {{");
    let _ = writeln!(out, "    label=\"mpls\";");
    for v in &lsrs {
        let _ = writeln!(out, "    {} [label={}, shape=box];", m(&v.name), quote(&v.name));
    }
    for (e, p) in &choices {
        let edge = &mlg.edges()[e.index()];
        let (a, b) = (name(edge.endpoints.0), name(edge.endpoints.1));
        let _ = writeln!(out, "    {} -- {} [label=\"p{p}\"];", m(a), m(b));
    }
    let _ = writeln!(out, "  }}");

    for v in &lsrs {
        let _ = writeln!(out, "  {} -- {} [style=dashed];", m(&v.name), t(&v.name));
    }
    let _ = writeln!(out, "}}");
    out
}
