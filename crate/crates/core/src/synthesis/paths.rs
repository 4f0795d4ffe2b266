//! Ranked enumeration of loop-free transport paths.
//!
//! Paths are ordered by `(total fixed cost, hop count, node-id sequence)`.
//! The enumeration is a best-first search over simple partial paths guided by
//! exact remaining distances, so complete paths surface in non-decreasing
//! `(cost, hops)` order; every path tied with the k-th is collected before the
//! final lexicographic sort, which keeps the cut exact under ties.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use thiserror::Error;

use crate::mlg::{LayerView, MultiLayerGraph, TransportPath, VertexId};
use crate::scalar::{Ordered, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PathError {
    #[error("path endpoints must differ (got {0} twice)")]
    SameEndpoints(VertexId),
    #[error("vertex {0} is not on the transport layer")]
    NotInLayer(VertexId),
}

type Key<C> = (Ordered<C>, usize);

fn add<C: Scalar>(a: Key<C>, b: Key<C>) -> Key<C> {
    (Ordered(a.0 .0 + b.0 .0), a.1 + b.1)
}

/// Exact `(cost, hops)` distance from every vertex to `target`.
fn distances_to<C: Scalar>(mlg: &MultiLayerGraph<C>, view: &LayerView, target: usize) -> Vec<Option<Key<C>>> {
    let n = view.vertices().len();
    let mut dist: Vec<Option<Key<C>>> = vec![None; n];
    let mut heap = BinaryHeap::new();
    dist[target] = Some((Ordered(C::zero()), 0));
    heap.push(Reverse(((Ordered(C::zero()), 0), target)));
    while let Some(Reverse((d, v))) = heap.pop() {
        if dist[v].is_some_and(|best| d > best) {
            continue;
        }
        for &(w, e) in view.adjacent(v) {
            let step = (Ordered(mlg.edges()[e.index()].weight), 1);
            let nd = add(d, step);
            if dist[w].is_none_or(|cur| nd < cur) {
                dist[w] = Some(nd);
                heap.push(Reverse((nd, w)));
            }
        }
    }
    dist
}

struct Partial<C> {
    f: Key<C>,
    g: Key<C>,
    seq: u64,
    vertices: Vec<usize>,
    edges: Vec<crate::mlg::EdgeId>,
}

impl<C: Scalar> PartialEq for Partial<C> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<C: Scalar> Eq for Partial<C> {}
impl<C: Scalar> PartialOrd for Partial<C> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<C: Scalar> Ord for Partial<C> {
    // min-heap on (f, seq)
    fn cmp(&self, other: &Self) -> Ordering {
        (other.f, other.seq).cmp(&(self.f, self.seq))
    }
}

/// Up to `k` simple transport paths from `s` to `t`, cheapest first.
/// Edge costs are the transport links' fixed costs. An empty result means `t`
/// is unreachable.
pub fn candidate_paths<C: Scalar>(
    mlg: &MultiLayerGraph<C>,
    transport: &LayerView,
    s: VertexId,
    t: VertexId,
    k: usize,
) -> Result<Vec<TransportPath>, PathError> {
    if s == t {
        return Err(PathError::SameEndpoints(s));
    }
    let si = transport.position(s).ok_or(PathError::NotInLayer(s))?;
    let ti = transport.position(t).ok_or(PathError::NotInLayer(t))?;
    if k == 0 {
        return Ok(Vec::new());
    }
    let h = distances_to(mlg, transport, ti);
    let Some(h0) = h[si] else {
        return Ok(Vec::new());
    };

    let mut found: Vec<(Key<C>, Vec<usize>, Vec<crate::mlg::EdgeId>)> = Vec::new();
    let mut heap = BinaryHeap::new();
    let mut seq = 0u64;
    let zero = (Ordered(C::zero()), 0);
    heap.push(Partial { f: h0, g: zero, seq, vertices: vec![si], edges: Vec::new() });

    while let Some(p) = heap.pop() {
        if found.len() >= k {
            let kth = kth_key(&found, k);
            if p.f > kth {
                break;
            }
        }
        let last = *p.vertices.last().unwrap();
        if last == ti {
            found.push((p.g, p.vertices, p.edges));
            continue;
        }
        for &(w, e) in transport.adjacent(last) {
            if p.vertices.contains(&w) {
                continue;
            }
            let Some(hw) = h[w] else { continue };
            let g = add(p.g, (Ordered(mlg.edges()[e.index()].weight), 1));
            let mut vertices = p.vertices.clone();
            vertices.push(w);
            let mut edges = p.edges.clone();
            edges.push(e);
            seq += 1;
            heap.push(Partial { f: add(g, hw), g, seq, vertices, edges });
        }
    }

    let name = |i: usize| mlg.vertices()[transport.vertex_at(i).index()].name.as_str();
    found.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.iter().map(|&i| name(i)).cmp(b.1.iter().map(|&i| name(i)))));
    found.truncate(k);
    Ok(found
        .into_iter()
        .map(|(_, vs, edges)| TransportPath { vertices: vs.into_iter().map(|i| transport.vertex_at(i)).collect(), edges })
        .collect())
}

fn kth_key<C: Scalar>(found: &[(Key<C>, Vec<usize>, Vec<crate::mlg::EdgeId>)], k: usize) -> Key<C> {
    let mut keys: Vec<Key<C>> = found.iter().map(|f| f.0).collect();
    keys.sort();
    keys[k - 1]
}

/// Hop distance between two transport vertices, `None` if disconnected.
pub fn hop_distance(transport: &LayerView, s: VertexId, t: VertexId) -> Option<usize> {
    let si = transport.position(s)?;
    let ti = transport.position(t)?;
    let mut dist = vec![usize::MAX; transport.vertices().len()];
    dist[si] = 0;
    let mut queue = std::collections::VecDeque::from([si]);
    while let Some(v) = queue.pop_front() {
        if v == ti {
            return Some(dist[v]);
        }
        for &(w, _) in transport.adjacent(v) {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mlg::{layer_subgraph, LayerId, MlgBuilder, ModuleSpec, VertexKind};

    fn graph(names: &[&str], links: &[(usize, usize, u64)]) -> (MultiLayerGraph<u64>, LayerView, Vec<VertexId>) {
        let mut b = MlgBuilder::new();
        let l0 = b.add_layer("transport");
        let vs: Vec<VertexId> = names.iter().map(|n| b.add_vertex(l0, *n, VertexKind::TransportNode, 0, None)).collect();
        for &(x, y, c) in links {
            b.add_transport_link(vs[x], vs[y], c, ModuleSpec { size: 1, cost: 0, max: 1 });
        }
        let mlg = b.build();
        let view = layer_subgraph(&mlg, LayerId::TRANSPORT).unwrap();
        (mlg, view, vs)
    }

    fn names(mlg: &MultiLayerGraph<u64>, p: &TransportPath) -> Vec<String> {
        p.vertices.iter().map(|v| mlg.vertices()[v.index()].name.clone()).collect()
    }

    /// Every simple path by DFS, sorted by the ranking key.
    fn brute(mlg: &MultiLayerGraph<u64>, view: &LayerView, s: VertexId, t: VertexId) -> Vec<Vec<String>> {
        fn go(
            mlg: &MultiLayerGraph<u64>,
            view: &LayerView,
            t: VertexId,
            path: &mut Vec<VertexId>,
            cost: u64,
            out: &mut Vec<(u64, usize, Vec<String>)>,
        ) {
            let v = *path.last().unwrap();
            if v == t {
                let ns = path.iter().map(|v| mlg.vertices()[v.index()].name.clone()).collect();
                out.push((cost, path.len() - 1, ns));
                return;
            }
            let next: Vec<(VertexId, u64)> =
                view.neighbours(v).map(|(w, e)| (w, mlg.edges()[e.index()].weight)).collect();
            for (w, c) in next {
                if !path.contains(&w) {
                    path.push(w);
                    go(mlg, view, t, path, cost + c, out);
                    path.pop();
                }
            }
        }
        let mut out = Vec::new();
        go(mlg, view, t, &mut vec![s], 0, &mut out);
        out.sort();
        out.into_iter().map(|x| x.2).collect()
    }

    #[test]
    fn path_graph_has_one_path() {
        let (mlg, view, v) = graph(&["A", "B", "C"], &[(0, 1, 1), (1, 2, 1)]);
        let paths = candidate_paths(&mlg, &view, v[0], v[2], 3).unwrap();
        assert_eq!(paths.len(), 1);
        assert_eq!(names(&mlg, &paths[0]), ["A", "B", "C"]);
    }

    #[test]
    fn same_endpoints_rejected() {
        let (mlg, view, v) = graph(&["A", "B"], &[(0, 1, 1)]);
        assert_eq!(candidate_paths(&mlg, &view, v[0], v[0], 1), Err(PathError::SameEndpoints(v[0])));
    }

    #[test]
    fn four_cycle_opposite_corners_tie_broken_lexicographically() {
        // A-B-C-D-A, unit costs
        let (mlg, view, v) = graph(&["A", "B", "C", "D"], &[(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 0, 1)]);
        let expected = brute(&mlg, &view, v[0], v[2]);
        assert_eq!(expected, vec![vec!["A", "B", "C"], vec!["A", "D", "C"]]);
        let got: Vec<_> = candidate_paths(&mlg, &view, v[0], v[2], 2).unwrap().iter().map(|p| names(&mlg, p)).collect();
        assert_eq!(got, expected);
        let one: Vec<_> = candidate_paths(&mlg, &view, v[0], v[2], 1).unwrap().iter().map(|p| names(&mlg, p)).collect();
        assert_eq!(one, vec![vec!["A", "B", "C"]]);
    }

    #[test]
    fn fixed_cost_ranks_before_hops() {
        // direct A-C costs 10, A-B-C costs 2
        let (mlg, view, v) = graph(&["A", "B", "C"], &[(0, 2, 10), (0, 1, 1), (1, 2, 1)]);
        let got: Vec<_> = candidate_paths(&mlg, &view, v[0], v[2], 2).unwrap().iter().map(|p| names(&mlg, p)).collect();
        assert_eq!(got, vec![vec!["A", "B", "C"], vec!["A", "C"]]);
    }

    #[test]
    fn unreachable_gives_empty() {
        let (mlg, view, v) = graph(&["A", "B", "C"], &[(0, 1, 1)]);
        assert!(candidate_paths(&mlg, &view, v[0], v[2], 2).unwrap().is_empty());
    }

    #[test]
    fn matches_brute_force_on_dense_graph() {
        let links = [(0, 1, 2), (0, 2, 1), (1, 2, 1), (1, 3, 3), (2, 3, 2), (2, 4, 4), (3, 4, 1), (0, 4, 6), (1, 4, 2)];
        let (mlg, view, v) = graph(&["e", "d", "c", "b", "a"], &links);
        for s in 0..5 {
            for t in 0..5 {
                if s == t {
                    continue;
                }
                let all = brute(&mlg, &view, v[s], v[t]);
                for k in 1..=all.len() + 1 {
                    let got: Vec<_> =
                        candidate_paths(&mlg, &view, v[s], v[t], k).unwrap().iter().map(|p| names(&mlg, p)).collect();
                    assert_eq!(got, all[..k.min(all.len())].to_vec(), "s={s} t={t} k={k}");
                }
            }
        }
    }

    #[test]
    fn hop_distance_on_ring() {
        let (_, view, v) = graph(&["a", "b", "c", "d", "e"], &[(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 4, 1), (4, 0, 1)]);
        assert_eq!(hop_distance(&view, v[0], v[2]), Some(2));
        assert_eq!(hop_distance(&view, v[0], v[3]), Some(2));
        assert_eq!(hop_distance(&view, v[0], v[0]), Some(0));
    }
}
