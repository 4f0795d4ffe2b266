//! Random desk-scale instances and a straight-line reference optimizer that
//! works from the instance alone, sharing no code with the library solvers.

#![allow(dead_code)]

use std::collections::{BTreeSet, VecDeque};

use mlg_core::optimizer::SolverConfig;
use mlg_core::synthesis::{CandidatePolicy, Demand, LogicalEdgeRule, TransportLink, TransportNode};
use mlg_core::Instance;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn fixture(name: &str) -> Instance {
    let path = format!("{}/fixtures/{name}.toml", env!("CARGO_MANIFEST_DIR"));
    mlg_core::io::parse_instance(&std::fs::read(path).unwrap()).unwrap()
}

pub fn fixture_text(name: &str) -> String {
    std::fs::read_to_string(format!("{}/fixtures/{name}.toml", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

/// At most 6 nodes, 4 LSR candidates, 3 demands and k_paths 2.
pub fn random_instance(seed: u64) -> Instance {
    random_instance_sized(seed, 6, 4)
}

pub fn random_instance_sized(seed: u64, max_nodes: usize, max_lsrs: usize) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(3..=max_nodes);
    let lsr_count = rng.random_range(2..=max_lsrs.min(n));
    let names: Vec<String> = (0..n).map(|i| format!("n{i}")).collect();
    let mut lsr: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        lsr.swap(i, rng.random_range(0..=i));
    }
    lsr.truncate(lsr_count);
    lsr.sort_unstable();

    let transport_nodes = names
        .iter()
        .enumerate()
        .map(|(i, id)| {
            let candidate = lsr.contains(&i);
            TransportNode {
                id: id.clone(),
                lsr_candidate: candidate,
                lsr_install_cost: if candidate { rng.random_range(1..30) } else { 0 },
                throughput_limit: (candidate && rng.random_bool(0.2)).then(|| rng.random_range(10..40)),
            }
        })
        .collect();

    let mut pairs = BTreeSet::new();
    for i in 1..n {
        pairs.insert((rng.random_range(0..i), i));
    }
    for _ in 0..rng.random_range(0..=n) {
        let a = rng.random_range(0..n);
        let b = rng.random_range(0..n);
        if a != b {
            pairs.insert((a.min(b), a.max(b)));
        }
    }
    let transport_links = pairs
        .into_iter()
        .map(|(a, b)| TransportLink {
            a: names[a].clone(),
            b: names[b].clone(),
            fixed_cost: rng.random_range(0..12),
            module_size: [4, 5, 8, 10][rng.random_range(0..4)],
            module_cost: rng.random_range(1..6),
            max_modules: rng.random_range(1..=3),
        })
        .collect();

    let demand_count = rng.random_range(1..=3);
    let demands = (0..demand_count)
        .map(|d| {
            let s = lsr[rng.random_range(0..lsr.len())];
            let others: Vec<usize> = lsr.iter().copied().filter(|&x| x != s).collect();
            let sink_count = rng.random_range(1..=others.len().min(2));
            let mut sinks: Vec<usize> = Vec::new();
            while sinks.len() < sink_count {
                let t = others[rng.random_range(0..others.len())];
                if !sinks.contains(&t) {
                    sinks.push(t);
                }
            }
            Demand {
                id: format!("d{d}"),
                source: names[s].clone(),
                sinks: sinks.into_iter().map(|t| names[t].clone()).collect(),
                bandwidth: rng.random_range(1..10),
            }
        })
        .collect();

    let logical_edges = if rng.random_bool(0.25) {
        LogicalEdgeRule::DistanceLimited { hop_bound: rng.random_range(1..=2) }
    } else {
        LogicalEdgeRule::FullMesh
    };
    Instance {
        name: format!("random-{seed}"),
        transport_nodes,
        transport_links,
        demands,
        policy: CandidatePolicy { k_paths: rng.random_range(1..=2), max_logical_degree: None, logical_edges },
        solver: SolverConfig { rng_seed: seed, ..SolverConfig::default() },
    }
}

struct Net {
    names: Vec<String>,
    adj: Vec<Vec<(usize, usize)>>,
    links: Vec<(u64, u64, u64, u64)>,
}

fn net(inst: &Instance) -> Net {
    let names: Vec<String> = inst.transport_nodes.iter().map(|n| n.id.clone()).collect();
    let idx = |s: &str| names.iter().position(|n| n == s).unwrap();
    let mut adj = vec![Vec::new(); names.len()];
    let mut links = Vec::new();
    for (l, link) in inst.transport_links.iter().enumerate() {
        let (a, b) = (idx(&link.a), idx(&link.b));
        adj[a].push((b, l));
        adj[b].push((a, l));
        links.push((link.fixed_cost, link.module_size, link.module_cost, link.max_modules));
    }
    Net { names, adj, links }
}

/// Every simple path from `s` to `t`, as (links, nodes).
fn all_simple_paths(net: &Net, s: usize, t: usize) -> Vec<(Vec<usize>, Vec<usize>)> {
    fn dfs(net: &Net, v: usize, t: usize, nodes: &mut Vec<usize>, links: &mut Vec<usize>, out: &mut Vec<(Vec<usize>, Vec<usize>)>) {
        if v == t {
            out.push((links.clone(), nodes.clone()));
            return;
        }
        for &(w, l) in &net.adj[v] {
            if !nodes.contains(&w) {
                nodes.push(w);
                links.push(l);
                dfs(net, w, t, nodes, links, out);
                nodes.pop();
                links.pop();
            }
        }
    }
    let mut out = Vec::new();
    dfs(net, s, t, &mut vec![s], &mut Vec::new(), &mut out);
    out
}

/// The `k` best paths ranked by (fixed cost, hops, node names).
fn k_paths(net: &Net, s: usize, t: usize, k: usize) -> Vec<Vec<usize>> {
    let mut paths: Vec<(u64, usize, Vec<String>, Vec<usize>)> = all_simple_paths(net, s, t)
        .into_iter()
        .map(|(links, nodes)| {
            let cost = links.iter().map(|&l| net.links[l].0).sum();
            (cost, links.len(), nodes.iter().map(|&v| net.names[v].clone()).collect(), links)
        })
        .collect();
    paths.sort();
    paths.into_iter().take(k).map(|p| p.3).collect()
}

fn hops(net: &Net, s: usize, t: usize) -> Option<usize> {
    let mut dist = vec![usize::MAX; net.names.len()];
    dist[s] = 0;
    let mut q = VecDeque::from([s]);
    while let Some(v) = q.pop_front() {
        for &(w, _) in &net.adj[v] {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                q.push_back(w);
            }
        }
    }
    (dist[t] != usize::MAX).then_some(dist[t])
}

/// Is the edge set (over LSR indices) a tree containing every terminal?
fn spans_as_tree(edges: &[(usize, usize)], terminals: &[usize]) -> bool {
    let mut verts: BTreeSet<usize> = terminals.iter().copied().collect();
    for &(a, b) in edges {
        verts.insert(a);
        verts.insert(b);
    }
    if edges.len() + 1 != verts.len() {
        return false;
    }
    let mut seen = BTreeSet::from([terminals[0]]);
    let mut stack = vec![terminals[0]];
    while let Some(v) = stack.pop() {
        for &(a, b) in edges {
            for (x, y) in [(a, b), (b, a)] {
                if x == v && seen.insert(y) {
                    stack.push(y);
                }
            }
        }
    }
    seen.len() == verts.len()
}

/// Endpoint pair and candidate transport paths.
type LogicalEdge = ((usize, usize), Vec<Vec<usize>>);

/// Minimum design cost over the candidate space, by direct enumeration of
/// LSR subsets, per-demand edge subsets and path choices. `None` when no
/// feasible design exists.
pub fn reference_optimum(inst: &Instance) -> Option<u64> {
    let net = net(inst);
    let lsr: Vec<usize> =
        inst.transport_nodes.iter().enumerate().filter(|(_, n)| n.lsr_candidate).map(|(i, _)| i).collect();
    let li = |name: &str| lsr.iter().position(|&v| net.names[v] == name).unwrap();

    // candidate logical edges with their paths
    let mut ledges: Vec<LogicalEdge> = Vec::new();
    for x in 0..lsr.len() {
        for y in x + 1..lsr.len() {
            let allowed = match inst.policy.logical_edges {
                LogicalEdgeRule::FullMesh => true,
                LogicalEdgeRule::DistanceLimited { hop_bound } => {
                    hops(&net, lsr[x], lsr[y]).is_some_and(|h| h <= hop_bound as usize)
                }
            };
            let paths = k_paths(&net, lsr[x], lsr[y], inst.policy.k_paths as usize);
            if allowed && !paths.is_empty() {
                ledges.push(((x, y), paths));
            }
        }
    }
    let demands: Vec<(Vec<usize>, u64)> = inst
        .demands
        .iter()
        .map(|d| (d.endpoints().map(li).collect(), d.bandwidth))
        .collect();

    let mut best: Option<u64> = None;
    for subset in 0u32..(1 << lsr.len()) {
        let inside = |v: usize| subset & (1 << v) != 0;
        if demands.iter().any(|(t, _)| t.iter().any(|&v| !inside(v))) {
            continue;
        }
        let install: u64 = (0..lsr.len())
            .filter(|&v| inside(v))
            .map(|v| inst.transport_nodes[lsr[v]].lsr_install_cost)
            .sum();
        if best.is_some_and(|b| install >= b) {
            continue;
        }
        let usable: Vec<usize> = (0..ledges.len()).filter(|&e| inside(ledges[e].0 .0) && inside(ledges[e].0 .1)).collect();
        // every tree on usable edges per demand, as a bitmask over ledges
        let trees: Vec<Vec<u64>> = demands
            .iter()
            .map(|(terms, _)| {
                (0u64..(1 << usable.len()))
                    .filter_map(|m| {
                        let edges: Vec<(usize, usize)> =
                            (0..usable.len()).filter(|&i| m & (1 << i) != 0).map(|i| ledges[usable[i]].0).collect();
                        spans_as_tree(&edges, terms).then(|| {
                            (0..usable.len()).filter(|&i| m & (1 << i) != 0).fold(0u64, |acc, i| acc | 1 << usable[i])
                        })
                    })
                    .collect()
            })
            .collect();
        if trees.iter().any(Vec::is_empty) {
            continue;
        }
        let mut pick = vec![0usize; demands.len()];
        'combos: loop {
            let mut weight = vec![0u64; ledges.len()];
            let mut through = vec![0u64; lsr.len()];
            for (d, &t) in pick.iter().enumerate() {
                let bw = demands[d].1;
                for (e, w) in weight.iter_mut().enumerate() {
                    if trees[d][t] & (1 << e) != 0 {
                        *w += bw;
                        through[ledges[e].0 .0] += bw;
                        through[ledges[e].0 .1] += bw;
                    }
                }
            }
            let throughput_ok = (0..lsr.len()).all(|v| {
                inst.transport_nodes[lsr[v]].throughput_limit.is_none_or(|lim| through[v] <= lim)
            });
            if throughput_ok {
                let used: Vec<usize> = (0..ledges.len()).filter(|&e| weight[e] > 0).collect();
                let mut choice = vec![0usize; used.len()];
                loop {
                    let mut load = vec![0u64; net.links.len()];
                    for (i, &e) in used.iter().enumerate() {
                        for &l in &ledges[e].1[choice[i]] {
                            load[l] += weight[e];
                        }
                    }
                    let mut cost = install;
                    let mut ok = true;
                    for (l, &(fixed, size, module_cost, max)) in net.links.iter().enumerate() {
                        if load[l] > 0 {
                            let modules = load[l].div_ceil(size);
                            ok &= modules <= max;
                            cost += fixed + modules * module_cost;
                        }
                    }
                    if ok && best.is_none_or(|b| cost < b) {
                        best = Some(cost);
                    }
                    let mut i = 0;
                    while i < used.len() {
                        choice[i] += 1;
                        if choice[i] < ledges[used[i]].1.len() {
                            break;
                        }
                        choice[i] = 0;
                        i += 1;
                    }
                    if i == used.len() {
                        break;
                    }
                }
            }
            let mut d = 0;
            while d < pick.len() {
                pick[d] += 1;
                if pick[d] < trees[d].len() {
                    continue 'combos;
                }
                pick[d] = 0;
                d += 1;
            }
            break;
        }
    }
    best
}

/// Brute-force minimum Steiner tree cost on a small weighted graph given as
/// an edge list over vertices `0..n`.
pub fn steiner_optimum(edges: &[(usize, usize, u64)], terminals: &[usize]) -> Option<u64> {
    let mut best = None;
    for m in 1u64..(1 << edges.len()) {
        let chosen: Vec<(usize, usize)> =
            (0..edges.len()).filter(|&i| m & (1 << i) != 0).map(|i| (edges[i].0, edges[i].1)).collect();
        if spans_as_tree(&chosen, terminals) {
            let cost: u64 = (0..edges.len()).filter(|&i| m & (1 << i) != 0).map(|i| edges[i].2).sum();
            if best.is_none_or(|b| cost < b) {
                best = Some(cost);
            }
        }
    }
    best
}

/// All-pairs shortest path lengths (Floyd–Warshall).
pub fn shortest_paths(n: usize, edges: &[(usize, usize, u64)]) -> Vec<Vec<Option<u64>>> {
    let mut d = vec![vec![None; n]; n];
    for (v, row) in d.iter_mut().enumerate() {
        row[v] = Some(0);
    }
    for &(a, b, w) in edges {
        for (x, y) in [(a, b), (b, a)] {
            if d[x][y].is_none_or(|c| w < c) {
                d[x][y] = Some(w);
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if let (Some(a), Some(b)) = (d[i][k], d[k][j]) {
                    if d[i][j].is_none_or(|c| a + b < c) {
                        d[i][j] = Some(a + b);
                    }
                }
            }
        }
    }
    d
}
