//! Exhaustive search over the candidate space of small instances.
//!
//! For every demand all logical trees that span its endpoints and have only
//! endpoints as leaves are enumerated (a tree with any other leaf is dominated:
//! pruning it lowers load and cost). Every combination of one tree per demand
//! is then paired with every path choice for the logical edges it uses. LSRs
//! are installed exactly where trees touch them and links are dimensioned
//! minimally, so this covers every non-dominated design.

use std::fmt;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::mlg::MultiLayerGraph;
use crate::scalar::Scalar;
use crate::synthesis::Instance;

use super::problem::{Plan, Problem};
use super::{find_certificate, Design, InfeasibilityCertificate, SolveError};

#[derive(Debug, Clone, PartialEq)]
pub struct ExactLimits {
    pub max_lsr_candidates: usize,
    pub max_demands: usize,
    pub max_k_paths: usize,
    /// Cap on enumerated trees plus evaluated path assignments.
    pub max_evaluations: u64,
    pub time_limit: Option<f64>,
}

impl Default for ExactLimits {
    fn default() -> Self {
        ExactLimits { max_lsr_candidates: 10, max_demands: 4, max_k_paths: 3, max_evaluations: 50_000_000, time_limit: None }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SizeReport {
    pub lsr_candidates: usize,
    pub demands: usize,
    pub k_paths: usize,
    pub logical_edges: usize,
    pub evaluations: u64,
    pub reason: String,
}

impl fmt::Display for SizeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} ({} LSR candidates, {} demands, k_paths {}, {} logical edges, {} evaluations)",
            self.reason, self.lsr_candidates, self.demands, self.k_paths, self.logical_edges, self.evaluations
        )
    }
}

struct Tree {
    edges: Vec<usize>,
    verts: u16,
}

struct Counter {
    spent: u64,
    cap: u64,
    deadline: Option<Instant>,
}

#[derive(Debug)]
enum Abort {
    Evaluations,
    Time,
}

impl Counter {
    fn tick(&mut self) -> Result<(), Abort> {
        self.spent += 1;
        if self.spent > self.cap {
            return Err(Abort::Evaluations);
        }
        if self.spent.is_multiple_of(4096) && self.deadline.is_some_and(|d| Instant::now() >= d) {
            return Err(Abort::Time);
        }
        Ok(())
    }
}

/// All trees containing `terminals` whose leaves are all terminals.
fn enumerate_trees<C: Scalar>(problem: &Problem<'_, C>, terminals: &[usize], counter: &mut Counter) -> Result<Vec<Tree>, Abort> {
    let n = problem.lsrs.len();
    let mut adj = vec![Vec::new(); n];
    for (li, le) in problem.ledges.iter().enumerate() {
        adj[le.ends.0].push((le.ends.1, li));
        adj[le.ends.1].push((le.ends.0, li));
    }
    let term_mask: u16 = terminals.iter().fold(0, |m, &t| m | 1 << t);
    let root = terminals[0];
    let frontier: Vec<(usize, usize)> = adj[root].clone();
    let mut out = Vec::new();
    let mut ctx = TreeCtx { problem, adj: &adj, term_mask, out: &mut out, counter };
    ctx.grow(1 << root, &mut Vec::new(), frontier, 0)?;
    Ok(out)
}

struct TreeCtx<'a, 'p, C> {
    problem: &'a Problem<'p, C>,
    adj: &'a [Vec<(usize, usize)>],
    term_mask: u16,
    out: &'a mut Vec<Tree>,
    counter: &'a mut Counter,
}

impl<C: Scalar> TreeCtx<'_, '_, C> {
    /// Include/exclude branching on the first frontier edge; each subtree
    /// containing the root is produced exactly once.
    fn grow(&mut self, verts: u16, edges: &mut Vec<usize>, frontier: Vec<(usize, usize)>, excluded: u64) -> Result<(), Abort> {
        self.counter.tick()?;
        let Some((&(v, e), rest)) = frontier.split_first() else {
            if verts & self.term_mask == self.term_mask && self.leaves_are_terminals(edges) {
                let mut sorted = edges.clone();
                sorted.sort_unstable();
                self.out.push(Tree { edges: sorted, verts });
            }
            return Ok(());
        };
        self.grow(verts, edges, rest.to_vec(), excluded | 1 << e)?;

        let mut next: Vec<(usize, usize)> = rest.iter().copied().filter(|&(w, _)| w != v).collect();
        for &(w, f) in &self.adj[v] {
            if verts & (1 << w) == 0 && excluded & (1 << f) == 0 {
                next.push((w, f));
            }
        }
        edges.push(e);
        let res = self.grow(verts | 1 << v, edges, next, excluded);
        edges.pop();
        res
    }

    fn leaves_are_terminals(&self, edges: &[usize]) -> bool {
        let mut degree = [0u8; 16];
        for &li in edges {
            let (a, b) = self.problem.ledges[li].ends;
            degree[a] += 1;
            degree[b] += 1;
        }
        (0..self.problem.lsrs.len()).all(|v| degree[v] != 1 || self.term_mask & (1 << v) != 0)
    }
}

/// Globally minimal design over the candidate space of `mlg`, ties broken by
/// the lexicographically smallest (trees, path choices) encoding. Refuses
/// instances beyond `limits`.
pub fn exact_bruteforce<C: Scalar>(
    mlg: &MultiLayerGraph<C>,
    instance: &Instance<C>,
    limits: &ExactLimits,
) -> Result<Design<C>, SolveError> {
    let problem = Problem::new(mlg, instance)?;
    let k = problem.ledges.iter().map(|e| e.paths.len()).max().unwrap_or(0).max(instance.policy.k_paths as usize);
    let mut report = SizeReport {
        lsr_candidates: problem.lsrs.len(),
        demands: problem.demands.len(),
        k_paths: k,
        logical_edges: problem.ledges.len(),
        evaluations: 0,
        reason: String::new(),
    };
    let refuse = |mut report: SizeReport, reason: &str| {
        report.reason = reason.to_string();
        Err(SolveError::LimitsExceeded(report))
    };
    if problem.lsrs.len() > limits.max_lsr_candidates.min(16) {
        return refuse(report, "too many LSR candidates");
    }
    if problem.demands.len() > limits.max_demands {
        return refuse(report, "too many demands");
    }
    if instance.policy.k_paths as usize > limits.max_k_paths {
        return refuse(report, "k_paths too large");
    }
    if problem.ledges.len() > 64 {
        return refuse(report, "too many logical edges");
    }

    let mut counter = Counter {
        spent: 0,
        cap: limits.max_evaluations,
        deadline: limits.time_limit.map(|s| Instant::now() + Duration::from_secs_f64(s.max(0.0))),
    };
    let abort_reason = |a: Abort| match a {
        Abort::Evaluations => "enumeration exceeds the evaluation cap",
        Abort::Time => "time limit reached",
    };

    let mut trees = Vec::with_capacity(problem.demands.len());
    for d in &problem.demands {
        match enumerate_trees(&problem, &d.terminals, &mut counter) {
            Ok(t) if t.is_empty() => {
                return Err(SolveError::Infeasible(InfeasibilityCertificate::DemandUnroutable { demand: d.id.clone() }))
            }
            Ok(t) => trees.push(t),
            Err(a) => {
                report.evaluations = counter.spent;
                return refuse(report, abort_reason(a));
            }
        }
    }
    log::debug!(
        "exact: tree counts {:?}",
        trees.iter().map(Vec::len).collect::<Vec<_>>()
    );

    let mut search = Search {
        problem: &problem,
        trees: &trees,
        pick: vec![0; trees.len()],
        best: None,
        counter: &mut counter,
    };
    if let Err(a) = search.combine(0, 0) {
        report.evaluations = search.counter.spent;
        return refuse(report, abort_reason(a));
    }
    let spent = search.counter.spent;
    match search.best.take() {
        Some((cost, plan)) => {
            log::debug!("exact optimum {cost} after {spent} evaluations");
            Ok(problem.to_design(&plan))
        }
        None => {
            let cert = find_certificate(instance).unwrap_or_else(|| InfeasibilityCertificate::NoFeasibleCombination {
                demands: problem.demands.iter().map(|d| d.id.clone()).collect(),
            });
            Err(SolveError::Infeasible(cert))
        }
    }
}

struct Search<'a, 'p, C> {
    problem: &'a Problem<'p, C>,
    trees: &'a [Vec<Tree>],
    pick: Vec<usize>,
    best: Option<(C, Plan)>,
    counter: &'a mut Counter,
}

impl<C: Scalar> Search<'_, '_, C> {
    fn install_cost(&self, verts: u16) -> C {
        let mut cost = C::zero();
        for (v, lsr) in self.problem.lsrs.iter().enumerate() {
            if verts & (1 << v) != 0 {
                cost = cost + lsr.install;
            }
        }
        cost
    }

    fn beaten(&self, lower_bound: C) -> bool {
        self.best.as_ref().is_some_and(|(b, _)| lower_bound > *b)
    }

    fn combine(&mut self, d: usize, verts: u16) -> Result<(), Abort> {
        if d == self.trees.len() {
            return self.assign_paths(verts);
        }
        for t in 0..self.trees[d].len() {
            let v = verts | self.trees[d][t].verts;
            if self.beaten(self.install_cost(v)) {
                continue;
            }
            self.pick[d] = t;
            self.combine(d + 1, v)?;
        }
        Ok(())
    }

    fn assign_paths(&mut self, verts: u16) -> Result<(), Abort> {
        let problem = self.problem;
        let mut weight = vec![0u64; problem.ledges.len()];
        let mut through = vec![0u64; problem.lsrs.len()];
        for (d, &t) in self.pick.iter().enumerate() {
            let bw = problem.demands[d].bandwidth;
            for &li in &self.trees[d][t].edges {
                weight[li] += bw;
                let (a, b) = problem.ledges[li].ends;
                through[a] += bw;
                through[b] += bw;
            }
        }
        if problem.lsrs.iter().zip(&through).any(|(l, &t)| l.limit.is_some_and(|lim| t > lim)) {
            return self.counter.tick();
        }
        let used: Vec<usize> = (0..weight.len()).filter(|&li| weight[li] > 0).collect();
        let install = self.install_cost(verts);
        let mut choice = vec![0usize; used.len()];
        let mut load = vec![0u64; problem.links.len()];
        loop {
            self.counter.tick()?;
            load.iter_mut().for_each(|l| *l = 0);
            for (i, &li) in used.iter().enumerate() {
                for &l in &problem.ledges[li].paths[choice[i]] {
                    load[l] += weight[li];
                }
            }
            let mut cost = Some(install);
            for (l, link) in problem.links.iter().enumerate() {
                cost = cost.and_then(|c| link.cost(load[l]).map(|x| c + x));
            }
            if let Some(cost) = cost {
                self.offer(cost, &used, &choice);
            }
            // odometer
            let mut i = 0;
            loop {
                if i == used.len() {
                    return Ok(());
                }
                choice[i] += 1;
                if choice[i] < problem.ledges[used[i]].paths.len() {
                    break;
                }
                choice[i] = 0;
                i += 1;
            }
        }
    }

    fn offer(&mut self, cost: C, used: &[usize], choice: &[usize]) {
        let better = match &self.best {
            None => true,
            Some((b, _)) if cost < *b => true,
            Some((b, _)) if cost > *b => false,
            Some((_, plan)) => {
                let candidate = self.plan(used, choice);
                self.problem.encoding(&candidate) < self.problem.encoding(plan)
            }
        };
        if better {
            let plan = self.plan(used, choice);
            self.best = Some((cost, plan));
        }
    }

    fn plan(&self, used: &[usize], choice: &[usize]) -> Plan {
        let mut plan = self.problem.empty_plan();
        for (d, &t) in self.pick.iter().enumerate() {
            plan.trees[d] = self.trees[d][t].edges.clone();
        }
        for (i, &li) in used.iter().enumerate() {
            plan.choice[li] = Some(choice[i]);
        }
        plan
    }
}
