use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::mlg::MultiLayerGraph;
use crate::scalar::Scalar;
use crate::synthesis::Instance;

use super::problem::{Plan, Problem};
use super::{Design, SolveError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Move {
    /// Uninstall an installed LSR (rerouting demands through it) or install
    /// an idle one and reroute everything.
    ToggleLsr(usize),
    SwitchPath { edge: usize, path: usize },
    /// Rip up one demand and regrow its tree from the given terminal.
    Reroot { demand: usize, terminal: usize },
}

/// First-improvement local search from a feasible `seed`. Each pass visits
/// every move once in an order shuffled by `rng_seed`; a move is kept only if
/// it stays feasible and strictly lowers the cost. Stops after `budget` move
/// evaluations or a pass without improvement.
pub fn local_search<C: Scalar>(
    mlg: &MultiLayerGraph<C>,
    instance: &Instance<C>,
    seed: &Design<C>,
    budget: u64,
    rng_seed: u64,
) -> Result<Design<C>, SolveError> {
    local_search_timed(mlg, instance, seed, budget, rng_seed, None)
}

pub(crate) fn local_search_timed<C: Scalar>(
    mlg: &MultiLayerGraph<C>,
    instance: &Instance<C>,
    seed: &Design<C>,
    budget: u64,
    rng_seed: u64,
    time_limit: Option<f64>,
) -> Result<Design<C>, SolveError> {
    if budget == 0 {
        return Ok(seed.clone());
    }
    let problem = Problem::new(mlg, instance)?;
    let mut plan = problem.plan_from_design(seed)?;
    problem.normalize(&mut plan);
    let start = problem.evaluate(&plan);
    if !start.feasible {
        log::warn!("local search seed is infeasible; returning it unchanged");
        return Ok(seed.clone());
    }
    let mut cost = start.cost;
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let deadline = time_limit.map(|s| Instant::now() + Duration::from_secs_f64(s.max(0.0)));
    let mut spent = 0u64;
    let mut improved_any = false;

    'passes: loop {
        let mut moves = neighbourhood(&problem, &plan);
        moves.shuffle(&mut rng);
        let mut improved = false;
        for mv in moves {
            if spent >= budget || deadline.is_some_and(|d| Instant::now() >= d) {
                break 'passes;
            }
            spent += 1;
            let Some(candidate) = apply(&problem, &plan, mv) else { continue };
            let eval = problem.evaluate(&candidate);
            if eval.feasible && eval.cost < cost {
                log::debug!("local search: {mv:?} lowers cost {cost} -> {}", eval.cost);
                plan = candidate;
                cost = eval.cost;
                improved = true;
                improved_any = true;
            }
        }
        if !improved {
            break;
        }
    }
    log::debug!("local search used {spent} of {budget} evaluations");
    if !improved_any {
        return Ok(seed.clone());
    }
    Ok(problem.to_design(&plan))
}

fn neighbourhood<C: Scalar>(problem: &Problem<'_, C>, plan: &Plan) -> Vec<Move> {
    let mut moves: Vec<Move> = (0..problem.lsrs.len()).map(Move::ToggleLsr).collect();
    for (edge, choice) in plan.choice.iter().enumerate() {
        if let Some(current) = *choice {
            for path in (0..problem.ledges[edge].paths.len()).filter(|&p| p != current) {
                moves.push(Move::SwitchPath { edge, path });
            }
        }
    }
    for (demand, info) in problem.demands.iter().enumerate() {
        for &terminal in &info.terminals {
            moves.push(Move::Reroot { demand, terminal });
        }
    }
    moves
}

fn rip_up<C: Scalar>(problem: &Problem<'_, C>, plan: &mut Plan, demands: &[usize]) {
    for &d in demands {
        plan.trees[d].clear();
    }
    problem.normalize(plan);
}

fn apply<C: Scalar>(problem: &Problem<'_, C>, plan: &Plan, mv: Move) -> Option<Plan> {
    let mut next = plan.clone();
    match mv {
        Move::ToggleLsr(v) => {
            let usage = problem.usage(plan);
            if problem.installed(plan, &usage, v) {
                if problem.demands.iter().any(|d| d.terminals.contains(&v)) {
                    return None;
                }
                next.extra[v] = false;
                let affected: Vec<usize> = problem
                    .order
                    .iter()
                    .copied()
                    .filter(|&d| {
                        plan.trees[d].iter().any(|&li| {
                            let (a, b) = problem.ledges[li].ends;
                            a == v || b == v
                        })
                    })
                    .collect();
                rip_up(problem, &mut next, &affected);
                for d in affected {
                    if !problem.route_demand(&mut next, d, None, Some(v)) {
                        return None;
                    }
                }
            } else {
                next.extra[v] = true;
                let all = problem.order.clone();
                rip_up(problem, &mut next, &all);
                for d in all {
                    if !problem.route_demand(&mut next, d, None, None) {
                        return None;
                    }
                }
                if problem.usage(&next).lsr_degree[v] == 0 {
                    next.extra[v] = false;
                }
            }
        }
        Move::SwitchPath { edge, path } => {
            if plan.choice[edge].is_none_or(|c| c == path) {
                return None;
            }
            next.choice[edge] = Some(path);
        }
        Move::Reroot { demand, terminal } => {
            rip_up(problem, &mut next, &[demand]);
            if !problem.route_demand(&mut next, demand, Some(terminal), None) {
                return None;
            }
        }
    }
    (next != *plan).then_some(next)
}
