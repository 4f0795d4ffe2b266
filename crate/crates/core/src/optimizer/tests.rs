use proptest::prelude::*;

use super::*;
use crate::io::parse_instance;
use crate::synthesis::{synthesize, CandidatePolicy, Demand, TransportLink, TransportNode};

fn node(id: &str, lsr: bool, cost: u64) -> TransportNode<u64> {
    TransportNode { id: id.into(), lsr_candidate: lsr, lsr_install_cost: cost, throughput_limit: None }
}

fn link(a: &str, b: &str, fixed: u64, size: u64, module_cost: u64, max: u64) -> TransportLink<u64> {
    TransportLink { a: a.into(), b: b.into(), fixed_cost: fixed, module_size: size, module_cost, max_modules: max }
}

fn demand(id: &str, source: &str, sinks: &[&str], bandwidth: u64) -> Demand {
    Demand { id: id.into(), source: source.into(), sinks: sinks.iter().map(|s| s.to_string()).collect(), bandwidth }
}

fn instance(
    nodes: Vec<TransportNode<u64>>,
    links: Vec<TransportLink<u64>>,
    demands: Vec<Demand>,
    k_paths: u32,
) -> Instance<u64> {
    Instance {
        name: "t".into(),
        transport_nodes: nodes,
        transport_links: links,
        demands,
        policy: CandidatePolicy { k_paths, ..CandidatePolicy::default() },
        solver: SolverConfig::default(),
    }
}

fn fixture(name: &str) -> Instance<u64> {
    let path = format!("{}/fixtures/{name}.toml", env!("CARGO_MANIFEST_DIR"));
    parse_instance(&std::fs::read(path).unwrap()).unwrap()
}

fn run(inst: &Instance<u64>, mode: SolverMode) -> Result<Design<u64>, SolveError> {
    let mlg = synthesize(inst).unwrap();
    solve(&mlg, inst, &SolverConfig { mode, ..SolverConfig::default() })
}

fn exact(inst: &Instance<u64>) -> Design<u64> {
    run(inst, SolverMode::ExactBruteForce).unwrap()
}

fn installed_lsrs(mlg: &MultiLayerGraph<u64>, d: &Design<u64>) -> Vec<String> {
    d.selection
        .chosen_vertices
        .iter()
        .map(|&v| &mlg.vertices()[v.index()])
        .filter(|v| v.layer == LayerId::LOGICAL)
        .map(|v| v.name.clone())
        .collect()
}

fn pair() -> Instance<u64> {
    instance(
        vec![node("a", true, 10), node("b", true, 10)],
        vec![link("a", "b", 2, 10, 3, 1)],
        vec![demand("d", "a", &["b"], 4)],
        1,
    )
}

#[test]
fn objective_of_empty_design_is_zero() {
    let mut inst = pair();
    inst.demands.clear();
    let mlg = synthesize(&inst).unwrap();
    assert_eq!(objective(&mlg, &Design::empty()).unwrap(), 0);
    let d = solve(&mlg, &inst, &SolverConfig::default()).unwrap();
    assert_eq!(d.cost, 0);
    assert!(d.selection.is_empty());
}

#[test]
fn objective_sums_installs_fixed_and_modules() {
    let inst = pair();
    let mlg = synthesize(&inst).unwrap();
    for mode in [SolverMode::Greedy, SolverMode::GreedyPlusLocalSearch, SolverMode::ExactBruteForce] {
        let d = run(&inst, mode).unwrap();
        assert_eq!(objective(&mlg, &d).unwrap(), 10 + 10 + 2 + 3);
        assert_eq!(d.cost, 25);
    }
}

#[test]
fn objective_rejects_unselected_dimensioning() {
    let inst = pair();
    let mlg = synthesize(&inst).unwrap();
    let mut d = exact(&inst);
    let link = *d.dimensioning.keys().next().unwrap();
    d.selection.chosen_edges.remove(&link);
    assert!(objective(&mlg, &d).is_err());
}

#[test]
fn audit_catches_wrong_cost_and_missing_route() {
    let inst = pair();
    let mlg = synthesize(&inst).unwrap();
    let mut d = exact(&inst);
    audit_design(&mlg, &inst, &d).unwrap();
    d.cost += 1;
    assert!(matches!(audit_design(&mlg, &inst, &d), Err(DesignError::CostMismatch { .. })));
    d.cost -= 1;
    d.routes.clear();
    assert!(matches!(audit_design(&mlg, &inst, &d), Err(DesignError::RouteCount { .. })));
}

#[test]
fn adjacent_candidates_use_the_direct_edge() {
    let inst = instance(
        vec![node("a", true, 5), node("b", true, 5), node("c", true, 1)],
        vec![link("a", "b", 1, 100, 1, 4), link("b", "c", 1, 100, 1, 4), link("a", "c", 1, 100, 1, 4)],
        vec![demand("d", "a", &["b"], 10)],
        2,
    );
    let mlg = synthesize(&inst).unwrap();
    let d = exact(&inst);
    assert_eq!(installed_lsrs(&mlg, &d), ["a", "b"]);
    assert_eq!(d.routes[0].logical_tree.len(), 1);
    assert_eq!(d.cost, 5 + 5 + 1 + 1);
}

#[test]
fn two_candidates_have_one_feasible_design() {
    let inst = instance(
        vec![node("a", true, 3), node("m", false, 0), node("b", true, 4)],
        vec![link("a", "m", 1, 5, 2, 2), link("m", "b", 1, 5, 2, 2)],
        vec![demand("d", "a", &["b"], 7)],
        2,
    );
    let d = exact(&inst);
    // 3 + 4 installs, two links with 2 modules each
    assert_eq!(d.cost, 3 + 4 + 2 * (1 + 2 * 2));
    assert_eq!(d.dimensioning.values().copied().collect::<Vec<_>>(), [2, 2]);
}

#[test]
fn bottleneck_cut_is_infeasible() {
    let inst = fixture("i3");
    for mode in [SolverMode::Greedy, SolverMode::GreedyPlusLocalSearch, SolverMode::ExactBruteForce] {
        match run(&inst, mode) {
            Err(SolveError::Infeasible(InfeasibilityCertificate::BottleneckCut { widest, bandwidth, .. })) => {
                assert_eq!((widest, bandwidth), (5, 8));
            }
            other => panic!("{mode}: {other:?}"),
        }
    }
}

#[test]
fn throughput_limit_below_bandwidth_is_certified() {
    let mut inst = pair();
    inst.transport_nodes[1].throughput_limit = Some(3);
    assert!(matches!(
        run(&inst, SolverMode::Greedy),
        Err(SolveError::Infeasible(InfeasibilityCertificate::ThroughputTooLow { limit: 3, .. }))
    ));
}

#[test]
fn capacity_exhausted_across_demands_is_infeasible() {
    // each demand fits alone; together they overflow the only link
    let mut inst = pair();
    inst.demands.push(demand("e", "b", &["a"], 7));
    assert!(matches!(
        run(&inst, SolverMode::ExactBruteForce),
        Err(SolveError::Infeasible(InfeasibilityCertificate::NoFeasibleCombination { .. }))
    ));
    assert!(matches!(
        run(&inst, SolverMode::Greedy),
        Err(SolveError::Infeasible(InfeasibilityCertificate::DemandUnroutable { .. }))
    ));
}

#[test]
fn single_demand_greedy_matches_solve() {
    let inst = pair();
    let mlg = synthesize(&inst).unwrap();
    let direct = greedy_construct(&mlg, &inst).unwrap();
    assert_eq!(direct, run(&inst, SolverMode::Greedy).unwrap());
}

#[test]
fn second_identical_demand_shares_installed_elements() {
    let mut inst = pair();
    inst.demands[0].bandwidth = 3;
    let one = run(&inst, SolverMode::Greedy).unwrap();
    inst.demands.push(demand("e", "a", &["b"], 3));
    let two = run(&inst, SolverMode::Greedy).unwrap();
    // 6 still fits in one module: nothing new to pay for
    assert_eq!(one.cost, two.cost);
    assert_eq!(one.selection.chosen_vertices.len() + 2, two.selection.chosen_vertices.len());
}

#[test]
fn greedy_contention_matches_hand_trace() {
    // big (6) first: direct A-B costs 10 + 10 + 1 + 1 = 22 against 36 via C.
    // small (5) cannot join A-B (11 > 10, one module max); via C it pays
    // C's install 2 and (5 + 2) on each of A-C and C-B: 16. Total 38.
    let inst = fixture("i2");
    let mlg = synthesize(&inst).unwrap();
    let g = greedy_construct(&mlg, &inst).unwrap();
    assert_eq!(g.cost, 38);
    assert_eq!(g.routes[0].logical_tree.len(), 1);
    assert_eq!(g.routes[1].logical_tree.len(), 2);
    assert_eq!(installed_lsrs(&mlg, &g), ["A", "B", "C"]);
    assert_eq!(exact(&inst).cost, 38);
}

#[test]
fn ring_fixture_brackets() {
    let inst = fixture("i1");
    let g = run(&inst, SolverMode::Greedy).unwrap();
    let ls = run(&inst, SolverMode::GreedyPlusLocalSearch).unwrap();
    let x = exact(&inst);
    assert!(x.cost <= ls.cost && ls.cost <= g.cost, "{} {} {}", x.cost, ls.cost, g.cost);
}

#[test]
fn local_search_budget_zero_returns_seed() {
    let inst = fixture("i1");
    let mlg = synthesize(&inst).unwrap();
    let seed = greedy_construct(&mlg, &inst).unwrap();
    assert_eq!(local_search(&mlg, &inst, &seed, 0, 3).unwrap(), seed);
}

#[test]
fn local_search_drops_an_idle_lsr() {
    let inst = instance(
        vec![node("a", true, 5), node("b", true, 5), node("c", true, 7)],
        vec![link("a", "b", 1, 10, 1, 1), link("b", "c", 1, 10, 1, 1)],
        vec![demand("d", "a", &["b"], 2)],
        1,
    );
    let mlg = synthesize(&inst).unwrap();
    let mut seed = greedy_construct(&mlg, &inst).unwrap();
    let c = mlg.find_vertex(LayerId::LOGICAL, "c").unwrap();
    let mapping = *mlg.incident(c).iter().find(|e| !mlg.edges()[e.index()].is_intra(LayerId::LOGICAL)).unwrap();
    seed.selection.insert_edge(&mlg, mapping).unwrap();
    seed.cost = objective(&mlg, &seed).unwrap();
    assert_eq!(seed.cost, 5 + 5 + 7 + 1 + 1);
    let improved = local_search(&mlg, &inst, &seed, 100, 0).unwrap();
    assert!(improved.cost < seed.cost);
    assert_eq!(improved.cost, 12);
    audit_design(&mlg, &inst, &improved).unwrap();
}

#[test]
fn relabelling_a_symmetric_ring_keeps_the_optimum() {
    let names = ["p", "q", "r", "s"];
    let build = |perm: [usize; 4]| {
        let n = |i: usize| names[perm[i]];
        instance(
            (0..4).map(|i| node(n(i), true, 6)).collect(),
            (0..4).map(|i| link(n(i), n((i + 1) % 4), 2, 10, 1, 2)).collect(),
            vec![demand("d", n(0), &[n(2)], 5)],
            2,
        )
    };
    let base = exact(&build([0, 1, 2, 3])).cost;
    for perm in [[1, 2, 3, 0], [3, 2, 1, 0], [2, 0, 3, 1]] {
        assert_eq!(exact(&build(perm)).cost, base);
    }
}

#[test]
fn exact_refuses_oversized_instances() {
    let mut inst = pair();
    inst.policy.k_paths = 4;
    match run(&inst, SolverMode::ExactBruteForce) {
        Err(SolveError::LimitsExceeded(r)) => assert_eq!(r.k_paths, 4),
        other => panic!("{other:?}"),
    }
    let nodes: Vec<_> = (0..11).map(|i| node(&format!("n{i:02}"), true, 1)).collect();
    let links = (1..11).map(|i| link(&format!("n{:02}", i - 1), &format!("n{i:02}"), 1, 5, 1, 1)).collect();
    let inst = instance(nodes, links, vec![demand("d", "n00", &["n10"], 1)], 1);
    match run(&inst, SolverMode::ExactBruteForce) {
        Err(SolveError::LimitsExceeded(r)) => assert_eq!(r.lsr_candidates, 11),
        other => panic!("{other:?}"),
    }
}

#[test]
fn exact_evaluation_cap_refuses() {
    let inst = fixture("i1");
    let mlg = synthesize(&inst).unwrap();
    let limits = ExactLimits { max_evaluations: 10, ..ExactLimits::default() };
    assert!(matches!(exact_bruteforce(&mlg, &inst, &limits), Err(SolveError::LimitsExceeded(_))));
}

#[test]
fn solving_is_generic_over_the_money_type() {
    use num_rational::Ratio;
    let inst = fixture("i2");
    let r = inst.map_costs(|c| Ratio::new(c as i64, 3));
    let mlg = synthesize(&r).unwrap();
    let cfg = SolverConfig { mode: SolverMode::ExactBruteForce, ..SolverConfig::default() };
    assert_eq!(solve(&mlg, &r, &cfg).unwrap().cost, Ratio::new(38, 3));
    let f = inst.map_costs(|c| c as f64);
    let mlg = synthesize(&f).unwrap();
    assert_eq!(solve(&mlg, &f, &cfg).unwrap().cost, 38.0);
}

fn small_instance() -> impl Strategy<Value = Instance<u64>> {
    (3usize..=5, 1u64..4, any::<u64>()).prop_map(|(n, k, seed)| {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
        let nodes = names.iter().enumerate().map(|(i, id)| node(id, i < 3, rng.random_range(1..20))).collect();
        let mut links = Vec::new();
        for i in 1..n {
            let j = rng.random_range(0..i);
            links.push(link(&names[j], &names[i], rng.random_range(1..8), 5, rng.random_range(1..5), 3));
        }
        if n > 3 && !links.iter().any(|l| l.a == names[0] && l.b == names[n - 1]) {
            links.push(link(&names[0], &names[n - 1], rng.random_range(1..8), 5, rng.random_range(1..5), 3));
        }
        let demands = (0..2)
            .map(|d| {
                let s = rng.random_range(0..3);
                let t = (s + rng.random_range(1..3)) % 3;
                demand(&format!("d{d}"), &names[s], &[&names[t]], rng.random_range(1..8))
            })
            .collect();
        instance(nodes, links, demands, k.min(2) as u32)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn adding_a_demand_never_lowers_the_optimum(inst in small_instance()) {
        let mut fewer = inst.clone();
        fewer.demands.pop();
        match (run(&fewer, SolverMode::ExactBruteForce), run(&inst, SolverMode::ExactBruteForce)) {
            (Ok(a), Ok(b)) => prop_assert!(a.cost <= b.cost),
            (Err(_), Ok(_)) => prop_assert!(false, "subset infeasible while superset is feasible"),
            _ => {}
        }
    }

    #[test]
    fn scaling_costs_scales_every_mode(inst in small_instance(), c in 2u64..9) {
        let scaled = inst.map_costs(|x| x * c);
        for mode in [SolverMode::Greedy, SolverMode::GreedyPlusLocalSearch, SolverMode::ExactBruteForce] {
            match (run(&inst, mode), run(&scaled, mode)) {
                (Ok(a), Ok(b)) => {
                    prop_assert_eq!(a.cost * c, b.cost);
                    prop_assert_eq!(&a.routes, &b.routes);
                    prop_assert_eq!(&a.selection, &b.selection);
                }
                (Err(_), Err(_)) => {}
                (a, b) => prop_assert!(false, "{mode}: {a:?} vs {b:?}"),
            }
        }
    }

    #[test]
    fn modes_are_sandwiched_and_feasible(inst in small_instance()) {
        let mlg = synthesize(&inst).unwrap();
        let Ok(g) = run(&inst, SolverMode::Greedy) else { return Ok(()) };
        let ls = run(&inst, SolverMode::GreedyPlusLocalSearch).unwrap();
        let x = run(&inst, SolverMode::ExactBruteForce).unwrap();
        prop_assert!(x.cost <= ls.cost && ls.cost <= g.cost);
        for d in [&g, &ls, &x] {
            let audit = audit_design(&mlg, &inst, d).unwrap();
            prop_assert!(audit.capacity.is_feasible());
        }
    }
}
