use proptest::prelude::*;
use rand::Rng;

use wpc_core::chordal::{is_hole, lex_bfs_peo_or_hole, verify_peo, PeoOrHole};
use wpc_core::generators::{gen_dp_instance, gen_wpc, plant_obstruction, rng_from_seed, GenParams, TreeShape};
use wpc_core::graph::{parse_graph, write_edge_list, Graph, GraphFormat};
use wpc_core::kernel::{kernelize_dp, reduce_degree_two_bag, DegreeTwoOutcome};
use wpc_core::obstructions::{small_catalog, verify_obstruction_certificate, ObstructionKind};
use wpc_core::oracle::{brute_force_disjoint_paths, brute_force_is_wpc, OracleBudget, PathsVerdict};
use wpc_core::partition::{validate_partition_forest, write_forest};
use wpc_core::paths::{
    mark_vertices, normalize_instance, solve, validate_solution, write_instance, Answer, DpInstance, Solution, Terminals,
    Variant,
};
use wpc_core::recognizer::{recognize, Certificate};

fn graph_from_bits(n: usize, bits: &[bool]) -> Graph {
    let mut edges = Vec::new();
    let mut i = 0;
    for u in 0..n {
        for v in u + 1..n {
            if bits[i] {
                edges.push((u, v));
            }
            i += 1;
        }
    }
    Graph::from_edges(n, &edges).unwrap()
}

/// Any graph on up to `max_n` vertices.
fn small_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| graph_from_bits(n, &bits))
    })
}

fn wpc_params(seed: u64, bags: usize, variant: Variant) -> GenParams {
    GenParams {
        seed,
        bag_count: bags,
        bag_size: (1, 1 + (seed % 4) as usize),
        boundary_density: [0.3, 0.6, 1.0][(seed % 3) as usize],
        tree_shape: [TreeShape::Random, TreeShape::Path, TreeShape::Star][(seed / 3 % 3) as usize],
        k: 1 + (seed % 3) as usize,
        domain_density: 0.7,
        variant,
        max_set_size: 2,
    }
}

fn subset(seed: u64, n: usize) -> Vec<usize> {
    let mut rng = rng_from_seed(seed);
    (0..n).filter(|_| rng.gen_bool(0.6)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn edge_list_round_trips(g in small_graph(12)) {
        let text = write_edge_list(&g);
        let back = parse_graph(text.as_bytes(), GraphFormat::EdgeList).unwrap();
        prop_assert_eq!(write_edge_list(&back), text);
    }

    #[test]
    fn induced_on_everything_is_identity(g in small_graph(10)) {
        let all: Vec<usize> = (0..g.n()).collect();
        let (h, map) = g.induced_subgraph(&all).unwrap();
        prop_assert_eq!(map, all);
        prop_assert_eq!(h.edges().collect::<Vec<_>>(), g.edges().collect::<Vec<_>>());
    }

    #[test]
    fn is_clique_matches_all_pairs(g in small_graph(10), seed in any::<u64>()) {
        let s = subset(seed, g.n());
        let direct = s.iter().all(|&u| s.iter().all(|&v| u == v || g.has_edge(u, v)));
        prop_assert_eq!(g.is_clique(&s).unwrap(), direct);
    }

    #[test]
    fn chordal_witnesses_check_out_and_are_hereditary(g in small_graph(10), seed in any::<u64>()) {
        match lex_bfs_peo_or_hole(&g) {
            PeoOrHole::Hole(h) => prop_assert!(is_hole(&g, &h.cycle)),
            PeoOrHole::Peo(p) => {
                prop_assert_eq!(verify_peo(&g, &p.order).unwrap(), None);
                let (h, _) = g.induced_subgraph(&subset(seed, g.n())).unwrap();
                prop_assert!(matches!(lex_bfs_peo_or_hole(&h), PeoOrHole::Peo(_)));
            }
        }
    }

    #[test]
    fn generated_forests_satisfy_the_definition(seed in any::<u64>(), bags in 1usize..25) {
        let (g, f) = gen_wpc(&wpc_params(seed, bags, Variant::Dp)).unwrap();
        prop_assert_eq!(validate_partition_forest(&g, &f), None);
        for v in 0..g.n() {
            prop_assert!(f.bag(f.bag_of(v)).contains(&v));
        }
        for &(a, b) in f.links() {
            let (x, y) = (f.boundary(&g, a, b).unwrap().to_vec(), f.boundary(&g, b, a).unwrap().to_vec());
            prop_assert!(!x.is_empty() && !y.is_empty());
            for &u in &x {
                for &w in &y {
                    prop_assert!(g.has_edge(u, w));
                }
            }
        }
        let count = f.bags().len();
        let (a, b) = ((seed as usize) % count, (seed as usize / 7) % count);
        if f.tree_of(a) == f.tree_of(b) {
            let mut back = f.tree_path(b, a).unwrap();
            back.reverse();
            prop_assert_eq!(f.tree_path(a, b).unwrap(), back);
        }
    }

    #[test]
    fn recognizer_is_sound_and_gated_by_chordality(g in small_graph(11)) {
        let cert = recognize(&g);
        let hole = matches!(lex_bfs_peo_or_hole(&g), PeoOrHole::Hole(_));
        match &cert {
            Certificate::Accepted(f) => {
                prop_assert!(!hole);
                prop_assert_eq!(validate_partition_forest(&g, f), None);
            }
            Certificate::Rejected(c) => {
                prop_assert!(verify_obstruction_certificate(&g, c));
                prop_assert_eq!(matches!(c.kind, ObstructionKind::Hole { .. }), hole);
            }
        }
    }

    #[test]
    fn membership_is_hereditary(seed in any::<u64>(), bags in 1usize..30, cut in any::<u64>()) {
        let (g, _) = gen_wpc(&wpc_params(seed, bags, Variant::Dp)).unwrap();
        prop_assert!(recognize(&g).is_accepted());
        let (h, _) = g.induced_subgraph(&subset(cut, g.n())).unwrap();
        prop_assert!(recognize(&h).is_accepted());
    }

    #[test]
    fn planted_obstructions_are_rejected(seed in any::<u64>(), bags in 1usize..15, pick in any::<prop::sample::Index>()) {
        let catalog = small_catalog(3, 8);
        let kind = catalog[pick.index(catalog.len())];
        let (base, _) = gen_wpc(&wpc_params(seed, bags, Variant::Dp)).unwrap();
        let (g, _) = plant_obstruction(&base, kind, seed).unwrap();
        match recognize(&g) {
            Certificate::Rejected(c) => prop_assert!(verify_obstruction_certificate(&g, &c)),
            Certificate::Accepted(_) => prop_assert!(false, "accepted a graph with a planted {kind}"),
        }
    }

    #[test]
    fn generation_is_deterministic(seed in any::<u64>(), bags in 1usize..20) {
        let p = wpc_params(seed, bags, Variant::Srdp);
        let (g1, f1) = gen_wpc(&p).unwrap();
        let (g2, f2) = gen_wpc(&p).unwrap();
        prop_assert_eq!(write_edge_list(&g1), write_edge_list(&g2));
        prop_assert_eq!(write_forest(&f1), write_forest(&f2));
        // Small graphs may not have room for k pairs; the refusal must repeat too.
        let i1 = gen_dp_instance(&g1, &f1, &p).map(|i| write_instance(&i)).map_err(|e| e.to_string());
        let i2 = gen_dp_instance(&g2, &f2, &p).map(|i| write_instance(&i)).map_err(|e| e.to_string());
        prop_assert_eq!(i1, i2);
    }

    #[test]
    fn marking_respects_its_bounds(seed in any::<u64>(), bags in 2usize..40, variant_pick in 0usize..4) {
        let variant = [Variant::Srdp, Variant::Srtdp, Variant::Dp, Variant::Tdp][variant_pick];
        let p = wpc_params(seed, bags, variant);
        let (g, f) = gen_wpc(&p).unwrap();
        let Ok(inst) = gen_dp_instance(&g, &f, &p) else { return Ok(()) };
        let inst = inst.with_forest(f.clone());
        let k = inst.k();
        let heavy = vec![false; k];
        let marks = mark_vertices(&inst, &heavy);
        for i in 0..k {
            prop_assert!(marks.marks[i].iter().all(|&v| inst.in_domain(i, v)));
            for b in 0..f.bags().len() {
                prop_assert!(marks.marks_in_bag(i, b).len() <= 4 * k);
            }
        }
        prop_assert!(marks.marked_forest_leaves(&f) <= 2 * marks.light_count());
    }

    #[test]
    fn heavy_indices_mark_at_most_two_k(seed in any::<u64>(), bags in 2usize..40, extra in 0usize..3) {
        let (g, f) = gen_wpc(&wpc_params(seed, bags, Variant::Tdp)).unwrap();
        let edges: Vec<(usize, usize)> = g.edges().collect();
        prop_assume!(!edges.is_empty());
        let mut rng = rng_from_seed(seed);
        let shared = edges[rng.gen_range(0..edges.len())];
        let mut pairs = vec![shared, shared];
        for _ in 0..extra {
            let s = rng.gen_range(0..g.n());
            let t = rng.gen_range(0..g.n());
            if s != t && !g.has_edge(s, t) {
                pairs.push((s, t));
            }
        }
        let k = pairs.len();
        let heavy: Vec<bool> = (0..k).map(|i| i < 2).collect();
        let inst = DpInstance::new(g, Variant::Tdp, Terminals::Pairs(pairs), None).unwrap().with_forest(f);
        let marks = mark_vertices(&inst, &heavy);
        for i in 0..2 {
            prop_assert!(marks.marks[i].len() <= 2 * k);
            prop_assert!(marks.marks[i].iter().all(|&v| inst.graph.has_edge(v, shared.0) && inst.graph.has_edge(v, shared.1)));
        }
    }

    #[test]
    fn solver_outputs_validate(seed in any::<u64>(), bags in 2usize..60, variant_pick in 0usize..5) {
        let variant = [Variant::Srdp, Variant::Srtdp, Variant::Dp, Variant::Tdp, Variant::Srdcs][variant_pick];
        let p = wpc_params(seed, bags, variant);
        let (g, f) = gen_wpc(&p).unwrap();
        let Ok(inst) = gen_dp_instance(&g, &f, &p) else { return Ok(()) };
        let inst = inst.with_forest(f.clone());
        if let Answer::Yes(sol) = solve(&inst).unwrap() {
            prop_assert!(validate_solution(&inst, &sol).is_ok());
            if let (Variant::Srdp, Solution::Paths(paths)) = (variant, &sol) {
                // Paths of a minimal solution meet each bag at most twice.
                for path in paths {
                    for bag in f.bags() {
                        prop_assert!(path.iter().filter(|v| bag.contains(v)).count() <= 2);
                    }
                }
            }
        }
    }
}

fn oracle_yes(inst: &DpInstance) -> bool {
    matches!(brute_force_disjoint_paths(inst, OracleBudget::paths()), PathsVerdict::Solution(_))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn normalization_keeps_the_answer(seed in any::<u64>(), bags in 2usize..8, variant_pick in 0usize..4) {
        let variant = [Variant::Srdp, Variant::Srtdp, Variant::Dp, Variant::Tdp][variant_pick];
        let p = wpc_params(seed, bags, variant);
        let (g, f) = gen_wpc(&p).unwrap();
        prop_assume!(g.n() <= 12 && g.n() >= 2);
        // Terminals on edges exercise the pairs normalization drops.
        let mut rng = rng_from_seed(seed);
        let edges: Vec<(usize, usize)> = g.edges().collect();
        let pairs: Vec<(usize, usize)> = (0..p.k)
            .map(|_| {
                if !edges.is_empty() && rng.gen_bool(0.5) {
                    edges[rng.gen_range(0..edges.len().min(2))]
                } else {
                    let s = rng.gen_range(0..g.n());
                    (s, (s + rng.gen_range(1..g.n())) % g.n())
                }
            })
            .collect();
        let inst = DpInstance::new(g, variant, Terminals::Pairs(pairs), None).unwrap().with_forest(f);
        prop_assert_eq!(oracle_yes(&inst), oracle_yes(&normalize_instance(&inst)));
    }

    #[test]
    fn oracles_are_deterministic(g in small_graph(8)) {
        prop_assert!(brute_force_is_wpc(&g, OracleBudget::wpc()) == brute_force_is_wpc(&g, OracleBudget::wpc()));
    }

    #[test]
    fn degree_two_reduction_keeps_a_valid_forest(seed in any::<u64>(), bags in 3usize..10, variant_pick in 0usize..2) {
        let variant = [Variant::Dp, Variant::Tdp][variant_pick];
        let mut p = wpc_params(seed, bags, variant);
        p.tree_shape = TreeShape::Path;
        let (g, f) = gen_wpc(&p).unwrap();
        prop_assume!(g.n() <= 14);
        let Ok(inst) = gen_dp_instance(&g, &f, &p) else { return Ok(()) };
        let inst = inst.with_forest(f.clone());
        let before = oracle_yes(&inst);
        for bag in 0..f.bags().len() {
            match reduce_degree_two_bag(&inst, bag).unwrap() {
                DegreeTwoOutcome::Reduced(r) => {
                    let forest = r.instance.forest.as_ref().unwrap();
                    prop_assert_eq!(validate_partition_forest(&r.instance.graph, forest), None);
                    prop_assert_eq!(oracle_yes(&r.instance), before);
                }
                DegreeTwoOutcome::TrivialNo => prop_assert!(!before),
                DegreeTwoOutcome::NotApplicable => {}
            }
        }
    }

    #[test]
    fn kernelization_is_idempotent(seed in any::<u64>(), bags in 2usize..200, variant_pick in 0usize..2) {
        let variant = [Variant::Dp, Variant::Tdp][variant_pick];
        let p = wpc_params(seed, bags, variant);
        let (g, f) = gen_wpc(&p).unwrap();
        let Ok(inst) = gen_dp_instance(&g, &f, &p) else { return Ok(()) };
        let once = kernelize_dp(&inst.with_forest(f)).unwrap();
        let twice = kernelize_dp(&once.instance).unwrap();
        prop_assert_eq!(&twice.instance, &once.instance);
        prop_assert_eq!(twice.verdict, once.verdict);
    }
}
